//! Coexistence equilibrium, linearization and stability classification.
//!
//! The nondegenerate fixed point solves the four linear zero-rate conditions
//!
//! ```text
//! | k1  0   B11 B12 |   | x1 |   | r1 |
//! | 0   k2  B21 B22 | . | x2 | = | r2 |
//! | C11 C12 0   0   |   | X1 |   | p1 |
//! | C21 C22 0   0   |   | X2 |   | p2 |
//! ```
//!
//! and at such a point the Jacobian of the increment-form map reduces to
//!
//! ```text
//! | 1-k1 x1   0          -B11 x1  -B12 x1 |
//! | 0         1-k2 x2    -B21 x2  -B22 x2 |
//! | C11 X1    C12 X1     1        0       |
//! | C21 X2    C22 X2     0        1       |
//! ```
//!
//! A positive fixed point is stable when every eigenvalue of that matrix lies
//! strictly inside the unit circle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lvmap::{CoeffParams, EcoParams, LvError};
use crate::smallmat::{max_modulus, Complex, Mat, MatError};

/// A spectral radius at or above `1 - STABILITY_MARGIN` counts as unstable.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Relative equilibrium residual accepted by [`jacobian`].
pub const EQUILIBRIUM_TOL: f64 = 1e-8;

pub const DEFAULT_RESOLUTION: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("point is not a nondegenerate fixed point (relative residual {residual:e} in equation {equation})")]
    NotAFixedPoint { equation: usize, residual: f64 },
    #[error("diagram resolution must be at least 2, got {0}")]
    BadResolution(usize),
    #[error("invalid diagram template: {0}")]
    InvalidTemplate(#[from] LvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// Solution of the linear system, absent when the system is singular.
    /// Coordinates may be negative.
    pub point: Option<[f64; 4]>,
    /// All four coordinates strictly positive.
    pub positive: bool,
}

impl FixedPointReport {
    pub fn exists(&self) -> bool {
        self.point.is_some()
    }
}

fn equilibrium_matrix(c: &CoeffParams) -> Result<Mat, MatError> {
    Mat::from_rows(&[
        [c.k[0], 0.0, c.b[0][0], c.b[0][1]],
        [0.0, c.k[1], c.b[1][0], c.b[1][1]],
        [c.c[0][0], c.c[0][1], 0.0, 0.0],
        [c.c[1][0], c.c[1][1], 0.0, 0.0],
    ])
}

pub fn fixed_point(c: &CoeffParams) -> FixedPointReport {
    let solved = equilibrium_matrix(c)
        .and_then(|m| m.invert())
        .and_then(|inv| inv.mul_vec(&[c.r[0], c.r[1], c.p[0], c.p[1]]));
    match solved {
        Ok(v) if v.iter().all(|x| x.is_finite()) => {
            let point = [v[0], v[1], v[2], v[3]];
            FixedPointReport {
                point: Some(point),
                positive: point.iter().all(|&x| x > 0.0),
            }
        }
        _ => FixedPointReport {
            point: None,
            positive: false,
        },
    }
}

/// Largest relative violation of the zero-rate conditions at `x`, and the
/// equation it occurs in.
pub fn equilibrium_residual(c: &CoeffParams, x: &[f64; 4]) -> (usize, f64) {
    let g = c.per_capita_rates(x);
    let scale = [
        c.r[0].abs() + (c.k[0] * x[0]).abs() + (c.b[0][0] * x[2]).abs() + (c.b[0][1] * x[3]).abs(),
        c.r[1].abs() + (c.k[1] * x[1]).abs() + (c.b[1][0] * x[2]).abs() + (c.b[1][1] * x[3]).abs(),
        c.p[0].abs() + (c.c[0][0] * x[0]).abs() + (c.c[0][1] * x[1]).abs(),
        c.p[1].abs() + (c.c[1][0] * x[0]).abs() + (c.c[1][1] * x[1]).abs(),
    ];
    (0..4)
        .map(|i| {
            let rel = if scale[i] > 0.0 {
                g[i].abs() / scale[i]
            } else {
                g[i].abs()
            };
            (i, rel)
        })
        .fold(
            (0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
}

fn assemble_jacobian(c: &CoeffParams, x: &[f64; 4]) -> Result<Mat, MatError> {
    let [x1, x2, y1, y2] = *x;
    Mat::from_rows(&[
        [1.0 - c.k[0] * x1, 0.0, -c.b[0][0] * x1, -c.b[0][1] * x1],
        [0.0, 1.0 - c.k[1] * x2, -c.b[1][0] * x2, -c.b[1][1] * x2],
        [c.c[0][0] * y1, c.c[0][1] * y1, 1.0, 0.0],
        [c.c[1][0] * y2, c.c[1][1] * y2, 0.0, 1.0],
    ])
}

/// Jacobian of the map at a nondegenerate fixed point.
///
/// The closed form only holds where all four per-capita rates vanish, so `fp`
/// is rejected when its relative equilibrium residual exceeds
/// [`EQUILIBRIUM_TOL`].
pub fn jacobian(c: &CoeffParams, fp: &[f64; 4]) -> Result<Mat, StabilityError> {
    let (equation, residual) = equilibrium_residual(c, fp);
    if !(residual <= EQUILIBRIUM_TOL) {
        return Err(StabilityError::NotAFixedPoint { equation, residual });
    }
    assemble_jacobian(c, fp).map_err(|_| StabilityError::NotAFixedPoint {
        equation,
        residual: f64::INFINITY,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub eigenvalues: Vec<Complex>,
    pub spectral_radius: f64,
}

impl EigenReport {
    pub fn of(m: &Mat) -> Result<EigenReport, MatError> {
        let eigenvalues = m.eigenvalues()?;
        let spectral_radius = max_modulus(&eigenvalues);
        Ok(EigenReport {
            eigenvalues,
            spectral_radius,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    NoUniqueFixedPoint,
    NonPositive,
    Stable,
    Unstable,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::NoUniqueFixedPoint => "NoUniqueFixedPoint",
            StabilityClass::NonPositive => "NonPositive",
            StabilityClass::Stable => "Stable",
            StabilityClass::Unstable => "Unstable",
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: StabilityClass,
    pub fixed_point: FixedPointReport,
    /// Present exactly for `Stable` and `Unstable`.
    pub eigen: Option<EigenReport>,
    /// Set when the eigensolver did not converge; `eigen` then holds its
    /// best iterate and the class is `Unstable`.
    pub warning: Option<String>,
}

pub fn classify(c: &CoeffParams) -> Classification {
    let fixed_point = fixed_point(c);
    let (point, class) = match (fixed_point.point, fixed_point.positive) {
        (None, _) => (None, StabilityClass::NoUniqueFixedPoint),
        (Some(_), false) => (None, StabilityClass::NonPositive),
        (Some(p), true) => (Some(p), StabilityClass::Stable),
    };
    let Some(point) = point else {
        return Classification {
            class,
            fixed_point,
            eigen: None,
            warning: None,
        };
    };

    // the point comes straight from the linear solve, so the closed form applies
    let jac = match assemble_jacobian(c, &point) {
        Ok(j) => j,
        Err(e) => {
            return Classification {
                class: StabilityClass::NoUniqueFixedPoint,
                fixed_point,
                eigen: None,
                warning: Some(e.to_string()),
            }
        }
    };
    match EigenReport::of(&jac) {
        Ok(eigen) => Classification {
            class: if eigen.spectral_radius < 1.0 - STABILITY_MARGIN {
                StabilityClass::Stable
            } else {
                StabilityClass::Unstable
            },
            fixed_point,
            eigen: Some(eigen),
            warning: None,
        },
        Err(MatError::NoConvergence { best, .. }) => {
            let spectral_radius = max_modulus(&best);
            Classification {
                class: StabilityClass::Unstable,
                fixed_point,
                eigen: Some(EigenReport {
                    eigenvalues: best,
                    spectral_radius,
                }),
                warning: Some("eigensolver did not converge; best iterate reported".into()),
            }
        }
        Err(e) => Classification {
            class: StabilityClass::Unstable,
            fixed_point,
            eigen: None,
            warning: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub h1: f64,
    pub h2: f64,
    pub class: StabilityClass,
    pub spectral_radius: Option<f64>,
    pub warning: bool,
}

/// Classification of the normalized efficiency square.
///
/// Cell `(i, j)` samples `h1 = (i + 0.5) / N`, `h2 = (j + 0.5) / N`, where
/// `h1` is predator 1's efficiency on prey 1 and `h2` predator 2's on prey 2.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityGrid {
    resolution: usize,
    cells: Vec<GridCell>,
}

impl StabilityGrid {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, i: usize, j: usize) -> &GridCell {
        &self.cells[i * self.resolution + j]
    }

    /// Cells in `(i, j)` row-major order, `j` varying fastest.
    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    pub fn count(&self, class: StabilityClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }
}

pub fn cell_center(index: usize, resolution: usize) -> f64 {
    (index as f64 + 0.5) / resolution as f64
}

fn diagram_cell(template: &EcoParams, resolution: usize, idx: usize) -> GridCell {
    let (i, j) = (idx / resolution, idx % resolution);
    let (h1, h2) = (cell_center(i, resolution), cell_center(j, resolution));
    let result = classify(&template.with_efficiency_pair(h1, h2).compile());
    GridCell {
        h1,
        h2,
        class: result.class,
        spectral_radius: result.eigen.map(|e| e.spectral_radius),
        warning: result.warning.is_some(),
    }
}

fn check_template(template: &EcoParams, resolution: usize) -> Result<(), StabilityError> {
    if resolution < 2 {
        return Err(StabilityError::BadResolution(resolution));
    }
    template.with_efficiency_pair(0.5, 0.5).validate()?;
    Ok(())
}

/// Stability diagram over the efficiency square; the template's own
/// efficiency matrix is ignored. Cells are evaluated in parallel.
pub fn diagram(template: &EcoParams, resolution: usize) -> Result<StabilityGrid, StabilityError> {
    check_template(template, resolution)?;
    let cells = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| diagram_cell(template, resolution, idx))
        .collect();
    Ok(StabilityGrid { resolution, cells })
}

/// Single-threaded [`diagram`]; produces identical output.
pub fn diagram_serial(
    template: &EcoParams,
    resolution: usize,
) -> Result<StabilityGrid, StabilityError> {
    check_template(template, resolution)?;
    let cells = (0..resolution * resolution)
        .map(|idx| diagram_cell(template, resolution, idx))
        .collect();
    Ok(StabilityGrid { resolution, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eco(efficiency: [[f64; 2]; 2]) -> EcoParams {
        EcoParams {
            growth: [1.5; 2],
            capacity: [1e4; 2],
            search: [0.01; 2],
            dependency: [0.3; 2],
            efficiency,
            adaptation: [[1.0; 2]; 2],
            conversion: [[0.02; 2]; 2],
        }
    }

    #[test]
    fn fig1a_fixed_point_and_jacobian_diagonal() {
        let c = eco([[0.3, 0.3], [0.2, 0.5]]).compile();
        let fp = fixed_point(&c);
        assert!(fp.exists() && fp.positive);
        let p = fp.point.unwrap();
        let want = [10000.0 / 3.0, 5000.0 / 3.0, 2500.0 / 9.0, 250.0 / 3.0];
        for i in 0..4 {
            assert_relative_eq!(p[i], want[i], max_relative = 1e-10);
        }
        let j = jacobian(&c, &p).unwrap();
        assert_relative_eq!(j.get(0, 0), 0.5, max_relative = 1e-10);
        assert_relative_eq!(j.get(1, 1), 0.75, max_relative = 1e-10);
        assert_eq!(j.get(2, 2), 1.0);
        assert_eq!(j.get(3, 3), 1.0);
    }

    #[test]
    fn symmetric_species_give_symmetric_point() {
        let c = eco([[0.6, 0.4], [0.4, 0.6]]).compile();
        let p = fixed_point(&c).point.unwrap();
        assert_relative_eq!(p[0], p[1], max_relative = 1e-12);
        assert_relative_eq!(p[2], p[3], max_relative = 1e-12);
    }

    #[test]
    fn decoupled_system_has_no_fixed_point() {
        let mut c = eco([[0.0; 2]; 2]).compile();
        c.k = [0.0; 2];
        assert_eq!(fixed_point(&c).point, None);
        assert!(matches!(
            jacobian(&c, &[1.0; 4]),
            Err(StabilityError::NotAFixedPoint { .. })
        ));
        assert_eq!(classify(&c).class, StabilityClass::NoUniqueFixedPoint);
    }

    #[test]
    fn jacobian_rejects_off_equilibrium() {
        let c = eco([[0.3, 0.3], [0.2, 0.5]]).compile();
        assert!(matches!(
            jacobian(&c, &[3000.0, 1666.0, 277.0, 83.0]),
            Err(StabilityError::NotAFixedPoint { .. })
        ));
    }

    #[test]
    fn classify_fig1a_stable() {
        let r = classify(&eco([[0.3, 0.3], [0.2, 0.5]]).compile());
        assert_eq!(r.class, StabilityClass::Stable);
        let e = r.eigen.unwrap();
        assert_eq!(e.eigenvalues.len(), 4);
        assert!(e.eigenvalues.iter().all(|z| z.norm() < 1.0));
    }

    #[test]
    fn classify_fig1b_slightly_unstable() {
        let r = classify(&eco([[0.2, 0.45], [0.5, 0.25]]).compile());
        assert_eq!(r.class, StabilityClass::Unstable);
        let rho = r.eigen.unwrap().spectral_radius;
        assert!(rho > 1.0 && rho < 1.1, "rho = {rho}");
    }

    #[test]
    fn heavy_dependency_is_non_positive() {
        // p1 > C11 K1 + C12 K2: predator 1 starves even with both prey at capacity
        let mut e = eco([[0.3, 0.3], [0.2, 0.5]]);
        e.conversion = [[1e-6, 1e-6], [0.02, 0.02]];
        e.dependency = [0.9, 0.3];
        let c = e.compile();
        let bound = c.c[0][0] * e.capacity[0] + c.c[0][1] * e.capacity[1];
        assert!(c.p[0] > bound);
        let r = classify(&c);
        assert_eq!(r.class, StabilityClass::NonPositive);
        assert!(r.fixed_point.exists());
        assert!(!r.fixed_point.positive);
        assert!(r.eigen.is_none());
    }

    #[test]
    fn diagram_rejects_tiny_resolution() {
        assert_eq!(
            diagram(&eco([[0.5; 2]; 2]), 1),
            Err(StabilityError::BadResolution(1))
        );
    }

    #[test]
    fn diagram_smallest_grid_centers() {
        let g = diagram(&eco([[0.5; 2]; 2]), 2).unwrap();
        assert_eq!(g.cells().len(), 4);
        let centers: Vec<(f64, f64)> = g.cells().iter().map(|c| (c.h1, c.h2)).collect();
        assert_eq!(
            centers,
            vec![(0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75)]
        );
    }

    #[test]
    fn diagram_without_search_has_no_coexistence() {
        let mut t = eco([[0.5; 2]; 2]);
        t.search = [0.0; 2];
        let g = diagram(&t, 10).unwrap();
        assert!(g.cells().iter().all(|c| matches!(
            c.class,
            StabilityClass::NonPositive | StabilityClass::NoUniqueFixedPoint
        )));
    }

    #[test]
    fn diagram_template_is_validated() {
        let mut t = eco([[0.5; 2]; 2]);
        t.dependency[0] = 2.0;
        assert!(matches!(
            diagram(&t, 4),
            Err(StabilityError::InvalidTemplate(_))
        ));
    }
}
