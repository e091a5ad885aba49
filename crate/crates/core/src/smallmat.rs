//! Dense linear algebra for small real matrices.
//!
//! Everything here is sized for the 4x4 systems that show up when linearizing
//! the predator-prey map: Gauss-Jordan inversion with partial pivoting, the
//! characteristic polynomial by the Faddeev-LeVerrier trace recursion, and all
//! complex roots of a real polynomial by Durand-Kerner (Weierstrass)
//! simultaneous iteration. Eigenvalues are the roots of the characteristic
//! polynomial.

use std::f64::consts::PI;
use std::fmt;

pub use num_complex::Complex64 as Complex;
use thiserror::Error;

/// Smallest and largest supported matrix dimension.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-12;

/// Durand-Kerner stops when every root moves less than this times `1 + |z|`.
pub const ROOT_STEP_TOL: f64 = 1e-13;
pub const ROOT_MAX_ITER: usize = 1000;

/// Roots with imaginary part below this magnitude are snapped to the real axis.
pub const REAL_SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("matrix dimension {0} outside supported range {MIN_DIM}..={MAX_DIM}")]
    BadDimension(usize),
    #[error("expected {expected} entries, got {got}")]
    BadShape { expected: usize, got: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("singular matrix: pivot {pivot:e} in column {col} below tolerance {tol:e}")]
    Singular { col: usize, pivot: f64, tol: f64 },
    #[error("polynomial must have degree >= 1 with a nonzero finite leading coefficient")]
    BadPolynomial,
    #[error(
        "root finder did not converge in {iterations} iterations (max residual {max_residual:e})"
    )]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex>,
        residuals: Vec<f64>,
        max_residual: f64,
    },
}

/// Square real matrix, row-major, dimension in `MIN_DIM..=MAX_DIM`, all
/// entries finite.
#[derive(Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self, MatError> {
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(MatError::BadDimension(n));
        }
        if data.len() != n * n {
            return Err(MatError::BadShape {
                expected: n * n,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(MatError::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, MatError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(MatError::BadShape {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, MatError> {
        let data = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        Self::from_row_major(n, data)
    }

    pub fn identity(n: usize) -> Result<Self, MatError> {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Result<Self, MatError> {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn scaled_identity(n: usize, c: f64) -> Result<Self, MatError> {
        Self::from_fn(n, |i, j| if i == j { c } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat, MatError> {
        if self.n != other.n {
            return Err(MatError::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        Ok(Mat {
            n,
            data: mul_raw(n, &self.data, &other.data),
        })
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, MatError> {
        if v.len() != self.n {
            return Err(MatError::DimensionMismatch(self.n, v.len()));
        }
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails with [`MatError::Singular`] when a pivot falls below
    /// `SINGULAR_PIVOT_TOL` times the largest Euclidean row norm of the input.
    pub fn invert(&self) -> Result<Mat, MatError> {
        let n = self.n;
        let scale = (0..n)
            .map(|i| self.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let tol = SINGULAR_PIVOT_TOL * scale;

        let mut a = self.data.clone();
        let mut inv = Mat::identity(n)?.data;

        for col in 0..n {
            let (piv_row, piv_abs) =
                (col..n)
                    .map(|r| (r, a[r * n + col].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(piv_abs > tol) {
                return Err(MatError::Singular {
                    col,
                    pivot: piv_abs,
                    tol,
                });
            }
            if piv_row != col {
                for k in 0..n {
                    a.swap(col * n + k, piv_row * n + k);
                    inv.swap(col * n + k, piv_row * n + k);
                }
            }
            let pivot = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= pivot;
                inv[col * n + k] /= pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col];
                if factor == 0.0 {
                    continue;
                }
                for k in 0..n {
                    a[r * n + k] -= factor * a[col * n + k];
                    inv[r * n + k] -= factor * inv[col * n + k];
                }
            }
        }
        Mat::from_row_major(n, inv)
    }

    /// Characteristic polynomial `det(lambda I - self)`, monic, degree `n`.
    ///
    /// Faddeev-LeVerrier: `M_0 = 0`, `M_k = A M_{k-1} + c_{n-k+1} I`,
    /// `c_{n-k} = -tr(A M_k) / k`.
    pub fn char_poly(&self) -> PolyCoeffs {
        let n = self.n;
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        let mut m = vec![0.0; n * n];
        for k in 1..=n {
            let mut next = mul_raw(n, &self.data, &m);
            for i in 0..n {
                next[i * n + i] += coeffs[n - k + 1];
            }
            let am = mul_raw(n, &self.data, &next);
            let tr: f64 = (0..n).map(|i| am[i * n + i]).sum();
            coeffs[n - k] = -tr / k as f64;
            m = next;
        }
        PolyCoeffs { coeffs }
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex>, MatError> {
        self.char_poly().roots()
    }

    pub fn spectral_radius(&self) -> Result<f64, MatError> {
        Ok(max_modulus(&self.eigenvalues()?))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.n).map(|i| self.row(i)).collect();
        f.debug_struct("Mat")
            .field("n", &self.n)
            .field("rows", &rows)
            .finish()
    }
}

fn mul_raw(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub fn max_modulus(values: &[Complex]) -> f64 {
    values.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Real polynomial `c0 + c1 x + ... + cn x^n`, stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<f64>,
}

impl PolyCoeffs {
    /// Trailing zero high-order coefficients are dropped; what remains must
    /// have degree >= 1 and finite entries.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self, MatError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(MatError::BadPolynomial);
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(MatError::BadPolynomial);
        }
        Ok(Self { coeffs })
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex]) -> Result<Self, MatError> {
        let mut acc = vec![Complex::new(1.0, 0.0)];
        for &root in roots {
            let mut next = vec![Complex::new(0.0, 0.0); acc.len() + 1];
            for (i, &c) in acc.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * root;
            }
            acc = next;
        }
        Self::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn monic(&self) -> PolyCoeffs {
        let lead = self.leading();
        PolyCoeffs {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Rounding-level magnitude of `p(z)`: `sum |c_i| |z|^i`.
    fn eval_scale(&self, z: Complex) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.abs())
    }

    /// All complex roots with multiplicity, by Durand-Kerner iteration.
    pub fn roots(&self) -> Result<Vec<Complex>, MatError> {
        durand_kerner(&self.monic())
    }
}

fn durand_kerner(p: &PolyCoeffs) -> Result<Vec<Complex>, MatError> {
    let n = p.degree();
    let c = p.coeffs();
    if n == 1 {
        return Ok(vec![Complex::new(-c[0], 0.0)]);
    }

    let radius = 1.0 + c[..n].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut z: Vec<Complex> = (0..n)
        .map(|k| Complex::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut next = z.clone();

    for _ in 0..ROOT_MAX_ITER {
        let mut done = true;
        for k in 0..n {
            let value = p.eval(z[k]);
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates; nudge off each other
                denom = Complex::new(f64::EPSILON * radius, 0.0);
            }
            let delta = value / denom;
            next[k] = z[k] - delta;

            let small_step = delta.norm() < ROOT_STEP_TOL * (1.0 + z[k].norm());
            // p(z) already at rounding level: iterate is an exact root of a
            // nearby polynomial, further steps only chase noise.
            let at_noise = value.norm() <= 16.0 * f64::EPSILON * p.eval_scale(z[k]);
            if !(small_step || at_noise) {
                done = false;
            }
        }
        std::mem::swap(&mut z, &mut next);
        if z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
            break;
        }
        if done {
            merge_multiple_roots(p, &mut z);
            pair_conjugates(&mut z);
            return Ok(z);
        }
    }

    let residuals: Vec<f64> = z.iter().map(|&r| p.eval(r).norm()).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Err(MatError::NoConvergence {
        iterations: ROOT_MAX_ITER,
        best: z,
        residuals,
        max_residual,
    })
}

/// Replace clusters that are numerically one multiple root by their centroid.
///
/// A cluster of `m` iterates is accepted when the first `m` Taylor
/// coefficients of `p` at the centroid vanish to `MULTIPLE_ROOT_TOL` relative
/// to their rounding scale, i.e. the centroid is an `m`-fold root at working
/// precision. The cluster centre is polished by Newton's method on the
/// `(m-1)`-th derivative, where the multiple root is simple.
fn merge_multiple_roots(p: &PolyCoeffs, z: &mut [Complex]) {
    const LINK_RADIUS: f64 = 1e-2;
    const MULTIPLE_ROOT_TOL: f64 = 1e-10;

    let n = z.len();
    let mut cluster_of: Vec<usize> = (0..n).collect();
    // single-linkage grouping by relative distance
    for i in 0..n {
        for j in (i + 1)..n {
            if (z[i] - z[j]).norm() <= LINK_RADIUS * (1.0 + z[i].norm().max(z[j].norm())) {
                let (a, b) = (cluster_of[i], cluster_of[j]);
                if a != b {
                    for c in cluster_of.iter_mut() {
                        if *c == b {
                            *c = a;
                        }
                    }
                }
            }
        }
    }

    for label in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| cluster_of[i] == label).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let mut centroid = members.iter().map(|&i| z[i]).sum::<Complex>() / m as f64;
        // an m-fold root is a simple root of the (m-1)-th derivative
        for _ in 0..20 {
            let (value, _) = taylor_coeff(p, centroid, m - 1);
            let (slope, _) = taylor_coeff(p, centroid, m);
            if slope.norm() == 0.0 {
                break;
            }
            let step = value / (slope * m as f64);
            centroid -= step;
            if step.norm() <= f64::EPSILON * (1.0 + centroid.norm()) {
                break;
            }
        }
        let ok = (0..m).all(|k| {
            let (value, scale) = taylor_coeff(p, centroid, k);
            value.norm() <= MULTIPLE_ROOT_TOL * scale
        });
        if ok {
            for &i in &members {
                z[i] = centroid;
            }
        }
    }
}

/// k-th Taylor coefficient of `p` at `c` together with its absolute scale.
fn taylor_coeff(p: &PolyCoeffs, c: Complex, k: usize) -> (Complex, f64) {
    let r = c.norm();
    let mut value = Complex::new(0.0, 0.0);
    let mut scale = 0.0;
    for (i, &ci) in p.coeffs().iter().enumerate().skip(k) {
        let binom = binomial(i, k);
        value += c.powu((i - k) as u32) * (ci * binom);
        scale += ci.abs() * binom * r.powi((i - k) as i32);
    }
    (value, scale)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Snap near-real roots onto the real axis and make the complex ones exact
/// conjugate pairs, as they must be for a real polynomial.
fn pair_conjugates(z: &mut [Complex]) {
    for r in z.iter_mut() {
        if r.im.abs() < REAL_SNAP_TOL {
            r.im = 0.0;
        }
    }
    let n = z.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] || z[i].im <= 0.0 {
            continue;
        }
        let target = z[i].conj();
        let partner = (0..n)
            .filter(|&j| !paired[j] && j != i && z[j].im < 0.0)
            .min_by(|&a, &b| (z[a] - target).norm().total_cmp(&(z[b] - target).norm()));
        if let Some(j) = partner {
            let avg = (z[i] + z[j].conj()) * 0.5;
            z[i] = avg;
            z[j] = avg.conj();
            paired[i] = true;
            paired[j] = true;
        }
    }
}
