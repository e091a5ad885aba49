//! Reference computations used by the acceptance run. They deliberately avoid
//! the library's own linear algebra.

use lv4::{CoeffParams, Complex, Mat, StateVec};

/// `det(A - lambda I)` by cofactor expansion.
pub fn det_minus(a: &Mat, lambda: Complex) -> Complex {
    let n = a.dim();
    let m: Vec<Vec<Complex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = Complex::new(a.get(i, j), 0.0);
                    if i == j {
                        v - lambda
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    laplace(&m)
}

fn laplace(m: &[Vec<Complex>]) -> Complex {
    if m.len() == 1 {
        return m[0][0];
    }
    let mut total = Complex::new(0.0, 0.0);
    for col in 0..m.len() {
        let minor: Vec<Vec<Complex>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let term = m[0][col] * laplace(&minor);
        total += if col % 2 == 0 { term } else { -term };
    }
    total
}

/// Central differences of the clamped step map. The step for coordinate `j`
/// is `rel * |x_j|`, floored at `abs`.
pub fn fd_jacobian(c: &CoeffParams, x: &[f64; 4], rel: f64, abs: f64) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for j in 0..4 {
        let h = (rel * x[j].abs()).max(abs);
        let (mut up, mut down) = (*x, *x);
        up[j] += h;
        down[j] -= h;
        let fu = c.step(&StateVec::from_array(up).unwrap()).unwrap().state;
        let fd = c.step(&StateVec::from_array(down).unwrap()).unwrap().state;
        for i in 0..4 {
            out[i][j] = (fu.as_array()[i] - fd.as_array()[i]) / (2.0 * h);
        }
    }
    out
}

pub fn rel_diff(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}
