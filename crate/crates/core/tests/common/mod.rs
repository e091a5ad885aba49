//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use lv4::{Complex, EcoParams, Mat, StateVec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `det(mu I - A)` by cofactor expansion over complex numbers.
pub fn det_shifted(a: &Mat, mu: Complex) -> Complex {
    let n = a.dim();
    let m: Vec<Vec<Complex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = if i == j { mu } else { Complex::new(0.0, 0.0) };
                    d - a.get(i, j)
                })
                .collect()
        })
        .collect();
    laplace(&m)
}

fn laplace(m: &[Vec<Complex>]) -> Complex {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut total = Complex::new(0.0, 0.0);
    for col in 0..n {
        let minor: Vec<Vec<Complex>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += m[0][col] * laplace(&minor) * sign;
    }
    total
}

/// Eigenvalues from nalgebra's real Schur decomposition.
pub fn reference_eigenvalues(a: &Mat) -> Vec<Complex> {
    let n = a.dim();
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
    m.complex_eigenvalues()
        .iter()
        .map(|z| Complex::new(z.re, z.im))
        .collect()
}

pub fn random_mat(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Mat {
    Mat::from_fn(n, |_, _| rng.gen_range(lo..hi)).unwrap()
}

pub fn random_eco(rng: &mut ChaCha8Rng) -> EcoParams {
    let mut pair = |lo: f64, hi: f64| [rng.gen_range(lo..hi), rng.gen_range(lo..hi)];
    let growth = pair(0.5, 2.0);
    let capacity = pair(1e3, 1e5);
    let search = pair(0.001, 0.05);
    let dependency = pair(0.01, 0.5);
    let efficiency = [pair(0.0, 1.0), pair(0.0, 1.0)];
    let adaptation = [pair(0.2, 2.0), pair(0.2, 2.0)];
    let conversion = [pair(0.005, 0.05), pair(0.005, 0.05)];
    EcoParams {
        growth,
        capacity,
        search,
        dependency,
        efficiency,
        adaptation,
        conversion,
    }
}

/// Central finite-difference Jacobian of the clamped map at `x`, with step
/// `rel_step * |x_j|` per coordinate.
pub fn fd_jacobian(c: &lv4::CoeffParams, x: &[f64; 4], rel_step: f64) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for j in 0..4 {
        let h = rel_step * x[j].abs().max(1.0);
        let mut plus = *x;
        let mut minus = *x;
        plus[j] += h;
        minus[j] -= h;
        let fp = c.step(&StateVec::from_array(plus).unwrap()).unwrap().state;
        let fm = c.step(&StateVec::from_array(minus).unwrap()).unwrap().state;
        for i in 0..4 {
            out[i][j] = (fp.as_array()[i] - fm.as_array()[i]) / (2.0 * h);
        }
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
