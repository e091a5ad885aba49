//! File formats: CSV, JSON and binary PPM, all written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use lv4::{StabilityClass, StabilityGrid, Trajectory};
use serde::Serialize;

use crate::CliError;

const STABLE_RGB: [u8; 3] = [255, 0, 0];
const NON_POSITIVE_RGB: [u8; 3] = [255, 255, 255];
/// Gray level of an unstable cell with spectral radius 1; radius 2 and above is black.
const UNSTABLE_GRAY_MAX: f64 = 200.0;

/// Shortest representation that reads back to the same `f64`. Matches the
/// JSON writer, so CSV and JSON agree digit for digit.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("generation,x1,x2,X1,X2\n");
    for (g, st) in traj.states().iter().enumerate() {
        let [a, b, c, d] = *st.as_array();
        writeln!(s, "{g},{},{},{},{}", num(a), num(b), num(c), num(d)).unwrap();
    }
    s
}

/// One row per cell in `(i, j)` order; `rho` is empty when there is no
/// positive fixed point to linearize about.
pub fn grid_csv(grid: &StabilityGrid) -> String {
    let mut s = String::from("h1,h2,class,rho\n");
    for cell in grid.cells() {
        let rho = cell.spectral_radius.map(num).unwrap_or_default();
        writeln!(s, "{},{},{},{rho}", num(cell.h1), num(cell.h2), cell.class).unwrap();
    }
    s
}

pub fn cell_rgb(class: StabilityClass, rho: Option<f64>) -> [u8; 3] {
    match (class, rho) {
        (StabilityClass::Stable, _) => STABLE_RGB,
        (StabilityClass::Unstable, Some(rho)) => {
            let level = UNSTABLE_GRAY_MAX * (2.0 - rho.clamp(1.0, 2.0));
            let g = level.round() as u8;
            [g, g, g]
        }
        _ => NON_POSITIVE_RGB,
    }
}

/// Binary P6 image, `h1` left to right and `h2` bottom to top.
pub fn grid_ppm(grid: &StabilityGrid) -> Vec<u8> {
    let n = grid.resolution();
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.reserve(3 * n * n);
    for row in 0..n {
        let j = n - 1 - row;
        for i in 0..n {
            let cell = grid.get(i, j);
            out.extend_from_slice(&cell_rgb(cell.class, cell.spectral_radius));
        }
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Write `bytes` to `dir/name` via a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.join(name).display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}
