use std::path::PathBuf;

use lv4::lvmap::PersistenceReport;
use lv4::scenarios::all_presets;
use lv4::{classify, diagram, CoeffParams, EcoParams, Event, LvError, StabilityClass};
use serde::Serialize;

use crate::config::Run;
use crate::emit::{self, write_atomic};
use crate::CliError;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CLASSIFY_FILE: &str = "classification.json";
pub const GRID_FILE: &str = "grid.csv";
pub const IMAGE_FILE: &str = "diagram.ppm";
pub const NORMALIZE_FILE: &str = "normalized.json";

#[derive(Serialize)]
struct Summary<'a> {
    preset: Option<&'a str>,
    generations_requested: usize,
    generations_run: usize,
    initial_state: [f64; 4],
    final_state: [f64; 4],
    persistence: PersistenceReport,
    events: &'a [Event],
}

/// Writes the trajectory and its summary, then reports a blow-up as an error
/// so the files are still available for inspection.
pub fn cmd_simulate(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let init = run.init.ok_or_else(|| {
        CliError::Config(
            "no initial state: set init in the config or pick a preset with one".into(),
        )
    })?;
    let traj = run.eco.compile().simulate(init, run.generations);
    let persistence = traj
        .persistence(run.extinction_threshold)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let summary = Summary {
        preset: run.preset.as_deref(),
        generations_requested: run.generations,
        generations_run: traj.generations(),
        initial_state: *init.as_array(),
        final_state: *traj.final_state().as_array(),
        persistence,
        events: traj.events(),
    };
    let written = vec![
        write_atomic(
            &run.out,
            TRAJECTORY_FILE,
            emit::trajectory_csv(&traj).as_bytes(),
        )?,
        write_atomic(&run.out, SUMMARY_FILE, emit::json(&summary)?.as_bytes())?,
    ];
    if let Some(ev) = traj.blow_up() {
        return Err(CliError::BlowUp(format!(
            "{} exceeded the divergence bound at generation {} ({:e})",
            ev.species, ev.generation, ev.value
        )));
    }
    Ok(written)
}

#[derive(Serialize)]
struct Eigenvalue {
    re: f64,
    im: f64,
    modulus: f64,
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    preset: Option<&'a str>,
    fixed_point: Option<[f64; 4]>,
    positive: bool,
    eigenvalues: Vec<Eigenvalue>,
    spectral_radius: Option<f64>,
    class: StabilityClass,
    warning: Option<String>,
}

pub fn cmd_classify(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let cls = classify(&run.eco.compile());
    let (eigenvalues, spectral_radius) = match &cls.eigen {
        Some(e) => (
            e.eigenvalues
                .iter()
                .map(|z| Eigenvalue {
                    re: z.re,
                    im: z.im,
                    modulus: z.norm(),
                })
                .collect(),
            Some(e.spectral_radius),
        ),
        None => (Vec::new(), None),
    };
    let report = ClassifyReport {
        preset: run.preset.as_deref(),
        fixed_point: cls.fixed_point.point,
        positive: cls.fixed_point.positive,
        eigenvalues,
        spectral_radius,
        class: cls.class,
        warning: cls.warning,
    };
    Ok(vec![write_atomic(
        &run.out,
        CLASSIFY_FILE,
        emit::json(&report)?.as_bytes(),
    )?])
}

pub fn cmd_diagram(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let grid = diagram(&run.eco, run.resolution).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(vec![
        write_atomic(&run.out, GRID_FILE, emit::grid_csv(&grid).as_bytes())?,
        write_atomic(&run.out, IMAGE_FILE, &emit::grid_ppm(&grid))?,
    ])
}

#[derive(Serialize, PartialEq)]
struct Compiled {
    #[serde(rename = "B")]
    b: [[f64; 2]; 2],
    #[serde(rename = "C")]
    c: [[f64; 2]; 2],
}

impl From<CoeffParams> for Compiled {
    fn from(c: CoeffParams) -> Self {
        Compiled { b: c.b, c: c.c }
    }
}

#[derive(Serialize)]
struct Invariance {
    before: Compiled,
    after: Compiled,
    identical: bool,
}

#[derive(Serialize)]
struct NormalizeReport<'a> {
    preset: Option<&'a str>,
    original: &'a EcoParams,
    normalized: EcoParams,
    invariance: Invariance,
}

pub fn cmd_normalize(run: &Run) -> Result<Vec<PathBuf>, CliError> {
    let normalized = run.eco.normalize().map_err(|e| match e {
        LvError::ZeroRow { .. } => CliError::Normalize(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    let before = Compiled::from(run.eco.compile());
    let after = Compiled::from(normalized.compile());
    let identical = emit::json(&before)? == emit::json(&after)?;
    let report = NormalizeReport {
        preset: run.preset.as_deref(),
        original: &run.eco,
        normalized,
        invariance: Invariance {
            before,
            after,
            identical,
        },
    };
    Ok(vec![write_atomic(
        &run.out,
        NORMALIZE_FILE,
        emit::json(&report)?.as_bytes(),
    )?])
}

/// "fig3e" -> "Figure 3(e)".
fn provenance(name: &str) -> String {
    let body = name.trim_start_matches("fig");
    let (num, panel) = body.split_at(body.len() - 1);
    format!("Figure {num}({panel})")
}

pub fn cmd_presets() -> String {
    let mut out = String::new();
    for p in all_presets() {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            p.name,
            provenance(p.name),
            p.description
        ));
    }
    out
}
