//! Named parameter sets for the simulation runs and stability diagrams.
//!
//! `fig1*` presets are full simulation scenarios with initial conditions and
//! the published coexistence equilibria. `fig3*`, `fig4*` and `fig5*` are
//! diagram templates: their efficiency matrix is a neutral placeholder that
//! [`crate::stability::diagram`] overwrites cell by cell.

use serde::Serialize;
use thiserror::Error;

use crate::lvmap::{EcoParams, StateVec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown preset {0:?}")]
pub struct UnknownPreset(pub String);

/// Qualitative behaviour reported for a simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ConvergesToFixedPoint,
    RegularOscillation,
    IrregularOscillation,
    AlternatingDominance,
    CollapseAfterOscillation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub eco: EcoParams,
    pub init: Option<StateVec>,
    /// Published coexistence equilibrium `(x1, x2, X1, X2)`.
    pub expected_fixed_point: Option<[f64; 4]>,
    pub outcome: Option<Outcome>,
}

impl Preset {
    pub fn is_diagram_template(&self) -> bool {
        self.init.is_none()
    }
}

const NEUTRAL: [[f64; 2]; 2] = [[0.5, 0.5], [0.5, 0.5]];
const ONES: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, 1.0]];

#[allow(clippy::too_many_arguments)]
fn eco(
    r: [f64; 2],
    capacity: f64,
    s: [f64; 2],
    p: [f64; 2],
    efficiency: [[f64; 2]; 2],
    adaptation: [[f64; 2]; 2],
    conversion: [[f64; 2]; 2],
) -> EcoParams {
    EcoParams {
        growth: r,
        capacity: [capacity; 2],
        search: s,
        dependency: p,
        efficiency,
        adaptation,
        conversion,
    }
}

fn state(v: [f64; 4]) -> Option<StateVec> {
    Some(StateVec::from_array(v).expect("preset initial states are nonnegative"))
}

fn fig1_base(efficiency: [[f64; 2]; 2]) -> EcoParams {
    eco(
        [1.5; 2],
        1e4,
        [0.01; 2],
        [0.3; 2],
        efficiency,
        ONES,
        [[0.02; 2]; 2],
    )
}

fn fig1_large(efficiency: [[f64; 2]; 2]) -> EcoParams {
    eco(
        [1.5; 2],
        1e5,
        [0.001; 2],
        [0.01; 2],
        efficiency,
        ONES,
        [[0.02; 2]; 2],
    )
}

fn fig3(p1: f64, s: [f64; 2], conversion: [[f64; 2]; 2]) -> EcoParams {
    eco([1.5; 2], 1e5, s, [p1, 0.01], NEUTRAL, ONES, conversion)
}

fn fig4(s1: f64, p1: f64) -> EcoParams {
    const ADAPTED: [[f64; 2]; 2] = [[0.4, 1.5], [1.5, 0.4]];
    eco(
        [1.5; 2],
        1e5,
        [s1, 0.02],
        [p1, 0.02],
        NEUTRAL,
        ADAPTED,
        [[0.01; 2]; 2],
    )
}

/// Every preset, in listing order.
pub fn all_presets() -> Vec<Preset> {
    let start = [100.0; 4];
    let fp_ef = Some([750.0, 1.0e3, 2.2406e3, 2.9625e3]);
    let q01 = [[0.01; 2]; 2];
    vec![
        Preset {
            name: "fig1a",
            description: "generalist predator 1, prey-2 specialist predator 2; converges to the coexistence equilibrium",
            eco: fig1_base([[0.3, 0.3], [0.2, 0.5]]),
            init: state(start),
            expected_fixed_point: Some([3.3333e3, 1.6667e3, 277.7778, 83.3333]),
            outcome: Some(Outcome::ConvergesToFixedPoint),
        },
        Preset {
            name: "fig1b",
            description: "predators specialised on different prey; regular oscillation around the equilibrium",
            eco: fig1_base([[0.2, 0.45], [0.5, 0.25]]),
            init: state(start),
            expected_fixed_point: Some([1.7143e3, 2.5714e3, 140.8163, 192.2449]),
            outcome: Some(Outcome::RegularOscillation),
        },
        Preset {
            name: "fig1c",
            description: "predator 1 slightly more specialised than fig1b; irregular oscillation",
            eco: fig1_base([[0.24, 0.6], [0.56, 0.27]]),
            init: state(start),
            expected_fixed_point: Some([1.8252e3, 1.7699e3, 132.8351, 162.0379]),
            outcome: Some(Outcome::IrregularOscillation),
        },
        Preset {
            name: "fig1d",
            description: "tenfold carrying capacity, low dependency and search; alternating prey dominance",
            eco: fig1_large([[0.2, 0.4], [0.31, 0.29]]),
            init: state(start),
            expected_fixed_point: Some([833.3333, 833.3333, 450.7576, 4.5076e3]),
            outcome: Some(Outcome::AlternatingDominance),
        },
        Preset {
            name: "fig1e",
            description: "start near the equilibrium; almost regular oscillation",
            eco: fig1_large([[0.4, 0.2], [0.2, 0.35]]),
            init: state([700.0, 2000.0, 2300.0, 3000.0]),
            expected_fixed_point: fp_ef,
            outcome: Some(Outcome::RegularOscillation),
        },
        Preset {
            name: "fig1f",
            description: "fig1e parameters from a distant start; growing oscillation then collapse",
            eco: fig1_large([[0.4, 0.2], [0.2, 0.35]]),
            init: state([10.0, 100.0, 200.0, 2500.0]),
            expected_fixed_point: fp_ef,
            outcome: Some(Outcome::CollapseAfterOscillation),
        },
        Preset {
            name: "fig3a",
            description: "localist predator 1 (high search and dependency) vs globalist predator 2",
            eco: fig3(0.06, [0.09, 0.01], q01),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig3b",
            description: "fig3a with slightly higher globalist search rate s2 = 0.012",
            eco: fig3(0.06, [0.09, 0.012], q01),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig3c",
            description: "fig3a with lower localist dependency p1 = 0.03 and s1 = 0.09 (the accompanying text names the lowered value s1; p1 is used here)",
            eco: fig3(0.03, [0.09, 0.01], q01),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig3d",
            description: "fig3a with lower localist search rate s1 = 0.03",
            eco: fig3(0.06, [0.03, 0.01], q01),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig3e",
            description: "fig3a with higher prey-1 conversion q11 = q21 = 0.013",
            eco: fig3(0.06, [0.09, 0.01], [[0.013, 0.01], [0.013, 0.01]]),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig3f",
            description: "fig3a with higher prey-2 conversion q12 = q22 = 0.011",
            eco: fig3(0.06, [0.09, 0.01], [[0.01, 0.011], [0.01, 0.011]]),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig4a",
            description: "adapted prey (D11 = D22 = 0.4, D12 = D21 = 1.5), symmetric species",
            eco: fig4(0.02, 0.02),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig4b",
            description: "adapted prey, predator 1 more dependent (p1 = 0.03)",
            eco: fig4(0.02, 0.03),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig4c",
            description: "adapted prey, predator 1 searches more (s1 = 0.07)",
            eco: fig4(0.07, 0.02),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig4d",
            description: "adapted prey, s1 = 0.07 and p1 = 0.04",
            eco: fig4(0.07, 0.04),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig5a",
            description: "small predator: q11 = q21 = 0.04, q12 = q22 = 0.01",
            eco: eco([1.5; 2], 1e5, [0.01; 2], [0.01; 2], NEUTRAL, ONES, [[0.04, 0.01], [0.04, 0.01]]),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig5b",
            description: "predator 1 five times more dependent on prey (p1 = 0.05, p2 = 0.01)",
            eco: eco([1.5; 2], 1e5, [0.01; 2], [0.05, 0.01], NEUTRAL, ONES, q01),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig5c",
            description: "asymmetric conversion ratios q = [[0.01, 0.03], [0.02, 0.01]], p1 = 0.03",
            eco: eco([1.5; 2], 1e5, [0.01; 2], [0.03, 0.01], NEUTRAL, ONES, [[0.01, 0.03], [0.02, 0.01]]),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig5d",
            description: "r = (1.2, 1.5), s = (0.02, 0.01), p = (0.03, 0.01), asymmetric conversion",
            eco: eco([1.2, 1.5], 1e5, [0.02, 0.01], [0.03, 0.01], NEUTRAL, ONES, [[0.01, 0.015], [0.02, 0.01]]),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
        Preset {
            name: "fig5e",
            description: "r = (1.3, 1.7), s = (0.04, 0.01), p = (0.01, 0.01), asymmetric conversion",
            eco: eco([1.3, 1.7], 1e5, [0.04, 0.01], [0.01, 0.01], NEUTRAL, ONES, [[0.03, 0.01], [0.015, 0.02]]),
            init: None,
            expected_fixed_point: None,
            outcome: None,
        },
    ]
}

pub fn get_preset(name: &str) -> Result<Preset, UnknownPreset> {
    all_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| UnknownPreset(name.to_string()))
}

/// `(name, description)` for every preset, in a stable order.
pub fn list_presets() -> Vec<(&'static str, &'static str)> {
    all_presets()
        .iter()
        .map(|p| (p.name, p.description))
        .collect()
}
