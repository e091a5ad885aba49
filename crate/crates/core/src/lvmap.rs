//! Two-prey, two-predator discrete-time Lotka-Volterra map.
//!
//! Users describe an ecosystem with [`EcoParams`] (growth rates, carrying
//! capacities, search rates, predator dependency, and per-pair efficiency,
//! adaptation and conversion matrices). [`EcoParams::compile`] folds these
//! into the [`CoeffParams`] the map actually iterates:
//!
//! ```text
//! B[i][j] = s_j * D[i][j] * E[j][i]        predation of prey i by predator j
//! C[j][i] = Q[j][i] * B[i][j]              reproduction of predator j from prey i
//! k_i     = r_i / K_i                      (0 when K_i is infinite)
//! ```
//!
//! The map is iterated in increment form, `x <- x + x * g(x)` with per-capita
//! rates
//!
//! ```text
//! g_prey_i = r_i - k_i x_i - B[i][0] X_1 - B[i][1] X_2
//! g_pred_j = -p_j + C[j][0] x_1 + C[j][1] x_2
//! ```
//!
//! so that coexistence equilibria are exactly the zeros of `g`. Coordinates
//! that would go negative are clamped to zero and logged as extinctions.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coordinates above this are treated as divergence.
pub const BLOW_UP_BOUND: f64 = 1e12;

/// Default population below which a species counts as collapsed.
pub const DEFAULT_EXTINCTION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LvError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: String,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid state coordinate {index} = {value}: populations must be finite and >= 0")]
    InvalidState { index: usize, value: f64 },
    #[error("predator {predator} has zero total hunting efficiency and cannot be normalized")]
    ZeroRow { predator: usize },
    #[error("coordinate {coordinate} blew up to {value:e}")]
    BlowUp { coordinate: usize, value: f64 },
    #[error("dimension mismatch: map has {expected} coordinates, state has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// One of the four populations, in state-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Species {
    #[serde(rename = "x1")]
    Prey1,
    #[serde(rename = "x2")]
    Prey2,
    #[serde(rename = "X1")]
    Predator1,
    #[serde(rename = "X2")]
    Predator2,
}

impl Species {
    pub const ALL: [Species; 4] = [
        Species::Prey1,
        Species::Prey2,
        Species::Predator1,
        Species::Predator2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// Column label used in CSV and JSON output.
    pub fn label(self) -> &'static str {
        match self {
            Species::Prey1 => "x1",
            Species::Prey2 => "x2",
            Species::Predator1 => "X1",
            Species::Predator2 => "X2",
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Ecological parameterization.
///
/// Matrix orientation: `efficiency` and `conversion` are indexed
/// `[predator][prey]`, `adaptation` is indexed `[prey][predator]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EcoParams {
    /// Intrinsic growth rate of each prey.
    #[serde(rename = "r")]
    pub growth: [f64; 2],
    /// Carrying capacity of each prey; `f64::INFINITY` removes self-inhibition.
    #[serde(rename = "K", with = "capacity_serde")]
    pub capacity: [f64; 2],
    /// Search rate of each predator.
    #[serde(rename = "s")]
    pub search: [f64; 2],
    /// Per-generation decay of each predator without prey.
    #[serde(rename = "p")]
    pub dependency: [f64; 2],
    /// Hunting efficiency, `[predator][prey]`.
    #[serde(rename = "E")]
    pub efficiency: [[f64; 2]; 2],
    /// Adaptation coefficient, `[prey][predator]`; multiplies predation.
    #[serde(rename = "D", default = "all_ones")]
    pub adaptation: [[f64; 2]; 2],
    /// Conversion ratio, `[predator][prey]`: offspring per consumed prey.
    #[serde(rename = "Q")]
    pub conversion: [[f64; 2]; 2],
}

fn all_ones() -> [[f64; 2]; 2] {
    [[1.0; 2]; 2]
}

mod capacity_serde {
    use serde::de::{self, Deserializer, Visitor};
    use serde::ser::{SerializeTuple, Serializer};
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Capacity {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(value: &[f64; 2], ser: S) -> Result<S::Ok, S::Error> {
        let mut tup = ser.serialize_tuple(2)?;
        for v in value {
            if v.is_infinite() && *v > 0.0 {
                tup.serialize_element("inf")?;
            } else {
                tup.serialize_element(v)?;
            }
        }
        tup.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<[f64; 2], D::Error> {
        struct PairVisitor;
        impl<'de> Visitor<'de> for PairVisitor {
            type Value = [f64; 2];
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("two carrying capacities (numbers or \"inf\")")
            }
            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> Result<[f64; 2], A::Error> {
                let mut out = [0.0; 2];
                for (i, slot) in out.iter_mut().enumerate() {
                    let item: Capacity = seq
                        .next_element()?
                        .ok_or_else(|| de::Error::invalid_length(i, &self))?;
                    *slot = match item {
                        Capacity::Number(v) => v,
                        Capacity::Text(s) => match s.to_ascii_lowercase().as_str() {
                            "inf" | "infinity" | "+inf" => f64::INFINITY,
                            _ => return Err(de::Error::custom(format!("bad capacity {s:?}"))),
                        },
                    };
                }
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(out)
            }
        }
        de.deserialize_seq(PairVisitor)
    }
}

fn invalid(name: impl Into<String>, value: f64, reason: &'static str) -> LvError {
    LvError::InvalidParam {
        name: name.into(),
        value,
        reason,
    }
}

impl EcoParams {
    pub fn validate(&self) -> Result<(), LvError> {
        for i in 0..2 {
            let r = self.growth[i];
            if !(r.is_finite() && r > 0.0) {
                return Err(invalid(format!("r[{i}]"), r, "must be finite and > 0"));
            }
            let k = self.capacity[i];
            if !(k > 0.0) || k.is_nan() {
                return Err(invalid(format!("K[{i}]"), k, "must be > 0 or +inf"));
            }
            let s = self.search[i];
            if !(s.is_finite() && s >= 0.0) {
                return Err(invalid(format!("s[{i}]"), s, "must be finite and >= 0"));
            }
            let p = self.dependency[i];
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid(format!("p[{i}]"), p, "must lie in (0, 1)"));
            }
            for j in 0..2 {
                let e = self.efficiency[i][j];
                if !(e.is_finite() && e >= 0.0) {
                    return Err(invalid(
                        format!("E[{i}][{j}]"),
                        e,
                        "must be finite and >= 0",
                    ));
                }
                let d = self.adaptation[i][j];
                if !(d.is_finite() && d > 0.0) {
                    return Err(invalid(format!("D[{i}][{j}]"), d, "must be finite and > 0"));
                }
                let q = self.conversion[i][j];
                if !(q.is_finite() && q > 0.0) {
                    return Err(invalid(format!("Q[{i}][{j}]"), q, "must be finite and > 0"));
                }
            }
        }
        Ok(())
    }

    /// Rescale so that each predator's efficiency row sums to one, moving the
    /// total into its search rate. The compiled coefficients are unchanged.
    pub fn normalize(&self) -> Result<EcoParams, LvError> {
        let mut out = self.clone();
        for j in 0..2 {
            let (row, total) =
                normalized_row(self.efficiency[j]).ok_or(LvError::ZeroRow { predator: j })?;
            out.efficiency[j] = row;
            out.search[j] = self.search[j] * total;
        }
        Ok(out)
    }

    pub fn is_normalized(&self) -> bool {
        self.efficiency.iter().all(|row| row[0] + row[1] == 1.0)
    }

    /// Fold into map coefficients.
    ///
    /// Predators are always compiled from their normalized (search, row)
    /// pair, so `compile` and `compile . normalize` agree bit for bit.
    pub fn compile(&self) -> CoeffParams {
        let mut search = self.search;
        let mut eff = self.efficiency;
        for j in 0..2 {
            if let Some((row, total)) = normalized_row(self.efficiency[j]) {
                eff[j] = row;
                search[j] = self.search[j] * total;
            }
        }

        let mut b = [[0.0; 2]; 2];
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                b[i][j] = search[j] * self.adaptation[i][j] * eff[j][i];
                c[j][i] = self.conversion[j][i] * b[i][j];
            }
        }
        let k = [
            self.growth[0] / self.capacity[0],
            self.growth[1] / self.capacity[1],
        ];
        CoeffParams {
            r: self.growth,
            k,
            b,
            c,
            p: self.dependency,
        }
    }

    /// Copy with the efficiency matrix set to `[[h1, 1-h1], [1-h2, h2]]`.
    pub fn with_efficiency_pair(&self, h1: f64, h2: f64) -> EcoParams {
        EcoParams {
            efficiency: [[h1, 1.0 - h1], [1.0 - h2, h2]],
            ..self.clone()
        }
    }
}

/// Unit-sum version of an efficiency row and the factor taken out of it.
///
/// Rows that already sum to exactly 1.0 come back untouched. Otherwise the
/// larger entry is divided by the sum and the smaller one is its complement,
/// which makes the result sum to exactly 1.0 (the subtraction from 1 of a
/// value in [0.5, 1] is exact). That makes normalization idempotent in
/// floating point.
fn normalized_row(row: [f64; 2]) -> Option<([f64; 2], f64)> {
    let total = row[0] + row[1];
    if !(total > 0.0 && total.is_finite()) {
        return None;
    }
    if total == 1.0 {
        return Some((row, 1.0));
    }
    let big = usize::from(row[1] > row[0]);
    let mut out = [0.0; 2];
    out[big] = row[big] / total;
    out[1 - big] = 1.0 - out[big];
    Some((out, total))
}

/// Compiled map coefficients.
///
/// `b` is indexed `[prey][predator]`, `c` is indexed `[predator][prey]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffParams {
    pub r: [f64; 2],
    pub k: [f64; 2],
    pub b: [[f64; 2]; 2],
    pub c: [[f64; 2]; 2],
    pub p: [f64; 2],
}

/// Population vector `(x1, x2, X1, X2)`; every entry finite and >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct StateVec([f64; 4]);

impl StateVec {
    pub const ZERO: StateVec = StateVec([0.0; 4]);

    pub fn new(x1: f64, x2: f64, big_x1: f64, big_x2: f64) -> Result<Self, LvError> {
        Self::from_array([x1, x2, big_x1, big_x2])
    }

    pub fn from_array(values: [f64; 4]) -> Result<Self, LvError> {
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(LvError::InvalidState { index, value });
            }
        }
        Ok(Self(values))
    }

    #[inline]
    pub fn as_array(&self) -> &[f64; 4] {
        &self.0
    }

    #[inline]
    pub fn get(&self, species: Species) -> f64 {
        self.0[species.index()]
    }

    pub fn min_coordinate(&self) -> (Species, f64) {
        Species::ALL.iter().map(|&s| (s, self.get(s))).fold(
            (Species::Prey1, f64::INFINITY),
            |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            },
        )
    }
}

impl TryFrom<[f64; 4]> for StateVec {
    type Error = LvError;
    fn try_from(values: [f64; 4]) -> Result<Self, LvError> {
        Self::from_array(values)
    }
}

impl From<StateVec> for [f64; 4] {
    fn from(s: StateVec) -> [f64; 4] {
        s.0
    }
}

/// Result of one map application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: StateVec,
    /// Coordinates that went negative and were clamped, with the raw value.
    pub clamped: [Option<f64>; 4],
}

impl CoeffParams {
    /// Per-capita rates `g(x)`; the map is `x + x * g(x)`.
    pub fn per_capita_rates(&self, x: &[f64; 4]) -> [f64; 4] {
        let (prey, pred) = ([x[0], x[1]], [x[2], x[3]]);
        let mut g = [0.0; 4];
        for i in 0..2 {
            g[i] =
                self.r[i] - self.k[i] * prey[i] - (self.b[i][0] * pred[0] + self.b[i][1] * pred[1]);
        }
        for j in 0..2 {
            g[2 + j] = -self.p[j] + (self.c[j][0] * prey[0] + self.c[j][1] * prey[1]);
        }
        g
    }

    /// The map without clamping or bounds checks. Used for linearization.
    pub fn raw_step(&self, x: &[f64; 4]) -> [f64; 4] {
        let g = self.per_capita_rates(x);
        std::array::from_fn(|i| x[i] + x[i] * g[i])
    }

    /// One generation. Negative results are clamped to zero and reported in
    /// [`StepOutcome::clamped`]; any coordinate above [`BLOW_UP_BOUND`] (or
    /// non-finite) is an error.
    pub fn step(&self, st: &StateVec) -> Result<StepOutcome, LvError> {
        let raw = self.raw_step(st.as_array());
        let mut next = [0.0; 4];
        let mut clamped = [None; 4];
        for i in 0..4 {
            let v = raw[i];
            if !v.is_finite() || v > BLOW_UP_BOUND {
                return Err(LvError::BlowUp {
                    coordinate: i,
                    value: v,
                });
            }
            if v < 0.0 {
                clamped[i] = Some(v);
            } else {
                // also folds -0.0 into +0.0
                next[i] = v + 0.0;
            }
        }
        Ok(StepOutcome {
            state: StateVec(next),
            clamped,
        })
    }

    /// Iterate `generations` times from `init`. Stops early on blow-up.
    pub fn simulate(&self, init: StateVec, generations: usize) -> Trajectory {
        let mut states = Vec::with_capacity(generations + 1);
        let mut events = Vec::new();
        states.push(init);
        let mut current = init;
        for generation in 1..=generations {
            match self.step(&current) {
                Ok(outcome) => {
                    for (i, raw) in outcome.clamped.iter().enumerate() {
                        if let Some(value) = raw {
                            events.push(Event {
                                generation,
                                species: Species::ALL[i],
                                kind: EventKind::Extinction,
                                value: *value,
                            });
                        }
                    }
                    current = outcome.state;
                    states.push(current);
                }
                Err(LvError::BlowUp { coordinate, value }) => {
                    events.push(Event {
                        generation,
                        species: Species::ALL[coordinate],
                        kind: EventKind::BlowUp,
                        value,
                    });
                    break;
                }
                Err(other) => unreachable!("step only fails with BlowUp: {other}"),
            }
        }
        Trajectory { states, events }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Coordinate went negative and was clamped to zero.
    Extinction,
    /// Coordinate exceeded the divergence bound; the run stopped.
    BlowUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub generation: usize,
    pub species: Species,
    pub kind: EventKind,
    /// Raw value before clamping, or the value that blew up.
    pub value: f64,
}

/// States by generation (index 0 is the initial state) plus the event log.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<StateVec>,
    events: Vec<Event>,
}

impl Trajectory {
    pub fn states(&self) -> &[StateVec] {
        &self.states
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn final_state(&self) -> StateVec {
        *self
            .states
            .last()
            .expect("trajectory always holds the initial state")
    }

    /// Number of completed generations.
    pub fn generations(&self) -> usize {
        self.states.len() - 1
    }

    pub fn blow_up(&self) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == EventKind::BlowUp)
    }

    pub fn persistence(&self, extinction_threshold: f64) -> Result<PersistenceReport, LvError> {
        if !(extinction_threshold > 0.0 && extinction_threshold.is_finite()) {
            return Err(invalid(
                "extinction_threshold",
                extinction_threshold,
                "must be finite and > 0",
            ));
        }
        let collapse = self.states.iter().enumerate().find_map(|(generation, st)| {
            let (species, value) = st.min_coordinate();
            (value < extinction_threshold).then_some(Collapse {
                generation,
                species,
                value,
            })
        });
        Ok(PersistenceReport {
            extinction_threshold,
            generations: self.generations(),
            collapse,
            blow_up: self.blow_up().map(|e| e.generation),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    pub generation: usize,
    pub species: Species,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub extinction_threshold: f64,
    pub generations: usize,
    /// First generation at which some population is below the threshold.
    pub collapse: Option<Collapse>,
    /// Generation at which the run was aborted for divergence.
    pub blow_up: Option<usize>,
}

impl PersistenceReport {
    pub fn persisted(&self) -> bool {
        self.collapse.is_none() && self.blow_up.is_none()
    }
}

/// General `n`-species Lotka-Volterra map in multiplicative form,
/// `x_i' = x_i (e_i + sum_j a_ij x_j)`, with no clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericLV {
    growth: Vec<f64>,
    interaction: Vec<f64>,
}

impl GenericLV {
    pub fn new(growth: Vec<f64>, interaction: Vec<Vec<f64>>) -> Result<Self, LvError> {
        let n = growth.len();
        if n == 0 {
            return Err(LvError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if let Some(bad) = interaction.iter().find(|row| row.len() != n) {
            return Err(LvError::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        if interaction.len() != n {
            return Err(LvError::DimensionMismatch {
                expected: n,
                got: interaction.len(),
            });
        }
        let flat: Vec<f64> = interaction.into_iter().flatten().collect();
        if let Some((i, &v)) = growth.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("e[{i}]"), v, "must be finite"));
        }
        if let Some((idx, &v)) = flat.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(
                format!("a[{}][{}]", idx / n, idx % n),
                v,
                "must be finite",
            ));
        }
        Ok(Self {
            growth,
            interaction: flat,
        })
    }

    /// The four-species map written directly in multiplicative form:
    /// `e = (r1, r2, -p1, -p2)` and the sign pattern of the coefficients.
    pub fn multiplicative(c: &CoeffParams) -> Self {
        Self::from_pattern(c, [c.r[0], c.r[1], -c.p[0], -c.p[1]])
    }

    /// The increment-form map `x + x g(x)` as a multiplicative map
    /// (growth terms shifted by one). Agrees with [`CoeffParams::raw_step`].
    pub fn increment(c: &CoeffParams) -> Self {
        Self::from_pattern(c, [1.0 + c.r[0], 1.0 + c.r[1], 1.0 - c.p[0], 1.0 - c.p[1]])
    }

    fn from_pattern(c: &CoeffParams, growth: [f64; 4]) -> Self {
        let interaction = vec![
            -c.k[0], 0.0, -c.b[0][0], -c.b[0][1], 0.0, -c.k[1], -c.b[1][0], -c.b[1][1], c.c[0][0],
            c.c[0][1], 0.0, 0.0, c.c[1][0], c.c[1][1], 0.0, 0.0,
        ];
        Self {
            growth: growth.to_vec(),
            interaction,
        }
    }

    pub fn dim(&self) -> usize {
        self.growth.len()
    }

    pub fn step(&self, state: &[f64]) -> Result<Vec<f64>, LvError> {
        let n = self.dim();
        if state.len() != n {
            return Err(LvError::DimensionMismatch {
                expected: n,
                got: state.len(),
            });
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.interaction[i * n..(i + 1) * n];
            let rate = self.growth[i] + row.iter().zip(state).map(|(a, x)| a * x).sum::<f64>();
            let v = state[i] * rate;
            if !v.is_finite() || v.abs() > BLOW_UP_BOUND {
                return Err(LvError::BlowUp {
                    coordinate: i,
                    value: v,
                });
            }
            out.push(v);
        }
        Ok(out)
    }
}
