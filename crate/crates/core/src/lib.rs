//! Four-species discrete-time Lotka-Volterra predator-prey models.
//!
//! - [`smallmat`]: inversion, characteristic polynomials and eigenvalues of
//!   small dense matrices.
//! - [`lvmap`]: ecological parameters, the map, and trajectory simulation.
//! - [`stability`]: coexistence equilibria, linearization, and stability
//!   diagrams over the hunting-efficiency square.
//! - [`scenarios`]: named parameter presets.

pub mod lvmap;
pub mod scenarios;
pub mod smallmat;
pub mod stability;

pub use lvmap::{
    CoeffParams, EcoParams, Event, EventKind, GenericLV, LvError, PersistenceReport, Species,
    StateVec, Trajectory,
};
pub use scenarios::{get_preset, list_presets, Preset};
pub use smallmat::{Complex, Mat, MatError, PolyCoeffs};
pub use stability::{
    classify, diagram, fixed_point, jacobian, Classification, EigenReport, FixedPointReport,
    StabilityClass, StabilityGrid,
};
