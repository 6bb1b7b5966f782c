//! Temperature-dependent Preisach hysteresis and a spectral Galerkin solver for
//! longitudinal oscillations of a thermo-piezoelectric rod.

pub mod density;
pub mod error;
pub mod hysteresis;
pub mod inversion;
pub mod loops;
pub mod material;
pub mod presets;
pub mod quadrature;
pub mod rod;
pub mod scenario;

pub use density::{DensityKind, DensityModel, HypothesisReport, Quantity, SamplingSpec};
pub use error::{Error, Result};
pub use hysteresis::{HystOutputs, MemoryCurve, PlayBank, PlayState};
pub use inversion::{FeedbackCoeffs, LipschitzCertificate};
pub use material::MaterialParams;
pub use quadrature::RGrid;
pub use rod::{Discretization, GalerkinState, Rod, TraceRecord};
pub use scenario::{run_simulation, DensitySpec, Scenario};
