//! Play operators and the temperature-dependent Preisach operator.

mod bank;
mod curve;
mod play;
mod preisach;

pub use bank::{bank_advance, BankRecord, PlayBank};
pub use curve::MemoryCurve;
pub use play::{play_init, play_update, PlayState};
pub use preisach::{
    curve_dissipation, curve_outputs, curve_p, dissipation_increment, eval_p, eval_theta_derivs, eval_u,
    grid_sum_p, hyst_outputs, step_energy_identity_check, HystOutputs,
};
