//! Catalog of exactly solvable reference models. Each entry exposes closed
//! forms for its thermodynamics where they exist (the independent oracles of
//! the test suites) plus finite-volume microscopic realizations.

mod double_well;
mod free_fermion;
mod paramagnet;
mod quadratic;
mod spin_chain;

pub use double_well::DoubleWellEntropyModel;
pub use free_fermion::{fermion_hop, FreeFermionChainModel, DEFAULT_QUAD_TOL};
pub use paramagnet::{ParamagnetEntropy, ParamagnetModel, ParamagnetPressure};
pub use quadratic::{QuadraticEntropy, QuadraticModel, QuadraticPressure};
pub use spin_chain::SpinChainEdModel;

use crate::error::{CoreError, Result};
use crate::thermo::{
    legendre_transform, ControlVariable, Entropy, Pressure, StateDensity,
};

/// Consistency report between a model's closed forms and numeric conjugation.
#[derive(Debug, Clone)]
pub struct ClosedFormReport {
    pub pi: f64,
    pub q: StateDensity,
    pub s: f64,
    pub max_deviation_from_numeric: f64,
}

/// Check that closed-form pi, q = -pi' and s = pi + theta.q agree with the
/// numeric Legendre path where one exists.
pub fn closed_form_check(
    entropy: &dyn Entropy,
    pressure: &dyn Pressure,
    theta: &ControlVariable,
) -> Result<ClosedFormReport> {
    if !pressure.control_space().contains(theta.as_slice()) {
        return Err(CoreError::Domain(format!(
            "theta = {:?} outside the model control space",
            theta.as_slice()
        )));
    }
    let pi = pressure.eval(theta.as_slice());
    let q = StateDensity(pressure.grad(theta.as_slice()).iter().map(|g| -g).collect());
    let s = pi + theta.as_slice().iter().zip(q.as_slice()).map(|(t, qi)| t * qi).sum::<f64>();

    let mut max_dev = 0.0f64;
    if entropy.dim() == 1 {
        let (pi_num, q_num) = legendre_transform(entropy, theta)?;
        max_dev = max_dev.max((pi_num - pi).abs());
        max_dev = max_dev.max((q_num.0[0] - q.0[0]).abs());
        let s_at_q = entropy.eval(q.as_slice());
        max_dev = max_dev.max((s_at_q - s).abs());
    }
    Ok(ClosedFormReport { pi, q, s, max_deviation_from_numeric: max_dev })
}
