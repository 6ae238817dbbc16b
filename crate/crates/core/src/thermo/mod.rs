//! Convex thermodynamic formalism: entropy densities s(q), their Legendre
//! conjugate pi(theta) (the reduced pressure p/T), tangent sets at kinks of
//! pi, and the Hessian pairing pi''(theta) = -[s''(q)]^(-1).

mod conjugate;
mod envelope;
mod tangent;
mod types;

pub use conjugate::{
    dual_entropy_hessian, entropy_from_pressure, hessian_pair_check, legendre_transform,
    pressure_from_pi, q_of_theta, theta_of_q, NumericConjugate,
};
pub use envelope::concave_envelope;
pub use tangent::{tangent_set, TangentSet};
pub use types::{
    ControlVariable, Domain, Entropy, Pressure, Representation, StateDensity, TabulatedEntropy,
    TabulatedPressure,
};
