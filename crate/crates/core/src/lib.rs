//! Cross-checked local-equilibrium statistics on exactly solvable models.
//!
//! The crate connects three descriptions of the same matter through the
//! single control field theta(x, t):
//!
//! * `thermo` / `models` — convex thermodynamics: entropy densities, the
//!   Legendre-conjugate reduced pressure pi = p/T, tangent sets at phase
//!   coexistence, and the Hessian pairing pi''(theta) = -[s''(q)]^(-1);
//! * `hydro` — conserved-density evolution dq/dt = -div j with Onsager flux
//!   j = L(theta) grad theta, entropy production diagnostics, driven steady
//!   states and diffusive scale invariance;
//! * `fluct` — the Gaussian fluctuation field with cell covariance
//!   pi''(theta(x, t)) delta(x - x'), smeared statistics and punctual limits;
//! * `quantum` — finite-volume Gibbs ensembles (dense and free-fermion
//!   backends), reduced-pressure convergence, moment/Hessian duality, KMS
//!   residuals, thermodynamic completeness and local-restriction checks;
//! * `zeroth` — a finite probe thermalizing to the local temperature through
//!   a detailed-balance Davies generator.

pub mod error;
pub mod field;
pub mod fluct;
pub mod hydro;
pub mod models;
pub mod num;
pub mod quantum;
pub mod report;
pub mod thermo;
pub mod zeroth;

pub use error::{CoreError, Result};
