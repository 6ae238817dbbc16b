//! Small numerical kernels shared across the crate: adaptive quadrature,
//! derivative-free optimization, finite differences, dense matrix
//! exponentials, compensated summation and counter-keyed random streams.

pub mod expm;
pub mod fd;
pub mod opt;
pub mod quad;
pub mod rng;
pub mod sum;

pub use expm::expm;
pub use fd::{central_gradient, central_hessian, richardson_hessian};
pub use opt::{bisect_root, golden_max, newton_min_convex};
pub use quad::adaptive_simpson;
pub use rng::{keyed_rng, normal_pair, NormalStream};
pub use sum::NeumaierSum;
