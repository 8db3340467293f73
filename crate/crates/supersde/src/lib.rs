//! Exact Grassmann/Berezin algebra, superfunction calculus, Gaussian
//! super-Wick expectations, and stochastic verification of the
//! correspondence between a one-dimensional interacting SDE and its
//! Gibbs measure.

pub mod checks;
pub mod cli;
pub mod config;
pub mod grassmann;
pub mod poly;
pub mod report;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod sde;
pub mod superfunction;
pub mod superwick;

pub use cli::run_cli;
pub use grassmann::{GeneratorId, GrassmannElement, GrassmannError};
pub use poly::Polynomial;
pub use scalar::ScalarFn;
pub use superfunction::SuperFunction;
pub use superwick::{CovarianceSpec, SuperInsertion};
