//! Minimization and maximization of submodular programs whose cost is a sum
//! of a few concave functions of modular loads,
//! `f(X) = Σ_i ψ_i(w_i(X))`.
//!
//! Two drivers are provided. The piecewise-linear approximation
//! ([`algorithms::pla_solve`]) replaces each `ψ_i` by a lower envelope with
//! geometric breakpoints and solves one modular subproblem per choice of
//! segments. The supergradient method ([`algorithms::sga_solve`]) iterates
//! modular upper bounds of `f`. Both dispatch to the exact linear solvers in
//! [`linear`] or the greedy solvers in [`greedy`].

pub mod algorithms;
pub mod concave;
pub mod cost;
pub mod error;
pub mod experiments;
pub mod greedy;
pub mod io;
pub mod linear;
pub mod oracle;
pub mod piecewise;
pub mod submodularity;
pub mod subset;

pub use concave::ConcaveSpec;
pub use cost::{CooperativeCost, GroundSet, SetFunction, WeightVector};
pub use error::{Error, Result};
pub use linear::ConstraintSpec;
pub use oracle::SubmodularOracle;
pub use subset::Subset;
