//! Partitions into k-th powers, seen through their Khinchin families.
//!
//! The crate computes exact coefficient tables of
//! `P_k(z) = prod 1/(1 - z^{j^k})` and `Q_k(z) = prod (1 + z^{j^k})`,
//! evaluates the associated one-parameter families of distributions
//! (fulcrum, mean, variance, characteristic function, sampling), solves the
//! saddle-point equation `m(e^{-s}) = n`, and compares exact counts against
//! Hayman-type and closed-form Hardy–Ramanujan estimates.
//!
//! - [`bigcount`]: exact tables by knapsack DP and by the divisor-sum recurrence
//! - [`special`]: `zeta`, `Gamma` and the per-`k` constant set
//! - [`family`]: fulcrum and its derivatives, moments, pmf, sampling
//! - [`saddle`]: saddle points and log-space asymptotic estimators
//! - [`diagnostics`]: numerical witnesses for the limit statements
//! - [`cli`]: command-line front end

pub mod bigcount;
pub mod cli;
pub mod diagnostics;
mod error;
pub mod family;
pub mod fixtures;
mod kind;
pub mod numeric;
pub mod saddle;
pub mod special;

pub use error::{Error, Result};
pub use kind::PartitionKind;
