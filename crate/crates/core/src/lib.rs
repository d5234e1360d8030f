//! Exact and numerical machinery for sums of two prime k-th powers.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: sieves, von Mangoldt values, factorization, totient.
//! * [`characters`]: the unit group of `Z/qZ` and its Dirichlet characters,
//!   evaluated exactly as roots of unity.
//! * [`sigma`]: the singular constant `Σ_k(q) = Σ_{χ^k = χ₀} χ(−1)` computed
//!   three independent ways.
//! * [`reps`]: representation counts `ψ_{2,k}(n)`, the averages `G_{q,k}(N)`
//!   and the main-term ratio scan.
//! * [`analytic`]: generating functions on the circle `|z| = e^{−1/N}`,
//!   the character decomposition of `F_{q,k}` and the quadrature identity
//!   that recovers `G_{q,k}(N)`.
//! * [`table`]: CSV/JSON emission shared by every report.

pub mod analytic;
pub mod arith;
pub mod characters;
mod error;
pub mod reps;
pub mod sigma;
pub mod summation;
pub mod table;

pub use error::{Error, Result};
