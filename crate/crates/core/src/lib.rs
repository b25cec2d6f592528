//! Exact counting engine for unit-sum equations in Farey fractions of bounded
//! height, together with the arithmetic, admissibility and exponential-sum
//! machinery used to study them.
//!
//! Module map:
//!
//! - [`arith`]: gcd, inverses, totient, Möbius, divisor statistics, Hooley Δ, prime windows.
//! - [`rationals`]: canonical fractions, heights, Farey membership, exact accumulation.
//! - [`lcm_filter`]: the denominator admissibility congruence and its enumeration.
//! - [`counting`]: `L_n(H)`, `S_n(H)`, `N_n(a; B0, B)`, constructive lower bounds, doubly stochastic counts.
//! - [`expsum`]: balanced residues, ratio exponential sums, prime-window moments, congruence counts.

pub mod arith;
pub mod counting;
mod error;
pub mod expsum;
pub mod lcm_filter;
mod options;
pub mod parallel;
pub mod rationals;

pub use error::{Error, Result};
pub use options::RunOptions;
