//! A numerical laboratory for compound estimation with a known parameter
//! multiset.
//!
//! Given n independent observations whose parameters are known up to a
//! permutation, two oracle rules bound what symmetric procedures can achieve
//! under total squared error:
//!
//! - the best **simple symmetric** rule, which estimates each coordinate from
//!   its own observation (`oracles::simple_rule`), and
//! - the best **permutation-invariant** rule, which conditions on the whole
//!   sample (`oracles::pi_rule_*`, three interchangeable engines).
//!
//! The `exact` module holds the combinatorial kernels behind the engines
//! (log-space Ryser permanents, permanental minors, elementary symmetric
//! polynomials, brute-force enumeration). The `risk` module estimates both
//! risks by paired Monte Carlo on common random numbers and probes the
//! moment conditions under which the two rules' total risks stay within an
//! O(1) gap of each other. The `cli` module drives everything from
//! config files.

pub mod cli;
pub mod error;
pub mod exact;
pub mod families;
pub mod numeric;
pub mod oracles;
pub mod risk;
pub mod rng;

pub use error::{Error, Result};
