//! Solvability of `x^q = a` over the p-adic numbers: exact truncated p-adic
//! arithmetic, power-residue congruences, digit-by-digit root extraction and
//! canonical `ε·δ·y^q` decompositions.

pub mod cli;
pub mod congruence;
pub mod error;
pub mod multinomial;
pub mod padic;
pub mod representation;
pub mod roots;

pub use error::{Error, Result};
pub use padic::PAdic;
