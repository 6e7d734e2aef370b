//! Exact q-analogue multiple harmonic sums, verification of the finite
//! two-one identities over parameter grids, and q-zeta star series with
//! proven truncation bounds.

pub mod cli;
pub mod decimal;
pub mod identities;
pub mod mhs;
pub mod qkernel;
pub mod series;
pub mod strings;

pub use qkernel::{QArith, QKernel, QOne, QPoint, Rational};
pub use strings::{CompositionString, Ending, IndexString};
