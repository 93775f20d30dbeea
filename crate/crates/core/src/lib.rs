//! Continued-fraction dynamics of the Gauss map in exact arithmetic.
//!
//! * [`cf`]: expansions, convergents, cylinders `I(a_1..a_n)`, the Gauss map
//!   and measure, and exhaustive checks of the cylinder inequalities.
//! * [`symbolic`]: digit streams, the shift metric, the schedule `R` and the
//!   scrambled-set construction `Δ_N(x) = Ψ_N(x, Θ_N(g_N(x)))`.
//! * [`scramble`]: rigorous scrambled-pair certificates for the projected
//!   orbits, the gap inequality and the Hölder chain.
//! * [`dimension`]: cover-sum pressure roots for `E_N` and `φ(S_N)`.
//! * [`density`]: word-occurrence scans, certified random digits, Gauss
//!   measure invariance and bounded-digit points in arbitrary intervals.

pub mod cf;
pub mod density;
pub mod dimension;
pub mod error;
pub mod precise;
pub mod rational;
pub mod scramble;
pub mod symbolic;

pub use cf::{Cylinder, Digit, Word};
pub use error::{Error, Result};
pub use rational::{Interval, Rational};
