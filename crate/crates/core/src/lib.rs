//! Orbit classification for circle maps and maps of the two-torus.
//!
//! Orbits are labelled chaotic, periodic, resonant or nonresonant
//! (incommensurate) from three ingredients:
//!
//! * [`averaging`]: weighted Birkhoff averages give the rotation vector
//!   together with an estimate `dig_T` of its number of correct digits;
//!   slow convergence flags chaos.
//! * [`farey`]: Stern-Brocot descent for the minimal denominator of a
//!   rational inside a small ball, used to call a rotation number
//!   effectively rational or irrational.
//! * [`resonance`]: brute-force search for the smallest integer vector `m`
//!   with `m·ω ≈ n`, separating rank-one resonances from incommensurate
//!   rotation vectors.
//!
//! [`critical`] locates the forcing amplitude at which the Jacobian first
//! becomes singular, and [`scan`] runs parameter sweeps, aggregates class
//! proportions and fits the circle-map power law.

pub mod averaging;
pub mod cli;
pub mod config;
pub mod critical;
mod error;
pub mod exec;
pub mod farey;
pub mod maps;
pub mod output;
pub mod resonance;
pub mod scan;

pub use error::{Error, Result};

/// The golden mean `(√5 − 1)/2`.
pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_9;
