//! Construction and mechanical verification of the `S₂ × Sₙ`-invariant full
//! exceptional collections on the Hassett spaces `Z_n` (two heavy and `n` light
//! markings).

pub mod blowup_even;
pub mod cli_report;
pub mod cohomology;
pub mod collections;
pub mod core_model;
pub mod error;
pub mod exceptionality;
pub mod fullness;
pub mod windows;

pub use error::{Error, Result};
