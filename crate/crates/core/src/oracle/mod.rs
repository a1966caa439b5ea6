//! Literal flag valuations on explicit sections, used to validate the closed
//! forms from the inside.

mod sample;
mod section;

pub use sample::{convergence_report, sample_body, ConvergenceReport, LevelReport, OracleFlag, SampleConfig};
pub use section::{nu_general_surface, nu_invariant, Section, ValuationVector};
