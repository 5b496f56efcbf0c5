//! Average path lengths under orchestration and choreography: exact
//! values for a chain, Monte-Carlo estimates for random trees, and load
//! comparisons.

mod closed;
mod csv;
mod load;
mod study;

pub use closed::{mu_choreography, mu_orchestration, ClosedFormError};
pub use csv::{emit_csv, histogram_path, write_csv};
pub use load::{run_load_study, LoadRun, LoadStudyConfig, LoadStudyReport};
pub use study::{
    calibrate_radius, run_seed, run_study, Scenario, ScenarioReport, Shape, StudyConfig, StudyError,
    StudyReport, DEFAULT_RADIUS, TOLERANCE_PCT,
};
