//! Benchmark harness: learning problems from a network, learner races, error curves and
//! speedup tables.

mod experiment;
mod output;
mod tables;

pub use experiment::{
    run_experiment, run_experiment_on, ErrorCurve, ExperimentResults, ExperimentSpec, LearnerRun, ProblemResult,
};
pub use output::{emit_curves, write_results, write_table};
pub use tables::{
    iteration_speedup_table, race_times, time_speedup_table, SpeedupRow, SpeedupTable, ERROR_THRESHOLD, UNDEFINED,
};
