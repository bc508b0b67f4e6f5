//! Learners: EM, EDML and the hybrid of both, with the pieces they are built from.

mod bayes_factor;
mod config;
mod edml;
mod em;
mod expectations;
mod fixed_point;
mod hybrid;
mod island;
mod run;
mod soft_evidence;

pub use bayes_factor::{bayes_factor_from_marginals, binary_bayes_factor, BayesFactor};
pub use config::{Algorithm, Clock, LearnerConfig, LocalSeed};
pub use edml::{edml_global_iteration, edml_step_from, EdmlStep};
pub use em::{em_update, em_update_from};
pub use expectations::Expectations;
pub use fixed_point::em_fixed_point_residual;
pub use hybrid::{hybrid_step, hybrid_step_from, Branch, HybridStep};
pub use island::{edml_local_update, solve_island, Island, IslandSolution};
pub use run::{run, run_with_prior, IterationRecord, LearningTrace, Status};
pub use soft_evidence::{soft_evidence, soft_evidence_from, SoftEvidence, ZERO_PARAMETER_GUARD};
