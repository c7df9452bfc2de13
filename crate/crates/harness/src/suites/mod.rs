mod combinatorics;
mod identities;
mod mc;
mod pathwise;

pub use combinatorics::{run_combinatorics_suite, MAX_COMBINATORICS_N};
pub use identities::{
    identity_trial, run_discrete_identity_suite, TrialOutcome, IDENTITY_STATISTICS, IDENTITY_TOLERANCE,
};
pub use mc::{run_mc_convergence, GAP_SE_FACTOR, TARGET_SE_FACTOR};
pub use pathwise::{run_subordinator_pathwise, ERROR_RATIO_TOLERANCE, HU_MEYER_TOLERANCE};
