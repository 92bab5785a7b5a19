//! Constructive coalitional manipulation of positional scoring rules.
//!
//! A coalition of manipulators wants to cast ballots so that every candidate
//! other than the preferred one ends with as few points as possible. The
//! solver relaxes the problem to a configuration LP, solves it with a
//! knapsack separation oracle, and rounds the fractional answer.

pub mod baselines;
pub mod error;
pub mod experiment;
pub mod knapsack;
pub mod lp;
pub mod model;
pub mod pipeline;
pub mod rearrange;
pub mod rounding;

pub use baselines::{
    average_fit, claim1_instance, exact_bruteforce, largest_fit, reverse, ExactLimits, ExactResult,
};
pub use error::{Error, Result};
pub use experiment::{gen_uniform, run_grid, ExperimentGrid, GridCell, Summary, TrialRecord};
pub use knapsack::{
    multiset_optimum, sequence_optimum, solve_multiset, solve_sequence, KnapsackOptimum,
    MultisetKnapsackQuery, SequenceKnapsackQuery,
};
pub use lp::{
    clp_feasible, min_feasible_t, natural_lp_value, separate, solve_lp, ClpOptions, ClpProbe,
    DualPoint, LinearProgramSpec, LpOutcome,
};
pub use model::{
    beta_of, candidate_final_scores, decide_win, g_alpha, max_nonpreferred_score, p_final_score,
    Configuration, CountConfiguration, FractionalSolution, ManipulationMatrix, Mode,
    ProblemInstance, ScoringVector, SequenceConfiguration, Validity,
};
pub use pipeline::{solve, SolveOptions, SolveReport};
pub use rearrange::rearrange_to_valid;
pub use rounding::{
    fix_ucm, fix_ucm_audited, fix_wcm, round_best_of, sample_configurations, FixAudit,
    RoundingReport, ScoreEvent,
};
