pub mod clp;
pub mod natural;
pub mod simplex;

pub use clp::{
    bound_floor, clp_feasible, clp_feasible_traced, min_feasible_t, min_feasible_t_traced,
    separate, ClpOptions, ClpProbe, ColumnPool, DualPoint, IterationTrace, ScorePrices,
};
pub use natural::natural_lp_value;
pub use simplex::{
    solve_lp, Bounds, Constraint, LinearProgramSpec, LpOutcome, LpSolution, Relation, Sense,
    LP_EPS,
};
