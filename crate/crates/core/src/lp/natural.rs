//! The assignment relaxation: fractional amounts `x_{i,j} ∈ [0, k]` of score
//! type `j` handed to candidate `i`.

use crate::error::{Error, Result};
use crate::lp::simplex::{solve_lp, Bounds, LinearProgramSpec, LpOutcome, Relation, Sense};
use crate::model::ProblemInstance;

/// Optimal `T` of the natural LP. Its integrality gap can be large, which is
/// what the configuration LP avoids.
pub fn natural_lp_value(instance: &ProblemInstance) -> Result<f64> {
    instance.require_unweighted("the natural LP")?;
    let m = instance.m();
    let k = instance.k() as f64;
    let reduced = instance.alpha().reduced();
    let var = |i: usize, j: usize| i * m + j;
    let t = m * m;

    let mut objective = vec![0.0; t + 1];
    objective[t] = 1.0;
    let mut spec = LinearProgramSpec::new(Sense::Minimize, objective);
    for i in 0..m {
        for j in 0..m {
            spec.set_bounds(var(i, j), Bounds::between(0.0, k));
        }
    }
    spec.set_bounds(t, Bounds::FREE);
    for j in 0..m {
        let terms: Vec<_> = (0..m).map(|i| (var(i, j), 1.0)).collect();
        spec.add_sparse_constraint(&terms, Relation::Eq, k);
    }
    for i in 0..m {
        let terms: Vec<_> = (0..m).map(|j| (var(i, j), 1.0)).collect();
        spec.add_sparse_constraint(&terms, Relation::Eq, k);
    }
    for (i, &sigma) in instance.sigma().iter().enumerate() {
        let mut terms: Vec<_> = (0..m).map(|j| (var(i, j), reduced[j] as f64)).collect();
        terms.push((t, -1.0));
        spec.add_sparse_constraint(&terms, Relation::Le, -(sigma as f64));
    }
    match solve_lp(&spec)? {
        LpOutcome::Optimal(sol) => Ok(sol.value),
        other => Err(Error::Solver(format!("natural LP ended {other:?}"))),
    }
}
