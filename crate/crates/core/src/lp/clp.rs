//! Configuration LP at a fixed bound `T`, solved through its dual with a
//! knapsack separation oracle.
//!
//! The dual constraint system is positively homogeneous, so its optimum is
//! either `0` (primal feasible) or unbounded below. Adding the normalization
//! `Σ y_i + Σ z ≤ 1` keeps it bounded while preserving the sign test. The
//! restricted normalized dual is solved through its own LP dual, the master
//!
//! ```text
//!   min s   s.t.  Σ_C x_{i,C} − s ≤ 1          (every candidate i)
//!                 coverage(x) + s ≥ demand      (every score type / (type, voter))
//!                 x, s ≥ 0
//! ```
//!
//! whose row prices are exactly the dual point `(y, z)`. Adding a violated dual
//! constraint is adding a master column, so the basis carries over between
//! rounds. The bound is feasible iff the master optimum `s*` (the negated dual
//! optimum) is zero within tolerance.

use std::collections::HashSet;

use crate::baselines::reverse;
use crate::error::{Error, Result};
use crate::knapsack::{
    solve_multiset, solve_sequence, MultisetKnapsackQuery, SequenceKnapsackQuery,
};
use crate::lp::simplex::{
    solve_lp, LinearProgramSpec, LpOutcome, Relation, RevisedSimplex, Sense, Status, LP_EPS,
};
use crate::model::{
    max_nonpreferred_score, Configuration, CountConfiguration, FractionalSolution, Mode,
    ProblemInstance, SequenceConfiguration,
};

/// Dual prices of the configuration LP.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint {
    /// `y_i`, one per candidate.
    pub y: Vec<f64>,
    pub z: ScorePrices,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScorePrices {
    /// `z_j`, one per score type.
    Ucm(Vec<f64>),
    /// `z[j][l]`, one per score type and voter.
    Wcm(Vec<Vec<f64>>),
}

impl DualPoint {
    pub fn zero(instance: &ProblemInstance, mode: Mode) -> Self {
        let m = instance.m();
        Self {
            y: vec![0.0; m],
            z: match mode {
                Mode::Ucm => ScorePrices::Ucm(vec![0.0; m]),
                Mode::Wcm => ScorePrices::Wcm(vec![vec![0.0; instance.k()]; m]),
            },
        }
    }

    /// `Σ y_i − k Σ z_j` (UCM) or `Σ y_i − Σ z_{j,l}` (WCM).
    pub fn objective(&self, k: usize) -> f64 {
        let y: f64 = self.y.iter().sum();
        match &self.z {
            ScorePrices::Ucm(z) => y - k as f64 * z.iter().sum::<f64>(),
            ScorePrices::Wcm(z) => y - z.iter().flatten().sum::<f64>(),
        }
    }
}

/// Generated configurations per candidate, deduplicated.
#[derive(Clone, Debug, Default)]
pub struct ColumnPool {
    columns: Vec<Vec<Configuration>>,
    seen: HashSet<(usize, Configuration)>,
}

impl ColumnPool {
    pub fn new(m: usize) -> Self {
        Self {
            columns: vec![Vec::new(); m],
            seen: HashSet::new(),
        }
    }

    /// Returns `false` if the configuration was already pooled for `candidate`.
    pub fn insert(&mut self, candidate: usize, config: Configuration) -> bool {
        if !self.seen.insert((candidate, config.clone())) {
            return false;
        }
        self.columns[candidate].push(config);
        true
    }

    pub fn candidate(&self, i: usize) -> &[Configuration] {
        &self.columns[i]
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClpOptions {
    /// Tolerance of the feasibility sign test and of the returned solution.
    pub eps: f64,
    /// Per-candidate column cap; defaults to `50·m·k`.
    pub max_columns: Option<usize>,
}

impl Default for ClpOptions {
    fn default() -> Self {
        Self {
            eps: LP_EPS,
            max_columns: None,
        }
    }
}

impl ClpOptions {
    fn column_cap(&self, instance: &ProblemInstance) -> usize {
        self.max_columns
            .unwrap_or(50 * instance.m() * instance.k())
    }
}

/// One round of the cutting-plane loop.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub bound: u64,
    pub iteration: usize,
    pub columns_added: usize,
    pub pool_size: usize,
    pub dual_objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClpProbe {
    pub feasible: bool,
    pub solution: Option<FractionalSolution>,
    /// Optimum of the normalized dual; `≥ −eps` iff feasible.
    pub dual_objective: f64,
    pub iterations: usize,
    pub columns: usize,
}

fn check_mode(instance: &ProblemInstance, mode: Mode) -> Result<()> {
    if mode == Mode::Ucm {
        instance.require_unweighted("the unweighted configuration LP")?;
    }
    Ok(())
}

/// For every candidate with one, a configuration in `𝒞_i(T)` whose dual
/// constraint the point violates. Empty iff the point is dual feasible.
pub fn separate(
    instance: &ProblemInstance,
    bound: u64,
    point: &DualPoint,
    mode: Mode,
) -> Result<Vec<(usize, Configuration)>> {
    check_mode(instance, mode)?;
    let alpha = instance.alpha();
    let reduced = alpha.reduced();
    let top_reduced = reduced[reduced.len() - 1];
    let mut found = Vec::new();
    for (i, &sigma) in instance.sigma().iter().enumerate() {
        let Some(room) = bound.checked_sub(sigma) else {
            continue;
        };
        match (&point.z, mode) {
            (ScorePrices::Ucm(z), Mode::Ucm) => {
                let query = MultisetKnapsackQuery {
                    values: z.clone(),
                    weights: reduced.to_vec(),
                    weight_cap: room.min(instance.k() as u64 * top_reduced),
                    value_floor: point.y[i],
                    size: instance.k(),
                };
                if let Some(counts) = solve_multiset(&query) {
                    found.push((i, Configuration::Count(CountConfiguration::new(counts))));
                }
            }
            (ScorePrices::Wcm(z), Mode::Wcm) => {
                let query = SequenceKnapsackQuery {
                    values: z.clone(),
                    costs: reduced.to_vec(),
                    penalties: instance.weights().to_vec(),
                    cost_cap: room.min(instance.total_weight() * top_reduced),
                    value_floor: point.y[i],
                };
                if let Some(seq) = solve_sequence(&query) {
                    found.push((i, Configuration::Sequence(SequenceConfiguration::new(seq))));
                }
            }
            _ => {
                return Err(Error::DimensionMismatch(
                    "dual point shape does not match the mode".into(),
                ))
            }
        }
    }
    Ok(found)
}

/// Row layout of the master and of the recovery LP.
struct Layout {
    m: usize,
    k: usize,
    mode: Mode,
}

impl Layout {
    fn coverage_rows(&self) -> usize {
        match self.mode {
            Mode::Ucm => self.m,
            Mode::Wcm => self.m * self.k,
        }
    }

    fn demand(&self) -> f64 {
        match self.mode {
            Mode::Ucm => self.k as f64,
            Mode::Wcm => 1.0,
        }
    }

    /// `(row, coefficient)` of a configuration column, candidate row first.
    fn column_terms(&self, candidate: usize, config: &Configuration) -> Vec<(usize, f64)> {
        let mut terms = vec![(candidate, 1.0)];
        match config {
            Configuration::Count(c) => terms.extend(
                c.counts()
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(j, &n)| (self.m + j, n as f64)),
            ),
            Configuration::Sequence(s) => terms.extend(
                s.indices()
                    .iter()
                    .enumerate()
                    .map(|(l, &j)| (self.m + j * self.k + l, 1.0)),
            ),
        }
        terms
    }

    fn dense(&self, terms: &[(usize, f64)]) -> Vec<f64> {
        let mut col = vec![0.0; self.m + self.coverage_rows()];
        for &(r, v) in terms {
            col[r] += v;
        }
        col
    }

    fn dual_point(&self, row_prices: &[f64]) -> DualPoint {
        let y = row_prices[..self.m].iter().map(|&v| (-v).max(0.0)).collect();
        let z_flat: Vec<f64> = row_prices[self.m..].iter().map(|&v| v.max(0.0)).collect();
        let z = match self.mode {
            Mode::Ucm => ScorePrices::Ucm(z_flat),
            Mode::Wcm => ScorePrices::Wcm(z_flat.chunks(self.k).map(<[f64]>::to_vec).collect()),
        };
        DualPoint { y, z }
    }
}

/// Decides whether the configuration LP at `bound` is feasible and, if so,
/// returns a solution over the generated columns.
pub fn clp_feasible(
    instance: &ProblemInstance,
    bound: u64,
    mode: Mode,
    options: &ClpOptions,
) -> Result<ClpProbe> {
    clp_feasible_traced(instance, bound, mode, options, &mut |_| {})
}

pub fn clp_feasible_traced(
    instance: &ProblemInstance,
    bound: u64,
    mode: Mode,
    options: &ClpOptions,
    trace: &mut dyn FnMut(&IterationTrace),
) -> Result<ClpProbe> {
    check_mode(instance, mode)?;
    let m = instance.m();
    let floor = instance.total_weight() * instance.alpha().score(0);
    if instance.sigma().iter().any(|&s| s + floor > bound) {
        // some candidate has no configuration at all
        return Ok(ClpProbe {
            feasible: false,
            solution: None,
            dual_objective: f64::NEG_INFINITY,
            iterations: 0,
            columns: 0,
        });
    }

    let layout = Layout {
        m,
        k: instance.k(),
        mode,
    };
    let rows = m + layout.coverage_rows();
    let mut rhs = vec![1.0; m];
    rhs.resize(rows, layout.demand());
    let mut master = RevisedSimplex::new(rhs);

    let mut s_col = vec![-1.0; m];
    s_col.resize(rows, 1.0);
    let s_index = master.add_column(1.0, s_col);
    for r in 0..rows {
        let mut col = vec![0.0; rows];
        col[r] = if r < m { 1.0 } else { -1.0 };
        master.add_column(0.0, col);
    }
    let first_config_column = master.num_columns();

    let cap = options.column_cap(instance);
    let mut pool = ColumnPool::new(m);
    let mut order: Vec<(usize, Configuration)> = Vec::new();
    let mut iteration = 0;
    let (feasible, dual_objective) = loop {
        iteration += 1;
        match master.optimize()? {
            Status::Optimal => {}
            other => {
                return Err(Error::Solver(format!(
                    "restricted master ended {other:?} at bound {bound}"
                )))
            }
        }
        let s_star = master.objective().max(0.0);
        let point = layout.dual_point(&master.duals());
        if s_star <= 1e-9 {
            trace(&IterationTrace {
                bound,
                iteration,
                columns_added: 0,
                pool_size: pool.len(),
                dual_objective: -s_star,
            });
            break (true, -s_star);
        }
        let violated = separate(instance, bound, &point, mode)?;
        let mut added = 0;
        for (i, config) in violated {
            if pool.insert(i, config.clone()) {
                if pool.candidate(i).len() > cap {
                    return Err(Error::ColumnCap {
                        candidate: i,
                        cap,
                        bound,
                    });
                }
                let terms = layout.column_terms(i, &config);
                master.add_column(0.0, layout.dense(&terms));
                order.push((i, config));
                added += 1;
            }
        }
        trace(&IterationTrace {
            bound,
            iteration,
            columns_added: added,
            pool_size: pool.len(),
            dual_objective: -s_star,
        });
        if added == 0 {
            break (s_star <= options.eps, -s_star);
        }
    };

    let solution = if feasible {
        let master_x = master.primal();
        debug_assert!(master_x[s_index] <= options.eps);
        let fallback: Vec<f64> = master_x[first_config_column..first_config_column + order.len()]
            .to_vec();
        Some(recover_primal(instance, bound, &layout, &order, fallback, options.eps)?)
    } else {
        None
    };

    Ok(ClpProbe {
        feasible,
        solution,
        dual_objective,
        iterations: iteration,
        columns: pool.len(),
    })
}

/// Re-solves the primal restricted to the pooled columns, pushing each
/// candidate's weights to sum to one. Falls back to the master's values if
/// the strict system is rejected at solver tolerance.
fn recover_primal(
    instance: &ProblemInstance,
    bound: u64,
    layout: &Layout,
    order: &[(usize, Configuration)],
    fallback: Vec<f64>,
    eps: f64,
) -> Result<FractionalSolution> {
    let n = order.len();
    let mut spec = LinearProgramSpec::new(Sense::Maximize, vec![1.0; n]);
    let rows = layout.m + layout.coverage_rows();
    let mut row_terms: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
    for (v, (i, config)) in order.iter().enumerate() {
        for (r, c) in layout.column_terms(*i, config) {
            row_terms[r].push((v, c));
        }
    }
    for (r, terms) in row_terms.iter().enumerate() {
        if r < layout.m {
            spec.add_sparse_constraint(terms, Relation::Le, 1.0);
        } else {
            spec.add_sparse_constraint(terms, Relation::Ge, layout.demand());
        }
    }
    let weights = match solve_lp(&spec) {
        Ok(LpOutcome::Optimal(sol)) => sol.point,
        _ => fallback,
    };

    let mut assignments: Vec<Vec<(Configuration, f64)>> = vec![Vec::new(); layout.m];
    for ((i, config), x) in order.iter().zip(weights) {
        if x > 1e-9 {
            assignments[*i].push((config.clone(), x));
        }
    }
    let solution = FractionalSolution {
        bound,
        assignments,
    };
    solution.validate(instance, eps)?;
    Ok(solution)
}

/// Lower bound on any feasible `T`: the average final score, and every
/// candidate's cheapest configuration.
pub fn bound_floor(instance: &ProblemInstance) -> u64 {
    let w = instance.total_weight();
    let reduced = instance.alpha().reduced();
    let mass: u64 = instance.sigma().iter().sum::<u64>() + w * reduced.iter().sum::<u64>();
    let m = instance.m() as u64;
    let average = mass.div_ceil(m);
    let cheapest = instance.sigma().iter().max().copied().unwrap_or(0) + w * reduced[0];
    average.max(cheapest)
}

/// Smallest `T` whose configuration LP is feasible, with its solution.
pub fn min_feasible_t(
    instance: &ProblemInstance,
    mode: Mode,
    options: &ClpOptions,
) -> Result<(u64, FractionalSolution)> {
    min_feasible_t_traced(instance, mode, options, &mut |_| {})
}

pub fn min_feasible_t_traced(
    instance: &ProblemInstance,
    mode: Mode,
    options: &ClpOptions,
    trace: &mut dyn FnMut(&IterationTrace),
) -> Result<(u64, FractionalSolution)> {
    check_mode(instance, mode)?;
    let upper = max_nonpreferred_score(instance, &reverse(instance))?;
    let lower = bound_floor(instance).min(upper);

    // `lower - 1` is infeasible by construction, `upper` is attained by REVERSE.
    let mut infeasible = lower.checked_sub(1);
    let mut feasible = upper;
    let mut best: Option<FractionalSolution> = None;
    loop {
        let probe_at = match infeasible {
            Some(lo) if feasible - lo <= 1 => break,
            Some(lo) => lo + (feasible - lo) / 2,
            None if feasible == 0 => break,
            None => (feasible - 1) / 2,
        };
        let probe = clp_feasible_traced(instance, probe_at, mode, options, trace)?;
        if probe.feasible {
            feasible = probe_at;
            best = probe.solution;
        } else {
            infeasible = Some(probe_at);
        }
    }
    let solution = match best {
        Some(s) if s.bound == feasible => s,
        _ => {
            let probe = clp_feasible_traced(instance, feasible, mode, options, trace)?;
            probe.solution.ok_or_else(|| {
                Error::Solver(format!(
                    "configuration LP reported infeasible at the attainable bound {feasible}"
                ))
            })?
        }
    };
    Ok((feasible, solution))
}
