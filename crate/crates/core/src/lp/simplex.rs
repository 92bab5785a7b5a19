//! Dense revised simplex for the small LPs this crate builds.
//!
//! The engine works on `min cᵀx, Ax = b, x ≥ 0, b ≥ 0` with an explicit basis
//! inverse. Columns can be appended after a solve and the basis is reused,
//! which is what column generation needs. [`solve_lp`] wraps it for general
//! specs with inequality rows, bounds and free variables.

use crate::error::{Error, Result};

/// Feasibility tolerance every returned point is verified against.
pub const LP_EPS: f64 = 1e-6;

const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-9;
const PHASE_ONE_TOL: f64 = 1e-8;
const REFACTOR_EVERY: usize = 50;
const DEGENERATE_STREAK: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const NON_NEGATIVE: Bounds = Bounds {
        lower: Some(0.0),
        upper: None,
    };
    pub const FREE: Bounds = Bounds {
        lower: None,
        upper: None,
    };

    pub fn between(lower: f64, upper: f64) -> Self {
        Bounds {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgramSpec {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgramSpec {
    /// All variables default to `x ≥ 0`.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![Bounds::NON_NEGATIVE; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    /// Adds a row given as sparse `(variable, coefficient)` pairs.
    pub fn add_sparse_constraint(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coefficients = vec![0.0; self.num_vars()];
        for &(v, c) in terms {
            coefficients[v] += c;
        }
        self.add_constraint(coefficients, relation, rhs);
    }

    pub fn set_bounds(&mut self, var: usize, bounds: Bounds) {
        self.bounds[var] = bounds;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub point: Vec<f64>,
    pub value: f64,
    /// Shadow price of each constraint: rate of change of the optimal value
    /// per unit increase of its right-hand side.
    pub duals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Simplex state over equality-form data with a reusable basis.
#[derive(Clone, Debug)]
pub(crate) struct RevisedSimplex {
    rows: usize,
    rhs: Vec<f64>,
    columns: Vec<Vec<f64>>,
    costs: Vec<f64>,
    artificial: Vec<bool>,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    binv: Vec<f64>,
    values: Vec<f64>,
    started: bool,
    since_refactor: usize,
}

impl RevisedSimplex {
    pub(crate) fn new(rhs: Vec<f64>) -> Self {
        assert!(rhs.iter().all(|&b| b >= 0.0), "right-hand sides must be non-negative");
        Self {
            rows: rhs.len(),
            rhs,
            columns: Vec::new(),
            costs: Vec::new(),
            artificial: Vec::new(),
            basis: Vec::new(),
            position: Vec::new(),
            binv: Vec::new(),
            values: Vec::new(),
            started: false,
            since_refactor: 0,
        }
    }

    pub(crate) fn add_column(&mut self, cost: f64, column: Vec<f64>) -> usize {
        debug_assert_eq!(column.len(), self.rows);
        self.columns.push(column);
        self.costs.push(cost);
        self.artificial.push(false);
        self.position.push(None);
        self.columns.len() - 1
    }

    pub(crate) fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Solves from scratch on the first call, afterwards re-optimizes from the
    /// current (primal feasible) basis.
    pub(crate) fn optimize(&mut self) -> Result<Status> {
        if !self.started {
            self.started = true;
            if self.rows == 0 {
                return Ok(if self.costs.iter().any(|&c| c < -OPTIMALITY_TOL) {
                    Status::Unbounded
                } else {
                    Status::Optimal
                });
            }
            if self.crash_basis() {
                self.run(true)?;
                let infeasibility: f64 = self
                    .basis
                    .iter()
                    .zip(&self.values)
                    .filter(|(&c, _)| self.artificial[c])
                    .map(|(_, &v)| v)
                    .sum();
                let scale = self.rhs.iter().fold(1.0f64, |a, &b| a.max(b));
                if infeasibility > PHASE_ONE_TOL * scale {
                    return Ok(Status::Infeasible);
                }
                self.drive_out_artificials();
            }
        }
        self.run(false)
    }

    /// Primal value of every column, artificials included.
    pub(crate) fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.columns.len()];
        for (r, &c) in self.basis.iter().enumerate() {
            x[c] = self.values[r].max(0.0);
        }
        x
    }

    /// Row duals `y = c_B B⁻¹` for the phase-two costs.
    pub(crate) fn duals(&self) -> Vec<f64> {
        self.duals_for(false)
    }

    pub(crate) fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.values)
            .map(|(&c, &v)| self.costs[c] * v)
            .sum()
    }

    fn cost(&self, column: usize, phase_one: bool) -> f64 {
        if phase_one {
            if self.artificial[column] {
                1.0
            } else {
                0.0
            }
        } else {
            self.costs[column]
        }
    }

    /// Picks a unit column per row where one exists and adds artificials
    /// elsewhere. Returns whether any artificial was needed.
    fn crash_basis(&mut self) -> bool {
        let mut chosen: Vec<Option<usize>> = vec![None; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            let mut nonzero = col.iter().enumerate().filter(|(_, &v)| v != 0.0);
            if let (Some((r, &v)), None) = (nonzero.next(), nonzero.next()) {
                if v == 1.0 && chosen[r].is_none() {
                    chosen[r] = Some(c);
                }
            }
        }
        let mut needs_phase_one = false;
        for r in 0..self.rows {
            if chosen[r].is_none() {
                let mut unit = vec![0.0; self.rows];
                unit[r] = 1.0;
                let c = self.add_column(0.0, unit);
                self.artificial[c] = true;
                chosen[r] = Some(c);
                needs_phase_one = true;
            }
        }
        self.basis = chosen.into_iter().map(Option::unwrap).collect();
        for (r, &c) in self.basis.iter().enumerate() {
            self.position[c] = Some(r);
        }
        self.binv = vec![0.0; self.rows * self.rows];
        for r in 0..self.rows {
            self.binv[r * self.rows + r] = 1.0;
        }
        self.values = self.rhs.clone();
        needs_phase_one
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if !self.artificial[self.basis[r]] {
                continue;
            }
            let candidate = (0..self.columns.len())
                .filter(|&c| !self.artificial[c] && self.position[c].is_none())
                .find(|&c| self.binv_row_dot(r, c).abs() > 1e-7);
            if let Some(c) = candidate {
                let u = self.ftran(c);
                self.pivot(r, c, &u);
            }
            // otherwise the row is redundant and the artificial stays at zero
        }
    }

    fn binv_row_dot(&self, r: usize, column: usize) -> f64 {
        let row = &self.binv[r * self.rows..(r + 1) * self.rows];
        row.iter().zip(&self.columns[column]).map(|(a, b)| a * b).sum()
    }

    fn duals_for(&self, phase_one: bool) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (r, &c) in self.basis.iter().enumerate() {
            let cb = self.cost(c, phase_one);
            if cb == 0.0 {
                continue;
            }
            let row = &self.binv[r * self.rows..(r + 1) * self.rows];
            for (yi, &b) in y.iter_mut().zip(row) {
                *yi += cb * b;
            }
        }
        y
    }

    fn ftran(&self, column: usize) -> Vec<f64> {
        let col = &self.columns[column];
        (0..self.rows)
            .map(|r| {
                self.binv[r * self.rows..(r + 1) * self.rows]
                    .iter()
                    .zip(col)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn run(&mut self, phase_one: bool) -> Result<Status> {
        let limit = 200 * (self.rows + self.columns.len()) + 10_000;
        let mut degenerate = 0usize;
        for _ in 0..limit {
            let y = self.duals_for(phase_one);
            let bland = degenerate > DEGENERATE_STREAK;
            let Some(entering) = self.price(&y, phase_one, bland) else {
                return Ok(Status::Optimal);
            };
            let u = self.ftran(entering);
            let Some(leaving) = self.ratio_test(&u, phase_one, bland) else {
                return Ok(Status::Unbounded);
            };
            let step = self.values[leaving].max(0.0) / u[leaving];
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(leaving, entering, &u);
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
        }
        Err(Error::Solver(format!(
            "simplex iteration limit {limit} reached ({} rows, {} columns)",
            self.rows,
            self.columns.len()
        )))
    }

    fn price(&self, y: &[f64], phase_one: bool, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for c in 0..self.columns.len() {
            if self.position[c].is_some() || (!phase_one && self.artificial[c]) {
                continue;
            }
            let reduced = self.cost(c, phase_one)
                - y.iter().zip(&self.columns[c]).map(|(a, b)| a * b).sum::<f64>();
            if reduced < -OPTIMALITY_TOL {
                if bland {
                    return Some(c);
                }
                if best.is_none_or(|(_, d)| reduced < d) {
                    best = Some((c, reduced));
                }
            }
        }
        best.map(|(c, _)| c)
    }

    fn ratio_test(&self, u: &[f64], phase_one: bool, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let stuck_artificial = !phase_one && self.artificial[self.basis[r]];
            let ratio = if stuck_artificial && u[r].abs() > PIVOT_TOL {
                0.0
            } else if u[r] > PIVOT_TOL {
                self.values[r].max(0.0) / u[r]
            } else {
                continue;
            };
            let replace = match best {
                None => true,
                Some((br, bt)) => {
                    if ratio < bt - 1e-12 {
                        true
                    } else if ratio <= bt + 1e-12 {
                        if bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            u[r].abs() > u[br].abs()
                        }
                    } else {
                        false
                    }
                }
            };
            if replace {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, leaving: usize, entering: usize, u: &[f64]) {
        let n = self.rows;
        let piv = u[leaving];
        let step = self.values[leaving] / piv;
        for v in &mut self.binv[leaving * n..(leaving + 1) * n] {
            *v /= piv;
        }
        let pivot_row: Vec<f64> = self.binv[leaving * n..(leaving + 1) * n].to_vec();
        for r in 0..n {
            if r == leaving || u[r] == 0.0 {
                continue;
            }
            let factor = u[r];
            for (v, &p) in self.binv[r * n..(r + 1) * n].iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.values[r] -= factor * step;
            if self.values[r].abs() < 1e-13 {
                self.values[r] = 0.0;
            }
        }
        self.values[leaving] = step;
        self.position[self.basis[leaving]] = None;
        self.basis[leaving] = entering;
        self.position[entering] = Some(leaving);
        self.since_refactor += 1;
    }

    /// Recomputes `B⁻¹` and the basic values from scratch (Gauss–Jordan with
    /// partial pivoting) to shed accumulated rounding error.
    fn refactor(&mut self) -> Result<()> {
        let n = self.rows;
        let mut a = vec![0.0; n * n];
        for (r, &c) in self.basis.iter().enumerate() {
            for (i, &v) in self.columns[c].iter().enumerate() {
                a[i * n + r] = v;
            }
        }
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        for col in 0..n {
            let (p, mag) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if mag < 1e-11 {
                return Err(Error::Solver("basis matrix became singular".into()));
            }
            if p != col {
                for j in 0..n {
                    a.swap(p * n + j, col * n + j);
                    inv.swap(p * n + j, col * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv[r * n + j] -= f * inv[col * n + j];
                }
            }
        }
        self.binv = inv;
        self.values = (0..n)
            .map(|r| {
                let v: f64 = self.binv[r * n..(r + 1) * n]
                    .iter()
                    .zip(&self.rhs)
                    .map(|(a, b)| a * b)
                    .sum();
                if v.abs() < 1e-13 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        self.since_refactor = 0;
        Ok(())
    }
}

/// How an original variable is expressed through engine columns.
enum VarMap {
    /// `x = offset + x'`
    Shifted { column: usize, offset: f64 },
    /// `x = offset - x'`
    Mirrored { column: usize, offset: f64 },
    /// `x = x⁺ - x⁻`
    Split { plus: usize, minus: usize },
}

impl VarMap {
    fn offset(&self) -> f64 {
        match *self {
            VarMap::Shifted { offset, .. } | VarMap::Mirrored { offset, .. } => offset,
            VarMap::Split { .. } => 0.0,
        }
    }

    fn terms(&self) -> Vec<(usize, f64)> {
        match *self {
            VarMap::Shifted { column, .. } => vec![(column, 1.0)],
            VarMap::Mirrored { column, .. } => vec![(column, -1.0)],
            VarMap::Split { plus, minus } => vec![(plus, 1.0), (minus, -1.0)],
        }
    }
}

/// Solves a general LP. Every optimal point is re-checked against the
/// original constraints; a point that fails the check is reported as a solver
/// error rather than returned.
pub fn solve_lp(spec: &LinearProgramSpec) -> Result<LpOutcome> {
    let n = spec.num_vars();
    if spec.bounds.len() != n || spec.constraints.iter().any(|c| c.coefficients.len() != n) {
        return Err(Error::Solver("constraint or bound arity differs from objective".into()));
    }
    let finite = |v: f64| v.is_finite();
    if !spec.objective.iter().copied().all(finite)
        || !spec
            .constraints
            .iter()
            .all(|c| c.rhs.is_finite() && c.coefficients.iter().copied().all(finite))
    {
        return Err(Error::Solver("spec contains non-finite numbers".into()));
    }

    // Map variables onto non-negative engine columns.
    let mut maps = Vec::with_capacity(n);
    let mut structural = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for b in &spec.bounds {
        match (b.lower, b.upper) {
            (Some(lo), hi) => {
                if let Some(hi) = hi {
                    if hi < lo {
                        return Ok(LpOutcome::Infeasible);
                    }
                    bound_rows.push((structural, hi - lo));
                }
                maps.push(VarMap::Shifted {
                    column: structural,
                    offset: lo,
                });
                structural += 1;
            }
            (None, Some(hi)) => {
                maps.push(VarMap::Mirrored {
                    column: structural,
                    offset: hi,
                });
                structural += 1;
            }
            (None, None) => {
                maps.push(VarMap::Split {
                    plus: structural,
                    minus: structural + 1,
                });
                structural += 2;
            }
        }
    }

    // Rows over structural columns: (coefficients, relation, rhs, flipped).
    let mut rows: Vec<(Vec<f64>, Relation, f64, bool)> = Vec::new();
    for c in &spec.constraints {
        let mut coeffs = vec![0.0; structural];
        let mut rhs = c.rhs;
        for (v, &a) in c.coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            rhs -= a * maps[v].offset();
            for (col, s) in maps[v].terms() {
                coeffs[col] += a * s;
            }
        }
        rows.push((coeffs, c.relation, rhs, false));
    }
    for &(col, width) in &bound_rows {
        let mut coeffs = vec![0.0; structural];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, width, false));
    }
    for row in &mut rows {
        if row.2 < 0.0 {
            row.0.iter_mut().for_each(|v| *v = -*v);
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            row.3 = true;
        }
    }

    let mut objective = vec![0.0; structural];
    let mut constant = 0.0;
    let direction = match spec.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    for (v, &c) in spec.objective.iter().enumerate() {
        constant += c * maps[v].offset();
        for (col, s) in maps[v].terms() {
            objective[col] += direction * c * s;
        }
    }

    let mut engine = RevisedSimplex::new(rows.iter().map(|r| r.2).collect());
    for (col, &cost) in objective.iter().enumerate() {
        engine.add_column(cost, rows.iter().map(|r| r.0[col]).collect());
    }
    for (r, row) in rows.iter().enumerate() {
        let sign = match row.1 {
            Relation::Le => 1.0,
            Relation::Ge => -1.0,
            Relation::Eq => continue,
        };
        let mut col = vec![0.0; rows.len()];
        col[r] = sign;
        engine.add_column(0.0, col);
    }

    match engine.optimize()? {
        Status::Infeasible => return Ok(LpOutcome::Infeasible),
        Status::Unbounded => return Ok(LpOutcome::Unbounded),
        Status::Optimal => {}
    }

    let x = engine.primal();
    let point: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { column, offset } => offset + x[column],
            VarMap::Mirrored { column, offset } => offset - x[column],
            VarMap::Split { plus, minus } => x[plus] - x[minus],
        })
        .collect();
    let y = engine.duals();
    let duals = rows
        .iter()
        .zip(&y)
        .take(spec.constraints.len())
        .map(|(row, &yi)| {
            let oriented = if row.3 { -yi } else { yi };
            direction * oriented
        })
        .collect();
    let value = spec
        .objective
        .iter()
        .zip(&point)
        .map(|(c, x)| c * x)
        .sum::<f64>();
    debug_assert!(
        (value - (direction * engine.objective() + constant)).abs()
            <= 1e-6 * value.abs().max(1.0)
    );

    verify(spec, &point)?;
    Ok(LpOutcome::Optimal(LpSolution {
        point,
        value,
        duals,
    }))
}

fn verify(spec: &LinearProgramSpec, point: &[f64]) -> Result<()> {
    for (v, (b, &x)) in spec.bounds.iter().zip(point).enumerate() {
        let lo_ok = b.lower.is_none_or(|lo| x >= lo - LP_EPS * lo.abs().max(1.0));
        let hi_ok = b.upper.is_none_or(|hi| x <= hi + LP_EPS * hi.abs().max(1.0));
        if !(lo_ok && hi_ok) {
            return Err(Error::Solver(format!("variable {v} = {x} violates its bounds")));
        }
    }
    for (r, c) in spec.constraints.iter().enumerate() {
        let lhs: f64 = c.coefficients.iter().zip(point).map(|(a, x)| a * x).sum();
        let scale = c
            .coefficients
            .iter()
            .zip(point)
            .map(|(a, x)| (a * x).abs())
            .fold(c.rhs.abs(), f64::max)
            .max(1.0);
        let tol = LP_EPS * scale;
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs + tol,
            Relation::Ge => lhs >= c.rhs - tol,
            Relation::Eq => (lhs - c.rhs).abs() <= tol,
        };
        if !ok {
            return Err(Error::Solver(format!(
                "constraint {r} violated by returned point ({lhs} vs {})",
                c.rhs
            )));
        }
    }
    Ok(())
}
