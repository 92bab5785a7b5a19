//! Cross-checks against independent implementations: an external LP solver,
//! explicit configuration enumeration and brute-force separation.

use coalition_core::lp::{
    bound_floor, clp_feasible, solve_lp, Bounds, ClpOptions, DualPoint, LinearProgramSpec,
    LpOutcome, Relation, ScorePrices, Sense,
};
use coalition_core::{
    gen_uniform, max_nonpreferred_score, min_feasible_t, natural_lp_value, reverse,
    sample_configurations, separate, Configuration, CountConfiguration, FractionalSolution, Mode,
    ProblemInstance, ScoringVector, SequenceConfiguration,
};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;

fn minilp_outcome(spec: &LinearProgramSpec) -> Result<f64, minilp::Error> {
    let dir = match spec.sense {
        Sense::Minimize => OptimizationDirection::Minimize,
        Sense::Maximize => OptimizationDirection::Maximize,
    };
    let mut p = Problem::new(dir);
    let vars: Vec<_> = spec
        .objective
        .iter()
        .zip(&spec.bounds)
        .map(|(&c, b)| {
            p.add_var(
                c,
                (b.lower.unwrap_or(f64::NEG_INFINITY), b.upper.unwrap_or(f64::INFINITY)),
            )
        })
        .collect();
    for con in &spec.constraints {
        let expr: Vec<_> = con
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(j, &a)| (vars[j], a))
            .collect();
        let op = match con.relation {
            Relation::Le => ComparisonOp::Le,
            Relation::Ge => ComparisonOp::Ge,
            Relation::Eq => ComparisonOp::Eq,
        };
        p.add_constraint(expr, op, con.rhs);
    }
    // minilp occasionally reports an unbounded ray as an infinite optimum
    match p.solve() {
        Ok(s) if !s.objective().is_finite() => Err(minilp::Error::Unbounded),
        other => other.map(|s| s.objective()),
    }
}

fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgramSpec {
    let n = rng.random_range(1..=5);
    let rows = rng.random_range(1..=5);
    let sense = if rng.random_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
    let objective = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let mut spec = LinearProgramSpec::new(sense, objective);
    for _ in 0..rows {
        let coefficients = (0..n).map(|_| rng.random_range(-4..=4) as f64).collect();
        let relation = match rng.random_range(0..3) {
            0 => Relation::Le,
            1 => Relation::Ge,
            _ => Relation::Eq,
        };
        spec.add_constraint(coefficients, relation, rng.random_range(-6..=10) as f64);
    }
    // keep most instances bounded
    for j in 0..n {
        if rng.random_bool(0.7) {
            spec.set_bounds(j, Bounds::between(0.0, rng.random_range(1..=6) as f64));
        }
    }
    spec
}

#[test]
fn solve_lp_agrees_with_external_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut optimal, mut infeasible, mut unbounded) = (0, 0, 0);
    for case in 0..600 {
        let spec = random_lp(&mut rng);
        let ours = solve_lp(&spec).unwrap();
        match (minilp_outcome(&spec), ours) {
            (Ok(v), LpOutcome::Optimal(s)) => {
                optimal += 1;
                assert!((v - s.value).abs() <= 1e-6 * v.abs().max(1.0), "case {case}: {v} vs {}", s.value);
            }
            (Err(minilp::Error::Infeasible), LpOutcome::Infeasible) => infeasible += 1,
            (Err(minilp::Error::Unbounded), LpOutcome::Unbounded) => unbounded += 1,
            (theirs, ours) => panic!("case {case}: external {theirs:?}, ours {ours:?}\n{spec:?}"),
        }
    }
    assert!(optimal > 100 && infeasible > 10 && unbounded > 0, "{optimal} {infeasible} {unbounded}");
}

#[test]
fn duals_certify_optimality() {
    // non-negative variables only, so the dual system is the textbook one
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut checked = 0;
    for _ in 0..400 {
        let mut spec = random_lp(&mut rng);
        for j in 0..spec.num_vars() {
            spec.set_bounds(j, Bounds::NON_NEGATIVE);
        }
        let Some(sol) = solve_lp(&spec).unwrap().optimal() else {
            continue;
        };
        checked += 1;
        let sign = match spec.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let by: f64 = spec.constraints.iter().zip(&sol.duals).map(|(c, y)| c.rhs * y).sum();
        assert!((by - sol.value).abs() <= TOL * sol.value.abs().max(1.0));
        for j in 0..spec.num_vars() {
            let reduced: f64 = spec.objective[j]
                - spec
                    .constraints
                    .iter()
                    .zip(&sol.duals)
                    .map(|(c, y)| c.coefficients[j] * y)
                    .sum::<f64>();
            assert!(sign * reduced >= -TOL, "reduced cost {reduced}");
        }
        for (c, y) in spec.constraints.iter().zip(&sol.duals) {
            match c.relation {
                Relation::Le => assert!(sign * y <= TOL),
                Relation::Ge => assert!(sign * y >= -TOL),
                Relation::Eq => {}
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn natural_lp_matches_external_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let m = rng.random_range(1..=6);
        let k = rng.random_range(1..=3);
        let inst = gen_uniform(rng.random_range(0..=4), m, k, Mode::Ucm, rng.random()).unwrap();
        let reduced = inst.alpha().reduced();
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let x: Vec<Vec<_>> = (0..m)
            .map(|_| (0..m).map(|_| p.add_var(0.0, (0.0, k as f64))).collect())
            .collect();
        let t = p.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        for j in 0..m {
            p.add_constraint((0..m).map(|i| (x[i][j], 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, k as f64);
            p.add_constraint((0..m).map(|i| (x[j][i], 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, k as f64);
        }
        for (i, &s) in inst.sigma().iter().enumerate() {
            let mut row: Vec<_> = (0..m).map(|j| (x[i][j], reduced[j] as f64)).collect();
            row.push((t, -1.0));
            p.add_constraint(row, ComparisonOp::Le, -(s as f64));
        }
        let theirs = p.solve().unwrap().objective();
        let ours = natural_lp_value(&inst).unwrap();
        assert!((theirs - ours).abs() < 1e-6, "{theirs} vs {ours}");
    }
}

fn all_configurations(inst: &ProblemInstance, mode: Mode, i: usize, bound: u64) -> Vec<Configuration> {
    let (m, k) = (inst.m(), inst.k());
    let mut out = Vec::new();
    for code in 0..m.pow(k as u32) {
        let mut rest = code;
        let seq: Vec<usize> = (0..k)
            .map(|_| {
                let j = rest % m;
                rest /= m;
                j
            })
            .collect();
        let config = match mode {
            Mode::Wcm => Configuration::Sequence(SequenceConfiguration::new(seq)),
            Mode::Ucm => {
                if seq.windows(2).any(|w| w[0] > w[1]) {
                    continue;
                }
                let mut counts = vec![0; m];
                seq.iter().for_each(|&j| counts[j] += 1);
                Configuration::Count(CountConfiguration::new(counts))
            }
        };
        if inst.sigma()[i] + config.cost(inst) <= bound {
            out.push(config);
        }
    }
    out
}

/// Feasibility of the full configuration LP, every column listed.
fn explicit_feasible(inst: &ProblemInstance, mode: Mode, bound: u64) -> bool {
    let (m, k) = (inst.m(), inst.k());
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let mut coverage: Vec<Vec<(minilp::Variable, f64)>> = vec![Vec::new(); m * k];
    for i in 0..m {
        let configs = all_configurations(inst, mode, i, bound);
        if configs.is_empty() {
            return false;
        }
        let mut own = Vec::new();
        for c in configs {
            let v = p.add_var(0.0, (0.0, f64::INFINITY));
            own.push((v, 1.0));
            match &c {
                Configuration::Count(c) => {
                    for (j, &n) in c.counts().iter().enumerate() {
                        if n > 0 {
                            coverage[j].push((v, n as f64));
                        }
                    }
                }
                Configuration::Sequence(s) => {
                    for (l, &j) in s.indices().iter().enumerate() {
                        coverage[j * k + l].push((v, 1.0));
                    }
                }
            }
        }
        p.add_constraint(own, ComparisonOp::Eq, 1.0);
    }
    let (rows, demand) = match mode {
        Mode::Ucm => (m, k as f64),
        Mode::Wcm => (m * k, 1.0),
    };
    for row in coverage.into_iter().take(rows) {
        if row.is_empty() {
            return false;
        }
        p.add_constraint(row, ComparisonOp::Eq, demand);
    }
    p.solve().is_ok()
}

#[test]
fn column_generation_matches_explicit_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for case in 0..40 {
        let mode = if case % 2 == 0 { Mode::Ucm } else { Mode::Wcm };
        let m = rng.random_range(1..=4);
        let k = rng.random_range(1..=3);
        let inst = gen_uniform(rng.random_range(0..=3), m, k, mode, rng.random()).unwrap();
        let upper = max_nonpreferred_score(&inst, &reverse(&inst)).unwrap();
        let lower = bound_floor(&inst).saturating_sub(2);
        let explicit_min = (lower..=upper)
            .find(|&t| explicit_feasible(&inst, mode, t))
            .expect("REVERSE bound is feasible");
        for t in lower..=upper {
            let probe = clp_feasible(&inst, t, mode, &ClpOptions::default()).unwrap();
            assert_eq!(probe.feasible, t >= explicit_min, "case {case} bound {t}");
            if let Some(sol) = probe.solution {
                sol.validate(&inst, 1e-6).unwrap();
            }
        }
        let (t_clp, _) = min_feasible_t(&inst, mode, &ClpOptions::default()).unwrap();
        assert_eq!(t_clp, explicit_min, "case {case}");
    }
}

fn brute_violations(inst: &ProblemInstance, bound: u64, point: &DualPoint, mode: Mode) -> Vec<usize> {
    (0..inst.m())
        .filter(|&i| {
            all_configurations(inst, mode, i, bound).iter().any(|c| {
                let value: f64 = match (c, &point.z) {
                    (Configuration::Count(c), ScorePrices::Ucm(z)) => {
                        c.counts().iter().zip(z).map(|(&n, z)| n as f64 * z).sum()
                    }
                    (Configuration::Sequence(s), ScorePrices::Wcm(z)) => {
                        s.indices().iter().enumerate().map(|(l, &j)| z[j][l]).sum()
                    }
                    _ => unreachable!(),
                };
                value > point.y[i] + 1e-7 * point.y[i].abs().max(1.0)
            })
        })
        .collect()
}

#[test]
fn separation_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for case in 0..300 {
        let mode = if case % 2 == 0 { Mode::Ucm } else { Mode::Wcm };
        let m = rng.random_range(1..=4);
        let k = rng.random_range(1..=3);
        let inst = gen_uniform(rng.random_range(0..=3), m, k, mode, rng.random()).unwrap();
        let bound = bound_floor(&inst) + rng.random_range(0..=6);
        let quarter = |rng: &mut ChaCha8Rng| rng.random_range(0..=12) as f64 / 4.0;
        let y = (0..m).map(|_| quarter(&mut rng)).collect();
        let z = match mode {
            Mode::Ucm => ScorePrices::Ucm((0..m).map(|_| quarter(&mut rng)).collect()),
            Mode::Wcm => {
                ScorePrices::Wcm((0..m).map(|_| (0..k).map(|_| quarter(&mut rng)).collect()).collect())
            }
        };
        let point = DualPoint { y, z };
        let found = separate(&inst, bound, &point, mode).unwrap();
        let candidates: Vec<usize> = found.iter().map(|(i, _)| *i).collect();
        assert_eq!(candidates, brute_violations(&inst, bound, &point, mode), "case {case}");
        for (i, c) in found {
            assert!(inst.sigma()[i] + c.cost(&inst) <= bound);
        }
    }
}

#[test]
fn sampling_follows_weights() {
    let a = Configuration::Count(CountConfiguration::new(vec![1, 0]));
    let b = Configuration::Count(CountConfiguration::new(vec![0, 1]));
    let sol = FractionalSolution {
        bound: 0,
        assignments: vec![vec![(a.clone(), 0.7), (b, 0.3)]],
    };
    let hits = (0..10_000u64)
        .filter(|&seed| sample_configurations(&sol, seed).unwrap()[0] == a)
        .count();
    let freq = hits as f64 / 10_000.0;
    assert!((0.66..=0.74).contains(&freq), "{freq}");
    assert_eq!(sample_configurations(&sol, 3).unwrap(), sample_configurations(&sol, 3).unwrap());
}

#[test]
fn weighted_clp_is_a_relaxation() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..20 {
        let inst = gen_uniform(3, rng.random_range(2..=5), rng.random_range(1..=3), Mode::Wcm, rng.random())
            .unwrap();
        let (t, _) = min_feasible_t(&inst, Mode::Wcm, &ClpOptions::default()).unwrap();
        assert!(t <= max_nonpreferred_score(&inst, &reverse(&inst)).unwrap());
        assert!(t >= bound_floor(&inst));
    }
    let unit = ProblemInstance::unweighted(ScoringVector::borda(3), vec![0, 0, 0], 2, None).unwrap();
    assert_eq!(min_feasible_t(&unit, Mode::Wcm, &ClpOptions::default()).unwrap().0, 2);
}
