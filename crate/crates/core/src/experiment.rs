//! Random electorates and the comparison grid.

use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{average_fit, exact_bruteforce, largest_fit, reverse, ExactLimits};
use crate::error::{Error, Result};
use crate::model::{max_nonpreferred_score, Mode, ProblemInstance, ScoringVector};
use crate::pipeline::{solve, SolveOptions};

/// Borda electorate: `n` uniformly random ballots over the `m` candidates and
/// `p`, then `k` manipulators (weights from `{1, 2}` in WCM).
pub fn gen_uniform(n: usize, m: usize, k: usize, mode: Mode, seed: u64) -> Result<ProblemInstance> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidInstance("m and k must be at least 1".into()));
    }
    let alpha = ScoringVector::borda(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma = vec![0u64; m];
    let mut sigma_p = 0;
    // position m of the ballot is p
    let mut ballot: Vec<usize> = (0..=m).collect();
    for _ in 0..n {
        ballot.shuffle(&mut rng);
        for (c, &pos) in ballot.iter().enumerate() {
            let points = alpha.score(pos);
            if c == m {
                sigma_p += points;
            } else {
                sigma[c] += points;
            }
        }
    }
    let weights = match mode {
        Mode::Ucm => vec![1; k],
        Mode::Wcm => (0..k).map(|_| rng.random_range(1..=2)).collect(),
    };
    ProblemInstance::new(alpha, sigma, weights, Some(sigma_p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub mode: Mode,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub cells: Vec<GridCell>,
}

impl ExperimentGrid {
    /// `k = ⌊√m⌋`, `n = 2k` for every `m`.
    pub fn square_root(ms: &[usize], trials: usize, mode: Mode, seed: u64) -> Self {
        let cells = ms
            .iter()
            .map(|&m| {
                let k = (m as f64).sqrt().floor().max(1.0) as usize;
                GridCell {
                    m,
                    k,
                    n: 2 * k,
                    trials,
                    mode,
                    seed,
                }
            })
            .collect();
        Self { cells }
    }

    pub fn default_grid(mode: Mode, seed: u64) -> Self {
        Self::square_root(&[9, 16, 25, 36], 20, mode, seed)
    }

    fn validate(&self) -> Result<()> {
        for c in &self.cells {
            if c.trials == 0 || c.m == 0 || c.k == 0 || c.n == 0 {
                return Err(Error::InvalidInstance(format!(
                    "grid cell m={} k={} n={} trials={} must be positive",
                    c.m, c.k, c.n, c.trials
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub mode: Mode,
    pub trial: usize,
    pub seed: u64,
    pub t_clp: u64,
    pub clp_score: u64,
    pub reverse_score: u64,
    pub avgfit_score: Option<u64>,
    pub largestfit_score: Option<u64>,
    pub exact_t_star: Option<u64>,
    /// Wall-clock seconds of the C-LP pipeline, REVERSE, Average Fit,
    /// Largest Fit and the exact oracle; absent unless timings were requested.
    pub runtimes: Option<[f64; 5]>,
}

impl TrialRecord {
    /// The baseline the C-LP result is judged against.
    pub fn competitor_score(&self) -> u64 {
        match self.mode {
            Mode::Ucm => self.avgfit_score.unwrap_or(self.reverse_score),
            Mode::Wcm => self.reverse_score,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridOptions {
    pub solve: SolveOptions,
    pub timings: bool,
    pub exact_limits: ExactLimits,
}

fn trial_seed(cell: &GridCell, trial: usize) -> u64 {
    let key = ((cell.m as u64) << 42) ^ ((cell.k as u64) << 21) ^ trial as u64;
    cell.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ key
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn run_trial(cell: &GridCell, trial: usize, options: &GridOptions) -> Result<TrialRecord> {
    let seed = trial_seed(cell, trial);
    let instance = gen_uniform(cell.n, cell.m, cell.k, cell.mode, seed)?;
    let solve_options = SolveOptions {
        seed,
        ..options.solve.clone()
    };
    let (report, clp_secs) = timed(|| solve(&instance, cell.mode, &solve_options));
    let report = report?;
    let (rev, rev_secs) = timed(|| reverse(&instance));
    let reverse_score = max_nonpreferred_score(&instance, &rev)?;

    let (mut avgfit_score, mut largestfit_score) = (None, None);
    let (mut avg_secs, mut largest_secs) = (0.0, 0.0);
    if cell.mode == Mode::Ucm {
        let (s, t) = timed(|| average_fit(&instance));
        avgfit_score = Some(max_nonpreferred_score(&instance, &s?)?);
        avg_secs = t;
        let (s, t) = timed(|| largest_fit(&instance));
        largestfit_score = Some(max_nonpreferred_score(&instance, &s?)?);
        largest_secs = t;
    }
    let limits = options.exact_limits;
    let (exact_t_star, exact_secs) = if cell.m <= limits.max_m && cell.k <= limits.max_k {
        let (r, t) = timed(|| exact_bruteforce(&instance, limits));
        (Some(r?.t_star), t)
    } else {
        (None, 0.0)
    };
    Ok(TrialRecord {
        m: cell.m,
        k: cell.k,
        n: cell.n,
        mode: cell.mode,
        trial,
        seed,
        t_clp: report.t_clp,
        clp_score: report.achieved,
        reverse_score,
        avgfit_score,
        largestfit_score,
        exact_t_star,
        runtimes: options
            .timings
            .then_some([clp_secs, rev_secs, avg_secs, largest_secs, exact_secs]),
    })
}

/// Runs every trial of every cell in parallel; records come back in grid
/// order.
pub fn run_grid(grid: &ExperimentGrid, options: &GridOptions) -> Result<Vec<TrialRecord>> {
    grid.validate()?;
    let jobs: Vec<(&GridCell, usize)> = grid
        .cells
        .iter()
        .flat_map(|c| (0..c.trials).map(move |t| (c, t)))
        .collect();
    jobs.par_iter()
        .map(|&(cell, trial)| run_trial(cell, trial, options))
        .collect()
}

pub const CSV_HEADER: [&str; 17] = [
    "m",
    "k",
    "n",
    "mode",
    "trial",
    "seed",
    "t_clp",
    "clp_score",
    "reverse_score",
    "avgfit_score",
    "largestfit_score",
    "exact_t_star",
    "clp_secs",
    "reverse_secs",
    "avgfit_secs",
    "largestfit_secs",
    "exact_secs",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let mut row = vec![
            r.m.to_string(),
            r.k.to_string(),
            r.n.to_string(),
            r.mode.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.t_clp.to_string(),
            r.clp_score.to_string(),
            r.reverse_score.to_string(),
            opt(r.avgfit_score),
            opt(r.largestfit_score),
            opt(r.exact_t_star),
        ];
        match r.runtimes {
            Some(times) => row.extend(times.iter().map(|t| format!("{t:.6}"))),
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Outcome counts for one `(m, k)` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub m: usize,
    pub k: usize,
    pub mode: Mode,
    pub trials: usize,
    /// Rounding did not lose anything: `clp_score == t_clp`.
    pub clp_at_bound: usize,
    pub clp_better: usize,
    pub competitor_better: usize,
    pub clp_not_worse_than_reverse: usize,
}

pub fn summarize(records: &[TrialRecord]) -> Vec<Summary> {
    let mut out: Vec<Summary> = Vec::new();
    for r in records {
        let idx = match out
            .iter()
            .position(|s| s.m == r.m && s.k == r.k && s.mode == r.mode)
        {
            Some(i) => i,
            None => {
                out.push(Summary {
                    m: r.m,
                    k: r.k,
                    mode: r.mode,
                    trials: 0,
                    clp_at_bound: 0,
                    clp_better: 0,
                    competitor_better: 0,
                    clp_not_worse_than_reverse: 0,
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        let competitor = r.competitor_score();
        s.trials += 1;
        s.clp_at_bound += usize::from(r.clp_score == r.t_clp);
        s.clp_better += usize::from(r.clp_score < competitor);
        s.competitor_better += usize::from(competitor < r.clp_score);
        s.clp_not_worse_than_reverse += usize::from(r.clp_score <= r.reverse_score);
    }
    out
}

pub fn write_summary<W: Write>(summaries: &[Summary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}
