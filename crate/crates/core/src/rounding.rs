//! Randomized rounding of a configuration LP solution.
//!
//! Every candidate draws one configuration from its fractional weights; the
//! joint draw generally over- or under-uses score types, which the fixing
//! passes repair by re-ranking all score events.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    g_alpha, max_nonpreferred_score, Configuration, CountConfiguration, FractionalSolution,
    ManipulationMatrix, Mode, ProblemInstance, SequenceConfiguration,
};
use crate::rearrange::rearrange_to_valid;

/// One received score: candidate, voter (sequence configurations only) and
/// score index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreEvent {
    pub candidate: usize,
    pub voter: Option<usize>,
    pub score_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    pub matrix: ManipulationMatrix,
    pub achieved: u64,
    pub per_repeat: Vec<u64>,
    pub seed: u64,
}

fn stream_rng(seed: u64, repeat: usize, candidate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((repeat as u64) << 32) | candidate as u64);
    rng
}

/// Draws one configuration per candidate with probability proportional to its
/// (clamped) weight.
pub fn sample_configurations(solution: &FractionalSolution, seed: u64) -> Result<Vec<Configuration>> {
    sample_repeat(solution, seed, 0)
}

pub(crate) fn sample_repeat(
    solution: &FractionalSolution,
    seed: u64,
    repeat: usize,
) -> Result<Vec<Configuration>> {
    solution
        .assignments
        .iter()
        .enumerate()
        .map(|(i, support)| {
            let total: f64 = support.iter().map(|(_, x)| x.max(0.0)).sum();
            if support.is_empty() || total <= 0.0 {
                return Err(Error::EmptySupport(i));
            }
            let draw = stream_rng(seed, repeat, i).random::<f64>() * total;
            let mut acc = 0.0;
            for (config, x) in support {
                acc += x.max(0.0);
                if draw < acc {
                    return Ok(config.clone());
                }
            }
            let (last, _) = support
                .iter()
                .rev()
                .find(|(_, x)| *x > 0.0)
                .expect("positive total has a positive entry");
            Ok(last.clone())
        })
        .collect()
}

/// Largest upward move of a single score event during [`fix_ucm`], and the
/// largest cost increase any candidate saw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixAudit {
    pub max_displacement: usize,
    pub worst_increase: u64,
}

/// Re-ranks all `k·m` events by score index (ties: larger current total
/// first, then smaller candidate) and gives rank `l` the index `l / k`.
pub fn fix_ucm(configs: &[CountConfiguration], instance: &ProblemInstance) -> Result<ManipulationMatrix> {
    fix_ucm_audited(configs, instance).map(|(matrix, _)| matrix)
}

pub fn fix_ucm_audited(
    configs: &[CountConfiguration],
    instance: &ProblemInstance,
) -> Result<(ManipulationMatrix, FixAudit)> {
    let (m, k) = (instance.m(), instance.k());
    if configs.len() != m || configs.iter().any(|c| c.counts().len() != m || c.size() != k) {
        return Err(Error::DimensionMismatch(format!(
            "expected {m} count configurations of size {k} over {m} score types"
        )));
    }
    let alpha = instance.alpha();
    let totals: Vec<u64> = configs
        .iter()
        .zip(instance.sigma())
        .map(|(c, &s)| s + c.cost(alpha))
        .collect();
    let mut events: Vec<ScoreEvent> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            c.expand().into_iter().map(move |j| ScoreEvent {
                candidate: i,
                voter: None,
                score_index: j,
            })
        })
        .collect();
    events.sort_by(|a, b| {
        a.score_index
            .cmp(&b.score_index)
            .then(totals[b.candidate].cmp(&totals[a.candidate]))
            .then(a.candidate.cmp(&b.candidate))
    });

    let reduced = alpha.reduced();
    let mut columns = vec![Vec::with_capacity(k); m];
    let mut increase = vec![0i64; m];
    let mut max_displacement = 0;
    for (rank, e) in events.iter().enumerate() {
        let j = rank / k;
        columns[e.candidate].push(j);
        increase[e.candidate] += reduced[j] as i64 - reduced[e.score_index] as i64;
        max_displacement = max_displacement.max(j.saturating_sub(e.score_index));
    }
    let audit = FixAudit {
        max_displacement,
        worst_increase: increase.into_iter().max().unwrap_or(0).max(0) as u64,
    };
    // each event moves up by at most the displacement, so no candidate can
    // gain more than k steps of that width
    assert!(
        audit.worst_increase <= k as u64 * g_alpha(alpha, audit.max_displacement),
        "rank displacement audit failed"
    );
    Ok((ManipulationMatrix::relaxed_from_columns(&columns)?, audit))
}

/// Voter by voter, re-ranks the `m` events of that voter by score index
/// (ties: larger running total first, then smaller candidate) and gives rank
/// `r` the index `r`. Totals are updated as voters are fixed.
pub fn fix_wcm(
    configs: &[SequenceConfiguration],
    instance: &ProblemInstance,
) -> Result<ManipulationMatrix> {
    let (m, k) = (instance.m(), instance.k());
    if configs.len() != m
        || configs
            .iter()
            .any(|c| c.indices().len() != k || c.indices().iter().any(|&j| j >= m))
    {
        return Err(Error::DimensionMismatch(format!(
            "expected {m} sequence configurations of length {k} over {m} score types"
        )));
    }
    let reduced = instance.alpha().reduced();
    let weights = instance.weights();
    let mut totals: Vec<u64> = configs
        .iter()
        .zip(instance.sigma())
        .map(|(c, &s)| s + c.cost(instance.alpha(), weights))
        .collect();
    let mut rows = Vec::with_capacity(k);
    for (l, &w) in weights.iter().enumerate() {
        let mut events: Vec<ScoreEvent> = (0..m)
            .map(|i| ScoreEvent {
                candidate: i,
                voter: Some(l),
                score_index: configs[i].indices()[l],
            })
            .collect();
        events.sort_by(|a, b| {
            a.score_index
                .cmp(&b.score_index)
                .then(totals[b.candidate].cmp(&totals[a.candidate]))
                .then(a.candidate.cmp(&b.candidate))
        });
        let mut row = vec![0; m];
        for (rank, e) in events.iter().enumerate() {
            row[e.candidate] = rank;
            totals[e.candidate] = totals[e.candidate] - w * reduced[e.score_index] + w * reduced[rank];
        }
        rows.push(row);
    }
    ManipulationMatrix::valid(rows)
}

fn round_once(
    solution: &FractionalSolution,
    instance: &ProblemInstance,
    seed: u64,
    repeat: usize,
    mode: Mode,
) -> Result<ManipulationMatrix> {
    let drawn = sample_repeat(solution, seed, repeat)?;
    let wrong = || Error::InvalidSolution(format!("configuration kind does not match mode {mode}"));
    match mode {
        Mode::Ucm => {
            let configs = drawn
                .iter()
                .map(|c| c.as_count().cloned().ok_or_else(wrong))
                .collect::<Result<Vec<_>>>()?;
            rearrange_to_valid(&fix_ucm(&configs, instance)?, instance)
        }
        Mode::Wcm => {
            let configs = drawn
                .iter()
                .map(|c| c.as_sequence().cloned().ok_or_else(wrong))
                .collect::<Result<Vec<_>>>()?;
            fix_wcm(&configs, instance)
        }
    }
}

/// Runs `repeats` independent roundings and keeps the one with the smallest
/// maximum score; the earliest repeat wins ties.
pub fn round_best_of(
    solution: &FractionalSolution,
    instance: &ProblemInstance,
    repeats: usize,
    seed: u64,
    mode: Mode,
) -> Result<RoundingReport> {
    if repeats == 0 {
        return Err(Error::InvalidInstance("at least one rounding repeat is required".into()));
    }
    if solution.assignments.len() != instance.m() {
        return Err(Error::DimensionMismatch(
            "solution does not cover every candidate".into(),
        ));
    }
    let runs = (0..repeats)
        .into_par_iter()
        .map(|r| {
            let matrix = round_once(solution, instance, seed, r, mode)?;
            let score = max_nonpreferred_score(instance, &matrix)?;
            Ok((matrix, score))
        })
        .collect::<Result<Vec<_>>>()?;
    let per_repeat: Vec<u64> = runs.iter().map(|(_, s)| *s).collect();
    let best = (0..runs.len())
        .min_by_key(|&r| (per_repeat[r], r))
        .expect("at least one repeat");
    let (matrix, achieved) = runs.into_iter().nth(best).expect("index in range");
    Ok(RoundingReport {
        matrix,
        achieved,
        per_repeat,
        seed,
    })
}
