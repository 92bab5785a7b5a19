//! Domain types for the reduced min-max manipulation problem.
//!
//! The preferred candidate `p` is discarded up front: it receives the top
//! score from every manipulator, so only the `m` remaining candidates and
//! the reduced rule vector `α₀ … α_{m-1}` take part in the optimization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positional scoring rule `α₀ ≤ α₁ ≤ … ≤ α_m`.
///
/// A voter awards `α_j` to the candidate ranked `(m - j)`-th, so index `m`
/// is the top score and index `0` the bottom one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct ScoringVector {
    entries: Vec<u64>,
}

impl ScoringVector {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidScoringVector(format!(
                "need at least two entries, got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidScoringVector(format!(
                "entries must be non-decreasing (α[{}]={} > α[{}]={})",
                pos,
                entries[pos],
                pos + 1,
                entries[pos + 1]
            )));
        }
        Ok(Self { entries })
    }

    /// Borda over `m + 1` candidates: `(0, 1, …, m)`.
    pub fn borda(m: usize) -> Self {
        assert!(m >= 1, "borda needs at least one non-preferred candidate");
        Self {
            entries: (0..=m as u64).collect(),
        }
    }

    /// Number of non-preferred candidates.
    pub fn m(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// `α₀ … α_{m-1}`; `α_m` is reserved for `p`.
    pub fn reduced(&self) -> &[u64] {
        &self.entries[..self.m()]
    }

    pub fn top(&self) -> u64 {
        self.entries[self.m()]
    }

    pub fn score(&self, index: usize) -> u64 {
        self.entries[index]
    }
}

impl TryFrom<Vec<u64>> for ScoringVector {
    type Error = Error;

    fn try_from(entries: Vec<u64>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<ScoringVector> for Vec<u64> {
    fn from(alpha: ScoringVector) -> Self {
        alpha.entries
    }
}

/// Which flavour of the problem a solver works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Unweighted coalitional manipulation; configurations are count vectors.
    Ucm,
    /// Weighted coalitional manipulation; configurations are per-voter sequences.
    Wcm,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ucm => "ucm",
            Mode::Wcm => "wcm",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ucm" => Ok(Mode::Ucm),
            "wcm" => Ok(Mode::Wcm),
            other => Err(format!("unknown mode `{other}` (expected ucm or wcm)")),
        }
    }
}

#[derive(Deserialize)]
struct RawInstance {
    alpha: ScoringVector,
    sigma: Vec<u64>,
    sigma_p: Option<u64>,
    weights: Vec<u64>,
}

/// Reduced manipulation instance: initial scores of the `m` non-preferred
/// candidates, manipulator weights, the rule and optionally `p`'s initial score.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct ProblemInstance {
    alpha: ScoringVector,
    sigma: Vec<u64>,
    sigma_p: Option<u64>,
    weights: Vec<u64>,
}

impl TryFrom<RawInstance> for ProblemInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Self::new(raw.alpha, raw.sigma, raw.weights, raw.sigma_p)
    }
}

impl ProblemInstance {
    pub fn new(
        alpha: ScoringVector,
        sigma: Vec<u64>,
        weights: Vec<u64>,
        sigma_p: Option<u64>,
    ) -> Result<Self> {
        if sigma.len() != alpha.m() {
            return Err(Error::InvalidInstance(format!(
                "rule vector covers {} non-preferred candidates but sigma has {}",
                alpha.m(),
                sigma.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::InvalidInstance("need at least one manipulator".into()));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidInstance("manipulator weights must be positive".into()));
        }
        Ok(Self {
            alpha,
            sigma,
            sigma_p,
            weights,
        })
    }

    /// Instance with `k` unit-weight manipulators.
    pub fn unweighted(
        alpha: ScoringVector,
        sigma: Vec<u64>,
        k: usize,
        sigma_p: Option<u64>,
    ) -> Result<Self> {
        Self::new(alpha, sigma, vec![1; k], sigma_p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn alpha(&self) -> &ScoringVector {
        &self.alpha
    }

    pub fn sigma(&self) -> &[u64] {
        &self.sigma
    }

    pub fn sigma_p(&self) -> Option<u64> {
        self.sigma_p
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn m(&self) -> usize {
        self.sigma.len()
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// `W`, the sum of manipulator weights.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    /// Copy with a different initial score profile.
    pub fn with_sigma(&self, sigma: Vec<u64>) -> Result<Self> {
        Self::new(self.alpha.clone(), sigma, self.weights.clone(), self.sigma_p)
    }

    pub(crate) fn require_unweighted(&self, what: &'static str) -> Result<()> {
        if self.is_unweighted() {
            Ok(())
        } else {
            Err(Error::RequiresUnweighted(what))
        }
    }
}

/// Scores one candidate receives, as counts per score type (UCM).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CountConfiguration {
    counts: Vec<usize>,
}

impl CountConfiguration {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of scores in the bundle; `k` for a well-formed configuration.
    pub fn size(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn cost(&self, alpha: &ScoringVector) -> u64 {
        self.counts
            .iter()
            .zip(alpha.reduced())
            .map(|(&c, &a)| c as u64 * a)
            .sum()
    }

    /// Score indices in ascending order, each repeated by its count.
    pub fn expand(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(j, c))
            .collect()
    }
}

/// Per-voter score indices one candidate receives (WCM).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SequenceConfiguration {
    indices: Vec<usize>,
}

impl SequenceConfiguration {
    pub fn new(indices: Vec<usize>) -> Self {
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn cost(&self, alpha: &ScoringVector, weights: &[u64]) -> u64 {
        self.indices
            .iter()
            .zip(weights)
            .map(|(&j, &w)| w * alpha.score(j))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Configuration {
    Count(CountConfiguration),
    Sequence(SequenceConfiguration),
}

impl Configuration {
    pub fn cost(&self, instance: &ProblemInstance) -> u64 {
        match self {
            Configuration::Count(c) => c.cost(instance.alpha()),
            Configuration::Sequence(s) => s.cost(instance.alpha(), instance.weights()),
        }
    }

    pub fn as_count(&self) -> Option<&CountConfiguration> {
        match self {
            Configuration::Count(c) => Some(c),
            Configuration::Sequence(_) => None,
        }
    }

    pub fn as_sequence(&self) -> Option<&SequenceConfiguration> {
        match self {
            Configuration::Sequence(s) => Some(s),
            Configuration::Count(_) => None,
        }
    }
}

/// Configuration LP solution at a fixed bound `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    pub bound: u64,
    /// `assignments[i]` lists `(C, x_{i,C})` for candidate `i`.
    pub assignments: Vec<Vec<(Configuration, f64)>>,
}

impl FractionalSolution {
    /// Checks the configuration LP constraints: every listed configuration fits
    /// under `bound - σ_i`, weights sum to one per candidate and every score
    /// type (per voter in WCM) is covered exactly, all within `eps`.
    pub fn validate(&self, instance: &ProblemInstance, eps: f64) -> Result<()> {
        let m = instance.m();
        let k = instance.k();
        if self.assignments.len() != m {
            return Err(Error::InvalidSolution(format!(
                "{} candidate entries for {} candidates",
                self.assignments.len(),
                m
            )));
        }
        let mut coverage_ucm = vec![0.0; m];
        let mut coverage_wcm = vec![vec![0.0; k]; m];
        for (i, support) in self.assignments.iter().enumerate() {
            let mut total = 0.0;
            for (config, x) in support {
                if *x < -eps {
                    return Err(Error::InvalidSolution(format!(
                        "negative weight {x} for candidate {i}"
                    )));
                }
                let cap = self.bound.checked_sub(instance.sigma()[i]);
                if cap.is_none_or(|cap| config.cost(instance) > cap) {
                    return Err(Error::InvalidSolution(format!(
                        "configuration of candidate {i} exceeds the bound {}",
                        self.bound
                    )));
                }
                total += x;
                match config {
                    Configuration::Count(c) => {
                        if c.counts().len() != m || c.size() != k {
                            return Err(Error::InvalidSolution(format!(
                                "malformed count configuration for candidate {i}"
                            )));
                        }
                        for (j, &cnt) in c.counts().iter().enumerate() {
                            coverage_ucm[j] += cnt as f64 * x;
                        }
                    }
                    Configuration::Sequence(s) => {
                        if s.indices().len() != k || s.indices().iter().any(|&j| j >= m) {
                            return Err(Error::InvalidSolution(format!(
                                "malformed sequence configuration for candidate {i}"
                            )));
                        }
                        for (l, &j) in s.indices().iter().enumerate() {
                            coverage_wcm[j][l] += x;
                        }
                    }
                }
            }
            if (total - 1.0).abs() > eps {
                return Err(Error::InvalidSolution(format!(
                    "weights of candidate {i} sum to {total}"
                )));
            }
        }
        let is_count = self
            .assignments
            .iter()
            .flatten()
            .next()
            .is_some_and(|(c, _)| c.as_count().is_some());
        if is_count {
            for (j, &cov) in coverage_ucm.iter().enumerate() {
                if (cov - k as f64).abs() > eps * (k as f64).max(1.0) * m as f64 {
                    return Err(Error::InvalidSolution(format!(
                        "score type {j} covered {cov} times, expected {k}"
                    )));
                }
            }
        } else {
            for (j, row) in coverage_wcm.iter().enumerate() {
                for (l, &cov) in row.iter().enumerate() {
                    if (cov - 1.0).abs() > eps * m as f64 {
                        return Err(Error::InvalidSolution(format!(
                            "score type {j} of voter {l} covered {cov} times"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    /// Every score index appears exactly `k` times over the matrix.
    Relaxed,
    /// Every row is a permutation of the score indices.
    Valid,
}

#[derive(Deserialize)]
struct RawMatrix {
    entries: Vec<Vec<usize>>,
    validity: Validity,
}

/// `k × m` matrix of score indices; `entries[l][i]` is the index of the score
/// voter `l` gives candidate `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct ManipulationMatrix {
    entries: Vec<Vec<usize>>,
    validity: Validity,
}

impl TryFrom<RawMatrix> for ManipulationMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        match raw.validity {
            Validity::Relaxed => Self::relaxed(raw.entries),
            Validity::Valid => Self::valid(raw.entries),
        }
    }
}

impl ManipulationMatrix {
    /// Builds a relaxed matrix, checking that each score index occurs exactly
    /// `k` times.
    pub fn relaxed(entries: Vec<Vec<usize>>) -> Result<Self> {
        let (k, m) = check_shape(&entries)?;
        let mut histogram = vec![0usize; m];
        for &j in entries.iter().flatten() {
            if j >= m {
                return Err(Error::InvalidMatrix(format!("score index {j} out of range")));
            }
            histogram[j] += 1;
        }
        if let Some(j) = histogram.iter().position(|&h| h != k) {
            return Err(Error::InvalidMatrix(format!(
                "score index {j} appears {} times, expected {k}",
                histogram[j]
            )));
        }
        Ok(Self {
            entries,
            validity: Validity::Relaxed,
        })
    }

    /// Builds a valid matrix, checking that each row is a permutation.
    pub fn valid(entries: Vec<Vec<usize>>) -> Result<Self> {
        let (_, m) = check_shape(&entries)?;
        for (l, row) in entries.iter().enumerate() {
            let mut seen = vec![false; m];
            for &j in row {
                if j >= m || std::mem::replace(&mut seen[j], true) {
                    return Err(Error::InvalidMatrix(format!("row {l} is not a permutation")));
                }
            }
        }
        Ok(Self {
            entries,
            validity: Validity::Valid,
        })
    }

    /// Relaxed matrix whose column `i` holds `columns[i]` (each of length `k`).
    pub fn relaxed_from_columns(columns: &[Vec<usize>]) -> Result<Self> {
        let k = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != k) {
            return Err(Error::InvalidMatrix("columns differ in length".into()));
        }
        let entries = (0..k)
            .map(|l| columns.iter().map(|c| c[l]).collect())
            .collect();
        Self::relaxed(entries)
    }

    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }

    pub fn validity(&self) -> Validity {
        self.validity
    }

    pub fn is_valid(&self) -> bool {
        self.validity == Validity::Valid
    }

    /// Number of manipulators (rows).
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    /// Number of candidates (columns).
    pub fn m(&self) -> usize {
        self.entries[0].len()
    }

    pub fn column(&self, candidate: usize) -> Vec<usize> {
        self.entries.iter().map(|row| row[candidate]).collect()
    }

    /// Sorted score indices received by `candidate`.
    pub fn column_multiset(&self, candidate: usize) -> Vec<usize> {
        let mut col = self.column(candidate);
        col.sort_unstable();
        col
    }
}

fn check_shape(entries: &[Vec<usize>]) -> Result<(usize, usize)> {
    let k = entries.len();
    if k == 0 {
        return Err(Error::InvalidMatrix("matrix has no rows".into()));
    }
    let m = entries[0].len();
    if m == 0 || entries.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidMatrix("rows must be non-empty and of equal length".into()));
    }
    Ok((k, m))
}

fn check_dimensions(instance: &ProblemInstance, matrix: &ManipulationMatrix) -> Result<()> {
    if matrix.k() != instance.k() || matrix.m() != instance.m() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but instance has k={} and m={}",
            matrix.k(),
            matrix.m(),
            instance.k(),
            instance.m()
        )));
    }
    Ok(())
}

/// `σ_i + Σ_l w_l · α_{S[l][i]}` for every non-preferred candidate.
pub fn candidate_final_scores(
    instance: &ProblemInstance,
    matrix: &ManipulationMatrix,
) -> Result<Vec<u64>> {
    check_dimensions(instance, matrix)?;
    let alpha = instance.alpha();
    let mut totals = instance.sigma().to_vec();
    for (row, &w) in matrix.entries().iter().zip(instance.weights()) {
        for (total, &j) in totals.iter_mut().zip(row) {
            *total += w * alpha.score(j);
        }
    }
    Ok(totals)
}

pub fn max_nonpreferred_score(instance: &ProblemInstance, matrix: &ManipulationMatrix) -> Result<u64> {
    Ok(candidate_final_scores(instance, matrix)?
        .into_iter()
        .max()
        .expect("instances have at least one candidate"))
}

/// `σ₀ + W·α_m`: every manipulator ranks `p` first.
pub fn p_final_score(instance: &ProblemInstance) -> Result<u64> {
    let sigma_p = instance.sigma_p().ok_or(Error::MissingPreferredScore)?;
    Ok(sigma_p + instance.total_weight() * instance.alpha().top())
}

/// Whether `p` is a (co-)winner under the strategy; ties count as wins.
pub fn decide_win(instance: &ProblemInstance, matrix: &ManipulationMatrix) -> Result<bool> {
    let p = p_final_score(instance)?;
    if !matrix.is_valid() {
        return Err(Error::InvalidMatrix(
            "win decision needs a valid matrix; rearrange relaxed matrices first".into(),
        ));
    }
    Ok(max_nonpreferred_score(instance, matrix)? <= p)
}

/// Largest gap between two reduced scores `beta` entries apart.
pub fn g_alpha(alpha: &ScoringVector, beta: usize) -> u64 {
    let reduced = alpha.reduced();
    let m = reduced.len();
    if beta >= m {
        return reduced[m - 1] - reduced[0];
    }
    (0..m - beta)
        .map(|i| reduced[i + beta] - reduced[i])
        .max()
        .unwrap_or(0)
}

/// `⌈d·√(m ln m)⌉`, at least one.
pub fn beta_of(m: usize, d: f64) -> usize {
    let m = m as f64;
    let beta = (d * (m * m.ln()).sqrt()).ceil();
    if beta.is_finite() && beta >= 1.0 {
        beta as usize
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn worked_instance() -> ProblemInstance {
        ProblemInstance::unweighted(ScoringVector::borda(5), vec![5, 6, 6, 6, 7], 2, Some(0))
            .unwrap()
    }

    fn worked_instance_optimal() -> ManipulationMatrix {
        ManipulationMatrix::valid(vec![vec![4, 0, 1, 2, 3], vec![1, 4, 3, 2, 0]]).unwrap()
    }

    #[test]
    fn scoring_vector_rejects_decreasing_and_short() {
        assert!(ScoringVector::new(vec![0, 2, 1]).is_err());
        assert!(ScoringVector::new(vec![3]).is_err());
        let alpha = ScoringVector::borda(4);
        assert_eq!(alpha.entries(), &[0, 1, 2, 3, 4]);
        assert_eq!(alpha.reduced(), &[0, 1, 2, 3]);
        assert_eq!(alpha.top(), 4);
    }

    #[test]
    fn instance_checks_lengths_and_weights() {
        let alpha = ScoringVector::borda(3);
        assert!(ProblemInstance::new(alpha.clone(), vec![0, 0], vec![1], None).is_err());
        assert!(ProblemInstance::new(alpha.clone(), vec![0; 3], vec![], None).is_err());
        assert!(ProblemInstance::new(alpha.clone(), vec![0; 3], vec![1, 0], None).is_err());
        let inst = ProblemInstance::new(alpha, vec![0; 3], vec![2, 1], Some(3)).unwrap();
        assert_eq!(inst.total_weight(), 3);
        assert!(!inst.is_unweighted());
    }

    #[test]
    fn instance_json_layout() {
        let inst = worked_instance();
        let json = inst.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["alpha"], serde_json::json!([0, 1, 2, 3, 4, 5]));
        assert_eq!(value["sigma_p"], serde_json::json!(0));
        assert_eq!(ProblemInstance::from_json(&json).unwrap(), inst);

        let no_p = r#"{"alpha":[0,1,2],"sigma":[1,2],"sigma_p":null,"weights":[1]}"#;
        assert_eq!(ProblemInstance::from_json(no_p).unwrap().sigma_p(), None);
        let bad = r#"{"alpha":[0,1,2],"sigma":[1],"sigma_p":null,"weights":[1]}"#;
        assert!(ProblemInstance::from_json(bad).is_err());
    }

    #[test]
    fn worked_instance_final_scores() {
        let inst = worked_instance();
        let s = worked_instance_optimal();
        assert_eq!(s.column_multiset(4), vec![0, 3]);
        let totals = candidate_final_scores(&inst, &s).unwrap();
        assert_eq!(totals[4], 10);
        assert_eq!(max_nonpreferred_score(&inst, &s).unwrap(), 10);
    }

    #[test]
    fn all_bottom_scores_give_w_alpha0() {
        let alpha = ScoringVector::new(vec![2, 2, 5, 9]).unwrap();
        let inst = ProblemInstance::new(alpha, vec![0; 3], vec![3, 1], None).unwrap();
        // Relaxed invariant does not hold here; build the raw matrix directly.
        let s = ManipulationMatrix {
            entries: vec![vec![0; 3]; 2],
            validity: Validity::Relaxed,
        };
        assert_eq!(candidate_final_scores(&inst, &s).unwrap(), vec![8, 8, 8]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let inst = worked_instance();
        let s = ManipulationMatrix::valid(vec![vec![0, 1, 2, 3, 4]]).unwrap();
        assert!(matches!(
            candidate_final_scores(&inst, &s),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn single_candidate_max_score() {
        let inst =
            ProblemInstance::unweighted(ScoringVector::new(vec![3, 7]).unwrap(), vec![4], 3, None)
                .unwrap();
        let s = ManipulationMatrix::valid(vec![vec![0]; 3]).unwrap();
        assert_eq!(max_nonpreferred_score(&inst, &s).unwrap(), 4 + 9);
    }

    #[test]
    fn p_final_score_formula() {
        let inst = worked_instance();
        assert_eq!(p_final_score(&inst).unwrap(), 10);
        let weighted =
            ProblemInstance::new(ScoringVector::borda(4), vec![0; 4], vec![2, 1], Some(3)).unwrap();
        assert_eq!(p_final_score(&weighted).unwrap(), 15);
        let no_p =
            ProblemInstance::unweighted(ScoringVector::borda(2), vec![0; 2], 1, None).unwrap();
        assert!(matches!(p_final_score(&no_p), Err(Error::MissingPreferredScore)));
    }

    #[test]
    fn decide_win_ties_favor_p() {
        let inst = worked_instance();
        assert!(decide_win(&inst, &worked_instance_optimal()).unwrap());
        // Shift one unit onto c5: its total becomes 11 > 10.
        let worse =
            ManipulationMatrix::valid(vec![vec![3, 0, 1, 2, 4], vec![1, 4, 3, 2, 0]]).unwrap();
        assert!(!decide_win(&inst, &worse).unwrap());
    }

    #[test]
    fn g_alpha_values() {
        assert_eq!(g_alpha(&ScoringVector::borda(10), 3), 3);
        let constant = ScoringVector::new(vec![5, 5, 5, 5]).unwrap();
        for beta in 1..6 {
            assert_eq!(g_alpha(&constant, beta), 0);
        }
        let uneven = ScoringVector::new(vec![0, 1, 1, 4, 9, 20]).unwrap();
        assert_eq!(g_alpha(&uneven, 2), 8);
        // β ≥ m clamps to the full reduced range.
        assert_eq!(g_alpha(&uneven, 5), 9);
        assert_eq!(g_alpha(&uneven, 50), 9);
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta_of(1, 3.0), 1);
        assert_eq!(beta_of(100, 1.0), 22);
        for m in 1..200 {
            assert!(beta_of(m, 1.0) <= beta_of(4 * m, 1.0));
            assert!(beta_of(m, 1.0) >= 1);
        }
    }

    #[test]
    fn matrix_constructors_enforce_invariants() {
        assert!(ManipulationMatrix::relaxed(vec![vec![0, 0], vec![1, 1]]).is_ok());
        assert!(ManipulationMatrix::valid(vec![vec![0, 0], vec![1, 1]]).is_err());
        assert!(ManipulationMatrix::relaxed(vec![vec![0, 0], vec![0, 1]]).is_err());
        assert!(ManipulationMatrix::relaxed(vec![vec![0, 2], vec![1, 1]]).is_err());
        let json = r#"{"entries":[[0,1],[0,1]],"validity":"valid"}"#;
        let s: ManipulationMatrix = serde_json::from_str(json).unwrap();
        assert!(s.is_valid());
        let bad = r#"{"entries":[[0,0],[1,1]],"validity":"valid"}"#;
        assert!(serde_json::from_str::<ManipulationMatrix>(bad).is_err());
    }

    fn arb_instance_and_matrix() -> impl Strategy<Value = (ProblemInstance, ManipulationMatrix)> {
        (1usize..5, 1usize..4).prop_flat_map(|(m, k)| {
            let alpha = prop::collection::vec(0u64..6, m + 1).prop_map(|mut v| {
                v.sort_unstable();
                ScoringVector::new(v).unwrap()
            });
            let sigma = prop::collection::vec(0u64..20, m);
            let weights = prop::collection::vec(1u64..4, k);
            let rows = prop::collection::vec(
                Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
                k,
            );
            (alpha, sigma, weights, rows, Just(Some(5u64))).prop_map(
                |(alpha, sigma, weights, rows, p)| {
                    (
                        ProblemInstance::new(alpha, sigma, weights, p).unwrap(),
                        ManipulationMatrix::valid(rows).unwrap(),
                    )
                },
            )
        })
    }

    proptest! {
        #[test]
        fn final_scores_match_cellwise_sum((inst, s) in arb_instance_and_matrix()) {
            let totals = candidate_final_scores(&inst, &s).unwrap();
            for i in 0..inst.m() {
                let mut expect = inst.sigma()[i];
                for l in 0..inst.k() {
                    expect += inst.weights()[l] * inst.alpha().entries()[s.entries()[l][i]];
                }
                prop_assert_eq!(totals[i], expect);
            }
            prop_assert_eq!(max_nonpreferred_score(&inst, &s).unwrap(), *totals.iter().max().unwrap());
        }

        #[test]
        fn valid_matrix_is_relaxed((_inst, s) in arb_instance_and_matrix()) {
            prop_assert!(ManipulationMatrix::relaxed(s.entries().to_vec()).is_ok());
        }

        #[test]
        fn lowering_sigma_never_loses((inst, s) in arb_instance_and_matrix(), who in 0usize..5, by in 0u64..20) {
            let who = who % inst.m();
            let mut sigma = inst.sigma().to_vec();
            sigma[who] = sigma[who].saturating_sub(by);
            let lowered = inst.with_sigma(sigma).unwrap();
            if decide_win(&inst, &s).unwrap() {
                prop_assert!(decide_win(&lowered, &s).unwrap());
            }
        }

        #[test]
        fn g_alpha_monotone_and_borda_identity(m in 2usize..40, beta in 1usize..45) {
            let borda = ScoringVector::borda(m);
            prop_assert!(g_alpha(&borda, beta) <= g_alpha(&borda, beta + 1));
            if beta < m {
                prop_assert_eq!(g_alpha(&borda, beta), beta as u64);
            }
        }
    }
}
