//! End-to-end solve: configuration LP, best-of-R rounding, verdict.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lp::{min_feasible_t, natural_lp_value, ClpOptions};
use crate::model::{
    beta_of, decide_win, g_alpha, p_final_score, ManipulationMatrix, Mode, ProblemInstance,
};
use crate::rounding::round_best_of;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub clp: ClpOptions,
    /// Rounding repeats; `None` means `m`.
    pub repeats: Option<usize>,
    pub seed: u64,
    /// Constant in `β = ⌈d·√(m ln m)⌉`.
    pub d: f64,
    pub natural_lp: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            clp: ClpOptions::default(),
            repeats: None,
            seed: 0,
            d: 1.0,
            natural_lp: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub t_clp: u64,
    pub achieved: u64,
    /// `W·g(α)` at the configured `β`: the additive loss rounding may incur
    /// with high probability.
    pub rounding_bound: u64,
    pub p_score: Option<u64>,
    pub win: Option<bool>,
    pub repeats: usize,
    pub seed: u64,
    pub per_repeat: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub natural_lp: Option<f64>,
    pub matrix: ManipulationMatrix,
}

pub fn solve(instance: &ProblemInstance, mode: Mode, options: &SolveOptions) -> Result<SolveReport> {
    let (t_clp, solution) = min_feasible_t(instance, mode, &options.clp)?;
    let repeats = options.repeats.unwrap_or(instance.m()).max(1);
    let rounding = round_best_of(&solution, instance, repeats, options.seed, mode)?;
    let (p_score, win) = match instance.sigma_p() {
        Some(_) => (
            Some(p_final_score(instance)?),
            Some(decide_win(instance, &rounding.matrix)?),
        ),
        None => (None, None),
    };
    let beta = beta_of(instance.m(), options.d);
    let natural_lp = if options.natural_lp {
        Some(natural_lp_value(instance)?)
    } else {
        None
    };
    Ok(SolveReport {
        mode,
        t_clp,
        achieved: rounding.achieved,
        rounding_bound: instance.total_weight() * g_alpha(instance.alpha(), beta),
        p_score,
        win,
        repeats,
        seed: options.seed,
        per_repeat: rounding.per_repeat,
        natural_lp,
        matrix: rounding.matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScoringVector;

    #[test]
    fn worked_instance_end_to_end() {
        let inst =
            ProblemInstance::unweighted(ScoringVector::borda(5), vec![5, 6, 6, 6, 7], 2, Some(0)).unwrap();
        let report = solve(&inst, Mode::Ucm, &SolveOptions { repeats: Some(20), ..Default::default() }).unwrap();
        assert_eq!(report.t_clp, 10);
        assert_eq!(report.achieved, 10);
        assert_eq!(report.win, Some(true));
        assert!(report.matrix.is_valid());
    }
}
