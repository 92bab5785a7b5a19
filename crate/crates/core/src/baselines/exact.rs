//! Exhaustive branch and bound for `T*` on small instances.
//!
//! Unit-weight instances are searched over count matrices (one `k`-multiset
//! per candidate, each score type used `k` times), which is exact because any
//! such matrix rearranges into a valid one. Weighted instances are searched
//! over per-voter permutations, one candidate at a time.

use serde::{Deserialize, Serialize};

use crate::baselines::reverse;
use crate::error::{Error, Result};
use crate::model::{max_nonpreferred_score, ManipulationMatrix, ProblemInstance};
use crate::rearrange::rearrange_to_valid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactLimits {
    pub max_m: usize,
    pub max_k: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self { max_m: 6, max_k: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub t_star: u64,
    pub witness: ManipulationMatrix,
}

pub fn exact_bruteforce(instance: &ProblemInstance, limits: ExactLimits) -> Result<ExactResult> {
    let (m, k) = (instance.m(), instance.k());
    if m > limits.max_m || k > limits.max_k {
        return Err(Error::LimitsExceeded(format!(
            "exact search refused for m={m}, k={k} (limits m<={}, k<={})",
            limits.max_m, limits.max_k
        )));
    }
    let start = reverse(instance);
    let incumbent = max_nonpreferred_score(instance, &start)?;

    let mut order: Vec<usize> = (0..m).collect();
    let sigma = instance.sigma();
    order.sort_by(|&a, &b| sigma[b].cmp(&sigma[a]).then(a.cmp(&b)));

    if instance.is_unweighted() {
        let mut search = CountSearch {
            alpha: instance.alpha().reduced(),
            sigma,
            order: &order,
            k,
            remaining: vec![k; m],
            assigned: vec![Vec::new(); m],
            best: incumbent,
            best_columns: None,
        };
        let mass = sigma.iter().sum::<u64>() + k as u64 * search.alpha.iter().sum::<u64>();
        search.descend(0, 0, mass);
        let witness = match search.best_columns {
            Some(cols) => {
                rearrange_to_valid(&ManipulationMatrix::relaxed_from_columns(&cols)?, instance)?
            }
            None => start,
        };
        Ok(ExactResult {
            t_star: search.best,
            witness,
        })
    } else {
        let mut search = VoterSearch {
            alpha: instance.alpha().reduced(),
            weights: instance.weights(),
            sigma,
            order: &order,
            free: vec![vec![true; m]; k],
            picks: vec![vec![0; k]; m],
            best: incumbent,
            best_picks: None,
        };
        let mass = sigma.iter().sum::<u64>()
            + instance.total_weight() * search.alpha.iter().sum::<u64>();
        search.descend(0, 0, mass);
        let witness = match search.best_picks {
            Some(picks) => {
                let rows = (0..k)
                    .map(|l| picks.iter().map(|p| p[l]).collect())
                    .collect();
                ManipulationMatrix::valid(rows)?
            }
            None => start,
        };
        Ok(ExactResult {
            t_star: search.best,
            witness,
        })
    }
}

/// True if the unassigned candidates cannot all stay strictly below `best`.
fn hopeless(running: u64, mass: u64, left: usize, best: u64) -> bool {
    running >= best || (left > 0 && mass.div_ceil(left as u64) >= best)
}

struct CountSearch<'a> {
    alpha: &'a [u64],
    sigma: &'a [u64],
    order: &'a [usize],
    k: usize,
    remaining: Vec<usize>,
    assigned: Vec<Vec<usize>>,
    best: u64,
    best_columns: Option<Vec<Vec<usize>>>,
}

impl CountSearch<'_> {
    /// `mass`: σ of unplaced candidates plus the value of unused score copies.
    fn descend(&mut self, pos: usize, running: u64, mass: u64) {
        if pos == self.order.len() {
            self.best = running;
            self.best_columns = Some(self.assigned.clone());
            return;
        }
        if hopeless(running, mass, self.order.len() - pos, self.best) {
            return;
        }
        let i = self.order[pos];
        let mut picked = Vec::with_capacity(self.k);
        self.choose(pos, i, 0, self.sigma[i], &mut picked, running, mass);
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        pos: usize,
        i: usize,
        from: usize,
        total: u64,
        picked: &mut Vec<usize>,
        running: u64,
        mass: u64,
    ) {
        if total >= self.best {
            return;
        }
        if picked.len() == self.k {
            let spent: u64 = picked.iter().map(|&j| self.alpha[j]).sum();
            self.assigned[i] = picked.clone();
            self.descend(pos + 1, running.max(total), mass - self.sigma[i] - spent);
            return;
        }
        for j in from..self.alpha.len() {
            if self.remaining[j] == 0 {
                continue;
            }
            self.remaining[j] -= 1;
            picked.push(j);
            self.choose(pos, i, j, total + self.alpha[j], picked, running, mass);
            picked.pop();
            self.remaining[j] += 1;
        }
    }
}

struct VoterSearch<'a> {
    alpha: &'a [u64],
    weights: &'a [u64],
    sigma: &'a [u64],
    order: &'a [usize],
    free: Vec<Vec<bool>>,
    picks: Vec<Vec<usize>>,
    best: u64,
    best_picks: Option<Vec<Vec<usize>>>,
}

impl VoterSearch<'_> {
    fn descend(&mut self, pos: usize, running: u64, mass: u64) {
        if pos == self.order.len() {
            self.best = running;
            self.best_picks = Some(self.picks.clone());
            return;
        }
        if hopeless(running, mass, self.order.len() - pos, self.best) {
            return;
        }
        let i = self.order[pos];
        self.choose(pos, i, 0, self.sigma[i], running, mass);
    }

    fn choose(&mut self, pos: usize, i: usize, voter: usize, total: u64, running: u64, mass: u64) {
        if total >= self.best {
            return;
        }
        if voter == self.weights.len() {
            let spent = total - self.sigma[i];
            self.descend(pos + 1, running.max(total), mass - self.sigma[i] - spent);
            return;
        }
        for j in 0..self.alpha.len() {
            if !self.free[voter][j] {
                continue;
            }
            self.free[voter][j] = false;
            self.picks[i][voter] = j;
            let gain = self.weights[voter] * self.alpha[j];
            self.choose(pos, i, voter + 1, total + gain, running, mass);
            self.free[voter][j] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScoringVector;

    #[test]
    fn worked_instance_optimum() {
        let inst =
            ProblemInstance::unweighted(ScoringVector::borda(5), vec![5, 6, 6, 6, 7], 2, Some(0)).unwrap();
        let r = exact_bruteforce(&inst, ExactLimits::default()).unwrap();
        assert_eq!(r.t_star, 10);
        assert!(r.witness.is_valid());
        assert_eq!(max_nonpreferred_score(&inst, &r.witness).unwrap(), 10);
    }

    #[test]
    fn one_voter_from_a_tie() {
        for m in 1..=6 {
            let inst = ProblemInstance::unweighted(ScoringVector::borda(m), vec![0; m], 1, None).unwrap();
            assert_eq!(exact_bruteforce(&inst, ExactLimits::default()).unwrap().t_star, m as u64 - 1);
        }
    }

    #[test]
    fn refuses_beyond_limits() {
        let inst = ProblemInstance::unweighted(ScoringVector::borda(7), vec![0; 7], 1, None).unwrap();
        assert!(matches!(
            exact_bruteforce(&inst, ExactLimits::default()),
            Err(Error::LimitsExceeded(_))
        ));
    }

    #[test]
    fn weighted_search_agrees_on_unit_weights() {
        let alpha = ScoringVector::borda(4);
        let sigma = vec![3, 0, 5, 1];
        let unweighted = ProblemInstance::unweighted(alpha.clone(), sigma.clone(), 3, None).unwrap();
        let a = exact_bruteforce(&unweighted, ExactLimits::default()).unwrap();
        // doubling every weight doubles the manipulators' contribution
        let doubled = ProblemInstance::new(alpha, vec![6, 0, 10, 2], vec![2, 2, 2], None).unwrap();
        let b = exact_bruteforce(&doubled, ExactLimits::default()).unwrap();
        assert_eq!(b.t_star, 2 * a.t_star);
        assert!(b.witness.is_valid());
    }

    #[test]
    fn tied_family_small_member() {
        let inst = ProblemInstance::unweighted(ScoringVector::borda(6), vec![0; 6], 3, None).unwrap();
        assert_eq!(exact_bruteforce(&inst, ExactLimits::default()).unwrap().t_star, 8);
    }
}
