use std::cmp::Ordering;

use crate::error::Result;
use crate::model::{p_final_score, ManipulationMatrix, ProblemInstance};

/// Hands out every score copy from the top down to the candidate with the
/// largest gap `p_final − total`.
pub fn largest_fit(instance: &ProblemInstance) -> Result<ManipulationMatrix> {
    allocate(instance, "Largest Fit", |gap_a, _, gap_b, _| gap_a.cmp(&gap_b))
}

/// As [`largest_fit`], ranking by gap per slot the candidate still has open.
pub fn average_fit(instance: &ProblemInstance) -> Result<ManipulationMatrix> {
    allocate(instance, "Average Fit", |gap_a, open_a, gap_b, open_b| {
        (gap_a * open_b).cmp(&(gap_b * open_a))
    })
}

/// `better(gap_a, open_a, gap_b, open_b)` orders two contenders; the earlier
/// index wins ties.
fn allocate(
    instance: &ProblemInstance,
    what: &'static str,
    better: impl Fn(i128, i128, i128, i128) -> Ordering,
) -> Result<ManipulationMatrix> {
    instance.require_unweighted(what)?;
    let target = p_final_score(instance)? as i128;
    let m = instance.m();
    let k = instance.k();
    let reduced = instance.alpha().reduced();
    let mut totals: Vec<i128> = instance.sigma().iter().map(|&s| s as i128).collect();
    let mut columns: Vec<Vec<usize>> = vec![Vec::with_capacity(k); m];

    for j in (0..m).rev() {
        for _ in 0..k {
            let mut pick: Option<usize> = None;
            for i in 0..m {
                if columns[i].len() == k {
                    continue;
                }
                let wins = pick.is_none_or(|b| {
                    better(
                        target - totals[i],
                        (k - columns[i].len()) as i128,
                        target - totals[b],
                        (k - columns[b].len()) as i128,
                    ) == Ordering::Greater
                });
                if wins {
                    pick = Some(i);
                }
            }
            let i = pick.expect("k·m copies fit into m candidates of capacity k");
            columns[i].push(j);
            totals[i] += reduced[j] as i128;
        }
    }
    ManipulationMatrix::relaxed_from_columns(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{max_nonpreferred_score, ScoringVector};

    #[test]
    fn single_candidate_takes_everything() {
        let inst =
            ProblemInstance::unweighted(ScoringVector::new(vec![1, 4]).unwrap(), vec![2], 3, Some(0))
                .unwrap();
        for s in [largest_fit(&inst).unwrap(), average_fit(&inst).unwrap()] {
            assert_eq!(s.column_multiset(0), vec![0, 0, 0]);
        }
    }

    #[test]
    fn requires_preferred_score() {
        let inst = ProblemInstance::unweighted(ScoringVector::borda(3), vec![0; 3], 1, None).unwrap();
        assert!(matches!(average_fit(&inst), Err(Error::MissingPreferredScore)));
    }

    #[test]
    fn largest_fit_on_k_one() {
        // p ends at 3; the largest gap takes the top score first
        let inst =
            ProblemInstance::unweighted(ScoringVector::borda(3), vec![2, 0, 1], 1, Some(0)).unwrap();
        let s = largest_fit(&inst).unwrap();
        assert_eq!(s.entries()[0], vec![0, 2, 1]);
        assert_eq!(max_nonpreferred_score(&inst, &s).unwrap(), 2);
    }

    #[test]
    fn average_fit_weighs_open_slots() {
        // c1 keeps the second 2 on a tie; for the second 1, c3's -1 over two
        // slots beats c2's -1 over one
        let inst =
            ProblemInstance::unweighted(ScoringVector::borda(3), vec![4, 6, 7], 2, Some(0)).unwrap();
        let s = average_fit(&inst).unwrap();
        for i in 0..3 {
            assert_eq!(s.column_multiset(i).len(), 2);
        }
        assert_eq!(s.column_multiset(0), vec![2, 2]);
        assert_eq!(s.column_multiset(1), vec![0, 1]);
        assert_eq!(s.column_multiset(2), vec![0, 1]);
    }
}
