//! Turning a relaxed manipulation matrix into a valid one.
//!
//! Candidate/score-type multiplicities form a `k`-regular bipartite multigraph,
//! so a perfect matching always exists (Hall). Each matching peeled off becomes
//! one manipulator's row and leaves a `(k-1)`-regular remainder.

use crate::error::{Error, Result};
use crate::model::{ManipulationMatrix, ProblemInstance, Validity};

pub fn rearrange_to_valid(
    matrix: &ManipulationMatrix,
    instance: &ProblemInstance,
) -> Result<ManipulationMatrix> {
    instance.require_unweighted("rearranging a relaxed matrix")?;
    if matrix.k() != instance.k() || matrix.m() != instance.m() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but instance has k={} and m={}",
            matrix.k(),
            matrix.m(),
            instance.k(),
            instance.m()
        )));
    }
    if matrix.validity() == Validity::Relaxed {
        // Re-check: a relaxed matrix may come from deserialization of untrusted input.
        ManipulationMatrix::relaxed(matrix.entries().to_vec())?;
    }
    let rows = decompose(matrix.entries(), matrix.m())?;
    ManipulationMatrix::valid(rows)
}

/// Splits the column multisets of `entries` into `k` permutation rows.
fn decompose(entries: &[Vec<usize>], m: usize) -> Result<Vec<Vec<usize>>> {
    let k = entries.len();
    // multiplicity[i][j]: how often candidate i still has to receive score j
    let mut multiplicity = vec![vec![0usize; m]; m];
    for row in entries {
        for (i, &j) in row.iter().enumerate() {
            multiplicity[i][j] += 1;
        }
    }

    let mut rows = Vec::with_capacity(k);
    for _ in 0..k {
        let matching = perfect_matching(&multiplicity)
            .ok_or_else(|| Error::InvalidMatrix("no perfect matching; matrix is not relaxed".into()))?;
        for (i, &j) in matching.iter().enumerate() {
            multiplicity[i][j] -= 1;
        }
        rows.push(matching);
    }
    Ok(rows)
}

/// Kuhn's augmenting-path matching on the support of `multiplicity`.
/// Returns `score_of[candidate]` when every candidate is matched.
fn perfect_matching(multiplicity: &[Vec<usize>]) -> Option<Vec<usize>> {
    let m = multiplicity.len();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for i in 0..m {
        let mut visited = vec![false; m];
        if !augment(i, multiplicity, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut score_of = vec![0; m];
    for (j, o) in owner.iter().enumerate() {
        score_of[o.expect("perfect matching covers every score type")] = j;
    }
    Some(score_of)
}

fn augment(
    candidate: usize,
    multiplicity: &[Vec<usize>],
    owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for j in 0..owner.len() {
        if multiplicity[candidate][j] == 0 || visited[j] {
            continue;
        }
        visited[j] = true;
        let free = match owner[j] {
            None => true,
            Some(other) => augment(other, multiplicity, owner, visited),
        };
        if free {
            owner[j] = Some(candidate);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{candidate_final_scores, ScoringVector};
    use proptest::prelude::*;

    fn unweighted(m: usize, k: usize) -> ProblemInstance {
        ProblemInstance::unweighted(ScoringVector::borda(m), vec![0; m], k, None).unwrap()
    }

    #[test]
    fn forced_two_by_two() {
        let relaxed = ManipulationMatrix::relaxed(vec![vec![0, 1], vec![0, 1]]).unwrap();
        let valid = rearrange_to_valid(&relaxed, &unweighted(2, 2)).unwrap();
        assert_eq!(valid.entries(), &[vec![0, 1], vec![0, 1]]);
    }

    #[test]
    fn columns_holding_one_type_each() {
        // c1 receives {0,0}, c2 receives {1,1}: stored so no row is a permutation.
        let relaxed = ManipulationMatrix::relaxed_from_columns(&[vec![0, 0], vec![1, 1]]).unwrap();
        let valid = rearrange_to_valid(&relaxed, &unweighted(2, 2)).unwrap();
        assert!(valid.is_valid());
        assert_eq!(valid.column_multiset(0), vec![0, 0]);
        assert_eq!(valid.column_multiset(1), vec![1, 1]);
    }

    #[test]
    fn already_valid_is_fixed_point_up_to_rows() {
        let valid = ManipulationMatrix::valid(vec![vec![2, 0, 1], vec![0, 1, 2]]).unwrap();
        let out = rearrange_to_valid(&valid, &unweighted(3, 2)).unwrap();
        for i in 0..3 {
            assert_eq!(out.column_multiset(i), valid.column_multiset(i));
        }
    }

    #[test]
    fn weighted_instance_is_rejected() {
        let inst =
            ProblemInstance::new(ScoringVector::borda(2), vec![0, 0], vec![2, 1], None).unwrap();
        let relaxed = ManipulationMatrix::relaxed(vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(rearrange_to_valid(&relaxed, &inst).is_err());
    }

    fn arb_relaxed() -> impl Strategy<Value = ManipulationMatrix> {
        (1usize..=6, 1usize..=4).prop_flat_map(|(m, k)| {
            let cells: Vec<usize> = (0..m).flat_map(|j| std::iter::repeat_n(j, k)).collect();
            Just(cells).prop_shuffle().prop_map(move |cells| {
                let rows = cells.chunks(m).map(<[usize]>::to_vec).collect();
                ManipulationMatrix::relaxed(rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn preserves_columns_and_scores(relaxed in arb_relaxed()) {
            let inst = unweighted(relaxed.m(), relaxed.k());
            let valid = rearrange_to_valid(&relaxed, &inst).unwrap();
            prop_assert!(valid.is_valid());
            for i in 0..relaxed.m() {
                prop_assert_eq!(valid.column_multiset(i), relaxed.column_multiset(i));
            }
            prop_assert_eq!(
                candidate_final_scores(&inst, &valid).unwrap(),
                candidate_final_scores(&inst, &relaxed).unwrap()
            );
        }
    }
}
