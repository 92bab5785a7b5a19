use crate::model::{ManipulationMatrix, ProblemInstance, ScoringVector};

/// Borda with `k = 3`, `m = 3t` and all scores tied, together with the snake
/// strategy whose maximum is `5m/3 − 2`.
pub fn claim1_instance(t: usize) -> (ProblemInstance, ManipulationMatrix) {
    assert!(t >= 1, "t must be positive");
    let m = 3 * t;
    let instance = ProblemInstance::unweighted(ScoringVector::borda(m), vec![0; m], 3, Some(0))
        .expect("a well-formed family member");
    // m-1, m-1, m-1, m-2, ... , 0, 0, 0
    let sequence: Vec<usize> = (0..3 * m).map(|pos| m - 1 - pos / 3).collect();
    let mut columns = vec![Vec::with_capacity(3); m];
    for (block, chunk) in sequence.chunks(m).enumerate() {
        for (offset, &score) in chunk.iter().enumerate() {
            let i = if block == 1 { m - 1 - offset } else { offset };
            columns[i].push(score);
        }
    }
    let strategy =
        ManipulationMatrix::relaxed_from_columns(&columns).expect("each score appears three times");
    (instance, strategy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{candidate_final_scores, max_nonpreferred_score};
    use crate::rearrange::rearrange_to_valid;

    #[test]
    fn construction_values() {
        for (t, expected) in [(1, 3), (2, 8), (3, 13), (4, 18)] {
            let (inst, s) = claim1_instance(t);
            assert_eq!(max_nonpreferred_score(&inst, &s).unwrap(), expected);
            let valid = rearrange_to_valid(&s, &inst).unwrap();
            assert_eq!(
                candidate_final_scores(&inst, &valid).unwrap(),
                candidate_final_scores(&inst, &s).unwrap()
            );
        }
    }
}
