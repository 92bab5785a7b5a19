use crate::model::{ManipulationMatrix, ProblemInstance};

/// Greedy baseline: manipulators vote one after the other, heaviest first,
/// each handing the lowest score to the candidate currently ahead.
pub fn reverse(instance: &ProblemInstance) -> ManipulationMatrix {
    let m = instance.m();
    let reduced = instance.alpha().reduced();
    let weights = instance.weights();
    let mut totals = instance.sigma().to_vec();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]));

    let mut rows = vec![Vec::new(); weights.len()];
    for voter in order {
        // lowest total first; among equals the later candidate goes first
        let mut ranking: Vec<usize> = (0..m).collect();
        ranking.sort_by(|&a, &b| totals[a].cmp(&totals[b]).then(b.cmp(&a)));
        let mut row = vec![0; m];
        for (r, &i) in ranking.iter().enumerate() {
            row[i] = m - 1 - r;
            totals[i] += weights[voter] * reduced[m - 1 - r];
        }
        rows[voter] = row;
    }
    ManipulationMatrix::valid(rows).expect("every row is a permutation")
}
