//! Pseudo-polynomial knapsack variants used as separation oracles.
//!
//! Both tables are indexed by an integer budget and an item count; cell values
//! are reals because dual prices are fractional.

/// Slack applied to the strict `value > floor` test.
pub const SEPARATION_EPS: f64 = 1e-7;

/// Pick exactly `size` items (with repetition) of total weight at most
/// `weight_cap` whose value exceeds `value_floor`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultisetKnapsackQuery {
    pub values: Vec<f64>,
    pub weights: Vec<u64>,
    pub weight_cap: u64,
    pub value_floor: f64,
    pub size: usize,
}

/// Build a length-`k` sequence; item `j` at location `l` is worth `values[j][l]`
/// and costs `penalties[l] * costs[j]` against `cost_cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceKnapsackQuery {
    pub values: Vec<Vec<f64>>,
    pub costs: Vec<u64>,
    pub penalties: Vec<u64>,
    pub cost_cap: u64,
    pub value_floor: f64,
}

impl SequenceKnapsackQuery {
    pub fn len(&self) -> usize {
        self.penalties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.penalties.is_empty()
    }
}

pub(crate) fn exceeds(value: f64, floor: f64) -> bool {
    value > floor + SEPARATION_EPS * floor.abs().max(1.0)
}

/// Best achievable value together with its witness.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackOptimum {
    pub value: f64,
    /// Counts per item (multiset) or item per location (sequence).
    pub witness: Vec<usize>,
}

/// Fills `table[count][budget]` and an argmax table, then walks back from
/// `(rows-1, cap)`. `step(count, j)` returns `(value, cost)` of placing item
/// `j` as the `count`-th pick (1-based).
fn fill_and_trace(
    rows: usize,
    cap: usize,
    items: usize,
    step: impl Fn(usize, usize) -> (f64, usize),
) -> Option<(f64, Vec<usize>)> {
    let width = cap + 1;
    let mut table = vec![f64::NEG_INFINITY; (rows + 1) * width];
    let mut choice = vec![usize::MAX; (rows + 1) * width];
    table[..width].fill(0.0);
    for count in 1..=rows {
        for budget in 0..=cap {
            let mut best = f64::NEG_INFINITY;
            let mut arg = usize::MAX;
            for j in 0..items {
                let (value, cost) = step(count, j);
                if cost > budget {
                    continue;
                }
                let rest = table[(count - 1) * width + budget - cost];
                if rest == f64::NEG_INFINITY {
                    continue;
                }
                let total = value + rest;
                // strict: the smallest index wins ties
                if total > best {
                    best = total;
                    arg = j;
                }
            }
            table[count * width + budget] = best;
            choice[count * width + budget] = arg;
        }
    }
    let optimum = table[rows * width + cap];
    if optimum == f64::NEG_INFINITY {
        return None;
    }
    let mut picks = Vec::with_capacity(rows);
    let mut budget = cap;
    for count in (1..=rows).rev() {
        let j = choice[count * width + budget];
        picks.push(j);
        budget -= step(count, j).1;
    }
    // picks[0] belongs to the last position
    picks.reverse();
    Some((optimum, picks))
}

/// `Q[W, k]` and a maximizing multiset, or `None` if no `k` items fit.
pub fn multiset_optimum(query: &MultisetKnapsackQuery) -> Option<KnapsackOptimum> {
    let m = query.values.len();
    assert_eq!(m, query.weights.len(), "values and weights must agree");
    if m == 0 {
        return (query.size == 0).then(|| KnapsackOptimum {
            value: 0.0,
            witness: Vec::new(),
        });
    }
    let heaviest = query.weights.iter().copied().max().unwrap_or(0);
    let cap = query.weight_cap.min(heaviest.saturating_mul(query.size as u64)) as usize;
    let (value, picks) = fill_and_trace(query.size, cap, m, |_, j| {
        (query.values[j], query.weights[j] as usize)
    })?;
    let mut counts = vec![0; m];
    for j in picks {
        counts[j] += 1;
    }
    Some(KnapsackOptimum {
        value,
        witness: counts,
    })
}

/// A `k`-multiset (as counts) of weight `≤ W` and value `> V`, if one exists.
pub fn solve_multiset(query: &MultisetKnapsackQuery) -> Option<Vec<usize>> {
    multiset_optimum(query)
        .filter(|opt| exceeds(opt.value, query.value_floor))
        .map(|opt| opt.witness)
}

/// `Q[B, k]` and a maximizing sequence, or `None` if nothing fits.
pub fn sequence_optimum(query: &SequenceKnapsackQuery) -> Option<KnapsackOptimum> {
    let m = query.costs.len();
    let k = query.len();
    assert_eq!(m, query.values.len(), "values and costs must agree");
    assert!(
        query.values.iter().all(|row| row.len() == k),
        "every item needs one value per location"
    );
    if m == 0 {
        return (k == 0).then(|| KnapsackOptimum {
            value: 0.0,
            witness: Vec::new(),
        });
    }
    let dearest = query.costs.iter().copied().max().unwrap_or(0);
    let ceiling: u64 = query.penalties.iter().map(|&p| p.saturating_mul(dearest)).sum();
    let cap = query.cost_cap.min(ceiling) as usize;
    let (value, picks) = fill_and_trace(k, cap, m, |count, j| {
        let location = count - 1;
        (
            query.values[j][location],
            (query.penalties[location] * query.costs[j]) as usize,
        )
    })?;
    Some(KnapsackOptimum {
        value,
        witness: picks,
    })
}

/// A sequence of penalized cost `≤ B` and value `> V`, if one exists.
pub fn solve_sequence(query: &SequenceKnapsackQuery) -> Option<Vec<usize>> {
    sequence_optimum(query)
        .filter(|opt| exceeds(opt.value, query.value_floor))
        .map(|opt| opt.witness)
}
