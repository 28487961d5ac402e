use crate::cost::CostVector;
use std::cmp::Ordering;

/// Strict Pareto dominance: `a` is no worse than `b` in every component and
/// strictly better in at least one.
pub fn dominates(a: &CostVector, b: &CostVector) -> bool {
    let (a, b) = (a.components(), b.components());
    a.iter().zip(&b).all(|(x, y)| x <= y) && a.iter().zip(&b).any(|(x, y)| x < y)
}

fn lex_cmp(a: &CostVector, b: &CostVector) -> Ordering {
    a.obstruction
        .total_cmp(&b.obstruction)
        .then(a.turns.cmp(&b.turns))
        .then(a.distance.total_cmp(&b.distance))
}

/// Maximal non-dominated subset of `vectors`, exact comparisons. Duplicates
/// keep their first occurrence; survivors stay in input order.
///
/// A dominating vector always sorts lexicographically before the vector it
/// dominates, so a single sweep in lexicographic order only has to compare
/// against survivors found so far.
pub fn pareto_filter(vectors: &[CostVector]) -> Vec<CostVector> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(&vectors[i], &vectors[j]).then(i.cmp(&j)));

    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let v = &vectors[i];
        if kept
            .iter()
            .any(|&k| vectors[k] == *v || dominates(&vectors[k], v))
        {
            continue;
        }
        kept.push(i);
    }
    kept.sort_unstable();
    kept.into_iter().map(|i| vectors[i]).collect()
}

/// Tolerant front filter used when assembling solution sets: vectors equal
/// within `eps` collapse to the earliest one, and anything covered by a
/// survivor is dropped. Order of survivors is preserved.
pub fn pareto_filter_tolerant<T>(
    items: Vec<T>,
    cost: impl Fn(&T) -> CostVector,
    eps: f64,
) -> Vec<T> {
    let mut kept: Vec<T> = Vec::new();
    for item in items {
        let c = cost(&item);
        if kept.iter().any(|k| cost(k).covers(&c, eps)) {
            continue;
        }
        kept.retain(|k| !c.covers(&cost(k), eps));
        kept.push(item);
    }
    kept
}
