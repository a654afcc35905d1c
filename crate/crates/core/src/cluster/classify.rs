use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ExtendedExchangeMatrix, Quiver};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub acyclic: bool,
    pub isolated: bool,
    pub louise: bool,
    /// Separating arrows `(tail, head)` between mutable vertices of the reduced quiver.
    pub separating_edges: Vec<(usize, usize)>,
}

pub fn classify(b: &ExtendedExchangeMatrix) -> Classification {
    let reduced = b.to_quiver().reduced();
    let mut memo = HashMap::new();
    Classification {
        acyclic: !reduced.has_directed_cycle(),
        isolated: reduced.mutable_edges().is_empty(),
        louise: louise(&reduced, &mut memo),
        separating_edges: reduced.separating_edges(),
    }
}

/// Louise property of a reduced quiver: either no arrows among mutable vertices,
/// or some separating arrow `i -> j` such that freezing `{i}`, `{j}` and `{i, j}`
/// each leaves a Louise quiver.
///
/// Memoised on the exact labelled quiver. Vertex labels survive freezing, so the
/// same subproblem reached along different branches hits the same key.
pub fn louise(q: &Quiver, memo: &mut HashMap<Quiver, bool>) -> bool {
    if q.mutable_edges().is_empty() {
        return true;
    }
    if let Some(&known) = memo.get(q) {
        return known;
    }
    let mut result = false;
    for (i, j) in q.separating_edges() {
        let frozen = |vs: &[usize]| q.freeze(vs).expect("endpoints are mutable");
        if louise(&frozen(&[i]), memo)
            && louise(&frozen(&[j]), memo)
            && louise(&frozen(&[i, j]), memo)
        {
            result = true;
            break;
        }
    }
    memo.insert(q.clone(), result);
    result
}
