//! Weighted local-ratio 3-approximation.

use num_traits::Zero;

use super::FvsSolution;
use crate::tournament::{verify_fvs, VertexSet, WeightedTournament};

/// One pass over the triangles in lexicographic order, lowering each still
/// uncovered triangle by its minimum residual weight. Vertices are collected
/// as their residual hits zero, then removed again in reverse order when the
/// rest stays a feedback vertex set.
pub fn local_ratio_3approx(wt: &WeightedTournament) -> FvsSolution {
    let t = &wt.tournament;
    let mut residual = wt.weights.clone();
    let mut order: Vec<usize> = Vec::new();
    let mut chosen = VertexSet::EMPTY;
    for v in t.vertices() {
        if residual[v].is_zero() && t.triangles().iter().any(|tr| tr.set().contains(v)) {
            order.push(v);
            chosen.insert(v);
        }
    }
    for tr in t.triangles() {
        if !tr.set().is_disjoint(chosen) {
            continue;
        }
        let [a, b, c] = tr.vertices();
        let m = [a, b, c].iter().map(|&v| residual[v].clone()).min().expect("three vertices");
        for v in [a, b, c] {
            residual[v] -= &m;
            if residual[v].is_zero() && !chosen.contains(v) {
                order.push(v);
                chosen.insert(v);
            }
        }
    }
    for &v in order.iter().rev() {
        let without = chosen.without(v);
        if t.is_acyclic_within(t.vertices().difference(without)) {
            chosen = without;
        }
    }
    verify_fvs(wt, chosen).solution().expect("every triangle received a zero-residual vertex")
}
