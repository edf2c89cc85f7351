//! Exact minimum-weight FVS by branch and bound.
//!
//! Weights are scaled to integers over a common denominator. A node holds
//! the surviving vertices and a set of vertices committed to stay; branching
//! on a triangle `{a, b, c}` tries "delete a", "keep a, delete b" and "keep
//! a and b, delete c". Two kept endpoints of a triangle force the third
//! vertex out. Nodes are pruned by the incumbent and by a greedy packing of
//! triangles, which is a feasible dual point of the triangle relaxation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{local_ratio_3approx, FvsSolution, SolveError};
use crate::tournament::{verify_fvs, Triangle, VertexSet, WeightedTournament};

pub const MAX_EXACT_VERTICES: usize = 24;

pub fn exact_fvs(wt: &WeightedTournament) -> Result<FvsSolution, SolveError> {
    let n = wt.n();
    if n > MAX_EXACT_VERTICES {
        return Err(SolveError::TooLarge { what: "exact_fvs", n, cap: MAX_EXACT_VERTICES });
    }
    let w = scaled_weights(wt)?;
    let t = &wt.tournament;
    let triangles: Vec<(VertexSet, Triangle)> = t.triangles().into_iter().map(|tr| (tr.set(), tr)).collect();
    let start = local_ratio_3approx(wt).chosen;
    let mut bb = Search {
        wt,
        w: &w,
        triangles: &triangles,
        best_cost: cost(&w, start),
        best: start,
    };
    bb.run(t.vertices(), VertexSet::EMPTY, 0);
    Ok(verify_fvs(wt, bb.best).solution().expect("branch and bound returns a feedback vertex set"))
}

fn cost(w: &[u64], s: VertexSet) -> u64 {
    s.iter().map(|v| w[v]).sum()
}

fn scaled_weights(wt: &WeightedTournament) -> Result<Vec<u64>, SolveError> {
    let lcm = wt.weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Option<Vec<u64>> =
        wt.weights.iter().map(|w| (w.numer() * (&lcm / w.denom())).to_u64()).collect();
    let scaled = scaled.ok_or(SolveError::WeightOverflow)?;
    let total = scaled.iter().try_fold(0u64, |acc, &x| acc.checked_add(x));
    match total {
        Some(s) if s < u64::MAX / 2 => Ok(scaled),
        _ => Err(SolveError::WeightOverflow),
    }
}

struct Search<'a> {
    wt: &'a WeightedTournament,
    w: &'a [u64],
    triangles: &'a [(VertexSet, Triangle)],
    best_cost: u64,
    best: VertexSet,
}

impl Search<'_> {
    /// Vertices forced out by kept pairs, or `None` if a triangle is kept
    /// entirely.
    fn forced(&self, alive: VertexSet, kept: VertexSet) -> Option<VertexSet> {
        let t = &self.wt.tournament;
        let mut out = VertexSet::EMPTY;
        for u in kept {
            for v in kept.intersection(t.out_set(u)) {
                let closing = t.closing(u, v).intersection(alive);
                if !closing.is_disjoint(kept) {
                    return None;
                }
                out = out.union(closing);
            }
        }
        Some(out)
    }

    fn lower_bound(&self, alive: VertexSet, kept: VertexSet) -> u64 {
        let mut residual = self.w.to_vec();
        let mut lb = 0;
        for (set, _) in self.triangles {
            if !set.is_subset(alive) {
                continue;
            }
            let free = set.difference(kept);
            let y = free.iter().map(|v| residual[v]).min().unwrap_or(0);
            if y > 0 {
                for v in free {
                    residual[v] -= y;
                }
                lb += y;
            }
        }
        lb
    }

    fn run(&mut self, alive: VertexSet, kept: VertexSet, spent: u64) {
        if spent >= self.best_cost {
            return;
        }
        let mut pick: Option<VertexSet> = None;
        for (set, _) in self.triangles {
            if set.is_subset(alive) {
                let k = set.intersection(kept).len();
                if pick.is_none_or(|p| k > p.intersection(kept).len()) {
                    pick = Some(*set);
                    if k >= 1 {
                        break;
                    }
                }
            }
        }
        let Some(tri) = pick else {
            self.best_cost = spent;
            self.best = self.wt.tournament.vertices().difference(alive);
            return;
        };
        if spent + self.lower_bound(alive, kept) >= self.best_cost {
            return;
        }
        let free = tri.difference(kept).to_vec();
        let mut keep = kept;
        for &v in &free {
            let alive2 = alive.without(v);
            if let Some(forced) = self.forced(alive2, keep) {
                let alive3 = alive2.difference(forced);
                self.run(alive3, keep, spent + self.w[v] + cost(self.w, forced));
            }
            keep = keep.with(v);
        }
    }
}
