//! The layering algorithm for light tournaments.
//!
//! Vertices are peeled into layers `U_i ∪ S_i` by in-BFS. A fresh start
//! roots a new BFS at a vertex `z` of minimum in-degree among the unseen
//! vertices `W`: layer `i+1` is `{z}` and layer `i+2` is `N(z) ∩ W`, solved
//! exactly by CDZ. Otherwise the in-neighbourhood of the current root layer
//! is split by a 2-in-dominating pair `z, z'` into `U = N(z) ∩ W` (triangle
//! free) and `S = N(z') ∩ W - U`, which is taken as the local solution.
//! Finally either all odd layers plus the even local solutions are returned,
//! or the reverse, whichever side leaves the heavier part untouched.

use serde::{Deserialize, Serialize};

use super::{cdz, require_positive, FvsSolution, SolveError};
use crate::lp::LpConfig;
use crate::structure::{find_2_in_dominating_pair, first_heavy_triangle, in_neighborhood};
use crate::tournament::{verify_fvs, FvsCheck, Induced, Triangle, VertexSet, WeightedTournament};
use crate::weight::{self, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    FreshRoot,
    FreshLayer,
    BfsLayer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerEntry {
    pub index: usize,
    pub kind: LayerKind,
    pub u: VertexSet,
    pub s: VertexSet,
    pub f: VertexSet,
    /// `(z, z')` for BFS layers.
    pub dominators: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeringTrace {
    pub entries: Vec<LayerEntry>,
    pub l0: VertexSet,
    pub l1: VertexSet,
    /// 0 when the output is the odd layers plus the even local solutions,
    /// 1 for the reverse.
    pub chosen_parity: u8,
    /// CDZ calls that needed the exact fallback.
    pub cdz_fallbacks: usize,
}

/// A triangle whose layer indices are not within three consecutive layers
/// or that skips the middle layer of its span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanFinding {
    pub triangle: Triangle,
    pub layers: [usize; 3],
}

impl LayeringTrace {
    fn layer_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut at = vec![None; n];
        for e in &self.entries {
            for v in e.u.union(e.s) {
                at[v] = Some(e.index);
            }
        }
        at
    }

    /// Structural invariants: the layers partition `vertices`, local
    /// solutions sit inside their layer, BFS layers take `F = S`, fresh roots
    /// are single vertices with nothing chosen.
    pub fn check_structure(&self, vertices: VertexSet) -> Result<(), String> {
        let mut seen = VertexSet::EMPTY;
        for e in &self.entries {
            if !e.u.is_disjoint(e.s) || !seen.is_disjoint(e.u.union(e.s)) {
                return Err(format!("layer {} overlaps earlier layers", e.index));
            }
            seen = seen.union(e.u).union(e.s);
            if !e.f.is_subset(e.u.union(e.s)) {
                return Err(format!("F_{} leaves its layer", e.index));
            }
            match e.kind {
                LayerKind::BfsLayer if e.f != e.s => return Err(format!("F_{} differs from S", e.index)),
                LayerKind::FreshRoot if !e.s.is_empty() || !e.f.is_empty() || e.u.len() != 1 => {
                    return Err(format!("fresh root {} is not a lone vertex", e.index))
                }
                _ => {}
            }
        }
        if seen != vertices {
            return Err(format!("layers cover {seen:?}, expected {vertices:?}"));
        }
        Ok(())
    }

    /// Per-layer weight bounds: `w(S) <= w(U)` on BFS layers and
    /// `w(F) <= w(U)/3` on fresh layers.
    pub fn check_weights(&self, weights: &[Weight]) -> Result<(), String> {
        let w = |s: VertexSet| weight::sum(s.iter().map(|v| &weights[v]));
        for e in &self.entries {
            match e.kind {
                LayerKind::BfsLayer if w(e.s) > w(e.u) => {
                    return Err(format!("layer {}: w(S) > w(U)", e.index));
                }
                LayerKind::FreshLayer if w(e.f) * weight::int(3) > w(e.u) => {
                    return Err(format!("layer {}: w(F) > w(U)/3", e.index));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Triangles of `t` whose layers are not three consecutive indices
    /// with the middle one present.
    pub fn span_findings(&self, wt: &WeightedTournament) -> Vec<SpanFinding> {
        let at = self.layer_of(wt.n());
        let mut out = Vec::new();
        for tr in wt.tournament.triangles() {
            let [a, b, c] = tr.vertices();
            let (Some(i), Some(j), Some(k)) = (at[a], at[b], at[c]) else { continue };
            let mut l = [i, j, k];
            l.sort_unstable();
            let span = l[2] - l[0];
            let skips_middle = span == 2 && l[1] != l[0] + 1;
            if span > 2 || skips_middle {
                out.push(SpanFinding { triangle: tr, layers: [i, j, k] });
            }
        }
        out
    }

    pub(crate) fn lift(&self, ind: &Induced) -> LayeringTrace {
        LayeringTrace {
            entries: self
                .entries
                .iter()
                .map(|e| LayerEntry {
                    index: e.index,
                    kind: e.kind,
                    u: ind.lift(e.u),
                    s: ind.lift(e.s),
                    f: ind.lift(e.f),
                    dominators: e.dominators.map(|(a, b)| (ind.to_old[a], ind.to_old[b])),
                })
                .collect(),
            l0: ind.lift(self.l0),
            l1: ind.lift(self.l1),
            chosen_parity: self.chosen_parity,
            cdz_fallbacks: self.cdz_fallbacks,
        }
    }
}

pub fn layers(wt: &WeightedTournament, cfg: &LpConfig) -> Result<(FvsSolution, LayeringTrace), SolveError> {
    let t = &wt.tournament;
    if let Some(h) = first_heavy_triangle(t) {
        return Err(SolveError::NotLight(h.triangle));
    }
    require_positive(wt)?;
    let mut entries: Vec<LayerEntry> = Vec::new();
    let mut fallbacks = 0;
    let mut i = 0;
    let mut root = VertexSet::EMPTY;
    let mut unseen = t.vertices();
    while !unseen.is_empty() {
        let targets = in_neighborhood(t, root, unseen);
        if !targets.is_empty() {
            let pair = find_2_in_dominating_pair(t, root, targets, &wt.weights)
                .ok_or(SolveError::NoDominatingPair { index: i + 1, targets })?;
            let u = t.in_set(pair.z).intersection(unseen);
            let s = t.in_set(pair.z2).intersection(unseen).difference(u);
            unseen = unseen.difference(u).difference(s);
            entries.push(LayerEntry {
                index: i + 1,
                kind: LayerKind::BfsLayer,
                u,
                s,
                f: s,
                dominators: Some((pair.z, pair.z2)),
            });
            i += 1;
            root = u;
        } else {
            let z = unseen
                .iter()
                .min_by_key(|&v| (t.in_set(v).intersection(unseen).len(), v))
                .expect("unseen is nonempty");
            let u2 = t.in_set(z).intersection(unseen);
            let (sub, ind) = wt.induced(u2).expect("subset of V");
            let local = cdz(&sub, cfg)?;
            if local.fallback.is_some() {
                fallbacks += 1;
            }
            let f2 = ind.lift(local.solution.chosen);
            entries.push(LayerEntry {
                index: i + 1,
                kind: LayerKind::FreshRoot,
                u: VertexSet::singleton(z),
                s: VertexSet::EMPTY,
                f: VertexSet::EMPTY,
                dominators: None,
            });
            entries.push(LayerEntry {
                index: i + 2,
                kind: LayerKind::FreshLayer,
                u: u2,
                s: VertexSet::EMPTY,
                f: f2,
                dominators: None,
            });
            unseen = unseen.without(z).difference(u2);
            i += 2;
            root = u2;
        }
    }
    let mut l = [VertexSet::EMPTY; 2];
    let mut f = [VertexSet::EMPTY; 2];
    for e in &entries {
        let p = e.index % 2;
        l[p] = l[p].union(e.u).union(e.s);
        f[p] = f[p].union(e.f);
    }
    let (chosen, parity) = if wt.weight_of(l[0]) >= wt.weight_of(l[1]) {
        (f[0].union(l[1]), 0)
    } else {
        (f[1].union(l[0]), 1)
    };
    let trace = LayeringTrace { entries, l0: l[0], l1: l[1], chosen_parity: parity, cdz_fallbacks: fallbacks };
    if let Err(e) = trace.check_structure(t.vertices()).and_then(|_| trace.check_weights(&wt.weights)) {
        return Err(SolveError::breach(wt, "layering trace", e));
    }
    match verify_fvs(wt, chosen) {
        FvsCheck::Valid(sol) => {
            if sol.weight.clone() * weight::int(4) > wt.total_weight() * weight::int(3) {
                return Err(SolveError::breach(
                    wt,
                    "layering weight",
                    format!("output weight {} exceeds 3/4 of the total", weight::format(&sol.weight)),
                ));
            }
            Ok((sol, trace))
        }
        FvsCheck::Violation(tr) => Err(SolveError::breach(
            wt,
            "layering feasibility",
            format!("triangle {tr} survives; span findings {:?}", trace.span_findings(wt)),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::is_light;
    use crate::tournament::{Tournament, WeightScheme};

    #[test]
    fn empty_and_acyclic() {
        let wt = WeightedTournament::unit(Tournament::transitive(0));
        let (s, tr) = layers(&wt, &LpConfig::default()).unwrap();
        assert!(s.chosen.is_empty() && tr.entries.is_empty());
        let wt = WeightedTournament::unit(Tournament::transitive(5));
        let (s, _) = layers(&wt, &LpConfig::default()).unwrap();
        assert!(s.chosen.is_empty());
    }

    #[test]
    fn c3_hand_trace() {
        let wt = WeightedTournament::unit(Tournament::cycle3());
        let (s, tr) = layers(&wt, &LpConfig::default()).unwrap();
        let us: Vec<VertexSet> = tr.entries.iter().map(|e| e.u).collect();
        assert_eq!(us, vec![VertexSet::singleton(0), VertexSet::singleton(2), VertexSet::singleton(1)]);
        assert_eq!(
            tr.entries.iter().map(|e| e.kind).collect::<Vec<_>>(),
            vec![LayerKind::FreshRoot, LayerKind::FreshLayer, LayerKind::BfsLayer]
        );
        assert_eq!(s.weight, weight::int(1));
    }

    #[test]
    fn rejects_heavy_and_zero_weights() {
        // 1b-type member of T5 contains a heavy triangle
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let t = Tournament::from_arcs(
            5,
            &[(a, b), (e, c), (d, e), (b, e), (c, a), (b, c), (c, d), (d, a), (b, d), (e, a)],
        )
        .unwrap();
        assert!(!is_light(&t));
        assert!(matches!(layers(&WeightedTournament::unit(t), &LpConfig::default()), Err(SolveError::NotLight(_))));
        let mut wt = WeightedTournament::unit(Tournament::cycle3());
        wt.weights[1] = weight::int(0);
        assert!(matches!(layers(&wt, &LpConfig::default()), Err(SolveError::NonPositiveWeight(1))));
    }

    #[test]
    fn light_samples_respect_bounds() {
        let mut checked = 0;
        for seed in 0..300u64 {
            let wt = WeightedTournament::random(10, seed, WeightScheme::UniformInt(5));
            let t = Tournament::random_biased(10, 0.15, seed);
            if !is_light(&t) {
                continue;
            }
            let wt = WeightedTournament::new(t, wt.weights).unwrap();
            let (s, tr) = layers(&wt, &LpConfig::default()).unwrap();
            assert!(s.weight.clone() * weight::int(4) <= wt.total_weight() * weight::int(3));
            tr.check_structure(wt.tournament.vertices()).unwrap();
            checked += 1;
        }
        assert!(checked > 30, "{checked}");
    }
}
