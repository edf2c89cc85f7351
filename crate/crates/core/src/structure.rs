//! Structural predicates used by the layering algorithm.
//!
//! A pair `ab` is a *diagonal* when some pair `uv` forms a directed triangle
//! with both `a` and `b`. A triangle with at least two diagonal pairs is
//! *heavy*; a tournament without heavy triangles is *light*.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tournament::{CanonicalForm, Tournament, TournamentError, Triangle, VertexSet};
use crate::weight::{self, Weight};

/// Largest tournament accepted by [`min_fvs_size`].
pub const MAX_MIN_FVS_VERTICES: usize = 16;

/// Largest order accepted by [`enumerate_family`].
pub const MAX_FAMILY_ORDER: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("{what} supports n <= {cap}, got {n}")]
    TooLarge { what: &'static str, n: usize, cap: usize },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// Witness that `{a, b}` is a diagonal: `{u, v, a}` and `{u, v, b}` are
/// both directed triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub pair: (usize, usize),
    pub witnesses: (usize, usize),
}

/// Returns the lexicographically first witness pair `(u, v)`, `u < v`.
pub fn is_diagonal(t: &Tournament, a: usize, b: usize) -> Option<DiagonalReport> {
    assert_ne!(a, b, "a diagonal needs two distinct vertices");
    let others = t.vertices().without(a).without(b);
    for u in others {
        for v in others {
            if v <= u {
                continue;
            }
            if t.is_triangle(u, v, a) && t.is_triangle(u, v, b) {
                return Some(DiagonalReport { pair: (a, b), witnesses: (u, v) });
            }
        }
    }
    None
}

/// `diag[a]` is the set of `b` such that `ab` is a diagonal.
pub fn diagonal_masks(t: &Tournament) -> Vec<VertexSet> {
    let mut diag = vec![VertexSet::EMPTY; t.n()];
    for u in t.vertices() {
        for v in t.out_set(u) {
            let closing = t.closing(u, v);
            for a in closing {
                diag[a] = diag[a].union(closing.without(a));
            }
        }
    }
    diag
}

/// A heavy triangle together with its diagonal pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeavyTriangle {
    pub triangle: Triangle,
    pub diagonals: Vec<(usize, usize)>,
}

pub fn heavy_triangles(t: &Tournament) -> Vec<HeavyTriangle> {
    let diag = diagonal_masks(t);
    t.triangles()
        .into_iter()
        .filter_map(|tri| {
            let diagonals: Vec<_> =
                tri.pairs().into_iter().filter(|&(x, y)| diag[x].contains(y)).collect();
            (diagonals.len() >= 2).then_some(HeavyTriangle { triangle: tri, diagonals })
        })
        .collect()
}

/// First heavy triangle in lexicographic order, if any.
pub fn first_heavy_triangle(t: &Tournament) -> Option<HeavyTriangle> {
    let diag = diagonal_masks(t);
    t.triangles().into_iter().find_map(|tri| {
        let diagonals: Vec<_> =
            tri.pairs().into_iter().filter(|&(x, y)| diag[x].contains(y)).collect();
        (diagonals.len() >= 2).then_some(HeavyTriangle { triangle: tri, diagonals })
    })
}

pub fn is_light(t: &Tournament) -> bool {
    first_heavy_triangle(t).is_none()
}

/// `{ v in universe \ s : v -> u for some u in s }`.
pub fn in_neighborhood(t: &Tournament, s: VertexSet, universe: VertexSet) -> VertexSet {
    let mut into = VertexSet::EMPTY;
    for u in s {
        into = into.union(t.in_set(u));
    }
    into.intersection(universe).difference(s)
}

/// BFS in-layers towards `z` inside `universe`: `V_1 = {z}` and each next
/// layer is the in-neighbourhood of everything seen so far.
pub fn bfs_layers(t: &Tournament, z: usize, universe: VertexSet) -> Vec<VertexSet> {
    assert!(universe.contains(z), "root must lie in the universe");
    let mut layers = vec![VertexSet::singleton(z)];
    let mut seen = VertexSet::singleton(z);
    loop {
        let next = in_neighborhood(t, seen, universe);
        if next.is_empty() {
            return layers;
        }
        seen = seen.union(next);
        layers.push(next);
    }
}

/// Two (possibly equal) vertices into which every target has an arc, with
/// `w(N(z) ∩ targets) >= w(N(z2) ∩ targets)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatingPair {
    pub z: usize,
    pub z2: usize,
}

/// Searches unordered pairs `{a, b}` of `candidates` (`a <= b`) in
/// lexicographic order for one that in-dominates `targets`, then orders it
/// heavier in-neighbourhood first, smaller id on ties.
pub fn find_2_in_dominating_pair(
    t: &Tournament,
    candidates: VertexSet,
    targets: VertexSet,
    weights: &[Weight],
) -> Option<DominatingPair> {
    for a in candidates {
        let rest = targets.difference(t.in_set(a));
        for b in candidates {
            if b < a {
                continue;
            }
            if rest.is_subset(t.in_set(b)) {
                let wa = weight::sum(t.in_set(a).intersection(targets).iter().map(|v| &weights[v]));
                let wb = weight::sum(t.in_set(b).intersection(targets).iter().map(|v| &weights[v]));
                let (z, z2) = if wb > wa { (b, a) } else { (a, b) };
                return Some(DominatingPair { z, z2 });
            }
        }
    }
    None
}

/// Minimum FVS size of the subtournament on `alive`, by 3-way branching on
/// an uncovered triangle with iterative deepening.
fn min_fvs_within(t: &Tournament, alive: VertexSet) -> usize {
    fn within(t: &Tournament, alive: VertexSet, k: usize) -> bool {
        match t.find_triangle_within(alive) {
            None => true,
            Some(_) if k == 0 => false,
            Some(tri) => tri.vertices().into_iter().any(|v| within(t, alive.without(v), k - 1)),
        }
    }
    (0..).find(|&k| within(t, alive, k)).expect("deleting all vertices always works")
}

pub fn min_fvs_size(t: &Tournament) -> Result<usize, StructureError> {
    if t.n() > MAX_MIN_FVS_VERTICES {
        return Err(StructureError::TooLarge {
            what: "min_fvs_size",
            n: t.n(),
            cap: MAX_MIN_FVS_VERTICES,
        });
    }
    Ok(min_fvs_within(t, t.vertices()))
}

/// One member of a [`FamilyCensus`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusMember {
    pub canonical: CanonicalForm,
    pub light: bool,
}

/// Isomorphism classes of `order`-vertex tournaments whose minimum FVS has
/// size at least `fvs_size`, sorted by canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCensus {
    pub order: usize,
    pub fvs_size: usize,
    pub members: Vec<CensusMember>,
    pub heavy_count: usize,
    pub light_count: usize,
}

impl FamilyCensus {
    fn from_forms(order: usize, fvs_size: usize, forms: BTreeSet<CanonicalForm>) -> Self {
        let members: Vec<CensusMember> = forms
            .into_iter()
            .map(|canonical| {
                let light = is_light(&canonical.to_tournament());
                CensusMember { canonical, light }
            })
            .collect();
        let light_count = members.iter().filter(|m| m.light).count();
        FamilyCensus {
            order,
            fvs_size,
            heavy_count: members.len() - light_count,
            light_count,
            members,
        }
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.members.binary_search_by(|m| m.canonical.cmp(form)).is_ok()
    }

    /// Merges two censuses of the same family (set union by canonical form).
    pub fn merge(self, other: FamilyCensus) -> FamilyCensus {
        assert_eq!((self.order, self.fvs_size), (other.order, other.fvs_size));
        let forms = self.members.into_iter().chain(other.members).map(|m| m.canonical).collect();
        FamilyCensus::from_forms(self.order, self.fvs_size, forms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        let mut c: FamilyCensus = serde_json::from_str(s)?;
        c.members.sort_by(|a, b| a.canonical.cmp(&b.canonical));
        Ok(c)
    }
}

/// All isomorphism classes of tournaments on `k` vertices, by growing the
/// classes on `k - 1` vertices with one new vertex in all `2^(k-1)` ways.
pub fn isomorphism_classes(k: usize) -> Result<BTreeSet<CanonicalForm>, StructureError> {
    if k > crate::tournament::MAX_CANONICAL_VERTICES {
        return Err(TournamentError::TooLargeForCanonicalForm(k).into());
    }
    let mut classes: BTreeSet<CanonicalForm> =
        [Tournament::transitive(0).canonical_form()?].into_iter().collect();
    for m in 0..k {
        let mut next = BTreeSet::new();
        for form in &classes {
            let base = form.to_tournament();
            for mask in 0u64..(1 << m) {
                let mut arcs = base.arcs();
                for u in 0..m {
                    arcs.push(if mask >> u & 1 == 1 { (u, m) } else { (m, u) });
                }
                next.insert(Tournament::from_arcs(m + 1, &arcs)?.canonical_form()?);
            }
        }
        classes = next;
    }
    Ok(classes)
}

/// Family census over labeled tournaments (`2^C(k,2)` of them).
pub fn enumerate_family_labeled(k: usize, f: usize) -> Result<FamilyCensus, StructureError> {
    if k > 6 {
        return Err(StructureError::TooLarge { what: "labeled enumeration", n: k, cap: 6 });
    }
    let m = k * k.saturating_sub(1) / 2;
    let mut forms = BTreeSet::new();
    for mask in 0u32..(1 << m) {
        let bits: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        let t = Tournament::from_orientation_bits(k, &bits)?;
        if min_fvs_within(&t, t.vertices()) >= f {
            forms.insert(t.canonical_form()?);
        }
    }
    Ok(FamilyCensus::from_forms(k, f, forms))
}

/// Census of `k`-vertex tournaments with no FVS smaller than `f`, each
/// class classified light or heavy. For `k = 7, f = 3` this includes the
/// regular tournament whose minimum FVS has four vertices. Orders up to 5 enumerate labeled tournaments;
/// 6 and 7 extend canonical forms one vertex at a time.
pub fn enumerate_family(k: usize, f: usize) -> Result<FamilyCensus, StructureError> {
    if k > MAX_FAMILY_ORDER {
        return Err(StructureError::TooLarge { what: "enumerate_family", n: k, cap: MAX_FAMILY_ORDER });
    }
    if k <= 5 {
        return enumerate_family_labeled(k, f);
    }
    let forms = isomorphism_classes(k)?
        .into_iter()
        .filter(|form| {
            let t = form.to_tournament();
            min_fvs_within(&t, t.vertices()) >= f
        })
        .collect();
    Ok(FamilyCensus::from_forms(k, f, forms))
}

/// The three `T5` classes (5 vertices, minimum FVS 2), computed once.
pub fn t5_census() -> &'static FamilyCensus {
    static T5: OnceLock<FamilyCensus> = OnceLock::new();
    T5.get_or_init(|| enumerate_family(5, 2).expect("order 5 is supported"))
}

/// First 5-subset (lexicographic) inducing a member of `T5`, if any.
pub fn is_t5_free(t: &Tournament) -> Option<VertexSet> {
    let census = t5_census();
    let verts = t.vertices().to_vec();
    let n = verts.len();
    if n < 5 {
        return None;
    }
    let mut idx = [0usize, 1, 2, 3, 4];
    loop {
        let set: VertexSet = idx.iter().map(|&i| verts[i]).collect();
        if quick_t5_candidate(t, set) {
            let sub = t.induced(set).expect("subset of V").tournament;
            if census.contains(&sub.canonical_form().expect("5 vertices")) {
                return Some(set);
            }
        }
        // next combination
        let mut i = 5;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - 5 + i {
                idx[i] += 1;
                for j in i + 1..5 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A 5-set has minimum FVS 2 iff it has a triangle and no vertex meets
/// every triangle.
fn quick_t5_candidate(t: &Tournament, set: VertexSet) -> bool {
    let tris = t.triangles_within(set);
    if tris.is_empty() {
        return false;
    }
    let common = tris.iter().fold(set, |acc, tri| acc.intersection(tri.set()));
    common.is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::WeightedTournament;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;

    fn light_t5(a_beats_b: bool) -> Tournament {
        let ab = if a_beats_b { (A, B) } else { (B, A) };
        Tournament::from_arcs(
            5,
            &[(E, A), (E, C), (D, E), (B, E), (C, A), (C, B), (D, C), (A, D), (B, D), ab],
        )
        .unwrap()
    }

    fn heavy_t5() -> Tournament {
        Tournament::from_arcs(
            5,
            &[(A, B), (E, C), (D, E), (B, E), (C, A), (B, C), (C, D), (D, A), (B, D), (E, A)],
        )
        .unwrap()
    }

    #[test]
    fn diagonals_in_acyclic_tournaments() {
        let t = Tournament::transitive(6);
        for a in 0..6 {
            for b in 0..6 {
                if a != b {
                    assert!(is_diagonal(&t, a, b).is_none());
                }
            }
        }
    }

    #[test]
    fn diagonal_symmetry_and_masks() {
        for seed in 0..40 {
            let t = Tournament::random(9, seed);
            let masks = diagonal_masks(&t);
            for a in 0..9 {
                for b in 0..9 {
                    if a == b {
                        continue;
                    }
                    let r = is_diagonal(&t, a, b);
                    assert_eq!(r.is_some(), is_diagonal(&t, b, a).is_some());
                    assert_eq!(r.is_some(), masks[a].contains(b));
                    if let Some(r) = r {
                        let (u, v) = r.witnesses;
                        assert!(t.is_triangle(u, v, a) && t.is_triangle(u, v, b));
                    }
                }
            }
        }
    }

    #[test]
    fn five_vertex_members_classification() {
        assert!(heavy_triangles(&Tournament::cycle3()).is_empty());
        assert!(is_light(&Tournament::transitive(7)));
        let heavy = heavy_triangles(&heavy_t5());
        let dec = Triangle::from_cycle(D, E, C);
        assert!(heavy.iter().any(|h| h.triangle == dec), "{heavy:?}");
        assert!(!is_light(&heavy_t5()));
        for ab in [true, false] {
            assert!(heavy_triangles(&light_t5(ab)).is_empty());
            assert!(is_light(&light_t5(ab)));
        }
    }

    #[test]
    fn neighbourhoods_and_layers() {
        let c3 = Tournament::cycle3();
        let all = c3.vertices();
        assert_eq!(in_neighborhood(&c3, all, all), VertexSet::EMPTY);
        assert_eq!(in_neighborhood(&c3, VertexSet::singleton(0), all), VertexSet::singleton(2));
        assert_eq!(
            bfs_layers(&c3, 0, all),
            vec![VertexSet::singleton(0), VertexSet::singleton(2), VertexSet::singleton(1)]
        );
        let tr = Tournament::transitive(5);
        assert_eq!(
            bfs_layers(&tr, 4, tr.vertices()),
            vec![VertexSet::singleton(4), VertexSet::full(4)]
        );
        let t = light_t5(true);
        let be: VertexSet = [B, D].into_iter().collect();
        assert_eq!(in_neighborhood(&t, VertexSet::singleton(E), t.vertices()), be);
        assert_eq!(bfs_layers(&t, E, t.vertices())[1], be);
    }

    #[test]
    fn bfs_layers_skip_no_layer() {
        for seed in 0..50 {
            let t = Tournament::random(12, seed);
            let layers = bfs_layers(&t, (seed % 12) as usize, t.vertices());
            let mut union = VertexSet::EMPTY;
            for (i, li) in layers.iter().enumerate() {
                assert!(union.is_disjoint(*li));
                union = union.union(*li);
                for (j, lj) in layers.iter().enumerate() {
                    if j > i + 1 {
                        for x in *lj {
                            for y in *li {
                                assert!(!t.beats(x, y), "arc from layer {j} to {i}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn domination_pairs() {
        let c3 = Tournament::cycle3();
        let w = vec![weight::int(1); 3];
        let all = c3.vertices();
        assert_eq!(
            find_2_in_dominating_pair(&c3, all, VertexSet::EMPTY, &w),
            Some(DominatingPair { z: 0, z2: 0 })
        );
        assert_eq!(
            find_2_in_dominating_pair(&c3, VertexSet::singleton(0), VertexSet::singleton(2), &w),
            Some(DominatingPair { z: 0, z2: 0 })
        );
        assert_eq!(
            find_2_in_dominating_pair(&c3, VertexSet::singleton(0), VertexSet::singleton(1), &w),
            None
        );
    }

    #[test]
    fn t5_freeness() {
        assert!(is_t5_free(&Tournament::cycle3()).is_none());
        assert_eq!(is_t5_free(&heavy_t5()), Some(VertexSet::full(5)));
        assert_eq!(is_t5_free(&light_t5(false)), Some(VertexSet::full(5)));
        assert!(is_t5_free(&Tournament::transitive(10)).is_none());
    }

    #[test]
    fn min_fvs_sizes() {
        assert_eq!(min_fvs_size(&Tournament::transitive(6)).unwrap(), 0);
        assert_eq!(min_fvs_size(&Tournament::cycle3()).unwrap(), 1);
        assert_eq!(min_fvs_size(&heavy_t5()).unwrap(), 2);
        assert!(min_fvs_size(&Tournament::transitive(17)).is_err());
    }

    #[test]
    fn t5_census_shape() {
        let c = enumerate_family(5, 2).unwrap();
        assert_eq!(c.members.len(), 3);
        assert_eq!(c.heavy_count, 1);
        assert_eq!(c.light_count, 2);
        assert!(c.contains(&heavy_t5().canonical_form().unwrap()));
        let a = light_t5(true).canonical_form().unwrap();
        let b = light_t5(false).canonical_form().unwrap();
        assert_ne!(a, b);
        assert!(c.contains(&a) && c.contains(&b));
        let back = FamilyCensus::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn class_counts_and_the_four_deletion_class() {
        let counts: Vec<usize> = (1..=7).map(|k| isomorphism_classes(k).unwrap().len()).collect();
        assert_eq!(counts, [1, 1, 2, 4, 12, 56, 456]);
        let four: Vec<_> = isomorphism_classes(7)
            .unwrap()
            .into_iter()
            .filter(|c| min_fvs_size(&c.to_tournament()).unwrap() == 4)
            .collect();
        assert_eq!(four.len(), 1);
        let t = four[0].to_tournament();
        assert!((0..7).all(|v| t.out_degree(v) == 3));
        assert!(!is_light(&t));
    }

    #[test]
    fn extension_matches_labeled_enumeration() {
        for k in 3..=6 {
            let classes = isomorphism_classes(k).unwrap();
            for f in 0..=2 {
                let labeled = enumerate_family_labeled(k, f).unwrap();
                let ext: BTreeSet<_> = classes
                    .iter()
                    .filter(|c| min_fvs_size(&c.to_tournament()).unwrap() >= f)
                    .cloned()
                    .collect();
                let lab: BTreeSet<_> = labeled.members.iter().map(|m| m.canonical.clone()).collect();
                assert_eq!(ext, lab, "k = {k}, f = {f}");
            }
        }
    }

    #[test]
    fn lightness_is_hereditary() {
        let mut checked = 0;
        for seed in 0..400 {
            let t = Tournament::random_biased(9, 0.15, seed);
            if !is_light(&t) {
                continue;
            }
            checked += 1;
            for v in 0..9 {
                let sub = t.induced(t.vertices().without(v)).unwrap().tournament;
                assert!(is_light(&sub));
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn crossed_five_vertex_configuration_is_heavy() {
        // z, u1, u2, v1, v2 = 0..5
        let (z, u1, u2, v1, v2) = (0, 1, 2, 3, 4);
        let fixed = [(u1, z), (u2, z), (v1, u1), (v2, u2), (z, v1), (z, v2), (u1, v2), (u2, v1)];
        for (uu, vv) in [((u1, u2), (v2, v1)), ((u2, u1), (v1, v2))] {
            let mut arcs = fixed.to_vec();
            arcs.push(uu);
            arcs.push(vv);
            let t = Tournament::from_arcs(5, &arcs).unwrap();
            assert!(!is_light(&t));
        }
        // the diagonal named in the argument
        let mut arcs = fixed.to_vec();
        arcs.extend([(u1, u2), (v2, v1)]);
        let t = Tournament::from_arcs(5, &arcs).unwrap();
        assert!(is_diagonal(&t, z, v2).is_some());
        assert!(t.is_triangle(v1, u1, z) && t.is_triangle(v1, u1, v2));
    }

    #[test]
    fn domination_rule_prefers_heavier_in_neighbourhood() {
        // targets 2,3,4; vertex 0 is beaten by 2; vertex 1 by 3 and 4
        let arcs = [(2, 0), (0, 3), (0, 4), (3, 1), (4, 1), (1, 2), (0, 1), (2, 3), (3, 4), (2, 4)];
        let t = Tournament::from_arcs(5, &arcs).unwrap();
        let wt = WeightedTournament::unit(t);
        let targets: VertexSet = [2, 3, 4].into_iter().collect();
        let p = find_2_in_dominating_pair(
            &wt.tournament,
            [0, 1].into_iter().collect(),
            targets,
            &wt.weights,
        )
        .unwrap();
        assert_eq!(p, DominatingPair { z: 1, z2: 0 });
    }
}
