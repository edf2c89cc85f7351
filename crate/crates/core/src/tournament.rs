//! Tournaments as bit matrices.
//!
//! Vertices are `0..n` with `n <= 64`; every vertex keeps its out- and
//! in-neighbourhood as a `u64` mask so neighbourhood and triangle queries are
//! a handful of word operations.

use std::fmt;

use num_traits::Zero;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solvers::FvsSolution;
use crate::weight::{self, Weight};

/// Largest supported vertex count (one `u64` mask per neighbourhood).
pub const MAX_VERTICES: usize = 64;

/// Largest tournament accepted by [`Tournament::canonical_form`].
pub const MAX_CANONICAL_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TournamentError {
    #[error("tournament has {0} vertices, at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("pair {{{0}, {1}}} is oriented more than once")]
    DuplicatePair(usize, usize),
    #[error("pair {{{0}, {1}}} has no orientation")]
    MissingPair(usize, usize),
    #[error("expected {expected} orientation bits, got {got}")]
    BitCount { expected: usize, got: usize },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight of vertex {0} is negative")]
    NegativeWeight(usize),
    #[error("canonical form needs n <= {MAX_CANONICAL_VERTICES}, got {0}")]
    TooLargeForCanonicalForm(usize),
    #[error("malformed canonical form")]
    MalformedCanonicalForm,
}

/// A set of vertex ids in `0..64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Ascending iteration.
    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = VertexIter;
    fn into_iter(self) -> VertexIter {
        self.iter()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = ids.iter().find(|&&v| v >= MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!("vertex id {bad} out of range")));
        }
        Ok(ids.into_iter().collect())
    }
}

pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for VertexIter {}

/// A directed triangle `a -> b -> c -> a`, rotated so that `a` is the
/// smallest id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triangle {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Triangle {
    /// Builds the canonical rotation of the cycle `x -> y -> z -> x`.
    pub fn from_cycle(x: usize, y: usize, z: usize) -> Self {
        if x < y && x < z {
            Triangle { a: x, b: y, c: z }
        } else if y < z {
            Triangle { a: y, b: z, c: x }
        } else {
            Triangle { a: z, b: x, c: y }
        }
    }

    pub fn vertices(&self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    pub fn set(&self) -> VertexSet {
        VertexSet::singleton(self.a).with(self.b).with(self.c)
    }

    /// The three unordered pairs, each as `(min, max)`.
    pub fn pairs(&self) -> [(usize, usize); 3] {
        let p = |x: usize, y: usize| (x.min(y), x.max(y));
        [p(self.a, self.b), p(self.b, self.c), p(self.a, self.c)]
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Complete orientation of `K_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self
            .orientation_bits()
            .into_iter()
            .map(|b| if b { '1' } else { '0' })
            .collect();
        write!(f, "Tournament(n={}, {bits})", self.n)
    }
}

/// Result of [`Tournament::induced`].
#[derive(Debug, Clone)]
pub struct Induced {
    pub tournament: Tournament,
    /// `to_old[new] = old`.
    pub to_old: Vec<usize>,
}

impl Induced {
    pub fn to_new(&self, old: usize) -> Option<usize> {
        self.to_old.iter().position(|&o| o == old)
    }

    /// Maps a set of new ids back to the parent tournament's ids.
    pub fn lift(&self, set: VertexSet) -> VertexSet {
        set.iter().map(|v| self.to_old[v]).collect()
    }
}

impl Tournament {
    /// Builds a tournament from an explicit arc list covering every pair once.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, TournamentError> {
        if n > MAX_VERTICES {
            return Err(TournamentError::TooManyVertices(n));
        }
        let mut out = vec![0u64; n];
        let mut seen = vec![0u64; n];
        for &(u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(TournamentError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(TournamentError::SelfLoop(u));
            }
            if seen[u] >> v & 1 == 1 {
                return Err(TournamentError::DuplicatePair(u.min(v), u.max(v)));
            }
            seen[u] |= 1 << v;
            seen[v] |= 1 << u;
            out[u] |= 1 << v;
        }
        for u in 0..n {
            for v in u + 1..n {
                if seen[u] >> v & 1 == 0 {
                    return Err(TournamentError::MissingPair(u, v));
                }
            }
        }
        Ok(Self::from_out_masks(out))
    }

    /// Builds from one bit per pair in lexicographic pair order
    /// `(0,1), (0,2), …, (n-2,n-1)`; `true` means `u -> v` for `u < v`.
    pub fn from_orientation_bits(n: usize, bits: &[bool]) -> Result<Self, TournamentError> {
        if n > MAX_VERTICES {
            return Err(TournamentError::TooManyVertices(n));
        }
        let expected = n * n.saturating_sub(1) / 2;
        if bits.len() != expected {
            return Err(TournamentError::BitCount { expected, got: bits.len() });
        }
        let mut out = vec![0u64; n];
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[k] {
                    out[u] |= 1 << v;
                } else {
                    out[v] |= 1 << u;
                }
                k += 1;
            }
        }
        Ok(Self::from_out_masks(out))
    }

    fn from_out_masks(out: Vec<u64>) -> Self {
        let n = out.len();
        let mut inn = vec![0u64; n];
        for (u, &row) in out.iter().enumerate() {
            for v in VertexSet(row) {
                inn[v] |= 1 << u;
            }
        }
        Tournament { n, out, inn }
    }

    /// Transitive tournament with `u -> v` whenever `u < v`; `n - 1` is the sink.
    pub fn transitive(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        let out = (0..n)
            .map(|u| VertexSet::full(n).bits() & !VertexSet::full(u + 1).bits())
            .collect();
        Self::from_out_masks(out)
    }

    /// The directed triangle `0 -> 1 -> 2 -> 0`.
    pub fn cycle3() -> Self {
        Self::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).expect("valid")
    }

    /// Seeded uniform random tournament.
    ///
    /// Pairs are visited in lexicographic order and each takes one `u64` draw
    /// from ChaCha8 seeded with `seed` (`SeedableRng::seed_from_u64`); the
    /// pair is oriented `u -> v` iff the draw's top bit is set. ChaCha8 output
    /// is specified bit-for-bit, so the stream is identical on every platform.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(n, &mut rng)
    }

    pub(crate) fn random_with(n: usize, rng: &mut ChaCha8Rng) -> Self {
        assert!(n <= MAX_VERTICES, "n = {n} exceeds {MAX_VERTICES}");
        let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for _u in 0..n {
            for _v in _u + 1..n {
                bits.push(rng.next_u64() >> 63 == 1);
            }
        }
        Self::from_orientation_bits(n, &bits).expect("bit count matches")
    }

    /// Seeded near-transitive tournament: starts from [`Tournament::transitive`]
    /// and reverses each arc independently with probability `flip`.
    pub fn random_biased(n: usize, flip: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let threshold = (flip.clamp(0.0, 1.0) * 2f64.powi(53)) as u64;
        let mut bits = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for _v in u + 1..n {
                bits.push(rng.next_u64() >> 11 >= threshold);
            }
        }
        Self::from_orientation_bits(n, &bits).expect("bit count matches")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// `true` iff the arc `u -> v` is present.
    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn out_set(&self, v: usize) -> VertexSet {
        VertexSet(self.out[v])
    }

    pub fn in_set(&self, v: usize) -> VertexSet {
        VertexSet(self.inn[v])
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].count_ones() as usize
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].count_ones() as usize
    }

    pub fn orientation_bits(&self) -> Vec<bool> {
        let mut bits = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 0..self.n {
            for v in u + 1..self.n {
                bits.push(self.beats(u, v));
            }
        }
        bits
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for u in 0..self.n {
            for v in self.out_set(u) {
                arcs.push((u, v));
            }
        }
        arcs
    }

    /// `true` iff `{x, y, z}` induces a directed triangle.
    pub fn is_triangle(&self, x: usize, y: usize, z: usize) -> bool {
        if self.beats(x, y) {
            self.beats(y, z) && self.beats(z, x)
        } else {
            self.beats(z, y) && self.beats(x, z)
        }
    }

    /// Vertices `c` closing the cycle `u -> v -> c -> u`.
    pub fn closing(&self, u: usize, v: usize) -> VertexSet {
        VertexSet(self.out[v] & self.inn[u])
    }

    /// All directed triangles, canonical rotation, lexicographic order.
    pub fn triangles(&self) -> Vec<Triangle> {
        self.triangles_within(self.vertices())
    }

    /// Directed triangles of the subtournament induced by `set`, in the
    /// original ids.
    pub fn triangles_within(&self, set: VertexSet) -> Vec<Triangle> {
        let mut out = Vec::new();
        for a in set {
            let above = set.bits() & u64::MAX.checked_shl(a as u32 + 1).unwrap_or(0);
            for b in VertexSet(self.out[a] & above) {
                for c in VertexSet(self.out[b] & self.inn[a] & above) {
                    out.push(Triangle { a, b, c });
                }
            }
        }
        out
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles().len()
    }

    /// Some directed triangle inside `set`, if any.
    pub fn find_triangle_within(&self, set: VertexSet) -> Option<Triangle> {
        for a in set {
            for b in VertexSet(self.out[a] & set.bits()) {
                let c = VertexSet(self.out[b] & self.inn[a] & set.bits());
                if let Some(c) = c.min() {
                    return Some(Triangle::from_cycle(a, b, c));
                }
            }
        }
        None
    }

    /// Topological order of the tournament if it is acyclic.
    ///
    /// A tournament is acyclic iff its in-degree sequence is a permutation
    /// of `0..n`; the order is then by increasing in-degree.
    pub fn is_acyclic(&self) -> Option<Vec<usize>> {
        self.topological_order_within(self.vertices())
    }

    /// Topological order of the subtournament induced by `set`.
    pub fn topological_order_within(&self, set: VertexSet) -> Option<Vec<usize>> {
        let k = set.len();
        let mut slot = vec![usize::MAX; k];
        for v in set {
            let d = (self.inn[v] & set.bits()).count_ones() as usize;
            if slot[d] != usize::MAX {
                return None;
            }
            slot[d] = v;
        }
        Some(slot)
    }

    pub fn is_acyclic_within(&self, set: VertexSet) -> bool {
        let mut seen = 0u64;
        for v in set {
            let d = (self.inn[v] & set.bits()).count_ones();
            if seen >> d & 1 == 1 {
                return false;
            }
            seen |= 1 << d;
        }
        true
    }

    /// Subtournament induced by `set`; new ids follow ascending old ids.
    pub fn induced(&self, set: VertexSet) -> Result<Induced, TournamentError> {
        if let Some(bad) = set.difference(self.vertices()).min() {
            return Err(TournamentError::VertexOutOfRange { vertex: bad, n: self.n });
        }
        let to_old = set.to_vec();
        let k = to_old.len();
        let mut out = vec![0u64; k];
        for (i, &u) in to_old.iter().enumerate() {
            for (j, &v) in to_old.iter().enumerate() {
                if self.beats(u, v) {
                    out[i] |= 1 << j;
                }
            }
        }
        Ok(Induced { tournament: Self::from_out_masks(out), to_old })
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = vec![0u64; self.n];
        for u in 0..self.n {
            for v in self.out_set(u) {
                out[perm[u]] |= 1 << perm[v];
            }
        }
        Self::from_out_masks(out)
    }

    /// Canonical isomorphism-invariant encoding, see [`CanonicalForm`].
    pub fn canonical_form(&self) -> Result<CanonicalForm, TournamentError> {
        crate::tournament::canon::canonical_form(self)
    }
}

/// A tournament with exact nonnegative vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTournament {
    pub tournament: Tournament,
    pub weights: Vec<Weight>,
}

/// How random instances draw their weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightScheme {
    Unit,
    /// Uniform integer in `1..=k`.
    UniformInt(u32),
}

impl WeightedTournament {
    pub fn new(tournament: Tournament, weights: Vec<Weight>) -> Result<Self, TournamentError> {
        if weights.len() != tournament.n() {
            return Err(TournamentError::WeightCount {
                expected: tournament.n(),
                got: weights.len(),
            });
        }
        if let Some(v) = weights.iter().position(|w| *w < Weight::zero()) {
            return Err(TournamentError::NegativeWeight(v));
        }
        Ok(WeightedTournament { tournament, weights })
    }

    pub fn unit(tournament: Tournament) -> Self {
        let weights = vec![weight::int(1); tournament.n()];
        WeightedTournament { tournament, weights }
    }

    /// Random tournament from [`Tournament::random`] with weights drawn from
    /// the same ChaCha8 stream after all orientation draws.
    pub fn random(n: usize, seed: u64, scheme: WeightScheme) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tournament = Tournament::random_with(n, &mut rng);
        let weights = match scheme {
            WeightScheme::Unit => vec![weight::int(1); n],
            WeightScheme::UniformInt(k) => {
                let k = u64::from(k.max(1));
                (0..n).map(|_| weight::int((rng.next_u64() % k) as i64 + 1)).collect()
            }
        };
        WeightedTournament { tournament, weights }
    }

    pub fn n(&self) -> usize {
        self.tournament.n()
    }

    pub fn weight_of(&self, set: VertexSet) -> Weight {
        weight::sum(set.iter().map(|v| &self.weights[v]))
    }

    pub fn total_weight(&self) -> Weight {
        weight::sum(&self.weights)
    }

    pub fn induced(&self, set: VertexSet) -> Result<(WeightedTournament, Induced), TournamentError> {
        let ind = self.tournament.induced(set)?;
        let weights = ind.to_old.iter().map(|&v| self.weights[v].clone()).collect();
        Ok((WeightedTournament { tournament: ind.tournament.clone(), weights }, ind))
    }
}

/// Outcome of [`verify_fvs`].
#[derive(Debug, Clone, PartialEq)]
pub enum FvsCheck {
    Valid(FvsSolution),
    /// A triangle surviving in `T - X`.
    Violation(Triangle),
}

impl FvsCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, FvsCheck::Valid(_))
    }

    pub fn solution(self) -> Option<FvsSolution> {
        match self {
            FvsCheck::Valid(s) => Some(s),
            FvsCheck::Violation(_) => None,
        }
    }
}

/// Checks that `T - x` is acyclic and, if so, packages the certificate.
pub fn verify_fvs(wt: &WeightedTournament, x: VertexSet) -> FvsCheck {
    let t = &wt.tournament;
    let rest = t.vertices().difference(x);
    match t.topological_order_within(rest) {
        Some(order) => FvsCheck::Valid(FvsSolution {
            chosen: x.intersection(t.vertices()),
            weight: wt.weight_of(x.intersection(t.vertices())),
            certificate: order,
            bound_used: None,
        }),
        None => FvsCheck::Violation(
            t.find_triangle_within(rest)
                .expect("a cyclic tournament contains a directed triangle"),
        ),
    }
}

mod canon;
pub use canon::CanonicalForm;
