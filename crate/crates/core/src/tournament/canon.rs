//! Canonical forms by refined permutation search.
//!
//! Vertices are first split into an ordered equitable partition (start from
//! in-degree classes, then split by the number of out-neighbours in each
//! class until stable). Both steps are label-invariant, so canonical labellings
//! only permute vertices within a class. Among those labellings we take the
//! one minimising the orientation bit string in colex pair order
//! `(0,1), (0,2), (1,2), (0,3), …`: fixing the vertex at position `p` fixes
//! exactly the next block of bits, which lets the search prune on prefixes.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Tournament, TournamentError, MAX_CANONICAL_VERTICES};

/// Isomorphism-invariant encoding: byte 0 is `n`, then the minimal colex
/// orientation bit string packed MSB-first (bit `1` at pair `(i, j)`, `i < j`,
/// means position `i` beats position `j`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0[0] as usize
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, TournamentError> {
        let bytes = hex::decode(s).map_err(|_| TournamentError::MalformedCanonicalForm)?;
        Self::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self, TournamentError> {
        let n = *bytes.first().ok_or(TournamentError::MalformedCanonicalForm)? as usize;
        if n > MAX_CANONICAL_VERTICES || bytes.len() != 1 + pair_count(n).div_ceil(8) {
            return Err(TournamentError::MalformedCanonicalForm);
        }
        Ok(CanonicalForm(bytes))
    }

    fn bit(&self, k: usize) -> bool {
        self.0[1 + k / 8] >> (7 - k % 8) & 1 == 1
    }

    /// The canonical representative itself.
    pub fn to_tournament(&self) -> Tournament {
        let n = self.n();
        let mut arcs = Vec::with_capacity(pair_count(n));
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                arcs.push(if self.bit(k) { (i, j) } else { (j, i) });
                k += 1;
            }
        }
        Tournament::from_arcs(n, &arcs).expect("canonical bits cover every pair")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalForm::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub(super) fn canonical_form(t: &Tournament) -> Result<CanonicalForm, TournamentError> {
    let n = t.n();
    if n > MAX_CANONICAL_VERTICES {
        return Err(TournamentError::TooLargeForCanonicalForm(n));
    }
    let cells = equitable_partition(t);
    let cell_of_pos: Vec<u64> = cells
        .iter()
        .flat_map(|c| {
            let mask = c.iter().fold(0u64, |m, &v| m | 1 << v);
            std::iter::repeat_n(mask, c.len())
        })
        .collect();
    let mut search = Search {
        t,
        cell_of_pos,
        placed: Vec::with_capacity(n),
        bits: Vec::with_capacity(pair_count(n)),
        best: None,
    };
    search.run(0, false);
    let best = search.best.unwrap_or_default();
    let mut bytes = vec![0u8; 1 + best.len().div_ceil(8)];
    bytes[0] = n as u8;
    for (k, &b) in best.iter().enumerate() {
        if b {
            bytes[1 + k / 8] |= 1 << (7 - k % 8);
        }
    }
    Ok(CanonicalForm(bytes))
}

/// Ordered, label-invariant partition of the vertices.
fn equitable_partition(t: &Tournament) -> Vec<Vec<usize>> {
    let n = t.n();
    let mut cell = vec![0usize; n];
    let mut sig: Vec<(usize, usize)> = (0..n).map(|v| (t.in_degree(v), v)).collect();
    sig.sort();
    let mut count = 0;
    for (i, &(d, v)) in sig.iter().enumerate() {
        if i > 0 && d != sig[i - 1].0 {
            count += 1;
        }
        cell[v] = count;
    }
    let mut ncells = if n == 0 { 0 } else { count + 1 };
    loop {
        let mut keyed: Vec<(Vec<usize>, usize)> = (0..n)
            .map(|v| {
                let mut key = vec![0usize; ncells + 1];
                key[0] = cell[v];
                for w in t.out_set(v) {
                    key[1 + cell[w]] += 1;
                }
                (key, v)
            })
            .collect();
        keyed.sort();
        let mut next = 0;
        for i in 0..n {
            if i > 0 && keyed[i].0 != keyed[i - 1].0 {
                next += 1;
            }
            cell[keyed[i].1] = next;
        }
        let refined = if n == 0 { 0 } else { next + 1 };
        if refined == ncells {
            break;
        }
        ncells = refined;
    }
    let mut cells = vec![Vec::new(); ncells];
    for v in 0..n {
        cells[cell[v]].push(v);
    }
    cells
}

struct Search<'a> {
    t: &'a Tournament,
    cell_of_pos: Vec<u64>,
    placed: Vec<usize>,
    bits: Vec<bool>,
    best: Option<Vec<bool>>,
}

impl Search<'_> {
    /// Returns `true` when `best` was replaced somewhere below this node.
    fn run(&mut self, pos: usize, mut prefix_less: bool) -> bool {
        let n = self.t.n();
        if pos == n {
            if self.best.is_none() || prefix_less {
                self.best = Some(self.bits.clone());
                return true;
            }
            return false;
        }
        let used = self.placed.iter().fold(0u64, |m, &v| m | 1 << v);
        let candidates = super::VertexSet(self.cell_of_pos[pos] & !used);
        let base = pos * pos.saturating_sub(1) / 2;
        let mut improved = false;
        for v in candidates {
            let block: Vec<bool> = self.placed.iter().map(|&u| self.t.beats(u, v)).collect();
            let mut less = prefix_less;
            if !less {
                if let Some(best) = &self.best {
                    match block.as_slice().cmp(&best[base..base + pos]) {
                        Ordering::Greater => continue,
                        Ordering::Less => less = true,
                        Ordering::Equal => {}
                    }
                }
            }
            self.placed.push(v);
            self.bits.extend_from_slice(&block);
            if self.run(pos + 1, less) {
                improved = true;
                // best now shares this node's prefix
                prefix_less = false;
            }
            self.bits.truncate(base);
            self.placed.pop();
        }
        improved
    }
}
