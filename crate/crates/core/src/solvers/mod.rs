//! FVST solvers: exact branch and bound, CDZ for `T5`-free tournaments, the
//! local-ratio 3-approximation, the layering algorithm and the full
//! 7/3-approximation pipeline.

mod cdz;
mod exact;
mod layers;
mod local_ratio;
mod rounding;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::LpError;
use crate::tournament::{Triangle, VertexSet, WeightedTournament};
use crate::weight::Weight;

pub use cdz::{cdz, CdzOutcome};
pub use exact::{exact_fvs, MAX_EXACT_VERTICES};
pub use layers::{layers, LayerEntry, LayerKind, LayeringTrace, SpanFinding};
pub use local_ratio::local_ratio_3approx;
pub use rounding::{half_rounding, HalfRounding, fvst_7_3, rounding_phase, RoundingTrace, Sa73Outcome};

/// LP value that certifies the approximation ratio of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundUsed {
    pub level: u8,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvsSolution {
    pub chosen: VertexSet,
    #[serde(with = "weight_string")]
    pub weight: Weight,
    /// Topological order of the vertices left after deleting `chosen`.
    pub certificate: Vec<usize>,
    pub bound_used: Option<BoundUsed>,
}

pub(crate) mod weight_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::weight::{self, Weight};

    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&weight::format(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        let s = String::deserialize(d)?;
        weight::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Everything needed to reproduce an invariant breach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub check: String,
    pub detail: String,
    /// The offending instance in the text format of [`crate::io`].
    pub instance: String,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("{what} supports n <= {cap}, got {n}")]
    TooLarge { what: &'static str, n: usize, cap: usize },
    #[error("tournament is not T5-free: {0:?} induces a T5 member")]
    NotT5Free(VertexSet),
    #[error("tournament is not light: triangle {0} is heavy")]
    NotLight(Triangle),
    #[error("vertex {0} has weight zero, positive weights required")]
    NonPositiveWeight(usize),
    #[error("weights do not fit a common integer scale")]
    WeightOverflow,
    #[error("no 2-in-dominating pair for layer {index} (targets {targets:?})")]
    NoDominatingPair { index: usize, targets: VertexSet },
    #[error("CDZ rounding failed: {0}")]
    SnapFailure(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("invariant breach in {}: {}", .0.check, .0.detail)]
    InvariantBreach(Box<Diagnostic>),
}

impl SolveError {
    /// Errors caused by the caller's input rather than by the solver.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            SolveError::TooLarge { .. }
                | SolveError::NotT5Free(_)
                | SolveError::NotLight(_)
                | SolveError::NonPositiveWeight(_)
                | SolveError::WeightOverflow
                | SolveError::Lp(LpError::TooLarge { .. })
        )
    }

    pub(crate) fn breach(wt: &WeightedTournament, check: &str, detail: String) -> Self {
        SolveError::InvariantBreach(Box::new(Diagnostic {
            check: check.to_string(),
            detail,
            instance: crate::io::emit_instance(wt),
        }))
    }
}

pub(crate) fn require_positive(wt: &WeightedTournament) -> Result<(), SolveError> {
    use num_traits::Zero;
    match wt.weights.iter().position(|w| w.is_zero()) {
        Some(v) => Err(SolveError::NonPositiveWeight(v)),
        None => Ok(()),
    }
}
