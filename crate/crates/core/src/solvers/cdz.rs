//! Exact FVS for `T5`-free tournaments via the integral triangle relaxation.

use serde::{Deserialize, Serialize};

use super::{exact_fvs, BoundUsed, FvsSolution, SolveError, MAX_EXACT_VERTICES};
use crate::lp::{build_basic, solve, LpConfig, LpStatus, SolveMode};
use crate::structure::is_t5_free;
use crate::tournament::{verify_fvs, FvsCheck, VertexSet, WeightedTournament};
use crate::weight;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdzOutcome {
    pub solution: FvsSolution,
    pub lp_value: f64,
    /// Why the LP point was rejected, when the exact solver had to step in.
    pub fallback: Option<String>,
}

pub fn cdz(wt: &WeightedTournament, cfg: &LpConfig) -> Result<CdzOutcome, SolveError> {
    if let Some(bad) = is_t5_free(&wt.tournament) {
        return Err(SolveError::NotT5Free(bad));
    }
    let sol = solve(&build_basic(wt), SolveMode::Vertex, cfg)?;
    if sol.status != LpStatus::Optimal {
        return Err(SolveError::Lp(crate::lp::LpError::Status(sol.status)));
    }
    let tol = cfg.tol;
    let snapped = snap(wt, sol.vertex_values(wt.n()), sol.objective, tol.int, tol.obj);
    match snapped {
        Ok(mut s) => {
            s.bound_used = Some(BoundUsed { level: 0, value: sol.objective });
            Ok(CdzOutcome { solution: s, lp_value: sol.objective, fallback: None })
        }
        Err(why) if wt.n() <= MAX_EXACT_VERTICES => {
            let mut s = exact_fvs(wt)?;
            s.bound_used = Some(BoundUsed { level: 0, value: sol.objective });
            Ok(CdzOutcome { solution: s, lp_value: sol.objective, fallback: Some(why) })
        }
        Err(why) => Err(SolveError::SnapFailure(why)),
    }
}

fn snap(wt: &WeightedTournament, x: &[f64], objective: f64, eps_int: f64, eps_obj: f64) -> Result<FvsSolution, String> {
    let mut chosen = VertexSet::EMPTY;
    for (v, &xv) in x.iter().enumerate() {
        if (xv - 1.0).abs() <= eps_int {
            chosen.insert(v);
        } else if xv.abs() > eps_int {
            return Err(format!("x[{v}] = {xv} is not integral"));
        }
    }
    match verify_fvs(wt, chosen) {
        FvsCheck::Violation(tr) => Err(format!("snapped set misses triangle {tr}")),
        FvsCheck::Valid(s) => {
            let w = weight::to_f64(&s.weight);
            if (w - objective).abs() > eps_obj * objective.abs().max(1.0) {
                Err(format!("snapped weight {w} differs from LP value {objective}"))
            } else {
                Ok(s)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{Tournament, WeightScheme};

    #[test]
    fn acyclic_is_empty() {
        let wt = WeightedTournament::unit(Tournament::transitive(6));
        let out = cdz(&wt, &LpConfig::default()).unwrap();
        assert!(out.solution.chosen.is_empty() && out.fallback.is_none());
    }

    #[test]
    fn rejects_t5() {
        // light member of the family, a->b variant
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let t = Tournament::from_arcs(
            5,
            &[(e, a), (e, c), (d, e), (b, e), (c, a), (c, b), (d, c), (a, d), (b, d), (a, b)],
        )
        .unwrap();
        let err = cdz(&WeightedTournament::unit(t), &LpConfig::default()).unwrap_err();
        assert!(matches!(err, SolveError::NotT5Free(s) if s == VertexSet::full(5)));
        assert!(err.is_precondition());
    }

    #[test]
    fn matches_exact_on_t5_free_samples() {
        let cfg = LpConfig::default();
        let mut checked = 0;
        for seed in 0..400u64 {
            let t = Tournament::random_biased(9, 0.12, seed);
            if is_t5_free(&t).is_some() {
                continue;
            }
            let wt = WeightedTournament::new(t, WeightedTournament::random(9, seed, WeightScheme::UniformInt(7)).weights)
                .unwrap();
            let out = cdz(&wt, &cfg).unwrap();
            assert_eq!(out.fallback, None, "seed {seed}");
            assert_eq!(out.solution.weight, exact_fvs(&wt).unwrap().weight, "seed {seed}");
            checked += 1;
        }
        assert!(checked > 50, "only {checked} samples");
    }
}
