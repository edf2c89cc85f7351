//! The 7/3-approximation: threshold the lifted LP at 3/7, iterate
//! half-rounding on the triangle relaxation, then layer the light residual.

use serde::{Deserialize, Serialize};

use super::{layers, BoundUsed, FvsSolution, LayeringTrace, SolveError};
use crate::lp::{build_basic, solve, solve_sa1, LpConfig, LpError, LpSolution, LpStatus, SolveMode};
use crate::structure::first_heavy_triangle;
use crate::tournament::{verify_fvs, FvsCheck, VertexSet, WeightedTournament};
use crate::weight;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingTrace {
    /// Lifted LP solution on the positive-weight part of the instance.
    pub sa1_solution: LpSolution,
    /// Original id of each vertex variable of `sa1_solution`.
    pub sa1_vertices: Vec<usize>,
    /// Zero-weight vertices, taken into the solution up front.
    pub zero_weight: VertexSet,
    /// Vertices at or above the 3/7 threshold.
    pub initial_f: VertexSet,
    pub f_steps: Vec<VertexSet>,
    pub z_steps: Vec<VertexSet>,
    /// Triangle-relaxation value of the residual at each iteration.
    pub sa0_values: Vec<f64>,
    /// `zero_weight ∪ initial_f ∪ f_steps`.
    pub f: VertexSet,
    pub z: VertexSet,
    pub residual: VertexSet,
    /// Triangle-relaxation value of the final residual.
    pub residual_sa0: f64,
    /// The thresholded set was already a feedback vertex set.
    pub early_exit: bool,
}

impl RoundingTrace {
    pub fn sa1_value(&self) -> f64 {
        self.sa1_solution.objective
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sa73Outcome {
    pub solution: FvsSolution,
    pub rounding: RoundingTrace,
    pub layering: Option<LayeringTrace>,
}

fn optimal(sol: LpSolution) -> Result<LpSolution, SolveError> {
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        s => Err(SolveError::Lp(LpError::Status(s))),
    }
}

/// Runs the rounding loop from a solved lifted LP. `active` are the
/// positive-weight vertices the LP was solved on.
fn round(
    wt: &WeightedTournament,
    active: VertexSet,
    sa1: LpSolution,
    sa1_vertices: Vec<usize>,
    cfg: &LpConfig,
    stop_if_fvs: bool,
) -> Result<RoundingTrace, SolveError> {
    let t = &wt.tournament;
    let gate = 3.0 / 7.0 - cfg.tol.int;
    let initial_f: VertexSet = sa1_vertices
        .iter()
        .zip(sa1.vertex_values(sa1_vertices.len()))
        .filter(|(_, &x)| x >= gate)
        .map(|(&v, _)| v)
        .collect();
    let zero_weight = t.vertices().difference(active);
    let mut trace = RoundingTrace {
        sa1_solution: sa1,
        sa1_vertices,
        zero_weight,
        initial_f,
        f_steps: Vec::new(),
        z_steps: Vec::new(),
        sa0_values: Vec::new(),
        f: zero_weight.union(initial_f),
        z: VertexSet::EMPTY,
        residual: active.difference(initial_f),
        residual_sa0: 0.0,
        early_exit: false,
    };
    if stop_if_fvs && t.is_acyclic_within(trace.residual) {
        trace.early_exit = true;
        return Ok(trace);
    }
    let half = half_rounding(wt, trace.residual, cfg)?;
    trace.f = trace.f.union(half.f);
    trace.z = half.z;
    trace.residual = half.residual;
    trace.residual_sa0 = half.residual_sa0;
    trace.f_steps = half.f_steps;
    trace.z_steps = half.z_steps;
    trace.sa0_values = half.sa0_values;
    Ok(trace)
}

/// Outcome of [`half_rounding`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfRounding {
    /// Union of the `f_steps`.
    pub f: VertexSet,
    pub z: VertexSet,
    pub f_steps: Vec<VertexSet>,
    pub z_steps: Vec<VertexSet>,
    pub sa0_values: Vec<f64>,
    pub residual: VertexSet,
    pub residual_sa0: f64,
}

/// Iterated half-rounding of the triangle relaxation, starting from the
/// vertices in `start`: move vertices on no triangle to `Z`, add every
/// vertex with `x_v >= 1/2` to `F`, repeat until nothing is added or
/// nothing is left.
pub fn half_rounding(wt: &WeightedTournament, start: VertexSet, cfg: &LpConfig) -> Result<HalfRounding, SolveError> {
    let t = &wt.tournament;
    let mut out = HalfRounding {
        f: VertexSet::EMPTY,
        z: VertexSet::EMPTY,
        f_steps: Vec::new(),
        z_steps: Vec::new(),
        sa0_values: Vec::new(),
        residual: start,
        residual_sa0: 0.0,
    };
    loop {
        let covered: VertexSet =
            t.triangles_within(out.residual).iter().fold(VertexSet::EMPTY, |acc, tr| acc.union(tr.set()));
        let free = out.residual.difference(covered);
        out.z_steps.push(free);
        out.z = out.z.union(free);
        out.residual = covered;
        let (sub, ind) = wt.induced(out.residual).expect("subset of V");
        let sol = optimal(solve(&build_basic(&sub), SolveMode::Vertex, cfg)?)?;
        out.sa0_values.push(sol.objective);
        let half = 0.5 - cfg.tol.int;
        let added: VertexSet = ind
            .to_old
            .iter()
            .zip(sol.vertex_values(sub.n()))
            .filter(|(_, &x)| x >= half)
            .map(|(&v, _)| v)
            .collect();
        out.f_steps.push(added);
        out.f = out.f.union(added);
        out.residual = out.residual.difference(added);
        if added.is_empty() {
            out.residual_sa0 = sol.objective;
            return Ok(out);
        }
        if out.residual.is_empty() {
            return Ok(out);
        }
    }
}

fn positive_part(wt: &WeightedTournament) -> VertexSet {
    use num_traits::Zero;
    wt.tournament.vertices().iter().filter(|&v| !wt.weights[v].is_zero()).collect()
}

fn solve_lifted(wt: &WeightedTournament, active: VertexSet, cfg: &LpConfig) -> Result<(LpSolution, Vec<usize>), SolveError> {
    let (sub, ind) = wt.induced(active).expect("subset of V");
    let sol = optimal(solve_sa1(&sub, cfg)?)?;
    Ok((sol, ind.to_old))
}

/// The rounding phase without the early exit: threshold the lifted
/// LP, then alternate between moving triangle-free vertices to `Z` and
/// half-rounding the triangle relaxation of the residual.
pub fn rounding_phase(wt: &WeightedTournament, cfg: &LpConfig) -> Result<RoundingTrace, SolveError> {
    super::require_positive(wt)?;
    let active = wt.tournament.vertices();
    let (sa1, ids) = solve_lifted(wt, active, cfg)?;
    round(wt, active, sa1, ids, cfg, false)
}

/// The full 7/3-approximation. Zero-weight vertices go into the solution up
/// front; the remaining checks run on the positive-weight part.
pub fn fvst_7_3(wt: &WeightedTournament, cfg: &LpConfig) -> Result<Sa73Outcome, SolveError> {
    let active = positive_part(wt);
    let (sa1, ids) = solve_lifted(wt, active, cfg)?;
    let sa1_value = sa1.objective;
    let rounding = round(wt, active, sa1, ids, cfg, true)?;
    let tol = cfg.tol;
    let mut layering = None;
    let mut chosen = rounding.f;
    if !rounding.early_exit {
        let rounded = rounding.f.difference(rounding.zero_weight);
        let bound = 7.0 / 3.0 * (sa1_value - rounding.residual_sa0);
        let wf = weight::to_f64(&wt.weight_of(rounded));
        if wf > bound * (1.0 + 5.0 * tol.int) + tol.obj * (1.0 + sa1_value) {
            return Err(SolveError::breach(
                wt,
                "rounding weight",
                format!("w(F) = {wf} exceeds 7/3 (SA1 - SA0(residual)) = {bound}"),
            ));
        }
        let (res, ind) = wt.induced(rounding.residual).expect("subset of V");
        let wres = weight::to_f64(&res.total_weight());
        if (rounding.residual_sa0 - wres / 3.0).abs() > tol.obj * wres.max(1.0) {
            return Err(SolveError::breach(
                wt,
                "residual relaxation value",
                format!("SA0(residual) = {} but w(residual)/3 = {}", rounding.residual_sa0, wres / 3.0),
            ));
        }
        if let Some(h) = first_heavy_triangle(&res.tournament) {
            return Err(SolveError::breach(
                wt,
                "residual lightness",
                format!("heavy triangle {:?} in the residual", h.triangle.vertices().map(|v| ind.to_old[v])),
            ));
        }
        let (local, trace) = layers(&res, cfg)?;
        chosen = chosen.union(ind.lift(local.chosen));
        layering = Some(trace.lift(&ind));
    }
    let mut solution = match verify_fvs(wt, chosen) {
        FvsCheck::Valid(s) => s,
        FvsCheck::Violation(tr) => {
            return Err(SolveError::breach(wt, "feasibility", format!("triangle {tr} survives")));
        }
    };
    let w = weight::to_f64(&solution.weight);
    if w > 7.0 / 3.0 * sa1_value * (1.0 + tol.obj) + tol.obj {
        return Err(SolveError::breach(
            wt,
            "approximation bound",
            format!("w(X) = {w} exceeds 7/3 SA1 = {}", 7.0 / 3.0 * sa1_value),
        ));
    }
    solution.bound_used = Some(BoundUsed { level: 1, value: sa1_value });
    Ok(Sa73Outcome { solution, rounding, layering })
}
