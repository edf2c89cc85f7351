//! Triangle LP relaxations and their one-round Sherali–Adams lift.
//!
//! Variables are laid out as the `n` vertex variables followed (at level 1)
//! by one variable per unordered pair `{a, b}`, `a < b`, in lexicographic
//! order. Every row is a `≥` constraint with small integer coefficients, so
//! candidate points can be checked exactly as well as in floating point.

mod simplex;

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tournament::{Triangle, WeightedTournament};
use crate::weight::{self, Weight};
use simplex::{DualSimplex, Outcome, SparseRow};

pub use simplex::SimplexError;

/// Default vertex cap for the lifted model.
pub const DEFAULT_MAX_SA1_VERTICES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Row feasibility.
    pub feas: f64,
    /// Objective comparisons.
    pub obj: f64,
    /// Integrality snapping and rounding thresholds.
    pub int: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feas: 1e-7, obj: 1e-6, int: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpConfig {
    pub tol: Tolerances,
    pub max_iterations: usize,
    pub max_sa1_vertices: usize,
    /// Build the lifted model lazily: start from rows (1) and (4) and add
    /// violated rows (2)/(3) in rounds.
    pub lazy_sa1: bool,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            tol: Tolerances::default(),
            max_iterations: 2_000_000,
            max_sa1_vertices: DEFAULT_MAX_SA1_VERTICES,
            lazy_sa1: false,
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum LpError {
    #[error("lifted model limited to {cap} vertices, got {n}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("solver point violates row {row} by {violation:e}")]
    Verification { row: usize, violation: f64 },
    #[error("LP ended with status {0:?}")]
    Status(LpStatus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Vertex(usize),
    Pair(usize, usize),
}

/// `Σ coeff·x ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Row {
    pub coeffs: Vec<(u32, i32)>,
    pub rhs: i32,
}

impl Row {
    fn new(mut coeffs: Vec<(u32, i32)>, rhs: i32) -> Self {
        coeffs.sort_unstable();
        Row { coeffs, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, c)| f64::from(c) * x[j as usize]).sum()
    }

    pub fn is_satisfied_exact(&self, x: &[Weight]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .fold(Weight::zero(), |acc, &(j, c)| acc + &x[j as usize] * weight::int(i64::from(c)));
        lhs >= weight::int(i64::from(self.rhs))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub n: usize,
    /// 0 for the triangle relaxation, 1 for the lifted model.
    pub level: u8,
    pub variables: Vec<VarKind>,
    pub objective: Vec<Weight>,
    pub bounds: Vec<(f64, f64)>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Both modes currently return a basic solution; `Any` is accepted so that
/// callers can state when they do not rely on that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Vertex,
    Any,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub is_vertex: bool,
    pub iterations: usize,
    /// Rows present in the solved model (smaller than the full model in
    /// lazy mode).
    pub rows: usize,
}

impl LpSolution {
    /// Values of the `n` vertex variables.
    pub fn vertex_values(&self, n: usize) -> &[f64] {
        &self.values[..n]
    }
}

/// Lexicographic index of the pair `{a, b}` among all pairs of `0..n`.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    debug_assert!(b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn pair_var(n: usize, a: usize, b: usize) -> u32 {
    (n + pair_index(n, a, b)) as u32
}

fn base_model(wt: &WeightedTournament, level: u8) -> LpModel {
    let n = wt.n();
    let mut variables: Vec<VarKind> = (0..n).map(VarKind::Vertex).collect();
    let mut objective = wt.weights.clone();
    if level == 1 {
        for a in 0..n {
            for b in a + 1..n {
                variables.push(VarKind::Pair(a, b));
                objective.push(Weight::zero());
            }
        }
    }
    let bounds = vec![(0.0, 1.0); variables.len()];
    LpModel { n, level, variables, objective, bounds, rows: Vec::new() }
}

fn triangle_row(t: &Triangle) -> Row {
    Row::new(t.vertices().iter().map(|&v| (v as u32, 1)).collect(), 1)
}

/// The triangle relaxation: `x_a + x_b + x_c ≥ 1` for every triangle.
pub fn build_basic(wt: &WeightedTournament) -> LpModel {
    let mut m = base_model(wt, 0);
    m.rows = wt.tournament.triangles().iter().map(triangle_row).collect();
    m
}

/// Row (1) for each of the three rotations of the triangle `a→b→c→a`:
/// `x_a + x_b + x_c - x_{ab} - x_{bc} ≥ 1` and its shifts.
fn rotation_rows(n: usize, t: &Triangle) -> [Row; 3] {
    let [a, b, c] = t.vertices();
    let vs = [(a as u32, 1), (b as u32, 1), (c as u32, 1)];
    let mk = |p: (usize, usize), q: (usize, usize)| {
        let mut coeffs = vs.to_vec();
        coeffs.push((pair_var(n, p.0, p.1), -1));
        coeffs.push((pair_var(n, q.0, q.1), -1));
        Row::new(coeffs, 1)
    };
    [mk((a, b), (b, c)), mk((b, c), (c, a)), mk((c, a), (a, b))]
}

/// Rows (2) and (3) for a triangle and an outside vertex `d`.
fn extension_rows(n: usize, t: &Triangle, d: usize) -> [Row; 2] {
    let [a, b, c] = t.vertices();
    let pairs = [pair_var(n, a, d), pair_var(n, b, d), pair_var(n, c, d)];
    let mut r2: Vec<(u32, i32)> = pairs.iter().map(|&p| (p, 1)).collect();
    r2.push((d as u32, -1));
    let mut r3: Vec<(u32, i32)> = [a, b, c, d].iter().map(|&v| (v as u32, 1)).collect();
    r3.extend(pairs.iter().map(|&p| (p, -1)));
    [Row::new(r2, 0), Row::new(r3, 1)]
}

/// Rows (4): `x_a ≥ x_{ab}` and `x_b ≥ x_{ab}` for every pair.
fn pair_rows(n: usize) -> Vec<Row> {
    let mut rows = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in a + 1..n {
            let p = pair_var(n, a, b);
            rows.push(Row::new(vec![(a as u32, 1), (p, -1)], 0));
            rows.push(Row::new(vec![(b as u32, 1), (p, -1)], 0));
        }
    }
    rows
}

fn push_unique(rows: &mut Vec<Row>, seen: &mut HashSet<Row>, row: Row) {
    if seen.insert(row.clone()) {
        rows.push(row);
    }
}

/// The one-round Sherali–Adams lift of the triangle relaxation.
pub fn build_sa1(wt: &WeightedTournament) -> LpModel {
    let mut m = base_model(wt, 1);
    let n = wt.n();
    let triangles = wt.tournament.triangles();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for t in &triangles {
        for r in rotation_rows(n, t) {
            push_unique(&mut rows, &mut seen, r);
        }
    }
    for t in &triangles {
        let set = t.set();
        for d in (0..n).filter(|&d| !set.contains(d)) {
            for r in extension_rows(n, t, d) {
                push_unique(&mut rows, &mut seen, r);
            }
        }
    }
    for r in pair_rows(n) {
        push_unique(&mut rows, &mut seen, r);
    }
    m.rows = rows;
    m
}

impl LpModel {
    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    /// First row violated by more than `eps`, with its violation.
    pub fn first_violated(&self, x: &[f64], eps: f64) -> Option<(usize, f64)> {
        self.rows.iter().enumerate().find_map(|(i, r)| {
            let v = f64::from(r.rhs) - r.activity(x);
            (v > eps).then_some((i, v))
        })
    }

    /// First row or bound violated by the exact point `x`.
    pub fn first_violated_exact(&self, x: &[Weight]) -> Option<usize> {
        self.rows.iter().position(|r| !r.is_satisfied_exact(x))
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| weight::to_f64(c) * v).sum()
    }

    fn var_name(&self, j: usize) -> String {
        match self.variables[j] {
            VarKind::Vertex(v) => format!("x{v}"),
            VarKind::Pair(a, b) => format!("y{a}_{b}"),
        }
    }

    /// The model in CPLEX LP text format.
    pub fn to_lp_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "\\ level {} relaxation, {} vertices", self.level, self.n);
        s.push_str("Minimize\n obj:");
        let mut any = false;
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                let _ = write!(s, " + {} {}", weight::to_f64(c), self.var_name(j));
                any = true;
            }
        }
        if !any {
            let _ = write!(s, " 0 {}", if self.variables.is_empty() { "dummy".into() } else { self.var_name(0) });
        }
        s.push_str("\nSubject To\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(s, " r{i}:");
            for &(j, c) in &r.coeffs {
                let sign = if c < 0 { '-' } else { '+' };
                let _ = write!(s, " {sign} {} {}", c.abs(), self.var_name(j as usize));
            }
            let _ = writeln!(s, " >= {}", r.rhs);
        }
        s.push_str("Bounds\n");
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(s, " {lo} <= {} <= {hi}", self.var_name(j));
        }
        s.push_str("End\n");
        s
    }
}

fn sparse(row: &Row) -> SparseRow {
    SparseRow {
        idx: row.coeffs.iter().map(|&(j, _)| j).collect(),
        val: row.coeffs.iter().map(|&(_, c)| f64::from(c)).collect(),
        rhs: f64::from(row.rhs),
    }
}

fn new_simplex(model: &LpModel) -> Result<DualSimplex, SimplexError> {
    let cost: Vec<f64> = model.objective.iter().map(weight::to_f64).collect();
    let lo: Vec<f64> = model.bounds.iter().map(|b| b.0).collect();
    let hi: Vec<f64> = model.bounds.iter().map(|b| b.1).collect();
    DualSimplex::new(&cost, &lo, &hi)
}

fn finish(model: &LpModel, s: &DualSimplex, outcome: Outcome, tol: &Tolerances) -> Result<LpSolution, LpError> {
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Infeasible => LpStatus::Infeasible,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    let mut values = s.primal();
    for (v, &(lo, hi)) in values.iter_mut().zip(&model.bounds) {
        if *v < lo && *v > lo - tol.feas {
            *v = lo;
        }
        if *v > hi && *v < hi + tol.feas {
            *v = hi;
        }
    }
    if status == LpStatus::Optimal {
        if let Some((row, violation)) = model.first_violated(&values, tol.feas) {
            return Err(LpError::Verification { row, violation });
        }
        for (j, (&v, &(lo, hi))) in values.iter().zip(&model.bounds).enumerate() {
            if v < lo - tol.feas || v > hi + tol.feas {
                return Err(LpError::Verification { row: model.rows.len() + j, violation: (lo - v).max(v - hi) });
            }
        }
    }
    let objective = model.objective_value(&values);
    Ok(LpSolution {
        status,
        values,
        objective,
        is_vertex: status == LpStatus::Optimal,
        iterations: s.iterations,
        rows: model.rows.len(),
    })
}

/// Solves `model` with the bounded dual-based simplex. The returned point is
/// re-checked against every row independently of the solver.
pub fn solve(model: &LpModel, _mode: SolveMode, cfg: &LpConfig) -> Result<LpSolution, LpError> {
    let mut s = new_simplex(model)?;
    s.add_rows(model.rows.iter().map(sparse))?;
    let outcome = s.solve(cfg.max_iterations)?;
    finish(model, &s, outcome, &cfg.tol)
}

/// Solves the lifted model for `wt`, statically or lazily per `cfg`.
/// Both paths are checked against the full row set.
pub fn solve_sa1(wt: &WeightedTournament, cfg: &LpConfig) -> Result<LpSolution, LpError> {
    let n = wt.n();
    if n > cfg.max_sa1_vertices {
        return Err(LpError::TooLarge { n, cap: cfg.max_sa1_vertices });
    }
    if !cfg.lazy_sa1 {
        return solve(&build_sa1(wt), SolveMode::Vertex, cfg);
    }
    let full = build_sa1(wt);
    let triangles = wt.tournament.triangles();
    let mut model = base_model(wt, 1);
    let mut seen = HashSet::new();
    for t in &triangles {
        for r in rotation_rows(n, t) {
            push_unique(&mut model.rows, &mut seen, r);
        }
    }
    for r in pair_rows(n) {
        push_unique(&mut model.rows, &mut seen, r);
    }
    let mut s = new_simplex(&model)?;
    s.add_rows(model.rows.iter().map(sparse))?;
    loop {
        let outcome = s.solve(cfg.max_iterations.saturating_sub(s.iterations))?;
        if outcome != Outcome::Optimal {
            return finish(&model, &s, outcome, &cfg.tol);
        }
        let x = s.primal();
        let mut added = Vec::new();
        for t in &triangles {
            let set = t.set();
            for d in (0..n).filter(|&d| !set.contains(d)) {
                for r in extension_rows(n, t, d) {
                    if f64::from(r.rhs) - r.activity(&x) > cfg.tol.feas * 0.1 && seen.insert(r.clone()) {
                        added.push(r);
                    }
                }
            }
        }
        if added.is_empty() {
            let mut sol = finish(&model, &s, outcome, &cfg.tol)?;
            if let Some((row, violation)) = full.first_violated(&sol.values, cfg.tol.feas) {
                return Err(LpError::Verification { row, violation });
            }
            sol.rows = model.rows.len();
            return Ok(sol);
        }
        s.add_rows(added.iter().map(sparse))?;
        model.rows.extend(added);
    }
}

/// `SA₀(T, w)` for level 0 and `SA₁(T, w)` for level 1.
pub fn lp_value(wt: &WeightedTournament, level: u8, cfg: &LpConfig) -> Result<f64, LpError> {
    let sol = if level == 0 {
        solve(&build_basic(wt), SolveMode::Vertex, cfg)?
    } else {
        solve_sa1(wt, cfg)?
    };
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        s => Err(LpError::Status(s)),
    }
}
