//! Subcommands of the `fvst` binary.
//!
//! Every command prints machine-readable JSON lines on stdout and human
//! prose on stderr. Errors are split into precondition failures (exit code
//! 2) and internal failures (exit code 1).

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use fvst_core::io::{self, Bounds, GenManifest, ManifestEntry, ReportConfig, RunReport, Timings};
use fvst_core::lp::{self, LpConfig, Tolerances};
use fvst_core::solvers::{self, FvsSolution, SolveError, MAX_EXACT_VERTICES};
use fvst_core::structure::{self, MAX_FAMILY_ORDER};
use fvst_core::tournament::{WeightScheme, WeightedTournament};
use fvst_core::weight;

#[derive(Debug, Parser)]
#[command(name = "fvst", version, about = "Feedback vertex set in tournaments")]
pub struct Cli {
    /// Worker threads for multi-instance commands (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write a JSON run report.
    Solve(SolveArgs),
    /// Enumerate the tournaments of a given order with no FVS smaller than FVS_SIZE.
    Enumerate(EnumerateArgs),
    /// Integrality-gap experiment on seeded random tournaments.
    Gap(GapArgs),
    /// Generate a seeded instance corpus.
    Gen(GenArgs),
    /// Light/heavy verdict and T5-freeness of an instance.
    Classify(ClassifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// LP rounding plus layering, the 7/3-approximation.
    Sa73,
    /// Exact solver for T5-free tournaments.
    Cdz,
    /// Local-ratio 3-approximation.
    Lr3,
    /// Branch and bound.
    Exact,
    /// Layering on its own (light tournaments only).
    Layers,
}

impl Algorithm {
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Sa73 => "sa73",
            Algorithm::Cdz => "cdz",
            Algorithm::Lr3 => "lr3",
            Algorithm::Exact => "exact",
            Algorithm::Layers => "layers",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LpArgs {
    #[arg(long, default_value_t = 1e-7)]
    pub eps_feas: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_obj: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub eps_int: f64,
    /// Add the lifted LP's extension rows lazily.
    #[arg(long)]
    pub lazy_sa1: bool,
    /// Largest instance accepted by the lifted LP.
    #[arg(long, default_value_t = lp::DEFAULT_MAX_SA1_VERTICES)]
    pub max_sa1: usize,
}

impl LpArgs {
    pub fn config(&self) -> anyhow::Result<LpConfig> {
        for (name, v) in [("eps-feas", self.eps_feas), ("eps-obj", self.eps_obj), ("eps-int", self.eps_int)] {
            if !(v > 0.0 && v < 0.01) {
                bail!("--{name} must lie in (0, 0.01), got {v}");
            }
        }
        Ok(LpConfig {
            tol: Tolerances { feas: self.eps_feas, obj: self.eps_obj, int: self.eps_int },
            lazy_sa1: self.lazy_sa1,
            max_sa1_vertices: self.max_sa1,
            ..LpConfig::default()
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub alg: Algorithm,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Embed the solver trace in the report.
    #[arg(long)]
    pub trace: bool,
    /// Also compute the exact optimum when n is at most this.
    #[arg(long, default_value_t = 16)]
    pub exact_cap: usize,
    /// Write the lifted LP in CPLEX LP format.
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
    #[command(flatten)]
    pub lp: LpArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    pub order: usize,
    pub fvs_size: usize,
    /// Write the census JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "unit")]
    pub weights: WeightsArg,
    /// Solve exactly when n is at most this.
    #[arg(long, default_value_t = 16)]
    pub exact_cap: usize,
    /// Plot-ready TSV output.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
    #[command(flatten)]
    pub lp: LpArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "unit")]
    pub weights: WeightsArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

/// `unit` or `int:k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightsArg(pub WeightScheme);

impl FromStr for WeightsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "unit" {
            return Ok(WeightsArg(WeightScheme::Unit));
        }
        match s.strip_prefix("int:").map(str::parse::<u32>) {
            Some(Ok(k)) if k >= 1 => Ok(WeightsArg(WeightScheme::UniformInt(k))),
            _ => Err(format!("expected `unit` or `int:k` with k >= 1, got {s:?}")),
        }
    }
}

impl std::fmt::Display for WeightsArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            WeightScheme::Unit => f.write_str("unit"),
            WeightScheme::UniformInt(k) => write!(f, "int:{k}"),
        }
    }
}

/// Failure of a subcommand, tagged with its exit code.
#[derive(Debug)]
pub enum Failure {
    Precondition(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Precondition(_) => 2,
            Failure::Internal(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Precondition(e) | Failure::Internal(e) => e,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.into())
        } else {
            Failure::Internal(e.into())
        }
    }
}

fn pre(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Precondition(e.into())
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build().map_err(internal)?;
    pool.install(|| match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Enumerate(a) => cmd_enumerate(&a).map(|_| ()),
        Command::Gap(a) => cmd_gap(&a).map(|_| ()),
        Command::Gen(a) => cmd_gen(&a).map(|_| ()),
        Command::Classify(a) => cmd_classify(&a).map(|_| ()),
    })
}

pub fn read_instance(path: &Path) -> Result<WeightedTournament, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(pre)?;
    io::parse_instance(&text).with_context(|| format!("parsing {}", path.display())).map_err(pre)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display())).map_err(internal)
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs `alg` on `wt` and assembles the report (without writing it).
pub fn solve_report(
    wt: &WeightedTournament,
    alg: Algorithm,
    cfg: &LpConfig,
    exact_cap: usize,
    with_trace: bool,
) -> Result<RunReport, Failure> {
    let start = Instant::now();
    let mut bounds = Bounds::default();
    let mut trace = None;
    let solution: FvsSolution = match alg {
        Algorithm::Sa73 => {
            let out = solvers::fvst_7_3(wt, cfg)?;
            bounds.sa1 = Some(out.rounding.sa1_value());
            if with_trace {
                trace = Some(json!({ "rounding": out.rounding, "layering": out.layering }));
            }
            out.solution
        }
        Algorithm::Cdz => {
            let out = solvers::cdz(wt, cfg)?;
            if let Some(why) = &out.fallback {
                eprintln!("cdz: LP point rejected ({why}); used the exact solver");
            }
            if with_trace {
                trace = Some(json!({ "lp_value": out.lp_value, "fallback": out.fallback }));
            }
            out.solution
        }
        Algorithm::Lr3 => solvers::local_ratio_3approx(wt),
        Algorithm::Exact => solvers::exact_fvs(wt)?,
        Algorithm::Layers => {
            let (s, tr) = solvers::layers(wt, cfg)?;
            if with_trace {
                trace = Some(json!({ "layering": tr }));
            }
            s
        }
    };
    let total_ms = ms(start);
    let lp_start = Instant::now();
    bounds.sa0 = Some(lp::lp_value(wt, 0, cfg).map_err(|e| Failure::from(SolveError::from(e)))?);
    if wt.n() <= exact_cap.min(MAX_EXACT_VERTICES) {
        bounds.exact = Some(match alg {
            Algorithm::Exact => solution.weight.clone(),
            _ => solvers::exact_fvs(wt)?.weight,
        });
    }
    let config = ReportConfig {
        tolerances: cfg.tol,
        lazy_sa1: cfg.lazy_sa1,
        max_sa1_vertices: cfg.max_sa1_vertices,
        seed: None,
    };
    let timings = Timings { total_ms, lp_ms: Some(ms(lp_start)) };
    let mut report = RunReport::new(wt, alg.id(), solution, bounds, timings, config);
    report.trace = trace;
    Ok(report)
}

pub fn cmd_solve(a: &SolveArgs) -> Result<(), Failure> {
    let wt = read_instance(&a.input)?;
    let cfg = a.lp.config().map_err(pre)?;
    if let Some(path) = &a.dump_lp {
        write_file(path, &lp::build_sa1(&wt).to_lp_text())?;
    }
    let report = match solve_report(&wt, a.alg, &cfg, a.exact_cap, a.trace) {
        Ok(r) => r,
        Err(Failure::Precondition(e)) => {
            println!("{}", json!({ "status": "precondition", "algorithm": a.alg.id(), "error": e.to_string() }));
            return Err(Failure::Precondition(e));
        }
        Err(f) => return Err(f),
    };
    let text = io::write_report(&report);
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            println!(
                "{}",
                json!({
                    "status": "ok",
                    "algorithm": report.algorithm,
                    "weight": weight::format(&report.solution.weight),
                    "chosen": report.solution.chosen,
                    "report": path,
                })
            );
        }
        None => println!("{}", serde_json::to_string(&report).map_err(internal)?),
    }
    eprintln!(
        "{}: weight {} with {} vertices removed",
        report.algorithm,
        weight::format(&report.solution.weight),
        report.solution.chosen.len()
    );
    Ok(())
}

pub fn cmd_enumerate(a: &EnumerateArgs) -> Result<structure::FamilyCensus, Failure> {
    if a.order > MAX_FAMILY_ORDER {
        return Err(pre(anyhow!("order is limited to {MAX_FAMILY_ORDER}, got {}", a.order)));
    }
    let census = structure::enumerate_family(a.order, a.fvs_size).map_err(pre)?;
    if let Some(path) = &a.out {
        write_file(path, &census.to_json())?;
    }
    println!(
        "{}",
        json!({
            "order": census.order,
            "fvs_size": census.fvs_size,
            "members": census.members.len(),
            "heavy": census.heavy_count,
            "light": census.light_count,
        })
    );
    eprintln!(
        "{} classes on {} vertices with minimum FVS at least {}: {} heavy, {} light",
        census.members.len(),
        census.order,
        census.fvs_size,
        census.heavy_count,
        census.light_count
    );
    Ok(census)
}

/// One row of the gap experiment.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GapRow {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub total_weight: String,
    pub sa0: f64,
    pub sa1: f64,
    pub alg_weight: String,
    pub exact_weight: Option<String>,
    pub alg_over_sa1: Option<f64>,
    pub exact_over_sa1: Option<f64>,
}

const GAP_HEADER: &str = "trial\tseed\tn\ttotal_weight\tsa0\tsa1\talg_weight\texact_weight\talg_over_sa1\texact_over_sa1";

fn tsv_row(r: &GapRow) -> String {
    let opt = |v: Option<f64>| v.map_or("NA".to_string(), |x| x.to_string());
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        r.trial,
        r.seed,
        r.n,
        r.total_weight,
        r.sa0,
        r.sa1,
        r.alg_weight,
        r.exact_weight.as_deref().unwrap_or("NA"),
        opt(r.alg_over_sa1),
        opt(r.exact_over_sa1)
    )
}

fn gap_trial(a: &GapArgs, cfg: &LpConfig, trial: usize) -> Result<GapRow, Failure> {
    let seed = a.seed.wrapping_add(trial as u64);
    let wt = WeightedTournament::random(a.n, seed, a.weights.0);
    let sa0 = lp::lp_value(&wt, 0, cfg).map_err(|e| Failure::from(SolveError::from(e)))?;
    let out = solvers::fvst_7_3(&wt, cfg)?;
    let sa1 = out.rounding.sa1_value();
    let exact = if a.n <= a.exact_cap.min(MAX_EXACT_VERTICES) { Some(solvers::exact_fvs(&wt)?.weight) } else { None };
    let ratio = |w: &fvst_core::Weight| (sa1 > 0.0).then(|| weight::to_f64(w) / sa1);
    Ok(GapRow {
        trial,
        seed,
        n: a.n,
        total_weight: weight::format(&wt.total_weight()),
        sa0,
        sa1,
        alg_weight: weight::format(&out.solution.weight),
        alg_over_sa1: ratio(&out.solution.weight),
        exact_over_sa1: exact.as_ref().and_then(ratio),
        exact_weight: exact.as_ref().map(weight::format),
    })
}

pub fn cmd_gap(a: &GapArgs) -> Result<Vec<GapRow>, Failure> {
    let cfg = a.lp.config().map_err(pre)?;
    let rows: Vec<GapRow> =
        (0..a.trials).into_par_iter().map(|k| gap_trial(a, &cfg, k)).collect::<Result<_, _>>()?;
    let mut tsv = format!("{GAP_HEADER}\n");
    for r in &rows {
        println!("{}", serde_json::to_string(r).map_err(internal)?);
        tsv.push_str(&tsv_row(r));
        tsv.push('\n');
    }
    if let Some(path) = &a.tsv {
        write_file(path, &tsv)?;
    }
    let exact: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.exact_weight.as_deref())
        .map(|w| weight::to_f64(&weight::parse(w).expect("formatted by us")))
        .collect();
    if !exact.is_empty() && a.n > 0 {
        let mean = exact.iter().sum::<f64>() / exact.len() as f64;
        eprintln!("mean exact/n over {} trials: {:.4}", exact.len(), mean / a.n as f64);
    }
    eprintln!("{} trials at n = {}", rows.len(), a.n);
    Ok(rows)
}

pub fn cmd_gen(a: &GenArgs) -> Result<GenManifest, Failure> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display())).map_err(internal)?;
    let width = a.count.saturating_sub(1).to_string().len().max(4);
    let entries: Vec<ManifestEntry> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let seed = a.seed.wrapping_add(i as u64);
            let wt = WeightedTournament::random(a.n, seed, a.weights.0);
            let file = format!("inst_{i:0width$}.txt");
            write_file(&a.out.join(&file), &io::emit_instance(&wt))?;
            Ok(ManifestEntry { file, seed, instance_hash: io::instance_hash(&wt) })
        })
        .collect::<Result<_, Failure>>()?;
    let manifest = GenManifest { n: a.n, weights: a.weights.to_string(), base_seed: a.seed, entries };
    let text = serde_json::to_string_pretty(&manifest).map_err(internal)?;
    write_file(&a.out.join("manifest.json"), &text)?;
    println!("{}", json!({ "generated": manifest.entries.len(), "dir": a.out }));
    eprintln!("wrote {} instances to {}", manifest.entries.len(), a.out.display());
    Ok(manifest)
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<serde_json::Value, Failure> {
    let wt = read_instance(&a.input)?;
    let t = &wt.tournament;
    let heavy: Vec<[usize; 3]> = structure::heavy_triangles(t).iter().map(|h| h.triangle.vertices()).collect();
    let t5 = structure::is_t5_free(t);
    let verdict = json!({
        "n": wt.n(),
        "triangles": t.triangle_count(),
        "light": heavy.is_empty(),
        "heavy_triangles": heavy,
        "t5_free": t5.is_none(),
        "t5_witness": t5,
    });
    println!("{verdict}");
    eprintln!(
        "{} ({} heavy triangles), {}",
        if heavy.is_empty() { "light" } else { "heavy" },
        heavy.len(),
        if t5.is_none() { "T5-free" } else { "contains a T5 member" }
    );
    Ok(verdict)
}
