//! `arithmos`: one binary, one subcommand per computation. Results are
//! JSON (stdout or --out), sequences optionally CSV (--csv).

mod parse;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use arithmos_core::contfrac::{CosetSpace, QuadraticSurd};
use arithmos_core::lfactor::{hodge_lfactor, verify_regdet_identity, Embedding, HodgeData};
use arithmos_core::mixmaster::{axis_statistics, ck_ktheory, evolve, markov_matrix, Orbit};
use arithmos_core::modsym::{homology_presentation, limiting_symbol_closed, limiting_symbol_ergodic};
use arithmos_core::qsm::{bc_kms_value, gl2_partition, BcQuery};
use arithmos_core::schottky::green::{btz_green, btz_green_geodesic, Evaluation, GreenContext};
use arithmos_core::schottky::limit_points;
use arithmos_core::schottky::solenoid::{dirac_spectrum, solenoid_ranks};
use arithmos_core::transfer::{
    build_matrix, gauss_kuzmin_iterate_at, hensley_asymptotic, hensley_dimension, lyapunov_exponent, selberg_zeta,
    top_eigen, Group, TransferSpec, Variant,
};
use arithmos_core::verify::{run_all, Profile};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use parse::Config;
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "arithmos.run/1";

#[derive(Parser, Debug)]
#[command(name = "arithmos", version, about = "Continued fractions, modular symbols, Schottky groups and L-factors")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write the JSON result here instead of stdout (a .csv path receives the CSV series).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the CSV series of sequence-producing commands here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Seed for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// key = value file of defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Include wall time in the result (reruns then differ in that field).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transfer operators of the Gauss map.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// Selberg zeta as det(1 − L_s).
    Selberg {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, value_enum, default_value_t = GroupArg::Pgl2z)]
        group: GroupArg,
        /// Coset level for --group coset.
        #[arg(long, default_value_t = 2)]
        level: u64,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Hausdorff dimension of continued fractions with digits ≤ D.
    HensleyDim {
        #[arg(long)]
        digits: u64,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Limiting modular symbol of a quadratic irrational.
    Limsym {
        /// (a + b√d)/c as a,b,c,d.
        #[arg(long, allow_hyphen_values = true)]
        surd: String,
        #[arg(long, default_value_t = 2)]
        level: u64,
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Integral homology presentation of the modular curve X_G(N).
    Homology {
        #[arg(long)]
        level: u64,
    },
    /// Mixmaster eras, Markov matrix and axis statistics.
    #[command(subcommand)]
    Mixmaster(MixmasterCmd),
    /// Green function of a Schottky uniformized surface.
    Green {
        /// standard2, genus1:q or a group file.
        #[arg(long)]
        group: String,
        /// Divisor as m@z;m@z;…
        #[arg(long = "A", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        maxlen: Option<usize>,
        /// Stop at the first word length whose error estimate is below this.
        #[arg(long)]
        tol: Option<f64>,
        /// Evaluate through oriented geodesic distances instead of cross-ratios.
        #[arg(long)]
        geodesic: bool,
    },
    /// Green function of the BTZ black hole ℂ*/q^ℤ.
    Btz {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Attracting fixed points of words of a given length.
    Limitset {
        #[arg(long)]
        group: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Solenoid cohomology ranks and the Dirac spectrum.
    Solenoid {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        nmax: Option<usize>,
        /// Evaluate the heat trace at this t as well.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Archimedean L-factor from Hodge numbers.
    Lfactor {
        /// {"m": weight, "h": {"p,q": n}, "real": {"p": [n+, n−]}}; "real" selects a real place.
        #[arg(long)]
        hodge: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Regularized determinant against the Gamma factor of a curve.
    RegdetCheck {
        #[arg(long)]
        genus: u32,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Bost–Connes KMS state on e(a/b)^alpha.
    BcState {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        alpha: u64,
        #[arg(long = "K")]
        k: Option<u64>,
    },
    /// GL₂ partition function against ζ(β)ζ(β−1).
    Gl2Partition {
        #[arg(long)]
        beta: f64,
        #[arg(long = "K")]
        k: Option<u64>,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value_t = ProfileArg::Quick)]
        profile: ProfileArg,
    },
}

#[derive(Subcommand, Debug)]
enum TransferCmd {
    /// Leading eigenvalue and spectral gap.
    Eig {
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::Full)]
        variant: VariantArg,
        /// Coset level or digit bound for the coset and hensley variants.
        #[arg(long, default_value_t = 2)]
        param: u64,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        x0: Option<f64>,
    },
    /// Iterates of L₁ on the constant 1 and their distance to the Gauss density.
    GaussKuzmin {
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        x0: f64,
    },
    /// |dλ/dσ| at σ = 1.
    Lyapunov {
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum MixmasterCmd {
    /// Era sequence from x₀.
    Run {
        /// Quadratic surd a,b,c,d or rational p/q in (0,1).
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Starting axis label, an index into ℙ¹(F₂).
        #[arg(long, default_value_t = 0)]
        s0: usize,
        #[arg(long)]
        eras: Option<usize>,
        /// Follow the amplitude v as well.
        #[arg(long)]
        track_v: bool,
        #[arg(long, default_value_t = 1.0)]
        v0: f64,
    },
    /// Markov matrix of the subshift on digits ≤ D, with its K-groups.
    Markov {
        #[arg(long)]
        digits: u64,
    },
    /// Axis-label frequencies along random Gauss orbits.
    Stats {
        #[arg(long)]
        samples: Option<u64>,
        /// Eras per sample.
        #[arg(long)]
        eras: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    Pgl2z,
    Sl2z,
    Coset,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Full,
    Coset,
    Hensley,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Quick,
    Full,
}

/// What a command hands back: the payload, its error estimate and
/// an optional CSV table.
struct Outcome {
    parameters: Value,
    result: Value,
    error_estimate: Value,
    seed: Option<u64>,
    table: Option<Table>,
    failed: bool,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Outcome {
    fn new(parameters: Value, result: impl Serialize, error_estimate: impl Into<ErrorEstimate>) -> Result<Self, String> {
        Ok(Self {
            parameters,
            result: to_value(result)?,
            error_estimate: error_estimate.into().0,
            seed: None,
            table: None,
            failed: false,
        })
    }

    fn table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }
}

struct ErrorEstimate(Value);

impl From<f64> for ErrorEstimate {
    fn from(x: f64) -> Self {
        Self(json!(x))
    }
}

/// Marks results computed in exact arithmetic.
struct Exact;

impl From<Exact> for ErrorEstimate {
    fn from(_: Exact) -> Self {
        Self(json!("exact"))
    }
}

fn to_value(x: impl Serialize) -> Result<Value, String> {
    serde_json::to_value(x).map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn complex_json(z: C64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let started = Instant::now();
    let outcome = Config::load(cli.global.config.as_deref()).and_then(|cfg| run(&cli, &cfg));
    match outcome.and_then(|o| emit(&cli.global, name, o, started)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let body = json!({"schema": SCHEMA, "command": name, "error": e});
            // a closed stdout leaves nowhere to report to
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&body).expect("error JSON"));
            ExitCode::FAILURE
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Transfer(TransferCmd::Eig { .. }) => "transfer eig",
        Command::Transfer(TransferCmd::GaussKuzmin { .. }) => "transfer gauss-kuzmin",
        Command::Transfer(TransferCmd::Lyapunov { .. }) => "transfer lyapunov",
        Command::Selberg { .. } => "selberg",
        Command::HensleyDim { .. } => "hensley-dim",
        Command::Limsym { .. } => "limsym",
        Command::Homology { .. } => "homology",
        Command::Mixmaster(MixmasterCmd::Run { .. }) => "mixmaster run",
        Command::Mixmaster(MixmasterCmd::Markov { .. }) => "mixmaster markov",
        Command::Mixmaster(MixmasterCmd::Stats { .. }) => "mixmaster stats",
        Command::Green { .. } => "green",
        Command::Btz { .. } => "btz",
        Command::Limitset { .. } => "limitset",
        Command::Solenoid { .. } => "solenoid",
        Command::Lfactor { .. } => "lfactor",
        Command::RegdetCheck { .. } => "regdet-check",
        Command::BcState { .. } => "bc-state",
        Command::Gl2Partition { .. } => "gl2-partition",
        Command::Verify { .. } => "verify",
    }
}

/// Writes the JSON document and the CSV table; Ok(false) means the
/// command ran but reported failure (verify).
fn emit(g: &Global, name: &str, o: Outcome, started: Instant) -> Result<bool, String> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("command".into(), json!(name));
    doc.insert("parameters".into(), o.parameters);
    doc.insert("result".into(), o.result);
    doc.insert("error_estimate".into(), o.error_estimate);
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if let Some(seed) = o.seed {
        doc.insert("seed".into(), json!(seed));
    }
    if g.timing {
        doc.insert("wall_seconds".into(), json!(started.elapsed().as_secs_f64()));
    }
    let text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(err)?;

    let csv_path = g.csv.as_deref().or(g.out.as_deref().filter(|p| is_csv(p)));
    if let Some(path) = csv_path {
        let table = o.table.as_ref().ok_or_else(|| format!("'{name}' produces no CSV series"))?;
        write_csv(path, table)?;
    }
    match g.out.as_deref().filter(|p| !is_csv(p)) {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| format!("cannot write '{}': {e}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").map_err(err)?;
        }
    }
    Ok(!o.failed)
}

fn is_csv(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn write_csv(path: &Path, t: &Table) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("cannot write '{}': {e}", path.display()))?;
    w.write_record(&t.header).map_err(err)?;
    for r in &t.rows {
        w.write_record(r).map_err(err)?;
    }
    w.flush().map_err(err)
}

fn run(cli: &Cli, cfg: &Config) -> Result<Outcome, String> {
    let seed = cfg.pick(cli.global.seed, "seed", 0)?;
    match &cli.command {
        Command::Transfer(t) => transfer(t, cfg),
        Command::Selberg { s, group, level, dim } => {
            let s = parse::complex(s)?;
            let dim = cfg.pick(*dim, "dim", 24)?;
            let g = match group {
                GroupArg::Pgl2z => Group::Pgl2z,
                GroupArg::Sl2z => Group::Sl2z,
                GroupArg::Coset => Group::Coset(*level),
            };
            let v = selberg_zeta(s, g, dim).map_err(err)?;
            let est = v.stability;
            Outcome::new(json!({"s": complex_json(s), "group": g, "dim": dim}), v, est)
        }
        Command::HensleyDim { digits, dim } => {
            let dim = cfg.pick(*dim, "dim", 24)?;
            let h = hensley_dimension(*digits, dim).map_err(err)?;
            let est = h.error_estimate;
            let result = json!({
                "dimension": h.dimension,
                "bisection_steps": h.bisection_steps,
                "asymptotic": hensley_asymptotic(*digits),
            });
            Outcome::new(json!({"digits": digits, "dim": dim}), result, est)
        }
        Command::Limsym { surd, level, iters } => {
            let iters = cfg.pick(*iters, "iters", 100_000)?;
            let beta = parse_surd(surd)?;
            let p = CosetSpace::new(*level).map_err(err)?;
            let closed = limiting_symbol_closed(&beta, &p).map_err(err)?;
            let ergodic = limiting_symbol_ergodic(&beta, &p, iters).map_err(err)?;
            // the Birkhoff average against the closed form measures the truncation
            let gap = closed.by_lyapunov.iter().zip(&ergodic.vector).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let labels: Vec<String> = (0..p.len()).map(|s| p.label(s)).collect();
            let rows = (0..p.len())
                .map(|s| {
                    vec![
                        labels[s].clone(),
                        closed.counts.0[s].to_string(),
                        closed.by_lyapunov[s].to_string(),
                        ergodic.vector[s].to_string(),
                    ]
                })
                .collect();
            let result = json!({"surd": beta, "labels": labels, "closed": closed, "ergodic": ergodic});
            Ok(Outcome::new(json!({"surd": surd, "level": level, "iters": iters}), result, gap)?
                .table(vec!["label", "count", "closed", "ergodic"], rows))
        }
        Command::Homology { level } => {
            let p = CosetSpace::new(*level).map_err(err)?;
            let h = homology_presentation(&p).map_err(err)?;
            let mut result = to_value(&h)?;
            result["kernel_rank"] = json!(h.kernel_rank());
            result["labels"] = json!((0..p.len()).map(|s| p.label(s)).collect::<Vec<_>>());
            Outcome::new(json!({"level": level}), result, Exact)
        }
        Command::Mixmaster(m) => mixmaster(m, cfg, seed),
        Command::Green { group, a, b, maxlen, tol, geodesic } => {
            let g = parse::group(group)?;
            let (da, db) = (parse::divisor(a)?, parse::divisor(b)?);
            let maxlen = cfg.pick(*maxlen, "maxlen", 10)?;
            let tol = match tol {
                Some(t) => Some(*t),
                None => cfg.pick(None, "tol", f64::NAN).map(|t| (!t.is_nan()).then_some(t))?,
            };
            let mode = if *geodesic { Evaluation::Geodesic } else { Evaluation::CrossRatio };
            // without a tolerance only the longest truncation is evaluated
            let first = if tol.is_some() { maxlen.min(4) } else { maxlen };
            let mut value = None;
            for len in first..=maxlen {
                let v = GreenContext::new(&g, len, mode).and_then(|c| c.divisors(&da, &db)).map_err(err)?;
                let done = tol.is_some_and(|t| v.error_estimate <= t);
                value = Some(v);
                if done {
                    break;
                }
            }
            let v = value.ok_or("maxlen must be positive")?;
            let est = v.error_estimate;
            let met = tol.map(|t| est <= t);
            let mut result = to_value(&v)?;
            result["tolerance_met"] = json!(met);
            let params = json!({"group": group, "genus": g.genus(), "A": a, "B": b, "maxlen": maxlen, "tol": tol, "mode": mode});
            Outcome::new(params, result, est)
        }
        Command::Btz { q, z } => {
            let (q, z) = (parse::complex(q)?, parse::complex(z)?);
            let value = btz_green(q, z).map_err(err)?;
            let geo = btz_green_geodesic(q, z).map_err(err)?;
            // two independent evaluations; rounding floor at a few ulps
            let est = if value.is_finite() { (value - geo).abs().max(4.0 * f64::EPSILON * (1.0 + value.abs())) } else { 0.0 };
            let result = json!({"value": value, "geodesic_value": geo});
            Outcome::new(json!({"q": complex_json(q), "z": complex_json(z)}), result, est)
        }
        Command::Limitset { group, depth } => {
            let g = parse::group(group)?;
            let depth = cfg.pick(*depth, "depth", 8)?;
            let pts = limit_points(&g, depth).map_err(err)?;
            let radius = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let rows = pts.iter().map(|z| vec![z.re.to_string(), z.im.to_string()]).collect();
            let result = json!({"count": pts.len(), "max_modulus": radius, "genus": g.genus()});
            // each point is an attracting fixed point, exact up to rounding
            Ok(Outcome::new(json!({"group": group, "depth": depth}), result, 4.0 * f64::EPSILON * radius.max(1.0))?
                .table(vec!["re", "im"], rows))
        }
        Command::Solenoid { genus, nmax, t } => {
            let nmax = cfg.pick(*nmax, "nmax", 3)?;
            let ranks = solenoid_ranks(*genus, nmax).map_err(err)?;
            let rows = ranks
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.n.to_string(),
                        l.rank.to_string(),
                        l.rank_computed.map_or(String::new(), |r| r.to_string()),
                        l.torsion_free.map_or(String::new(), |b| b.to_string()),
                    ]
                })
                .collect();
            let (dirac, est) = match t {
                Some(t) => {
                    let d = dirac_spectrum(*genus, nmax, *t).map_err(err)?;
                    let tail = d.theta_tail_bound;
                    (Some(d), ErrorEstimate::from(tail))
                }
                None => (None, Exact.into()),
            };
            let result = json!({"ranks": ranks, "dirac": dirac});
            Ok(Outcome::new(json!({"genus": genus, "nmax": nmax, "t": t}), result, est)?
                .table(vec!["n", "rank", "rank_computed", "torsion_free"], rows))
        }
        Command::Lfactor { hodge, s } => {
            let hd = parse_hodge(hodge)?;
            let s = parse::complex(s)?;
            let v = hodge_lfactor(&hd, s).map_err(err)?;
            let result = json!({"value": complex_json(v), "dimension": hd.dimension()});
            // products of Γ values at double precision
            let est = 16.0 * f64::EPSILON * v.norm() * (hd.dimension() as f64).max(1.0);
            let echo: Value = serde_json::from_str(hodge).map_err(err)?;
            Outcome::new(json!({"hodge": echo, "s": complex_json(s)}), result, est)
        }
        Command::RegdetCheck { genus, s } => {
            let s = parse::complex(s)?;
            let c = verify_regdet_identity(*genus, s).map_err(err)?;
            let est = c.relative_error;
            Outcome::new(json!({"genus": genus, "s": complex_json(s)}), c, est)
        }
        Command::BcState { a, b, beta, alpha, k } => {
            let k_max = cfg.pick(*k, "K", 1_000_000)?;
            let q = BcQuery { a: *a, b: *b, alpha: *alpha, beta: *beta, k_max };
            let v = bc_kms_value(&q).map_err(err)?;
            let result = json!({
                "value": complex_json(v.value),
                "truncated": complex_json(v.truncated),
                "tail_bound": v.tail_bound,
            });
            let est = (v.value - v.truncated).norm().max(4.0 * f64::EPSILON * v.value.norm());
            Outcome::new(to_value(q)?, result, est)
        }
        Command::Gl2Partition { beta, k } => {
            let k_max = cfg.pick(*k, "K", 100_000)?;
            let v = gl2_partition(*beta, k_max).map_err(err)?;
            let mut result = to_value(v)?;
            result["agrees"] = json!(v.agrees());
            let est = v.tail_bound;
            Outcome::new(json!({"beta": beta, "K": k_max}), result, est)
        }
        Command::Verify { profile } => {
            let profile = match profile {
                ProfileArg::Quick => Profile::Quick,
                ProfileArg::Full => Profile::Full,
            };
            let reports = run_all(profile);
            let passed = reports.iter().filter(|r| r.passed).count();
            let rows = reports
                .iter()
                .map(|r| vec![r.id.to_string(), r.name.to_string(), r.measured.clone(), r.threshold.to_string(), r.passed.to_string()])
                .collect();
            let mut list = to_value(&reports)?;
            if !cli.global.timing {
                for r in list.as_array_mut().into_iter().flatten() {
                    r.as_object_mut().map(|o| o.remove("seconds"));
                }
            }
            let result = json!({"passed": passed, "failed": reports.len() - passed, "criteria": list});
            let mut o = Outcome::new(json!({"profile": profile}), result, Exact)?
                .table(vec!["id", "name", "measured", "threshold", "passed"], rows);
            o.failed = passed != reports.len();
            Ok(o)
        }
    }
}

fn transfer(t: &TransferCmd, cfg: &Config) -> Result<Outcome, String> {
    match t {
        TransferCmd::Eig { sigma, variant, param, dim, x0 } => {
            let dim = cfg.pick(*dim, "dim", 24)?;
            let variant = match variant {
                VariantArg::Full => Variant::Full,
                VariantArg::Coset => Variant::Coset(*param),
                VariantArg::Hensley => Variant::Hensley(*param),
            };
            let mut spec = TransferSpec::new(*sigma, variant, dim);
            if let Some(x0) = x0.map(Some).unwrap_or(cfg.pick(None, "x0", f64::NAN).map(|x| (!x.is_nan()).then_some(x))?) {
                spec = spec.at(x0);
            }
            let top = top_eigen(&build_matrix(&spec).map_err(err)?).map_err(err)?;
            // truncation error: the same eigenvalue with eight more basis functions
            let finer = TransferSpec { dim: dim + 8, ..spec };
            let top2 = top_eigen(&build_matrix(&finer).map_err(err)?).map_err(err)?;
            let est = (top.lambda - top2.lambda).abs().max(4.0 * f64::EPSILON * top.lambda.abs());
            let mut rows = Vec::new();
            for block in 0..top.coefficients.len() {
                for i in 0..=100 {
                    let x = i as f64 / 100.0;
                    rows.push(vec![block.to_string(), x.to_string(), top.eval(block, x).to_string()]);
                }
            }
            let result = json!({
                "spec": spec,
                "leading_eigenvalue": top.lambda,
                "second_eigenvalue": {"re": top.second, "im": top.second_im},
                "gap": top.gap,
                "gap_warning": top.gap_warning,
                "error_estimate": est,
            });
            Ok(Outcome::new(to_value(spec)?, result, est)?.table(vec!["block", "x", "eigenfunction"], rows))
        }
        TransferCmd::GaussKuzmin { iters, dim, x0 } => {
            let iters = cfg.pick(*iters, "iters", 12)?;
            let dim = cfg.pick(*dim, "dim", 24)?;
            let gk = gauss_kuzmin_iterate_at(iters, dim, *x0).map_err(err)?;
            let ratios = gk.ratios();
            let rows = gk
                .distances
                .iter()
                .enumerate()
                .map(|(k, d)| vec![k.to_string(), d.to_string(), if k == 0 { String::new() } else { ratios[k - 1].to_string() }])
                .collect();
            let result = json!({"distances": gk.distances, "ratios": ratios, "x0": gk.x0});
            // the last distance bounds how far the iterate is from the limit
            let est = gk.distances.last().copied().unwrap_or(0.0);
            Ok(Outcome::new(json!({"iters": iters, "dim": dim, "x0": x0}), result, est)?
                .table(vec!["k", "distance", "ratio"], rows))
        }
        TransferCmd::Lyapunov { dim } => {
            let dim = cfg.pick(*dim, "dim", 24)?;
            let e = lyapunov_exponent(Variant::Full, 1.0, dim).map_err(err)?;
            let est = e.error_estimate;
            Outcome::new(json!({"dim": dim}), json!({"derivative": e.value}), est)
        }
    }
}

fn mixmaster(m: &MixmasterCmd, cfg: &Config, seed: u64) -> Result<Outcome, String> {
    match m {
        MixmasterCmd::Run { x0, s0, eras, track_v, v0 } => {
            let eras = cfg.pick(*eras, "eras", 50)?;
            let x = parse_surd(x0)?;
            let ev = evolve(&Orbit::Surd(x.clone()), *s0, eras, track_v.then_some(*v0)).map_err(err)?;
            let rows = ev
                .eras
                .iter()
                .map(|e| {
                    vec![
                        e.index.to_string(),
                        e.k.to_string(),
                        e.u.to_string(),
                        e.v.map_or(String::new(), |v| v.to_string()),
                        e.axis_label.clone(),
                        e.exponents.0.to_string(),
                        e.exponents.1.to_string(),
                        e.exponents.2.to_string(),
                    ]
                })
                .collect();
            let params = json!({"x0": x, "s0": s0, "eras": eras, "v0": track_v.then_some(*v0)});
            // digits and labels are exact; u is a double rounding of an exact surd
            let est = ev.eras.iter().map(|e| e.u).fold(0.0, f64::max) * f64::EPSILON;
            Ok(Outcome::new(params, ev, est)?.table(vec!["era", "k", "u", "v", "axis_label", "p1", "p2", "p3"], rows))
        }
        MixmasterCmd::Markov { digits } => {
            let mm = markov_matrix(*digits).map_err(err)?;
            let k = ck_ktheory(&mm.to_int_matrix()).map_err(err)?;
            Outcome::new(json!({"digits": digits}), json!({"matrix": mm, "k_theory": k}), Exact)
        }
        MixmasterCmd::Stats { samples, eras } => {
            let samples = cfg.pick(*samples, "samples", 1000)?;
            let eras = cfg.pick(*eras, "eras", 1)?;
            let st = axis_statistics(samples, eras, seed).map_err(err)?;
            let est = st.standard_error;
            let mut o = Outcome::new(json!({"samples": samples, "eras": eras}), st, est)?;
            o.seed = Some(seed);
            Ok(o)
        }
    }
}

/// a,b,c,d for (a + b√d)/c, or p/q.
fn parse_surd(s: &str) -> Result<QuadraticSurd, String> {
    let bad = || format!("cannot read '{s}' as a,b,c,d or p/q");
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        return QuadraticSurd::rational(p, q).map_err(err);
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c, d] = parts[..] else { return Err(bad()) };
    let n = |x: &str| x.parse::<i64>().map_err(|_| bad());
    let d: u64 = d.parse().map_err(|_| bad())?;
    QuadraticSurd::new(n(a)?, n(b)?, n(c)?, d).map_err(err)
}

fn parse_hodge(text: &str) -> Result<HodgeData, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("--hodge is not JSON: {e}"))?;
    let weight = v.get("m").and_then(Value::as_i64).ok_or("--hodge needs an integer weight 'm'")?;
    let pq = |key: &str| -> Result<(i64, i64), String> {
        let (p, q) = key.split_once(',').ok_or_else(|| format!("Hodge key '{key}' is not p,q"))?;
        Ok((p.trim().parse().map_err(|_| format!("bad p in '{key}'"))?, q.trim().parse().map_err(|_| format!("bad q in '{key}'"))?))
    };
    let count = |x: &Value| x.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or("Hodge numbers must be non-negative integers");
    let mut h = BTreeMap::new();
    for (key, n) in v.get("h").and_then(Value::as_object).ok_or("--hodge needs an object 'h'")? {
        h.insert(pq(key)?, count(n)?);
    }
    let embedding = match v.get("real") {
        None | Some(Value::Null) => Embedding::Complex,
        Some(r) => {
            let mut splits = BTreeMap::new();
            for (p, pair) in r.as_object().ok_or("'real' must map p to [h+, h−]")? {
                let pair = pair.as_array().filter(|a| a.len() == 2).ok_or("'real' entries must be [h+, h−]")?;
                let p: i64 = p.trim().parse().map_err(|_| format!("bad p '{p}' in 'real'"))?;
                splits.insert(p, (count(&pair[0])?, count(&pair[1])?));
            }
            Embedding::Real { splits }
        }
    };
    HodgeData::new(weight, h, embedding).map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn surd_forms() {
        assert_eq!(parse_surd("1/3").unwrap(), QuadraticSurd::rational(1, 3).unwrap());
        assert_eq!(parse_surd("-1,1,2,5").unwrap(), QuadraticSurd::new(-1, 1, 2, 5).unwrap());
        assert!(parse_surd("1,2").is_err());
        assert!(parse_surd("1,1,2,4").is_err());
    }

    #[test]
    fn hodge_forms() {
        let hd = parse_hodge(r#"{"m":1,"h":{"1,0":2,"0,1":2}}"#).unwrap();
        assert_eq!(hd, HodgeData::curve(2));
        let real = parse_hodge(r#"{"m":0,"h":{"0,0":3},"real":{"0":[2,1]}}"#).unwrap();
        assert_eq!(real.embedding, Embedding::Real { splits: BTreeMap::from([(0, (2, 1))]) });
        assert!(parse_hodge(r#"{"m":1,"h":{"1,0":2}}"#).is_err());
        assert!(parse_hodge(r#"{"h":{}}"#).is_err());
    }
}
