use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pvidim::bound::{dimension_bound, unconstrained_dimension, BoundConfig, BoundRule, Certification, DimensionReport};
use pvidim::classify::{block_family, classify_batch, ClassAssignment, ClassifyConfig, CoefficientMatrix, EntryDistribution, OccupancyTable};
use pvidim::model::{FaceConfig, ProblemKind, ProblemSpec};
use pvidim::oracle::{clusters, estimate_dimension, exact_verify, sample_problem, verify_detail, DimensionEstimate, OracleConfig, SolutionSample};
use pvidim::rank::{RankConfig, SchurOutcome};
use pvidim::{fixtures, Dim, Rational};
use serde_json::{json, Value};

use crate::document::{parse_point, ConfigOverrides, ProblemDocument};
use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "pvidim", version, about = "Dimension bounds for solution sets of polynomial variational inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Random seed for rank probes, face search and the oracle.
    #[arg(long, global = true, env = "PVIDIM_SEED")]
    pub seed: Option<u64>,
    /// Rank probe points per face.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Oracle starts per face.
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    /// Oracle acceptance tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Box width for classification.
    #[arg(long, global = true)]
    pub delta: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Maximal number of inequality constraints (faces are 2^m).
    #[arg(long, global = true)]
    pub face_budget: Option<usize>,
    /// Maximal number of symbolic minors per rank certificate.
    #[arg(long, global = true)]
    pub minor_budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Problem document (JSON).
    pub file: Option<PathBuf>,
    /// Built-in problem instead of a file.
    #[arg(long, conflicts_with = "file")]
    pub fixture: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Distribution {
    Normal,
    Uniform,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Faces, ranks, bound, finiteness and the oracle cross-check.
    Analyze(Source),
    /// Occupancy of the dimension classes for random box problems.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Distribution::Normal)]
        distribution: Distribution,
        /// Embed random blocks with this many zero components.
        #[arg(long)]
        block: Option<usize>,
        /// Add one record with A = 0.
        #[arg(long)]
        inject_zero: bool,
    },
    /// Whether a point solves the problem.
    Check {
        #[command(flatten)]
        source: Source,
        /// Comma-separated coordinates (`1/2`, `0.25` or integers).
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Pseudo-faces with feasibility and dimension.
    Faces(Source),
    /// Rank verdicts of the KKT Jacobians.
    Rank {
        #[command(flatten)]
        source: Source,
        /// Only this face, as comma-separated 1-based indices (empty for the interior).
        #[arg(long)]
        face: Option<String>,
    },
    /// List the built-in problems, or print one as a document.
    Fixtures { name: Option<String> },
}

/// Configuration after applying flags, environment and document overrides.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub bound: BoundConfig,
    pub oracle: OracleConfig,
    pub delta: Rational,
    pub format: Format,
}

impl Settings {
    pub fn resolve(g: &GlobalOpts, doc: &ConfigOverrides) -> Result<Self, CliError> {
        let seed = g.seed.or(doc.seed).unwrap_or(DEFAULT_SEED);
        let mut rank = RankConfig { seed, ..RankConfig::default() };
        if let Some(s) = g.samples.or(doc.samples) {
            rank.num_samples = s;
        }
        if let Some(b) = g.minor_budget.or(doc.minor_budget) {
            rank.minor_budget = b;
        }
        let mut face = FaceConfig { seed, ..FaceConfig::default() };
        if let Some(b) = g.face_budget.or(doc.face_budget) {
            face.face_budget = b;
        }
        let mut oracle = OracleConfig { seed, ..OracleConfig::default() };
        if let Some(s) = g.starts.or(doc.starts) {
            oracle.starts = s;
        }
        if let Some(t) = g.tol.or(doc.tol) {
            if !(t > 0.0) {
                return Err(CliError::Input("--tol must be positive".into()));
            }
            oracle.tol_accept = t;
        }
        let delta = match &g.delta {
            Some(s) => crate::document::parse_rational(s)?,
            None => pvidim::int(1),
        };
        Ok(Settings { seed, bound: BoundConfig { face, rank }, oracle, delta, format: g.format })
    }
}

pub fn load(source: &Source) -> Result<(String, ProblemDocument), CliError> {
    match (&source.file, &source.fixture) {
        (_, Some(name)) => {
            let spec = fixtures::by_name(name).ok_or_else(|| CliError::Input(format!("unknown fixture {name:?}")))?;
            Ok((name.clone(), ProblemDocument::from_spec(&spec)?))
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            Ok((path.display().to_string(), ProblemDocument::parse(&text)?))
        }
        (None, None) => Err(CliError::Input("give a problem file or --fixture NAME".into())),
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Analyze(src) => {
            let (name, doc) = load(src)?;
            let s = Settings::resolve(&cli.global, &doc.config)?;
            analyze(&name, &doc.to_spec()?, &s)
        }
        Command::Classify { n, d, count, distribution, block, inject_zero } => {
            let s = Settings::resolve(&cli.global, &ConfigOverrides::default())?;
            classify(*n, *d, *count, *distribution, *block, *inject_zero, &s)
        }
        Command::Check { source, point } => {
            let (name, doc) = load(source)?;
            let s = Settings::resolve(&cli.global, &doc.config)?;
            check(&name, &doc.to_spec()?, &parse_point(point)?, &s)
        }
        Command::Faces(src) => {
            let (name, doc) = load(src)?;
            let s = Settings::resolve(&cli.global, &doc.config)?;
            faces(&name, &doc.to_spec()?, &s)
        }
        Command::Rank { source, face } => {
            let (name, doc) = load(source)?;
            let s = Settings::resolve(&cli.global, &doc.config)?;
            let face = face.as_deref().map(parse_face).transpose()?;
            rank(&name, &doc.to_spec()?, face.as_deref(), &s)
        }
        Command::Fixtures { name } => fixtures_cmd(name.as_deref(), cli.global.format),
    }
}

fn parse_face(s: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| CliError::Input(format!("bad face index {part:?}")))?;
        if i == 0 {
            return Err(CliError::Input("face indices are 1-based".into()));
        }
        out.push(i - 1);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn set(alpha: &[usize]) -> String {
    let items: Vec<String> = alpha.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn rats(v: &[Rational]) -> String {
    let items: Vec<String> = v.iter().map(|r| r.to_string()).collect();
    format!("({})", items.join(", "))
}

fn floats(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{:.6}", x + 0.0)).collect();
    format!("({})", items.join(", "))
}

fn kind_label(k: ProblemKind) -> &'static str {
    match k {
        ProblemKind::Pvi => "pvi",
        ProblemKind::Pcp => "pcp",
        ProblemKind::FracOpt => "fracopt",
    }
}

fn rule_label(r: BoundRule) -> &'static str {
    match r {
        BoundRule::Formula => "min(dim K_α, N − rank)",
        BoundRule::FaceDimOnly => "dim K_α (rank not constant)",
        BoundRule::Empty => "empty face",
        BoundRule::NoZero => "KKT map has no zeros",
    }
}

fn cert_label(c: Certification) -> &'static str {
    match c {
        Certification::Certified => "CERTIFIED",
        Certification::Heuristic => "HEURISTIC",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossCheck {
    Sharp,
    Consistent,
    NoSamples,
    ExceedsHeuristic,
    Violation,
}

impl CrossCheck {
    pub fn of(report: &DimensionReport, est: &DimensionEstimate) -> Self {
        if est.sample_count == 0 {
            CrossCheck::NoSamples
        } else if est.value == report.overall_bound {
            CrossCheck::Sharp
        } else if est.value < report.overall_bound {
            CrossCheck::Consistent
        } else if report.certification == Certification::Certified {
            CrossCheck::Violation
        } else {
            CrossCheck::ExceedsHeuristic
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CrossCheck::Sharp => "SHARP",
            CrossCheck::Consistent => "CONSISTENT",
            CrossCheck::NoSamples => "NO_SAMPLES",
            CrossCheck::ExceedsHeuristic => "EXCEEDS_HEURISTIC_BOUND",
            CrossCheck::Violation => "VIOLATION",
        }
    }
}

fn face_rows(report: &DimensionReport) -> Vec<Value> {
    report
        .per_face
        .iter()
        .map(|f| {
            json!({
                "alpha": f.face.alpha.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "feasibility": f.face.feasible.label(),
                "witness": f.face.feasible.witness().map(|w| w.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
                "face_dim": f.face.face_dim,
                "dim_method": f.face.dim_method,
                "total_vars": f.total_vars,
                "rank": f.rank.as_ref().map(|v| v.rank),
                "tier": f.rank.as_ref().map(|v| v.tier),
                "minors_checked": f.rank.as_ref().map(|v| v.minors_checked),
                "face_bound": f.face_bound,
                "rule": f.rule,
            })
        })
        .collect()
}

/// Distinct solution points when the estimate is zero-dimensional.
fn points(samples: &[SolutionSample], est: &DimensionEstimate) -> Vec<Vec<f64>> {
    if est.value != Dim::Finite(0) {
        return Vec::new();
    }
    clusters(samples, 1e-6).into_iter().map(|c| c.center).collect()
}

pub fn analyze(name: &str, spec: &ProblemSpec, s: &Settings) -> Result<String, CliError> {
    let report = dimension_bound(spec, &s.bound)?;
    let samples = sample_problem(spec, &s.bound.face, &s.oracle)?;
    let est = estimate_dimension(&samples, &s.oracle);
    let verdict = CrossCheck::of(&report, &est);
    let exact = if spec.constraints.m() == 0 && spec.constraints.l() == 0 {
        Some(unconstrained_dimension(spec, &s.bound, &s.oracle)?)
    } else {
        None
    };
    let pts = points(&samples, &est);
    let exact_samples = samples.iter().filter(|x| x.exact).count();

    let out = match s.format {
        Format::Machine => {
            let pcp = report.pcp.as_ref().map(|p| {
                json!({
                    "df_rank": p.df_rank.rank,
                    "df_tier": p.df_rank.tier,
                    "fires": p.fires,
                    "schur": p.schur.iter().map(|(a, o)| json!({
                        "alpha": a.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "outcome": match o {
                            SchurOutcome::Pass => "PASS",
                            SchurOutcome::Fail(_) => "FAIL",
                            SchurOutcome::SingularComplement(_) => "SINGULAR_COMPLEMENT",
                        },
                    })).collect::<Vec<_>>(),
                })
            });
            let doc = json!({
                "problem": name,
                "kind": spec.kind,
                "n": report.n, "m": report.m, "l": report.l,
                "seed": s.seed,
                "faces": face_rows(&report),
                "bound": report.overall_bound,
                "certification": report.certification,
                "finiteness": report.finiteness,
                "pcp": pcp,
                "unconstrained": exact,
                "acq": report.acq,
                "oracle": {
                    "samples": est.sample_count,
                    "exact_samples": exact_samples,
                    "estimate": est.value,
                    "confidence": est.confidence,
                    "histogram": est.histogram,
                    "points": pts,
                },
                "cross_check": verdict.label(),
                "hypothesis_log": report.hypothesis_log,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(t, "problem {name}: {} with n = {}, m = {}, l = {}", kind_label(spec.kind), report.n, report.m, report.l);
            let _ = writeln!(t, "seed {}", s.seed);
            let _ = writeln!(t, "faces:");
            for f in &report.per_face {
                let rank = match &f.rank {
                    Some(v) => format!("rank {}/{} {}", v.rank, f.total_vars, v.tier.label()),
                    None => "rank -".to_string(),
                };
                let _ = writeln!(
                    t,
                    "  α = {:<9} {:<11} dim {:<4} {:<27} bound {:<4} {}",
                    set(&f.face.alpha),
                    f.face.feasible.label(),
                    f.face.face_dim.to_string(),
                    rank,
                    f.face_bound.to_string(),
                    rule_label(f.rule)
                );
            }
            let _ = writeln!(t, "bound: dim Sol ≤ {} ({})", report.overall_bound, cert_label(report.certification));
            let _ = writeln!(t, "finiteness: {}", report.finiteness.describe());
            if let Some(p) = &report.pcp {
                let _ = writeln!(
                    t,
                    "full-rank Jacobian path: rank DF = {} {}, {}",
                    p.df_rank.rank,
                    p.df_rank.tier.label(),
                    if p.fires { "applies" } else { "does not apply" }
                );
            }
            if let Some(u) = exact {
                let _ = writeln!(t, "unconstrained dimension: {u:?}");
            }
            let _ = writeln!(
                t,
                "oracle: {} samples ({} exact), estimate {} ({:?})",
                est.sample_count, exact_samples, est.value, est.confidence
            );
            for p in pts.iter().take(10) {
                let _ = writeln!(t, "  solution near {}", floats(p));
            }
            let _ = writeln!(t, "cross-check: {}", verdict.label());
            let _ = writeln!(t, "hypotheses:");
            for h in &report.hypothesis_log {
                let _ = writeln!(t, "  - {h}");
            }
            t
        }
    };
    if verdict == CrossCheck::Violation {
        return Err(CliError::Soundness(format!(
            "oracle estimate {} exceeds the certified bound {}\n{out}",
            est.value, report.overall_bound
        )));
    }
    Ok(out)
}

pub fn faces(name: &str, spec: &ProblemSpec, s: &Settings) -> Result<String, CliError> {
    let list = pvidim::model::enumerate_faces(&spec.constraints, &s.bound.face)?;
    Ok(match s.format {
        Format::Machine => {
            let rows: Vec<Value> = list
                .iter()
                .map(|f| {
                    json!({
                        "alpha": f.alpha.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "feasibility": f.feasible.label(),
                        "witness": f.feasible.witness().map(|w| w.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
                        "face_dim": f.face_dim,
                        "dim_method": f.dim_method,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "problem": name, "faces": rows })).expect("json") + "\n"
        }
        Format::Text => {
            let mut t = format!("problem {name}: {} pseudo-faces\n", list.len());
            for f in &list {
                let w = f.feasible.witness().map(rats).unwrap_or_else(|| "-".into());
                let _ = writeln!(t, "  α = {:<9} {:<11} dim {:<4} {:?}  witness {w}", set(&f.alpha), f.feasible.label(), f.face_dim.to_string(), f.dim_method);
            }
            t
        }
    })
}

pub fn rank(name: &str, spec: &ProblemSpec, face: Option<&[usize]>, s: &Settings) -> Result<String, CliError> {
    let report = dimension_bound(spec, &s.bound)?;
    let chosen: Vec<_> = report.per_face.iter().filter(|f| face.is_none_or(|a| f.face.alpha == a)).collect();
    if chosen.is_empty() {
        return Err(CliError::Input(format!("no face {}", set(face.unwrap_or(&[])))));
    }
    Ok(match s.format {
        Format::Machine => {
            let rows: Vec<Value> = chosen
                .iter()
                .map(|f| {
                    json!({
                        "alpha": f.face.alpha.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "total_vars": f.total_vars,
                        "rank": f.rank.as_ref().map(|v| v.rank),
                        "tier": f.rank.as_ref().map(|v| v.tier),
                        "minors_checked": f.rank.as_ref().map(|v| v.minors_checked),
                        "probe_points": f.rank.as_ref().map(|v| v.witness_points.len()),
                        "violating_pair": f.rank.as_ref().and_then(|v| v.violating_pair.as_ref()).map(|(a, b)| {
                            [a, b].map(|p| p.iter().map(|r| r.to_string()).collect::<Vec<_>>())
                        }),
                        "rule": f.rule,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "problem": name, "seed": s.seed, "ranks": rows })).expect("json") + "\n"
        }
        Format::Text => {
            let mut t = format!("problem {name}: rank of DΦ_α\n");
            for f in chosen {
                match &f.rank {
                    None => {
                        let _ = writeln!(t, "  α = {:<9} {}", set(&f.face.alpha), rule_label(f.rule));
                    }
                    Some(v) => {
                        let _ = writeln!(
                            t,
                            "  α = {:<9} rank {} of {} {}, {} probes, {} minors expanded",
                            set(&f.face.alpha),
                            v.rank,
                            f.total_vars,
                            v.tier.label(),
                            v.witness_points.len(),
                            v.minors_checked
                        );
                        if let Some((a, b)) = &v.violating_pair {
                            let _ = writeln!(t, "    rank differs between {} and {}", rats(a), rats(b));
                        }
                        if let Some(note) = &v.note {
                            let _ = writeln!(t, "    {note}");
                        }
                    }
                }
            }
            t
        }
    })
}

pub fn check(name: &str, spec: &ProblemSpec, x: &[Rational], s: &Settings) -> Result<String, CliError> {
    let n = spec.n();
    if x.len() != n {
        return Err(CliError::Input(format!("point has {} coordinates, expected {n}", x.len())));
    }
    let cert = exact_verify(spec, x)?;
    let xf: Vec<f64> = x.iter().map(pvidim::poly::to_f64).collect();
    let numeric = verify_detail(spec, &xf, s.oracle.tol_accept);
    let approx = numeric.as_ref().is_some_and(|v| v.residual <= s.oracle.tol_accept && v.lambda.iter().all(|&l| l >= -s.oracle.tol_accept));
    let verdict = match (&cert, approx) {
        (Some(_), _) => "SOLUTION (exact)",
        (None, true) => "APPROXIMATE SOLUTION",
        (None, false) => "NOT A SOLUTION",
    };
    Ok(match s.format {
        Format::Machine => {
            let doc = json!({
                "problem": name,
                "point": x.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                "verdict": verdict,
                "active": cert.as_ref().map(|c| c.active.iter().map(|i| i + 1).collect::<Vec<_>>())
                    .or_else(|| numeric.as_ref().map(|v| v.active.iter().map(|i| i + 1).collect())),
                "lambda": cert.as_ref().map(|c| c.lambda.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
                "mu": cert.as_ref().map(|c| c.mu.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
                "residual": numeric.as_ref().map(|v| v.residual),
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Text => {
            let mut t = format!("problem {name}, point {}: {verdict}\n", rats(x));
            if let Some(c) = &cert {
                let _ = writeln!(t, "  active {}", set(&c.active));
                let _ = writeln!(t, "  λ = {}", rats(&c.lambda));
                if !c.mu.is_empty() {
                    let _ = writeln!(t, "  μ = {}", rats(&c.mu));
                }
            } else if let Some(v) = &numeric {
                let _ = writeln!(t, "  active {} (tolerance {:e}), stationarity residual {:.3e}", set(&v.active), s.oracle.tol_accept, v.residual);
            } else {
                let _ = writeln!(t, "  the point is outside K");
            }
            t
        }
    })
}

fn classify(
    n: usize,
    d: usize,
    count: usize,
    dist: Distribution,
    block: Option<usize>,
    inject_zero: bool,
    s: &Settings,
) -> Result<String, CliError> {
    if n == 0 {
        return Err(CliError::Input("n must be at least 1".into()));
    }
    if n > s.oracle.max_n {
        return Err(pvidim::Error::OracleGuard { n, limit: s.oracle.max_n }.into());
    }
    if block.is_some_and(|k| k > n) {
        return Err(CliError::Input("--block must not exceed n".into()));
    }
    let dist = match dist {
        Distribution::Normal => EntryDistribution::StandardNormal,
        Distribution::Uniform => EntryDistribution::Uniform(1.0),
    };
    let mut mats: Vec<CoefficientMatrix> = (0..count)
        .map(|i| block_family(n, d, block.unwrap_or(0), dist, s.seed, i))
        .collect::<Result<_, _>>()?;
    if inject_zero {
        mats.push(CoefficientMatrix::zero(n, d)?);
    }
    let cfg = ClassifyConfig { bound: s.bound.clone(), oracle: s.oracle.clone(), delta: s.delta.clone() };
    let table = classify_batch(n, d, &mats, &cfg)?;
    Ok(render_table(&table, s))
}

fn render_table(table: &OccupancyTable, s: &Settings) -> String {
    let certified = table.records.iter().filter(|r| r.certification == Certification::Certified).count();
    match s.format {
        Format::Machine => {
            let classes: Vec<Value> = table.classes.iter().map(|(k, c)| json!({ "k": k, "count": c })).collect();
            let records: Vec<Value> = table
                .records
                .iter()
                .map(|r| {
                    json!({
                        "k_bound": r.k_bound,
                        "k_est": r.k_est,
                        "certification": r.certification,
                        "class": match r.class { ClassAssignment::Class(k) => json!(k), ClassAssignment::Unresolved => json!("UNRESOLVED") },
                    })
                })
                .collect();
            let doc = json!({
                "n": table.n, "d": table.d, "seed": s.seed, "delta": s.delta.to_string(),
                "records": table.records.len(),
                "classes": classes,
                "unresolved": table.unresolved,
                "certified_bounds": certified,
                "per_record": records,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Text => {
            let mut t = format!(
                "classes of PVI([0,{}]^{}, A·X), d = {}, {} records, seed {}\n",
                s.delta, table.n, table.d, table.records.len(), s.seed
            );
            let _ = writeln!(t, "  {:<11} count", "k");
            for (k, c) in &table.classes {
                let _ = writeln!(t, "  {:<11} {c}", k.to_string());
            }
            let _ = writeln!(t, "  {:<11} {}", "UNRESOLVED", table.unresolved);
            let _ = writeln!(t, "certified bounds: {certified} of {}", table.records.len());
            t
        }
    }
}

fn fixtures_cmd(name: Option<&str>, format: Format) -> Result<String, CliError> {
    match name {
        Some(n) => {
            let spec = fixtures::by_name(n).ok_or_else(|| CliError::Input(format!("unknown fixture {n:?}")))?;
            Ok(ProblemDocument::from_spec(&spec)?.to_json() + "\n")
        }
        None => {
            let all = fixtures::all();
            Ok(match format {
                Format::Machine => {
                    let names: Vec<&str> = all.iter().map(|(n, _)| *n).collect();
                    serde_json::to_string_pretty(&json!({ "fixtures": names })).expect("json") + "\n"
                }
                Format::Text => {
                    let mut t = String::new();
                    for (n, spec) in &all {
                        let _ = writeln!(t, "{n:<18} {} with n = {}, m = {}", kind_label(spec.kind), spec.n(), spec.constraints.m());
                    }
                    t
                }
            })
        }
    }
}
