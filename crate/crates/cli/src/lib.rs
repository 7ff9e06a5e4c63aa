//! Command implementations behind the `capatree` binary.

use capatree::circle::{self, DigitStream, DyadicDensity, Estimate, Membership, ProductIdentity, RunLength, Tail};
use capatree::dobinski::{self, CapacityBounds, ComparabilityTable, DimensionBracket, SequenceSpec, UpperBound, Verdict};
use capatree::exponents::{format_rational, parse_rational};
use capatree::oracle::{self, BatteryReport, FiniteProblem, OracleSolution};
use capatree::phi::{self, CapacityReport};
use capatree::tree::CylinderSet;
use capatree::{Exponents, LogValue, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

pub const SCHEMA: &str = "capatree/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] capatree::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("oracle mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(capatree::Error::NonConvergence { .. }) => 1,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
            CliError::Mismatch(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "capatree", version, about = "Discrete (a,p)-capacities on the dyadic tree")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExpArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub p: String,
}

impl ExpArgs {
    fn exponents(&self) -> CliResult<Exponents> {
        Ok(Exponents::parse(&self.a, &self.p)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Geometric,
    Power,
    Linear,
    ExpPoly,
    Constant,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeqArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Divisor for `geometric`: κ_n = ⌈2^n/m⌉.
    #[arg(long)]
    pub m: Option<u64>,
    /// Coefficient C, or the value for `constant`.
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    /// Sequence as JSON, inline or `@path`.
    #[arg(long, conflicts_with = "family")]
    pub spec: Option<String>,
}

impl SeqArgs {
    pub fn resolve(&self) -> CliResult<SequenceSpec> {
        if let Some(s) = &self.spec {
            let spec: SequenceSpec = parse_json_arg(s, "sequence spec")?;
            spec.validate()?;
            return Ok(spec);
        }
        let family = self.family.ok_or_else(|| CliError::Usage("need --family or --spec".into()))?;
        let rat = |v: &Option<String>, name: &str, default: Option<&str>| -> CliResult<Rational> {
            match (v, default) {
                (Some(s), _) => Ok(parse_rational(s)?),
                (None, Some(d)) => Ok(parse_rational(d)?),
                (None, None) => Err(CliError::Usage(format!("family {family:?} needs --{name}"))),
            }
        };
        let spec = match family {
            Family::Geometric => {
                SequenceSpec::Geometric { m: self.m.ok_or_else(|| CliError::Usage("geometric needs --m".into()))? }
            }
            Family::Power => SequenceSpec::Power { c: rat(&self.c, "c", Some("1"))?, beta: rat(&self.beta, "beta", None)? },
            Family::Linear => SequenceSpec::Linear { c: rat(&self.c, "c", Some("1"))? },
            Family::ExpPoly => SequenceSpec::ExpPoly {
                c: rat(&self.c, "c", Some("1"))?,
                beta: rat(&self.beta, "beta", Some("0"))?,
                gamma: rat(&self.gamma, "gamma", None)?,
            },
            Family::Constant => SequenceSpec::Power { c: rat(&self.c, "c", None)?, beta: Rational::from_integer(0.into()) },
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity of a finite union of cylinders.
    CapCylinder {
        #[command(flatten)]
        exp: ExpArgs,
        /// JSON array of words, inline or `@path`, e.g. `["0","10"]`.
        #[arg(long)]
        set: String,
    },
    /// Closed-form capacity of the component D(n, κ).
    CapComponent {
        #[command(flatten)]
        exp: ExpArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        kappa: String,
    },
    /// Positive / zero verdict for a limsup set.
    Classify {
        #[command(flatten)]
        exp: ExpArgs,
        #[command(flatten)]
        seq: SeqArgs,
        /// Classify the full Dobiński set instead.
        #[arg(long)]
        full: bool,
    },
    /// Lower and upper capacity bounds from the components.
    Bounds {
        #[command(flatten)]
        exp: ExpArgs,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
    },
    /// Ratios of component capacities to the comparison terms.
    Ratios {
        #[command(flatten)]
        exp: ExpArgs,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value_t = 1)]
        start: u64,
        #[arg(long, default_value_t = 100)]
        end: u64,
    },
    /// Dimension bracket over an (ap, p) grid.
    Dimension {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long, default_value = "1/4,1/2,3/4,1")]
        aps: String,
        #[arg(long, default_value = "2,3")]
        ps: String,
    },
    /// Recursion against the convex oracle on random finite problems.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 5e-5)]
        threshold: f64,
    },
    /// Solve one finite problem with the convex oracle.
    OracleSolve {
        /// Problem JSON, inline or `@path`.
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Riesz capacity of the whole circle.
    CircleCapacity {
        #[arg(long)]
        a: String,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = circle::DEFAULT_TOL)]
        tol: f64,
    },
    /// Riesz potential of a dyadic density.
    RieszPotential {
        #[arg(long)]
        a: String,
        /// `{"depth": d, "values": [...]}`, inline or `@path`.
        #[arg(long)]
        density: String,
        /// Comma-separated points in [0, 1).
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = circle::DEFAULT_TOL)]
        tol: f64,
    },
    /// Partial tangent product against (2 sin πx)².
    ProductIdentity {
        #[arg(long)]
        x: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// Digit run lengths s_n and the membership score.
    RunLengths {
        /// A rational in [0, 1].
        #[arg(long, conflicts_with = "digits")]
        x: Option<String>,
        /// Explicit leading digits, e.g. `0111`.
        #[arg(long)]
        digits: Option<String>,
        /// Repeating tail after `--digits`; without it the tail is unknown.
        #[arg(long, requires = "digits")]
        period: Option<String>,
        #[arg(long = "N")]
        n: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CapCylinder { .. } => "cap-cylinder",
            Command::CapComponent { .. } => "cap-component",
            Command::Classify { .. } => "classify",
            Command::Bounds { .. } => "bounds",
            Command::Ratios { .. } => "ratios",
            Command::Dimension { .. } => "dimension",
            Command::OracleCheck { .. } => "oracle-check",
            Command::OracleSolve { .. } => "oracle-solve",
            Command::CircleCapacity { .. } => "circle-capacity",
            Command::RieszPotential { .. } => "riesz-potential",
            Command::ProductIdentity { .. } => "product-identity",
            Command::RunLengths { .. } => "run-lengths",
        }
    }
}

/// `{"schema", "command", "config", "result"}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub command: String,
    pub config: Value,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderResult {
    pub set: CylinderSet,
    pub capacity: CapacityReport,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentResult {
    pub n: u64,
    pub kappa: String,
    pub sigma: LogValue,
    pub capacity: CapacityReport,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsResult {
    #[serde(flatten)]
    pub bounds: CapacityBounds,
    pub lower_value: Option<f64>,
    pub upper_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolveResult {
    pub solution: OracleSolution,
    pub recursion: LogValue,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleResult {
    pub kernel_integral: Estimate,
    pub capacity: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialPoint {
    pub y: f64,
    #[serde(flatten)]
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialResult {
    pub density_integral: f64,
    pub points: Vec<PotentialPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLengthResult {
    pub dyadic: bool,
    pub runs: Vec<RunLength>,
    pub membership: Membership,
}

/// A finished command: the JSON result and, for tabular commands, CSV rows.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    pub mismatch: Option<String>,
}

fn parse_json_arg<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed {what}: {e}")))
}

fn parse_list(s: &str) -> CliResult<Vec<Rational>> {
    s.split(',').map(|t| Ok(parse_rational(t.trim())?)).collect()
}

fn parse_bits(s: &str) -> CliResult<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("digit {c:?} is not 0 or 1"))),
        })
        .collect()
}

fn parse_point(s: &str) -> CliResult<f64> {
    if let Ok(r) = parse_rational(s) {
        return Ok(capatree::exponents::rational_to_f64(&r));
    }
    s.parse::<f64>().map_err(|_| CliError::Usage(format!("malformed point {s:?}")))
}

fn linear(v: LogValue) -> Option<f64> {
    v.to_f64_checked()
}

/// Linear column for a log2 value; empty outside double range.
fn linear_cell(log2: f64) -> String {
    if log2.is_finite() && log2.abs() < 1000.0 {
        format!("{}", log2.exp2())
    } else if log2 == f64::NEG_INFINITY {
        "0".into()
    } else {
        String::new()
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("results serialize")
}

fn exp_config(e: &Exponents) -> Value {
    to_value(e)
}

pub fn execute(command: &Command) -> CliResult<Report> {
    let name = command.name();
    let report = |config: Value, result: Value| Report { command: name, config, result, table: None, mismatch: None };
    match command {
        Command::CapCylinder { exp, set } => {
            let e = exp.exponents()?;
            let words: Vec<String> = parse_json_arg(set, "cylinder set")?;
            let words = words
                .iter()
                .map(|w| w.parse().map_err(|_| CliError::Usage(format!("malformed word {w:?}"))))
                .collect::<CliResult<Vec<_>>>()?;
            let set = CylinderSet::canonicalize(words);
            let capacity = phi::capacity_recursive(&set, &e);
            let result = CylinderResult { set, capacity, value: linear(capacity.value) };
            Ok(report(json!({"exponents": exp_config(&e)}), to_value(&result)))
        }
        Command::CapComponent { exp, n, kappa } => {
            let e = exp.exponents()?;
            let k: BigUint = kappa.parse().map_err(|_| CliError::Usage(format!("malformed kappa {kappa:?}")))?;
            if k < BigUint::from(1u32) {
                return Err(CliError::Usage("kappa must be >= 1".into()));
            }
            let capacity = phi::cap_component(*n, &k, &e);
            let result = ComponentResult {
                n: *n,
                kappa: k.to_string(),
                sigma: phi::sigma(*n, &k, &e),
                capacity,
                value: linear(capacity.value),
            };
            Ok(report(json!({"exponents": exp_config(&e), "n": n, "kappa": k.to_string()}), to_value(&result)))
        }
        Command::Classify { exp, seq, full } => {
            let e = exp.exponents()?;
            let (verdict, spec): (Verdict, Value) = if *full {
                (dobinski::dobinski_full(&e)?, json!("dobinski"))
            } else {
                let spec = seq.resolve()?;
                (dobinski::classify(&spec, &e)?, to_value(&spec))
            };
            Ok(report(json!({"exponents": exp_config(&e), "sequence": spec, "full": full}), to_value(&verdict)))
        }
        Command::Bounds { exp, seq, n_max } => {
            let e = exp.exponents()?;
            let spec = seq.resolve()?;
            let bounds = dobinski::capacity_bounds(&spec, &e, *n_max)?;
            let upper_value = match &bounds.upper {
                UpperBound::Bound(r) => linear(r.value),
                UpperBound::Unbounded => None,
            };
            let result = BoundsResult { lower_value: linear(bounds.lower.value), upper_value, bounds };
            Ok(report(
                json!({"exponents": exp_config(&e), "sequence": to_value(&spec), "n_max": n_max}),
                to_value(&result),
            ))
        }
        Command::Ratios { exp, seq, start, end } => {
            let e = exp.exponents()?;
            let spec = seq.resolve()?;
            let table: ComparabilityTable = dobinski::comparability_report(&e, *start, *end, &spec)?;
            let header = vec![
                "n",
                "kappa",
                "kappa_log2",
                "capacity",
                "capacity_log2",
                "comparison",
                "comparison_log2",
                "ratio",
                "ratio_log2",
            ];
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    let kappa = spec.kappa(r.n).map(|k| k.to_string()).unwrap_or_default();
                    let kappa = if kappa.len() <= 300 { kappa } else { String::new() };
                    vec![
                        r.n.to_string(),
                        kappa,
                        r.kappa_log2.to_string(),
                        linear_cell(r.capacity_log2),
                        r.capacity_log2.to_string(),
                        linear_cell(r.comparison_log2),
                        r.comparison_log2.to_string(),
                        linear_cell(r.ratio_log2),
                        r.ratio_log2.to_string(),
                    ]
                })
                .collect();
            let config = json!({"exponents": exp_config(&e), "sequence": to_value(&spec), "start": start, "end": end});
            Ok(Report { table: Some((header, rows)), ..report(config, to_value(&table)) })
        }
        Command::Dimension { seq, aps, ps } => {
            let spec = seq.resolve()?;
            let (aps, ps) = (parse_list(aps)?, parse_list(ps)?);
            let grid = dobinski::ap_grid(&aps, &ps)?;
            let bracket: DimensionBracket = dobinski::dimension_profile(&spec, &grid)?;
            let rows = bracket
                .points
                .iter()
                .map(|pt| {
                    vec![
                        format_rational(pt.exponents.a()),
                        format_rational(pt.exponents.p()),
                        format_rational(pt.exponents.ap()),
                        format_rational(&pt.one_minus_ap),
                        format!("{:?}", pt.outcome),
                    ]
                })
                .collect();
            let fmt = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
            let config = json!({"sequence": to_value(&spec), "aps": fmt(&aps), "ps": fmt(&ps)});
            Ok(Report {
                table: Some((vec!["a", "p", "ap", "one_minus_ap", "outcome"], rows)),
                ..report(config, to_value(&bracket))
            })
        }
        Command::OracleCheck { seed, count, max_depth, tol, threshold } => {
            if *max_depth < 1 || *max_depth > oracle::MAX_DEPTH {
                return Err(CliError::Usage(format!("--max-depth must lie in 1..={}", oracle::MAX_DEPTH)));
            }
            if *count == 0 {
                return Err(CliError::Usage("--count must be positive".into()));
            }
            if !(1e-8..=1e-3).contains(tol) {
                return Err(CliError::Usage("--tol must lie in [1e-8, 1e-3]".into()));
            }
            let battery: BatteryReport = oracle::oracle_battery(*seed, *count, *max_depth, *tol, *threshold);
            let rows = battery
                .cases
                .iter()
                .map(|c| {
                    vec![
                        c.index.to_string(),
                        c.depth.to_string(),
                        format_rational(c.exponents.a()),
                        format_rational(c.exponents.p()),
                        c.targets.to_string(),
                        c.oracle.map(|v| v.to_string()).unwrap_or_default(),
                        c.recursion.to_string(),
                        c.rel_error.map(|v| v.to_string()).unwrap_or_default(),
                        c.passed.to_string(),
                    ]
                })
                .collect();
            let mismatch = (!battery.all_passed).then(|| {
                let bad = battery.cases.iter().filter(|c| !c.passed).count();
                format!("{bad} of {count} cases exceed relative error {threshold}")
            });
            let config = json!({"seed": seed, "count": count, "max_depth": max_depth, "tol": tol, "threshold": threshold});
            Ok(Report {
                table: Some((
                    vec!["index", "depth", "a", "p", "targets", "oracle", "recursion", "rel_error", "passed"],
                    rows,
                )),
                mismatch,
                ..report(config, to_value(&battery))
            })
        }
        Command::OracleSolve { problem, tol } => {
            let problem: FiniteProblem = parse_json_arg(problem, "finite problem")?;
            problem.validate()?;
            let solution = oracle::solve_capacity(&problem, *tol)?;
            let recursion = problem.recursion_value();
            let rec = recursion.to_f64();
            let result = OracleSolveResult { rel_error: ((solution.value - rec) / rec).abs(), solution, recursion };
            Ok(report(json!({"problem": to_value(&problem), "tol": tol}), to_value(&result)))
        }
        Command::CircleCapacity { a, p, tol } => {
            let (a, p) = (parse_rational(a)?, parse_rational(p)?);
            let result = CircleResult {
                kernel_integral: circle::kernel_integral(&a, *tol)?,
                capacity: circle::circle_full_capacity_tol(&a, &p, *tol)?,
            };
            let config = json!({"a": format_rational(&a), "p": format_rational(&p), "tol": tol, "metric": "chord"});
            Ok(report(config, to_value(&result)))
        }
        Command::RieszPotential { a, density, y, tol } => {
            let a = parse_rational(a)?;
            let f: DyadicDensity = parse_json_arg(density, "density")?;
            f.validate()?;
            let ys = y.split(',').map(|s| parse_point(s.trim())).collect::<CliResult<Vec<_>>>()?;
            let estimates = circle::riesz_potentials(&f, &ys, &a, *tol)?;
            let points = ys.iter().zip(estimates).map(|(&y, estimate)| PotentialPoint { y, estimate }).collect();
            let result = PotentialResult { density_integral: f.integral(), points };
            let config = json!({"a": format_rational(&a), "density": to_value(&f), "tol": tol, "metric": "chord"});
            Ok(report(config, to_value(&result)))
        }
        Command::ProductIdentity { x, n } => {
            let x = parse_rational(x)?;
            let result: ProductIdentity = circle::product_identity(&x, *n)?;
            Ok(report(json!({"x": format_rational(&x), "N": n}), to_value(&result)))
        }
        Command::RunLengths { x, digits, period, n } => {
            let (stream, config) = match (x, digits) {
                (Some(x), None) => {
                    let x = parse_rational(x)?;
                    (DigitStream::rational(x.clone())?, json!({"x": format_rational(&x), "N": n}))
                }
                (None, Some(d)) => {
                    let tail = match period {
                        Some(p) => Tail::Periodic(parse_bits(p)?),
                        None => Tail::Censored,
                    };
                    let stream = DigitStream::Digits { prefix: parse_bits(d)?, tail };
                    (stream, json!({"digits": d, "period": period, "N": n}))
                }
                _ => return Err(CliError::Usage("need exactly one of --x and --digits".into())),
            };
            let runs = circle::run_lengths(&stream, *n)?;
            let membership = circle::membership_score(&stream, *n)?;
            let rows = runs
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let (value, status) = match r {
                        RunLength::Finite(s) => (s.to_string(), "finite"),
                        RunLength::Infinite => (String::new(), "infinite"),
                        RunLength::Censored(s) => (s.to_string(), "censored"),
                    };
                    vec![(i + 1).to_string(), value, status.to_string()]
                })
                .collect();
            let result = RunLengthResult { dyadic: stream.is_dyadic(), runs, membership };
            Ok(Report { table: Some((vec!["n", "s_n", "status"], rows)), ..report(config, to_value(&result)) })
        }
    }
}

/// Writes the report in the requested format.
pub fn emit<W: Write>(report: &Report, format: Format, out: &mut W) -> CliResult<()> {
    match format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA.to_string(),
                command: report.command.to_string(),
                config: report.config.clone(),
                result: report.result.clone(),
            };
            serde_json::to_writer_pretty(&mut *out, &env).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let Some((header, rows)) = &report.table else {
                return Err(CliError::Usage(format!("{} has no CSV form; use --format json", report.command)));
            };
            let config = json!({"schema": SCHEMA, "command": report.command, "config": report.config});
            writeln!(out, "# config {config}")?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(header).map_err(csv_io)?;
            for row in rows {
                w.write_record(row).map_err(csv_io)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Applies `CAPATREE_THREADS` to the global rayon pool.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("CAPATREE_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("CAPATREE_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Parses, runs and emits; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = configure_threads().and_then(|_| {
        let report = execute(&cli.command)?;
        match &cli.output {
            Some(path) => {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                emit(&report, cli.format, &mut f)?;
                f.flush()?;
            }
            None => emit(&report, cli.format, &mut std::io::stdout().lock())?,
        }
        match report.mismatch {
            Some(m) => Err(CliError::Mismatch(m)),
            None => Ok(()),
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
