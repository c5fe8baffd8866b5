//! Command-line front end: `bounds`, `verify` and `sweep`.
//!
//! Exit codes: 0 success (including "hypothesis not met"), 1 a verification
//! check failed, 2 invalid parameters or unmet preconditions, 3 unsupported
//! model feature, 4 numerical failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::epsrange::{check_ab, d_tilde, EffectiveDim, EpsParams};
use crate::error::{Error, Result};
use crate::manifold::{geodesic, Base, Expr, GeodesicRecord, WeightedModel};
use crate::thresholds::{
    delta1, delta2, delta2_prime, delta_complete, delta_fundamental, diameter_bound, eta_star, GeometryBounds,
    ThresholdReport,
};
use crate::verify::{
    second_variation_terms, verify_bishop, verify_diameter_theorem, verify_segment_inequality,
    verify_volume_comparison, Ball, DiameterMode, SegmentIntegrand, VerificationReport, Verdict,
};

/// Version of the JSON layout.
pub const SCHEMA: u32 = 1;
/// Default geodesic step is `L / DEFAULT_STEPS`.
pub const DEFAULT_STEPS: usize = 2048;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative tolerance of the volume comparison.
pub const DEFAULT_VOLUME_TOL: f64 = 1e-6;

const CSV_COLUMNS: [&str; 12] = ["quantity", "n", "N", "eps", "K", "a", "b", "H", "R", "eta", "value", "intermediates"];
const VERIFY_COLUMNS: [&str; 11] =
    ["suite", "check", "verdict", "pass", "lhs", "rhs", "margin", "tolerance", "stderr", "seed", "samples"];

#[derive(Debug, Parser)]
#[command(name = "wmyers", version, about = "Diameter thresholds and inequality checks for weighted manifolds")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate D̃, the diameter bound and the smallness thresholds.
    Bounds(BoundsArgs),
    /// Run verification suites on a model file.
    Verify(VerifyArgs),
    /// Evaluate one quantity over a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("cannot parse '{s}' as a decimal number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not a finite number"))
    }
}

fn parse_dim(s: &str) -> std::result::Result<EffectiveDim, String> {
    s.parse()
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: usize,
    /// Effective dimension; `inf` for N = ∞.
    #[arg(long = "N", value_parser = parse_dim)]
    pub big_n: EffectiveDim,
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long, default_value = "1", value_parser = parse_real)]
    pub a: f64,
    #[arg(long, default_value = "1", value_parser = parse_real)]
    pub b: f64,
    #[arg(long = "H", value_parser = parse_real)]
    pub h: f64,
    #[arg(long, value_parser = parse_real)]
    pub eta: f64,
    /// Lower curvature bound; defaults to 0 when R is given.
    #[arg(long = "K", value_parser = parse_real, allow_hyphen_values = true)]
    pub big_k: Option<f64>,
    #[arg(long = "R", value_parser = parse_real)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    #[value(name = "d_tilde")]
    DTilde,
    #[value(name = "diameter_bound")]
    DiameterBound,
    #[value(name = "delta1")]
    Delta1,
    #[value(name = "delta2")]
    Delta2,
    #[value(name = "delta2_prime")]
    Delta2Prime,
    #[value(name = "delta_complete")]
    DeltaComplete,
    #[value(name = "delta_fundamental")]
    DeltaFundamental,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::DTilde => "d_tilde",
            Quantity::DiameterBound => "diameter_bound",
            Quantity::Delta1 => "delta1",
            Quantity::Delta2 => "delta2",
            Quantity::Delta2Prime => "delta2_prime",
            Quantity::DeltaComplete => "delta_complete",
            Quantity::DeltaFundamental => "delta_fundamental",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Quantities to print; by default everything the given flags determine.
    #[arg(long, value_delimiter = ',')]
    pub quantity: Vec<Quantity>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bishop,
    Volume,
    Segment,
    SecondVariation,
    Diameter,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Bishop => "bishop",
            Suite::Volume => "volume",
            Suite::Segment => "segment",
            Suite::SecondVariation => "second-variation",
            Suite::Diameter => "diameter",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Compact,
    Complete,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Effective dimension; defaults to the model dimension.
    #[arg(long = "N", value_parser = parse_dim)]
    pub big_n: Option<EffectiveDim>,
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long = "K", default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub big_k: f64,
    #[arg(long = "H", default_value = "1", value_parser = parse_real)]
    pub h: f64,
    #[arg(long, default_value = "0.5", value_parser = parse_real)]
    pub eta: f64,
    /// Geodesic length for the bishop and second-variation suites.
    #[arg(long, value_parser = parse_real)]
    pub length: Option<f64>,
    /// Geodesic samples: step = length / steps.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Test-function parameter of the second-variation suite.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Inner radius of the volume comparison; defaults to R/2.
    #[arg(long, value_parser = parse_real)]
    pub r: Option<f64>,
    /// Outer radius (volume) or ball radius (complete diameter mode).
    #[arg(long = "R", value_parser = parse_real)]
    pub big_r: Option<f64>,
    /// Radius of A1 = A2 = W in the segment suite.
    #[arg(long, default_value = "0.3", value_parser = parse_real)]
    pub radius: f64,
    /// F in the segment suite: a number, `distance` (to the model origin) or an expression.
    #[arg(long, default_value = "1")]
    pub integrand: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = parse_real)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_VOLUME_TOL, value_parser = parse_real)]
    pub volume_tol: f64,
    #[arg(long, value_enum, default_value = "compact")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Eta,
    /// b/a with a fixed.
    Ratio,
    #[value(name = "N")]
    BigN,
    Eps,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long, value_enum)]
    pub over: SweepVar,
    /// Explicit grid values (comma separated); `inf` is accepted for N.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Vec<String>,
    /// Equally spaced grid `from + (to − from)·i/(points − 1)`.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub to: Option<f64>,
    /// Number of grid points; with no range, an η sweep of delta2 covers (0, η*).
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match &config.command {
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: writing output: {e}");
            4
        }
        Err(CliError::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

enum CliError {
    Run(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

type CliResult = std::result::Result<i32, CliError>;

/// 17 significant digits, enough to recover the exact double.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn format_dim(d: EffectiveDim) -> String {
    match d {
        EffectiveDim::Infinite => "inf".into(),
        EffectiveDim::Finite(v) => format_real(v),
    }
}

fn opt_real(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

/// One output row of `bounds` and `sweep`.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub quantity: &'static str,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: EffectiveDim,
    pub eps: f64,
    #[serde(rename = "K")]
    pub big_k: Option<f64>,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub eta: f64,
    pub value: f64,
    pub branch: Option<&'static str>,
    #[serde(skip)]
    pub intermediates: Vec<(String, f64)>,
    #[serde(rename = "intermediates")]
    intermediates_map: BTreeMap<String, f64>,
}

impl Row {
    fn new(q: Quantity, inp: &Inputs, value: f64, report: Option<&ThresholdReport>) -> Self {
        let intermediates = report.map(|r| r.intermediates.clone()).unwrap_or_default();
        Self {
            quantity: q.name(),
            n: inp.p.n(),
            big_n: inp.p.effective_dim(),
            eps: inp.p.eps(),
            big_k: inp.big_k,
            a: inp.a,
            b: inp.b,
            h: inp.h,
            r: inp.r,
            eta: inp.eta,
            value,
            branch: report.map(|r| r.branch.name()),
            intermediates_map: intermediates.iter().cloned().collect(),
            intermediates,
        }
    }

    fn csv_record(&self) -> Vec<String> {
        let inter: Vec<String> = self.intermediates.iter().map(|(k, v)| format!("{k}={}", format_real(*v))).collect();
        vec![
            self.quantity.to_string(),
            self.n.to_string(),
            format_dim(self.big_n),
            format_real(self.eps),
            opt_real(self.big_k),
            format_real(self.a),
            format_real(self.b),
            format_real(self.h),
            opt_real(self.r),
            format_real(self.eta),
            format_real(self.value),
            inter.join(";"),
        ]
    }
}

/// Validated parameter set shared by `bounds` and `sweep`.
#[derive(Debug, Clone, Copy)]
struct Inputs {
    p: EpsParams,
    a: f64,
    b: f64,
    h: f64,
    eta: f64,
    big_k: Option<f64>,
    r: Option<f64>,
}

impl Inputs {
    fn from_args(a: &ParamArgs) -> Result<Self> {
        let p = EpsParams::new(a.n, a.big_n, a.eps)?;
        check_ab(a.a, a.b)?;
        if !(a.h > 0.0) {
            return Err(Error::Domain(format!("H must be a positive finite real, got {}", a.h)));
        }
        if !(a.eta >= 0.0) {
            return Err(Error::Domain(format!("eta must be non-negative, got {}", a.eta)));
        }
        let big_k = match (a.big_k, a.r) {
            (None, Some(_)) => Some(0.0),
            (k, _) => k,
        };
        if let Some(k) = big_k {
            if k > 0.0 {
                return Err(Error::Unsupported(format!(
                    "K = {k} > 0: the complete-manifold thresholds assume K <= 0"
                )));
            }
        }
        if let Some(r) = a.r {
            if !(r > 0.0) {
                return Err(Error::Domain(format!("R must be a positive finite real, got {r}")));
            }
        }
        Ok(Self {
            p,
            a: a.a,
            b: a.b,
            h: a.h,
            eta: a.eta,
            big_k,
            r: a.r,
        })
    }

    fn geometry(&self) -> Result<GeometryBounds> {
        let r = self.r.ok_or_else(|| Error::Domain("this quantity needs --R".into()))?;
        GeometryBounds::new(self.big_k.unwrap_or(0.0), self.a, self.b, self.h, r, self.eta)
    }

    /// Quantities determined by the given flags.
    fn default_quantities(&self) -> Result<Vec<Quantity>> {
        let mut q = vec![Quantity::DTilde, Quantity::DiameterBound];
        if self.eta > 0.0 {
            q.push(Quantity::Delta1);
            if let Some(r) = self.r {
                let dt = d_tilde(&self.p, self.a, self.b)?;
                if r > PI * dt / self.h.sqrt() && self.eta < eta_star(self.h, r, dt)? {
                    q.push(Quantity::Delta2);
                }
                q.extend([Quantity::Delta2Prime, Quantity::DeltaComplete, Quantity::DeltaFundamental]);
            }
        }
        Ok(q)
    }

    fn evaluate(&self, q: Quantity) -> Result<Row> {
        let report = match q {
            Quantity::DTilde => return Ok(Row::new(q, self, d_tilde(&self.p, self.a, self.b)?, None)),
            Quantity::DiameterBound => {
                return Ok(Row::new(q, self, diameter_bound(&self.p, self.a, self.b, self.h, self.eta)?, None))
            }
            Quantity::Delta1 => delta1(&self.p, self.a, self.b, self.h, self.eta)?,
            Quantity::Delta2 => delta2(&self.p, &self.geometry()?)?,
            Quantity::Delta2Prime => delta2_prime(&self.p, &self.geometry()?)?,
            Quantity::DeltaComplete => delta_complete(&self.p, &self.geometry()?)?,
            Quantity::DeltaFundamental => delta_fundamental(&self.p, &self.geometry()?)?,
        };
        Ok(Row::new(q, self, report.value, Some(&report)))
    }
}

fn write_rows(out: &mut dyn Write, command: &str, header: &[(String, String)], rows: &[Row], format: Format) -> CliResult {
    match format {
        Format::Csv => {
            writeln!(out, "# wmyers {command} (schema {SCHEMA})")?;
            for (k, v) in header {
                writeln!(out, "# {k} = {v}")?;
            }
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CSV_COLUMNS)?;
            for r in rows {
                w.write_record(r.csv_record())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let defaults: BTreeMap<&str, &str> = header.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            let doc = json!({ "schema": SCHEMA, "command": command, "defaults": defaults, "rows": rows });
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(0)
}

fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> CliResult {
    let inp = Inputs::from_args(&args.params)?;
    let mut quantities = if args.quantity.is_empty() {
        inp.default_quantities()?
    } else {
        args.quantity.clone()
    };
    quantities.dedup();
    let rows: Vec<Row> = quantities.iter().map(|q| inp.evaluate(*q)).collect::<Result<_>>()?;
    let header = vec![
        ("K".to_string(), inp.big_k.map_or("unset".into(), format_real)),
        ("R".to_string(), inp.r.map_or("unset".into(), format_real)),
        ("quantities".to_string(), quantities.iter().map(|q| q.name()).collect::<Vec<_>>().join(",")),
    ];
    write_rows(out, "bounds", &header, &rows, args.format)
}

fn grid_values(args: &SweepArgs, inp: &Inputs) -> Result<Vec<String>> {
    if !args.values.is_empty() {
        return Ok(args.values.clone());
    }
    let points = args.points.unwrap_or(0);
    if points == 0 {
        return Err(Error::Domain("empty grid: give --values or --points >= 1".into()));
    }
    let (from, to, open) = match (args.from, args.to) {
        (Some(f), Some(t)) => (f, t, false),
        (None, None) if args.over == SweepVar::Eta && args.quantity == Quantity::Delta2 => {
            let r = inp.r.ok_or_else(|| Error::Domain("delta2 needs --R".into()))?;
            let dt = d_tilde(&inp.p, inp.a, inp.b)?;
            let top = eta_star(inp.h, r, dt)?;
            if top <= 0.0 {
                return Err(Error::Domain(format!("no admissible eta: eta* = {top} for R = {r}")));
            }
            (0.0, top, true)
        }
        _ => return Err(Error::Domain("give both --from and --to, or --values".into())),
    };
    Ok((0..points)
        .map(|i| {
            let x = if open {
                from + (to - from) * (i + 1) as f64 / (points + 1) as f64
            } else if points == 1 {
                from
            } else {
                from + (to - from) * i as f64 / (points - 1) as f64
            };
            format_real(x)
        })
        .collect())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let base = Inputs::from_args(&args.params)?;
    let grid = grid_values(args, &base)?;
    // validate the whole grid before computing anything
    let mut points = Vec::with_capacity(grid.len());
    for v in &grid {
        let mut pa = args.params.clone();
        match args.over {
            SweepVar::Eta => pa.eta = parse_real(v).map_err(Error::Domain)?,
            SweepVar::Ratio => pa.b = pa.a * parse_real(v).map_err(Error::Domain)?,
            SweepVar::BigN => pa.big_n = parse_dim(v).map_err(Error::Domain)?,
            SweepVar::Eps => pa.eps = parse_real(v).map_err(Error::Domain)?,
        }
        points.push(Inputs::from_args(&pa)?);
    }
    let rows: Vec<Row> = points.iter().map(|p| p.evaluate(args.quantity)).collect::<Result<_>>()?;
    let over = match args.over {
        SweepVar::Eta => "eta",
        SweepVar::Ratio => "b/a",
        SweepVar::BigN => "N",
        SweepVar::Eps => "eps",
    };
    let header = vec![
        ("over".to_string(), over.to_string()),
        ("points".to_string(), rows.len().to_string()),
        ("K".to_string(), base.big_k.map_or("unset".into(), format_real)),
        ("R".to_string(), base.r.map_or("unset".into(), format_real)),
    ];
    write_rows(out, "sweep", &header, &rows, args.format)
}

fn default_length(model: &WeightedModel) -> f64 {
    match model.base() {
        Base::RoundSphere { radius } => PI * radius,
        Base::FlatTorus { periods } => 0.45 * periods.iter().cloned().fold(f64::INFINITY, f64::min),
        Base::WarpedProduct { warp } => {
            let end = warp.domain_end();
            if end.is_finite() {
                0.9 * end
            } else {
                2.0
            }
        }
        _ => 2.0,
    }
}

struct VerifyContext<'a> {
    args: &'a VerifyArgs,
    model: WeightedModel,
    p: EpsParams,
}

impl VerifyContext<'_> {
    fn record(&self) -> Result<(GeodesicRecord, BTreeMap<&'static str, serde_json::Value>)> {
        let o = self.model.origin();
        let dir = self.model.base().tangent_frame(self.model.n(), &o)[0].clone();
        let len = self.args.length.unwrap_or_else(|| default_length(&self.model));
        if self.args.steps < 8 {
            return Err(Error::Domain(format!("--steps must be at least 8, got {}", self.args.steps)));
        }
        let step = len / self.args.steps as f64;
        let rec = geodesic(&self.model, &o, &dir, len, step, &self.p)?;
        let meta = BTreeMap::from([
            ("start", json!(o)),
            ("direction", json!(dir)),
            ("length", json!(len)),
            ("step", json!(step)),
        ]);
        Ok((rec, meta))
    }

    fn default_lambda(&self) -> f64 {
        if self.p.eps() == 1.0 {
            return 0.0;
        }
        let w = self.p.lambda_window();
        if w.upper > 0.0 {
            (0.5 * w.upper).min(1.0)
        } else {
            (0.5 * w.lower).max(-1.0)
        }
    }

    fn integrand(&self) -> Result<SegmentIntegrand> {
        let s = self.args.integrand.trim();
        if s == "distance" {
            return Ok(SegmentIntegrand::DistanceTo(self.model.origin()));
        }
        if let Ok(v) = parse_real(s) {
            if v < 0.0 {
                return Err(Error::Domain(format!("F must be non-negative, got {v}")));
            }
            return Ok(SegmentIntegrand::Constant(v));
        }
        Ok(SegmentIntegrand::Expression(Expr::parse(s)?))
    }

    fn run(&self, suite: Suite) -> Result<(VerificationReport, BTreeMap<&'static str, serde_json::Value>)> {
        let a = self.args;
        let m = &self.model;
        match suite {
            Suite::Bishop => {
                let (rec, mut meta) = self.record()?;
                meta.insert("tol", json!(a.tol));
                Ok((verify_bishop(m, &rec, &self.p, a.tol)?, meta))
            }
            Suite::Volume => {
                let o = m.origin();
                let big_r = a.big_r.unwrap_or_else(|| 1f64.min(0.9 * m.base().injectivity_radius(&o)));
                let r = a.r.unwrap_or(0.5 * big_r);
                let meta = BTreeMap::from([
                    ("center", json!(o)),
                    ("r", json!(r)),
                    ("R", json!(big_r)),
                    ("K", json!(a.big_k)),
                    ("tol", json!(a.volume_tol)),
                ]);
                Ok((verify_volume_comparison(m, &o, r, big_r, &self.p, a.big_k, a.volume_tol)?, meta))
            }
            Suite::Segment => {
                let ball = Ball { center: m.origin(), radius: a.radius };
                let f = self.integrand()?;
                let meta = BTreeMap::from([
                    ("center", json!(ball.center)),
                    ("radius", json!(a.radius)),
                    ("integrand", json!(a.integrand)),
                    ("K", json!(a.big_k)),
                ]);
                let r = verify_segment_inequality(m, &ball, &ball, &ball, &f, &self.p, a.big_k, a.samples, a.seed)?;
                Ok((r, meta))
            }
            Suite::SecondVariation => {
                let (rec, mut meta) = self.record()?;
                let lambda = a.lambda.unwrap_or_else(|| self.default_lambda());
                meta.insert("lambda", json!(lambda));
                meta.insert("H", json!(a.h));
                meta.insert("tol", json!(a.tol));
                Ok((second_variation_terms(m, &rec, &self.p, lambda, a.h, a.tol)?.1, meta))
            }
            Suite::Diameter => {
                let mode = match a.mode {
                    Mode::Compact => DiameterMode::Compact,
                    Mode::Complete => DiameterMode::Complete {
                        radius: a.big_r.ok_or_else(|| Error::Domain("complete mode needs --R".into()))?,
                    },
                };
                let meta = BTreeMap::from([
                    ("mode", json!(format!("{:?}", a.mode).to_lowercase())),
                    ("H", json!(a.h)),
                    ("eta", json!(a.eta)),
                    ("K", json!(a.big_k)),
                ]);
                Ok((verify_diameter_theorem(m, &self.p, a.big_k, a.h, a.eta, mode)?, meta))
            }
            Suite::All => unreachable!("expanded by the caller"),
        }
    }
}

fn verify_csv_record(suite: Suite, r: &VerificationReport) -> Vec<String> {
    vec![
        suite.name().to_string(),
        r.check.clone(),
        r.verdict.name().to_string(),
        r.pass.to_string(),
        format_real(r.lhs),
        format_real(r.rhs),
        format_real(r.margin),
        format_real(r.tolerance),
        opt_real(r.stderr),
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        r.samples.map(|s| s.to_string()).unwrap_or_default(),
    ]
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let model = WeightedModel::load(&args.model)?;
    let big_n = args.big_n.unwrap_or(EffectiveDim::Finite(model.n() as f64));
    let p = EpsParams::new(model.n(), big_n, args.eps)?;
    if !(args.h > 0.0) {
        return Err(Error::Domain(format!("H must be a positive finite real, got {}", args.h)).into());
    }
    if args.samples < 2 {
        return Err(Error::Domain(format!("--samples must be at least 2, got {}", args.samples)).into());
    }
    let ctx = VerifyContext { args, model, p };
    let suites = match args.suite {
        Suite::All => vec![Suite::Bishop, Suite::Volume, Suite::Segment, Suite::SecondVariation, Suite::Diameter],
        s => vec![s],
    };
    let mut failed = false;
    let mut csv_out = None;
    if args.format == Format::Csv {
        writeln!(out, "# wmyers verify (schema {SCHEMA})")?;
        writeln!(out, "# model = {}", args.model.display())?;
        writeln!(out, "# n = {}, N = {}, eps = {}", p.n(), format_dim(big_n), format_real(p.eps()))?;
        writeln!(
            out,
            "# steps = {}, samples = {}, seed = {}, tol = {}, volume_tol = {}",
            args.steps,
            args.samples,
            args.seed,
            format_real(args.tol),
            format_real(args.volume_tol)
        )?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(VERIFY_COLUMNS)?;
        csv_out = Some(w);
    }
    for suite in suites {
        let (report, meta) = ctx.run(suite)?;
        failed |= report.verdict == Verdict::Fail;
        match csv_out.as_mut() {
            Some(w) => w.write_record(verify_csv_record(suite, &report))?,
            None => {
                let doc = json!({
                    "schema": SCHEMA,
                    "suite": suite.name(),
                    "model": args.model.display().to_string(),
                    "n": p.n(),
                    "N": big_n,
                    "eps": p.eps(),
                    "defaults": {
                        "steps": args.steps,
                        "samples": args.samples,
                        "seed": args.seed,
                        "tol": args.tol,
                        "volume_tol": args.volume_tol,
                    },
                    "inputs": meta,
                    "report": report,
                });
                serde_json::to_writer(&mut *out, &doc)?;
                writeln!(out)?;
                out.flush()?;
            }
        }
    }
    if let Some(w) = csv_out {
        let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
        out.write_all(&bytes)?;
    }
    Ok(if failed { 1 } else { 0 })
}
