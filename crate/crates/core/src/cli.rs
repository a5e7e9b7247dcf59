//! Experiment specification, sweep runner and report writers.
//!
//! An experiment is one TOML file (see `experiments/` in the repository
//! for annotated examples) optionally overridden by command-line flags.
//! The runner walks the sweep points in order, runs the requested
//! estimators, always evaluates every bound, and produces one
//! [`ReportRow`] per (point, target).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::LemmaBounds;
use crate::dist::{TailModel, Variant};
use crate::error::{Error, Result};
use crate::events::{Class, EventParams};
use crate::mc::{self, Decomposition, Estimate, McConfig, Sign};
use crate::regime::{self, RegimeRatios, DEFAULT_VALIDITY_THRESHOLD, MAX_DEFAULT_C};
use crate::stats;

pub const CSV_HEADER: [&str; 18] = [
    "alpha", "variant", "n", "x", "c", "b", "r1", "r2", "r3", "method", "target", "value",
    "stderr", "ci_lo", "ci_hi", "samples", "seed", "wall_time",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Crude,
    Decomposition,
    OneBigPos,
    OneBigNeg,
    OneMid,
    Refined,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::Crude,
        EstimatorKind::Decomposition,
        EstimatorKind::OneBigPos,
        EstimatorKind::OneBigNeg,
        EstimatorKind::OneMid,
        EstimatorKind::Refined,
    ];
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "crude" => EstimatorKind::Crude,
            "decomposition" => EstimatorKind::Decomposition,
            "one_big_pos" => EstimatorKind::OneBigPos,
            "one_big_neg" => EstimatorKind::OneBigNeg,
            "one_mid" => EstimatorKind::OneMid,
            "refined" => EstimatorKind::Refined,
            other => {
                return Err(Error::invalid(
                    "estimators",
                    other,
                    "expected crude, decomposition, one_big_pos, one_big_neg, one_mid or refined",
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::invalid("format", s, "expected csv or json")),
        }
    }
}

/// Worker count: `"auto"` or a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Count(usize),
}

impl FromStr for Workers {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Workers::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(Workers::Count(k)),
            _ => Err(Error::invalid("workers", s, "expected \"auto\" or a positive integer")),
        }
    }
}

impl Serialize for Workers {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Workers::Auto => s.serialize_str("auto"),
            Workers::Count(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Workers {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(k) if k > 0 => Ok(Workers::Count(k as usize)),
            Repr::Count(k) => Err(serde::de::Error::custom(format!(
                "workers must be positive, got {k}"
            ))),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub alpha: f64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_u0")]
    pub u0: f64,
}

fn default_variant() -> Variant {
    Variant::PurePareto
}
fn default_u0() -> f64 {
    1.0
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            variant: default_variant(),
            u0: default_u0(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub n: u64,
    pub x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// `-` writes to standard output.
    #[serde(default = "default_path")]
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

fn default_path() -> PathBuf {
    PathBuf::from("-")
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            path: default_path(),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    #[serde(default)]
    pub workers: Workers,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorKind>,
    #[serde(default = "default_threshold")]
    pub regime_threshold: f64,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub sweep: Vec<SweepPoint>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_samples() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_ci_level() -> f64 {
    mc::DEFAULT_CI_LEVEL
}
fn default_estimators() -> Vec<EstimatorKind> {
    EstimatorKind::ALL.to_vec()
}
fn default_threshold() -> f64 {
    DEFAULT_VALIDITY_THRESHOLD
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: default_seed(),
            ci_level: default_ci_level(),
            workers: Workers::Auto,
            estimators: default_estimators(),
            regime_threshold: default_threshold(),
            model: ModelSpec::default(),
            sweep: Vec::new(),
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn model(&self) -> Result<TailModel> {
        TailModel::new(self.model.alpha, self.model.u0, self.model.variant)
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig::new(self.samples, self.seed).with_ci_level(self.ci_level)
    }

    /// Checks every field; errors name the offending one.
    pub fn validate(&self) -> Result<()> {
        self.model()?;
        if self.samples < mc::MIN_SAMPLES {
            return Err(Error::invalid("samples", self.samples, "need at least 1000 samples"));
        }
        stats::check_level(self.ci_level)?;
        if !(self.regime_threshold > 0.0) {
            return Err(Error::invalid(
                "regime_threshold",
                self.regime_threshold,
                "threshold must be positive",
            ));
        }
        if self.sweep.is_empty() {
            return Err(Error::invalid("sweep", "[]", "need at least one sweep point"));
        }
        for (i, p) in self.sweep.iter().enumerate() {
            let c = p.c.unwrap_or(0.5);
            let b = p.b.unwrap_or(0.5);
            EventParams::new(p.n, p.x, c, b).map_err(|e| match e {
                Error::InvalidParameter {
                    field,
                    value,
                    reason,
                } => Error::Config(format!("sweep[{i}].{field} = {value}: {reason}")),
                other => other,
            })?;
        }
        Ok(())
    }
}

/// Log-spaced grid from `lo:hi:count`, endpoints included.
pub fn parse_x_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |reason| Error::invalid("x", s, reason);
    if parts.len() != 3 {
        return Err(bad("range syntax is lo:hi:count"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad("lo is not a number"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad("hi is not a number"))?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad("count is not an integer"))?;
    if !(lo > 0.0 && hi > lo) || count == 0 {
        return Err(bad("need 0 < lo < hi and count >= 1"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, z) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|k| match k {
            0 => lo,
            k if k == count - 1 => hi,
            k => 10f64.powf(a + (z - a) * k as f64 / (count - 1) as f64),
        })
        .collect())
}

/// Either a plain number or `lo:hi:count`.
pub fn parse_x_values(s: &str) -> Result<Vec<f64>> {
    if s.contains(':') {
        parse_x_range(s)
    } else {
        s.trim()
            .parse()
            .map(|x| vec![x])
            .map_err(|_| Error::invalid("x", s, "expected a number or lo:hi:count"))
    }
}

/// Command-line overrides; `None` leaves the file (or default) value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub variant: Option<Variant>,
    pub u0: Option<f64>,
    pub n: Vec<u64>,
    pub x: Vec<f64>,
    pub c: Option<f64>,
    pub b: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub estimators: Option<Vec<EstimatorKind>>,
    pub ci_level: Option<f64>,
    pub workers: Option<Workers>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Overrides {
    /// Flags take precedence over the file. Giving `n` or `x` on the command
    /// line rebuilds the sweep as their cross product; the missing axis
    /// falls back to the distinct values in the file's sweep.
    pub fn apply(self, mut spec: ExperimentSpec) -> Result<ExperimentSpec> {
        if let Some(a) = self.alpha {
            spec.model.alpha = a;
        }
        if let Some(v) = self.variant {
            spec.model.variant = v;
        }
        if let Some(u) = self.u0 {
            spec.model.u0 = u;
        }
        if !self.n.is_empty() || !self.x.is_empty() {
            let ns: Vec<u64> = if self.n.is_empty() {
                let set: BTreeSet<u64> = spec.sweep.iter().map(|p| p.n).collect();
                if set.is_empty() {
                    vec![10]
                } else {
                    set.into_iter().collect()
                }
            } else {
                self.n
            };
            let xs: Vec<f64> = if self.x.is_empty() {
                let mut xs: Vec<f64> = spec.sweep.iter().map(|p| p.x).collect();
                xs.sort_by(f64::total_cmp);
                xs.dedup();
                xs
            } else {
                self.x
            };
            if xs.is_empty() {
                return Err(Error::invalid("x", "[]", "no deviation levels given"));
            }
            spec.sweep = ns
                .iter()
                .flat_map(|&n| xs.iter().map(move |&x| SweepPoint { n, x, c: None, b: None }))
                .collect();
        }
        for p in &mut spec.sweep {
            if self.c.is_some() {
                p.c = self.c;
            }
            if self.b.is_some() {
                p.b = self.b;
            }
        }
        if let Some(s) = self.samples {
            spec.samples = s;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(e) = self.estimators {
            spec.estimators = e;
        }
        if let Some(l) = self.ci_level {
            spec.ci_level = l;
        }
        if let Some(w) = self.workers {
            spec.workers = w;
        }
        if let Some(o) = self.out {
            spec.output.path = o;
        }
        if let Some(f) = self.format {
            spec.output.format = f;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub alpha: f64,
    pub variant: Variant,
    pub n: u64,
    pub x: f64,
    pub c: f64,
    pub b: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub method: String,
    pub target: String,
    pub value: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub samples: u64,
    pub seed: u64,
    pub wall_time: f64,
}

/// Per-point facts that do not fit the flat row layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointInfo {
    pub n: u64,
    pub x: f64,
    pub c: f64,
    pub b: f64,
    pub ratios: [f64; 3],
    /// All three ratios below the configured threshold.
    pub regime_valid: bool,
    /// `r1 >= 1`: outside the large-deviation regime; `(c, b)` fell back
    /// to the clip value where not given.
    pub regime_violation: bool,
    /// The middle piece of the one-mid integral is empty.
    pub p10_collapsed: bool,
    /// Targets whose estimate saw no hits.
    pub degenerate: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: ExperimentSpec,
    pub points: Vec<PointInfo>,
    pub rows: Vec<ReportRow>,
}

struct RowCtx<'a> {
    model: &'a TailModel,
    params: EventParams,
    ratios: RegimeRatios,
    seed: u64,
}

impl RowCtx<'_> {
    fn row(&self, method: &str, target: &str, wall: f64) -> ReportRow {
        ReportRow {
            alpha: self.model.alpha(),
            variant: self.model.variant(),
            n: self.params.n(),
            x: self.params.x(),
            c: self.params.c(),
            b: self.params.b(),
            r1: self.ratios.r1,
            r2: self.ratios.r2,
            r3: self.ratios.r3,
            method: method.to_owned(),
            target: target.to_owned(),
            value: 0.0,
            stderr: 0.0,
            ci_lo: 0.0,
            ci_hi: 0.0,
            samples: 0,
            seed: self.seed,
            wall_time: wall,
        }
    }

    fn estimate(&self, target: &str, e: &Estimate, wall: f64) -> ReportRow {
        ReportRow {
            value: e.value,
            stderr: e.stderr,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            samples: e.samples,
            seed: e.seed,
            ..self.row(&e.method.to_string(), target, wall)
        }
    }

    fn bound(&self, target: &str, value: f64, wall: f64) -> ReportRow {
        ReportRow {
            value,
            ci_lo: value,
            ci_hi: value,
            ..self.row("Bound", target, wall)
        }
    }
}

pub const TOTAL_TARGET: &str = "P(S_n>x)";
pub const REFINED_TARGET: &str = "refined";

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

fn resolve_point(alpha: f64, p: &SweepPoint) -> Result<(EventParams, bool)> {
    let r1 = regime::r1(alpha, p.n, p.x);
    if r1 >= 1.0 && (p.c.is_none() || p.b.is_none()) {
        let params = EventParams::new(
            p.n,
            p.x,
            p.c.unwrap_or(MAX_DEFAULT_C),
            p.b.unwrap_or(MAX_DEFAULT_C),
        )?;
        return Ok((params, true));
    }
    Ok((regime::point(alpha, p.n, p.x, p.c, p.b)?, r1 >= 1.0))
}

/// Runs the experiment on the current rayon pool.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let model = spec.model()?;
    let cfg = spec.mc_config();
    let wants: BTreeSet<EstimatorKind> = spec.estimators.iter().copied().collect();

    let mut rows = Vec::new();
    let mut points = Vec::with_capacity(spec.sweep.len());
    for sp in &spec.sweep {
        let (params, violation) = resolve_point(model.alpha(), sp)?;
        let ratios = regime::ratios(model.alpha(), &params);
        let ctx = RowCtx {
            model: &model,
            params,
            ratios,
            seed: spec.seed,
        };
        let mut degenerate = Vec::new();
        let mut push = |rows: &mut Vec<ReportRow>, target: &str, e: &Estimate, wall: f64| {
            if e.degenerate {
                degenerate.push(format!("{}:{target}", e.method));
            }
            rows.push(ctx.estimate(target, e, wall));
        };

        if wants.contains(&EstimatorKind::Crude) {
            let (e, w) = timed(|| mc::estimate_crude(&model, &params, &cfg))?;
            push(&mut rows, TOTAL_TARGET, &e, w);
        }
        if wants.contains(&EstimatorKind::Decomposition) {
            let (d, w): (Decomposition, f64) =
                timed(|| mc::estimate_decomposition(&model, &params, &cfg))?;
            push(&mut rows, TOTAL_TARGET, &d.total, w);
            for class in Class::ALL {
                push(&mut rows, class.term(), d.term(class), w);
            }
            push(&mut rows, REFINED_TARGET, &d.refined, w);
        }
        let want_pos = wants.contains(&EstimatorKind::OneBigPos);
        let want_refined = wants.contains(&EstimatorKind::Refined);
        if want_pos || want_refined {
            let (pair, w) = timed(|| mc::estimate_one_big_pair(&model, &params, Sign::Plus, &cfg))?;
            if want_pos {
                push(&mut rows, Class::OnePosBig.term(), &pair.one_big, w);
            }
            if want_refined {
                push(&mut rows, REFINED_TARGET, &pair.refined, w);
            }
        }
        if wants.contains(&EstimatorKind::OneBigNeg) {
            let (e, w) = timed(|| mc::estimate_one_big(&model, &params, Sign::Minus, &cfg))?;
            push(&mut rows, Class::OneNegBig.term(), &e, w);
        }
        if wants.contains(&EstimatorKind::OneMid) {
            let (e, w) = timed(|| mc::estimate_one_mid(&model, &params, &cfg))?;
            push(&mut rows, Class::OneMid.term(), &e, w);
        }

        let (lb, w) = timed(|| Ok(LemmaBounds::compute(&model, &params)))?;
        for (target, value) in [
            ("feller_lower", lb.feller_lower),
            ("p0_upper", lb.p0_upper),
            ("p_ge2_upper", lb.pge2_upper),
            ("p10_u_x", lb.p10.u_x),
            ("p10_I1", lb.p10.i1),
            ("p10_I2", lb.p10.i2),
            ("p10_I3", lb.p10.i3),
            ("p10_I", lb.p10.i),
            ("p10_upper", lb.p10.upper),
            ("p_1_1_minus_upper", lb.p11m_upper),
            ("diff_upper", lb.diff_upper),
        ] {
            rows.push(ctx.bound(target, value, w));
        }

        points.push(PointInfo {
            n: params.n(),
            x: params.x(),
            c: params.c(),
            b: params.b(),
            ratios: [ratios.r1, ratios.r2, ratios.r3],
            regime_valid: ratios.is_valid(spec.regime_threshold),
            regime_violation: violation,
            p10_collapsed: lb.p10.collapsed,
            degenerate,
        });
    }
    Ok(Report {
        spec: spec.clone(),
        points,
        rows,
    })
}

/// Runs on a dedicated pool sized by `spec.workers`.
pub fn run_with_workers(spec: &ExperimentSpec) -> Result<Report> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Workers::Count(k) = spec.workers {
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    pool.install(|| run(spec))
}

/// 17 significant digits; round-trips exactly through `str::parse`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn emit_csv(rows: &[ReportRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Contract("no rows to emit".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.alpha),
            r.variant.to_string(),
            r.n.to_string(),
            fmt_f64(r.x),
            fmt_f64(r.c),
            fmt_f64(r.b),
            fmt_f64(r.r1),
            fmt_f64(r.r2),
            fmt_f64(r.r3),
            r.method.clone(),
            r.target.clone(),
            fmt_f64(r.value),
            fmt_f64(r.stderr),
            fmt_f64(r.ci_lo),
            fmt_f64(r.ci_hi),
            r.samples.to_string(),
            r.seed.to_string(),
            fmt_f64(r.wall_time),
        ])
        .map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

/// `{"metadata": {...}, "rows": [...]}` with the resolved spec and
/// per-point facts in `metadata`.
pub fn emit_json(report: &Report) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::Contract("no rows to emit".into()));
    }
    let doc = serde_json::json!({
        "metadata": {
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": report.spec.seed,
            "config": report.spec,
            "regime_threshold": report.spec.regime_threshold,
            "points": report.points,
        },
        "rows": report.rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn emit(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Csv => emit_csv(&report.rows),
        Format::Json => emit_json(report),
    }
}

pub fn write_report(text: &str, path: &Path) -> Result<()> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        return out.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        });
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Drops the `wall_time` column from CSV text, for byte comparisons.
pub fn strip_wall_time_csv(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let cut = line.rfind(',').unwrap_or(line.len());
        let _ = writeln!(out, "{}", &line[..cut]);
    }
    out
}
