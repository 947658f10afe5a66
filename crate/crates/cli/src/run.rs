//! Command implementations.

use std::fs::File;
use std::io::{BufWriter, Write};

use finsler::body::{BodySpec, ConvexBody};
use finsler::curvature::{flag_curvature_field, CurvatureOptions, Flag};
use finsler::funk_hilbert::{distance, funk_geodesic, hilbert_geodesic, DistanceKind};
use finsler::geodesic::{trace_geodesic, GeodesicOptions, GeodesicTrace, Termination};
use finsler::metric::{fundamental_tensor, MetricKind, MetricSpec};
use finsler::sampling::{InnerRegion, Sampler};
use finsler::verify::{run_all, VerifyConfig};
use finsler::{FinslerError, FinslerMetric};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use crate::output::{fmt_float, ResultTable};
use crate::{Command, Common, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Finsler(#[from] FinslerError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Finsler(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Probe {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlagProbe {
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

/// Inline JSON when the argument starts with `{` or `[`, a file path otherwise.
fn load_json<T: DeserializeOwned>(what: &str, arg: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        (arg.to_string(), "inline".to_string())
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| CliError::BadSpec(format!("{what}: cannot read {arg}: {e}")))?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| CliError::BadSpec(format!("{what} ({origin}): {e}")))
}

/// Everything a command needs, resolved from the flags.
struct Setup {
    body: Option<ConvexBody>,
    metric: FinslerMetric,
    metadata: Vec<(String, String)>,
}

fn with_dim(spec: MetricSpec, dim: usize) -> MetricSpec {
    match spec {
        MetricSpec::Klein { dim: None } => MetricSpec::Klein { dim: Some(dim) },
        MetricSpec::Spherical { dim: None } => MetricSpec::Spherical { dim: Some(dim) },
        MetricSpec::Euclidean { dim: None } => MetricSpec::Euclidean { dim: Some(dim) },
        MetricSpec::Conformal { dim: None } => MetricSpec::Conformal { dim: Some(dim) },
        s => s,
    }
}

fn setup(command: &str, c: &Common) -> Result<Setup, CliError> {
    let body_spec: Option<BodySpec> = c
        .body
        .as_deref()
        .map(|b| load_json("body", b))
        .transpose()?;
    let body = body_spec.as_ref().map(BodySpec::build).transpose()?;
    let spec = match MetricSpec::from_name(&c.metric) {
        Some(s) => s,
        None => load_json("metric", &c.metric)?,
    };
    let spec = if body.is_none() {
        with_dim(spec, c.dim)
    } else {
        spec
    };
    let metric = spec.build(body.as_ref())?;
    let mut metadata = vec![
        ("command".to_string(), command.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("metric".to_string(), serde_json::to_string(&spec)?),
        (
            "body".to_string(),
            body_spec
                .as_ref()
                .map_or(Ok("null".to_string()), serde_json::to_string)?,
        ),
        ("dim".to_string(), metric.dim().to_string()),
        ("seed".to_string(), c.seed.to_string()),
        ("samples".to_string(), c.samples.to_string()),
    ];
    if let Some(t) = c.tol {
        metadata.push(("tol".to_string(), fmt_float(t)));
    }
    if let Some(p) = &c.points {
        metadata.push(("points".to_string(), p.clone()));
    }
    Ok(Setup {
        body,
        metric,
        metadata,
    })
}

impl Setup {
    /// Where random probes are drawn: the 0.9-scaled domain of the metric,
    /// or of the unit ball for metrics defined on all of space.
    fn region(&self) -> Result<InnerRegion, CliError> {
        let body = match (self.metric.body(), &self.body) {
            (Some(b), _) => b.clone(),
            (None, Some(b)) if b.is_bounded() => b.clone(),
            _ => ConvexBody::unit_ball(self.metric.dim()),
        };
        Ok(InnerRegion::new(&body, 0.9)?)
    }

    fn probes(&self, c: &Common) -> Result<Vec<Probe>, CliError> {
        if let Some(p) = &c.points {
            return load_json("points", p);
        }
        let region = self.region()?;
        let mut s = Sampler::new(c.seed);
        let n = self.metric.dim();
        Ok((0..c.samples)
            .map(|_| Probe {
                x: s.point_in(&region),
                y: s.unit_vector(n),
            })
            .collect())
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn emit(table: &ResultTable, c: &Common) -> Result<(), CliError> {
    match &c.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(c.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            table.write(c.format, &mut w)?;
        }
    }
    Ok(())
}

/// Exit code for a table: 3 when any row failed numerically.
fn table_code(numerical: bool) -> u8 {
    if numerical {
        3
    } else {
        0
    }
}

pub fn run(command: &Command) -> Result<u8, CliError> {
    match command {
        Command::Eval(c) => cmd_eval(c),
        Command::Distance(c) => cmd_distance(c),
        Command::Geodesic { common, s_end } => cmd_geodesic(common, *s_end),
        Command::Curvature(c) => cmd_curvature(c),
        Command::Verify(c) => cmd_verify(c),
    }
}

fn cmd_eval(c: &Common) -> Result<u8, CliError> {
    let s = setup("eval", c)?;
    let n = s.metric.dim();
    let probes = s.probes(c)?;
    let mut columns = labels("x", n);
    columns.extend(labels("y", n));
    columns.push("F".into());
    for i in 1..=n {
        for j in 1..=n {
            columns.push(format!("g{i}{j}"));
        }
    }
    let mut table = ResultTable::new(s.metadata.clone(), columns);
    let results: Vec<_> = probes
        .par_iter()
        .map(|p| -> finsler::Result<(f64, Vec<f64>)> {
            let f = s.metric.eval(&p.x, &p.y)?;
            let g = fundamental_tensor(&s.metric, &p.x, &p.y)?;
            Ok((f, g.g.transpose().iter().copied().collect()))
        })
        .collect();
    let mut numerical = false;
    for (p, r) in probes.iter().zip(results) {
        match r {
            Ok((f, g)) if p.x.len() == n && p.y.len() == n => {
                let mut row: Vec<f64> = p.x.iter().chain(&p.y).copied().collect();
                row.push(f);
                row.extend(g);
                table.push(row, None);
            }
            Ok(_) => table.push_error("dimension mismatch".into()),
            Err(e) => {
                numerical |= e.is_numerical();
                table.push_error(e.to_string());
            }
        }
    }
    emit(&table, c)?;
    Ok(table_code(numerical))
}

fn cmd_distance(c: &Common) -> Result<u8, CliError> {
    let s = setup("distance", c)?;
    let body = match (&s.body, s.metric.body()) {
        (Some(b), _) | (None, Some(b)) => b.clone(),
        (None, None) => return Err(CliError::BadSpec("distance needs --body".into())),
    };
    let points: Vec<Vec<f64>> = match &c.points {
        Some(p) => load_json("points", p)?,
        None => {
            let region = InnerRegion::new(&body, 0.9)?;
            let mut smp = Sampler::new(c.seed);
            (0..c.samples).map(|_| smp.point_in(&region)).collect()
        }
    };
    let columns = [
        "i",
        "j",
        "funk",
        "reverse_funk",
        "hilbert",
        "hilbert_asymmetry",
        "funk_minus_reverse_swapped",
    ]
    .map(String::from)
    .to_vec();
    let mut table = ResultTable::new(s.metadata.clone(), columns);
    let pairs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| {
            (0..points.len())
                .filter(move |&j| j != i)
                .map(move |j| (i, j))
        })
        .collect();
    let rows: Vec<finsler::Result<Vec<f64>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (p, q) = (&points[i], &points[j]);
            let f = distance(&body, DistanceKind::Funk, p, q)?;
            let r = distance(&body, DistanceKind::ReverseFunk, p, q)?;
            let h = distance(&body, DistanceKind::Hilbert, p, q)?;
            let h_back = distance(&body, DistanceKind::Hilbert, q, p)?;
            let r_back = distance(&body, DistanceKind::ReverseFunk, q, p)?;
            Ok(vec![i as f64, j as f64, f, r, h, h - h_back, f - r_back])
        })
        .collect();
    let mut numerical = false;
    for (&(i, j), r) in pairs.iter().zip(rows) {
        match r {
            Ok(row) => table.push(row, None),
            Err(e) => {
                numerical |= e.is_numerical();
                let mut row = vec![f64::NAN; 7];
                row[0] = i as f64;
                row[1] = j as f64;
                table.push(row, Some(e.to_string()));
            }
        }
    }
    emit(&table, c)?;
    Ok(table_code(numerical))
}

/// Closed-form unit-speed geodesic for Funk and Hilbert metrics of a body
/// and for Minkowski norms, as `(initial velocity, point at s)`.
type ClosedForm = Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

fn closed_form(
    metric: &FinslerMetric,
    p: &[f64],
    xi: &[f64],
) -> finsler::Result<(Vec<f64>, Option<ClosedForm>)> {
    match (metric.kind(), metric.body()) {
        (MetricKind::Funk, Some(b)) => {
            let g = funk_geodesic(b, p, xi)?;
            Ok((g.velocity(0.0), Some(Box::new(move |s| g.point(s)))))
        }
        (MetricKind::Hilbert, Some(b)) => {
            let g = hilbert_geodesic(b, p, xi)?;
            Ok((g.velocity(0.0), Some(Box::new(move |s| g.point(s)))))
        }
        (MetricKind::Euclidean | MetricKind::Minkowski, _) => {
            let f = metric.eval(p, xi)?;
            let v: Vec<f64> = xi.iter().map(|a| a / f).collect();
            let (p, v2) = (p.to_vec(), v.clone());
            Ok((
                v,
                Some(Box::new(move |s| {
                    p.iter().zip(&v2).map(|(a, b)| a + s * b).collect()
                })),
            ))
        }
        _ => {
            let f = metric.eval(p, xi)?;
            if f <= 0.0 {
                return Err(FinslerError::EscapingDirection);
            }
            Ok((xi.iter().map(|a| a / f).collect(), None))
        }
    }
}

fn cmd_geodesic(c: &Common, s_end: f64) -> Result<u8, CliError> {
    let s = setup("geodesic", c)?;
    let n = s.metric.dim();
    let probes = s.probes(c)?;
    let known = matches!(
        (s.metric.kind(), s.metric.body()),
        (MetricKind::Funk | MetricKind::Hilbert, Some(_))
            | (MetricKind::Euclidean | MetricKind::Minkowski, _)
    );
    let both_ways = s.metric.is_reversible() || s.metric.kind() == MetricKind::Hilbert;
    let opts = GeodesicOptions {
        rtol: c.tol.unwrap_or(1e-10),
        atol: 1e-13,
        ..Default::default()
    };
    let mut columns = vec!["trace".to_string(), "s".to_string()];
    columns.extend(labels("x", n));
    columns.extend(labels("y", n));
    columns.push("F".into());
    if known {
        columns.push("deviation".into());
    }
    let mut meta = s.metadata.clone();
    meta.push(("s_end".into(), fmt_float(s_end)));
    let mut table = ResultTable::new(meta, columns);
    type Traced = finsler::Result<(Vec<GeodesicTrace>, Option<ClosedForm>)>;
    let traces: Vec<Traced> = probes
        .par_iter()
        .map(|p| {
            let (v0, exact) = closed_form(&s.metric, &p.x, &p.y)?;
            let ends = if both_ways {
                vec![s_end, -s_end]
            } else {
                vec![s_end]
            };
            let tr = ends
                .into_iter()
                .map(|e| trace_geodesic(&s.metric, &p.x, &v0, e, &opts))
                .collect::<finsler::Result<Vec<_>>>()?;
            Ok((tr, exact))
        })
        .collect();
    let mut numerical = false;
    let mut worst: f64 = 0.0;
    for (k, t) in traces.into_iter().enumerate() {
        match t {
            Ok((trs, exact)) => {
                for tr in trs {
                    let last = tr.samples.len() - 1;
                    for (i, smp) in tr.samples.iter().enumerate() {
                        let mut row = vec![k as f64, smp.s];
                        row.extend(&smp.x);
                        row.extend(&smp.y);
                        row.push(smp.speed);
                        if let Some(f) = &exact {
                            let d = f(smp.s)
                                .iter()
                                .zip(&smp.x)
                                .map(|(a, b)| (a - b).powi(2))
                                .sum::<f64>()
                                .sqrt();
                            worst = worst.max(d);
                            row.push(d);
                        }
                        let err = match tr.termination {
                            Termination::BoundaryReached { s } if i == last => {
                                Some(format!("boundary reached at s = {}", fmt_float(s)))
                            }
                            _ => None,
                        };
                        table.push(row, err);
                    }
                }
            }
            Err(e) => {
                numerical |= e.is_numerical();
                let mut row = vec![f64::NAN; table.columns.len()];
                row[0] = k as f64;
                table.push(row, Some(e.to_string()));
            }
        }
    }
    if known {
        table.summary.push(("max_deviation".into(), worst));
    }
    emit(&table, c)?;
    Ok(table_code(numerical))
}

fn cmd_curvature(c: &Common) -> Result<u8, CliError> {
    let s = setup("curvature", c)?;
    let n = s.metric.dim();
    if n < 2 {
        return Err(CliError::BadSpec(
            "flag curvature needs dimension at least 2".into(),
        ));
    }
    let flags: Vec<FlagProbe> = match &c.points {
        Some(p) => load_json("points", p)?,
        None => {
            let region = s.region()?;
            let mut smp = Sampler::new(c.seed);
            (0..c.samples)
                .map(|_| {
                    let x = smp.point_in(&region);
                    let y = smp.unit_vector(n);
                    let w = smp.transverse(&y);
                    FlagProbe { x, y, w }
                })
                .collect()
        }
    };
    let mut columns = labels("x", n);
    columns.extend(labels("y", n));
    columns.extend(labels("w", n));
    columns.push("K".into());
    let mut table = ResultTable::new(s.metadata.clone(), columns);
    let built: Vec<finsler::Result<Flag>> = flags
        .iter()
        .map(|f| Flag::new(f.x.clone(), f.y.clone(), f.w.clone()))
        .collect();
    let valid: Vec<Flag> = built
        .iter()
        .filter_map(|f| f.as_ref().ok().cloned())
        .collect();
    let mut opts = CurvatureOptions::for_metric(&s.metric);
    opts.inject_sign_bug = c.inject_bug;
    let mut values = flag_curvature_field(&s.metric, &valid, opts).into_iter();
    let mut numerical = false;
    let mut ks = Vec::new();
    for (probe, b) in flags.iter().zip(built) {
        let mut row: Vec<f64> = probe
            .x
            .iter()
            .chain(&probe.y)
            .chain(&probe.w)
            .copied()
            .collect();
        let k = match b {
            Ok(_) => values.next().expect("one value per valid flag"),
            Err(e) => Err(e),
        };
        match k {
            Ok(k) if row.len() == 3 * n => {
                ks.push(k);
                row.push(k);
                table.push(row, None);
            }
            Ok(_) => table.push_error("dimension mismatch".into()),
            Err(e) => {
                numerical |= e.is_numerical();
                row.resize(3 * n, f64::NAN);
                row.push(f64::NAN);
                table.push(row, Some(e.to_string()));
            }
        }
    }
    let mut code = table_code(numerical);
    if !ks.is_empty() {
        let mean = ks.iter().sum::<f64>() / ks.len() as f64;
        let min = ks.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        table.summary = vec![
            ("count".into(), ks.len() as f64),
            ("mean".into(), mean),
            ("min".into(), min),
            ("max".into(), max),
            ("spread".into(), max - min),
        ];
        if let Some(t) = c.tol {
            if max - min > t && code == 0 {
                code = 1;
            }
        }
    }
    emit(&table, c)?;
    Ok(code)
}

fn cmd_verify(c: &Common) -> Result<u8, CliError> {
    let cfg = VerifyConfig {
        seed: c.seed,
        quick: c.quick,
        inject_bug: c.inject_bug,
    };
    let report = run_all(&cfg);
    for cr in &report.criteria {
        eprintln!("{}", cr.line());
        for f in &cr.failures {
            eprintln!("    failed: {f}");
        }
    }
    let mut out: Box<dyn Write> = match &c.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match c.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "# command: verify")?;
            writeln!(out, "# version: {}", report.version)?;
            writeln!(out, "# seed: {}", cfg.seed)?;
            writeln!(out, "# quick: {}", cfg.quick)?;
            writeln!(out, "# inject_bug: {}", cfg.inject_bug)?;
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::CRLF)
                .from_writer(&mut out);
            w.write_record(["id", "name", "passed", "max_error", "tolerance", "failures"])?;
            for cr in &report.criteria {
                w.write_record([
                    cr.id.to_string(),
                    cr.name.clone(),
                    cr.passed.to_string(),
                    fmt_float(cr.max_error),
                    fmt_float(cr.tolerance),
                    cr.failures.join("; "),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(if report.passed { 0 } else { 1 })
}
