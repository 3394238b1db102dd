//! Command-line front end: argument parsing, scans and report emission.
//!
//! Scans are written as CSV with `#` header lines; reports as flat JSON
//! objects (or `key,value` CSV). Output is assembled completely in memory
//! before anything is written, so a failed run leaves no partial file.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::continuum::{self, NaiveLimit};
use crate::error::Error;
use crate::grid::{linspace, logspace, GridSpec};
use crate::observables::{self, CutoffScheme, SchemeSpec};
use crate::params::{resonance_info, ModelParams, COUPLING};
use crate::sharp;
use crate::smooth;

pub const TOOL_VERSION: &str = concat!("harmosc ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveSpacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ModelArgs {
    /// Cutoff parameter a = (4/3π) r0r ω_H; must lie in (0, 1) except for `tachyon`.
    #[arg(long, default_value_t = 0.1)]
    pub a: f64,
    /// Resonance frequency in units of the cutoff, b = Ω_r/ω_H.
    #[arg(long, default_value_t = 0.01)]
    pub b: f64,
    /// Cutoff frequency ω_H, which sets the unit of frequency.
    #[arg(long = "omega-h", default_value_t = 1.0)]
    pub omega_h: f64,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format; scans default to csv, reports to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Relative tolerance for quadratures.
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SchemeArgs {
    /// Cutoff scheme: sharp, naive, exptail:F,w, gausstail:F,w or tanhstep:c,w.
    #[arg(long, default_value = "sharp", value_parser = parse_scheme)]
    pub scheme: SchemeSpec,
    /// Rescale a smooth cutoff so that its effective ω_H equals --omega-h.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// σ/σ_T against ω/ω_H.
    ScanSigma {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Grid min:max:count[:linear|log|resonance-aware] in units of ω_H.
        #[arg(long, default_value = "1e-3:1:2000:resonance-aware", value_parser = parse_grid)]
        grid: GridSpec,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral density ρ·ω_H against ω/ω_H.
    ScanRho {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value = "1e-3:1:2000:resonance-aware", value_parser = parse_grid)]
        grid: GridSpec,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Resonance, cutoff-artifact peak and bound-state pole.
    Poles {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectral and cross-section sum rules.
    SumRules {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tachyon pole of the naive limit and, for a > 1, at finite cutoff.
    Tachyon {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// π r_t against c = (2/3) r0r Ω_r in the naive limit.
    TachyonCurve {
        #[arg(long = "c-min", default_value_t = 0.001)]
        c_min: f64,
        #[arg(long = "c-max", default_value_t = 1.0)]
        c_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_enum, default_value_t = CurveSpacing::Log)]
        spacing: CurveSpacing,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// σ/σ_T for several schemes normalized to the same effective ω_H.
    Universality {
        #[command(flatten)]
        model: ModelArgs,
        /// Schemes to compare (repeatable); defaults to sharp, exptail, gausstail, tanhstep and naive.
        #[arg(long = "scheme", value_parser = parse_scheme)]
        schemes: Vec<SchemeSpec>,
        #[arg(long, default_value = "0.1:1.2:111:linear", value_parser = parse_grid)]
        grid: GridSpec,
        /// Relative disagreement that ends the agreement region.
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cutoff functions K(ω) against ω.
    ScanCutoff {
        /// Cutoff functions (repeatable); defaults to sharp, exptail, gausstail and tanhstep.
        #[arg(long = "scheme", value_parser = parse_cutoff)]
        schemes: Vec<smooth::CutoffFunction>,
        /// Rescale each cutoff to unit effective ω_H.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value = "0:1.5:301:linear", value_parser = parse_grid)]
        grid: GridSpec,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Summary of all derived quantities for one parameter set.
    Report {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Parsed and validated command line.
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "harmosc", version, about = "Charged harmonic oscillator with a UV cutoff: cross sections, poles and sum rules")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text was requested; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 0 for help, 1 for usage and I/O errors, 2 for domain errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Model(Error::Domain(_)) => 2,
            CliError::Model(_) => 3,
        }
    }
}

fn parse_scheme(s: &str) -> Result<SchemeSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_cutoff(s: &str) -> Result<smooth::CutoffFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::with_cutoff(self.a, self.b, self.omega_h)
    }
}

/// Parses `argv` (including the program name) and validates the model parameters.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = RunConfig::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    match &config.command {
        Command::ScanSigma { model, out, .. }
        | Command::ScanRho { model, out, .. }
        | Command::Poles { model, out }
        | Command::SumRules { model, out, .. }
        | Command::Universality { model, out, .. }
        | Command::Report { model, out } => {
            model.params()?;
            check_tol(out)?;
        }
        Command::Tachyon { model, out } => {
            if !(model.a > 0.0 && model.a.is_finite()) {
                return Err(Error::Domain(format!("a must be positive, got {}", model.a)).into());
            }
            if !(model.b >= 0.0 && model.b.is_finite()) {
                return Err(Error::Domain(format!("b must be nonnegative, got {}", model.b)).into());
            }
            if !(model.omega_h > 0.0 && model.omega_h.is_finite()) {
                return Err(Error::Domain(format!("omega_h must be positive, got {}", model.omega_h)).into());
            }
            check_tol(out)?;
        }
        Command::TachyonCurve { c_min, c_max, points, out, .. } => {
            if !(*c_min > 0.0 && c_min < c_max && *c_max <= 1.0) {
                return Err(Error::Domain(format!("need 0 < c-min < c-max <= 1, got {c_min}, {c_max}")).into());
            }
            if *points < 1 {
                return Err(CliError::Usage("--points must be at least 1".into()));
            }
            check_tol(out)?;
        }
        Command::ScanCutoff { out, .. } => check_tol(out)?,
    }
    Ok(())
}

fn check_tol(out: &OutputArgs) -> Result<(), CliError> {
    if !(out.rel_tol > 0.0 && out.rel_tol < 1.0) {
        return Err(Error::Domain(format!("rel-tol must lie in (0, 1), got {}", out.rel_tol)).into());
    }
    Ok(())
}

/// Runs the command and writes its output to the chosen destination.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let text = render(config)?;
    match output_args(config).output.as_ref() {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn output_args(config: &RunConfig) -> &OutputArgs {
    match &config.command {
        Command::ScanSigma { out, .. }
        | Command::ScanRho { out, .. }
        | Command::Poles { out, .. }
        | Command::SumRules { out, .. }
        | Command::Tachyon { out, .. }
        | Command::TachyonCurve { out, .. }
        | Command::Universality { out, .. }
        | Command::ScanCutoff { out, .. }
        | Command::Report { out, .. } => out,
    }
}

fn warn_width(p: &ModelParams) {
    if !p.is_narrow_width() {
        eprintln!(
            "warning: r0r*Omega_r = {:.3} is not small; the Breit-Wigner resonance width is only approximate",
            p.width_parameter()
        );
    }
}

/// Computes the command's output text without writing it.
pub fn render(config: &RunConfig) -> Result<String, CliError> {
    let out = output_args(config);
    match &config.command {
        Command::ScanSigma { model, scheme, grid, .. } => {
            let p = model.params()?;
            warn_width(&p);
            let s = scheme.scheme.build(&p, scheme.normalize)?;
            let omegas = scaled_grid(grid, &p)?;
            let rows = omegas
                .par_iter()
                .map(|&w| observables::cross_section(w, &p, &s).map(|x| vec![w / p.omega_h(), x.sigma_over_thomson]))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut header = model_header("scan-sigma", &p);
            header.push(format!("scheme: {}", s.label(&p)));
            header.push(format!("grid: {grid}"));
            header.push("sigma_T = (8 pi/3) r0r^2".into());
            table(out, header, &["omega_over_omega_h", "sigma_over_thomson"], rows)
        }
        Command::ScanRho { model, scheme, grid, .. } => {
            let p = model.params()?;
            warn_width(&p);
            let s = scheme.scheme.build(&p, scheme.normalize)?;
            let omegas = scaled_grid(grid, &p)?;
            let rows = omegas
                .par_iter()
                .map(|&w| density(w, &p, &s).map(|rho| vec![w / p.omega_h(), rho * p.omega_h()]))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut header = model_header("scan-rho", &p);
            header.push(format!("scheme: {}", s.label(&p)));
            header.push(format!("grid: {grid}"));
            header.push("continuum density only; the sharp cutoff's bound-state pole is reported by `poles`".into());
            table(out, header, &["omega_over_omega_h", "rho_times_omega_h"], rows)
        }
        Command::Poles { model, .. } => {
            let p = model.params()?;
            warn_width(&p);
            record(out, "poles", poles_record(&p)?)
        }
        Command::SumRules { model, scheme, .. } => {
            let p = model.params()?;
            warn_width(&p);
            let s = scheme.scheme.build(&p, scheme.normalize)?;
            record(out, "sum-rules", sum_rules_record(&p, &s, out.rel_tol)?)
        }
        Command::Tachyon { model, .. } => record(out, "tachyon", tachyon_record(model)?),
        Command::TachyonCurve { c_min, c_max, points, spacing, .. } => {
            let cs = match (points, spacing) {
                (1, _) => vec![*c_min],
                (n, CurveSpacing::Linear) => linspace(*c_min, *c_max, *n),
                (n, CurveSpacing::Log) => logspace(*c_min, *c_max, *n),
            };
            let rows = cs
                .par_iter()
                .map(|&c| continuum::tachyon_residue_curve(&[c]).map(|v| vec![v[0].0, v[0].1]))
                .collect::<Result<Vec<_>, Error>>()?;
            let header = vec![
                format!("tool: {TOOL_VERSION}"),
                "command: tachyon-curve".into(),
                "naive continuum limit; c = (2/3) r0r Omega_r; the tachyon residue in omega^2 is -pi r_t".into(),
                format!("c range: {c_min} to {c_max}, {points} points, {spacing:?} spacing").to_lowercase(),
            ];
            table(out, header, &["c", "pi_r_t"], rows)
        }
        Command::Universality { model, schemes, grid, threshold, .. } => {
            let p = model.params()?;
            warn_width(&p);
            let specs = if schemes.is_empty() { observables::default_universality_schemes() } else { schemes.clone() };
            let built = specs.iter().map(|s| s.build(&p, true)).collect::<Result<Vec<_>, Error>>()?;
            let omegas = scaled_grid(grid, &p)?;
            let report = observables::universality_compare(&p, &built, &omegas, *threshold)?;
            if out.format == Some(Format::Json) {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                return Ok(text + "\n");
            }
            let mut header = model_header("universality", &p);
            header.push(format!("schemes (normalized to effective omega_H): {}", report.schemes.join(" ")));
            header.push(format!("grid: {grid}"));
            header.push(format!("threshold: {threshold}"));
            header.push(format!("agreement_boundary_over_omega_h: {}", boundary(report.agreement_boundary, &p)));
            header.push(format!("naive_boundary_over_omega_h: {}", boundary(report.naive_boundary, &p)));
            let mut columns = vec!["omega_over_omega_h".to_string()];
            columns.extend(report.schemes.iter().map(|s| format!("sigma_over_thomson[{s}]")));
            columns.push("max_rel_deviation".into());
            let rows = (0..report.omega.len())
                .map(|j| {
                    let mut row = vec![report.omega[j] / p.omega_h()];
                    row.extend(report.sigma_over_thomson.iter().map(|c| c[j]));
                    row.push(report.max_rel_deviation[j]);
                    row
                })
                .collect();
            let names: Vec<&str> = columns.iter().map(String::as_str).collect();
            table(out, header, &names, rows)
        }
        Command::ScanCutoff { schemes, normalize, grid, .. } => {
            let ks = if schemes.is_empty() {
                ["sharp", "exptail:1,0.2", "gausstail:1,0.3", "tanhstep:1,0.02"]
                    .iter()
                    .map(|s| s.parse().expect("valid built-in cutoff"))
                    .collect()
            } else {
                schemes.clone()
            };
            let ks = if *normalize {
                ks.iter().map(|k| k.normalized_to(1.0)).collect::<Result<Vec<_>, Error>>()?
            } else {
                ks
            };
            let omegas = grid.points(None)?;
            let mut columns = vec!["omega".to_string()];
            columns.extend(ks.iter().map(|k| format!("k[{k}]")));
            let rows = omegas
                .iter()
                .map(|&w| std::iter::once(w).chain(ks.iter().map(|k| k.value(w))).collect())
                .collect();
            let mut header = vec![format!("tool: {TOOL_VERSION}"), "command: scan-cutoff".into()];
            header.push(format!("grid: {grid}"));
            for k in &ks {
                if k.flat_edge() > 0.0 {
                    header.push(format!("{k}: effective omega_H = {}", fmt_f(k.effective_omega_h(k.flat_edge())?)));
                }
            }
            let names: Vec<&str> = columns.iter().map(String::as_str).collect();
            table(out, header, &names, rows)
        }
        Command::Report { model, .. } => {
            let p = model.params()?;
            warn_width(&p);
            record(out, "report", report_record(&p, out.rel_tol)?)
        }
    }
}

fn boundary(b: Option<f64>, p: &ModelParams) -> String {
    b.map(|w| fmt_f(w / p.omega_h())).unwrap_or_else(|| "none".into())
}

fn scaled_grid(grid: &GridSpec, p: &ModelParams) -> Result<Vec<f64>, Error> {
    Ok(grid.points(Some(p))?.into_iter().map(|x| x * p.omega_h()).filter(|&w| w > 0.0).collect())
}

fn density(w: f64, p: &ModelParams, s: &CutoffScheme) -> Result<f64, Error> {
    match s {
        CutoffScheme::Sharp if w >= p.omega_h() => Ok(0.0),
        CutoffScheme::Sharp => sharp::spectral_density(w, p),
        CutoffScheme::Smooth(sm) => smooth::spectral_density_smooth(w, p, sm),
        CutoffScheme::NaiveLimit => {
            let inv = NaiveLimit::from_params(p).inverse_g_r(w);
            Ok(COUPLING * p.r0r() * w.powi(4) / inv.norm_sqr())
        }
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn model_header(command: &str, p: &ModelParams) -> Vec<String> {
    vec![
        format!("tool: {TOOL_VERSION}"),
        format!("command: {command}"),
        format!(
            "a = {}, b = {}, omega_h = {}, omega_r = {}, r0r = {}",
            p.a(),
            p.b(),
            p.omega_h(),
            p.omega_r(),
            p.r0r()
        ),
    ]
}

fn table(out: &OutputArgs, header: Vec<String>, columns: &[&str], rows: Vec<Vec<f64>>) -> Result<String, CliError> {
    if out.format == Some(Format::Json) {
        let mut obj = Map::new();
        for (i, c) in columns.iter().enumerate() {
            obj.insert((*c).to_string(), Value::from(rows.iter().map(|r| r[i]).collect::<Vec<f64>>()));
        }
        obj.insert("header".into(), Value::from(header));
        return Ok(serde_json::to_string_pretty(&Value::Object(obj)).expect("table serializes") + "\n");
    }
    let mut text = String::new();
    for line in header {
        let _ = writeln!(text, "# {line}");
    }
    let _ = writeln!(text, "# columns: {}", columns.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f(x)).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    Ok(text)
}

type Record = Map<String, Value>;

fn put(r: &mut Record, key: &str, v: impl Into<Value>) {
    r.insert(key.to_string(), v.into());
}

fn record(out: &OutputArgs, command: &str, mut r: Record) -> Result<String, CliError> {
    put(&mut r, "tool", TOOL_VERSION);
    put(&mut r, "command", command);
    if out.format == Some(Format::Csv) {
        let mut text = format!("# tool: {TOOL_VERSION}\n# command: {command}\n# columns: key,value\n");
        for (k, v) in &r {
            let value = match v {
                Value::Number(n) => n.as_f64().map(fmt_f).unwrap_or_else(|| n.to_string()),
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            let _ = writeln!(text, "{k},{value}");
        }
        return Ok(text);
    }
    Ok(serde_json::to_string_pretty(&Value::Object(r)).expect("record serializes") + "\n")
}

fn params_record(p: &ModelParams) -> Record {
    let mut r = Record::new();
    put(&mut r, "a", p.a());
    put(&mut r, "b", p.b());
    put(&mut r, "omega_h", p.omega_h());
    put(&mut r, "omega_r", p.omega_r());
    put(&mut r, "r0r", p.r0r());
    put(&mut r, "width_parameter", p.width_parameter());
    put(&mut r, "narrow_width", p.is_narrow_width());
    r
}

fn poles_record(p: &ModelParams) -> Result<Record, Error> {
    let mut r = params_record(p);
    let res = resonance_info(p);
    put(&mut r, "resonance_omega", res.omega_peak);
    put(&mut r, "resonance_gamma", res.gamma);
    let (eta_asym, rb_asym) = sharp::bound_state_asymptote(p.a());
    let pole = sharp::bound_state_pole(p)?;
    put(&mut r, "bound_state_omega", pole.location);
    put(&mut r, "bound_state_offset", pole.location / p.omega_h() - 1.0);
    put(&mut r, "bound_state_residue", pole.residue);
    put(&mut r, "bound_state_offset_asymptote", eta_asym);
    put(&mut r, "bound_state_residue_asymptote", rb_asym);
    match sharp::second_peak(p) {
        Ok(peak) => {
            put(&mut r, "second_peak_omega", peak.omega);
            put(&mut r, "second_peak_offset", peak.eta);
        }
        Err(Error::NoRoot(_)) => {
            put(&mut r, "second_peak_omega", Value::Null);
            put(&mut r, "second_peak_offset", Value::Null);
        }
        Err(e) => return Err(e),
    }
    put(&mut r, "second_peak_offset_asymptote", eta_asym);
    put(&mut r, "tachyon", false);
    Ok(r)
}

fn put_sum_rule(r: &mut Record, prefix: &str, s: &sharp::SumRuleReport) {
    put(r, &format!("{prefix}integral"), s.integral);
    put(r, &format!("{prefix}integral_error"), s.integral_error);
    put(r, &format!("{prefix}pole_weight"), s.pole_weight);
    put(r, &format!("{prefix}total"), s.total);
    put(r, &format!("{prefix}target"), s.target);
    put(r, &format!("{prefix}relative_deviation"), s.relative_deviation);
}

fn sum_rules_record(p: &ModelParams, s: &CutoffScheme, rel_tol: f64) -> Result<Record, Error> {
    let mut r = params_record(p);
    put(&mut r, "scheme", s.label(p));
    put(&mut r, "rel_tol", rel_tol);
    let spectral = match s {
        CutoffScheme::Sharp => sharp::spectral_sum_rule(p, rel_tol)?,
        CutoffScheme::Smooth(sm) => {
            put(&mut r, "a_k", sm.a_k);
            put(&mut r, "delta_z", sm.delta_z);
            put(&mut r, "effective_omega_h", sm.omega_h_eff);
            smooth::spectral_sum_rule_smooth(p, sm, rel_tol)?
        }
        CutoffScheme::NaiveLimit => {
            return Err(Error::domain("sum rules need a cutoff; the naive limit has none"));
        }
    };
    put_sum_rule(&mut r, "", &spectral);
    put(&mut r, "probability_sum", spectral.probability_sum);
    put_sum_rule(&mut r, "sigma_", &observables::sigma_sum_rule(p, s, rel_tol)?);
    Ok(r)
}

fn tachyon_record(m: &ModelArgs) -> Result<Record, Error> {
    let mut r = Record::new();
    put(&mut r, "a", m.a);
    put(&mut r, "b", m.b);
    put(&mut r, "omega_h", m.omega_h);
    let r0r = m.a / (COUPLING * m.omega_h);
    put(&mut r, "r0r", r0r);
    let naive = NaiveLimit::new(m.b * m.omega_h, r0r)?.tachyon()?;
    put(&mut r, "c", naive.c);
    put(&mut r, "naive_k_t", naive.k_t);
    put(&mut r, "naive_k_t_asymptote", naive.k_t_asymptote);
    put(&mut r, "naive_r_t_derivative", naive.r_t_derivative);
    put(&mut r, "naive_r_t_integral", naive.r_t_integral);
    put(&mut r, "naive_pi_r_t", PI * naive.r_t_integral);
    put(&mut r, "naive_residue", naive.residue);
    match continuum::tachyon_pole_finite(m.a, m.b, m.omega_h) {
        Ok(f) => {
            put(&mut r, "finite_tachyon", true);
            put(&mut r, "k_t", f.tachyon.k_t);
            put(&mut r, "k_t_over_omega_h", f.tachyon.k_t / m.omega_h);
            put(&mut r, "k_t_near_threshold", f.k_t_near_threshold);
            put(&mut r, "k_t_deviation", f.k_t_deviation());
            put(&mut r, "residue", f.tachyon.residue);
            put(&mut r, "residue_near_threshold", -f.residue_near_threshold);
            put(&mut r, "residue_deviation", f.residue_deviation());
            put(&mut r, "r_t_derivative", f.tachyon.r_t_derivative);
            put(&mut r, "r_t_integral", f.tachyon.r_t_integral);
        }
        Err(Error::NoBracket { .. }) => put(&mut r, "finite_tachyon", false),
        Err(e) => return Err(e),
    }
    Ok(r)
}

fn report_record(p: &ModelParams, rel_tol: f64) -> Result<Record, Error> {
    let mut r = poles_record(p)?;
    let spectral = sharp::spectral_sum_rule(p, rel_tol)?;
    put(&mut r, "spectral_sum_rule_target", spectral.target);
    put(&mut r, "spectral_sum_rule_deviation", spectral.relative_deviation);
    let sigma = observables::sigma_sum_rule(p, &CutoffScheme::Sharp, rel_tol)?;
    put(&mut r, "sigma_sum_rule_target", sigma.target);
    put(&mut r, "sigma_sum_rule_deviation", sigma.relative_deviation);
    put(&mut r, "rel_tol", rel_tol);
    let w = 0.1 * p.omega_h();
    put(&mut r, "plateau_omega", w);
    put(&mut r, "plateau_sigma_over_thomson", observables::cross_section(w, p, &CutoffScheme::Sharp)?.sigma_over_thomson);
    put(&mut r, "plateau_approximation", observables::plateau_correction(w, p));
    put(&mut r, "plateau_rising", p.a() < sharp::ARTIFACT_MERGE_A);
    let naive = NaiveLimit::from_params(p).tachyon()?;
    put(&mut r, "naive_tachyon_k_t", naive.k_t);
    put(&mut r, "naive_tachyon_pi_r_t", PI * naive.r_t_integral);
    put(&mut r, "thomson_cross_section", p.thomson_cross_section());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_config(std::iter::once("harmosc").chain(args.iter().copied()))
    }

    #[test]
    fn scheme_flag_parses() {
        let c = parse(&["scan-sigma", "--scheme", "exptail:1.0,0.1"]).unwrap();
        match c.command {
            Command::ScanSigma { scheme, .. } => {
                assert_eq!(scheme.scheme, SchemeSpec::Cutoff(smooth::CutoffFunction::ExpTail { flat_edge: 1.0, width: 0.1 }))
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(parse(&["scan-sigma", "--scheme", "box:1"]).unwrap_err().exit_code(), 1);
        assert_eq!(parse(&["scan-sigma", "--grid", "1:0:3"]).unwrap_err().exit_code(), 1);
        assert_eq!(parse(&["scan-sigma", "--bogus"]).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn a_range_depends_on_command() {
        assert_eq!(parse(&["scan-sigma", "--a", "1.2"]).unwrap_err().exit_code(), 2);
        assert!(parse(&["tachyon", "--a", "1.2"]).is_ok());
        assert_eq!(parse(&["--help"]).unwrap_err().exit_code(), 0);
    }

    #[test]
    fn sum_rules_report_target() {
        let c = parse(&["sum-rules", "--a", "0.5", "--b", "0.05", "--scheme", "sharp"]).unwrap();
        let v: Value = serde_json::from_str(&render(&c).unwrap()).unwrap();
        assert_eq!(v["target"].as_f64().unwrap(), 2.0);
        assert!(v["relative_deviation"].as_f64().unwrap() < 1e-5);
        assert_eq!(v["rel_tol"].as_f64().unwrap(), 1e-10);
    }

    #[test]
    fn csv_layout() {
        let c = parse(&["scan-sigma", "--grid", "0.1:0.5:3:linear"]).unwrap();
        let text = render(&c).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert!(text.contains("# columns: omega_over_omega_h,sigma_over_thomson"));
        let first: Vec<f64> = data[0].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], 0.1);
        assert!(data[0].starts_with("1.0000000000000001e-1,") || data[0].starts_with("1.0000000000000000e-1,"));
    }

    #[test]
    fn tachyon_reports() {
        let c = parse(&["tachyon", "--a", "1.2", "--b", "0.01"]).unwrap();
        let v: Value = serde_json::from_str(&render(&c).unwrap()).unwrap();
        assert_eq!(v["finite_tachyon"], Value::Bool(true));
        assert!(v["k_t"].as_f64().unwrap() > 1.0);
        let c = parse(&["tachyon", "--a", "0.9"]).unwrap();
        let v: Value = serde_json::from_str(&render(&c).unwrap()).unwrap();
        assert_eq!(v["finite_tachyon"], Value::Bool(false));
    }
}
