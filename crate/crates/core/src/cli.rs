//! Batch runner behind the `walk` binary: JSON configs and presets in, CSV
//! tables, a JSON summary and an SVG plot out.
//!
//! Output directory layout:
//!
//! ```text
//! dist_t<t>.csv   rescaled position distribution at each time (x,weight)
//! limit.csv       quadrature atoms of the limit measure (x,weight)
//! report.csv      t,ks,phi_err_max,claim_residual,runtime_s
//! summary.json    resolved config, checksums, runtimes, limit moments
//! cdf.svg         written by `walk plot`
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::converge::{convergence_table_with, omega_grid, ReportRow, TableOptions};
use crate::error::WalkError;
use crate::evolve::DEFAULT_GUARD;
use crate::limit::{PointMeasure, DEFAULT_QUAD_POINTS, MIN_QUAD_POINTS};
use crate::state::{asymmetric_state, LatticeState, StateJson};
use crate::symbol::TrigSymbol;

pub const PRESETS: &[&str] = &["konno", "trivial", "asym"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Aliasing(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Walk(WalkError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad configs or inputs, 3 for aliasing, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Aliasing(_) => 3,
            CliError::Walk(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Aliasing { .. } | WalkError::GridCap { .. } => {
                CliError::Aliasing(e.to_string())
            }
            other => CliError::Walk(other),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for OmegaGrid {
    fn default() -> Self {
        OmegaGrid {
            min: -5.0,
            max: 5.0,
            step: 0.25,
        }
    }
}

/// A run description as written by the user; unset fields come from the
/// preset, then from built-in defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<TrigSymbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_grid: Option<OmegaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outdir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

/// Fully specified run.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub symbol: TrigSymbol,
    pub state: LatticeState,
    pub times: Vec<f64>,
    pub omega_grid: OmegaGrid,
    pub quad_points: usize,
    pub guard: u64,
    pub outdir: PathBuf,
}

impl ResolvedConfig {
    /// Config that reproduces this run when fed back to `walk run`.
    pub fn echo(&self) -> RunConfig {
        RunConfig {
            symbol: Some(self.symbol.clone()),
            state: Some(StateJson::from(&self.state)),
            times: Some(self.times.clone()),
            omega_grid: Some(self.omega_grid.clone()),
            quad_points: Some(self.quad_points),
            guard: Some(self.guard),
            outdir: Some(self.outdir.to_string_lossy().into_owned()),
            preset: None,
        }
    }
}

/// Parses a config document, reporting the JSON path, line and column of the
/// first offending field.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!(
            "field `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let (symbol, state) = match name {
        "konno" => (TrigSymbol::konno(), LatticeState::basis(0)),
        "trivial" => (TrigSymbol::zero(), LatticeState::basis(0)),
        "asym" => (TrigSymbol::konno(), asymmetric_state()),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(RunConfig {
        symbol: Some(symbol),
        state: Some(StateJson::from(&state)),
        times: Some(vec![50.0, 100.0, 200.0, 400.0]),
        preset: Some(name.to_string()),
        ..RunConfig::default()
    })
}

/// Fills unset fields from the named preset and built-in defaults, then validates.
pub fn resolve(cfg: RunConfig) -> Result<ResolvedConfig, CliError> {
    let base = match &cfg.preset {
        Some(name) => preset(name)?,
        None => RunConfig::default(),
    };
    let symbol = cfg
        .symbol
        .or(base.symbol)
        .ok_or_else(|| CliError::Config("field `symbol` is required without a preset".into()))?;
    let state_raw = cfg
        .state
        .or(base.state)
        .ok_or_else(|| CliError::Config("field `state` is required without a preset".into()))?;
    let state = LatticeState::try_from(state_raw)
        .map_err(|e| CliError::Config(format!("field `state`: {e}")))?;
    if (state.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(CliError::Config(format!(
            "field `state`: squared norm {} is not 1 (set \"normalize\": true)",
            state.norm_sqr()
        )));
    }
    let times = cfg
        .times
        .or(base.times)
        .ok_or_else(|| CliError::Config("field `times` is required without a preset".into()))?;
    if times.iter().any(|t| *t <= 0.0 || !t.is_finite()) {
        return Err(CliError::Config(
            "field `times`: every time must be positive and finite".into(),
        ));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config(
            "field `times`: must be strictly ascending".into(),
        ));
    }
    let omega = cfg.omega_grid.or(base.omega_grid).unwrap_or_default();
    omega_grid(omega.min, omega.max, omega.step)
        .map_err(|e| CliError::Config(format!("field `omega_grid`: {e}")))?;
    let quad_points = cfg
        .quad_points
        .or(base.quad_points)
        .unwrap_or(DEFAULT_QUAD_POINTS);
    if quad_points < MIN_QUAD_POINTS || !quad_points.is_power_of_two() {
        return Err(CliError::Config(format!(
            "field `quad_points`: {quad_points} must be a power of two >= {MIN_QUAD_POINTS}"
        )));
    }
    let guard = cfg.guard.or(base.guard).unwrap_or(DEFAULT_GUARD);
    if guard < 2 {
        return Err(CliError::Config("field `guard`: must be at least 2".into()));
    }
    let outdir = cfg
        .outdir
        .or(base.outdir)
        .unwrap_or_else(|| "walk_out".into());
    Ok(ResolvedConfig {
        symbol,
        state,
        times,
        omega_grid: omega,
        quad_points,
        guard,
        outdir: PathBuf::from(outdir),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSummary {
    pub mass: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub atoms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub t: f64,
    pub grid: usize,
    pub file: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub limit: LimitSummary,
    pub grids: Vec<GridInfo>,
    pub report: Vec<ReportRow>,
    /// SHA-256 of each CSV written, keyed by file name.
    pub checksums: Vec<(String, String)>,
    pub total_runtime_s: f64,
}

/// File name for the distribution at time `t`.
pub fn dist_file_name(t: f64) -> String {
    format!("dist_t{t}.csv")
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Executes a resolved run and writes its outputs.
pub fn run_walk(cfg: &ResolvedConfig) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let omegas = omega_grid(cfg.omega_grid.min, cfg.omega_grid.max, cfg.omega_grid.step)?;
    let opts = TableOptions {
        guard: cfg.guard,
        ..TableOptions::default()
    };
    let (report, slices, limit) = convergence_table_with(
        &cfg.symbol,
        &cfg.state,
        &cfg.times,
        &omegas,
        cfg.quad_points,
        &opts,
    )?;

    fs::create_dir_all(&cfg.outdir).map_err(io_err(&cfg.outdir))?;
    let mut checksums = Vec::new();
    let mut write = |name: &str, body: String| -> Result<(), CliError> {
        let path = cfg.outdir.join(name);
        fs::write(&path, body.as_bytes()).map_err(io_err(&path))?;
        checksums.push((name.to_string(), sha256_hex(body.as_bytes())));
        Ok(())
    };

    let mut grids = Vec::new();
    for slice in &slices {
        let name = dist_file_name(slice.t);
        write(&name, slice.rescaled.to_csv())?;
        grids.push(GridInfo {
            t: slice.t,
            grid: slice.grid,
            file: name,
        });
    }
    write("limit.csv", limit.to_csv())?;
    write("report.csv", report.to_csv())?;

    let summary = RunSummary {
        config: cfg.echo(),
        limit: LimitSummary {
            mass: limit.total_mass(),
            mean: limit.mean(),
            second_moment: limit.moment(2)?,
            atoms: limit.len(),
        },
        grids,
        report: report.rows,
        checksums,
        total_runtime_s: start.elapsed().as_secs_f64(),
    };
    let path = cfg.outdir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(summary)
}

/// Reads a config file, resolves it and runs it.
pub fn run_config_file(path: &Path) -> Result<RunSummary, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    run_walk(&resolve(parse_config(&text)?)?)
}

/// Runs a preset into `outdir`.
pub fn run_preset(name: &str, outdir: &Path) -> Result<RunSummary, CliError> {
    let mut cfg = preset(name)?;
    cfg.outdir = Some(outdir.to_string_lossy().into_owned());
    run_walk(&resolve(cfg)?)
}

fn read_measure(path: &Path) -> Result<PointMeasure, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    PointMeasure::from_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Loads the `dist_t*.csv` files of a run directory, ordered by time.
pub fn read_distributions(dir: &Path) -> Result<Vec<(f64, PointMeasure)>, CliError> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(t) = name
            .strip_prefix("dist_t")
            .and_then(|r| r.strip_suffix(".csv"))
            .and_then(|r| r.parse::<f64>().ok())
        else {
            continue;
        };
        found.push((t, entry.path()));
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found
        .into_iter()
        .map(|(t, p)| Ok((t, read_measure(&p)?)))
        .collect()
}

const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 56.0;
const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
];
const LIMIT_SAMPLES: usize = 1000;

/// Renders the rescaled empirical CDFs and the limit CDF as one SVG document.
pub fn render_plot(dists: &[(f64, PointMeasure)], limit: &PointMeasure) -> String {
    let (mut lo, mut hi) = match (limit.support().first(), limit.support().last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (-1.0, 1.0),
    };
    if hi - lo < 1e-9 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.1 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let sx = |x: f64| MARGIN + (x - lo) / (hi - lo) * (PLOT_W - 2.0 * MARGIN);
    let sy = |p: f64| PLOT_H - MARGIN - p * (PLOT_H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{:.3} {:.3}H{:.3}M{:.3} {:.3}V{:.3}" stroke="black" fill="none"/>"#,
        MARGIN,
        sy(0.0),
        PLOT_W - MARGIN,
        MARGIN,
        sy(0.0),
        sy(1.0)
    );
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="end">{p:.2}</text>"#,
            MARGIN - 6.0,
            sy(p) + 4.0
        );
        let x = lo + p * (hi - lo);
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="middle">{x:.2}</text>"#,
            sx(x),
            sy(0.0) + 16.0
        );
    }

    let clamp = |x: f64| x.clamp(lo, hi);
    for (i, (t, mu)) in dists.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = format!("M{:.3} {:.3}", sx(lo), sy(mu.cdf(lo)));
        let mut acc = mu.cdf_left(lo);
        for (&x, &w) in mu.support().iter().zip(mu.weights()) {
            if x < lo || x > hi {
                continue;
            }
            let before = acc;
            acc += w;
            if w < 1e-12 {
                continue;
            }
            let _ = write!(
                d,
                "L{:.3} {:.3}L{:.3} {:.3}",
                sx(x),
                sy(before),
                sx(x),
                sy(acc)
            );
        }
        let _ = write!(d, "L{:.3} {:.3}", sx(hi), sy(mu.cdf(hi)));
        let _ = writeln!(
            svg,
            r#"<path d="{d}" stroke="{color}" fill="none" stroke-width="1.2"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" fill="{color}">t = {t}</text>"#,
            MARGIN + 10.0,
            MARGIN + 16.0 * (i as f64 + 1.0)
        );
    }

    let mut d = String::new();
    for k in 0..=LIMIT_SAMPLES {
        let x = clamp(lo + (hi - lo) * k as f64 / LIMIT_SAMPLES as f64);
        let cmd = if k == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{:.3} {:.3}", sx(x), sy(limit.cdf(x)));
    }
    let _ = writeln!(
        svg,
        r#"<path d="{d}" stroke="black" fill="none" stroke-width="2" stroke-dasharray="6 3"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{:.3}" font-size="12">limit</text>"#,
        MARGIN + 10.0,
        MARGIN + 16.0 * (dists.len() as f64 + 1.0)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes `cdf.svg` into a run directory and returns its path.
pub fn emit_plot(dir: &Path) -> Result<PathBuf, CliError> {
    let limit_path = dir.join("limit.csv");
    if !limit_path.exists() {
        return Err(CliError::Input(format!(
            "{} not found",
            limit_path.display()
        )));
    }
    let limit = read_measure(&limit_path)?;
    let dists = read_distributions(dir)?;
    let out = dir.join("cdf.svg");
    fs::write(&out, render_plot(&dists, &limit)).map_err(io_err(&out))?;
    Ok(out)
}
