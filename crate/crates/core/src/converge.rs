//! Weak-convergence diagnostics: Kolmogorov-Smirnov distances between atomic
//! measures, characteristic functions of `P_t[ψ_0]` and of the limit, and the
//! residual of the operator limit `e^{itA} E_{ω/t} e^{-itA} ψ → e^{iωH} ψ`.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::evolve::{choose_grid_size, evolve_with_guard, position_distribution, DEFAULT_GUARD};
use crate::limit::{fmt17, limit_measure, rescaled_measure, PointMeasure};
use crate::state::{sample_transform, LatticeState};
use crate::symbol::TrigSymbol;

/// Frequency at which the convergence table reports the operator-limit residual.
pub const CLAIM_OMEGA: f64 = 1.0;

/// Sup-distance between the distribution functions of two atomic measures.
///
/// Both CDFs are step functions, so the supremum is attained at an atom or
/// just below one; the sweep visits exactly those points.
pub fn ks_distance(mu: &PointMeasure, nu: &PointMeasure) -> f64 {
    let (xs, ws) = (mu.support(), mu.weights());
    let (ys, vs) = (nu.support(), nu.weights());
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut worst: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        // left limit at x
        worst = worst.max((fa - fb).abs());
        while i < xs.len() && xs[i] == x {
            fa += ws[i];
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            fb += vs[j];
            j += 1;
        }
        worst = worst.max((fa - fb).abs());
    }
    worst
}

/// Sup-distance between an atomic measure and a continuous distribution function.
pub fn ks_distance_to_cdf(mu: &PointMeasure, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut worst: f64 = 0.0;
    for (&x, &w) in mu.support().iter().zip(mu.weights()) {
        let f = cdf(x);
        worst = worst.max((acc - f).abs());
        acc += w;
        worst = worst.max((acc - f).abs());
    }
    worst
}

/// `Φ_t(ω) = Σ_n P_t(n) e^{iωn/t}` for a distribution over integer sites.
pub fn phi_empirical(p_t: &PointMeasure, t: f64, omega: f64) -> Result<Complex64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(WalkError::Invalid(format!(
            "time must be positive, got {t}"
        )));
    }
    Ok(p_t.characteristic(omega / t))
}

/// `Φ(ω) = ∫ e^{-iω a'(θ)} |F*ψ_0(θ)|² dθ/2π` by the midpoint rule on `M_quad` nodes.
pub fn phi_limit(
    s: &TrigSymbol,
    psi0: &LatticeState,
    omega: f64,
    m_quad: usize,
) -> Result<Complex64> {
    Ok(phi_limit_many(s, psi0, &[omega], m_quad)?[0])
}

/// [`phi_limit`] at several frequencies, sharing the quadrature nodes.
pub fn phi_limit_many(
    s: &TrigSymbol,
    psi0: &LatticeState,
    omegas: &[f64],
    m_quad: usize,
) -> Result<Vec<Complex64>> {
    let samples = sample_transform(psi0, m_quad, 0.5)?;
    let velocity = s.velocity_symbol();
    let inv = 1.0 / m_quad as f64;
    let nodes: Vec<(f64, f64)> = samples
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let th = std::f64::consts::TAU * (k as f64 + 0.5) * inv;
            (velocity.eval(th), v.norm_sqr() * inv)
        })
        .collect();
    Ok(omegas
        .iter()
        .map(|&w| nodes.iter().map(|&(x, p)| Complex64::cis(w * x) * p).sum())
        .collect())
}

/// `‖e^{itA} E_{ω/t} e^{-itA} ψ_0 - e^{iωH} ψ_0‖` on an `M`-point grid.
///
/// `e^{iωH}` is evolution under the velocity symbol `-a'` for time `-ω`.
pub fn claim_residual(
    s: &TrigSymbol,
    psi0: &LatticeState,
    t: f64,
    omega: f64,
    m: usize,
) -> Result<f64> {
    claim_residual_with_guard(s, psi0, t, omega, m, DEFAULT_GUARD)
}

pub fn claim_residual_with_guard(
    s: &TrigSymbol,
    psi0: &LatticeState,
    t: f64,
    omega: f64,
    m: usize,
    guard: u64,
) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(WalkError::Invalid(format!(
            "time must be positive, got {t}"
        )));
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    let forward = evolve_with_guard(s, psi0, t, m, guard)?;
    let lhs = evolve_with_guard(s, &forward.modulate(omega / t), -t, m, guard)?;
    let rhs = evolve_with_guard(&s.velocity_symbol(), psi0, -omega, m, guard)?;
    Ok(lhs.distance(&rhs))
}

/// One row of a [`ConvergenceReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub t: f64,
    pub ks: f64,
    pub phi_err_max: f64,
    pub claim_residual: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    /// CSV with columns `t,ks,phi_err_max,claim_residual,runtime_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,ks,phi_err_max,claim_residual,runtime_s\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(r.t),
                fmt17(r.ks),
                fmt17(r.phi_err_max),
                fmt17(r.claim_residual),
                fmt17(r.runtime_s)
            );
        }
        out
    }

    pub fn column(&self, f: impl Fn(&ReportRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// Settings shared by every row of [`convergence_table`].
#[derive(Debug, Clone)]
pub struct TableOptions {
    pub guard: u64,
    pub claim_omega: f64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            guard: DEFAULT_GUARD,
            claim_omega: CLAIM_OMEGA,
        }
    }
}

/// Per-time output of [`convergence_table_with`], kept for writing files.
#[derive(Debug, Clone)]
pub struct TimeSlice {
    pub t: f64,
    pub grid: usize,
    /// `P_t[ψ_0]` with atoms at `n/t`.
    pub rescaled: PointMeasure,
}

/// KS distance to the limit measure, worst characteristic-function error on
/// `omegas`, and the operator-limit residual, for each time.
pub fn convergence_table(
    s: &TrigSymbol,
    psi0: &LatticeState,
    times: &[f64],
    omegas: &[f64],
    m_quad: usize,
) -> Result<ConvergenceReport> {
    Ok(convergence_table_with(s, psi0, times, omegas, m_quad, &TableOptions::default())?.0)
}

pub fn convergence_table_with(
    s: &TrigSymbol,
    psi0: &LatticeState,
    times: &[f64],
    omegas: &[f64],
    m_quad: usize,
    opts: &TableOptions,
) -> Result<(ConvergenceReport, Vec<TimeSlice>, PointMeasure)> {
    if times.iter().any(|&t| t <= 0.0 || !t.is_finite()) {
        return Err(WalkError::Invalid(
            "times must be positive and finite".into(),
        ));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WalkError::Invalid(
            "times must be strictly ascending".into(),
        ));
    }
    let limit = limit_measure(s, psi0, m_quad)?;
    let phi_lim = phi_limit_many(s, psi0, omegas, m_quad)?;

    let rows: Vec<(ReportRow, TimeSlice)> = times
        .par_iter()
        .map(|&t| -> Result<(ReportRow, TimeSlice)> {
            let start = Instant::now();
            let m = choose_grid_size(s, psi0, t, opts.guard)?;
            let psi_t = evolve_with_guard(s, psi0, t, m, opts.guard)?;
            let p_t = position_distribution(&psi_t);
            let rescaled = rescaled_measure(&p_t, t)?;
            let ks = ks_distance(&rescaled, &limit);
            let mut phi_err_max: f64 = 0.0;
            for (&w, lim) in omegas.iter().zip(&phi_lim) {
                phi_err_max = phi_err_max.max((phi_empirical(&p_t, t, w)? - lim).norm());
            }
            let claim = claim_residual_with_guard(s, psi0, t, opts.claim_omega, m, opts.guard)?;
            let row = ReportRow {
                t,
                ks,
                phi_err_max,
                claim_residual: claim,
                runtime_s: start.elapsed().as_secs_f64(),
            };
            Ok((
                row,
                TimeSlice {
                    t,
                    grid: m,
                    rescaled,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (rows, slices) = rows.into_iter().unzip();
    Ok((ConvergenceReport { rows }, slices, limit))
}

/// Frequencies `min, min + step, ..., <= max`.
pub fn omega_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !min.is_finite() || !max.is_finite() || max < min {
        return Err(WalkError::Invalid(format!(
            "bad omega grid [{min}, {max}] step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| min + k as f64 * step).collect())
}
