//! Atomic probability measures on the line: the position distributions `P_t`,
//! their rescalings `P_t(· t)`, and quadrature approximations of the limit
//! measure, the pushforward of `|F*ψ_0|² dθ/2π` under `θ ↦ -a'(θ)`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::state::{sample_transform, LatticeState};
use crate::symbol::TrigSymbol;

pub const DEFAULT_QUAD_POINTS: usize = 1 << 16;
pub const MIN_QUAD_POINTS: usize = 1 << 10;

/// Weighted atoms, sorted by position with duplicates merged.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure {
    support: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PointMeasure {
    /// Canonicalizes arbitrary atoms: sorts, merges exactly equal positions.
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(WalkError::Invalid(format!(
                "{} positions but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(WalkError::Invalid("positions must be finite".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(WalkError::Invalid(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let mut atoms: Vec<(f64, f64)> = support.into_iter().zip(weights).collect();
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut xs: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut ws: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            // folds -0.0 into 0.0
            let x = x + 0.0;
            match xs.last() {
                Some(&last) if last == x => *ws.last_mut().unwrap() += w,
                _ => {
                    xs.push(x);
                    ws.push(w);
                }
            }
        }
        Ok(PointMeasure::from_sorted(xs, ws))
    }

    /// Atoms already strictly increasing in position.
    pub(crate) fn from_sorted(support: Vec<f64>, weights: Vec<f64>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        PointMeasure {
            support,
            weights,
            cumulative,
        }
    }

    /// Unit mass at `x`.
    pub fn dirac(x: f64) -> Self {
        PointMeasure::from_sorted(vec![x + 0.0], vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Weight of the atom at exactly `x`.
    pub fn weight_at(&self, x: f64) -> f64 {
        match self
            .support
            .binary_search_by(|p| p.partial_cmp(&x).unwrap_or(Ordering::Less))
        {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    /// `μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|&p| p <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `μ((-∞, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|&p| p < x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// `μ([a, b])`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return 0.0;
        }
        let lo = self.support.partition_point(|&p| p < a);
        let hi = self.support.partition_point(|&p| p <= b);
        self.weights[lo..hi].iter().sum()
    }

    /// `Σ w x^k` for `k` in 1..=4.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if !(1..=4).contains(&k) {
            return Err(WalkError::Invalid(format!("moment order {k} not in 1..=4")));
        }
        Ok(self
            .support
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(k as i32))
            .sum())
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x)
            .sum()
    }

    /// `Σ w e^{iωx}`.
    pub fn characteristic(&self, omega: f64) -> Complex64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| Complex64::cis(omega * x) * *w)
            .sum()
    }

    /// Atoms moved to `x / t`.
    pub fn rescaled(&self, t: f64) -> Result<Self> {
        rescaled_measure(self, t)
    }

    /// CSV with header `x,weight` and 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * self.len() + 10);
        out.push_str("x,weight\n");
        for (x, w) in self.support.iter().zip(&self.weights) {
            let _ = writeln!(out, "{},{}", fmt17(*x), fmt17(*w));
        }
        out
    }

    /// Parses the format written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| WalkError::Invalid("empty measure CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let xi = cols.iter().position(|c| *c == "x");
        let wi = cols.iter().position(|c| *c == "weight");
        let (xi, wi) = match (xi, wi) {
            (Some(x), Some(w)) => (x, w),
            _ => {
                return Err(WalkError::Invalid(format!(
                    "measure CSV header {header:?} lacks columns `x` and `weight`"
                )))
            }
        };
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let get = |j: usize| -> Result<f64> {
                fields
                    .get(j)
                    .and_then(|f| f.trim().parse().ok())
                    .ok_or_else(|| WalkError::Invalid(format!("bad value on CSV line {}", i + 2)))
            };
            xs.push(get(xi)?);
            ws.push(get(wi)?);
        }
        PointMeasure::new(xs, ws)
    }
}

/// Fixed formatting for CSV values: 17 significant digits, scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

/// `P_t[ψ_0]`: atoms `n/t` carrying `P_t(n)`.
pub fn rescaled_measure(p: &PointMeasure, t: f64) -> Result<PointMeasure> {
    if t <= 0.0 || !t.is_finite() {
        return Err(WalkError::Invalid(format!(
            "rescaling time must be positive, got {t}"
        )));
    }
    PointMeasure::new(p.support.iter().map(|x| x / t).collect(), p.weights.clone())
}

/// Quadrature of the limit measure with `M_quad` midpoint nodes
/// `θ_k = 2π(k + 1/2)/M_quad`: atoms `-a'(θ_k)` with weights `|F*ψ_0(θ_k)|² / M_quad`.
pub fn limit_measure(s: &TrigSymbol, psi0: &LatticeState, m_quad: usize) -> Result<PointMeasure> {
    let (xs, ws) = limit_atoms(s, psi0, m_quad)?;
    PointMeasure::new(xs, ws)
}

/// Unsorted quadrature atoms of the limit measure.
pub(crate) fn limit_atoms(
    s: &TrigSymbol,
    psi0: &LatticeState,
    m_quad: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if m_quad < MIN_QUAD_POINTS {
        return Err(WalkError::Invalid(format!(
            "quadrature needs at least {MIN_QUAD_POINTS} points, got {m_quad}"
        )));
    }
    let velocity = s.velocity_symbol();
    let samples = sample_transform(psi0, m_quad, 0.5)?;
    let inv = 1.0 / m_quad as f64;
    let xs = (0..m_quad)
        .map(|k| velocity.eval(TAU * (k as f64 + 0.5) * inv))
        .collect();
    let ws = samples.iter().map(|v| v.norm_sqr() * inv).collect();
    Ok((xs, ws))
}

/// Distribution function of the arcsine law on `[-1, 1]`.
pub fn arcsine_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        0.5 + x.asin() / PI
    }
}
