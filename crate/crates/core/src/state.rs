//! Finite-support wavefunctions on the integer lattice and their samples on
//! the circle.
//!
//! `to_torus` evaluates the trigonometric polynomial `Σ ψ(n) e^{inθ}` exactly at
//! `θ_k = 2πk/M`; `from_torus` inverts it with the `M`-point quadrature of
//! `∫ f(θ) e^{-inθ} dθ/2π`, decoding lattice sites into an `M`-wide window.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex amplitudes on a contiguous block of lattice sites starting at `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    origin: i64,
    amps: Vec<Complex64>,
}

/// Wire form: `{"entries": [[n, re, im], ...], "normalize": bool}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub entries: Vec<(i64, f64, f64)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

impl TryFrom<StateJson> for LatticeState {
    type Error = WalkError;

    fn try_from(raw: StateJson) -> Result<Self> {
        let state = LatticeState::from_entries(
            raw.entries
                .iter()
                .map(|&(n, re, im)| (n, Complex64::new(re, im))),
        )?;
        if raw.normalize {
            state.normalized()
        } else {
            Ok(state)
        }
    }
}

impl From<&LatticeState> for StateJson {
    fn from(s: &LatticeState) -> Self {
        StateJson {
            entries: s
                .iter()
                .filter(|(_, a)| *a != ZERO)
                .map(|(n, a)| (n, a.re, a.im))
                .collect(),
            normalize: false,
        }
    }
}

impl LatticeState {
    /// Builds a state and trims exact-zero margins.
    pub fn new(origin: i64, amps: Vec<Complex64>) -> Self {
        let mut s = LatticeState { origin, amps };
        s.trim();
        s
    }

    /// Builds a state from windowed amplitudes, keeping zero margins.
    pub fn windowed(origin: i64, amps: Vec<Complex64>) -> Self {
        LatticeState { origin, amps }
    }

    /// Standard basis vector `e_n`.
    pub fn basis(n: i64) -> Self {
        LatticeState {
            origin: n,
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Builds a state from `(site, amplitude)` pairs. Sites must be distinct.
    pub fn from_entries(entries: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut entries: Vec<(i64, Complex64)> = entries.into_iter().collect();
        if entries.is_empty() {
            return Ok(LatticeState {
                origin: 0,
                amps: Vec::new(),
            });
        }
        entries.sort_by_key(|e| e.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(WalkError::Invalid(format!(
                "duplicate lattice site {}",
                w[0].0
            )));
        }
        if entries
            .iter()
            .any(|(_, a)| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(WalkError::Invalid("amplitudes must be finite".into()));
        }
        let origin = entries[0].0;
        let width = (entries[entries.len() - 1].0 - origin) as usize + 1;
        let mut amps = vec![ZERO; width];
        for (n, a) in entries {
            amps[(n - origin) as usize] = a;
        }
        Ok(LatticeState::new(origin, amps))
    }

    /// Rescales to unit norm. Fails for the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(WalkError::Invalid("cannot normalize a zero state".into()));
        }
        Ok(LatticeState {
            origin: self.origin,
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    fn trim(&mut self) {
        let lead = self.amps.iter().take_while(|a| **a == ZERO).count();
        if lead == self.amps.len() {
            self.amps.clear();
            return;
        }
        let trail = self.amps.iter().rev().take_while(|a| **a == ZERO).count();
        self.amps.truncate(self.amps.len() - trail);
        self.amps.drain(..lead);
        self.origin += lead as i64;
    }

    /// Copy with exact-zero margins removed.
    pub fn trimmed(&self) -> Self {
        LatticeState::new(self.origin, self.amps.clone())
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Number of stored sites.
    pub fn width(&self) -> usize {
        self.amps.len()
    }

    /// Last stored site (equal to `origin - 1` for an empty state).
    pub fn last(&self) -> i64 {
        self.origin + self.amps.len() as i64 - 1
    }

    /// Site at the middle of the stored block; transform windows are centered here.
    pub fn center(&self) -> i64 {
        self.origin + (self.amps.len() / 2) as i64
    }

    /// Largest distance from [`Self::center`] to a stored site.
    pub fn radius(&self) -> u64 {
        if self.amps.is_empty() {
            return 0;
        }
        let c = self.center();
        (c - self.origin).max(self.last() - c) as u64
    }

    /// Amplitude at site `n` (zero outside the stored block).
    pub fn amplitude(&self, n: i64) -> Complex64 {
        let i = n - self.origin;
        if i < 0 || i >= self.amps.len() as i64 {
            ZERO
        } else {
            self.amps[i as usize]
        }
    }

    /// `(site, amplitude)` over the stored block.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.origin + i as i64, a))
    }

    /// Translation by `k` sites.
    pub fn shift(&self, k: i64) -> Self {
        LatticeState {
            origin: self.origin + k,
            amps: self.amps.clone(),
        }
    }

    /// `⟨self, other⟩`, antilinear in the first slot.
    pub fn inner(&self, other: &LatticeState) -> Complex64 {
        let lo = self.origin.max(other.origin);
        let hi = self.last().min(other.last());
        (lo..=hi)
            .map(|n| self.amplitude(n).conj() * other.amplitude(n))
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ℓ² norm of `self - other` over the union of both supports.
    pub fn distance(&self, other: &LatticeState) -> f64 {
        if self.amps.is_empty() && other.amps.is_empty() {
            return 0.0;
        }
        let lo = self.origin.min(other.origin);
        let hi = self.last().max(other.last());
        (lo..=hi)
            .map(|n| (self.amplitude(n) - other.amplitude(n)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Multiplies each amplitude by `e^{inx}` (the operator `E_x`).
    pub fn modulate(&self, x: f64) -> Self {
        LatticeState {
            origin: self.origin,
            amps: self
                .iter()
                .map(|(n, a)| a * Complex64::cis(n as f64 * x))
                .collect(),
        }
    }

    /// Multiplies every amplitude by a constant.
    pub fn scale(&self, z: Complex64) -> Self {
        LatticeState {
            origin: self.origin,
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }
}

/// Samples of a function on the circle at `θ_k = 2πk/M`.
///
/// `center` is the lattice site decoded to the middle of the window by
/// [`from_torus`]; it does not change the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    pub center: i64,
    pub values: Vec<Complex64>,
}

impl TorusField {
    /// Field with the given samples, decoded around site 0.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_grid(values.len())?;
        Ok(TorusField { center: 0, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Node `θ_k`.
    pub fn theta(&self, k: usize) -> f64 {
        TAU * k as f64 / self.values.len() as f64
    }

    /// `(1/M) Σ |f(θ_k)|²`.
    pub fn mean_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }
}

pub(crate) fn check_grid(m: usize) -> Result<()> {
    if m == 0 || !m.is_power_of_two() {
        return Err(WalkError::Invalid(format!(
            "grid size {m} is not a power of two"
        )));
    }
    Ok(())
}

/// Evaluates `Σ ψ(n) e^{inθ}` at `θ_k = 2π(k + offset)/M`.
pub fn sample_transform(psi: &LatticeState, m: usize, offset: f64) -> Result<Vec<Complex64>> {
    check_grid(m)?;
    if psi.width() > m {
        return Err(WalkError::GridTooSmall {
            grid: m,
            width: psi.width(),
        });
    }
    let mut buf = vec![ZERO; m];
    for (n, a) in psi.iter() {
        let a = if offset == 0.0 {
            a
        } else {
            a * Complex64::cis(TAU * offset * n as f64 / m as f64)
        };
        buf[n.rem_euclid(m as i64) as usize] += a;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    Ok(buf)
}

/// `F*ψ` sampled on the `M`-point grid.
pub fn to_torus(psi: &LatticeState, m: usize) -> Result<TorusField> {
    let values = sample_transform(psi, m, 0.0)?;
    Ok(TorusField {
        center: psi.center(),
        values,
    })
}

/// Quadrature inverse of [`to_torus`]: amplitudes on the window
/// `[center - M/2, center + M/2)`.
pub fn from_torus(f: &TorusField) -> LatticeState {
    let m = f.values.len();
    let mut buf = f.values.clone();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let start = f.center - (m / 2) as i64;
    let amps = (0..m as i64)
        .map(|i| buf[(start + i).rem_euclid(m as i64) as usize] * scale)
        .collect();
    LatticeState::windowed(start, amps)
}

/// `(e_0 + i e_1)/√2`, the simplest state with a drifting limit.
pub fn asymmetric_state() -> LatticeState {
    let r = 1.0 / 2f64.sqrt();
    LatticeState::new(0, vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)])
}
