//! Fourier multipliers of translation-invariant self-adjoint generators.
//!
//! A generator `A` on the lattice is a Hermitian Toeplitz matrix with entries
//! `A[n][m] = a_{n-m}` and `a_{-k} = conj(a_k)`. Conjugated by the Fourier
//! transform it becomes multiplication by the real trigonometric polynomial
//!
//! ```text
//! a(θ) = a0 + Σ_n (a_n e^{inθ} + conj(a_n) e^{-inθ}) = a0 + Σ_n 2 Re(a_n e^{inθ})
//! ```
//!
//! Only finitely many coefficients are supported.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Coefficients below this magnitude are dropped during normalization.
pub const COEFF_DROP: f64 = 1e-300;

/// Grid used by [`TrigSymbol::max_group_speed`].
pub const SPEED_GRID: usize = 1 << 14;

/// Real trigonometric polynomial `a(θ)` encoding a banded generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolJson", into = "SymbolJson")]
pub struct TrigSymbol {
    a0: f64,
    /// Sorted by frequency, no zero entries.
    coeffs: Vec<(u32, Complex64)>,
}

/// Wire form: `{"a0": float, "coeffs": [[n, re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub a0: f64,
    #[serde(default)]
    pub coeffs: Vec<(i64, f64, f64)>,
}

impl TryFrom<SymbolJson> for TrigSymbol {
    type Error = WalkError;

    fn try_from(raw: SymbolJson) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(raw.coeffs.len());
        for (n, re, im) in raw.coeffs {
            let n = u32::try_from(n)
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| WalkError::Invalid(format!("coefficient index {n} must be >= 1")))?;
            coeffs.push((n, Complex64::new(re, im)));
        }
        TrigSymbol::new(raw.a0, coeffs)
    }
}

impl From<TrigSymbol> for SymbolJson {
    fn from(s: TrigSymbol) -> Self {
        SymbolJson {
            a0: s.a0,
            coeffs: s
                .coeffs
                .iter()
                .map(|&(n, c)| (n as i64, c.re, c.im))
                .collect(),
        }
    }
}

impl TrigSymbol {
    /// Builds a symbol from its constant term and off-diagonal coefficients.
    ///
    /// Frequencies must be distinct and at least 1. Coefficients are sorted by
    /// frequency and negligible ones are dropped.
    pub fn new(a0: f64, coeffs: impl IntoIterator<Item = (u32, Complex64)>) -> Result<Self> {
        if !a0.is_finite() {
            return Err(WalkError::Invalid(format!("a0 = {a0} is not finite")));
        }
        let mut coeffs: Vec<(u32, Complex64)> = coeffs.into_iter().collect();
        for &(n, c) in &coeffs {
            if n == 0 {
                return Err(WalkError::Invalid(
                    "coefficient index 0 is reserved for the real constant a0".into(),
                ));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(WalkError::Invalid(format!(
                    "coefficient a_{n} is not finite"
                )));
            }
        }
        coeffs.sort_by_key(|&(n, _)| n);
        if let Some(w) = coeffs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(WalkError::Invalid(format!(
                "duplicate coefficient index {}",
                w[0].0
            )));
        }
        coeffs.retain(|&(_, c)| c.norm() >= COEFF_DROP);
        Ok(TrigSymbol { a0, coeffs })
    }

    /// The zero generator.
    pub fn zero() -> Self {
        TrigSymbol {
            a0: 0.0,
            coeffs: Vec::new(),
        }
    }

    /// `a(θ) = -cos θ`, the walk whose amplitudes are `i^n J_n(t)`.
    pub fn konno() -> Self {
        TrigSymbol {
            a0: 0.0,
            coeffs: vec![(1, Complex64::new(-0.5, 0.0))],
        }
    }

    /// Adjacency operator of the lattice, `a(θ) = 2 cos θ`.
    pub fn adjacency() -> Self {
        TrigSymbol {
            a0: 0.0,
            coeffs: vec![(1, Complex64::new(1.0, 0.0))],
        }
    }

    /// Generator `L = (1 - 2γ) I + γ A` of the Markov jump process with rate `γ`.
    pub fn markov_generator(gamma: f64) -> Result<Self> {
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(WalkError::Invalid(format!(
                "jump rate must be positive, got {gamma}"
            )));
        }
        TrigSymbol::new(1.0 - 2.0 * gamma, [(1, Complex64::new(gamma, 0.0))])
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn coeffs(&self) -> &[(u32, Complex64)] {
        &self.coeffs
    }

    /// Highest frequency present (0 for constant symbols).
    pub fn bandwidth(&self) -> u32 {
        self.coeffs.last().map_or(0, |&(n, _)| n)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `a_k` for any integer `k`, using `a_{-k} = conj(a_k)`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.a0, 0.0);
        }
        let n = k.unsigned_abs();
        match self.coeffs.binary_search_by_key(&n, |&(m, _)| m as u64) {
            Ok(i) if k > 0 => self.coeffs[i].1,
            Ok(i) => self.coeffs[i].1.conj(),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `a(θ)`.
    pub fn eval(&self, theta: f64) -> f64 {
        self.a0
            + self
                .coeffs
                .iter()
                .map(|&(n, c)| 2.0 * (c * Complex64::cis(n as f64 * theta)).re)
                .sum::<f64>()
    }

    /// Sum of both the positive and negative frequency terms as complex numbers,
    /// without folding them into a real part. The imaginary part is roundoff.
    pub fn eval_raw(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(self.a0, 0.0);
        for &(n, c) in &self.coeffs {
            let e = Complex64::cis(n as f64 * theta);
            acc += c * e + c.conj() * e.conj();
        }
        acc
    }

    /// `k`-th derivative of `a` at `θ`.
    pub fn eval_derivative(&self, theta: f64, k: u32) -> f64 {
        if k == 0 {
            return self.eval(theta);
        }
        self.coeffs
            .iter()
            .map(|&(n, c)| {
                let factor = Complex64::new(0.0, n as f64).powu(k);
                2.0 * (factor * c * Complex64::cis(n as f64 * theta)).re
            })
            .sum()
    }

    /// Samples `a(θ_k)` at `θ_k = 2π(k + offset)/m`.
    pub fn sample(&self, m: usize, offset: f64) -> Vec<f64> {
        (0..m)
            .map(|k| self.eval(TAU * (k as f64 + offset) / m as f64))
            .collect()
    }

    /// Symbol of the velocity operator `H`, i.e. `-a'(θ)`.
    ///
    /// Coefficients become `b_n = -i n a_n` and the constant vanishes.
    pub fn velocity_symbol(&self) -> TrigSymbol {
        TrigSymbol {
            a0: 0.0,
            coeffs: self
                .coeffs
                .iter()
                .map(|&(n, c)| (n, Complex64::new(0.0, -(n as f64)) * c))
                .collect(),
        }
    }

    /// `Σ 2n|a_n|`, an upper bound for `|a'|`.
    pub fn speed_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|&(n, c)| 2.0 * n as f64 * c.norm())
            .sum()
    }

    /// `Σ 2|a_n| + |a0|`, an upper bound on `|a|` and on the operator norm of `A`.
    pub fn norm_bound(&self) -> f64 {
        self.a0.abs()
            + self
                .coeffs
                .iter()
                .map(|&(_, c)| 2.0 * c.norm())
                .sum::<f64>()
    }

    /// Maximum of `|a'(θ)|`, the edge of the light cone.
    ///
    /// Scans a grid of [`SPEED_GRID`] points, takes one Newton step on `a'' = 0`
    /// from each local maximum and caps the result at [`Self::speed_bound`].
    pub fn max_group_speed(&self) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let m = SPEED_GRID;
        let step = TAU / m as f64;
        let speed: Vec<f64> = (0..m)
            .map(|k| self.eval_derivative(k as f64 * step, 1).abs())
            .collect();
        let mut best = speed.iter().cloned().fold(0.0, f64::max);
        for k in 0..m {
            let prev = speed[(k + m - 1) % m];
            let next = speed[(k + 1) % m];
            if speed[k] < prev || speed[k] < next {
                continue;
            }
            let theta = k as f64 * step;
            let curv = self.eval_derivative(theta, 3);
            if curv != 0.0 {
                let refined = theta - self.eval_derivative(theta, 2) / curv;
                if (refined - theta).abs() <= step {
                    best = best.max(self.eval_derivative(refined, 1).abs());
                }
            }
        }
        best.min(self.speed_bound())
    }
}
