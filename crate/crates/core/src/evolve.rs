//! Time evolution `ψ_t = e^{-itA} ψ_0` through the Fourier multiplier:
//! sample `F*ψ_0`, multiply by `e^{-it a(θ_k)}`, transform back.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::limit::PointMeasure;
use crate::state::{check_grid, from_torus, to_torus, LatticeState};
use crate::symbol::TrigSymbol;

pub const DEFAULT_GUARD: u64 = 64;
pub const DEFAULT_GRID_CAP: usize = 1 << 26;
/// Largest probability tolerated in the guard band after evolution.
pub const ALIAS_TOL: f64 = 1e-10;

/// Smallest power of two `M >= 2 (ceil(v t) + r + guard)`, with `v` the
/// maximal group speed and `r` the radius of the initial state.
pub fn choose_grid_size(s: &TrigSymbol, psi0: &LatticeState, t: f64, guard: u64) -> Result<usize> {
    choose_grid_size_capped(s, psi0, t, guard, DEFAULT_GRID_CAP)
}

pub fn choose_grid_size_capped(
    s: &TrigSymbol,
    psi0: &LatticeState,
    t: f64,
    guard: u64,
    cap: usize,
) -> Result<usize> {
    if t < 0.0 || !t.is_finite() {
        return Err(WalkError::Invalid(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    let cone = (s.max_group_speed() * t).ceil();
    if cone > 1e30 {
        return Err(WalkError::GridCap {
            required: u128::MAX,
            cap,
        });
    }
    let half = cone as u128 + psi0.radius() as u128 + guard as u128;
    let required = (2 * half).max(1).next_power_of_two();
    if required > cap as u128 {
        return Err(WalkError::GridCap { required, cap });
    }
    Ok(required as usize)
}

/// `e^{-itA} ψ_0` on an `M`-point grid with the default guard band.
pub fn evolve(s: &TrigSymbol, psi0: &LatticeState, t: f64, m: usize) -> Result<LatticeState> {
    evolve_with_guard(s, psi0, t, m, DEFAULT_GUARD)
}

/// Like [`evolve`], with the aliasing check applied to the outermost `guard/2`
/// sites on each side of the window.
///
/// Negative `t` runs the walk backwards.
pub fn evolve_with_guard(
    s: &TrigSymbol,
    psi0: &LatticeState,
    t: f64,
    m: usize,
    guard: u64,
) -> Result<LatticeState> {
    if !t.is_finite() {
        return Err(WalkError::Invalid(format!("time must be finite, got {t}")));
    }
    check_grid(m)?;
    if psi0.width() > m {
        return Err(WalkError::GridTooSmall {
            grid: m,
            width: psi0.width(),
        });
    }
    // Constant multipliers are a global phase; no transform needed.
    if t == 0.0 || s.is_constant() {
        return Ok(psi0.scale(Complex64::cis(-t * s.a0())));
    }

    let mut field = to_torus(psi0, m)?;
    for (k, v) in field.values.iter_mut().enumerate() {
        *v *= Complex64::cis(-t * s.eval(field_theta(k, m)));
    }
    let out = from_torus(&field);

    let band = ((guard / 2) as usize).min(m / 4);
    let amps = out.amps();
    let mass: f64 = amps[..band]
        .iter()
        .chain(&amps[m - band..])
        .map(|a| a.norm_sqr())
        .sum();
    if mass > ALIAS_TOL {
        return Err(WalkError::Aliasing {
            t,
            mass,
            tol: ALIAS_TOL,
            grid: m,
            suggested: 2 * m,
        });
    }
    Ok(out)
}

fn field_theta(k: usize, m: usize) -> f64 {
    TAU * k as f64 / m as f64
}

/// Starts from [`choose_grid_size`] and doubles the grid while the guard band
/// reports aliasing, up to [`DEFAULT_GRID_CAP`].
pub fn evolve_auto(
    s: &TrigSymbol,
    psi0: &LatticeState,
    t: f64,
    guard: u64,
) -> Result<LatticeState> {
    let mut m = choose_grid_size(s, psi0, t.abs(), guard)?;
    loop {
        match evolve_with_guard(s, psi0, t, m, guard) {
            Err(WalkError::Aliasing { .. }) if 2 * m <= DEFAULT_GRID_CAP => m *= 2,
            r => return r,
        }
    }
}

/// `P_t(n) = |ψ_t(n)|²` over the stored window.
pub fn position_distribution(psi: &LatticeState) -> PointMeasure {
    let (support, weights) = psi.iter().map(|(n, a)| (n as f64, a.norm_sqr())).unzip();
    PointMeasure::from_sorted(support, weights)
}

/// Banded Hermitian Toeplitz truncation of `A` to the sites `[-N, N]`.
#[derive(Debug, Clone)]
pub struct TruncatedGenerator {
    half_width: usize,
    /// `a_k` for `k = -d..=d`.
    band: Vec<Complex64>,
}

impl TruncatedGenerator {
    pub fn new(s: &TrigSymbol, half_width: usize) -> Self {
        let d = s.bandwidth() as i64;
        TruncatedGenerator {
            half_width,
            band: (-d..=d).map(|k| s.coeff(k)).collect(),
        }
    }

    /// Matrix dimension `2N + 1`.
    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    fn bandwidth(&self) -> usize {
        self.band.len() / 2
    }

    /// Entry `A[i][j] = a_{i-j}` with rows and columns indexed from site `-N`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let d = self.bandwidth() as i64;
        let k = i as i64 - j as i64;
        if k.abs() > d {
            Complex64::new(0.0, 0.0)
        } else {
            self.band[(k + d) as usize]
        }
    }

    /// Row-major dense copy of the truncated matrix.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let d = self.bandwidth();
                let lo = i.saturating_sub(d);
                let hi = (i + d).min(self.dim() - 1);
                (lo..=hi).map(|j| self.entry(i, j).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let d = self.bandwidth();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(d);
                let hi = (i + d).min(n - 1);
                (lo..=hi).map(|j| self.entry(i, j) * x[j]).sum()
            })
            .collect()
    }
}

/// Taylor degree whose remainder `x^{m+1} e^x/(m+1)!` is below `tol` for `‖X‖ <= x`.
fn taylor_degree(x: f64, tol: f64) -> usize {
    let mut term = 1.0;
    for m in 0..200 {
        term *= x / (m + 1) as f64;
        if term * x.exp() < tol {
            return m;
        }
    }
    200
}

const TAYLOR_TOL: f64 = 1e-14;

/// `e^{-itA_N} v` by sub-stepping with truncated Taylor series, each step
/// scaled so that `‖τ A_N‖ <= 1/2`.
pub fn expm_action(gen: &TruncatedGenerator, t: f64, v: &[Complex64]) -> Vec<Complex64> {
    let norm = gen.inf_norm() * t.abs();
    if norm == 0.0 {
        return v.to_vec();
    }
    let steps = (2.0 * norm).ceil().max(1.0) as usize;
    let tau = t / steps as f64;
    let degree = taylor_degree(norm / steps as f64, TAYLOR_TOL);
    let minus_i_tau = Complex64::new(0.0, -tau);
    let mut x = v.to_vec();
    for _ in 0..steps {
        let mut term = x.clone();
        let mut acc = x.clone();
        for k in 1..=degree {
            term = gen.apply(&term);
            let f = minus_i_tau / k as f64;
            for (tv, av) in term.iter_mut().zip(acc.iter_mut()) {
                *tv *= f;
                *av += *tv;
            }
        }
        x = acc;
    }
    x
}

type Dense = Vec<Vec<Complex64>>;

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in a.iter().enumerate() {
        for (k, &aik) in row.iter().enumerate() {
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for (cij, bkj) in c[i].iter_mut().zip(&b[k]) {
                *cij += aik * bkj;
            }
        }
    }
    c
}

/// Dense `e^{-itA}` by scaling and squaring of the Taylor series.
pub fn expm_dense(a: &Dense, t: f64) -> Dense {
    let n = a.len();
    let norm = a
        .iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(0.0, -t / 2f64.powi(squarings as i32));
    let x: Dense = a
        .iter()
        .map(|r| r.iter().map(|z| z * scale).collect())
        .collect();
    let degree = taylor_degree(norm / 2f64.powi(squarings as i32), TAYLOR_TOL);

    let identity = |i: usize, j: usize| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    // Horner: I + X(I + X/2(I + X/3(...)))
    let mut e: Dense = (0..n)
        .map(|i| (0..n).map(|j| identity(i, j)).collect())
        .collect();
    for k in (1..=degree).rev() {
        let mut p = matmul(&x, &e);
        for (i, row) in p.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = *z / k as f64 + identity(i, j);
            }
        }
        e = p;
    }
    for _ in 0..squarings {
        e = matmul(&e, &e);
    }
    e
}

/// Result of the truncated-matrix oracle.
#[derive(Debug, Clone)]
pub struct DenseEvolution {
    pub state: LatticeState,
    /// Set when `N` is below the light-cone requirement.
    pub truncation_warning: Option<String>,
}

/// `e^{-itA_N} ψ_0` with `A_N` the truncation of `A` to sites `[-N, N]`,
/// computed in position space without any Fourier transform.
pub fn dense_oracle_evolve(
    s: &TrigSymbol,
    psi0: &LatticeState,
    t: f64,
    half_width: usize,
) -> Result<DenseEvolution> {
    let n = half_width as i64;
    if psi0.width() > 0 && (psi0.origin() < -n || psi0.last() > n) {
        return Err(WalkError::Invalid(format!(
            "initial state spans [{}, {}], outside the truncation [-{n}, {n}]",
            psi0.origin(),
            psi0.last()
        )));
    }
    let reach = psi0.origin().abs().max(psi0.last().abs()) as f64;
    let needed = s.max_group_speed() * t.abs() + reach + 50.0;
    let truncation_warning = ((half_width as f64) < needed).then(|| {
        format!(
            "truncation half-width {half_width} is below the light-cone requirement {needed:.1}"
        )
    });

    if t == 0.0 {
        return Ok(DenseEvolution {
            state: psi0.clone(),
            truncation_warning,
        });
    }
    let gen = TruncatedGenerator::new(s, half_width);
    let mut v = vec![Complex64::new(0.0, 0.0); gen.dim()];
    for (site, a) in psi0.iter() {
        v[(site + n) as usize] = a;
    }
    let out = expm_action(&gen, t, &v);
    Ok(DenseEvolution {
        state: LatticeState::windowed(-n, out),
        truncation_warning,
    })
}
