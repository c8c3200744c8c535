//! Integer-order Bessel functions of the first kind by Miller's downward
//! recurrence, normalized with `J_0 + 2 Σ_k J_{2k} = 1`.

use num_complex::Complex64;

const RESCALE_ABOVE: f64 = 1e200;

/// `J_N(t)` must fall below `e^{-DECAY}` at the starting index.
const DECAY: f64 = 42.0;

/// Starting index of the downward recurrence for orders up to `nmax` at `t`.
///
/// The start lies at least 10 orders past both `nmax` and the turning point
/// `n ≈ t`, and far enough that the Debye exponent `N (α - tanh α)`, with
/// `cosh α = N/t`, exceeds [`DECAY`]. Rounded up to even.
pub fn miller_start(nmax: u64, t: f64) -> u64 {
    let mut n = nmax.max(t.ceil() as u64) + 10;
    if t > 0.0 {
        loop {
            let nu = n as f64;
            let alpha = (nu / t).acosh();
            if nu * (alpha - alpha.tanh()) >= DECAY {
                break;
            }
            n += 1;
        }
    }
    n + (n & 1)
}

/// `J_0(t), ..., J_nmax(t)` from a single downward pass.
pub fn bessel_j_upto(nmax: u64, t: f64) -> Vec<f64> {
    let len = nmax as usize + 1;
    let mut out = vec![0.0; len];
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let x = t.abs();
    let start = miller_start(nmax, x);

    let mut next = 0.0; // j_{k+1}
    let mut cur = 1e-30; // j_k
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k <= nmax {
            out[k as usize] = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > RESCALE_ABOVE {
            let r = 1.0 / RESCALE_ABOVE;
            cur *= r;
            next *= r;
            norm *= r;
            for v in out.iter_mut().skip(k as usize) {
                *v *= r;
            }
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if t < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(t)` for any integer order.
pub fn bessel_j(n: i64, t: f64) -> f64 {
    let m = n.unsigned_abs();
    let v = bessel_j_upto(m, t)[m as usize];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `⟨e_n, e^{-itA} e_0⟩ = i^n J_n(t)` for the walk with symbol `-cos θ`.
pub fn bessel_amplitude(n: i64, t: f64) -> Complex64 {
    i_pow(n) * bessel_j(n, t)
}

/// Amplitudes `i^n J_n(t)` for `|n| <= nmax`, indexed from `-nmax`.
pub fn bessel_amplitudes(nmax: u64, t: f64) -> Vec<Complex64> {
    let j = bessel_j_upto(nmax, t);
    let nmax = nmax as i64;
    (-nmax..=nmax)
        .map(|n| {
            let v = j[n.unsigned_abs() as usize];
            let v = if n < 0 && n % 2 != 0 { -v } else { v };
            i_pow(n) * v
        })
        .collect()
}
