//! Bessel functions of integer order and spherical Bessel functions of the
//! first kind, real argument.
//!
//! `J_k` uses three regimes: the ascending power series near the origin,
//! Miller's backward recurrence normalised by `J_0 + 2 Σ J_{2j} = 1` in the
//! mid range, and Hankel's asymptotic expansion once `x` dominates `k²`.

use std::f64::consts::{FRAC_2_PI, PI};

/// Upper end of the ascending-series regime.
const SERIES_LIMIT: f64 = 5.0;

fn asymptotic_threshold(k: u32) -> f64 {
    let k = k as f64;
    (k * k).max(25.0)
}

/// `J_k(x)` for integer `k >= 0` and real `x`.
pub fn bessel_j(k: u32, x: f64) -> f64 {
    if x < 0.0 {
        // J_k(-x) = (-1)^k J_k(x)
        let v = bessel_j(k, -x);
        return if k.is_multiple_of(2) { v } else { -v };
    }
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(k as f64, x)
    } else if x > asymptotic_threshold(k) {
        hankel(k as f64, x)
    } else {
        miller(k, x).1
    }
}

/// `J_k'(x)`, via `J_0' = -J_1` and `J_k' = (J_{k-1} - J_{k+1}) / 2`.
pub fn bessel_j_prime(k: u32, x: f64) -> f64 {
    if k == 0 {
        return -bessel_j(1, x);
    }
    if x > SERIES_LIMIT && x <= asymptotic_threshold(k + 1) {
        let (below, _, above) = miller(k, x);
        return 0.5 * (below - above);
    }
    0.5 * (bessel_j(k - 1, x) - bessel_j(k + 1, x))
}

/// Ascending series `Σ (-1)^m (x/2)^{2m+ν} / (m! Γ(m+ν+1))` for integer ν.
fn series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^ν / ν!
    let mut term = 1.0;
    let mut j = 1.0;
    while j <= nu {
        term *= half / j;
        j += 1.0;
    }
    let q = -half * half;
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= q / (m * (m + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || m > 300.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// Hankel asymptotic expansion of `J_ν(x)` for large `x`.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let z8 = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    let mut k = 1.0_f64;
    loop {
        term *= (mu - (2.0 * k - 1.0).powi(2)) / (k * z8);
        if term.abs() > last || term == 0.0 {
            break;
        }
        last = term.abs();
        // odd k feeds Q, even k feeds P, with alternating signs
        let m = k as i64;
        match m % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
        k += 1.0;
        if k > 200.0 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (FRAC_2_PI / x).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller backward recurrence. Returns `(J_{k-1}, J_k, J_{k+1})`, with
/// `J_{-1} = -J_1`.
fn miller(k: u32, x: f64) -> (f64, f64, f64) {
    let top = (k as f64 + 1.0).max(x);
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let k = k as usize;
    let two_over_x = 2.0 / x;
    let mut upper = 0.0; // J_{j+1}
    let mut current = 1e-300; // J_j
    let mut norm = 0.0;
    let (mut below, mut at, mut above) = (0.0, 0.0, 0.0);
    let mut j = start;
    loop {
        if j == k + 1 {
            above = current;
        }
        if j == k {
            at = current;
        }
        if k > 0 && j == k - 1 {
            below = current;
        }
        if j.is_multiple_of(2) && j > 0 {
            norm += 2.0 * current;
        }
        if j == 0 {
            norm += current;
            break;
        }
        let lower = j as f64 * two_over_x * current - upper;
        upper = current;
        current = lower;
        j -= 1;
        if current.abs() > 1e250 {
            let s = 1e-250;
            current *= s;
            upper *= s;
            norm *= s;
            below *= s;
            at *= s;
            above *= s;
        }
    }
    if k == 0 {
        // J_{-1} = -J_1
        below = -above;
    }
    (below / norm, at / norm, above / norm)
}

/// Spherical Bessel function `j_n(x) = sqrt(π/(2x)) J_{n+1/2}(x)`.
pub fn spherical_j(n: u32, x: f64) -> f64 {
    spherical_pair(n, x).1
}

/// Derivative `j_n'(x)`, from `j_n' = j_{n-1} - (n+1) j_n / x` and `j_0' = -j_1`.
pub fn spherical_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        return -spherical_j(1, x);
    }
    if x == 0.0 {
        return if n == 1 { 1.0 / 3.0 } else { 0.0 };
    }
    let (below, at) = spherical_pair(n, x);
    below - (n as f64 + 1.0) * at / x
}

/// `J_{n+1/2}(x)` through the spherical recurrences.
pub fn bessel_j_half(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    (2.0 * x / PI).sqrt() * spherical_j(n, x)
}

/// Returns `(j_{n-1}(x), j_n(x))`, with `j_{-1}(x) = cos(x)/x`.
fn spherical_pair(n: u32, x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax < 1e-3 || (ax < 1.0 && n > 0) {
        let below = if n == 0 { x.cos() / x } else { spherical_series(n - 1, x) };
        return (below, spherical_series(n, x));
    }
    let j0 = x.sin() / x;
    if n == 0 {
        return (x.cos() / x, j0);
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if n == 1 {
        return (j0, j1);
    }
    if ax > 2.0 * n as f64 + 2.0 {
        // upward recurrence is stable once x clearly exceeds the order
        let (mut a, mut b) = (j0, j1);
        for m in 1..n {
            let c = (2.0 * m as f64 + 1.0) / x * b - a;
            a = b;
            b = c;
        }
        (a, b)
    } else {
        // backward recurrence
        let n = n as usize;
        let top = (n as f64).max(ax);
        let start = (top + 20.0 + 10.0 * top.sqrt()) as usize;
        let mut upper = 0.0;
        let mut current = 1e-20;
        let (mut below, mut at) = (0.0, 0.0);
        let mut j = start;
        // Σ (2m+1) j_m² = 1 fixes the magnitude; j_0 or j_1 fixes the sign
        let mut norm = 0.0;
        let mut c1 = 0.0;
        while j > 0 {
            let lower = (2.0 * j as f64 + 1.0) / x * current - upper;
            upper = current;
            current = lower;
            j -= 1;
            norm += (2.0 * j as f64 + 1.0) * current * current;
            if j == n {
                at = current;
            }
            if j == n - 1 {
                below = current;
            }
            if j == 1 {
                c1 = current;
            }
            if current.abs() > 1e150 {
                current *= 1e-150;
                upper *= 1e-150;
                below *= 1e-150;
                at *= 1e-150;
                c1 *= 1e-150;
                norm *= 1e-300;
            }
        }
        let mut scale = 1.0 / norm.sqrt();
        let sign_ok = if j0.abs() >= j1.abs() { current * j0 } else { c1 * j1 };
        if sign_ok < 0.0 {
            scale = -scale;
        }
        (below * scale, at * scale)
    }
}

/// Power series `j_n(x) = x^n / (2n+1)!! Σ (-x²/2)^m / (m! (2n+2m+1)!!/(2n+1)!!)`.
fn spherical_series(n: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= x / (2.0 * i as f64 + 1.0);
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        let m = m as f64;
        term *= q / (m * (2.0 * n as f64 + 2.0 * m + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}
