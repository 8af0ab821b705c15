//! Branch series `Ě_ν(z) = ν₀ + Σ_l 2z/(z − j_l²)` over the zeros of one
//! Bessel order, with closed-form counterparts on the real axis.

use num_complex::Complex64;

use crate::domains::DomainId;
use crate::error::{DtnError, Result};
use crate::specfun::{bessel_j, rayleigh_sums, spherical_j, zero_table, BesselOrder};

/// Relative distance below which `z` counts as sitting on a pole.
pub const POLE_RADIUS: f64 = 1e-12;

/// Zero spacing lower bound: `π` for ν ≥ 1/2 (spacings decrease to π), and
/// the first spacing of `J_0` (rounded down) for ν = 0.
fn min_spacing(nu: f64) -> f64 {
    if nu >= 0.5 {
        std::f64::consts::PI
    } else {
        3.11
    }
}

pub fn family_order(domain: DomainId, family: u32) -> Result<BesselOrder> {
    match domain {
        DomainId::Disc => Ok(BesselOrder::Integer(family)),
        DomainId::Ball => Ok(BesselOrder::Spherical(family)),
        DomainId::Square => Err(DtnError::InvalidArgument(
            "the square has no separable branch families".into(),
        )),
    }
}

/// Value of a truncated branch series and its certificate.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub level: usize,
    pub tail_bound: f64,
}

/// Upper bound on `|Σ_{l>L} 2z/(z − j_l²)|` for the plain series.
///
/// Uses `j_l ≥ j_{L+1} + (l − L − 1)δ` with the computed `j_{L+1}` and the
/// spacing bound δ, then compares the sum with an integral.
pub fn raw_tail_bound(order: BesselOrder, z: Complex64, level: usize) -> Result<f64> {
    let r = z.norm();
    let first = zero_table(order, level + 1)?.zero(level + 1);
    if first * first <= r {
        return Err(DtnError::BoundUnavailable(format!(
            "|z| = {r} is not below j²_{{L+1}} = {} at L = {level}",
            first * first
        )));
    }
    let delta = min_spacing(order.nu());
    let head = 1.0 / (first * first - r);
    let integral = if r == 0.0 {
        1.0 / (delta * first)
    } else {
        let s = r.sqrt();
        ((first + s) / (first - s)).ln() / (2.0 * delta * s)
    };
    Ok(2.0 * r * (head + integral))
}

/// Upper bound on the tail of the accelerated terms `2z³/(j⁴(z − j²))`.
fn accelerated_tail_bound(order: BesselOrder, z: Complex64, level: usize) -> Result<f64> {
    let r = z.norm();
    let first = zero_table(order, level + 1)?.zero(level + 1);
    if first * first <= r {
        return Err(DtnError::BoundUnavailable(format!(
            "|z| = {r} is not below j²_{{L+1}} at L = {level}"
        )));
    }
    let delta = min_spacing(order.nu());
    let quartic = 1.0 / first.powi(4) + 1.0 / (3.0 * delta * first.powi(3));
    Ok(2.0 * r.powi(3) / (first * first - r) * quartic)
}

fn check_pole(z: Complex64, j2: f64) -> Result<()> {
    let radius = POLE_RADIUS * j2.max(1.0);
    if (z - j2).norm() <= radius {
        Err(DtnError::PoleProximity { z: z.re, pole: j2, radius })
    } else {
        Ok(())
    }
}

/// `Σ_{l≤L} 2z/(z − j_l²)` summed directly (no acceleration); for tests
/// and tail-bound checks.
pub fn plain_partial_sum(order: BesselOrder, z: Complex64, level: usize) -> Result<Complex64> {
    let table = zero_table(order, level)?;
    let mut s = Complex64::new(0.0, 0.0);
    for &j in &table.zeros[..level] {
        check_pole(z, j * j)?;
        s += 2.0 * z / (z - j * j);
    }
    Ok(s)
}

/// `Σ_l 2z/(z − j_l²)` by subtracting the exact Rayleigh sums
/// `Σ j^{-2}`, `Σ j^{-4}` and summing the remaining `O(l^{-6})` terms
/// until the certified tail falls below `tol · max(1, |value|)`.
pub fn pole_sum(order: BesselOrder, z: Complex64, tol: f64, l_max: usize) -> Result<SeriesValue> {
    let (s1, s2) = rayleigh_sums(order.nu());
    let base = -2.0 * z * s1 - 2.0 * z * z * s2;
    // start past the zeros below |z| so the bound is available
    let mut level = 16usize;
    loop {
        let table = zero_table(order, level + 1)?;
        if table.zero(level + 1).powi(2) > 2.0 * z.norm() {
            break;
        }
        level *= 2;
        if level > l_max {
            return Err(DtnError::Truncation { level: l_max, bound: f64::INFINITY, tolerance: tol });
        }
    }
    let mut done = 0usize;
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let table = zero_table(order, level + 1)?;
        for &j in &table.zeros[done..level] {
            let j2 = j * j;
            check_pole(z, j2)?;
            acc += 2.0 * z * z * z / (j2 * j2 * (z - j2));
        }
        done = level;
        let value = base + acc;
        let bound = accelerated_tail_bound(order, z, level)?;
        if bound <= tol * value.norm().max(1.0) {
            return Ok(SeriesValue { value, level, tail_bound: bound });
        }
        if level >= l_max {
            return Err(DtnError::Truncation { level, bound, tolerance: tol });
        }
        level = (level * 2).min(l_max);
    }
}

/// Branch value `ν₀ + Σ_l 2z/(z − j_l²)` of family `family` (k on the disc,
/// n on the ball).
pub fn branch_series(domain: DomainId, family: u32, z: Complex64, tol: f64, l_max: usize) -> Result<SeriesValue> {
    let order = family_order(domain, family)?;
    let mut s = pole_sum(order, z, tol, l_max)?;
    s.value += family as f64;
    Ok(s)
}

/// `I_{ν+1}(x)/I_ν(x)` by backward evaluation of its continued fraction.
pub fn modified_ratio(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let depth = 60 + (4.0 * x) as usize;
    let mut r = 0.0;
    for m in (1..=depth).rev() {
        r = 1.0 / (2.0 * (nu + m as f64) / x + r);
    }
    r
}

fn closed_pole_check(order: BesselOrder, z: f64) -> Result<()> {
    if z <= 0.0 {
        return Ok(());
    }
    let x = z.sqrt();
    let table = zero_table(order, 1)?;
    let mut count = table.len();
    while zero_table(order, count)?.zero(count) < x + 4.0 {
        count *= 2;
    }
    for &j in &zero_table(order, count)?.zeros {
        check_pole(Complex64::new(z, 0.0), j * j)?;
    }
    Ok(())
}

/// Disc branch `k − √z J_{k+1}(√z)/J_k(√z)` on the real axis (for z < 0 the
/// modified-Bessel form `k + √|z| I_{k+1}/I_k`).
pub fn disc_branch_closed(k: u32, z: f64) -> Result<f64> {
    closed_pole_check(BesselOrder::Integer(k), z)?;
    if z > 0.0 {
        let x = z.sqrt();
        Ok(k as f64 - x * bessel_j(k + 1, x) / bessel_j(k, x))
    } else if z < 0.0 {
        let x = (-z).sqrt();
        Ok(k as f64 + x * modified_ratio(k as f64, x))
    } else {
        Ok(k as f64)
    }
}

/// Ball branch `n − √z j_{n+1}(√z)/j_n(√z)` on the real axis.
pub fn ball_branch_closed(n: u32, z: f64) -> Result<f64> {
    closed_pole_check(BesselOrder::Spherical(n), z)?;
    if z > 0.0 {
        let x = z.sqrt();
        Ok(n as f64 - x * spherical_j(n + 1, x) / spherical_j(n, x))
    } else if z < 0.0 {
        let x = (-z).sqrt();
        Ok(n as f64 + x * modified_ratio(n as f64 + 0.5, x))
    } else {
        Ok(n as f64)
    }
}

/// Closed-form branch for either separable domain.
pub fn branch_closed(domain: DomainId, family: u32, z: f64) -> Result<f64> {
    match domain {
        DomainId::Disc => disc_branch_closed(family, z),
        DomainId::Ball => ball_branch_closed(family, z),
        DomainId::Square => Err(DtnError::InvalidArgument("no closed branch on the square".into())),
    }
}

/// Distance from `z` to the nearest Dirichlet eigenvalue of the domain.
pub fn nearest_pole(domain: DomainId, z: Complex64) -> Result<f64> {
    let pi2 = std::f64::consts::PI.powi(2);
    match domain {
        DomainId::Square => {
            let side = ((z.re.max(0.0) / pi2).sqrt() as u64) + 2;
            let mut best = f64::INFINITY;
            for m in 1..=side {
                for n in 1..=side {
                    best = best.min((z - pi2 * (m * m + n * n) as f64).norm());
                }
            }
            Ok(best)
        }
        _ => {
            let mut best = f64::INFINITY;
            for family in 0u32.. {
                let order = family_order(domain, family)?;
                let first = zero_table(order, 1)?.zero(1);
                // every later family starts above this one's first zero
                if first * first - z.re.max(0.0) > best && first * first > z.re {
                    break;
                }
                let mut count = 16;
                while zero_table(order, count)?.zero(count).powi(2) < z.re + best.min(1e6) {
                    count *= 2;
                }
                for &j in &zero_table(order, count)?.zeros {
                    best = best.min((z - j * j).norm());
                }
            }
            Ok(best)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn modified_ratio_small_argument() {
        // I_1(x)/I_0(x) ≈ x/2 - x³/16
        let x = 1e-3;
        assert!((modified_ratio(0.0, x) - (x / 2.0 - x.powi(3) / 16.0)).abs() < 1e-15);
        // i_1(x)/i_0(x) = coth x - 1/x
        let x = 2.5;
        assert!((modified_ratio(0.5, x) - (1.0 / x.tanh() - 1.0 / x)).abs() < 1e-14);
    }

    #[test]
    fn disc_k0_at_origin() {
        assert!(disc_branch_closed(0, 1e-12).unwrap().abs() <= 1e-8);
        let s = branch_series(DomainId::Disc, 0, Complex64::new(1e-12, 0.0), 1e-10, 10_000).unwrap();
        assert!(s.value.norm() < 1e-8);
    }

    #[test]
    fn series_matches_closed_form() {
        for k in 0..4u32 {
            for z in [-7.3, -0.5, 3.0, 20.0, 61.0] {
                let c = disc_branch_closed(k, z).unwrap();
                let s = branch_series(DomainId::Disc, k, Complex64::new(z, 0.0), 1e-12, 10_000).unwrap();
                assert!((c - s.value.re).abs() < 1e-10, "k={k} z={z}");
            }
        }
        for z in [-5.0_f64, 1.0, 5.0, 12.0] {
            let x: f64 = z.abs().sqrt();
            let oracle = if z > 0.0 { x / x.tan() - 1.0 } else { x / x.tanh() - 1.0 };
            let s = branch_series(DomainId::Ball, 0, Complex64::new(z, 0.0), 1e-12, 10_000).unwrap();
            assert!((s.value.re - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn pole_is_rejected() {
        let j = crate::specfun::bessel_zero(0, 2).unwrap();
        let z = Complex64::new(j * j, 0.0);
        assert!(matches!(
            branch_series(DomainId::Disc, 0, z, 1e-10, 10_000),
            Err(DtnError::PoleProximity { .. })
        ));
        assert!(matches!(disc_branch_closed(0, j * j), Err(DtnError::PoleProximity { .. })));
    }

    #[test]
    fn raw_tail_bound_dominates_true_tail() {
        // ball n = 0: Σ_{l>L} 2z/(z − l²π²) = closed − plain partial sum
        for (z, level) in [(3.0_f64, 1usize), (-20.0, 5), (50.0, 3), (90.0, 40)] {
            let zc = Complex64::new(z, 0.0);
            let order = BesselOrder::Spherical(0);
            let x = z.abs().sqrt();
            let total = if z > 0.0 { x / x.tan() - 1.0 } else { x / x.tanh() - 1.0 };
            let tail = total - plain_partial_sum(order, zc, level).unwrap().re;
            assert!(raw_tail_bound(order, zc, level).unwrap() >= tail.abs());
        }
        assert!(raw_tail_bound(BesselOrder::Integer(0), Complex64::new(PI * PI * 100.0, 0.0), 2).is_err());
    }

    #[test]
    fn nearest_pole_square_and_disc() {
        let d = nearest_pole(DomainId::Square, Complex64::new(21.0, 0.0)).unwrap();
        assert!((d - (2.0 * PI * PI - 21.0).abs()).abs() < 1e-12);
        let j = crate::specfun::bessel_zero(1, 1).unwrap();
        let d = nearest_pole(DomainId::Disc, Complex64::new(j * j + 0.01, 0.0)).unwrap();
        assert!((d - 0.01).abs() < 1e-9);
    }
}
