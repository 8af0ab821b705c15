use std::sync::Arc;

use dtn_core::domains::{
    enumerate_modes, normal_derivative, trig_mode, BoundaryFunction, BoundaryGrid, BoundaryPoint, DomainId, ModeLabel,
};
use dtn_core::linalg_model::{decompose, random_model, run_suite};
use dtn_core::positivity::{sign_sum, Side, SideImplication};
use dtn_core::specfun::{bessel_j, zero_table, BesselOrder};
use dtn_core::traceform::{branch_eval, eval_form, robin_form, TraceFormSpec};
use dtn_core::Complex64;
use proptest::prelude::*;

fn disc_spec() -> TraceFormSpec {
    TraceFormSpec::new(DomainId::Disc, 64).unwrap()
}

/// Real trigonometric polynomial on the circle with coefficients `c`
/// (constant, then cos/sin pairs).
fn trig(grid: &Arc<BoundaryGrid>, c: Vec<f64>) -> BoundaryFunction {
    BoundaryFunction::from_fn(grid, None, move |p| match p {
        BoundaryPoint::Circle { theta } => {
            let mut v = c[0] * trig_mode(0, false, *theta);
            for k in 1..=(c.len() - 1) / 2 {
                v += c[2 * k - 1] * trig_mode(k as u32, false, *theta) + c[2 * k] * trig_mode(k as u32, true, *theta);
            }
            v
        }
        _ => f64::NAN,
    })
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 9)
}

/// Real z at least 0.5 away from every disc pole below 400.
fn off_pole(z: f64) -> bool {
    (0..=20u32).all(|k| {
        let t = zero_table(BesselOrder::Integer(k), 8).unwrap();
        (1..=8).all(|l| (t.zero(l).powi(2) - z).abs() > 0.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bessel_recurrence(k in 1u32..=12, x in 0.5..50.0f64) {
        let r = bessel_j(k - 1, x) + bessel_j(k + 1, x) - 2.0 * k as f64 / x * bessel_j(k, x);
        prop_assert!(r.abs() <= 1e-11, "k={} x={} residual {}", k, x, r);
    }

    #[test]
    fn form_is_symmetric_and_bilinear(a in coeffs(), b in coeffs(), s in -2.0..2.0f64, z in -30.0..120.0f64) {
        prop_assume!(off_pole(z));
        let spec = disc_spec();
        let (phi, psi) = (trig(&spec.grid, a), trig(&spec.grid, b));
        let zc = Complex64::new(z, 0.0);
        let ab = eval_form(&spec, zc, &phi, &psi).unwrap().value.re;
        let ba = eval_form(&spec, zc, &psi, &phi).unwrap().value.re;
        let scale = ab.abs().max(1.0);
        prop_assert!((ab - ba).abs() <= 1e-10 * scale);
        let mix = phi.combine(s, &psi, 1.0);
        let lhs = eval_form(&spec, zc, &mix, &psi).unwrap().value.re;
        let pp = eval_form(&spec, zc, &psi, &psi).unwrap().value.re;
        let rhs = s * ab + pp;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(scale));
    }

    #[test]
    fn robin_shift_is_z_independent(a in coeffs(), beta in 0.1..5.0f64, z1 in -30.0..120.0f64, z2 in -30.0..120.0f64) {
        prop_assume!(off_pole(z1) && off_pole(z2));
        let spec = disc_spec();
        let robin = spec.clone().with_constant_robin(beta).unwrap();
        let phi = trig(&spec.grid, a);
        let shift = |z: f64| {
            let zc = Complex64::new(z, 0.0);
            robin_form(&robin, zc, &phi, &phi).unwrap().value.re - eval_form(&spec, zc, &phi, &phi).unwrap().value.re
        };
        let expected = beta * phi.norm_squared();
        prop_assert!((shift(z1) - expected).abs() <= 1e-11 * expected.max(1.0));
        prop_assert!((shift(z1) - shift(z2)).abs() <= 1e-11 * expected.max(1.0));
    }

    #[test]
    fn disc_branch_decreases_between_poles(k in 0u32..=8, l in 0usize..5, u in 0.01..0.98f64, du in 0.001..0.01f64) {
        let t = zero_table(BesselOrder::Integer(k), 6).unwrap();
        let lo = if l == 0 { -50.0 } else { t.zero(l).powi(2) };
        let hi = t.zero(l + 1).powi(2);
        let z1 = lo + u * (hi - lo);
        let z2 = z1 + du * (hi - lo);
        let spec = disc_spec();
        let v1 = branch_eval(&spec, k, Complex64::new(z1, 0.0)).unwrap().value.re;
        let v2 = branch_eval(&spec, k, Complex64::new(z2, 0.0)).unwrap().value.re;
        prop_assert!(v2 < v1, "k={} z1={} z2={}: {} !< {}", k, z1, z2, v2, v1);
    }

    #[test]
    fn sign_sum_scales_quadratically(a in coeffs(), c in 0.1..10.0f64, index in 0usize..8) {
        let spec = disc_spec();
        let modes = enumerate_modes(DomainId::Disc, 120.0).unwrap();
        let mode = &modes[index % modes.len()];
        let psi = trig(&spec.grid, a);
        let s1 = sign_sum(mode, &psi).unwrap().s;
        let s2 = sign_sum(mode, &psi.scaled(c)).unwrap().s;
        prop_assert!((s2 - c * c * s1).abs() <= 1e-10 * (c * c * s1.abs()).max(1.0));
    }

    #[test]
    fn sides_are_exclusive(a in coeffs(), index in 0usize..8) {
        let spec = disc_spec();
        let modes = enumerate_modes(DomainId::Disc, 120.0).unwrap();
        let mode = &modes[index % modes.len()];
        let r = sign_sum(mode, &trig(&spec.grid, a)).unwrap();
        if r.side_implication != SideImplication::Neutral {
            prop_assert!(r.side_implication.violates(Side::Left) != r.side_implication.violates(Side::Right));
        } else {
            prop_assert!(r.s.abs() <= r.threshold);
        }
    }

    #[test]
    fn random_models_satisfy_suite(seed in 1000u64..100_000, n in 2usize..16) {
        let (model, mut rng) = random_model(seed, n);
        let report = run_suite(&model, &mut rng).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        prop_assert!(report.pass, "{:?}", failed);
    }

    #[test]
    fn mittag_leffler_is_exact(seed in 0u64..10_000, n in 3usize..14, t in 0.05..0.95f64) {
        let (model, mut rng) = random_model(seed, n);
        let dec = decompose(&model).unwrap();
        let e = &dec.energies;
        // a point strictly inside the first gap, or below the spectrum
        let lambda = match e.len() {
            0 | 1 => -1.0,
            _ if e[1] - e[0] > 1e-6 => e[0] + t * (e[1] - e[0]),
            _ => e[0] - 1.0,
        };
        let psi = dtn_core::linalg_model::random_psi(&mut rng, model.m());
        let w = dec.three_way(&model, lambda, &psi).unwrap();
        let scale = model.scale().max(psi.norm_squared());
        prop_assert!((w.mittag_leffler - w.representation).abs() <= 1e-10 * scale);
    }
}

#[test]
fn eigenspace_derivatives_are_orthogonal() {
    for (domain, res, e_max) in [(DomainId::Disc, 64, 300.0), (DomainId::Square, 128, 600.0), (DomainId::Ball, 24, 150.0)] {
        let grid = Arc::new(dtn_core::domains::boundary_quadrature(domain, res).unwrap());
        for mode in enumerate_modes(domain, e_max).unwrap().iter().filter(|m| m.multiplicity > 1) {
            let d: Vec<_> = (0..mode.multiplicity).map(|i| normal_derivative(mode, i, &grid).unwrap()).collect();
            for i in 0..d.len() {
                for j in 0..i {
                    let ip = d[i].inner(&d[j]);
                    let scale = (d[i].norm_squared() * d[j].norm_squared()).sqrt();
                    assert!(ip.abs() <= 1e-10 * scale, "{domain} E={} members {i},{j}: {ip}", mode.energy);
                }
            }
        }
    }
}

/// With `ψ = ∂νv₁` of a double mode, `∫∂νv₂ψ⁺ = ∫∂νv₂ψ⁻` by orthogonality.
/// Both vanish on the disc and on the square unless m and n are both odd;
/// in every case `ψ` stays a left witness.
#[test]
fn double_mode_cross_integrals() {
    for (domain, res, e_max) in [(DomainId::Disc, 64, 150.0), (DomainId::Square, 128, 600.0)] {
        let grid = Arc::new(dtn_core::domains::boundary_quadrature(domain, res).unwrap());
        for mode in enumerate_modes(domain, e_max).unwrap().iter().filter(|m| m.multiplicity == 2) {
            let psi = normal_derivative(mode, 0, &grid).unwrap();
            let r = sign_sum(mode, &psi).unwrap();
            let scale = psi.norm_squared();
            let e = mode.energy;
            assert!((r.plus_integrals[1] - r.minus_integrals[1]).abs() <= 1e-9 * scale, "{domain} E={e}");
            let both_odd = matches!(mode.labels[0], ModeLabel::Square { m, n } if m % 2 == 1 && n % 2 == 1);
            if !both_odd {
                assert!(r.plus_integrals[1].abs() <= 1e-9 * scale, "{domain} E={e}: {}", r.plus_integrals[1]);
            }
            assert_eq!(r.side_implication, SideImplication::ViolatesLeft, "{domain} E={e}");
        }
    }
}
