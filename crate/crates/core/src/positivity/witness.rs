//! Quadrature of the explicit sign integrals used in the counterexample
//! constructions, side by side with their stated closed values.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{pm_split, square_mixed_psi};
use crate::domains::{boundary_quadrature, BoundaryPoint, DomainId, Edge};
use crate::quadrature::{piecewise, sign_breaks};
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub name: String,
    /// Quadrature at the default resolution.
    pub quadrature: f64,
    /// Quadrature at a second, independent resolution.
    pub quadrature_alt: f64,
    /// Closed value as stated.
    pub stated: f64,
    pub agrees: bool,
}

impl ClosedFormCheck {
    fn new(name: String, quadrature: f64, quadrature_alt: f64, stated: f64) -> Self {
        let agrees = (quadrature - stated).abs() <= 1e-8 * stated.abs().max(1.0);
        ClosedFormCheck { name, quadrature, quadrature_alt, stated, agrees }
    }
}

/// `∫_a^b f · g⁺` split at the sign changes of `g`.
fn positive_part_integral(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let breaks = sign_breaks(&g, a, b, cells);
    piecewise(|x| f(x) * g(x).max(0.0), a, b, &breaks, (b - a) / cells as f64, 16)
}

/// `2∫_0^π sin(nφ) sin⁺((n+1)φ) dφ`.
pub fn ball_sign_integral(n: u32, cells: usize) -> f64 {
    let (a, b) = (n as f64, (n + 1) as f64);
    2.0 * positive_part_integral(|x| (a * x).sin(), |x| (b * x).sin(), 0.0, PI, cells)
}

/// `∫_0^{2π} cos((m+1)θ) cos⁺(mθ) dθ`.
pub fn disc_right_integral(m: u32, cells: usize) -> f64 {
    let (a, b) = ((m + 1) as f64, m as f64);
    positive_part_integral(|x| (a * x).cos(), |x| (b * x).cos(), 0.0, 2.0 * PI, cells)
}

/// `2n(n+1)∫_0^1 sin(mπx) sin⁺((m+1)πx) dx − 2m(m+1)∫_0^1 sin(nπx) sin⁺((n+1)πx) dx`.
pub fn square_right_integral(m: u32, n: u32, cells: usize) -> f64 {
    let j = |q: u32| {
        let (a, b) = (q as f64 * PI, (q + 1) as f64 * PI);
        positive_part_integral(|x| (a * x).sin(), |x| (b * x).sin(), 0.0, 1.0, cells)
    };
    let (mf, nf) = (m as f64, n as f64);
    2.0 * nf * (nf + 1.0) * j(m) - 2.0 * mf * (mf + 1.0) * j(n)
}

/// The m = 2 square integrals `I±` in the stated edge pattern
/// `∫ sin(2πx)[(ψ±(1,x) − ψ±(x,1)) + (ψ±(0,x) − ψ±(x,0))] dx` for the
/// cos/linear probe, computed on the boundary grid of the given resolution.
pub fn square_witness_integrals(resolution: usize) -> Result<(f64, f64)> {
    let grid = Arc::new(boundary_quadrature(DomainId::Square, resolution)?);
    let psi = square_mixed_psi(&grid);
    let (plus, minus) = pm_split(&psi);
    let weight = |p: &BoundaryPoint| match p {
        BoundaryPoint::Edge { edge, s } => {
            let sign = match edge {
                Edge::Right | Edge::Left => 1.0,
                Edge::Top | Edge::Bottom => -1.0,
            };
            sign * (2.0 * PI * s).sin()
        }
        _ => f64::NAN,
    };
    Ok((plus.refined_integral(weight), minus.refined_integral(weight)))
}

/// Every stated closed value with its quadrature.
pub fn closed_form_checks() -> Result<Vec<ClosedFormCheck>> {
    let mut out = Vec::new();
    let (p1, m1) = square_witness_integrals(128)?;
    let (p2, m2) = square_witness_integrals(96)?;
    out.push(ClosedFormCheck::new("square m=2 I+".into(), p1, p2, -1.0 / (2.0 * PI) - 4.0 / (3.0 * PI)));
    out.push(ClosedFormCheck::new("square m=2 I-".into(), m1, m2, -4.0 / (3.0 * PI)));
    for n in [2u32, 4, 6] {
        let nf = n as f64;
        let stated = nf * (2.0 * nf - 1.0) / (2.0 * (2.0 * nf + 1.0)) * (PI / (nf + 1.0)).sin();
        out.push(ClosedFormCheck::new(
            format!("ball n={n} sign integral"),
            ball_sign_integral(n, 256),
            ball_sign_integral(n, 97),
            stated,
        ));
    }
    for m in 1u32..=4 {
        let mf = m as f64;
        let stated = (2.0 * mf + 3.0) / (2.0 * (2.0 * mf + 1.0)) * (PI / (2.0 * mf)).sin() - 0.5;
        out.push(ClosedFormCheck::new(
            format!("disc m={m} right witness I1+"),
            disc_right_integral(m, 256),
            disc_right_integral(m, 97),
            stated,
        ));
    }
    for (m, n) in [(1u32, 2u32), (1, 3), (2, 3)] {
        let (mf, nf) = (m as f64, n as f64);
        let stated = mf * nf * (nf + 1.0) * (2.0 * mf - 1.0) / ((2.0 * mf + 1.0) * PI) * (PI / (mf + 1.0)).sin()
            - mf * nf * (mf + 1.0) * (2.0 * nf - 1.0) / ((2.0 * nf + 1.0) * PI) * (PI / (nf + 1.0)).sin();
        out.push(ClosedFormCheck::new(
            format!("square ({m},{n}) right witness I1+"),
            square_right_integral(m, n, 256),
            square_right_integral(m, n, 97),
            stated,
        ));
    }
    Ok(out)
}
