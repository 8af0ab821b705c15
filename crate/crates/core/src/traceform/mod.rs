//! Singular trace form `Ě_z`, its branches, Laurent data at Dirichlet poles,
//! Galerkin matrices and the Robin offset.

mod series;
mod square;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{
    boundary_quadrature, check_domain, coupling, sph_index, trig_index, BoundaryFunction, BoundaryGrid,
    DirichletMode, DomainId, Edge,
};
use crate::error::{DtnError, Result};

pub use series::{
    ball_branch_closed, branch_closed, branch_series, disc_branch_closed, family_order, modified_ratio,
    nearest_pole, plain_partial_sum, pole_sum, raw_tail_bound, SeriesValue, POLE_RADIUS,
};
pub use square::{square_form, square_form_with_estimate};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_L_MAX: usize = 10_000;

/// How `Ě_z` is evaluated on one catalog domain.
#[derive(Debug, Clone)]
pub struct TraceFormSpec {
    pub domain: DomainId,
    /// Relative truncation tolerance, in (0, 1e-4].
    pub tolerance: f64,
    /// Hard cap on the number of poles summed per family.
    pub l_max: usize,
    pub grid: Arc<BoundaryGrid>,
    /// Robin coefficient; `None` is the Neumann background.
    pub robin_beta: Option<BoundaryFunction>,
}

impl TraceFormSpec {
    pub fn new(domain: DomainId, resolution: usize) -> Result<Self> {
        Ok(TraceFormSpec {
            domain,
            tolerance: DEFAULT_TOLERANCE,
            l_max: DEFAULT_L_MAX,
            grid: Arc::new(boundary_quadrature(domain, resolution)?),
            robin_beta: None,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 1e-4) {
            return Err(DtnError::InvalidArgument(format!(
                "truncation tolerance must lie in (0, 1e-4], got {tolerance}"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    /// Attach a Robin coefficient; it must be strictly positive at every node.
    pub fn with_robin(mut self, beta: BoundaryFunction) -> Result<Self> {
        check_domain(self.domain, beta.domain)?;
        if let Some(v) = beta.samples.iter().find(|v| !(**v > 0.0)) {
            return Err(DtnError::InvalidArgument(format!("Robin coefficient must be positive, found {v}")));
        }
        self.robin_beta = Some(beta.resample(&self.grid));
        Ok(self)
    }

    /// Same spec with a constant Robin coefficient.
    pub fn with_constant_robin(self, beta: f64) -> Result<Self> {
        let b = BoundaryFunction::constant(&self.grid, beta);
        self.with_robin(b)
    }
}

/// One evaluation of the trace form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    /// Largest number of poles summed in any family (sine modes per edge on
    /// the square).
    pub level: usize,
    pub tail_bound: f64,
    pub pole_distance: f64,
    /// False when the tail figure is an estimate rather than a bound.
    pub certified: bool,
}

/// Scalar Laurent data of `z ↦ Ě_z[ψ]` at a Dirichlet eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaurentData {
    #[serde(rename = "E")]
    pub pole: f64,
    pub residue: f64,
    pub regular_part: f64,
    /// `(diverges to −∞ from the left, diverges to +∞ from the right)`.
    pub one_sided_limits: (bool, bool),
}

impl LaurentData {
    pub fn removable(&self) -> bool {
        !self.one_sided_limits.0
    }
}

fn same_domain(spec: &TraceFormSpec, f: &BoundaryFunction) -> Result<()> {
    check_domain(spec.domain, f.domain)
}

/// Per-family weights `Σ a^φ a^ψ` over the members of each angular family.
fn family_weights(spec: &TraceFormSpec, phi: &BoundaryFunction, psi: &BoundaryFunction) -> Vec<(u32, f64)> {
    let a = phi.basis_coeffs();
    let b = psi.basis_coeffs();
    let kmax = spec.grid.max_mode() as u32;
    let scale = (phi.coeff_norm_squared() * psi.coeff_norm_squared()).sqrt();
    let mut out = Vec::new();
    for f in 0..=kmax {
        let w: f64 = match spec.domain {
            DomainId::Disc => {
                let mut w = a[trig_index(f, false)] * b[trig_index(f, false)];
                if f > 0 {
                    w += a[trig_index(f, true)] * b[trig_index(f, true)];
                }
                w
            }
            _ => (-(f as i32)..=f as i32).map(|l| a[sph_index(f, l)] * b[sph_index(f, l)]).sum(),
        };
        // families the data do not touch would only add rounding noise
        if w.abs() > 1e-14 * scale {
            out.push((f, w));
        }
    }
    out
}

/// `Ě_z(φ, ψ)`, the bilinear singular trace form.
///
/// Disc and ball: `Σ_families w_f Ě_f(z)` with `w_f` the coefficient
/// products in the family and each branch summed as a Mittag-Leffler series
/// with certified tail. Square: closed-form z-harmonic pairings, with the
/// change between two truncations reported as an (uncertified) estimate.
pub fn eval_form(spec: &TraceFormSpec, z: Complex64, phi: &BoundaryFunction, psi: &BoundaryFunction) -> Result<EvalResult> {
    same_domain(spec, phi)?;
    same_domain(spec, psi)?;
    let pole_distance = nearest_pole(spec.domain, z)?;
    match spec.domain {
        DomainId::Square => {
            let radius = POLE_RADIUS * z.norm().max(1.0);
            if pole_distance <= radius {
                return Err(DtnError::PoleProximity { z: z.re, pole: z.re, radius });
            }
            let (value, estimate) = square_form_with_estimate(z, phi, psi);
            Ok(EvalResult {
                value,
                level: crate::domains::SQUARE_MODES,
                tail_bound: estimate,
                pole_distance,
                certified: false,
            })
        }
        _ => {
            let mut value = Complex64::new(0.0, 0.0);
            let mut tail = 0.0;
            let mut level = 0;
            for (family, w) in family_weights(spec, phi, psi) {
                let s = branch_series(spec.domain, family, z, spec.tolerance, spec.l_max)?;
                value += w * s.value;
                tail += w.abs() * s.tail_bound;
                level = level.max(s.level);
            }
            Ok(EvalResult { value, level, tail_bound: tail, pole_distance, certified: true })
        }
    }
}

/// One branch of the disc (`k`) or ball (`n`) as an evaluation result.
pub fn branch_eval(spec: &TraceFormSpec, family: u32, z: Complex64) -> Result<EvalResult> {
    let pole_distance = nearest_pole(spec.domain, z)?;
    let s = branch_series(spec.domain, family, z, spec.tolerance, spec.l_max)?;
    Ok(EvalResult {
        value: s.value,
        level: s.level,
        tail_bound: s.tail_bound,
        pole_distance,
        certified: true,
    })
}

/// Ball branch `n + Σ_k 2z/(z − j_{nk}²)`.
pub fn ball_branch(n: u32, z: Complex64) -> Result<EvalResult> {
    let spec = TraceFormSpec::new(DomainId::Ball, 8)?;
    branch_eval(&spec, n, z)
}

/// Residue `E² Σ_l g_l²` and regular part of `Ě_z[ψ]` at `mode.energy`.
///
/// The regular part is the symmetric average `(Ě_{E+h} + Ě_{E−h})/2`, which
/// cancels the pole term exactly and leaves an `O(h²)` error.
pub fn laurent_data(spec: &TraceFormSpec, mode: &DirichletMode, psi: &BoundaryFunction) -> Result<LaurentData> {
    check_domain(mode.domain, spec.domain)?;
    let e = mode.energy;
    let mut residue = 0.0;
    for member in 0..mode.multiplicity {
        let g = coupling(mode, member, psi)?;
        residue += (e * g).powi(2);
    }
    let h = 1e-5 * e.max(1.0);
    let up = eval_form(spec, Complex64::new(e + h, 0.0), psi, psi)?.value.re;
    let down = eval_form(spec, Complex64::new(e - h, 0.0), psi, psi)?.value.re;
    let regular_part = 0.5 * (up + down);
    let scale = psi.norm_squared().max(f64::MIN_POSITIVE) * e.max(1.0);
    let singular = residue > 1e-12 * scale;
    Ok(LaurentData { pole: e, residue, regular_part, one_sided_limits: (singular, singular) })
}

/// Upper bound on the tail `|Σ_{l>L} 2z/(z − j_l²)|` of one branch family.
pub fn tail_bound(spec: &TraceFormSpec, z: Complex64, family: u32, level: usize) -> Result<f64> {
    raw_tail_bound(family_order(spec.domain, family)?, z, level)
}

/// The first `n` functions of the domain's orthonormal boundary basis:
/// Fourier modes on the circle, real spherical harmonics on the sphere,
/// and per-edge sines `√2 sin(kπs)` (k-major, edges in order) on the square.
pub fn default_basis(spec: &TraceFormSpec, n: usize) -> Vec<BoundaryFunction> {
    let g = &spec.grid;
    let mut out = Vec::with_capacity(n);
    match spec.domain {
        DomainId::Disc => {
            out.push(BoundaryFunction::fourier(g, 0, false));
            let mut k = 1;
            while out.len() < n {
                out.push(BoundaryFunction::fourier(g, k, false));
                out.push(BoundaryFunction::fourier(g, k, true));
                k += 1;
            }
        }
        DomainId::Ball => {
            let mut deg = 0u32;
            while out.len() < n {
                for l in -(deg as i32)..=deg as i32 {
                    out.push(BoundaryFunction::spherical_harmonic(g, deg, l));
                }
                deg += 1;
            }
        }
        DomainId::Square => {
            let mut k = 1;
            while out.len() < n {
                for e in Edge::ALL {
                    out.push(BoundaryFunction::edge_sine(g, e, k));
                }
                k += 1;
            }
        }
    }
    out.truncate(n);
    out
}

/// Symmetric matrix `Ě_λ(b_i, b_j)` on an orthonormal basis.
pub fn galerkin_matrix(spec: &TraceFormSpec, lambda: f64, basis: &[BoundaryFunction]) -> Result<DMatrix<f64>> {
    let n = basis.len();
    for i in 0..n {
        for j in 0..=i {
            let want = if i == j { 1.0 } else { 0.0 };
            let got = basis[i].inner(&basis[j]);
            if (got - want).abs() > 1e-10 {
                return Err(DtnError::InvalidArgument(format!(
                    "basis is not orthonormal on the grid: <b{i}, b{j}> = {got}"
                )));
            }
        }
    }
    let z = Complex64::new(lambda, 0.0);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = eval_form(spec, z, &basis[i], &basis[j])?.value.re;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Eigenvalues of the Galerkin matrix on the first `n` functions of the
/// default basis, increasing.
pub fn galerkin_eigenvalues(spec: &TraceFormSpec, lambda: f64, n: usize) -> Result<Vec<f64>> {
    let basis = default_basis(spec, n);
    let m = galerkin_matrix(spec, lambda, &basis)?;
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Solve `branch(λ) = target` on the open interval `(lo, hi)` between two
/// consecutive poles (`lo = −∞` allowed), using the strict decrease of
/// every branch between poles.
pub fn branch_solve(branch: impl Fn(f64) -> Result<f64>, target: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(DtnError::InvalidArgument(format!("empty interval ({lo}, {hi})")));
    }
    let tol = 1e-9 * target.abs().max(1.0);
    let width = if lo.is_finite() { hi - lo } else { hi.abs().max(1.0) };
    let mut delta = 1e-7 * width;
    // right end: the branch must fall below the target
    let mut b = hi - delta;
    let mut fb = branch(b)? - target;
    while fb > 0.0 && delta > 1e-15 * hi.abs().max(1.0) {
        delta *= 0.1;
        b = hi - delta;
        fb = branch(b)? - target;
    }
    // left end: the branch must rise above the target
    let mut a;
    let mut fa;
    if lo.is_finite() {
        let mut d = 1e-7 * width;
        a = lo + d;
        fa = branch(a)? - target;
        while fa < 0.0 && d > 1e-15 * lo.abs().max(1.0) {
            d *= 0.1;
            a = lo + d;
            fa = branch(a)? - target;
        }
    } else {
        let mut step = 1.0;
        a = hi - step;
        fa = branch(a)? - target;
        while fa < 0.0 && step < 1e12 {
            step *= 4.0;
            a = hi - step;
            fa = branch(a)? - target;
        }
    }
    if fa < 0.0 || fb > 0.0 {
        return Err(DtnError::Bracketing { lo: a, hi: b });
    }
    if fa.abs() <= tol {
        return Ok(a);
    }
    if fb.abs() <= tol {
        return Ok(b);
    }
    // Illinois false position, falling back to bisection when it stalls
    let mut side = 0i8;
    for _ in 0..500 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = branch(c)? - target;
        if fc.abs() <= tol || (b - a) <= 4.0 * f64::EPSILON * c.abs().max(1.0) {
            return Ok(c);
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Err(DtnError::Bracketing { lo: a, hi: b })
}

/// Robin form `Q̌_z(φ, ψ) = Ě_z(φ, ψ) + ∫_Γ β φ ψ dS`.
pub fn robin_form(spec: &TraceFormSpec, z: Complex64, phi: &BoundaryFunction, psi: &BoundaryFunction) -> Result<EvalResult> {
    let beta = spec
        .robin_beta
        .as_ref()
        .ok_or_else(|| DtnError::InvalidArgument("robin_form needs a Robin coefficient".into()))?;
    let mut r = eval_form(spec, z, phi, psi)?;
    let b = beta.evaluator();
    let f = phi.evaluator();
    let shift = psi.refined_integral(move |p| b(p) * f(p));
    r.value += shift;
    Ok(r)
}

/// One row of a branch sweep; `result` is `None` inside the pole exclusion
/// radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub z: f64,
    pub branch: u32,
    pub result: Option<EvalResult>,
    pub pole: Option<f64>,
}

/// Evaluate one branch at each `z`, marking pole hits instead of failing.
pub fn branch_sweep(spec: &TraceFormSpec, family: u32, zs: &[f64]) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    zs.par_iter()
        .map(|&z| match branch_eval(spec, family, Complex64::new(z, 0.0)) {
            Ok(r) => Ok(SweepRow { z, branch: family, result: Some(r), pole: None }),
            Err(DtnError::PoleProximity { pole, .. }) => Ok(SweepRow { z, branch: family, result: None, pole: Some(pole) }),
            Err(e) => Err(e),
        })
        .collect()
}
