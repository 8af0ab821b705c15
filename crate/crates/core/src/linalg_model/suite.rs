use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{decompose, derivative_check, generator_positivity, laurent_check, random_psi, FiniteModel};
use crate::error::Result;

/// One named residual against its tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), residual, tolerance, pass: residual <= tolerance }
    }

    /// A check that holds when `flag` is true; residual 0 or 1.
    fn flag(name: impl Into<String>, flag: bool) -> Self {
        Check::new(name, if flag { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelReport {
    pub n: usize,
    pub m: usize,
    pub seed: Option<u64>,
    pub dirichlet_spectrum: Vec<f64>,
    pub rank_margin: f64,
    /// Π, row-major n×m.
    pub poisson: Vec<f64>,
    /// Orthonormal basis of ker J, row-major n×(n−m).
    pub kernel: Vec<f64>,
    pub checks: Vec<Check>,
    /// Sample points where `E − λ` is indefinite on ker J.
    pub indefinite_points: usize,
    pub pass: bool,
}

impl ModelReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Sample λ values: two below the Dirichlet spectrum, the midpoint of every
/// gap between distinct eigenvalues, and one above.
fn gap_points(energies: &[f64], scale: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let Some(&e0) = energies.first() else {
        return vec![-1.0, 0.0, 1.0];
    };
    out.push(-1.0);
    out.push(0.5 * e0);
    for w in energies.windows(2) {
        if w[1] - w[0] > 1e-6 * scale {
            out.push(0.5 * (w[0] + w[1]));
        }
    }
    out.push(energies[energies.len() - 1] + 1.0);
    out
}

fn row_major(a: &DMatrix<f64>) -> Vec<f64> {
    a.transpose().as_slice().to_vec()
}

/// Every finite-model identity for one model, with random data drawn from
/// `rng`.
pub fn run_suite(model: &FiniteModel, rng: &mut ChaCha8Rng) -> Result<ModelReport> {
    let dec = decompose(model)?;
    let (n, m) = (model.n(), model.m());
    let scale_e = model.scale();
    let mut checks = Vec::new();

    checks.push(Check::new("direct sum margin", 1e-10 / dec.rank_margin.max(1e-300), 1.0));

    let jp = &model.trace * &dec.poisson;
    checks.push(Check::new("J Π = I", (jp - DMatrix::identity(m, m)).amax(), 1e-11 * scale_e));
    let harmonic_residual = (dec.kernel.transpose() * &model.form * &dec.poisson).amax();
    checks.push(Check::new("Π lands in H_har", harmonic_residual, 1e-11 * scale_e));
    let inverse = (&dec.poisson * (&model.trace * &dec.harmonic) - &dec.harmonic).amax();
    checks.push(Check::new("Π J u = u on H_har", inverse, 1e-11 * scale_e));

    let zero_gen = dec.generator(model, 0.0)?;
    let mut iso = 0.0f64;
    for _ in 0..50 {
        let psi = random_psi(rng, m);
        let u = &dec.poisson * &psi;
        let lhs = psi.dot(&(&zero_gen * &psi)) + psi.norm_squared();
        let rhs = u.dot(&(&model.form * &u)) + (&model.trace * &u).norm_squared();
        iso = iso.max((lhs - rhs).abs() / scale_e.max(psi.norm_squared()));
    }
    checks.push(Check::new("Π isometry", iso, 1e-10));

    let mut three = 0.0f64;
    let mut lift_err = 0.0f64;
    let mut kernel_err = 0.0f64;
    let mut deriv_err = 0.0f64;
    let mut deriv_sign = true;
    let mut indefinite_points = 0;
    let points = gap_points(&dec.energies, scale_e);
    for &lambda in &points {
        let psi = random_psi(rng, m);
        let scale = scale_e.max(psi.norm_squared());
        let t = dec.three_way(model, lambda, &psi)?;
        indefinite_points += usize::from(t.indefinite);
        three = three.max(t.max_gap() / scale);
        let v = dec.stationary_lift(model, lambda, &psi)?;
        lift_err = lift_err.max((&v - dec.predicted_lift(lambda, &psi)).amax() / v.amax().max(1.0));
        let u = &dec.poisson * &psi;
        kernel_err = kernel_err.max((&model.trace * (&v - &u)).amax() / v.amax().max(1.0));
        let d = derivative_check(model, &dec, lambda, &psi)?;
        deriv_err = deriv_err.max(d.relative_error());
        deriv_sign &= d.analytic <= 0.0;
    }
    checks.push(Check::new("three-way agreement", three, 1e-9));
    checks.push(Check::new("minimiser reconstruction", lift_err, 1e-9));
    checks.push(Check::new("lift minus Πψ in ker J", kernel_err, 1e-11 * scale_e));
    checks.push(Check::new("derivative vs central difference", deriv_err, 1e-6));
    checks.push(Check::flag("derivative nonpositive", deriv_sign));

    let mut laurent_err = 0.0f64;
    let mut laurent_signs = true;
    let mut index = 0;
    while index < dec.energies.len() {
        let psi = random_psi(rng, m);
        let l = laurent_check(model, &dec, index, &psi)?;
        let err = if l.residue_formula.abs() <= 1e-12 && l.numeric_limit.abs() <= 1e-12 {
            0.0
        } else {
            (l.numeric_limit - l.residue_formula).abs() / l.residue_formula.abs().max(1e-300)
        };
        laurent_err = laurent_err.max(err);
        if l.residue_formula / l.delta > 10.0 * l.regular_part.abs() {
            laurent_signs &= l.left_sign < 0.0 && l.right_sign > 0.0;
        }
        // skip the rest of a degenerate eigenvalue
        let e = dec.energies[index];
        while index < dec.energies.len() && (dec.energies[index] - e).abs() <= 1e-9 * scale_e {
            index += 1;
        }
    }
    checks.push(Check::new("Laurent limit vs residue", laurent_err, 1e-6));
    checks.push(Check::flag("one-sided divergence signs", laurent_signs));

    let mut bd_consistent = true;
    for &lambda in points.iter().take(5) {
        bd_consistent &= generator_positivity(model, &dec, lambda)?.consistent;
    }
    checks.push(Check::flag("Beurling-Deny off-diagonal vs exponential", bd_consistent));

    if let Some(&e0) = dec.energies.first() {
        let lambda = 0.5 * e0;
        let psi = random_psi(rng, m);
        let v = dec.stationary_lift(model, lambda, &psi)?;
        let shifted = &model.form - DMatrix::identity(n, n) * lambda;
        let best = v.dot(&(&shifted * &v));
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let r = random_psi(rng, dec.kernel.ncols());
            let w: DVector<f64> = &v + &dec.kernel * r;
            worst = worst.max(best - w.dot(&(&shifted * &w)));
        }
        checks.push(Check::new("Dirichlet principle minimality", worst, 1e-10 * scale_e.max(psi.norm_squared())));
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(ModelReport {
        n,
        m,
        seed: model.seed,
        dirichlet_spectrum: dec.energies.clone(),
        rank_margin: dec.rank_margin,
        poisson: row_major(&dec.poisson),
        kernel: row_major(&dec.kernel),
        checks,
        indefinite_points,
        pass,
    })
}

/// Most negative entry of Π for an M-matrix model.
pub fn poisson_min_entry(model: &FiniteModel) -> Result<f64> {
    Ok(decompose(model)?.poisson.min())
}
