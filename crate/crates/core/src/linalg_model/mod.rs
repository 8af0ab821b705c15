//! Finite-dimensional realisation of the abstract theory.
//!
//! `ℋ = ℝⁿ` with the Euclidean inner product, `ℋ_aux = ℝᵐ` with counting
//! measure, a positive semidefinite form `E` and a surjective trace map `J`.
//! Every object of the abstract construction (ker J, harmonic space, Dirichlet
//! operator, Poisson operator, trace form) is an explicit array here.
//!
//! `ker J` cannot be dense in finite dimensions, so with `P` the orthogonal
//! projection onto `ker J` the representation formula carries the extra term
//! `-λ‖(I − P)Πψ‖²`, which vanishes in the infinite-dimensional setting.

mod random;
mod suite;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{DtnError, Result};

pub use random::{m_matrix_model, random_model, random_model_with, random_psi};
pub use suite::{poisson_min_entry, run_suite, Check, ModelReport};

/// Relative distance to `σ(L_D)` treated as a pole.
pub const POLE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteModel {
    pub form: DMatrix<f64>,
    pub trace: DMatrix<f64>,
    pub seed: Option<u64>,
}

/// Serialised model: row-major arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
    #[serde(rename = "J")]
    pub j: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FiniteModel {
    /// Validate and build. `E` must be symmetric positive semidefinite and `J`
    /// must have full row rank.
    pub fn new(form: DMatrix<f64>, trace: DMatrix<f64>) -> Result<Self> {
        let n = form.nrows();
        if form.ncols() != n || trace.ncols() != n {
            return Err(DtnError::InvalidArgument(format!(
                "E is {}x{} and J is {}x{}; need E n×n and J m×n",
                form.nrows(),
                form.ncols(),
                trace.nrows(),
                trace.ncols()
            )));
        }
        let m = trace.nrows();
        if m == 0 || m > n {
            return Err(DtnError::InvalidArgument(format!("need 1 ≤ m ≤ n, got m = {m}, n = {n}")));
        }
        let norm = form.norm().max(1.0);
        if (&form - form.transpose()).amax() > 1e-12 * norm {
            return Err(DtnError::InvalidArgument("E is not symmetric".into()));
        }
        let lowest = form.clone().symmetric_eigenvalues().min();
        if lowest < -1e-12 * norm {
            return Err(DtnError::InvalidArgument(format!("E is not positive semidefinite (eigenvalue {lowest:e})")));
        }
        let sv = trace.clone().singular_values();
        if sv.min() <= 1e-12 * sv.max().max(1.0) {
            return Err(DtnError::InvalidArgument("J does not have full row rank".into()));
        }
        Ok(FiniteModel { form, trace, seed: None })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        self.form.nrows()
    }

    pub fn m(&self) -> usize {
        self.trace.nrows()
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            n: self.n(),
            m: self.m(),
            e: row_major(&self.form),
            j: row_major(&self.trace),
            seed: self.seed,
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        if file.e.len() != file.n * file.n || file.j.len() != file.m * file.n {
            return Err(DtnError::InvalidArgument(format!(
                "array sizes {} and {} do not match n = {}, m = {}",
                file.e.len(),
                file.j.len(),
                file.n,
                file.m
            )));
        }
        let model = FiniteModel::new(
            DMatrix::from_row_slice(file.n, file.n, &file.e),
            DMatrix::from_row_slice(file.m, file.n, &file.j),
        )?;
        Ok(FiniteModel { seed: file.seed, ..model })
    }

    /// Same model with `E` shifted by `c·I`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let n = self.n();
        let mut out = FiniteModel::new(&self.form + DMatrix::identity(n, n) * c, self.trace.clone())?;
        out.seed = self.seed;
        Ok(out)
    }

    pub fn scale(&self) -> f64 {
        self.form.norm().max(1.0)
    }
}

fn row_major(a: &DMatrix<f64>) -> Vec<f64> {
    a.transpose().as_slice().to_vec()
}

/// Harmonic decomposition `ℝⁿ = H_har ⊕ ker J` with everything derived
/// from it.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Orthonormal basis of ker J, n×(n−m).
    pub kernel: DMatrix<f64>,
    /// Basis of H_har (the columns of Π), n×m.
    pub harmonic: DMatrix<f64>,
    /// Smallest singular value of `[harmonic | kernel]`.
    pub rank_margin: f64,
    /// Dirichlet compression `KᵀEK`.
    pub dirichlet: DMatrix<f64>,
    /// Eigenvalues of `L_D`, increasing.
    pub energies: Vec<f64>,
    /// Eigenvectors of `L_D` in ℝⁿ, columns, orthonormal.
    pub modes: DMatrix<f64>,
    /// Poisson operator Π, n×m.
    pub poisson: DMatrix<f64>,
    /// Minimum-norm right inverse `J⁺`, n×m.
    pub lift: DMatrix<f64>,
}

/// Orthonormal basis of ker J from an orthogonal factorisation of `Jᵀ`.
fn kernel_basis(trace: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = trace.shape();
    let q = trace.transpose().qr().q();
    if m == n {
        return DMatrix::zeros(n, 0);
    }
    // I − QQᵀ has eigenvalues 0 (m times) and 1 (n−m times), well separated
    let proj = DMatrix::identity(n, n) - &q * q.transpose();
    let eig = SymmetricEigen::new(proj);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]));
    let cols: Vec<DVector<f64>> = idx[..n - m].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

/// Sorted eigen-decomposition of a symmetric array.
pub fn sorted_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|x, y| eig.eigenvalues[*x].total_cmp(&eig.eigenvalues[*y]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<f64>> = idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (values, DMatrix::from_columns(&cols))
}

/// Split `ℝⁿ` into the harmonic space and `ker J`. Fails when 0 is an
/// eigenvalue of the Dirichlet operator.
pub fn decompose(model: &FiniteModel) -> Result<Decomposition> {
    let n = model.n();
    let e = &model.form;
    let kernel = kernel_basis(&model.trace);
    let dirichlet = kernel.transpose() * e * &kernel;
    let (energies, coords) = sorted_eigen(&dirichlet);
    if let Some(e0) = energies.first() {
        if e0.abs() <= 1e-12 * model.scale() {
            return Err(DtnError::Decomposition(format!(
                "0 is an eigenvalue of the Dirichlet operator (lowest {e0:e})"
            )));
        }
    }
    let modes = &kernel * coords;
    let jjt = &model.trace * model.trace.transpose();
    let lift = model.trace.transpose()
        * jjt
            .cholesky()
            .ok_or_else(|| DtnError::Decomposition("J Jᵀ is not positive definite".into()))?
            .inverse();
    let poisson = if kernel.ncols() == 0 {
        lift.clone()
    } else {
        let rhs = kernel.transpose() * e * &lift;
        let c = dirichlet
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| DtnError::Decomposition("Dirichlet compression is singular".into()))?;
        &lift - &kernel * c
    };
    let mut joined = DMatrix::zeros(n, n);
    joined.columns_mut(0, model.m()).copy_from(&poisson);
    joined.columns_mut(model.m(), n - model.m()).copy_from(&kernel);
    let rank_margin = joined.singular_values().min();
    if rank_margin <= 1e-12 {
        return Err(DtnError::Decomposition(format!(
            "harmonic space and ker J are not complementary (margin {rank_margin:e})"
        )));
    }
    Ok(Decomposition {
        harmonic: poisson.clone(),
        kernel,
        rank_margin,
        dirichlet,
        energies,
        modes,
        poisson,
        lift,
    })
}

/// `Ě_λ[ψ]` computed three ways.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThreeWay {
    /// Stationary value of `vᵀ(E − λ)v` on `{Jv = ψ}`.
    pub dirichlet_principle: f64,
    /// Representation formula.
    pub representation: f64,
    /// Partial-fraction sum over the Dirichlet spectrum.
    pub mittag_leffler: f64,
    /// True when `E − λ` is indefinite on ker J, so the first value is a
    /// critical value rather than a minimum.
    pub indefinite: bool,
}

impl ThreeWay {
    pub fn max_gap(&self) -> f64 {
        let a = (self.dirichlet_principle - self.representation).abs();
        let b = (self.dirichlet_principle - self.mittag_leffler).abs();
        let c = (self.representation - self.mittag_leffler).abs();
        a.max(b).max(c)
    }
}

impl Decomposition {
    fn check_pole(&self, lambda: f64, scale: f64) -> Result<()> {
        for &e in &self.energies {
            if (lambda - e).abs() <= POLE_EPS * scale {
                return Err(DtnError::PoleProximity { z: lambda, pole: e, radius: POLE_EPS * scale });
            }
        }
        Ok(())
    }

    /// `Ě[ψ] = ℰ[Πψ]`.
    pub fn trace_energy(&self, model: &FiniteModel, psi: &DVector<f64>) -> f64 {
        let u = &self.poisson * psi;
        u.dot(&(&model.form * &u))
    }

    /// Stationary point of `vᵀ(E − λ)v` on `{Jv = ψ}` by null-space reduction.
    pub fn stationary_lift(&self, model: &FiniteModel, lambda: f64, psi: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_pole(lambda, model.scale())?;
        let n = model.n();
        let shifted = &model.form - DMatrix::identity(n, n) * lambda;
        let base = &self.lift * psi;
        if self.kernel.ncols() == 0 {
            return Ok(base);
        }
        let reduced = self.kernel.transpose() * &shifted * &self.kernel;
        let rhs = -(self.kernel.transpose() * &shifted * &base);
        let c = reduced
            .lu()
            .solve(&rhs)
            .ok_or_else(|| DtnError::Decomposition("reduced system is singular".into()))?;
        Ok(base + &self.kernel * c)
    }

    /// Components `(Πψ, u_k)`.
    pub fn couplings(&self, psi: &DVector<f64>) -> DVector<f64> {
        self.modes.transpose() * (&self.poisson * psi)
    }

    /// `‖(I − P)Πψ‖²`.
    fn off_kernel(&self, psi: &DVector<f64>) -> f64 {
        let u = &self.poisson * psi;
        let pu = &self.kernel * (self.kernel.transpose() * &u);
        (u - pu).norm_squared()
    }

    pub fn three_way(&self, model: &FiniteModel, lambda: f64, psi: &DVector<f64>) -> Result<ThreeWay> {
        let n = model.n();
        let v = self.stationary_lift(model, lambda, psi)?;
        let shifted = &model.form - DMatrix::identity(n, n) * lambda;
        let dirichlet_principle = v.dot(&(&shifted * &v));

        let base = self.trace_energy(model, psi) - lambda * self.off_kernel(psi);
        let representation = if self.kernel.ncols() == 0 {
            base
        } else {
            let c = self.kernel.transpose() * (&self.poisson * psi);
            let k = self.dirichlet.nrows();
            let resolvent_c = (&self.dirichlet - DMatrix::identity(k, k) * lambda)
                .lu()
                .solve(&c)
                .ok_or_else(|| DtnError::Decomposition("L_D − λ is singular".into()))?;
            base - lambda * (&self.dirichlet * resolvent_c).dot(&c)
        };
        let coup = self.couplings(psi);
        let mittag_leffler = base
            + lambda
                * self
                    .energies
                    .iter()
                    .zip(coup.iter())
                    .map(|(e, c)| e / (lambda - e) * c * c)
                    .sum::<f64>();
        let indefinite = self.energies.first().is_some_and(|e0| lambda > *e0);
        Ok(ThreeWay { dirichlet_principle, representation, mittag_leffler, indefinite })
    }

    /// `Πψ + λ(L_D − λ)⁻¹PΠψ`, the minimiser predicted by the theory.
    pub fn predicted_lift(&self, lambda: f64, psi: &DVector<f64>) -> DVector<f64> {
        let u = &self.poisson * psi;
        let coup = self.modes.transpose() * &u;
        let mut out = u;
        for (k, (&e, c)) in self.energies.iter().zip(coup.iter()).enumerate() {
            out += self.modes.column(k) * (lambda * c / (e - lambda));
        }
        out
    }

    /// Symmetric `m×m` array of `Ě_λ` in the coordinate basis.
    pub fn generator(&self, model: &FiniteModel, lambda: f64) -> Result<DMatrix<f64>> {
        self.check_pole(lambda, model.scale())?;
        let n = model.n();
        let m = model.m();
        let shifted = &model.form - DMatrix::identity(n, n) * lambda;
        let mut lifts = DMatrix::zeros(n, m);
        for i in 0..m {
            let mut e = DVector::zeros(m);
            e[i] = 1.0;
            lifts.set_column(i, &self.stationary_lift(model, lambda, &e)?);
        }
        let g = lifts.transpose() * shifted * lifts;
        Ok((&g + g.transpose()) * 0.5)
    }
}

/// Analytic derivative of `λ ↦ Ě_λ[ψ]` with a central-difference oracle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivativeCheck {
    /// `−‖L_D(L_D − λ)⁻¹PΠψ‖² − ‖(I − P)Πψ‖²`.
    pub analytic: f64,
    pub finite_difference: f64,
    pub step: f64,
    /// `−‖L_D^{1/2}(L_D − λ)⁻¹PΠψ‖²`, the stated form, for comparison.
    pub stated: f64,
}

impl DerivativeCheck {
    pub fn relative_error(&self) -> f64 {
        (self.analytic - self.finite_difference).abs() / self.analytic.abs().max(1e-300)
    }
}

pub fn derivative_check(model: &FiniteModel, dec: &Decomposition, lambda: f64, psi: &DVector<f64>) -> Result<DerivativeCheck> {
    let gap = dec
        .energies
        .iter()
        .map(|e| (e - lambda).abs())
        .fold(f64::INFINITY, f64::min)
        .min(model.scale());
    let coup = dec.couplings(psi);
    let mut analytic = -dec.off_kernel(psi);
    let mut stated = 0.0;
    for (&e, c) in dec.energies.iter().zip(coup.iter()) {
        analytic -= (e * c / (e - lambda)).powi(2);
        stated -= e * (c / (e - lambda)).powi(2);
    }
    let h = 1e-6 * gap;
    let f = |l: f64| dec.three_way(model, l, psi).map(|t| t.representation);
    let finite_difference = (f(lambda + h)? - f(lambda - h)?) / (2.0 * h);
    Ok(DerivativeCheck { analytic, finite_difference, step: h, stated })
}

/// Residue at an eigenvalue of `L_D` from eigen-data and as a numeric limit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LaurentCheck {
    #[serde(rename = "E")]
    pub energy: f64,
    /// `E²Σ_{E_k = E}(Πψ, u_k)²`.
    pub residue_formula: f64,
    /// `(z − E)Ě_z[ψ]` at `z = E ± δ`, symmetrised and Richardson-extrapolated
    /// in δ.
    pub numeric_limit: f64,
    pub delta: f64,
    /// Estimate of the regular part at E.
    pub regular_part: f64,
    /// Signs of `Ě_λ[ψ]` just left and right of E.
    pub left_sign: f64,
    pub right_sign: f64,
}

pub fn laurent_check(model: &FiniteModel, dec: &Decomposition, index: usize, psi: &DVector<f64>) -> Result<LaurentCheck> {
    let energy = *dec
        .energies
        .get(index)
        .ok_or_else(|| DtnError::InvalidArgument(format!("no Dirichlet eigenvalue with index {index}")))?;
    let tol = 1e-9 * model.scale();
    let coup = dec.couplings(psi);
    let mut residue_formula = 0.0;
    let mut gap = f64::INFINITY;
    for (&e, c) in dec.energies.iter().zip(coup.iter()) {
        if (e - energy).abs() <= tol {
            residue_formula += energy * energy * c * c;
        } else {
            gap = gap.min((e - energy).abs());
        }
    }
    if !gap.is_finite() {
        gap = energy.abs().max(1.0);
    }
    let delta = 1e-5 * gap;
    let f = |l: f64| dec.three_way(model, l, psi).map(|t| t.representation);
    let sym = |d: f64| -> Result<(f64, f64, f64)> {
        let (r, l) = (f(energy + d)?, f(energy - d)?);
        Ok((0.5 * d * (r - l), l, r))
    };
    let (g1, left, right) = sym(delta)?;
    let (g2, _, _) = sym(0.5 * delta)?;
    let numeric_limit = (4.0 * g2 - g1) / 3.0;
    Ok(LaurentCheck {
        energy,
        residue_formula,
        numeric_limit,
        delta,
        regular_part: 0.5 * (left + right),
        left_sign: left.signum(),
        right_sign: right.signum(),
    })
}

/// Beurling–Deny test of the semigroup `exp(−tĽ_λ)` on `ℝᵐ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorPositivity {
    pub lambda: f64,
    pub is_pp: bool,
    pub offdiag_max: f64,
    /// Coordinates of the largest off-diagonal entry.
    pub witness: (usize, usize),
    /// Most negative entry of `exp(−tĽ_λ)` over the sampled times.
    pub exp_min: f64,
    pub sampled_times: Vec<f64>,
    /// Off-diagonal test and exponential sampling agree.
    pub consistent: bool,
}

pub const SEMIGROUP_TIMES: [f64; 3] = [0.1, 1.0, 10.0];

pub fn generator_positivity(model: &FiniteModel, dec: &Decomposition, lambda: f64) -> Result<GeneratorPositivity> {
    let g = dec.generator(model, lambda)?;
    let m = g.nrows();
    let mut offdiag_max = f64::NEG_INFINITY;
    let mut witness = (0, 0);
    for i in 0..m {
        for j in 0..m {
            if i != j && g[(i, j)] > offdiag_max {
                offdiag_max = g[(i, j)];
                witness = (i, j);
            }
        }
    }
    if m == 1 {
        offdiag_max = 0.0;
    }
    let norm = g.norm().max(1.0);
    let is_pp = offdiag_max <= 1e-12 * norm;
    // small times expose a positive off-diagonal entry at first order in t
    let mut sampled_times: Vec<f64> = SEMIGROUP_TIMES.to_vec();
    sampled_times.push(1e-3 / norm);
    let mut exp_min = f64::INFINITY;
    for &t in &sampled_times {
        let s = (&g * -t).exp();
        exp_min = exp_min.min(s.min());
    }
    let exp_ok = exp_min >= -1e-10;
    Ok(GeneratorPositivity {
        lambda,
        is_pp,
        offdiag_max,
        witness,
        exp_min,
        sampled_times,
        consistent: exp_ok == is_pp,
    })
}
