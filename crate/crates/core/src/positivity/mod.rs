//! Positivity-preservation certificates for the D-to-N semigroup near
//! Dirichlet eigenvalues.
//!
//! Near an eigenvalue E with eigenspace spanned by `v_l`, the semigroup is
//! p.p. on a left neighbourhood iff `S(ψ) = Σ_l (∫ ∂νv_l ψ⁺)(∫ ∂νv_l ψ⁻) ≥ 0`
//! for every ψ, and on a right neighbourhood iff `S(ψ) ≤ 0` for every ψ.
//! A single ψ can refute a side; only the constant-sign criterion proves one.

mod witness;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{
    check_domain, enumerate_modes, ground_energy, normal_derivative_at, real_sph_harm, trig_mode, BoundaryFunction,
    BoundaryGrid, BoundaryPoint, DirichletMode, DomainId, Edge, ModeLabel,
};
use crate::error::{DtnError, Result};
use crate::traceform::{eval_form, TraceFormSpec};

pub use witness::{
    ball_sign_integral, disc_right_integral, closed_form_checks, square_witness_integrals, square_right_integral, ClosedFormCheck,
};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_DRAWS: usize = 50;

/// Relative size below which a sign sum counts as zero.
const SIGN_EPS: f64 = 1e-9;

/// Positive and negative parts `(ψ⁺, ψ⁻)`, both nonnegative, with the sign
/// changes of ψ registered as kinks for refined quadrature.
pub fn pm_split(psi: &BoundaryFunction) -> (BoundaryFunction, BoundaryFunction) {
    let source = match psi.kink_source() {
        Some(k) => {
            let f = psi.evaluator();
            Arc::new(move |p: &BoundaryPoint| f(p) * k(p)) as crate::domains::Evaluator
        }
        None => psi.evaluator(),
    };
    let tag = psi.closed_form_tag.clone().unwrap_or_else(|| "ψ".into());
    let plus = psi.map(Some(format!("({tag})+")), |v| v.max(0.0)).with_kinks(Arc::clone(&source));
    let minus = psi.map(Some(format!("({tag})-")), |v| (-v).max(0.0)).with_kinks(source);
    (plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
    BelowGround,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::BelowGround => "below-ground",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = DtnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "below-ground" | "below" => Ok(Side::BelowGround),
            other => Err(DtnError::InvalidArgument(format!("unknown side '{other}'"))),
        }
    }
}

/// What one sign sum says about the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideImplication {
    /// `S > 0`: consistent with the left side, refutes the right.
    ViolatesRight,
    /// `S < 0`: consistent with the right side, refutes the left.
    ViolatesLeft,
    /// `S` vanishes to working accuracy; no information.
    Neutral,
}

impl SideImplication {
    pub fn violates(self, side: Side) -> bool {
        matches!((self, side), (SideImplication::ViolatesLeft, Side::Left) | (SideImplication::ViolatesRight, Side::Right))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignTestReport {
    pub mode: DirichletMode,
    pub psi: String,
    /// `∫ ∂νv_l ψ⁺ dS` per member.
    pub plus_integrals: Vec<f64>,
    /// `∫ ∂νv_l ψ⁻ dS` per member, with `ψ⁻ ≥ 0`.
    pub minus_integrals: Vec<f64>,
    #[serde(rename = "S")]
    pub s: f64,
    /// Magnitude below which `S` is treated as zero.
    pub threshold: f64,
    pub side_implication: SideImplication,
}

/// `S(ψ)` for `mode`, with every member integral.
pub fn sign_sum(mode: &DirichletMode, psi: &BoundaryFunction) -> Result<SignTestReport> {
    check_domain(mode.domain, psi.domain)?;
    let grid = &psi.grid;
    for label in &mode.labels {
        if label.boundary_frequency() > grid.max_mode() {
            return Err(DtnError::Resolution {
                resolution: grid.resolution,
                mode: label.boundary_frequency(),
            });
        }
    }
    let (plus, minus) = pm_split(psi);
    let mut plus_integrals = Vec::with_capacity(mode.multiplicity);
    let mut minus_integrals = Vec::with_capacity(mode.multiplicity);
    let mut scale = 0.0;
    for label in &mode.labels {
        plus_integrals.push(plus.refined_integral(|p| normal_derivative_at(label, p)));
        minus_integrals.push(minus.refined_integral(|p| normal_derivative_at(label, p)));
        scale += grid.integrate_fn(|p| normal_derivative_at(label, p).powi(2));
    }
    let s: f64 = plus_integrals.iter().zip(&minus_integrals).map(|(a, b)| a * b).sum();
    let threshold = SIGN_EPS * scale * (plus.norm_squared() * minus.norm_squared()).sqrt();
    let side_implication = if s > threshold {
        SideImplication::ViolatesRight
    } else if s < -threshold {
        SideImplication::ViolatesLeft
    } else {
        SideImplication::Neutral
    };
    Ok(SignTestReport {
        mode: mode.clone(),
        psi: psi.closed_form_tag.clone().unwrap_or_else(|| "ψ".into()),
        plus_integrals,
        minus_integrals,
        s,
        threshold,
        side_implication,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    PP,
    NotPP,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PP => "PP",
            Verdict::NotPP => "NotPP",
            Verdict::Undetermined => "Undetermined",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub mode: DirichletMode,
    pub side: Side,
    pub verdict: Verdict,
    pub reason: String,
    pub witnesses: Vec<SignTestReport>,
}

/// Search settings for `certify`.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub seed: u64,
    pub draws: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: DEFAULT_SEED, draws: DEFAULT_DRAWS }
    }
}

/// Verdict for one side of `mode` with the default search family.
pub fn certify(spec: &TraceFormSpec, mode: &DirichletMode, side: Side) -> Result<PositivityVerdict> {
    certify_with(spec, mode, side, SearchConfig::default())
}

pub fn certify_with(spec: &TraceFormSpec, mode: &DirichletMode, side: Side, config: SearchConfig) -> Result<PositivityVerdict> {
    check_domain(spec.domain, mode.domain)?;
    if side == Side::BelowGround {
        return below_ground_verdict(spec, mode, config);
    }
    let grid = &spec.grid;
    let constant_sign = mode.is_simple() && normal_derivative_constant_sign(&mode.labels[0], grid);
    if side == Side::Left && constant_sign {
        return Ok(PositivityVerdict {
            mode: mode.clone(),
            side,
            verdict: Verdict::PP,
            reason: "simple eigenvalue with normal derivative of constant sign".into(),
            witnesses: Vec::new(),
        });
    }
    for probe in SearchFamily::new(mode, grid, side, config) {
        let report = sign_sum(mode, &probe?)?;
        if report.side_implication.violates(side) {
            return Ok(PositivityVerdict {
                mode: mode.clone(),
                side,
                verdict: Verdict::NotPP,
                reason: format!("witness {} has S = {:e}", report.psi, report.s),
                witnesses: vec![report],
            });
        }
    }
    Ok(PositivityVerdict {
        mode: mode.clone(),
        side,
        verdict: Verdict::Undetermined,
        reason: "no witness in the search family and no structural criterion".into(),
        witnesses: Vec::new(),
    })
}

fn below_ground_verdict(spec: &TraceFormSpec, mode: &DirichletMode, config: SearchConfig) -> Result<PositivityVerdict> {
    let e0 = ground_energy(spec.domain)?;
    let report = below_ground_check_with(spec, 0.5 * e0, config.draws.max(1), config.seed)?;
    let (verdict, reason) = if report.violations == 0 {
        (Verdict::PP, format!("λ < E₀ (structural); {} samples, max Ě_λ(ψ⁺,ψ⁻) = {:e}", report.samples, report.max_value))
    } else {
        (Verdict::Undetermined, format!("{} sampled violations below the ground state", report.violations))
    };
    Ok(PositivityVerdict { mode: mode.clone(), side: Side::BelowGround, verdict, reason, witnesses: Vec::new() })
}

fn normal_derivative_constant_sign(label: &ModeLabel, grid: &BoundaryGrid) -> bool {
    let mut pos = false;
    let mut neg = false;
    for p in &grid.nodes {
        let v = normal_derivative_at(label, p);
        pos |= v > 0.0;
        neg |= v < 0.0;
    }
    !(pos && neg)
}

/// Probe functions tried by `certify`, in order: explicit constructions for the
/// side, then members and shifted-index probes, then piecewise-constant
/// probes (square), then random trigonometric probes. Right-side random
/// probes are projected orthogonally to the eigenspace data, which forces
/// `S = Σ (∫ ∂νv_l ψ⁺)² ≥ 0`.
struct SearchFamily {
    probes: std::vec::IntoIter<Box<dyn FnOnce() -> Result<BoundaryFunction>>>,
}

impl SearchFamily {
    fn new(mode: &DirichletMode, grid: &Arc<BoundaryGrid>, side: Side, config: SearchConfig) -> Self {
        let mut probes: Vec<Box<dyn FnOnce() -> Result<BoundaryFunction>>> = Vec::new();
        let members: Vec<ModeLabel> = mode.labels.clone();
        let project = side == Side::Right;

        for label in &members {
            let (g, l) = (Arc::clone(grid), *label);
            probes.push(Box::new(move || {
                Ok(BoundaryFunction::from_fn(&g, Some(format!("dnu {}", label_name(&l))), move |p| {
                    normal_derivative_at(&l, p)
                }))
            }));
        }
        for f in shifted_probes(mode, grid) {
            probes.push(f);
        }
        if mode.domain == DomainId::Square {
            for a in 0..8 {
                for b in 0..8 {
                    if a != b {
                        let g = Arc::clone(grid);
                        probes.push(Box::new(move || Ok(half_edge_probe(&g, a, b))));
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let top = members.iter().map(|l| l.boundary_frequency()).max().unwrap_or(0) + 3;
        for i in 0..config.draws {
            let coeffs: Vec<f64> = (0..random_len(mode.domain, top)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (g, ms) = (Arc::clone(grid), members.clone());
            let domain = mode.domain;
            probes.push(Box::new(move || {
                let psi = random_probe(&g, domain, top, &coeffs, format!("random #{i}"));
                Ok(if project { project_out(&psi, &ms) } else { psi })
            }));
        }
        SearchFamily { probes: probes.into_iter() }
    }
}

impl Iterator for SearchFamily {
    type Item = Result<BoundaryFunction>;

    fn next(&mut self) -> Option<Self::Item> {
        self.probes.next().map(|f| f())
    }
}

fn label_name(label: &ModeLabel) -> String {
    match *label {
        ModeLabel::Disc { k, l, sine, .. } => format!("disc k={k} l={l} {}", if sine { "sin" } else { "cos" }),
        ModeLabel::Square { m, n } => format!("square ({m},{n})"),
        ModeLabel::Ball { n, k, l, .. } => format!("ball n={n} k={k} l={l}"),
    }
}

/// Explicit probe functions for `mode`.
fn shifted_probes(mode: &DirichletMode, grid: &Arc<BoundaryGrid>) -> Vec<Box<dyn FnOnce() -> Result<BoundaryFunction>>> {
    let mut out: Vec<Box<dyn FnOnce() -> Result<BoundaryFunction>>> = Vec::new();
    let g = Arc::clone(grid);
    match mode.labels[0] {
        ModeLabel::Disc { k, .. } => {
            for j in [k.saturating_sub(1), k + 1, k] {
                for sine in [false, true] {
                    if j == 0 && sine {
                        continue;
                    }
                    let g = Arc::clone(&g);
                    out.push(Box::new(move || Ok(BoundaryFunction::fourier(&g, j, sine))));
                }
            }
        }
        ModeLabel::Square { m, n } => {
            let g1 = Arc::clone(&g);
            out.push(Box::new(move || Ok(square_mixed_psi(&g1))));
            let g2 = Arc::clone(&g);
            out.push(Box::new(move || Ok(square_odd_psi(&g2))));
            let shifted = ModeLabel::Square { m: m + 1, n: n + 1 };
            out.push(Box::new(move || {
                Ok(BoundaryFunction::from_fn(&g, Some(format!("dnu square ({},{})", m + 1, n + 1)), move |p| {
                    normal_derivative_at(&shifted, p)
                }))
            }));
        }
        ModeLabel::Ball { n, .. } => {
            for j in [n + 1, n + 2] {
                for sine in [true, false] {
                    let g = Arc::clone(&g);
                    out.push(Box::new(move || {
                        let tag = format!("{}({j}φ)", if sine { "sin" } else { "cos" });
                        Ok(BoundaryFunction::from_fn(&g, Some(tag), move |p| match p {
                            BoundaryPoint::Sphere { phi, .. } => {
                                if sine {
                                    (j as f64 * phi).sin()
                                } else {
                                    (j as f64 * phi).cos()
                                }
                            }
                            _ => f64::NAN,
                        }))
                    }));
                }
            }
        }
    }
    out
}

/// Square probe with ψ(x,0) = ψ(x,1) = cos πx and ψ(0,y) = ψ(1,y) = y.
pub fn square_mixed_psi(grid: &Arc<BoundaryGrid>) -> BoundaryFunction {
    BoundaryFunction::from_fn(grid, Some("square cos/linear probe".into()), |p| match p {
        BoundaryPoint::Edge { edge, s } => match edge {
            Edge::Bottom | Edge::Top => (PI * s).cos(),
            Edge::Left | Edge::Right => *s,
        },
        _ => f64::NAN,
    })
}

/// Square probe equal to 1 on the bottom and right edges, -1 on the others.
pub fn square_odd_psi(grid: &Arc<BoundaryGrid>) -> BoundaryFunction {
    let psi = BoundaryFunction::from_fn(grid, Some("square ±1 edge probe".into()), |p| match p {
        BoundaryPoint::Edge { edge, .. } => match edge {
            Edge::Bottom | Edge::Right => 1.0,
            Edge::Top | Edge::Left => -1.0,
        },
        _ => f64::NAN,
    });
    let k = psi.evaluator();
    psi.with_kinks(k)
}

/// +1 on half-edge cell `a`, -1 on cell `b`, 0 elsewhere; cells are numbered
/// `2·edge + half`.
fn half_edge_probe(grid: &Arc<BoundaryGrid>, a: usize, b: usize) -> BoundaryFunction {
    let cell = |edge: &Edge, s: f64| 2 * edge.index() + usize::from(s >= 0.5);
    let psi = BoundaryFunction::from_fn(grid, Some(format!("half-edge +{a} -{b}")), move |p| match p {
        BoundaryPoint::Edge { edge, s } => {
            let c = cell(edge, *s);
            if c == a {
                1.0
            } else if c == b {
                -1.0
            } else {
                0.0
            }
        }
        _ => f64::NAN,
    });
    let k = psi.evaluator();
    psi.with_kinks(k)
}

fn random_len(domain: DomainId, top: usize) -> usize {
    match domain {
        DomainId::Disc => 2 * top + 1,
        DomainId::Square => 4 * (top + 1),
        DomainId::Ball => (top + 1) * (top + 1),
    }
}

/// Random trigonometric probe: Fourier modes on the circle, cosines per edge
/// on the square, spherical harmonics on the sphere, all up to `top`.
fn random_probe(grid: &Arc<BoundaryGrid>, domain: DomainId, top: usize, coeffs: &[f64], tag: String) -> BoundaryFunction {
    let c = coeffs.to_vec();
    match domain {
        DomainId::Disc => BoundaryFunction::from_fn(grid, Some(tag), move |p| match p {
            BoundaryPoint::Circle { theta } => {
                let mut v = c[0] * trig_mode(0, false, *theta);
                for k in 1..=top {
                    v += c[2 * k - 1] * trig_mode(k as u32, false, *theta) + c[2 * k] * trig_mode(k as u32, true, *theta);
                }
                v
            }
            _ => f64::NAN,
        }),
        DomainId::Square => BoundaryFunction::from_fn(grid, Some(tag), move |p| match p {
            BoundaryPoint::Edge { edge, s } => {
                let base = edge.index() * (top + 1);
                (0..=top).map(|k| c[base + k] * (k as f64 * PI * s).cos()).sum()
            }
            _ => f64::NAN,
        }),
        DomainId::Ball => BoundaryFunction::from_fn(grid, Some(tag), move |p| match p {
            BoundaryPoint::Sphere { theta, phi } => {
                let mut v = 0.0;
                for n in 0..=top as u32 {
                    for l in -(n as i32)..=(n as i32) {
                        v += c[crate::domains::sph_index(n, l)] * real_sph_harm(n, l, *theta, *phi);
                    }
                }
                v
            }
            _ => f64::NAN,
        }),
    }
}

/// `ψ` minus its L²(Γ) projection onto the normal derivatives of `members`.
fn project_out(psi: &BoundaryFunction, members: &[ModeLabel]) -> BoundaryFunction {
    let grid = &psi.grid;
    let mut out = psi.clone();
    for label in members {
        let l = *label;
        let d = BoundaryFunction::from_fn(grid, None, move |p| normal_derivative_at(&l, p));
        let c = out.inner(&d) / d.norm_squared();
        out = out.combine(1.0, &d, -c);
    }
    out.closed_form_tag = psi.closed_form_tag.as_ref().map(|t| format!("{t} ⟂ eigenspace"));
    out
}

/// Result of sampling `Ě_λ(ψ⁺, ψ⁻)` below the ground state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BelowGroundReport {
    pub domain: DomainId,
    pub lambda: f64,
    pub ground_energy: f64,
    pub samples: usize,
    pub max_value: f64,
    /// Samples with `Ě_λ(ψ⁺, ψ⁻) > tolerance`.
    pub violations: usize,
    pub tolerance: f64,
}

pub const BELOW_GROUND_TOLERANCE: f64 = 1e-9;

/// Sample `Ě_λ(ψ⁺, ψ⁻)` for random trigonometric ψ; p.p. below E₀ means
/// every value is ≤ 0.
pub fn below_ground_check(spec: &TraceFormSpec, lambda: f64, count: usize) -> Result<BelowGroundReport> {
    below_ground_check_with(spec, lambda, count, DEFAULT_SEED)
}

pub fn below_ground_check_with(spec: &TraceFormSpec, lambda: f64, count: usize, seed: u64) -> Result<BelowGroundReport> {
    let e0 = ground_energy(spec.domain)?;
    if !(lambda < e0) {
        return Err(DtnError::InvalidArgument(format!("λ = {lambda} is not below the ground energy {e0}")));
    }
    let top = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Vec<f64>> = (0..count)
        .map(|_| (0..random_len(spec.domain, top)).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut max_value = f64::NEG_INFINITY;
    let mut violations = 0;
    for (i, c) in draws.iter().enumerate() {
        let psi = random_probe(&spec.grid, spec.domain, top, c, format!("random #{i}"));
        let (plus, minus) = pm_split(&psi);
        let v = eval_form(spec, Complex64::new(lambda, 0.0), &plus, &minus)?.value.re;
        max_value = max_value.max(v);
        if v > BELOW_GROUND_TOLERANCE {
            violations += 1;
        }
    }
    Ok(BelowGroundReport {
        domain: spec.domain,
        lambda,
        ground_energy: e0,
        samples: count,
        max_value,
        violations,
        tolerance: BELOW_GROUND_TOLERANCE,
    })
}

/// Left and right verdicts for every mode up to `e_max`.
pub fn certify_table(spec: &TraceFormSpec, e_max: f64, config: SearchConfig) -> Result<Vec<PositivityVerdict>> {
    use rayon::prelude::*;
    let modes = enumerate_modes(spec.domain, e_max)?;
    let jobs: Vec<(DirichletMode, Side)> =
        modes.into_iter().flat_map(|m| [(m.clone(), Side::Left), (m, Side::Right)]).collect();
    jobs.par_iter().map(|(m, s)| certify_with(spec, m, *s, config)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub psi: String,
    #[serde(rename = "S")]
    pub s: f64,
}

/// Flat export record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub domain: DomainId,
    #[serde(rename = "E")]
    pub energy: f64,
    pub labels: Vec<ModeLabel>,
    pub side: Side,
    pub verdict: Verdict,
    pub reason: String,
    pub witness_summary: Vec<WitnessSummary>,
}

impl From<&PositivityVerdict> for VerdictRecord {
    fn from(v: &PositivityVerdict) -> Self {
        VerdictRecord {
            domain: v.mode.domain,
            energy: v.mode.energy,
            labels: v.mode.labels.clone(),
            side: v.side,
            verdict: v.verdict,
            reason: v.reason.clone(),
            witness_summary: v.witnesses.iter().map(|w| WitnessSummary { psi: w.psi.clone(), s: w.s }).collect(),
        }
    }
}

pub fn verdicts_json(verdicts: &[PositivityVerdict]) -> serde_json::Value {
    let records: Vec<VerdictRecord> = verdicts.iter().map(VerdictRecord::from).collect();
    serde_json::to_value(records).expect("verdict records are plain data")
}

/// One row per mode: `domain,E,multiplicity,left,right`.
pub fn verdicts_csv(verdicts: &[PositivityVerdict]) -> String {
    let mut out = String::from("domain,E,multiplicity,left,right\n");
    let mut i = 0;
    while i < verdicts.len() {
        let mode = &verdicts[i].mode;
        let mut left = None;
        let mut right = None;
        while i < verdicts.len() && verdicts[i].mode == *mode {
            match verdicts[i].side {
                Side::Left => left = Some(verdicts[i].verdict),
                Side::Right => right = Some(verdicts[i].verdict),
                Side::BelowGround => {}
            }
            i += 1;
        }
        let show = |v: Option<Verdict>| v.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.16e},{},{},{}\n",
            mode.domain,
            mode.energy,
            mode.multiplicity,
            show(left),
            show(right)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(domain: DomainId, res: usize) -> TraceFormSpec {
        TraceFormSpec::new(domain, res).unwrap()
    }

    #[test]
    fn positive_part_of_sine() {
        let s = spec(DomainId::Disc, 64);
        let psi = BoundaryFunction::from_fn(&s.grid, None, |p| match p {
            BoundaryPoint::Circle { theta } => theta.sin(),
            _ => f64::NAN,
        });
        let (plus, minus) = pm_split(&psi);
        assert!((plus.refined_integral(|_| 1.0) - 2.0).abs() < 1e-12);
        assert!((minus.refined_integral(|_| 1.0) - 2.0).abs() < 1e-12);
        let c3 = BoundaryFunction::fourier(&s.grid, 3, false).scaled(PI.sqrt());
        let (p3, _) = pm_split(&c3);
        assert!((p3.refined_inner(&p3) - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn nonnegative_has_zero_negative_part() {
        let s = spec(DomainId::Disc, 64);
        let psi = BoundaryFunction::constant(&s.grid, 2.0);
        let (_, minus) = pm_split(&psi);
        assert!(minus.samples.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn disc_simple_and_double() {
        let s = spec(DomainId::Disc, 128);
        let modes = enumerate_modes(DomainId::Disc, 30.0).unwrap();
        let simple = modes.iter().find(|m| m.is_simple()).unwrap();
        assert_eq!(certify(&s, simple, Side::Left).unwrap().verdict, Verdict::PP);
        assert_eq!(certify(&s, simple, Side::Right).unwrap().verdict, Verdict::NotPP);
        let double = modes.iter().find(|m| m.multiplicity == 2).unwrap();
        assert_eq!(certify(&s, double, Side::Left).unwrap().verdict, Verdict::NotPP);
        assert_eq!(certify(&s, double, Side::Right).unwrap().verdict, Verdict::NotPP);
    }

    #[test]
    fn own_derivative_is_left_witness() {
        let s = spec(DomainId::Square, 128);
        let mode = enumerate_modes(DomainId::Square, 8.0 * PI * PI + 1.0).unwrap().pop().unwrap();
        let label = mode.labels[0];
        let psi = BoundaryFunction::from_fn(&s.grid, None, move |p| normal_derivative_at(&label, p));
        let r = sign_sum(&mode, &psi).unwrap();
        assert!(r.plus_integrals[0] > 0.0 && r.minus_integrals[0] < 0.0);
        assert_eq!(r.side_implication, SideImplication::ViolatesLeft);
    }

    #[test]
    fn scaling_is_quadratic() {
        let s = spec(DomainId::Disc, 64);
        let modes = enumerate_modes(DomainId::Disc, 30.0).unwrap();
        let psi = BoundaryFunction::fourier(&s.grid, 2, false).combine(1.0, &BoundaryFunction::fourier(&s.grid, 1, true), 0.7);
        for m in &modes {
            let a = sign_sum(m, &psi).unwrap().s;
            let b = sign_sum(m, &psi.scaled(2.0)).unwrap().s;
            assert!((b - 4.0 * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn below_ground_disc() {
        let s = spec(DomainId::Disc, 256);
        for lambda in [0.0, -1.0] {
            let r = below_ground_check(&s, lambda, 10).unwrap();
            assert_eq!(r.violations, 0, "{r:?}");
        }
        assert!(below_ground_check(&s, 10.0, 1).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = spec(DomainId::Disc, 64);
        let v = certify_table(&s, 20.0, SearchConfig { seed: 1, draws: 4 }).unwrap();
        let csv = verdicts_csv(&v);
        assert!(csv.starts_with("domain,E,multiplicity,left,right\n"));
        assert_eq!(csv.lines().count(), 1 + v.len() / 2);
        let json = verdicts_json(&v);
        assert_eq!(json.as_array().unwrap().len(), v.len());
    }
}
