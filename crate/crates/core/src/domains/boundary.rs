use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::grid::{BoundaryGrid, BoundaryPoint, Edge};
use super::DomainId;
use crate::quadrature::{gauss_legendre, piecewise, piecewise_rule, sign_breaks};
use crate::specfun::assoc_legendre;

pub type Evaluator = Arc<dyn Fn(&BoundaryPoint) -> f64 + Send + Sync>;

const REFINED_ORDER: usize = 16;

/// Number of sine modes per edge kept in the square decomposition.
pub const SQUARE_MODES: usize = 160;

/// Square boundary data split into corner values and per-edge sine
/// coefficients `∫_0^1 ψ(s) √2 sin(kπs) ds`, k = 1..=SQUARE_MODES.
#[derive(Debug, Clone)]
pub struct EdgeData {
    /// Corner values at (0,0), (1,0), (1,1), (0,1); the mean of the two edge
    /// limits when the data jump at a corner.
    pub corners: [f64; 4],
    /// Sine coefficients per edge, indexed by `Edge::index()`, entry k-1.
    pub sines: [Vec<f64>; 4],
}

/// A real function on the boundary of a catalog domain.
///
/// The function keeps an exact pointwise evaluator (needed for refining
/// sign changes), its samples on the grid it was built on, and its
/// coefficients in the domain's orthonormal boundary basis (computed lazily): trigonometric
/// modes on the circle, real spherical harmonics on the sphere. The square
/// has no global basis, so `basis_coeffs()` is empty there.
#[derive(Clone)]
pub struct BoundaryFunction {
    pub domain: DomainId,
    pub grid: Arc<BoundaryGrid>,
    pub samples: Vec<f64>,
    coeffs: OnceLock<Vec<f64>>,
    pub closed_form_tag: Option<String>,
    eval: Evaluator,
    /// Function whose sign changes mark kinks of this one (set for positive
    /// and negative parts).
    kinks: Option<Evaluator>,
    rule: OnceLock<Arc<RefinedRule>>,
    edges: OnceLock<Arc<EdgeData>>,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("domain", &self.domain)
            .field("tag", &self.closed_form_tag)
            .field("samples", &self.samples.len())
            .finish()
    }
}

impl BoundaryFunction {
    pub fn from_fn(
        grid: &Arc<BoundaryGrid>,
        tag: Option<String>,
        f: impl Fn(&BoundaryPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_evaluator(grid, tag, Arc::new(f))
    }

    fn from_evaluator(grid: &Arc<BoundaryGrid>, tag: Option<String>, eval: Evaluator) -> Self {
        let samples: Vec<f64> = grid.nodes.iter().map(|p| eval(p)).collect();
        BoundaryFunction {
            domain: grid.domain,
            grid: Arc::clone(grid),
            samples,
            coeffs: OnceLock::new(),
            closed_form_tag: tag,
            eval,
            kinks: None,
            rule: OnceLock::new(),
            edges: OnceLock::new(),
        }
    }

    /// Mark the sign changes of `source` as kinks of this function.
    pub fn with_kinks(mut self, source: Evaluator) -> Self {
        self.kinks = Some(source);
        self.coeffs = OnceLock::new();
        self.rule = OnceLock::new();
        self.edges = OnceLock::new();
        self
    }

    pub fn kink_source(&self) -> Option<Evaluator> {
        self.kinks.clone()
    }

    fn refined_rule(&self) -> &RefinedRule {
        self.rule
            .get_or_init(|| Arc::new(RefinedRule::new(self.domain, self.grid.resolution, self.kinks.as_ref())))
    }

    /// `∫_Γ weight · self dS` by line-wise composite quadrature split at the
    /// kinks of `self`. Exact up to rounding for piecewise-smooth data whose
    /// kinks come from a known sign pattern.
    pub fn refined_integral(&self, weight: impl Fn(&BoundaryPoint) -> f64) -> f64 {
        self.refined_rule().integrate(|p| weight(p) * (self.eval)(p))
    }

    /// Refined `∫_Γ self · other dS`, split at the kinks of both factors.
    pub fn refined_inner(&self, other: &BoundaryFunction) -> f64 {
        match (&self.kinks, &other.kinks) {
            (_, None) => self.refined_integral(|p| other.value(p)),
            (None, Some(_)) => other.refined_integral(|p| self.value(p)),
            (Some(a), Some(b)) => {
                let (a, b) = (Arc::clone(a), Arc::clone(b));
                let joint: Evaluator = Arc::new(move |p| a(p) * b(p));
                let rule = RefinedRule::new(self.domain, self.grid.resolution, Some(&joint));
                rule.integrate(|p| self.value(p) * other.value(p))
            }
        }
    }

    pub fn zero(grid: &Arc<BoundaryGrid>) -> Self {
        Self::from_fn(grid, Some("zero".into()), |_| 0.0)
    }

    pub fn constant(grid: &Arc<BoundaryGrid>, c: f64) -> Self {
        Self::from_fn(grid, Some(format!("constant {c}")), move |_| c)
    }

    /// Orthonormal trigonometric mode on the circle: `1/√(2π)` for k = 0,
    /// `cos(kθ)/√π` or `sin(kθ)/√π` otherwise.
    pub fn fourier(grid: &Arc<BoundaryGrid>, k: u32, sine: bool) -> Self {
        let tag = format!("{}({k}θ)/√π", if sine { "sin" } else { "cos" });
        Self::from_fn(grid, Some(tag), move |p| match p {
            BoundaryPoint::Circle { theta } => trig_mode(k, sine, *theta),
            _ => f64::NAN,
        })
    }

    /// Real spherical harmonic `Y_{n,l}`, cosine type for l >= 0 and sine
    /// type for l < 0.
    pub fn spherical_harmonic(grid: &Arc<BoundaryGrid>, n: u32, l: i32) -> Self {
        Self::from_fn(grid, Some(format!("Y_{n},{l}")), move |p| match p {
            BoundaryPoint::Sphere { theta, phi } => real_sph_harm(n, l, *theta, *phi),
            _ => f64::NAN,
        })
    }

    /// `√2 sin(kπs)` on one edge of the square, zero elsewhere.
    pub fn edge_sine(grid: &Arc<BoundaryGrid>, edge: Edge, k: u32) -> Self {
        Self::from_fn(grid, Some(format!("√2 sin({k}πs) on {edge:?}")), move |p| match p {
            BoundaryPoint::Edge { edge: e, s } if *e == edge => 2f64.sqrt() * (k as f64 * PI * s).sin(),
            _ => 0.0,
        })
    }

    /// Pointwise value.
    pub fn value(&self, p: &BoundaryPoint) -> f64 {
        (self.eval)(p)
    }

    pub fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.eval)
    }

    /// Same function sampled on another grid of the same domain.
    pub fn resample(&self, grid: &Arc<BoundaryGrid>) -> Self {
        let out = Self::from_evaluator(grid, self.closed_form_tag.clone(), Arc::clone(&self.eval));
        match &self.kinks {
            Some(k) => out.with_kinks(Arc::clone(k)),
            None => out,
        }
    }

    pub fn map(&self, tag: Option<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let inner = Arc::clone(&self.eval);
        let out = Self::from_fn(&self.grid, tag, move |p| f(inner(p)));
        match &self.kinks {
            Some(k) => out.with_kinks(Arc::clone(k)),
            None => out,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let tag = self.closed_form_tag.as_ref().map(|t| format!("{c}·{t}"));
        self.map(tag, move |v| c * v)
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &BoundaryFunction, b: f64) -> Self {
        let f = Arc::clone(&self.eval);
        let g = Arc::clone(&other.eval);
        let out = Self::from_fn(&self.grid, None, move |p| a * f(p) + b * g(p));
        match (&self.kinks, &other.kinks) {
            (Some(x), Some(y)) => {
                let (x, y) = (Arc::clone(x), Arc::clone(y));
                out.with_kinks(Arc::new(move |p| x(p) * y(p)))
            }
            (Some(x), None) | (None, Some(x)) => out.with_kinks(Arc::clone(x)),
            (None, None) => out,
        }
    }

    /// `∫_Γ self · other dS` on this function's grid.
    pub fn inner(&self, other: &BoundaryFunction) -> f64 {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.len() == other.grid.len() {
            self.grid.integrate(
                &self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect::<Vec<_>>(),
            )
        } else {
            self.grid.integrate_fn(|p| self.value(p) * other.value(p))
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner(self)
    }

    /// Corner values and edge sine coefficients (square only).
    pub fn edge_data(&self) -> Arc<EdgeData> {
        Arc::clone(self.edges.get_or_init(|| Arc::new(self.decompose_edges())))
    }

    fn decompose_edges(&self) -> EdgeData {
        let val = |edge: Edge, s: f64| (self.eval)(&BoundaryPoint::Edge { edge, s });
        let mean = |a: f64, b: f64| 0.5 * (a + b);
        let corners = [
            mean(val(Edge::Bottom, 0.0), val(Edge::Left, 0.0)),
            mean(val(Edge::Bottom, 1.0), val(Edge::Right, 0.0)),
            mean(val(Edge::Top, 1.0), val(Edge::Right, 1.0)),
            mean(val(Edge::Top, 0.0), val(Edge::Left, 1.0)),
        ];
        let sines = Edge::ALL.map(|edge| {
            let breaks = match &self.kinks {
                Some(g) => sign_breaks(|s| g(&BoundaryPoint::Edge { edge, s }), 0.0, 1.0, 512),
                None => Vec::new(),
            };
            let rule = piecewise_rule(0.0, 1.0, &breaks, 1.0 / (SQUARE_MODES as f64 / 2.0), REFINED_ORDER);
            let mut coeffs = vec![0.0; SQUARE_MODES];
            for (s, w) in rule {
                let v = w * val(edge, s) * 2f64.sqrt();
                // sin(kπs) by the Chebyshev recurrence
                let (s1, c1) = (PI * s).sin_cos();
                let (mut prev, mut cur) = (0.0, s1);
                for c in coeffs.iter_mut() {
                    *c += v * cur;
                    let next = 2.0 * c1 * cur - prev;
                    prev = cur;
                    cur = next;
                }
            }
            coeffs
        });
        EdgeData { corners, sines }
    }

    /// Coefficients in the orthonormal boundary basis, projected on first use.
    pub fn basis_coeffs(&self) -> &[f64] {
        self.coeffs.get_or_init(|| self.project())
    }

    /// Sum of squared basis coefficients (Parseval side of the norm).
    pub fn coeff_norm_squared(&self) -> f64 {
        self.basis_coeffs().iter().map(|c| c * c).sum()
    }
}

/// Orthonormal trigonometric basis element on the circle.
pub fn trig_mode(k: u32, sine: bool, theta: f64) -> f64 {
    if k == 0 {
        if sine {
            0.0
        } else {
            1.0 / (2.0 * PI).sqrt()
        }
    } else if sine {
        (k as f64 * theta).sin() / PI.sqrt()
    } else {
        (k as f64 * theta).cos() / PI.sqrt()
    }
}

/// Index of `(k, sine)` in the flattened circle basis
/// `[1, cos θ, sin θ, cos 2θ, sin 2θ, ...]`.
pub fn trig_index(k: u32, sine: bool) -> usize {
    if k == 0 {
        0
    } else {
        2 * k as usize - 1 + usize::from(sine)
    }
}

/// Index of `Y_{n,l}` in the flattened sphere basis ordered by degree, then
/// `l = -n..=n`.
pub fn sph_index(n: u32, l: i32) -> usize {
    (n * n) as usize + (l + n as i32) as usize
}

/// Normalisation `sqrt((2n+1)/(4π) · (n-l)!/(n+l)!)`.
fn sph_norm(n: u32, l: u32) -> f64 {
    let mut ratio = 1.0;
    for i in (n - l + 1)..=(n + l) {
        ratio /= i as f64;
    }
    ((2 * n + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

/// Real orthonormal spherical harmonic.
pub fn real_sph_harm(n: u32, l: i32, theta: f64, phi: f64) -> f64 {
    let m = l.unsigned_abs();
    let p = assoc_legendre(n, m, theta.cos());
    let norm = sph_norm(n, m);
    if l == 0 {
        norm * p
    } else if l > 0 {
        2f64.sqrt() * norm * p * (m as f64 * phi).cos()
    } else {
        2f64.sqrt() * norm * p * (m as f64 * phi).sin()
    }
}

impl BoundaryFunction {
    fn project(&self) -> Vec<f64> {
        let grid = &self.grid;
        match grid.domain {
            DomainId::Disc => {
                // refined quadrature keeps kinked data (positive parts) accurate
                let kmax = grid.max_mode() as u32;
                let mut out = vec![0.0; 2 * kmax as usize + 1];
                for k in 0..=kmax {
                    for sine in [false, true] {
                        if k == 0 && sine {
                            continue;
                        }
                        out[trig_index(k, sine)] = self.refined_integral(|p| match p {
                            BoundaryPoint::Circle { theta } => trig_mode(k, sine, *theta),
                            _ => 0.0,
                        });
                    }
                }
                out
            }
            DomainId::Ball => {
                // separable transform: azimuthal sums per latitude row, then
                // Legendre sums over rows
                let nmax = grid.max_mode();
                let mut rows: Vec<f64> = Vec::new();
                let mut cos_sums: Vec<Vec<f64>> = Vec::new();
                let mut sin_sums: Vec<Vec<f64>> = Vec::new();
                for ((p, w), v) in grid.nodes.iter().zip(&grid.weights).zip(&self.samples) {
                    let BoundaryPoint::Sphere { theta, phi } = *p else { continue };
                    let r = match rows.iter().position(|t| *t == theta) {
                        Some(r) => r,
                        None => {
                            rows.push(theta);
                            cos_sums.push(vec![0.0; nmax + 1]);
                            sin_sums.push(vec![0.0; nmax + 1]);
                            rows.len() - 1
                        }
                    };
                    for m in 0..=nmax {
                        let (sm, cm) = (m as f64 * phi).sin_cos();
                        cos_sums[r][m] += w * v * cm;
                        sin_sums[r][m] += w * v * sm;
                    }
                }
                let mut out = vec![0.0; (nmax + 1) * (nmax + 1)];
                for (r, &theta) in rows.iter().enumerate() {
                    let t = theta.cos();
                    for n in 0..=nmax as u32 {
                        for m in 0..=n {
                            let base = sph_norm(n, m) * assoc_legendre(n, m, t);
                            if m == 0 {
                                out[sph_index(n, 0)] += base * cos_sums[r][0];
                            } else {
                                let b = 2f64.sqrt() * base;
                                out[sph_index(n, m as i32)] += b * cos_sums[r][m as usize];
                                out[sph_index(n, -(m as i32))] += b * sin_sums[r][m as usize];
                            }
                        }
                    }
                }
                out
            }
            DomainId::Square => Vec::new(),
        }
    }
}

/// One-dimensional lines covering the boundary, each split at known kinks.
#[derive(Debug, Clone)]
struct RefinedRule {
    lines: Vec<Line>,
}

#[derive(Debug, Clone)]
struct Line {
    kind: LineKind,
    breaks: Vec<f64>,
    max_panel: f64,
    /// Extra weight of the line (θ-quadrature weight on the sphere).
    weight: f64,
}

#[derive(Debug, Clone, Copy)]
enum LineKind {
    Circle,
    Edge(Edge),
    Row { theta: f64 },
}

impl LineKind {
    fn span(self) -> (f64, f64) {
        match self {
            LineKind::Edge(_) => (0.0, 1.0),
            _ => (0.0, 2.0 * PI),
        }
    }

    fn point(self, t: f64) -> BoundaryPoint {
        match self {
            LineKind::Circle => BoundaryPoint::Circle { theta: t },
            LineKind::Edge(edge) => BoundaryPoint::Edge { edge, s: t },
            LineKind::Row { theta } => BoundaryPoint::Sphere { theta, phi: t },
        }
    }
}

impl RefinedRule {
    fn new(domain: DomainId, resolution: usize, kinks: Option<&Evaluator>) -> Self {
        let kinds: Vec<(LineKind, f64)> = match domain {
            DomainId::Disc => vec![(LineKind::Circle, 1.0)],
            DomainId::Square => Edge::ALL.iter().map(|&e| (LineKind::Edge(e), 1.0)).collect(),
            DomainId::Ball => {
                let (t, w) = gauss_legendre(resolution);
                t.iter().zip(&w).map(|(t, w)| (LineKind::Row { theta: t.acos() }, *w)).collect()
            }
        };
        let lines = kinds
            .into_iter()
            .map(|(kind, weight)| {
                let (a, b) = kind.span();
                let breaks = match kinks {
                    Some(g) => sign_breaks(|t| g(&kind.point(t)), a, b, (8 * resolution).max(256)),
                    None => Vec::new(),
                };
                Line {
                    kind,
                    breaks,
                    max_panel: (b - a) / (resolution as f64 / 2.0).max(16.0),
                    weight,
                }
            })
            .collect();
        RefinedRule { lines }
    }

    fn integrate(&self, f: impl Fn(&BoundaryPoint) -> f64) -> f64 {
        self.lines
            .iter()
            .map(|line| {
                let (a, b) = line.kind.span();
                line.weight * piecewise(|t| f(&line.kind.point(t)), a, b, &line.breaks, line.max_panel, REFINED_ORDER)
            })
            .sum()
    }
}
