use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::boundary::{real_sph_harm, trig_mode, BoundaryFunction};
use super::grid::{BoundaryGrid, BoundaryPoint, Edge};
use super::{check_domain, DomainId};
use crate::error::{DtnError, Result};
use crate::specfun::{zero_table, BesselOrder};

/// Index tuple of one member of an orthonormal Dirichlet eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeLabel {
    /// `c J_k(j_{k,l} r) cos(kθ)` or the sine partner; `root` is `j_{k,l}`.
    Disc { k: u32, l: usize, sine: bool, root: f64 },
    /// `2 sin(mπx) sin(nπy)`.
    Square { m: u32, n: u32 },
    /// `c j_n(j_{nk} r) Y_{n,l}`; `root` is `j_{nk}`.
    Ball { n: u32, k: usize, l: i32, root: f64 },
}

impl ModeLabel {
    pub fn domain(&self) -> DomainId {
        match self {
            ModeLabel::Disc { .. } => DomainId::Disc,
            ModeLabel::Square { .. } => DomainId::Square,
            ModeLabel::Ball { .. } => DomainId::Ball,
        }
    }

    /// Highest boundary frequency of the normal derivative, checked against
    /// the grid's resolvable mode.
    pub fn boundary_frequency(&self) -> usize {
        match *self {
            ModeLabel::Disc { k, .. } => k as usize,
            ModeLabel::Square { m, n } => m.max(n) as usize,
            ModeLabel::Ball { n, .. } => n as usize,
        }
    }

    /// Angular family index: k on the disc, n on the ball, 0 on the square.
    pub fn family(&self) -> u32 {
        match *self {
            ModeLabel::Disc { k, .. } => k,
            ModeLabel::Ball { n, .. } => n,
            ModeLabel::Square { .. } => 0,
        }
    }
}

/// One Dirichlet eigenvalue with its full eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletMode {
    pub domain: DomainId,
    pub energy: f64,
    pub multiplicity: usize,
    pub labels: Vec<ModeLabel>,
}

impl DirichletMode {
    /// True when every member belongs to one angular family (always the
    /// case off the square, barring accidental degeneracy).
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

/// Flat JSON record of a catalog entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeRecord {
    pub domain: DomainId,
    #[serde(rename = "E")]
    pub energy: f64,
    pub multiplicity: usize,
    pub labels: Vec<ModeLabel>,
}

impl From<&DirichletMode> for ModeRecord {
    fn from(m: &DirichletMode) -> Self {
        ModeRecord {
            domain: m.domain,
            energy: m.energy,
            multiplicity: m.multiplicity,
            labels: m.labels.clone(),
        }
    }
}

pub fn catalog_json(modes: &[DirichletMode]) -> serde_json::Value {
    let records: Vec<ModeRecord> = modes.iter().map(ModeRecord::from).collect();
    serde_json::to_value(records).expect("mode records are plain data")
}

/// Lowest Dirichlet eigenvalue of the domain.
pub fn ground_energy(domain: DomainId) -> Result<f64> {
    Ok(match domain {
        DomainId::Disc => zero_table(BesselOrder::Integer(0), 1)?.zero(1).powi(2),
        DomainId::Square => 2.0 * PI * PI,
        DomainId::Ball => PI * PI,
    })
}

/// All Dirichlet eigenvalues up to `e_max`, increasing, grouped with their
/// true multiplicities.
pub fn enumerate_modes(domain: DomainId, e_max: f64) -> Result<Vec<DirichletMode>> {
    if !(e_max.is_finite()) {
        return Err(DtnError::InvalidArgument(format!("e_max must be finite, got {e_max}")));
    }
    match domain {
        DomainId::Square => Ok(square_modes(e_max)),
        DomainId::Disc | DomainId::Ball => radial_modes(domain, e_max),
    }
}

fn square_modes(e_max: f64) -> Vec<DirichletMode> {
    let pi2 = PI * PI;
    if e_max < 2.0 * pi2 {
        return Vec::new();
    }
    // group on the exact integer m² + n²
    let nmax = (e_max / pi2).floor() as u64;
    let side = (nmax as f64).sqrt().floor() as u32 + 1;
    let mut groups: std::collections::BTreeMap<u64, Vec<ModeLabel>> = Default::default();
    for m in 1..=side {
        for n in 1..=side {
            let s = (m as u64).pow(2) + (n as u64).pow(2);
            if (s as f64) * pi2 <= e_max {
                groups.entry(s).or_default().push(ModeLabel::Square { m, n });
            }
        }
    }
    groups
        .into_iter()
        .map(|(s, labels)| DirichletMode {
            domain: DomainId::Square,
            energy: s as f64 * pi2,
            multiplicity: labels.len(),
            labels,
        })
        .collect()
}

fn radial_modes(domain: DomainId, e_max: f64) -> Result<Vec<DirichletMode>> {
    let rmax = e_max.max(0.0).sqrt();
    let mut raw: Vec<(f64, u32, Vec<ModeLabel>)> = Vec::new();
    for family in 0u32.. {
        // j_{ν,1} > ν, so families beyond √e_max contribute nothing
        if family as f64 > rmax + 1.0 {
            break;
        }
        let order = match domain {
            DomainId::Disc => BesselOrder::Integer(family),
            _ => BesselOrder::Spherical(family),
        };
        let want = (rmax / PI).ceil() as usize + 2;
        let table = zero_table(order, want)?;
        for (i, &root) in table.zeros.iter().enumerate() {
            if root * root > e_max {
                break;
            }
            let idx = i + 1;
            let labels = match domain {
                DomainId::Disc if family == 0 => vec![ModeLabel::Disc { k: 0, l: idx, sine: false, root }],
                DomainId::Disc => vec![
                    ModeLabel::Disc { k: family, l: idx, sine: false, root },
                    ModeLabel::Disc { k: family, l: idx, sine: true, root },
                ],
                _ => (-(family as i32)..=family as i32)
                    .map(|l| ModeLabel::Ball { n: family, k: idx, l, root })
                    .collect(),
            };
            raw.push((root * root, family, labels));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut modes: Vec<DirichletMode> = Vec::new();
    for (e, _, labels) in raw {
        match modes.last_mut() {
            Some(last) if (e - last.energy).abs() <= 1e-9 * e.max(1.0) => {
                last.labels.extend(labels);
                last.multiplicity = last.labels.len();
            }
            _ => modes.push(DirichletMode {
                domain,
                energy: e,
                multiplicity: labels.len(),
                labels,
            }),
        }
    }
    Ok(modes)
}

/// `(-1)^l`, the sign of `J_k'` (or `j_n'`) at its l-th positive zero.
fn zero_slope_sign(l: usize) -> f64 {
    if l.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Outward normal derivative of the L²-normalised eigenfunction `label` at a
/// boundary point.
///
/// Disc: with `c² π J_k'(j)²/2 = 1` (k > 0, halved for k = 0) the boundary
/// value is `sgn(J_k'(j)) √2 j e_k(θ)` where `e_k` is the orthonormal Fourier
/// mode. Ball: `c = √2/|j_n'(j)|` gives `sgn(j_n'(j)) √2 j Y_{n,l}`.
pub fn normal_derivative_at(label: &ModeLabel, p: &BoundaryPoint) -> f64 {
    match (label, p) {
        (ModeLabel::Disc { k, l, sine, root }, BoundaryPoint::Circle { theta }) => {
            zero_slope_sign(*l) * 2f64.sqrt() * root * trig_mode(*k, *sine, *theta)
        }
        (ModeLabel::Square { m, n }, BoundaryPoint::Edge { edge, s }) => {
            let (m, n) = (*m as f64, *n as f64);
            let parity = |q: f64| if (q as u64).is_multiple_of(2) { 1.0 } else { -1.0 };
            match edge {
                Edge::Bottom => -2.0 * PI * n * (m * PI * s).sin(),
                Edge::Top => 2.0 * PI * n * parity(n) * (m * PI * s).sin(),
                Edge::Left => -2.0 * PI * m * (n * PI * s).sin(),
                Edge::Right => 2.0 * PI * m * parity(m) * (n * PI * s).sin(),
            }
        }
        (ModeLabel::Ball { n, k, l, root }, BoundaryPoint::Sphere { theta, phi }) => {
            zero_slope_sign(*k) * 2f64.sqrt() * root * real_sph_harm(*n, *l, *theta, *phi)
        }
        _ => f64::NAN,
    }
}

/// `∂ν` of member `member` of `mode`, sampled on `grid`.
pub fn normal_derivative(mode: &DirichletMode, member: usize, grid: &Arc<BoundaryGrid>) -> Result<BoundaryFunction> {
    check_domain(mode.domain, grid.domain)?;
    let label = *mode.labels.get(member).ok_or_else(|| {
        DtnError::InvalidArgument(format!("member {member} out of range for multiplicity {}", mode.multiplicity))
    })?;
    let tag = format!("dnu {label:?}");
    Ok(BoundaryFunction::from_fn(grid, Some(tag), move |p| normal_derivative_at(&label, p)))
}

/// `(Πψ, u) = -(1/E) ∫_Γ ∂ν u ψ dS` for member `member` of `mode`.
pub fn coupling(mode: &DirichletMode, member: usize, psi: &BoundaryFunction) -> Result<f64> {
    check_domain(mode.domain, psi.domain)?;
    let label = mode.labels.get(member).ok_or_else(|| {
        DtnError::InvalidArgument(format!("member {member} out of range for multiplicity {}", mode.multiplicity))
    })?;
    let grid = &psi.grid;
    if label.boundary_frequency() > grid.max_mode() {
        return Err(DtnError::Resolution {
            resolution: grid.resolution,
            mode: label.boundary_frequency(),
        });
    }
    let integral = psi.refined_integral(|p| normal_derivative_at(label, p));
    Ok(-integral / mode.energy)
}
