//! Positive zeros of `J_k` and of the spherical Bessel functions `j_n`.
//!
//! Each zero is bracketed before it is refined. The McMahon expansion gives
//! the initial guess once the index dominates the order; the bracket is the
//! guess plus or minus half the asymptotic spacing, and it is accepted only if
//! it shows a sign change strictly beyond the previous zero. Otherwise the
//! search scans forward from the previous zero in steps well below the minimal
//! zero spacing. Refinement is Newton safeguarded by bisection.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use super::bessel::{bessel_j, bessel_j_prime, spherical_j, spherical_j_prime};
use crate::error::{DtnError, Result};

const MAX_ITERATIONS: usize = 200;
/// Forward scan step; zeros of the orders used here are more than 2.9 apart.
const SCAN_STEP: f64 = 0.5;

/// Which family of Bessel functions a zero table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselOrder {
    /// `J_k`, integer order.
    Integer(u32),
    /// `j_n`, i.e. `J_{n+1/2}`.
    Spherical(u32),
}

impl BesselOrder {
    /// The real order ν of the underlying cylinder function.
    pub fn nu(self) -> f64 {
        match self {
            BesselOrder::Integer(k) => k as f64,
            BesselOrder::Spherical(n) => n as f64 + 0.5,
        }
    }

    /// Value and derivative of the function whose zeros are tabulated.
    pub fn eval(self, x: f64) -> (f64, f64) {
        match self {
            BesselOrder::Integer(k) => (bessel_j(k, x), bessel_j_prime(k, x)),
            BesselOrder::Spherical(n) => (spherical_j(n, x), spherical_j_prime(n, x)),
        }
    }

    /// Magnitude of the function near `x`, used to scale residual checks.
    pub fn scale(self, x: f64) -> f64 {
        match self {
            BesselOrder::Integer(_) => 1.0,
            BesselOrder::Spherical(_) => 1.0 / x.max(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroMethod {
    SeriesBisection,
    NewtonMcMahon,
}

/// Ordered positive zeros of one Bessel order; `zeros[l - 1]` is the l-th.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroTable {
    pub order: BesselOrder,
    pub zeros: Vec<f64>,
    pub method: ZeroMethod,
}

impl ZeroTable {
    pub fn build(order: BesselOrder, count: usize) -> Result<Self> {
        let mut zeros = Vec::with_capacity(count);
        let nu = order.nu();
        let mut prev = if nu == 0.0 { 0.0 } else { nu };
        for index in 1..=count {
            let z = next_zero(order, index, prev)?;
            zeros.push(z);
            prev = z;
        }
        Ok(ZeroTable {
            order,
            zeros,
            method: ZeroMethod::NewtonMcMahon,
        })
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// The l-th positive zero, 1-indexed.
    pub fn zero(&self, l: usize) -> f64 {
        self.zeros[l - 1]
    }
}

/// McMahon's expansion for the l-th zero of `J_ν`.
pub fn mcmahon(nu: f64, l: usize) -> f64 {
    let beta = (l as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
}

fn next_zero(order: BesselOrder, index: usize, prev: f64) -> Result<f64> {
    let f = |x: f64| order.eval(x).0;
    let nu = order.nu();
    let mut bracket = None;
    if index as f64 >= nu + 1.0 {
        let guess = mcmahon(nu, index);
        let (lo, hi) = (guess - 0.5 * PI, guess + 0.5 * PI);
        if lo > prev + 1e-9 && f(lo) * f(hi) < 0.0 {
            bracket = Some((lo, hi));
        }
    }
    let (lo, hi) = match bracket {
        Some(b) => b,
        None => scan(&f, prev, order, index)?,
    };
    refine(order, index, lo, hi)
}

fn scan(f: &impl Fn(f64) -> f64, prev: f64, order: BesselOrder, index: usize) -> Result<(f64, f64)> {
    let mut a = prev + 1e-6;
    let mut fa = f(a);
    for _ in 0..100_000 {
        let b = a + SCAN_STEP;
        let fb = f(b);
        if fa == 0.0 {
            return Ok((a, a));
        }
        if fa * fb <= 0.0 {
            return Ok((a, b));
        }
        a = b;
        fa = fb;
    }
    Err(DtnError::ZeroNotConverged {
        order: order.nu(),
        index,
        iterations: 100_000,
    })
}

fn refine(order: BesselOrder, index: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let mut flo = order.eval(lo).0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let (fx, dfx) = order.eval(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx * flo < 0.0 {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Err(DtnError::ZeroNotConverged {
        order: order.nu(),
        index,
        iterations: MAX_ITERATIONS,
    })
}

fn cache() -> &'static RwLock<HashMap<BesselOrder, Arc<ZeroTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<BesselOrder, Arc<ZeroTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared table holding at least `count` zeros of `order`.
///
/// Tables are never mutated once published; a request for more zeros
/// replaces the cached table with a longer one.
pub fn zero_table(order: BesselOrder, count: usize) -> Result<Arc<ZeroTable>> {
    if let Some(t) = cache().read().expect("zero cache poisoned").get(&order) {
        if t.len() >= count {
            return Ok(Arc::clone(t));
        }
    }
    // grow geometrically so repeated requests stay cheap
    let existing = cache()
        .read()
        .expect("zero cache poisoned")
        .get(&order)
        .map(|t| t.len())
        .unwrap_or(0);
    let target = count.max(existing * 2).max(16);
    let table = Arc::new(ZeroTable::build(order, target)?);
    let mut guard = cache().write().expect("zero cache poisoned");
    let entry = guard.entry(order).or_insert_with(|| Arc::clone(&table));
    if entry.len() < table.len() {
        *entry = Arc::clone(&table);
    }
    Ok(Arc::clone(entry))
}

/// The l-th positive zero `j_{k,l}` of `J_k` (l >= 1).
pub fn bessel_zero(k: u32, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(DtnError::InvalidArgument("zero index starts at 1".into()));
    }
    Ok(zero_table(BesselOrder::Integer(k), l)?.zero(l))
}

/// The k-th positive zero of the spherical Bessel function `j_n` (k >= 1).
pub fn spherical_bessel_zero(n: u32, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(DtnError::InvalidArgument("zero index starts at 1".into()));
    }
    Ok(zero_table(BesselOrder::Spherical(n), k)?.zero(k))
}

/// Rayleigh sums `σ_1 = Σ_l j_{ν,l}^{-2}` and `σ_2 = Σ_l j_{ν,l}^{-4}`.
pub fn rayleigh_sums(nu: f64) -> (f64, f64) {
    let s1 = 1.0 / (4.0 * (nu + 1.0));
    let s2 = 1.0 / (16.0 * (nu + 1.0).powi(2) * (nu + 2.0));
    (s1, s2)
}
