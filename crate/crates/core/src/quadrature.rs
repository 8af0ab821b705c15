//! Gauss-Legendre rules on [-1, 1].

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss-Legendre rule, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Map a rule on [-1, 1] to [a, b].
pub fn mapped<'a>(nodes: &'a [f64], weights: &'a [f64], a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + 'a {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes.iter().zip(weights).map(move |(x, w)| (mid + half * x, half * w))
}

/// Integrate `f` over [a, b] with a composite rule of `panels` panels of
/// `order` points each.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            mapped(&nodes, &weights, lo, lo + h).map(|(x, w)| w * f(x)).sum::<f64>()
        })
        .sum()
}

/// Points in `[a, b]` where `g` changes sign or where `g` switches between
/// zero and nonzero, located by scanning `cells` uniform cells and bisecting.
pub fn sign_breaks(g: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> Vec<f64> {
    let class = |v: f64| -> i8 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let h = (b - a) / cells as f64;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut c0 = class(g(a));
    for i in 1..=cells {
        let x1 = if i == cells { b } else { a + i as f64 * h };
        let c1 = class(g(x1));
        if c1 != c0 {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if class(g(mid)) == c0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        c0 = c1;
    }
    out
}

/// Nodes and weights of a composite Gauss-Legendre rule on `[a, b]` split at
/// `breaks`, with panels no longer than `max_panel`.
pub fn piecewise_rule(a: f64, b: f64, breaks: &[f64], max_panel: f64, order: usize) -> Vec<(f64, f64)> {
    let (nodes, weights) = gauss_legendre(order);
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let panels = (len / max_panel).ceil().max(1.0) as usize;
        let h = len / panels as f64;
        for p in 0..panels {
            let lo = w[0] + p as f64 * h;
            out.extend(mapped(&nodes, &weights, lo, lo + h));
        }
    }
    out
}

/// Integral of `f` with [`piecewise_rule`].
pub fn piecewise(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], max_panel: f64, order: usize) -> f64 {
    piecewise_rule(a, b, breaks, max_panel, order)
        .into_iter()
        .map(|(x, w)| w * f(x))
        .sum()
}
