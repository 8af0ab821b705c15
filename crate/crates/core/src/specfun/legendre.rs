/// Associated Legendre function `P_n^l(t)` in the Ferrers convention without
/// the Condon-Shortley phase: `P_n^l(t) = (1 - t²)^{l/2} d^l P_n / dt^l`.
///
/// Returns 0 when `l > n`.
pub fn assoc_legendre(n: u32, l: u32, t: f64) -> f64 {
    if l > n {
        return 0.0;
    }
    let t = t.clamp(-1.0, 1.0);
    let s = ((1.0 - t) * (1.0 + t)).sqrt();
    // P_l^l = (2l-1)!! s^l
    let mut pll = 1.0;
    for i in 1..=l {
        pll *= (2 * i - 1) as f64 * s;
    }
    if n == l {
        return pll;
    }
    let mut prev = pll;
    let mut cur = t * (2 * l + 1) as f64 * pll;
    for m in (l + 2)..=n {
        let m_f = m as f64;
        let next = (t * (2.0 * m_f - 1.0) * cur - (m_f + l as f64 - 1.0) * prev) / (m_f - l as f64);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn degree_zero_is_one() {
        for &t in &[-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(assoc_legendre(0, 0, t), 1.0);
        }
    }

    #[test]
    fn low_order_closed_forms() {
        for &t in &[-0.9_f64, -0.2, 0.4, 0.95] {
            let s = (1.0 - t * t).sqrt();
            assert!((assoc_legendre(2, 0, t) - 0.5 * (3.0 * t * t - 1.0)).abs() < 1e-15);
            assert!((assoc_legendre(2, 1, t) - 3.0 * t * s).abs() < 1e-14);
            assert!((assoc_legendre(3, 1, t) - 1.5 * (5.0 * t * t - 1.0) * s).abs() < 1e-14);
            assert!((assoc_legendre(3, 3, t) - 15.0 * s * s * s).abs() < 1e-13);
        }
    }

    #[test]
    fn sectoral_is_power_of_sine() {
        for n in 0..=6u32 {
            let reference = assoc_legendre(n, n, 0.0);
            for i in 1..40 {
                let theta = std::f64::consts::PI * i as f64 / 40.0;
                let ratio = assoc_legendre(n, n, theta.cos()) / theta.sin().powi(n as i32);
                assert!((ratio - reference).abs() <= 1e-10 * reference.abs());
            }
        }
    }

    #[test]
    fn orthogonality_by_quadrature() {
        let (nodes, weights) = gauss_legendre(16);
        let v: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| w * assoc_legendre(2, 1, *t) * assoc_legendre(3, 1, *t))
            .sum();
        assert!(v.abs() < 1e-12);
    }
}
