//! Gauss–Legendre quadrature on `[0, 1]`.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point rule on `[0, 1]`; exact for
/// polynomials of degree `2n - 1`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "need at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let two = T::lit(2.0);
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (T::pi() * (T::count(i) + T::lit(0.75)) / (T::count(n) + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::default_epsilon() * T::lit(4.0) {
                let (_, d) = legendre(n, x);
                dp = d;
                break;
            }
        }
        let w = two / ((T::one() - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = (T::one() - x) / two;
        nodes[n - 1 - i] = (T::one() + x) / two;
        weights[i] = w / two;
        weights[n - 1 - i] = w / two;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = T::count(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_monomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre::<f64>(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn odd_rule_has_midpoint() {
        let (x, _) = gauss_legendre::<f64>(5);
        assert!((x[2] - 0.5).abs() < 1e-15);
    }
}
