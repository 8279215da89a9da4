//! Gauss–Legendre quadrature.
//!
//! The shock-anticipation layer integrates reliability (and its derivative)
//! against a shock density.  The integrands are piecewise smooth, so the
//! callers split at known kinks and apply a fixed-order rule per piece.
//!
//! Nodes and weights are found the classical way: Newton iteration on the
//! Legendre polynomial from Chebyshev-point initial guesses, using the
//! three-term recurrence for values and the standard identity for the
//! derivative.  The computation runs in `f64` and is converted to the target
//! scalar at the end, which is exact for `f64` and correctly rounded for
//! `f32`.

use crate::error::{Error, Result};
use crate::real::Real;

/// A fixed-order Gauss–Legendre rule on [-1, 1], mappable to any interval.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T: Real> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0; // P_0
    let mut p = x; // P_1
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = (n as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the `n`-point rule.  `n` must be at least 1.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec(
                "quadrature rule needs at least one node".into(),
            ));
        }
        if n == 1 {
            return Ok(Self {
                nodes: vec![T::zero()],
                weights: vec![T::of(2.0)],
            });
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Chebyshev-flavored initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes.push(T::of(x));
            weights.push(T::of(w));
        }
        Ok(Self { nodes, weights })
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the rule is empty (never: construction requires n >= 1).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let half = T::of(0.5);
        let mid = half * (a + b);
        let scale = half * (b - a);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + w * f(mid + scale * x);
        }
        acc * scale
    }

    /// Integrates `f` over `[a, b]` split at the interior points of `kinks`
    /// (points outside `(a, b)` are ignored), applying the rule per piece.
    pub fn integrate_split(&self, a: T, b: T, kinks: &[T], f: impl FnMut(T) -> T) -> T {
        let mut cuts: Vec<T> = kinks.iter().copied().filter(|&k| k > a && k < b).collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("kink locations are finite"));
        cuts.dedup();
        let mut f = f;
        let mut acc = T::zero();
        let mut lo = a;
        for cut in cuts {
            acc = acc + self.integrate(lo, cut, &mut f);
            lo = cut;
        }
        acc + self.integrate(lo, b, &mut f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        // n-point Gauss-Legendre is exact through degree 2n-1.
        let rule: GaussLegendre<f64> = GaussLegendre::new(5).unwrap();
        let integral = rule.integrate(0.0, 1.0, |x| x.powi(9));
        assert!((integral - 0.1).abs() < 1e-14);
    }

    #[test]
    fn sixty_four_nodes_handle_smooth_transcendentals() {
        let rule: GaussLegendre<f64> = GaussLegendre::new(64).unwrap();
        let integral = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((integral - 2.0).abs() < 1e-13);
    }

    #[test]
    fn split_matches_unsplit_for_smooth_integrands() {
        let rule: GaussLegendre<f64> = GaussLegendre::new(32).unwrap();
        let plain = rule.integrate(0.0, 2.0, |x| (1.0 + x * x).recip());
        let split = rule.integrate_split(0.0, 2.0, &[0.5, 1.5, 7.0], |x| (1.0 + x * x).recip());
        assert!((plain - split).abs() < 1e-12);
        assert!((plain - 2.0f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn split_handles_a_genuine_kink() {
        let rule: GaussLegendre<f64> = GaussLegendre::new(32).unwrap();
        // integral of |x - 0.3| over [0, 1] = (0.3^2 + 0.7^2) / 2
        let v = rule.integrate_split(0.0, 1.0, &[0.3], |x| (x - 0.3).abs());
        assert!((v - 0.29).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let rule: GaussLegendre<f64> = GaussLegendre::new(64).unwrap();
        let total = rule.integrate(-1.0, 1.0, |_| 1.0);
        assert!((total - 2.0).abs() < 1e-13);
        assert_eq!(rule.len(), 64);
    }

    #[test]
    fn rejects_zero_nodes() {
        assert!(GaussLegendre::<f64>::new(0).is_err());
    }
}
