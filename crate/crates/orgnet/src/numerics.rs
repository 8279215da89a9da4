//! Small root-finding and minimization helpers shared by the engines.
//!
//! Everything here assumes the bracket handed in is valid (sign change or
//! unimodality); the callers establish brackets by grid scanning.

use crate::error::Result;
use crate::real::Real;

/// Bisection for a root of `f` on `[lo, hi]`, given `f(lo) = flo` with a sign
/// change across the bracket.  Narrows the bracket to width `tol` (or 200
/// steps, whichever comes first) and returns the midpoint.
pub(crate) fn bisect_root<T: Real>(
    mut f: impl FnMut(T) -> T,
    mut lo: T,
    mut hi: T,
    mut flo: T,
    tol: T,
) -> T {
    let half = T::of(0.5);
    for _ in 0..200 {
        let mid = half * (lo + hi);
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    half * (lo + hi)
}

/// Bisection for the boundary of a monotone boolean predicate on `[lo, hi]`:
/// assumes `pred(hi)` holds and `pred(lo)` does not, and returns the smallest
/// argument (within `tol`) where it holds.
pub(crate) fn bisect_predicate<T: Real>(
    mut pred: impl FnMut(T) -> Result<bool>,
    mut lo: T,
    mut hi: T,
    tol: T,
) -> Result<T> {
    let half = T::of(0.5);
    for _ in 0..200 {
        let mid = half * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    Ok(hi)
}

/// Golden-section search for a local minimum of a unimodal `f` on `[a, b]`,
/// narrowing the bracket to width `tol`.
pub(crate) fn golden_min<T: Real>(mut f: impl FnMut(T) -> T, mut a: T, mut b: T, tol: T) -> T {
    let inv_phi = T::of(0.618_033_988_749_894_9);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let half = T::of(0.5);
    half * (a + b)
}

/// An inclusive uniform grid with `n` intervals over `[lo, hi]`.
pub(crate) fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::of(n as f64);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + step * T::of(i as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let root = bisect_root(f, 1.0, 2.0, f(1.0), 1e-13);
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn predicate_boundary() {
        let b = bisect_predicate(|x: f64| Ok(x >= 0.3), 0.0, 1.0, 1e-10).unwrap();
        assert!((b - 0.3).abs() < 1e-9);
    }

    #[test]
    fn golden_finds_parabola_min() {
        let m = golden_min(|x: f64| (x - 0.37).powi(2), 0.0, 1.0, 1e-10);
        assert!((m - 0.37).abs() < 1e-8);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0f64, 1.0, 4);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
