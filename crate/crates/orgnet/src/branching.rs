//! Finite-support probability mass functions, their generating functions, and
//! the branching specification of the collaboration tree.
//!
//! A task at one level of the tree needs `m ~ p` distinct input types; each
//! type can be supplied by any of `n ~ q` candidate provider teams one level
//! down.  Everything downstream (the reliability recursion, its fixed points,
//! the inverse map and its minima) is driven by the two probability
//! generating functions G_p and G_q, so this module is the numerical
//! foundation of the crate.

use crate::error::{Error, Result};
use crate::real::{scaled_tol, Real};
use serde::Serialize;

/// Largest admissible support entry.  The generating functions are evaluated
/// by Horner's rule, so this is not an overflow guard so much as a sanity cap:
/// desk-scale collaboration trees never need degree-65 polynomials, and a
/// support entry of a few thousand almost certainly indicates a config bug.
pub const MAX_SUPPORT: u32 = 64;

/// Tolerance on `|sum(probs) - 1|` at construction.  Probabilities are never
/// silently renormalized; masking a config typo is worse than rejecting it.
pub const MASS_TOL: f64 = 1e-9;

/// A validated finite-support pmf over nonnegative integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf<T: Real> {
    support: Vec<u32>,
    probs: Vec<T>,
}

impl<T: Real> Pmf<T> {
    /// Validates and builds a pmf.  `support` must be ascending and distinct,
    /// `probs` nonnegative and summing to 1 within [`MASS_TOL`].
    pub fn new(support: Vec<u32>, probs: Vec<T>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::LengthMismatch {
                left: support.len(),
                right: probs.len(),
            });
        }
        for pair in support.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::DuplicateSupport { entry: pair[1] });
            }
        }
        if let Some(&top) = support.last() {
            if top > MAX_SUPPORT {
                return Err(Error::SupportTooLarge {
                    entry: top,
                    cap: MAX_SUPPORT,
                });
            }
        }
        let mut mass = T::zero();
        for (&j, &pr) in support.iter().zip(&probs) {
            if pr < T::zero() {
                return Err(Error::NegativeProb {
                    entry: j,
                    prob: pr.as_f64(),
                });
            }
            mass = mass + pr;
        }
        // Tolerance is 1e-9 for f64 and widens with epsilon so that f32
        // configs normalized in f32 arithmetic still construct.
        let mass_tol = T::of(MASS_TOL).max(T::epsilon() * T::of(64.0));
        if (mass - T::one()).abs() > mass_tol {
            return Err(Error::NonUnitMass {
                mass: mass.as_f64(),
            });
        }
        Ok(Self { support, probs })
    }

    /// A pmf putting all mass on one value (a regular tree layer).
    pub fn degenerate(value: u32) -> Result<Self> {
        Self::new(vec![value], vec![T::one()])
    }

    /// Support entries, ascending.
    pub fn support(&self) -> &[u32] {
        &self.support
    }

    /// Probabilities, parallel to [`Self::support`].
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Smallest support entry.
    pub fn min_support(&self) -> u32 {
        self.support[0]
    }

    /// Mean of the distribution.
    pub fn mean(&self) -> T {
        let mut m = T::zero();
        for (&j, &pr) in self.support.iter().zip(&self.probs) {
            m = m + pr * T::of(j as f64);
        }
        m
    }

    /// G(z) = sum_j p(j) z^j for z in [0, 1].
    pub fn gen_fn(&self, z: T) -> Result<T> {
        if z < T::zero() || z > T::one() {
            return Err(Error::Domain {
                what: "z",
                value: z.as_f64(),
                domain: "[0, 1]",
            });
        }
        Ok(self.gen_fn_unchecked(z))
    }

    /// Horner evaluation of G; domain already validated by the caller.
    #[inline]
    pub(crate) fn gen_fn_unchecked(&self, z: T) -> T {
        // Walk support descending: acc = ((p_k z^(j_k - j_{k-1}) + p_{k-1}) ...)
        let mut acc = T::zero();
        let mut prev_exp = 0u32;
        for (&j, &pr) in self.support.iter().zip(&self.probs).rev() {
            if prev_exp > 0 {
                acc = acc * z.powi((prev_exp - j) as i32);
            }
            acc = acc + pr;
            prev_exp = j;
        }
        acc * z.powi(prev_exp as i32)
    }

    /// G'(z) = sum_j p(j) j z^(j-1).
    #[inline]
    pub(crate) fn gen_fn_deriv_unchecked(&self, z: T) -> T {
        let mut acc = T::zero();
        let mut prev_exp = 1u32;
        for (&j, &pr) in self.support.iter().zip(&self.probs).rev() {
            if j == 0 {
                continue;
            }
            if prev_exp > 1 {
                acc = acc * z.powi((prev_exp - j) as i32);
            }
            acc = acc + pr * T::of(j as f64);
            prev_exp = j;
        }
        acc * z.powi(prev_exp as i32 - 1)
    }

    /// G'(z) with domain validation.
    pub fn gen_fn_deriv(&self, z: T) -> Result<T> {
        if z < T::zero() || z > T::one() {
            return Err(Error::Domain {
                what: "z",
                value: z.as_f64(),
                domain: "[0, 1]",
            });
        }
        Ok(self.gen_fn_deriv_unchecked(z))
    }

    /// Inverse generating function: the z in [0, 1] with G(z) = y.
    ///
    /// Requires min support >= 1 so G is strictly increasing with G(0) = 0 and
    /// G(1) = 1.  Solved by bisection; the interval is narrowed to ~1e-14 (for
    /// `f64`), which keeps the round trip `inverse(eval(z)) = z` within 1e-10
    /// even where G is nearly flat, and puts `|G(z) - y|` well under 1e-12.
    pub fn gen_fn_inverse(&self, y: T) -> Result<T> {
        if self.min_support() == 0 {
            return Err(Error::NotInvertible);
        }
        if y < T::zero() || y > T::one() {
            return Err(Error::Domain {
                what: "y",
                value: y.as_f64(),
                domain: "[0, 1]",
            });
        }
        Ok(self.gen_fn_inverse_unchecked(y))
    }

    #[inline]
    pub(crate) fn gen_fn_inverse_unchecked(&self, y: T) -> T {
        if y == T::zero() {
            return T::zero();
        }
        if y == T::one() {
            return T::one();
        }
        let tol = scaled_tol::<T>(1e-14);
        let half = T::of(0.5);
        let (mut lo, mut hi) = (T::zero(), T::one());
        // 200-step cap; bisection halves the interval, so f64 needs ~47 steps.
        for _ in 0..200 {
            let mid = half * (lo + hi);
            if self.gen_fn_unchecked(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= tol {
                break;
            }
        }
        half * (lo + hi)
    }
}

/// Tree depth: a finite number of levels or the infinite-depth limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Depth {
    /// Exactly `L >= 1` levels; level-L tasks are leaves that always succeed.
    Finite(u32),
    /// The infinite-depth limit (largest fixed point of the level recursion).
    Infinite,
}

/// The branching technology: input-type counts `p`, provider counts `q`, and
/// the tree depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchingSpec<T: Real> {
    p: Pmf<T>,
    q: Pmf<T>,
    depth: Depth,
}

impl<T: Real> BranchingSpec<T> {
    /// Validates and builds a spec.  Both supports must start at 1 or above:
    /// a task with zero input types and an input type with zero candidate
    /// providers are both outside the model.
    pub fn new(p: Pmf<T>, q: Pmf<T>, depth: Depth) -> Result<Self> {
        if p.min_support() < 1 {
            return Err(Error::InvalidSpec(
                "p support must start at 1 or above".into(),
            ));
        }
        if q.min_support() < 1 {
            return Err(Error::InvalidSpec(
                "q support must start at 1 or above".into(),
            ));
        }
        if let Depth::Finite(l) = depth {
            if l == 0 {
                return Err(Error::InvalidSpec("finite depth must be >= 1".into()));
            }
        }
        Ok(Self { p, q, depth })
    }

    /// Regular technology: every task needs exactly `m` input types, every
    /// type has exactly `n` candidate providers.
    pub fn regular(m: u32, n: u32, depth: Depth) -> Result<Self> {
        Self::new(Pmf::degenerate(m)?, Pmf::degenerate(n)?, depth)
    }

    /// Input-type count distribution.
    pub fn p(&self) -> &Pmf<T> {
        &self.p
    }

    /// Provider count distribution.
    pub fn q(&self) -> &Pmf<T> {
        &self.q
    }

    /// Configured depth.
    pub fn depth(&self) -> Depth {
        self.depth
    }

    /// Same technology at a different depth.
    pub fn with_depth(&self, depth: Depth) -> Self {
        Self {
            p: self.p.clone(),
            q: self.q.clone(),
            depth,
        }
    }

    /// A spec is complex when every task needs at least two input types; that
    /// is the regime with discontinuous reliability.  `m = 1` specs are still
    /// accepted everywhere (the simple-project case).
    pub fn is_complex(&self) -> bool {
        self.p.min_support() >= 2
    }
}

/// Validates and builds a [`Pmf`].
pub fn make_pmf<T: Real>(support: Vec<u32>, probs: Vec<T>) -> Result<Pmf<T>> {
    Pmf::new(support, probs)
}

/// Evaluates the probability generating function G(z) of `pmf`.
pub fn gen_fn_eval<T: Real>(pmf: &Pmf<T>, z: T) -> Result<T> {
    pmf.gen_fn(z)
}

/// Inverts the probability generating function of `pmf` at `y`.
pub fn gen_fn_inverse<T: Real>(pmf: &Pmf<T>, y: T) -> Result<T> {
    pmf.gen_fn_inverse(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_half() -> Pmf<f64> {
        make_pmf(vec![2, 3], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn degenerate_pmf_builds() {
        let pmf: Pmf<f64> = make_pmf(vec![2], vec![1.0]).unwrap();
        assert_eq!(pmf.min_support(), 2);
        assert_eq!(pmf.mean(), 2.0);
    }

    #[test]
    fn mixed_pmf_mean() {
        assert_eq!(half_half().mean(), 2.5);
    }

    #[test]
    fn construction_rejects_bad_mass() {
        let err = make_pmf(vec![2, 3], vec![0.5, 0.4]).unwrap_err();
        assert!(matches!(err, Error::NonUnitMass { .. }));
    }

    #[test]
    fn construction_rejects_negative_prob() {
        let err = make_pmf(vec![1, 2], vec![1.5, -0.5]).unwrap_err();
        assert!(matches!(err, Error::NegativeProb { entry: 2, .. }));
    }

    #[test]
    fn construction_rejects_unsorted_support() {
        let err = make_pmf(vec![3, 2], vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::DuplicateSupport { entry: 2 }));
        let err = make_pmf(vec![2, 2], vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::DuplicateSupport { entry: 2 }));
    }

    #[test]
    fn construction_rejects_length_mismatch_and_empty() {
        assert!(matches!(
            make_pmf::<f64>(vec![1, 2], vec![1.0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(matches!(
            make_pmf::<f64>(vec![], vec![]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn construction_rejects_huge_support() {
        let err = make_pmf(vec![65], vec![1.0f64]).unwrap_err();
        assert!(matches!(err, Error::SupportTooLarge { entry: 65, cap: 64 }));
    }

    #[test]
    fn gen_fn_matches_hand_values() {
        let deg2: Pmf<f64> = Pmf::degenerate(2).unwrap();
        assert_eq!(gen_fn_eval(&deg2, 1.0).unwrap(), 1.0);
        assert_eq!(gen_fn_eval(&deg2, 0.5).unwrap(), 0.25);
        // 0.5 * 0.5^2 + 0.5 * 0.5^3 = 0.1875
        assert_eq!(gen_fn_eval(&half_half(), 0.5).unwrap(), 0.1875);
    }

    #[test]
    fn gen_fn_rejects_out_of_domain() {
        let deg2: Pmf<f64> = Pmf::degenerate(2).unwrap();
        assert!(matches!(
            gen_fn_eval(&deg2, 1.5),
            Err(Error::Domain { what: "z", .. })
        ));
        assert!(gen_fn_eval(&deg2, -0.1).is_err());
    }

    #[test]
    fn gen_fn_at_zero_reflects_min_support() {
        let deg2: Pmf<f64> = Pmf::degenerate(2).unwrap();
        assert_eq!(deg2.gen_fn(0.0).unwrap(), 0.0);
        let with_zero = make_pmf(vec![0, 2], vec![0.25, 0.75]).unwrap();
        assert_eq!(with_zero.gen_fn(0.0).unwrap(), 0.25);
    }

    #[test]
    fn gen_fn_deriv_matches_hand_values() {
        // G(z) = .5 z^2 + .5 z^3, G'(z) = z + 1.5 z^2; at z = .5: .875
        assert_eq!(half_half().gen_fn_deriv(0.5).unwrap(), 0.875);
        let deg2: Pmf<f64> = Pmf::degenerate(2).unwrap();
        assert_eq!(deg2.gen_fn_deriv(0.5).unwrap(), 1.0);
        let with_zero = make_pmf(vec![0, 3], vec![0.25, 0.75]).unwrap();
        assert_eq!(with_zero.gen_fn_deriv(1.0).unwrap(), 2.25);
    }

    #[test]
    fn inverse_matches_hand_values() {
        let deg2: Pmf<f64> = Pmf::degenerate(2).unwrap();
        assert!((gen_fn_inverse(&deg2, 0.25).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(gen_fn_inverse(&deg2, 1.0).unwrap(), 1.0);
        assert_eq!(gen_fn_inverse(&deg2, 0.0).unwrap(), 0.0);
        assert!((gen_fn_inverse(&half_half(), 0.1875).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_rejects_mass_at_zero() {
        let with_zero = make_pmf(vec![0, 2], vec![0.25, 0.75]).unwrap();
        assert!(matches!(
            gen_fn_inverse(&with_zero, 0.5),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn spec_complexity_flag() {
        let complex: BranchingSpec<f64> = BranchingSpec::regular(2, 2, Depth::Infinite).unwrap();
        assert!(complex.is_complex());
        let simple: BranchingSpec<f64> = BranchingSpec::regular(1, 2, Depth::Infinite).unwrap();
        assert!(!simple.is_complex());
    }

    #[test]
    fn spec_rejects_zero_support_and_zero_depth() {
        let p: Pmf<f64> = make_pmf(vec![0, 2], vec![0.5, 0.5]).unwrap();
        let q: Pmf<f64> = Pmf::degenerate(2).unwrap();
        assert!(BranchingSpec::new(p, q.clone(), Depth::Infinite).is_err());
        assert!(BranchingSpec::<f64>::regular(2, 2, Depth::Finite(0)).is_err());
    }

    #[test]
    fn works_in_f32() {
        let pmf: Pmf<f32> = make_pmf(vec![2, 3], vec![0.5, 0.5]).unwrap();
        assert!((pmf.gen_fn(0.5).unwrap() - 0.1875).abs() < 1e-6);
        assert!((pmf.gen_fn_inverse(0.1875).unwrap() - 0.5).abs() < 1e-5);
    }
}
