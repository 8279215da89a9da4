//! The analytic reliability engine.
//!
//! A task tree completes when every input type of the root task is covered by
//! at least one operational provider whose own subtree completes.  With link
//! operation probability `pi`, the completion probability at depth `L`
//! satisfies
//!
//! ```text
//! rho_1 = 1,      rho_L = G_p(1 - G_q(1 - pi * rho_{L-1}))
//! ```
//!
//! and the infinite-depth reliability `rho(pi)` is the largest fixed point of
//! that map, reached by iterating downward from 1.  The inverse view
//!
//! ```text
//! Pi(r) = (1 - G_q^{-1}(1 - G_p^{-1}(r))) / r
//! ```
//!
//! gives the culture strength consistent with reliability `r`; interior local
//! minima of `Pi` are exactly the discontinuities of `rho`, where reliability
//! jumps and the left derivative blows up like an inverse square root.  This
//! module computes all of these objects.

use crate::branching::{BranchingSpec, Depth};
use crate::error::{Error, Result};
use crate::numerics::{golden_min, linspace};
use crate::real::{scaled_tol, Real};
use serde::Serialize;

/// Convergence tolerance on successive iterates of the fixed-point map (f64).
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Iteration cap for the fixed-point loop.  Near a discontinuity the
/// contraction rate degrades like sqrt(|pi - pi_crit|); the cap covers
/// |pi - pi_crit| down to about 1e-9 for the regular 2x2 technology
/// (~4.4e5 iterations at 1e-9, ~1.4e4 at 1e-6).
pub const FIXED_POINT_CAP: u64 = 1_000_000;

/// Iterates decaying below this floor are reported as exactly 0; it separates
/// the extinction attractor from slow positive convergence near criticality.
pub const ZERO_FLOOR: f64 = 1e-9;

/// Reported derivative cap when the inverse-map slope is numerically zero.
pub const BLOWUP_CAP: f64 = 1e12;

/// Inverse-map slope below this is treated as a blow-up (the slope vanishes
/// at a discontinuity; a tiny negative reading right at the fold is
/// round-off from the generating-function inversions, so the test is
/// one-sided).
pub const SLOPE_FLOOR: f64 = 1e-12;

/// Grid resolution of the discontinuity scan over r.
pub const SCAN_POINTS: usize = 10_000;

/// Lower end of the discontinuity scan (reliabilities below this are
/// indistinguishable from extinction at solver tolerance).
pub const SCAN_R_FLOOR: f64 = 1e-6;

/// One application of the fixed-point map r -> G_p(1 - G_q(1 - pi r)),
/// clamped into [0, 1] against rounding drift.
#[inline]
fn step_map<T: Real>(spec: &BranchingSpec<T>, pi: T, r: T) -> T {
    let v = T::one() - pi * r;
    let u = T::one() - spec.q().gen_fn_unchecked(v);
    let out = spec.p().gen_fn_unchecked(u.max(T::zero()).min(T::one()));
    out.max(T::zero()).min(T::one())
}

/// d/dr of the fixed-point map: pi * G_p'(u) * G_q'(v).
#[inline]
fn step_map_deriv<T: Real>(spec: &BranchingSpec<T>, pi: T, r: T) -> T {
    let v = T::one() - pi * r;
    let u = (T::one() - spec.q().gen_fn_unchecked(v))
        .max(T::zero())
        .min(T::one());
    pi * spec.p().gen_fn_deriv_unchecked(u) * spec.q().gen_fn_deriv_unchecked(v)
}

fn check_pi<T: Real>(pi: T) -> Result<()> {
    if pi < T::zero() || pi > T::one() {
        return Err(Error::Domain {
            what: "pi",
            value: pi.as_f64(),
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// Completion probability of a depth-`L` tree: the recursion evaluated
/// exactly (a finite composition of polynomials).
pub fn rho_finite<T: Real>(spec: &BranchingSpec<T>, pi: T, l: u32) -> Result<T> {
    check_pi(pi)?;
    if l == 0 {
        return Err(Error::Domain {
            what: "L",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    let mut r = T::one();
    for _ in 1..l {
        r = step_map(spec, pi, r);
    }
    Ok(r)
}

/// Infinite-depth reliability: the largest fixed point of the level map,
/// found by downward iteration from 1.
///
/// The loop stops when successive iterates agree to [`FIXED_POINT_TOL`]; a
/// short Newton polish then repairs the first-order stopping error, which
/// matters in two places: it lands exactly on 0 when a slow crawl toward
/// extinction stalls the step criterion at a spurious positive level, and it
/// tightens the fixed-point residual to machine precision near
/// discontinuities.  Results below [`ZERO_FLOOR`] are reported as exactly 0.
pub fn rho_infinite<T: Real>(spec: &BranchingSpec<T>, pi: T) -> Result<T> {
    check_pi(pi)?;
    let tol = scaled_tol::<T>(FIXED_POINT_TOL);
    let floor = T::of(ZERO_FLOOR);
    let mut r = T::one();
    let mut converged = false;
    for _ in 0..FIXED_POINT_CAP {
        // The exact sequence is monotone decreasing from 1; the min() guards
        // against rounding-induced two-cycles around the limit.
        let next = step_map(spec, pi, r).min(r);
        let delta = r - next;
        r = next;
        if r < floor {
            return Ok(T::zero());
        }
        if delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        // At (or within ~1e-10 of) a fold of the level map the iteration
        // converges like 1/n and legitimately exhausts the cap even though
        // the residual is nearly at tolerance.  Newton still converges on
        // the double root, so give the polish a chance before failing.
        let polished = newton_polish(spec, pi, r);
        let residual = (step_map(spec, pi, polished) - polished).abs();
        if residual > tol {
            return Err(Error::NoConvergence {
                cap: FIXED_POINT_CAP,
                residual: residual.as_f64(),
            });
        }
        r = polished;
    } else {
        r = newton_polish(spec, pi, r);
    }
    if r < floor {
        Ok(T::zero())
    } else {
        Ok(r)
    }
}

/// A few Newton steps on H(r) = F(r) - r from an already-converged iterate.
/// Guards: skip when H' is numerically singular (at a fold the derivative of
/// H vanishes and Newton would be unstable) and never move more than 1e-3,
/// so the polish cannot hop to a different fixed point.
fn newton_polish<T: Real>(spec: &BranchingSpec<T>, pi: T, mut r: T) -> T {
    let guard = scaled_tol::<T>(1e-8);
    let max_step = T::of(1e-3);
    for _ in 0..8 {
        let h = step_map(spec, pi, r) - r;
        let hp = step_map_deriv(spec, pi, r) - T::one();
        if hp.abs() < guard {
            break;
        }
        let delta = h / hp;
        if delta.abs() > max_step {
            break;
        }
        let cand = (r - delta).max(T::zero()).min(T::one());
        if cand == r {
            break;
        }
        r = cand;
    }
    r
}

/// Reliability at the configured depth (dispatch helper).
pub fn rho_at_depth<T: Real>(spec: &BranchingSpec<T>, pi: T, depth: Depth) -> Result<T> {
    match depth {
        Depth::Finite(l) => rho_finite(spec, pi, l),
        Depth::Infinite => rho_infinite(spec, pi),
    }
}

/// The inverse map Pi(r) = (1 - G_q^{-1}(1 - G_p^{-1}(r))) / r on (0, 1].
pub fn pi_of_r<T: Real>(spec: &BranchingSpec<T>, r: T) -> Result<T> {
    if r <= T::zero() || r > T::one() {
        return Err(Error::Domain {
            what: "r",
            value: r.as_f64(),
            domain: "(0, 1]",
        });
    }
    let zp = spec.p().gen_fn_inverse_unchecked(r);
    let zq = spec
        .q()
        .gen_fn_inverse_unchecked((T::one() - zp).max(T::zero()).min(T::one()));
    Ok((T::one() - zq) / r)
}

/// How a reported derivative value should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivativeFlag {
    /// Ordinary finite derivative.
    Regular,
    /// Infinite depth, pi inside the zero region: rho is constant 0 there and
    /// the derivative is 0 by convention.
    BelowThreshold,
    /// The inverse-map slope was numerically zero (at a discontinuity); the
    /// value is capped at [`BLOWUP_CAP`].
    BlowUpCapped,
}

/// d rho / d pi together with its interpretation flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derivative<T: Real> {
    pub value: T,
    pub flag: DerivativeFlag,
}

/// Derivative of reliability with respect to culture strength.
///
/// Finite depth: the recursion is differentiated exactly alongside itself
/// (`d_1 = 0`, then `d_l = G_p'(u) G_q'(v) (r_{l-1} + pi d_{l-1})`).
///
/// Infinite depth: by the implicit function theorem the derivative along the
/// stable branch is `1 / Pi'(r)` at `r = rho_infinite(pi)`, with `Pi'` in
/// closed form from the chain rule through both generating-function
/// inversions.  A slope below [`SLOPE_FLOOR`] reports the capped blow-up
/// value, and inside the zero region the derivative is 0 with the
/// `BelowThreshold` flag.
pub fn rho_derivative<T: Real>(
    spec: &BranchingSpec<T>,
    pi: T,
    depth: Depth,
) -> Result<Derivative<T>> {
    check_pi(pi)?;
    match depth {
        Depth::Finite(l) => {
            if l == 0 {
                return Err(Error::Domain {
                    what: "L",
                    value: 0.0,
                    domain: "[1, inf)",
                });
            }
            let mut r = T::one();
            let mut d = T::zero();
            for _ in 1..l {
                let v = T::one() - pi * r;
                let u = (T::one() - spec.q().gen_fn_unchecked(v))
                    .max(T::zero())
                    .min(T::one());
                d = spec.p().gen_fn_deriv_unchecked(u)
                    * spec.q().gen_fn_deriv_unchecked(v)
                    * (r + pi * d);
                r = spec.p().gen_fn_unchecked(u);
            }
            Ok(Derivative {
                value: d,
                flag: DerivativeFlag::Regular,
            })
        }
        Depth::Infinite => {
            let r = rho_infinite(spec, pi)?;
            if r == T::zero() {
                return Ok(Derivative {
                    value: T::zero(),
                    flag: DerivativeFlag::BelowThreshold,
                });
            }
            Ok(infinite_derivative_at(spec, r))
        }
    }
}

/// Derivative along the stable branch at a known reliability level `r`.
///
/// With `zp = G_p^{-1}(r)` and `zq = G_q^{-1}(1 - zp)`, differentiating
/// `Pi(r) = (1 - zq) / r` gives
///
/// ```text
/// Pi'(r) = ( r / (G_p'(zp) G_q'(zq)) - (1 - zq) ) / r^2
/// ```
///
/// Evaluating this in closed form (rather than by a finite-difference
/// stencil) matters: the inversions are only resolved to ~1e-14, and a
/// stencil divides that noise by its step, leaving the quotient too coarse
/// for the equilibrium solvers that consume `1 / Pi'` near a discontinuity.
pub(crate) fn infinite_derivative_at<T: Real>(spec: &BranchingSpec<T>, r: T) -> Derivative<T> {
    let zp = spec.p().gen_fn_inverse_unchecked(r);
    let zq = spec
        .q()
        .gen_fn_inverse_unchecked((T::one() - zp).max(T::zero()).min(T::one()));
    let dp = spec.p().gen_fn_deriv_unchecked(zp);
    let dq = spec.q().gen_fn_deriv_unchecked(zq);
    let slope = (r / (dp * dq) - (T::one() - zq)) / (r * r);
    derivative_from_slope(slope)
}

/// Maps an inverse-map slope to the reported derivative, applying the
/// blow-up cap.
fn derivative_from_slope<T: Real>(slope: T) -> Derivative<T> {
    let cap = T::of(BLOWUP_CAP);
    if slope < T::of(SLOPE_FLOOR) {
        return Derivative {
            value: cap,
            flag: DerivativeFlag::BlowUpCapped,
        };
    }
    let value = slope.recip();
    if value > cap {
        Derivative {
            value: cap,
            flag: DerivativeFlag::BlowUpCapped,
        }
    } else {
        Derivative {
            value,
            flag: DerivativeFlag::Regular,
        }
    }
}

/// A discontinuity of infinite-depth reliability: culture strength `pi` at
/// the jump and the reliability `r` just above it (the right limit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint<T: Real> {
    pub pi: T,
    pub r: T,
}

/// All discontinuities of infinite-depth reliability, ascending by `pi`.
///
/// `Pi` is evaluated on a [`SCAN_POINTS`]-point grid over
/// `[`[`SCAN_R_FLOOR`]`, 1]` and its discrete slope is scanned with
/// hysteresis: a confirmed fall (slope below the noise band) arms a bracket,
/// the next confirmed rise closes it, and golden-section search refines the
/// bracketed interior minimum to 1e-10 in `r`.  The hysteresis keeps
/// rounding noise on the flat stretch around a minimum from fragmenting it
/// into many detections.  A scan that ends still falling terminates in a
/// boundary minimum at `r = 1` (a technology whose reliability is positive
/// only at `pi = 1`); a monotone increasing `Pi` yields no discontinuities at
/// all (simple projects).
pub fn find_discontinuities<T: Real>(spec: &BranchingSpec<T>) -> Result<Vec<CriticalPoint<T>>> {
    if !spec.is_complex() {
        // With some chance that a task needs only one subtask, reliability
        // rises continuously from zero and never jumps, so there is no fold
        // to scan for.  Skipping the scan also avoids chasing round-off
        // slopes where the inverse map is exactly flat (the single-subtask,
        // single-worker chain).
        return Ok(Vec::new());
    }
    let grid = linspace(T::of(SCAN_R_FLOOR), T::one(), SCAN_POINTS);
    let values: Vec<T> = grid
        .iter()
        .map(|&r| pi_of_r(spec, r))
        .collect::<Result<_>>()?;
    let r_tol = scaled_tol::<T>(1e-10);
    let noise = T::epsilon() * T::of(64.0);
    let f = |r: T| pi_of_r(spec, r).expect("scan stays inside (0, 1]");
    let mut points: Vec<CriticalPoint<T>> = Vec::new();
    let mut armed: Option<usize> = None; // index of the last confirmed fall
    for i in 0..grid.len() - 1 {
        let slope = values[i + 1] - values[i];
        if slope < -noise {
            armed = Some(i);
        } else if slope > noise {
            if let Some(start) = armed.take() {
                let r_min = golden_min(f, grid[start], grid[i + 1], r_tol);
                let candidate = CriticalPoint {
                    pi: pi_of_r(spec, r_min)?,
                    r: r_min,
                };
                let dup = points
                    .last()
                    .map(|p| (p.r - candidate.r).abs() < T::of(1e-8))
                    .unwrap_or(false);
                if !dup {
                    points.push(candidate);
                }
            }
        }
    }
    if let Some(start) = armed {
        // Still falling at the end of the scan: minimum on the boundary (or
        // in the final cells).  Snap results indistinguishable from r = 1 to
        // the exact boundary.
        let r_min = golden_min(f, grid[start], T::one(), r_tol);
        let r_min = if T::one() - r_min < T::of(1e-6) {
            T::one()
        } else {
            r_min
        };
        points.push(CriticalPoint {
            pi: pi_of_r(spec, r_min)?,
            r: r_min,
        });
    }
    points.sort_by(|a, b| a.pi.partial_cmp(&b.pi).expect("pi values are finite"));
    Ok(points)
}

/// One sampled point of a reliability curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint<T: Real> {
    pub pi: T,
    pub rho: T,
}

/// A sampled reliability curve with its discontinuities (infinite depth only;
/// finite-depth curves are continuous).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityCurve<T: Real> {
    pub points: Vec<CurvePoint<T>>,
    pub discontinuities: Vec<CriticalPoint<T>>,
    pub depth: Depth,
}

/// Samples reliability over an ascending `grid` of culture strengths at the
/// given depth.
pub fn sample_curve<T: Real>(
    spec: &BranchingSpec<T>,
    grid: &[T],
    depth: Depth,
) -> Result<ReliabilityCurve<T>> {
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Domain {
                what: "grid",
                value: pair[1].as_f64(),
                domain: "strictly ascending",
            });
        }
    }
    let points = grid
        .iter()
        .map(|&pi| {
            Ok(CurvePoint {
                pi,
                rho: rho_at_depth(spec, pi, depth)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let discontinuities = match depth {
        Depth::Infinite => find_discontinuities(spec)?,
        Depth::Finite(_) => Vec::new(),
    };
    Ok(ReliabilityCurve {
        points,
        discontinuities,
        depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> BranchingSpec<f64> {
        BranchingSpec::regular(2, 2, Depth::Infinite).unwrap()
    }

    fn simple() -> BranchingSpec<f64> {
        BranchingSpec::regular(1, 2, Depth::Infinite).unwrap()
    }

    /// Exact critical point of the regular 2x2 technology: parameterizing
    /// t = sqrt(1 - sqrt(r)) turns Pi into 1 / ((1-t)(1+t)^2), whose
    /// denominator is maximized at t = 1/3, i.e. r = (8/9)^2 = 64/81 and
    /// pi = 27/32.
    const PI_CRIT: f64 = 27.0 / 32.0;
    const R_CRIT: f64 = 64.0 / 81.0;

    #[test]
    fn finite_depth_base_cases() {
        let spec = two_by_two();
        assert_eq!(rho_finite(&spec, 0.3, 1).unwrap(), 1.0);
        assert_eq!(rho_finite(&spec, 0.9, 1).unwrap(), 1.0);
        // L=2, pi=0.5: (1 - (1 - 0.5)^2)^2 = 0.75^2
        assert_eq!(rho_finite(&spec, 0.5, 2).unwrap(), 0.5625);
        assert_eq!(rho_finite(&spec, 0.0, 5).unwrap(), 0.0);
        assert!(rho_finite(&spec, 1.2, 3).is_err());
        assert!(rho_finite(&spec, 0.5, 0).is_err());
    }

    #[test]
    fn infinite_depth_reference_values() {
        let spec = two_by_two();
        // Below the critical point reliability is exactly 0.
        assert_eq!(rho_infinite(&spec, 0.8).unwrap(), 0.0);
        assert_eq!(rho_infinite(&spec, 0.5).unwrap(), 0.0);
        // Frozen fixed-point values (independent high-precision evaluation).
        assert!((rho_infinite(&spec, 0.85).unwrap() - 0.863_309_756_633_564_3).abs() < 1e-11);
        assert!((rho_infinite(&spec, 0.9).unwrap() - 0.966_330_999_247_576_6).abs() < 1e-11);
        assert!((rho_infinite(&spec, 0.95).unwrap() - 0.993_752_262_197_555).abs() < 1e-11);
        assert_eq!(rho_infinite(&spec, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn infinite_depth_zero_region_is_exact() {
        let spec = two_by_two();
        let mut pi = 0.0;
        while pi <= 0.84 {
            assert_eq!(rho_infinite(&spec, pi).unwrap(), 0.0, "pi = {pi}");
            pi += 0.02;
        }
    }

    #[test]
    fn simple_task_closed_form() {
        // m=1, n=2: r = 1 - (1 - pi r)^2 has largest root (2 pi - 1) / pi^2.
        let spec = simple();
        let rho = rho_infinite(&spec, 0.75).unwrap();
        assert!((rho - 8.0 / 9.0).abs() < 1e-12);
        // Just below the continuous threshold at 1/2 the root collapses to 0;
        // the polish must not leave a spurious positive behind.
        assert_eq!(rho_infinite(&spec, 0.4999).unwrap(), 0.0);
        assert_eq!(rho_infinite(&spec, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn fixed_point_residual_is_tiny() {
        let spec = two_by_two();
        for &pi in &[0.845, 0.85, 0.9, 0.95, 0.99] {
            let r = rho_infinite(&spec, pi).unwrap();
            let residual = (step_map(&spec, pi, r) - r).abs();
            assert!(residual < 1e-13, "pi = {pi}, residual = {residual:e}");
        }
    }

    #[test]
    fn pi_of_r_reference_values() {
        let spec = two_by_two();
        // Exact algebra: Pi(64/81) = 27/32.
        assert!((pi_of_r(&spec, R_CRIT).unwrap() - PI_CRIT).abs() < 1e-12);
        assert!((pi_of_r(&spec, 0.79).unwrap() - 0.84375).abs() < 1e-4);
        assert_eq!(pi_of_r(&spec, 1.0).unwrap(), 1.0);
        assert!(pi_of_r(&spec, 0.0).is_err());
        assert!(pi_of_r(&spec, 1.5).is_err());
    }

    #[test]
    fn critical_point_of_regular_two_by_two() {
        let points = find_discontinuities(&two_by_two()).unwrap();
        assert_eq!(points.len(), 1);
        assert!((points[0].pi - PI_CRIT).abs() < 1e-10);
        assert!((points[0].r - R_CRIT).abs() < 1e-5);
    }

    #[test]
    fn simple_task_has_no_discontinuity() {
        assert!(find_discontinuities(&simple()).unwrap().is_empty());
    }

    #[test]
    fn single_provider_technology_critical_at_one() {
        // m=2, n=1: r = (pi r)^2 admits a positive root <= 1 only at pi = 1;
        // Pi(r) = r^{-1/2} decreases all the way to the boundary.
        let spec: BranchingSpec<f64> = BranchingSpec::regular(2, 1, Depth::Infinite).unwrap();
        let points = find_discontinuities(&spec).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].pi, 1.0);
        assert_eq!(points[0].r, 1.0);
    }

    #[test]
    fn finite_derivative_matches_central_difference() {
        let spec = two_by_two();
        for &(pi, l) in &[(0.9, 10u32), (0.75, 10), (0.85, 5), (0.3, 7)] {
            let exact = rho_derivative(&spec, pi, Depth::Finite(l)).unwrap();
            assert_eq!(exact.flag, DerivativeFlag::Regular);
            let h = 1e-6;
            let num = (rho_finite(&spec, pi + h, l).unwrap()
                - rho_finite(&spec, pi - h, l).unwrap())
                / (2.0 * h);
            assert!(
                (exact.value - num).abs() <= 1e-5 * num.abs().max(1.0),
                "pi={pi} L={l}: exact {} vs numeric {num}",
                exact.value
            );
        }
    }

    #[test]
    fn infinite_derivative_reference_value() {
        let spec = two_by_two();
        let d = rho_derivative(&spec, 0.95, Depth::Infinite).unwrap();
        assert_eq!(d.flag, DerivativeFlag::Regular);
        // Frozen from an independent evaluation of 1 / Pi'(rho(0.95)).
        assert!((d.value - 0.281_239_508).abs() < 1e-5);
        // Cross-check against a coarse central difference of rho itself.
        let h = 1e-5;
        let num = (rho_infinite(&spec, 0.95 + h).unwrap() - rho_infinite(&spec, 0.95 - h).unwrap())
            / (2.0 * h);
        assert!((d.value - num).abs() < 1e-4 * num.abs());
    }

    #[test]
    fn derivative_blows_up_approaching_the_jump() {
        let spec = two_by_two();
        // The one-sided derivative scales like 1 / sqrt(2 Pi'' delta) with
        // Pi''(r_crit) ~= 2.027, i.e. ~496 at delta = 1e-6 and ~1.57e4 at
        // delta = 1e-9.
        let d6 = rho_derivative(&spec, PI_CRIT + 1e-6, Depth::Infinite).unwrap();
        let d9 = rho_derivative(&spec, PI_CRIT + 1e-9, Depth::Infinite).unwrap();
        let d3 = rho_derivative(&spec, PI_CRIT + 1e-3, Depth::Infinite).unwrap();
        assert!(d6.value > 1e2 && d6.value < 1e3, "d6 = {}", d6.value);
        assert!(d9.value > 1e3 && d9.value < 1e5, "d9 = {}", d9.value);
        assert!(d9.value > d6.value && d6.value > d3.value);
    }

    #[test]
    fn derivative_decays_toward_full_culture() {
        let spec = two_by_two();
        let d999 = rho_derivative(&spec, 0.999, Depth::Infinite).unwrap();
        let d9999 = rho_derivative(&spec, 0.9999, Depth::Infinite).unwrap();
        assert!(d999.value > 0.0 && d999.value < 0.1);
        assert!(d9999.value < d999.value);
    }

    #[test]
    fn derivative_below_threshold_is_flagged_zero() {
        let spec = two_by_two();
        let d = rho_derivative(&spec, 0.5, Depth::Infinite).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.flag, DerivativeFlag::BelowThreshold);
    }

    #[test]
    fn blow_up_cap_engages_on_vanishing_slope() {
        let d: Derivative<f64> = derivative_from_slope(5e-13);
        assert_eq!(d.flag, DerivativeFlag::BlowUpCapped);
        assert_eq!(d.value, BLOWUP_CAP);
        let d: Derivative<f64> = derivative_from_slope(-1e-7);
        assert_eq!(d.flag, DerivativeFlag::BlowUpCapped);
        let d: Derivative<f64> = derivative_from_slope(0.5);
        assert_eq!(d.flag, DerivativeFlag::Regular);
        assert_eq!(d.value, 2.0);
        // A positive slope whose reciprocal exceeds the cap is also capped.
        let d: Derivative<f64> = derivative_from_slope(1e-14_f64.max(2e-13));
        assert_eq!(d.flag, DerivativeFlag::BlowUpCapped);
    }

    #[test]
    fn curve_sampling_attaches_discontinuities() {
        let spec = two_by_two();
        let grid = [0.0, 0.5, 1.0];
        let curve = sample_curve(&spec, &grid, Depth::Infinite).unwrap();
        let rhos: Vec<f64> = curve.points.iter().map(|p| p.rho).collect();
        assert_eq!(rhos, vec![0.0, 0.0, 1.0]);
        assert_eq!(curve.discontinuities.len(), 1);

        let curve10 = sample_curve(&spec, &linspace(0.0, 1.0, 99), Depth::Finite(10)).unwrap();
        assert!(curve10.discontinuities.is_empty());
        for w in curve10.points.windows(2) {
            assert!(w[1].rho >= w[0].rho - 1e-12);
        }
    }

    #[test]
    fn curve_sampling_rejects_unsorted_grid() {
        let spec = two_by_two();
        assert!(sample_curve(&spec, &[0.2, 0.1], Depth::Infinite).is_err());
    }

    #[test]
    fn depth_dominance_on_a_grid() {
        let spec = two_by_two();
        for &pi in &[0.2, 0.5, 0.85, 0.9, 0.99] {
            let r5 = rho_finite(&spec, pi, 5).unwrap();
            let r10 = rho_finite(&spec, pi, 10).unwrap();
            let rinf = rho_infinite(&spec, pi).unwrap();
            assert!(r10 <= r5 + 1e-14);
            assert!(rinf <= r10 + 1e-12);
        }
    }

    #[test]
    fn works_in_f32() {
        let spec: BranchingSpec<f32> = BranchingSpec::regular(2, 2, Depth::Infinite).unwrap();
        let rho = rho_infinite(&spec, 0.9f32).unwrap();
        assert!((rho - 0.96633).abs() < 1e-3);
        assert_eq!(rho_infinite(&spec, 0.5f32).unwrap(), 0.0);
        let points = find_discontinuities(&spec).unwrap();
        assert_eq!(points.len(), 1);
        assert!((points[0].pi - 0.84375).abs() < 1e-2);
    }
}
