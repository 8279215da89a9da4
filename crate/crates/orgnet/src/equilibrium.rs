//! The culture-investment game.
//!
//! Culture strength aggregates a baseline and weighted worker investments,
//! `pi(x) = baseline + sum_i w_i h(x_i)`; worker `i` earns `a_i` times the
//! completion probability at that culture strength, pays a convex cost
//! `c(x_i)`, and (optionally) anticipates an additive baseline shock of
//! probability `psi` and random size `s`.  This module computes payoffs,
//! first-order conditions, the symmetric finite-depth equilibrium, the
//! heterogeneous infinite-depth equilibrium built from the inverse
//! best-response map, the no-contribution equilibrium check, and fragility
//! reports for an equilibrium profile.
//!
//! The heterogeneous solver works on the culture aggregate rather than on
//! profiles directly: given a candidate culture strength `pi`, each worker's
//! best interior response solves `c'(x) / h'(x) = (1-psi) a_i w_i rho'(pi) +
//! (shock term)`, the left side being increasing in `x`; substituting the
//! responses back into the aggregator gives a one-dimensional map `P(pi)`
//! whose fixed points at or above the first discontinuity are the candidate
//! positive equilibria.  Candidates are screened by a unilateral-deviation
//! grid check before being reported.

use crate::branching::{BranchingSpec, Depth};
use crate::error::{Error, Result};
use crate::numerics::{bisect_root, linspace};
use crate::quadrature::GaussLegendre;
use crate::real::{scaled_tol, Real};
use crate::reliability::{
    find_discontinuities, rho_at_depth, rho_derivative, rho_infinite, Derivative,
};
use serde::Serialize;

/// Grid resolution of the one-dimensional equilibrium scans.
pub const EQ_SCAN_POINTS: usize = 10_000;

/// Grid resolution of unilateral-deviation payoff checks.
pub const DEVIATION_GRID: usize = 1_000;

/// Slack allowed when comparing a candidate equilibrium payoff against the
/// best deviation found on the grid.  Candidates of interest sit a hair
/// above a reliability discontinuity, where payoffs cannot be resolved
/// much below this scale, so a tighter slack would reject genuine
/// equilibria on round-off.
pub const DEVIATION_TOL: f64 = 1e-6;

/// Default Gauss-Legendre node count for shock expectations.
pub const DEFAULT_QUADRATURE_NODES: usize = 64;

/// Culture aggregation: baseline, weights, and the investment map
/// h(x) = (1 - baseline) x^beta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CultureMap<T: Real> {
    baseline: T,
    weights: Vec<T>,
    beta: T,
}

impl<T: Real> CultureMap<T> {
    /// Validates and builds a culture map.  Weights must be positive and sum
    /// to 1 (tolerance 1e-9, widened for f32); `beta` must lie in (0, 1] so
    /// `h` is increasing and weakly concave with h(0) = 0, h(1) = 1-baseline.
    pub fn new(baseline: T, weights: Vec<T>, beta: T) -> Result<Self> {
        if baseline < T::zero() || baseline >= T::one() {
            return Err(Error::Domain {
                what: "baseline",
                value: baseline.as_f64(),
                domain: "[0, 1)",
            });
        }
        if beta <= T::zero() || beta > T::one() {
            return Err(Error::Domain {
                what: "beta",
                value: beta.as_f64(),
                domain: "(0, 1]",
            });
        }
        if weights.is_empty() {
            return Err(Error::Weight("weight list is empty".into()));
        }
        let mut sum = T::zero();
        for &w in &weights {
            if w <= T::zero() {
                return Err(Error::Weight(format!("weight {w} is not positive")));
            }
            sum = sum + w;
        }
        let tol = T::of(1e-9).max(T::epsilon() * T::of(weights.len() as f64 * 8.0));
        if (sum - T::one()).abs() > tol {
            return Err(Error::Weight(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self {
            baseline,
            weights,
            beta,
        })
    }

    /// Uniform weights 1/k.
    pub fn uniform(baseline: T, k: usize, beta: T) -> Result<Self> {
        let w = T::one() / T::of(k as f64);
        Self::new(baseline, vec![w; k], beta)
    }

    pub fn baseline(&self) -> T {
        self.baseline
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Number of workers.
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// h(x) = (1 - baseline) x^beta.
    #[inline]
    pub fn h(&self, x: T) -> T {
        let scale = T::one() - self.baseline;
        if self.beta == T::one() {
            scale * x
        } else {
            scale * x.powf(self.beta)
        }
    }

    /// h'(x) = beta (1 - baseline) x^(beta - 1); infinite at 0 when beta < 1.
    #[inline]
    pub fn h_prime(&self, x: T) -> T {
        let scale = T::one() - self.baseline;
        if self.beta == T::one() {
            scale
        } else {
            self.beta * scale * x.powf(self.beta - T::one())
        }
    }
}

/// Aggregate culture strength of an investment profile.
pub fn culture_strength<T: Real>(culture: &CultureMap<T>, x: &[T]) -> Result<T> {
    if x.len() != culture.weights.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: culture.weights.len(),
        });
    }
    let mut pi = culture.baseline;
    for (&xi, &wi) in x.iter().zip(&culture.weights) {
        if xi < T::zero() || xi > T::one() {
            return Err(Error::Domain {
                what: "x_i",
                value: xi.as_f64(),
                domain: "[0, 1]",
            });
        }
        pi = pi + wi * culture.h(xi);
    }
    Ok(pi.min(T::one()))
}

/// Investment cost families.  Both hit an asymptote at x = 1; the plain
/// barrier has c'(0) = alpha > 0, the smooth variant has c'(0) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CostSpec<T: Real> {
    /// c(x) = (1 - x)^(-alpha) - 1.
    Barrier { alpha: T },
    /// c(x) = ((1 - x)^(-alpha) - 1)^gamma with gamma >= 2.
    SmoothBarrier { alpha: T, gamma: T },
}

impl<T: Real> CostSpec<T> {
    /// Checks the family parameters.
    pub fn validate(&self) -> Result<()> {
        match *self {
            CostSpec::Barrier { alpha } if alpha > T::zero() => Ok(()),
            CostSpec::SmoothBarrier { alpha, gamma } if alpha > T::zero() && gamma >= T::of(2.0) => {
                Ok(())
            }
            CostSpec::Barrier { alpha } => Err(Error::InvalidSpec(format!(
                "barrier cost needs alpha > 0, got {alpha}"
            ))),
            CostSpec::SmoothBarrier { alpha, gamma } => Err(Error::InvalidSpec(format!(
                "smooth barrier cost needs alpha > 0 and gamma >= 2, got alpha {alpha}, gamma {gamma}"
            ))),
        }
    }

    /// c(x) on [0, 1); infinite at 1.
    #[inline]
    pub fn cost(&self, x: T) -> T {
        match *self {
            CostSpec::Barrier { alpha } => (T::one() - x).powf(-alpha) - T::one(),
            CostSpec::SmoothBarrier { alpha, gamma } => {
                ((T::one() - x).powf(-alpha) - T::one()).powf(gamma)
            }
        }
    }

    /// c'(x).
    #[inline]
    pub fn cost_prime(&self, x: T) -> T {
        match *self {
            CostSpec::Barrier { alpha } => alpha * (T::one() - x).powf(-alpha - T::one()),
            CostSpec::SmoothBarrier { alpha, gamma } => {
                let u = (T::one() - x).powf(-alpha) - T::one();
                gamma * u.powf(gamma - T::one()) * alpha * (T::one() - x).powf(-alpha - T::one())
            }
        }
    }
}

/// Anticipated-shock layer: with probability `psi` the realized baseline is
/// hit by a shock of size s ~ Uniform[s_lo, s_hi] before production.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockSpec<T: Real> {
    psi: T,
    s_lo: T,
    s_hi: T,
    quadrature_nodes: usize,
}

impl<T: Real> ShockSpec<T> {
    /// Uniform shock sizes on [s_lo, s_hi], 0 < s_lo < s_hi.  The support is
    /// bounded away from 0 so any particular shock size has zero probability
    /// and the no-shock event stays separate.
    pub fn uniform(psi: T, s_lo: T, s_hi: T) -> Result<Self> {
        if psi < T::zero() || psi > T::one() {
            return Err(Error::Domain {
                what: "psi",
                value: psi.as_f64(),
                domain: "[0, 1]",
            });
        }
        if !(s_lo > T::zero() && s_hi > s_lo) {
            return Err(Error::InvalidSpec(format!(
                "shock support needs 0 < s_lo < s_hi, got [{s_lo}, {s_hi}]"
            )));
        }
        Ok(Self {
            psi,
            s_lo,
            s_hi,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
        })
    }

    /// Same spec with a different quadrature node count.
    pub fn with_nodes(mut self, nodes: usize) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::InvalidSpec(
                "quadrature rule needs at least one node".into(),
            ));
        }
        self.quadrature_nodes = nodes;
        Ok(self)
    }

    pub fn psi(&self) -> T {
        self.psi
    }

    pub fn support(&self) -> (T, T) {
        (self.s_lo, self.s_hi)
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.quadrature_nodes
    }
}

/// Full configuration of one investment game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameConfig<T: Real> {
    spec: BranchingSpec<T>,
    culture: CultureMap<T>,
    cost: CostSpec<T>,
    benefits: Vec<T>,
    shocks: Option<ShockSpec<T>>,
}

impl<T: Real> GameConfig<T> {
    /// Validates cross-field consistency (one benefit per worker, positive
    /// benefits, admissible cost parameters).
    pub fn new(
        spec: BranchingSpec<T>,
        culture: CultureMap<T>,
        cost: CostSpec<T>,
        benefits: Vec<T>,
        shocks: Option<ShockSpec<T>>,
    ) -> Result<Self> {
        cost.validate()?;
        if benefits.len() != culture.k() {
            return Err(Error::LengthMismatch {
                left: benefits.len(),
                right: culture.k(),
            });
        }
        if benefits.iter().any(|&a| a < T::zero()) {
            return Err(Error::InvalidSpec("benefits must be nonnegative".into()));
        }
        Ok(Self {
            spec,
            culture,
            cost,
            benefits,
            shocks,
        })
    }

    pub fn spec(&self) -> &BranchingSpec<T> {
        &self.spec
    }

    pub fn culture(&self) -> &CultureMap<T> {
        &self.culture
    }

    pub fn cost(&self) -> &CostSpec<T> {
        &self.cost
    }

    pub fn benefits(&self) -> &[T] {
        &self.benefits
    }

    pub fn shocks(&self) -> Option<&ShockSpec<T>> {
        self.shocks.as_ref()
    }

    /// Number of workers.
    pub fn k(&self) -> usize {
        self.culture.k()
    }

    /// Same game on the same technology at a different depth.
    pub fn with_depth(&self, depth: Depth) -> Self {
        Self {
            spec: self.spec.with_depth(depth),
            culture: self.culture.clone(),
            cost: self.cost,
            benefits: self.benefits.clone(),
            shocks: self.shocks,
        }
    }

    /// Effective shock probability (0 when no shock spec is present).
    fn psi(&self) -> T {
        self.shocks.map(|s| s.psi).unwrap_or_else(T::zero)
    }
}

/// Precomputed pieces for shock expectations: the quadrature rule and the
/// discontinuity locations of the reliability curve (integration kinks).
struct ShockCtx<T: Real> {
    rule: GaussLegendre<T>,
    jump_locations: Vec<T>,
}

/// Builds the shock context when shocks are actually in force.  Passing
/// precomputed `jumps` avoids rescanning the inverse map in inner loops.
fn shock_ctx<T: Real>(config: &GameConfig<T>, jumps: Option<&[T]>) -> Result<Option<ShockCtx<T>>> {
    let spec = match config.shocks {
        Some(s) if s.psi > T::zero() => s,
        _ => return Ok(None),
    };
    let jump_locations = match (jumps, config.spec.depth()) {
        (Some(j), _) => j.to_vec(),
        (None, Depth::Infinite) => find_discontinuities(&config.spec)?
            .iter()
            .map(|c| c.pi)
            .collect(),
        (None, Depth::Finite(_)) => Vec::new(), // finite-depth curves are smooth
    };
    Ok(Some(ShockCtx {
        rule: GaussLegendre::new(spec.quadrature_nodes)?,
        jump_locations,
    }))
}

/// Expectation of `f(pi - s)` over the shock size distribution, splitting the
/// integral at reliability kinks and at the point where `pi - s` hits 0.
fn shock_expectation<T: Real>(
    shocks: &ShockSpec<T>,
    ctx: &ShockCtx<T>,
    pi: T,
    mut f: impl FnMut(T) -> T,
) -> T {
    let (s_lo, s_hi) = (shocks.s_lo, shocks.s_hi);
    let mut kinks: Vec<T> = ctx
        .jump_locations
        .iter()
        .map(|&pj| pi - pj)
        .filter(|&s| s > s_lo && s < s_hi)
        .collect();
    if pi > s_lo && pi < s_hi {
        kinks.push(pi);
    }
    let density = (s_hi - s_lo).recip();
    ctx.rule.integrate_split(s_lo, s_hi, &kinks, |s| {
        f((pi - s).max(T::zero()).min(T::one())) * density
    })
}

/// Shared utility computation; `ctx` carries the shock machinery when needed.
fn utility_inner<T: Real>(
    config: &GameConfig<T>,
    ctx: Option<&ShockCtx<T>>,
    i: usize,
    x: &[T],
) -> Result<T> {
    if i >= config.k() {
        return Err(Error::Domain {
            what: "worker index",
            value: i as f64,
            domain: "0..k",
        });
    }
    let pi = culture_strength(&config.culture, x)?;
    let a = config.benefits[i];
    let depth = config.spec.depth();
    let base = rho_at_depth(&config.spec, pi, depth)?;
    let cost = config.cost.cost(x[i]);
    match (config.shocks.as_ref(), ctx) {
        (Some(shocks), Some(ctx)) => {
            let psi = shocks.psi;
            let expected = shock_expectation(shocks, ctx, pi, |p| {
                rho_at_depth(&config.spec, p, depth).expect("culture argument is clamped")
            });
            Ok((T::one() - psi) * a * base + psi * a * expected - cost)
        }
        // No shock layer (or psi = 0): the no-shock payoff exactly.
        _ => Ok(a * base - cost),
    }
}

/// Expected payoff of worker `i` at profile `x`.
pub fn utility<T: Real>(config: &GameConfig<T>, i: usize, x: &[T]) -> Result<T> {
    utility_inner(config, shock_ctx(config, None)?.as_ref(), i, x)
}

/// Shock term of worker `i`'s first-order condition:
/// `theta_i(x) = psi a_i w_i h'(x_i) E[rho'(pi(x) - s)]`.
///
/// Returns 0 when no shock layer is configured (absent is equivalent to
/// psi = 0).  The weight/benefit/expectation coefficient is evaluated before
/// the `h'(x_i)` factor so that a zero expectation yields exactly 0 even
/// where `h'` diverges (beta < 1 at x_i = 0).
pub fn shock_expectation_theta<T: Real>(config: &GameConfig<T>, i: usize, x: &[T]) -> Result<T> {
    if i >= config.k() {
        return Err(Error::Domain {
            what: "worker index",
            value: i as f64,
            domain: "0..k",
        });
    }
    let ctx = match shock_ctx(config, None)? {
        Some(ctx) => ctx,
        None => return Ok(T::zero()),
    };
    let shocks = config.shocks.as_ref().expect("ctx implies shocks");
    let pi = culture_strength(&config.culture, x)?;
    let depth = config.spec.depth();
    let expected = shock_expectation(shocks, &ctx, pi, |p| {
        rho_derivative(&config.spec, p, depth)
            .expect("culture argument is clamped")
            .value
    });
    let coeff = shocks.psi * config.benefits[i] * config.culture.weights[i] * expected;
    if coeff == T::zero() {
        return Ok(T::zero());
    }
    Ok(coeff * config.culture.h_prime(x[i]))
}

/// Classification of an equilibrium profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumKind {
    /// All workers invest 0.
    Zero,
    /// All workers invest strictly positive amounts.
    Positive,
}

/// A solved equilibrium (or stationary candidate) of the investment game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult<T: Real> {
    /// Investment profile.
    pub x_star: Vec<T>,
    /// Culture strength of the profile.
    pub pi_star: T,
    pub kind: EquilibriumKind,
    /// Net marginal utility per worker at the profile (for corner profiles,
    /// the positive part of the upward margin).
    pub foc_residuals: Vec<T>,
    /// For interior roots: the net marginal utility crosses from + to -.
    /// For the zero profile: no profitable unilateral deviation exists.
    pub stable: bool,
    /// Expected payoffs per worker.
    pub payoffs: Vec<T>,
}

/// Net marginal utility of one worker at a symmetric profile `x` when the
/// whole organization plays `x`: culture moves only through the worker's own
/// weight.
fn symmetric_margin<T: Real>(config: &GameConfig<T>, ctx: Option<&ShockCtx<T>>, l: u32, x: T) -> T {
    let culture = &config.culture;
    let pi = (culture.baseline + culture.h(x)).min(T::one());
    let a = config.benefits[0];
    let w = culture.weights[0];
    let hp = culture.h_prime(x);
    let d = rho_derivative(&config.spec, pi, Depth::Finite(l))
        .expect("pi stays in [0, 1]")
        .value;
    let mut margin = match (config.shocks.as_ref(), ctx) {
        (Some(shocks), Some(ctx)) => {
            let psi = shocks.psi;
            let expected = shock_expectation(shocks, ctx, pi, |p| {
                rho_derivative(&config.spec, p, Depth::Finite(l))
                    .expect("culture argument is clamped")
                    .value
            });
            let coeff = a * w * ((T::one() - psi) * d + psi * expected);
            if coeff == T::zero() {
                T::zero()
            } else {
                coeff * hp
            }
        }
        _ => {
            let coeff = a * w * d;
            if coeff == T::zero() {
                T::zero()
            } else {
                coeff * hp
            }
        }
    };
    margin = margin - config.cost.cost_prime(x);
    margin
}

/// All interior stationary points of the symmetric game at depth `l`.
///
/// Requires identical weights and benefits.  The net marginal utility
/// `M(x) = (1-psi) a w rho_L'(pi(x)) h'(x) + theta(x) - c'(x)` with
/// `pi(x) = baseline + h(x)` is scanned on a [`EQ_SCAN_POINTS`] grid over
/// [0, 1); every sign change is refined by bisection.  Roots are reported
/// ascending with their stability (`M` crossing from + to -); an empty list
/// is a valid outcome.  Note the configured depth of `config.spec` is
/// ignored in favor of `l`.
pub fn solve_symmetric_equilibrium<T: Real>(
    config: &GameConfig<T>,
    l: u32,
) -> Result<Vec<EquilibriumResult<T>>> {
    if l == 0 {
        return Err(Error::Domain {
            what: "L",
            value: 0.0,
            domain: "[1, inf)",
        });
    }
    let k = config.k();
    let w0 = config.culture.weights[0];
    let a0 = config.benefits[0];
    let close = |p: T, q: T| (p - q).abs() <= T::epsilon() * T::of(16.0);
    if !config.culture.weights.iter().all(|&w| close(w, w0))
        || !config.benefits.iter().all(|&a| close(a, a0))
    {
        return Err(Error::InvalidSpec(
            "symmetric solver requires identical weights and identical benefits".into(),
        ));
    }
    let config_l = config.with_depth(Depth::Finite(l));
    let ctx = shock_ctx(&config_l, None)?;
    let m = |x: T| symmetric_margin(&config_l, ctx.as_ref(), l, x);

    let hi = T::one() - T::of(1e-6);
    let grid = linspace(T::zero(), hi, EQ_SCAN_POINTS);
    let values: Vec<T> = grid.iter().map(|&x| m(x)).collect();
    let tol = scaled_tol::<T>(1e-13);
    let mut results = Vec::new();
    for i in 0..grid.len() - 1 {
        let (lo, hi) = (values[i], values[i + 1]);
        let root = if lo == T::zero() {
            if i == 0 || (values[i - 1] > T::zero()) != (hi > T::zero()) {
                Some((grid[i], values[i.max(1) - 1] > T::zero()))
            } else {
                None
            }
        } else if (lo > T::zero()) != (hi > T::zero()) {
            let r = bisect_root(m, grid[i], grid[i + 1], lo, tol);
            Some((r, lo > T::zero()))
        } else {
            None
        };
        if let Some((x_star, from_above)) = root {
            if x_star <= T::zero() {
                continue; // boundary stationarity at 0 is the zero profile's business
            }
            let profile = vec![x_star; k];
            let pi_star = culture_strength(&config_l.culture, &profile)?;
            let payoff = utility_inner(&config_l, ctx.as_ref(), 0, &profile)?;
            let residual = m(x_star);
            results.push(EquilibriumResult {
                x_star: profile,
                pi_star,
                kind: EquilibriumKind::Positive,
                foc_residuals: vec![residual; k],
                stable: from_above,
                payoffs: vec![payoff; k],
            });
        }
    }
    Ok(results)
}

/// The no-contribution profile as a result record (always constructible; use
/// [`check_zero_equilibrium`] to learn whether it is in fact an equilibrium,
/// which is also what its `stable` field reports).
pub fn zero_equilibrium<T: Real>(config: &GameConfig<T>) -> Result<EquilibriumResult<T>> {
    let k = config.k();
    let zeros = vec![T::zero(); k];
    let ctx = shock_ctx(config, None)?;
    let pi_star = config.culture.baseline;
    let mut payoffs = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for i in 0..k {
        payoffs.push(utility_inner(config, ctx.as_ref(), i, &zeros)?);
        // Upward KKT margin at the corner: positive part of the net marginal
        // utility of the first unit of investment.
        let d = rho_derivative(&config.spec, pi_star, config.spec.depth())?.value;
        let coeff = (T::one() - config.psi()) * config.benefits[i] * config.culture.weights[i] * d;
        let theta = shock_expectation_theta(config, i, &zeros)?;
        let margin = if coeff == T::zero() {
            theta - config.cost.cost_prime(T::zero())
        } else {
            coeff * config.culture.h_prime(T::zero()) + theta - config.cost.cost_prime(T::zero())
        };
        residuals.push(margin.max(T::zero()));
    }
    let stable = check_zero_equilibrium(config)?;
    Ok(EquilibriumResult {
        x_star: zeros,
        pi_star,
        kind: EquilibriumKind::Zero,
        foc_residuals: residuals,
        stable,
        payoffs,
    })
}

/// Best payoff a worker can reach by unilateral deviation, scanned on a
/// [`DEVIATION_GRID`] grid of own investments (including 0).
fn best_deviation<T: Real>(
    config: &GameConfig<T>,
    ctx: Option<&ShockCtx<T>>,
    i: usize,
    profile: &[T],
) -> Result<T> {
    let mut work = profile.to_vec();
    let mut best = T::neg_infinity();
    for x in linspace(T::zero(), T::one() - T::of(1e-6), DEVIATION_GRID) {
        work[i] = x;
        let u = utility_inner(config, ctx, i, &work)?;
        if u > best {
            best = u;
        }
    }
    Ok(best)
}

/// The selected symmetric equilibrium at depth `l`: the largest stable
/// interior root that survives the unilateral-deviation payoff check (in
/// particular its payoff weakly exceeds deviating to zero investment), or
/// the no-contribution profile when no interior root survives.
pub fn selected_symmetric_equilibrium<T: Real>(
    config: &GameConfig<T>,
    l: u32,
) -> Result<EquilibriumResult<T>> {
    let config_l = config.with_depth(Depth::Finite(l));
    let ctx = shock_ctx(&config_l, None)?;
    let mut roots = solve_symmetric_equilibrium(config, l)?;
    roots.reverse(); // descending in x
    let slack = T::of(DEVIATION_TOL);
    for root in roots {
        if !root.stable {
            continue;
        }
        let best = best_deviation(&config_l, ctx.as_ref(), 0, &root.x_star)?;
        if root.payoffs[0] + slack >= best {
            return Ok(root);
        }
    }
    zero_equilibrium(&config_l)
}

/// True when no worker can profit by deviating unilaterally from the
/// all-zeros profile (scanned on a [`DEVIATION_GRID`] grid per distinct
/// (benefit, weight) class).
pub fn check_zero_equilibrium<T: Real>(config: &GameConfig<T>) -> Result<bool> {
    let k = config.k();
    let ctx = shock_ctx(config, None)?;
    let zeros = vec![T::zero(); k];
    let tol = T::of(1e-12);
    let mut seen: Vec<(T, T)> = Vec::new();
    for i in 0..k {
        let class = (config.benefits[i], config.culture.weights[i]);
        if seen.contains(&class) {
            continue;
        }
        seen.push(class);
        let stay = utility_inner(config, ctx.as_ref(), i, &zeros)?;
        let best = best_deviation(config, ctx.as_ref(), i, &zeros)?;
        if best > stay + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Interior best-response inversion: the x with c'(x)/h'(x) = `target`,
/// clamped to 0 at the corner.  `phi(x) = c'(x) - target h'(x)` changes sign
/// once because c'/h' is increasing.
fn g_inverse<T: Real>(config: &GameConfig<T>, target: T) -> T {
    let culture = &config.culture;
    let cost = &config.cost;
    let phi = |x: T| cost.cost_prime(x) - target * culture.h_prime(x);
    let hi = T::one() - T::of(1e-12);
    let lo = T::zero();
    let phi_lo = phi(lo);
    if phi_lo >= T::zero() {
        return T::zero(); // first unit already unprofitable
    }
    if phi(hi) <= T::zero() {
        return hi; // pinned at the barrier
    }
    bisect_root(phi, lo, hi, phi_lo, scaled_tol::<T>(1e-14))
}

/// One worker class in the heterogeneous solver.
struct WorkerClass<T: Real> {
    benefit: T,
    weight: T,
    members: Vec<usize>,
}

fn worker_classes<T: Real>(config: &GameConfig<T>) -> Vec<WorkerClass<T>> {
    let mut classes: Vec<WorkerClass<T>> = Vec::new();
    for i in 0..config.k() {
        let (a, w) = (config.benefits[i], config.culture.weights[i]);
        if let Some(c) = classes.iter_mut().find(|c| c.benefit == a && c.weight == w) {
            c.members.push(i);
        } else {
            classes.push(WorkerClass {
                benefit: a,
                weight: w,
                members: vec![i],
            });
        }
    }
    classes
}

/// The heterogeneous (infinite-depth) positive equilibrium, or `None`.
///
/// Scans the culture aggregate `P(pi)` (see the module docs) for fixed points
/// on [first discontinuity, 1], refines each crossing by bisection, and
/// walks candidates from the largest down: a candidate is returned once every
/// worker invests strictly positively and every worker class survives the
/// unilateral-deviation payoff check.  Requires an infinite-depth complex
/// technology with at least one discontinuity.
pub fn solve_heterogeneous_equilibrium<T: Real>(
    config: &GameConfig<T>,
) -> Result<Option<EquilibriumResult<T>>> {
    let jumps: Vec<T> = find_discontinuities(&config.spec)?
        .iter()
        .map(|c| c.pi)
        .collect();
    solve_heterogeneous_with_jumps(config, &jumps)
}

/// Worker of `solve_heterogeneous_equilibrium`; takes precomputed
/// discontinuity locations so sweeps over many configs on one technology do
/// not rescan the inverse map.
pub(crate) fn solve_heterogeneous_with_jumps<T: Real>(
    config: &GameConfig<T>,
    jumps: &[T],
) -> Result<Option<EquilibriumResult<T>>> {
    if config.spec.depth() != Depth::Infinite {
        return Err(Error::InvalidSpec(
            "heterogeneous solver works on the infinite-depth technology".into(),
        ));
    }
    if jumps.is_empty() {
        return Err(Error::InvalidSpec(
            "technology has no critical point (reliability is continuous)".into(),
        ));
    }
    let ctx = shock_ctx(config, Some(jumps))?;
    let classes = worker_classes(config);
    let psi = config.psi();

    // Per-class inverse best-response target at culture strength pi.
    let target = |class: &WorkerClass<T>, pi: T| -> Result<T> {
        let d = rho_derivative(&config.spec, pi, Depth::Infinite)?.value;
        let mut t = (T::one() - psi) * class.benefit * class.weight * d;
        if let (Some(shocks), Some(ctx)) = (config.shocks.as_ref(), ctx.as_ref()) {
            let expected = shock_expectation(shocks, ctx, pi, |p| {
                rho_derivative(&config.spec, p, Depth::Infinite)
                    .expect("culture argument is clamped")
                    .value
            });
            t = t + psi * class.benefit * class.weight * expected;
        }
        Ok(t)
    };

    // Aggregate culture response P(pi) - pi.
    let excess = |pi: T| -> Result<T> {
        let mut agg = config.culture.baseline;
        for class in &classes {
            let x = g_inverse(config, target(class, pi)?);
            agg = agg + T::of(class.members.len() as f64) * class.weight * config.culture.h(x);
        }
        Ok(agg.min(T::one()) - pi)
    };

    let scan_lo = jumps[0];
    let grid = linspace(scan_lo, T::one(), EQ_SCAN_POINTS);
    let mut values = Vec::with_capacity(grid.len());
    for &pi in &grid {
        values.push(excess(pi)?);
    }
    let tol = scaled_tol::<T>(1e-13);
    // Collect fixed-point candidates (largest first).
    let mut candidates: Vec<(T, bool)> = Vec::new();
    for i in (0..grid.len() - 1).rev() {
        let (lo, hi) = (values[i], values[i + 1]);
        if lo == T::zero() {
            candidates.push((grid[i], i > 0 && values[i - 1] > T::zero()));
        } else if (lo > T::zero()) != (hi > T::zero()) {
            let mut f = |p: T| excess(p).expect("scan domain is valid");
            let root = bisect_root(&mut f, grid[i], grid[i + 1], lo, tol);
            candidates.push((root, lo > T::zero()));
        }
    }

    let slack = T::of(DEVIATION_TOL);
    for (pi_star, stable) in candidates {
        let mut x_star = vec![T::zero(); config.k()];
        let mut residuals = vec![T::zero(); config.k()];
        let mut all_positive = true;
        for class in &classes {
            let t = target(class, pi_star)?;
            let x = g_inverse(config, t);
            if x <= T::zero() {
                all_positive = false;
                break;
            }
            let res = t * config.culture.h_prime(x) - config.cost.cost_prime(x);
            for &i in &class.members {
                x_star[i] = x;
                residuals[i] = res;
            }
        }
        if !all_positive {
            continue;
        }
        let mut ok = true;
        let mut payoffs = vec![T::zero(); config.k()];
        for class in &classes {
            let i = class.members[0];
            let stay = utility_inner(config, ctx.as_ref(), i, &x_star)?;
            let best = best_deviation(config, ctx.as_ref(), i, &x_star)?;
            if stay + slack < best {
                ok = false;
                break;
            }
            for &j in &class.members {
                payoffs[j] = stay;
            }
        }
        if !ok {
            continue;
        }
        let pi_exact = culture_strength(&config.culture, &x_star)?;
        return Ok(Some(EquilibriumResult {
            x_star,
            pi_star: pi_exact,
            kind: EquilibriumKind::Positive,
            foc_residuals: residuals,
            stable,
            payoffs,
        }));
    }
    Ok(None)
}

/// Fragility profile of an equilibrium: reliability after baseline shocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FragilityReport<T: Real> {
    /// Culture strength at the assessed equilibrium.
    pub pi_star: T,
    /// Reliability at the assessed equilibrium (s = 0).
    pub rho_at_equilibrium: T,
    /// Shock sizes assessed.
    pub shock_grid: Vec<T>,
    /// Reliability at culture pi_star - s, per shock size.
    pub rho_after_shock: Vec<T>,
    /// Nearest reliability discontinuity at or below pi_star (infinite depth
    /// only).
    pub nearest_discontinuity: Option<T>,
    /// Size of the drop available at that discontinuity: rho at the
    /// equilibrium minus rho just below the jump.
    pub gamma_gap: Option<T>,
}

impl<T: Real> FragilityReport<T> {
    /// True when every assessed shock larger than `epsilon` wipes reliability
    /// out completely.
    pub fn epsilon_fragile(&self, epsilon: T) -> bool {
        self.shock_grid
            .iter()
            .zip(&self.rho_after_shock)
            .all(|(&s, &r)| s <= epsilon || r == T::zero())
    }
}

/// Evaluates reliability after each shock in `shock_grid` applied to the
/// equilibrium culture strength of `eq`, at the configured depth.
pub fn assess_fragility<T: Real>(
    config: &GameConfig<T>,
    eq: &EquilibriumResult<T>,
    shock_grid: &[T],
) -> Result<FragilityReport<T>> {
    let depth = config.spec.depth();
    let pi_star = eq.pi_star;
    let rho_at_equilibrium = rho_at_depth(&config.spec, pi_star, depth)?;
    let mut rho_after_shock = Vec::with_capacity(shock_grid.len());
    for &s in shock_grid {
        if s < T::zero() {
            return Err(Error::Domain {
                what: "shock size",
                value: s.as_f64(),
                domain: "[0, inf)",
            });
        }
        let pi = (pi_star - s).max(T::zero()).min(T::one());
        rho_after_shock.push(rho_at_depth(&config.spec, pi, depth)?);
    }
    let (nearest_discontinuity, gamma_gap) = match depth {
        Depth::Infinite => {
            let jumps = find_discontinuities(&config.spec)?;
            let slack = T::of(1e-12);
            match jumps.iter().filter(|c| c.pi <= pi_star + slack).last() {
                Some(c) => {
                    let below = (c.pi - T::of(1e-9)).max(T::zero());
                    let rho_below = rho_infinite(&config.spec, below)?;
                    (Some(c.pi), Some(rho_at_equilibrium - rho_below))
                }
                None => (None, None),
            }
        }
        Depth::Finite(_) => (None, None),
    };
    Ok(FragilityReport {
        pi_star,
        rho_at_equilibrium,
        shock_grid: shock_grid.to_vec(),
        rho_after_shock,
        nearest_discontinuity,
        gamma_gap,
    })
}

/// Convenience: derivative of reliability at the configured depth (exposed
/// for callers assembling their own diagnostics).
pub fn rho_derivative_at<T: Real>(config: &GameConfig<T>, pi: T) -> Result<Derivative<T>> {
    rho_derivative(&config.spec, pi, config.spec.depth())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reliability::rho_finite;

    /// The worked small-organization example: regular 2x2, a = 2, barrier
    /// alpha = 0.08, baseline 0, uniform weights, k = L = 10, linear h.
    fn small_org(k: usize) -> GameConfig<f64> {
        GameConfig::new(
            BranchingSpec::regular(2, 2, Depth::Finite(10)).unwrap(),
            CultureMap::uniform(0.0, k, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            vec![2.0; k],
            None,
        )
        .unwrap()
    }

    fn infinite_org(k: usize, baseline: f64, a: f64) -> GameConfig<f64> {
        GameConfig::new(
            BranchingSpec::regular(2, 2, Depth::Infinite).unwrap(),
            CultureMap::uniform(baseline, k, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            vec![a; k],
            None,
        )
        .unwrap()
    }

    #[test]
    fn culture_strength_basics() {
        let culture = CultureMap::<f64>::uniform(0.3, 4, 1.0).unwrap();
        assert_eq!(culture_strength(&culture, &[0.0; 4]).unwrap(), 0.3);
        let full = culture_strength(&culture, &[1.0; 4]).unwrap();
        assert!((full - 1.0).abs() < 1e-12);
        assert!(culture_strength(&culture, &[0.5; 3]).is_err());
        assert!(culture_strength(&culture, &[0.5, 0.5, 0.5, 1.5]).is_err());
    }

    #[test]
    fn culture_map_validation() {
        assert!(CultureMap::new(0.5, vec![0.5, 0.5], 1.0).is_ok());
        assert!(matches!(
            CultureMap::new(0.5, vec![0.5, 0.4], 1.0),
            Err(Error::Weight(_))
        ));
        assert!(matches!(
            CultureMap::new(0.5, vec![1.5, -0.5], 1.0),
            Err(Error::Weight(_))
        ));
        assert!(CultureMap::new(1.0, vec![1.0], 1.0).is_err());
        assert!(CultureMap::new(0.5, vec![1.0], 0.0).is_err());
        assert!(CultureMap::new(0.5, vec![1.0], 0.5).is_ok());
    }

    #[test]
    fn concave_h_and_its_slope() {
        let culture = CultureMap::<f64>::new(0.2, vec![1.0], 0.5).unwrap();
        assert_eq!(culture.h(0.0), 0.0);
        assert!((culture.h(1.0) - 0.8).abs() < 1e-15);
        assert!((culture.h(0.25) - 0.4).abs() < 1e-15);
        assert!((culture.h_prime(0.25) - 0.8).abs() < 1e-15);
        assert_eq!(culture.h_prime(0.0), f64::INFINITY);
    }

    #[test]
    fn barrier_cost_reference_value() {
        let cost = CostSpec::Barrier { alpha: 0.08 };
        assert_eq!(cost.cost(0.0), 0.0);
        // (1 - 0.5)^(-0.08) - 1 = 2^0.08 - 1
        assert!((cost.cost(0.5) - (2f64.powf(0.08) - 1.0)).abs() < 1e-15);
        assert!((cost.cost(0.5) - 0.057_018).abs() < 1e-6);
        assert!((cost.cost_prime(0.0) - 0.08).abs() < 1e-15);
    }

    #[test]
    fn smooth_barrier_has_flat_start() {
        let cost = CostSpec::SmoothBarrier {
            alpha: 0.08,
            gamma: 2.0,
        };
        assert_eq!(cost.cost(0.0), 0.0);
        assert_eq!(cost.cost_prime(0.0), 0.0);
        assert!(cost.cost(0.9) > cost.cost(0.5));
        assert!(CostSpec::SmoothBarrier {
            alpha: 0.08,
            gamma: 1.5
        }
        .validate()
        .is_err());
        assert!(CostSpec::Barrier { alpha: -0.1f64 }.validate().is_err());
    }

    #[test]
    fn utility_zero_profile_below_threshold_is_zero() {
        let config = infinite_org(10, 0.5, 2.0);
        let u = utility(&config, 0, &[0.0; 10]).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn utility_psi_zero_matches_no_shock_path_exactly() {
        let base = infinite_org(5, 0.6, 2.0);
        let with_psi0 = GameConfig::new(
            base.spec().clone(),
            base.culture().clone(),
            *base.cost(),
            base.benefits().to_vec(),
            Some(ShockSpec::uniform(0.0, 0.05, 0.15).unwrap()),
        )
        .unwrap();
        let x = vec![0.7, 0.2, 0.9, 0.4, 0.55];
        for i in 0..5 {
            assert_eq!(
                utility(&base, i, &x).unwrap(),
                utility(&with_psi0, i, &x).unwrap()
            );
        }
    }

    #[test]
    fn shock_spec_validation() {
        assert!(ShockSpec::uniform(0.5f64, 0.05, 0.15).is_ok());
        assert!(ShockSpec::uniform(1.5f64, 0.05, 0.15).is_err());
        assert!(ShockSpec::uniform(0.5f64, 0.0, 0.15).is_err());
        assert!(ShockSpec::uniform(0.5f64, 0.2, 0.15).is_err());
        assert!(ShockSpec::uniform(0.5f64, 0.05, 0.15)
            .unwrap()
            .with_nodes(0)
            .is_err());
    }

    #[test]
    fn theta_vanishes_without_shocks_and_scales_inversely_with_k() {
        let profile = |k: usize| vec![0.5; k];
        let config_no = infinite_org(10, 0.8, 2.0);
        assert_eq!(
            shock_expectation_theta(&config_no, 0, &profile(10)).unwrap(),
            0.0
        );

        let with_shocks = |k: usize| {
            GameConfig::new(
                BranchingSpec::regular(2, 2, Depth::Infinite).unwrap(),
                CultureMap::uniform(0.8, k, 1.0).unwrap(),
                CostSpec::Barrier { alpha: 0.08 },
                vec![2.0; k],
                Some(ShockSpec::uniform(0.5, 0.05, 0.15).unwrap()),
            )
            .unwrap()
        };
        let t10 = shock_expectation_theta(&with_shocks(10), 0, &profile(10)).unwrap();
        let t100 = shock_expectation_theta(&with_shocks(100), 0, &profile(100)).unwrap();
        assert!(t10 > 0.0);
        // Same aggregate culture, so the expectation is identical and theta
        // scales exactly like the weight 1/k.
        assert!((t100 - t10 / 10.0).abs() < 1e-12 * t10.max(1.0));
    }

    #[test]
    fn theta_is_zero_when_shocks_land_in_the_dead_zone() {
        // pi = 0.7: the whole shocked range [0.55, 0.65] sits below the
        // critical point, where rho' = 0.
        let config = GameConfig::new(
            BranchingSpec::regular(2, 2, Depth::Infinite).unwrap(),
            CultureMap::uniform(0.7, 10, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            vec![2.0; 10],
            Some(ShockSpec::uniform(0.5, 0.05, 0.15).unwrap()),
        )
        .unwrap();
        assert_eq!(
            shock_expectation_theta(&config, 0, &[0.0; 10]).unwrap(),
            0.0
        );
    }

    #[test]
    fn symmetric_solver_reproduces_the_worked_example() {
        let config = small_org(10);
        let roots = solve_symmetric_equilibrium(&config, 10).unwrap();
        assert_eq!(roots.len(), 2);
        // Frozen from an independent solve of the first-order condition:
        // unstable root near 0.7504, stable root near 0.85112.
        assert!((roots[0].pi_star - 0.750_395_856_6).abs() < 1e-8);
        assert!(!roots[0].stable);
        assert!((roots[1].pi_star - 0.851_116_746_078_5).abs() < 1e-9);
        assert!(roots[1].stable);
        for r in &roots {
            assert!(r.foc_residuals.iter().all(|m| m.abs() < 1e-8));
            assert_eq!(r.kind, EquilibriumKind::Positive);
        }

        let selected = selected_symmetric_equilibrium(&config, 10).unwrap();
        assert!((selected.pi_star - 0.851_116_746_078_5).abs() < 1e-9);
        let rho10 = rho_finite(config.spec(), selected.pi_star, 10).unwrap();
        assert!((rho10 - 0.880_794_458_84).abs() < 1e-9);
        assert!((selected.payoffs[0] - 1.597_000_9).abs() < 1e-6);
    }

    #[test]
    fn symmetric_solver_with_no_benefit_selects_zero() {
        let config = GameConfig::new(
            BranchingSpec::regular(2, 2, Depth::Finite(10)).unwrap(),
            CultureMap::uniform(0.0, 10, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            vec![0.0; 10],
            None,
        )
        .unwrap();
        assert!(solve_symmetric_equilibrium(&config, 10).unwrap().is_empty());
        let selected = selected_symmetric_equilibrium(&config, 10).unwrap();
        assert_eq!(selected.kind, EquilibriumKind::Zero);
        assert!(selected.stable);
        assert_eq!(selected.pi_star, 0.0);
    }

    #[test]
    fn symmetric_solver_rejects_heterogeneous_input() {
        let config = GameConfig::new(
            BranchingSpec::regular(2, 2, Depth::Finite(10)).unwrap(),
            CultureMap::uniform(0.0, 2, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            vec![2.0, 3.0],
            None,
        )
        .unwrap();
        assert!(matches!(
            solve_symmetric_equilibrium(&config, 10),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn zero_equilibrium_holds_for_large_flat_organizations() {
        // k = 50 and baseline 0.5: one worker moves culture by at most 0.01,
        // nowhere near the critical point, so nobody invests.
        let config = infinite_org(50, 0.5, 2.0);
        assert!(check_zero_equilibrium(&config).unwrap());
        let zero = zero_equilibrium(&config).unwrap();
        assert_eq!(zero.kind, EquilibriumKind::Zero);
        assert!(zero.stable);
        assert_eq!(zero.payoffs, vec![0.0; 50]);
        assert_eq!(zero.foc_residuals, vec![0.0; 50]);
    }

    #[test]
    fn zero_equilibrium_fails_for_a_solo_worker_with_high_stakes() {
        // A single worker with a = 10 and baseline 0.8 can push culture past
        // the critical point single-handedly and profits from doing so.
        let config = infinite_org(1, 0.8, 10.0);
        assert!(!check_zero_equilibrium(&config).unwrap());
        let zero = zero_equilibrium(&config).unwrap();
        assert!(!zero.stable);
    }

    #[test]
    fn zero_equilibrium_trivially_holds_without_benefits() {
        let config = infinite_org(3, 0.9, 0.0);
        assert!(check_zero_equilibrium(&config).unwrap());
    }

    #[test]
    fn heterogeneous_solver_requires_a_critical_point() {
        let config = GameConfig::new(
            BranchingSpec::regular(1, 2, Depth::Infinite).unwrap(),
            CultureMap::uniform(0.3, 10, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            vec![2.0; 10],
            None,
        )
        .unwrap();
        assert!(matches!(
            solve_heterogeneous_equilibrium(&config),
            Err(Error::InvalidSpec(_))
        ));
        let finite = small_org(10);
        assert!(matches!(
            solve_heterogeneous_equilibrium(&finite),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn heterogeneous_equilibria_approach_the_critical_point() {
        // Frozen sweep: pi* for k in {10, 50, 250} with a = 2, baseline 0.
        let expect = [
            (10usize, 0.857_302_97),
            (50, 0.844_743_36),
            (250, 0.843_793_83),
        ];
        let mut prev_gap = f64::INFINITY;
        for (k, pi_expected) in expect {
            let eq = solve_heterogeneous_equilibrium(&infinite_org(k, 0.0, 2.0))
                .unwrap()
                .expect("positive equilibrium exists");
            assert_eq!(eq.kind, EquilibriumKind::Positive);
            assert!(
                (eq.pi_star - pi_expected).abs() < 1e-6,
                "k={k}: {} vs {pi_expected}",
                eq.pi_star
            );
            assert!(eq.x_star.iter().all(|&x| x > 0.0));
            assert!(eq.foc_residuals.iter().all(|m| m.abs() < 1e-8));
            let gap = (eq.pi_star - 27.0 / 32.0).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
    }

    #[test]
    fn heterogeneous_solver_returns_none_when_deviation_wins() {
        // Low stakes: the fixed point exists geometrically but deviating to
        // zero beats holding the culture up, so no positive equilibrium.
        let config = infinite_org(250, 0.55, 0.1);
        assert!(solve_heterogeneous_equilibrium(&config).unwrap().is_none());
    }

    #[test]
    fn heterogeneous_solver_handles_two_classes() {
        let spec = BranchingSpec::regular(2, 2, Depth::Infinite).unwrap();
        let k = 20;
        let mut weights = vec![1.0 / (k as f64); k];
        // Make the first ten workers twice as heavy as the last ten.
        for w in weights.iter_mut().take(10) {
            *w = 2.0 / 30.0;
        }
        for w in weights.iter_mut().skip(10) {
            *w = 1.0 / 30.0;
        }
        let mut benefits = vec![2.0; k];
        for b in benefits.iter_mut().skip(10) {
            *b = 3.0;
        }
        let config = GameConfig::new(
            spec,
            CultureMap::new(0.0, weights, 1.0).unwrap(),
            CostSpec::Barrier { alpha: 0.08 },
            benefits,
            None,
        )
        .unwrap();
        let eq = solve_heterogeneous_equilibrium(&config)
            .unwrap()
            .expect("positive equilibrium");
        // Within a class all investments agree; across classes they differ.
        assert!(eq.x_star[..10].windows(2).all(|w| w[0] == w[1]));
        assert!(eq.x_star[10..].windows(2).all(|w| w[0] == w[1]));
        assert_ne!(eq.x_star[0], eq.x_star[10]);
        assert!(eq.foc_residuals.iter().all(|m| m.abs() < 1e-8));
        let pi = culture_strength(config.culture(), &eq.x_star).unwrap();
        assert!((pi - eq.pi_star).abs() < 1e-10);
    }

    #[test]
    fn fragility_of_a_near_critical_equilibrium() {
        let config = infinite_org(250, 0.0, 2.0);
        let eq = solve_heterogeneous_equilibrium(&config).unwrap().unwrap();
        // pi*(250) is ~4.4e-5 above 27/32, so a 1e-5 shock is survivable but
        // anything past the gap zeroes output.
        let report = assess_fragility(&config, &eq, &[0.0, 1e-5, 0.05, 0.2]).unwrap();
        assert_eq!(report.rho_after_shock[0], report.rho_at_equilibrium);
        assert!(report.rho_after_shock[1] > 0.7);
        assert_eq!(report.rho_after_shock[2], 0.0);
        assert_eq!(report.rho_after_shock[3], 0.0);
        assert!(report.epsilon_fragile(0.04));
        assert!(!report.epsilon_fragile(5e-6));
        let jump = report.nearest_discontinuity.unwrap();
        assert!((jump - 27.0 / 32.0).abs() < 1e-6);
        // Just below the jump reliability is 0, so the whole level is the gap.
        assert!((report.gamma_gap.unwrap() - report.rho_at_equilibrium).abs() < 1e-12);
    }

    #[test]
    fn fragility_of_a_calm_zero_profile() {
        let config = infinite_org(10, 0.95, 2.0);
        let zero = zero_equilibrium(&config).unwrap();
        let report = assess_fragility(&config, &zero, &[0.05]).unwrap();
        assert!((report.rho_after_shock[0] - 0.966_330_999_247_576_6).abs() < 1e-9);
        assert!(!report.epsilon_fragile(0.04));
    }

    #[test]
    fn game_config_validation() {
        let spec = BranchingSpec::regular(2, 2, Depth::Infinite).unwrap();
        let culture = CultureMap::uniform(0.5, 3, 1.0).unwrap();
        assert!(matches!(
            GameConfig::new(
                spec.clone(),
                culture.clone(),
                CostSpec::Barrier { alpha: 0.08 },
                vec![2.0; 4],
                None
            ),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(GameConfig::new(
            spec,
            culture,
            CostSpec::Barrier { alpha: -1.0 },
            vec![2.0; 3],
            None
        )
        .is_err());
    }
}
