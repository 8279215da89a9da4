//! Choosing between a simple and a complex project, and the culture argmax.
//!
//! An organization holds a menu of two technologies: a simple one (every
//! task needs exactly one subtask type, so reliability degrades gracefully)
//! and a complex, more valuable one whose reliability jumps at a critical
//! culture strength.  As the baseline culture varies, three thresholds
//! organize behavior: above `pi_1` the simple project produces output with
//! no investment; above `pi_2` workers can hold the complex technology at
//! its critical point and the organization prefers it; above `pi_3` (the
//! critical point itself) the complex technology works even with zero
//! investment.  [`compute_envelope`] traces both the no-investment value and
//! the equilibrium value over a baseline grid; [`find_thresholds`] locates
//! the three thresholds; [`choose_culture`] is the argmax primitive for
//! picking among candidate baselines.

use crate::branching::{BranchingSpec, Depth};
use crate::equilibrium::{
    solve_heterogeneous_with_jumps, CostSpec, CultureMap, EquilibriumResult, GameConfig, ShockSpec,
};
use crate::error::{Error, Result};
use crate::numerics::bisect_predicate;
use crate::real::Real;
use crate::reliability::{find_discontinuities, rho_at_depth};
use serde::Serialize;
use std::collections::BTreeMap;

/// Bisection tolerance (in baseline culture) for threshold refinement.
pub const THRESHOLD_TOL: f64 = 1e-4;

/// Game primitives shared by every baseline on the envelope: everything a
/// [`GameConfig`] needs except the technology and the baseline itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameTemplate<T: Real> {
    pub weights: Vec<T>,
    pub beta: T,
    pub benefits: Vec<T>,
    pub cost: CostSpec<T>,
    pub shocks: Option<ShockSpec<T>>,
}

impl<T: Real> GameTemplate<T> {
    /// Builds the game at a specific technology and baseline.  Validation
    /// happens here, through the [`CultureMap`] and [`GameConfig`]
    /// constructors.
    pub fn instantiate(&self, spec: BranchingSpec<T>, baseline: T) -> Result<GameConfig<T>> {
        let culture = CultureMap::new(baseline, self.weights.clone(), self.beta)?;
        GameConfig::new(spec, culture, self.cost, self.benefits.clone(), self.shocks)
    }
}

/// The two-technology project menu.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectMenu<T: Real> {
    simple_spec: BranchingSpec<T>,
    complex_spec: BranchingSpec<T>,
    v_simple: T,
    v_complex: T,
    game: GameTemplate<T>,
    net_of_costs: bool,
}

impl<T: Real> ProjectMenu<T> {
    /// Validates the menu: the simple technology needs exactly one subtask
    /// type per task, the complex one at least two (and infinite depth, the
    /// regime where its reliability jumps); the complex project must be the
    /// more valuable one.
    pub fn new(
        simple_spec: BranchingSpec<T>,
        complex_spec: BranchingSpec<T>,
        v_simple: T,
        v_complex: T,
        game: GameTemplate<T>,
    ) -> Result<Self> {
        if simple_spec.p().support() != [1] {
            return Err(Error::InvalidSpec(
                "simple technology must require exactly one subtask type per task".into(),
            ));
        }
        if !complex_spec.is_complex() {
            return Err(Error::InvalidSpec(
                "complex technology must require at least two subtask types per task".into(),
            ));
        }
        if complex_spec.depth() != Depth::Infinite {
            return Err(Error::InvalidSpec(
                "project selection works on the infinite-depth complex technology".into(),
            ));
        }
        if v_simple <= T::zero() || v_complex <= v_simple {
            return Err(Error::InvalidSpec(format!(
                "project values need 0 < v_simple < v_complex, got {v_simple} and {v_complex}"
            )));
        }
        Ok(Self {
            simple_spec,
            complex_spec,
            v_simple,
            v_complex,
            game,
            net_of_costs: false,
        })
    }

    /// Compare projects net of aggregate investment costs instead of by
    /// gross expected value.
    pub fn with_net_of_costs(mut self, net: bool) -> Self {
        self.net_of_costs = net;
        self
    }

    pub fn simple_spec(&self) -> &BranchingSpec<T> {
        &self.simple_spec
    }

    pub fn complex_spec(&self) -> &BranchingSpec<T> {
        &self.complex_spec
    }

    pub fn values(&self) -> (T, T) {
        (self.v_simple, self.v_complex)
    }

    pub fn game(&self) -> &GameTemplate<T> {
        &self.game
    }

    pub fn net_of_costs(&self) -> bool {
        self.net_of_costs
    }
}

/// Which project the organization runs at a given baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectChoice {
    /// Nothing produces output.
    None,
    Simple,
    Complex,
}

impl std::fmt::Display for ProjectChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            ProjectChoice::None => "none",
            ProjectChoice::Simple => "simple",
            ProjectChoice::Complex => "complex",
        };
        f.write_str(label)
    }
}

/// The three baseline-culture thresholds.  A `None` entry means the
/// threshold does not exist in (0, 1) for this menu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds<T: Real> {
    /// Smallest baseline at which the simple project produces output.
    pub pi_1: Option<T>,
    /// Smallest baseline at which the complex project has a positive
    /// equilibrium whose value weakly beats the simple project.
    pub pi_2: Option<T>,
    /// Critical culture strength of the complex technology.
    pub pi_3: Option<T>,
    /// Whether pi_1 <= pi_2 <= pi_3 holds among the thresholds that exist
    /// (checked, not enforced: it can fail for some parameterizations).
    pub ordering_ok: bool,
}

/// Output envelope over a baseline-culture grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport<T: Real> {
    pub baseline_grid: Vec<T>,
    /// Best project value with zero investment, per baseline.
    pub output_no_invest: Vec<T>,
    /// Best project value at the selected equilibrium, per baseline.
    pub output_equilibrium: Vec<T>,
    /// Project backing `output_equilibrium`, per baseline.
    pub chosen_project: Vec<ProjectChoice>,
    /// Culture strength at the chosen project's equilibrium (the baseline
    /// itself when nobody invests).
    pub eq_culture: Vec<T>,
    pub thresholds: Thresholds<T>,
    /// Whether values are net of aggregate investment costs.
    pub net_of_costs: bool,
}

/// Equilibrium value of the complex project and the culture it settles at.
fn complex_outcome<T: Real>(
    menu: &ProjectMenu<T>,
    config: &GameConfig<T>,
    eq: Option<&EquilibriumResult<T>>,
    baseline: T,
) -> Result<(T, T)> {
    match eq {
        Some(eq) => {
            let gross =
                menu.v_complex * rho_at_depth(&menu.complex_spec, eq.pi_star, Depth::Infinite)?;
            let value = if menu.net_of_costs {
                let spent = eq
                    .x_star
                    .iter()
                    .fold(T::zero(), |acc, &x| acc + config.cost().cost(x));
                gross - spent
            } else {
                gross
            };
            Ok((value, eq.pi_star))
        }
        None => {
            let value =
                menu.v_complex * rho_at_depth(&menu.complex_spec, baseline, Depth::Infinite)?;
            Ok((value, baseline))
        }
    }
}

/// Zero-investment value of the simple project (its selected equilibrium:
/// the simple technology has no critical point for workers to defend, so
/// nobody invests).
fn simple_value<T: Real>(menu: &ProjectMenu<T>, baseline: T) -> Result<T> {
    let depth = menu.simple_spec.depth();
    Ok(menu.v_simple * rho_at_depth(&menu.simple_spec, baseline, depth)?)
}

fn find_thresholds_inner<T: Real>(menu: &ProjectMenu<T>, jumps: &[T]) -> Result<Thresholds<T>> {
    let tol = T::of(THRESHOLD_TOL);
    let one = T::one();

    // pi_1: viability threshold of the simple project, by bisection on
    // "reliability is positive" (monotone in the baseline).
    let pi_1 = if simple_value(menu, one)? <= T::zero() {
        None
    } else if simple_value(menu, T::zero())? > T::zero() {
        Some(T::zero())
    } else {
        let viable = |b: T| Ok(simple_value(menu, b)? > T::zero());
        Some(bisect_predicate(viable, T::zero(), one, tol)?)
    };

    let pi_3 = jumps.first().copied();

    // pi_2: smallest baseline where the complex project has a positive
    // equilibrium that weakly beats the simple project, by bisection between
    // pi_1 and pi_3.
    let pi_2 = match pi_3 {
        None => None,
        Some(p3) => {
            let prefers_complex = |baseline: T| -> Result<bool> {
                let config = menu.game.instantiate(menu.complex_spec.clone(), baseline)?;
                match solve_heterogeneous_with_jumps(&config, jumps)? {
                    Some(eq) => {
                        let (value, _) = complex_outcome(menu, &config, Some(&eq), baseline)?;
                        Ok(value >= simple_value(menu, baseline)?)
                    }
                    None => Ok(false),
                }
            };
            let lo_start = pi_1.unwrap_or_else(T::zero).min(p3);
            if prefers_complex(lo_start)? {
                Some(lo_start)
            } else if !prefers_complex(p3)? {
                None
            } else {
                Some(bisect_predicate(prefers_complex, lo_start, p3, tol)?)
            }
        }
    };

    let mut ordering_ok = true;
    if let (Some(a), Some(b)) = (pi_1, pi_2) {
        ordering_ok &= a <= b;
    }
    if let (Some(b), Some(c)) = (pi_2, pi_3) {
        ordering_ok &= b <= c;
    }
    if let (Some(a), Some(c)) = (pi_1, pi_3) {
        ordering_ok &= a <= c;
    }
    Ok(Thresholds {
        pi_1,
        pi_2,
        pi_3,
        ordering_ok,
    })
}

/// Locates the three baseline-culture thresholds (tolerance
/// [`THRESHOLD_TOL`]).
pub fn find_thresholds<T: Real>(menu: &ProjectMenu<T>) -> Result<Thresholds<T>> {
    let jumps: Vec<T> = find_discontinuities(&menu.complex_spec)?
        .iter()
        .map(|c| c.pi)
        .collect();
    find_thresholds_inner(menu, &jumps)
}

/// Traces project values over a baseline grid.
///
/// Per baseline, the no-investment panel is the better of the two projects'
/// values at zero investment; the equilibrium panel selects each project's
/// equilibrium first (simple: zero contributions; complex: the positive
/// heterogeneous equilibrium when it exists, zero contributions otherwise)
/// and then takes the better project.  Ties go to the simple project; a
/// baseline where nothing produces output is labeled
/// [`ProjectChoice::None`].
pub fn compute_envelope<T: Real>(menu: &ProjectMenu<T>, grid: &[T]) -> Result<EnvelopeReport<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidSpec("baseline grid is empty".into()));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidSpec(
                "baseline grid must be strictly ascending".into(),
            ));
        }
    }
    if grid[0] < T::zero() || grid[grid.len() - 1] >= T::one() {
        return Err(Error::Domain {
            what: "baseline grid",
            value: grid[grid.len() - 1].as_f64(),
            domain: "[0, 1)",
        });
    }
    let jumps: Vec<T> = find_discontinuities(&menu.complex_spec)?
        .iter()
        .map(|c| c.pi)
        .collect();
    if jumps.is_empty() {
        return Err(Error::InvalidSpec(
            "complex technology has no critical point".into(),
        ));
    }
    let thresholds = find_thresholds_inner(menu, &jumps)?;

    let n = grid.len();
    let mut output_no_invest = Vec::with_capacity(n);
    let mut output_equilibrium = Vec::with_capacity(n);
    let mut chosen_project = Vec::with_capacity(n);
    let mut eq_culture = Vec::with_capacity(n);
    for &baseline in grid {
        let s_zero = simple_value(menu, baseline)?;
        let c_zero = menu.v_complex * rho_at_depth(&menu.complex_spec, baseline, Depth::Infinite)?;
        output_no_invest.push(s_zero.max(c_zero));

        let config = menu.game.instantiate(menu.complex_spec.clone(), baseline)?;
        let eq = solve_heterogeneous_with_jumps(&config, &jumps)?;
        let (c_value, c_culture) = complex_outcome(menu, &config, eq.as_ref(), baseline)?;
        // The simple project's selected equilibrium is zero contributions,
        // so its equilibrium value equals its no-investment value.
        let (value, choice, culture) = if s_zero <= T::zero() && c_value <= T::zero() {
            (
                T::zero().max(c_value).max(s_zero),
                ProjectChoice::None,
                baseline,
            )
        } else if s_zero >= c_value {
            (s_zero, ProjectChoice::Simple, baseline)
        } else {
            (c_value, ProjectChoice::Complex, c_culture)
        };
        output_equilibrium.push(value);
        chosen_project.push(choice);
        eq_culture.push(culture);
    }
    Ok(EnvelopeReport {
        baseline_grid: grid.to_vec(),
        output_no_invest,
        output_equilibrium,
        chosen_project,
        eq_culture,
        thresholds,
        net_of_costs: menu.net_of_costs,
    })
}

/// Picks the candidate baseline with the strongest culture; ties break to
/// the lexicographically smallest label.
pub fn choose_culture<T: Real>(options: &BTreeMap<String, T>) -> Result<String> {
    if options.is_empty() {
        return Err(Error::EmptyMenu);
    }
    let mut best: Option<(&str, T)> = None;
    for (label, &pi) in options {
        if pi < T::zero() || pi > T::one() || pi.is_nan() {
            return Err(Error::Domain {
                what: "baseline",
                value: pi.as_f64(),
                domain: "[0, 1]",
            });
        }
        // BTreeMap iterates labels in ascending order, so strict improvement
        // keeps the smallest label among ties.
        match best {
            Some((_, top)) if pi <= top => {}
            _ => best = Some((label, pi)),
        }
    }
    Ok(best.expect("nonempty map").0.to_string())
}
