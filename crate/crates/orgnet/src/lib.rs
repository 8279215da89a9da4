//! Reliability of tree-structured collaboration networks and the
//! culture-investment game played on top of them.
//!
//! A project is a recursive tree of tasks: each task needs `m ~ p` subtasks,
//! each subtask is attempted by `n ~ q` independent workers, and a worker
//! succeeds with the organization's culture strength `pi`. The library
//! computes the project reliability `rho` at finite or infinite depth
//! ([`rho_at_depth`]), locates the discontinuities where reliability
//! collapses ([`find_discontinuities`]), and solves the investment game in
//! which workers choose costly culture investments that aggregate into `pi`
//! ([`solve_symmetric_equilibrium`], [`solve_heterogeneous_equilibrium`]).
//! On top of that sit fragility diagnostics under anticipated shocks
//! ([`assess_fragility`]) and the simple-versus-complex project selection
//! frontier ([`compute_envelope`]).
//!
//! Everything is generic over the scalar type through the [`Real`] trait
//! (instantiable at `f32` or `f64`); the `*64` aliases below pin `f64` for
//! callers that do not care.
//!
//! ```
//! use orgnet::{BranchingSpec64, Depth, rho_at_depth};
//!
//! // Two subtasks per task, two workers per subtask, infinitely deep.
//! let spec = BranchingSpec64::regular(2, 2, Depth::Infinite).unwrap();
//! let rho = rho_at_depth(&spec, 0.9, Depth::Infinite).unwrap();
//! assert!(rho > 0.9 && rho < 1.0);
//! ```

pub mod branching;
pub mod equilibrium;
pub mod error;
pub mod montecarlo;
mod numerics;
pub mod quadrature;
pub mod real;
pub mod reliability;
pub mod selection;

pub use branching::{gen_fn_eval, gen_fn_inverse, make_pmf, BranchingSpec, Depth, Pmf};
pub use equilibrium::{
    assess_fragility, check_zero_equilibrium, culture_strength, selected_symmetric_equilibrium,
    shock_expectation_theta, solve_heterogeneous_equilibrium, solve_symmetric_equilibrium, utility,
    zero_equilibrium, CostSpec, CultureMap, EquilibriumKind, EquilibriumResult, FragilityReport,
    GameConfig, ShockSpec,
};
pub use error::{Error, Result};
pub use montecarlo::{estimate_reliability, sample_task_outcome, trial_seed, SimConfig, SimResult};
pub use real::Real;
pub use reliability::{
    find_discontinuities, pi_of_r, rho_at_depth, rho_derivative, rho_finite, rho_infinite,
    sample_curve, CriticalPoint, CurvePoint, Derivative, DerivativeFlag, ReliabilityCurve,
};
pub use selection::{
    choose_culture, compute_envelope, find_thresholds, EnvelopeReport, GameTemplate, ProjectChoice,
    ProjectMenu, Thresholds,
};

/// [`Pmf`] over `f64`.
pub type Pmf64 = Pmf<f64>;
/// [`BranchingSpec`] over `f64`.
pub type BranchingSpec64 = BranchingSpec<f64>;
/// [`CriticalPoint`] over `f64`.
pub type CriticalPoint64 = CriticalPoint<f64>;
/// [`ReliabilityCurve`] over `f64`.
pub type ReliabilityCurve64 = ReliabilityCurve<f64>;
/// [`Derivative`] over `f64`.
pub type Derivative64 = Derivative<f64>;
/// [`SimConfig`] over `f64`.
pub type SimConfig64 = SimConfig<f64>;
/// [`SimResult`] over `f64`.
pub type SimResult64 = SimResult<f64>;
/// [`CultureMap`] over `f64`.
pub type CultureMap64 = CultureMap<f64>;
/// [`CostSpec`] over `f64`.
pub type CostSpec64 = CostSpec<f64>;
/// [`ShockSpec`] over `f64`.
pub type ShockSpec64 = ShockSpec<f64>;
/// [`GameConfig`] over `f64`.
pub type GameConfig64 = GameConfig<f64>;
/// [`EquilibriumResult`] over `f64`.
pub type EquilibriumResult64 = EquilibriumResult<f64>;
/// [`FragilityReport`] over `f64`.
pub type FragilityReport64 = FragilityReport<f64>;
/// [`GameTemplate`] over `f64`.
pub type GameTemplate64 = GameTemplate<f64>;
/// [`ProjectMenu`] over `f64`.
pub type ProjectMenu64 = ProjectMenu<f64>;
/// [`Thresholds`] over `f64`.
pub type Thresholds64 = Thresholds<f64>;
/// [`EnvelopeReport`] over `f64`.
pub type EnvelopeReport64 = EnvelopeReport<f64>;
