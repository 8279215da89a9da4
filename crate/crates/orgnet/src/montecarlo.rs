//! Stochastic oracle: estimate finite-depth reliability by sampling actual
//! collaboration trees, as an independent check on the analytic recursion.
//!
//! A trial realizes the tree lazily while evaluating it: the root draws its
//! input-type count `m ~ p`; each type draws its provider count `n ~ q` and
//! probes providers one at a time, drawing a Bernoulli(pi) link and, when the
//! link is operational, recursing into the provider's own subtree.  The type
//! succeeds on its first operational and successful provider, the task
//! succeeds when every type does, and both loops short-circuit.  Because all
//! draws are mutually independent, never expanding the unprobed branches
//! leaves the success probability unchanged while keeping memory at O(depth).
//!
//! Determinism: each trial runs on its own ChaCha8 substream whose seed is a
//! SplitMix64-style mix of the run seed and the trial index, so results do
//! not depend on scheduling and any subset of trials can be reproduced in
//! isolation.

use crate::branching::{BranchingSpec, Depth, Pmf};
use crate::error::{Error, Result};
use crate::real::Real;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

/// One reliability estimation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig<T: Real> {
    /// Tree technology; depth must be finite (an infinite tree has no
    /// sampling procedure).
    pub spec: BranchingSpec<T>,
    /// Link operation probability.
    pub pi: T,
    /// Number of independent trials.
    pub trials: u64,
    /// Run seed; every trial derives its own substream from it.
    pub seed: u64,
}

/// Result of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult<T: Real> {
    pub successes: u64,
    pub trials: u64,
    /// successes / trials.
    pub estimate: T,
    /// Normal-approximation standard error sqrt(est (1 - est) / trials);
    /// adequate at the trial counts this crate is used with (>= 1e4).
    pub std_error: T,
    /// Echo of the run seed.
    pub seed: u64,
}

/// SplitMix64 finalizer; decorrelates consecutive trial indices.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Documented substream derivation: trial `t` of run seed `s` is seeded with
/// `splitmix64(s + (t + 1) * GOLDEN)` (wrapping arithmetic).
pub fn trial_seed(run_seed: u64, trial: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    splitmix64(run_seed.wrapping_add((trial + 1).wrapping_mul(GOLDEN)))
}

/// A uniform draw in [0, 1) with 53 random bits.
#[inline]
fn u01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Inverse-CDF sampler over a pmf's support (supports are tiny, so a linear
/// scan beats anything fancier).
struct PmfSampler {
    support: Vec<u32>,
    cum: Vec<f64>,
}

impl PmfSampler {
    fn new<T: Real>(pmf: &Pmf<T>) -> Self {
        let mut cum = Vec::with_capacity(pmf.probs().len());
        let mut acc = 0.0;
        for &p in pmf.probs() {
            acc += p.as_f64();
            cum.push(acc);
        }
        Self {
            support: pmf.support().to_vec(),
            cum,
        }
    }

    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> u32 {
        let u = u01(rng);
        for (&c, &v) in self.cum.iter().zip(&self.support) {
            if u < c {
                return v;
            }
        }
        // Mass sums to 1 within 1e-9; a draw landing in that sliver (or the
        // top entry itself) maps to the top entry.
        *self.support.last().expect("pmf support is nonempty")
    }
}

fn evaluate_node(
    p: &PmfSampler,
    q: &PmfSampler,
    pi: f64,
    level: u32,
    rng: &mut ChaCha8Rng,
) -> bool {
    if level <= 1 {
        return true; // leaf tasks succeed unconditionally
    }
    let m = p.draw(rng);
    for _ in 0..m {
        let n = q.draw(rng);
        let mut covered = false;
        for _ in 0..n {
            if u01(rng) < pi && evaluate_node(p, q, pi, level - 1, rng) {
                covered = true;
                break; // further providers of this type are never probed
            }
        }
        if !covered {
            return false; // one uncovered type fails the task
        }
    }
    true
}

/// Samples one task outcome at depth `l` (leaves at level 1 always succeed),
/// consuming draws from `rng_stream` in the documented depth-first order.
pub fn sample_task_outcome<T: Real>(
    spec: &BranchingSpec<T>,
    pi: T,
    l: u32,
    rng_stream: &mut ChaCha8Rng,
) -> bool {
    let p = PmfSampler::new(spec.p());
    let q = PmfSampler::new(spec.q());
    evaluate_node(&p, &q, pi.as_f64(), l, rng_stream)
}

/// Runs all trials of `config` and aggregates the estimate.
///
/// Trials are mutually independent substreams, so the aggregation is
/// order-insensitive and the result is identical however the trials are
/// scheduled.
pub fn estimate_reliability<T: Real>(config: &SimConfig<T>) -> Result<SimResult<T>> {
    if config.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let l = match config.spec.depth() {
        Depth::Finite(l) => l,
        Depth::Infinite => {
            return Err(Error::InvalidSpec(
                "simulation requires a finite depth".into(),
            ))
        }
    };
    if config.pi < T::zero() || config.pi > T::one() {
        return Err(Error::Domain {
            what: "pi",
            value: config.pi.as_f64(),
            domain: "[0, 1]",
        });
    }
    let p = PmfSampler::new(config.spec.p());
    let q = PmfSampler::new(config.spec.q());
    let pi = config.pi.as_f64();
    let mut successes = 0u64;
    for t in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, t));
        if evaluate_node(&p, &q, pi, l, &mut rng) {
            successes += 1;
        }
    }
    let est = T::of(successes as f64 / config.trials as f64);
    let std_error = (est * (T::one() - est) / T::of(config.trials as f64)).sqrt();
    Ok(SimResult {
        successes,
        trials: config.trials,
        estimate: est,
        std_error,
        seed: config.seed,
    })
}
