//! Monte Carlo simulation of the one-way LOCC protocol: both parties measure
//! every copy in the computational basis and declare "antisymmetric" only
//! when every copy gave unequal outcomes.

use num_traits::ToPrimitive;
use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256StarStar};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, ExactScalar};
use crate::werner::{check_dimension, perr_closed_form, Branch, Instance, WernerRole};

pub const DEFAULT_CHUNK_SIZE: u64 = 65_536;

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub inst: Instance,
    pub trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Test hook: fixes the true state instead of drawing it from the prior.
    pub force_truth: Option<WernerRole>,
}

impl SimulationConfig {
    pub fn new(inst: Instance, trials: u64, seed: u64) -> Self {
        Self {
            inst,
            trials,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
            force_truth: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidArgument("chunk size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub d: u32,
    pub n: u32,
    #[serde(with = "rational::serde_str")]
    pub p: ExactScalar,
    pub trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
    pub branch: Branch,
    pub errors: u64,
    pub trials_symmetric: u64,
    pub trials_antisymmetric: u64,
    /// Errors whose true state was symmetric.
    pub errors_symmetric: u64,
    pub errors_antisymmetric: u64,
    pub empirical_error: f64,
    #[serde(with = "rational::serde_str")]
    pub closed_form: ExactScalar,
    pub closed_form_value: f64,
    /// `(empirical - closed_form) / sqrt(P(1-P)/trials)`.
    pub z_score: f64,
    /// `1.96 · sqrt(p̂(1-p̂)/trials)` around the empirical rate.
    pub ci95: f64,
}

/// Generator for chunk `c`: seeded from the `c`-th output of a SplitMix64
/// stream started at `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> Xoshiro256StarStar {
    let start = seed.wrapping_add(chunk.wrapping_mul(SPLITMIX_GAMMA));
    let key = SplitMix64::seed_from_u64(start).next_u64();
    Xoshiro256StarStar::seed_from_u64(key)
}

/// Computational-basis outcomes `(i, j)` of one copy. The symmetric state
/// gives an equal pair with probability `2/(d+1)`, uniform over the `d`
/// equal pairs; unequal ordered pairs are uniform in both states.
pub fn sample_outcome_pair<R: Rng + ?Sized>(role: WernerRole, d: u32, rng: &mut R) -> (u32, u32) {
    debug_assert!(d >= 2);
    let equal = match role {
        WernerRole::Symmetric => rng.random::<f64>() < 2.0 / (d as f64 + 1.0),
        WernerRole::Antisymmetric => false,
    };
    let i = (rng.random::<f64>() * d as f64) as u32;
    if equal {
        return (i, i);
    }
    let jp = (rng.random::<f64>() * (d - 1) as f64) as u32;
    (i, if jp >= i { jp + 1 } else { jp })
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    trials_sym: u64,
    trials_anti: u64,
    errors_sym: u64,
    errors_anti: u64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self {
            trials_sym: self.trials_sym + o.trials_sym,
            trials_anti: self.trials_anti + o.trials_anti,
            errors_sym: self.errors_sym + o.errors_sym,
            errors_anti: self.errors_anti + o.errors_anti,
        }
    }
}

fn run_chunk(cfg: &SimulationConfig, measure: bool, p: f64, chunk: u64) -> Tally {
    let first = chunk * cfg.chunk_size;
    let count = cfg.chunk_size.min(cfg.trials - first);
    let mut rng = chunk_rng(cfg.seed, chunk);
    let mut t = Tally::default();
    for _ in 0..count {
        let truth = match cfg.force_truth {
            Some(role) => role,
            None if rng.random::<f64>() < p => WernerRole::Symmetric,
            None => WernerRole::Antisymmetric,
        };
        let guess = if measure {
            let mut all_unequal = true;
            for _ in 0..cfg.inst.n {
                let (i, j) = sample_outcome_pair(truth, cfg.inst.d, &mut rng);
                all_unequal &= i != j;
            }
            if all_unequal {
                WernerRole::Antisymmetric
            } else {
                WernerRole::Symmetric
            }
        } else {
            WernerRole::Symmetric
        };
        match truth {
            WernerRole::Symmetric => {
                t.trials_sym += 1;
                t.errors_sym += (guess != truth) as u64;
            }
            WernerRole::Antisymmetric => {
                t.trials_anti += 1;
                t.errors_anti += (guess != truth) as u64;
            }
        }
    }
    t
}

/// Thread count from the `THREADS` environment variable, if set.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs on the global pool, or on a dedicated pool when `THREADS` is set.
pub fn run_protocol(cfg: &SimulationConfig) -> Result<SimulationResult> {
    run_protocol_with_threads(cfg, threads_from_env())
}

/// Output depends only on `(seed, trials, chunk_size)`, never on `threads`.
pub fn run_protocol_with_threads(cfg: &SimulationConfig, threads: Option<usize>) -> Result<SimulationResult> {
    cfg.validate()?;
    check_dimension(cfg.inst.d)?;
    let branch = cfg.inst.branch();
    let measure = branch.measures();
    let p = rational::to_f64(&cfg.inst.p);
    let chunks = cfg.trials.div_ceil(cfg.chunk_size);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| run_chunk(cfg, measure, p, c))
            .reduce(Tally::default, Tally::merge)
    };
    let tally = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let errors = tally.errors_sym + tally.errors_anti;
    let trials = cfg.trials as f64;
    let empirical_error = errors as f64 / trials;
    let closed_form = perr_closed_form(&cfg.inst);
    let pc = closed_form.to_f64().unwrap_or(0.0);
    let sigma = (pc * (1.0 - pc) / trials).sqrt();
    let z_score = if sigma > 0.0 { (empirical_error - pc) / sigma } else { 0.0 };
    let ci95 = 1.959_963_984_540_054 * (empirical_error * (1.0 - empirical_error) / trials).sqrt();
    Ok(SimulationResult {
        d: cfg.inst.d,
        n: cfg.inst.n,
        p: cfg.inst.p.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        chunk_size: cfg.chunk_size,
        branch,
        errors,
        trials_symmetric: tally.trials_sym,
        trials_antisymmetric: tally.trials_anti,
        errors_symmetric: tally.errors_sym,
        errors_antisymmetric: tally.errors_anti,
        empirical_error,
        closed_form,
        closed_form_value: pc,
        z_score,
        ci95,
    })
}
