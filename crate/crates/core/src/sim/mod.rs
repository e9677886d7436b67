//! Monte Carlo engine with censored-horizon survival estimates.
//!
//! Trials are pure functions of a 64-bit key, so an [`estimate`] is bit-identical for any
//! number of workers: chunks of trials are reduced in index order with integer counters and
//! compensated sums.

pub mod line;
pub mod radii;
pub mod rng;
pub mod tree;

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::Kahan;
use crate::error::{Error, Result};

pub use line::{run_fireworks_line, run_reverse_line, ResidualTable};
pub use radii::{Radii, Sampler};
pub use rng::{keyed_stream, stream, trial_key};
pub use tree::{TreeModel, TreeTrial};

/// Default residual threshold for reverse-line classification.
pub const DEFAULT_EPS_RESIDUAL: f64 = 1e-6;

const CHUNK: u64 = 4096;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Died,
    SurvivedToHorizon,
    DeadByResidual,
    /// The vertex budget ran out; excluded from estimates.
    Truncated,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Died => "died",
            Status::SurvivedToHorizon => "survived_to_horizon",
            Status::DeadByResidual => "dead_by_residual",
            Status::Truncated => "truncated",
        }
    }
}

/// One realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub status: Status,
    /// Vertices that fired (direct models) or joined (reverse models, origin excluded).
    pub spreaders: u64,
    pub informed: u64,
    /// Largest distance or generation reached.
    pub reach: u64,
    /// Reverse line only: bound on the chance the stalled process restarts.
    pub residual_mass: Option<f64>,
}

impl TrialOutcome {
    pub fn new(status: Status, spreaders: u64, informed: u64, reach: u64) -> Self {
        Self { status, spreaders, informed, reach, residual_mass: None }
    }

    pub fn survived(&self) -> bool {
        self.status == Status::SurvivedToHorizon
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    /// Survived-to-horizon frequency among counted trials.
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    /// Trials not truncated.
    pub counted: u64,
    pub survived: u64,
    pub died: u64,
    pub dead_by_residual: u64,
    pub truncated: u64,
    pub mean_spreaders: f64,
    pub mean_informed: f64,
    pub mean_reach: f64,
    pub master_seed: u64,
    pub horizon: u64,
    /// Analytic bound on the downward bias from early classification, when one is available.
    /// Censoring at the horizon only biases `mean` upwards.
    pub bias_bound: Option<f64>,
}

impl Estimate {
    /// Standard error of `mean` under the binomial model.
    pub fn std_error(&self) -> f64 {
        if self.counted == 0 {
            return 0.0;
        }
        (self.mean * (1.0 - self.mean) / self.counted as f64).sqrt()
    }

    /// Whether `target` lies within `bias_bound + k·σ` of the estimate, with the bias taken as
    /// zero when unknown.
    pub fn covers(&self, target: f64, k_sigma: f64) -> bool {
        let budget = self.bias_bound.unwrap_or(0.0) + k_sigma * self.std_error().max(1.0 / self.counted.max(1) as f64);
        (self.mean - target).abs() <= budget
    }

    pub fn with_bias_bound(mut self, bias: Option<f64>) -> Self {
        self.bias_bound = bias;
        self
    }
}

/// 95% Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (nf, p) = (n as f64, k as f64 / n as f64);
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

#[derive(Default)]
struct Tally {
    survived: u64,
    died: u64,
    dead_by_residual: u64,
    truncated: u64,
    spreaders: Kahan,
    informed: Kahan,
    reach: Kahan,
}

impl Tally {
    fn add(&mut self, t: &TrialOutcome) {
        match t.status {
            Status::Truncated => {
                self.truncated += 1;
                return;
            }
            Status::SurvivedToHorizon => self.survived += 1,
            Status::Died => self.died += 1,
            Status::DeadByResidual => self.dead_by_residual += 1,
        }
        self.spreaders.add(t.spreaders as f64);
        self.informed.add(t.informed as f64);
        self.reach.add(t.reach as f64);
    }

    fn merge(&mut self, o: Tally) {
        self.survived += o.survived;
        self.died += o.died;
        self.dead_by_residual += o.dead_by_residual;
        self.truncated += o.truncated;
        self.spreaders.add(o.spreaders.value());
        self.informed.add(o.informed.value());
        self.reach.add(o.reach.value());
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))
}

/// Runs `trials` trials keyed by `trial_key(master_seed, i)` and aggregates them.
pub fn estimate<F>(trials: u64, master_seed: u64, workers: usize, horizon: u64, f: F) -> Result<Estimate>
where
    F: Fn(u64) -> TrialOutcome + Sync,
{
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Tally> = pool(workers)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut t = Tally::default();
                for i in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    t.add(&f(trial_key(master_seed, i)));
                }
                t
            })
            .collect()
    });
    let mut total = Tally::default();
    for t in partial {
        total.merge(t);
    }
    let counted = trials - total.truncated;
    let mean = if counted == 0 { 0.0 } else { total.survived as f64 / counted as f64 };
    let (ci_low, ci_high) = wilson(total.survived, counted);
    let avg = |k: &Kahan| if counted == 0 { 0.0 } else { k.value() / counted as f64 };
    Ok(Estimate {
        mean,
        ci_low,
        ci_high,
        trials,
        counted,
        survived: total.survived,
        died: total.died,
        dead_by_residual: total.dead_by_residual,
        truncated: total.truncated,
        mean_spreaders: avg(&total.spreaders),
        mean_informed: avg(&total.informed),
        mean_reach: avg(&total.reach),
        master_seed,
        horizon,
        bias_bound: None,
    })
}

/// Runs trials and returns their results in index order.
pub fn run_trials<T, F>(trials: u64, master_seed: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    Ok(pool(workers)?.install(|| (0..trials).into_par_iter().map(|i| f(trial_key(master_seed, i))).collect()))
}

/// A fully configured simulation.
#[derive(Debug, Clone)]
pub enum Experiment {
    FireworksLine { radii: Radii, gap: u64, horizon: u64 },
    ReverseLine { radii: Radii, residual: ResidualTable, horizon: u64, eps: f64 },
    Tree(TreeTrial),
}

impl Experiment {
    pub fn fireworks_line(radii: Radii, gap: u64, horizon: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Precondition("horizon must be at least 1".into()));
        }
        Ok(Experiment::FireworksLine { radii, gap, horizon })
    }

    pub fn reverse_line(radii: Radii, horizon: u64, eps: f64) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Precondition("horizon must be at least 1".into()));
        }
        let law = radii
            .effective_law()
            .ok_or_else(|| Error::Precondition("reverse line needs an identically distributed radius".into()))?;
        let residual = ResidualTable::new(&law, horizon)?;
        Ok(Experiment::ReverseLine { radii, residual, horizon, eps })
    }

    pub fn horizon(&self) -> u64 {
        match self {
            Experiment::FireworksLine { horizon, .. } | Experiment::ReverseLine { horizon, .. } => *horizon,
            Experiment::Tree(t) => t.horizon,
        }
    }

    pub fn run(&self, key: u64) -> TrialOutcome {
        match self {
            Experiment::FireworksLine { radii, gap, horizon } => run_fireworks_line(radii, *gap, *horizon, key),
            Experiment::ReverseLine { radii, residual, horizon, eps } => run_reverse_line(radii, residual, *horizon, *eps, key),
            Experiment::Tree(t) => t.run(key),
        }
    }

    /// Analytic bound on the downward bias of the survival frequency, when known: a reverse-line
    /// trial classified dead by residual restarts with probability below `eps`.
    pub fn bias_bound(&self) -> Option<f64> {
        match self {
            Experiment::ReverseLine { residual, eps, .. } if !residual.is_infinite() => Some(*eps),
            _ => None,
        }
    }

    pub fn estimate(&self, trials: u64, master_seed: u64, workers: usize) -> Result<Estimate> {
        Ok(estimate(trials, master_seed, workers, self.horizon(), |k| self.run(k))?.with_bias_bound(self.bias_bound()))
    }
}
