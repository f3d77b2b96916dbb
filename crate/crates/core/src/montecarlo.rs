//! Deterministic Monte Carlo study of the endpoint estimator.
//!
//! Replicate `r` draws its sample from its own generator, seeded by
//! [`replicate_seed`]. Replicates run in parallel, but their results are
//! collected in replicate order and reduced serially, so the output does not
//! depend on the number of worker threads.
//!
//! Each replicate sample is drawn and sorted once, then reused for every
//! `k*` on the grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{ahat_mle, SortedSample, SpacingWeights};
use crate::models::ModelSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub model: ModelSpec,
    pub n: usize,
    pub reps: usize,
    /// Even values `k* = 2k ≥ 2`, each at most `n − 1`.
    pub kstar_grid: Vec<usize>,
    pub master_seed: u64,
    /// Also record `(x̂F − xF)/â` per replicate.
    pub collect_standardized: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl StudyConfig {
    pub fn new(model: ModelSpec, n: usize, reps: usize, master_seed: u64) -> Self {
        Self {
            model,
            n,
            reps,
            kstar_grid: default_kstar_grid(n),
            master_seed,
            collect_standardized: false,
            workers: None,
        }
    }

    pub fn with_grid(mut self, kstar_grid: Vec<usize>) -> Self {
        self.kstar_grid = kstar_grid;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn collecting_standardized(mut self) -> Self {
        self.collect_standardized = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidArgument(format!("n must be at least 3, got {}", self.n)));
        }
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        if self.kstar_grid.is_empty() {
            return Err(Error::InvalidArgument("k* grid is empty".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("worker count must be positive".into()));
        }
        for &kstar in &self.kstar_grid {
            check_kstar(self.n, kstar)?;
        }
        Ok(())
    }
}

fn check_kstar(n: usize, kstar: usize) -> Result<()> {
    if kstar < 2 || !kstar.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "k* must be an even integer >= 2, got {kstar}"
        )));
    }
    if n < kstar + 1 {
        return Err(Error::InvalidArgument(format!(
            "k* = {kstar} needs n >= {}, got n = {n}",
            kstar + 1
        )));
    }
    Ok(())
}

/// `2, 4, …, min(200, n − 1)` for `n ≤ 1000`; `4, 8, …, min(400, n − 1)` above.
pub fn default_kstar_grid(n: usize) -> Vec<usize> {
    let (step, cap) = if n <= 1000 { (2, 200) } else { (4, 400) };
    let hi = cap.min(n.saturating_sub(1));
    (1..).map(|i| i * step).take_while(|&k| k <= hi).collect()
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replicate `rep`: the `(rep + 1)`-th output of a SplitMix64
/// generator started at `master_seed`.
pub fn replicate_seed(master_seed: u64, rep: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(rep.wrapping_add(1))))
}

/// One aggregated cell of the study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub model: ModelSpec,
    pub n: usize,
    pub kstar: usize,
    pub mean_xhat: f64,
    /// Mean of `(x̂F − xF)²` against the true endpoint.
    pub mse_xhat: f64,
    /// `mean_xhat − xF`.
    pub bias: f64,
    /// Mean sample maximum over the same replicates.
    pub mean_max: f64,
    pub reps: usize,
    pub master_seed: u64,
}

/// Standardized errors `(x̂F − xF)/â` of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedErrors {
    pub kstar: usize,
    pub values: Vec<f64>,
    /// Replicates dropped because `â = 0`.
    pub missing: usize,
}

#[derive(Debug, Clone)]
struct Replicate {
    max: f64,
    xhat: Vec<f64>,
    standardized: Vec<Option<f64>>,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.carry += (self.total - t) + x;
        } else {
            self.carry += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(self) -> f64 {
        self.total + self.carry
    }
}

fn simulate_replicate(
    config: &StudyConfig,
    weights: &[SpacingWeights],
    rep: usize,
) -> Result<Replicate> {
    let sample: SortedSample = config
        .model
        .sample(config.n, replicate_seed(config.master_seed, rep as u64))?;
    let xf = config.model.endpoint();
    let mut xhat = Vec::with_capacity(weights.len());
    let mut standardized = Vec::new();
    for w in weights {
        let x = w.endpoint(&sample)?;
        xhat.push(x);
        if config.collect_standardized {
            let a = ahat_mle(&sample, w.k())?;
            standardized.push((a > 0.0).then(|| (x - xf) / a));
        }
    }
    Ok(Replicate {
        max: sample.max(),
        xhat,
        standardized,
    })
}

fn simulate(config: &StudyConfig) -> Result<(Vec<SpacingWeights>, Vec<Replicate>)> {
    config.validate()?;
    let weights = config
        .kstar_grid
        .iter()
        .map(|&kstar| SpacingWeights::new(kstar / 2))
        .collect::<Result<Vec<_>>>()?;
    let work = || {
        (0..config.reps)
            .into_par_iter()
            .map(|rep| simulate_replicate(config, &weights, rep))
            .collect::<Result<Vec<_>>>()
    };
    let replicates = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::NumericFailure(format!("cannot start worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok((weights, replicates))
}

fn aggregate(config: &StudyConfig, replicates: &[Replicate]) -> Vec<StudyRow> {
    let xf = config.model.endpoint();
    let count = replicates.len() as f64;
    let mut max_sum = Sum::default();
    for r in replicates {
        max_sum.add(r.max);
    }
    let mean_max = max_sum.value() / count;
    config
        .kstar_grid
        .iter()
        .enumerate()
        .map(|(j, &kstar)| {
            let mut sum = Sum::default();
            let mut sq = Sum::default();
            for r in replicates {
                let x = r.xhat[j];
                sum.add(x);
                sq.add((x - xf) * (x - xf));
            }
            let mean_xhat = sum.value() / count;
            StudyRow {
                model: config.model,
                n: config.n,
                kstar,
                mean_xhat,
                mse_xhat: sq.value() / count,
                bias: mean_xhat - xf,
                mean_max,
                reps: config.reps,
                master_seed: config.master_seed,
            }
        })
        .collect()
}

/// One row per `k*` of the grid, in grid order.
pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    let (_, replicates) = simulate(config)?;
    Ok(aggregate(config, &replicates))
}

/// Runs the study for a single `k*`, ignoring the configured grid.
pub fn run_cell(config: &StudyConfig, kstar: usize) -> Result<StudyRow> {
    check_kstar(config.n, kstar)?;
    let single = config.clone().with_grid(vec![kstar]);
    Ok(run_study(&single)?.remove(0))
}

/// Per-replicate `(x̂F − xF)/â(n/k)` for one `k*`.
///
/// Requires `collect_standardized`. Replicates with `â = 0` are dropped and
/// counted in [`StandardizedErrors::missing`].
pub fn standardized_errors(config: &StudyConfig, kstar: usize) -> Result<StandardizedErrors> {
    if !config.collect_standardized {
        return Err(Error::InvalidArgument(
            "standardized errors need collect_standardized".into(),
        ));
    }
    check_kstar(config.n, kstar)?;
    let single = config.clone().with_grid(vec![kstar]);
    let (_, replicates) = simulate(&single)?;
    let mut values = Vec::with_capacity(replicates.len());
    let mut missing = 0;
    for r in &replicates {
        match r.standardized[0] {
            Some(v) => values.push(v),
            None => missing += 1,
        }
    }
    Ok(StandardizedErrors {
        kstar,
        values,
        missing,
    })
}
