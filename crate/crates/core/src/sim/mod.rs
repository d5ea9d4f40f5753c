//! Monte Carlo harness: correlated Gaussian experiments, the Guo–Rao
//! construction, the randomized superuniformity stress test, and FCR runs.

pub mod experiment;
pub mod fcr_sim;
pub mod gaussian;
pub mod guo_rao;
pub mod superuniform;

use serde::{Deserialize, Serialize};

pub use experiment::{run_experiment, run_trials, summarize, Procedure, SimulationConfig, SweepConfig, SweepRow, TrialOutcome, UMode};
pub use fcr_sim::{run_fcr_experiment, FcrConfig, FcrEstimate};
pub use gaussian::{lr_evalue, one_sided_p, sample_correlated_gaussian, CovarianceSampler, Dependence};
pub use guo_rao::{guo_rao_exact_fdr, guo_rao_n_probabilities, guo_rao_sample, GuoRaoInstance};
pub use superuniform::{superuniformity_stress, Coupling, StressEstimate};

/// Monte Carlo estimates with standard errors `sd / sqrt(trials)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub fdr: f64,
    pub fdr_se: f64,
    pub power: f64,
    pub power_se: f64,
    /// Mean number of rejections.
    pub rejections: f64,
    pub rejections_se: f64,
    pub trials: usize,
}

/// Sample mean and standard error (sample sd with n - 1, over sqrt(n)).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (m, 0.0);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}
