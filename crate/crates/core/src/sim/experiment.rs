//! Gaussian multiple-testing experiments with paired procedures.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gaussian::{lr_evalue_unchecked, one_sided_p, sample_correlated_gaussian, Dependence};
use super::{mean_se, MCEstimate};
use crate::error::{domain, Error, Result};
use crate::evalue::{bh_raw, ebh_raw, pe_raw, r1_raw, r2_raw, rboth_raw, scaled_ebh, LevelGrid};
use crate::pvalue::{reshaped_raw, ReshapingFunction};
use crate::rng::UniformSource;
use crate::types::Alpha;

/// Whether randomized procedures draw one uniform per hypothesis or share one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UMode {
    #[default]
    Independent,
    Shared,
}

/// Procedures available to the simulation harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Procedure {
    Ebh,
    R1Ebh,
    R2Ebh,
    RbothEbh,
    UEbh,
    JEbh,
    PeEbh,
    Bh,
    By,
    UBy,
}

impl Procedure {
    pub const ALL: [Procedure; 10] = [
        Procedure::Ebh,
        Procedure::R1Ebh,
        Procedure::R2Ebh,
        Procedure::RbothEbh,
        Procedure::UEbh,
        Procedure::JEbh,
        Procedure::PeEbh,
        Procedure::Bh,
        Procedure::By,
        Procedure::UBy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Ebh => "ebh",
            Procedure::R1Ebh => "r1-ebh",
            Procedure::R2Ebh => "r2-ebh",
            Procedure::RbothEbh => "rboth-ebh",
            Procedure::UEbh => "u-ebh",
            Procedure::JEbh => "j-ebh",
            Procedure::PeEbh => "pe-ebh",
            Procedure::Bh => "bh",
            Procedure::By => "by",
            Procedure::UBy => "u-by",
        }
    }

    /// Procedures whose input is p-values rather than e-values.
    pub fn takes_pvalues(self) -> bool {
        matches!(self, Procedure::Bh | Procedure::By | Procedure::UBy)
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Procedure::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown procedure '{s}'")))
    }
}

impl TryFrom<String> for Procedure {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Procedure> for String {
    fn from(p: Procedure) -> String {
        p.name().to_string()
    }
}

/// One Gaussian experiment. `pi0` is the fraction of hypotheses whose null is
/// false; those are the first `round(pi0 K)` hypotheses and have mean `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub k: usize,
    pub pi0: f64,
    pub mu: f64,
    pub rho: f64,
    pub dependence: Dependence,
    /// Tilt of the likelihood-ratio e-values; defaults to `mu`.
    #[serde(default)]
    pub lambda: Option<f64>,
    pub trials: usize,
    pub alpha: Alpha,
    pub seed: u64,
    #[serde(default)]
    pub u_mode: UMode,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return domain("k must be at least 1");
        }
        if self.trials == 0 {
            return domain("trials must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.pi0) {
            return domain(format!("pi0 must lie in [0, 1], got {}", self.pi0));
        }
        if !self.mu.is_finite() {
            return domain("mu must be finite");
        }
        self.dependence.check_rho(self.rho)?;
        let l = self.lambda();
        if !(l > 0.0 && l.is_finite()) {
            return domain(format!("lambda must be positive, got {l} (set lambda when mu <= 0)"));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(self.mu)
    }

    pub fn n_nonnull(&self) -> usize {
        ((self.pi0 * self.k as f64).round() as usize).min(self.k)
    }

    fn means(&self) -> Vec<f64> {
        let m = self.n_nonnull();
        (0..self.k).map(|i| if i < m { self.mu } else { 0.0 }).collect()
    }
}

/// Per-trial result of one procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub rejected: Vec<usize>,
    pub false_discoveries: usize,
    pub fdp: f64,
    pub power: f64,
}

impl TrialOutcome {
    pub(crate) fn new(rejected: Vec<usize>, n_nonnull: usize) -> Self {
        // Non-nulls are the indices below n_nonnull.
        let true_disc = rejected.iter().filter(|&&i| i < n_nonnull).count();
        let false_disc = rejected.len() - true_disc;
        TrialOutcome {
            fdp: if rejected.is_empty() { 0.0 } else { false_disc as f64 / rejected.len() as f64 },
            power: if n_nonnull == 0 { 0.0 } else { true_disc as f64 / n_nonnull as f64 },
            false_discoveries: false_disc,
            rejected,
        }
    }
}

const DATA: u64 = 0;
const REPLICATE: u64 = 1;
const U_GRID: u64 = 2;
const U_ADAPT: u64 = 3;
const U_SHARED: u64 = 4;

/// Everything a trial needs; a pure function of (config, trial index).
struct TrialData {
    evals: Vec<f64>,
    pvals: Vec<f64>,
    replicate_pvals: Vec<f64>,
    u_grid: Vec<f64>,
    u_adapt: Vec<f64>,
    u_shared: f64,
}

fn trial_data(cfg: &SimulationConfig, trial: u64) -> Result<TrialData> {
    let stream = UniformSource::new(cfg.seed).substream(trial);
    let means = cfg.means();
    let z = sample_correlated_gaussian(&means, cfg.rho, cfg.dependence, &mut stream.substream(DATA).rng())?;
    let z_rep = sample_correlated_gaussian(&means, cfg.rho, cfg.dependence, &mut stream.substream(REPLICATE).rng())?;
    let lambda = cfg.lambda();
    let shared = stream.substream(U_SHARED).uniforms(2);
    let (u_grid, u_adapt) = match cfg.u_mode {
        UMode::Independent => (
            stream.substream(U_GRID).uniforms(cfg.k),
            stream.substream(U_ADAPT).uniforms(cfg.k),
        ),
        UMode::Shared => (vec![shared[0]; cfg.k], vec![shared[1]; cfg.k]),
    };
    Ok(TrialData {
        evals: z.iter().map(|&v| lr_evalue_unchecked(v, lambda, 1.0)).collect(),
        pvals: z.iter().map(|&v| one_sided_p(v)).collect(),
        replicate_pvals: z_rep.iter().map(|&v| one_sided_p(v)).collect(),
        u_grid,
        u_adapt,
        u_shared: shared[0],
    })
}

fn apply(p: Procedure, d: &TrialData, alpha: f64, grid: &LevelGrid, by: &ReshapingFunction) -> Vec<usize> {
    let e = &d.evals;
    let res = match p {
        Procedure::Ebh => ebh_raw(e, alpha).discoveries,
        Procedure::R1Ebh => r1_raw(e, alpha, grid.grid(), &d.u_grid).discoveries,
        Procedure::R2Ebh => r2_raw(e, alpha, &d.u_adapt).discoveries,
        Procedure::RbothEbh => rboth_raw(e, alpha, grid.grid(), &d.u_grid, &d.u_adapt).discoveries,
        Procedure::UEbh => scaled_ebh(e, alpha, |_| d.u_shared).discoveries,
        Procedure::JEbh => scaled_ebh(e, alpha, |i| d.u_grid[i]).discoveries,
        Procedure::PeEbh => pe_raw(e, &d.replicate_pvals, alpha).discoveries,
        Procedure::Bh => bh_raw(&d.pvals, alpha),
        Procedure::By => reshaped_raw(&d.pvals, alpha, by, 1.0).discoveries,
        Procedure::UBy => reshaped_raw(&d.pvals, alpha, by, d.u_shared).discoveries,
    };
    res.rejected
}

/// Runs every trial for each procedure on shared data and draws.
/// Returns `outcomes[trial][procedure]`; identical for any thread count.
pub fn run_trials(cfg: &SimulationConfig, procs: &[Procedure]) -> Result<Vec<Vec<TrialOutcome>>> {
    cfg.validate()?;
    let alpha = cfg.alpha.get();
    let grid = LevelGrid::new(cfg.k, cfg.alpha)?;
    let by = ReshapingFunction::by(cfg.k)?;
    let m = cfg.n_nonnull();
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let d = trial_data(cfg, t)?;
            Ok(procs
                .iter()
                .map(|&p| TrialOutcome::new(apply(p, &d, alpha, &grid, &by), m))
                .collect())
        })
        .collect()
}

/// Aggregates per-trial outcomes of one procedure.
pub fn summarize(outcomes: &[TrialOutcome]) -> MCEstimate {
    let fdp: Vec<f64> = outcomes.iter().map(|o| o.fdp).collect();
    let pow: Vec<f64> = outcomes.iter().map(|o| o.power).collect();
    let rej: Vec<f64> = outcomes.iter().map(|o| o.rejected.len() as f64).collect();
    let (fdr, fdr_se) = mean_se(&fdp);
    let (power, power_se) = mean_se(&pow);
    let (rejections, rejections_se) = mean_se(&rej);
    MCEstimate {
        fdr,
        fdr_se,
        power,
        power_se,
        rejections,
        rejections_se,
        trials: outcomes.len(),
    }
}

/// Monte Carlo FDR and power of one procedure.
pub fn run_experiment(cfg: &SimulationConfig, procedure: Procedure) -> Result<MCEstimate> {
    let per_trial = run_trials(cfg, &[procedure])?;
    let col: Vec<TrialOutcome> = per_trial.into_iter().map(|mut v| v.remove(0)).collect();
    Ok(summarize(&col))
}

/// A grid of experiments over `mu` and `rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub k: usize,
    pub pi0: f64,
    pub mu: Vec<f64>,
    pub rho: Vec<f64>,
    pub dependence: Dependence,
    #[serde(default)]
    pub lambda: Option<f64>,
    pub trials: usize,
    pub alpha: Alpha,
    pub seed: u64,
    #[serde(default)]
    pub u_mode: UMode,
    #[serde(default = "all_procedures")]
    pub procedures: Vec<Procedure>,
}

fn all_procedures() -> Vec<Procedure> {
    Procedure::ALL.to_vec()
}

/// One line of a sweep result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub procedure: Procedure,
    pub mu: f64,
    pub rho: f64,
    pub estimate: MCEstimate,
}

impl SweepConfig {
    pub fn point(&self, mu: f64, rho: f64) -> SimulationConfig {
        SimulationConfig {
            k: self.k,
            pi0: self.pi0,
            mu,
            rho,
            dependence: self.dependence,
            lambda: self.lambda,
            trials: self.trials,
            alpha: self.alpha,
            seed: self.seed,
            u_mode: self.u_mode,
        }
    }

    /// Runs every grid point; rows ordered by mu, then rho, then procedure.
    pub fn run(&self) -> Result<Vec<SweepRow>> {
        if self.mu.is_empty() || self.rho.is_empty() || self.procedures.is_empty() {
            return domain("mu, rho and procedures must be nonempty");
        }
        let mut rows = Vec::new();
        for &mu in &self.mu {
            for &rho in &self.rho {
                let per_trial = run_trials(&self.point(mu, rho), &self.procedures)?;
                for (j, &p) in self.procedures.iter().enumerate() {
                    let col: Vec<TrialOutcome> = per_trial.iter().map(|t| t[j].clone()).collect();
                    rows.push(SweepRow {
                        procedure: p,
                        mu,
                        rho,
                        estimate: summarize(&col),
                    });
                }
            }
        }
        Ok(rows)
    }
}
