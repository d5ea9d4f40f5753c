//! Randomized multiple testing with e-values and p-values.
//!
//! The crate implements the e-BH procedure and its randomized improvements
//! built on stochastic rounding, the Benjamini–Yekutieli procedure and its
//! randomized version, Hommel-type global null tests with closed-testing
//! shortcuts, randomized p-merging, FCR-controlling interval rules, and a
//! Monte Carlo harness for checking FDR, FCR and power claims.
//!
//! Randomized procedures take their uniform draws explicitly, so callers can
//! couple draws across procedures; [`UniformSource`] produces reproducible
//! draws from a seed and a substream path.

pub mod error;
pub mod evalue;
pub mod fcr;
pub mod global_null;
pub mod harmonic;
pub mod order;
pub mod pvalue;
pub mod rng;
pub mod rounding;
pub mod sim;
pub mod types;

pub use error::{Error, Result};
pub use evalue::{
    bh, ebh, ell_index, j_ebh, merge_evalue_pvalue, pe_ebh, r1_ebh, r2_ebh, rboth_ebh, u_ebh,
    u_ebh_by_ell, EbhResult, LevelGrid,
};
pub use harmonic::{harmonic, HarmonicTable};
pub use order::{order_statistics_asc, order_statistics_desc};
pub use rng::UniformSource;
pub use rounding::{
    adaptive_round, generalized_round_equal, generalized_round_uniform, joint_round,
    stochastic_round, Grid, RoundingOutcome,
};
pub use types::{Alpha, Discoveries, EValues, PValues};
pub use pvalue::{by, by_calibrate, reshaped_by, reshaped_u_by, u_by, ByResult, ReshapingFunction};
pub use global_null::{
    closed_hommel, closed_testing_bruteforce, closed_u_hommel, grid_harmonic_calibrator,
    hommel_local_test, hommel_p, merge_p, merge_p_randomized, u_hommel_local_test, u_hommel_p,
    Calibrator, MergedP, PMergingDual,
};
pub use fcr::{
    by_fcr_level, eby_level, gaussian_ci, gaussian_eci, u_by_fcr_level, ueby_level, GaussianECI,
    HalfLine, LevelRule, SelectionResult,
};
