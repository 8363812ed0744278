//! Read-threshold optimization for Flash memory channels by mutual-information
//! maximization, validated end to end with an LDPC belief-propagation stack,
//! density evolution, a bounded-distance BCH baseline, and a Monte Carlo
//! frame-error-rate harness.

pub mod baselines;
pub mod channel;
pub mod de;
pub mod error;
pub mod harness;
pub mod ldpc;
pub mod mi;
pub mod quantopt;
pub mod util;

pub use baselines::{bch_fer_analytic, bch_fer_mc, BchMcResult, BCH_N, BCH_T};
pub use channel::{
    crossover_probabilities, hard_thresholds, make_mlc_gaussian, make_retention_surrogate,
    make_slc_gaussian, mlc_sigma_for_snr, ChannelModel, ChannelSpec, LevelDensity,
    RetentionSurrogateParams,
};
pub use de::{
    de_threshold_awgn, de_threshold_bsc, de_threshold_dmc, DeConfig, DeEngine, DeProbe, DeRun,
    ThresholdResult,
};
pub use error::{Error, Result};
pub use harness::{
    hard_channel_ber, run_fer, run_fer_with_code, sweep, CodeRef, QuantSpec, SimConfig, SimResult,
    SweepPoint,
};
pub use mi::{bit_llrs, mutual_information, BitLabeling, Dmc, LLR_MAX};
pub use quantopt::{
    optimize_constant_ratio, optimize_single_q_mlc, optimize_symmetric_q, optimize_unconstrained,
    thresholds_from_ratio, QuantizationScheme, Strategy,
};
