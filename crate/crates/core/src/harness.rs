//! Monte Carlo FER experiments: channel, quantizer, per-bit LLRs, BP
//! decoder, adaptive stopping, deterministic seeding, resumable sweeps.
//!
//! Reproducibility contract: every frame draws from its own random stream
//! keyed by (seed, frame index), frames are processed in fixed-size batches,
//! and the stopping rule is evaluated only at batch boundaries, so results
//! are bit-identical regardless of worker count.
//!
//! Data is genuinely random (encode-and-transmit), not the all-zero
//! shortcut, because the retention surrogate channel is asymmetric. Levels
//! are data-driven, which assumes the model's input prior is uniform.

use crate::channel::{crossover_probabilities, hard_thresholds, ChannelModel, ChannelSpec, LevelDensity};
use crate::error::{Error, Result};
use crate::ldpc::code::{construct_peg_ace, LdpcCode};
use crate::ldpc::decode::Decoder;
use crate::ldpc::degree::DegreeDistribution;
use crate::mi::{bit_llrs, BitLabeling};
use crate::quantopt::{
    hard_scheme, optimize_constant_ratio, optimize_single_q_mlc, optimize_symmetric_q,
    optimize_unconstrained, thresholds_from_ratio, QuantizationScheme, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Frames per scheduling batch; the stop rule only fires on its boundaries.
const BATCH: u64 = 256;

/// How to pick the read thresholds for a channel model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quant", rename_all = "snake_case")]
pub enum QuantSpec {
    /// density-crossing hard reads
    Hard,
    /// MMI symmetric-q two-level scheme with 2 or 3 reads
    MmiSymmetricQ { reads: u8 },
    /// MMI single-q six-threshold MLC scheme
    MmiSingleQ,
    /// constant-ratio flanking thresholds at a fixed R
    ConstantRatio { r: f64 },
    /// constant-ratio with R optimized over a grid
    BestConstantRatio { r_grid: Vec<f64> },
    /// unconstrained MMI search
    Unconstrained { num_thresholds: usize, grid_points: usize },
    /// caller-supplied thresholds
    Explicit { thresholds: Vec<f64> },
}

impl QuantSpec {
    pub fn resolve(&self, model: &ChannelModel) -> Result<QuantizationScheme> {
        match self {
            QuantSpec::Hard => hard_scheme(model),
            QuantSpec::MmiSymmetricQ { reads } => optimize_symmetric_q(model, *reads),
            QuantSpec::MmiSingleQ => optimize_single_q_mlc(model),
            QuantSpec::ConstantRatio { r } => {
                let thresholds = thresholds_from_ratio(model, *r)?;
                let mi = crate::mi::mutual_information(&crossover_probabilities(model, &thresholds)?);
                Ok(QuantizationScheme { thresholds, strategy: Strategy::ConstantRatio { r: *r }, achieved_mi: mi })
            }
            QuantSpec::BestConstantRatio { r_grid } => optimize_constant_ratio(model, r_grid),
            QuantSpec::Unconstrained { num_thresholds, grid_points } => {
                optimize_unconstrained(model, *num_thresholds, *grid_points)
            }
            QuantSpec::Explicit { thresholds } => {
                let mi = crate::mi::mutual_information(&crossover_probabilities(model, thresholds)?);
                Ok(QuantizationScheme {
                    thresholds: thresholds.clone(),
                    strategy: Strategy::Hard,
                    achieved_mi: mi,
                })
            }
        }
    }
}

/// Where the LDPC code comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum CodeRef {
    /// built-in degree profile (1..3), PEG/ACE constructed
    BuiltinPeg { profile: u8, n: usize, seed: u64 },
    /// explicit degree distribution, PEG/ACE constructed
    Peg { dd: DegreeDistribution, n: usize, seed: u64 },
    /// alist file on disk (metadata sidecar optional)
    Alist { path: PathBuf },
}

impl CodeRef {
    pub fn resolve(&self) -> Result<LdpcCode> {
        match self {
            CodeRef::BuiltinPeg { profile, n, seed } => {
                construct_peg_ace(&DegreeDistribution::builtin(*profile)?, *n, *seed, 4, 4)
            }
            CodeRef::Peg { dd, n, seed } => construct_peg_ace(dd, *n, *seed, 4, 4),
            CodeRef::Alist { path } => crate::ldpc::alist::load_code(path),
        }
    }
}

fn default_target_errors() -> u64 {
    100
}
fn default_bp_iters() -> u32 {
    50
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub channel: ChannelSpec,
    pub quant: QuantSpec,
    pub code: CodeRef,
    pub max_frames: u64,
    #[serde(default = "default_target_errors")]
    pub target_frame_errors: u64,
    pub seed: u64,
    /// worker hint; 0 uses the available parallelism
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_bp_iters")]
    pub max_bp_iters: u32,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_frame_errors == 0 {
            return Err(Error::InvalidConfig("target_frame_errors must be at least 1".into()));
        }
        if self.max_frames < self.target_frame_errors {
            return Err(Error::InvalidConfig("max_frames must be at least target_frame_errors".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub fer: f64,
    pub ber: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub mean_iterations: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// analytic bit error probability of the hard-read channel (the x-axis
    /// quantity of FER plots); computed by quadrature, never estimated
    pub channel_ber: f64,
    pub config: SimConfig,
    pub wall_time_s: f64,
}

/// Analytic hard-read channel bit error probability under Gray labeling:
/// each region decides for its own level; errors are label Hamming distance.
pub fn hard_channel_ber(model: &ChannelModel) -> Result<f64> {
    let dmc = crossover_probabilities(model, &hard_thresholds(model)?)?;
    let labeling = BitLabeling::gray(model.num_levels());
    let w = labeling.bits_per_level();
    let mut ber = 0.0;
    for (x, row) in dmc.transitions.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            let dist = labeling.labels[x]
                .iter()
                .zip(&labeling.labels[j])
                .filter(|(a, b)| a != b)
                .count();
            ber += dmc.prior[x] * p * dist as f64 / w as f64;
        }
    }
    Ok(ber)
}

/// Inverse-CDF samplers for the level densities; Gaussians use Box-Muller.
enum LevelSampler {
    Gaussian { mean: f64, sigma: f64 },
    Table { grid: Vec<f64>, density: Vec<f64>, cdf: Vec<f64> },
}

impl LevelSampler {
    fn new(level: &LevelDensity) -> LevelSampler {
        match level {
            LevelDensity::Gaussian { mean, sigma } => {
                LevelSampler::Gaussian { mean: *mean, sigma: *sigma }
            }
            LevelDensity::Tabulated { grid, density } => {
                let mut cdf = vec![0.0; grid.len()];
                for i in 1..grid.len() {
                    cdf[i] = cdf[i - 1]
                        + 0.5 * (grid[i] - grid[i - 1]) * (density[i] + density[i - 1]);
                }
                let total = *cdf.last().unwrap();
                cdf.iter_mut().for_each(|c| *c /= total);
                LevelSampler::Table { grid: grid.clone(), density: density.clone(), cdf }
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            LevelSampler::Gaussian { mean, sigma } => {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen::<f64>();
                mean + sigma * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            }
            LevelSampler::Table { grid, density, cdf } => {
                let u: f64 = rng.gen();
                let i = cdf.partition_point(|&c| c < u).clamp(1, cdf.len() - 1);
                // solve the piecewise-linear density's quadratic CDF segment
                let (x0, x1) = (grid[i - 1], grid[i]);
                let (f0, f1) = (density[i - 1], density[i]);
                let total_mass = u - cdf[i - 1];
                let seg = cdf[i] - cdf[i - 1];
                if seg <= 0.0 {
                    return x0;
                }
                let h = x1 - x0;
                let a = 0.5 * (f1 - f0) / h;
                let norm = total_mass / (cdf[i] - cdf[i - 1]) * seg;
                // a t^2 + f0 t = norm (unnormalized mass in the segment)
                let t = if a.abs() < 1e-300 {
                    norm / f0.max(1e-300)
                } else {
                    let disc = (f0 * f0 + 4.0 * a * norm).max(0.0);
                    (-f0 + disc.sqrt()) / (2.0 * a)
                };
                x0 + t.clamp(0.0, h)
            }
        }
    }
}

struct FrameTally {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
    iterations: u64,
}

/// Simulates frames `range` with the shared read-only state; used by every
/// worker, so the tally is a pure function of (seed, frame indices).
#[allow(clippy::too_many_arguments)]
fn simulate_range(
    frames: std::ops::Range<u64>,
    seed: u64,
    code: &LdpcCode,
    samplers: &[LevelSampler],
    thresholds: &[f64],
    labeling: &BitLabeling,
    llr_table: &[Vec<f64>],
    max_iters: u32,
) -> FrameTally {
    let mut tally = FrameTally { frames: 0, frame_errors: 0, bit_errors: 0, iterations: 0 };
    let w = labeling.bits_per_level();
    let n = code.n;
    let cells = n.div_ceil(w);
    let mut decoder = Decoder::new(code);
    let mut llrs = vec![0.0; n];
    let mut cell_bits = vec![0u8; w];
    for frame in frames {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ frame.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let msg: Vec<u8> = (0..code.k()).map(|_| rng.gen_range(0..=1u8)).collect();
        let cw = code.encode(&msg).expect("message length fixed by k()");
        for c in 0..cells {
            for (b, bit) in cell_bits.iter_mut().enumerate() {
                // codeword bits fill the cells; a trailing partial cell is
                // padded with known zeros
                *bit = cw.get(c * w + b).copied().unwrap_or(0);
            }
            let level = labeling.level_of(&cell_bits).expect("gray labeling is total");
            let v = samplers[level].sample(&mut rng);
            let region = thresholds.partition_point(|&t| t < v);
            for b in 0..w {
                if c * w + b < n {
                    llrs[c * w + b] = llr_table[b][region];
                }
            }
        }
        let res = decoder.decode(&llrs, max_iters);
        if res.converged {
            assert!(code.syndrome_ok(&res.bits), "converged frame violates parity");
        }
        let errs = res.bits.iter().zip(&cw).filter(|(a, b)| a != b).count() as u64;
        tally.frames += 1;
        tally.bit_errors += errs;
        tally.iterations += res.iterations as u64;
        if errs > 0 {
            tally.frame_errors += 1;
        }
    }
    tally
}

pub fn run_fer(config: &SimConfig) -> Result<SimResult> {
    let code = config.code.resolve()?;
    run_fer_with_code(config, &code)
}

/// Like [`run_fer`] but with a pre-resolved code, so sweeps construct the
/// code once.
pub fn run_fer_with_code(config: &SimConfig, code: &LdpcCode) -> Result<SimResult> {
    config.validate()?;
    let started = Instant::now();
    let model = config.channel.build()?;
    let scheme = config.quant.resolve(&model)?;
    let labeling = BitLabeling::gray(model.num_levels());
    let dmc = crossover_probabilities(&model, &scheme.thresholds)?;
    let llr_table = bit_llrs(&dmc, &labeling)?;
    let channel_ber = hard_channel_ber(&model)?;
    let samplers: Vec<LevelSampler> = model.levels.iter().map(LevelSampler::new).collect();
    let workers = if config.workers > 0 {
        config.workers
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    };

    let mut frames = 0u64;
    let mut frame_errors = 0u64;
    let mut bit_errors = 0u64;
    let mut iterations = 0u64;
    while frames < config.max_frames && frame_errors < config.target_frame_errors {
        let batch_end = (frames + BATCH).min(config.max_frames);
        let chunk = (batch_end - frames).div_ceil(workers as u64).max(1);
        let tallies: Vec<FrameTally> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|wk| {
                    let lo = (frames + wk as u64 * chunk).min(batch_end);
                    let hi = (lo + chunk).min(batch_end);
                    let (code, samplers, thresholds, labeling, llr_table) =
                        (&code, &samplers, &scheme.thresholds[..], &labeling, &llr_table[..]);
                    scope.spawn(move || {
                        simulate_range(
                            lo..hi,
                            config.seed,
                            code,
                            samplers,
                            thresholds,
                            labeling,
                            llr_table,
                            config.max_bp_iters,
                        )
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for t in tallies {
            frames += t.frames;
            frame_errors += t.frame_errors;
            bit_errors += t.bit_errors;
            iterations += t.iterations;
        }
    }

    let (ci_low, ci_high) = crate::util::wilson_interval(frame_errors, frames);
    Ok(SimResult {
        fer: frame_errors as f64 / frames as f64,
        ber: bit_errors as f64 / (frames as f64 * code.n as f64),
        frames,
        frame_errors,
        mean_iterations: iterations as f64 / frames as f64,
        ci_low,
        ci_high,
        channel_ber,
        config: config.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// One sweep point: the varying axis value and its full config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: f64,
    pub config: SimConfig,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct SweepManifest {
    entries: Vec<SweepManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SweepManifestEntry {
    config_json: String,
    axis: f64,
    result: SimResult,
}

/// Runs every point, persisting each finished result immediately when
/// `out_stem` is given (`<stem>.csv` plus a `<stem>.manifest.json` sidecar).
/// Re-running with the same stem skips points already in the manifest, so an
/// interrupted sweep resumes where it stopped. All points must reference the
/// same code.
pub fn sweep(points: &[SweepPoint], out_stem: Option<&Path>) -> Result<Vec<SimResult>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    if points.iter().any(|p| p.config.code != points[0].config.code) {
        return Err(Error::InvalidConfig("sweep points must share one code".into()));
    }
    let manifest_path = out_stem.map(|s| s.with_extension("manifest.json"));
    let csv_path = out_stem.map(|s| s.with_extension("csv"));
    let mut manifest: SweepManifest = match &manifest_path {
        Some(p) if p.exists() => serde_json::from_reader(std::fs::File::open(p)?)?,
        _ => SweepManifest::default(),
    };
    let code = points[0].config.code.resolve()?;
    let mut results = Vec::with_capacity(points.len());
    for point in points {
        let key = serde_json::to_string(&point.config)?;
        let cached = manifest.entries.iter().find(|e| e.config_json == key);
        let result = match cached {
            Some(e) => e.result.clone(),
            None => {
                let r = run_fer_with_code(&point.config, &code)?;
                manifest.entries.push(SweepManifestEntry {
                    config_json: key,
                    axis: point.axis,
                    result: r.clone(),
                });
                if let Some(p) = &manifest_path {
                    serde_json::to_writer(std::fs::File::create(p)?, &manifest)?;
                }
                if let Some(p) = &csv_path {
                    write_sweep_csv(p, &manifest)?;
                }
                r
            }
        };
        results.push(result);
    }
    Ok(results)
}

fn write_sweep_csv(path: &Path, manifest: &SweepManifest) -> Result<()> {
    use std::io::Write;
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "# tool: readmi v{}", env!("CARGO_PKG_VERSION"))?;
    let fingerprint: String = manifest.entries.iter().map(|e| e.config_json.as_str()).collect();
    writeln!(file, "# config: {:016x}", crate::util::fnv1a64(fingerprint.as_bytes()))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "axis",
        "channel_ber",
        "fer",
        "ci_low",
        "ci_high",
        "ber",
        "frames",
        "frame_errors",
        "mean_iterations",
        "wall_time_s",
    ])?;
    for e in &manifest.entries {
        let r = &e.result;
        w.write_record([
            e.axis.to_string(),
            r.channel_ber.to_string(),
            r.fer.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.ber.to_string(),
            r.frames.to_string(),
            r.frame_errors.to_string(),
            r.mean_iterations.to_string(),
            r.wall_time_s.to_string(),
        ])?;
    }
    w.flush().map_err(std::io::Error::from)?;
    Ok(())
}
