//! Discretized density evolution over quantized LLR densities.
//!
//! Signed LLR pmfs live on a uniform grid of `num_bins + 1` points spanning
//! [-llr_range, +llr_range]. Variable-node updates are exact index-domain
//! convolutions (FFT with saturating fold); check-node updates run in the
//! sign/magnitude domain through a precomputed quantized boxplus table.
//!
//! Analysis assumes the all-zero codeword over a symmetric channel. Per-bit
//! channels that are not output-symmetric (the MLC bit channels) are
//! symmetrized by the coset-averaging adapter: each output contributes half
//! its conditional-0 mass at +LLR and half its conditional-1 mass at -LLR,
//! which is exactly the density seen after scrambling with a uniform coset.
//!
//! A degree-1 variable fraction (present in two of the built-in profiles)
//! leaves a residual error floor of lambda_1 times the raw channel error,
//! since those edges forward the channel message forever. Convergence is
//! therefore declared below max(target_error, 10x that floor); for profiles
//! without degree-1 nodes this is exactly `target_error`.

use crate::error::{Error, Result};
use crate::ldpc::degree::DegreeDistribution;
use crate::mi::{BitLabeling, Dmc};
use crate::util::{qfunc, qfunc_inv};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeConfig {
    /// LLR grid half-range; masses beyond it saturate into the end bins.
    pub llr_range: f64,
    /// Number of grid intervals (even); the grid has num_bins + 1 points.
    pub num_bins: usize,
    pub max_de_iters: usize,
    pub target_error: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig { llr_range: 30.0, num_bins: 4096, max_de_iters: 2000, target_error: 1e-10 }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.llr_range <= 0.0 {
            return Err(Error::InvalidConfig("llr_range must be positive".into()));
        }
        if self.num_bins < 4 || self.num_bins % 2 != 0 {
            return Err(Error::InvalidConfig("num_bins must be even and at least 4".into()));
        }
        if self.max_de_iters == 0 || !(self.target_error > 0.0) {
            return Err(Error::InvalidConfig("max_de_iters and target_error must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one fixed-channel density evolution run.
#[derive(Debug, Clone)]
pub struct DeRun {
    pub converged: bool,
    pub iterations: usize,
    pub final_error: f64,
    /// Whether the error metric was non-increasing throughout (audited each
    /// run; discretization can in principle break it).
    pub monotone: bool,
    /// Largest single-iteration increase of the error metric, 0 when the run
    /// was perfectly monotone; quantifies discretization artifacts.
    pub max_error_rise: f64,
}

/// One bisection probe, for threshold traces.
#[derive(Debug, Clone, Serialize)]
pub struct DeProbe {
    pub param: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_error: f64,
}

#[derive(Debug, Clone)]
pub struct ThresholdResult {
    /// Largest still-convergent channel parameter found.
    pub threshold: f64,
    /// The same point in the 2Es/N0 convention (AWGN/BSC searches only;
    /// NaN for generic DMC families).
    pub snr_db: f64,
    pub monotone: bool,
    pub probes: Vec<DeProbe>,
}

/// Reusable evolution state for one (degree distribution, grid) pair: the
/// quantized boxplus table and FFT plans.
pub struct DeEngine {
    cfg: DeConfig,
    dd: DegreeDistribution,
    k: usize,
    /// (k+1)^2 row-major magnitude-boxplus output indices
    table: Vec<u16>,
    fft_size: usize,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

/// Sign/magnitude pair density in the transformed domain: u = pos + neg,
/// v = pos - neg, so a boxplus of signed densities is a plain magnitude-table
/// convolution of u's and of v's.
#[derive(Clone)]
struct Mag {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl DeEngine {
    pub fn new(dd: &DegreeDistribution, cfg: &DeConfig) -> Result<Self> {
        cfg.validate()?;
        let k = cfg.num_bins / 2;
        if k + 1 > u16::MAX as usize {
            return Err(Error::InvalidConfig("num_bins too large for the boxplus table".into()));
        }
        let delta = cfg.llr_range / k as f64;
        // tanh(m/2) per magnitude bin, then out = 2 atanh(t_i t_j) rounded to
        // the nearest bin
        let th: Vec<f64> = (0..=k).map(|i| (0.5 * i as f64 * delta).tanh()).collect();
        let mut table = vec![0u16; (k + 1) * (k + 1)];
        for i in 0..=k {
            for j in i..=k {
                let p = th[i] * th[j];
                let m = ((1.0 + p) / (1.0 - p)).ln();
                let idx = ((m / delta).round() as usize).min(k) as u16;
                table[i * (k + 1) + j] = idx;
                table[j * (k + 1) + i] = idx;
            }
        }
        let fft_size = (dd.max_lambda_degree() * 2 * k + 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(fft_size);
        let fft_inv = planner.plan_fft_inverse(fft_size);
        Ok(DeEngine { cfg: cfg.clone(), dd: dd.clone(), k, table, fft_size, fft_fwd, fft_inv })
    }

    pub fn grid_points(&self) -> usize {
        2 * self.k + 1
    }

    /// Runs density evolution for one channel LLR density until the error
    /// metric drops below the (floor-adjusted) target, stalls, or hits the
    /// iteration cap. The error metric is the v-to-c message error
    /// probability P(L < 0) + P(L = 0)/2.
    pub fn evolve(&mut self, channel: &[f64]) -> DeRun {
        assert_eq!(channel.len(), self.grid_points(), "channel density grid mismatch");
        let chan_err = error_mass(channel, self.k);
        let lam1: f64 =
            self.dd.lambda.iter().find(|&&(d, _)| d == 1).map(|&(_, a)| a).unwrap_or(0.0);
        let target = self.cfg.target_error.max(10.0 * lam1 * chan_err);
        let c_fft = self.padded_fft(channel);
        let mut q = channel.to_vec();
        let mut errs = vec![chan_err];
        let mut max_rise = 0.0f64;
        for iter in 1..=self.cfg.max_de_iters {
            let r = self.check_update(&q);
            q = self.var_update(&c_fft, &r);
            let e = error_mass(&q, self.k);
            max_rise = max_rise.max(e - errs.last().unwrap());
            errs.push(e);
            let done = if e < target {
                Some(true)
            } else if errs.len() > 60 && e > errs[errs.len() - 51] * (1.0 - 1e-9) {
                // stall: numerically no progress over the last 50 iterations,
                // so a fixed point has been reached above the target; the
                // tolerance must be loose enough to catch true fixed points
                // but far tighter than the slow crawl through a convergent
                // trajectory's bottleneck region
                Some(false)
            } else {
                None
            };
            if let Some(converged) = done {
                return DeRun {
                    converged,
                    iterations: iter,
                    final_error: e,
                    monotone: max_rise <= 1e-8,
                    max_error_rise: max_rise.max(0.0),
                };
            }
        }
        let e = *errs.last().unwrap();
        DeRun {
            converged: false,
            iterations: self.cfg.max_de_iters,
            final_error: e,
            monotone: max_rise <= 1e-8,
            max_error_rise: max_rise.max(0.0),
        }
    }

    fn padded_fft(&self, x: &[f64]) -> Vec<Complex<f64>> {
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];
        for (b, &m) in buf.iter_mut().zip(x) {
            b.re = m;
        }
        self.fft_fwd.process(&mut buf);
        buf
    }

    /// Check-node update: rho-weighted (d-1)-fold boxplus of the incoming
    /// density, via binary exponentiation on the magnitude table.
    fn check_update(&self, q: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut base = Mag { u: vec![0.0; k + 1], v: vec![0.0; k + 1] };
        base.u[0] = q[k];
        base.v[0] = q[k];
        for m in 1..=k {
            let (p, n) = (q[k + m], q[k - m]);
            base.u[m] = p + n;
            base.v[m] = p - n;
        }
        let mut acc = Mag { u: vec![0.0; k + 1], v: vec![0.0; k + 1] };
        let mut cur: Option<(Mag, usize)> = None;
        for &(d, w) in &self.dd.rho {
            let e = d - 1;
            let mag = match cur.take() {
                None => self.mag_power(&base, e),
                Some((mut m, ce)) => {
                    for _ in ce..e {
                        m = self.boxplus(&m, &base);
                    }
                    m
                }
            };
            for i in 0..=k {
                acc.u[i] += w * mag.u[i];
                acc.v[i] += w * mag.v[i];
            }
            cur = Some((mag, e));
        }
        let mut r = vec![0.0; 2 * k + 1];
        r[k] = acc.u[0];
        for m in 1..=k {
            r[k + m] = 0.5 * (acc.u[m] + acc.v[m]);
            r[k - m] = 0.5 * (acc.u[m] - acc.v[m]);
        }
        r
    }

    fn mag_power(&self, base: &Mag, e: usize) -> Mag {
        debug_assert!(e >= 1);
        let mut result: Option<Mag> = None;
        let mut sq = base.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => sq.clone(),
                    Some(r) => self.boxplus(&r, &sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = self.boxplus(&sq, &sq);
        }
        result.unwrap()
    }

    fn boxplus(&self, a: &Mag, b: &Mag) -> Mag {
        Mag { u: self.conv_table(&a.u, &b.u), v: self.conv_table(&a.v, &b.v) }
    }

    fn conv_table(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k + 1];
        for (i, &w) in x.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let row = &self.table[i * (k + 1)..(i + 1) * (k + 1)];
            for (&t, &m) in row.iter().zip(y) {
                out[t as usize] += w * m;
            }
        }
        out
    }

    /// Variable-node update: lambda-weighted exact convolution of the channel
    /// density with (d-1) copies of the check density, saturating out-of-range
    /// mass into the end bins.
    fn var_update(&self, c_fft: &[Complex<f64>], r: &[f64]) -> Vec<f64> {
        let (k, s) = (self.k, self.fft_size);
        let r_fft = self.padded_fft(r);
        let mut out = vec![0.0; 2 * k + 1];
        let mut cur = vec![Complex::new(1.0, 0.0); s];
        let mut e = 0usize;
        let scale = 1.0 / s as f64;
        let mut spec = vec![Complex::new(0.0, 0.0); s];
        for &(d, w) in &self.dd.lambda {
            while e < d - 1 {
                for (c, rf) in cur.iter_mut().zip(&r_fft) {
                    *c *= rf;
                }
                e += 1;
            }
            for ((sp, c), cf) in spec.iter_mut().zip(&cur).zip(c_fft) {
                *sp = c * cf;
            }
            self.fft_inv.process(&mut spec);
            // the convolution of d grid densities has its zero at d*k
            let zero = (e + 1) * k;
            for (idx, sp) in spec.iter().enumerate().take((e + 1) * 2 * k + 1) {
                let val = sp.re * scale;
                if val <= 0.0 {
                    continue;
                }
                let tgt = (idx as isize - zero as isize + k as isize).clamp(0, 2 * k as isize);
                out[tgt as usize] += w * val;
            }
        }
        let sum: f64 = out.iter().sum();
        if sum > 0.0 {
            for o in out.iter_mut() {
                *o /= sum;
            }
        }
        out
    }
}

fn error_mass(q: &[f64], k: usize) -> f64 {
    q[..k].iter().sum::<f64>() + 0.5 * q[k]
}

/// Splits a point mass onto the two adjacent grid points (preserves the mean
/// as long as the LLR is in range; out-of-range mass saturates).
fn place_mass(out: &mut [f64], k: usize, delta: f64, llr: f64, mass: f64) {
    if mass <= 0.0 {
        return;
    }
    let pos = (llr / delta + k as f64).clamp(0.0, 2.0 * k as f64);
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    out[lo] += mass * (1.0 - frac);
    if frac > 0.0 {
        out[lo + 1] += mass * frac;
    }
}

/// LLR density of binary-input AWGN with BPSK +-1 under the all-zero
/// codeword: N(2/sigma^2, 4/sigma^2), binned by exact interval masses.
pub fn awgn_llr_density(sigma: f64, cfg: &DeConfig) -> Vec<f64> {
    let k = cfg.num_bins / 2;
    let delta = cfg.llr_range / k as f64;
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let mut out = vec![0.0; 2 * k + 1];
    for (i, o) in out.iter_mut().enumerate() {
        let centered = i as f64 - k as f64;
        let a = if i == 0 { 1.0 } else { qfunc(((centered - 0.5) * delta - mean) / sd) };
        let b = if i == 2 * k { 0.0 } else { qfunc(((centered + 0.5) * delta - mean) / sd) };
        *o = (a - b).max(0.0);
    }
    out
}

/// Two-mass LLR density of a BSC with crossover epsilon.
pub fn bsc_llr_density(epsilon: f64, cfg: &DeConfig) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidConfig(format!("BSC crossover {epsilon} outside (0, 0.5)")));
    }
    let k = cfg.num_bins / 2;
    let delta = cfg.llr_range / k as f64;
    let l = ((1.0 - epsilon) / epsilon).ln();
    let mut out = vec![0.0; 2 * k + 1];
    place_mass(&mut out, k, delta, l, 1.0 - epsilon);
    place_mass(&mut out, k, delta, -l, epsilon);
    Ok(out)
}

/// Symmetrized LLR density of the bit channels of a DMC under a labeling:
/// for every bit and output, half the conditional-0 mass lands at +LLR and
/// half the conditional-1 mass at -LLR (coset-averaging adapter), averaged
/// uniformly over bit positions.
pub fn dmc_llr_density(dmc: &Dmc, labeling: &BitLabeling, cfg: &DeConfig) -> Result<Vec<f64>> {
    if labeling.labels.len() != dmc.num_inputs() {
        return Err(Error::InvalidModel("labeling size != DMC inputs".into()));
    }
    let k = cfg.num_bins / 2;
    let delta = cfg.llr_range / k as f64;
    let w = labeling.bits_per_level();
    let mut out = vec![0.0; 2 * k + 1];
    for b in 0..w {
        for y in 0..dmc.num_outputs() {
            let mut p0 = 0.0;
            let mut w0 = 0.0;
            let mut p1 = 0.0;
            let mut w1 = 0.0;
            for (x, row) in dmc.transitions.iter().enumerate() {
                if labeling.labels[x][b] == 0 {
                    p0 += dmc.prior[x] * row[y];
                    w0 += dmc.prior[x];
                } else {
                    p1 += dmc.prior[x] * row[y];
                    w1 += dmc.prior[x];
                }
            }
            // conditional channel law P(y | bit)
            let (c0, c1) = (if w0 > 0.0 { p0 / w0 } else { 0.0 }, if w1 > 0.0 { p1 / w1 } else { 0.0 });
            let llr = if c0 == 0.0 && c1 == 0.0 {
                continue;
            } else if c1 == 0.0 {
                cfg.llr_range
            } else if c0 == 0.0 {
                -cfg.llr_range
            } else {
                (c0 / c1).ln()
            };
            place_mass(&mut out, k, delta, llr, 0.5 * c0 / w as f64);
            place_mass(&mut out, k, delta, -llr, 0.5 * c1 / w as f64);
        }
    }
    Ok(out)
}

/// Shared bisection: `lo` must converge and `hi` must not; the returned
/// threshold is the bracket midpoint once it is narrower than `tol`.
fn bisect_threshold(
    engine: &mut DeEngine,
    mut density_for: impl FnMut(f64) -> Result<Vec<f64>>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    relative: bool,
) -> Result<(f64, bool, Vec<DeProbe>)> {
    let mut probes = Vec::new();
    let mut monotone = true;
    let mut probe = |engine: &mut DeEngine,
                     p: f64,
                     probes: &mut Vec<DeProbe>,
                     monotone: &mut bool|
     -> Result<bool> {
        let run = engine.evolve(&density_for(p)?);
        *monotone &= run.monotone;
        probes.push(DeProbe {
            param: p,
            converged: run.converged,
            iterations: run.iterations,
            final_error: run.final_error,
        });
        Ok(run.converged)
    };
    if !probe(engine, lo, &mut probes, &mut monotone)? {
        return Err(Error::NonMonotoneFamily);
    }
    if probe(engine, hi, &mut probes, &mut monotone)? {
        return Err(Error::NonMonotoneFamily);
    }
    loop {
        let width = hi - lo;
        let done = if relative { width <= tol * hi.abs().max(f64::MIN_POSITIVE) } else { width <= tol };
        if done {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if probe(engine, mid, &mut probes, &mut monotone)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), monotone, probes))
}

/// Noise threshold on binary-input AWGN: the largest sigma at which density
/// evolution converges, bisected to 1e-4, reported with SNR = 2Es/N0 in dB.
pub fn de_threshold_awgn(dd: &DegreeDistribution, cfg: &DeConfig) -> Result<ThresholdResult> {
    let mut engine = DeEngine::new(dd, cfg)?;
    let (sigma, monotone, probes) =
        bisect_threshold(&mut engine, |s| Ok(awgn_llr_density(s, cfg)), 0.05, 3.0, 1e-4, false)?;
    Ok(ThresholdResult { threshold: sigma, snr_db: -20.0 * sigma.log10(), monotone, probes })
}

/// Crossover threshold on the BSC, with the equivalent hard-read AWGN SNR
/// obtained by inverting epsilon = Q(sqrt(2Es/N0)).
pub fn de_threshold_bsc(dd: &DegreeDistribution, cfg: &DeConfig) -> Result<ThresholdResult> {
    let mut engine = DeEngine::new(dd, cfg)?;
    let (eps, monotone, probes) =
        bisect_threshold(&mut engine, |e| bsc_llr_density(e, cfg), 1e-4, 0.499, 1e-5, false)?;
    Ok(ThresholdResult {
        threshold: eps,
        snr_db: 20.0 * qfunc_inv(eps).log10(),
        monotone,
        probes,
    })
}

/// Threshold over a quantized-channel family indexed by a scalar degradation
/// parameter (larger = worse channel): the largest parameter with DE
/// convergence, bisected to relative 1e-3. `lo` must converge and `hi` must
/// not, otherwise the family is flagged non-monotone.
pub fn de_threshold_dmc(
    dd: &DegreeDistribution,
    family: impl Fn(f64) -> Result<(Dmc, BitLabeling)>,
    lo: f64,
    hi: f64,
    cfg: &DeConfig,
) -> Result<ThresholdResult> {
    let mut engine = DeEngine::new(dd, cfg)?;
    let (param, monotone, probes) = bisect_threshold(
        &mut engine,
        |p| {
            let (dmc, labeling) = family(p)?;
            dmc_llr_density(&dmc, &labeling, cfg)
        },
        lo,
        hi,
        1e-3,
        true,
    )?;
    Ok(ThresholdResult { threshold: param, snr_db: f64::NAN, monotone, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{crossover_probabilities, make_slc_gaussian};
    use crate::quantopt::optimize_symmetric_q;

    fn regular36() -> DegreeDistribution {
        DegreeDistribution::new(vec![(3, 1.0)], vec![(6, 1.0)]).unwrap()
    }

    fn test_cfg() -> DeConfig {
        DeConfig { llr_range: 25.0, num_bins: 1024, ..DeConfig::default() }
    }

    /// (3,6)-regular AWGN threshold, a standard published benchmark.
    #[test]
    fn regular_three_six_awgn_threshold() {
        let res = de_threshold_awgn(&regular36(), &test_cfg()).unwrap();
        assert!((res.threshold - 0.881).abs() < 3e-3, "sigma* = {}", res.threshold);
        assert!(res.monotone);
        assert!(res.probes.len() > 5);
    }

    /// (3,6)-regular BSC threshold, also a published benchmark.
    #[test]
    fn regular_three_six_bsc_threshold() {
        let res = de_threshold_bsc(&regular36(), &test_cfg()).unwrap();
        assert!((res.threshold - 0.084).abs() < 2e-3, "eps* = {}", res.threshold);
        assert!(res.monotone);
    }

    /// Doubling the grid resolution must not move the threshold appreciably.
    #[test]
    fn bsc_threshold_stable_under_bin_doubling() {
        let coarse = DeConfig { llr_range: 25.0, num_bins: 512, ..DeConfig::default() };
        let fine = DeConfig { llr_range: 25.0, num_bins: 1024, ..DeConfig::default() };
        let a = de_threshold_bsc(&regular36(), &coarse).unwrap();
        let b = de_threshold_bsc(&regular36(), &fine).unwrap();
        assert!((a.snr_db - b.snr_db).abs() < 0.02, "{} vs {} dB", a.snr_db, b.snr_db);
    }

    /// A 1-region (single-output) quantization carries zero information and
    /// must never converge.
    #[test]
    fn degenerate_one_region_never_converges() {
        let cfg = test_cfg();
        let mut engine = DeEngine::new(&regular36(), &cfg).unwrap();
        let dmc = Dmc::uniform_prior(vec![vec![1.0], vec![1.0]]).unwrap();
        let labeling = BitLabeling::gray(2);
        let density = dmc_llr_density(&dmc, &labeling, &cfg).unwrap();
        let run = engine.evolve(&density);
        assert!(!run.converged);
        assert!(run.final_error >= 0.45);
    }

    /// Data-processing ordering for the 2-read MMI-quantized SLC family: its
    /// SNR threshold sits between the single-read (BSC) and full-precision
    /// (AWGN) thresholds. The family parameter is -SNR so that larger means
    /// more degraded.
    #[test]
    fn two_read_threshold_between_bsc_and_awgn() {
        let dd = regular36();
        let cfg = test_cfg();
        let awgn = de_threshold_awgn(&dd, &cfg).unwrap();
        let bsc = de_threshold_bsc(&dd, &cfg).unwrap();
        assert!(awgn.snr_db < bsc.snr_db);
        let family = |neg_snr: f64| {
            let model = make_slc_gaussian(-neg_snr)?;
            let scheme = optimize_symmetric_q(&model, 2)?;
            let dmc = crossover_probabilities(&model, &scheme.thresholds)?;
            Ok((dmc, BitLabeling::gray(2)))
        };
        let res = de_threshold_dmc(&dd, family, -(bsc.snr_db + 1.0), -(awgn.snr_db - 0.3), &cfg)
            .unwrap();
        let snr2 = -res.threshold;
        assert!(
            snr2 > awgn.snr_db && snr2 < bsc.snr_db,
            "2-read threshold {snr2} dB outside ({}, {}) dB",
            awgn.snr_db,
            bsc.snr_db
        );
    }

    /// Mismatched endpoint behavior is reported, not silently bisected.
    #[test]
    fn disagreeing_brackets_are_flagged() {
        let dd = regular36();
        let cfg = test_cfg();
        let family = |p: f64| {
            let eps = p.clamp(1e-3, 0.49);
            let dmc = Dmc::uniform_prior(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])?;
            Ok((dmc, BitLabeling::gray(2)))
        };
        // both endpoints deep in the non-convergent region
        let err = de_threshold_dmc(&dd, family, 0.3, 0.4, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneFamily));
    }

    #[test]
    fn config_validation() {
        assert!(DeConfig { num_bins: 5, ..DeConfig::default() }.validate().is_err());
        assert!(DeConfig { llr_range: 0.0, ..DeConfig::default() }.validate().is_err());
        assert!(DeConfig::default().validate().is_ok());
        assert!(bsc_llr_density(0.6, &DeConfig::default()).is_err());
    }

    /// The BSC density is two interpolated masses that preserve total mass
    /// and the error metric exactly.
    #[test]
    fn bsc_density_masses() {
        let cfg = test_cfg();
        let d = bsc_llr_density(0.05, &cfg).unwrap();
        let k = cfg.num_bins / 2;
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((error_mass(&d, k) - 0.05).abs() < 1e-12);
    }
}
