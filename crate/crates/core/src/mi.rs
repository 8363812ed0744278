//! Discrete memoryless channels, mutual information, analytic MI derivatives
//! for the symmetric two-level 2/3-read quantizations, and per-bit LLRs.

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::util::normal_pdf;
use serde::{Deserialize, Serialize};

/// Decoder-input LLR magnitudes are clipped here. Only zero-probability
/// outputs at extreme thresholds ever reach the clip.
pub const LLR_MAX: f64 = 30.0;

/// An M-input, K-output discrete memoryless channel with an input prior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dmc {
    /// Row-major transition table, `transitions[x][y] = P(y|x)`.
    pub transitions: Vec<Vec<f64>>,
    /// Input prior, defaults to uniform.
    pub prior: Vec<f64>,
}

impl Dmc {
    /// Builds a DMC, checking that every row is a probability vector
    /// (entries nonnegative, sum within 1e-9 of one) and that the prior
    /// is a probability vector within 1e-12.
    pub fn new(transitions: Vec<Vec<f64>>, prior: Vec<f64>) -> Result<Self> {
        if transitions.is_empty() || transitions[0].is_empty() {
            return Err(Error::InvalidModel("empty transition table".into()));
        }
        let k = transitions[0].len();
        if transitions.len() != prior.len() {
            return Err(Error::InvalidModel("prior length != number of inputs".into()));
        }
        for row in &transitions {
            if row.len() != k {
                return Err(Error::InvalidModel("ragged transition table".into()));
            }
            if row.iter().any(|&p| !(p >= 0.0)) {
                return Err(Error::InvalidModel("negative transition probability".into()));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidModel(format!("row sums to {s}, not 1")));
            }
        }
        if prior.iter().any(|&p| !(p >= 0.0)) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel("prior is not a probability vector".into()));
        }
        Ok(Self { transitions, prior })
    }

    pub fn uniform_prior(transitions: Vec<Vec<f64>>) -> Result<Self> {
        let m = transitions.len();
        Dmc::new(transitions, vec![1.0 / m as f64; m])
    }

    pub fn num_inputs(&self) -> usize {
        self.transitions.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.transitions[0].len()
    }

    /// Output marginal P(y).
    pub fn output_distribution(&self) -> Vec<f64> {
        let k = self.num_outputs();
        let mut py = vec![0.0; k];
        for (x, row) in self.transitions.iter().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                py[y] += self.prior[x] * p;
            }
        }
        py
    }
}

fn entropy_bits(p: &[f64]) -> f64 {
    // 0 log 0 == 0 by continuity
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// I(X;Y) = H(Y) - H(Y|X) in bits. Always in [0, log2 M].
pub fn mutual_information(dmc: &Dmc) -> f64 {
    let hy = entropy_bits(&dmc.output_distribution());
    let hyx: f64 = dmc
        .transitions
        .iter()
        .zip(&dmc.prior)
        .map(|(row, &pi)| pi * entropy_bits(row))
        .sum();
    (hy - hyx).max(0.0)
}

/// Per-level bit labels of width log2(M), most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitLabeling {
    pub labels: Vec<Vec<u8>>,
}

impl BitLabeling {
    pub fn new(labels: Vec<Vec<u8>>) -> Result<Self> {
        let m = labels.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidModel("labeling needs a power-of-two level count".into()));
        }
        let w = (m as f64).log2() as usize;
        for l in &labels {
            if l.len() != w || l.iter().any(|&b| b > 1) {
                return Err(Error::InvalidModel("label width or alphabet mismatch".into()));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                if labels[i] == labels[j] {
                    return Err(Error::InvalidModel("duplicate labels".into()));
                }
            }
        }
        Ok(Self { labels })
    }

    /// Gray labeling over `m` levels; for m = 4 this is (00, 01, 11, 10).
    pub fn gray(m: usize) -> Self {
        let w = (m as f64).log2() as usize;
        let labels = (0..m)
            .map(|i| {
                let g = i ^ (i >> 1);
                (0..w).rev().map(|b| ((g >> b) & 1) as u8).collect()
            })
            .collect();
        Self { labels }
    }

    pub fn bits_per_level(&self) -> usize {
        self.labels[0].len()
    }

    /// Level index carrying the given bits, if any.
    pub fn level_of(&self, bits: &[u8]) -> Option<usize> {
        self.labels.iter().position(|l| l == bits)
    }
}

/// LLR table: `out[bit][y]` = ln( P(bit=0, y) / P(bit=1, y) ), clipped to
/// +-`LLR_MAX`. Natural log, matching the decoder's message domain.
pub fn bit_llrs(dmc: &Dmc, labeling: &BitLabeling) -> Result<Vec<Vec<f64>>> {
    if labeling.labels.len() != dmc.num_inputs() {
        return Err(Error::InvalidModel("labeling size != DMC inputs".into()));
    }
    let w = labeling.bits_per_level();
    let k = dmc.num_outputs();
    let mut out = vec![vec![0.0; k]; w];
    for b in 0..w {
        for y in 0..k {
            let mut num = 0.0;
            let mut den = 0.0;
            for (x, row) in dmc.transitions.iter().enumerate() {
                if labeling.labels[x][b] == 0 {
                    num += dmc.prior[x] * row[y];
                } else {
                    den += dmc.prior[x] * row[y];
                }
            }
            out[b][y] = if num == 0.0 && den == 0.0 {
                0.0
            } else if den == 0.0 {
                LLR_MAX
            } else if num == 0.0 {
                -LLR_MAX
            } else {
                (num / den).ln().clamp(-LLR_MAX, LLR_MAX)
            };
        }
    }
    Ok(out)
}

/// Crossover probabilities (p1, p2, p3) of the symmetric 2-read quantization
/// at half-width `q` for a two-level Gaussian model.
fn two_read_crossovers(es_sqrt: f64, sigma: f64, q: f64) -> (f64, f64, f64) {
    let qm = crate::util::qfunc((es_sqrt - q) / sigma);
    let qp = crate::util::qfunc((es_sqrt + q) / sigma);
    (1.0 - qm, qm - qp, qp)
}

fn slc_params(model: &ChannelModel) -> Result<(f64, f64)> {
    let (means, sigmas) = model.gaussian_params().ok_or_else(|| {
        Error::InvalidModel("analytic MI derivative needs an analytic Gaussian model".into())
    })?;
    if means.len() != 2 || (means[0] + means[1]).abs() > 1e-12 || (sigmas[0] - sigmas[1]).abs() > 1e-12 {
        return Err(Error::InvalidModel(
            "analytic MI derivative needs a symmetric two-level model".into(),
        ));
    }
    Ok((means[1], sigmas[0]))
}

/// Analytic dI/dq (bits per volt) for the symmetric 2-read quantization.
///
/// Uses the threshold-voltage density at the moving word-line voltages,
/// i.e. the standard normal pdf scaled by the model's sigma.
pub fn mi_derivative_two_reads(model: &ChannelModel, q: f64) -> Result<f64> {
    if q < 0.0 {
        return Err(Error::NegativeQ(q));
    }
    let (es_sqrt, sigma) = slc_params(model)?;
    let (p1, _p2, p3) = two_read_crossovers(es_sqrt, sigma, q);
    let p13 = p1 + p3;
    let f_plus = normal_pdf((es_sqrt + q) / sigma) / sigma;
    let f_minus = normal_pdf((es_sqrt - q) / sigma) / sigma;
    let term = |f: f64, p: f64| {
        if f == 0.0 {
            0.0
        } else {
            f * (p13 / (2.0 * p)).log2()
        }
    };
    Ok(term(f_plus, p3) + term(f_minus, p1))
}

/// Analytic dI/dq (bits per volt) for the symmetric 3-read quantization
/// (word-line voltages -q, 0, +q).
pub fn mi_derivative_three_reads(model: &ChannelModel, q: f64) -> Result<f64> {
    if q < 0.0 {
        return Err(Error::NegativeQ(q));
    }
    let (es_sqrt, sigma) = slc_params(model)?;
    let qm = crate::util::qfunc((es_sqrt - q) / sigma);
    let q0 = crate::util::qfunc(es_sqrt / sigma);
    let qp = crate::util::qfunc((es_sqrt + q) / sigma);
    let p = [1.0 - qm, qm - q0, q0 - qp, qp];
    let f_minus = normal_pdf((es_sqrt - q) / sigma) / sigma;
    let f_plus = normal_pdf((es_sqrt + q) / sigma) / sigma;
    let dp = [-f_minus, f_minus, f_plus, -f_plus];
    let p14 = p[0] + p[3];
    let p23 = p[1] + p[2];
    let dp14 = dp[0] + dp[3];
    let dp23 = dp[1] + dp[2];
    // group each region against its merged pair so the q -> 0 limit, where
    // the two inner masses vanish linearly, stays finite
    let merged = [(p14, dp14), (p23, dp23), (p23, dp23), (p14, dp14)];
    let mut d = 0.0;
    for j in 0..4 {
        if dp[j] == 0.0 {
            continue;
        }
        let (pm, dpm) = merged[j];
        let ratio = if p[j] > 0.0 {
            p[j] / pm
        } else if dpm != 0.0 {
            dp[j] / dpm
        } else {
            continue;
        };
        d += dp[j] * ratio.log2();
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{crossover_probabilities, make_slc_gaussian};

    /// Independent double-loop MI oracle used across the test suite.
    pub fn mi_oracle(dmc: &Dmc) -> f64 {
        let py = dmc.output_distribution();
        let mut i = 0.0;
        for (x, row) in dmc.transitions.iter().enumerate() {
            for (y, &pyx) in row.iter().enumerate() {
                if pyx > 0.0 && dmc.prior[x] > 0.0 {
                    i += dmc.prior[x] * pyx * (pyx / py[y]).log2();
                }
            }
        }
        i
    }

    #[test]
    fn uniform_table_has_zero_mi() {
        let dmc = Dmc::uniform_prior(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(mutual_information(&dmc).abs() < 1e-15);
    }

    #[test]
    fn mi_matches_oracle_on_bsc() {
        // SLC at 4 dB, single read: eps = Q(10^0.2) = 0.056495...
        let eps = crate::util::qfunc(10f64.powf(0.2));
        assert!((eps - 0.056_495_301_749_361_65).abs() < 1e-12);
        let dmc = Dmc::uniform_prior(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]).unwrap();
        let mi = mutual_information(&dmc);
        // frozen from the binary-entropy oracle: 1 - h(eps)
        let h = -(eps * eps.log2() + (1.0 - eps) * (1.0 - eps).log2());
        assert!((mi - (1.0 - h)).abs() < 1e-12);
        assert!((mi - 0.686_627_470_517_513_7).abs() < 1e-12);
        assert!((mi - mi_oracle(&dmc)).abs() < 1e-14);
    }

    #[test]
    fn two_read_q0_collapses_to_bsc() {
        let model = make_slc_gaussian(4.0).unwrap();
        let dmc = crossover_probabilities(&model, &[-0.0, 0.0]).unwrap_err();
        // q = 0 produces duplicate thresholds, which are rejected; the
        // collapse is expressed with a single threshold at zero instead.
        let _ = dmc;
        let single = crossover_probabilities(&model, &[0.0]).unwrap();
        let eps = crate::util::qfunc(10f64.powf(0.2));
        assert!((single.transitions[0][1] - eps).abs() < 1e-12);
        assert!((mutual_information(&single) - 0.686_627_470_517_513_7).abs() < 1e-12);
    }

    #[test]
    fn three_read_endpoints_match_single_read() {
        let model = make_slc_gaussian(4.0).unwrap();
        let sigma = 10f64.powf(-0.2);
        let single = mutual_information(&crossover_probabilities(&model, &[0.0]).unwrap());
        let tiny = mutual_information(
            &crossover_probabilities(&model, &[-1e-12, 0.0, 1e-12]).unwrap(),
        );
        let wide = mutual_information(
            &crossover_probabilities(&model, &[-10.0 * sigma, 0.0, 10.0 * sigma]).unwrap(),
        );
        assert!((tiny - single).abs() < 1e-9);
        assert!((wide - single).abs() < 1e-6);
    }

    #[test]
    fn derivative_two_reads_matches_finite_difference() {
        let model = make_slc_gaussian(4.0).unwrap();
        for i in 1..40 {
            let q = i as f64 * 0.05;
            let h = 1e-6;
            let mi_at = |q: f64| {
                mutual_information(&crossover_probabilities(&model, &[-q, q]).unwrap())
            };
            let fd = (mi_at(q + h) - mi_at(q - h)) / (2.0 * h);
            let an = mi_derivative_two_reads(&model, q).unwrap();
            assert!((fd - an).abs() < 1e-6, "q={q}: fd={fd} analytic={an}");
        }
    }

    #[test]
    fn derivative_three_reads_matches_finite_difference() {
        let model = make_slc_gaussian(4.0).unwrap();
        for i in 1..40 {
            let q = i as f64 * 0.05;
            let h = 1e-6;
            let mi_at = |q: f64| {
                mutual_information(&crossover_probabilities(&model, &[-q, 0.0, q]).unwrap())
            };
            let fd = (mi_at(q + h) - mi_at(q - h)) / (2.0 * h);
            let an = mi_derivative_three_reads(&model, q).unwrap();
            assert!((fd - an).abs() < 1e-6, "q={q}: fd={fd} analytic={an}");
        }
    }

    #[test]
    fn derivative_at_zero_is_positive() {
        // dI/dq at q=0 equals -f(sqrt(Es)) log2(4 p1 (1-p1)) > 0 away from p1 = 1/2
        let model = make_slc_gaussian(4.0).unwrap();
        let d2 = mi_derivative_two_reads(&model, 0.0).unwrap();
        let sigma = 10f64.powf(-0.2);
        let p1 = 1.0 - crate::util::qfunc(1.0 / sigma);
        let expected = -(normal_pdf(1.0 / sigma) / sigma) * (4.0 * p1 * (1.0 - p1)).log2();
        assert!((d2 - expected).abs() < 1e-12);
        assert!(d2 > 0.0);
        let d3 = mi_derivative_three_reads(&model, 0.0).unwrap();
        assert!((d3 - expected).abs() < 1e-9);
    }

    #[test]
    fn mi_invariant_under_output_permutation_and_null_merge() {
        let dmc = Dmc::uniform_prior(vec![
            vec![0.7, 0.2, 0.1, 0.0],
            vec![0.1, 0.3, 0.6, 0.0],
        ])
        .unwrap();
        let base = mutual_information(&dmc);
        let permuted = Dmc::uniform_prior(vec![
            vec![0.1, 0.7, 0.0, 0.2],
            vec![0.6, 0.1, 0.0, 0.3],
        ])
        .unwrap();
        assert!((mutual_information(&permuted) - base).abs() < 1e-15);
        let merged = Dmc::uniform_prior(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]).unwrap();
        assert!((mutual_information(&merged) - base).abs() < 1e-15);
    }

    #[test]
    fn random_dmcs_within_bounds_and_match_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let m = if rng.gen_bool(0.5) { 2 } else { 4 };
            let k = rng.gen_range(2..9);
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    let mut r: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
                    let s: f64 = r.iter().sum();
                    r.iter_mut().for_each(|x| *x /= s);
                    // fix rounding so the row sums to exactly 1
                    let s2: f64 = r.iter().sum();
                    r[0] += 1.0 - s2;
                    r
                })
                .collect();
            let dmc = Dmc::uniform_prior(rows).unwrap();
            let mi = mutual_information(&dmc);
            assert!(mi >= 0.0 && mi <= (m as f64).log2() + 1e-12);
            assert!((mi - mi_oracle(&dmc)).abs() < 1e-12);
        }
    }

    #[test]
    fn gray_labeling_shape() {
        let g = BitLabeling::gray(4);
        assert_eq!(g.labels, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]);
        BitLabeling::new(g.labels.clone()).unwrap();
    }

    #[test]
    fn llr_symmetry_and_sign() {
        let model = make_slc_gaussian(4.0).unwrap();
        let dmc = crossover_probabilities(&model, &[-0.3, 0.3]).unwrap();
        let llrs = bit_llrs(&dmc, &BitLabeling::gray(2)).unwrap();
        // erasure output has zero LLR by symmetry
        assert!(llrs[0][1].abs() < 1e-12);
        // level 0 (bit 0) sits at -sqrt(Es); output region 0 favors bit 0
        assert!(llrs[0][0] > 0.0 && llrs[0][2] < 0.0);
        // "1-side" region: LLR = ln(p3/p1) for the bit-1 level ... check against
        // the channel's own crossovers
        let p1 = dmc.transitions[0][0];
        let p3 = dmc.transitions[0][2];
        assert!((llrs[0][0] - (p1 / p3).ln()).abs() < 1e-12);
    }

    #[test]
    fn llr_sign_agrees_with_ml_hard_decision() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| {
                    let mut r: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() + 1e-3).collect();
                    let s: f64 = r.iter().sum();
                    r.iter_mut().for_each(|x| *x /= s);
                    let s2: f64 = r.iter().sum();
                    r[0] += 1.0 - s2;
                    r
                })
                .collect();
            let dmc = Dmc::uniform_prior(rows).unwrap();
            let llrs = bit_llrs(&dmc, &BitLabeling::gray(2)).unwrap();
            for y in 0..4 {
                let ml_bit = if dmc.transitions[0][y] >= dmc.transitions[1][y] { 0 } else { 1 };
                if (dmc.transitions[0][y] - dmc.transitions[1][y]).abs() > 1e-12 {
                    assert_eq!(llrs[0][y] < 0.0, ml_bit == 1);
                }
            }
        }
    }
}
