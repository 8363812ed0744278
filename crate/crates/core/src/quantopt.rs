//! Word-line threshold optimizers: analytic bisection for the symmetric
//! two-level 2/3-read cases, single-q and constant-ratio constrained
//! searches, and an unconstrained coarse-grid search with coordinate-wise
//! golden-section refinement.

use crate::channel::{crossover_probabilities, hard_thresholds, ChannelModel};
use crate::error::{Error, Result};
use crate::mi::{mi_derivative_three_reads, mi_derivative_two_reads, mutual_information};
use crate::util::golden_section_max;
use serde::{Deserialize, Serialize};

const GOLDEN_TOL: f64 = 1e-10;
const DERIV_TOL: f64 = 1e-9;

/// How a threshold set was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    Hard,
    SymmetricQ { reads: u8, q: f64 },
    SingleQ { q: f64 },
    ConstantRatio { r: f64 },
    Unconstrained { grid_step: f64 },
}

/// Ordered word-line thresholds plus the strategy that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantizationScheme {
    pub thresholds: Vec<f64>,
    pub strategy: Strategy,
    pub achieved_mi: f64,
}

impl QuantizationScheme {
    fn new(model: &ChannelModel, thresholds: Vec<f64>, strategy: Strategy) -> Result<Self> {
        let mi = mutual_information(&crossover_probabilities(model, &thresholds)?);
        Ok(QuantizationScheme { thresholds, strategy, achieved_mi: mi })
    }
}

fn mi_at(model: &ChannelModel, thresholds: &[f64]) -> f64 {
    crossover_probabilities(model, thresholds)
        .map(|d| mutual_information(&d))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Hard-decision scheme: the natural density-crossing thresholds.
pub fn hard_scheme(model: &ChannelModel) -> Result<QuantizationScheme> {
    QuantizationScheme::new(model, hard_thresholds(model)?, Strategy::Hard)
}

/// Optimal symmetric q for a two-level Gaussian model with 2 or 3 reads,
/// found by bisection on the analytic derivative.
pub fn optimize_symmetric_q(model: &ChannelModel, reads: u8) -> Result<QuantizationScheme> {
    let deriv: fn(&ChannelModel, f64) -> Result<f64> = match reads {
        2 => mi_derivative_two_reads,
        3 => mi_derivative_three_reads,
        _ => return Err(Error::InvalidConfig("symmetric-q supports 2 or 3 reads".into())),
    };
    let (_, sigmas) = model
        .gaussian_params()
        .ok_or_else(|| Error::InvalidModel("symmetric-q needs a Gaussian model".into()))?;
    let sigma = sigmas[0];
    // double until the derivative goes non-positive; deep in the noiseless
    // limit the densities underflow and the derivative is exactly zero
    let mut q_hi = 0.25 * sigma;
    loop {
        if deriv(model, q_hi)? <= 0.0 {
            break;
        }
        q_hi *= 2.0;
        if q_hi > 20.0 * sigma {
            return Err(Error::NoSignChange(q_hi));
        }
    }
    let mut lo = 0.0;
    let mut hi = q_hi;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let d = deriv(model, mid)?;
        if d.abs() < DERIV_TOL {
            break;
        }
        if d > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = mid;
    let thresholds = if reads == 2 { vec![-q, q] } else { vec![-q, 0.0, q] };
    QuantizationScheme::new(model, thresholds, Strategy::SymmetricQ { reads, q })
}

fn single_q_thresholds(hard: &[f64], q: f64) -> Vec<f64> {
    let mut t: Vec<f64> = hard.iter().flat_map(|&h| [h - q, h + q]).collect();
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t
}

/// Six thresholds at the hard-decision points +-q, with q chosen by
/// golden-section search over `[0, min-gap/2]`.
pub fn optimize_single_q_mlc(model: &ChannelModel) -> Result<QuantizationScheme> {
    let hard = hard_thresholds(model)?;
    let means = model.means();
    let min_gap = means.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let q_max = 0.5 * min_gap;
    let (q, _) = golden_section_max(
        |q| mi_at(model, &single_q_thresholds(&hard, q)),
        0.0,
        q_max * (1.0 - 1e-9),
        GOLDEN_TOL,
    );
    QuantizationScheme::new(model, single_q_thresholds(&hard, q), Strategy::SingleQ { q })
}

/// For each hard threshold, the two flanking voltages where the adjacent
/// prior-weighted level densities have ratio exactly `R`. `R = 1` returns
/// the hard thresholds themselves.
pub fn thresholds_from_ratio(model: &ChannelModel, r: f64) -> Result<Vec<f64>> {
    if !(r >= 1.0) {
        return Err(Error::InvalidConfig(format!("constant ratio R = {r} must be >= 1")));
    }
    let hard = hard_thresholds(model)?;
    if r == 1.0 {
        return Ok(hard);
    }
    let means = model.means();
    let mut out = Vec::with_capacity(2 * hard.len());
    for (i, &h) in hard.iter().enumerate() {
        // prior-weighted density ratio of the dominant level over the other
        let ratio = |v: f64, dom: usize, other: usize| {
            let num = model.prior[dom] * model.levels[dom].pdf(v);
            let den = model.prior[other] * model.levels[other].pdf(v);
            if den == 0.0 {
                f64::INFINITY
            } else {
                num / den
            }
        };
        // left flank: level i dominates; ratio grows from 1 at h toward mean i
        for (dom, other, near, far) in [(i, i + 1, h, means[i]), (i + 1, i, h, means[i + 1])] {
            if ratio(far, dom, other) < r {
                return Err(Error::RatioUnreachable { r, hard: h });
            }
            let (mut lo, mut hi) = (near, far);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if ratio(mid, dom, other) < r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::RatioUnreachable { r, hard: hard[0] });
    }
    Ok(out)
}

/// Evaluates MI over an ascending R grid, then golden-section refines
/// around the grid maximum.
pub fn optimize_constant_ratio(model: &ChannelModel, r_grid: &[f64]) -> Result<QuantizationScheme> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[0] >= w[1]) || r_grid[0] < 1.0 {
        return Err(Error::InvalidConfig("R grid must be ascending with entries >= 1".into()));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &r) in r_grid.iter().enumerate() {
        let mi = mi_at(model, &thresholds_from_ratio(model, r)?);
        if mi > best.1 {
            best = (i, mi);
        }
    }
    let lo = if best.0 == 0 { r_grid[0] } else { r_grid[best.0 - 1] };
    let hi = if best.0 + 1 == r_grid.len() { r_grid[best.0] } else { r_grid[best.0 + 1] };
    let (r, _) = golden_section_max(
        |r| thresholds_from_ratio(model, r).map(|t| mi_at(model, &t)).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        GOLDEN_TOL,
    );
    let mut candidates = vec![(r_grid[best.0], best.1)];
    let refined_mi = thresholds_from_ratio(model, r).map(|t| mi_at(model, &t))?;
    candidates.push((r, refined_mi));
    let (r, _) = candidates
        .into_iter()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    QuantizationScheme::new(model, thresholds_from_ratio(model, r)?, Strategy::ConstantRatio { r })
}

/// Visits every ascending index combination of size `k` from `0..n`.
fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let remaining = k - cur.len();
        for i in start..=n - remaining {
            cur.push(i);
            rec(n, k, i + 1, cur, f);
            cur.pop();
        }
    }
    if k == 0 {
        f(&[]);
        return;
    }
    if n < k {
        return;
    }
    rec(n, k, 0, &mut Vec::with_capacity(k), f);
}

/// Unconstrained optimizer: coarse ascending-tuple grid search
/// (symmetry-reduced when the model is symmetric) followed by cyclic
/// coordinate-wise golden-section refinement.
///
/// MI is not necessarily quasi-concave in the joint thresholds, so the
/// result is a refined grid optimum, not a certified global one; the grid
/// step is reported in the strategy tag.
pub fn optimize_unconstrained(
    model: &ChannelModel,
    num_thresholds: usize,
    grid_points: usize,
) -> Result<QuantizationScheme> {
    if num_thresholds == 0 {
        return Err(Error::InvalidConfig("need at least one threshold".into()));
    }
    if grid_points < 3 {
        return Err(Error::GridTooCoarse(grid_points));
    }
    let means = model.means();
    let span = (means[0], *means.last().unwrap());
    let grid_step = (span.1 - span.0) / (grid_points - 1) as f64;
    let grid: Vec<f64> =
        (0..grid_points).map(|i| span.0 + grid_step * i as f64).collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let consider = |thr: &[f64], best: &mut Option<(f64, Vec<f64>)>| {
        let mi = mi_at(model, thr);
        let better = match best {
            None => true,
            // deterministic tie-break toward the lexicographically smallest tuple
            Some((bmi, bthr)) => {
                mi > *bmi + 1e-15 || ((mi - *bmi).abs() <= 1e-15 && thr < bthr.as_slice())
            }
        };
        if better {
            *best = Some((mi, thr.to_vec()));
        }
    };

    if model.is_symmetric_gaussian() {
        // search the symmetric subspace: thresholds mirrored about the center
        let c = model.symmetry_center();
        let half = num_thresholds / 2;
        let positive: Vec<f64> = grid.iter().copied().filter(|&g| g > c + 1e-12).collect();
        if positive.len() < half {
            return Err(Error::GridTooCoarse(grid_points));
        }
        for_each_combination(positive.len(), half, &mut |idx| {
            let mut thr: Vec<f64> = Vec::with_capacity(num_thresholds);
            for &i in idx.iter().rev() {
                thr.push(2.0 * c - positive[i]);
            }
            if num_thresholds % 2 == 1 {
                thr.push(c);
            }
            for &i in idx {
                thr.push(positive[i]);
            }
            consider(&thr, &mut best);
        });
    } else {
        if grid.len() < num_thresholds {
            return Err(Error::GridTooCoarse(grid_points));
        }
        for_each_combination(grid.len(), num_thresholds, &mut |idx| {
            let thr: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
            consider(&thr, &mut best);
        });
    }

    let (_, mut thr) = best.ok_or(Error::GridTooCoarse(grid_points))?;
    // cyclic coordinate-wise golden-section refinement; symmetric models keep
    // the mirror constraint so coordinate descent cannot stall off-axis
    let margin = 2.0 * grid_step.max(1e-3);
    if model.is_symmetric_gaussian() {
        let c = model.symmetry_center();
        let half = num_thresholds / 2;
        let offset = num_thresholds - half;
        let rebuild = |pos: &[f64]| {
            let mut t: Vec<f64> = pos.iter().rev().map(|&p| 2.0 * c - p).collect();
            if num_thresholds % 2 == 1 {
                t.push(c);
            }
            t.extend_from_slice(pos);
            t
        };
        let mut pos: Vec<f64> = thr[offset..].to_vec();
        let mut prev_mi = mi_at(model, &thr);
        for _ in 0..300 {
            for i in 0..pos.len() {
                let lo = if i == 0 { c + 1e-9 } else { pos[i - 1] + 1e-12 };
                let hi = if i + 1 == pos.len() { span.1 + margin } else { pos[i + 1] - 1e-12 };
                let (x, _) = golden_section_max(
                    |x| {
                        let mut p = pos.clone();
                        p[i] = x;
                        mi_at(model, &rebuild(&p))
                    },
                    lo,
                    hi,
                    GOLDEN_TOL,
                );
                pos[i] = x;
            }
            thr = rebuild(&pos);
            let mi = mi_at(model, &thr);
            if mi - prev_mi < 1e-12 {
                break;
            }
            prev_mi = mi;
        }
    } else {
        let mut prev_mi = mi_at(model, &thr);
        for _ in 0..300 {
            for i in 0..thr.len() {
                let lo = if i == 0 { span.0 - margin } else { thr[i - 1] + 1e-12 };
                let hi = if i + 1 == thr.len() { span.1 + margin } else { thr[i + 1] - 1e-12 };
                let (x, _) = golden_section_max(
                    |x| {
                        let mut t = thr.clone();
                        t[i] = x;
                        mi_at(model, &t)
                    },
                    lo,
                    hi,
                    GOLDEN_TOL,
                );
                thr[i] = x;
            }
            let mi = mi_at(model, &thr);
            if mi - prev_mi < 1e-12 {
                break;
            }
            prev_mi = mi;
        }
    }
    QuantizationScheme::new(model, thr, Strategy::Unconstrained { grid_step })
}
