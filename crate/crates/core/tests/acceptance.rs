//! Acceptance suite: twelve end-to-end criteria, one test each, printing a
//! single PASS/FAIL line per criterion (visible with --nocapture or on
//! failure). Quantitative expectations and tolerances are pinned in the
//! constants below; operating points for the Monte Carlo criteria were
//! calibrated once and are documented inline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use readmi::ldpc::{construct_peg_ace, scan_absorbing_sets, DegreeDistribution, LdpcCode};
use readmi::mi::{mi_derivative_three_reads, mi_derivative_two_reads};
use readmi::{
    bch_fer_analytic, crossover_probabilities, de_threshold_awgn, de_threshold_bsc,
    make_mlc_gaussian, make_slc_gaussian, mlc_sigma_for_snr, mutual_information,
    optimize_constant_ratio, optimize_single_q_mlc, optimize_symmetric_q, optimize_unconstrained,
    run_fer_with_code, ChannelModel, ChannelSpec, CodeRef, DeConfig, Dmc, QuantSpec, SimConfig,
    SimResult,
};
use std::sync::OnceLock;

const MLC_MEANS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];
const MLC_SNR_DB: f64 = 13.76;

fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    println!("ACCEPTANCE #{id:02} ({name}): {} - {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn mlc_anchor_model() -> ChannelModel {
    make_mlc_gaussian(MLC_MEANS, mlc_sigma_for_snr(MLC_MEANS, MLC_SNR_DB)).unwrap()
}

/// Rate-0.9021 code from built-in degree profile 2 at full length, shared by
/// the FER criteria; construction is deterministic and takes about a minute.
fn full_code() -> &'static LdpcCode {
    static CODE: OnceLock<LdpcCode> = OnceLock::new();
    CODE.get_or_init(|| {
        construct_peg_ace(&DegreeDistribution::builtin(2).unwrap(), 9117, 7, 4, 4).unwrap()
    })
}

fn full_code_ref() -> CodeRef {
    CodeRef::BuiltinPeg { profile: 2, n: 9117, seed: 7 }
}

// ---------------------------------------------------------------------------
// 1. Six-threshold MMI anchor on the 4-level Gaussian channel.

#[test]
fn criterion_01_mmi_anchor() {
    let scheme = optimize_unconstrained(&mlc_anchor_model(), 6, 1001).unwrap();
    let ok = (scheme.achieved_mi - 1.885).abs() <= 0.005;
    verdict(1, "mmi anchor", ok, &format!("unconstrained 6-threshold MI = {:.6} bits, expected 1.885 +- 0.005", scheme.achieved_mi));
}

// ---------------------------------------------------------------------------
// 2 + 3. Density evolution thresholds for the three built-in profiles.
//
// Reference values (pinned): full-precision sigma* and single-read epsilon*
// per profile. Independent cross-validation with a 400k-sample Monte Carlo
// density evolution supports the values this implementation computes
// (profile 1: sigma* ~ 0.505, eps* ~ 0.00893), which differ from the pinned
// references beyond tolerance on four of six entries; criterion 2 is
// expected to fail and is kept faithful to the pinned numbers.

const REF_SIGMA: [f64; 3] = [0.499, 0.483, 0.492];
const REF_EPS: [f64; 3] = [9.29e-3, 1.05e-2, 9.61e-3];
const TOL_SIGMA: f64 = 0.005;
const TOL_EPS: f64 = 3e-4;

struct DeTable {
    sigma: [f64; 3],
    eps: [f64; 3],
}

fn de_table() -> &'static DeTable {
    static TABLE: OnceLock<DeTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        // 2048 bins reproduces the 4096-bin thresholds to every digit the
        // bisection resolves, at a quarter of the cost
        let cfg = DeConfig { llr_range: 30.0, num_bins: 2048, max_de_iters: 5000, target_error: 1e-10 };
        let mut sigma = [0.0; 3];
        let mut eps = [0.0; 3];
        for (i, id) in (1u8..=3).enumerate() {
            let dd = DegreeDistribution::builtin(id).unwrap();
            sigma[i] = de_threshold_awgn(&dd, &cfg).unwrap().threshold;
            eps[i] = de_threshold_bsc(&dd, &cfg).unwrap().threshold;
        }
        DeTable { sigma, eps }
    })
}

#[test]
fn criterion_02_de_reference_thresholds() {
    let t = de_table();
    let mut detail = String::new();
    let mut ok = true;
    for i in 0..3 {
        let ds = t.sigma[i] - REF_SIGMA[i];
        let de = t.eps[i] - REF_EPS[i];
        ok &= ds.abs() <= TOL_SIGMA && de.abs() <= TOL_EPS;
        detail.push_str(&format!(
            "profile {}: sigma*={:.4} (ref {:.3}, d={:+.4}), eps*={:.5} (ref {:.5}, d={:+.5}); ",
            i + 1,
            t.sigma[i],
            REF_SIGMA[i],
            ds,
            t.eps[i],
            REF_EPS[i],
            de
        ));
    }
    verdict(2, "de reference thresholds", ok, &detail);
}

#[test]
fn criterion_03_de_tradeoff_ordering() {
    let t = de_table();
    // profile 2 tolerates the worst single-read channel but the best
    // full-precision channels belong to profiles 1 and 3
    let single_read = t.eps[1] > t.eps[0] && t.eps[1] > t.eps[2];
    let full_precision = t.sigma[2] > t.sigma[1];
    let ok = single_read && full_precision;
    verdict(3, "de trade-off ordering", ok, &format!("eps*={:?} (profile 2 largest: {single_read}), sigma*={:?} (profile 3 > profile 2: {full_precision})", t.eps, t.sigma));
}

// ---------------------------------------------------------------------------
// 4. Analytic dI/dq against central finite differences.

fn symmetric_mi(model: &ChannelModel, reads: u8, q: f64) -> f64 {
    let thresholds: Vec<f64> = if q == 0.0 {
        vec![0.0]
    } else if reads == 2 {
        vec![-q, q]
    } else {
        vec![-q, 0.0, q]
    };
    mutual_information(&crossover_probabilities(model, &thresholds).unwrap())
}

#[test]
fn criterion_04_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let snr_db = rng.gen_range(0.0..8.0);
        let model = make_slc_gaussian(snr_db).unwrap();
        let sigma = 10f64.powf(-snr_db / 20.0);
        let q = rng.gen_range(0.01..3.0 * sigma);
        let h = 1e-5;
        for reads in [2u8, 3] {
            let analytic = match reads {
                2 => mi_derivative_two_reads(&model, q).unwrap(),
                _ => mi_derivative_three_reads(&model, q).unwrap(),
            };
            let fd = (symmetric_mi(&model, reads, q + h) - symmetric_mi(&model, reads, q - h)) / (2.0 * h);
            worst = worst.max((analytic - fd).abs());
        }
    }
    // at q = 0 the derivative must be strictly positive for any finite SNR
    let mut min_at_zero = f64::INFINITY;
    for &snr in &[0.5, 2.0, 4.0, 7.0] {
        let model = make_slc_gaussian(snr).unwrap();
        min_at_zero = min_at_zero.min(mi_derivative_two_reads(&model, 0.0).unwrap());
        min_at_zero = min_at_zero.min(mi_derivative_three_reads(&model, 0.0).unwrap());
    }
    let ok = worst <= 1e-6 && min_at_zero > 0.0;
    verdict(4, "analytic derivative", ok, &format!("max |analytic - central difference| = {worst:.2e} (tol 1e-6); min dI/dq at q=0 = {min_at_zero:.3e} (> 0)"));
}

// ---------------------------------------------------------------------------
// 5. Three-read endpoint equality with the single-read BSC.

#[test]
fn criterion_05_three_read_endpoints() {
    let mut worst: f64 = 0.0;
    for &snr in &[2.0, 4.0, 6.0] {
        let model = make_slc_gaussian(snr).unwrap();
        let sigma = 10f64.powf(-snr / 20.0);
        let bsc = symmetric_mi(&model, 2, 0.0);
        let wide = symmetric_mi(&model, 3, 10.0 * sigma);
        worst = worst.max((wide - bsc).abs());
    }
    let ok = worst <= 1e-6;
    verdict(5, "3-read endpoint equality", ok, &format!("max |MI(q=10 sigma) - MI(q=0)| = {worst:.2e} bits (tol 1e-6)"));
}

// ---------------------------------------------------------------------------
// 6. Read-count monotonicity and the half-gap property.

#[test]
fn criterion_06_read_count_monotonicity() {
    let mut detail = String::new();
    let mut ok = true;
    for &eps in &[1e-3, 1e-2, 5e-2, 1e-1] {
        let snr_db = 20.0 * readmi::util::qfunc_inv(eps).log10();
        let model = make_slc_gaussian(snr_db).unwrap();
        let sigma = 10f64.powf(-snr_db / 20.0);
        let mi1 = symmetric_mi(&model, 2, 0.0);
        let mi2 = optimize_symmetric_q(&model, 2).unwrap().achieved_mi;
        let mi3 = optimize_symmetric_q(&model, 3).unwrap().achieved_mi;
        // full-precision proxy: 63 uniform thresholds across the support
        let span = 1.0 + 6.0 * sigma;
        let full_thresholds: Vec<f64> =
            (1..=63).map(|i| -span + 2.0 * span * i as f64 / 64.0).collect();
        let mi_full =
            mutual_information(&crossover_probabilities(&model, &full_thresholds).unwrap());
        let half_gap = (mi2 - mi1) / (mi_full - mi1);
        let point_ok = mi1 < mi2 && mi2 < mi3 && mi3 < mi_full && half_gap >= 0.4;
        ok &= point_ok;
        detail.push_str(&format!("ber {eps:.0e}: MI = {mi1:.4} < {mi2:.4} < {mi3:.4} < {mi_full:.4}, gap closed {half_gap:.2}; "));
    }
    verdict(6, "read-count monotonicity + half-gap", ok, &detail);
}

// ---------------------------------------------------------------------------
// 7. Constrained strategies are near-optimal at the anchor SNR.

#[test]
fn criterion_07_constraint_near_optimality() {
    let model = mlc_anchor_model();
    let unconstrained = optimize_unconstrained(&model, 6, 1001).unwrap().achieved_mi;
    let single_q = optimize_single_q_mlc(&model).unwrap().achieved_mi;
    let r_grid: Vec<f64> = (0..43).map(|i| 1.5 + 0.25 * i as f64).collect();
    let cr = optimize_constant_ratio(&model, &r_grid).unwrap();
    let ok = (unconstrained - single_q) <= 0.005 && (unconstrained - cr.achieved_mi) <= 0.005;
    verdict(7, "constraint near-optimality", ok, &format!("unconstrained {unconstrained:.6}, single-q {single_q:.6} (gap {:.2e}), best-R CR {:.6} (gap {:.2e})", unconstrained - single_q, cr.achieved_mi, unconstrained - cr.achieved_mi));
}

// ---------------------------------------------------------------------------
// 8 + 9. Full-length SLC FER ordering across read counts, and the BCH
// comparison at the same operating point.
//
// Operating point (calibrated): SNR 7.7 dB, hard-read channel BER 7.62e-3,
// where the single-read FER is ~1.2e-2. The 2- and 3-read FERs at this point
// sit far below 1e-4 (0 errors in 6000 calibration frames), so accumulating
// 100 frame errors for them exceeds the runtime budget by orders of
// magnitude; those clauses fail honestly below with a bounded frame budget.

const SLC_OP_SNR_DB: f64 = 7.7;

fn slc_sim(quant: QuantSpec, max_frames: u64, target: u64) -> SimConfig {
    SimConfig {
        channel: ChannelSpec::GaussianSlc { snr_db: SLC_OP_SNR_DB },
        quant,
        code: full_code_ref(),
        max_frames,
        target_frame_errors: target,
        seed: 21,
        workers: 0,
        max_bp_iters: 50,
    }
}

fn one_read_fer() -> &'static SimResult {
    static RES: OnceLock<SimResult> = OnceLock::new();
    RES.get_or_init(|| run_fer_with_code(&slc_sim(QuantSpec::Hard, 12_000, 100), full_code()).unwrap())
}

#[test]
fn criterion_08_fer_ordering_slc() {
    let r1 = one_read_fer();
    let r2 = run_fer_with_code(
        &slc_sim(QuantSpec::MmiSymmetricQ { reads: 2 }, 20_000, 100),
        full_code(),
    )
    .unwrap();
    let r3 = run_fer_with_code(
        &slc_sim(QuantSpec::MmiSymmetricQ { reads: 3 }, 20_000, 100),
        full_code(),
    )
    .unwrap();
    let ordering = r2.fer < r1.fer / 3.0 && r3.fer < r2.fer;
    let counts = r1.frame_errors >= 100 && r2.frame_errors >= 100 && r3.frame_errors >= 100;
    let ok = ordering && counts;
    verdict(8, "slc fer ordering", ok, &format!(
        "channel ber {:.4e}: 1-read fer {:.3e} ({} errs/{} frames), 2-read fer {:.3e} ({} errs/{}), 3-read fer {:.3e} ({} errs/{}); ordering {ordering}, >=100 errors each {counts}",
        r1.channel_ber, r1.fer, r1.frame_errors, r1.frames, r2.fer, r2.frame_errors, r2.frames, r3.fer, r3.frame_errors, r3.frames
    ));
}

#[test]
fn criterion_09_ldpc_beats_bch() {
    let r1 = one_read_fer();
    let bch = bch_fer_analytic(readmi::BCH_N, readmi::BCH_T, r1.channel_ber).unwrap();
    let ok = r1.fer < bch;
    verdict(9, "ldpc beats bch single-read", ok, &format!("at channel ber {:.4e}: ldpc 1-read fer {:.3e} < bch(t=64) analytic fer {:.3e}", r1.channel_ber, r1.fer, bch));
}

// ---------------------------------------------------------------------------
// 10. The MI-maximizing constant ratio also minimizes FER on the 4-level
// channel (calibrated: at 13.6 dB the R=7 FER is ~1.2e-3).

const MLC_OP_SNR_DB: f64 = 13.6;

#[test]
fn criterion_10_mmi_minimizes_fer() {
    let model = make_mlc_gaussian(MLC_MEANS, mlc_sigma_for_snr(MLC_MEANS, MLC_OP_SNR_DB)).unwrap();
    let r_grid: Vec<f64> = (0..43).map(|i| 1.5 + 0.25 * i as f64).collect();
    let best = optimize_constant_ratio(&model, &r_grid).unwrap();
    let r_star = match best.strategy {
        readmi::Strategy::ConstantRatio { r } => r,
        ref s => panic!("unexpected strategy {s:?}"),
    };
    let sim = |r: f64| {
        let cfg = SimConfig {
            channel: ChannelSpec::GaussianMlc {
                means: MLC_MEANS,
                sigma: None,
                snr_db: Some(MLC_OP_SNR_DB),
            },
            quant: QuantSpec::ConstantRatio { r },
            code: full_code_ref(),
            max_frames: 12_000,
            target_frame_errors: 100,
            seed: 33,
            workers: 0,
            max_bp_iters: 50,
        };
        run_fer_with_code(&cfg, full_code()).unwrap()
    };
    let reference = sim(7.0);
    let star = sim(r_star);
    let others: Vec<SimResult> = [2.0, 15.0, 25.0].iter().map(|&r| sim(r)).collect();
    let op_point_ok = reference.fer >= 2e-4 && reference.fer <= 5e-3;
    let star_best = others.iter().all(|o| star.fer <= o.fer);
    let worst = others.iter().cloned().fold(star.clone(), |a, b| if b.fer > a.fer { b } else { a });
    let separated = star.ci_high < worst.ci_low;
    let ok = op_point_ok && star_best && separated;
    verdict(10, "mmi ratio minimizes fer", ok, &format!(
        "R*={r_star:.3}: fer {:.3e} [{:.1e}, {:.1e}] ({} errs/{}); R=7 fer {:.3e}; R=2/15/25 fer {:.3e}/{:.3e}/{:.3e}; R* best {star_best}, CI-separated from worst {separated}, operating point ok {op_point_ok}",
        star.fer, star.ci_low, star.ci_high, star.frame_errors, star.frames, reference.fer, others[0].fer, others[1].fer, others[2].fer
    ));
}

// ---------------------------------------------------------------------------
// 11. Absorbing-set scan: planted gadget found, none in the profile-2 code.

#[test]
fn criterion_11_absorbing_sets() {
    // four degree-3 variables, five pairwise (satisfied) checks, two
    // dangling (unsatisfied) checks: the canonical (4,2) structure
    let rows = vec![
        vec![0, 1],
        vec![0, 2],
        vec![1, 3],
        vec![2, 3],
        vec![1, 2],
        vec![0],
        vec![3],
    ];
    let gadget = LdpcCode::from_rows(4, rows, None).unwrap();
    let planted = scan_absorbing_sets(&gadget, 4, 2);
    let found_planted = planted.count(4, 2) == 1
        && planted.sets.iter().any(|s| s.variables == vec![0, 1, 2, 3]);

    let report = scan_absorbing_sets(full_code(), 5, 2);
    let bad = report.count(4, 2) + report.count(5, 1) + report.count(5, 2);
    let ok = found_planted && bad == 0;
    verdict(11, "absorbing sets", ok, &format!("planted (4,2) found: {found_planted}; (4,2)/(5,1)/(5,2) sets among low-degree variables of the profile-2 code: {bad} ({} absorbing sets of any size a<=5, b<=2 found)", report.sets.len()));
}

// ---------------------------------------------------------------------------
// 12. Oracle equivalence on small instances.

fn mi_direct(dmc: &Dmc) -> f64 {
    // direct double loop: I = sum_{x,y} pi(x) P(y|x) log2( P(y|x) / P(y) )
    let ny = dmc.transitions[0].len();
    let mut py = vec![0.0; ny];
    for (x, row) in dmc.transitions.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            py[y] += dmc.prior[x] * p;
        }
    }
    let mut i = 0.0;
    for (x, row) in dmc.transitions.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 && py[y] > 0.0 {
                i += dmc.prior[x] * p * (p / py[y]).log2();
            }
        }
    }
    i
}

#[test]
fn criterion_12_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let nx = rng.gen_range(2..=5);
        let ny = rng.gen_range(2..=8);
        let mut transitions = Vec::with_capacity(nx);
        for _ in 0..nx {
            let mut row: Vec<f64> = (0..ny).map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
            transitions.push(row);
        }
        let mut prior: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= s);
        let dmc = Dmc { transitions, prior };
        worst = worst.max((mutual_information(&dmc) - mi_direct(&dmc)).abs());
    }
    let mi_ok = worst <= 1e-12;

    // BP vs. exact bitwise MAP on a 32-codeword toy code over a BSC; the
    // (3,4)-regular n=20 construction has girth 6 and minimum distance 6,
    // so single-error inputs have unambiguous marginals
    let dd = DegreeDistribution::new(vec![(3, 1.0)], vec![(4, 1.0)]).unwrap();
    let code = construct_peg_ace(&dd, 20, 0, 4, 4).unwrap();
    assert_eq!(code.k(), 5);
    let codewords: Vec<Vec<u8>> = (0..32u16)
        .map(|m| {
            let msg: Vec<u8> = (0..5).map(|b| ((m >> b) & 1) as u8).collect();
            code.encode(&msg).unwrap()
        })
        .collect();
    let eps = 0.05f64;
    let llr0 = ((1.0 - eps) / eps).ln();
    let map_decode = |received: &[u8]| -> Vec<u8> {
        let mut marg = vec![[0.0f64; 2]; code.n];
        for cw in &codewords {
            let d = cw.iter().zip(received).filter(|(a, b)| a != b).count() as f64;
            let w = eps.powf(d) * (1.0 - eps).powf(code.n as f64 - d);
            for (i, &bit) in cw.iter().enumerate() {
                marg[i][bit as usize] += w;
            }
        }
        marg.iter().map(|m| u8::from(m[1] > m[0])).collect()
    };
    let mut bp_ok = true;
    let mut cases = 0u32;
    let mut decoder = readmi::ldpc::Decoder::new(&code);
    for clean in &codewords {
        let mut inputs = vec![clean.clone()];
        for j in 0..code.n {
            let mut flipped = clean.clone();
            flipped[j] ^= 1;
            inputs.push(flipped);
        }
        for received in &inputs {
            let llrs: Vec<f64> =
                received.iter().map(|&b| if b == 0 { llr0 } else { -llr0 }).collect();
            let bp = decoder.decode(&llrs, 50);
            cases += 1;
            if bp.bits != map_decode(received) {
                bp_ok = false;
            }
        }
    }
    let ok = mi_ok && bp_ok;
    verdict(12, "oracle equivalence", ok, &format!("max MI deviation over 1000 random channels {worst:.2e} (tol 1e-12); BP matches exact bitwise MAP on all {cases} noiseless + single-error inputs: {bp_ok}"));
}
