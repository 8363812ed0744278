//! Check-serial (layered) sum-product decoding.

use crate::ldpc::code::LdpcCode;
use crate::mi::LLR_MAX;

#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub converged: bool,
    pub iterations: u32,
}

/// Per-decode workspace; reuse across frames to avoid reallocation.
pub struct Decoder<'a> {
    code: &'a LdpcCode,
    /// edge messages check->variable, laid out row by row
    msg: Vec<f64>,
    row_offset: Vec<usize>,
    posterior: Vec<f64>,
    scratch_t: Vec<f64>,
    scratch_th: Vec<f64>,
}

const TANH_CLAMP: f64 = 1.0 - 1e-15;

impl<'a> Decoder<'a> {
    pub fn new(code: &'a LdpcCode) -> Self {
        let mut row_offset = Vec::with_capacity(code.m + 1);
        let mut acc = 0usize;
        row_offset.push(0);
        for row in &code.rows {
            acc += row.len();
            row_offset.push(acc);
        }
        let max_row = code.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        Decoder {
            code,
            msg: vec![0.0; acc],
            row_offset,
            posterior: vec![0.0; code.n],
            scratch_t: vec![0.0; max_row],
            scratch_th: vec![0.0; max_row + 1],
        }
    }

    /// Serial-schedule sum-product: checks are updated one at a time and the
    /// posterior is refreshed immediately, so later checks in the same sweep
    /// see the newest messages. Hard decision and syndrome test after each
    /// full sweep; stops the moment the syndrome clears.
    pub fn decode(&mut self, channel_llrs: &[f64], max_iter: u32) -> DecodeResult {
        assert_eq!(channel_llrs.len(), self.code.n, "LLR vector length mismatch");
        self.posterior.copy_from_slice(channel_llrs);
        self.msg.fill(0.0);
        let mut bits = vec![0u8; self.code.n];
        for iter in 1..=max_iter {
            for c in 0..self.code.m {
                self.update_check(c);
            }
            let mut undecided = false;
            for (b, &l) in bits.iter_mut().zip(&self.posterior) {
                *b = (l < 0.0) as u8;
                undecided |= l == 0.0;
            }
            // an exactly-zero posterior is an erasure, not a decision; the
            // all-zero-LLR symmetric fixed point must not claim convergence
            if !undecided && self.code.syndrome_ok(&bits) {
                return DecodeResult { bits, converged: true, iterations: iter };
            }
        }
        DecodeResult { bits, converged: false, iterations: max_iter }
    }

    fn update_check(&mut self, c: usize) {
        let row = &self.code.rows[c];
        let deg = row.len();
        let base = self.row_offset[c];
        // extrinsic inputs t_i and their tanh halves
        for (i, &v) in row.iter().enumerate() {
            let t = self.posterior[v as usize] - self.msg[base + i];
            self.scratch_t[i] = t;
            self.scratch_th[i] = (0.5 * t).tanh().clamp(-TANH_CLAMP, TANH_CLAMP);
        }
        // suffix products in scratch_th[deg] downward, prefix on the fly
        let mut suffix = 1.0;
        self.scratch_th[deg] = 1.0;
        for i in (0..deg).rev() {
            let th = self.scratch_th[i];
            self.scratch_th[i] = suffix;
            suffix *= th;
        }
        // scratch_th[i] now holds the product of tanh halves over j > i
        let mut prefix = 1.0;
        for (i, &v) in row.iter().enumerate() {
            let t = self.scratch_t[i];
            let others = prefix * self.scratch_th[i];
            let new_msg = (2.0 * others.atanh()).clamp(-LLR_MAX, LLR_MAX);
            self.msg[base + i] = new_msg;
            self.posterior[v as usize] = t + new_msg;
            prefix *= (0.5 * t).tanh().clamp(-TANH_CLAMP, TANH_CLAMP);
        }
    }
}

/// One-shot convenience wrapper around [`Decoder`].
pub fn decode_bp(code: &LdpcCode, channel_llrs: &[f64], max_iter: u32) -> DecodeResult {
    Decoder::new(code).decode(channel_llrs, max_iter)
}
