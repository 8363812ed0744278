//! Parity-check matrix container, PEG/ACE construction, and GF(2)
//! systematic encoding.

use crate::error::{Error, Result};
use crate::ldpc::degree::DegreeDistribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Construction metadata persisted alongside the matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeMetadata {
    pub dd: DegreeDistribution,
    pub seed: u64,
    pub d_ace: usize,
    pub eta_ace: usize,
    pub girth: usize,
    pub girth_histogram: Vec<(usize, usize)>,
}

/// Sparse parity-check matrix with encoder preprocessing.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    pub n: usize,
    pub m: usize,
    /// check -> ascending variable indices
    pub rows: Vec<Vec<u32>>,
    /// variable -> ascending check indices
    pub cols: Vec<Vec<u32>>,
    pub metadata: Option<CodeMetadata>,
    encoder: Encoder,
}

/// Reduced-row-echelon preprocessing: pivot (parity) columns and, per pivot,
/// the dependence mask over the free (systematic) columns.
#[derive(Debug, Clone)]
struct Encoder {
    pivot_cols: Vec<u32>,
    free_cols: Vec<u32>,
    /// one mask per pivot row, `free_cols.len()` bits each
    masks: Vec<Vec<u64>>,
}

fn bit(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i >> 6] ^= 1 << (i & 63);
}

impl Encoder {
    fn build(n: usize, rows: &[Vec<u32>]) -> Encoder {
        let words = n.div_ceil(64);
        let mut h: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                let mut w = vec![0u64; words];
                for &v in r {
                    set_bit(&mut w, v as usize);
                }
                w
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0usize;
        for col in 0..n {
            let Some(p) = (rank..h.len()).find(|&r| bit(&h[r], col)) else { continue };
            h.swap(rank, p);
            let pivot_row = h[rank].clone();
            for (r, row) in h.iter_mut().enumerate() {
                if r != rank && bit(row, col) {
                    for (w, pw) in row.iter_mut().zip(&pivot_row) {
                        *w ^= pw;
                    }
                }
            }
            pivot_cols.push(col as u32);
            rank += 1;
            if rank == h.len() {
                break;
            }
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivot_cols {
            is_pivot[c as usize] = true;
        }
        let free_cols: Vec<u32> = (0..n as u32).filter(|&c| !is_pivot[c as usize]).collect();
        let fw = free_cols.len().div_ceil(64).max(1);
        let masks: Vec<Vec<u64>> = h[..rank]
            .iter()
            .map(|row| {
                let mut mask = vec![0u64; fw];
                for (j, &c) in free_cols.iter().enumerate() {
                    if bit(row, c as usize) {
                        set_bit(&mut mask, j);
                    }
                }
                mask
            })
            .collect();
        Encoder { pivot_cols, free_cols, masks }
    }
}

impl LdpcCode {
    pub fn from_rows(n: usize, rows: Vec<Vec<u32>>, metadata: Option<CodeMetadata>) -> Result<Self> {
        let m = rows.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig("empty parity-check matrix".into()));
        }
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (c, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig("row entries must be strictly ascending".into()));
            }
            for &v in row {
                if v as usize >= n {
                    return Err(Error::InvalidConfig(format!("column index {v} out of range")));
                }
                cols[v as usize].push(c as u32);
            }
        }
        let encoder = Encoder::build(n, &rows);
        Ok(LdpcCode { n, m, rows, cols, metadata, encoder })
    }

    /// Message length: number of systematic (free) columns.
    pub fn k(&self) -> usize {
        self.encoder.free_cols.len()
    }

    pub fn rank(&self) -> usize {
        self.encoder.pivot_cols.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    /// Systematic bit positions (the message is copied here verbatim).
    pub fn message_positions(&self) -> &[u32] {
        &self.encoder.free_cols
    }

    /// Encodes `message` (k bits, one byte per bit) to an n-bit codeword.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        let k = self.k();
        if message.len() != k {
            return Err(Error::MessageLength { expected: k, got: message.len() });
        }
        let fw = k.div_ceil(64).max(1);
        let mut msg_words = vec![0u64; fw];
        for (j, &b) in message.iter().enumerate() {
            if b & 1 == 1 {
                set_bit(&mut msg_words, j);
            }
        }
        let mut cw = vec![0u8; self.n];
        for (j, &c) in self.encoder.free_cols.iter().enumerate() {
            cw[c as usize] = message[j] & 1;
        }
        for (r, &c) in self.encoder.pivot_cols.iter().enumerate() {
            let parity = self.encoder.masks[r]
                .iter()
                .zip(&msg_words)
                .fold(0u64, |acc, (a, b)| acc ^ (a & b))
                .count_ones()
                & 1;
            cw[c as usize] = parity as u8;
        }
        debug_assert!(self.syndrome_ok(&cw));
        Ok(cw)
    }

    /// True iff H·c = 0 over GF(2).
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &v| acc ^ (bits[v as usize] & 1)) == 0)
    }

    /// Length of the shortest cycle through any variable node, found by BFS
    /// from every variable node. `None` if the graph is a forest.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.n {
            if let Some(g) = self.shortest_cycle_through(v) {
                best = Some(best.map_or(g, |b| b.min(g)));
            }
        }
        best
    }

    fn shortest_cycle_through(&self, root: usize) -> Option<usize> {
        // BFS over the bipartite graph remembering the arrival edge; a
        // revisit through a different edge closes a cycle through the root
        let mut dist_v = vec![u32::MAX; self.n];
        let mut dist_c = vec![u32::MAX; self.m];
        dist_v[root] = 0;
        let mut frontier_v = vec![root as u32];
        let mut frontier_c: Vec<u32> = Vec::new();
        let mut depth = 0u32;
        let mut best: Option<usize> = None;
        while !frontier_v.is_empty() || !frontier_c.is_empty() {
            if depth % 2 == 0 {
                for &v in &frontier_v {
                    for &c in &self.cols[v as usize] {
                        let d = dist_c[c as usize];
                        if d == u32::MAX {
                            dist_c[c as usize] = depth + 1;
                            frontier_c.push(c);
                        } else if d == depth + 1 || d == depth {
                            // two shortest paths meet; cycle through root
                            let len = (depth + 1 + d) as usize;
                            best = Some(best.map_or(len, |b| b.min(len)));
                        }
                    }
                }
                frontier_v.clear();
            } else {
                for &c in &frontier_c {
                    for &v in &self.rows[c as usize] {
                        let d = dist_v[v as usize];
                        if d == u32::MAX {
                            dist_v[v as usize] = depth + 1;
                            frontier_v.push(v);
                        } else if (d == depth + 1 || d == depth) && v as usize != root {
                            let len = (depth + 1 + d) as usize;
                            best = Some(best.map_or(len, |b| b.min(len)));
                        }
                    }
                }
                frontier_c.clear();
            }
            depth += 1;
            if let Some(b) = best {
                if depth as usize >= b {
                    break;
                }
            }
        }
        best
    }
}

/// Progressive-edge-growth construction with ACE tie-breaking.
///
/// Variable nodes are processed in ascending degree order; each edge goes to
/// a check with spare capacity at maximal graph distance from the variable.
/// Among equals the candidate maximizing the ACE of the shortest cycle it
/// would close wins (cycles longer than 2·d_ace are exempt; ACE at or above
/// eta_ace saturates the preference), then the emptiest check, then a
/// seed-determined random priority.
pub fn construct_peg_ace(
    dd: &DegreeDistribution,
    n: usize,
    seed: u64,
    d_ace: usize,
    eta_ace: usize,
) -> Result<LdpcCode> {
    let (var_counts, chk_counts) = dd.node_counts(n)?;
    let mut var_degree: Vec<usize> = Vec::with_capacity(n);
    for &(d, c) in &var_counts {
        var_degree.extend(std::iter::repeat(d).take(c));
    }
    let mut capacity: Vec<usize> = Vec::new();
    for &(d, c) in &chk_counts {
        capacity.extend(std::iter::repeat(d).take(c));
    }
    let m = capacity.len();
    if var_degree.iter().any(|&d| d > m) {
        return Err(Error::InfeasibleDegrees("variable degree exceeds check count".into()));
    }

    // hard check capacities can squeeze the last few placements into short
    // cycles; retry with reshuffled orders (still seed-deterministic) and
    // keep the cleanest attempt
    let attempts = (200_000 / (n * n / 400 + 1)).clamp(1, 24) as u64;
    let mut best: Option<(PegBadness, Vec<Vec<u32>>)> = None;
    let mut last_err = None;
    for attempt in 0..attempts {
        let rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt);
        // an attempt can dead-end when the leftover capacity all sits on
        // checks already adjacent to the current variable; just retry
        match peg_attempt(n, &var_degree, &capacity, rng, d_ace, eta_ace) {
            Ok((rows, badness)) => {
                if best.as_ref().map_or(true, |(bb, _)| badness < *bb) {
                    best = Some((badness, rows));
                }
                if best.as_ref().unwrap().0 == PegBadness::default() {
                    break;
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some((badness, mut rows)) = best else {
        return Err(last_err.unwrap());
    };
    if badness.four_cycles > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0xD1B5_4A32_D192_ED03) | 1);
        repair_four_cycles(&mut rows, n, &mut rng);
        for r in rows.iter_mut() {
            r.sort_unstable();
        }
    }
    let mut code = LdpcCode::from_rows(n, rows, None)?;
    let girth_hist = girth_histogram(&code);
    let girth = girth_hist.first().map(|&(g, _)| g).unwrap_or(0);
    code.metadata = Some(CodeMetadata {
        dd: dd.clone(),
        seed,
        d_ace,
        eta_ace,
        girth,
        girth_histogram: girth_hist,
    });
    Ok(code)
}

/// Attempt quality: gate-violating placements, worst first. Smaller is
/// better; the default (all zero) is a clean attempt.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
struct PegBadness {
    four_cycles: usize,
    gated: usize,
}

fn peg_attempt(
    n: usize,
    var_degree: &[usize],
    capacity: &[usize],
    mut rng: ChaCha8Rng,
    d_ace: usize,
    eta_ace: usize,
) -> Result<(Vec<Vec<u32>>, PegBadness)> {
    let m = capacity.len();
    // random check priorities make the construction seed-dependent while
    // staying deterministic
    let mut priority: Vec<u32> = (0..m as u32).collect();
    priority.shuffle(&mut rng);
    // process variables in ascending degree order; randomize order within a
    // degree class
    let mut var_order: Vec<u32> = (0..n as u32).collect();
    var_order.shuffle(&mut rng);
    var_order.sort_by_key(|&v| var_degree[v as usize]);

    let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); m];
    let mut bfs = PegBfs::new(n, m);
    let mut badness = PegBadness::default();

    for &v in &var_order {
        let v = v as usize;
        for e in 0..var_degree[v] {
            let choice = if e == 0 {
                // no cycle possible; take the emptiest check
                (0..m)
                    .filter(|&c| rows[c].len() < capacity[c])
                    .min_by_key(|&c| (rows[c].len(), priority[c]))
            } else {
                use std::cmp::Reverse;
                bfs.run(v, &cols, &rows, var_degree);
                let mut best: Option<((Candidate, Reverse<usize>, Reverse<u32>), usize)> = None;
                for c in 0..m {
                    if rows[c].len() >= capacity[c] || cols[v].contains(&(c as u32)) {
                        continue;
                    }
                    let cand = bfs.candidate(c, d_ace, eta_ace);
                    let key = (cand, Reverse(rows[c].len()), Reverse(priority[c]));
                    if best.as_ref().map_or(true, |(bk, _)| key > *bk) {
                        best = Some((key, c));
                    }
                }
                if let Some(((Candidate::GatedCycle { depth, .. }, _, _), _)) = &best {
                    badness.gated += 1;
                    if *depth <= 3 {
                        badness.four_cycles += 1;
                    }
                }
                best.map(|(_, c)| c)
            };
            let Some(c) = choice else {
                return Err(Error::InfeasibleDegrees("ran out of check-node capacity".into()));
            };
            cols[v].push(c as u32);
            rows[c].push(v as u32);
        }
    }
    for r in rows.iter_mut() {
        r.sort_unstable();
    }
    Ok((rows, badness))
}

/// Degree-preserving edge-swap repair for 4-cycles the capacity-squeezed
/// endgame forces on PEG: for a variable v in a 4-cycle through check c2,
/// pick another edge (x, c3) and swap to (v, c3), (x, c2), accepting the swap
/// only when it introduces no new 4-cycle. Returns the number of 4-cycle
/// variable pairs still present afterwards.
fn repair_four_cycles(rows: &mut [Vec<u32>], n: usize, rng: &mut ChaCha8Rng) -> usize {
    let m = rows.len();
    let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (c, row) in rows.iter().enumerate() {
        for &v in row {
            cols[v as usize].push(c as u32);
        }
    }
    // does u share a check with v other than those in `excl`
    let shares_other = |cols: &[Vec<u32>], u: usize, v: usize, excl: &[u32]| {
        cols[u].iter().any(|c| !excl.contains(c) && cols[v].contains(c))
    };
    // first variable pair sharing two checks, reported as the edge to move
    let find_conflict = |cols: &[Vec<u32>], rows: &[Vec<u32>]| -> Option<(usize, u32)> {
        let mut shared: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        for v in 0..n {
            shared.clear();
            for &c in &cols[v] {
                for &u in &rows[c as usize] {
                    if (u as usize) != v {
                        *shared.entry(u).or_insert(0) += 1;
                    }
                }
            }
            if let Some(&u) =
                shared.iter().filter(|&(_, &cnt)| cnt >= 2).map(|(u, _)| u).min()
            {
                // move the last of the shared checks off v
                let c2 = *cols[v]
                    .iter()
                    .filter(|c| cols[u as usize].contains(c))
                    .last()
                    .unwrap();
                return Some((v, c2));
            }
        }
        None
    };
    let mut budget = 4 * n;
    while budget > 0 {
        let Some((v, c2)) = find_conflict(&cols, rows) else {
            return 0;
        };
        budget -= 1;
        let mut done = false;
        for _ in 0..400 {
            let c3 = rng.gen_range(0..m) as u32;
            if cols[v].contains(&c3) || rows[c3 as usize].is_empty() {
                continue;
            }
            let x = rows[c3 as usize][rng.gen_range(0..rows[c3 as usize].len())] as usize;
            if x == v || cols[x].contains(&c2) {
                continue;
            }
            // v gains c3: no other neighbor of c3 may share a remaining check
            // with v; x gains c2 symmetrically
            let bad_v = rows[c3 as usize]
                .iter()
                .any(|&u| u as usize != v && u as usize != x && shares_other(&cols, u as usize, v, &[c2]));
            let bad_x = rows[c2 as usize]
                .iter()
                .any(|&u| u as usize != v && u as usize != x && shares_other(&cols, u as usize, x, &[c3]));
            if bad_v || bad_x {
                continue;
            }
            rows[c2 as usize].retain(|&u| u as usize != v);
            rows[c2 as usize].push(x as u32);
            rows[c3 as usize].retain(|&u| u as usize != x);
            rows[c3 as usize].push(v as u32);
            cols[v].retain(|&c| c != c2);
            cols[v].push(c3);
            cols[x].retain(|&c| c != c3);
            cols[x].push(c2);
            done = true;
            break;
        }
        if !done {
            break;
        }
    }
    // count what remains
    let mut remaining = 0usize;
    let mut shared: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
    for v in 0..n {
        shared.clear();
        for &c in &cols[v] {
            for &u in &rows[c as usize] {
                if (u as usize) > v {
                    *shared.entry(u).or_insert(0) += 1;
                }
            }
        }
        remaining += shared.values().filter(|&&cnt| cnt >= 2).count();
    }
    remaining
}

/// (cycle length, variable-node count with that shortest-cycle length).
fn girth_histogram(code: &LdpcCode) -> Vec<(usize, usize)> {
    let mut hist = std::collections::BTreeMap::new();
    for v in 0..code.n {
        if let Some(g) = code.shortest_cycle_through(v) {
            *hist.entry(g).or_insert(0usize) += 1;
        }
    }
    hist.into_iter().collect()
}

/// Candidate ranking for one PEG edge placement; larger is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Candidate {
    /// closes a short cycle that fails the ACE gate; rank by cycle length
    /// (longer is better), then ACE
    GatedCycle { depth: u32, ace: i64 },
    /// closes a cycle that passes the gate (long enough or ACE-rich); rank
    /// by the distance (longer cycle is better), then ACE
    Cycle { depth: u32, ace: i64 },
    /// unreachable: closes no cycle at all
    Unreachable,
}

/// Reusable BFS workspace over the bipartite graph tracking, per check node,
/// its shortest-path depth from the root variable and the maximum path ACE
/// among shortest paths.
struct PegBfs {
    depth_c: Vec<u32>,
    ace_c: Vec<i64>,
    depth_v: Vec<u32>,
    ace_v: Vec<i64>,
}

impl PegBfs {
    fn new(n: usize, m: usize) -> Self {
        PegBfs {
            depth_c: vec![u32::MAX; m],
            ace_c: vec![0; m],
            depth_v: vec![u32::MAX; n],
            ace_v: vec![0; n],
        }
    }

    fn run(&mut self, root: usize, cols: &[Vec<u32>], rows: &[Vec<u32>], var_degree: &[usize]) {
        self.depth_c.fill(u32::MAX);
        self.depth_v.fill(u32::MAX);
        self.depth_v[root] = 0;
        self.ace_v[root] = var_degree[root] as i64 - 2;
        let mut frontier_v = vec![root as u32];
        let mut frontier_c: Vec<u32> = Vec::new();
        let mut depth = 0u32;
        while !frontier_v.is_empty() {
            // variable layer -> check layer
            frontier_c.clear();
            for &v in &frontier_v {
                let a = self.ace_v[v as usize];
                for &c in &cols[v as usize] {
                    let c = c as usize;
                    if self.depth_c[c] == u32::MAX {
                        self.depth_c[c] = depth + 1;
                        self.ace_c[c] = a;
                        frontier_c.push(c as u32);
                    } else if self.depth_c[c] == depth + 1 && a > self.ace_c[c] {
                        self.ace_c[c] = a;
                    }
                }
            }
            depth += 1;
            // check layer -> variable layer
            frontier_v.clear();
            for &c in &frontier_c {
                let a = self.ace_c[c as usize];
                for &v in &rows[c as usize] {
                    let v = v as usize;
                    let av = a + var_degree[v] as i64 - 2;
                    if self.depth_v[v] == u32::MAX {
                        self.depth_v[v] = depth + 1;
                        self.ace_v[v] = av;
                        frontier_v.push(v as u32);
                    } else if self.depth_v[v] == depth + 1 && av > self.ace_v[v] {
                        self.ace_v[v] = av;
                    }
                }
            }
            depth += 1;
        }
    }

    fn candidate(&self, c: usize, d_ace: usize, eta_ace: usize) -> Candidate {
        let depth = self.depth_c[c];
        if depth == u32::MAX {
            return Candidate::Unreachable;
        }
        // connecting the root to this check closes a cycle of depth+1 edges;
        // its ACE already includes the root's contribution via ace_c
        let cycle_len = depth as usize + 1;
        let ace = self.ace_c[c];
        if cycle_len <= 2 * d_ace && ace < eta_ace as i64 {
            Candidate::GatedCycle { depth, ace }
        } else {
            Candidate::Cycle { depth, ace }
        }
    }
}
