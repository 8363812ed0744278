//! Small absorbing-set enumeration over low-degree variable nodes.

use crate::ldpc::code::LdpcCode;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One absorbing set: `a` variable nodes, `b` unsatisfied checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbsorbingSet {
    pub a: usize,
    pub b: usize,
    pub variables: Vec<u32>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AbsorbingSetReport {
    pub sets: Vec<AbsorbingSet>,
}

impl AbsorbingSetReport {
    pub fn count(&self, a: usize, b: usize) -> usize {
        self.sets.iter().filter(|s| s.a == a && s.b == b).count()
    }
}

const SEED_DEGREE_LIMIT: usize = 3;

/// Enumerates connected sets of up to `max_a` variable nodes, all of degree
/// at most 3, and reports those forming an (a, b) absorbing set with
/// b <= max_b: every check adjacent to the set an even (satisfied) or odd
/// (unsatisfied) number of times, and every member variable with strictly
/// more satisfied than unsatisfied neighboring checks.
///
/// Exact within the searched class; absorbing sets containing a variable of
/// degree 4 or more are out of scope.
pub fn scan_absorbing_sets(code: &LdpcCode, max_a: usize, max_b: usize) -> AbsorbingSetReport {
    assert!(max_a <= 6, "scan is desk-scale only up to a = 6");
    let low: Vec<u32> = (0..code.n as u32)
        .filter(|&v| {
            let d = code.cols[v as usize].len();
            d > 0 && d <= SEED_DEGREE_LIMIT
        })
        .collect();
    let mut report = AbsorbingSetReport::default();
    if low.is_empty() || max_a == 0 {
        return report;
    }
    // per-check list of low-degree neighbors, so subset growth never scans
    // full check rows
    let mut rows_low: Vec<Vec<u32>> = vec![Vec::new(); code.m];
    for &v in &low {
        for &c in &code.cols[v as usize] {
            rows_low[c as usize].push(v);
        }
    }
    let mut seen: std::collections::HashSet<u128> = std::collections::HashSet::new();
    // grow connected subsets from each seed (the seed is the smallest member,
    // so every subset has exactly one owning seed); dedupe orderings via the
    // packed sorted-member key
    for &seed in &low {
        let mut current = vec![seed];
        grow(code, &rows_low, &mut current, max_a, max_b, &mut seen, &mut report);
    }
    report.sets.sort_by(|x, y| x.variables.cmp(&y.variables));
    report
}

fn pack(sorted: &[u32]) -> u128 {
    sorted.iter().fold(0u128, |acc, &v| (acc << 21) | (v as u128 + 1))
}

#[allow(clippy::too_many_arguments)]
fn grow(
    code: &LdpcCode,
    rows_low: &[Vec<u32>],
    current: &mut Vec<u32>,
    max_a: usize,
    max_b: usize,
    seen: &mut std::collections::HashSet<u128>,
    report: &mut AbsorbingSetReport,
) {
    let mut key = current.clone();
    key.sort_unstable();
    if !seen.insert(pack(&key)) {
        return;
    }
    if current.len() >= 2 {
        if let Some(b) = absorbing_b(code, &key, max_b) {
            report.sets.push(AbsorbingSet { a: key.len(), b, variables: key });
        }
    }
    if current.len() == max_a {
        return;
    }
    let seed = current[0];
    let mut cands: BTreeSet<u32> = BTreeSet::new();
    for &v in current.iter() {
        for &c in &code.cols[v as usize] {
            for &w in &rows_low[c as usize] {
                if w > seed && !current.contains(&w) {
                    cands.insert(w);
                }
            }
        }
    }
    for w in cands {
        current.push(w);
        grow(code, rows_low, current, max_a, max_b, seen, report);
        current.pop();
    }
}

/// Returns Some(b) if `vars` is an absorbing set with b <= max_b.
fn absorbing_b(code: &LdpcCode, vars: &[u32], max_b: usize) -> Option<usize> {
    use std::collections::HashMap;
    let mut check_parity: HashMap<u32, usize> = HashMap::new();
    for &v in vars {
        for &c in &code.cols[v as usize] {
            *check_parity.entry(c).or_insert(0) += 1;
        }
    }
    let b = check_parity.values().filter(|&&cnt| cnt % 2 == 1).count();
    if b > max_b {
        return None;
    }
    for &v in vars {
        let mut sat = 0usize;
        let mut unsat = 0usize;
        for &c in &code.cols[v as usize] {
            if check_parity[&c] % 2 == 0 {
                sat += 1;
            } else {
                unsat += 1;
            }
        }
        if sat <= unsat {
            return None;
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The classic (4,2) gadget: four degree-3 variable nodes, eight checks;
    /// five checks each see two variables (satisfied), two checks see one
    /// variable each (unsatisfied). Each variable touches at least two
    /// satisfied checks.
    fn gadget42() -> LdpcCode {
        // vars 0..4; shared checks 0..5 pair them up, checks 5,6 dangle
        let rows = vec![
            vec![0, 1],
            vec![0, 2],
            vec![1, 3],
            vec![2, 3],
            vec![1, 2],
            vec![0], // unsatisfied
            vec![3], // unsatisfied
        ];
        LdpcCode::from_rows(4, rows, None).unwrap()
    }

    #[test]
    fn finds_planted_four_two_set() {
        let code = gadget42();
        let report = scan_absorbing_sets(&code, 4, 2);
        assert_eq!(report.count(4, 2), 1, "sets: {:?}", report.sets);
        let s = report.sets.iter().find(|s| s.a == 4 && s.b == 2).unwrap();
        assert_eq!(s.variables, vec![0, 1, 2, 3]);
    }

    #[test]
    fn no_degree_three_members_means_no_small_sets() {
        // all variables have degree 4: outside the searched class, and the
        // scan reports nothing
        let rows = vec![
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
            vec![0, 1],
        ];
        let code = LdpcCode::from_rows(2, rows, None).unwrap();
        let report = scan_absorbing_sets(&code, 5, 2);
        assert!(report.sets.is_empty());
    }

    #[test]
    fn empty_graph_gives_empty_report() {
        let code = LdpcCode::from_rows(3, vec![vec![0]], None).unwrap();
        // variables 1 and 2 are isolated; variable 0 alone is never a set
        let report = scan_absorbing_sets(&code, 5, 2);
        assert!(report.sets.is_empty());
    }

    #[test]
    fn pair_with_doubled_check_is_a_two_zero_set() {
        // two degree-2 variables sharing both checks: all checks satisfied
        let rows = vec![vec![0, 1], vec![0, 1], vec![2]];
        let code = LdpcCode::from_rows(3, rows, None).unwrap();
        let report = scan_absorbing_sets(&code, 5, 2);
        assert_eq!(report.count(2, 0), 1);
    }
}
