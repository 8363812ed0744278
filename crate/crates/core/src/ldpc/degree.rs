//! Edge-perspective degree distributions and the three built-in
//! high-rate code profiles.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Edge-perspective degree distribution: `lambda[d]` is the fraction of
/// edges attached to variable nodes of degree `d`, `rho[d]` the same for
/// check nodes. Stored as ascending `(degree, fraction)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub lambda: Vec<(usize, f64)>,
    pub rho: Vec<(usize, f64)>,
}

fn validate_side(side: &[(usize, f64)], name: &str) -> Result<()> {
    if side.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} is empty")));
    }
    if side.iter().any(|&(d, a)| d == 0 || a < 0.0) {
        return Err(Error::InvalidConfig(format!("{name} has a zero degree or negative fraction")));
    }
    if side.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidConfig(format!("{name} degrees must be strictly ascending")));
    }
    let sum: f64 = side.iter().map(|&(_, a)| a).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!("{name} fractions sum to {sum}, not 1")));
    }
    Ok(())
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<(usize, f64)>, rho: Vec<(usize, f64)>) -> Result<Self> {
        validate_side(&lambda, "lambda")?;
        validate_side(&rho, "rho")?;
        Ok(DegreeDistribution { lambda, rho })
    }

    /// Builds from coefficient lists that are close to, but not exactly,
    /// normalized (published tables are typically rounded to 5 digits);
    /// rescales each side to sum to 1.
    pub fn normalized(lambda: Vec<(usize, f64)>, rho: Vec<(usize, f64)>) -> Result<Self> {
        let scale = |mut side: Vec<(usize, f64)>| {
            let sum: f64 = side.iter().map(|&(_, a)| a).sum();
            if sum > 0.0 {
                side.iter_mut().for_each(|(_, a)| *a /= sum);
            }
            side
        };
        Self::new(scale(lambda), scale(rho))
    }

    /// Built-in profile 1, 2, or 3.
    pub fn builtin(id: u8) -> Result<Self> {
        let (lambda, rho): (Vec<(usize, f64)>, Vec<(usize, f64)>) = match id {
            1 => (
                vec![
                    (1, 2.0054e-5),
                    (2, 3.5776e-2),
                    (3, 0.39869),
                    (9, 8.4827e-3),
                    (10, 3.7701e-2),
                    (19, 0.51933),
                ],
                vec![(55, 0.15662), (56, 0.84338)],
            ),
            2 => (
                vec![
                    (1, 1.7701e-5),
                    (2, 3.1579e-2),
                    (4, 0.46923),
                    (9, 7.4877e-3),
                    (10, 3.3278e-2),
                    (19, 0.45841),
                ],
                vec![(62, 1.0975e-3), (63, 0.73267), (64, 0.26623)],
            ),
            3 => (
                vec![(2, 3.2172e-2), (3, 2.681e-3), (4, 0.55764), (24, 0.40751)],
                vec![(58, 0.10366), (59, 0.89634)],
            ),
            _ => return Err(Error::InvalidConfig(format!("no built-in degree profile {id}"))),
        };
        Self::normalized(lambda, rho)
    }

    /// Design rate 1 - (sum rho_d / d) / (sum lambda_d / d).
    pub fn rate(&self) -> f64 {
        let vl: f64 = self.lambda.iter().map(|&(d, a)| a / d as f64).sum();
        let vr: f64 = self.rho.iter().map(|&(d, a)| a / d as f64).sum();
        1.0 - vr / vl
    }

    pub fn has_degree_three_variables(&self) -> bool {
        self.lambda.iter().any(|&(d, a)| d == 3 && a > 0.0)
    }

    pub fn max_lambda_degree(&self) -> usize {
        self.lambda.last().map(|&(d, _)| d).unwrap_or(0)
    }

    pub fn max_rho_degree(&self) -> usize {
        self.rho.last().map(|&(d, _)| d).unwrap_or(0)
    }

    /// Node-perspective degree targets for a length-`n` code: variable-node
    /// counts per degree (summing to exactly n, largest-remainder rounding)
    /// and check-node counts per degree whose total edge count matches the
    /// variable side exactly (residual absorbed by the largest check degree).
    pub fn node_counts(&self, n: usize) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
        let vl: f64 = self.lambda.iter().map(|&(d, a)| a / d as f64).sum();
        let var_counts = largest_remainder(
            &self.lambda.iter().map(|&(d, a)| (d, a / d as f64 / vl)).collect::<Vec<_>>(),
            n,
        );
        let edges: usize = var_counts.iter().map(|&(d, c)| d * c).sum();
        let vr: f64 = self.rho.iter().map(|&(d, a)| a / d as f64).sum();
        let num_checks = (edges as f64 * vr).round() as usize;
        if num_checks == 0 || num_checks >= n {
            return Err(Error::InfeasibleDegrees(format!(
                "degree profile implies {num_checks} checks for n = {n}"
            )));
        }
        let raw = largest_remainder(
            &self.rho.iter().map(|&(d, a)| (d, a / d as f64 / vr)).collect::<Vec<_>>(),
            num_checks,
        );
        // reconcile the check-side socket total with the variable side by
        // bumping single check nodes up or down one degree at a time
        let mut chk: std::collections::BTreeMap<usize, usize> = raw.into_iter().collect();
        let mut chk_edges: usize = chk.iter().map(|(&d, &c)| d * c).sum();
        while chk_edges != edges {
            if chk_edges < edges {
                let &d = chk.iter().rev().find(|(_, &c)| c > 0).map(|(d, _)| d).unwrap();
                *chk.get_mut(&d).unwrap() -= 1;
                *chk.entry(d + 1).or_insert(0) += 1;
                chk_edges += 1;
            } else {
                let Some(&d) =
                    chk.iter().find(|(&d, &c)| d > 1 && c > 0).map(|(d, _)| d)
                else {
                    return Err(Error::InfeasibleDegrees("cannot match socket totals".into()));
                };
                *chk.get_mut(&d).unwrap() -= 1;
                *chk.entry(d - 1).or_insert(0) += 1;
                chk_edges -= 1;
            }
        }
        let chk_counts: Vec<(usize, usize)> =
            chk.into_iter().filter(|&(_, c)| c > 0).collect();
        Ok((var_counts, chk_counts))
    }
}

/// Largest-remainder apportionment of `total` nodes across `(degree, share)`
/// rows; shares are assumed to sum to 1.
fn largest_remainder(shares: &[(usize, f64)], total: usize) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::with_capacity(shares.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(shares.len());
    let mut assigned = 0usize;
    for (i, &(d, s)) in shares.iter().enumerate() {
        let exact = s * total as f64;
        let floor = exact.floor() as usize;
        out.push((d, floor));
        assigned += floor;
        remainders.push((exact - floor as f64, i));
    }
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take(total - assigned) {
        out[i].1 += 1;
    }
    out
}
