//! Cost models and instance data for the two benchmark problems: parallel
//! machine scheduling (PMS) and discrete portfolio rebalancing, including the
//! degenerate two-qubit-per-asset encoding and CSV market-data ingestion.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{enumerate_valid_multisets, MultisetPartition};
use crate::error::{QvaError, Result};

// ============================================================================
// Parallel machine scheduling
// ============================================================================

/// Parallel machine scheduling instance: `n` jobs assigned to `m` machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmsInstance {
    /// Number of jobs.
    pub n: usize,
    /// Number of machines.
    pub m: usize,
    /// Job priority weights `w_i`.
    pub w: Vec<f64>,
    /// Job processing times `tau_i`.
    pub tau: Vec<f64>,
    /// Machine speeds `kappa_j`.
    pub kappa: Vec<f64>,
    /// Speeds for the padded binary register (`2^ceil(log2 m)` entries);
    /// defaults to `kappa` padded with its minimum.
    #[serde(default)]
    pub kappa_padded: Option<Vec<f64>>,
    /// Balance between weighted completion time and energy, in `[0, 1]`.
    pub eta: f64,
    /// Power-function exponent `alpha > 1`.
    pub alpha: f64,
    /// Penalty coefficient for invalid padded assignments.
    #[serde(default = "default_penalty")]
    pub a: f64,
}

fn default_penalty() -> f64 {
    100.0
}

/// Number of bits needed to encode `m` symbols.
pub fn bits_for(m: usize) -> usize {
    (usize::BITS - m.saturating_sub(1).leading_zeros()) as usize
}

impl PmsInstance {
    /// Validate lengths and positivity.
    pub fn validate(&self) -> Result<()> {
        if self.w.len() != self.n || self.tau.len() != self.n {
            return Err(QvaError::Config("w and tau must have n entries".into()));
        }
        if self.kappa.len() != self.m {
            return Err(QvaError::Config("kappa must have m entries".into()));
        }
        if self.kappa.iter().any(|&k| k <= 0.0) || self.tau.iter().any(|&t| t <= 0.0) {
            return Err(QvaError::Config("speeds and times must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.eta) || self.alpha <= 1.0 {
            return Err(QvaError::Config("need eta in [0,1] and alpha > 1".into()));
        }
        if let Some(p) = &self.kappa_padded {
            if p.len() != 1 << bits_for(self.m) || p[..self.m] != self.kappa[..] {
                return Err(QvaError::Config(
                    "kappa_padded must extend kappa to 2^ceil(log2 m) entries".into(),
                ));
            }
        }
        Ok(())
    }

    /// Speeds over the padded binary register.
    pub fn padded_speeds(&self) -> Vec<f64> {
        if let Some(p) = &self.kappa_padded {
            return p.clone();
        }
        let min = self.kappa.iter().copied().fold(f64::INFINITY, f64::min);
        let mut out = self.kappa.clone();
        out.resize(1 << bits_for(self.m), min);
        out
    }

    /// Cost of job `i` on a machine of speed `k`.
    fn job_cost(&self, i: usize, k: f64) -> f64 {
        self.eta * self.w[i] * self.tau[i] / k
            + (1.0 - self.eta) * k.powf(self.alpha - 1.0) * self.tau[i]
    }

    /// Unpenalised cost of an assignment (machine indices may address the
    /// padded speed list).
    pub fn cost(&self, assignment: &[usize]) -> f64 {
        let speeds = self.padded_speeds();
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| self.job_cost(i, speeds[j]))
            .sum()
    }

    /// Quadratic penalty `a (m - max s)^2`, with machines labelled from one,
    /// applied when the largest machine label exceeds `m`.
    pub fn penalty(&self, assignment: &[usize]) -> f64 {
        let top = assignment.iter().copied().max().map_or(0, |x| x + 1);
        if top > self.m {
            let gap = (top - self.m) as f64;
            self.a * gap * gap
        } else {
            0.0
        }
    }

    /// Cost plus penalty.
    pub fn penalized_cost(&self, assignment: &[usize]) -> f64 {
        self.cost(assignment) + self.penalty(assignment)
    }

    /// Cost table over every assignment with machine indices `< radix`
    /// (job 0 most significant). Penalised when `radix > m`.
    pub fn cost_table(&self, radix: usize) -> Vec<f64> {
        let speeds = self.padded_speeds();
        let size = radix.pow(self.n as u32);
        let mut table = vec![0.0; size];
        let mut top = vec![0usize; size];
        let mut stride = size;
        for i in 0..self.n {
            stride /= radix;
            let per: Vec<f64> = (0..radix).map(|j| self.job_cost(i, speeds[j])).collect();
            for (idx, (c, t)) in table.iter_mut().zip(top.iter_mut()).enumerate() {
                let j = (idx / stride) % radix;
                *c += per[j];
                *t = (*t).max(j + 1);
            }
        }
        if radix > self.m {
            for (c, &t) in table.iter_mut().zip(&top) {
                if t > self.m {
                    let gap = (t - self.m) as f64;
                    *c += self.a * gap * gap;
                }
            }
        }
        table
    }

    /// Whether an index of a `radix`-ary table encodes a valid assignment.
    pub fn valid_mask(&self, radix: usize) -> Vec<bool> {
        let size = radix.pow(self.n as u32);
        (0..size)
            .map(|mut idx| {
                (0..self.n).all(|_| {
                    let ok = idx % radix < self.m;
                    idx /= radix;
                    ok
                })
            })
            .collect()
    }
}

/// Divide costs by `reference_mean` (the mean of the valid cost set).
pub fn scale_by_mean(costs: &mut [f64], reference_mean: f64) {
    for c in costs.iter_mut() {
        *c /= reference_mean;
    }
}

/// Schedule A of the benchmark data (six jobs, five machines).
pub fn schedule_a() -> PmsInstance {
    PmsInstance {
        n: 6,
        m: 5,
        w: vec![3.0, 6.0, 1.0, 4.0, 5.0, 2.0],
        tau: vec![21.0, 22.0, 13.0, 14.0, 5.0, 15.0],
        kappa: vec![65.0, 61.0, 41.0, 36.0, 79.0],
        kappa_padded: Some(vec![65.0, 61.0, 41.0, 36.0, 79.0, 41.0, 41.0, 41.0]),
        eta: 0.5,
        alpha: 2.0,
        a: 100.0,
    }
}

/// Schedule B of the benchmark data (seven jobs, four machines).
pub fn schedule_b() -> PmsInstance {
    PmsInstance {
        n: 7,
        m: 4,
        w: vec![7.0, 3.0, 2.0, 4.0, 1.0, 6.0, 5.0],
        tau: vec![23.0, 9.0, 11.0, 17.0, 6.0, 11.0, 12.0],
        kappa: vec![71.0, 62.0, 50.0, 97.0],
        kappa_padded: None,
        eta: 0.5,
        alpha: 2.0,
        a: 100.0,
    }
}

/// The compiled-in benchmark instances.
pub fn builtin_instances() -> Vec<(&'static str, PmsInstance)> {
    vec![("schedule_a", schedule_a()), ("schedule_b", schedule_b())]
}

// ============================================================================
// Portfolio rebalancing
// ============================================================================

/// Position symbols in declaration order (the canonical alphabet order).
pub const SHORT: usize = 0;
/// Long position.
pub const LONG: usize = 1;
/// No position.
pub const NO: usize = 2;

/// Net-position value of each symbol (short, long, no).
pub const NET_POSITION: [i64; 3] = [-1, 1, 0];

/// Discrete portfolio rebalancing instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioInstance {
    /// Number of assets.
    pub n: usize,
    /// Covariance matrix (row-major, `n x n`).
    pub sigma: Vec<Vec<f64>>,
    /// Mean returns.
    pub r: Vec<f64>,
    /// Risk/return balance.
    pub eta: f64,
    /// Net-position constraint value.
    #[serde(rename = "A")]
    pub a: i64,
    /// Flip the cost sign convention to long = +1, short = -1.
    #[serde(default)]
    pub flip_zeta: bool,
}

/// Full-register view of a portfolio problem on `2n` qubits.
#[derive(Debug, Clone)]
pub struct HilbertTable {
    /// Number of qubits.
    pub qubits: usize,
    /// Quality-operator eigenvalue of every basis state.
    pub costs: Vec<f64>,
    /// Decoded positions of every basis state.
    pub positions: Vec<Vec<usize>>,
    /// Global index of the encoded valid solution (`None` when the net
    /// position differs from the constraint value).
    pub solution_index: Vec<Option<usize>>,
    /// Number of basis states encoding each valid solution.
    pub degeneracy: Vec<usize>,
}

impl HilbertTable {
    /// Number of basis states that encode a valid solution.
    pub fn valid_encodings(&self) -> usize {
        self.solution_index.iter().filter(|s| s.is_some()).count()
    }
}

impl PortfolioInstance {
    /// Validate dimensions and symmetry.
    pub fn validate(&self) -> Result<()> {
        if self.r.len() != self.n || self.sigma.len() != self.n {
            return Err(QvaError::Config("r and sigma must have n entries".into()));
        }
        for (i, row) in self.sigma.iter().enumerate() {
            if row.len() != self.n {
                return Err(QvaError::Config("sigma must be n x n".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if (v - self.sigma[j][i]).abs() > 1e-12 * v.abs().max(1.0) {
                    return Err(QvaError::Config("sigma must be symmetric".into()));
                }
            }
        }
        if self.a.unsigned_abs() as usize > self.n {
            return Err(QvaError::Config("|A| must not exceed n".into()));
        }
        Ok(())
    }

    /// Cost eigenvalue `zeta` of each symbol: long -1, short +1, no 0 (or the
    /// flipped convention).
    pub fn zeta(&self) -> [f64; 3] {
        if self.flip_zeta {
            [-1.0, 1.0, 0.0]
        } else {
            [1.0, -1.0, 0.0]
        }
    }

    /// `eta sum sigma_ij zeta_i zeta_j - (1 - eta) sum r_i zeta_i`.
    pub fn cost(&self, positions: &[usize]) -> f64 {
        let z = self.zeta();
        let zs: Vec<f64> = positions.iter().map(|&p| z[p]).collect();
        let mut risk = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                risk += self.sigma[i][j] * zs[i] * zs[j];
            }
        }
        let ret: f64 = self.r.iter().zip(&zs).map(|(r, z)| r * z).sum();
        self.eta * risk - (1.0 - self.eta) * ret
    }

    /// Net position `#long - #short`.
    pub fn net_position(positions: &[usize]) -> i64 {
        positions.iter().map(|&p| NET_POSITION[p]).sum()
    }

    /// Partition of the valid solutions into permutation sets.
    pub fn partition(&self) -> Result<MultisetPartition> {
        enumerate_valid_multisets(self.n, &NET_POSITION, self.a)
    }

    /// Costs of the valid solutions in global-index order.
    pub fn valid_costs(&self, partition: &MultisetPartition) -> Result<Vec<f64>> {
        (0..partition.total_usize()?)
            .map(|i| Ok(self.cost(&partition.global_unrank_usize(i)?)))
            .collect()
    }

    /// Decode one asset's qubit pair: `|01>` long, `|10>` short,
    /// `|00>`/`|11>` no position.
    pub fn decode_pair(hi: usize, lo: usize) -> usize {
        match (hi, lo) {
            (0, 1) => LONG,
            (1, 0) => SHORT,
            _ => NO,
        }
    }

    /// Decode a `2n`-qubit basis state (qubit 0 most significant).
    pub fn decode_state(&self, idx: usize) -> Vec<usize> {
        let q = 2 * self.n;
        (0..self.n)
            .map(|i| {
                let hi = (idx >> (q - 1 - 2 * i)) & 1;
                let lo = (idx >> (q - 2 - 2 * i)) & 1;
                Self::decode_pair(hi, lo)
            })
            .collect()
    }

    /// Expand to the full `2^{2n}` register with the degeneracy map.
    pub fn expand_to_hilbert(&self) -> Result<HilbertTable> {
        if self.n > 10 {
            return Err(QvaError::invalid("Hilbert expansion limited to n <= 10"));
        }
        let partition = self.partition()?;
        let q = 2 * self.n;
        let size = 1usize << q;
        let mut costs = Vec::with_capacity(size);
        let mut positions = Vec::with_capacity(size);
        let mut solution_index = Vec::with_capacity(size);
        let mut degeneracy = vec![0; partition.total_usize()?];
        for idx in 0..size {
            let p = self.decode_state(idx);
            costs.push(self.cost(&p));
            let sol = if Self::net_position(&p) == self.a {
                let g = partition.global_rank_usize(&p)?;
                degeneracy[g] += 1;
                Some(g)
            } else {
                None
            };
            solution_index.push(sol);
            positions.push(p);
        }
        Ok(HilbertTable {
            qubits: q,
            costs,
            positions,
            solution_index,
            degeneracy,
        })
    }

    /// Random instance with covariance `B B^T / n` (`B` uniform in `(-1, 1)`)
    /// and returns uniform in `(-0.5, 0.5)`.
    pub fn synthetic(n: usize, a: i64, eta: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let sigma = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| b[i][k] * b[j][k]).sum::<f64>() / n as f64)
                    .collect()
            })
            .collect();
        let r = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        Self {
            n,
            sigma,
            r,
            eta,
            a,
            flip_zeta: false,
        }
    }
}

/// Build a portfolio instance from a price CSV: a `date` column followed by
/// one column of adjusted closing prices per asset.
///
/// Returns are simple daily returns `p_t / p_{t-1} - 1`; `r` is their mean
/// and `sigma` their unbiased sample covariance (divisor `T - 1`, or 1 when
/// only a single return is available).
pub fn ingest_prices<R: Read>(reader: R, eta: f64, a: i64) -> Result<PortfolioInstance> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(QvaError::Config("price CSV needs a date column and at least one asset".into()));
    }
    let n = headers.len() - 1;
    let mut prices: Vec<Vec<f64>> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals = (1..=n)
            .map(|j| {
                let cell = rec.get(j).map(str::trim).unwrap_or("");
                if cell.is_empty() {
                    return Err(QvaError::Config(format!("missing value at row {}, column {}", row + 1, j)));
                }
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| QvaError::Config(format!("non-numeric cell '{cell}' at row {}", row + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        prices.push(vals);
    }
    if prices.len() < 2 {
        return Err(QvaError::Config("need at least two price rows".into()));
    }
    let returns: Vec<Vec<f64>> = prices
        .windows(2)
        .map(|w| (0..n).map(|j| w[1][j] / w[0][j] - 1.0).collect())
        .collect();
    let t = returns.len() as f64;
    let r: Vec<f64> = (0..n).map(|j| returns.iter().map(|x| x[j]).sum::<f64>() / t).collect();
    let denom = (t - 1.0).max(1.0);
    let sigma = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    returns.iter().map(|x| (x[i] - r[i]) * (x[j] - r[j])).sum::<f64>() / denom
                })
                .collect()
        })
        .collect();
    Ok(PortfolioInstance {
        n,
        sigma,
        r,
        eta,
        a,
        flip_zeta: false,
    })
}

// ============================================================================
// Instance files
// ============================================================================

/// Self-describing instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceFile {
    /// Parallel machine scheduling.
    Pms(PmsInstance),
    /// Portfolio rebalancing.
    Portfolio(PortfolioInstance),
}

impl InstanceFile {
    /// Parse and validate a JSON instance.
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: InstanceFile =
            serde_json::from_str(text).map_err(|e| QvaError::Config(e.to_string()))?;
        match &inst {
            InstanceFile::Pms(p) => p.validate()?,
            InstanceFile::Portfolio(p) => p.validate()?,
        }
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pms_limits() {
        let mut b = schedule_b();
        let s = [0, 1, 2, 3, 0, 1, 2];
        b.eta = 1.0;
        let expect: f64 = (0..7).map(|i| b.w[i] * b.tau[i] / b.kappa[s[i]]).sum();
        assert!((b.cost(&s) - expect).abs() < 1e-12);
        b.eta = 0.0;
        let expect: f64 = (0..7).map(|i| b.kappa[s[i]] * b.tau[i]).sum();
        assert!((b.cost(&s) - expect).abs() < 1e-9);
    }

    #[test]
    fn pms_penalty() {
        let a = schedule_a();
        assert_eq!(a.penalty(&[0, 1, 2, 3, 4, 0]), 0.0);
        // Largest machine label m + 1 (index 5): one step over.
        assert_eq!(a.penalty(&[0, 5, 0, 0, 0, 0]), 100.0);
        assert_eq!(a.penalty(&[7, 0, 0, 0, 0, 0]), 900.0);
        let table = a.cost_table(8);
        let idx = 5 * 8usize.pow(4);
        assert!((table[idx] - a.penalized_cost(&[0, 5, 0, 0, 0, 0])).abs() < 1e-9);
        assert_eq!(a.padded_speeds(), vec![65.0, 61.0, 41.0, 36.0, 79.0, 41.0, 41.0, 41.0]);
        assert_eq!(schedule_b().padded_speeds().len(), 4);
        assert_eq!(bits_for(5), 3);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(1), 0);
    }

    #[test]
    fn pms_table_matches_direct() {
        let b = schedule_b();
        let table = b.cost_table(4);
        for idx in [0usize, 1, 77, 4095, 16383] {
            let mut s = vec![0; 7];
            let mut x = idx;
            for i in (0..7).rev() {
                s[i] = x % 4;
                x /= 4;
            }
            assert!((table[idx] - b.cost(&s)).abs() < 1e-9);
        }
        assert!(b.valid_mask(4).iter().all(|&v| v));
        assert_eq!(schedule_a().valid_mask(8).iter().filter(|&&v| v).count(), 15625);
    }

    #[test]
    fn portfolio_costs_and_encoding() {
        let p = PortfolioInstance::synthetic(4, -1, 0.5, 3);
        assert_eq!(p.cost(&[NO; 4]), 0.0);
        let mut z = p.clone();
        z.eta = 0.0;
        // zeta(long) = -1, so a single long position contributes +r_i.
        assert!((z.cost(&[LONG, NO, NO, NO]) - z.r[0]).abs() < 1e-15);
        z.flip_zeta = true;
        assert!((z.cost(&[LONG, NO, NO, NO]) + z.r[0]).abs() < 1e-15);

        let h = p.expand_to_hilbert().unwrap();
        assert_eq!(h.degeneracy.len(), 16);
        assert_eq!(h.valid_encodings(), 56);
        assert!(h.degeneracy.iter().all(|d| d.is_power_of_two()));
        assert_eq!(PortfolioInstance::decode_pair(0, 1), LONG);
        assert_eq!(PortfolioInstance::decode_pair(1, 0), SHORT);
        assert_eq!(PortfolioInstance::decode_pair(1, 1), NO);
    }

    #[test]
    fn ingest_examples() {
        let csv = "date,a,b\n1,10,20\n2,11,22\n3,12.1,22\n";
        let p = ingest_prices(csv.as_bytes(), 0.5, 0).unwrap();
        // returns: a (0.1, 0.1), b (0.1, 0.0)
        assert!((p.r[0] - 0.1).abs() < 1e-12);
        assert!((p.r[1] - 0.05).abs() < 1e-12);
        assert!(p.sigma[0][0].abs() < 1e-12);
        assert!((p.sigma[1][1] - 0.005).abs() < 1e-12);
        let flat = ingest_prices("date,a\n1,5\n2,5\n3,5\n".as_bytes(), 0.5, 0).unwrap();
        assert_eq!(flat.r, vec![0.0]);
        assert_eq!(flat.sigma, vec![vec![0.0]]);
        assert!(ingest_prices("date,a\n1,5\n".as_bytes(), 0.5, 0).is_err());
        assert!(ingest_prices("date,a\n1,5\n2,\n".as_bytes(), 0.5, 0).is_err());
        assert!(ingest_prices("date,a\n1,5\n2,x\n".as_bytes(), 0.5, 0).is_err());
    }

    #[test]
    fn instance_json_roundtrip() {
        let f = InstanceFile::Pms(schedule_b());
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(InstanceFile::from_json(&text).unwrap(), f);
        let bad = r#"{"kind":"portfolio","n":1,"sigma":[[1]],"r":[0],"eta":0.5,"A":0,"extra":1}"#;
        assert!(InstanceFile::from_json(bad).is_err());
    }
}
