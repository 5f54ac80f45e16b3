//! Graph-analysis figures of merit: subshell coefficients, the convergence
//! potential and its variance-adjusted counterpart, phase discrepancy, the
//! mean shell variance (MSV), and Hamming-graph scaling laws.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QvaError, Result};
use crate::graphs::{subshell_partition, FingerprintParams, ShellPartition, SparseGraph, DENSE_LIMIT};
use crate::optimize::{grid_argmax, nelder_mead, repeat_rng, NmOptions, TIME_GRID};
use crate::walks::{DenseWalk, C64, I};

use std::f64::consts::TAU;

// ============================================================================
// Subshell models
// ============================================================================

/// A graph whose walk column from a reference vertex is described by
/// subshell coefficients `w_{d,k}(t)`.
pub trait SubshellModel: Sync {
    /// Number of vertices `|V|`.
    fn num_vertices(&self) -> f64;

    /// `(d, k, |N_{d,k}|)` for every subshell, ordered by `d` then `k`.
    fn subshells(&self) -> Vec<(usize, usize, f64)>;

    /// Coefficient of subshell number `idx` (position in [`subshells`]) at
    /// time `t`.
    ///
    /// [`subshells`]: SubshellModel::subshells
    fn coefficient(&self, idx: usize, t: f64) -> C64;

    /// All coefficients at time `t`, in [`subshells`] order.
    ///
    /// [`subshells`]: SubshellModel::subshells
    fn coefficients(&self, t: f64) -> Vec<C64> {
        (0..self.subshells().len()).map(|i| self.coefficient(i, t)).collect()
    }
}

/// Closed-form walk coefficient of the Hamming graph `H(n, m)` at distance
/// `d` from the reference (adjacency walk `e^{-itA}`).
pub fn hamming_coefficient(n: usize, m: usize, d: usize, t: f64) -> C64 {
    assert!(d <= n, "distance {d} exceeds n = {n}");
    let mf = m as f64;
    let e = (I * t * mf).exp();
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let pref = (-I * t * (n as f64) * (mf - 1.0)).exp() * (sign / mf.powi(n as i32));
    pref * (e - 1.0).powi(d as i32) * (1.0 + (mf - 1.0) * e).powi((n - d) as i32)
}

/// Closed-form subshell model of `H(n, m)`: one subshell per distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HammingModel {
    /// Number of registers.
    pub n: usize,
    /// Register dimension.
    pub m: usize,
}

impl HammingModel {
    /// Model of `H(n, m)`; needs `n, m >= 1`.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(QvaError::invalid("Hamming model needs n, m >= 1"));
        }
        Ok(Self { n, m })
    }

    /// Shell size `C(n, d) (m - 1)^d`.
    pub fn shell_size(&self, d: usize) -> f64 {
        let mut c = 1.0;
        for i in 0..d {
            c = c * (self.n - i) as f64 / (i + 1) as f64;
        }
        c * ((self.m - 1) as f64).powi(d as i32)
    }
}

impl SubshellModel for HammingModel {
    fn num_vertices(&self) -> f64 {
        (self.m as f64).powi(self.n as i32)
    }

    fn subshells(&self) -> Vec<(usize, usize, f64)> {
        (0..=self.n)
            .filter(|&d| self.m > 1 || d == 0)
            .map(|d| (d, 0, self.shell_size(d)))
            .collect()
    }

    fn coefficient(&self, idx: usize, t: f64) -> C64 {
        hamming_coefficient(self.n, self.m, idx, t)
    }
}

/// Numeric subshell model of an explicit graph: the adjacency walk is
/// diagonalised once and subshells are detected by walk-column fingerprints.
#[derive(Debug, Clone)]
pub struct DenseModel {
    walk: DenseWalk,
    partition: ShellPartition,
}

impl DenseModel {
    /// Diagonalise `graph` and partition its shells around `reference`.
    pub fn new(graph: &SparseGraph, reference: usize, params: &FingerprintParams) -> Result<Self> {
        let n = graph.num_vertices();
        if n > DENSE_LIMIT {
            return Err(QvaError::TooLarge {
                size: n,
                limit: DENSE_LIMIT,
            });
        }
        if reference >= n {
            return Err(QvaError::OutOfRange {
                index: reference.to_string(),
                limit: n.to_string(),
            });
        }
        let walk = DenseWalk::new(&graph.dense_adjacency())?;
        let partition = subshell_partition(graph, &walk, reference, params);
        Ok(Self { walk, partition })
    }

    /// The diagonalised adjacency walk.
    pub fn walk(&self) -> &DenseWalk {
        &self.walk
    }

    /// The shell/subshell partition.
    pub fn partition(&self) -> &ShellPartition {
        &self.partition
    }

    /// Reference vertex.
    pub fn reference(&self) -> usize {
        self.partition.reference
    }

    /// `<v| e^{-itA} |ref>`, in `O(|V|)`.
    pub fn entry(&self, v: usize, t: f64) -> C64 {
        let vecs = self.walk.eigenvectors();
        let r = self.partition.reference;
        self.walk
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(k, &l)| (-I * t * l).exp() * (vecs[(v, k)] * vecs[(r, k)]))
            .sum()
    }
}

impl SubshellModel for DenseModel {
    fn num_vertices(&self) -> f64 {
        self.walk.dim() as f64
    }

    fn subshells(&self) -> Vec<(usize, usize, f64)> {
        self.partition
            .subshells
            .iter()
            .map(|(d, k, v)| (*d, *k, v.len() as f64))
            .collect()
    }

    fn coefficient(&self, idx: usize, t: f64) -> C64 {
        self.entry(self.partition.subshells[idx].2[0], t)
    }
}

/// One subshell's coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubshellEntry {
    /// Distance from the reference.
    pub d: usize,
    /// Subshell index within the shell.
    pub k: usize,
    /// Number of vertices in the subshell.
    pub size: f64,
    /// Coefficient `w_{d,k}(t)`.
    pub w: C64,
}

/// All subshell coefficients at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SubshellCoefficients {
    /// Walk time.
    pub t: f64,
    /// Per-subshell coefficients.
    pub entries: Vec<SubshellEntry>,
}

impl SubshellCoefficients {
    /// `|1 - sum size |w|^2|`, zero for a column of a unitary.
    pub fn unitarity_defect(&self) -> f64 {
        (1.0 - self.entries.iter().map(|e| e.size * e.w.norm_sqr()).sum::<f64>()).abs()
    }
}

/// Coefficients of any model at time `t`.
pub fn model_coefficients(model: &dyn SubshellModel, t: f64) -> SubshellCoefficients {
    let ws = model.coefficients(t);
    let entries = model
        .subshells()
        .into_iter()
        .zip(ws)
        .map(|((d, k, size), w)| SubshellEntry { d, k, size, w })
        .collect();
    SubshellCoefficients { t, entries }
}

/// Read `w_{d,k}(t)` off the walk column, checking that the column is
/// constant (to `1e-10`) on every subshell.
pub fn subshell_coefficients(model: &DenseModel, t: f64) -> Result<SubshellCoefficients> {
    let column = model.walk.column(t, model.reference());
    let mut entries = Vec::with_capacity(model.partition.subshells.len());
    for (d, k, verts) in &model.partition.subshells {
        let w = column[verts[0]];
        if let Some(&bad) = verts.iter().find(|&&v| (column[v] - w).norm() > 1e-10) {
            return Err(QvaError::numerical(format!(
                "walk column not constant on subshell ({d},{k}): vertex {bad} differs at t = {t}"
            )));
        }
        entries.push(SubshellEntry {
            d: *d,
            k: *k,
            size: verts.len() as f64,
            w,
        });
    }
    Ok(SubshellCoefficients { t, entries })
}

// ============================================================================
// Convergence potential
// ============================================================================

/// Population-weighted coefficient sum `F(t) = sum |N_{d,k}| |w_{d,k}(t)|`.
pub fn population_weighted_sum(model: &dyn SubshellModel, t: f64) -> f64 {
    model
        .subshells()
        .iter()
        .zip(model.coefficients(t))
        .map(|((_, _, size), w)| size * w.norm())
        .sum()
}

/// The walk time `t*` in `(0, 2 pi]` maximising [`population_weighted_sum`],
/// together with the maximum.
pub fn optimal_walk_time(model: &dyn SubshellModel) -> (f64, f64) {
    grid_argmax(|t| population_weighted_sum(model, t), 0.0, TAU, TIME_GRID)
}

/// Convergence potential of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePotential {
    /// Optimal walk time.
    pub t_star: f64,
    /// `F(t*)`.
    pub weighted_sum: f64,
    /// `Prob* = F(t*)^2 / |V|`: the target probability when every subshell
    /// contribution is phase-aligned by the phase-optimal costs.
    pub prob: f64,
}

/// Compute the convergence potential of a model.
pub fn convergence_potential(model: &dyn SubshellModel) -> ConvergencePotential {
    let (t_star, weighted_sum) = optimal_walk_time(model);
    ConvergencePotential {
        t_star,
        weighted_sum,
        prob: weighted_sum * weighted_sum / model.num_vertices(),
    }
}

/// Phase-optimal costs `q*_{d,k} = Arg w_{d,k}(t)`: under the phase
/// separator `e^{-i q}` every subshell contribution becomes real and
/// positive.
pub fn phase_optimal_costs(model: &dyn SubshellModel, t: f64) -> Vec<f64> {
    model.coefficients(t).iter().map(|w| w.arg()).collect()
}

// ============================================================================
// Hamming scaling
// ============================================================================

/// Amplification of `H(n, m)` at its convergence potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplification {
    /// `Prob*(n, m)`.
    pub prob_star: f64,
    /// `m^n Prob*(n, m)`.
    pub amplification: f64,
    /// `(9 - 24/m + 16/m^2)^n`, reported for `m >= 4`.
    pub closed_form: Option<f64>,
}

/// Amplification `|S| Prob*` of the Hamming graph `H(n, m)`.
pub fn amplification(n: usize, m: usize) -> Result<Amplification> {
    let model = HammingModel::new(n, m)?;
    let cp = convergence_potential(&model);
    let mf = m as f64;
    Ok(Amplification {
        prob_star: cp.prob,
        amplification: model.num_vertices() * cp.prob,
        closed_form: (m >= 4).then(|| (9.0 - 24.0 / mf + 16.0 / (mf * mf)).powi(n as i32)),
    })
}

// ============================================================================
// Variance-adjusted convergence
// ============================================================================

/// Circular distance between two phases, in `[0, pi]`.
pub fn phase_discrepancy(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Settings for [`variance_adjusted_convergence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VarianceOptions {
    /// Random Nelder–Mead starts in `(t, gamma)` (one more start is always
    /// placed at `(t*, 1)`).
    pub starts: usize,
    /// Local optimiser settings.
    pub nm: NmOptions,
}

impl Default for VarianceOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            nm: NmOptions::default(),
        }
    }
}

/// Outcome of one variance-adjusted experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceAdjusted {
    /// Perturbation variance.
    pub sigma2: f64,
    /// Seed of the perturbation and the optimiser starts.
    pub seed: u64,
    /// Best target probability found.
    pub prob: f64,
    /// Mean phase discrepancy over subshells with `d > 0` at the optimum.
    pub phi: f64,
    /// Optimal walk time.
    pub t: f64,
    /// Optimal phase-separator angle.
    pub gamma: f64,
}

/// Perturb the phase-optimal costs by independent uniform noise of variance
/// `sigma2`, then maximise the target probability
/// `|<ref| e^{-itA} e^{-i gamma Q} |+>|^2` over `(t, gamma)`.
pub fn variance_adjusted_convergence(
    model: &DenseModel,
    sigma2: f64,
    seed: u64,
    opts: &VarianceOptions,
) -> Result<VarianceAdjusted> {
    if !(sigma2 >= 0.0) {
        return Err(QvaError::invalid("variance must be non-negative"));
    }
    let n = model.walk.dim();
    let cp = convergence_potential(model);
    let qstar = phase_optimal_costs(model, cp.t_star);
    let half = (12.0 * sigma2).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = vec![0.0; n];
    let mut label = vec![0usize; n];
    for (idx, (_, _, verts)) in model.partition.subshells.iter().enumerate() {
        for &v in verts {
            label[v] = idx;
        }
    }
    for (v, qv) in q.iter_mut().enumerate() {
        let z = if half > 0.0 { rng.random_range(-half..half) } else { 0.0 };
        *qv = qstar[label[v]] + z;
    }

    let vecs = model.walk.eigenvectors();
    let vals = model.walk.eigenvalues();
    let r = model.reference();
    let norm = 1.0 / n as f64;
    let prob = |t: f64, gamma: f64| -> f64 {
        let phases: Vec<C64> = q.iter().map(|&qv| (-I * gamma * qv).exp()).collect();
        let mut amp = C64::new(0.0, 0.0);
        for j in 0..n {
            let col = vecs.column(j);
            let a: C64 = col.iter().zip(&phases).map(|(&x, &p)| p * x).sum();
            amp += a * vecs[(r, j)] * (-I * t * vals[j]).exp();
        }
        amp.norm_sqr() * norm
    };

    let mut best = (prob(cp.t_star, 1.0), cp.t_star, 1.0);
    let mut starts = vec![vec![cp.t_star, 1.0]];
    for s in 0..opts.starts {
        let mut srng = repeat_rng(seed, s as u64 + 1);
        starts.push(vec![TAU * (1.0 - srng.random::<f64>()), srng.random_range(0.0..TAU)]);
    }
    for x0 in &starts {
        let res = nelder_mead(|x| -prob(x[0], x[1]), x0, &opts.nm)?;
        if -res.fx > best.0 {
            best = (-res.fx, res.x[0], res.x[1]);
        }
    }
    let (p, t, gamma) = best;

    let column = model.walk.column(t, r);
    let phase = |v: usize| column[v].arg() - gamma * q[v];
    let ref_phase = phase(r);
    let mut per_subshell = Vec::new();
    for (d, _, verts) in &model.partition.subshells {
        if *d == 0 {
            continue;
        }
        let mean = verts
            .iter()
            .map(|&v| phase_discrepancy(phase(v), ref_phase))
            .sum::<f64>()
            / verts.len() as f64;
        per_subshell.push(mean);
    }
    let phi = if per_subshell.is_empty() {
        0.0
    } else {
        per_subshell.iter().sum::<f64>() / per_subshell.len() as f64
    };
    Ok(VarianceAdjusted {
        sigma2,
        seed,
        prob: p,
        phi,
        t: t.rem_euclid(TAU),
        gamma: gamma.rem_euclid(TAU),
    })
}

/// Run [`variance_adjusted_convergence`] for every `(sigma2, seed)` pair,
/// in parallel. Results are ordered by `sigma2` then seed.
pub fn variance_sweep(
    model: &DenseModel,
    sigma2s: &[f64],
    seeds: &[u64],
    opts: &VarianceOptions,
) -> Result<Vec<VarianceAdjusted>> {
    let tasks: Vec<(f64, u64)> = sigma2s
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    tasks
        .par_iter()
        .map(|&(s, seed)| variance_adjusted_convergence(model, s, seed, opts))
        .collect()
}

// ============================================================================
// Mean shell variance
// ============================================================================

/// How the MSV sum over reference solutions is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum MsvMode {
    /// Every solution is a reference.
    #[default]
    Exact,
    /// `k` references drawn uniformly without replacement; the sum is
    /// rescaled by `|S| / k`.
    Sampled {
        /// Number of references.
        k: usize,
        /// Sampling seed.
        seed: u64,
    },
}

/// Per-shell and mean shell variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsvResult {
    /// `|N_d|` (mean over references for non-regular shells).
    pub shell_sizes: Vec<f64>,
    /// `sigma_d = (1/|N_d|) sum_s Var(C(N_d(s)))`.
    pub shell_variance: Vec<f64>,
    /// Mean of `shell_variance` over all distances `d = 0..=D`.
    pub msv: f64,
    /// Number of reference solutions actually evaluated.
    pub references: usize,
}

fn finish_msv(shell_sizes: Vec<f64>, var_sums: Vec<f64>, scale: f64, references: usize) -> MsvResult {
    let shell_variance: Vec<f64> = var_sums
        .iter()
        .zip(&shell_sizes)
        .map(|(v, s)| if *s > 0.0 { scale * v / s } else { 0.0 })
        .collect();
    let msv = shell_variance.iter().sum::<f64>() / shell_variance.len() as f64;
    MsvResult {
        shell_sizes,
        shell_variance,
        msv,
        references,
    }
}

fn population_variance(sum: f64, sum_sq: f64, count: f64) -> f64 {
    if count <= 1.0 {
        return 0.0;
    }
    let mean = sum / count;
    (sum_sq / count - mean * mean).max(0.0)
}

fn sampled_references(total: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > total {
        return Err(QvaError::invalid(format!(
            "sample size {k} must lie in 1..={total}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut refs = sample(&mut rng, total, k).into_vec();
    refs.sort_unstable();
    Ok(refs)
}

/// MSV of `costs` (indexed in mixed radix, register 0 most significant) on
/// the Hamming graph `H(n, m)`.
///
/// Exact mode sums costs and squared costs over every shell of every
/// solution with an `O(n^2 m^n)` coordinatewise transform; sampled mode
/// measures distances directly from each sampled reference.
pub fn msv_hamming(costs: &[f64], n: usize, m: usize, mode: &MsvMode) -> Result<MsvResult> {
    let model = HammingModel::new(n, m)?;
    let total = m
        .checked_pow(n as u32)
        .ok_or_else(|| QvaError::invalid("Hamming graph too large"))?;
    if costs.len() != total {
        return Err(QvaError::LengthMismatch {
            expected: total,
            found: costs.len(),
        });
    }
    let sizes: Vec<f64> = (0..=n).map(|d| model.shell_size(d)).collect();
    match *mode {
        MsvMode::Exact => {
            let s1 = shell_sums(costs, n, m);
            let sq: Vec<f64> = costs.iter().map(|c| c * c).collect();
            let s2 = shell_sums(&sq, n, m);
            let var_sums: Vec<f64> = (0..=n)
                .map(|d| {
                    (0..total)
                        .map(|s| population_variance(s1[d][s], s2[d][s], sizes[d]))
                        .sum()
                })
                .collect();
            Ok(finish_msv(sizes, var_sums, 1.0, total))
        }
        MsvMode::Sampled { k, seed } => {
            let refs = sampled_references(total, k, seed)?;
            let digits = |mut s: usize| -> Vec<usize> {
                let mut out = vec![0; n];
                for slot in out.iter_mut().rev() {
                    *slot = s % m;
                    s /= m;
                }
                out
            };
            let all: Vec<Vec<usize>> = (0..total).map(digits).collect();
            let per_ref: Vec<Vec<f64>> = refs
                .par_iter()
                .map(|&r| {
                    let mut sum = vec![0.0; n + 1];
                    let mut sum_sq = vec![0.0; n + 1];
                    for (s, ds) in all.iter().enumerate() {
                        let d = ds.iter().zip(&all[r]).filter(|(a, b)| a != b).count();
                        sum[d] += costs[s];
                        sum_sq[d] += costs[s] * costs[s];
                    }
                    (0..=n)
                        .map(|d| population_variance(sum[d], sum_sq[d], sizes[d]))
                        .collect()
                })
                .collect();
            let var_sums = (0..=n).map(|d| per_ref.iter().map(|v| v[d]).sum()).collect();
            Ok(finish_msv(sizes, var_sums, total as f64 / k as f64, k))
        }
    }
}

/// `out[d][s] = sum of f(s')` over all `s'` at Hamming distance exactly `d`
/// from `s`, built one register at a time: after folding in a register,
/// `G'_d = G_d + R_{d-1} - G_{d-1}` where `R` sums `G` over that register's
/// values.
fn shell_sums(f: &[f64], n: usize, m: usize) -> Vec<Vec<f64>> {
    let total = f.len();
    let mut g = vec![vec![0.0; total]; n + 1];
    g[0].copy_from_slice(f);
    let mut stride = total;
    for axis in 0..n {
        stride /= m;
        let block = stride * m;
        for d in (1..=axis + 1).rev() {
            let (lo, hi) = g.split_at_mut(d);
            let prev = &lo[d - 1];
            let cur = &mut hi[0];
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    let r: f64 = (0..m).map(|a| prev[start + a * stride]).sum();
                    for a in 0..m {
                        let idx = start + a * stride;
                        cur[idx] += r - prev[idx];
                    }
                }
            }
        }
    }
    g
}

/// MSV of `costs` on an arbitrary connected graph, with shells found by BFS.
pub fn msv_graph(graph: &SparseGraph, costs: &[f64], mode: &MsvMode) -> Result<MsvResult> {
    let total = graph.num_vertices();
    if costs.len() != total {
        return Err(QvaError::LengthMismatch {
            expected: total,
            found: costs.len(),
        });
    }
    let (refs, scale) = match *mode {
        MsvMode::Exact => ((0..total).collect::<Vec<_>>(), 1.0),
        MsvMode::Sampled { k, seed } => (sampled_references(total, k, seed)?, total as f64 / k as f64),
    };
    // Per reference: (shell sizes, shell variances).
    let per_ref: Vec<(Vec<f64>, Vec<f64>)> = refs
        .par_iter()
        .map(|&r| {
            let dist = graph.bfs(r);
            if dist.contains(&usize::MAX) {
                return Err(QvaError::invalid("MSV needs a connected graph"));
            }
            let diam = dist.iter().copied().max().unwrap_or(0);
            let mut cnt = vec![0.0; diam + 1];
            let mut sum = vec![0.0; diam + 1];
            let mut sum_sq = vec![0.0; diam + 1];
            for (v, &d) in dist.iter().enumerate() {
                cnt[d] += 1.0;
                sum[d] += costs[v];
                sum_sq[d] += costs[v] * costs[v];
            }
            let var = (0..=diam)
                .map(|d| population_variance(sum[d], sum_sq[d], cnt[d]))
                .collect();
            Ok((cnt, var))
        })
        .collect::<Result<_>>()?;
    let depth = per_ref.iter().map(|(c, _)| c.len()).max().unwrap_or(1);
    let mut sizes = vec![0.0; depth];
    let mut var_sums = vec![0.0; depth];
    for (cnt, var) in &per_ref {
        for d in 0..cnt.len() {
            sizes[d] += cnt[d] / refs.len() as f64;
            var_sums[d] += var[d];
        }
    }
    Ok(finish_msv(sizes, var_sums, scale, refs.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::GraphSpec;
    use crate::walks::dense_walk_oracle;
    use std::f64::consts::PI;

    #[test]
    fn hamming_coefficient_limits() {
        assert!((hamming_coefficient(3, 5, 0, 0.0) - 1.0).norm() < 1e-15);
        assert!(hamming_coefficient(3, 5, 2, 0.0).norm() < 1e-15);
    }

    #[test]
    fn hamming_coefficient_matches_oracle() {
        let g = GraphSpec::Hamming { n: 3, m: 5 }.build().unwrap();
        let u = dense_walk_oracle(&g.dense_adjacency(), 0.7).unwrap();
        // Vertex 0 is (0,0,0); vertex 1*5 + 1 = 6 is (0,1,1) at distance 2.
        assert!((u[(6, 0)] - hamming_coefficient(3, 5, 2, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn complete_graph_potential() {
        let cp = convergence_potential(&HammingModel::new(1, 128).unwrap());
        assert!((cp.t_star - PI / 128.0).abs() < 1e-6);
        let m = 128.0f64;
        assert!((cp.prob - (3.0 - 4.0 / m).powi(2) / m).abs() < 1e-9);
    }

    #[test]
    fn dense_model_agrees_with_closed_form() {
        let g = GraphSpec::Hamming { n: 2, m: 3 }.build().unwrap();
        let dm = DenseModel::new(&g, 0, &FingerprintParams::default()).unwrap();
        let coeffs = subshell_coefficients(&dm, 1.3).unwrap();
        assert_eq!(coeffs.entries.len(), 3);
        for e in &coeffs.entries {
            assert!((e.w - hamming_coefficient(2, 3, e.d, 1.3)).norm() < 1e-12);
        }
        assert!(coeffs.unitarity_defect() < 1e-10);
    }

    #[test]
    fn phase_discrepancy_is_circular() {
        assert!(phase_discrepancy(0.1, TAU - 0.1) - 0.2 < 1e-12);
        assert!((phase_discrepancy(0.0, PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn shell_sums_match_brute_force() {
        let (n, m) = (3, 3);
        let f: Vec<f64> = (0..27).map(|i| ((i * 7) % 11) as f64).collect();
        let g = shell_sums(&f, n, m);
        let digits = |mut s: usize| {
            let mut v = vec![0; n];
            for x in v.iter_mut().rev() {
                *x = s % m;
                s /= m;
            }
            v
        };
        for s in 0..27 {
            for d in 0..=n {
                let brute: f64 = (0..27)
                    .filter(|&t| {
                        digits(s).iter().zip(digits(t)).filter(|(a, b)| **a != *b).count() == d
                    })
                    .map(|t| f[t])
                    .sum();
                assert!((g[d][s] - brute).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn msv_modes_agree_on_graph_and_metric() {
        let f: Vec<f64> = (0..64).map(|i| ((i * 13) % 17) as f64).collect();
        let exact = msv_hamming(&f, 3, 4, &MsvMode::Exact).unwrap();
        let g = GraphSpec::Hamming { n: 3, m: 4 }.build().unwrap();
        let bfs = msv_graph(&g, &f, &MsvMode::Exact).unwrap();
        assert!((exact.msv - bfs.msv).abs() < 1e-9);
        let full = msv_hamming(&f, 3, 4, &MsvMode::Sampled { k: 64, seed: 1 }).unwrap();
        assert!((exact.msv - full.msv).abs() < 1e-9);
        assert_eq!(msv_hamming(&[2.0; 64], 3, 4, &MsvMode::Exact).unwrap().msv, 0.0);
    }
}
