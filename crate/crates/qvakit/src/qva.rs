//! Quantum variational ansätze: initial states, alternating phase-shift and
//! quantum-walk layers, expectation values, approximation ratios and
//! measurement reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{transposition_neighbors, MultisetPartition};
use crate::error::{QvaError, Result};
use crate::graphs::{move_closure, MoveKind, SparseGraph};
use crate::problems::{bits_for, scale_by_mean, PmsInstance, PortfolioInstance};
use crate::walks::{
    apply_hamming_mixer, apply_indexed_complete_mixer, apply_sparse_mixer, apply_xy_pair, norm,
    ComponentWalk, KPartiteMixer, C64, I,
};

/// Truncation tolerance of the Chebyshev sparse mixer.
pub const SPARSE_TOL: f64 = 1e-13;

// ============================================================================
// Configuration
// ============================================================================

/// The supported ansätze.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Binary-encoded QAOA with the hypercube (transverse-field) mixer.
    Qaoa,
    /// Quantum multivariable optimisation: Hamming-graph mixer on `m`-level
    /// registers.
    Qmoa,
    /// Complete-graph walk over the indexed valid space.
    Qwoa,
    /// Constrained-permutation walk within each part followed by a K-partite
    /// walk between parts.
    QwoaCs,
    /// Constrained-permutation walk only (parts never mix).
    QwoaCsDisjoint,
    /// XY mixer on a ring of qubit pairs, even pairs then odd pairs.
    QaoazParity,
    /// XY mixer on all qubit pairs.
    QaoazComplete,
}

impl Algorithm {
    /// Number of variational parameters per layer.
    pub fn params_per_layer(self) -> usize {
        match self {
            Algorithm::QwoaCs => 3,
            _ => 2,
        }
    }

    /// Short lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Qaoa => "qaoa",
            Algorithm::Qmoa => "qmoa",
            Algorithm::Qwoa => "qwoa",
            Algorithm::QwoaCs => "qwoa_cs",
            Algorithm::QwoaCsDisjoint => "qwoa_cs_disjoint",
            Algorithm::QaoazParity => "qaoaz_parity",
            Algorithm::QaoazComplete => "qaoaz_complete",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = QvaError;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Algorithm::Qaoa,
            Algorithm::Qmoa,
            Algorithm::Qwoa,
            Algorithm::QwoaCs,
            Algorithm::QwoaCsDisjoint,
            Algorithm::QaoazParity,
            Algorithm::QaoazComplete,
        ];
        all.into_iter()
            .find(|a| a.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| QvaError::invalid(format!("unknown algorithm '{s}'")))
    }
}

// ============================================================================
// Ansatz
// ============================================================================

enum Mixer {
    Hamming { radices: Vec<usize>, m: usize },
    IndexedComplete,
    ConstrainedPermutation { graph: SparseGraph, kpartite: Option<KPartiteMixer> },
    XyParity { qubits: usize, even: Vec<(usize, usize)>, odd: Vec<(usize, usize)> },
    XyComplete { walk: ComponentWalk },
}

/// How basis-state indices map to problem solutions, for reporting.
#[derive(Debug, Clone)]
pub enum Encoding {
    /// Mixed-radix digits, register 0 most significant.
    Registers(Vec<usize>),
    /// Global index into a multiset partition.
    Indexed(MultisetPartition),
    /// Bitstring on this many qubits, qubit 0 most significant.
    Qubits(usize),
}

impl Encoding {
    /// Human-readable label of basis state `idx`.
    pub fn label(&self, idx: usize) -> String {
        match self {
            Encoding::Registers(radices) => {
                let mut digits = vec![0; radices.len()];
                let mut rest = idx;
                for (d, &r) in digits.iter_mut().zip(radices).rev() {
                    *d = rest % r;
                    rest /= r;
                }
                digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("")
            }
            Encoding::Indexed(p) => p
                .global_unrank_usize(idx)
                .map(|s| s.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(""))
                .unwrap_or_else(|_| format!("#{idx}")),
            Encoding::Qubits(q) => format!("{idx:0width$b}", width = *q),
        }
    }
}

/// A fully assembled ansatz: cost table, initial state and mixer.
pub struct Ansatz {
    algorithm: Algorithm,
    p: usize,
    costs: Vec<f64>,
    valid: Vec<bool>,
    valid_min: f64,
    valid_max: f64,
    initial: Vec<C64>,
    mixer: Mixer,
    support: Option<Vec<bool>>,
    encoding: Encoding,
}

impl std::fmt::Debug for Ansatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ansatz")
            .field("algorithm", &self.algorithm)
            .field("p", &self.p)
            .field("dim", &self.costs.len())
            .finish()
    }
}

fn valid_range(costs: &[f64], valid: &[bool]) -> Result<(f64, f64)> {
    let vals = costs.iter().zip(valid).filter(|(_, &v)| v).map(|(c, _)| *c);
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| (a.min(c), b.max(c)));
    if !lo.is_finite() {
        return Err(QvaError::invalid("cost table has no valid solution"));
    }
    Ok((lo, hi))
}

fn check_layers(p: usize) -> Result<()> {
    if p == 0 {
        return Err(QvaError::invalid("layer count p must be at least 1"));
    }
    Ok(())
}

fn mean_valid(costs: &[f64], valid: &[bool]) -> f64 {
    let (sum, count) = costs
        .iter()
        .zip(valid)
        .filter(|(_, &v)| v)
        .fold((0.0, 0usize), |(s, c), (x, _)| (s + x, c + 1));
    sum / count as f64
}

impl Ansatz {
    /// QMOA or QAOA for a scheduling instance, with costs divided by the mean
    /// valid cost.
    ///
    /// QMOA uses one `m`-level register per job; with `padded` the registers
    /// have `2^ceil(log2 m)` levels, padding states start (and stay) empty.
    /// QAOA uses `ceil(log2 m)` qubits per job with penalised costs on
    /// invalid machine labels.
    pub fn pms(inst: &PmsInstance, algorithm: Algorithm, p: usize, padded: bool) -> Result<Self> {
        inst.validate()?;
        check_layers(p)?;
        let (radix, regs, m) = match algorithm {
            Algorithm::Qmoa if padded => (1usize << bits_for(inst.m), inst.n, inst.m),
            Algorithm::Qmoa => (inst.m, inst.n, inst.m),
            Algorithm::Qaoa => (2, inst.n * bits_for(inst.m), 2),
            other => {
                return Err(QvaError::invalid(format!(
                    "{other} does not apply to scheduling instances"
                )))
            }
        };
        let table_radix = if algorithm == Algorithm::Qaoa {
            1usize << bits_for(inst.m)
        } else {
            radix
        };
        let mut costs = inst.cost_table(table_radix);
        let valid = inst.valid_mask(table_radix);
        let mean = mean_valid(&costs, &valid);
        scale_by_mean(&mut costs, mean);
        let radices = vec![radix; regs];
        let dim = costs.len();
        let mut initial = vec![C64::new(0.0, 0.0); dim];
        let amp = C64::new((m as f64).powi(regs as i32).sqrt().recip(), 0.0);
        for (idx, a) in initial.iter_mut().enumerate() {
            let mut rest = idx;
            let inside = (0..regs).all(|_| {
                let ok = rest % radix < m;
                rest /= radix;
                ok
            });
            if inside {
                *a = amp;
            }
        }
        let encoding = Encoding::Registers(radices.clone());
        Self::assemble(algorithm, p, costs, valid, initial, Mixer::Hamming { radices, m }, None, encoding)
    }

    /// QMOA on an explicit cost table over `n` registers of dimension `m`
    /// (every entry valid, no scaling). With `m = 2` this is exactly the QAOA
    /// of a binary problem.
    pub fn qmoa_from_table(costs: Vec<f64>, n: usize, m: usize, p: usize) -> Result<Self> {
        check_layers(p)?;
        let dim = m
            .checked_pow(n as u32)
            .ok_or_else(|| QvaError::invalid("register space too large"))?;
        if costs.len() != dim {
            return Err(QvaError::LengthMismatch {
                expected: dim,
                found: costs.len(),
            });
        }
        let valid = vec![true; dim];
        let initial = crate::walks::uniform_state(dim);
        let radices = vec![m; n];
        let encoding = Encoding::Registers(radices.clone());
        Self::assemble(Algorithm::Qmoa, p, costs, valid, initial, Mixer::Hamming { radices, m }, None, encoding)
    }

    /// QWOA, QWOA-CS (with or without the inter-part walk) or QAOAz for a
    /// portfolio instance. Costs are used unscaled.
    pub fn portfolio(inst: &PortfolioInstance, algorithm: Algorithm, p: usize) -> Result<Self> {
        inst.validate()?;
        check_layers(p)?;
        match algorithm {
            Algorithm::Qwoa | Algorithm::QwoaCs | Algorithm::QwoaCsDisjoint => {
                let partition = inst.partition()?;
                let costs = inst.valid_costs(&partition)?;
                let dim = costs.len();
                let valid = vec![true; dim];
                let (initial, mixer) = if algorithm == Algorithm::Qwoa {
                    (crate::walks::uniform_state(dim), Mixer::IndexedComplete)
                } else {
                    let sizes = partition.sizes_usize()?;
                    let k = sizes.iter().filter(|&&s| s > 0).count() as f64;
                    let mut initial = Vec::with_capacity(dim);
                    for &s in &sizes {
                        let a = C64::new((k * s as f64).sqrt().recip(), 0.0);
                        initial.extend(std::iter::repeat_n(a, s));
                    }
                    let graph = constrained_permutation_graph(&partition)?;
                    let kpartite = (algorithm == Algorithm::QwoaCs)
                        .then(|| KPartiteMixer::new(&sizes))
                        .transpose()?;
                    (initial, Mixer::ConstrainedPermutation { graph, kpartite })
                };
                Self::assemble(algorithm, p, costs, valid, initial, mixer, None, Encoding::Indexed(partition))
            }
            Algorithm::QaoazParity | Algorithm::QaoazComplete => Self::qaoaz(inst, algorithm, p),
            other => Err(QvaError::invalid(format!(
                "{other} does not apply to portfolio instances"
            ))),
        }
    }

    fn qaoaz(inst: &PortfolioInstance, algorithm: Algorithm, p: usize) -> Result<Self> {
        let table = inst.expand_to_hilbert()?;
        let q = table.qubits;
        let valid: Vec<bool> = table.solution_index.iter().map(Option::is_some).collect();
        let (_, max_valid) = valid_range(&table.costs, &valid)?;
        // States outside the constraint carry the worst valid cost.
        let costs: Vec<f64> = table
            .costs
            .iter()
            .zip(&valid)
            .map(|(&c, &v)| if v { c } else { max_valid })
            .collect();

        // |y>^{|A|} (x) Bell^{n-|A|}, y = |01> (long) for A > 0, |10> (short)
        // otherwise; asset 0 occupies the two most significant qubits.
        let mut pairs: Vec<Vec<(usize, C64)>> = Vec::with_capacity(inst.n);
        let fixed = inst.a.unsigned_abs() as usize;
        let y = if inst.a > 0 { 0b01 } else { 0b10 };
        let bell = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..inst.n {
            if i < fixed {
                pairs.push(vec![(y, C64::new(1.0, 0.0))]);
            } else {
                pairs.push(vec![(0b00, C64::new(bell, 0.0)), (0b11, C64::new(bell, 0.0))]);
            }
        }
        let mut initial = vec![C64::new(0.0, 0.0); 1 << q];
        let mut terms = vec![(0usize, C64::new(1.0, 0.0))];
        for choices in &pairs {
            terms = terms
                .iter()
                .flat_map(|&(idx, a)| choices.iter().map(move |&(bits, b)| ((idx << 2) | bits, a * b)))
                .collect();
        }
        for (idx, a) in &terms {
            initial[*idx] = *a;
        }
        let seeds: Vec<usize> = terms.iter().map(|(idx, _)| *idx).collect();

        let pairs_used: Vec<(usize, usize)> = match algorithm {
            Algorithm::QaoazComplete => crate::graphs::GraphSpec::all_pairs(q),
            _ => (0..q).map(|a| (a, (a + 1) % q)).collect(),
        };
        // Closure support for leakage checks; bit positions count from the
        // least significant bit there.
        let lsb_moves: Vec<(usize, usize)> =
            pairs_used.iter().map(|&(a, b)| (q - 1 - a, q - 1 - b)).collect();
        let seed_states: Vec<u64> = seeds.iter().map(|&s| s as u64).collect();
        let (closure, _) = move_closure(q, &seed_states, &lsb_moves, MoveKind::Swap)?;
        let mut support = vec![false; 1 << q];
        for s in closure {
            support[s as usize] = true;
        }

        let mixer = match algorithm {
            Algorithm::QaoazComplete => {
                let graph = SparseGraph::from_fn(1 << q, |v, out| {
                    for &(a, b) in &pairs_used {
                        let (ba, bb) = (1usize << (q - 1 - a), 1usize << (q - 1 - b));
                        if (v & ba != 0) != (v & bb != 0) {
                            out.push(v ^ ba ^ bb);
                        }
                    }
                });
                // X_a X_b + Y_a Y_b couples |01> and |10> with strength 2.
                Mixer::XyComplete {
                    walk: ComponentWalk::new(&graph, 2.0, Some(&seeds))?,
                }
            }
            _ => {
                let even = pairs_used.iter().copied().step_by(2).collect();
                let odd = pairs_used.iter().copied().skip(1).step_by(2).collect();
                Mixer::XyParity { qubits: q, even, odd }
            }
        };
        Self::assemble(algorithm, p, costs, valid, initial, mixer, Some(support), Encoding::Qubits(q))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        algorithm: Algorithm,
        p: usize,
        costs: Vec<f64>,
        valid: Vec<bool>,
        initial: Vec<C64>,
        mixer: Mixer,
        support: Option<Vec<bool>>,
        encoding: Encoding,
    ) -> Result<Self> {
        let (valid_min, valid_max) = valid_range(&costs, &valid)?;
        Ok(Self {
            algorithm,
            p,
            costs,
            valid,
            valid_min,
            valid_max,
            initial,
            mixer,
            support,
            encoding,
        })
    }

    /// Divide the phase-separator eigenvalues by the mean magnitude of the
    /// valid costs (the mean itself when all valid costs are positive).
    /// Approximation ratios and optima are unchanged.
    pub fn scale_costs_by_mean(&mut self) -> Result<()> {
        let (sum, count) = self
            .costs
            .iter()
            .zip(&self.valid)
            .filter(|(_, &v)| v)
            .fold((0.0, 0usize), |(s, k), (c, _)| (s + c.abs(), k + 1));
        let scale = sum / count as f64;
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(QvaError::numerical("cannot scale an all-zero cost table"));
        }
        self.costs.iter_mut().for_each(|c| *c /= scale);
        (self.valid_min, self.valid_max) = valid_range(&self.costs, &self.valid)?;
        Ok(())
    }

    /// The algorithm.
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    /// Layer count.
    pub fn layers(&self) -> usize {
        self.p
    }

    /// Change the layer count.
    pub fn set_layers(&mut self, p: usize) -> Result<()> {
        check_layers(p)?;
        self.p = p;
        Ok(())
    }

    /// Length of the flat parameter vector, `p * params_per_layer`.
    pub fn num_params(&self) -> usize {
        self.p * self.algorithm.params_per_layer()
    }

    /// Statevector dimension.
    pub fn dim(&self) -> usize {
        self.costs.len()
    }

    /// Phase-separator eigenvalues (the possibly rescaled cost table).
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// Validity of every basis state.
    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    /// Minimum and maximum cost over valid states.
    pub fn valid_range(&self) -> (f64, f64) {
        (self.valid_min, self.valid_max)
    }

    /// Basis-state encoding.
    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    /// Initial state.
    pub fn initial_state(&self) -> &[C64] {
        &self.initial
    }

    /// Allowed support for constraint-preserving mixers (QAOAz only).
    pub fn support(&self) -> Option<&[bool]> {
        self.support.as_deref()
    }

    /// Apply one mixer layer with times `ts` (`[t]`, or `[t0, t1]` for
    /// QWOA-CS).
    pub fn apply_mixer(&self, state: &mut [C64], ts: &[f64]) -> Result<()> {
        match &self.mixer {
            Mixer::Hamming { radices, m } => apply_hamming_mixer(state, radices, *m, ts[0]),
            Mixer::IndexedComplete => apply_indexed_complete_mixer(state, ts[0]),
            Mixer::ConstrainedPermutation { graph, kpartite } => {
                apply_sparse_mixer(state, graph, 1.0, ts[0], SPARSE_TOL)?;
                // A zero inter-part time is skipped so that the evolution is
                // bit-identical to the disjoint variant.
                if let Some(k) = kpartite {
                    if ts[1] != 0.0 {
                        k.apply(state, ts[1])?;
                    }
                }
            }
            Mixer::XyParity { qubits, even, odd } => {
                for &(a, b) in even.iter().chain(odd) {
                    apply_xy_pair(state, *qubits, a, b, ts[0]);
                }
            }
            Mixer::XyComplete { walk } => walk.apply(state, ts[0])?,
        }
        Ok(())
    }

    /// Multiply by `e^{-i gamma q_s}`.
    pub fn apply_phase(&self, state: &mut [C64], gamma: f64) {
        for (a, &c) in state.iter_mut().zip(&self.costs) {
            *a *= (-I * gamma * c).exp();
        }
    }

    /// `prod_i U_M(t_i) e^{-i gamma_i Q} |psi_0>` for the flat parameter
    /// vector `theta`, grouped by layer as `(gamma, t...)`.
    pub fn evolve(&self, theta: &[f64]) -> Result<Vec<C64>> {
        if theta.len() != self.num_params() {
            return Err(QvaError::LengthMismatch {
                expected: self.num_params(),
                found: theta.len(),
            });
        }
        let mut state = self.initial.clone();
        for layer in theta.chunks(self.algorithm.params_per_layer()) {
            self.apply_phase(&mut state, layer[0]);
            self.apply_mixer(&mut state, &layer[1..])?;
        }
        Ok(state)
    }

    /// `<theta| Q |theta>` for the ansatz cost table.
    pub fn objective(&self, theta: &[f64]) -> Result<f64> {
        expectation(&self.evolve(theta)?, &self.costs)
    }

    /// Approximation ratio of an expectation value against the valid range.
    pub fn ratio(&self, expectation: f64) -> Result<f64> {
        approximation_ratio(expectation, self.valid_min, self.valid_max)
    }

    /// Probability of measuring a valid state of minimum cost.
    pub fn optimum_probability(&self, state: &[C64]) -> f64 {
        let tol = 1e-12 * self.valid_min.abs().max(1.0);
        state
            .iter()
            .zip(&self.costs)
            .zip(&self.valid)
            .filter(|((_, &c), &v)| v && c <= self.valid_min + tol)
            .map(|((a, _), _)| a.norm_sqr())
            .sum()
    }

    /// Probability outside the allowed support (zero when unconstrained).
    pub fn leakage(&self, state: &[C64]) -> f64 {
        match &self.support {
            Some(s) => state
                .iter()
                .zip(s)
                .filter(|(_, &ok)| !ok)
                .map(|(a, _)| a.norm_sqr())
                .sum(),
            None => 0.0,
        }
    }
}

/// Adjacency of the constrained-permutation graph on the indexed space of
/// `partition`: solutions are adjacent when they differ by one transposition
/// of unequal symbols.
pub fn constrained_permutation_graph(partition: &MultisetPartition) -> Result<SparseGraph> {
    let total = partition.total_usize()?;
    let solutions = (0..total)
        .map(|i| partition.global_unrank_usize(i))
        .collect::<Result<Vec<_>>>()?;
    let neighbors = solutions
        .iter()
        .map(|s| {
            transposition_neighbors(s)
                .iter()
                .map(|x| partition.global_rank_usize(x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseGraph::from_fn(total, |v, out| out.extend(&neighbors[v])))
}

// ============================================================================
// Observables and reports
// ============================================================================

/// `sum |a_s|^2 q_s`.
pub fn expectation(state: &[C64], costs: &[f64]) -> Result<f64> {
    if state.len() != costs.len() {
        return Err(QvaError::LengthMismatch {
            expected: costs.len(),
            found: state.len(),
        });
    }
    Ok(state.iter().zip(costs).map(|(a, c)| a.norm_sqr() * c).sum())
}

/// `(<Q> - max) / (min - max)`: 1 at the minimum, 0 at the maximum.
pub fn approximation_ratio(expectation: f64, min: f64, max: f64) -> Result<f64> {
    if max == min {
        return Err(QvaError::invalid("approximation ratio undefined for a constant cost table"));
    }
    Ok((expectation - max) / (min - max))
}

/// One line of a measurement report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    /// Basis-state index.
    pub index: usize,
    /// Measurement probability.
    pub probability: f64,
    /// Cost of the state.
    pub cost: f64,
    /// Phase relative to the most probable state, in `(-pi, pi]`.
    pub phase: f64,
}

fn wrap_phase(x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let r = (x + pi).rem_euclid(2.0 * pi) - pi;
    if r <= -pi {
        r + 2.0 * pi
    } else {
        r
    }
}

fn reference_phase(state: &[C64]) -> f64 {
    state
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.norm_sqr().total_cmp(&b.norm_sqr()).then(j.cmp(i)))
        .map(|(_, a)| a.arg())
        .unwrap_or(0.0)
}

/// The `k` most probable states, sorted by descending probability, with
/// phases relative to the most probable state.
pub fn measurement_report(state: &[C64], costs: &[f64], k: usize) -> Result<Vec<ReportEntry>> {
    if k == 0 {
        return Err(QvaError::invalid("report size k must be at least 1"));
    }
    if state.len() != costs.len() {
        return Err(QvaError::LengthMismatch {
            expected: costs.len(),
            found: state.len(),
        });
    }
    let ref_phase = reference_phase(state);
    let mut order: Vec<usize> = (0..state.len()).filter(|&i| state[i].norm_sqr() > 0.0).collect();
    order.sort_by(|&a, &b| state[b].norm_sqr().total_cmp(&state[a].norm_sqr()).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(k)
        .map(|i| ReportEntry {
            index: i,
            probability: state[i].norm_sqr(),
            cost: costs[i],
            phase: wrap_phase(state[i].arg() - ref_phase),
        })
        .collect())
}

/// Write a statevector as CSV: `index,real,imag,probability,cost,phase`.
pub fn write_state_csv<W: Write>(w: W, state: &[C64], costs: &[f64]) -> Result<()> {
    if state.len() != costs.len() {
        return Err(QvaError::LengthMismatch {
            expected: costs.len(),
            found: state.len(),
        });
    }
    let ref_phase = reference_phase(state);
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["index", "real", "imag", "probability", "cost", "phase"])?;
    for (i, (a, c)) in state.iter().zip(costs).enumerate() {
        wr.write_record(&[
            i.to_string(),
            a.re.to_string(),
            a.im.to_string(),
            a.norm_sqr().to_string(),
            c.to_string(),
            wrap_phase(a.arg() - ref_phase).to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

/// Norm deviation `| ||psi|| - 1 |`.
pub fn norm_defect(state: &[C64]) -> f64 {
    (norm(state) - 1.0).abs()
}
