//! Mixer graphs: construction, adjacency, and structural quantities
//! (degree, diameter, shells and subshells).
//!
//! Every graph family is described symbolically by a [`GraphSpec`]; the
//! explicit neighbour structure is materialised as a [`SparseGraph`] in
//! compressed-row form, from which dense matrices, BFS layers and walk
//! fingerprints derive.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    multinomial_of, rank_in_multiset_usize, transposition_neighbors, unrank_in_multiset,
};
use crate::error::{QvaError, Result};
use crate::walks::{DenseWalk, C64};

/// Largest vertex count for which explicit dense matrices are built.
pub const DENSE_LIMIT: usize = 4096;

// ============================================================================
// Graph specifications
// ============================================================================

/// How a [`GraphSpec::MoveClosure`] move acts on a pair of qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Exchange the two bits (the `XX + YY` hopping term); a no-op when the
    /// bits are equal.
    Swap,
    /// Flip both bits (`|00> <-> |11>`, `|01> <-> |10>`).
    PairFlip,
}

/// Symbolic description of a mixer graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GraphSpec {
    /// Hamming graph `G(n, m)`: strings of length `n` over `m` symbols,
    /// adjacent at Hamming distance one.
    Hamming { n: usize, m: usize },
    /// Complete graph on `n` vertices.
    Complete { n: usize },
    /// Constrained permutation graph of the multiset with multiplicities
    /// `counts`: permutations adjacent when they differ by one transposition.
    ConstrainedPermutation { counts: Vec<usize> },
    /// Complete multipartite graph with contiguous parts of the given sizes.
    KPartite { sizes: Vec<usize> },
    /// Closure of a seed bitstring (bit `i` = qubit `i`) under two-qubit moves.
    MoveClosure {
        n_qubits: usize,
        seed: u64,
        moves: Vec<(usize, usize)>,
        kind: MoveKind,
    },
}

impl GraphSpec {
    /// All unordered qubit pairs `(i, j)`, `i < j`, over `q` qubits.
    pub fn all_pairs(q: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(q * q.saturating_sub(1) / 2);
        for i in 0..q {
            for j in i + 1..q {
                out.push((i, j));
            }
        }
        out
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            GraphSpec::Hamming { n, m } => format!("hamming({n},{m})"),
            GraphSpec::Complete { n } => format!("complete({n})"),
            GraphSpec::ConstrainedPermutation { counts } => {
                let c: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
                format!("constrained_permutation({})", c.join(","))
            }
            GraphSpec::KPartite { sizes } => {
                let c: Vec<String> = sizes.iter().map(|c| c.to_string()).collect();
                format!("kpartite({})", c.join(","))
            }
            GraphSpec::MoveClosure {
                n_qubits, kind, moves, ..
            } => format!("move_closure({n_qubits},{kind:?},{} moves)", moves.len()),
        }
    }

    /// Validate the spec's invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            GraphSpec::Hamming { n, m } if *n == 0 || *m == 0 => {
                Err(QvaError::invalid("Hamming graph needs n, m >= 1"))
            }
            GraphSpec::Complete { n } if *n == 0 => {
                Err(QvaError::invalid("complete graph needs at least one vertex"))
            }
            GraphSpec::ConstrainedPermutation { counts } if counts.is_empty() => {
                Err(QvaError::invalid("empty multiplicity vector"))
            }
            GraphSpec::KPartite { sizes } if sizes.is_empty() || sizes.contains(&0) => {
                Err(QvaError::invalid("K-partite part sizes must be >= 1"))
            }
            GraphSpec::MoveClosure {
                n_qubits, moves, ..
            } => {
                if *n_qubits == 0 || *n_qubits > 63 {
                    return Err(QvaError::invalid("move closure needs 1..=63 qubits"));
                }
                let mut seen = std::collections::HashSet::new();
                for &(a, b) in moves {
                    if a == b || a >= *n_qubits || b >= *n_qubits {
                        return Err(QvaError::invalid(format!("invalid move ({a},{b})")));
                    }
                    if !seen.insert((a.min(b), a.max(b))) {
                        return Err(QvaError::invalid(format!("duplicate move ({a},{b})")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of vertices (computed without materialising the graph where a
    /// closed form exists).
    pub fn num_vertices(&self) -> Result<usize> {
        self.validate()?;
        Ok(match self {
            GraphSpec::Hamming { n, m } => m
                .checked_pow(*n as u32)
                .ok_or_else(|| QvaError::invalid("Hamming graph too large"))?,
            GraphSpec::Complete { n } => *n,
            GraphSpec::ConstrainedPermutation { counts } => multinomial_of(counts)
                .to_usize()
                .ok_or_else(|| QvaError::invalid("permutation set too large"))?,
            GraphSpec::KPartite { sizes } => sizes.iter().sum(),
            GraphSpec::MoveClosure { .. } => self.build()?.num_vertices(),
        })
    }

    /// Closed-form degree for the regular families (`None` for move closures,
    /// which are measured by BFS instead).
    pub fn degree(&self) -> Option<usize> {
        match self {
            GraphSpec::Hamming { n, m } => Some(n * (m - 1)),
            GraphSpec::Complete { n } => Some(n.saturating_sub(1)),
            GraphSpec::ConstrainedPermutation { counts } => {
                let mut deg = 0;
                for i in 0..counts.len() {
                    for j in 0..i {
                        deg += counts[i] * counts[j];
                    }
                }
                Some(deg)
            }
            GraphSpec::KPartite { sizes } => {
                let total: usize = sizes.iter().sum();
                let first = sizes[0];
                sizes.iter().all(|&s| s == first).then_some(total - first)
            }
            GraphSpec::MoveClosure { .. } => None,
        }
    }

    /// Upper bound `floor(n^2 / M)`, `M = m(m-1)/2`, on the constrained
    /// permutation degree (`None` for other families).
    pub fn degree_bound(&self) -> Option<usize> {
        match self {
            GraphSpec::ConstrainedPermutation { counts } => {
                let n: usize = counts.iter().sum();
                let m = counts.len();
                let pairs = m * (m - 1) / 2;
                (pairs > 0).then(|| n * n / pairs)
            }
            _ => None,
        }
    }

    /// Closed-form diameter where one exists.
    pub fn diameter(&self) -> Option<usize> {
        match self {
            GraphSpec::Hamming { n, m } => Some(if *m > 1 { *n } else { 0 }),
            GraphSpec::Complete { n } => Some(usize::from(*n > 1)),
            GraphSpec::ConstrainedPermutation { counts } => {
                let n: usize = counts.iter().sum();
                counts.iter().map(|&c| n - c).min()
            }
            GraphSpec::KPartite { sizes } => {
                if sizes.len() == 1 {
                    (sizes[0] == 1).then_some(0)
                } else if sizes.iter().all(|&s| s == 1) {
                    Some(1)
                } else {
                    Some(2)
                }
            }
            GraphSpec::MoveClosure { .. } => None,
        }
    }

    /// Materialise the neighbour structure.
    pub fn build(&self) -> Result<SparseGraph> {
        self.validate()?;
        match self {
            GraphSpec::Hamming { n, m } => {
                let radices = vec![*m; *n];
                Ok(SparseGraph::hamming(&radices, *m))
            }
            GraphSpec::Complete { n } => Ok(SparseGraph::from_fn(*n, |v, out| {
                out.extend((0..*n).filter(|&u| u != v));
            })),
            GraphSpec::ConstrainedPermutation { counts } => {
                let size = self.num_vertices()?;
                Ok(SparseGraph::from_fn(size, |v, out| {
                    let s = unrank_in_multiset(&v.into(), counts).expect("v < multinomial");
                    out.extend(
                        transposition_neighbors(&s)
                            .iter()
                            .map(|t| rank_in_multiset_usize(t)),
                    );
                }))
            }
            GraphSpec::KPartite { sizes } => {
                let labels: Vec<usize> = sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
                    .collect();
                let total = labels.len();
                Ok(SparseGraph::from_fn(total, |v, out| {
                    out.extend((0..total).filter(|&u| labels[u] != labels[v]));
                }))
            }
            GraphSpec::MoveClosure {
                n_qubits,
                seed,
                moves,
                kind,
            } => Ok(move_closure(*n_qubits, &[*seed], moves, *kind)?.1),
        }
    }

    /// Dense 0/1 adjacency matrix (errors above `limit` vertices).
    pub fn build_adjacency(&self, limit: usize) -> Result<DMatrix<f64>> {
        let size = self.num_vertices()?;
        if size > limit {
            return Err(QvaError::TooLarge { size, limit });
        }
        Ok(self.build()?.dense_adjacency())
    }
}

/// Closure of `seeds` under `moves` on `n_qubits`-bit basis states.
///
/// Returns the vertex bitstrings in ascending order together with the move
/// graph over them (vertex `i` is `states[i]`).
pub fn move_closure(
    n_qubits: usize,
    seeds: &[u64],
    moves: &[(usize, usize)],
    kind: MoveKind,
) -> Result<(Vec<u64>, SparseGraph)> {
    if n_qubits == 0 || n_qubits > 63 {
        return Err(QvaError::invalid("move closure needs 1..=63 qubits"));
    }
    let apply = |x: u64, (a, b): (usize, usize)| -> Option<u64> {
        let (ba, bb) = ((x >> a) & 1, (x >> b) & 1);
        match kind {
            MoveKind::Swap => (ba != bb).then_some(x ^ (1 << a) ^ (1 << b)),
            MoveKind::PairFlip => Some(x ^ (1 << a) ^ (1 << b)),
        }
    };
    let mut seen: std::collections::HashSet<u64> = seeds.iter().copied().collect();
    let mut queue: VecDeque<u64> = seeds.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for &mv in moves {
            if let Some(y) = apply(x, mv) {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    let mut states: Vec<u64> = seen.into_iter().collect();
    states.sort_unstable();
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let graph = SparseGraph::from_fn(states.len(), |v, out| {
        out.extend(moves.iter().filter_map(|&mv| apply(states[v], mv)).map(|y| index[&y]));
    });
    Ok((states, graph))
}

// ============================================================================
// Sparse graph
// ============================================================================

/// Undirected simple graph in compressed-row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl SparseGraph {
    /// Build from a neighbour oracle `f(v, out)` that appends the neighbours
    /// of `v`. Neighbour lists are sorted and deduplicated; self-loops are
    /// dropped.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, &mut Vec<usize>)) -> Self {
        let mut offsets = Vec::with_capacity(size + 1);
        let mut targets = Vec::new();
        let mut buf = Vec::new();
        offsets.push(0);
        for v in 0..size {
            buf.clear();
            f(v, &mut buf);
            buf.sort_unstable();
            buf.dedup();
            targets.extend(buf.iter().copied().filter(|&u| u != v));
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    /// Hamming-distance-one graph over a mixed-radix register layout, using
    /// only the first `m` symbols of each register (padding states isolated).
    pub fn hamming(radices: &[usize], m: usize) -> Self {
        let size: usize = radices.iter().product();
        let mut strides = vec![1usize; radices.len()];
        for i in (0..radices.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        Self::from_fn(size, |v, out| {
            let digits: Vec<usize> = (0..radices.len())
                .map(|i| (v / strides[i]) % radices[i])
                .collect();
            if digits.iter().any(|&x| x >= m) {
                return;
            }
            for (i, &x) in digits.iter().enumerate() {
                for y in 0..m.min(radices[i]) {
                    if y != x {
                        out.push(v - x * strides[i] + y * strides[i]);
                    }
                }
            }
        })
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    /// Neighbours of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Degree of `v`.
    pub fn degree_of(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Maximum vertex degree.
    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices()).map(|v| self.degree_of(v)).max().unwrap_or(0)
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d0 = self.degree_of(0);
        (0..self.num_vertices())
            .all(|v| self.degree_of(v) == d0)
            .then_some(d0)
    }

    /// Whether every edge appears in both directions.
    pub fn is_symmetric(&self) -> bool {
        (0..self.num_vertices())
            .all(|v| self.neighbors(v).iter().all(|&u| self.neighbors(u).binary_search(&v).is_ok()))
    }

    /// BFS distances from `src` (`usize::MAX` for unreachable vertices).
    pub fn bfs(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Diameter by all-pairs BFS; errors if the graph is disconnected.
    pub fn diameter_bfs(&self) -> Result<usize> {
        use rayon::prelude::*;
        let ecc: Vec<usize> = (0..self.num_vertices())
            .into_par_iter()
            .map(|v| self.bfs(v).into_iter().max().unwrap_or(0))
            .collect();
        let diam = ecc.into_iter().max().unwrap_or(0);
        if diam == usize::MAX {
            return Err(QvaError::invalid("graph is disconnected"));
        }
        Ok(diam)
    }

    /// Connected components as ascending vertex lists, ordered by their
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.num_vertices()];
        let mut comps = Vec::new();
        for s in 0..self.num_vertices() {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut comp = vec![s];
            label[s] = id;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &u in self.neighbors(v) {
                    if label[u] == usize::MAX {
                        label[u] = id;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Dense 0/1 adjacency matrix.
    pub fn dense_adjacency(&self) -> DMatrix<f64> {
        let n = self.num_vertices();
        let mut a = DMatrix::zeros(n, n);
        for v in 0..n {
            for &u in self.neighbors(v) {
                a[(v, u)] = 1.0;
            }
        }
        a
    }

    /// Dense Laplacian `D - A`.
    pub fn dense_laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.dense_adjacency();
        for v in 0..self.num_vertices() {
            l[(v, v)] = self.degree_of(v) as f64;
        }
        l
    }

    /// `out = A x` for a complex vector.
    pub fn matvec(&self, x: &[C64], out: &mut [C64]) {
        for (v, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(v).iter().map(|&u| x[u]).sum();
        }
    }

    /// Write the edge list as CSV, one `u,v` pair (`u < v`) per line.
    pub fn write_edge_list<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "u,v")?;
        for v in 0..self.num_vertices() {
            for &u in self.neighbors(v) {
                if v < u {
                    writeln!(w, "{v},{u}")?;
                }
            }
        }
        Ok(())
    }
}

// ============================================================================
// Shells and subshells
// ============================================================================

/// Distance shells and walk-equivalence subshells relative to a reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellPartition {
    /// Reference vertex.
    pub reference: usize,
    /// `shells[d]` holds the vertices at distance `d`, ascending.
    pub shells: Vec<Vec<usize>>,
    /// `(d, k, vertices)` for every subshell, ordered by `d` then by smallest
    /// vertex.
    pub subshells: Vec<(usize, usize, Vec<usize>)>,
}

impl ShellPartition {
    /// Number of subshells.
    pub fn subshell_count(&self) -> usize {
        self.subshells.len()
    }

    /// Multiset signature `(d, k, size)` of the subshells, sorted.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        let mut sig: Vec<(usize, usize)> =
            self.subshells.iter().map(|(d, _, v)| (*d, v.len())).collect();
        sig.sort_unstable();
        sig
    }
}

/// Parameters of the walk-column fingerprint used to detect subshells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FingerprintParams {
    /// Number of sampled walk times in `(0, pi]`.
    pub samples: usize,
    /// Entry-wise agreement tolerance.
    pub tol: f64,
    /// Seed for the sampled times.
    pub seed: u64,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        Self {
            samples: 7,
            tol: 1e-9,
            seed: 0x5eed,
        }
    }
}

/// BFS layer sizes `|N_d|` around `reference`.
pub fn shell_sizes(graph: &SparseGraph, reference: usize) -> Vec<usize> {
    let dist = graph.bfs(reference);
    let diam = dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    let mut sizes = vec![0; diam + 1];
    for d in dist.into_iter().filter(|&d| d != usize::MAX) {
        sizes[d] += 1;
    }
    sizes
}

/// Partition the shells around `reference` into subshells: vertices whose
/// walk-column entries `<v| e^{-itA} |ref>` agree (within `params.tol`) at
/// every sampled `t` share a subshell.
pub fn subshell_partition(
    graph: &SparseGraph,
    walk: &DenseWalk,
    reference: usize,
    params: &FingerprintParams,
) -> ShellPartition {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let times: Vec<f64> = (0..params.samples)
        // Uniform on (0, pi].
        .map(|_| std::f64::consts::PI * (1.0 - rng.random::<f64>()))
        .collect();
    let columns: Vec<Vec<C64>> = times.iter().map(|&t| walk.column(t, reference)).collect();
    let dist = graph.bfs(reference);
    let diam = dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    let mut shells = vec![Vec::new(); diam + 1];
    for (v, &d) in dist.iter().enumerate() {
        if d != usize::MAX {
            shells[d].push(v);
        }
    }
    let mut subshells = Vec::new();
    for (d, shell) in shells.iter().enumerate() {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in shell {
            let same = |rep: usize| {
                columns
                    .iter()
                    .all(|col| (col[v] - col[rep]).norm() <= params.tol)
            };
            match groups.iter_mut().find(|g| same(g[0])) {
                Some(g) => g.push(v),
                None => groups.push(vec![v]),
            }
        }
        for (k, g) in groups.into_iter().enumerate() {
            subshells.push((d, k, g));
        }
    }
    ShellPartition {
        reference,
        shells,
        subshells,
    }
}
