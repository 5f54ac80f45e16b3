//! Continuous-time quantum walk actions `e^{-itH}` on statevectors.
//!
//! Closed forms are used where they exist (complete, Hamming and K-partite
//! Laplacian walks); other graphs use a matrix-free Chebyshev expansion or an
//! exact eigendecomposition of each connected component. A dense
//! eigendecomposition oracle backs every property test.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{QvaError, Result};
use crate::graphs::SparseGraph;

/// Complex amplitude type.
pub type C64 = Complex<f64>;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

// ============================================================================
// Statevector helpers
// ============================================================================

/// Euclidean norm of a state.
pub fn norm(state: &[C64]) -> f64 {
    state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Largest entry-wise deviation between `a` and `b` after removing the best
/// single global phase from `b`.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let ov = inner(b, a);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Uniform superposition of dimension `dim`.
pub fn uniform_state(dim: usize) -> Vec<C64> {
    vec![C64::new(1.0 / (dim as f64).sqrt(), 0.0); dim]
}

// ============================================================================
// Dense oracle
// ============================================================================

/// Real-symmetric eigendecomposition `H = V diag(lambda) V^T`, reused for
/// walks at many times.
#[derive(Debug, Clone)]
pub struct DenseWalk {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl DenseWalk {
    /// Decompose a symmetric matrix (errors if it is not symmetric).
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        if !h.is_square() {
            return Err(QvaError::invalid("Hamiltonian must be square"));
        }
        let scale = h.amax().max(1.0);
        if (h - h.transpose()).amax() > 1e-12 * scale {
            return Err(QvaError::invalid("Hamiltonian must be symmetric"));
        }
        let eig = SymmetricEigen::new(h.clone());
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// Eigenvector matrix (columns).
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// The full unitary `e^{-itH}`.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let n = self.dim();
        let phases: Vec<C64> = self.values.iter().map(|&l| (-I * t * l).exp()).collect();
        let mut u = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += phases[k] * (self.vectors[(i, k)] * self.vectors[(j, k)]);
                }
                u[(i, j)] = acc;
            }
        }
        u
    }

    /// Column `j` of `e^{-itH}`.
    pub fn column(&self, t: f64, j: usize) -> Vec<C64> {
        let coeffs: Vec<C64> = (0..self.dim())
            .map(|k| (-I * t * self.values[k]).exp() * self.vectors[(j, k)])
            .collect();
        (0..self.dim())
            .map(|i| {
                let row = self.vectors.row(i);
                row.iter().zip(&coeffs).map(|(&v, &c)| c * v).sum()
            })
            .collect()
    }

    /// `e^{-itH} x`.
    pub fn apply(&self, t: f64, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut y = vec![C64::new(0.0, 0.0); n];
        // y_k = e^{-it lambda_k} (V^T x)_k
        for (k, yk) in y.iter_mut().enumerate() {
            let col = self.vectors.column(k);
            let proj: C64 = col.iter().zip(x).map(|(&v, &a)| a * v).sum();
            *yk = proj * (-I * t * self.values[k]).exp();
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, &yk) in y.iter().enumerate() {
            let col = self.vectors.column(k);
            for (o, &v) in out.iter_mut().zip(col.iter()) {
                *o += yk * v;
            }
        }
        out
    }
}

/// `e^{-itH}` of a real-symmetric matrix via eigendecomposition.
pub fn dense_walk_oracle(h: &DMatrix<f64>, t: f64) -> Result<DMatrix<C64>> {
    Ok(DenseWalk::new(h)?.unitary(t))
}

/// Apply a dense complex matrix to a vector.
pub fn apply_dense(u: &DMatrix<C64>, x: &[C64]) -> Vec<C64> {
    (0..u.nrows())
        .map(|i| (0..u.ncols()).map(|j| u[(i, j)] * x[j]).sum())
        .collect()
}

// ============================================================================
// Complete and Hamming mixers
// ============================================================================

fn strides_of(radices: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * radices[i + 1];
    }
    strides
}

/// Walk on the Laplacian of `K_m` over the first `m` basis states of register
/// `reg` in a mixed-radix layout (register 0 most significant). Padding states
/// `>= m` are left untouched.
///
/// On the `m`-dimensional slice, `e^{-itL} = P + e^{-imt}(I - P)` with `P` the
/// projector onto the uniform superposition.
pub fn apply_complete_mixer(state: &mut [C64], radices: &[usize], reg: usize, m: usize, t: f64) {
    let radix = radices[reg];
    let m = m.min(radix);
    if m <= 1 {
        return;
    }
    let stride = strides_of(radices)[reg];
    let block = stride * radix;
    let phase = (-I * (m as f64) * t).exp();
    let mix = (C64::new(1.0, 0.0) - phase) / m as f64;
    for base in (0..state.len()).step_by(block) {
        for inner in 0..stride {
            let start = base + inner;
            let sum: C64 = (0..m).map(|x| state[start + x * stride]).sum();
            let shift = mix * sum;
            for x in 0..m {
                let a = &mut state[start + x * stride];
                *a = phase * *a + shift;
            }
        }
    }
}

/// Walk on the Laplacian of the Hamming graph `G(n, m)`: the complete mixer
/// applied to every register with the same `t`.
pub fn apply_hamming_mixer(state: &mut [C64], radices: &[usize], m: usize, t: f64) {
    for reg in 0..radices.len() {
        apply_complete_mixer(state, radices, reg, m, t);
    }
}

/// Walk on the Laplacian of the complete graph over the whole (indexed)
/// space.
pub fn apply_indexed_complete_mixer(state: &mut [C64], t: f64) {
    let n = state.len();
    apply_complete_mixer(state, &[n], 0, n, t);
}

// ============================================================================
// K-partite mixer
// ============================================================================

/// Exact walk on the Laplacian of the complete multipartite graph with
/// contiguous parts, factorised into a global complete-graph walk and the
/// inverse of the within-part complete-graph walks, each diagonalised by a
/// discrete Fourier transform of matching (arbitrary) size.
pub struct KPartiteMixer {
    sizes: Vec<usize>,
    total: usize,
    global: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
    blocks: Vec<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl std::fmt::Debug for KPartiteMixer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KPartiteMixer").field("sizes", &self.sizes).finish()
    }
}

impl KPartiteMixer {
    /// Plan transforms for the given part sizes.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(QvaError::invalid("K-partite part sizes must be >= 1"));
        }
        let mut planner = FftPlanner::new();
        let total = sizes.iter().sum();
        let global = (planner.plan_fft_forward(total), planner.plan_fft_inverse(total));
        let blocks = sizes
            .iter()
            .map(|&s| (planner.plan_fft_forward(s), planner.plan_fft_inverse(s)))
            .collect();
        Ok(Self {
            sizes: sizes.to_vec(),
            total,
            global,
            blocks,
        })
    }

    /// Part sizes.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Apply `e^{-itL}` in place.
    pub fn apply(&self, state: &mut [C64], t: f64) -> Result<()> {
        if state.len() != self.total {
            return Err(QvaError::LengthMismatch {
                expected: self.total,
                found: state.len(),
            });
        }
        // Within-part factor exp(+it L_blocks): eigenvalue s on non-zero modes.
        let mut start = 0;
        for (&s, (fwd, inv)) in self.sizes.iter().zip(&self.blocks) {
            let slice = &mut state[start..start + s];
            diag_in_fourier(slice, fwd.as_ref(), inv.as_ref(), (I * t * s as f64).exp());
            start += s;
        }
        // Global factor exp(-it L_total): eigenvalue N on non-zero modes.
        let n = self.total as f64;
        diag_in_fourier(
            state,
            self.global.0.as_ref(),
            self.global.1.as_ref(),
            (-I * t * n).exp(),
        );
        Ok(())
    }
}

/// `F^{-1} diag(1, p, p, ..., p) F x` in place.
fn diag_in_fourier(x: &mut [C64], fwd: &dyn Fft<f64>, inv: &dyn Fft<f64>, p: C64) {
    let n = x.len();
    if n <= 1 {
        return;
    }
    fwd.process(x);
    for a in x.iter_mut().skip(1) {
        *a *= p;
    }
    inv.process(x);
    let scale = 1.0 / n as f64;
    for a in x.iter_mut() {
        *a *= scale;
    }
}

/// One-shot K-partite walk (plans transforms on every call).
pub fn apply_kpartite_mixer(state: &mut [C64], sizes: &[usize], t: f64) -> Result<()> {
    KPartiteMixer::new(sizes)?.apply(state, t)
}

// ============================================================================
// Matrix-free Chebyshev action
// ============================================================================

/// Bessel functions `J_0(x) .. J_kmax(x)` by Miller's backward recurrence,
/// normalised with `J_0 + 2 sum_k J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let mut start = kmax + 32 + (ax.sqrt() as usize) * 4;
    if start % 2 == 1 {
        start += 1;
    }
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / ax * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for k in 0..=kmax {
        // J_k(-x) = (-1)^k J_k(x)
        let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        out[k] = sign * vals[k] / norm;
    }
    out
}

/// `e^{-it (scale A)} state` for the adjacency `A` of `graph`, by a truncated
/// Chebyshev expansion with spectral bound `|scale| * max_degree`.
///
/// The truncation order is the smallest beyond the Bessel turning point whose
/// coefficient tail is below `tol`. Returns the order used.
pub fn apply_sparse_mixer(
    state: &mut [C64],
    graph: &SparseGraph,
    scale: f64,
    t: f64,
    tol: f64,
) -> Result<usize> {
    let dim = graph.num_vertices();
    if state.len() != dim {
        return Err(QvaError::LengthMismatch {
            expected: dim,
            found: state.len(),
        });
    }
    let bound = scale.abs() * graph.max_degree() as f64;
    if bound == 0.0 || t == 0.0 {
        return Ok(0);
    }
    let x = t * bound;
    let kmax = (1.5 * x.abs()).ceil() as usize + 64;
    let j = bessel_j_sequence(x, kmax);
    // tail[k] = 2 sum_{i >= k} |J_i|
    let mut order = None;
    let mut tail = 0.0;
    for k in (0..=kmax).rev() {
        tail += 2.0 * j[k].abs();
        if (k as f64) > x.abs() && tail < tol {
            order = Some(k);
        }
    }
    let order = order.ok_or_else(|| {
        QvaError::numerical(format!(
            "Chebyshev expansion did not converge within order {kmax} (x = {x:.3})"
        ))
    })?;
    let h = scale / bound;
    let hv = |v: &[C64], out: &mut [C64]| {
        graph.matvec(v, out);
        for o in out.iter_mut() {
            *o *= h;
        }
    };
    let input_norm = norm(state);
    let mut t_prev = state.to_vec();
    let mut t_cur = vec![C64::new(0.0, 0.0); dim];
    hv(&t_prev, &mut t_cur);
    let mut acc: Vec<C64> = t_prev.iter().map(|a| a * j[0]).collect();
    let mut coeff_phase = C64::new(1.0, 0.0);
    let mut next = vec![C64::new(0.0, 0.0); dim];
    for (k, &jk) in j.iter().enumerate().take(order).skip(1) {
        coeff_phase *= -I;
        let c = coeff_phase * (2.0 * jk);
        for (a, v) in acc.iter_mut().zip(&t_cur) {
            *a += c * v;
        }
        if k + 1 < order {
            hv(&t_cur, &mut next);
            for (nx, pv) in next.iter_mut().zip(&t_prev) {
                *nx = 2.0 * *nx - pv;
            }
            std::mem::swap(&mut t_prev, &mut t_cur);
            std::mem::swap(&mut t_cur, &mut next);
        }
    }
    let out_norm = norm(&acc);
    if !out_norm.is_finite() || (out_norm - input_norm).abs() > 1e-8 * input_norm.max(1.0) {
        return Err(QvaError::numerical(format!(
            "Chebyshev action lost normalisation ({input_norm} -> {out_norm})"
        )));
    }
    state.copy_from_slice(&acc);
    Ok(order)
}

// ============================================================================
// Exact walks by connected component
// ============================================================================

/// Exact `e^{-it (scale A)}` for a graph whose connected components are each
/// small enough for a dense eigendecomposition.
///
/// Only the components that intersect the requested support are decomposed;
/// amplitudes outside them are left untouched.
#[derive(Debug, Clone)]
pub struct ComponentWalk {
    scale: f64,
    dim: usize,
    components: Vec<(Vec<usize>, DenseWalk)>,
}

impl ComponentWalk {
    /// Decompose every component of `graph` containing a vertex of `support`
    /// (all components when `support` is `None`).
    pub fn new(graph: &SparseGraph, scale: f64, support: Option<&[usize]>) -> Result<Self> {
        let mut wanted = vec![support.is_none(); graph.num_vertices()];
        if let Some(s) = support {
            for &v in s {
                wanted[v] = true;
            }
        }
        let mut components = Vec::new();
        for comp in graph.components() {
            if !comp.iter().any(|&v| wanted[v]) || comp.len() == 1 {
                continue;
            }
            if comp.len() > crate::graphs::DENSE_LIMIT {
                return Err(QvaError::TooLarge {
                    size: comp.len(),
                    limit: crate::graphs::DENSE_LIMIT,
                });
            }
            let pos: std::collections::HashMap<usize, usize> =
                comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut h = DMatrix::zeros(comp.len(), comp.len());
            for (i, &v) in comp.iter().enumerate() {
                for u in graph.neighbors(v) {
                    h[(i, pos[u])] = scale;
                }
            }
            components.push((comp, DenseWalk::new(&h)?));
        }
        Ok(Self {
            scale,
            dim: graph.num_vertices(),
            components,
        })
    }

    /// Hamiltonian scale factor.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Apply the walk in place.
    pub fn apply(&self, state: &mut [C64], t: f64) -> Result<()> {
        if state.len() != self.dim {
            return Err(QvaError::LengthMismatch {
                expected: self.dim,
                found: state.len(),
            });
        }
        for (comp, walk) in &self.components {
            let x: Vec<C64> = comp.iter().map(|&v| state[v]).collect();
            let y = walk.apply(t, &x);
            for (&v, a) in comp.iter().zip(y) {
                state[v] = a;
            }
        }
        Ok(())
    }
}

// ============================================================================
// XY pair rotations
// ============================================================================

/// `exp(-it (X_a X_b + Y_a Y_b))` on qubits `a`, `b` of a `q`-qubit register
/// (qubit 0 is the most significant bit). The term couples `|01>` and `|10>`
/// with strength 2.
pub fn apply_xy_pair(state: &mut [C64], q: usize, a: usize, b: usize, t: f64) {
    let ba = 1usize << (q - 1 - a);
    let bb = 1usize << (q - 1 - b);
    let (c, s) = ((2.0 * t).cos(), (2.0 * t).sin());
    let ms = -I * s;
    for idx in 0..state.len() {
        // Visit each |..1..0..> / |..0..1..> pair once, from the side with
        // qubit a set.
        if idx & ba != 0 && idx & bb == 0 {
            let jdx = idx ^ ba ^ bb;
            let (x, y) = (state[idx], state[jdx]);
            state[idx] = c * x + ms * y;
            state[jdx] = ms * x + c * y;
        }
    }
}
