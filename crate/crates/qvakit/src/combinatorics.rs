//! Exact combinatorial machinery: Hamming distance, multinomials, multiset
//! enumeration, lexicographic ranking/unranking of multiset permutations and
//! transposition-neighbour generation.
//!
//! Solutions are vectors of alphabet indices `s = (s_0, ..., s_{n-1})` with
//! every `s_i < m`. The alphabet order is the order in which symbols are
//! declared by the problem; ranking is lexicographic under that order.
//! All counting is done with arbitrary-precision integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{QvaError, Result};

/// A solution: one alphabet index per combinatorial variable.
pub type Solution = Vec<usize>;

// ============================================================================
// Elementary counting
// ============================================================================

/// Number of positions in which `a` and `b` differ.
pub fn hamming_distance(a: &[usize], b: &[usize]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(QvaError::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Exact factorial `n!`.
pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Exact binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step.
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Multinomial coefficient `n! / prod(counts_i!)`: the number of distinct
/// permutations of a multiset with the given multiplicities.
pub fn multinomial(n: usize, counts: &[usize]) -> Result<BigUint> {
    let total: usize = counts.iter().sum();
    if total != n {
        return Err(QvaError::invalid(format!(
            "multiplicities sum to {total}, expected {n}"
        )));
    }
    Ok(multinomial_of(counts))
}

/// Multinomial coefficient of `counts`, with `n` taken as their sum.
pub fn multinomial_of(counts: &[usize]) -> BigUint {
    // Product of binomials avoids the large intermediate n!.
    let mut acc = BigUint::one();
    let mut run = 0usize;
    for &c in counts {
        run += c;
        acc *= binomial(run, c);
    }
    acc
}

/// Number of weak compositions of `n` into `m` parts, `C(n + m - 1, m - 1)`.
///
/// This is the number of distinct multiplicity vectors over an `m`-symbol
/// alphabet for solutions of length `n`.
pub fn weak_composition_count(n: usize, m: usize) -> BigUint {
    if m == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(n + m - 1, m - 1)
}

/// Multiplicity vector of `s` over an alphabet of size `m`.
pub fn multiplicities(s: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; m];
    for &x in s {
        if x >= m {
            return Err(QvaError::invalid(format!(
                "symbol {x} outside alphabet of size {m}"
            )));
        }
        counts[x] += 1;
    }
    Ok(counts)
}

/// All weak compositions of `n` into `m` parts in lexicographic order.
pub fn weak_compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=rem {
            cur.push(c);
            rec(rem - c, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, m, &mut Vec::with_capacity(m), &mut out);
    out
}

// ============================================================================
// Multiset partition of the valid solution space
// ============================================================================

/// Ordered partition of a constrained solution space into permutation sets.
///
/// Part `k` holds every permutation of the multiset with multiplicities
/// `parts[k]`; its permutations occupy the contiguous global index range
/// `offsets[k] .. offsets[k] + sizes[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetPartition {
    /// Solution length.
    pub n: usize,
    /// Alphabet size.
    pub m: usize,
    /// Multiplicity vectors, in lexicographic order.
    pub parts: Vec<Vec<usize>>,
    /// `sizes[k] = multinomial(n; parts[k])`.
    pub sizes: Vec<BigUint>,
    /// Prefix sums of `sizes` (the index offset function), `offsets[0] = 0`.
    pub offsets: Vec<BigUint>,
}

impl MultisetPartition {
    /// Build a partition from an explicit list of multiplicity vectors.
    pub fn from_parts(n: usize, m: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut sizes = Vec::with_capacity(parts.len());
        let mut offsets = Vec::with_capacity(parts.len());
        let mut acc = BigUint::zero();
        for p in &parts {
            if p.len() != m {
                return Err(QvaError::LengthMismatch {
                    expected: m,
                    found: p.len(),
                });
            }
            let size = multinomial(n, p)?;
            offsets.push(acc.clone());
            acc += &size;
            sizes.push(size);
        }
        Ok(Self {
            n,
            m,
            parts,
            sizes,
            offsets,
        })
    }

    /// Total number of valid solutions `|S'|`.
    pub fn total(&self) -> BigUint {
        self.sizes.iter().sum()
    }

    /// `|S'|` as a machine integer (errors if it does not fit).
    pub fn total_usize(&self) -> Result<usize> {
        self.total()
            .to_usize()
            .ok_or_else(|| QvaError::invalid("valid space too large for a machine index"))
    }

    /// Part sizes as machine integers.
    pub fn sizes_usize(&self) -> Result<Vec<usize>> {
        self.sizes
            .iter()
            .map(|s| {
                s.to_usize()
                    .ok_or_else(|| QvaError::invalid("part too large for a machine index"))
            })
            .collect()
    }

    /// Index of the part containing solutions with multiplicities `counts`.
    pub fn part_of(&self, counts: &[usize]) -> Option<usize> {
        self.parts.iter().position(|p| p.as_slice() == counts)
    }

    /// Global index `f(k) + rank_k(s)` of a valid solution.
    pub fn global_rank(&self, s: &[usize]) -> Result<BigUint> {
        if s.len() != self.n {
            return Err(QvaError::LengthMismatch {
                expected: self.n,
                found: s.len(),
            });
        }
        let counts = multiplicities(s, self.m)?;
        let k = self
            .part_of(&counts)
            .ok_or_else(|| QvaError::invalid("solution does not satisfy the constraint"))?;
        Ok(&self.offsets[k] + rank_in_multiset(s))
    }

    /// [`global_rank`](Self::global_rank) as a machine integer.
    pub fn global_rank_usize(&self, s: &[usize]) -> Result<usize> {
        self.global_rank(s)?
            .to_usize()
            .ok_or_else(|| QvaError::invalid("rank too large for a machine index"))
    }

    /// Inverse of [`global_rank`](Self::global_rank).
    pub fn global_unrank(&self, i: &BigUint) -> Result<Solution> {
        // Last part whose offset does not exceed i.
        let k = self
            .offsets
            .iter()
            .rposition(|f| f <= i)
            .ok_or_else(|| out_of_range(i, &self.total()))?;
        let local = i - &self.offsets[k];
        if local >= self.sizes[k] {
            return Err(out_of_range(i, &self.total()));
        }
        unrank_in_multiset(&local, &self.parts[k])
    }

    /// [`global_unrank`](Self::global_unrank) for a machine-integer index.
    pub fn global_unrank_usize(&self, i: usize) -> Result<Solution> {
        self.global_unrank(&BigUint::from(i))
    }

    /// Part index of every global index, in order (length `|S'|`).
    pub fn part_labels(&self) -> Result<Vec<usize>> {
        let sizes = self.sizes_usize()?;
        Ok(sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
            .collect())
    }
}

fn out_of_range(i: &BigUint, limit: &BigUint) -> QvaError {
    QvaError::OutOfRange {
        index: i.to_string(),
        limit: limit.to_string(),
    }
}

/// Every multiplicity vector `P` over an alphabet with value map `z` such
/// that `sum_j P_j = n` and `sum_j P_j z_j = a`, in lexicographic order.
///
/// `z[j]` is the value of the j-th symbol in declaration order.
pub fn enumerate_valid_multisets(n: usize, z: &[i64], a: i64) -> Result<MultisetPartition> {
    let m = z.len();
    for i in 0..m {
        for j in 0..i {
            if z[i] == z[j] {
                return Err(QvaError::invalid("symbol value map must be injective"));
            }
        }
    }
    let parts: Vec<Vec<usize>> = weak_compositions(n, m)
        .into_iter()
        .filter(|p| p.iter().zip(z).map(|(&c, &v)| c as i64 * v).sum::<i64>() == a)
        .collect();
    MultisetPartition::from_parts(n, m, parts)
}

// ============================================================================
// Ranking within one permutation set
// ============================================================================

/// Lexicographic rank of `s` among all distinct permutations of its own
/// multiset.
///
/// At each position the number of permutations that start with a smaller
/// symbol `x` is `nPerm * count(x) / remaining`, where `nPerm` is the number
/// of permutations of the remaining suffix.
pub fn rank_in_multiset(s: &[usize]) -> BigUint {
    let m = s.iter().max().map_or(0, |&x| x + 1);
    let mut counts = vec![0usize; m];
    for &x in s {
        counts[x] += 1;
    }
    let mut n_perm = multinomial_of(&counts);
    let mut rank = BigUint::zero();
    let mut rem = s.len();
    for &x in s {
        let smaller: usize = counts[..x].iter().sum();
        if smaller > 0 {
            rank += &n_perm * BigUint::from(smaller) / BigUint::from(rem);
        }
        // Permutations of the suffix once x is fixed in this position.
        n_perm = n_perm * BigUint::from(counts[x]) / BigUint::from(rem);
        counts[x] -= 1;
        rem -= 1;
    }
    rank
}

/// The permutation of the multiset `counts` with lexicographic rank `i`.
pub fn unrank_in_multiset(i: &BigUint, counts: &[usize]) -> Result<Solution> {
    let mut counts = counts.to_vec();
    let mut rem: usize = counts.iter().sum();
    let mut n_perm = multinomial_of(&counts);
    if *i >= n_perm {
        return Err(out_of_range(i, &n_perm));
    }
    let mut idx = i.clone();
    let mut s = Vec::with_capacity(rem);
    while rem > 0 {
        // Walk the cumulative block sizes of each leading symbol.
        let mut acc = BigUint::zero();
        let mut chosen = None;
        for (x, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let block = &n_perm * BigUint::from(c) / BigUint::from(rem);
            if idx < &acc + &block {
                chosen = Some((x, block));
                break;
            }
            acc += block;
        }
        let (x, block) = chosen.expect("index below multinomial always lands in a block");
        idx -= acc;
        s.push(x);
        counts[x] -= 1;
        rem -= 1;
        n_perm = block;
    }
    Ok(s)
}

/// [`rank_in_multiset`] as a machine integer.
pub fn rank_in_multiset_usize(s: &[usize]) -> usize {
    rank_in_multiset(s)
        .to_usize()
        .expect("rank fits a machine index for desk-scale multisets")
}

/// [`unrank_in_multiset`] for a machine-integer rank.
pub fn unrank_in_multiset_usize(i: usize, counts: &[usize]) -> Result<Solution> {
    unrank_in_multiset(&BigUint::from(i), counts)
}

// ============================================================================
// Transposition neighbours
// ============================================================================

/// Degree of `s` in its constrained permutation graph:
/// `sum_{j<k} count_j * count_k`.
pub fn transposition_degree(s: &[usize]) -> usize {
    let m = s.iter().max().map_or(0, |&x| x + 1);
    let mut counts = vec![0usize; m];
    for &x in s {
        counts[x] += 1;
    }
    let mut deg = 0;
    for j in 0..m {
        for k in j + 1..m {
            deg += counts[j] * counts[k];
        }
    }
    deg
}

/// The `l`-th solution obtained from `s` by one value-changing transposition.
///
/// Symbol pairs `(x_j, x_k)`, `j < k`, are visited in lexicographic order;
/// within a pair the positions of `x_j` and `x_k` (ascending) are traversed
/// row-major.
pub fn nth_transposition_neighbor(s: &[usize], l: usize) -> Result<Solution> {
    let m = s.iter().max().map_or(0, |&x| x + 1);
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, &x) in s.iter().enumerate() {
        positions[x].push(i);
    }
    let mut rem = l;
    for j in 0..m {
        for k in j + 1..m {
            let block = positions[j].len() * positions[k].len();
            if rem < block {
                let a = positions[j][rem / positions[k].len()];
                let b = positions[k][rem % positions[k].len()];
                let mut out = s.to_vec();
                out.swap(a, b);
                return Ok(out);
            }
            rem -= block;
        }
    }
    Err(QvaError::OutOfRange {
        index: l.to_string(),
        limit: transposition_degree(s).to_string(),
    })
}

/// All transposition neighbours of `s`, in [`nth_transposition_neighbor`] order.
pub fn transposition_neighbors(s: &[usize]) -> Vec<Solution> {
    (0..transposition_degree(s))
        .map(|l| nth_transposition_neighbor(s, l).expect("l < degree"))
        .collect()
}
