//! Classical parameter optimisation: adaptive Nelder–Mead, a seeded
//! multi-start driver, one-dimensional grid-plus-golden-section search, and
//! the hybrid fixed-walk-time scheme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QvaError, Result};
use crate::metrics::SubshellModel;
use crate::qva::Ansatz;

// ============================================================================
// Nelder–Mead
// ============================================================================

/// Nelder–Mead settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NmOptions {
    /// Iteration cap.
    pub max_iter: usize,
    /// Convergence tolerance on both the simplex extent and the spread of
    /// objective values.
    pub tol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-9,
        }
    }
}

/// Result of one local optimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// Best parameters found.
    pub x: Vec<f64>,
    /// Objective at `x`.
    pub fx: f64,
    /// Objective evaluations used.
    pub evaluations: usize,
    /// Iterations performed.
    pub iterations: usize,
    /// Whether the tolerance test (rather than the cap) ended the run.
    pub converged: bool,
    /// Best objective after each iteration, `(iteration, objective)`.
    pub trace: Vec<(usize, f64)>,
}

/// Minimise `f` from `x0` with the Nelder–Mead simplex method using
/// dimension-adaptive coefficients (reflection 1, expansion `1 + 2/n`,
/// contraction `3/4 - 1/(2n)`, shrink `1 - 1/n`; standard coefficients in one
/// dimension).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NmOptions,
) -> Result<OptResult> {
    let n = x0.len();
    if n == 0 {
        return Err(QvaError::invalid("Nelder-Mead needs at least one parameter"));
    }
    let nf = n as f64;
    let (rho, chi, psi, sigma) = if n > 1 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            return Err(QvaError::numerical(format!("objective returned NaN at {x:?}")));
        }
        Ok(v)
    };

    let mut sim: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    sim.push(x0.to_vec());
    for k in 0..n {
        let mut y = x0.to_vec();
        y[k] = if y[k] != 0.0 { 1.05 * y[k] } else { 0.00025 };
        sim.push(y);
    }
    let mut fs = Vec::with_capacity(n + 1);
    for x in &sim {
        fs.push(eval(x, &mut evals)?);
    }

    let combine = |a: &[f64], wa: f64, b: &[f64], wb: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
    };

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        // Sort vertices by objective.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        sim = order.iter().map(|&i| sim[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i]).collect();

        let x_spread = sim[1..]
            .iter()
            .flat_map(|x| x.iter().zip(&sim[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let f_spread = fs[1..].iter().map(|v| (v - fs[0]).abs()).fold(0.0, f64::max);
        if x_spread <= opts.tol && f_spread <= opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let mut xbar = vec![0.0; n];
        for x in &sim[..n] {
            for (b, v) in xbar.iter_mut().zip(x) {
                *b += v / nf;
            }
        }
        let worst = sim[n].clone();
        let xr = combine(&xbar, 1.0 + rho, &worst, -rho);
        let fr = eval(&xr, &mut evals)?;
        let mut shrink = false;
        if fr < fs[0] {
            let xe = combine(&xbar, 1.0 + rho * chi, &worst, -rho * chi);
            let fe = eval(&xe, &mut evals)?;
            if fe < fr {
                sim[n] = xe;
                fs[n] = fe;
            } else {
                sim[n] = xr;
                fs[n] = fr;
            }
        } else if fr < fs[n - 1] {
            sim[n] = xr;
            fs[n] = fr;
        } else if fr < fs[n] {
            let xc = combine(&xbar, 1.0 + psi * rho, &worst, -psi * rho);
            let fc = eval(&xc, &mut evals)?;
            if fc <= fr {
                sim[n] = xc;
                fs[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            let xcc = combine(&xbar, 1.0 - psi, &worst, psi);
            let fcc = eval(&xcc, &mut evals)?;
            if fcc < fs[n] {
                sim[n] = xcc;
                fs[n] = fcc;
            } else {
                shrink = true;
            }
        }
        if shrink {
            let best = sim[0].clone();
            for j in 1..=n {
                sim[j] = combine(&best, 1.0 - sigma, &sim[j], sigma);
                fs[j] = eval(&sim[j], &mut evals)?;
            }
        }
        let best = fs.iter().copied().fold(f64::INFINITY, f64::min);
        trace.push((iterations, best));
    }
    Ok(OptResult {
        x: sim[0].clone(),
        fx: fs[0],
        evaluations: evals,
        iterations,
        converged,
        trace,
    })
}

// ============================================================================
// Multi-start
// ============================================================================

/// All repeats of a multi-start run.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStart {
    /// Initial points, one per repeat.
    pub initial: Vec<Vec<f64>>,
    /// Local optimisation results, one per repeat.
    pub runs: Vec<OptResult>,
    /// Index of the incumbent (lowest objective; first on ties).
    pub best: usize,
}

impl MultiStart {
    /// The incumbent run.
    pub fn incumbent(&self) -> &OptResult {
        &self.runs[self.best]
    }
}

/// Deterministic generator for repeat `repeat` of a run seeded with `seed`.
pub fn repeat_rng(seed: u64, repeat: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat);
    rng
}

/// Draw `dim` values uniformly from `[lo, hi)`.
pub fn uniform_point(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..hi)).collect()
}

/// Run `repeats` independent Nelder–Mead minimisations of `f` from points
/// drawn uniformly in `[0, 2 pi)^dim`. Repeats run concurrently; the result
/// depends only on `seed`.
pub fn multistart<F>(f: F, dim: usize, repeats: usize, seed: u64, opts: &NmOptions) -> Result<MultiStart>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if repeats == 0 {
        return Err(QvaError::invalid("need at least one repeat"));
    }
    let initial: Vec<Vec<f64>> = (0..repeats)
        .map(|r| uniform_point(&mut repeat_rng(seed, r as u64), dim, 0.0, std::f64::consts::TAU))
        .collect();
    let runs = initial
        .par_iter()
        .map(|x0| nelder_mead(&f, x0, opts))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..runs.len())
        .min_by(|&a, &b| runs[a].fx.total_cmp(&runs[b].fx).then(a.cmp(&b)))
        .expect("non-empty");
    Ok(MultiStart {
        initial,
        runs,
        best,
    })
}

// ============================================================================
// One-dimensional search
// ============================================================================

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximise `f` over `(lo, hi]`: scan `grid` equally spaced points
/// `lo + (hi - lo)(i + 1)/grid`, take the first point within `1e-12` of the
/// best value (ties go to the smaller argument), then refine by golden-section
/// search between its neighbours.
pub fn grid_argmax<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let step = (hi - lo) / grid as f64;
    let pts: Vec<f64> = (0..grid).map(|i| lo + step * (i + 1) as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
    let vmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tie = 1e-12 * vmax.abs().max(1.0);
    let i = vals.iter().position(|&v| v >= vmax - tie).expect("non-empty grid");
    let a = (pts[i] - step).max(lo + 1e-15);
    let b = (pts[i] + step).min(hi);
    let (x, fx) = golden_section_max(&f, a, b, 1e-12);
    if fx >= vals[i] {
        (x, fx)
    } else {
        (pts[i], vals[i])
    }
}

/// Default grid resolution for walk-time searches over `(0, 2 pi]`.
pub const TIME_GRID: usize = 1024;

/// One walk time per subshell with `d > 0`, maximising `|w_{d,k}(t)|` over
/// `(0, 2 pi]` (smallest maximiser on ties).
pub fn subshell_optimal_times(model: &dyn SubshellModel) -> Vec<f64> {
    let entries = model.subshells();
    entries
        .iter()
        .enumerate()
        .filter(|(_, (d, _, _))| *d > 0)
        .map(|(idx, _)| {
            grid_argmax(
                |t| model.coefficient(idx, t).norm(),
                0.0,
                std::f64::consts::TAU,
                TIME_GRID,
            )
            .0
        })
        .collect()
}

/// Reduce a walk time to its canonical representative modulo the period
/// `period` of `|w(t)|` and the reflection `t -> period - t`.
pub fn canonical_time(t: f64, period: f64) -> f64 {
    let r = t.rem_euclid(period);
    r.min(period - r)
}

/// Fixed mixing-time schedule: layer `i` uses `times[i mod times.len()]`.
pub fn cyclic_schedule(times: &[f64], p: usize) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(QvaError::invalid("hybrid schedule needs at least one time"));
    }
    Ok((0..p).map(|i| times[i % times.len()]).collect())
}

// ============================================================================
// Ansatz optimisation
// ============================================================================

/// Summary of one optimised repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatSummary {
    /// Repeat number.
    pub repeat: usize,
    /// Optimal flat parameter vector.
    pub params: Vec<f64>,
    /// Expectation value at the optimum.
    pub expectation: f64,
    /// Approximation ratio at the optimum.
    pub ratio: f64,
    /// Probability of a globally optimal valid state.
    pub optimum_probability: f64,
    /// Nelder–Mead iterations.
    pub iterations: usize,
    /// Objective evaluations.
    pub evaluations: usize,
    /// Whether the tolerance test ended the run.
    pub converged: bool,
    /// Best objective after each iteration, `(iteration, objective)`.
    pub trace: Vec<(usize, f64)>,
}

/// All repeats of an ansatz optimisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QvaRun {
    /// One entry per repeat.
    pub repeats: Vec<RepeatSummary>,
    /// Index of the repeat with the highest approximation ratio.
    pub best: usize,
}

impl QvaRun {
    /// The best repeat.
    pub fn incumbent(&self) -> &RepeatSummary {
        &self.repeats[self.best]
    }

    /// Mean approximation ratio over repeats.
    pub fn mean_ratio(&self) -> f64 {
        self.repeats.iter().map(|r| r.ratio).sum::<f64>() / self.repeats.len() as f64
    }
}

fn summarise(ansatz: &Ansatz, ms: &MultiStart, expand: impl Fn(&[f64]) -> Vec<f64>) -> Result<QvaRun> {
    let repeats = ms
        .runs
        .iter()
        .enumerate()
        .map(|(repeat, run)| {
            let params = expand(&run.x);
            let state = ansatz.evolve(&params)?;
            let expectation = crate::qva::expectation(&state, ansatz.costs())?;
            Ok(RepeatSummary {
                repeat,
                ratio: ansatz.ratio(expectation)?,
                optimum_probability: ansatz.optimum_probability(&state),
                params,
                expectation,
                iterations: run.iterations,
                evaluations: run.evaluations,
                converged: run.converged,
                trace: run.trace.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = (0..repeats.len())
        .max_by(|&a, &b| repeats[a].ratio.total_cmp(&repeats[b].ratio).then(b.cmp(&a)))
        .expect("non-empty");
    Ok(QvaRun { repeats, best })
}

/// Minimise the ansatz expectation over all parameters from `repeats`
/// seeded uniform starts in `[0, 2 pi)`.
pub fn optimize_ansatz(ansatz: &Ansatz, repeats: usize, seed: u64, opts: &NmOptions) -> Result<QvaRun> {
    let objective = |x: &[f64]| ansatz.objective(x).unwrap_or(f64::NAN);
    let ms = multistart(objective, ansatz.num_params(), repeats, seed, opts)?;
    summarise(ansatz, &ms, |x| x.to_vec())
}

/// Hybrid scheme: walk times are fixed to the cyclic schedule built from
/// `times`, and only the `p` phase angles are optimised.
pub fn optimize_hybrid(
    ansatz: &Ansatz,
    times: &[f64],
    repeats: usize,
    seed: u64,
    opts: &NmOptions,
) -> Result<QvaRun> {
    if ansatz.algorithm().params_per_layer() != 2 {
        return Err(QvaError::invalid("hybrid scheme needs one walk time per layer"));
    }
    let schedule = cyclic_schedule(times, ansatz.layers())?;
    let expand = |gammas: &[f64]| -> Vec<f64> {
        gammas.iter().zip(&schedule).flat_map(|(&g, &t)| [g, t]).collect()
    };
    let objective = |g: &[f64]| ansatz.objective(&expand(g)).unwrap_or(f64::NAN);
    let ms = multistart(objective, ansatz.layers(), repeats, seed, opts)?;
    summarise(ansatz, &ms, expand)
}
