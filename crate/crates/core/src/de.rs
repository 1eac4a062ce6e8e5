//! Protograph density evolution on the binary erasure channel.
//!
//! Standard BEC recursion on the edges of the base matrix, flooding schedule:
//!
//! ```text
//! c2v(c→v) = 1 − Π_{v'∈N(c)\v} (1 − v2c(v'→c))
//! v2c(v→c) = ε · Π_{c'∈N(v)\c} c2v(c'→v)
//! p_v      = ε · Π_{c∈N(v)} c2v(c→v)
//! ```
//!
//! starting from `v2c = ε`, `p = ε`. Edges are enumerated row-major over the
//! base matrix.

use rayon::prelude::*;
use serde::Serialize;

use crate::protograph::BaseMatrix;

/// Edge lists of a protograph.
#[derive(Clone, Debug)]
pub struct DeGraph {
    n_vars: usize,
    n_checks: usize,
    /// `edge_var[e]`, 0-based.
    edge_var: Vec<usize>,
    /// Edges of check `c` are `check_start[c]..check_start[c+1]`.
    check_start: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl DeGraph {
    pub fn new(base: &BaseMatrix) -> Self {
        let edges: Vec<(usize, usize)> = base.edges().into_iter().map(|(i, c)| (i - 1, c - 1)).collect();
        Self::from_edges(base.cols(), base.rows(), &edges)
    }

    /// From 0-based `(check, var)` pairs, sorted by check.
    pub fn from_edges(n_vars: usize, n_checks: usize, edges: &[(usize, usize)]) -> Self {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        let mut check_start = vec![0; n_checks + 1];
        for &(c, _) in &sorted {
            check_start[c + 1] += 1;
        }
        for c in 0..n_checks {
            check_start[c + 1] += check_start[c];
        }
        let mut var_edges = vec![Vec::new(); n_vars];
        let edge_var: Vec<usize> = sorted.iter().map(|&(_, v)| v).collect();
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[v].push(e);
        }
        Self {
            n_vars,
            n_checks,
            edge_var,
            check_start,
            var_edges,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn initial_state(&self, epsilon: f64) -> DeState {
        DeState {
            v2c: vec![epsilon; self.n_edges()],
            c2v: vec![1.0; self.n_edges()],
            marginals: vec![epsilon; self.n_vars],
            iteration: 0,
        }
    }

    /// One synchronous iteration in place.
    pub fn step(&self, epsilon: f64, state: &mut DeState) {
        let mut vals = Vec::with_capacity(16);
        let mut buf = Vec::with_capacity(16);
        for c in 0..self.n_checks {
            let (lo, hi) = (self.check_start[c], self.check_start[c + 1]);
            vals.clear();
            vals.extend(state.v2c[lo..hi].iter().map(|&x| 1.0 - x));
            exclusive_products(&vals, &mut buf);
            for (slot, &prod) in state.c2v[lo..hi].iter_mut().zip(&buf) {
                *slot = 1.0 - prod;
            }
        }
        for (v, edges) in self.var_edges.iter().enumerate() {
            vals.clear();
            vals.extend(edges.iter().map(|&e| state.c2v[e]));
            exclusive_products(&vals, &mut buf);
            let mut all = epsilon;
            for (&e, &prod) in edges.iter().zip(&buf) {
                state.v2c[e] = epsilon * prod;
            }
            for &e in edges {
                all *= state.c2v[e];
            }
            state.marginals[v] = all;
        }
        state.iteration += 1;
    }

    /// Runs DE until `max_i p_i < target`, a fixpoint, or `max_iter`.
    pub fn run(&self, epsilon: f64, target: f64, max_iter: usize) -> Convergence {
        let mut state = self.initial_state(epsilon);
        if max_marginal(&state) < target {
            return Convergence {
                converged: true,
                iterations: 0,
                final_max: max_marginal(&state),
            };
        }
        let mut prev = state.marginals.clone();
        while state.iteration < max_iter {
            self.step(epsilon, &mut state);
            let max = max_marginal(&state);
            if max < target {
                return Convergence {
                    converged: true,
                    iterations: state.iteration,
                    final_max: max,
                };
            }
            let progress = prev
                .iter()
                .zip(&state.marginals)
                .map(|(a, b)| a - b)
                .fold(0.0f64, f64::max);
            if progress <= STALL_PROGRESS {
                break;
            }
            prev.copy_from_slice(&state.marginals);
        }
        Convergence {
            converged: false,
            iterations: state.iteration,
            final_max: max_marginal(&state),
        }
    }
}

/// A DE run whose largest per-iteration decrease of any marginal falls to
/// this value has reached a nonzero fixpoint.
pub const STALL_PROGRESS: f64 = 1e-15;

/// `out[i] = Π_{j≠i} vals[j]`.
fn exclusive_products(vals: &[f64], out: &mut Vec<f64>) {
    let n = vals.len();
    out.clear();
    out.resize(n, 1.0);
    let mut acc = 1.0;
    for i in 0..n {
        out[i] = acc;
        acc *= vals[i];
    }
    acc = 1.0;
    for i in (0..n).rev() {
        out[i] *= acc;
        acc *= vals[i];
    }
}

fn max_marginal(state: &DeState) -> f64 {
    state.marginals.iter().copied().fold(0.0, f64::max)
}

/// Edge messages and per-variable erasure probabilities after `iteration`
/// steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeState {
    pub v2c: Vec<f64>,
    pub c2v: Vec<f64>,
    pub marginals: Vec<f64>,
    pub iteration: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: usize,
    pub final_max: f64,
}

/// Returns the state after one more iteration.
pub fn de_step(base: &BaseMatrix, epsilon: f64, state: &DeState) -> DeState {
    let g = DeGraph::new(base);
    let mut next = state.clone();
    g.step(epsilon, &mut next);
    next
}

/// `p[ℓ][i]` for `ℓ = 0..=iters` and sections `i = 1..kL` (stored 0-based).
pub fn trajectory(base: &BaseMatrix, epsilon: f64, iters: usize) -> Vec<Vec<f64>> {
    let g = DeGraph::new(base);
    let mut state = g.initial_state(epsilon);
    let mut out = Vec::with_capacity(iters + 1);
    out.push(state.marginals.clone());
    for _ in 0..iters {
        g.step(epsilon, &mut state);
        out.push(state.marginals.clone());
    }
    out
}

/// Iterations needed until `max_i p_i < target`, if reached within
/// `max_iter`.
pub fn iterations_to_target(base: &BaseMatrix, epsilon: f64, target: f64, max_iter: usize) -> Option<usize> {
    let c = DeGraph::new(base).run(epsilon, target, max_iter);
    c.converged.then_some(c.iterations)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeOptions {
    /// DE succeeds when `max_i p_i` drops below this.
    pub target: f64,
    pub max_iter: usize,
    pub bisection_tol: f64,
}

impl Default for DeOptions {
    fn default() -> Self {
        Self {
            target: 1e-10,
            max_iter: 200_000,
            bisection_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub epsilon_star: f64,
    pub bracket: (f64, f64),
    pub de_params: DeOptions,
}

/// BP threshold by bisection on `[0, 1]`.
pub fn bp_threshold(base: &BaseMatrix, opts: DeOptions) -> ThresholdResult {
    assert!(
        opts.target > 0.0 && opts.bisection_tol > 0.0,
        "tolerances must be positive"
    );
    let g = DeGraph::new(base);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > opts.bisection_tol {
        let mid = 0.5 * (lo + hi);
        if g.run(mid, opts.target, opts.max_iter).converged {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ThresholdResult {
        epsilon_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        de_params: opts,
    }
}

/// Thresholds of several base matrices in parallel.
pub fn bp_thresholds(bases: &[BaseMatrix], opts: DeOptions) -> Vec<ThresholdResult> {
    bases.par_iter().map(|b| bp_threshold(b, opts)).collect()
}
