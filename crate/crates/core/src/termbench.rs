//! Termination cost measurements: generic `H_term` solve against the
//! accumulator recursion, as a function of the lifting number.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::encoder::{terminate_accumulator, OpCounter, TermSolver};
use crate::error::Result;
use crate::gf2::BitVector;
use crate::lifted::{edge_seed, LiftedCode};
use crate::protograph::{BaseMatrix, CodeParams};

/// Rank-repair budget used when building the original codes.
pub const REPAIR_ATTEMPTS: u32 = 10;

#[derive(Clone, Debug, Serialize)]
pub struct GenericSample {
    pub n_term_bits: usize,
    pub bit_ops: u64,
    pub factor_secs: f64,
    pub solve_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TerminationSample {
    #[serde(rename = "M")]
    pub m: usize,
    /// `None` when `M` exceeds the generic limit.
    pub generic: Option<GenericSample>,
    pub accumulator_bit_ops: u64,
    pub accumulator_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TerminationReport {
    pub dl: usize,
    pub dr: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub seed: u64,
    pub repetitions: usize,
    pub samples: Vec<TerminationSample>,
    pub generic_ops_exponent: Option<f64>,
    pub generic_time_exponent: Option<f64>,
    pub accumulator_ops_exponent: Option<f64>,
    pub accumulator_time_exponent: Option<f64>,
}

/// Least-squares slope of `log y` against `log x`. Needs two distinct `x`
/// values with positive `y`.
pub fn growth_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn random_syndromes(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<BitVector> {
    (0..n).map(|_| BitVector::random(m, rng)).collect()
}

/// Measures one lifting number. The generic side uses the original code,
/// the accumulator side the patched modified code with the same degrees.
pub fn measure(
    dl: usize,
    dr: usize,
    l: usize,
    m: usize,
    seed: u64,
    reps: usize,
    generic_max_m: usize,
) -> Result<TerminationSample> {
    let reps = reps.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(edge_seed(seed, m, 0, 0));

    let generic = if m <= generic_max_m {
        let base = BaseMatrix::build(CodeParams::original(dl, dr, l)?)?;
        let code = LiftedCode::lift(&base, m, seed)?.repair_term_rank_or_flip(REPAIR_ATTEMPTS)?;
        let t0 = Instant::now();
        let solver = TermSolver::new(&code)?;
        let factor_secs = t0.elapsed().as_secs_f64();
        let n = solver.size();
        let rhs: Vec<BitVector> = (0..reps).map(|_| BitVector::random(n, &mut rng)).collect();
        let mut counter = OpCounter::default();
        let t0 = Instant::now();
        for r in &rhs {
            std::hint::black_box(solver.solve(r, &mut counter)?);
        }
        let solve_secs = t0.elapsed().as_secs_f64() / reps as f64;
        Some(GenericSample {
            n_term_bits: n,
            bit_ops: counter.bit_ops / reps as u64,
            factor_secs,
            solve_secs,
        })
    } else {
        None
    };

    let pairs: Vec<Vec<BitVector>> = (0..reps).map(|_| random_syndromes(2, m, &mut rng)).collect();
    let mut counter = OpCounter::default();
    let t0 = Instant::now();
    for s in &pairs {
        std::hint::black_box(terminate_accumulator(&s[0], &s[1], &mut counter)?);
    }
    let accumulator_secs = t0.elapsed().as_secs_f64() / reps as f64;

    Ok(TerminationSample {
        m,
        generic,
        accumulator_bit_ops: counter.bit_ops / reps as u64,
        accumulator_secs,
    })
}

pub fn bench_termination(
    dl: usize,
    dr: usize,
    l: usize,
    ms: &[usize],
    seed: u64,
    reps: usize,
    generic_max_m: usize,
) -> Result<TerminationReport> {
    let samples = ms
        .iter()
        .map(|&m| measure(dl, dr, l, m, seed, reps, generic_max_m))
        .collect::<Result<Vec<_>>>()?;
    let generic: Vec<(f64, &GenericSample)> = samples
        .iter()
        .filter_map(|s| s.generic.as_ref().map(|g| (s.m as f64, g)))
        .collect();
    let gops: Vec<_> = generic.iter().map(|(m, g)| (*m, g.bit_ops as f64)).collect();
    let gtime: Vec<_> = generic.iter().map(|(m, g)| (*m, g.solve_secs)).collect();
    let aops: Vec<_> = samples
        .iter()
        .map(|s| (s.m as f64, s.accumulator_bit_ops as f64))
        .collect();
    let atime: Vec<_> = samples.iter().map(|s| (s.m as f64, s.accumulator_secs)).collect();
    Ok(TerminationReport {
        dl,
        dr,
        l,
        seed,
        repetitions: reps.max(1),
        generic_ops_exponent: growth_exponent(&gops),
        generic_time_exponent: growth_exponent(&gtime),
        accumulator_ops_exponent: growth_exponent(&aops),
        accumulator_time_exponent: growth_exponent(&atime),
        samples,
    })
}
