//! Binary erasure channel and peeling decoder.
//!
//! A check with exactly one erased neighbour determines it. One iteration
//! fires every check that has a single erasure at the start of the
//! iteration; newly eligible checks wait for the next iteration, so the
//! iteration count is comparable with density evolution's `ℓ`. The fixpoint
//! is the same as that of BP on the BEC.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoder::{Codeword, Encoder};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::lifted::{edge_seed, LiftedCode, SparseParity};
use crate::protograph::CodeParams;

/// Channel output. Erased positions carry value 0 and a set `erased` bit.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedWord {
    m: usize,
    values: BitVector,
    erased: BitVector,
    pub epsilon: f64,
    pub channel_seed: u64,
}

impl ReceivedWord {
    pub fn new(m: usize, values: BitVector, erased: BitVector, epsilon: f64, channel_seed: u64) -> Result<Self> {
        if values.len() != erased.len() {
            return Err(Error::dim(values.len(), erased.len()));
        }
        if m == 0 || !values.len().is_multiple_of(m) {
            return Err(Error::dim(m, values.len()));
        }
        let mut values = values;
        for i in 0..erased.len() {
            if erased.get(i) {
                values.set(i, false);
            }
        }
        Ok(Self {
            m,
            values,
            erased,
            epsilon,
            channel_seed,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_erased(&self) -> usize {
        self.erased.count_ones()
    }

    pub fn is_erased(&self, bit: usize) -> bool {
        self.erased.get(bit)
    }

    pub fn erasures(&self) -> &BitVector {
        &self.erased
    }

    /// Section `j` (1-based) as trits; `None` marks an erasure.
    pub fn section(&self, j: usize) -> Vec<Option<bool>> {
        let off = (j - 1) * self.m;
        (off..off + self.m)
            .map(|b| (!self.erased.get(b)).then(|| self.values.get(b)))
            .collect()
    }

    /// Erases the given bits on top of the channel erasures.
    pub fn erase(&mut self, bits: impl IntoIterator<Item = usize>) {
        for b in bits {
            self.erased.set(b, true);
            self.values.set(b, false);
        }
    }
}

/// Sends `cw` through BEC(ε): every bit is erased independently with
/// probability ε.
pub fn transmit(cw: &Codeword, epsilon: f64, seed: u64) -> Result<ReceivedWord> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!(
            "erasure probability {epsilon} outside [0, 1]"
        )));
    }
    let values = cw.to_flat();
    let m = cw.sections().first().map_or(0, BitVector::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let erased = BitVector::from_bits((0..values.len()).map(|_| rng.gen::<f64>() < epsilon));
    ReceivedWord::new(m, values, erased, epsilon, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeStatus {
    Success,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    pub iterations_used: usize,
    /// Unresolved erasures per section `x_1..x_{kL}`.
    pub per_section_erasures: Vec<usize>,
    /// Resolved bits (erased ones still 0) and the residual erasure mask.
    pub values: BitVector,
    pub residual: BitVector,
    pub resolved_word: Option<Codeword>,
}

impl DecodeResult {
    pub fn residual_erasures(&self) -> usize {
        self.per_section_erasures.iter().sum()
    }
}

/// Peeling decoder over the expanded Tanner graph of a code.
#[derive(Clone, Debug)]
pub struct PeelingDecoder {
    h: SparseParity,
    m: usize,
}

impl PeelingDecoder {
    pub fn new(code: &LiftedCode) -> Self {
        Self {
            h: code.parity_check(),
            m: code.m(),
        }
    }

    pub fn from_parity(h: SparseParity, m: usize) -> Self {
        Self { h, m }
    }

    pub fn parity(&self) -> &SparseParity {
        &self.h
    }

    pub fn decode(&self, rw: &ReceivedWord, max_iter: usize) -> Result<DecodeResult> {
        let h = &self.h;
        if rw.len() != h.n_cols || rw.m() != self.m {
            return Err(Error::dim(h.n_cols, rw.len()));
        }
        let mut values = rw.values.clone();
        let mut erased = rw.erased.clone();
        let mut count = vec![0u32; h.n_rows];
        let mut parity = vec![false; h.n_rows];
        for (r, cols) in h.row_cols.iter().enumerate() {
            for &c in cols {
                let c = c as usize;
                if erased.get(c) {
                    count[r] += 1;
                } else {
                    parity[r] ^= values.get(c);
                }
            }
        }
        let mut ready: Vec<usize> = (0..h.n_rows).filter(|&r| count[r] == 1).collect();
        let mut iterations = 0;
        while !ready.is_empty() && iterations < max_iter {
            iterations += 1;
            let mut next = Vec::new();
            for &r in &ready {
                if count[r] != 1 {
                    continue;
                }
                let v = h.row_cols[r]
                    .iter()
                    .map(|&c| c as usize)
                    .find(|&c| erased.get(c))
                    .expect("check with one erasure has an erased neighbour");
                let bit = parity[r];
                values.set(v, bit);
                erased.set(v, false);
                for &r2 in &h.col_rows[v] {
                    let r2 = r2 as usize;
                    count[r2] -= 1;
                    parity[r2] ^= bit;
                    if count[r2] == 1 {
                        next.push(r2);
                    }
                }
            }
            ready = next;
        }
        let per_section_erasures: Vec<usize> = (0..h.n_cols / self.m)
            .map(|s| (s * self.m..(s + 1) * self.m).filter(|&b| erased.get(b)).count())
            .collect();
        let success = erased.is_zero();
        Ok(DecodeResult {
            status: if success {
                DecodeStatus::Success
            } else {
                DecodeStatus::Stalled
            },
            iterations_used: iterations,
            per_section_erasures,
            resolved_word: if success {
                Some(Codeword::from_flat(&values, self.m)?)
            } else {
                None
            },
            values,
            residual: erased,
        })
    }
}

pub fn decode(code: &LiftedCode, rw: &ReceivedWord, max_iter: usize) -> Result<DecodeResult> {
    PeelingDecoder::new(code).decode(rw, max_iter)
}

/// Wilson score interval for `successes` out of `n` at ~95% confidence.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = n as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfidenceIntervals {
    pub fer: (f64, f64),
    pub ber: (f64, f64),
}

/// Aggregated Monte Carlo results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub params: CodeParams,
    #[serde(rename = "M")]
    pub m: usize,
    pub code_seed: u64,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub frame_errors: u64,
    pub bit_erasures: u64,
    pub fer: f64,
    pub ber: f64,
    pub ci: ConfidenceIntervals,
    pub per_section_ber: Vec<f64>,
    pub mean_iterations: f64,
}

struct Trial {
    failed: bool,
    residual: Vec<usize>,
    iterations: usize,
}

/// Seed of trial `t` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, t: usize) -> u64 {
    edge_seed(seed, t, 0, u32::MAX)
}

/// Encodes random information words, sends them through BEC(ε) and peels.
/// Trials run in parallel with independent derived seeds.
pub fn run_monte_carlo(code: &LiftedCode, epsilon: f64, trials: usize, seed: u64) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::Parameter("at least one trial is required".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!(
            "erasure probability {epsilon} outside [0, 1]"
        )));
    }
    let encoder = Encoder::new(code)?;
    let decoder = PeelingDecoder::new(code);
    let n_bits = code.n_bits();
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Trial> {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, t));
            let info = BitVector::random(encoder.info_len(), &mut rng);
            let cw = encoder.encode(&info)?;
            let rw = transmit(&cw, epsilon, rng.gen())?;
            let out = decoder.decode(&rw, n_bits)?;
            if let Some(word) = &out.resolved_word {
                debug_assert_eq!(word, &cw);
            }
            Ok(Trial {
                failed: out.status == DecodeStatus::Stalled,
                residual: out.per_section_erasures,
                iterations: out.iterations_used,
            })
        })
        .collect::<Result<_>>()?;

    let n_sections = code.params().n_sections();
    let m = code.m();
    let mut per_section = vec![0u64; n_sections];
    let mut frame_errors = 0;
    let mut iterations = 0;
    for t in &results {
        frame_errors += t.failed as u64;
        iterations += t.iterations;
        for (acc, &r) in per_section.iter_mut().zip(&t.residual) {
            *acc += r as u64;
        }
    }
    let bit_erasures: u64 = per_section.iter().sum();
    let total_bits = (trials * n_bits) as u64;
    Ok(SimReport {
        params: *code.params(),
        m,
        code_seed: code.seed(),
        epsilon,
        trials,
        seed,
        frame_errors,
        bit_erasures,
        fer: frame_errors as f64 / trials as f64,
        ber: bit_erasures as f64 / total_bits as f64,
        ci: ConfidenceIntervals {
            fer: wilson_interval(frame_errors, trials as u64),
            ber: wilson_interval(bit_erasures, total_bits),
        },
        per_section_ber: per_section.iter().map(|&e| e as f64 / (trials * m) as f64).collect(),
        mean_iterations: iterations as f64 / trials as f64,
    })
}
