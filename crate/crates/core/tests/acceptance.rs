//! Acceptance checks against the published rate/threshold table and the
//! termination claims. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scc_core::de::{bp_thresholds, DeGraph};
use scc_core::encoder::{terminate_accumulator, OpCounter};
use scc_core::table::{rate_rows, REFERENCE_ROWS};
use scc_core::termbench::bench_termination;
use scc_core::{run_monte_carlo, verify_codeword, BaseMatrix, BitVector, CodeParams, DeOptions, Encoder, LiftedCode};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn base(dl: usize, dr: usize, l: usize, modified: bool) -> BaseMatrix {
    BaseMatrix::build(CodeParams::new(dl, dr, l, modified).unwrap()).unwrap()
}

fn finished_code(p: CodeParams, m: usize, seed: u64) -> LiftedCode {
    let code = LiftedCode::lift(&BaseMatrix::build(p).unwrap(), m, seed).unwrap();
    if p.modified {
        code.apply_accumulator_patch().unwrap()
    } else {
        code.repair_term_rank_or_flip(10).unwrap()
    }
}

/// Criterion 1: all 16 modified rates and at least 15 of 16 original rates
/// exactly at 5 decimals.
fn rates() -> Outcome {
    let mut modified_ok = 0;
    let mut original_ok = 0;
    let mut misses = Vec::new();
    for r in &REFERENCE_ROWS {
        for row in rate_rows(r.dl, r.dr, &[r.l]).unwrap() {
            let modified = row.variant == "modified";
            let want = r.rate(modified);
            if row.rate == want {
                if modified {
                    modified_ok += 1;
                } else {
                    original_ok += 1;
                }
            } else {
                misses.push(format!(
                    "({},{},{}) {} computed {} ({}) printed {}",
                    r.dl, r.dr, r.l, row.variant, row.rate, row.exact, want
                ));
            }
        }
    }
    outcome(
        modified_ok == 16 && original_ok >= 15,
        format!(
            "modified {modified_ok}/16, original {original_ok}/16 (need 16 and 15); mismatches: {}",
            misses.join("; ")
        ),
    )
}

/// Criterion 2: all 32 threshold cells within 1e-4.
fn thresholds() -> Outcome {
    let mut cells = Vec::new();
    for r in &REFERENCE_ROWS {
        for modified in [false, true] {
            cells.push((r, modified, base(r.dl, r.dr, r.l, modified)));
        }
    }
    let bases: Vec<BaseMatrix> = cells.iter().map(|c| c.2.clone()).collect();
    let t0 = Instant::now();
    let results = bp_thresholds(&bases, DeOptions::default());
    let mut hits = 0;
    let mut worst_hit: f64 = 0.0;
    let mut misses = Vec::new();
    for ((r, modified, _), res) in cells.iter().zip(&results) {
        let want = r.threshold(*modified);
        let diff = res.epsilon_star - want;
        if diff.abs() <= 1e-4 {
            hits += 1;
            worst_hit = worst_hit.max(diff.abs());
        } else {
            misses.push(format!(
                "({},{},{}) {} computed {:.6} printed {want:.5}",
                r.dl,
                r.dr,
                r.l,
                if *modified { "modified" } else { "original" },
                res.epsilon_star
            ));
        }
    }
    outcome(
        hits == 32,
        format!(
            "{hits}/32 within 1e-4 (largest in-tolerance gap {worst_hit:.1e}, {:.0}s); misses: {}",
            t0.elapsed().as_secs_f64(),
            misses.join("; ")
        ),
    )
}

/// Criterion 3: at (4,12,9), eps = 0.3, both variants reach max p < 1e-6
/// and the modified one needs strictly more iterations.
fn convergence_speed() -> Outcome {
    let run = |modified| DeGraph::new(&base(4, 12, 9, modified)).run(0.3, 1e-6, 200_000);
    let (orig, modi) = (run(false), run(true));
    outcome(
        orig.converged && modi.converged && modi.iterations > orig.iterations,
        format!(
            "original {} iterations (converged {}), modified {} iterations (converged {})",
            orig.iterations, orig.converged, modi.iterations, modi.converged
        ),
    )
}

/// Criterion 4: encoder round trip, linearity and accumulator ≡ dense solve.
fn encoder_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tuples = 0;
    let mut failures = Vec::new();
    while tuples < 240 {
        let dl = [3usize, 4][rng.gen_range(0..2)];
        let k = [2usize, 3][rng.gen_range(0..2)];
        let l = rng.gen_range(5..=12);
        let m = [1usize, 2, 4, 8, 16][rng.gen_range(0..5)];
        let modified = tuples % 2 == 1;
        let p = CodeParams::new(dl, k * dl, l, modified).unwrap();
        let code = finished_code(p, m, rng.gen());
        let enc = Encoder::new(&code).unwrap();
        let a = BitVector::random(enc.info_len(), &mut rng);
        let b = BitVector::random(enc.info_len(), &mut rng);
        let (ca, cb) = (enc.encode(&a).unwrap(), enc.encode(&b).unwrap());
        let cab = enc.encode(&a.xor(&b).unwrap()).unwrap();
        if !verify_codeword(&code, &ca) || !verify_codeword(&code, &cb) {
            failures.push(format!("{p:?} M={m}: codeword fails parity"));
        }
        if ca.xor(&cb).unwrap() != cab {
            failures.push(format!("{p:?} M={m}: not linear"));
        }
        tuples += 1;
    }
    let mut oracle_cases = 0;
    for m in 1..=32 {
        let code = finished_code(CodeParams::modified(3, 6, 6).unwrap(), m, m as u64);
        let h = code.term_block();
        for _ in 0..20 {
            let s1 = BitVector::random(m, &mut rng);
            let s2 = BitVector::random(m, &mut rng);
            let (x1, x2) = terminate_accumulator(&s1, &s2, &mut OpCounter::default()).unwrap();
            let dense = h.solve(&BitVector::concat(&[s1, s2])).unwrap();
            if dense != BitVector::concat(&[x1, x2]) {
                failures.push(format!("accumulator differs from dense solve at M={m}"));
            }
            oracle_cases += 1;
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{tuples} random tuples, {oracle_cases} termination oracle cases; failures: {}",
            if failures.is_empty() {
                "none".to_string()
            } else {
                failures.join("; ")
            }
        ),
    )
}

/// Criterion 5: unpatched modified H_term has rank ≤ 2M−1, patched 2M.
fn rank_structure() -> Outcome {
    let mut bad = Vec::new();
    for m in [4usize, 8, 16] {
        for seed in 0..50 {
            let code = LiftedCode::lift(&base(3, 6, 9, true), m, seed).unwrap();
            let rank = code.term_block().rank();
            if rank > 2 * m - 1 {
                bad.push(format!("unpatched M={m} seed={seed} rank {rank}"));
            }
        }
    }
    for m in [1usize, 2, 3, 4, 8, 16, 32, 64, 128] {
        for (dl, dr) in [(3, 6), (4, 12)] {
            let code = LiftedCode::lift(&base(dl, dr, 9, true), m, 7)
                .unwrap()
                .apply_accumulator_patch()
                .unwrap();
            let rank = code.term_block().rank();
            if rank != 2 * m {
                bad.push(format!("patched ({dl},{dr},9) M={m} rank {rank}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "150 unpatched blocks rank ≤ 2M−1, patched blocks full rank for M up to 128; failures: {}",
            if bad.is_empty() {
                "none".to_string()
            } else {
                bad.join("; ")
            }
        ),
    )
}

/// Criterion 6: accumulator uses exactly 2M XORs; generic solve doubles
/// by a factor in [3, 5] for M ≥ 256.
fn termination_cost() -> Outcome {
    let report = bench_termination(3, 6, 9, &[256, 512, 1024, 4096, 16384], 1, 1, 1024).unwrap();
    let acc_exact = report.samples.iter().all(|s| s.accumulator_bit_ops == 2 * s.m as u64);
    let generic: Vec<(usize, u64)> = report
        .samples
        .iter()
        .filter_map(|s| s.generic.as_ref().map(|g| (s.m, g.bit_ops)))
        .collect();
    let ratios: Vec<f64> = generic.windows(2).map(|w| w[1].1 as f64 / w[0].1 as f64).collect();
    let ratios_ok = ratios.len() >= 2 && ratios.iter().all(|r| (3.0..=5.0).contains(r));
    outcome(
        acc_exact && ratios_ok,
        format!(
            "accumulator 2M exact: {acc_exact}; generic doubling ratios {ratios:?}; fitted exponents ops {:.3}, generic time {:.2}, accumulator time {:.2}",
            report.generic_ops_exponent.unwrap_or(f64::NAN),
            report.generic_time_exponent.unwrap_or(f64::NAN),
            report.accumulator_time_exponent.unwrap_or(f64::NAN),
        ),
    )
}

/// Criterion 7: Monte Carlo BER at M = 512, (3,6,9) original.
fn decoder_vs_de() -> Outcome {
    let code = finished_code(CodeParams::original(3, 6, 9).unwrap(), 512, 5);
    let below = run_monte_carlo(&code, 0.45, 200, 1).unwrap();
    let above = run_monte_carlo(&code, 0.60, 200, 2).unwrap();
    outcome(
        below.ber < 1e-2 && above.ber > 0.1,
        format!(
            "BER {:.3e} at eps 0.45 (need < 1e-2), {:.3e} at eps 0.60 (need > 0.1)",
            below.ber, above.ber
        ),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 rate formulas", rates),
        ("2 BP thresholds", thresholds),
        ("3 convergence speed", convergence_speed),
        ("4 encoder correctness", encoder_properties),
        ("5 rank structure", rank_structure),
        ("6 termination cost", termination_cost),
        ("7 decoder vs DE", decoder_vs_de),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {name}: {} - {}",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
