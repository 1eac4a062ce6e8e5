//! Encoding: sequential parity computation followed by termination.
//!
//! Sections `x_1..x_{kL}` are determined left to right. Whenever a section is
//! fixed its contribution is XORed into the syndrome of every check row that
//! touches it, so the syndrome of row `i` is always the contribution of the
//! already determined bits. Row `i ≤ N_seq` then yields the parity section
//! `x_{ki} = P_{i,d_r}^{-1} s_i` in `O(M)`.
//!
//! The remaining `N_term` parity sections are found either by a dense solve
//! against `H_term` (original codes, `O((N_term M)^2)` per word after a
//! one-off inversion) or by the two-register accumulator recursion on the
//! patched corner of a modified code (`2M` XORs).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitVector, DenseGf2Matrix};
use crate::lifted::{Block, LiftedCode, PatchKind};

/// Codeword `(x_1, ..., x_{kL})`, one [`BitVector`] of length `M` per section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    sections: Vec<BitVector>,
}

impl Codeword {
    pub fn new(sections: Vec<BitVector>) -> Self {
        Self { sections }
    }

    pub fn zeros(n_sections: usize, m: usize) -> Self {
        Self::new(vec![BitVector::zeros(m); n_sections])
    }

    pub fn from_flat(bits: &BitVector, m: usize) -> Result<Self> {
        Ok(Self::new(bits.split(m)?))
    }

    /// Section `x_j`, 1-based.
    pub fn section(&self, j: usize) -> &BitVector {
        &self.sections[j - 1]
    }

    pub fn sections(&self) -> &[BitVector] {
        &self.sections
    }

    pub fn sections_mut(&mut self) -> &mut [BitVector] {
        &mut self.sections
    }

    pub fn to_flat(&self) -> BitVector {
        BitVector::concat(&self.sections)
    }

    pub fn xor(&self, other: &Codeword) -> Result<Codeword> {
        if self.sections.len() != other.sections.len() {
            return Err(Error::dim(self.sections.len(), other.sections.len()));
        }
        Ok(Codeword::new(
            self.sections
                .iter()
                .zip(&other.sections)
                .map(|(a, b)| a.xor(b))
                .collect::<Result<_>>()?,
        ))
    }
}

/// Instrumented bit-operation counts of the termination stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounter {
    /// Single-bit XOR accumulations (accumulator) or multiply-accumulate
    /// steps of the dense back-substitution.
    pub bit_ops: u64,
}

/// Partial encoding: determined prefix and running syndromes.
#[derive(Clone, Debug)]
pub struct EncoderState {
    m: usize,
    determined: Vec<BitVector>,
    syndromes: Vec<BitVector>,
}

impl EncoderState {
    pub fn new(code: &LiftedCode) -> Self {
        let m = code.m();
        Self {
            m,
            determined: Vec::with_capacity(code.params().n_sections()),
            syndromes: vec![BitVector::zeros(m); code.params().n_checks()],
        }
    }

    /// Number of sections fixed so far; the next one is `x_{len+1}`.
    pub fn n_determined(&self) -> usize {
        self.determined.len()
    }

    pub fn determined(&self) -> &[BitVector] {
        &self.determined
    }

    /// Syndrome of check row `i` (1-based).
    pub fn syndrome(&self, i: usize) -> &BitVector {
        &self.syndromes[i - 1]
    }

    /// Fixes the next section and updates every syndrome it touches.
    pub fn push_section(&mut self, code: &LiftedCode, x: BitVector) -> Result<()> {
        if x.len() != self.m {
            return Err(Error::dim(self.m, x.len()));
        }
        let c = self.determined.len() + 1;
        if c > code.params().n_sections() {
            return Err(Error::State("all sections are already determined".into()));
        }
        for i in code.base().col_support(c) {
            let block = code.block_at(i, c).expect("column support lies in the band");
            block.apply_xor_into(&x, &mut self.syndromes[i - 1])?;
        }
        self.determined.push(x);
        Ok(())
    }

    /// Sequential step for row `i`: places the `k-1` information sections
    /// `x_{k(i-1)+1..ki-1}` and returns the parity section `x_{ki}`.
    pub fn sequential_step(&mut self, code: &LiftedCode, i: usize, info_chunk: &[BitVector]) -> Result<BitVector> {
        let k = code.params().k();
        let acc = code.accounting();
        if i == 0 || i > acc.n_seq {
            return Err(Error::State(format!("sequential step {i} outside 1..={}", acc.n_seq)));
        }
        if self.determined.len() != k * (i - 1) {
            return Err(Error::State(format!(
                "sequential step {i} needs {} determined sections, have {}",
                k * (i - 1),
                self.determined.len()
            )));
        }
        if info_chunk.len() != k - 1 {
            return Err(Error::dim(k - 1, info_chunk.len()));
        }
        for x in info_chunk {
            self.push_section(code, x.clone())?;
        }
        let dr = code.params().dr;
        let parity = match code.block(i, dr) {
            Some(Block::Perm(p)) => p.apply_inverse(&self.syndromes[i - 1])?,
            _ => return Err(Error::State(format!("block ({i},{dr}) is not invertible"))),
        };
        self.push_section(code, parity.clone())?;
        debug_assert!(self.syndromes[i - 1].is_zero());
        Ok(parity)
    }
}

/// Cached factorization of `H_term` for original codes.
#[derive(Clone, Debug)]
pub struct TermSolver {
    inverse: DenseGf2Matrix,
}

impl TermSolver {
    pub fn new(code: &LiftedCode) -> Result<Self> {
        let h = code.term_block();
        let inverse = h.inverse().map_err(|e| match e {
            Error::Singular => Error::Termination(
                "H_term is singular; repair the termination block (rank repair) before encoding".into(),
            ),
            other => other,
        })?;
        Ok(Self { inverse })
    }

    pub fn size(&self) -> usize {
        self.inverse.rows()
    }

    /// `x = H_term^{-1} s`, counting one bit operation per matrix entry.
    pub fn solve(&self, rhs: &BitVector, counter: &mut OpCounter) -> Result<BitVector> {
        let x = self.inverse.mul_vec(rhs)?;
        let n = self.size() as u64;
        counter.bit_ops += n * n;
        Ok(x)
    }
}

/// Solves `H_term (x_{kL-N_term+1}, ..., x_{kL}) = (s_{N_seq+1}, ...)` for an
/// original code whose sequential part and trailing information sections
/// are already placed in `state`.
pub fn terminate_generic(
    code: &LiftedCode,
    state: &EncoderState,
    solver: &TermSolver,
    counter: &mut OpCounter,
) -> Result<Vec<BitVector>> {
    if code.params().modified {
        return Err(Error::State("generic termination is for original codes".into()));
    }
    let acc = code.accounting();
    let expected = code.params().n_sections() - acc.n_term;
    if state.n_determined() != expected {
        return Err(Error::State(format!(
            "termination needs {expected} determined sections, have {}",
            state.n_determined()
        )));
    }
    let rhs: Vec<BitVector> = acc.term_rows().map(|i| state.syndrome(i).clone()).collect();
    let x = solver.solve(&BitVector::concat(&rhs), counter)?;
    x.split(code.m())
}

/// Accumulator termination of a patched modified code:
/// `x_{kL-1,r} = x_{kL,r-1} ⊕ s_{L,r}` and `x_{kL,r} = x_{kL-1,r} ⊕ s_{L+1,r}`
/// for `r = 1..M` with `x_{kL,0} = 0`. Exactly `2M` XORs.
pub fn terminate_accumulator(
    s_l: &BitVector,
    s_l1: &BitVector,
    counter: &mut OpCounter,
) -> Result<(BitVector, BitVector)> {
    if s_l.len() != s_l1.len() {
        return Err(Error::dim(s_l.len(), s_l1.len()));
    }
    let m = s_l.len();
    let mut first = BitVector::zeros(m);
    let mut second = BitVector::zeros(m);
    let mut prev = false;
    for r in 0..m {
        let a = prev ^ s_l.get(r);
        let b = a ^ s_l1.get(r);
        first.set(r, a);
        second.set(r, b);
        prev = b;
    }
    counter.bit_ops += 2 * m as u64;
    Ok((first, second))
}

/// Encoder bound to one code, holding the termination factorization.
#[derive(Clone, Debug)]
pub struct Encoder<'a> {
    code: &'a LiftedCode,
    solver: Option<TermSolver>,
}

impl<'a> Encoder<'a> {
    pub fn new(code: &'a LiftedCode) -> Result<Self> {
        let kind = code.patch().kind;
        let solver = if code.params().modified {
            if kind != PatchKind::Accumulator {
                return Err(Error::Termination(
                    "modified codes must carry the accumulator patch before encoding".into(),
                ));
            }
            None
        } else {
            Some(TermSolver::new(code)?)
        };
        Ok(Self { code, solver })
    }

    pub fn code(&self) -> &LiftedCode {
        self.code
    }

    /// Number of information bits, `N_info · M`.
    pub fn info_len(&self) -> usize {
        self.code.accounting().n_info * self.code.m()
    }

    pub fn encode(&self, info: &BitVector) -> Result<Codeword> {
        self.encode_counted(info, &mut OpCounter::default())
    }

    /// Encodes, adding the termination bit operations to `counter`.
    pub fn encode_counted(&self, info: &BitVector, counter: &mut OpCounter) -> Result<Codeword> {
        let code = self.code;
        if info.len() != self.info_len() {
            return Err(Error::dim(self.info_len(), info.len()));
        }
        let m = code.m();
        let k = code.params().k();
        let acc = code.accounting();
        let chunks = info.split(m)?;
        let mut chunks = chunks.into_iter();
        let mut state = EncoderState::new(code);
        for i in 1..=acc.n_seq {
            let chunk: Vec<BitVector> = chunks.by_ref().take(k - 1).collect();
            state.sequential_step(code, i, &chunk)?;
        }
        for x in chunks {
            state.push_section(code, x)?;
        }
        let tail = match &self.solver {
            Some(solver) => terminate_generic(code, &state, solver, counter)?,
            None => {
                let l = code.params().l;
                let (a, b) = terminate_accumulator(state.syndrome(l), state.syndrome(l + 1), counter)?;
                vec![a, b]
            }
        };
        let mut sections = state.determined;
        sections.extend(tail);
        Ok(Codeword::new(sections))
    }
}

/// One-shot encode.
pub fn encode(code: &LiftedCode, info: &BitVector) -> Result<Codeword> {
    Encoder::new(code)?.encode(info)
}

/// True iff every block-row parity check holds.
pub fn verify_codeword(code: &LiftedCode, cw: &Codeword) -> bool {
    match code.block_syndromes(cw.sections()) {
        Ok(s) => s.iter().all(BitVector::is_zero),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protograph::{BaseMatrix, CodeParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn modified_code(dl: usize, dr: usize, l: usize, m: usize, seed: u64) -> LiftedCode {
        let base = BaseMatrix::build(CodeParams::modified(dl, dr, l).unwrap()).unwrap();
        LiftedCode::lift(&base, m, seed)
            .unwrap()
            .apply_accumulator_patch()
            .unwrap()
    }

    fn original_code(dl: usize, dr: usize, l: usize, m: usize, seed: u64) -> LiftedCode {
        let base = BaseMatrix::build(CodeParams::original(dl, dr, l).unwrap()).unwrap();
        LiftedCode::lift(&base, m, seed)
            .unwrap()
            .repair_term_rank_or_flip(10)
            .unwrap()
    }

    #[test]
    fn zero_info_gives_zero_codeword() {
        for code in [modified_code(4, 12, 9, 8, 1), original_code(3, 6, 9, 8, 1)] {
            let enc = Encoder::new(&code).unwrap();
            let cw = enc.encode(&BitVector::zeros(enc.info_len())).unwrap();
            assert!(cw.sections().iter().all(BitVector::is_zero));
            assert!(verify_codeword(&code, &cw));
        }
    }

    #[test]
    fn m1_modified_4_12_9_multiply_back() {
        let code = modified_code(4, 12, 9, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let enc = Encoder::new(&code).unwrap();
        for _ in 0..20 {
            let info = BitVector::random(enc.info_len(), &mut rng);
            let cw = enc.encode(&info).unwrap();
            let dense = code.parity_check().to_dense();
            assert!(dense.mul_vec(&cw.to_flat()).unwrap().is_zero());
        }
    }

    #[test]
    fn linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for code in [modified_code(3, 9, 6, 16, 5), original_code(3, 6, 7, 16, 5)] {
            let enc = Encoder::new(&code).unwrap();
            let a = BitVector::random(enc.info_len(), &mut rng);
            let b = BitVector::random(enc.info_len(), &mut rng);
            let lhs = enc.encode(&a).unwrap().xor(&enc.encode(&b).unwrap()).unwrap();
            assert_eq!(lhs, enc.encode(&a.xor(&b).unwrap()).unwrap());
        }
    }

    #[test]
    fn info_lands_on_info_positions() {
        let code = modified_code(4, 12, 9, 4, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let enc = Encoder::new(&code).unwrap();
        let info = BitVector::random(enc.info_len(), &mut rng);
        let cw = enc.encode(&info).unwrap();
        let chunks = info.split(4).unwrap();
        for (t, &pos) in code.accounting().info_positions.iter().enumerate() {
            assert_eq!(cw.section(pos), &chunks[t]);
        }
    }

    #[test]
    fn first_steps_4_12_9() {
        // x_3 depends only on x_1, x_2 (s_1 = 0); x_6 on s_2, x_4, x_5.
        let code = modified_code(4, 12, 9, 8, 21);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = EncoderState::new(&code);
        let x1 = BitVector::random(8, &mut rng);
        let x2 = BitVector::random(8, &mut rng);
        let x3 = state.sequential_step(&code, 1, &[x1.clone(), x2.clone()]).unwrap();
        let p = |j| code.block(1, j).unwrap().as_perm().unwrap();
        let mut s = p(10).apply(&x1).unwrap();
        s.xor_assign(&p(11).apply(&x2).unwrap()).unwrap();
        assert_eq!(x3, p(12).apply_inverse(&s).unwrap());

        let s2 = state.syndrome(2).clone();
        let x4 = BitVector::random(8, &mut rng);
        let x5 = BitVector::random(8, &mut rng);
        let x6 = state.sequential_step(&code, 2, &[x4.clone(), x5.clone()]).unwrap();
        let q = |j| code.block(2, j).unwrap().as_perm().unwrap();
        let mut t = s2;
        t.xor_assign(&q(10).apply(&x4).unwrap()).unwrap();
        t.xor_assign(&q(11).apply(&x5).unwrap()).unwrap();
        assert_eq!(x6, q(12).apply_inverse(&t).unwrap());
    }

    #[test]
    fn out_of_order_step_is_rejected() {
        let code = modified_code(3, 6, 5, 4, 1);
        let mut state = EncoderState::new(&code);
        let z = vec![BitVector::zeros(4)];
        assert!(matches!(state.sequential_step(&code, 2, &z), Err(Error::State(_))));
        assert!(matches!(
            state.sequential_step(&code, 1, &[]),
            Err(Error::Dimension { .. })
        ));
    }

    /// Brute force over all 2^6 words of the (3,6,3) M = 1 code. Its
    /// 4x4 termination block has rank 2, so the encoder runs on the
    /// repaired matrix; the encoded word must be the unique nonzero word
    /// of that matrix's null space.
    #[test]
    fn m1_3_6_3_parity_chain() {
        let base = BaseMatrix::build(CodeParams::original(3, 6, 3).unwrap()).unwrap();
        let code = LiftedCode::lift(&base, 1, 0).unwrap();
        let acc = code.accounting().clone();
        assert_eq!((acc.n_info, acc.n_seq, acc.n_term), (1, 1, 4));
        assert_eq!(code.term_block().rank(), 2);
        let repaired = code.repair_term_rank_or_flip(0).unwrap();
        let h = repaired.parity_check().to_dense();
        let null_space: Vec<BitVector> = (0..64u32)
            .map(|w| BitVector::from_bits((0..6).map(|i| w >> i & 1 == 1)))
            .filter(|v| h.mul_vec(v).unwrap().is_zero())
            .collect();
        assert_eq!(null_space.len(), 2);
        let cw = encode(&repaired, &BitVector::from_bits([true])).unwrap();
        assert!(verify_codeword(&repaired, &cw));
        let nonzero = null_space.iter().find(|v| !v.is_zero()).unwrap();
        assert_eq!(&cw.to_flat(), nonzero);
        // Row 1 reads x_1 + x_2 = 0.
        assert!(cw.section(1).get(0) && cw.section(2).get(0));
    }

    #[test]
    fn accumulator_examples() {
        let mut c = OpCounter::default();
        let z = BitVector::zeros(5);
        assert_eq!(terminate_accumulator(&z, &z, &mut c).unwrap(), (z.clone(), z.clone()));
        let one = BitVector::from_bits([true]);
        let (a, b) = terminate_accumulator(&one, &one, &mut c).unwrap();
        assert_eq!((a, b), (one.clone(), BitVector::zeros(1)));
        assert!(terminate_accumulator(&one, &z, &mut c).is_err());
    }

    #[test]
    fn accumulator_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for m in 1..=32 {
            let code = modified_code(3, 6, 5, m, m as u64);
            let h = code.term_block();
            for _ in 0..100 {
                let sl = BitVector::random(m, &mut rng);
                let sl1 = BitVector::random(m, &mut rng);
                let mut counter = OpCounter::default();
                let (a, b) = terminate_accumulator(&sl, &sl1, &mut counter).unwrap();
                assert_eq!(counter.bit_ops, 2 * m as u64);
                let dense = h.solve(&BitVector::concat(&[sl.clone(), sl1.clone()])).unwrap();
                assert_eq!(BitVector::concat(&[a, b]), dense);
            }
        }
    }

    #[test]
    fn generic_termination_multiply_back() {
        let code = original_code(4, 12, 9, 4, 17);
        let solver = TermSolver::new(&code).unwrap();
        let h = code.term_block();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = BitVector::random(solver.size(), &mut rng);
            let mut counter = OpCounter::default();
            let x = solver.solve(&s, &mut counter).unwrap();
            assert_eq!(h.mul_vec(&x).unwrap(), s);
            assert_eq!(counter.bit_ops, (solver.size() * solver.size()) as u64);
        }
        let mut counter = OpCounter::default();
        assert!(solver.solve(&BitVector::zeros(20), &mut counter).unwrap().is_zero());
    }

    #[test]
    fn singular_term_block_is_reported() {
        let base = BaseMatrix::build(CodeParams::original(4, 8, 9).unwrap()).unwrap();
        let code = LiftedCode::lift(&base, 8, 1).unwrap();
        assert!(matches!(Encoder::new(&code), Err(Error::Termination(_))));
        let base = BaseMatrix::build(CodeParams::modified(4, 8, 9).unwrap()).unwrap();
        let code = LiftedCode::lift(&base, 8, 1).unwrap();
        assert!(matches!(Encoder::new(&code), Err(Error::Termination(_))));
    }

    #[test]
    fn wrong_info_length() {
        let code = modified_code(3, 6, 5, 4, 1);
        let enc = Encoder::new(&code).unwrap();
        assert!(matches!(enc.encode(&BitVector::zeros(3)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn flipped_bit_fails_verification() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let code = modified_code(3, 6, 6, 8, 2);
        let enc = Encoder::new(&code).unwrap();
        let cw = enc.encode(&BitVector::random(enc.info_len(), &mut rng)).unwrap();
        assert!(verify_codeword(&code, &cw));
        assert!(verify_codeword(&code, &Codeword::zeros(12, 8)));
        for _ in 0..50 {
            let mut bad = cw.clone();
            let s = rng.gen_range(0..12);
            let b = rng.gen_range(0..8);
            bad.sections_mut()[s].flip(b);
            assert!(!verify_codeword(&code, &bad));
        }
    }
}
