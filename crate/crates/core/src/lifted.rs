//! Lifting a base matrix into the full parity-check matrix `H(d_l,d_r,L,M)`.
//!
//! Every 1 of the base matrix becomes an `M×M` block, addressed by its row
//! `i` and local band position `j ∈ [1, d_r]` (so block `(i, j)` sits over
//! section `x_{ik-d_r+j}`). Blocks are random permutations, except for the
//! accumulator patch of modified codes which installs identities and one
//! subdiagonal shift `I'_M` in the termination corner.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, DenseGf2Matrix, PermutationMap};
use crate::protograph::{BaseMatrix, BitAccounting, CodeParams};

pub const FORMAT_VERSION: &str = "scc-v1";

/// Largest lifting number for which [`LiftedCode::full_rank_status`]
/// runs dense elimination on the whole parity-check matrix.
pub const FULL_RANK_CHECK_MAX_M: usize = 64;

/// One `M×M` block of the lifted matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Perm(PermutationMap),
    /// `I'_M`: ones on the subdiagonal, `(I' x)_r = x_{r-1}`, `(I' x)_0 = 0`.
    Shift,
}

impl Block {
    /// Row hit by column `c` of the block, if any.
    #[inline]
    pub fn row_of(&self, c: usize, m: usize) -> Option<usize> {
        match self {
            Block::Perm(p) => Some(p.map(c)),
            Block::Shift => (c + 1 < m).then_some(c + 1),
        }
    }

    /// `acc ^= B v`.
    pub fn apply_xor_into(&self, v: &BitVector, acc: &mut BitVector) -> Result<()> {
        match self {
            Block::Perm(p) => p.apply_xor_into(v, acc),
            Block::Shift => {
                if v.len() != acc.len() {
                    return Err(Error::dim(acc.len(), v.len()));
                }
                for r in 1..v.len() {
                    if v.get(r - 1) {
                        acc.flip(r);
                    }
                }
                Ok(())
            }
        }
    }

    pub fn as_perm(&self) -> Option<&PermutationMap> {
        match self {
            Block::Perm(p) => Some(p),
            Block::Shift => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchKind {
    #[default]
    None,
    Accumulator,
    RankRepaired,
}

impl PatchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatchKind::None => "none",
            PatchKind::Accumulator => "accumulator",
            PatchKind::RankRepaired => "rank-repaired",
        }
    }
}

/// State of the termination corner.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermPatch {
    pub kind: PatchKind,
    pub repair_attempts: u32,
    /// Entries toggled inside `H_term` by [`LiftedCode::repair_term_rank_or_flip`],
    /// as 0-based `(row, col)` of the full lifted matrix.
    pub flips: Vec<(usize, usize)>,
}

/// Rank status of the full lifted parity-check matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum RankStatus {
    FullRank {
        rank: usize,
    },
    Deficient {
        rank: usize,
        rows: usize,
    },
    /// Not checked; full rank is assumed.
    Assumed,
}

/// Sparse expanded parity-check matrix, adjacency lists with 0-based
/// indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseParity {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_cols: Vec<Vec<u32>>,
    pub col_rows: Vec<Vec<u32>>,
}

impl SparseParity {
    pub fn from_entries(n_rows: usize, n_cols: usize, mut entries: Vec<(u32, u32)>) -> Self {
        entries.sort_unstable();
        // Duplicates cancel over GF(2).
        let mut kept: Vec<(u32, u32)> = Vec::with_capacity(entries.len());
        for e in entries {
            if kept.last() == Some(&e) {
                kept.pop();
            } else {
                kept.push(e);
            }
        }
        let mut row_cols = vec![Vec::new(); n_rows];
        let mut col_rows = vec![Vec::new(); n_cols];
        for (r, c) in kept {
            row_cols[r as usize].push(c);
            col_rows[c as usize].push(r);
        }
        Self {
            n_rows,
            n_cols,
            row_cols,
            col_rows,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.row_cols.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> DenseGf2Matrix {
        let mut d = DenseGf2Matrix::zeros(self.n_rows, self.n_cols);
        for (r, cols) in self.row_cols.iter().enumerate() {
            for &c in cols {
                d.set(r, c as usize, true);
            }
        }
        d
    }

    /// `H x` for a flat word.
    pub fn syndrome(&self, word: &BitVector) -> Result<BitVector> {
        if word.len() != self.n_cols {
            return Err(Error::dim(self.n_cols, word.len()));
        }
        Ok(BitVector::from_bits(self.row_cols.iter().map(|cols| {
            cols.iter().filter(|&&c| word.get(c as usize)).count() % 2 == 1
        })))
    }
}

/// Lifted spatially-coupled code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedCode {
    base: BaseMatrix,
    accounting: BitAccounting,
    m: usize,
    seed: u64,
    blocks: BTreeMap<(usize, usize), Block>,
    patch: TermPatch,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream that draws the permutation of block `(i, j)`.
/// Attempt 0 is the initial lift; later attempts are rank-repair redraws.
pub fn edge_seed(master: u64, i: usize, j: usize, attempt: u32) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ i as u64);
    h = splitmix64(h ^ ((j as u64) << 20));
    splitmix64(h ^ ((attempt as u64) << 40))
}

fn draw_perm(m: usize, master: u64, i: usize, j: usize, attempt: u32) -> PermutationMap {
    let mut rng = ChaCha8Rng::seed_from_u64(edge_seed(master, i, j, attempt));
    PermutationMap::random(m, &mut rng)
}

impl LiftedCode {
    /// Replaces each 1 of `base` by an independently drawn uniform `M×M`
    /// permutation.
    pub fn lift(base: &BaseMatrix, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("lifting number M must be at least 1".into()));
        }
        let keys: Vec<(usize, usize)> = base
            .edges()
            .into_iter()
            .map(|(i, c)| (i, base.local_index(i, c).expect("edge is inside the band")))
            .collect();
        let blocks = keys
            .par_iter()
            .map(|&(i, j)| ((i, j), Block::Perm(draw_perm(m, seed, i, j, 0))))
            .collect();
        Ok(Self {
            accounting: BitAccounting::new(base.params())?,
            base: base.clone(),
            m,
            seed,
            blocks,
            patch: TermPatch::default(),
        })
    }

    pub fn params(&self) -> &CodeParams {
        self.base.params()
    }

    pub fn base(&self) -> &BaseMatrix {
        &self.base
    }

    pub fn accounting(&self) -> &BitAccounting {
        &self.accounting
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn patch(&self) -> &TermPatch {
        &self.patch
    }

    pub fn n_bits(&self) -> usize {
        self.params().n_sections() * self.m
    }

    pub fn n_check_bits(&self) -> usize {
        self.params().n_checks() * self.m
    }

    /// Block `(i, j)` by row and local band position.
    pub fn block(&self, i: usize, j: usize) -> Option<&Block> {
        self.blocks.get(&(i, j))
    }

    /// Block of row `i` over section `c`.
    pub fn block_at(&self, i: usize, c: usize) -> Option<&Block> {
        let j = self.base.local_index(i, c)?;
        self.blocks.get(&(i, j))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &Block)> {
        self.blocks.iter()
    }

    /// Installs the accumulator termination corner
    /// `[[I, I'], [I, I]]` at rows `L, L+1` and sections `kL-1, kL`.
    pub fn apply_accumulator_patch(mut self) -> Result<Self> {
        let p = *self.params();
        if !p.modified {
            return Err(Error::State("accumulator patch applies to modified codes only".into()));
        }
        if self.patch.kind != PatchKind::None {
            return Err(Error::State(format!(
                "code already patched ({})",
                self.patch.kind.as_str()
            )));
        }
        let (l, k, dl, dr) = (p.l, p.k(), p.dl, p.dr);
        let id = Block::Perm(PermutationMap::identity(self.m));
        for (key, block) in [
            ((l, dr - 1), id.clone()),
            ((l, dr), Block::Shift),
            ((l + 1, (dl - 1) * k - 1), id.clone()),
            ((l + 1, (dl - 1) * k), id),
        ] {
            let slot = self
                .blocks
                .get_mut(&key)
                .ok_or_else(|| Error::State(format!("missing block {key:?}")))?;
            *slot = block;
        }
        self.patch.kind = PatchKind::Accumulator;
        Ok(self)
    }

    /// Dense termination block `H_term`: rows of the termination stage
    /// against the last `n_term` sections, including any toggled entries.
    pub fn term_block(&self) -> DenseGf2Matrix {
        let acc = &self.accounting;
        let m = self.m;
        let n = acc.n_term * m;
        let first_row = acc.n_seq + 1;
        let first_col = acc.term_parity_positions[0];
        let mut h = DenseGf2Matrix::zeros(n, n);
        for i in acc.term_rows() {
            for c in acc.term_parity_positions.iter().copied() {
                if let Some(block) = self.block_at(i, c) {
                    for b in 0..m {
                        if let Some(r) = block.row_of(b, m) {
                            h.flip((i - first_row) * m + r, (c - first_col) * m + b);
                        }
                    }
                }
            }
        }
        let (row0, col0) = ((first_row - 1) * m, (first_col - 1) * m);
        for &(r, c) in &self.patch.flips {
            h.flip(r - row0, c - col0);
        }
        h
    }

    /// True when the 0/1 pattern of `H_term` (its `M = 1` version) is
    /// singular. A left null vector `u` of the pattern gives the left null
    /// vector `u ⊗ 1` of `H_term` for every choice of permutations, so no
    /// redraw can make the block invertible.
    pub fn term_block_structurally_singular(&self) -> bool {
        let acc = &self.accounting;
        let rows: Vec<usize> = acc.term_rows().collect();
        let mut pattern = DenseGf2Matrix::zeros(rows.len(), acc.term_parity_positions.len());
        for (r, &i) in rows.iter().enumerate() {
            for (c, &col) in acc.term_parity_positions.iter().enumerate() {
                if self.block_at(i, col).is_some() {
                    pattern.set(r, c, true);
                }
            }
        }
        pattern.rank() < rows.len()
    }

    /// Redraws the permutations inside `H_term` until it is full rank.
    /// A full-rank block is returned untouched.
    pub fn repair_term_rank(self, max_attempts: u32) -> Result<Self> {
        if self.params().modified {
            return Err(Error::State("rank repair applies to original codes only".into()));
        }
        let size = self.accounting.n_term * self.m;
        let rank = self.term_block().rank();
        if rank == size {
            return Ok(self);
        }
        let mut best_rank = rank;
        let mut code = self;
        for attempt in 1..=max_attempts {
            code.redraw_term_blocks(attempt);
            let rank = code.term_block().rank();
            if rank == size {
                code.patch.kind = PatchKind::RankRepaired;
                code.patch.repair_attempts = attempt;
                return Ok(code);
            }
            best_rank = best_rank.max(rank);
        }
        Err(Error::RankRepair {
            attempts: max_attempts,
            rank: best_rank,
            size,
        })
    }

    /// Like [`repair_term_rank`](Self::repair_term_rank), but when
    /// redrawing cannot help (structurally singular block) or all attempts
    /// fail, toggles a minimal set of entries of the initially drawn `H_term`
    /// so that it becomes invertible. Each toggle raises the rank by one.
    pub fn repair_term_rank_or_flip(self, max_attempts: u32) -> Result<Self> {
        if self.params().modified {
            return Err(Error::State("rank repair applies to original codes only".into()));
        }
        let size = self.accounting.n_term * self.m;
        if self.term_block().rank() == size {
            return Ok(self);
        }
        let attempts = if self.term_block_structurally_singular() {
            0
        } else {
            match self.clone().repair_term_rank(max_attempts) {
                Ok(code) => return Ok(code),
                Err(Error::RankRepair { attempts, .. }) => attempts,
                Err(e) => return Err(e),
            }
        };
        let mut code = self;
        let h = code.term_block();
        let mut work = h.clone();
        let pivots = work.eliminate(None).pivots;
        let mut pivot_row = vec![false; size];
        let mut pivot_col = vec![false; size];
        for &(r, c) in &pivots {
            pivot_row[r] = true;
            pivot_col[c] = true;
        }
        let dep_rows = (0..size).filter(|&r| !pivot_row[r]);
        let free_cols = (0..size).filter(|&c| !pivot_col[c]);
        // Toggling the dependent rows against the free columns turns the
        // (zero) Schur complement of the pivot block into a permutation.
        let first_row = code.accounting.n_seq;
        let first_col = code.accounting.term_parity_positions[0] - 1;
        let m = code.m;
        code.patch.flips = dep_rows
            .zip(free_cols)
            .map(|(r, c)| (first_row * m + r, first_col * m + c))
            .collect();
        code.patch.kind = PatchKind::RankRepaired;
        code.patch.repair_attempts = attempts;
        debug_assert_eq!(code.term_block().rank(), size);
        Ok(code)
    }

    fn redraw_term_blocks(&mut self, attempt: u32) {
        let rows: Vec<usize> = self.accounting.term_rows().collect();
        let cols = self.accounting.term_parity_positions.clone();
        for i in rows {
            for &c in &cols {
                if let Some(j) = self.base.local_index(i, c) {
                    self.blocks
                        .insert((i, j), Block::Perm(draw_perm(self.m, self.seed, i, j, attempt)));
                }
            }
        }
    }

    /// Per block-row syndromes `Σ_j B_{i,j} x_{ik-d_r+j}` plus toggled
    /// entries. `sections` holds `x_1..x_{kL}` in order.
    pub fn block_syndromes(&self, sections: &[BitVector]) -> Result<Vec<BitVector>> {
        let n = self.params().n_sections();
        if sections.len() != n {
            return Err(Error::dim(n, sections.len()));
        }
        if let Some(bad) = sections.iter().find(|s| s.len() != self.m) {
            return Err(Error::dim(self.m, bad.len()));
        }
        let mut out = vec![BitVector::zeros(self.m); self.params().n_checks()];
        for (&(i, j), block) in &self.blocks {
            let c = self.base.global_col(i, j).expect("stored blocks are inside the band");
            block.apply_xor_into(&sections[c - 1], &mut out[i - 1])?;
        }
        for &(r, c) in &self.patch.flips {
            if sections[c / self.m].get(c % self.m) {
                out[r / self.m].flip(r % self.m);
            }
        }
        Ok(out)
    }

    /// Expanded sparse parity-check matrix.
    pub fn parity_check(&self) -> SparseParity {
        let m = self.m;
        let mut entries = Vec::with_capacity(self.blocks.len() * m + self.patch.flips.len());
        for (&(i, j), block) in &self.blocks {
            let c = self.base.global_col(i, j).expect("stored blocks are inside the band");
            for b in 0..m {
                if let Some(r) = block.row_of(b, m) {
                    entries.push((((i - 1) * m + r) as u32, ((c - 1) * m + b) as u32));
                }
            }
        }
        entries.extend(self.patch.flips.iter().map(|&(r, c)| (r as u32, c as u32)));
        SparseParity::from_entries(self.n_check_bits(), self.n_bits(), entries)
    }

    /// Checks the whole lifted matrix for full row rank when `M` is small
    /// enough for dense elimination; larger codes report `Assumed`.
    pub fn full_rank_status(&self) -> RankStatus {
        if self.m > FULL_RANK_CHECK_MAX_M {
            return RankStatus::Assumed;
        }
        let rows = self.n_check_bits();
        let rank = self.parity_check().to_dense().rank();
        if rank == rows {
            RankStatus::FullRank { rank }
        } else {
            RankStatus::Deficient { rank, rows }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CodeFile::from_code(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), format!("column {}: {e}", e.column())))?;
        file.into_code()
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub fn lift(base: &BaseMatrix, m: usize, seed: u64) -> Result<LiftedCode> {
    LiftedCode::lift(base, m, seed)
}

/// On-disk form of a [`LiftedCode`].
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    version: String,
    dl: usize,
    dr: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "M")]
    m: usize,
    modified: bool,
    seed: u64,
    patch_kind: PatchKind,
    #[serde(default)]
    repair_attempts: u32,
    perms: Vec<(usize, usize, Vec<usize>)>,
    #[serde(default)]
    shift_blocks: Vec<(usize, usize)>,
    #[serde(default)]
    term_flips: Vec<(usize, usize)>,
}

impl CodeFile {
    fn from_code(code: &LiftedCode) -> Self {
        let p = code.params();
        let mut perms = Vec::new();
        let mut shift_blocks = Vec::new();
        for (&(i, j), block) in &code.blocks {
            match block {
                Block::Perm(perm) => perms.push((i, j, perm.image_one_based())),
                Block::Shift => shift_blocks.push((i, j)),
            }
        }
        Self {
            version: FORMAT_VERSION.into(),
            dl: p.dl,
            dr: p.dr,
            l: p.l,
            m: code.m,
            modified: p.modified,
            seed: code.seed,
            patch_kind: code.patch.kind,
            repair_attempts: code.patch.repair_attempts,
            perms,
            shift_blocks,
            term_flips: code.patch.flips.iter().map(|&(r, c)| (r + 1, c + 1)).collect(),
        }
    }

    fn into_code(self) -> Result<LiftedCode> {
        let invalid = |msg: String| Error::parse(0, msg);
        if self.version != FORMAT_VERSION {
            return Err(invalid(format!("unsupported version {:?}", self.version)));
        }
        let params = CodeParams::new(self.dl, self.dr, self.l, self.modified)?;
        if self.m == 0 {
            return Err(invalid("M must be at least 1".into()));
        }
        let base = BaseMatrix::build(params)?;
        let mut blocks = BTreeMap::new();
        for (i, j, image) in self.perms {
            if image.len() != self.m {
                return Err(invalid(format!(
                    "block ({i},{j}) has {} entries, expected {}",
                    image.len(),
                    self.m
                )));
            }
            let perm = PermutationMap::from_one_based(&image).map_err(|e| invalid(format!("block ({i},{j}): {e}")))?;
            if blocks.insert((i, j), Block::Perm(perm)).is_some() {
                return Err(invalid(format!("block ({i},{j}) listed twice")));
            }
        }
        for (i, j) in self.shift_blocks {
            if blocks.insert((i, j), Block::Shift).is_some() {
                return Err(invalid(format!("block ({i},{j}) listed twice")));
            }
        }
        let expected: Vec<(usize, usize)> = base
            .edges()
            .into_iter()
            .map(|(i, c)| (i, base.local_index(i, c).expect("edge is inside the band")))
            .collect();
        if blocks.len() != expected.len() || expected.iter().any(|k| !blocks.contains_key(k)) {
            return Err(invalid("block positions do not match the base matrix".into()));
        }
        match (self.patch_kind, params.modified) {
            (PatchKind::Accumulator, false) | (PatchKind::RankRepaired, true) => {
                return Err(invalid(format!(
                    "patch kind {} is not valid for a {} code",
                    self.patch_kind.as_str(),
                    params.variant_name()
                )))
            }
            _ => {}
        }
        let accounting = BitAccounting::new(&params)?;
        let m = self.m;
        let row_range = (accounting.n_seq * m)..(accounting.n_seq + accounting.n_term) * m;
        let col_range = (accounting.term_parity_positions[0] - 1) * m..params.n_sections() * m;
        let mut flips = Vec::with_capacity(self.term_flips.len());
        for (r, c) in self.term_flips {
            let (r, c) = (r.wrapping_sub(1), c.wrapping_sub(1));
            if !row_range.contains(&r) || !col_range.contains(&c) {
                return Err(invalid(format!(
                    "toggled entry ({}, {}) lies outside H_term",
                    r + 1,
                    c + 1
                )));
            }
            flips.push((r, c));
        }
        Ok(LiftedCode {
            base,
            accounting,
            m,
            seed: self.seed,
            blocks,
            patch: TermPatch {
                kind: self.patch_kind,
                repair_attempts: self.repair_attempts,
                flips,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(dl: usize, dr: usize, l: usize, modified: bool, m: usize, seed: u64) -> LiftedCode {
        let base = BaseMatrix::build(CodeParams::new(dl, dr, l, modified).unwrap()).unwrap();
        LiftedCode::lift(&base, m, seed).unwrap()
    }

    #[test]
    fn m1_lift_equals_base() {
        let c = code(4, 12, 9, false, 1, 3);
        let dense = c.parity_check().to_dense();
        let rows = c.base().to_rows();
        for (r, row) in rows.iter().enumerate() {
            for (col, &b) in row.iter().enumerate() {
                assert_eq!(dense.get(r, col), b == 1);
            }
        }
        assert!(c.blocks().all(|(_, b)| b.as_perm().unwrap().is_identity()));
    }

    #[test]
    fn lift_rejects_zero_m() {
        let base = BaseMatrix::build(CodeParams::original(3, 6, 3).unwrap()).unwrap();
        assert!(matches!(LiftedCode::lift(&base, 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn lift_is_deterministic() {
        let a = code(3, 6, 3, false, 4, 42);
        let b = code(3, 6, 3, false, 4, 42);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = code(3, 6, 3, false, 4, 43);
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn lifted_degrees_follow_base() {
        let c = code(4, 12, 9, false, 8, 77);
        let h = c.parity_check();
        assert_eq!((h.n_rows, h.n_cols), (96, 216));
        assert!(h.col_rows.iter().all(|r| r.len() == 4));
        for i in 1..=c.params().n_checks() {
            let ones: usize = (0..8).map(|r| h.row_cols[(i - 1) * 8 + r].len()).sum();
            assert_eq!(ones, c.base().row_weight(i) * 8);
        }
    }

    #[test]
    fn patch_m1_block() {
        let c = code(4, 12, 9, true, 1, 5).apply_accumulator_patch().unwrap();
        let t = c.term_block();
        assert_eq!(t, DenseGf2Matrix::from_rows(&[[1u8, 0], [1, 1]]).unwrap());
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn patch_rank_and_structure() {
        for m in [1, 2, 4, 8, 16, 32] {
            let raw = code(3, 6, 9, true, m, m as u64);
            if m > 1 {
                assert!(raw.term_block().rank() < 2 * m);
            }
            let patched = raw.clone().apply_accumulator_patch().unwrap();
            assert_eq!(patched.term_block().rank(), 2 * m);
            let changed: Vec<_> = raw
                .blocks()
                .zip(patched.blocks())
                .filter(|(a, b)| a.1 != b.1 || a.0 != b.0)
                .map(|(a, _)| *a.0)
                .collect();
            // Identity blocks of M = 1 coincide with the drawn 1x1 permutations.
            assert!(changed.len() <= 4);
            if m > 1 {
                assert!(changed.contains(&(9, 5)));
            }
        }
    }

    #[test]
    fn patch_exact_blocks() {
        let c = code(4, 12, 9, true, 8, 5).apply_accumulator_patch().unwrap();
        let id = Block::Perm(PermutationMap::identity(8));
        assert_eq!(c.block_at(9, 26), Some(&id));
        assert_eq!(c.block_at(9, 27), Some(&Block::Shift));
        assert_eq!(c.block_at(10, 26), Some(&id));
        assert_eq!(c.block_at(10, 27), Some(&id));
        assert_eq!(c.patch().kind, PatchKind::Accumulator);
    }

    #[test]
    fn patch_errors() {
        assert!(matches!(
            code(3, 6, 9, false, 4, 1).apply_accumulator_patch(),
            Err(Error::State(_))
        ));
        let p = code(3, 6, 9, true, 4, 1).apply_accumulator_patch().unwrap();
        assert!(matches!(p.apply_accumulator_patch(), Err(Error::State(_))));
    }

    #[test]
    fn m1_term_block_4_12_9() {
        // Every block is the 1x1 identity: rows 8..12 over sections 23..27.
        let c = code(4, 12, 9, false, 1, 9);
        let expected = DenseGf2Matrix::from_rows(&[
            [1u8, 1, 0, 0, 0],
            [1, 1, 1, 1, 1],
            [1, 1, 1, 1, 1],
            [1, 1, 1, 1, 1],
            [0, 0, 1, 1, 1],
        ])
        .unwrap();
        assert_eq!(c.term_block(), expected);
        assert_eq!(expected.rank(), 2);
        assert!(c.term_block_structurally_singular());
        assert!(matches!(c.clone().repair_term_rank(5), Err(Error::RankRepair { .. })));
        let fixed = c.repair_term_rank_or_flip(5).unwrap();
        assert_eq!(fixed.term_block().rank(), 5);
        assert_eq!(fixed.patch().flips.len(), 3);
        assert_eq!(fixed.patch().kind, PatchKind::RankRepaired);
    }

    #[test]
    fn redraws_cannot_fix_singular_pattern() {
        for (dl, dr) in [(3, 6), (4, 8), (3, 9), (4, 12)] {
            let base = code(dl, dr, 9, false, 1, 0);
            let deficiency = base.term_block().rows() - base.term_block().rank();
            assert!(base.term_block_structurally_singular());
            for seed in 0..5 {
                let c = code(dl, dr, 9, false, 8, seed);
                let t = c.term_block();
                assert!(t.rank() <= t.rows() - deficiency);
            }
        }
        assert!(matches!(
            code(3, 6, 9, false, 16, 0).repair_term_rank(10),
            Err(Error::RankRepair { attempts: 10, .. })
        ));
    }

    #[test]
    fn flip_repair_restores_full_rank() {
        for (seed, (dl, dr)) in [(3, 6), (4, 8), (3, 9), (4, 12)].into_iter().enumerate() {
            let c = code(dl, dr, 9, false, 16, seed as u64);
            let deficiency = c.term_block().rows() - c.term_block().rank();
            let fixed = c.repair_term_rank_or_flip(2).unwrap();
            let t = fixed.term_block();
            assert_eq!(t.rank(), t.rows());
            assert_eq!(fixed.patch().flips.len(), deficiency);
            assert_eq!(fixed.clone().repair_term_rank_or_flip(2).unwrap(), fixed);
            // Re-import keeps the toggles.
            let back = LiftedCode::from_json(&fixed.to_json().unwrap()).unwrap();
            assert_eq!(back, fixed);
        }
    }

    #[test]
    fn json_round_trip() {
        let c = code(4, 12, 9, true, 8, 11).apply_accumulator_patch().unwrap();
        let back = LiftedCode::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_errors_are_reported() {
        assert!(matches!(
            LiftedCode::from_json("{\"version\": "),
            Err(Error::Parse { .. })
        ));
        let c = code(3, 6, 3, false, 2, 1);
        let text = c.to_json().unwrap().replace("scc-v1", "scc-v0");
        assert!(matches!(LiftedCode::from_json(&text), Err(Error::Parse { .. })));
        let text = c.to_json().unwrap().replacen("\"M\":2", "\"M\":3", 1);
        assert!(matches!(LiftedCode::from_json(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn block_syndromes_match_expanded_matrix() {
        let c = code(3, 6, 5, true, 8, 3).apply_accumulator_patch().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sections: Vec<BitVector> = (0..c.params().n_sections())
            .map(|_| BitVector::random(8, &mut rng))
            .collect();
        let blockwise = BitVector::concat(&c.block_syndromes(&sections).unwrap());
        let flat = c.parity_check().syndrome(&BitVector::concat(&sections)).unwrap();
        assert_eq!(blockwise, flat);
    }

    #[test]
    fn small_full_rank_status() {
        let c = code(3, 6, 5, false, 4, 2);
        assert!(!matches!(c.full_rank_status(), RankStatus::Assumed));
        let big = code(3, 6, 5, false, 128, 2);
        assert_eq!(big.full_rank_status(), RankStatus::Assumed);
        // Even column weight: all rows of H sum to zero.
        let even = code(4, 8, 5, false, 4, 2);
        assert!(matches!(even.full_rank_status(), RankStatus::Deficient { .. }));
    }
}
