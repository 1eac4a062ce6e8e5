//! Packed binary linear algebra.
//!
//! [`BitVector`] holds one section `x_j ∈ F_2^M` of a codeword (bit positions
//! are 0-based), [`PermutationMap`] is an `M×M` permutation matrix stored as
//! its image, and [`DenseGf2Matrix`] is a small row-major packed matrix used
//! for termination solving and rank checks. Row operations XOR whole 64-bit
//! words.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Fixed-length packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self { words, len }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self {
            words: (0..words_for(len)).map(|_| rng.gen()).collect(),
            len,
        };
        v.clear_tail();
        v
    }

    /// [`random`](Self::random) driven by a ChaCha8 stream seeded with `seed`.
    pub fn random_seeded(len: usize, seed: u64) -> Self {
        Self::random(len, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len {})", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `self ^= other`.
    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if other.len != self.len {
            return Err(Error::dim(self.len, other.len));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Parity of `popcount(self & other)`, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        if other.len != self.len {
            return Err(Error::dim(self.len, other.len));
        }
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones & 1 == 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Concatenates several vectors into one.
    pub fn concat(parts: &[BitVector]) -> BitVector {
        BitVector::from_bits(parts.iter().flat_map(|p| p.iter()))
    }

    /// Splits into consecutive chunks of `chunk` bits. The length must be a
    /// multiple of `chunk`.
    pub fn split(&self, chunk: usize) -> Result<Vec<BitVector>> {
        if chunk == 0 || !self.len.is_multiple_of(chunk) {
            return Err(Error::dim(chunk, self.len));
        }
        Ok((0..self.len / chunk)
            .map(|c| BitVector::from_bits((c * chunk..(c + 1) * chunk).map(|i| self.get(i))))
            .collect())
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (pos, c) in s.trim().chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::parse(
                        1,
                        format!("unexpected character {other:?} at offset {pos}"),
                    ))
                }
            }
        }
        Ok(BitVector::from_bits(bits))
    }
}

/// `M×M` permutation matrix. Column `j` has its single 1 in row `image[j]`,
/// so applying it moves bit `j` to position `image[j]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PermutationMap {
    image: Vec<u32>,
    inverse: Vec<u32>,
}

impl PermutationMap {
    /// Builds from a 0-based image, checking that it is a bijection.
    pub fn new(image: Vec<u32>) -> Result<Self> {
        let m = image.len();
        if m == 0 {
            return Err(Error::InvalidPermutation("empty image".into()));
        }
        let mut inverse = vec![u32::MAX; m];
        for (j, &p) in image.iter().enumerate() {
            let p = p as usize;
            if p >= m {
                return Err(Error::InvalidPermutation(format!(
                    "image {p} out of range for size {m}"
                )));
            }
            if inverse[p] != u32::MAX {
                return Err(Error::InvalidPermutation(format!("image {p} repeated")));
            }
            inverse[p] = j as u32;
        }
        Ok(Self { image, inverse })
    }

    /// Builds from a 1-based image over `[1, M]`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        let zero = image
            .iter()
            .map(|&p| {
                if p == 0 {
                    Err(Error::InvalidPermutation("1-based image contains 0".into()))
                } else {
                    Ok((p - 1) as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero)
    }

    pub fn identity(m: usize) -> Self {
        let image: Vec<u32> = (0..m as u32).collect();
        Self {
            inverse: image.clone(),
            image,
        }
    }

    /// `j -> (j + shift) mod m`.
    pub fn cyclic_shift(m: usize, shift: usize) -> Self {
        Self::new((0..m).map(|j| ((j + shift) % m) as u32).collect()).expect("cyclic shift is a bijection")
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut image: Vec<u32> = (0..m as u32).collect();
        for i in (1..m).rev() {
            let j = rng.gen_range(0..=i);
            image.swap(i, j);
        }
        Self::new(image).expect("shuffle is a bijection")
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(j, &p)| p as usize == j)
    }

    #[inline]
    pub fn map(&self, j: usize) -> usize {
        self.image[j] as usize
    }

    #[inline]
    pub fn inverse_map(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn image_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|&p| p as usize + 1).collect()
    }

    /// `result[i] = v[p^{-1}(i)]`.
    pub fn apply(&self, v: &BitVector) -> Result<BitVector> {
        let mut out = BitVector::zeros(self.len());
        self.apply_xor_into(v, &mut out)?;
        Ok(out)
    }

    /// `result[i] = v[p(i)]`.
    pub fn apply_inverse(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.len() {
            return Err(Error::dim(self.len(), v.len()));
        }
        Ok(BitVector::from_bits((0..self.len()).map(|i| v.get(self.map(i)))))
    }

    /// `acc ^= P v` without allocating.
    pub fn apply_xor_into(&self, v: &BitVector, acc: &mut BitVector) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::dim(self.len(), v.len()));
        }
        if acc.len() != self.len() {
            return Err(Error::dim(self.len(), acc.len()));
        }
        for (w, &word) in v.words().iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                acc.flip(self.map(w * WORD + b));
                bits &= bits - 1;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PermutationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("PermutationMap").field(&self.image).finish()
    }
}

/// Row-major packed matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct DenseGf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl DenseGf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::dim(cols, r.len()));
            }
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x & 1 == 1);
            }
        }
        Ok(m)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.gen());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / WORD] ^= 1 << (c % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            words: self.data[r * self.stride..(r + 1) * self.stride].to_vec(),
            len: self.cols,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// `row[dst] ^= row[src]`.
    pub fn add_row(&mut self, dst: usize, src: usize) {
        xor_rows(&mut self.data, self.stride, dst, src, 0);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.stride {
                self.data.swap(a * self.stride + w, b * self.stride + w);
            }
        }
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::dim(self.cols, v.len()));
        }
        Ok(BitVector::from_bits((0..self.rows).map(|r| {
            let row = &self.data[r * self.stride..(r + 1) * self.stride];
            row.iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1
                == 1
        })))
    }

    pub fn mul(&self, other: &DenseGf2Matrix) -> Result<DenseGf2Matrix> {
        if other.rows != self.cols {
            return Err(Error::dim(self.cols, other.rows));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.stride {
                        out.data[r * out.stride + w] ^= other.data[k * other.stride + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(None).pivots.len()
    }

    /// Solves `A x = b` for square invertible `A` by Gauss–Jordan
    /// elimination. The pivot for each column is the lowest-index remaining
    /// row with that bit set.
    pub fn solve(&self, b: &BitVector) -> Result<BitVector> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.len() != self.rows {
            return Err(Error::dim(self.rows, b.len()));
        }
        let mut m = self.clone();
        let mut rhs = b.clone();
        let elim = m.eliminate(Some(&mut rhs));
        if elim.pivots.len() < self.cols {
            return Err(Error::Singular);
        }
        // After full reduction row r holds the pivot for column r.
        Ok(rhs)
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Result<DenseGf2Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| aug.get(r, c)) else {
                return Err(Error::Singular);
            };
            aug.swap_rows(c, p);
            for r in 0..n {
                if r != c && aug.get(r, c) {
                    xor_rows(&mut aug.data, aug.stride, r, c, c / WORD);
                }
            }
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Ok(inv)
    }

    /// Reduced row echelon form in place. Returns the pivot positions as
    /// `(original row index, column)` pairs; rows are permuted so that the
    /// t-th pivot sits in row t.
    pub(crate) fn eliminate(&mut self, mut rhs: Option<&mut BitVector>) -> Elimination {
        let mut origin: Vec<usize> = (0..self.rows).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(rank, p);
            origin.swap(rank, p);
            if let Some(b) = rhs.as_deref_mut() {
                let (x, y) = (b.get(rank), b.get(p));
                b.set(rank, y);
                b.set(p, x);
            }
            for r in 0..self.rows {
                if r != rank && self.get(r, c) {
                    xor_rows(&mut self.data, self.stride, r, rank, c / WORD);
                    if let Some(b) = rhs.as_deref_mut() {
                        if b.get(rank) {
                            b.flip(r);
                        }
                    }
                }
            }
            pivots.push((origin[rank], c));
            rank += 1;
        }
        Elimination { pivots }
    }
}

pub(crate) struct Elimination {
    pub pivots: Vec<(usize, usize)>,
}

#[inline]
fn xor_rows(data: &mut [u64], stride: usize, dst: usize, src: usize, from_word: usize) {
    debug_assert_ne!(dst, src);
    let (d, s) = (dst * stride, src * stride);
    if dst < src {
        let (lo, hi) = data.split_at_mut(s);
        for w in from_word..stride {
            lo[d + w] ^= hi[w];
        }
    } else {
        let (lo, hi) = data.split_at_mut(d);
        for w in from_word..stride {
            hi[w] ^= lo[s + w];
        }
    }
}

impl fmt::Debug for DenseGf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseGf2Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn identity_permutation_is_noop() {
        let p = PermutationMap::identity(4);
        assert_eq!(p.apply(&bv("1011")).unwrap(), bv("1011"));
    }

    #[test]
    fn cyclic_shift_moves_bits_forward() {
        let p = PermutationMap::cyclic_shift(3, 1);
        assert_eq!(p.apply(&bv("100")).unwrap(), bv("010"));
    }

    #[test]
    fn permutation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = PermutationMap::random(16, &mut rng);
        let v = BitVector::random(16, &mut rng);
        assert_eq!(p.apply_inverse(&p.apply(&v).unwrap()).unwrap(), v);
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert!(PermutationMap::new(vec![0, 0, 1]).is_err());
        assert!(PermutationMap::new(vec![0, 3, 1]).is_err());
        assert!(PermutationMap::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn apply_length_mismatch() {
        let p = PermutationMap::identity(4);
        assert!(matches!(p.apply(&bv("101")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn solve_identity_system() {
        let a = DenseGf2Matrix::identity(4);
        assert_eq!(a.solve(&bv("0110")).unwrap(), bv("0110"));
    }

    #[test]
    fn solve_lower_triangular_2x2() {
        let a = DenseGf2Matrix::from_rows(&[[1u8, 0], [1, 1]]).unwrap();
        assert_eq!(a.solve(&bv("11")).unwrap(), bv("10"));
    }

    #[test]
    fn solve_rejects_singular_and_non_square() {
        let a = DenseGf2Matrix::from_rows(&[[1u8, 1], [1, 1]]).unwrap();
        assert!(matches!(a.solve(&bv("10")), Err(Error::Singular)));
        let b = DenseGf2Matrix::zeros(2, 3);
        assert!(matches!(b.solve(&bv("10")), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn solve_random_64_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut solved = 0;
        while solved < 5 {
            let a = DenseGf2Matrix::random(64, 64, &mut rng);
            if a.rank() < 64 {
                continue;
            }
            let b = BitVector::random(64, &mut rng);
            let x = a.solve(&b).unwrap();
            assert_eq!(a.mul_vec(&x).unwrap(), b);
            solved += 1;
        }
    }

    #[test]
    fn solve_exhaustive_small_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 1..=4usize {
            for _ in 0..20 {
                let a = DenseGf2Matrix::random(n, n, &mut rng);
                if a.rank() < n {
                    assert!(a.solve(&BitVector::zeros(n)).is_err());
                    continue;
                }
                for code in 0..(1u32 << n) {
                    let b = BitVector::from_bits((0..n).map(|i| code >> i & 1 == 1));
                    let x = a.solve(&b).unwrap();
                    assert_eq!(a.mul_vec(&x).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn rank_basics() {
        assert_eq!(DenseGf2Matrix::zeros(3, 3).rank(), 0);
        assert_eq!(DenseGf2Matrix::identity(5).rank(), 5);
        let a = DenseGf2Matrix::from_rows(&[[1u8, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap();
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn rank_of_transpose_and_under_row_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let rows = rng.gen_range(1..40);
            let cols = rng.gen_range(1..90);
            let a = DenseGf2Matrix::random(rows, cols, &mut rng);
            let r = a.rank();
            assert!(r <= rows.min(cols));
            assert_eq!(r, a.transpose().rank());
            let mut b = a.clone();
            for _ in 0..50 {
                let i = rng.gen_range(0..rows);
                let j = rng.gen_range(0..rows);
                if i == j {
                    continue;
                }
                if rng.gen() {
                    b.swap_rows(i, j);
                } else {
                    b.add_row(i, j);
                }
            }
            assert_eq!(b.rank(), r);
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut done = 0;
        while done < 4 {
            let n = 70;
            let a = DenseGf2Matrix::random(n, n, &mut rng);
            match a.inverse() {
                Ok(inv) => {
                    assert_eq!(a.mul(&inv).unwrap(), DenseGf2Matrix::identity(n));
                    done += 1;
                }
                Err(Error::Singular) => assert!(a.rank() < n),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn bitvector_split_concat() {
        let v = bv("110010");
        let parts = v.split(2).unwrap();
        assert_eq!(parts, vec![bv("11"), bv("00"), bv("10")]);
        assert_eq!(BitVector::concat(&parts), v);
        assert!(v.split(4).is_err());
    }

    proptest::proptest! {
        #[test]
        fn permutation_is_linear(seed in 0u64..1000, m in 1usize..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = PermutationMap::random(m, &mut rng);
            let a = BitVector::random(m, &mut rng);
            let b = BitVector::random(m, &mut rng);
            let lhs = p.apply(&a.xor(&b).unwrap()).unwrap();
            let rhs = p.apply(&a).unwrap().xor(&p.apply(&b).unwrap()).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
            proptest::prop_assert_eq!(p.apply_inverse(&p.apply(&a).unwrap()).unwrap(), a);
        }
    }
}
