//! Dense linear algebra over the two-element field.
//!
//! Matrices are stored row-major with each row packed into `u64` words, so a
//! row operation is a word-parallel XOR. Pivot selection is always the first
//! nonzero entry in scan order, which keeps every derived basis reproducible.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over F2 of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector with ones at `indices`. Repeated indices cancel.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Index of the highest set bit, if any.
    pub fn highest_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD + (WORD - 1 - w.leading_zeros() as usize));
            }
        }
        None
    }

    /// Indices of the set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVector({s})")
    }
}

/// A dense `rows × cols` matrix over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must have equal length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &x) in r.iter().enumerate() {
                if x & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.ones() {
                m.set(i, j, true);
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}x{}", self.rows, self.cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}x{}", self.rows, self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of {}x{}", self.rows, self.cols);
        self.data[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVector {
        assert!(i < self.rows);
        BitVector { len: self.cols, words: self.row_words(i).to_vec() }
    }

    pub fn column(&self, j: usize) -> BitVector {
        assert!(j < self.cols);
        let mut v = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn columns(&self) -> Vec<BitVector> {
        let t = self.transpose();
        (0..t.rows).map(|i| t.row(i)).collect()
    }

    /// `row[dst] ^= row[src]`
    #[inline]
    fn xor_rows(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let j = wi * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product: {:?} · {:?}", self.shape(), other.shape());
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        let s = out.stride;
        for i in 0..self.rows {
            for (wi, &w) in self.row_words(i).iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let k = wi * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    let src = other.row_words(k);
                    for (d, x) in out.data[i * s..(i + 1) * s].iter_mut().zip(src) {
                        *d ^= x;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(i, j, true);
                }
            }
            for j in 0..other.cols {
                if other.get(i, j) {
                    out.set(i, self.cols + j, true);
                }
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut out = BitMatrix::zeros(self.rows + other.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        out
    }

    /// The block of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> BitMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        BitMatrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Writes `m` into this matrix with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, m: &BitMatrix) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.set(r0 + i, c0 + j, m.get(i, j));
            }
        }
    }

    /// In-place reduced row echelon form restricted to the first `limit`
    /// columns. Returns the pivot column of each of the leading rows.
    fn rref_in_place(&mut self, limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_rows(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Forward elimination only; enough for counting pivots.
    fn echelon_rank(&mut self) -> usize {
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in r + 1..self.rows {
                if self.get(i, c) {
                    self.xor_rows(r, i);
                }
            }
            r += 1;
        }
        r
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let s: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

/// Rank of `m` over F2.
pub fn rank(m: &BitMatrix) -> usize {
    // Eliminate along the shorter side.
    if m.rows <= m.cols {
        m.clone().echelon_rank()
    } else {
        m.transpose().echelon_rank()
    }
}

/// A basis of the null space `{v : m·v = 0}`.
pub fn kernel_basis(m: &BitMatrix) -> Vec<BitVector> {
    let mut r = m.clone();
    let pivots = r.rref_in_place(m.cols);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVector::unit(m.cols, f);
            for (row, &pc) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect()
}

/// Some `x` with `m·x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &BitMatrix, b: &BitVector) -> Result<Option<BitVector>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows
        )));
    }
    let mut aug = BitMatrix::zeros(m.rows, m.cols + 1);
    aug.put_block(0, 0, m);
    for i in b.ones() {
        aug.set(i, m.cols, true);
    }
    let pivots = aug.rref_in_place(m.cols);
    for row in pivots.len()..m.rows {
        if aug.get(row, m.cols) {
            return Ok(None);
        }
    }
    let mut x = BitVector::zeros(m.cols);
    for (row, &pc) in pivots.iter().enumerate() {
        if aug.get(row, m.cols) {
            x.set(pc, true);
        }
    }
    Ok(Some(x))
}

/// Unit vectors that extend a basis of the column space of `sub` to a basis
/// of `F2^ambient_dim`.
pub fn image_complement_basis(sub: &BitMatrix, ambient_dim: usize) -> Vec<BitVector> {
    assert_eq!(sub.rows, ambient_dim, "subspace generators must live in the ambient space");
    let mut gens = sub.transpose();
    let pivots = gens.rref_in_place(ambient_dim);
    let mut covered = vec![false; ambient_dim];
    for &p in &pivots {
        covered[p] = true;
    }
    (0..ambient_dim)
        .filter(|&j| !covered[j])
        .map(|j| BitVector::unit(ambient_dim, j))
        .collect()
}
