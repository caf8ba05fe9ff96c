//! Dense linear algebra over GF(2) on bit-packed rows.

use crate::error::{Error, Result};

const W: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

/// A fixed-length bit vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in ones {
            v.toggle(i);
        }
        v
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        BitVec { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % W);
        if value {
            self.words[i / W] |= mask;
        } else {
            self.words[i / W] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVec { len: self.len, words }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the overlap with `other`.
    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * W + t)
            })
        })
    }

    /// Restriction to the listed coordinates, in that order.
    pub fn gather(&self, idx: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(idx.len());
        for (k, &i) in idx.iter().enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    /// Embeds a vector given on the listed coordinates into length `len`.
    pub fn scatter(&self, idx: &[usize], len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in self.iter_ones() {
            out.set(idx[i], true);
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// A dense row-major GF(2) matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Gf2Matrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row vectors of equal length.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Gf2Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_mut(i).copy_from_slice(&r.words);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[BitVec]) -> Self {
        Gf2Matrix::from_rows(rows, cols).transpose()
    }

    pub fn from_dense(rows: usize, cols: usize, entries: &[u8]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let mut m = Gf2Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if entries[r * cols + c] & 1 == 1 {
                    m.set(r, c, true);
                }
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
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_vec(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row(r).to_vec())
    }

    pub fn col_vec(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.stride + c / W] >> (c % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.stride + c / W];
        let mask = 1u64 << (c % W);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / W] ^= 1u64 << (c % W);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            for (wi, &w) in row.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let c = wi * W + w.trailing_zeros() as usize;
                    w &= w - 1;
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let ones: Vec<usize> = BitVec::from_words(self.cols, self.row(r).to_vec())
                .iter_ones()
                .collect();
            let dst = r * out.stride;
            for k in ones {
                let src = other.row(k);
                for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row(r).iter().zip(&v.words) {
                acc ^= (a & b).count_ones();
            }
            if acc & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Submatrix keeping the listed columns, in that order.
    pub fn select_cols(&self, cols: &[usize]) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            let row = self.row(r);
            for (k, &c) in cols.iter().enumerate() {
                if (row[c / W] >> (c % W)) & 1 == 1 {
                    out.set(r, k, true);
                }
            }
        }
        out
    }

    /// Submatrix keeping the listed rows, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(rows.len(), self.cols);
        for (k, &r) in rows.iter().enumerate() {
            let src = r * self.stride;
            out.data[k * self.stride..(k + 1) * self.stride].copy_from_slice(&self.data[src..src + self.stride]);
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Gf2Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        }
    }

    /// In-place reduced row echelon form. Returns the pivot columns; rows
    /// `0..pivots.len()` hold the nonzero part.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        self.eliminate(true)
    }

    fn eliminate(&mut self, reduced: bool) -> Vec<usize> {
        let stride = self.stride;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let wi = c / W;
            let bit = 1u64 << (c % W);
            let Some(p) = (r..self.rows).find(|&i| self.data[i * stride + wi] & bit != 0) else {
                continue;
            };
            if p != r {
                for k in wi..stride {
                    self.data.swap(p * stride + k, r * stride + k);
                }
            }
            let start = if reduced { 0 } else { r + 1 };
            let (head, tail) = self.data.split_at_mut(r * stride);
            let (pivot_row, rest) = tail.split_at_mut(stride);
            let pivot_tail = &pivot_row[wi..];
            for i in start..self.rows {
                if i == r {
                    continue;
                }
                let row = if i < r {
                    &mut head[i * stride..(i + 1) * stride]
                } else {
                    let o = (i - r - 1) * stride;
                    &mut rest[o..o + stride]
                };
                if row[wi] & bit != 0 {
                    for (d, s) in row[wi..].iter_mut().zip(pivot_tail) {
                        *d ^= s;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(false).len()
    }

    /// Rank of the submatrix on the listed columns.
    pub fn rank_of_cols(&self, cols: &[usize]) -> usize {
        self.select_cols(cols).rank()
    }

    /// A basis of the right null space, as vectors of length `cols`.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// A basis of the column space, as vectors of length `rows`.
    pub fn column_space_basis(&self) -> Vec<BitVec> {
        let mut span = SpanBasis::new(self.rows);
        let t = self.transpose();
        for c in 0..self.cols {
            span.insert(&t.row_vec(c));
        }
        span.into_vectors()
    }

    /// Finds `x` with `self * x = target`, if one exists.
    pub fn solve(&self, target: &BitVec) -> Option<BitVec> {
        assert_eq!(target.len(), self.rows);
        let mut aug = Gf2Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in BitVec::from_words(self.cols, self.row(r).to_vec()).iter_ones() {
                aug.set(r, c, true);
            }
            if target.get(r) {
                aug.set(r, self.cols, true);
            }
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if aug.get(r, self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }
}

/// An incrementally built echelon basis of a subspace.
///
/// Each stored vector has a distinct pivot bit that is absent from every
/// vector inserted after it, so reducing in insertion order clears every
/// pivot.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    len: usize,
    vectors: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl SpanBasis {
    pub fn new(len: usize) -> Self {
        SpanBasis {
            len,
            vectors: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors(len: usize, vs: &[BitVec]) -> Self {
        let mut s = SpanBasis::new(len);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_len(&self) -> usize {
        self.len
    }

    pub fn vectors(&self) -> &[BitVec] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<BitVec> {
        self.vectors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` modulo the span in place.
    pub fn reduce(&self, v: &mut BitVec) {
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(b);
            }
        }
    }

    /// Adds `v` to the spanning set; returns whether the dimension grew.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len);
        let mut w = v.clone();
        self.reduce(&mut w);
        let first = w.iter_ones().next();
        match first {
            Some(p) => {
                self.vectors.push(w);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }
}

/// Calls `f` on every element of the span of `basis` (including zero) in
/// Gray-code order. Fails when `2^basis.len()` exceeds `2^budget_log2`.
pub fn for_each_in_span<F: FnMut(&BitVec)>(len: usize, basis: &[BitVec], budget_log2: usize, mut f: F) -> Result<()> {
    if basis.len() > budget_log2 || basis.len() >= 63 {
        return Err(Error::Budget {
            what: "subspace enumeration (log2 size)",
            measured: basis.len(),
            budget: budget_log2,
        });
    }
    let mut cur = BitVec::zeros(len);
    f(&cur);
    let total = 1u64 << basis.len();
    for i in 1..total {
        let flip = i.trailing_zeros() as usize;
        cur.xor_assign(&basis[flip]);
        f(&cur);
    }
    Ok(())
}

/// Number of span elements of each Hamming weight, indexed by weight.
pub fn weight_distribution(len: usize, basis: &[BitVec], budget_log2: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; len + 1];
    for_each_in_span(len, basis, budget_log2, |v| counts[v.count_ones()] += 1)?;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[u8]) -> Gf2Matrix {
        Gf2Matrix::from_dense(rows, cols, e)
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(m(2, 2, &[1, 1, 1, 1]).rank(), 1);
        assert_eq!(Gf2Matrix::identity(70).rank(), 70);
        assert_eq!(m(3, 3, &[1, 1, 0, 0, 1, 1, 1, 0, 1]).rank(), 2);
        assert_eq!(Gf2Matrix::zeros(5, 9).rank(), 0);
    }

    #[test]
    fn kernel_vectors_are_in_kernel() {
        let a = m(3, 5, &[1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1]);
        let ker = a.kernel_basis();
        assert_eq!(ker.len(), 5 - a.rank());
        for v in &ker {
            assert!(a.mul_vec(v).is_zero());
        }
        assert_eq!(SpanBasis::from_vectors(5, &ker).dim(), ker.len());
    }

    #[test]
    fn solve_finds_preimage_or_none() {
        let a = m(3, 3, &[1, 1, 0, 0, 1, 1, 1, 0, 1]);
        let b = BitVec::from_bools(&[true, false, true]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        let bad = BitVec::from_bools(&[true, false, false]);
        assert!(a.solve(&bad).is_none());
    }

    #[test]
    fn span_enumeration_and_budget() {
        let basis = vec![BitVec::from_indices(4, &[0, 1]), BitVec::from_indices(4, &[1, 2])];
        let dist = weight_distribution(4, &basis, 25).unwrap();
        assert_eq!(dist, vec![1, 0, 3, 0, 0]);
        let big: Vec<BitVec> = (0..30).map(|i| BitVec::from_indices(30, &[i])).collect();
        assert!(matches!(weight_distribution(30, &big, 25), Err(Error::Budget { .. })));
    }

    #[test]
    fn transpose_and_select() {
        let a = m(2, 3, &[1, 0, 1, 0, 1, 1]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.select_cols(&[2, 0]), m(2, 2, &[1, 1, 1, 0]));
        assert_eq!(a.select_rows(&[1]), m(1, 3, &[0, 1, 1]));
        assert_eq!(a.col_vec(2), BitVec::from_bools(&[true, true]));
    }

    #[test]
    fn bitvec_ops() {
        let v = BitVec::from_indices(130, &[0, 64, 129]);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.count_ones(), 3);
        let g = v.gather(&[129, 1, 64]);
        assert_eq!(g.to_bools(), vec![true, false, true]);
        assert_eq!(g.scatter(&[129, 1, 64], 130), BitVec::from_indices(130, &[64, 129]));
        assert!(v.dot(&BitVec::from_indices(130, &[64])));
    }
}
