//! Dense linear algebra over F₂ with bit-packed rows.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
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
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * WORD + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut out = BitVec::zeros(end - start);
        for i in self.ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(BitVec),
    /// A particular solution plus a basis of the null space.
    Many {
        particular: BitVec,
        kernel: Vec<BitVec>,
    },
    Inconsistent,
}

/// A matrix stored as a list of rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    ncols: usize,
}

impl BitMatrix {
    pub fn new(ncols: usize) -> Self {
        BitMatrix {
            rows: Vec::new(),
            ncols,
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        BitMatrix { rows, ncols }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| BitVec::from_indices(n, [i])).collect();
        BitMatrix { rows, ncols: n }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.ncols, "row width mismatch");
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = vec![BitVec::zeros(self.rows.len()); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t[c].set(r, true);
            }
        }
        BitMatrix {
            rows: t,
            ncols: self.rows.len(),
        }
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.ncols);
        let mut out = BitVec::zeros(self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = 0u32;
            for (a, b) in row.words.iter().zip(&v.words) {
                acc ^= (a & b).count_ones() & 1;
            }
            if acc == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns pivot columns in row order.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(r, p);
            let pivot = self.rows[r].clone();
            for i in 0..self.rows.len() {
                if i != r && self.rows[i].get(c) {
                    self.rows[i].xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// Solves `self · x = b`.
    pub fn solve(&self, b: &BitVec) -> Solution {
        assert_eq!(b.len(), self.rows.len());
        let n = self.ncols;
        let aug_rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut tail = BitVec::zeros(1);
                tail.set(0, b.get(i));
                row.concat(&tail)
            })
            .collect();
        let mut aug = BitMatrix::from_rows(n + 1, aug_rows);
        let pivots = aug.row_reduce();
        if pivots.last() == Some(&n) {
            return Solution::Inconsistent;
        }
        let mut x = BitVec::zeros(n);
        for (r, &c) in pivots.iter().enumerate() {
            if aug.rows[r].get(n) {
                x.set(c, true);
            }
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return Solution::Unique(x);
        }
        let kernel = free
            .iter()
            .map(|&f| {
                let mut v = BitVec::zeros(n);
                v.set(f, true);
                for (r, &c) in pivots.iter().enumerate() {
                    if aug.rows[r].get(f) {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect();
        Solution::Many {
            particular: x,
            kernel,
        }
    }

    /// Basis of `{x : self · x = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        match self.solve(&BitVec::zeros(self.rows.len())) {
            Solution::Unique(_) => Vec::new(),
            Solution::Many { kernel, .. } => kernel,
            Solution::Inconsistent => unreachable!("homogeneous systems are consistent"),
        }
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.ncols;
        if self.rows.len() != n {
            return None;
        }
        let id = BitMatrix::identity(n);
        let rows = self
            .rows
            .iter()
            .zip(&id.rows)
            .map(|(a, e)| a.concat(e))
            .collect();
        let mut aug = BitMatrix::from_rows(2 * n, rows);
        let pivots = aug.row_reduce();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let rows = aug.rows.iter().map(|r| r.slice(n, 2 * n)).collect();
        Some(BitMatrix::from_rows(n, rows))
    }
}

/// Incrementally maintained echelon basis for testing membership in a span.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    width: usize,
    rows: Vec<(usize, BitVec)>,
}

impl EchelonBasis {
    pub fn new(width: usize) -> Self {
        EchelonBasis {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns true when it enlarged the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.width);
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                for (_, row) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                    }
                }
                self.rows.push((p, r));
                true
            }
        }
    }
}
