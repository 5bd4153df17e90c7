//! Binary vectors and matrices under the boolean (OR/AND) product.
//!
//! Rows are bit-packed into `u64` words, so the supported dimension is
//! `1..=64`. The boolean product of two rows reduces to OR-ing the rows of
//! the right factor selected by the set bits of the left row, which is what
//! makes semigroup expansion cheap.

use crate::error::{Error, Result};

/// Largest supported matrix dimension (rows are single `u64` words).
pub const MAX_DIM: usize = 64;

fn mask(n: usize) -> u64 {
    debug_assert!((1..=MAX_DIM).contains(&n));
    if n == MAX_DIM {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A binary vector of dimension `n`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    n: usize,
    bits: u64,
}

impl BinaryVector {
    /// The zero vector.
    pub fn zero(n: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&n),
            "dimension must be in 1..={MAX_DIM}"
        );
        BinaryVector { n, bits: 0 }
    }

    /// The all-ones vector `e`.
    pub fn all_ones(n: usize) -> Self {
        BinaryVector { n, bits: mask(n) }
    }

    /// The canonical basis vector `e_i` (0-indexed).
    pub fn basis(n: usize, i: usize) -> Self {
        assert!(i < n, "basis index {i} out of range for dimension {n}");
        let mut v = Self::zero(n);
        v.bits = 1u64 << i;
        v
    }

    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!((1..=MAX_DIM).contains(&n));
        assert_eq!(bits & !mask(n), 0, "bits outside dimension");
        BinaryVector { n, bits }
    }

    pub fn from_indices(n: usize, ones: &[usize]) -> Self {
        let mut v = Self::zero(n);
        for &i in ones {
            assert!(i < n);
            v.bits |= 1u64 << i;
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.n);
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.n);
        if value {
            self.bits |= 1u64 << i;
        } else {
            self.bits &= !(1u64 << i);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// The support `{i : v_i = 1}` in ascending order.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    pub fn union(&self, other: &BinaryVector) -> BinaryVector {
        assert_eq!(self.n, other.n, "dimension mismatch");
        BinaryVector {
            n: self.n,
            bits: self.bits | other.bits,
        }
    }

    /// Entrywise `self >= other`.
    pub fn dominates(&self, other: &BinaryVector) -> bool {
        assert_eq!(self.n, other.n, "dimension mismatch");
        other.bits & !self.bits == 0
    }
}

impl std::fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// An `n x n` binary matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&n),
            "dimension must be in 1..={MAX_DIM}"
        );
        BinaryMatrix {
            n,
            rows: vec![0; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.rows[i] = 1u64 << i;
        }
        m
    }

    pub fn all_ones(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for r in m.rows.iter_mut() {
            *r = mask(n);
        }
        m
    }

    /// Build from 0/1 entries in row-major order; panics on non-binary input.
    pub fn from_entries(n: usize, entries: &[&[u8]]) -> Self {
        assert_eq!(entries.len(), n);
        let mut m = Self::zeros(n);
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has wrong length");
            for (j, &v) in row.iter().enumerate() {
                assert!(v <= 1, "entries must be 0 or 1");
                if v == 1 {
                    m.rows[i] |= 1u64 << j;
                }
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<BinaryVector>) -> Self {
        assert!(!rows.is_empty());
        let n = rows[0].dim();
        assert!(rows.iter().all(|r| r.dim() == n), "ragged rows");
        assert_eq!(rows.len(), n, "matrix must be square");
        BinaryMatrix {
            n,
            rows: rows.into_iter().map(|r| r.bits()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n);
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n && j < self.n);
        if value {
            self.rows[i] |= 1u64 << j;
        } else {
            self.rows[i] &= !(1u64 << j);
        }
    }

    pub fn row(&self, i: usize) -> BinaryVector {
        assert!(i < self.n);
        BinaryVector {
            n: self.n,
            bits: self.rows[i],
        }
    }

    pub fn row_bits(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &r)| r == 1u64 << i)
    }

    pub fn is_all_ones(&self) -> bool {
        let full = mask(self.n);
        self.rows.iter().all(|&r| r == full)
    }

    /// True iff every row and every column has at least one positive entry.
    pub fn is_nz(&self) -> bool {
        let mut cols = 0u64;
        for &r in &self.rows {
            if r == 0 {
                return false;
            }
            cols |= r;
        }
        cols == mask(self.n)
    }

    /// Exactly one 1 in every row and every column.
    pub fn is_permutation(&self) -> bool {
        let mut cols = 0u64;
        for &r in &self.rows {
            if r.count_ones() != 1 {
                return false;
            }
            cols |= r;
        }
        cols == mask(self.n)
    }

    /// Exactly one 1 in every row (a deterministic transition matrix).
    pub fn is_binary_row_stochastic(&self) -> bool {
        self.rows.iter().all(|&r| r.count_ones() == 1)
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            let mut r = self.rows[i];
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                t.rows[j] |= 1u64 << i;
                r &= r - 1;
            }
        }
        t
    }

    /// Number of ones per row, i.e. the integer vector `A e`.
    pub fn row_sum_vector(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.count_ones()).collect()
    }

    /// Entrywise `self >= other`.
    pub fn dominates(&self, other: &BinaryMatrix) -> bool {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(&a, &b)| b & !a == 0)
    }

    /// Whether some permutation matrix is dominated entrywise, i.e. whether
    /// the bipartite graph rows/columns with edges at the 1-entries admits a
    /// perfect matching. Augmenting-path matching, O(n^3).
    pub fn dominates_permutation(&self) -> bool {
        let n = self.n;
        let mut matched_col: Vec<Option<usize>> = vec![None; n];

        fn augment(
            rows: &[u64],
            u: usize,
            seen: &mut u64,
            matched_col: &mut [Option<usize>],
        ) -> bool {
            let mut r = rows[u] & !*seen;
            while r != 0 {
                let v = r.trailing_zeros() as usize;
                r &= r - 1;
                *seen |= 1u64 << v;
                match matched_col[v] {
                    None => {
                        matched_col[v] = Some(u);
                        return true;
                    }
                    Some(w) => {
                        if augment(rows, w, seen, matched_col) {
                            matched_col[v] = Some(u);
                            return true;
                        }
                    }
                }
            }
            false
        }

        let mut size = 0;
        for u in 0..n {
            let mut seen = 0u64;
            if augment(&self.rows, u, &mut seen, &mut matched_col) {
                size += 1;
            }
        }
        size == n
    }
}

impl std::fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Boolean matrix product: `C[i,j] = 1` iff some `k` has `A[i,k] = B[k,j] = 1`.
///
/// # Panics
///
/// Panics if the dimensions differ.
pub fn bool_product(a: &BinaryMatrix, b: &BinaryMatrix) -> BinaryMatrix {
    assert_eq!(a.n, b.n, "dimension mismatch");
    let mut c = BinaryMatrix::zeros(a.n);
    for i in 0..a.n {
        let mut sel = a.rows[i];
        let mut acc = 0u64;
        while sel != 0 {
            let k = sel.trailing_zeros() as usize;
            acc |= b.rows[k];
            sel &= sel - 1;
        }
        c.rows[i] = acc;
    }
    c
}

/// The binarized row-vector image `[v^T A]`: the OR of the rows of `A`
/// indexed by the support of `v`.
///
/// # Panics
///
/// Panics if `v` and `A` have different dimensions.
pub fn apply_row(v: &BinaryVector, a: &BinaryMatrix) -> BinaryVector {
    assert_eq!(v.n, a.n, "dimension mismatch");
    let mut sel = v.bits;
    let mut acc = 0u64;
    while sel != 0 {
        let k = sel.trailing_zeros() as usize;
        acc |= a.rows[k];
        sel &= sel - 1;
    }
    BinaryVector { n: v.n, bits: acc }
}

/// A finite set of `n x n` binary matrices, the generators of the semigroup
/// under study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSet {
    n: usize,
    matrices: Vec<BinaryMatrix>,
}

impl MatrixSet {
    pub fn new(matrices: Vec<BinaryMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Invalid(
                "a matrix set needs at least one matrix".into(),
            ));
        }
        let n = matrices[0].dim();
        if matrices.iter().any(|m| m.dim() != n) {
            return Err(Error::Invalid(
                "all matrices must share one dimension".into(),
            ));
        }
        Ok(MatrixSet { n, matrices })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[BinaryMatrix] {
        &self.matrices
    }

    pub fn get(&self, i: usize) -> &BinaryMatrix {
        &self.matrices[i]
    }

    /// Every generator is NZ.
    pub fn is_nz(&self) -> bool {
        self.matrices.iter().all(|m| m.is_nz())
    }

    /// The transpose set.
    pub fn transpose(&self) -> MatrixSet {
        MatrixSet {
            n: self.n,
            matrices: self.matrices.iter().map(|m| m.transpose()).collect(),
        }
    }
}
