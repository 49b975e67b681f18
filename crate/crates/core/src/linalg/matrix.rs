//! Sparse matrices over `GF(p)` and an incremental echelon basis.

use std::collections::HashMap;

/// Sparse vector: strictly increasing indices, values in `1..p`.
pub type SparseVec = Vec<(u32, u64)>;

#[inline]
pub fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, p - 2, p)
}

#[inline]
pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// `a + c·b` for sparse vectors.
pub fn axpy(a: &[(u32, u64)], c: u64, b: &[(u32, u64)], p: u64) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * b[j].1 % p));
            j += 1;
        } else {
            let v = (a[i].1 + c * b[j].1) % p;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row-reduction state: a set of independent vectors keyed by their leading index.
///
/// Each stored vector has leading coefficient 1, and no two share a leading index.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    pivots: HashMap<u32, SparseVec>,
}

impl Echelon {
    pub fn new(p: u64) -> Self {
        Echelon { p, pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_pivot(&self, idx: u32) -> bool {
        self.pivots.contains_key(&idx)
    }

    /// Adds `v` to the span; returns whether it was independent.
    pub fn insert(&mut self, mut v: SparseVec) -> bool {
        let p = self.p;
        while let Some(&(lead, c)) = v.first() {
            match self.pivots.get(&lead) {
                Some(piv) => v = axpy(&v, p - c, piv, p),
                None => {
                    let inv = mod_inv(c, p);
                    for e in v.iter_mut() {
                        e.1 = e.1 * inv % p;
                    }
                    self.pivots.insert(lead, v);
                    return true;
                }
            }
        }
        false
    }

    /// Reduces `v` until none of its indices is a pivot index.
    pub fn reduce_full(&self, mut v: SparseVec) -> SparseVec {
        let p = self.p;
        let mut pos = 0;
        while pos < v.len() {
            let (idx, c) = v[pos];
            match self.pivots.get(&idx) {
                // the pivot's other entries all sit above idx, so entries before pos are untouched
                Some(piv) => v = axpy(&v, p - c, piv, p),
                None => pos += 1,
            }
        }
        v
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> {
        self.pivots.values()
    }
}

/// Sparse matrix over `GF(p)`, stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFieldMatrix {
    rows: usize,
    p: u64,
    columns: Vec<SparseVec>,
}

impl PrimeFieldMatrix {
    pub fn zero(rows: usize, cols: usize, p: u64) -> Self {
        PrimeFieldMatrix { rows, p, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        PrimeFieldMatrix { rows: n, p, columns: (0..n).map(|i| vec![(i as u32, 1)]).collect() }
    }

    /// Builds from `(row, col, value)` triples; values are reduced mod `p` and zeros dropped.
    /// Duplicate coordinates are summed.
    pub fn from_entries(rows: usize, cols: usize, p: u64, entries: impl IntoIterator<Item = (usize, usize, u64)>) -> Self {
        let mut columns: Vec<Vec<(u32, u64)>> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside {rows}x{cols}");
            columns[c].push((r as u32, v % p));
        }
        for col in columns.iter_mut() {
            col.sort_by_key(|e| e.0);
            let mut merged: SparseVec = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 = (last.1 + v) % p,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *col = merged;
        }
        PrimeFieldMatrix { rows, p, columns }
    }

    pub fn from_dense(p: u64, dense: &[Vec<u64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, |r| r.len());
        let entries = dense
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)));
        Self::from_entries(rows, cols, p, entries)
    }

    pub(crate) fn from_columns(rows: usize, p: u64, columns: Vec<SparseVec>) -> Self {
        PrimeFieldMatrix { rows, p, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn column(&self, c: usize) -> &SparseVec {
        &self.columns[c]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r as usize, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0; self.cols()]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    pub fn transpose(&self) -> PrimeFieldMatrix {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                columns[r as usize].push((c as u32, v));
            }
        }
        PrimeFieldMatrix { rows: self.cols(), p: self.p, columns }
    }

    /// `self · v` for a sparse column vector `v`.
    pub fn apply(&self, v: &[(u32, u64)]) -> SparseVec {
        let p = self.p;
        let mut acc: SparseVec = Vec::new();
        for &(c, x) in v {
            acc = axpy(&acc, x, &self.columns[c as usize], p);
        }
        acc
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &PrimeFieldMatrix) -> PrimeFieldMatrix {
        assert_eq!(self.cols(), other.rows, "dimension mismatch in compose");
        let columns = other.columns.iter().map(|col| self.apply(col)).collect();
        PrimeFieldMatrix { rows: self.rows, p: self.p, columns }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: u64, other: &PrimeFieldMatrix) -> PrimeFieldMatrix {
        assert_eq!((self.rows, self.cols()), (other.rows, other.cols()));
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| axpy(a, c % self.p, b, self.p))
            .collect();
        PrimeFieldMatrix { rows: self.rows, p: self.p, columns }
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.p);
        for col in &self.columns {
            if ech.rank() == self.rows {
                break;
            }
            ech.insert(col.clone());
        }
        ech.rank()
    }

    /// Exact rank over `GF(p)` and the dimension of the kernel (`cols - rank`).
    pub fn rank_kernel(&self) -> (usize, usize) {
        let r = self.rank();
        (r, self.cols() - r)
    }
}
