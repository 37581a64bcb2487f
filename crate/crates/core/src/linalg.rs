//! Exact linear algebra over prime fields.
//!
//! Matrices are dense and row-major. Every reduction uses the same
//! deterministic reduced row-echelon routine: columns are scanned left to
//! right and the pivot for each column is the lowest-index eligible row, so
//! results (including the particular solution returned by
//! [`Mat::solve_right`]) are reproducible bit for bit.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest modulus accepted; products of two residues must fit in a `u64`.
pub const MAX_MODULUS: u32 = 65521;

/// The prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { p })
    }

    /// The two-element field, the default throughout.
    pub fn binary() -> Self {
        Field { p: 2 }
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse; `a` must be non-zero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a != 0 && a < self.p);
        let mut base = a as u64;
        let mut exp = self.p - 2;
        let m = self.p as u64;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc as u32
    }

    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A dense matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: Mat,
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from rows of residues; every entry must lie in `[0, p)`.
    pub fn from_rows<R: AsRef<[i64]>>(field: Field, rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0 || v >= field.modulus() as i64 {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        p: field.modulus(),
                    });
                }
                data.push(v as u32);
            }
        }
        Ok(Mat {
            field,
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds a matrix of the given shape, reducing every produced value mod p.
    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> i64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.reduce(f(i, j)));
            }
        }
        Mat {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(v < self.field.modulus());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn check_field(&self, other: &Mat) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &Mat) -> Result<Mat> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let p = f.modulus() as u64;
        let mut out = Mat::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for t in 0..self.cols {
                    acc += self.get(i, t) as u64 * rhs.get(t, j) as u64;
                    if acc >= (1 << 62) {
                        acc %= p;
                    }
                }
                out.data[i * rhs.cols + j] = (acc % p) as u32;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j);
            }
        }
        out
    }

    /// Concatenates matrices left to right. All operands must share the
    /// field and the row count.
    pub fn hconcat(ms: &[&Mat]) -> Result<Mat> {
        let first = ms
            .first()
            .ok_or_else(|| Error::Dimension("hconcat of an empty list".into()))?;
        Mat::hconcat_rows(first.field, first.rows, ms.iter().copied())
    }

    /// Like [`Mat::hconcat`] but with an explicit shape for the empty case,
    /// which yields a `rows x 0` matrix.
    pub fn hconcat_rows<'a>(
        field: Field,
        rows: usize,
        ms: impl IntoIterator<Item = &'a Mat>,
    ) -> Result<Mat> {
        let ms: Vec<&Mat> = ms.into_iter().collect();
        for m in &ms {
            if m.field != field {
                return Err(Error::FieldMismatch {
                    left: field.modulus(),
                    right: m.field.modulus(),
                });
            }
            if m.rows != rows {
                return Err(Error::Dimension(format!(
                    "hconcat operands have {} and {} rows",
                    rows, m.rows
                )));
            }
        }
        let cols: usize = ms.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(field, rows, cols);
        for r in 0..rows {
            let mut offset = 0;
            for m in &ms {
                out.data[r * cols + offset..r * cols + offset + m.cols].copy_from_slice(m.row(r));
                offset += m.cols;
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        Mat::from_fn(self.field, self.rows, cols.len(), |i, j| {
            self.get(i, cols[j]) as i64
        })
    }

    /// Right-pads with zero columns to exactly `width` columns.
    pub fn pad_columns(&self, width: usize) -> Result<Mat> {
        if width < self.cols {
            return Err(Error::Dimension(format!(
                "cannot pad {} columns down to {width}",
                self.cols
            )));
        }
        Ok(Mat::from_fn(self.field, self.rows, width, |i, j| {
            if j < self.cols {
                self.get(i, j) as i64
            } else {
                0
            }
        }))
    }

    /// Reduced row-echelon form with lowest-index pivoting.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = m.reduce_in_place(self.cols);
        Echelon { matrix: m, pivots }
    }

    /// Row-reduces using only the first `limit` columns as pivot candidates;
    /// row operations are applied to the full width.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..limit {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if sel != prow {
                for j in 0..cols {
                    self.data.swap(sel * cols + j, prow * cols + j);
                }
            }
            let inv = f.inv(self.data[prow * cols + c]);
            if inv != 1 {
                for j in c..cols {
                    let v = &mut self.data[prow * cols + j];
                    *v = f.mul(*v, inv);
                }
            }
            for r in 0..self.rows {
                if r == prow {
                    continue;
                }
                let factor = self.data[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let pv = self.data[prow * cols + j];
                    if pv != 0 {
                        let v = self.data[r * cols + j];
                        self.data[r * cols + j] = f.sub(v, f.mul(factor, pv));
                    }
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Indices of the pivot columns: the lexicographically first set of
    /// columns forming a basis of the column space.
    pub fn column_basis(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// A matrix whose columns are a basis of this matrix's column space.
    pub fn column_space_basis(&self) -> Mat {
        self.select_columns(&self.column_basis())
    }

    /// Solves `self * X = b`.
    ///
    /// The solution is read off the reduced row-echelon form of `[self | b]`
    /// with every free variable set to zero. Returns [`Error::NoSolution`]
    /// when a column of `b` lies outside the column space of `self`.
    pub fn solve_right(&self, b: &Mat) -> Result<Mat> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(Error::Dimension(format!(
                "solve_right: {} rows vs {} rows",
                self.rows, b.rows
            )));
        }
        let n = self.cols;
        let mut aug = Mat::hconcat_rows(self.field, self.rows, [self, b])?;
        let pivots = aug.reduce_in_place(n);
        let rank = pivots.len();
        for r in rank..aug.rows {
            if aug.row(r)[n..].iter().any(|&v| v != 0) {
                return Err(Error::NoSolution);
            }
        }
        let mut x = Mat::zeros(self.field, n, b.cols);
        for (t, &c) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.data[c * b.cols + j] = aug.get(t, n + j);
            }
        }
        debug_assert_eq!(self.mul(&x).as_ref(), Ok(b));
        Ok(x)
    }

    pub fn invert(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "cannot invert a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rank() < self.rows {
            return Err(Error::Singular);
        }
        self.solve_right(&Mat::identity(self.field, self.rows))
    }

    /// True when every column of `other` lies in this matrix's column space.
    pub fn spans(&self, other: &Mat) -> Result<bool> {
        match self.solve_right(other) {
            Ok(_) => Ok(true),
            Err(Error::NoSolution) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn same_column_space(&self, other: &Mat) -> Result<bool> {
        Ok(self.spans(other)? && other.spans(self)?)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{}; {}x{}](", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (j, v) in self.row(r).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
        }
        write!(f, ")")
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}
