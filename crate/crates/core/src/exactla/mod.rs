//! Exact dense linear algebra over the rationals or a prime field.
//!
//! Over the rationals, elimination is fraction-free: rows are scaled to
//! integers and reduced with Bareiss updates, and only the final pivot
//! normalization introduces fractions. The reduced row echelon form is the
//! canonical representative of a row space throughout the crate.

pub mod bareiss;
mod field;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

pub use field::{is_prime_u64, Field, FieldElem};

use crate::error::{Error, Result};

/// A dense row-major matrix whose entries all live in one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    entries: Vec<FieldElem>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, field, entries: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = field.one();
        }
        m
    }

    /// Builds a matrix from explicit rows. `cols` is needed for the 0-row case.
    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<FieldElem>>) -> Result<Matrix> {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for e in row {
                if e.field() != field {
                    return Err(Error::MixedFields(field, e.field()));
                }
                entries.push(e);
            }
        }
        Ok(Matrix { rows: nrows, cols, field, entries })
    }

    /// Integer matrix convenience constructor.
    pub fn from_ints(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows.iter().map(|r| r.iter().map(|&v| field.from_i64(v)).collect()).collect();
        Matrix::from_rows(field, cols, rows).expect("well-formed integer rows")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        assert_eq!(v.field(), self.field, "entry field mismatch");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, field: self.field, entries }
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// Appends rows from `other`, which must share the column count and field.
    pub fn stack(&mut self, other: &Matrix) -> Result<()> {
        if other.cols != self.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {} columns onto {}",
                other.cols, self.cols
            )));
        }
        if other.field != self.field {
            return Err(Error::MixedFields(self.field, other.field));
        }
        self.entries.extend_from_slice(&other.entries);
        self.rows += other.rows;
        Ok(())
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Matrix {
        let mut entries = Vec::with_capacity(row_idx.len() * col_idx.len());
        for &i in row_idx {
            for &j in col_idx {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: row_idx.len(), cols: col_idx.len(), field: self.field, entries }
    }

    /// Image of a rational matrix in F_p; `None` if some denominator is divisible by `p`.
    pub fn reduce_mod(&self, p: u64) -> Option<Matrix> {
        let entries = self.entries.iter().map(|e| e.reduce_mod(p)).collect::<Option<Vec<_>>>()?;
        Some(Matrix { rows: self.rows, cols: self.cols, field: Field::Prime(p), entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElem::is_zero)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its rank and pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    /// Same shape as the input; the first `rank` rows are the nonzero ones.
    pub echelon: Matrix,
    pub pivot_cols: Vec<usize>,
}

pub fn rref(m: &Matrix) -> Rref {
    match m.field {
        Field::Rational => rref_rational(m),
        Field::Prime(_) => rref_gauss(m),
    }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).rank
}

/// Scales each row by the lcm of its denominators. Returns the integer
/// rows and the multipliers used.
fn integer_rows(m: &Matrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows);
    let mut scales = Vec::with_capacity(m.rows);
    for i in 0..m.rows {
        let row: Vec<&BigRational> =
            m.row(i).iter().map(|e| e.as_rational().expect("rational entry")).collect();
        let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        rows.push(row.iter().map(|q| q.numer() * (&l / q.denom())).collect());
        scales.push(l);
    }
    (rows, scales)
}

fn rref_rational(m: &Matrix) -> Rref {
    let (ints, _) = integer_rows(m);
    let (reduced, pivot_cols) = bareiss::gauss_jordan_int(ints, m.cols);
    let rank = pivot_cols.len();
    let mut echelon = Matrix::zeros(Field::Rational, m.rows, m.cols);
    for (r, &c) in pivot_cols.iter().enumerate() {
        let d = &reduced[r][c];
        for j in 0..m.cols {
            let q = BigRational::new(reduced[r][j].clone(), d.clone());
            echelon.entries[r * m.cols + j] = FieldElem::Rational(q);
        }
    }
    Rref { rank, echelon, pivot_cols }
}

fn rref_gauss(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.entries.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a.get(r, c).inv().expect("nonzero pivot");
        for j in 0..cols {
            let v = a.get(r, j) * &inv;
            a.entries[r * cols + j] = v;
        }
        let pivot_row = a.row(r).to_vec();
        for i in 0..rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let factor = a.get(i, c).clone();
            for j in 0..cols {
                let v = a.get(i, j) - &(&factor * &pivot_row[j]);
                a.entries[i * cols + j] = v;
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    Rref { rank: r, echelon: a, pivot_cols }
}

/// Basis of the right kernel `{v : m v = 0}`.
///
/// One vector per non-pivot column `f`: it has a 1 in position `f`, zeros in
/// every other non-pivot position, and the negated echelon entries in the
/// pivot positions. Read against the non-pivot columns the basis is the
/// identity, so it is a canonical function of the kernel.
pub fn nullspace(m: &Matrix) -> Vec<Vec<FieldElem>> {
    let Rref { echelon, pivot_cols, .. } = rref(m);
    let field = m.field;
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![field.zero(); m.cols];
            v[f] = field.one();
            for (r, &c) in pivot_cols.iter().enumerate() {
                v[c] = -echelon.get(r, f);
            }
            v
        })
        .collect()
}

/// Determinant of the square submatrix selected by `row_idx` x `col_idx`.
pub fn minor_det(m: &Matrix, row_idx: &[usize], col_idx: &[usize]) -> Result<FieldElem> {
    if row_idx.len() != col_idx.len() {
        return Err(Error::NonSquareMinor { rows: row_idx.len(), cols: col_idx.len() });
    }
    check_indices(row_idx, m.rows, "row")?;
    check_indices(col_idx, m.cols, "column")?;
    Ok(det(&m.submatrix(row_idx, col_idx)))
}

fn check_indices(idx: &[usize], bound: usize, what: &str) -> Result<()> {
    if idx.iter().any(|&i| i >= bound) {
        return Err(Error::BadIndex(format!("{what} index out of range (bound {bound})")));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndex(format!("{what} indices must be strictly increasing")));
    }
    Ok(())
}

/// Determinant of a square matrix.
pub fn det(m: &Matrix) -> FieldElem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    if m.rows == 0 {
        return m.field.one();
    }
    match m.field {
        Field::Rational => {
            let (ints, scales) = integer_rows(m);
            let d = bareiss::determinant(ints, BigInt::from(0));
            let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
            FieldElem::Rational(BigRational::new(d, scale))
        }
        Field::Prime(_) => {
            let mut a = m.clone();
            let n = a.rows;
            let mut acc = m.field.one();
            for c in 0..n {
                let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                    return m.field.zero();
                };
                if p != c {
                    for j in 0..n {
                        a.entries.swap(p * n + j, c * n + j);
                    }
                    acc = -&acc;
                }
                let piv = a.get(c, c).clone();
                acc = &acc * &piv;
                let inv = piv.inv().expect("nonzero pivot");
                for i in c + 1..n {
                    let factor = a.get(i, c) * &inv;
                    if factor.is_zero() {
                        continue;
                    }
                    for j in c..n {
                        let v = a.get(i, j) - &(&factor * a.get(c, j));
                        a.entries[i * n + j] = v;
                    }
                }
            }
            acc
        }
    }
}
