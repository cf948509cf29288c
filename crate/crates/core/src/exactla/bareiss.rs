//! Fraction-free (Bareiss) elimination over an exact integral domain.
//!
//! Every intermediate entry produced by the one-step Bareiss update is a
//! minor of the input matrix, so the division by the previous pivot is
//! always exact and entries never leave the ring.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// An integral domain in which exact division is available.
pub trait FractionFree: Clone {
    fn is_zero(&self) -> bool;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// `self / rhs`, where the caller guarantees divisibility.
    fn div_exact(&self, rhs: &Self) -> Self;
    /// Size heuristic for pivot selection (smaller is preferred).
    fn weight(&self) -> u64;
}

impl FractionFree for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        let (q, r) = self.div_rem(rhs);
        debug_assert!(Zero::is_zero(&r), "inexact Bareiss division");
        q
    }
    fn weight(&self) -> u64 {
        self.abs().bits()
    }
}

/// Result of forward fraction-free elimination.
#[derive(Debug, Clone)]
pub struct Forward<R> {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    /// Original indices of the rows that ended up as pivot rows, in pivot order.
    pub pivot_rows: Vec<usize>,
    /// Last pivot: the determinant (up to `sign`) of the pivot submatrix.
    pub last_pivot: Option<R>,
    /// +1 or -1, parity of the row swaps performed.
    pub sign: i8,
    pub rows: Vec<Vec<R>>,
}

/// Forward Bareiss elimination to row echelon form.
pub fn forward<R: FractionFree>(mut a: Vec<Vec<R>>, ncols: usize) -> Forward<R> {
    let nrows = a.len();
    let mut order: Vec<usize> = (0..nrows).collect();
    let mut prev: Option<R> = None;
    let mut sign = 1i8;
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].weight())
        else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            order.swap(p, r);
            sign = -sign;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let piv = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c..ncols {
                let mut v = piv.ring_mul(&row[j]);
                if !factor.is_zero() {
                    v = v.ring_sub(&factor.ring_mul(&pivot_row[j]));
                }
                row[j] = match &prev {
                    Some(d) => v.div_exact(d),
                    None => v,
                };
            }
        }
        prev = Some(piv);
        pivot_cols.push(c);
        r += 1;
    }
    Forward {
        rank: r,
        pivot_rows: order[..r].to_vec(),
        pivot_cols,
        last_pivot: prev,
        sign,
        rows: a,
    }
}

/// Determinant of a square matrix by forward Bareiss elimination.
pub fn determinant<R: FractionFree>(a: Vec<Vec<R>>, zero: R) -> R {
    let n = a.len();
    let fwd = forward(a, n);
    if fwd.rank < n {
        return zero;
    }
    let d = fwd.last_pivot.unwrap_or(zero);
    if fwd.sign < 0 {
        d.ring_neg()
    } else {
        d
    }
}

/// Fraction-free Gauss-Jordan elimination over the integers. On return
/// every pivot entry equals the same value `d` (the determinant of the
/// pivot submatrix) and all other entries of the pivot columns are zero;
/// dividing the pivot rows by `d` gives the reduced row echelon form.
pub fn gauss_jordan_int(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = a.len();
    let mut prev = BigInt::from(1);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows)
            .filter(|&i| !Zero::is_zero(&a[i][c]))
            .min_by_key(|&i| a[i][c].bits())
        else {
            continue;
        };
        a.swap(p, r);
        let pivot_row = a[r].clone();
        let piv = pivot_row[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            for j in 0..ncols {
                let mut v = &piv * &row[j];
                if !Zero::is_zero(&factor) {
                    v -= &factor * &pivot_row[j];
                }
                row[j] = v.div_exact(&prev);
            }
        }
        prev = piv;
        pivot_cols.push(c);
        r += 1;
    }
    (a, pivot_cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_rows(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn determinant_small() {
        let d = determinant(int_rows(&[&[1, 2], &[3, 4]]), BigInt::zero());
        assert_eq!(d, BigInt::from(-2));
        let d = determinant(int_rows(&[&[0, 1], &[1, 0]]), BigInt::zero());
        assert_eq!(d, BigInt::from(-1));
        let d = determinant(int_rows(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]), BigInt::zero());
        // 2*(3-2) - 0 + 1*(1-3) = 0
        assert_eq!(d, BigInt::zero());
    }

    #[test]
    fn gauss_jordan_pivots_share_value() {
        let (a, piv) = gauss_jordan_int(int_rows(&[&[2, 4, 1], &[1, 3, 5], &[3, 7, 6]]), 3);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(a[0][0], a[1][1]);
        assert!(Zero::is_zero(&a[0][1]));
        assert!(a[2].iter().all(Zero::is_zero));
    }

    #[test]
    fn forward_tracks_original_rows() {
        let f = forward(int_rows(&[&[0, 0], &[0, 5], &[1, 0]]), 2);
        assert_eq!(f.rank, 2);
        assert_eq!(f.pivot_rows, vec![2, 1]);
        assert_eq!(f.pivot_cols, vec![0, 1]);
    }
}
