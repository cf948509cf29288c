//! Reference computations written directly on `BigRational`, sharing no code
//! with the library: schoolbook Gauss-Jordan elimination and monomial
//! enumeration.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vectors of total degree <= d: by degree, and within a degree
/// with larger exponents of earlier variables first.
pub fn monomials(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut level = Vec::new();
        compositions(nvars, deg, &mut Vec::new(), &mut level);
        level.sort_by(|a, b| b.cmp(a));
        out.extend(level);
    }
    out
}

fn compositions(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == nvars {
        prefix.push(left);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    if nvars == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in 0..=left {
        prefix.push(e);
        compositions(nvars, left - e, prefix, out);
        prefix.pop();
    }
}

pub fn eval_monomial(exps: &[u32], pt: &[Q]) -> Q {
    let mut acc = Q::one();
    for (e, x) in exps.iter().zip(pt) {
        for _ in 0..*e {
            acc *= x;
        }
    }
    acc
}

/// Reduced row echelon form; returns pivot columns.
pub fn rref(m: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Q::one() / &m[row][col];
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..ncols {
                    let sub = &f * &m[row][c];
                    m[r][c] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Kernel basis with an identity block on the free columns, in column order.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn eval_rows(points: &[Vec<Q>], monos: &[Vec<u32>]) -> Vec<Vec<Q>> {
    points.iter().map(|p| monos.iter().map(|m| eval_monomial(m, p)).collect()).collect()
}

/// Truncated vanishing ideal of a point set as coefficient vectors over
/// `monomials(nvars, d)`.
pub fn vanishing_ideal(points: &[Vec<Q>], nvars: usize, d: u32) -> Vec<Vec<Q>> {
    let monos = monomials(nvars, d);
    nullspace(&eval_rows(points, &monos), monos.len())
}
