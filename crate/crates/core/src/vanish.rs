//! Truncated vanishing ideals of finite point sets.
//!
//! The degree-`<= d` part of the ideal of a point set is the kernel of the
//! evaluation matrix (one row per point, one column per monomial). Its
//! kernel basis, read as polynomials, is the canonical representative:
//! every basis element is monic in its leading monomial, the leading
//! monomials are distinct, and no basis element contains another's leading
//! monomial. Two point sets have the same truncated ideal exactly when
//! these bases coincide.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dynsys::{OrbitExplorer, OrbitSample, SemigroupSpec, Word};
use crate::error::{Error, Result};
use crate::exactla::{nullspace, rank, Field, FieldElem, Matrix};
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::Point;

pub const DEFAULT_WINDOW: usize = 3;
pub const DEFAULT_CAP: usize = 10_000;
pub const DEFAULT_LEN_LIMIT: usize = 12;

/// Row per point, column per monomial of degree `<= d` (in monomial order).
pub fn eval_matrix(field: Field, points: &[Point], nvars: usize, d: u32) -> Matrix {
    let monos = monomials_up_to(nvars, d);
    eval_matrix_on(field, points, &monos)
}

fn eval_matrix_on(field: Field, points: &[Point], monos: &[Monomial]) -> Matrix {
    let rows = points
        .iter()
        .map(|p| {
            assert_eq!(p.len(), monos.first().map_or(p.len(), Monomial::nvars), "point dimension");
            if p.is_empty() {
                return vec![field.one(); monos.len()];
            }
            monos.iter().map(|m| m.eval(p)).collect()
        })
        .collect();
    Matrix::from_rows(field, monos.len(), rows).expect("evaluation rows share the point field")
}

/// Canonical basis of the polynomials of total degree `<= d` vanishing on a
/// finite point set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedIdeal {
    pub nvars: usize,
    pub field: Field,
    pub d: u32,
    pub basis: Vec<Poly>,
    /// Dimension of the ideal's degree-`<= d` part (`basis.len()`).
    pub hd: usize,
    /// Rank of the evaluation matrix, `C(nvars + d, d) - hd`.
    pub rank: usize,
}

impl TruncatedIdeal {
    /// The zero ideal as a canonical value.
    pub fn zero(field: Field, nvars: usize, d: u32) -> TruncatedIdeal {
        let l = monomials_up_to(nvars, d).len();
        TruncatedIdeal { nvars, field, d, basis: Vec::new(), hd: 0, rank: l }
    }

    pub fn is_zero(&self) -> bool {
        self.hd == 0
    }

    /// Whether every basis polynomial vanishes at `pt`.
    pub fn vanishes_at(&self, pt: &[FieldElem]) -> bool {
        self.basis.iter().all(|b| b.eval(pt).is_zero())
    }

    /// Membership of a polynomial of degree `<= d` in the span of the basis.
    pub fn contains(&self, p: &Poly) -> bool {
        if p.total_degree().is_some_and(|deg| deg > self.d) {
            return false;
        }
        let mut rest = p.clone();
        for b in &self.basis {
            let (lead, _) = b.leading().expect("basis polynomials are nonzero");
            let c = rest.coeff(lead);
            if !c.is_zero() {
                rest = &rest - &b.scale(&c);
            }
        }
        rest.is_zero()
    }
}

pub fn truncated_ideal(field: Field, points: &[Point], nvars: usize, d: u32) -> TruncatedIdeal {
    let monos = monomials_up_to(nvars, d);
    let m = eval_matrix_on(field, points, &monos);
    let kernel = nullspace(&m);
    let basis: Vec<Poly> =
        kernel.iter().map(|v| Poly::from_coeffs(field, nvars, &monos, v)).collect();
    let hd = basis.len();
    TruncatedIdeal { nvars, field, d, basis, hd, rank: monos.len() - hd }
}

/// Result of growing an orbit sample until its truncated ideal settles.
#[derive(Debug, Clone)]
pub struct StabilizedIdeal {
    pub ideal: TruncatedIdeal,
    pub stabilized: bool,
    /// Word length of the final sample.
    pub used_len: usize,
    pub sample: OrbitSample,
}

impl StabilizedIdeal {
    /// Words that hit an indeterminacy locus: the base point is then
    /// outside the common domain of the sampled semigroup elements.
    pub fn skipped(&self) -> &[Word] {
        &self.sample.skipped
    }

    pub fn outside_domain(&self) -> bool {
        !self.sample.skipped.is_empty()
    }
}

/// Truncated ideal of the orbit sample at word lengths `1, 2, ...`, until
/// the canonical basis has stayed the same for `window` consecutive length
/// increments (or `len_limit` is reached).
///
/// Two situations settle the question early, since neither can change by
/// adding points: an exhausted (finite, fully explored) orbit, and the zero
/// ideal. Reaching the point cap before stabilizing leaves `stabilized`
/// false.
pub fn stabilized_ideal(
    spec: &SemigroupSpec,
    base: &[FieldElem],
    d: u32,
    window: usize,
    len_limit: usize,
    cap: usize,
) -> Result<StabilizedIdeal> {
    if window == 0 {
        return Err(Error::Dimension("stabilization window must be at least 1".into()));
    }
    let (field, nvars) = (spec.field(), spec.nvars());
    let mut explorer = OrbitExplorer::new(spec, base, cap);
    let mut current = truncated_ideal(field, &explorer.sample().points(), nvars, d);
    let mut unchanged = 0;
    let mut stabilized = false;
    for _ in 0..len_limit {
        let fresh = explorer.advance();
        if fresh > 0 {
            let next = truncated_ideal(field, &explorer.sample().points(), nvars, d);
            if next == current {
                unchanged += 1;
            } else {
                unchanged = 0;
                current = next;
            }
        } else {
            unchanged += 1;
        }
        let sample = explorer.sample();
        let settled = sample.exhausted || (current.is_zero() && !sample.is_empty());
        if unchanged >= window || settled {
            stabilized = true;
            break;
        }
        if sample.capped {
            break;
        }
    }
    let sample = explorer.into_sample();
    Ok(StabilizedIdeal { ideal: current, stabilized, used_len: sample.depth, sample })
}

/// `h(d)` for `0 <= d <= max_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertProfile {
    pub values: BTreeMap<u32, usize>,
}

pub fn hilbert_profile(field: Field, points: &[Point], nvars: usize, max_d: u32) -> HilbertProfile {
    let values = (0..=max_d)
        .into_par_iter()
        .map(|d| {
            let m = eval_matrix(field, points, nvars, d);
            (d, m.ncols() - rank(&m))
        })
        .collect();
    HilbertProfile { values }
}
