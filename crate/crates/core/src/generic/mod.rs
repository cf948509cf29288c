//! The symbolic side of the orbit-closure construction.
//!
//! Row `w` of the generic matrix holds the monomials `M_1, ..., M_l` of
//! degree `<= d` composed with the word map of `w`, as elements of the
//! function field. Its rank `r` is the generic rank; at a concrete point the
//! evaluated matrix has rank at most `r`, and the points where it drops
//! form the exceptional locus, cut out by the `r x r` minors.

mod minors;
pub mod strategy;

use std::sync::Arc;

use serde::Serialize;

use crate::dynsys::{symbolic_iterates, SelfMap, SemigroupSpec, Word};
use crate::error::{Error, Result};
use crate::exactla::{rank, Field, FieldElem, Matrix};
use crate::poly::{monomials_up_to, Monomial, Poly, RatFunc};
use crate::vanish::eval_matrix;
use crate::Point;

pub use minors::{check_forward_invariance, exceptional_generators, ExceptionalIdealGens, InvarianceReport};
pub use strategy::{ExactRank, RankContext, RankMethod, RankOutcome, RankStrategy, SpecializedRank, StrategyRegistry};

/// Default minor budget for exceptional-locus generators.
pub const DEFAULT_MINOR_BUDGET: usize = 64;

/// The generic matrix over the function field, truncated to words of
/// length `<= max_len`.
#[derive(Debug, Clone)]
pub struct GenericMatrix {
    pub field: Field,
    pub nvars: usize,
    pub d: u32,
    pub max_len: usize,
    pub words: Vec<Word>,
    pub maps: Vec<Arc<SelfMap>>,
    pub monomials: Vec<Monomial>,
    pub entries: Vec<Vec<RatFunc>>,
}

pub fn generic_matrix(spec: &SemigroupSpec, d: u32, max_len: usize) -> Result<GenericMatrix> {
    if max_len == 0 {
        return Err(Error::Dimension("max_len must be at least 1".into()));
    }
    let iterates = symbolic_iterates(spec, max_len)?;
    let monomials = monomials_up_to(spec.nvars(), d);
    let nvars = spec.nvars();
    let field = spec.field();
    let entries = iterates
        .iter()
        .map(|(_, map)| {
            monomials
                .iter()
                .map(|m| Poly::monomial(nvars, m.clone(), field.one()).compose(map.components()))
                .collect()
        })
        .collect();
    let (words, maps) = iterates.into_iter().unzip();
    Ok(GenericMatrix { field, nvars, d, max_len, words, maps, monomials, entries })
}

impl GenericMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.monomials.len()
    }

    /// Entries evaluated at `pt`; `None` if some entry has a pole there.
    pub fn eval_at(&self, pt: &[FieldElem]) -> Option<Matrix> {
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(pt)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix::from_rows(self.field, self.ncols(), rows).expect("uniform field"))
    }

    /// Each row multiplied by the product of its distinct denominators, so
    /// that all entries become polynomials. Row scaling by nonzero
    /// functions leaves the rank unchanged.
    pub fn cleared_rows(&self) -> Vec<Vec<Poly>> {
        self.entries
            .iter()
            .map(|row| {
                let mut dens: Vec<&Poly> = Vec::new();
                for e in row {
                    if !e.is_polynomial() && !dens.contains(&e.den()) {
                        dens.push(e.den());
                    }
                }
                row.iter()
                    .map(|e| {
                        let mut out = e.num().clone();
                        let mut skipped_own = e.is_polynomial();
                        for &den in &dens {
                            if !skipped_own && den == e.den() {
                                skipped_own = true;
                                continue;
                            }
                            out = &out * den;
                        }
                        out
                    })
                    .collect()
            })
            .collect()
    }
}

/// Generic rank with the pivot data witnessing it.
#[derive(Debug, Clone, Serialize)]
pub struct GenericRankCert {
    pub d: u32,
    pub max_len: usize,
    /// Number of monomials of degree `<= d`.
    pub l: usize,
    pub r: usize,
    pub hd: usize,
    pub pivot_words: Vec<Word>,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    pub method: RankMethod,
    pub strategy: String,
    pub rows: usize,
    /// Rank with words one letter longer.
    pub r_next_len: usize,
    /// `r == r_next_len`.
    pub stable_in_len: bool,
    pub attempts: usize,
}

fn certify(gm: &GenericMatrix, out: RankOutcome, strategy: &str, r_next_len: usize) -> GenericRankCert {
    let l = gm.ncols();
    GenericRankCert {
        d: gm.d,
        max_len: gm.max_len,
        l,
        r: out.r,
        hd: l - out.r,
        pivot_words: out.pivot_rows.iter().map(|&i| gm.words[i].clone()).collect(),
        pivot_rows: out.pivot_rows,
        pivot_cols: out.pivot_cols,
        method: out.method,
        strategy: strategy.to_string(),
        rows: gm.nrows(),
        r_next_len,
        stable_in_len: out.r == r_next_len,
        attempts: out.attempts,
    }
}

/// The generic matrix together with its rank certificate; answers
/// exceptional-point queries without recomputing either.
#[derive(Debug, Clone)]
pub struct GenericAnalysis {
    pub matrix: GenericMatrix,
    pub cert: GenericRankCert,
}

/// Where a point sits relative to the exceptional locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Exceptional,
    Generic,
    /// Some sampled word is undefined at the point.
    OutsideDomain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalCheck {
    pub status: PointStatus,
    pub rank_at_point: Option<usize>,
    pub r: usize,
}

impl ExceptionalCheck {
    pub fn is_exceptional(&self) -> bool {
        self.status == PointStatus::Exceptional
    }
}

impl GenericAnalysis {
    pub fn new(
        spec: &SemigroupSpec,
        d: u32,
        max_len: usize,
        strategy: &dyn RankStrategy,
        seed: u64,
    ) -> Result<GenericAnalysis> {
        let ctx = RankContext { seed };
        let matrix = generic_matrix(spec, d, max_len)?;
        let out = strategy.rank(&matrix, &ctx)?;
        let longer = generic_matrix(spec, d, max_len + 1)?;
        let r_next = if longer.nrows() == matrix.nrows() {
            out.r
        } else {
            strategy.rank(&longer, &ctx)?.r
        };
        let cert = certify(&matrix, out, strategy.name(), r_next);
        Ok(GenericAnalysis { matrix, cert })
    }

    /// Rank of the generic matrix rows evaluated at `pt`, word by word.
    pub fn is_exceptional(&self, spec: &SemigroupSpec, pt: &[FieldElem]) -> ExceptionalCheck {
        let r = self.cert.r;
        let images: Option<Vec<Point>> =
            self.matrix.words.iter().map(|w| spec.apply_word(w, pt)).collect();
        let Some(images) = images else {
            return ExceptionalCheck { status: PointStatus::OutsideDomain, rank_at_point: None, r };
        };
        let rk = rank(&eval_matrix(self.matrix.field, &images, self.matrix.nvars, self.matrix.d));
        let status = if rk < r { PointStatus::Exceptional } else { PointStatus::Generic };
        ExceptionalCheck { status, rank_at_point: Some(rk), r }
    }
}

/// Generic rank of the truncated generic matrix under `strategy`.
pub fn generic_rank(
    spec: &SemigroupSpec,
    d: u32,
    max_len: usize,
    strategy: &dyn RankStrategy,
    seed: u64,
) -> Result<GenericRankCert> {
    Ok(GenericAnalysis::new(spec, d, max_len, strategy, seed)?.cert)
}

/// One-shot exceptional-point query (computes the generic rank with the
/// specialized strategy).
pub fn is_exceptional(
    spec: &SemigroupSpec,
    pt: &[FieldElem],
    d: u32,
    max_len: usize,
    seed: u64,
) -> Result<ExceptionalCheck> {
    let analysis = GenericAnalysis::new(spec, d, max_len, &SpecializedRank::default(), seed)?;
    Ok(analysis.is_exceptional(spec, pt))
}
