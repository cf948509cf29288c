use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{GenericAnalysis, GenericRankCert, PointStatus};
use crate::dynsys::SemigroupSpec;
use crate::error::{Error, Result};
use crate::exactla::bareiss;
use crate::poly::Poly;
use crate::Point;

/// Polynomials whose common zero set contains the exceptional locus (within
/// the domain of the sampled words).
///
/// Each generator is the numerator of an `r x r` minor after clearing row
/// denominators, so it also vanishes where those denominators do. When the
/// budget stops the enumeration early the zero set may be strictly larger
/// than the locus; rank-based queries remain authoritative.
#[derive(Debug, Clone)]
pub struct ExceptionalIdealGens {
    pub d: u32,
    pub r: usize,
    pub gens: Vec<Poly>,
    pub minors_examined: usize,
    /// Every `r x r` minor was examined.
    pub complete: bool,
}

impl ExceptionalIdealGens {
    pub fn vanish_at(&self, pt: &[crate::FieldElem]) -> bool {
        self.gens.iter().all(|g| g.eval(pt).is_zero())
    }
}

/// Next k-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn all_combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        cur = next_combination(&mut next, n).then_some(next);
        Some(out)
    })
}

/// Single-index substitutions of `base` by elements of `0..n` not in it.
fn neighbours(base: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for pos in 0..base.len() {
        for cand in 0..n {
            if base.contains(&cand) {
                continue;
            }
            let mut v = base.to_vec();
            v[pos] = cand;
            v.sort_unstable();
            out.push(v);
        }
    }
    out
}

/// Minor selections in priority order: the certified pivot minor, minors
/// differing from it in one row or one column, then all others
/// lexicographically.
fn minor_order(cert: &GenericRankCert, nrows: usize, ncols: usize, budget: usize) -> (Vec<(Vec<usize>, Vec<usize>)>, bool) {
    let r = cert.r;
    let pr = cert.pivot_rows.clone();
    let pc = cert.pivot_cols.clone();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |rows: Vec<usize>, cols: Vec<usize>, out: &mut Vec<_>| {
        if out.len() < budget && seen.insert((rows.clone(), cols.clone())) {
            out.push((rows, cols));
        }
    };
    push(pr.clone(), pc.clone(), &mut out);
    for rows in neighbours(&pr, nrows) {
        push(rows, pc.clone(), &mut out);
    }
    for cols in neighbours(&pc, ncols) {
        push(pr.clone(), cols, &mut out);
    }
    'all: for rows in all_combinations(nrows, r) {
        for cols in all_combinations(ncols, r) {
            if out.len() >= budget {
                break 'all;
            }
            push(rows.clone(), cols, &mut out);
        }
    }
    let total = all_combinations(nrows, r).count() * all_combinations(ncols, r).count();
    let complete = out.len() == total;
    (out, complete)
}

/// Numerators of `r x r` minors of the generic matrix, at most `budget` of
/// them, made monic and deduplicated; zero minors are dropped.
pub fn exceptional_generators(analysis: &GenericAnalysis, budget: usize) -> Result<ExceptionalIdealGens> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let cert = &analysis.cert;
    let gm = &analysis.matrix;
    if cert.r == 0 {
        return Ok(ExceptionalIdealGens { d: cert.d, r: 0, gens: Vec::new(), minors_examined: 0, complete: true });
    }
    let rows = gm.cleared_rows();
    let (order, complete) = minor_order(cert, gm.nrows(), gm.ncols(), budget);
    let zero = Poly::zero(gm.field, gm.nvars);
    let dets: Vec<Poly> = order
        .par_iter()
        .map(|(ri, ci)| {
            let sub: Vec<Vec<Poly>> =
                ri.iter().map(|&i| ci.iter().map(|&j| rows[i][j].clone()).collect()).collect();
            bareiss::determinant(sub, zero.clone())
        })
        .collect();
    let mut seen = HashSet::new();
    let mut gens = Vec::new();
    for det in dets {
        if det.is_zero() {
            continue;
        }
        let m = det.monic();
        if seen.insert(m.clone()) {
            gens.push(m);
        }
    }
    Ok(ExceptionalIdealGens { d: cert.d, r: cert.r, gens, minors_examined: order.len(), complete })
}

/// A generator image that left the exceptional locus.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceViolation {
    pub point: Point,
    pub generator: usize,
    pub image: Point,
}

/// Outcome of checking that generator images of exceptional points are
/// again exceptional.
#[derive(Debug, Clone, Default, Serialize)]
pub struct InvarianceReport {
    /// Sample points that are rank-exceptional.
    pub exceptional_points: usize,
    pub images_checked: usize,
    /// Images at which some sampled word is undefined.
    pub images_outside_domain: usize,
    /// Sample points not on the zero set of the generators (precondition failed).
    pub off_locus: Vec<Point>,
    /// Points on the generators' zero set whose rank does not drop: an
    /// artifact of the minor budget or of cleared denominators.
    pub locus_but_generic: Vec<Point>,
    pub violations: Vec<InvarianceViolation>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For each sample point on the generators' zero set that is
/// rank-exceptional, every defined generator image must be exceptional too.
pub fn check_forward_invariance(
    spec: &SemigroupSpec,
    analysis: &GenericAnalysis,
    gens: &ExceptionalIdealGens,
    sample: &[Point],
) -> InvarianceReport {
    let mut report = InvarianceReport::default();
    for p in sample {
        if !gens.vanish_at(p) {
            report.off_locus.push(p.clone());
            continue;
        }
        if !analysis.is_exceptional(spec, p).is_exceptional() {
            report.locus_but_generic.push(p.clone());
            continue;
        }
        report.exceptional_points += 1;
        for (i, g) in spec.generators().iter().enumerate() {
            let Some(img) = g.apply(p) else { continue };
            report.images_checked += 1;
            match analysis.is_exceptional(spec, &img).status {
                PointStatus::Exceptional => {}
                PointStatus::OutsideDomain => report.images_outside_domain += 1,
                PointStatus::Generic => report.violations.push(InvarianceViolation {
                    point: p.clone(),
                    generator: i,
                    image: img,
                }),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::tests::{additive, identity_monoid, squaring};
    use super::super::{ExactRank, SpecializedRank};
    use super::*;
    use crate::exactla::{Field, FieldElem};

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    #[test]
    fn combinations_enumerate_lexicographically() {
        let all: Vec<Vec<usize>> = all_combinations(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        assert_eq!(all_combinations(2, 3).count(), 0);
        assert_eq!(all_combinations(3, 0).count(), 1);
    }

    #[test]
    fn additive_generators() {
        // Rows (1, x, x+y), (1, x, 2x+y): minors 0, x, x^2.
        let add = additive(false);
        let a = GenericAnalysis::new(&add, 1, 2, &ExactRank, 0).unwrap();
        let g = exceptional_generators(&a, 16).unwrap();
        assert!(g.complete);
        let shown: HashSet<String> = g.gens.iter().map(ToString::to_string).collect();
        assert_eq!(shown, HashSet::from(["x".to_string(), "x^2".to_string()]));
        assert!(g.vanish_at(&[q(0), q(9)]));
        assert!(!g.vanish_at(&[q(1), q(9)]));
        assert_eq!(exceptional_generators(&a, 0).unwrap_err(), Error::ZeroBudget);
    }

    #[test]
    fn identity_generators_are_monomials() {
        let spec = identity_monoid();
        let a = GenericAnalysis::new(&spec, 1, 2, &ExactRank, 0).unwrap();
        let g = exceptional_generators(&a, 16).unwrap();
        let shown: Vec<String> = g.gens.iter().map(ToString::to_string).collect();
        assert_eq!(g.r, 1);
        assert_eq!(shown.len(), 3);
        assert!(shown.contains(&"1".to_string()));
        assert!(!g.vanish_at(&[q(0), q(0)]));
    }

    #[test]
    fn squaring_generator_roots() {
        let sq = squaring(false);
        let a = GenericAnalysis::new(&sq, 2, 3, &SpecializedRank::default(), 1).unwrap();
        let g = exceptional_generators(&a, 4).unwrap();
        assert_eq!(g.gens.len(), 1);
        for v in [0, 1, -1] {
            assert!(g.gens[0].eval(&[q(v)]).is_zero());
        }
        assert!(!g.gens[0].eval(&[q(2)]).is_zero());
    }

    #[test]
    fn forward_invariance() {
        let add = additive(true);
        let a = GenericAnalysis::new(&add, 1, 2, &ExactRank, 0).unwrap();
        let g = exceptional_generators(&a, 64).unwrap();
        let rep = check_forward_invariance(&add, &a, &g, &[vec![q(0), q(1)], vec![q(0), q(7)]]);
        assert!(rep.passed());
        assert_eq!(rep.exceptional_points, 2);
        assert_eq!(rep.images_checked, 2);

        let sq = squaring(false);
        let a = GenericAnalysis::new(&sq, 2, 3, &ExactRank, 0).unwrap();
        let g = exceptional_generators(&a, 4).unwrap();
        let rep = check_forward_invariance(&sq, &a, &g, &[vec![q(-1)]]);
        assert!(rep.passed());
        assert_eq!(rep.images_checked, 1);

        let rep = check_forward_invariance(&sq, &a, &g, &[]);
        assert!(rep.passed());
        assert_eq!(rep.images_checked, 0);
    }
}
