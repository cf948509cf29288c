//! Polynomial invariants of the action, verification of candidate rational
//! invariants, and density evidence for individual orbits.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynsys::{random_point, SelfMap, SemigroupSpec, Word};
use crate::error::{Error, Result};
use crate::exactla::{nullspace, Matrix};
use crate::generic::{GenericAnalysis, PointStatus, SpecializedRank};
use crate::poly::{monomials_up_to, Monomial, Poly, RatFunc};
use crate::separator::{phi_proxy, ProxyParams};
use crate::{FieldElem, Point};

/// Polynomials of degree `<= d` fixed by every generator, as a canonical
/// (reduced echelon) basis. Always contains the constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantBasis {
    pub d: u32,
    pub basis: Vec<Poly>,
    pub dim: usize,
}

/// `P_m - D * M_m` for every monomial `M_m`, where `D = (b_1 ... b_n)^d`
/// and `P_m = D * (M_m o g)`.
fn invariance_defects(g: &SelfMap, monos: &[Monomial], d: u32) -> Vec<Poly> {
    let (nums, dens): (Vec<&Poly>, Vec<&Poly>) = g.components().iter().map(|c| (c.num(), c.den())).unzip();
    let den_power: Vec<Vec<Poly>> = dens.iter().map(|b| (0..=d).map(|e| b.pow(e)).collect()).collect();
    let big_d = den_power.iter().fold(Poly::one(g.field(), g.nvars()), |acc, p| &acc * &p[d as usize]);
    monos
        .iter()
        .map(|m| {
            let mut p = Poly::one(g.field(), g.nvars());
            for (i, &e) in m.exponents().iter().enumerate() {
                p = &(&p * &nums[i].pow(e)) * &den_power[i][(d - e) as usize];
            }
            &p - &big_d.mul_monomial(m, &g.field().one())
        })
        .collect()
}

pub fn poly_invariants(spec: &SemigroupSpec, d: u32) -> InvariantBasis {
    let (field, nvars) = (spec.field(), spec.nvars());
    let monos = monomials_up_to(nvars, d);
    let blocks: Vec<Vec<Vec<FieldElem>>> = spec
        .generators()
        .par_iter()
        .map(|g| {
            let defects = invariance_defects(g, &monos, d);
            let support: BTreeSet<&Monomial> = defects.iter().flat_map(|p| p.terms().map(|(m, _)| m)).collect();
            support.into_iter().map(|t| defects.iter().map(|p| p.coeff(t)).collect()).collect()
        })
        .collect();
    let rows: Vec<Vec<FieldElem>> = blocks.into_iter().flatten().collect();
    let system = Matrix::from_rows(field, monos.len(), rows).expect("constraint rows match the monomial count");
    let basis: Vec<Poly> =
        nullspace(&system).iter().map(|v| Poly::from_coeffs(field, nvars, &monos, v)).collect();
    InvariantBasis { d, dim: basis.len(), basis }
}

/// Random-word evaluation check of a basis computed from generators alone.
#[derive(Debug, Clone, Default, Serialize)]
pub struct WordSpotCheck {
    pub words_tested: usize,
    /// Draws that landed on an indeterminacy point of the word.
    pub undefined: usize,
    /// `(word, basis index)` pairs with `f(w(p)) != f(p)`.
    pub failures: Vec<(String, usize)>,
}

impl WordSpotCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates every basis polynomial at `p` and `w(p)` for `trials` random
/// words of length `1..=max_len` and random points `p`.
pub fn spot_check_words(
    spec: &SemigroupSpec,
    inv: &InvariantBasis,
    trials: usize,
    max_len: usize,
    seed: u64,
) -> WordSpotCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ngens = spec.generators().len();
    let mut out = WordSpotCheck::default();
    for _ in 0..trials {
        let len = rng.gen_range(1..=max_len.max(1));
        let word = Word((0..len).map(|_| rng.gen_range(0..ngens)).collect());
        let p = random_point(spec.field(), spec.nvars(), &mut rng);
        let Some(img) = spec.apply_word(&word, &p) else {
            out.undefined += 1;
            continue;
        };
        out.words_tested += 1;
        for (i, f) in inv.basis.iter().enumerate() {
            if f.eval(&img) != f.eval(&p) {
                out.failures.push((word.to_string(), i));
            }
        }
    }
    out
}

/// Whether `p / q` is fixed by every generator, with the nonzero residues
/// `(p o g) q - (q o g) p` of the generators that fail.
#[derive(Debug, Clone)]
pub struct RationalInvarianceCheck {
    pub holds: bool,
    pub residues: Vec<(usize, RatFunc)>,
}

pub fn verify_rational_invariant(spec: &SemigroupSpec, p: &Poly, q: &Poly) -> Result<RationalInvarianceCheck> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p.nvars() != spec.nvars() || q.nvars() != spec.nvars() {
        return Err(Error::Dimension("candidate invariant has the wrong number of variables".into()));
    }
    if p.field() != spec.field() || q.field() != spec.field() {
        return Err(Error::MixedFields(p.field(), spec.field()));
    }
    let (rp, rq) = (RatFunc::from_poly(p.clone()), RatFunc::from_poly(q.clone()));
    let residues: Vec<(usize, RatFunc)> = spec
        .generators()
        .iter()
        .enumerate()
        .filter_map(|(i, g)| {
            let res = p.compose(g.components()).mul(&rq).sub(&q.compose(g.components()).mul(&rp));
            (!res.is_zero()).then_some((i, res))
        })
        .collect();
    Ok(RationalInvarianceCheck { holds: residues.is_empty(), residues })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityVerdict {
    EvidenceForDense,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub point: Point,
    pub d_orbit: u32,
    pub d_inv: u32,
    pub orbit_ideal_zero: bool,
    pub orbit_stabilized: bool,
    pub invariants_trivial: bool,
    pub invariant_dim: usize,
    pub exceptional_flag: bool,
    pub outside_domain: bool,
    pub verdict: DensityVerdict,
}

/// Evidence that the orbit of `point` is dense: a zero (stabilized) orbit
/// ideal at `d_orbit`, only constant polynomial invariants up to `d_inv`,
/// and a point that is not exceptional at `d_orbit`.
///
/// Outside-domain points count as exceptional.
pub fn density_evidence(
    spec: &SemigroupSpec,
    point: &[FieldElem],
    d_orbit: u32,
    d_inv: u32,
    params: &ProxyParams,
    max_len: usize,
    seed: u64,
) -> Result<DensityReport> {
    let orbit = phi_proxy(spec, point, &ProxyParams { d: d_orbit, ..*params })?;
    let invariants = poly_invariants(spec, d_inv);
    let analysis = GenericAnalysis::new(spec, d_orbit, max_len, &SpecializedRank::default(), seed)?;
    let check = analysis.is_exceptional(spec, point);
    let outside_domain = orbit.outside_domain() || check.status == PointStatus::OutsideDomain;
    let orbit_ideal_zero = orbit.stabilized && orbit.ideal.is_zero();
    let invariants_trivial = invariants.dim == 1;
    let exceptional_flag = check.status != PointStatus::Generic;
    let verdict = if orbit_ideal_zero && invariants_trivial && !exceptional_flag && !outside_domain {
        DensityVerdict::EvidenceForDense
    } else {
        DensityVerdict::Inconclusive
    };
    Ok(DensityReport {
        point: point.to_vec(),
        d_orbit,
        d_inv,
        orbit_ideal_zero,
        orbit_stabilized: orbit.stabilized,
        invariants_trivial,
        invariant_dim: invariants.dim,
        exceptional_flag,
        outside_domain,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::orbit_sample;
    use crate::exactla::Field;
    use proptest::prelude::*;

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    fn additive() -> SemigroupSpec {
        let (x, y) = (RatFunc::var(Q, 2, 0), RatFunc::var(Q, 2, 1));
        SemigroupSpec::new(vec![SelfMap::new(vec![x.clone(), x.add(&y)]).unwrap()], true).unwrap()
    }

    fn scaling() -> SemigroupSpec {
        let two = RatFunc::constant(Q, 2, q(2));
        let (x, y) = (RatFunc::var(Q, 2, 0), RatFunc::var(Q, 2, 1));
        SemigroupSpec::new(vec![SelfMap::new(vec![two.mul(&x), two.mul(&y)]).unwrap()], true).unwrap()
    }

    fn squaring() -> SemigroupSpec {
        let x = RatFunc::var(Q, 1, 0);
        SemigroupSpec::new(vec![SelfMap::new(vec![x.pow(2)]).unwrap()], true).unwrap()
    }

    /// (x, y) -> (x, y / x): rational, fixes x.
    fn shear() -> SemigroupSpec {
        let (x, y) = (RatFunc::var(Q, 2, 0), RatFunc::var(Q, 2, 1));
        SemigroupSpec::new(vec![SelfMap::new(vec![x.clone(), y.div(&x).unwrap()]).unwrap()], true).unwrap()
    }

    fn shown(b: &InvariantBasis) -> Vec<String> {
        b.basis.iter().map(ToString::to_string).collect()
    }

    fn pv(i: usize) -> Poly {
        Poly::var(Q, 2, i)
    }

    #[test]
    fn invariant_examples() {
        let b = poly_invariants(&additive(), 2);
        assert_eq!(shown(&b), ["1", "x", "x^2"]);
        assert_eq!(b.dim, 3);
        assert_eq!(shown(&poly_invariants(&squaring(), 4)), ["1"]);
        let id = SemigroupSpec::new(vec![SelfMap::identity(Q, 2)], true).unwrap();
        assert_eq!(poly_invariants(&id, 1).dim, 3);
        assert_eq!(shown(&poly_invariants(&shear(), 2)), ["1", "x", "x^2"]);
        assert_eq!(shown(&poly_invariants(&additive(), 0)), ["1"]);
    }

    #[test]
    fn rational_invariant_examples() {
        assert!(verify_rational_invariant(&scaling(), &pv(0), &pv(1)).unwrap().holds);
        let one = Poly::one(Q, 2);
        assert!(verify_rational_invariant(&additive(), &pv(0), &one).unwrap().holds);
        let c = verify_rational_invariant(&additive(), &pv(0), &pv(1)).unwrap();
        assert!(!c.holds);
        assert_eq!(c.residues.len(), 1);
        assert_eq!(c.residues[0].1.to_string(), "-x^2");
        assert_eq!(verify_rational_invariant(&additive(), &pv(0), &Poly::zero(Q, 2)).unwrap_err(), Error::ZeroDenominator);
    }

    #[test]
    fn density_examples() {
        let params = ProxyParams::new(3);
        let r = density_evidence(&squaring(), &[q(3)], 3, 6, &params, 4, 7).unwrap();
        assert!(r.orbit_ideal_zero && r.invariants_trivial && !r.exceptional_flag);
        assert_eq!(r.verdict, DensityVerdict::EvidenceForDense);

        let r = density_evidence(&squaring(), &[q(1)], 3, 6, &params, 4, 7).unwrap();
        assert!(r.exceptional_flag);
        assert_eq!(r.verdict, DensityVerdict::Inconclusive);

        for d in 1..=3 {
            let r = density_evidence(&additive(), &[q(2), q(0)], d, d, &ProxyParams::new(d), 3, 7).unwrap();
            assert!(!r.orbit_ideal_zero && !r.invariants_trivial);
            assert_eq!(r.verdict, DensityVerdict::Inconclusive);
        }
    }

    #[test]
    fn word_spot_check_accepts_invariants() {
        for spec in [additive(), squaring(), shear()] {
            let inv = poly_invariants(&spec, 3);
            let check = spot_check_words(&spec, &inv, 20, 3, 1);
            assert!(check.passed(), "{:?}", check.failures);
            assert_eq!(check.words_tested + check.undefined, 20);
        }
    }

    #[test]
    fn word_spot_check_catches_non_invariant() {
        let fake = InvariantBasis { d: 1, basis: vec![Poly::var(Q, 2, 1)], dim: 1 };
        let check = spot_check_words(&additive(), &fake, 5, 2, 1);
        assert_eq!(check.failures.len(), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn basis_elements_verify(d in 0u32..4) {
            for spec in [additive(), scaling(), squaring(), shear()] {
                let one = Poly::one(Q, spec.nvars());
                for f in poly_invariants(&spec, d).basis {
                    prop_assert!(verify_rational_invariant(&spec, &f, &one).unwrap().holds);
                }
            }
        }

        #[test]
        fn degree_filtration(d in 1u32..4, lower in 0u32..4) {
            let lower = lower.min(d - 1);
            for spec in [additive(), scaling(), shear()] {
                let high = poly_invariants(&spec, d);
                let low = poly_invariants(&spec, lower);
                let truncated: Vec<&Poly> = high.basis.iter().filter(|p| p.total_degree().unwrap_or(0) <= lower).collect();
                prop_assert_eq!(truncated.len(), low.dim);
                for p in truncated {
                    prop_assert!(low.basis.contains(p));
                }
            }
        }

        #[test]
        fn invariants_are_constant_on_orbits(a in -4i64..5, b in 1i64..5) {
            for spec in [additive(), scaling(), shear()] {
                let base = vec![q(b), q(a)];
                let sample = orbit_sample(&spec, &base, 4, 1000);
                for f in poly_invariants(&spec, 2).basis {
                    let v0 = f.eval(&base);
                    for p in sample.points() {
                        prop_assert_eq!(f.eval(&p), v0.clone());
                    }
                }
            }
        }

        #[test]
        fn verification_ignores_common_scalar(c in 1i64..9, neg in any::<bool>()) {
            let c = if neg { q(-c) } else { q(c) };
            for (p, qq) in [(pv(0), pv(1)), (pv(0), Poly::one(Q, 2)), (&pv(0) * &pv(1), &pv(0) - &pv(1))] {
                for spec in [additive(), scaling()] {
                    let plain = verify_rational_invariant(&spec, &p, &qq).unwrap().holds;
                    let scaled = verify_rational_invariant(&spec, &p.scale(&c), &qq.scale(&c)).unwrap().holds;
                    prop_assert_eq!(plain, scaled);
                }
            }
        }
    }
}
