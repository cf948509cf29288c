//! Comparing orbit closures of two points through their canonical
//! truncated orbit ideals.
//!
//! Every verdict is relative to the degree `d`: ideals that agree up to
//! degree `d` may still differ in higher degree.

use serde::Serialize;

use crate::dynsys::{SemigroupSpec, Word};
use crate::error::{Error, Result};
use crate::generic::{GenericAnalysis, PointStatus};
use crate::poly::Poly;
use crate::vanish::{stabilized_ideal, StabilizedIdeal, TruncatedIdeal, DEFAULT_CAP, DEFAULT_LEN_LIMIT, DEFAULT_WINDOW};
use crate::{FieldElem, Point};

/// Sampling knobs shared by all orbit-ideal comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProxyParams {
    pub d: u32,
    pub window: usize,
    pub len_limit: usize,
    pub cap: usize,
}

impl ProxyParams {
    pub fn new(d: u32) -> ProxyParams {
        ProxyParams { d, window: DEFAULT_WINDOW, len_limit: DEFAULT_LEN_LIMIT, cap: DEFAULT_CAP }
    }
}

/// The stabilized truncated orbit ideal of `point`; its canonical basis is
/// the value compared between points.
pub fn phi_proxy(spec: &SemigroupSpec, point: &[FieldElem], params: &ProxyParams) -> Result<StabilizedIdeal> {
    if point.len() != spec.nvars() {
        return Err(Error::Dimension(format!("point has {} coordinates, expected {}", point.len(), spec.nvars())));
    }
    stabilized_ideal(spec, point, params.d, params.window, params.len_limit, params.cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Equal,
    Distinct,
    OutsideDomain,
    Unstable,
}

/// Which ideal the witness comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// From the first point's ideal, nonzero at a point of the second.
    X,
    Y,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub poly: Poly,
    pub side: Side,
    /// Where the witness was found to be nonzero.
    pub at: Point,
    pub value: FieldElem,
}

/// Sampling diagnostics for one side of a comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SideDetail {
    pub stabilized: bool,
    pub used_len: usize,
    pub sample_size: usize,
    pub skipped: Vec<Word>,
}

impl SideDetail {
    fn of(st: &StabilizedIdeal) -> SideDetail {
        SideDetail {
            stabilized: st.stabilized,
            used_len: st.used_len,
            sample_size: st.sample.len(),
            skipped: st.skipped().to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparationVerdict {
    pub outcome: Outcome,
    pub d: u32,
    pub witness: Option<Witness>,
    pub x_ideal: TruncatedIdeal,
    pub y_ideal: TruncatedIdeal,
    pub x_detail: SideDetail,
    pub y_detail: SideDetail,
}

/// First basis element of `ideal` nonzero at `base`, then at the sample
/// points in order.
fn find_witness(ideal: &TruncatedIdeal, base: &[FieldElem], sample: &[Point], side: Side) -> Option<Witness> {
    let candidates = std::iter::once(base).chain(sample.iter().map(Vec::as_slice));
    for pt in candidates {
        for b in &ideal.basis {
            let value = b.eval(pt);
            if !value.is_zero() {
                return Some(Witness { poly: b.clone(), side, at: pt.to_vec(), value });
            }
        }
    }
    None
}

/// Compares the orbit closures of `x` and `y` at level `params.d`.
///
/// Outside-domain samples take precedence over instability; identical
/// inputs are always Equal.
pub fn separate(spec: &SemigroupSpec, x: &[FieldElem], y: &[FieldElem], params: &ProxyParams) -> Result<SeparationVerdict> {
    let sx = phi_proxy(spec, x, params)?;
    let sy = if x == y { sx.clone() } else { phi_proxy(spec, y, params)? };
    let outcome = if sx.outside_domain() || sy.outside_domain() {
        Outcome::OutsideDomain
    } else if x == y {
        Outcome::Equal
    } else if !sx.stabilized || !sy.stabilized {
        Outcome::Unstable
    } else if sx.ideal == sy.ideal {
        Outcome::Equal
    } else {
        Outcome::Distinct
    };
    let witness = if outcome == Outcome::Distinct {
        find_witness(&sx.ideal, y, &sy.sample.points(), Side::X)
            .or_else(|| find_witness(&sy.ideal, x, &sx.sample.points(), Side::Y))
    } else {
        None
    };
    Ok(SeparationVerdict {
        outcome,
        d: params.d,
        witness,
        x_detail: SideDetail::of(&sx),
        y_detail: SideDetail::of(&sy),
        x_ideal: sx.ideal,
        y_ideal: sy.ideal,
    })
}

/// One generator image in a proxy-invariance check.
#[derive(Debug, Clone, Serialize)]
pub struct ImageCheck {
    pub generator: usize,
    /// `None` when the generator is undefined at the base point.
    pub image: Option<Point>,
    pub outcome: Option<Outcome>,
}

#[derive(Debug, Clone)]
pub struct PhiInvarianceReport {
    pub base: Point,
    pub base_ideal: TruncatedIdeal,
    pub base_status: Option<PointStatus>,
    pub images: Vec<ImageCheck>,
    /// Generators whose image has a different proxy while the base point is
    /// not known to be exceptional.
    pub violations: Vec<usize>,
    /// Differing images at an exceptional base point, where the proxy is
    /// only expected to be constant on a dense open set.
    pub excused: Vec<usize>,
    /// Images whose comparison was inconclusive (unstable or outside domain).
    pub undetermined: Vec<usize>,
}

impl PhiInvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that each defined generator image of `point` has the same proxy
/// value as `point`. When `analysis` is given, discrepancies at exceptional
/// base points are reported as excused instead of as violations.
pub fn check_phi_invariance(
    spec: &SemigroupSpec,
    point: &[FieldElem],
    params: &ProxyParams,
    analysis: Option<&GenericAnalysis>,
) -> Result<PhiInvarianceReport> {
    let base = phi_proxy(spec, point, params)?;
    let base_status = analysis.map(|a| a.is_exceptional(spec, point).status);
    let mut report = PhiInvarianceReport {
        base: point.to_vec(),
        base_ideal: base.ideal.clone(),
        base_status,
        images: Vec::new(),
        violations: Vec::new(),
        excused: Vec::new(),
        undetermined: Vec::new(),
    };
    for (i, g) in spec.generators().iter().enumerate() {
        let Some(img) = g.apply(point) else {
            report.images.push(ImageCheck { generator: i, image: None, outcome: None });
            continue;
        };
        let v = separate(spec, point, &img, params)?;
        match v.outcome {
            Outcome::Equal => {}
            Outcome::Distinct if base_status == Some(PointStatus::Exceptional) => report.excused.push(i),
            Outcome::Distinct => report.violations.push(i),
            Outcome::OutsideDomain | Outcome::Unstable => report.undetermined.push(i),
        }
        report.images.push(ImageCheck { generator: i, image: Some(img), outcome: Some(v.outcome) });
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub probe: Point,
    /// Same proxy value as the reference point.
    pub equal: bool,
    /// Every basis polynomial of the reference ideal vanishes at the probe.
    pub member: bool,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct FiberReport {
    pub point: Point,
    pub ideal: TruncatedIdeal,
    pub probes: Vec<ProbeResult>,
    /// Probes with `equal` but not `member`.
    pub failures: Vec<usize>,
}

impl FiberReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For a monoid, a point with the same proxy value as `x` lies in its own
/// orbit closure and hence on the zero set of `x`'s ideal.
pub fn fiber_check(spec: &SemigroupSpec, x: &[FieldElem], probes: &[Point], params: &ProxyParams) -> Result<FiberReport> {
    if !spec.is_monoid() {
        return Err(Error::NotMonoid);
    }
    let base = phi_proxy(spec, x, params)?;
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (i, p) in probes.iter().enumerate() {
        let v = separate(spec, x, p, params)?;
        let equal = v.outcome == Outcome::Equal;
        let member = base.ideal.vanishes_at(p);
        if equal && !member {
            failures.push(i);
        }
        results.push(ProbeResult { probe: p.clone(), equal, member, outcome: v.outcome });
    }
    Ok(FiberReport { point: x.to_vec(), ideal: base.ideal, probes: results, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::SelfMap;
    use crate::exactla::Field;
    use crate::generic::ExactRank;
    use crate::poly::RatFunc;
    use proptest::prelude::*;

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    fn pt(v: &[i64]) -> Point {
        v.iter().map(|&a| q(a)).collect()
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

    fn x_minus_y() -> Poly {
        &Poly::var(Q, 2, 0) - &Poly::var(Q, 2, 1)
    }

    fn shown(ideal: &TruncatedIdeal) -> Vec<String> {
        ideal.basis.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn proxy_examples() {
        let p1 = ProxyParams::new(1);
        assert_eq!(shown(&phi_proxy(&additive(), &pt(&[2, 0]), &p1).unwrap().ideal), ["x - 2"]);
        let diag = phi_proxy(&scaling(), &pt(&[1, 1]), &p1).unwrap().ideal;
        assert_eq!(diag.hd, 1);
        assert!(diag.contains(&x_minus_y()));
        let sq = phi_proxy(&squaring(), &pt(&[3]), &ProxyParams::new(2)).unwrap();
        assert!(sq.stabilized && sq.ideal.is_zero());
        assert!(phi_proxy(&squaring(), &pt(&[3, 1]), &p1).is_err());
    }

    #[test]
    fn separation_examples() {
        let p1 = ProxyParams::new(1);
        let v = separate(&additive(), &pt(&[2, 0]), &pt(&[2, 7]), &p1).unwrap();
        assert_eq!(v.outcome, Outcome::Equal);
        assert!(v.witness.is_none());

        let v = separate(&additive(), &pt(&[2, 0]), &pt(&[3, 0]), &p1).unwrap();
        assert_eq!(v.outcome, Outcome::Distinct);
        let w = v.witness.unwrap();
        assert_eq!(w.poly.to_string(), "x - 2");
        assert_eq!(w.side, Side::X);
        assert_eq!((w.at, w.value), (pt(&[3, 0]), q(1)));

        let v = separate(&scaling(), &pt(&[1, 1]), &pt(&[1, 2]), &p1).unwrap();
        assert_eq!(v.outcome, Outcome::Distinct);

        let v = separate(&squaring(), &pt(&[5]), &pt(&[5]), &ProxyParams::new(3)).unwrap();
        assert_eq!(v.outcome, Outcome::Equal);
    }

    #[test]
    fn witness_falls_back_to_other_side() {
        // The origin lies on the diagonal, so x - y cannot separate it.
        let v = separate(&scaling(), &pt(&[1, 1]), &pt(&[0, 0]), &ProxyParams::new(1)).unwrap();
        assert_eq!(v.outcome, Outcome::Distinct);
        let w = v.witness.unwrap();
        assert_eq!(w.side, Side::Y);
        assert_eq!(w.poly.to_string(), "x");
        assert_eq!(w.at, pt(&[1, 1]));
        assert!(!w.value.is_zero());
    }

    #[test]
    fn outside_domain_verdict() {
        let (x, y) = (RatFunc::var(Q, 2, 0), RatFunc::var(Q, 2, 1));
        let g = SelfMap::new(vec![x.clone(), y.div(&x).unwrap()]).unwrap();
        let spec = SemigroupSpec::new(vec![g], true).unwrap();
        let v = separate(&spec, &pt(&[0, 1]), &pt(&[1, 1]), &ProxyParams::new(1)).unwrap();
        assert_eq!(v.outcome, Outcome::OutsideDomain);
        assert_eq!(v.x_detail.skipped.len(), 1);
    }

    #[test]
    fn unstable_verdict() {
        let params = ProxyParams { d: 3, window: 3, len_limit: 2, cap: DEFAULT_CAP };
        let v = separate(&additive(), &pt(&[1, 0]), &pt(&[1, 1]), &params).unwrap();
        assert_eq!(v.outcome, Outcome::Unstable);
    }

    #[test]
    fn phi_invariance_examples() {
        let p1 = ProxyParams::new(1);
        let rep = check_phi_invariance(&additive(), &pt(&[2, 0]), &p1, None).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.images.len(), 1);
        assert_eq!(rep.images[0].image, Some(pt(&[2, 2])));

        let rep = check_phi_invariance(&squaring(), &pt(&[3]), &ProxyParams::new(2), None).unwrap();
        assert!(rep.passed());
        assert!(rep.base_ideal.is_zero());

        let rep = check_phi_invariance(&scaling(), &pt(&[1, 1]), &p1, None).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.base_ideal.hd, 1);
        assert!(rep.base_ideal.contains(&x_minus_y()));
    }

    #[test]
    fn exceptional_base_is_excused() {
        // -1 -> 1: the monoid orbit {-1, 1} differs from the fixed point {1}.
        let sq = squaring();
        let params = ProxyParams::new(2);
        let rep = check_phi_invariance(&sq, &pt(&[-1]), &params, None).unwrap();
        assert_eq!(rep.violations, vec![0]);
        let analysis = GenericAnalysis::new(&sq, 2, 3, &ExactRank, 0).unwrap();
        let rep = check_phi_invariance(&sq, &pt(&[-1]), &params, Some(&analysis)).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.excused, vec![0]);
    }

    #[test]
    fn fiber_examples() {
        let p1 = ProxyParams::new(1);
        let probes = vec![pt(&[2, 100]), pt(&[3, 0]), pt(&[2, 0])];
        let rep = fiber_check(&additive(), &pt(&[2, 0]), &probes, &p1).unwrap();
        assert!(rep.passed());
        let flags: Vec<(bool, bool)> = rep.probes.iter().map(|p| (p.equal, p.member)).collect();
        assert_eq!(flags, [(true, true), (false, false), (true, true)]);

        let (x, y) = (RatFunc::var(Q, 2, 0), RatFunc::var(Q, 2, 1));
        let non_monoid = SemigroupSpec::new(vec![SelfMap::new(vec![x.clone(), x.add(&y)]).unwrap()], false).unwrap();
        assert_eq!(fiber_check(&non_monoid, &pt(&[2, 0]), &probes, &p1).unwrap_err(), Error::NotMonoid);
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        prop::collection::vec(-3i64..4, 2).prop_map(|v| pt(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn separation_is_symmetric(a in arb_point(), b in arb_point()) {
            let p1 = ProxyParams::new(1);
            let spec = additive();
            let ab = separate(&spec, &a, &b, &p1).unwrap();
            let ba = separate(&spec, &b, &a, &p1).unwrap();
            prop_assert_eq!(ab.outcome, ba.outcome);
            if let Some(w) = ab.witness {
                let (own, other) = match w.side { Side::X => (&a, &b), Side::Y => (&b, &a) };
                let own_sample = phi_proxy(&spec, own, &p1).unwrap().sample.points();
                for p in &own_sample {
                    prop_assert!(w.poly.eval(p).is_zero());
                }
                let other_sample = phi_proxy(&spec, other, &p1).unwrap().sample.points();
                prop_assert!(&w.at == other || other_sample.contains(&w.at));
                prop_assert_eq!(w.poly.eval(&w.at), w.value);
            }
        }

        #[test]
        fn equality_is_transitive(a in arb_point(), b in arb_point(), c in arb_point()) {
            let p1 = ProxyParams::new(1);
            let spec = scaling();
            let eq = |u: &Point, v: &Point| separate(&spec, u, v, &p1).unwrap().outcome == Outcome::Equal;
            if eq(&a, &b) && eq(&b, &c) {
                prop_assert!(eq(&a, &c));
            }
        }

        #[test]
        fn images_share_the_proxy(a in arb_point()) {
            let spec = additive();
            let p1 = ProxyParams::new(1);
            let g = &spec.generators()[0];
            let img = g.apply(&a).unwrap();
            let v = separate(&spec, &a, &img, &p1).unwrap();
            prop_assert_eq!(v.outcome, Outcome::Equal);
        }
    }
}
