use std::fmt;

use crate::error::{Error, Result};
use crate::exactla::{Field, FieldElem};

use super::Poly;

/// A fraction of polynomials, used for elements of the function field.
///
/// Normalization keeps the denominator monic, cancels the common monomial
/// factor and replaces the pair by a polynomial when the denominator divides
/// the numerator. No multivariate gcd is taken, so two equal functions may
/// have different representations; equality is decided by
/// cross-multiplication.
#[derive(Debug, Clone)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RatFunc::normalized(num, den))
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let den = Poly::one(p.field(), p.nvars());
        RatFunc { num: p, den }
    }

    pub fn zero(field: Field, nvars: usize) -> RatFunc {
        RatFunc::from_poly(Poly::zero(field, nvars))
    }

    pub fn constant(field: Field, nvars: usize, c: FieldElem) -> RatFunc {
        RatFunc::from_poly(Poly::constant(field, nvars, c))
    }

    pub fn var(field: Field, nvars: usize, i: usize) -> RatFunc {
        RatFunc::from_poly(Poly::var(field, nvars, i))
    }

    fn normalized(num: Poly, den: Poly) -> RatFunc {
        let (field, nvars) = (num.field(), num.nvars());
        if num.is_zero() {
            return RatFunc::zero(field, nvars);
        }
        if let Some(c) = den.as_constant() {
            let inv = c.inv().expect("nonzero denominator");
            return RatFunc::from_poly(num.scale(&inv));
        }
        let common = num.monomial_content().gcd(&den.monomial_content());
        let (num, den) = if common.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&common), den.div_monomial(&common))
        };
        if let Some(q) = num.div_exact(&den) {
            return RatFunc::from_poly(q);
        }
        let lc_inv = den.leading().map(|(_, c)| c.inv().expect("nonzero")).expect("nonzero den");
        RatFunc { num: num.scale(&lc_inv), den: den.scale(&lc_inv) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn field(&self) -> Field {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the denominator is the constant 1.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The polynomial this function equals, if its denominator is constant.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// Value at `pt`, or `None` when the denominator vanishes there.
    pub fn eval(&self, pt: &[FieldElem]) -> Option<FieldElem> {
        let d = self.den.eval(pt);
        let d_inv = d.inv()?;
        Some(&self.num.eval(pt) * &d_inv)
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.den == other.den {
            return RatFunc::normalized(&self.num + &other.num, self.den.clone());
        }
        RatFunc::normalized(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::normalized(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RatFunc::normalized(&self.num * &other.den, &self.den * &other.num))
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc::normalized(self.num.pow(e), self.den.pow(e))
    }

    /// Substitutes rational functions for the variables. Fails only when the
    /// substituted denominator vanishes identically, which cannot happen for
    /// a dominant substitution.
    pub fn compose(&self, subst: &[RatFunc]) -> Result<RatFunc> {
        let n = compose_poly(&self.num, subst);
        if self.is_polynomial() {
            return Ok(n);
        }
        let d = compose_poly(&self.den, subst);
        n.div(&d)
    }

    /// Equality in the function field: `a.num * b.den == b.num * a.den`.
    pub fn equals(&self, other: &RatFunc) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn reduce_mod(&self, p: u64) -> Option<RatFunc> {
        let num = self.num.reduce_mod(p)?;
        let den = self.den.reduce_mod(p)?;
        RatFunc::new(num, den).ok()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> RatFuncDisplay<'a> {
        RatFuncDisplay { f: self, names }
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for RatFunc {}

/// Free-function form of [`RatFunc::equals`].
pub fn ratfunc_equal(a: &RatFunc, b: &RatFunc) -> bool {
    a.equals(b)
}

pub struct RatFuncDisplay<'a> {
    f: &'a RatFunc,
    names: &'a [String],
}

impl fmt::Display for RatFuncDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.f.num.display(self.names);
        if self.f.is_polynomial() {
            return write!(f, "{num}");
        }
        let den = self.f.den.display(self.names);
        let wrap = |p: &Poly| p.num_terms() > 1 || p.leading().is_some_and(|(_, c)| !c.is_one());
        // A product in the denominator needs parentheses even as a monomial.
        let wrap_den = wrap(&self.f.den) || self.f.den.leading().is_some_and(|(m, _)| {
            m.exponents().iter().filter(|&&e| e > 0).count() > 1
        });
        match (wrap(&self.f.num), wrap_den) {
            (true, true) => write!(f, "({num})/({den})"),
            (true, false) => write!(f, "({num})/{den}"),
            (false, true) => write!(f, "{num}/({den})"),
            (false, false) => write!(f, "{num}/{den}"),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = super::default_var_names(self.nvars());
        write!(f, "{}", self.display(&names))
    }
}

/// `p(a_1/b_1, ..., a_n/b_n)` over the common denominator
/// `prod b_i^{D_i}`, where `D_i` is the degree of `p` in variable `i`.
pub(super) fn compose_poly(p: &Poly, subst: &[RatFunc]) -> RatFunc {
    assert_eq!(subst.len(), p.nvars(), "substitution length must match variable count");
    let field = p.field();
    let out_nvars = subst.first().map_or(p.nvars(), RatFunc::nvars);
    if p.is_zero() {
        return RatFunc::zero(field, out_nvars);
    }
    let degs: Vec<u32> = (0..p.nvars()).map(|i| p.degree_in(i)).collect();
    let num_pows: Vec<Vec<Poly>> =
        subst.iter().zip(&degs).map(|(s, &d)| powers(&s.num, d)).collect();
    let den_pows: Vec<Vec<Poly>> =
        subst.iter().zip(&degs).map(|(s, &d)| powers(&s.den, d)).collect();
    let mut num = Poly::zero(field, out_nvars);
    for (m, c) in p.terms() {
        let mut t = Poly::constant(field, out_nvars, c.clone());
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                t = &t * &num_pows[i][e as usize];
            }
            if !subst[i].is_polynomial() && degs[i] > e {
                t = &t * &den_pows[i][(degs[i] - e) as usize];
            }
        }
        num = &num + &t;
    }
    let mut den = Poly::one(field, out_nvars);
    for (i, s) in subst.iter().enumerate() {
        if !s.is_polynomial() && degs[i] > 0 {
            den = &den * &den_pows[i][degs[i] as usize];
        }
    }
    RatFunc::normalized(num, den)
}

fn powers(p: &Poly, d: u32) -> Vec<Poly> {
    let mut out = Vec::with_capacity(d as usize + 1);
    out.push(Poly::one(p.field(), p.nvars()));
    for k in 1..=d as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use proptest::prelude::*;

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    fn x() -> RatFunc {
        RatFunc::var(Q, 2, 0)
    }

    fn y() -> RatFunc {
        RatFunc::var(Q, 2, 1)
    }

    #[test]
    fn compose_examples() {
        let p = Poly::var(Q, 2, 1);
        let out = p.compose(&[x(), x().add(&y())]);
        assert!(out.equals(&x().add(&y())));
        assert!(out.is_polynomial());

        let p = Poly::var(Q, 2, 0);
        let out = p.compose(&[x().pow(2), y()]);
        assert_eq!(out.as_poly().unwrap().to_string(), "x^2");

        let frac = y().div(&x()).unwrap();
        let out = p.compose(&[frac.clone(), x()]);
        assert!(out.equals(&frac));
        assert_eq!(out.to_string(), "y/x");
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let two = RatFunc::constant(Q, 2, q(2));
        let a = x().div(&y()).unwrap();
        let b = RatFunc::new(x().mul(&two).num().clone(), y().mul(&two).num().clone()).unwrap();
        assert!(ratfunc_equal(&a, &b));
        assert!(!ratfunc_equal(&a, &x().div(&x().add(&y())).unwrap()));
        let zero = RatFunc::new(
            Poly::zero(Q, 2),
            &x().pow(2).num().clone() + &Poly::one(Q, 2),
        )
        .unwrap();
        assert!(ratfunc_equal(&zero, &RatFunc::zero(Q, 2)));
    }

    #[test]
    fn normalization() {
        // (2x^2)/(4xy) -> x/(2y) with monic denominator y: (1/2 x)/y
        let num = x().pow(2).num().scale(&q(2));
        let den = x().mul(&y()).num().scale(&q(4));
        let f = RatFunc::new(num, den).unwrap();
        assert_eq!(f.den().to_string(), "y");
        assert_eq!(f.to_string(), "(1/2*x)/y");
        let f = RatFunc::new(Poly::one(Q, 2), x().mul(&y()).num().clone()).unwrap();
        assert_eq!(f.to_string(), "1/(x*y)");
        // (x^2 - y^2)/(x + y) -> x - y
        let num = &x().pow(2).num().clone() - &y().pow(2).num().clone();
        let f = RatFunc::new(num, x().add(&y()).num().clone()).unwrap();
        assert!(f.is_polynomial());
        assert!(RatFunc::new(Poly::one(Q, 2), Poly::zero(Q, 2)).is_err());
    }

    #[test]
    fn eval_at_pole() {
        let f = y().div(&x()).unwrap();
        assert_eq!(f.eval(&[q(2), q(3)]), Some(Q.from_ratio(&3.into(), &2.into()).unwrap()));
        assert_eq!(f.eval(&[q(0), q(3)]), None);
    }

    fn arb_small() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3), -3i64..4), 1..4).prop_map(|terms| {
            Poly::from_terms(
                Q,
                2,
                terms.into_iter().map(|((a, b), c)| (Monomial::new(vec![a, b]), q(c))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn compose_respects_evaluation(
            p in arb_small(), a in arb_small(), b in arb_small(), c in arb_small(),
            u in -3i64..4, v in -3i64..4,
        ) {
            prop_assume!(!b.is_zero());
            let s1 = RatFunc::new(a, b).unwrap();
            let s2 = RatFunc::from_poly(c);
            let pt = [q(u), q(v)];
            let Some(v1) = s1.eval(&pt) else { return Ok(()); };
            let v2 = s2.eval(&pt).unwrap();
            let composed = p.compose(&[s1, s2]);
            let direct = p.eval(&[v1, v2]);
            if let Some(val) = composed.eval(&pt) {
                prop_assert_eq!(val, direct);
            }
        }
    }
}
