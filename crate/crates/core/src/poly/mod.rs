//! Sparse multivariate polynomials over an exact field.
//!
//! Monomials are ordered by total degree first. Within a degree, a monomial
//! with a lexicographically larger exponent vector sorts *earlier*, so that
//! the degree-one monomials come out as `1, x, y, ...` in variable order.
//! This is a multiplicative well-order, so leading terms and exact
//! division behave as usual.

mod ratfunc;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactla::bareiss::FractionFree;
use crate::exactla::{Field, FieldElem};

pub use ratfunc::{ratfunc_equal, RatFunc};

/// Exponent vector of a monomial in `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Monomial {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    /// Componentwise minimum (the gcd of two monomials).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn eval(&self, pt: &[FieldElem]) -> FieldElem {
        let field = pt.first().map(FieldElem::field).expect("evaluation point has coordinates");
        self.0
            .iter()
            .zip(pt)
            .filter(|(e, _)| **e > 0)
            .fold(field.one(), |acc, (e, v)| &acc * &v.pow(*e))
    }

    fn fmt_with(&self, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", names[i])?;
            } else {
                write!(f, "{}^{}", names[i], e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree at most `d`, in increasing monomial order.
/// There are `C(nvars + d, d)` of them.
pub fn monomials_up_to(nvars: usize, d: u32) -> Vec<Monomial> {
    fn fill(prefix: &mut Vec<u32>, nvars: usize, budget: u32, out: &mut Vec<Monomial>) {
        if prefix.len() == nvars {
            out.push(Monomial(prefix.clone()));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            fill(prefix, nvars, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(nvars), nvars, d, &mut out);
    out.sort();
    out
}

/// Variable names used when none are supplied: `x, y, z` for up to three
/// variables, `t1, t2, ...` beyond that.
pub fn default_var_names(nvars: usize) -> Vec<String> {
    if nvars <= 3 {
        ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("t{i}")).collect()
    }
}

/// A polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    field: Field,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl Poly {
    pub fn zero(field: Field, nvars: usize) -> Poly {
        Poly { nvars, field, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, nvars: usize, c: FieldElem) -> Poly {
        Poly::monomial(nvars, Monomial::one(nvars), c).with_field(field)
    }

    pub fn one(field: Field, nvars: usize) -> Poly {
        Poly::constant(field, nvars, field.one())
    }

    pub fn var(field: Field, nvars: usize, i: usize) -> Poly {
        Poly::monomial(nvars, Monomial::var(nvars, i), field.one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: FieldElem) -> Poly {
        assert_eq!(m.nvars(), nvars);
        let field = c.field();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, field, terms }
    }

    fn with_field(mut self, field: Field) -> Poly {
        self.field = field;
        self
    }

    /// Builds a polynomial from a term list, combining repeated monomials.
    pub fn from_terms<I>(field: Field, nvars: usize, terms: I) -> Result<Poly>
    where
        I: IntoIterator<Item = (Monomial, FieldElem)>,
    {
        let mut p = Poly::zero(field, nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::Dimension(format!(
                    "monomial has {} exponents, expected {nvars}",
                    m.nvars()
                )));
            }
            if c.field() != field {
                return Err(Error::MixedFields(field, c.field()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Coefficient vector against `basis` -> polynomial.
    pub fn from_coeffs(field: Field, nvars: usize, basis: &[Monomial], coeffs: &[FieldElem]) -> Poly {
        let mut p = Poly::zero(field, nvars);
        for (m, c) in basis.iter().zip(coeffs) {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    /// Coefficients against an explicit monomial list; `None` if the
    /// polynomial has a term outside it.
    pub fn coeffs_in(&self, basis: &[Monomial]) -> Option<Vec<FieldElem>> {
        let out: Vec<FieldElem> = basis.iter().map(|m| self.coeff(m)).collect();
        let covered = self.terms.keys().all(|m| basis.contains(m));
        covered.then_some(out)
    }

    fn add_term(&mut self, m: Monomial, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Constant value if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<FieldElem> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Leading term with respect to the monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next_back()
    }

    /// The polynomial divided by its leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => {
                let inv = c.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.field, self.nvars);
        }
        Poly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &FieldElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.field, self.nvars);
        }
        Poly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact value at `pt`.
    pub fn eval(&self, pt: &[FieldElem]) -> FieldElem {
        assert_eq!(pt.len(), self.nvars, "point dimension mismatch");
        if self.nvars == 0 {
            return self.as_constant().expect("polynomial in zero variables is constant");
        }
        let mut powers: Vec<Vec<FieldElem>> = pt.iter().map(|v| vec![self.field.one(), v.clone()]).collect();
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[i];
                while pw.len() <= e as usize {
                    let next = pw.last().expect("nonempty") * &pt[i];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// `self / divisor` if the division is exact.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let lc_inv = lc.inv().expect("nonzero leading coefficient");
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.field, self.nvars);
        while let Some((m, c)) = rem.leading() {
            let t = m.div(lm)?;
            let tc = c * &lc_inv;
            rem = &rem - &divisor.mul_monomial(&t, &tc);
            quot.add_term(t, tc);
        }
        Some(quot)
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[var] -= 1;
            out.add_term(dm, c * &self.field.from_i64(e as i64));
        }
        out
    }

    /// Gcd of all monomials present (the largest monomial factor).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.nvars),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    /// Divides every term by the monomial `m`, which must divide all of them.
    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            nvars: self.nvars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.div(m).expect("monomial divides every term"), v.clone()))
                .collect(),
        }
    }

    /// Substitutes rational functions for the variables.
    pub fn compose(&self, subst: &[RatFunc]) -> RatFunc {
        ratfunc::compose_poly(self, subst)
    }

    /// Image in F_p; `None` if some coefficient has a denominator divisible by `p`.
    pub fn reduce_mod(&self, p: u64) -> Option<Poly> {
        let mut out = Poly::zero(Field::Prime(p), self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.reduce_mod(p)?);
        }
        Some(out)
    }

    /// Formats with the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Terms in reading order: highest degree first, and within a degree in
    /// variable order (`x^2, x*y, y^2`).
    pub fn reading_order(&self) -> Vec<(&Monomial, &FieldElem)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
        v
    }

    fn check_compatible(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials in different rings");
        assert_eq!(self.field, other.field, "polynomials over different fields");
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.reading_order();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                m.fmt_with(self.names, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.nvars);
        write!(f, "{}", self.display(&names))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_compatible(rhs);
        let mut out = Poly::zero(self.field, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl FractionFree for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
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
        Poly::div_exact(self, rhs).expect("inexact polynomial Bareiss division")
    }
    fn weight(&self) -> u64 {
        let deg = self.total_degree().unwrap_or(0) as u64;
        let bits: u64 = self.terms.values().map(FieldElem::bit_size).sum();
        (self.terms.len() as u64) << 32 | (deg << 16) | bits.min(0xffff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    fn xy() -> (Poly, Poly) {
        (Poly::var(Q, 2, 0), Poly::var(Q, 2, 1))
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_up_to(2, 1);
        let names = default_var_names(2);
        let shown: Vec<String> =
            ms.iter().map(|m| Poly::monomial(2, m.clone(), q(1)).display(&names).to_string()).collect();
        assert_eq!(shown, ["1", "x", "y"]);
        let ms = monomials_up_to(1, 5);
        assert_eq!(ms.len(), 6);
        assert!(ms.iter().enumerate().all(|(i, m)| m.exponents() == [i as u32]));
        assert_eq!(monomials_up_to(3, 0), vec![Monomial::one(3)]);
        let shown: Vec<String> = monomials_up_to(2, 2)
            .iter()
            .map(|m| Poly::monomial(2, m.clone(), q(1)).to_string())
            .collect();
        assert_eq!(shown, ["1", "x", "y", "x^2", "x*y", "y^2"]);
    }

    #[test]
    fn evaluation() {
        let (x, y) = xy();
        let p = &x - &Poly::constant(Q, 2, q(2));
        assert!(p.eval(&[q(2), q(0)]).is_zero());
        let p = &(&x * &x) + &y;
        assert_eq!(p.eval(&[q(2), q(3)]), q(7));
        assert!(Poly::zero(Q, 2).eval(&[q(5), q(-1)]).is_zero());
    }

    #[test]
    fn display_reading_order() {
        let (x, y) = xy();
        let p = &(&(&x * &y) - &y.scale(&q(2))) + &x.pow(2);
        assert_eq!(p.to_string(), "x^2 + x*y - 2*y");
        let half = Q.from_ratio(&(-1).into(), &2.into()).unwrap();
        assert_eq!((&x.scale(&half) + &Poly::one(Q, 2)).to_string(), "-1/2*x + 1");
        assert_eq!(Poly::zero(Q, 2).to_string(), "0");
    }

    #[test]
    fn exact_division() {
        let (x, y) = xy();
        let a = &x + &y;
        let b = &x - &y;
        let p = &a * &b;
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!((&p + &Poly::one(Q, 2)).div_exact(&a), None);
        assert_eq!(Poly::zero(Q, 2).div_exact(&a), Some(Poly::zero(Q, 2)));
    }

    #[test]
    fn leading_term_and_monic() {
        let (x, y) = xy();
        let p = &x.scale(&q(3)) + &y.pow(2).scale(&q(6));
        let (m, c) = p.leading().unwrap();
        assert_eq!(m.exponents(), &[0, 2]);
        assert_eq!(c, &q(6));
        assert_eq!(p.monic().to_string(), "y^2 + 1/2*x");
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3), -5i64..6), 0..5).prop_map(|terms| {
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
        fn distributive(p in arb_poly(), s in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&(&p + &s) * &r, &(&p * &r) + &(&s * &r));
        }

        #[test]
        fn evaluation_is_a_ring_homomorphism(p in arb_poly(), s in arb_poly(), a in -4i64..5, b in -4i64..5) {
            let pt = [q(a), q(b)];
            prop_assert_eq!((&p * &s).eval(&pt), &p.eval(&pt) * &s.eval(&pt));
            prop_assert_eq!((&p + &s).eval(&pt), &p.eval(&pt) + &s.eval(&pt));
        }

        #[test]
        fn degree_is_additive(p in arb_poly(), s in arb_poly()) {
            prop_assume!(!p.is_zero() && !s.is_zero());
            prop_assert_eq!((&p * &s).total_degree(), Some(p.total_degree().unwrap() + s.total_degree().unwrap()));
        }

        #[test]
        fn product_divides_back(p in arb_poly(), s in arb_poly()) {
            prop_assume!(!s.is_zero());
            prop_assert_eq!((&p * &s).div_exact(&s), Some(p));
        }

        #[test]
        fn enumeration_is_sorted_with_binomial_length(n in 1usize..4, d in 0u32..5) {
            let ms = monomials_up_to(n, d);
            prop_assert!(ms.windows(2).all(|w| w[0] < w[1]));
            let binom = (1..=n as u64).fold(1u64, |acc, k| acc * (d as u64 + k) / k);
            prop_assert_eq!(ms.len() as u64, binom);
        }
    }
}
