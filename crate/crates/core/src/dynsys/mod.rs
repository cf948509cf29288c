//! Rational self-maps of affine space and the semigroups they generate.
//!
//! Words are read left to right: the word `[i_1, ..., i_k]` sends a point
//! `x` to `g_{i_k}(... g_{i_1}(x) ...)`.

mod orbit;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::{rank, Field, FieldElem, Matrix};
use crate::poly::RatFunc;
use crate::Point;

pub use orbit::{orbit_sample, OrbitExplorer, OrbitSample};

/// A rational map `A^n --> A^n` given by its coordinate functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfMap {
    nvars: usize,
    field: Field,
    components: Vec<RatFunc>,
}

impl SelfMap {
    pub fn new(components: Vec<RatFunc>) -> Result<SelfMap> {
        let nvars = components.len();
        let field = components.first().map(RatFunc::field).ok_or_else(|| {
            Error::Dimension("a self-map needs at least one component".into())
        })?;
        for c in &components {
            if c.nvars() != nvars {
                return Err(Error::Dimension(format!(
                    "component in {} variables for a map of A^{nvars}",
                    c.nvars()
                )));
            }
            if c.field() != field {
                return Err(Error::MixedFields(field, c.field()));
            }
        }
        Ok(SelfMap { nvars, field, components })
    }

    pub fn identity(field: Field, nvars: usize) -> SelfMap {
        SelfMap { nvars, field, components: (0..nvars).map(|i| RatFunc::var(field, nvars, i)).collect() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn components(&self) -> &[RatFunc] {
        &self.components
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(RatFunc::is_polynomial)
    }

    /// Image of `pt`, or `None` when `pt` lies on the indeterminacy locus.
    pub fn apply(&self, pt: &[FieldElem]) -> Option<Point> {
        self.components.iter().map(|c| c.eval(pt)).collect()
    }

    /// `x -> next(self(x))`.
    pub fn then(&self, next: &SelfMap) -> Result<SelfMap> {
        let components = next
            .components
            .iter()
            .map(|c| c.compose(&self.components))
            .collect::<Result<Vec<_>>>()?;
        Ok(SelfMap { nvars: self.nvars, field: self.field, components })
    }

    pub fn reduce_mod(&self, p: u64) -> Option<SelfMap> {
        let components = self.components.iter().map(|c| c.reduce_mod(p)).collect::<Option<Vec<_>>>()?;
        Some(SelfMap { nvars: self.nvars, field: Field::Prime(p), components })
    }

    /// Rank of the Jacobian matrix at a random point. A dominant map has
    /// full rank `nvars` at a general point, so a smaller value (with high
    /// probability) means the map is not dominant.
    pub fn jacobian_rank_at_random<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        for _ in 0..32 {
            let pt = random_point(self.field, self.nvars, rng);
            let mut rows = Vec::with_capacity(self.nvars);
            let mut ok = true;
            'outer: for c in &self.components {
                let mut row = Vec::with_capacity(self.nvars);
                let den_val = c.den().eval(&pt);
                let Some(den_inv) = den_val.inv() else {
                    ok = false;
                    break 'outer;
                };
                let num_val = c.num().eval(&pt);
                for v in 0..self.nvars {
                    // (n' d - n d') / d^2
                    let dn = c.num().derivative(v).eval(&pt);
                    let dd = c.den().derivative(v).eval(&pt);
                    let top = &(&dn * &den_val) - &(&num_val * &dd);
                    row.push(&top * &(&den_inv * &den_inv));
                }
                rows.push(row);
            }
            if ok {
                let m = Matrix::from_rows(self.field, self.nvars, rows).expect("square jacobian");
                return Some(rank(&m));
            }
        }
        None
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> SelfMapDisplay<'a> {
        SelfMapDisplay { map: self, names }
    }
}

pub struct SelfMapDisplay<'a> {
    map: &'a SelfMap,
    names: &'a [String],
}

impl fmt::Display for SelfMapDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.map.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.display(self.names))?;
        }
        write!(f, ")")
    }
}

/// A random point with small rational (or uniform prime-field) coordinates.
/// Rational coordinates have numerator and denominator bounded by 1000.
pub fn random_point<R: Rng>(field: Field, nvars: usize, rng: &mut R) -> Point {
    (0..nvars).map(|_| random_elem(field, rng)).collect()
}

pub fn random_elem<R: Rng>(field: Field, rng: &mut R) -> FieldElem {
    match field {
        Field::Rational => {
            let n: i64 = rng.gen_range(-1000..=1000);
            let d: i64 = rng.gen_range(1..=1000);
            field.from_ratio(&n.into(), &d.into()).expect("positive denominator")
        }
        Field::Prime(p) => FieldElem::Prime { value: rng.gen_range(0..p), modulus: p },
    }
}

/// A product of generators, listed in application order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn extended(&self, i: usize) -> Word {
        let mut v = self.0.clone();
        v.push(i);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("g{i}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Generators of a semigroup (or monoid) of self-maps, with a shared
/// cache of materialized word maps.
pub struct SemigroupSpec {
    generators: Vec<SelfMap>,
    monoid: bool,
    nvars: usize,
    field: Field,
    memo: RwLock<HashMap<Word, Arc<SelfMap>>>,
}

impl fmt::Debug for SemigroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupSpec")
            .field("generators", &self.generators)
            .field("monoid", &self.monoid)
            .finish()
    }
}

impl Clone for SemigroupSpec {
    fn clone(&self) -> Self {
        SemigroupSpec {
            generators: self.generators.clone(),
            monoid: self.monoid,
            nvars: self.nvars,
            field: self.field,
            memo: RwLock::new(self.memo.read().clone()),
        }
    }
}

impl SemigroupSpec {
    pub fn new(generators: Vec<SelfMap>, monoid: bool) -> Result<SemigroupSpec> {
        let first = generators.first().ok_or(Error::NoGenerators)?;
        let (nvars, field) = (first.nvars, first.field);
        for g in &generators {
            if g.nvars != nvars {
                return Err(Error::Dimension(format!(
                    "generators act on A^{} and A^{nvars}",
                    g.nvars
                )));
            }
            if g.field != field {
                return Err(Error::MixedFields(field, g.field));
            }
        }
        Ok(SemigroupSpec { generators, monoid, nvars, field, memo: RwLock::new(HashMap::new()) })
    }

    pub fn generators(&self) -> &[SelfMap] {
        &self.generators
    }

    pub fn is_monoid(&self) -> bool {
        self.monoid
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_polynomial(&self) -> bool {
        self.generators.iter().all(SelfMap::is_polynomial)
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.is_empty() && !self.monoid {
            return Err(Error::EmptyWordInSemigroup);
        }
        if let Some(&i) = w.0.iter().find(|&&i| i >= self.generators.len()) {
            return Err(Error::BadIndex(format!(
                "generator index {i} (only {} generators)",
                self.generators.len()
            )));
        }
        Ok(())
    }

    /// The composite map of a word, memoized per spec.
    pub fn word_map(&self, w: &Word) -> Result<Arc<SelfMap>> {
        self.check_word(w)?;
        self.word_map_unchecked(w)
    }

    fn word_map_unchecked(&self, w: &Word) -> Result<Arc<SelfMap>> {
        if w.is_empty() {
            return Ok(Arc::new(SelfMap::identity(self.field, self.nvars)));
        }
        if let Some(m) = self.memo.read().get(w) {
            return Ok(Arc::clone(m));
        }
        let (&last, prefix) = w.0.split_last().expect("nonempty word");
        let g = &self.generators[last];
        let map = if prefix.is_empty() {
            Arc::new(g.clone())
        } else {
            let head = self.word_map_unchecked(&Word(prefix.to_vec()))?;
            Arc::new(head.then(g)?)
        };
        let mut memo = self.memo.write();
        Ok(Arc::clone(memo.entry(w.clone()).or_insert(map)))
    }

    /// Image of `pt` under `w`, evaluated generator by generator. `None`
    /// if some intermediate point hits an indeterminacy locus.
    pub fn apply_word(&self, w: &Word, pt: &[FieldElem]) -> Option<Point> {
        let mut cur = pt.to_vec();
        for &i in &w.0 {
            cur = self.generators[i].apply(&cur)?;
        }
        Some(cur)
    }

    pub fn reduce_mod(&self, p: u64) -> Option<SemigroupSpec> {
        let generators = self.generators.iter().map(|g| g.reduce_mod(p)).collect::<Option<Vec<_>>>()?;
        SemigroupSpec::new(generators, self.monoid).ok()
    }
}

/// Distinct word maps of all words of length at most `max_len` (the empty
/// word included only for monoids), in breadth-first order. Words whose
/// map coincides with an earlier one are dropped, and so are their
/// extensions, which would repeat earlier maps as well.
pub fn symbolic_iterates(spec: &SemigroupSpec, max_len: usize) -> Result<Vec<(Word, Arc<SelfMap>)>> {
    let mut found: Vec<(Word, Arc<SelfMap>)> = Vec::new();
    let mut frontier = vec![Word::empty()];
    if spec.monoid {
        found.push((Word::empty(), spec.word_map(&Word::empty())?));
    }
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..spec.generators.len() {
                let ext = w.extended(i);
                let map = spec.word_map_unchecked(&ext)?;
                if found.iter().any(|(_, m)| **m == *map) {
                    continue;
                }
                found.push((ext.clone(), map));
                next.push(ext);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    fn var(n: usize, i: usize) -> RatFunc {
        RatFunc::var(Q, n, i)
    }

    fn additive(monoid: bool) -> SemigroupSpec {
        let g = SelfMap::new(vec![var(2, 0), var(2, 0).add(&var(2, 1))]).unwrap();
        SemigroupSpec::new(vec![g], monoid).unwrap()
    }

    fn scale1(c: i64) -> SelfMap {
        SelfMap::new(vec![var(1, 0).mul(&RatFunc::constant(Q, 1, q(c)))]).unwrap()
    }

    fn squaring(monoid: bool) -> SemigroupSpec {
        SemigroupSpec::new(vec![SelfMap::new(vec![var(1, 0).pow(2)]).unwrap()], monoid).unwrap()
    }

    #[test]
    fn word_map_examples() {
        let sq = squaring(false);
        let m = sq.word_map(&Word(vec![0, 0])).unwrap();
        assert_eq!(m.components()[0].to_string(), "x^4");

        let add = additive(true);
        let m = add.word_map(&Word(vec![0, 0])).unwrap();
        assert_eq!(m.components()[1].to_string(), "2*x + y");
        assert_eq!(*add.word_map(&Word::empty()).unwrap(), SelfMap::identity(Q, 2));
        assert_eq!(additive(false).word_map(&Word::empty()).unwrap_err(), Error::EmptyWordInSemigroup);
        assert!(add.word_map(&Word(vec![1])).is_err());
    }

    #[test]
    fn iterates_examples() {
        let its = symbolic_iterates(&additive(true), 2).unwrap();
        let shown: Vec<String> = its.iter().map(|(_, m)| m.components()[1].to_string()).collect();
        assert_eq!(shown, ["y", "x + y", "2*x + y"]);

        let its = symbolic_iterates(&squaring(false), 3).unwrap();
        let shown: Vec<String> = its.iter().map(|(_, m)| m.components()[0].to_string()).collect();
        assert_eq!(shown, ["x^2", "x^4", "x^8"]);

        let two_three = SemigroupSpec::new(vec![scale1(2), scale1(3)], false).unwrap();
        let its = symbolic_iterates(&two_three, 2).unwrap();
        let shown: Vec<String> = its.iter().map(|(_, m)| m.components()[0].to_string()).collect();
        assert_eq!(shown, ["2*x", "3*x", "4*x", "6*x", "9*x"]);
        assert_eq!(its[3].0, Word(vec![0, 1]));
    }

    #[test]
    fn jacobian_lint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let add = additive(false);
        let g = &add.generators()[0];
        assert_eq!(g.jacobian_rank_at_random(&mut rng), Some(2));
        let collapse = SelfMap::new(vec![var(2, 0), var(2, 0)]).unwrap();
        assert_eq!(collapse.jacobian_rank_at_random(&mut rng), Some(1));
        let frac = SelfMap::new(vec![var(2, 0), var(2, 1).div(&var(2, 0)).unwrap()]).unwrap();
        assert_eq!(frac.jacobian_rank_at_random(&mut rng), Some(2));
    }

    fn mixed_spec() -> SemigroupSpec {
        // (x, x + y), (y, x) and (2x, y/x + 1)
        let n = 2;
        let one = RatFunc::constant(Q, n, q(1));
        let g0 = SelfMap::new(vec![var(n, 0), var(n, 0).add(&var(n, 1))]).unwrap();
        let g1 = SelfMap::new(vec![var(n, 1), var(n, 0)]).unwrap();
        let g2 = SelfMap::new(vec![
            var(n, 0).mul(&RatFunc::constant(Q, n, q(2))),
            var(n, 1).div(&var(n, 0)).unwrap().add(&one),
        ])
        .unwrap();
        SemigroupSpec::new(vec![g0, g1, g2], true).unwrap()
    }

    proptest! {
        #[test]
        fn word_concatenation_is_composition(
            a in prop::collection::vec(0usize..3, 1..3),
            b in prop::collection::vec(0usize..3, 1..3),
        ) {
            let spec = mixed_spec();
            let (wa, wb) = (Word(a), Word(b));
            let joined = spec.word_map(&wa.concat(&wb)).unwrap();
            let composed = spec.word_map(&wa).unwrap().then(&spec.word_map(&wb).unwrap()).unwrap();
            prop_assert_eq!(&*joined, &composed);
        }

        #[test]
        fn word_map_agrees_with_stepwise_evaluation(
            w in prop::collection::vec(0usize..3, 1..4), a in 1i64..9, b in -5i64..6,
        ) {
            let spec = mixed_spec();
            let w = Word(w);
            let pt = vec![q(a), q(b)];
            let stepwise = spec.apply_word(&w, &pt);
            let direct = spec.word_map(&w).unwrap().apply(&pt);
            if let (Some(s), Some(d)) = (stepwise, direct) {
                prop_assert_eq!(s, d);
            }
        }
    }

    #[test]
    fn polynomial_flags() {
        assert!(additive(true).is_polynomial());
        assert!(!mixed_spec().is_polynomial());
    }
}
