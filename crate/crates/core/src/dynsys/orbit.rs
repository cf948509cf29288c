use std::collections::HashSet;

use serde::Serialize;

use super::{SemigroupSpec, Word};
use crate::Point;

/// A finite piece of the orbit of `base`: distinct image points with one
/// word reaching each, plus the words that hit an indeterminacy locus.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitSample {
    pub base: Point,
    pub entries: Vec<(Word, Point)>,
    pub skipped: Vec<Word>,
    /// Word length explored.
    pub depth: usize,
    /// No new points can appear at any greater length.
    pub exhausted: bool,
    /// Exploration stopped at the point cap.
    pub capped: bool,
}

impl OrbitSample {
    pub fn points(&self) -> Vec<Point> {
        self.entries.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Breadth-first orbit exploration that can be extended one word length
/// at a time.
///
/// Only points seen for the first time are expanded: a point reached again
/// by a longer word has all its images already reachable within the same
/// length budget.
pub struct OrbitExplorer<'a> {
    spec: &'a SemigroupSpec,
    cap: usize,
    seen: HashSet<Point>,
    frontier: Vec<(Word, Point)>,
    sample: OrbitSample,
}

impl<'a> OrbitExplorer<'a> {
    pub fn new(spec: &'a SemigroupSpec, base: &[crate::FieldElem], cap: usize) -> OrbitExplorer<'a> {
        assert_eq!(base.len(), spec.nvars(), "base point dimension mismatch");
        let base = base.to_vec();
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        if spec.is_monoid() {
            seen.insert(base.clone());
            entries.push((Word::empty(), base.clone()));
        }
        OrbitExplorer {
            spec,
            cap: cap.max(1),
            seen,
            frontier: vec![(Word::empty(), base.clone())],
            sample: OrbitSample {
                base,
                entries,
                skipped: Vec::new(),
                depth: 0,
                exhausted: false,
                capped: false,
            },
        }
    }

    /// Explores words one letter longer. Returns the number of new points.
    pub fn advance(&mut self) -> usize {
        if self.sample.exhausted || self.sample.capped {
            return 0;
        }
        let before = self.sample.entries.len();
        let mut next = Vec::new();
        'outer: for (w, p) in &self.frontier {
            for (i, g) in self.spec.generators().iter().enumerate() {
                let word = w.extended(i);
                match g.apply(p) {
                    None => self.sample.skipped.push(word),
                    Some(img) => {
                        if self.seen.insert(img.clone()) {
                            self.sample.entries.push((word.clone(), img.clone()));
                            next.push((word, img));
                            if self.sample.entries.len() >= self.cap {
                                self.sample.capped = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        self.sample.depth += 1;
        self.sample.exhausted = next.is_empty() && !self.sample.capped;
        self.frontier = next;
        self.sample.entries.len() - before
    }

    pub fn sample(&self) -> &OrbitSample {
        &self.sample
    }

    pub fn into_sample(self) -> OrbitSample {
        self.sample
    }
}

/// Orbit sample over all words of length at most `max_len`, stopping early
/// once `cap` distinct points are found.
pub fn orbit_sample(spec: &SemigroupSpec, base: &[crate::FieldElem], max_len: usize, cap: usize) -> OrbitSample {
    let mut ex = OrbitExplorer::new(spec, base, cap);
    for _ in 0..max_len {
        ex.advance();
        if ex.sample.exhausted || ex.sample.capped {
            break;
        }
    }
    ex.into_sample()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::SelfMap;
    use crate::exactla::{Field, FieldElem};
    use crate::poly::RatFunc;
    use proptest::prelude::*;

    const Q: Field = Field::Rational;

    fn q(n: i64) -> FieldElem {
        Q.from_i64(n)
    }

    fn var(n: usize, i: usize) -> RatFunc {
        RatFunc::var(Q, n, i)
    }

    fn spec(components: Vec<RatFunc>, monoid: bool) -> SemigroupSpec {
        SemigroupSpec::new(vec![SelfMap::new(components).unwrap()], monoid).unwrap()
    }

    fn point_set(s: &OrbitSample) -> HashSet<Point> {
        s.points().into_iter().collect()
    }

    #[test]
    fn additive_orbit() {
        let s = spec(vec![var(2, 0), var(2, 0).add(&var(2, 1))], true);
        let o = orbit_sample(&s, &[q(2), q(0)], 2, 10_000);
        let expect: HashSet<Point> =
            [[2, 0], [2, 2], [2, 4]].iter().map(|p| vec![q(p[0]), q(p[1])]).collect();
        assert_eq!(point_set(&o), expect);
        assert!(o.skipped.is_empty());
    }

    #[test]
    fn fixed_point_of_squaring() {
        let s = spec(vec![var(1, 0).pow(2)], false);
        let o = orbit_sample(&s, &[q(1)], 5, 10_000);
        assert_eq!(o.points(), vec![vec![q(1)]]);
        assert!(o.exhausted);
    }

    #[test]
    fn indeterminate_base_is_skipped() {
        let s = spec(vec![var(2, 0), var(2, 1).div(&var(2, 0)).unwrap()], false);
        let o = orbit_sample(&s, &[q(0), q(1)], 3, 10_000);
        assert!(o.entries.is_empty());
        assert_eq!(o.skipped, vec![Word(vec![0])]);
    }

    #[test]
    fn cap_stops_exploration() {
        let s = spec(vec![var(1, 0).add(&RatFunc::constant(Q, 1, q(1)))], true);
        let o = orbit_sample(&s, &[q(0)], 100, 5);
        assert_eq!(o.len(), 5);
        assert!(o.capped);
    }

    proptest! {
        #[test]
        fn samples_are_exact_and_nested(a in -6i64..7, b in -6i64..7, len in 0usize..5) {
            let n = 2;
            let g0 = SelfMap::new(vec![var(n, 1), var(n, 0).add(&var(n, 1))]).unwrap();
            let g1 = SelfMap::new(vec![
                var(n, 0),
                var(n, 1).div(&var(n, 0).add(&RatFunc::constant(Q, n, q(1)))).unwrap(),
            ]).unwrap();
            let s = SemigroupSpec::new(vec![g0, g1], true).unwrap();
            let base = vec![q(a), q(b)];
            let small = orbit_sample(&s, &base, len, 10_000);
            let big = orbit_sample(&s, &base, len + 1, 10_000);
            for (w, p) in &small.entries {
                let img = s.apply_word(w, &base);
                prop_assert_eq!(img.as_ref(), Some(p));
            }
            prop_assert!(point_set(&small).is_subset(&point_set(&big)));
            let distinct: HashSet<_> = small.points().into_iter().collect();
            prop_assert_eq!(distinct.len(), small.len());
        }

        #[test]
        fn polynomial_generators_never_skip(a in -6i64..7, b in -6i64..7) {
            let s = spec(vec![var(2, 1).pow(2), var(2, 0).add(&var(2, 1))], false);
            let o = orbit_sample(&s, &[q(a), q(b)], 4, 10_000);
            prop_assert!(o.skipped.is_empty());
        }
    }
}
