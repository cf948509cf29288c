//! Interchangeable ways of computing the generic rank of the symbolic
//! orbit matrix, registered by name and chosen at run time.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::GenericMatrix;
use crate::dynsys::random_point;
use crate::error::{Error, Result};
use crate::exactla::{bareiss, rref, Matrix};

/// How a rank was finally obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    Exact,
    Specialized,
}

impl fmt::Display for RankMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankMethod::Exact => write!(f, "exact"),
            RankMethod::Specialized => write!(f, "specialized"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOutcome {
    pub r: usize,
    /// Row indices (into the generic matrix) of a nonsingular `r x r` minor.
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    pub method: RankMethod,
    /// Specialized points tried before two agreeing ranks were found.
    pub attempts: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RankContext {
    pub seed: u64,
}

pub trait RankStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn rank(&self, gm: &GenericMatrix, ctx: &RankContext) -> Result<RankOutcome>;
}

/// Fraction-free elimination over the polynomial ring after clearing the
/// denominators of each row.
#[derive(Debug, Default)]
pub struct ExactRank;

impl RankStrategy for ExactRank {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn rank(&self, gm: &GenericMatrix, _ctx: &RankContext) -> Result<RankOutcome> {
        let rows = gm.cleared_rows();
        let fwd = bareiss::forward(rows, gm.monomials.len());
        let mut pivot_rows = fwd.pivot_rows.clone();
        let mut pivot_cols = fwd.pivot_cols.clone();
        pivot_rows.sort_unstable();
        pivot_cols.sort_unstable();
        Ok(RankOutcome { r: fwd.rank, pivot_rows, pivot_cols, method: RankMethod::Exact, attempts: 0 })
    }
}

/// Rank of the matrix evaluated at a random point, confirmed at a second
/// independent point. Specialization can only lower the rank, and a
/// nonzero minor at one point witnesses a nonzero minor generically.
#[derive(Debug)]
pub struct SpecializedRank {
    /// Draws per random point before giving up on avoiding denominators.
    pub max_draws: usize,
    /// Pairs of points tried before falling back to exact elimination.
    pub max_pairs: usize,
}

impl Default for SpecializedRank {
    fn default() -> Self {
        SpecializedRank { max_draws: 64, max_pairs: 4 }
    }
}

impl SpecializedRank {
    fn specialize(&self, gm: &GenericMatrix, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        for _ in 0..self.max_draws {
            let pt = random_point(gm.field, gm.nvars, rng);
            if let Some(m) = gm.eval_at(&pt) {
                return Ok(m);
            }
        }
        Err(Error::SpecializationExhausted { attempts: self.max_draws })
    }
}

impl RankStrategy for SpecializedRank {
    fn name(&self) -> &'static str {
        "specialized"
    }

    fn rank(&self, gm: &GenericMatrix, ctx: &RankContext) -> Result<RankOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        for pair in 0..self.max_pairs {
            let a = self.specialize(gm, &mut rng)?;
            let b = self.specialize(gm, &mut rng)?;
            let ra = rref(&a);
            if ra.rank != rref(&b).rank {
                continue;
            }
            let mut pivot_rows = rref(&a.transpose()).pivot_cols;
            pivot_rows.sort_unstable();
            return Ok(RankOutcome {
                r: ra.rank,
                pivot_rows,
                pivot_cols: ra.pivot_cols,
                method: RankMethod::Specialized,
                attempts: 2 * (pair + 1),
            });
        }
        let mut out = ExactRank.rank(gm, ctx)?;
        out.attempts = 2 * self.max_pairs;
        Ok(out)
    }
}

/// Name -> strategy table.
#[derive(Clone)]
pub struct StrategyRegistry {
    strategies: BTreeMap<&'static str, Arc<dyn RankStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry { strategies: BTreeMap::new() }
    }

    /// `exact` and `specialized`.
    pub fn with_defaults() -> Self {
        let mut reg = StrategyRegistry::empty();
        reg.register(Arc::new(ExactRank));
        reg.register(Arc::new(SpecializedRank::default()));
        reg
    }

    pub fn register(&mut self, s: Arc<dyn RankStrategy>) {
        self.strategies.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn RankStrategy>> {
        self.strategies.get(name).cloned().ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.strategies.keys().copied()
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        StrategyRegistry::with_defaults()
    }
}
