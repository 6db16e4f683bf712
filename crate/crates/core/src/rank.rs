//! Rank of polynomial matrices and the constant-rank verdict.
//!
//! Sampled exact ranks give the lower side; identically vanishing
//! `(r+1)`-minors give the upper side. Only the upper side is ever proved.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kkt::selection_matrix;
use crate::linalg::QMatrix;
use crate::poly::{PolyMatrix, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RankTier {
    Certified,
    Probable,
    NotConstant,
}

impl RankTier {
    pub fn label(self) -> &'static str {
        match self {
            RankTier::Certified => "CERTIFIED",
            RankTier::Probable => "PROBABLE",
            RankTier::NotConstant => "NOT_CONSTANT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankVerdict {
    /// Rank at the first probe point.
    pub rank: usize,
    pub tier: RankTier,
    pub witness_points: Vec<Vec<Rational>>,
    pub violating_pair: Option<(Vec<Rational>, Vec<Rational>)>,
    /// Number of `(rank+1)`-minors expanded symbolically.
    pub minors_checked: usize,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RankConfig {
    pub num_samples: usize,
    pub coord_bound: i64,
    pub seed: u64,
    pub minor_budget: usize,
    /// Points probed before the random ones.
    pub anchors: Vec<Vec<Rational>>,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig { num_samples: 64, coord_bound: 100, seed: 42, minor_budget: 5000, anchors: Vec::new() }
    }
}

const DENOMINATORS: [i64; 5] = [1, 2, 3, 5, 7];

/// A rational point with numerators in `[-bound, bound]` and denominators in `{1,2,3,5,7}`.
pub fn random_point(rng: &mut ChaCha8Rng, nvars: usize, bound: i64) -> Vec<Rational> {
    (0..nvars)
        .map(|_| {
            let num: i64 = rng.random_range(-bound..=bound);
            let den = DENOMINATORS[rng.random_range(0..DENOMINATORS.len())];
            Rational::new(num.into(), den.into())
        })
        .collect()
}

pub fn rank_at(m: &PolyMatrix, point: &[Rational]) -> Result<usize> {
    Ok(m.eval(point)?.rank())
}

/// Lexicographic `k`-subsets of `0..n`, at most `limit` of them.
fn subsets(n: usize, k: usize, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if out.len() >= limit {
            return out;
        }
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Sample exact ranks, then try to certify the upper side symbolically.
pub fn probe_constant_rank(m: &PolyMatrix, cfg: &RankConfig) -> Result<RankVerdict> {
    let nv = m.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points: Vec<Vec<Rational>> = Vec::with_capacity(cfg.anchors.len() + cfg.num_samples);
    for a in &cfg.anchors {
        if a.len() != nv {
            return Err(Error::DimensionMismatch { expected: nv, got: a.len() });
        }
        points.push(a.clone());
    }
    points.extend((0..cfg.num_samples).map(|_| random_point(&mut rng, nv, cfg.coord_bound)));
    if points.is_empty() {
        points.push(vec![Rational::zero(); nv]);
    }
    let ranks: Vec<usize> = points.par_iter().map(|p| rank_at(m, p)).collect::<Result<_>>()?;

    let r0 = ranks[0];
    if let Some(j) = ranks.iter().position(|&r| r != r0) {
        return Ok(RankVerdict {
            rank: r0,
            tier: RankTier::NotConstant,
            violating_pair: Some((points[0].clone(), points[j].clone())),
            witness_points: points,
            minors_checked: 0,
            note: Some(format!("rank {} and rank {} at two probe points", r0, ranks[j])),
        });
    }

    let k = r0 + 1;
    let rows = m.rows();
    let cols = m.cols();
    if k > rows.min(cols) {
        return Ok(RankVerdict {
            rank: r0,
            tier: RankTier::Certified,
            witness_points: points,
            violating_pair: None,
            minors_checked: 0,
            note: Some("full rank; no larger minors exist".into()),
        });
    }
    let count = binomial(rows, k) * binomial(cols, k);
    if count > cfg.minor_budget as u128 {
        return Ok(RankVerdict {
            rank: r0,
            tier: RankTier::Probable,
            witness_points: points,
            violating_pair: None,
            minors_checked: 0,
            note: Some(format!("{count} minors of size {k} exceed the budget {}", cfg.minor_budget)),
        });
    }
    let rsets = subsets(rows, k, usize::MAX);
    let csets = subsets(cols, k, usize::MAX);
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> =
        rsets.iter().flat_map(|r| csets.iter().map(move |c| (r, c))).collect();
    let nonzero = pairs.par_iter().find_map_first(|(r, c)| {
        let p = m.minor(r, c);
        (!p.is_zero()).then(|| (r.to_vec(), c.to_vec(), p))
    });
    let Some((r, c, minor)) = nonzero else {
        return Ok(RankVerdict {
            rank: r0,
            tier: RankTier::Certified,
            witness_points: points,
            violating_pair: None,
            minors_checked: pairs.len(),
            note: None,
        });
    };
    // the minor is a nonzero polynomial, so a generic point exposes the larger rank
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    for _ in 0..64 {
        let q = random_point(&mut rng, nv, cfg.coord_bound.max(1));
        if !minor.eval(&q)?.is_zero() {
            return Ok(RankVerdict {
                rank: r0,
                tier: RankTier::NotConstant,
                violating_pair: Some((points[0].clone(), q)),
                witness_points: points,
                minors_checked: pairs.len(),
                note: Some(format!("minor rows {r:?} cols {c:?} is not identically zero")),
            });
        }
    }
    Ok(RankVerdict {
        rank: r0,
        tier: RankTier::Probable,
        witness_points: points,
        violating_pair: None,
        minors_checked: pairs.len(),
        note: Some(format!("minor rows {r:?} cols {c:?} is not identically zero but vanished at every probe")),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchurOutcome {
    /// Full rank `n+|α|` at every probe point.
    Pass,
    /// `det DF(x) = 0`.
    Fail(Vec<Rational>),
    /// `det DF(x) ≠ 0` but `C_αᵀ DF(x)⁻¹ C_α` is singular.
    SingularComplement(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurPoint {
    pub det_a: Rational,
    pub det_block: Rational,
    pub det_complement: Rational,
}

/// The identity `det [[A, C],[Cᵀ, 0]] = det A · det(−Cᵀ A⁻¹ C)` at one matrix.
///
/// `None` when `A` is singular.
pub fn schur_identity(a: &QMatrix, alpha: &[usize]) -> Result<Option<SchurPoint>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.cols() });
    }
    let c = selection_matrix(n, alpha)?;
    let Some(inv) = a.inverse() else {
        return Ok(None);
    };
    let k = alpha.len();
    let mut block = QMatrix::zeros(n + k, n + k);
    for i in 0..n {
        for j in 0..n {
            block.set(i, j, a.get(i, j).clone());
        }
        for j in 0..k {
            block.set(i, n + j, c.get(i, j).clone());
            block.set(n + j, i, c.get(i, j).clone());
        }
    }
    let comp = c.transpose().matmul(&inv).matmul(&c).scale(&-Rational::one());
    Ok(Some(SchurPoint { det_a: a.det(), det_block: block.det(), det_complement: comp.det() }))
}

/// Full-rank check of the complementarity KKT Jacobian through the Schur route.
pub fn schur_finiteness_check(df: &PolyMatrix, alpha: &[usize], probes: &[Vec<Rational>]) -> Result<SchurOutcome> {
    if df.rows() != df.cols() {
        return Err(Error::DimensionMismatch { expected: df.rows(), got: df.cols() });
    }
    for p in probes {
        let a = df.eval(p)?;
        let Some(s) = schur_identity(&a, alpha)? else {
            return Ok(SchurOutcome::Fail(p.clone()));
        };
        if s.det_block != &s.det_a * &s.det_complement {
            return Err(Error::Internal(format!("Schur identity fails at {p:?}")));
        }
        if s.det_complement.is_zero() {
            return Ok(SchurOutcome::SingularComplement(p.clone()));
        }
    }
    Ok(SchurOutcome::Pass)
}
