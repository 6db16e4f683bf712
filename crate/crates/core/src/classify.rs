//! Dimension classes of box-constrained problems `PVI([0,δ]ⁿ, A·X)`.
//!
//! `X` is the monomial vector of degree `d`, so `A ∈ ℝ^{n×ρ(n,d)}` determines
//! `F`. A record is assigned to class `k` when the bound and the oracle
//! estimate agree on `k`; otherwise it is kept as unresolved.

use std::collections::BTreeMap;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bound::{dimension_bound, BoundConfig, Certification};
use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::model::{ConstraintSet, ProblemSpec};
use crate::oracle::{estimate_dimension, sample_problem, Confidence, OracleConfig};
use crate::poly::{int, monomial_vector, rho, Monomial, Polynomial, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientMatrix {
    pub n: usize,
    pub d: usize,
    /// `n` rows of `ρ(n,d)` coefficients in monomial-vector order.
    pub entries: Vec<Vec<Rational>>,
    /// Entries drawn as floats and rounded.
    pub float_sampled: bool,
}

impl CoefficientMatrix {
    pub fn new(n: usize, d: usize, entries: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rho(n, d)?;
        if entries.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: entries.len() });
        }
        if let Some(r) = entries.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
        }
        Ok(CoefficientMatrix { n, d, entries, float_sampled: false })
    }

    pub fn zero(n: usize, d: usize) -> Result<Self> {
        let cols = rho(n, d)?;
        Self::new(n, d, vec![vec![Rational::zero(); cols]; n])
    }

    /// Coefficients of a polynomial map of degree at most `d`.
    pub fn from_field(field: &[Polynomial], d: usize) -> Result<Self> {
        let n = field.len();
        let basis = monomial_vector(n, d);
        let mut entries = Vec::with_capacity(n);
        for f in field {
            if f.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.nvars() });
            }
            if f.terms().any(|(m, _)| m.degree() as usize > d) {
                return Err(Error::InvalidInput(format!("component {f} exceeds degree {d}")));
            }
            entries.push(basis.iter().map(|m| f.coefficient(m)).collect());
        }
        Self::new(n, d, entries)
    }

    /// `F = A·X`.
    pub fn field(&self) -> Vec<Polynomial> {
        let basis = monomial_vector(self.n, self.d);
        self.entries
            .iter()
            .map(|row| {
                let terms = basis.iter().map(|m| m.exponents().to_vec()).zip(row.iter().cloned());
                Polynomial::from_terms(self.n, terms).expect("basis has n variables")
            })
            .collect()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let entries = self.entries.iter().map(|r| r.iter().map(|v| v * s).collect()).collect();
        CoefficientMatrix { entries, ..self.clone() }
    }
}

/// `PVI([0,δ]ⁿ, A·X)` with the box as `2n` affine inequalities.
pub fn assemble_from_matrix(a: &CoefficientMatrix, delta: &Rational) -> Result<ProblemSpec> {
    let k = ConstraintSet::unit_box(a.n, delta.clone())?;
    ProblemSpec::pvi(k, a.field())
}

/// Positions `(row, column)` of the entries that `block_embed` copies from `A'`.
pub fn embedded_positions(n: usize, k: usize, d: usize) -> Result<Vec<(usize, usize)>> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("block embedding needs 1 ≤ k ≤ n−1, got k = {k}, n = {n}")));
    }
    let small = monomial_vector(n - k, d);
    let big = monomial_vector(n, d);
    let index: BTreeMap<&Monomial, usize> = big.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let cols: Vec<usize> = small
        .iter()
        .map(|m| {
            let mut e = m.exponents().to_vec();
            e.resize(n, 0);
            index[&Monomial::new(e)]
        })
        .collect();
    Ok((0..n - k).flat_map(|r| cols.iter().map(move |&c| (r, c))).collect())
}

/// `A = [[A', 0], [0, 0]]`: `F_i = F'_i(x_1..x_{n−k})` for `i ≤ n−k`, zero otherwise.
pub fn block_embed(a_prime: &CoefficientMatrix, k: usize) -> Result<CoefficientMatrix> {
    let n = a_prime.n + k;
    let pos = embedded_positions(n, k, a_prime.d)?;
    let mut out = CoefficientMatrix::zero(n, a_prime.d)?;
    let cols = rho(a_prime.n, a_prime.d)?;
    for (idx, &(r, c)) in pos.iter().enumerate() {
        out.entries[r][c] = a_prime.entries[r][idx % cols].clone();
    }
    out.float_sampled = a_prime.float_sampled;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EntryDistribution {
    StandardNormal,
    /// Uniform on `[-w, w]`.
    Uniform(f64),
}

/// Float entries rounded to multiples of `1/1000`.
pub fn random_matrix(n: usize, d: usize, dist: EntryDistribution, rng: &mut ChaCha8Rng) -> Result<CoefficientMatrix> {
    let cols = rho(n, d)?;
    let entries = (0..n)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    let v: f64 = match dist {
                        EntryDistribution::StandardNormal => StandardNormal.sample(rng),
                        EntryDistribution::Uniform(w) => rng.random_range(-w..=w),
                    };
                    Rational::new(((v * 1000.0).round() as i64).into(), 1000.into())
                })
                .collect()
        })
        .collect();
    let mut a = CoefficientMatrix::new(n, d, entries)?;
    a.float_sampled = true;
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ClassAssignment {
    Class(Dim),
    Unresolved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationRecord {
    pub a: CoefficientMatrix,
    pub k_bound: Dim,
    pub certification: Certification,
    pub k_est: Dim,
    pub confidence: Confidence,
    pub class: ClassAssignment,
    /// Whether the oracle was re-run because bound and estimate disagreed.
    pub rechecked: bool,
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub bound: BoundConfig,
    pub oracle: OracleConfig,
    pub delta: Rational,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { bound: BoundConfig::default(), oracle: OracleConfig::default(), delta: int(1) }
    }
}

pub fn classify_matrix(a: &CoefficientMatrix, cfg: &ClassifyConfig) -> Result<ClassificationRecord> {
    if a.n > cfg.oracle.max_n {
        return Err(Error::OracleGuard { n: a.n, limit: cfg.oracle.max_n });
    }
    let spec = assemble_from_matrix(a, &cfg.delta)?;
    let report = dimension_bound(&spec, &cfg.bound)?;
    let face_cfg = &cfg.bound.face;
    let samples = sample_problem(&spec, face_cfg, &cfg.oracle)?;
    let mut est = estimate_dimension(&samples, &cfg.oracle);
    let mut rechecked = false;
    if est.value != report.overall_bound {
        let again = OracleConfig { starts: cfg.oracle.starts * 2, seed: cfg.oracle.seed ^ 0x5EED, ..cfg.oracle.clone() };
        let more = sample_problem(&spec, face_cfg, &again)?;
        est = estimate_dimension(&more, &again);
        rechecked = true;
    }
    let class = if est.value == report.overall_bound { ClassAssignment::Class(est.value) } else { ClassAssignment::Unresolved };
    Ok(ClassificationRecord {
        a: a.clone(),
        k_bound: report.overall_bound,
        certification: report.certification,
        k_est: est.value,
        confidence: est.confidence,
        class,
        rechecked,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyTable {
    pub n: usize,
    pub d: usize,
    /// Counts for `k ∈ {−∞, 0, …, n}`.
    pub classes: BTreeMap<Dim, usize>,
    pub unresolved: usize,
    pub records: Vec<ClassificationRecord>,
}

impl OccupancyTable {
    pub fn from_records(n: usize, d: usize, records: Vec<ClassificationRecord>) -> Self {
        let mut classes: BTreeMap<Dim, usize> = std::iter::once(Dim::NegInfinity)
            .chain((0..=n).map(Dim::Finite))
            .map(|k| (k, 0))
            .collect();
        let mut unresolved = 0;
        for r in &records {
            match r.class {
                ClassAssignment::Class(k) => *classes.entry(k).or_insert(0) += 1,
                ClassAssignment::Unresolved => unresolved += 1,
            }
        }
        OccupancyTable { n, d, classes, unresolved, records }
    }

    pub fn resolved(&self) -> usize {
        self.records.len() - self.unresolved
    }
}

fn record_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Draw `count` random matrices and classify each.
pub fn classify_sample(
    count: usize,
    n: usize,
    d: usize,
    dist: EntryDistribution,
    seed: u64,
    cfg: &ClassifyConfig,
) -> Result<OccupancyTable> {
    if n > cfg.oracle.max_n {
        return Err(Error::OracleGuard { n, limit: cfg.oracle.max_n });
    }
    let mats: Vec<CoefficientMatrix> = (0..count)
        .map(|i| random_matrix(n, d, dist, &mut ChaCha8Rng::seed_from_u64(record_seed(seed, i))))
        .collect::<Result<_>>()?;
    classify_batch(n, d, &mats, cfg)
}

/// Random `A'` in `n − k` variables embedded with `k` zero components
/// (`k = n` gives `A = 0`, `k = 0` a plain random matrix).
pub fn block_family(n: usize, d: usize, k: usize, dist: EntryDistribution, seed: u64, i: usize) -> Result<CoefficientMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, i));
    match k {
        0 => random_matrix(n, d, dist, &mut rng),
        k if k >= n => CoefficientMatrix::zero(n, d),
        k => block_embed(&random_matrix(n - k, d, dist, &mut rng)?, k),
    }
}

pub fn classify_batch(n: usize, d: usize, mats: &[CoefficientMatrix], cfg: &ClassifyConfig) -> Result<OccupancyTable> {
    let records: Vec<ClassificationRecord> = mats.par_iter().map(|a| classify_matrix(a, cfg)).collect::<Result<_>>()?;
    Ok(OccupancyTable::from_records(n, d, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn quick() -> ClassifyConfig {
        ClassifyConfig { oracle: OracleConfig { starts: 40, ..OracleConfig::default() }, ..ClassifyConfig::default() }
    }

    #[test]
    fn assemble_examples() {
        let a = CoefficientMatrix::new(2, 1, vec![vec![int(1), int(0), int(0)], vec![int(1), int(0), int(0)]]).unwrap();
        let spec = assemble_from_matrix(&a, &int(1)).unwrap();
        assert_eq!(spec.field, vec![Polynomial::one(2), Polynomial::one(2)]);
        assert_eq!(spec.constraints.m(), 4);
        let z = CoefficientMatrix::zero(2, 3).unwrap();
        assert!(assemble_from_matrix(&z, &int(1)).unwrap().field.iter().all(Polynomial::is_zero));
        let b = CoefficientMatrix::new(1, 2, vec![vec![int(0), int(1), int(0)]]).unwrap();
        assert_eq!(b.field(), vec![Polynomial::var(1, 0)]);
        assert!(CoefficientMatrix::new(1, 2, vec![vec![int(0), int(1)]]).is_err());
    }

    #[test]
    fn from_field_roundtrip() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let f = vec![&(&x * &y) + &Polynomial::constant(2, rat(1, 2)), &y * &y];
        let a = CoefficientMatrix::from_field(&f, 2).unwrap();
        assert_eq!(a.field(), f);
        assert!(CoefficientMatrix::from_field(&f, 1).is_err());
    }

    #[test]
    fn embed_constant_one() {
        let ap = CoefficientMatrix::new(1, 1, vec![vec![int(1), int(0)]]).unwrap();
        let a = block_embed(&ap, 1).unwrap();
        assert_eq!(a.field(), vec![Polynomial::one(2), Polynomial::zero(2)]);
        let r = classify_matrix(&a, &quick()).unwrap();
        assert_eq!((r.k_bound, r.k_est), (Dim::Finite(1), Dim::Finite(1)));
        assert_eq!(r.class, ClassAssignment::Class(Dim::Finite(1)));
    }

    #[test]
    fn embed_reindexes_monomials() {
        // F' = x1^2 - x2 in two variables, embedded into three
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let ap = CoefficientMatrix::from_field(&[&(&x * &x) - &y, x.clone()], 2).unwrap();
        let a = block_embed(&ap, 1).unwrap();
        let f = a.field();
        let x3 = Polynomial::var(3, 0);
        let y3 = Polynomial::var(3, 1);
        assert_eq!(f[0], &(&x3 * &x3) - &y3);
        assert_eq!(f[1], x3);
        assert!(f[2].is_zero());
        assert!(block_embed(&CoefficientMatrix::zero(2, 2).unwrap(), 1).unwrap().field().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn free_entry_count_matches_family_dimension() {
        for n in 2..=4 {
            for k in 1..n {
                for d in 0..=3 {
                    let pos = embedded_positions(n, k, d).unwrap();
                    assert_eq!(pos.len(), (n - k) * rho(n - k, d).unwrap());
                    let mut uniq = pos.clone();
                    uniq.sort();
                    uniq.dedup();
                    assert_eq!(uniq.len(), pos.len());
                }
            }
        }
        assert!(embedded_positions(3, 0, 2).is_err());
        assert!(embedded_positions(3, 3, 2).is_err());
    }

    #[test]
    fn zero_matrix_is_class_n() {
        let r = classify_matrix(&CoefficientMatrix::zero(2, 2).unwrap(), &quick()).unwrap();
        assert_eq!(r.class, ClassAssignment::Class(Dim::Finite(2)));
    }

    #[test]
    fn sample_table_is_deterministic_and_never_empty_class() {
        let a = classify_sample(6, 2, 1, EntryDistribution::StandardNormal, 7, &quick()).unwrap();
        let b = classify_sample(6, 2, 1, EntryDistribution::StandardNormal, 7, &quick()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.classes[&Dim::NegInfinity], 0);
        assert_eq!(a.classes.len(), 4);
    }

    #[test]
    fn guard_applies() {
        let cfg = ClassifyConfig { oracle: OracleConfig { max_n: 1, ..OracleConfig::default() }, ..quick() };
        assert!(matches!(classify_sample(1, 2, 1, EntryDistribution::StandardNormal, 1, &cfg), Err(Error::OracleGuard { .. })));
    }

    #[test]
    fn positive_scaling_keeps_the_class() {
        for i in 0..3 {
            let a = block_family(2, 2, 0, EntryDistribution::StandardNormal, 11, i).unwrap();
            let r1 = classify_matrix(&a, &quick()).unwrap();
            let r2 = classify_matrix(&a.scale(&rat(7, 2)), &quick()).unwrap();
            if r1.class != ClassAssignment::Unresolved && r2.class != ClassAssignment::Unresolved {
                assert_eq!(r1.class, r2.class);
            }
            assert_eq!(r1.k_bound, r2.k_bound);
        }
    }
}
