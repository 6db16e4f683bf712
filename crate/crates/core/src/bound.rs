//! Dimension bounds assembled from face dimensions and KKT Jacobian ranks.
//!
//! On each pseudo-face with constant-rank `DΦ_α`,
//! `dim(Sol ∩ K_α) ≤ min{dim K_α, n + |α| + ℓ − rank DΦ_α}`, and the bound on
//! `Sol(K, F)` is the maximum over faces.

use num::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::kkt::build_phi;
use crate::model::{
    check_licq, enumerate_faces, AcqAssertion, DimMethod, FaceConfig, Feasibility, LicqOutcome, ProblemKind,
    ProblemSpec, PseudoFace,
};
use crate::oracle::{sample_problem, OracleConfig};
use crate::poly::{jacobian, Rational};
use crate::rank::{probe_constant_rank, random_point, schur_finiteness_check, RankConfig, RankTier, RankVerdict, SchurOutcome};

#[derive(Clone, Debug, Default)]
pub struct BoundConfig {
    pub face: FaceConfig,
    pub rank: RankConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certification {
    Certified,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRule {
    /// `min{dim K_α, N − rank}`.
    Formula,
    /// Rank not constant: only `dim K_α` is valid.
    FaceDimOnly,
    Empty,
    /// A component of `Φ_α` is a nonzero constant, so `Φ_α` has no zeros.
    NoZero,
}

impl BoundRule {
    pub fn is_live(self) -> bool {
        matches!(self, BoundRule::Formula | BoundRule::FaceDimOnly)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceReport {
    pub face: PseudoFace,
    pub total_vars: usize,
    pub rank: Option<RankVerdict>,
    pub face_bound: Dim,
    pub rule: BoundRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcqStatus {
    UserAsserted,
    /// Polyhedral `K`: ACQ holds.
    AffineConstraints,
    LicqOnSamples,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "tier", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Finiteness {
    Finite(RankTier),
    Unknown,
}

impl Finiteness {
    pub fn describe(self) -> &'static str {
        match self {
            Finiteness::Finite(RankTier::Certified) => "finite",
            Finiteness::Finite(_) => "finite up to sampling confidence",
            Finiteness::Unknown => "unknown",
        }
    }
}

/// Square-Jacobian route for complementarity problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcpPath {
    pub df_rank: RankVerdict,
    pub fires: bool,
    /// Schur corroboration over every `α ⊆ [n]` at the rank probe points.
    pub schur: Vec<(Vec<usize>, SchurOutcome)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    pub kind: ProblemKind,
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub per_face: Vec<FaceReport>,
    pub overall_bound: Dim,
    pub certification: Certification,
    pub finiteness: Finiteness,
    pub acq: AcqStatus,
    pub hypothesis_log: Vec<String>,
    pub pcp: Option<PcpPath>,
}

impl DimensionReport {
    /// Largest non-empty face dimension.
    pub fn max_face_dim(&self) -> Dim {
        crate::dim::max_dim(self.per_face.iter().map(|f| f.face.face_dim))
    }
}

fn weakest<I: IntoIterator<Item = RankTier>>(it: I) -> RankTier {
    it.into_iter().max().unwrap_or(RankTier::Certified)
}

/// Probe points for `DΦ_α` placed where ranks tend to drop: the origin,
/// coordinate hyperplanes, and the face witness with zero multipliers.
fn anchors(face: &PseudoFace, total: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let mut out = vec![vec![Rational::zero(); total]];
    for i in 0..total {
        let mut p = random_point(&mut rng, total, 10);
        p[i] = Rational::zero();
        out.push(p);
    }
    if let Some(w) = face.feasible.witness() {
        let mut p = w.to_vec();
        p.resize(total, Rational::zero());
        out.push(p);
    }
    out
}

fn face_report(spec: &ProblemSpec, face: PseudoFace, mask: usize, cfg: &BoundConfig) -> Result<FaceReport> {
    let total = spec.n() + face.alpha.len() + spec.constraints.l();
    if face.feasible == Feasibility::EmptyProven {
        return Ok(FaceReport { face, total_vars: total, rank: None, face_bound: Dim::NegInfinity, rule: BoundRule::Empty });
    }
    let map = build_phi(spec, &face.alpha)?;
    if map.components.iter().any(|c| c.as_constant().is_some_and(|v| !v.is_zero())) {
        return Ok(FaceReport { face, total_vars: total, rank: None, face_bound: Dim::NegInfinity, rule: BoundRule::NoZero });
    }
    let seed = cfg.rank.seed ^ (mask as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut anchors_all = anchors(&face, total, seed);
    anchors_all.extend(cfg.rank.anchors.iter().filter(|a| a.len() == total).cloned());
    let rc = RankConfig { seed, anchors: anchors_all, ..cfg.rank.clone() };
    let v = probe_constant_rank(&map.jac, &rc)?;
    let (face_bound, rule) = if v.tier == RankTier::NotConstant {
        (face.face_dim, BoundRule::FaceDimOnly)
    } else {
        (face.face_dim.min(Dim::codim(total, v.rank)), BoundRule::Formula)
    };
    Ok(FaceReport { face, total_vars: total, rank: Some(v), face_bound, rule })
}

fn check_q_positive(spec: &ProblemSpec, faces: &[PseudoFace]) -> Result<()> {
    let Some(fr) = &spec.fraction else { return Ok(()) };
    for f in faces {
        if let Some(w) = f.feasible.witness() {
            if !fr.q.eval(w)?.is_positive() {
                return Err(Error::InvalidInput(format!("denominator q is not positive at the feasible point {w:?}")));
            }
        }
    }
    Ok(())
}

/// The face-by-face bound with its certificate tier and hypothesis log.
pub fn dimension_bound(spec: &ProblemSpec, cfg: &BoundConfig) -> Result<DimensionReport> {
    let k = &spec.constraints;
    let faces = enumerate_faces(k, &cfg.face)?;
    check_q_positive(spec, &faces)?;
    let mut log = Vec::new();

    let acq = match spec.acq {
        AcqAssertion::UserAsserted => {
            log.push("ACQ asserted by the user".to_string());
            AcqStatus::UserAsserted
        }
        AcqAssertion::LicqProbed if k.is_affine() => {
            log.push("ACQ holds: every constraint is affine".to_string());
            AcqStatus::AffineConstraints
        }
        AcqAssertion::LicqProbed => {
            let pts: Vec<Vec<Rational>> = faces.iter().filter_map(|f| f.feasible.witness().map(<[_]>::to_vec)).collect();
            match check_licq(k, &pts)? {
                LicqOutcome::HoldsOnSamples => {
                    log.push(format!("LICQ holds at {} face witnesses (evidence, not proof)", pts.len()));
                    AcqStatus::LicqOnSamples
                }
                LicqOutcome::Violated(p) => {
                    log.push(format!("LICQ fails at {p:?}; ACQ status unknown"));
                    AcqStatus::Unknown
                }
            }
        }
    };
    if spec.kind == ProblemKind::FracOpt {
        log.push("Stat(K, p/q) = Sol(K, q∇p − p∇q) since q > 0 on K (user assertion, spot-checked at witnesses)".into());
    }

    let per_face: Vec<FaceReport> = faces
        .into_par_iter()
        .enumerate()
        .map(|(mask, f)| face_report(spec, f, mask, cfg))
        .collect::<Result<_>>()?;
    let overall_bound = crate::dim::max_dim(per_face.iter().map(|f| f.face_bound));

    let mut certified = acq != AcqStatus::Unknown;
    for f in per_face.iter().filter(|f| f.rule.is_live()) {
        let tier = f.rank.as_ref().map(|v| v.tier);
        if f.face.dim_method != DimMethod::ExactAffine || tier != Some(RankTier::Certified) {
            certified = false;
        }
        if f.rule == BoundRule::FaceDimOnly {
            log.push(format!("face {:?}: rank not constant, bound falls back to dim K_α", one_based(&f.face.alpha)));
        }
    }
    if per_face.iter().any(|f| f.face.dim_method == DimMethod::Sampled) {
        log.push("some face dimensions are sampled estimates".into());
    }

    let live: Vec<&FaceReport> = per_face.iter().filter(|f| f.rule.is_live()).collect();
    let mut finiteness = if !live.is_empty()
        && live.iter().all(|f| f.rule == BoundRule::Formula && f.rank.as_ref().is_some_and(|v| v.rank == f.total_vars))
    {
        Finiteness::Finite(weakest(live.iter().filter_map(|f| f.rank.as_ref().map(|v| v.tier))))
    } else {
        Finiteness::Unknown
    };
    if per_face.iter().all(|f| f.rule == BoundRule::Empty) {
        log.push("every pseudo-face is empty: K = ∅".into());
    }
    for f in per_face.iter().filter(|f| f.rule == BoundRule::NoZero) {
        log.push(format!("face {:?}: Φ_α has a nonzero constant component, no solutions", one_based(&f.face.alpha)));
    }

    let pcp = if spec.kind == ProblemKind::Pcp {
        let path = pcp_path(spec, cfg)?;
        if path.fires {
            log.push("square Jacobian DF has full rank n: finitely many solutions".into());
            finiteness = match finiteness {
                Finiteness::Finite(t) => Finiteness::Finite(t.min(path.df_rank.tier)),
                Finiteness::Unknown => Finiteness::Finite(path.df_rank.tier),
            };
        }
        for (alpha, o) in &path.schur {
            match o {
                SchurOutcome::Pass => {}
                SchurOutcome::Fail(p) => log.push(format!("face {:?}: det DF vanishes at {p:?}", one_based(alpha))),
                SchurOutcome::SingularComplement(p) => {
                    log.push(format!("face {:?}: C_αᵀ DF⁻¹ C_α singular at {p:?}", one_based(alpha)))
                }
            }
        }
        Some(path)
    } else {
        None
    };

    Ok(DimensionReport {
        kind: spec.kind,
        n: k.n(),
        m: k.m(),
        l: k.l(),
        per_face,
        overall_bound,
        certification: if certified { Certification::Certified } else { Certification::Heuristic },
        finiteness,
        acq,
        hypothesis_log: log,
        pcp,
    })
}

pub fn one_based(alpha: &[usize]) -> Vec<usize> {
    alpha.iter().map(|i| i + 1).collect()
}

fn pcp_path(spec: &ProblemSpec, cfg: &BoundConfig) -> Result<PcpPath> {
    let n = spec.n();
    let df = jacobian(&spec.field, n)?;
    let mut rc = cfg.rank.clone();
    rc.anchors.retain(|a| a.len() == n);
    rc.anchors.insert(0, vec![Rational::zero(); n]);
    let v = probe_constant_rank(&df, &rc)?;
    let full = v.rank == n && v.tier != RankTier::NotConstant;
    let mut schur = Vec::new();
    if full {
        let probes: Vec<Vec<Rational>> = v.witness_points.iter().take(8).cloned().collect();
        for mask in 0..1usize << n {
            let alpha = crate::model::alpha_of_mask(mask, n);
            let o = schur_finiteness_check(&df, &alpha, &probes)?;
            schur.push((alpha, o));
        }
    }
    // nonsingular DF alone does not make every DΦ_α nonsingular
    let fires = full && schur.iter().all(|(_, o)| *o == SchurOutcome::Pass);
    Ok(PcpPath { df_rank: v, fires, schur })
}

/// Finiteness of `Sol(K, F)` with the weakest contributing tier.
pub fn finiteness_certificate(spec: &ProblemSpec, cfg: &BoundConfig) -> Result<Finiteness> {
    Ok(dimension_bound(spec, cfg)?.finiteness)
}

/// The bound for a fractional program, through `Ψ_α`.
pub fn fracopt_bound(spec: &ProblemSpec, cfg: &BoundConfig) -> Result<DimensionReport> {
    if spec.kind != ProblemKind::FracOpt {
        return Err(Error::InvalidInput("expected a fractional program".into()));
    }
    dimension_bound(spec, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "dim", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Unconstrained {
    Exact(usize),
    Empty,
    Unknown,
}

/// `dim Sol(ℝⁿ, F) = n − rank DF` when the rank is constant and a solution exists.
pub fn unconstrained_dimension(spec: &ProblemSpec, cfg: &BoundConfig, oracle: &OracleConfig) -> Result<Unconstrained> {
    let k = &spec.constraints;
    if k.m() != 0 || k.l() != 0 {
        return Err(Error::Precondition("unconstrained problem expected (m = ℓ = 0)".into()));
    }
    let field = spec.vi_map();
    if field.iter().any(|f| f.as_constant().is_some_and(|c| !c.is_zero())) {
        return Ok(Unconstrained::Empty);
    }
    let n = k.n();
    let df = jacobian(&field, n)?;
    let v = probe_constant_rank(&df, &cfg.rank)?;
    if v.tier != RankTier::Certified {
        return Ok(Unconstrained::Unknown);
    }
    let samples = sample_problem(spec, &cfg.face, oracle)?;
    Ok(if samples.is_empty() { Unconstrained::Unknown } else { Unconstrained::Exact(n - v.rank) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullDimension {
    /// `dim Sol = n` exactly when `F ≡ 0`.
    pub full: bool,
    pub interior_witness: Vec<Rational>,
}

/// Whether `Sol(K, F)` has full dimension, given a strictly feasible point.
pub fn full_dimension_test(spec: &ProblemSpec, cfg: &FaceConfig) -> Result<FullDimension> {
    let k = &spec.constraints;
    let no_interior = || Error::Precondition("no interior point of K was found".into());
    if k.l() > 0 {
        return Err(no_interior());
    }
    let interior = crate::model::probe_feasibility(&[], k, cfg, 0);
    let Feasibility::Yes(w) = interior else {
        return Err(no_interior());
    };
    Ok(FullDimension { full: spec.vi_map().iter().all(|f| f.is_zero()), interior_witness: w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{unit_box, ConstraintSet};
    use crate::poly::{int, Polynomial};

    #[test]
    fn half_plane_bound_is_one() {
        let r = dimension_bound(&fixtures::cubic_half_plane(), &BoundConfig::default()).unwrap();
        assert_eq!(r.overall_bound, Dim::Finite(1));
        assert_eq!(r.certification, Certification::Certified);
        assert_eq!(r.per_face[0].face_bound, Dim::Finite(1));
        assert_eq!(r.per_face[0].rank.as_ref().unwrap().rank, 1);
        assert_eq!(r.per_face[1].face_bound, Dim::Finite(1));
        assert_eq!(r.per_face[1].rank.as_ref().unwrap().rank, 2);
        assert_eq!(r.finiteness, Finiteness::Unknown);
    }

    #[test]
    fn cubic_pcp_is_finite() {
        let r = dimension_bound(&fixtures::cubic_pcp(), &BoundConfig::default()).unwrap();
        assert_eq!(r.overall_bound, Dim::Finite(0));
        assert_eq!(r.finiteness, Finiteness::Finite(RankTier::Certified));
        let p = r.pcp.unwrap();
        assert!(p.fires);
        assert_eq!(p.df_rank.tier, RankTier::Certified);
        assert!(p.schur.iter().all(|(_, o)| *o == SchurOutcome::Pass));
    }

    #[test]
    fn zero_field_on_box_is_full() {
        let z = Polynomial::zero(2);
        let spec = ProblemSpec::pvi(unit_box(2), vec![z.clone(), z]).unwrap();
        let r = dimension_bound(&spec, &BoundConfig::default()).unwrap();
        assert_eq!(r.overall_bound, Dim::Finite(2));
        assert_eq!(r.finiteness, Finiteness::Unknown);
        assert!(full_dimension_test(&spec, &FaceConfig::default()).unwrap().full);
    }

    #[test]
    fn full_dimension_examples() {
        let one = Polynomial::one(2);
        let spec = ProblemSpec::pvi(unit_box(2), vec![one.clone(), one]).unwrap();
        assert!(!full_dimension_test(&spec, &FaceConfig::default()).unwrap().full);
        let spec = ProblemSpec::pvi(unit_box(2), vec![Polynomial::var(2, 0), Polynomial::zero(2)]).unwrap();
        assert!(!full_dimension_test(&spec, &FaceConfig::default()).unwrap().full);
        let line = ConstraintSet::new(2, vec![], vec![Polynomial::var(2, 0)]).unwrap();
        let spec = ProblemSpec::pvi(line, vec![Polynomial::zero(2); 2]).unwrap();
        assert!(matches!(full_dimension_test(&spec, &FaceConfig::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn bump_bound_is_one() {
        let r = fracopt_bound(&fixtures::rational_bump(), &BoundConfig::default()).unwrap();
        assert_eq!(r.overall_bound, Dim::Finite(1));
        assert_eq!(r.certification, Certification::Certified);
        assert!(fracopt_bound(&fixtures::cubic_pcp(), &BoundConfig::default()).is_err());
    }

    #[test]
    fn p_equal_q_gives_full_bound() {
        let x1 = Polynomial::var(2, 0);
        let q = &(&x1 * &x1) + &Polynomial::one(2);
        let spec = ProblemSpec::fracopt(ConstraintSet::whole_space(2), q.clone(), q).unwrap();
        assert_eq!(fracopt_bound(&spec, &BoundConfig::default()).unwrap().overall_bound, Dim::Finite(2));
    }

    #[test]
    fn nonpositive_denominator_is_rejected() {
        let x1 = Polynomial::var(1, 0);
        let spec = ProblemSpec::fracopt(unit_box(1), Polynomial::one(1), &x1 - &Polynomial::one(1)).unwrap();
        assert!(matches!(fracopt_bound(&spec, &BoundConfig::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn unconstrained_examples() {
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let d = &x1 - &x2;
        let o = OracleConfig { starts: 40, ..OracleConfig::default() };
        let spec = ProblemSpec::pvi(ConstraintSet::whole_space(2), vec![d.clone(), d]).unwrap();
        assert_eq!(unconstrained_dimension(&spec, &BoundConfig::default(), &o).unwrap(), Unconstrained::Exact(1));
        let spec = ProblemSpec::pvi(ConstraintSet::whole_space(3), vec![Polynomial::zero(3); 3]).unwrap();
        assert_eq!(unconstrained_dimension(&spec, &BoundConfig::default(), &o).unwrap(), Unconstrained::Exact(3));
        let spec = ProblemSpec::pvi(ConstraintSet::whole_space(1), vec![Polynomial::constant(1, int(1))]).unwrap();
        assert_eq!(unconstrained_dimension(&spec, &BoundConfig::default(), &o).unwrap(), Unconstrained::Empty);
        assert!(unconstrained_dimension(&fixtures::cubic_pcp(), &BoundConfig::default(), &o).is_err());
    }

    #[test]
    fn nonconstant_rank_falls_back_to_face_dim() {
        // F = (x1·x2, x1·x2²) vanishes on both axes although DF is generically invertible
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let f = vec![&x1 * &x2, &(&x1 * &x2) * &x2];
        let spec = ProblemSpec::pvi(ConstraintSet::whole_space(2), f).unwrap();
        let r = dimension_bound(&spec, &BoundConfig::default()).unwrap();
        assert_eq!(r.per_face[0].rule, BoundRule::FaceDimOnly);
        assert_eq!(r.overall_bound, Dim::Finite(2));
        assert_eq!(r.certification, Certification::Heuristic);
    }

    #[test]
    fn constant_component_rules_out_a_face() {
        let one = Polynomial::one(2);
        let spec = ProblemSpec::pvi(unit_box(2), vec![one, Polynomial::zero(2)]).unwrap();
        let r = dimension_bound(&spec, &BoundConfig::default()).unwrap();
        assert_eq!(r.per_face[0].rule, BoundRule::NoZero);
        assert_eq!(r.overall_bound, Dim::Finite(1));
        assert_eq!(r.certification, Certification::Certified);
    }

    #[test]
    fn nonsingular_but_degenerate_lcp_is_not_declared_finite() {
        // F = (x2, x1): DF is invertible, yet both half-axes solve
        let spec = ProblemSpec::pcp(vec![Polynomial::var(2, 1), Polynomial::var(2, 0)]).unwrap();
        let r = dimension_bound(&spec, &BoundConfig::default()).unwrap();
        let p = r.pcp.as_ref().unwrap();
        assert_eq!(p.df_rank.rank, 2);
        assert!(!p.fires);
        assert!(p.schur.iter().any(|(_, o)| matches!(o, SchurOutcome::SingularComplement(_))));
        assert_eq!(r.finiteness, Finiteness::Unknown);
        assert_eq!(r.overall_bound, Dim::Finite(1));
    }

    #[test]
    fn affine_lcp_with_nonsingular_matrix_is_finite() {
        let m = [[2, 1], [1, 3]];
        let f: Vec<Polynomial> =
            m.iter().map(|row| Polynomial::affine(&[int(row[0]), int(row[1])], int(-1))).collect();
        let spec = ProblemSpec::pcp(f).unwrap();
        assert_eq!(finiteness_certificate(&spec, &BoundConfig::default()).unwrap(), Finiteness::Finite(RankTier::Certified));
    }
}
