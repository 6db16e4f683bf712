//! Constraint sets, problem instances and their pseudo-faces.
//!
//! A constraint set `K = {g_i(x) ≤ 0, h_j(x) = 0}` splits into the `2^m`
//! pseudo-faces `K_α = {g_i = 0 (i ∈ α), g_i < 0 (i ∉ α), h = 0}`, pairwise
//! disjoint and covering `K`. Each face gets an exact feasibility verdict when
//! one is cheaply available and a dimension tagged with how it was obtained.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::linalg::{max_margin, AffineSpace, LinearForm, QMatrix};
use crate::poly::{int, to_f64, Polynomial, Rational};

/// `K = {x ∈ ℝⁿ : g_i(x) ≤ 0, h_j(x) = 0}` with every `h_j` affine.
///
/// Convexity of the `g_i` is taken on trust.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    n: usize,
    g: Vec<Polynomial>,
    h: Vec<Polynomial>,
    delta_box: Option<Rational>,
}

impl ConstraintSet {
    pub fn new(n: usize, g: Vec<Polynomial>, h: Vec<Polynomial>) -> Result<Self> {
        for p in g.iter().chain(&h) {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
            }
        }
        if let Some((j, _)) = h.iter().enumerate().find(|(_, p)| !p.is_affine()) {
            return Err(Error::InvalidInput(format!("equality constraint h{} is not affine", j + 1)));
        }
        Ok(ConstraintSet { n, g, h, delta_box: None })
    }

    pub fn whole_space(n: usize) -> Self {
        ConstraintSet { n, g: Vec::new(), h: Vec::new(), delta_box: None }
    }

    /// The nonnegative orthant, encoded as `g_i = -x_i`.
    pub fn orthant(n: usize) -> Self {
        let g = (0..n).map(|i| -&Polynomial::var(n, i)).collect();
        ConstraintSet { n, g, h: Vec::new(), delta_box: None }
    }

    /// The box `[0, δ]ⁿ` as `2n` affine constraints, ordered
    /// `-x_1 ≤ 0, x_1 - δ ≤ 0, -x_2 ≤ 0, …`.
    pub fn unit_box(n: usize, delta: Rational) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::InvalidInput("box width must be positive".into()));
        }
        let mut g = Vec::with_capacity(2 * n);
        for i in 0..n {
            let xi = Polynomial::var(n, i);
            g.push(-&xi);
            g.push(&xi - &Polynomial::constant(n, delta.clone()));
        }
        Ok(ConstraintSet { n, g, h: Vec::new(), delta_box: Some(delta) })
    }

    pub fn with_box_marker(mut self, delta: Rational) -> Self {
        self.delta_box = Some(delta);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.g.len()
    }

    pub fn l(&self) -> usize {
        self.h.len()
    }

    pub fn g(&self) -> &[Polynomial] {
        &self.g
    }

    pub fn h(&self) -> &[Polynomial] {
        &self.h
    }

    pub fn delta_box(&self) -> Option<&Rational> {
        self.delta_box.as_ref()
    }

    pub fn is_affine(&self) -> bool {
        self.g.iter().chain(&self.h).all(Polynomial::is_affine)
    }

    /// Whether the set is exactly the nonnegative orthant in its canonical encoding.
    pub fn is_orthant(&self) -> bool {
        self.h.is_empty()
            && self.g.len() == self.n
            && self.g.iter().enumerate().all(|(i, p)| *p == -&Polynomial::var(self.n, i))
    }

    fn check_len(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        Ok(self.face_of(x)?.is_some())
    }

    /// The unique `α` with `x ∈ K_α`, or `None` when `x ∉ K`.
    pub fn face_of(&self, x: &[Rational]) -> Result<Option<Vec<usize>>> {
        self.check_len(x)?;
        for h in &self.h {
            if !h.eval(x)?.is_zero() {
                return Ok(None);
            }
        }
        let mut alpha = Vec::new();
        for (i, g) in self.g.iter().enumerate() {
            let v = g.eval(x)?;
            if v.is_positive() {
                return Ok(None);
            }
            if v.is_zero() {
                alpha.push(i);
            }
        }
        Ok(Some(alpha))
    }

    /// Whether `x` lies in the pseudo-face `K_α`.
    pub fn in_face(&self, alpha: &[usize], x: &[Rational]) -> Result<bool> {
        Ok(self.face_of(x)?.as_deref() == Some(alpha))
    }

    /// Bounds `lo ≤ x_i ≤ hi` implied by single-variable affine constraints.
    pub fn coordinate_bounds(&self) -> Vec<(Option<f64>, Option<f64>)> {
        let mut out = vec![(None, None); self.n];
        for g in &self.g {
            let Some((a, c)) = g.affine_parts() else { continue };
            let nz: Vec<usize> = (0..self.n).filter(|&i| !a[i].is_zero()).collect();
            if nz.len() != 1 {
                continue;
            }
            let i = nz[0];
            // a_i x_i + c <= 0
            let b = to_f64(&(-c / &a[i]));
            let slot = &mut out[i];
            if a[i].is_positive() {
                slot.1 = Some(slot.1.map_or(b, |v: f64| v.min(b)));
            } else {
                slot.0 = Some(slot.0.map_or(b, |v: f64| v.max(b)));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Pvi,
    Pcp,
    FracOpt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcqAssertion {
    UserAsserted,
    LicqProbed,
}

/// Objective `p / q` of a fractional program; `q > 0` on `K` is taken on trust.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction {
    pub p: Polynomial,
    pub q: Polynomial,
}

impl Fraction {
    /// The polynomial map `q∇p − p∇q`, a positive multiple of `∇(p/q)` where `q > 0`.
    pub fn stationarity_map(&self) -> Vec<Polynomial> {
        let gp = self.p.gradient_vec();
        let gq = self.q.gradient_vec();
        gp.iter().zip(&gq).map(|(dp, dq)| &(&self.q * dp) - &(&self.p * dq)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub constraints: ConstraintSet,
    /// `F` for PVI/PCP; empty for fractional programs.
    pub field: Vec<Polynomial>,
    pub fraction: Option<Fraction>,
    pub acq: AcqAssertion,
}

impl ProblemSpec {
    pub fn pvi(constraints: ConstraintSet, field: Vec<Polynomial>) -> Result<Self> {
        let n = constraints.n();
        check_field(n, &field)?;
        Ok(ProblemSpec { kind: ProblemKind::Pvi, constraints, field, fraction: None, acq: AcqAssertion::LicqProbed })
    }

    pub fn pcp(field: Vec<Polynomial>) -> Result<Self> {
        let n = field.len();
        if n == 0 {
            return Err(Error::InvalidInput("complementarity problem needs n >= 1".into()));
        }
        check_field(n, &field)?;
        Ok(ProblemSpec {
            kind: ProblemKind::Pcp,
            constraints: ConstraintSet::orthant(n),
            field,
            fraction: None,
            acq: AcqAssertion::LicqProbed,
        })
    }

    pub fn fracopt(constraints: ConstraintSet, p: Polynomial, q: Polynomial) -> Result<Self> {
        let n = constraints.n();
        for poly in [&p, &q] {
            if poly.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: poly.nvars() });
            }
        }
        if q.is_zero() {
            return Err(Error::InvalidInput("denominator q is identically zero".into()));
        }
        Ok(ProblemSpec {
            kind: ProblemKind::FracOpt,
            constraints,
            field: Vec::new(),
            fraction: Some(Fraction { p, q }),
            acq: AcqAssertion::LicqProbed,
        })
    }

    pub fn with_acq(mut self, acq: AcqAssertion) -> Self {
        self.acq = acq;
        self
    }

    pub fn n(&self) -> usize {
        self.constraints.n()
    }

    /// The map whose variational inequality is analysed: `F`, or `q∇p − p∇q`.
    pub fn vi_map(&self) -> Vec<Polynomial> {
        match &self.fraction {
            Some(fr) => fr.stationarity_map(),
            None => self.field.clone(),
        }
    }

    /// Same problem with the map replaced by `s·F` (fractional programs scale `p`).
    pub fn scaled(&self, s: &Rational) -> ProblemSpec {
        let mut out = self.clone();
        out.field = self.field.iter().map(|f| f.scale(s)).collect();
        if let Some(fr) = &mut out.fraction {
            fr.p = fr.p.scale(s);
        }
        out
    }
}

fn check_field(n: usize, field: &[Polynomial]) -> Result<()> {
    if field.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: field.len() });
    }
    if let Some(bad) = field.iter().find(|p| p.nvars() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.nvars() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// An exact rational point of the face.
    Yes(Vec<Rational>),
    NoEvidence,
    EmptyProven,
}

impl Feasibility {
    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Yes(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Feasibility::Yes(_) => "feasible",
            Feasibility::NoEvidence => "no-evidence",
            Feasibility::EmptyProven => "empty",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimMethod {
    ExactAffine,
    Sampled,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoFace {
    /// Active inequality indices, 0-based and ascending.
    pub alpha: Vec<usize>,
    pub feasible: Feasibility,
    /// Upper bound on `dim K_α` (exact for non-empty affine faces).
    pub face_dim: Dim,
    pub dim_method: DimMethod,
}

#[derive(Clone, Debug)]
pub struct FaceConfig {
    pub face_budget: usize,
    /// Rejection-sampling budget per face for nonlinear faces.
    pub samples: usize,
    /// Grid numerators range over `[-grid_bound·q, grid_bound·q]`.
    pub grid_bound: i64,
    pub max_denominator: i64,
    pub seed: u64,
    /// User-supplied points tried before any search.
    pub witnesses: Vec<Vec<Rational>>,
}

impl Default for FaceConfig {
    fn default() -> Self {
        FaceConfig { face_budget: 20, samples: 10_000, grid_bound: 3, max_denominator: 4, seed: 42, witnesses: Vec::new() }
    }
}

/// Subset encoded by the bits of `mask`.
pub fn alpha_of_mask(mask: usize, m: usize) -> Vec<usize> {
    (0..m).filter(|i| mask & (1 << i) != 0).collect()
}

/// All `2^m` pseudo-faces in mask order, each probed for feasibility and
/// given a dimension.
pub fn enumerate_faces(k: &ConstraintSet, cfg: &FaceConfig) -> Result<Vec<PseudoFace>> {
    let m = k.m();
    if m > cfg.face_budget || m >= usize::BITS as usize {
        return Err(Error::FaceBudget { m, budget: cfg.face_budget });
    }
    let faces = (0..1usize << m)
        .into_par_iter()
        .map(|mask| {
            let alpha = alpha_of_mask(mask, m);
            let feasible = probe_feasibility(&alpha, k, cfg, mask as u64);
            let mut face = PseudoFace { alpha, feasible, face_dim: Dim::NegInfinity, dim_method: DimMethod::Unknown };
            let (d, method) = face_dimension(&face, k);
            face.face_dim = d;
            face.dim_method = method;
            face
        })
        .collect();
    Ok(faces)
}

fn affine_form(p: &Polynomial) -> Option<LinearForm> {
    p.affine_parts().map(|(coeffs, constant)| LinearForm { coeffs, constant })
}

/// Affine span cut out by the affine members among `g_α` and `h`;
/// `None` when those equalities are inconsistent.
fn affine_equalities(alpha: &[usize], k: &ConstraintSet) -> Option<AffineSpace> {
    let forms: Vec<LinearForm> = alpha
        .iter()
        .map(|&i| &k.g[i])
        .chain(&k.h)
        .filter_map(affine_form)
        .collect();
    if forms.is_empty() {
        return Some(AffineSpace::whole(k.n));
    }
    let a = QMatrix::from_rows(forms.iter().map(|f| f.coeffs.clone()).collect());
    let rhs: Vec<Rational> = forms.iter().map(|f| -f.constant.clone()).collect();
    a.solve_affine(&rhs)
}

/// Decide whether `K_α` is non-empty.
///
/// Affine constraints are handled exactly: the affine equalities are solved
/// and the strict affine inequalities go through a max-margin LP, which
/// either produces a witness or proves the face empty. Nonlinear faces fall
/// back to user witnesses and rejection sampling on a rational grid inside
/// the affine span.
pub fn probe_feasibility(alpha: &[usize], k: &ConstraintSet, cfg: &FaceConfig, stream: u64) -> Feasibility {
    for w in &cfg.witnesses {
        if k.in_face(alpha, w).unwrap_or(false) {
            return Feasibility::Yes(w.clone());
        }
    }
    let Some(space) = affine_equalities(alpha, k) else {
        return Feasibility::EmptyProven;
    };
    let strict: Vec<LinearForm> = (0..k.m())
        .filter(|i| !alpha.contains(i))
        .filter_map(|i| affine_form(&k.g[i]))
        .collect();
    let margin = max_margin(&space, &strict, &Rational::one());
    if !margin.value.is_positive() {
        return Feasibility::EmptyProven;
    }
    let fully_affine = alpha.iter().map(|&i| &k.g[i]).all(Polynomial::is_affine)
        && (0..k.m()).all(|i| k.g[i].is_affine());
    if fully_affine {
        return Feasibility::Yes(margin.point);
    }

    let mut candidates = vec![margin.point.clone(), space.origin.clone()];
    candidates.dedup();
    for c in &candidates {
        if k.in_face(alpha, c).unwrap_or(false) {
            return Feasibility::Yes(c.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    for s in 0..cfg.samples {
        let den = rng.random_range(1..=cfg.max_denominator.max(1));
        let t: Vec<Rational> = (0..space.dim())
            .map(|_| {
                let bound = cfg.grid_bound * den;
                Rational::new(rng.random_range(-bound..=bound).into(), den.into())
            })
            .collect();
        let mut y = space.point(&t);
        if s % 2 == 1 {
            // alternate around the margin point
            for (yi, (mi, oi)) in y.iter_mut().zip(margin.point.iter().zip(&space.origin)) {
                *yi += mi - oi;
            }
        }
        if k.in_face(alpha, &y).unwrap_or(false) {
            return Feasibility::Yes(y);
        }
    }
    Feasibility::NoEvidence
}

/// Dimension of `K_α` and how it was obtained.
///
/// Affine active constraints give the exact value `n − rank`. Otherwise the
/// active gradients are ranked at the witness, which is only a local
/// estimate. Without a witness the trivial bound `n` is reported as unknown.
pub fn face_dimension(face: &PseudoFace, k: &ConstraintSet) -> (Dim, DimMethod) {
    if face.feasible == Feasibility::EmptyProven {
        return (Dim::NegInfinity, DimMethod::ExactAffine);
    }
    let active: Vec<&Polynomial> = face.alpha.iter().map(|&i| &k.g[i]).chain(&k.h).collect();
    if active.iter().all(|p| p.is_affine()) {
        if active.is_empty() {
            return (Dim::Finite(k.n), DimMethod::ExactAffine);
        }
        let rows = active.iter().map(|p| p.affine_parts().expect("affine").0).collect();
        let r = QMatrix::from_rows(rows).rank();
        return (Dim::codim(k.n, r), DimMethod::ExactAffine);
    }
    match face.feasible.witness() {
        Some(w) => {
            let r = gradient_rank(&active, w);
            (Dim::codim(k.n, r), DimMethod::Sampled)
        }
        None => (Dim::Finite(k.n), DimMethod::Unknown),
    }
}

fn gradient_rank(polys: &[&Polynomial], x: &[Rational]) -> usize {
    if polys.is_empty() {
        return 0;
    }
    let rows = polys
        .iter()
        .map(|p| p.gradient_vec().iter().map(|d| d.eval(x).expect("length checked")).collect())
        .collect();
    QMatrix::from_rows(rows).rank()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LicqOutcome {
    /// Evidence only: independence was checked at the given points.
    HoldsOnSamples,
    Violated(Vec<Rational>),
}

/// Rank the active gradients `{∇g_i, ∇h_j : i ∈ I(x)}` at each sample.
pub fn check_licq(k: &ConstraintSet, samples: &[Vec<Rational>]) -> Result<LicqOutcome> {
    for x in samples {
        let Some(active) = k.face_of(x)? else {
            return Err(Error::InvalidInput("LICQ sample point is not in K".into()));
        };
        let polys: Vec<&Polynomial> = active.iter().map(|&i| &k.g[i]).chain(&k.h).collect();
        if gradient_rank(&polys, x) < polys.len() {
            return Ok(LicqOutcome::Violated(x.clone()));
        }
    }
    Ok(LicqOutcome::HoldsOnSamples)
}

/// Box `[0, δ]ⁿ` helper used throughout tests and fixtures.
pub fn unit_box(n: usize) -> ConstraintSet {
    ConstraintSet::unit_box(n, int(1)).expect("positive width")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn half_plane() -> ConstraintSet {
        // x1 + x2 <= 0
        ConstraintSet::new(2, vec![Polynomial::affine(&[int(1), int(1)], int(0))], vec![]).unwrap()
    }

    #[test]
    fn half_plane_has_two_feasible_faces() {
        let faces = enumerate_faces(&half_plane(), &FaceConfig::default()).unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| matches!(f.feasible, Feasibility::Yes(_))));
        assert_eq!(faces[0].alpha, Vec::<usize>::new());
        assert_eq!(faces[0].face_dim, Dim::Finite(2));
        assert_eq!(faces[1].alpha, vec![0]);
        assert_eq!(faces[1].face_dim, Dim::Finite(1));
        assert_eq!(faces[1].feasible, Feasibility::Yes(vec![int(0), int(0)]));
    }

    #[test]
    fn whole_space_has_single_face() {
        let faces = enumerate_faces(&ConstraintSet::whole_space(3), &FaceConfig::default()).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].face_dim, Dim::Finite(3));
        assert_eq!(faces[0].dim_method, DimMethod::ExactAffine);
    }

    #[test]
    fn box_faces_split_nine_and_seven() {
        let faces = enumerate_faces(&unit_box(2), &FaceConfig::default()).unwrap();
        assert_eq!(faces.len(), 16);
        let feasible = faces.iter().filter(|f| matches!(f.feasible, Feasibility::Yes(_))).count();
        let empty = faces.iter().filter(|f| f.feasible == Feasibility::EmptyProven).count();
        assert_eq!((feasible, empty), (9, 7));
        let interior = &faces[0];
        assert_eq!(interior.face_dim, Dim::Finite(2));
        assert_eq!(interior.feasible, Feasibility::Yes(vec![rat(1, 2), rat(1, 2)]));
        let vertices = faces.iter().filter(|f| f.face_dim == Dim::Finite(0)).count();
        let edges = faces.iter().filter(|f| f.face_dim == Dim::Finite(1)).count();
        assert_eq!((vertices, edges), (4, 4));
    }

    #[test]
    fn contradictory_equalities_are_empty() {
        // x1 <= 0 and -x1 - 1 <= 0; both active means x1 = 0 and x1 = -1
        let k = ConstraintSet::new(
            1,
            vec![Polynomial::affine(&[int(1)], int(0)), Polynomial::affine(&[int(-1)], int(-1))],
            vec![],
        )
        .unwrap();
        let f = probe_feasibility(&[0, 1], &k, &FaceConfig::default(), 0);
        assert_eq!(f, Feasibility::EmptyProven);
    }

    #[test]
    fn over_budget_is_an_error() {
        let cfg = FaceConfig { face_budget: 3, ..FaceConfig::default() };
        assert_eq!(enumerate_faces(&unit_box(2), &cfg), Err(Error::FaceBudget { m: 4, budget: 3 }));
    }

    #[test]
    fn licq_examples() {
        assert_eq!(check_licq(&half_plane(), &[vec![int(0), int(0)]]).unwrap(), LicqOutcome::HoldsOnSamples);
        let orthant = ConstraintSet::orthant(2);
        assert_eq!(check_licq(&orthant, &[vec![int(0), int(0)]]).unwrap(), LicqOutcome::HoldsOnSamples);
        // x1^2 <= 0, -x1 <= 0
        let x1 = Polynomial::var(2, 0);
        let k = ConstraintSet::new(2, vec![&x1 * &x1, -&x1], vec![]).unwrap();
        let p = vec![int(0), int(5)];
        assert_eq!(check_licq(&k, &[p.clone()]).unwrap(), LicqOutcome::Violated(p));
        assert!(check_licq(&half_plane(), &[vec![int(1), int(1)]]).is_err());
    }

    #[test]
    fn nonlinear_face_found_on_grid() {
        // x1^2 + x2^2 - 1 <= 0: the circle face needs a rational point on it
        let n = 2;
        let x1 = Polynomial::var(n, 0);
        let x2 = Polynomial::var(n, 1);
        let g = &(&(&x1 * &x1) + &(&x2 * &x2)) - &Polynomial::one(n);
        let k = ConstraintSet::new(n, vec![g], vec![]).unwrap();
        let faces = enumerate_faces(&k, &FaceConfig::default()).unwrap();
        let circle = &faces[1];
        let w = circle.feasible.witness().expect("grid hits (±1,0) or (0,±1)");
        assert!(k.in_face(&[0], w).unwrap());
        assert_eq!(circle.face_dim, Dim::Finite(1));
        assert_eq!(circle.dim_method, DimMethod::Sampled);
    }

    #[test]
    fn equality_must_be_affine() {
        let x1 = Polynomial::var(1, 0);
        assert!(ConstraintSet::new(1, vec![], vec![&x1 * &x1]).is_err());
    }

    #[test]
    fn coordinate_bounds_read_off_the_box() {
        let b = ConstraintSet::unit_box(2, rat(3, 2)).unwrap().coordinate_bounds();
        assert_eq!(b, vec![(Some(0.0), Some(1.5)), (Some(0.0), Some(1.5))]);
    }
}
