//! Numeric sampling of `Sol(K, F)` and an empirical dimension estimate.
//!
//! Every non-empty pseudo-face gets its own square KKT system, solved from
//! random starts by projected Levenberg–Marquardt. Each accepted solution is
//! then perturbed and re-solved a few times: on a solution manifold the
//! re-solves spread along it, at an isolated root they collapse back and are
//! removed by deduplication. Local PCA over those clouds gives the estimate.

pub mod compiled;
pub mod lm;
pub mod nnls;
pub mod pca;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::kkt::build_phi;
use crate::model::{enumerate_faces, FaceConfig, Feasibility, ProblemSpec, PseudoFace};
use crate::poly::Polynomial;
use compiled::FloatSystem;
use lm::{Bounds, LmConfig};
use pca::{local_dimension, local_spectrum, PcaConfig};
pub use verify::{exact_verify, near_rational, verify_detail, verify_solution, ExactCertificate, Verification, Verifier};

#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Random starts per face.
    pub starts: usize,
    pub tol_accept: f64,
    pub tol_face: f64,
    pub seed: u64,
    pub box_radius: f64,
    pub dedup: f64,
    pub max_n: usize,
    /// Re-solves around each accepted solution.
    pub cloud: usize,
    pub cloud_radius: f64,
    /// Accepted solutions per face that get a cloud.
    pub cloud_bases: usize,
    pub max_iter: usize,
    pub knn: usize,
    pub gap_ratio: f64,
    pub neighbor_radius: f64,
    pub spread_floor: f64,
    /// Denominator bound for exact re-verification of near-rational samples.
    pub rational_den: i64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            starts: 200,
            tol_accept: 1e-9,
            tol_face: 1e-7,
            seed: 42,
            box_radius: 10.0,
            dedup: 1e-6,
            max_n: 8,
            cloud: 12,
            cloud_radius: 1e-2,
            cloud_bases: 40,
            max_iter: 200,
            knn: 12,
            gap_ratio: 100.0,
            neighbor_radius: 0.1,
            spread_floor: 1e-3,
            rational_den: 12,
        }
    }
}

impl OracleConfig {
    fn pca(&self) -> PcaConfig {
        PcaConfig { knn: self.knn, gap_ratio: self.gap_ratio, radius: self.neighbor_radius, spread_floor: self.spread_floor }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSample {
    pub x: Vec<f64>,
    /// Face the point lies on (active set at `tol_face`).
    pub alpha: Vec<usize>,
    /// Face whose KKT system produced it.
    pub solved_on: Vec<usize>,
    pub residual: f64,
    /// `(λ_α, μ)` fitted at the point.
    pub multipliers: Vec<f64>,
    /// Re-verified in exact arithmetic at a nearby small-height rational point.
    pub exact: bool,
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct FaceSolver<'a> {
    spec: &'a ProblemSpec,
    alpha: Vec<usize>,
    mask: u64,
    sys: FloatSystem,
    bounds: Bounds,
    /// Projector data for the affine equalities of the face: `(A, A⁺, b)`.
    span: Option<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)>,
    gs: Vec<compiled::FPoly>,
    verifier: &'a Verifier,
    cfg: &'a OracleConfig,
}

impl<'a> FaceSolver<'a> {
    fn new(spec: &'a ProblemSpec, face: &PseudoFace, mask: u64, verifier: &'a Verifier, cfg: &'a OracleConfig) -> Result<Self> {
        let k = &spec.constraints;
        let n = k.n();
        let map = build_phi(spec, &face.alpha)?;
        let sys = FloatSystem::new(&map);
        let cb = k.coordinate_bounds();
        let mut lo = Vec::with_capacity(sys.dim);
        let mut hi = Vec::with_capacity(sys.dim);
        for (l, h) in &cb {
            lo.push(l.unwrap_or(f64::NEG_INFINITY));
            hi.push(h.unwrap_or(f64::INFINITY));
        }
        lo.extend(std::iter::repeat_n(0.0, face.alpha.len()));
        hi.extend(std::iter::repeat_n(f64::INFINITY, face.alpha.len()));
        lo.extend(std::iter::repeat_n(f64::NEG_INFINITY, k.l()));
        hi.extend(std::iter::repeat_n(f64::INFINITY, k.l()));

        let eqs: Vec<(Vec<f64>, f64)> = face
            .alpha
            .iter()
            .map(|&i| &k.g()[i])
            .chain(k.h())
            .filter_map(Polynomial::affine_parts)
            .map(|(a, c)| (a.iter().map(crate::poly::to_f64).collect(), -crate::poly::to_f64(&c)))
            .collect();
        let span = if eqs.is_empty() {
            None
        } else {
            let a = DMatrix::from_fn(eqs.len(), n, |r, c| eqs[r].0[c]);
            let b = DVector::from_iterator(eqs.len(), eqs.iter().map(|e| e.1));
            let pinv = a.clone().pseudo_inverse(1e-12).map_err(|e| Error::Internal(e.into()))?;
            Some((a, pinv, b))
        };
        let gs = k.g().iter().map(compiled::FPoly::new).collect();
        Ok(FaceSolver { spec, alpha: face.alpha.clone(), mask, sys, bounds: Bounds { lo, hi }, span, gs, verifier, cfg })
    }

    fn project_x(&self, x: &mut [f64]) {
        if let Some((a, pinv, b)) = &self.span {
            let v = DVector::from_column_slice(x);
            let fixed = &v - pinv * (a * &v - b);
            x.copy_from_slice(fixed.as_slice());
        }
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.sys.n;
        let r = self.cfg.box_radius;
        let mut z = Vec::with_capacity(self.sys.dim);
        for i in 0..n {
            let lo = self.bounds.lo[i].max(-r);
            let hi = self.bounds.hi[i].min(r);
            z.push(if hi > lo { rng.random_range(lo..hi) } else { lo });
        }
        self.project_x(&mut z[..n]);
        for _ in 0..self.sys.nlam {
            z.push(rng.random_range(0.0..1.0));
        }
        while z.len() < self.sys.dim {
            z.push(rng.random_range(-1.0..1.0));
        }
        z
    }

    /// Solve from `z0` and keep the result if it passes every filter.
    fn attempt(&self, z0: &[f64]) -> Option<(Vec<f64>, SolutionSample)> {
        let lmc = LmConfig { max_iter: self.cfg.max_iter, ..LmConfig::default() };
        let (z, res) = lm::solve(&self.sys, z0, &self.bounds, &lmc);
        let tol = self.cfg.tol_accept;
        if res > tol {
            return None;
        }
        let n = self.sys.n;
        let x = &z[..n];
        for (i, g) in self.gs.iter().enumerate() {
            let v = g.eval(x);
            if v > tol || (self.alpha.contains(&i) && v.abs() > self.cfg.tol_face) {
                return None;
            }
        }
        if z[n..n + self.sys.nlam].iter().any(|&l| l < -tol) {
            return None;
        }
        let ver = self.verifier.detail(x, tol)?;
        if ver.residual > tol || ver.lambda.iter().any(|&l| l < -tol) {
            return None;
        }
        let alpha: Vec<usize> =
            self.gs.iter().enumerate().filter(|(_, g)| g.eval(x) >= -self.cfg.tol_face).map(|(i, _)| i).collect();
        let exact = near_rational(x, self.cfg.rational_den, 1e-9)
            .and_then(|q| exact_verify(self.spec, &q).ok().flatten())
            .is_some();
        let mut multipliers = ver.lambda.clone();
        multipliers.extend(&ver.mu);
        let s = SolutionSample { x: x.to_vec(), alpha, solved_on: self.alpha.clone(), residual: res, multipliers, exact };
        Some((z, s))
    }

    fn run(&self) -> Vec<SolutionSample> {
        let cfg = self.cfg;
        let bases: Vec<(Vec<f64>, SolutionSample)> = (0..cfg.starts)
            .into_par_iter()
            .filter_map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, self.mask, s as u64));
                self.attempt(&self.random_start(&mut rng))
            })
            .collect();
        let bases = dedup_pairs(bases, cfg.dedup);
        let noise = Normal::new(0.0, cfg.cloud_radius).expect("positive radius");
        let clouds: Vec<SolutionSample> = bases
            .par_iter()
            .take(cfg.cloud_bases)
            .enumerate()
            .flat_map_iter(|(b, (z, _))| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed ^ 0xC10D, self.mask, b as u64));
                let starts: Vec<Vec<f64>> = (0..cfg.cloud)
                    .map(|_| z.iter().map(|v| v + noise.sample(&mut rng)).collect())
                    .collect();
                starts.into_iter().filter_map(|s| self.attempt(&s).map(|p| p.1)).collect::<Vec<_>>()
            })
            .collect();
        bases.into_iter().map(|p| p.1).chain(clouds).collect()
    }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= tol)
}

fn dedup_pairs(items: Vec<(Vec<f64>, SolutionSample)>, tol: f64) -> Vec<(Vec<f64>, SolutionSample)> {
    let mut out: Vec<(Vec<f64>, SolutionSample)> = Vec::new();
    for it in items {
        if !out.iter().any(|o| close(&o.1.x, &it.1.x, tol)) {
            out.push(it);
        }
    }
    out
}

/// Drop samples within `tol` (sup-norm, in `x`) of an earlier one.
pub fn dedup(samples: Vec<SolutionSample>, tol: f64) -> Vec<SolutionSample> {
    let mut out: Vec<SolutionSample> = Vec::new();
    for s in samples {
        if !out.iter().any(|o| close(&o.x, &s.x, tol)) {
            out.push(s);
        }
    }
    out
}

/// Sample solutions over every face not proved empty.
pub fn sample_solutions(spec: &ProblemSpec, faces: &[PseudoFace], cfg: &OracleConfig) -> Result<Vec<SolutionSample>> {
    let n = spec.n();
    if n > cfg.max_n {
        return Err(Error::OracleGuard { n, limit: cfg.max_n });
    }
    let verifier = Verifier::new(spec);
    let mut all = Vec::new();
    for (mask, face) in faces.iter().enumerate() {
        if face.feasible == Feasibility::EmptyProven {
            continue;
        }
        let solver = FaceSolver::new(spec, face, mask as u64, &verifier, cfg)?;
        all.extend(solver.run());
    }
    Ok(dedup(all, cfg.dedup))
}

/// Enumerate faces with `face_cfg` and sample.
pub fn sample_problem(spec: &ProblemSpec, face_cfg: &FaceConfig, cfg: &OracleConfig) -> Result<Vec<SolutionSample>> {
    let faces = enumerate_faces(&spec.constraints, face_cfg)?;
    sample_solutions(spec, &faces, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Confidence {
    High,
    Low,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub value: Dim,
    pub confidence: Confidence,
    pub sample_count: usize,
    /// Mean normalised local spectrum of the face that sets the value.
    pub pca_spectrum: Vec<f64>,
    /// Local dimension counts over all samples.
    pub histogram: BTreeMap<usize, usize>,
    /// Per-face mode of the local dimensions.
    pub per_face: Vec<(Vec<usize>, usize)>,
}

/// Local dimension of every sample, computed within its face.
pub fn local_dimensions(samples: &[SolutionSample], cfg: &OracleConfig) -> Vec<(usize, Vec<f64>)> {
    let pc = cfg.pca();
    let mut groups: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        groups.entry(&s.alpha).or_default().push(i);
    }
    let mut out = vec![(0usize, Vec::new()); samples.len()];
    for idx in groups.values() {
        let pts: Vec<&[f64]> = idx.iter().map(|&i| samples[i].x.as_slice()).collect();
        let res: Vec<(usize, Vec<f64>)> = (0..pts.len())
            .into_par_iter()
            .map(|j| {
                let sp = local_spectrum(&pts, j, &pc);
                (local_dimension(&sp, &pc), sp)
            })
            .collect();
        for (j, r) in idx.iter().zip(res) {
            out[*j] = r;
        }
    }
    out
}

/// Mode of the local dimensions on each face, maximised over faces.
pub fn estimate_dimension(samples: &[SolutionSample], cfg: &OracleConfig) -> DimensionEstimate {
    if samples.is_empty() {
        return DimensionEstimate {
            value: Dim::NegInfinity,
            confidence: Confidence::Low,
            sample_count: 0,
            pca_spectrum: Vec::new(),
            histogram: BTreeMap::new(),
            per_face: Vec::new(),
        };
    }
    let locals = local_dimensions(samples, cfg);
    let mut histogram = BTreeMap::new();
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        *histogram.entry(locals[i].0).or_insert(0) += 1;
        groups.entry(s.alpha.clone()).or_default().push(i);
    }
    let mut per_face = Vec::new();
    let mut best: Option<(usize, f64, Vec<usize>)> = None;
    for (alpha, idx) in &groups {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in idx {
            *counts.entry(locals[i].0).or_insert(0) += 1;
        }
        // ties go to the smaller dimension
        let (&mode, &freq) = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).expect("non-empty group");
        per_face.push((alpha.clone(), mode));
        let share = freq as f64 / idx.len() as f64;
        let better = match &best {
            None => true,
            Some((d, s, _)) => mode > *d || (mode == *d && share > *s),
        };
        if better {
            best = Some((mode, share, idx.clone()));
        }
    }
    let (value, share, idx) = best.expect("non-empty samples");
    let n = samples[0].x.len();
    let mut spectrum = vec![0.0; n];
    for &i in &idx {
        let sp = &locals[i].1;
        let top = sp.first().copied().unwrap_or(0.0);
        if top > 0.0 {
            for (acc, v) in spectrum.iter_mut().zip(sp) {
                *acc += v / top / idx.len() as f64;
            }
        }
    }
    let confidence =
        if samples.len() < 5 * cfg.knn || share < 0.6 { Confidence::Low } else { Confidence::High };
    DimensionEstimate { value: Dim::Finite(value), confidence, sample_count: samples.len(), pca_spectrum: spectrum, histogram, per_face }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub center: Vec<f64>,
    pub size: usize,
}

/// Single-linkage clusters at distance `radius`.
pub fn clusters(samples: &[SolutionSample], radius: f64) -> Vec<Cluster> {
    let n = samples.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            l[r] = l[l[r]];
            r = l[r];
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if close(&samples[i].x, &samples[j].x, radius) {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut label, i);
        groups.entry(r).or_default().push(i);
    }
    groups
        .values()
        .map(|idx| {
            let d = samples[idx[0]].x.len();
            let center = (0..d).map(|c| idx.iter().map(|&i| samples[i].x[c]).sum::<f64>() / idx.len() as f64).collect();
            Cluster { center, size: idx.len() }
        })
        .collect()
}

/// One line per sample: coordinates, face (`;`-separated, 1-based) and residual.
pub fn samples_csv(samples: &[SolutionSample]) -> String {
    let n = samples.first().map_or(0, |s| s.x.len());
    let mut out = String::new();
    let head: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let _ = writeln!(out, "{},face,residual", head.join(","));
    for s in samples {
        let xs: Vec<String> = s.x.iter().map(|v| format!("{v:.12e}")).collect();
        let face: Vec<String> = s.alpha.iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(out, "{},{},{:.3e}", xs.join(","), face.join(";"), s.residual);
    }
    out
}
