//! Membership tests for `Sol(K, F)` through the KKT conditions.

use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};

use super::compiled::FPoly;
use super::nnls::nnls;
use crate::error::{Error, Result};
use crate::linalg::{max_margin, LinearForm, QMatrix};
use crate::model::ProblemSpec;
use crate::poly::{Polynomial, Rational};

/// Constraints with `g_i(x) ≥ −ACTIVE_TOL` count as active.
pub const ACTIVE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub active: Vec<usize>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    /// Sup-norm residual of the stationarity equation.
    pub residual: f64,
}

/// `F`, `g`, `h` and their gradients compiled once for repeated checks.
#[derive(Clone, Debug)]
pub struct Verifier {
    n: usize,
    f: Vec<FPoly>,
    g: Vec<FPoly>,
    dg: Vec<Vec<FPoly>>,
    h: Vec<FPoly>,
    dh: Vec<Vec<FPoly>>,
}

impl Verifier {
    pub fn new(spec: &ProblemSpec) -> Self {
        let k = &spec.constraints;
        let grads = |p: &Polynomial| p.gradient_vec().iter().map(FPoly::new).collect::<Vec<_>>();
        Verifier {
            n: k.n(),
            f: spec.vi_map().iter().map(FPoly::new).collect(),
            g: k.g().iter().map(FPoly::new).collect(),
            dg: k.g().iter().map(grads).collect(),
            h: k.h().iter().map(FPoly::new).collect(),
            dh: k.h().iter().map(grads).collect(),
        }
    }

    /// Rebuild the active set, fit multipliers by NNLS and report the
    /// stationarity residual; `None` when `x` is outside `K` by more than `tol`.
    pub fn detail(&self, x: &[f64], tol: f64) -> Option<Verification> {
        let n = self.n;
        if x.len() != n || x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        if self.h.iter().any(|h| h.eval(x).abs() > tol) {
            return None;
        }
        let gv: Vec<f64> = self.g.iter().map(|g| g.eval(x)).collect();
        if gv.iter().any(|&v| v > tol) {
            return None;
        }
        let active: Vec<usize> = (0..gv.len()).filter(|&i| gv[i] >= -ACTIVE_TOL.max(tol)).collect();
        let eval = |d: &Vec<FPoly>| -> Vec<f64> { d.iter().map(|p| p.eval(x)).collect() };
        let mut cols: Vec<Vec<f64>> = active.iter().map(|&i| eval(&self.dg[i])).collect();
        for d in &self.dh {
            let gh = eval(d);
            cols.push(gh.iter().map(|v| -v).collect());
            cols.push(gh);
        }
        let a = DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r]);
        let b = DVector::from_iterator(n, self.f.iter().map(|p| -p.eval(x)));
        let z = nnls(&a, &b);
        let res = &a * &z - &b;
        let residual = res.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let na = active.len();
        let lambda = z.iter().take(na).copied().collect();
        let mu = (0..self.h.len()).map(|j| z[na + 2 * j + 1] - z[na + 2 * j]).collect();
        Some(Verification { active, lambda, mu, residual })
    }

    pub fn accepts(&self, x: &[f64], tol: f64) -> bool {
        self.detail(x, tol).is_some_and(|v| v.residual <= tol && v.lambda.iter().all(|&l| l >= -tol))
    }
}

pub fn verify_detail(spec: &ProblemSpec, x: &[f64], tol: f64) -> Option<Verification> {
    Verifier::new(spec).detail(x, tol)
}

/// Whether `x` solves the variational inequality to tolerance `tol`.
pub fn verify_solution(spec: &ProblemSpec, x: &[f64], tol: f64) -> bool {
    Verifier::new(spec).accepts(x, tol)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactCertificate {
    pub active: Vec<usize>,
    pub lambda: Vec<Rational>,
    pub mu: Vec<Rational>,
}

/// Exact KKT check at a rational point: `Some` carries multipliers with
/// `λ ≥ 0` solving the stationarity equation exactly.
pub fn exact_verify(spec: &ProblemSpec, x: &[Rational]) -> Result<Option<ExactCertificate>> {
    let k = &spec.constraints;
    let n = k.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let Some(active) = k.face_of(x)? else {
        return Ok(None);
    };
    let f: Vec<Rational> = spec.vi_map().iter().map(|p| p.eval(x)).collect::<Result<_>>()?;
    let polys: Vec<&Polynomial> = active.iter().map(|&i| &k.g()[i]).chain(k.h()).collect();
    if polys.is_empty() {
        return Ok(f.iter().all(Zero::is_zero).then(|| ExactCertificate { active, lambda: vec![], mu: vec![] }));
    }
    let grads: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| p.gradient_vec().iter().map(|d| d.eval(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let a = QMatrix::from_rows((0..n).map(|r| grads.iter().map(|g| g[r].clone()).collect()).collect());
    let rhs: Vec<Rational> = f.iter().map(|v| -v.clone()).collect();
    let Some(space) = a.solve_affine(&rhs) else {
        return Ok(None);
    };
    let na = active.len();
    let forms: Vec<LinearForm> = (0..na)
        .map(|i| {
            let mut coeffs = vec![Rational::zero(); polys.len()];
            coeffs[i] = -Rational::one();
            LinearForm { coeffs, constant: Rational::zero() }
        })
        .collect();
    let margin = max_margin(&space, &forms, &Rational::one());
    if margin.value.is_negative() {
        return Ok(None);
    }
    let mut mult = margin.point;
    let mu = mult.split_off(na);
    Ok(Some(ExactCertificate { active, lambda: mult, mu }))
}

/// Round each coordinate to a rational with denominator at most `max_den`
/// when one lies within `tol`.
pub fn near_rational(x: &[f64], max_den: i64, tol: f64) -> Option<Vec<Rational>> {
    x.iter()
        .map(|&v| {
            (1..=max_den).find_map(|q| {
                let p = (v * q as f64).round();
                ((v - p / q as f64).abs() < tol && p.abs() < 1e15)
                    .then(|| Rational::new((p as i64).into(), q.into()))
            })
        })
        .collect()
}
