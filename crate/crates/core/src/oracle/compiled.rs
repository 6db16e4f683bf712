//! Polynomials flattened to `f64` term lists for fast repeated evaluation.

use crate::kkt::KktMap;
use crate::poly::{to_f64, Polynomial};

#[derive(Clone, Debug)]
pub struct FPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl FPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let pw = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (to_f64(c), pw)
            })
            .collect();
        FPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

/// A square KKT system `Φ_α(z) = 0` with its Jacobian, in floats.
#[derive(Clone, Debug)]
pub struct FloatSystem {
    pub n: usize,
    pub nlam: usize,
    pub dim: usize,
    comps: Vec<FPoly>,
    jac: Vec<FPoly>,
}

impl FloatSystem {
    pub fn new(map: &KktMap) -> Self {
        let comps = map.components.iter().map(FPoly::new).collect();
        let jac = map.jac.entries().iter().map(FPoly::new).collect();
        FloatSystem { n: map.n, nlam: map.alpha.len(), dim: map.total_vars, comps, jac }
    }

    pub fn residual(&self, z: &[f64]) -> Vec<f64> {
        self.comps.iter().map(|c| c.eval(z)).collect()
    }

    /// Row-major Jacobian.
    pub fn jacobian(&self, z: &[f64]) -> Vec<f64> {
        self.jac.iter().map(|c| if c.is_zero() { 0.0 } else { c.eval(z) }).collect()
    }
}
