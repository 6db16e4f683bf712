//! Projected Levenberg–Marquardt on a square KKT system.

use nalgebra::{DMatrix, DVector};

use super::compiled::FloatSystem;

/// Box on the unknowns; multipliers `λ` get `[0, ∞)`.
#[derive(Clone, Debug)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn project(&self, z: &mut [f64]) {
        for (v, (lo, hi)) in z.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LmConfig {
    pub max_iter: usize,
    /// Stop once the sup-norm residual drops below this.
    pub target: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig { max_iter: 200, target: 1e-13 }
    }
}

fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Returns the final point and its sup-norm residual.
pub fn solve(sys: &FloatSystem, z0: &[f64], bounds: &Bounds, cfg: &LmConfig) -> (Vec<f64>, f64) {
    let d = sys.dim;
    let mut z = z0.to_vec();
    bounds.project(&mut z);
    let mut r = sys.residual(&z);
    let mut cost = sq(&r);
    let mut damping = 1e-3;
    for _ in 0..cfg.max_iter {
        if !cost.is_finite() {
            break;
        }
        if sup(&r) <= cfg.target {
            break;
        }
        let j = DMatrix::from_row_slice(d, d, &sys.jacobian(&z));
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let scale = a.diagonal().iter().fold(1e-12f64, |m, v| m.max(*v));
        let mut improved = false;
        for _ in 0..12 {
            let mut m = a.clone();
            for i in 0..d {
                m[(i, i)] += damping * scale;
            }
            let Some(step) = m.cholesky().map(|c| c.solve(&(-&g))) else {
                damping *= 10.0;
                continue;
            };
            let mut cand: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            bounds.project(&mut cand);
            let rc = sys.residual(&cand);
            let cc = sq(&rc);
            if cc.is_finite() && cc < cost {
                let moved = cand.iter().zip(&z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                z = cand;
                r = rc;
                cost = cc;
                damping = (damping / 5.0).max(1e-15);
                improved = moved > 0.0;
                break;
            }
            damping *= 6.0;
        }
        if !improved {
            break;
        }
    }
    let res = sup(&r);
    (z, if res.is_finite() { res } else { f64::INFINITY })
}
