//! Lawson–Hanson non-negative least squares.

use nalgebra::{DMatrix, DVector};

/// Minimise `‖A z − b‖₂` over `z ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut z = DVector::<f64>::zeros(n);
    if n == 0 {
        return z;
    }
    let mut passive = vec![false; n];
    let tol = 1e-12 * (1.0 + a.norm() * b.norm());
    for _ in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &z);
        let Some(j) = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j])) else {
            break;
        };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let s_p = restricted_lstsq(a, b, &idx);
            if s_p.iter().all(|&v| v > 0.0) {
                z.fill(0.0);
                for (k, &j) in idx.iter().enumerate() {
                    z[j] = s_p[k];
                }
                break;
            }
            // step back along z -> s until a passive entry hits zero
            let mut t = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if s_p[k] <= 0.0 {
                    let denom = z[j] - s_p[k];
                    if denom > 0.0 {
                        t = t.min(z[j] / denom);
                    }
                }
            }
            if !t.is_finite() {
                t = 0.0;
            }
            for (k, &j) in idx.iter().enumerate() {
                z[j] += t * (s_p[k] - z[j]);
            }
            for &j in &idx {
                if z[j] <= 1e-15 {
                    z[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    z
}

fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, idx: &[usize]) -> Vec<f64> {
    let sub = a.select_columns(idx);
    let svd = sub.svd(true, true);
    match svd.solve(b, 1e-13) {
        Ok(s) => s.iter().copied().collect(),
        Err(_) => vec![0.0; idx.len()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_optimum_is_kept() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let b = DVector::from_vec(vec![3.0, 4.0]);
        let z = nnls(&a, &b);
        assert!((z[0] - 3.0).abs() < 1e-12 && (z[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_direction_is_clipped() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![-1.0, 2.0]);
        let z = nnls(&a, &b);
        assert_eq!(z[0], 0.0);
        assert!((z[1] - 2.0).abs() < 1e-12);
    }
}
