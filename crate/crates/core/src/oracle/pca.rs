//! Local principal-component analysis of a point cloud.

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Clone, Copy, Debug)]
pub struct PcaConfig {
    pub knn: usize,
    pub gap_ratio: f64,
    /// Neighbours farther than this are ignored.
    pub radius: f64,
    /// A neighbourhood whose standard deviation stays below this is a point.
    pub spread_floor: f64,
}

impl Default for PcaConfig {
    fn default() -> Self {
        PcaConfig { knn: 12, gap_ratio: 100.0, radius: 0.1, spread_floor: 1e-3 }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Covariance eigenvalues (descending) of point `i` and its nearest neighbours.
pub fn local_spectrum(points: &[&[f64]], i: usize, cfg: &PcaConfig) -> Vec<f64> {
    let n = points[i].len();
    let r2 = cfg.radius * cfg.radius;
    let mut near: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| (dist2(points[i], p), j))
        .filter(|&(d, _)| d <= r2)
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    near.truncate(cfg.knn);
    if near.len() < 2 {
        return vec![0.0; n];
    }
    let idx: Vec<usize> = std::iter::once(i).chain(near.iter().map(|&(_, j)| j)).collect();
    let k = idx.len() as f64;
    let mean: Vec<f64> = (0..n).map(|c| idx.iter().map(|&j| points[j][c]).sum::<f64>() / k).collect();
    let cov = DMatrix::from_fn(n, n, |a, b| {
        idx.iter().map(|&j| (points[j][a] - mean[a]) * (points[j][b] - mean[b])).sum::<f64>() / k
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Number of eigenvalues within `gap_ratio` of the largest.
pub fn local_dimension(spectrum: &[f64], cfg: &PcaConfig) -> usize {
    let top = spectrum.first().copied().unwrap_or(0.0);
    if top.sqrt() < cfg.spread_floor {
        return 0;
    }
    spectrum.iter().filter(|&&v| v >= top / cfg.gap_ratio).count()
}
