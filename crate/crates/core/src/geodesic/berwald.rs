use nalgebra::{DMatrix, DVector};

use super::spray::spray;
use crate::error::{FinslerError, Result};
use crate::metric::FinslerMetric;

/// Least-squares residual of fitting each `Gᵏ(x, ·)` by a quadratic form
/// over the sample directions, normalized by the mean of `|G|`.
///
/// Vanishes (up to rounding) exactly when the spray is quadratic in `y` on
/// the samples, i.e. for Berwald metrics.
pub fn berwald_quadraticity_residual(
    metric: &FinslerMetric,
    x: &[f64],
    directions: &[Vec<f64>],
) -> Result<f64> {
    let n = metric.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    if directions.len() <= pairs.len() {
        return Err(FinslerError::InvalidRequest(format!(
            "need more than {} directions",
            pairs.len()
        )));
    }
    let design = DMatrix::from_fn(directions.len(), pairs.len(), |r, c| {
        directions[r][pairs[c].0] * directions[r][pairs[c].1]
    });
    let sprays = directions
        .iter()
        .map(|y| spray(metric, x, y).map(|g| g.coefficients))
        .collect::<Result<Vec<_>>>()?;
    let mean_g = sprays
        .iter()
        .map(|g| g.iter().map(|a| a * a).sum::<f64>().sqrt())
        .sum::<f64>()
        / sprays.len() as f64;
    if mean_g < 1e-300 {
        return Ok(0.0);
    }
    let svd = design.clone().svd(true, true);
    let mut sq = 0.0;
    for k in 0..n {
        let target = DVector::from_iterator(sprays.len(), sprays.iter().map(|g| g[k]));
        let coef = svd
            .solve(&target, 1e-14)
            .map_err(|e| FinslerError::Numerical(e.to_string()))?;
        sq += (&design * coef - target).norm_squared();
    }
    let rms = (sq / (sprays.len() * n) as f64).sqrt();
    Ok(rms / mean_g)
}
