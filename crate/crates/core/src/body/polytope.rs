use nalgebra::{DMatrix, DVector};

use super::halfspace::HalfSpace;
use crate::ad::Real;
use crate::error::{FinslerError, Result};

/// Open polytope given as a finite intersection of half-spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    /// Facets with unit normals.
    pub halfspaces: Vec<HalfSpace>,
    witness: Vec<f64>,
    bounded: bool,
}

/// Relative gap below which two facet candidates count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

impl Polytope {
    pub fn new(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(FinslerError::InvalidBody(
                "polytope needs at least one facet".into(),
            ));
        }
        let n = halfspaces[0].dim();
        if halfspaces.iter().any(|h| h.dim() != n) {
            return Err(FinslerError::InvalidBody("facet dimensions differ".into()));
        }
        let hs: Vec<HalfSpace> = halfspaces.iter().map(HalfSpace::normalized).collect();
        for i in 0..hs.len() {
            for j in 0..i {
                let dn: f64 = hs[i]
                    .normal
                    .iter()
                    .zip(&hs[j].normal)
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                if dn < 1e-12
                    && (hs[i].offset - hs[j].offset).abs() < 1e-12 * (1.0 + hs[i].offset.abs())
                {
                    return Err(FinslerError::InvalidBody(format!(
                        "duplicate facets {j} and {i}"
                    )));
                }
            }
        }
        let bounded = recession_is_trivial(&hs);
        let witness = smooth_max_minimizer(&hs, None)?;
        if max_violation(&hs, &witness) >= 0.0 {
            return Err(FinslerError::InvalidBody(
                "polytope has empty interior".into(),
            ));
        }
        Ok(Self {
            halfspaces: hs,
            witness,
            bounded,
        })
    }

    pub fn dim(&self) -> usize {
        self.halfspaces[0].dim()
    }

    pub fn witness(&self) -> &[f64] {
        &self.witness
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) > 0.0)
    }

    /// Minimum over facets of `(τᵢ − ⟨νᵢ,x⟩)/⟨νᵢ,ξ⟩` with positive denominator.
    pub fn ray_hit(&self, x: &[f64], xi: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for h in &self.halfspaces {
            let den: f64 = h.normal.iter().zip(xi).map(|(a, b)| a * b).sum();
            if den > 0.0 {
                best = best.min(h.slack(x) / den);
            }
        }
        best
    }

    /// `max(0, maxᵢ ⟨νᵢ,ξ⟩/(τᵢ − ⟨νᵢ,x⟩))`, refusing jets at facet ties.
    pub fn inverse_hit<S: Real>(&self, x: &[S], xi: &[S]) -> Result<S> {
        let rates: Vec<S> = self.halfspaces.iter().map(|h| h.rate(x, xi)).collect();
        max_with_zero(&rates)
    }

    pub fn affine_image(&self, m: &DMatrix<f64>, b: &[f64]) -> Result<Self> {
        let minv_t = m
            .clone()
            .try_inverse()
            .ok_or_else(|| FinslerError::InvalidBody("affine map is singular".into()))?
            .transpose();
        let hs = self
            .halfspaces
            .iter()
            .map(|h| image_halfspace(h, &minv_t, b))
            .collect::<Result<Vec<_>>>()?;
        Polytope::new(hs)
    }
}

pub(crate) fn image_halfspace(
    h: &HalfSpace,
    minv_t: &DMatrix<f64>,
    b: &[f64],
) -> Result<HalfSpace> {
    let nu = minv_t * DVector::from_column_slice(&h.normal);
    let shift: f64 = nu.iter().zip(b).map(|(a, c)| a * c).sum();
    HalfSpace::new(nu.iter().copied().collect(), h.offset + shift)
}

/// Largest entry clipped below at zero; a jet is rejected when the top two
/// candidates (counting the zero floor) are within [`TIE_TOLERANCE`].
pub(crate) fn max_with_zero<S: Real>(rates: &[S]) -> Result<S> {
    let mut order: Vec<usize> = (0..rates.len()).collect();
    order.sort_by(|&a, &b| rates[b].value().total_cmp(&rates[a].value()));
    let top = rates[order[0]];
    if top.value() <= 0.0 {
        if S::JET
            && top.value().abs()
                <= TIE_TOLERANCE * rates.iter().map(|r| r.value().abs()).fold(1e-300, f64::max)
        {
            return Err(FinslerError::NonSmoothPoint(
                "direction tangent to a facet".into(),
            ));
        }
        return Ok(S::zero());
    }
    if S::JET {
        let scale = top.value().abs();
        if order.len() > 1 && (top.value() - rates[order[1]].value()).abs() <= TIE_TOLERANCE * scale
        {
            return Err(FinslerError::NonSmoothPoint(format!(
                "facets {} and {} tie",
                order[0], order[1]
            )));
        }
        if top.value() <= TIE_TOLERANCE * scale {
            return Err(FinslerError::NonSmoothPoint(
                "direction tangent to a facet".into(),
            ));
        }
    }
    Ok(top)
}

fn max_violation(hs: &[HalfSpace], x: &[f64]) -> f64 {
    hs.iter()
        .map(|h| -h.slack(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The recession cone `{d : ⟨νᵢ,d⟩ ≤ 0 ∀i}` is `{0}`.
///
/// A nonzero recession cone contains either a line (normals do not span)
/// or an extreme ray cut out by `n − 1` active facets, so enumerating those
/// subsets decides boundedness exactly.
fn recession_is_trivial(hs: &[HalfSpace]) -> bool {
    let n = hs[0].dim();
    let m = hs.len();
    let normals = DMatrix::from_fn(m, n, |i, j| hs[i].normal[j]);
    if normals.rank(1e-10) < n {
        return false;
    }
    let admissible = |d: &DVector<f64>| {
        let s = d.norm();
        s > 0.0
            && hs.iter().all(|h| {
                h.normal
                    .iter()
                    .zip(d.iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    <= 1e-10 * s
            })
    };
    if n == 1 {
        return !admissible(&DVector::from_element(1, 1.0))
            && !admissible(&DVector::from_element(1, -1.0));
    }
    let k = n - 1;
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let rows = DMatrix::from_fn(k, n, |r, j| hs[subset[r]].normal[j]);
        if rows.rank(1e-10) == k {
            let d = null_vector(&rows);
            if admissible(&d) || admissible(&(-&d)) {
                return false;
            }
        }
        match (0..k).rev().find(|&i| subset[i] < m - k + i) {
            Some(i) => {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
            }
            None => return true,
        }
    }
}

fn null_vector(rows: &DMatrix<f64>) -> DVector<f64> {
    let n = rows.ncols();
    let mut square = DMatrix::zeros(n, n);
    square.view_mut((0, 0), (n - 1, n)).copy_from(rows);
    let svd = square.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (imin, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
            );
    vt.row(imin).transpose()
}

/// Approximate Chebyshev-style center: minimizer of a log-sum-exp of the
/// facet violations, by damped Newton with increasing sharpness.
///
/// With `beta = Some(β)` the sharpness is fixed and the result minimizes the
/// corresponding smooth gauge.
pub(crate) fn smooth_max_minimizer(hs: &[HalfSpace], beta: Option<f64>) -> Result<Vec<f64>> {
    let n = hs[0].dim();
    let scale = hs.iter().map(|h| h.offset.abs()).fold(1.0, f64::max);
    let schedule: Vec<f64> = match beta {
        Some(b) => vec![b],
        None => vec![1.0 / scale, 10.0 / scale, 100.0 / scale, 1000.0 / scale],
    };
    let mut x = vec![0.0; n];
    for &b in &schedule {
        for _ in 0..100 {
            let (val, grad, hess) = lse_with_derivatives(hs, &x, b);
            let reg = DMatrix::identity(n, n) * (1e-10 * b);
            let step = match (hess + reg).cholesky() {
                Some(ch) => ch.solve(&DVector::from_column_slice(&grad)),
                None => DVector::from_column_slice(&grad),
            };
            let cap = 10.0 * scale;
            let len = step.norm();
            let step = if len > cap { step * (cap / len) } else { step };
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-12 {
                let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
                if lse_with_derivatives(hs, &cand, b).0
                    <= val - 1e-4 * t * step.dot(&DVector::from_column_slice(&grad))
                {
                    x = cand;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted || t * len < 1e-13 * scale {
                break;
            }
            // Unbounded bodies: any interior point will do once far inside.
            if max_violation(hs, &x) < -cap {
                break;
            }
        }
    }
    Ok(x)
}

/// Value, gradient and Hessian of `(1/β) log Σ exp(β(⟨νᵢ,x⟩ − τᵢ))`.
pub(crate) fn lse_with_derivatives(
    hs: &[HalfSpace],
    x: &[f64],
    beta: f64,
) -> (f64, Vec<f64>, DMatrix<f64>) {
    let n = x.len();
    let a: Vec<f64> = hs.iter().map(|h| -h.slack(x)).collect();
    let m = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = a.iter().map(|ai| (beta * (ai - m)).exp()).collect();
    let s: f64 = w.iter().sum();
    let val = m + s.ln() / beta;
    let mut mean = vec![0.0; n];
    for (h, wi) in hs.iter().zip(&w) {
        for j in 0..n {
            mean[j] += wi / s * h.normal[j];
        }
    }
    let mut hess = DMatrix::zeros(n, n);
    for (h, wi) in hs.iter().zip(&w) {
        let p = wi / s;
        for i in 0..n {
            for j in 0..n {
                hess[(i, j)] += beta * p * (h.normal[i] - mean[i]) * (h.normal[j] - mean[j]);
            }
        }
    }
    (val, mean, hess)
}
