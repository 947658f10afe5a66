//! Small dense linear algebra over generic scalars.

use crate::ad::Real;
use crate::error::{FinslerError, Result};

/// Solves `A x = b` for symmetric positive-definite `A` by Cholesky.
/// A pivot that is not positive relative to the diagonal scale yields
/// [`FinslerError::SingularFundamentalTensor`].
pub fn spd_solve<S: Real>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i].value().abs()).fold(0.0, f64::max);
    let mut l = vec![vec![S::zero(); n]; n];
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d.value() > 1e-13 * scale) {
            return Err(FinslerError::SingularFundamentalTensor);
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / djj;
        }
    }
    let mut z = vec![S::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Ok(x)
}
