//! Adaptive Gauss–Legendre quadrature.
//!
//! Each panel is integrated with a 10-point rule and compared with the sum
//! over its two halves; panels are bisected until the difference meets the
//! panel's share of the global tolerance.

use std::sync::OnceLock;

use crate::error::{FinslerError, Result};

const ORDER: usize = 10;

fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=ORDER {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 40,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (nodes, weights) = rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

/// Nodes of narrower panels are spaced at rounding resolution, so
/// bisecting further cannot reduce the error.
fn at_resolution(lo: f64, hi: f64) -> bool {
    (hi - lo).abs() <= 1e5 * f64::EPSILON * lo.abs().max(hi.abs())
}

/// `∫_a^b f`. Fails if a value is not finite or the depth limit is hit
/// without meeting the tolerance.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let whole = panel(&mut f, a, b)?;
    let tol = (opts.rel_tol * whole.abs()).max(opts.abs_tol);
    let mut total = 0.0;
    let mut stack = vec![(a, b, whole, 0u32)];
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let m = 0.5 * (lo + hi);
        let left = panel(&mut f, lo, m)?;
        let right = panel(&mut f, m, hi)?;
        let refined = left + right;
        if !refined.is_finite() {
            return Err(FinslerError::Numerical("non-finite integrand".into()));
        }
        let share = tol * ((hi - lo) / (b - a)).abs();
        if (refined - est).abs() <= share
            || (refined - est).abs() <= 1e-15 * refined.abs()
            || at_resolution(lo, hi)
        {
            total += refined;
        } else if depth >= opts.max_depth {
            return Err(FinslerError::Numerical(format!(
                "quadrature depth limit reached on [{lo}, {hi}]"
            )));
        } else {
            stack.push((m, hi, right, depth + 1));
            stack.push((lo, m, left, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_peaked_integrands() {
        let v = integrate(|x| Ok(x.powi(7)), 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((v - 32.0).abs() < 1e-12);
        // ∫_0^{0.999} dx/(1−x) = ln 1000.
        let v = integrate(
            |x| Ok(1.0 / (1.0 - x)),
            0.0,
            0.999,
            QuadOptions::with_rel_tol(1e-13),
        )
        .unwrap();
        assert!((v - 1000f64.ln()).abs() < 1e-11);
    }
}
