//! Seeded random sampling of interior points, directions and flags.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::body::ConvexBody;
use crate::error::{FinslerError, Result};

/// Single seeded generator; all randomness in the crate goes through it.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.rng.random::<f64>()
    }

    pub fn gaussian(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.rng.sample(StandardNormal)).collect()
    }

    /// Uniform on the unit sphere.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let g = self.gaussian(n);
            let len = g.iter().map(|a| a * a).sum::<f64>().sqrt();
            if len > 1e-8 {
                return g.iter().map(|a| a / len).collect();
            }
        }
    }

    /// Uniform point of the inner region.
    pub fn point_in(&mut self, region: &InnerRegion) -> Vec<f64> {
        let n = region.center.len();
        loop {
            let u = self.unit_vector(n);
            let r = region.radius * self.rng.random::<f64>().powf(1.0 / n as f64);
            let x: Vec<f64> = region
                .center
                .iter()
                .zip(&u)
                .map(|(c, d)| c + r * d)
                .collect();
            if region.contains(&x) {
                return x;
            }
        }
    }

    /// Vector independent of `y` (Euclidean sine of the angle above 0.1).
    pub fn transverse(&mut self, y: &[f64]) -> Vec<f64> {
        let yn = y.iter().map(|a| a * a).sum::<f64>().sqrt();
        loop {
            let w = self.unit_vector(y.len());
            let c: f64 = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / yn;
            if 1.0 - c * c > 0.01 {
                return w;
            }
        }
    }
}

/// Homothetic copy `c + s·(U − c)` of a bounded body about its witness,
/// with a bounding radius for rejection sampling.
#[derive(Debug, Clone)]
pub struct InnerRegion {
    pub body: ConvexBody,
    pub center: Vec<f64>,
    pub scale: f64,
    pub radius: f64,
}

impl InnerRegion {
    /// The bounding radius is the largest scaled boundary distance over
    /// 2000 quasi-random directions, enlarged by 25%.
    pub fn new(body: &ConvexBody, scale: f64) -> Result<Self> {
        if !body.is_bounded() {
            return Err(FinslerError::UnboundedBody);
        }
        let center = body.witness();
        let n = center.len();
        let mut probe = Sampler::new(0x5eed);
        let mut rmax: f64 = 0.0;
        for k in 0..2000 + 2 * n {
            let d = if k < 2 * n {
                let mut e = vec![0.0; n];
                e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                e
            } else {
                probe.unit_vector(n)
            };
            rmax = rmax.max(body.ray_hit(&center, &d)?);
        }
        Ok(Self {
            body: body.clone(),
            center,
            scale,
            radius: 1.25 * scale * rmax,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let z: Vec<f64> = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| c + (a - c) / self.scale)
            .collect();
        self.body.contains(&z)
    }
}
