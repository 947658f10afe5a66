use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use super::Real;

/// Truncated Taylor value `v + d1·e1 + d2·e2 + d12·e1e2` with
/// `e1² = e2² = 0`.
///
/// For `f` smooth, `f(a + u·e1 + w·e2)` has `d12 = D²f(a)[u, w]`, so one
/// evaluation yields a mixed second directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorScalar<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
    pub d12: T,
}

/// Order-2 jet over reals.
pub type T1 = TaylorScalar<f64>;
/// Order-2 jet over order-2 jets: four nilpotent directions, order 4.
pub type T2 = TaylorScalar<T1>;

impl<T: Real> TaylorScalar<T> {
    pub fn new(v: T, d1: T, d2: T, d12: T) -> Self {
        Self { v, d1, d2, d12 }
    }

    /// Variable seeded with tangent `d1` in the first direction and `d2` in
    /// the second.
    pub fn variable(v: T, d1: T, d2: T) -> Self {
        Self {
            v,
            d1,
            d2,
            d12: T::zero(),
        }
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v`.
    #[inline]
    fn chain(self, f0: T, f1: T, f2: T) -> Self {
        Self {
            v: f0,
            d1: f1 * self.d1,
            d2: f1 * self.d2,
            d12: f1 * self.d12 + f2 * self.d1 * self.d2,
        }
    }
}

impl<T: Real> Add for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(
            self.v + r.v,
            self.d1 + r.d1,
            self.d2 + r.d2,
            self.d12 + r.d12,
        )
    }
}

impl<T: Real> Sub for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(
            self.v - r.v,
            self.d1 - r.d1,
            self.d2 - r.d2,
            self.d12 - r.d12,
        )
    }
}

impl<T: Real> Mul for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.v * r.v,
            self.v * r.d1 + self.d1 * r.v,
            self.v * r.d2 + self.d2 * r.v,
            self.v * r.d12 + self.d1 * r.d2 + self.d2 * r.d1 + self.d12 * r.v,
        )
    }
}

impl<T: Real> Div for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn div(self, r: Self) -> Self {
        self * r.recip()
    }
}

impl<T: Real> Neg for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2, -self.d12)
    }
}

impl<T: Real> Add<f64> for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn add(mut self, r: f64) -> Self {
        self.v = self.v + r;
        self
    }
}

impl<T: Real> Sub<f64> for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn sub(mut self, r: f64) -> Self {
        self.v = self.v - r;
        self
    }
}

impl<T: Real> Mul<f64> for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn mul(self, r: f64) -> Self {
        Self::new(self.v * r, self.d1 * r, self.d2 * r, self.d12 * r)
    }
}

impl<T: Real> Div<f64> for TaylorScalar<T> {
    type Output = Self;
    #[inline]
    fn div(self, r: f64) -> Self {
        self * (1.0 / r)
    }
}

impl<T: Real> AddAssign for TaylorScalar<T> {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl<T: Real> SubAssign for TaylorScalar<T> {
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl<T: Real> MulAssign for TaylorScalar<T> {
    fn mul_assign(&mut self, r: Self) {
        *self = *self * r;
    }
}

impl<T: Real> Real for TaylorScalar<T> {
    const JET: bool = true;

    fn cst(v: f64) -> Self {
        Self::new(T::cst(v), T::zero(), T::zero(), T::zero())
    }

    fn value(&self) -> f64 {
        self.v.value()
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let f1 = s.recip() * 0.5;
        let f2 = -f1 / (self.v * 2.0);
        self.chain(s, f1, f2)
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    fn ln(self) -> Self {
        let r = self.v.recip();
        self.chain(self.v.ln(), r, -(r * r))
    }

    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }

    fn tan(self) -> Self {
        let t = self.v.tan();
        let sec2 = t * t + 1.0;
        self.chain(t, sec2, t * sec2 * 2.0)
    }

    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }

    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::one(),
            1 => self,
            _ => {
                let p2 = self.v.powi(n - 2);
                let p1 = p2 * self.v;
                let nf = n as f64;
                self.chain(p1 * self.v, p1 * nf, p2 * (nf * (nf - 1.0)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(x: f64) -> T1 {
        T1::variable(x, 1.0, 1.0)
    }

    #[test]
    fn elementary_second_derivatives() {
        let x = 0.7;
        let cases: Vec<(T1, f64, f64, f64)> = vec![
            (
                var(x).sqrt(),
                x.sqrt(),
                0.5 / x.sqrt(),
                -0.25 * x.powf(-1.5),
            ),
            (var(x).exp(), x.exp(), x.exp(), x.exp()),
            (var(x).ln(), x.ln(), 1.0 / x, -1.0 / (x * x)),
            (var(x).sin(), x.sin(), x.cos(), -x.sin()),
            (var(x).cos(), x.cos(), -x.sin(), -x.cos()),
            (var(x).recip(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)),
            (var(x).powi(3), x.powi(3), 3.0 * x * x, 6.0 * x),
            (var(x).sinh(), x.sinh(), x.cosh(), x.sinh()),
        ];
        for (got, f0, f1, f2) in cases {
            assert!((got.v - f0).abs() < 1e-15);
            assert!((got.d1 - f1).abs() < 1e-14);
            assert!((got.d12 - f2).abs() < 1e-13, "{got:?} vs {f2}");
        }
    }

    #[test]
    fn nested_jet_gives_fourth_derivative() {
        // d⁴/dx⁴ of x^5 at 1.3 is 120·1.3.
        let x = 1.3;
        let inner = T1::variable(x, 1.0, 1.0);
        let z = T2::variable(inner, T1::cst(1.0), T1::cst(1.0));
        let r = z.powi(5);
        assert!((r.d12.d12 - 120.0 * x).abs() < 1e-12);
        assert!((r.d1.d12 - 60.0 * x * x).abs() < 1e-12);
    }
}
