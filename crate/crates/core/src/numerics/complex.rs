use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A complex number stored as a real/imaginary pair.
///
/// Every hidden-layer value and weight of the network is one of these.
/// Operations on a value whose imaginary part is zero reproduce the
/// corresponding real arithmetic exactly, which keeps the analytic
/// extensions in [`crate::activations`] bit-compatible with their real forms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    pub const ONE: Complex = Complex { re: 1.0, im: 0.0 };
    pub const I: Complex = Complex { re: 0.0, im: 1.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    #[inline]
    pub const fn real(re: f64) -> Self {
        Complex { re, im: 0.0 }
    }

    /// `r·e^{jθ}`.
    #[inline]
    pub fn from_polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Complex::new(r * c, r * s)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument in `(-π, π]`; `None` at the origin.
    pub fn phase(self) -> Option<f64> {
        if self.re == 0.0 && self.im == 0.0 {
            return None;
        }
        let p = self.im.atan2(self.re);
        // atan2(-0.0, x<0) yields -π
        Some(if p == -PI { PI } else { p })
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        Complex::new(self.re * k, self.im * k)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    #[inline]
    pub fn is_real(self) -> bool {
        self.im == 0.0
    }

    #[inline]
    pub fn recip(self) -> Self {
        Complex::ONE / self
    }

    #[inline]
    pub fn exp(self) -> Self {
        let r = self.re.exp();
        if self.im == 0.0 {
            return Complex::real(r);
        }
        let (s, c) = self.im.sin_cos();
        Complex::new(r * c, r * s)
    }

    /// `sin(x+iy) = sin x cosh y + i cos x sinh y`.
    #[inline]
    pub fn sin(self) -> Self {
        if self.im == 0.0 {
            return Complex::real(self.re.sin());
        }
        let (s, c) = self.re.sin_cos();
        Complex::new(s * self.im.cosh(), c * self.im.sinh())
    }

    /// `cos(x+iy) = cos x cosh y - i sin x sinh y`.
    #[inline]
    pub fn cos(self) -> Self {
        if self.im == 0.0 {
            return Complex::real(self.re.cos());
        }
        let (s, c) = self.re.sin_cos();
        Complex::new(c * self.im.cosh(), -(s * self.im.sinh()))
    }

    #[inline]
    pub fn square(self) -> Self {
        self * self
    }

    /// Largest absolute difference between the components.
    pub fn max_abs_diff(self, other: Complex) -> f64 {
        (self.re - other.re).abs().max((self.im - other.im).abs())
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{}-{}j", self.re, -self.im)
        } else {
            write!(f, "{}+{}j", self.re, self.im)
        }
    }
}

impl From<f64> for Complex {
    fn from(re: f64) -> Self {
        Complex::real(re)
    }
}

impl Add for Complex {
    type Output = Complex;
    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    #[inline]
    fn mul(self, o: Complex) -> Complex {
        if self.im == 0.0 && o.im == 0.0 {
            return Complex::real(self.re * o.re);
        }
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Mul<f64> for Complex {
    type Output = Complex;
    #[inline]
    fn mul(self, k: f64) -> Complex {
        self.scale(k)
    }
}

impl Div for Complex {
    type Output = Complex;
    /// Smith's algorithm; exact real division when both operands are real.
    #[inline]
    fn div(self, o: Complex) -> Complex {
        if o.im == 0.0 {
            return Complex::new(self.re / o.re, self.im / o.re);
        }
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let den = o.re + o.im * r;
            Complex::new((self.re + self.im * r) / den, (self.im - self.re * r) / den)
        } else {
            let r = o.re / o.im;
            let den = o.re * r + o.im;
            Complex::new((self.re * r + self.im) / den, (self.im * r - self.re) / den)
        }
    }
}

impl Div<f64> for Complex {
    type Output = Complex;
    #[inline]
    fn div(self, k: f64) -> Complex {
        Complex::new(self.re / k, self.im / k)
    }
}

impl Sub<Complex> for f64 {
    type Output = Complex;
    #[inline]
    fn sub(self, z: Complex) -> Complex {
        Complex::new(self - z.re, -z.im)
    }
}

impl Neg for Complex {
    type Output = Complex;
    #[inline]
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl AddAssign for Complex {
    #[inline]
    fn add_assign(&mut self, o: Complex) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl SubAssign for Complex {
    #[inline]
    fn sub_assign(&mut self, o: Complex) {
        self.re -= o.re;
        self.im -= o.im;
    }
}

impl MulAssign for Complex {
    #[inline]
    fn mul_assign(&mut self, o: Complex) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Complex {
    fn sum<I: Iterator<Item = Complex>>(iter: I) -> Complex {
        iter.fold(Complex::ZERO, |a, b| a + b)
    }
}
