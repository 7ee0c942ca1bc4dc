use serde::Serialize;

use crate::numerics::Complex;

/// Fourier coefficients indexed `−half..=half`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoSided {
    half: usize,
    coeffs: Vec<Complex>,
}

impl TwoSided {
    pub fn zeros(half: usize) -> Self {
        TwoSided {
            half,
            coeffs: vec![Complex::ZERO; 2 * half + 1],
        }
    }

    /// `z_{±1} = amplitude/2`, the spectrum of `amplitude·cos(2πt)`.
    pub fn cosine(amplitude: f64) -> Self {
        let mut z = TwoSided::zeros(1);
        z.set(1, Complex::real(0.5 * amplitude));
        z.set(-1, Complex::real(0.5 * amplitude));
        z
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn get(&self, k: i64) -> Complex {
        if k.unsigned_abs() as usize > self.half {
            Complex::ZERO
        } else {
            self.coeffs[(k + self.half as i64) as usize]
        }
    }

    pub fn set(&mut self, k: i64, v: Complex) {
        assert!(k.unsigned_abs() as usize <= self.half, "index {k} beyond ±{}", self.half);
        self.coeffs[(k + self.half as i64) as usize] = v;
    }

    /// Indices with `|z_k| > tol`, ascending.
    pub fn support(&self, tol: f64) -> Vec<i64> {
        (-(self.half as i64)..=self.half as i64)
            .filter(|&k| self.get(k).modulus() > tol)
            .collect()
    }

    /// Largest `|k|` with `|z_k| > tol`.
    pub fn support_width(&self, tol: f64) -> usize {
        self.support(tol).iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Whether `z_{−k} = conj(z_k)` within `tol`.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        (0..=self.half as i64).all(|k| self.get(-k).max_abs_diff(self.get(k).conj()) <= tol)
    }

    /// Exact discrete convolution.
    pub fn convolve(&self, other: &TwoSided) -> TwoSided {
        let mut out = TwoSided::zeros(self.half + other.half);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex::ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }
}

/// A polynomial nonlinearity `Σ α_i x^i` applied to a band-limited signal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolySpectrum {
    pub alpha: Vec<f64>,
    pub input: TwoSided,
}

/// `z′ = Σ_i α_i·(z ⊛ … ⊛ z)`, the `i`-fold self-convolution weighted by `α_i`;
/// support is at most `K·M`.
pub fn post_activation_spectrum(ps: &PolySpectrum) -> TwoSided {
    let order = ps.alpha.len().saturating_sub(1);
    let mut out = TwoSided::zeros(order * ps.input.half);
    let mut power = TwoSided::zeros(0);
    power.set(0, Complex::ONE);
    for (i, &a) in ps.alpha.iter().enumerate() {
        if a != 0.0 {
            for k in -(power.half as i64)..=power.half as i64 {
                let v = out.get(k) + power.get(k).scale(a);
                out.set(k, v);
            }
        }
        if i < order {
            power = power.convolve(&ps.input);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activations::Activation;
    use crate::spectral::ChebyshevExpansion;
    use std::f64::consts::PI;

    /// Fourier coefficients of `p(cos 2πt)` from `samples` points, `|k| ≤ half`.
    fn time_domain(alpha: &[f64], samples: usize, half: usize) -> TwoSided {
        let values: Vec<f64> = (0..samples)
            .map(|s| {
                let x = (2.0 * PI * s as f64 / samples as f64).cos();
                alpha.iter().rev().fold(0.0, |acc, &a| acc * x + a)
            })
            .collect();
        let mut out = TwoSided::zeros(half);
        for k in -(half as i64)..=half as i64 {
            let c: Complex = values
                .iter()
                .enumerate()
                .map(|(s, &v)| Complex::from_polar(v, -2.0 * PI * (k as f64) * s as f64 / samples as f64))
                .sum();
            out.set(k, c.scale(1.0 / samples as f64));
        }
        out
    }

    #[test]
    fn cosine_squared() {
        let out = post_activation_spectrum(&PolySpectrum {
            alpha: vec![0.0, 0.0, 1.0],
            input: TwoSided::cosine(1.0),
        });
        assert_eq!(out.half(), 2);
        assert_eq!(out.get(0), Complex::real(0.5));
        assert_eq!(out.get(2), Complex::real(0.25));
        assert_eq!(out.get(-2), Complex::real(0.25));
        assert_eq!(out.get(1), Complex::ZERO);
        assert_eq!(out.get(-1), Complex::ZERO);
    }

    #[test]
    fn identity_keeps_input() {
        let mut z = TwoSided::zeros(3);
        z.set(2, Complex::new(0.3, -0.1));
        z.set(-2, Complex::new(0.3, 0.1));
        z.set(1, Complex::real(0.2));
        z.set(-1, Complex::real(0.2));
        let out = post_activation_spectrum(&PolySpectrum {
            alpha: vec![0.0, 1.0],
            input: z.clone(),
        });
        assert_eq!(out, z);
    }

    #[test]
    fn gaussian_polynomial_matches_time_domain() {
        let g = Activation::gaussian(3.0).unwrap();
        let e = ChebyshevExpansion::of_activation(&g, 512, 50).unwrap();
        let alpha: Vec<f64> = e.to_monomial(6).iter().map(|c| c.re).collect();
        let out = post_activation_spectrum(&PolySpectrum {
            alpha: alpha.clone(),
            input: TwoSided::cosine(1.0),
        });
        let oracle = time_domain(&alpha, 4096, 8);
        for k in -8..=8 {
            assert!(out.get(k).max_abs_diff(oracle.get(k)) < 1e-6, "k={k}");
        }
        assert!(out.is_conjugate_symmetric(1e-15));
    }

    #[test]
    fn support_grows_linearly_with_order() {
        for order in 1..=9 {
            let mut alpha = vec![0.0; order + 1];
            alpha[order] = 1.0;
            let out = post_activation_spectrum(&PolySpectrum {
                alpha,
                input: TwoSided::cosine(1.0),
            });
            assert_eq!(out.support_width(1e-14), order);
        }
    }
}
