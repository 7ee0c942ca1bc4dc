//! Activation dictionary: ReLU, sine, Gaussian, sinc, raised cosine, and the
//! complex-sinusoid modulation wrapper.
//!
//! Every formula is extended analytically to complex arguments so that it can
//! act on the complex pre-activations of hidden layers. The raised cosine has
//! removable singularities at `z = 0` (sinc) and `z = ±T/(2β)` (cosine
//! fraction); both are evaluated through their limits.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numerics::{sinc, CVar, Complex, Var};

/// Threshold on `|1 − w²|` (`w = 2βz/T`) below which the cosine fraction is
/// replaced by its expansion around `w = ±1`.
const FRACTION_SERIES: f64 = 1e-8;

/// Band around `w = ±1` where the derivative of the cosine fraction is taken
/// from the cancellation-free form `(π/2)·sinc((1∓w)/2)/(1±w)`.
pub(crate) const FRACTION_STABLE_BAND: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ActivationError {
    #[error("invalid parameter for {activation}: {reason}")]
    InvalidParameter { activation: &'static str, reason: String },
    #[error("cosmo must wrap a non-cosmo base activation")]
    NestedModulation,
    #[error("relu is only defined for real input, got {0}")]
    ReluComplexInput(Complex),
    #[error("{spec} is not finite at {point}")]
    NonFinite { spec: String, point: Complex },
    #[error("{0} is complex-valued on the real axis")]
    NotRealValued(String),
    #[error("point {0} is not real")]
    NonRealPoint(Complex),
    #[error("expected a cosmo activation, got {0}")]
    NotModulated(String),
}

/// One activation family together with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Relu,
    /// `sin(ω₀ z)`.
    Sine { omega0: f64 },
    /// `exp(−(s z)²)`.
    Gaussian { scale: f64 },
    /// `sinc(s z)`.
    Sinc { scale: f64 },
    /// `(1/T)·sinc(z/T)·cos(πβz/T)/(1 − (2βz/T)²)`.
    RaisedCosine { bandwidth: f64, rolloff: f64 },
    /// `base(z)·exp(2πjζz)`.
    Cosmo { base: Box<Activation>, zeta: f64 },
}

/// A trainable activation parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    /// Raised-cosine bandwidth `T`.
    Bandwidth,
    /// Modulation frequency `ζ`.
    Zeta,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKind::Bandwidth => f.write_str("T"),
            ParamKind::Zeta => f.write_str("zeta"),
        }
    }
}

/// Value of an activation with its derivatives with respect to the input and
/// to each learnable parameter (in [`Activation::learnable`] order).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ActGrads {
    pub value: Complex,
    pub dz: Complex,
    pub dparams: [Complex; 2],
}

impl Activation {
    pub fn sine(omega0: f64) -> Result<Self, ActivationError> {
        Activation::Sine { omega0 }.validated()
    }

    pub fn gaussian(scale: f64) -> Result<Self, ActivationError> {
        Activation::Gaussian { scale }.validated()
    }

    pub fn sinc(scale: f64) -> Result<Self, ActivationError> {
        Activation::Sinc { scale }.validated()
    }

    pub fn raised_cosine(bandwidth: f64, rolloff: f64) -> Result<Self, ActivationError> {
        Activation::RaisedCosine { bandwidth, rolloff }.validated()
    }

    pub fn cosmo(base: Activation, zeta: f64) -> Result<Self, ActivationError> {
        Activation::Cosmo {
            base: Box::new(base),
            zeta,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, ActivationError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ActivationError> {
        let bad = |activation, reason: &str| {
            Err(ActivationError::InvalidParameter {
                activation,
                reason: reason.to_string(),
            })
        };
        match self {
            Activation::Relu => Ok(()),
            Activation::Sine { omega0 } if !omega0.is_finite() => bad("sine", "omega0 must be finite"),
            Activation::Sine { .. } => Ok(()),
            Activation::Gaussian { scale } | Activation::Sinc { scale } => {
                if scale.is_finite() && *scale > 0.0 {
                    Ok(())
                } else {
                    bad(self.family(), "scale must be positive")
                }
            }
            Activation::RaisedCosine { bandwidth, rolloff } => {
                if !(bandwidth.is_finite() && *bandwidth > 0.0) {
                    bad("raised_cosine", "T must be positive")
                } else if !(*rolloff > 0.0 && *rolloff <= 1.0) {
                    bad("raised_cosine", "beta must lie in (0, 1]")
                } else {
                    Ok(())
                }
            }
            Activation::Cosmo { base, zeta } => {
                if matches!(**base, Activation::Cosmo { .. }) {
                    return Err(ActivationError::NestedModulation);
                }
                if !(zeta.is_finite() && *zeta >= 0.0) {
                    return bad("cosmo", "zeta must be non-negative");
                }
                base.validate()
            }
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sine { .. } => "sine",
            Activation::Gaussian { .. } => "gaussian",
            Activation::Sinc { .. } => "sinc",
            Activation::RaisedCosine { .. } => "raised_cosine",
            Activation::Cosmo { .. } => "cosmo",
        }
    }

    /// True when the activation maps the real axis into the reals.
    pub fn is_real_valued(&self) -> bool {
        !matches!(self, Activation::Cosmo { .. })
    }

    /// The modulated base, or `self` when unmodulated.
    pub fn base(&self) -> &Activation {
        match self {
            Activation::Cosmo { base, .. } => base,
            other => other,
        }
    }

    /// Parameters a network may train for this activation.
    pub fn learnable(&self) -> Vec<ParamKind> {
        match self {
            Activation::RaisedCosine { .. } => vec![ParamKind::Bandwidth],
            Activation::Cosmo { base, .. } => {
                let mut p = base.learnable();
                p.push(ParamKind::Zeta);
                p
            }
            _ => Vec::new(),
        }
    }

    /// `learnable().len()` without allocating.
    pub fn learnable_count(&self) -> usize {
        match self {
            Activation::RaisedCosine { .. } => 1,
            Activation::Cosmo { base, .. } => base.learnable_count() + 1,
            _ => 0,
        }
    }

    pub fn param(&self, kind: ParamKind) -> Option<f64> {
        match (self, kind) {
            (Activation::RaisedCosine { bandwidth, .. }, ParamKind::Bandwidth) => Some(*bandwidth),
            (Activation::Cosmo { zeta, .. }, ParamKind::Zeta) => Some(*zeta),
            (Activation::Cosmo { base, .. }, k) => base.param(k),
            _ => None,
        }
    }

    /// Copy with the learnable parameters replaced (in [`Self::learnable`] order).
    pub fn with_params(&self, values: &[f64]) -> Activation {
        let mut out = self.clone();
        for (kind, &v) in self.learnable().iter().zip(values) {
            out.set_param(*kind, v);
        }
        out
    }

    fn set_param(&mut self, kind: ParamKind, v: f64) {
        match (self, kind) {
            (Activation::RaisedCosine { bandwidth, .. }, ParamKind::Bandwidth) => *bandwidth = v,
            (Activation::Cosmo { zeta, .. }, ParamKind::Zeta) => *zeta = v,
            (Activation::Cosmo { base, .. }, k) => base.set_param(k, v),
            _ => {}
        }
    }

    /// Activation value at a complex point.
    pub fn eval(&self, z: Complex) -> Result<Complex, ActivationError> {
        let v = match self {
            Activation::Relu => {
                if !z.is_real() {
                    return Err(ActivationError::ReluComplexInput(z));
                }
                Complex::real(z.re.max(0.0))
            }
            Activation::Sine { omega0 } => z.scale(*omega0).sin(),
            Activation::Gaussian { scale } => (-z.scale(*scale).square()).exp(),
            Activation::Sinc { scale } => complex_sinc(z.scale(*scale)),
            Activation::RaisedCosine { bandwidth, rolloff } => raised_cosine(z, *bandwidth, *rolloff),
            Activation::Cosmo { base, zeta } => base.eval(z)? * modulation(z, *zeta),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ActivationError::NonFinite {
                spec: self.to_string(),
                point: z,
            })
        }
    }

    /// Real-axis evaluation of a real-valued activation with plain `f64` math.
    pub fn eval_real(&self, x: f64) -> Result<f64, ActivationError> {
        let v = match self {
            Activation::Relu => x.max(0.0),
            Activation::Sine { omega0 } => (omega0 * x).sin(),
            Activation::Gaussian { scale } => {
                let sx = scale * x;
                (-(sx * sx)).exp()
            }
            Activation::Sinc { scale } => sinc(scale * x),
            Activation::RaisedCosine { bandwidth, rolloff } => {
                let u = x / bandwidth;
                let w = 2.0 * rolloff * x / bandwidth;
                let den = 1.0 - w * w;
                let frac = if den.abs() < FRACTION_SERIES {
                    let w0 = w.signum();
                    FRAC_PI_4 - (PI / 8.0) * w0 * (w - w0)
                } else {
                    (FRAC_PI_2 * w).cos() / den
                };
                sinc(u) * frac / bandwidth
            }
            Activation::Cosmo { .. } => return Err(ActivationError::NotRealValued(self.to_string())),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ActivationError::NonFinite {
                spec: self.to_string(),
                point: Complex::real(x),
            })
        }
    }

    /// Complex derivative `dφ/dz`. ReLU uses the subgradient 0 at the origin.
    pub fn eval_derivative(&self, z: Complex) -> Result<Complex, ActivationError> {
        if let Activation::Relu = self {
            if !z.is_real() {
                return Err(ActivationError::ReluComplexInput(z));
            }
        }
        let d = self.eval_grads(z).dz;
        if d.is_finite() {
            Ok(d)
        } else {
            Err(ActivationError::NonFinite {
                spec: self.to_string(),
                point: z,
            })
        }
    }

    /// Value plus input and parameter derivatives, sharing transcendental work.
    ///
    /// Unchecked: ReLU reads only the real part, and non-finite results are
    /// returned as-is for the caller to detect.
    pub fn eval_grads(&self, z: Complex) -> ActGrads {
        match self {
            Activation::Relu => ActGrads {
                value: Complex::real(z.re.max(0.0)),
                dz: Complex::real(if z.re > 0.0 { 1.0 } else { 0.0 }),
                ..Default::default()
            },
            Activation::Sine { omega0 } => {
                let (s, c) = sin_cos(z.scale(*omega0));
                ActGrads {
                    value: s,
                    dz: c.scale(*omega0),
                    ..Default::default()
                }
            }
            Activation::Gaussian { scale } => {
                let v = (-z.scale(*scale).square()).exp();
                ActGrads {
                    value: v,
                    dz: (z * v).scale(-2.0 * scale * scale),
                    ..Default::default()
                }
            }
            Activation::Sinc { scale } => {
                let (v, d) = sinc_and_derivative(z.scale(*scale));
                ActGrads {
                    value: v,
                    dz: d.scale(*scale),
                    ..Default::default()
                }
            }
            Activation::RaisedCosine { bandwidth, rolloff } => {
                let (value, dz) = raised_cosine_grads(z, *bandwidth, *rolloff);
                // φ(z; T) = F(z/T)/T  ⇒  ∂φ/∂T = −(φ + z·φ')/T
                let dt = -(value + z * dz) / *bandwidth;
                ActGrads {
                    value,
                    dz,
                    dparams: [dt, Complex::ZERO],
                }
            }
            Activation::Cosmo { base, zeta } => {
                let inner = base.eval_grads(z);
                let m = modulation(z, *zeta);
                let value = inner.value * m;
                let two_pi_j = Complex::new(0.0, 2.0 * PI);
                let dz = inner.dz * m + value * two_pi_j.scale(*zeta);
                let dzeta = value * two_pi_j * z;
                let mut dparams = [Complex::ZERO; 2];
                let n_base = base.learnable_count();
                for (d, g) in dparams.iter_mut().zip(&inner.dparams[..n_base]) {
                    *d = *g * m;
                }
                dparams[n_base] = dzeta;
                ActGrads { value, dz, dparams }
            }
        }
    }

    /// The activation recorded on a tape; `params` supplies the learnable
    /// parameters in [`Self::learnable`] order.
    pub fn eval_on_tape<'t>(&self, z: CVar<'t>, params: &[Var<'t>]) -> CVar<'t> {
        let tape = z.re.tape();
        match self {
            Activation::Relu => {
                // only meaningful on real input; mask by the recorded sign
                if z.re.value() > 0.0 {
                    CVar::new(z.re, tape.constant(0.0))
                } else {
                    CVar::new(tape.constant(0.0), tape.constant(0.0))
                }
            }
            Activation::Sine { omega0 } => z.scale_f(*omega0).sin(),
            Activation::Gaussian { scale } => {
                let sz = z.scale_f(*scale);
                (-(sz * sz)).exp()
            }
            Activation::Sinc { scale } => z.scale_f(*scale).sinc(),
            Activation::RaisedCosine { rolloff, bandwidth } => {
                let t = params.first().copied().unwrap_or_else(|| tape.constant(*bandwidth));
                let u = z / t;
                let w = z.scale_f(2.0 * rolloff) / t;
                let den = CVar::from_real(tape.constant(1.0)) - w * w;
                let frac = if den.value().modulus() < FRACTION_SERIES {
                    let w0 = w.value().re.signum();
                    let e = w.add_c(Complex::real(-w0));
                    e.scale_f(-(PI / 8.0) * w0).add_c(Complex::real(FRAC_PI_4))
                } else {
                    w.scale_f(FRAC_PI_2).cos() / den
                };
                (u.sinc() * frac) / t
            }
            Activation::Cosmo { base, zeta } => {
                let n_base = base.learnable().len();
                let inner = base.eval_on_tape(z, &params[..n_base.min(params.len())]);
                let zeta = params.get(n_base).copied().unwrap_or_else(|| tape.constant(*zeta));
                let k = zeta * (2.0 * PI);
                let m = CVar::new(-(z.im * k), z.re * k).exp();
                inner * m
            }
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Relu => f.write_str("relu"),
            Activation::Sine { omega0 } => write!(f, "sine(omega0={omega0})"),
            Activation::Gaussian { scale } => write!(f, "gaussian(s={scale})"),
            Activation::Sinc { scale } => write!(f, "sinc(s={scale})"),
            Activation::RaisedCosine { bandwidth, rolloff } => {
                write!(f, "raised_cosine(T={bandwidth},beta={rolloff})")
            }
            Activation::Cosmo { base, zeta } => write!(f, "cosmo({base},zeta={zeta})"),
        }
    }
}

/// `exp(2πjζz)`.
#[inline]
pub fn modulation(z: Complex, zeta: f64) -> Complex {
    let k = 2.0 * PI * zeta;
    Complex::new(-(k * z.im), k * z.re).exp()
}

/// Limit of `cos(πw/2)/(1 − w²)` at `w = ±1`.
pub const COSINE_FRACTION_LIMIT: f64 = FRAC_PI_4;

/// The cosine fraction `cos(πβx/T)/(1 − (2βx/T)²)` written in `w = 2βx/T`.
pub fn cosine_fraction(w: Complex) -> Complex {
    let den = Complex::ONE - w * w;
    if den.modulus() < FRACTION_SERIES {
        let w0 = w.re.signum();
        COSINE_FRACTION_LIMIT - (w - Complex::real(w0)).scale((PI / 8.0) * w0)
    } else {
        w.scale(FRAC_PI_2).cos() / den
    }
}

fn complex_sinc(u: Complex) -> Complex {
    let x = u.scale(PI);
    if x.modulus() < crate::numerics::SINC_SERIES {
        Complex::ONE - x.square() / 6.0
    } else {
        x.sin() / x
    }
}

fn raised_cosine(z: Complex, t: f64, beta: f64) -> Complex {
    let u = z / t;
    let w = z.scale(2.0 * beta) / t;
    complex_sinc(u) * cosine_fraction(w) / t
}

/// `(sin z, cos z)` from one `sin_cos` and one `exp`.
#[inline]
fn sin_cos(z: Complex) -> (Complex, Complex) {
    let (s, c) = z.re.sin_cos();
    if z.im == 0.0 {
        return (Complex::real(s), Complex::real(c));
    }
    let e = z.im.exp();
    let ei = 1.0 / e;
    let ch = 0.5 * (e + ei);
    let sh = 0.5 * (e - ei);
    (Complex::new(s * ch, c * sh), Complex::new(c * ch, -(s * sh)))
}

/// `(sinc(u), sinc'(u))` for complex `u`.
#[inline]
fn sinc_and_derivative(u: Complex) -> (Complex, Complex) {
    let x = u.scale(PI);
    let r = x.modulus();
    if r < 1e-4 {
        let x2 = x.square();
        let v = Complex::ONE - x2 / 6.0 + (x2 * x2) / 120.0;
        let d = (x.scale(-1.0 / 3.0) + x2 * x / 30.0).scale(PI);
        return (v, d);
    }
    let (s, c) = sin_cos(x);
    let inv = x.recip();
    let v = s * inv;
    // d/du sinc = π (x cos x − sin x)/x² = π (cos x − sinc)/x
    let d = ((c - v) * inv).scale(PI);
    (v, d)
}

/// `(H(w), H'(w))` for `H(w) = cos(πw/2)/(1 − w²)`.
#[inline]
fn fraction_and_derivative(w: Complex) -> (Complex, Complex) {
    let den = Complex::ONE - w * w;
    let dm = den.modulus();
    if dm < FRACTION_STABLE_BAND {
        // H(w) = H(σw) = (π/2)·sinc((1 − σw)/2)/(1 + σw), σ = sign(Re w)
        let sigma = if w.re >= 0.0 { 1.0 } else { -1.0 };
        let v = w.scale(sigma);
        let e = (Complex::ONE - v).scale(0.5);
        let (s, ds) = sinc_and_derivative(e);
        let inv = (Complex::ONE + v).recip();
        let value = if dm < FRACTION_SERIES {
            cosine_fraction(w)
        } else {
            (s * inv).scale(FRAC_PI_2)
        };
        let dv = (ds.scale(-0.5) * inv - s * inv * inv).scale(FRAC_PI_2);
        return (value, dv.scale(sigma));
    }
    let (s, c) = sin_cos(w.scale(FRAC_PI_2));
    let inv = den.recip();
    let value = c * inv;
    // H' = [−(π/2) sin(πw/2)(1 − w²) + 2w cos(πw/2)] / (1 − w²)²
    let d = (s.scale(-FRAC_PI_2) + (w * value).scale(2.0)) * inv;
    (value, d)
}

/// `(φ, φ')` for the raised cosine.
#[inline]
fn raised_cosine_grads(z: Complex, t: f64, beta: f64) -> (Complex, Complex) {
    let inv_t = 1.0 / t;
    let u = z.scale(inv_t);
    let k = 2.0 * beta * inv_t;
    let w = z.scale(k);
    let (s, ds) = sinc_and_derivative(u);
    let (h, dh) = fraction_and_derivative(w);
    let value = (s * h).scale(inv_t);
    let dz = (ds * h).scale(inv_t * inv_t) + (s * dh).scale(inv_t * k);
    (value, dz)
}

/// `max_x | |g(x)| − |base(x)| |` over real points for a modulated activation.
pub fn modulus_preservation_check(
    spec: &Activation,
    points: &[Complex],
) -> Result<f64, ActivationError> {
    let Activation::Cosmo { base, .. } = spec else {
        return Err(ActivationError::NotModulated(spec.to_string()));
    };
    let mut worst = 0.0f64;
    for &p in points {
        if !p.is_real() {
            return Err(ActivationError::NonRealPoint(p));
        }
        let g = spec.eval(p)?;
        let f = base.eval(p)?;
        worst = worst.max((g.modulus() - f.modulus()).abs());
    }
    Ok(worst)
}
