use serde::{Deserialize, Serialize};

use crate::activations::{Activation, ParamKind};

use super::NetworkError;

/// Open interval `(lo, hi)` for a sigmoid-bounded parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Bounds { lo, hi }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains_strictly(&self, v: f64) -> bool {
        v > self.lo && v < self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub bandwidth: Bounds,
    pub zeta: Bounds,
}

impl ParamBounds {
    pub fn get(&self, kind: ParamKind) -> Bounds {
        match kind {
            ParamKind::Bandwidth => self.bandwidth,
            ParamKind::Zeta => self.zeta,
        }
    }
}

impl Default for ParamBounds {
    fn default() -> Self {
        ParamBounds {
            bandwidth: Bounds::new(0.0, 10.0),
            zeta: Bounds::new(0.0, 3.0),
        }
    }
}

/// Weight initialization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum InitScheme {
    /// Real and imaginary parts uniform in `±√(6/fan_in)`.
    Uniform,
    /// Sine-network scheme: first layer `±1/fan_in`, later layers
    /// `±√(6/fan_in)/ω₀`.
    Siren { omega0: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Number of linear layers, including the output layer.
    pub depth: usize,
    pub width: usize,
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub bounds: ParamBounds,
    /// Train `T`/`ζ` through the bounded projection. When off, the values in
    /// `activation` are used as fixed constants.
    pub learn_activation: bool,
    /// Keep every weight real (imaginary parts start and stay at zero for
    /// real-valued activations).
    pub real_weights: bool,
    pub init: InitScheme,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            depth: 5,
            width: 256,
            in_dim: 2,
            out_dim: 3,
            activation: Activation::Cosmo {
                base: Box::new(Activation::RaisedCosine {
                    bandwidth: 5.0,
                    rolloff: 0.05,
                }),
                zeta: 1.5,
            },
            bounds: ParamBounds::default(),
            learn_activation: true,
            real_weights: false,
            init: InitScheme::Uniform,
            seed: 0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if self.depth < 2 {
            return Err(NetworkError::InvalidConfig("depth must be at least 2".into()));
        }
        if self.width == 0 || self.in_dim == 0 || self.out_dim == 0 {
            return Err(NetworkError::InvalidConfig(
                "width, in_dim and out_dim must be positive".into(),
            ));
        }
        for (name, b) in [("T", self.bounds.bandwidth), ("zeta", self.bounds.zeta)] {
            if !(b.lo < b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
                return Err(NetworkError::InvalidConfig(format!(
                    "bounds for {name} need lo < hi, got ({}, {})",
                    b.lo, b.hi
                )));
            }
        }
        self.activation.validate()?;
        if matches!(self.activation.base(), Activation::Relu) && !self.real_weights {
            return Err(NetworkError::InvalidConfig(
                "relu needs real weights (it is undefined off the real axis)".into(),
            ));
        }
        if let InitScheme::Siren { omega0 } = self.init {
            if !(omega0 > 0.0) {
                return Err(NetworkError::InvalidConfig("siren omega0 must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn hidden_layers(&self) -> usize {
        self.depth - 1
    }

    /// Learnable activation parameters per hidden layer.
    pub fn learnable(&self) -> Vec<ParamKind> {
        if self.learn_activation {
            self.activation.learnable()
        } else {
            Vec::new()
        }
    }
}

/// `a + (b − a)·sigmoid(θ̂)`, strictly inside `(a, b)` for finite `θ̂`.
pub fn bounded_param(raw: f64, lo: f64, hi: f64) -> Result<f64, NetworkError> {
    if !(lo < hi) {
        return Err(NetworkError::InvalidBounds { lo, hi });
    }
    Ok(lo + (hi - lo) * sigmoid(raw))
}

/// Derivative of [`bounded_param`] with respect to `raw`.
pub(crate) fn bounded_param_slope(raw: f64, lo: f64, hi: f64) -> f64 {
    let s = sigmoid(raw);
    (hi - lo) * s * (1.0 - s)
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
