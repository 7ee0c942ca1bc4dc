use std::f64::consts::PI;

use serde::Serialize;

use crate::network::Network;
use crate::numerics::Complex;
use crate::tasks::CoordinateGrid;

use super::SpectralError;

const PARSEVAL_RTOL: f64 = 1e-9;

/// Direct 2-D DFT of an `h × w` row-major complex plane, row transform then
/// column transform, with no normalization.
pub fn dft2(h: usize, w: usize, re: &[f64], im: &[f64]) -> Vec<Complex> {
    assert_eq!(re.len(), h * w);
    assert_eq!(im.len(), h * w);
    let tw = |n: usize| -> Vec<Complex> { (0..n).map(|k| Complex::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)).collect() };
    let (tw_w, tw_h) = (tw(w), tw(h));
    let mut rows = vec![Complex::ZERO; h * w];
    for y in 0..h {
        for kx in 0..w {
            let mut acc = Complex::ZERO;
            for x in 0..w {
                acc += Complex::new(re[y * w + x], im[y * w + x]) * tw_w[(kx * x) % w];
            }
            rows[y * w + kx] = acc;
        }
    }
    let mut out = vec![Complex::ZERO; h * w];
    for ky in 0..h {
        for kx in 0..w {
            let mut acc = Complex::ZERO;
            for y in 0..h {
                acc += rows[y * w + kx] * tw_h[(ky * y) % h];
            }
            out[ky * w + kx] = acc;
        }
    }
    out
}

/// Magnitudes along the zero-vertical-frequency row, averaging `±kx`,
/// for `kx = 0..=w/2`.
pub fn horizontal_profile(w: usize, spectrum: &[Complex]) -> Vec<f64> {
    (0..=w / 2)
        .map(|k| 0.5 * (spectrum[k].modulus() + spectrum[(w - k) % w].modulus()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerSpectra {
    pub height: usize,
    pub width: usize,
    /// One neuron-averaged horizontal profile per hidden layer.
    pub profiles: Vec<Vec<f64>>,
    /// Largest relative Parseval mismatch over all neurons.
    pub parseval_error: f64,
}

impl LayerSpectra {
    /// Mean profile magnitude over bins `from..`, per layer.
    pub fn band_mean(&self, from: usize) -> Vec<f64> {
        self.profiles
            .iter()
            .map(|p| {
                let band = &p[from.min(p.len())..];
                band.iter().sum::<f64>() / band.len().max(1) as f64
            })
            .collect()
    }
}

/// Neuron-averaged DFT magnitude profile of every hidden layer over a 2-D raster.
pub fn layer_spectrum(net: &Network, grid: &CoordinateGrid) -> Result<LayerSpectra, SpectralError> {
    let (h, w) = match grid.dims() {
        &[h, w] if h >= 1 && w >= 1 => (h, w),
        dims => return Err(SpectralError::NonRaster(dims.to_vec())),
    };
    let (_, taps) = net.forward_taps(grid.coords())?;
    let mut profiles = Vec::with_capacity(taps.len());
    let mut parseval_error = 0.0f64;
    for tap in &taps {
        let mut profile = vec![0.0; w / 2 + 1];
        let mut plane_re = vec![0.0; h * w];
        let mut plane_im = vec![0.0; h * w];
        for neuron in 0..tap.width {
            for p in 0..h * w {
                plane_re[p] = tap.re[p * tap.width + neuron];
                plane_im[p] = tap.im[p * tap.width + neuron];
            }
            let spec = dft2(h, w, &plane_re, &plane_im);
            let spatial: f64 = plane_re.iter().zip(&plane_im).map(|(a, b)| a * a + b * b).sum();
            let spectral: f64 = spec.iter().map(|c| c.norm_sqr()).sum::<f64>() / (h * w) as f64;
            if spatial > 0.0 {
                parseval_error = parseval_error.max((spatial - spectral).abs() / spatial);
            }
            for (acc, v) in profile.iter_mut().zip(horizontal_profile(w, &spec)) {
                *acc += v;
            }
        }
        profile.iter_mut().for_each(|v| *v /= tap.width as f64);
        profiles.push(profile);
    }
    if parseval_error > PARSEVAL_RTOL {
        return Err(SpectralError::Parseval(parseval_error));
    }
    Ok(LayerSpectra {
        height: h,
        width: w,
        profiles,
        parseval_error,
    })
}
