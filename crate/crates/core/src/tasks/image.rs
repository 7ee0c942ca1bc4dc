use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::TasksError;

/// Pixels in row-major order with channels interleaved; this is also the
/// `[n × channels]` target layout the network trains on.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    channels: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, channels: usize, pixels: Vec<f64>) -> Result<Self, TasksError> {
        let img = ImageGrid::unchecked(height, width, channels, pixels)?;
        if let Some(i) = img.pixels.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(TasksError::PixelRange {
                index: i,
                value: img.pixels[i],
            });
        }
        Ok(img)
    }

    /// Shape checks only; used for measurements that may exceed 1.
    fn unchecked(height: usize, width: usize, channels: usize, pixels: Vec<f64>) -> Result<Self, TasksError> {
        if height == 0 || width == 0 || !(channels == 1 || channels == 3) {
            return Err(TasksError::Shape(format!(
                "image must be non-empty with 1 or 3 channels, got {height}x{width}x{channels}"
            )));
        }
        if pixels.len() != height * width * channels {
            return Err(TasksError::Shape(format!(
                "{height}x{width}x{channels} image needs {} values, got {}",
                height * width * channels,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(TasksError::PixelRange {
                index: i,
                value: pixels[i],
            });
        }
        Ok(ImageGrid {
            height,
            width,
            channels,
            pixels,
        })
    }

    pub fn constant(height: usize, width: usize, channels: usize, value: f64) -> Result<Self, TasksError> {
        ImageGrid::new(height, width, channels, vec![value; height * width * channels])
    }

    /// Network outputs clamped into `[0, 1]`.
    pub fn from_prediction(height: usize, width: usize, channels: usize, values: &[f64]) -> Result<Self, TasksError> {
        ImageGrid::new(height, width, channels, values.iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.pixels[(row * self.width + col) * self.channels + ch]
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        (self.height, self.width, self.channels) == (other.height, other.width, other.channels)
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// Per-pixel channel mean, as a one-channel image.
    pub fn luminance(&self) -> ImageGrid {
        if self.channels == 1 {
            return self.clone();
        }
        let px = self
            .pixels
            .chunks_exact(self.channels)
            .map(|p| p.iter().sum::<f64>() / self.channels as f64)
            .collect();
        ImageGrid {
            height: self.height,
            width: self.width,
            channels: 1,
            pixels: px,
        }
    }

    /// `round(255·x)` with `x` clamped to `[0, 1]`.
    pub fn quantized(&self) -> Vec<u8> {
        self.pixels.iter().map(|&v| (255.0 * v.clamp(0.0, 1.0)).round() as u8).collect()
    }

    /// Binary pixmap (P6, maxval 255); one-channel images are replicated.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> Result<(), TasksError> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let q = self.quantized();
        if self.channels == 3 {
            out.write_all(&q)?;
        } else {
            let rgb: Vec<u8> = q.iter().flat_map(|&v| [v, v, v]).collect();
            out.write_all(&rgb)?;
        }
        Ok(())
    }

    pub fn save_ppm(&self, path: &Path) -> Result<(), TasksError> {
        let f = std::fs::File::create(path)?;
        self.write_ppm(std::io::BufWriter::new(f))
    }

    pub fn read_ppm<R: Read>(input: R) -> Result<Self, TasksError> {
        let mut r = BufReader::new(input);
        let magic = header_token(&mut r)?;
        if magic != "P6" {
            return Err(TasksError::Ppm(format!("expected P6, found {magic:?}")));
        }
        let mut num = |what: &str| -> Result<usize, TasksError> {
            let t = header_token(&mut r)?;
            t.parse().map_err(|_| TasksError::Ppm(format!("bad {what} {t:?}")))
        };
        let width = num("width")?;
        let height = num("height")?;
        let maxval = num("maxval")?;
        if maxval != 255 {
            return Err(TasksError::Ppm(format!("maxval {maxval} unsupported, need 255")));
        }
        let mut bytes = vec![0u8; width * height * 3];
        r.read_exact(&mut bytes)
            .map_err(|e| TasksError::Ppm(format!("truncated pixel data: {e}")))?;
        ImageGrid::new(height, width, 3, bytes.iter().map(|&b| b as f64 / 255.0).collect())
    }

    pub fn load_ppm(path: &Path) -> Result<Self, TasksError> {
        let f = std::fs::File::open(path).map_err(|e| TasksError::Open {
            path: path.display().to_string(),
            source: e,
        })?;
        ImageGrid::read_ppm(f)
    }
}

/// Next whitespace-delimited header token, skipping `#` comments; consumes
/// exactly one whitespace byte after the token.
fn header_token<R: BufRead>(r: &mut R) -> Result<String, TasksError> {
    let mut tok = String::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            return Err(TasksError::Ppm("unexpected end of header".into()));
        }
        let c = byte[0];
        if c == b'#' && tok.is_empty() {
            let mut skip = Vec::new();
            r.read_until(b'\n', &mut skip)?;
        } else if c.is_ascii_whitespace() {
            if !tok.is_empty() {
                return Ok(tok);
            }
        } else {
            tok.push(c as char);
        }
    }
}

/// `k × k` block means over the largest region divisible by `k`.
pub fn downsample(img: &ImageGrid, k: usize) -> Result<ImageGrid, TasksError> {
    if k == 0 || k > img.height || k > img.width {
        return Err(TasksError::Shape(format!(
            "factor {k} does not fit a {}x{} image",
            img.height, img.width
        )));
    }
    let (h, w, c) = (img.height / k, img.width / k, img.channels);
    let mut px = vec![0.0; h * w * c];
    let inv = 1.0 / (k * k) as f64;
    for r in 0..h {
        for col in 0..w {
            for ch in 0..c {
                let mut s = 0.0;
                for dr in 0..k {
                    for dc in 0..k {
                        s += img.get(r * k + dr, col * k + dc, ch);
                    }
                }
                px[(r * w + col) * c + ch] = s * inv;
            }
        }
    }
    ImageGrid::new(h, w, c, px)
}

/// Top-left `height × width` region.
pub fn crop(img: &ImageGrid, height: usize, width: usize) -> Result<ImageGrid, TasksError> {
    if height > img.height || width > img.width {
        return Err(TasksError::Shape(format!(
            "cannot crop {}x{} to {height}x{width}",
            img.height, img.width
        )));
    }
    let c = img.channels;
    let mut px = Vec::with_capacity(height * width * c);
    for r in 0..height {
        let start = r * img.width * c;
        px.extend_from_slice(&img.pixels[start..start + width * c]);
    }
    ImageGrid::unchecked(height, width, c, px)
}

/// Pixel replication by `k`, the naive baseline for super-resolution.
pub fn upsample_nearest(img: &ImageGrid, k: usize) -> ImageGrid {
    let (h, w, c) = (img.height * k, img.width * k, img.channels);
    let mut px = Vec::with_capacity(h * w * c);
    for r in 0..h {
        for col in 0..w {
            for ch in 0..c {
                px.push(img.get(r / k, col / k, ch));
            }
        }
    }
    ImageGrid::new(h, w, c, px).expect("replicated pixels stay in range")
}

/// Photon-limited measurement `(Poisson(λx) + Poisson(readout))/λ`, clamped
/// to `[0, 2]`. Pixel `i` draws from ChaCha stream `i` of `seed`, so the
/// result does not depend on evaluation order.
pub fn photon_noise(img: &ImageGrid, photons: f64, readout: f64, seed: u64) -> Result<ImageGrid, TasksError> {
    if !(photons > 0.0) || !(readout >= 0.0) {
        return Err(TasksError::Parameter(format!(
            "photons must be positive and readout non-negative, got {photons} and {readout}"
        )));
    }
    let draw = |rng: &mut ChaCha8Rng, lambda: f64| -> f64 {
        if lambda <= 0.0 {
            0.0
        } else {
            Poisson::new(lambda).expect("positive rate").sample(rng)
        }
    };
    let px = img
        .pixels
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let counts = draw(&mut rng, photons * x) + draw(&mut rng, readout);
            (counts / photons).clamp(0.0, 2.0)
        })
        .collect();
    ImageGrid::unchecked(img.height, img.width, img.channels, px)
}

/// Exactly `round(fraction·h·w)` observed pixels, drawn without replacement.
pub fn sample_mask(h: usize, w: usize, fraction: f64, seed: u64) -> Result<Vec<bool>, TasksError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(TasksError::Parameter(format!("mask fraction must lie in (0, 1], got {fraction}")));
    }
    let n = h * w;
    let count = ((fraction * n as f64).round() as usize).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = vec![false; n];
    for i in index::sample(&mut rng, n, count) {
        mask[i] = true;
    }
    Ok(mask)
}

/// Observed pixels kept, the rest set to 0.
pub fn apply_mask(img: &ImageGrid, mask: &[bool]) -> ImageGrid {
    let c = img.channels;
    let px = img
        .pixels
        .chunks_exact(c)
        .zip(mask)
        .flat_map(|(p, &m)| p.iter().map(move |&v| if m { v } else { 0.0 }))
        .collect();
    ImageGrid::new(img.height, img.width, c, px).expect("masking keeps range")
}

/// Random-phase texture with amplitude spectrum `1/|f|`, three channels
/// sharing most of their structure, rescaled into `[0.05, 0.95]`.
pub fn synthetic_texture(size: usize, seed: u64) -> ImageGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let kmax = (size / 2) as i64;
        let mut waves = Vec::new();
        for ky in 0..=kmax {
            for kx in -kmax..=kmax {
                if ky == 0 && kx <= 0 {
                    continue;
                }
                let f = ((kx * kx + ky * ky) as f64).sqrt();
                let phase = rng.random_range(0.0..2.0 * PI);
                waves.push((kx as f64, ky as f64, 1.0 / f, phase));
            }
        }
        let mut v = vec![0.0; size * size];
        // separable evaluation: cos(a + b) = cos a cos b − sin a sin b
        for &(kx, ky, amp, phase) in &waves {
            let cx: Vec<(f64, f64)> = (0..size)
                .map(|x| (2.0 * PI * kx * x as f64 / size as f64 + phase).sin_cos())
                .collect();
            let cy: Vec<(f64, f64)> = (0..size)
                .map(|y| (2.0 * PI * ky * y as f64 / size as f64).sin_cos())
                .collect();
            for (y, &(sy, cyv)) in cy.iter().enumerate() {
                let row = &mut v[y * size..(y + 1) * size];
                for (px, &(sx, cxv)) in row.iter_mut().zip(&cx) {
                    *px += amp * (cxv * cyv - sx * sy);
                }
            }
        }
        v
    };
    let shared = field(&mut rng);
    let tints: Vec<Vec<f64>> = (0..3).map(|_| field(&mut rng)).collect();
    let mut px = Vec::with_capacity(size * size * 3);
    for i in 0..size * size {
        for t in &tints {
            px.push(0.8 * shared[i] + 0.35 * t[i]);
        }
    }
    rescale(&mut px, 0.05, 0.95);
    ImageGrid::new(size, size, 3, px).expect("rescaled into range")
}

/// `0.5 + 0.5·cos(π·a·r²)` on the `[−1, 1]²` lattice with local frequency
/// `a·r` cycles per unit, one channel.
pub fn radial_chirp(size: usize, rate: f64) -> ImageGrid {
    let ax = super::axis(size);
    let mut px = Vec::with_capacity(size * size);
    for &y in &ax {
        for &x in &ax {
            px.push(0.5 + 0.5 * (PI * rate * (x * x + y * y)).cos());
        }
    }
    ImageGrid::new(size, size, 1, px).expect("cosine stays in range")
}

fn rescale(v: &mut [f64], lo: f64, hi: f64) {
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (max - min).max(f64::MIN_POSITIVE);
    for x in v {
        *x = lo + (hi - lo) * (*x - min) / span;
    }
}
