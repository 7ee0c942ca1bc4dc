use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activations::{Activation, ParamKind};
use crate::numerics::Complex;

use super::config::{bounded_param, bounded_param_slope, InitScheme, NetworkConfig};
use super::kernel::{self, GradPlanes};
use super::linalg::{cgemm, CView};
use super::NetworkError;

/// Complex MLP with per-hidden-layer bounded activation parameters.
///
/// All real parameters live in one flat vector. Each linear layer occupies
/// `[W_re, W_im, b_re, b_im]` (row-major `fan_out × fan_in` weights), and the
/// unconstrained activation parameters `θ̂` follow after the last layer,
/// `learnable().len()` per hidden layer.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    shapes: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    act_offset: usize,
    kinds: Vec<ParamKind>,
    params: Vec<f64>,
}

/// Complex per-sample outputs of one hidden layer, after normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerTap {
    pub width: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Normalization scale applied to each sample.
    pub scale: Vec<f64>,
}

impl LayerTap {
    pub fn value(&self, row: usize, col: usize) -> Complex {
        let i = row * self.width + col;
        Complex::new(self.re[i], self.im[i])
    }

    /// Activation output before normalization.
    pub fn pre_normalization(&self, row: usize, col: usize) -> Complex {
        self.value(row, col).scale(self.scale[row])
    }
}

/// `z / max(1, max_i |z_i|)`.
pub fn normalize_layer(z: &[Complex]) -> Vec<Complex> {
    let s = z.iter().map(|v| v.modulus()).fold(1.0, f64::max);
    if s > 1.0 {
        z.iter().map(|v| *v / s).collect()
    } else {
        z.to_vec()
    }
}

struct Hidden {
    out_re: Vec<f64>,
    out_im: Vec<f64>,
    dz_re: Vec<f64>,
    dz_im: Vec<f64>,
    dp_re: Vec<Vec<f64>>,
    dp_im: Vec<Vec<f64>>,
    scale: Vec<f64>,
    arg: Vec<usize>,
}

struct Pass {
    hidden: Vec<Hidden>,
    output: Vec<f64>,
}

pub fn init_network(config: NetworkConfig) -> Result<Network, NetworkError> {
    config.validate()?;
    let mut shapes = Vec::with_capacity(config.depth);
    let mut fan_in = config.in_dim;
    for l in 0..config.depth {
        let fan_out = if l + 1 == config.depth {
            config.out_dim
        } else {
            config.width
        };
        shapes.push((fan_out, fan_in));
        fan_in = fan_out;
    }
    let mut offsets = Vec::with_capacity(shapes.len());
    let mut total = 0;
    for &(fo, fi) in &shapes {
        offsets.push(total);
        total += 2 * fo * fi + 2 * fo;
    }
    let kinds = config.learnable();
    let act_offset = total;
    total += kinds.len() * config.hidden_layers();

    let mut params = vec![0.0; total];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for (l, (&(fo, fi), &off)) in shapes.iter().zip(&offsets).enumerate() {
        let bound = match config.init {
            InitScheme::Uniform => (6.0 / fi as f64).sqrt(),
            InitScheme::Siren { .. } if l == 0 => 1.0 / fi as f64,
            InitScheme::Siren { omega0 } => (6.0 / fi as f64).sqrt() / omega0,
        };
        let n = fo * fi;
        for v in &mut params[off..off + n] {
            *v = rng.random_range(-bound..=bound);
        }
        if !config.real_weights {
            for v in &mut params[off + n..off + 2 * n] {
                *v = rng.random_range(-bound..=bound);
            }
        }
    }
    Ok(Network {
        config,
        shapes,
        offsets,
        act_offset,
        kinds,
        params,
    })
}

impl Network {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub(crate) fn set_params(&mut self, params: Vec<f64>) -> Result<(), NetworkError> {
        if params.len() != self.params.len() {
            return Err(NetworkError::ShapeMismatch {
                what: "parameter vector",
                expected: self.params.len(),
                got: params.len(),
            });
        }
        self.params = params;
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.shapes.len()
    }

    /// `(fan_out, fan_in)` of each linear layer.
    pub fn shapes(&self) -> &[(usize, usize)] {
        &self.shapes
    }

    /// Learnable activation parameters per hidden layer.
    pub fn learnable(&self) -> &[ParamKind] {
        &self.kinds
    }

    fn w_index(&self, layer: usize, row: usize, col: usize) -> usize {
        let (_, fi) = self.shapes[layer];
        self.offsets[layer] + row * fi + col
    }

    pub fn weight(&self, layer: usize, row: usize, col: usize) -> Complex {
        let (fo, fi) = self.shapes[layer];
        let i = self.w_index(layer, row, col);
        Complex::new(self.params[i], self.params[i + fo * fi])
    }

    pub fn set_weight(&mut self, layer: usize, row: usize, col: usize, w: Complex) {
        let (fo, fi) = self.shapes[layer];
        let i = self.w_index(layer, row, col);
        self.params[i] = w.re;
        self.params[i + fo * fi] = w.im;
    }

    pub fn bias(&self, layer: usize, row: usize) -> Complex {
        let (fo, fi) = self.shapes[layer];
        let i = self.offsets[layer] + 2 * fo * fi + row;
        Complex::new(self.params[i], self.params[i + fo])
    }

    pub fn set_bias(&mut self, layer: usize, row: usize, b: Complex) {
        let (fo, fi) = self.shapes[layer];
        let i = self.offsets[layer] + 2 * fo * fi + row;
        self.params[i] = b.re;
        self.params[i + fo] = b.im;
    }

    pub(crate) fn raw_index(&self, hidden: usize, k: usize) -> usize {
        self.act_offset + hidden * self.kinds.len() + k
    }

    /// Unconstrained `θ̂` of a hidden layer, in [`Self::learnable`] order.
    pub fn raw_activation_params(&self, hidden: usize) -> &[f64] {
        let start = self.raw_index(hidden, 0);
        &self.params[start..start + self.kinds.len()]
    }

    pub fn set_raw_activation_param(&mut self, hidden: usize, k: usize, v: f64) {
        let i = self.raw_index(hidden, k);
        self.params[i] = v;
    }

    /// Effective (bounded) activation parameters of a hidden layer.
    pub fn activation_params(&self, hidden: usize) -> Vec<f64> {
        self.kinds
            .iter()
            .zip(self.raw_activation_params(hidden))
            .map(|(&kind, &raw)| {
                let b = self.config.bounds.get(kind);
                bounded_param(raw, b.lo, b.hi).expect("bounds validated at construction")
            })
            .collect()
    }

    /// The activation a hidden layer applies, with its current parameters.
    pub fn layer_activation(&self, hidden: usize) -> Activation {
        self.config.activation.with_params(&self.activation_params(hidden))
    }

    /// Purely real computation: real weights and a real-valued activation.
    fn real_path(&self) -> bool {
        self.config.real_weights && self.config.activation.is_real_valued()
    }

    fn layer_views(&self, layer: usize) -> (CView<'_>, &[f64], &[f64]) {
        let (fo, fi) = self.shapes[layer];
        let off = self.offsets[layer];
        let n = fo * fi;
        let w_re = &self.params[off..off + n];
        let w_im = (!self.real_path()).then(|| &self.params[off + n..off + 2 * n]);
        let b_re = &self.params[off + 2 * n..off + 2 * n + fo];
        let b_im = &self.params[off + 2 * n + fo..off + 2 * n + 2 * fo];
        (CView::transposed(w_re, w_im, fi), b_re, b_im)
    }

    /// Checks a row-major `[n × in_dim]` coordinate block and returns `n`.
    pub fn check_coords(&self, coords: &[f64]) -> Result<usize, NetworkError> {
        let d = self.config.in_dim;
        if !coords.len().is_multiple_of(d) {
            return Err(NetworkError::ShapeMismatch {
                what: "coordinate block",
                expected: d * (coords.len() / d + 1),
                got: coords.len(),
            });
        }
        if let Some((i, &v)) = coords
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= 1.0))
        {
            return Err(NetworkError::CoordinateOutOfRange {
                row: i / d,
                col: i % d,
                value: v,
            });
        }
        Ok(coords.len() / d)
    }

    /// Real outputs `[n × out_dim]` for row-major coordinates in `[−1, 1]`.
    pub fn forward(&self, coords: &[f64]) -> Result<Vec<f64>, NetworkError> {
        let n = self.check_coords(coords)?;
        Ok(self.run(coords, n, false)?.output)
    }

    /// Outputs plus the normalized complex output of every hidden layer.
    pub fn forward_taps(&self, coords: &[f64]) -> Result<(Vec<f64>, Vec<LayerTap>), NetworkError> {
        let n = self.check_coords(coords)?;
        let pass = self.run(coords, n, false)?;
        let taps = pass
            .hidden
            .into_iter()
            .map(|h| LayerTap {
                width: self.config.width,
                re: h.out_re,
                im: h.out_im,
                scale: h.scale,
            })
            .collect();
        Ok((pass.output, taps))
    }

    fn run(&self, coords: &[f64], n: usize, keep_grads: bool) -> Result<Pass, NetworkError> {
        let depth = self.depth();
        let mut hidden: Vec<Hidden> = Vec::with_capacity(depth - 1);
        let real = self.real_path();
        for l in 0..depth {
            let (fo, fi) = self.shapes[l];
            let input = match hidden.last() {
                None => CView::rows(coords, None, fi),
                Some(h) => CView::rows(&h.out_re, (!real).then_some(&h.out_im[..]), fi),
            };
            let (w, b_re, b_im) = self.layer_views(l);
            let mut zr = vec![0.0; n * fo];
            let mut zi = vec![0.0; n * fo];
            cgemm(n, fi, fo, input, w, &mut zr, &mut zi);
            for (rr, ri) in zr.chunks_exact_mut(fo).zip(zi.chunks_exact_mut(fo)) {
                for o in 0..fo {
                    rr[o] += b_re[o];
                    ri[o] += b_im[o];
                }
            }
            if l + 1 == depth {
                return Ok(Pass { hidden, output: zr });
            }
            let h = match self.activate(l, n, zr, zi, keep_grads) {
                Ok(h) => h,
                Err((row, unit)) => {
                    let prev = hidden.last().map(|h| (&h.out_re[..], (!real).then_some(&h.out_im[..])));
                    let input = self.pre_activation(l, prev.unwrap_or((coords, None)), row, unit);
                    return Err(NetworkError::NonFinite { layer: l, row, input });
                }
            };
            hidden.push(h);
        }
        unreachable!("depth ≥ 2 guarantees an output layer")
    }

    /// Pre-activation `Σ_i W[unit][i]·x[row][i] + b[unit]` of one element,
    /// recomputed for error reports.
    fn pre_activation(&self, l: usize, input: (&[f64], Option<&[f64]>), row: usize, unit: usize) -> Complex {
        let fi = self.shapes[l].1;
        (0..fi).fold(self.bias(l, unit), |acc, i| {
            let x = Complex::new(input.0[row * fi + i], input.1.map_or(0.0, |im| im[row * fi + i]));
            acc + self.weight(l, unit, i) * x
        })
    }

    /// Activation and normalization of one hidden layer; `zr`/`zi` are reused
    /// as the output planes. Fails with the `(row, unit)` of the first
    /// non-finite value.
    fn activate(
        &self,
        l: usize,
        n: usize,
        mut zr: Vec<f64>,
        mut zi: Vec<f64>,
        keep_grads: bool,
    ) -> Result<Hidden, (usize, usize)> {
        let fo = self.config.width;
        let act = self.layer_activation(l);
        let np = if keep_grads { self.kinds.len() } else { 0 };
        let size = if keep_grads { n * fo } else { 0 };
        let mut h = Hidden {
            out_re: Vec::new(),
            out_im: Vec::new(),
            dz_re: vec![0.0; size],
            dz_im: vec![0.0; size],
            dp_re: vec![vec![0.0; size]; np],
            dp_im: vec![vec![0.0; size]; np],
            scale: vec![1.0; n],
            arg: vec![0; n],
        };
        kernel::apply(
            &act,
            &mut zr,
            &mut zi,
            keep_grads.then(|| GradPlanes {
                dz_re: &mut h.dz_re,
                dz_im: &mut h.dz_im,
                dp_re: &mut h.dp_re,
                dp_im: &mut h.dp_im,
            }),
        );
        for r in 0..n {
            let row = r * fo..(r + 1) * fo;
            let mut best = 0.0;
            let mut arg = 0;
            let mut finite = true;
            for (o, (a, b)) in zr[row.clone()].iter().zip(&zi[row.clone()]).enumerate() {
                let m2 = a * a + b * b;
                finite &= m2.is_finite();
                if m2 > best {
                    best = m2;
                    arg = o;
                }
            }
            if keep_grads {
                finite &= h.dz_re[row.clone()].iter().chain(&h.dz_im[row.clone()]).all(|v| v.is_finite());
            }
            if !finite {
                let bad = |i: &usize| {
                    let mut ok = zr[*i].is_finite() && zi[*i].is_finite();
                    if keep_grads {
                        ok &= h.dz_re[*i].is_finite() && h.dz_im[*i].is_finite();
                    }
                    !ok
                };
                let o = row.clone().find(bad).unwrap_or(row.start);
                return Err((r, o - row.start));
            }
            if best > 1.0 {
                let s = Complex::new(zr[r * fo + arg], zi[r * fo + arg]).modulus();
                if s > 1.0 {
                    for i in row {
                        zr[i] /= s;
                        zi[i] /= s;
                    }
                    h.scale[r] = s;
                    h.arg[r] = arg;
                }
            }
        }
        h.out_re = zr;
        h.out_im = zi;
        Ok(h)
    }

    /// Mean squared error over observed rows and all channels.
    pub fn loss(&self, coords: &[f64], targets: &[f64], mask: Option<&[bool]>) -> Result<f64, NetworkError> {
        let n = self.check_coords(coords)?;
        let weights = self.residual_weights(n, targets, mask)?;
        let out = self.run(coords, n, false)?.output;
        Ok(mse_masked(&out, targets, &weights, self.config.out_dim))
    }

    fn residual_weights(&self, n: usize, targets: &[f64], mask: Option<&[bool]>) -> Result<Vec<bool>, NetworkError> {
        let od = self.config.out_dim;
        if targets.len() != n * od {
            return Err(NetworkError::ShapeMismatch {
                what: "target block",
                expected: n * od,
                got: targets.len(),
            });
        }
        match mask {
            None => Ok(vec![true; n]),
            Some(m) if m.len() != n => Err(NetworkError::ShapeMismatch {
                what: "mask",
                expected: n,
                got: m.len(),
            }),
            Some(m) if !m.iter().any(|&b| b) => Err(NetworkError::EmptyMask),
            Some(m) => Ok(m.to_vec()),
        }
    }

    /// Loss and its gradient with respect to every real parameter.
    pub fn loss_and_grad(
        &self,
        coords: &[f64],
        targets: &[f64],
        mask: Option<&[bool]>,
    ) -> Result<(f64, Vec<f64>), NetworkError> {
        let n = self.check_coords(coords)?;
        let rows = self.residual_weights(n, targets, mask)?;
        let pass = self.run(coords, n, true)?;
        let od = self.config.out_dim;
        let loss = mse_masked(&pass.output, targets, &rows, od);
        let count = (rows.iter().filter(|&&b| b).count() * od) as f64;

        let mut grad = vec![0.0; self.params.len()];
        // dL/dRe(y); the imaginary readout never enters the loss
        let mut g_re: Vec<f64> = pass
            .output
            .iter()
            .zip(targets)
            .enumerate()
            .map(|(i, (y, t))| if rows[i / od] { 2.0 * (y - t) / count } else { 0.0 })
            .collect();
        let mut g_im: Option<Vec<f64>> = None;
        let real = self.real_path();

        for l in (0..self.depth()).rev() {
            let (fo, fi) = self.shapes[l];
            if l + 1 < self.depth() {
                let gi = g_im.get_or_insert_with(|| vec![0.0; n * fo]);
                self.activation_backward(l, &pass.hidden[l], &mut g_re, gi, &mut grad);
            }
            let gz_im = if real { None } else { g_im.as_deref() };
            let input = if l == 0 {
                CView::rows(coords, None, fi)
            } else {
                let h = &pass.hidden[l - 1];
                CView::rows(&h.out_re, (!real).then_some(&h.out_im[..]), fi)
            };
            let off = self.offsets[l];
            let nw = fo * fi;
            {
                let (gw_re, rest) = grad[off..off + 2 * nw + 2 * fo].split_at_mut(nw);
                let (gw_im, gb) = rest.split_at_mut(nw);
                cgemm(
                    fo,
                    n,
                    fi,
                    CView::transposed(&g_re, gz_im, fo),
                    input.conj(),
                    gw_re,
                    gw_im,
                );
                let (gb_re, gb_im) = gb.split_at_mut(fo);
                for r in 0..n {
                    for o in 0..fo {
                        gb_re[o] += g_re[r * fo + o];
                    }
                    if let Some(gi) = gz_im {
                        for o in 0..fo {
                            gb_im[o] += gi[r * fo + o];
                        }
                    }
                }
                if self.config.real_weights {
                    gw_im.iter_mut().for_each(|v| *v = 0.0);
                    gb_im.iter_mut().for_each(|v| *v = 0.0);
                }
            }
            if l > 0 {
                let w_re = &self.params[off..off + nw];
                let w_im = (!real).then(|| &self.params[off + nw..off + 2 * nw]);
                let mut gh_re = vec![0.0; n * fi];
                let mut gh_im = vec![0.0; n * fi];
                cgemm(
                    n,
                    fo,
                    fi,
                    CView::rows(&g_re, gz_im, fo),
                    CView::rows(w_re, w_im, fi).conj(),
                    &mut gh_re,
                    &mut gh_im,
                );
                g_re = gh_re;
                g_im = Some(gh_im);
            }
        }
        Ok((loss, grad))
    }

    /// Turns the gradient at a hidden layer's normalized output into the
    /// gradient at its pre-activation, accumulating `θ̂` gradients.
    fn activation_backward(&self, l: usize, h: &Hidden, g_re: &mut [f64], g_im: &mut [f64], grad: &mut [f64]) {
        let fo = self.config.width;
        let n = h.scale.len();
        let np = self.kinds.len();
        let mut acc = [0.0f64; 2];
        for r in 0..n {
            let row = r * fo..(r + 1) * fo;
            let s = h.scale[r];
            if s > 1.0 {
                let mut dot = 0.0;
                for i in row.clone() {
                    dot += g_re[i] * h.out_re[i] + g_im[i] * h.out_im[i];
                }
                let ds = -dot / s;
                for i in row.clone() {
                    g_re[i] /= s;
                    g_im[i] /= s;
                }
                let k = r * fo + h.arg[r];
                g_re[k] += ds * h.out_re[k];
                g_im[k] += ds * h.out_im[k];
            }
            for i in row {
                let (gr, gi) = (g_re[i], g_im[i]);
                for (k, a) in acc.iter_mut().enumerate().take(np) {
                    *a += h.dp_re[k][i] * gr + h.dp_im[k][i] * gi;
                }
                // conj(φ')·G
                let (dr, di) = (h.dz_re[i], h.dz_im[i]);
                g_re[i] = dr * gr + di * gi;
                g_im[i] = dr * gi - di * gr;
            }
        }
        for (k, &kind) in self.kinds.iter().enumerate() {
            let b = self.config.bounds.get(kind);
            let idx = self.raw_index(l, k);
            grad[idx] = acc[k] * bounded_param_slope(self.params[idx], b.lo, b.hi);
        }
    }
}

fn mse_masked(out: &[f64], targets: &[f64], rows: &[bool], od: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (r, keep) in rows.iter().enumerate() {
        if *keep {
            for c in 0..od {
                let d = out[r * od + c] - targets[r * od + c];
                sum += d * d;
            }
            count += od;
        }
    }
    sum / count as f64
}
