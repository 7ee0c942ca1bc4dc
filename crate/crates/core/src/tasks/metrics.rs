use super::{ImageGrid, TasksError};

fn check(pred: &ImageGrid, gt: &ImageGrid) -> Result<(), TasksError> {
    if pred.same_shape(gt) {
        Ok(())
    } else {
        Err(TasksError::Shape(format!(
            "prediction {}x{}x{} vs ground truth {}x{}x{}",
            pred.height(),
            pred.width(),
            pred.channels(),
            gt.height(),
            gt.width(),
            gt.channels()
        )))
    }
}

/// Mean squared difference over every pixel and channel.
pub fn mse(pred: &ImageGrid, gt: &ImageGrid) -> Result<f64, TasksError> {
    check(pred, gt)?;
    let n = pred.pixels().len() as f64;
    Ok(pred.pixels().iter().zip(gt.pixels()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n)
}

/// `10·log10(peak²/mse)`, `+∞` for identical images.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub fn psnr(pred: &ImageGrid, gt: &ImageGrid) -> Result<f64, TasksError> {
    Ok(psnr_from_mse(mse(pred, gt)?, 1.0))
}

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

fn gaussian_taps() -> [f64; WINDOW] {
    let mut g = [0.0; WINDOW];
    let c = (WINDOW / 2) as f64;
    for (i, v) in g.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= s);
    g
}

/// Separable Gaussian filter over every position where the window fits.
fn filter_valid(x: &[f64], h: usize, w: usize, g: &[f64; WINDOW]) -> Vec<f64> {
    let (oh, ow) = (h + 1 - WINDOW, w + 1 - WINDOW);
    let mut rows = vec![0.0; h * ow];
    for r in 0..h {
        for c in 0..ow {
            rows[r * ow + c] = (0..WINDOW).map(|k| g[k] * x[r * w + c + k]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = (0..WINDOW).map(|k| g[k] * rows[(r + k) * ow + c]).sum();
        }
    }
    out
}

/// Mean local SSIM on the channel-averaged images: 11×11 Gaussian window
/// (σ = 1.5), `k₁ = 0.01`, `k₂ = 0.03`, dynamic range 1, valid positions only.
pub fn ssim(pred: &ImageGrid, gt: &ImageGrid) -> Result<f64, TasksError> {
    check(pred, gt)?;
    let (h, w) = (pred.height(), pred.width());
    if h < WINDOW || w < WINDOW {
        return Err(TasksError::Shape(format!("SSIM needs at least {WINDOW}x{WINDOW}, got {h}x{w}")));
    }
    let (x, y) = (pred.luminance(), gt.luminance());
    let (x, y) = (x.pixels(), y.pixels());
    let g = gaussian_taps();
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p * q).collect() };
    let mx = filter_valid(x, h, w, &g);
    let my = filter_valid(y, h, w, &g);
    let sxx = filter_valid(&prod(x, x), h, w, &g);
    let syy = filter_valid(&prod(y, y), h, w, &g);
    let sxy = filter_valid(&prod(x, y), h, w, &g);
    let (c1, c2) = ((K1 * K1), (K2 * K2));
    let total: f64 = (0..mx.len())
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cxy = sxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / mx.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::synthetic_texture;

    fn gray(h: usize, w: usize, f: impl Fn(usize, usize) -> f64) -> ImageGrid {
        let px = (0..h * w).map(|i| f(i / w, i % w)).collect();
        ImageGrid::new(h, w, 1, px).unwrap()
    }

    /// Direct 2-D window sums, no separability.
    fn ssim_reference(x: &ImageGrid, y: &ImageGrid) -> f64 {
        let (h, w) = (x.height(), x.width());
        let mut win = [[0.0; 11]; 11];
        let mut s = 0.0;
        for (i, row) in win.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
                *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
                s += *v;
            }
        }
        let mut acc = 0.0;
        let mut count = 0.0;
        for r in 0..=h - 11 {
            for c in 0..=w - 11 {
                let (mut ux, mut uy, mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for (i, row) in win.iter().enumerate() {
                    for (j, &wij) in row.iter().enumerate() {
                        let wgt = wij / s;
                        let a = x.get(r + i, c + j, 0);
                        let b = y.get(r + i, c + j, 0);
                        ux += wgt * a;
                        uy += wgt * b;
                        xx += wgt * a * a;
                        yy += wgt * b * b;
                        xy += wgt * a * b;
                    }
                }
                let (c1, c2) = (1e-4, 9e-4);
                let num = (2.0 * ux * uy + c1) * (2.0 * (xy - ux * uy) + c2);
                let den = (ux * ux + uy * uy + c1) * ((xx - ux * ux) + (yy - uy * uy) + c2);
                acc += num / den;
                count += 1.0;
            }
        }
        acc / count
    }

    #[test]
    fn mse_psnr_examples() {
        let z = ImageGrid::constant(4, 4, 3, 0.0).unwrap();
        let o = ImageGrid::constant(4, 4, 3, 1.0).unwrap();
        assert_eq!(mse(&z, &z).unwrap(), 0.0);
        assert_eq!(mse(&z, &o).unwrap(), 1.0);
        let a = ImageGrid::constant(4, 4, 3, 0.4).unwrap();
        let b = ImageGrid::constant(4, 4, 3, 0.5).unwrap();
        assert!((mse(&b, &a).unwrap() - 0.01).abs() < 1e-15);
        assert!((psnr_from_mse(0.01, 1.0) - 20.0).abs() < 1e-12);
        assert!((psnr_from_mse(1e-4, 1.0) - 40.0).abs() < 1e-12);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!(mse(&a, &ImageGrid::constant(4, 4, 1, 0.4).unwrap()).is_err());
        let mut last = f64::INFINITY;
        for m in [1e-6, 1e-4, 0.01, 0.5, 1.0] {
            let p = psnr_from_mse(m, 1.0);
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn ssim_examples() {
        let t = synthetic_texture(32, 3).luminance();
        assert!((ssim(&t, &t).unwrap() - 1.0).abs() < 1e-12);
        let bin = gray(24, 24, |r, c| ((r / 3 + c / 4) % 2) as f64);
        let inv = gray(24, 24, |r, c| 1.0 - bin.get(r, c, 0));
        assert!(ssim(&inv, &bin).unwrap() < 0.0);
        let half = gray(32, 32, |r, c| 0.5 * t.get(r, c, 0));
        let got = ssim(&half, &t).unwrap();
        assert!((got - ssim_reference(&half, &t)).abs() < 1e-10);
        assert!(ssim(&gray(8, 8, |_, _| 0.0), &gray(8, 8, |_, _| 0.0)).is_err());
    }
}
