use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Lattice coordinates in `[−1, 1]^d`, one row per point, last axis fastest.
///
/// For an image `dims = [height, width]`: point `r·width + c` has
/// coordinates `(y_r, x_c)`, matching row-major pixel order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateGrid {
    dims: Vec<usize>,
    coords: Vec<f64>,
}

impl CoordinateGrid {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Row-major `[n × d]`.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }
}

/// `i ↦ 2i/(n−1) − 1` per axis; single-point axes sit at 0.
pub fn axis(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                1.0
            } else {
                2.0 * i as f64 / (n - 1) as f64 - 1.0
            }
        })
        .collect()
}

/// Uniform lattice over `dims` (each at least 1).
pub fn build_grid(dims: &[usize]) -> CoordinateGrid {
    assert!(dims.iter().all(|&n| n >= 1), "grid dims must be positive: {dims:?}");
    let axes: Vec<Vec<f64>> = dims.iter().map(|&n| axis(n)).collect();
    let n: usize = dims.iter().product();
    let d = dims.len();
    let mut coords = Vec::with_capacity(n * d);
    let mut idx = vec![0usize; d];
    for _ in 0..n {
        coords.extend(idx.iter().zip(&axes).map(|(&i, a)| a[i]));
        for ax in (0..d).rev() {
            idx[ax] += 1;
            if idx[ax] < dims[ax] {
                break;
            }
            idx[ax] = 0;
        }
    }
    CoordinateGrid {
        dims: dims.to_vec(),
        coords,
    }
}

/// Independent sub-seed for a labelled purpose, from SHA-256 of `(seed, label)`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        assert_eq!(build_grid(&[3]).coords(), &[-1.0, 0.0, 1.0]);
        assert_eq!(build_grid(&[1]).coords(), &[0.0]);
        let g = build_grid(&[2, 2]);
        assert_eq!(g.coords(), &[-1.0, -1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0]);
        let g = build_grid(&[64, 64]);
        assert_eq!(g.len(), 4096);
        let min = g.coords().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = g.coords().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!((min, max), (-1.0, 1.0));
        assert!((g.point(1)[1] - g.point(0)[1] - 2.0 / 63.0).abs() < 1e-15);
        assert!((g.point(64)[0] - g.point(0)[0] - 2.0 / 63.0).abs() < 1e-15);
        assert_eq!(g.point(65), &[g.point(64)[0], g.point(1)[1]]);
    }

    #[test]
    fn three_d_ordering() {
        let g = build_grid(&[2, 3, 4]);
        assert_eq!(g.len(), 24);
        // last axis fastest
        assert_eq!(g.point(1), &[-1.0, -1.0, 2.0 / 3.0 - 1.0]);
        assert_eq!(g.point(4), &[-1.0, 0.0, -1.0]);
        assert_eq!(g.point(12), &[1.0, -1.0, -1.0]);
    }

    #[test]
    fn sub_seeds_are_distinct_and_stable() {
        assert_eq!(derive_seed(7, "mask"), derive_seed(7, "mask"));
        assert_ne!(derive_seed(7, "mask"), derive_seed(7, "noise"));
        assert_ne!(derive_seed(7, "mask"), derive_seed(8, "mask"));
    }
}
