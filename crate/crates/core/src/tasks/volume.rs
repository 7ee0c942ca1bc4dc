use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{axis, TasksError};

pub const VOLUME_MAGIC: &[u8; 8] = b"COSMOVOL";

/// Cubic grid of occupancy values; voxel `(i, j, k)` sits at index
/// `(i·D + j)·D + k`, the same order as `build_grid(&[D, D, D])`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeGrid {
    resolution: usize,
    values: Vec<f64>,
}

impl VolumeGrid {
    pub fn new(resolution: usize, values: Vec<f64>) -> Result<Self, TasksError> {
        if resolution < 2 {
            return Err(TasksError::Shape(format!("volume resolution must be at least 2, got {resolution}")));
        }
        if values.len() != resolution.pow(3) {
            return Err(TasksError::Shape(format!(
                "{resolution}^3 volume needs {} values, got {}",
                resolution.pow(3),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(TasksError::PixelRange { index: i, value: values[i] });
        }
        Ok(VolumeGrid { resolution, values })
    }

    pub fn from_prediction(resolution: usize, values: &[f64]) -> Result<Self, TasksError> {
        VolumeGrid::new(resolution, values.iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn occupied_fraction(&self, threshold: f64) -> f64 {
        self.values.iter().filter(|&&v| v > threshold).count() as f64 / self.values.len() as f64
    }

    /// 16-byte header (magic, `D` as little-endian `u64`), then `round(255·v)` per voxel.
    pub fn write_raw<W: Write>(&self, mut out: W) -> Result<(), TasksError> {
        out.write_all(VOLUME_MAGIC)?;
        out.write_all(&(self.resolution as u64).to_le_bytes())?;
        let bytes: Vec<u8> = self.values.iter().map(|v| (255.0 * v).round() as u8).collect();
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_raw<R: Read>(mut input: R) -> Result<Self, TasksError> {
        let mut header = [0u8; 16];
        input
            .read_exact(&mut header)
            .map_err(|e| TasksError::Volume(format!("short header: {e}")))?;
        if &header[..8] != VOLUME_MAGIC {
            return Err(TasksError::Volume("bad magic".into()));
        }
        let d = u64::from_le_bytes(header[8..].try_into().expect("8 bytes")) as usize;
        if !(2..=1024).contains(&d) {
            return Err(TasksError::Volume(format!("implausible resolution {d}")));
        }
        let mut bytes = vec![0u8; d * d * d];
        input
            .read_exact(&mut bytes)
            .map_err(|e| TasksError::Volume(format!("truncated voxel data: {e}")))?;
        VolumeGrid::new(d, bytes.iter().map(|&b| b as f64 / 255.0).collect())
    }

    pub fn save_raw(&self, path: &Path) -> Result<(), TasksError> {
        self.write_raw(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load_raw(path: &Path) -> Result<Self, TasksError> {
        let f = std::fs::File::open(path).map_err(|e| TasksError::Open {
            path: path.display().to_string(),
            source: e,
        })?;
        VolumeGrid::read_raw(std::io::BufReader::new(f))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Ball of the given radius about the origin.
    Sphere { radius: f64 },
    /// Ring in the `xy`-plane: distance `major` from the axis, tube radius `minor`.
    Torus { major: f64, minor: f64 },
}

impl Shape {
    /// Inclusive of the boundary.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        match *self {
            Shape::Sphere { radius } => (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() <= radius,
            Shape::Torus { major, minor } => {
                let q = p[0].hypot(p[1]) - major;
                q * q + p[2] * p[2] <= minor * minor
            }
        }
    }
}

/// Hard labels at the lattice points of `[−1, 1]³`.
pub fn synthetic_occupancy(shape: Shape, resolution: usize) -> Result<VolumeGrid, TasksError> {
    if resolution < 8 {
        return Err(TasksError::Parameter(format!("occupancy needs D >= 8, got {resolution}")));
    }
    match shape {
        Shape::Sphere { radius } if !(radius >= 0.0) => {
            return Err(TasksError::Parameter(format!("sphere radius must be non-negative, got {radius}")))
        }
        Shape::Torus { major, minor } if !(major > 0.0 && minor > 0.0) => {
            return Err(TasksError::Parameter(format!(
                "torus radii must be positive, got {major} and {minor}"
            )))
        }
        _ => {}
    }
    let ax = axis(resolution);
    let mut values = Vec::with_capacity(resolution.pow(3));
    for &x in &ax {
        for &y in &ax {
            for &z in &ax {
                values.push(if shape.contains([x, y, z]) { 1.0 } else { 0.0 });
            }
        }
    }
    VolumeGrid::new(resolution, values)
}

/// Intersection over union of the voxels above `threshold`; an empty union counts as 1.
pub fn iou(pred: &VolumeGrid, gt: &VolumeGrid, threshold: f64) -> Result<f64, TasksError> {
    if pred.resolution != gt.resolution {
        return Err(TasksError::Shape(format!(
            "volume resolutions differ: {} vs {}",
            pred.resolution, gt.resolution
        )));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&a, &b) in pred.values.iter().zip(&gt.values) {
        let (a, b) = (a > threshold, b > threshold);
        inter += (a && b) as usize;
        union += (a || b) as usize;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}
