//! Signals, degradations, coordinate lattices, and quality metrics for the
//! fitting tasks.

mod grid;
mod image;
mod metrics;
mod volume;

pub use grid::{axis, build_grid, derive_seed, CoordinateGrid};
pub use image::{
    apply_mask, crop, downsample, photon_noise, radial_chirp, sample_mask, synthetic_texture, upsample_nearest, ImageGrid,
};
pub use metrics::{mse, psnr, psnr_from_mse, ssim};
pub use volume::{iou, synthetic_occupancy, Shape, VolumeGrid, VOLUME_MAGIC};

#[derive(Debug, thiserror::Error)]
pub enum TasksError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("value {value} at index {index} is outside the allowed range")]
    PixelRange { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("pixmap: {0}")]
    Ppm(String),
    #[error("volume file: {0}")]
    Volume(String),
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
