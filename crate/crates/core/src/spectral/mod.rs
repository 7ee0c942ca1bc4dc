//! Chebyshev expansions of activations, polynomial spectrum broadening, and
//! per-layer DFT magnitude profiles.

mod blueshift;
mod chebyshev;
mod layer;

use crate::network::NetworkError;
use crate::numerics::Complex;

pub use blueshift::{post_activation_spectrum, PolySpectrum, TwoSided};
pub use chebyshev::{
    chebyshev_coeffs, chebyshev_nodes, decay_profile, empirical_parity, modulation_coverage_report,
    parity_vanishing_report, sig17, ChebyshevExpansion, Component, CoverageEntry, CoverageReport, DecayTable, Parity,
    ParityReport,
};
pub use layer::{dft2, horizontal_profile, layer_spectrum, LayerSpectra};

pub const DEFAULT_NODES: usize = 512;
pub const DEFAULT_NMAX: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("node count must be at least 1")]
    ZeroNodes,
    #[error("n_max = {n_max} must be below the node count {nodes}")]
    AliasedOrder { n_max: usize, nodes: usize },
    #[error("function is not finite at node {k} (x = {x}): {value}")]
    NonFiniteSample { k: usize, x: f64, value: Complex },
    #[error("x = {0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("modulation disabled (zeta = 0), coverage claim vacuous")]
    ZeroZeta,
    #[error("{0} has neither even nor odd parity on [-1, 1]")]
    NoParity(String),
    #[error("{0} is complex-valued on the real axis")]
    NotRealValued(String),
    #[error("layer spectra need a 2-D raster, got dims {0:?}")]
    NonRaster(Vec<usize>),
    #[error("Parseval check failed: relative mismatch {0:e}")]
    Parseval(f64),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
