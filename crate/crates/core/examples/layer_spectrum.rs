//! Per-layer horizontal DFT profiles of a network fitted to a radial chirp.

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::spectral::layer_spectrum;
use cosmo::tasks::{build_grid, radial_chirp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let size = 32;
    let img = radial_chirp(size, 12.0);
    let grid = build_grid(&[size, size]);
    let net = init_network(NetworkConfig {
        depth: 4,
        width: 32,
        out_dim: 1,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs: 100,
        ..TrainConfig::default()
    };
    let (net, _) = train(net, grid.coords(), img.pixels(), &tcfg, None)?;
    let spec = layer_spectrum(&net, &grid)?;
    println!("Parseval relative error {:.1e}", spec.parseval_error);
    for (l, mean) in spec.band_mean(size / 4).iter().enumerate() {
        println!("layer {}: mean magnitude over bins >= {} is {:.4e}", l + 1, size / 4, mean);
    }
    Ok(())
}
