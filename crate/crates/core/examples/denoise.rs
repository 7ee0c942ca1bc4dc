//! Fits a photon-noise measurement and compares the fit against the clean image.

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{build_grid, photon_noise, psnr, synthetic_texture, ImageGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let size = 32;
    let clean = synthetic_texture(size, 1);
    let noisy = photon_noise(&clean, 30.0, 2.0, 7)?;
    let grid = build_grid(&[size, size]);
    let net = init_network(NetworkConfig {
        depth: 4,
        width: 64,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs: 150,
        ..TrainConfig::default()
    };
    let (net, _) = train(net, grid.coords(), noisy.pixels(), &tcfg, None)?;
    let recon = ImageGrid::from_prediction(size, size, 3, &net.forward(grid.coords())?)?;
    let noisy_view = ImageGrid::from_prediction(size, size, 3, noisy.pixels())?;
    println!("noisy input   {:.2} dB", psnr(&noisy_view, &clean)?);
    println!("fit           {:.2} dB", psnr(&recon, &clean)?);
    Ok(())
}
