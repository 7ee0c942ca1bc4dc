//! Fits 20% of the pixels and scores the reconstruction on all of them.

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{apply_mask, build_grid, psnr, sample_mask, synthetic_texture, ImageGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let size = 32;
    let img = synthetic_texture(size, 3);
    let mask = sample_mask(size, size, 0.2, 11)?;
    let grid = build_grid(&[size, size]);
    let net = init_network(NetworkConfig {
        depth: 4,
        width: 64,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs: 200,
        ..TrainConfig::default()
    };
    let (net, _) = train(net, grid.coords(), img.pixels(), &tcfg, Some(&mask))?;
    let recon = ImageGrid::from_prediction(size, size, 3, &net.forward(grid.coords())?)?;
    println!("observed {} of {} pixels", mask.iter().filter(|&&m| m).count(), size * size);
    println!("masked input {:.2} dB", psnr(&apply_mask(&img, &mask), &img)?);
    println!("fit          {:.2} dB", psnr(&recon, &img)?);
    Ok(())
}
