//! Trains on a 4× block-averaged image at the block centres and evaluates the
//! network on the full-resolution lattice.

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{axis, build_grid, downsample, psnr, synthetic_texture, upsample_nearest, ImageGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (size, k) = (48, 4);
    let gt = synthetic_texture(size, 2);
    let low = downsample(&gt, k)?;

    // centre of block i on the full lattice
    let full = axis(size);
    let centres: Vec<f64> = (0..size / k)
        .map(|i| 0.5 * (full[k * i] + full[k * i + k - 1]))
        .collect();
    let coords: Vec<f64> = centres
        .iter()
        .flat_map(|&y| centres.iter().flat_map(move |&x| [y, x]))
        .collect();

    let net = init_network(NetworkConfig {
        depth: 4,
        width: 64,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs: 300,
        ..TrainConfig::default()
    };
    let (net, _) = train(net, &coords, low.pixels(), &tcfg, None)?;
    let recon = ImageGrid::from_prediction(size, size, 3, &net.forward(build_grid(&[size, size]).coords())?)?;
    println!("nearest  {:.2} dB", psnr(&upsample_nearest(&low, k), &gt)?);
    println!("network  {:.2} dB", psnr(&recon, &gt)?);
    Ok(())
}
