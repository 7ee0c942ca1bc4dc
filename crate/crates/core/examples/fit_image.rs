//! Fits a seeded texture and reports PSNR/SSIM of the reconstruction.
//!
//! `cargo run --release --example fit_image -- [size] [epochs]`

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{build_grid, psnr, ssim, synthetic_texture, ImageGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>());
    let size = args.next().transpose()?.unwrap_or(32);
    let epochs = args.next().transpose()?.unwrap_or(200);

    let img = synthetic_texture(size, 0);
    let grid = build_grid(&[size, size]);
    let net = init_network(NetworkConfig {
        depth: 4,
        width: 64,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs,
        log_every: (epochs / 10).max(1),
        ..TrainConfig::default()
    };
    let (net, rec) = train(net, grid.coords(), img.pixels(), &tcfg, None)?;
    for e in &rec.epochs {
        println!("epoch {:4}  loss {:.3e}  psnr {:6.2} dB", e.epoch, e.loss, e.psnr);
    }
    let recon = ImageGrid::from_prediction(size, size, 3, &net.forward(grid.coords())?)?;
    println!("psnr {:.2} dB  ssim {:.4}", psnr(&recon, &img)?, ssim(&recon, &img)?);
    for h in 0..net.config().hidden_layers() {
        println!("layer {} (T, zeta) = {:?}", h + 1, net.activation_params(h));
    }
    Ok(())
}
