//! PSNR against hidden width at fixed depth on one texture.

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{build_grid, synthetic_texture};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let size = 32;
    let img = synthetic_texture(size, 4);
    let grid = build_grid(&[size, size]);
    for width in [16, 32, 64] {
        let net = init_network(NetworkConfig {
            depth: 3,
            width,
            ..NetworkConfig::default()
        })?;
        let tcfg = TrainConfig {
            epochs: 150,
            ..TrainConfig::default()
        };
        let (_, rec) = train(net, grid.coords(), img.pixels(), &tcfg, None)?;
        println!("width {width:>3}: {:.2} dB", rec.final_psnr());
    }
    Ok(())
}
