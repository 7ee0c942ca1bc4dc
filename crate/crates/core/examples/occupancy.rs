//! Fits a torus occupancy volume and reports IoU at threshold 0.5.

use cosmo::network::{init_network, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{build_grid, iou, synthetic_occupancy, Shape, VolumeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = 16;
    let gt = synthetic_occupancy(Shape::Torus { major: 0.5, minor: 0.25 }, d)?;
    let grid = build_grid(&[d, d, d]);
    let net = init_network(NetworkConfig {
        depth: 3,
        width: 32,
        in_dim: 3,
        out_dim: 1,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs: 200,
        ..TrainConfig::default()
    };
    let (net, rec) = train(net, grid.coords(), gt.values(), &tcfg, None)?;
    let recon = VolumeGrid::from_prediction(d, &net.forward(grid.coords())?)?;
    println!("occupied {:.3}  final loss {:.3e}", gt.occupied_fraction(0.5), rec.final_loss);
    println!("IoU {:.4}", iou(&recon, &gt, 0.5)?);
    Ok(())
}
