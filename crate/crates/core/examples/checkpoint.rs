//! Saves a trained network and checks the reloaded copy predicts identically.

use cosmo::network::{init_network, load_checkpoint, save_checkpoint, train, NetworkConfig, TrainConfig};
use cosmo::tasks::{build_grid, radial_chirp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = radial_chirp(16, 6.0);
    let grid = build_grid(&[16, 16]);
    let net = init_network(NetworkConfig {
        depth: 3,
        width: 16,
        out_dim: 1,
        ..NetworkConfig::default()
    })?;
    let tcfg = TrainConfig {
        epochs: 50,
        ..TrainConfig::default()
    };
    let (net, _) = train(net, grid.coords(), img.pixels(), &tcfg, None)?;

    let dir = std::env::temp_dir().join(format!("cosmo-checkpoint-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("model.json");
    save_checkpoint(&net, &path)?;
    let back = load_checkpoint(&path)?;
    let same = net.forward(grid.coords())? == back.forward(grid.coords())?;
    println!("{} parameters, bit-identical predictions: {same}", back.param_count());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
