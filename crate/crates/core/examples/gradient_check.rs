//! Compares the analytic loss gradient of a small network with central
//! differences.

use cosmo::network::{init_network, NetworkConfig};
use cosmo::numerics::grad_check;
use cosmo::tasks::{build_grid, radial_chirp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = radial_chirp(6, 4.0);
    let grid = build_grid(&[6, 6]);
    let net = init_network(NetworkConfig {
        depth: 3,
        width: 8,
        out_dim: 1,
        seed: 5,
        ..NetworkConfig::default()
    })?;
    let (loss, grad) = net.loss_and_grad(grid.coords(), img.pixels(), None)?;
    let point = net.params().to_vec();
    for h in [1e-4, 1e-5, 1e-6] {
        let err = grad_check(
            |p| {
                let mut trial = net.clone();
                trial.params_mut().copy_from_slice(p);
                trial.loss(grid.coords(), img.pixels(), None).unwrap_or(f64::NAN)
            },
            &grad,
            &point,
            h,
        )?;
        println!("loss {loss:.6e}  h = {h:.0e}: max relative error {err:.2e}");
    }
    Ok(())
}
