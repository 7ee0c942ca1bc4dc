//! Prints |c_n| of several activations on [-1, 1] side by side.

use cosmo::activations::Activation;
use cosmo::spectral::{decay_profile, DEFAULT_NMAX, DEFAULT_NODES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let acts = [
        Activation::Relu,
        Activation::sine(10.0)?,
        Activation::gaussian(10.0)?,
        Activation::sinc(10.0)?,
        Activation::raised_cosine(0.05, 0.05)?,
    ];
    let table = decay_profile(&acts, DEFAULT_NODES, DEFAULT_NMAX)?;
    print!("{:>3}", "n");
    for l in &table.labels {
        print!(" {l:>28}");
    }
    println!();
    for n in (0..=DEFAULT_NMAX).step_by(5) {
        print!("{n:>3}");
        for col in &table.columns {
            print!(" {:>28.3e}", col[n]);
        }
        println!();
    }
    table.write_csv(std::io::sink())?;
    Ok(())
}
