//! Values of the activation family on a few real and complex inputs.

use cosmo::activations::Activation;
use cosmo::cli::parse_activation;
use cosmo::numerics::Complex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exprs = [
        "relu",
        "sine(omega0=30)",
        "gaussian(s=3)",
        "sinc(s=2)",
        "raised_cosine(T=1,beta=0.05)",
        "cosmo(raised_cosine(T=1,beta=0.05),zeta=1)",
    ];
    let inputs = [Complex::real(-0.5), Complex::real(0.0), Complex::real(0.25), Complex::new(0.25, 0.1)];
    for src in exprs {
        let act: Activation = parse_activation(src)?;
        print!("{:<44}", act.to_string());
        for z in inputs {
            match act.eval(z) {
                Ok(v) => print!(" {:>+8.4}{:+.4}i", v.re, v.im),
                Err(_) => print!(" {:>17}", "-"),
            }
        }
        println!();
    }
    Ok(())
}
