//! Parity vanishing of real bases, and the coefficients modulation puts back.

use cosmo::activations::Activation;
use cosmo::spectral::{modulation_coverage_report, parity_vanishing_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for act in [Activation::gaussian(3.0)?, Activation::raised_cosine(1.0, 0.05)?, Activation::sine(10.0)?] {
        let r = parity_vanishing_report(&act, 512, 50, 1e-10)?;
        println!("{act}: {:?}, violations {:?}", r.parity, r.violations);
    }

    let base = Activation::raised_cosine(1.0, 0.05)?;
    let r = modulation_coverage_report(&base, 1.0, 512, 25, 1e-8)?;
    println!("\n{} with zeta = 1 at the odd indices:", r.label);
    println!("{:>3} {:>12} {:>12}", "n", "a_n", "b_n");
    for e in &r.entries {
        println!("{:>3} {:>12.3e} {:>12.3e}{}", e.n, e.a, e.b, if e.flagged { "  below tol" } else { "" });
    }
    Ok(())
}
