//! Spectrum of a pure cosine after a polynomial nonlinearity: the support
//! grows to ±K and, for an even polynomial, only even harmonics appear.

use cosmo::activations::Activation;
use cosmo::spectral::{post_activation_spectrum, ChebyshevExpansion, PolySpectrum, TwoSided};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = post_activation_spectrum(&PolySpectrum {
        alpha: vec![0.0, 0.0, 1.0],
        input: TwoSided::cosine(1.0),
    });
    println!("cos^2: z0 = {}, z±2 = {}", square.get(0).re, square.get(2).re);

    let act = Activation::gaussian(1.0)?;
    let alpha: Vec<f64> = ChebyshevExpansion::of_activation(&act, 512, 50)?
        .to_monomial(8)
        .iter()
        .map(|c| c.re)
        .collect();
    let out = post_activation_spectrum(&PolySpectrum {
        alpha,
        input: TwoSided::cosine(1.0),
    });
    println!("{act} truncated at K = 8:");
    for k in 0..=out.half() as i64 {
        println!("  k = {k}: {:+.6e}", out.get(k).re);
    }
    Ok(())
}
