use super::tape::{GradTape, Var};
use super::NumericsError;

/// Largest componentwise relative disagreement between an analytic gradient
/// and central differences of `f`:
/// `max_k |analytic_k − fd_k| / max(|analytic_k|, 1e-8)`.
pub fn grad_check<F>(mut f: F, analytic: &[f64], point: &[f64], h: f64) -> Result<f64, NumericsError>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(h > 0.0) {
        return Err(NumericsError::InvalidStep(h));
    }
    if analytic.len() != point.len() {
        return Err(NumericsError::LengthMismatch {
            expected: point.len(),
            got: analytic.len(),
        });
    }
    let mut x = point.to_vec();
    let mut worst = 0.0f64;
    for k in 0..point.len() {
        x[k] = point[k] + h;
        let fp = f(&x);
        x[k] = point[k] - h;
        let fm = f(&x);
        x[k] = point[k];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(NumericsError::NonFiniteEvaluation { component: k });
        }
        let fd = (fp - fm) / (2.0 * h);
        let rel = (analytic[k] - fd).abs() / analytic[k].abs().max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// [`grad_check`] where both the function and its gradient come from a tape
/// built by `build`.
pub fn grad_check_tape<B>(build: B, point: &[f64], h: f64) -> Result<f64, NumericsError>
where
    B: for<'t> Fn(&'t GradTape, &[Var<'t>]) -> Var<'t>,
{
    let analytic = {
        let tape = GradTape::new();
        let xs = tape.leaves(point);
        let loss = build(&tape, &xs);
        tape.grad(loss, &xs)?
    };
    grad_check(
        |p| {
            let tape = GradTape::new();
            let xs = tape.leaves(p);
            build(&tape, &xs).value()
        },
        &analytic,
        point,
        h,
    )
}
