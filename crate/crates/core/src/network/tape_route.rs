use crate::numerics::{CVar, GradTape, Var};

use super::model::Network;
use super::NetworkError;

/// Loss and gradient recorded node by node on a [`GradTape`].
///
/// Independent of the planar forward/backward in [`Network::loss_and_grad`];
/// meant as a cross-check on small networks.
pub fn loss_on_tape(
    net: &Network,
    coords: &[f64],
    targets: &[f64],
    mask: Option<&[bool]>,
) -> Result<(f64, Vec<f64>), NetworkError> {
    let n = net.check_coords(coords)?;
    let cfg = net.config();
    let od = cfg.out_dim;
    if targets.len() != n * od {
        return Err(NetworkError::ShapeMismatch {
            what: "target block",
            expected: n * od,
            got: targets.len(),
        });
    }
    let tape = GradTape::new();
    let p = tape.leaves(net.params());
    let shapes = net.shapes();
    let mut offset = 0;
    let mut layers = Vec::with_capacity(shapes.len());
    for &(fo, fi) in shapes {
        layers.push(offset);
        offset += 2 * fo * fi + 2 * fo;
    }
    let kinds = net.learnable();
    let act_params: Vec<Vec<Var<'_>>> = (0..cfg.hidden_layers())
        .map(|h| {
            kinds
                .iter()
                .enumerate()
                .map(|(k, &kind)| {
                    let b = cfg.bounds.get(kind);
                    let raw = p[offset + h * kinds.len() + k];
                    let sig = ((-raw).exp() + 1.0).recip();
                    sig * (b.hi - b.lo) + b.lo
                })
                .collect()
        })
        .collect();

    let mut terms = Vec::new();
    for r in 0..n {
        if mask.is_some_and(|m| !m[r]) {
            continue;
        }
        let mut h: Vec<CVar<'_>> = coords[r * cfg.in_dim..(r + 1) * cfg.in_dim]
            .iter()
            .map(|&x| CVar::from_real(tape.constant(x)))
            .collect();
        for (l, &(fo, fi)) in shapes.iter().enumerate() {
            let off = layers[l];
            let mut z = Vec::with_capacity(fo);
            for o in 0..fo {
                let b = CVar::new(p[off + 2 * fo * fi + o], p[off + 2 * fo * fi + fo + o]);
                let mut acc = b;
                for (i, hi) in h.iter().enumerate() {
                    let w = CVar::new(p[off + o * fi + i], p[off + fo * fi + o * fi + i]);
                    acc = acc + w * *hi;
                }
                z.push(acc);
            }
            if l + 1 == shapes.len() {
                for (c, zc) in z.iter().enumerate() {
                    let d = zc.re - targets[r * od + c];
                    terms.push(d * d);
                }
            } else {
                let g: Vec<CVar<'_>> = z
                    .into_iter()
                    .map(|zz| cfg.activation.eval_on_tape(zz, &act_params[l]))
                    .collect();
                let s = tape.max_modulus(&g, 1.0);
                h = g.into_iter().map(|v| v / s).collect();
            }
        }
    }
    if terms.is_empty() {
        return Err(NetworkError::EmptyMask);
    }
    let count = terms.len() as f64;
    let loss = tape.sum(&terms) / count;
    let grad = tape.grad(loss, &p)?;
    Ok((loss.value(), grad))
}
