//! Blocked activation evaluation for hidden layers.
//!
//! The raised cosine (with or without modulation) runs four lanes at a time;
//! lanes near a removable singularity and every other family go through
//! [`Activation::eval_grads`].

use std::f64::consts::{FRAC_PI_2, PI};

use wide::f64x4;

const LANES: usize = 4;

use crate::activations::{Activation, FRACTION_STABLE_BAND};
use crate::numerics::Complex;

/// Derivative planes filled alongside the values.
pub(crate) struct GradPlanes<'a> {
    pub dz_re: &'a mut [f64],
    pub dz_im: &'a mut [f64],
    /// One plane per learnable parameter, in `learnable()` order.
    pub dp_re: &'a mut [Vec<f64>],
    pub dp_im: &'a mut [Vec<f64>],
}

#[derive(Clone, Copy)]
struct C4 {
    re: f64x4,
    im: f64x4,
}

impl C4 {
    #[inline(always)]
    fn mul(self, o: C4) -> C4 {
        C4 {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    #[inline(always)]
    fn scale(self, k: f64x4) -> C4 {
        C4 {
            re: self.re * k,
            im: self.im * k,
        }
    }

    #[inline(always)]
    fn add(self, o: C4) -> C4 {
        C4 {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    #[inline(always)]
    fn sub(self, o: C4) -> C4 {
        C4 {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    #[inline(always)]
    fn norm_sqr(self) -> f64x4 {
        self.re * self.re + self.im * self.im
    }

    #[inline(always)]
    fn recip(self) -> C4 {
        let d = f64x4::ONE / self.norm_sqr();
        C4 {
            re: self.re * d,
            im: -self.im * d,
        }
    }

    /// `(sin z, cos z)`.
    #[inline(always)]
    fn sin_cos(self) -> (C4, C4) {
        let (s, c) = self.re.sin_cos();
        let e = self.im.exp();
        let ei = f64x4::ONE / e;
        let half = f64x4::splat(0.5);
        let ch = (e + ei) * half;
        let sh = (e - ei) * half;
        (
            C4 { re: s * ch, im: c * sh },
            C4 { re: c * ch, im: -(s * sh) },
        )
    }
}

#[derive(Clone, Copy)]
struct RcParams {
    t: f64,
    beta: f64,
    zeta: Option<f64>,
}

fn rc_params(act: &Activation) -> Option<RcParams> {
    match act {
        Activation::RaisedCosine { bandwidth, rolloff } => Some(RcParams {
            t: *bandwidth,
            beta: *rolloff,
            zeta: None,
        }),
        Activation::Cosmo { base, zeta } => match **base {
            Activation::RaisedCosine { bandwidth, rolloff } => Some(RcParams {
                t: bandwidth,
                beta: rolloff,
                zeta: Some(*zeta),
            }),
            _ => None,
        },
        _ => None,
    }
}

/// Replaces `zr + j·zi` by `act(z)` elementwise, filling `grads` when given.
pub(crate) fn apply(act: &Activation, zr: &mut [f64], zi: &mut [f64], mut grads: Option<GradPlanes<'_>>) {
    let len = zr.len();
    let blocked = match rc_params(act) {
        Some(p) => {
            let full = len - len % LANES;
            for i in (0..full).step_by(LANES) {
                rc_block(act, p, zr, zi, i, grads.as_mut());
            }
            full
        }
        None => 0,
    };
    for i in blocked..len {
        scalar(act, zr, zi, i, grads.as_mut());
    }
}

#[inline]
fn scalar(act: &Activation, zr: &mut [f64], zi: &mut [f64], i: usize, grads: Option<&mut GradPlanes<'_>>) {
    let g = act.eval_grads(Complex::new(zr[i], zi[i]));
    zr[i] = g.value.re;
    zi[i] = g.value.im;
    if let Some(gp) = grads {
        gp.dz_re[i] = g.dz.re;
        gp.dz_im[i] = g.dz.im;
        for k in 0..gp.dp_re.len() {
            gp.dp_re[k][i] = g.dparams[k].re;
            gp.dp_im[k][i] = g.dparams[k].im;
        }
    }
}

#[inline(always)]
fn load(s: &[f64], i: usize) -> f64x4 {
    let a: [f64; LANES] = s[i..i + LANES].try_into().expect("full block");
    f64x4::new(a)
}

#[inline(always)]
fn store(s: &mut [f64], i: usize, v: f64x4) {
    s[i..i + LANES].copy_from_slice(&v.to_array());
}

fn rc_block(
    act: &Activation,
    p: RcParams,
    zr: &mut [f64],
    zi: &mut [f64],
    i: usize,
    grads: Option<&mut GradPlanes<'_>>,
) {
    let z = C4 {
        re: load(zr, i),
        im: load(zi, i),
    };
    let inv_t = f64x4::splat(1.0 / p.t);
    // x = πz/T; the cosine argument πw/2 is βx
    let x = z.scale(f64x4::splat(PI / p.t));
    let y = x.scale(f64x4::splat(p.beta));
    let w = y.scale(f64x4::splat(2.0 / PI));
    let den = C4 {
        re: f64x4::ONE - (w.re * w.re - w.im * w.im),
        im: -(w.re * w.im * f64x4::splat(2.0)),
    };

    let (sx, cx) = x.sin_cos();
    let inv_x = x.recip();
    let s = sx.mul(inv_x);
    let (sy, cy) = y.sin_cos();
    let inv_den = den.recip();
    let h = cy.mul(inv_den);
    let phi = s.mul(h).scale(inv_t);

    let want_grads = grads.is_some();
    let (mut dphi, mut dt) = (phi, phi);
    if want_grads {
        // S'(u) = π(cos x − S)/x ; H'(w) = (−(π/2)·sin(πw/2) + 2wH)/(1 − w²)
        let ds = cx.sub(s).mul(inv_x).scale(f64x4::splat(PI));
        let dh = sy
            .scale(f64x4::splat(-FRAC_PI_2))
            .add(w.mul(h).scale(f64x4::splat(2.0)))
            .mul(inv_den);
        dphi = ds
            .mul(h)
            .scale(inv_t)
            .add(s.mul(dh).scale(f64x4::splat(2.0 * p.beta / p.t)))
            .scale(inv_t);
        dt = phi.add(z.mul(dphi)).scale(-inv_t);
    }

    let (value, dz, dzeta) = match p.zeta {
        None => (phi, dphi, None),
        Some(zeta) => {
            let a = 2.0 * PI * zeta;
            let (sm, cm) = (z.re * f64x4::splat(a)).sin_cos();
            let em = (z.im * f64x4::splat(-a)).exp();
            let m = C4 {
                re: em * cm,
                im: em * sm,
            };
            let g = phi.mul(m);
            if want_grads {
                let ja = C4 {
                    re: f64x4::ZERO,
                    im: f64x4::splat(a),
                };
                let dz = dphi.mul(m).add(g.mul(ja));
                let two_pi_j_z = C4 {
                    re: z.im * f64x4::splat(-2.0 * PI),
                    im: z.re * f64x4::splat(2.0 * PI),
                };
                dt = dt.mul(m);
                (g, dz, Some(g.mul(two_pi_j_z)))
            } else {
                (g, dphi, None)
            }
        }
    };

    store(zr, i, value.re);
    store(zi, i, value.im);
    let mut redo = x.norm_sqr().simd_lt(f64x4::splat(1e-8)) | den.norm_sqr().simd_lt(f64x4::splat(FRACTION_STABLE_BAND * FRACTION_STABLE_BAND));
    redo |= !(value.re.is_finite() & value.im.is_finite());
    if let Some(gp) = grads {
        store(gp.dz_re, i, dz.re);
        store(gp.dz_im, i, dz.im);
        if !gp.dp_re.is_empty() {
            store(&mut gp.dp_re[0], i, dt.re);
            store(&mut gp.dp_im[0], i, dt.im);
        }
        if gp.dp_re.len() > 1 {
            let dzeta = dzeta.expect("modulated kernel has a frequency parameter");
            store(&mut gp.dp_re[1], i, dzeta.re);
            store(&mut gp.dp_im[1], i, dzeta.im);
        }
        redo |= !(dz.re.is_finite() & dz.im.is_finite());
        if redo.any() {
            let bits = redo.to_bitmask();
            for lane in 0..LANES {
                if bits & (1 << lane) != 0 {
                    // restore the input before the scalar recompute
                    zr[i + lane] = z.re.to_array()[lane];
                    zi[i + lane] = z.im.to_array()[lane];
                    scalar(act, zr, zi, i + lane, Some(gp));
                }
            }
        }
    } else if redo.any() {
        let bits = redo.to_bitmask();
        for lane in 0..LANES {
            if bits & (1 << lane) != 0 {
                zr[i + lane] = z.re.to_array()[lane];
                zi[i + lane] = z.im.to_array()[lane];
                scalar(act, zr, zi, i + lane, None);
            }
        }
    }
}
