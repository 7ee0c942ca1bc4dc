//! Reverse-mode differentiation over real scalars.
//!
//! Complex quantities are carried as `(re, im)` pairs of real tape variables
//! ([`CVar`]); the loss is always real, so a real-pair reverse sweep gives the
//! exact gradient with respect to every real parameter.
//!
//! ```
//! use cosmo::numerics::GradTape;
//!
//! let tape = GradTape::new();
//! let p = tape.leaf(2.0);
//! let loss = p * 3.0;
//! assert_eq!(tape.grad(loss, &[p]).unwrap(), vec![3.0]);
//! ```

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::complex::Complex;
use super::{sinc, sinc_derivative, NumericsError};

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    Const,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Sin(usize),
    Cos(usize),
    Exp(usize),
    Sinc(usize),
    Recip(usize),
    Sum(Vec<usize>),
    /// `max(floor, max_k |(re_k, im_k)|)`; `arg` is the winning pair, `None`
    /// when the floor wins.
    MaxModulus {
        pairs: Vec<(usize, usize)>,
        floor: f64,
        arg: Option<usize>,
    },
}

#[derive(Clone, Debug)]
struct Node {
    op: Op,
    value: f64,
}

/// Ordered record of primitive operations with their forward values.
#[derive(Debug, Default)]
pub struct GradTape {
    nodes: RefCell<Vec<Node>>,
}

/// Handle to a real value recorded on a [`GradTape`].
#[derive(Clone, Copy, Debug)]
pub struct Var<'t> {
    tape: &'t GradTape,
    idx: usize,
}

/// Complex value on the tape as a pair of real variables.
#[derive(Clone, Copy, Debug)]
pub struct CVar<'t> {
    pub re: Var<'t>,
    pub im: Var<'t>,
}

impl GradTape {
    pub fn new() -> Self {
        GradTape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, op: Op, value: f64) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node { op, value });
        Var {
            tape: self,
            idx: nodes.len() - 1,
        }
    }

    fn value_of(&self, idx: usize) -> f64 {
        self.nodes.borrow()[idx].value
    }

    /// A differentiable input.
    pub fn leaf(&self, value: f64) -> Var<'_> {
        self.push(Op::Leaf, value)
    }

    pub fn leaves(&self, values: &[f64]) -> Vec<Var<'_>> {
        values.iter().map(|&v| self.leaf(v)).collect()
    }

    pub fn constant(&self, value: f64) -> Var<'_> {
        self.push(Op::Const, value)
    }

    pub fn complex_leaf(&self, z: Complex) -> CVar<'_> {
        CVar {
            re: self.leaf(z.re),
            im: self.leaf(z.im),
        }
    }

    pub fn complex_constant(&self, z: Complex) -> CVar<'_> {
        CVar {
            re: self.constant(z.re),
            im: self.constant(z.im),
        }
    }

    pub fn sum(&self, vars: &[Var<'_>]) -> Var<'_> {
        let value = vars.iter().map(|v| v.value()).sum();
        self.push(Op::Sum(vars.iter().map(|v| v.idx).collect()), value)
    }

    /// `max(floor, max_k |z_k|)`.
    pub fn max_modulus(&self, zs: &[CVar<'_>], floor: f64) -> Var<'_> {
        let mut best = floor;
        let mut arg = None;
        for (k, z) in zs.iter().enumerate() {
            let m = z.value().modulus();
            if m > best {
                best = m;
                arg = Some(k);
            }
        }
        let pairs = zs.iter().map(|z| (z.re.idx, z.im.idx)).collect();
        self.push(Op::MaxModulus { pairs, floor, arg }, best)
    }

    /// Gradient of a real `loss` with respect to `params`.
    ///
    /// Nodes are visited in exact reverse recording order, so the result is
    /// bit-reproducible for a given tape.
    pub fn grad(&self, loss: Var<'_>, params: &[Var<'_>]) -> Result<Vec<f64>, NumericsError> {
        let nodes = self.nodes.borrow();
        let mut adj = vec![0.0; loss.idx + 1];
        adj[loss.idx] = 1.0;
        for i in (0..=loss.idx).rev() {
            let g = adj[i];
            if g == 0.0 {
                continue;
            }
            let val = |k: usize| nodes[k].value;
            match &nodes[i].op {
                Op::Leaf | Op::Const => {}
                Op::Add(a, b) => {
                    adj[*a] += g;
                    adj[*b] += g;
                }
                Op::Sub(a, b) => {
                    adj[*a] += g;
                    adj[*b] -= g;
                }
                Op::Mul(a, b) => {
                    let (va, vb) = (val(*a), val(*b));
                    adj[*a] += g * vb;
                    adj[*b] += g * va;
                }
                Op::Div(a, b) => {
                    let (va, vb) = (val(*a), val(*b));
                    adj[*a] += g / vb;
                    adj[*b] -= g * va / (vb * vb);
                }
                Op::Neg(a) => adj[*a] -= g,
                Op::Sin(a) => adj[*a] += g * val(*a).cos(),
                Op::Cos(a) => adj[*a] -= g * val(*a).sin(),
                Op::Exp(a) => adj[*a] += g * nodes[i].value,
                Op::Sinc(a) => adj[*a] += g * sinc_derivative(val(*a)),
                Op::Recip(a) => {
                    let va = val(*a);
                    adj[*a] -= g / (va * va);
                }
                Op::Sum(items) => {
                    for &k in items {
                        adj[k] += g;
                    }
                }
                Op::MaxModulus { pairs, arg, .. } => {
                    if let Some(k) = arg {
                        let (r, m) = pairs[*k];
                        let s = nodes[i].value;
                        adj[r] += g * val(r) / s;
                        adj[m] += g * val(m) / s;
                    }
                }
            }
        }
        params
            .iter()
            .map(|p| {
                if p.idx > loss.idx {
                    Ok(0.0)
                } else if !matches!(nodes[p.idx].op, Op::Leaf) {
                    Err(NumericsError::NotALeaf { index: p.idx })
                } else {
                    Ok(adj[p.idx])
                }
            })
            .collect()
    }

    /// Gradient of a complex-typed loss; rejected unless the imaginary part is zero.
    pub fn grad_complex(
        &self,
        loss: CVar<'_>,
        params: &[Var<'_>],
    ) -> Result<Vec<f64>, NumericsError> {
        let im = loss.im.value();
        if im != 0.0 {
            return Err(NumericsError::NonRealLoss { imaginary: im });
        }
        self.grad(loss.re, params)
    }

    /// Recompute every node from new leaf values (in leaf creation order).
    pub fn replay(&self, leaf_values: &[f64]) -> Result<Vec<f64>, NumericsError> {
        let nodes = self.nodes.borrow();
        let leaf_count = nodes.iter().filter(|n| matches!(n.op, Op::Leaf)).count();
        if leaf_count != leaf_values.len() {
            return Err(NumericsError::LengthMismatch {
                expected: leaf_count,
                got: leaf_values.len(),
            });
        }
        let mut leaves = leaf_values.iter();
        let mut out: Vec<f64> = Vec::with_capacity(nodes.len());
        for node in nodes.iter() {
            let v = match &node.op {
                Op::Leaf => *leaves.next().expect("leaf count checked"),
                Op::Const => node.value,
                Op::Add(a, b) => out[*a] + out[*b],
                Op::Sub(a, b) => out[*a] - out[*b],
                Op::Mul(a, b) => out[*a] * out[*b],
                Op::Div(a, b) => out[*a] / out[*b],
                Op::Neg(a) => -out[*a],
                Op::Sin(a) => out[*a].sin(),
                Op::Cos(a) => out[*a].cos(),
                Op::Exp(a) => out[*a].exp(),
                Op::Sinc(a) => sinc(out[*a]),
                Op::Recip(a) => 1.0 / out[*a],
                Op::Sum(items) => items.iter().map(|&k| out[k]).sum(),
                Op::MaxModulus { pairs, floor, .. } => {
                    let mut best = *floor;
                    for &(r, m) in pairs {
                        let md = Complex::new(out[r], out[m]).modulus();
                        if md > best {
                            best = md;
                        }
                    }
                    best
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    /// Recorded forward values, in node order.
    pub fn values(&self) -> Vec<f64> {
        self.nodes.borrow().iter().map(|n| n.value).collect()
    }
}

impl<'t> Var<'t> {
    pub fn value(self) -> f64 {
        self.tape.value_of(self.idx)
    }

    pub fn index(self) -> usize {
        self.idx
    }

    pub fn tape(self) -> &'t GradTape {
        self.tape
    }

    fn unary(self, op: Op, value: f64) -> Var<'t> {
        self.tape.push(op, value)
    }

    pub fn sin(self) -> Var<'t> {
        self.unary(Op::Sin(self.idx), self.value().sin())
    }

    pub fn cos(self) -> Var<'t> {
        self.unary(Op::Cos(self.idx), self.value().cos())
    }

    pub fn exp(self) -> Var<'t> {
        self.unary(Op::Exp(self.idx), self.value().exp())
    }

    /// Normalized `sin(πu)/(πu)` with the removable point at 0 handled.
    pub fn sinc(self) -> Var<'t> {
        self.unary(Op::Sinc(self.idx), sinc(self.value()))
    }

    pub fn recip(self) -> Var<'t> {
        self.unary(Op::Recip(self.idx), 1.0 / self.value())
    }

    pub fn square(self) -> Var<'t> {
        self * self
    }

    fn constant(self, c: f64) -> Var<'t> {
        self.tape.constant(c)
    }
}

macro_rules! binary_ops {
    ($trait:ident, $method:ident, $variant:ident, $op:tt) => {
        impl<'t> $trait for Var<'t> {
            type Output = Var<'t>;
            fn $method(self, rhs: Var<'t>) -> Var<'t> {
                let v = self.value() $op rhs.value();
                self.tape.push(Op::$variant(self.idx, rhs.idx), v)
            }
        }
        impl<'t> $trait<f64> for Var<'t> {
            type Output = Var<'t>;
            fn $method(self, rhs: f64) -> Var<'t> {
                let c = self.constant(rhs);
                self $op c
            }
        }
        impl<'t> $trait<Var<'t>> for f64 {
            type Output = Var<'t>;
            fn $method(self, rhs: Var<'t>) -> Var<'t> {
                let c = rhs.constant(self);
                c $op rhs
            }
        }
    };
}

binary_ops!(Add, add, Add, +);
binary_ops!(Sub, sub, Sub, -);
binary_ops!(Mul, mul, Mul, *);
binary_ops!(Div, div, Div, /);

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Var<'t> {
        self.unary(Op::Neg(self.idx), -self.value())
    }
}

impl<'t> CVar<'t> {
    pub fn new(re: Var<'t>, im: Var<'t>) -> Self {
        CVar { re, im }
    }

    pub fn value(self) -> Complex {
        Complex::new(self.re.value(), self.im.value())
    }

    pub fn from_real(re: Var<'t>) -> Self {
        let zero = re.constant(0.0);
        CVar { re, im: zero }
    }

    pub fn conj(self) -> Self {
        CVar::new(self.re, -self.im)
    }

    pub fn scale(self, k: Var<'t>) -> Self {
        CVar::new(self.re * k, self.im * k)
    }

    pub fn scale_f(self, k: f64) -> Self {
        CVar::new(self.re * k, self.im * k)
    }

    pub fn add_c(self, c: Complex) -> Self {
        CVar::new(self.re + c.re, self.im + c.im)
    }

    pub fn mul_c(self, c: Complex) -> Self {
        CVar::new(
            self.re * c.re - self.im * c.im,
            self.re * c.im + self.im * c.re,
        )
    }

    pub fn norm_sqr(self) -> Var<'t> {
        self.re * self.re + self.im * self.im
    }

    pub fn exp(self) -> Self {
        let r = self.re.exp();
        CVar::new(r * self.im.cos(), r * self.im.sin())
    }

    pub fn sin(self) -> Self {
        let (ch, sh) = cosh_sinh(self.im);
        CVar::new(self.re.sin() * ch, self.re.cos() * sh)
    }

    pub fn cos(self) -> Self {
        let (ch, sh) = cosh_sinh(self.im);
        CVar::new(self.re.cos() * ch, -(self.re.sin() * sh))
    }

    /// Complex normalized sinc; 2-term series within `1e-8` of the origin.
    pub fn sinc(self) -> Self {
        let pu = self.scale_f(PI);
        if pu.value().modulus() < 1e-8 {
            let sq = pu * pu;
            CVar::new(1.0 - sq.re / 6.0, -(sq.im / 6.0))
        } else {
            pu.sin() / pu
        }
    }
}

fn cosh_sinh(x: Var<'_>) -> (Var<'_>, Var<'_>) {
    let ep = x.exp();
    let em = (-x).exp();
    ((ep + em) * 0.5, (ep - em) * 0.5)
}

impl<'t> Add for CVar<'t> {
    type Output = CVar<'t>;
    fn add(self, o: CVar<'t>) -> CVar<'t> {
        CVar::new(self.re + o.re, self.im + o.im)
    }
}

impl<'t> Sub for CVar<'t> {
    type Output = CVar<'t>;
    fn sub(self, o: CVar<'t>) -> CVar<'t> {
        CVar::new(self.re - o.re, self.im - o.im)
    }
}

impl<'t> Mul for CVar<'t> {
    type Output = CVar<'t>;
    fn mul(self, o: CVar<'t>) -> CVar<'t> {
        CVar::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl<'t> Div for CVar<'t> {
    type Output = CVar<'t>;
    fn div(self, o: CVar<'t>) -> CVar<'t> {
        let den = o.norm_sqr();
        let num = self * o.conj();
        CVar::new(num.re / den, num.im / den)
    }
}

impl<'t> Div<Var<'t>> for CVar<'t> {
    type Output = CVar<'t>;
    fn div(self, k: Var<'t>) -> CVar<'t> {
        CVar::new(self.re / k, self.im / k)
    }
}

impl<'t> Neg for CVar<'t> {
    type Output = CVar<'t>;
    fn neg(self) -> CVar<'t> {
        CVar::new(-self.re, -self.im)
    }
}
