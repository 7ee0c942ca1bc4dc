// NaN-rejecting comparisons such as `!(x > 0.0)` are deliberate throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activations;
pub mod cli;
pub mod network;
pub mod numerics;
pub mod spectral;
pub mod tasks;
