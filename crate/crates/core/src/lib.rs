// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accept;
pub mod cli;
pub mod digraph;
pub mod ensembles;
pub mod error;
pub mod factor;
pub mod matrix;
pub mod netgeom;
pub mod regularity;
pub mod rng;
pub mod sampler;
pub mod spectral;
pub mod stats;

pub use digraph::RegularDigraph;
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use rng::RngStream;
