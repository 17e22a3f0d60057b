//! Core engine for tiny attention-condenser segmentation networks.
//!
//! Everything in this crate is pure computation over heap-allocated buffers:
//! dense `f32` tensors, forward/backward kernels for the depthwise /
//! pointwise / strided-convolution vocabulary, the attention condenser block,
//! declarative network graphs with shape validation, MAC/parameter
//! accounting, symmetric int8 weight quantization, a deterministic synthetic
//! dataset, desk-scale SGD training, and a seeded architecture search.
//!
//! The crate is `no_std` (with `alloc`); file formats, image IO, threading,
//! and the command-line surface live in the companion `attendseg-cli` crate.
//! All float math goes through [`libm`] so results are identical across
//! platforms and between `std` and `no_std` builds.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod complexity;
pub mod condenser;
pub mod data;
pub mod error;
pub mod eval;
pub mod family;
pub mod gradcheck;
pub mod graph;
pub mod model;
pub mod ops;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod quant;
pub mod real;
pub mod rng;
pub mod search;
pub mod tensor;
pub mod train;

pub use error::{CoreError, Result};
pub use real::Real;
pub use tensor::{F64Tensor, Shape, Tensor, TensorBase};
