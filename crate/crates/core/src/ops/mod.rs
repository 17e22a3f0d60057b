//! Differentiable neural-network operations, forward and backward.
//!
//! Conventions shared by every kernel:
//!
//! - Activations are `[N, H, W, C]`; conv weights are `[k, k, Cin/groups,
//!   Cout]`, depthwise weights `[k, k, C, 1]`, biases `[Cout]`.
//! - Same padding produces `ceil(in/stride)` output extents with zero fill
//!   (−inf fill for max pooling); the leading pad is `floor(total/2)`.
//!   Valid padding produces `floor((in − k)/stride) + 1`, which must be ≥ 1.
//! - Each output element accumulates bias first, then products in
//!   `(ky, kx, ci)` row-major order. Reference implementations must follow
//!   the same order so results match exactly.
//! - Backward passes are exact analytic gradients of these definitions;
//!   `relu` uses subgradient 0 at the kink, max pooling routes gradient to
//!   the first (row-major) maximal element of each window.

mod activation;
mod conv;
mod fuse;
mod pool;
mod resize;

pub use activation::{
    relu, relu_bwd, sigmoid, sigmoid_bwd, softmax_channels, softmax_channels_bwd,
};
pub use conv::{
    conv2d_bwd, conv2d_fwd, depthwise_conv2d_bwd, depthwise_conv2d_fwd, pointwise_conv2d_bwd,
    pointwise_conv2d_fwd, ConvGrad, ConvParams, Padding,
};
pub use fuse::{fuse_refine, fuse_refine_bwd};
pub use pool::{maxpool2d, maxpool2d_bwd};
pub use resize::{upsample_bilinear, upsample_bilinear_bwd};

use crate::error::{CoreError, Result};
use alloc::format;

/// Output extent for one spatial dimension.
pub fn out_extent(input: usize, kernel: usize, stride: usize, padding: Padding) -> Result<usize> {
    if kernel == 0 || stride == 0 {
        return Err(CoreError::InvalidParameter(
            "kernel and stride must be >= 1".into(),
        ));
    }
    match padding {
        Padding::Same => Ok(input.div_ceil(stride)),
        Padding::Valid => {
            if input < kernel {
                Err(CoreError::InvalidParameter(format!(
                    "valid padding with kernel {kernel} > input {input} yields empty output"
                )))
            } else {
                Ok((input - kernel) / stride + 1)
            }
        }
    }
}

/// Leading pad for same padding: `floor(max((out-1)*s + k - in, 0) / 2)`.
pub(crate) fn pad_begin(input: usize, kernel: usize, stride: usize, out: usize) -> usize {
    let needed = (out - 1) * stride + kernel;
    needed.saturating_sub(input) / 2
}
