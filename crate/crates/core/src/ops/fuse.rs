//! Long-range refinement fusion: upsample a deep feature map to a skip
//! feature's resolution and add them.

use alloc::format;

use super::{upsample_bilinear, upsample_bilinear_bwd};
use crate::error::{CoreError, Result};
use crate::real::Real;
use crate::tensor::{ElemOp, TensorBase};

fn check_pair<T: Real>(deep: &TensorBase<T>, skip: &TensorBase<T>) -> Result<()> {
    let d = deep.shape().dims();
    let s = skip.shape().dims();
    if d.len() != 4 || s.len() != 4 {
        return Err(CoreError::ShapeMismatch(
            "fuse_refine operands must be rank 4".into(),
        ));
    }
    if d[0] != s[0] || d[3] != s[3] {
        return Err(CoreError::ShapeMismatch(format!(
            "fuse_refine requires equal batch and channels, got {} and {}",
            deep.shape(),
            skip.shape()
        )));
    }
    if d[1] > s[1] || d[2] > s[2] {
        return Err(CoreError::ShapeMismatch(format!(
            "deep spatial {} exceeds skip spatial {}",
            deep.shape(),
            skip.shape()
        )));
    }
    Ok(())
}

/// `upsample_bilinear(deep -> skip spatial) + skip`, elementwise.
pub fn fuse_refine<T: Real>(deep: &TensorBase<T>, skip: &TensorBase<T>) -> Result<TensorBase<T>> {
    check_pair(deep, skip)?;
    let s = skip.shape().dims();
    let up = upsample_bilinear(deep, s[1], s[2])?;
    crate::tensor::elementwise(ElemOp::Add, &up, skip)
}

/// Returns `(grad_deep, grad_skip)`.
pub fn fuse_refine_bwd<T: Real>(
    deep: &TensorBase<T>,
    skip: &TensorBase<T>,
    grad_out: &TensorBase<T>,
) -> Result<(TensorBase<T>, TensorBase<T>)> {
    check_pair(deep, skip)?;
    if grad_out.shape() != skip.shape() {
        return Err(CoreError::ShapeMismatch(format!(
            "grad_out shape {} must match skip shape {}",
            grad_out.shape(),
            skip.shape()
        )));
    }
    let d = deep.shape().dims();
    let grad_deep = upsample_bilinear_bwd(d[1], d[2], grad_out)?;
    Ok((grad_deep, grad_out.clone()))
}
