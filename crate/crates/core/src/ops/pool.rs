//! Channelwise max pooling with argmax retention.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{pad_begin, Padding};
use crate::error::{CoreError, Result};
use crate::real::Real;
use crate::tensor::{Shape, TensorBase};

/// Per-window channelwise max with same-style window placement: output
/// extents are `ceil(in/stride)` and windows beyond the edge see −inf fill
/// (out-of-bounds cells are simply not candidates). Returned indices are
/// flat offsets into the input buffer, one per output element; ties resolve
/// to the first (row-major) maximal cell.
pub fn maxpool2d<T: Real>(
    x: &TensorBase<T>,
    kernel: usize,
    stride: usize,
) -> Result<(TensorBase<T>, Vec<usize>)> {
    let d = x.shape().dims();
    if d.len() != 4 {
        return Err(CoreError::ShapeMismatch(format!(
            "maxpool input must be rank 4, got {}",
            x.shape()
        )));
    }
    let (batch, in_h, in_w, c) = (d[0], d[1], d[2], d[3]);
    let out_h = super::out_extent(in_h, kernel, stride, Padding::Same)?;
    let out_w = super::out_extent(in_w, kernel, stride, Padding::Same)?;
    let pad_y = pad_begin(in_h, kernel, stride, out_h);
    let pad_x = pad_begin(in_w, kernel, stride, out_w);

    let mut out = TensorBase::zeros(Shape::new(&[batch, out_h, out_w, c])?);
    let mut argmax = vec![0usize; out.shape().num_elements()];
    let xd = x.data();
    let od = out.data_mut();

    for n in 0..batch {
        for oy in 0..out_h {
            for ox in 0..out_w {
                let obase = ((n * out_h + oy) * out_w + ox) * c;
                for ch in 0..c {
                    let mut best_v = T::ZERO;
                    let mut best_i = usize::MAX;
                    for ky in 0..kernel {
                        let iy = (oy * stride + ky) as isize - pad_y as isize;
                        if iy < 0 || iy >= in_h as isize {
                            continue;
                        }
                        for kx in 0..kernel {
                            let ix = (ox * stride + kx) as isize - pad_x as isize;
                            if ix < 0 || ix >= in_w as isize {
                                continue;
                            }
                            let xi =
                                ((n * in_h + iy as usize) * in_w + ix as usize) * c + ch;
                            let v = xd[xi];
                            if best_i == usize::MAX || v > best_v {
                                best_v = v;
                                best_i = xi;
                            }
                        }
                    }
                    debug_assert_ne!(best_i, usize::MAX, "window always overlaps input");
                    od[obase + ch] = best_v;
                    argmax[obase + ch] = best_i;
                }
            }
        }
    }
    Ok((out, argmax))
}

/// Routes each output gradient to its stored argmax cell.
pub fn maxpool2d_bwd<T: Real>(
    input_shape: &Shape,
    argmax: &[usize],
    grad_out: &TensorBase<T>,
) -> Result<TensorBase<T>> {
    if argmax.len() != grad_out.shape().num_elements() {
        return Err(CoreError::ShapeMismatch(format!(
            "argmax length {} != grad_out elements {}",
            argmax.len(),
            grad_out.shape().num_elements()
        )));
    }
    let mut dx = TensorBase::zeros(input_shape.clone());
    let dxd = dx.data_mut();
    for (i, &g) in grad_out.data().iter().enumerate() {
        dxd[argmax[i]] += g;
    }
    Ok(dx)
}
