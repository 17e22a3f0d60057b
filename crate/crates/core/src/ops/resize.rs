//! Bilinear resampling.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::real::Real;
use crate::tensor::{Shape, TensorBase};

/// Per-axis interpolation table: low index, high index, and the fraction of
/// the high neighbor. Source coordinate is `(i + 0.5) * in/out - 0.5`,
/// clamped to `[0, in-1]` (half-pixel centers, no corner alignment), so an
/// equal-size resize is the identity bit-for-bit.
fn axis_table(out: usize, input: usize) -> Vec<(usize, usize, f64)> {
    let scale = input as f64 / out as f64;
    (0..out)
        .map(|i| {
            let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (input - 1) as f64);
            let lo = src as usize; // floor, src >= 0
            let hi = (lo + 1).min(input - 1);
            (lo, hi, src - lo as f64)
        })
        .collect()
}

pub fn upsample_bilinear<T: Real>(
    x: &TensorBase<T>,
    out_h: usize,
    out_w: usize,
) -> Result<TensorBase<T>> {
    let d = x.shape().dims();
    if d.len() != 4 {
        return Err(CoreError::ShapeMismatch(format!(
            "upsample input must be rank 4, got {}",
            x.shape()
        )));
    }
    if out_h == 0 || out_w == 0 {
        return Err(CoreError::InvalidParameter(
            "output extents must be >= 1".into(),
        ));
    }
    let (batch, in_h, in_w, c) = (d[0], d[1], d[2], d[3]);
    let ys = axis_table(out_h, in_h);
    let xs = axis_table(out_w, in_w);

    let mut out = TensorBase::zeros(Shape::new(&[batch, out_h, out_w, c])?);
    let xd = x.data();
    let od = out.data_mut();
    for n in 0..batch {
        for (oy, &(y0, y1, fy)) in ys.iter().enumerate() {
            for (ox, &(x0, x1, fx)) in xs.iter().enumerate() {
                let w00 = T::from_f64((1.0 - fy) * (1.0 - fx));
                let w01 = T::from_f64((1.0 - fy) * fx);
                let w10 = T::from_f64(fy * (1.0 - fx));
                let w11 = T::from_f64(fy * fx);
                let b00 = ((n * in_h + y0) * in_w + x0) * c;
                let b01 = ((n * in_h + y0) * in_w + x1) * c;
                let b10 = ((n * in_h + y1) * in_w + x0) * c;
                let b11 = ((n * in_h + y1) * in_w + x1) * c;
                let obase = ((n * out_h + oy) * out_w + ox) * c;
                for ch in 0..c {
                    od[obase + ch] = w00 * xd[b00 + ch]
                        + w01 * xd[b01 + ch]
                        + w10 * xd[b10 + ch]
                        + w11 * xd[b11 + ch];
                }
            }
        }
    }
    Ok(out)
}

/// Transpose of [`upsample_bilinear`]: scatters each output gradient onto
/// its four source neighbors with the same weights, in row-major output
/// order.
pub fn upsample_bilinear_bwd<T: Real>(
    in_h: usize,
    in_w: usize,
    grad_out: &TensorBase<T>,
) -> Result<TensorBase<T>> {
    let d = grad_out.shape().dims();
    if d.len() != 4 {
        return Err(CoreError::ShapeMismatch(format!(
            "grad_out must be rank 4, got {}",
            grad_out.shape()
        )));
    }
    let (batch, out_h, out_w, c) = (d[0], d[1], d[2], d[3]);
    let ys = axis_table(out_h, in_h);
    let xs = axis_table(out_w, in_w);

    let mut dx = TensorBase::zeros(Shape::new(&[batch, in_h, in_w, c])?);
    let gd = grad_out.data();
    let dxd = dx.data_mut();
    for n in 0..batch {
        for (oy, &(y0, y1, fy)) in ys.iter().enumerate() {
            for (ox, &(x0, x1, fx)) in xs.iter().enumerate() {
                let w00 = T::from_f64((1.0 - fy) * (1.0 - fx));
                let w01 = T::from_f64((1.0 - fy) * fx);
                let w10 = T::from_f64(fy * (1.0 - fx));
                let w11 = T::from_f64(fy * fx);
                let b00 = ((n * in_h + y0) * in_w + x0) * c;
                let b01 = ((n * in_h + y0) * in_w + x1) * c;
                let b10 = ((n * in_h + y1) * in_w + x0) * c;
                let b11 = ((n * in_h + y1) * in_w + x1) * c;
                let obase = ((n * out_h + oy) * out_w + ox) * c;
                for ch in 0..c {
                    let g = gd[obase + ch];
                    dxd[b00 + ch] += w00 * g;
                    dxd[b01 + ch] += w01 * g;
                    dxd[b10 + ch] += w10 * g;
                    dxd[b11 + ch] += w11 * g;
                }
            }
        }
    }
    Ok(dx)
}
