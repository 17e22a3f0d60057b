//! Standard, strided, grouped, depthwise, and pointwise 2-D convolution.

use alloc::format;

use super::{out_extent, pad_begin};
use crate::error::{CoreError, Result};
use crate::real::Real;
use crate::tensor::{Shape, TensorBase};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    Same,
    Valid,
}

/// Convolution hyperparameters. `groups` is 1 (standard) or `in_channels`
/// (depthwise with multiplier 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvParams {
    pub kernel: usize,
    pub stride: usize,
    pub padding: Padding,
    pub in_channels: usize,
    pub out_channels: usize,
    pub groups: usize,
}

impl ConvParams {
    pub fn validate(&self) -> Result<()> {
        if self.kernel == 0 || self.stride == 0 {
            return Err(CoreError::InvalidParameter(
                "kernel and stride must be >= 1".into(),
            ));
        }
        if self.in_channels == 0 || self.out_channels == 0 {
            return Err(CoreError::InvalidParameter(
                "channel counts must be >= 1".into(),
            ));
        }
        if self.groups == 0
            || self.in_channels % self.groups != 0
            || self.out_channels % self.groups != 0
        {
            return Err(CoreError::InvalidParameter(format!(
                "groups {} must divide in_channels {} and out_channels {}",
                self.groups, self.in_channels, self.out_channels
            )));
        }
        Ok(())
    }
}

/// Gradients of a convolution: input, weights, bias.
#[derive(Clone, Debug)]
pub struct ConvGrad<T> {
    pub dx: TensorBase<T>,
    pub dw: TensorBase<T>,
    pub db: TensorBase<T>,
}

struct ConvGeometry {
    batch: usize,
    in_h: usize,
    in_w: usize,
    out_h: usize,
    out_w: usize,
    pad_y: usize,
    pad_x: usize,
    cin_per_g: usize,
    cout_per_g: usize,
}

fn geometry<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    b: &TensorBase<T>,
    p: &ConvParams,
) -> Result<ConvGeometry> {
    p.validate()?;
    let xd = x.shape().dims();
    if xd.len() != 4 {
        return Err(CoreError::ShapeMismatch(format!(
            "conv input must be rank 4 [N,H,W,C], got {}",
            x.shape()
        )));
    }
    let (batch, in_h, in_w, cin) = (xd[0], xd[1], xd[2], xd[3]);
    if cin != p.in_channels {
        return Err(CoreError::ShapeMismatch(format!(
            "input has {cin} channels, params expect {}",
            p.in_channels
        )));
    }
    let expect_w = [p.kernel, p.kernel, p.in_channels / p.groups, p.out_channels];
    if w.shape().dims() != expect_w {
        return Err(CoreError::ShapeMismatch(format!(
            "weight shape {} does not match expected {expect_w:?}",
            w.shape()
        )));
    }
    if b.shape().dims() != [p.out_channels] {
        return Err(CoreError::ShapeMismatch(format!(
            "bias shape {} does not match [{}]",
            b.shape(),
            p.out_channels
        )));
    }
    let out_h = out_extent(in_h, p.kernel, p.stride, p.padding)?;
    let out_w = out_extent(in_w, p.kernel, p.stride, p.padding)?;
    let (pad_y, pad_x) = match p.padding {
        Padding::Same => (
            pad_begin(in_h, p.kernel, p.stride, out_h),
            pad_begin(in_w, p.kernel, p.stride, out_w),
        ),
        Padding::Valid => (0, 0),
    };
    Ok(ConvGeometry {
        batch,
        in_h,
        in_w,
        out_h,
        out_w,
        pad_y,
        pad_x,
        cin_per_g: p.in_channels / p.groups,
        cout_per_g: p.out_channels / p.groups,
    })
}

/// Direct 2-D convolution. Output is `[N, H', W', Cout]`; out-of-bounds taps
/// contribute zero and are skipped.
pub fn conv2d_fwd<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    b: &TensorBase<T>,
    p: &ConvParams,
) -> Result<TensorBase<T>> {
    let g = geometry(x, w, b, p)?;
    let cin = p.in_channels;
    let cout = p.out_channels;
    let mut out = TensorBase::zeros(Shape::new(&[g.batch, g.out_h, g.out_w, cout])?);

    let xd = x.data();
    let wd = w.data();
    let bd = b.data();
    let od = out.data_mut();

    for n in 0..g.batch {
        for oy in 0..g.out_h {
            for ox in 0..g.out_w {
                let obase = ((n * g.out_h + oy) * g.out_w + ox) * cout;
                od[obase..obase + cout].copy_from_slice(bd);
                for ky in 0..p.kernel {
                    let iy = (oy * p.stride + ky) as isize - g.pad_y as isize;
                    if iy < 0 || iy >= g.in_h as isize {
                        continue;
                    }
                    for kx in 0..p.kernel {
                        let ix = (ox * p.stride + kx) as isize - g.pad_x as isize;
                        if ix < 0 || ix >= g.in_w as isize {
                            continue;
                        }
                        let xbase = ((n * g.in_h + iy as usize) * g.in_w + ix as usize) * cin;
                        let wbase = (ky * p.kernel + kx) * g.cin_per_g * cout;
                        for grp in 0..p.groups {
                            for ci_g in 0..g.cin_per_g {
                                let xv = xd[xbase + grp * g.cin_per_g + ci_g];
                                let wrow = wbase + ci_g * cout + grp * g.cout_per_g;
                                let orow = obase + grp * g.cout_per_g;
                                for co_g in 0..g.cout_per_g {
                                    od[orow + co_g] += xv * wd[wrow + co_g];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Analytic gradients of [`conv2d_fwd`] with respect to input, weights, bias.
pub fn conv2d_bwd<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    p: &ConvParams,
    grad_out: &TensorBase<T>,
) -> Result<ConvGrad<T>> {
    let bias = TensorBase::zeros(Shape::new(&[p.out_channels])?);
    let g = geometry(x, w, &bias, p)?;
    let cin = p.in_channels;
    let cout = p.out_channels;
    let expect = [g.batch, g.out_h, g.out_w, cout];
    if grad_out.shape().dims() != expect {
        return Err(CoreError::ShapeMismatch(format!(
            "grad_out shape {} does not match forward output {expect:?}",
            grad_out.shape()
        )));
    }

    let mut dx = TensorBase::zeros_like(x);
    let mut dw = TensorBase::zeros_like(w);
    let mut db = TensorBase::zeros(Shape::new(&[cout])?);

    let xd = x.data();
    let wd = w.data();
    let gd = grad_out.data();
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();
    let dbd = db.data_mut();

    for n in 0..g.batch {
        for oy in 0..g.out_h {
            for ox in 0..g.out_w {
                let obase = ((n * g.out_h + oy) * g.out_w + ox) * cout;
                for co in 0..cout {
                    dbd[co] += gd[obase + co];
                }
                for ky in 0..p.kernel {
                    let iy = (oy * p.stride + ky) as isize - g.pad_y as isize;
                    if iy < 0 || iy >= g.in_h as isize {
                        continue;
                    }
                    for kx in 0..p.kernel {
                        let ix = (ox * p.stride + kx) as isize - g.pad_x as isize;
                        if ix < 0 || ix >= g.in_w as isize {
                            continue;
                        }
                        let xbase = ((n * g.in_h + iy as usize) * g.in_w + ix as usize) * cin;
                        let wbase = (ky * p.kernel + kx) * g.cin_per_g * cout;
                        for grp in 0..p.groups {
                            for ci_g in 0..g.cin_per_g {
                                let xi = xbase + grp * g.cin_per_g + ci_g;
                                let wrow = wbase + ci_g * cout + grp * g.cout_per_g;
                                let orow = obase + grp * g.cout_per_g;
                                let xv = xd[xi];
                                let mut acc = T::ZERO;
                                for co_g in 0..g.cout_per_g {
                                    let gv = gd[orow + co_g];
                                    acc += wd[wrow + co_g] * gv;
                                    dwd[wrow + co_g] += xv * gv;
                                }
                                dxd[xi] += acc;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(ConvGrad { dx, dw, db })
}

fn depthwise_params(channels: usize, kernel: usize, stride: usize, padding: Padding) -> ConvParams {
    ConvParams {
        kernel,
        stride,
        padding,
        in_channels: channels,
        out_channels: channels,
        groups: channels,
    }
}

/// Per-channel spatial convolution; weights are `[k, k, C, 1]`.
///
/// A `[k, k, C, 1]` buffer is bit-identical to the `[k, k, 1, C]` layout the
/// grouped kernel expects, so this reshapes and delegates.
pub fn depthwise_conv2d_fwd<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    b: &TensorBase<T>,
    kernel: usize,
    stride: usize,
    padding: Padding,
) -> Result<TensorBase<T>> {
    let c = channels_of(x)?;
    check_depthwise_w(w, kernel, c)?;
    let p = depthwise_params(c, kernel, stride, padding);
    let wg = w.reshaped(Shape::new(&[kernel, kernel, 1, c])?)?;
    conv2d_fwd(x, &wg, b, &p)
}

pub fn depthwise_conv2d_bwd<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    kernel: usize,
    stride: usize,
    padding: Padding,
    grad_out: &TensorBase<T>,
) -> Result<ConvGrad<T>> {
    let c = channels_of(x)?;
    check_depthwise_w(w, kernel, c)?;
    let p = depthwise_params(c, kernel, stride, padding);
    let wg = w.reshaped(Shape::new(&[kernel, kernel, 1, c])?)?;
    let mut grad = conv2d_bwd(x, &wg, &p, grad_out)?;
    grad.dw = grad.dw.reshaped(Shape::new(&[kernel, kernel, c, 1])?)?;
    Ok(grad)
}

/// 1x1 convolution: a per-pixel linear map across channels.
pub fn pointwise_conv2d_fwd<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    b: &TensorBase<T>,
) -> Result<TensorBase<T>> {
    let (cin, cout) = pointwise_channels(w)?;
    let p = ConvParams {
        kernel: 1,
        stride: 1,
        padding: Padding::Same,
        in_channels: cin,
        out_channels: cout,
        groups: 1,
    };
    conv2d_fwd(x, w, b, &p)
}

pub fn pointwise_conv2d_bwd<T: Real>(
    x: &TensorBase<T>,
    w: &TensorBase<T>,
    grad_out: &TensorBase<T>,
) -> Result<ConvGrad<T>> {
    let (cin, cout) = pointwise_channels(w)?;
    let p = ConvParams {
        kernel: 1,
        stride: 1,
        padding: Padding::Same,
        in_channels: cin,
        out_channels: cout,
        groups: 1,
    };
    conv2d_bwd(x, w, &p, grad_out)
}

fn channels_of<T: Real>(x: &TensorBase<T>) -> Result<usize> {
    let d = x.shape().dims();
    if d.len() != 4 {
        return Err(CoreError::ShapeMismatch(format!(
            "expected rank-4 activations, got {}",
            x.shape()
        )));
    }
    Ok(d[3])
}

fn check_depthwise_w<T: Real>(w: &TensorBase<T>, kernel: usize, c: usize) -> Result<()> {
    if w.shape().dims() != [kernel, kernel, c, 1] {
        return Err(CoreError::ShapeMismatch(format!(
            "depthwise weight shape {} does not match [{kernel},{kernel},{c},1]",
            w.shape()
        )));
    }
    Ok(())
}

fn pointwise_channels<T: Real>(w: &TensorBase<T>) -> Result<(usize, usize)> {
    let d = w.shape().dims();
    if d.len() != 4 || d[0] != 1 || d[1] != 1 {
        return Err(CoreError::ShapeMismatch(format!(
            "pointwise weight must be [1,1,Cin,Cout], got {}",
            w.shape()
        )));
    }
    Ok((d[2], d[3]))
}
