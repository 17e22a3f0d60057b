//! Elementwise activations and the channel softmax.

use alloc::format;

use crate::error::{CoreError, Result};
use crate::real::Real;
use crate::tensor::TensorBase;

pub fn relu<T: Real>(x: &TensorBase<T>) -> TensorBase<T> {
    x.map(|v| v.max(T::ZERO))
}

/// Gradient of relu; subgradient 0 at the kink.
pub fn relu_bwd<T: Real>(x: &TensorBase<T>, grad_out: &TensorBase<T>) -> Result<TensorBase<T>> {
    same_shape(x, grad_out)?;
    let mut dx = TensorBase::zeros_like(x);
    for (i, d) in dx.data_mut().iter_mut().enumerate() {
        if x.data()[i] > T::ZERO {
            *d = grad_out.data()[i];
        }
    }
    Ok(dx)
}

pub fn sigmoid<T: Real>(x: &TensorBase<T>) -> TensorBase<T> {
    x.map(|v| T::ONE / (T::ONE + (-v).exp()))
}

/// Gradient of sigmoid expressed via its output `y`: `g * y * (1 - y)`.
pub fn sigmoid_bwd<T: Real>(y: &TensorBase<T>, grad_out: &TensorBase<T>) -> Result<TensorBase<T>> {
    same_shape(y, grad_out)?;
    let mut dx = TensorBase::zeros_like(y);
    for (i, d) in dx.data_mut().iter_mut().enumerate() {
        let yv = y.data()[i];
        *d = grad_out.data()[i] * yv * (T::ONE - yv);
    }
    Ok(dx)
}

/// Softmax over the innermost (channel) axis, max-shifted for stability.
pub fn softmax_channels<T: Real>(x: &TensorBase<T>) -> Result<TensorBase<T>> {
    let dims = x.shape().dims();
    let c = *dims.last().expect("rank >= 1");
    let rows = x.shape().num_elements() / c;
    let mut out = TensorBase::zeros_like(x);
    let xd = x.data();
    let od = out.data_mut();
    for r in 0..rows {
        let base = r * c;
        let mut m = xd[base];
        for i in 1..c {
            m = m.max(xd[base + i]);
        }
        let mut sum = T::ZERO;
        for i in 0..c {
            let e = (xd[base + i] - m).exp();
            od[base + i] = e;
            sum += e;
        }
        for i in 0..c {
            od[base + i] /= sum;
        }
    }
    Ok(out)
}

/// Gradient of channel softmax via its output `p`:
/// `dz_c = p_c * (g_c - sum_k g_k p_k)` per pixel.
pub fn softmax_channels_bwd<T: Real>(
    p: &TensorBase<T>,
    grad_out: &TensorBase<T>,
) -> Result<TensorBase<T>> {
    same_shape(p, grad_out)?;
    let dims = p.shape().dims();
    let c = *dims.last().expect("rank >= 1");
    let rows = p.shape().num_elements() / c;
    let mut dx = TensorBase::zeros_like(p);
    let pd = p.data();
    let gd = grad_out.data();
    let dd = dx.data_mut();
    for r in 0..rows {
        let base = r * c;
        let mut dot = T::ZERO;
        for i in 0..c {
            dot += gd[base + i] * pd[base + i];
        }
        for i in 0..c {
            dd[base + i] = pd[base + i] * (gd[base + i] - dot);
        }
    }
    Ok(dx)
}

fn same_shape<T: Real>(a: &TensorBase<T>, b: &TensorBase<T>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(CoreError::ShapeMismatch(format!(
            "expected matching shapes, got {} and {}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}
