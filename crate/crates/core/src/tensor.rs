//! Dense tensor storage, shape algebra, and elementwise/reduction kernels.
//!
//! Activations are laid out `[N, H, W, C]`, channels innermost, so the
//! depthwise and pointwise kernels that dominate these networks stride
//! contiguously. Every operation materializes its output; there are no
//! views or strided aliases. Values are `f32` in normal operation and
//! `f64` in gradient-check mode.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::real::Real;

pub const MAX_RANK: usize = 4;

/// Ordered list of positive extents, rank 1 to 4.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_RANK {
            return Err(CoreError::InvalidShape(format!(
                "rank must be 1..={MAX_RANK}, got {}",
                dims.len()
            )));
        }
        let mut count: u64 = 1;
        for &d in dims {
            if d == 0 {
                return Err(CoreError::InvalidShape(format!("zero extent in {dims:?}")));
            }
            count = count.checked_mul(d as u64).ok_or_else(|| {
                CoreError::InvalidShape(format!("element count overflows u64 for {dims:?}"))
            })?;
        }
        // Buffers are indexed with usize; on 64-bit targets this matches u64.
        if count > usize::MAX as u64 {
            return Err(CoreError::InvalidShape(format!(
                "element count {count} exceeds addressable memory"
            )));
        }
        Ok(Shape {
            dims: dims.to_vec(),
        })
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.dims[axis]
    }

    pub fn num_elements(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides, innermost dimension contiguous.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }
}

impl core::fmt::Display for Shape {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:?}", self.dims)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElemOp {
    Add,
    Mul,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceOp {
    Sum,
    Mean,
    Max,
}

/// Dense row-major tensor over `f32` or `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBase<T> {
    shape: Shape,
    data: Vec<T>,
}

pub type Tensor = TensorBase<f32>;
pub type F64Tensor = TensorBase<f64>;

impl<T: Real> TensorBase<T> {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.num_elements();
        TensorBase {
            shape,
            data: vec![T::ZERO; n],
        }
    }

    pub fn zeros_like(other: &Self) -> Self {
        Self::zeros(other.shape.clone())
    }

    pub fn filled(shape: Shape, value: T) -> Self {
        let n = shape.num_elements();
        TensorBase {
            shape,
            data: vec![value; n],
        }
    }

    pub fn from_vec(shape: Shape, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.num_elements() {
            return Err(CoreError::ShapeMismatch(format!(
                "data length {} != element count {} of shape {}",
                data.len(),
                shape.num_elements(),
                shape
            )));
        }
        Ok(TensorBase { shape, data })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Reinterprets the buffer under a new shape with the same element count.
    pub fn reshaped(&self, shape: Shape) -> Result<Self> {
        if shape.num_elements() != self.data.len() {
            return Err(CoreError::ShapeMismatch(format!(
                "cannot reshape {} elements to {}",
                self.data.len(),
                shape
            )));
        }
        Ok(TensorBase {
            shape,
            data: self.data.clone(),
        })
    }

    #[inline]
    pub fn at4(&self, n: usize, h: usize, w: usize, c: usize) -> T {
        let d = self.shape.dims();
        debug_assert_eq!(d.len(), 4);
        self.data[((n * d[1] + h) * d[2] + w) * d[3] + c]
    }

    #[inline]
    pub fn at4_mut(&mut self, n: usize, h: usize, w: usize, c: usize) -> &mut T {
        let d = &self.shape.dims;
        debug_assert_eq!(d.len(), 4);
        &mut self.data[((n * d[1] + h) * d[2] + w) * d[3] + c]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        TensorBase {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::ZERO;
        for &v in &self.data {
            m = m.max(v.abs());
        }
        m
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn to_f64(&self) -> F64Tensor {
        TensorBase {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v.to_f64()).collect(),
        }
    }

    pub fn to_f32(&self) -> Tensor {
        TensorBase {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v.to_f32()).collect(),
        }
    }
}

/// Pointwise binary operation. `b` must either match `a`'s shape exactly or
/// be broadcastable along leading axes: same rank, leading extents 1, and
/// trailing extents equal to `a`'s.
pub fn elementwise<T: Real>(
    op: ElemOp,
    a: &TensorBase<T>,
    b: &TensorBase<T>,
) -> Result<TensorBase<T>> {
    let apply = |x: T, y: T| -> T {
        match op {
            ElemOp::Add => x + y,
            ElemOp::Mul => x * y,
            ElemOp::Max => x.max(y),
        }
    };
    if a.shape == b.shape {
        let data = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(&x, &y)| apply(x, y))
            .collect();
        return Ok(TensorBase {
            shape: a.shape.clone(),
            data,
        });
    }
    let tail = broadcast_tail_len(&a.shape, &b.shape).ok_or_else(|| {
        CoreError::ShapeMismatch(format!(
            "cannot broadcast {} with {}",
            b.shape(),
            a.shape()
        ))
    })?;
    let mut out = TensorBase::zeros_like(a);
    for (i, &x) in a.data.iter().enumerate() {
        out.data[i] = apply(x, b.data[i % tail]);
    }
    Ok(out)
}

/// Returns the broadcast period when `b` has leading-1 extents and a trailing
/// block equal to `a`'s trailing dims; `None` if the shapes are incompatible.
fn broadcast_tail_len(a: &Shape, b: &Shape) -> Option<usize> {
    if a.rank() != b.rank() {
        return None;
    }
    let mut split = 0;
    while split < b.rank() && b.dims()[split] == 1 {
        split += 1;
    }
    if b.dims()[split..] != a.dims()[split..] {
        return None;
    }
    Some(b.dims()[split..].iter().product::<usize>().max(1))
}

/// Reduction along one axis; the axis is removed from the shape (a rank-1
/// input reduces to shape `[1]`). `Sum` and `Mean` use compensated (Kahan)
/// accumulation so chained reductions stay close to a full-precision sum.
pub fn reduce<T: Real>(op: ReduceOp, t: &TensorBase<T>, axis: usize) -> Result<TensorBase<T>> {
    let rank = t.shape.rank();
    if axis >= rank {
        return Err(CoreError::IndexOutOfRange(format!(
            "axis {axis} out of range for rank {rank}"
        )));
    }
    let dims = t.shape.dims();
    let outer: usize = dims[..axis].iter().product();
    let extent = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();

    let mut out_dims: Vec<usize> = dims[..axis].to_vec();
    out_dims.extend_from_slice(&dims[axis + 1..]);
    if out_dims.is_empty() {
        out_dims.push(1);
    }
    let out_shape = Shape::new(&out_dims)?;
    let mut out = TensorBase::zeros(out_shape);

    for o in 0..outer {
        for i in 0..inner {
            let base = o * extent * inner + i;
            let v = match op {
                ReduceOp::Sum | ReduceOp::Mean => {
                    let mut sum = T::ZERO;
                    let mut comp = T::ZERO;
                    for k in 0..extent {
                        let y = t.data[base + k * inner] - comp;
                        let s = sum + y;
                        comp = (s - sum) - y;
                        sum = s;
                    }
                    if op == ReduceOp::Mean {
                        sum / T::from_usize(extent)
                    } else {
                        sum
                    }
                }
                ReduceOp::Max => {
                    let mut m = t.data[base];
                    for k in 1..extent {
                        m = m.max(t.data[base + k * inner]);
                    }
                    m
                }
            };
            out.data[o * inner + i] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: &[usize], data: &[f32]) -> Tensor {
        Tensor::from_vec(Shape::new(dims).unwrap(), data.to_vec()).unwrap()
    }

    #[test]
    fn zeros_examples() {
        let z = Tensor::zeros(Shape::new(&[2, 2]).unwrap());
        assert_eq!(z.data(), &[0.0; 4]);
        let z = Tensor::zeros(Shape::new(&[1]).unwrap());
        assert_eq!(z.data(), &[0.0]);
        let z = Tensor::zeros(Shape::new(&[3, 4, 4, 2]).unwrap());
        assert_eq!(z.data().len(), 96);
        assert!(z.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_rejects_invalid() {
        assert!(Shape::new(&[]).is_err());
        assert!(Shape::new(&[1, 2, 3, 4, 5]).is_err());
        assert!(Shape::new(&[0, 3]).is_err());
        assert!(Shape::new(&[u64::MAX as usize, 2]).is_err());
    }

    #[test]
    fn elementwise_examples() {
        let a = t(&[2], &[1.0, 2.0]);
        let b = t(&[2], &[3.0, 4.0]);
        assert_eq!(elementwise(ElemOp::Mul, &a, &b).unwrap().data(), &[3.0, 8.0]);

        let x = t(&[2, 2], &[1.5, -2.0, 0.25, 7.0]);
        let z = Tensor::zeros_like(&x);
        assert_eq!(elementwise(ElemOp::Add, &x, &z).unwrap().data(), x.data());

        let a = t(&[2], &[-1.0, 5.0]);
        let b = t(&[2], &[0.0, 0.0]);
        assert_eq!(elementwise(ElemOp::Max, &a, &b).unwrap().data(), &[0.0, 5.0]);
    }

    #[test]
    fn elementwise_trailing_broadcast() {
        // b shaped [1, C] against a [2, 3]: per-row add of a C-vector.
        let a = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let b = t(&[1, 3], &[10.0, 20.0, 30.0]);
        let r = elementwise(ElemOp::Add, &a, &b).unwrap();
        assert_eq!(r.data(), &[11.0, 22.0, 33.0, 14.0, 25.0, 36.0]);

        let bad = t(&[1, 2], &[1.0, 2.0]);
        assert!(elementwise(ElemOp::Add, &a, &bad).is_err());
    }

    #[test]
    fn reduce_examples() {
        let m = t(&[2, 2], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(reduce(ReduceOp::Sum, &m, 0).unwrap().data(), &[4.0, 6.0]);

        let m = t(&[1, 2], &[2.0, 4.0]);
        assert_eq!(reduce(ReduceOp::Mean, &m, 1).unwrap().data(), &[3.0]);

        let m = t(&[2, 2], &[1.0, 9.0, 5.0, 3.0]);
        assert_eq!(reduce(ReduceOp::Max, &m, 1).unwrap().data(), &[9.0, 5.0]);

        assert!(reduce(ReduceOp::Sum, &m, 2).is_err());
    }

    #[test]
    fn add_mul_match_left_fold_reference() {
        let mut rng = crate::rng::Rng::new(42);
        let dims = [3, 5, 4, 2];
        let n: usize = dims.iter().product();
        let a = Tensor::from_vec(
            Shape::new(&dims).unwrap(),
            (0..n).map(|_| rng.range_f32(-2.0, 2.0)).collect(),
        )
        .unwrap();
        let b = Tensor::from_vec(
            Shape::new(&dims).unwrap(),
            (0..n).map(|_| rng.range_f32(-2.0, 2.0)).collect(),
        )
        .unwrap();
        let sum = elementwise(ElemOp::Add, &a, &b).unwrap();
        let prod = elementwise(ElemOp::Mul, &a, &b).unwrap();
        for i in 0..n {
            let s = a.data()[i] + b.data()[i];
            let p = a.data()[i] * b.data()[i];
            assert!((sum.data()[i] - s).abs() <= 1e-6 * s.abs().max(1.0));
            assert!((prod.data()[i] - p).abs() <= 1e-6 * p.abs().max(1.0));
        }
    }

    #[test]
    fn reduce_sum_matches_kahan_reference_on_large_tensor() {
        // 10^6 elements, reduced axis by axis, against one flat Kahan sum.
        let mut rng = crate::rng::Rng::new(9);
        let dims = [100, 100, 100];
        let data: Vec<f32> = (0..1_000_000).map(|_| rng.range_f32(-1.0, 1.0)).collect();

        let mut kahan = 0.0f32;
        let mut comp = 0.0f32;
        for &v in &data {
            let y = v - comp;
            let s = kahan + y;
            comp = (s - kahan) - y;
            kahan = s;
        }

        let t = Tensor::from_vec(Shape::new(&dims).unwrap(), data).unwrap();
        let r = reduce(ReduceOp::Sum, &t, 0).unwrap();
        let r = reduce(ReduceOp::Sum, &r, 0).unwrap();
        let r = reduce(ReduceOp::Sum, &r, 0).unwrap();
        assert_eq!(r.data().len(), 1);
        let got = r.data()[0];
        assert!(
            (got - kahan).abs() <= 1e-6 * kahan.abs().max(1.0),
            "got {got}, kahan {kahan}"
        );
    }

    #[test]
    fn rank1_reduce_yields_shape_1() {
        let v = t(&[4], &[1.0, 2.0, 3.0, 4.0]);
        let r = reduce(ReduceOp::Sum, &v, 0).unwrap();
        assert_eq!(r.shape().dims(), &[1]);
        assert_eq!(r.data(), &[10.0]);
    }
}
