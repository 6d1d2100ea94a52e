//! Minimal dense-tensor arithmetic with hand-written backward passes.
//!
//! Everything is 64-bit, row-major, channels-first. Convolution is always
//! "valid" (no padding); the layer stacks upstream are sized so spatial
//! dimensions stay clean. Backward passes are written per operation rather
//! than through a general autodiff graph, and [`finite_diff`] is the oracle
//! they are checked against.

use thiserror::Error;

/// Errors from tensor construction and shape-checked operations.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("dimension mismatch on {axis}: expected {expected}, got {got}")]
    DimMismatch {
        axis: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("expected rank-{expected} tensor, got rank {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("{axis} must be even for 2x2 pooling, got {got}")]
    OddDimension { axis: &'static str, got: usize },
    #[error("stride must be >= 1")]
    ZeroStride,
    #[error("data length {got} does not match dims product {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Dense row-major tensor of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dims: &[usize]) -> Self {
        let len = dims.iter().product();
        Tensor {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(dims: &[usize], data: Vec<f64>) -> Result<Self, NumericsError> {
        let expected = dims.iter().product();
        if data.len() != expected {
            return Err(NumericsError::LengthMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Tensor {
            dims: dims.to_vec(),
            data,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// True when every element is finite (no NaN or infinity).
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn expect_rank(&self, rank: usize) -> Result<(), NumericsError> {
        if self.dims.len() != rank {
            return Err(NumericsError::RankMismatch {
                expected: rank,
                got: self.dims.len(),
            });
        }
        Ok(())
    }
}

/// Valid 2-D convolution of a `[C,H,W]` input with `[K,C,kh,kw]` kernels.
///
/// Output is `[K,H',W']` with `H' = (H-kh)/stride + 1` and likewise for `W'`.
/// Each output element is the inner product of a kernel with its receptive
/// patch, plus the kernel's bias.
pub fn conv2d(
    input: &Tensor,
    kernels: &Tensor,
    bias: &[f64],
    stride: usize,
) -> Result<Tensor, NumericsError> {
    input.expect_rank(3)?;
    kernels.expect_rank(4)?;
    if stride == 0 {
        return Err(NumericsError::ZeroStride);
    }
    let (c, h, w) = (input.dims[0], input.dims[1], input.dims[2]);
    let (k, kc, kh, kw) = (
        kernels.dims[0],
        kernels.dims[1],
        kernels.dims[2],
        kernels.dims[3],
    );
    if kc != c {
        return Err(NumericsError::DimMismatch {
            axis: "input channels",
            expected: kc,
            got: c,
        });
    }
    if kh > h {
        return Err(NumericsError::DimMismatch {
            axis: "kernel height",
            expected: h,
            got: kh,
        });
    }
    if kw > w {
        return Err(NumericsError::DimMismatch {
            axis: "kernel width",
            expected: w,
            got: kw,
        });
    }
    if bias.len() != k {
        return Err(NumericsError::DimMismatch {
            axis: "bias length",
            expected: k,
            got: bias.len(),
        });
    }

    let oh = (h - kh) / stride + 1;
    let ow = (w - kw) / stride + 1;
    let mut out = Tensor::zeros(&[k, oh, ow]);
    let x = input.data();
    let ker = kernels.data();
    let o = out.data_mut();
    for f in 0..k {
        let kbase = f * c * kh * kw;
        for oy in 0..oh {
            for ox in 0..ow {
                let iy0 = oy * stride;
                let ix0 = ox * stride;
                let mut acc = bias[f];
                for ch in 0..c {
                    let xbase = ch * h * w;
                    let kcbase = kbase + ch * kh * kw;
                    for ky in 0..kh {
                        let xrow = xbase + (iy0 + ky) * w + ix0;
                        let krow = kcbase + ky * kw;
                        for kx in 0..kw {
                            acc += x[xrow + kx] * ker[krow + kx];
                        }
                    }
                }
                o[f * oh * ow + oy * ow + ox] = acc;
            }
        }
    }
    Ok(out)
}

/// Backward pass of [`conv2d`]: given the loss gradient at the output,
/// returns `(d_input, d_kernels, d_bias)`.
pub fn conv2d_backward(
    input: &Tensor,
    kernels: &Tensor,
    stride: usize,
    grad_out: &Tensor,
) -> Result<(Tensor, Tensor, Vec<f64>), NumericsError> {
    input.expect_rank(3)?;
    kernels.expect_rank(4)?;
    grad_out.expect_rank(3)?;
    if stride == 0 {
        return Err(NumericsError::ZeroStride);
    }
    let (c, h, w) = (input.dims[0], input.dims[1], input.dims[2]);
    let (k, _, kh, kw) = (
        kernels.dims[0],
        kernels.dims[1],
        kernels.dims[2],
        kernels.dims[3],
    );
    let oh = (h - kh) / stride + 1;
    let ow = (w - kw) / stride + 1;
    if grad_out.dims() != [k, oh, ow] {
        return Err(NumericsError::DimMismatch {
            axis: "grad_out spatial",
            expected: k * oh * ow,
            got: grad_out.len(),
        });
    }

    let mut d_input = Tensor::zeros(&[c, h, w]);
    let mut d_kernels = Tensor::zeros(kernels.dims());
    let mut d_bias = vec![0.0; k];
    let x = input.data();
    let ker = kernels.data();
    let g = grad_out.data();
    let di = d_input.data_mut();
    let dk = d_kernels.data_mut();
    for f in 0..k {
        let kbase = f * c * kh * kw;
        for oy in 0..oh {
            for ox in 0..ow {
                let gv = g[f * oh * ow + oy * ow + ox];
                if gv == 0.0 {
                    continue;
                }
                d_bias[f] += gv;
                let iy0 = oy * stride;
                let ix0 = ox * stride;
                for ch in 0..c {
                    let xbase = ch * h * w;
                    let kcbase = kbase + ch * kh * kw;
                    for ky in 0..kh {
                        let xrow = xbase + (iy0 + ky) * w + ix0;
                        let krow = kcbase + ky * kw;
                        for kx in 0..kw {
                            dk[krow + kx] += gv * x[xrow + kx];
                            di[xrow + kx] += gv * ker[krow + kx];
                        }
                    }
                }
            }
        }
    }
    Ok((d_input, d_kernels, d_bias))
}

/// 2x2 max pooling with stride 2. Returns the pooled tensor and, for each
/// output element, the flat input index of its maximum (used by the backward
/// pass). Spatial dimensions must be even.
pub fn maxpool2(input: &Tensor) -> Result<(Tensor, Vec<usize>), NumericsError> {
    input.expect_rank(3)?;
    let (c, h, w) = (input.dims[0], input.dims[1], input.dims[2]);
    if h % 2 != 0 {
        return Err(NumericsError::OddDimension { axis: "height", got: h });
    }
    if w % 2 != 0 {
        return Err(NumericsError::OddDimension { axis: "width", got: w });
    }
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Tensor::zeros(&[c, oh, ow]);
    let mut argmax = vec![0usize; c * oh * ow];
    let x = input.data();
    let o = out.data_mut();
    for ch in 0..c {
        let xbase = ch * h * w;
        for oy in 0..oh {
            for ox in 0..ow {
                let i00 = xbase + (2 * oy) * w + 2 * ox;
                let candidates = [i00, i00 + 1, i00 + w, i00 + w + 1];
                let mut best = candidates[0];
                for &idx in &candidates[1..] {
                    if x[idx] > x[best] {
                        best = idx;
                    }
                }
                let oidx = ch * oh * ow + oy * ow + ox;
                o[oidx] = x[best];
                argmax[oidx] = best;
            }
        }
    }
    Ok((out, argmax))
}

/// Backward pass of [`maxpool2`]: routes each output gradient to the input
/// position that won the max.
pub fn maxpool2_backward(input_dims: &[usize], argmax: &[usize], grad_out: &Tensor) -> Tensor {
    let mut d_input = Tensor::zeros(input_dims);
    let di = d_input.data_mut();
    for (oidx, &iidx) in argmax.iter().enumerate() {
        di[iidx] += grad_out.data()[oidx];
    }
    d_input
}

/// Central finite differences of a scalar function: one entry per coordinate,
/// `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_diff<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for i in 0..x.len() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f(&probe);
        probe[i] = orig - h;
        let fm = f(&probe);
        probe[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Relative error with an absolute floor, used by the gradient checks.
pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}
