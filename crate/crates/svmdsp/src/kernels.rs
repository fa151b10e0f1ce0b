//! Kernel constructors and verifiers.
//!
//! Besides the standard linear / polynomial / RBF kernels, this module
//! carries the two kernel families specific to time-series work: the sinc
//! kernel for band-limited interpolation and autocorrelation kernels built
//! from an impulse response. A shift-invariant kernel is admissible exactly
//! when its spectrum is real and nonnegative; [`verify_shift_invariant_mercer`]
//! checks that condition on a sampled lag grid via the DFT, which is exact
//! for finitely supported even sequences (autocorrelations) and a documented
//! approximation for infinite-support kernels such as RBF and sinc (grid
//! extent of at least 8 widths for RBF, 16 main lobes for sinc).

use crate::error::{Result, SvmError};
use crate::qp::{GramMatrix, GramProvenance};

/// `sin(x)/x` with the removable singularity handled by series expansion.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Band-limited interpolation kernel: `sinc(sigma0 * (t1 - t2))`.
///
/// Unity at zero lag and zero whenever `sigma0 * dt` is a nonzero multiple
/// of pi, so samples spaced at `pi / sigma0` see an orthonormal basis.
pub fn sinc_kernel(t1: f64, t2: f64, sigma0: f64) -> f64 {
    sinc(sigma0 * (t1 - t2))
}

/// A finite impulse response `h_0..h_M` with its sample period in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    samples: Vec<f64>,
    sample_period: f64,
}

impl ImpulseResponse {
    pub fn new(samples: Vec<f64>, sample_period: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(SvmError::InvalidInput("empty impulse response".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::InvalidInput(
                "impulse response contains non-finite samples".into(),
            ));
        }
        if !(sample_period > 0.0) || !sample_period.is_finite() {
            return Err(SvmError::InvalidInput("sample period must be > 0".into()));
        }
        Ok(Self {
            samples,
            sample_period,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    /// Duration in samples minus one (`h` is zero outside `0..=order`).
    pub fn order(&self) -> usize {
        self.samples.len() - 1
    }

    /// The autocorrelation `R^h = h (*) h-reversed`, supported on lags
    /// `-M..=M`. Its spectrum is nonnegative by construction, so the induced
    /// shift-invariant kernel is always admissible.
    pub fn autocorrelation(&self) -> Autocorrelation {
        let m = self.order();
        let mut values = vec![0.0; 2 * m + 1];
        for (idx, lag) in (-(m as i64)..=m as i64).enumerate() {
            let mut acc = 0.0;
            for j in 0..=m as i64 {
                let k = j - lag;
                if (0..=m as i64).contains(&k) {
                    acc += self.samples[j as usize] * self.samples[k as usize];
                }
            }
            values[idx] = acc;
        }
        Autocorrelation {
            values,
            order: m,
            sample_period: self.sample_period,
        }
    }
}

/// Sampled autocorrelation sequence of an impulse response, usable as a
/// discrete shift-invariant kernel `K(n, m) = R^h(n - m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    /// Values on lags `-order..=order`.
    values: Vec<f64>,
    order: usize,
    sample_period: f64,
}

impl Autocorrelation {
    /// Value at an integer lag; zero outside the support.
    pub fn at_lag(&self, lag: i64) -> f64 {
        let m = self.order as i64;
        if lag.abs() > m {
            0.0
        } else {
            self.values[(lag + m) as usize]
        }
    }

    /// Value at a continuous time lag in seconds.
    ///
    /// Lags that are not integer multiples of the sample period are linearly
    /// interpolated between the neighbouring integer lags; the interpolation
    /// is the triangular-kernel convolution of the sequence, which keeps the
    /// spectrum nonnegative.
    pub fn at_time(&self, dt: f64) -> f64 {
        let lag = dt / self.sample_period;
        let lo = lag.floor();
        let frac = lag - lo;
        let lo = lo as i64;
        if frac == 0.0 {
            self.at_lag(lo)
        } else {
            (1.0 - frac) * self.at_lag(lo) + frac * self.at_lag(lo + 1)
        }
    }

    /// The lag sequence on `-order..=order`.
    pub fn lag_values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

/// Kernel families available to the estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// Dot product.
    Linear,
    /// `(<u, v> + 1)^degree`.
    Polynomial { degree: u32 },
    /// `exp(-||u - v||^2 / (2 width^2))`.
    Rbf { width: f64 },
    /// `sinc(bandwidth * (t1 - t2))` on scalar time inputs.
    Sinc { bandwidth: f64 },
    /// Autocorrelation of an impulse response, on scalar time inputs.
    Autocorrelation(ImpulseResponse),
    /// Pointwise sum of two kernels on the same input pair (closure of
    /// admissible kernels under addition).
    Sum(Box<KernelSpec>, Box<KernelSpec>),
    /// Sum of two kernels evaluated on the two halves of the input.
    CompositeSum(Box<KernelSpec>, Box<KernelSpec>),
    /// Cross-information composite on the two halves of the input.
    CompositeCross {
        k1: Box<KernelSpec>,
        k2: Box<KernelSpec>,
        k3: Box<KernelSpec>,
        k4: Option<Box<KernelSpec>>,
    },
    /// Identically zero (degenerate but admissible).
    Zero,
}

impl KernelSpec {
    /// Pointwise sum `ka + kb` on the same inputs.
    pub fn sum(ka: KernelSpec, kb: KernelSpec) -> Self {
        KernelSpec::Sum(Box::new(ka), Box::new(kb))
    }

    pub fn rbf(width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(SvmError::InvalidInput("RBF width must be > 0".into()));
        }
        Ok(KernelSpec::Rbf { width })
    }

    pub fn polynomial(degree: u32) -> Result<Self> {
        if degree == 0 {
            return Err(SvmError::InvalidInput(
                "polynomial degree must be >= 1".into(),
            ));
        }
        Ok(KernelSpec::Polynomial { degree })
    }

    pub fn sinc(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(SvmError::InvalidInput("sinc bandwidth must be > 0".into()));
        }
        Ok(KernelSpec::Sinc { bandwidth })
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn check_dims(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        Err(SvmError::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        })
    } else {
        Ok(())
    }
}

/// Evaluates a kernel on two points. Symmetric in its arguments.
///
/// Scalar-lag kernels (sinc, autocorrelation) require one-dimensional
/// inputs; composite kinds split the inputs into two equal halves.
pub fn eval_kernel(spec: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(u, v)?;
    match spec {
        KernelSpec::Linear => Ok(dot(u, v)),
        KernelSpec::Polynomial { degree } => Ok((dot(u, v) + 1.0).powi(*degree as i32)),
        KernelSpec::Rbf { width } => {
            let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            Ok((-d2 / (2.0 * width * width)).exp())
        }
        KernelSpec::Sinc { bandwidth } => {
            if u.len() != 1 {
                return Err(SvmError::InvalidInput(
                    "sinc kernel expects scalar time inputs".into(),
                ));
            }
            Ok(sinc_kernel(u[0], v[0], *bandwidth))
        }
        KernelSpec::Autocorrelation(h) => {
            if u.len() != 1 {
                return Err(SvmError::InvalidInput(
                    "autocorrelation kernel expects scalar time inputs".into(),
                ));
            }
            Ok(h.autocorrelation().at_time(u[0] - v[0]))
        }
        KernelSpec::Sum(ka, kb) => Ok(eval_kernel(ka, u, v)? + eval_kernel(kb, u, v)?),
        KernelSpec::CompositeSum(k1, k2) => {
            let (c1, d1) = split_half(u)?;
            let (c2, d2) = split_half(v)?;
            composite_sum(k1, k2, c1, d1, c2, d2)
        }
        KernelSpec::CompositeCross { k1, k2, k3, k4 } => {
            let (c1, d1) = split_half(u)?;
            let (c2, d2) = split_half(v)?;
            composite_cross(k1, k2, k3, k4.as_deref(), c1, d1, c2, d2)
        }
        KernelSpec::Zero => Ok(0.0),
    }
}

fn split_half(u: &[f64]) -> Result<(&[f64], &[f64])> {
    if u.len() % 2 != 0 {
        return Err(SvmError::InvalidInput(
            "composite kernel expects an even-length concatenated input".into(),
        ));
    }
    Ok(u.split_at(u.len() / 2))
}

/// Summation kernel `K1(c1, c2) + K2(d1, d2)` on paired inputs.
pub fn composite_sum(
    k1: &KernelSpec,
    k2: &KernelSpec,
    c1: &[f64],
    d1: &[f64],
    c2: &[f64],
    d2: &[f64],
) -> Result<f64> {
    Ok(eval_kernel(k1, c1, c2)? + eval_kernel(k2, d1, d2)?)
}

/// Cross-information composite
/// `K1(c1,c2) + K2(d1,d2) + K3(c1,d2) + K3(d1,c2) [+ K4(z1,z2)]`,
/// where `z` is the concatenation of the two parts. The cross terms need
/// both parts in a common dimension, achieved by zero completion.
pub fn composite_cross(
    k1: &KernelSpec,
    k2: &KernelSpec,
    k3: &KernelSpec,
    k4: Option<&KernelSpec>,
    c1: &[f64],
    d1: &[f64],
    c2: &[f64],
    d2: &[f64],
) -> Result<f64> {
    let dim = c1.len().max(d1.len());
    let cp1 = zero_complete(c1, dim);
    let dp1 = zero_complete(d1, dim);
    let cp2 = zero_complete(c2, dim);
    let dp2 = zero_complete(d2, dim);
    let mut total = eval_kernel(k1, &cp1, &cp2)?
        + eval_kernel(k2, &dp1, &dp2)?
        + eval_kernel(k3, &cp1, &dp2)?
        + eval_kernel(k3, &dp1, &cp2)?;
    if let Some(k4) = k4 {
        let z1: Vec<f64> = c1.iter().chain(d1.iter()).copied().collect();
        let z2: Vec<f64> = c2.iter().chain(d2.iter()).copied().collect();
        total += eval_kernel(k4, &z1, &z2)?;
    }
    Ok(total)
}

fn zero_complete(u: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    out[..u.len()].copy_from_slice(u);
    out
}

/// Outcome of the sampled spectral admissibility check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MercerCheck {
    pub is_mercer: bool,
    /// Smallest real part of the DFT of the lag sequence.
    pub min_spectrum: f64,
}

/// Checks that a sampled shift-invariant kernel has a nonnegative spectrum.
///
/// `k_samples` holds `K(lag)` on a symmetric grid around lag zero (odd
/// length). Returns true when the minimum real part of its DFT is at least
/// `-tol` times the maximum and the imaginary leakage stays below the same
/// bound.
pub fn verify_shift_invariant_mercer(k_samples: &[f64], tol: f64) -> Result<MercerCheck> {
    let n = k_samples.len();
    if n == 0 || n % 2 == 0 {
        return Err(SvmError::InvalidInput(
            "lag grid must be symmetric around zero (odd length)".into(),
        ));
    }
    if k_samples.iter().any(|v| !v.is_finite()) {
        return Err(SvmError::InvalidInput("non-finite kernel sample".into()));
    }
    let scale = k_samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n / 2 {
        if (k_samples[i] - k_samples[n - 1 - i]).abs() > tol * scale.max(1e-300) {
            return Err(SvmError::InvalidInput(
                "lag sequence is not even-symmetric".into(),
            ));
        }
    }

    let mut min_re = f64::INFINITY;
    let mut max_re = f64::NEG_INFINITY;
    let mut max_im = 0.0f64;
    // the sequence is real and even, so the spectrum should be real; the
    // imaginary part is still accumulated to bound asymmetry leakage
    let center = (n / 2) as f64;
    for j in 0..n {
        let omega = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (m, &v) in k_samples.iter().enumerate() {
            let phase = omega * (m as f64 - center);
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        min_re = min_re.min(re);
        max_re = max_re.max(re);
        max_im = max_im.max(im.abs());
    }
    let bound = tol * max_re.max(0.0).max(1e-300);
    Ok(MercerCheck {
        is_mercer: min_re >= -bound && max_im <= bound,
        min_spectrum: min_re,
    })
}

/// Assembles the Gram matrix of a kernel over a point set.
pub fn gram_from_kernel(
    spec: &KernelSpec,
    points: &[Vec<f64>],
    provenance: GramProvenance,
) -> Result<GramMatrix> {
    let n = points.len();
    let mut entries = nalgebra::DMatrix::zeros(n, n);
    for m in 0..n {
        for j in m..n {
            let v = eval_kernel(spec, &points[m], &points[j])?;
            entries[(m, j)] = v;
            entries[(j, m)] = v;
        }
    }
    GramMatrix::new(entries, provenance)
}
