//! Dual signal models: nonlinear regression of the time instants.
//!
//! Here the observed time stamps themselves are the regressors and the
//! kernel is a shift-invariant autocorrelation function, so the fitted
//! model is literally a convolution of the dual coefficients with the
//! kernel. Sparsity of the solution is controlled directly by the
//! insensitivity band: only support time instants carry weight.
//!
//! For sparse deconvolution with an arbitrary (e.g. causal) impulse
//! response, the observations are first passed through the time-reversed
//! response and re-indexed, after which the effective kernel is the
//! autocorrelation of the response and the multipliers are the spike
//! estimates.

use crate::error::{Result, SvmError};
use crate::kernels::{
    sinc_kernel, verify_shift_invariant_mercer, Autocorrelation, ImpulseResponse, KernelSpec,
};
use crate::qp::{solve_real, DualProblem, GramMatrix, GramProvenance};
use crate::types::{EpsHuberParams, SampledSignal, SvmSolution};

/// Shift-invariant kernels admissible for dual signal models.
#[derive(Debug, Clone, PartialEq)]
pub enum DsmKernel {
    /// `sinc(sigma0 * dt)`.
    Sinc { sigma0: f64 },
    /// `exp(-dt^2 / (2 width^2))`.
    Rbf { width: f64 },
    /// Sampled autocorrelation of an impulse response.
    Autocorrelation(Autocorrelation),
}

impl DsmKernel {
    /// Kernel value at time lag `dt`.
    pub fn at(&self, dt: f64) -> f64 {
        match self {
            DsmKernel::Sinc { sigma0 } => sinc_kernel(dt, 0.0, *sigma0),
            DsmKernel::Rbf { width } => (-dt * dt / (2.0 * width * width)).exp(),
            DsmKernel::Autocorrelation(r) => r.at_time(dt),
        }
    }

    /// Converts from the generic kernel enumeration; only shift-invariant
    /// kinds are accepted.
    pub fn from_spec(spec: &KernelSpec) -> Result<Self> {
        match spec {
            KernelSpec::Sinc { bandwidth } => Ok(DsmKernel::Sinc { sigma0: *bandwidth }),
            KernelSpec::Rbf { width } => Ok(DsmKernel::Rbf { width: *width }),
            KernelSpec::Autocorrelation(h) => Ok(DsmKernel::Autocorrelation(h.autocorrelation())),
            other => Err(SvmError::InvalidInput(format!(
                "kernel {other:?} is not shift-invariant"
            ))),
        }
    }

    /// Samples the kernel on a symmetric lag grid and runs the spectral
    /// admissibility check. Exact for autocorrelations; for sinc and RBF
    /// the grid covers 16 main lobes / 8 widths.
    pub fn verify_mercer(&self, tol: f64) -> Result<bool> {
        let samples = match self {
            DsmKernel::Autocorrelation(r) => r.lag_values().to_vec(),
            DsmKernel::Sinc { sigma0 } => {
                // sampled at the critical spacing pi/sigma0 the lag sequence
                // is exactly the unit impulse, so truncation is benign
                let lobe = std::f64::consts::PI / sigma0;
                sample_lags(16.0 * lobe, 16, |dt| self.at(dt))
            }
            DsmKernel::Rbf { width } => sample_lags(8.0 * width, 256, |dt| self.at(dt)),
        };
        Ok(verify_shift_invariant_mercer(&samples, tol)?.is_mercer)
    }
}

fn sample_lags(extent: f64, half: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * half + 1);
    for i in -(half as i64)..=half as i64 {
        out.push(f(i as f64 * extent / half as f64));
    }
    out
}

/// A fitted dual signal model: multipliers anchored at the sample times.
#[derive(Debug, Clone)]
pub struct DsmPredictor {
    pub solution: SvmSolution,
    anchor_times: Vec<f64>,
    kernel: DsmKernel,
}

impl DsmPredictor {
    /// Evaluates `y(t) = sum_n eta_n K(t_n - t)` at an arbitrary time.
    pub fn predict(&self, t: f64) -> f64 {
        self.solution
            .multipliers
            .iter()
            .zip(&self.anchor_times)
            .map(|(eta, &tn)| eta * self.kernel.at(tn - t))
            .sum()
    }

    pub fn predict_many(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.predict(t)).collect()
    }

    pub fn kernel(&self) -> &DsmKernel {
        &self.kernel
    }

    pub fn anchor_times(&self) -> &[f64] {
        &self.anchor_times
    }
}

const MERCER_CHECK_TOL: f64 = 1e-8;

fn dsm_fit(signal: &SampledSignal, kernel: DsmKernel, loss: &EpsHuberParams) -> Result<DsmPredictor> {
    if !kernel.verify_mercer(MERCER_CHECK_TOL)? {
        return Err(SvmError::InvalidInput(
            "kernel failed the spectral admissibility check".into(),
        ));
    }
    let times = signal.times();
    let gram = GramMatrix::from_fn(times.len(), GramProvenance::Dsm, |m, n| {
        kernel.at(times[m] - times[n])
    });
    let dp = DualProblem::new(gram, signal.values().to_vec(), *loss)?;
    let sol = solve_real(&dp, crate::qp::default_tolerance(&dp.targets))?;
    Ok(DsmPredictor {
        solution: sol,
        anchor_times: times.to_vec(),
        kernel,
    })
}

/// Nonuniform interpolation with the sinc kernel on the time instants.
pub fn dsm_sinc_fit(
    signal: &SampledSignal,
    sigma0: f64,
    loss: &EpsHuberParams,
) -> Result<DsmPredictor> {
    if !(sigma0 > 0.0) || !sigma0.is_finite() {
        return Err(SvmError::InvalidInput("sigma0 must be > 0".into()));
    }
    dsm_fit(signal, DsmKernel::Sinc { sigma0 }, loss)
}

/// Nonuniform interpolation with an RBF kernel on the time instants.
pub fn dsm_rbf_fit(
    signal: &SampledSignal,
    width: f64,
    loss: &EpsHuberParams,
) -> Result<DsmPredictor> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(SvmError::InvalidInput("width must be > 0".into()));
    }
    dsm_fit(signal, DsmKernel::Rbf { width }, loss)
}

/// Matched-filter transformation of the observations:
/// `z_n = y (*) h-reversed, delayed by the response order`.
///
/// The full convolution is computed and indices outside the observation
/// window are discarded (truncation, no wraparound), which keeps the
/// re-indexing causal without aliasing spikes.
pub fn dsm_deconv_transform(y: &SampledSignal, h: &ImpulseResponse) -> Result<SampledSignal> {
    let n = y.len();
    if h.samples().len() > n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            got: h.samples().len(),
        });
    }
    let m = h.order() as i64;
    let taps = h.samples();
    let values = (0..n as i64)
        .map(|idx| {
            // z[idx] = sum_j y[j] h[j - idx + M]
            let mut acc = 0.0;
            for (j, &yv) in y.values().iter().enumerate() {
                let k = j as i64 - idx + m;
                if (0..=m).contains(&k) {
                    acc += yv * taps[k as usize];
                }
            }
            acc
        })
        .collect();
    SampledSignal::new(y.times().to_vec(), values)
}

/// Sparse deconvolution stated in the dual: the multipliers are the spike
/// estimates.
#[derive(Debug, Clone)]
pub struct DsmDeconvFit {
    pub predictor: DsmPredictor,
    /// Spike estimate: the dual coefficients, re-indexed back by the
    /// response order so spike `n` refers to observation index `n`.
    pub spikes: Vec<f64>,
    /// Reconstructed observation `spikes (*) h` on the sample window.
    pub reconstruction: Vec<f64>,
}

/// Fits the transformed observations against the autocorrelation kernel of
/// `h` and reads the spike train off the multipliers.
///
/// The delay that makes the matched-filter stage causal displaces the
/// whole transformed problem by the response order, so the multipliers
/// estimate the input shifted by that amount; `spikes` undoes the shift.
pub fn dsm_deconv_fit(
    y: &SampledSignal,
    h: &ImpulseResponse,
    loss: &EpsHuberParams,
) -> Result<DsmDeconvFit> {
    let z = dsm_deconv_transform(y, h)?;
    let predictor = dsm_fit(&z, DsmKernel::Autocorrelation(h.autocorrelation()), loss)?;
    let eta = &predictor.solution.multipliers;
    let m = h.order();
    let spikes: Vec<f64> = (0..y.len())
        .map(|n| if n + m < eta.len() { eta[n + m] } else { 0.0 })
        .collect();
    let taps = h.samples();
    let len = y.len();
    let mut reconstruction = vec![0.0; len];
    for (idx, r) in reconstruction.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, tap) in taps.iter().enumerate() {
            if idx >= j {
                acc += spikes[idx - j] * tap;
            }
        }
        *r = acc;
    }
    Ok(DsmDeconvFit {
        predictor,
        spikes,
        reconstruction,
    })
}
