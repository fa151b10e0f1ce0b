//! Reference estimators the robust fits are compared against.
//!
//! These are the `eps = 0`, `C -> infinity` limits of the duals (plain
//! regularized least squares on the same correlation matrices), a plain
//! periodogram for the spectral case, and the classical linear array
//! processors.

use crate::error::{Result, SvmError};
use crate::psm::{arx_valid_rows, ArxCoeffs, ArxOrders, SpectralGrid};
use crate::qp::GramMatrix;
use crate::types::SampledSignal;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Solves `(R + delta I) eta = y`; bumps the ridge and retries when the
/// factorization fails on a semidefinite matrix.
pub fn regularized_ls(gram: &GramMatrix, delta: f64, y: &[f64]) -> Result<Vec<f64>> {
    if gram.dim() != y.len() {
        return Err(SvmError::DimensionMismatch {
            expected: gram.dim(),
            got: y.len(),
        });
    }
    let mut ridge = delta.max(0.0);
    for _ in 0..8 {
        let mut a = gram.entries().clone();
        for i in 0..a.nrows() {
            a[(i, i)] += ridge;
        }
        if let Some(chol) = a.cholesky() {
            let sol = chol.solve(&DVector::from_column_slice(y));
            return Ok(sol.iter().copied().collect());
        }
        let scale = gram
            .entries()
            .diagonal()
            .iter()
            .fold(1e-12f64, |m, v| m.max(v.abs()));
        ridge = (ridge * 10.0).max(1e-10 * scale);
    }
    Err(SvmError::IllConditioned(
        "correlation matrix not positive definite even after ridge bumps".into(),
    ))
}

/// Plain periodogram on the grid frequencies:
/// `P(k) = |sum_n y_n e^{-j k w0 t_n}|^2 / N`.
pub fn ls_periodogram(signal: &SampledSignal, grid: &SpectralGrid) -> Vec<f64> {
    let n = signal.len() as f64;
    grid.omegas()
        .iter()
        .map(|&w| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (&t, &y) in signal.times().iter().zip(signal.values()) {
                re += y * (w * t).cos();
                im -= y * (w * t).sin();
            }
            (re * re + im * im) / n
        })
        .collect()
}

/// Least-squares fit of the difference-equation model on the same
/// correlation matrix as the robust estimator.
pub fn ls_arx_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    orders: &ArxOrders,
    delta: f64,
) -> Result<ArxCoeffs> {
    let gram = crate::psm::arx_gram(x, y, orders)?;
    let rows = arx_valid_rows(orders, y.len(), x.len());
    let targets: Vec<f64> = rows.iter().map(|&n| y.values()[n]).collect();
    let eta = regularized_ls(&gram, delta, &targets)?;
    let mut ar = vec![0.0; orders.ar_order()];
    let mut exo = vec![0.0; orders.exo_order() + 1];
    for (i, &n) in rows.iter().enumerate() {
        for (p, d) in ar.iter_mut().enumerate() {
            *d += eta[i] * y.values()[n - (p + 1)];
        }
        for (k, e) in exo.iter_mut().enumerate() {
            *e += eta[i] * x.values()[n + 1 - k];
        }
    }
    Ok(ArxCoeffs { ar, exo })
}

/// Pure-AR least-squares fit (all-zero input signal).
pub fn ls_ar_fit(y: &SampledSignal, ar_order: usize, delta: f64) -> Result<ArxCoeffs> {
    let zeros = SampledSignal::new(y.times().to_vec(), vec![0.0; y.len()])?;
    ls_arx_fit(&zeros, y, &ArxOrders::new(ar_order, 0)?, delta)
}

/// Pole-zero power spectral density of a difference-equation generator
/// `y_n = e_n + sum_q b_q e_{n-q} + sum_p d_p y_{n-p}`.
pub fn arma_psd(ar: &[f64], ma: &[f64], sigma2: f64, fs: f64, freqs: &[f64]) -> Vec<f64> {
    freqs
        .iter()
        .map(|&f| {
            let mut num = Complex64::new(1.0, 0.0);
            for (q, b) in ma.iter().enumerate() {
                let w = -2.0 * std::f64::consts::PI * (q + 1) as f64 * f / fs;
                num += b * Complex64::new(w.cos(), w.sin());
            }
            let mut den = Complex64::new(1.0, 0.0);
            for (p, d) in ar.iter().enumerate() {
                let w = -2.0 * std::f64::consts::PI * (p + 1) as f64 * f / fs;
                den -= d * Complex64::new(w.cos(), w.sin());
            }
            sigma2 / fs * num.norm_sqr() / den.norm_sqr().max(1e-300)
        })
        .collect()
}

fn sample_covariance(snapshots: &[Vec<Complex64>], ridge: f64) -> DMatrix<Complex64> {
    let k = snapshots[0].len();
    let n = snapshots.len() as f64;
    let mut r: DMatrix<Complex64> = DMatrix::zeros(k, k);
    for snap in snapshots {
        for i in 0..k {
            for j in 0..k {
                r[(i, j)] += snap[i] * snap[j].conj() / n;
            }
        }
    }
    let trace: f64 = (0..k).map(|i| r[(i, i)].re).sum();
    let bump = ridge * trace / k as f64;
    for i in 0..k {
        r[(i, i)] += Complex64::new(bump, 0.0);
    }
    r
}

/// Linear detector weights; applied as `y = w^H x`.
#[derive(Debug, Clone)]
pub struct LinearBeamformer {
    pub weights: Vec<Complex64>,
}

impl LinearBeamformer {
    pub fn detect(&self, snapshot: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(snapshot)
            .map(|(w, x)| w.conj() * x)
            .sum()
    }

    pub fn detect_qpsk(&self, snapshot: &[Complex64]) -> Complex64 {
        crate::psm::qpsk_slice(self.detect(snapshot))
    }
}

/// Least-squares temporal-reference beamformer trained on known symbols:
/// `w = R^-1 p` with `p` the snapshot/symbol cross correlation.
pub fn ls_temporal_beamformer(
    snapshots: &[Vec<Complex64>],
    symbols: &[Complex64],
    ridge: f64,
) -> Result<LinearBeamformer> {
    if snapshots.is_empty() || snapshots.len() != symbols.len() {
        return Err(SvmError::DimensionMismatch {
            expected: snapshots.len(),
            got: symbols.len(),
        });
    }
    let k = snapshots[0].len();
    let n = snapshots.len() as f64;
    let r = sample_covariance(snapshots, ridge);
    let mut p = DVector::zeros(k);
    for (snap, b) in snapshots.iter().zip(symbols) {
        for i in 0..k {
            p[i] += snap[i] * b.conj() / n;
        }
    }
    let w = r
        .lu()
        .solve(&p)
        .ok_or_else(|| SvmError::IllConditioned("singular snapshot covariance".into()))?;
    Ok(LinearBeamformer {
        weights: w.iter().copied().collect(),
    })
}

/// Minimum-variance distortionless-response weights for a known steering
/// vector: `w = R^-1 a0 / (a0^H R^-1 a0)`.
pub fn mvdr_beamformer(
    snapshots: &[Vec<Complex64>],
    steering: &[Complex64],
    ridge: f64,
) -> Result<LinearBeamformer> {
    if snapshots.is_empty() {
        return Err(SvmError::InvalidInput("no snapshots".into()));
    }
    if snapshots[0].len() != steering.len() {
        return Err(SvmError::DimensionMismatch {
            expected: snapshots[0].len(),
            got: steering.len(),
        });
    }
    let r = sample_covariance(snapshots, ridge);
    let a0 = DVector::from_column_slice(steering);
    let ra = r
        .lu()
        .solve(&a0)
        .ok_or_else(|| SvmError::IllConditioned("singular snapshot covariance".into()))?;
    let denom: Complex64 = a0
        .iter()
        .zip(ra.iter())
        .map(|(a, v)| a.conj() * v)
        .sum();
    if denom.norm() < 1e-300 {
        return Err(SvmError::Numeric("degenerate distortionless constraint".into()));
    }
    let w: Vec<Complex64> = ra.iter().map(|v| v / denom.conj()).collect();
    Ok(LinearBeamformer { weights: w })
}
