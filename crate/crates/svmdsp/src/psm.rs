//! Primal signal models.
//!
//! Each estimator in this module states a linear expansion of the
//! observations over a set of explanatory signals, collects the n-th sample
//! of every explanatory signal into the time-transversal vector `s_n`, and
//! hands the correlation matrix `R(m, n) = <s_m, s_n>` to the dual solver.
//! The recovered dual coefficients `eta` then rebuild the primal expansion
//! coefficients as `a = sum_n eta_n s_n`.
//!
//! The expansion carries no bias term; an intercept can be opted into by
//! adding a constant explanatory signal (see [`with_constant_term`]).

use crate::error::{Result, SvmError};
use crate::kernels::{sinc_kernel, ImpulseResponse};
use crate::qp::{
    solve_complex, solve_real, ComplexDualProblem, DualProblem, GramMatrix, GramProvenance,
    HermitianGram,
};
use crate::types::{ComplexSeries, ComplexSvmSolution, EpsHuberParams, SampledSignal, SvmSolution};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Regular frequency grid `k * omega0`, `k = 0..=harmonics`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    omega0: f64,
    harmonics: usize,
}

impl SpectralGrid {
    pub fn new(omega0: f64, harmonics: usize) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(SvmError::InvalidInput("omega0 must be > 0".into()));
        }
        Ok(Self { omega0, harmonics })
    }

    /// Default grid for a signal: fundamental `2 pi / span`, one harmonic
    /// per sample.
    pub fn default_for(signal: &SampledSignal) -> Result<Self> {
        let span = signal.span();
        if !(span > 0.0) {
            return Err(SvmError::InvalidInput(
                "signal span too short for a spectral grid".into(),
            ));
        }
        Self::new(2.0 * PI / span, signal.len())
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    /// Grid angular frequencies in rad/s.
    pub fn omegas(&self) -> Vec<f64> {
        (0..=self.harmonics)
            .map(|k| k as f64 * self.omega0)
            .collect()
    }
}

/// In-phase / quadrature expansion coefficients on a spectral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    in_phase: Vec<f64>,
    quadrature: Vec<f64>,
    omega0: f64,
}

impl SpectralCoeffs {
    pub fn in_phase(&self) -> &[f64] {
        &self.in_phase
    }

    pub fn quadrature(&self) -> &[f64] {
        &self.quadrature
    }

    /// Amplitudes `A_k = sqrt(B_k^2 + C_k^2)`.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.in_phase
            .iter()
            .zip(&self.quadrature)
            .map(|(b, c)| b.hypot(*c))
            .collect()
    }

    /// Phases `atan2(C_k, B_k)`.
    pub fn phases(&self) -> Vec<f64> {
        self.in_phase
            .iter()
            .zip(&self.quadrature)
            .map(|(b, c)| c.atan2(*b))
            .collect()
    }

    /// Reconstruction `sum_k B_k cos(k w0 t) + C_k sin(k w0 t)`.
    pub fn reconstruct(&self, t: f64) -> f64 {
        self.in_phase
            .iter()
            .zip(&self.quadrature)
            .enumerate()
            .map(|(k, (b, c))| {
                let arg = k as f64 * self.omega0 * t;
                b * arg.cos() + c * arg.sin()
            })
            .sum()
    }
}

fn spectral_transversal(t: f64, grid: &SpectralGrid) -> Vec<f64> {
    let mut s = Vec::with_capacity(2 * (grid.harmonics + 1));
    for k in 0..=grid.harmonics {
        s.push((k as f64 * grid.omega0 * t).cos());
    }
    for k in 0..=grid.harmonics {
        s.push((k as f64 * grid.omega0 * t).sin());
    }
    s
}

/// Correlation matrix of the sinusoidal expansion: the sum of the cosine
/// and sine correlation matrices over the grid.
pub fn spectral_gram(times: &[f64], grid: &SpectralGrid) -> GramMatrix {
    let rows: Vec<Vec<f64>> = times
        .iter()
        .map(|&t| spectral_transversal(t, grid))
        .collect();
    GramMatrix::from_fn(times.len(), GramProvenance::Spectral, |m, n| {
        rows[m].iter().zip(&rows[n]).map(|(a, b)| a * b).sum()
    })
}

/// Robust fit of the sinusoidal expansion; recovers in-phase and quadrature
/// coefficients from the dual multipliers.
pub fn spectral_fit(
    signal: &SampledSignal,
    grid: &SpectralGrid,
    loss: &EpsHuberParams,
) -> Result<(SvmSolution, SpectralCoeffs)> {
    let gram = spectral_gram(signal.times(), grid);
    let dp = DualProblem::new(gram, signal.values().to_vec(), *loss)?;
    let sol = solve_real(&dp, crate::qp::default_tolerance(&dp.targets))?;

    let mut in_phase = vec![0.0; grid.harmonics + 1];
    let mut quadrature = vec![0.0; grid.harmonics + 1];
    for (n, &t) in signal.times().iter().enumerate() {
        let eta = sol.multipliers[n];
        if eta == 0.0 {
            continue;
        }
        for k in 0..=grid.harmonics {
            let arg = k as f64 * grid.omega0 * t;
            in_phase[k] += eta * arg.cos();
            quadrature[k] += eta * arg.sin();
        }
    }
    Ok((
        sol,
        SpectralCoeffs {
            in_phase,
            quadrature,
            omega0: grid.omega0,
        },
    ))
}

/// Lag orders of the difference-equation model: `P` output lags and `Q + 1`
/// input taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArxOrders {
    ar_order: usize,
    exo_order: usize,
}

impl ArxOrders {
    pub fn new(ar_order: usize, exo_order: usize) -> Result<Self> {
        if ar_order == 0 {
            return Err(SvmError::InvalidInput("AR order must be >= 1".into()));
        }
        Ok(Self {
            ar_order,
            exo_order,
        })
    }

    pub fn ar_order(&self) -> usize {
        self.ar_order
    }

    pub fn exo_order(&self) -> usize {
        self.exo_order
    }
}

/// AR and input coefficients `D_1..D_P`, `E_0..E_Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArxCoeffs {
    pub ar: Vec<f64>,
    pub exo: Vec<f64>,
}

impl ArxCoeffs {
    /// One-step prediction at row `n` of the given series:
    /// `sum_p D_p y[n-p] + sum_k E_k x[n-k+1]`.
    ///
    /// The input taps start one sample ahead of the output, mirroring the
    /// transversal convention of [`arx_gram`].
    pub fn predict_row(&self, x: &[f64], y: &[f64], n: usize) -> f64 {
        let mut acc = 0.0;
        for (p, d) in self.ar.iter().enumerate() {
            acc += d * y[n - (p + 1)];
        }
        for (k, e) in self.exo.iter().enumerate() {
            acc += e * x[n + 1 - k];
        }
        acc
    }
}

/// Rows of the series with a complete lag window for the given orders.
pub fn arx_valid_rows(orders: &ArxOrders, y_len: usize, x_len: usize) -> Vec<usize> {
    let start = orders.ar_order.max(orders.exo_order.saturating_sub(1));
    // the leading input tap x[n+1] must exist
    let end = y_len.min(x_len.saturating_sub(1));
    (start..end).collect()
}

fn arx_transversal(x: &[f64], y: &[f64], orders: &ArxOrders, n: usize) -> Vec<f64> {
    let mut s = Vec::with_capacity(orders.ar_order + orders.exo_order + 1);
    for p in 1..=orders.ar_order {
        s.push(y[n - p]);
    }
    for k in 0..=orders.exo_order {
        s.push(x[n + 1 - k]);
    }
    s
}

fn require_uniform(signal: &SampledSignal) -> Result<()> {
    let t = signal.times();
    if t.len() < 2 {
        return Ok(());
    }
    let step = t[1] - t[0];
    for w in t.windows(2) {
        if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0) {
            return Err(SvmError::InvalidInput(
                "difference-equation models require uniform sampling".into(),
            ));
        }
    }
    Ok(())
}

/// Sum of the output and input lag correlation matrices over the rows with
/// complete history. Rows with incomplete lag windows are dropped rather
/// than zero padded.
pub fn arx_gram(
    x: &SampledSignal,
    y: &SampledSignal,
    orders: &ArxOrders,
) -> Result<GramMatrix> {
    require_uniform(x)?;
    require_uniform(y)?;
    let rows = arx_valid_rows(orders, y.len(), x.len());
    if rows.is_empty() {
        return Err(SvmError::InvalidInput(
            "signals too short for the requested lag orders".into(),
        ));
    }
    let transversals: Vec<Vec<f64>> = rows
        .iter()
        .map(|&n| arx_transversal(x.values(), y.values(), orders, n))
        .collect();
    Ok(GramMatrix::from_fn(
        rows.len(),
        GramProvenance::Arx,
        |m, n| {
            transversals[m]
                .iter()
                .zip(&transversals[n])
                .map(|(a, b)| a * b)
                .sum()
        },
    ))
}

/// Robust fit of the difference-equation model. Coefficients are rebuilt
/// from the multipliers as `D_k = sum eta_n y[n-k]`, `E_k = sum eta_n x[n-k+1]`.
pub fn arx_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    orders: &ArxOrders,
    loss: &EpsHuberParams,
) -> Result<(SvmSolution, ArxCoeffs)> {
    let gram = arx_gram(x, y, orders)?;
    let rows = arx_valid_rows(orders, y.len(), x.len());
    let targets: Vec<f64> = rows.iter().map(|&n| y.values()[n]).collect();
    let dp = DualProblem::new(gram, targets, *loss)?;
    let sol = solve_real(&dp, crate::qp::default_tolerance(&dp.targets))?;

    let mut ar = vec![0.0; orders.ar_order];
    let mut exo = vec![0.0; orders.exo_order + 1];
    for (i, &n) in rows.iter().enumerate() {
        let eta = sol.multipliers[i];
        if eta == 0.0 {
            continue;
        }
        for (p, d) in ar.iter_mut().enumerate() {
            *d += eta * y.values()[n - (p + 1)];
        }
        for (k, e) in exo.iter_mut().enumerate() {
            *e += eta * x.values()[n + 1 - k];
        }
    }
    Ok((sol, ArxCoeffs { ar, exo }))
}

/// Fits a pure AR model by supplying an all-zero input signal.
pub fn ar_fit(
    y: &SampledSignal,
    ar_order: usize,
    loss: &EpsHuberParams,
) -> Result<(SvmSolution, ArxCoeffs)> {
    let zeros = SampledSignal::new(y.times().to_vec(), vec![0.0; y.len()])?;
    let orders = ArxOrders::new(ar_order, 0)?;
    arx_fit(&zeros, y, &orders, loss)
}

/// All-pole power spectral density
/// `Phi(f) = sigma^2 / fs * |1 - sum_p D_p e^{-j 2 pi p f / fs}|^-2`.
pub fn ar_psd(coeffs: &ArxCoeffs, sigma2: f64, fs: f64, freqs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.ar.is_empty() {
        return Err(SvmError::InvalidInput("no AR coefficients".into()));
    }
    if !(sigma2 > 0.0) || !(fs > 0.0) {
        return Err(SvmError::InvalidInput(
            "variance and sampling rate must be > 0".into(),
        ));
    }
    freqs
        .iter()
        .map(|&f| {
            let mut den = Complex64::new(1.0, 0.0);
            for (p, d) in coeffs.ar.iter().enumerate() {
                let w = -2.0 * PI * (p + 1) as f64 * f / fs;
                den -= d * Complex64::new(w.cos(), w.sin());
            }
            let mag2 = den.norm_sqr();
            if mag2 < 1e-30 {
                return Err(SvmError::Numeric(format!(
                    "PSD evaluated at a pole (f = {f})"
                )));
            }
            Ok(sigma2 / fs / mag2)
        })
        .collect()
}

/// Correlation matrix of the sinc expansion:
/// `R(m, n) = sum_k sinc(s0 (t_m - t_k)) sinc(s0 (t_n - t_k))`.
pub fn sinc_gram(times: &[f64], sigma0: f64) -> GramMatrix {
    let n = times.len();
    let mut basis = vec![vec![0.0; n]; n];
    for (i, row) in basis.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = sinc_kernel(times[i], times[k], sigma0);
        }
    }
    GramMatrix::from_fn(n, GramProvenance::Sinc, |m, j| {
        basis[m].iter().zip(&basis[j]).map(|(a, b)| a * b).sum()
    })
}

/// Band-limited interpolator fitted in the primal: expansion coefficients
/// over sincs anchored at the sample times.
#[derive(Debug, Clone)]
pub struct SincPsmFit {
    pub solution: SvmSolution,
    /// Expansion coefficients `a_k = sum_n eta_n sinc(s0 (t_k - t_n))`.
    pub coefficients: Vec<f64>,
    anchor_times: Vec<f64>,
    sigma0: f64,
}

impl SincPsmFit {
    /// Evaluates `y(t) = sum_k a_k sinc(s0 (t - t_k))` at an arbitrary time.
    pub fn predict(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.anchor_times)
            .map(|(a, &tk)| a * sinc_kernel(t, tk, self.sigma0))
            .sum()
    }

    pub fn predict_many(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.predict(t)).collect()
    }
}

pub fn sinc_psm_fit(
    signal: &SampledSignal,
    sigma0: f64,
    loss: &EpsHuberParams,
) -> Result<SincPsmFit> {
    if !(sigma0 > 0.0) || !sigma0.is_finite() {
        return Err(SvmError::InvalidInput("sigma0 must be > 0".into()));
    }
    let gram = sinc_gram(signal.times(), sigma0);
    let dp = DualProblem::new(gram, signal.values().to_vec(), *loss)?;
    let sol = solve_real(&dp, crate::qp::default_tolerance(&dp.targets))?;
    let times = signal.times();
    let coefficients: Vec<f64> = times
        .iter()
        .map(|&tk| {
            sol.multipliers
                .iter()
                .zip(times)
                .map(|(eta, &tn)| eta * sinc_kernel(tk, tn, sigma0))
                .sum()
        })
        .collect();
    Ok(SincPsmFit {
        solution: sol,
        coefficients,
        anchor_times: times.to_vec(),
        sigma0,
    })
}

/// Correlation matrix of the shifted impulse-response expansion; equals the
/// sample correlation matrix of `h` (Toeplitz away from the borders).
pub fn deconv_gram(len: usize, h: &ImpulseResponse) -> GramMatrix {
    let taps = h.samples();
    let m = h.order() as i64;
    let at = |i: i64| -> f64 {
        if (0..=m).contains(&i) {
            taps[i as usize]
        } else {
            0.0
        }
    };
    GramMatrix::from_fn(len, GramProvenance::Deconv, |r, c| {
        let mut acc = 0.0;
        for k in 0..len as i64 {
            acc += at(r as i64 - k) * at(c as i64 - k);
        }
        acc
    })
}

/// Deconvolution result stated in the primal: the estimated input sequence
/// and the reconstructed observation.
#[derive(Debug, Clone)]
pub struct DeconvPsmFit {
    pub solution: SvmSolution,
    /// Input estimate `x_n = sum_i eta_i h[i - n]` (correlation of the
    /// multipliers with the impulse response).
    pub input_estimate: Vec<f64>,
    /// `x (*) h`, truncated to the observation window.
    pub reconstruction: Vec<f64>,
}

pub fn deconv_psm_fit(
    y: &SampledSignal,
    h: &ImpulseResponse,
    loss: &EpsHuberParams,
) -> Result<DeconvPsmFit> {
    require_uniform(y)?;
    let n = y.len();
    if h.samples().len() > n {
        return Err(SvmError::InvalidInput(
            "impulse response longer than the observation".into(),
        ));
    }
    let gram = deconv_gram(n, h);
    let dp = DualProblem::new(gram, y.values().to_vec(), *loss)?;
    let sol = solve_real(&dp, crate::qp::default_tolerance(&dp.targets))?;

    let taps = h.samples();
    let m = h.order();
    let mut input_estimate = vec![0.0; n];
    for (idx, x) in input_estimate.iter_mut().enumerate() {
        // x[idx] = sum_j eta[idx + j] h[j]
        let mut acc = 0.0;
        for (j, tap) in taps.iter().enumerate() {
            if idx + j < n {
                acc += sol.multipliers[idx + j] * tap;
            }
        }
        *x = acc;
    }
    let mut reconstruction = vec![0.0; n];
    for (idx, r) in reconstruction.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..=m.min(idx) {
            acc += input_estimate[idx - j] * taps[j];
        }
        *r = acc;
    }
    Ok(DeconvPsmFit {
        solution: sol,
        input_estimate,
        reconstruction,
    })
}

/// A uniform linear array and the plane-wave sources impinging on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringScene {
    element_count: usize,
    spacing_over_wavelength: f64,
    sources: Vec<SceneSource>,
}

/// One plane-wave source: direction of arrival and complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSource {
    pub doa: f64,
    pub amplitude: Complex64,
}

impl SteeringScene {
    pub fn new(
        element_count: usize,
        spacing_over_wavelength: f64,
        sources: Vec<SceneSource>,
    ) -> Result<Self> {
        if element_count == 0 {
            return Err(SvmError::InvalidInput(
                "array needs at least one element".into(),
            ));
        }
        if !(spacing_over_wavelength > 0.0) {
            return Err(SvmError::InvalidInput(
                "element spacing must be > 0 wavelengths".into(),
            ));
        }
        Ok(Self {
            element_count,
            spacing_over_wavelength,
            sources,
        })
    }

    pub fn element_count(&self) -> usize {
        self.element_count
    }

    pub fn spacing_over_wavelength(&self) -> f64 {
        self.spacing_over_wavelength
    }

    pub fn sources(&self) -> &[SceneSource] {
        &self.sources
    }

    /// Array response for a plane wave from `theta`:
    /// element `k` carries `exp(j 2 pi k (d / lambda) sin(theta))`.
    pub fn steering_vector(&self, theta: f64) -> Vec<Complex64> {
        steering_vector(self.element_count, self.spacing_over_wavelength, theta)
    }
}

/// Steering vector of a uniform linear array.
pub fn steering_vector(
    element_count: usize,
    spacing_over_wavelength: f64,
    theta: f64,
) -> Vec<Complex64> {
    (0..element_count)
        .map(|k| {
            let phase = 2.0 * PI * k as f64 * spacing_over_wavelength * theta.sin();
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect()
}

/// Snapshot Gram matrix `G(m, n) = sum_k x^k_m conj(x^k_n)`; Hermitian by
/// construction.
pub fn array_gram(snapshots: &[Vec<Complex64>]) -> Result<HermitianGram> {
    if snapshots.is_empty() {
        return Err(SvmError::InvalidInput("no snapshots".into()));
    }
    let dim = snapshots[0].len();
    if snapshots.iter().any(|s| s.len() != dim) {
        return Err(SvmError::InvalidInput(
            "snapshots of inconsistent element count".into(),
        ));
    }
    Ok(HermitianGram::from_fn(
        snapshots.len(),
        GramProvenance::Array,
        |m, n| {
            snapshots[m]
                .iter()
                .zip(&snapshots[n])
                .map(|(a, b)| a * b.conj())
                .sum()
        },
    ))
}

/// The QPSK constellation `(±1 ± j) / sqrt(2)`.
pub fn qpsk_constellation() -> [Complex64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(s, s),
        Complex64::new(s, -s),
        Complex64::new(-s, s),
        Complex64::new(-s, -s),
    ]
}

/// Minimum-distance slicer over the QPSK constellation.
pub fn qpsk_slice(z: Complex64) -> Complex64 {
    let mut best = qpsk_constellation()[0];
    let mut best_d = f64::INFINITY;
    for c in qpsk_constellation() {
        let d = (z - c).norm_sqr();
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Temporal-reference beamformer: complex weights trained against known
/// symbols, applied as `y(x) = sum_k a_k x^k`.
#[derive(Debug, Clone)]
pub struct TemporalBeamformer {
    pub solution: ComplexSvmSolution,
    /// Beamformer weights `a_k = sum_n psi_n conj(x^k_n)`.
    pub weights: Vec<Complex64>,
}

impl TemporalBeamformer {
    /// Soft detector output for one snapshot.
    pub fn detect(&self, snapshot: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(snapshot)
            .map(|(a, x)| a * x)
            .sum()
    }

    /// Hard QPSK decision for one snapshot.
    pub fn detect_qpsk(&self, snapshot: &[Complex64]) -> Complex64 {
        qpsk_slice(self.detect(snapshot))
    }
}

pub fn temporal_beamformer_fit(
    snapshots: &[Vec<Complex64>],
    symbols: &ComplexSeries,
    loss: &EpsHuberParams,
) -> Result<TemporalBeamformer> {
    if snapshots.len() != symbols.len() {
        return Err(SvmError::DimensionMismatch {
            expected: snapshots.len(),
            got: symbols.len(),
        });
    }
    let gram = array_gram(snapshots)?;
    let dp = ComplexDualProblem::new(gram, symbols.values().to_vec(), *loss)?;
    let scale: Vec<f64> = symbols.values().iter().map(|v| v.norm()).collect();
    let sol = solve_complex(&dp, crate::qp::default_tolerance(&scale))?;

    let elements = snapshots[0].len();
    let mut weights = vec![Complex64::new(0.0, 0.0); elements];
    for (psi, snap) in sol.multipliers.iter().zip(snapshots) {
        for (w, x) in weights.iter_mut().zip(snap) {
            *w += psi * x.conj();
        }
    }
    Ok(TemporalBeamformer {
        solution: sol,
        weights,
    })
}

/// Adds a constant explanatory signal to an existing correlation matrix
/// (every entry gains `+1`). The intercept of the augmented model is the
/// sum of the multipliers.
pub fn with_constant_term(gram: &GramMatrix) -> GramMatrix {
    let mut entries = gram.entries().clone();
    entries.add_scalar_mut(1.0);
    GramMatrix::new(entries, gram.provenance()).expect("shifting preserves symmetry")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qp::dual_objective;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn loss(eps: f64, delta: f64, c: f64) -> EpsHuberParams {
        EpsHuberParams::new(eps, delta, c).unwrap()
    }

    #[test]
    fn spectral_gram_dc_only_is_all_ones() {
        let grid = SpectralGrid::new(1.0, 0).unwrap();
        let g = spectral_gram(&[0.0, 0.7, 2.0], &grid);
        for m in 0..3 {
            for n in 0..3 {
                assert_eq!(g.entries()[(m, n)], 1.0);
            }
        }
    }

    #[test]
    fn spectral_gram_diagonal_counts_harmonics() {
        let grid = SpectralGrid::new(0.37, 5).unwrap();
        let g = spectral_gram(&[0.1, 1.3, 2.9, 4.0], &grid);
        for m in 0..4 {
            assert_relative_eq!(g.entries()[(m, m)], 6.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn spectral_gram_half_period_pair() {
        // two points separated by pi / omega0 with one harmonic:
        // off-diagonal 1 + cos(pi) = 0 plus the k = 0 term = 1... the DC term
        // contributes 1 and the k = 1 term contributes cos(pi) = -1.
        let omega0 = 0.5;
        let grid = SpectralGrid::new(omega0, 1).unwrap();
        let g = spectral_gram(&[0.0, PI / omega0], &grid);
        assert_relative_eq!(g.entries()[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_gram_matches_transversal_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let times: Vec<f64> = {
            let mut t: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..10.0)).collect();
            t.sort_by(|a, b| a.partial_cmp(b).unwrap());
            t
        };
        let grid = SpectralGrid::new(0.83, 7).unwrap();
        let g = spectral_gram(&times, &grid);
        for m in 0..times.len() {
            for n in 0..times.len() {
                // independent oracle: explicit cos/sin transversal vectors
                let mut want = 0.0;
                for k in 0..=grid.harmonics() {
                    let a = k as f64 * grid.omega0() * times[m];
                    let b = k as f64 * grid.omega0() * times[n];
                    want += a.cos() * b.cos() + a.sin() * b.sin();
                }
                assert_relative_eq!(g.entries()[(m, n)], want, max_relative = 1e-12, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spectral_fit_zero_signal_gives_zero_coefficients() {
        let sig = SampledSignal::uniform(0.0, 1.0, vec![0.0; 16]).unwrap();
        let grid = SpectralGrid::new(2.0 * PI / 16.0, 8).unwrap();
        let (sol, coeffs) = spectral_fit(&sig, &grid, &loss(0.0, 1.0, 10.0)).unwrap();
        assert!(sol.multipliers.iter().all(|&m| m == 0.0));
        assert!(coeffs.amplitudes().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn spectral_fit_recovers_clean_cosine_in_ls_limit() {
        let n = 64usize;
        let omega0 = 2.0 * PI / n as f64;
        let values: Vec<f64> = (0..n).map(|t| (omega0 * t as f64).cos()).collect();
        let sig = SampledSignal::uniform(0.0, 1.0, values).unwrap();
        let grid = SpectralGrid::new(omega0, 16).unwrap();
        let (sol, coeffs) = spectral_fit(&sig, &grid, &loss(0.0, 1e-4, 1e6)).unwrap();
        let amps = coeffs.amplitudes();
        assert!((amps[1] - 1.0).abs() < 0.01, "A_1 = {}", amps[1]);
        for (k, &a) in amps.iter().enumerate() {
            if k != 1 {
                assert!(a <= 0.05, "A_{k} = {a}");
            }
        }
        // oracle: regularized LS on the same correlation matrix
        let gram = spectral_gram(sig.times(), &grid);
        let mut a = gram.entries().clone();
        for i in 0..n {
            a[(i, i)] += 1e-4;
        }
        let rhs = nalgebra::DVector::from_column_slice(sig.values());
        let exact = a.lu().solve(&rhs).unwrap();
        for i in 0..n {
            assert_relative_eq!(sol.multipliers[i], exact[i], epsilon = 1e-4);
        }
    }

    #[test]
    fn spectral_residuals_obey_the_multiplier_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 24usize;
        let values: Vec<f64> = (0..n)
            .map(|t| (0.4 * t as f64).sin() + 0.2 * rng.gen_range(-1.0..1.0))
            .collect();
        let sig = SampledSignal::uniform(0.0, 1.0, values).unwrap();
        let grid = SpectralGrid::new(2.0 * PI / n as f64, 10).unwrap();
        let l = loss(0.1, 0.5, 0.8);
        let (sol, _) = spectral_fit(&sig, &grid, &l).unwrap();
        let gram = spectral_gram(sig.times(), &grid);
        for m in 0..n {
            let pred: f64 = (0..n)
                .map(|j| gram.entries()[(m, j)] * sol.multipliers[j])
                .sum();
            let resid = sig.values()[m] - pred;
            let mapped = crate::loss::residual_to_multiplier(resid, &l).unwrap();
            assert_relative_eq!(sol.multipliers[m], mapped, epsilon = 1e-6);
        }
    }

    #[test]
    fn arx_gram_single_lag_products() {
        let y = SampledSignal::uniform(0.0, 1.0, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let x = SampledSignal::uniform(0.0, 1.0, vec![0.0; 5]).unwrap();
        let orders = ArxOrders::new(1, 0).unwrap();
        let g = arx_gram(&x, &y, &orders).unwrap();
        let rows = arx_valid_rows(&orders, 5, 5);
        assert_eq!(rows, vec![1, 2, 3]);
        for (i, &m) in rows.iter().enumerate() {
            for (j, &n) in rows.iter().enumerate() {
                assert_eq!(
                    g.entries()[(i, j)],
                    y.values()[m - 1] * y.values()[n - 1]
                );
            }
        }
    }

    #[test]
    fn arx_gram_constant_signals() {
        let ones = vec![1.0; 10];
        let y = SampledSignal::uniform(0.0, 1.0, ones.clone()).unwrap();
        let x = SampledSignal::uniform(0.0, 1.0, ones).unwrap();
        let g = arx_gram(&x, &y, &ArxOrders::new(2, 1).unwrap()).unwrap();
        // P = 2 output lags contribute 2, Q + 1 = 2 input taps contribute 2
        for v in g.entries().iter() {
            assert_eq!(*v, 4.0);
        }
    }

    #[test]
    fn arx_gram_matches_summation_oracle_and_diagonal_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xv: Vec<f64> = (0..20).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let yv: Vec<f64> = (0..20).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = SampledSignal::uniform(0.0, 1.0, xv.clone()).unwrap();
        let y = SampledSignal::uniform(0.0, 1.0, yv.clone()).unwrap();
        let orders = ArxOrders::new(3, 2).unwrap();
        let g = arx_gram(&x, &y, &orders).unwrap();
        let rows = arx_valid_rows(&orders, 20, 20);
        for (i, &m) in rows.iter().enumerate() {
            for (j, &n) in rows.iter().enumerate() {
                let mut want = 0.0;
                for k in 1..=3 {
                    want += yv[m - k] * yv[n - k];
                }
                for k in 0..=2 {
                    want += xv[m + 1 - k] * xv[n + 1 - k];
                }
                assert_relative_eq!(g.entries()[(i, j)], want, max_relative = 1e-12, epsilon = 1e-12);
            }
            assert!(g.entries()[(i, i)] >= 0.0);
        }
    }

    #[test]
    fn arx_rejects_too_short_signals() {
        let y = SampledSignal::uniform(0.0, 1.0, vec![1.0, 2.0]).unwrap();
        let x = SampledSignal::uniform(0.0, 1.0, vec![1.0, 2.0]).unwrap();
        assert!(arx_gram(&x, &y, &ArxOrders::new(3, 0).unwrap()).is_err());
    }

    #[test]
    fn arx_rejects_nonuniform_sampling() {
        let y = SampledSignal::new(vec![0.0, 1.0, 2.5, 3.0], vec![1.0; 4]).unwrap();
        let x = SampledSignal::uniform(0.0, 1.0, vec![1.0; 4]).unwrap();
        assert!(arx_gram(&x, &y, &ArxOrders::new(1, 0).unwrap()).is_err());
    }

    #[test]
    fn arx_fit_recovers_noiseless_system() {
        // data generated by the model's own convention:
        // y[n] = 0.5 y[n-1] + 1.0 x[n+1]
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 60;
        let xv: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut yv = vec![0.0; n];
        for i in 1..n - 1 {
            yv[i] = 0.5 * yv[i - 1] + xv[i + 1];
        }
        yv[n - 1] = 0.5 * yv[n - 2];
        let x = SampledSignal::uniform(0.0, 1.0, xv).unwrap();
        let y = SampledSignal::uniform(0.0, 1.0, yv).unwrap();
        let (_, coeffs) = arx_fit(&x, &y, &ArxOrders::new(1, 0).unwrap(), &loss(0.0, 1e-4, 1e6))
            .unwrap();
        assert!((coeffs.ar[0] - 0.5).abs() < 1e-2, "D = {:?}", coeffs.ar);
        assert!((coeffs.exo[0] - 1.0).abs() < 1e-2, "E = {:?}", coeffs.exo);
    }

    #[test]
    fn arx_fit_zero_output_gives_zero_coefficients() {
        let x = SampledSignal::uniform(0.0, 1.0, vec![1.0; 12]).unwrap();
        let y = SampledSignal::uniform(0.0, 1.0, vec![0.0; 12]).unwrap();
        let (_, coeffs) = arx_fit(&x, &y, &ArxOrders::new(2, 1).unwrap(), &loss(0.0, 0.1, 5.0))
            .unwrap();
        assert!(coeffs.ar.iter().all(|&d| d == 0.0));
        assert!(coeffs.exo.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn ar_psd_flat_for_white_noise() {
        let coeffs = ArxCoeffs {
            ar: vec![0.0],
            exo: vec![],
        };
        let psd = ar_psd(&coeffs, 2.0, 4.0, &[0.0, 0.5, 1.0]).unwrap();
        for v in psd {
            assert_relative_eq!(v, 0.5);
        }
    }

    #[test]
    fn ar_psd_single_pole_at_dc() {
        let coeffs = ArxCoeffs {
            ar: vec![0.9],
            exo: vec![],
        };
        let psd = ar_psd(&coeffs, 1.0, 1.0, &[0.0]).unwrap();
        assert_relative_eq!(psd[0], 1.0 / (1.0 - 0.9f64).powi(2), max_relative = 1e-12);
    }

    #[test]
    fn ar_psd_peaks_match_pole_angles() {
        // independent oracle: pole angles from the companion matrix of
        // 1 - sum d_p z^-p locate the spectral peaks
        let coeffs = ArxCoeffs {
            ar: vec![-0.9816, -0.9400, -0.7799],
            exo: vec![],
        };
        let companion = nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[
                coeffs.ar[0], coeffs.ar[1], coeffs.ar[2],
                1.0, 0.0, 0.0,
                0.0, 1.0, 0.0,
            ],
        );
        let pole_freqs: Vec<f64> = companion
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im > 1e-9)
            .map(|z| z.arg() / (2.0 * PI))
            .collect();
        assert_eq!(pole_freqs.len(), 1);

        let freqs: Vec<f64> = (1..2048).map(|k| k as f64 * 0.5 / 2048.0).collect();
        let psd = ar_psd(&coeffs, 1.0, 1.0, &freqs).unwrap();
        let (argmax, _) = psd
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let peak_freq = freqs[argmax];
        assert!(
            (peak_freq - pole_freqs[0]).abs() < 5e-3,
            "peak {peak_freq} vs pole angle {}",
            pole_freqs[0]
        );
    }

    #[test]
    fn deconv_gram_interior_is_the_autocorrelation() {
        let h = ImpulseResponse::new(vec![0.8, -0.5, 0.3], 1.0).unwrap();
        let r = h.autocorrelation();
        let n = 16;
        let g = deconv_gram(n, &h);
        // away from the borders the rows are the shifted autocorrelation
        for m in 4..12 {
            for j in 4..12 {
                assert_relative_eq!(
                    g.entries()[(m, j)],
                    r.at_lag(m as i64 - j as i64),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn sinc_gram_single_sample_is_unit() {
        let g = sinc_gram(&[3.2], PI);
        assert_eq!(g.entries()[(0, 0)], 1.0);
    }

    #[test]
    fn sinc_gram_is_identity_at_critical_spacing() {
        // samples spaced T0 = pi / sigma0 see orthonormal sincs
        let sigma0 = PI;
        let times: Vec<f64> = (0..8).map(|n| n as f64).collect();
        let g = sinc_gram(&times, sigma0);
        for m in 0..8 {
            for n in 0..8 {
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((g.entries()[(m, n)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sinc_gram_matches_double_loop_oracle() {
        let times = [0.0, 0.4, 1.1, 1.9, 3.0];
        let sigma0 = 2.2;
        let g = sinc_gram(&times, sigma0);
        for m in 0..times.len() {
            for n in 0..times.len() {
                let mut want = 0.0;
                for &tk in &times {
                    want += sinc_kernel(times[m], tk, sigma0) * sinc_kernel(times[n], tk, sigma0);
                }
                assert_relative_eq!(g.entries()[(m, n)], want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn sinc_psm_fit_isolates_a_single_anchor() {
        // one sinc centered at sample 5, critically sampled: the regularized
        // LS limit puts all the weight on coefficient 5
        let sigma0 = PI;
        let n = 11;
        let values: Vec<f64> = (0..n).map(|t| sinc_kernel(t as f64, 5.0, sigma0)).collect();
        let sig = SampledSignal::uniform(0.0, 1.0, values).unwrap();
        let fit = sinc_psm_fit(&sig, sigma0, &loss(0.0, 1e-8, 1e9)).unwrap();
        for (k, &a) in fit.coefficients.iter().enumerate() {
            if k == 5 {
                assert!((a - 1.0).abs() < 1e-5, "a_5 = {a}");
            } else {
                assert!(a.abs() < 1e-6, "a_{k} = {a}");
            }
        }
        assert!((fit.predict(5.0) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn representer_and_prediction_identities() {
        // coefficients rebuilt from the multipliers must satisfy
        // a = sum eta_n s_n and y_hat(t_m) = sum eta_n R(n, m)
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut times: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..8.0)).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let values: Vec<f64> = times.iter().map(|t| (0.9 * t).sin()).collect();
        let sig = SampledSignal::new(times.clone(), values).unwrap();
        let sigma0 = 1.8;
        let fit = sinc_psm_fit(&sig, sigma0, &loss(0.05, 0.2, 3.0)).unwrap();
        let gram = sinc_gram(&times, sigma0);
        for m in 0..times.len() {
            let via_gram: f64 = (0..times.len())
                .map(|j| fit.solution.multipliers[j] * gram.entries()[(j, m)])
                .sum();
            assert_relative_eq!(fit.predict(times[m]), via_gram, epsilon = 1e-10);
        }
    }

    #[test]
    fn deconv_identity_system_reduces_to_plain_regression() {
        let h = ImpulseResponse::new(vec![1.0], 1.0).unwrap();
        let y = SampledSignal::uniform(0.0, 1.0, vec![0.5, -1.0, 2.0]).unwrap();
        let delta = 0.1;
        let fit = deconv_psm_fit(&y, &h, &loss(0.0, delta, 1e9)).unwrap();
        // Gram is the identity, so the LS limit is eta = y / (1 + delta)
        for (x, want) in fit.input_estimate.iter().zip(y.values()) {
            assert_relative_eq!(*x, want / (1.0 + delta), max_relative = 1e-7);
        }
    }

    #[test]
    fn deconv_zero_observation_gives_zero_estimate() {
        let h = ImpulseResponse::new(vec![0.6, 1.0, 0.3], 1.0).unwrap();
        let y = SampledSignal::uniform(0.0, 1.0, vec![0.0; 12]).unwrap();
        let fit = deconv_psm_fit(&y, &h, &loss(0.1, 0.5, 2.0)).unwrap();
        assert!(fit.input_estimate.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn deconv_peak_follows_shifted_wavelet() {
        let taps = vec![0.4, 1.0, 0.4];
        let h = ImpulseResponse::new(taps.clone(), 1.0).unwrap();
        let n = 24;
        let n0 = 9;
        let mut values = vec![0.0; n];
        for (j, tap) in taps.iter().enumerate() {
            values[n0 + j] = *tap;
        }
        let y = SampledSignal::uniform(0.0, 1.0, values).unwrap();
        let fit = deconv_psm_fit(&y, &h, &loss(0.0, 1e-4, 1e6)).unwrap();
        let (argmax, _) = fit
            .input_estimate
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        assert_eq!(argmax, n0);
    }

    #[test]
    fn steering_vector_values() {
        let broadside = steering_vector(4, 0.5, 0.0);
        for v in &broadside {
            assert_relative_eq!(v.re, 1.0);
            assert_relative_eq!(v.im, 0.0);
        }
        assert_eq!(steering_vector(1, 0.5, 1.2), vec![Complex64::new(1.0, 0.0)]);
        // d/lambda = 0.5, theta = 30 deg, element 1: phase 2 pi (0.5)(0.5) = pi/2
        let v = steering_vector(2, 0.5, PI / 6.0);
        assert_relative_eq!(v[1].re, (PI / 2.0).cos(), epsilon = 1e-12);
        assert_relative_eq!(v[1].im, (PI / 2.0).sin(), epsilon = 1e-12);
    }

    #[test]
    fn temporal_beamformer_recovers_clean_symbols() {
        let scene = SteeringScene::new(4, 0.5, vec![]).unwrap();
        let a0 = scene.steering_vector(0.0);
        let symbols: Vec<Complex64> = qpsk_constellation()
            .iter()
            .cycle()
            .take(12)
            .copied()
            .collect();
        let snapshots: Vec<Vec<Complex64>> = symbols
            .iter()
            .map(|b| a0.iter().map(|a| a * b).collect())
            .collect();
        let series = ComplexSeries::new(symbols.clone()).unwrap();
        let bf =
            temporal_beamformer_fit(&snapshots, &series, &loss(0.0, 1e-3, 1e4)).unwrap();
        for (snap, want) in snapshots.iter().zip(&symbols) {
            let got = bf.detect_qpsk(snap);
            assert_relative_eq!(got.re, want.re, epsilon = 1e-9);
            assert_relative_eq!(got.im, want.im, epsilon = 1e-9);
        }
    }

    #[test]
    fn temporal_beamformer_survives_rank_one_gram() {
        // identical snapshots and identical symbols: the delta augmentation
        // keeps the solver well posed
        let snap = vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.2)];
        let snapshots = vec![snap.clone(); 6];
        let series =
            ComplexSeries::new(vec![Complex64::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2); 6])
                .unwrap();
        let bf = temporal_beamformer_fit(&snapshots, &series, &loss(0.0, 0.5, 10.0)).unwrap();
        assert!(bf.weights.iter().all(|w| w.re.is_finite() && w.im.is_finite()));
    }

    #[test]
    fn saturated_coordinates_cap_outlier_influence() {
        // replace one observation by a huge outlier: every multiplier stays
        // inside the box, so the recovered coefficients move by a bounded
        // amount
        let n = 32usize;
        let omega0 = 2.0 * PI / n as f64;
        let clean: Vec<f64> = (0..n).map(|t| (3.0 * omega0 * t as f64).cos()).collect();
        let mut dirty = clean.clone();
        dirty[7] = 1e6;
        let grid = SpectralGrid::new(omega0, 8).unwrap();
        let l = loss(0.0, 10.0, 0.05);
        let sig_a = SampledSignal::uniform(0.0, 1.0, clean).unwrap();
        let sig_b = SampledSignal::uniform(0.0, 1.0, dirty).unwrap();
        let (sol_a, co_a) = spectral_fit(&sig_a, &grid, &l).unwrap();
        let (sol_b, co_b) = spectral_fit(&sig_b, &grid, &l).unwrap();
        assert!(sol_a.multipliers.iter().all(|m| m.abs() <= l.cost_cap() + 1e-12));
        assert!(sol_b.multipliers.iter().all(|m| m.abs() <= l.cost_cap() + 1e-12));
        // transversal norm: sqrt(K+1 + ...) bounded by sqrt(2 (K+1))
        let bound = l.cost_cap() * (2.0 * (grid.harmonics() as f64 + 1.0)).sqrt();
        let moved: f64 = co_a
            .in_phase()
            .iter()
            .zip(co_b.in_phase())
            .chain(co_a.quadrature().iter().zip(co_b.quadrature()))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(moved <= bound, "moved {moved} > bound {bound}");
    }

    #[test]
    fn constant_term_augmentation_recovers_intercept() {
        let n = 16usize;
        let omega0 = 2.0 * PI / n as f64;
        // signal inside the model subspace: one grid harmonic plus offset
        let values: Vec<f64> = (0..n).map(|t| 2.0 + (2.0 * omega0 * t as f64).sin()).collect();
        let sig = SampledSignal::uniform(0.0, 1.0, values).unwrap();
        let grid = SpectralGrid::new(omega0, 4).unwrap();
        let gram = with_constant_term(&spectral_gram(sig.times(), &grid));
        let dp = DualProblem::new(gram, sig.values().to_vec(), loss(0.0, 1e-4, 1e6)).unwrap();
        let sol = solve_real(&dp, 1e-10).unwrap();
        let bias: f64 = sol.multipliers.iter().sum();
        assert!(bias.is_finite());
        // the augmented model must reproduce the signal in the LS limit
        let g = dp.gram.entries();
        for m in 0..n {
            let pred: f64 = (0..n).map(|j| g[(m, j)] * sol.multipliers[j]).sum();
            assert_relative_eq!(pred, sig.values()[m], epsilon = 1e-3);
        }
        let _ = dual_objective(g, &dp.targets, &dp.loss, &sol.multipliers);
    }
}
