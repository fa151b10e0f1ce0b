//! Signal models stated in a reproducing kernel Hilbert space.
//!
//! Nonlinear system identification keeps the difference-equation structure
//! but replaces dot products between lag embeddings with kernels: a single
//! kernel on stacked embeddings, separate kernels for the output and input
//! parts (summation kernel), or the full cross-information composite with
//! an optional stacked term. Lag embeddings follow the same index
//! convention as the primal difference-equation model, so with linear
//! kernels every fit here reproduces its primal counterpart exactly.
//!
//! Spatial-reference array processing minimizes the output energy of the
//! mapped snapshots subject to distortionless constraints on a canonical
//! signal set; the snapshot correlation inverse is realized through a
//! kernel eigenanalysis on the span of the mapped data.

use crate::error::{Result, SvmError};
use crate::kernels::{composite_cross, composite_sum, eval_kernel, KernelSpec};
use crate::psm::{arx_valid_rows, steering_vector, ArxOrders};
use crate::qp::{
    solve_complex, solve_real, ComplexDualProblem, DualProblem, GramMatrix, GramProvenance,
    HermitianGram,
};
use crate::types::{EpsHuberParams, SampledSignal, SvmSolution};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Lag embeddings of the output and input series at one time instant.
///
/// The output part holds `[y(n-1), ..., y(n-M)]` and the input part
/// `[x(n+1), x(n), ..., x(n-Q+1)]`, mirroring the transversal convention of
/// the primal difference-equation model.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEmbedding {
    pub y_state: Vec<f64>,
    pub x_state: Vec<f64>,
}

/// Builds the embeddings for every row with complete history.
pub fn embed_series(
    x: &SampledSignal,
    y: &SampledSignal,
    y_order: usize,
    x_order: usize,
) -> Result<(Vec<usize>, Vec<StateEmbedding>)> {
    let orders = ArxOrders::new(y_order, x_order)?;
    let rows = arx_valid_rows(&orders, y.len(), x.len());
    if rows.is_empty() {
        return Err(SvmError::InvalidInput(
            "series too short for the requested embedding orders".into(),
        ));
    }
    let xv = x.values();
    let yv = y.values();
    let embeddings = rows
        .iter()
        .map(|&n| StateEmbedding {
            y_state: (1..=y_order).map(|p| yv[n - p]).collect(),
            x_state: (0..=x_order).map(|k| xv[n + 1 - k]).collect(),
        })
        .collect();
    Ok((rows, embeddings))
}

/// Kernel structure of a nonlinear difference-equation model.
#[derive(Debug, Clone, PartialEq)]
pub enum NarxKernel {
    /// One kernel on the concatenated embeddings.
    Stacked(KernelSpec),
    /// `K_d(y, y') + K_e(x, x')`.
    Summation { output: KernelSpec, input: KernelSpec },
    /// `K1(y,y') + K2(x,x') + K3(y,x') + K3(x,y') [+ K4(z,z')]`.
    Cross {
        k1: KernelSpec,
        k2: KernelSpec,
        k3: KernelSpec,
        k4: Option<KernelSpec>,
    },
}

impl NarxKernel {
    /// Kernel value between two embedding pairs.
    pub fn eval(&self, a: &StateEmbedding, b: &StateEmbedding) -> Result<f64> {
        match self {
            NarxKernel::Stacked(k) => {
                let za: Vec<f64> = a.y_state.iter().chain(&a.x_state).copied().collect();
                let zb: Vec<f64> = b.y_state.iter().chain(&b.x_state).copied().collect();
                eval_kernel(k, &za, &zb)
            }
            NarxKernel::Summation { output, input } => {
                composite_sum(output, input, &a.y_state, &a.x_state, &b.y_state, &b.x_state)
            }
            NarxKernel::Cross { k1, k2, k3, k4 } => composite_cross(
                k1,
                k2,
                k3,
                k4.as_ref(),
                &a.y_state,
                &a.x_state,
                &b.y_state,
                &b.x_state,
            ),
        }
    }
}

/// A fitted nonlinear predictor: multipliers anchored at training embeddings.
#[derive(Debug, Clone)]
pub struct NarxPredictor {
    pub solution: SvmSolution,
    kernel: NarxKernel,
    anchors: Vec<StateEmbedding>,
    y_order: usize,
    x_order: usize,
}

impl NarxPredictor {
    /// Predicted output for one embedding pair:
    /// `sum_n eta_n K(anchor_n, e)`.
    pub fn predict(&self, e: &StateEmbedding) -> Result<f64> {
        let mut acc = 0.0;
        for (eta, anchor) in self.solution.multipliers.iter().zip(&self.anchors) {
            if *eta != 0.0 {
                acc += eta * self.kernel.eval(anchor, e)?;
            }
        }
        Ok(acc)
    }

    /// One-step-ahead predictions over every valid row of fresh series
    /// (true histories are used as regressors).
    pub fn one_step_predictions(
        &self,
        x: &SampledSignal,
        y: &SampledSignal,
    ) -> Result<(Vec<usize>, Vec<f64>)> {
        let (rows, embeddings) = embed_series(x, y, self.y_order, self.x_order)?;
        let mut preds = Vec::with_capacity(rows.len());
        for e in &embeddings {
            preds.push(self.predict(e)?);
        }
        Ok((rows, preds))
    }

    pub fn kernel(&self) -> &NarxKernel {
        &self.kernel
    }
}

fn narx_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    y_order: usize,
    x_order: usize,
    kernel: NarxKernel,
    loss: &EpsHuberParams,
) -> Result<NarxPredictor> {
    let (rows, embeddings) = embed_series(x, y, y_order, x_order)?;
    let n = rows.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&embeddings[i], &embeddings[j])?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    let provenance = match kernel {
        NarxKernel::Stacked(_) => GramProvenance::Stacked,
        _ => GramProvenance::Composite,
    };
    let gram = GramMatrix::new(entries, provenance)?;
    let targets: Vec<f64> = rows.iter().map(|&r| y.values()[r]).collect();
    let dp = DualProblem::new(gram, targets, *loss)?;
    let sol = solve_real(&dp, crate::qp::default_tolerance(&dp.targets))?;
    Ok(NarxPredictor {
        solution: sol,
        kernel,
        anchors: embeddings,
        y_order,
        x_order,
    })
}

/// Nonlinear identification with a single kernel on stacked embeddings.
pub fn stacked_narx_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    y_order: usize,
    x_order: usize,
    kernel: KernelSpec,
    loss: &EpsHuberParams,
) -> Result<NarxPredictor> {
    narx_fit(x, y, y_order, x_order, NarxKernel::Stacked(kernel), loss)
}

/// Difference-equation model in the RKHS with separate output and input
/// kernels (summation kernel).
pub fn svm_arx_2k_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    y_order: usize,
    x_order: usize,
    output_kernel: KernelSpec,
    input_kernel: KernelSpec,
    loss: &EpsHuberParams,
) -> Result<NarxPredictor> {
    narx_fit(
        x,
        y,
        y_order,
        x_order,
        NarxKernel::Summation {
            output: output_kernel,
            input: input_kernel,
        },
        loss,
    )
}

/// Cross-information composite model (output, input and cross kernels,
/// optionally plus a stacked kernel on the concatenations).
pub fn svm_arx_4k_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    y_order: usize,
    x_order: usize,
    k1: KernelSpec,
    k2: KernelSpec,
    k3: KernelSpec,
    k4: Option<KernelSpec>,
    loss: &EpsHuberParams,
) -> Result<NarxPredictor> {
    narx_fit(
        x,
        y,
        y_order,
        x_order,
        NarxKernel::Cross { k1, k2, k3, k4 },
        loss,
    )
}

/// Combination of the stacked regressor and the composite difference
/// equation: the general composite kernel with all five terms.
pub fn combined_svr_arx_fit(
    x: &SampledSignal,
    y: &SampledSignal,
    y_order: usize,
    x_order: usize,
    k1: KernelSpec,
    k2: KernelSpec,
    k3: KernelSpec,
    k4: KernelSpec,
    loss: &EpsHuberParams,
) -> Result<NarxPredictor> {
    svm_arx_4k_fit(x, y, y_order, x_order, k1, k2, k3, Some(k4), loss)
}

/// Canonical signal set for spatial-reference beamforming: every candidate
/// symbol riding on the steering vector of the desired direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalSignalSet {
    symbols: Vec<Complex64>,
    steering: Vec<Complex64>,
    explicit_signals: Option<Vec<Vec<Complex64>>>,
}

impl CanonicalSignalSet {
    pub fn new(symbols: Vec<Complex64>, steering: Vec<Complex64>) -> Result<Self> {
        if symbols.is_empty() || steering.is_empty() {
            return Err(SvmError::InvalidInput(
                "canonical set needs symbols and a steering vector".into(),
            ));
        }
        if steering.iter().any(|a| (a.norm() - 1.0).abs() > 1e-9) {
            return Err(SvmError::InvalidInput(
                "steering entries must be unit modulus".into(),
            ));
        }
        Ok(Self {
            symbols,
            steering,
            explicit_signals: None,
        })
    }

    /// QPSK constellation on the steering vector of `theta0`.
    pub fn qpsk(element_count: usize, spacing_over_wavelength: f64, theta0: f64) -> Self {
        Self {
            symbols: crate::psm::qpsk_constellation().to_vec(),
            steering: steering_vector(element_count, spacing_over_wavelength, theta0),
            explicit_signals: None,
        }
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn steering(&self) -> &[Complex64] {
        &self.steering
    }

    /// The canonical signals.
    pub fn signals(&self) -> Vec<Vec<Complex64>> {
        match &self.explicit_signals {
            Some(s) => s.clone(),
            None => self
                .symbols
                .iter()
                .map(|b| self.steering.iter().map(|a| a * b).collect())
                .collect(),
        }
    }

    /// Canonical set with explicitly given signals (one per symbol), e.g.
    /// a synthetic labelled burst on the desired steering vector.
    pub fn from_signals(
        symbols: Vec<Complex64>,
        signals: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if symbols.is_empty() || symbols.len() != signals.len() {
            return Err(SvmError::DimensionMismatch {
                expected: symbols.len(),
                got: signals.len(),
            });
        }
        let dim = signals[0].len();
        if signals.iter().any(|s| s.len() != dim) {
            return Err(SvmError::InvalidInput(
                "canonical signals of inconsistent dimension".into(),
            ));
        }
        let steering = vec![Complex64::new(1.0, 0.0); dim];
        Ok(Self {
            symbols,
            steering,
            explicit_signals: Some(signals),
        })
    }
}

/// Base kernels admissible on complex snapshots.
fn complex_kernel(spec: &KernelSpec, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    if u.len() != v.len() {
        return Err(SvmError::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    match spec {
        KernelSpec::Linear => Ok(u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()),
        KernelSpec::Polynomial { degree } => {
            let dot: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
            Ok((dot + 1.0).powu(*degree))
        }
        KernelSpec::Rbf { width } => {
            let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum();
            Ok(Complex64::new((-d2 / (2.0 * width * width)).exp(), 0.0))
        }
        other => Err(SvmError::InvalidInput(format!(
            "kernel {other:?} is not supported on complex snapshots"
        ))),
    }
}

/// Spatial-reference detector: span coefficients over the training
/// snapshots, applied through the base kernel.
#[derive(Debug, Clone)]
pub struct SpatialBeamformer {
    snapshots: Vec<Vec<Complex64>>,
    canonical_signals: Vec<Vec<Complex64>>,
    /// Coefficients on the canonical anchors (`psi / gamma`).
    canonical_coefficients: Vec<Complex64>,
    /// Coefficients on the mapped snapshots (the span correction).
    span_coefficients: Vec<Complex64>,
    base_kernel: KernelSpec,
    pub dual: crate::types::ComplexSvmSolution,
}

impl SpatialBeamformer {
    /// Soft detector output for one snapshot:
    /// `sum_j a_j K(v, c_j) + sum_n u_n K(v, x_n)`.
    pub fn detect(&self, snapshot: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, c) in self.canonical_coefficients.iter().zip(&self.canonical_signals) {
            acc += a * complex_kernel(&self.base_kernel, snapshot, c)?;
        }
        for (u, x) in self.span_coefficients.iter().zip(&self.snapshots) {
            acc += u * complex_kernel(&self.base_kernel, snapshot, x)?;
        }
        Ok(acc)
    }

    /// Hard QPSK decision.
    pub fn detect_qpsk(&self, snapshot: &[Complex64]) -> Result<Complex64> {
        Ok(crate::psm::qpsk_slice(self.detect(snapshot)?))
    }

    /// Implied weight vector for the linear base kernel
    /// (`detect(v) = <w, v>` in the conjugated sense); feature-space
    /// weights are not available for other kernels.
    pub fn linear_weights(&self) -> Option<Vec<Complex64>> {
        if self.base_kernel != KernelSpec::Linear {
            return None;
        }
        let dim = self.snapshots[0].len();
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        for (a, c) in self.canonical_coefficients.iter().zip(&self.canonical_signals) {
            for (wk, ck) in w.iter_mut().zip(c) {
                *wk += a.conj() * ck;
            }
        }
        for (u, x) in self.span_coefficients.iter().zip(&self.snapshots) {
            for (wk, xk) in w.iter_mut().zip(x) {
                *wk += u.conj() * xk;
            }
        }
        Some(w)
    }
}

/// Trains the spatial-reference beamformer.
///
/// The weights minimize the mapped-snapshot output energy subject to the
/// distortionless band constraints on the canonical signals. With the
/// loaded feature covariance `R + gamma I`, `R = Phi Phi^H / N`, the dual
/// operates on
///
/// ```text
///   G(i, j) = phi(c_i)^H (R + gamma I)^-1 phi(c_j)
///           = (1 / gamma) [ K0 - G0^H (K + gamma N I)^-1 G0 ](i, j)
/// ```
///
/// where `K` is the snapshot kernel matrix, `K0` the canonical kernel
/// matrix and `G0` their cross kernels. The matrix is Hermitian positive
/// semidefinite for any loading, and the detector splits into a canonical
/// part and a span correction over the training snapshots. The loading is
/// `gamma = relative_ridge * trace(K) / N`.
pub fn spatial_beamformer_fit(
    snapshots: &[Vec<Complex64>],
    canonical: &CanonicalSignalSet,
    base_kernel: &KernelSpec,
    loss: &EpsHuberParams,
) -> Result<SpatialBeamformer> {
    spatial_beamformer_fit_with_ridge(snapshots, canonical, base_kernel, loss, 1e-2)
}

/// [`spatial_beamformer_fit`] with an explicit relative loading of the
/// feature-space covariance.
pub fn spatial_beamformer_fit_with_ridge(
    snapshots: &[Vec<Complex64>],
    canonical: &CanonicalSignalSet,
    base_kernel: &KernelSpec,
    loss: &EpsHuberParams,
    relative_ridge: f64,
) -> Result<SpatialBeamformer> {
    if snapshots.is_empty() {
        return Err(SvmError::InvalidInput("no snapshots".into()));
    }
    if !(relative_ridge > 0.0) {
        return Err(SvmError::InvalidInput("ridge must be > 0".into()));
    }
    let n = snapshots.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = complex_kernel(base_kernel, &snapshots[i], &snapshots[j])?;
            k[(i, j)] = v;
            k[(j, i)] = v.conj();
        }
    }
    let trace: f64 = (0..n).map(|i| k[(i, i)].re).sum();
    let gamma = relative_ridge * trace / n as f64;
    // Woodbury denominator K + gamma N I
    for i in 0..n {
        k[(i, i)] += Complex64::new(gamma * n as f64, 0.0);
    }

    let signals = canonical.signals();
    let nc = signals.len();
    let mut g0 = DMatrix::zeros(n, nc);
    for (i, c) in signals.iter().enumerate() {
        for (row, snap) in snapshots.iter().enumerate() {
            g0[(row, i)] = complex_kernel(base_kernel, snap, c)?;
        }
    }
    let mut k0 = DMatrix::zeros(nc, nc);
    for i in 0..nc {
        for j in i..nc {
            let v = complex_kernel(base_kernel, &signals[i], &signals[j])?;
            k0[(i, j)] = v;
            k0[(j, i)] = v.conj();
        }
    }

    let lu = k.lu();
    let b = lu
        .solve(&g0)
        .ok_or_else(|| SvmError::IllConditioned("snapshot Gram is singular".into()))?;
    let schur = (&k0 - g0.adjoint() * &b) / Complex64::new(gamma, 0.0);
    let gram = HermitianGram::from_fn(nc, GramProvenance::Array, |i, j| schur[(i, j)]);

    let targets = canonical.symbols().to_vec();
    let cdp = ComplexDualProblem::new(gram, targets, *loss)?;
    let scale: Vec<f64> = canonical.symbols().iter().map(|s| s.norm()).collect();
    let dual = solve_complex(&cdp, crate::qp::default_tolerance(&scale))?;

    let psi = DVector::from_vec(dual.multipliers.clone());
    let canonical_coefficients: Vec<Complex64> = psi
        .iter()
        .map(|p| p / Complex64::new(gamma, 0.0))
        .collect();
    let span = (&b * &psi) / Complex64::new(-gamma, 0.0);

    Ok(SpatialBeamformer {
        snapshots: snapshots.to_vec(),
        canonical_signals: signals,
        canonical_coefficients,
        span_coefficients: span.iter().copied().collect(),
        base_kernel: base_kernel.clone(),
        dual,
    })
}
