//! Support-vector estimation for signal processing.
//!
//! The crate implements a single robust estimation engine — the three-zone
//! robust cost and the box-constrained, delta-regularized dual solver — and
//! three families of signal models layered on top of it:
//!
//! * [`psm`]: linear signal models stated in the primal. The dual operates
//!   on the correlation matrix of the explanatory signals, giving robust
//!   estimators for nonparametric spectral analysis, ARX system
//!   identification, sinc interpolation, sparse deconvolution and
//!   temporal-reference array processing.
//! * [`rsm`]: signal models stated in a reproducing kernel Hilbert space,
//!   with composite (summation / cross-information) kernels for nonlinear
//!   ARX identification and spatial-reference array processing.
//! * [`dsm`]: nonlinear regression of the time instants themselves with
//!   shift-invariant autocorrelation kernels, for nonuniform interpolation
//!   and sparse spike deconvolution.
//!
//! [`bench`] contains seeded synthetic generators, baseline estimators and
//! the metrics used by the experiment harness; [`io`] holds the CSV formats
//! shared with the command line front end.

pub mod bench;
pub mod dsm;
pub mod error;
pub mod io;
pub mod kernels;
pub mod loss;
pub mod psm;
pub mod qp;
pub mod rsm;
pub mod types;

pub use error::{Result, SvmError};
pub use kernels::{Autocorrelation, ImpulseResponse, KernelSpec, MercerCheck};
pub use loss::{eps_huber_cost, residual_to_multiplier};
pub use qp::{
    ComplexDualProblem, DualProblem, GramMatrix, GramProvenance, HermitianGram,
};
pub use types::{ComplexSeries, ComplexSvmSolution, EpsHuberParams, SampledSignal, SvmSolution};


