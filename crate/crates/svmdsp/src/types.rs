//! Domain types shared by all estimators.

use crate::error::{Result, SvmError};
use num_complex::Complex64;

/// A real-valued time series with (possibly nonuniform) time stamps in seconds.
///
/// Invariants enforced at construction: times strictly increasing, equal
/// lengths, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(SvmError::DimensionMismatch {
                expected: times.len(),
                got: values.len(),
            });
        }
        if times.is_empty() {
            return Err(SvmError::InvalidInput("empty signal".into()));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(SvmError::InvalidInput(
                "signal contains non-finite entries".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SvmError::InvalidInput(
                "time stamps must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, values })
    }

    /// Uniformly sampled signal with `t_n = start + n * step`.
    pub fn uniform(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(SvmError::InvalidInput("bad uniform grid".into()));
        }
        let times = (0..values.len()).map(|n| start + n as f64 * step).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total observation span `t_N - t_0`.
    pub fn span(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }
}

/// A finite complex-valued series (e.g. transmitted symbols).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    values: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SvmError::InvalidInput(
                "series contains non-finite entries".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The loss triple (epsilon, delta, C) of the three-zone robust cost.
///
/// The zones of the cost are split at `eps` and at the corner
/// `e_C = eps + delta * C`: dead zone, quadratic zone, linear zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsHuberParams {
    eps: f64,
    delta: f64,
    cost_cap: f64,
}

impl EpsHuberParams {
    pub fn new(eps: f64, delta: f64, cost_cap: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(SvmError::InvalidInput("eps must be >= 0".into()));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(SvmError::InvalidInput("delta must be > 0".into()));
        }
        if !(cost_cap > 0.0) || !cost_cap.is_finite() {
            return Err(SvmError::InvalidInput("cost cap C must be > 0".into()));
        }
        Ok(Self {
            eps,
            delta,
            cost_cap,
        })
    }

    /// Insensitivity width of the dead zone.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Scale of the quadratic zone (also the numerical regularizer of the dual).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Slope of the linear zone and box bound on the multipliers.
    pub fn cost_cap(&self) -> f64 {
        self.cost_cap
    }

    /// Corner residual `e_C = eps + delta * C` where the quadratic zone ends.
    pub fn corner(&self) -> f64 {
        self.eps + self.delta * self.cost_cap
    }

    /// Magnitude below which a multiplier is treated as zero: `1e-8 * C`.
    pub fn support_tolerance(&self) -> f64 {
        1e-8 * self.cost_cap
    }
}

/// Solution of a real-valued dual problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmSolution {
    /// Dual coefficients, one per observation; each bounded by C in magnitude.
    pub multipliers: Vec<f64>,
    /// Optional bias (absent unless the model carries a constant explanatory signal).
    pub bias: Option<f64>,
    /// Indices whose multiplier magnitude exceeds the support tolerance.
    pub support_indices: Vec<usize>,
    /// Attained value of the dual objective.
    pub dual_objective: f64,
}

impl SvmSolution {
    /// Assembles a solution, deriving the support set from `tolerance`.
    pub fn from_multipliers(multipliers: Vec<f64>, dual_objective: f64, tolerance: f64) -> Self {
        let support_indices = multipliers
            .iter()
            .enumerate()
            .filter(|(_, m)| m.abs() > tolerance)
            .map(|(i, _)| i)
            .collect();
        Self {
            multipliers,
            bias: None,
            support_indices,
            dual_objective,
        }
    }

    pub fn support_count(&self) -> usize {
        self.support_indices.len()
    }
}

/// Solution of a complex-valued dual problem (array processing).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSvmSolution {
    /// Complex dual coefficients; real and imaginary parts each bounded by C.
    pub multipliers: Vec<Complex64>,
    pub bias: Option<Complex64>,
    /// Indices whose multiplier modulus exceeds the support tolerance.
    pub support_indices: Vec<usize>,
    pub dual_objective: f64,
}

impl ComplexSvmSolution {
    pub fn from_multipliers(
        multipliers: Vec<Complex64>,
        dual_objective: f64,
        tolerance: f64,
    ) -> Self {
        let support_indices = multipliers
            .iter()
            .enumerate()
            .filter(|(_, m)| m.norm() > tolerance)
            .map(|(i, _)| i)
            .collect();
        Self {
            multipliers,
            bias: None,
            support_indices,
            dual_objective,
        }
    }

    pub fn support_count(&self) -> usize {
        self.support_indices.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_rejects_unsorted_times() {
        let r = SampledSignal::new(vec![0.0, 1.0, 1.0], vec![1.0, 2.0, 3.0]);
        assert!(r.is_err());
    }

    #[test]
    fn signal_rejects_non_finite() {
        let r = SampledSignal::new(vec![0.0, 1.0], vec![1.0, f64::NAN]);
        assert!(r.is_err());
        let r = SampledSignal::new(vec![0.0, f64::INFINITY], vec![1.0, 2.0]);
        assert!(r.is_err());
    }

    #[test]
    fn signal_rejects_length_mismatch() {
        let r = SampledSignal::new(vec![0.0, 1.0], vec![1.0]);
        assert!(matches!(r, Err(SvmError::DimensionMismatch { .. })));
    }

    #[test]
    fn loss_params_validate_ranges() {
        assert!(EpsHuberParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(EpsHuberParams::new(0.0, 0.0, 1.0).is_err());
        assert!(EpsHuberParams::new(0.0, 1.0, 0.0).is_err());
        let p = EpsHuberParams::new(1.0, 2.0, 4.0).unwrap();
        assert_eq!(p.corner(), 9.0);
        assert_eq!(p.support_tolerance(), 4e-8);
    }

    #[test]
    fn support_set_tracks_tolerance() {
        let sol = SvmSolution::from_multipliers(vec![0.0, 1e-12, -0.5, 2.0], 0.0, 1e-8);
        assert_eq!(sol.support_indices, vec![2, 3]);
        assert_eq!(sol.support_count(), 2);
    }
}
