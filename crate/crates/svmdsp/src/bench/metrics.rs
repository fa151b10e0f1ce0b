//! Trial metrics and their aggregation.

use crate::error::{Result, SvmError};
use num_complex::Complex64;

/// Per-trial metrics. Only the fields relevant to an experiment are set;
/// absent fields are skipped in tables and aggregates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    /// Mean error.
    pub me: Option<f64>,
    /// Mean squared error.
    pub mse: Option<f64>,
    /// Mean absolute error.
    pub mae: Option<f64>,
    /// Pearson correlation; undefined (None) for zero-variance inputs.
    pub r: Option<f64>,
    /// Integrated squared PSD error.
    pub imse: Option<f64>,
    /// Symbol error fraction in [0, 1].
    pub ber: Option<f64>,
    pub support_count: Option<usize>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    /// Experiment-specific extra columns.
    pub extra: Vec<(&'static str, f64)>,
}

impl MetricsReport {
    /// Flattens the present fields into (column, value) pairs, extras last.
    pub fn columns(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if let Some(v) = self.me {
            out.push(("me", v));
        }
        if let Some(v) = self.mse {
            out.push(("mse", v));
        }
        if let Some(v) = self.mae {
            out.push(("mae", v));
        }
        if let Some(v) = self.r {
            out.push(("r", v));
        }
        if let Some(v) = self.imse {
            out.push(("imse", v));
        }
        if let Some(v) = self.ber {
            out.push(("ber", v));
        }
        if let Some(v) = self.support_count {
            out.push(("support_count", v as f64));
        }
        if let Some(v) = self.precision {
            out.push(("precision", v));
        }
        if let Some(v) = self.recall {
            out.push(("recall", v));
        }
        if let Some(v) = self.f1 {
            out.push(("f1", v));
        }
        out.extend(self.extra.iter().copied());
        out
    }
}

/// ME / MSE / MAE / Pearson r between a truth and an estimate.
pub fn compute_metrics(truth: &[f64], estimate: &[f64]) -> Result<MetricsReport> {
    if truth.len() != estimate.len() {
        return Err(SvmError::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(SvmError::InvalidInput("empty metric input".into()));
    }
    let n = truth.len() as f64;
    let me = truth
        .iter()
        .zip(estimate)
        .map(|(t, e)| e - t)
        .sum::<f64>()
        / n;
    let mse = truth
        .iter()
        .zip(estimate)
        .map(|(t, e)| (e - t) * (e - t))
        .sum::<f64>()
        / n;
    let mae = truth
        .iter()
        .zip(estimate)
        .map(|(t, e)| (e - t).abs())
        .sum::<f64>()
        / n;
    Ok(MetricsReport {
        me: Some(me),
        mse: Some(mse),
        mae: Some(mae),
        r: pearson(truth, estimate),
        ..Default::default()
    })
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va <= 0.0 || vb <= 0.0 {
        None
    } else {
        Some((cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0))
    }
}

/// Integrated squared error between two spectra over their common grid:
/// `(1/N_F) sum |Phi - Phi_hat|^2`.
pub fn imse(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(SvmError::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(SvmError::InvalidInput("empty spectrum".into()));
    }
    Ok(truth
        .iter()
        .zip(estimate)
        .map(|(t, e)| (t - e) * (t - e))
        .sum::<f64>()
        / truth.len() as f64)
}

/// Fraction of symbols detected wrong.
pub fn symbol_error_rate(truth: &[Complex64], detected: &[Complex64]) -> Result<f64> {
    if truth.len() != detected.len() {
        return Err(SvmError::DimensionMismatch {
            expected: truth.len(),
            got: detected.len(),
        });
    }
    if truth.is_empty() {
        return Err(SvmError::InvalidInput("empty symbol stream".into()));
    }
    let wrong = truth
        .iter()
        .zip(detected)
        .filter(|(t, d)| (*t - *d).norm() > 1e-9)
        .count();
    Ok(wrong as f64 / truth.len() as f64)
}

/// Support recovery scores with an index tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportRecovery {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub detected: usize,
}

/// Matches estimated spike support (entries of `estimate` above
/// `threshold` in magnitude) against true positions within `tolerance`
/// indices.
pub fn spike_support_recovery(
    true_positions: &[usize],
    estimate: &[f64],
    threshold: f64,
    tolerance: usize,
) -> SupportRecovery {
    let detected: Vec<usize> = estimate
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > threshold)
        .map(|(i, _)| i)
        .collect();
    let hit = |set: &[usize], q: usize| set.iter().any(|&p| p.abs_diff(q) <= tolerance);
    let tp_est = detected.iter().filter(|&&d| hit(true_positions, d)).count();
    let tp_true = true_positions.iter().filter(|&&t| hit(&detected, t)).count();
    let precision = if detected.is_empty() {
        0.0
    } else {
        tp_est as f64 / detected.len() as f64
    };
    let recall = if true_positions.is_empty() {
        0.0
    } else {
        tp_true as f64 / true_positions.len() as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    SupportRecovery {
        precision,
        recall,
        f1,
        detected: detected.len(),
    }
}

/// Median of a sample (odd/even handled the usual way).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
