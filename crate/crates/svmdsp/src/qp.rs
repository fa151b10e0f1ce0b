//! Deterministic solver for the box-constrained robust-loss dual program.
//!
//! The dual maximized here, in terms of the net coefficients
//! `eta_n = alpha_n - alpha_n*`, is
//!
//! ```text
//!   W(eta) = -1/2 eta' (R + delta I) eta + eta' y - eps ||eta||_1,
//!   subject to  -C <= eta_n <= C.
//! ```
//!
//! The sign split `alpha, alpha*` of the classical statement satisfies
//! `alpha_n alpha_n* = 0` at any optimum, so solving directly in `eta`
//! enforces complementarity by construction. `delta` from the loss is the
//! only regularizer added to the Gram matrix; after that augmentation the
//! objective is strictly concave and cyclic coordinate ascent with exact
//! one-dimensional updates converges to the unique maximizer.
//!
//! Each coordinate update has a closed form across the three loss zones:
//! soft-threshold the partial gradient by `eps`, divide by the diagonal,
//! clip to the box. The iteration order is fixed, so identical inputs give
//! bitwise-identical outputs.

use crate::error::{Result, SvmError};
use crate::types::{ComplexSvmSolution, EpsHuberParams, SvmSolution};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Which signal model produced a Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramProvenance {
    Spectral,
    Arx,
    Sinc,
    Deconv,
    Array,
    Stacked,
    Composite,
    Dsm,
}

/// Symmetric real correlation/kernel matrix with a provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
    provenance: GramProvenance,
}

/// Relative asymmetry allowed when accepting an externally built matrix.
const SYMMETRY_TOL: f64 = 1e-10;

impl GramMatrix {
    /// Accepts a square matrix that is symmetric to within `1e-10` relative.
    pub fn new(entries: DMatrix<f64>, provenance: GramProvenance) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(SvmError::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..entries.nrows() {
            for j in (i + 1)..entries.ncols() {
                if (entries[(i, j)] - entries[(j, i)]).abs() > SYMMETRY_TOL * scale.max(1e-300) {
                    return Err(SvmError::InvalidInput(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            entries,
            provenance,
        })
    }

    /// Builds `entries[(m, n)] = f(m, n)` for `m <= n` and mirrors the rest,
    /// so the result is exactly symmetric.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(
        dim: usize,
        provenance: GramProvenance,
        mut f: F,
    ) -> Self {
        let mut entries = DMatrix::zeros(dim, dim);
        for m in 0..dim {
            for n in m..dim {
                let v = f(m, n);
                entries[(m, n)] = v;
                entries[(n, m)] = v;
            }
        }
        Self {
            entries,
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn provenance(&self) -> GramProvenance {
        self.provenance
    }

    /// Smallest and largest eigenvalue, for positive-semidefiniteness checks.
    pub fn eigenvalue_bounds(&self) -> (f64, f64) {
        symmetric_eigen_bounds(&self.entries)
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn symmetric_eigen_bounds(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Hermitian complex Gram matrix (array processing models).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianGram {
    entries: DMatrix<Complex64>,
    provenance: GramProvenance,
}

impl HermitianGram {
    pub fn new(entries: DMatrix<Complex64>, provenance: GramProvenance) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(SvmError::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for i in 0..entries.nrows() {
            for j in i..entries.ncols() {
                let d = entries[(i, j)] - entries[(j, i)].conj();
                if d.norm() > SYMMETRY_TOL * scale.max(1e-300) {
                    return Err(SvmError::InvalidInput(format!(
                        "matrix is not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            entries,
            provenance,
        })
    }

    /// Builds the upper triangle from `f` and mirrors conjugates below, with
    /// the diagonal forced real.
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        dim: usize,
        provenance: GramProvenance,
        mut f: F,
    ) -> Self {
        let mut entries = DMatrix::zeros(dim, dim);
        for m in 0..dim {
            for n in m..dim {
                let v = f(m, n);
                if m == n {
                    entries[(m, n)] = Complex64::new(v.re, 0.0);
                } else {
                    entries[(m, n)] = v;
                    entries[(n, m)] = v.conj();
                }
            }
        }
        Self {
            entries,
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn provenance(&self) -> GramProvenance {
        self.provenance
    }

    /// Real 2n x 2n representation `[[Re, -Im], [Im, Re]]`; symmetric because
    /// the source is Hermitian, with the same spectrum (doubled multiplicity).
    pub fn real_embedding(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let v = self.entries[(i, j)];
                m[(i, j)] = v.re;
                m[(n + i, n + j)] = v.re;
                m[(i, n + j)] = -v.im;
                m[(n + i, j)] = v.im;
            }
        }
        m
    }
}

/// A real dual problem: Gram matrix, targets and loss parameters.
#[derive(Debug, Clone)]
pub struct DualProblem {
    pub gram: GramMatrix,
    pub targets: Vec<f64>,
    pub loss: EpsHuberParams,
}

impl DualProblem {
    pub fn new(gram: GramMatrix, targets: Vec<f64>, loss: EpsHuberParams) -> Result<Self> {
        if gram.dim() != targets.len() {
            return Err(SvmError::DimensionMismatch {
                expected: gram.dim(),
                got: targets.len(),
            });
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::InvalidInput("non-finite target".into()));
        }
        Ok(Self {
            gram,
            targets,
            loss,
        })
    }
}

/// A complex dual problem with a Hermitian Gram matrix.
#[derive(Debug, Clone)]
pub struct ComplexDualProblem {
    pub gram: HermitianGram,
    pub targets: Vec<Complex64>,
    pub loss: EpsHuberParams,
}

impl ComplexDualProblem {
    pub fn new(
        gram: HermitianGram,
        targets: Vec<Complex64>,
        loss: EpsHuberParams,
    ) -> Result<Self> {
        if gram.dim() != targets.len() {
            return Err(SvmError::DimensionMismatch {
                expected: gram.dim(),
                got: targets.len(),
            });
        }
        if targets
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(SvmError::InvalidInput("non-finite target".into()));
        }
        Ok(Self {
            gram,
            targets,
            loss,
        })
    }
}

/// Scale-relative default stopping tolerance: `1e-8 * (max |y| + 1)`.
pub fn default_tolerance(targets: &[f64]) -> f64 {
    let scale = targets.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    1e-8 * (scale + 1.0)
}

/// Sweep cap for the coordinate ascent.
const MAX_SWEEPS: usize = 100_000;
/// Residual vector is recomputed from scratch this often to bound drift.
const REFRESH_EVERY: usize = 64;

/// Solves the real dual by cyclic coordinate ascent with exact updates.
///
/// On success, the returned multipliers satisfy the first-order conditions
/// with projected-gradient violation at most `tol`.
pub fn solve_real(dp: &DualProblem, tol: f64) -> Result<SvmSolution> {
    if !(tol > 0.0) {
        return Err(SvmError::InvalidInput("tolerance must be > 0".into()));
    }
    let (eta, sweeps_left) = ascend(
        dp.gram.entries(),
        &dp.targets,
        &dp.loss,
        dp.loss.delta(),
        tol,
    )?;
    let objective = dual_objective(dp.gram.entries(), &dp.targets, &dp.loss, &eta);
    let sol = SvmSolution::from_multipliers(eta, objective, dp.loss.support_tolerance());
    if sweeps_left {
        Ok(sol)
    } else {
        let violation = kkt_violation(dp, &sol)?;
        Err(SvmError::NonConvergence {
            violation,
            best: Box::new(sol),
        })
    }
}

/// Solves the complex dual through its real 2n x 2n embedding.
///
/// The Hermitian quadratic form in `psi = eta + j nu` equals the symmetric
/// real form in `[eta; nu]`, with the real parts of the targets driving
/// `eta` and the imaginary parts driving `nu`, so both components inherit
/// the box `|.| <= C` and the insensitivity band of the real solver.
pub fn solve_complex(dp: &ComplexDualProblem, tol: f64) -> Result<ComplexSvmSolution> {
    if !(tol > 0.0) {
        return Err(SvmError::InvalidInput("tolerance must be > 0".into()));
    }
    let n = dp.gram.dim();
    let m = dp.gram.real_embedding();
    let mut targets = Vec::with_capacity(2 * n);
    targets.extend(dp.targets.iter().map(|v| v.re));
    targets.extend(dp.targets.iter().map(|v| v.im));

    let (z, converged) = ascend(&m, &targets, &dp.loss, dp.loss.delta(), tol)?;
    let objective = dual_objective(&m, &targets, &dp.loss, &z);
    let psi: Vec<Complex64> = (0..n).map(|i| Complex64::new(z[i], z[n + i])).collect();
    let sol = ComplexSvmSolution::from_multipliers(psi, objective, dp.loss.support_tolerance());
    if converged {
        Ok(sol)
    } else {
        let violation = projected_gradient_norm(&m, &targets, &dp.loss, &z);
        Err(SvmError::NonConvergence {
            violation,
            best: Box::new(SvmSolution::from_multipliers(
                z,
                objective,
                dp.loss.support_tolerance(),
            )),
        })
    }
}

/// Max-norm of the projected gradient of the dual objective at `sol`.
///
/// Zero exactly at a box-constrained stationary point, so this is the
/// solver's convergence certificate.
pub fn kkt_violation(dp: &DualProblem, sol: &SvmSolution) -> Result<f64> {
    if sol.multipliers.len() != dp.targets.len() {
        return Err(SvmError::DimensionMismatch {
            expected: dp.targets.len(),
            got: sol.multipliers.len(),
        });
    }
    Ok(projected_gradient_norm(
        dp.gram.entries(),
        &dp.targets,
        &dp.loss,
        &sol.multipliers,
    ))
}

/// Complex counterpart of [`kkt_violation`], evaluated on the real embedding.
pub fn complex_kkt_violation(dp: &ComplexDualProblem, sol: &ComplexSvmSolution) -> Result<f64> {
    if sol.multipliers.len() != dp.targets.len() {
        return Err(SvmError::DimensionMismatch {
            expected: dp.targets.len(),
            got: sol.multipliers.len(),
        });
    }
    let n = dp.gram.dim();
    let m = dp.gram.real_embedding();
    let mut targets = Vec::with_capacity(2 * n);
    targets.extend(dp.targets.iter().map(|v| v.re));
    targets.extend(dp.targets.iter().map(|v| v.im));
    let mut z = Vec::with_capacity(2 * n);
    z.extend(sol.multipliers.iter().map(|v| v.re));
    z.extend(sol.multipliers.iter().map(|v| v.im));
    Ok(projected_gradient_norm(&m, &targets, &dp.loss, &z))
}

/// Value of the dual objective at `eta` (with the delta augmentation and
/// the l1 insensitivity term included).
pub fn dual_objective(gram: &DMatrix<f64>, y: &[f64], loss: &EpsHuberParams, eta: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += gram[(i, j)] * eta[j];
        }
        quad += eta[i] * (row + loss.delta() * eta[i]);
    }
    let linear: f64 = eta.iter().zip(y).map(|(e, t)| e * t).sum();
    let l1: f64 = eta.iter().map(|e| e.abs()).sum();
    -0.5 * quad + linear - loss.eps() * l1
}

fn projected_gradient_norm(
    gram: &DMatrix<f64>,
    y: &[f64],
    loss: &EpsHuberParams,
    eta: &[f64],
) -> f64 {
    let n = y.len();
    let (eps, c) = (loss.eps(), loss.cost_cap());
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut q_eta = loss.delta() * eta[i];
        for j in 0..n {
            q_eta += gram[(i, j)] * eta[j];
        }
        // gradient of the smooth part
        let g = y[i] - q_eta;
        let v = if eta[i] == 0.0 {
            (g.abs() - eps).max(0.0)
        } else if eta[i] >= c {
            (-(g - eps)).max(0.0)
        } else if eta[i] <= -c {
            (g + eps).max(0.0)
        } else {
            (g - eps * eta[i].signum()).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Core cyclic coordinate ascent with deterministic active-set jumps.
/// Returns the iterate and whether the stopping certificate was reached
/// within the sweep cap.
///
/// Plain coordinate ascent identifies the active pattern quickly but
/// crawls on badly conditioned problems (tiny `delta` on a rank-deficient
/// Gram). On a fixed schedule the free coordinates' stationarity system is
/// therefore solved exactly by Cholesky; the jump is taken only when it is
/// feasible and does not decrease the objective, so convergence of the
/// sweeps is never lost.
fn ascend(
    gram: &DMatrix<f64>,
    y: &[f64],
    loss: &EpsHuberParams,
    delta: f64,
    tol: f64,
) -> Result<(Vec<f64>, bool)> {
    let n = y.len();
    let (eps, c) = (loss.eps(), loss.cost_cap());
    for i in 0..n {
        if gram[(i, i)] + delta <= 0.0 {
            return Err(SvmError::IllConditioned(format!(
                "diagonal entry {i} of the augmented Gram is not positive"
            )));
        }
    }

    let mut eta = vec![0.0f64; n];
    // running r = (R + delta I) eta, updated incrementally per coordinate
    let mut r = vec![0.0f64; n];
    // cadence balancing the subspace Cholesky against the sweep cost
    let jump_every = 8.max(n / 8);
    let mut stalls = 0usize;
    for sweep in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let q_ii = gram[(i, i)] + delta;
            let g = y[i] - (r[i] - q_ii * eta[i]);
            let unclipped = soft_threshold(g, eps) / q_ii;
            let new = unclipped.clamp(-c, c);
            let step = new - eta[i];
            if step != 0.0 {
                for j in 0..n {
                    r[j] += gram[(j, i)] * step;
                }
                r[i] += delta * step;
                eta[i] = new;
            }
            max_step = max_step.max(step.abs() * q_ii);
        }
        if sweep % REFRESH_EVERY == REFRESH_EVERY - 1 {
            refresh_residual(gram, delta, &eta, &mut r);
        }
        if std::env::var("SVMDSP_TRACE").is_ok() && sweep % 1024 == 0 {
            let v = projected_gradient_norm(gram, y, loss, &eta);
            let nb = eta.iter().filter(|e| e.abs() >= loss.cost_cap()).count();
            eprintln!("sweep {sweep}: viol {v:.3e} max_step {max_step:.3e} bound {nb}/{}", eta.len());
        }
        let mut want_jump = (sweep + 1) % jump_every == 0;
        if max_step < tol {
            // the per-sweep step bound is only a proxy; certify with the
            // exact projected gradient before accepting
            if projected_gradient_norm(gram, y, loss, &eta) <= tol {
                return Ok((eta, true));
            }
            want_jump = true;
        }
        if want_jump {
            if active_set_jump(gram, y, loss, delta, tol, &mut eta) {
                stalls = 0;
                refresh_residual(gram, delta, &eta, &mut r);
                if projected_gradient_norm(gram, y, loss, &eta) <= tol {
                    return Ok((eta, true));
                }
            } else if max_step < tol {
                // coordinatewise stationary, not KKT-optimal, and the exact
                // subspace solve cannot improve either: the augmented Gram
                // is indefinite
                stalls += 1;
                if stalls >= 3 {
                    return Err(SvmError::IllConditioned(
                        "cannot certify optimality; augmented Gram appears \
                         indefinite or numerically singular"
                            .into(),
                    ));
                }
            }
        }
        if eta.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::IllConditioned(
                "coordinate ascent diverged; Gram is not positive semidefinite".into(),
            ));
        }
    }
    Ok((eta, false))
}

/// Solves the stationarity system of the free coordinates exactly and
/// moves there when the result is feasible and at least as good. Bound and
/// zero coordinates whose first-order conditions are violated by more than
/// `tol` are released into the free set, so the method can leave a wrong
/// active pattern in one step. Returns whether the iterate changed.
fn active_set_jump(
    gram: &DMatrix<f64>,
    y: &[f64],
    loss: &EpsHuberParams,
    delta: f64,
    tol: f64,
    eta: &mut [f64],
) -> bool {
    let n = y.len();
    let (eps, c) = (loss.eps(), loss.cost_cap());
    // gradient of the smooth part at the current iterate
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let mut q_eta = delta * eta[i];
        for j in 0..n {
            q_eta += gram[(i, j)] * eta[j];
        }
        grad[i] = y[i] - q_eta;
    }
    let mut free: Vec<usize> = Vec::new();
    // sign assumed for the l1 term of each freed coordinate
    let mut signs = vec![0.0f64; n];
    for i in 0..n {
        let g = grad[i];
        let (violated, sign) = if eta[i] == 0.0 {
            ((g.abs() - eps).max(0.0) > tol, g.signum())
        } else if eta[i] >= c {
            ((-(g - eps)).max(0.0) > tol, 1.0)
        } else if eta[i] <= -c {
            ((g + eps).max(0.0) > tol, -1.0)
        } else {
            (true, eta[i].signum())
        };
        if violated {
            free.push(i);
            signs[i] = sign;
        }
    }
    if free.is_empty() {
        return false;
    }

    // bounds of each freed coordinate: the box, intersected with the
    // orthant assumed for the l1 term when the band is active
    let bounds = |sign: f64| -> (f64, f64) {
        if eps > 0.0 {
            if sign >= 0.0 {
                (0.0, c)
            } else {
                (-c, 0.0)
            }
        } else {
            (-c, c)
        }
    };

    // target values of all coordinates; starts from the current iterate
    let mut target = eta.to_vec();
    // inner clamping loop: solve the equality system on the free set,
    // pin any coordinate that lands outside its bounds, and re-solve
    for _ in 0..16 {
        let k = free.len();
        let mut q = DMatrix::zeros(k, k);
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                q[(a, b)] = gram[(i, j)] + if i == j { delta } else { 0.0 };
            }
        }
        let in_free = {
            let mut mask = vec![false; n];
            for &i in &free {
                mask[i] = true;
            }
            mask
        };
        let mut rhs = nalgebra::DVector::zeros(k);
        for (a, &i) in free.iter().enumerate() {
            let mut fixed = 0.0;
            for j in 0..n {
                if !in_free[j] {
                    fixed += gram[(i, j)] * target[j];
                }
            }
            rhs[a] = y[i] - eps * signs[i] - fixed;
        }
        let Some(chol) = q.cholesky() else {
            return false;
        };
        let sol = chol.solve(&rhs);

        let mut clamped_any = false;
        let mut still_free = Vec::with_capacity(k);
        for (a, &i) in free.iter().enumerate() {
            let (lo, hi) = bounds(signs[i]);
            if sol[a] < lo {
                target[i] = lo;
                clamped_any = true;
            } else if sol[a] > hi {
                target[i] = hi;
                clamped_any = true;
            } else {
                target[i] = sol[a];
                still_free.push(i);
            }
        }
        if !clamped_any {
            break;
        }
        free = still_free;
        if free.is_empty() {
            break;
        }
    }

    let before = dual_objective_with_delta(gram, y, loss, delta, eta);
    // backtrack toward the current iterate until the step improves
    let mut shrink = 1.0;
    for _ in 0..6 {
        let candidate: Vec<f64> = eta
            .iter()
            .zip(&target)
            .map(|(e, t)| e + shrink * (t - e))
            .collect();
        let after = dual_objective_with_delta(gram, y, loss, delta, &candidate);
        if after >= before && candidate != *eta {
            eta.copy_from_slice(&candidate);
            return true;
        }
        shrink *= 0.5;
    }
    false
}

fn dual_objective_with_delta(
    gram: &DMatrix<f64>,
    y: &[f64],
    loss: &EpsHuberParams,
    delta: f64,
    eta: &[f64],
) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        if eta[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += gram[(i, j)] * eta[j];
        }
        quad += eta[i] * (row + delta * eta[i]);
    }
    let linear: f64 = eta.iter().zip(y).map(|(e, t)| e * t).sum();
    let l1: f64 = eta.iter().map(|e| e.abs()).sum();
    -0.5 * quad + linear - loss.eps() * l1
}

fn refresh_residual(gram: &DMatrix<f64>, delta: f64, eta: &[f64], r: &mut [f64]) {
    let n = eta.len();
    for i in 0..n {
        let mut acc = delta * eta[i];
        for j in 0..n {
            acc += gram[(i, j)] * eta[j];
        }
        r[i] = acc;
    }
}

fn soft_threshold(g: f64, eps: f64) -> f64 {
    if g > eps {
        g - eps
    } else if g < -eps {
        g + eps
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn loss(eps: f64, delta: f64, c: f64) -> EpsHuberParams {
        EpsHuberParams::new(eps, delta, c).unwrap()
    }

    fn problem(k: Vec<Vec<f64>>, y: Vec<f64>, l: EpsHuberParams) -> DualProblem {
        let n = k.len();
        let gram = GramMatrix::new(
            DMatrix::from_fn(n, n, |i, j| k[i][j]),
            GramProvenance::Composite,
        )
        .unwrap();
        DualProblem::new(gram, y, l).unwrap()
    }

    #[test]
    fn scalar_problem_has_closed_form() {
        // stationary point of the unconstrained dual: eta = y / (k + delta)
        let dp = problem(vec![vec![1.0]], vec![1.0], loss(0.0, 0.1, 100.0));
        let sol = solve_real(&dp, 1e-12).unwrap();
        assert_relative_eq!(sol.multipliers[0], 1.0 / 1.1, max_relative = 1e-9);
    }

    #[test]
    fn dead_zone_returns_zero_vector() {
        let dp = problem(
            vec![
                vec![2.0, 0.3, 0.1],
                vec![0.3, 1.5, 0.2],
                vec![0.1, 0.2, 1.0],
            ],
            vec![0.4, -0.9, 0.2],
            loss(1.0, 0.5, 5.0),
        );
        let sol = solve_real(&dp, 1e-12).unwrap();
        assert_eq!(sol.multipliers, vec![0.0, 0.0, 0.0]);
        assert_eq!(sol.support_count(), 0);
        assert_eq!(sol.dual_objective, 0.0);
    }

    #[test]
    fn identity_gram_saturates_at_box() {
        // delta = 0 admissible here because the Gram itself is positive definite
        let l = EpsHuberParams::new(1.0, 1e-300, 0.3).unwrap();
        let dp = problem(
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![2.0, -2.0, 0.5],
            l,
        );
        let sol = solve_real(&dp, 1e-12).unwrap();
        assert_relative_eq!(sol.multipliers[0], 0.3, max_relative = 1e-10);
        assert_relative_eq!(sol.multipliers[1], -0.3, max_relative = 1e-10);
        assert_eq!(sol.multipliers[2], 0.0);
    }

    #[test]
    fn solver_meets_kkt_contract() {
        let dp = problem(
            vec![
                vec![3.0, 1.0, 0.5, 0.2],
                vec![1.0, 2.5, 0.7, 0.1],
                vec![0.5, 0.7, 2.0, 0.4],
                vec![0.2, 0.1, 0.4, 1.5],
            ],
            vec![1.0, -2.0, 0.7, 3.0],
            loss(0.3, 0.2, 1.2),
        );
        let sol = solve_real(&dp, 1e-8).unwrap();
        assert!(kkt_violation(&dp, &sol).unwrap() <= 1e-8);
        // zero is not stationary when the data exceeds the dead zone
        let zero = SvmSolution::from_multipliers(vec![0.0; 4], 0.0, 1e-8);
        assert!(kkt_violation(&dp, &zero).unwrap() > 0.0);
    }

    #[test]
    fn perturbed_interior_coordinate_reads_back_in_kkt() {
        // identity gram: perturbing an interior coordinate by d moves the
        // projected gradient by d * (1 + delta)
        let delta = 0.25;
        let dp = problem(
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![0.9, -0.6, 0.3],
            loss(0.1, delta, 10.0),
        );
        let mut sol = solve_real(&dp, 1e-13).unwrap();
        sol.multipliers[0] += 0.1;
        let v = kkt_violation(&dp, &sol).unwrap();
        assert_relative_eq!(v, 0.1 * (1.0 + delta), max_relative = 1e-6);
    }

    #[test]
    fn non_positive_diagonal_is_ill_conditioned() {
        let l = EpsHuberParams::new(0.0, 1e-12, 1.0).unwrap();
        let dp = problem(vec![vec![-1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0], l);
        match solve_real(&dp, 1e-10) {
            Err(SvmError::IllConditioned(_)) => {}
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn determinism_bitwise() {
        let dp = problem(
            vec![
                vec![2.0, 0.8, -0.3],
                vec![0.8, 1.7, 0.25],
                vec![-0.3, 0.25, 2.2],
            ],
            vec![1.3, -0.4, 2.2],
            loss(0.05, 0.3, 2.0),
        );
        let a = solve_real(&dp, 1e-10).unwrap();
        let b = solve_real(&dp, 1e-10).unwrap();
        assert_eq!(a.multipliers, b.multipliers);
        assert_eq!(a.dual_objective, b.dual_objective);
    }

    fn hermitian(entries: Vec<Vec<Complex64>>) -> HermitianGram {
        let n = entries.len();
        HermitianGram::new(
            DMatrix::from_fn(n, n, |i, j| entries[i][j]),
            GramProvenance::Array,
        )
        .unwrap()
    }

    #[test]
    fn complex_with_real_data_reduces_to_real_solver() {
        let c = |re: f64| Complex64::new(re, 0.0);
        let gram = hermitian(vec![vec![c(2.0), c(0.5)], vec![c(0.5), c(1.5)]]);
        let l = loss(0.1, 0.2, 3.0);
        let cdp = ComplexDualProblem::new(gram, vec![c(1.0), c(-0.7)], l).unwrap();
        let csol = solve_complex(&cdp, 1e-12).unwrap();

        let rdp = problem(
            vec![vec![2.0, 0.5], vec![0.5, 1.5]],
            vec![1.0, -0.7],
            l,
        );
        let rsol = solve_real(&rdp, 1e-12).unwrap();
        for (p, e) in csol.multipliers.iter().zip(&rsol.multipliers) {
            assert_relative_eq!(p.re, *e, max_relative = 1e-9, epsilon = 1e-12);
            assert_eq!(p.im, 0.0);
        }
    }

    #[test]
    fn rotating_targets_by_j_rotates_solution() {
        let c = |re: f64| Complex64::new(re, 0.0);
        let gram = hermitian(vec![vec![c(2.0), c(0.5)], vec![c(0.5), c(1.5)]]);
        let l = loss(0.1, 0.2, 3.0);
        let y = vec![c(1.0), c(-0.7)];
        let yj: Vec<Complex64> = y.iter().map(|v| v * Complex64::i()).collect();
        let a = solve_complex(&ComplexDualProblem::new(gram.clone(), y, l).unwrap(), 1e-12)
            .unwrap();
        let b = solve_complex(&ComplexDualProblem::new(gram, yj, l).unwrap(), 1e-12).unwrap();
        for (pa, pb) in a.multipliers.iter().zip(&b.multipliers) {
            let rotated = pa * Complex64::i();
            assert_relative_eq!(pb.re, rotated.re, epsilon = 1e-10);
            assert_relative_eq!(pb.im, rotated.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn complex_ls_limit_matches_linear_solve() {
        // eps = 0 and a huge box: the dual optimum is (K + delta I)^-1 y
        let k01 = Complex64::new(0.4, 0.3);
        let gram = hermitian(vec![
            vec![Complex64::new(2.0, 0.0), k01],
            vec![k01.conj(), Complex64::new(1.2, 0.0)],
        ]);
        let delta = 0.1;
        let l = loss(0.0, delta, 1e9);
        let y = vec![Complex64::new(0.7, -1.1), Complex64::new(-0.2, 0.4)];
        let sol = solve_complex(
            &ComplexDualProblem::new(gram.clone(), y.clone(), l).unwrap(),
            1e-13,
        )
        .unwrap();

        let mut a = gram.entries().clone();
        for i in 0..2 {
            a[(i, i)] += Complex64::new(delta, 0.0);
        }
        let rhs = nalgebra::DVector::from_vec(y);
        let exact = a.lu().solve(&rhs).unwrap();
        for i in 0..2 {
            assert_relative_eq!(sol.multipliers[i].re, exact[i].re, max_relative = 1e-6);
            assert_relative_eq!(sol.multipliers[i].im, exact[i].im, max_relative = 1e-6);
        }
        assert!(complex_kkt_violation(
            &ComplexDualProblem::new(gram, rhs.iter().copied().collect(), l).unwrap(),
            &sol
        )
        .unwrap()
            <= 1e-12);
    }

    #[test]
    fn saturated_coordinates_sit_at_the_box() {
        // coordinates whose residual passes the corner must carry |eta| = C
        let l = loss(0.2, 0.5, 1.0);
        let dp = problem(
            vec![
                vec![2.0, 0.4, 0.1, 0.0],
                vec![0.4, 1.5, 0.3, 0.2],
                vec![0.1, 0.3, 1.8, 0.5],
                vec![0.0, 0.2, 0.5, 1.2],
            ],
            vec![8.0, -6.0, 0.1, 12.0],
            l,
        );
        let sol = solve_real(&dp, 1e-12).unwrap();
        let k = dp.gram.entries();
        for i in 0..4 {
            let pred: f64 = (0..4).map(|j| k[(i, j)] * sol.multipliers[j]).sum();
            let resid = dp.targets[i] - pred;
            if resid.abs() > l.corner() + 1e-9 {
                assert!(
                    (sol.multipliers[i].abs() - l.cost_cap()).abs() <= 1e-8,
                    "coordinate {i} not saturated: eta {} residual {resid}",
                    sol.multipliers[i]
                );
            }
        }
    }

    #[test]
    fn support_count_non_increasing_in_eps() {
        let k = vec![
            vec![2.0, 0.6, -0.2, 0.3, 0.1],
            vec![0.6, 1.8, 0.4, -0.1, 0.2],
            vec![-0.2, 0.4, 1.5, 0.5, 0.0],
            vec![0.3, -0.1, 0.5, 2.2, 0.4],
            vec![0.1, 0.2, 0.0, 0.4, 1.1],
        ];
        let y = vec![1.2, -0.8, 0.5, 2.0, -0.3];
        let mut last = usize::MAX;
        for eps in [0.0, 0.2, 0.5, 1.0, 2.0, 4.0] {
            let dp = problem(k.clone(), y.clone(), loss(eps, 0.3, 5.0));
            let sol = solve_real(&dp, 1e-12).unwrap();
            assert!(sol.support_count() <= last);
            last = sol.support_count();
        }
        assert_eq!(last, 0);
    }

    #[test]
    fn gram_validation_rejects_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5001, 1.0]);
        assert!(GramMatrix::new(m, GramProvenance::Composite).is_err());
    }
}
