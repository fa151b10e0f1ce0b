//! The three-zone robust cost and its residual-to-multiplier map.
//!
//! The cost is zero inside the insensitivity band, quadratic with scale
//! `delta` up to the corner `e_C = eps + delta * C`, and linear with slope
//! `C` beyond it. Vapnik's insensitive loss, Huber's loss and plain least
//! squares are all parameter limits of this single function, so no separate
//! code paths exist for them.

use crate::error::{Result, SvmError};
use crate::types::EpsHuberParams;

/// Cost of a residual `e` under the loss `p`. Even and continuous in `e`.
pub fn eps_huber_cost(e: f64, p: &EpsHuberParams) -> Result<f64> {
    if !e.is_finite() {
        return Err(SvmError::InvalidInput("non-finite residual".into()));
    }
    let a = e.abs();
    let (eps, delta, c) = (p.eps(), p.delta(), p.cost_cap());
    let cost = if a <= eps {
        0.0
    } else if a <= p.corner() {
        (a - eps).powi(2) / (2.0 * delta)
    } else {
        c * (a - eps) - 0.5 * delta * c * c
    };
    Ok(cost)
}

/// Derivative of the cost: the map from a residual to its dual coefficient.
///
/// Zero in the dead zone, `(|e| - eps) / delta` with the sign of `e` in the
/// quadratic zone, saturated at `±C` beyond the corner. Odd in `e`, so a
/// large residual moves the model coefficients by at most `C`.
pub fn residual_to_multiplier(e: f64, p: &EpsHuberParams) -> Result<f64> {
    if !e.is_finite() {
        return Err(SvmError::InvalidInput("non-finite residual".into()));
    }
    let a = e.abs();
    let (eps, delta, c) = (p.eps(), p.delta(), p.cost_cap());
    let m = if a <= eps {
        0.0
    } else if a <= p.corner() {
        e.signum() * (a - eps) / delta
    } else {
        e.signum() * c
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(eps: f64, delta: f64, c: f64) -> EpsHuberParams {
        EpsHuberParams::new(eps, delta, c).unwrap()
    }

    #[test]
    fn dead_zone_is_free() {
        let p = params(1.0, 1.0, 1.0);
        assert_eq!(eps_huber_cost(0.5, &p).unwrap(), 0.0);
        assert_eq!(eps_huber_cost(-0.5, &p).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_zone_value() {
        // eps=0, delta=1, C=10: corner at 10, so e=2 sits in the quadratic zone.
        let p = params(0.0, 1.0, 10.0);
        assert_relative_eq!(eps_huber_cost(2.0, &p).unwrap(), 2.0);
    }

    #[test]
    fn linear_zone_value() {
        // eps=1, delta=1, C=2: corner at 3; e=5 -> C(|e|-eps) - delta C^2/2 = 8 - 2 = 6.
        let p = params(1.0, 1.0, 2.0);
        assert_relative_eq!(eps_huber_cost(5.0, &p).unwrap(), 6.0);
    }

    #[test]
    fn multiplier_zones() {
        let p = params(0.5, 1.0, 3.0);
        assert_eq!(residual_to_multiplier(0.3, &p).unwrap(), 0.0);
        // deep in the linear zone the map saturates at C regardless of e
        let e = p.corner() + 7.0;
        assert_eq!(residual_to_multiplier(e, &p).unwrap(), 3.0);
        assert_eq!(residual_to_multiplier(-e, &p).unwrap(), -3.0);

        let p = params(0.0, 2.0, 10.0);
        assert_relative_eq!(residual_to_multiplier(-1.0, &p).unwrap(), -0.5);
    }

    #[test]
    fn rejects_non_finite_residual() {
        let p = params(0.0, 1.0, 1.0);
        assert!(eps_huber_cost(f64::NAN, &p).is_err());
        assert!(residual_to_multiplier(f64::INFINITY, &p).is_err());
    }

    #[test]
    fn continuous_at_zone_boundaries() {
        let p = params(0.7, 0.3, 2.5);
        let h = 1e-8;
        for corner in [p.eps(), p.corner()] {
            let at = eps_huber_cost(corner, &p).unwrap();
            for side in [corner - h, corner + h] {
                let near = eps_huber_cost(side, &p).unwrap();
                assert!((near - at).abs() < 1e-6, "jump at {corner}");
            }
        }
    }

    #[test]
    fn ls_limit_is_pure_quadratic() {
        // eps = 0 and a corner beyond any residual of interest: cost = e^2 / (2 delta).
        let delta = 0.25;
        let p = params(0.0, delta, 1e12);
        for &e in &[0.0, 0.1, -3.0, 40.0] {
            assert_relative_eq!(
                eps_huber_cost(e, &p).unwrap(),
                e * e / (2.0 * delta),
                max_relative = 1e-12
            );
        }
    }

    proptest! {
        // The multiplier map is the derivative of the cost away from the corners.
        #[test]
        fn multiplier_matches_finite_differences(
            e in -50.0..50.0f64,
            eps in 0.0..2.0f64,
            delta in 0.05..4.0f64,
            c in 0.1..20.0f64,
        ) {
            let p = params(eps, delta, c);
            let h = 1e-6;
            // skip points too close to either corner for a central difference
            let a = e.abs();
            prop_assume!((a - p.eps()).abs() > 10.0 * h);
            prop_assume!((a - p.corner()).abs() > 10.0 * h);
            let num = (eps_huber_cost(e + h, &p).unwrap() - eps_huber_cost(e - h, &p).unwrap()) / (2.0 * h);
            let ana = residual_to_multiplier(e, &p).unwrap();
            prop_assert!((num - ana).abs() < 1e-4, "num={num} ana={ana}");
        }

        #[test]
        fn cost_is_even_and_map_is_odd(
            e in -30.0..30.0f64,
            eps in 0.0..2.0f64,
            delta in 0.05..4.0f64,
            c in 0.1..20.0f64,
        ) {
            let p = params(eps, delta, c);
            prop_assert_eq!(
                eps_huber_cost(e, &p).unwrap(),
                eps_huber_cost(-e, &p).unwrap()
            );
            prop_assert_eq!(
                residual_to_multiplier(e, &p).unwrap(),
                -residual_to_multiplier(-e, &p).unwrap()
            );
            prop_assert!(residual_to_multiplier(e, &p).unwrap().abs() <= c);
        }
    }
}
