//! Source and phase-plate calibration formulas.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::analytic::roots::bisect;
use crate::error::{Error, Result};

/// Heralded `g2(0) = C_iss' C_i / (C_is C_is')`.
pub fn g2_from_counts(c_iss: f64, c_i: f64, c_is: f64, c_is2: f64) -> Result<f64> {
    if c_is <= 0.0 || c_is2 <= 0.0 {
        return Err(Error::InvalidParameter("zero coincidence count in denominator".into()));
    }
    if [c_iss, c_i].iter().any(|c| *c < 0.0) {
        return Err(Error::InvalidParameter("negative count".into()));
    }
    Ok(c_iss * c_i / (c_is * c_is2))
}

/// Extra phase from tilting a plate of thickness `d` by `alpha`.
pub fn phase_plate_shift(alpha: f64, d: f64, lambda: f64, n_g: f64) -> f64 {
    let s = alpha.sin();
    2.0 * PI * d / lambda * (((n_g * n_g - s * s).sqrt() - alpha.cos()) - (n_g - 1.0))
}

/// Tilt in `(0, pi/4)` giving phase `target`, by bisection.
pub fn phase_plate_tilt(target: f64, d: f64, lambda: f64, n_g: f64) -> Result<f64> {
    if d <= 0.0 || lambda <= 0.0 || n_g < 1.0 {
        return Err(Error::InvalidParameter("plate parameters out of range".into()));
    }
    bisect(|a| phase_plate_shift(a, d, lambda, n_g) - target, 0.0, FRAC_PI_4, 1e-14)
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: f64 = 3e-3;
    const LAMBDA: f64 = 810e-9;
    const NG: f64 = 1.51;

    #[test]
    fn g2_examples() {
        assert_eq!(g2_from_counts(0.0, 1e4, 100.0, 100.0).unwrap(), 0.0);
        assert_eq!(g2_from_counts(1.0, 1e4, 100.0, 100.0).unwrap(), 1.0);
        assert!((g2_from_counts(17.0, 1e6, 1e4, 1e4).unwrap() - 0.17).abs() < 1e-15);
        assert!(g2_from_counts(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn untilted_plate_adds_nothing() {
        assert_eq!(phase_plate_shift(0.0, D, LAMBDA, NG), 0.0);
    }

    #[test]
    fn shift_increases_with_tilt() {
        let mut prev = 0.0;
        for k in 1..=400 {
            let v = phase_plate_shift(FRAC_PI_4 * k as f64 / 400.0, D, LAMBDA, NG);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn pi_tilt_found() {
        let a = phase_plate_tilt(PI, D, LAMBDA, NG).unwrap();
        assert!(a > 0.0 && a < FRAC_PI_4);
        assert!((phase_plate_shift(a, D, LAMBDA, NG) - PI).abs() < 1e-9);
    }
}
