//! Holevo information of the one-sender assisted ensemble and the
//! equal-superposition phase ensembles.

use std::f64::consts::PI;

use serde::Serialize;

use super::roots::bisect;
use crate::error::{Error, Result};
use crate::info::{h2, holevo_chi, CqEnsemble};
use crate::mac::protocols::one_sender_assisted;
use crate::mac::{EncodingStrategy, SenderEncoding};
use crate::quantum::{ModeSpace, NpeOperation, PureState};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolevoOptimum {
    pub target: String,
    pub x: f64,
    pub chi_bits: f64,
    pub residual: f64,
}

/// `f(x, y) = x h2(y) + y h2(x)`.
pub fn holevo_objective(x: f64, y: f64) -> f64 {
    x * h2(y) + y * h2(x)
}

/// `h2(x) + x log2((1 - x)/x)`, the stationarity condition of `2 x h2(x)`.
pub fn holevo_stationarity(x: f64) -> f64 {
    h2(x) + x * ((1.0 - x) / x).log2()
}

/// Maximize `2 x h2(x)` by bisection of the stationarity condition on `[1/2, 1]`.
pub fn holevo_one_sender_closed_form() -> Result<HolevoOptimum> {
    let x = bisect(holevo_stationarity, 0.5, 1.0 - 1e-15, 1e-15)?;
    Ok(HolevoOptimum {
        target: "one_sender_holevo".into(),
        x,
        chi_bits: holevo_objective(x, x),
        residual: holevo_stationarity(x),
    })
}

/// `1/((1-x)(1-y)) - ln((1-x)(1-y)/(xy))^2`; non-negative iff the Hessian of `f` is negative semidefinite.
pub fn hessian_condition(x: f64, y: f64) -> f64 {
    let l = ((1.0 - x) * (1.0 - y) / (x * y)).ln();
    1.0 / ((1.0 - x) * (1.0 - y)) - l * l
}

/// Upper bound `cos^2(theta) h2(p) + p h2(cos^2(theta))` with `p` the non-blocking mass.
pub fn holevo_bound(theta: f64, non_blocking: f64) -> f64 {
    holevo_objective(theta.cos().powi(2), non_blocking)
}

/// The optimal ensemble: `sqrt(x)|e1> + sqrt(1-x)|e2>` with prior `(1-x, x/2, x/2)`.
pub fn optimal_ensemble(x: f64) -> Result<CqEnsemble> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("x = {x} outside [0, 1]")));
    }
    one_sender_assisted(x, x.sqrt().acos(), PI)?.ensemble()
}

/// `N` senders each applying identity or phase `pi` with equal probability to the
/// equal superposition over `N` paths, or `N + 1` paths with an untouched reference.
pub fn phase_ensemble(n: usize, assisted: bool) -> Result<CqEnsemble> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sender".into()));
    }
    let m = if assisted { n + 1 } else { n };
    let space = ModeSpace::new(m)?;
    let amp = (1.0 / m as f64).sqrt();
    let state = PureState::from_path_amplitudes(space, &vec![amp; m])?;
    let senders = (1..=n)
        .map(|p| SenderEncoding::uniform(p, vec![NpeOperation::identity(), NpeOperation::phase(PI)]))
        .collect();
    EncodingStrategy::new(senders)?.cq_ensemble(&state.density())
}

pub fn phase_ensemble_chi(n: usize, assisted: bool) -> Result<f64> {
    Ok(holevo_chi(&phase_ensemble(n, assisted)?))
}
