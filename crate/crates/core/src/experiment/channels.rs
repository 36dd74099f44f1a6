//! Imperfect versions of the two-sender experimental channel, in the display
//! labeling of [`transition_balanced`](crate::mac::protocols::transition_balanced).

use serde::Serialize;

use super::check_unit;
use crate::capacity::{ba_mac_rate_sum, MacOptions};
use crate::analytic::roots::bisect;
use crate::error::Result;
use crate::info::mutual_information_product;
use crate::mac::protocols::{assisted_to_display, n_sender_assisted_protocol, reference_prior_display};
use crate::mac::{channel_from_states, TransitionMatrix};
use crate::quantum::{DensityOperator, C64};

/// Lossy detection: an arriving photon is registered with probability `eta`,
/// otherwise the outcome reads as port 0.
pub fn eta_channel(eta: f64) -> Result<TransitionMatrix> {
    check_unit("eta", eta)?;
    let idle = vec![1.0 - eta / 2.0, eta / 4.0, eta / 4.0];
    TransitionMatrix::new(
        vec![2, 2],
        3,
        vec![idle.clone(), idle, vec![1.0 - eta, eta, 0.0], vec![1.0 - eta, 0.0, eta]],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PriorPolicy {
    /// `p(x1 = 1) = 15/17`, `x2` uniform.
    Fixed,
    /// Rate sum maximized over product priors at every `eta`.
    Optimized,
}

/// Rate sum of [`eta_channel`] under the given policy.
pub fn eta_rate(eta: f64, policy: PriorPolicy) -> Result<f64> {
    let tm = eta_channel(eta)?;
    Ok(match policy {
        PriorPolicy::Fixed => mutual_information_product(&tm, &reference_prior_display()),
        PriorPolicy::Optimized => {
            let opts = MacOptions { tol: 1e-11, upper_bound: false, ..MacOptions::default() };
            ba_mac_rate_sum(&tm, &opts)?.value_bits
        }
    })
}

/// Efficiency below which the rate sum drops to one bit; bisection to `1e-6`.
pub fn eta_threshold(policy: PriorPolicy) -> Result<f64> {
    let mut err = None;
    let root = bisect(
        |eta| match eta_rate(eta, policy) {
            Ok(v) => v - 1.0,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        0.5,
        1.0,
        1e-6,
    );
    if let Some(e) = err {
        return Err(e);
    }
    root
}

/// Coherence matrix over paths `(1, 2, 3)`: the inner loop (paths 2, 3) has
/// overlap `v_s`; path 1 overlaps each inner path by `v_z sqrt((1 + v_s)/2)`.
pub fn visibility_coherence(v_sagnac: f64, v_mz: f64) -> [[f64; 3]; 3] {
    let c = v_mz * ((1.0 + v_sagnac) / 2.0).sqrt();
    [[1.0, c, c], [c, 1.0, v_sagnac], [c, v_sagnac, 1.0]]
}

/// Assisted two-sender protocol with interference terms damped by the
/// coherence matrix, mapped to the display labeling.
pub fn visibility_channel(v_sagnac: f64, v_mz: f64) -> Result<TransitionMatrix> {
    check_unit("v_sagnac", v_sagnac)?;
    check_unit("v_mz", v_mz)?;
    let p = n_sender_assisted_protocol(2)?;
    let coh = visibility_coherence(v_sagnac, v_mz);
    let space = p.initial.space();
    let states = p
        .encoding
        .encoded_states(&p.initial.density())?
        .into_iter()
        .map(|rho| {
            let m = rho.matrix().map_with_location(|i, j, v| {
                if i == 0 || j == 0 {
                    v
                } else {
                    v * C64::new(coh[i - 1][j - 1], 0.0)
                }
            });
            DensityOperator::new(space, m)
        })
        .collect::<Result<Vec<_>>>()?;
    let tm = channel_from_states(vec![2, 2], &states, &p.povm)?;
    assisted_to_display(&tm)
}
