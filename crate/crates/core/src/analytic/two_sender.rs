//! Binary on-off sender plus ternary block/phase sender, measured in the
//! symmetric basis (`sigma = 1/2`, `alpha = beta = pi`).

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::one_sender::check_q;
use super::roots::damped_newton;
use crate::error::Result;
use crate::info::{h2, mutual_information_product, xlogx};
use crate::mac::protocols::two_sender_ternary;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSenderTernaryScenario {
    /// Non-blocking prior of the binary sender (on the `sin(theta)` path).
    pub q: f64,
    /// Non-blocking prior of the ternary sender (on the `cos(theta)` path).
    pub q_prime: f64,
    pub theta: f64,
    pub alpha: f64,
}

fn terms(q: f64, qp: f64, theta: f64) -> (f64, f64, f64, f64, f64) {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let xi = 1.0 - qp * c2 - q * s2;
    let eta = 0.5 * qp * c2 + 0.5 * q * s2;
    (s2, c2, xi, eta, (2.0 * theta).sin())
}

pub fn acc_info_two_sender_ternary(q: f64, q_prime: f64, theta: f64) -> Result<f64> {
    check_q(q)?;
    check_q(q_prime)?;
    Ok(j_half(q, q_prime, theta))
}

fn j_half(q: f64, qp: f64, theta: f64) -> f64 {
    let (s2, c2, xi, eta, s2t) = terms(q, qp, theta);
    (1.0 - q) * qp * (xlogx(s2) + c2 * log2_or_zero(0.5 * c2))
        + q * (1.0 - qp) * (xlogx(c2) + s2 * log2_or_zero(0.5 * s2))
        - q * qp * h2((1.0 + s2t) / 2.0)
        - xlogx(xi)
        - 2.0 * xlogx(eta)
}

fn log2_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        x.log2()
    } else {
        0.0
    }
}

/// `(dJ/dq, dJ/dq', dJ/dtheta)`.
///
/// The `theta` component is the exact derivative. It equals
/// `sin(2 theta) [D + (q' - q)] - (q' - q) sin(2 theta) log(xi/eta)` where `D` is
/// the simplified `theta` expression that holds on the `q = q'` slice.
pub fn two_sender_gradient(q: f64, qp: f64, theta: f64) -> [f64; 3] {
    let (s2, c2, xi, eta, s2t) = terms(q, qp, theta);
    let hs = h2(s2);
    let hd = h2((1.0 + s2t) / 2.0);
    let lr = (xi / eta).log2();
    let dq = (2.0 * qp - 1.0) * hs + qp - s2 - qp * hd + s2 * lr;
    let dqp = (2.0 * q - 1.0) * hs + q - c2 - q * hd + c2 * lr;
    let d = displayed_dtheta(q, qp, theta);
    let dtheta = s2t * (d + (qp - q)) - (qp - q) * s2t * lr;
    [dq, dqp, dtheta]
}

/// `(q + q' - 2qq') log tan^2(theta) + qq' cot(2 theta) log((1 + sin 2theta)/(1 - sin 2theta))`.
pub fn displayed_dtheta(q: f64, qp: f64, theta: f64) -> f64 {
    let (s2t, u) = (2.0 * theta).sin_cos();
    // cot(2t) log((1+s)/(1-s)) rewritten via 1 - s = u^2/(1 + s); it vanishes at u = 0
    let cot_log = if u == 0.0 { 0.0 } else { 2.0 * u / s2t * ((1.0 + s2t) / u.abs()).log2() };
    (q + qp - 2.0 * q * qp) * theta.tan().powi(2).log2() + q * qp * cot_log
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoSenderOptimum {
    pub target: String,
    pub q: f64,
    pub q_prime: f64,
    pub theta: f64,
    pub value_bits: f64,
    pub residuals: Vec<f64>,
    pub converged: bool,
    /// Mutual information of the constructively built channel at the optimum.
    pub channel_bits: f64,
}

/// Grid seed followed by damped Newton on the three stationarity equations.
pub fn optimize_two_sender_ternary() -> Result<TwoSenderOptimum> {
    // even n puts theta = pi/4 on the grid
    let n = 40;
    let u = |i: usize| i as f64 / n as f64;
    let mut seed = ([0.5, 0.5, 0.5], f64::NEG_INFINITY);
    for i in 1..n {
        for j in 1..n {
            for k in 1..n {
                let x = [u(i), u(j), u(k) * FRAC_PI_2];
                let v = j_half(x[0], x[1], x[2]);
                if v > seed.1 {
                    seed = (x, v);
                }
            }
        }
    }
    let out = damped_newton(
        |x| two_sender_gradient(x[0], x[1], x[2]).to_vec(),
        &seed.0,
        |x| {
            x[0] = x[0].clamp(1e-9, 1.0 - 1e-9);
            x[1] = x[1].clamp(1e-9, 1.0 - 1e-9);
            x[2] = x[2].clamp(1e-9, FRAC_PI_2 - 1e-9);
        },
        1e-13,
        100,
    );
    let [q, qp, theta] = [out.x[0], out.x[1], out.x[2]];
    let mut value = j_half(q, qp, theta);
    let mut res = TwoSenderOptimum {
        target: "two_sender_ternary_accessible".into(),
        q,
        q_prime: qp,
        theta,
        value_bits: value,
        residuals: out.residuals.clone(),
        converged: out.converged && value >= seed.1 - 1e-12,
        channel_bits: 0.0,
    };
    if !res.converged {
        eprintln!("warning: two-sender Newton did not converge; using the grid seed");
        if seed.1 > value {
            value = seed.1;
            (res.q, res.q_prime, res.theta, res.value_bits) = (seed.0[0], seed.0[1], seed.0[2], value);
        }
    }
    res.channel_bits = channel_mutual_information(res.q, res.q_prime, res.theta)?;
    Ok(res)
}

/// Mutual information of the channel built from the encoding and the symmetric basis.
pub fn channel_mutual_information(q: f64, q_prime: f64, theta: f64) -> Result<f64> {
    let p = two_sender_ternary(q, q_prime, theta)?;
    let tm = p.channel()?;
    Ok(mutual_information_product(&tm, &p.encoding.priors()))
}
