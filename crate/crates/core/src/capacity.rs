//! Capacity and rate-sum maximization over priors.
//!
//! The MAC solver runs a multiplicative (Blahut-Arimoto style) update on one
//! sender at a time. For sender `i` the score of symbol `a` is
//! `c_i(a) = sum_{x: x_i = a} prod_{j != i} p_j(x_j) D(p(.|x) || q)`, the
//! partial derivative of `I(X:Y)` up to a constant, and the update is
//! `p_i(a) <- p_i(a) 2^{c_i(a)}` normalized. Iteration stops once the KKT
//! gap `max_i max_a c_i(a) - I` drops below the tolerance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{mutual_information_channel, shannon, xlogx};
use crate::mac::{product_prior, unflatten, TransitionMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub value_bits: f64,
    pub prior: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound_bits: Option<f64>,
    /// Objective after every iteration, when requested.
    #[serde(skip)]
    pub history: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
}

impl Default for BaOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000, record_history: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
    pub upper_bound: bool,
}

impl Default for MacOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 100_000, restarts: 16, seed: 0, upper_bound: true }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance {tol}")));
    }
    Ok(())
}

/// Output distribution and per-input divergences `D(p(.|x) || q)`.
fn divergences(tm: &TransitionMatrix, prior: &[f64], d: &mut [f64]) -> f64 {
    let k = tm.outputs();
    let mut q = vec![0.0; k];
    for (col, w) in tm.columns().zip(prior) {
        if *w > 0.0 {
            for (qy, p) in q.iter_mut().zip(col) {
                *qy += w * p;
            }
        }
    }
    let mut value = 0.0;
    for ((col, w), dx) in tm.columns().zip(prior).zip(d.iter_mut()) {
        let mut s = 0.0;
        for (p, qy) in col.iter().zip(&q) {
            if *p > 0.0 {
                s += if *qy > 0.0 { p * (p / qy).log2() } else { f64::INFINITY };
            }
        }
        *dx = s;
        if *w > 0.0 {
            value += w * s;
        }
    }
    value
}

/// Classic Blahut-Arimoto on the flattened input alphabet.
pub fn ba_point_to_point(tm: &TransitionMatrix, opts: &BaOptions) -> Result<CapacityResult> {
    check_tol(opts.tol)?;
    let n = tm.num_joint_inputs();
    let mut p = vec![1.0 / n as f64; n];
    let mut d = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let lower = divergences(tm, &p, &mut d);
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if opts.record_history {
            history.push(lower);
        }
        let gap = upper - lower;
        if gap <= opts.tol || iterations >= opts.max_iter {
            return Ok(CapacityResult {
                value_bits: lower.max(0.0),
                prior: vec![p],
                iterations,
                converged: gap <= opts.tol,
                residual: gap,
                upper_bound_bits: Some(upper),
                history,
            });
        }
        let dmax = upper;
        let mut z = 0.0;
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - dmax).exp2();
            z += *px;
        }
        p.iter_mut().for_each(|v| *v /= z);
        iterations += 1;
    }
}

/// Per-sender scores `c_i(a)` and the current objective.
fn sender_scores(tm: &TransitionMatrix, priors: &[Vec<f64>], scores: &mut [Vec<f64>]) -> f64 {
    let joint = product_prior(priors);
    let mut d = vec![0.0; joint.len()];
    let value = divergences(tm, &joint, &mut d);
    for s in scores.iter_mut() {
        s.iter_mut().for_each(|v| *v = 0.0);
    }
    let inputs = tm.inputs();
    for (x, dx) in d.iter().enumerate() {
        let t = unflatten(inputs, x);
        for i in 0..inputs.len() {
            let w: f64 = t.iter().enumerate().filter(|(j, _)| *j != i).map(|(j, a)| priors[j][*a]).product();
            if w > 0.0 {
                scores[i][t[i]] += w * dx;
            }
        }
    }
    value
}

fn score_one(tm: &TransitionMatrix, priors: &[Vec<f64>], i: usize, out: &mut [f64]) {
    let joint = product_prior(priors);
    let mut d = vec![0.0; joint.len()];
    divergences(tm, &joint, &mut d);
    out.iter_mut().for_each(|v| *v = 0.0);
    let inputs = tm.inputs();
    for (x, dx) in d.iter().enumerate() {
        let t = unflatten(inputs, x);
        let w: f64 = t.iter().enumerate().filter(|(j, _)| *j != i).map(|(j, a)| priors[j][*a]).product();
        if w > 0.0 {
            out[t[i]] += w * dx;
        }
    }
}

fn kkt_gap(value: f64, scores: &[Vec<f64>]) -> f64 {
    scores.iter().flat_map(|s| s.iter()).fold(f64::NEG_INFINITY, |a, b| a.max(*b)) - value
}

/// Alternating ascent from one starting product prior.
pub fn mac_ascent(tm: &TransitionMatrix, start: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> CapacityResult {
    let mut priors = start;
    let mut scores: Vec<Vec<f64>> = tm.inputs().iter().map(|m| vec![0.0; *m]).collect();
    let mut iterations = 0;
    loop {
        let value = sender_scores(tm, &priors, &mut scores);
        let gap = kkt_gap(value, &scores);
        if gap <= tol || iterations >= max_iter {
            return CapacityResult {
                value_bits: value.max(0.0),
                prior: priors,
                iterations,
                converged: gap <= tol,
                residual: gap,
                upper_bound_bits: None,
                history: Vec::new(),
            };
        }
        for i in 0..priors.len() {
            if i > 0 {
                let mut s = std::mem::take(&mut scores[i]);
                score_one(tm, &priors, i, &mut s);
                scores[i] = s;
            }
            let cmax = scores[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for (p, c) in priors[i].iter_mut().zip(&scores[i]) {
                *p *= (c - cmax).exp2();
                z += *p;
            }
            priors[i].iter_mut().for_each(|v| *v /= z);
        }
        iterations += 1;
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v: f64| v / s).collect()
}

/// Starting priors: uniform first, then seeded draws from the uniform simplex.
pub fn restart_priors(inputs: &[usize], restarts: usize, seed: u64) -> Vec<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![inputs.iter().map(|m| vec![1.0 / *m as f64; *m]).collect()];
    for _ in 1..restarts.max(1) {
        out.push(inputs.iter().map(|m| random_simplex(&mut rng, *m)).collect());
    }
    out
}

fn better(a: &CapacityResult, b: &CapacityResult) -> bool {
    match a.value_bits.partial_cmp(&b.value_bits) {
        Some(std::cmp::Ordering::Greater) => true,
        Some(std::cmp::Ordering::Less) => false,
        _ => a.prior < b.prior,
    }
}

/// Best rate sum over product priors from several restarts, plus the
/// flattened point-to-point capacity bound.
pub fn ba_mac_rate_sum(tm: &TransitionMatrix, opts: &MacOptions) -> Result<CapacityResult> {
    check_tol(opts.tol)?;
    let starts = restart_priors(tm.inputs(), opts.restarts, opts.seed);
    let runs: Vec<CapacityResult> =
        starts.into_par_iter().map(|s| mac_ascent(tm, s, opts.tol, opts.max_iter)).collect();
    let mut best = runs.into_iter().reduce(|a, b| if better(&b, &a) { b } else { a }).expect("at least one start");
    if opts.upper_bound {
        let flat = ba_point_to_point(&tm.flattened(), &BaOptions { tol: opts.tol, ..Default::default() })?;
        best.upper_bound_bits = flat.upper_bound_bits;
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridOracleResult {
    pub value_bits: f64,
    pub prior: Vec<Vec<f64>>,
    pub points: usize,
}

const GRID_POINT_CAP: usize = 200_000_000;

fn simplex_grid(m: usize, r: usize) -> Vec<Vec<f64>> {
    let step = 1.0 / (r - 1) as f64;
    match m {
        1 => vec![vec![1.0]],
        2 => (0..r).map(|i| vec![i as f64 * step, 1.0 - i as f64 * step]).collect(),
        _ => {
            let mut out = Vec::new();
            for i in 0..r {
                for j in 0..r - i {
                    let a = i as f64 * step;
                    let b = j as f64 * step;
                    out.push(vec![a, b, (1.0 - a - b).max(0.0)]);
                }
            }
            out
        }
    }
}

/// Exhaustive search over product priors on a regular grid.
pub fn grid_oracle_rate_sum(tm: &TransitionMatrix, resolution: usize) -> Result<GridOracleResult> {
    let inputs = tm.inputs();
    if inputs.len() > 2 || inputs.iter().any(|m| *m > 3) {
        return Err(Error::TooLarge(format!("grid oracle handles at most 2 senders with 3 symbols, got {inputs:?}")));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter("grid resolution below 2".into()));
    }
    let grids: Vec<Vec<Vec<f64>>> = inputs.iter().map(|m| simplex_grid(*m, resolution)).collect();
    let points: usize = grids.iter().map(|g| g.len()).product();
    if points > GRID_POINT_CAP {
        return Err(Error::TooLarge(format!("{points} grid points")));
    }
    let neg_h: Vec<f64> = tm.columns().map(|c| c.iter().map(|p| xlogx(*p)).sum()).collect();
    let k = tm.outputs();
    let eval = |priors: &[&Vec<f64>]| -> f64 {
        let owned: Vec<Vec<f64>> = priors.iter().map(|p| (*p).clone()).collect();
        let joint = product_prior(&owned);
        let mut q = vec![0.0; k];
        let mut cond = 0.0;
        for ((col, w), nh) in tm.columns().zip(&joint).zip(&neg_h) {
            if *w > 0.0 {
                for (qy, p) in q.iter_mut().zip(col) {
                    *qy += w * p;
                }
                cond += w * nh;
            }
        }
        shannon(&q) + cond
    };
    let first = &grids[0];
    let rest: Vec<Vec<f64>> = if grids.len() > 1 { grids[1].clone() } else { vec![vec![]] };
    let best = first
        .par_iter()
        .map(|p1| {
            let mut local = (f64::NEG_INFINITY, vec![]);
            for p2 in &rest {
                let pri: Vec<&Vec<f64>> = if p2.is_empty() { vec![p1] } else { vec![p1, p2] };
                let v = eval(&pri);
                if v > local.0 {
                    local = (v, pri.into_iter().cloned().collect::<Vec<_>>());
                }
            }
            local
        })
        .reduce(
            || (f64::NEG_INFINITY, vec![]),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok(GridOracleResult { value_bits: best.0.max(0.0), prior: best.1, points })
}

/// Rate sum of a product prior; shorthand used by the solvers' callers.
pub fn rate_sum(tm: &TransitionMatrix, priors: &[Vec<f64>]) -> f64 {
    mutual_information_channel(tm, &product_prior(priors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::h2;
    use crate::mac::classical::canonical_classical_mac;
    use crate::mac::protocols::n_sender_assisted_protocol;

    fn bsc(f: f64) -> TransitionMatrix {
        TransitionMatrix::new(vec![2], 2, vec![vec![1.0 - f, f], vec![f, 1.0 - f]]).unwrap()
    }

    #[test]
    fn noiseless_and_useless() {
        let r = ba_point_to_point(&bsc(0.0), &BaOptions::default()).unwrap();
        assert!((r.value_bits - 1.0).abs() < 1e-9 && r.converged);
        let useless = TransitionMatrix::new(vec![3], 2, vec![vec![0.3, 0.7]; 3]).unwrap();
        let r = ba_point_to_point(&useless, &BaOptions::default()).unwrap();
        assert!(r.value_bits.abs() < 1e-9);
    }

    #[test]
    fn bsc_closed_form() {
        let r = ba_point_to_point(&bsc(0.11), &BaOptions::default()).unwrap();
        assert!((r.value_bits - (1.0 - h2(0.11))).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_channel_against_closed_form() {
        // Z channel with crossover e: C = log2(1 + (1-e) e^{e/(1-e)})
        let e: f64 = 0.3;
        let z = TransitionMatrix::new(vec![2], 2, vec![vec![1.0, 0.0], vec![e, 1.0 - e]]).unwrap();
        let want = (1.0 + (1.0 - e) * e.powf(e / (1.0 - e))).log2();
        let r = ba_point_to_point(&z, &BaOptions::default()).unwrap();
        assert!((r.value_bits - want).abs() < 1e-9);
    }

    #[test]
    fn history_is_monotone() {
        let tm = TransitionMatrix::new(vec![3], 3, vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.8, 0.1], vec![0.3, 0.3, 0.4]]).unwrap();
        let r = ba_point_to_point(&tm, &BaOptions { record_history: true, ..Default::default() }).unwrap();
        assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }

    #[test]
    fn assisted_two_sender_rate_sum() {
        let tm = n_sender_assisted_protocol(2).unwrap().channel().unwrap();
        let r = ba_mac_rate_sum(&tm, &MacOptions::default()).unwrap();
        assert!((r.value_bits - (17.0f64 / 8.0).log2()).abs() < 1e-6);
        assert!((r.prior[0][0] - 0.5).abs() < 1e-3);
        assert!((r.prior[1][0] - 15.0 / 17.0).abs() < 1e-3);
        assert!(r.value_bits <= r.upper_bound_bits.unwrap() + 1e-12);
    }

    #[test]
    fn oracle_matches_solver_on_canonical() {
        let tm = canonical_classical_mac(&[0.3, 0.7]).unwrap();
        let g = grid_oracle_rate_sum(&tm, 401).unwrap();
        let b = ba_mac_rate_sum(&tm, &MacOptions::default()).unwrap();
        assert!((g.value_bits - b.value_bits).abs() < 2e-4);
        assert!(g.value_bits <= b.value_bits + 1e-9);
    }

    #[test]
    fn oracle_rejects_large_instances() {
        let tm = TransitionMatrix::new(vec![4], 2, vec![vec![1.0, 0.0]; 4]).unwrap();
        assert!(matches!(grid_oracle_rate_sum(&tm, 11), Err(Error::TooLarge(_))));
        let tm3 = canonical_classical_mac(&[0.2, 0.3, 0.5]).unwrap();
        assert!(grid_oracle_rate_sum(&tm3, 11).is_err());
    }

    #[test]
    fn restarts_are_seeded() {
        assert_eq!(restart_priors(&[2, 3], 5, 9), restart_priors(&[2, 3], 5, 9));
        assert_ne!(restart_priors(&[2, 3], 5, 9), restart_priors(&[2, 3], 5, 10));
    }
}
