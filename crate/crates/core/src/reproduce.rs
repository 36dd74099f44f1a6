//! Reference checks reproducing the headline numbers, shared by the CLI manifest
//! and the acceptance test target.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::analytic::holevo::{holevo_one_sender_closed_form, optimal_ensemble, phase_ensemble_chi};
use crate::analytic::one_sender::{acc_info_one_sender, alpha_zero_accessible, lemma_alpha_beta_scan, optimize_one_sender};
use crate::analytic::two_sender::optimize_two_sender_ternary;
use crate::capacity::{ba_mac_rate_sum, grid_oracle_rate_sum, rate_sum, MacOptions};
use crate::error::Result;
use crate::experiment::channels::{eta_channel, eta_threshold, visibility_channel, PriorPolicy};
use crate::experiment::montecarlo::{monte_carlo_batch, variance_r1, variance_r2, ExperimentConfig, McMode};
use crate::info::{classical_region_sweep, holevo_chi, mutual_information_product};
use crate::mac::classical::canonical_classical_mac;
use crate::mac::protocols::{
    assisted_to_unassisted, n_sender_assisted_protocol, reference_prior_display, transition_balanced, two_sender_ternary,
};
use crate::mac::TransitionMatrix;

pub const CRITERIA: usize = 14;

/// Rate sums of the assisted protocol for `N = 3..8`, fixed after the first run.
pub const ASSISTED_GOLDENS: [(usize, f64); 6] = [
    (3, 1.110531613422),
    (4, 1.118693772654),
    (5, 1.122019489990),
    (6, 1.123470079862),
    (7, 1.124126151146),
    (8, 1.124429025913),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    /// Reference value, when there is one.
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn near(name: impl Into<String>, computed: f64, expected: f64, tol: f64) -> Self {
        let pass = (computed - expected).abs() <= tol;
        Self { name: name.into(), computed, expected: Some(expected), tolerance: Some(tol), pass }
    }

    pub fn at_most(name: impl Into<String>, computed: f64, bound: f64) -> Self {
        Self { name: name.into(), computed, expected: Some(bound), tolerance: None, pass: computed <= bound }
    }

    /// `lo < computed <= hi`.
    pub fn within(name: impl Into<String>, computed: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), computed, expected: None, tolerance: None, pass: computed > lo && computed <= hi }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), computed: f64::from(u8::from(ok)), expected: Some(1.0), tolerance: None, pass: ok }
    }

    pub fn info(name: impl Into<String>, computed: f64) -> Self {
        Self { name: name.into(), computed, expected: None, tolerance: None, pass: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
    pub pass: bool,
}

impl CriterionReport {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn summary_line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut line = format!("{status} criterion {:>2}: {} ({:.2}s)", self.id, self.title, self.seconds);
        for c in self.failures() {
            line.push_str(&format!("; {} = {}", c.name, c.computed));
            if let Some(e) = c.expected {
                line.push_str(&format!(" vs {e}"));
            }
        }
        line
    }
}

const TITLES: [&str; CRITERIA] = [
    "classical rate sum at most one bit",
    "one-sender accessible information optimum",
    "equal-superposition one-sender value",
    "two-sender ternary optimum",
    "one-sender Holevo optimum",
    "phase ensembles reach log N and log(N+1)",
    "assisted N-sender rate sums",
    "assisted and unassisted protocols coincide",
    "classical rate region sweep",
    "detection efficiency threshold",
    "visibility model",
    "Monte Carlo and error propagation",
    "grid oracle agrees with the MAC solver",
    "alpha/beta maxima at multiples of pi",
];

const BUDGETS: [Option<f64>; CRITERIA] =
    [Some(10.0), Some(5.0), None, None, None, None, Some(180.0), None, None, None, None, Some(120.0), None, None];

pub fn title(id: usize) -> &'static str {
    TITLES[id - 1]
}

/// Run criterion `id` (1-based). Solver errors become failing checks.
pub fn run_criterion(id: usize) -> CriterionReport {
    assert!((1..=CRITERIA).contains(&id), "criterion {id} out of range");
    let start = Instant::now();
    let body = match id {
        1 => classical_bound(),
        2 => one_sender_optimum(),
        3 => balanced_one_sender(),
        4 => two_sender_optimum(),
        5 => holevo_optimum(),
        6 => phase_ensembles(),
        7 => assisted_rate_sums(),
        8 => equivalence(),
        9 => classical_region(),
        10 => detection_threshold(),
        11 => visibility(),
        12 => monte_carlo(),
        13 => oracle(),
        _ => lemma_scan(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut checks = body.unwrap_or_else(|e| vec![Check::flag(format!("error: {e}"), false)]);
    let budget = BUDGETS[id - 1];
    if let Some(b) = budget {
        checks.push(Check::at_most("runtime_s", seconds, b));
    }
    let pass = checks.iter().all(|c| c.pass);
    CriterionReport { id, title: title(id).into(), checks, seconds, budget_seconds: budget, pass }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=CRITERIA).map(run_criterion).collect()
}

fn lambda_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn classical_bound() -> Result<Vec<Check>> {
    let mut worst = f64::NEG_INFINITY;
    for lam in lambda_grid(21) {
        let tm = canonical_classical_mac(&[lam, 1.0 - lam])?;
        worst = worst.max(ba_mac_rate_sum(&tm, &MacOptions::default())?.value_bits);
    }
    // one transmitting path, uniform on/off
    let single = canonical_classical_mac(&[1.0, 0.0])?;
    let block_transmit = rate_sum(&single, &[vec![0.5, 0.5], vec![0.5, 0.5]]);
    Ok(vec![Check::at_most("max_rate_sum", worst, 1.0 + 1e-9), Check::near("block_transmit", block_transmit, 1.0, 1e-9)])
}

fn one_sender_optimum() -> Result<Vec<Check>> {
    let o = optimize_one_sender()?;
    let res = o.residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(vec![
        Check::near("value_bits", o.value_bits, 1.0931, 1e-3),
        Check::near("q", o.q, 0.8701, 0.01),
        Check::near("cos2_theta", o.cos2_theta, 0.4715, 0.01),
        Check::info("sin2_theta", o.sin2_theta),
        Check::at_most("max_residual", res, 1e-9),
    ])
}

fn balanced_one_sender() -> Result<Vec<Check>> {
    let want = (17.0f64 / 8.0).log2();
    let a = acc_info_one_sender(15.0 / 17.0, FRAC_PI_4)?;
    let ch = mutual_information_product(&transition_balanced(), &reference_prior_display());
    Ok(vec![Check::near("acc_info", a.value_bits, want, 1e-10), Check::near("channel_mi", ch, want, 1e-12)])
}

fn two_sender_optimum() -> Result<Vec<Check>> {
    let o = optimize_two_sender_ternary()?;
    Ok(vec![
        Check::near("value_bits", o.value_bits, 1.10138, 1e-3),
        Check::near("q", o.q, 0.9197, 0.01),
        Check::near("q_prime", o.q_prime, 0.9197, 0.01),
        Check::near("theta", o.theta, FRAC_PI_4, 0.01),
        Check::near("channel_bits", o.channel_bits, o.value_bits, 1e-8),
    ])
}

fn holevo_optimum() -> Result<Vec<Check>> {
    let h = holevo_one_sender_closed_form()?;
    let chi = holevo_chi(&optimal_ensemble(h.x)?);
    Ok(vec![
        Check::near("chi_bits", h.chi_bits, 1.2339, 1e-4),
        Check::near("x", h.x, 0.7035, 1e-3),
        Check::near("ensemble_chi", chi, h.chi_bits, 1e-8),
    ])
}

fn phase_ensembles() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 2..=8usize {
        out.push(Check::near(format!("plain_N{n}"), phase_ensemble_chi(n, false)?, (n as f64).log2(), 1e-10));
        out.push(Check::near(format!("assisted_N{n}"), phase_ensemble_chi(n, true)?, ((n + 1) as f64).log2(), 1e-10));
    }
    Ok(out)
}

fn assisted_rate_sums() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    for n in 2..=8usize {
        let tm = n_sender_assisted_protocol(n)?.channel()?;
        let r = ba_mac_rate_sum(&tm, &MacOptions::default())?;
        let ub = r.upper_bound_bits.unwrap_or(f64::INFINITY);
        if n == 2 {
            out.push(Check::near("N2", r.value_bits, 1.0875, 1e-4));
        } else if let Some((_, g)) = ASSISTED_GOLDENS.iter().find(|g| g.0 == n) {
            out.push(Check::near(format!("N{n}_golden"), r.value_bits, *g, 1e-8));
        }
        out.push(Check::within(format!("N{n}_band"), r.value_bits, 1.0875 - 1e-6, ub));
        monotone &= r.value_bits >= prev;
        prev = r.value_bits;
    }
    out.push(Check::flag("non_decreasing", monotone));
    Ok(out)
}

fn equivalence() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 2..=4usize {
        let eq = assisted_to_unassisted(n)?;
        let assisted = n_sender_assisted_protocol(n)?.channel()?;
        let direct = eq.unassisted.channel()?;
        let transformed = eq.transformed_channel()?;
        out.push(Check::at_most(format!("N{n}_unassisted"), assisted.max_deviation(&direct), 1e-12));
        out.push(Check::at_most(format!("N{n}_transformed"), assisted.max_deviation(&transformed), 1e-12));
    }
    Ok(out)
}

fn classical_region() -> Result<Vec<Check>> {
    let lams = lambda_grid(201);
    let sweep = classical_region_sweep(&lams, &MacOptions { tol: 1e-12, ..MacOptions::default() }, 101)?;
    let worst = sweep.rows.iter().map(|r| r.region.i12).fold(f64::NEG_INFINITY, f64::max);
    let dist = |p: (f64, f64)| {
        sweep.hull.iter().map(|h| (h.0 - p.0).abs().max((h.1 - p.1).abs())).fold(f64::INFINITY, f64::min)
    };
    let n = sweep.rows.len();
    let mut sym = 0.0f64;
    for i in 0..n {
        let (a, b) = (&sweep.rows[i].region, &sweep.rows[n - 1 - i].region);
        let (s, d) = (a.star(), b.dstar());
        sym = sym.max((s.0 - d.1).abs()).max((s.1 - d.0).abs());
    }
    Ok(vec![
        Check::at_most("max_rate_sum", worst, 1.0 + 1e-9),
        Check::at_most("hull_vertex_1_0", dist((1.0, 0.0)), 1e-6),
        Check::at_most("hull_vertex_0_1", dist((0.0, 1.0)), 1e-6),
        Check::at_most("lambda_symmetry", sym, 1e-9),
    ])
}

fn detection_threshold() -> Result<Vec<Check>> {
    let t = eta_threshold(PriorPolicy::Fixed)?;
    let ideal = eta_channel(1.0)?;
    Ok(vec![
        Check::near("eta_threshold", t, 0.97, 0.005),
        Check::flag("eta_one_is_balanced", ideal == transition_balanced()),
    ])
}

fn visibility_rate(vs: f64, vz: f64) -> Result<f64> {
    Ok(ba_mac_rate_sum(&visibility_channel(vs, vz)?, &MacOptions { upper_bound: false, ..MacOptions::default() })?.value_bits)
}

fn visibility() -> Result<Vec<Check>> {
    let ideal = visibility_rate(1.0, 1.0)?;
    let g = lambda_grid(21);
    let mut table = vec![vec![0.0; 21]; 21];
    for (i, vs) in g.iter().enumerate() {
        for (j, vz) in g.iter().enumerate() {
            table[i][j] = visibility_rate(*vs, *vz)?;
        }
    }
    let mut worst_drop = 0.0f64;
    for i in 0..21 {
        for j in 0..21 {
            if i + 1 < 21 {
                worst_drop = worst_drop.max(table[i][j] - table[i + 1][j]);
            }
            if j + 1 < 21 {
                worst_drop = worst_drop.max(table[i][j] - table[i][j + 1]);
            }
        }
    }
    let op = visibility_rate(0.995, 0.982)?;
    Ok(vec![
        Check::near("ideal", ideal, 1.0875, 1e-6),
        Check::at_most("monotonicity_violation", worst_drop, 1e-9),
        Check::within("operating_point", op, 1.0, 1.0875),
    ])
}

fn monte_carlo() -> Result<Vec<Check>> {
    let op = ExperimentConfig::operating_point();
    let tm = op.channel()?;
    let prior = op.joint_prior();
    let v1 = variance_r1(&tm, &prior, 1e5).sqrt();
    let v2 = variance_r2(&tm, &prior, op.random_bits as f64, op.counts_per_setting as f64).sqrt();
    let ideal = ExperimentConfig::default();
    let batch = monte_carlo_batch(&ideal, &ideal.channel()?, McMode::Joint, 100)?;
    // fixed-prior estimate from 1e5 photons per setting, for comparison only
    let ch = monte_carlo_batch(&ideal, &ideal.channel()?, McMode::Characterization { per_setting: 100_000 }, 100)?;
    let want = (17.0f64 / 8.0).log2();
    Ok(vec![
        Check::near("sqrt_V_R1", v1, 0.002, 0.001),
        Check::near("sqrt_V_R2", v2, 0.011, 0.0055),
        Check::near("mc_mean", batch.mean, want, 3.0 * batch.stderr),
        Check::info("mc_stderr", batch.stderr),
        Check::info("characterization_mean", ch.mean),
        Check::info("characterization_stderr", ch.stderr),
    ])
}

fn random_channel(rng: &mut ChaCha8Rng) -> Result<TransitionMatrix> {
    let cols = (0..4)
        .map(|_| {
            let e: Vec<f64> = (0..3).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|v| v / s).collect()
        })
        .collect();
    TransitionMatrix::new(vec![2, 2], 3, cols)
}

fn oracle() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut cases: Vec<(String, TransitionMatrix, usize)> = Vec::new();
    for k in 0..10 {
        cases.push((format!("random_{k}"), random_channel(&mut rng)?, 401));
    }
    cases.push(("assisted_N2".into(), n_sender_assisted_protocol(2)?.channel()?, 401));
    cases.push(("balanced".into(), transition_balanced(), 401));
    cases.push(("unassisted_N2".into(), assisted_to_unassisted(2)?.unassisted.channel()?, 401));
    cases.push(("operating_point".into(), ExperimentConfig::operating_point().channel()?, 401));
    cases.push(("ternary".into(), two_sender_ternary(0.9197, 0.9197, FRAC_PI_4)?.channel()?, 121));
    let mut out = Vec::new();
    for (name, tm, res) in cases {
        let g = grid_oracle_rate_sum(&tm, res)?;
        let b = ba_mac_rate_sum(&tm, &MacOptions { upper_bound: false, ..MacOptions::default() })?;
        out.push(Check::at_most(name, (g.value_bits - b.value_bits).abs(), 2e-4));
    }
    Ok(out)
}

fn lemma_scan() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut out = Vec::new();
    for k in 0..5 {
        let q = rng.random_range(0.05..0.95);
        let theta = rng.random_range(0.05..FRAC_PI_2 - 0.05);
        let scan = lemma_alpha_beta_scan(q, theta, 121)?;
        out.push(Check::flag(format!("maxima_at_pi_{k}"), scan.all_at_pi_multiples));
        out.push(Check::at_most(format!("alpha_zero_{k}"), alpha_zero_accessible(q, theta, 101, 72)?, 1.0 + 1e-9));
    }
    Ok(out)
}
