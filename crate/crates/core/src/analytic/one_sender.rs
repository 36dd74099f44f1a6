//! Accessible information of the one-sender assisted ensemble.
//!
//! The sender sits on the `cos(theta)` path of `cos(theta)|e1> + sin(theta)|e2>`
//! and blocks with probability `1 - q`, otherwise applying identity or a phase
//! `alpha` with probability `q/2` each.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::roots::{bisect, damped_newton};
use crate::error::{Error, Result};
use crate::info::{h2, mutual_information_product, xlogx};
use crate::mac::protocols::{one_sender_assisted, Protocol};
use crate::quantum::{projector, CVector, ModeSpace, Povm, C64};

/// Third-constraint tolerance when materializing a POVM.
const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSenderScenario {
    pub q: f64,
    pub theta: f64,
    pub alpha: f64,
}

impl OneSenderScenario {
    pub fn new(q: f64, theta: f64, alpha: f64) -> Result<Self> {
        check_q(q)?;
        if !theta.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter("non-finite angle".into()));
        }
        Ok(Self { q, theta, alpha })
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("prior parameter {q} outside [0, 1]")));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma} outside [0, 1]")));
    }
    Ok(())
}

fn j_raw(sigma: f64, beta: f64, q: f64, theta: f64, alpha: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let sb = 1.0 - sigma;
    let a = sb.sqrt() * c;
    let b = sigma.sqrt() * s;
    let amp = |phase: f64| (Complex::new(a, 0.0) + Complex::from_polar(b, phase)).norm_sqr();
    let kappa = q * sb * c * c + q * (beta.cos() + (beta - alpha).cos()) * (sb * sigma).sqrt() * c * s + sigma * s * s;
    q * xlogx(amp(beta)) + q * xlogx(amp(beta - alpha)) + 2.0 * (1.0 - q) * xlogx(sigma * s * s)
        - 2.0 * xlogx(kappa)
        - c * c * xlogx(1.0 - q)
}

/// `J(sigma, beta; q, theta, alpha)` in bits.
pub fn j_one_sender(sigma: f64, beta: f64, sc: &OneSenderScenario) -> Result<f64> {
    check_sigma(sigma)?;
    check_q(sc.q)?;
    Ok(j_raw(sigma, beta, sc.q, sc.theta, sc.alpha))
}

/// `J` at `alpha = beta = pi`.
pub fn j_tilde(sigma: f64, q: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let a = (1.0 - sigma).sqrt() * c;
    let b = sigma.sqrt() * s;
    let kappa = q * a * a + b * b;
    q * xlogx((a + b) * (a + b)) + q * xlogx((a - b) * (a - b)) + 2.0 * (1.0 - q) * xlogx(b * b)
        - 2.0 * xlogx(kappa)
        - c * c * xlogx(1.0 - q)
}

/// `dJ~/dsigma` on `(0, 1]`.
///
/// Near `sigma = 1` the two `q`-weighted terms each diverge like `1/a`; their
/// difference is rewritten through `atanh(a/b)`.
pub fn j_tilde_prime(sigma: f64, q: f64, theta: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let a = (1.0 - sigma).max(0.0).sqrt() * c;
    let b = sigma.sqrt() * s;
    let kappa = q * a * a + b * b;
    let lg = |x: f64| if x > 0.0 { x.log2() } else { 0.0 };

    let interference = if b > 0.0 && a < 0.5 * b {
        // 2q[(aa' + bb')(Lp + Lm) + ab'(Lp - Lm) + a'b(Lp - Lm)] with aa' = -c2/2, bb' = s2/2
        let r = a / b;
        let at = if r == 0.0 { 1.0 } else { r.atanh() / r };
        let l_sum = lg((b * b - a * a).powi(2));
        let l_diff = 4.0 * r.atanh() / ln2;
        2.0 * q * ((s2 - c2) / 2.0 * l_sum + a * s2 / (2.0 * b) * l_diff) - 4.0 * q * c2 * at / ln2
    } else {
        let da = if a > 0.0 { -c2 / (2.0 * a) } else { 0.0 };
        let db = if b > 0.0 { s2 / (2.0 * b) } else { 0.0 };
        let term = |u: f64, du: f64| if u != 0.0 { 2.0 * u * du * lg(u * u) } else { 0.0 };
        q * (term(a + b, da + db) + term(a - b, da - db))
    } + 2.0 * q * (s2 - c2) / ln2;

    let blocked = 2.0 * (1.0 - q) * s2 * (lg(b * b) + 1.0 / ln2);
    let mixed = -2.0 * (s2 - q * c2) * (lg(kappa) + 1.0 / ln2);
    interference + blocked + mixed
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// Measure `|e1>`, `|e2>`: `(sigma1, sigma2) = (0, 1)`.
    Computational = 1,
    /// `|e1>` plus a mirror-symmetric pair at `sigma*`.
    Tangent = 2,
    /// `(|e1> +- |e2>)/sqrt2`.
    Symmetric = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PovmTerm {
    pub weight: f64,
    pub sigma: f64,
    pub beta: f64,
}

/// Mirror-symmetric POVM family `{w_m, sigma_m, beta_m}` plus the encoding phase.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricPovmParams {
    pub terms: Vec<PovmTerm>,
    pub alpha: f64,
}

impl SymmetricPovmParams {
    /// First two constraints: weights sum to 1 and `sum w sigma = 1/2`.
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidParameter("no POVM terms".into()));
        }
        for t in &self.terms {
            if t.weight < 0.0 || !(0.0..=1.0).contains(&t.sigma) {
                return Err(Error::InvalidParameter(format!("bad term {t:?}")));
            }
        }
        let w: f64 = self.terms.iter().map(|t| t.weight).sum();
        let ws: f64 = self.terms.iter().map(|t| t.weight * t.sigma).sum();
        if (w - 1.0).abs() > 1e-12 || (ws - 0.5).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {w}, weighted sigma {ws}")));
        }
        Ok(())
    }

    /// Modulus of `sum w sqrt(sigma (1 - sigma)) (e^{i beta} + e^{-i(alpha + beta)})`.
    pub fn third_constraint_residual(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let r = t.weight * (t.sigma * (1.0 - t.sigma)).sqrt();
                Complex::from_polar(r, t.beta) + Complex::from_polar(r, -(self.alpha + t.beta))
            })
            .sum::<C64>()
            .norm()
    }

    /// `sum_m w_m J(sigma_m, beta_m)`.
    pub fn value(&self, q: f64, theta: f64) -> Result<f64> {
        self.validate()?;
        let sc = OneSenderScenario::new(q, theta, self.alpha)?;
        self.terms.iter().map(|t| Ok(t.weight * j_one_sender(t.sigma, t.beta, &sc)?)).sum()
    }

    /// Vacuum projector plus `w |u><u|`, `w |u'><u'|` per term on the two-path space.
    pub fn materialize(&self) -> Result<Povm> {
        self.validate()?;
        let res = self.third_constraint_residual();
        if res > CONSTRAINT_TOL {
            return Err(Error::InvalidPovm(format!("third constraint violated by {res:e}")));
        }
        let space = ModeSpace::new(2)?;
        let mut elements = vec![projector(&space.basis(0))];
        let mut labels = vec!["vac".to_string()];
        for (m, t) in self.terms.iter().enumerate().filter(|(_, t)| t.weight > 0.0) {
            let a = C64::new((1.0 - t.sigma).sqrt(), 0.0);
            let u = CVector::from_vec(vec![C64::new(0.0, 0.0), a, Complex::from_polar(t.sigma.sqrt(), t.beta)]);
            let v = CVector::from_vec(vec![
                C64::new(0.0, 0.0),
                a,
                Complex::from_polar(t.sigma.sqrt(), -(self.alpha + t.beta)),
            ]);
            let w = C64::new(t.weight, 0.0);
            elements.push(projector(&u) * w);
            elements.push(projector(&v) * w);
            labels.push(format!("{m}"));
            labels.push(format!("{m}'"));
        }
        Povm::new(space, elements, labels)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccInfo {
    pub value_bits: f64,
    pub regime: Regime,
    pub params: SymmetricPovmParams,
    pub region1: f64,
    pub region2: Option<f64>,
    pub region2_sigma: Option<f64>,
    pub region3: f64,
}

fn two_point(s1: f64, s2: f64) -> SymmetricPovmParams {
    let w2 = (0.5 - s1) / (s2 - s1);
    SymmetricPovmParams {
        terms: vec![PovmTerm { weight: 1.0 - w2, sigma: s1, beta: PI }, PovmTerm { weight: w2, sigma: s2, beta: PI }],
        alpha: PI,
    }
}

/// Tangent condition `J~(0) + sigma J~'(sigma) - J~(sigma)`.
pub fn tangent_condition(sigma: f64, q: f64, theta: f64) -> f64 {
    j_tilde(0.0, q, theta) + sigma * j_tilde_prime(sigma, q, theta) - j_tilde(sigma, q, theta)
}

fn region2_scan() -> &'static [f64] {
    use std::sync::OnceLock;
    static GRID: OnceLock<Vec<f64>> = OnceLock::new();
    GRID.get_or_init(|| {
        let mut g: Vec<f64> = (0..=120).map(|i| 0.5 + 0.499 * i as f64 / 120.0).collect();
        // approach sigma = 1 geometrically
        g.extend((1..=40).map(|k| 1.0 - 1e-3 * 10f64.powf(-11.0 * k as f64 / 40.0)));
        g
    })
}

/// Region-2 candidates: tangent points `sigma*` in `[1/2, 1)` and their chord values at `1/2`.
pub fn region2_candidates(q: f64, theta: f64) -> Result<Vec<(f64, f64)>> {
    let g = |s: f64| tangent_condition(s, q, theta);
    let grid = region2_scan();
    let j0 = j_tilde(0.0, q, theta);
    let mut out = Vec::new();
    let mut prev = (grid[0], g(grid[0]));
    for &s in &grid[1..] {
        let cur = (s, g(s));
        if prev.1 == 0.0 || prev.1.signum() != cur.1.signum() {
            let root = bisect(g, prev.0, cur.0, 1e-12)?;
            let chord = j0 + 0.5 / root * (j_tilde(root, q, theta) - j0);
            out.push((root, chord));
        }
        prev = cur;
    }
    Ok(out)
}

/// Accessible information with `alpha = pi`: the best of the three measurement regimes.
pub fn acc_info_one_sender(q: f64, theta: f64) -> Result<AccInfo> {
    check_q(q)?;
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, pi/2]")));
    }
    let r1 = 0.5 * (j_tilde(0.0, q, theta) + j_tilde(1.0, q, theta));
    let r3 = j_tilde(0.5, q, theta);
    let best2 = region2_candidates(q, theta)?.into_iter().max_by(|a, b| a.1.total_cmp(&b.1));
    let mut out = AccInfo {
        value_bits: r1,
        regime: Regime::Computational,
        params: two_point(0.0, 1.0),
        region1: r1,
        region2: best2.map(|b| b.1),
        region2_sigma: best2.map(|b| b.0),
        region3: r3,
    };
    if let Some((s, v)) = best2 {
        if v > out.value_bits {
            out.value_bits = v;
            out.regime = Regime::Tangent;
            out.params = two_point(0.0, s);
        }
    }
    if r3 > out.value_bits {
        out.value_bits = r3;
        out.regime = Regime::Symmetric;
        out.params = SymmetricPovmParams { terms: vec![PovmTerm { weight: 1.0, sigma: 0.5, beta: PI }], alpha: PI };
    }
    Ok(out)
}

/// Best two-point chord of `J~` at `1/2` over a `sigma` grid; an oracle for the regime formulas.
pub fn two_point_envelope(q: f64, theta: f64, points: usize) -> f64 {
    let n = points.max(3);
    let sig: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = sig.iter().map(|s| j_tilde(*s, q, theta)).collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        if sig[i] > 0.5 {
            break;
        }
        for j in 0..n {
            if sig[j] < 0.5 {
                continue;
            }
            let v = if sig[j] == sig[i] {
                vals[i]
            } else {
                vals[i] + (0.5 - sig[i]) / (sig[j] - sig[i]) * (vals[j] - vals[i])
            };
            best = best.max(v);
        }
    }
    best
}

/// Region-3 value as a function of `(q, theta)`.
pub fn i_acc3(q: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    q - q * h2((1.0 + (2.0 * theta).sin()) / 2.0) + (1.0 - q) * xlogx(s2) - xlogx(q * c2 + s2) - c2 * xlogx(1.0 - q)
}

/// `(dI3/dtheta, dI3/dq)`.
pub fn i_acc3_gradient(q: f64, theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let s2t = (2.0 * theta).sin();
    let kappa = q * c2 + s2;
    let ratio = ((1.0 - q) * s2 / kappa).log2();
    let dtheta = q * (2.0 * theta).cos() * ((1.0 + s2t) / (1.0 - s2t)).log2() + (1.0 - q) * s2t * ratio;
    let dq = 1.0 - h2((1.0 + s2t) / 2.0) - s2.log2() + c2 * ratio;
    [dtheta, dq]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneSenderOptimum {
    pub target: String,
    pub q: f64,
    pub theta: f64,
    pub cos2_theta: f64,
    pub sin2_theta: f64,
    pub value_bits: f64,
    pub residuals: Vec<f64>,
    pub regime: Regime,
    pub converged: bool,
    pub grid_max_bits: f64,
    pub grid_argmax: [f64; 2],
}

fn unit_grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

/// Solve the two region-3 stationarity equations by damped Newton from a grid seed,
/// then compare with a 201 x 201 grid of [`acc_info_one_sender`].
pub fn optimize_one_sender() -> Result<OneSenderOptimum> {
    let (mut q0, mut t0, mut best) = (0.5, 0.5, f64::NEG_INFINITY);
    for q in unit_grid(101).skip(1).take(99) {
        for t in unit_grid(101).skip(1).take(99) {
            let th = t * FRAC_PI_2;
            let v = i_acc3(q, th);
            if v > best {
                (q0, t0, best) = (q, th, v);
            }
        }
    }
    let out = damped_newton(
        |x| i_acc3_gradient(x[1], x[0]).to_vec(),
        &[t0, q0],
        |x| {
            x[0] = x[0].clamp(1e-9, FRAC_PI_2 - 1e-9);
            x[1] = x[1].clamp(1e-9, 1.0 - 1e-9);
        },
        1e-13,
        100,
    );
    let (theta, q) = (out.x[0], out.x[1]);

    let grid: Vec<(f64, f64, f64)> = unit_grid(201)
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map_iter(|&qq| {
            unit_grid(201).map(move |t| {
                let th = t * FRAC_PI_2;
                (qq, th, acc_info_one_sender(qq, th).map(|a| a.value_bits).unwrap_or(f64::NEG_INFINITY))
            })
        })
        .collect();
    let g = grid.iter().copied().max_by(|a, b| a.2.total_cmp(&b.2)).expect("non-empty grid");

    let acc = acc_info_one_sender(q, theta)?;
    let (s, c) = theta.sin_cos();
    let mut res = OneSenderOptimum {
        target: "one_sender_accessible".into(),
        q,
        theta,
        cos2_theta: c * c,
        sin2_theta: s * s,
        value_bits: acc.value_bits,
        residuals: out.residuals.clone(),
        regime: acc.regime,
        converged: out.converged && acc.regime == Regime::Symmetric,
        grid_max_bits: g.2,
        grid_argmax: [g.0, g.1],
    };
    if !res.converged || g.2 > res.value_bits + 1e-9 {
        eprintln!("warning: one-sender Newton did not certify; falling back to the grid maximum");
        res.converged = false;
        if g.2 > res.value_bits {
            res.q = g.0;
            res.theta = g.1;
            res.cos2_theta = g.1.cos().powi(2);
            res.sin2_theta = g.1.sin().powi(2);
            res.value_bits = g.2;
        }
    }
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaScan {
    pub q: f64,
    pub theta: f64,
    pub sigma: f64,
    pub spacing: f64,
    /// Grid-local maxima `(alpha, beta, J)`.
    pub local_maxima: Vec<(f64, f64, f64)>,
    /// Local maxima attaining the grid maximum.
    pub global_maxima: Vec<(f64, f64, f64)>,
    pub all_at_pi_multiples: bool,
}

fn near_pi_multiple(x: f64, spacing: f64) -> bool {
    let k = (x / PI).round();
    (x - k * PI).abs() <= spacing + 1e-12
}

/// Scan `J` at `sigma = 1/2` over a periodic `grid x grid` lattice in `(alpha, beta)`
/// covering `[0, 2pi]` with the endpoint identified.
pub fn lemma_alpha_beta_scan(q: f64, theta: f64, grid: usize) -> Result<LemmaScan> {
    lemma_alpha_beta_scan_at(q, theta, 0.5, grid)
}

pub fn lemma_alpha_beta_scan_at(q: f64, theta: f64, sigma: f64, grid: usize) -> Result<LemmaScan> {
    check_q(q)?;
    check_sigma(sigma)?;
    if grid < 5 {
        return Err(Error::InvalidParameter(format!("grid {grid} too small")));
    }
    let n = grid - 1;
    let spacing = 2.0 * PI / n as f64;
    let angle = |i: usize| i as f64 * spacing;
    let vals: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| j_raw(sigma, angle(k % n), q, theta, angle(k / n)))
        .collect();
    let at = |i: usize, j: usize| vals[(i % n) * n + (j % n)];
    let mut local = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = at(i, j);
            let is_max = (0..3).all(|di| (0..3).all(|dj| at(i + n + di - 1, j + n + dj - 1) <= v + 1e-13));
            if is_max {
                local.push((angle(i), angle(j), v));
            }
        }
    }
    let top = local.iter().map(|m| m.2).fold(f64::NEG_INFINITY, f64::max);
    let global = local.iter().copied().filter(|m| m.2 >= top - 1e-12).collect();
    let all = local.iter().all(|m| near_pi_multiple(m.0, spacing) && near_pi_multiple(m.1, spacing));
    Ok(LemmaScan { q, theta, sigma, spacing, local_maxima: local, global_maxima: global, all_at_pi_multiples: all })
}

/// Best mutual information of the `alpha = 0` ensemble over projective
/// measurements `{|vac>, u, u_perp}` with `u = (sqrt(1-sigma), sqrt(sigma) e^{i beta})`
/// on the one-particle block. Built from the states, not from `J`.
pub fn alpha_zero_accessible(q: f64, theta: f64, sigma_points: usize, beta_points: usize) -> Result<f64> {
    check_q(q)?;
    let base = one_sender_assisted(q, theta, 0.0)?;
    let priors = base.encoding.priors();
    let n = sigma_points.max(2);
    let m = beta_points.max(1);
    let space = base.povm.space();
    let values = (0..n * m)
        .into_par_iter()
        .map(|k| {
            let sigma = (k / m) as f64 / (n - 1) as f64;
            let beta = 2.0 * PI * (k % m) as f64 / m as f64;
            let ph = Complex::from_polar(1.0, beta);
            let (a, b) = ((1.0 - sigma).sqrt(), sigma.sqrt());
            let zero = C64::new(0.0, 0.0);
            let u = CVector::from_vec(vec![zero, C64::new(a, 0.0), ph * b]);
            let w = CVector::from_vec(vec![zero, C64::new(b, 0.0), -ph * a]);
            let povm = Povm::projective(space, &[space.basis(0), u, w])?;
            let p = Protocol { povm, ..base.clone() };
            Ok(mutual_information_product(&p.channel()?, &priors))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Materialized POVM for the optimal regime at `(q, theta)`.
pub fn optimal_povm(q: f64, theta: f64) -> Result<Povm> {
    acc_info_one_sender(q, theta)?.params.materialize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{holevo_chi, mutual_information_product};
    use crate::mac::build_mac;
    use crate::mac::protocols::one_sender_assisted;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn constructive(q: f64, theta: f64, params: &SymmetricPovmParams) -> f64 {
        let p = one_sender_assisted(q, theta, params.alpha).unwrap();
        let povm = params.materialize().unwrap();
        let tm = build_mac(&p.initial.density(), &p.encoding, &povm).unwrap();
        mutual_information_product(&tm, &p.encoding.priors())
    }

    #[test]
    fn q_zero_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let sc = OneSenderScenario::new(0.0, rng.random::<f64>() * FRAC_PI_2, rng.random::<f64>() * 6.0).unwrap();
            let v = j_one_sender(rng.random(), rng.random::<f64>() * 6.0, &sc).unwrap();
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn balanced_point_is_log_17_over_8() {
        let sc = OneSenderScenario::new(15.0 / 17.0, FRAC_PI_4, PI).unwrap();
        let v = j_one_sender(0.5, PI, &sc).unwrap();
        assert!((v - (17.0f64 / 8.0).log2()).abs() < 1e-12);
        let a = acc_info_one_sender(15.0 / 17.0, FRAC_PI_4).unwrap();
        assert_eq!(a.regime, Regime::Symmetric);
        assert!((a.value_bits - (17.0f64 / 8.0).log2()).abs() < 1e-10);
    }

    #[test]
    fn q_one_on_diagonal_is_one_bit() {
        let a = acc_info_one_sender(1.0, FRAC_PI_4).unwrap();
        assert!((a.value_bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_simplification() {
        for q in [0.1, 0.4, 0.7, 0.95] {
            let lhs = i_acc3(q, FRAC_PI_4);
            let rhs = 2.0 * q - 1.0 + h2((1.0 + q) / 2.0);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn j_matches_channel_at_symmetric_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let q: f64 = rng.random();
            let theta = rng.random::<f64>() * FRAC_PI_2;
            let params = SymmetricPovmParams { terms: vec![PovmTerm { weight: 1.0, sigma: 0.5, beta: PI }], alpha: PI };
            let j = j_tilde(0.5, q, theta);
            assert!((j - constructive(q, theta, &params)).abs() < 1e-10);
            assert!((j - i_acc3(q, theta)).abs() < 1e-12);
        }
    }

    #[test]
    fn general_j_matches_channel_for_physical_povms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q: f64 = rng.random();
            let theta = rng.random::<f64>() * FRAC_PI_2;
            let s1 = 0.5 * rng.random::<f64>();
            let s2 = 0.5 + 0.5 * rng.random::<f64>();
            let p = two_point(s1, s2);
            assert!((p.value(q, theta).unwrap() - constructive(q, theta, &p)).abs() < 1e-9);
            // with alpha = 0 a single beta = pi pair is unphysical; pair it with beta = 0
            let w = rng.random::<f64>();
            let p0 = SymmetricPovmParams {
                terms: vec![
                    PovmTerm { weight: w / 2.0, sigma: 0.5, beta: 0.0 },
                    PovmTerm { weight: w / 2.0, sigma: 0.5, beta: PI },
                    PovmTerm { weight: (1.0 - w) / 2.0, sigma: 0.0, beta: PI },
                    PovmTerm { weight: (1.0 - w) / 2.0, sigma: 1.0, beta: PI },
                ],
                alpha: 0.0,
            };
            assert!((p0.value(q, theta).unwrap() - constructive(q, theta, &p0)).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let q: f64 = rng.random();
            let theta = 0.05 + rng.random::<f64>() * 1.45;
            let s = 0.05 + 0.94 * rng.random::<f64>();
            let h = 1e-6;
            let fd = (j_tilde(s + h, q, theta) - j_tilde(s - h, q, theta)) / (2.0 * h);
            let an = j_tilde_prime(s, q, theta);
            assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "q {q} theta {theta} s {s}: {fd} vs {an}");
        }
    }

    #[test]
    fn derivative_is_finite_near_one() {
        for k in 4..15 {
            let s = 1.0 - 10f64.powi(-k);
            let d = j_tilde_prime(s, 0.7, 0.6);
            assert!(d.is_finite());
            assert!((d - j_tilde_prime(1.0, 0.7, 0.6)).abs() < 1e-2 * (1.0 + d.abs()) || k < 8);
        }
    }

    #[test]
    fn region3_gradient_matches_finite_difference() {
        for (q, t) in [(0.5, 0.5), (0.87, 0.8), (0.3, 1.2)] {
            let h = 1e-6;
            let g = i_acc3_gradient(q, t);
            let dt = (i_acc3(q, t + h) - i_acc3(q, t - h)) / (2.0 * h);
            let dq = (i_acc3(q + h, t) - i_acc3(q - h, t)) / (2.0 * h);
            assert!((g[0] - dt).abs() < 1e-6 && (g[1] - dq).abs() < 1e-6);
        }
    }

    #[test]
    fn region_two_chord_equals_tangent_formula() {
        let (q, theta) = (0.5, 0.5);
        let cands = region2_candidates(q, theta).unwrap();
        assert!(!cands.is_empty());
        for (s, v) in cands {
            let tangent = j_tilde(0.0, q, theta) + 0.5 * j_tilde_prime(s, q, theta);
            assert!((v - tangent).abs() < 1e-8, "{v} vs {tangent}");
        }
    }

    #[test]
    fn regimes_agree_with_brute_envelope() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let q: f64 = rng.random();
            let theta = rng.random::<f64>() * FRAC_PI_2;
            let a = acc_info_one_sender(q, theta).unwrap();
            let env = two_point_envelope(q, theta, 801);
            assert!(env <= a.value_bits + 1e-9, "q {q} theta {theta}: env {env} > {}", a.value_bits);
            assert!(a.value_bits - env < 1e-4, "q {q} theta {theta}");
        }
    }

    #[test]
    fn optimal_povm_is_physical_and_matches() {
        for (q, theta) in [(0.3, 0.4), (0.5, 0.5), (0.87, 0.81), (0.6, 1.2)] {
            let a = acc_info_one_sender(q, theta).unwrap();
            assert!((constructive(q, theta, &a.params) - a.value_bits).abs() < 1e-8);
        }
    }

    #[test]
    fn holevo_dominates() {
        for q in [0.2, 0.6, 0.9] {
            for theta in [0.3, 0.8, 1.3] {
                let a = acc_info_one_sender(q, theta).unwrap();
                let chi = holevo_chi(&one_sender_assisted(q, theta, PI).unwrap().ensemble().unwrap());
                assert!(a.value_bits <= chi + 1e-9);
            }
        }
    }

    #[test]
    fn third_constraint_flags_unphysical() {
        let p = SymmetricPovmParams { terms: vec![PovmTerm { weight: 1.0, sigma: 0.5, beta: 0.3 }], alpha: PI };
        assert!(p.third_constraint_residual() > 0.1);
        assert!(p.materialize().is_err());
    }

    #[test]
    fn lemma_scan_maxima_sit_on_pi_lattice() {
        let s = lemma_alpha_beta_scan(0.87, FRAC_PI_4, 181).unwrap();
        assert!(s.all_at_pi_multiples);
        let mut g: Vec<(i64, i64)> =
            s.global_maxima.iter().map(|m| ((m.0 / PI).round() as i64, (m.1 / PI).round() as i64)).collect();
        g.sort();
        assert_eq!(g, vec![(1, 0), (1, 1)]);
    }

    #[test]
    fn degenerate_theta_is_flat() {
        let sc = |a, b| j_raw(0.5, b, 0.6, 0.0, a);
        let base = sc(0.0, 0.0);
        for k in 0..20 {
            assert!((sc(k as f64 * 0.3, k as f64 * 0.7) - base).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_zero_never_beats_one_bit() {
        for (q, t) in [(0.5, 0.5), (0.87, FRAC_PI_4), (0.95, 1.0)] {
            let v = alpha_zero_accessible(q, t, 41, 36).unwrap();
            assert!(v <= 1.0 + 1e-9);
            // sigma = 0 is the path readout, worth cos^2(theta) h2(q)
            assert!(v >= t.cos().powi(2) * h2(q) - 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(acc_info_one_sender(1.2, 0.3).is_err());
        let sc = OneSenderScenario { q: 0.5, theta: 0.1, alpha: PI };
        assert!(j_one_sender(1.5, 0.0, &sc).is_err());
    }
}
