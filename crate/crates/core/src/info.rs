//! Shannon and von Neumann quantities. All logarithms are base 2 and
//! `0 log 0 = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{ba_mac_rate_sum, MacOptions};
use crate::error::{Error, Result};
use crate::mac::classical::canonical_classical_mac;
use crate::mac::{check_distribution, product_prior, unflatten, TransitionMatrix};
use crate::quantum::{hermitian_eigenvalues, CMatrix, DensityOperator};

#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy without range checks; callers keep `x` in `[0, 1]`.
#[inline]
pub fn h2(x: f64) -> f64 {
    -xlogx(x) - xlogx(1.0 - x)
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("binary entropy argument {x}")));
    }
    Ok(h2(x))
}

pub fn entropy(dist: &[f64]) -> Result<f64> {
    check_distribution(dist, "distribution")?;
    Ok(shannon(dist))
}

pub(crate) fn shannon(dist: &[f64]) -> f64 {
    -dist.iter().map(|p| xlogx(*p)).sum::<f64>()
}

/// Joint distribution over several finite variables, last index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total != probs.len() {
            return Err(Error::DimensionMismatch { expected: total, got: probs.len() });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("negative entry".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("total {s}")));
        }
        Ok(Self { dims, probs })
    }

    /// `p(x_1 .. x_N, y)` from per-sender priors and a channel; `y` is the last variable.
    pub fn from_channel(tm: &TransitionMatrix, priors: &[Vec<f64>]) -> Result<Self> {
        if priors.len() != tm.num_senders() {
            return Err(Error::DimensionMismatch { expected: tm.num_senders(), got: priors.len() });
        }
        for (p, m) in priors.iter().zip(tm.inputs()) {
            if p.len() != *m {
                return Err(Error::DimensionMismatch { expected: *m, got: p.len() });
            }
            check_distribution(p, "prior")?;
        }
        let px = product_prior(priors);
        let probs = tm.columns().zip(&px).flat_map(|(col, w)| col.iter().map(move |p| p * w)).collect();
        let mut dims = tm.inputs().to_vec();
        dims.push(tm.outputs());
        Self::new(dims, probs)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_vars(&self) -> usize {
        self.dims.len()
    }

    /// Marginal over the listed variables, in the listed order.
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let sub: Vec<usize> = vars.iter().map(|&v| self.dims[v]).collect();
        let mut out = vec![0.0; sub.iter().product()];
        for (i, p) in self.probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let t = unflatten(&self.dims, i);
            let idx = vars.iter().zip(&sub).fold(0, |acc, (&v, &m)| acc * m + t[v]);
            out[idx] += p;
        }
        out
    }

    pub fn entropy_of(&self, vars: &[usize]) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        shannon(&self.marginal(vars))
    }

    fn check_sets(&self, sets: &[&[usize]]) -> Result<()> {
        let mut seen = vec![false; self.num_vars()];
        for (k, s) in sets.iter().enumerate() {
            if s.is_empty() && k < 2 {
                return Err(Error::InvalidParameter("empty variable set".into()));
            }
            for &v in s.iter() {
                if v >= self.num_vars() || seen[v] {
                    return Err(Error::InvalidParameter(format!("malformed partition at variable {v}")));
                }
                seen[v] = true;
            }
        }
        Ok(())
    }

    /// `I(A : B) = H(A) + H(B) - H(AB)`.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        self.check_sets(&[a, b])?;
        let ab: Vec<usize> = a.iter().chain(b).copied().collect();
        Ok(self.entropy_of(a) + self.entropy_of(b) - self.entropy_of(&ab))
    }

    /// `I(A : C | B) = I(AB : C) - I(B : C)`.
    pub fn conditional_mutual_information(&self, a: &[usize], c: &[usize], b: &[usize]) -> Result<f64> {
        self.check_sets(&[a, c, b])?;
        let ab: Vec<usize> = a.iter().chain(b).copied().collect();
        let i_b = if b.is_empty() { 0.0 } else { self.mutual_information(b, c)? };
        Ok(self.mutual_information(&ab, c)? - i_b)
    }
}

/// `I(X : Y) = sum_x p(x) D(p(.|x) || q)` for a joint prior over flattened inputs.
pub fn mutual_information_channel(tm: &TransitionMatrix, prior: &[f64]) -> f64 {
    let k = tm.outputs();
    let mut q = vec![0.0; k];
    let mut cond = 0.0;
    for (col, w) in tm.columns().zip(prior) {
        if *w == 0.0 {
            continue;
        }
        for (qy, p) in q.iter_mut().zip(col) {
            *qy += w * p;
        }
        cond += w * col.iter().map(|p| xlogx(*p)).sum::<f64>();
    }
    (shannon(&q) + cond).max(0.0)
}

/// `I(X_1 .. X_N : Y)` under a product prior.
pub fn mutual_information_product(tm: &TransitionMatrix, priors: &[Vec<f64>]) -> f64 {
    mutual_information_channel(tm, &product_prior(priors))
}

/// Prior-weighted encoded states.
#[derive(Clone, Debug)]
pub struct CqEnsemble {
    priors: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqEnsemble {
    pub fn new(priors: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        check_distribution(&priors, "ensemble prior")?;
        if priors.len() != states.len() {
            return Err(Error::DimensionMismatch { expected: priors.len(), got: states.len() });
        }
        let space = states[0].space();
        for (i, s) in states.iter().enumerate() {
            if s.space() != space {
                return Err(Error::DimensionMismatch { expected: space.dimension(), got: s.space().dimension() });
            }
            if (s.trace() - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized(s.trace()));
            }
            let min = s.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
            if min < -1e-10 {
                return Err(Error::InvalidState(format!("state {i} has eigenvalue {min:e}")));
            }
        }
        Ok(Self { priors, states })
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn average(&self) -> CMatrix {
        let d = self.states[0].space().dimension();
        self.priors
            .iter()
            .zip(&self.states)
            .fold(CMatrix::zeros(d, d), |acc, (p, s)| acc + s.matrix() * crate::quantum::C64::new(*p, 0.0))
    }

    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let states = self.states.iter().map(|s| s.conjugate(u)).collect::<Result<Vec<_>>>()?;
        Ok(Self { priors: self.priors.clone(), states })
    }
}

fn matrix_entropy(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).into_iter().filter(|l| *l > 1e-12).map(|l| -l * l.log2()).sum()
}

/// `chi = S(sum p sigma) - sum p S(sigma)`.
pub fn holevo_chi(ensemble: &CqEnsemble) -> f64 {
    let avg = matrix_entropy(&ensemble.average());
    let each: f64 = ensemble
        .priors
        .iter()
        .zip(&ensemble.states)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, s)| p * s.entropy())
        .sum();
    (avg - each).max(0.0)
}

/// Two-sender pentagon for a fixed product prior.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRegion {
    pub i1_given_2: f64,
    pub i2_given_1: f64,
    pub i12: f64,
    pub i1: f64,
    pub i2: f64,
    pub prior: Vec<Vec<f64>>,
}

impl RateRegion {
    /// `(I(X1:Y), I(X2:Y|X1))`.
    pub fn star(&self) -> (f64, f64) {
        (self.i1, self.i2_given_1)
    }

    /// `(I(X1:Y|X2), I(X2:Y))`.
    pub fn dstar(&self) -> (f64, f64) {
        (self.i1_given_2, self.i2)
    }

    /// Vertices in counter-clockwise order starting at the origin.
    pub fn pentagon(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 0.0), (self.i1_given_2, 0.0), self.dstar(), self.star(), (0.0, self.i2_given_1)]
    }

    /// Largest `R2` with `(r1, R2)` inside the pentagon, if `r1` is admissible.
    pub fn max_r2(&self, r1: f64) -> Option<f64> {
        if r1 < 0.0 || r1 > self.i1_given_2 + 1e-15 {
            return None;
        }
        Some(self.i2_given_1.min(self.i12 - r1).max(0.0))
    }
}

pub fn rate_region_two_sender(tm: &TransitionMatrix, priors: &[Vec<f64>]) -> Result<RateRegion> {
    if tm.num_senders() != 2 {
        return Err(Error::InvalidParameter(format!("{} senders, need 2", tm.num_senders())));
    }
    let j = JointDistribution::from_channel(tm, priors)?;
    let (x1, x2, y) = ([0usize], [1usize], [2usize]);
    let i12 = j.mutual_information(&[0, 1], &y)?;
    let i1 = j.mutual_information(&x1, &y)?;
    let i2 = j.mutual_information(&x2, &y)?;
    Ok(RateRegion {
        i1_given_2: (i12 - i2).max(0.0),
        i2_given_1: (i12 - i1).max(0.0),
        i12,
        i1,
        i2,
        prior: priors.to_vec(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub region: RateRegion,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalSweep {
    pub rows: Vec<SweepRow>,
    /// Upper boundary of the union of pentagons, ordered by `R1`.
    pub boundary: Vec<(f64, f64)>,
    /// Convex hull of every pentagon vertex, counter-clockwise.
    pub hull: Vec<(f64, f64)>,
}

/// Canonical classical MAC with weight `lambda` on path 1, maximized over
/// product priors at every grid point.
pub fn classical_region_sweep(lambdas: &[f64], opts: &MacOptions, boundary_points: usize) -> Result<ClassicalSweep> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty lambda grid".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::InvalidParameter(format!("lambda {l} outside [0, 1]")));
    }
    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let tm = canonical_classical_mac(&[lambda, 1.0 - lambda])?;
            let best = ba_mac_rate_sum(&tm, opts)?;
            let region = rate_region_two_sender(&tm, &best.prior)?;
            Ok(SweepRow { lambda, region })
        })
        .collect::<Result<Vec<_>>>()?;
    let m = boundary_points.max(2);
    let boundary = (0..m)
        .map(|i| {
            let r1 = i as f64 / (m - 1) as f64;
            let r2 = rows.iter().filter_map(|r| r.region.max_r2(r1)).fold(f64::NEG_INFINITY, f64::max);
            (r1, r2)
        })
        .filter(|(_, r2)| r2.is_finite())
        .collect();
    let points: Vec<(f64, f64)> = rows.iter().flat_map(|r| r.region.pentagon()).collect();
    Ok(ClassicalSweep { rows, boundary, hull: convex_hull(&points) })
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; collinear points within 1e-12 are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p: Vec<(f64, f64)> = points.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 1e-12 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 1e-12 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
