//! Seeded count generation and the error-propagation formulas.
//!
//! Every run draws from its own `ChaCha8Rng` seeded with the run seed, so a
//! run is reproducible on its own and batches are independent of thread count.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use super::channels::visibility_channel;
use super::check_unit;
use crate::error::{Error, Result};
use crate::info::{mutual_information_channel, shannon, JointDistribution};
use crate::mac::protocols::reference_prior_display;
use crate::mac::{check_distribution, product_prior, TransitionMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub eta: f64,
    pub v_sagnac: f64,
    pub v_mz: f64,
    /// Photons recorded per input setting (`m`).
    pub counts_per_setting: u64,
    /// Number of random input tuples (`n`).
    pub random_bits: usize,
    pub seed: u64,
    pub priors: Vec<Vec<f64>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            eta: 1.0,
            v_sagnac: 1.0,
            v_mz: 1.0,
            counts_per_setting: 600,
            random_bits: 680,
            seed: 0,
            priors: reference_prior_display(),
        }
    }
}

impl ExperimentConfig {
    /// Reported operating point: `v_s = 0.995`, `v_z = 0.982`, `n = 680`, `m = 600`.
    pub fn operating_point() -> Self {
        Self { v_sagnac: 0.995, v_mz: 0.982, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("eta", self.eta)?;
        check_unit("v_sagnac", self.v_sagnac)?;
        check_unit("v_mz", self.v_mz)?;
        if self.counts_per_setting == 0 || self.random_bits == 0 {
            return Err(Error::InvalidParameter("sample sizes must be positive".into()));
        }
        if self.priors.len() != 2 {
            return Err(Error::InvalidParameter("two sender priors expected".into()));
        }
        for p in &self.priors {
            check_distribution(p, "sender prior")?;
        }
        Ok(())
    }

    /// Visibility-degraded channel followed by detector loss into port 0.
    pub fn channel(&self) -> Result<TransitionMatrix> {
        self.validate()?;
        let tm = visibility_channel(self.v_sagnac, self.v_mz)?;
        let eta = self.eta;
        let k: Vec<Vec<f64>> = (0..3)
            .map(|y| (0..3).map(|z| if y == z { eta } else { 0.0 } + if z == 0 { 1.0 - eta } else { 0.0 }).collect())
            .collect();
        tm.post_process(&k)
    }

    pub fn joint_prior(&self) -> Vec<f64> {
        product_prior(&self.priors)
    }
}

/// Counts `n(x, y)` indexed by flat joint input and output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub inputs: Vec<usize>,
    pub outputs: usize,
    pub counts: Vec<Vec<u64>>,
}

impl CountTable {
    pub fn zeros(inputs: &[usize], outputs: usize) -> Self {
        let n: usize = inputs.iter().product();
        Self { inputs: inputs.to_vec(), outputs, counts: vec![vec![0; outputs]; n] }
    }

    pub fn totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.totals().iter().sum()
    }

    /// `(input tuple, y, count)` in row order.
    pub fn rows(&self) -> Vec<(Vec<usize>, usize, u64)> {
        let mut out = Vec::new();
        for (x, row) in self.counts.iter().enumerate() {
            let t = crate::mac::unflatten(&self.inputs, x);
            for (y, c) in row.iter().enumerate() {
                out.push((t.clone(), y, *c));
            }
        }
        out
    }

    /// Plug-in `I(X:Y)` from the joint counts.
    pub fn mutual_information(&self) -> Result<f64> {
        let total = self.total();
        if total == 0 {
            return Err(Error::InvalidDistribution("empty count table".into()));
        }
        let probs = self.counts.iter().flatten().map(|c| *c as f64 / total as f64).collect();
        JointDistribution::new(vec![self.counts.len(), self.outputs], probs)?.mutual_information(&[0], &[1])
    }

    /// Empirical `p(y|x)`; settings without counts fall back to uniform.
    pub fn conditional(&self) -> Result<TransitionMatrix> {
        let cols = self
            .counts
            .iter()
            .map(|r| {
                let t: u64 = r.iter().sum();
                if t == 0 {
                    vec![1.0 / self.outputs as f64; self.outputs]
                } else {
                    r.iter().map(|c| *c as f64 / t as f64).collect()
                }
            })
            .collect();
        TransitionMatrix::new(self.inputs.clone(), self.outputs, cols)
    }
}

pub(crate) fn multinomial(rng: &mut impl Rng, n: u64, p: &[f64]) -> Vec<u64> {
    let mut out = vec![0; p.len()];
    let mut left = n;
    let mut mass = 1.0;
    for (k, pk) in p.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == p.len() {
            out[k] = left;
            break;
        }
        let prob = if mass > 0.0 { (pk / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, prob).expect("valid binomial").sample(rng);
        out[k] = draw;
        left -= draw;
        mass -= pk;
    }
    out
}

/// Characterization-mode variance
/// `V[R1] = N^-2 sum_xy [(p(x) log q(y) + p(x) H(q))^2 + (p(x) log p(y|x) + p(x) H(p(.|x)))^2] V[n_y|x]`
/// with `V[n_y|x] = N p(y|x)(1 - p(y|x))`.
pub fn variance_r1(tm: &TransitionMatrix, prior: &[f64], n_per_setting: f64) -> f64 {
    let q = output_marginal(tm, prior);
    let hq = shannon(&q);
    let mut v = 0.0;
    for (x, col) in tm.columns().enumerate() {
        let hx = shannon(col);
        for (y, &p) in col.iter().enumerate() {
            if p <= 0.0 || p >= 1.0 {
                continue;
            }
            let a = prior[x] * (q[y].log2() + hq);
            let b = prior[x] * (p.log2() + hx);
            v += (a * a + b * b) * n_per_setting * p * (1.0 - p);
        }
    }
    v / (n_per_setting * n_per_setting)
}

/// Joint-mode variance
/// `V[R2] = (nm)^-2 sum_xy (log p(x) + log q(y) - log p(x,y) + I)^2 V[n_xy]` with
/// `V[n_xy] = n p(x)(1 - p(x)) m + n m p(y|x)(1 - p(y|x))`.
pub fn variance_r2(tm: &TransitionMatrix, prior: &[f64], n: f64, m: f64) -> f64 {
    let q = output_marginal(tm, prior);
    let i = mutual_information_channel(tm, prior);
    let mut v = 0.0;
    for (x, col) in tm.columns().enumerate() {
        for (y, &p) in col.iter().enumerate() {
            let joint = prior[x] * p;
            if joint <= 0.0 {
                continue;
            }
            let d = prior[x].log2() + q[y].log2() - joint.log2() + i;
            let var_n = n * prior[x] * (1.0 - prior[x]) * m + n * m * p * (1.0 - p);
            v += d * d * var_n;
        }
    }
    v / (n * m).powi(2)
}

fn output_marginal(tm: &TransitionMatrix, prior: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; tm.outputs()];
    for (x, col) in tm.columns().enumerate() {
        for (y, p) in col.iter().enumerate() {
            q[y] += prior[x] * p;
        }
    }
    q
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRun {
    #[serde(rename = "I_bits")]
    pub i_bits: f64,
    #[serde(rename = "V_R1")]
    pub v_r1: f64,
    #[serde(rename = "V_R2")]
    pub v_r2: f64,
    pub seed: u64,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub table: CountTable,
}

fn check_channel(config: &ExperimentConfig, tm: &TransitionMatrix) -> Result<()> {
    config.validate()?;
    let sizes: Vec<usize> = config.priors.iter().map(|p| p.len()).collect();
    if tm.inputs() != sizes.as_slice() {
        return Err(Error::DimensionMismatch { expected: sizes.iter().product(), got: tm.num_joint_inputs() });
    }
    Ok(())
}

/// Joint mode: `n` random input tuples, `m` detected photons per tuple.
/// Variances are plug-in evaluations of the formulas above.
pub fn monte_carlo_joint(config: &ExperimentConfig, tm: &TransitionMatrix) -> Result<McRun> {
    check_channel(config, tm)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samplers = config
        .priors
        .iter()
        .map(|p| WeightedIndex::new(p).map_err(|e| Error::InvalidDistribution(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let mut table = CountTable::zeros(tm.inputs(), tm.outputs());
    for _ in 0..config.random_bits {
        let x: Vec<usize> = samplers.iter().map(|s| s.sample(&mut rng)).collect();
        let flat = tm.flat_index(&x);
        let draw = multinomial(&mut rng, config.counts_per_setting, tm.column(flat));
        for (slot, c) in table.counts[flat].iter_mut().zip(draw) {
            *slot += c;
        }
    }
    let i_bits = table.mutual_information()?;
    let emp = table.conditional()?;
    let totals = table.totals();
    let settings = totals.iter().filter(|t| **t > 0).count().max(1);
    let per_setting = table.total() as f64 / settings as f64;
    let prior = config.joint_prior();
    Ok(McRun {
        i_bits,
        v_r1: variance_r1(&emp, &prior, per_setting),
        v_r2: variance_r2(&emp, &prior, config.random_bits as f64, config.counts_per_setting as f64),
        seed: config.seed,
        config: config.clone(),
        table,
    })
}

/// Characterization mode: `per_setting` photons for every input tuple, then
/// `I` of the empirical channel under the configured prior.
pub fn monte_carlo_characterization(config: &ExperimentConfig, tm: &TransitionMatrix, per_setting: u64) -> Result<McRun> {
    check_channel(config, tm)?;
    if per_setting == 0 {
        return Err(Error::InvalidParameter("per-setting count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut table = CountTable::zeros(tm.inputs(), tm.outputs());
    for (x, row) in table.counts.iter_mut().enumerate() {
        *row = multinomial(&mut rng, per_setting, tm.column(x));
    }
    let emp = table.conditional()?;
    let prior = config.joint_prior();
    Ok(McRun {
        i_bits: mutual_information_channel(&emp, &prior),
        v_r1: variance_r1(&emp, &prior, per_setting as f64),
        v_r2: variance_r2(&emp, &prior, config.random_bits as f64, config.counts_per_setting as f64),
        seed: config.seed,
        config: config.clone(),
        table,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum McMode {
    Joint,
    Characterization { per_setting: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub values: Vec<f64>,
}

/// `runs` independent runs with seeds `seed, seed + 1, ...`.
pub fn monte_carlo_batch(config: &ExperimentConfig, tm: &TransitionMatrix, mode: McMode, runs: usize) -> Result<BatchSummary> {
    if runs < 2 {
        return Err(Error::InvalidParameter("need at least two runs".into()));
    }
    let values = (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let cfg = ExperimentConfig { seed: config.seed.wrapping_add(k), ..config.clone() };
            match mode {
                McMode::Joint => monte_carlo_joint(&cfg, tm),
                McMode::Characterization { per_setting } => monte_carlo_characterization(&cfg, tm, per_setting),
            }
            .map(|r| r.i_bits)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<f64>() / runs as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    Ok(BatchSummary { runs, mean, std: var.sqrt(), stderr: (var / runs as f64).sqrt(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::channels::eta_channel;
    use crate::mac::protocols::transition_balanced;

    #[test]
    fn multinomial_conserves_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [0, 1, 17, 100_000] {
            let c = multinomial(&mut rng, n, &[0.5, 0.25, 0.25]);
            assert_eq!(c.iter().sum::<u64>(), n);
        }
        assert_eq!(multinomial(&mut rng, 50, &[0.0, 1.0, 0.0]), vec![0, 50, 0]);
    }

    #[test]
    fn same_seed_same_table() {
        let cfg = ExperimentConfig::default();
        let tm = transition_balanced();
        let a = monte_carlo_joint(&cfg, &tm).unwrap();
        let b = monte_carlo_joint(&cfg, &tm).unwrap();
        assert_eq!(a.table, b.table);
        let c = monte_carlo_joint(&ExperimentConfig { seed: 1, ..cfg }, &tm).unwrap();
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn joint_counts_add_up() {
        let cfg = ExperimentConfig { random_bits: 50, counts_per_setting: 7, ..ExperimentConfig::default() };
        let run = monte_carlo_joint(&cfg, &transition_balanced()).unwrap();
        assert_eq!(run.table.total(), 350);
        assert_eq!(run.table.rows().len(), 12);
    }

    #[test]
    fn eta_composition_matches_eta_channel() {
        let cfg = ExperimentConfig { eta: 0.93, ..ExperimentConfig::default() };
        assert!(cfg.channel().unwrap().max_deviation(&eta_channel(0.93).unwrap()) < 1e-12);
    }

    #[test]
    fn large_sample_estimate_is_close() {
        let cfg = ExperimentConfig { random_bits: 2000, counts_per_setting: 5000, ..ExperimentConfig::default() };
        let run = monte_carlo_joint(&cfg, &transition_balanced()).unwrap();
        assert!((run.i_bits - (17.0f64 / 8.0).log2()).abs() < 0.02);
    }

    #[test]
    fn variances_vanish_for_noiseless_identity() {
        let tm = TransitionMatrix::new(vec![2], 2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(variance_r1(&tm, &[0.5, 0.5], 100.0), 0.0);
    }

    #[test]
    fn mismatched_channel_rejected() {
        let tm = TransitionMatrix::new(vec![2], 2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(monte_carlo_joint(&ExperimentConfig::default(), &tm).is_err());
    }
}
