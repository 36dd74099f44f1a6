//! Encoding strategies, quantum MAC construction and the classical family.

mod channel;
pub mod classical;
pub mod protocols;

pub use channel::TransitionMatrix;
pub(crate) use channel::unflatten;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::info::CqEnsemble;
use crate::quantum::{apply_npe, measure, DensityOperator, NpeOperation, Povm};

const PRIOR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SenderEncoding {
    pub path: usize,
    pub operations: Vec<NpeOperation>,
    pub prior: Vec<f64>,
}

impl SenderEncoding {
    /// Uniform prior over the given operations.
    pub fn uniform(path: usize, operations: Vec<NpeOperation>) -> Self {
        let m = operations.len().max(1);
        Self { path, operations, prior: vec![1.0 / m as f64; m] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodingStrategy {
    senders: Vec<SenderEncoding>,
}

pub(crate) fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution(format!("{what}: {p:?}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PRIOR_TOL {
        return Err(Error::InvalidDistribution(format!("{what} sums to {s}")));
    }
    Ok(())
}

impl EncodingStrategy {
    pub fn new(senders: Vec<SenderEncoding>) -> Result<Self> {
        if senders.is_empty() {
            return Err(Error::InvalidParameter("no senders".into()));
        }
        for (i, s) in senders.iter().enumerate() {
            if s.operations.is_empty() {
                return Err(Error::InvalidParameter(format!("sender {i} has an empty alphabet")));
            }
            if s.prior.len() != s.operations.len() {
                return Err(Error::DimensionMismatch { expected: s.operations.len(), got: s.prior.len() });
            }
            check_distribution(&s.prior, &format!("prior of sender {i}"))?;
            if senders[..i].iter().any(|o| o.path == s.path) {
                return Err(Error::InvalidParameter(format!("two senders act on path {}", s.path)));
            }
        }
        Ok(Self { senders })
    }

    pub fn senders(&self) -> &[SenderEncoding] {
        &self.senders
    }

    pub fn alphabet_sizes(&self) -> Vec<usize> {
        self.senders.iter().map(|s| s.operations.len()).collect()
    }

    pub fn priors(&self) -> Vec<Vec<f64>> {
        self.senders.iter().map(|s| s.prior.clone()).collect()
    }

    pub fn with_priors(&self, priors: &[Vec<f64>]) -> Result<Self> {
        if priors.len() != self.senders.len() {
            return Err(Error::DimensionMismatch { expected: self.senders.len(), got: priors.len() });
        }
        let senders = self
            .senders
            .iter()
            .zip(priors)
            .map(|(s, p)| SenderEncoding { prior: p.clone(), ..s.clone() })
            .collect();
        Self::new(senders)
    }

    /// Product prior over joint messages, first sender most significant.
    pub fn product_prior(&self) -> Vec<f64> {
        product_prior(&self.priors())
    }

    /// Apply every sender's channel for message tuple `x`, in sender order.
    pub fn encode(&self, initial: &DensityOperator, x: &[usize]) -> Result<DensityOperator> {
        if x.len() != self.senders.len() {
            return Err(Error::DimensionMismatch { expected: self.senders.len(), got: x.len() });
        }
        let mut rho = initial.clone();
        for (s, &xi) in self.senders.iter().zip(x) {
            let op = s.operations.get(xi).ok_or_else(|| {
                Error::InvalidParameter(format!("message {xi} outside alphabet of size {}", s.operations.len()))
            })?;
            rho = apply_npe(op, s.path, &rho)?;
        }
        Ok(rho)
    }

    /// Encoded states for every joint message in flattened order.
    pub fn encoded_states(&self, initial: &DensityOperator) -> Result<Vec<DensityOperator>> {
        let sizes = self.alphabet_sizes();
        let total: usize = sizes.iter().product();
        (0..total)
            .into_par_iter()
            .map(|x| self.encode(initial, &unflatten(&sizes, x)))
            .collect()
    }

    pub fn cq_ensemble(&self, initial: &DensityOperator) -> Result<CqEnsemble> {
        CqEnsemble::new(self.product_prior(), self.encoded_states(initial)?)
    }
}

pub fn product_prior(priors: &[Vec<f64>]) -> Vec<f64> {
    priors.iter().fold(vec![1.0], |acc, p| {
        acc.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect()
    })
}

/// Measure a list of encoded states; each must lie in the POVM's support.
pub fn channel_from_states(inputs: Vec<usize>, states: &[DensityOperator], povm: &Povm) -> Result<TransitionMatrix> {
    let columns = states
        .par_iter()
        .enumerate()
        .map(|(x, rho)| {
            let p = measure(povm, rho)?;
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidPovm(format!("outcomes sum to {s} on encoded state {x}")));
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::new(inputs, povm.len(), columns)
}

pub fn build_mac(initial: &DensityOperator, enc: &EncodingStrategy, povm: &Povm) -> Result<TransitionMatrix> {
    let space = initial.space();
    if povm.space() != space {
        return Err(Error::DimensionMismatch { expected: space.dimension(), got: povm.space().dimension() });
    }
    for s in enc.senders() {
        space.check_path(s.path)?;
    }
    let states = enc.encoded_states(initial)?;
    channel_from_states(enc.alphabet_sizes(), &states, povm)
}
