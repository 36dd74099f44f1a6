//! MACs generated by a single classical particle.
//!
//! Outputs of the canonical channel: `0` means no particle arrived, `k >= 1`
//! means it arrived through path `k`.

use super::{check_distribution, unflatten, TransitionMatrix};
use crate::error::{Error, Result};

/// Binary-input canonical MAC for path weights `p_1..p_N`.
pub fn canonical_classical_mac(weights: &[f64]) -> Result<TransitionMatrix> {
    check_distribution(weights, "path weights")?;
    let n = weights.len();
    TransitionMatrix::from_fn(vec![2; n], n + 1, |j, y| {
        if y == 0 {
            j.iter().zip(weights).filter(|(b, _)| **b == 0).map(|(_, p)| p).sum()
        } else if j[y - 1] == 1 {
            weights[y - 1]
        } else {
            0.0
        }
    })
}

/// Classical source, per-sender transmit/block encoders and a decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalMacSpec {
    /// Probability the particle is sent down path `i`.
    pub weights: Vec<f64>,
    /// `encoders[i][x_i] = [q_i(0|x_i), q_i(e_i|x_i)]`.
    pub encoders: Vec<Vec<[f64; 2]>>,
    /// `decoder[m][y]` for `m = 0` (vacuum) and `m = i` (particle on path `i`).
    pub decoder: Vec<Vec<f64>>,
}

impl ClassicalMacSpec {
    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        check_distribution(&self.weights, "path weights")?;
        if self.encoders.len() != n || self.decoder.len() != n + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} encoders and {} decoder rows for {n} paths",
                self.encoders.len(),
                self.decoder.len()
            )));
        }
        for (i, e) in self.encoders.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidParameter(format!("encoder {i} has no inputs")));
            }
            for row in e {
                check_distribution(row, &format!("encoder {i}")).map_err(|e| Error::NotStochastic(e.to_string()))?;
            }
        }
        let k = self.decoder[0].len();
        for row in &self.decoder {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: row.len() });
            }
            check_distribution(row, "decoder").map_err(|e| Error::NotStochastic(e.to_string()))?;
        }
        Ok(())
    }

    /// The canonical MAC itself as a spec: identity encoders and decoder.
    pub fn canonical(weights: &[f64]) -> Self {
        let n = weights.len();
        let decoder = (0..=n).map(|m| (0..=n).map(|y| if y == m { 1.0 } else { 0.0 }).collect()).collect();
        Self { weights: weights.to_vec(), encoders: vec![vec![[1.0, 0.0], [0.0, 1.0]]; n], decoder }
    }
}

pub fn classical_mac_from_spec(spec: &ClassicalMacSpec) -> Result<TransitionMatrix> {
    spec.validate()?;
    let inputs: Vec<usize> = spec.encoders.iter().map(|e| e.len()).collect();
    let outputs = spec.decoder[0].len();
    let total: usize = inputs.iter().product();
    let columns = (0..total)
        .map(|x| {
            let t = unflatten(&inputs, x);
            (0..outputs)
                .map(|y| {
                    spec.weights
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            let q = spec.encoders[i][t[i]];
                            p * (spec.decoder[0][y] * q[0] + spec.decoder[i + 1][y] * q[1])
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    TransitionMatrix::new(inputs, outputs, columns)
}
