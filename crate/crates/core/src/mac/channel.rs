use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SCHEMA;

const ENTRY_TOL: f64 = 1e-12;
const COLUMN_TOL: f64 = 1e-10;

/// Classical MAC `p(y | x_1 ... x_N)`.
///
/// Joint inputs are flattened with `x_1` most significant. Storage is one
/// contiguous column of `outputs` probabilities per joint input.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    inputs: Vec<usize>,
    outputs: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    inputs: Vec<usize>,
    outputs: usize,
    p: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    /// `columns[x_flat][y]`; entries within 1e-12 of `[0, 1]` are clamped.
    pub fn new(inputs: Vec<usize>, outputs: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() || inputs.contains(&0) || outputs == 0 {
            return Err(Error::InvalidParameter(format!("alphabets {inputs:?} -> {outputs}")));
        }
        let total: usize = inputs.iter().product();
        if columns.len() != total {
            return Err(Error::DimensionMismatch { expected: total, got: columns.len() });
        }
        let mut probs = Vec::with_capacity(total * outputs);
        for (x, col) in columns.iter().enumerate() {
            if col.len() != outputs {
                return Err(Error::DimensionMismatch { expected: outputs, got: col.len() });
            }
            let mut sum = 0.0;
            for &p in col {
                if !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&p) {
                    return Err(Error::NotStochastic(format!("entry {p} in column {x}")));
                }
                let p = p.clamp(0.0, 1.0);
                sum += p;
                probs.push(p);
            }
            if (sum - 1.0).abs() > COLUMN_TOL {
                return Err(Error::NotStochastic(format!("column {x} sums to {sum}")));
            }
        }
        Ok(Self { inputs, outputs, probs })
    }

    pub fn from_fn(inputs: Vec<usize>, outputs: usize, mut f: impl FnMut(&[usize], usize) -> f64) -> Result<Self> {
        let total: usize = inputs.iter().product();
        let mut columns = Vec::with_capacity(total);
        for x in 0..total {
            let tuple = unflatten(&inputs, x);
            columns.push((0..outputs).map(|y| f(&tuple, y)).collect());
        }
        Self::new(inputs, outputs, columns)
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn num_senders(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_joint_inputs(&self) -> usize {
        self.probs.len() / self.outputs
    }

    pub fn flat_index(&self, x: &[usize]) -> usize {
        flatten(&self.inputs, x)
    }

    pub fn input_tuple(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.inputs, flat)
    }

    pub fn column(&self, flat: usize) -> &[f64] {
        &self.probs[flat * self.outputs..(flat + 1) * self.outputs]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks(self.outputs)
    }

    pub fn p(&self, x: &[usize], y: usize) -> f64 {
        self.column(self.flat_index(x))[y]
    }

    /// Same channel seen as one sender with the product alphabet.
    pub fn flattened(&self) -> Self {
        Self { inputs: vec![self.num_joint_inputs()], outputs: self.outputs, probs: self.probs.clone() }
    }

    /// Post-compose with a stochastic map `k[y][y']` (rows sum to 1).
    pub fn post_process(&self, k: &[Vec<f64>]) -> Result<Self> {
        if k.len() != self.outputs {
            return Err(Error::DimensionMismatch { expected: self.outputs, got: k.len() });
        }
        let out = k[0].len();
        for row in k {
            let s: f64 = row.iter().sum();
            if row.len() != out || (s - 1.0).abs() > COLUMN_TOL || row.iter().any(|v| *v < 0.0) {
                return Err(Error::NotStochastic("post-processing map".into()));
            }
        }
        let columns = self
            .columns()
            .map(|col| (0..out).map(|z| col.iter().zip(k).map(|(p, row)| p * row[z]).sum()).collect())
            .collect();
        Self::new(self.inputs.clone(), out, columns)
    }

    /// Pre-compose with per-sender stochastic encoders `maps[i][x_i][j_i]`.
    pub fn pre_process(&self, maps: &[Vec<Vec<f64>>]) -> Result<Self> {
        if maps.len() != self.inputs.len() {
            return Err(Error::DimensionMismatch { expected: self.inputs.len(), got: maps.len() });
        }
        for (m, &size) in maps.iter().zip(&self.inputs) {
            for row in m {
                let s: f64 = row.iter().sum();
                if row.len() != size || (s - 1.0).abs() > COLUMN_TOL || row.iter().any(|v| *v < 0.0) {
                    return Err(Error::NotStochastic("pre-processing map".into()));
                }
            }
        }
        let new_inputs: Vec<usize> = maps.iter().map(|m| m.len()).collect();
        let total: usize = new_inputs.iter().product();
        let columns = (0..total)
            .map(|x| {
                let t = unflatten(&new_inputs, x);
                let mut col = vec![0.0; self.outputs];
                for j in 0..self.num_joint_inputs() {
                    let jt = self.input_tuple(j);
                    let w: f64 = t.iter().zip(&jt).zip(maps).map(|((xi, ji), m)| m[*xi][*ji]).product();
                    if w != 0.0 {
                        for (c, p) in col.iter_mut().zip(self.column(j)) {
                            *c += w * p;
                        }
                    }
                }
                col
            })
            .collect();
        Self::new(new_inputs, self.outputs, columns)
    }

    /// Drop sender `sender` by fixing its input to `value`.
    pub fn fix_sender(&self, sender: usize, value: usize) -> Result<Self> {
        if sender >= self.inputs.len() || value >= self.inputs[sender] || self.inputs.len() < 2 {
            return Err(Error::InvalidParameter(format!("cannot fix sender {sender} to {value}")));
        }
        let mut inputs = self.inputs.clone();
        inputs.remove(sender);
        let columns = (0..inputs.iter().product())
            .map(|x| {
                let mut t = unflatten(&inputs, x);
                t.insert(sender, value);
                self.column(self.flat_index(&t)).to_vec()
            })
            .collect();
        Self::new(inputs, self.outputs, columns)
    }

    /// Rename senders, inputs and outputs.
    ///
    /// Output sender `j` is input sender `sender_order[j]`; `input_maps[j][a]`
    /// is the old symbol shown as new symbol `a`; `output_map[y]` is the new
    /// index of old output `y`.
    pub fn relabel(&self, sender_order: &[usize], input_maps: &[Vec<usize>], output_map: &[usize]) -> Result<Self> {
        let n = self.inputs.len();
        if sender_order.len() != n || input_maps.len() != n || output_map.len() != self.outputs {
            return Err(Error::InvalidParameter("relabeling has wrong shape".into()));
        }
        let inputs: Vec<usize> = sender_order.iter().map(|&s| self.inputs[s]).collect();
        let columns = (0..self.num_joint_inputs())
            .map(|x| {
                let new_t = unflatten(&inputs, x);
                let mut old_t = vec![0; n];
                for (j, &s) in sender_order.iter().enumerate() {
                    old_t[s] = input_maps[j][new_t[j]];
                }
                let old = self.column(self.flat_index(&old_t));
                let mut col = vec![0.0; self.outputs];
                for (y, &p) in old.iter().enumerate() {
                    col[output_map[y]] += p;
                }
                col
            })
            .collect();
        Self::new(inputs, self.outputs, columns)
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.inputs != other.inputs || self.outputs != other.outputs {
            return f64::INFINITY;
        }
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `p[y][x_flat]` layout.
    pub fn to_json(&self) -> String {
        let p = (0..self.outputs)
            .map(|y| self.columns().map(|c| c[y]).collect())
            .collect();
        let wire = Wire { schema: Some(SCHEMA.to_string()), inputs: self.inputs.clone(), outputs: self.outputs, p };
        serde_json::to_string(&wire).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(s)?;
        if wire.p.len() != wire.outputs {
            return Err(Error::DimensionMismatch { expected: wire.outputs, got: wire.p.len() });
        }
        let total: usize = wire.inputs.iter().product();
        if let Some(row) = wire.p.iter().find(|r| r.len() != total) {
            return Err(Error::DimensionMismatch { expected: total, got: row.len() });
        }
        let columns = (0..total).map(|x| wire.p.iter().map(|row| row[x]).collect()).collect();
        Self::new(wire.inputs, wire.outputs, columns)
    }
}

pub(crate) fn flatten(alphabets: &[usize], x: &[usize]) -> usize {
    debug_assert_eq!(alphabets.len(), x.len());
    x.iter().zip(alphabets).fold(0, |acc, (xi, m)| acc * m + xi)
}

pub(crate) fn unflatten(alphabets: &[usize], mut flat: usize) -> Vec<usize> {
    let mut t = vec![0; alphabets.len()];
    for i in (0..alphabets.len()).rev() {
        t[i] = flat % alphabets[i];
        flat /= alphabets[i];
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TransitionMatrix {
        TransitionMatrix::new(
            vec![2, 2],
            3,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.25, 0.25, 0.5],
                vec![0.0, 1.0, 0.0],
                vec![0.1, 0.2, 0.7],
            ],
        )
        .unwrap()
    }

    #[test]
    fn indexing_is_first_sender_major() {
        let t = sample();
        assert_eq!(t.flat_index(&[1, 0]), 2);
        assert_eq!(t.input_tuple(3), vec![1, 1]);
        assert_eq!(t.p(&[0, 1], 2), 0.5);
    }

    #[test]
    fn rejects_bad_columns() {
        assert!(TransitionMatrix::new(vec![1], 2, vec![vec![0.5, 0.6]]).is_err());
        assert!(TransitionMatrix::new(vec![1], 2, vec![vec![1.1, -0.1]]).is_err());
        assert!(TransitionMatrix::new(vec![2], 2, vec![vec![1.0, 0.0]]).is_err());
        let t = TransitionMatrix::new(vec![1], 2, vec![vec![1.0 + 5e-13, -5e-13]]).unwrap();
        assert_eq!(t.column(0), &[1.0, 0.0]);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let t = TransitionMatrix::new(vec![1, 2], 2, vec![vec![0.1, 0.9], vec![1.0 / 3.0, 2.0 / 3.0]]).unwrap();
        let s = t.to_json();
        assert!(s.contains("\"inputs\":[1,2]"));
        let back = TransitionMatrix::from_json(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn json_is_y_major() {
        let s = sample().to_json();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["p"][1][2], 1.0);
        assert_eq!(v["schema"], "spmac/1");
    }

    #[test]
    fn fix_sender_selects_subchannel() {
        let t = sample().fix_sender(1, 1).unwrap();
        assert_eq!(t.inputs(), &[2]);
        assert_eq!(t.column(1), &[0.1, 0.2, 0.7]);
    }

    #[test]
    fn relabel_swaps_senders() {
        let t = sample();
        let r = t.relabel(&[1, 0], &[vec![0, 1], vec![0, 1]], &[0, 1, 2]).unwrap();
        assert_eq!(r.p(&[1, 0], 2), t.p(&[0, 1], 2));
        let back = r.relabel(&[1, 0], &[vec![0, 1], vec![0, 1]], &[0, 1, 2]).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn post_process_merges_outputs() {
        let k = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]];
        let t = sample().post_process(&k).unwrap();
        assert_eq!(t.outputs(), 2);
        assert!((t.p(&[0, 1], 1) - 0.75).abs() < 1e-15);
    }
}
