//! Named single-particle protocols.
//!
//! Constructors return the ingredients (state, encodings, measurement) so
//! callers can reuse them for Holevo quantities as well as channels.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{build_mac, channel_from_states, EncodingStrategy, SenderEncoding, TransitionMatrix};
use crate::error::{Error, Result};
use crate::info::CqEnsemble;
use crate::quantum::{
    projector, real_vector, CMatrix, CVector, DensityOperator, ModeSpace, NpeOperation, Povm, PureState, C64,
};

/// Prior `(1/2, 1/2) x (15/17, 2/17)` for the assisted two-sender channel.
pub fn reference_prior_assisted() -> Vec<Vec<f64>> {
    vec![vec![0.5, 0.5], vec![15.0 / 17.0, 2.0 / 17.0]]
}

/// The same prior expressed in the labeling of [`transition_balanced`].
pub fn reference_prior_display() -> Vec<Vec<f64>> {
    vec![vec![2.0 / 17.0, 15.0 / 17.0], vec![0.5, 0.5]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub initial: PureState,
    pub encoding: EncodingStrategy,
    pub povm: Povm,
}

impl Protocol {
    pub fn channel(&self) -> Result<TransitionMatrix> {
        build_mac(&self.initial.density(), &self.encoding, &self.povm)
    }

    pub fn ensemble(&self) -> Result<CqEnsemble> {
        self.encoding.cq_ensemble(&self.initial.density())
    }
}

/// `{|vac>, (|e1> + |e2>)/sqrt2, (|e1> - |e2>)/sqrt2}` on two paths.
pub fn symmetric_basis_povm() -> Povm {
    let s = ModeSpace::new(2).expect("two paths");
    let v = [
        s.basis(0),
        real_vector(&[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        real_vector(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
    ];
    Povm::projective(s, &v).expect("orthonormal basis")
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn two_path_state(theta: f64) -> Result<PureState> {
    PureState::from_path_amplitudes(ModeSpace::new(2)?, &[theta.cos(), theta.sin()])
}

/// Block / identity / phase(alpha) on path 1 of `cos(theta)|e1> + sin(theta)|e2>`,
/// prior `(1-q, q/2, q/2)`; path 2 is the untouched reference.
pub fn one_sender_assisted(q: f64, theta: f64, alpha: f64) -> Result<Protocol> {
    check_unit("q", q)?;
    let enc = EncodingStrategy::new(vec![SenderEncoding {
        path: 1,
        operations: vec![NpeOperation::blocking(), NpeOperation::identity(), NpeOperation::phase(alpha)],
        prior: vec![1.0 - q, q / 2.0, q / 2.0],
    }])?;
    Ok(Protocol { initial: two_path_state(theta)?, encoding: enc, povm: symmetric_basis_povm() })
}

/// Sender 1 blocks or transmits path 1, sender 2 applies identity or phase(alpha) on path 2.
pub fn two_sender_binary(theta: f64, alpha: f64, priors: &[Vec<f64>]) -> Result<Protocol> {
    let enc = EncodingStrategy::new(vec![
        SenderEncoding { path: 1, operations: vec![NpeOperation::blocking(), NpeOperation::identity()], prior: priors[0].clone() },
        SenderEncoding { path: 2, operations: vec![NpeOperation::identity(), NpeOperation::phase(alpha)], prior: priors[1].clone() },
    ])?;
    Ok(Protocol { initial: two_path_state(theta)?, encoding: enc, povm: symmetric_basis_povm() })
}

/// Binary on-off sender (prior `(1-q, q)`) on the `sin(theta)` path and a
/// ternary block/identity/phase(pi) sender (prior `(1-q', q'/2, q'/2)`) on the
/// `cos(theta)` path.
pub fn two_sender_ternary(q: f64, q_prime: f64, theta: f64) -> Result<Protocol> {
    check_unit("q", q)?;
    check_unit("q'", q_prime)?;
    let enc = EncodingStrategy::new(vec![
        SenderEncoding { path: 2, operations: vec![NpeOperation::blocking(), NpeOperation::identity()], prior: vec![1.0 - q, q] },
        SenderEncoding {
            path: 1,
            operations: vec![NpeOperation::blocking(), NpeOperation::identity(), NpeOperation::phase(PI)],
            prior: vec![1.0 - q_prime, q_prime / 2.0, q_prime / 2.0],
        },
    ])?;
    Ok(Protocol { initial: two_path_state(theta)?, encoding: enc, povm: symmetric_basis_povm() })
}

/// Amplitudes `2^{-i/2}` on paths `1..N` and `2^{-N/2}` on the reference path `N+1`.
pub fn assisted_initial_amplitudes(n: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (1..=n).map(|i| 2f64.powf(-(i as f64) / 2.0)).collect();
    a.push(2f64.powf(-(n as f64) / 2.0));
    a
}

/// Decoding vectors `|b_0> .. |b_N>` over the `N+2` dimensional space.
pub fn assisted_decoding_vectors(n: usize) -> Vec<CVector> {
    let d = n + 2;
    let tail = |from: usize| {
        // sum_{i=from}^{N} 2^{-(i-from+2)/2} e_i + 2^{-(N-from+2)/2} e_{N+1}
        let mut v = vec![0.0; d];
        for (i, slot) in v.iter_mut().enumerate().take(n + 1).skip(from) {
            *slot = 2f64.powf(-((i - from + 2) as f64) / 2.0);
        }
        v[n + 1] = 2f64.powf(-((n + 1 - from + 1) as f64) / 2.0);
        v
    };
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut v = if k <= 1 { tail(2) } else { tail(k + 1) };
        let head = if k <= 1 { 1 } else { k };
        v[head] = if k == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
        out.push(real_vector(&v));
    }
    out
}

/// Coherence-assisted protocol: `{identity, phase(pi)}` on paths `1..N`, uniform priors.
pub fn n_sender_assisted_protocol(n: usize) -> Result<Protocol> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sender".into()));
    }
    let space = ModeSpace::new(n + 1)?;
    let initial = PureState::from_path_amplitudes(space, &assisted_initial_amplitudes(n))?;
    let senders = (1..=n)
        .map(|i| SenderEncoding::uniform(i, vec![NpeOperation::identity(), NpeOperation::phase(PI)]))
        .collect();
    let povm = Povm::projective(space, &assisted_decoding_vectors(n))?;
    Ok(Protocol { initial, encoding: EncodingStrategy::new(senders)?, povm })
}

/// Ideal two-sender channel in the labeling used by the experiment:
/// rows `00` and `01` give `(1/2, 1/4, 1/4)`, `10 -> 1`, `11 -> 2`.
pub fn transition_balanced() -> TransitionMatrix {
    TransitionMatrix::new(
        vec![2, 2],
        3,
        vec![vec![0.5, 0.25, 0.25], vec![0.5, 0.25, 0.25], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
    )
    .expect("stochastic")
}

/// Maps the `N = 2` assisted channel onto the experiment's labeling: display
/// `x1 = 1 - x2`, display `x2 = x1`, outputs `(0, 1, 2) -> (1, 2, 0)`.
pub fn assisted_to_display(tm: &TransitionMatrix) -> Result<TransitionMatrix> {
    if tm.inputs() != [2, 2] || tm.outputs() != 3 {
        return Err(Error::InvalidParameter("expects a 2x2 -> 3 channel".into()));
    }
    tm.relabel(&[1, 0], &[vec![1, 0], vec![0, 1]], &[1, 2, 0])
}

/// Result of rewriting the assisted protocol without the reference path.
#[derive(Clone, Debug)]
pub struct Equivalence {
    /// Rotation on the `N+2` dimensional assisted space.
    pub rotation: CMatrix,
    /// Rotated encoded states with coherences to the last path removed.
    pub transformed_states: Vec<DensityOperator>,
    pub transformed_povm: Povm,
    /// Incoherent blocks of basis indices used for dephasing.
    pub blocks: Vec<Vec<usize>>,
    /// Phase senders on paths `1..N-1`, a transmit/block sender on path `N`.
    pub unassisted: Protocol,
}

/// Rotates `(e_N +- e_{N+1})/sqrt2` onto `e_N` and `e_{N+1}`, dephases the
/// last path and reads it as vacuum, which turns sender `N`'s phase flip into
/// blocking.
pub fn assisted_to_unassisted(n: usize) -> Result<Equivalence> {
    if n < 2 {
        return Err(Error::InvalidParameter("equivalence needs N >= 2".into()));
    }
    let assisted = n_sender_assisted_protocol(n)?;
    let d = n + 2;
    let (a, b) = (n, n + 1);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut u = CMatrix::identity(d, d);
    u[(a, a)] = h;
    u[(a, b)] = h;
    u[(b, a)] = -h;
    u[(b, b)] = h;

    let blocks = vec![(0..=n).collect::<Vec<_>>(), vec![n + 1]];
    let states = assisted.encoding.encoded_states(&assisted.initial.density())?;
    let space = assisted.initial.space();
    let transformed_states = states
        .iter()
        .map(|rho| {
            let r = rho.conjugate(&u)?;
            Ok(DensityOperator::from_parts(space, dephase(r.matrix(), &blocks)))
        })
        .collect::<Result<Vec<_>>>()?;
    let transformed_povm = assisted.povm.conjugate(&u)?;

    // Unassisted space: old path N+1 becomes vacuum.
    let small = ModeSpace::new(n)?;
    let mut amps: Vec<f64> = (1..n).map(|i| 2f64.powf(-(i as f64) / 2.0)).collect();
    amps.push(2f64.powf(-((n - 1) as f64) / 2.0));
    let initial = PureState::from_path_amplitudes(small, &amps)?;
    let mut senders: Vec<SenderEncoding> = (1..n)
        .map(|i| SenderEncoding::uniform(i, vec![NpeOperation::identity(), NpeOperation::phase(PI)]))
        .collect();
    senders.push(SenderEncoding::uniform(n, vec![NpeOperation::identity(), NpeOperation::blocking()]));
    let rotated = assisted_decoding_vectors(n).into_iter().map(|v| &u * v);
    let mut vectors: Vec<CVector> = rotated
        .take(n)
        .map(|v| CVector::from_iterator(n + 1, (0..=n).map(|i| if i == 0 { v[n + 1] } else { v[i] })))
        .collect();
    vectors.push(small.basis(0));
    let povm = Povm::projective(small, &vectors)?;
    let unassisted = Protocol { initial, encoding: EncodingStrategy::new(senders)?, povm };
    Ok(Equivalence { rotation: u, transformed_states, transformed_povm, blocks, unassisted })
}

impl Equivalence {
    pub fn transformed_channel(&self) -> Result<TransitionMatrix> {
        let n = self.unassisted.encoding.senders().len();
        channel_from_states(vec![2; n], &self.transformed_states, &self.transformed_povm)
    }
}

/// Zero every matrix element linking different blocks.
pub fn dephase(m: &CMatrix, blocks: &[Vec<usize>]) -> CMatrix {
    let mut label = vec![usize::MAX; m.nrows()];
    for (b, idx) in blocks.iter().enumerate() {
        for &i in idx {
            label[i] = b;
        }
    }
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| if label[i] == label[j] { m[(i, j)] } else { C64::new(0.0, 0.0) })
}

/// Projector helper for decoding vectors.
pub fn projectors(vectors: &[CVector]) -> Vec<CMatrix> {
    vectors.iter().map(projector).collect()
}
