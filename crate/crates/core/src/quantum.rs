//! One-particle states over `M` spatial modes plus an explicit vacuum.
//!
//! Basis index 0 is the vacuum, index `i` is a single particle on path `i`.
//! NPE channels act on one path through a local Kraus pair embedded into this
//! `(M+1)`-dimensional space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const NORM_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    num_paths: usize,
}

impl ModeSpace {
    pub fn new(num_paths: usize) -> Result<Self> {
        if num_paths == 0 {
            return Err(Error::InvalidParameter("a mode space needs at least one path".into()));
        }
        Ok(Self { num_paths })
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    pub fn dimension(&self) -> usize {
        self.num_paths + 1
    }

    /// Basis vector: `0` is vacuum, `i` is `|e_i>`.
    pub fn basis(&self, index: usize) -> CVector {
        let mut v = CVector::zeros(self.dimension());
        v[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn check_path(&self, path: usize) -> Result<()> {
        if path == 0 || path > self.num_paths {
            return Err(Error::InvalidPath { path, num_paths: self.num_paths });
        }
        Ok(())
    }

    /// Projector onto the one-particle subspace (everything but vacuum).
    pub fn one_particle_projector(&self) -> CMatrix {
        let mut p = CMatrix::identity(self.dimension(), self.dimension());
        p[(0, 0)] = C64::new(0.0, 0.0);
        p
    }
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

pub fn projector(v: &CVector) -> CMatrix {
    outer(v, v)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: ModeSpace,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(space: ModeSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::DimensionMismatch { expected: space.dimension(), got: amplitudes.len() });
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { space, amplitudes })
    }

    /// Real amplitudes on paths `1..=M`, vacuum amplitude zero.
    pub fn from_path_amplitudes(space: ModeSpace, amps: &[f64]) -> Result<Self> {
        if amps.len() != space.num_paths() {
            return Err(Error::DimensionMismatch { expected: space.num_paths(), got: amps.len() });
        }
        let mut v = CVector::zeros(space.dimension());
        for (i, a) in amps.iter().enumerate() {
            v[i + 1] = C64::new(*a, 0.0);
        }
        Self::new(space, v)
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator { space: self.space, matrix: projector(&self.amplitudes) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    space: ModeSpace,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(space: ModeSpace, matrix: CMatrix) -> Result<Self> {
        let d = space.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > NORM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        let min_eig = hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { space, matrix })
    }

    /// Skips validation; callers guarantee a valid state by construction.
    pub(crate) fn from_parts(space: ModeSpace, matrix: CMatrix) -> Self {
        Self { space, matrix }
    }

    pub fn vacuum(space: ModeSpace) -> Self {
        Self { space, matrix: projector(&space.basis(0)) }
    }

    /// Diagonal state: `weights[i]` on basis index `i` (0 = vacuum).
    pub fn diagonal(space: ModeSpace, weights: &[f64]) -> Result<Self> {
        if weights.len() != space.dimension() {
            return Err(Error::DimensionMismatch { expected: space.dimension(), got: weights.len() });
        }
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            weights.len(),
            weights.iter().map(|w| C64::new(*w, 0.0)),
        ));
        Self::new(space, m)
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Von Neumann entropy in bits; eigenvalues below 1e-12 count as zero.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|l| *l > 1e-12)
            .map(|l| -l * l.log2())
            .sum()
    }

    pub fn max_deviation(&self, other: &DensityOperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.space.dimension() || u.ncols() != self.space.dimension() {
            return Err(Error::DimensionMismatch { expected: self.space.dimension(), got: u.nrows() });
        }
        Ok(Self { space: self.space, matrix: u * &self.matrix * u.adjoint() })
    }

    /// Convex mixture of states on a common space.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let space = first.1.space;
        let d = space.dimension();
        let mut m = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if rho.space != space {
                return Err(Error::DimensionMismatch { expected: d, got: rho.space.dimension() });
            }
            m += &rho.matrix * C64::new(*w, 0.0);
        }
        Self::new(space, m)
    }
}

impl From<&PureState> for DensityOperator {
    fn from(s: &PureState) -> Self {
        s.density()
    }
}

impl From<PureState> for DensityOperator {
    fn from(s: PureState) -> Self {
        s.density()
    }
}

/// Extremal NPE channel `(gamma, phi1, phi2)` with mixing weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NpeBranch {
    pub weight: f64,
    pub gamma: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl NpeBranch {
    /// Local Kraus pair on `{absent, occupied}`.
    pub fn kraus(&self) -> [[[C64; 2]; 2]; 2] {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let k1 = [[one, z], [z, C64::from_polar((1.0 - self.gamma).sqrt(), self.phi1)]];
        let k2 = [[z, C64::from_polar(self.gamma.sqrt(), self.phi2)], [z, z]];
        [k1, k2]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NpeOperation {
    branches: Vec<NpeBranch>,
}

impl NpeOperation {
    pub fn new(branches: Vec<NpeBranch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidParameter("NPE operation without branches".into()));
        }
        let mut total = 0.0;
        for b in &branches {
            if !(0.0..=1.0).contains(&b.gamma) || !b.weight.is_finite() || b.weight < 0.0 {
                return Err(Error::InvalidParameter(format!("bad NPE branch {b:?}")));
            }
            if !b.phi1.is_finite() || !b.phi2.is_finite() {
                return Err(Error::InvalidParameter(format!("bad NPE branch {b:?}")));
            }
            total += b.weight;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDistribution(format!("branch weights sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn extremal(gamma: f64, phi1: f64, phi2: f64) -> Result<Self> {
        Self::new(vec![NpeBranch { weight: 1.0, gamma, phi1, phi2 }])
    }

    pub fn identity() -> Self {
        Self { branches: vec![NpeBranch { weight: 1.0, gamma: 0.0, phi1: 0.0, phi2: 0.0 }] }
    }

    pub fn blocking() -> Self {
        Self { branches: vec![NpeBranch { weight: 1.0, gamma: 1.0, phi1: 0.0, phi2: 0.0 }] }
    }

    pub fn phase(phi: f64) -> Self {
        Self { branches: vec![NpeBranch { weight: 1.0, gamma: 0.0, phi1: phi, phi2: 0.0 }] }
    }

    pub fn branches(&self) -> &[NpeBranch] {
        &self.branches
    }

    /// Total weight of fully damping (`gamma = 1`) branches.
    pub fn blocking_mass(&self) -> f64 {
        self.branches.iter().filter(|b| b.gamma == 1.0).map(|b| b.weight).sum()
    }

    /// Kraus operators of every branch embedded into the full space, weight folded in.
    pub fn embedded_kraus(&self, space: ModeSpace, target_path: usize) -> Result<Vec<CMatrix>> {
        space.check_path(target_path)?;
        let d = space.dimension();
        let mut out = Vec::with_capacity(2 * self.branches.len());
        for b in &self.branches {
            if b.weight == 0.0 {
                continue;
            }
            let s = b.weight.sqrt();
            for k in b.kraus() {
                let mut full = CMatrix::zeros(d, d);
                for col in 0..d {
                    if col == target_path {
                        full[(target_path, col)] = k[1][1] * s;
                        full[(0, col)] = k[0][1] * s;
                    } else {
                        // particle elsewhere or absent: local factor sits in "absent"
                        full[(col, col)] = k[0][0] * s;
                    }
                }
                out.push(full);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, target_path: usize, state: &DensityOperator) -> Result<DensityOperator> {
        apply_npe(self, target_path, state)
    }
}

pub fn apply_npe(op: &NpeOperation, target_path: usize, state: &DensityOperator) -> Result<DensityOperator> {
    let space = state.space();
    let tr = state.trace();
    if (tr - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(tr));
    }
    let d = space.dimension();
    let mut out = CMatrix::zeros(d, d);
    for k in op.embedded_kraus(space, target_path)? {
        out += &k * state.matrix() * k.adjoint();
    }
    Ok(DensityOperator::from_parts(space, out))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    space: ModeSpace,
    elements: Vec<CMatrix>,
    labels: Vec<String>,
    support: CMatrix,
}

impl Povm {
    /// POVM complete on the whole space.
    pub fn new(space: ModeSpace, elements: Vec<CMatrix>, labels: Vec<String>) -> Result<Self> {
        let d = space.dimension();
        Self::with_support(space, elements, labels, CMatrix::identity(d, d))
    }

    /// POVM whose elements sum to the projector `support`.
    pub fn with_support(
        space: ModeSpace,
        elements: Vec<CMatrix>,
        labels: Vec<String>,
        support: CMatrix,
    ) -> Result<Self> {
        let d = space.dimension();
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        if labels.len() != elements.len() {
            return Err(Error::InvalidPovm(format!("{} labels for {} elements", labels.len(), elements.len())));
        }
        let mut sum = CMatrix::zeros(d, d);
        for (i, e) in elements.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: e.nrows() });
            }
            if max_abs(&(e - e.adjoint())) > PSD_TOL {
                return Err(Error::InvalidPovm(format!("element {i} not Hermitian")));
            }
            let min_eig = hermitian_eigenvalues(e).into_iter().fold(f64::INFINITY, f64::min);
            if min_eig < -PSD_TOL {
                return Err(Error::InvalidPovm(format!("element {i} has eigenvalue {min_eig:e}")));
            }
            sum += e;
        }
        let dev = max_abs(&(&sum - &support));
        if dev > PSD_TOL {
            return Err(Error::InvalidPovm(format!("elements miss the declared support by {dev:e}")));
        }
        Ok(Self { space, elements, labels, support })
    }

    /// Rank-one projective measurement; vectors must be orthonormal.
    pub fn projective(space: ModeSpace, vectors: &[CVector]) -> Result<Self> {
        let report = orthonormal_check(vectors)?;
        if !report.orthonormal {
            return Err(Error::InvalidPovm(format!("basis not orthonormal (deviation {:e})", report.max_deviation)));
        }
        let elements: Vec<CMatrix> = vectors.iter().map(projector).collect();
        let d = space.dimension();
        let support = elements.iter().fold(CMatrix::zeros(d, d), |acc, e| acc + e);
        let labels = (0..vectors.len()).map(|i| i.to_string()).collect();
        Self::with_support(space, elements, labels, support)
    }

    pub fn space(&self) -> ModeSpace {
        self.space
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn support(&self) -> &CMatrix {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        let d = self.space.dimension();
        max_abs(&(&self.support - CMatrix::identity(d, d))) <= PSD_TOL
    }

    /// `U Pi U^dagger` for every element.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let d = self.space.dimension();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: u.nrows() });
        }
        Ok(Self {
            space: self.space,
            elements: self.elements.iter().map(|e| u * e * u.adjoint()).collect(),
            labels: self.labels.clone(),
            support: u * &self.support * u.adjoint(),
        })
    }
}

pub fn measure(povm: &Povm, state: &DensityOperator) -> Result<Vec<f64>> {
    if povm.space() != state.space() {
        return Err(Error::DimensionMismatch {
            expected: povm.space().dimension(),
            got: state.space().dimension(),
        });
    }
    let rho = state.matrix();
    povm.elements()
        .iter()
        .map(|e| {
            // Tr(E rho) without forming the product
            let p: f64 = e.iter().zip(rho.transpose().iter()).map(|(a, b)| (a * b).re).sum();
            if p < -PSD_TOL {
                Err(Error::InvalidState(format!("negative outcome probability {p:e}")))
            } else {
                Ok(p.clamp(0.0, 1.0))
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthonormalReport {
    pub orthonormal: bool,
    pub max_deviation: f64,
}

pub fn orthonormal_check(vectors: &[CVector]) -> Result<OrthonormalReport> {
    let first = vectors.first().ok_or_else(|| Error::InvalidParameter("empty vector list".into()))?;
    let d = first.len();
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        if a.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: a.len() });
        }
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (a.dotc(b) - C64::new(target, 0.0)).norm();
            worst = worst.max(dev);
        }
    }
    Ok(OrthonormalReport { orthonormal: worst <= PSD_TOL, max_deviation: worst })
}

/// Real vector helper.
pub fn real_vector(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|x| C64::new(*x, 0.0)))
}
