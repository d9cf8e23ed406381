//! Dense complex matrices, density operators and entropies.
//!
//! Everything here works on the tiny Hilbert spaces this crate needs (2, 4, 8
//! and the 32-dimensional dilation), so matrices are plain row-major vectors.
//! Eigenvalues are obtained block by block: structurally decoupled index sets
//! (exact zeros off the block) are diagonalized separately, 1×1 and 2×2 blocks
//! in closed form and anything larger with nalgebra's Hermitian solver.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest Hermiticity defect accepted by the eigenvalue routines.
pub const EIGEN_HERMITIAN_TOL: f64 = 1e-10;
/// Hermiticity and trace tolerance of a [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues below `-PSD_TOL` are rejected.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this contribute nothing to an entropy.
pub const ENTROPY_CLAMP: f64 = 1e-12;
/// Norm tolerance of a [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmatError {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("eigenvalue {0:.3e} is below -{PSD_TOL:e}")]
    NegativeEigenvalue(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("matrix has a non-finite entry")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, QmatError>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(QmatError::Dimension(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QmatError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(QmatError::Dimension("ragged rows".into()));
            }
            data.extend(row.iter().map(|&x| re(x)));
        }
        Self::from_vec(dim, data)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// `|psi><psi|` for an arbitrary (not necessarily normalized) vector.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    /// `u · self · u†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |m[i][j] - conj(m[j][i])|`
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Copies the strict upper triangle onto the lower one (conjugated) and
    /// drops the imaginary part of the diagonal.
    pub fn hermitian_completion(&self) -> Self {
        Self::from_fn(self.dim, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => self[(i, j)],
            std::cmp::Ordering::Equal => re(self[(i, i)].re),
            std::cmp::Ordering::Greater => self[(j, i)].conj(),
        })
    }

    fn to_nalgebra(&self, idx: &[usize]) -> DMatrix<C64> {
        // Hermitian part only; the caller has already bounded the defect.
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| {
            let (a, b) = (idx[i], idx[j]);
            (self[(a, b)] + self[(b, a)].conj()) * 0.5
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dimensions");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference on mismatched dimensions");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Splits `0..dim` into index sets that share no nonzero off-diagonal entry.
fn decoupled_blocks(m: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut block = vec![start];
        label[start] = id;
        let mut cursor = 0;
        while cursor < block.len() {
            let i = block[cursor];
            cursor += 1;
            for j in 0..n {
                if label[j] == usize::MAX && (m[(i, j)] != C64::new(0.0, 0.0) || m[(j, i)] != C64::new(0.0, 0.0)) {
                    label[j] = id;
                    block.push(j);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// Real eigenvalues of a Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if !defect.is_finite() || defect > EIGEN_HERMITIAN_TOL {
        return Err(QmatError::NotHermitian(defect));
    }
    let mut vals = Vec::with_capacity(m.dim());
    for block in decoupled_blocks(m) {
        match block.as_slice() {
            [i] => vals.push(m[(*i, *i)].re),
            [i, j] => {
                let (a, d) = (m[(*i, *i)].re, m[(*j, *j)].re);
                let off = 0.5 * (m[(*i, *j)] + m[(*j, *i)].conj());
                let mean = 0.5 * (a + d);
                let radius = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
                vals.push(mean - radius);
                vals.push(mean + radius);
            }
            idx => vals.extend(m.to_nalgebra(idx).symmetric_eigenvalues().iter().copied()),
        }
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Full spectral decomposition: ascending eigenvalues and the matching
/// eigenvectors as the columns of a unitary matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let defect = m.hermiticity_defect();
    if !defect.is_finite() || defect > EIGEN_HERMITIAN_TOL {
        return Err(QmatError::NotHermitian(defect));
    }
    let n = m.dim();
    let all: Vec<usize> = (0..n).collect();
    let eig = m.to_nalgebra(&all).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, vecs))
}

/// Shannon entropy (bits) of a spectrum, with the clamp rule applied.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in eigenvalues {
        if v < -PSD_TOL || v.is_nan() {
            return Err(QmatError::NegativeEigenvalue(v));
        }
        if v >= ENTROPY_CLAMP {
            s -= v * v.log2();
        }
    }
    Ok(s.max(0.0))
}

/// `H2(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QmatError::Probability(p));
    }
    spectrum_entropy(&[p, 1.0 - p])
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QmatError::NonFinite);
        }
        let defect = mat.hermiticity_defect();
        if defect > DENSITY_TOL {
            return Err(QmatError::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(QmatError::BadTrace(tr.re));
        }
        let lowest = hermitian_eigenvalues(&mat)?[0];
        if lowest < -PSD_TOL {
            return Err(QmatError::NegativeEigenvalue(lowest));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is a density operator by construction (a channel
    /// output or a reduction of a valid state).
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { mat: ComplexMatrix::outer(psi.amps()) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if let Some(&p) = diag.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(QmatError::Probability(p));
        }
        Self::new(ComplexMatrix::from_real_diag(diag))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal()
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(QmatError::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(QmatError::NotNormalized(norm));
        }
        Ok(Self { amps: amps.into_iter().map(|z| z / norm).collect() })
    }

    pub(crate) fn from_amps_unchecked(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = re(1.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, u: &ComplexMatrix) -> Self {
        Self { amps: u.apply(&self.amps) }
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&hermitian_eigenvalues(rho.matrix())?)
}

/// Entropy of any matrix that is a density operator up to rounding.
pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    spectrum_entropy(&hermitian_eigenvalues(m)?)
}

/// Reduces `rho` on the tensor factors listed in `keep` (ascending factor order).
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != rho.dim() {
        return Err(QmatError::Dimension(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            rho.dim()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= dims.len() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(QmatError::Dimension(format!(
            "keep {keep:?} is not a nonempty proper subset of {} factors",
            dims.len()
        )));
    }
    // Split each full index into (kept index, traced index).
    let split: Vec<(usize, usize)> = (0..total)
        .map(|mut idx| {
            let (mut k, mut t, mut kscale, mut tscale) = (0, 0, 1, 1);
            for f in (0..dims.len()).rev() {
                let digit = idx % dims[f];
                idx /= dims[f];
                if kept.contains(&f) {
                    k += digit * kscale;
                    kscale *= dims[f];
                } else {
                    t += digit * tscale;
                    tscale *= dims[f];
                }
            }
            (k, t)
        })
        .collect();
    let out_dim: usize = kept.iter().map(|&f| dims[f]).product();
    let mut out = ComplexMatrix::zeros(out_dim);
    let m = rho.matrix();
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Entropy of entanglement of a two-qubit pure state.
pub fn entanglement_entropy(psi: &PureState) -> Result<f64> {
    if psi.dim() != 4 {
        return Err(QmatError::Dimension(format!("expected a two-qubit state, got dimension {}", psi.dim())));
    }
    let reduced = partial_trace(&psi.projector(), &[2, 2], &[0])?;
    Ok(von_neumann_entropy(&reduced)?.min(1.0))
}
