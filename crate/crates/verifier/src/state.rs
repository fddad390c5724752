//! Density matrices on tensor products, channels in Stinespring form, and
//! the entropic quantities built from them. All entropies are in nats.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use ecdim::scalarfun::eta_nats;

use crate::{Result, VerifyError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this are treated as zero in entropies.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Hermiticity, trace and positivity tolerance for states.
pub const STATE_TOL: f64 = 1e-12;
/// Isometry tolerance `‖V†V − I‖_max`.
pub const ISOMETRY_TOL: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(M + M†)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or(VerifyError::Eigen)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `‖M‖₁`, the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let svd = SVD::try_new(m.clone(), false, false, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(VerifyError::Eigen)?;
    Ok(svd.singular_values.iter().sum())
}

/// `‖M‖₁` for Hermitian `M`, via eigenvalues.
pub fn hermitian_trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(&hermitize(m))?.iter().map(|v| v.abs()).sum())
}

/// Row-major index bookkeeping for a set of tensor factors.
struct Layout {
    /// `full[a * n_rest + t]`: full index of kept index `a` and rest index `t`.
    full: Vec<usize>,
    n_kept: usize,
    n_rest: usize,
}

impl Layout {
    fn new(dims: &[usize], kept: &[usize]) -> Result<Self> {
        let k = dims.len();
        let mut is_kept = vec![false; k];
        for (i, &f) in kept.iter().enumerate() {
            if f >= k || is_kept[f] || (i > 0 && kept[i - 1] > f) {
                return Err(VerifyError::Dimension(format!(
                    "factor list {kept:?} must be strictly increasing indices below {k}"
                )));
            }
            is_kept[f] = true;
        }
        let mut strides = vec![1usize; k];
        for f in (0..k.saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * dims[f + 1];
        }
        let kept_dims: Vec<usize> = kept.iter().map(|&f| dims[f]).collect();
        let rest: Vec<usize> = (0..k).filter(|&f| !is_kept[f]).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&f| dims[f]).collect();
        let (n_kept, n_rest) = (product(&kept_dims), product(&rest_dims));
        let offsets = |factors: &[usize], fdims: &[usize], n: usize| -> Vec<usize> {
            (0..n)
                .map(|mut idx| {
                    let mut off = 0;
                    for (&f, &d) in factors.iter().zip(fdims).rev() {
                        off += (idx % d) * strides[f];
                        idx /= d;
                    }
                    off
                })
                .collect()
        };
        let ko = offsets(kept, &kept_dims, n_kept);
        let ro = offsets(&rest, &rest_dims, n_rest);
        let mut full = Vec::with_capacity(n_kept * n_rest);
        for a in &ko {
            for t in &ro {
                full.push(a + t);
            }
        }
        Ok(Layout { full, n_kept, n_rest })
    }

    fn at(&self, a: usize, t: usize) -> usize {
        self.full[a * self.n_rest + t]
    }
}

/// Partial trace of an arbitrary operator on `dims`, keeping the factors
/// listed in increasing order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if m.nrows() != product(dims) || !m.is_square() {
        return Err(VerifyError::Dimension(format!(
            "{}x{} operator on factors {dims:?}",
            m.nrows(),
            m.ncols()
        )));
    }
    let lay = Layout::new(dims, keep)?;
    Ok(CMatrix::from_fn(lay.n_kept, lay.n_kept, |a, b| {
        (0..lay.n_rest).map(|t| m[(lay.at(a, t), lay.at(b, t))]).sum()
    }))
}

/// `op ⊗ I`, with `op` acting on the listed factors (increasing order).
pub fn embed_operator(op: &CMatrix, dims: &[usize], targets: &[usize]) -> Result<CMatrix> {
    let lay = Layout::new(dims, targets)?;
    if op.nrows() != lay.n_kept || !op.is_square() {
        return Err(VerifyError::Dimension(format!(
            "operator of size {} on factors {targets:?} of {dims:?}",
            op.nrows()
        )));
    }
    let n = product(dims);
    let mut out = CMatrix::zeros(n, n);
    for t in 0..lay.n_rest {
        for a in 0..lay.n_kept {
            for b in 0..lay.n_kept {
                out[(lay.at(a, t), lay.at(b, t))] = op[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two operators.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// A state on `H_{d_0} ⊗ … ⊗ H_{d_{k-1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(mat, dims)?;
        let tr = trace(&rho.mat);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(VerifyError::InvalidState(format!("trace {tr}")));
        }
        let min = hermitian_eigenvalues(&rho.mat)?.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(VerifyError::InvalidState(format!("eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Checks dimensions and Hermiticity only; the matrix is symmetrized.
    pub(crate) fn from_matrix_unchecked(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !mat.is_square() || mat.nrows() != product(&dims) || dims.contains(&0) {
            return Err(VerifyError::Dimension(format!(
                "{}x{} matrix for factors {dims:?}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let skew = max_abs(&(&mat - mat.adjoint()));
        if skew > STATE_TOL * mat.nrows().max(1) as f64 {
            return Err(VerifyError::InvalidState(format!("not Hermitian ({skew:e})")));
        }
        Ok(DensityMatrix {
            mat: hermitize(&mat),
            dims,
        })
    }

    pub fn pure(psi: &CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(VerifyError::InvalidState("zero vector".into()));
        }
        let psi = psi.unscale(norm);
        Self::from_matrix_unchecked(&psi * psi.adjoint(), dims)
    }

    /// `|k⟩⟨k|` on a single factor of dimension `d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(VerifyError::Dimension(format!("basis vector {k} in dimension {d}")));
        }
        let mut m = CMatrix::zeros(d, d);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self::from_matrix_unchecked(m, vec![d])
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = product(&dims);
        Self::from_matrix_unchecked(CMatrix::identity(n, n).unscale(n as f64), dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            mat: kron(&self.mat, &other.mat),
            dims,
        }
    }

    /// `p ρ + (1 − p) σ`.
    pub fn mix(&self, p: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dims != other.dims {
            return Err(VerifyError::Dimension(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(VerifyError::InvalidState(format!("mixing weight {p}")));
        }
        Ok(DensityMatrix {
            mat: self.mat.scale(p) + other.mat.scale(1.0 - p),
            dims: self.dims.clone(),
        })
    }

    /// The marginal on the listed factors (increasing order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mat = partial_trace_matrix(&self.mat, &self.dims, keep)?;
        Ok(DensityMatrix {
            mat: hermitize(&mat),
            dims: keep.iter().map(|&f| self.dims[f]).collect(),
        })
    }

    /// `Re Tr(H ρ)`.
    pub fn expectation(&self, h: &CMatrix) -> Result<f64> {
        if h.nrows() != self.dim() || !h.is_square() {
            return Err(VerifyError::Dimension(format!("observable of size {}", h.nrows())));
        }
        Ok((h * &self.mat).trace().re)
    }

    /// `Σ_k K_k ρ K_k†` with square Kraus operators acting on `targets`.
    pub fn apply_local(&self, kraus: &[CMatrix], targets: &[usize]) -> Result<DensityMatrix> {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            let big = embed_operator(k, &self.dims, targets)?;
            out += &big * &self.mat * big.adjoint();
        }
        Ok(DensityMatrix {
            mat: hermitize(&out),
            dims: self.dims.clone(),
        })
    }

    /// `U ρ U†` for a unitary on `targets`.
    pub fn conjugate_local(&self, u: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        self.apply_local(std::slice::from_ref(u), targets)
    }

    /// `Π(ρ) = P ρ P + Tr((I − P) ρ) τ` on a single-factor state.
    pub fn pinch(&self, projector: &CMatrix, tau: &DensityMatrix) -> Result<DensityMatrix> {
        if tau.dim() != self.dim() || projector.nrows() != self.dim() {
            return Err(VerifyError::Dimension("pinching operands".into()));
        }
        let kept = projector * &self.mat * projector;
        let lost = 1.0 - trace(&kept).re;
        Ok(DensityMatrix {
            mat: hermitize(&(kept + tau.mat.scale(lost))),
            dims: self.dims.clone(),
        })
    }
}

/// `H(ρ) = Σ η(λ_i)`, eigenvalues below [`EIGEN_FLOOR`] dropped.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(&rho.mat)?
        .into_iter()
        .filter(|&l| l >= EIGEN_FLOOR)
        .map(eta_nats)
        .sum())
}

/// Entropy of the marginal on `factors`; the empty set has entropy 0.
pub fn marginal_entropy(rho: &DensityMatrix, factors: &[usize]) -> Result<f64> {
    if factors.is_empty() {
        return Ok(0.0);
    }
    if factors.len() == rho.dims.len() {
        return von_neumann_entropy(rho);
    }
    von_neumann_entropy(&rho.partial_trace(factors)?)
}

fn union(parts: &[&[usize]]) -> Result<Vec<usize>> {
    let mut all: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    all.sort_unstable();
    let before = all.len();
    all.dedup();
    if all.len() != before {
        return Err(VerifyError::Dimension("subsystems overlap".into()));
    }
    Ok(all)
}

/// `I(A:B) = H(A) + H(B) − H(AB)`.
pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    let ab = union(&[a, b])?;
    Ok(marginal_entropy(rho, &union(&[a])?)? + marginal_entropy(rho, &union(&[b])?)? - marginal_entropy(rho, &ab)?)
}

/// `I(A:B|C) = H(AC) + H(BC) − H(ABC) − H(C)`.
pub fn qcmi(rho: &DensityMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    Ok(
        marginal_entropy(rho, &union(&[a, c])?)? + marginal_entropy(rho, &union(&[b, c])?)?
            - marginal_entropy(rho, &union(&[a, b, c])?)?
            - marginal_entropy(rho, &union(&[c])?)?,
    )
}

/// `H(A|B) = H(AB) − H(B)`.
pub fn conditional_entropy(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(marginal_entropy(rho, &union(&[a, b])?)? - marginal_entropy(rho, &union(&[b])?)?)
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims != sigma.dims {
        return Err(VerifyError::Dimension(format!("{:?} vs {:?}", rho.dims, sigma.dims)));
    }
    Ok(0.5 * hermitian_trace_norm(&(&rho.mat - &sigma.mat))?)
}

/// A finite ensemble `{p_i, ρ_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.len() != states.len() || states.is_empty() {
            return Err(VerifyError::InvalidState("ensemble sizes".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > STATE_TOL {
            return Err(VerifyError::InvalidState(format!("probabilities {probs:?}")));
        }
        if states.iter().any(|s| s.dims != states[0].dims) {
            return Err(VerifyError::Dimension("ensemble states differ in shape".into()));
        }
        Ok(Ensemble { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn average(&self) -> DensityMatrix {
        let mut mat = CMatrix::zeros(self.states[0].dim(), self.states[0].dim());
        for (p, s) in self.probs.iter().zip(&self.states) {
            mat += s.mat.scale(*p);
        }
        DensityMatrix {
            mat,
            dims: self.states[0].dims.clone(),
        }
    }

    /// Applies `f` to every member state.
    pub fn map<F>(&self, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&DensityMatrix) -> Result<DensityMatrix>,
    {
        let states = self.states.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.probs.clone(), states)
    }

    /// `Σ p_i ρ_i ⊗ |i⟩⟨i|`, flattening the member factors into one.
    pub fn cq_state(&self) -> DensityMatrix {
        let d = self.states[0].dim();
        let k = self.states.len();
        let mut mat = CMatrix::zeros(d * k, d * k);
        for (i, (p, s)) in self.probs.iter().zip(&self.states).enumerate() {
            let mut reg = CMatrix::zeros(k, k);
            reg[(i, i)] = Complex64::new(*p, 0.0);
            mat += kron(&s.mat, &reg);
        }
        DensityMatrix { mat, dims: vec![d, k] }
    }
}

/// `χ = H(ρ̄) − Σ p_i H(ρ_i)`.
pub fn holevo_quantity(ens: &Ensemble) -> Result<f64> {
    let mut chi = von_neumann_entropy(&ens.average())?;
    for (p, s) in ens.probs.iter().zip(&ens.states) {
        if *p > 0.0 {
            chi -= p * von_neumann_entropy(s)?;
        }
    }
    Ok(chi)
}

/// A channel `A → B` given by an isometry `V: H_A → H_B ⊗ H_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRep {
    d_in: usize,
    d_out: usize,
    d_env: usize,
    v: CMatrix,
}

impl ChannelRep {
    pub fn new(v: CMatrix, d_in: usize, d_out: usize, d_env: usize) -> Result<Self> {
        if v.nrows() != d_out * d_env || v.ncols() != d_in {
            return Err(VerifyError::Dimension(format!(
                "isometry {}x{} for {d_in} -> {d_out}x{d_env}",
                v.nrows(),
                v.ncols()
            )));
        }
        let defect = max_abs(&(v.adjoint() * &v - CMatrix::identity(d_in, d_in)));
        if defect > ISOMETRY_TOL {
            return Err(VerifyError::InvalidChannel(format!(
                "V†V deviates from I by {defect:e}"
            )));
        }
        Ok(ChannelRep { d_in, d_out, d_env, v })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.d_in, self.d_out, self.d_env)
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.v
    }

    /// `K_e = (I_B ⊗ ⟨e|) V`.
    pub fn kraus(&self) -> Vec<CMatrix> {
        (0..self.d_env)
            .map(|e| CMatrix::from_fn(self.d_out, self.d_in, |b, a| self.v[(b * self.d_env + e, a)]))
            .collect()
    }

    /// `Φ(ρ) = Tr_E V ρ V†` for a single-factor input.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in {
            return Err(VerifyError::Dimension(format!("input of dimension {}", rho.dim())));
        }
        let joint = &self.v * &rho.mat * self.v.adjoint();
        let out = partial_trace_matrix(&joint, &[self.d_out, self.d_env], &[0])?;
        Ok(DensityMatrix {
            mat: hermitize(&out),
            dims: vec![self.d_out],
        })
    }
}
