//! Dense complex Hermitian matrix utilities.
//!
//! Everything downstream (states, channels, divergences, the SDP) is built on
//! the operations here: validated Hermitian wrappers, eigendecompositions,
//! fractional powers on the support, the matrix geometric mean, the trace
//! norm, and thresholded positive parts with explicit tie handling.
//!
//! Numerical conventions (used consistently across the crate):
//!
//! * eigenvalues in `[-1e-10 * trace, 0)` of a PSD candidate are clipped to 0;
//!   anything more negative is rejected as non-PSD;
//! * `pd_floor = 1e-12 * trace` for the geometric mean;
//! * `tie_tol = 1e-10` (absolute) for eigenvalue ties in thresholded positive
//!   parts, so Neyman–Pearson tests can randomize on the boundary eigenspace;
//! * support cutoff for pseudo-powers and support projections is
//!   `1e-10 * lambda_max`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative clip tolerance for PSD validation.
pub const PSD_CLIP_REL: f64 = 1e-10;
/// Relative positive-definiteness floor for the geometric mean.
pub const PD_FLOOR_REL: f64 = 1e-12;
/// Absolute tie tolerance for thresholded positive parts.
pub const TIE_TOL: f64 = 1e-10;
/// Relative support cutoff: eigenvalues `<= SUPPORT_CUTOFF_REL * lambda_max`
/// are treated as zero everywhere.
pub const SUPPORT_CUTOFF_REL: f64 = 1e-10;
/// Relative Hermiticity tolerance (against the max-magnitude entry).
pub const HERMITICITY_REL: f64 = 1e-12;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product with the left factor leading:
/// `(A ⊗ B)[(i*p + k), (j*q + l)] = A[i,j] * B[k,l]` for `B` of size `p × q`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Trace out the trailing tensor factor of a `(d_lead * d_trail)`-dimensional
/// operator, returning the `d_lead × d_lead` reduction.
pub fn partial_trace_trailing(m: &CMatrix, d_lead: usize, d_trail: usize) -> CMatrix {
    debug_assert_eq!(m.nrows(), d_lead * d_trail);
    let mut out = CMatrix::zeros(d_lead, d_lead);
    for i in 0..d_lead {
        for j in 0..d_lead {
            let mut acc = Complex64::ZERO;
            for k in 0..d_trail {
                acc += m[(i * d_trail + k, j * d_trail + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Trace out the leading tensor factor, returning the `d_trail × d_trail`
/// reduction.
pub fn partial_trace_leading(m: &CMatrix, d_lead: usize, d_trail: usize) -> CMatrix {
    debug_assert_eq!(m.nrows(), d_lead * d_trail);
    let mut out = CMatrix::zeros(d_trail, d_trail);
    for k in 0..d_trail {
        for l in 0..d_trail {
            let mut acc = Complex64::ZERO;
            for i in 0..d_lead {
                acc += m[(i * d_trail + k, i * d_trail + l)];
            }
            out[(k, l)] = acc;
        }
    }
    out
}

/// A validated Hermitian matrix.
///
/// Construction checks `A[i][j] == conj(A[j][i])` within `1e-12` of the
/// max-magnitude entry, then stores the exactly symmetrized `(A + A†)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: CMatrix,
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues sorted descending,
/// eigenvectors are the matching unitary columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `U diag(f(λ)) U†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let dim = self.eigenvectors.nrows();
        let mut scaled = self.eigenvectors.clone();
        for (c, &lam) in self.eigenvalues.iter().enumerate() {
            let v = Complex64::new(f(lam), 0.0);
            for r in 0..dim {
                scaled[(r, c)] *= v;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

impl HermitianMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::Validation(format!(
                "Hermitian matrix must be square with dim >= 1, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let max_abs = mat.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let tol = HERMITICITY_REL * max_abs;
        let mut asym = 0.0_f64;
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                asym = asym.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if asym > tol {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                tolerance: tol,
            });
        }
        Ok(Self::from_symmetrized(mat))
    }

    /// Symmetrize `(A + A†)/2` without a Hermiticity check. Used internally for
    /// results of operations that are Hermitian by construction.
    pub fn from_symmetrized(mat: CMatrix) -> Self {
        let sym = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianMatrix { mat: sym }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut mat = CMatrix::zeros(dim, dim);
        for (i, &d) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(d, 0.0);
        }
        HermitianMatrix { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            mat: CMatrix::zeros(dim, dim),
        }
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

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix {
            mat: &self.mat * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            mat: &self.mat - &other.mat,
        }
    }

    /// `A + c I`.
    pub fn add_scaled_identity(&self, c: f64) -> HermitianMatrix {
        let mut mat = self.mat.clone();
        for i in 0..mat.nrows() {
            mat[(i, i)] += Complex64::new(c, 0.0);
        }
        HermitianMatrix { mat }
    }

    /// Eigendecomposition with eigenvalues sorted descending.
    pub fn spectral(&self) -> SpectralDecomposition {
        let eig = self.mat.clone().symmetric_eigen();
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = CMatrix::zeros(dim, dim);
        for (c, &i) in order.iter().enumerate() {
            eigenvectors.set_column(c, &eig.eigenvectors.column(i));
        }
        SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        }
    }

    /// Trace norm `‖A‖₁ = Σ_i |λ_i(A)|`.
    pub fn trace_norm(&self) -> f64 {
        self.spectral().eigenvalues.iter().map(|l| l.abs()).sum()
    }

    /// PSD-validated eigenvalues, clipped at `-1e-10 * trace`: values in the
    /// clip band become 0, anything lower is an error.
    fn psd_eigenvalues(&self) -> Result<SpectralDecomposition> {
        let mut dec = self.spectral();
        let scale = self
            .trace()
            .abs()
            .max(dec.eigenvalues.first().copied().unwrap_or(0.0).abs());
        let clip = PSD_CLIP_REL * scale;
        for lam in dec.eigenvalues.iter_mut() {
            if *lam < -clip {
                return Err(Error::NotPositiveSemidefinite {
                    eigenvalue: *lam,
                    tolerance: clip,
                });
            }
            if *lam < 0.0 {
                *lam = 0.0;
            }
        }
        Ok(dec)
    }

    /// Fractional (pseudo-)power `A^s` of a PSD matrix, taken on the support:
    /// strictly positive eigenvalues map to `λ^s`, zero eigenvalues map to 0
    /// for every `s`. This matches the `ε → 0⁺` regularized limits used by the
    /// divergence definitions.
    pub fn pseudo_power(&self, s: f64) -> Result<HermitianMatrix> {
        self.pseudo_power_impl(s, false)
    }

    /// Like [`pseudo_power`](Self::pseudo_power) but errors out when a negative
    /// power is requested on a singular matrix instead of restricting to the
    /// support.
    pub fn pseudo_power_strict(&self, s: f64) -> Result<HermitianMatrix> {
        self.pseudo_power_impl(s, true)
    }

    fn pseudo_power_impl(&self, s: f64, strict: bool) -> Result<HermitianMatrix> {
        let dec = self.psd_eigenvalues()?;
        let lam_max = dec.eigenvalues.first().copied().unwrap_or(0.0);
        let cutoff = SUPPORT_CUTOFF_REL * lam_max;
        if strict && s < 0.0 && dec.eigenvalues.iter().any(|&l| l <= cutoff) {
            return Err(Error::SingularSupport);
        }
        let powed = dec.apply(|l| if l > cutoff { l.powf(s) } else { 0.0 });
        Ok(HermitianMatrix::from_symmetrized(powed))
    }

    /// Support projector and rank, with eigenvalues `<= 1e-10 * λ_max` treated
    /// as zero.
    pub fn support_projector(&self) -> (CMatrix, usize) {
        let dec = self.spectral();
        let lam_max = dec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = SUPPORT_CUTOFF_REL * lam_max;
        let rank = dec.eigenvalues.iter().filter(|&&l| l > cutoff).count();
        let proj = dec.apply(|l| if l > cutoff { 1.0 } else { 0.0 });
        (proj, rank)
    }

    /// Orthonormal bases of the support and kernel, plus the positive
    /// eigenvalues (descending) on the support.
    pub fn support_split(&self) -> SupportSplit {
        let dec = self.spectral();
        let lam_max = dec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = SUPPORT_CUTOFF_REL * lam_max;
        let dim = self.dim();
        let rank = dec.eigenvalues.iter().filter(|&&l| l > cutoff).count();
        let support = dec.eigenvectors.columns(0, rank).into_owned();
        let kernel = dec.eigenvectors.columns(rank, dim - rank).into_owned();
        SupportSplit {
            support,
            kernel,
            eigenvalues: dec.eigenvalues[..rank].to_vec(),
        }
    }
}

/// Support/kernel factorization of a Hermitian PSD matrix.
pub struct SupportSplit {
    /// `d × r` orthonormal columns spanning the support.
    pub support: CMatrix,
    /// `d × (d - r)` orthonormal columns spanning the kernel.
    pub kernel: CMatrix,
    /// Eigenvalues on the support, descending.
    pub eigenvalues: Vec<f64>,
}

impl SupportSplit {
    pub fn rank(&self) -> usize {
        self.support.ncols()
    }

    /// Compress an operator to the support block: `V† A V`.
    pub fn restrict(&self, a: &CMatrix) -> CMatrix {
        self.support.adjoint() * a * &self.support
    }
}

/// Thresholded positive part of a Hermitian matrix: the projector onto the
/// eigenspace with eigenvalue `> t`, together with the boundary eigenspace
/// with eigenvalue in `[t - tie_tol, t + tie_tol]` (for randomized tests).
pub struct ThresholdSplit {
    pub above: CMatrix,
    pub boundary: CMatrix,
    pub boundary_dim: usize,
}

pub fn positive_part_threshold(a: &HermitianMatrix, t: f64) -> ThresholdSplit {
    let dec = a.spectral();
    let dim = a.dim();
    let mut above = CMatrix::zeros(dim, dim);
    let mut boundary = CMatrix::zeros(dim, dim);
    let mut boundary_dim = 0;
    for (c, &lam) in dec.eigenvalues.iter().enumerate() {
        let v = dec.eigenvectors.column(c);
        let outer = v * v.adjoint();
        if (lam - t).abs() <= TIE_TOL {
            boundary += &outer;
            boundary_dim += 1;
        } else if lam > t {
            above += &outer;
        }
    }
    ThresholdSplit {
        above,
        boundary,
        boundary_dim,
    }
}

/// Matrix geometric mean `A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`
/// of positive definite `A` and `B`.
///
/// Singular inputs are rejected; callers evaluating the regularized geometric
/// fidelity must shift by `εI` themselves (see the divergence module).
pub fn geometric_mean(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::dim_mismatch("geometric_mean", a.dim(), b.dim()));
    }
    let floor_a = PD_FLOOR_REL * a.trace();
    let floor_b = PD_FLOOR_REL * b.trace();
    let dec_a = a.spectral();
    let min_a = dec_a.eigenvalues.last().copied().unwrap_or(0.0);
    if min_a <= floor_a {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: min_a,
            floor: floor_a,
        });
    }
    let min_b = b.spectral().eigenvalues.last().copied().unwrap_or(0.0);
    if min_b <= floor_b {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: min_b,
            floor: floor_b,
        });
    }
    let a_half = dec_a.apply(|l| l.sqrt());
    let a_neg_half = dec_a.apply(|l| 1.0 / l.sqrt());
    let inner = HermitianMatrix::from_symmetrized(&a_neg_half * b.matrix() * &a_neg_half);
    let inner_sqrt = inner.pseudo_power(0.5)?;
    Ok(HermitianMatrix::from_symmetrized(
        &a_half * inner_sqrt.matrix() * &a_half,
    ))
}
