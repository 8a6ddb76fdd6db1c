//! States and channels: quantum, classical, and classical–quantum.
//!
//! Conventions:
//!
//! * the reference system `R` is always the leading tensor factor, so bipartite
//!   states live on `R ⊗ A` and channel outputs on `R ⊗ B`;
//! * channels are stored as Kraus operator lists; the Choi operator is computed
//!   on demand and cached;
//! * the Choi operator follows the standard convention
//!   `Γ^N = Σ_{i,j} |i⟩⟨j| ⊗ N(|i⟩⟨j|)` (input system leading). See
//!   [`QuantumChannel::choi`] for a note on a variant convention that appears
//!   in parts of the literature.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hermitian::{identity, kron, partial_trace_trailing, CMatrix, CVector, HermitianMatrix};
use crate::Result;

/// Default cap on the dimension of any tensor-power output.
pub const DEFAULT_MEMORY_BUDGET: usize = 4096;

const TRACE_TOL: f64 = 1e-10;
const TP_TOL: f64 = 1e-9;
const ROW_SUM_TOL: f64 = 1e-12;

/// A density matrix: PSD (after clipping) with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(mat: HermitianMatrix) -> Result<Self> {
        let trace = mat.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace {
                trace,
                tolerance: TRACE_TOL,
            });
        }
        // PSD validation with clipping; the clipped spectrum is discarded, the
        // original (noise-level) matrix is kept.
        mat.pseudo_power(1.0)?;
        Ok(DensityMatrix { mat })
    }

    pub fn from_complex(mat: CMatrix) -> Result<Self> {
        DensityMatrix::new(HermitianMatrix::new(mat)?)
    }

    /// `|ψ⟩⟨ψ|` from a (not necessarily normalized) vector.
    pub fn pure(vector: &CVector) -> Result<Self> {
        let norm2: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::Validation("pure state vector is zero".into()));
        }
        let outer = vector * vector.adjoint() / Complex64::new(norm2, 0.0);
        Ok(DensityMatrix {
            mat: HermitianMatrix::from_symmetrized(outer),
        })
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        DensityMatrix {
            mat: HermitianMatrix::from_diagonal(&diag),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: HermitianMatrix::from_diagonal(&vec![1.0 / dim as f64; dim]),
        }
    }

    pub fn from_distribution(probs: &[f64]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL || probs.iter().any(|&p| p < 0.0) {
            return Err(Error::Validation(format!(
                "distribution must be nonnegative and sum to 1, got sum {sum}"
            )));
        }
        Ok(DensityMatrix {
            mat: HermitianMatrix::from_diagonal(probs),
        })
    }

    /// Maximally entangled state `|Φ⟩⟨Φ|` on `R ⊗ A` with `dim R = dim A = d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = CVector::zeros(d * d);
        let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v[i * d + i] = amp;
        }
        DensityMatrix::pure(&v).expect("maximally entangled state is well formed")
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.mat
    }

    pub fn matrix(&self) -> &CMatrix {
        self.mat.matrix()
    }

    /// Diagonal as a probability vector, if the state is diagonal in the
    /// computational basis (within tolerance). Used to route commuting
    /// instances to classical oracles.
    pub fn diagonal_distribution(&self) -> Option<Vec<f64>> {
        let m = self.matrix();
        let off: f64 = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| m[(i, j)].norm())
            .fold(0.0, f64::max);
        if off > 1e-12 {
            return None;
        }
        Some((0..m.nrows()).map(|i| m[(i, i)].re.max(0.0)).collect())
    }

    /// n-fold Kronecker power, subject to the memory budget.
    pub fn tensor_power(&self, n: u32, budget: usize) -> Result<DensityMatrix> {
        let mut dim_out: usize = 1;
        for _ in 0..n {
            dim_out = dim_out.saturating_mul(self.dim());
            if dim_out > budget {
                return Err(Error::Capacity {
                    what: format!("tensor power {}^{n}", self.dim()),
                    requested: dim_out,
                    limit: budget,
                });
            }
        }
        if n == 0 {
            return Err(Error::Domain("tensor power requires n >= 1".into()));
        }
        let mut out = self.matrix().clone();
        for _ in 1..n {
            out = kron(&out, self.matrix());
        }
        Ok(DensityMatrix {
            mat: HermitianMatrix::from_symmetrized(out),
        })
    }
}

/// A completely positive trace-preserving map stored as Kraus operators.
#[derive(Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    /// Set for channels embedded from a classical channel; diagonal inputs are
    /// then mapped through the stochastic matrix directly, so basis-state
    /// outputs copy the row entries without any floating-point arithmetic.
    classical_rows: Option<Vec<Vec<f64>>>,
    choi: OnceLock<ChoiOperator>,
}

impl Clone for QuantumChannel {
    fn clone(&self) -> Self {
        QuantumChannel {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.kraus.clone(),
            classical_rows: self.classical_rows.clone(),
            choi: OnceLock::new(),
        }
    }
}

/// Choi operator on `R ⊗ B` with the input copy `R` leading; PSD with
/// `Tr_B Γ = I_R`.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: HermitianMatrix,
}

impl QuantumChannel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Validation(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        for k in &kraus {
            if k.nrows() != dim_out || k.ncols() != dim_in {
                return Err(Error::Validation(format!(
                    "Kraus operator must be {}x{}, got {}x{}",
                    dim_out,
                    dim_in,
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let mut sum = CMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let dev = (&sum - identity(dim_in))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving {
                deviation: dev,
                tolerance: TP_TOL,
            });
        }
        let ch = QuantumChannel {
            dim_in,
            dim_out,
            kraus,
            classical_rows: None,
            choi: OnceLock::new(),
        };
        // Complete positivity: the Choi operator must be PSD within the clip
        // tolerance. Computing it here also warms the cache.
        ch.choi().matrix.pseudo_power(1.0).map_err(|_| {
            Error::Validation("channel is not completely positive: Choi operator not PSD".into())
        })?;
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        QuantumChannel::new(dim, dim, vec![identity(dim)]).expect("identity channel is CPTP")
    }

    /// Replacer channel `ρ ↦ ω` for every input.
    pub fn replacer(dim_in: usize, omega: &DensityMatrix) -> Self {
        let dec = omega.hermitian().spectral();
        let mut kraus = Vec::new();
        for (c, &lam) in dec.eigenvalues.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let v = dec.eigenvectors.column(c);
            for x in 0..dim_in {
                let mut k = CMatrix::zeros(omega.dim(), dim_in);
                for r in 0..omega.dim() {
                    k[(r, x)] = v[r] * Complex64::new(lam.sqrt(), 0.0);
                }
                kraus.push(k);
            }
        }
        QuantumChannel::new(dim_in, omega.dim(), kraus).expect("replacer channel is CPTP")
    }

    /// Qubit bit flip: `X` with probability `prob`.
    pub fn bit_flip(prob: f64) -> Self {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ONE,
                Complex64::ZERO,
            ],
        );
        QuantumChannel::new(
            2,
            2,
            vec![
                identity(2) * Complex64::new((1.0 - prob).sqrt(), 0.0),
                x * Complex64::new(prob.sqrt(), 0.0),
            ],
        )
        .expect("bit flip is CPTP")
    }

    /// Completely depolarizing channel `ρ ↦ I/d`.
    pub fn depolarizing_to_mixed(dim: usize) -> Self {
        QuantumChannel::replacer(dim, &DensityMatrix::maximally_mixed(dim))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Apply to a state on the input system alone.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::dim_mismatch("apply_channel", rho.dim(), self.dim_in));
        }
        if let Some(rows) = &self.classical_rows {
            if let Some(probs) = rho.diagonal_distribution() {
                let mut out = vec![0.0; self.dim_out];
                for (x, &px) in probs.iter().enumerate() {
                    if px == 0.0 {
                        continue;
                    }
                    for y in 0..self.dim_out {
                        out[y] += if px == 1.0 {
                            rows[x][y]
                        } else {
                            px * rows[x][y]
                        };
                    }
                }
                return Ok(DensityMatrix {
                    mat: HermitianMatrix::from_diagonal(&out),
                });
            }
        }
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityMatrix {
            mat: HermitianMatrix::from_symmetrized(out),
        })
    }

    /// Apply to the trailing `A`-factor of a bipartite state on `R ⊗ A`:
    /// `Σ_k (I_R ⊗ K_k) ρ (I_R ⊗ K_k)†`.
    pub fn apply_with_reference(
        &self,
        rho_ra: &DensityMatrix,
        dim_r: usize,
    ) -> Result<DensityMatrix> {
        if rho_ra.dim() != dim_r * self.dim_in {
            return Err(Error::dim_mismatch(
                "apply_channel on R⊗A",
                rho_ra.dim(),
                dim_r * self.dim_in,
            ));
        }
        let id_r = identity(dim_r);
        let mut out = CMatrix::zeros(dim_r * self.dim_out, dim_r * self.dim_out);
        for k in &self.kraus {
            let lifted = kron(&id_r, k);
            out += &lifted * rho_ra.matrix() * lifted.adjoint();
        }
        Ok(DensityMatrix {
            mat: HermitianMatrix::from_symmetrized(out),
        })
    }

    /// Choi operator `Γ^N = Σ_{i,j} |i⟩⟨j| ⊗ N(|i⟩⟨j|)` (standard convention,
    /// cached).
    ///
    /// Note: a variant convention `Σ_{i,j} |i⟩⟨i| ⊗ N(|i⟩⟨j|)` appears in some
    /// displays in the literature; it does not define a PSD operator, and the
    /// standard form above is the one for which `Tr_B Γ = I_R` and the
    /// geometric-fidelity SDP are stated. This crate uses the standard form
    /// throughout.
    pub fn choi(&self) -> &ChoiOperator {
        self.choi.get_or_init(|| {
            let d_in = self.dim_in;
            let d_out = self.dim_out;
            let mut mat = CMatrix::zeros(d_in * d_out, d_in * d_out);
            for k in &self.kraus {
                // vec(K) with R leading: |i>⊗K|i>
                let mut v = CVector::zeros(d_in * d_out);
                for i in 0..d_in {
                    for b in 0..d_out {
                        v[i * d_out + b] = k[(b, i)];
                    }
                }
                mat += &v * v.adjoint();
            }
            ChoiOperator {
                dim_in: d_in,
                dim_out: d_out,
                matrix: HermitianMatrix::from_symmetrized(mat),
            }
        })
    }

    /// `‖Γ^N − Γ^M‖∞`-style max-entry distance between Choi operators; used by
    /// the trivial-case classifier for channel equality checks.
    pub fn choi_distance(&self, other: &QuantumChannel) -> f64 {
        let a = self.choi().matrix.matrix();
        let b = other.choi().matrix.matrix();
        if a.nrows() != b.nrows() {
            return f64::INFINITY;
        }
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl ChoiOperator {
    /// Verifies `Tr_B Γ = I_R` within tolerance.
    pub fn verify_trace_condition(&self) -> Result<()> {
        let red = partial_trace_trailing(self.matrix.matrix(), self.dim_in, self.dim_out);
        let dev = (&red - identity(self.dim_in))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if dev > TP_TOL {
            return Err(Error::NotTracePreserving {
                deviation: dev,
                tolerance: TP_TOL,
            });
        }
        Ok(())
    }
}

/// Classical channel as a row-stochastic matrix `P(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalChannel {
    pub n_in: usize,
    pub n_out: usize,
    rows: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::NotRowStochastic {
                reason: "no rows".into(),
            });
        }
        let n_out = rows[0].len();
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n_out {
                return Err(Error::NotRowStochastic {
                    reason: format!("row {x} has length {} != {n_out}", row.len()),
                });
            }
            if let Some(&bad) = row.iter().find(|&&p| p < 0.0) {
                return Err(Error::NotRowStochastic {
                    reason: format!("row {x} has negative entry {bad}"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotRowStochastic {
                    reason: format!("row {x} sums to {sum}, expected 1 within {ROW_SUM_TOL}"),
                });
            }
        }
        Ok(ClassicalChannel {
            n_in: rows.len(),
            n_out,
            rows,
        })
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn binary_symmetric(p: f64) -> Self {
        ClassicalChannel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
            .expect("BSC is row stochastic")
    }
}

/// Classical–quantum channel `x ↦ ω_x`.
#[derive(Debug, Clone)]
pub struct CqChannel {
    pub n_in: usize,
    pub dim_out: usize,
    outputs: Vec<DensityMatrix>,
}

impl CqChannel {
    pub fn new(outputs: Vec<DensityMatrix>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::Validation(
                "CQ channel needs at least one output".into(),
            ));
        }
        let dim_out = outputs[0].dim();
        for (x, w) in outputs.iter().enumerate() {
            if w.dim() != dim_out {
                return Err(Error::dim_mismatch(
                    &format!("CQ output {x}"),
                    w.dim(),
                    dim_out,
                ));
            }
        }
        Ok(CqChannel {
            n_in: outputs.len(),
            dim_out,
            outputs,
        })
    }

    pub fn output(&self, x: usize) -> &DensityMatrix {
        &self.outputs[x]
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }

    /// True when all outputs are diagonal in the computational basis; such a
    /// channel is equivalent to a classical channel and classical oracles
    /// apply exactly.
    pub fn as_classical(&self) -> Option<ClassicalChannel> {
        let mut rows = Vec::with_capacity(self.n_in);
        for w in &self.outputs {
            let mut d = w.diagonal_distribution()?;
            let sum: f64 = d.iter().sum();
            for p in d.iter_mut() {
                *p /= sum;
            }
            rows.push(d);
        }
        ClassicalChannel::new(rows).ok()
    }
}

/// Union of the channel representations handled by the bound machinery.
#[derive(Debug, Clone)]
pub enum Channel {
    Quantum(QuantumChannel),
    Classical(ClassicalChannel),
    Cq(CqChannel),
}

impl Channel {
    pub fn dim_in(&self) -> usize {
        match self {
            Channel::Quantum(q) => q.dim_in(),
            Channel::Classical(c) => c.n_in,
            Channel::Cq(c) => c.n_in,
        }
    }

    pub fn dim_out(&self) -> usize {
        match self {
            Channel::Quantum(q) => q.dim_out(),
            Channel::Classical(c) => c.n_out,
            Channel::Cq(c) => c.dim_out,
        }
    }

    /// Quantum embedding of any representation (identity on quantum channels).
    pub fn to_quantum(&self) -> QuantumChannel {
        match self {
            Channel::Quantum(q) => q.clone(),
            Channel::Classical(c) => embed_classical(c),
            Channel::Cq(c) => embed_cq(c),
        }
    }
}

/// Quantum embedding of a classical channel:
/// `N(Z) = Σ_{x,y} P(y|x) ⟨x|Z|x⟩ |y⟩⟨y|`, with Kraus operators
/// `√P(y|x) |y⟩⟨x|`. On computational-basis inputs this reproduces the
/// classical statistics exactly (entries copied, no arithmetic).
pub fn embed_classical(ch: &ClassicalChannel) -> QuantumChannel {
    let mut kraus = Vec::new();
    for x in 0..ch.n_in {
        for y in 0..ch.n_out {
            let p = ch.row(x)[y];
            if p == 0.0 {
                continue;
            }
            let mut k = CMatrix::zeros(ch.n_out, ch.n_in);
            k[(y, x)] = Complex64::new(p.sqrt(), 0.0);
            kraus.push(k);
        }
    }
    let mut q =
        QuantumChannel::new(ch.n_in, ch.n_out, kraus).expect("embedded classical channel is CPTP");
    q.classical_rows = Some(ch.rows().to_vec());
    q
}

/// Quantum embedding of a CQ channel: `N(Z) = Σ_x ⟨x|Z|x⟩ ω_x`.
pub fn embed_cq(ch: &CqChannel) -> QuantumChannel {
    let mut kraus = Vec::new();
    for x in 0..ch.n_in {
        let dec = ch.output(x).hermitian().spectral();
        for (c, &lam) in dec.eigenvalues.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let v = dec.eigenvectors.column(c);
            let mut k = CMatrix::zeros(ch.dim_out, ch.n_in);
            for r in 0..ch.dim_out {
                k[(r, x)] = v[r] * Complex64::new(lam.sqrt(), 0.0);
            }
            kraus.push(k);
        }
    }
    QuantumChannel::new(ch.n_in, ch.dim_out, kraus).expect("embedded CQ channel is CPTP")
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    })
}

/// Random density matrix from a normalized Wishart sample `GG†/Tr[GG†]`.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = random_gaussian_matrix(dim, dim, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix {
        mat: HermitianMatrix::from_symmetrized(w / Complex64::new(tr, 0.0)),
    }
}

/// Random pure state, Haar distributed.
pub fn random_pure_state(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let v = CVector::from_fn(dim, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    DensityMatrix::pure(&v).expect("random pure state is well formed")
}

/// Random channel via isometry compression: a Haar random isometry
/// `V: A → B ⊗ E` (from the QR of a Gaussian matrix) traced over the
/// environment `E`. With `dim_env = dim_in * dim_out` (the default) the Choi
/// operator is generically full rank; `dim_env = 1` produces random unitary
/// (hence Choi-rank-one) channels that exercise singular-support paths.
pub fn random_channel(
    dim_in: usize,
    dim_out: usize,
    dim_env: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> QuantumChannel {
    let dim_env = dim_env.unwrap_or(dim_in * dim_out);
    assert!(
        dim_out * dim_env >= dim_in,
        "isometry needs dim_out * dim_env >= dim_in"
    );
    let g = random_gaussian_matrix(dim_out * dim_env, dim_in, rng);
    let qr = g.qr();
    let q = qr.q();
    // Kraus blocks indexed by the environment basis (environment leading).
    let mut kraus = Vec::with_capacity(dim_env);
    for e in 0..dim_env {
        let mut k = CMatrix::zeros(dim_out, dim_in);
        for b in 0..dim_out {
            for a in 0..dim_in {
                k[(b, a)] = q[(e * dim_out + b, a)];
            }
        }
        kraus.push(k);
    }
    QuantumChannel::new(dim_in, dim_out, kraus).expect("compressed isometry is CPTP")
}

/// Random classical channel with rows drawn uniform on the simplex interior
/// (uniform(0,1) entries, normalized); all entries strictly positive almost
/// surely.
pub fn random_classical(n_in: usize, n_out: usize, rng: &mut ChaCha8Rng) -> ClassicalChannel {
    let rows: Vec<Vec<f64>> = (0..n_in)
        .map(|_| {
            let mut row: Vec<f64> = (0..n_out).map(|_| rng.random::<f64>().max(1e-12)).collect();
            let sum: f64 = row.iter().sum();
            for p in row.iter_mut() {
                *p /= sum;
            }
            row
        })
        .collect();
    ClassicalChannel::new(rows).expect("normalized rows are stochastic")
}

/// Random CQ channel with `n_in` output states of dimension `dim_out`.
/// `purity` in `[0,1]` mixes a Haar-random pure state with the maximally mixed
/// state: `purity * |ψ⟩⟨ψ| + (1-purity) * I/d`.
pub fn random_cq(n_in: usize, dim_out: usize, purity: f64, rng: &mut ChaCha8Rng) -> CqChannel {
    let outputs = (0..n_in)
        .map(|_| {
            let pure = random_pure_state(dim_out, rng);
            let mixed = DensityMatrix::maximally_mixed(dim_out);
            let m = pure
                .hermitian()
                .scale(purity)
                .add(&mixed.hermitian().scale(1.0 - purity));
            DensityMatrix::new(m).expect("convex mixture is a state")
        })
        .collect();
    CqChannel::new(outputs).expect("outputs share a dimension")
}

// ---------------------------------------------------------------------------
// JSON format
// ---------------------------------------------------------------------------

/// Serialized complex matrix: rows of `[re, im]` pairs.
pub type JsonComplexMatrix = Vec<Vec<[f64; 2]>>;

fn to_json_matrix(m: &CMatrix) -> JsonComplexMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn from_json_matrix(rows: &JsonComplexMatrix, what: &str) -> Result<CMatrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Validation(format!("{what}: empty matrix")));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Validation(format!("{what}: ragged matrix rows")));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// On-disk channel/state description:
/// `{"kind": "quantum"|"classical"|"cq"|"state", ...}` with `kraus`,
/// `stochastic`, `outputs`, or `matrix` payloads respectively. Parsers reject
/// invariant violations with the failed invariant named.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<JsonComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stochastic: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<JsonComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<JsonComplexMatrix>,
}

impl ChannelJson {
    pub fn from_channel(ch: &Channel) -> Self {
        match ch {
            Channel::Quantum(q) => ChannelJson {
                kind: "quantum".into(),
                dim_in: Some(q.dim_in()),
                dim_out: Some(q.dim_out()),
                kraus: Some(q.kraus().iter().map(to_json_matrix).collect()),
                stochastic: None,
                outputs: None,
                matrix: None,
            },
            Channel::Classical(c) => ChannelJson {
                kind: "classical".into(),
                dim_in: Some(c.n_in),
                dim_out: Some(c.n_out),
                kraus: None,
                stochastic: Some(c.rows().to_vec()),
                outputs: None,
                matrix: None,
            },
            Channel::Cq(c) => ChannelJson {
                kind: "cq".into(),
                dim_in: Some(c.n_in),
                dim_out: Some(c.dim_out),
                kraus: None,
                stochastic: None,
                outputs: Some(
                    c.outputs()
                        .iter()
                        .map(|w| to_json_matrix(w.matrix()))
                        .collect(),
                ),
                matrix: None,
            },
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        ChannelJson {
            kind: "state".into(),
            dim_in: Some(rho.dim()),
            dim_out: Some(rho.dim()),
            kraus: None,
            stochastic: None,
            outputs: None,
            matrix: Some(to_json_matrix(rho.matrix())),
        }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        match self.kind.as_str() {
            "quantum" => {
                let kraus_json = self.kraus.as_ref().ok_or_else(|| {
                    Error::Validation("quantum channel requires \"kraus\"".into())
                })?;
                let kraus = kraus_json
                    .iter()
                    .map(|m| from_json_matrix(m, "kraus"))
                    .collect::<Result<Vec<_>>>()?;
                let dim_out = self
                    .dim_out
                    .or_else(|| kraus.first().map(|k| k.nrows()))
                    .ok_or_else(|| Error::Validation("missing dim_out".into()))?;
                let dim_in = self
                    .dim_in
                    .or_else(|| kraus.first().map(|k| k.ncols()))
                    .ok_or_else(|| Error::Validation("missing dim_in".into()))?;
                Ok(Channel::Quantum(QuantumChannel::new(
                    dim_in, dim_out, kraus,
                )?))
            }
            "classical" => {
                let rows = self.stochastic.as_ref().ok_or_else(|| {
                    Error::Validation("classical channel requires \"stochastic\"".into())
                })?;
                Ok(Channel::Classical(ClassicalChannel::new(rows.clone())?))
            }
            "cq" => {
                let outputs_json = self
                    .outputs
                    .as_ref()
                    .ok_or_else(|| Error::Validation("cq channel requires \"outputs\"".into()))?;
                let outputs = outputs_json
                    .iter()
                    .map(|m| from_json_matrix(m, "cq output").and_then(DensityMatrix::from_complex))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Channel::Cq(CqChannel::new(outputs)?))
            }
            other => Err(Error::Validation(format!(
                "unknown channel kind {other:?}; expected quantum, classical, cq, or state"
            ))),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        if self.kind != "state" {
            return Err(Error::Validation(format!(
                "expected kind \"state\", got {:?}",
                self.kind
            )));
        }
        let m = self
            .matrix
            .as_ref()
            .ok_or_else(|| Error::Validation("state requires \"matrix\"".into()))?;
        DensityMatrix::from_complex(from_json_matrix(m, "state matrix")?)
    }
}
