//! Dense primal-dual interior-point solver for small Hermitian SDPs, and the
//! geometric channel fidelity program built on it.
//!
//! The solver handles programs of the form
//!
//! ```text
//!   maximize    c · x
//!   subject to  S_b(x) = F0_b + Σ_i x_i F_b,i  ⪰ 0   for every block b,
//! ```
//!
//! with complex Hermitian blocks, using Nesterov–Todd scaling and an
//! adaptive-centering predictor step. Primal feasibility is maintained
//! exactly (the slacks are recomputed from `x`); the reported residual is the
//! dual one, `‖A(Z) + c‖∞`, alongside the duality gap `⟨S, Z⟩`.
//!
//! The geometric channel fidelity is the program
//!
//! ```text
//!   √F̂(N, M) = max { λ : λ I_R ⪯ Tr_B[W],  [[Γ^N, W], [W, Γ^M]] ⪰ 0 },
//! ```
//!
//! over Hermitian `W` and `λ ≥ 0`. Singular Choi operators are handled by a
//! decreasing-ε shift with extrapolation, mirroring the regularized infimum
//! in the definition of the geometric fidelity.

use num_complex::Complex64;

use crate::channels::QuantumChannel;
use crate::error::Error;
use crate::hermitian::{identity, partial_trace_trailing, CMatrix, HermitianMatrix};
use crate::Result;

/// Hard cap on the Choi dimension accepted by the fidelity program.
pub const DEFAULT_CHOI_CAP: usize = 16;

/// One PSD block `F0 + Σ_i x_i F_i ⪰ 0` with sparse variable coefficients.
pub struct SdpBlock {
    pub dim: usize,
    pub f0: CMatrix,
    /// `(variable index, coefficient matrix)`; omitted variables are zero.
    pub coeffs: Vec<(usize, CMatrix)>,
}

pub struct SdpProblem {
    /// Objective vector of `maximize c · x`.
    pub c: Vec<f64>,
    pub blocks: Vec<SdpBlock>,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Vec<f64>,
    /// `c · x` at the returned point.
    pub objective: f64,
    /// Duality gap `⟨S, Z⟩` at the returned point.
    pub gap: f64,
    /// `‖A(Z) + c‖∞` (dual feasibility residual).
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn herm_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    // ⟨A, B⟩ = Tr[A B] is real for Hermitian A, B
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn herm_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    HermitianMatrix::from_symmetrized(m.clone())
        .spectral()
        .apply(f)
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    HermitianMatrix::from_symmetrized(m.clone())
        .spectral()
        .eigenvalues
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Largest `α ∈ (0, 1]` with `S + α ΔS ≻ 0`, given `S ≻ 0`.
fn max_step(s: &CMatrix, ds: &CMatrix) -> f64 {
    let s_inv_half = herm_fn(s, |l| 1.0 / l.max(1e-300).sqrt());
    let t = &s_inv_half * ds * &s_inv_half;
    let lam_min = min_eigenvalue(&t);
    if lam_min >= 0.0 {
        1.0
    } else {
        (1.0 / -lam_min).min(1.0)
    }
}

struct BlockState {
    s: CMatrix,
    z: CMatrix,
}

impl SdpProblem {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    fn slack(&self, block: &SdpBlock, x: &[f64]) -> CMatrix {
        let mut s = block.f0.clone();
        for (i, f) in &block.coeffs {
            s += f * Complex64::new(x[*i], 0.0);
        }
        s
    }

    /// Solve from a strictly feasible `x0`. `tol_gap` and `tol_dual` are the
    /// absolute targets on the duality gap and dual residual.
    pub fn solve(
        &self,
        x0: &[f64],
        tol_gap: f64,
        tol_dual: f64,
        max_iters: usize,
    ) -> Result<SdpSolution> {
        let n_vars = self.num_vars();
        let mut x = x0.to_vec();
        let mut states: Vec<BlockState> = Vec::with_capacity(self.blocks.len());
        let mut nu = 0.0;
        for block in &self.blocks {
            let s = self.slack(block, &x);
            if min_eigenvalue(&s) <= 0.0 {
                return Err(Error::Domain(
                    "SDP starting point is not strictly feasible".into(),
                ));
            }
            nu += block.dim as f64;
            states.push(BlockState {
                s,
                z: identity(block.dim),
            });
        }

        let mut result = SdpSolution {
            x: x.clone(),
            objective: dot(&self.c, &x),
            gap: f64::INFINITY,
            dual_residual: f64::INFINITY,
            iterations: 0,
            converged: false,
        };

        for iter in 0..max_iters {
            // residuals
            let gap: f64 = states.iter().map(|st| herm_inner(&st.s, &st.z)).sum();
            let mut a_z = vec![0.0; n_vars];
            for (block, st) in self.blocks.iter().zip(&states) {
                for (i, f) in &block.coeffs {
                    a_z[*i] += herm_inner(f, &st.z);
                }
            }
            let dual_res = a_z
                .iter()
                .zip(&self.c)
                .map(|(az, c)| (az + c).abs())
                .fold(0.0_f64, f64::max);
            result = SdpSolution {
                x: x.clone(),
                objective: dot(&self.c, &x),
                gap,
                dual_residual: dual_res,
                iterations: iter,
                converged: gap.abs() <= tol_gap && dual_res <= tol_dual,
            };
            if result.converged {
                return Ok(result);
            }

            // Nesterov–Todd scalings per block
            let mut w_invs: Vec<CMatrix> = Vec::with_capacity(self.blocks.len());
            let mut s_invs: Vec<CMatrix> = Vec::with_capacity(self.blocks.len());
            for st in &states {
                let s_half = herm_fn(&st.s, |l| l.max(1e-300).sqrt());
                let s_inv_half = herm_fn(&st.s, |l| 1.0 / l.max(1e-300).sqrt());
                let inner = &s_half * &st.z * &s_half;
                let inner_sqrt = herm_fn(&inner, |l| l.max(1e-300).sqrt());
                w_invs.push(&s_inv_half * inner_sqrt * &s_inv_half);
                s_invs.push(herm_fn(&st.s, |l| 1.0 / l.max(1e-300)));
            }

            // Schur complement M_ij = Σ_b ⟨F_i, W⁻¹ F_j W⁻¹⟩
            let mut m = nalgebra::DMatrix::<f64>::zeros(n_vars, n_vars);
            for (b, block) in self.blocks.iter().enumerate() {
                let w_inv = &w_invs[b];
                for (j, fj) in &block.coeffs {
                    let g = w_inv * fj * w_inv;
                    for (i, fi) in &block.coeffs {
                        if *i <= *j {
                            m[(*i, *j)] += herm_inner(fi, &g);
                        }
                    }
                }
            }
            for i in 0..n_vars {
                for j in 0..i {
                    m[(i, j)] = m[(j, i)];
                }
            }
            let chol = match nalgebra::Cholesky::new(m.clone()) {
                Some(c) => c,
                None => {
                    // jitter fallback for near-singular Schur complements
                    let mut mj = m;
                    let scale = (0..n_vars).map(|i| mj[(i, i)]).fold(0.0_f64, f64::max);
                    for i in 0..n_vars {
                        mj[(i, i)] += 1e-12 * scale.max(1e-300);
                    }
                    nalgebra::Cholesky::new(mj).ok_or_else(|| Error::NumericalLimit {
                        what: "SDP Schur complement is numerically singular".into(),
                        values: vec![],
                    })?
                }
            };

            let a_of = |mats: &[CMatrix]| -> Vec<f64> {
                let mut out = vec![0.0; n_vars];
                for (block, mat) in self.blocks.iter().zip(mats) {
                    for (i, f) in &block.coeffs {
                        out[*i] += herm_inner(f, mat);
                    }
                }
                out
            };
            let mu = gap / nu;

            // affine predictor (σ = 0) to pick the centering weight
            let rhs_aff = nalgebra::DVector::from_vec(self.c.clone());
            let dx_aff = chol.solve(&rhs_aff);
            let sigma = {
                let mut alpha: f64 = 1.0;
                for (b, block) in self.blocks.iter().enumerate() {
                    let ds = delta_s(block, dx_aff.as_slice());
                    let dz = {
                        let w_inv = &w_invs[b];
                        let lin = w_inv * &ds * w_inv;
                        -&states[b].z - lin
                    };
                    alpha = alpha.min(0.99 * max_step(&states[b].s, &ds));
                    alpha = alpha.min(0.99 * max_step(&states[b].z, &dz));
                }
                let mut gap_aff = 0.0;
                for (b, block) in self.blocks.iter().enumerate() {
                    let ds = delta_s(block, dx_aff.as_slice());
                    let w_inv = &w_invs[b];
                    let dz = -&states[b].z - w_inv * &ds * w_inv;
                    let s_new = &states[b].s + &ds * Complex64::new(alpha, 0.0);
                    let z_new = &states[b].z + &dz * Complex64::new(alpha, 0.0);
                    gap_aff += herm_inner(&s_new, &z_new);
                }
                ((gap_aff / gap).max(0.0).powi(3)).clamp(1e-4, 0.9)
            };

            // combined corrector step
            let s_inv_vec = a_of(&s_invs);
            let rhs: Vec<f64> = (0..n_vars)
                .map(|i| sigma * mu * s_inv_vec[i] + self.c[i])
                .collect();
            let dx = chol.solve(&nalgebra::DVector::from_vec(rhs));

            let mut alpha_p: f64 = 1.0;
            let mut alpha_d: f64 = 1.0;
            let mut dss = Vec::with_capacity(self.blocks.len());
            let mut dzs = Vec::with_capacity(self.blocks.len());
            for (b, block) in self.blocks.iter().enumerate() {
                let ds = delta_s(block, dx.as_slice());
                let w_inv = &w_invs[b];
                let r = &s_invs[b] * Complex64::new(sigma * mu, 0.0) - &states[b].z;
                let dz = r - w_inv * &ds * w_inv;
                alpha_p = alpha_p.min(0.98 * max_step(&states[b].s, &ds));
                alpha_d = alpha_d.min(0.98 * max_step(&states[b].z, &dz));
                dss.push(ds);
                dzs.push(dz);
            }
            for i in 0..n_vars {
                x[i] += alpha_p * dx[i];
            }
            for (b, block) in self.blocks.iter().enumerate() {
                let _ = &dss[b];
                states[b].s = self.slack(block, &x);
                states[b].z += &dzs[b] * Complex64::new(alpha_d, 0.0);
            }
        }
        Ok(result)
    }
}

fn delta_s(block: &SdpBlock, dx: &[f64]) -> CMatrix {
    let mut ds = CMatrix::zeros(block.dim, block.dim);
    for (i, f) in &block.coeffs {
        ds += f * Complex64::new(dx[*i], 0.0);
    }
    ds
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Geometric channel fidelity program
// ---------------------------------------------------------------------------

/// Hermitian basis of `D × D` matrices: diagonal units, then
/// `e_ij + e_ji` and `i(e_ij − e_ji)` for `i < j`. `D²` elements.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = Complex64::ONE;
        basis.push(m);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut re = CMatrix::zeros(d, d);
            re[(i, j)] = Complex64::ONE;
            re[(j, i)] = Complex64::ONE;
            basis.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(i, j)] = Complex64::new(0.0, 1.0);
            im[(j, i)] = Complex64::new(0.0, -1.0);
            basis.push(im);
        }
    }
    basis
}

/// Assemble the fidelity program for (possibly shifted) Choi operators.
/// Variables: `x = (λ, w_1, …, w_{D²})` in the Hermitian basis above.
fn fidelity_program(
    gamma_n: &CMatrix,
    gamma_m: &CMatrix,
    dim_in: usize,
    dim_out: usize,
) -> SdpProblem {
    let d = dim_in * dim_out;
    let basis = hermitian_basis(d);
    let n_vars = 1 + basis.len();
    let mut c = vec![0.0; n_vars];
    c[0] = 1.0;

    // block 1: Tr_B[W] − λ I_R ⪰ 0
    let mut b1_coeffs: Vec<(usize, CMatrix)> = vec![(0, -identity(dim_in))];
    for (k, h) in basis.iter().enumerate() {
        let tr_b = partial_trace_trailing(h, dim_in, dim_out);
        if tr_b.iter().any(|z| z.norm() > 0.0) {
            b1_coeffs.push((1 + k, tr_b));
        }
    }

    // block 2: [[Γ^N, W], [W, Γ^M]] ⪰ 0
    let mut f0_2 = CMatrix::zeros(2 * d, 2 * d);
    f0_2.view_mut((0, 0), (d, d)).copy_from(gamma_n);
    f0_2.view_mut((d, d), (d, d)).copy_from(gamma_m);
    let mut b2_coeffs: Vec<(usize, CMatrix)> = Vec::with_capacity(basis.len());
    for (k, h) in basis.iter().enumerate() {
        let mut f = CMatrix::zeros(2 * d, 2 * d);
        f.view_mut((0, d), (d, d)).copy_from(h);
        f.view_mut((d, 0), (d, d)).copy_from(&h.adjoint());
        b2_coeffs.push((1 + k, f));
    }

    // block 3: λ ≥ 0
    let b3 = SdpBlock {
        dim: 1,
        f0: CMatrix::zeros(1, 1),
        coeffs: vec![(0, identity(1))],
    };

    SdpProblem {
        c,
        blocks: vec![
            SdpBlock {
                dim: dim_in,
                f0: CMatrix::zeros(dim_in, dim_in),
                coeffs: b1_coeffs,
            },
            SdpBlock {
                dim: 2 * d,
                f0: f0_2,
                coeffs: b2_coeffs,
            },
            b3,
        ],
    }
}

/// Strictly feasible start: `W = t I` with
/// `t = ½ √(λ_min(Γ^N) λ_min(Γ^M))` and `λ = ½ t d_B`.
fn feasible_start(gamma_n: &CMatrix, gamma_m: &CMatrix, dim_in: usize, dim_out: usize) -> Vec<f64> {
    let d = dim_in * dim_out;
    let t = 0.5 * (min_eigenvalue(gamma_n).max(0.0) * min_eigenvalue(gamma_m).max(0.0)).sqrt();
    let mut x = vec![0.0; 1 + d * d];
    x[0] = 0.5 * t * dim_out as f64;
    for i in 0..d {
        x[1 + i] = t;
    }
    x
}

#[derive(Debug, Clone)]
pub struct SdpFidelity {
    /// `F̂(N, M) = λ*²`.
    pub value: f64,
    pub lambda: f64,
    pub gap: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Shift applied to singular Choi operators (0 when none was needed).
    pub regularization: f64,
}

fn solve_with_shift(
    gamma_n: &HermitianMatrix,
    gamma_m: &HermitianMatrix,
    dim_in: usize,
    dim_out: usize,
    shift: f64,
) -> Result<(f64, SdpSolution)> {
    let d = dim_in * dim_out;
    let gn = gamma_n.matrix() + identity(d) * Complex64::new(shift, 0.0);
    let gm = gamma_m.matrix() + identity(d) * Complex64::new(shift, 0.0);
    let prog = fidelity_program(&gn, &gm, dim_in, dim_out);
    let x0 = feasible_start(&gn, &gm, dim_in, dim_out);
    let sol = prog.solve(&x0, 1e-10, 1e-9, 150)?;
    Ok((sol.x[0], sol))
}

/// Geometric channel fidelity `F̂(N, M)` via the SDP.
///
/// Exact for channels with positive definite Choi operators; singular Choi
/// operators are shifted by decreasing ε with √ε-extrapolation (the shifted
/// values decrease monotonically to the unshifted limit).
pub fn geometric_channel_fidelity_sdp(
    n: &QuantumChannel,
    m: &QuantumChannel,
    choi_cap: usize,
) -> Result<SdpFidelity> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(Error::dim_mismatch(
            "channel fidelity SDP",
            n.dim_in(),
            m.dim_in(),
        ));
    }
    let d = n.dim_in() * n.dim_out();
    if d > choi_cap {
        return Err(Error::Capacity {
            what: "Choi dimension for the fidelity SDP".into(),
            requested: d,
            limit: choi_cap,
        });
    }
    let gamma_n = &n.choi().matrix;
    let gamma_m = &m.choi().matrix;
    let floor = 1e-8 * (gamma_n.trace() / d as f64).max(1e-300);
    let min_n = min_eigenvalue(gamma_n.matrix());
    let min_m = min_eigenvalue(gamma_m.matrix());

    if min_n > floor && min_m > floor {
        let (lambda, sol) = solve_with_shift(gamma_n, gamma_m, n.dim_in(), n.dim_out(), 0.0)?;
        let lam = lambda.clamp(0.0, 1.0);
        return Ok(SdpFidelity {
            value: (lam * lam).min(1.0),
            lambda: lam,
            gap: sol.gap,
            dual_residual: sol.dual_residual,
            iterations: sol.iterations,
            converged: sol.converged,
            regularization: 0.0,
        });
    }

    // singular case: shifted solves + √ε extrapolation
    let e1 = 1e-5 * gamma_n.trace().max(1.0) / d as f64;
    let e2 = e1 / 10.0;
    let base = min_n.min(min_m).min(0.0).abs();
    let (l1, _) = solve_with_shift(gamma_n, gamma_m, n.dim_in(), n.dim_out(), base + e1)?;
    let (l2, sol2) = solve_with_shift(gamma_n, gamma_m, n.dim_in(), n.dim_out(), base + e2)?;
    let r = (e2 / e1).sqrt();
    let lam = ((l2 - r * l1) / (1.0 - r)).clamp(0.0, 1.0);
    Ok(SdpFidelity {
        value: (lam * lam).min(1.0),
        lambda: lam,
        gap: sol2.gap,
        dual_residual: sol2.dual_residual,
        iterations: sol2.iterations,
        converged: sol2.converged,
        regularization: base + e2,
    })
}

/// JSON export of the fidelity SDP in a generic block form:
/// `{"objective": [...], "blocks": [{"dim": d, "f0": ...}], "constraints":
/// [{"variable": i, "block": b, "matrix": ...}]}` with complex matrices as
/// rows of `[re, im]` pairs.
pub fn export_fidelity_sdp_json(n: &QuantumChannel, m: &QuantumChannel) -> serde_json::Value {
    let prog = fidelity_program(
        n.choi().matrix.matrix(),
        m.choi().matrix.matrix(),
        n.dim_in(),
        n.dim_out(),
    );
    let mat_json = |m: &CMatrix| -> serde_json::Value {
        serde_json::json!((0..m.nrows())
            .map(|i| (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect::<Vec<_>>())
            .collect::<Vec<_>>())
    };
    let blocks: Vec<serde_json::Value> = prog
        .blocks
        .iter()
        .map(|b| serde_json::json!({"dim": b.dim, "f0": mat_json(&b.f0)}))
        .collect();
    let mut constraints = Vec::new();
    for (b_idx, b) in prog.blocks.iter().enumerate() {
        for (i, f) in &b.coeffs {
            constraints.push(serde_json::json!({
                "variable": i,
                "block": b_idx,
                "matrix": mat_json(f),
            }));
        }
    }
    serde_json::json!({
        "sense": "maximize",
        "objective": prog.c,
        "blocks": blocks,
        "constraints": constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        embed_classical, random_channel, ClassicalChannel, DensityMatrix, QuantumChannel,
    };
    use crate::rng::stream_rng;

    #[test]
    fn identical_channels_have_unit_fidelity() {
        let mut rng = stream_rng(70, 0);
        let ch = random_channel(2, 2, None, &mut rng);
        let res = geometric_channel_fidelity_sdp(&ch, &ch, DEFAULT_CHOI_CAP).unwrap();
        assert!(res.converged, "SDP did not converge: {res:?}");
        assert!((res.value - 1.0).abs() < 1e-6, "F-hat = {}", res.value);
    }

    #[test]
    fn classical_channels_match_the_closed_form() {
        // rows (0.9, 0.1) vs (0.8, 0.2): √F per input = Σ_y √(P_N P_M)
        let n =
            embed_classical(&ClassicalChannel::new(vec![vec![0.9, 0.1], vec![0.9, 0.1]]).unwrap());
        let m =
            embed_classical(&ClassicalChannel::new(vec![vec![0.8, 0.2], vec![0.8, 0.2]]).unwrap());
        let expected = ((0.9_f64 * 0.8).sqrt() + (0.1_f64 * 0.2).sqrt()).powi(2);
        assert!((expected - 0.98).abs() < 1e-12);
        let res = geometric_channel_fidelity_sdp(&n, &m, DEFAULT_CHOI_CAP).unwrap();
        assert!(res.converged);
        assert!(
            (res.value - expected).abs() < 1e-5,
            "SDP {} vs closed form {}",
            res.value,
            expected
        );
    }

    #[test]
    fn orthogonal_replacers_have_zero_fidelity() {
        let rep0 = QuantumChannel::replacer(2, &DensityMatrix::basis_state(2, 0));
        let rep1 = QuantumChannel::replacer(2, &DensityMatrix::basis_state(2, 1));
        let res = geometric_channel_fidelity_sdp(&rep0, &rep1, DEFAULT_CHOI_CAP).unwrap();
        assert!(res.regularization > 0.0);
        assert!(res.value < 1e-3, "F-hat = {}", res.value);
    }

    #[test]
    fn choi_cap_is_enforced() {
        let mut rng = stream_rng(71, 0);
        let big = random_channel(3, 3, None, &mut rng);
        let err = geometric_channel_fidelity_sdp(&big, &big, 8).unwrap_err();
        assert!(err.is_capacity());
    }

    #[test]
    fn sdp_matches_the_geometric_mean_characterization() {
        // λ* = λ_min(Tr_B[Γ^N # Γ^M]) by the maximal-element property of the
        // matrix geometric mean; independent route for PD Choi operators.
        let mut rng = stream_rng(72, 0);
        for k in 0..6 {
            let n = random_channel(2, 2, None, &mut stream_rng(72, 10 + k));
            let m = random_channel(2, 2, None, &mut stream_rng(72, 20 + k));
            let res = geometric_channel_fidelity_sdp(&n, &m, DEFAULT_CHOI_CAP).unwrap();
            assert!(res.converged, "instance {k} unconverged");
            let g = crate::hermitian::geometric_mean(&n.choi().matrix, &m.choi().matrix).unwrap();
            let red = partial_trace_trailing(g.matrix(), 2, 2);
            let lam_expected = min_eigenvalue(&red).max(0.0);
            assert!(
                (res.lambda - lam_expected).abs() < 1e-6,
                "instance {k}: SDP λ {} vs geometric-mean λ {}",
                res.lambda,
                lam_expected
            );
            let _ = &mut rng;
        }
    }

    #[test]
    fn export_has_expected_shape() {
        let ch = QuantumChannel::identity(2);
        let v = export_fidelity_sdp_json(&ch, &ch);
        assert_eq!(v["sense"], "maximize");
        assert_eq!(v["blocks"].as_array().unwrap().len(), 3);
        assert!(v["constraints"].as_array().unwrap().len() >= 17);
    }
}
