//! State-level divergences and fidelities.
//!
//! Implements the normalized trace distance, the Uhlmann / Holevo / geometric
//! fidelities, the Petz / sandwiched / geometric Rényi divergences, the
//! quantum relative entropy, the Bures-type distances, and the Chernoff-type
//! overlaps `Q_s = Tr[ρ^s σ^{1-s}]` and `Q̂_s = Tr[σ (σ^{-1/2} ρ σ^{-1/2})^s]`.
//!
//! All definitions involve `ε → 0⁺` regularized limits; these are evaluated
//! exactly by support reduction:
//!
//! * Petz and sandwiched quantities use pseudo-powers on the support, which
//!   equal the regularized limits;
//! * geometric quantities reduce to the support of `σ` via the generalized
//!   Schur complement `ρ̃ = ρ_ss − ρ_sk ρ_kk⁺ ρ_ks` (blocks with respect to
//!   `supp σ ⊕ ker σ`), which is the exact Kubo–Ando limit. The decreasing-ε
//!   evaluation of the defining formula is kept as an independent oracle in
//!   the test suite.
//!
//! Divergences are natural-log based. Values are extended reals: `+∞` encodes
//! the support-violation cases.

use crate::channels::DensityMatrix;
use crate::error::Error;
use crate::hermitian::{HermitianMatrix, SUPPORT_CUTOFF_REL};
use crate::Result;

/// Fidelity families of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FidelityKind {
    /// `F(ρ,σ) = ‖√ρ √σ‖₁²`
    Uhlmann,
    /// `F_H(ρ,σ) = (Tr[√ρ √σ])²`
    Holevo,
    /// `F̂(ρ,σ) = inf_{ε>0} (Tr[ρ(ε) # σ(ε)])²`
    Geometric,
}

impl FidelityKind {
    pub const ALL: [FidelityKind; 3] = [
        FidelityKind::Uhlmann,
        FidelityKind::Holevo,
        FidelityKind::Geometric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FidelityKind::Uhlmann => "uhlmann",
            FidelityKind::Holevo => "holevo",
            FidelityKind::Geometric => "geometric",
        }
    }
}

/// Rényi divergence families of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RenyiKind {
    /// `D_α = ln Tr[ρ^α σ^{1-α}] / (α-1)`; data processing holds on `(0,1) ∪ (1,2]`.
    Petz,
    /// `D̃_α = ln Tr[(ρ^{1/2} σ^{(1-α)/α} ρ^{1/2})^α] / (α-1)`; data processing on `[1/2,1) ∪ (1,∞)`.
    Sandwiched,
    /// `D̂_α = ln Tr[σ (σ^{-1/2} ρ σ^{-1/2})^α] / (α-1)`; data processing on `(0,1) ∪ (1,2]`.
    Geometric,
}

impl RenyiKind {
    pub const ALL: [RenyiKind; 3] = [RenyiKind::Petz, RenyiKind::Sandwiched, RenyiKind::Geometric];

    pub fn name(&self) -> &'static str {
        match self {
            RenyiKind::Petz => "petz",
            RenyiKind::Sandwiched => "sandwiched",
            RenyiKind::Geometric => "geometric",
        }
    }

    /// The α range on which the family obeys the data-processing inequality.
    pub fn dpi_valid(&self, alpha: f64) -> bool {
        match self {
            RenyiKind::Petz | RenyiKind::Geometric => {
                (0.0 < alpha && alpha < 1.0) || (1.0 < alpha && alpha <= 2.0)
            }
            RenyiKind::Sandwiched => (0.5..1.0).contains(&alpha) || alpha > 1.0,
        }
    }
}

/// Extended-real divergence value: finite nonnegative, or `+∞`.
///
/// Tiny negative values (down to `-1e-9`, floating-point noise near equality)
/// are clipped to 0 at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    value: f64,
}

impl DivergenceValue {
    const NEG_CLIP: f64 = 1e-9;

    pub fn new(value: f64) -> Self {
        let v = if (-Self::NEG_CLIP..0.0).contains(&value) {
            0.0
        } else {
            value
        };
        debug_assert!(
            v >= 0.0 || v.is_infinite(),
            "divergence value {v} below the clip band"
        );
        DivergenceValue { value: v }
    }

    pub fn infinite() -> Self {
        DivergenceValue {
            value: f64::INFINITY,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix, context: &str) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dim_mismatch(context, rho.dim(), sigma.dim()));
    }
    Ok(())
}

/// Normalized trace distance `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma, "trace_distance")?;
    Ok(0.5 * rho.hermitian().sub(sigma.hermitian()).trace_norm())
}

fn sqrt_psd(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    m.pseudo_power(0.5)
}

/// Sum of the positive eigenvalue powers `Σ λ_i^alpha` over the support.
fn trace_power(m: &HermitianMatrix, alpha: f64) -> f64 {
    let dec = m.spectral();
    let lam_max = dec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SUPPORT_CUTOFF_REL * lam_max;
    dec.eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l.powf(alpha))
        .sum()
}

/// Weight of `rho` outside the support of `sigma`, relative to `Tr ρ`.
fn mass_outside_support(rho: &DensityMatrix, sigma_split: &crate::hermitian::SupportSplit) -> f64 {
    if sigma_split.kernel.ncols() == 0 {
        return 0.0;
    }
    let blk = sigma_split.kernel.adjoint() * rho.matrix() * &sigma_split.kernel;
    blk.trace().re
}

const SUPPORT_MASS_TOL: f64 = 1e-10;

/// `F(ρ,σ)` for the requested fidelity kind; value in `[0, 1]`.
pub fn fidelity(kind: FidelityKind, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma, "fidelity")?;
    let f = match kind {
        FidelityKind::Uhlmann => {
            // ‖√ρ √σ‖₁² = (Tr[(√σ ρ √σ)^{1/2}])²
            let s = sqrt_psd(sigma.hermitian())?;
            let inner = HermitianMatrix::from_symmetrized(s.matrix() * rho.matrix() * s.matrix());
            let root_sum = trace_power(&inner, 0.5);
            root_sum * root_sum
        }
        FidelityKind::Holevo => {
            let a = sqrt_psd(rho.hermitian())?;
            let b = sqrt_psd(sigma.hermitian())?;
            let t = (a.matrix() * b.matrix()).trace().re;
            t * t
        }
        FidelityKind::Geometric => {
            // F̂ = Q̂_{1/2}² via the exact Kubo–Ando limit.
            let q = geometric_q(0.5, rho, sigma)?;
            if !q.is_finite() {
                return Err(Error::NumericalLimit {
                    what: "geometric fidelity produced a non-finite overlap".into(),
                    values: vec![q],
                });
            }
            q * q
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Bures distance and its geometric-fidelity analogue:
/// `d_B = √(2(1−√F))`, `d_F̂ = √(2(1−√F̂))`; both in `[0, √2]`.
pub fn bures_and_dfhat(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64)> {
    let f = fidelity(FidelityKind::Uhlmann, rho, sigma)?;
    let fh = fidelity(FidelityKind::Geometric, rho, sigma)?;
    Ok((
        (2.0 * (1.0 - f.sqrt())).max(0.0).sqrt(),
        (2.0 * (1.0 - fh.sqrt())).max(0.0).sqrt(),
    ))
}

/// `Q_α(ρ‖σ) = lim_{ε→0⁺} Tr[ρ^α (σ+εI)^{1-α}]`, evaluated exactly on the
/// supports. Returns `+∞` when `α > 1` and `supp ρ ⊄ supp σ`. At `α = 1`
/// the regularized limit is `Tr[ρ] = 1` since `(σ+εI)^0 = I` for every ε.
pub fn petz_q(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma, "petz_q")?;
    if alpha == 1.0 {
        return Ok(1.0);
    }
    if alpha > 1.0 {
        let split = sigma.hermitian().support_split();
        if mass_outside_support(rho, &split) > SUPPORT_MASS_TOL {
            return Ok(f64::INFINITY);
        }
    }
    let ra = rho.hermitian().pseudo_power(alpha)?;
    let sb = sigma.hermitian().pseudo_power(1.0 - alpha)?;
    Ok((ra.matrix() * sb.matrix()).trace().re.max(0.0))
}

/// `Q̃_α(ρ‖σ) = lim_{ε→0⁺} Tr[(ρ^{1/2} (σ+εI)^{(1-α)/α} ρ^{1/2})^α]`.
pub fn sandwiched_q(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma, "sandwiched_q")?;
    if alpha > 1.0 {
        let split = sigma.hermitian().support_split();
        if mass_outside_support(rho, &split) > SUPPORT_MASS_TOL {
            return Ok(f64::INFINITY);
        }
    }
    let c = (1.0 - alpha) / alpha;
    let sc = sigma.hermitian().pseudo_power(c)?;
    let rh = sqrt_psd(rho.hermitian())?;
    let inner = HermitianMatrix::from_symmetrized(rh.matrix() * sc.matrix() * rh.matrix());
    Ok(trace_power(&inner, alpha).max(0.0))
}

/// `Q̂_α(ρ‖σ) = lim_{ε→0⁺} Tr[(σ+εI) ((σ+εI)^{-1/2} ρ (σ+εI)^{-1/2})^α]`,
/// evaluated exactly: on `supp σ` with `ρ` replaced by the generalized Schur
/// complement `ρ̃ = ρ_ss − ρ_sk ρ_kk⁺ ρ_ks`, and `+∞` when `α > 1` with
/// `supp ρ ⊄ supp σ`.
pub fn geometric_q(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma, "geometric_q")?;
    let split = sigma.hermitian().support_split();
    let r = split.rank();
    if alpha > 1.0 && mass_outside_support(rho, &split) > SUPPORT_MASS_TOL {
        return Ok(f64::INFINITY);
    }
    let rho_eff = if r == sigma.dim() {
        split.restrict(rho.matrix())
    } else {
        let vs = &split.support;
        let vk = &split.kernel;
        let a_ss = vs.adjoint() * rho.matrix() * vs;
        let a_sk = vs.adjoint() * rho.matrix() * vk;
        let a_kk = HermitianMatrix::from_symmetrized(vk.adjoint() * rho.matrix() * vk);
        let a_kk_pinv = a_kk.pseudo_power(-1.0)?;
        &a_ss - &a_sk * a_kk_pinv.matrix() * a_sk.adjoint()
    };
    let rho_eff = HermitianMatrix::from_symmetrized(rho_eff);
    // σ restricted to its support is diagonal in the split basis.
    let sigma_s = HermitianMatrix::from_diagonal(&split.eigenvalues);
    let s_neg_half = sigma_s.pseudo_power(-0.5)?;
    let t = HermitianMatrix::from_symmetrized(
        s_neg_half.matrix() * rho_eff.matrix() * s_neg_half.matrix(),
    );
    let t_alpha = t.pseudo_power(alpha)?;
    Ok((sigma_s.matrix() * t_alpha.matrix()).trace().re.max(0.0))
}

fn q_for(kind: RenyiKind, alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    match kind {
        RenyiKind::Petz => petz_q(alpha, rho, sigma),
        RenyiKind::Sandwiched => sandwiched_q(alpha, rho, sigma),
        RenyiKind::Geometric => geometric_q(alpha, rho, sigma),
    }
}

/// Rényi divergence of order `α ∈ (0,1) ∪ (1,∞)` for the requested family.
///
/// The `α → 1` limit is deliberately excluded; use [`relative_entropy`].
pub fn renyi(
    kind: RenyiKind,
    alpha: f64,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<DivergenceValue> {
    if alpha <= 0.0 || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "Rényi order must lie in (0,1) ∪ (1,∞), got {alpha}"
        )));
    }
    let q = q_for(kind, alpha, rho, sigma)?;
    if !q.is_finite() || q <= 0.0 {
        // q = 0 with α < 1 and q = +∞ with α > 1 both mean divergence +∞.
        return Ok(DivergenceValue::infinite());
    }
    Ok(DivergenceValue::new(q.ln() / (alpha - 1.0)))
}

/// Quantum relative entropy `D(ρ‖σ) = Tr[ρ (ln ρ − ln σ)]` on the supports;
/// `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    check_dims(rho, sigma, "relative_entropy")?;
    let split = sigma.hermitian().support_split();
    if mass_outside_support(rho, &split) > SUPPORT_MASS_TOL {
        return Ok(DivergenceValue::infinite());
    }
    let rho_dec = rho.hermitian().spectral();
    let lam_max = rho_dec.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SUPPORT_CUTOFF_REL * lam_max;
    let entropy_term: f64 = rho_dec
        .eigenvalues
        .iter()
        .filter(|&&l| l > cutoff)
        .map(|&l| l * l.ln())
        .sum();
    let mut cross = 0.0;
    for (j, &s) in split.eigenvalues.iter().enumerate() {
        let v = split.support.column(j);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re.max(0.0);
        cross += w * s.ln();
    }
    Ok(DivergenceValue::new(entropy_term - cross))
}

/// Smoothed evaluations for optimizer objectives.
///
/// The exact support-reduced quantities jump when an eigenvalue crosses the
/// support cutoff, and a numerical minimizer will latch onto those cliffs.
/// These variants regularize `σ` by a fixed tiny `εI` and use raw eigenvalue
/// powers (no cutoff), making the objectives continuous in the inputs. Each
/// smoothed value bounds its exact counterpart in the direction that keeps
/// restricted optimization sound: fidelities and `Q` overlaps from above
/// (safe when minimized), divergences from below (safe when maximized).
pub mod smoothed {
    use super::*;
    use crate::hermitian::CMatrix;

    const EPS_REL: f64 = 1e-9;

    fn raw_power(m: &HermitianMatrix, alpha: f64) -> CMatrix {
        m.spectral().apply(|l| l.max(0.0).powf(alpha))
    }

    fn raw_power_pd(m: &HermitianMatrix, alpha: f64, floor: f64) -> CMatrix {
        m.spectral().apply(|l| l.max(floor).powf(alpha))
    }

    pub fn fidelity(kind: FidelityKind, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        match kind {
            FidelityKind::Uhlmann => {
                let s = HermitianMatrix::from_symmetrized(raw_power(sigma.hermitian(), 0.5));
                let inner =
                    HermitianMatrix::from_symmetrized(s.matrix() * rho.matrix() * s.matrix());
                let root_sum: f64 = inner
                    .spectral()
                    .eigenvalues
                    .iter()
                    .map(|l| l.max(0.0).sqrt())
                    .sum();
                (root_sum * root_sum).min(1.0)
            }
            FidelityKind::Holevo => {
                let a = raw_power(rho.hermitian(), 0.5);
                let b = raw_power(sigma.hermitian(), 0.5);
                let t = (a * b).trace().re;
                (t * t).min(1.0)
            }
            FidelityKind::Geometric => {
                let q = geometric_q(0.5, rho, sigma);
                (q * q).min(1.0)
            }
        }
    }

    /// `Tr[(σ+εI) ((σ+εI)^{-1/2} ρ (σ+εI)^{-1/2})^α]` at fixed tiny ε.
    pub fn geometric_q(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        let eps = EPS_REL;
        let s_eps = sigma.hermitian().add_scaled_identity(eps);
        let s_neg_half = raw_power_pd(&s_eps, -0.5, eps * 0.5);
        let t = HermitianMatrix::from_symmetrized(&s_neg_half * rho.matrix() * &s_neg_half);
        let t_alpha = raw_power(&t, alpha);
        (s_eps.matrix() * t_alpha).trace().re.max(0.0)
    }

    /// `Tr[ρ^α (σ+εI)^{1-α}]` with raw powers.
    pub fn petz_q(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        let eps = EPS_REL;
        let ra = raw_power(rho.hermitian(), alpha);
        let s_eps = sigma.hermitian().add_scaled_identity(eps);
        let sb = raw_power_pd(&s_eps, 1.0 - alpha, eps * 0.5);
        (ra * sb).trace().re.max(0.0)
    }

    pub fn sandwiched_q(alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        let eps = EPS_REL;
        let s_eps = sigma.hermitian().add_scaled_identity(eps);
        let sc = raw_power_pd(&s_eps, (1.0 - alpha) / alpha, eps * 0.5);
        let rh = raw_power(rho.hermitian(), 0.5);
        let inner = HermitianMatrix::from_symmetrized(&rh * sc * &rh);
        inner
            .spectral()
            .eigenvalues
            .iter()
            .map(|l| l.max(0.0).powf(alpha))
            .sum::<f64>()
            .max(0.0)
    }

    pub fn renyi(kind: RenyiKind, alpha: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        let q = match kind {
            RenyiKind::Petz => petz_q(alpha, rho, sigma),
            RenyiKind::Sandwiched => sandwiched_q(alpha, rho, sigma),
            RenyiKind::Geometric => geometric_q(alpha, rho, sigma),
        };
        if q <= 0.0 {
            return f64::INFINITY;
        }
        (q.ln() / (alpha - 1.0)).max(0.0)
    }
}

/// `Q_s(ρ‖σ) = Tr[ρ^s σ^{1-s}]` for `s ∈ (0,1)`; in `[0, 1]`.
pub fn q_s(s: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if !(0.0 < s && s < 1.0) {
        return Err(Error::Domain(format!("Q_s requires s in (0,1), got {s}")));
    }
    petz_q(s, rho, sigma).map(|q| q.min(1.0))
}

/// `Q̂_s(ρ‖σ) = Tr[σ (σ^{-1/2} ρ σ^{-1/2})^s]` for `s ∈ (0,1)`
/// (support-projected); in `[0, 1]`.
pub fn q_hat_s(s: f64, rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if !(0.0 < s && s < 1.0) {
        return Err(Error::Domain(format!("Q̂_s requires s in (0,1), got {s}")));
    }
    geometric_q(s, rho, sigma).map(|q| q.min(1.0))
}
