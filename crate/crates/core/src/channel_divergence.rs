//! Channel-level divergences and fidelities.
//!
//! Every quantity here is an extremization of a state-level quantity over
//! channel inputs `ρ_RA` (with `dim R = dim A`):
//!
//! * classical channels reduce to an extremization over input symbols
//!   (joint concavity of the root fidelities / quasi-convexity of the Rényi
//!   divergences restricts the optimum to basis inputs);
//! * classical–quantum channels likewise reduce to the best symbol;
//! * general quantum channels are handled by a projected-gradient search over
//!   pure inputs (restarts from seeded random starts), except the geometric
//!   channel fidelity, which has an exact SDP.
//!
//! Heuristic optimization cannot certify global optimality, so every result
//! carries a [`ValueDirection`]: whether the reported number is exact, an
//! over-approximation of the true infimum, or an under-approximation of the
//! true supremum. The complexity module consumes only the safe directions.

use rayon::prelude::*;

use crate::channels::{Channel, CqChannel, DensityMatrix, QuantumChannel};
use crate::divergence::{fidelity, geometric_q, petz_q, renyi, FidelityKind, RenyiKind};
use crate::error::Error;
use crate::hermitian::CVector;
use crate::sdp::{geometric_channel_fidelity_sdp as sdp_fidelity, SdpFidelity, DEFAULT_CHOI_CAP};
use crate::Result;
use num_complex::Complex64;
use rand::Rng;

/// How a channel-level value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceMethod {
    ClassicalClosedForm,
    CqClosedForm,
    InputOptimization,
    Sdp,
}

impl DivergenceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            DivergenceMethod::ClassicalClosedForm => "classical-closed-form",
            DivergenceMethod::CqClosedForm => "cq-closed-form",
            DivergenceMethod::InputOptimization => "input-optimization",
            DivergenceMethod::Sdp => "sdp",
        }
    }
}

/// Relation of the reported value to the true channel quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueDirection {
    /// Closed form or SDP: exact up to solver tolerance.
    Exact,
    /// Restricted minimization of an infimum: true value ≤ reported value.
    UpperBoundsTruth,
    /// Restricted maximization of a supremum: true value ≥ reported value.
    LowerBoundsTruth,
}

impl ValueDirection {
    pub fn name(&self) -> &'static str {
        match self {
            ValueDirection::Exact => "exact",
            ValueDirection::UpperBoundsTruth => "upper-bounds-truth",
            ValueDirection::LowerBoundsTruth => "lower-bounds-truth",
        }
    }
}

/// The input achieving the reported value.
#[derive(Debug, Clone)]
pub enum OptimizerInput {
    Symbol(usize),
    State(DensityMatrix),
    None,
}

#[derive(Debug, Clone)]
pub struct ChannelDivergenceResult {
    /// Extended real (`+∞` encodes support violations).
    pub value: f64,
    pub optimizer_input: OptimizerInput,
    pub method: DivergenceMethod,
    pub direction: ValueDirection,
    /// Difference between the two best methods when more than one ran
    /// (SDP vs input optimization for the geometric channel fidelity).
    pub certified_gap: Option<f64>,
    pub converged: bool,
}

impl ChannelDivergenceResult {
    fn exact(value: f64, input: OptimizerInput, method: DivergenceMethod) -> Self {
        ChannelDivergenceResult {
            value,
            optimizer_input: input,
            method,
            direction: ValueDirection::Exact,
            certified_gap: None,
            converged: true,
        }
    }
}

/// Settings for the pure-state input search.
#[derive(Debug, Clone)]
pub struct InputOptConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for InputOptConfig {
    fn default() -> Self {
        InputOptConfig {
            restarts: 32,
            max_iters: 150,
            step_tol: 1e-8,
            value_tol: 1e-9,
            seed: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Projected-gradient search over pure inputs
// ---------------------------------------------------------------------------

fn params_to_state(params: &[f64]) -> Option<DensityMatrix> {
    let d = params.len() / 2;
    let mut v = CVector::zeros(d);
    let mut norm2 = 0.0;
    for i in 0..d {
        v[i] = Complex64::new(params[2 * i], params[2 * i + 1]);
        norm2 += v[i].norm_sqr();
    }
    if norm2 < 1e-200 {
        return None;
    }
    DensityMatrix::pure(&v).ok()
}

/// Minimize `objective` over pure states of the given dimension with
/// projected gradient descent (central-difference gradients, backtracking)
/// from `restarts` seeded random starts. Returns `(value, state, converged)`.
fn minimize_over_pure_states<F>(
    dim: usize,
    objective: F,
    cfg: &InputOptConfig,
) -> (f64, DensityMatrix, bool)
where
    F: Fn(&DensityMatrix) -> f64 + Sync,
{
    let eval = |params: &[f64]| -> f64 {
        match params_to_state(params) {
            Some(state) => objective(&state),
            None => f64::INFINITY,
        }
    };
    let run_one = |restart: usize| -> (f64, Vec<f64>, bool) {
        let mut rng = crate::rng::stream_rng(cfg.seed, 0x0bee + restart as u64);
        let mut params: Vec<f64> = (0..2 * dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut value = eval(&params);
        let fd_step = 1e-5;
        let mut lr = 0.25;
        let mut converged = false;
        for _ in 0..cfg.max_iters {
            // central-difference gradient
            let mut grad = vec![0.0; params.len()];
            for k in 0..params.len() {
                let orig = params[k];
                params[k] = orig + fd_step;
                let fp = eval(&params);
                params[k] = orig - fd_step;
                let fm = eval(&params);
                params[k] = orig;
                grad[k] = (fp - fm) / (2.0 * fd_step);
            }
            let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-12 {
                converged = true;
                break;
            }
            // backtracking line search on the normalized descent direction
            let mut accepted = false;
            let mut step = lr;
            for _ in 0..40 {
                let trial: Vec<f64> = params
                    .iter()
                    .zip(&grad)
                    .map(|(p, g)| p - step * g / gnorm)
                    .collect();
                let f_trial = eval(&trial);
                if f_trial < value {
                    let rel_change = (value - f_trial) / value.abs().max(1.0);
                    params = trial;
                    value = f_trial;
                    lr = (step * 1.5).min(0.5);
                    accepted = true;
                    if rel_change < cfg.value_tol {
                        converged = true;
                    }
                    break;
                }
                step *= 0.5;
                if step < cfg.step_tol {
                    break;
                }
            }
            if !accepted {
                converged = true;
                break;
            }
            if converged {
                break;
            }
        }
        (value, params, converged)
    };

    let results: Vec<(f64, Vec<f64>, bool)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(run_one)
        .collect();
    let best = results
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        .expect("at least one restart");
    let state = params_to_state(&best.1).unwrap_or_else(|| DensityMatrix::maximally_mixed(dim));
    (best.0, state, best.2)
}

fn optimize_channel_objective<F>(
    n: &QuantumChannel,
    m: &QuantumChannel,
    state_value: F,
    maximize: bool,
    cfg: &InputOptConfig,
) -> Result<(f64, DensityMatrix, bool)>
where
    F: Fn(&DensityMatrix, &DensityMatrix) -> f64 + Sync,
{
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(Error::dim_mismatch(
            "channel divergence",
            n.dim_in(),
            m.dim_in(),
        ));
    }
    let d = n.dim_in();
    let sign = if maximize { -1.0 } else { 1.0 };
    let objective = |psi: &DensityMatrix| -> f64 {
        let out_n = match n.apply_with_reference(psi, d) {
            Ok(s) => s,
            Err(_) => return f64::INFINITY,
        };
        let out_m = match m.apply_with_reference(psi, d) {
            Ok(s) => s,
            Err(_) => return f64::INFINITY,
        };
        sign * state_value(&out_n, &out_m)
    };
    let (v, state, converged) = minimize_over_pure_states(d * d, objective, cfg);
    Ok((sign * v, state, converged))
}

// ---------------------------------------------------------------------------
// Classical closed forms
// ---------------------------------------------------------------------------

/// `Σ_y t_y^s r_y^{1-s}` with the regularized-limit conventions: symbols with
/// `t_y = 0` contribute nothing (also at `s = 0`, where `t^0` is the support
/// indicator), while symbols with `r_y = 0` contribute `t_y` at `s = 1`
/// (there `(r+ε)^0 = 1` for every ε) and nothing below it.
pub fn classical_q_s(s: f64, t: &[f64], r: &[f64]) -> f64 {
    t.iter()
        .zip(r)
        .map(|(&a, &b)| {
            if a <= 0.0 {
                0.0
            } else if b <= 0.0 {
                if s == 1.0 {
                    a
                } else {
                    0.0
                }
            } else {
                a.powf(s) * b.powf(1.0 - s)
            }
        })
        .sum()
}

fn classical_fidelity(t: &[f64], r: &[f64]) -> f64 {
    let bc = classical_q_s(0.5, t, r);
    bc * bc
}

/// Classical Rényi divergence with support conventions (`+∞` when `α > 1` and
/// `t` puts mass outside `supp r`).
fn classical_renyi(alpha: f64, t: &[f64], r: &[f64]) -> f64 {
    if alpha > 1.0 && t.iter().zip(r).any(|(&a, &b)| a > 0.0 && b <= 0.0) {
        return f64::INFINITY;
    }
    let q = classical_q_s(alpha, t, r);
    if q <= 0.0 {
        return f64::INFINITY;
    }
    (q.ln() / (alpha - 1.0)).max(0.0)
}

// ---------------------------------------------------------------------------
// Channel fidelities
// ---------------------------------------------------------------------------

/// Channel fidelity `F(N, M) = inf_{ρ_RA} F(N(ρ_RA), M(ρ_RA))`.
///
/// Classical and CQ channels use the exact symbol reduction. For general
/// quantum channels the geometric kind runs the SDP (exact) cross-checked
/// against input optimization; the other kinds run input optimization alone
/// and report an upper bound on the true infimum.
pub fn channel_fidelity(
    kind: FidelityKind,
    n: &Channel,
    m: &Channel,
    cfg: &InputOptConfig,
) -> Result<ChannelDivergenceResult> {
    match (n, m) {
        (Channel::Classical(nc), Channel::Classical(mc)) => {
            if nc.n_in != mc.n_in || nc.n_out != mc.n_out {
                return Err(Error::dim_mismatch("channel_fidelity", nc.n_in, mc.n_in));
            }
            // all fidelity kinds coincide on commuting outputs
            let (x, value) = (0..nc.n_in)
                .map(|x| (x, classical_fidelity(nc.row(x), mc.row(x))))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty alphabet");
            Ok(ChannelDivergenceResult::exact(
                value,
                OptimizerInput::Symbol(x),
                DivergenceMethod::ClassicalClosedForm,
            ))
        }
        (Channel::Cq(ncq), Channel::Cq(mcq)) => channel_fidelity_cq(kind, ncq, mcq),
        _ => {
            let nq = n.to_quantum();
            let mq = m.to_quantum();
            let state_value = move |a: &DensityMatrix, b: &DensityMatrix| -> f64 {
                crate::divergence::smoothed::fidelity(kind, a, b)
            };
            let (opt_value, state, converged) =
                optimize_channel_objective(&nq, &mq, state_value, false, cfg)?;
            if kind == FidelityKind::Geometric {
                match sdp_fidelity(&nq, &mq, DEFAULT_CHOI_CAP) {
                    Ok(sdp) => {
                        return Ok(ChannelDivergenceResult {
                            value: sdp.value,
                            optimizer_input: OptimizerInput::State(state),
                            method: DivergenceMethod::Sdp,
                            direction: ValueDirection::Exact,
                            certified_gap: Some((sdp.value - opt_value).abs()),
                            converged: sdp.converged,
                        });
                    }
                    Err(e) if e.is_capacity() => {} // fall through to the heuristic value
                    Err(e) => return Err(e),
                }
            }
            Ok(ChannelDivergenceResult {
                value: opt_value,
                optimizer_input: OptimizerInput::State(state),
                method: DivergenceMethod::InputOptimization,
                direction: ValueDirection::UpperBoundsTruth,
                certified_gap: None,
                converged,
            })
        }
    }
}

/// CQ channel fidelity: `min_x F(ω_x, ν_x)` (ties take the smallest index).
pub fn channel_fidelity_cq(
    kind: FidelityKind,
    n: &CqChannel,
    m: &CqChannel,
) -> Result<ChannelDivergenceResult> {
    if n.n_in != m.n_in {
        return Err(Error::dim_mismatch(
            "channel_fidelity_cq alphabet",
            n.n_in,
            m.n_in,
        ));
    }
    let mut best = (0usize, f64::INFINITY);
    for x in 0..n.n_in {
        let f = fidelity(kind, n.output(x), m.output(x))?;
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok(ChannelDivergenceResult::exact(
        best.1,
        OptimizerInput::Symbol(best.0),
        DivergenceMethod::CqClosedForm,
    ))
}

/// Geometric channel fidelity by SDP, wrapped as a channel-divergence result
/// with the input-optimization cross-check recorded in `certified_gap`.
pub fn geometric_channel_fidelity(
    n: &Channel,
    m: &Channel,
    cfg: &InputOptConfig,
) -> Result<ChannelDivergenceResult> {
    channel_fidelity(FidelityKind::Geometric, n, m, cfg)
}

/// Raw SDP access (quantum representations only).
pub fn geometric_fidelity_sdp_raw(
    n: &QuantumChannel,
    m: &QuantumChannel,
    choi_cap: usize,
) -> Result<SdpFidelity> {
    sdp_fidelity(n, m, choi_cap)
}

// ---------------------------------------------------------------------------
// C_s and channel Q_s / Q̂_s
// ---------------------------------------------------------------------------

/// `C_s(N‖M) = −ln inf_ρ Tr[N(ρ)^s M(ρ)^{1−s}]` for `s ∈ [0,1]`.
///
/// Classical/CQ channels use the exact closed form. General channels use
/// input optimization; because the restricted infimum over-approximates the
/// true one, the reported `C_s` is a LOWER bound on the true value.
pub fn c_s_channel(
    n: &Channel,
    m: &Channel,
    s: f64,
    cfg: &InputOptConfig,
) -> Result<ChannelDivergenceResult> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("C_s requires s in [0,1], got {s}")));
    }
    let q = q_s_channel(RenyiKind::Petz, s, n, m, cfg)?;
    let value = if q.value <= 0.0 {
        f64::INFINITY
    } else {
        (-q.value.ln()).max(0.0)
    };
    Ok(ChannelDivergenceResult { value, ..q })
}

/// Channel overlap `Q_s(N‖M) = inf_ρ Q_s(N(ρ)‖M(ρ))` (kind `Petz`) or
/// `Q̂_s(N‖M)` (kind `Geometric`), for `s ∈ [0,1]`.
pub fn q_s_channel(
    kind: RenyiKind,
    s: f64,
    n: &Channel,
    m: &Channel,
    cfg: &InputOptConfig,
) -> Result<ChannelDivergenceResult> {
    if kind == RenyiKind::Sandwiched {
        return Err(Error::Domain(
            "channel Q_s is defined for the Petz and geometric kinds".into(),
        ));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("Q_s requires s in [0,1], got {s}")));
    }
    let state_q = |a: &DensityMatrix, b: &DensityMatrix| -> Result<f64> {
        match kind {
            RenyiKind::Petz => petz_q(s, a, b),
            RenyiKind::Geometric => geometric_q(s, a, b),
            RenyiKind::Sandwiched => unreachable!(),
        }
    };
    let smoothed_q = move |a: &DensityMatrix, b: &DensityMatrix| -> f64 {
        match kind {
            RenyiKind::Petz => crate::divergence::smoothed::petz_q(s, a, b),
            RenyiKind::Geometric => crate::divergence::smoothed::geometric_q(s, a, b),
            RenyiKind::Sandwiched => unreachable!(),
        }
    };
    match (n, m) {
        (Channel::Classical(nc), Channel::Classical(mc)) => {
            if nc.n_in != mc.n_in || nc.n_out != mc.n_out {
                return Err(Error::dim_mismatch("q_s_channel", nc.n_in, mc.n_in));
            }
            // Q_s and Q̂_s coincide on commuting outputs
            let (x, value) = (0..nc.n_in)
                .map(|x| (x, classical_q_s(s, nc.row(x), mc.row(x))))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty alphabet");
            Ok(ChannelDivergenceResult::exact(
                value,
                OptimizerInput::Symbol(x),
                DivergenceMethod::ClassicalClosedForm,
            ))
        }
        (Channel::Cq(ncq), Channel::Cq(mcq)) => {
            if ncq.n_in != mcq.n_in {
                return Err(Error::dim_mismatch(
                    "q_s_channel alphabet",
                    ncq.n_in,
                    mcq.n_in,
                ));
            }
            let mut best = (0usize, f64::INFINITY);
            for x in 0..ncq.n_in {
                let v = state_q(ncq.output(x), mcq.output(x))?;
                if v < best.1 {
                    best = (x, v);
                }
            }
            Ok(ChannelDivergenceResult::exact(
                best.1,
                OptimizerInput::Symbol(best.0),
                DivergenceMethod::CqClosedForm,
            ))
        }
        _ => {
            let nq = n.to_quantum();
            let mq = m.to_quantum();
            let (value, state, converged) =
                optimize_channel_objective(&nq, &mq, smoothed_q, false, cfg)?;
            Ok(ChannelDivergenceResult {
                value,
                optimizer_input: OptimizerInput::State(state),
                method: DivergenceMethod::InputOptimization,
                direction: ValueDirection::UpperBoundsTruth,
                certified_gap: None,
                converged,
            })
        }
    }
}

/// Channel Rényi divergence `D(N‖M) = sup_ρ D(N(ρ)‖M(ρ))` for the requested
/// family and order.
///
/// For general channels the restricted supremum under-approximates the true
/// one, so the reported value is a lower bound on the channel divergence.
pub fn channel_renyi(
    kind: RenyiKind,
    alpha: f64,
    n: &Channel,
    m: &Channel,
    cfg: &InputOptConfig,
) -> Result<ChannelDivergenceResult> {
    if alpha <= 0.0 || alpha.is_nan() || alpha == 1.0 {
        return Err(Error::Domain(format!(
            "Rényi order must lie in (0,1) ∪ (1,∞), got {alpha}"
        )));
    }
    match (n, m) {
        (Channel::Classical(nc), Channel::Classical(mc)) => {
            if nc.n_in != mc.n_in || nc.n_out != mc.n_out {
                return Err(Error::dim_mismatch("channel_renyi", nc.n_in, mc.n_in));
            }
            let (x, value) = (0..nc.n_in)
                .map(|x| (x, classical_renyi(alpha, nc.row(x), mc.row(x))))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .expect("nonempty alphabet");
            Ok(ChannelDivergenceResult::exact(
                value,
                OptimizerInput::Symbol(x),
                DivergenceMethod::ClassicalClosedForm,
            ))
        }
        (Channel::Cq(ncq), Channel::Cq(mcq)) => {
            if ncq.n_in != mcq.n_in {
                return Err(Error::dim_mismatch(
                    "channel_renyi alphabet",
                    ncq.n_in,
                    mcq.n_in,
                ));
            }
            let mut best = (0usize, f64::NEG_INFINITY);
            for x in 0..ncq.n_in {
                let v = renyi(kind, alpha, ncq.output(x), mcq.output(x))?.value();
                if v > best.1 {
                    best = (x, v);
                }
            }
            Ok(ChannelDivergenceResult::exact(
                best.1,
                OptimizerInput::Symbol(best.0),
                DivergenceMethod::CqClosedForm,
            ))
        }
        _ => {
            let nq = n.to_quantum();
            let mq = m.to_quantum();
            let (value, state, converged) = optimize_channel_objective(
                &nq,
                &mq,
                move |a, b| crate::divergence::smoothed::renyi(kind, alpha, a, b),
                true,
                cfg,
            )?;
            Ok(ChannelDivergenceResult {
                value,
                optimizer_input: OptimizerInput::State(state),
                method: DivergenceMethod::InputOptimization,
                direction: ValueDirection::LowerBoundsTruth,
                certified_gap: None,
                converged,
            })
        }
    }
}

/// Amortized Holevo channel fidelity. For CQ channels this equals
/// `min_x F_H(ω_x, ν_x)`; for other channels the amortized quantity is out of
/// scope and `None` ("not computed") is returned.
pub fn amortized_holevo_fidelity(
    n: &Channel,
    m: &Channel,
) -> Result<Option<ChannelDivergenceResult>> {
    match (n, m) {
        (Channel::Cq(ncq), Channel::Cq(mcq)) => {
            Ok(Some(channel_fidelity_cq(FidelityKind::Holevo, ncq, mcq)?))
        }
        _ => Ok(None),
    }
}
