//! Core library for binary and M-ary channel discrimination analysis.
//!
//! The crate is organized in layers:
//!
//! * [`hermitian`] — dense complex Hermitian matrix utilities (eigendecomposition,
//!   fractional powers on the support, matrix geometric means, trace norm).
//! * [`channels`] — states and channels (quantum, classical, classical–quantum),
//!   Choi operators, tensor powers, seeded random instances, JSON (de)serialization.
//! * [`divergence`] — state-level divergences: trace distance, the three fidelities
//!   (Uhlmann, Holevo, geometric), the three Rényi families (Petz, sandwiched,
//!   geometric), relative entropy, and the Chernoff-type overlaps `Q_s` / `Q̂_s`.
//! * [`channel_divergence`] — channel-level divergences and fidelities:
//!   classical/CQ closed forms, heuristic input-state optimization for general
//!   channels, and an exact SDP for the geometric channel fidelity.
//! * [`sdp`] — the dense primal-dual interior-point solver behind the geometric
//!   channel fidelity, plus a JSON export of the program for external solvers.
//! * [`complexity`] — every sample- and query-complexity bound, the trivial-case
//!   classifier, and the symmetric/asymmetric conversions.
//! * [`oracle`] — exact desk-scale ground truth: Helstrom error, Neyman–Pearson
//!   `β_ε`, exact `n*` searches (quantum tensor powers and classical type classes),
//!   and the M-ary pretty-good-measurement error.

pub mod channel_divergence;
pub mod channels;
pub mod complexity;
pub mod divergence;
pub mod error;
pub mod hermitian;
pub mod oracle;
pub mod rng;
pub mod sdp;

pub use channel_divergence::{
    ChannelDivergenceResult, DivergenceMethod, InputOptConfig, ValueDirection,
};
pub use channels::{
    Channel, ChoiOperator, ClassicalChannel, CqChannel, DensityMatrix, QuantumChannel,
};
pub use complexity::{BoundReport, ErrorBudget, Priors, TrivialVerdict};
pub use divergence::{DivergenceValue, FidelityKind, RenyiKind};
pub use error::Error;
pub use hermitian::{HermitianMatrix, SpectralDecomposition};
pub use oracle::{OracleConfig, OracleResult};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
