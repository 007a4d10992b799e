//! Curvature-dimension calculus on finite graphs.
//!
//! - [`graph`]: graphs, generators, vertex functions and their JSON documents.
//! - [`gamma`]: `Δ`, `Γ`, `Γ₂`, `Γ̃₂` and the heat-equation identity.
//! - [`psi`]: the ψ-operators `Δ^ψ`, `Γ^ψ`, `Ω^ψ`, `Γ₂^ψ` and limit probes.
//! - [`cd`]: exact `CD(d, K)` curvature and searches for `CDE`, `CDE'`,
//!   `CDψ`, `CD_ψ^φ` violations.
//! - [`ricci`]: D-Ricci-flat certificates.
//! - [`constants`]: `ψ̃` and numerical estimates of `C_ψ^φ`.
//! - [`identities`]: randomized checks of the exact identities between the
//!   two calculi.

pub mod cd;
pub mod constants;
pub mod error;
pub mod gamma;
pub mod graph;
pub mod identities;
pub mod json;
pub mod optimize;
pub mod psi;
pub mod ricci;

pub use cd::{
    cd_curvature_exact, cd_verify, implication_check, nonlinear_curvature_search, nonlinear_residual, search_report,
    ConditionKind, ConditionSpec, CurvatureReport, Dimension, Residual, SearchConfig, Verdict,
};
pub use constants::{cd_constant, psi_tilde, sqrt_log_bound_check, ConstantConfig, ConstantEstimate, Location};
pub use error::{Error, Result};
pub use gamma::{gamma, gamma2, gamma2_tilde, heat_identity_residual, laplacian};
pub use graph::{Family, GeneratorSpec, Graph, VertexFunction};
pub use psi::{limit_probe, psi_bar, psi_gamma, psi_gamma2, psi_laplacian, psi_omega, LimitOperator, LimitProbeResult, PsiFunction};
pub use ricci::{dimension_from_constant, ricci_flat, ricci_flat_at, RicciFlatCertificate, RicciFlatOutcome};
