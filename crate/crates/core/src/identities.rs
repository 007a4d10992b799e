//! Randomized checks of the exact pointwise identities that tie the classical
//! and ψ-calculi together:
//!
//! - `f·Γ^√(f) = Γ(√f)` and `f·Γ₂^√(f) = Γ̃₂(√f)`;
//! - `R_CDE'(d,K)(√g)(v) = g(v)·R_{CD^log_√(4d,K)}(g)(v)`;
//! - the heat-equation identity (see [`crate::gamma::heat_identity_residual`]);
//! - invariance of the ψ-operators under `f ↦ cf`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cd::{nonlinear_residual, ConditionSpec, Dimension};
use crate::error::Result;
use crate::gamma::{gamma, gamma2_tilde, heat_identity_residual};
use crate::graph::{Graph, VertexFunction};
use crate::json::{reals, Real};
use crate::psi::{psi_gamma, psi_gamma2, psi_laplacian, psi_omega, PsiFunction};

pub const LEMMA_TOLERANCE: f64 = 1e-9;
pub const PCC_TOLERANCE: f64 = 1e-9;
pub const HEAT_TOLERANCE: f64 = 1e-12;
/// Relative to `1 + |value|`.
pub const SCALE_TOLERANCE: f64 = 1e-12;

pub const PCC_DIMENSIONS: [f64; 3] = [1.0, 2.0, 10.0];
pub const PCC_KAPPAS: [f64; 3] = [-1.0, 0.0, 1.0];

/// Draws `f = exp(uniform[-3, 3])` on every vertex.
pub fn random_positive(rng: &mut impl Rng, n: usize) -> VertexFunction {
    VertexFunction::new((0..n).map(|_| rng.random_range(-3.0..=3.0f64).exp()).collect())
}

/// Worst deviation seen by one check, with the function that produced it.
#[derive(Debug, Clone, Default)]
pub struct Worst {
    pub error: f64,
    pub vertex: usize,
    pub function: Option<Vec<f64>>,
}

impl Worst {
    fn record(&mut self, error: f64, vertex: usize, f: &[f64]) {
        if error > self.error || error.is_nan() {
            *self = Worst { error, vertex, function: Some(f.to_vec()) };
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub tolerance: f64,
    pub worst: Worst,
}

impl SuiteCheck {
    pub fn passed(&self) -> bool {
        self.worst.error < self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
}

#[derive(Serialize)]
struct ReportDocument {
    trials: usize,
    seed: u64,
    passed: bool,
    checks: Vec<CheckDocument>,
}

#[derive(Serialize)]
struct CheckDocument {
    name: &'static str,
    max_error: Real,
    tolerance: Real,
    passed: bool,
    vertex: usize,
    witness: Option<Vec<Real>>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(SuiteCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&SuiteCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.document()).expect("report serializes")
    }

    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("report serializes")
    }

    fn document(&self) -> ReportDocument {
        let checks = self
            .checks
            .iter()
            .map(|c| CheckDocument {
                name: c.name,
                max_error: Real(c.worst.error),
                tolerance: Real(c.tolerance),
                passed: c.passed(),
                vertex: c.worst.vertex,
                // witnesses are only attached to failures
                witness: (!c.passed()).then(|| c.worst.function.as_deref().map(reals)).flatten(),
            })
            .collect();
        ReportDocument { trials: self.trials, seed: self.seed, passed: self.passed(), checks }
    }
}

/// Runs every identity at every vertex for `trials` random positive functions.
pub fn run_suite(g: &Graph, trials: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sqrt = PsiFunction::sqrt();
    let log = PsiFunction::log();
    let n = g.vertex_count();
    let mut lemma_gamma = Worst::default();
    let mut lemma_gamma2 = Worst::default();
    let mut pcc = Worst::default();
    let mut heat = Worst::default();
    let mut scale = Worst::default();

    let specs: Vec<(ConditionSpec, ConditionSpec)> = PCC_DIMENSIONS
        .iter()
        .flat_map(|&d| PCC_KAPPAS.iter().map(move |&k| (d, k)))
        .map(|(d, k)| {
            let dim = Dimension::new(d)?;
            Ok((
                ConditionSpec::cde_prime(dim, k)?,
                ConditionSpec::cd_phi_psi(sqrt.clone(), log.clone(), dim.scaled(4.0)?, k)?,
            ))
        })
        .collect::<Result<_>>()?;

    for _ in 0..trials {
        let f = random_positive(&mut rng, n);
        let root = f.map(f64::sqrt);
        let c = rng.random_range(0.1..=10.0f64);
        let scaled = f.map(|x| c * x);
        for v in 0..n {
            let lhs = f[v] * psi_gamma(g, &sqrt, &f, v)?;
            lemma_gamma.record((lhs - gamma(g, &root, &root, v)?).abs(), v, &f);
            let lhs2 = f[v] * psi_gamma2(g, &sqrt, &f, v)?;
            lemma_gamma2.record((lhs2 - gamma2_tilde(g, &root, v)?).abs(), v, &f);

            for (cde, cdpp) in &specs {
                let r_cde = nonlinear_residual(g, cde, &root, v)?.value().unwrap_or(f64::NAN);
                let r_cdpp = nonlinear_residual(g, cdpp, &f, v)?.value().unwrap_or(f64::NAN);
                pcc.record((r_cde - f[v] * r_cdpp).abs(), v, &f);
            }

            heat.record(heat_identity_residual(g, &f, v)?.abs(), v, &f);

            for psi in [&sqrt, &log] {
                let pairs = [
                    (psi_laplacian(g, psi, &f, v)?, psi_laplacian(g, psi, &scaled, v)?),
                    (psi_gamma(g, psi, &f, v)?, psi_gamma(g, psi, &scaled, v)?),
                    (psi_omega(g, psi, &f, v)?, psi_omega(g, psi, &scaled, v)?),
                    (psi_gamma2(g, psi, &f, v)?, psi_gamma2(g, psi, &scaled, v)?),
                ];
                for (a, b) in pairs {
                    scale.record((a - b).abs() / (1.0 + a.abs()), v, &f);
                }
            }
        }
    }

    let check = |name, tolerance, worst| SuiteCheck { name, tolerance, worst };
    Ok(IdentityReport {
        trials,
        seed,
        checks: vec![
            check("lemma-gamma", LEMMA_TOLERANCE, lemma_gamma),
            check("lemma-gamma2", LEMMA_TOLERANCE, lemma_gamma2),
            check("pcc", PCC_TOLERANCE, pcc),
            check("heat", HEAT_TOLERANCE, heat),
            check("scale-invariance", SCALE_TOLERANCE, scale),
        ],
    })
}
