//! Curvature-dimension conditions at a vertex.
//!
//! `CD(d, K)` is quadratic in `f`, so the optimal `K` at a vertex is the
//! smallest eigenvalue of a symmetric pencil and is computed exactly. The
//! nonlinear conditions (`CDE`, `CDE'`, `CDψ`, `CD_ψ^φ`) are falsified by a
//! seeded multistart search over positive functions on the 2-ball; a search
//! that finds nothing reports "not falsified", never "holds".
//!
//! Every condition has the shape `curvature ≥ (1/d)·dimension + K·gradient`
//! with `gradient ≥ 0`, and the residual is `curvature - dimension/d - K·gradient`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::raw as classical;
use crate::graph::{require_positive, Graph, VertexFunction};
use crate::json::Real;
use crate::optimize::{coordinate_polish, nelder_mead, Bounds, NelderMeadOptions};
use crate::psi::{raw as psi_raw, PsiFunction};

/// Dimension parameter `d ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimension(f64);

impl Dimension {
    pub const INFINITE: Dimension = Dimension(f64::INFINITY);

    pub fn new(d: f64) -> Result<Self> {
        if d > 0.0 {
            Ok(Dimension(d))
        } else {
            Err(Error::InvalidDimension(d))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/d`, exactly zero for `d = ∞`.
    pub fn inverse(self) -> f64 {
        if self.is_infinite() { 0.0 } else { 1.0 / self.0 }
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        Dimension::new(self.0 * factor)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() { f.write_str("inf") } else { write!(f, "{}", self.0) }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Dimension::INFINITE),
            _ => {
                let d: f64 = s.parse().map_err(|_| Error::InvalidArgument(format!("bad dimension `{s}`")))?;
                Dimension::new(d)
            }
        }
    }
}

impl Serialize for Dimension {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        Real(self.0).serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    Cd,
    Cde,
    CdePrime,
    CdPsi,
    CdPhiPsi,
}

impl ConditionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::Cd => "cd",
            ConditionKind::Cde => "cde",
            ConditionKind::CdePrime => "cde-prime",
            ConditionKind::CdPsi => "cdpsi",
            ConditionKind::CdPhiPsi => "cdphipsi",
        }
    }
}

impl FromStr for ConditionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ConditionKind::Cd, ConditionKind::Cde, ConditionKind::CdePrime, ConditionKind::CdPsi, ConditionKind::CdPhiPsi]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidCondition(format!("unknown condition `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct ConditionSpec {
    pub kind: ConditionKind,
    pub psi: Option<PsiFunction>,
    pub phi: Option<PsiFunction>,
    pub dim: Dimension,
    pub kappa: f64,
}

impl ConditionSpec {
    pub fn new(
        kind: ConditionKind,
        psi: Option<PsiFunction>,
        phi: Option<PsiFunction>,
        dim: Dimension,
        kappa: f64,
    ) -> Result<Self> {
        let (needs_psi, needs_phi) = match kind {
            ConditionKind::CdPsi => (true, false),
            ConditionKind::CdPhiPsi => (true, true),
            _ => (false, false),
        };
        if needs_psi != psi.is_some() || needs_phi != phi.is_some() {
            return Err(Error::InvalidCondition(format!(
                "{} takes {} psi and {} phi",
                kind.name(),
                if needs_psi { "a" } else { "no" },
                if needs_phi { "a" } else { "no" }
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidCondition(format!("kappa must be finite, got {kappa}")));
        }
        Ok(ConditionSpec { kind, psi, phi, dim, kappa })
    }

    pub fn cd(dim: Dimension, kappa: f64) -> Result<Self> {
        ConditionSpec::new(ConditionKind::Cd, None, None, dim, kappa)
    }

    pub fn cde(dim: Dimension, kappa: f64) -> Result<Self> {
        ConditionSpec::new(ConditionKind::Cde, None, None, dim, kappa)
    }

    pub fn cde_prime(dim: Dimension, kappa: f64) -> Result<Self> {
        ConditionSpec::new(ConditionKind::CdePrime, None, None, dim, kappa)
    }

    pub fn cd_psi(psi: PsiFunction, dim: Dimension, kappa: f64) -> Result<Self> {
        ConditionSpec::new(ConditionKind::CdPsi, Some(psi), None, dim, kappa)
    }

    pub fn cd_phi_psi(psi: PsiFunction, phi: PsiFunction, dim: Dimension, kappa: f64) -> Result<Self> {
        ConditionSpec::new(ConditionKind::CdPhiPsi, Some(psi), Some(phi), dim, kappa)
    }

    /// Human-readable label, e.g. `cdphipsi[psi=sqrt,phi=log]`.
    pub fn label(&self) -> String {
        match (&self.psi, &self.phi) {
            (Some(psi), Some(phi)) => format!("{}[psi={},phi={}]", self.kind.name(), psi.name(), phi.name()),
            (Some(psi), None) => format!("{}[psi={}]", self.kind.name(), psi.name()),
            _ => self.kind.name().to_string(),
        }
    }
}

/// Left side minus right side of a condition at one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    Value(f64),
    /// `CDE` only constrains vertices with `Δf(v) < 0`.
    Skipped,
}

impl Residual {
    pub fn value(self) -> Option<f64> {
        match self {
            Residual::Value(x) => Some(x),
            Residual::Skipped => None,
        }
    }
}

/// The three ingredients of a condition at one vertex.
#[derive(Debug, Clone, Copy)]
struct Terms {
    curvature: f64,
    dimension: f64,
    gradient: f64,
}

impl Terms {
    #[inline]
    fn residual(&self, inv_d: f64, kappa: f64) -> f64 {
        self.curvature - inv_d * self.dimension - kappa * self.gradient
    }
}

/// `None` for CDE at a vertex where `Δf(v) ≥ 0`.
fn terms(g: &Graph, spec: &ConditionSpec, f: &[f64], v: usize) -> Option<Terms> {
    let t = match spec.kind {
        ConditionKind::Cd => {
            let lap = classical::laplacian(g, f, v);
            Terms { curvature: classical::gamma2(g, f, f, v), dimension: lap * lap, gradient: classical::gamma(g, f, f, v) }
        }
        ConditionKind::Cde => {
            let lap = classical::laplacian(g, f, v);
            if !(lap < 0.0) {
                return None;
            }
            Terms { curvature: classical::gamma2_tilde(g, f, v), dimension: lap * lap, gradient: classical::gamma(g, f, f, v) }
        }
        ConditionKind::CdePrime => {
            let log_v = f[v].ln();
            let lap_log: f64 = g.neighbors(v).iter().map(|&w| f[w].ln() - log_v).sum();
            Terms {
                curvature: classical::gamma2_tilde(g, f, v),
                dimension: (f[v] * lap_log).powi(2),
                gradient: classical::gamma(g, f, f, v),
            }
        }
        ConditionKind::CdPsi | ConditionKind::CdPhiPsi => {
            let psi = spec.psi.as_ref().expect("validated spec");
            let phi = spec.phi.as_ref().unwrap_or(psi);
            Terms {
                curvature: psi_raw::gamma2(g, psi, f, v),
                dimension: psi_raw::laplacian(g, phi, f, v).powi(2),
                gradient: psi_raw::gamma(g, psi, f, v),
            }
        }
    };
    Some(t)
}

/// Residual of `spec` at `v` for the function `f`. All kinds except `CD`
/// require `f > 0`.
pub fn nonlinear_residual(g: &Graph, spec: &ConditionSpec, f: &[f64], v: usize) -> Result<Residual> {
    g.check_vertex(v)?;
    g.check_function(f)?;
    if spec.kind != ConditionKind::Cd {
        require_positive(f)?;
    }
    Ok(match terms(g, spec, f, v) {
        Some(t) => Residual::Value(t.residual(spec.dim.inverse(), spec.kappa)),
        None => Residual::Skipped,
    })
}

// ---------------------------------------------------------------------------
// Exact CD(d, K)

/// Relative threshold below which a `B` eigenvalue counts as zero.
const KERNEL_TOLERANCE: f64 = 1e-10;
/// `CD(d, K)` holds at `v` when `K*(v, d) ≥ K - VERIFY_SLACK`.
const VERIFY_SLACK: f64 = 1e-10;

/// Result of the pencil computation at one vertex.
#[derive(Debug, Clone)]
pub struct ExactCurvature {
    /// `K*(v, d)`; `+∞` at an isolated vertex, `-∞` when the quadratic form is
    /// negative on `ker B`.
    pub kappa: f64,
    /// A function attaining `K*` (with `f(v) = 0`), when one exists.
    pub witness: Option<Vec<f64>>,
}

/// `K*(v, d) = sup { K : Γ₂(f)(v) ≥ (1/d)(Δf(v))² + KΓ(f)(v) for all f }`.
pub fn cd_curvature_exact(g: &Graph, d: Dimension, v: usize) -> Result<f64> {
    Ok(cd_curvature_exact_with_witness(g, d, v)?.kappa)
}

/// Builds the quadratic forms of `Γ₂`, `Γ` and `Δ` at `v` over the 2-ball
/// (with `f(v) = 0`), then takes the minimal eigenvalue of the pencil
/// `(A - ℓℓᵀ/d, B)` on the complement of `ker B` after eliminating `ker B`
/// by a Schur complement.
pub fn cd_curvature_exact_with_witness(g: &Graph, d: Dimension, v: usize) -> Result<ExactCurvature> {
    let ball = g.ball(v, 2)?;
    if g.degree(v) == 0 {
        return Ok(ExactCurvature { kappa: f64::INFINITY, witness: None });
    }
    let vars: Vec<usize> = ball.into_iter().filter(|&u| u != v).collect();
    let m = vars.len();
    let n = g.vertex_count();
    let unit = |i: usize| {
        let mut e = vec![0.0; n];
        e[vars[i]] = 1.0;
        e
    };
    let units: Vec<Vec<f64>> = (0..m).map(unit).collect();

    let inv_d = d.inverse();
    let ell = DVector::from_iterator(m, units.iter().map(|e| classical::laplacian(g, e, v)));
    let mut form = DMatrix::zeros(m, m);
    let mut metric = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let a = classical::gamma2(g, &units[i], &units[j], v) - inv_d * ell[i] * ell[j];
            let b = classical::gamma(g, &units[i], &units[j], v);
            form[(i, j)] = a;
            form[(j, i)] = a;
            metric[(i, j)] = b;
            metric[(j, i)] = b;
        }
    }

    let embed = |x: &DVector<f64>| {
        let mut f = vec![0.0; n];
        for (i, &u) in vars.iter().enumerate() {
            f[u] = x[i];
        }
        f
    };

    let metric_eig = SymmetricEigen::new(metric);
    let lambda_max = metric_eig.eigenvalues.max();
    let threshold = KERNEL_TOLERANCE * lambda_max;
    let range: Vec<usize> = (0..m).filter(|&k| metric_eig.eigenvalues[k] > threshold).collect();
    let kernel: Vec<usize> = (0..m).filter(|&k| metric_eig.eigenvalues[k] <= threshold).collect();

    // columns scaled so that the metric becomes the identity on the range
    let r_basis = DMatrix::from_columns(
        &range
            .iter()
            .map(|&k| metric_eig.eigenvectors.column(k) / metric_eig.eigenvalues[k].sqrt())
            .collect::<Vec<_>>(),
    );
    let m_rr = r_basis.transpose() * &form * &r_basis;
    if kernel.is_empty() {
        let schur_eig = SymmetricEigen::new(m_rr);
        let (idx, kappa) = argmin(schur_eig.eigenvalues.as_slice());
        let x = &r_basis * schur_eig.eigenvectors.column(idx);
        return Ok(ExactCurvature { kappa, witness: Some(embed(&x)) });
    }

    let k_basis = DMatrix::from_columns(&kernel.iter().map(|&k| metric_eig.eigenvectors.column(k)).collect::<Vec<_>>());
    let m_kk = k_basis.transpose() * &form * &k_basis;
    let m_kr = k_basis.transpose() * &form * &r_basis;
    let kk_eig = SymmetricEigen::new(m_kk);
    let (neg_idx, kk_min) = argmin(kk_eig.eigenvalues.as_slice());
    if kk_min < -KERNEL_TOLERANCE {
        let x = &k_basis * kk_eig.eigenvectors.column(neg_idx);
        return Ok(ExactCurvature { kappa: f64::NEG_INFINITY, witness: Some(embed(&x)) });
    }

    // pseudo-inverse of M_KK through its eigen-decomposition
    let scale = kk_eig.eigenvalues.amax().max(1.0);
    let mut pinv = DMatrix::zeros(kernel.len(), kernel.len());
    for (k, &mu) in kk_eig.eigenvalues.iter().enumerate() {
        let q = kk_eig.eigenvectors.column(k);
        if mu > KERNEL_TOLERANCE * scale {
            pinv += (&q * q.transpose()) / mu;
        } else if (q.transpose() * &m_kr).amax() > KERNEL_TOLERANCE * scale {
            // the form is unbounded below on a direction with Γ(f)(v) > 0
            let y = m_kr.transpose() * q;
            let x = &r_basis * &y;
            return Ok(ExactCurvature { kappa: f64::NEG_INFINITY, witness: Some(embed(&x)) });
        }
    }
    let schur = &m_rr - m_kr.transpose() * &pinv * &m_kr;
    let schur = (&schur + schur.transpose()) * 0.5;
    let schur_eig = SymmetricEigen::new(schur);
    let (idx, kappa) = argmin(schur_eig.eigenvalues.as_slice());
    let y = schur_eig.eigenvectors.column(idx).into_owned();
    let z = -(&pinv * &m_kr * &y);
    let x = &r_basis * &y + &k_basis * z;
    Ok(ExactCurvature { kappa, witness: Some(embed(&x)) })
}

fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty")
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "violated")]
    Violated,
    #[serde(rename = "not falsified")]
    NotFalsified,
    #[serde(rename = "skipped")]
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotFalsified => "not falsified",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone)]
pub struct VertexReport {
    pub v: usize,
    pub verdict: Verdict,
    /// Largest `K` certified (exact CD) or not falsified (search) at the
    /// given dimension.
    pub best_kappa: f64,
    /// Residual at the witness; NaN when there is none.
    pub residual: f64,
    pub witness: Option<VertexFunction>,
    /// The search witness touches the box `|u| = box_half_width`.
    pub boundary_hit: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub condition: String,
    pub dim: Dimension,
    pub kappa: f64,
    pub vertices: Vec<VertexReport>,
    pub verdict: Verdict,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub evaluations: usize,
}

#[derive(Serialize)]
struct VertexDocument {
    v: usize,
    verdict: Verdict,
    best_kappa: Real,
    residual: Option<Real>,
    witness: Option<Vec<Real>>,
    boundary_hit: bool,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    condition: &'a str,
    dim: Dimension,
    kappa: Real,
    verdict: Verdict,
    vertices: Vec<VertexDocument>,
    seed: Option<u64>,
    starts: Option<usize>,
    evaluations: usize,
}

impl CurvatureReport {
    pub fn from_vertices(condition: String, dim: Dimension, kappa: f64, vertices: Vec<VertexReport>, config: Option<&SearchConfig>) -> Self {
        let verdict = if vertices.iter().any(|r| r.verdict == Verdict::Violated) {
            Verdict::Violated
        } else if vertices.iter().all(|r| r.verdict == Verdict::Holds) {
            Verdict::Holds
        } else if vertices.iter().all(|r| r.verdict == Verdict::Skipped) {
            Verdict::Skipped
        } else {
            Verdict::NotFalsified
        };
        let evaluations = vertices.iter().map(|r| r.evaluations).sum();
        CurvatureReport {
            condition,
            dim,
            kappa,
            vertices,
            verdict,
            seed: config.map(|c| c.seed),
            starts: config.map(|c| c.starts),
            evaluations,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.document()).expect("report serializes")
    }

    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("report serializes")
    }

    fn document(&self) -> ReportDocument<'_> {
        ReportDocument {
            condition: &self.condition,
            dim: self.dim,
            kappa: Real(self.kappa),
            verdict: self.verdict,
            vertices: self
                .vertices
                .iter()
                .map(|r| VertexDocument {
                    v: r.v,
                    verdict: r.verdict,
                    best_kappa: Real(r.best_kappa),
                    residual: (!r.residual.is_nan()).then_some(Real(r.residual)),
                    witness: r.witness.as_ref().map(VertexFunction::to_reals),
                    boundary_hit: r.boundary_hit,
                })
                .collect(),
            seed: self.seed,
            starts: self.starts,
            evaluations: self.evaluations,
        }
    }
}

/// Exact `CD(d, κ)` verdict at every vertex. Violations carry the eigenvector
/// witness, whose residual is `(K* - κ)Γ(f)(v) < 0`.
pub fn cd_verify(g: &Graph, d: Dimension, kappa: f64) -> Result<CurvatureReport> {
    let spec = ConditionSpec::cd(d, kappa)?;
    let vertices = (0..g.vertex_count())
        .map(|v| cd_verify_at(g, &spec, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureReport::from_vertices(spec.label(), d, kappa, vertices, None))
}

pub fn cd_verify_at(g: &Graph, spec: &ConditionSpec, v: usize) -> Result<VertexReport> {
    let exact = cd_curvature_exact_with_witness(g, spec.dim, v)?;
    let holds = exact.kappa >= spec.kappa - VERIFY_SLACK;
    let (witness, residual) = match (&exact.witness, holds) {
        (Some(w), false) => {
            let r = nonlinear_residual(g, spec, w, v)?.value().unwrap_or(f64::NAN);
            (Some(VertexFunction::new(w.clone())), r)
        }
        _ => (None, f64::NAN),
    };
    Ok(VertexReport {
        v,
        verdict: if holds { Verdict::Holds } else { Verdict::Violated },
        best_kappa: exact.kappa,
        residual,
        witness,
        boundary_hit: false,
        evaluations: 0,
    })
}

// ---------------------------------------------------------------------------
// Multistart search for the nonlinear conditions

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub seed: u64,
    pub starts: usize,
    /// Nelder-Mead evaluation cap per start.
    pub max_evals: usize,
    /// Compass-search evaluation cap per start.
    pub polish_evals: usize,
    /// Coordinates of `u = log f` are confined to `[-box, box]`.
    pub box_half_width: f64,
    /// Starting points are drawn from `uniform[-w, w]`.
    pub start_half_width: f64,
    /// Reported `best_kappa` is clamped to this interval.
    pub kappa_bracket: (f64, f64),
}

impl SearchConfig {
    pub fn new(seed: u64) -> Self {
        SearchConfig {
            seed,
            starts: 200,
            max_evals: 3000,
            polish_evals: 2000,
            box_half_width: 12.0,
            start_half_width: 2.0,
            kappa_bracket: (-100.0, 100.0),
        }
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.starts == 0 {
            return bad("starts must be positive");
        }
        if self.max_evals == 0 {
            return bad("max_evals must be positive");
        }
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return bad("box half-width must be positive and finite");
        }
        if !(self.start_half_width > 0.0 && self.start_half_width <= self.box_half_width) {
            return bad("start half-width must lie in (0, box half-width]");
        }
        if !(self.kappa_bracket.0 < self.kappa_bracket.1) {
            return bad("kappa bracket must be a non-empty interval");
        }
        Ok(())
    }
}

/// Ratios are ignored where `gradient < GRADIENT_FLOOR * (1 + max f²)`;
/// closer to constant functions rounding dominates the quotient.
const GRADIENT_FLOOR: f64 = 1e-8;
/// A witness only counts as a violation when its ratio is below `κ` by this much.
const VIOLATION_MARGIN: f64 = 1e-8;
/// Redraws allowed when a CDE start lands on `Δf(v) ≥ 0`.
const FEASIBLE_DRAWS: usize = 100;

struct Ratio<'a> {
    g: &'a Graph,
    spec: &'a ConditionSpec,
    v: usize,
    vars: Vec<usize>,
    inv_d: f64,
}

impl Ratio<'_> {
    fn function(&self, u: &[f64]) -> Vec<f64> {
        let mut f = vec![1.0; self.g.vertex_count()];
        for (&w, &ui) in self.vars.iter().zip(u) {
            f[w] = ui.exp();
        }
        f
    }

    /// `(curvature - dimension/d) / gradient` at `f = exp(u)`, or `+∞` where
    /// undefined.
    fn eval(&self, u: &[f64]) -> f64 {
        let f = self.function(u);
        let Some(t) = terms(self.g, self.spec, &f, self.v) else {
            return f64::INFINITY;
        };
        let fmax = self.vars.iter().map(|&w| f[w]).fold(1.0, f64::max);
        if !(t.gradient > GRADIENT_FLOOR * (1.0 + fmax * fmax)) {
            return f64::INFINITY;
        }
        let q = t.residual(self.inv_d, 0.0) / t.gradient;
        if q.is_nan() { f64::INFINITY } else { q }
    }
}

fn start_rng(seed: u64, v: usize, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((v as u64) << 32) | start as u64);
    rng
}

/// Searches for a positive `f` violating `spec` at `v`.
///
/// `f = exp(u)` on the 2-ball of `v` with `u(v) = 0` and `f = 1` elsewhere.
/// Since every residual is linear in `K` with a nonnegative coefficient, the
/// search minimizes `(curvature - dimension/d) / gradient`; the minimum found
/// is the largest `K` with no violation among the visited functions.
pub fn nonlinear_curvature_search(g: &Graph, spec: &ConditionSpec, v: usize, config: &SearchConfig) -> Result<VertexReport> {
    config.validate()?;
    let ball = g.ball(v, 2)?;
    let vars: Vec<usize> = ball.into_iter().filter(|&u| u != v).collect();
    let ratio = Ratio { g, spec, v, vars, inv_d: spec.dim.inverse() };
    let m = ratio.vars.len();
    let bounds = Bounds { lo: -config.box_half_width, hi: config.box_half_width };
    let nm = NelderMeadOptions { initial_step: 0.5, max_evals: config.max_evals, ..Default::default() };

    let runs: Vec<Option<(f64, Vec<f64>, usize)>> = (0..config.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = start_rng(config.seed, v, s);
            let w = config.start_half_width;
            let mut draws = 0;
            let (u0, q0) = loop {
                let u: Vec<f64> = (0..m).map(|_| rng.random_range(-w..=w)).collect();
                let q = ratio.eval(&u);
                draws += 1;
                if q.is_finite() || draws >= FEASIBLE_DRAWS {
                    break (u, q);
                }
            };
            if !q0.is_finite() {
                return None;
            }
            let local = nelder_mead(|u: &[f64]| ratio.eval(u), &u0, bounds, &nm);
            let polished = coordinate_polish(|u: &[f64]| ratio.eval(u), local, bounds, 1e-2, 1e-9, config.polish_evals);
            Some((polished.value, polished.x, polished.evals + draws))
        })
        .collect();

    let evaluations = runs.iter().flatten().map(|r| r.2).sum();
    // first start wins ties, so the choice does not depend on scheduling
    let best = runs
        .into_iter()
        .flatten()
        .filter(|r| r.0.is_finite())
        .reduce(|a, b| if b.0 < a.0 { b } else { a });

    let (lo, hi) = config.kappa_bracket;
    let Some((q_best, u_best, _)) = best else {
        let verdict = if spec.kind == ConditionKind::Cde { Verdict::Skipped } else { Verdict::NotFalsified };
        return Ok(VertexReport {
            v,
            verdict,
            best_kappa: hi,
            residual: f64::NAN,
            witness: None,
            boundary_hit: false,
            evaluations,
        });
    };

    let mut f = ratio.function(&u_best);
    // CDE and CDE' are homogeneous of degree 2 in f, so the witness is
    // rescaled to unit gradient; the residual then equals ratio - κ instead of
    // carrying the rounding error of huge f².
    if matches!(spec.kind, ConditionKind::Cde | ConditionKind::CdePrime) {
        if let Some(t) = terms(g, spec, &f, v) {
            let c = t.gradient.sqrt().recip();
            f.iter_mut().for_each(|x| *x *= c);
        }
    }
    let residual = nonlinear_residual(g, spec, &f, v)?.value().unwrap_or(f64::NAN);
    let violated = q_best < spec.kappa - VIOLATION_MARGIN && residual < 0.0;
    let boundary_hit = u_best.iter().any(|x| x.abs() >= config.box_half_width - 1e-9);
    Ok(VertexReport {
        v,
        verdict: if violated { Verdict::Violated } else { Verdict::NotFalsified },
        best_kappa: q_best.clamp(lo, hi),
        residual,
        witness: Some(VertexFunction::new(f)),
        boundary_hit,
        evaluations,
    })
}

/// Runs [`nonlinear_curvature_search`] at every vertex, in vertex order.
pub fn search_report(g: &Graph, spec: &ConditionSpec, config: &SearchConfig) -> Result<CurvatureReport> {
    let vertices = (0..g.vertex_count())
        .map(|v| nonlinear_curvature_search(g, spec, v, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureReport::from_vertices(spec.label(), spec.dim, spec.kappa, vertices, Some(config)))
}

// ---------------------------------------------------------------------------
// CD_ψ^φ(d, K) ⇒ CD(-ψ''(1)/φ'(1)² · d, K)

#[derive(Debug, Clone)]
pub struct ImplicationVertex {
    pub v: usize,
    pub exact_kappa: f64,
    pub cd_verdict: Verdict,
    pub search_verdict: Verdict,
    pub search_best_kappa: f64,
    /// Search could not falsify `CD_ψ^φ` yet `CD` fails exactly. Impossible
    /// if the search were exhaustive; a hit points at an implementation bug
    /// or an unlucky search.
    pub contradiction: bool,
}

#[derive(Debug, Clone)]
pub struct ImplicationReport {
    pub psi: String,
    pub phi: String,
    pub dim: Dimension,
    pub implied_dim: Dimension,
    pub kappa: f64,
    pub vertices: Vec<ImplicationVertex>,
}

impl ImplicationReport {
    pub fn has_contradiction(&self) -> bool {
        self.vertices.iter().any(|v| v.contradiction)
    }
}

/// The dimension `d' = -ψ''(1)/φ'(1)² · d` in the implied `CD(d', K)`.
pub fn implied_dimension(psi: &PsiFunction, phi: &PsiFunction, d: Dimension) -> Result<Dimension> {
    let curvature = -psi.deriv2_at_one();
    let slope = phi.deriv1_at_one();
    if !(curvature > 0.0) || slope == 0.0 || !slope.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need psi''(1) < 0 and phi'(1) != 0, got psi''(1) = {}, phi'(1) = {slope}",
            psi.deriv2_at_one()
        )));
    }
    d.scaled(curvature / (slope * slope))
}

pub fn implication_check(
    g: &Graph,
    psi: &PsiFunction,
    phi: &PsiFunction,
    d: Dimension,
    kappa: f64,
    config: &SearchConfig,
) -> Result<ImplicationReport> {
    let implied_dim = implied_dimension(psi, phi, d)?;
    let exact = cd_verify(g, implied_dim, kappa)?;
    let spec = ConditionSpec::cd_phi_psi(psi.clone(), phi.clone(), d, kappa)?;
    let searched = search_report(g, &spec, config)?;
    let vertices = exact
        .vertices
        .iter()
        .zip(&searched.vertices)
        .map(|(e, s)| ImplicationVertex {
            v: e.v,
            exact_kappa: e.best_kappa,
            cd_verdict: e.verdict,
            search_verdict: s.verdict,
            search_best_kappa: s.best_kappa,
            contradiction: s.verdict == Verdict::NotFalsified && e.verdict == Verdict::Violated,
        })
        .collect();
    Ok(ImplicationReport {
        psi: psi.name().to_string(),
        phi: phi.name().to_string(),
        dim: d,
        implied_dim,
        kappa,
        vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: f64) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn dimension_parsing() {
        assert!(Dimension::from_str("inf").unwrap().is_infinite());
        assert_eq!(Dimension::from_str("2.5").unwrap().value(), 2.5);
        assert!(Dimension::from_str("0").is_err());
        assert!(Dimension::from_str("-1").is_err());
        assert!(Dimension::from_str("abc").is_err());
        assert_eq!(Dimension::INFINITE.inverse(), 0.0);
    }

    #[test]
    fn condition_spec_validation() {
        let d = dim(2.0);
        assert!(ConditionSpec::new(ConditionKind::CdPsi, None, None, d, 0.0).is_err());
        assert!(ConditionSpec::new(ConditionKind::CdPhiPsi, Some(PsiFunction::log()), None, d, 0.0).is_err());
        assert!(ConditionSpec::new(ConditionKind::Cde, Some(PsiFunction::log()), None, d, 0.0).is_err());
        assert!(ConditionSpec::cde_prime(d, f64::NAN).is_err());
        assert_eq!(
            ConditionSpec::cd_phi_psi(PsiFunction::sqrt(), PsiFunction::log(), d, 0.0).unwrap().label(),
            "cdphipsi[psi=sqrt,phi=log]"
        );
        assert_eq!("cde-prime".parse::<ConditionKind>().unwrap(), ConditionKind::CdePrime);
    }

    #[test]
    fn single_edge_exact_values() {
        let edge = Graph::path(2).unwrap();
        for v in 0..2 {
            assert!((cd_curvature_exact(&edge, Dimension::INFINITE, v).unwrap() - 2.0).abs() < 1e-12);
            assert!((cd_curvature_exact(&edge, dim(2.0), v).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_verify() {
        let edge = Graph::path(2).unwrap();
        assert_eq!(cd_verify(&edge, dim(2.0), 1.0).unwrap().verdict, Verdict::Holds);
        let report = cd_verify(&edge, dim(2.0), 1.1).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        for r in &report.vertices {
            assert!(r.residual < 0.0);
            assert!(r.witness.is_some());
        }
        assert_eq!(cd_verify(&edge, Dimension::INFINITE, -1e6).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn isolated_vertex_is_unconstrained() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(cd_curvature_exact(&g, Dimension::INFINITE, 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn residual_requires_positive_input() {
        let g = Graph::cycle(5).unwrap();
        let spec = ConditionSpec::cde_prime(dim(2.0), 0.0).unwrap();
        assert!(nonlinear_residual(&g, &spec, &[1.0, 2.0, 0.0, 1.0, 1.0], 0).is_err());
        let cd = ConditionSpec::cd(dim(2.0), 0.0).unwrap();
        assert!(nonlinear_residual(&g, &cd, &[1.0, -2.0, 0.0, 1.0, 1.0], 0).is_ok());
    }

    #[test]
    fn cde_skips_nonnegative_laplacian() {
        let g = Graph::cycle(5).unwrap();
        let spec = ConditionSpec::cde(dim(2.0), 0.0).unwrap();
        assert_eq!(nonlinear_residual(&g, &spec, &[1.0, 2.0, 1.0, 1.0, 1.0], 0).unwrap(), Residual::Skipped);
        assert!(nonlinear_residual(&g, &spec, &[3.0, 2.0, 1.0, 1.0, 1.0], 0).unwrap().value().is_some());
    }

    #[test]
    fn constant_cde_prime_residual_is_zero() {
        let g = Graph::hypercube(3).unwrap();
        let spec = ConditionSpec::cde_prime(dim(3.0), 1.0).unwrap();
        assert_eq!(nonlinear_residual(&g, &spec, &[2.0; 8], 5).unwrap(), Residual::Value(0.0));
    }

    #[test]
    fn search_config_validation() {
        assert!(SearchConfig::new(1).validate().is_ok());
        assert!(SearchConfig::new(1).with_starts(0).validate().is_err());
        let mut c = SearchConfig::new(1);
        c.start_half_width = 20.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn implied_dimension_bookkeeping() {
        let d = dim(4.0 * 2.265 * 2.0);
        let implied = implied_dimension(&PsiFunction::sqrt(), &PsiFunction::log(), d).unwrap();
        assert!((implied.value() - 2.265 * 2.0).abs() < 1e-12);
        let same = implied_dimension(&PsiFunction::log(), &PsiFunction::log(), dim(3.7)).unwrap();
        assert_eq!(same.value(), 3.7);
        assert!(implied_dimension(&PsiFunction::identity(), &PsiFunction::log(), d).is_err());
    }
}
