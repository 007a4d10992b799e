//! D-Ricci-flatness at a vertex, decided by exhaustive backtracking over the
//! maps `η_1, …, η_D` on the closed neighborhood, and the conversion of a
//! curvature constant into dimension bounds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Hard cap on backtracking nodes per vertex.
pub const NODE_BUDGET: u64 = 100_000_000;

/// How the commutation clause compares `{η_k(η_i(v))}_k` with `{η_i(η_k(v))}_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommutationMode {
    /// Equality of sets.
    #[default]
    Set,
    /// Equality of multisets.
    Multiset,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RicciFlatCertificate {
    pub vertex: usize,
    pub degree: usize,
    /// `eta[w] = [η_1(w), …, η_D(w)]` for every `w` in the closed neighborhood.
    pub eta: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum RefutationReason {
    /// `w` in the closed neighborhood has degree different from `D = deg(v)`.
    DegreeMismatch { w: usize, degree: usize, expected: usize },
    /// The complete search space was explored without a certificate.
    ExhaustedSearch { nodes: u64 },
    /// The node budget ran out; the question is left open.
    BudgetExhausted { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub vertex: usize,
    pub reason: RefutationReason,
}

impl Refutation {
    /// True unless the search merely ran out of budget.
    pub fn is_conclusive(&self) -> bool {
        !matches!(self.reason, RefutationReason::BudgetExhausted { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RicciFlatOutcome {
    Certified(RicciFlatCertificate),
    Refuted(Refutation),
}

impl RicciFlatOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, RicciFlatOutcome::Certified(_))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RicciFlatOutcome::Certified(c) => c.to_json(),
            RicciFlatOutcome::Refuted(r) => {
                let mut doc = serde_json::to_value(&r.reason).expect("serializable");
                doc["v"] = r.vertex.into();
                doc
            }
        }
    }
}

impl RicciFlatCertificate {
    /// `{"v": i, "D": d, "eta": {"<w>": [n1, ..., nD], ...}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let eta: serde_json::Map<String, serde_json::Value> =
            self.eta.iter().map(|(w, row)| (w.to_string(), serde_json::json!(row))).collect();
        serde_json::json!({ "v": self.vertex, "D": self.degree, "eta": eta })
    }

    pub fn from_json(doc: &serde_json::Value) -> Result<Self> {
        #[derive(serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        struct CertificateDocument {
            v: usize,
            #[serde(rename = "D")]
            degree: usize,
            eta: BTreeMap<String, Vec<usize>>,
        }
        let raw: CertificateDocument = serde_json::from_value(doc.clone())?;
        let mut eta = BTreeMap::new();
        for (key, row) in raw.eta {
            let w = key
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("certificate key `{key}` is not a vertex index")))?;
            eta.insert(w, row);
        }
        Ok(RicciFlatCertificate { vertex: raw.v, degree: raw.degree, eta })
    }
}

/// Checks the three defining clauses literally. Returns a description of the
/// first clause that fails.
pub fn validate_certificate(g: &Graph, cert: &RicciFlatCertificate, mode: CommutationMode) -> std::result::Result<(), String> {
    let v = cert.vertex;
    if v >= g.vertex_count() {
        return Err(format!("vertex {v} out of range"));
    }
    let d = cert.degree;
    let mut closed: Vec<usize> = g.neighbors(v).to_vec();
    closed.push(v);
    closed.sort_unstable();
    let keys: Vec<usize> = cert.eta.keys().copied().collect();
    if keys != closed {
        return Err(format!("maps defined on {keys:?}, expected the closed neighborhood {closed:?}"));
    }
    for &w in &closed {
        if g.degree(w) != d {
            return Err(format!("vertex {w} has degree {} != {d}", g.degree(w)));
        }
        let row = &cert.eta[&w];
        if row.len() != d {
            return Err(format!("row of {w} has {} entries, expected {d}", row.len()));
        }
        for (i, &x) in row.iter().enumerate() {
            if !g.is_adjacent(w, x) {
                return Err(format!("eta_{}({w}) = {x} is not adjacent to {w}", i + 1));
            }
            for (j, &y) in row.iter().enumerate().skip(i + 1) {
                if x == y {
                    return Err(format!("eta_{}({w}) = eta_{}({w}) = {x}", i + 1, j + 1));
                }
            }
        }
    }
    let at_v = &cert.eta[&v];
    for i in 0..d {
        let mut left: Vec<usize> = (0..d).map(|k| cert.eta[&at_v[i]][k]).collect();
        let mut right: Vec<usize> = (0..d).map(|k| cert.eta[&at_v[k]][i]).collect();
        left.sort_unstable();
        right.sort_unstable();
        if mode == CommutationMode::Set {
            left.dedup();
            right.dedup();
        }
        if left != right {
            return Err(format!(
                "commutation fails for i = {}: {{eta_k(eta_i(v))}} = {left:?}, {{eta_i(eta_k(v))}} = {right:?}",
                i + 1
            ));
        }
    }
    Ok(())
}

/// Decides whether `g` is `deg(v)`-Ricci-flat at `v`.
///
/// `η_i(v)` is fixed to the i-th smallest neighbor `u_i` of `v`. Each row
/// `η_·(u_k)` is a bijection from labels onto `N(u_k)`, and the commutation
/// clause for label `i` says the column `{η_i(u_k)}_k` equals `N(u_i)`; cells
/// are filled row by row with candidates in ascending order, so the first
/// certificate found is the lexicographically smallest.
pub fn ricci_flat_at(g: &Graph, v: usize) -> Result<RicciFlatOutcome> {
    ricci_flat_at_with(g, v, CommutationMode::Set, NODE_BUDGET)
}

pub fn ricci_flat_at_with(g: &Graph, v: usize, mode: CommutationMode, budget: u64) -> Result<RicciFlatOutcome> {
    g.check_vertex(v)?;
    let d = g.degree(v);
    let rows: Vec<usize> = g.neighbors(v).to_vec();
    if let Some(&w) = rows.iter().find(|&&w| g.degree(w) != d) {
        return Ok(RicciFlatOutcome::Refuted(Refutation {
            vertex: v,
            reason: RefutationReason::DegreeMismatch { w, degree: g.degree(w), expected: d },
        }));
    }

    // candidates[k][i] = N(u_k) ∩ N(u_i), ascending
    let candidates: Vec<Vec<Vec<usize>>> = rows
        .iter()
        .map(|&uk| {
            rows.iter()
                .map(|&ui| g.neighbors(uk).iter().copied().filter(|&x| g.is_adjacent(ui, x)).collect())
                .collect()
        })
        .collect();

    let mut search = Backtrack {
        d,
        candidates: &candidates,
        grid: vec![usize::MAX; d * d],
        nodes: 0,
        budget,
    };
    let found = search.fill(0);
    let nodes = search.nodes;
    match found {
        Some(true) => {
            let mut eta = BTreeMap::new();
            eta.insert(v, rows.clone());
            for (k, &uk) in rows.iter().enumerate() {
                eta.insert(uk, search.grid[k * d..(k + 1) * d].to_vec());
            }
            let cert = RicciFlatCertificate { vertex: v, degree: d, eta };
            if let Err(msg) = validate_certificate(g, &cert, mode) {
                panic!("backtracking produced an invalid certificate at vertex {v}: {msg}");
            }
            Ok(RicciFlatOutcome::Certified(cert))
        }
        Some(false) => Ok(RicciFlatOutcome::Refuted(Refutation {
            vertex: v,
            reason: RefutationReason::ExhaustedSearch { nodes },
        })),
        None => Ok(RicciFlatOutcome::Refuted(Refutation {
            vertex: v,
            reason: RefutationReason::BudgetExhausted { nodes },
        })),
    }
}

struct Backtrack<'a> {
    d: usize,
    candidates: &'a [Vec<Vec<usize>>],
    /// `grid[k * d + i] = η_i(u_k)`
    grid: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Backtrack<'_> {
    /// `Some(true)` on success, `Some(false)` when exhausted, `None` when the
    /// node budget runs out.
    fn fill(&mut self, cell: usize) -> Option<bool> {
        let d = self.d;
        if cell == d * d {
            return Some(true);
        }
        let (k, i) = (cell / d, cell % d);
        for &x in &self.candidates[k][i] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let used_in_row = (0..i).any(|j| self.grid[k * d + j] == x);
            let used_in_column = (0..k).any(|r| self.grid[r * d + i] == x);
            if used_in_row || used_in_column {
                continue;
            }
            self.grid[cell] = x;
            match self.fill(cell + 1) {
                Some(false) => {}
                other => return other,
            }
        }
        self.grid[cell] = usize::MAX;
        Some(false)
    }
}

#[derive(Debug, Clone)]
pub struct RicciFlatReport {
    pub outcomes: Vec<RicciFlatOutcome>,
    /// Common degree, if the graph is regular.
    pub degree: Option<usize>,
    pub ricci_flat: bool,
}

impl RicciFlatReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ricci_flat": self.ricci_flat,
            "D": self.degree,
            "vertices": self.outcomes.iter().map(RicciFlatOutcome::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Checks every vertex. The graph is D-Ricci-flat iff it is regular and every
/// vertex is certified.
pub fn ricci_flat(g: &Graph) -> RicciFlatReport {
    let outcomes: Vec<RicciFlatOutcome> = (0..g.vertex_count())
        .into_par_iter()
        .map(|v| ricci_flat_at(g, v).expect("vertex in range"))
        .collect();
    let degree = (g.vertex_count() > 0 && g.is_regular()).then(|| g.degree(0));
    let ricci_flat = degree.is_some() && outcomes.iter().all(RicciFlatOutcome::is_certified);
    RicciFlatReport { outcomes, degree, ricci_flat }
}

/// Dimension parameters guaranteed on a D-Ricci-flat graph by a constant
/// `c = C_ψ^φ > 0`: `CD_ψ^φ(D/c, 0)`, and for `(ψ, φ) = (√·, log)` also
/// `CDE'(D/(4c), 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionPair {
    pub cd_phi_psi: f64,
    pub cde_prime: f64,
}

pub fn dimension_from_constant(degree: usize, c: f64) -> Result<DimensionPair> {
    if degree == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("constant must be positive, got {c}")));
    }
    let d = degree as f64 / c;
    Ok(DimensionPair { cd_phi_psi: d, cde_prime: d / 4.0 })
}
