//! The two-point kernel `ψ̃(x, y)` and numerical estimates of
//! `C_ψ^φ = inf ψ̃(x, y) / (φ(x) + φ(y) - 2φ(1))²` over the positive quadrant,
//! plus the elementary inequality chain behind the analytic bound
//! `C^log_√ ≥ 1/16`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json::Real;
use crate::optimize::{nelder_mead, Bounds, NelderMeadOptions};
use crate::psi::PsiFunction;

/// `ψ̃(x,y) = [ψ'(x)+ψ'(y)](1-xy) + x[ψ(y)-ψ(1/x)] + y[ψ(x)-ψ(1/y)]`.
pub fn psi_tilde(psi: &PsiFunction, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::InvalidArgument(format!("psi_tilde needs x, y > 0, got ({x}, {y})")));
    }
    Ok(psi_tilde_unchecked(psi, x, y))
}

#[inline]
fn psi_tilde_unchecked(psi: &PsiFunction, x: f64, y: f64) -> f64 {
    (psi.deriv1(x) + psi.deriv1(y)) * (1.0 - x * y)
        + x * (psi.eval(y) - psi.eval(1.0 / x))
        + y * (psi.eval(x) - psi.eval(1.0 / y))
}

#[derive(Debug, Clone)]
pub struct ConstantConfig {
    /// Search box `[-L, L]²` in log coordinates `(s, t) = (log x, log y)`.
    pub box_half_width: f64,
    /// Grid points per axis.
    pub grid: usize,
    /// Points with `|φ(x) + φ(y) - 2φ(1)| < exclusion` are outside `A_φ`.
    pub exclusion: f64,
    /// Nelder-Mead starts, one per best grid cell.
    pub refine_starts: usize,
    pub refine_evals: usize,
}

impl Default for ConstantConfig {
    fn default() -> Self {
        ConstantConfig { box_half_width: 8.0, grid: 400, exclusion: 1e-8, refine_starts: 50, refine_evals: 2000 }
    }
}

impl ConstantConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return bad("box half-width must be positive and finite");
        }
        if self.grid < 2 {
            return bad("grid needs at least 2 points per axis");
        }
        if !(self.exclusion > 0.0) {
            return bad("exclusion width must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Location {
    Interior,
    BoxEdge,
    /// Within `10 × exclusion` of the set where the denominator vanishes.
    NearDenominatorZero,
    /// Every grid point was excluded, so `C = +∞`.
    EmptyDomain,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Location::Interior => "interior",
            Location::BoxEdge => "box-edge",
            Location::NearDenominatorZero => "near-denominator-zero",
            Location::EmptyDomain => "empty-domain",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStep {
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ConstantEstimate {
    pub psi: String,
    pub phi: String,
    /// Estimated `C_ψ^φ`, or `+∞` when the searched part of `A_φ` is empty.
    pub value: f64,
    pub argmin: Option<(f64, f64)>,
    pub location: Location,
    pub grid_min: f64,
    pub refined_min: f64,
    pub trace: Vec<RefinementStep>,
}

#[derive(Serialize)]
struct EstimateDocument<'a> {
    psi: &'a str,
    phi: &'a str,
    value: Real,
    argmin: Option<[Real; 2]>,
    location: Location,
    grid_min: Real,
    refined_min: Real,
}

impl ConstantEstimate {
    pub fn to_document(&self) -> String {
        let doc = EstimateDocument {
            psi: &self.psi,
            phi: &self.phi,
            value: Real(self.value),
            argmin: self.argmin.map(|(x, y)| [Real(x), Real(y)]),
            location: self.location,
            grid_min: Real(self.grid_min),
            refined_min: Real(self.refined_min),
        };
        serde_json::to_string_pretty(&doc).expect("estimate serializes")
    }
}

struct Quotient<'a> {
    psi: &'a PsiFunction,
    phi: &'a PsiFunction,
    exclusion: f64,
}

impl Quotient<'_> {
    fn denominator(&self, s: f64, t: f64) -> f64 {
        self.phi.eval(s.exp()) + self.phi.eval(t.exp()) - 2.0 * self.phi.value_at_one()
    }

    /// `+∞` outside `A_φ` (up to the exclusion band) or where undefined.
    fn eval(&self, s: f64, t: f64) -> f64 {
        let den = self.denominator(s, t);
        if !(den.abs() >= self.exclusion) {
            return f64::INFINITY;
        }
        let q = psi_tilde_unchecked(self.psi, s.exp(), t.exp()) / (den * den);
        if q.is_nan() { f64::INFINITY } else { q }
    }
}

/// Grid scan of the quotient in log coordinates followed by Nelder-Mead
/// refinement from the best grid cells.
pub fn cd_constant(psi: &PsiFunction, phi: &PsiFunction, config: &ConstantConfig) -> Result<ConstantEstimate> {
    config.validate()?;
    let quotient = Quotient { psi, phi, exclusion: config.exclusion };
    let big_l = config.box_half_width;
    let r = config.grid;
    let spacing = 2.0 * big_l / (r - 1) as f64;
    let coord = |i: usize| -big_l + spacing * i as f64;

    let values: Vec<f64> = (0..r * r)
        .into_par_iter()
        .map(|idx| quotient.eval(coord(idx / r), coord(idx % r)))
        .collect();

    let mut cells: Vec<usize> = (0..r * r).filter(|&i| values[i].is_finite()).collect();
    if cells.is_empty() {
        return Ok(ConstantEstimate {
            psi: psi.name().to_string(),
            phi: phi.name().to_string(),
            value: f64::INFINITY,
            argmin: None,
            location: Location::EmptyDomain,
            grid_min: f64::INFINITY,
            refined_min: f64::INFINITY,
            trace: Vec::new(),
        });
    }
    cells.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let grid_best = cells[0];
    let grid_min = values[grid_best];

    let bounds = Bounds { lo: -big_l, hi: big_l };
    let opts = NelderMeadOptions {
        initial_step: spacing,
        max_evals: config.refine_evals,
        f_tol: 1e-15,
        x_tol: 1e-12,
        restarts: 2,
    };
    let trace: Vec<RefinementStep> = cells[..config.refine_starts.min(cells.len())]
        .par_iter()
        .map(|&cell| {
            let start = (coord(cell / r), coord(cell % r));
            let m = nelder_mead(|p: &[f64]| quotient.eval(p[0], p[1]), &[start.0, start.1], bounds, &opts);
            RefinementStep { start, end: (m.x[0], m.x[1]), value: m.value }
        })
        .collect();

    let mut best = (grid_min, (coord(grid_best / r), coord(grid_best % r)));
    for step in &trace {
        if step.value < best.0 {
            best = (step.value, step.end);
        }
    }
    let (refined_min, (s, t)) = best;
    let location = if quotient.denominator(s, t).abs() < 10.0 * config.exclusion {
        Location::NearDenominatorZero
    } else if s.abs() >= big_l - 1e-9 * big_l || t.abs() >= big_l - 1e-9 * big_l {
        Location::BoxEdge
    } else {
        Location::Interior
    };
    Ok(ConstantEstimate {
        psi: psi.name().to_string(),
        phi: phi.name().to_string(),
        value: refined_min,
        argmin: Some((s.exp(), t.exp())),
        location,
        grid_min,
        refined_min,
        trace,
    })
}

/// One grid point of [`sqrt_log_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckEntry {
    pub t: f64,
    /// `(e^{3t} - e^{-t}) / (e^t - e^{-t})`.
    pub factor: f64,
    /// Relative deviation of `factor` from `e^{2t} + 1`.
    pub identity_error: f64,
    /// `(e^t - e^{-t}) / (8t)`, bounded below by 1/4.
    pub sinh_term: f64,
    /// `((e^{3t} - e^{-t}) / (8t))²`, bounded below by 1/16.
    pub bound_term: f64,
    pub identity_ok: bool,
    pub sinh_ok: bool,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheckReport {
    pub entries: Vec<BoundCheckEntry>,
    pub passed: bool,
}

const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Lower bounds are compared with a few ulps of slack for the final rounding.
const ULP_SLACK: f64 = 4.0 * f64::EPSILON;

/// Checks, at every `t ≠ 0`, the factorization
/// `(e^{3t} - e^{-t})/(e^t - e^{-t}) = e^{2t} + 1` and the two lower bounds
/// `(e^t - e^{-t})/(8t) ≥ 1/4` and `((e^{3t} - e^{-t})/(8t))² ≥ 1/16`.
/// Differences of exponentials are formed with `exp_m1` to stay accurate
/// near `t = 0`.
pub fn sqrt_log_bound_check(t_grid: &[f64]) -> Result<BoundCheckReport> {
    if let Some(&t) = t_grid.iter().find(|t| !(t.is_finite() && **t != 0.0)) {
        return Err(Error::InvalidArgument(format!("grid point t = {t} must be finite and nonzero")));
    }
    let entries: Vec<BoundCheckEntry> = t_grid
        .iter()
        .map(|&t| {
            let three_minus_one = (3.0 * t).exp_m1() - (-t).exp_m1();
            let one_minus_one = t.exp_m1() - (-t).exp_m1();
            let factor = three_minus_one / one_minus_one;
            let expected = (2.0 * t).exp() + 1.0;
            let identity_error = ((factor - expected) / expected).abs();
            let sinh_term = one_minus_one / (8.0 * t);
            let bound_term = (three_minus_one / (8.0 * t)).powi(2);
            BoundCheckEntry {
                t,
                factor,
                identity_error,
                sinh_term,
                bound_term,
                identity_ok: identity_error <= IDENTITY_TOLERANCE,
                sinh_ok: sinh_term >= 0.25 * (1.0 - ULP_SLACK),
                bound_ok: bound_term >= (1.0 / 16.0) * (1.0 - ULP_SLACK),
            }
        })
        .collect();
    let passed = entries.iter().all(|e| e.identity_ok && e.sinh_ok && e.bound_ok);
    Ok(BoundCheckReport { entries, passed })
}
