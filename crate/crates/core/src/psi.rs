//! The ψ-operator family on positive vertex functions: `Δ^ψ`, `ψ̄`, `Γ^ψ`,
//! `Ω^ψ`, `Γ₂^ψ`, and numerical probes of their small-perturbation limits.
//!
//! All operators only see ratios `f(w)/f(v)`, so they are invariant under
//! `f ↦ cf` for `c > 0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma;
use crate::graph::{require_positive, Graph};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sample points for the derivative self-checks.
const CHECK_POINTS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
const DERIVATIVE_TOLERANCE: f64 = 1e-6;
const CONCAVITY_TOLERANCE: f64 = 1e-12;

/// A function on `(0, ∞)` carried together with its first two derivatives.
///
/// Values are cheap to clone (the callables are shared) and must be pure.
#[derive(Clone)]
pub struct PsiFunction {
    name: String,
    eval: ScalarFn,
    deriv1: ScalarFn,
    deriv2: ScalarFn,
    value_at_one: f64,
    deriv1_at_one: f64,
    deriv2_at_one: f64,
    concave: bool,
}

impl fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiFunction")
            .field("name", &self.name)
            .field("value_at_one", &self.value_at_one)
            .field("deriv1_at_one", &self.deriv1_at_one)
            .field("deriv2_at_one", &self.deriv2_at_one)
            .field("concave", &self.concave)
            .finish()
    }
}

impl PsiFunction {
    fn from_parts(name: String, eval: ScalarFn, deriv1: ScalarFn, deriv2: ScalarFn, concave: bool) -> Self {
        PsiFunction {
            value_at_one: eval(1.0),
            deriv1_at_one: deriv1(1.0),
            deriv2_at_one: deriv2(1.0),
            name,
            eval,
            deriv1,
            deriv2,
            concave,
        }
    }

    /// A user-supplied ψ. The derivatives are checked against central finite
    /// differences at a fixed set of points, and a claimed concavity is checked
    /// against the second derivative there; a mismatch is an error.
    pub fn custom<F, D1, D2>(name: impl Into<String>, eval: F, deriv1: D1, deriv2: D2, concave: bool) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let psi = PsiFunction::from_parts(name.into(), Arc::new(eval), Arc::new(deriv1), Arc::new(deriv2), concave);
        psi.self_check()?;
        Ok(psi)
    }

    fn self_check(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidPsi { name: self.name.clone(), reason });
        for &x in &CHECK_POINTS {
            let h = 1e-4 * x;
            let fd1 = (self.eval(x + h) - self.eval(x - h)) / (2.0 * h);
            let fd2 = (self.deriv1(x + h) - self.deriv1(x - h)) / (2.0 * h);
            let (d1, d2) = (self.deriv1(x), self.deriv2(x));
            if !(d1.is_finite() && d2.is_finite() && self.eval(x).is_finite()) {
                return fail(format!("non-finite value at x = {x}"));
            }
            if (fd1 - d1).abs() > DERIVATIVE_TOLERANCE * d1.abs().max(1.0) {
                return fail(format!("first derivative {d1} disagrees with finite difference {fd1} at x = {x}"));
            }
            if (fd2 - d2).abs() > DERIVATIVE_TOLERANCE * d2.abs().max(1.0) {
                return fail(format!("second derivative {d2} disagrees with finite difference {fd2} at x = {x}"));
            }
            if self.concave && d2 > CONCAVITY_TOLERANCE {
                return fail(format!("declared concave but second derivative is {d2} at x = {x}"));
            }
        }
        Ok(())
    }

    pub fn log() -> Self {
        PsiFunction::from_parts(
            "log".into(),
            Arc::new(f64::ln),
            Arc::new(|x| 1.0 / x),
            Arc::new(|x| -1.0 / (x * x)),
            true,
        )
    }

    pub fn sqrt() -> Self {
        PsiFunction::from_parts(
            "sqrt".into(),
            Arc::new(f64::sqrt),
            Arc::new(|x| 0.5 / x.sqrt()),
            Arc::new(|x| -0.25 / (x * x.sqrt())),
            true,
        )
    }

    pub fn identity() -> Self {
        PsiFunction::from_parts("id".into(), Arc::new(|x| x), Arc::new(|_| 1.0), Arc::new(|_| 0.0), true)
    }

    /// `x^alpha` for `0 < alpha < 1`.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidPsi {
                name: format!("pow:{alpha}"),
                reason: "alpha must lie in (0, 1)".into(),
            });
        }
        Ok(PsiFunction::from_parts(
            format!("pow:{alpha}"),
            Arc::new(move |x: f64| x.powf(alpha)),
            Arc::new(move |x: f64| alpha * x.powf(alpha - 1.0)),
            Arc::new(move |x: f64| alpha * (alpha - 1.0) * x.powf(alpha - 2.0)),
            true,
        ))
    }

    /// `ψ + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let eval = Arc::clone(&self.eval);
        PsiFunction::from_parts(
            format!("{}+{c}", self.name),
            Arc::new(move |x| eval(x) + c),
            Arc::clone(&self.deriv1),
            Arc::clone(&self.deriv2),
            self.concave,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    #[inline]
    pub fn deriv1(&self, x: f64) -> f64 {
        (self.deriv1)(x)
    }

    #[inline]
    pub fn deriv2(&self, x: f64) -> f64 {
        (self.deriv2)(x)
    }

    pub fn value_at_one(&self) -> f64 {
        self.value_at_one
    }

    pub fn deriv1_at_one(&self) -> f64 {
        self.deriv1_at_one
    }

    pub fn deriv2_at_one(&self) -> f64 {
        self.deriv2_at_one
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }
}

impl FromStr for PsiFunction {
    type Err = Error;

    /// Built-in names: `log`, `sqrt`, `id`, `pow:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(PsiFunction::log()),
            "sqrt" => Ok(PsiFunction::sqrt()),
            "id" => Ok(PsiFunction::identity()),
            _ => {
                let alpha = s
                    .strip_prefix("pow:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| Error::UnknownPsi(s.to_string()))?;
                PsiFunction::power(alpha)
            }
        }
    }
}

/// `ψ̄(x) = ψ'(1)(x - 1) - (ψ(x) - ψ(1))`. Vanishes with its first derivative
/// at 1, and is nonnegative when ψ is concave.
pub fn psi_bar(psi: &PsiFunction) -> PsiFunction {
    let (c1, c0) = (psi.deriv1_at_one, psi.value_at_one);
    let (eval, d1, d2) = (Arc::clone(&psi.eval), Arc::clone(&psi.deriv1), Arc::clone(&psi.deriv2));
    PsiFunction::from_parts(
        format!("bar({})", psi.name),
        Arc::new(move |x| c1 * (x - 1.0) - (eval(x) - c0)),
        Arc::new(move |x| c1 - d1(x)),
        Arc::new(move |x| -d2(x)),
        false,
    )
}

pub(crate) mod raw {
    use super::PsiFunction;
    use crate::gamma::raw as classical;
    use crate::graph::Graph;

    #[inline]
    pub fn laplacian(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> f64 {
        let (fv, p1) = (f[v], psi.value_at_one());
        g.neighbors(v).iter().map(|&w| psi.eval(f[w] / fv) - p1).sum()
    }

    /// `Γ^ψ` evaluated through `ψ̄` pointwise.
    #[inline]
    pub fn gamma(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> f64 {
        let (fv, p0, p1) = (f[v], psi.value_at_one(), psi.deriv1_at_one());
        g.neighbors(v)
            .iter()
            .map(|&w| {
                let r = f[w] / fv;
                p1 * (r - 1.0) - (psi.eval(r) - p0)
            })
            .sum()
    }

    pub fn omega(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> f64 {
        let fv = f[v];
        let rel_v = classical::laplacian(g, f, v) / fv;
        g.neighbors(v)
            .iter()
            .map(|&w| {
                let r = f[w] / fv;
                psi.deriv1(r) * r * (classical::laplacian(g, f, w) / f[w] - rel_v)
            })
            .sum()
    }

    pub fn gamma2(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> f64 {
        let fv = f[v];
        let lap_psi_v = laplacian(g, psi, f, v);
        let weighted_v = fv * lap_psi_v;
        let lap_weighted: f64 = g
            .neighbors(v)
            .iter()
            .map(|&w| f[w] * laplacian(g, psi, f, w) - weighted_v)
            .sum();
        let lap_f = classical::laplacian(g, f, v);
        0.5 * (omega(g, psi, f, v) + lap_f * lap_psi_v / fv - lap_weighted / fv)
    }
}

fn check_positive(g: &Graph, f: &[f64], v: usize) -> Result<()> {
    g.check_vertex(v)?;
    g.check_function(f)?;
    require_positive(f)
}

/// `(Δ^ψ f)(v) = Σ_{w~v} [ψ(f(w)/f(v)) - ψ(1)]`.
pub fn psi_laplacian(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> Result<f64> {
    check_positive(g, f, v)?;
    Ok(raw::laplacian(g, psi, f, v))
}

/// `Γ^ψ = Δ^{ψ̄}`.
pub fn psi_gamma(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> Result<f64> {
    check_positive(g, f, v)?;
    Ok(raw::gamma(g, psi, f, v))
}

/// `(Ω^ψ f)(v) = Σ_{w~v} ψ'(f(w)/f(v)) · f(w)/f(v) · (Δf(w)/f(w) - Δf(v)/f(v))`.
pub fn psi_omega(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> Result<f64> {
    check_positive(g, f, v)?;
    Ok(raw::omega(g, psi, f, v))
}

/// `Γ₂^ψ f(v) = ½ [Ω^ψ f + Δf·Δ^ψ f / f - Δ(f·Δ^ψ f) / f](v)`.
pub fn psi_gamma2(g: &Graph, psi: &PsiFunction, f: &[f64], v: usize) -> Result<f64> {
    check_positive(g, f, v)?;
    Ok(raw::gamma2(g, psi, f, v))
}

/// Which ψ-operator a [`limit_probe`] rescales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitOperator {
    Laplacian,
    Gamma,
    Gamma2,
}

impl LimitOperator {
    pub const ALL: [LimitOperator; 3] = [LimitOperator::Laplacian, LimitOperator::Gamma, LimitOperator::Gamma2];

    fn power(self) -> i32 {
        match self {
            LimitOperator::Laplacian => 1,
            _ => 2,
        }
    }
}

impl FromStr for LimitOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplacian" => Ok(LimitOperator::Laplacian),
            "gamma" => Ok(LimitOperator::Gamma),
            "gamma2" => Ok(LimitOperator::Gamma2),
            _ => Err(Error::InvalidArgument(format!("unknown operator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbeResult {
    pub operator: LimitOperator,
    pub estimated_limit: f64,
    pub reference_value: f64,
    /// Convergence order of `|q(ε) - reference|`: the median local slope of
    /// the log error against `log ε` over the longest stable stretch of the
    /// schedule. `None` when the error never clears rounding, or ψ''(1) = 0
    /// makes the second-order limits uninformative.
    pub observed_order: Option<f64>,
    pub epsilon_schedule: Vec<f64>,
    /// Rescaled operator values `q(ε)` along the schedule.
    pub samples: Vec<f64>,
}

/// First and last exponent of the schedule `ε_k = 2^{-k}`.
const SCHEDULE_EXPONENTS: (i32, i32) = (3, 20);
/// `1 + εf` is kept at or above this floor by shrinking the whole schedule.
const POSITIVITY_FLOOR: f64 = 0.1;
/// Rounding in `q(ε)` grows like `C/ε^p`; `C` is read off the last few samples,
/// where rounding dominates, and errors within this margin of it are ignored.
const ORDER_NOISE_SAMPLES: usize = 4;
const ORDER_NOISE_MARGIN: f64 = 30.0;
/// Neighbouring local slopes closer than this belong to the same regime.
const ORDER_SLOPE_TOLERANCE: f64 = 0.15;
/// Leading samples fed to the extrapolation. Rounding in `q(ε)` grows like
/// `1/ε^p`, so samples below `ε = 2^-11` only add noise to the tableau.
const RICHARDSON_ROWS: usize = 9;

/// Rescaled ψ-operators at `1 + εf` along a decreasing ε-schedule:
/// `(1/ε)Δ^ψ`, `(1/ε²)Γ^ψ` or `(1/ε²)Γ₂^ψ`, compared against
/// `ψ'(1)Δf`, `-ψ''(1)Γ(f)` or `-ψ''(1)Γ₂(f)`.
///
/// The limit is estimated from a Richardson tableau over the halving
/// schedule over its largest nine ε; the entry with the smallest local error
/// estimate wins.
pub fn limit_probe(g: &Graph, psi: &PsiFunction, f: &[f64], which: LimitOperator, v: usize) -> Result<LimitProbeResult> {
    g.check_vertex(v)?;
    g.check_function(f)?;
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::EpsilonSchedule);
    }
    let (k_first, k_last) = SCHEDULE_EXPONENTS;
    let eps_max = 2f64.powi(-k_first);
    let f_min = f.iter().copied().fold(0.0, f64::min);
    let cap = if f_min < 0.0 { (1.0 - POSITIVITY_FLOOR) / -f_min } else { f64::INFINITY };
    let scale = (cap / eps_max).min(1.0);
    let schedule: Vec<f64> = (k_first..=k_last).map(|k| scale * 2f64.powi(-k)).collect();

    let p = which.power();
    let mut samples = Vec::with_capacity(schedule.len());
    let mut shifted = vec![0.0; f.len()];
    for &eps in &schedule {
        for (s, &x) in shifted.iter_mut().zip(f) {
            *s = 1.0 + eps * x;
        }
        if shifted.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::EpsilonSchedule);
        }
        let value = match which {
            LimitOperator::Laplacian => raw::laplacian(g, psi, &shifted, v),
            LimitOperator::Gamma => raw::gamma(g, psi, &shifted, v),
            LimitOperator::Gamma2 => raw::gamma2(g, psi, &shifted, v),
        };
        samples.push(value / eps.powi(p));
    }

    let reference_value = match which {
        LimitOperator::Laplacian => psi.deriv1_at_one * gamma::raw::laplacian(g, f, v),
        LimitOperator::Gamma => -psi.deriv2_at_one * gamma::raw::gamma(g, f, f, v),
        LimitOperator::Gamma2 => -psi.deriv2_at_one * gamma::raw::gamma2(g, f, f, v),
    };

    let estimated_limit = richardson(&samples[..RICHARDSON_ROWS]);

    let degenerate = which != LimitOperator::Laplacian && psi.deriv2_at_one == 0.0;
    let observed_order = if degenerate {
        None
    } else {
        fit_order(&schedule, &samples, reference_value, p)
    };

    Ok(LimitProbeResult {
        operator: which,
        estimated_limit,
        reference_value,
        observed_order,
        epsilon_schedule: schedule,
        samples,
    })
}

/// Tableau `T[i][j] = (2^j T[i][j-1] - T[i-1][j-1]) / (2^j - 1)` for samples
/// at `ε_0 / 2^i`, assuming an expansion in integer powers of ε. Returns the
/// entry whose two neighbours in the tableau agree with it best.
fn richardson(samples: &[f64]) -> f64 {
    let mut prev: Vec<f64> = vec![samples[0]];
    let mut best = (f64::INFINITY, samples[0]);
    for &q in &samples[1..] {
        let mut row = vec![q];
        for j in 1..=prev.len() {
            let factor = 2f64.powi(j as i32);
            let t = (factor * row[j - 1] - prev[j - 1]) / (factor - 1.0);
            let err = (t - row[j - 1]).abs().max((t - prev[j - 1]).abs());
            if err <= best.0 {
                best = (err, t);
            }
            row.push(t);
        }
        prev = row;
    }
    best.1
}

/// Median local slope `log₂|e_k / e_{k+1}|` over the longest run of
/// neighbouring slopes that agree to within [`ORDER_SLOPE_TOLERANCE`]. At
/// large ε higher-order terms bend the slopes, at small ε rounding scatters
/// them; the first-order regime in between is where they stay put. Pairs
/// whose errors differ in sign, vanish or grow as ε shrinks break a run.
fn fit_order(schedule: &[f64], samples: &[f64], reference: f64, p: i32) -> Option<f64> {
    let noise = schedule[schedule.len() - ORDER_NOISE_SAMPLES..]
        .iter()
        .zip(&samples[samples.len() - ORDER_NOISE_SAMPLES..])
        .map(|(&eps, &q)| (q - reference).abs() * eps.powi(p))
        .fold(0.0, f64::max);
    let clear = |k: usize| (samples[k] - reference).abs() > ORDER_NOISE_MARGIN * noise / schedule[k].powi(p);
    let slopes: Vec<Option<f64>> = (0..samples.len() - 1)
        .map(|k| {
            let (a, b) = (samples[k] - reference, samples[k + 1] - reference);
            let slope = (a / b).log2();
            (clear(k) && clear(k + 1) && a.signum() == b.signum() && slope > 0.0).then_some(slope)
        })
        .collect();
    let mut best: &[Option<f64>] = &[];
    let mut start = 0;
    for end in 1..=slopes.len() {
        let breaks = end == slopes.len()
            || slopes[end].is_none()
            || match (slopes[end - 1], slopes[end]) {
                (Some(x), Some(y)) => (x - y).abs() > ORDER_SLOPE_TOLERANCE,
                _ => true,
            };
        if breaks {
            let run = &slopes[start..end];
            if run.iter().all(Option::is_some) && run.len() >= best.len() {
                best = run;
            }
            start = end;
        }
    }
    let mut run: Vec<f64> = best.iter().flatten().copied().collect();
    if run.is_empty() {
        return None;
    }
    run.sort_by(f64::total_cmp);
    let mid = run.len() / 2;
    Some(if run.len() % 2 == 1 { run[mid] } else { 0.5 * (run[mid - 1] + run[mid]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn builtin_values_at_one() {
        let log = PsiFunction::log();
        assert_eq!((log.value_at_one(), log.deriv1_at_one(), log.deriv2_at_one()), (0.0, 1.0, -1.0));
        let sqrt = PsiFunction::sqrt();
        assert_eq!((sqrt.value_at_one(), sqrt.deriv1_at_one(), sqrt.deriv2_at_one()), (1.0, 0.5, -0.25));
        for psi in [log, sqrt, PsiFunction::identity(), PsiFunction::power(0.3).unwrap()] {
            psi.self_check().unwrap();
            assert!(psi.is_concave());
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("log".parse::<PsiFunction>().unwrap().name(), "log");
        assert_eq!("pow:0.5".parse::<PsiFunction>().unwrap().deriv2_at_one(), -0.25);
        assert!("pow:1.5".parse::<PsiFunction>().is_err());
        assert!("pow:x".parse::<PsiFunction>().is_err());
        assert!("exp".parse::<PsiFunction>().is_err());
    }

    #[test]
    fn custom_psi_derivative_mismatch_is_rejected() {
        let wrong = PsiFunction::custom("bad", f64::ln, |x| 2.0 / x, |x| -1.0 / (x * x), true);
        assert!(matches!(wrong, Err(Error::InvalidPsi { .. })));
        let wrong2 = PsiFunction::custom("bad2", f64::ln, |x| 1.0 / x, |x| -2.0 / (x * x), true);
        assert!(wrong2.is_err());
        let convex = PsiFunction::custom("sq", |x| x * x, |x| 2.0 * x, |_| 2.0, true);
        assert!(convex.is_err());
        let ok = PsiFunction::custom("sq", |x| x * x, |x| 2.0 * x, |_| 2.0, false);
        assert!(ok.is_ok());
    }

    #[test]
    fn psi_bar_examples() {
        let bar = psi_bar(&PsiFunction::log());
        assert_eq!(bar.eval(1.0), 0.0);
        assert_eq!(bar.deriv1(1.0), 0.0);
        assert!((psi_bar(&PsiFunction::sqrt()).eval(4.0) - 0.5).abs() < 1e-15);
        let id_bar = psi_bar(&PsiFunction::identity());
        for x in [0.1, 1.0, 3.0, 50.0] {
            assert_eq!(id_bar.eval(x), 0.0);
        }
    }

    #[test]
    fn log_laplacian_on_triangle() {
        let k3 = Graph::cycle(3).unwrap();
        let f = [1.0, E, E];
        let value = psi_laplacian(&k3, &PsiFunction::log(), &f, 0).unwrap();
        assert!((value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constants_give_zero() {
        let g = Graph::petersen();
        let f = [1.7; 10];
        for psi in [PsiFunction::log(), PsiFunction::sqrt(), PsiFunction::power(0.2).unwrap()] {
            assert_eq!(psi_laplacian(&g, &psi, &f, 3).unwrap(), 0.0);
            assert_eq!(psi_gamma(&g, &psi, &f, 3).unwrap(), 0.0);
            assert_eq!(psi_omega(&g, &psi, &f, 3).unwrap(), 0.0);
            assert_eq!(psi_gamma2(&g, &psi, &f, 3).unwrap(), 0.0);
        }
    }

    #[test]
    fn operators_reject_nonpositive() {
        let g = Graph::path(3).unwrap();
        let psi = PsiFunction::log();
        assert!(psi_laplacian(&g, &psi, &[1.0, 0.0, 1.0], 0).is_err());
        assert!(psi_gamma2(&g, &psi, &[1.0, 1.0, -2.0], 0).is_err());
        assert!(psi_omega(&g, &psi, &[1.0, 1.0], 0).is_err());
    }

    #[test]
    fn probe_on_zero_function() {
        let g = Graph::cycle(5).unwrap();
        for which in LimitOperator::ALL {
            let r = limit_probe(&g, &PsiFunction::log(), &[0.0; 5], which, 0).unwrap();
            assert_eq!(r.estimated_limit, 0.0);
            assert_eq!(r.reference_value, 0.0);
            assert_eq!(r.observed_order, None);
        }
    }

    #[test]
    fn probe_schedule_is_capped() {
        let g = Graph::path(3).unwrap();
        let f = [-100.0, 3.0, 2.0];
        let r = limit_probe(&g, &PsiFunction::sqrt(), &f, LimitOperator::Gamma, 1).unwrap();
        assert!(r.epsilon_schedule.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
        assert!(1.0 + r.epsilon_schedule[0] * -100.0 >= POSITIVITY_FLOOR - 1e-12);
        assert!(limit_probe(&g, &PsiFunction::sqrt(), &[f64::NAN, 0.0, 0.0], LimitOperator::Gamma, 1).is_err());
    }

    #[test]
    fn identity_probe_is_not_applicable_for_second_order() {
        let g = Graph::cycle(4).unwrap();
        let f = [0.3, -0.2, 0.9, 0.1];
        let r = limit_probe(&g, &PsiFunction::identity(), &f, LimitOperator::Gamma2, 0).unwrap();
        assert_eq!(r.reference_value, 0.0);
        assert_eq!(r.observed_order, None);
    }
}
