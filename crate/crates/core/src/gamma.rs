//! Classical Gamma calculus for the unweighted graph Laplacian
//! `Δf(v) = Σ_{w~v} (f(w) - f(v))`.
//!
//! Every operator is evaluated locally at one vertex. `Γ` at `v` reads the
//! 1-ball, `Γ₂` and `Γ̃₂` read the 2-ball. Neighbor sums run in sorted vertex
//! order, so results are deterministic.

use crate::error::Result;
use crate::graph::{require_positive, Graph};

/// Unchecked kernels. Callers guarantee `v` is valid, slices have one entry
/// per vertex and, where a quotient by `f` appears, `f > 0`.
pub(crate) mod raw {
    use crate::graph::Graph;

    #[inline]
    pub fn laplacian(g: &Graph, f: &[f64], v: usize) -> f64 {
        let fv = f[v];
        g.neighbors(v).iter().map(|&w| f[w] - fv).sum()
    }

    #[inline]
    pub fn gamma(g: &Graph, f: &[f64], h: &[f64], v: usize) -> f64 {
        let (fv, hv) = (f[v], h[v]);
        0.5 * g.neighbors(v).iter().map(|&w| (f[w] - fv) * (h[w] - hv)).sum::<f64>()
    }

    /// `Γ(f, q)(v)` where `q` is only known through a closure on vertices.
    #[inline]
    pub fn gamma_with(g: &Graph, f: &[f64], v: usize, q: impl Fn(usize) -> f64) -> f64 {
        let (fv, qv) = (f[v], q(v));
        0.5 * g.neighbors(v).iter().map(|&w| (f[w] - fv) * (q(w) - qv)).sum::<f64>()
    }

    pub fn gamma2(g: &Graph, f: &[f64], h: &[f64], v: usize) -> f64 {
        let gamma_v = gamma(g, f, h, v);
        let lap_gamma: f64 = g.neighbors(v).iter().map(|&w| gamma(g, f, h, w) - gamma_v).sum();
        let f_lap_h = gamma_with(g, f, v, |w| laplacian(g, h, w));
        let h_lap_f = gamma_with(g, h, v, |w| laplacian(g, f, w));
        0.5 * (lap_gamma - f_lap_h - h_lap_f)
    }

    pub fn gamma2_tilde(g: &Graph, f: &[f64], v: usize) -> f64 {
        let correction = gamma_with(g, f, v, |w| gamma(g, f, f, w) / f[w]);
        gamma2(g, f, f, v) - correction
    }
}

fn check(g: &Graph, v: usize, fs: &[&[f64]]) -> Result<()> {
    g.check_vertex(v)?;
    fs.iter().try_for_each(|f| g.check_function(f))
}

/// `Δf(v)`.
pub fn laplacian(g: &Graph, f: &[f64], v: usize) -> Result<f64> {
    check(g, v, &[f])?;
    Ok(raw::laplacian(g, f, v))
}

/// The carré du champ `Γ(f, h)(v) = ½ Σ_{w~v} (f(w)-f(v))(h(w)-h(v))`.
pub fn gamma(g: &Graph, f: &[f64], h: &[f64], v: usize) -> Result<f64> {
    check(g, v, &[f, h])?;
    Ok(raw::gamma(g, f, h, v))
}

/// `Γ₂(f, h)(v) = ½ [ΔΓ(f,h) - Γ(f,Δh) - Γ(h,Δf)](v)`.
pub fn gamma2(g: &Graph, f: &[f64], h: &[f64], v: usize) -> Result<f64> {
    check(g, v, &[f, h])?;
    Ok(raw::gamma2(g, f, h, v))
}

/// `Γ̃₂(f)(v) = Γ₂(f)(v) - Γ(f, Γ(f)/f)(v)` for strictly positive `f`.
pub fn gamma2_tilde(g: &Graph, f: &[f64], v: usize) -> Result<f64> {
    check(g, v, &[f])?;
    require_positive(f)?;
    Ok(raw::gamma2_tilde(g, f, v))
}

/// Pointwise heat-equation identity for `u > 0`:
/// `ΔΓ(√u)(v) - 2Γ(√u, Δu/(2√u))(v) - 2Γ̃₂(√u)(v)`.
///
/// The first two terms are `L(Γ√u)` with `∂ₜu` replaced by `Δu`; the
/// result vanishes identically, so anything beyond rounding is a bug.
pub fn heat_identity_residual(g: &Graph, u: &[f64], v: usize) -> Result<f64> {
    check(g, v, &[u])?;
    require_positive(u)?;
    let s: Vec<f64> = u.iter().map(|x| x.sqrt()).collect();
    let gamma_v = raw::gamma(g, &s, &s, v);
    let lap_gamma: f64 = g.neighbors(v).iter().map(|&w| raw::gamma(g, &s, &s, w) - gamma_v).sum();
    let time_derivative = 2.0 * raw::gamma_with(g, &s, v, |w| raw::laplacian(g, u, w) / (2.0 * s[w]));
    Ok(lap_gamma - time_derivative - 2.0 * raw::gamma2_tilde(g, &s, v))
}
