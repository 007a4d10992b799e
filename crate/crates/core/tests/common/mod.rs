//! Reference implementations used as oracles. Everything here works on whole
//! vertex fields and follows the defining formulas, sharing no code with the
//! library kernels.
#![allow(dead_code)]

use curvdim::{Graph, PsiFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random graph: a random spanning tree plus extra edges with
/// probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_field(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

pub fn random_positive(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-2.0f64..2.0).exp()).collect()
}

pub fn laplacian(g: &Graph, f: &[f64]) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().map(|&w| f[w]).sum::<f64>() - g.degree(v) as f64 * f[v])
        .collect()
}

/// `2Γ(f, h) = Δ(fh) - fΔh - hΔf`.
pub fn gamma(g: &Graph, f: &[f64], h: &[f64]) -> Vec<f64> {
    let fh: Vec<f64> = f.iter().zip(h).map(|(a, b)| a * b).collect();
    let (lfh, lf, lh) = (laplacian(g, &fh), laplacian(g, f), laplacian(g, h));
    (0..f.len()).map(|v| 0.5 * (lfh[v] - f[v] * lh[v] - h[v] * lf[v])).collect()
}

pub fn gamma2(g: &Graph, f: &[f64], h: &[f64]) -> Vec<f64> {
    let lgam = laplacian(g, &gamma(g, f, h));
    let a = gamma(g, f, &laplacian(g, h));
    let b = gamma(g, h, &laplacian(g, f));
    (0..f.len()).map(|v| 0.5 * (lgam[v] - a[v] - b[v])).collect()
}

pub fn gamma2_tilde(g: &Graph, f: &[f64]) -> Vec<f64> {
    let q: Vec<f64> = gamma(g, f, f).iter().zip(f).map(|(a, b)| a / b).collect();
    let corr = gamma(g, f, &q);
    gamma2(g, f, f).iter().zip(corr).map(|(a, b)| a - b).collect()
}

pub fn psi_laplacian(g: &Graph, psi: &PsiFunction, f: &[f64]) -> Vec<f64> {
    (0..f.len())
        .map(|v| g.neighbors(v).iter().map(|&w| psi.eval(f[w] / f[v]) - psi.eval(1.0)).sum())
        .collect()
}

/// `Γ^ψ f = ψ'(1) Δf / f - Δ^ψ f`.
pub fn psi_gamma(g: &Graph, psi: &PsiFunction, f: &[f64]) -> Vec<f64> {
    let lf = laplacian(g, f);
    let lp = psi_laplacian(g, psi, f);
    (0..f.len()).map(|v| psi.deriv1(1.0) * lf[v] / f[v] - lp[v]).collect()
}

pub fn psi_omega(g: &Graph, psi: &PsiFunction, f: &[f64]) -> Vec<f64> {
    let lf = laplacian(g, f);
    let q: Vec<f64> = lf.iter().zip(f).map(|(a, b)| a / b).collect();
    (0..f.len())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&w| {
                    let r = f[w] / f[v];
                    psi.deriv1(r) * r * (q[w] - q[v])
                })
                .sum()
        })
        .collect()
}

pub fn psi_gamma2(g: &Graph, psi: &PsiFunction, f: &[f64]) -> Vec<f64> {
    let om = psi_omega(g, psi, f);
    let lf = laplacian(g, f);
    let lp = psi_laplacian(g, psi, f);
    let prod: Vec<f64> = f.iter().zip(&lp).map(|(a, b)| a * b).collect();
    let lprod = laplacian(g, &prod);
    (0..f.len()).map(|v| 0.5 * (om[v] + lf[v] * lp[v] / f[v] - lprod[v] / f[v])).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
