mod common;

use common::{close, random_field, random_graph, random_positive, rng};
use curvdim::{gamma, gamma2, gamma2_tilde, heat_identity_residual, laplacian, psi_bar, psi_gamma, psi_gamma2};
use curvdim::{psi_laplacian, psi_omega, Graph, PsiFunction};
use proptest::prelude::*;

fn psis() -> Vec<PsiFunction> {
    vec![PsiFunction::log(), PsiFunction::sqrt(), PsiFunction::identity(), PsiFunction::power(0.3).unwrap()]
}

#[test]
fn classical_operators_match_field_formulas() {
    let mut r = rng(11);
    for trial in 0..40 {
        let n = 3 + trial % 9;
        let g = random_graph(&mut r, n, 0.3);
        let f = random_field(&mut r, n);
        let h = random_field(&mut r, n);
        let p = random_positive(&mut r, n);
        let (lf, gfh, g2fh, g2t) =
            (common::laplacian(&g, &f), common::gamma(&g, &f, &h), common::gamma2(&g, &f, &h), common::gamma2_tilde(&g, &p));
        for v in 0..n {
            assert!(close(laplacian(&g, &f, v).unwrap(), lf[v], 1e-12));
            assert!(close(gamma(&g, &f, &h, v).unwrap(), gfh[v], 1e-12));
            assert!(close(gamma2(&g, &f, &h, v).unwrap(), g2fh[v], 1e-11));
            assert!(close(gamma2_tilde(&g, &p, v).unwrap(), g2t[v], 1e-10));
        }
    }
}

#[test]
fn psi_operators_match_field_formulas() {
    let mut r = rng(12);
    for trial in 0..30 {
        let n = 3 + trial % 8;
        let g = random_graph(&mut r, n, 0.35);
        let f = random_positive(&mut r, n);
        for psi in psis() {
            let (lp, gp, op, g2p) = (
                common::psi_laplacian(&g, &psi, &f),
                common::psi_gamma(&g, &psi, &f),
                common::psi_omega(&g, &psi, &f),
                common::psi_gamma2(&g, &psi, &f),
            );
            for v in 0..n {
                assert!(close(psi_laplacian(&g, &psi, &f, v).unwrap(), lp[v], 1e-11), "{}", psi.name());
                assert!(close(psi_gamma(&g, &psi, &f, v).unwrap(), gp[v], 1e-10), "{}", psi.name());
                assert!(close(psi_omega(&g, &psi, &f, v).unwrap(), op[v], 1e-10), "{}", psi.name());
                assert!(close(psi_gamma2(&g, &psi, &f, v).unwrap(), g2p[v], 1e-9), "{}", psi.name());
            }
        }
    }
}

#[test]
fn psi_gamma_is_laplacian_of_psi_bar() {
    let mut r = rng(13);
    let g = random_graph(&mut r, 8, 0.4);
    let f = random_positive(&mut r, 8);
    for psi in psis() {
        let bar = psi_bar(&psi);
        for v in 0..8 {
            let a = psi_gamma(&g, &psi, &f, v).unwrap();
            let b = psi_laplacian(&g, &bar, &f, v).unwrap();
            assert!(close(a, b, 1e-12));
        }
    }
}

#[test]
fn log_laplacian_sums_log_ratios() {
    let g = Graph::petersen();
    let mut r = rng(14);
    let f = random_positive(&mut r, 10);
    for v in 0..10 {
        let expected: f64 = g.neighbors(v).iter().map(|&w| (f[w] / f[v]).ln()).sum();
        assert!(close(psi_laplacian(&g, &PsiFunction::log(), &f, v).unwrap(), expected, 1e-13));
    }
}

#[test]
fn sqrt_lemma_on_random_graphs() {
    let mut r = rng(15);
    let sqrt = PsiFunction::sqrt();
    for _ in 0..30 {
        let g = random_graph(&mut r, 9, 0.3);
        let f = random_positive(&mut r, 9);
        let root: Vec<f64> = f.iter().map(|x| x.sqrt()).collect();
        let g1 = common::gamma(&g, &root, &root);
        let g2 = common::gamma2_tilde(&g, &root);
        for v in 0..9 {
            assert!(close(f[v] * psi_gamma(&g, &sqrt, &f, v).unwrap(), g1[v], 1e-10));
            assert!(close(f[v] * psi_gamma2(&g, &sqrt, &f, v).unwrap(), g2[v], 1e-9));
        }
    }
}

#[test]
fn values_outside_the_two_ball_do_not_matter() {
    let g = Graph::cycle(9).unwrap();
    let mut r = rng(16);
    let f = random_positive(&mut r, 9);
    let mut h = f.clone();
    for w in 3..7 {
        h[w] *= 5.0;
    }
    let psi = PsiFunction::log();
    assert_eq!(gamma2(&g, &f, &f, 0).unwrap(), gamma2(&g, &h, &h, 0).unwrap());
    assert_eq!(gamma2_tilde(&g, &f, 0).unwrap(), gamma2_tilde(&g, &h, 0).unwrap());
    assert_eq!(psi_gamma2(&g, &psi, &f, 0).unwrap(), psi_gamma2(&g, &psi, &h, 0).unwrap());
}

fn graph_and_fields() -> impl Strategy<Value = (Graph, Vec<f64>, Vec<f64>, usize)> {
    (3usize..10, any::<u64>()).prop_flat_map(|(n, seed)| {
        let g = random_graph(&mut rng(seed), n, 0.3);
        (
            Just(g),
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-3.0f64..3.0, n),
            0..n,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gamma_is_symmetric_and_nonnegative((g, f, h, v) in graph_and_fields()) {
        let a = gamma(&g, &f, &h, v).unwrap();
        prop_assert!(close(a, gamma(&g, &h, &f, v).unwrap(), 1e-13));
        prop_assert!(gamma(&g, &f, &f, v).unwrap() >= 0.0);
        let b = gamma2(&g, &f, &h, v).unwrap();
        prop_assert!(close(b, gamma2(&g, &h, &f, v).unwrap(), 1e-12));
    }

    #[test]
    fn gamma2_polarizes((g, f, h, v) in graph_and_fields()) {
        let sum: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a - b).collect();
        let polar = 0.25 * (gamma2(&g, &sum, &sum, v).unwrap() - gamma2(&g, &diff, &diff, v).unwrap());
        prop_assert!(close(polar, gamma2(&g, &f, &h, v).unwrap(), 1e-11));
    }

    #[test]
    fn classical_operators_ignore_constants((g, f, _h, v) in graph_and_fields(), c in -5.0f64..5.0) {
        let shifted: Vec<f64> = f.iter().map(|x| x + c).collect();
        prop_assert!(close(laplacian(&g, &f, v).unwrap(), laplacian(&g, &shifted, v).unwrap(), 1e-12));
        prop_assert!(close(gamma(&g, &f, &f, v).unwrap(), gamma(&g, &shifted, &shifted, v).unwrap(), 1e-11));
        prop_assert!(close(gamma2(&g, &f, &f, v).unwrap(), gamma2(&g, &shifted, &shifted, v).unwrap(), 1e-10));
    }

    #[test]
    fn psi_operators_are_scale_invariant((g, u, _h, v) in graph_and_fields(), c in 0.01f64..100.0) {
        let f: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        let scaled: Vec<f64> = f.iter().map(|x| c * x).collect();
        for psi in psis() {
            prop_assert!(close(psi_laplacian(&g, &psi, &f, v).unwrap(), psi_laplacian(&g, &psi, &scaled, v).unwrap(), 1e-11));
            prop_assert!(close(psi_gamma2(&g, &psi, &f, v).unwrap(), psi_gamma2(&g, &psi, &scaled, v).unwrap(), 1e-9));
        }
    }

    #[test]
    fn psi_operators_ignore_additive_shift((g, u, _h, v) in graph_and_fields(), c in -10.0f64..10.0) {
        let f: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        for psi in psis() {
            let shifted = psi.shifted(c);
            prop_assert!(close(psi_laplacian(&g, &psi, &f, v).unwrap(), psi_laplacian(&g, &shifted, &f, v).unwrap(), 1e-11));
            prop_assert!(close(psi_gamma(&g, &psi, &f, v).unwrap(), psi_gamma(&g, &shifted, &f, v).unwrap(), 1e-11));
            prop_assert!(close(psi_gamma2(&g, &psi, &f, v).unwrap(), psi_gamma2(&g, &shifted, &f, v).unwrap(), 1e-9));
        }
    }

    #[test]
    fn concave_psi_gamma_is_nonnegative((g, u, _h, v) in graph_and_fields()) {
        let f: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        for psi in [PsiFunction::log(), PsiFunction::sqrt(), PsiFunction::power(0.6).unwrap()] {
            prop_assert!(psi_gamma(&g, &psi, &f, v).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn heat_identity_holds((g, u, _h, v) in graph_and_fields()) {
        let f: Vec<f64> = u.iter().map(|x| x.exp()).collect();
        let r = heat_identity_residual(&g, &f, v).unwrap();
        let scale = 1.0 + f.iter().fold(0.0f64, |m, x| m.max(*x)) * g.vertex_count() as f64;
        prop_assert!(r.abs() < 1e-12 * scale, "residual {r}");
    }
}
