use nbimmune::error::Error;
use nbimmune::generate::{erdos_renyi, rng_from_seed};
use nbimmune::graph::{k_core_decomposition, Graph};
use nbimmune::oracle::*;
use nbimmune::spectral::{eigen_drop_exact, leading_eigenpair, EigenOptions};

fn k4() -> Graph {
    Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}

/// Two triangles sharing the edge 0-1, plus a pendant on 2.
fn diamond_with_tail() -> Graph {
    Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 4)])
}

fn k5_minus_edge() -> Graph {
    Graph::from_edges(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
}

#[test]
fn cap_is_enforced() {
    let g = k4();
    assert!(matches!(dense_nb_matrix(&g, 11), Err(Error::CapExceeded { size: 12, cap: 11 })));
    assert!(dense_nb_matrix(&g, 12).is_ok());
}

#[test]
fn k4_eigen_drop_expansion() {
    let r = eigen_drop_expansion(&k4(), 0, DEFAULT_CAP).unwrap();
    assert!((r.lambda1 - 2.0).abs() < 1e-9);
    assert!((r.lambda1_prime - 1.0).abs() < 1e-9);
    assert!((r.sum.re - r.true_drop).abs() < 1e-8);
    assert!(r.sum.im.abs() < 1e-8);
}

#[test]
fn dense_k5_eigen_drop_expansion() {
    let g = k5_minus_edge();
    let opts = EigenOptions::default();
    for c in [0, 2] {
        let r = eigen_drop_expansion(&g, c, DEFAULT_CAP).unwrap();
        let sparse = eigen_drop_exact(&g, c, opts).unwrap();
        assert!((r.sum.re - sparse).abs() < 1e-7, "node {c}: {} vs {sparse}", r.sum.re);
    }
}

#[test]
fn characteristic_ratio_on_k4() {
    let r = char_poly_ratio_check(&k4(), 1, &[-2.5, -0.3, 0.7, 1.9, 3.0, 0.0], DEFAULT_CAP).unwrap();
    assert_eq!(r.skipped, vec![0.0]);
    assert_eq!(r.evaluated.len(), 5);
    assert!(r.max_rel_error < 1e-10);
}

#[test]
fn pendant_removal_keeps_spectrum() {
    let g = diamond_with_tail();
    assert_eq!(k_core_decomposition(&g).one_shell(), vec![4]);
    let r = one_shell_spectrum_check(&g, 4, DEFAULT_CAP).unwrap();
    assert!(r.holds);
    assert_eq!(r.count_before, r.count_after);
    assert!(matches!(one_shell_spectrum_check(&g, 0, DEFAULT_CAP), Err(Error::Precondition(_))));
}

#[test]
fn x_nb_forms_agree_on_dense_k5() {
    let g = k5_minus_edge();
    let r = xnb_forms_check(&g, 0, EigenOptions::default(), DEFAULT_CAP).unwrap();
    assert!(r.max_rel_error() < 1e-8, "{r:?}");
    let sb = norm_identity_check(&g, EigenOptions::default(), DEFAULT_CAP).unwrap();
    assert!((sb.norm_v_bar - sb.mu_norm_f).abs() < 1e-9);
    assert!(sb.aux_structure_error < 1e-9);
    assert!(sb.left_residual < 1e-9);
    assert!(sb.sparse_max_diff < 1e-7);
}

#[test]
fn degenerate_graphs_are_rejected() {
    let c5 = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5)));
    assert!(matches!(
        xnb_forms_check(&c5, 0, EigenOptions::default(), DEFAULT_CAP),
        Err(Error::DegenerateSpectrum { .. })
    ));
    assert!(matches!(
        norm_identity_check(&c5, EigenOptions::default(), DEFAULT_CAP),
        Err(Error::DegenerateSpectrum { .. })
    ));
}

#[test]
fn x_degree_bound_is_the_walk_count() {
    let mut rng = rng_from_seed(77);
    let mut checked = 0;
    for _ in 0..30 {
        let g = erdos_renyi(8, 0.5, &mut rng).unwrap();
        if g.m() == 0 || leading_eigenpair(&g, EigenOptions::default()).degenerate {
            continue;
        }
        for c in 0..g.n() {
            let r = match qbound_check(&g, c, DEFAULT_CAP) {
                Ok(r) => r,
                Err(Error::Conditioning(_) | Error::DegenerateSpectrum { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            assert_eq!(r.x_degree_bound, nbimmune::centrality::x_degree(&g, c).unwrap());
            assert!(r.frobenius <= r.x_degree_bound + 1e-9);
            checked += 1;
        }
    }
    assert!(checked > 20, "only {checked} nodes checked");
}

#[test]
fn zero_line_peeling_keeps_nonzero_spectrum() {
    // a path hanging off a triangle: every tree edge gives zero lines in B
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]);
    let b = dense_nb_matrix(&g, DEFAULT_CAP).unwrap();
    let peeled = peel_zero_lines(&b);
    assert!(peeled.nrows() < b.nrows());
    let full = nonzero_spectrum(&b);
    let trimmed: Vec<_> = eigenvalues(&peeled).into_iter().filter(|z| z.norm() > 1e-8).collect();
    assert_eq!(full.len(), trimmed.len());
    assert!(hausdorff(&full, &trimmed) < 1e-8);
}
