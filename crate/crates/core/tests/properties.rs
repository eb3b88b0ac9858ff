use proptest::prelude::*;

use nbimmune::centrality::{x_degree_all, x_nb_exact};
use nbimmune::graph::{k_core_decomposition, load_edge_list_str, remove_node, to_edge_list, two_core, Graph};
use nbimmune::immunization::{
    immunize, immunize_naive_xnb, Backend, EigenTrace, ImmunizeOptions, Strategy as Heuristic, XDegreeImmunizer,
};
use nbimmune::oracle::{
    dense_aux, dense_nb_matrix, dense_reversal, block_identities, perron_root, DEFAULT_CAP,
};
use nbimmune::spectral::{eigen_drop_exact, leading_eigenpair, AuxOperator, EigenOptions, NbOperator};

fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e))
        })
    })
}

fn vector(len: usize, seed: u64) -> Vec<f64> {
    (0..len)
        .map(|i| ((((i as u64 + 1) * 2654435761) ^ seed) % 1000) as f64 / 500.0 - 1.0)
        .collect()
}

fn mat_vec(m: &nalgebra::DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * nalgebra::DVector::from_column_slice(x)).iter().copied().collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

const OPTS: EigenOptions = EigenOptions {
    tol: 1e-12,
    max_iter: 100_000,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_free_products_match_dense(g in small_graph(9), seed in any::<u64>()) {
        let op = NbOperator::new(&g);
        let b = dense_nb_matrix(&g, DEFAULT_CAP).unwrap();
        let p = dense_reversal(&g, DEFAULT_CAP).unwrap();
        let x = vector(op.dim(), seed);
        prop_assert!(max_diff(&op.apply(&x), &mat_vec(&b, &x)) < 1e-12);
        prop_assert!(max_diff(&op.apply_transpose(&x), &mat_vec(&b.transpose(), &x)) < 1e-12);
        prop_assert!(max_diff(&op.apply_reversal(&x), &mat_vec(&p, &x)) < 1e-12);
        // P B P = B^T
        prop_assert_eq!(&p * &b * &p, b.transpose());
    }

    #[test]
    fn aux_operator_matches_dense(g in small_graph(9), seed in any::<u64>()) {
        let op = AuxOperator::new(&g);
        let m = dense_aux(&g, DEFAULT_CAP).unwrap();
        let x = vector(op.dim(), seed);
        prop_assert!(max_diff(&op.apply(&x), &mat_vec(&m, &x)) < 1e-12);
        prop_assert!(max_diff(&op.apply_transpose(&x), &mat_vec(&m.transpose(), &x)) < 1e-12);
    }

    #[test]
    fn leading_eigenvalue_matches_dense(g in small_graph(9)) {
        let s = leading_eigenpair(&g, OPTS);
        let dense = perron_root(&dense_nb_matrix(&g, DEFAULT_CAP).unwrap());
        // nilpotent parts (trees) are resolved only to about eps^(1/k) by dense QR
        let tol = if s.lambda1 > 1.0 + 1e-9 { 1e-7 } else { 1e-3 };
        prop_assert!((s.lambda1 - dense).abs() < tol, "{} vs {}", s.lambda1, dense);
        prop_assert!(s.v_bar.iter().all(|&v| v >= 0.0));
        prop_assert_eq!(s.degenerate, s.lambda1 <= 1.0 + 1e-9);
    }

    #[test]
    fn edge_vector_is_a_normalized_eigenvector(g in small_graph(9)) {
        let s = leading_eigenpair(&g, OPTS);
        prop_assume!(!s.degenerate);
        let op = NbOperator::new(&g);
        let v = s.edge_vector(&g).unwrap();
        let bv = op.apply(&v);
        let scaled: Vec<f64> = v.iter().map(|x| s.lambda1 * x).collect();
        prop_assert!(max_diff(&bv, &scaled) < 1e-7);
        let pv = op.apply_reversal(&v);
        let vpv: f64 = v.iter().zip(&pv).map(|(a, b)| a * b).sum();
        prop_assert!((vpv - 1.0).abs() < 1e-7);
        prop_assert!(max_diff(&op.node_aggregate(&v), &s.v_bar) < 1e-7);
        // Pv is a left eigenvector
        let left = op.apply_transpose(&pv);
        let scaled: Vec<f64> = pv.iter().map(|x| s.lambda1 * x).collect();
        prop_assert!(max_diff(&left, &scaled) < 1e-7);
    }

    #[test]
    fn removal_never_raises_the_eigenvalue(g in small_graph(9), pick in any::<prop::sample::Index>()) {
        let c = pick.index(g.n());
        let drop = eigen_drop_exact(&g, c, OPTS).unwrap();
        prop_assert!(drop > -1e-7);
    }

    #[test]
    fn structural_identities_hold(g in small_graph(8), pick in any::<prop::sample::Index>()) {
        let c = pick.index(g.n());
        prop_assert!(block_identities(&g, c, DEFAULT_CAP).unwrap().all_hold());
    }

    #[test]
    fn x_degree_matches_pair_count(g in small_graph(10)) {
        let xd = x_degree_all(&g);
        for c in 0..g.n() {
            let nb = g.neighbors(c);
            let mut pairs = 0.0;
            for (a, &j) in nb.iter().enumerate() {
                for (b, &k) in nb.iter().enumerate() {
                    if a != b {
                        pairs += (g.degree(j) as f64 - 1.0) * (g.degree(k) as f64 - 1.0);
                    }
                }
            }
            prop_assert_eq!(xd[c], pairs);
        }
    }

    #[test]
    fn eigenvalue_trace_is_non_increasing(g in small_graph(10), k in 0usize..7) {
        let strategy = Heuristic::ALL[k];
        let opts = ImmunizeOptions { eigen: OPTS, trace: EigenTrace::Full };
        let r = immunize(&g, 3, strategy, Backend::Ipq, opts);
        let mut prev = r.lambda_before.unwrap();
        for &l in &r.lambda_after_each {
            prop_assert!(l <= prev + 1e-7, "{strategy}: {l} after {prev}");
            prev = l;
        }
        let mut seen = r.removed.clone();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), r.removed.len());
    }

    #[test]
    fn backends_agree(g in small_graph(12)) {
        let mut a = XDegreeImmunizer::new(&g, Backend::Map);
        let mut b = XDegreeImmunizer::new(&g, Backend::Ipq);
        for _ in 0..g.n() {
            let (sa, sb) = (a.step(), b.step());
            prop_assert_eq!(sa, sb);
            let fresh = x_degree_all(a.graph());
            for v in 0..g.n() {
                if let Some(x) = a.maintained(v) {
                    prop_assert_eq!(x as f64, fresh[v]);
                }
            }
        }
    }

    #[test]
    fn edge_list_round_trip(g in small_graph(10)) {
        prop_assume!(g.m() > 0);
        let loaded = load_edge_list_str(&to_edge_list(&g)).unwrap();
        let back = &loaded.graph;
        prop_assert_eq!(back.m(), g.m());
        for (u, v) in back.edges() {
            let (ou, ov) = (loaded.original_ids[u] as usize, loaded.original_ids[v] as usize);
            prop_assert!(g.has_edge(ou, ov));
        }
    }

    #[test]
    fn two_core_has_min_degree_two(g in small_graph(12)) {
        let core = two_core(&g);
        prop_assert!((0..core.graph.n()).all(|u| core.graph.degree(u) >= 2));
        let labels = k_core_decomposition(&g);
        let inside = labels.in_two_core.iter().filter(|&&b| b).count();
        prop_assert_eq!(inside, core.graph.n());
        let before = leading_eigenpair(&g, OPTS).lambda1;
        let after = leading_eigenpair(&core.graph, OPTS).lambda1;
        prop_assert!((before - after).abs() < 1e-7);
    }
}

#[test]
fn naive_xnb_picks_the_largest_exact_score() {
    let mut rng = nbimmune::generate::rng_from_seed(31);
    let opts = ImmunizeOptions {
        eigen: OPTS,
        trace: EigenTrace::Full,
    };
    for _ in 0..20 {
        let g = nbimmune::generate::erdos_renyi(12, 0.35, &mut rng).unwrap();
        if leading_eigenpair(&g, OPTS).degenerate {
            continue;
        }
        let scores: Vec<f64> = (0..g.n()).map(|c| x_nb_exact(&g, c, OPTS).unwrap().value).collect();
        let best = scores.iter().copied().fold(f64::MIN, f64::max);
        let r = immunize_naive_xnb(&g, 1, opts);
        let c = r.removed[0];
        assert!(scores[c] > best * (1.0 - 1e-9), "{c}: {} vs best {best}", scores[c]);
        assert!(eigen_drop_exact(&g, c, OPTS).unwrap() > 0.0);
    }
}

#[test]
fn removing_a_k4_vertex_leaves_a_triangle() {
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    let h = remove_node(&g, 0).unwrap();
    assert_eq!(h.n(), 4);
    assert_eq!(h.degree(0), 0);
    assert!((leading_eigenpair(&h, OPTS).lambda1 - 1.0).abs() < 1e-12);
    assert!((eigen_drop_exact(&g, 0, OPTS).unwrap() - 1.0).abs() < 1e-9);
}
