use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use curvflow::curvature::{self, CurvatureContext};
use curvflow::engine::{layer_forward, Preset};
use curvflow::metric::{epsilon_star, limit_distance};
use curvflow::spectral::mean_transition_kernel;
use curvflow::transport::wasserstein1;
use curvflow::wl::{static_refine, FeatureKind};
use curvflow::{generate, DenseMatrix, DirectedWeightedGraph, NodeState, PairSelection};

fn digraph(seed: u64, n: usize, p: f64) -> DirectedWeightedGraph {
    generate::random_strongly_connected(&mut ChaCha8Rng::seed_from_u64(seed), n, p)
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn json_round_trip_is_bit_exact(seed in any::<u64>(), n in 1usize..9, p in 0.0f64..1.0) {
        let g = digraph(seed, n, p).with_name("g");
        let mut buf = Vec::new();
        g.write_json(&mut buf).unwrap();
        let back = DirectedWeightedGraph::read_json(buf.as_slice()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.name(), Some("g"));
    }

    #[test]
    fn dense_round_trip(seed in any::<u64>(), n in 2usize..9, p in 0.0f64..1.0) {
        let g = digraph(seed, n, p);
        let back = DirectedWeightedGraph::from_dense(&g.to_dense(), 0.0).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn kernel_invariants(seed in any::<u64>(), n in 2usize..10, p in 0.0f64..1.0) {
        let g = digraph(seed, n, p);
        let w = g.random_walk_matrix().unwrap();
        for row in w.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        let k = mean_transition_kernel(&g).unwrap();
        prop_assert!((k.m.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!(k.m.iter().all(|&m| m > 0.0));
        prop_assert!(k.residual <= 1e-10);
        for x in 0..n {
            prop_assert_eq!(k.mu[(x, x)], 0.0);
            prop_assert!((k.mu.row(x).iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            for y in 0..n {
                let lhs = k.m[x] * k.mu[(x, y)];
                let rhs = k.m[y] * k.mu[(y, x)];
                prop_assert!((lhs - rhs).abs() <= 1e-12, "detailed balance at ({}, {})", x, y);
            }
        }
    }

    #[test]
    fn limit_distance_is_a_quasi_metric(seed in any::<u64>(), n in 2usize..10, p in 0.0f64..1.0) {
        let d = limit_distance(&digraph(seed, n, p)).unwrap();
        for x in 0..n {
            prop_assert_eq!(d.get(x, x), 0.0);
            for y in 0..n {
                if x != y {
                    prop_assert!(d.get(x, y) > 0.0);
                }
                for z in 0..n {
                    prop_assert!(d.get(x, z) <= d.get(x, y) + d.get(y, z) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn limit_distance_is_homogeneous(seed in any::<u64>(), n in 2usize..9, lambda in 1e-3f64..1e3) {
        let g = digraph(seed, n, 0.4);
        let d = limit_distance(&g).unwrap();
        let ds = limit_distance(&g.scaled(lambda).unwrap()).unwrap();
        for x in 0..n {
            for y in 0..n {
                let want = d.get(x, y) / lambda;
                prop_assert!((ds.get(x, y) - want).abs() <= 1e-9 * want.max(1.0));
            }
        }
    }

    #[test]
    fn curvature_is_at_most_one_and_relabels(seed in any::<u64>(), n in 2usize..8, p in 0.0f64..1.0) {
        let g = digraph(seed, n, p);
        let perm = generate::permutation(&mut ChaCha8Rng::seed_from_u64(seed ^ 1), n);
        let a = curvature::curc_matrix(&g).unwrap();
        let b = curvature::curc_matrix(&g.permuted(&perm).unwrap()).unwrap();
        for x in 0..n {
            for y in 0..n {
                prop_assert!(a[(x, y)] <= 1.0 + 1e-12);
                prop_assert!((a[(x, y)] - b[(perm[x], perm[y])]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn masked_curvature_agrees_below_threshold(seed in any::<u64>(), n in 2usize..8, shrink in 1.0f64..100.0) {
        let g = digraph(seed, n, 0.5);
        let eps = epsilon_star(&g).unwrap() / shrink;
        let limit = curvature::curc(&g, &PairSelection::All).unwrap();
        let masked = curvature::curc_eps(&g, eps, &PairSelection::All).unwrap();
        for (a, b) in limit.values.iter().zip(&masked.values) {
            prop_assert!((a.kappa - b.kappa).abs() <= 1e-12);
        }
    }

    #[test]
    fn transport_plan_has_the_marginals(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_strongly_connected(&mut rng, n, 0.3);
        let d = limit_distance(&g).unwrap();
        let k = mean_transition_kernel(&g).unwrap();
        let (mu, nu) = (k.mu.row(0).to_vec(), k.mu.row(n - 1).to_vec());
        let t = wasserstein1(&mu, &nu, &d).unwrap();
        let (mut out, mut inn) = (vec![0.0; n], vec![0.0; n]);
        let mut cost = 0.0;
        for &(a, b, f) in &t.plan {
            prop_assert!(f > 0.0);
            out[a] += f;
            inn[b] += f;
            cost += f * d.get(a, b);
        }
        for v in 0..n {
            prop_assert!((out[v] - mu[v]).abs() <= 1e-9);
            prop_assert!((inn[v] - nu[v]).abs() <= 1e-9);
        }
        prop_assert!((cost - t.cost).abs() <= 1e-9);
        prop_assert!(t.plan.len() <= 2 * n - 1);
    }

    #[test]
    fn mean_curvature_matches_context(seed in any::<u64>(), n in 2usize..8) {
        let g = digraph(seed, n, 0.4);
        let ctx = CurvatureContext::new(&g).unwrap();
        for x in 0..n {
            let h = curvature::asymptotic_mean_curvature(&g, x).unwrap();
            prop_assert!((h - ctx.mean_curvature(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn engine_is_permutation_equivariant(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_connected_undirected(&mut rng, n, 0.4);
        let perm = generate::permutation(&mut rng, n);
        let h = NodeState::from_rows((0..n).map(|v| vec![v as f64, 1.0 / (v + 1) as f64]).collect()).unwrap();
        for preset in [Preset::Gcn, Preset::SageGcn, Preset::gin(), Preset::gated_zero(2)] {
            let cfg = preset.config(2);
            let a = layer_forward(&g, &cfg, &h).unwrap().permuted(&perm);
            let b = layer_forward(&g.permuted(&perm).unwrap(), &cfg, &h.permuted(&perm)).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-12);
        }
    }

    #[test]
    fn refinement_class_counts_survive_relabelling(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate::random_undirected(&mut rng, n, 0.4);
        let perm = generate::permutation(&mut rng, n);
        let kind: FeatureKind = "rrwp:3+spd:6".parse().unwrap();
        let a = static_refine(&kind.build(&g).unwrap(), None).unwrap();
        let b = static_refine(&kind.build(&g.permuted(&perm).unwrap()).unwrap(), None).unwrap();
        prop_assert_eq!(a.last().class_count(), b.last().class_count());
        prop_assert_eq!(a.last().signature(), b.last().signature());
    }
}

#[test]
fn dense_ingestion_examples() {
    let two = DirectedWeightedGraph::from_dense(&DenseMatrix::filled(2, 0.5), 0.0).unwrap();
    assert_eq!(two.weight(0, 1), Some(0.5));
    assert_eq!(two.stats().dropped_self_loops, 2);
    let k3 = DirectedWeightedGraph::from_dense(&DenseMatrix::filled(3, 1.0), 0.0).unwrap();
    assert_eq!(k3.edges().len(), 6);
    assert!(DirectedWeightedGraph::from_dense(&DenseMatrix::identity(3), 0.0).is_err());
}

#[test]
fn isoperimetric_examples() {
    let r = curvflow::isoperimetry::dirichlet_constant(&generate::complete(3), 0, 1.0).unwrap();
    assert!((r.i - 0.5).abs() < 1e-12);
    let r = curvflow::isoperimetry::dirichlet_constant(&generate::cycle(2), 0, 1.0).unwrap();
    assert!((r.i - 1.0).abs() < 1e-12);
}
