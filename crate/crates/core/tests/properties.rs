//! Property tests for the invariants of each module.

use embedlab::counterexamples::{crossing_certificate_on, k33_space, random_subset};
use embedlab::embedder::{
    bourgain_embed, embed_rd, measured_distortion, random_project, refine_local_search, BourgainConfig, EmbedOptions,
    ProjectionConfig, ProjectionMode,
};
use embedlab::gadget::{epsilon_dense_sphere, product_space};
use embedlab::io::{from_json, metric_from_json, metric_to_json, to_json};
use embedlab::line::{order_feasibility, LineEmbedding};
use embedlab::metric::{distortion_of_map, shortest_path_closure, EuclideanEmbedding, FiniteMetric, WeightedEdge};
use embedlab::reductions::{consistency_check, to_non_betweenness, BetweennessInstance, Semantics};
use embedlab::topology::{circle_polyline, nesting_order, ClosedPolyline};
use proptest::prelude::*;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Shortest-path metric of a complete graph with the given weights.
fn closure_metric(n: usize, weights: &[f64]) -> FiniteMetric {
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(WeightedEdge::new(i, j, weights[k % weights.len()]));
            k += 1;
        }
    }
    shortest_path_closure(labels(n), &edges, None).unwrap()
}

fn metric_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = FiniteMetric> {
    (min_n..=max_n, prop::collection::vec(0.5f64..10.0, 1..40)).prop_map(|(n, w)| closure_metric(n, &w))
}

/// Points in general position: a random offset added to a spread-out grid.
fn points_strategy(n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-0.4f64..0.4, dim), n).prop_map(move |jit| {
        jit.into_iter()
            .enumerate()
            .map(|(i, j)| {
                j.iter()
                    .enumerate()
                    .map(|(k, x)| (i * (k + 1) % 7) as f64 + i as f64 * 0.1 + x)
                    .collect()
            })
            .collect()
    })
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distortion_is_scale_invariant(m in metric_strategy(2, 7), pts in points_strategy(7, 3), k in 1e-3f64..1e3) {
        let e = EuclideanEmbedding::new(3, pts[..m.len()].to_vec()).unwrap();
        let a = distortion_of_map(&m, &e).unwrap();
        let b = distortion_of_map(&m, &e.scaled(k)).unwrap();
        prop_assert!(a.distortion >= 1.0);
        prop_assert!(rel_close(a.distortion, b.distortion, 1e-9));
    }

    #[test]
    fn scaled_isometry_has_distortion_one(pts in points_strategy(6, 2), k in 1e-2f64..1e2) {
        let m = FiniteMetric::from_points(&pts);
        let e = EuclideanEmbedding::new(2, pts).unwrap().scaled(k);
        let r = distortion_of_map(&m, &e).unwrap();
        prop_assert!(rel_close(r.distortion, 1.0, 1e-9));
        prop_assert!(rel_close(r.alpha, k, 1e-9));
    }

    #[test]
    fn closure_is_a_metric_and_idempotent(m in metric_strategy(2, 8)) {
        prop_assert!(m.validate().is_ok());
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert!(m.get(i, k) <= m.get(i, j) + m.get(j, k));
                }
            }
        }
        let edges: Vec<WeightedEdge> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| WeightedEdge::new(i, j, m.get(i, j)))
            .collect();
        let again = shortest_path_closure(labels(n), &edges, None).unwrap();
        prop_assert_eq!(again, m);
    }

    #[test]
    fn aspect_ratio_is_scale_invariant(m in metric_strategy(2, 7), k in 1e-3f64..1e3) {
        let a = m.aspect_ratio().unwrap();
        prop_assert!(a >= 1.0);
        prop_assert!(rel_close(a, m.scaled(k).aspect_ratio().unwrap(), 1e-12));
    }

    #[test]
    fn metric_json_round_trip_is_exact(m in metric_strategy(1, 6)) {
        prop_assert_eq!(metric_from_json(&metric_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn circle_net_is_on_sphere_and_dense(r in 0.1f64..50.0, frac in 0.01f64..1.0) {
        let eps = frac * 2.0 * r;
        let net = epsilon_dense_sphere(2, r, eps).unwrap();
        let n = net.len();
        for (k, p) in net.points.iter().enumerate() {
            prop_assert!(rel_close(p[0].hypot(p[1]), r, 1e-9));
            let q = &net.points[(k + 1) % n];
            let gap = (p[0] * q[1] - p[1] * q[0]).atan2(p[0] * q[0] + p[1] * q[1]).rem_euclid(std::f64::consts::TAU);
            prop_assert!(gap <= eps / r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn product_metric_between_max_and_sum(m in metric_strategy(2, 4), r in 0.5f64..4.0) {
        let net = epsilon_dense_sphere(2, r, r).unwrap();
        let p = product_space(&m, &net).unwrap();
        for i in 0..p.len() {
            for j in 0..p.len() {
                let (a, v) = p.split(i);
                let (b, w) = p.split(j);
                let x = m.get(a, b);
                let y = embedlab::metric::euclidean(&net.points[v], &net.points[w]);
                let d = p.distance(i, j);
                prop_assert!(d >= x.max(y) * (1.0 - 1e-12));
                prop_assert!(d <= (x + y) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn order_feasibility_is_monotone(m in metric_strategy(3, 6), d in 1.0f64..6.0, extra in 0.0f64..4.0) {
        let ordering: Vec<usize> = (0..m.len()).collect();
        if let Some(pos) = order_feasibility(&m, &ordering, d) {
            prop_assert!(order_feasibility(&m, &ordering, d + extra).is_some());
            // a witness is noncontracting and within D of every distance
            for i in 0..m.len() {
                for j in (i + 1)..m.len() {
                    let gap = (pos[i] - pos[j]).abs();
                    prop_assert!(gap >= m.get(i, j) * (1.0 - 1e-9));
                    prop_assert!(gap <= d * m.get(i, j) * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn line_embedding_is_normalized(pos in prop::collection::vec(-100.0f64..100.0, 1..10)) {
        let l = LineEmbedding::from_positions(pos);
        let min = l.positions.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(min, 0.0);
        prop_assert!(l.ordering.windows(2).all(|w| l.positions[w[0]] <= l.positions[w[1]]));
    }

    #[test]
    fn concentric_polygons_nest_consistently(radii in prop::collection::btree_set(1u32..40, 2..5), sides in 3usize..40) {
        let radii: Vec<f64> = radii.into_iter().map(|r| r as f64).collect();
        let curves: Vec<ClosedPolyline> = radii.iter().map(|&r| circle_polyline([0.3, -0.2], r, sides)).collect();
        let nest = nesting_order(&curves, 0.1).unwrap();
        let n = curves.len();
        prop_assert_eq!(nest.agreements, n * (n - 1));
        // outermost first = largest radius first
        prop_assert!(nest.order.windows(2).all(|w| radii[w[0]] > radii[w[1]]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bourgain_coordinates_are_lipschitz(m in metric_strategy(2, 10), seed in 0u64..1000) {
        let e = bourgain_embed(&m, &BourgainConfig::for_size(m.len(), seed));
        for i in 0..m.len() {
            for j in 0..m.len() {
                for k in 0..e.dim {
                    prop_assert!((e.coords[i][k] - e.coords[j][k]).abs() <= m.get(i, j) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn more_trials_never_hurt(m in metric_strategy(4, 9), seed in 0u64..1000, trials in 1usize..12) {
        let b = bourgain_embed(&m, &BourgainConfig::for_size(m.len(), seed));
        let dim = 2.min(b.dim);
        let run = |t: usize| {
            random_project(&m, &b, &ProjectionConfig { dim, trials: t, seed, mode: ProjectionMode::Gaussian })
                .unwrap()
                .report
                .distortion
        };
        prop_assert!(run(trials + 1) <= run(trials));
    }

    #[test]
    fn refinement_never_worsens(m in metric_strategy(3, 7), pts in points_strategy(7, 2), seed in 0u64..1000) {
        let init = EuclideanEmbedding::new(2, pts[..m.len()].to_vec()).unwrap();
        let before = measured_distortion(&m, &init).distortion;
        let (out, rep) = refine_local_search(&m, &init, 300, seed);
        prop_assert!(rep.distortion <= before);
        prop_assert!(rel_close(measured_distortion(&m, &out).distortion, rep.distortion, 1e-12));
    }

    #[test]
    fn betweenness_conversion_preserves_consistency(
        n in 3usize..=5,
        raw in prop::collection::vec((1usize..=5, 1usize..=5, 1usize..=5), 1..=3),
    ) {
        let triples: Vec<[usize; 3]> = raw
            .into_iter()
            .map(|(a, b, c)| [a, b, c].map(|x| (x - 1) % n + 1))
            .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
            .collect();
        prop_assume!(!triples.is_empty());
        let t = BetweennessInstance::new(n, Semantics::Betweenness, triples).unwrap();
        let nb = to_non_betweenness(&t).unwrap();
        prop_assert_eq!(consistency_check(&t).unwrap().is_some(), consistency_check(&nb).unwrap().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn crossing_certificate_is_sound(seed in 0u64..10_000, k in 4usize..30, jitter in 0.0f64..0.05) {
        let s = k33_space(30, 5, 1.0).unwrap();
        let subset = random_subset(s.n, k, seed, 0);
        let mut rng = embedlab::rng::stream(seed, embedlab::rng::streams::SAMPLING, 1);
        let coords = subset
            .iter()
            .map(|&i| {
                let p = s.drawing[i];
                vec![p[0] + jitter * rand::Rng::random_range(&mut rng, -1.0..1.0), p[1] + jitter * rand::Rng::random_range(&mut rng, -1.0..1.0)]
            })
            .collect();
        let e = EuclideanEmbedding::new(2, coords).unwrap();
        let cert = crossing_certificate_on(&s, &subset, &e).unwrap();
        let d = measured_distortion(&s.metric.subspace(&subset), &e).distortion;
        prop_assert!(cert.bound <= d * (1.0 + 1e-9), "certificate {} above distortion {}", cert.bound, d);
    }
}

#[test]
fn embed_rd_is_deterministic() {
    let m = closure_metric(9, &[1.0, 2.5, 1.7, 3.1, 1.2]);
    let opts = EmbedOptions {
        refine_iters: 500,
        ..EmbedOptions::default()
    };
    let a = embed_rd(&m, 2, &[3, 4], &opts).unwrap();
    let b = embed_rd(&m, 2, &[3, 4], &opts).unwrap();
    assert_eq!(to_json(&a.1), to_json(&b.1));
    assert_eq!(a.0, b.0);
    let back: embedlab::embedder::EmbedReport = from_json(&to_json(&a.1)).unwrap();
    assert_eq!(back, a.1);
}
