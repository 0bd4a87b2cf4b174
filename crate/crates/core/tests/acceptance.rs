//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
//! as constants next to each check.

use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use embedlab::counterexamples::{crossing_certificate, k33_space, k33_subspace_embedding, random_subset};
use embedlab::embedder::{embed_rd, measured_distortion, EmbedOptions};
use embedlab::gadget::{epsilon_dense_sphere, forward_embedding, product_space, reduction_parameters};
use embedlab::geometry::Point2;
use embedlab::line::{extract_line_embedding, optimal_line_embedding_bruteforce, order_feasibility, LineEmbedding};
use embedlab::metric::{distortion_of_map, shortest_path_closure, EuclideanEmbedding, FiniteMetric, WeightedEdge};
use embedlab::reductions::{
    branching_graph, consistency_check, extract_ordering_2d, layered_embedding, layered_space, random_instance,
    to_non_betweenness, BetweennessInstance, LayeredParams, Semantics,
};
use embedlab::rng::{stream, streams};
use embedlab::topology::{circle_polyline, compute_holes, nesting_order, pl_extension, slack_check, ClosedPolyline};
use rand::Rng;

/// Criteria run one at a time so each measured runtime is its own.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Writes to the stdout handle directly, which the test harness does not
/// capture, so the verdict lines appear in every run.
fn report(id: u32, pass: bool, detail: String) {
    let line = format!("criterion {id}: {} — {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

/// Random metric on `n` points with minimum distance 1 and aspect ratio ≤ `max_ratio`.
fn random_metric(n: usize, max_ratio: f64, seed: u64, sub: u64) -> FiniteMetric {
    let mut rng = stream(seed, streams::METRIC, sub);
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(WeightedEdge::new(i, j, rng.random_range(1.0..max_ratio)));
        }
    }
    let m = shortest_path_closure(labels, &edges, None).unwrap();
    let min = m.min_distance();
    m.scaled(1.0 / min)
}

/// Least distortion of a line embedding along a fixed ordering, by bisection
/// on the difference-constraint feasibility.
fn ordering_optimum(m: &FiniteMetric, ordering: &[usize]) -> f64 {
    let (mut lo, mut hi) = (1.0, m.len() as f64 * m.aspect_ratio().unwrap());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if order_feasibility(m, ordering, mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

struct RoundTrip {
    ordering_ok: bool,
    ratio: f64,
    nesting_ok: bool,
    agreements_ok: bool,
}

/// Forward-embeds the optimal line embedding into the product with C = 100,
/// d = 2, extracts it back, and checks the layer curves' nesting order.
fn round_trip(x: &FiniteMetric) -> RoundTrip {
    const C: f64 = 100.0;
    const ORDERING_TOL: f64 = 1e-6;
    let opt = optimal_line_embedding_bruteforce(x).unwrap();
    let params = reduction_parameters(x, 1.0, 2, C).unwrap();
    let p = product_space(x, &params.net().unwrap()).unwrap();
    let f = &opt.embedding.positions;
    let g = forward_embedding(f, &p).unwrap();
    let ex = extract_line_embedding(&p, &g).unwrap();
    let got = &ex.line.ordering;
    let mut rev = got.clone();
    rev.reverse();
    let ordering_ok = *got == opt.embedding.ordering
        || rev == opt.embedding.ordering
        || ordering_optimum(x, got) <= opt.distortion * (1.0 + ORDERING_TOL);
    let ratio = ex.line.distortion(x).unwrap().distortion / opt.distortion;

    // nesting order of the layer images, outermost first = descending f
    let nv = p.net.len();
    let curves: Vec<ClosedPolyline> = (0..x.len())
        .map(|a| ClosedPolyline::new(g.coords[a * nv..(a + 1) * nv].iter().map(|c| [c[0], c[1]]).collect()).unwrap())
        .collect();
    let (nesting_ok, agreements_ok) = match nesting_order(&curves, 0.25) {
        Ok(nest) => {
            let desc = nest.order.windows(2).all(|w| f[w[0]] > f[w[1]]);
            let n = x.len();
            (desc, nest.agreements == n * (n - 1))
        }
        Err(_) => (false, false),
    };
    RoundTrip {
        ordering_ok,
        ratio,
        nesting_ok,
        agreements_ok,
    }
}

#[test]
fn criterion_1_and_3_round_trip_and_nesting() {
    let _serial = serial();
    const RUNS: usize = 50;
    const MAX_RATIO: f64 = 1.3;
    const MIN_ORDERING_HITS: usize = 48;
    let start = Instant::now();
    let results: Vec<RoundTrip> = (0..RUNS)
        .map(|i| round_trip(&random_metric(3 + i % 3, 4.0, 1, i as u64)))
        .collect();
    let hits = results.iter().filter(|r| r.ordering_ok).count();
    let worst = results.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        hits >= MIN_ORDERING_HITS && worst <= MAX_RATIO,
        format!("optimal ordering recovered {hits}/{RUNS}, worst dist(extracted)/dist(f*) = {worst:.4} (≤ {MAX_RATIO}), {elapsed:.1}s"),
    );
    let nested = results.iter().filter(|r| r.nesting_ok).count();
    let agree = results.iter().filter(|r| r.agreements_ok).count();
    report(
        3,
        nested == RUNS && agree == RUNS,
        format!("nesting order total and descending in f on {nested}/{RUNS} forward embeddings; winding/flood fill agree on all pairs in {agree}/{RUNS}"),
    );
}

/// PL maps of a 0.02-dense unit-circle net: a noncontracting linear map with
/// singular values in [1, 1.5] plus a random bump of at most 0.04, or a
/// radial Fourier bump; only maps passing the slack check at δ = 0.1 count.
fn random_pl_map(points: &[Vec<f64>], seed: u64, sub: u64) -> Vec<Point2> {
    let mut rng = stream(seed, streams::SLACK, sub);
    let rot = |t: f64, v: Point2| [t.cos() * v[0] - t.sin() * v[1], t.sin() * v[0] + t.cos() * v[1]];
    if sub % 2 == 0 {
        let (a, b) = (rng.random_range(0.0..6.3), rng.random_range(0.0..6.3));
        let (s1, s2) = (rng.random_range(1.0..1.5), rng.random_range(1.0..1.5));
        let shift = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        points
            .iter()
            .map(|p| {
                let v = rot(b, [p[0], p[1]]);
                let v = rot(a, [s1 * v[0], s2 * v[1]]);
                let (r, t) = (rng.random_range(0.0..0.04), rng.random_range(0.0..6.3));
                [v[0] + shift[0] + r * f64::cos(t), v[1] + shift[1] + r * f64::sin(t)]
            })
            .collect()
    } else {
        let terms: Vec<(f64, f64, f64)> = (2..6)
            .map(|k| (k as f64, rng.random_range(0.0..0.04), rng.random_range(0.0..6.3)))
            .collect();
        points
            .iter()
            .map(|p| {
                let th = p[1].atan2(p[0]);
                let r = 1.05 + terms.iter().map(|(k, a, ph)| a * (k * th + ph).cos()).sum::<f64>();
                [r * th.cos(), r * th.sin()]
            })
            .collect()
    }
}

#[test]
fn criterion_2_hole_of_radius_quarter() {
    let _serial = serial();
    const MAPS: usize = 200;
    const DELTA: f64 = 0.1;
    const H: f64 = 1.0 / 512.0;
    let start = Instant::now();
    let net = epsilon_dense_sphere(2, 1.0, 0.02).unwrap();
    let (mut accepted, mut failures, mut sub) = (0, 0, 0u64);
    let mut smallest = f64::INFINITY;
    while accepted < MAPS {
        let images = random_pl_map(&net.points, 2, sub);
        sub += 1;
        if !slack_check(&net, &images, DELTA, 2000, sub).unwrap().pass {
            continue;
        }
        accepted += 1;
        let (curve, _) = pl_extension(&net, &images).unwrap();
        let holes = compute_holes(&curve, H).unwrap();
        let best = holes.holes.iter().map(|h| h.inradius_estimate).fold(0.0, f64::max);
        smallest = smallest.min(best);
        if best < 0.25 - 2.0 * H {
            failures += 1;
        }
    }
    report(
        2,
        failures == 0,
        format!(
            "{accepted} maps passing slack at δ = {DELTA} ({sub} drawn), failures {failures}, smallest largest-hole inradius {smallest:.4} (≥ {:.4}), {:.1}s",
            0.25 - 2.0 * H,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_4_layered_space_consistent_side() {
    let _serial = serial();
    const KAPPA: f64 = 4.0;
    const H: f64 = 0.05;
    let start = Instant::now();
    let t = BetweennessInstance::new(
        4,
        Semantics::NonBetweenness,
        vec![[3, 1, 2], [4, 1, 2], [4, 1, 3], [2, 3, 4], [1, 3, 4]],
    )
    .unwrap();
    let params = LayeredParams::desk(2, 1.0, t.locus_count(), 0).unwrap();
    let s = layered_space(&t, &params, 0).unwrap();
    let ordering = consistency_check(&t).unwrap().expect("instance is consistent");
    let e = layered_embedding(&s, &ordering).unwrap();
    let d = distortion_of_map(&s.metric, &e).unwrap().distortion;
    let recovered = extract_ordering_2d(&s, &e, H).unwrap();
    let consistent = t.first_violation(&recovered).is_none();
    report(
        4,
        d <= KAPPA * t.n as f64 && consistent,
        format!(
            "{} points, distortion {d:.4} = {:.4}·n (κ ≤ {KAPPA}), recovered ordering {recovered:?} consistent: {consistent}, {:.1}s",
            s.len(),
            d / t.n as f64,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_conversion_equivalence() {
    let _serial = serial();
    const RUNS: u64 = 500;
    let mut agree = 0;
    let mut consistent = 0;
    for i in 0..RUNS {
        let mut rng = stream(5, streams::INSTANCE, i);
        let n = rng.random_range(3..=5);
        let m = rng.random_range(1..=3);
        let t = random_instance(n, m, Semantics::Betweenness, &mut rng);
        let a = consistency_check(&t).unwrap().is_some();
        let b = consistency_check(&to_non_betweenness(&t).unwrap()).unwrap().is_some();
        if a == b {
            agree += 1;
        }
        if a {
            consistent += 1;
        }
    }
    report(
        5,
        agree == RUNS,
        format!("verdicts agree on {agree}/{RUNS} instances ({consistent} consistent)"),
    );
}

#[test]
fn criterion_6_branching_graph() {
    let _serial = serial();
    let mut failures = Vec::new();
    for n in 3..=7 {
        if let Err(e) = branching_graph(n).unwrap().verify() {
            failures.push(format!("n = {n}: {e}"));
        }
    }
    report(6, failures.is_empty(), format!("n = 3..7, failures {failures:?}"));
}

#[test]
fn criterion_7_k33() {
    let _serial = serial();
    const SUBSETS: u64 = 100;
    const MAX_SUBSET_DISTORTION: f64 = 1.5;
    const MIN_RATIO: f64 = 0.5;
    let start = Instant::now();
    let s = k33_space(60, 10, 0.5).unwrap();
    let worst = (0..SUBSETS)
        .map(|seed| {
            let sub = random_subset(s.n, s.k, seed, 0);
            k33_subspace_embedding(&s, &sub).unwrap().report.distortion
        })
        .fold(0.0, f64::max);
    let seeds: Vec<u64> = (0..10).collect();
    let (e, rep) = embed_rd(&s.metric, 2, &seeds, &EmbedOptions::default()).unwrap();
    let cert = crossing_certificate(&s, &e).unwrap();
    let ratio = cert.bound / (s.n as f64 * s.w);
    let sound = rep.distortion >= cert.bound;
    report(
        7,
        worst <= MAX_SUBSET_DISTORTION && ratio >= MIN_RATIO && sound,
        format!(
            "(a) worst distortion over {SUBSETS} random 10-subsets {worst:.4} (≤ {MAX_SUBSET_DISTORTION}); (b) best full-space distortion {:.4}, L = {:.4}, L/(n·w) = {ratio:.4} (≥ {MIN_RATIO}), sound: {sound}; {:.1}s",
            rep.distortion,
            cert.bound,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_upper_bound_pipeline() {
    let _serial = serial();
    const METRICS_PER_SIZE: u64 = 5;
    const MIN_SHARE: f64 = 0.8;
    let start = Instant::now();
    let mut runs = Vec::new();
    for n in [16usize, 32, 64] {
        for d in [2usize, 3] {
            for i in 0..METRICS_PER_SIZE {
                let m = if i % 2 == 0 {
                    random_metric(n, 10.0, 8, (n * 10 + i as usize) as u64)
                } else {
                    let mut rng = stream(8, streams::METRIC, (n * 100 + i as usize) as u64);
                    let pts: Vec<Vec<f64>> = (0..n)
                        .map(|_| (0..6).map(|_| rng.random_range(0.0..1.0)).collect())
                        .collect();
                    FiniteMetric::from_points(&pts)
                };
                let (_, rep) = embed_rd(&m, d, &[i, i + 100, i + 200], &EmbedOptions::default()).unwrap();
                runs.push((n, d, rep.c_achieved));
            }
        }
    }
    let ok = runs.iter().filter(|r| r.2 <= 1.0).count();
    for (n, d, c) in &runs {
        println!("  n = {n}, d = {d}: c_achieved = {c:.5}");
    }
    let share = ok as f64 / runs.len() as f64;
    report(
        8,
        share >= MIN_SHARE,
        format!(
            "c_achieved ≤ 1 in {ok}/{} runs ({:.0}%, need ≥ {:.0}%), {:.1}s",
            runs.len(),
            100.0 * share,
            100.0 * MIN_SHARE,
            start.elapsed().as_secs_f64()
        ),
    );
}

/// Two passes: collect every ratio, then take the extremes.
fn two_pass_distortion(m: &FiniteMetric, e: &EuclideanEmbedding) -> f64 {
    let mut ratios = Vec::new();
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            let d: f64 = e.coords[i]
                .iter()
                .zip(&e.coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            ratios.push(d / m.get(i, j));
        }
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Floyd–Warshall negative-cycle test of `ρ ≤ x_j − x_i ≤ D·ρ` along an ordering.
fn feasible_fw(m: &FiniteMetric, ordering: &[usize], d: f64) -> bool {
    let n = ordering.len();
    let mut w = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let rho = m.get(ordering[a], ordering[b]);
            // x_b − x_a ≤ D·ρ  and  x_a − x_b ≤ −ρ
            w[a][b] = w[a][b].min(d * rho);
            w[b][a] = w[b][a].min(-rho);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k] + w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    (0..n).all(|i| w[i][i] >= -1e-12)
}

/// Smallest `D` on a grid of pitch `GRID` feasible for some ordering.
fn grid_optimum(m: &FiniteMetric) -> f64 {
    const GRID: f64 = 1e-4;
    let n = m.len();
    let top = (n as f64 * m.aspect_ratio().unwrap() / GRID).ceil() as u64 + 1;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = top;
    permutations(&mut perm, 0, &mut |p| {
        if !feasible_fw(m, p, best as f64 * GRID) {
            return;
        }
        let (mut lo, mut hi) = (0u64, best);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if feasible_fw(m, p, mid as f64 * GRID) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        best = best.min(hi);
    });
    best as f64 * GRID
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

#[test]
fn criterion_9_oracle_cross_checks() {
    let _serial = serial();
    const DISTORTION_TOL: f64 = 1e-12;
    const GRID_TOL: f64 = 1e-4;
    // (a) distortion_of_map against the two-pass computation
    let mut worst_a: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = stream(9, streams::SAMPLING, i);
        let n = rng.random_range(2..30);
        let dim = rng.random_range(1..4);
        let m = random_metric(n, 5.0, 9, i);
        let coords: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let e = EuclideanEmbedding::new(dim, coords).unwrap();
        let a = distortion_of_map(&m, &e).unwrap().distortion;
        let b = two_pass_distortion(&m, &e);
        worst_a = worst_a.max((a - b).abs() / b);
        let c = measured_distortion(&m, &e).distortion;
        worst_a = worst_a.max((c - b).abs() / b);
    }
    // (b) brute-force optimum against the grid oracle
    let mut worst_b: f64 = 0.0;
    for i in 0..20u64 {
        let m = random_metric(2 + (i % 4) as usize, 4.0, 10, i);
        let brute = optimal_line_embedding_bruteforce(&m).unwrap();
        let grid = grid_optimum(&m);
        // the grid value is the first grid point at or above the optimum
        worst_b = worst_b.max((grid - brute.distortion).abs());
        let check = LineEmbedding::from_positions(brute.embedding.positions.clone())
            .distortion(&m)
            .unwrap()
            .distortion;
        worst_b = worst_b.max((check - brute.distortion).abs());
    }
    // (c) winding number against flood fill on every nesting run
    // concentric circles, nested squares and a layered-space embedding
    let mut runs = 0;
    let mut agree = 0;
    let mut check = |curves: &[ClosedPolyline], h: f64| {
        let nest = nesting_order(curves, h).unwrap_or_else(|e| panic!("{} curves: {e}", curves.len()));
        runs += 1;
        let n = curves.len();
        if nest.agreements == n * (n - 1) {
            agree += 1;
        }
    };
    for k in 2..6 {
        let curves: Vec<ClosedPolyline> = (1..=k)
            .map(|r| circle_polyline([0.3, -0.2], r as f64, 40 + 7 * r))
            .collect();
        check(&curves, 0.05);
    }
    let squares: Vec<ClosedPolyline> = [1.0, 2.5, 4.0]
        .iter()
        .map(|&s| ClosedPolyline::new(vec![[-s, -s], [s, -s], [s, s], [-s, s]]).unwrap())
        .collect();
    check(&squares, 0.1);
    let t = BetweennessInstance::new(3, Semantics::NonBetweenness, vec![[2, 1, 3]]).unwrap();
    let params = LayeredParams::desk(2, 1.0, 1, 0).unwrap();
    let s = layered_space(&t, &params, 0).unwrap();
    let e = layered_embedding(&s, &[1, 3, 2]).unwrap();
    let curves: Vec<ClosedPolyline> = (1..=3)
        .map(|l| {
            ClosedPolyline::new(
                s.layer_indices(l)
                    .iter()
                    .map(|&i| [e.coords[i][0], e.coords[i][1]])
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    check(&curves, 0.05);
    report(
        9,
        worst_a <= DISTORTION_TOL && worst_b <= GRID_TOL && agree == runs,
        format!(
            "(a) distortion_of_map vs two-pass oracle on 50 maps, worst relative gap {worst_a:.2e} (≤ {DISTORTION_TOL:e}); \
             (b) brute force vs 1e-4 grid oracle on 20 spaces, worst gap {worst_b:.2e} (≤ {GRID_TOL:e}); \
             (c) winding number agrees with flood fill in {agree}/{runs} nesting runs (round trips covered by criterion 3)"
        ),
    );
}
