//! End-to-end runs of the `embedlab` binary. Each subcommand's outputs are
//! compared with the library operation on the same inputs and with the
//! digests under `tests/golden/` (refresh them with `EMBEDLAB_BLESS=1`).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use embedlab::counterexamples::{
    crossing_certificate, k33_space, k33_subspace_embedding, ladder_subspace, ladder_subspace_embedding,
    planar_ladder_space, random_subset,
};
use embedlab::embedder::{embed_rd, EmbedOptions};
use embedlab::gadget::{epsilon_dense_sphere, forward_embedding, product_space};
use embedlab::io::{from_json, to_json, CurvesArtifact, MetricFile, ProductSidecar};
use embedlab::line::{extract_line_embedding, optimal_line_embedding_bruteforce, LineEmbedding};
use embedlab::metric::{distortion_of_map, EuclideanEmbedding, FiniteMetric};
use embedlab::reductions::{
    branching_graph, consistency_check, layered_embedding, layered_space, to_non_betweenness, BetweennessInstance,
    LayeredParams,
};
use embedlab::svg::{render, RenderKind};
use embedlab::topology::{circle_polyline, compute_holes, nesting_order, ClosedPolyline};
use embedlab_cli::RunManifest;
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

/// A scratch directory holding copies of the fixtures; runs use relative paths.
struct Scratch {
    dir: TempDir,
}

impl Scratch {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
        for entry in fs::read_dir(data).unwrap() {
            let entry = entry.unwrap();
            fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
        }
        Scratch { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }

    fn write(&self, rel: &str, text: &str) {
        fs::write(self.path(rel), text).unwrap();
    }

    fn run_env(&self, args: &[&str], env: &[(&str, &str)]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_embedlab"));
        cmd.args(args)
            .current_dir(self.dir.path())
            .env_remove(embedlab_cli::SEED_ENV);
        for (k, v) in env {
            cmd.env(k, v);
        }
        let out = cmd.output().unwrap();
        Output {
            code: out.status.code().unwrap_or(-1),
            stdout: String::from_utf8(out.stdout).unwrap(),
            stderr: String::from_utf8(out.stderr).unwrap(),
        }
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_env(args, &[])
    }

    /// Runs and insists on success.
    fn ok(&self, args: &[&str]) -> Output {
        let out = self.run(args);
        assert_eq!(out.code, 0, "{args:?} failed: {}", out.stderr);
        out
    }

    fn manifest(&self, out_dir: &str) -> RunManifest {
        from_json(&self.read(&format!("{out_dir}/manifest.json"))).unwrap()
    }

    fn metric(&self, rel: &str) -> FiniteMetric {
        from_json::<MetricFile>(&self.read(rel)).unwrap().into_metric().unwrap()
    }
}

/// Compares the manifest's output digests with the stored golden digests.
fn golden(s: &Scratch, case: &str, out_dir: &str) {
    let digests: BTreeMap<String, String> = s
        .manifest(out_dir)
        .outputs
        .into_iter()
        .map(|d| (d.path, d.sha256))
        .collect();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{case}.json"));
    if std::env::var_os("EMBEDLAB_BLESS").is_some() {
        fs::write(&path, to_json(&digests)).unwrap();
        return;
    }
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let expected: BTreeMap<String, String> = from_json(&text).unwrap();
    assert_eq!(digests, expected, "golden digests of {case}");
}

/// Replays the manifest in a fresh directory; every output must come back identical.
fn replays(s: &Scratch, out_dir: &str) {
    let again = format!("{out_dir}-replay");
    let manifest = format!("{out_dir}/manifest.json");
    let out = s.ok(&["replay", "--manifest", &manifest, "--out-dir", &again]);
    assert!(out.stdout.contains("reproduced"), "{}", out.stdout);
    for d in s.manifest(out_dir).outputs {
        assert_eq!(
            s.read(&format!("{out_dir}/{}", d.path)),
            s.read(&format!("{again}/{}", d.path))
        );
    }
}

#[test]
fn distortion_of_an_isometric_pair_is_one() {
    let s = Scratch::new();
    let out = s.ok(&[
        "distortion",
        "--metric",
        "tri.json",
        "--embedding",
        "iso.json",
        "--out-dir",
        "o",
    ]);
    assert_eq!(out.stdout.trim(), "distortion 1.0");
    let m = s.metric("tri.json");
    let e: EuclideanEmbedding = from_json(&s.read("iso.json")).unwrap();
    assert_eq!(
        s.read("o/distortion.json"),
        to_json(&distortion_of_map(&m, &e).unwrap())
    );
    golden(&s, "distortion", "o");
    replays(&s, "o");
}

#[test]
fn cyclic_betweenness_instance_is_inconsistent() {
    let s = Scratch::new();
    let out = s.ok(&[
        "reduce-betweenness",
        "--instance",
        "cyclic.json",
        "--check",
        "--out-dir",
        "o",
    ]);
    assert_eq!(out.stdout.lines().last(), Some("inconsistent"));
    let t: BetweennessInstance = from_json(&s.read("cyclic.json")).unwrap();
    assert!(consistency_check(&t).unwrap().is_none());
    assert_eq!(
        s.read("o/non-betweenness.json"),
        to_json(&to_non_betweenness(&t).unwrap())
    );
    let verdict: serde_json::Value = from_json(&s.read("o/consistency.json")).unwrap();
    assert_eq!(verdict["consistent"], false);
    golden(&s, "reduce-betweenness", "o");
    replays(&s, "o");
}

#[test]
fn consistent_instance_reports_an_ordering() {
    let s = Scratch::new();
    let out = s.ok(&[
        "reduce-betweenness",
        "--instance",
        "nb.json",
        "--check",
        "--out-dir",
        "o",
    ]);
    assert_eq!(out.stdout.trim(), "consistent");
    let t: BetweennessInstance = from_json(&s.read("nb.json")).unwrap();
    let verdict: serde_json::Value = from_json(&s.read("o/consistency.json")).unwrap();
    assert_eq!(
        verdict["ordering"],
        serde_json::to_value(consistency_check(&t).unwrap()).unwrap()
    );
}

#[test]
fn forward_embedded_product_round_trips_through_extract_line() {
    let s = Scratch::new();
    let gen = [
        "gen-product",
        "--metric",
        "x.json",
        "--radius",
        "8",
        "--epsilon",
        "1",
        "--line",
        "line.json",
        "--out-dir",
        "p",
    ];
    s.ok(&gen);
    let x = s.metric("x.json");
    let line: LineEmbedding = from_json(&s.read("line.json")).unwrap();
    let p = product_space(&x, &epsilon_dense_sphere(2, 8.0, 1.0).unwrap()).unwrap();
    let g = forward_embedding(&line.positions, &p).unwrap();
    assert_eq!(s.read("p/product.sidecar.json"), to_json(&ProductSidecar::from(&p)));
    assert_eq!(s.read("p/product.embedding.json"), to_json(&g));
    assert_eq!(
        s.read("p/product.metric.json"),
        to_json(&MetricFile::from(&p.to_metric(2000).unwrap()))
    );
    golden(&s, "gen-product", "p");
    replays(&s, "p");

    let args = [
        "extract-line",
        "--metric",
        "p/product.metric.json",
        "--embedding",
        "p/product.embedding.json",
        "--sidecar",
        "p/product.sidecar.json",
        "--out-dir",
        "l",
    ];
    s.ok(&args);
    let got: LineEmbedding = from_json(&s.read("l/line.json")).unwrap();
    assert_eq!(got.ordering, line.ordering);
    assert_eq!(
        s.read("l/extraction.json"),
        to_json(&extract_line_embedding(&p, &g).unwrap())
    );
    golden(&s, "extract-line", "l");
    replays(&s, "l");

    // the extracted line feeds straight back into gen-product
    s.ok(&[
        "gen-product",
        "--metric",
        "x.json",
        "--radius",
        "8",
        "--epsilon",
        "1",
        "--line",
        "l/line.json",
        "--out-dir",
        "q",
    ]);
}

#[test]
fn extract_line_rejects_a_metric_that_disagrees_with_the_sidecar() {
    let s = Scratch::new();
    s.ok(&[
        "gen-product",
        "--metric",
        "x.json",
        "--radius",
        "8",
        "--epsilon",
        "1",
        "--line",
        "line.json",
        "--out-dir",
        "p",
    ]);
    let args = [
        "extract-line",
        "--metric",
        "tri.json",
        "--embedding",
        "p/product.embedding.json",
        "--sidecar",
        "p/product.sidecar.json",
        "--out-dir",
        "l",
    ];
    let out = s.run(&args);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("points"), "{}", out.stderr);
}

fn write_circles(s: &Scratch) -> Vec<ClosedPolyline> {
    let curves: Vec<ClosedPolyline> = [3.0, 1.0, 2.0]
        .iter()
        .map(|&r| circle_polyline([0.0, 0.0], r, 64))
        .collect();
    let art = CurvesArtifact {
        curves: curves.iter().map(|c| c.vertices.clone()).collect(),
        pitch: Some(0.02),
    };
    s.write("circles.json", &to_json(&art));
    curves
}

#[test]
fn nesting_and_holes_match_the_library() {
    let s = Scratch::new();
    let curves = write_circles(&s);
    let out = s.ok(&["nesting", "--curves", "circles.json", "--out-dir", "n"]);
    assert!(out.stdout.contains("[0, 2, 1]"), "{}", out.stdout);
    assert_eq!(
        s.read("n/nesting.json"),
        to_json(&nesting_order(&curves, 0.02).unwrap())
    );
    golden(&s, "nesting", "n");
    replays(&s, "n");

    s.ok(&["holes", "--curves", "circles.json", "--out-dir", "h"]);
    let holes: Vec<_> = curves.iter().map(|c| compute_holes(c, 0.02).unwrap()).collect();
    assert_eq!(s.read("h/holes.json"), to_json(&holes));
    golden(&s, "holes", "h");
    replays(&s, "h");
}

#[test]
fn three_concentric_circles_render_with_order_labels() {
    let s = Scratch::new();
    write_circles(&s);
    s.ok(&[
        "render",
        "--kind",
        "curves+holes",
        "--input",
        "circles.json",
        "--out-dir",
        "r",
    ]);
    let svg = s.read("r/figure.svg");
    assert_eq!(svg.matches("<path").count(), 3);
    for label in ["1", "2", "3"] {
        assert!(svg.contains(&format!(">{label}</text>")), "label {label} missing");
    }
    assert_eq!(svg, render(RenderKind::CurvesHoles, &s.read("circles.json")).unwrap());
    s.ok(&[
        "render",
        "--kind",
        "curves+holes",
        "--input",
        "circles.json",
        "--out-dir",
        "r2",
    ]);
    assert_eq!(svg, s.read("r2/figure.svg"));
    golden(&s, "render-curves", "r");
    replays(&s, "r");
}

#[test]
fn layered_space_pipeline_embeds_renders_and_recovers_the_ordering() {
    let s = Scratch::new();
    let out = s.ok(&["gen-section5", "--instance", "nb.json", "--out-dir", "s"]);
    let t: BetweennessInstance = from_json(&s.read("nb.json")).unwrap();
    let ordering = consistency_check(&t).unwrap().unwrap();
    assert!(
        out.stdout.contains(&format!("recovered ordering {ordering:?}")),
        "{}",
        out.stdout
    );
    let params = LayeredParams::desk(2, 1.0, t.locus_count(), 0).unwrap();
    let space = layered_space(&t, &params, 0).unwrap();
    assert_eq!(
        s.read("s/layered.metric.json"),
        to_json(&MetricFile::from(&space.metric))
    );
    assert_eq!(
        s.read("s/layered.embedding.json"),
        to_json(&layered_embedding(&space, &ordering).unwrap())
    );
    golden(&s, "gen-section5", "s");
    replays(&s, "s");

    s.ok(&[
        "render",
        "--kind",
        "embedding2d",
        "--input",
        "s/layered.figure.json",
        "--out-dir",
        "r",
    ]);
    let svg = s.read("r/figure.svg");
    assert!(svg.contains("<line") || svg.contains("<path"));
    assert_eq!(
        svg,
        render(RenderKind::Embedding2d, &s.read("s/layered.figure.json")).unwrap()
    );
    golden(&s, "render-layered", "r");
}

#[test]
fn k33_generation_certification_and_rendering() {
    let s = Scratch::new();
    s.ok(&["gen-k33", "--subset-size", "10", "--seed", "7", "--out-dir", "k"]);
    let space = k33_space(60, 10, 0.5).unwrap();
    let subset = random_subset(60, 10, 7, 0);
    assert_eq!(s.read("k/k33.metric.json"), to_json(&MetricFile::from(&space.metric)));
    assert_eq!(s.read("k/k33.subset.json"), to_json(&subset));
    let sub = k33_subspace_embedding(&space, &subset).unwrap();
    assert_eq!(s.read("k/k33.subset-embedding.json"), to_json(&sub.embedding));
    golden(&s, "gen-k33", "k");
    replays(&s, "k");

    s.ok(&[
        "certify",
        "--sidecar",
        "k/k33.sidecar.json",
        "--embedding",
        "k/k33.drawing.json",
        "--out-dir",
        "c",
    ]);
    let cert = crossing_certificate(&space, &space.drawing_embedding()).unwrap();
    assert_eq!(s.read("c/certificate.json"), to_json(&cert));
    assert!(cert.bound > 0.0);
    golden(&s, "certify", "c");
    replays(&s, "c");

    for (kind, input) in [
        ("k33-drawing", "k/k33.figure.json"),
        ("k33-drawing", "k/k33.subset-figure.json"),
    ] {
        s.ok(&["render", "--kind", kind, "--input", input, "--out-dir", "r"]);
        assert_eq!(
            s.read("r/figure.svg"),
            render(kind.parse().unwrap(), &s.read(input)).unwrap()
        );
    }
}

#[test]
fn ladder_generation_and_rendering() {
    let s = Scratch::new();
    s.ok(&["gen-ladder", "--n", "64", "--subspace", "--seed", "3", "--out-dir", "l"]);
    let space = planar_ladder_space(64).unwrap();
    let subset = ladder_subspace(&space, 3);
    let (e, _) = ladder_subspace_embedding(&space, &subset);
    assert_eq!(
        s.read("l/ladder.metric.json"),
        to_json(&MetricFile::from(&space.metric))
    );
    assert_eq!(s.read("l/ladder.subset-embedding.json"), to_json(&e));
    golden(&s, "gen-ladder", "l");
    replays(&s, "l");

    s.ok(&[
        "render",
        "--kind",
        "ladder-graph",
        "--input",
        "l/ladder.sidecar.json",
        "--out-dir",
        "r",
    ]);
    assert_eq!(
        s.read("r/figure.svg"),
        render(RenderKind::LadderGraph, &s.read("l/ladder.sidecar.json")).unwrap()
    );
    golden(&s, "render-ladder", "r");
}

#[test]
fn branching_graph_matches_the_library() {
    let s = Scratch::new();
    s.ok(&["gen-graph", "--n", "5", "--out-dir", "g"]);
    assert_eq!(s.read("g/graph.json"), to_json(&branching_graph(5).unwrap()));
    golden(&s, "gen-graph", "g");
    replays(&s, "g");
}

#[test]
fn optimal_line_matches_the_library() {
    let s = Scratch::new();
    let out = s.ok(&["optimal-line", "--metric", "x.json", "--out-dir", "o"]);
    let opt = optimal_line_embedding_bruteforce(&s.metric("x.json")).unwrap();
    assert_eq!(s.read("o/optimal-line.json"), to_json(&opt));
    assert_eq!(s.read("o/line.json"), to_json(&opt.embedding));
    // a-b-c at 0, 1, 2.5 stretches d(a, c) = 2 by 5/4 and contracts nothing
    assert!(out.stdout.starts_with("optimal distortion 1.25,"), "{}", out.stdout);
    golden(&s, "optimal-line", "o");
    replays(&s, "o");
}

#[test]
fn embed_uses_consecutive_seeds_per_restart() {
    let s = Scratch::new();
    s.ok(&["gen-k33", "--n", "24", "--k", "4", "--out-dir", "k"]);
    let args = [
        "embed",
        "--metric",
        "k/k33.metric.json",
        "--refine-iters",
        "500",
        "--seed",
        "4",
        "--out-dir",
        "e",
    ];
    s.ok(&args);
    let m = s.metric("k/k33.metric.json");
    let opts = EmbedOptions {
        refine_iters: 500,
        ..EmbedOptions::default()
    };
    let (e, report) = embed_rd(&m, 2, &[4, 5, 6], &opts).unwrap();
    assert_eq!(s.read("e/embedding.json"), to_json(&e));
    assert_eq!(s.read("e/embed-report.json"), to_json(&report));
    golden(&s, "embed", "e");
    replays(&s, "e");
}

#[test]
fn seed_variable_overrides_the_flag() {
    let s = Scratch::new();
    let args = ["gen-k33", "--subset-size", "10", "--seed", "3", "--out-dir", "k"];
    assert_eq!(s.run_env(&args, &[("EMBEDLAB_SEED", "5")]).code, 0);
    assert_eq!(s.manifest("k").seed, 5);
    assert_eq!(s.read("k/k33.subset.json"), to_json(&random_subset(60, 10, 5, 0)));
    // the replay uses the recorded seed whatever the environment says
    let out = s.run_env(
        &["replay", "--manifest", "k/manifest.json", "--out-dir", "r"],
        &[("EMBEDLAB_SEED", "9")],
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(s.read("r/k33.subset.json"), s.read("k/k33.subset.json"));

    let bad = s.run_env(&args, &[("EMBEDLAB_SEED", "five")]);
    assert_eq!(bad.code, 2);
}

#[test]
fn usage_errors_exit_two_and_print_the_grammar() {
    let s = Scratch::new();
    for args in [
        &["frobnicate"][..],
        &["distortion", "--metric", "tri.json"],
        &["gen-graph", "--n", "x"],
        &[],
    ] {
        let out = s.run(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stderr.contains("Commands:"), "{args:?}: {}", out.stderr);
    }
    assert_eq!(s.run(&["--help"]).code, 0);
}

#[test]
fn validation_errors_exit_one_and_name_the_problem() {
    let s = Scratch::new();
    s.write("asym.json", r#"{"labels": ["a","b"], "dist": [[0,1],[2,0]]}"#);
    s.write("broken.json", "{");
    let cases: [(&[&str], &str); 6] = [
        (
            &["distortion", "--metric", "missing.json", "--embedding", "iso.json"],
            "missing.json",
        ),
        (
            &["distortion", "--metric", "broken.json", "--embedding", "iso.json"],
            "broken.json",
        ),
        (&["optimal-line", "--metric", "asym.json"], "differs"),
        (
            &["distortion", "--metric", "x.json", "--embedding", "line.json"],
            "line.json",
        ),
        (&["gen-section5", "--instance", "cyclic.json"], "non-betweenness"),
        (&["render", "--kind", "pie-chart", "--input", "tri.json"], "pie-chart"),
    ];
    for (args, needle) in cases {
        let out = s.run(args);
        assert_eq!(out.code, 1, "{args:?}: {}", out.stderr);
        assert!(out.stderr.to_lowercase().contains(needle), "{args:?}: {}", out.stderr);
    }
}

#[test]
fn replay_refuses_changed_inputs() {
    let s = Scratch::new();
    s.ok(&[
        "distortion",
        "--metric",
        "tri.json",
        "--embedding",
        "iso.json",
        "--out-dir",
        "o",
    ]);
    s.write("iso.json", r#"{"dim": 2, "coords": [[0,0],[2,0],[1,1.7]]}"#);
    let out = s.run(&["replay", "--manifest", "o/manifest.json", "--out-dir", "r"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("iso.json"), "{}", out.stderr);
}

#[test]
fn quiet_suppresses_the_summary() {
    let s = Scratch::new();
    let out = s.ok(&[
        "distortion",
        "--metric",
        "tri.json",
        "--embedding",
        "iso.json",
        "--quiet",
        "--out-dir",
        "o",
    ]);
    assert!(out.stdout.is_empty());
    assert!(s.path("o/distortion.json").exists());
}
