//! Subcommand dispatch, file plumbing and run manifests for the `embedlab`
//! binary. Every subcommand parses its inputs, calls one library operation
//! and writes the result as JSON (or SVG) into `--out-dir`, followed by a
//! `manifest.json` that `replay` can reproduce byte for byte.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use embedlab::counterexamples::{
    crossing_certificate, crossing_certificate_on, k33_space, k33_subspace_embedding, ladder_subspace,
    ladder_subspace_embedding, planar_ladder_space, random_subset,
};
use embedlab::embedder::{embed_rd, EmbedOptions, ProjectionMode};
use embedlab::gadget::{epsilon_dense_sphere, forward_embedding, product_space, reduction_parameters};
use embedlab::io::{
    from_json, k33_from_sidecar, to_json, CurvesArtifact, Embedding2dArtifact, K33Artifact, LadderSidecar,
    LayeredSidecar, MetricFile, ProductSidecar,
};
use embedlab::line::{extract_line_embedding, optimal_line_embedding_bruteforce, LineEmbedding};
use embedlab::metric::{distortion_of_map, EuclideanEmbedding, FiniteMetric};
use embedlab::reductions::{
    branching_graph, consistency_check, extract_ordering_2d, layered_embedding, layered_space, to_non_betweenness,
    BetweennessInstance, LayeredParams, Semantics,
};
use embedlab::svg::{render, RenderKind};
use embedlab::topology::{compute_holes, nesting_order, ClosedPolyline};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "EMBEDLAB_SEED";

pub const MANIFEST: &str = "manifest.json";

#[derive(Parser, Debug)]
#[command(
    name = "embedlab",
    version,
    about = "Metric embedding gadgets, reductions and checks"
)]
pub struct Cli {
    /// Seed of every random draw in the run (EMBEDLAB_SEED overrides it)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving outputs and the run manifest
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress the summary on stdout
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Product of a base metric with a sphere net, optionally forward-embedding a line embedding
    GenProduct(GenProduct),
    /// Layered space of a non-betweenness instance, with the embedding of a consistent ordering
    GenSection5(GenSection5),
    /// K₃,₃ space, its drawing and optionally an embedded random subspace
    GenK33(GenK33),
    /// Planar ladder space and optionally its gap subspace embedding
    GenLadder(GenLadder),
    /// Branching graph on the 2- and 3-subsets of [n]
    GenGraph(GenGraph),
    /// Distortion of an embedding of a metric
    Distortion(DistortionArgs),
    /// Bourgain embedding, random projection and local search into R^d
    Embed(Embed),
    /// Line embedding recovered from an embedding of a product space
    ExtractLine(ExtractLine),
    /// Containment order of disjoint closed curves
    Nesting(CurveArgs),
    /// Bounded complementary components of each closed curve
    Holes(CurveArgs),
    /// Betweenness to non-betweenness conversion and consistency check
    ReduceBetweenness(ReduceBetweenness),
    /// Crossing certificate of an embedding of a K₃,₃ space
    Certify(Certify),
    /// Exact minimum-distortion line embedding of a small metric
    OptimalLine(MetricArgs),
    /// SVG figure of an artifact
    Render(Render),
    /// Re-runs a stored manifest and compares output digests
    Replay(Replay),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenProduct(_) => "gen-product",
            Command::GenSection5(_) => "gen-section5",
            Command::GenK33(_) => "gen-k33",
            Command::GenLadder(_) => "gen-ladder",
            Command::GenGraph(_) => "gen-graph",
            Command::Distortion(_) => "distortion",
            Command::Embed(_) => "embed",
            Command::ExtractLine(_) => "extract-line",
            Command::Nesting(_) => "nesting",
            Command::Holes(_) => "holes",
            Command::ReduceBetweenness(_) => "reduce-betweenness",
            Command::Certify(_) => "certify",
            Command::OptimalLine(_) => "optimal-line",
            Command::Render(_) => "render",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GenProduct {
    /// Base metric, normalized to minimum distance 1
    #[arg(long)]
    pub metric: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Master constant C (≥ 64)
    #[arg(long, default_value_t = 100.0)]
    pub c: f64,
    /// Net radius, replacing R = C·D_max·Δ (requires --epsilon)
    #[arg(long, requires = "epsilon")]
    pub radius: Option<f64>,
    /// Net density, replacing ε = 1/(C·D_max) (requires --radius)
    #[arg(long, requires = "radius")]
    pub epsilon: Option<f64>,
    /// Line embedding to forward-embed into the product
    #[arg(long)]
    pub line: Option<PathBuf>,
    /// Largest product written as a dense metric file
    #[arg(long, default_value_t = 2000)]
    pub max_points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct GenSection5 {
    /// Non-betweenness instance
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Distortion bound D the parameters are sized for
    #[arg(long, default_value_t = 1.0)]
    pub d_bound: f64,
    /// Consistent ordering to embed, comma separated (default: the least one)
    #[arg(long, value_delimiter = ',')]
    pub ordering: Option<Vec<usize>>,
    /// Grid pitch of the planar ordering extraction
    #[arg(long, default_value_t = 0.05)]
    pub pitch: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct GenK33 {
    #[arg(long, default_value_t = 60)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Also embed a seeded random subspace of this many points
    #[arg(long)]
    pub subset_size: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct GenLadder {
    /// Number of ladder points, a perfect square ≥ 16
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Also embed a seeded subspace avoiding a central ladder window
    #[arg(long)]
    pub subspace: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GenGraph {
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct DistortionArgs {
    #[arg(long)]
    pub metric: PathBuf,
    #[arg(long)]
    pub embedding: PathBuf,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Gaussian,
    Orthonormal,
}

#[derive(Args, Debug, Serialize)]
pub struct Embed {
    #[arg(long)]
    pub metric: PathBuf,
    /// Target dimension d
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Pipeline restarts; restart i uses seed + i
    #[arg(long, default_value_t = 3)]
    pub restarts: u64,
    /// Explicit seed list, comma separated, replacing --restarts
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Projection trials per restart
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Local-search iterations per restart
    #[arg(long, default_value_t = 20_000)]
    pub refine_iters: usize,
    #[arg(long, value_enum, default_value_t = Mode::Gaussian)]
    pub mode: Mode,
}

#[derive(Args, Debug, Serialize)]
pub struct ExtractLine {
    /// Embedding of the product space
    #[arg(long)]
    pub embedding: PathBuf,
    /// Product sidecar (base metric, net and index map)
    #[arg(long)]
    pub sidecar: PathBuf,
    /// Product metric; checked against the sidecar when given
    #[arg(long)]
    pub metric: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArgs {
    /// Curves file: {"curves": [[[x, y], ...], ...], "pitch": h}
    #[arg(long)]
    pub curves: PathBuf,
    /// Grid pitch; defaults to the file's pitch, else 1/512 of the smallest curve
    #[arg(long)]
    pub pitch: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ReduceBetweenness {
    #[arg(long)]
    pub instance: PathBuf,
    /// Decide consistency and print "consistent" or "inconsistent"
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Certify {
    /// K₃,₃ sidecar
    #[arg(long)]
    pub sidecar: PathBuf,
    /// Planar embedding of the space or of --subset
    #[arg(long)]
    pub embedding: PathBuf,
    /// Point indices the embedding covers (default: all)
    #[arg(long)]
    pub subset: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MetricArgs {
    #[arg(long)]
    pub metric: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct Render {
    /// curves+holes, embedding2d, k33-drawing or ladder-graph
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub input: PathBuf,
    /// File name of the SVG inside --out-dir
    #[arg(long, default_value = "figure.svg")]
    pub output: String,
}

#[derive(Args, Debug, Serialize)]
pub struct Replay {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Lib(embedlab::Error),
    Io { path: PathBuf, source: std::io::Error },
    Invalid(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<embedlab::Error> for CliError {
    fn from(e: embedlab::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<embedlab::metric::MetricError> for CliError {
    fn from(e: embedlab::metric::MetricError) -> Self {
        CliError::Lib(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
    pub wall_time_s: f64,
}

/// A number for the stdout summary: 12 significant digits, so that values
/// off by rounding noise print as the value they approximate.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    format!("{rounded:?}")
}

fn nums(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-run state: where outputs go and which files were touched.
struct Run {
    out_dir: PathBuf,
    seed: u64,
    quiet: bool,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Run {
    fn read(&mut self, path: &Path) -> CliResult<String> {
        let bytes = fs::read(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let digest = FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        };
        if !self.inputs.contains(&digest) {
            self.inputs.push(digest);
        }
        String::from_utf8(bytes).map_err(|_| CliError::Invalid(format!("{}: not UTF-8", path.display())))
    }

    fn read_json<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let text = self.read(path)?;
        from_json(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    fn read_metric(&mut self, path: &Path) -> CliResult<FiniteMetric> {
        Ok(self.read_json::<MetricFile>(path)?.into_metric()?)
    }

    fn write(&mut self, name: &str, content: &str) -> CliResult<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, content).map_err(|source| CliError::Io { path, source })?;
        self.outputs.retain(|d| d.path != name);
        self.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        self.write(name, &to_json(value))
    }

    fn say(&self, msg: impl fmt::Display) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

/// Parses `argv` (program name first) and runs it; returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return EXIT_OK;
            }
            eprintln!("\n{}", Cli::command().render_long_help());
            return EXIT_USAGE;
        }
    };
    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(s) => s,
            Err(_) => {
                eprintln!("error: {SEED_ENV}={v:?} is not an unsigned integer");
                return EXIT_USAGE;
            }
        },
        Err(_) => cli.seed,
    };
    match execute(cli, seed, argv.get(1..).unwrap_or_default().to_vec()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn execute(cli: Cli, seed: u64, argv: Vec<String>) -> CliResult<()> {
    fs::create_dir_all(&cli.out_dir).map_err(|source| CliError::Io {
        path: cli.out_dir.clone(),
        source,
    })?;
    let mut run = Run {
        out_dir: cli.out_dir.clone(),
        seed,
        quiet: cli.quiet,
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    let start = Instant::now();
    match &cli.command {
        Command::GenProduct(a) => gen_product(&mut run, a)?,
        Command::GenSection5(a) => gen_section5(&mut run, a)?,
        Command::GenK33(a) => gen_k33(&mut run, a)?,
        Command::GenLadder(a) => gen_ladder(&mut run, a)?,
        Command::GenGraph(a) => gen_graph(&mut run, a)?,
        Command::Distortion(a) => distortion(&mut run, a)?,
        Command::Embed(a) => embed(&mut run, a)?,
        Command::ExtractLine(a) => extract_line(&mut run, a)?,
        Command::Nesting(a) => nesting(&mut run, a)?,
        Command::Holes(a) => holes(&mut run, a)?,
        Command::ReduceBetweenness(a) => reduce_betweenness(&mut run, a)?,
        Command::Certify(a) => certify(&mut run, a)?,
        Command::OptimalLine(a) => optimal_line(&mut run, a)?,
        Command::Render(a) => render_figure(&mut run, a)?,
        // replays write no manifest of their own
        Command::Replay(a) => return replay(&mut run, a),
    }
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        argv,
        params: serde_json::to_value(&cli.command).expect("serializable arguments"),
        seed,
        inputs: run.inputs.clone(),
        outputs: run.outputs.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let path = run.out_dir.join(MANIFEST);
    fs::write(&path, to_json(&manifest)).map_err(|source| CliError::Io { path, source })
}

fn gen_product(run: &mut Run, a: &GenProduct) -> CliResult<()> {
    let x = run.read_metric(&a.metric)?;
    let net = match (a.radius, a.epsilon) {
        (Some(r), Some(eps)) => epsilon_dense_sphere(a.dim, r, eps)?,
        _ => {
            let params = reduction_parameters(&x, a.d_max, a.dim, a.c)?;
            run.write_json("product.params.json", &params)?;
            params.net()?
        }
    };
    let p = product_space(&x, &net)?;
    run.write_json("product.sidecar.json", &ProductSidecar::from(&p))?;
    if p.len() <= a.max_points {
        run.write_json("product.metric.json", &MetricFile::from(&p.to_metric(a.max_points)?))?;
    }
    if let Some(path) = &a.line {
        let line: LineEmbedding = run.read_json(path)?;
        let g = forward_embedding(&line.positions, &p)?;
        run.write_json("product.embedding.json", &g)?;
        if a.dim == 2 && p.len() <= a.max_points {
            let nv = p.net.len();
            let curves = (0..x.len())
                .map(|l| g.coords[l * nv..(l + 1) * nv].iter().map(|c| [c[0], c[1]]).collect())
                .collect();
            run.write_json("product.curves.json", &CurvesArtifact { curves, pitch: None })?;
        }
    }
    run.say(format!(
        "product: {} points ({} layers × {} net points)",
        p.len(),
        x.len(),
        p.net.len()
    ));
    Ok(())
}

fn gen_section5(run: &mut Run, a: &GenSection5) -> CliResult<()> {
    let t: BetweennessInstance = run.read_json(&a.instance)?;
    t.validate()?;
    if t.semantics != Semantics::NonBetweenness {
        return Err(CliError::Invalid(
            "gen-section5 needs a non-betweenness instance; convert it with reduce-betweenness first".into(),
        ));
    }
    let params = LayeredParams::desk(a.dim, a.d_bound, t.locus_count(), run.seed)?;
    let s = layered_space(&t, &params, run.seed)?;
    run.write_json("layered.metric.json", &MetricFile::from(&s.metric))?;
    run.write_json("layered.sidecar.json", &LayeredSidecar::from(&s))?;
    let ordering = match &a.ordering {
        Some(o) => Some(o.clone()),
        None => consistency_check(&t)?,
    };
    let Some(ordering) = ordering else {
        run.say(format!(
            "layered space: {} points; instance inconsistent, no embedding",
            s.len()
        ));
        return Ok(());
    };
    let e = layered_embedding(&s, &ordering)?;
    let d = distortion_of_map(&s.metric, &e)?.distortion;
    run.write_json("layered.embedding.json", &e)?;
    let mut msg = format!(
        "layered space: {} points; ordering {ordering:?} embeds with distortion {}",
        s.len(),
        num(d)
    );
    if a.dim == 2 {
        let mut edges: Vec<[usize; 2]> = s.path_edges().into_iter().map(|(u, v)| [u, v]).collect();
        for layer in 1..=t.n {
            let idx = s.layer_indices(layer);
            edges.extend((0..idx.len()).map(|k| [idx[k], idx[(k + 1) % idx.len()]]));
        }
        let figure = Embedding2dArtifact {
            embedding: e.clone(),
            edges,
            labels: None,
        };
        run.write_json("layered.figure.json", &figure)?;
        let recovered = extract_ordering_2d(&s, &e, a.pitch)?;
        msg.push_str(&format!("; recovered ordering {recovered:?}"));
    }
    run.say(msg);
    Ok(())
}

fn gen_k33(run: &mut Run, a: &GenK33) -> CliResult<()> {
    let s = k33_space(a.n, a.k, a.eps)?;
    let drawing = s.drawing_embedding();
    let cert = crossing_certificate(&s, &drawing)?;
    run.write_json("k33.metric.json", &MetricFile::from(&s.metric))?;
    run.write_json("k33.sidecar.json", &s.sidecar())?;
    run.write_json("k33.drawing.json", &drawing)?;
    run.write_json(
        "k33.figure.json",
        &K33Artifact {
            sidecar: s.sidecar(),
            embedding: None,
            subset: None,
            witness: cert.witness,
        },
    )?;
    let mut msg = format!(
        "k33: {} points, w = {}, drawing certificate {}",
        s.n,
        num(s.w),
        num(cert.bound)
    );
    if let Some(size) = a.subset_size {
        let subset = random_subset(s.n, size, run.seed, 0);
        let sub = k33_subspace_embedding(&s, &subset)?;
        run.write_json("k33.subset.json", &subset)?;
        run.write_json("k33.subset-embedding.json", &sub.embedding)?;
        run.write_json(
            "k33.subset-figure.json",
            &K33Artifact {
                sidecar: s.sidecar(),
                embedding: Some(sub.embedding.clone()),
                subset: Some(subset.clone()),
                witness: None,
            },
        )?;
        msg.push_str(&format!(
            "; {size}-point subspace distortion {}",
            num(sub.report.distortion)
        ));
    }
    run.say(msg);
    Ok(())
}

fn gen_ladder(run: &mut Run, a: &GenLadder) -> CliResult<()> {
    let s = planar_ladder_space(a.n)?;
    run.write_json("ladder.metric.json", &MetricFile::from(&s.metric))?;
    run.write_json("ladder.sidecar.json", &LadderSidecar::from(&s))?;
    run.write_json("ladder.drawing.json", &s.drawing_embedding())?;
    let mut msg = format!(
        "ladder: {} points, aspect ratio {}",
        s.metric.len(),
        num(s.metric.aspect_ratio()?)
    );
    if a.subspace {
        let subset = ladder_subspace(&s, run.seed);
        let (e, report) = ladder_subspace_embedding(&s, &subset);
        run.write_json("ladder.subset.json", &subset)?;
        run.write_json("ladder.subset-embedding.json", &e)?;
        msg.push_str(&format!(
            "; {}-point subspace distortion {}",
            subset.len(),
            num(report.distortion)
        ));
    }
    run.say(msg);
    Ok(())
}

fn gen_graph(run: &mut Run, a: &GenGraph) -> CliResult<()> {
    let g = branching_graph(a.n)?;
    g.verify().map_err(CliError::Invalid)?;
    run.write_json("graph.json", &g)?;
    run.say(format!(
        "graph: {} vertices, {} edges; all subgraph properties hold",
        g.vertices.len(),
        g.edges.len()
    ));
    Ok(())
}

fn distortion(run: &mut Run, a: &DistortionArgs) -> CliResult<()> {
    let m = run.read_metric(&a.metric)?;
    let e: EuclideanEmbedding = run.read_json(&a.embedding)?;
    let report = distortion_of_map(&m, &e)?;
    run.write_json("distortion.json", &report)?;
    run.say(format!("distortion {}", num(report.distortion)));
    Ok(())
}

fn embed(run: &mut Run, a: &Embed) -> CliResult<()> {
    let m = run.read_metric(&a.metric)?;
    let seeds = match &a.seeds {
        Some(s) => s.clone(),
        None => (0..a.restarts).map(|i| run.seed.wrapping_add(i)).collect(),
    };
    let opts = EmbedOptions {
        trials: a.trials,
        refine_iters: a.refine_iters,
        mode: match a.mode {
            Mode::Gaussian => ProjectionMode::Gaussian,
            Mode::Orthonormal => ProjectionMode::Orthonormal,
        },
    };
    let (e, report) = embed_rd(&m, a.dim, &seeds, &opts)?;
    run.write_json("embedding.json", &e)?;
    run.write_json("embed-report.json", &report)?;
    run.say(format!(
        "distortion {} (bound {}, c_achieved {})",
        num(report.distortion),
        num(report.bound),
        num(report.c_achieved)
    ));
    Ok(())
}

/// Relative tolerance when checking a product metric file against its sidecar.
const PRODUCT_METRIC_TOLERANCE: f64 = 1e-9;

fn extract_line(run: &mut Run, a: &ExtractLine) -> CliResult<()> {
    let side: ProductSidecar = run.read_json(&a.sidecar)?;
    let p = side.into_space()?;
    if let Some(path) = &a.metric {
        let m = run.read_metric(path)?;
        if m.len() != p.len() {
            return Err(CliError::Invalid(format!(
                "metric has {} points, sidecar describes {}",
                m.len(),
                p.len()
            )));
        }
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                let (x, y) = (m.get(i, j), p.distance(i, j));
                if (x - y).abs() > PRODUCT_METRIC_TOLERANCE * x.max(y) {
                    return Err(CliError::Invalid(format!(
                        "metric entry ({i}, {j}) = {x} disagrees with the sidecar's {y}"
                    )));
                }
            }
        }
    }
    let g: EuclideanEmbedding = run.read_json(&a.embedding)?;
    let ex = extract_line_embedding(&p, &g)?;
    run.write_json("line.json", &ex.line)?;
    run.write_json("extraction.json", &ex)?;
    run.say(format!(
        "ordering {:?}, positions {}",
        ex.line.ordering,
        nums(&ex.line.positions)
    ));
    Ok(())
}

fn read_curves(run: &mut Run, a: &CurveArgs) -> CliResult<(Vec<ClosedPolyline>, f64)> {
    let art: CurvesArtifact = run.read_json(&a.curves)?;
    let curves = art
        .curves
        .into_iter()
        .map(ClosedPolyline::new)
        .collect::<embedlab::Result<Vec<_>>>()?;
    if curves.is_empty() {
        return Err(CliError::Invalid("curves file holds no curve".into()));
    }
    let pitch = a
        .pitch
        .or(art.pitch)
        .unwrap_or_else(|| curves.iter().map(|c| c.default_pitch()).fold(f64::INFINITY, f64::min));
    Ok((curves, pitch))
}

fn nesting(run: &mut Run, a: &CurveArgs) -> CliResult<()> {
    let (curves, h) = read_curves(run, a)?;
    let nest = nesting_order(&curves, h)?;
    run.write_json("nesting.json", &nest)?;
    run.say(format!("nesting order (outermost first) {:?}", nest.order));
    Ok(())
}

fn holes(run: &mut Run, a: &CurveArgs) -> CliResult<()> {
    let (curves, h) = read_curves(run, a)?;
    let reports = curves
        .iter()
        .map(|c| compute_holes(c, h))
        .collect::<embedlab::Result<Vec<_>>>()?;
    run.write_json("holes.json", &reports)?;
    for (i, r) in reports.iter().enumerate() {
        let best = r.holes.iter().map(|h| h.inradius_estimate).fold(0.0, f64::max);
        run.say(format!(
            "curve {i}: {} holes, largest inradius {}",
            r.holes.len(),
            num(best)
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct Consistency {
    consistent: bool,
    ordering: Option<Vec<usize>>,
}

fn reduce_betweenness(run: &mut Run, a: &ReduceBetweenness) -> CliResult<()> {
    let t: BetweennessInstance = run.read_json(&a.instance)?;
    t.validate()?;
    if t.semantics == Semantics::Betweenness {
        let nb = to_non_betweenness(&t)?;
        run.write_json("non-betweenness.json", &nb)?;
        run.say(format!(
            "{} betweenness triples → {} non-betweenness triples",
            t.triples.len(),
            nb.triples.len()
        ));
    }
    if a.check {
        let witness = consistency_check(&t)?;
        let verdict = Consistency {
            consistent: witness.is_some(),
            ordering: witness,
        };
        run.write_json("consistency.json", &verdict)?;
        run.say(if verdict.consistent {
            "consistent"
        } else {
            "inconsistent"
        });
    }
    Ok(())
}

fn certify(run: &mut Run, a: &Certify) -> CliResult<()> {
    let side = run.read_json(&a.sidecar)?;
    let s = k33_from_sidecar(&side)?;
    let e: EuclideanEmbedding = run.read_json(&a.embedding)?;
    let cert = match &a.subset {
        Some(path) => {
            let subset: Vec<usize> = run.read_json(path)?;
            crossing_certificate_on(&s, &subset, &e)?
        }
        None => crossing_certificate(&s, &e)?,
    };
    run.write_json("certificate.json", &cert)?;
    run.say(format!("distortion ≥ {}", num(cert.bound)));
    Ok(())
}

fn optimal_line(run: &mut Run, a: &MetricArgs) -> CliResult<()> {
    let m = run.read_metric(&a.metric)?;
    let opt = optimal_line_embedding_bruteforce(&m)?;
    run.write_json("optimal-line.json", &opt)?;
    run.write_json("line.json", &opt.embedding)?;
    run.say(format!(
        "optimal distortion {}, ordering {:?}",
        num(opt.distortion),
        opt.embedding.ordering
    ));
    Ok(())
}

fn render_figure(run: &mut Run, a: &Render) -> CliResult<()> {
    let kind: RenderKind = a.kind.parse()?;
    let text = run.read(&a.input)?;
    let svg = render(kind, &text)?;
    if Path::new(&a.output).components().count() != 1 {
        return Err(CliError::Invalid(format!(
            "--output must be a file name, got {:?}",
            a.output
        )));
    }
    run.write(&a.output, &svg)?;
    run.say(format!("wrote {}", a.output));
    Ok(())
}

fn replay(run: &mut Run, a: &Replay) -> CliResult<()> {
    let manifest: RunManifest = run.read_json(&a.manifest)?;
    for input in &manifest.inputs {
        let bytes = fs::read(&input.path).map_err(|source| CliError::Io {
            path: PathBuf::from(&input.path),
            source,
        })?;
        if sha256_hex(&bytes) != input.sha256 {
            return Err(CliError::Invalid(format!("input {} changed since the run", input.path)));
        }
    }
    let argv: Vec<String> = std::iter::once("embedlab".to_string())
        .chain(manifest.argv.iter().cloned())
        .collect();
    let mut cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Invalid(format!("stored argv: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Invalid("a replay manifest cannot be replayed".into()));
    }
    cli.out_dir = run.out_dir.clone();
    cli.quiet = true;
    execute(cli, manifest.seed, manifest.argv.clone())?;
    let mut mismatched = Vec::new();
    for out in &manifest.outputs {
        let path = run.out_dir.join(&out.path);
        let bytes = fs::read(&path).map_err(|source| CliError::Io { path, source })?;
        if sha256_hex(&bytes) != out.sha256 {
            mismatched.push(out.path.clone());
        }
    }
    if !mismatched.is_empty() {
        return Err(CliError::Invalid(format!(
            "outputs differ from the manifest: {mismatched:?}"
        )));
    }
    run.say(format!(
        "reproduced {} outputs of {}",
        manifest.outputs.len(),
        manifest.command
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn num_hides_rounding_noise() {
        assert_eq!(num(1.0000000000000002), "1.0");
        assert_eq!(num(0.1 + 0.2), "0.3");
        assert_eq!(num(5.827106670591), "5.82710667059");
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn sha256_matches_known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn global_flags_parse_after_the_subcommand() {
        let cli = Cli::try_parse_from(["embedlab", "gen-graph", "--n", "4", "--seed", "9", "--quiet"]).unwrap();
        assert_eq!(cli.seed, 9);
        assert!(cli.quiet);
        assert_eq!(cli.command.name(), "gen-graph");
    }

    #[test]
    fn stored_parameters_name_every_argument() {
        let cli = Cli::try_parse_from(["embedlab", "embed", "--metric", "m.json", "--seeds", "3,5"]).unwrap();
        let params = serde_json::to_value(&cli.command).unwrap();
        assert_eq!(params["seeds"], serde_json::json!([3, 5]));
        assert_eq!(params["mode"], "gaussian");
        assert_eq!(params["refine_iters"], 20_000);
    }

    #[test]
    fn radius_requires_epsilon() {
        assert!(Cli::try_parse_from(["embedlab", "gen-product", "--metric", "m.json", "--radius", "2"]).is_err());
    }
}
