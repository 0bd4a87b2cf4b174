//! Baseline approximation embedder: Bourgain's random-subset embedding,
//! Gaussian random projection to `R^d`, and a derivative-free local search
//! that polishes the result.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{distortion_unchecked, DistortionReport, EuclideanEmbedding, FiniteMetric};
use crate::rng::{self, streams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BourgainConfig {
    pub scales: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl BourgainConfig {
    /// `q = ⌈log₂ n⌉` scales and `L = ⌈2·log₂ n⌉` repetitions (both ≥ 1).
    pub fn for_size(n: usize, seed: u64) -> Self {
        let lg = (n.max(2) as f64).log2();
        Self {
            scales: (lg.ceil() as usize).max(1),
            repetitions: ((2.0 * lg).ceil() as usize).max(1),
            seed,
        }
    }

    pub fn dimension(&self) -> usize {
        self.scales * self.repetitions
    }
}

/// Coordinate `(t, ℓ)` of `x` is `ρ(x, S_{t,ℓ})` for a random subset that
/// keeps each point with probability `2^{−t}`; empty draws are repeated.
pub fn bourgain_embed(m: &FiniteMetric, cfg: &BourgainConfig) -> EuclideanEmbedding {
    let n = m.len();
    let dim = cfg.dimension();
    let mut coords = vec![vec![0.0; dim]; n];
    for t in 1..=cfg.scales {
        let p = 0.5f64.powi(t as i32);
        for l in 0..cfg.repetitions {
            let col = (t - 1) * cfg.repetitions + l;
            let mut rng = rng::stream(cfg.seed, streams::BOURGAIN, col as u64);
            let subset = loop {
                let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(p)).collect();
                if !s.is_empty() || n == 0 {
                    break s;
                }
            };
            for (x, row) in coords.iter_mut().enumerate() {
                row[col] = subset.iter().map(|&s| m.get(x, s)).fold(f64::INFINITY, f64::min);
            }
        }
    }
    EuclideanEmbedding { dim, coords }
}

/// Distortion allowing collisions (an infinite contraction).
pub fn measured_distortion(m: &FiniteMetric, e: &EuclideanEmbedding) -> DistortionReport {
    let mut r = distortion_unchecked(m, |i, j| e.distance(i, j));
    if r.distortion.is_nan() {
        r.distortion = f64::INFINITY;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionMode {
    /// Independent `N(0, 1)/√d` entries.
    Gaussian,
    /// Gaussian matrix with orthonormalized columns.
    Orthonormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: ProjectionMode,
}

/// Best projection and the measured distortion of every trial, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub embedding: EuclideanEmbedding,
    pub report: DistortionReport,
    pub trial_distortions: Vec<f64>,
}

fn projection_matrix(ambient: usize, d: usize, seed: u64, trial: usize, mode: ProjectionMode) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(seed, streams::PROJECTION, trial as u64);
    let scale = 1.0 / (d as f64).sqrt();
    // columns of an ambient × d matrix
    let mut cols: Vec<Vec<f64>> = (0..d)
        .map(|_| {
            (0..ambient)
                .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
                .collect()
        })
        .collect();
    if mode == ProjectionMode::Orthonormal {
        // modified Gram–Schmidt
        for c in 0..d {
            for p in 0..c {
                let dot: f64 = (0..ambient).map(|r| cols[c][r] * cols[p][r]).sum();
                for r in 0..ambient {
                    cols[c][r] -= dot * cols[p][r];
                }
            }
            let norm = cols[c].iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut cols[c] {
                *x /= norm;
            }
        }
    }
    cols
}

/// Projects `e` to `R^d` with `trials` seeded matrices and keeps the trial
/// of least distortion against `m` (earliest on ties), rescaled to be
/// noncontracting.
pub fn random_project(m: &FiniteMetric, e: &EuclideanEmbedding, cfg: &ProjectionConfig) -> Result<Projection> {
    if cfg.dim > e.dim {
        return Err(Error::DimensionExceedsAmbient {
            d: cfg.dim,
            ambient: e.dim,
        });
    }
    if cfg.trials == 0 || cfg.dim == 0 {
        return Err(Error::DegenerateParameters("need at least one trial and d ≥ 1".into()));
    }
    let n = e.len();
    if n < 2 {
        return Ok(Projection {
            embedding: EuclideanEmbedding {
                dim: cfg.dim,
                coords: vec![vec![0.0; cfg.dim]; n],
            },
            report: DistortionReport::trivial(),
            trial_distortions: vec![1.0; cfg.trials],
        });
    }
    let mut best: Option<(EuclideanEmbedding, DistortionReport)> = None;
    let mut trial_distortions = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let cols = projection_matrix(e.dim, cfg.dim, cfg.seed, trial, cfg.mode);
        let coords = e
            .coords
            .iter()
            .map(|x| cols.iter().map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let proj = EuclideanEmbedding { dim: cfg.dim, coords };
        let report = measured_distortion(m, &proj);
        trial_distortions.push(report.distortion);
        if best.as_ref().is_none_or(|b| report.distortion < b.1.distortion) {
            best = Some((proj, report));
        }
    }
    let (proj, report) = best.unwrap();
    let (embedding, report) = if report.contraction.is_finite() {
        (
            proj.scaled(report.contraction),
            DistortionReport::new(report.expansion * report.contraction, 1.0),
        )
    } else {
        (proj, report)
    };
    Ok(Projection {
        embedding,
        report,
        trial_distortions,
    })
}

/// Temperature schedule of the surrogate.
pub const TAU_START: f64 = 0.5;
pub const TAU_END: f64 = 0.01;

/// Soft spread of the log distance ratios: `τ·log Σ e^{r/τ} + τ·log Σ e^{−r/τ}`.
struct Surrogate<'a> {
    m: &'a FiniteMetric,
    n: usize,
    /// log(‖f_i − f_j‖ / ρ_ij), row-major, diagonal unused
    lr: Vec<f64>,
    tau: f64,
    shift_hi: f64,
    shift_lo: f64,
    sum_hi: f64,
    sum_lo: f64,
}

fn capped_exp(x: f64) -> f64 {
    x.min(700.0).exp()
}

impl<'a> Surrogate<'a> {
    fn new(m: &'a FiniteMetric, coords: &[Vec<f64>], tau: f64) -> Self {
        let n = m.len();
        let mut lr = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (crate::metric::euclidean(&coords[i], &coords[j]) / m.get(i, j)).ln();
                lr[i * n + j] = v;
                lr[j * n + i] = v;
            }
        }
        let mut s = Self {
            m,
            n,
            lr,
            tau,
            shift_hi: 0.0,
            shift_lo: 0.0,
            sum_hi: 0.0,
            sum_lo: 0.0,
        };
        s.reset(tau);
        s
    }

    fn pairs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| self.lr[i * self.n + j]))
    }

    fn reset(&mut self, tau: f64) {
        self.tau = tau;
        self.shift_hi = self.pairs().fold(f64::NEG_INFINITY, f64::max);
        self.shift_lo = self.pairs().fold(f64::INFINITY, f64::min);
        let (hi, lo, t) = (self.shift_hi, self.shift_lo, tau);
        self.sum_hi = self.pairs().map(|v| capped_exp((v - hi) / t)).sum();
        self.sum_lo = self.pairs().map(|v| capped_exp((lo - v) / t)).sum();
    }

    fn value_with(&self, sum_hi: f64, sum_lo: f64) -> f64 {
        self.shift_hi + self.tau * sum_hi.ln() - self.shift_lo + self.tau * sum_lo.ln()
    }

    fn value(&self) -> f64 {
        self.value_with(self.sum_hi, self.sum_lo)
    }

    /// Exact spread `max − min` of the log ratios, i.e. log distortion.
    fn spread(&self) -> f64 {
        self.pairs().fold(f64::NEG_INFINITY, f64::max) - self.pairs().fold(f64::INFINITY, f64::min)
    }

    /// Row `i` of log ratios if point `i` moved to `p`, and the new sums.
    fn trial(&self, coords: &[Vec<f64>], i: usize, p: &[f64]) -> (Vec<f64>, f64, f64) {
        let mut row = vec![0.0; self.n];
        let (mut hi, mut lo) = (self.sum_hi, self.sum_lo);
        for j in 0..self.n {
            if j == i {
                continue;
            }
            let old = self.lr[i * self.n + j];
            let new = (crate::metric::euclidean(p, &coords[j]) / self.m.get(i, j)).ln();
            row[j] = new;
            hi += capped_exp((new - self.shift_hi) / self.tau) - capped_exp((old - self.shift_hi) / self.tau);
            lo += capped_exp((self.shift_lo - new) / self.tau) - capped_exp((self.shift_lo - old) / self.tau);
        }
        (row, hi.max(f64::MIN_POSITIVE), lo.max(f64::MIN_POSITIVE))
    }

    fn commit(&mut self, i: usize, row: &[f64], hi: f64, lo: f64) {
        for j in 0..self.n {
            if j != i {
                self.lr[i * self.n + j] = row[j];
                self.lr[j * self.n + i] = row[j];
            }
        }
        self.sum_hi = hi;
        self.sum_lo = lo;
    }
}

/// Number of temperature stages; sums are recomputed at each stage.
const STAGES: usize = 25;

/// Perturbs one point at a time along a Gaussian direction, accepting moves
/// that lower the surrogate; the temperature decays geometrically from
/// `TAU_START` to `TAU_END` over `STAGES` stages and the step adapts to the
/// acceptance rate. Returns the iterate of least exact distortion, never
/// worse than `init`.
pub fn refine_local_search(
    m: &FiniteMetric,
    init: &EuclideanEmbedding,
    iters: usize,
    seed: u64,
) -> (EuclideanEmbedding, DistortionReport) {
    let n = m.len();
    let init_report = measured_distortion(m, init);
    if n < 2 || iters == 0 {
        return (init.clone(), init_report);
    }
    let mut coords = init.coords.clone();
    // collisions make the log ratios infinite; nudge coincident points apart
    let mut rng = rng::stream(seed, streams::REFINE, 0);
    let typical = m.max_distance().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if crate::metric::euclidean(&coords[i], &coords[j]) <= 1e-12 * typical {
                for x in &mut coords[i] {
                    *x += 1e-6 * typical * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
    }
    let mut s = Surrogate::new(m, &coords, TAU_START);
    let mut best_spread = if init_report.distortion.is_finite() {
        init_report.distortion.ln()
    } else {
        f64::INFINITY
    };
    let mut best = init.coords.clone();
    let spread = s.spread();
    if spread < best_spread {
        best_spread = spread;
        best = coords.clone();
    }
    let scale = {
        let mut d: Vec<f64> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| crate::metric::euclidean(&coords[i], &coords[j]))
            .collect();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    };
    let mut step = 0.05 * scale;
    let per_stage = iters.div_ceil(STAGES);
    for it in 0..iters {
        if it % per_stage == 0 && it > 0 {
            let stage = it / per_stage;
            let tau = TAU_START * (TAU_END / TAU_START).powf(stage as f64 / (STAGES - 1) as f64);
            s.reset(tau);
        }
        let i = rng.random_range(0..n);
        let p: Vec<f64> = coords[i]
            .iter()
            .map(|x| x + step * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let (row, hi, lo) = s.trial(&coords, i, &p);
        if s.value_with(hi, lo) < s.value() {
            s.commit(i, &row, hi, lo);
            coords[i] = p;
            step = (step * 1.2).min(scale);
            let spread = s.spread();
            if spread < best_spread {
                best_spread = spread;
                best = coords.clone();
            }
        } else {
            step = (step * 0.98).max(1e-9 * scale);
        }
    }
    let out = EuclideanEmbedding {
        dim: init.dim,
        coords: best,
    };
    let report = measured_distortion(m, &out);
    if report.distortion <= init_report.distortion || !init_report.distortion.is_finite() {
        (out, report)
    } else {
        (init.clone(), init_report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbedOptions {
    pub trials: usize,
    pub refine_iters: usize,
    pub mode: ProjectionMode,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        Self {
            trials: 20,
            refine_iters: 20_000,
            mode: ProjectionMode::Gaussian,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub n: usize,
    pub d: usize,
    pub distortion: f64,
    /// `n^{2/d} · (ln n)^{3/2}`
    pub bound: f64,
    pub c_achieved: f64,
    pub seeds: Vec<u64>,
    pub seed_distortions: Vec<f64>,
    pub best_seed: u64,
}

pub fn reference_bound(n: usize, d: usize) -> f64 {
    let n = n as f64;
    n.powf(2.0 / d as f64) * n.ln().powf(1.5)
}

/// One seed of the pipeline: Bourgain → projection → local search.
pub fn embed_one(
    m: &FiniteMetric,
    d: usize,
    seed: u64,
    opts: &EmbedOptions,
) -> Result<(EuclideanEmbedding, DistortionReport)> {
    let cfg = BourgainConfig::for_size(m.len(), seed);
    let high = bourgain_embed(m, &cfg);
    let start = if d <= high.dim {
        random_project(
            m,
            &high,
            &ProjectionConfig {
                dim: d,
                trials: opts.trials,
                seed,
                mode: opts.mode,
            },
        )?
        .embedding
    } else {
        // pad with zero coordinates
        EuclideanEmbedding {
            dim: d,
            coords: high
                .coords
                .iter()
                .map(|c| c.iter().copied().chain(std::iter::repeat(0.0)).take(d).collect())
                .collect(),
        }
    };
    Ok(refine_local_search(m, &start, opts.refine_iters, seed))
}

/// Runs the pipeline for every seed and keeps the least distortion (first
/// seed on ties).
pub fn embed_rd(
    m: &FiniteMetric,
    d: usize,
    seeds: &[u64],
    opts: &EmbedOptions,
) -> Result<(EuclideanEmbedding, EmbedReport)> {
    if d == 0 || seeds.is_empty() {
        return Err(Error::DegenerateParameters("need d ≥ 1 and at least one seed".into()));
    }
    let mut best: Option<(EuclideanEmbedding, f64, u64)> = None;
    let mut seed_distortions = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (e, rep) = embed_one(m, d, seed, opts)?;
        seed_distortions.push(rep.distortion);
        if best.as_ref().is_none_or(|b| rep.distortion < b.1) {
            best = Some((e, rep.distortion, seed));
        }
    }
    let (e, distortion, best_seed) = best.unwrap();
    let n = m.len();
    let bound = reference_bound(n, d);
    Ok((
        e,
        EmbedReport {
            n,
            d,
            distortion,
            bound,
            c_achieved: distortion / bound,
            seeds: seeds.to_vec(),
            seed_distortions,
            best_seed,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::optimal_line_embedding_bruteforce;

    fn uniform(n: usize) -> FiniteMetric {
        FiniteMetric::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 })
    }

    #[test]
    fn bourgain_shape_and_lipschitz_coordinates() {
        let m = FiniteMetric::from_points(&(0..12).map(|i| vec![(i * i % 7) as f64, i as f64]).collect::<Vec<_>>());
        let cfg = BourgainConfig::for_size(12, 3);
        assert_eq!((cfg.scales, cfg.repetitions), (4, 8));
        let e = bourgain_embed(&m, &cfg);
        assert_eq!(e.dim, 32);
        for c in 0..e.dim {
            for i in 0..12 {
                for j in 0..12 {
                    assert!((e.coords[i][c] - e.coords[j][c]).abs() <= m.get(i, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn bourgain_two_points() {
        let m = FiniteMetric::from_fn(2, |i, j| if i == j { 0.0 } else { 3.0 });
        let e = bourgain_embed(&m, &BourgainConfig::for_size(2, 0));
        assert!(measured_distortion(&m, &e).distortion <= 2.0);
    }

    #[test]
    fn bourgain_uniform_eight() {
        let m = uniform(8);
        let e = bourgain_embed(&m, &BourgainConfig::for_size(8, 0));
        let d = measured_distortion(&m, &e).distortion;
        // recorded constant C_B = 2: distortion ≤ 2·log₂ 8
        assert!(d <= 2.0 * 3.0, "{d}");
    }

    #[test]
    fn orthonormal_full_dimension_is_an_isometry() {
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![i as f64, (i * i) as f64 * 0.3, (i % 2) as f64])
            .collect();
        let e = EuclideanEmbedding::new(3, pts.clone()).unwrap();
        let source = FiniteMetric::from_points(&pts);
        let cfg = ProjectionConfig {
            dim: 3,
            trials: 1,
            seed: 5,
            mode: ProjectionMode::Orthonormal,
        };
        let p = random_project(&source, &e, &cfg).unwrap();
        assert!((p.report.distortion - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_edge_cases() {
        let one = FiniteMetric::from_fn(1, |_, _| 0.0);
        let e = EuclideanEmbedding::new(2, vec![vec![1.0, 2.0]]).unwrap();
        let cfg = ProjectionConfig {
            dim: 1,
            trials: 3,
            seed: 0,
            mode: ProjectionMode::Gaussian,
        };
        let p = random_project(&one, &e, &cfg).unwrap();
        assert_eq!(p.embedding.coords, vec![vec![0.0]]);
        assert_eq!(p.report.distortion, 1.0);
        let cfg3 = ProjectionConfig { dim: 3, ..cfg };
        assert_eq!(
            random_project(&one, &e, &cfg3),
            Err(Error::DimensionExceedsAmbient { d: 3, ambient: 2 })
        );
    }

    #[test]
    fn best_trial_is_no_worse_than_any_trial() {
        let pts: Vec<Vec<f64>> = (0..16)
            .map(|i| vec![(i as f64).sin() * 4.0, (i as f64 * 0.7).cos() * 3.0, i as f64 * 0.2])
            .collect();
        let m = FiniteMetric::from_points(&pts);
        let high = bourgain_embed(
            &m,
            &BourgainConfig {
                scales: 2,
                repetitions: 5,
                seed: 1,
            },
        );
        let cfg = ProjectionConfig {
            dim: 3,
            trials: 20,
            seed: 2,
            mode: ProjectionMode::Gaussian,
        };
        let p = random_project(&m, &high, &cfg).unwrap();
        let worst = p.trial_distortions.iter().copied().fold(0.0, f64::max);
        let best = p.trial_distortions.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((p.report.distortion - best).abs() <= 1e-9 * best);
        assert!(best <= worst);
        // prefix property: fewer trials never do better
        let fewer = random_project(&m, &high, &ProjectionConfig { trials: 5, ..cfg }).unwrap();
        assert!(fewer.report.distortion >= p.report.distortion);
        assert_eq!(fewer.trial_distortions[..], p.trial_distortions[..5]);
    }

    #[test]
    fn refine_triangle_in_plane() {
        let m = uniform(3);
        let mut rng = rng::stream(11, streams::SAMPLING, 0);
        let init = EuclideanEmbedding::new(
            2,
            (0..3)
                .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                .collect(),
        )
        .unwrap();
        let (_, rep) = refine_local_search(&m, &init, 5000, 0);
        assert!(rep.distortion <= 1.001, "{}", rep.distortion);
    }

    #[test]
    fn refine_never_worsens() {
        let m = FiniteMetric::from_points(
            &(0..10)
                .map(|i| vec![(i * 3 % 5) as f64, (i * i % 11) as f64])
                .collect::<Vec<_>>(),
        );
        let init = EuclideanEmbedding::new(1, (0..10).map(|i| vec![i as f64]).collect()).unwrap();
        let before = measured_distortion(&m, &init).distortion;
        let (_, rep) = refine_local_search(&m, &init, 2000, 4);
        assert!(rep.distortion <= before);
    }

    #[test]
    fn four_cycle_on_the_line() {
        let m = FiniteMetric::from_fn(4, |i, j| {
            let d = (i as i64 - j as i64).rem_euclid(4);
            d.min(4 - d) as f64
        });
        let opt = optimal_line_embedding_bruteforce(&m).unwrap().distortion;
        let (_, rep) = embed_rd(&m, 1, &[0, 1, 2], &EmbedOptions::default()).unwrap();
        assert!(rep.distortion <= 1.05 * opt, "{} vs {opt}", rep.distortion);
    }

    #[test]
    fn two_points_embed_isometrically() {
        let m = FiniteMetric::from_fn(2, |i, j| if i == j { 0.0 } else { 2.0 });
        let (_, rep) = embed_rd(&m, 2, &[0], &EmbedOptions::default()).unwrap();
        assert!((rep.distortion - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let m = FiniteMetric::from_points(
            &(0..9)
                .map(|i| vec![(i * 5 % 7) as f64, (i * i % 5) as f64, i as f64])
                .collect::<Vec<_>>(),
        );
        let opts = EmbedOptions {
            refine_iters: 1000,
            ..EmbedOptions::default()
        };
        let a = embed_rd(&m, 2, &[1, 2], &opts).unwrap();
        let b = embed_rd(&m, 2, &[1, 2], &opts).unwrap();
        assert_eq!(
            serde_json::to_string(&a.1).unwrap(),
            serde_json::to_string(&b.1).unwrap()
        );
        assert_eq!(a.0, b.0);
    }
}
