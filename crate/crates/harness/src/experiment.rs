//! Timing runs over random query ranges, and workload-error studies against
//! high-precision reference answers.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use csprq_core::{
    splitmix64, AreaId, EngineConfig, EngineError, Mbr, MovingObject, ObjectId, PdfModel, Point,
    QueryCounters, QueryRange, RestrictedArea, SimplePolygon, Strategy, Workspace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::generate::SPACE;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdfKind {
    UD,
    DG,
}

impl PdfKind {
    pub fn model(self) -> PdfModel {
        match self {
            PdfKind::UD => PdfModel::Uniform,
            PdfKind::DG => PdfModel::gaussian(),
        }
    }
}

impl fmt::Display for PdfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PdfKind::UD => "UD",
            PdfKind::DG => "DG",
        })
    }
}

impl FromStr for PdfKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "UD" | "UNIFORM" => Ok(PdfKind::UD),
            "DG" | "GAUSSIAN" => Ok(PdfKind::DG),
            _ => Err(format!("unknown pdf {s:?} (expected UD or DG)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub xi: usize,
    pub n: usize,
    pub m: usize,
    pub theta: f64,
    /// Regular `zeta`-gon areas of radius 20; `None` keeps 40 x 10 rectangles.
    pub zeta: Option<usize>,
    pub n_prime: usize,
    pub pdf: PdfKind,
    pub tau_min: f64,
    pub tau_max: f64,
    pub strategies: Vec<Strategy>,
    pub queries: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub fanout: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            xi: 32,
            n: 50_000,
            m: 50_000,
            theta: 500.0,
            zeta: None,
            n_prime: csprq_core::DEFAULT_SAMPLES,
            pdf: PdfKind::UD,
            tau_min: 20.0,
            tau_max: 50.0,
            strategies: Strategy::ALL.to_vec(),
            queries: 50,
            repetitions: 10,
            seed: 0,
            fanout: csprq_core::DEFAULT_FANOUT,
        }
    }
}

impl ExperimentConfig {
    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            xi: self.xi,
            n1: self.n_prime,
            fanout: self.fanout,
            pdf: self.pdf.model(),
        }
    }
}

pub fn build_workspace(d: &Dataset, cfg: &EngineConfig) -> Result<Workspace, EngineError> {
    Workspace::new(cfg.clone(), d.objects.clone(), d.areas.clone())
}

/// `count` squares of side `theta`, uniform over the space.
pub fn query_ranges(count: usize, theta: f64, space: f64, seed: u64) -> Vec<QueryRange> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = (space - theta).max(0.0);
    (0..count)
        .map(|_| {
            let x = if hi > 0.0 { rng.gen_range(0.0..hi) } else { 0.0 };
            let y = if hi > 0.0 { rng.gen_range(0.0..hi) } else { 0.0 };
            QueryRange::new(Mbr::from_coords(x, y, x + theta, y + theta)).expect("positive side")
        })
        .collect()
}

pub fn query_seed(seed: u64, q: usize) -> u64 {
    splitmix64(seed ^ (q as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

#[derive(Clone, Debug, Default)]
pub struct StrategyReport {
    pub strategy: Option<Strategy>,
    pub queries: usize,
    pub repetitions: usize,
    /// Mean over repetitions of the per-query mean, in milliseconds.
    pub mean_ms: f64,
    pub median_ms: f64,
    pub nodes_per_query: f64,
    pub pages_per_query: f64,
    pub records_per_query: f64,
    pub answers_per_query: f64,
    pub counters: QueryCounters,
    /// Time to build the precomputed regions, for PSO.
    pub precompute_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub reports: Vec<StrategyReport>,
    /// Every strategy returned bit-identical answers for every query.
    pub answers_agree: bool,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times every strategy on the same ranges and seeds. Within a repetition the
/// strategies take turns query by query so that drift affects all alike.
pub fn run_experiment(w: &mut Workspace, cfg: &ExperimentConfig) -> Result<ExperimentResult, EngineError> {
    let ranges = query_ranges(cfg.queries, cfg.theta, SPACE, cfg.seed);
    let strategies = &cfg.strategies;
    let mut precompute_ms = None;
    if strategies.contains(&Strategy::PSO) {
        let t = Instant::now();
        w.precompute_all()?;
        precompute_ms = Some(ms(t.elapsed()));
    }
    let k = strategies.len();
    let reps = cfg.repetitions.max(1);
    let mut per_rep: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); k];
    let mut reports: Vec<StrategyReport> = strategies
        .iter()
        .map(|s| StrategyReport {
            strategy: Some(*s),
            queries: ranges.len(),
            repetitions: reps,
            ..StrategyReport::default()
        })
        .collect();
    let mut agree = true;
    for rep in 0..reps {
        let mut totals = vec![Duration::ZERO; k];
        for (q, r) in ranges.iter().enumerate() {
            let seed = query_seed(cfg.seed, q);
            let mut first = None;
            for (i, s) in strategies.iter().enumerate() {
                let t = Instant::now();
                let out = w.query(*s, r, seed)?;
                totals[i] += t.elapsed();
                if rep == 0 {
                    let rp = &mut reports[i];
                    rp.nodes_per_query += out.stats.nodes_visited as f64;
                    rp.pages_per_query += out.stats.pages_read as f64;
                    rp.records_per_query += out.stats.records_scanned as f64;
                    rp.answers_per_query += out.answer.len() as f64;
                    add_counters(&mut rp.counters, &out.counters);
                    match &first {
                        None => first = Some(out.answer),
                        Some(a) => agree &= a.bit_identical(&out.answer),
                    }
                }
            }
        }
        for i in 0..k {
            per_rep[i].push(ms(totals[i]) / ranges.len().max(1) as f64);
        }
    }
    let nq = ranges.len().max(1) as f64;
    for (i, rp) in reports.iter_mut().enumerate() {
        rp.mean_ms = per_rep[i].iter().sum::<f64>() / reps as f64;
        rp.median_ms = median(&mut per_rep[i]);
        rp.nodes_per_query /= nq;
        rp.pages_per_query /= nq;
        rp.records_per_query /= nq;
        rp.answers_per_query /= nq;
        if rp.strategy == Some(Strategy::PSO) {
            rp.precompute_ms = precompute_ms;
        }
    }
    Ok(ExperimentResult {
        reports,
        answers_agree: agree,
    })
}

fn add_counters(a: &mut QueryCounters, b: &QueryCounters) {
    a.candidate_objects += b.candidate_objects;
    a.candidate_areas += b.candidate_areas;
    a.geometry.add(&b.geometry);
    a.mc_draws += b.mc_draws;
    a.mc_accepted += b.mc_accepted;
}

pub const CENTRE: Point = Point {
    x: SPACE / 2.0,
    y: SPACE / 2.0,
};

/// One object at the centre of the space with restricted areas cutting into
/// its circle: a 40 x 10 bar entering from the right, a small square inside,
/// and a bar crossing the lower-left part.
pub fn error_scene(tau: f64, cfg: EngineConfig) -> Result<Workspace, EngineError> {
    let c = CENTRE;
    let rect = |x0: f64, y0: f64, x1: f64, y1: f64| {
        SimplePolygon::rectangle(Mbr::from_coords(c.x + x0, c.y + y0, c.x + x1, c.y + y1)).expect("rect")
    };
    let s = tau / 20.0;
    let areas = vec![
        RestrictedArea::new(AreaId(1), rect(8.0 * s, -5.0 * s, 48.0 * s, 5.0 * s)),
        RestrictedArea::new(AreaId(2), rect(-6.0 * s, 6.0 * s, -2.0 * s, 10.0 * s)),
        RestrictedArea::new(AreaId(3), rect(-30.0 * s, -14.0 * s, 10.0 * s, -10.0 * s)),
    ];
    let o = MovingObject::new(ObjectId(0), c, tau).expect("object");
    Workspace::new(cfg, vec![o], areas)
}

/// 100 squares of side `2 tau` whose lower-left corners sweep a 10 x 10 grid
/// over `[c - 3 tau, c + tau]^2`, the placements whose range meets the
/// object's MBR. Ranges near the edge of the sweep catch only the fringe of
/// the region; the four diagonal extremes miss the circle altogether.
pub fn error_ranges(tau: f64) -> Vec<QueryRange> {
    let side = 2.0 * tau;
    let mut out = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            let x = CENTRE.x - 1.5 * side + (i as f64 + 0.5) / 10.0 * 2.0 * side;
            let y = CENTRE.y - 1.5 * side + (j as f64 + 0.5) / 10.0 * 2.0 * side;
            out.push(QueryRange::new(Mbr::from_coords(x, y, x + side, y + side)).expect("range"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkloadErrorReport {
    pub label: String,
    pub value: usize,
    pub awe: f64,
    pub rwe: f64,
    /// Queries whose reference was nonzero and so count toward `rwe`.
    pub rwe_queries: usize,
    pub estimates: Vec<f64>,
    pub references: Vec<f64>,
}

impl WorkloadErrorReport {
    pub fn from_answers(label: &str, value: usize, estimates: Vec<f64>, references: Vec<f64>) -> Self {
        let n = estimates.len().max(1) as f64;
        let awe = estimates
            .iter()
            .zip(&references)
            .map(|(e, r)| (e - r).abs())
            .sum::<f64>()
            / n;
        let rel: Vec<f64> = estimates
            .iter()
            .zip(&references)
            .filter(|(_, r)| **r > 0.0)
            .map(|(e, r)| (e - r).abs() / r)
            .collect();
        let rwe = if rel.is_empty() {
            0.0
        } else {
            rel.iter().sum::<f64>() / rel.len() as f64
        };
        WorkloadErrorReport {
            label: label.to_string(),
            value,
            awe,
            rwe,
            rwe_queries: rel.len(),
            estimates,
            references,
        }
    }
}

/// Probability of the single scene object for each range, running ranges on
/// `threads` workers.
pub fn scene_probabilities(
    w: &Workspace,
    ranges: &[QueryRange],
    seed: u64,
    threads: usize,
) -> Result<Vec<f64>, EngineError> {
    let threads = threads.clamp(1, ranges.len().max(1));
    let chunk = ranges.len().div_ceil(threads);
    let mut out = vec![0.0; ranges.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .chunks(chunk.max(1))
            .enumerate()
            .map(|(ci, rs)| {
                scope.spawn(move || -> Result<Vec<f64>, EngineError> {
                    rs.iter()
                        .enumerate()
                        .map(|(k, r)| {
                            let q = ci * chunk + k;
                            let ans = w.query_so(r, query_seed(seed, q))?.answer;
                            Ok(ans.get(ObjectId(0)).map_or(0.0, |p| p.value()))
                        })
                        .collect()
                })
            })
            .collect();
        for (ci, h) in handles.into_iter().enumerate() {
            let vals = h.join().expect("worker panicked")?;
            out[ci * chunk..ci * chunk + vals.len()].copy_from_slice(&vals);
        }
        Ok::<(), EngineError>(())
    })?;
    Ok(out)
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Error of Monte Carlo estimates with `n_primes` draws against an estimate
/// with `reference_n` draws drawn from an independent seed.
pub fn measure_n_prime(
    tau: f64,
    xi: usize,
    n_primes: &[usize],
    reference_n: usize,
    pdf: PdfKind,
    seed: u64,
) -> Result<Vec<WorkloadErrorReport>, EngineError> {
    let ranges = error_ranges(tau);
    let threads = default_threads();
    let mut cfg = EngineConfig {
        xi,
        n1: reference_n,
        pdf: pdf.model(),
        ..EngineConfig::default()
    };
    let reference = scene_probabilities(&error_scene(tau, cfg.clone())?, &ranges, splitmix64(!seed), threads)?;
    let mut out = Vec::new();
    for &n in n_primes {
        cfg.n1 = n;
        let w = error_scene(tau, cfg.clone())?;
        let est = scene_probabilities(&w, &ranges, seed, threads)?;
        out.push(WorkloadErrorReport::from_answers("n_prime", n, est, reference.clone()));
    }
    Ok(out)
}

/// Error of each `xi` against `reference_xi`. Uniform densities are exact;
/// other densities use `n_prime` draws for both sides.
pub fn measure_xi(
    tau: f64,
    xis: &[usize],
    reference_xi: usize,
    pdf: PdfKind,
    n_prime: usize,
    seed: u64,
) -> Result<Vec<WorkloadErrorReport>, EngineError> {
    let ranges = error_ranges(tau);
    let threads = default_threads();
    let cfg = |xi| EngineConfig {
        xi,
        n1: n_prime,
        pdf: pdf.model(),
        ..EngineConfig::default()
    };
    let reference = scene_probabilities(&error_scene(tau, cfg(reference_xi))?, &ranges, seed, threads)?;
    let mut out = Vec::new();
    for &xi in xis {
        let est = scene_probabilities(&error_scene(tau, cfg(xi))?, &ranges, seed, threads)?;
        out.push(WorkloadErrorReport::from_answers("xi", xi, est, reference.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_synthetic, SyntheticConfig};

    #[test]
    fn absolute_error_bounded_by_relative_times_largest_reference() {
        let r = measure_xi(30.0, &[8, 16], 256, PdfKind::UD, 700, 1).unwrap();
        for x in r {
            let max_ref = x.references.iter().cloned().fold(0.0, f64::max);
            assert!(x.awe >= 0.0 && x.rwe >= 0.0);
            assert!(x.awe <= x.rwe * max_ref + 1e-15, "{} {}", x.awe, x.rwe);
        }
    }

    #[test]
    fn ranges_stay_in_space() {
        for r in query_ranges(50, 500.0, SPACE, 3) {
            assert!(r.mbr().lo.x >= 0.0 && r.mbr().hi.x <= SPACE);
            assert!((r.mbr().width() - 500.0).abs() < 1e-9);
        }
    }

    #[test]
    fn error_ranges_sweep_the_object_mbr() {
        let w = error_scene(20.0, EngineConfig::default()).unwrap();
        let rs = error_ranges(20.0);
        assert_eq!(rs.len(), 100);
        let ombr = Mbr::from_coords(CENTRE.x - 20.0, CENTRE.y - 20.0, CENTRE.x + 20.0, CENTRE.y + 20.0);
        assert!(rs.iter().all(|r| r.mbr().intersects(&ombr)));
        let p = scene_probabilities(&w, &rs, 1, 2).unwrap();
        assert_eq!(p.iter().filter(|v| **v == 0.0).count(), 4);
        assert!(p.iter().any(|v| *v > 0.0 && *v < 0.05));
        assert!(p.iter().any(|v| *v > 0.5));
    }

    #[test]
    fn tiny_experiment_agrees() {
        let d = generate_synthetic(&SyntheticConfig {
            n: 300,
            m: 300,
            space: SPACE,
            seed: 4,
            ..SyntheticConfig::default()
        })
        .unwrap();
        let cfg = ExperimentConfig {
            queries: 5,
            repetitions: 2,
            theta: 2000.0,
            ..ExperimentConfig::default()
        };
        let mut w = build_workspace(&d, &cfg.engine_config()).unwrap();
        let res = run_experiment(&mut w, &cfg).unwrap();
        assert!(res.answers_agree);
        assert_eq!(res.reports.len(), 4);
        assert!(res.reports[3].precompute_ms.is_some());
    }

    #[test]
    fn awe_and_rwe() {
        let r = WorkloadErrorReport::from_answers("x", 1, vec![0.5, 0.1, 0.0], vec![0.4, 0.0, 0.2]);
        assert!((r.awe - (0.1 + 0.1 + 0.2) / 3.0).abs() < 1e-15);
        assert_eq!(r.rwe_queries, 2);
        assert!((r.rwe - (0.25 + 1.0) / 2.0).abs() < 1e-15);
    }
}
