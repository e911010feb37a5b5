use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use csprq_core::{Mbr, QueryRange, Strategy};
use csprq_harness::dataset::{read_dataset, write_dataset, Dataset};
use csprq_harness::experiment::{
    build_workspace, measure_n_prime, measure_xi, run_experiment, ExperimentConfig, PdfKind,
};
use csprq_harness::generate::{generate_synthetic, AreaShape, SyntheticConfig};
use csprq_harness::real::{load_real, RealOptions};
use csprq_harness::report::{
    error_detail_table, error_summary_table, load_table, strategy_table, write_strategy_reports,
};

#[derive(Parser)]
#[command(name = "csprq", version, about = "Probabilistic range queries over uncertain moving objects")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Normalize and filter external point/rectangle files.
    Load(LoadArgs),
    /// Run a single query and print the answer.
    Query(QueryArgs),
    /// Time strategies over random query ranges.
    Bench(BenchArgs),
    /// Workload-error study against a high-precision reference.
    Error(ErrorArgs),
    /// Precompute uncertainty regions and report the time taken.
    Precompute(PrecomputeArgs),
}

#[derive(Args, Clone)]
struct SynthArgs {
    /// Object count.
    #[arg(long, default_value_t = 50_000)]
    n: usize,
    /// Restricted-area count.
    #[arg(long, default_value_t = 50_000)]
    m: usize,
    /// Use regular polygons with this many edges (radius 20) instead of 40 x 10 rectangles.
    #[arg(long)]
    zeta: Option<usize>,
    #[arg(long, default_value_t = 20.0)]
    tau_min: f64,
    #[arg(long, default_value_t = 50.0)]
    tau_max: f64,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> SyntheticConfig {
        SyntheticConfig {
            n: self.n,
            m: self.m,
            shape: match self.zeta {
                Some(zeta) => AreaShape::Regular { zeta, radius: 20.0 },
                None => AreaShape::default(),
            },
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            seed,
            ..SyntheticConfig::default()
        }
    }
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Points file (`id x y tau`); omit to generate a synthetic dataset.
    #[arg(long, requires = "areas")]
    points: Option<PathBuf>,
    /// Areas file.
    #[arg(long, requires = "points")]
    areas: Option<PathBuf>,
    #[command(flatten)]
    synth: SynthArgs,
}

impl DataArgs {
    fn dataset(&self, seed: u64) -> Result<Dataset> {
        match (&self.points, &self.areas) {
            (Some(p), Some(a)) => Ok(read_dataset(p, a)?),
            _ => Ok(generate_synthetic(&self.synth.config(seed))?),
        }
    }
}

#[derive(Args, Clone)]
struct EngineArgs {
    #[arg(long, default_value_t = 32)]
    xi: usize,
    /// Monte Carlo draws per object.
    #[arg(long = "n-prime", default_value_t = 700)]
    n_prime: usize,
    #[arg(long, default_value = "UD")]
    pdf: PdfKind,
    #[arg(long, default_value_t = 50)]
    fanout: usize,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    synth: SynthArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct LoadArgs {
    /// Raw points: `x y` or `id x y` per line.
    #[arg(long)]
    points: PathBuf,
    /// Raw rectangles: `xlo ylo xhi yhi` with optional leading id.
    #[arg(long)]
    rects: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Query rectangle as `xlo,ylo,xhi,yhi`.
    #[arg(long, value_parser = parse_rect)]
    rect: Mbr,
    #[arg(long, default_value = "SO")]
    strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Query side length.
    #[arg(long, default_value_t = 500.0)]
    theta: f64,
    /// Strategies to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "B,S,SO,PSO")]
    strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 50)]
    queries: usize,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Experiment name used in report file names.
    #[arg(long, default_value = "bench")]
    name: String,
    /// Leave out wall-time columns so reports are reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Study {
    NPrime,
    Xi,
}

#[derive(Args)]
struct ErrorArgs {
    #[arg(long, value_enum, default_value = "n-prime")]
    study: Study,
    #[arg(long, default_value_t = 20.0)]
    tau: f64,
    /// Sample counts to evaluate (n-prime study) or draws per estimate (xi study).
    #[arg(long = "n-prime", value_delimiter = ',', default_value = "700")]
    n_prime: Vec<usize>,
    /// Polygon edge counts to evaluate (xi study) or the fixed edge count (n-prime study).
    #[arg(long, value_delimiter = ',', default_value = "32")]
    xi: Vec<usize>,
    /// Reference sample count (n-prime study) or edge count (xi study).
    #[arg(long)]
    reference: Option<usize>,
    #[arg(long)]
    pdf: Option<PdfKind>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PrecomputeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_rect(s: &str) -> Result<Mbr, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x0, y0, x1, y1] if x0 < x1 && y0 < y1 => Ok(Mbr::from_coords(x0, y0, x1, y1)),
        [_, _, _, _] => Err("need xlo < xhi and ylo < yhi".into()),
        _ => Err(format!("expected 4 comma-separated numbers, found {}", v.len())),
    }
}

fn engine_config(e: &EngineArgs) -> csprq_core::EngineConfig {
    csprq_core::EngineConfig {
        xi: e.xi,
        n1: e.n_prime,
        fanout: e.fanout,
        pdf: e.pdf.model(),
    }
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Gen(a) => {
            let d = generate_synthetic(&a.synth.config(a.seed))?;
            std::fs::create_dir_all(&a.out_dir)?;
            let (p, r) = (a.out_dir.join("points.txt"), a.out_dir.join("areas.txt"));
            write_dataset(&d, &p, &r)?;
            println!("wrote {} objects to {}", d.objects.len(), p.display());
            println!("wrote {} areas to {}", d.areas.len(), r.display());
        }
        Cmd::Load(a) => {
            let opts = RealOptions {
                seed: a.seed,
                ..RealOptions::default()
            };
            let loaded = load_real(&a.points, a.rects.as_deref(), &opts)?;
            std::fs::create_dir_all(&a.out_dir)?;
            write_dataset(
                &loaded.dataset,
                &a.out_dir.join("points.txt"),
                &a.out_dir.join("areas.txt"),
            )?;
            let t = load_table(&loaded.report);
            t.write(&a.out_dir.join("load.tsv"))?;
            print!("{}", t.to_tsv());
        }
        Cmd::Query(a) => {
            let d = a.data.dataset(a.seed)?;
            let mut w = build_workspace(&d, &engine_config(&a.engine))?;
            if a.strategy == Strategy::PSO {
                w.precompute_all()?;
            }
            let r = QueryRange::new(a.rect).map_err(|e| anyhow::anyhow!("query rectangle: {e}"))?;
            let out = w.query(a.strategy, &r, a.seed)?;
            println!("id\tprobability");
            for e in &out.answer.entries {
                println!("{}\t{}", e.id, e.probability.value());
            }
            eprintln!(
                "{} objects; nodes visited {}, records scanned {}",
                out.answer.len(),
                out.stats.nodes_visited,
                out.stats.records_scanned
            );
        }
        Cmd::Bench(a) => {
            let d = a.data.dataset(a.seed)?;
            let cfg = ExperimentConfig {
                xi: a.engine.xi,
                n: d.objects.len(),
                m: d.areas.len(),
                theta: a.theta,
                zeta: a.data.synth.zeta,
                n_prime: a.engine.n_prime,
                pdf: a.engine.pdf,
                tau_min: a.data.synth.tau_min,
                tau_max: a.data.synth.tau_max,
                strategies: a.strategy.clone(),
                queries: a.queries,
                repetitions: a.repetitions,
                seed: a.seed,
                fanout: a.engine.fanout,
            };
            let mut w = build_workspace(&d, &cfg.engine_config())?;
            let res = run_experiment(&mut w, &cfg)?;
            if !res.answers_agree {
                bail!("strategies returned different answers");
            }
            std::fs::create_dir_all(&a.out_dir)?;
            let paths = write_strategy_reports(&a.out_dir, &a.name, &res.reports, !a.no_timing)?;
            for r in &res.reports {
                print!("{}", strategy_table(r, !a.no_timing).to_tsv());
            }
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Cmd::Error(a) => {
            std::fs::create_dir_all(&a.out_dir)?;
            let (name, reports) = match a.study {
                Study::NPrime => {
                    let pdf = a.pdf.unwrap_or(PdfKind::DG);
                    let xi = *a.xi.first().unwrap_or(&32);
                    let reference = a.reference.unwrap_or(1_000_000);
                    ("error_n_prime", measure_n_prime(a.tau, xi, &a.n_prime, reference, pdf, a.seed)?)
                }
                Study::Xi => {
                    let pdf = a.pdf.unwrap_or(PdfKind::UD);
                    let n = *a.n_prime.first().unwrap_or(&700);
                    let reference = a.reference.unwrap_or(1024);
                    ("error_xi", measure_xi(a.tau, &a.xi, reference, pdf, n, a.seed)?)
                }
            };
            let summary = error_summary_table(&reports);
            summary.write(&a.out_dir.join(format!("{name}.tsv")))?;
            for r in &reports {
                error_detail_table(r).write(&a.out_dir.join(format!("{name}_{}.tsv", r.value)))?;
            }
            print!("{}", summary.to_tsv());
        }
        Cmd::Precompute(a) => {
            let d = a.data.dataset(a.seed)?;
            let mut w = build_workspace(&d, &engine_config(&a.engine))?;
            let t = Instant::now();
            let rep = w.precompute_all()?;
            let el = t.elapsed();
            println!("objects\tsubtractions\tpruned_areas\tpostponed_areas\tseconds");
            println!(
                "{}\t{}\t{}\t{}\t{:.6}",
                rep.objects_processed,
                rep.geometry.subtractions,
                rep.geometry.pruned_areas,
                rep.geometry.postponed_areas,
                el.as_secs_f64()
            );
        }
    }
    Ok(())
}
