//! `mertens`: command-line front end for the Mertens-bias toolkit.
//!
//! Exit status: 0 on success, 1 on a domain or I/O error (one line on
//! stderr), 2 on a usage error.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mertens_core::bias_distribution::{
    density_grid, grid_moments, prob_positive, sample_z, DistributionModel, Orientation,
    Quadrature, TailModel, DEFAULT_STEP,
};
use mertens_core::constants::compute_constants_with;
use mertens_core::explicit_formula::{compare, Target};
use mertens_core::mertens_eval::{DensitySet, LogGrid, MertensEvaluator};
use mertens_core::prime_engine::PrimeEngine;
use mertens_core::zeta_zeros::{inspect, zero_sum_identity, ZeroTable};

use output::{emit, Cell, Format, Report, RunManifest, Table};

#[derive(Parser)]
#[command(name = "mertens", version, about = "Mertens' theorems, their error terms and their bias")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format (default: csv, or json for structured reports).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; a `<out>.manifest.json` is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached sieve segments.
    #[arg(long, global = true, env = "MERTENS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Truncation point P of the prime sums defining E and B.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = parse_integer)]
    prime_limit: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Euler's constant and the Mertens constants E and B.
    Constants,
    /// M1, M2 and sqrt(x) M1 at the given points.
    Eval {
        #[arg(long, required = true, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// M1, M2 and sqrt(x) M1 on a logarithmic grid.
    Scan {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Certify M1 > 0 and M2 > 0 on (1, limit].
    VerifyPositivity {
        #[arg(long, value_parser = parse_integer)]
        limit: u64,
    },
    /// Logarithmic density of {M1 > 0} or {M2 > 0} up to x.
    Logdensity {
        #[arg(long, value_enum, default_value = "w1")]
        which: Which,
        #[arg(long)]
        x: f64,
    },
    /// Residuals of the prime-sum identities at x.
    Residuals {
        #[arg(long, required = true, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// Mean-square statistics of psi(t) - t up to x.
    ErrorStats {
        #[arg(long)]
        x: f64,
    },
    /// Zero-table utilities.
    Zeros {
        #[command(subcommand)]
        command: ZerosCommand,
    },
    /// Truncated explicit formula against the sieve.
    Explicit {
        #[arg(long, required = true, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long = "T", required = true, value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long)]
        zeros: PathBuf,
        #[arg(long, value_enum, default_value = "m1")]
        which: WhichTarget,
    },
    /// Limiting distribution of sqrt(x) M1(x).
    Distribution(DistributionArgs),
}

#[derive(Subcommand)]
enum ZerosCommand {
    /// Check a zero table against the zero-counting function.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["prob_positive", "density", "montecarlo"])))]
struct DistributionArgs {
    /// Zero ordinates, one per line, ascending.
    #[arg(long)]
    zeros: PathBuf,
    /// Use only the first N zeros of the table.
    #[arg(long)]
    max_zeros: Option<usize>,
    /// Gaussian stand-in for the zeros above the table.
    #[arg(long, value_enum, default_value = "auto")]
    tail: Tail,
    #[arg(long, value_enum, default_value = "m1")]
    orientation: WhichTarget,
    /// P[Z > 0] by Fourier inversion.
    #[arg(long)]
    prob_positive: bool,
    /// Density on a grid `a:b:n`.
    #[arg(long, allow_hyphen_values = true)]
    density: Option<String>,
    /// Number of Monte Carlo samples.
    #[arg(long)]
    montecarlo: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Quadrature step of the inversion integral.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    /// Quadrature cut-off (default: where the transform has decayed).
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    W1,
    W2,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichTarget {
    M1,
    M2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tail {
    Auto,
    None,
}

struct Session {
    common: Common,
    started: Instant,
}

impl Session {
    fn engine(&self) -> PrimeEngine {
        let engine = PrimeEngine::default();
        match &self.common.cache_dir {
            Some(dir) => engine.with_cache_dir(dir),
            None => engine,
        }
    }

    fn evaluator(&self) -> Result<MertensEvaluator> {
        let engine = self.engine();
        let constants = compute_constants_with(&engine, self.common.prime_limit)?;
        Ok(MertensEvaluator::new(engine, constants))
    }

    fn manifest(&self, command: &str, params: &[(&str, String)], zeros: Option<&ZeroTable>, seed: Option<u64>) -> RunManifest {
        let parameters: BTreeMap<String, String> =
            params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        RunManifest::new(
            command,
            parameters,
            zeros.map(|z| z.digest().to_string()),
            self.common.prime_limit,
            seed,
        )
    }

    fn emit(&self, report: &Report, default: Format, manifest: RunManifest) -> Result<()> {
        emit(
            report,
            self.common.format.unwrap_or(default),
            self.common.out.as_deref(),
            manifest,
            self.started.elapsed(),
        )
    }
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn load_zeros(path: &Path, max: Option<usize>) -> Result<ZeroTable> {
    let table = ZeroTable::load(path).with_context(|| format!("cannot load zeros from {}", path.display()))?;
    Ok(match max {
        Some(n) => table.prefix(n),
        None => table,
    })
}

fn sample_table(samples: &[mertens_core::mertens_eval::MertensSample]) -> Table {
    let mut t = Table::new(&["x", "m1", "m2", "script_e"]);
    for s in samples {
        t.push(vec![s.x.into(), s.m1.into(), s.m2.into(), s.script_e.into()]);
    }
    t
}

fn run(cli: Cli) -> Result<()> {
    let cx = Session {
        common: cli.common,
        started: Instant::now(),
    };
    if let Some(n) = cx.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    match cli.command {
        Command::Constants => {
            let k = compute_constants_with(&cx.engine(), cx.common.prime_limit)?;
            let m = cx.manifest("constants", &[], None, None);
            cx.emit(&Report::record(&k)?, Format::Json, m)
        }
        Command::Eval { x } => {
            let ev = cx.evaluator()?;
            let mut sorted = x.clone();
            sorted.sort_by(f64::total_cmp);
            let samples = ev.evaluate_many(&sorted)?;
            // Report in the order given.
            let ordered: Vec<_> = x
                .iter()
                .map(|v| samples[sorted.partition_point(|s| s < v)])
                .collect();
            let m = cx.manifest("eval", &[("x", list(&x))], None, None);
            cx.emit(&Report::new(&ordered, sample_table(&ordered))?, Format::Csv, m)
        }
        Command::Scan { from, to, points } => {
            let grid = LogGrid::new(from, to, points)?;
            let report = cx.evaluator()?.scan(&grid)?;
            let m = cx.manifest(
                "scan",
                &[("from", from.to_string()), ("to", to.to_string()), ("points", points.to_string())],
                None,
                None,
            );
            cx.emit(&Report::new(&report, sample_table(&report.samples))?, Format::Csv, m)
        }
        Command::VerifyPositivity { limit } => {
            let report = cx.evaluator()?.verify_positivity(limit)?;
            let m = cx.manifest("verify-positivity", &[("limit", limit.to_string())], None, None);
            cx.emit(&Report::record(&report)?, Format::Json, m)?;
            if !report.verified {
                bail!(
                    "positivity fails: min M1 = {:e} near {}, min M2 = {:e} near {}",
                    report.min_m1,
                    report.argmin_m1,
                    report.min_m2,
                    report.argmin_m2
                );
            }
            Ok(())
        }
        Command::Logdensity { which, x } => {
            let set = match which {
                Which::W1 => DensitySet::W1,
                Which::W2 => DensitySet::W2,
            };
            let report = cx.evaluator()?.empirical_log_density(set, x)?;
            let name = match which {
                Which::W1 => "w1",
                Which::W2 => "w2",
            };
            let m = cx.manifest("logdensity", &[("which", name.into()), ("x", x.to_string())], None, None);
            cx.emit(&Report::record(&report)?, Format::Json, m)
        }
        Command::Residuals { x } => {
            let ev = cx.evaluator()?;
            let rows = x.iter().map(|&v| ev.residuals(v)).collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(&["x", "lemma31", "lemma41", "lemma41_tail", "lemma51", "cutoff"]);
            for r in &rows {
                t.push(vec![
                    r.x.into(),
                    r.lemma31.into(),
                    r.lemma41.into(),
                    r.lemma41_tail.into(),
                    r.lemma51.into(),
                    r.cutoff.into(),
                ]);
            }
            let m = cx.manifest("residuals", &[("x", list(&x))], None, None);
            cx.emit(&Report::new(&rows, t)?, Format::Csv, m)
        }
        Command::ErrorStats { x } => {
            let report = cx.evaluator()?.error_statistics(x)?;
            let m = cx.manifest("error-stats", &[("x", x.to_string())], None, None);
            cx.emit(&Report::record(&report)?, Format::Json, m)
        }
        Command::Zeros {
            command: ZerosCommand::Validate { file },
        } => {
            let table = load_zeros(&file, None)?;
            let report = inspect(&table)?;
            let identity = zero_sum_identity(&table);
            #[derive(Serialize)]
            struct Validation<'a> {
                file: String,
                validation: &'a mertens_core::zeta_zeros::ValidationReport,
                zero_sum_identity: mertens_core::zeta_zeros::ZeroSumIdentity,
                zero_sum_discrepancy: f64,
            }
            let doc = Validation {
                file: file.display().to_string(),
                validation: &report,
                zero_sum_identity: identity,
                zero_sum_discrepancy: identity.discrepancy(),
            };
            let mut t = Table::new(&["count", "max_height", "min_gap", "counting_passed", "mean_passed", "passed", "digest"]);
            t.push(vec![
                report.count.into(),
                report.max_height.into(),
                report.min_gap.unwrap_or(f64::NAN).into(),
                report.counting_check.passed.into(),
                report.mean_check.passed.into(),
                report.passed.into(),
                report.digest.as_str().into(),
            ]);
            let m = cx.manifest("zeros validate", &[("file", file.display().to_string())], Some(&table), None);
            cx.emit(&Report::new(&doc, t)?, Format::Json, m)?;
            if !report.passed {
                bail!("{} failed validation", file.display());
            }
            Ok(())
        }
        Command::Explicit { x, t, zeros, which } => {
            let table = load_zeros(&zeros, None)?;
            let report = compare(&x, &t, &table, &cx.evaluator()?)?;
            let target = match which {
                WhichTarget::M1 => Target::M1,
                WhichTarget::M2 => Target::M2,
            };
            let cells: Vec<_> = report.cells.iter().filter(|c| c.target == target).copied().collect();
            let mut csv = Table::new(&["x", "T", "explicit", "sieve", "residual", "budget"]);
            for c in &cells {
                csv.push(vec![
                    c.x.into(),
                    c.truncation_t.into(),
                    c.explicit.into(),
                    c.sieve.into(),
                    c.residual.into(),
                    c.budget.into(),
                ]);
            }
            #[derive(Serialize)]
            struct Explicit<'a> {
                target: Target,
                cells: Vec<mertens_core::explicit_formula::ComparisonCell>,
                medians: Vec<&'a mertens_core::explicit_formula::MedianResidual>,
                calibration: f64,
                max_ratio: f64,
                within_budget: bool,
                median_non_increasing: bool,
            }
            let medians: Vec<_> = report.medians.iter().filter(|m| m.target == target).collect();
            let non_increasing = medians.windows(2).all(|w| w[1].median <= w[0].median);
            let doc = Explicit {
                target,
                max_ratio: cells.iter().map(|c| c.ratio).fold(0.0, f64::max),
                within_budget: cells
                    .iter()
                    .all(|c| c.ratio <= mertens_core::explicit_formula::CALIBRATION),
                cells,
                medians,
                calibration: mertens_core::explicit_formula::CALIBRATION,
                median_non_increasing: non_increasing,
            };
            let name = match which {
                WhichTarget::M1 => "m1",
                WhichTarget::M2 => "m2",
            };
            let m = cx.manifest(
                "explicit",
                &[("x", list(&x)), ("T", list(&t)), ("which", name.into()), ("zeros", zeros.display().to_string())],
                Some(&table),
                None,
            );
            cx.emit(&Report::new(&doc, csv)?, Format::Csv, m)
        }
        Command::Distribution(args) => distribution(&cx, args),
    }
}

/// Non-negative integer, also accepted in exponent form such as `1e7`.
fn parse_integer(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got {s:?}")),
    }
}

fn parse_density(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        bail!("--density expects a:b:n, got {spec:?}");
    };
    Ok((
        a.parse().with_context(|| format!("bad density start {a:?}"))?,
        b.parse().with_context(|| format!("bad density end {b:?}"))?,
        n.parse().with_context(|| format!("bad density point count {n:?}"))?,
    ))
}

fn distribution(cx: &Session, args: DistributionArgs) -> Result<()> {
    let table = load_zeros(&args.zeros, args.max_zeros)?;
    let tail = match args.tail {
        Tail::Auto => TailModel::Auto,
        Tail::None => TailModel::None,
    };
    let orientation = match args.orientation {
        WhichTarget::M1 => Orientation::M1,
        WhichTarget::M2 => Orientation::M2,
    };
    let model = DistributionModel::new(table.clone(), tail, orientation)?;
    let quadrature = Quadrature {
        t_max: args.t_max,
        step: args.step,
    };
    let mut params = vec![
        ("zeros", args.zeros.display().to_string()),
        ("max_zeros", args.max_zeros.map(|n| n.to_string()).unwrap_or_default()),
        ("tail", format!("{:?}", tail).to_lowercase()),
        ("orientation", format!("{orientation:?}").to_lowercase()),
        ("step", args.step.to_string()),
        ("t_max", args.t_max.map(|t| t.to_string()).unwrap_or_default()),
    ];
    if args.prob_positive {
        let report = prob_positive(&model, quadrature)?;
        params.push(("mode", "prob-positive".into()));
        let m = cx.manifest("distribution", &params, Some(&table), None);
        return cx.emit(&Report::record(&report)?, Format::Json, m);
    }
    if let Some(spec) = &args.density {
        let (a, b, n) = parse_density(spec)?;
        let points = density_grid(&model, a, b, n, quadrature)?;
        let (mass, mean, variance) = grid_moments(&points);
        let mut t = Table::new(&["z", "density"]);
        for p in &points {
            t.push(vec![Cell::Float(p.z), Cell::Float(p.density)]);
        }
        #[derive(Serialize)]
        struct Density<'a> {
            points: &'a [mertens_core::bias_distribution::DensityPoint],
            mass: f64,
            mean: f64,
            variance: f64,
            theoretical_variance: f64,
        }
        let doc = Density {
            points: &points,
            mass,
            mean,
            variance,
            theoretical_variance: model.theoretical_variance(),
        };
        params.push(("mode", "density".into()));
        params.push(("density", spec.clone()));
        let m = cx.manifest("distribution", &params, Some(&table), None);
        return cx.emit(&Report::new(&doc, t)?, Format::Csv, m);
    }
    let n = args.montecarlo.expect("clap enforces one mode");
    let result = sample_z(&model, n, args.seed)?;
    params.push(("mode", "montecarlo".into()));
    params.push(("montecarlo", n.to_string()));
    let m = cx.manifest("distribution", &params, Some(&table), Some(args.seed));
    cx.emit(&Report::record(&result)?, Format::Json, m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = format!("{e:#}").replace('\n', " ");
            eprintln!("mertens: {message}");
            ExitCode::from(1)
        }
    }
}
