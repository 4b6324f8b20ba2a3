//! Acceptance suite. Runs every criterion in order, prints one `PASS` or
//! `FAIL` line for each and exits non-zero if any failed.
//!
//! The zero table is read from `$MERTENS_ZEROS` when set; otherwise the first
//! 10^5 ordinates are generated once into the target directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mertens_core::bias_distribution::{
    density_grid, grid_moments, prob_positive, sample_z, DistributionModel, Orientation,
    Quadrature, TailModel,
};
use mertens_core::constants::compute_constants;
use mertens_core::explicit_formula::{compare, Target};
use mertens_core::mertens_eval::{DensitySet, LogGrid, MertensEvaluator};
use mertens_core::zeta_zeros::{validate, zero_sum_identity, ZeroTable};

const ZERO_COUNT: usize = 100_000;
const SEED: u64 = 20_240_101;
const MODEL_VARIANCE: f64 = 0.046192;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn zero_file() -> PathBuf {
    if let Ok(path) = std::env::var("MERTENS_ZEROS") {
        return PathBuf::from(path);
    }
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("zeros100000.txt");
    if !path.exists() {
        let zeros = mertens_zerogen::first_zeros(ZERO_COUNT).expect("zero generation");
        mertens_zerogen::write_table(&path, &zeros).expect("write zero table");
    }
    path
}

fn c1() -> Outcome {
    let (k, elapsed) = timed(|| compute_constants(1_000_000).unwrap());
    let e_ok = (-1.333 < k.e_const) && (k.e_const <= -1.332);
    let b_ok = (0.261 <= k.b_const) && (k.b_const < 0.262);
    let ok = e_ok && b_ok && k.tail_bound < 1e-6 && elapsed < Duration::from_secs(10);
    outcome(
        ok,
        format!(
            "E={:.10} B={:.10} tail_bound={:.2e} time={:.2?}",
            k.e_const, k.b_const, k.tail_bound, elapsed
        ),
    )
}

fn c2() -> Outcome {
    let (report, elapsed) = timed(|| {
        let ev = MertensEvaluator::with_constants(compute_constants(10_000_000).unwrap());
        ev.verify_positivity(10_000_000).unwrap()
    });
    let ok = report.verified && elapsed < Duration::from_secs(60);
    outcome(
        ok,
        format!(
            "verified={} min_m1={:.3e} at {} min_m2={:.3e} at {} time={:.2?}",
            report.verified, report.min_m1, report.argmin_m1, report.min_m2, report.argmin_m2, elapsed
        ),
    )
}

fn c3(table: &ZeroTable, ev: &MertensEvaluator) -> Outcome {
    let xs = LogGrid::new(1e2, 1e4, 20).unwrap().values();
    let ts = [1e3, 1e4, table.max_height()];
    let (report, elapsed) = timed(|| compare(&xs, &ts, table, ev).unwrap());
    let medians = |target: Target| -> Vec<String> {
        report
            .medians
            .iter()
            .filter(|m| m.target == target)
            .map(|m| format!("{:.4}", m.median))
            .collect()
    };
    let ok = report.within_budget && report.median_non_increasing && elapsed < Duration::from_secs(60);
    outcome(
        ok,
        format!(
            "within_budget={} max_ratio={:.3} median_non_increasing={} medians m1=[{}] m2=[{}] time={:.2?}",
            report.within_budget,
            report.max_ratio,
            report.median_non_increasing,
            medians(Target::M1).join(","),
            medians(Target::M2).join(","),
            elapsed
        ),
    )
}

fn c4(table: &ZeroTable) -> Outcome {
    let id = zero_sum_identity(table);
    let ok = table.count() >= 10_000 && id.discrepancy() <= 1e-4;
    outcome(
        ok,
        format!(
            "zeros={} partial={:.9} tail={:.3e} target={:.9} discrepancy={:.2e}",
            table.count(),
            id.partial,
            id.tail_estimate,
            id.target,
            id.discrepancy()
        ),
    )
}

fn c5(table: &ZeroTable) -> Outcome {
    let (report, elapsed) = timed(|| {
        let model =
            DistributionModel::new(table.prefix(10_000), TailModel::Auto, Orientation::M1).unwrap();
        prob_positive(&model, Quadrature::default()).unwrap()
    });
    let delta = report.complement;
    let ok = (report.prob_positive - 0.99999973).abs() <= 2e-7
        && (0.5 * 2.6e-7..=2.0 * 2.6e-7).contains(&delta)
        && elapsed < Duration::from_secs(120);
    outcome(
        ok,
        format!(
            "zeros={} prob_positive={:.11} delta={:.3e} convergence={:.1e} time={:.2?}",
            report.zeros_used, report.prob_positive, delta, report.convergence, elapsed
        ),
    )
}

fn c6(table: &ZeroTable) -> Outcome {
    let model =
        DistributionModel::new(table.prefix(1_000), TailModel::Auto, Orientation::M1).unwrap();
    let theory = model.theoretical_variance();
    let points = density_grid(&model, -1.0, 3.0, 2001, Quadrature::default()).unwrap();
    let (mass, _, grid_var) = grid_moments(&points);
    let n = 1_000_000;
    let mc = sample_z(&model, n, SEED).unwrap();
    let sigma = (MODEL_VARIANCE / n as f64).sqrt();
    let cf_dev = mc
        .characteristic
        .iter()
        .map(|p| p.deviation)
        .fold(0.0, f64::max);
    let ok = (mass - 1.0).abs() <= 1e-6
        && (grid_var / theory - 1.0).abs() <= 0.01
        && (mc.mean - 1.0).abs() <= 3.0 * sigma
        && (mc.variance / MODEL_VARIANCE - 1.0).abs() <= 0.01
        && mc.characteristic.len() == 4
        && cf_dev <= 5e-3;
    outcome(
        ok,
        format!(
            "mass={:.9} grid_var={:.6} theory={:.6} mc_mean={:.6} (3sigma={:.1e}) mc_var={:.6} cf_dev={:.1e}",
            mass, grid_var, theory, mc.mean, 3.0 * sigma, mc.variance, cf_dev
        ),
    )
}

fn c7(ev: &MertensEvaluator) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for x in [1e3, 1e4, 1e5] {
        let r = ev.residuals(x).unwrap();
        ok &= r.lemma31.abs() <= 5.0 / x.sqrt() && r.lemma51.abs() <= 10.0 / x;
        parts.push(format!("x={x:e}: lemma31={:.2e} lemma51={:.2e}", r.lemma31, r.lemma51));
    }
    outcome(ok, parts.join("; "))
}

fn c8(ev: &MertensEvaluator) -> Outcome {
    let (s, elapsed) = timed(|| ev.error_statistics(1e6).unwrap());
    let ratio = s.dyadic_integral / s.x_sqrt_x;
    let ok = s.cramer_avg < 1.0 && ratio < 1.0 && elapsed < Duration::from_secs(30);
    outcome(
        ok,
        format!("cramer_avg={:.4} dyadic/x^1.5={:.4} time={:.2?}", s.cramer_avg, ratio, elapsed),
    )
}

fn c9(ev: &MertensEvaluator) -> Outcome {
    let d = ev.empirical_log_density(DensitySet::W1, 1e6).unwrap();
    outcome(
        (d.density - 1.0).abs() <= 1e-9,
        format!("density={:.15}", d.density),
    )
}

fn c10(zeros: &Path) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let z = zeros.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["constants", "--format", "json"],
        vec!["eval", "--x", "10,1e3,123456.5"],
        vec!["scan", "--from", "10", "--to", "1e6", "--points", "200"],
        vec!["verify-positivity", "--limit", "100000"],
        vec!["logdensity", "--which", "w2", "--x", "1e5"],
        vec!["residuals", "--x", "1e3,1e4"],
        vec!["error-stats", "--x", "1e5"],
        vec!["zeros", "validate", "--file", z, "--format", "json"],
        vec!["explicit", "--x", "100,5000", "--T", "1000,10000", "--zeros", z],
        vec!["distribution", "--zeros", z, "--max-zeros", "10000", "--prob-positive"],
        vec!["distribution", "--zeros", z, "--max-zeros", "1000", "--density", "-1:3:101"],
        vec![
            "distribution", "--zeros", z, "--max-zeros", "200", "--montecarlo", "100000",
            "--seed", "7", "--format", "json",
        ],
    ];
    let mut failures = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, "1"), (1, "0")] {
            let run_dir = dir.path().join(format!("{i}-{run}"));
            fs::create_dir_all(&run_dir).unwrap();
            let out = run_dir.join("result.out");
            let status = Command::new(env!("CARGO_BIN_EXE_mertens"))
                .args(args)
                .args(["--prime-limit", "1000000", "--threads", threads, "--out"])
                .arg(&out)
                .env_remove("MERTENS_CACHE_DIR")
                .status()
                .expect("binary runs");
            if !status.success() {
                failures.push(format!("{} exited {status}", args[0]));
            }
            outputs.push(fs::read(&out).unwrap_or_default());
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            failures.push(format!("{} output differs", args.join(" ")));
        }
    }
    let ok = failures.is_empty();
    let detail = if ok {
        format!("{} commands byte-identical across reruns", commands.len())
    } else {
        failures.join("; ")
    };
    outcome(ok, detail)
}

fn main() {
    let zeros = zero_file();
    let table = ZeroTable::load(&zeros).expect("zero table loads");
    let report = validate(&table).expect("zero table validates");
    println!(
        "zero table: {} ordinates up to {:.3}, sha256 {}",
        report.count, report.max_height, report.digest
    );
    let evaluator = MertensEvaluator::with_constants(compute_constants(1_000_000).unwrap());

    let criteria: Vec<Criterion> = vec![
        ("constants", Box::new(c1)),
        ("positivity", Box::new(c2)),
        ("explicit formula", Box::new(|| c3(&table, &evaluator))),
        ("zero-sum identity", Box::new(|| c4(&table))),
        ("bias", Box::new(|| c5(&table))),
        ("distribution", Box::new(|| c6(&table))),
        ("residual lemmas", Box::new(|| c7(&evaluator))),
        ("error statistics", Box::new(|| c8(&evaluator))),
        ("log density", Box::new(|| c9(&evaluator))),
        ("determinism", Box::new(|| c10(&zeros))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
