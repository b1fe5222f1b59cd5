//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. The process exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use splinegabor::experiment::{comparison_table, count_above, interest_frame, TableRow};
use splinegabor::special::{bessel_jy_upto, hankel1, hankel1_derivative};
use splinegabor::{
    analyze_with_dual, canonical_dual, least_squares, make_bspline, run_experiment, Complex64,
    CylinderScatteringField, DualKind, ExperimentConfig, FunctionalOmpState, Method, OmpState, TargetField,
    TargetKind,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within_decade(value: f64, reference: f64) -> bool {
    value.is_finite() && value <= 10.0 * reference && value >= reference / 10.0
}

fn table() -> &'static (Vec<TableRow>, Duration) {
    static TABLE: OnceLock<(Vec<TableRow>, Duration)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let start = Instant::now();
        let rows = comparison_table(&ExperimentConfig::default());
        (rows, start.elapsed())
    })
}

fn cell(target: TargetKind, k: f64, label: &str) -> &'static TableRow {
    table()
        .0
        .iter()
        .find(|r| r.target == target && r.k == k && r.label == label)
        .expect("table has every cell")
}

fn partition_of_unity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for l in 1..=5usize {
        let w = make_bspline(l).unwrap();
        for _ in 0..10_000 {
            let x: f64 = rng.gen_range(-20.0..20.0);
            let base = x.floor() as i64;
            let s: f64 = (base - l as i64..=base + 1).map(|j| w.eval(x - j as f64)).sum();
            worst = worst.max((s - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max deviation {worst:.2e}, {:.3} s", elapsed.as_secs_f64()),
    )
}

fn perfect_reconstruction() -> Verdict {
    let start = Instant::now();
    let atoms = ExperimentConfig::default().system().unwrap().atom_count();
    let mut errs = Vec::new();
    for method in [Method::Dual2, Method::Dual1, Method::Canonical] {
        let config = ExperimentConfig {
            method,
            budgets: vec![atoms],
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&config).unwrap();
        errs.push((method, out.results[0].report.mean));
    }
    let elapsed = start.elapsed();
    let pass = errs.iter().all(|&(_, e)| e <= 1e-10) && elapsed < Duration::from_secs(30);
    let detail = errs
        .iter()
        .map(|(m, e)| format!("{m} {e:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(pass, format!("{detail} ({atoms} atoms, {:.1} s)", elapsed.as_secs_f64()))
}

fn dual2_table_row() -> Verdict {
    let row = cell(TargetKind::Cylinder, 5.0, "Dual2");
    let reference = [6.3e-2, 7.9e-7, 3.6e-14];
    let pass = row.mean.iter().zip(reference).all(|(&v, r)| within_decade(v, r)) && row.mean[2] <= 1e-10;
    verdict(
        pass,
        format!(
            "(60, 120, 240) = ({:.2e}, {:.2e}, {:.2e}) vs ({:.1e}, {:.1e}, {:.1e})",
            row.mean[0], row.mean[1], row.mean[2], reference[0], reference[1], reference[2]
        ),
    )
}

fn omp_dominance() -> Verdict {
    let (rows, elapsed) = table();
    let mut violations = Vec::new();
    for target in [TargetKind::Cylinder, TargetKind::PointSource] {
        for k in [5.0, 15.0] {
            let dual = cell(target, k, "Dual2");
            let omp = cell(target, k, "OMP(20)");
            for (i, budget) in omp.budgets.iter().enumerate() {
                if !(omp.mean[i] < dual.mean[i]) {
                    violations.push(format!(
                        "{target} k={k} N={budget}: OMP {:.2e} vs Dual2 {:.2e}",
                        omp.mean[i], dual.mean[i]
                    ));
                }
            }
        }
    }
    let k15 = cell(TargetKind::Cylinder, 15.0, "OMP(20)").mean[0];
    let cells = rows.iter().map(|r| r.mean.len()).sum::<usize>();
    let pass = violations.is_empty() && k15 <= 1e-2 && *elapsed < Duration::from_secs(300);
    let mut detail = format!(
        "{cells} cells in {:.1} s; cylinder k=15 OMP(20) N=60 {k15:.2e}",
        elapsed.as_secs_f64()
    );
    if !violations.is_empty() {
        detail.push_str("; not smaller: ");
        detail.push_str(&violations.join("; "));
    }
    verdict(pass, detail)
}

fn blocksize_effect() -> Verdict {
    let run = |blocksize| {
        let config = ExperimentConfig {
            method: Method::Omp,
            blocksize,
            budgets: vec![60],
            ..ExperimentConfig::default()
        };
        run_experiment(&config).unwrap().results[0].report.mean
    };
    let (e20, e1) = (run(20), run(1));
    verdict(e1 >= 10.0 * e20, format!("blocksize 20 {e20:.2e}, blocksize 1 {e1:.2e}, ratio {:.1}", e1 / e20))
}

fn coefficient_decay() -> Verdict {
    let count = |k| {
        let config = ExperimentConfig {
            k,
            budgets: vec![1],
            ..ExperimentConfig::default()
        };
        let out = run_experiment(&config).unwrap();
        count_above(out.full.as_ref().unwrap(), 1e-5)
    };
    let (c5, c15) = (count(5.0), count(15.0));
    verdict(
        c5 <= 160 && (200..=300).contains(&c15),
        format!("above 1e-5: k=5 {c5} (at most 160), k=15 {c15} (200 to 300)"),
    )
}

fn interval_extension() -> Verdict {
    let run = |extend| {
        let config = ExperimentConfig {
            budgets: vec![120],
            extend,
            ..ExperimentConfig::default()
        };
        run_experiment(&config).unwrap().results[0].report.mean
    };
    let (with, without) = (run(true), run(false));
    verdict(
        without >= 10.0 * with,
        format!("extended {with:.2e}, zero-padded {without:.2e}, ratio {:.1e}", without / with),
    )
}

fn special_functions() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for z in [1.0, 5.0, 15.0, 40.0] {
        let (j, y) = bessel_jy_upto(51, z).unwrap();
        let expected = 2.0 / (std::f64::consts::PI * z);
        for n in 0..=50 {
            let w = j[n + 1] * y[n] - j[n] * y[n + 1];
            worst = worst.max((w - expected).abs() / expected);
        }
    }
    let exact = [0.3, 2.5, 17.0]
        .iter()
        .all(|&z| hankel1_derivative(0, z).unwrap() == -hankel1(1, z).unwrap());
    // 200-term sum at 50 digits, tests/oracles/special_values.py
    let oracle = Complex64::new(0.715_531_670_656_981_01, 1.827_382_014_928_926_3);
    let value = CylinderScatteringField::new(5.0).unwrap().eval(0.0);
    let series = (value - oracle).norm() / oracle.norm();
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-10 && exact && series <= 1e-12 && elapsed < Duration::from_secs(5),
        format!(
            "Wronskian {worst:.1e}, H0' = -H1 {}, cylinder series {series:.1e}, {:.3} s",
            if exact { "exact" } else { "inexact" },
            elapsed.as_secs_f64()
        ),
    )
}

fn path_equivalence() -> Verdict {
    let config = ExperimentConfig::default();
    let frame = interest_frame(&config).unwrap();
    let dual = canonical_dual(&frame).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f: Vec<Complex64> = (0..frame.grid().len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let ls = least_squares(&frame, &f).unwrap();
        let an = analyze_with_dual(&f, &dual, DualKind::Canonical).unwrap();
        let diff: f64 = ls.values().iter().zip(an.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let scale: f64 = an.values().iter().map(|v| v.norm_sqr()).sum();
        worst = worst.max((diff / scale).sqrt());
    }

    let system = config.system().unwrap();
    let target = CylinderScatteringField::new(5.0).unwrap();
    let samples = target.sample(&frame.grid().points().collect::<Vec<_>>());
    let mut vector = OmpState::new(&frame, &samples, 1).unwrap();
    let mut functional = FunctionalOmpState::new(&system, &target, 1).unwrap();
    for _ in 0..20 {
        vector.step().unwrap();
        functional.step().unwrap();
    }
    let mismatches = vector
        .selected()
        .iter()
        .zip(functional.selected())
        .filter(|(a, b)| a != b)
        .count();
    verdict(
        worst <= 1e-10 && mismatches <= 2,
        format!("least squares vs canonical {worst:.1e}; first 20 OMP picks differ in {mismatches} places"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("partition of unity", partition_of_unity),
        ("perfect reconstruction with all dual coefficients", perfect_reconstruction),
        ("Dual2 accuracy versus sparsity, cylinder k=5", dual2_table_row),
        ("OMP(20) below Dual2 in every cell", omp_dominance),
        ("blocksize 20 versus blocksize 1", blocksize_effect),
        ("Dual2 coefficient decay", coefficient_decay),
        ("interval extension", interval_extension),
        ("special functions", special_functions),
        ("least squares, canonical dual, and the two OMP paths agree", path_equivalence),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let v = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        println!("{id}: {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
