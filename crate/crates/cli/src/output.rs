//! CSV artifacts and the gnuplot script. Numbers are written with 17
//! significant digits so that identical runs give identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use splinegabor::experiment::{method_label, TableRow};
use splinegabor::{CoefficientVector, ExperimentOutcome};

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

pub fn errors_file(budget: usize) -> String {
    format!("errors_N{budget}.csv")
}

pub const COEFFICIENTS_FILE: &str = "coefficients.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_FILE: &str = "plot.gp";
pub const SUMMARY_HEADER: [&str; 8] = ["experiment", "target", "k", "method", "budget", "mean_rel_err", "l2_rel_err", "max_rel_err"];

/// Summary lines of one experiment, without the header.
pub fn summary_records(name: &str, outcome: &ExperimentOutcome) -> Vec<[String; 8]> {
    let c = &outcome.config;
    outcome
        .results
        .iter()
        .map(|r| {
            [
                name.to_string(),
                c.target.to_string(),
                c.k.to_string(),
                method_label(c),
                r.budget.to_string(),
                num(r.report.mean),
                num(r.report.l2_ratio),
                num(r.report.max),
            ]
        })
        .collect()
}

pub fn write_summary(path: &Path, records: &[[String; 8]]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in records {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Error, coefficient and summary CSVs plus a plot script for one
/// experiment, all inside `dir`.
pub fn write_experiment(dir: &Path, name: &str, outcome: &ExperimentOutcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();

    for r in &outcome.results {
        let path = dir.join(errors_file(r.budget));
        let mut w = writer(&path)?;
        w.write_record(["x", "re_ref", "im_ref", "re_approx", "im_approx", "rel_err"])?;
        for (j, &x) in outcome.x.iter().enumerate() {
            let (f, g) = (outcome.reference[j], r.approximation[j]);
            w.write_record([num(x), num(f.re), num(f.im), num(g.re), num(g.im), num(r.report.pointwise[j])])?;
        }
        w.flush()?;
        written.push(path);
    }

    let path = dir.join(COEFFICIENTS_FILE);
    let coefficients = match (&outcome.full, outcome.results.last()) {
        (Some(full), _) => Some(full),
        (None, Some(last)) => Some(&last.coefficients),
        (None, None) => None,
    };
    write_coefficients(&path, coefficients, outcome.full.is_none())?;
    written.push(path);

    let path = dir.join(SUMMARY_FILE);
    write_summary(&path, &summary_records(name, outcome))?;
    written.push(path);

    let path = dir.join(PLOT_FILE);
    let budgets: Vec<usize> = outcome.results.iter().map(|r| r.budget).collect();
    fs::write(&path, plot_script(name, &budgets)).with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(written)
}

/// `rank,m,n,abs_coeff` by decreasing magnitude; only the selected atoms
/// when `nonzero_only`.
fn write_coefficients(path: &Path, c: Option<&CoefficientVector>, nonzero_only: bool) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["rank", "m", "n", "abs_coeff"])?;
    if let Some(c) = c {
        let mut rank = 0;
        for q in c.ranking() {
            let mag = c.values()[q].norm();
            if nonzero_only && mag == 0.0 {
                continue;
            }
            rank += 1;
            let atom = c.index()[q];
            w.write_record([rank.to_string(), atom.m.to_string(), atom.n.to_string(), num(mag)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn plot_script(name: &str, budgets: &[usize]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot {PLOT_FILE}, run from this directory");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '10^{{%L}}'");
    let _ = writeln!(s, "set key outside right");
    let _ = writeln!(s);
    let _ = writeln!(s, "set output 'errors.png'");
    let _ = writeln!(s, "set title '{name}: relative error'");
    let _ = writeln!(s, "set xlabel 'x'");
    let series: Vec<String> = budgets
        .iter()
        .map(|b| format!("'{}' using 1:6 skip 1 with lines title 'N = {b}'", errors_file(*b)))
        .collect();
    let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    let _ = writeln!(s);
    let _ = writeln!(s, "set output 'coefficients.png'");
    let _ = writeln!(s, "set title '{name}: sorted coefficient magnitudes'");
    let _ = writeln!(s, "set xlabel 'rank'");
    let _ = writeln!(s, "plot '{COEFFICIENTS_FILE}' using 1:4 skip 1 with points pt 7 ps 0.4 notitle");
    let _ = writeln!(s);
    if let Some(&b) = budgets.last() {
        let _ = writeln!(s, "unset logscale y");
        let _ = writeln!(s, "set format y '%g'");
        let _ = writeln!(s, "set output 'field.png'");
        let _ = writeln!(s, "set title '{name}: real part, N = {b}'");
        let _ = writeln!(s, "set xlabel 'x'");
        let file = errors_file(b);
        let _ = writeln!(
            s,
            "plot '{file}' using 1:2 skip 1 with lines title 'reference', \\\n     '{file}' using 1:4 skip 1 with lines dt 2 title 'approximation'"
        );
    }
    s
}

pub const TABLE_FILE: &str = "table1.csv";
pub const TABLE_L2_FILE: &str = "table1_l2.csv";

/// Comparison table in the layout target, k, method, one column per budget;
/// mean relative errors in `table1.csv`, norm ratios in `table1_l2.csv`.
pub fn write_table(dir: &Path, rows: &[TableRow]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for (file, pick) in [(TABLE_FILE, 0), (TABLE_L2_FILE, 1)] {
        let path = dir.join(file);
        let mut w = writer(&path)?;
        let mut header = vec!["target".to_string(), "k".into(), "method".into()];
        if let Some(row) = rows.first() {
            header.extend(row.budgets.iter().map(|b| format!("N{b}")));
        }
        w.write_record(&header)?;
        for row in rows {
            let values = if pick == 0 { &row.mean } else { &row.l2 };
            let mut record = vec![row.target.to_string(), row.k.to_string(), row.label.clone()];
            record.extend(values.iter().map(|&v| num(v)));
            w.write_record(&record)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

/// The table as aligned text for the terminal.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut s = String::new();
    let budgets = rows.first().map(|r| r.budgets.clone()).unwrap_or_default();
    let _ = write!(s, "{:<13} {:>4} {:<9}", "target", "k", "method");
    for b in &budgets {
        let _ = write!(s, " {:>9}", format!("N={b}"));
    }
    s.push('\n');
    for row in rows {
        let _ = write!(s, "{:<13} {:>4} {:<9}", row.target.to_string(), row.k, row.label);
        for v in &row.mean {
            let _ = write!(s, " {v:>9.1e}");
        }
        s.push('\n');
    }
    s
}
