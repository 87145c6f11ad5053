//! Deterministic CSV and gnuplot output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::convergence::ConvergenceRow;
use super::soliton::{Snapshot, SolitonBundle};

/// Locale-independent scientific notation with 12 fractional digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn convergence_header(components: usize) -> String {
    let mut h = String::from("N,K,h,l2_error,observed_order");
    if components > 1 {
        for i in 1..=components {
            write!(h, ",l2_error_u{i},observed_order_u{i}").unwrap();
        }
    }
    h
}

/// Per-component columns are appended when `components > 1`.
pub fn convergence_csv(rows: &[ConvergenceRow], components: usize) -> String {
    let mut out = convergence_header(components);
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{},{},{},{},{}",
            r.degree,
            r.elements,
            fmt_num(r.h),
            fmt_num(r.l2_error),
            fmt_opt(r.observed_order)
        )
        .unwrap();
        if components > 1 {
            for (e, p) in r.component_errors.iter().zip(&r.component_orders) {
                write!(out, ",{},{}", fmt_num(*e), fmt_opt(*p)).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn mass_csv(bundle: &SolitonBundle) -> String {
    let components = bundle.mass.first().map_or(1, |(_, m)| m.len());
    let mut out = String::from("t");
    for i in 1..=components {
        write!(out, ",mass_u{i}").unwrap();
    }
    out.push('\n');
    for (t, m) in &bundle.mass {
        out.push_str(&fmt_num(*t));
        for v in m {
            write!(out, ",{}", fmt_num(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn snapshot_csv(snap: &Snapshot) -> String {
    let mut out = String::from("x");
    for i in 1..=snap.modulus.len() {
        write!(out, ",abs_u{i}").unwrap();
    }
    out.push('\n');
    for (j, x) in snap.x.iter().enumerate() {
        out.push_str(&fmt_num(*x));
        for m in &snap.modulus {
            write!(out, ",{}", fmt_num(m[j])).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn snapshot_file_name(t: f64) -> String {
    format!("snapshot_t{t:.3}.csv")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Log-log plot of error against `h`, one series per degree.
pub fn convergence_gnuplot(csv_name: &str, rows: &[ConvergenceRow]) -> String {
    let mut degrees: Vec<usize> = rows.iter().map(|r| r.degree).collect();
    degrees.dedup();
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set logscale xy\nset xlabel 'h'\nset ylabel 'L2 error'\nset key left top").unwrap();
    writeln!(s, "set terminal pngcairo size 800,600\nset output 'convergence.png'").unwrap();
    let series: Vec<String> = degrees
        .iter()
        .map(|n| format!("'{csv_name}' every ::1 using ($1=={n}?$3:1/0):4 with linespoints title 'N={n}'"))
        .collect();
    writeln!(s, "plot {}", series.join(", \\\n     ")).unwrap();
    s
}

/// Mass history and modulus snapshots.
pub fn soliton_gnuplot(mass_name: &str, snapshot_names: &[(f64, String)], components: usize) -> String {
    let mut s = String::new();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal pngcairo size 800,600").unwrap();
    writeln!(s, "set output 'mass.png'\nset xlabel 't'\nset ylabel 'mass'").unwrap();
    let mass: Vec<String> = (1..=components)
        .map(|i| format!("'{mass_name}' every ::1 using 1:{} with lines title 'u{i}'", i + 1))
        .collect();
    writeln!(s, "plot {}", mass.join(", ")).unwrap();
    writeln!(s, "set output 'snapshots.png'\nset xlabel 'x'\nset ylabel '|u|'").unwrap();
    let mut snaps = Vec::new();
    for (t, name) in snapshot_names {
        for i in 1..=components {
            snaps.push(format!("'{name}' every ::1 using 1:{} with lines title 'u{i}, t={t}'", i + 1));
        }
    }
    if !snaps.is_empty() {
        writeln!(s, "plot {}", snaps.join(", \\\n     ")).unwrap();
    }
    s
}

/// Writes `convergence.csv` and `convergence.gp` into `dir`.
pub fn emit_convergence(dir: &Path, rows: &[ConvergenceRow], components: usize) -> Result<Vec<PathBuf>> {
    let csv = dir.join("convergence.csv");
    let gp = dir.join("convergence.gp");
    write_file(&csv, &convergence_csv(rows, components))?;
    write_file(&gp, &convergence_gnuplot("convergence.csv", rows))?;
    Ok(vec![csv, gp])
}

/// Writes `mass.csv`, one snapshot file per snapshot time and `soliton.gp`.
pub fn emit_soliton(dir: &Path, bundle: &SolitonBundle) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mass = dir.join("mass.csv");
    write_file(&mass, &mass_csv(bundle))?;
    written.push(mass);
    let mut names = Vec::new();
    for snap in &bundle.snapshots {
        let name = snapshot_file_name(snap.t);
        let path = dir.join(&name);
        write_file(&path, &snapshot_csv(snap))?;
        written.push(path);
        names.push((snap.t, name));
    }
    let components = bundle.mass.first().map_or(1, |(_, m)| m.len());
    let gp = dir.join("soliton.gp");
    write_file(&gp, &soliton_gnuplot("mass.csv", &names, components))?;
    written.push(gp);
    Ok(written)
}
