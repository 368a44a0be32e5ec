//! Writers for sweep results: long-format CSV, a JSON-lines mirror, gnuplot
//! `splot` matrix blocks and a gnuplot script.
//!
//! CSV rows carry no timing information, so identical inputs give
//! byte-identical files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::{SweepResult, SweepRow, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Csv,
    JsonLines,
    /// `<stem>_num.dat`, `<stem>_ana.dat`, `<stem>_residual.dat`
    Matrix,
    Gnuplot,
}

/// Contour levels used by the generated gnuplot script.
pub const CONTOUR_LEVELS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Fixed 15-significant-digit scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.14e}")
    }
}

pub fn csv_header(system: System) -> String {
    let dim = system.dimension();
    let mut cols = vec!["omega0T".to_string(), "delta0T".into(), "initial_state".into()];
    cols.extend((1..=dim).map(|k| format!("p{k}_num")));
    cols.extend((1..=dim).map(|k| format!("p{k}_ana")));
    cols.push("residual".into());
    if system == System::ThreeLevel {
        cols.push("majorana_residual".into());
    }
    cols.join(",")
}

fn csv_line(system: System, row: &SweepRow) -> String {
    let mut cells = vec![fmt_f64(row.omega0_t), fmt_f64(row.delta0_t), row.initial_state.to_string()];
    cells.extend(row.p_numeric.iter().map(|&p| fmt_f64(p)));
    cells.extend(row.p_analytic.iter().map(|&p| fmt_f64(p)));
    cells.push(fmt_f64(row.residual));
    if system == System::ThreeLevel {
        cells.push(row.majorana_residual.map(fmt_f64).unwrap_or_default());
    }
    cells.join(",")
}

/// CSV text: header plus one LF-terminated line per row.
pub fn to_csv(result: &SweepResult) -> String {
    let mut s = csv_header(result.system);
    s.push('\n');
    for row in &result.rows {
        s.push_str(&csv_line(result.system, row));
        s.push('\n');
    }
    s
}

/// Splot block text for one surface: `omega0T delta0T value` lines with a
/// blank line whenever `omega0T` changes.
pub fn to_matrix(result: &SweepResult, value: impl Fn(&SweepRow) -> f64) -> String {
    let mut s = String::new();
    let mut prev: Option<f64> = None;
    for row in &result.rows {
        if prev.is_some_and(|p| p != row.omega0_t) {
            s.push('\n');
        }
        prev = Some(row.omega0_t);
        s.push_str(&format!("{} {} {}\n", fmt_f64(row.omega0_t), fmt_f64(row.delta0_t), fmt_f64(value(row))));
    }
    s
}

fn gnuplot_script(result: &SweepResult, stem: &str) -> String {
    let levels: Vec<String> = CONTOUR_LEVELS.iter().map(|l| l.to_string()).collect();
    let is_cut = result.rows.windows(2).all(|w| w[0].delta0_t == w[1].delta0_t);
    let dim = result.dimension();
    if is_cut {
        let first = result.rows.first();
        let target = first.map_or(dim, |r| r.target_state());
        // Columns: 1 omega0T, then p_num block starting at 4, p_ana after it.
        let num_col = 3 + target;
        let ana_col = 3 + dim + target;
        format!(
            "# Final population of state {target} against Omega0*T.\n\
             set datafile separator ','\n\
             set key autotitle columnhead\n\
             set xlabel 'Omega0 T'\n\
             set ylabel 'P{target}'\n\
             set yrange [0:1]\n\
             plot '{stem}.csv' using 1:{num_col} with lines title 'numerical', \\\n     \
             '{stem}.csv' using 1:{ana_col} with points pt 7 ps 0.4 title 'adiabatic-sudden'\n"
        )
    } else {
        format!(
            "# Contours of the transfer probability over (Omega0 T, Delta0 T).\n\
             set view map\n\
             unset surface\n\
             set contour base\n\
             set cntrparam levels discrete {levels}\n\
             set xlabel 'Omega0 T'\n\
             set ylabel 'Delta0 T'\n\
             set pm3d map\n\
             splot '{stem}_num.dat' using 1:2:3 with pm3d title 'numerical'\n\
             pause -1\n\
             splot '{stem}_ana.dat' using 1:2:3 with pm3d title 'adiabatic-sudden'\n\
             pause -1\n\
             splot '{stem}_residual.dat' using 1:2:3 with pm3d title 'numerical - analytic'\n",
            levels = levels.join(",")
        )
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the requested formats as `<dir>/<stem>.*` and returns the paths.
pub fn emit_outputs(result: &SweepResult, formats: &[OutputFormat], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut emit = |name: String, contents: String| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    for format in formats {
        match format {
            OutputFormat::Csv => emit(format!("{stem}.csv"), to_csv(result))?,
            OutputFormat::JsonLines => {
                let mut s = String::new();
                for row in &result.rows {
                    s.push_str(&serde_json::to_string(row).map_err(|e| Error::Inconsistent(e.to_string()))?);
                    s.push('\n');
                }
                emit(format!("{stem}.jsonl"), s)?
            }
            OutputFormat::Matrix => {
                let target = |r: &SweepRow| r.target_state() - 1;
                emit(format!("{stem}_num.dat"), to_matrix(result, |r| r.p_numeric[target(r)]))?;
                emit(format!("{stem}_ana.dat"), to_matrix(result, |r| r.p_analytic[target(r)]))?;
                emit(format!("{stem}_residual.dat"), to_matrix(result, |r| r.residual))?;
            }
            OutputFormat::Gnuplot => emit(format!("{stem}.gp"), gnuplot_script(result, stem))?,
        }
    }
    Ok(written)
}

/// Trajectory CSV: `t,p1,...,pN`.
pub fn emit_trajectory(points: &[(f64, Vec<f64>)], dim: usize, path: &Path) -> Result<()> {
    let mut s = String::from("t");
    for k in 1..=dim {
        s.push_str(&format!(",p{k}"));
    }
    s.push('\n');
    for (t, pops) in points {
        s.push_str(&fmt_f64(*t));
        for p in pops {
            s.push(',');
            s.push_str(&fmt_f64(*p));
        }
        s.push('\n');
    }
    write_file(path, &s)
}
