use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{ConvergenceRow, Format, SweepResult};
use crate::error::{Error, Result};

fn z_label(re: f64, im: f64) -> String {
    format!("serr_re{re}_im{im}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with columns `n,seed,kolmogorov,levy`, one `serr_re<re>_im<im>` column
/// per grid point, then `trial,pairing_residual,truncated_count,rank_bound,
/// replaced,checks,error` and `wall_time` when any row recorded it.
pub fn write_csv(rows: &[ConvergenceRow], mut out: impl Write) -> Result<()> {
    let grid: Vec<(f64, f64)> = rows
        .iter()
        .find(|r| !r.stieltjes.is_empty())
        .map(|r| r.stieltjes.iter().map(|s| (s.z.re, s.z.im)).collect())
        .unwrap_or_default();
    let timed = rows.iter().any(|r| r.wall_time.is_some());

    let mut header = vec!["n".to_string(), "seed".into(), "kolmogorov".into(), "levy".into()];
    header.extend(grid.iter().map(|&(re, im)| z_label(re, im)));
    header.extend(
        ["trial", "pairing_residual", "truncated_count", "rank_bound", "replaced", "checks", "error"]
            .map(String::from),
    );
    if timed {
        header.push("wall_time".into());
    }
    writeln!(out, "{}", header.join(","))?;

    for r in rows {
        let mut f = vec![
            r.n.to_string(),
            r.seed.to_string(),
            r.kolmogorov.to_string(),
            r.levy.to_string(),
        ];
        for i in 0..grid.len() {
            f.push(r.stieltjes.get(i).map_or(f64::NAN, |s| s.error).to_string());
        }
        f.push(r.trial.to_string());
        f.push(r.pairing_residual.to_string());
        match &r.pipeline {
            Some(p) => {
                f.push(p.truncated_count.to_string());
                f.push(p.rank_bound.to_string());
                f.push(p.replaced.to_string());
            }
            None => f.extend(["", "", ""].map(String::from)),
        }
        let checks = if r.checks.is_empty() {
            "none"
        } else if r.checks.iter().all(|c| c.passed) {
            "pass"
        } else {
            "fail"
        };
        f.push(checks.into());
        f.push(csv_field(r.error.as_deref().unwrap_or("")));
        if timed {
            f.push(r.wall_time.map(|t| t.to_string()).unwrap_or_default());
        }
        writeln!(out, "{}", f.join(","))?;
    }
    Ok(())
}

pub fn write_json(rows: &[ConvergenceRow], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json_rows(text: &str) -> Result<Vec<ConvergenceRow>> {
    Ok(serde_json::from_str(text)?)
}

/// `<dir>/<stem>_hist_n<n>_t<trial>.csv` next to `path`.
pub fn histogram_path(path: &Path, n: usize, trial: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_hist_n{n}_t{trial}.csv"))
}

/// Writes the rows to `path` (standard output when `None`) and the
/// histograms next to it. Returns the files written.
pub fn emit(result: &SweepResult, format: Format, path: Option<&Path>) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(Error::Config("nothing to emit: no rows".into()));
    }
    let mut written = Vec::new();
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            match format {
                Format::Csv => write_csv(&result.rows, &mut w)?,
                Format::Json => write_json(&result.rows, &mut w)?,
            }
            w.flush()?;
            written.push(p.to_path_buf());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match format {
                Format::Csv => write_csv(&result.rows, &mut lock)?,
                Format::Json => write_json(&result.rows, &mut lock)?,
            }
        }
    }
    if !result.histograms.is_empty() {
        let base = path.ok_or_else(|| {
            Error::Config("histogram output needs an output path".into())
        })?;
        for (n, trial, h) in &result.histograms {
            let hp = histogram_path(base, *n, *trial);
            let mut w = BufWriter::new(File::create(&hp)?);
            h.write_csv(&mut w)?;
            w.flush()?;
            written.push(hp);
        }
    }
    Ok(written)
}
