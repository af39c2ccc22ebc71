//! CSV and JSON writers. Every output starts with the resolved config.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{BenchConfig, Format};
use crate::experiments::{ChainOutput, IntegratorReport, ScalingReport, Table1Row};
use crate::BenchError;

fn config_line(cfg: &BenchConfig) -> Result<String, BenchError> {
    Ok(format!("# config: {}\n", serde_json::to_string(cfg)?))
}

fn csv_body<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Header line plus CSV rows, or `{config, rows}` as JSON.
pub fn render<R: Serialize>(cfg: &BenchConfig, rows: &[R]) -> Result<String, BenchError> {
    match cfg.format {
        Format::Csv => Ok(config_line(cfg)? + &csv_body(rows)?),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a, R> {
                config: &'a BenchConfig,
                rows: &'a [R],
            }
            Ok(serde_json::to_string_pretty(&Doc { config: cfg, rows })? + "\n")
        }
    }
}

pub fn render_sample(cfg: &BenchConfig, runs: &[ChainOutput]) -> Result<String, BenchError> {
    let rows: Vec<_> = runs.iter().map(|r| &r.row).collect();
    render(cfg, &rows)
}

/// Every recorded position, one row per (algorithm, seed, index).
pub fn render_positions(cfg: &BenchConfig, runs: &[ChainOutput]) -> Result<String, BenchError> {
    let mut out = config_line(cfg)?;
    let d = runs.first().map_or(0, |r| r.record.dim);
    out.push_str("algorithm,seed,index");
    for j in 0..d {
        out.push_str(&format!(",x{j}"));
    }
    out.push('\n');
    for r in runs {
        for i in 0..r.record.rows() {
            out.push_str(&format!("{},{},{}", r.row.algorithm, r.row.seed, i));
            for x in r.record.row(i) {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn render_table1(cfg: &BenchConfig, rows: &[Table1Row]) -> Result<String, BenchError> {
    render(cfg, rows)
}

pub fn render_scaling(cfg: &BenchConfig, rep: &ScalingReport) -> Result<String, BenchError> {
    match cfg.format {
        Format::Json => Ok(serde_json::to_string_pretty(&serde_json::json!({ "config": cfg, "report": rep }))? + "\n"),
        Format::Csv => {
            let mut s = render(cfg, &rep.rows)?;
            for (a, e) in &rep.exponents {
                s.push_str(&format!("# exponent {a}: {e:.4}\n"));
            }
            s.push_str(&format!("# chebyshev time ratio: {:.4}\n", rep.chebyshev_time_ratio));
            Ok(s)
        }
    }
}

pub fn render_integrators(cfg: &BenchConfig, rep: &IntegratorReport) -> Result<String, BenchError> {
    match cfg.format {
        Format::Json => Ok(serde_json::to_string_pretty(&serde_json::json!({ "config": cfg, "report": rep }))? + "\n"),
        Format::Csv => {
            let mut s = render(cfg, &rep.bias)?;
            for (k, o) in &rep.orders {
                s.push_str(&format!("# order {k}: {o:.4}\n"));
            }
            s.push_str("# smc variance: h,monte_carlo,quadrature,standard_error\n");
            for r in &rep.smc_variance {
                s.push_str(&format!("# {},{},{},{}\n", r.h, r.monte_carlo, r.quadrature, r.standard_error));
            }
            Ok(s)
        }
    }
}

/// `out.csv` becomes `out.positions.csv`.
pub fn positions_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.positions.csv"))
}

/// Writes to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), BenchError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ChainRow;

    #[test]
    fn csv_layout() {
        let cfg = BenchConfig { d: 1, ..Default::default() };
        let rows = [ChainRow { algorithm: "damped".into(), seed: 3, min_ess: 1.5, mean_ess: 2.0, cov_error: 0.25 }];
        let text = render(&cfg, &rows).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# config: {\"d\":1,"));
        assert_eq!(lines[1], "algorithm,seed,min_ess,mean_ess,cov_error");
        assert_eq!(lines[2], "damped,3,1.5,2.0,0.25");
    }

    #[test]
    fn json_layout() {
        let cfg = BenchConfig { format: Format::Json, ..Default::default() };
        let rows = [ChainRow { algorithm: "rhmc".into(), seed: 1, min_ess: 1.0, mean_ess: 1.0, cov_error: 0.0 }];
        let v: serde_json::Value = serde_json::from_str(&render(&cfg, &rows).unwrap()).unwrap();
        assert_eq!(v["config"]["d"], 10);
        assert_eq!(v["rows"][0]["algorithm"], "rhmc");
    }

    #[test]
    fn sibling_path() {
        assert_eq!(positions_path(Path::new("/a/out.csv")), PathBuf::from("/a/out.positions.csv"));
    }
}
