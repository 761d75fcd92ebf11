//! Plain-text outputs: per-sample and per-step CSV tables, JSON parameters
//! and summaries. Floats in CSV use 17 significant digits.

use std::fs;
use std::path::Path;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{Experiment, SummaryReport};
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::record::RunRecord;

/// Probability mass enclosed by the reported proposal ellipses.
pub const ELLIPSE_MASS: f64 = 0.90;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct ComponentParams {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

impl ComponentParams {
    fn new(mean: &[f64], cov: &CovarianceMatrix) -> Self {
        Self {
            mean: mean.to_vec(),
            covariance: cov.rows(),
        }
    }
}

#[derive(Serialize)]
struct ChainParams {
    chain: usize,
    active: bool,
    iterations: u64,
    cluster_count: u64,
    global: ComponentParams,
    local: ComponentParams,
}

#[derive(Serialize)]
struct Params {
    t_tot: u64,
    shared: ComponentParams,
    chains: Vec<ChainParams>,
}

fn write_samples(record: &RunRecord, dir: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("samples.csv"))?;
    let mut header = vec!["t".to_string(), "chain".into(), "k_n".into()];
    header.extend((1..=record.dim).map(|i| format!("x_{i}")));
    header.push("accepted".into());
    w.write_record(&header)?;
    for s in &record.samples {
        let mut row = vec![s.t.to_string(), s.chain.to_string(), s.k.to_string()];
        row.extend(s.x.iter().map(|&v| num(v)));
        row.push(u8::from(s.accepted).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_activity(record: &RunRecord, dir: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("activity.csv"))?;
    w.write_record(["t", "chain", "active"])?;
    for (t, active) in record.activity.iter().enumerate() {
        for chain in 0..record.n_chains {
            let on = active.binary_search(&chain).is_ok();
            w.write_record([t.to_string(), chain.to_string(), u8::from(on).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_params(record: &RunRecord, dir: &Path) -> Result<()> {
    let final_active = record.final_active();
    let params = Params {
        t_tot: record.t_tot,
        shared: ComponentParams::new(&record.global_mean, &record.global_covariance),
        chains: record
            .proposals
            .iter()
            .enumerate()
            .map(|(n, p)| ChainParams {
                chain: n,
                active: final_active.contains(&n),
                iterations: record.budgets[n],
                cluster_count: record.cluster_counts[n],
                global: ComponentParams::new(p.global.mean(), p.global.covariance()),
                local: ComponentParams::new(p.local.mean(), p.local.covariance()),
            })
            .collect(),
    };
    fs::write(dir.join("params.json"), serde_json::to_string_pretty(&params)? + "\n")?;
    Ok(())
}

/// Squared Mahalanobis radius enclosing `mass` of a `dim`-variate Gaussian.
pub(crate) fn chi_square_radius2(dim: usize, mass: f64) -> f64 {
    ChiSquared::new(dim as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(mass)
}

fn write_ellipses(record: &RunRecord, dir: &Path) -> Result<()> {
    let d = record.dim;
    let radius2 = chi_square_radius2(d, ELLIPSE_MASS);
    let mut w = csv::Writer::from_path(dir.join("ellipses.csv"))?;
    let mut header = vec!["component".to_string(), "chain".into()];
    header.extend((1..=d).map(|i| format!("mean_{i}")));
    for i in 1..=d {
        for j in i..=d {
            header.push(format!("cov_{i}{j}"));
        }
    }
    header.extend(["mass".into(), "radius2".into(), "radius".into()]);
    w.write_record(&header)?;

    let mut row = |component: &str, chain: String, mean: &[f64], cov: &CovarianceMatrix| -> Result<()> {
        let mut r = vec![component.to_string(), chain];
        r.extend(mean.iter().map(|&v| num(v)));
        for i in 0..d {
            for j in i..d {
                r.push(num(cov.get(i, j)));
            }
        }
        r.extend([num(ELLIPSE_MASS), num(radius2), num(radius2.sqrt())]);
        w.write_record(&r)?;
        Ok(())
    };
    for &n in record.final_active() {
        let local = &record.proposals[n].local;
        row("local", n.to_string(), local.mean(), local.covariance())?;
    }
    row("global", String::new(), &record.global_mean, &record.global_covariance)?;
    w.flush()?;
    Ok(())
}

/// samples.csv, activity.csv, params.json and ellipses.csv for one run.
pub fn write_run_files(record: &RunRecord, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    write_samples(record, dir)?;
    write_activity(record, dir)?;
    write_params(record, dir)?;
    write_ellipses(record, dir)
}

pub fn write_summary(report: &SummaryReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(report)? + "\n")?;
    Ok(())
}

/// Writes all five outputs for `record` and `report` into `dir`.
pub fn emit_outputs(record: &RunRecord, report: &SummaryReport, dir: &Path) -> Result<()> {
    write_run_files(record, dir)?;
    write_summary(report, dir)
}

/// `dir/summary.json` plus one subdirectory per algorithm holding the
/// first replication's run files.
pub fn write_experiment(exp: &Experiment, dir: &Path) -> Result<()> {
    write_summary(&exp.report, dir)?;
    if let Some(rec) = &exp.paim_record {
        write_run_files(rec, &dir.join("paim"))?;
    }
    if let Some(rec) = &exp.ipc_record {
        write_run_files(rec, &dir.join("ipc"))?;
    }
    Ok(())
}
