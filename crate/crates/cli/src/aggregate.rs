//! Aggregation of run records into per-(n, strategy) summary rows and
//! plot-ready columnar data files.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use apqaoa_core::strategies::StrategyKind;

use crate::records::RunRecord;

/// Summary statistics for one (n, strategy) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: usize,
    pub strategy: StrategyKind,
    pub runs: usize,
    pub cost_mean: f64,
    pub cost_median: f64,
    pub cost_q1: f64,
    pub cost_q3: f64,
    pub prob_mean: f64,
    pub prob_median: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    // linear interpolation between closest ranks
    assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Folds successful records into per-(n, strategy) rows, ordered by
/// (n, strategy name). Re-aggregating a concatenation of record files gives
/// the same rows as aggregating the union.
type Cell = (StrategyKind, Vec<f64>, Vec<f64>);

pub fn aggregate(records: &[RunRecord]) -> Result<Vec<AggregateRow>> {
    let mut cells: BTreeMap<(usize, &'static str), Cell> = BTreeMap::new();
    for record in records {
        let Some(report) = &record.report else { continue };
        let entry = cells
            .entry((report.instance.n, record.strategy.name()))
            .or_insert_with(|| (record.strategy, Vec::new(), Vec::new()));
        entry.1.push(report.cost_evals as f64);
        entry.2.push(report.target_prob);
    }
    if cells.is_empty() {
        bail!("no successful records to aggregate");
    }
    let mut rows = Vec::new();
    for ((n, _), (strategy, mut costs, mut probs)) in cells {
        costs.sort_by(f64::total_cmp);
        probs.sort_by(f64::total_cmp);
        rows.push(AggregateRow {
            n,
            strategy,
            runs: costs.len(),
            cost_mean: mean(&costs),
            cost_median: quantile(&costs, 0.5),
            cost_q1: quantile(&costs, 0.25),
            cost_q3: quantile(&costs, 0.75),
            prob_mean: mean(&probs),
            prob_median: quantile(&probs, 0.5),
        });
    }
    Ok(rows)
}

/// Writes the aggregate table plus the per-figure data files:
/// target-probability distributions, cost distributions, and final passage
/// parameter traces.
pub fn write_figure_data(records: &[RunRecord], dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let rows = aggregate(records)?;
    let mut w = csv::Writer::from_path(dir.join("aggregates.csv"))?;
    w.write_record([
        "n",
        "strategy",
        "runs",
        "cost_mean",
        "cost_median",
        "cost_q1",
        "cost_q3",
        "prob_mean",
        "prob_median",
    ])?;
    for row in &rows {
        w.write_record([
            row.n.to_string(),
            row.strategy.to_string(),
            row.runs.to_string(),
            format!("{:.3}", row.cost_mean),
            format!("{:.3}", row.cost_median),
            format!("{:.3}", row.cost_q1),
            format!("{:.3}", row.cost_q3),
            format!("{:.6}", row.prob_mean),
            format!("{:.6}", row.prob_median),
        ])?;
    }
    w.flush()?;
    written.push("aggregates.csv".into());

    let mut w = csv::Writer::from_path(dir.join("fig_probability.csv"))?;
    w.write_record(["n", "strategy", "instance_id", "target_prob"])?;
    for record in records {
        if let Some(report) = &record.report {
            w.write_record([
                report.instance.n.to_string(),
                record.strategy.to_string(),
                record.instance_id.clone(),
                format!("{:.9}", report.target_prob),
            ])?;
        }
    }
    w.flush()?;
    written.push("fig_probability.csv".into());

    let mut w = csv::Writer::from_path(dir.join("fig_cost.csv"))?;
    w.write_record(["n", "strategy", "instance_id", "cost_evals"])?;
    for record in records {
        if let Some(report) = &record.report {
            w.write_record([
                report.instance.n.to_string(),
                record.strategy.to_string(),
                record.instance_id.clone(),
                report.cost_evals.to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push("fig_cost.csv".into());

    let mut w = csv::Writer::from_path(dir.join("fig_parameters.csv"))?;
    w.write_record(["instance_id", "n", "layer", "theta", "tau"])?;
    for record in records {
        let Some(report) = &record.report else { continue };
        let (Some(theta), Some(tau)) = (&report.theta_star, &report.tau_star) else {
            continue;
        };
        for (layer, (t, u)) in theta.iter().zip(tau).enumerate() {
            w.write_record([
                record.instance_id.clone(),
                report.instance.n.to_string(),
                (layer + 1).to_string(),
                format!("{t:.9}"),
                format!("{u:.9}"),
            ])?;
        }
    }
    w.flush()?;
    written.push("fig_parameters.csv".into());

    Ok(written)
}
