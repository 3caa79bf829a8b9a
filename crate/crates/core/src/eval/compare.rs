use std::fmt::Write as _;

use serde::Serialize;

use super::MetricsReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonCell {
    pub model: String,
    pub dataset: String,
    pub prec_at_k: Option<f64>,
    pub mrr_at_k: Option<f64>,
    /// 1 = best within the dataset column; equal values share a rank.
    pub prec_rank: Option<usize>,
    pub mrr_rank: Option<usize>,
}

/// Models x datasets matrix of overall metrics with per-column ranks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub schema_version: u32,
    pub k: usize,
    pub models: Vec<String>,
    pub datasets: Vec<String>,
    pub cells: Vec<ComparisonCell>,
}

fn competition_ranks(values: &[Option<f64>]) -> Vec<Option<usize>> {
    values
        .iter()
        .map(|v| {
            v.map(|v| 1 + values.iter().filter(|o| matches!(o, Some(o) if *o > v)).count())
        })
        .collect()
}

/// Builds the comparison from reports sharing one `k`. Models and datasets
/// keep their first-seen order; a later duplicate (model, dataset) wins.
pub fn compare_reports(reports: &[MetricsReport]) -> Result<Comparison, String> {
    let k = reports.first().map(|r| r.k).ok_or("no reports given")?;
    if let Some(r) = reports.iter().find(|r| r.k != k) {
        return Err(format!("mixed k: {} uses k={} but expected k={k}", r.model, r.k));
    }
    let mut models: Vec<String> = Vec::new();
    let mut datasets: Vec<String> = Vec::new();
    for r in reports {
        if !models.contains(&r.model) {
            models.push(r.model.clone());
        }
        if !datasets.contains(&r.dataset) {
            datasets.push(r.dataset.clone());
        }
    }
    let lookup = |m: &str, d: &str| reports.iter().rev().find(|r| r.model == m && r.dataset == d);
    let mut cells = Vec::new();
    for d in &datasets {
        let prec: Vec<Option<f64>> = models
            .iter()
            .map(|m| lookup(m, d).and_then(|r| r.overall().prec_at_k))
            .collect();
        let mrr: Vec<Option<f64>> = models
            .iter()
            .map(|m| lookup(m, d).and_then(|r| r.overall().mrr_at_k))
            .collect();
        let (prank, mrank) = (competition_ranks(&prec), competition_ranks(&mrr));
        for (i, m) in models.iter().enumerate() {
            cells.push(ComparisonCell {
                model: m.clone(),
                dataset: d.clone(),
                prec_at_k: prec[i],
                mrr_at_k: mrr[i],
                prec_rank: prank[i],
                mrr_rank: mrank[i],
            });
        }
    }
    Ok(Comparison {
        schema_version: 1,
        k,
        models,
        datasets,
        cells,
    })
}

impl Comparison {
    pub fn cell(&self, model: &str, dataset: &str) -> Option<&ComparisonCell> {
        self.cells
            .iter()
            .find(|c| c.model == model && c.dataset == dataset)
    }

    /// Table with `value^rank` entries, percentages to two decimals.
    pub fn to_table(&self) -> String {
        let fmt = |v: Option<f64>, r: Option<usize>| match (v, r) {
            (Some(v), Some(r)) => format!("{:.2}^{r}", 100.0 * v),
            _ => "-".to_string(),
        };
        let model_w = self.models.iter().map(String::len).max().unwrap_or(6).max(6);
        let mut out = String::new();
        let _ = write!(out, "{:<model_w$}", "method");
        for d in &self.datasets {
            let _ = write!(out, "  {:>12}  {:>12}", format!("{d} P@{}", self.k), format!("M@{}", self.k));
        }
        out.push('\n');
        for m in &self.models {
            let _ = write!(out, "{m:<model_w$}");
            for d in &self.datasets {
                let c = self.cell(m, d).expect("cell for every pair");
                let _ = write!(
                    out,
                    "  {:>12}  {:>12}",
                    fmt(c.prec_at_k, c.prec_rank),
                    fmt(c.mrr_at_k, c.mrr_rank)
                );
            }
            out.push('\n');
        }
        out
    }
}
