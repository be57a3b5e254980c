use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sweep::SweepRow;
use crate::distortion::{ModeKind, OrderKind};

/// Mean and sample standard deviation over the trials of one `(order, mode, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub order: OrderKind,
    pub mode: ModeKind,
    pub p: f64,
    /// Successful trials.
    pub trials: usize,
    pub failed: usize,
    pub error_mean: Option<f64>,
    pub error_std: Option<f64>,
    pub complexity_mean: Option<f64>,
    pub complexity_std: Option<f64>,
}

/// Mean and sample standard deviation (`n - 1`); the deviation of a single
/// value is 0. Values are sorted before summing so the result does not depend
/// on input order.
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    if sorted.len() == 1 {
        return Some((mean, 0.0));
    }
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(f64::total_cmp);
    Some((mean, (dev.iter().sum::<f64>() / (n - 1.0)).sqrt()))
}

pub fn aggregate(rows: &[SweepRow]) -> Vec<SummaryRow> {
    type Key = (OrderKind, ModeKind, u64);
    let mut groups: BTreeMap<Key, Vec<&SweepRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.order, row.mode, row.p.to_bits()))
            .or_default()
            .push(row);
    }
    let mut out: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((order, mode, p_bits), members)| {
            let ok: Vec<&&SweepRow> = members.iter().filter(|r| r.is_ok()).collect();
            let errors: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.clustering_error)
                .map(|e| e as f64)
                .collect();
            let complexity: Vec<f64> = ok.iter().filter_map(|r| r.mean_complexity).collect();
            let e = mean_std(&errors);
            let c = mean_std(&complexity);
            SummaryRow {
                order,
                mode,
                p: f64::from_bits(p_bits),
                trials: ok.len(),
                failed: members.len() - ok.len(),
                error_mean: e.map(|x| x.0),
                error_std: e.map(|x| x.1),
                complexity_mean: c.map(|x| x.0),
                complexity_std: c.map(|x| x.1),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.order, a.mode)
            .cmp(&(b.order, b.mode))
            .then(a.p.total_cmp(&b.p))
    });
    out
}
