use std::path::PathBuf;

use super::output::{format_f64, write_output};
use super::{check_digests, offline_ev, prepare, status_of, timed_run, ExperimentSpec, RunRecord};
use crate::error::{Error, Result};
use crate::metrics::{eval_curve_with, EvCurve};
use crate::par::{map_ordered, Execution};

pub const COMPARE_FILE: &str = "compare.csv";
pub const COMPARE_HEADER: &str = "algorithm,samples_seen,ev";

#[derive(Debug, Clone, PartialEq)]
pub struct CompareResult {
    /// One curve per algorithm that completed, in spec order.
    pub curves: Vec<EvCurve>,
    /// `(n, ev)` of the offline top-k subspace when requested and computable.
    pub offline: Option<(usize, f64)>,
    pub runs: Vec<RunRecord>,
}

impl CompareResult {
    pub fn curve(&self, algorithm: &str) -> Option<&EvCurve> {
        self.curves.iter().find(|c| c.algorithm == algorithm)
    }

    /// Curves in order, then an `offline,n,ev` reference row.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{COMPARE_HEADER}\n");
        for curve in &self.curves {
            for (seen, ev) in &curve.points {
                s.push_str(&format!("{},{seen},{}\n", curve.algorithm, format_f64(*ev)));
            }
        }
        if let Some((n, ev)) = self.offline {
            s.push_str(&format!("offline,{n},{}\n", format_f64(ev)));
        }
        s
    }
}

/// Runs each listed algorithm over its own pass of the data and scores every
/// checkpoint. A failing algorithm is recorded in `runs` and has no curve.
pub fn run_compare(spec: &ExperimentSpec, exec: Execution) -> Result<CompareResult> {
    if spec.algorithms.is_empty() {
        return Err(Error::Config("compare needs at least one algorithm".into()));
    }
    let data = prepare(spec)?;
    let cfg = spec.run_config();
    let dataset = spec.dataset.label();

    let outcomes = map_ordered(exec, spec.workers, &spec.algorithms, |alg| {
        let label = match alg {
            crate::algorithms::Algorithm::Oja { schedule } => {
                format!("oja/{}/c={}", schedule.kind(), format_f64(schedule.c()))
            }
            a => a.label().to_string(),
        };
        let (mut record, outcome) = timed_run(&data, alg, &cfg, label);
        let curve =
            outcome.and_then(|r| eval_curve_with(&data, &r, &dataset, Execution::Sequential));
        if let Err(e) = &curve {
            record.status = status_of(e);
        }
        (record, curve.ok())
    });

    let mut runs = Vec::with_capacity(outcomes.len());
    let mut curves = Vec::new();
    for (record, curve) in outcomes {
        runs.push(record);
        curves.extend(curve);
    }
    check_digests(&runs)?;

    let offline = if spec.offline {
        offline_ev(&data, spec.k).ok().map(|ev| (data.rows(), ev))
    } else {
        None
    };
    Ok(CompareResult {
        curves,
        offline,
        runs,
    })
}

pub fn write_compare_csv(spec: &ExperimentSpec, result: &CompareResult) -> Result<PathBuf> {
    write_output(&spec.out_dir, COMPARE_FILE, &result.to_csv())
}
