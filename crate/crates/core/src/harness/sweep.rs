use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::output::{format_f64, write_output};
use super::{check_digests, offline_ev, prepare, status_of, timed_run, ExperimentSpec, RunRecord};
use crate::algorithms::{Algorithm, Schedule, ScheduleKind};
use crate::error::{Error, Result};
use crate::metrics::explained_variance_with;
use crate::par::{map_ordered, Execution};

pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_HEADER: &str = "algorithm,schedule,c,final_ev,status";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: String,
    /// Schedule kind for Oja rows, `adaptive` for AdaOja, `none` for offline.
    pub schedule: String,
    pub c: Option<f64>,
    pub final_ev: Option<f64>,
    pub status: String,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        let opt = |x: Option<f64>| x.map(format_f64).unwrap_or_default();
        format!(
            "{},{},{},{},{}",
            self.algorithm,
            self.schedule,
            opt(self.c),
            opt(self.final_ev),
            self.status
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub dataset: String,
    /// Oja rows in (schedule, c) grid order, then AdaOja, then offline if requested.
    pub rows: Vec<SweepRow>,
    pub runs: Vec<RunRecord>,
}

impl SweepResult {
    pub fn adaoja(&self) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.algorithm == "adaoja")
    }

    pub fn offline(&self) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.algorithm == "offline")
    }

    /// Best final EV among the Oja rows that finished.
    pub fn best_oja(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == "oja")
            .filter_map(|r| r.final_ev)
            .reduce(f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{SWEEP_HEADER}\n");
        for row in &self.rows {
            s.push_str(&row.csv_line());
            s.push('\n');
        }
        s
    }
}

enum Job {
    Oja(ScheduleKind, f64),
    AdaOja,
}

/// Oja over every (schedule, c) grid point, AdaOja once, and optionally the
/// offline reference. Failed runs become rows with an error status.
pub fn run_sweep(spec: &ExperimentSpec, exec: Execution) -> Result<SweepResult> {
    let grid = spec
        .grid
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs a grid".into()))?;
    let data = prepare(spec)?;
    let cfg = spec.run_config();

    let mut jobs: Vec<Job> = grid
        .schedules
        .iter()
        .flat_map(|&kind| grid.values().into_iter().map(move |c| Job::Oja(kind, c)))
        .collect();
    jobs.push(Job::AdaOja);

    let outcomes = map_ordered(exec, spec.workers, &jobs, |job| {
        let (algorithm, schedule, c) = match *job {
            Job::Oja(kind, c) => (
                Schedule::new(kind, c).map(|s| Algorithm::Oja { schedule: s }),
                kind.as_str(),
                Some(c),
            ),
            Job::AdaOja => (Ok(Algorithm::Adaoja), "adaptive", None),
        };
        let label = match c {
            Some(c) => format!("oja/{schedule}/c={}", format_f64(c)),
            None => "adaoja".to_string(),
        };
        let (record, outcome) = match algorithm {
            Ok(alg) => timed_run(&data, &alg, &cfg, label),
            Err(e) => (
                RunRecord {
                    label,
                    status: status_of(&e),
                    wall_seconds: 0.0,
                    stream_digest: None,
                    blocks: 0,
                    samples: 0,
                },
                Err(e),
            ),
        };
        let scored = outcome
            .and_then(|r| explained_variance_with(&data, &r.final_basis, Execution::Sequential));
        let row = SweepRow {
            algorithm: if c.is_some() { "oja" } else { "adaoja" }.to_string(),
            schedule: schedule.to_string(),
            c,
            final_ev: scored.as_ref().ok().copied(),
            status: match &scored {
                Ok(_) => "ok".to_string(),
                Err(e) => status_of(e),
            },
        };
        (row, record)
    });

    let (mut rows, runs): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    check_digests(&runs)?;

    if spec.offline {
        let ev = offline_ev(&data, spec.k);
        rows.push(SweepRow {
            algorithm: "offline".into(),
            schedule: "none".into(),
            c: None,
            final_ev: ev.as_ref().ok().copied(),
            status: match &ev {
                Ok(_) => "ok".into(),
                Err(e) => status_of(e),
            },
        });
    }

    Ok(SweepResult {
        dataset: spec.dataset.label(),
        rows,
        runs,
    })
}

pub fn write_sweep_csv(spec: &ExperimentSpec, result: &SweepResult) -> Result<PathBuf> {
    write_output(&spec.out_dir, SWEEP_FILE, &result.to_csv())
}
