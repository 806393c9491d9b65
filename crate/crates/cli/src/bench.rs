//! Timing table over a grid of sizes.

use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use manymatch_core::gen::random_instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::io::{ResultRecord, Timings};
use crate::solve::{run, Mode, RunConfig, ORACLE_LIMIT};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub deltas: Vec<i64>,
    pub modes: Vec<Mode>,
    pub seeds: u64,
    pub base_seed: u64,
    /// Per-run wall-clock budget in seconds.
    pub budget: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub n: usize,
    pub delta: i64,
    pub mode: &'static str,
    pub runs: usize,
    /// `None` when no run finished within the budget.
    pub median: Option<Timings>,
    pub cost: Option<String>,
    pub note: String,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

fn median_timings(ts: &[Timings]) -> Timings {
    let pick = |f: fn(&Timings) -> f64| median(ts.iter().map(f).collect());
    Timings {
        scaling: pick(|t| t.scaling),
        decomposition: pick(|t| t.decomposition),
        candidates: pick(|t| t.candidates),
        divide_and_conquer: pick(|t| t.divide_and_conquer),
        total: pick(|t| t.total),
    }
}

/// Runs one solve on a worker thread; `None` past the budget.  A run that
/// overshoots keeps its thread until the process exits.
fn timed(n: usize, delta: i64, seed: u64, cfg: RunConfig, budget: f64) -> Result<Option<ResultRecord>, CliError> {
    let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n, delta)?;
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let _ = tx.send(run(&inst, &cfg));
    });
    match rx.recv_timeout(Duration::from_secs_f64(budget)) {
        Ok(res) => res.map(Some),
        Err(mpsc::RecvTimeoutError::Timeout) => Ok(None),
        Err(mpsc::RecvTimeoutError::Disconnected) => Err(CliError::Failure("solver thread panicked".into())),
    }
}

pub fn bench(cfg: &BenchConfig) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    for &delta in &cfg.deltas {
        for &mode in &cfg.modes {
            let mut timed_out = false;
            let mut sizes = cfg.sizes.clone();
            sizes.sort_unstable();
            for &n in &sizes {
                let mut row = Row { n, delta, mode: mode.name(), runs: 0, median: None, cost: None, note: String::new() };
                if (n as u128) > (delta as u128).pow(2) {
                    row.note = "n exceeds grid".into();
                } else if mode == Mode::Oracle && n > ORACLE_LIMIT {
                    row.note = format!("oracle limited to n <= {ORACLE_LIMIT}");
                } else if timed_out {
                    row.note = "skipped: smaller n exceeded budget".into();
                } else {
                    let mut times = Vec::new();
                    for k in 0..cfg.seeds {
                        let seed = cfg.base_seed + k;
                        let run_cfg = RunConfig { mode, seed: Some(seed), eps: cfg.eps, ..Default::default() };
                        match timed(n, delta, seed, run_cfg, cfg.budget)? {
                            Some(rec) => {
                                if row.cost.is_none() {
                                    row.cost = Some(rec.cost.chars().take(20).collect());
                                }
                                times.push(rec.timings);
                            }
                            None => {
                                timed_out = true;
                                row.note = format!("timeout after {:.0}s (seed {seed})", cfg.budget);
                                break;
                            }
                        }
                    }
                    row.runs = times.len();
                    if !times.is_empty() {
                        row.median = Some(median_timings(&times));
                    }
                }
                log::info!("bench n={n} delta={delta} mode={} runs={} {}", mode.name(), row.runs, row.note);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn markdown(rows: &[Row]) -> String {
    let mut s = String::from(
        "| n | Δ | mode | runs | total s | scaling s | decomposition s | candidates s | D&C s | cost | note |\n\
         |---|---|------|------|---------|-----------|-----------------|--------------|-------|------|------|\n",
    );
    for r in rows {
        let t = |f: fn(&Timings) -> f64| r.median.as_ref().map_or("-".into(), |m| format!("{:.3}", f(m)));
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
            r.n,
            r.delta,
            r.mode,
            r.runs,
            t(|m| m.total),
            t(|m| m.scaling),
            t(|m| m.decomposition),
            t(|m| m.candidates),
            t(|m| m.divide_and_conquer),
            r.cost.as_deref().unwrap_or("-"),
            r.note
        ));
    }
    s
}
