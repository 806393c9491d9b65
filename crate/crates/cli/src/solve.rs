use std::time::Instant;

use clap::ValueEnum;
use manymatch_core::prism::cover_cost;
use manymatch_core::separator::{part_size_ok, separator_size_ok};
use manymatch_core::oracle::{chamfer, edge_cover_opt};
use manymatch_core::{solve_approx, solve_exact, CostReport, EdgeCover, Instance, PrismGraph, RadicalSum, SolveOptions};

use crate::io::{Checks, ResultRecord, Summary, Timings};
use crate::CliError;

/// Largest instance the dense oracle accepts.
pub const ORACLE_LIMIT: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Approx,
    Oracle,
    Chamfer,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
            Mode::Oracle => "oracle",
            Mode::Chamfer => "chamfer",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: Option<u64>,
    /// Bits of precision in the reported decimal.
    pub precision: u32,
    pub theta_exp: Option<i64>,
    pub eps: f64,
    pub check_phases: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Exact,
            seed: None,
            precision: 212,
            theta_exp: None,
            eps: 1e-3,
            check_phases: manymatch_core::debug::enabled(),
        }
    }
}

/// Significant decimal digits carried by `bits` bits.
pub fn digits_for_bits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).ceil().max(1.0) as usize
}

fn record(mode: Mode, cfg: &RunConfig, cover: &EdgeCover, report: CostReport) -> ResultRecord {
    ResultRecord {
        mode: mode.name().into(),
        cost: report.decimal,
        squared_lengths: report.squared_lengths,
        edges: cover.edges.iter().map(|&(r, b)| [r, b]).collect(),
        epsilon: None,
        seed: cfg.seed,
        summary: Summary::default(),
        checks: Checks { cover_valid: true, cover_equals_matching: true, ..Default::default() },
        timings: Timings::default(),
    }
}

pub fn run(inst: &Instance, cfg: &RunConfig) -> Result<ResultRecord, CliError> {
    let digits = digits_for_bits(cfg.precision);
    let opts = SolveOptions { theta_exp: cfg.theta_exp, digits, check_phases: cfg.check_phases, ..Default::default() };
    let started = Instant::now();
    let n = inst.n();
    match cfg.mode {
        Mode::Oracle => {
            if n > ORACLE_LIMIT {
                return Err(CliError::Input(format!("oracle mode needs n <= {ORACLE_LIMIT}, got {n}")));
            }
            let (cover, _) = edge_cover_opt(inst, ORACLE_LIMIT)?;
            let report = cover_cost(inst, &cover, digits)?;
            let mut rec = record(Mode::Oracle, cfg, &cover, report);
            rec.summary.n = n;
            rec.timings.total = started.elapsed().as_secs_f64();
            Ok(rec)
        }
        Mode::Chamfer => {
            let (cover, _) = chamfer(inst);
            let report = cover_cost(inst, &cover, digits)?;
            let mut rec = record(Mode::Chamfer, cfg, &cover, report);
            rec.summary.n = n;
            rec.timings.total = started.elapsed().as_secs_f64();
            Ok(rec)
        }
        Mode::Exact | Mode::Approx => {
            let sol = if cfg.mode == Mode::Exact {
                solve_exact(inst, &opts)?
            } else {
                solve_approx(inst, cfg.eps, &opts)?
            };
            let pg = PrismGraph::build(inst);
            let matching_cost = RadicalSum::from_sqrts(sol.matching.cost_terms(&pg));
            let st = &sol.stats;
            let mut rec = record(cfg.mode, cfg, &sol.cover, sol.report.clone());
            rec.checks.cover_valid = sol.cover.validate(inst).is_ok();
            rec.checks.cover_equals_matching = matching_cost == sol.report.exact;
            rec.checks.phases_verified = cfg.check_phases.then_some(true);
            if cfg.mode == Mode::Exact {
                rec.checks.separator_bounds = Some(st.dnc.calls.iter().all(|c| {
                    part_size_ok(c.n_h, c.x) && part_size_ok(c.n_h, c.y) && separator_size_ok(c.n_h, c.s)
                }));
            } else {
                rec.epsilon = Some(cfg.eps);
            }
            rec.summary = Summary {
                n,
                theta_exp: Some(st.t_final),
                phases: st.phases.len(),
                pieces: st.pieces,
                skeleton: st.skeleton,
                candidate_edges: st.candidate_edges,
                separator_calls: st.dnc.calls.len(),
            };
            rec.timings = Timings {
                scaling: st.times.scaling,
                decomposition: st.times.decomposition,
                candidates: st.times.candidates,
                divide_and_conquer: st.times.divide_and_conquer,
                total: st.times.total,
            };
            Ok(rec)
        }
    }
}
