//! End-to-end solvers: exact and additive-approximate minimum-cost edge covers.

use std::time::Instant;

use crate::eligibility::{build_decomposition, candidate_edges, CandidateEdges, EligibilityContext, EligibleDecomposition, CANDIDATE_FACTOR};
use crate::error::{Error, Result};
use crate::geom::Instance;
use crate::prism::{cover_cost, matching_to_cover, EdgeCover, PrismGraph, PrismMatching};
use crate::report::{CostReport, DEFAULT_DIGITS};
use crate::scaling::{epsilon_exponent, exact_exponent, run_scaling, verify_one_feasible, PhaseStats};
use crate::separator::{mcpm_candidate, DncOptions, DncStats};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Final scaling exponent; defaults to the exact or `eps`-derived one.
    pub theta_exp: Option<i64>,
    /// Significant digits in the reported decimal.
    pub digits: usize,
    /// Verify 1-feasibility after every phase.
    pub check_phases: bool,
    pub dnc: DncOptions,
    pub candidate_factor: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            theta_exp: None,
            digits: DEFAULT_DIGITS,
            check_phases: crate::debug::enabled(),
            dnc: DncOptions::default(),
            candidate_factor: CANDIDATE_FACTOR,
        }
    }
}

/// Wall time per stage, in seconds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StageTimes {
    pub scaling: f64,
    pub decomposition: f64,
    pub candidates: f64,
    pub divide_and_conquer: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SolveStats {
    pub n: usize,
    pub t_final: i64,
    pub phases: Vec<PhaseStats>,
    pub pieces: usize,
    pub skeleton: usize,
    /// Total candidate edges: upper, mirrors and links.
    pub candidate_edges: usize,
    pub dnc: DncStats,
    pub times: StageTimes,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub cover: EdgeCover,
    pub matching: PrismMatching,
    pub report: CostReport,
    pub stats: SolveStats,
    /// Set in exact mode only.
    pub decomposition: Option<EligibleDecomposition>,
    pub candidates: Option<CandidateEdges>,
}

fn scale(pg: &PrismGraph, t: i64, check: bool, stats: &mut SolveStats) -> Result<crate::scaling::ScalingRun> {
    let started = Instant::now();
    let run = run_scaling(pg, t, |view| {
        if check {
            verify_one_feasible(pg, view.costs, view.matching, view.duals)
                .map_err(|v| Error::invariant(format!("phase {}: {v}", view.t)))?;
        }
        Ok(())
    })?;
    stats.times.scaling = started.elapsed().as_secs_f64();
    stats.t_final = run.t;
    stats.phases = run.phases.clone();
    Ok(run)
}

/// Exact minimum-cost edge cover through the full pipeline.
pub fn solve_exact(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    let started = Instant::now();
    let pg = PrismGraph::build(inst);
    let mut stats = SolveStats { n: inst.n(), ..Default::default() };
    let t = opts.theta_exp.unwrap_or_else(|| exact_exponent(inst.n(), inst.delta()));
    let run = scale(&pg, t, opts.check_phases, &mut stats)?;

    let t0 = Instant::now();
    let ctx = EligibilityContext::new(&pg, &run.duals, run.t);
    let dec = build_decomposition(&ctx)?;
    stats.times.decomposition = t0.elapsed().as_secs_f64();
    stats.pieces = dec.pieces.len();
    stats.skeleton = dec.skeleton.len();

    let t0 = Instant::now();
    let cand = candidate_edges(&pg, &dec, opts.candidate_factor)?;
    stats.times.candidates = t0.elapsed().as_secs_f64();
    stats.candidate_edges = cand.total_len();

    let t0 = Instant::now();
    let (matching, dnc) = mcpm_candidate(&pg, &dec, &cand, opts.dnc)?;
    stats.times.divide_and_conquer = t0.elapsed().as_secs_f64();
    stats.dnc = dnc;

    let cover = matching_to_cover(&pg, &matching)?;
    let report = cover_cost(inst, &cover, opts.digits)?;
    stats.times.total = started.elapsed().as_secs_f64();
    Ok(Solution { cover, matching, report, stats, decomposition: Some(dec), candidates: Some(cand) })
}

/// Cover within additive `eps` of optimal, from the scaling stage alone.
pub fn solve_approx(inst: &Instance, eps: f64, opts: &SolveOptions) -> Result<Solution> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {eps}")));
    }
    let started = Instant::now();
    let pg = PrismGraph::build(inst);
    let mut stats = SolveStats { n: inst.n(), ..Default::default() };
    let t = opts.theta_exp.unwrap_or_else(|| epsilon_exponent(inst.n(), inst.delta(), eps));
    let run = scale(&pg, t, opts.check_phases, &mut stats)?;
    let cover = matching_to_cover(&pg, &run.matching)?;
    let report = cover_cost(inst, &cover, opts.digits)?;
    stats.times.total = started.elapsed().as_secs_f64();
    Ok(Solution { cover, matching: run.matching, report, stats, decomposition: None, candidates: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::GridPoint;

    fn gp(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn forced_star() {
        let inst = Instance::new(4, vec![gp(1, 1), gp(4, 1)], vec![gp(2, 1)]).unwrap();
        let sol = solve_exact(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.report.decimal, "3");
        assert_eq!(sol.cover.edges, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn singleton_pair() {
        let inst = Instance::new(4, vec![gp(1, 1)], vec![gp(2, 2)]).unwrap();
        let sol = solve_exact(&inst, &SolveOptions::default()).unwrap();
        assert!(sol.report.decimal.starts_with("1.41421356"));
    }

    #[test]
    fn approx_is_within_eps() {
        let inst = Instance::new(
            8,
            vec![gp(1, 1), gp(5, 2), gp(7, 7), gp(3, 6)],
            vec![gp(2, 3), gp(8, 1), gp(4, 4)],
        )
        .unwrap();
        let exact = solve_exact(&inst, &SolveOptions::default()).unwrap();
        let approx = solve_approx(&inst, 0.25, &SolveOptions::default()).unwrap();
        let gap = approx.report.to_f64() - exact.report.to_f64();
        assert!((-1e-9..=0.25).contains(&gap), "gap {gap}");
        assert!(solve_approx(&inst, 0.0, &SolveOptions::default()).is_err());
    }
}
