//! Cost scaling for the prism matching.
//!
//! Phase `t` works with integer edge costs `c̃(e) = ⌈‖e‖·2^t⌉` and keeps
//! integer duals `y` that are *1-feasible*:
//!
//! * `y(r) + y(b) <= c̃(r, b) + 1` on every edge,
//! * `y(r) + y(b) = c̃(r, b)` on every matched edge.
//!
//! Each phase doubles the duals, subtracts one, and rebuilds a perfect
//! matching from scratch by alternating a Hungarian search (which lowers the
//! slack until an admissible augmenting path exists) with a depth-first
//! collection of vertex-disjoint admissible augmenting paths.

mod search;

use std::rc::Rc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::debug;
use crate::error::{Error, Result};
use crate::exact::{ceil_sqrt_scaled, ScaledRoots};
use crate::prism::{EdgeClass, PrismGraph, PrismMatching, Side};

pub use search::{dfs_collect_paths, hungarian_search, SearchOutcome};

/// `⌈√s · 2^t⌉`.
pub fn scaled_cost(s: u64, t: i64) -> BigInt {
    BigInt::from(ceil_sqrt_scaled(s, t))
}

/// `⌈log2 x⌉` for `x >= 1`.
fn ceil_log2(x: &BigUint) -> i64 {
    if x <= &BigUint::one() {
        0
    } else {
        (x - 1u32).bits() as i64
    }
}

/// Exponent of the first, coarsest scale: `2^-t0 >= 2Δ`.
pub fn initial_exponent(delta: i64) -> i64 {
    -ceil_log2(&BigUint::from(2 * delta as u64))
}

/// Smallest exponent with `2^-t <= 1 / (n·Δ^33)`.
pub fn exact_exponent(n: usize, delta: i64) -> i64 {
    ceil_log2(&(BigUint::from(n) * BigUint::from(delta as u64).pow(33)))
}

/// Smallest exponent with `3n·2^-t <= eps`, never below the first phase.
pub fn epsilon_exponent(n: usize, delta: i64, eps: f64) -> i64 {
    assert!(eps > 0.0, "epsilon must be positive");
    let mut t = initial_exponent(delta) + 1;
    while 3.0 * n as f64 * 2f64.powi(-t as i32) > eps {
        t += 1;
    }
    t
}

/// Scaled edge costs for one phase, memoized by squared length.
#[derive(Debug)]
pub struct ScaledCosts {
    t: i64,
    roots: Rc<ScaledRoots>,
}

impl ScaledCosts {
    pub fn new(t: i64) -> Self {
        ScaledCosts::with_roots(t, Rc::new(ScaledRoots::new()))
    }

    /// Shares the root memo with earlier phases.
    pub fn with_roots(t: i64, roots: Rc<ScaledRoots>) -> Self {
        ScaledCosts { t, roots }
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn roots(&self) -> &Rc<ScaledRoots> {
        &self.roots
    }

    pub fn of_dist2(&self, s: u64) -> BigInt {
        if s == 0 {
            return BigInt::zero();
        }
        self.roots.ceil(s, self.t)
    }

    pub fn edge(&self, pg: &PrismGraph, u: usize, w: usize) -> Option<BigInt> {
        pg.edge(u, w).map(|e| match e.class {
            EdgeClass::Lower => BigInt::zero(),
            _ => self.of_dist2(e.dist2),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `y(r) + y(b) > c̃ + 1`.
    Slack,
    /// A matched edge that is not tight.
    NotTight,
    /// Matched pair is not an edge.
    NotAnEdge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub r: usize,
    pub b: usize,
    pub kind: ViolationKind,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} violation on ({}, {})", self.kind, self.r, self.b)
    }
}

/// Checks both 1-feasibility conditions on every edge.
pub fn verify_one_feasible(
    pg: &PrismGraph,
    costs: &ScaledCosts,
    m: &PrismMatching,
    y: &[BigInt],
) -> std::result::Result<(), Violation> {
    let bs = pg.b_side();
    for r in pg.r_side() {
        if let Some(b) = m.mate(r) {
            match costs.edge(pg, r, b) {
                None => return Err(Violation { r, b, kind: ViolationKind::NotAnEdge }),
                Some(c) if &y[r] + &y[b] != c => {
                    return Err(Violation { r, b, kind: ViolationKind::NotTight })
                }
                _ => {}
            }
        }
        for &b in &bs {
            if let Some(c) = costs.edge(pg, r, b) {
                if &y[r] + &y[b] > c + 1 {
                    return Err(Violation { r, b, kind: ViolationKind::Slack });
                }
            }
        }
    }
    Ok(())
}

/// Flips vertex-disjoint augmenting paths `[b0, r1, b1, ..., rk]`.
pub fn augment(pg: &PrismGraph, m: &mut PrismMatching, paths: &[Vec<usize>]) -> Result<()> {
    let mut used = vec![false; pg.vertex_count()];
    for path in paths {
        if path.len() < 2 || path.len() % 2 != 0 {
            return Err(Error::InvalidPath(format!("odd or short path {path:?}")));
        }
        for (i, &v) in path.iter().enumerate() {
            if v >= pg.vertex_count() {
                return Err(Error::InvalidPath(format!("vertex {v} out of range")));
            }
            if std::mem::replace(&mut used[v], true) {
                return Err(Error::InvalidPath(format!("vertex {v} used twice")));
            }
            let want = if i % 2 == 0 { Side::B } else { Side::R };
            if pg.side(v) != want {
                return Err(Error::InvalidPath(format!("vertex {v} on the wrong side")));
            }
        }
        if !m.is_free(path[0]) || !m.is_free(path[path.len() - 1]) {
            return Err(Error::InvalidPath("endpoints must be free".into()));
        }
        for (i, w) in path.windows(2).enumerate() {
            if pg.edge(w[0], w[1]).is_none() {
                return Err(Error::InvalidPath(format!("({}, {}) is not an edge", w[0], w[1])));
            }
            if i % 2 == 1 && m.mate(w[0]) != Some(w[1]) {
                return Err(Error::InvalidPath(format!("({}, {}) should be matched", w[0], w[1])));
            }
        }
    }
    for path in paths {
        for pair in path.chunks(2) {
            m.set_pair(pair[0], pair[1]);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub t: i64,
    pub searches: usize,
    pub paths: usize,
    /// Searches where the depth-first pass found nothing and the search's own path was used.
    pub fallbacks: usize,
}

/// Builds a 1-feasible perfect matching from scratch, updating `y` in place.
pub fn one_optimal_match(
    pg: &PrismGraph,
    costs: &ScaledCosts,
    y: &mut [BigInt],
) -> Result<(PrismMatching, PhaseStats)> {
    let mut m = PrismMatching::empty(pg.vertex_count());
    let mut stats = PhaseStats { t: costs.t(), ..Default::default() };
    while !m.is_perfect() {
        let outcome = hungarian_search(pg, costs, &m, y)?;
        stats.searches += 1;
        let mut paths = dfs_collect_paths(pg, costs, &m, y)?;
        if paths.is_empty() {
            log::warn!("phase t={}: no admissible path found, using the search path", costs.t());
            stats.fallbacks += 1;
            paths.push(outcome.path);
        }
        augment(pg, &mut m, &paths)?;
        stats.paths += paths.len();
        for path in &paths {
            for &b in path.iter().step_by(2) {
                y[b] -= 1;
            }
        }
    }
    Ok((m, stats))
}

/// Everything the caller may want to inspect after a phase.
pub struct PhaseView<'a> {
    pub t: i64,
    pub matching: &'a PrismMatching,
    pub duals: &'a [BigInt],
    pub costs: &'a ScaledCosts,
}

#[derive(Clone, Debug)]
pub struct ScalingRun {
    pub matching: PrismMatching,
    pub duals: Vec<BigInt>,
    pub t: i64,
    pub phases: Vec<PhaseStats>,
}

/// Runs phases `t0 + 1 ..= t_final` (at least one).
pub fn run_scaling<F>(pg: &PrismGraph, t_final: i64, mut observe: F) -> Result<ScalingRun>
where
    F: FnMut(&PhaseView) -> Result<()>,
{
    let first = initial_exponent(pg.instance().delta()) + 1;
    let last = t_final.max(first);
    let check = debug::enabled();
    let mut y = vec![BigInt::zero(); pg.vertex_count()];
    let mut phases = Vec::new();
    let mut matching = PrismMatching::empty(pg.vertex_count());
    let roots = Rc::new(ScaledRoots::new());
    for t in first..=last {
        for v in y.iter_mut() {
            *v = (&*v << 1u32) - 1;
        }
        let costs = ScaledCosts::with_roots(t, roots.clone());
        if check {
            verify_one_feasible(pg, &costs, &PrismMatching::empty(pg.vertex_count()), &y)
                .map_err(|v| Error::invariant(format!("phase {t} start: {v}")))?;
        }
        let (m, stats) = one_optimal_match(pg, &costs, &mut y)?;
        if check {
            verify_one_feasible(pg, &costs, &m, &y)
                .map_err(|v| Error::invariant(format!("phase {t} end: {v}")))?;
        }
        log::debug!("phase t={t}: {} searches, {} paths", stats.searches, stats.paths);
        observe(&PhaseView { t, matching: &m, duals: &y, costs: &costs })?;
        phases.push(stats);
        matching = m;
    }
    Ok(ScalingRun { matching, duals: y, t: last, phases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{GridPoint, Instance};

    #[test]
    fn scaled_cost_examples() {
        assert_eq!(scaled_cost(2, 1), BigInt::from(3));
        assert_eq!(scaled_cost(4, 0), BigInt::from(2));
        assert_eq!(scaled_cost(0, 5), BigInt::from(0));
    }

    #[test]
    fn exponents() {
        assert_eq!(initial_exponent(4), -3);
        assert_eq!(initial_exponent(5), -4);
        // 8 · 2^33 = 2^36
        assert_eq!(exact_exponent(8, 2), 36);
        assert_eq!(exact_exponent(9, 2), 37);
        let t = epsilon_exponent(10, 4, 0.5);
        assert!(30.0 * 2f64.powi(-t as i32) <= 0.5);
        assert!(30.0 * 2f64.powi(-(t - 1) as i32) > 0.5);
    }

    #[test]
    fn augment_rejects_bad_paths() {
        let inst = Instance::new(4, vec![GridPoint::new(1, 1)], vec![GridPoint::new(2, 1)]).unwrap();
        let pg = PrismGraph::build(&inst);
        let mut m = PrismMatching::empty(4);
        // upper blue 1 to upper red 0
        augment(&pg, &mut m, &[vec![1, 0]]).unwrap();
        assert_eq!(m.mate(0), Some(1));
        assert!(augment(&pg, &mut m, &[vec![1, 0]]).is_err());
        assert!(augment(&pg, &mut m, &[vec![0, 1]]).is_err());
        assert!(augment(&pg, &mut m, &[vec![2, 3, 1]]).is_err());
        // lower red 2 (B̃) to lower blue 3 (R̃)
        augment(&pg, &mut m, &[vec![2, 3]]).unwrap();
        assert!(m.is_perfect());
    }
}
