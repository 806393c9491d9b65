//! Slow reference solvers used to cross-check the fast pipeline.

use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::geom::{Color, Instance};
use crate::penalty1d::{LinePoint, Penalty, PenaltySolution};
use crate::prism::{matching_to_cover, EdgeClass, EdgeCover, PrismGraph, PrismMatching, Side};
use crate::report::CostReport;
use crate::scalar::Scalar;

/// Default size limit for the dense cover oracle.
pub const DENSE_BOUND: usize = 60;

/// Square matrix with `None` for missing edges.
#[derive(Clone, Debug)]
pub struct DenseCostMatrix<S> {
    dim: usize,
    entries: Vec<Option<S>>,
}

impl<S: Scalar> DenseCostMatrix<S> {
    pub fn new(dim: usize) -> Self {
        DenseCostMatrix { dim, entries: vec![None; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, i: usize, j: usize, c: S) {
        self.entries[i * self.dim + j] = Some(c);
    }

    pub fn clear(&mut self, i: usize, j: usize) {
        self.entries[i * self.dim + j] = None;
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&S> {
        self.entries[i * self.dim + j].as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<S> {
    pub row_to_col: Vec<usize>,
    pub cost: S,
    /// `row_dual[i] + col_dual[j] <= c(i, j)`, tight on the assignment.
    pub row_dual: Vec<S>,
    pub col_dual: Vec<S>,
}

fn opt_lt<S: Ord>(a: &Option<S>, b: &Option<S>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Min-cost perfect matching by the O(n³) shortest augmenting path method.
pub fn mcpm_dense<S: Scalar>(m: &DenseCostMatrix<S>) -> Result<Assignment<S>> {
    let n = m.dim;
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![S::zero(); n + 1];
    let mut v = vec![S::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<S>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<S> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(c) = m.get(i0 - 1, j - 1) {
                    let cur = c.clone() - u[i0].clone() - v[j].clone();
                    if opt_lt(&Some(cur.clone()), &minv[j]) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if opt_lt(&minv[j], &delta) {
                    delta = minv[j].clone();
                    j1 = j;
                }
            }
            let delta = delta.ok_or(Error::Infeasible)?;
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(mv) = minv[j].as_mut() {
                    *mv = mv.clone() - delta.clone();
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    let mut cost = S::zero();
    for (i, &j) in row_to_col.iter().enumerate() {
        cost = cost + m.get(i, j).ok_or(Error::Infeasible)?.clone();
    }
    Ok(Assignment { row_to_col, cost, row_dual: u[1..].to_vec(), col_dual: v[1..].to_vec() })
}

/// Dense matrix of the prism graph, rows `R̃` and columns `B̃` in id order.
pub fn prism_matrix(pg: &PrismGraph) -> (DenseCostMatrix<Fixed>, Vec<usize>, Vec<usize>) {
    let rows = pg.r_side();
    let cols = pg.b_side();
    let mut m = DenseCostMatrix::new(rows.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &b) in cols.iter().enumerate() {
            if let Some(e) = pg.edge(r, b) {
                let c = if e.class == EdgeClass::Lower { Fixed::ZERO } else { Fixed::sqrt(e.dist2) };
                m.set(i, j, c);
            }
        }
    }
    (m, rows, cols)
}

/// Optimal prism matching by the dense solver.
pub fn mcpm_prism(pg: &PrismGraph) -> Result<PrismMatching> {
    mcpm_prism_filtered(pg, |_, _| true)
}

/// Optimal prism matching using only the edges `(r̃, b̃)` that `keep` accepts.
pub fn mcpm_prism_filtered<F: Fn(usize, usize) -> bool>(pg: &PrismGraph, keep: F) -> Result<PrismMatching> {
    let (mut m, rows, cols) = prism_matrix(pg);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &b) in cols.iter().enumerate() {
            if !keep(r, b) {
                m.clear(i, j);
            }
        }
    }
    let a = mcpm_dense(&m)?;
    let mut pm = PrismMatching::empty(pg.vertex_count());
    for (i, &j) in a.row_to_col.iter().enumerate() {
        pm.set_pair(rows[i], cols[j]);
    }
    debug_assert!(rows.iter().all(|&r| pg.side(r) == Side::R));
    Ok(pm)
}

/// Optimal edge cover for `n <= bound`.
pub fn edge_cover_opt(inst: &Instance, bound: usize) -> Result<(EdgeCover, CostReport)> {
    if inst.n() > bound {
        return Err(Error::TooLarge { n: inst.n(), bound });
    }
    let pg = PrismGraph::build(inst);
    let pm = mcpm_prism(&pg)?;
    let cover = matching_to_cover(&pg, &pm)?;
    let report = CostReport::from_terms(cover.squared_lengths(inst), crate::report::DEFAULT_DIGITS);
    Ok((cover, report))
}

/// `Σ μ(v)`: every point joined to its nearest opposite point.
pub fn chamfer(inst: &Instance) -> (EdgeCover, CostReport) {
    let pg = PrismGraph::build(inst);
    let mut edges: Vec<(usize, usize)> = inst
        .ids()
        .map(|v| {
            let w = pg.nearest(v);
            if inst.color(v) == Color::Red {
                (v, w - inst.n_red())
            } else {
                (w, v - inst.n_red())
            }
        })
        .collect();
    edges.sort_unstable();
    let cover = EdgeCover { edges };
    let terms = (0..inst.n()).map(|v| pg.mu2(v)).collect();
    (cover, CostReport::from_terms(terms, crate::report::DEFAULT_DIGITS))
}

/// Quadratic dynamic program over (point, open balance) with explicit back-pointers.
///
/// Balance `k > 0` means `k` reds are waiting for a blue to their right,
/// `k < 0` means `-k` blues are waiting for a red.
pub fn penalty1d_dp<S: Scalar>(points: &[LinePoint<S>]) -> Result<Option<PenaltySolution<S>>> {
    for w in points.windows(2) {
        if w[1].position < w[0].position {
            return Err(Error::InvalidInput("points are not sorted by position".into()));
        }
    }
    let n = points.len();
    let width = 2 * n + 1;
    let idx = |k: i64| (k + n as i64) as usize;
    // best[k]: min cost with balance k, waiting partners charged up to the current point.
    let mut best: Vec<Option<S>> = vec![None; width];
    best[idx(0)] = Some(S::zero());
    // choice[i][k]: true if point i was matched when reaching balance k.
    let mut choice = vec![vec![false; width]; n];
    let mut prev_pos: Option<S> = None;
    for (i, p) in points.iter().enumerate() {
        let d = match &prev_pos {
            Some(q) => p.position.clone() - q.clone(),
            None => S::zero(),
        };
        prev_pos = Some(p.position.clone());
        let mut moved: Vec<Option<S>> = vec![None; width];
        for k in -(n as i64)..=(n as i64) {
            if let Some(c) = &best[idx(k)] {
                moved[idx(k)] = Some(c.clone() + d.mul_int(k.abs()));
            }
        }
        let mut next: Vec<Option<S>> = vec![None; width];
        for k in -(n as i64)..=(n as i64) {
            let stay = match (&p.penalty, &moved[idx(k)]) {
                (Penalty::Finite(w), Some(c)) => Some(c.clone() + w.clone()),
                _ => None,
            };
            let from = match p.color {
                Color::Red => k - 1,
                Color::Blue => k + 1,
            };
            let take = if from.abs() <= n as i64 { moved[idx(from)].clone() } else { None };
            let (val, took) = match (stay, take) {
                (Some(a), Some(b)) => {
                    if b < a {
                        (Some(b), true)
                    } else {
                        (Some(a), false)
                    }
                }
                (Some(a), None) => (Some(a), false),
                (None, Some(b)) => (Some(b), true),
                (None, None) => (None, false),
            };
            next[idx(k)] = val;
            choice[i][idx(k)] = took;
        }
        best = next;
    }
    let cost = match &best[idx(0)] {
        Some(c) => c.clone(),
        None => return Ok(None),
    };
    // Walk back, then pair waiting partners first-in first-out (any order is optimal).
    let mut k = 0i64;
    let mut matched = vec![false; n];
    for i in (0..n).rev() {
        if choice[i][idx(k)] {
            matched[i] = true;
            k = match points[i].color {
                Color::Red => k - 1,
                Color::Blue => k + 1,
            };
        }
    }
    let mut waiting_red = std::collections::VecDeque::new();
    let mut waiting_blue = std::collections::VecDeque::new();
    let mut pairs = Vec::new();
    let mut free = Vec::new();
    for i in 0..n {
        if !matched[i] {
            free.push(i);
            continue;
        }
        match points[i].color {
            Color::Red => match waiting_blue.pop_front() {
                Some(b) => pairs.push((i, b)),
                None => waiting_red.push_back(i),
            },
            Color::Blue => match waiting_red.pop_front() {
                Some(r) => pairs.push((r, i)),
                None => waiting_blue.push_back(i),
            },
        }
    }
    pairs.sort_unstable();
    Ok(Some(PenaltySolution { cost, pairs, free }))
}
