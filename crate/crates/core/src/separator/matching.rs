//! Incremental minimum-cost maximum-cardinality matching.
//!
//! Potentials `π` are kept for the orientation where unmatched edges run
//! `R̃ → B̃` with cost `c` and matched edges run `B̃ → R̃` with cost `-c`;
//! every arc has reduced cost `c + π(tail) - π(head) >= 0`.  A search from a
//! `B̃` vertex runs on the reversed graph with potentials `-π`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::oracle::{mcpm_dense, DenseCostMatrix};
use crate::prism::{PrismGraph, Side};
use crate::eligibility::CandidateEdges;

#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    side: Vec<Side>,
    adj: Vec<Vec<(usize, Fixed)>>,
}

impl BipartiteGraph {
    pub fn new(side: Vec<Side>) -> Self {
        let n = side.len();
        BipartiteGraph { side, adj: vec![Vec::new(); n] }
    }

    pub fn add_edge(&mut self, u: usize, w: usize, c: Fixed) -> Result<()> {
        if self.side[u] == self.side[w] {
            return Err(Error::InvalidInput(format!("({u}, {w}) joins one side")));
        }
        self.adj[u].push((w, c));
        self.adj[w].push((u, c));
        Ok(())
    }

    /// The candidate subgraph of the prism.
    pub fn from_candidates(pg: &PrismGraph, cand: &CandidateEdges) -> Self {
        let n = pg.n();
        let inst = pg.instance();
        let mut g = BipartiteGraph::new((0..pg.vertex_count()).map(|v| pg.side(v)).collect());
        for &(r, b) in &cand.upper {
            let c = Fixed::sqrt(crate::geom::dist2(inst.point(r), inst.point(b)));
            g.add_edge(r, b, c).expect("upper edge joins R̃ and B̃");
            g.add_edge(n + b, n + r, Fixed::ZERO).expect("lower edge joins R̃ and B̃");
        }
        for v in 0..n {
            g.add_edge(v, n + v, Fixed::sqrt(pg.mu2(v))).expect("link joins R̃ and B̃");
        }
        g
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, Fixed)] {
        &self.adj[v]
    }

    pub fn cost(&self, u: usize, w: usize) -> Option<Fixed> {
        self.adj[u].iter().filter(|&&(x, _)| x == w).map(|&(_, c)| c).min()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The new vertex ended on an augmenting path.
    Augmented,
    /// Cardinality unchanged; a cheaper matching frees another vertex.
    Exchanged,
    Unchanged,
}

/// Matching, potentials and the set of vertices present so far.
#[derive(Clone, Debug)]
pub struct MatchingState<'g> {
    g: &'g BipartiteGraph,
    mate: Vec<Option<usize>>,
    pi: Vec<Fixed>,
    active: Vec<bool>,
}

impl<'g> MatchingState<'g> {
    pub fn new(g: &'g BipartiteGraph) -> Self {
        let n = g.len();
        MatchingState { g, mate: vec![None; n], pi: vec![Fixed::ZERO; n], active: vec![false; n] }
    }

    pub fn graph(&self) -> &'g BipartiteGraph {
        self.g
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate[v]
    }

    pub fn mates(&self) -> &[Option<usize>] {
        &self.mate
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.active[v]
    }

    pub fn activate(&mut self, v: usize) {
        self.active[v] = true;
    }

    /// Activates and matches `u` and `w`, which must be adjacent.
    pub fn set_pair(&mut self, u: usize, w: usize) -> Result<()> {
        if self.g.cost(u, w).is_none() {
            return Err(Error::invariant(format!("({u}, {w}) is not an edge")));
        }
        self.active[u] = true;
        self.active[w] = true;
        self.mate[u] = Some(w);
        self.mate[w] = Some(u);
        Ok(())
    }

    /// Matched cost over `vertices`, counting each pair once.
    pub fn cost(&self, vertices: &[usize]) -> Fixed {
        vertices
            .iter()
            .filter(|&&v| self.g.side(v) == Side::R)
            .filter_map(|&v| self.mate[v].map(|w| self.g.cost(v, w).expect("matched pairs are edges")))
            .sum()
    }

    pub fn matched_count(&self, vertices: &[usize]) -> usize {
        vertices.iter().filter(|&&v| self.g.side(v) == Side::R && self.mate[v].is_some()).count()
    }

    /// Orientation arcs out of `u` among active vertices: `(head, cost)`.
    fn arcs(&self, u: usize) -> Vec<(usize, Fixed)> {
        match self.g.side(u) {
            Side::R => self
                .g
                .neighbors(u)
                .iter()
                .filter(|&&(w, _)| self.active[w] && self.mate[u] != Some(w))
                .copied()
                .collect(),
            Side::B => match self.mate[u] {
                Some(r) => vec![(r, -self.g.cost(u, r).expect("matched pairs are edges"))],
                None => Vec::new(),
            },
        }
    }

    /// Recomputes potentials on `vertices` by Bellman–Ford from a virtual source.
    ///
    /// Negative alternating cycles (possible only from rounding ties between
    /// sub-solutions) are cancelled; returns how many were.
    pub fn rebuild_duals(&mut self, vertices: &[usize]) -> Result<usize> {
        let vs: Vec<usize> = vertices.iter().copied().filter(|&v| self.active[v]).collect();
        let mut cancelled = 0;
        loop {
            match self.bellman_ford(&vs) {
                Ok(()) => return Ok(cancelled),
                Err(cycle) => {
                    self.cancel_cycle(&cycle)?;
                    cancelled += 1;
                    if cancelled > vs.len() * vs.len() + 1 {
                        return Err(Error::invariant("negative cycle cancelling does not terminate"));
                    }
                }
            }
        }
    }

    /// Sets `π` to shortest distances, or returns a negative cycle.
    fn bellman_ford(&mut self, vs: &[usize]) -> std::result::Result<(), Vec<usize>> {
        let n = self.g.len();
        let mut dist: Vec<Option<Fixed>> = vec![None; n];
        let mut pred = vec![usize::MAX; n];
        let mut count = vec![0usize; n];
        let mut in_queue = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for &v in vs {
            dist[v] = Some(Fixed::ZERO);
            in_queue[v] = true;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            in_queue[u] = false;
            let du = dist[u].expect("queued vertices have a distance");
            for (w, c) in self.arcs(u) {
                let nd = du + c;
                if dist[w].is_none_or(|dw| nd < dw) {
                    dist[w] = Some(nd);
                    pred[w] = u;
                    count[w] += 1;
                    if count[w] > vs.len() {
                        return Err(Self::trace_cycle(&pred, w, vs.len()));
                    }
                    if !in_queue[w] {
                        in_queue[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        for &v in vs {
            self.pi[v] = dist[v].expect("every vertex is reached from the virtual source");
        }
        Ok(())
    }

    fn trace_cycle(pred: &[usize], start: usize, steps: usize) -> Vec<usize> {
        let mut v = start;
        for _ in 0..steps {
            v = pred[v];
        }
        let mut cycle = vec![v];
        let mut u = pred[v];
        while u != v {
            cycle.push(u);
            u = pred[u];
        }
        cycle.reverse();
        cycle
    }

    /// Flips an alternating cycle given in arc order.
    fn cancel_cycle(&mut self, cycle: &[usize]) -> Result<()> {
        let k = cycle.len();
        let mut new_pairs = Vec::new();
        for i in 0..k {
            let (u, w) = (cycle[i], cycle[(i + 1) % k]);
            if self.g.side(u) == Side::R {
                new_pairs.push((u, w));
            }
        }
        for &v in cycle {
            self.mate[v] = None;
        }
        for (u, w) in new_pairs {
            self.set_pair(u, w)?;
        }
        log::debug!("cancelled a negative alternating cycle of length {k}");
        Ok(())
    }

    /// Every arc among `vertices` has non-negative reduced cost.
    pub fn check_duals(&self, vertices: &[usize]) -> Result<()> {
        for &u in vertices {
            if !self.active[u] {
                continue;
            }
            for (w, c) in self.arcs(u) {
                if c + self.pi[u] - self.pi[w] < Fixed::ZERO {
                    return Err(Error::invariant(format!("arc ({u}, {w}) has negative reduced cost")));
                }
            }
        }
        Ok(())
    }

    /// Adds `v` and restores a minimum-cost maximum-cardinality matching.
    pub fn insert_vertex(&mut self, v: usize) -> Result<InsertOutcome> {
        if self.active[v] {
            return Err(Error::invariant(format!("vertex {v} inserted twice")));
        }
        self.active[v] = true;
        self.mate[v] = None;
        // `sign` maps stored potentials to the search orientation.
        let (source_side, sign) = match self.g.side(v) {
            Side::R => (Side::R, 1i64),
            Side::B => (Side::B, -1i64),
        };
        let p = |pi: &Fixed| if sign > 0 { *pi } else { -*pi };
        let out: Vec<(usize, Fixed)> =
            self.g.neighbors(v).iter().filter(|&&(w, _)| self.active[w]).copied().collect();
        let Some(start) = out.iter().map(|&(w, c)| p(&self.pi[w]) - c).max() else {
            return Ok(InsertOutcome::Unchanged);
        };
        self.pi[v] = if sign > 0 { start } else { -start };

        let n = self.g.len();
        let mut dist: Vec<Option<Fixed>> = vec![None; n];
        let mut pred = vec![usize::MAX; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[v] = Some(Fixed::ZERO);
        heap.push(Reverse((Fixed::ZERO, v)));
        let mut reached = Vec::new();
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            reached.push(u);
            let arcs: Vec<(usize, Fixed)> = if self.g.side(u) == source_side {
                self.g
                    .neighbors(u)
                    .iter()
                    .filter(|&&(w, _)| self.active[w] && self.mate[u] != Some(w))
                    .copied()
                    .collect()
            } else {
                match self.mate[u] {
                    Some(x) => vec![(x, -self.g.cost(u, x).expect("matched pairs are edges"))],
                    None => Vec::new(),
                }
            };
            for (w, c) in arcs {
                let rc = c + p(&self.pi[u]) - p(&self.pi[w]);
                debug_assert!(rc >= Fixed::ZERO, "negative reduced cost on ({u}, {w})");
                let nd = d + rc;
                if dist[w].is_none_or(|dw| nd < dw) {
                    dist[w] = Some(nd);
                    pred[w] = u;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        let pv = p(&self.pi[v]);
        let real = |x: usize, dist: &[Option<Fixed>]| dist[x].unwrap() - pv + p(&self.pi[x]);
        let mut best: Option<(Fixed, usize)> = None;
        for &x in &reached {
            if self.g.side(x) != source_side && self.mate[x].is_none() {
                let cand = (real(x, &dist), x);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        let mut outcome = InsertOutcome::Augmented;
        if best.is_none() {
            outcome = InsertOutcome::Exchanged;
            for &x in &reached {
                if x != v && self.g.side(x) == source_side {
                    let cand = (real(x, &dist), x);
                    if cand.0 < Fixed::ZERO && best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        let Some((_, target)) = best else { return Ok(InsertOutcome::Unchanged) };
        let big_d = dist[target].unwrap();
        for &x in &reached {
            let dx = dist[x].unwrap();
            if dx < big_d {
                // π(x) += sign·(d - D); the uniform +D shift is dropped.
                let delta = dx - big_d;
                if sign > 0 {
                    self.pi[x] += delta;
                } else {
                    self.pi[x] -= delta;
                }
            }
        }
        let mut path = vec![target];
        while *path.last().unwrap() != v {
            path.push(pred[*path.last().unwrap()]);
        }
        path.reverse();
        if outcome == InsertOutcome::Exchanged {
            let last = *path.last().unwrap();
            self.mate[last] = None;
            path.pop();
        }
        for pair in path.chunks(2) {
            self.mate[pair[0]] = Some(pair[1]);
            self.mate[pair[1]] = Some(pair[0]);
        }
        Ok(outcome)
    }
}

/// Size and cost of a minimum-cost maximum-cardinality matching on `vertices`, densely.
pub fn min_cost_max_card_dense(g: &BipartiteGraph, vertices: &[usize]) -> Result<(usize, Fixed)> {
    let rows: Vec<usize> = vertices.iter().copied().filter(|&v| g.side(v) == Side::R).collect();
    let cols: Vec<usize> = vertices.iter().copied().filter(|&v| g.side(v) == Side::B).collect();
    let dim = rows.len().max(cols.len());
    if dim == 0 {
        return Ok((0, Fixed::ZERO));
    }
    let col_of: std::collections::HashMap<usize, usize> = cols.iter().enumerate().map(|(j, &b)| (b, j)).collect();
    let mut heavy = Fixed::ONE;
    for &r in &rows {
        for &(w, c) in g.neighbors(r) {
            if col_of.contains_key(&w) {
                heavy += c;
            }
        }
    }
    // Real edges cost `c - heavy`, so cardinality dominates; padding costs 0.
    let mut m = DenseCostMatrix::new(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(i, j, Fixed::ZERO);
        }
    }
    for (i, &r) in rows.iter().enumerate() {
        for &(w, c) in g.neighbors(r) {
            if let Some(&j) = col_of.get(&w) {
                let cur = *m.get(i, j).unwrap();
                let val = c - heavy;
                if val < cur {
                    m.set(i, j, val);
                }
            }
        }
    }
    let a = mcpm_dense(&m)?;
    let mut size = 0;
    let mut cost = Fixed::ZERO;
    for (i, &j) in a.row_to_col.iter().enumerate() {
        let v = *m.get(i, j).unwrap();
        if v < Fixed::ZERO {
            size += 1;
            cost += v + heavy;
        }
    }
    Ok((size, cost))
}
