//! Hungarian search and admissible-path collection for one scaling phase.
//!
//! Duals inside the Hungarian search are kept implicitly: a vertex's stored
//! value `σ` plus or minus the accumulated shift `ω`, depending on whether it
//! sits in the forest.  Edge slacks between forest and non-forest vertices are
//! then "static slack − ω", so priority queues never need re-keying.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::prism::{PrismGraph, PrismMatching, Side};
use crate::wnn::{WeightedNearest, WeightedSite};

use super::ScaledCosts;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// `[b0, r1, b1, ..., rk]` from a free `B̃` vertex to a free `R̃` vertex.
    pub path: Vec<usize>,
    pub omega: BigInt,
    pub steps: usize,
}

struct Forest<'p, 'a> {
    pg: &'p PrismGraph<'a>,
    costs: &'p ScaledCosts,
    n: usize,
    sigma: Vec<BigInt>,
    omega: BigInt,
    in_rf: Vec<bool>,
    in_bf: Vec<bool>,
    parent: Vec<usize>,
    d: WeightedNearest,
    d_heap: BinaryHeap<Reverse<(BigInt, usize, usize)>>,
    h_r1: BinaryHeap<(BigInt, Reverse<usize>)>,
    h_b1: BinaryHeap<(BigInt, Reverse<usize>)>,
    /// Links `(r, r̂)` with `r̂` in the forest.
    h2: BinaryHeap<Reverse<(BigInt, usize, usize)>>,
    /// Links `(b̂, b)` with `b` in the forest.
    h3: BinaryHeap<Reverse<(BigInt, usize, usize)>>,
}

impl<'p, 'a> Forest<'p, 'a> {
    fn link_cost(&self, v: usize) -> BigInt {
        self.costs.of_dist2(self.pg.mu2(v))
    }

    fn query_d(&mut self, b: usize) {
        let p = self.pg.instance().point(b);
        if let Some(best) = self.d.query_min(p) {
            let r = best.id;
            let s = crate::geom::dist2(self.pg.instance().point(r), p);
            let key = self.costs.of_dist2(s) + 1 - &self.sigma[r] - &self.sigma[b];
            self.d_heap.push(Reverse((key, b, r)));
        }
    }

    fn add_b(&mut self, b: usize) {
        self.in_bf[b] = true;
        let n = self.n;
        if b < n {
            self.query_d(b);
            let bh = b + n;
            if !self.in_rf[bh] {
                let key = self.link_cost(b) + 1 - &self.sigma[bh] - &self.sigma[b];
                self.h3.push(Reverse((key, bh, b)));
            }
        } else {
            self.h_b1.push((self.sigma[b].clone(), Reverse(b)));
            let r = b - n;
            if !self.in_rf[r] {
                let key = self.link_cost(r) + 1 - &self.sigma[r] - &self.sigma[b];
                self.h2.push(Reverse((key, r, b)));
            }
        }
    }

    /// Cheapest edge from a forest `B̃` vertex to a non-forest `R̃` vertex, by static slack.
    fn cheapest(&mut self) -> Option<(BigInt, usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        let mut offer = |cand: (BigInt, usize, usize)| {
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        };
        while let Some(Reverse((_, b, r))) = self.d_heap.peek().cloned() {
            if !self.in_rf[r] {
                break;
            }
            self.d_heap.pop();
            self.query_d(b);
        }
        if let Some(Reverse((k, b, r))) = self.d_heap.peek() {
            offer((k.clone(), *r, *b));
        }
        while let Some((_, Reverse(r))) = self.h_r1.peek() {
            if !self.in_rf[*r] {
                break;
            }
            self.h_r1.pop();
        }
        if let (Some((sr, Reverse(r))), Some((sb, Reverse(b)))) = (self.h_r1.peek(), self.h_b1.peek()) {
            offer((BigInt::one() - sr - sb, *r, *b));
        }
        for heap in [&mut self.h2, &mut self.h3] {
            while let Some(Reverse((_, r, _))) = heap.peek() {
                if !self.in_rf[*r] {
                    break;
                }
                heap.pop();
            }
            if let Some(Reverse((k, r, b))) = heap.peek() {
                offer((k.clone(), *r, *b));
            }
        }
        best
    }
}

/// Raises slack-zero edges until some free `R̃` vertex is reachable, updating `y`.
pub fn hungarian_search(
    pg: &PrismGraph,
    costs: &ScaledCosts,
    m: &PrismMatching,
    y: &mut [BigInt],
) -> Result<SearchOutcome> {
    let n = pg.n();
    let total = pg.vertex_count();
    let mut f = Forest {
        pg,
        costs,
        n,
        sigma: y.to_vec(),
        omega: BigInt::zero(),
        in_rf: vec![false; total],
        in_bf: vec![false; total],
        parent: vec![usize::MAX; total],
        d: WeightedNearest::with_grid(costs.t(), costs.roots().clone(), pg.instance().delta(), pg.n()),
        d_heap: BinaryHeap::new(),
        h_r1: BinaryHeap::new(),
        h_b1: BinaryHeap::new(),
        h2: BinaryHeap::new(),
        h3: BinaryHeap::new(),
    };
    let inst = pg.instance();
    for v in 0..total {
        if pg.side(v) != Side::R {
            continue;
        }
        if v < n {
            f.d.insert(WeightedSite { point: inst.point(v), weight: y[v].clone(), id: v })?;
        } else {
            f.h_r1.push((y[v].clone(), Reverse(v)));
        }
    }
    for b in 0..total {
        if pg.side(b) == Side::B && m.is_free(b) {
            f.add_b(b);
        }
    }
    let mut steps = 0;
    loop {
        let (key, r, b) = f
            .cheapest()
            .ok_or_else(|| Error::invariant("Hungarian search ran out of edges"))?;
        let alpha = &key - &f.omega;
        if alpha < BigInt::zero() {
            return Err(Error::invariant("negative slack in Hungarian search"));
        }
        f.omega = key;
        steps += 1;
        log::trace!("phase t={} | alpha={} | edge=({},{}) | omega={}", costs.t(), alpha, r, b, f.omega);
        f.parent[r] = b;
        match m.mate(r) {
            None => {
                for v in 0..total {
                    y[v] = if f.in_rf[v] {
                        &f.sigma[v] - &f.omega
                    } else if f.in_bf[v] {
                        &f.sigma[v] + &f.omega
                    } else {
                        f.sigma[v].clone()
                    };
                }
                let mut path = vec![r];
                let mut cur = r;
                loop {
                    let pb = f.parent[cur];
                    path.push(pb);
                    match m.mate(pb) {
                        None => break,
                        Some(pr) => {
                            path.push(pr);
                            cur = pr;
                        }
                    }
                }
                path.reverse();
                return Ok(SearchOutcome { path, omega: f.omega, steps });
            }
            Some(bm) => {
                f.in_rf[r] = true;
                f.sigma[r] = &f.sigma[r] + &f.omega;
                if r < n {
                    f.d.delete(r)?;
                }
                f.sigma[bm] = &f.sigma[bm] - &f.omega;
                f.add_b(bm);
            }
        }
    }
}

/// Greedy depth-first search for a maximal set of vertex-disjoint admissible
/// augmenting paths.  A non-matching edge is admissible when its slack
/// `c̃ + 1 - y(r) - y(b)` is zero.
pub fn dfs_collect_paths(
    pg: &PrismGraph,
    costs: &ScaledCosts,
    m: &PrismMatching,
    y: &[BigInt],
) -> Result<Vec<Vec<usize>>> {
    let n = pg.n();
    let total = pg.vertex_count();
    let inst = pg.instance();
    let mut visited = vec![false; total];
    let mut d = WeightedNearest::with_grid(costs.t(), costs.roots().clone(), inst.delta(), n);
    let mut h_r1 = BinaryHeap::new();
    for v in 0..total {
        if pg.side(v) != Side::R {
            continue;
        }
        if v < n {
            d.insert(WeightedSite { point: inst.point(v), weight: y[v].clone(), id: v })?;
        } else {
            h_r1.push((y[v].clone(), Reverse(v)));
        }
    }
    let mut paths = Vec::new();
    for root in 0..total {
        if pg.side(root) != Side::B || !m.is_free(root) || visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![root];
        while let Some(&u) = stack.last() {
            let mut best: Option<(BigInt, usize)> = None;
            let mut offer = |slack: BigInt, v: usize| {
                if best.as_ref().is_none_or(|(s, w)| (&slack, v) < (s, *w)) {
                    best = Some((slack, v));
                }
            };
            if u < n {
                if let Some(hit) = d.query_min(inst.point(u)) {
                    let s = crate::geom::dist2(inst.point(hit.id), inst.point(u));
                    offer(costs.of_dist2(s) + 1 - &y[hit.id] - &y[u], hit.id);
                }
                let uh = u + n;
                if !visited[uh] {
                    offer(costs.of_dist2(pg.mu2(u)) + 1 - &y[uh] - &y[u], uh);
                }
            } else {
                while let Some((_, Reverse(v))) = h_r1.peek() {
                    if !visited[*v] {
                        break;
                    }
                    h_r1.pop();
                }
                if let Some((yv, Reverse(v))) = h_r1.peek() {
                    offer(BigInt::one() - yv - &y[u], *v);
                }
                let r = u - n;
                if !visited[r] {
                    offer(costs.of_dist2(pg.mu2(r)) + 1 - &y[r] - &y[u], r);
                }
            }
            match best {
                Some((slack, v)) if slack.is_zero() => {
                    visited[v] = true;
                    if v < n {
                        d.delete(v)?;
                    }
                    stack.push(v);
                    match m.mate(v) {
                        None => {
                            paths.push(stack.clone());
                            break;
                        }
                        Some(w) => {
                            visited[w] = true;
                            stack.push(w);
                        }
                    }
                }
                Some((slack, _)) if slack < BigInt::zero() => {
                    return Err(Error::invariant("negative slack during path search"));
                }
                _ => {
                    stack.pop();
                    stack.pop();
                }
            }
        }
    }
    Ok(paths)
}
