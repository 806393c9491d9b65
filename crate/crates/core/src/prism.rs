//! The two-layer graph whose perfect matchings encode edge covers.
//!
//! Every original point `v` (id `0..n`) has an upper copy with prism id `v`
//! and a lower copy with prism id `n + v`.  Upper reds and lower blues form
//! the side `R̃`; upper blues and lower reds form `B̃`.  Edges:
//! upper red–blue at Euclidean length, lower blue–red copies at cost zero,
//! and the link `v – v̂` at `μ(v)`, the distance from `v` to its nearest
//! opposite-colored point.

use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::geom::{dist2, Color, GridPoint, Instance};
use crate::report::CostReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    R,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    Upper,
    Lower,
    Link,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrismEdge {
    pub class: EdgeClass,
    /// Squared Euclidean cost; zero for lower edges.
    pub dist2: u64,
}

/// `μ(v)²` and the lowest-index opposite point attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearestOpposite {
    pub mu2: Vec<u64>,
    pub nearest: Vec<usize>,
}

/// Below this side length a linear scan beats bucketing.
const BRUTE_FORCE_DELTA: i64 = 64;

pub fn nearest_opposite_all(inst: &Instance) -> NearestOpposite {
    let n = inst.n();
    let mut mu2 = vec![0; n];
    let mut nearest = vec![0; n];
    let grid_r = Buckets::new(inst, inst.red(), 0);
    let grid_b = Buckets::new(inst, inst.blue(), inst.n_red());
    for v in 0..n {
        let p = inst.point(v);
        let (best, arg) = match inst.color(v) {
            Color::Red => grid_b.nearest(p),
            Color::Blue => grid_r.nearest(p),
        };
        mu2[v] = best;
        nearest[v] = arg;
    }
    NearestOpposite { mu2, nearest }
}

struct Buckets<'a> {
    pts: &'a [GridPoint],
    base: usize,
    cell: i64,
    side: i64,
    cells: Vec<Vec<usize>>,
}

impl<'a> Buckets<'a> {
    fn new(inst: &Instance, pts: &'a [GridPoint], base: usize) -> Self {
        let delta = inst.delta();
        if delta < BRUTE_FORCE_DELTA {
            return Buckets { pts, base, cell: 0, side: 0, cells: Vec::new() };
        }
        let per = (pts.len() as f64).sqrt().ceil().max(1.0) as i64;
        let cell = (delta / per).max(1);
        let side = delta / cell + 1;
        let mut cells = vec![Vec::new(); (side * side) as usize];
        for (i, p) in pts.iter().enumerate() {
            cells[((p.x / cell) * side + p.y / cell) as usize].push(i);
        }
        Buckets { pts, base, cell, side, cells }
    }

    fn nearest(&self, q: GridPoint) -> (u64, usize) {
        let mut best = (u64::MAX, usize::MAX);
        let consider = |i: usize, best: &mut (u64, usize)| {
            let d = dist2(q, self.pts[i]);
            if (d, i) < *best {
                *best = (d, i);
            }
        };
        if self.cells.is_empty() {
            for i in 0..self.pts.len() {
                consider(i, &mut best);
            }
            return (best.0, best.1 + self.base);
        }
        let (cx, cy) = (q.x / self.cell, q.y / self.cell);
        let mut r = 0i64;
        loop {
            for gx in cx - r..=cx + r {
                for gy in cy - r..=cy + r {
                    if (gx - cx).abs() != r && (gy - cy).abs() != r {
                        continue;
                    }
                    if gx < 0 || gy < 0 || gx >= self.side || gy >= self.side {
                        continue;
                    }
                    for &i in &self.cells[(gx * self.side + gy) as usize] {
                        consider(i, &mut best);
                    }
                }
            }
            // Every point in ring r+1 or beyond is at least r·cell away.
            let reach = (r * self.cell) as u64;
            if best.0 != u64::MAX && reach * reach > best.0 {
                break;
            }
            if r > self.side {
                break;
            }
            r += 1;
        }
        (best.0, best.1 + self.base)
    }
}

#[derive(Clone, Debug)]
pub struct PrismGraph<'a> {
    inst: &'a Instance,
    near: NearestOpposite,
}

impl<'a> PrismGraph<'a> {
    pub fn build(inst: &'a Instance) -> Self {
        PrismGraph { inst, near: nearest_opposite_all(inst) }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    /// Number of original points.
    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.inst.n()
    }

    /// Original point behind a prism vertex.
    pub fn base(&self, v: usize) -> usize {
        v % self.n()
    }

    pub fn is_upper(&self, v: usize) -> bool {
        v < self.n()
    }

    pub fn mirror(&self, v: usize) -> usize {
        let n = self.n();
        if v < n {
            v + n
        } else {
            v - n
        }
    }

    pub fn side(&self, v: usize) -> Side {
        match (self.is_upper(v), self.inst.color(self.base(v))) {
            (true, Color::Red) | (false, Color::Blue) => Side::R,
            _ => Side::B,
        }
    }

    pub fn r_side(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.side(v) == Side::R).collect()
    }

    pub fn b_side(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.side(v) == Side::B).collect()
    }

    pub fn mu2(&self, v: usize) -> u64 {
        self.near.mu2[self.base(v)]
    }

    pub fn nearest(&self, v: usize) -> usize {
        self.near.nearest[self.base(v)]
    }

    pub fn nearest_opposite(&self) -> &NearestOpposite {
        &self.near
    }

    /// The edge between two prism vertices, if any (order irrelevant).
    pub fn edge(&self, u: usize, w: usize) -> Option<PrismEdge> {
        let n = self.n();
        let (bu, bw) = (self.base(u), self.base(w));
        let cu = self.inst.color(bu);
        let cw = self.inst.color(bw);
        match (self.is_upper(u), self.is_upper(w)) {
            (true, true) if cu != cw => Some(PrismEdge {
                class: EdgeClass::Upper,
                dist2: dist2(self.inst.point(bu), self.inst.point(bw)),
            }),
            (false, false) if cu != cw => Some(PrismEdge { class: EdgeClass::Lower, dist2: 0 }),
            (true, false) | (false, true) if bu == bw && u != w && u.abs_diff(w) == n => {
                Some(PrismEdge { class: EdgeClass::Link, dist2: self.near.mu2[bu] })
            }
            _ => None,
        }
    }

    /// All neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let n = self.n();
        let b = self.base(v);
        let c = self.inst.color(b);
        let offset = if self.is_upper(v) { 0 } else { n };
        let mut out: Vec<usize> = self
            .inst
            .ids()
            .filter(|&u| self.inst.color(u) != c)
            .map(|u| u + offset)
            .collect();
        out.push(self.mirror(v));
        out
    }
}

/// `mate[v]` for every prism vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrismMatching {
    mate: Vec<Option<usize>>,
}

impl PrismMatching {
    pub fn empty(vertex_count: usize) -> Self {
        PrismMatching { mate: vec![None; vertex_count] }
    }

    pub fn from_mates(mate: Vec<Option<usize>>) -> Self {
        PrismMatching { mate }
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate[v]
    }

    pub fn mates(&self) -> &[Option<usize>] {
        &self.mate
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.mate[v].is_none()
    }

    pub fn set_pair(&mut self, u: usize, w: usize) {
        self.mate[u] = Some(w);
        self.mate[w] = Some(u);
    }

    pub fn unset(&mut self, v: usize) {
        if let Some(w) = self.mate[v].take() {
            self.mate[w] = None;
        }
    }

    pub fn size(&self) -> usize {
        self.mate.iter().filter(|m| m.is_some()).count() / 2
    }

    pub fn is_perfect(&self) -> bool {
        self.mate.iter().all(|m| m.is_some())
    }

    /// Matched pairs `(u, w)` with `u < w`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.mate
            .iter()
            .enumerate()
            .filter_map(|(u, m)| m.filter(|&w| u < w).map(|w| (u, w)))
            .collect()
    }

    /// Checks symmetry of `mate` and that every pair is a prism edge.
    pub fn validate(&self, pg: &PrismGraph) -> Result<()> {
        if self.mate.len() != pg.vertex_count() {
            return Err(Error::invariant("matching has the wrong vertex count"));
        }
        for (u, m) in self.mate.iter().enumerate() {
            if let Some(w) = *m {
                if self.mate[w] != Some(u) {
                    return Err(Error::invariant(format!("mate of {u} is not symmetric")));
                }
                if pg.edge(u, w).is_none() {
                    return Err(Error::invariant(format!("({u}, {w}) is not a prism edge")));
                }
            }
        }
        Ok(())
    }

    /// Squared lengths of all non-lower matched edges.
    pub fn cost_terms(&self, pg: &PrismGraph) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .pairs()
            .into_iter()
            .filter_map(|(u, w)| pg.edge(u, w))
            .filter(|e| e.class != EdgeClass::Lower)
            .map(|e| e.dist2)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn cost_fixed(&self, pg: &PrismGraph) -> Fixed {
        self.cost_terms(pg).into_iter().map(Fixed::sqrt).sum()
    }
}

/// Red/blue index pairs; duplicates are kept so cost bookkeeping stays exact.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeCover {
    pub edges: Vec<(usize, usize)>,
}

impl EdgeCover {
    pub fn squared_lengths(&self, inst: &Instance) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .edges
            .iter()
            .map(|&(r, b)| dist2(inst.red()[r], inst.blue()[b]))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let mut red = vec![false; inst.n_red()];
        let mut blue = vec![false; inst.n_blue()];
        for &(r, b) in &self.edges {
            if r >= inst.n_red() || b >= inst.n_blue() {
                return Err(Error::InvalidInput(format!("edge ({r}, {b}) out of range")));
            }
            red[r] = true;
            blue[b] = true;
        }
        if let Some(i) = red.iter().position(|c| !c) {
            return Err(Error::Uncovered { color: Color::Red, index: i });
        }
        if let Some(j) = blue.iter().position(|c| !c) {
            return Err(Error::Uncovered { color: Color::Blue, index: j });
        }
        Ok(())
    }
}

/// Upper edges plus, for each link-matched point, its nearest opposite point.
pub fn matching_to_cover(pg: &PrismGraph, pm: &PrismMatching) -> Result<EdgeCover> {
    if !pm.is_perfect() {
        return Err(Error::NotPerfect { matched: 2 * pm.size(), total: pg.vertex_count() });
    }
    pm.validate(pg)?;
    let inst = pg.instance();
    let n = pg.n();
    let as_pair = |u: usize, w: usize| {
        let (r, b) = if inst.color(u) == Color::Red { (u, w) } else { (w, u) };
        (r, b - inst.n_red())
    };
    let mut edges = Vec::new();
    for v in 0..n {
        let w = pm.mate(v).expect("perfect");
        if w < n {
            if v < w {
                edges.push(as_pair(v, w));
            }
        } else {
            edges.push(as_pair(v, pg.nearest(v)));
        }
    }
    edges.sort_unstable();
    Ok(EdgeCover { edges })
}

/// Lower layer replaced by the mirror image of the upper layer.
pub fn symmetrize(pg: &PrismGraph, pm: &PrismMatching) -> Result<PrismMatching> {
    if !pm.is_perfect() {
        return Err(Error::NotPerfect { matched: 2 * pm.size(), total: pg.vertex_count() });
    }
    pm.validate(pg)?;
    let n = pg.n();
    let mut out = PrismMatching::empty(pg.vertex_count());
    for v in 0..n {
        let w = pm.mate(v).expect("perfect");
        if w < n {
            out.set_pair(v, w);
            out.set_pair(v + n, w + n);
        } else {
            out.set_pair(v, w);
        }
    }
    Ok(out)
}

/// Lower layer equals the mirror of the upper layer.
pub fn is_symmetric(pg: &PrismGraph, pm: &PrismMatching) -> bool {
    let n = pg.n();
    (0..n).all(|v| match pm.mate(v) {
        Some(w) if w < n => pm.mate(v + n) == Some(w + n),
        Some(w) => w == v + n,
        None => pm.mate(v + n).is_none() || pm.mate(v + n) == Some(v),
    })
}

pub fn cover_cost(inst: &Instance, cover: &EdgeCover, digits: usize) -> Result<CostReport> {
    cover.validate(inst)?;
    Ok(CostReport::from_terms(cover.squared_lengths(inst), digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gp(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn nearest_example() {
        let inst = Instance::new(4, vec![gp(1, 1), gp(2, 1)], vec![gp(4, 1), gp(1, 3)]).unwrap();
        let no = nearest_opposite_all(&inst);
        assert_eq!(no.mu2, vec![4, 4, 4, 4]);
        assert_eq!(no.nearest, vec![3, 2, 1, 0]);
    }

    #[test]
    fn cover_from_links() {
        let inst = Instance::new(4, vec![gp(1, 1), gp(4, 1)], vec![gp(2, 1)]).unwrap();
        let pg = PrismGraph::build(&inst);
        let mut pm = PrismMatching::empty(6);
        for v in 0..3 {
            pm.set_pair(v, v + 3);
        }
        let cover = matching_to_cover(&pg, &pm).unwrap();
        assert_eq!(cover.edges, vec![(0, 0), (0, 0), (1, 0)]);
        let rep = cover_cost(&inst, &cover, 64).unwrap();
        assert_eq!(rep.squared_lengths, vec![1, 1, 4]);
        assert_eq!(rep.decimal, "4");
    }

    #[test]
    fn edges_and_sides() {
        let inst = Instance::new(4, vec![gp(1, 1)], vec![gp(2, 1), gp(3, 3)]).unwrap();
        let pg = PrismGraph::build(&inst);
        assert_eq!(pg.side(0), Side::R);
        assert_eq!(pg.side(1), Side::B);
        assert_eq!(pg.side(3), Side::B);
        assert_eq!(pg.side(4), Side::R);
        assert_eq!(pg.edge(0, 2).unwrap().dist2, 8);
        assert_eq!(pg.edge(4, 3).unwrap().class, EdgeClass::Lower);
        assert_eq!(pg.edge(0, 3).unwrap().class, EdgeClass::Link);
        assert!(pg.edge(0, 4).is_none());
        assert!(pg.edge(1, 2).is_none());
        let mut nb = pg.neighbors(0);
        nb.sort();
        assert_eq!(nb, vec![1, 2, 3]);
    }

    #[test]
    fn uncovered_reported() {
        let inst = Instance::new(4, vec![gp(1, 1), gp(4, 1)], vec![gp(2, 1)]).unwrap();
        let cover = EdgeCover { edges: vec![(0, 0)] };
        assert_eq!(
            cover_cost(&inst, &cover, 10),
            Err(Error::Uncovered { color: Color::Red, index: 1 })
        );
    }

    fn brute_nearest(inst: &Instance) -> NearestOpposite {
        let n = inst.n();
        let mut mu2 = vec![u64::MAX; n];
        let mut nearest = vec![0; n];
        for v in 0..n {
            for u in 0..n {
                if inst.color(u) != inst.color(v) {
                    let d = dist2(inst.point(u), inst.point(v));
                    if d < mu2[v] {
                        mu2[v] = d;
                        nearest[v] = u;
                    }
                }
            }
        }
        NearestOpposite { mu2, nearest }
    }

    proptest! {
        #[test]
        fn bucketed_nearest_matches_scan(seed_pts in prop::collection::btree_set((1i64..=200, 1i64..=200), 2..60),
                                         split in 1usize..59) {
            let pts: Vec<GridPoint> = seed_pts.into_iter().map(|(x, y)| gp(x, y)).collect();
            let split = split.min(pts.len() - 1);
            let inst = Instance::new(200, pts[..split].to_vec(), pts[split..].to_vec()).unwrap();
            prop_assert_eq!(nearest_opposite_all(&inst), brute_nearest(&inst));
        }
    }
}
