//! Eligible edges and the segment decomposition built from them.
//!
//! With duals `y` from a fine enough scaling phase, an upper edge `(u, v)` is
//! *eligible* when `y_θ(u) + y_θ(v) > ‖u - v‖ - 2/Δ^33`, where
//! `y_θ = y · 2^-t`.  Every edge of an optimal cover is eligible and eligible
//! edges never cross, so their union is a set of segments ("pieces") that
//! only meet at endpoints.  The pieces and their interior points drive both
//! the candidate edge set and the separator recursion.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{cmp_root, RootExpr};
use crate::fixed::Fixed;
use crate::geom::{dist2, line_key, segments_properly_cross, Color, GridPoint, LineKey};
use crate::penalty1d::{self, LinePoint, PenaltySolution};
use crate::prism::{EdgeClass, PrismGraph};
use crate::wnn::{WeightedNearest, WeightedSite};

/// Exponent in the eligibility slack `2/Δ^k`.
pub const SLACK_EXPONENT: u32 = 33;

pub struct EligibilityContext<'p, 'a> {
    pg: &'p PrismGraph<'a>,
    /// Duals of the upper vertices, indexed by original id.
    y: Vec<BigInt>,
    t: i64,
    dual_scale: BigInt,
    slack: BigInt,
    root_scale: BigInt,
}

impl<'p, 'a> EligibilityContext<'p, 'a> {
    /// `duals` are prism duals (length `2n`) at exponent `t`.
    pub fn new(pg: &'p PrismGraph<'a>, duals: &[BigInt], t: i64) -> Self {
        let n = pg.n();
        let d33 = BigInt::from(pg.instance().delta()).pow(SLACK_EXPONENT);
        let pos = BigInt::one() << t.max(0) as u64;
        let neg = BigInt::one() << (-t).max(0) as u64;
        EligibilityContext {
            pg,
            y: duals[..n].to_vec(),
            t,
            dual_scale: &d33 * &neg,
            slack: &pos * 2,
            root_scale: &pos * &d33,
        }
    }

    pub fn prism(&self) -> &'p PrismGraph<'a> {
        self.pg
    }

    pub fn exponent(&self) -> i64 {
        self.t
    }

    pub fn dual(&self, v: usize) -> &BigInt {
        &self.y[v]
    }

    fn point(&self, v: usize) -> GridPoint {
        self.pg.instance().point(v)
    }

    /// Exact test on an upper red–blue pair.
    pub fn is_eligible(&self, u: usize, v: usize) -> bool {
        let inst = self.pg.instance();
        if inst.color(u) == inst.color(v) {
            return false;
        }
        let lhs = &self.dual_scale * (&self.y[u] + &self.y[v]) + &self.slack;
        let rhs = RootExpr::new(BigInt::zero(), self.root_scale.clone(), dist2(self.point(u), self.point(v)));
        cmp_root(&RootExpr::int(lhs), &rhs) == Ordering::Greater
    }

    /// `(‖u - v‖ - y_θ(u) - y_θ(v))` scaled by `2^max(t,0)`, exact.
    fn reduced_length(&self, u: usize, v: usize) -> RootExpr {
        let pos = BigInt::one() << self.t.max(0) as u64;
        let neg = BigInt::one() << (-self.t).max(0) as u64;
        RootExpr::new(-(&self.y[u] + &self.y[v]) * neg, pos, dist2(self.point(u), self.point(v)))
    }
}

/// Every eligible edge by exhaustive scan; for tests and debug checks.
pub fn eligible_edges_brute(ctx: &EligibilityContext) -> Vec<(usize, usize)> {
    let inst = ctx.pg.instance();
    let mut out = Vec::new();
    for r in 0..inst.n_red() {
        for b in inst.n_red()..inst.n() {
            if ctx.is_eligible(r, b) {
                out.push((r, b));
            }
        }
    }
    out
}

/// All `(point, line)` incidences where the point has an eligible edge along the line.
pub fn point_line_pairs(ctx: &EligibilityContext) -> Result<BTreeSet<(usize, LineKey)>> {
    let inst = ctx.pg.instance();
    let n = inst.n();
    let mut reds = WeightedNearest::new(ctx.t);
    let mut blues = WeightedNearest::new(ctx.t);
    for v in 0..n {
        let site = WeightedSite { point: inst.point(v), weight: ctx.y[v].clone(), id: v };
        match inst.color(v) {
            Color::Red => reds.insert(site)?,
            Color::Blue => blues.insert(site)?,
        }
    }
    let mut pairs = BTreeSet::new();
    // Step one: the weighted-nearest opposite point fixes a line per point.
    let mut groups: BTreeMap<LineKey, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let opp = if inst.color(v) == Color::Red { &blues } else { &reds };
        if let Some(hit) = opp.query_min(inst.point(v)) {
            if ctx.is_eligible(v, hit.id) {
                let key = line_key(inst.point(v), inst.point(hit.id));
                pairs.insert((v, key));
                pairs.insert((hit.id, key));
                groups.entry(key).or_default().push(v);
            }
        }
    }
    // Step two: per group, list the remaining eligible neighbors in weighted order.
    // Eligibility is monotone in the weighted distance, so stop at the first miss.
    for (_, group) in groups {
        let mut held = Vec::new();
        for &v in &group {
            let s = match inst.color(v) {
                Color::Red => reds.delete(v)?,
                Color::Blue => blues.delete(v)?,
            };
            held.push(s);
        }
        for &v in &group {
            let mut taken = Vec::new();
            loop {
                let opp = if inst.color(v) == Color::Red { &mut blues } else { &mut reds };
                let Some(hit) = opp.query_min(inst.point(v)) else { break };
                if !ctx.is_eligible(v, hit.id) {
                    break;
                }
                let key = line_key(inst.point(v), inst.point(hit.id));
                pairs.insert((v, key));
                pairs.insert((hit.id, key));
                taken.push(opp.delete(hit.id)?);
            }
            for s in taken {
                let opp = if inst.color(v) == Color::Red { &mut blues } else { &mut reds };
                opp.insert(s)?;
            }
        }
        for s in held {
            match inst.color(s.id) {
                Color::Red => reds.insert(s)?,
                Color::Blue => blues.insert(s)?,
            }
        }
    }
    Ok(pairs)
}

/// Maximal segments covered by eligible edges among `pts` on `line`.
///
/// `pts` must lie on `line`; the result lists `(first, last)` endpoint ids in
/// line order.  Components of eligible edges are recovered from a minimum
/// spanning tree under reduced length, which keeps threshold connectivity.
pub fn line_union(ctx: &EligibilityContext, line: &LineKey, pts: &[usize]) -> Vec<(usize, usize)> {
    let inst = ctx.pg.instance();
    let mut pts = pts.to_vec();
    pts.sort_by_key(|&v| line.param(inst.point(v)));
    pts.dedup();
    let k = pts.len();
    if k < 2 {
        return Vec::new();
    }
    // Dense Prim over the bichromatic complete graph.
    let mut in_tree = vec![false; k];
    let mut best: Vec<Option<(RootExpr, usize)>> = vec![None; k];
    let mut tree_edges = Vec::new();
    in_tree[0] = true;
    let relax = |from: usize, best: &mut Vec<Option<(RootExpr, usize)>>, in_tree: &Vec<bool>| {
        for j in 0..k {
            if in_tree[j] || inst.color(pts[j]) == inst.color(pts[from]) {
                continue;
            }
            let c = ctx.reduced_length(pts[from], pts[j]);
            let better = match &best[j] {
                None => true,
                Some((old, _)) => cmp_root(&c, old) == Ordering::Less,
            };
            if better {
                best[j] = Some((c, from));
            }
        }
    };
    relax(0, &mut best, &in_tree);
    loop {
        let mut pick: Option<usize> = None;
        for j in 0..k {
            if in_tree[j] {
                continue;
            }
            if let Some((c, _)) = &best[j] {
                let take = match pick {
                    None => true,
                    Some(p) => cmp_root(c, &best[p].as_ref().unwrap().0) == Ordering::Less,
                };
                if take {
                    pick = Some(j);
                }
            }
        }
        let Some(j) = pick else { break };
        in_tree[j] = true;
        let from = best[j].as_ref().unwrap().1;
        tree_edges.push((from, j));
        relax(j, &mut best, &in_tree);
    }
    // Forest of eligible tree edges; union-find over local indices.
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    let mut has_edge = vec![false; k];
    for (a, b) in tree_edges {
        if ctx.is_eligible(pts[a], pts[b]) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
            has_edge[a] = true;
            has_edge[b] = true;
        }
    }
    let mut span: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for i in 0..k {
        if !has_edge[i] {
            continue;
        }
        let r = find(&mut parent, i);
        let e = span.entry(r).or_insert((i, i));
        e.0 = e.0.min(i);
        e.1 = e.1.max(i);
    }
    let mut intervals: Vec<(usize, usize)> = span.into_values().collect();
    intervals.sort();
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (a, b) in intervals {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged.into_iter().map(|(a, b)| (pts[a], pts[b])).collect()
}

/// A maximal piece of the eligible union between consecutive skeleton points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub p: usize,
    pub q: usize,
    pub line: LineKey,
    /// Points strictly between `p` and `q`, ordered from `p` to `q`.
    pub interior: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EligibleDecomposition {
    pub pieces: Vec<Piece>,
    /// Sorted original ids of piece endpoints.
    pub skeleton: Vec<usize>,
    /// Piece index of every interior point.
    pub interior_of: Vec<Option<usize>>,
    /// Points on no piece at all.
    pub isolated: Vec<usize>,
}

impl EligibleDecomposition {
    pub fn is_skeleton(&self, v: usize) -> bool {
        self.skeleton.binary_search(&v).is_ok()
    }
}

pub fn build_decomposition(ctx: &EligibilityContext) -> Result<EligibleDecomposition> {
    let inst = ctx.pg.instance();
    let n = inst.n();
    let pairs = point_line_pairs(ctx)?;
    let mut by_line: BTreeMap<LineKey, Vec<usize>> = BTreeMap::new();
    for (v, key) in pairs {
        by_line.entry(key).or_default().push(v);
    }
    let mut union_segments = Vec::new();
    for (key, pts) in &by_line {
        for (a, b) in line_union(ctx, key, pts) {
            union_segments.push((*key, a, b));
        }
    }
    let lookup: HashMap<GridPoint, usize> = (0..n).map(|v| (inst.point(v), v)).collect();
    let mut on_segment: Vec<Vec<usize>> = Vec::with_capacity(union_segments.len());
    let mut cover_count = vec![0u32; n];
    for &(key, a, b) in &union_segments {
        let (ka, kb) = (key.param(inst.point(a)), key.param(inst.point(b)));
        let ids: Vec<usize> = (ka..=kb).filter_map(|k| lookup.get(&key.at(k)).copied()).collect();
        for &v in &ids {
            cover_count[v] += 1;
        }
        on_segment.push(ids);
    }
    // Points on two or more lines split every segment through them.
    let mut pieces = Vec::new();
    for (&(key, _, _), ids) in union_segments.iter().zip(&on_segment) {
        let mut start = 0;
        for i in 1..ids.len() {
            if i == ids.len() - 1 || cover_count[ids[i]] >= 2 {
                pieces.push(Piece {
                    p: ids[start],
                    q: ids[i],
                    line: key,
                    interior: ids[start + 1..i].to_vec(),
                });
                start = i;
            }
        }
    }
    check_non_crossing(inst, &pieces)?;
    let mut skeleton: Vec<usize> = pieces.iter().flat_map(|pc| [pc.p, pc.q]).collect();
    skeleton.sort_unstable();
    skeleton.dedup();
    let mut interior_of = vec![None; n];
    for (i, pc) in pieces.iter().enumerate() {
        for &v in &pc.interior {
            if interior_of[v].is_some() || skeleton.binary_search(&v).is_ok() {
                return Err(Error::invariant(format!("point {v} is interior to two pieces")));
            }
            interior_of[v] = Some(i);
        }
    }
    let isolated = (0..n)
        .filter(|&v| interior_of[v].is_none() && skeleton.binary_search(&v).is_err())
        .collect();
    Ok(EligibleDecomposition { pieces, skeleton, interior_of, isolated })
}

fn check_non_crossing(inst: &crate::geom::Instance, pieces: &[Piece]) -> Result<()> {
    let boxes: Vec<(GridPoint, GridPoint, i64, i64, i64, i64)> = pieces
        .iter()
        .map(|pc| {
            let (a, b) = (inst.point(pc.p), inst.point(pc.q));
            (a, b, a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y))
        })
        .collect();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            let (a, b, x0, x1, y0, y1) = boxes[i];
            let (c, d, u0, u1, v0, v1) = boxes[j];
            if x1 < u0 || u1 < x0 || y1 < v0 || v1 < y0 {
                continue;
            }
            if segments_properly_cross((a, b), (c, d)) {
                return Err(Error::invariant(format!(
                    "pieces {i} and {j} cross: ({},{})-({},{}) and ({},{})-({},{})",
                    a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y
                )));
            }
        }
    }
    Ok(())
}

/// Every eligible edge lies inside a single piece's span.
pub fn verify_coverage(ctx: &EligibilityContext, dec: &EligibleDecomposition) -> Result<()> {
    let inst = ctx.pg.instance();
    let mut spans: HashMap<LineKey, Vec<(i64, i64)>> = HashMap::new();
    for pc in &dec.pieces {
        let (a, b) = (pc.line.param(inst.point(pc.p)), pc.line.param(inst.point(pc.q)));
        spans.entry(pc.line).or_default().push((a.min(b), a.max(b)));
    }
    for (u, v) in eligible_edges_brute(ctx) {
        let key = line_key(inst.point(u), inst.point(v));
        let (a, b) = (key.param(inst.point(u)), key.param(inst.point(v)));
        let (a, b) = (a.min(b), a.max(b));
        // Pieces on one line are contiguous, so the edge must lie in their union.
        let mut segs = spans.get(&key).cloned().unwrap_or_default();
        segs.sort();
        let mut reach = a;
        for (s, e) in segs {
            if s <= reach && e > reach {
                reach = e;
            }
        }
        if reach < b {
            return Err(Error::invariant(format!("eligible edge ({u}, {v}) not covered")));
        }
    }
    Ok(())
}

/// The 1D instance of a piece: its interior points plus any forced endpoints.
///
/// Returns the points (sorted along the piece) and their original ids.
pub fn local_points(
    pg: &PrismGraph,
    piece: &Piece,
    force_p: bool,
    force_q: bool,
) -> (Vec<LinePoint<Fixed>>, Vec<usize>) {
    let inst = pg.instance();
    let step = Fixed::sqrt(piece.line.step2());
    let origin = piece.line.param(inst.point(piece.p));
    let sign = if piece.line.param(inst.point(piece.q)) >= origin { 1 } else { -1 };
    let mut ids = Vec::with_capacity(piece.interior.len() + 2);
    if force_p {
        ids.push(piece.p);
    }
    ids.extend_from_slice(&piece.interior);
    if force_q {
        ids.push(piece.q);
    }
    let pts = ids
        .iter()
        .map(|&v| {
            let pos = step.mul_int(sign * (piece.line.param(inst.point(v)) - origin));
            let forced = (v == piece.p && force_p) || (v == piece.q && force_q);
            if forced {
                LinePoint::forced(pos, inst.color(v))
            } else {
                LinePoint::new(pos, inst.color(v), Fixed::sqrt(pg.mu2(v)))
            }
        })
        .collect();
    (pts, ids)
}

/// A 1D witness together with its pairs as original `(red, blue)` ids.
pub type PieceSolution = (PenaltySolution<Fixed>, Vec<(usize, usize)>);

/// Solves a piece's 1D instance and maps the witness to original ids.
pub fn solve_piece(pg: &PrismGraph, piece: &Piece, force_p: bool, force_q: bool) -> Result<Option<PieceSolution>> {
    let (pts, ids) = local_points(pg, piece, force_p, force_q);
    let Some(sol) = penalty1d::solve_with_forced(&pts)? else { return Ok(None) };
    let edges = sol.pairs.iter().map(|&(r, b)| (ids[r], ids[b])).collect();
    Ok(Some((sol, edges)))
}

/// Upper candidate edges `(red id, blue id)`; the lower mirrors and all links are implied.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateEdges {
    pub upper: Vec<(usize, usize)>,
    pub n: usize,
}

impl CandidateEdges {
    /// Upper edges, their mirrors, and one link per point.
    pub fn total_len(&self) -> usize {
        2 * self.upper.len() + self.n
    }

    pub fn contains_upper(&self, r: usize, b: usize) -> bool {
        self.upper.binary_search(&(r, b)).is_ok()
    }

    /// Whether the prism edge `(u, w)` is kept: links always, upper and
    /// lower edges when their base pair is a candidate.
    pub fn allows(&self, pg: &PrismGraph, u: usize, w: usize) -> bool {
        let Some(e) = pg.edge(u, w) else { return false };
        if e.class == EdgeClass::Link {
            return true;
        }
        let inst = pg.instance();
        let (a, b) = (pg.base(u), pg.base(w));
        if inst.color(a) == Color::Red {
            self.contains_upper(a, b)
        } else {
            self.contains_upper(b, a)
        }
    }
}

/// Default bound on `|Ẽ_cand| / n`.
pub const CANDIDATE_FACTOR: usize = 12;

pub fn candidate_edges(pg: &PrismGraph, dec: &EligibleDecomposition, factor: usize) -> Result<CandidateEdges> {
    let inst = pg.instance();
    let mut set = BTreeSet::new();
    let as_rb = |u: usize, v: usize| if inst.color(u) == Color::Red { (u, v) } else { (v, u) };
    for pc in &dec.pieces {
        if inst.color(pc.p) != inst.color(pc.q) {
            set.insert(as_rb(pc.p, pc.q));
        }
        for (fp, fq) in [(false, false), (true, false), (false, true), (true, true)] {
            if let Some((_, edges)) = solve_piece(pg, pc, fp, fq)? {
                set.extend(edges);
            }
        }
    }
    let out = CandidateEdges { upper: set.into_iter().collect(), n: inst.n() };
    if out.total_len() > factor * inst.n() {
        return Err(Error::invariant(format!(
            "{} candidate edges exceed {factor}·n = {}",
            out.total_len(),
            factor * inst.n()
        )));
    }
    Ok(out)
}
