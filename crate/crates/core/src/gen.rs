//! Seeded random instances.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::geom::{on_segment, GridPoint, Instance, MAX_DELTA};
use crate::separator::PlanarGraph;

/// `n` distinct uniform points of `[1, delta]²`, each colored by a fair coin,
/// redrawn until both colors appear.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, delta: i64) -> Result<Instance> {
    if n < 2 || !(2..=MAX_DELTA).contains(&delta) {
        return Err(Error::InvalidInput(format!("need n >= 2 and 2 <= delta <= {MAX_DELTA}, got n = {n}, delta = {delta}")));
    }
    let cells = (delta as u128) * (delta as u128);
    if n as u128 > cells {
        return Err(Error::InvalidInput(format!("{n} distinct points do not fit in [1, {delta}]²")));
    }
    let points: Vec<GridPoint> = if 2 * n as u128 > cells {
        // Dense: partial shuffle of all cells.
        let mut all: Vec<GridPoint> =
            (0..cells as i64).map(|c| GridPoint::new(1 + c % delta, 1 + c / delta)).collect();
        for i in 0..n {
            let j = rng.random_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(n);
        all
    } else {
        let mut seen = HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let p = GridPoint::new(rng.random_range(1..=delta), rng.random_range(1..=delta));
            if seen.insert(p) {
                out.push(p);
            }
        }
        out
    };
    loop {
        let red_mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let reds = red_mask.iter().filter(|&&r| r).count();
        if reds == 0 || reds == n {
            continue;
        }
        let red = points.iter().zip(&red_mask).filter(|(_, &r)| r).map(|(p, _)| *p).collect();
        let blue = points.iter().zip(&red_mask).filter(|(_, &r)| !r).map(|(p, _)| *p).collect();
        return Instance::new(delta, red, blue);
    }
}

/// Random planar straight-line graph on `n` distinct grid points: Delaunay
/// edges not passing through a third vertex, each kept with probability `keep`.
pub fn random_planar_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, keep: f64) -> Result<PlanarGraph> {
    let side = (4 * n as i64).max(8);
    let mut pts = Vec::with_capacity(n);
    let mut seen = HashSet::with_capacity(n);
    while pts.len() < n {
        let p = GridPoint::new(rng.random_range(1..=side), rng.random_range(1..=side));
        if seen.insert(p) {
            pts.push(p);
        }
    }
    let mut dt: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    let mut idx = HashMap::with_capacity(n);
    for (i, p) in pts.iter().enumerate() {
        let h = dt
            .insert(Point2::new(p.x as f64, p.y as f64))
            .map_err(|e| Error::InvalidInput(format!("triangulation: {e:?}")))?;
        idx.insert(h.index(), i);
    }
    let mut edges = Vec::new();
    for e in dt.undirected_edges() {
        let [a, b] = e.vertices();
        let (a, b) = (idx[&a.fix().index()], idx[&b.fix().index()]);
        let through = pts
            .iter()
            .enumerate()
            .any(|(v, &p)| v != a && v != b && on_segment(pts[a], pts[b], p));
        if !through && rng.random_bool(keep) {
            edges.push((a, b));
        }
    }
    PlanarGraph::new(pts, &edges)
}
