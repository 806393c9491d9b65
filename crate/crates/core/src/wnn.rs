//! Additively weighted nearest neighbor over grid sites.
//!
//! A site `p` with integer weight `w` is at value `‖q - p‖ - w·2^-t` from a
//! query `q`.  Values are compared exactly; a floating-point pass with a
//! rigorous error margin discards clear losers, and an integer ceiling filter
//! settles most of the rest before the exact test runs.
//!
//! Sites live in a uniform grid of cells grouped into square blocks.  Cells and
//! blocks keep the largest shift `w·2^-t` they hold, which lower-bounds every
//! value inside by `dist(q, rect) - max_shift`; a query skips regions whose
//! bound exceeds the best value seen so far.  Without a grid (`new`) there is a
//! single cell and the query is a linear scan.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::{cmp_root, RootExpr, ScaledRoots};
use crate::geom::{dist2, GridPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSite {
    pub point: GridPoint,
    pub weight: BigInt,
    pub id: usize,
}

/// A query answer; `value` is the exact distance scaled by `2^max(t, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nearest {
    pub id: usize,
    pub value: RootExpr,
    /// `⌈value⌉`, exact.
    pub ceil: BigInt,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    x: i64,
    y: i64,
    /// `w·2^-t`, the weight in length units, rounded.
    shift: f64,
    id: usize,
}

#[derive(Clone, Debug, Default)]
struct Bucket {
    slots: Vec<Slot>,
    max_shift: f64,
    max_abs: f64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Summary {
    count: usize,
    max_shift: f64,
    max_abs: f64,
}

/// Relative error allowed on the floating-point value `√s - w·2^-t`.
const FLOAT_SLACK: f64 = 1.0 / (1u64 << 40) as f64;
/// Cells per block side.
const BLOCK: usize = 8;

#[derive(Clone, Debug)]
struct Grid {
    /// Smallest coordinate of cell 0; the outer cells extend to infinity.
    origin: i64,
    side: i64,
    cells_per_axis: usize,
    blocks_per_axis: usize,
    cells: Vec<Bucket>,
    blocks: Vec<Summary>,
}

impl Grid {
    fn new(lo: i64, hi: i64, expected: usize) -> Self {
        let span = (hi - lo + 1).max(1);
        let want = ((expected.max(1) as f64 / 2.0).sqrt().ceil() as i64).clamp(1, span);
        let side = (span + want - 1) / want;
        let cells_per_axis = ((span + side - 1) / side) as usize;
        let blocks_per_axis = cells_per_axis.div_ceil(BLOCK);
        Grid {
            origin: lo,
            side,
            cells_per_axis,
            blocks_per_axis,
            cells: vec![Bucket::default(); cells_per_axis * cells_per_axis],
            blocks: vec![Summary::default(); blocks_per_axis * blocks_per_axis],
        }
    }

    fn axis(&self, c: i64) -> usize {
        (c - self.origin).div_euclid(self.side).clamp(0, self.cells_per_axis as i64 - 1) as usize
    }

    fn cell_of(&self, x: i64, y: i64) -> (usize, usize) {
        (self.axis(x), self.axis(y))
    }

    /// Float distance from `c` to the cell range `[i0, i1]` along one axis.
    fn axis_gap(&self, c: i64, i0: usize, i1: usize) -> f64 {
        let lo = if i0 == 0 { i64::MIN } else { self.origin + i0 as i64 * self.side };
        let hi = if i1 + 1 == self.cells_per_axis { i64::MAX } else { self.origin + (i1 as i64 + 1) * self.side - 1 };
        if c < lo {
            (lo - c) as f64
        } else if c > hi {
            (c - hi) as f64
        } else {
            0.0
        }
    }

    fn gap(&self, q: GridPoint, (ix0, iy0): (usize, usize), (ix1, iy1): (usize, usize)) -> f64 {
        let dx = self.axis_gap(q.x, ix0, ix1);
        let dy = self.axis_gap(q.y, iy0, iy1);
        (dx * dx + dy * dy).sqrt()
    }

    fn block_range(&self, bx: usize, by: usize) -> ((usize, usize), (usize, usize)) {
        let last = self.cells_per_axis - 1;
        ((bx * BLOCK, by * BLOCK), (((bx + 1) * BLOCK - 1).min(last), ((by + 1) * BLOCK - 1).min(last)))
    }

    fn add(&mut self, slot: Slot) {
        let (ix, iy) = self.cell_of(slot.x, slot.y);
        let cell = &mut self.cells[iy * self.cells_per_axis + ix];
        if cell.slots.is_empty() {
            cell.max_shift = slot.shift;
            cell.max_abs = slot.shift.abs();
        } else {
            cell.max_shift = cell.max_shift.max(slot.shift);
            cell.max_abs = cell.max_abs.max(slot.shift.abs());
        }
        cell.slots.push(slot);
        let block = &mut self.blocks[(iy / BLOCK) * self.blocks_per_axis + ix / BLOCK];
        if block.count == 0 {
            block.max_shift = slot.shift;
            block.max_abs = slot.shift.abs();
        } else {
            block.max_shift = block.max_shift.max(slot.shift);
            block.max_abs = block.max_abs.max(slot.shift.abs());
        }
        block.count += 1;
    }

    /// Removes site `id` at `(x, y)`; maxima are rebuilt only if it held one.
    fn remove(&mut self, x: i64, y: i64, id: usize) -> Option<Slot> {
        let (ix, iy) = self.cell_of(x, y);
        let k = self.cells_per_axis;
        let cell = &mut self.cells[iy * k + ix];
        let at = cell.slots.iter().position(|s| s.id == id)?;
        let slot = cell.slots.swap_remove(at);
        let extreme = slot.shift >= cell.max_shift || slot.shift.abs() >= cell.max_abs;
        if extreme {
            cell.max_shift = cell.slots.iter().map(|s| s.shift).fold(f64::NEG_INFINITY, f64::max);
            cell.max_abs = cell.slots.iter().map(|s| s.shift.abs()).fold(0.0, f64::max);
        }
        let (bx, by) = (ix / BLOCK, iy / BLOCK);
        let bi = by * self.blocks_per_axis + bx;
        self.blocks[bi].count -= 1;
        let block = self.blocks[bi];
        if slot.shift >= block.max_shift || slot.shift.abs() >= block.max_abs {
            let ((x0, y0), (x1, y1)) = self.block_range(bx, by);
            let mut sum = Summary { count: block.count, max_shift: f64::NEG_INFINITY, max_abs: 0.0 };
            for cy in y0..=y1 {
                for c in &self.cells[cy * k + x0..=cy * k + x1] {
                    if !c.slots.is_empty() {
                        sum.max_shift = sum.max_shift.max(c.max_shift);
                        sum.max_abs = sum.max_abs.max(c.max_abs);
                    }
                }
            }
            self.blocks[bi] = sum;
        }
        Some(slot)
    }
}

/// Lower bound on the float pass's `v - err` for any site at distance at
/// least `gap` with shift at most `max_shift`.
fn region_bound(gap: f64, max_shift: f64, max_abs: f64) -> f64 {
    gap * (1.0 - 2.0 * FLOAT_SLACK) - max_shift - (max_abs + 1.0) * FLOAT_SLACK - 1e-300
}

#[derive(Debug)]
pub struct WeightedNearest {
    t: i64,
    root_scale: BigInt,
    weight_scale: BigInt,
    sites: BTreeMap<usize, WeightedSite>,
    grid: Grid,
    /// Sites whose shift does not fit in an `f64`; forces exact scans.
    wild: usize,
    roots: Rc<ScaledRoots>,
}

impl WeightedNearest {
    pub fn new(t: i64) -> Self {
        WeightedNearest::with_roots(t, Rc::new(ScaledRoots::new()))
    }

    /// Shares a root memo, e.g. with the phase's scaled costs.
    pub fn with_roots(t: i64, roots: Rc<ScaledRoots>) -> Self {
        WeightedNearest::build(t, roots, Grid::new(0, 0, 1))
    }

    /// Bucketed structure for about `expected` sites in `[1, extent]²`.
    /// Sites outside the square are still answered correctly.
    pub fn with_grid(t: i64, roots: Rc<ScaledRoots>, extent: i64, expected: usize) -> Self {
        WeightedNearest::build(t, roots, Grid::new(1, extent.max(1), expected))
    }

    fn build(t: i64, roots: Rc<ScaledRoots>, grid: Grid) -> Self {
        let (root_scale, weight_scale) = if t >= 0 {
            (BigInt::one() << t as u64, BigInt::one())
        } else {
            (BigInt::one(), BigInt::one() << (-t) as u64)
        };
        WeightedNearest {
            t,
            root_scale,
            weight_scale,
            sites: BTreeMap::new(),
            grid,
            wild: 0,
            roots,
        }
    }

    pub fn exponent(&self) -> i64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.sites.contains_key(&id)
    }

    fn shift_of(&self, w: &BigInt) -> f64 {
        let w = w.to_f64().unwrap_or(f64::NAN);
        if self.t >= 0 {
            w / 2f64.powi(self.t.min(i32::MAX as i64) as i32)
        } else {
            w * 2f64.powi((-self.t).min(i32::MAX as i64) as i32)
        }
    }

    pub fn insert(&mut self, site: WeightedSite) -> Result<()> {
        if self.sites.contains_key(&site.id) {
            return Err(Error::DuplicateSite(site.id));
        }
        let shift = self.shift_of(&site.weight);
        if !shift.is_finite() {
            self.wild += 1;
        }
        self.grid.add(Slot { x: site.point.x, y: site.point.y, shift, id: site.id });
        self.sites.insert(site.id, site);
        Ok(())
    }

    pub fn delete(&mut self, id: usize) -> Result<WeightedSite> {
        let site = self.sites.remove(&id).ok_or(Error::UnknownSite(id))?;
        let slot = self.grid.remove(site.point.x, site.point.y, id).ok_or(Error::UnknownSite(id))?;
        if !slot.shift.is_finite() {
            self.wild -= 1;
        }
        Ok(site)
    }

    fn root_ceil(&self, s: u64) -> BigInt {
        self.roots.ceil(s, self.t.max(0))
    }

    /// Exact scaled value of `site` seen from `q`.
    pub fn value_of(&self, q: GridPoint, site: &WeightedSite) -> RootExpr {
        RootExpr::new(
            -(&site.weight * &self.weight_scale),
            self.root_scale.clone(),
            dist2(q, site.point),
        )
    }

    /// Float pass over the cells of one block whose bound is within reach.
    fn scan_block(&self, q: GridPoint, bx: usize, by: usize, lowest_upper: &mut f64, out: &mut Vec<(f64, usize)>) {
        let g = &self.grid;
        let ((x0, y0), (x1, y1)) = g.block_range(bx, by);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                let cell = &g.cells[cy * g.cells_per_axis + cx];
                if cell.slots.is_empty() {
                    continue;
                }
                if region_bound(g.gap(q, (cx, cy), (cx, cy)), cell.max_shift, cell.max_abs) > *lowest_upper {
                    continue;
                }
                for s in &cell.slots {
                    let (dx, dy) = ((q.x - s.x) as f64, (q.y - s.y) as f64);
                    let root = (dx * dx + dy * dy).sqrt();
                    let v = root - s.shift;
                    let err = (root + s.shift.abs() + 1.0) * FLOAT_SLACK;
                    if v - err <= *lowest_upper {
                        *lowest_upper = lowest_upper.min(v + err);
                        out.push((v - err, s.id));
                    }
                }
            }
        }
    }

    /// Site minimizing the weighted distance; ties go to the smaller id.
    pub fn query_min(&self, q: GridPoint) -> Option<Nearest> {
        if self.sites.is_empty() {
            return None;
        }
        let mut ids: Vec<usize> = if self.wild > 0 {
            self.sites.keys().copied().collect()
        } else {
            // Float pass: keep every site whose value might reach the minimum.
            let g = &self.grid;
            let mut order: Vec<(f64, usize, usize)> = Vec::new();
            for by in 0..g.blocks_per_axis {
                for bx in 0..g.blocks_per_axis {
                    let b = &g.blocks[by * g.blocks_per_axis + bx];
                    if b.count > 0 {
                        let (lo, hi) = g.block_range(bx, by);
                        order.push((region_bound(g.gap(q, lo, hi), b.max_shift, b.max_abs), bx, by));
                    }
                }
            }
            let first = order
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
                .map(|(i, _)| i)
                .unwrap_or(0);
            order.swap(0, first);
            let mut lowest_upper = f64::INFINITY;
            let mut approx = Vec::new();
            for &(bound, bx, by) in &order {
                if bound <= lowest_upper {
                    self.scan_block(q, bx, by, &mut lowest_upper, &mut approx);
                }
            }
            let mut ids: Vec<usize> =
                approx.into_iter().filter(|&(lo, _)| lo <= lowest_upper).map(|(_, id)| id).collect();
            ids.sort_unstable();
            ids
        };
        ids.dedup();

        let mut best: Option<(BigInt, RootExpr, usize)> = None;
        for id in ids {
            let site = &self.sites[&id];
            let value = self.value_of(q, site);
            let ceil = self.root_ceil(value.s) + &value.a;
            let better = match &best {
                None => true,
                Some((bc, bv, _)) => match ceil.cmp(bc) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => cmp_root(&value, bv) == Ordering::Less,
                },
            };
            if better {
                best = Some((ceil, value, id));
            }
        }
        best.map(|(ceil, value, id)| Nearest { id, value, ceil })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn site(x: i64, y: i64, w: i64, id: usize) -> WeightedSite {
        WeightedSite { point: GridPoint::new(x, y), weight: BigInt::from(w), id }
    }

    #[test]
    fn weights_shift_the_answer() {
        let mut d = WeightedNearest::new(0);
        d.insert(site(1, 1, 0, 0)).unwrap();
        d.insert(site(5, 1, 3, 1)).unwrap();
        // from (2,1): 1 - 0 vs 3 - 3
        let a = d.query_min(GridPoint::new(2, 1)).unwrap();
        assert_eq!(a.id, 1);
        assert_eq!(a.value.to_f64(), 0.0);
        d.delete(1).unwrap();
        assert_eq!(d.query_min(GridPoint::new(2, 1)).unwrap().id, 0);
        assert!(d.delete(1).is_err());
        assert!(d.insert(site(1, 2, 0, 0)).is_err());
    }

    #[test]
    fn ties_prefer_small_id() {
        let mut d = WeightedNearest::new(3);
        d.insert(site(3, 2, 0, 7)).unwrap();
        d.insert(site(1, 2, 0, 4)).unwrap();
        assert_eq!(d.query_min(GridPoint::new(2, 2)).unwrap().id, 4);
    }

    /// Weights within a few units of `√s·2^t` at large `t`: every value is
    /// tiny and the float pass must keep all near-ties.
    #[test]
    fn near_ties_at_large_exponent() {
        use crate::exact::ceil_sqrt_scaled;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for t in [40i64, 120, 330] {
            for _ in 0..50 {
                let q = GridPoint::new(rng.random_range(1..=1024), rng.random_range(1..=1024));
                let mut d = WeightedNearest::new(t);
                let mut sites = Vec::new();
                for i in 0..12 {
                    let p = GridPoint::new(rng.random_range(1..=1024), rng.random_range(1..=1024));
                    let base = BigInt::from(ceil_sqrt_scaled(dist2(p, q), t));
                    let w = base + rng.random_range(-3i64..=3);
                    let s = WeightedSite { point: p, weight: w, id: i };
                    d.insert(s.clone()).unwrap();
                    sites.push(s);
                }
                let got = d.query_min(q).unwrap();
                for s in &sites {
                    let c = cmp_root(&got.value, &d.value_of(q, s));
                    assert!(c == Ordering::Less || (c == Ordering::Equal && got.id <= s.id));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn grid_agrees_with_linear_scan(
            ops in prop::collection::vec((0i64..40, 0i64..40, -60i64..60, any::<bool>()), 1..80),
            queries in prop::collection::vec((-5i64..45, -5i64..45), 1..8),
            t in -1i64..4,
            expected in 1usize..200,
        ) {
            // Extent 32 while points range over [0, 40): some sites fall outside.
            let mut grid = WeightedNearest::with_grid(t, Rc::new(ScaledRoots::new()), 32, expected);
            let mut flat = WeightedNearest::new(t);
            for (i, &(x, y, w, del)) in ops.iter().enumerate() {
                if del && !flat.is_empty() {
                    let id = *flat.sites.keys().nth(i % flat.len()).unwrap();
                    prop_assert_eq!(grid.delete(id).unwrap(), flat.delete(id).unwrap());
                } else {
                    grid.insert(site(x, y, w, i)).unwrap();
                    flat.insert(site(x, y, w, i)).unwrap();
                }
                for &(qx, qy) in &queries {
                    let q = GridPoint::new(qx, qy);
                    prop_assert_eq!(grid.query_min(q), flat.query_min(q));
                }
            }
        }

        #[test]
        fn matches_exhaustive_scan(sites in prop::collection::vec((1i64..12, 1i64..12, -20i64..20), 1..20),
                                   qx in 1i64..12, qy in 1i64..12, t in -2i64..6) {
            let mut d = WeightedNearest::new(t);
            for (i, &(x, y, w)) in sites.iter().enumerate() {
                d.insert(site(x, y, w, i)).unwrap();
            }
            let q = GridPoint::new(qx, qy);
            let got = d.query_min(q).unwrap();
            let vals: Vec<RootExpr> = sites.iter().enumerate()
                .map(|(i, &(x, y, w))| d.value_of(q, &site(x, y, w, i))).collect();
            for (i, v) in vals.iter().enumerate() {
                let c = cmp_root(&got.value, v);
                prop_assert!(c == Ordering::Less || (c == Ordering::Equal && got.id <= i));
            }
            let ceil_f: f64 = got.ceil.to_string().parse().unwrap();
            prop_assert!(ceil_f >= got.value.to_f64() - 1e-9 && ceil_f < got.value.to_f64() + 1.0 + 1e-9);
        }
    }
}
