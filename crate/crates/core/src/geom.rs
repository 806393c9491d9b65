//! Grid points, instances and exact integer predicates.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_integer::Integer;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }
}

impl From<(i64, i64)> for GridPoint {
    fn from((x, y): (i64, i64)) -> Self {
        GridPoint { x, y }
    }
}

/// Squared Euclidean distance.
pub fn dist2(p: GridPoint, q: GridPoint) -> u64 {
    let dx = (p.x - q.x).unsigned_abs();
    let dy = (p.y - q.y).unsigned_abs();
    dx * dx + dy * dy
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// Largest grid side we accept; keeps squared distances and line keys in `i64`.
pub const MAX_DELTA: i64 = 1 << 30;

/// A red/blue point set on `[Δ]²`.
///
/// Points carry *original ids*: red `i` is id `i`, blue `j` is id `n_red + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    delta: i64,
    red: Vec<GridPoint>,
    blue: Vec<GridPoint>,
}

impl Instance {
    pub fn new(delta: i64, red: Vec<GridPoint>, blue: Vec<GridPoint>) -> Result<Self> {
        if !(1..=MAX_DELTA).contains(&delta) {
            return Err(Error::InvalidInstance(format!(
                "delta must lie in [1, {MAX_DELTA}], got {delta}"
            )));
        }
        if red.is_empty() || blue.is_empty() {
            return Err(Error::InvalidInstance(
                "both color classes must be non-empty".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(red.len() + blue.len());
        for p in red.iter().chain(blue.iter()) {
            if p.x < 1 || p.x > delta || p.y < 1 || p.y > delta {
                return Err(Error::InvalidInstance(format!(
                    "point ({}, {}) outside [1, {delta}]^2",
                    p.x, p.y
                )));
            }
            if !seen.insert(*p) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate point ({}, {})",
                    p.x, p.y
                )));
            }
        }
        Ok(Instance { delta, red, blue })
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn red(&self) -> &[GridPoint] {
        &self.red
    }

    pub fn blue(&self) -> &[GridPoint] {
        &self.blue
    }

    pub fn n(&self) -> usize {
        self.red.len() + self.blue.len()
    }

    pub fn n_red(&self) -> usize {
        self.red.len()
    }

    pub fn n_blue(&self) -> usize {
        self.blue.len()
    }

    pub fn point(&self, v: usize) -> GridPoint {
        if v < self.red.len() {
            self.red[v]
        } else {
            self.blue[v - self.red.len()]
        }
    }

    pub fn color(&self, v: usize) -> Color {
        if v < self.red.len() {
            Color::Red
        } else {
            Color::Blue
        }
    }

    pub fn red_id(&self, i: usize) -> usize {
        i
    }

    pub fn blue_id(&self, j: usize) -> usize {
        self.red.len() + j
    }

    /// Inverse of `red_id` / `blue_id`.
    pub fn local_index(&self, v: usize) -> (Color, usize) {
        if v < self.red.len() {
            (Color::Red, v)
        } else {
            (Color::Blue, v - self.red.len())
        }
    }

    pub fn ids(&self) -> std::ops::Range<usize> {
        0..self.n()
    }
}

/// Sign of the cross product `(q - p) × (r - p)`: +1 left turn, -1 right turn, 0 collinear.
pub fn orientation(p: GridPoint, q: GridPoint, r: GridPoint) -> i32 {
    let ax = (q.x - p.x) as i128;
    let ay = (q.y - p.y) as i128;
    let bx = (r.x - p.x) as i128;
    let by = (r.y - p.y) as i128;
    match (ax * by - ay * bx).cmp(&0) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// `r` collinear with `p,q` lies within their bounding box.
fn within_box(p: GridPoint, q: GridPoint, r: GridPoint) -> bool {
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

/// True iff the closed segments intersect, their four endpoints are pairwise
/// distinct and not all collinear.
pub fn segments_properly_cross(s1: (GridPoint, GridPoint), s2: (GridPoint, GridPoint)) -> bool {
    let (p1, p2) = s1;
    let (p3, p4) = s2;
    if p1 == p3 || p1 == p4 || p2 == p3 || p2 == p4 {
        return false;
    }
    let o1 = orientation(p1, p2, p3);
    let o2 = orientation(p1, p2, p4);
    let o3 = orientation(p3, p4, p1);
    let o4 = orientation(p3, p4, p2);
    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        return false;
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_box(p1, p2, p3))
        || (o2 == 0 && within_box(p1, p2, p4))
        || (o3 == 0 && within_box(p3, p4, p1))
        || (o4 == 0 && within_box(p3, p4, p2))
}

/// `r` lies on the closed segment `pq`.
pub fn on_segment(p: GridPoint, q: GridPoint, r: GridPoint) -> bool {
    orientation(p, q, r) == 0 && within_box(p, q, r)
}

/// Canonical identifier of the lattice line through two distinct points.
///
/// `(dx, dy)` is the primitive direction with `dx > 0`, or `dx == 0, dy == 1`.
/// The anchor is the unique lattice point on the line with `0 <= x < dx`
/// (or `y == 0` for vertical lines).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineKey {
    pub dx: i64,
    pub dy: i64,
    pub ax: i64,
    pub ay: i64,
}

impl LineKey {
    /// Integer coordinate of a lattice point of this line along the direction.
    pub fn param(&self, p: GridPoint) -> i64 {
        if self.dx > 0 {
            (p.x - self.ax) / self.dx
        } else {
            p.y - self.ay
        }
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        if self.dx > 0 {
            let k = p.x - self.ax;
            k.rem_euclid(self.dx) == 0 && p.y == self.ay + (k / self.dx) * self.dy
        } else {
            p.x == self.ax
        }
    }

    pub fn at(&self, k: i64) -> GridPoint {
        GridPoint::new(self.ax + k * self.dx, self.ay + k * self.dy)
    }

    /// Squared Euclidean length of one lattice step.
    pub fn step2(&self) -> u64 {
        (self.dx * self.dx + self.dy * self.dy) as u64
    }
}

pub fn line_key(p: GridPoint, q: GridPoint) -> LineKey {
    assert!(p != q, "line_key needs two distinct points");
    let mut dx = q.x - p.x;
    let mut dy = q.y - p.y;
    let g = dx.abs().gcd(&dy.abs());
    dx /= g;
    dy /= g;
    if dx < 0 || (dx == 0 && dy < 0) {
        dx = -dx;
        dy = -dy;
    }
    if dx > 0 {
        let ax = p.x.rem_euclid(dx);
        let k = (p.x - ax) / dx;
        LineKey { dx, dy, ax, ay: p.y - k * dy }
    } else {
        LineKey { dx, dy, ax: p.x, ay: 0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gp(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn dist2_examples() {
        assert_eq!(dist2(gp(1, 1), gp(4, 5)), 25);
        assert_eq!(dist2(gp(2, 2), gp(2, 2)), 0);
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(gp(1, 1), gp(3, 1), gp(2, 2)), 1);
        assert_eq!(orientation(gp(1, 1), gp(3, 1), gp(2, 1)), 0);
        assert_eq!(orientation(gp(1, 1), gp(3, 1), gp(2, 0)), -1);
    }

    #[test]
    fn crossing_examples() {
        assert!(segments_properly_cross((gp(1, 1), gp(3, 3)), (gp(1, 3), gp(3, 1))));
        assert!(!segments_properly_cross((gp(1, 1), gp(2, 2)), (gp(3, 3), gp(4, 4))));
        assert!(!segments_properly_cross((gp(1, 1), gp(4, 4)), (gp(2, 2), gp(3, 3))));
        // T-junction: an endpoint touching the other segment's interior.
        assert!(segments_properly_cross((gp(1, 1), gp(3, 1)), (gp(2, 1), gp(2, 3))));
        // shared endpoint
        assert!(!segments_properly_cross((gp(1, 1), gp(3, 1)), (gp(1, 1), gp(2, 3))));
        assert!(!segments_properly_cross((gp(1, 1), gp(2, 1)), (gp(3, 2), gp(4, 5))));
    }

    #[test]
    fn line_key_canonical() {
        let a = line_key(gp(1, 1), gp(3, 3));
        let b = line_key(gp(5, 5), gp(2, 2));
        assert_eq!(a, b);
        assert_eq!((a.dx, a.dy, a.ax, a.ay), (1, 1, 0, 0));
        let v = line_key(gp(4, 7), gp(4, 2));
        assert_eq!((v.dx, v.dy, v.ax, v.ay), (0, 1, 4, 0));
        let s = line_key(gp(1, 2), gp(5, 4));
        assert_eq!((s.dx, s.dy), (2, 1));
        assert!(s.contains(gp(3, 3)));
        assert!(!s.contains(gp(2, 2)));
        assert_eq!(s.at(s.param(gp(5, 4))), gp(5, 4));
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(4, vec![gp(1, 1)], vec![gp(2, 2)]).is_ok());
        assert!(Instance::new(4, vec![], vec![gp(2, 2)]).is_err());
        assert!(Instance::new(4, vec![gp(1, 1)], vec![gp(5, 2)]).is_err());
        assert!(Instance::new(4, vec![gp(1, 1)], vec![gp(1, 1)]).is_err());
        let inst = Instance::new(4, vec![gp(1, 1), gp(1, 2)], vec![gp(2, 2)]).unwrap();
        assert_eq!(inst.blue_id(0), 2);
        assert_eq!(inst.local_index(2), (Color::Blue, 0));
        assert_eq!(inst.point(2), gp(2, 2));
    }

    fn pt() -> impl Strategy<Value = GridPoint> {
        (1i64..=12, 1i64..=12).prop_map(|(x, y)| gp(x, y))
    }

    proptest! {
        #[test]
        fn line_key_is_line_invariant(p in pt(), q in pt(), k in -5i64..5) {
            prop_assume!(p != q);
            let key = line_key(p, q);
            let r = key.at(key.param(p) + k);
            prop_assert!(key.contains(r));
            if r != p {
                prop_assert_eq!(line_key(p, r), key);
            }
            prop_assert_eq!(line_key(q, p), key);
        }

        #[test]
        fn crossing_is_symmetric(a in pt(), b in pt(), c in pt(), d in pt()) {
            prop_assume!(a != b && c != d);
            let x = segments_properly_cross((a, b), (c, d));
            prop_assert_eq!(x, segments_properly_cross((c, d), (a, b)));
            prop_assert_eq!(x, segments_properly_cross((b, a), (d, c)));
        }

        #[test]
        fn orientation_antisymmetric(a in pt(), b in pt(), c in pt()) {
            prop_assert_eq!(orientation(a, b, c), -orientation(b, a, c));
            prop_assert_eq!(orientation(a, b, c), orientation(b, c, a));
        }
    }
}
