//! One-dimensional bichromatic matching with per-point penalties.
//!
//! Points on a line are either matched to an opposite-colored point at cost
//! equal to their distance or left unmatched at their own penalty.  The sweep
//! runs in `O(n log n)` using [`CostProfile`]; a witness is recovered from the
//! recorded sweep decisions without storing the profiles.

mod profile;
mod tree;

pub use profile::{CostProfile, SweepDecision};
pub use tree::OrderStatTree;

use crate::debug;
use crate::error::{Error, Result};
use crate::geom::Color;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Penalty<S> {
    Finite(S),
    /// The point must be matched.
    Forced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinePoint<S> {
    pub position: S,
    pub color: Color,
    pub penalty: Penalty<S>,
}

impl<S> LinePoint<S> {
    pub fn new(position: S, color: Color, penalty: S) -> Self {
        LinePoint { position, color, penalty: Penalty::Finite(penalty) }
    }

    pub fn forced(position: S, color: Color) -> Self {
        LinePoint { position, color, penalty: Penalty::Forced }
    }
}

/// Optimal cost and a witness.  `pairs` holds `(red, blue)` input indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PenaltySolution<S> {
    pub cost: S,
    pub pairs: Vec<(usize, usize)>,
    pub free: Vec<usize>,
}

/// Recomputes the cost of a witness directly.
pub fn witness_cost<S: Scalar>(points: &[LinePoint<S>], sol: &PenaltySolution<S>) -> Option<S> {
    let mut c = S::zero();
    for &(r, b) in &sol.pairs {
        let (x, y) = (&points[r].position, &points[b].position);
        c = c + if x <= y { y.clone() - x.clone() } else { x.clone() - y.clone() };
    }
    for &v in &sol.free {
        match &points[v].penalty {
            Penalty::Finite(w) => c = c + w.clone(),
            Penalty::Forced => return None,
        }
    }
    Some(c)
}

/// Solves an instance without forced points.
pub fn solve<S: Scalar>(points: &[LinePoint<S>]) -> Result<PenaltySolution<S>> {
    if points.iter().any(|p| p.penalty == Penalty::Forced) {
        return Err(Error::InvalidInput(
            "forced points need solve_with_forced".into(),
        ));
    }
    solve_with_forced(points)?.ok_or(Error::Infeasible)
}

/// Solves an instance in which some points may be [`Penalty::Forced`].
/// Returns `Ok(None)` when no feasible matching exists.
pub fn solve_with_forced<S: Scalar>(points: &[LinePoint<S>]) -> Result<Option<PenaltySolution<S>>> {
    for w in points.windows(2) {
        if w[1].position < w[0].position {
            return Err(Error::InvalidInput("points are not sorted by position".into()));
        }
    }
    for p in points {
        if let Penalty::Finite(w) = &p.penalty {
            if *w < S::zero() {
                return Err(Error::InvalidInput("negative penalty".into()));
            }
        }
    }
    if points.is_empty() {
        return Ok(Some(PenaltySolution { cost: S::zero(), pairs: vec![], free: vec![] }));
    }

    // Blue before red at equal positions; any order is correct, this one is fixed.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .position
            .cmp(&points[b].position)
            .then_with(|| (points[a].color == Color::Red).cmp(&(points[b].color == Color::Red)))
            .then(a.cmp(&b))
    });

    // A forced point gets a finite penalty larger than any matching can cost.
    let has_forced = points.iter().any(|p| p.penalty == Penalty::Forced);
    let big_m = if has_forced {
        let span = points[points.len() - 1].position.clone() - points[0].position.clone();
        let mut m = span.mul_int(points.len() as i64) + S::one();
        for p in points {
            if let Penalty::Finite(w) = &p.penalty {
                m = m + w.clone();
            }
        }
        Some(m)
    } else {
        None
    };

    let check = debug::enabled();
    let mut profile = CostProfile::<S>::new();
    let mut decisions = Vec::with_capacity(points.len());
    let mut prev = points[order[0]].position.clone();
    for &i in &order {
        let p = &points[i];
        let d = p.position.clone() - prev;
        prev = p.position.clone();
        let w = match &p.penalty {
            Penalty::Finite(w) => w.clone(),
            Penalty::Forced => big_m.clone().expect("big-M set when forced points exist"),
        };
        decisions.push(profile.advance(d, p.color, w)?);
        if check && !profile.is_convex() {
            return Err(Error::invariant("cost profile lost convexity"));
        }
    }
    let cost = profile.query(0).ok_or_else(|| Error::invariant("F(0) undefined"))?;
    if let Some(m) = &big_m {
        if cost >= *m {
            return Ok(None);
        }
    }

    // Reverse pass: recover k before each point.
    let mut k = 0i64;
    let mut matched_from = vec![None; order.len()];
    for (step, dec) in decisions.iter().enumerate().rev() {
        let prev_k = match dec.color {
            Color::Red if k > dec.threshold => Some(k - 1),
            Color::Blue if k < dec.threshold => Some(k + 1),
            _ => None,
        };
        if let Some(pk) = prev_k {
            matched_from[step] = Some(pk);
            k = pk;
        }
    }
    if k != 0 {
        return Err(Error::invariant("witness trajectory does not start at 0"));
    }

    // Forward pass: parked partners are resolved last-in first-out.
    let mut open_red = Vec::new();
    let mut open_blue = Vec::new();
    let mut pairs = Vec::new();
    let mut free = Vec::new();
    for (step, &i) in order.iter().enumerate() {
        match (points[i].color, matched_from[step]) {
            (_, None) => free.push(i),
            (Color::Red, Some(pk)) if pk >= 0 => open_red.push(i),
            (Color::Red, Some(_)) => {
                let b = open_blue.pop().ok_or_else(|| Error::invariant("no parked blue"))?;
                pairs.push((i, b));
            }
            (Color::Blue, Some(pk)) if pk > 0 => {
                let r = open_red.pop().ok_or_else(|| Error::invariant("no parked red"))?;
                pairs.push((r, i));
            }
            (Color::Blue, Some(_)) => open_blue.push(i),
        }
    }
    if !open_red.is_empty() || !open_blue.is_empty() {
        return Err(Error::invariant("unresolved parked partners"));
    }
    pairs.sort_unstable();
    free.sort_unstable();
    let sol = PenaltySolution { cost, pairs, free };
    if check && witness_cost(points, &sol).as_ref() != Some(&sol.cost) {
        return Err(Error::invariant("witness cost differs from profile value"));
    }
    Ok(Some(sol))
}
