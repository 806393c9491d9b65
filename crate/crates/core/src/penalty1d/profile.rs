//! Convex cost profile for the left-to-right sweep.
//!
//! `F(k)` is the cheapest way to handle every point seen so far while leaving
//! `k` blue (k > 0) or `-k` red (k < 0) virtual partners parked at the sweep
//! position.  `F` is convex on its domain `[L, R]`, so we store `F(0)` and the
//! sorted first differences `ΔF(k) = F(k) - F(k-1)`, split at zero:
//! `minus` holds indices `L+1..=0`, `plus` holds `1..=R`.  Stored values are
//! shifted by a lazy per-tree offset so that moving the sweep is O(1).

use crate::error::{Error, Result};
use crate::geom::Color;
use crate::scalar::Scalar;

use super::tree::OrderStatTree;

/// Where the sweep switched between "pay the penalty" and "match".
///
/// For a red point `threshold` is `k*`: keep penalty for `k <= k*`.  For a
/// blue point it is `k**`: match for `k < k**`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepDecision {
    pub color: Color,
    pub threshold: i64,
}

#[derive(Clone, Debug)]
pub struct CostProfile<S> {
    f0: S,
    o_plus: S,
    o_minus: S,
    plus: OrderStatTree<S>,
    minus: OrderStatTree<S>,
}

impl<S: Scalar> Default for CostProfile<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> CostProfile<S> {
    pub fn new() -> Self {
        CostProfile {
            f0: S::zero(),
            o_plus: S::zero(),
            o_minus: S::zero(),
            plus: OrderStatTree::with_seed(1),
            minus: OrderStatTree::with_seed(2),
        }
    }

    pub fn lo(&self) -> i64 {
        -(self.minus.len() as i64)
    }

    pub fn hi(&self) -> i64 {
        self.plus.len() as i64
    }

    /// Number of stored differences; grows by exactly one per point.
    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `F(k)`, or `None` outside the domain.
    pub fn query(&self, k: i64) -> Option<S> {
        if k < self.lo() || k > self.hi() {
            return None;
        }
        if k >= 0 {
            let k = k as usize;
            Some(self.f0.clone() + self.plus.prefix_sum(k) + self.o_plus.mul_int(k as i64))
        } else {
            let m = (-k) as usize;
            Some(self.f0.clone() - (self.minus.suffix_sum(m) + self.o_minus.mul_int(m as i64)))
        }
    }

    /// The real first differences in index order `L+1..=R`.
    pub fn differences(&self) -> Vec<S> {
        let mut out: Vec<S> = self
            .minus
            .to_vec()
            .into_iter()
            .map(|v| v + self.o_minus.clone())
            .collect();
        out.extend(self.plus.to_vec().into_iter().map(|v| v + self.o_plus.clone()));
        out
    }

    pub fn is_convex(&self) -> bool {
        self.differences().windows(2).all(|w| w[0] <= w[1])
    }

    /// Moves the sweep right by `d` and absorbs a point of `color` with penalty `w`.
    pub fn advance(&mut self, d: S, color: Color, w: S) -> Result<SweepDecision> {
        if d < S::zero() {
            return Err(Error::InvalidInput("sweep moved left".into()));
        }
        if w < S::zero() {
            return Err(Error::InvalidInput("negative penalty".into()));
        }
        // Parked partners travel with the sweep: f(k) = F(k) + |k|·d.
        self.o_plus = self.o_plus.clone() + d.clone();
        self.o_minus = self.o_minus.clone() - d;
        let lo = self.lo();
        let threshold = match color {
            Color::Red => {
                let thr = -w.clone();
                let c = self.minus.count_le(&(thr.clone() - self.o_minus.clone()))
                    + self.plus.count_le(&(thr.clone() - self.o_plus.clone()));
                let k_star = lo + c as i64;
                let penalty = self.f0.clone() + w.clone();
                let new_f0 = match self.query(-1) {
                    Some(f) if f < penalty => f,
                    _ => penalty,
                };
                let idx = k_star + 1;
                if idx <= 0 {
                    self.minus.insert_at(c, thr - self.o_minus.clone());
                    let moved = self.minus.pop_last().expect("minus tree is non-empty");
                    self.plus
                        .push_front(moved + self.o_minus.clone() - self.o_plus.clone());
                } else {
                    self.plus.insert_at((idx - 1) as usize, thr - self.o_plus.clone());
                }
                self.f0 = new_f0;
                k_star
            }
            Color::Blue => {
                let c = self.minus.count_lt(&(w.clone() - self.o_minus.clone()))
                    + self.plus.count_lt(&(w.clone() - self.o_plus.clone()));
                let k_ss = lo + c as i64;
                let penalty = self.f0.clone() + w.clone();
                let new_f0 = match self.query(1) {
                    Some(f) if f < penalty => f,
                    _ => penalty,
                };
                if k_ss <= 0 {
                    self.minus.insert_at(c, w - self.o_minus.clone());
                } else {
                    let moved = self.plus.pop_first().expect("plus tree is non-empty");
                    self.minus
                        .push_back(moved + self.o_plus.clone() - self.o_minus.clone());
                    self.plus.insert_at((k_ss - 1) as usize, w - self.o_plus.clone());
                }
                self.f0 = new_f0;
                k_ss
            }
        };
        Ok(SweepDecision { color, threshold })
    }
}
