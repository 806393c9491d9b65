//! Exact arithmetic on expressions involving square roots of integers.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

/// `a + b·√s` with `b >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootExpr {
    pub a: BigInt,
    pub b: BigInt,
    pub s: u64,
}

impl RootExpr {
    pub fn new(a: BigInt, b: BigInt, s: u64) -> Self {
        assert!(!b.is_negative(), "RootExpr coefficient of the root must be >= 0");
        RootExpr { a, b, s }
    }

    pub fn int(a: impl Into<BigInt>) -> Self {
        RootExpr { a: a.into(), b: BigInt::zero(), s: 0 }
    }

    /// `√s`.
    pub fn sqrt(s: u64) -> Self {
        RootExpr { a: BigInt::zero(), b: BigInt::one(), s }
    }

    pub fn to_f64(&self) -> f64 {
        let a: f64 = self.a.to_string().parse().unwrap_or(f64::NAN);
        let b: f64 = self.b.to_string().parse().unwrap_or(f64::NAN);
        a + b * (self.s as f64).sqrt()
    }
}

fn sign_ord(x: &BigInt) -> Ordering {
    match x.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Exact comparison of `a1 + b1√s1` against `a2 + b2√s2`.
pub fn cmp_root(lhs: &RootExpr, rhs: &RootExpr) -> Ordering {
    // lhs - rhs = X + (P - Q), X = a1 - a2, P = b1√s1, Q = b2√s2.
    let x = &lhs.a - &rhs.a;
    let p2 = &lhs.b * &lhs.b * BigInt::from(lhs.s);
    let q2 = &rhs.b * &rhs.b * BigInt::from(rhs.s);
    let spq = p2.cmp(&q2);
    let sx = sign_ord(&x);
    if sx == Ordering::Equal {
        return spq;
    }
    if spq == Ordering::Equal || spq == sx {
        return sx;
    }
    // Opposite signs: compare |X| with |P - Q|.  X² vs P² + Q² - 2PQ.
    let t = &p2 + &q2 - &x * &x;
    let abs_cmp = if t.is_negative() {
        Ordering::Greater
    } else {
        let four_p2q2: BigInt = (&p2 * &q2) << 2u32;
        four_p2q2.cmp(&(&t * &t))
    };
    match abs_cmp {
        Ordering::Greater => sx,
        Ordering::Less => spq,
        Ordering::Equal => Ordering::Equal,
    }
}

pub fn floor_sqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

pub fn ceil_sqrt(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    (n - 1u32).sqrt() + 1u32
}

/// `⌈√s · 2^k⌉` for any integer `k`.
pub fn ceil_sqrt_scaled(s: u64, k: i64) -> BigUint {
    if k >= 0 {
        ceil_sqrt(&(BigUint::from(s) << (2 * k as u64)))
    } else {
        // ⌈⌈√s⌉ / 2^-k⌉
        let c = ceil_sqrt(&BigUint::from(s));
        let shift = (-k) as u64;
        let q = &c >> shift;
        if (&q << shift) == c {
            q
        } else {
            q + 1u32
        }
    }
}

#[derive(Debug)]
struct RootState {
    t: i64,
    ceil: BigInt,
    /// `⌊√(s·4^t)⌋` and `s·4^t - floor²`, kept for `t >= 0` only.
    floor: Option<(BigUint, BigUint)>,
}

/// Memo of `⌈√s · 2^t⌉` that follows `t` upward cheaply: going from `t` to
/// `t + 1` the floor root doubles and gains at most one.
#[derive(Debug, Default)]
pub struct ScaledRoots {
    cache: RefCell<FxHashMap<u64, RootState>>,
}

/// Steps beyond which a fresh square root beats stepping.
const MAX_STEPS: i64 = 64;

impl ScaledRoots {
    pub fn new() -> Self {
        ScaledRoots::default()
    }

    fn fresh(s: u64, t: i64) -> RootState {
        if t < 0 {
            return RootState { t, ceil: BigInt::from(ceil_sqrt_scaled(s, t)), floor: None };
        }
        let n = BigUint::from(s) << (2 * t as u64);
        let r = n.sqrt();
        let rem = n - &r * &r;
        let ceil = BigInt::from(if rem.is_zero() { r.clone() } else { &r + 1u32 });
        RootState { t, ceil, floor: Some((r, rem)) }
    }

    /// `⌈√s · 2^t⌉`.
    pub fn ceil(&self, s: u64, t: i64) -> BigInt {
        let mut cache = self.cache.borrow_mut();
        let st = cache.entry(s).or_insert_with(|| ScaledRoots::fresh(s, t));
        if st.t == t {
            return st.ceil.clone();
        }
        match st.floor.as_mut() {
            Some((r, rem)) if t > st.t && t - st.t <= MAX_STEPS => {
                for _ in st.t..t {
                    // (2r + 1)² - (2r)² = 4r + 1
                    *rem <<= 2u32;
                    let gap: BigUint = (&*r << 2u32) + 1u32;
                    *r <<= 1u32;
                    if *rem >= gap {
                        *rem -= gap;
                        *r += 1u32;
                    }
                }
                st.t = t;
                st.ceil = BigInt::from(if rem.is_zero() { r.clone() } else { &*r + 1u32 });
            }
            _ => *st = ScaledRoots::fresh(s, t),
        }
        st.ceil.clone()
    }
}

/// Splits `s = f²·d` with `d` squarefree.
pub fn squarefree_split(s: u64) -> (u64, u64) {
    if s == 0 {
        return (0, 1);
    }
    let mut f = 1u64;
    let mut d = 1u64;
    let mut rest = s;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            f *= p;
        }
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    d *= rest;
    (f, d)
}

/// A finite sum `Σ c_d √d + num / 2^exp` in canonical form.
///
/// Keys are squarefree radicands greater than one; square roots of distinct
/// squarefree integers are linearly independent over the rationals, so two
/// sums are equal exactly when their canonical forms are.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadicalSum {
    radicals: BTreeMap<u64, BigInt>,
    num: BigInt,
    exp: u32,
}

impl RadicalSum {
    pub fn zero() -> Self {
        RadicalSum::default()
    }

    /// `Σ √s` over the given radicands.
    pub fn from_sqrts<I: IntoIterator<Item = u64>>(terms: I) -> Self {
        let mut out = RadicalSum::zero();
        for s in terms {
            out.add_sqrt(s, &BigInt::one());
        }
        out
    }

    /// Adds `coeff · √s`.
    pub fn add_sqrt(&mut self, s: u64, coeff: &BigInt) {
        let (f, d) = squarefree_split(s);
        if f == 0 {
            return;
        }
        let c = coeff * BigInt::from(f);
        if d == 1 {
            self.add_dyadic(c, 0);
            return;
        }
        let slot = self.radicals.entry(d).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.radicals.remove(&d);
        }
    }

    /// Adds `num / 2^exp`.
    pub fn add_dyadic(&mut self, num: BigInt, exp: u32) {
        let e = self.exp.max(exp);
        let lhs = std::mem::take(&mut self.num) << (e - self.exp);
        self.num = lhs + (num << (e - exp));
        self.exp = e;
        self.normalize();
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && !self.num.bit(0) {
            self.num >>= 1;
            self.exp -= 1;
        }
    }

    pub fn scaled(&self, k: i64) -> RadicalSum {
        let k = BigInt::from(k);
        let mut out = RadicalSum {
            radicals: self
                .radicals
                .iter()
                .map(|(d, c)| (*d, c * &k))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            num: &self.num * &k,
            exp: self.exp,
        };
        out.normalize();
        out
    }

    pub fn add(&self, other: &RadicalSum) -> RadicalSum {
        let mut out = self.clone();
        for (d, c) in &other.radicals {
            let slot = out.radicals.entry(*d).or_insert_with(BigInt::zero);
            *slot += c;
            if slot.is_zero() {
                out.radicals.remove(d);
            }
        }
        out.add_dyadic(other.num.clone(), other.exp);
        out
    }

    pub fn sub(&self, other: &RadicalSum) -> RadicalSum {
        self.add(&other.scaled(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.radicals.is_empty() && self.num.is_zero()
    }

    pub fn radicals(&self) -> &BTreeMap<u64, BigInt> {
        &self.radicals
    }

    /// Bounds `lo <= value · 2^bits <= hi`.
    pub fn bounds(&self, bits: u32) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (d, c) in &self.radicals {
            let fl = BigInt::from(floor_sqrt(&(BigUint::from(*d) << (2 * bits as u64))));
            let ce = &fl + 1;
            if c.is_positive() {
                lo += c * &fl;
                hi += c * &ce;
            } else {
                lo += c * &ce;
                hi += c * &fl;
            }
        }
        if bits >= self.exp {
            let r = &self.num << (bits - self.exp);
            lo += &r;
            hi += &r;
        } else {
            let shift = self.exp - bits;
            let fl = num_integer::Integer::div_floor(&self.num, &(BigInt::one() << shift));
            lo += &fl;
            hi += fl + 1;
        }
        (lo, hi)
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.radicals.is_empty() {
            return sign_ord(&self.num);
        }
        let mut bits = 64u32;
        loop {
            let (lo, hi) = self.bounds(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            assert!(bits < 1 << 20, "radical sum sign refinement did not terminate");
            bits *= 2;
        }
    }

    pub fn cmp_exact(&self, other: &RadicalSum) -> Ordering {
        self.sub(other).signum()
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = 0.0;
        for (d, c) in &self.radicals {
            let c: f64 = c.to_string().parse().unwrap_or(f64::NAN);
            v += c * (*d as f64).sqrt();
        }
        let num: f64 = self.num.to_string().parse().unwrap_or(f64::NAN);
        v + num / 2f64.powi(self.exp as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(a: i64, b: i64, s: u64) -> RootExpr {
        RootExpr::new(BigInt::from(a), BigInt::from(b), s)
    }

    #[test]
    fn cmp_root_examples() {
        assert_eq!(cmp_root(&re(0, 1, 2), &re(1, 0, 0)), Ordering::Greater);
        assert_eq!(cmp_root(&re(0, 1, 8), &re(0, 2, 2)), Ordering::Equal);
        assert_eq!(cmp_root(&re(1, 1, 2), &re(0, 1, 5)), Ordering::Greater);
        // 1 + √2 ≈ 2.414 < √6 ≈ 2.449
        assert_eq!(cmp_root(&re(1, 1, 2), &re(0, 1, 6)), Ordering::Less);
        assert_eq!(cmp_root(&re(-3, 1, 9), &re(0, 0, 0)), Ordering::Equal);
    }

    #[test]
    fn ceil_sqrt_scaled_examples() {
        assert_eq!(ceil_sqrt_scaled(2, 1), BigUint::from(3u32));
        assert_eq!(ceil_sqrt_scaled(4, 0), BigUint::from(2u32));
        assert_eq!(ceil_sqrt_scaled(4, -1), BigUint::from(1u32));
        assert_eq!(ceil_sqrt_scaled(5, -1), BigUint::from(2u32));
        assert_eq!(ceil_sqrt_scaled(0, 3), BigUint::from(0u32));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_split(8), (2, 2));
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(13), (1, 13));
        assert_eq!(squarefree_split(49), (7, 1));
    }

    #[test]
    fn radical_sum_equality() {
        let a = RadicalSum::from_sqrts([8, 1, 4]);
        let b = RadicalSum::from_sqrts([2, 2, 9]);
        assert_eq!(a, b);
        assert_eq!(a.cmp_exact(&b), Ordering::Equal);
        let c = RadicalSum::from_sqrts([5]);
        let d = RadicalSum::from_sqrts([1, 1]);
        assert_eq!(c.cmp_exact(&d), Ordering::Greater);
        let mut e = RadicalSum::from_sqrts([2]);
        e.add_dyadic(BigInt::from(-3), 1);
        assert_eq!(e.signum(), Ordering::Less);
    }

    fn f64_cmp(x: f64, y: f64) -> Option<Ordering> {
        if (x - y).abs() < 1e-9 * (1.0 + x.abs() + y.abs()) {
            None
        } else {
            x.partial_cmp(&y)
        }
    }

    #[test]
    fn scaled_roots_follow_any_schedule() {
        let roots = ScaledRoots::new();
        let schedule = [-12i64, -3, 0, 1, 2, 5, 6, 200, 201, 202, 7, 300, 301, 0, -1];
        for s in [1u64, 2, 3, 4, 12, 99, 1_046_529, 2_093_058, (1 << 61) - 1] {
            for &t in &schedule {
                assert_eq!(roots.ceil(s, t), BigInt::from(ceil_sqrt_scaled(s, t)), "s={s} t={t}");
            }
        }
    }

    proptest! {
        #[test]
        fn cmp_root_matches_float(a1 in -50i64..50, b1 in 0i64..20, s1 in 0u64..200,
                                  a2 in -50i64..50, b2 in 0i64..20, s2 in 0u64..200) {
            let l = re(a1, b1, s1);
            let r = re(a2, b2, s2);
            let got = cmp_root(&l, &r);
            prop_assert_eq!(got, cmp_root(&r, &l).reverse());
            if let Some(expect) = f64_cmp(l.to_f64(), r.to_f64()) {
                prop_assert_eq!(got, expect);
            }
        }

        #[test]
        fn cmp_root_detects_squares(a in -30i64..30, k in 0i64..30, b in 0i64..10) {
            // a + b√(k²) == a + b·k
            prop_assert_eq!(cmp_root(&re(a, b, (k * k) as u64), &re(a + b * k, 0, 0)), Ordering::Equal);
        }

        #[test]
        fn radical_sum_sign_matches_float(xs in prop::collection::vec(1u64..500, 0..8),
                                           ys in prop::collection::vec(1u64..500, 0..8)) {
            let a = RadicalSum::from_sqrts(xs.iter().copied());
            let b = RadicalSum::from_sqrts(ys.iter().copied());
            let got = a.cmp_exact(&b);
            prop_assert_eq!(got, b.cmp_exact(&a).reverse());
            if let Some(expect) = f64_cmp(a.to_f64(), b.to_f64()) {
                prop_assert_eq!(got, expect);
            }
        }

        #[test]
        fn ceil_sqrt_scaled_is_ceiling(s in 0u64..10_000, k in -4i64..8) {
            let c = ceil_sqrt_scaled(s, k);
            let x = (s as f64).sqrt() * 2f64.powi(k as i32);
            let cf: f64 = c.to_string().parse().unwrap();
            prop_assert!(cf >= x - 1e-9 && cf < x + 1.0 + 1e-9);
        }
    }
}
