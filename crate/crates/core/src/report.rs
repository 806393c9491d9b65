//! Exact cost summaries for sums of Euclidean lengths.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::exact::{floor_sqrt, RadicalSum};

pub const DEFAULT_DIGITS: usize = 64;

/// A cost `Σ √s` given by its multiset of squared lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    /// Sorted ascending.
    pub squared_lengths: Vec<u64>,
    pub exact: RadicalSum,
    pub decimal: String,
}

impl CostReport {
    pub fn from_terms(mut terms: Vec<u64>, digits: usize) -> CostReport {
        terms.sort_unstable();
        let exact = RadicalSum::from_sqrts(terms.iter().copied());
        let decimal = decimal_sum_sqrt(&terms, digits);
        CostReport { squared_lengths: terms, exact, decimal }
    }

    /// Equal total cost, decided exactly.
    pub fn same_cost(&self, other: &CostReport) -> bool {
        self.exact == other.exact
    }

    pub fn to_f64(&self) -> f64 {
        self.exact.to_f64()
    }
}

/// `Σ √s` rounded half-up to `digits` significant digits, trailing zeros trimmed.
pub fn decimal_sum_sqrt(terms: &[u64], digits: usize) -> String {
    let digits = digits.max(1);
    let guard = 8 + terms.len().to_string().len();
    let frac = digits + guard;
    let scale = BigUint::from(10u32).pow((2 * frac) as u32);
    let mut sum = BigUint::zero();
    for &s in terms {
        sum += floor_sqrt(&(BigUint::from(s) * &scale));
    }
    if sum.is_zero() {
        return "0".into();
    }
    let len = sum.to_string().len();
    if len > digits {
        let unit = BigUint::from(10u32).pow((len - digits) as u32);
        let mut q = &sum / &unit;
        let r = &sum % &unit;
        if r * 2u32 >= unit {
            q += BigUint::one();
        }
        sum = q * unit;
    }
    let s = sum.to_string();
    let (int_part, frac_part) = if s.len() > frac {
        (s[..s.len() - frac].to_string(), s[s.len() - frac..].to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat(frac - s.len()), s))
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        int_part
    } else {
        format!("{int_part}.{frac_part}")
    }
}
