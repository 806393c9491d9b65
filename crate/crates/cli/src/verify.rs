use manymatch_core::oracle::edge_cover_opt;
use manymatch_core::prism::cover_cost;
use manymatch_core::report::decimal_sum_sqrt;
use manymatch_core::{EdgeCover, Error, Instance};

use crate::io::ResultRecord;
use crate::solve::ORACLE_LIMIT;

#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub failures: usize,
}

impl Report {
    fn line(&mut self, ok: bool, msg: String) {
        self.failures += usize::from(!ok);
        self.lines.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Digits in a decimal string, ignoring sign and point.
fn significant_digits(s: &str) -> usize {
    s.trim_start_matches(['0', '.']).chars().filter(|c| c.is_ascii_digit()).count()
}

pub fn verify(inst: &Instance, rec: &ResultRecord) -> Report {
    let mut rep = Report::default();
    let cover = EdgeCover { edges: rec.edges.iter().map(|&[r, b]| (r, b)).collect() };
    if let Err(e) = cover.validate(inst) {
        let msg = match e {
            Error::Uncovered { color, index } => format!("{color:?} point {index} is not covered"),
            other => other.to_string(),
        };
        rep.line(false, format!("coverage: {msg}"));
        return rep;
    }
    rep.line(true, format!("coverage: {} edges touch all {} points", cover.edges.len(), inst.n()));

    let recomputed = cover.squared_lengths(inst);
    rep.line(
        recomputed == rec.squared_lengths,
        format!("squared lengths: {} terms recomputed from the edges", recomputed.len()),
    );

    // Trailing zeros are trimmed, so rounding at the stated length reproduces it.
    let digits = significant_digits(&rec.cost).max(1);
    let decimal = decimal_sum_sqrt(&recomputed, digits);
    rep.line(decimal == rec.cost, format!("cost: stated {} recomputed {decimal}", rec.cost));

    if inst.n() <= ORACLE_LIMIT {
        match edge_cover_opt(inst, ORACLE_LIMIT) {
            Ok((_, opt)) => {
                let ours = cover_cost(inst, &cover, digits).expect("validated above");
                let ok = match rec.mode.as_str() {
                    "exact" | "oracle" => ours.same_cost(&opt),
                    "approx" => {
                        let eps = rec.epsilon.unwrap_or(0.0);
                        ours.to_f64() <= opt.to_f64() + eps + 1e-9 * opt.to_f64().max(1.0)
                    }
                    _ => ours.exact.cmp_exact(&opt.exact.scaled(2)).is_le(),
                };
                rep.line(ok, format!("oracle: optimum {} ({} mode)", opt.decimal, rec.mode));
            }
            Err(e) => rep.line(false, format!("oracle: {e}")),
        }
    } else {
        rep.lines.push(format!("skip oracle comparison (n = {} > {ORACLE_LIMIT})", inst.n()));
    }
    rep
}
