//! Divide and conquer over planar separators of the segment skeleton.
//!
//! The skeleton has the piece endpoints as vertices and the pieces as edges.
//! A separator `X, Y, S` of the skeleton lifts to the prism: interior points
//! follow an endpoint in `X` (else `Y`, else `S`) and every point travels with
//! its mirror.  No candidate edge joins the lifted `X̃` and `Ỹ`, so the two
//! sides are solved independently; interior groups under `S̃` are solved on
//! their line, and the separator's skeleton points are inserted one by one.

mod matching;
mod planar;

pub use matching::{min_cost_max_card_dense, BipartiteGraph, InsertOutcome, MatchingState};
pub use planar::{part_size_ok, planar_separator, separator_size_ok, PlanarGraph, Separation};

use std::time::Instant;

use crate::debug;
use crate::eligibility::{local_points, CandidateEdges, EligibleDecomposition};
use crate::error::{Error, Result};
use crate::penalty1d;
use crate::prism::{PrismGraph, PrismMatching};

/// Largest skeleton solved without a further split.
pub const DEFAULT_BASE_CASE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DncOptions {
    pub base_case: usize,
}

impl Default for DncOptions {
    fn default() -> Self {
        DncOptions { base_case: DEFAULT_BASE_CASE }
    }
}

/// One separator call on a skeleton of `n_h` vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparatorCall {
    pub depth: usize,
    pub n_h: usize,
    pub x: usize,
    pub y: usize,
    pub s: usize,
    /// Prism vertices on each lifted side.
    pub lifted: [usize; 3],
}

#[derive(Clone, Debug, Default)]
pub struct DncStats {
    pub calls: Vec<SeparatorCall>,
    pub base_cases: usize,
    pub groups: usize,
    pub insertions: usize,
    pub augmented: usize,
    pub exchanged: usize,
    pub cycles_cancelled: usize,
    pub separator_secs: f64,
}

/// Minimum-cost perfect matching of the candidate subgraph.
pub fn mcpm_candidate(
    pg: &PrismGraph,
    dec: &EligibleDecomposition,
    cand: &CandidateEdges,
    opts: DncOptions,
) -> Result<(PrismMatching, DncStats)> {
    let g = BipartiteGraph::from_candidates(pg, cand);
    let n = pg.n();
    let mut piece_adj = vec![Vec::new(); n];
    for (i, pc) in dec.pieces.iter().enumerate() {
        piece_adj[pc.p].push((pc.q, i));
        piece_adj[pc.q].push((pc.p, i));
    }
    let mut run = Dnc {
        pg,
        dec,
        cand_adj: upper_adjacency(cand),
        state: MatchingState::new(&g),
        piece_adj,
        opts,
        stats: DncStats::default(),
        check: debug::enabled(),
    };
    for &v in &dec.isolated {
        run.state.set_pair(v, n + v)?;
    }
    let groups: Vec<usize> = (0..dec.pieces.len()).filter(|&i| !dec.pieces[i].interior.is_empty()).collect();
    run.solve(dec.skeleton.clone(), groups, 0)?;
    let mates = run.state.mates().to_vec();
    let pm = PrismMatching::from_mates(mates);
    if !pm.is_perfect() {
        return Err(Error::NotPerfect { matched: pm.size(), total: pg.vertex_count() });
    }
    pm.validate(pg)?;
    Ok((pm, run.stats))
}

fn upper_adjacency(cand: &CandidateEdges) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); cand.n];
    for &(r, b) in &cand.upper {
        adj[r].push(b);
        adj[b].push(r);
    }
    adj
}

struct Dnc<'a, 'p, 'g> {
    pg: &'p PrismGraph<'a>,
    dec: &'p EligibleDecomposition,
    /// Upper candidate neighbors by original id.
    cand_adj: Vec<Vec<usize>>,
    state: MatchingState<'g>,
    /// `(other endpoint, piece)` per skeleton point.
    piece_adj: Vec<Vec<(usize, usize)>>,
    opts: DncOptions,
    stats: DncStats,
    check: bool,
}

impl Dnc<'_, '_, '_> {
    /// Prism vertices of a subproblem.
    fn prism_vertices(&self, skel: &[usize], groups: &[usize]) -> Vec<usize> {
        let n = self.pg.n();
        let mut out: Vec<usize> = skel.to_vec();
        for &gi in groups {
            out.extend_from_slice(&self.dec.pieces[gi].interior);
        }
        let upper = out.len();
        for i in 0..upper {
            out.push(out[i] + n);
        }
        out
    }

    fn solve(&mut self, skel: Vec<usize>, groups: Vec<usize>, depth: usize) -> Result<()> {
        if skel.len() <= self.opts.base_case {
            self.stats.base_cases += 1;
            for &gi in &groups {
                self.solve_group(gi)?;
            }
            let h = self.prism_vertices(&skel, &groups);
            return self.merge(&h, &skel);
        }
        let local: std::collections::HashMap<usize, usize> =
            skel.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in skel.iter().enumerate() {
            for &(w, _) in &self.piece_adj[v] {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let inst = self.pg.instance();
        let graph = PlanarGraph::new(skel.iter().map(|&v| inst.point(v)).collect(), &edges)?;
        let started = Instant::now();
        let sep = planar_separator(&graph)?;
        self.stats.separator_secs += started.elapsed().as_secs_f64();
        // With mirrors: |S ∪ Ŝ| <= 2·2√2·√|V(P)|, i.e. (2|S|)² <= 32·|V(P)|.
        let doubled = 2 * sep.s.len();
        if doubled * doubled > 32 * skel.len() {
            return Err(Error::invariant("mirrored separator exceeds its bound"));
        }
        // 0 = outside this subproblem, 1 = X, 2 = Y, 3 = S.
        let n = self.pg.n();
        let mut tag = vec![0u8; n];
        for (set, t) in [(&sep.x, 1u8), (&sep.y, 2), (&sep.s, 3)] {
            for &i in set {
                tag[skel[i]] = t;
            }
        }
        let mut parts: [(Vec<usize>, Vec<usize>); 3] = Default::default();
        for (set, k) in [(&sep.x, 0), (&sep.y, 1), (&sep.s, 2)] {
            parts[k].0 = set.iter().map(|&i| skel[i]).collect();
            parts[k].0.sort_unstable();
        }
        for &gi in &groups {
            let pc = &self.dec.pieces[gi];
            let (a, b) = (tag[pc.p], tag[pc.q]);
            if (a == 1 && b == 2) || (a == 2 && b == 1) {
                return Err(Error::invariant(format!("piece {gi} joins X and Y")));
            }
            let k = if a == 1 || b == 1 {
                0
            } else if a == 2 || b == 2 {
                1
            } else {
                2
            };
            parts[k].1.push(gi);
        }
        let hx = self.prism_vertices(&parts[0].0, &parts[0].1);
        let hy = self.prism_vertices(&parts[1].0, &parts[1].1);
        let hs = self.prism_vertices(&parts[2].0, &parts[2].1);
        self.check_no_crossing_edges(&hx, &hy)?;
        self.stats.calls.push(SeparatorCall {
            depth,
            n_h: skel.len(),
            x: sep.x.len(),
            y: sep.y.len(),
            s: sep.s.len(),
            lifted: [hx.len(), hy.len(), hs.len()],
        });
        log::trace!(
            "depth={depth} | n_h={} | x={} y={} s={} | lifted={}/{}/{}",
            skel.len(),
            sep.x.len(),
            sep.y.len(),
            sep.s.len(),
            hx.len(),
            hy.len(),
            hs.len()
        );
        let [(xs, xg), (ys, yg), (ss, sg)] = parts;
        self.solve(xs, xg, depth + 1)?;
        self.solve(ys, yg, depth + 1)?;
        for &gi in &sg {
            self.solve_group(gi)?;
        }
        let h = self.prism_vertices(&skel, &groups);
        self.merge(&h, &ss)
    }

    /// Full scan: no candidate edge between the lifted sides.
    fn check_no_crossing_edges(&self, hx: &[usize], hy: &[usize]) -> Result<()> {
        let n = self.pg.n();
        let mut in_y = vec![false; 2 * n];
        for &v in hy {
            in_y[v] = true;
        }
        for &v in hx {
            let base = self.pg.base(v);
            let neighbors = &self.cand_adj[base];
            let offset = if v < n { 0 } else { n };
            if neighbors.iter().any(|&w| in_y[w + offset]) || in_y[self.pg.mirror(v)] {
                return Err(Error::invariant(format!("candidate edge leaves X̃ at {v} into Ỹ")));
            }
        }
        Ok(())
    }

    /// Matches `W ∪ Ŵ` for the interior points of one piece.
    fn solve_group(&mut self, gi: usize) -> Result<()> {
        self.stats.groups += 1;
        let n = self.pg.n();
        let pc = &self.dec.pieces[gi];
        let (pts, ids) = local_points(self.pg, pc, false, false);
        let sol = penalty1d::solve(&pts)?;
        for &(ri, bi) in &sol.pairs {
            let (r, b) = (ids[ri], ids[bi]);
            self.state.set_pair(r, b)?;
            self.state.set_pair(n + b, n + r)?;
        }
        for &v in &sol.free {
            self.state.set_pair(ids[v], n + ids[v])?;
        }
        Ok(())
    }

    /// Reintroduces the skeleton points `ins` (and mirrors) into the subproblem `h`.
    fn merge(&mut self, h: &[usize], ins: &[usize]) -> Result<()> {
        let n = self.pg.n();
        let mut ins = ins.to_vec();
        ins.sort_unstable();
        self.stats.cycles_cancelled += self.state.rebuild_duals(h)?;
        for v in ins {
            for u in [v, v + n] {
                self.stats.insertions += 1;
                match self.state.insert_vertex(u)? {
                    InsertOutcome::Augmented => self.stats.augmented += 1,
                    InsertOutcome::Exchanged => self.stats.exchanged += 1,
                    InsertOutcome::Unchanged => {}
                }
            }
        }
        if self.state.matched_count(h) * 2 != h.len() {
            return Err(Error::invariant(format!(
                "subproblem of {} prism vertices left {} unmatched",
                h.len(),
                h.len() - 2 * self.state.matched_count(h)
            )));
        }
        if self.check && h.len() <= 2 * crate::oracle::DENSE_BOUND {
            let (_, best) = min_cost_max_card_dense(self.state.graph(), h)?;
            if self.state.cost(h) != best {
                return Err(Error::invariant("subproblem matching is not optimal"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eligibility::{build_decomposition, candidate_edges, EligibilityContext, Piece, CANDIDATE_FACTOR};
    use crate::geom::{line_key, GridPoint, Instance};
    use crate::oracle::mcpm_prism_filtered;
    use crate::report::CostReport;
    use crate::scaling::{exact_exponent, run_scaling};
    use crate::Fixed;
    use rand::{Rng, SeedableRng};

    fn gp(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    fn random_instance(rng: &mut impl Rng, n: usize, delta: i64) -> Instance {
        let mut pts: Vec<GridPoint> = Vec::new();
        while pts.len() < n {
            let p = gp(rng.random_range(1..=delta), rng.random_range(1..=delta));
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let nr = rng.random_range(1..n);
        let blue = pts.split_off(nr);
        Instance::new(delta, pts, blue).unwrap()
    }

    fn pipeline(inst: &Instance, opts: DncOptions) -> (PrismMatching, DncStats, CandidateEdges) {
        let pg = PrismGraph::build(inst);
        let run = run_scaling(&pg, exact_exponent(inst.n(), inst.delta()), |_| Ok(())).unwrap();
        let ctx = EligibilityContext::new(&pg, &run.duals, run.t);
        let dec = build_decomposition(&ctx).unwrap();
        let cand = candidate_edges(&pg, &dec, CANDIDATE_FACTOR).unwrap();
        let (pm, stats) = mcpm_candidate(&pg, &dec, &cand, opts).unwrap();
        (pm, stats, cand)
    }

    #[test]
    fn interior_group_of_one_uses_its_link() {
        let inst = Instance::new(8, vec![gp(1, 1), gp(3, 1), gp(5, 1)], vec![gp(7, 7)]).unwrap();
        let pg = PrismGraph::build(&inst);
        let dec = EligibleDecomposition {
            pieces: vec![Piece { p: 0, q: 2, line: line_key(gp(1, 1), gp(5, 1)), interior: vec![1] }],
            skeleton: vec![0, 2],
            interior_of: vec![None, Some(0), None, None],
            isolated: vec![3],
        };
        let cand = CandidateEdges { upper: vec![], n: 4 };
        let g = BipartiteGraph::from_candidates(&pg, &cand);
        let mut run = Dnc {
            pg: &pg,
            dec: &dec,
            cand_adj: upper_adjacency(&cand),
            state: MatchingState::new(&g),
            piece_adj: vec![Vec::new(); 4],
            opts: DncOptions::default(),
            stats: DncStats::default(),
            check: true,
        };
        run.solve_group(0).unwrap();
        assert_eq!(run.state.mate(1), Some(5));
    }

    #[test]
    fn interior_groups_match_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let k = rng.random_range(1..=20usize);
            // k collinear interior points between two far endpoints, plus a far partner.
            let xs: Vec<i64> = {
                let mut s = std::collections::BTreeSet::new();
                while s.len() < k {
                    s.insert(rng.random_range(2..=63i64));
                }
                s.into_iter().collect()
            };
            let mut red = vec![gp(1, 2)];
            let mut blue = vec![gp(64, 2), gp(1, 64), gp(64, 64)];
            let mut interior_pts = Vec::new();
            for &x in &xs {
                if rng.random_bool(0.5) {
                    red.push(gp(x, 2));
                } else {
                    blue.push(gp(x, 2));
                }
                interior_pts.push(gp(x, 2));
            }
            red.push(gp(32, 64));
            let inst = Instance::new(64, red, blue).unwrap();
            let pg = PrismGraph::build(&inst);
            let id_of = |p: GridPoint| (0..inst.n()).find(|&v| inst.point(v) == p).unwrap();
            let interior: Vec<usize> = interior_pts.iter().map(|&p| id_of(p)).collect();
            let piece = Piece { p: id_of(gp(1, 2)), q: id_of(gp(64, 2)), line: line_key(gp(1, 2), gp(64, 2)), interior };
            let dec = EligibleDecomposition {
                pieces: vec![piece.clone()],
                skeleton: vec![],
                interior_of: vec![],
                isolated: vec![],
            };
            // All interior pairs are candidates so the dense side sees the full W ∪ Ŵ prism.
            let mut upper = Vec::new();
            for &u in &piece.interior {
                for &w in &piece.interior {
                    if inst.color(u) == crate::Color::Red && inst.color(w) == crate::Color::Blue {
                        upper.push((u, w));
                    }
                }
            }
            upper.sort_unstable();
            let cand = CandidateEdges { upper, n: inst.n() };
            let g = BipartiteGraph::from_candidates(&pg, &cand);
            let mut run = Dnc {
                pg: &pg,
                dec: &dec,
                cand_adj: upper_adjacency(&cand),
                state: MatchingState::new(&g),
                piece_adj: vec![Vec::new(); inst.n()],
                opts: DncOptions::default(),
                stats: DncStats::default(),
                check: false,
            };
            run.solve_group(0).unwrap();
            let n = inst.n();
            let h: Vec<usize> = piece.interior.iter().flat_map(|&v| [v, v + n]).collect();
            let (size, best) = min_cost_max_card_dense(&g, &h).unwrap();
            assert_eq!(size * 2, h.len());
            let got = run.state.cost(&h);
            // Positions along the line round differently from direct square roots.
            let diff = if got > best { got - best } else { best - got };
            assert!(diff < Fixed::from_raw_big(&num_bigint::BigInt::from(1u64 << 20)));
        }
    }

    #[test]
    fn pipeline_matches_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for case in 0..40 {
            let delta = [4, 8, 16][case % 3];
            let n = rng.random_range(2..=16);
            let inst = random_instance(&mut rng, n, delta);
            for base in [1, 8] {
                let (pm, stats, cand) = pipeline(&inst, DncOptions { base_case: base });
                let pg = PrismGraph::build(&inst);
                let restricted = mcpm_prism_filtered(&pg, |r, b| cand.allows(&pg, r, b)).unwrap();
                let a = CostReport::from_terms(pm.cost_terms(&pg), 40);
                let b = CostReport::from_terms(restricted.cost_terms(&pg), 40);
                assert!(a.same_cost(&b), "case {case} base {base}: {} vs {} ({stats:?})", a.decimal, b.decimal);
                let opt = crate::oracle::mcpm_prism(&pg).unwrap();
                let c = CostReport::from_terms(opt.cost_terms(&pg), 40);
                assert!(a.same_cost(&c));
            }
        }
    }
}
