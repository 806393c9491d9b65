//! Planar separators for straight-line graphs.
//!
//! Breadth-first levels give two thin cuts around the median level; if the
//! band between them is still too heavy, a fundamental cycle of the BFS tree
//! in a triangulation of the lower levels splits it.  The triangulation is a
//! constrained Delaunay triangulation plus one virtual vertex joined to the
//! hull, so every face is a triangle.

use std::collections::{HashMap, VecDeque};

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::geom::{orientation, segments_properly_cross, GridPoint};

/// Undirected straight-line graph on distinct grid points.
#[derive(Clone, Debug)]
pub struct PlanarGraph {
    points: Vec<GridPoint>,
    adj: Vec<Vec<usize>>,
}

impl PlanarGraph {
    pub fn new(points: Vec<GridPoint>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = points.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidInput(format!("bad edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(PlanarGraph { points, adj })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, v: usize) -> GridPoint {
        self.points[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    /// Quadratic check that no two edges cross and no edge runs through a vertex.
    pub fn check_embedding(&self) -> Result<()> {
        let edges = self.edges();
        for i in 0..edges.len() {
            let (a, b) = edges[i];
            for &(c, d) in &edges[i + 1..] {
                let s1 = (self.points[a], self.points[b]);
                let s2 = (self.points[c], self.points[d]);
                if segments_properly_cross(s1, s2) {
                    return Err(Error::invariant(format!("edges ({a},{b}) and ({c},{d}) cross")));
                }
            }
            for v in 0..self.len() {
                if v != a && v != b && crate::geom::on_segment(self.points[a], self.points[b], self.points[v]) {
                    return Err(Error::invariant(format!("edge ({a},{b}) passes through {v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Separation {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub s: Vec<usize>,
}

/// `|S| <= 2√2·√n`, compared in integers.
pub fn separator_size_ok(n: usize, s: usize) -> bool {
    s * s <= 8 * n
}

/// `|part| <= 2n/3`.
pub fn part_size_ok(n: usize, part: usize) -> bool {
    3 * part <= 2 * n
}

impl Separation {
    /// Partition, size bounds, and no edge between `X` and `Y`.
    pub fn check(&self, g: &PlanarGraph) -> Result<()> {
        let n = g.len();
        let mut tag = vec![0u8; n];
        for (set, t) in [(&self.x, 1u8), (&self.y, 2), (&self.s, 3)] {
            for &v in set.iter() {
                if v >= n || tag[v] != 0 {
                    return Err(Error::invariant(format!("vertex {v} misplaced in separation")));
                }
                tag[v] = t;
            }
        }
        if tag.contains(&0) {
            return Err(Error::invariant("separation does not cover every vertex"));
        }
        if !part_size_ok(n, self.x.len()) || !part_size_ok(n, self.y.len()) {
            return Err(Error::invariant(format!(
                "parts {} and {} exceed 2n/3 for n = {n}",
                self.x.len(),
                self.y.len()
            )));
        }
        if !separator_size_ok(n, self.s.len()) {
            return Err(Error::invariant(format!("separator {} exceeds 2√2·√{n}", self.s.len())));
        }
        for &v in &self.x {
            if g.neighbors(v).iter().any(|&w| tag[w] == 2) {
                return Err(Error::invariant(format!("edge from X vertex {v} into Y")));
            }
        }
        Ok(())
    }
}

/// Splits `g` into `X, Y, S`; all bounds are checked before returning.
pub fn planar_separator(g: &PlanarGraph) -> Result<Separation> {
    let n = g.len();
    let mut pieces = Vec::new();
    let mut s = Vec::new();
    for comp in components(g) {
        if 3 * comp.len() > 2 * n {
            let (ps, sep) = split_component(g, &comp)?;
            pieces.extend(ps);
            s = sep;
        } else {
            pieces.push(comp);
        }
    }
    let (mut x, mut y) = pack(pieces, n);
    prune(g, &mut x, &mut y, &mut s);
    x.sort_unstable();
    y.sort_unstable();
    s.sort_unstable();
    let sep = Separation { x, y, s };
    sep.check(g)?;
    Ok(sep)
}

/// Moves separator vertices whose outside neighbors all lie on one side into that side.
fn prune(g: &PlanarGraph, x: &mut Vec<usize>, y: &mut Vec<usize>, s: &mut Vec<usize>) {
    let n = g.len();
    let mut tag = vec![0u8; n];
    for &v in x.iter() {
        tag[v] = 1;
    }
    for &v in y.iter() {
        tag[v] = 2;
    }
    s.sort_unstable();
    let mut keep = Vec::new();
    for &v in s.iter() {
        let touches = |t: u8| g.neighbors(v).iter().any(|&w| tag[w] == t);
        let (tx, ty) = (touches(1), touches(2));
        let to_x = !ty && part_size_ok(n, x.len() + 1);
        let to_y = !tx && part_size_ok(n, y.len() + 1);
        let target = match (to_x, to_y) {
            (true, true) if y.len() < x.len() => 2,
            (true, _) => 1,
            (false, true) => 2,
            (false, false) => 0,
        };
        match target {
            1 => {
                tag[v] = 1;
                x.push(v);
            }
            2 => {
                tag[v] = 2;
                y.push(v);
            }
            _ => keep.push(v),
        }
    }
    *s = keep;
}

fn components(g: &PlanarGraph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.len()];
    let mut out = Vec::new();
    for start in 0..g.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Groups pieces with no edges between them into two sides of at most `2n/3`.
/// Every piece must be at most `2n/3` and their total at most `n`.
fn pack(mut pieces: Vec<Vec<usize>>, n: usize) -> (Vec<usize>, Vec<usize>) {
    pieces.retain(|p| !p.is_empty());
    pieces.sort_by(|a, b| b.len().cmp(&a.len()).then(a.iter().min().cmp(&b.iter().min())));
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut iter = pieces.into_iter();
    if let Some(first) = iter.next() {
        let alone = 3 * first.len() >= n;
        x.extend(first);
        for p in iter {
            if !alone && 3 * x.len() < n {
                x.extend(p);
            } else {
                y.extend(p);
            }
        }
    }
    (x, y)
}

struct Levels {
    level: HashMap<usize, usize>,
    parent: HashMap<usize, usize>,
    by_level: Vec<Vec<usize>>,
}

fn bfs_levels(g: &PlanarGraph, root: usize) -> Levels {
    let mut level = HashMap::new();
    let mut parent = HashMap::new();
    let mut by_level: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    level.insert(root, 0);
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        let l = level[&v];
        if by_level.len() <= l {
            by_level.push(Vec::new());
        }
        by_level[l].push(v);
        for &w in g.neighbors(v) {
            if let std::collections::hash_map::Entry::Vacant(e) = level.entry(w) {
                e.insert(l + 1);
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    Levels { level, parent, by_level }
}

/// Separates one connected component; returns its pieces and the separator.
fn split_component(g: &PlanarGraph, comp: &[usize]) -> Result<(Vec<Vec<usize>>, Vec<usize>)> {
    let n = comp.len();
    let root = *comp.iter().min().expect("component is non-empty");
    let lv = bfs_levels(g, root);
    let r = lv.by_level.len() - 1;
    let size = |l: usize| lv.by_level.get(l).map_or(0, Vec::len);
    let mut prefix = 0;
    let mut l1 = 0;
    for l in 0..=r {
        prefix += size(l);
        if 2 * prefix > n {
            l1 = l;
            break;
        }
    }
    let l0 = (0..=l1).min_by_key(|&l| (size(l) + 2 * (l1 - l), std::cmp::Reverse(l))).unwrap();
    let l2 = (l1 + 1..=r + 1).min_by_key(|&l| (size(l) + 2 * (l - l1 - 1), l)).unwrap();
    let band = |v: &usize| {
        let l = lv.level[v];
        l > l0 && l < l2
    };
    let a: Vec<usize> = comp.iter().copied().filter(|v| lv.level[v] < l0).collect();
    let c: Vec<usize> = comp.iter().copied().filter(|v| lv.level[v] > l2).collect();
    let b: Vec<usize> = comp.iter().copied().filter(band).collect();
    let mut s: Vec<usize> = comp.iter().copied().filter(|v| lv.level[v] == l0 || lv.level[v] == l2).collect();
    if 3 * b.len() <= 2 * n {
        return Ok((vec![a, b, c], s));
    }
    let low: Vec<usize> = comp.iter().copied().filter(|v| lv.level[v] < l2).collect();
    let (on_cycle, side0, side1) = cycle_split(g, &low, &lv, l0, l2)?;
    s.extend(on_cycle);
    Ok((vec![a, c, side0, side1], s))
}

/// Splits the band `l0 < level < l2` with one fundamental cycle.
/// Returns band vertices on the cycle and the two sides.
fn cycle_split(
    g: &PlanarGraph,
    low: &[usize],
    lv: &Levels,
    l0: usize,
    l2: usize,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let in_band = |v: usize| {
        let l = lv.level[&v];
        l > l0 && l < l2
    };
    let band: Vec<usize> = low.iter().copied().filter(|&v| in_band(v)).collect();
    if collinear(g, low) {
        // A linear forest in line order: the median vertex splits it.
        let mut line = band.clone();
        line.sort_by_key(|&v| (g.point(v).x, g.point(v).y));
        let mid = line.len() / 2;
        return Ok((vec![line[mid]], line[..mid].to_vec(), line[mid + 1..].to_vec()));
    }
    let tri = Triangulated::build(g, low, lv)?;
    let weight: Vec<bool> = (0..tri.len()).map(|i| i < low.len() && in_band(low[i])).collect();
    let total = weight.iter().filter(|&&w| w).count();
    let cut = tri.find_cycle(&weight, total)?;
    let mut on = Vec::new();
    let mut sides = (Vec::new(), Vec::new());
    for (i, &v) in low.iter().enumerate() {
        if !weight[i] {
            continue;
        }
        if cut.on_cycle[i] {
            on.push(v);
        } else if cut.vertex_side[i] == 0 {
            sides.0.push(v);
        } else {
            sides.1.push(v);
        }
    }
    Ok((on, sides.0, sides.1))
}

fn collinear(g: &PlanarGraph, vs: &[usize]) -> bool {
    if vs.len() < 3 {
        return true;
    }
    let p = g.point(vs[0]);
    let q = g.point(vs[1]);
    vs[2..].iter().all(|&v| orientation(p, q, g.point(v)) == 0)
}

/// A triangulated sphere over `low` plus one virtual vertex, with a spanning tree.
struct Triangulated {
    /// `tris[t]` lists local vertex ids; the virtual vertex is `low.len()`.
    tris: Vec<[usize; 3]>,
    /// Triangles on each side of every edge, keyed by sorted endpoints.
    edge_tris: HashMap<(usize, usize), [usize; 2]>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// One incident triangle per vertex.
    incident: Vec<usize>,
}

struct Cut {
    on_cycle: Vec<bool>,
    vertex_side: Vec<u8>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Triangulated {
    fn build(g: &PlanarGraph, low: &[usize], lv: &Levels) -> Result<Self> {
        let m = low.len();
        let local: HashMap<usize, usize> = low.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
        let mut handle_to_local = HashMap::new();
        let mut handles = Vec::with_capacity(m);
        for (i, &v) in low.iter().enumerate() {
            let p = g.point(v);
            let h = cdt
                .insert(Point2::new(p.x as f64, p.y as f64))
                .map_err(|e| Error::invariant(format!("triangulation insert failed: {e:?}")))?;
            handle_to_local.insert(h.index(), i);
            handles.push(h);
        }
        for (i, &v) in low.iter().enumerate() {
            for &w in g.neighbors(v) {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        cdt.try_add_constraint(handles[i], handles[j]);
                    }
                }
            }
        }
        let mut tris = Vec::new();
        for face in cdt.inner_faces() {
            let vs = face.vertices();
            tris.push([
                handle_to_local[&vs[0].fix().index()],
                handle_to_local[&vs[1].fix().index()],
                handle_to_local[&vs[2].fix().index()],
            ]);
        }
        let mut edge_tris: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                edge_tris.entry(key(tri[k], tri[(k + 1) % 3])).or_default().push(t);
            }
        }
        let hull: Vec<(usize, usize)> =
            edge_tris.iter().filter(|(_, ts)| ts.len() == 1).map(|(&e, _)| e).collect();
        let inf = m;
        for (a, b) in hull {
            let t = tris.len();
            tris.push([a, b, inf]);
            edge_tris.get_mut(&(a, b)).unwrap().push(t);
            edge_tris.entry(key(a, inf)).or_default().push(t);
            edge_tris.entry(key(b, inf)).or_default().push(t);
        }
        let mut pairs = HashMap::with_capacity(edge_tris.len());
        for (e, ts) in edge_tris {
            if ts.len() != 2 {
                return Err(Error::invariant(format!("edge {e:?} borders {} triangles", ts.len())));
            }
            pairs.insert(e, [ts[0], ts[1]]);
        }
        let mut parent = vec![None; m + 1];
        let mut depth = vec![0; m + 1];
        for (i, &v) in low.iter().enumerate() {
            if let Some(p) = lv.parent.get(&v) {
                let j = local[p];
                if !pairs.contains_key(&key(i, j)) {
                    return Err(Error::invariant("tree edge missing from triangulation"));
                }
                parent[i] = Some(j);
            }
            depth[i] = lv.level[&v];
        }
        let anchor = (0..m).filter(|&i| pairs.contains_key(&key(i, inf))).min().expect("hull is non-empty");
        parent[inf] = Some(anchor);
        depth[inf] = depth[anchor] + 1;
        let mut incident = vec![usize::MAX; m + 1];
        for (t, tri) in tris.iter().enumerate() {
            for &v in tri {
                if incident[v] == usize::MAX {
                    incident[v] = t;
                }
            }
        }
        Ok(Triangulated { tris, edge_tris: pairs, parent, depth, incident })
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn is_tree_edge(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    /// Cycle of the non-tree edge `(a, b)`: vertex and edge lists.
    fn cycle(&self, a: usize, b: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
        let (mut u, mut w) = (a, b);
        let mut left = vec![u];
        let mut right = vec![w];
        while u != w {
            if self.depth[u] >= self.depth[w] {
                u = self.parent[u].expect("climb stays below the root");
                left.push(u);
            } else {
                w = self.parent[w].expect("climb stays below the root");
                right.push(w);
            }
        }
        right.pop();
        let mut edges: Vec<(usize, usize)> = left.windows(2).map(|p| key(p[0], p[1])).collect();
        edges.extend(right.windows(2).map(|p| key(p[0], p[1])));
        if let (Some(&r), Some(&l)) = (right.last(), left.last()) {
            edges.push(key(r, l));
        }
        edges.push(key(a, b));
        left.extend(right);
        (left, edges)
    }

    /// Floods the two sides of the cycle through `e`; returns the side of every triangle.
    fn flood(&self, e: (usize, usize), cycle_edges: &[(usize, usize)]) -> Result<Vec<u8>> {
        let blocked: std::collections::HashSet<(usize, usize)> = cycle_edges.iter().copied().collect();
        let mut side = vec![u8::MAX; self.tris.len()];
        let [t0, t1] = self.edge_tris[&key(e.0, e.1)];
        for (start, s) in [(t0, 0u8), (t1, 1u8)] {
            if side[start] != u8::MAX {
                return Err(Error::invariant("fundamental cycle does not separate"));
            }
            side[start] = s;
            let mut stack = vec![start];
            while let Some(t) = stack.pop() {
                let tri = self.tris[t];
                for k in 0..3 {
                    let ek = key(tri[k], tri[(k + 1) % 3]);
                    if blocked.contains(&ek) {
                        continue;
                    }
                    let [p, q] = self.edge_tris[&ek];
                    let nt = if p == t { q } else { p };
                    if side[nt] == u8::MAX {
                        side[nt] = s;
                        stack.push(nt);
                    } else if side[nt] != s {
                        return Err(Error::invariant("fundamental cycle does not separate"));
                    }
                }
            }
        }
        Ok(side)
    }

    fn evaluate(&self, e: (usize, usize), weight: &[bool]) -> Result<Eval> {
        let (verts, edges) = self.cycle(e.0, e.1);
        let tri_side = self.flood(e, &edges)?;
        let mut on_cycle = vec![false; self.len()];
        for &v in &verts {
            on_cycle[v] = true;
        }
        let mut w = [0usize; 2];
        let mut vertex_side = vec![0u8; self.len()];
        for v in 0..self.len() {
            let s = tri_side[self.incident[v]];
            vertex_side[v] = s;
            if weight[v] && !on_cycle[v] {
                w[s as usize] += 1;
            }
        }
        Ok(Eval { e, tri_side, on_cycle, vertex_side, w })
    }

    fn find_cycle(&self, weight: &[bool], total: usize) -> Result<Cut> {
        let balanced = |ev: &Eval| 3 * ev.w[0] <= 2 * total && 3 * ev.w[1] <= 2 * total;
        let mut non_tree: Vec<(usize, usize)> =
            self.edge_tris.keys().copied().filter(|&(a, b)| !self.is_tree_edge(a, b)).collect();
        non_tree.sort_unstable();
        let Some(&first) = non_tree.first() else {
            return Err(Error::invariant("triangulation has no non-tree edge"));
        };
        // Walk into the heavy side one triangle at a time.
        let mut cur = self.evaluate(first, weight)?;
        for _ in 0..=self.tris.len() {
            if balanced(&cur) {
                return Ok(Cut { on_cycle: cur.on_cycle, vertex_side: cur.vertex_side });
            }
            let heavy = if 3 * cur.w[0] > 2 * total { 0u8 } else { 1u8 };
            let [p, q] = self.edge_tris[&key(cur.e.0, cur.e.1)];
            let (t_in, t_out) = if cur.tri_side[p] == heavy { (p, q) } else { (q, p) };
            let (a, b) = cur.e;
            let c = *self.tris[t_in].iter().find(|&&v| v != a && v != b).unwrap();
            let mut next = None;
            for f in [(a, c), (c, b)] {
                if self.is_tree_edge(f.0, f.1) {
                    continue;
                }
                let ev = self.evaluate(f, weight)?;
                if balanced(&ev) {
                    return Ok(Cut { on_cycle: ev.on_cycle, vertex_side: ev.vertex_side });
                }
                let inner = 1 - ev.tri_side[t_out];
                if 3 * ev.w[inner as usize] > 2 * total {
                    next = Some(ev);
                }
            }
            match next {
                Some(ev) => cur = ev,
                None => break,
            }
        }
        log::debug!("separator walk stalled; scanning all fundamental cycles");
        for &e in &non_tree {
            let ev = self.evaluate(e, weight)?;
            if balanced(&ev) {
                return Ok(Cut { on_cycle: ev.on_cycle, vertex_side: ev.vertex_side });
            }
        }
        Err(Error::invariant("no balanced fundamental cycle"))
    }
}

struct Eval {
    e: (usize, usize),
    tri_side: Vec<u8>,
    on_cycle: Vec<bool>,
    vertex_side: Vec<u8>,
    w: [usize; 2],
}
