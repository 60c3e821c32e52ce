//! Euclidean minimum spanning trees and the forced-edge forests derived from them.

use std::cmp::Ordering;

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::instance::{Edge, Instance};
use crate::unionfind::UnionFind;

/// Above this many points [`euclidean_mst`] switches from dense Prim to Borůvka
/// over a kd-tree, and [`mst_candidates`] to Delaunay edges.
pub const DELAUNAY_THRESHOLD: usize = 256;

/// Strict order on weighted edges: length, then `a`, then `b`.
pub fn edge_order(wa: f64, ea: Edge, wb: f64, eb: Edge) -> Ordering {
    wa.total_cmp(&wb).then(ea.cmp(&eb))
}

/// Sorts `(edge, weight)` pairs by [`edge_order`].
pub fn sort_weighted(edges: &mut [(Edge, f64)]) {
    edges.sort_unstable_by(|x, y| edge_order(x.1, x.0, y.1, y.0));
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Minimum spanning tree of the complete Euclidean graph on `points`.
///
/// Ties are broken by `(length, a, b)`, which makes the tree unique, so every
/// route returns the same edges.
pub fn euclidean_mst(points: &[(f64, f64)]) -> Vec<Edge> {
    if points.len() > DELAUNAY_THRESHOLD {
        if let Some(t) = line_mst(points) {
            return t;
        }
        return boruvka_mst(points);
    }
    prim_mst(points)
}

const LEAF: usize = 8;
const NO_LABEL: usize = usize::MAX;

struct KdNode {
    lo: (f64, f64),
    hi: (f64, f64),
    start: usize,
    end: usize,
    /// Children, or `usize::MAX` for a leaf.
    left: usize,
    right: usize,
    /// The component shared by every point below, or `NO_LABEL`.
    label: usize,
}

struct KdTree {
    nodes: Vec<KdNode>,
    perm: Vec<usize>,
}

impl KdTree {
    fn new(points: &[(f64, f64)]) -> Self {
        let mut t = KdTree {
            nodes: Vec::new(),
            perm: (0..points.len()).collect(),
        };
        t.build(points, 0, points.len());
        t
    }

    fn build(&mut self, points: &[(f64, f64)], start: usize, end: usize) -> usize {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &i in &self.perm[start..end] {
            let p = points[i];
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        let id = self.nodes.len();
        self.nodes.push(KdNode {
            lo,
            hi,
            start,
            end,
            left: usize::MAX,
            right: usize::MAX,
            label: NO_LABEL,
        });
        if end - start > LEAF {
            let mid = (start + end) / 2;
            let wide = hi.0 - lo.0 >= hi.1 - lo.1;
            let key = |i: &usize| if wide { points[*i].0 } else { points[*i].1 };
            self.perm[start..end].select_nth_unstable_by(mid - start, |a, b| key(a).total_cmp(&key(b)));
            let l = self.build(points, start, mid);
            let r = self.build(points, mid, end);
            self.nodes[id].left = l;
            self.nodes[id].right = r;
        }
        id
    }

    fn relabel(&mut self, id: usize, comp: &[usize]) -> usize {
        let (left, right) = (self.nodes[id].left, self.nodes[id].right);
        let label = if left == usize::MAX {
            let n = &self.nodes[id];
            let first = comp[self.perm[n.start]];
            if self.perm[n.start..n.end].iter().all(|&i| comp[i] == first) {
                first
            } else {
                NO_LABEL
            }
        } else {
            let (a, b) = (self.relabel(left, comp), self.relabel(right, comp));
            if a == b {
                a
            } else {
                NO_LABEL
            }
        };
        self.nodes[id].label = label;
        label
    }

    fn lower_bound(&self, id: usize, p: (f64, f64)) -> f64 {
        let n = &self.nodes[id];
        let gx = (n.lo.0 - p.0).max(p.0 - n.hi.0).max(0.0);
        let gy = (n.lo.1 - p.1).max(p.1 - n.hi.1).max(0.0);
        gx.hypot(gy)
    }

    /// Lightest edge from `p` to a point outside its component, improving `best`.
    fn nearest_foreign(
        &self,
        id: usize,
        points: &[(f64, f64)],
        comp: &[usize],
        p: usize,
        best: &mut (f64, Option<Edge>),
    ) {
        let n = &self.nodes[id];
        if n.label == comp[p] {
            return;
        }
        // the slack keeps bound rounding from discarding a tied edge
        if self.lower_bound(id, points[p]) > best.0 * (1.0 + 1e-12) {
            return;
        }
        if n.left == usize::MAX {
            for &q in &self.perm[n.start..n.end] {
                if comp[q] == comp[p] {
                    continue;
                }
                let w = dist(points[p], points[q]);
                let e = Edge::new(p, q);
                let better = match best.1 {
                    None => true,
                    Some(b) => edge_order(w, e, best.0, b) == Ordering::Less,
                };
                if better {
                    *best = (w, Some(e));
                }
            }
            return;
        }
        let (l, r) = (n.left, n.right);
        let (dl, dr) = (self.lower_bound(l, points[p]), self.lower_bound(r, points[p]));
        let (first, second) = if dl <= dr { (l, r) } else { (r, l) };
        self.nearest_foreign(first, points, comp, p, best);
        self.nearest_foreign(second, points, comp, p, best);
    }
}

/// Borůvka rounds over a kd-tree: every component takes its lightest outgoing
/// edge under the strict `(length, a, b)` order, so all picks belong to the MST.
pub fn boruvka_mst(points: &[(f64, f64)]) -> Vec<Edge> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let mut tree = KdTree::new(points);
    let mut uf = UnionFind::new(n);
    let mut out = Vec::with_capacity(n - 1);
    let mut comp: Vec<usize> = (0..n).collect();
    while uf.components() > 1 {
        for (i, c) in comp.iter_mut().enumerate() {
            *c = uf.find(i);
        }
        tree.relabel(0, &comp);
        let mut best: Vec<(f64, Option<Edge>)> = vec![(f64::INFINITY, None); n];
        for k in 0..n {
            let p = tree.perm[k];
            let mut b = best[comp[p]];
            tree.nearest_foreign(0, points, &comp, p, &mut b);
            best[comp[p]] = b;
        }
        let mut picks: Vec<(Edge, f64)> = best.iter().filter_map(|&(w, e)| e.map(|e| (e, w))).collect();
        sort_weighted(&mut picks);
        for (e, _) in picks {
            if uf.union(e.a, e.b) {
                out.push(e);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Dense O(n²) Prim.
pub fn prim_mst(points: &[(f64, f64)]) -> Vec<Edge> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut best: Vec<(f64, Edge)> = (0..n).map(|v| (f64::INFINITY, Edge { a: 0, b: v.max(1) })).collect();
    let mut out = Vec::with_capacity(n - 1);
    let mut cur = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = (dist(points[cur], points[v]), Edge::new(cur, v));
            if edge_order(cand.0, cand.1, best[v].0, best[v].1) == Ordering::Less {
                best[v] = cand;
            }
            pick = match pick {
                Some(u) if edge_order(best[u].0, best[u].1, best[v].0, best[v].1) != Ordering::Greater => Some(u),
                _ => Some(v),
            };
        }
        let v = pick.expect("a vertex remains outside the tree");
        in_tree[v] = true;
        out.push(best[v].1);
        cur = v;
    }
    out.sort_unstable();
    out
}

/// Path through the points in order along a common horizontal or vertical
/// line, or `None` if they do not share one. Consecutive points are the only
/// MST edges of a collinear set.
pub fn line_mst(points: &[(f64, f64)]) -> Option<Vec<Edge>> {
    let p0 = *points.first()?;
    let key: fn(&(f64, f64)) -> f64 = if points.iter().all(|p| p.1 == p0.1) {
        |p| p.0
    } else if points.iter().all(|p| p.0 == p0.0) {
        |p| p.1
    } else {
        return None;
    };
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_unstable_by(|&i, &j| key(&points[i]).total_cmp(&key(&points[j])));
    let mut out: Vec<Edge> = idx.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    out.sort_unstable();
    Some(out)
}

struct Site {
    pos: Point2<f64>,
    idx: usize,
}

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

/// Kruskal over Delaunay edges. Every edge of the strict-order MST has an empty
/// closed diametral disk, so it is an edge of any Delaunay triangulation.
/// Returns `None` if the triangulation cannot hold all points.
pub fn delaunay_mst(points: &[(f64, f64)]) -> Option<Vec<Edge>> {
    let n = points.len();
    if n < 2 {
        return Some(Vec::new());
    }
    let sites = points
        .iter()
        .enumerate()
        .map(|(idx, &(x, y))| Site {
            pos: Point2::new(x, y),
            idx,
        })
        .collect();
    let tri: DelaunayTriangulation<Site> = DelaunayTriangulation::bulk_load(sites).ok()?;
    if tri.num_vertices() != n {
        return None;
    }
    let mut cand: Vec<(Edge, f64)> = tri
        .undirected_edges()
        .map(|e| {
            let [u, v] = e.vertices();
            let (u, v) = (u.data().idx, v.data().idx);
            (Edge::new(u, v), dist(points[u], points[v]))
        })
        .collect();
    sort_weighted(&mut cand);
    let mut uf = UnionFind::new(n);
    let mut out = Vec::with_capacity(n - 1);
    for (e, _) in cand {
        if uf.union(e.a, e.b) {
            out.push(e);
            if out.len() == n - 1 {
                break;
            }
        }
    }
    if out.len() != n - 1 {
        return None;
    }
    out.sort_unstable();
    Some(out)
}

/// Weighted candidate edges, sorted by [`edge_order`], that contain a minimum
/// bottleneck path between every pair of points: all pairs for small inputs,
/// Delaunay edges otherwise. Kruskal over them after any zero-weight
/// contractions yields the contracted MST.
pub fn mst_candidates(points: &[(f64, f64)]) -> Vec<(Edge, f64)> {
    let n = points.len();
    let mut cand: Vec<(Edge, f64)> = Vec::new();
    let mut done = false;
    if n > DELAUNAY_THRESHOLD {
        let sites = points
            .iter()
            .enumerate()
            .map(|(idx, &(x, y))| Site {
                pos: Point2::new(x, y),
                idx,
            })
            .collect();
        if let Ok(tri) = DelaunayTriangulation::<Site>::bulk_load(sites) {
            if tri.num_vertices() == n {
                cand = tri
                    .undirected_edges()
                    .map(|e| {
                        let [u, v] = e.vertices();
                        let (u, v) = (u.data().idx, v.data().idx);
                        (Edge::new(u, v), dist(points[u], points[v]))
                    })
                    .collect();
                done = true;
            }
        }
    }
    if !done {
        for a in 0..n {
            for b in a + 1..n {
                cand.push((Edge { a, b }, dist(points[a], points[b])));
            }
        }
    }
    sort_weighted(&mut cand);
    cand
}

/// Kept edges of `MST(S_c)` after removing the edges that would join two
/// multichromatic points, together with the resulting components.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorForest {
    pub color: usize,
    /// Global point indices of `S_c`, ascending.
    pub points: Vec<usize>,
    /// Global edges, sorted.
    pub edges: Vec<Edge>,
    /// Component label of `points[i]`, dense from 0.
    pub labels: Vec<usize>,
    pub n_components: usize,
    /// Number of edges in `MST(S_c)` before pruning.
    pub mst_edges: usize,
    /// The MST edges that were dropped, sorted.
    pub pruned: Vec<Edge>,
}

impl ColorForest {
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comps = vec![Vec::new(); self.n_components];
        for (i, &p) in self.points.iter().enumerate() {
            comps[self.labels[i]].push(p);
        }
        comps
    }

    pub fn label_of(&self, p: usize) -> Option<usize> {
        self.points.binary_search(&p).ok().map(|i| self.labels[i])
    }
}

/// Forced forest for color `c`, treating a point as multichromatic when
/// `is_multi` says so. Shared by the full instance and by color-pair projections.
pub fn forced_forest_with<F: Fn(usize) -> bool>(
    inst: &Instance,
    c: usize,
    points: Vec<usize>,
    is_multi: F,
) -> ColorForest {
    let coords: Vec<(f64, f64)> = points.iter().map(|&i| (inst.point(i).x, inst.point(i).y)).collect();
    // local indices follow global order, so local (w, a, b) order is the global one
    let mut tree: Vec<(Edge, f64)> = euclidean_mst(&coords)
        .into_iter()
        .map(|e| (e, dist(coords[e.a], coords[e.b])))
        .collect();
    let mst_edges = tree.len();
    sort_weighted(&mut tree);
    let multi: Vec<bool> = points.iter().map(|&p| is_multi(p)).collect();
    let any_multi = multi.iter().any(|&m| m);
    let mut uf = UnionFind::new(points.len());
    let mut has_multi = multi.clone();
    let mut edges = Vec::with_capacity(mst_edges);
    let mut pruned = Vec::new();
    for (e, _) in tree {
        let (ra, rb) = (uf.find(e.a), uf.find(e.b));
        if any_multi && has_multi[ra] && has_multi[rb] {
            pruned.push(Edge::new(points[e.a], points[e.b]));
            continue;
        }
        uf.union(ra, rb);
        let r = uf.find(ra);
        has_multi[r] = has_multi[ra] || has_multi[rb];
        edges.push(Edge::new(points[e.a], points[e.b]));
    }
    edges.sort_unstable();
    pruned.sort_unstable();
    let labels = uf.labels();
    ColorForest {
        color: c,
        n_components: uf.components(),
        points,
        edges,
        labels,
        mst_edges,
        pruned,
    }
}

/// The pruned `MST(S_c)`: ascending rebuild that skips any edge joining two
/// components which both already hold a multichromatic point. With no
/// multichromatic point in `S_c` the whole tree is kept.
pub fn forced_edges(inst: &Instance, c: usize) -> ColorForest {
    forced_forest_with(inst, c, inst.class(c), |p| inst.colors(p).is_multichromatic())
}

/// Forced forests for every color `1..=k`.
pub fn all_forced(inst: &Instance) -> Vec<ColorForest> {
    (1..=inst.k()).map(|c| forced_edges(inst, c)).collect()
}

/// Union of the forced edges of all colors, sorted and deduplicated.
pub fn forced_union(forests: &[ColorForest]) -> Vec<Edge> {
    let mut all: Vec<Edge> = forests.iter().flat_map(|f| f.edges.iter().copied()).collect();
    crate::instance::normalize_edges(&mut all);
    all
}

/// Per-color component labels of the forced forests.
#[derive(Clone, Debug)]
pub struct ContractionMap {
    forests: Vec<ColorForest>,
}

pub fn contract_components(forests: &[ColorForest]) -> ContractionMap {
    ContractionMap {
        forests: forests.to_vec(),
    }
}

impl ContractionMap {
    fn forest(&self, c: usize) -> Option<&ColorForest> {
        self.forests.iter().find(|f| f.color == c)
    }

    /// Component id of point `p` in color `c`, `None` if `p ∉ S_c`.
    pub fn component_of(&self, c: usize, p: usize) -> Option<usize> {
        self.forest(c)?.label_of(p)
    }

    pub fn component_count(&self, c: usize) -> usize {
        self.forest(c).map_or(0, |f| f.n_components)
    }

    /// Shortest pair `(u, v)` with `u` in component `i` and `v` in component `j`
    /// of color `c` for which `admissible(u, v)` holds.
    pub fn shortest_connection<F: Fn(usize, usize) -> bool>(
        &self,
        inst: &Instance,
        c: usize,
        i: usize,
        j: usize,
        admissible: F,
    ) -> Option<(Edge, f64)> {
        let f = self.forest(c)?;
        let side = |l: usize| -> Vec<usize> {
            f.points
                .iter()
                .zip(&f.labels)
                .filter(|&(_, &x)| x == l)
                .map(|(&p, _)| p)
                .collect()
        };
        let (left, right) = (side(i), side(j));
        let mut best: Option<(Edge, f64)> = None;
        for &u in &left {
            for &v in &right {
                if u == v || !admissible(u, v) {
                    continue;
                }
                let e = Edge::new(u, v);
                let w = inst.dist(u, v);
                if best.is_none_or(|(be, bw)| edge_order(w, e, bw, be) == Ordering::Less) {
                    best = Some((e, w));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::ColorSet;
    use crate::instance::{solution_cost, Point};

    fn all_spanning_trees(pts: &[(f64, f64)]) -> (f64, Vec<Vec<Edge>>) {
        let n = pts.len();
        let pairs: Vec<Edge> = (0..n).flat_map(|a| (a + 1..n).map(move |b| Edge::new(a, b))).collect();
        let mut best = f64::INFINITY;
        let mut trees = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            if mask.count_ones() as usize != n - 1 {
                continue;
            }
            let mut uf = UnionFind::new(n);
            let chosen: Vec<Edge> = (0..pairs.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            if chosen.iter().all(|e| uf.union(e.a, e.b)) {
                let w: f64 = chosen.iter().map(|e| dist(pts[e.a], pts[e.b])).sum();
                if w < best - 1e-12 {
                    best = w;
                    trees.clear();
                }
                if (w - best).abs() <= 1e-12 {
                    trees.push(chosen);
                }
            }
        }
        (best, trees)
    }

    #[test]
    fn mst_examples() {
        assert!(euclidean_mst(&[(0.0, 0.0)]).is_empty());
        assert!(euclidean_mst(&[]).is_empty());
        let line = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)];
        let (best, trees) = all_spanning_trees(&line);
        assert_eq!(best, 3.0);
        assert_eq!(euclidean_mst(&line), vec![Edge::new(0, 1), Edge::new(1, 2)]);
        assert_eq!(trees, vec![euclidean_mst(&line)]);

        let square = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        let (best, trees) = all_spanning_trees(&square);
        assert_eq!(best, 3.0);
        assert_eq!(trees.len(), 4);
        let t = euclidean_mst(&square);
        assert!(trees.contains(&t));
        assert_eq!(t, vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 3)]);
        assert_eq!(delaunay_mst(&square).unwrap(), t);
    }

    #[test]
    fn delaunay_handles_collinear_and_grids() {
        let line: Vec<(f64, f64)> = (0..50).map(|i| (i as f64 * 0.5, 0.0)).collect();
        assert_eq!(delaunay_mst(&line).unwrap(), prim_mst(&line));
        let grid: Vec<(f64, f64)> = (0..100).map(|i| ((i % 10) as f64, (i / 10) as f64)).collect();
        assert_eq!(delaunay_mst(&grid).unwrap(), prim_mst(&grid));
        assert_eq!(boruvka_mst(&grid), prim_mst(&grid));
        let column: Vec<(f64, f64)> = (0..300).map(|i| (2.0, ((i * 37) % 300) as f64 * 0.25)).collect();
        assert_eq!(line_mst(&column).unwrap(), prim_mst(&column));
        assert_eq!(euclidean_mst(&column), prim_mst(&column));
        assert!(line_mst(&grid).is_none());
    }

    fn line_instance(xs: &[f64], colors: &[&[usize]], k: usize) -> Instance {
        let pts = xs
            .iter()
            .zip(colors)
            .map(|(&x, c)| Point::new(x, 0.0, ColorSet::from_colors(c.iter().copied())))
            .collect();
        Instance::new(k, pts).unwrap()
    }

    #[test]
    fn forced_examples() {
        let inst = line_instance(&[0.0, 1.0, 3.0], &[&[1, 2], &[1], &[1, 2]], 2);
        let f = forced_edges(&inst, 1);
        assert_eq!(f.edges, vec![Edge::new(0, 1)]);
        assert_eq!(f.n_components, 2);
        assert_eq!(f.components(), vec![vec![0, 1], vec![2]]);
        assert_eq!(f.mst_edges - 2 + 1, f.edges.len());

        let mono = line_instance(&[0.0, 1.0, 3.0], &[&[1], &[1], &[1]], 1);
        let f = forced_edges(&mono, 1);
        assert_eq!(f.edges.len(), 2);
        assert_eq!(f.n_components, 1);

        let single = line_instance(&[0.0, 1.0], &[&[1], &[2]], 2);
        let f = forced_edges(&single, 1);
        assert!(f.edges.is_empty());
        assert_eq!(f.n_components, 1);
    }

    #[test]
    fn contraction_examples() {
        let inst = line_instance(&[0.0, 1.0, 3.0], &[&[1, 2], &[1], &[1, 2]], 2);
        let map = contract_components(&all_forced(&inst));
        assert_eq!(map.component_count(1), 2);
        assert_eq!(map.component_of(1, 0), map.component_of(1, 1));
        assert_ne!(map.component_of(1, 0), map.component_of(1, 2));
        let (e, w) = map.shortest_connection(&inst, 1, 0, 1, |_, _| true).unwrap();
        assert_eq!((e, w), (Edge::new(1, 2), 2.0));
        // the two crossing pairs are (0,2) of length 3 and (1,2) of length 2
        let alt = map.shortest_connection(&inst, 1, 0, 1, |u, _| u != 1).unwrap();
        assert_eq!(alt, (Edge::new(0, 2), 3.0));

        let one = line_instance(&[0.0, 1.0], &[&[1], &[1]], 1);
        let map = contract_components(&all_forced(&one));
        assert_eq!(map.component_of(1, 0), Some(0));
        assert_eq!(map.component_of(1, 1), Some(0));
        assert_eq!(solution_cost(&one, &forced_union(&all_forced(&one))), 1.0);
    }
}
