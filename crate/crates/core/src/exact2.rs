//! Exact Min-2CSG by search over purple forests.
//!
//! With two colors, an optimal solution splits into the edges between purple
//! (bichromatic) points, which form a forest `A`, and for each color a cheapest
//! completion that connects the forced-forest components once `A` is contracted.
//! The solver enumerates every forest `A` and evaluates both completions as MSTs
//! over the contracted components.

use crate::color::ColorSet;
use crate::error::{CsgError, Result};
use crate::instance::{approx_eq, normalize_edges, Edge, Instance, Solution};
use crate::mst::{edge_order, forced_forest_with, ColorForest};
use crate::unionfind::UnionFind;

pub const DEFAULT_M_LIMIT: usize = 9;
/// Hard cap on the purple vertex count, set by the fixed-size label arrays.
const MAX_M: usize = 16;

/// A two-color view `α_pair(p) = α(p) ∩ {c1, c2}` of an instance, restricted to
/// `S_c1 ∪ S_c2`, with optional groups of purple points that count as already
/// connected in both colors.
#[derive(Clone, Debug)]
pub struct PairProjection<'a> {
    base: &'a Instance,
    pair: (usize, usize),
    groups: Vec<Vec<usize>>,
}

impl<'a> PairProjection<'a> {
    pub fn new(base: &'a Instance, c1: usize, c2: usize) -> Result<Self> {
        let k = base.k();
        if c1 == c2 || !(1..=k).contains(&c1) || !(1..=k).contains(&c2) {
            return Err(CsgError::InvalidArgument(format!(
                "color pair ({c1}, {c2}) is not two distinct colors of 1..={k}"
            )));
        }
        Ok(PairProjection {
            base,
            pair: (c1.min(c2), c1.max(c2)),
            groups: Vec::new(),
        })
    }

    /// Adds pre-connected groups. Every member must carry both colors of the pair.
    pub fn with_groups(mut self, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; self.base.n()];
        for g in &groups {
            for &p in g {
                if p >= self.base.n() {
                    return Err(CsgError::InvalidArgument(format!("group member {p} out of range")));
                }
                if !self.is_purple(p) {
                    return Err(CsgError::InvalidArgument(format!(
                        "group member {p} does not carry both colors {} and {}",
                        self.pair.0, self.pair.1
                    )));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(CsgError::InvalidArgument(format!("point {p} is in two groups")));
                }
            }
        }
        self.groups = groups.into_iter().filter(|g| g.len() > 1).collect();
        Ok(self)
    }

    pub fn base(&self) -> &Instance {
        self.base
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    fn pair_set(&self) -> ColorSet {
        ColorSet::from_colors([self.pair.0, self.pair.1])
    }

    pub fn projected_color(&self, p: usize) -> ColorSet {
        self.base.colors(p).intersection(self.pair_set())
    }

    pub fn is_purple(&self, p: usize) -> bool {
        self.projected_color(p) == self.pair_set()
    }

    /// Points of `S_c1 ∪ S_c2`.
    pub fn points(&self) -> Vec<usize> {
        (0..self.base.n())
            .filter(|&p| !self.projected_color(p).is_empty())
            .collect()
    }

    pub fn purple_points(&self) -> Vec<usize> {
        (0..self.base.n()).filter(|&p| self.is_purple(p)).collect()
    }

    /// Forced forest of one pair color, treating purple points as the multichromatic ones.
    pub fn forced(&self, c: usize) -> ColorForest {
        forced_forest_with(self.base, c, self.base.class(c), |p| self.is_purple(p))
    }
}

/// An acyclic edge set between purple points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurpleForest {
    pub edges: Vec<Edge>,
}

/// Every acyclic edge subset of the complete graph on `m` labeled vertices,
/// each exactly once, starting with the empty forest.
pub fn enumerate_forests(m: usize) -> Vec<PurpleForest> {
    let pairs: Vec<Edge> = (0..m).flat_map(|a| (a + 1..m).map(move |b| Edge::new(a, b))).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let labels: Vec<usize> = (0..m).collect();
    forest_rec(&pairs, 0, &labels, &mut chosen, &mut out);
    out
}

fn forest_rec(pairs: &[Edge], i: usize, labels: &[usize], chosen: &mut Vec<Edge>, out: &mut Vec<PurpleForest>) {
    if i == pairs.len() {
        out.push(PurpleForest { edges: chosen.clone() });
        return;
    }
    forest_rec(pairs, i + 1, labels, chosen, out);
    let e = pairs[i];
    let (la, lb) = (labels[e.a], labels[e.b]);
    if la != lb {
        let merged: Vec<usize> = labels.iter().map(|&l| if l == lb { la } else { l }).collect();
        chosen.push(e);
        forest_rec(pairs, i + 1, &merged, chosen, out);
        chosen.pop();
    }
}

type Labels = [u8; MAX_M];

fn relabel(labels: &mut Labels, m: usize, from: u8, to: u8) {
    for l in labels.iter_mut().take(m) {
        if *l == from {
            *l = to;
        }
    }
}

/// Precomputed data for one projection: forced forests, the purple super-vertices
/// (groups contracted), and per-color shortest links between super-vertices.
struct Engine {
    forests: [ColorForest; 2],
    /// super-vertex of each purple point, by purple rank
    m: usize,
    /// candidate purple edges between super-vertices, ascending
    purple_links: Vec<(usize, usize, Edge, f64)>,
    /// per color, candidate completion links between super-vertices, ascending
    color_links: [Vec<(usize, usize, Edge, f64)>; 2],
}

fn super_of_point(purple: &[usize], super_of: &[usize], forest: &ColorForest) -> Vec<usize> {
    // each forest component holds exactly one purple point
    let mut comp_super = vec![usize::MAX; forest.n_components];
    for (r, &p) in purple.iter().enumerate() {
        if let Some(l) = forest.label_of(p) {
            comp_super[l] = super_of[r];
        }
    }
    forest.labels.iter().map(|&l| comp_super[l]).collect()
}

fn sorted_links(mut links: Vec<(usize, usize, Edge, f64)>) -> Vec<(usize, usize, Edge, f64)> {
    links.sort_by(|x, y| edge_order(x.3, x.2, y.3, y.2));
    links
}

/// Cheapest link per unordered super-vertex pair.
fn best_links<I: Iterator<Item = (usize, usize, Edge, f64)>>(m: usize, it: I) -> Vec<(usize, usize, Edge, f64)> {
    let mut best: Vec<Option<(Edge, f64)>> = vec![None; m * m];
    for (s, t, e, w) in it {
        if s == t {
            continue;
        }
        let (s, t) = (s.min(t), s.max(t));
        let slot = &mut best[s * m + t];
        if slot.is_none_or(|(be, bw)| edge_order(w, e, bw, be).is_lt()) {
            *slot = Some((e, w));
        }
    }
    let mut out = Vec::new();
    for s in 0..m {
        for t in s + 1..m {
            if let Some((e, w)) = best[s * m + t] {
                out.push((s, t, e, w));
            }
        }
    }
    sorted_links(out)
}

impl Engine {
    fn new(proj: &PairProjection, m_limit: usize) -> Result<Self> {
        let inst = proj.base();
        let (c1, c2) = proj.pair();
        let forests = [proj.forced(c1), proj.forced(c2)];
        let purple = proj.purple_points();
        let mut uf = UnionFind::new(purple.len());
        for g in proj.groups() {
            let r0 = purple.binary_search(&g[0]).expect("group members are purple");
            for p in &g[1..] {
                let r = purple.binary_search(p).expect("group members are purple");
                uf.union(r0, r);
            }
        }
        let super_of = uf.labels();
        let m = uf.components();
        let limit = m_limit.min(MAX_M);
        if m > limit {
            return Err(CsgError::LimitExceeded {
                what: "purple point count (groups count once)",
                actual: m,
                limit,
            });
        }
        let purple_links = best_links(
            m,
            (0..purple.len()).flat_map(|i| {
                let (purple, super_of) = (&purple, &super_of);
                (i + 1..purple.len()).map(move |j| {
                    let e = Edge::new(purple[i], purple[j]);
                    (super_of[i], super_of[j], e, inst.edge_len(e))
                })
            }),
        );
        let color_links = [0, 1].map(|ci| {
            let f = &forests[ci];
            if purple.is_empty() {
                return Vec::new();
            }
            let sup = super_of_point(&purple, &super_of, f);
            let pts = &f.points;
            best_links(
                m,
                (0..pts.len()).flat_map(|i| {
                    let sup = &sup;
                    (i + 1..pts.len()).map(move |j| {
                        let e = Edge::new(pts[i], pts[j]);
                        (sup[i], sup[j], e, inst.edge_len(e))
                    })
                }),
            )
        });
        Ok(Engine {
            forests,
            m,
            purple_links,
            color_links,
        })
    }

    fn forced_cost(&self, inst: &Instance) -> f64 {
        self.forests
            .iter()
            .flat_map(|f| f.edges.iter())
            .map(|&e| inst.edge_len(e))
            .sum()
    }

    /// Kruskal completion of one color on top of `labels`; `None` if disconnected.
    fn completion(&self, ci: usize, labels: &Labels, picks: Option<&mut Vec<Edge>>) -> Option<f64> {
        let m = self.m;
        let mut lab = *labels;
        let mut comps = {
            let mut seen = [false; MAX_M];
            lab.iter()
                .take(m)
                .filter(|&&l| !std::mem::replace(&mut seen[l as usize], true))
                .count()
        };
        let mut cost = 0.0;
        let mut picks = picks;
        for &(s, t, e, w) in &self.color_links[ci] {
            if comps == 1 {
                break;
            }
            let (ls, lt) = (lab[s], lab[t]);
            if ls != lt {
                relabel(&mut lab, m, lt, ls);
                comps -= 1;
                cost += w;
                if let Some(p) = picks.as_deref_mut() {
                    p.push(e);
                }
            }
        }
        (comps <= 1).then_some(cost)
    }

    fn leaf_cost(&self, labels: &Labels) -> Option<f64> {
        Some(self.completion(0, labels, None)? + self.completion(1, labels, None)?)
    }

    fn search(&self, i: usize, labels: &Labels, w: f64, chosen: &mut Vec<usize>, best: &mut (f64, Vec<usize>)) {
        if w >= best.0 {
            return;
        }
        if i == self.purple_links.len() {
            if let Some(c) = self.leaf_cost(labels) {
                let total = w + c;
                if total < best.0 {
                    *best = (total, chosen.clone());
                }
            }
            return;
        }
        // include first: the first leaf is the greedy forest, a strong incumbent
        let (s, t, _, lw) = self.purple_links[i];
        let (ls, lt) = (labels[s], labels[t]);
        if ls != lt {
            let mut next = *labels;
            relabel(&mut next, self.m, lt, ls);
            chosen.push(i);
            self.search(i + 1, &next, w + lw, chosen, best);
            chosen.pop();
        }
        self.search(i + 1, labels, w, chosen, best);
    }

    fn initial_labels(&self) -> Labels {
        let mut l = [0u8; MAX_M];
        for (i, x) in l.iter_mut().enumerate().take(self.m) {
            *x = i as u8;
        }
        l
    }
}

/// Minimum-cost colored spanning graph of the projection. Refuses when the
/// number of purple super-vertices exceeds `m_limit`.
pub fn solve_pair(proj: &PairProjection, m_limit: usize) -> Result<Solution> {
    let inst = proj.base();
    let engine = Engine::new(proj, m_limit)?;
    let mut edges: Vec<Edge> = engine.forests.iter().flat_map(|f| f.edges.iter().copied()).collect();
    let label = format!("exact2[{},{}]", proj.pair().0, proj.pair().1);
    if engine.m == 0 {
        return Ok(Solution::new(inst, label, edges, Some(1.0)));
    }
    let mut best = (f64::INFINITY, Vec::new());
    let start = engine.initial_labels();
    engine.search(0, &start, 0.0, &mut Vec::new(), &mut best);
    if !best.0.is_finite() {
        return Err(CsgError::Invariant("no purple forest completes both colors".into()));
    }
    let mut labels = start;
    for &i in &best.1 {
        let (s, t, e, _) = engine.purple_links[i];
        let (ls, lt) = (labels[s], labels[t]);
        relabel(&mut labels, engine.m, lt, ls);
        edges.push(e);
    }
    for ci in 0..2 {
        engine.completion(ci, &labels, Some(&mut edges));
    }
    normalize_edges(&mut edges);
    let sol = Solution::new(inst, label, edges, Some(1.0));
    let expected = best.0 + engine.forced_cost(inst);
    if !approx_eq(sol.cost, expected) {
        return Err(CsgError::Invariant(format!(
            "reconstructed cost {} differs from search value {expected}",
            sol.cost
        )));
    }
    Ok(sol)
}

/// `w(f)` plus the cheapest completion of each pair color once the forced forests,
/// the groups and `f` are contracted. Infinite if `f` has a cycle over the
/// contracted purple vertices or an edge leaves the purple set.
pub fn completion_cost(proj: &PairProjection, f: &PurpleForest) -> Result<f64> {
    let inst = proj.base();
    let engine = Engine::new(proj, MAX_M)?;
    let purple = proj.purple_points();
    let mut labels = engine.initial_labels();
    if engine.m > 0 {
        // recompute the super-vertex of each purple point the same way Engine does
        let mut uf = UnionFind::new(purple.len());
        for g in proj.groups() {
            let r0 = purple.binary_search(&g[0]).expect("purple");
            for p in &g[1..] {
                uf.union(r0, purple.binary_search(p).expect("purple"));
            }
        }
        let super_of = uf.labels();
        for e in &f.edges {
            let (Ok(ra), Ok(rb)) = (purple.binary_search(&e.a), purple.binary_search(&e.b)) else {
                return Err(CsgError::InvalidArgument(format!(
                    "edge ({}, {}) is not between purple points",
                    e.a, e.b
                )));
            };
            let (ls, lt) = (labels[super_of[ra]], labels[super_of[rb]]);
            if ls == lt {
                return Ok(f64::INFINITY);
            }
            relabel(&mut labels, engine.m, lt, ls);
        }
    } else if !f.edges.is_empty() {
        return Err(CsgError::InvalidArgument("no purple points".into()));
    }
    let w: f64 = f.edges.iter().map(|&e| inst.edge_len(e)).sum();
    let c = if engine.m == 0 {
        Some(0.0)
    } else {
        engine.leaf_cost(&labels)
    };
    Ok(c.map_or(f64::INFINITY, |c| w + c + engine.forced_cost(inst)))
}

/// Exact solver for instances with one or two colors.
pub fn solve_exact2(inst: &Instance, m_limit: usize) -> Result<Solution> {
    match inst.k() {
        1 => {
            let f = crate::mst::forced_edges(inst, 1);
            Ok(Solution::new(inst, "exact2", f.edges, Some(1.0)))
        }
        2 => {
            let mut s = solve_pair(&PairProjection::new(inst, 1, 2)?, m_limit)?;
            s.algorithm = "exact2".into();
            Ok(s)
        }
        k => Err(CsgError::NotApplicable(format!(
            "exact2 needs k <= 2 or an explicit color pair, got k = {k}"
        ))),
    }
}
