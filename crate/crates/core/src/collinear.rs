//! Exact Min-kCSG on collinear points.

use std::collections::{HashMap, HashSet};

use crate::color::ColorSet;
use crate::error::{CsgError, Result};
use crate::instance::{approx_eq, edge_color, normalize_edges, Edge, Instance, Solution};

/// Tolerance of the collinearity test, relative to the instance extent.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Point indices ordered along the common line, or `NotApplicable` if the points
/// are not collinear or two of them project to the same position.
pub fn line_order(inst: &Instance) -> Result<Vec<usize>> {
    let pts = inst.points();
    let p0 = pts[0];
    if pts.len() == 1 {
        return Ok(vec![0]);
    }
    let (mut dx, mut dy) = (pts[1].x - p0.x, pts[1].y - p0.y);
    if dx < 0.0 || (dx == 0.0 && dy < 0.0) {
        dx = -dx;
        dy = -dy;
    }
    let len = dx.hypot(dy);
    let (ux, uy) = (dx / len, dy / len);
    let scale = pts
        .iter()
        .map(|p| (p.x - p0.x).abs().max((p.y - p0.y).abs()))
        .fold(1.0_f64, f64::max);
    let mut keyed = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let (vx, vy) = (p.x - p0.x, p.y - p0.y);
        if (ux * vy - uy * vx).abs() > COLLINEAR_TOL * scale {
            return Err(CsgError::NotApplicable(format!(
                "point {i} is off the line through points 0 and 1"
            )));
        }
        keyed.push((ux * vx + uy * vy, i));
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for w in keyed.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(CsgError::NotApplicable(format!(
                "points {} and {} share a position on the line",
                w[0].1, w[1].1
            )));
        }
    }
    Ok(keyed.into_iter().map(|(_, i)| i).collect())
}

pub fn is_collinear(inst: &Instance) -> bool {
    line_order(inst).is_ok()
}

/// Rank of every point in `order`.
fn ranks(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// True if no point strictly between the endpoints of `e` carries all of `α(e)`.
pub fn has_star(inst: &Instance, order: &[usize], rank: &[usize], e: Edge) -> bool {
    let gamma = edge_color(inst, e);
    let (lo, hi) = {
        let (x, y) = (rank[e.a], rank[e.b]);
        (x.min(y), x.max(y))
    };
    !order[lo + 1..hi].iter().any(|&r| gamma.is_subset(inst.colors(r)))
}

/// Candidate edges with property (★): nonempty shared color and no intermediate
/// point containing it.
pub fn star_candidates(inst: &Instance) -> Result<Vec<Edge>> {
    let order = line_order(inst)?;
    let rank = ranks(&order);
    let mut out: Vec<Edge> = crate::instance::candidate_edges(inst)
        .into_iter()
        .filter(|&e| has_star(inst, &order, &rank, e))
        .collect();
    normalize_edges(&mut out);
    Ok(out)
}

/// Splits every edge at the intermediate points that carry its whole shared
/// color until property (★) holds. Lengths add up along the line, so the cost of
/// the multiset of edges is preserved; duplicates created by the splits are merged.
pub fn normalize_star(inst: &Instance, edges: &[Edge]) -> Result<Vec<Edge>> {
    let order = line_order(inst)?;
    let rank = ranks(&order);
    let mut out = Vec::with_capacity(edges.len());
    for &e in edges {
        let gamma: ColorSet = edge_color(inst, e);
        let (lo, hi) = {
            let (x, y) = (rank[e.a], rank[e.b]);
            (x.min(y), x.max(y))
        };
        let mut prev = order[lo];
        for &r in &order[lo + 1..hi] {
            if gamma.is_subset(inst.colors(r)) {
                out.push(Edge::new(prev, r));
                prev = r;
            }
        }
        out.push(Edge::new(prev, order[hi]));
    }
    normalize_edges(&mut out);
    Ok(out)
}

/// Default cap on `k` for [`dp_solve`]; the state space grows doubly exponentially in `k`.
pub const DEFAULT_K_GUARD: usize = 6;

/// Bell number `B(t)`, the number of partitions of a `t`-element set.
pub fn bell(t: usize) -> u128 {
    // Bell triangle
    let mut row = vec![1u128];
    for _ in 0..t {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("nonempty row"));
        for &x in &row {
            let last = *next.last().expect("nonempty row");
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Points in line order with the endpoint tables of every cut.
///
/// Cut `j` (0-based) separates the first `j + 1` points in line order from the
/// rest; the last cut, `n − 1`, has nothing on its right.
#[derive(Clone, Debug)]
pub struct CollinearContext<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    colors: Vec<ColorSet>,
    k: usize,
    /// `left[j * g + γ]`: largest position `a ≤ j` with `γ ⊆ α(p_a)`
    left: Vec<u32>,
    /// `right[j * g + γ]`: smallest position `b > j` with `γ ⊆ α(p_b)`
    right: Vec<u32>,
    /// colors present on both sides of each cut
    split: Vec<ColorSet>,
}

const NONE: u32 = u32::MAX;

/// Color families `Γ` are bitmasks over the color sets `γ` (bit `γ.bits()`).
type Gamma = u64;

fn gammas(mask: Gamma) -> impl Iterator<Item = u16> {
    (1u16..64).filter(move |&g| mask >> g & 1 == 1)
}

impl<'a> CollinearContext<'a> {
    pub fn new(inst: &'a Instance, k_guard: usize) -> Result<Self> {
        let k = inst.k();
        if k > k_guard || k > 6 {
            return Err(CsgError::LimitExceeded {
                what: "color count for the collinear dynamic program",
                actual: k,
                limit: k_guard.min(6),
            });
        }
        let order = line_order(inst)?;
        let colors: Vec<ColorSet> = order.iter().map(|&i| inst.colors(i)).collect();
        let n = order.len();
        let g = 1usize << k;
        let mut left = vec![NONE; n * g];
        let mut last = vec![NONE; g];
        for j in 0..n {
            for (gm, slot) in last.iter_mut().enumerate().skip(1) {
                if ColorSet::from_bits(gm as u16).is_subset(colors[j]) {
                    *slot = j as u32;
                }
            }
            left[j * g..(j + 1) * g].copy_from_slice(&last);
        }
        let mut right = vec![NONE; n * g];
        let mut next = vec![NONE; g];
        for j in (0..n).rev() {
            right[j * g..(j + 1) * g].copy_from_slice(&next);
            for (gm, slot) in next.iter_mut().enumerate().skip(1) {
                if ColorSet::from_bits(gm as u16).is_subset(colors[j]) {
                    *slot = j as u32;
                }
            }
        }
        let mut prefix = vec![ColorSet::EMPTY; n];
        let mut acc = ColorSet::EMPTY;
        for j in 0..n {
            acc = acc.union(colors[j]);
            prefix[j] = acc;
        }
        let mut split = vec![ColorSet::EMPTY; n];
        let mut suffix = ColorSet::EMPTY;
        for j in (0..n).rev() {
            split[j] = prefix[j].intersection(suffix);
            suffix = suffix.union(colors[j]);
        }
        Ok(CollinearContext {
            inst,
            order,
            colors,
            k,
            left,
            right,
            split,
        })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    fn g(&self) -> usize {
        1 << self.k
    }

    fn left_of(&self, j: usize, gm: u16) -> u32 {
        self.left[j * self.g() + gm as usize]
    }

    fn right_of(&self, j: usize, gm: u16) -> u32 {
        self.right[j * self.g() + gm as usize]
    }

    /// The unique cut edge of color exactly `γ` at cut `j`, as positions in line order.
    pub fn endpoints(&self, j: usize, gm: ColorSet) -> Option<(usize, usize)> {
        let b = gm.bits();
        if b == 0 || (b as usize) >= self.g() || j + 1 >= self.n() {
            return None;
        }
        let (a, c) = (self.left_of(j, b), self.right_of(j, b));
        if a == NONE || c == NONE {
            return None;
        }
        let (a, c) = (a as usize, c as usize);
        (self.colors[a].intersection(self.colors[c]) == gm).then_some((a, c))
    }

    fn realizable(&self, j: usize, gm: u16) -> bool {
        self.endpoints(j, ColorSet::from_bits(gm)).is_some()
    }

    fn weight(&self, a: usize, b: usize) -> f64 {
        self.inst.dist(self.order[a], self.order[b])
    }

    fn valid(&self, j: usize, gamma: Gamma) -> bool {
        if j + 1 >= self.n() {
            return gamma == 0;
        }
        let carried = gammas(gamma).fold(ColorSet::EMPTY, |acc, g| acc.union(ColorSet::from_bits(g)));
        self.split[j].is_subset(carried)
    }
}

/// The cut edges encoded by a color family at one cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutEdgeSet {
    pub cut: usize,
    /// Color sets, ascending by bit encoding.
    pub gamma: Vec<ColorSet>,
    /// `edges[i]` is the unique edge of color `gamma[i]`, in instance indices.
    pub edges: Vec<Edge>,
}

impl CutEdgeSet {
    fn mask(&self) -> Gamma {
        self.gamma.iter().fold(0, |m, g| m | 1 << g.bits())
    }
}

/// Materializes the edge of every `γ` at cut `j`; `None` if some `γ` has no edge
/// of exactly that color across the cut.
pub fn cut_edges(ctx: &CollinearContext, j: usize, gamma: &[ColorSet]) -> Option<CutEdgeSet> {
    let mut gs = gamma.to_vec();
    gs.sort_unstable();
    gs.dedup();
    let mut edges = Vec::with_capacity(gs.len());
    for &gm in &gs {
        let (a, b) = ctx.endpoints(j, gm)?;
        edges.push(Edge::new(ctx.order[a], ctx.order[b]));
    }
    Some(CutEdgeSet {
        cut: j,
        gamma: gs,
        edges,
    })
}

/// Every color with points on both sides of the cut is carried by some cut edge.
pub fn is_valid_cut(ctx: &CollinearContext, cutset: &CutEdgeSet) -> bool {
    ctx.valid(cutset.cut, cutset.mask())
}

/// Consecutive cut edge sets differ only in edges incident to the point between them.
pub fn compatible(ctx: &CollinearContext, prev: &CutEdgeSet, next: &CutEdgeSet) -> bool {
    if prev.cut + 1 != next.cut {
        return false;
    }
    let p = ctx.order[next.cut];
    prev.edges
        .iter()
        .filter(|e| !next.edges.contains(e))
        .chain(next.edges.iter().filter(|e| !prev.edges.contains(e)))
        .all(|e| e.a == p || e.b == p)
}

/// Per color, a partition of the cut edges carrying that color, as a restricted
/// growth string over those edges in ascending color-set order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartitionVector {
    pub classes: Vec<Vec<u8>>,
}

fn restricted_growth(labels: &[usize]) -> Vec<u8> {
    let mut map: Vec<(usize, u8)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(x, _)| *x == l) {
            Some(&(_, v)) => v,
            None => {
                let v = map.len() as u8;
                map.push((l, v));
                v
            }
        })
        .collect()
}

fn gammas_with(mask: Gamma, c: usize) -> Vec<u16> {
    gammas(mask).filter(|&g| ColorSet::from_bits(g).contains(c)).collect()
}

impl PartitionVector {
    /// All-singletons partition for `gamma`.
    pub fn discrete(k: usize, gamma: &[ColorSet]) -> Self {
        let mask = gamma.iter().fold(0u64, |m, g| m | 1 << g.bits());
        PartitionVector {
            classes: (1..=k)
                .map(|c| (0..gammas_with(mask, c).len() as u8).collect())
                .collect(),
        }
    }

    fn key(&self) -> Box<[u8]> {
        let mut v = Vec::new();
        for c in &self.classes {
            v.extend_from_slice(c);
            v.push(u8::MAX);
        }
        v.into_boxed_slice()
    }

    fn from_key(k: usize, key: &[u8]) -> Self {
        let mut classes = Vec::with_capacity(k);
        let mut cur = Vec::new();
        for &b in key {
            if b == u8::MAX {
                classes.push(std::mem::take(&mut cur));
            } else {
                cur.push(b);
            }
        }
        PartitionVector { classes }
    }
}

/// Partition of the previous cut's edges induced by the next cut's partition:
/// two edges are related when their right endpoints lie in one component of the
/// suffix that starts at the point between the cuts.
pub fn hat_pi(
    ctx: &CollinearContext,
    prev: &CutEdgeSet,
    next: &CutEdgeSet,
    pi_next: &PartitionVector,
) -> Result<PartitionVector> {
    if !compatible(ctx, prev, next) {
        return Err(CsgError::InvalidArgument("cut edge sets are not compatible".into()));
    }
    let j = next.cut;
    let t_mask = prev
        .gamma
        .iter()
        .filter(|g| ctx.right_of(j - 1, g.bits()) as usize == j)
        .fold(0u64, |m, g| m | 1 << g.bits());
    Ok(PartitionVector::from_key(
        ctx.k,
        &hat_key(ctx, j, next.mask(), &pi_next.key(), prev.mask(), t_mask),
    ))
}

/// Core of [`hat_pi`] on encoded states. `t_mask` marks the previous edges that end at `p_j`.
fn hat_key(ctx: &CollinearContext, j: usize, next: Gamma, pi: &[u8], prev: Gamma, t_mask: Gamma) -> Box<[u8]> {
    let mut out = Vec::new();
    let mut pos = 0;
    for c in 1..=ctx.k {
        let next_c = gammas_with(next, c);
        let classes = &pi[pos..pos + next_c.len()];
        pos += next_c.len() + 1;
        // node 0 is p_j, node 1 + x is class x of π_j^c
        let n_classes = classes.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
        let mut uf = crate::unionfind::UnionFind::new(1 + n_classes);
        for (i, &g) in next_c.iter().enumerate() {
            if ctx.left_of(j, g) as usize == j {
                uf.union(0, 1 + classes[i] as usize);
            }
        }
        let labels: Vec<usize> = gammas_with(prev, c)
            .into_iter()
            .map(|g| {
                if t_mask >> g & 1 == 1 {
                    uf.find(0)
                } else {
                    let i = next_c
                        .iter()
                        .position(|&x| x == g)
                        .expect("persisting edge is cut at j");
                    uf.find(1 + classes[i] as usize)
                }
            })
            .collect();
        out.extend(restricted_growth(&labels));
        out.push(u8::MAX);
    }
    out.into_boxed_slice()
}

/// Condition (d2): `p_j` reaches the earlier points of every color it carries.
fn d2_holds(ctx: &CollinearContext, j: usize, next: Gamma, pi: &[u8], t_mask: Gamma, prefix_has: &[ColorSet]) -> bool {
    let mut pos = 0;
    for c in 1..=ctx.k {
        let next_c = gammas_with(next, c);
        let classes = &pi[pos..pos + next_c.len()];
        pos += next_c.len() + 1;
        if !ctx.colors[j].contains(c) || !prefix_has[j].contains(c) {
            continue;
        }
        if gammas(t_mask).any(|g| ColorSet::from_bits(g).contains(c)) {
            continue;
        }
        let mut ok = false;
        for (i, &f) in next_c.iter().enumerate() {
            if ctx.left_of(j, f) as usize != j {
                continue;
            }
            if next_c
                .iter()
                .enumerate()
                .any(|(h, &g)| ctx.left_of(j, g) < j as u32 && classes[h] == classes[i])
            {
                ok = true;
                break;
            }
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Per-cut counts reported by [`dp_solve_with_stats`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DpStats {
    /// Number of table entries at each cut.
    pub states_per_cut: Vec<usize>,
    /// Largest number of distinct partition vectors stored with one color family, per cut.
    pub max_partitions_per_gamma: Vec<usize>,
    /// Largest number of distinct `π^c` for one color family and one color, per cut.
    pub max_color_partitions: Vec<usize>,
    pub transitions: usize,
}

impl DpStats {
    pub fn total_states(&self) -> usize {
        self.states_per_cut.iter().sum()
    }
}

type ColorPartitions = HashSet<Vec<u8>>;

struct Transition {
    from: usize,
    add: f64,
    t_mask: Gamma,
}

struct Level {
    keys: Vec<(Gamma, Box<[u8]>)>,
    index: HashMap<(Gamma, Box<[u8]>), usize>,
    trans: Vec<Vec<Transition>>,
}

impl Level {
    fn new() -> Self {
        Level {
            keys: Vec::new(),
            index: HashMap::new(),
            trans: Vec::new(),
        }
    }

    fn intern(&mut self, key: (Gamma, Box<[u8]>)) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.keys.push(key.clone());
        self.index.insert(key, i);
        self.trans.push(Vec::new());
        i
    }
}

/// Exact minimum colored spanning graph of a collinear instance.
pub fn dp_solve(inst: &Instance, k_guard: usize) -> Result<Solution> {
    dp_solve_with_stats(inst, k_guard).map(|(s, _)| s)
}

/// [`dp_solve`] plus the table statistics.
///
/// States are generated backward from the final cut, so only combinations that
/// some suffix can produce are stored; values are then filled forward.
pub fn dp_solve_with_stats(inst: &Instance, k_guard: usize) -> Result<(Solution, DpStats)> {
    let ctx = CollinearContext::new(inst, k_guard)?;
    let n = ctx.n();
    let mut prefix_has = vec![ColorSet::EMPTY; n];
    let mut acc = ColorSet::EMPTY;
    for (j, slot) in prefix_has.iter_mut().enumerate() {
        *slot = acc;
        acc = acc.union(ctx.colors[j]);
    }
    // candidates ending at each position: γ realizable at cut j − 1 with right endpoint j
    let ending: Vec<Vec<u16>> = (0..n)
        .map(|j| {
            if j == 0 {
                return Vec::new();
            }
            (1..ctx.g() as u16)
                .filter(|&g| ctx.realizable(j - 1, g) && ctx.right_of(j - 1, g) as usize == j)
                .collect()
        })
        .collect();

    let mut levels: Vec<Level> = (0..n).map(|_| Level::new()).collect();
    let empty_pi: Box<[u8]> = vec![u8::MAX; ctx.k].into_boxed_slice();
    levels[n - 1].intern((0, empty_pi));
    let mut stats = DpStats::default();
    for j in (1..n).rev() {
        let (lower, upper) = levels.split_at_mut(j);
        let below = &mut lower[j - 1];
        let here = &mut upper[0];
        let cands = &ending[j];
        if cands.len() > 24 {
            return Err(CsgError::LimitExceeded {
                what: "cut edge candidates ending at one point",
                actual: cands.len(),
                limit: 24,
            });
        }
        for s in 0..here.keys.len() {
            let (next, ref pi) = here.keys[s];
            let pi = pi.clone();
            let keep: Gamma = gammas(next)
                .filter(|&g| ctx.left_of(j, g) as usize != j)
                .fold(0, |m, g| m | 1 << g);
            for sub in 0u32..(1u32 << cands.len()) {
                let t_mask: Gamma = cands
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| sub >> i & 1 == 1)
                    .fold(0, |m, (_, &g)| m | 1 << g);
                let prev = keep | t_mask;
                if !ctx.valid(j - 1, prev) {
                    continue;
                }
                if !d2_holds(&ctx, j, next, &pi, t_mask, &prefix_has) {
                    continue;
                }
                let hat = hat_key(&ctx, j, next, &pi, prev, t_mask);
                let from = below.intern((prev, hat));
                let add: f64 = gammas(t_mask)
                    .map(|g| ctx.left_of(j - 1, g) as usize)
                    .map(|a| ctx.weight(a, j))
                    .sum();
                here.trans[s].push(Transition { from, add, t_mask });
                stats.transitions += 1;
            }
        }
    }

    // forward evaluation
    let mut value: Vec<Vec<f64>> = levels.iter().map(|l| vec![f64::INFINITY; l.keys.len()]).collect();
    let mut back: Vec<Vec<usize>> = levels.iter().map(|l| vec![usize::MAX; l.keys.len()]).collect();
    for v in value[0].iter_mut() {
        *v = 0.0;
    }
    for j in 1..n {
        for s in 0..levels[j].keys.len() {
            for (t, tr) in levels[j].trans[s].iter().enumerate() {
                let cand = value[j - 1][tr.from] + tr.add;
                if cand < value[j][s] {
                    value[j][s] = cand;
                    back[j][s] = t;
                }
            }
        }
    }
    if !value[n - 1][0].is_finite() {
        return Err(CsgError::Invariant(
            "collinear table has no feasible final state".into(),
        ));
    }

    let mut edges = Vec::new();
    let mut s = 0;
    for j in (1..n).rev() {
        let tr = &levels[j].trans[s][back[j][s]];
        for g in gammas(tr.t_mask) {
            let a = ctx.left_of(j - 1, g) as usize;
            edges.push(Edge::new(ctx.order[a], ctx.order[j]));
        }
        s = tr.from;
    }

    for level in &levels {
        stats.states_per_cut.push(level.keys.len());
        // per family: number of partition vectors, and the distinct partitions of each color
        let mut per_gamma: HashMap<Gamma, (usize, Vec<ColorPartitions>)> = HashMap::new();
        for (g, key) in &level.keys {
            let entry = per_gamma
                .entry(*g)
                .or_insert_with(|| (0, vec![Default::default(); ctx.k]));
            entry.0 += 1;
            let pv = PartitionVector::from_key(ctx.k, key);
            for (c, cls) in pv.classes.into_iter().enumerate() {
                entry.1[c].insert(cls);
            }
        }
        stats
            .max_partitions_per_gamma
            .push(per_gamma.values().map(|e| e.0).max().unwrap_or(0));
        stats.max_color_partitions.push(
            per_gamma
                .values()
                .flat_map(|e| e.1.iter().map(|s| s.len()))
                .max()
                .unwrap_or(0),
        );
    }

    let sol = Solution::new(inst, "dp", edges, Some(1.0));
    if !approx_eq(sol.cost, value[n - 1][0]) {
        return Err(CsgError::Invariant(format!(
            "reconstructed cost {} differs from table value {}",
            sol.cost,
            value[n - 1][0]
        )));
    }
    if !crate::instance::is_csg(inst, &sol.edges) {
        return Err(CsgError::Invariant(
            "collinear table produced a disconnected color".into(),
        ));
    }
    Ok((sol, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_collinear, is_csg, solution_cost, Point};
    use crate::oracle::{brute_force, brute_force_with, OracleBudget, OracleOptions};

    fn line(xs: &[f64], colors: &[&[usize]], k: usize) -> Instance {
        let pts = xs
            .iter()
            .zip(colors)
            .map(|(&x, c)| Point::new(x, 0.0, ColorSet::from_colors(c.iter().copied())))
            .collect();
        Instance::new(k, pts).unwrap()
    }

    fn cs(c: &[usize]) -> ColorSet {
        ColorSet::from_colors(c.iter().copied())
    }

    #[test]
    fn bell_numbers() {
        let b: Vec<u128> = (0..8).map(bell).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52, 203, 877]);
    }

    #[test]
    fn order_and_collinearity() {
        let i = Instance::new(
            1,
            vec![
                Point::new(2.0, 2.0, cs(&[1])),
                Point::new(0.0, 0.0, cs(&[1])),
                Point::new(1.0, 1.0, cs(&[1])),
            ],
        )
        .unwrap();
        assert_eq!(line_order(&i).unwrap(), vec![1, 2, 0]);
        let bent = Instance::new(
            1,
            vec![
                Point::new(0.0, 0.0, cs(&[1])),
                Point::new(1.0, 0.0, cs(&[1])),
                Point::new(2.0, 0.1, cs(&[1])),
            ],
        )
        .unwrap();
        assert!(matches!(line_order(&bent), Err(CsgError::NotApplicable(_))));
    }

    #[test]
    fn star_examples() {
        let rbr = line(&[0.0, 1.0, 2.0], &[&[1], &[2], &[1]], 2);
        assert_eq!(normalize_star(&rbr, &[Edge::new(0, 2)]).unwrap(), vec![Edge::new(0, 2)]);
        let r_rb_r = line(&[0.0, 1.0, 2.0], &[&[1], &[1, 2], &[1]], 2);
        let split = normalize_star(&r_rb_r, &[Edge::new(0, 2)]).unwrap();
        assert_eq!(split, vec![Edge::new(0, 1), Edge::new(1, 2)]);
        assert_eq!(solution_cost(&r_rb_r, &split), 2.0);
        assert!(normalize_star(&r_rb_r, &[]).unwrap().is_empty());
    }

    #[test]
    fn cut_examples() {
        let rbr = line(&[0.0, 1.0, 2.0], &[&[1], &[2], &[1]], 2);
        let ctx = CollinearContext::new(&rbr, DEFAULT_K_GUARD).unwrap();
        let c = cut_edges(&ctx, 0, &[cs(&[1])]).unwrap();
        assert_eq!(c.edges, vec![Edge::new(0, 2)]);
        assert!(cut_edges(&ctx, 0, &[cs(&[1, 2])]).is_none());
        let empty = cut_edges(&ctx, 0, &[]).unwrap();
        assert!(empty.edges.is_empty());

        let rr = line(&[0.0, 1.0], &[&[1], &[1]], 1);
        let ctx = CollinearContext::new(&rr, DEFAULT_K_GUARD).unwrap();
        assert!(!is_valid_cut(&ctx, &cut_edges(&ctx, 0, &[]).unwrap()));
        assert!(is_valid_cut(&ctx, &cut_edges(&ctx, 0, &[cs(&[1])]).unwrap()));
        let rb = line(&[0.0, 1.0], &[&[1], &[2]], 2);
        let ctx = CollinearContext::new(&rb, DEFAULT_K_GUARD).unwrap();
        assert!(is_valid_cut(&ctx, &cut_edges(&ctx, 0, &[]).unwrap()));
    }

    #[test]
    fn compatibility_examples() {
        // p0{r} p1{r} p2{b} p3{r}
        let i = line(&[0.0, 1.0, 2.0, 3.0], &[&[1], &[1], &[2], &[1]], 2);
        let ctx = CollinearContext::new(&i, DEFAULT_K_GUARD).unwrap();
        let same0 = cut_edges(&ctx, 1, &[]).unwrap();
        let same1 = cut_edges(&ctx, 2, &[]).unwrap();
        assert!(compatible(&ctx, &same0, &same1));
        // the red edge at cut 1 is (p1, p3); at cut 2 it is the same edge
        let r1 = cut_edges(&ctx, 1, &[cs(&[1])]).unwrap();
        let r2 = cut_edges(&ctx, 2, &[cs(&[1])]).unwrap();
        assert_eq!(r1.edges, r2.edges);
        assert!(compatible(&ctx, &r1, &r2));
        // dropping (p1, p3), which does not touch p2, is not allowed
        assert!(!compatible(&ctx, &r1, &same1));
        // adding an edge that starts at p2 is allowed
        let j = line(&[0.0, 1.0, 2.0, 3.0], &[&[1], &[2], &[2], &[2]], 2);
        let ctx = CollinearContext::new(&j, DEFAULT_K_GUARD).unwrap();
        let a = cut_edges(&ctx, 0, &[]).unwrap();
        let b = cut_edges(&ctx, 1, &[cs(&[2])]).unwrap();
        assert_eq!(b.edges, vec![Edge::new(1, 2)]);
        assert!(compatible(&ctx, &a, &b));
    }

    /// Components of the suffix graph starting at `from`, as labels per point.
    fn suffix_labels(i: &Instance, from: usize, edges: &[Edge], c: usize) -> Vec<usize> {
        let mut uf = crate::unionfind::UnionFind::new(i.n());
        for &e in edges {
            if e.a >= from && edge_color(i, e).contains(c) {
                uf.union(e.a, e.b);
            }
        }
        (0..i.n()).map(|p| uf.find(p)).collect()
    }

    #[test]
    fn hat_matches_components() {
        // p0{r,b} p1{r} p2{b} p3{r} p4{r,b}
        let i = line(&[0.0, 1.0, 2.0, 3.0, 4.0], &[&[1, 2], &[1], &[2], &[1], &[1, 2]], 2);
        let ctx = CollinearContext::new(&i, DEFAULT_K_GUARD).unwrap();
        let prev = cut_edges(&ctx, 1, &[cs(&[1]), cs(&[1, 2])]).unwrap();
        let next = cut_edges(&ctx, 2, &[cs(&[1]), cs(&[1, 2])]).unwrap();
        assert_eq!(prev.edges, vec![Edge::new(1, 3), Edge::new(0, 4)]);
        assert_eq!(prev.edges, next.edges);

        for suffix in [vec![Edge::new(3, 4)], vec![]] {
            // partition of next's edges by components of S[3..]
            let lab = suffix_labels(&i, 3, &suffix, 1);
            let right: Vec<usize> = next.edges.iter().map(|e| lab[e.b]).collect();
            let pi = PartitionVector {
                classes: vec![restricted_growth(&right), vec![0]],
            };
            let hat = hat_pi(&ctx, &prev, &next, &pi).unwrap();
            let lab = suffix_labels(&i, 2, &suffix, 1);
            let direct: Vec<usize> = prev.edges.iter().map(|e| lab[e.b]).collect();
            assert_eq!(hat.classes[0], restricted_growth(&direct));
        }

        // two previous edges ending at p2 are related through p2
        let j = line(&[0.0, 1.0, 2.0, 3.0], &[&[1, 2], &[2], &[1, 2], &[1]], 2);
        let ctx = CollinearContext::new(&j, DEFAULT_K_GUARD).unwrap();
        let prev = cut_edges(&ctx, 1, &[cs(&[1, 2]), cs(&[2])]).unwrap();
        assert_eq!(prev.edges, vec![Edge::new(1, 2), Edge::new(0, 2)]);
        let next = cut_edges(&ctx, 2, &[cs(&[1])]).unwrap();
        let pi = PartitionVector::discrete(2, &next.gamma);
        let hat = hat_pi(&ctx, &prev, &next, &pi).unwrap();
        assert_eq!(hat.classes[1], vec![0, 0]);
        assert_eq!(hat.classes[0], vec![0]);
    }

    #[test]
    fn dp_examples() {
        let rbr = line(&[0.0, 1.0, 2.0], &[&[1], &[2], &[1]], 2);
        let s = dp_solve(&rbr, DEFAULT_K_GUARD).unwrap();
        assert_eq!(s.edges, vec![Edge::new(0, 2)]);
        assert!(approx_eq(s.cost, 2.0));

        let mono = line(&[0.0, 0.5, 1.7, 3.0, 3.25], &[&[1][..]; 5], 1);
        let s = dp_solve(&mono, DEFAULT_K_GUARD).unwrap();
        assert!(approx_eq(s.cost, 3.25));
        assert_eq!(s.edges.len(), 4);

        let i = line(&[0.0, 1.0, 3.0], &[&[1, 2], &[1], &[1, 2]], 2);
        let s = dp_solve(&i, DEFAULT_K_GUARD).unwrap();
        let opt = brute_force(&i, &OracleBudget::default()).unwrap();
        assert!(approx_eq(s.cost, opt.cost));
        // blue needs (p0, p2) of length 3, which also links red p0 and p2; p1 adds 1
        assert!(approx_eq(s.cost, 4.0));

        let single = line(&[0.0], &[&[1, 2]], 2);
        assert_eq!(dp_solve(&single, DEFAULT_K_GUARD).unwrap().cost, 0.0);
    }

    #[test]
    fn dp_matches_oracle_small() {
        for seed in 0..60 {
            let k = 2 + (seed % 2) as usize;
            let frac = [0.0, 0.3, 0.6, 1.0][(seed / 2 % 4) as usize];
            let i = generate_collinear(6, k, frac, seed).unwrap();
            let s = dp_solve(&i, DEFAULT_K_GUARD).unwrap();
            let opt = brute_force(&i, &OracleBudget::with_max_edges(40)).unwrap();
            let star = brute_force_with(
                &i,
                &OracleBudget::with_max_edges(40),
                &OracleOptions {
                    star_only: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(
                approx_eq(s.cost, opt.cost),
                "seed {seed}: dp {} oracle {}",
                s.cost,
                opt.cost
            );
            assert!(approx_eq(star.cost, opt.cost), "seed {seed}");
            assert!(is_csg(&i, &s.edges));
        }
    }

    #[test]
    fn guard_refuses() {
        let i = generate_collinear(8, 4, 0.5, 1).unwrap();
        assert!(matches!(
            dp_solve(&i, 3),
            Err(CsgError::LimitExceeded {
                actual: 4,
                limit: 3,
                ..
            })
        ));
    }
}
