use std::collections::HashMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::color::{ColorSet, MAX_COLORS};
use crate::error::{CsgError, Result};
use crate::unionfind::UnionFind;

/// Relative tolerance used by every cost comparison in the crate.
pub const REL_TOL: f64 = 1e-9;

/// `a == b` up to [`REL_TOL`], relative to the larger magnitude (absolute near zero).
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `a <= b` up to [`REL_TOL`].
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub colors: ColorSet,
}

impl Point {
    pub fn new(x: f64, y: f64, colors: ColorSet) -> Self {
        Point { x, y, colors }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// An undirected edge between two point indices, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    /// Builds the edge `{u, v}`; panics on a loop.
    pub fn new(u: usize, v: usize) -> Self {
        assert_ne!(u, v, "self-loop edge");
        Edge {
            a: u.min(v),
            b: u.max(v),
        }
    }
}

/// Sorts and deduplicates an edge list in place.
pub fn normalize_edges(edges: &mut Vec<Edge>) {
    edges.sort_unstable();
    edges.dedup();
}

/// The pair `(S, α)`: `k` primary colors and an ordered list of colored points.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    k: usize,
    points: Vec<Point>,
}

impl Instance {
    pub fn new(k: usize, points: Vec<Point>) -> Result<Self> {
        if !(1..=MAX_COLORS).contains(&k) {
            return Err(CsgError::InvalidInstance(format!(
                "k must lie in 1..={MAX_COLORS}, got {k}"
            )));
        }
        if points.is_empty() {
            return Err(CsgError::InvalidInstance("no points".into()));
        }
        let allowed = ColorSet::full(k);
        let mut seen: HashMap<(u64, u64), usize> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(CsgError::InvalidInstance(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
            if p.colors.is_empty() {
                return Err(CsgError::EmptyColorSet(i));
            }
            if !p.colors.is_subset(allowed) {
                return Err(CsgError::ColorOutOfRange {
                    color: p.colors.max_color(),
                    k,
                });
            }
            // +0.0 and -0.0 coincide
            let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
            if let Some(&j) = seen.get(&key) {
                return Err(CsgError::DuplicatePoint(j, i));
            }
            seen.insert(key, i);
        }
        Ok(Instance { k, points })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn colors(&self, i: usize) -> ColorSet {
        self.points[i].colors
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.points[i].dist(&self.points[j])
    }

    pub fn edge_len(&self, e: Edge) -> f64 {
        self.dist(e.a, e.b)
    }

    /// Indices of `S_c`, in point order.
    pub fn class(&self, c: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.colors(i).contains(c)).collect()
    }

    /// Indices of the multichromatic points of `S_c`.
    pub fn multichromatic_in(&self, c: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.colors(i).contains(c) && self.colors(i).is_multichromatic())
            .collect()
    }

    /// Applies `f` to every coordinate pair, keeping colors.
    pub fn map_coords<F: Fn(f64, f64) -> (f64, f64)>(&self, f: F) -> Result<Instance> {
        let pts = self
            .points
            .iter()
            .map(|p| {
                let (x, y) = f(p.x, p.y);
                Point::new(x, y, p.colors)
            })
            .collect();
        Instance::new(self.k, pts)
    }
}

/// `α(a) ∩ α(b)`.
pub fn edge_color(inst: &Instance, e: Edge) -> ColorSet {
    inst.colors(e.a).intersection(inst.colors(e.b))
}

/// Sum of Euclidean edge lengths.
pub fn solution_cost(inst: &Instance, edges: &[Edge]) -> f64 {
    edges.iter().map(|&e| inst.edge_len(e)).sum()
}

/// True iff every color class is connected by the edges whose shared color contains it.
pub fn is_csg(inst: &Instance, edges: &[Edge]) -> bool {
    (1..=inst.k()).all(|c| color_connected(inst, edges, c))
}

/// Connectivity of `(S_c, E_c)`.
pub fn color_connected(inst: &Instance, edges: &[Edge], c: usize) -> bool {
    let class = inst.class(c);
    if class.len() <= 1 {
        return true;
    }
    let mut uf = UnionFind::new(inst.n());
    let mut merged = 0;
    for &e in edges {
        if e.b >= inst.n() {
            return false;
        }
        if edge_color(inst, e).contains(c) && uf.union(e.a, e.b) {
            merged += 1;
        }
    }
    merged + 1 >= class.len() && {
        let r = uf.find(class[0]);
        class.iter().all(|&i| uf.find(i) == r)
    }
}

/// A candidate or optimal edge set together with its cost and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub algorithm: String,
    pub cost: f64,
    pub edges: Vec<Edge>,
    pub ratio_bound: Option<f64>,
}

impl Solution {
    /// Normalizes `edges` and computes the cost from `inst`.
    pub fn new(inst: &Instance, algorithm: impl Into<String>, mut edges: Vec<Edge>, ratio_bound: Option<f64>) -> Self {
        normalize_edges(&mut edges);
        let cost = solution_cost(inst, &edges);
        Solution {
            algorithm: algorithm.into(),
            cost,
            edges,
            ratio_bound,
        }
    }

    /// Checks indices, duplicates, the stored cost and the CSG property.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= e.b || e.b >= inst.n() {
                return Err(CsgError::Invariant(format!("edge {i} is out of range")));
            }
            if i > 0 && self.edges[i - 1] >= *e {
                return Err(CsgError::Invariant("edge list not strictly sorted".into()));
            }
        }
        let cost = solution_cost(inst, &self.edges);
        if !approx_eq(cost, self.cost) {
            return Err(CsgError::Invariant(format!(
                "stored cost {} differs from edge lengths {cost}",
                self.cost
            )));
        }
        if !is_csg(inst, &self.edges) {
            return Err(CsgError::Invariant(format!(
                "{} output is not a colored spanning graph",
                self.algorithm
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PointDoc {
    x: f64,
    y: f64,
    colors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    k: usize,
    points: Vec<PointDoc>,
}

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    algorithm: String,
    cost: f64,
    edges: Vec<[usize; 2]>,
    ratio_bound: Option<f64>,
}

pub fn load_instance<R: Read>(source: R) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_reader(source)?;
    if doc.k < 1 || doc.k > MAX_COLORS {
        return Err(CsgError::InvalidInstance(format!(
            "k must lie in 1..={MAX_COLORS}, got {}",
            doc.k
        )));
    }
    let mut points = Vec::with_capacity(doc.points.len());
    for (i, p) in doc.points.into_iter().enumerate() {
        if p.colors.is_empty() {
            return Err(CsgError::EmptyColorSet(i));
        }
        if let Some(&c) = p.colors.iter().find(|&&c| c < 1 || c > doc.k) {
            return Err(CsgError::ColorOutOfRange { color: c, k: doc.k });
        }
        points.push(Point::new(p.x, p.y, ColorSet::from_colors(p.colors)));
    }
    Instance::new(doc.k, points)
}

pub fn instance_from_str(s: &str) -> Result<Instance> {
    load_instance(s.as_bytes())
}

pub fn save_instance<W: Write>(inst: &Instance, mut sink: W) -> Result<()> {
    sink.write_all(instance_to_string(inst).as_bytes())?;
    Ok(())
}

pub fn instance_to_string(inst: &Instance) -> String {
    let doc = InstanceDoc {
        k: inst.k,
        points: inst
            .points
            .iter()
            .map(|p| PointDoc {
                x: p.x,
                y: p.y,
                colors: p.colors.iter().collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("instance serializes");
    s.push('\n');
    s
}

pub fn solution_to_string(sol: &Solution) -> String {
    let doc = SolutionDoc {
        algorithm: sol.algorithm.clone(),
        cost: sol.cost,
        edges: sol.edges.iter().map(|e| [e.a, e.b]).collect(),
        ratio_bound: sol.ratio_bound,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("solution serializes");
    s.push('\n');
    s
}

pub fn save_solution<W: Write>(sol: &Solution, mut sink: W) -> Result<()> {
    sink.write_all(solution_to_string(sol).as_bytes())?;
    Ok(())
}

/// Parses a solution document. Edge indices are range-checked by [`Solution::validate`].
pub fn load_solution<R: Read>(source: R) -> Result<Solution> {
    let doc: SolutionDoc = serde_json::from_reader(source)?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for [u, v] in doc.edges {
        if u == v {
            return Err(CsgError::Parse(format!("self-loop on point {u}")));
        }
        edges.push(Edge::new(u, v));
    }
    normalize_edges(&mut edges);
    Ok(Solution {
        algorithm: doc.algorithm,
        cost: doc.cost,
        edges,
        ratio_bound: doc.ratio_bound,
    })
}

fn check_gen_params(n: usize, k: usize, fraction: f64) -> Result<()> {
    if n < 1 {
        return Err(CsgError::InvalidArgument("n must be at least 1".into()));
    }
    if !(1..=MAX_COLORS).contains(&k) {
        return Err(CsgError::InvalidArgument(format!("k must lie in 1..={MAX_COLORS}")));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(CsgError::InvalidArgument(
            "multichromatic fraction must lie in [0, 1]".into(),
        ));
    }
    if k == 1 && (fraction * n as f64).floor() >= 1.0 {
        return Err(CsgError::InvalidArgument("multichromatic points need k >= 2".into()));
    }
    Ok(())
}

/// Random color sets: `⌊fraction·n⌋` points get at least two colors, the rest one.
/// When `n >= k` every color is used at least once.
fn random_colors(rng: &mut ChaCha8Rng, n: usize, k: usize, fraction: f64) -> Vec<ColorSet> {
    let n_multi = (fraction * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut colors = vec![ColorSet::EMPTY; n];
    let palette: Vec<usize> = (1..=k).collect();
    for (rank, &i) in order.iter().enumerate() {
        colors[i] = if rank < n_multi {
            let size = rng.gen_range(2..=k);
            ColorSet::from_colors(palette.choose_multiple(rng, size).copied())
        } else {
            ColorSet::single(rng.gen_range(1..=k))
        };
    }
    if n >= k {
        for c in 1..=k {
            if colors.iter().any(|s| s.contains(c)) {
                continue;
            }
            if n_multi > 0 {
                let i = order[rng.gen_range(0..n_multi)];
                colors[i] = colors[i].union(ColorSet::single(c));
            } else {
                // some color is used twice by pigeonhole
                let donor = order
                    .iter()
                    .copied()
                    .find(|&i| colors.iter().filter(|&&s| s == colors[i]).count() > 1)
                    .expect("a repeated color exists");
                colors[donor] = ColorSet::single(c);
            }
        }
    }
    colors
}

/// `n` points uniform in the unit square, colored by [`random_colors`]. Coincident
/// coordinates are resampled.
pub fn generate_random(n: usize, k: usize, fraction: f64, seed: u64) -> Result<Instance> {
    check_gen_params(n, k, fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    while coords.len() < n {
        let (x, y): (f64, f64) = (rng.gen(), rng.gen());
        if seen.insert((x.to_bits(), y.to_bits())) {
            coords.push((x, y));
        }
    }
    let colors = random_colors(&mut rng, n, k, fraction);
    let points = coords
        .into_iter()
        .zip(colors)
        .map(|((x, y), c)| Point::new(x, y, c))
        .collect();
    Instance::new(k, points)
}

/// `n` points on the x-axis at distinct uniform abscissae in `[0, 1)`, sorted, colored
/// as in [`generate_random`].
pub fn generate_collinear(n: usize, k: usize, fraction: f64, seed: u64) -> Result<Instance> {
    check_gen_params(n, k, fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    while xs.len() < n {
        let x: f64 = rng.gen();
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    xs.sort_by(f64::total_cmp);
    let colors = random_colors(&mut rng, n, k, fraction);
    let points = xs.into_iter().zip(colors).map(|(x, c)| Point::new(x, 0.0, c)).collect();
    Instance::new(k, points)
}

/// Number of point pairs with a nonempty shared color, counted per distinct color set.
pub fn candidate_edge_count(inst: &Instance) -> usize {
    let mut by_mask = std::collections::BTreeMap::<u16, usize>::new();
    for p in &inst.points {
        *by_mask.entry(p.colors.bits()).or_default() += 1;
    }
    let groups: Vec<(u16, usize)> = by_mask.into_iter().collect();
    let mut total = 0usize;
    for (i, &(m, c)) in groups.iter().enumerate() {
        total += c * (c - 1) / 2;
        for &(m2, c2) in &groups[i + 1..] {
            if m & m2 != 0 {
                total += c * c2;
            }
        }
    }
    total
}

/// Every point pair with a nonempty shared color.
pub fn candidate_edges(inst: &Instance) -> Vec<Edge> {
    let n = inst.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !inst.colors(a).intersection(inst.colors(b)).is_empty() {
                out.push(Edge { a, b });
            }
        }
    }
    out
}
