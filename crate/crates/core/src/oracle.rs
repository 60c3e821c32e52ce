//! Brute-force ground truth: exhaustive search over candidate edge subsets.

use std::time::{Duration, Instant};

use crate::color::ColorSet;
use crate::dispatch::{solve_dispatch, DispatchConfig, SolveMode};
use crate::error::{CsgError, Result};
use crate::instance::{
    candidate_edge_count, candidate_edges, edge_color, generate_collinear, generate_random, is_csg, normalize_edges,
    Edge, Instance, Point, Solution,
};
use crate::mst::sort_weighted;

pub const DEFAULT_MAX_EDGES: usize = 22;

#[derive(Clone, Debug)]
pub struct OracleBudget {
    pub max_candidate_edges: usize,
    pub time_limit: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_candidate_edges: DEFAULT_MAX_EDGES,
            time_limit: None,
        }
    }
}

impl OracleBudget {
    pub fn with_max_edges(max_candidate_edges: usize) -> Self {
        OracleBudget {
            max_candidate_edges,
            time_limit: None,
        }
    }
}

/// Restrictions on the searched edge sets.
#[derive(Clone, Debug, Default)]
pub struct OracleOptions {
    /// Only consider edges with property (★); the input must be collinear.
    pub star_only: bool,
    /// Edges every solution must contain, paid at their length.
    pub required: Vec<Edge>,
    /// Edges available at zero cost; they are always present and never reported.
    pub free: Vec<Edge>,
}

/// Minimum-cost colored spanning graph by branch and bound.
pub fn brute_force(inst: &Instance, budget: &OracleBudget) -> Result<Solution> {
    brute_force_with(inst, budget, &OracleOptions::default())
}

struct Search<'a> {
    k: usize,
    n: usize,
    // color masks of candidate edges
    masks: Vec<u16>,
    ends: Vec<(usize, usize)>,
    weights: Vec<f64>,
    class_mask: u16,
    best_cost: f64,
    best: Option<Vec<usize>>,
    chosen: Vec<usize>,
    deadline: Option<Instant>,
    timed_out: bool,
    ticks: u64,
    edges: &'a [Edge],
}

/// Per-color component labels, `k * n` entries; `usize::MAX` marks points outside `S_c`.
type Labels = Vec<usize>;

fn label_merge(labels: &mut Labels, n: usize, c: usize, u: usize, v: usize) -> bool {
    let row = &mut labels[c * n..(c + 1) * n];
    let (lu, lv) = (row[u], row[v]);
    if lu == lv {
        return false;
    }
    for x in row.iter_mut() {
        if *x == lv {
            *x = lu;
        }
    }
    true
}

fn components(labels: &Labels, n: usize, c: usize) -> usize {
    let row = &labels[c * n..(c + 1) * n];
    let mut seen: Vec<usize> = row.iter().copied().filter(|&l| l != usize::MAX).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn tie_tol(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

impl Search<'_> {
    /// Applies edge `i` to `labels`; returns whether it joined any color.
    fn apply(&self, labels: &mut Labels, i: usize) -> bool {
        let (u, v) = self.ends[i];
        let mut useful = false;
        for c in 0..self.k {
            if self.masks[i] >> c & 1 == 1 {
                useful |= label_merge(labels, self.n, c, u, v);
            }
        }
        useful
    }

    fn remaining_feasible(&self, labels: &Labels, from: usize) -> bool {
        for c in 0..self.k {
            if self.class_mask >> c & 1 == 0 {
                continue;
            }
            let mut row: Vec<usize> = labels[c * self.n..(c + 1) * self.n].to_vec();
            for i in from..self.masks.len() {
                if self.masks[i] >> c & 1 == 1 {
                    let (u, v) = self.ends[i];
                    let (lu, lv) = (row[u], row[v]);
                    if lu != lv {
                        for x in row.iter_mut() {
                            if *x == lv {
                                *x = lu;
                            }
                        }
                    }
                }
            }
            let first = row.iter().copied().find(|&l| l != usize::MAX);
            if row.iter().any(|&l| l != usize::MAX && Some(l) != first) {
                return false;
            }
        }
        true
    }

    fn missing(&self, labels: &Labels) -> usize {
        (0..self.k)
            .filter(|&c| self.class_mask >> c & 1 == 1)
            .map(|c| components(labels, self.n, c).saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    fn record(&mut self, cost: f64) {
        let better = match &self.best {
            None => true,
            Some(b) => {
                cost < self.best_cost - tie_tol(self.best_cost)
                    || (cost <= self.best_cost + tie_tol(self.best_cost) && self.sorted_chosen() < self.sorted_of(b))
            }
        };
        if better {
            self.best_cost = cost;
            self.best = Some(self.chosen.clone());
        }
    }

    fn sorted_of(&self, idx: &[usize]) -> Vec<Edge> {
        let mut v: Vec<Edge> = idx.iter().map(|&i| self.edges[i]).collect();
        v.sort_unstable();
        v
    }

    fn sorted_chosen(&self) -> Vec<Edge> {
        self.sorted_of(&self.chosen)
    }

    fn dfs(&mut self, i: usize, labels: &Labels, cost: f64) {
        self.ticks += 1;
        if self.ticks & 0xffff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        let missing = self.missing(labels);
        if missing == 0 {
            self.record(cost);
            return;
        }
        if i == self.masks.len() {
            return;
        }
        let lb = cost + missing as f64 * self.weights[i];
        if self.best.is_some() && lb > self.best_cost + tie_tol(self.best_cost) {
            return;
        }
        let mut with = labels.clone();
        if self.apply(&mut with, i) {
            self.chosen.push(i);
            self.dfs(i + 1, &with, cost + self.weights[i]);
            self.chosen.pop();
        }
        if self.remaining_feasible(labels, i + 1) {
            self.dfs(i + 1, labels, cost);
        }
    }
}

/// [`brute_force`] with required, free or (★)-restricted edges.
pub fn brute_force_with(inst: &Instance, budget: &OracleBudget, opts: &OracleOptions) -> Result<Solution> {
    let n = inst.n();
    let k = inst.k();
    let mut fixed: Vec<Edge> = opts.required.clone();
    normalize_edges(&mut fixed);
    let mut free = opts.free.clone();
    normalize_edges(&mut free);
    let total = candidate_edge_count(inst);
    if !opts.star_only && total > budget.max_candidate_edges + fixed.len() + free.len() {
        return Err(CsgError::LimitExceeded {
            what: "candidate edge count",
            actual: total.saturating_sub(fixed.len() + free.len()),
            limit: budget.max_candidate_edges,
        });
    }
    let pool = if opts.star_only {
        crate::collinear::star_candidates(inst)?
    } else {
        candidate_edges(inst)
    };
    let mut cand: Vec<(Edge, f64)> = pool
        .into_iter()
        .filter(|e| fixed.binary_search(e).is_err() && free.binary_search(e).is_err())
        .map(|e| (e, inst.edge_len(e)))
        .collect();
    if cand.len() > budget.max_candidate_edges {
        return Err(CsgError::LimitExceeded {
            what: "candidate edge count",
            actual: cand.len(),
            limit: budget.max_candidate_edges,
        });
    }
    sort_weighted(&mut cand);
    let edges: Vec<Edge> = cand.iter().map(|c| c.0).collect();

    let mut labels: Labels = vec![usize::MAX; k * n];
    let mut class_mask = 0u16;
    for c in 0..k {
        for p in 0..n {
            if inst.colors(p).contains(c + 1) {
                labels[c * n + p] = p;
                class_mask |= 1 << c;
            }
        }
    }
    let mut search = Search {
        k,
        n,
        masks: edges.iter().map(|&e| edge_color(inst, e).bits()).collect(),
        ends: edges.iter().map(|e| (e.a, e.b)).collect(),
        weights: cand.iter().map(|c| c.1).collect(),
        class_mask,
        best_cost: f64::INFINITY,
        best: None,
        chosen: Vec::new(),
        deadline: budget.time_limit.map(|t| Instant::now() + t),
        timed_out: false,
        ticks: 0,
        edges: &edges,
    };
    for &e in fixed.iter().chain(&free) {
        if e.b >= n {
            return Err(CsgError::InvalidArgument(format!(
                "edge ({}, {}) out of range",
                e.a, e.b
            )));
        }
        let mask = edge_color(inst, e).bits();
        for c in 0..k {
            if mask >> c & 1 == 1 {
                label_merge(&mut labels, n, c, e.a, e.b);
            }
        }
    }
    let base: f64 = fixed.iter().map(|&e| inst.edge_len(e)).sum();
    if search.remaining_feasible(&labels, 0) {
        search.dfs(0, &labels, base);
    }
    if search.timed_out {
        return Err(CsgError::LimitExceeded {
            what: "oracle seconds",
            actual: budget.time_limit.map_or(0, |t| t.as_secs() as usize),
            limit: budget.time_limit.map_or(0, |t| t.as_secs() as usize),
        });
    }
    let chosen = search
        .best
        .ok_or_else(|| CsgError::Invariant("no colored spanning graph among candidates".into()))?;
    let mut out: Vec<Edge> = chosen.iter().map(|&i| edges[i]).collect();
    out.extend(fixed);
    let label = if opts.star_only { "oracle-star" } else { "oracle" };
    Ok(Solution::new(inst, label, out, Some(1.0)))
}

/// Plain enumeration of every candidate subset, without pruning. Used to check
/// the branch and bound on small inputs.
pub fn naive_enumerate(inst: &Instance, max_edges: usize) -> Result<Solution> {
    let total = candidate_edge_count(inst);
    if total > max_edges.min(24) {
        return Err(CsgError::LimitExceeded {
            what: "candidate edge count",
            actual: total,
            limit: max_edges.min(24),
        });
    }
    let cand = candidate_edges(inst);
    if cand.len() > max_edges.min(24) {
        return Err(CsgError::LimitExceeded {
            what: "candidate edge count",
            actual: cand.len(),
            limit: max_edges.min(24),
        });
    }
    let mut best: Option<(f64, Vec<Edge>)> = None;
    for mask in 0u32..(1u32 << cand.len()) {
        let set: Vec<Edge> = (0..cand.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| cand[i])
            .collect();
        if !is_csg(inst, &set) {
            continue;
        }
        let cost: f64 = set.iter().map(|&e| inst.edge_len(e)).sum();
        let better = match &best {
            None => true,
            Some((bc, be)) => cost < bc - tie_tol(*bc) || (cost <= bc + tie_tol(*bc) && set < *be),
        };
        if better {
            best = Some((cost, set));
        }
    }
    let (_, edges) = best.ok_or_else(|| CsgError::Invariant("no colored spanning graph".into()))?;
    Ok(Solution::new(inst, "oracle-naive", edges, Some(1.0)))
}

/// Instance family for [`ratio_bench`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BenchFamily {
    Random {
        n: usize,
        k: usize,
        fraction: f64,
    },
    Collinear {
        n: usize,
        k: usize,
        fraction: f64,
    },
    /// Random positions, every point carrying all `k` colors.
    AllBlack {
        n: usize,
        k: usize,
    },
}

impl BenchFamily {
    pub fn generate(&self, seed: u64) -> Result<Instance> {
        match *self {
            BenchFamily::Random { n, k, fraction } => generate_random(n, k, fraction, seed),
            BenchFamily::Collinear { n, k, fraction } => generate_collinear(n, k, fraction, seed),
            BenchFamily::AllBlack { n, k } => {
                let base = generate_random(n, 1, 0.0, seed)?;
                let pts = base
                    .points()
                    .iter()
                    .map(|p| Point::new(p.x, p.y, ColorSet::full(k)))
                    .collect();
                Instance::new(k, pts)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub opt: f64,
    pub algo: String,
    pub cost: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoSummary {
    pub algo: String,
    pub runs: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// Certified bound reported by the algorithm, if any.
    pub bound: Option<f64>,
    /// Seeds whose ratio exceeds the bound by more than 1e-9.
    pub violations: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<AlgoSummary>,
    /// Seeds that could not be evaluated, with the reason.
    pub failures: Vec<(u64, String)>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,n,k,opt,algo,cost,ratio\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{:.12},{},{:.12},{:.12}\n",
                r.seed, r.n, r.k, r.opt, r.algo, r.cost, r.ratio
            ));
        }
        s
    }

    pub fn summary(&self, algo: &str) -> Option<&AlgoSummary> {
        self.summaries.iter().find(|s| s.algo == algo)
    }
}

type SeedResult = std::result::Result<Vec<(BenchRow, Option<f64>)>, String>;

fn bench_seed(family: &BenchFamily, algos: &[SolveMode], seed: u64, budget: &OracleBudget) -> SeedResult {
    let inst = family.generate(seed).map_err(|e| e.to_string())?;
    let opt = brute_force(&inst, budget).map_err(|e| e.to_string())?.cost;
    let mut rows = Vec::with_capacity(algos.len());
    for &mode in algos {
        let sol = solve_dispatch(&inst, mode, &DispatchConfig::default()).map_err(|e| format!("{mode}: {e}"))?;
        let ratio = if opt > 0.0 { sol.cost / opt } else { 1.0 };
        rows.push((
            BenchRow {
                seed,
                n: inst.n(),
                k: inst.k(),
                opt,
                algo: mode.to_string(),
                cost: sol.cost,
                ratio,
            },
            sol.ratio_bound,
        ));
    }
    Ok(rows)
}

/// Runs every algorithm on `seeds` instances of `family` (seeds `first_seed..`)
/// and compares each cost with the brute-force optimum. Seeds are spread over
/// worker threads; the report is ordered by seed, then by algorithm.
pub fn ratio_bench(
    family: &BenchFamily,
    algos: &[SolveMode],
    first_seed: u64,
    seeds: usize,
    budget: &OracleBudget,
) -> BenchReport {
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(seeds.max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<(u64, SeedResult)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if i >= seeds {
                            break;
                        }
                        let seed = first_seed + i as u64;
                        out.push((seed, bench_seed(family, algos, seed, budget)));
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("bench worker panicked"))
            .collect()
    });
    results.sort_by_key(|r| r.0);

    let mut report = BenchReport::default();
    let mut bounds: Vec<Option<f64>> = vec![None; algos.len()];
    for (seed, res) in results {
        match res {
            Ok(rows) => {
                for (i, (row, bound)) in rows.into_iter().enumerate() {
                    if bound.is_some() {
                        bounds[i] = bound;
                    }
                    report.rows.push(row);
                }
            }
            Err(e) => report.failures.push((seed, e)),
        }
    }
    for (i, mode) in algos.iter().enumerate() {
        let name = mode.to_string();
        let ratios: Vec<&BenchRow> = report.rows.iter().filter(|r| r.algo == name).collect();
        let bound = bounds[i];
        let violations = ratios
            .iter()
            .filter(|r| bound.is_some_and(|b| r.cost > b * r.opt + 1e-9))
            .map(|r| r.seed)
            .collect();
        let runs = ratios.len();
        report.summaries.push(AlgoSummary {
            algo: name,
            runs,
            max_ratio: ratios.iter().map(|r| r.ratio).fold(0.0, f64::max),
            mean_ratio: if runs == 0 {
                0.0
            } else {
                ratios.iter().map(|r| r.ratio).sum::<f64>() / runs as f64
            },
            bound,
            violations,
        });
    }
    report
}
