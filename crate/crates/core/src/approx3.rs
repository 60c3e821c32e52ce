//! Approximation algorithms for three (and more) colors.
//!
//! A1 solves one color pair exactly and adds an MST of the remaining color. A2
//! tries all three pairings, each with and without the MST of the black points
//! (those carrying all three colors) pre-connecting its members, and keeps the
//! cheapest of the six graphs.

use crate::color::ColorSet;
use crate::error::{CsgError, Result};
use crate::exact2::{solve_pair, PairProjection, DEFAULT_M_LIMIT};
use crate::instance::{normalize_edges, Edge, Instance, Solution};
use crate::mst::{euclidean_mst, mst_candidates};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug)]
pub struct ApproxConfig {
    /// Upper bound on the Steiner ratio used in the A2 guarantee.
    pub steiner_ratio_bound: f64,
    pub m_limit: usize,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            steiner_ratio_bound: 1.21,
            m_limit: DEFAULT_M_LIMIT,
        }
    }
}

impl ApproxConfig {
    pub fn new(steiner_ratio_bound: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&steiner_ratio_bound) {
            return Err(CsgError::InvalidArgument(format!(
                "Steiner ratio bound must lie in [1, 2], got {steiner_ratio_bound}"
            )));
        }
        Ok(ApproxConfig {
            steiner_ratio_bound,
            ..Default::default()
        })
    }

    /// `2 − 1/(3 + 2ρ)`.
    pub fn ratio_a2(&self) -> f64 {
        2.0 - 1.0 / (3.0 + 2.0 * self.steiner_ratio_bound)
    }

    /// `⌈k/2⌉`, which is 2 for three colors.
    pub fn ratio_a1(&self, k: usize) -> f64 {
        k.div_ceil(2) as f64
    }

    /// `2ρ/(3 + 2ρ)`, the weight split used in the A2 analysis.
    pub fn beta(&self) -> f64 {
        let r = self.steiner_ratio_bound;
        2.0 * r / (3.0 + 2.0 * r)
    }
}

/// The six A2 candidates and the index of the cheapest.
#[derive(Clone, Debug)]
pub struct CandidateBundle {
    pub graphs: Vec<(String, Solution)>,
    pub chosen: usize,
}

impl CandidateBundle {
    pub fn best(&self) -> &Solution {
        &self.graphs[self.chosen].1
    }
}

fn coords(inst: &Instance, pts: &[usize]) -> Vec<(f64, f64)> {
    pts.iter().map(|&i| (inst.point(i).x, inst.point(i).y)).collect()
}

fn class_mst(inst: &Instance, c: usize) -> Vec<Edge> {
    let pts = inst.class(c);
    euclidean_mst(&coords(inst, &pts))
        .into_iter()
        .map(|e| Edge::new(pts[e.a], pts[e.b]))
        .collect()
}

/// Cheapest edge set over `points` that, together with free connections inside
/// each block of `merged`, spans all of `points`.
pub fn mst_completion(inst: &Instance, points: &[usize], merged: &[Vec<usize>]) -> Result<Vec<Edge>> {
    let mut local = points.to_vec();
    local.sort_unstable();
    local.dedup();
    let pos = |p: usize| local.binary_search(&p);
    let mut uf = UnionFind::new(local.len());
    for block in merged {
        for w in block.windows(2) {
            let (Ok(a), Ok(b)) = (pos(w[0]), pos(w[1])) else {
                return Err(CsgError::InvalidArgument("merged block leaves the point set".into()));
            };
            uf.union(a, b);
        }
        if let [p] = block[..] {
            pos(p).map_err(|_| CsgError::InvalidArgument("merged block leaves the point set".into()))?;
        }
    }
    let mut out = Vec::new();
    for (e, _) in mst_candidates(&coords(inst, &local)) {
        if uf.components() == 1 {
            break;
        }
        if uf.union(e.a, e.b) {
            out.push(Edge::new(local[e.a], local[e.b]));
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn check_k3(inst: &Instance) -> Result<()> {
    if inst.k() != 3 {
        return Err(CsgError::NotApplicable(format!(
            "this algorithm needs k = 3, got k = {}",
            inst.k()
        )));
    }
    Ok(())
}

fn union_solution(inst: &Instance, label: &str, parts: Vec<Vec<Edge>>, bound: f64) -> Solution {
    let mut edges: Vec<Edge> = parts.into_iter().flatten().collect();
    normalize_edges(&mut edges);
    Solution::new(inst, label, edges, Some(bound))
}

/// Union of an exact solve per 2-block and an MST per 1-block of `pairing`.
pub fn approx_pairing(inst: &Instance, pairing: &[Vec<usize>], cfg: &ApproxConfig) -> Result<Solution> {
    let k = inst.k();
    let mut covered = ColorSet::EMPTY;
    for block in pairing {
        if block.is_empty() || block.len() > 2 {
            return Err(CsgError::InvalidArgument(
                "pairing blocks must have one or two colors".into(),
            ));
        }
        for &c in block {
            if !(1..=k).contains(&c) || covered.contains(c) {
                return Err(CsgError::InvalidArgument(format!(
                    "color {c} is out of range or repeated in the pairing"
                )));
            }
            covered = covered.union(ColorSet::single(c));
        }
    }
    if covered != ColorSet::full(k) {
        return Err(CsgError::InvalidArgument("pairing does not cover every color".into()));
    }
    let mut parts = Vec::with_capacity(pairing.len());
    for block in pairing {
        parts.push(match block[..] {
            [c] => class_mst(inst, c),
            [c1, c2] => solve_pair(&PairProjection::new(inst, c1, c2)?, cfg.m_limit)?.edges,
            _ => unreachable!(),
        });
    }
    Ok(union_solution(inst, "pairing", parts, cfg.ratio_a1(k)))
}

/// The pairing `{1,2}, {3,4}, …` used for `k > 3`.
pub fn default_pairing(k: usize) -> Vec<Vec<usize>> {
    (1..=k).step_by(2).map(|c| (c..=(c + 1).min(k)).collect()).collect()
}

/// `G_rb ∪ G_y`, a 2-approximation.
pub fn approx_a1(inst: &Instance, cfg: &ApproxConfig) -> Result<Solution> {
    check_k3(inst)?;
    let mut s = approx_pairing(inst, &[vec![1, 2], vec![3]], cfg)?;
    s.algorithm = "a1".into();
    Ok(s)
}

const PAIRINGS: [((usize, usize), usize); 3] = [((1, 2), 3), ((1, 3), 2), ((2, 3), 1)];

/// All six A2 candidates.
pub fn approx_a2_bundle(inst: &Instance, cfg: &ApproxConfig) -> Result<CandidateBundle> {
    check_k3(inst)?;
    let bound = cfg.ratio_a2();
    let mut graphs = Vec::with_capacity(6);
    for (i, &((c1, c2), c3)) in PAIRINGS.iter().enumerate() {
        let g = solve_pair(&PairProjection::new(inst, c1, c2)?, cfg.m_limit)?;
        let sol = union_solution(inst, &format!("G{}", i + 1), vec![g.edges, class_mst(inst, c3)], bound);
        graphs.push((format!("G{}", i + 1), sol));
    }
    let black: Vec<usize> = (0..inst.n()).filter(|&p| inst.colors(p) == ColorSet::full(3)).collect();
    for (i, &((c1, c2), c3)) in PAIRINGS.iter().enumerate() {
        let label = format!("G{}", i + 4);
        if black.is_empty() {
            let mut same = graphs[i].1.clone();
            same.algorithm = label.clone();
            graphs.push((label, same));
            continue;
        }
        let h: Vec<Edge> = euclidean_mst(&coords(inst, &black))
            .into_iter()
            .map(|e| Edge::new(black[e.a], black[e.b]))
            .collect();
        let groups = vec![black.clone()];
        let pair = solve_pair(
            &PairProjection::new(inst, c1, c2)?.with_groups(groups.clone())?,
            cfg.m_limit,
        )?;
        let mono = mst_completion(inst, &inst.class(c3), &groups)?;
        let sol = union_solution(inst, &label, vec![h, pair.edges, mono], bound);
        graphs.push((label, sol));
    }
    let mut chosen = 0;
    for (i, (_, g)) in graphs.iter().enumerate() {
        if g.cost < graphs[chosen].1.cost {
            chosen = i;
        }
    }
    Ok(CandidateBundle { graphs, chosen })
}

/// Cheapest of the six A2 candidates; ratio `2 − 1/(3 + 2ρ)`.
pub fn approx_a2(inst: &Instance, cfg: &ApproxConfig) -> Result<Solution> {
    let bundle = approx_a2_bundle(inst, cfg)?;
    let mut s = bundle.best().clone();
    s.algorithm = "a2".into();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{approx_eq, approx_le, generate_random, is_csg, solution_cost, Point};
    use crate::oracle::{brute_force, OracleBudget};

    fn inst(pts: &[(f64, f64, &[usize])], k: usize) -> Instance {
        Instance::new(
            k,
            pts.iter()
                .map(|&(x, y, c)| Point::new(x, y, ColorSet::from_colors(c.iter().copied())))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn config_constants() {
        let cfg = ApproxConfig::default();
        assert!((cfg.ratio_a2() - (2.0 - 1.0 / 5.42)).abs() < 1e-15);
        assert!(cfg.ratio_a2() <= 1.816);
        assert_eq!(cfg.ratio_a1(3), 2.0);
        assert_eq!(cfg.ratio_a1(5), 3.0);
        assert!((cfg.beta() - 2.42 / 5.42).abs() < 1e-15);
        assert!(ApproxConfig::new(2.5).is_err());
    }

    #[test]
    fn completion_examples() {
        let line = inst(&[(0.0, 0.0, &[1]), (1.0, 0.0, &[1]), (3.0, 0.0, &[1])], 1);
        assert!(mst_completion(&line, &[0, 1, 2], &[vec![0, 1, 2]]).unwrap().is_empty());
        assert_eq!(
            mst_completion(&line, &[0, 1, 2], &[]).unwrap(),
            vec![Edge::new(0, 1), Edge::new(1, 2)]
        );
        assert_eq!(
            mst_completion(&line, &[0, 1, 2], &[vec![0, 1]]).unwrap(),
            vec![Edge::new(1, 2)]
        );
    }

    #[test]
    fn all_black_is_mst() {
        let i = inst(
            &[
                (0.0, 0.0, &[1, 2, 3]),
                (1.0, 0.0, &[1, 2, 3]),
                (0.5, 2.0, &[1, 2, 3]),
                (3.0, 1.0, &[1, 2, 3]),
            ],
            3,
        );
        let cfg = ApproxConfig::default();
        let opt = brute_force(&i, &OracleBudget::default()).unwrap();
        let mst_cost = solution_cost(&i, &class_mst(&i, 1));
        assert!(approx_eq(opt.cost, mst_cost));
        let a2 = approx_a2(&i, &cfg).unwrap();
        assert!(approx_eq(a2.cost, mst_cost));
        let a1 = approx_a1(&i, &cfg).unwrap();
        // both parts are the same tree, so their union is a single MST
        assert!(approx_eq(a1.cost, mst_cost));
    }

    #[test]
    fn no_yellow_is_exact() {
        let i = inst(
            &[
                (0.0, 0.0, &[1]),
                (1.0, 0.0, &[1, 2]),
                (2.0, 0.5, &[2]),
                (5.0, 5.0, &[3]),
            ],
            3,
        );
        let cfg = ApproxConfig::default();
        let a1 = approx_a1(&i, &cfg).unwrap();
        let opt = brute_force(&i, &OracleBudget::default()).unwrap();
        assert!(approx_eq(a1.cost, opt.cost));
        assert_eq!(
            approx_pairing(&i, &[vec![1, 2], vec![3]], &cfg).unwrap().edges,
            a1.edges
        );
    }

    #[test]
    fn single_color_pairing() {
        let i = inst(&[(0.0, 0.0, &[1]), (1.0, 0.0, &[1]), (3.0, 0.0, &[1])], 1);
        let s = approx_pairing(&i, &[vec![1]], &ApproxConfig::default()).unwrap();
        assert_eq!(s.cost, 3.0);
        assert_eq!(s.ratio_bound, Some(1.0));
        assert!(approx_pairing(&i, &[vec![1], vec![1]], &ApproxConfig::default()).is_err());
        assert_eq!(default_pairing(5), vec![vec![1, 2], vec![3, 4], vec![5]]);
    }

    #[test]
    fn empty_black_repeats_first_three() {
        let i = generate_random(6, 3, 0.0, 9).unwrap();
        let b = approx_a2_bundle(&i, &ApproxConfig::default()).unwrap();
        for j in 0..3 {
            assert_eq!(b.graphs[j].1.edges, b.graphs[j + 3].1.edges);
        }
    }

    #[test]
    fn small_random_bounds() {
        let cfg = ApproxConfig::default();
        for seed in 0..30 {
            let i = generate_random(5, 3, 0.5, seed).unwrap();
            let opt = brute_force(&i, &OracleBudget::with_max_edges(30)).unwrap();
            let a1 = approx_a1(&i, &cfg).unwrap();
            let bundle = approx_a2_bundle(&i, &cfg).unwrap();
            for (_, g) in &bundle.graphs {
                assert!(is_csg(&i, &g.edges));
            }
            let a2 = bundle.best();
            assert!(approx_le(a1.cost, 2.0 * opt.cost));
            assert!(approx_le(a2.cost, cfg.ratio_a2() * opt.cost));
            assert!(approx_le(a2.cost, a1.cost));
        }
    }
}
