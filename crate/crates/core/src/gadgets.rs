//! Hardness gadgets: a planar monotone 3-SAT formula compiled into a three-color
//! instance whose threshold cost `W` is met by a standard solution exactly when
//! the formula is satisfiable.
//!
//! Colors are red = 1, blue = 2, yellow = 3. Purple points carry red and blue,
//! black points carry all three. Every coordinate lives on a lattice of step
//! `ε/4`; each color of a chain occupies its own residue modulo 4 along the
//! chain, so chains of different colors can cross without two points colliding,
//! and same-colored chains that cross share their crossing point.

use std::collections::{HashMap, HashSet};
use std::f64::consts::SQRT_2;

use crate::color::ColorSet;
use crate::error::{CsgError, Result};
use crate::instance::{approx_eq, Edge, Instance, Point, Solution};
use crate::mst::{all_forced, edge_order, forced_union};
use crate::unionfind::UnionFind;

pub const RED: usize = 1;
pub const BLUE: usize = 2;
pub const YELLOW: usize = 3;

/// Half the length of a rib: its ends sit at `y = ±RIB_HALF`.
pub const RIB_HALF: f64 = 3.5;
/// Horizontal gap between the right switch point of one rib and the next rib.
pub const SWITCH_GAP: f64 = 6.5;
/// Distance from a switch's `B` point to the corner of its yellow strand.
pub const STRAND_RUN: f64 = 3.25;
/// Height of the lowest clause row.
pub const ROW_BASE: f64 = 5.5;
/// Vertical distance between consecutive clause rows.
pub const ROW_PITCH: f64 = 1.0;
/// How far the spine extends past the first rib and the last switch.
pub const SPINE_OVERHANG: f64 = 2.0;
/// Horizontal distance from the first rib to the left side of the cage.
pub const CAGE_MARGIN: f64 = 3.25;

/// Active points per clause incidence: six per switch pair plus the clause point.
pub const ACTIVES_PER_INCIDENCE: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub sign: Sign,
    /// 1-based variable indices, ascending and distinct.
    pub vars: Vec<usize>,
}

impl Clause {
    fn lo(&self) -> usize {
        self.vars[0]
    }

    fn hi(&self) -> usize {
        *self.vars.last().unwrap()
    }

    /// True when `self` can sit strictly inside `outer` in a planar embedding.
    fn fits_inside(&self, outer: &Clause) -> bool {
        outer.lo() <= self.lo()
            && self.hi() <= outer.hi()
            && outer.vars.iter().all(|&v| v <= self.lo() || v >= self.hi())
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        let want = self.sign == Sign::Positive;
        self.vars.iter().any(|&v| assignment[v - 1] == want)
    }
}

/// A monotone formula whose variables lie on a line, positive clauses drawn
/// above it and negative clauses below, with clause intervals laminar per side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneCnf {
    n_vars: usize,
    clauses: Vec<Clause>,
    levels: Vec<usize>,
}

impl MonotoneCnf {
    pub fn new(n_vars: usize, mut clauses: Vec<Clause>) -> Result<Self> {
        if n_vars == 0 {
            return Err(CsgError::InvalidCnf("no variables".into()));
        }
        if clauses.is_empty() {
            return Err(CsgError::InvalidCnf("no clauses".into()));
        }
        for (i, cl) in clauses.iter_mut().enumerate() {
            cl.vars.sort_unstable();
            if cl.vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(CsgError::InvalidCnf(format!("clause {} repeats a variable", i + 1)));
            }
            if !(2..=3).contains(&cl.vars.len()) {
                return Err(CsgError::InvalidCnf(format!(
                    "clause {} has {} literals, expected 2 or 3",
                    i + 1,
                    cl.vars.len()
                )));
            }
            if let Some(&v) = cl.vars.iter().find(|&&v| v == 0 || v > n_vars) {
                return Err(CsgError::InvalidCnf(format!(
                    "clause {} uses variable {v} outside 1..={n_vars}",
                    i + 1
                )));
            }
        }
        // inner[i][j]: clause i nests directly or indirectly inside clause j
        let m = clauses.len();
        let mut inner = vec![vec![false; m]; m];
        for i in 0..m {
            for j in 0..m {
                if i == j || clauses[i].sign != clauses[j].sign {
                    continue;
                }
                let (a, b) = (&clauses[i], &clauses[j]);
                let overlap = a.lo() < b.hi() && b.lo() < a.hi();
                if !overlap {
                    continue;
                }
                let a_in_b = a.fits_inside(b);
                let b_in_a = b.fits_inside(a);
                if !a_in_b && !b_in_a {
                    return Err(CsgError::InvalidCnf(format!(
                        "clauses {} and {} cross; intervals on one side must be laminar",
                        i + 1,
                        j + 1
                    )));
                }
                inner[i][j] = a_in_b && (!b_in_a || i < j);
            }
        }
        let mut levels = vec![1usize; m];
        for _ in 0..m {
            let mut changed = false;
            for i in 0..m {
                for j in 0..m {
                    if inner[i][j] && levels[j] <= levels[i] {
                        levels[j] = levels[i] + 1;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Ok(MonotoneCnf {
            n_vars,
            clauses,
            levels,
        })
    }

    /// Parses `p mcnf <n_v> <n_clauses>` followed by clause lines such as
    /// `+ 1 3 5` or `- 1 5`. Lines starting with `c` are comments; a trailing `0`
    /// on a clause line is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| CsgError::InvalidCnf(format!("line {}: {msg}", ln + 1));
            let mut tok = line.split_whitespace();
            let first = tok.next().unwrap();
            if first == "p" {
                if header.is_some() {
                    return Err(bad("second header"));
                }
                if tok.next() != Some("mcnf") {
                    return Err(bad("expected `p mcnf <vars> <clauses>`"));
                }
                let nums: Vec<usize> = tok
                    .map(|t| t.parse().map_err(|_| bad("header counts must be integers")))
                    .collect::<Result<_>>()?;
                if nums.len() != 2 {
                    return Err(bad("expected `p mcnf <vars> <clauses>`"));
                }
                header = Some((nums[0], nums[1]));
                continue;
            }
            if header.is_none() {
                return Err(bad("clause before header"));
            }
            let sign = match first {
                "+" => Sign::Positive,
                "-" => Sign::Negative,
                _ => return Err(bad("clause lines start with `+` or `-`")),
            };
            let mut vars: Vec<usize> = tok
                .map(|t| t.parse().map_err(|_| bad("variables must be positive integers")))
                .collect::<Result<_>>()?;
            if vars.last() == Some(&0) {
                vars.pop();
            }
            clauses.push(Clause { sign, vars });
        }
        let (n_vars, n_clauses) = header.ok_or_else(|| CsgError::InvalidCnf("missing `p mcnf` header".into()))?;
        if clauses.len() != n_clauses {
            return Err(CsgError::InvalidCnf(format!(
                "header announces {n_clauses} clauses, found {}",
                clauses.len()
            )));
        }
        MonotoneCnf::new(n_vars, clauses)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p mcnf {} {}\n", self.n_vars, self.clauses.len());
        for cl in &self.clauses {
            s.push(if cl.sign == Sign::Positive { '+' } else { '-' });
            for v in &cl.vars {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Nesting depth of each clause on its side; innermost clauses have level 1.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Number of variable–clause incidences.
    pub fn r(&self) -> usize {
        self.clauses.iter().map(|c| c.vars.len()).sum()
    }

    /// Index of the first clause the assignment leaves unsatisfied.
    pub fn first_unsatisfied(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.satisfied_by(assignment))
    }

    /// Every satisfying assignment, in binary counting order (x1 least significant).
    /// Only meant for small formulas.
    pub fn satisfying_assignments(&self) -> Vec<Vec<bool>> {
        assert!(self.n_vars <= 20, "too many variables to enumerate");
        (0u32..1 << self.n_vars)
            .map(|mask| (0..self.n_vars).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|a| self.first_unsatisfied(a).is_none())
            .collect()
    }
}

/// Reads a truth assignment written as signed variable indices (`1 -2 3`),
/// optionally terminated by `0`. Every variable must appear exactly once.
pub fn parse_assignment(text: &str, n_vars: usize) -> Result<Vec<bool>> {
    let mut val: Vec<Option<bool>> = vec![None; n_vars];
    for tok in text
        .lines()
        .filter(|l| !l.trim_start().starts_with('c'))
        .flat_map(|l| l.split_whitespace())
    {
        let lit: i64 = tok
            .parse()
            .map_err(|_| CsgError::Parse(format!("bad literal `{tok}` in assignment")))?;
        if lit == 0 {
            continue;
        }
        let v = lit.unsigned_abs() as usize;
        if v > n_vars {
            return Err(CsgError::Parse(format!("variable {v} outside 1..={n_vars}")));
        }
        if val[v - 1].replace(lit > 0).is_some() {
            return Err(CsgError::Parse(format!("variable {v} assigned twice")));
        }
    }
    val.iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| CsgError::Parse(format!("variable {} unassigned", i + 1))))
        .collect()
}

fn black() -> ColorSet {
    ColorSet::from_colors([RED, BLUE, YELLOW])
}

fn purple() -> ColorSet {
    ColorSet::from_colors([RED, BLUE])
}

/// Residue modulo 4 occupied by a color along any chain.
fn phase(c: usize) -> i64 {
    match c {
        RED => 0,
        YELLOW => 1,
        _ => 2,
    }
}

/// The two switches at the ends of one rib. Active indices are `[A, B, C]`;
/// `A` is the rib end, `B = A + (s, 0)` and `C = A + (s/2, ±s/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibPlan {
    /// Lattice x of the rib.
    pub x: i64,
    /// Switch size `s` in lattice steps.
    pub size: i64,
    pub top: [usize; 3],
    pub bottom: [usize; 3],
}

/// One variable–clause incidence: a rib with 2-switches followed by a rib with
/// 2δ-switches, whose switch on the clause's side holds the clause point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionPlan {
    pub var: usize,
    /// Index into the formula's clause list.
    pub clause: usize,
    pub sign: Sign,
    pub two: RibPlan,
    pub small: RibPlan,
    pub clause_point: usize,
}

/// An axis-parallel chain carrying one strand per color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Segment {
    from: (i64, i64),
    to: (i64, i64),
    colors: ColorSet,
}

/// Geometry of a gadget instance before its chains are materialized.
#[derive(Clone, Debug)]
pub struct GadgetLayout {
    pub r: usize,
    pub m_clauses: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Lattice steps per unit length; one step is `ε/4`.
    pub unit: i64,
    pub sections: Vec<SectionPlan>,
    /// Lattice position and colors of every active point, by active index.
    pub actives: Vec<(i64, i64, ColorSet)>,
    cage: (i64, i64, i64, i64),
    segments: Vec<Segment>,
}

impl GadgetLayout {
    /// Converts a lattice coordinate to a plane coordinate.
    pub fn coord(&self, v: i64) -> f64 {
        v as f64 / self.unit as f64
    }

    pub fn active_count(&self) -> usize {
        self.actives.len()
    }

    /// Smallest distance between active points of different switches.
    pub fn min_inter_switch_distance(&self) -> f64 {
        let mut groups: Vec<(usize, [usize; 4])> = Vec::new();
        for s in &self.sections {
            groups.push((3, [s.two.top[0], s.two.top[1], s.two.top[2], 0]));
            groups.push((3, [s.two.bottom[0], s.two.bottom[1], s.two.bottom[2], 0]));
            let (t, b) = (s.small.top, s.small.bottom);
            if s.sign == Sign::Positive {
                groups.push((4, [t[0], t[1], t[2], s.clause_point]));
                groups.push((3, [b[0], b[1], b[2], 0]));
            } else {
                groups.push((3, [t[0], t[1], t[2], 0]));
                groups.push((4, [b[0], b[1], b[2], s.clause_point]));
            }
        }
        let pos = |i: usize| (self.coord(self.actives[i].0), self.coord(self.actives[i].1));
        let mut best = f64::INFINITY;
        for (gi, (na, a)) in groups.iter().enumerate() {
            for (nb, b) in &groups[gi + 1..] {
                for &p in &a[..*na] {
                    for &q in &b[..*nb] {
                        let (u, v) = (pos(p), pos(q));
                        best = best.min((u.0 - v.0).hypot(u.1 - v.1));
                    }
                }
            }
        }
        best
    }
}

fn lattice(v: f64, unit: i64) -> i64 {
    let x = (v * unit as f64).round() as i64;
    debug_assert_eq!(x % 4, 0, "layout constant off the chain lattice");
    x
}

/// Places ribs, switches, clause rows, spine and cage for `cnf`.
pub fn plan_gadget(cnf: &MonotoneCnf) -> Result<GadgetLayout> {
    let r = cnf.r();
    let m = cnf.clauses().len();
    let unit = 2000 * (r as i64) * (r as i64);
    let small = 400 * r as i64; // 2δ
    let two = lattice(2.0, unit);
    let gap = lattice(SWITCH_GAP, unit);
    let h = lattice(RIB_HALF, unit);
    let levels = cnf.levels();

    // sections per variable: clauses ending at v (inner first), the one passing
    // through v, then clauses starting at v (outer first); positive side first
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(r);
    for v in 1..=cnf.n_vars() {
        let mut inc: Vec<(u8, u8, usize, usize)> = Vec::new();
        for (ci, cl) in cnf.clauses().iter().enumerate() {
            if !cl.vars.contains(&v) {
                continue;
            }
            let side = u8::from(cl.sign == Sign::Negative);
            let (group, key) = if v == cl.hi() {
                (0, levels[ci])
            } else if v == cl.lo() {
                (2, usize::MAX - levels[ci])
            } else {
                (1, 0)
            };
            inc.push((side, group, key, ci));
        }
        inc.sort_unstable();
        order.extend(inc.into_iter().map(|t| (v, t.3)));
    }

    let mut actives: Vec<(i64, i64, ColorSet)> = Vec::with_capacity(ACTIVES_PER_INCIDENCE * r);
    let mut segments: Vec<Segment> = Vec::new();
    let mut sections = Vec::with_capacity(r);
    let mut x = 0i64;
    let rib = |x0: i64, s: i64, actives: &mut Vec<(i64, i64, ColorSet)>| -> RibPlan {
        let base = actives.len();
        for sy in [1i64, -1] {
            actives.push((x0, sy * h, black()));
            actives.push((x0 + s, sy * h, black()));
            actives.push((x0 + s / 2, sy * (h + s / 2), black()));
        }
        RibPlan {
            x: x0,
            size: s,
            top: [base, base + 1, base + 2],
            bottom: [base + 3, base + 4, base + 5],
        }
    };
    for &(var, ci) in &order {
        let sign = cnf.clauses()[ci].sign;
        let two_rib = rib(x, two, &mut actives);
        x += two + gap;
        let small_rib = rib(x, small, &mut actives);
        let sy = if sign == Sign::Positive { 1 } else { -1 };
        let clause_point = actives.len();
        actives.push((x, sy * (h + small), purple()));
        x += small + gap;
        sections.push(SectionPlan {
            var,
            clause: ci,
            sign,
            two: two_rib,
            small: small_rib,
            clause_point,
        });
    }
    let last_b = x - gap;

    // clause rows and legs
    let row_y = |ci: usize| lattice(ROW_BASE + (levels[ci] - 1) as f64 * ROW_PITCH, unit);
    let mut spans: Vec<(i64, i64, Vec<i64>)> = vec![(i64::MAX, i64::MIN, Vec::new()); m];
    for s in &sections {
        let sp = &mut spans[s.clause];
        sp.0 = sp.0.min(s.small.x);
        sp.1 = sp.1.max(s.small.x);
        sp.2.push(s.small.x);
    }
    for i in 0..m {
        for j in 0..m {
            let (ci, cj) = (&cnf.clauses()[i], &cnf.clauses()[j]);
            if i == j || ci.sign != cj.sign {
                continue;
            }
            let (a, b) = (&spans[i], &spans[j]);
            if !(a.0 < b.1 && b.0 < a.1) {
                continue;
            }
            // j is the outer clause when its row is higher
            let ok = levels[j] > levels[i] && b.0 < a.0 && a.1 < b.1 && b.2.iter().all(|&lx| lx < a.0 || lx > a.1);
            let ok_rev = levels[i] > levels[j] && a.0 < b.0 && b.1 < a.1 && a.2.iter().all(|&lx| lx < b.0 || lx > b.1);
            if !ok && !ok_rev {
                return Err(CsgError::InvalidCnf(format!(
                    "clauses {} and {} cannot be drawn without crossing",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    for s in &sections {
        let sy = if s.sign == Sign::Positive { 1 } else { -1 };
        segments.push(Segment {
            from: (s.small.x, sy * (h + small)),
            to: (s.small.x, sy * row_y(s.clause)),
            colors: purple(),
        });
    }
    for (ci, sp) in spans.iter().enumerate() {
        let sy = if cnf.clauses()[ci].sign == Sign::Positive {
            1
        } else {
            -1
        };
        segments.push(Segment {
            from: (sp.0, sy * row_y(ci)),
            to: (sp.1, sy * row_y(ci)),
            colors: purple(),
        });
    }

    // cage
    let side_levels = |sign: Sign| {
        (0..m)
            .filter(|&i| cnf.clauses()[i].sign == sign)
            .map(|i| levels[i])
            .max()
            .unwrap_or(0)
    };
    let top = lattice(ROW_BASE + side_levels(Sign::Positive) as f64 * ROW_PITCH, unit);
    let bottom = -lattice(ROW_BASE + side_levels(Sign::Negative) as f64 * ROW_PITCH, unit);
    let left = -lattice(CAGE_MARGIN, unit);
    let right = last_b + gap;
    let yellow = ColorSet::single(YELLOW);
    for y in [top, top + 4, bottom, bottom - 4] {
        segments.push(Segment {
            from: (left, y),
            to: (right, y),
            colors: yellow,
        });
    }
    for xc in [left, right] {
        segments.push(Segment {
            from: (xc, bottom - 4),
            to: (xc, top + 4),
            colors: yellow,
        });
    }

    // spine, ribs, C-columns and the yellow strands from every B to the cage
    let overhang = lattice(SPINE_OVERHANG, unit);
    segments.push(Segment {
        from: (-overhang, 0),
        to: (last_b + overhang, 0),
        colors: purple(),
    });
    let run = lattice(STRAND_RUN, unit);
    for s in &sections {
        for rp in [&s.two, &s.small] {
            let (x0, sz) = (rp.x, rp.size);
            segments.push(Segment {
                from: (x0, -h),
                to: (x0, h),
                colors: black(),
            });
            segments.push(Segment {
                from: (x0 + sz / 2, -h - sz / 2),
                to: (x0 + sz / 2, h + sz / 2),
                colors: purple(),
            });
            let corner = x0 + sz + run;
            // the downward leg starts one period above its corner so that the
            // yellow residues on both sides of the turn stay closer than ε
            for (sy, start, end) in [(1, h, top), (-1, -h + 4, bottom)] {
                segments.push(Segment {
                    from: (x0 + sz, sy * h),
                    to: (corner, sy * h),
                    colors: yellow,
                });
                segments.push(Segment {
                    from: (corner, start),
                    to: (corner, end),
                    colors: yellow,
                });
            }
        }
    }

    Ok(GadgetLayout {
        r,
        m_clauses: m,
        epsilon: 1.0 / (500.0 * (r * r) as f64),
        delta: 1.0 / (10.0 * r as f64),
        unit,
        sections,
        actives,
        cage: (left, right, top, bottom),
        segments,
    })
}

/// Lattice points of a layout with their colors, active points first.
struct Materialized {
    points: Vec<(i64, i64, ColorSet)>,
    at: HashMap<(i64, i64), usize>,
}

impl Materialized {
    fn put(&mut self, pos: (i64, i64), c: usize) -> Result<()> {
        match self.at.get(&pos) {
            Some(&i) if self.points[i].2.contains(c) => Ok(()),
            Some(_) => Err(CsgError::Invariant(format!(
                "gadget layout places two colors at lattice point {pos:?}"
            ))),
            None => {
                self.at.insert(pos, self.points.len());
                self.points.push((pos.0, pos.1, ColorSet::single(c)));
                Ok(())
            }
        }
    }
}

fn materialize(layout: &GadgetLayout) -> Result<Materialized> {
    let mut m = Materialized {
        points: Vec::new(),
        at: HashMap::new(),
    };
    for &(x, y, cs) in &layout.actives {
        if m.at.insert((x, y), m.points.len()).is_some() {
            return Err(CsgError::Invariant(format!("two active points at ({x}, {y})")));
        }
        m.points.push((x, y, cs));
    }
    for seg in &layout.segments {
        let vertical = seg.from.0 == seg.to.0;
        debug_assert!(vertical || seg.from.1 == seg.to.1);
        let (lo, hi) = if vertical {
            (seg.from.1.min(seg.to.1), seg.from.1.max(seg.to.1))
        } else {
            (seg.from.0.min(seg.to.0), seg.from.0.max(seg.to.0))
        };
        for c in seg.colors.iter() {
            let mut t = lo + (phase(c) - lo).rem_euclid(4);
            while t <= hi {
                let pos = if vertical { (seg.from.0, t) } else { (t, seg.from.1) };
                m.put(pos, c)?;
                t += 4;
            }
        }
    }
    Ok(m)
}

/// A compiled formula: the instance, its threshold and what the witness needs.
#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub instance: Instance,
    pub cnf: MonotoneCnf,
    pub layout: GadgetLayout,
    pub r: usize,
    pub m_clauses: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub w: f64,
    /// Indices of the multichromatic points, `0..13r`.
    pub active_points: Vec<usize>,
    /// `E'`: the union of the pruned MSTs, sorted.
    pub forced: Vec<Edge>,
    /// MST edges removed by pruning, sorted and deduplicated.
    pub pruned: Vec<Edge>,
    /// Pairs of yellow points one `ε` apart across the doubled top cage row.
    pub rungs: Vec<Edge>,
}

/// `W = Σ_{E'} + 39rε + r(2+2√2) + rδ(2+2√2) + mδ(2√2−2)`.
pub fn w_formula(forced_length: f64, r: usize, m_clauses: usize) -> f64 {
    let (rf, mf) = (r as f64, m_clauses as f64);
    let eps = 1.0 / (500.0 * rf * rf);
    let delta = 1.0 / (10.0 * rf);
    forced_length
        + 39.0 * rf * eps
        + rf * (2.0 + 2.0 * SQRT_2)
        + rf * delta * (2.0 + 2.0 * SQRT_2)
        + mf * delta * (2.0 * SQRT_2 - 2.0)
}

/// Emits the points of a layout, active points first, together with the rung
/// pairs of the doubled top cage row.
pub fn emit_points(layout: &GadgetLayout) -> Result<(Instance, Vec<Edge>)> {
    let mat = materialize(layout)?;
    let points: Vec<Point> = mat
        .points
        .iter()
        .map(|&(x, y, cs)| Point::new(layout.coord(x), layout.coord(y), cs))
        .collect();
    let instance = Instance::new(3, points)?;
    let n_active = layout.actives.len();
    if let Some(i) = (n_active..instance.n()).find(|&i| instance.colors(i).is_multichromatic()) {
        return Err(CsgError::Invariant(format!("chain point {i} is multichromatic")));
    }
    let (left, right, top, _) = layout.cage;
    let mut rungs = Vec::new();
    let mut x = left + 1;
    while x < right {
        if let (Some(&a), Some(&b)) = (mat.at.get(&(x, top)), mat.at.get(&(x, top + 4))) {
            rungs.push(Edge::new(a, b));
        }
        x += 4;
    }
    Ok((instance, rungs))
}

/// Compiles `cnf` into a gadget instance and computes `E'` and `W`.
pub fn build_gadget(cnf: &MonotoneCnf) -> Result<GadgetInstance> {
    let layout = plan_gadget(cnf)?;
    let (instance, rungs) = emit_points(&layout)?;
    let n_active = layout.actives.len();
    let forests = all_forced(&instance);
    let forced = forced_union(&forests);
    let mut pruned: Vec<Edge> = forests.iter().flat_map(|f| f.pruned.iter().copied()).collect();
    crate::instance::normalize_edges(&mut pruned);
    let sum: f64 = forced.iter().map(|&e| instance.edge_len(e)).sum();
    let w = w_formula(sum, layout.r, layout.m_clauses);
    Ok(GadgetInstance {
        r: layout.r,
        m_clauses: layout.m_clauses,
        epsilon: layout.epsilon,
        delta: layout.delta,
        w,
        active_points: (0..n_active).collect(),
        instance,
        cnf: cnf.clone(),
        layout,
        forced,
        pruned,
        rungs,
    })
}

/// Recomputes `E'` from the emitted points and evaluates `W`.
pub fn compute_w(g: &GadgetInstance) -> f64 {
    let forced = forced_union(&all_forced(&g.instance));
    let sum: f64 = forced.iter().map(|&e| g.instance.edge_len(e)).sum();
    w_formula(sum, g.r, g.m_clauses)
}

/// Edges of one switch pair. `state` is the value the pair encodes; `clause`
/// is the clause point to wire when this pair satisfies its clause.
fn switch_edges(rib: &RibPlan, state: bool, clause: Option<usize>) -> [Option<Edge>; 4] {
    let ([a, b, c], [a2, b2, c2]) = (rib.top, rib.bottom);
    let e = |u, v| Some(Edge::new(u, v));
    match (state, clause) {
        (true, None) => [e(a, b), e(c, a), e(c2, b2), None],
        (false, None) => [e(a2, b2), e(c2, a2), e(c, b), None],
        (true, Some(d)) => [e(a, c), e(c, b), e(c, d), e(c2, b2)],
        (false, Some(d)) => [e(a2, c2), e(c2, b2), e(c2, d), e(c, b)],
    }
}

/// Builds the standard solution of cost `W` for a satisfying assignment
/// (`assignment[i]` is the value of variable `i + 1`).
pub fn build_witness(g: &GadgetInstance, assignment: &[bool]) -> Result<Solution> {
    let cnf = &g.cnf;
    if assignment.len() != cnf.n_vars() {
        return Err(CsgError::InvalidArgument(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            cnf.n_vars()
        )));
    }
    if let Some(ci) = cnf.first_unsatisfied(assignment) {
        return Err(CsgError::Unsatisfied(ci + 1));
    }
    let chosen: Vec<usize> = cnf
        .clauses()
        .iter()
        .map(|cl| {
            let want = cl.sign == Sign::Positive;
            *cl.vars.iter().find(|&&v| assignment[v - 1] == want).unwrap()
        })
        .collect();

    let inst = &g.instance;
    let mut edges: Vec<Edge> = g.forced.clone();
    for s in &g.layout.sections {
        let value = assignment[s.var - 1];
        edges.extend(switch_edges(&s.two, value, None).into_iter().flatten());
        let d = (chosen[s.clause] == s.var).then_some(s.clause_point);
        edges.extend(switch_edges(&s.small, value, d).into_iter().flatten());
    }

    let mut ufs: Vec<UnionFind> = (0..3).map(|_| UnionFind::new(inst.n())).collect();
    let join = |ufs: &mut Vec<UnionFind>, e: Edge| -> bool {
        let shared = inst.colors(e.a).intersection(inst.colors(e.b));
        let mut any = false;
        for c in shared.iter() {
            any |= ufs[c - 1].union(e.a, e.b);
        }
        any
    };
    for &e in &edges {
        join(&mut ufs, e);
    }
    let mut by_len: Vec<(Edge, f64)> = g.pruned.iter().map(|&e| (e, inst.edge_len(e))).collect();
    by_len.sort_unstable_by(|x, y| edge_order(x.1, x.0, y.1, y.0));
    let mut spare = Vec::new();
    let mut joins = 0usize;
    for &(e, len) in &by_len {
        if join(&mut ufs, e) {
            if !approx_eq(len, g.epsilon) {
                return Err(CsgError::Invariant(format!(
                    "witness needs pruned edge {e:?} of length {len}, expected ε = {}",
                    g.epsilon
                )));
            }
            edges.push(e);
            joins += 1;
        } else if approx_eq(len, g.epsilon) {
            spare.push(e);
        }
    }
    for c in 1..=3 {
        let class = inst.class(c);
        let root = ufs[c - 1].find(class[0]);
        if class.iter().any(|&p| ufs[c - 1].find(p) != root) {
            return Err(CsgError::Invariant(format!("witness leaves color {c} disconnected")));
        }
    }

    let budget = 39 * g.r;
    if joins > budget {
        return Err(CsgError::Invariant(format!(
            "witness needs {joins} ε-edges, more than 39r = {budget}"
        )));
    }
    let mut need = budget - joins;
    let mut used: HashSet<Edge> = edges[g.forced.len()..].iter().copied().collect();
    for e in spare.into_iter().chain(g.rungs.iter().copied()) {
        if need == 0 {
            break;
        }
        if g.forced.binary_search(&e).is_ok() || !approx_eq(inst.edge_len(e), g.epsilon) {
            continue;
        }
        if !used.insert(e) {
            continue;
        }
        edges.push(e);
        need -= 1;
    }
    if need > 0 {
        return Err(CsgError::Invariant(format!("{need} ε-edges short of 39r")));
    }
    let sol = Solution::new(inst, "witness", edges, None);
    if !crate::instance::is_csg(inst, &sol.edges) {
        return Err(CsgError::Invariant("witness is not a colored spanning graph".into()));
    }
    Ok(sol)
}
