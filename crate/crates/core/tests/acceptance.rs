//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero if any fails. Run alone with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use csg_core::approx3::{approx_a1, approx_a2_bundle, approx_pairing, default_pairing, ApproxConfig};
use csg_core::collinear::{bell, dp_solve, dp_solve_with_stats};
use csg_core::dispatch::SolveMode;
use csg_core::exact2::solve_exact2;
use csg_core::gadgets::{build_gadget, build_witness, compute_w, plan_gadget, MonotoneCnf};
use csg_core::instance::{
    generate_collinear, generate_random, instance_to_string, is_csg, solution_to_string, Edge, Instance,
};
use csg_core::mst::forced_edges;
use csg_core::oracle::{brute_force, brute_force_with, ratio_bench, BenchFamily, OracleBudget, OracleOptions};
use csg_core::render::{render_svg, RenderStyle};

const TOL: f64 = 1e-9;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn budget() -> OracleBudget {
    OracleBudget::with_max_edges(40)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn check(failures: &mut Vec<String>, what: &str, ok: bool) {
    if !ok && failures.len() < 5 {
        failures.push(what.to_string());
    }
}

fn summary(failures: &[String], body: String, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let mut detail = format!("{body}, {:.2} s", elapsed.as_secs_f64());
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {} s)", l.as_secs()));
    }
    if !failures.is_empty() {
        detail.push_str(&format!("; failures: {}", failures.join("; ")));
    }
    outcome(failures.is_empty() && in_time, detail)
}

fn criterion1() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let (mut count, mut worst) = (0, 0.0f64);
    for &frac in &[0.2, 0.5, 1.0] {
        for seed in 0..70u64 {
            let n = 3 + (seed as usize % 5);
            let inst = generate_random(n, 2, frac, seed).unwrap();
            let ex = solve_exact2(&inst, 9);
            let opt = brute_force(&inst, &budget());
            let tag = format!("n={n} frac={frac} seed={seed}");
            match (ex, opt) {
                (Ok(ex), Ok(opt)) => {
                    let e = rel_err(ex.cost, opt.cost);
                    worst = worst.max(e);
                    check(&mut failures, &format!("{tag}: {} vs {}", ex.cost, opt.cost), e <= TOL);
                    check(&mut failures, &format!("{tag}: not a CSG"), is_csg(&inst, &ex.edges));
                }
                (a, b) => check(&mut failures, &format!("{tag}: {:?} / {:?}", a.err(), b.err()), false),
            }
            count += 1;
        }
    }
    summary(
        &failures,
        format!("{count} instances, max rel err {worst:.1e}"),
        t.elapsed(),
        Some(Duration::from_secs(120)),
    )
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let (mut count, mut worst) = (0, 0.0f64);
    let star = OracleOptions {
        star_only: true,
        ..Default::default()
    };
    for k in [2usize, 3] {
        for seed in 0..110u64 {
            let n = 2 + (seed as usize % 7);
            let frac = [0.2, 0.5, 0.8][seed as usize % 3];
            let inst = generate_collinear(n, k, frac, 1000 + seed).unwrap();
            let tag = format!("k={k} n={n} seed={}", 1000 + seed);
            let dp = dp_solve(&inst, 6);
            let full = brute_force(&inst, &budget());
            let restricted = brute_force_with(&inst, &budget(), &star);
            match (dp, full, restricted) {
                (Ok(dp), Ok(full), Ok(st)) => {
                    let e = rel_err(dp.cost, full.cost).max(rel_err(full.cost, st.cost));
                    worst = worst.max(e);
                    check(
                        &mut failures,
                        &format!("{tag}: dp {} full {} star {}", dp.cost, full.cost, st.cost),
                        e <= TOL,
                    );
                }
                (a, b, c) => check(
                    &mut failures,
                    &format!("{tag}: {:?} / {:?} / {:?}", a.err(), b.err(), c.err()),
                    false,
                ),
            }
            count += 1;
        }
    }
    summary(
        &failures,
        format!("{count} instances, max rel err {worst:.1e}"),
        t.elapsed(),
        Some(Duration::from_secs(300)),
    )
}

fn criterion3() -> Outcome {
    let t = Instant::now();
    let cfg = ApproxConfig::default();
    let bound2 = 2.0 - 1.0 / (3.0 + 2.0 * 1.21);
    let mut failures = Vec::new();
    let (mut r1, mut r2, mut count) = (0.0f64, 0.0f64, 0);
    for seed in 0..200u64 {
        let n = 4 + (seed as usize % 4);
        let frac = [0.2, 0.5, 1.0][seed as usize % 3];
        let inst = generate_random(n, 3, frac, 5000 + seed).unwrap();
        let tag = format!("n={n} seed={}", 5000 + seed);
        let Ok(opt) = brute_force(&inst, &budget()) else {
            check(&mut failures, &format!("{tag}: oracle refused"), false);
            continue;
        };
        let a1 = approx_a1(&inst, &cfg).unwrap();
        let bundle = approx_a2_bundle(&inst, &cfg).unwrap();
        let a2 = bundle.best();
        let g = bundle.graphs[..3]
            .iter()
            .map(|g| g.1.cost)
            .fold(f64::INFINITY, f64::min);
        check(
            &mut failures,
            &format!("{tag}: a1 {} > 2 opt {}", a1.cost, opt.cost),
            a1.cost <= 2.0 * opt.cost + TOL,
        );
        check(
            &mut failures,
            &format!("{tag}: a2 {} > {bound2} opt {}", a2.cost, opt.cost),
            a2.cost <= bound2 * opt.cost + TOL,
        );
        check(
            &mut failures,
            &format!("{tag}: a2 {} <= min G {g} <= a1 {} violated", a2.cost, a1.cost),
            a2.cost <= g + TOL && g <= a1.cost + TOL,
        );
        check(
            &mut failures,
            &format!("{tag}: output not a CSG"),
            is_csg(&inst, &a1.edges) && is_csg(&inst, &a2.edges),
        );
        if opt.cost > 0.0 {
            r1 = r1.max(a1.cost / opt.cost);
            r2 = r2.max(a2.cost / opt.cost);
        }
        count += 1;
    }
    summary(
        &failures,
        format!("{count} instances, max a1/opt {r1:.4} (bound 2), max a2/opt {r2:.4} (bound {bound2:.4})"),
        t.elapsed(),
        None,
    )
}

fn criterion4() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for seed in 0..120u64 {
        let n = 3 + (seed as usize % 5);
        let k = 2 + (seed as usize % 2);
        let inst = generate_random(n, k, 0.4, 9000 + seed).unwrap();
        let mut required: Vec<Edge> = (1..=k).flat_map(|c| forced_edges(&inst, c).edges).collect();
        required.sort();
        required.dedup();
        let opts = OracleOptions {
            required,
            ..Default::default()
        };
        let tag = format!("k={k} n={n} seed={}", 9000 + seed);
        match (brute_force(&inst, &budget()), brute_force_with(&inst, &budget(), &opts)) {
            (Ok(a), Ok(b)) => check(
                &mut failures,
                &format!("{tag}: {} vs {}", a.cost, b.cost),
                rel_err(a.cost, b.cost) <= TOL,
            ),
            (a, b) => check(&mut failures, &format!("{tag}: {:?} / {:?}", a.err(), b.err()), false),
        }
        count += 1;
    }
    summary(&failures, format!("{count} instances"), t.elapsed(), None)
}

const GADGET_CORPUS: &[&str] = &[
    "p mcnf 2 1\n+ 1 2\n",
    "p mcnf 2 1\n- 1 2\n",
    "p mcnf 3 1\n+ 1 2 3\n",
    "p mcnf 6 1\n+ 3 5\n",
    "p mcnf 2 2\n+ 1 2\n- 1 2\n",
];

const THREE_CLAUSES: &str = "p mcnf 5 3\n+ 1 3 5\n- 1 5\n- 2 3 4\n";

fn criterion5() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let (mut formulas, mut witnesses, mut worst) = (0, 0, 0.0f64);
    for text in GADGET_CORPUS {
        let cnf = MonotoneCnf::parse(text).unwrap();
        let tag = text.lines().skip(1).collect::<Vec<_>>().join(" / ");
        let g = match build_gadget(&cnf) {
            Ok(g) => g,
            Err(e) => {
                check(&mut failures, &format!("{tag}: {e}"), false);
                continue;
            }
        };
        check(
            &mut failures,
            &format!("{tag}: {} active points, r = {}", g.active_points.len(), g.r),
            g.active_points.len() == 13 * g.r,
        );
        let multi = g
            .instance
            .points()
            .iter()
            .filter(|p| p.colors.is_multichromatic())
            .count();
        check(
            &mut failures,
            &format!("{tag}: {multi} multichromatic points"),
            multi == g.active_points.len(),
        );
        let w = compute_w(&g);
        for a in cnf.satisfying_assignments() {
            match build_witness(&g, &a) {
                Ok(sol) => {
                    let e = rel_err(sol.cost, w);
                    worst = worst.max(e);
                    check(
                        &mut failures,
                        &format!("{tag} {a:?}: cost {} W {w}", sol.cost),
                        e <= TOL,
                    );
                    check(
                        &mut failures,
                        &format!("{tag} {a:?}: not a CSG"),
                        is_csg(&g.instance, &sol.edges),
                    );
                }
                Err(e) => check(&mut failures, &format!("{tag} {a:?}: {e}"), false),
            }
            witnesses += 1;
        }
        formulas += 1;
    }
    let plan = plan_gadget(&MonotoneCnf::parse(THREE_CLAUSES).unwrap()).unwrap();
    check(
        &mut failures,
        &format!("three-clause formula: r = {}, {} actives", plan.r, plan.active_count()),
        plan.r == 8 && plan.active_count() == 104,
    );
    summary(
        &failures,
        format!(
            "{formulas} formulas, {witnesses} witnesses, max rel err {worst:.1e}; three-clause formula r = {}, {} active points",
            plan.r,
            plan.active_count()
        ),
        t.elapsed(),
        None,
    )
}

fn criterion6() -> Outcome {
    let k = 3;
    let per_color = bell(1 << (k - 1));
    let per_vector = per_color.pow(k as u32);
    let mut failures = Vec::new();
    check(&mut failures, &format!("B(4) = {per_color}"), per_color == 15);
    let seeds = [11u64, 12, 13];
    let mut time = [0.0f64; 2];
    let mut states = [0usize; 2];
    let mut peak = 0usize;
    for (slot, n) in [1000usize, 2000].into_iter().enumerate() {
        for &seed in &seeds {
            let inst = generate_collinear(n, k, 0.5, seed).unwrap();
            let mut best = f64::INFINITY;
            let mut total = 0;
            for _ in 0..3 {
                let t = Instant::now();
                let (_, stats) = dp_solve_with_stats(&inst, 6).unwrap();
                best = best.min(t.elapsed().as_secs_f64());
                total = stats.total_states();
                let cut_peak = stats.max_partitions_per_gamma.iter().copied().max().unwrap_or(0);
                let color_peak = stats.max_color_partitions.iter().copied().max().unwrap_or(0);
                peak = peak.max(cut_peak);
                check(
                    &mut failures,
                    &format!("n={n} seed={seed}: {cut_peak} vectors per family"),
                    cut_peak as u128 <= per_vector,
                );
                check(
                    &mut failures,
                    &format!("n={n} seed={seed}: {color_peak} partitions per color"),
                    color_peak as u128 <= per_color,
                );
            }
            states[slot] += total;
            time[slot] += best;
        }
    }
    let time_ratio = time[1] / time[0];
    let state_ratio = states[1] as f64 / states[0] as f64;
    check(
        &mut failures,
        &format!("runtime ratio {time_ratio:.2}"),
        time_ratio <= 2.5,
    );
    check(
        &mut failures,
        &format!("state ratio {state_ratio:.2}"),
        state_ratio <= 2.5,
    );
    outcome(
        failures.is_empty(),
        format!(
            "peak {peak} vectors per family (bound {per_vector}), states n=1000 {} n=2000 {} (ratio {state_ratio:.2}), runtime {:.2} s vs {:.2} s (ratio {time_ratio:.2}, limit 2.5){}",
            states[0],
            states[1],
            time[0],
            time[1],
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join("; ")) }
        ),
    )
}

fn twice<T: PartialEq, F: Fn() -> T>(failures: &mut Vec<String>, what: &str, f: F) {
    let (a, b) = (f(), f());
    check(failures, what, a == b);
}

fn criterion7() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let cfg = ApproxConfig::default();
    let style = RenderStyle::default();
    let text = |r: csg_core::error::Result<csg_core::instance::Solution>| r.map(|s| solution_to_string(&s)).ok();
    let k2 = |s| generate_random(7, 2, 0.5, s).unwrap();
    let k3 = |s| generate_random(7, 3, 0.5, s).unwrap();
    let k4 = |s| generate_random(12, 4, 0.3, s).unwrap();
    let line = |s| generate_collinear(300, 3, 0.5, s).unwrap();
    let mut count = 0;
    for seed in 0..5u64 {
        twice(&mut failures, "generate_random", || {
            instance_to_string(&generate_random(50, 3, 0.4, seed).unwrap())
        });
        twice(&mut failures, "generate_collinear", || {
            instance_to_string(&generate_collinear(50, 3, 0.4, seed).unwrap())
        });
        twice(&mut failures, "exact2", || text(solve_exact2(&k2(seed), 9)));
        twice(&mut failures, "oracle", || text(brute_force(&k3(seed), &budget())));
        twice(&mut failures, "a1", || text(approx_a1(&k3(seed), &cfg)));
        twice(&mut failures, "a2", || {
            approx_a2_bundle(&k3(seed), &cfg)
                .ok()
                .map(|b| solution_to_string(b.best()))
        });
        twice(&mut failures, "pairing", || {
            text(approx_pairing(&k4(seed), &default_pairing(4), &cfg))
        });
        twice(&mut failures, "dp", || text(dp_solve(&line(seed), 6)));
        twice(&mut failures, "render_svg", || {
            let inst: Instance = k3(seed);
            let sol = approx_a1(&inst, &cfg).unwrap();
            render_svg(&inst, Some(&sol), &style)
        });
        count += 1;
    }
    twice(&mut failures, "ratio_bench", || {
        ratio_bench(
            &BenchFamily::Random {
                n: 6,
                k: 3,
                fraction: 0.4,
            },
            &[SolveMode::A1, SolveMode::A2],
            0,
            16,
            &budget(),
        )
        .to_csv()
    });
    let cnf = MonotoneCnf::parse(GADGET_CORPUS[0]).unwrap();
    twice(&mut failures, "gadget", || {
        let g = build_gadget(&cnf).unwrap();
        let w = build_witness(&g, &[true, false]).unwrap();
        (g.instance, solution_to_string(&w))
    });
    summary(
        &failures,
        format!("{count} seeds x 9 producers, bench and gadget compared byte for byte"),
        t.elapsed(),
        None,
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("exact2 equals the oracle for two colors", criterion1),
        ("collinear DP equals both oracle modes", criterion2),
        ("approximation ratios and candidate ordering", criterion3),
        ("forced edges keep the optimum", criterion4),
        ("gadget witnesses meet W", criterion5),
        ("DP state bound and linear growth", criterion6),
        ("determinism", criterion7),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!(
            "criterion {}: {} - {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
