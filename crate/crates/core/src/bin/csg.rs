use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use csg_core::approx3::ApproxConfig;
use csg_core::collinear::{dp_solve_with_stats, DEFAULT_K_GUARD};
use csg_core::dispatch::{solve_dispatch, DispatchConfig, SolveMode};
use csg_core::error::{CsgError, Result};
use csg_core::exact2::{solve_pair, PairProjection, DEFAULT_M_LIMIT};
use csg_core::gadgets::{build_gadget, build_witness, parse_assignment, MonotoneCnf};
use csg_core::instance::{
    color_connected, generate_collinear, generate_random, instance_to_string, load_instance, load_solution,
    solution_to_string, Edge, Instance, Solution,
};
use csg_core::mst::forced_edges;
use csg_core::oracle::{ratio_bench, BenchFamily, OracleBudget, DEFAULT_MAX_EDGES};
use csg_core::render::{render_svg, RenderStyle};

#[derive(Parser)]
#[command(
    name = "csg",
    version,
    about = "Minimum colored spanning graphs on planar point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Instance JSON.
    #[arg(long)]
    input: PathBuf,
    /// Solution JSON; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also draw the solution as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve with an explicit or automatically chosen algorithm.
    Solve {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "auto")]
        mode: SolveMode,
        #[arg(long, default_value_t = 1.21)]
        rho: f64,
        #[arg(long, default_value_t = DEFAULT_M_LIMIT)]
        m_limit: usize,
        #[arg(long, default_value_t = DEFAULT_K_GUARD)]
        k_guard: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
        max_edges: usize,
    },
    /// Exact optimum for two colors.
    Exact2 {
        #[command(flatten)]
        io: Io,
        /// Color pair, e.g. `1,2`.
        #[arg(long, value_parser = parse_pair)]
        pair: Option<(usize, usize)>,
        /// JSON list of point-index groups counted as pre-connected.
        #[arg(long)]
        merge_groups: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_M_LIMIT)]
        m_limit: usize,
    },
    /// Three-color approximations.
    Approx {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "a2")]
        algorithm: ApproxAlgo,
        #[arg(long, default_value_t = 1.21)]
        rho: f64,
    },
    /// Exact optimum for collinear points.
    Collinear {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = DEFAULT_K_GUARD)]
        k_guard: usize,
        /// Print per-cut state counts to stderr.
        #[arg(long)]
        debug: bool,
    },
    /// Brute-force optimum.
    Oracle {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
        max_edges: usize,
        /// Give up after this many seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Generate instances.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Compare algorithm costs with the brute-force optimum.
    Bench {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, value_delimiter = ',', default_value = "a1,a2")]
        algos: Vec<SolveMode>,
        #[arg(long, default_value_t = 200)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Share of multichromatic points.
        #[arg(long, default_value_t = 0.4)]
        fraction: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
        max_edges: usize,
        /// CSV report; stdout when omitted.
        #[arg(long, alias = "output")]
        out: Option<PathBuf>,
    },
    /// Draw an instance and optionally a solution.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long, alias = "output")]
        svg: PathBuf,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
    /// Print the forced MST edges of every color.
    Prune {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Random(GenArgs),
    Collinear(GenArgs),
    /// Reduction instance of a monotone planar 3-CNF.
    Gadget {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, alias = "output")]
        out: PathBuf,
        /// Assignment file (`1 -2 3`) whose witness solution is written too.
        #[arg(long, requires = "witness_out")]
        witness: Option<PathBuf>,
        #[arg(long, requires = "witness")]
        witness_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.3)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, alias = "output")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxAlgo {
    A1,
    A2,
    Pairing,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Random,
    Collinear,
    Allblack,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two colors as `c1,c2`")?;
    let a = a.trim().parse().map_err(|_| format!("bad color `{a}`"))?;
    let b = b.trim().parse().map_err(|_| format!("bad color `{b}`"))?;
    Ok((a, b))
}

fn exit_code(e: &CsgError) -> u8 {
    match e {
        CsgError::LimitExceeded { .. } | CsgError::NotApplicable(_) => 2,
        CsgError::Invariant(_) => 3,
        _ => 1,
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    load_instance(fs::File::open(path)?)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit(io: &Io, inst: &Instance, sol: &Solution) -> Result<()> {
    sol.validate(inst)?;
    finish(io, inst, sol)
}

fn finish(io: &Io, inst: &Instance, sol: &Solution) -> Result<()> {
    write_text(io.output.as_deref(), &solution_to_string(sol))?;
    if let Some(svg) = &io.svg {
        fs::write(svg, render_svg(inst, Some(sol), &RenderStyle::default()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            io,
            mode,
            rho,
            m_limit,
            k_guard,
            max_edges,
        } => {
            let inst = read_instance(&io.input)?;
            let cfg = DispatchConfig {
                approx: ApproxConfig::new(rho)?,
                m_limit,
                k_guard,
                oracle: OracleBudget {
                    max_candidate_edges: max_edges,
                    time_limit: None,
                },
                pair: None,
            };
            let sol = solve_dispatch(&inst, mode, &cfg)?;
            emit(&io, &inst, &sol)
        }
        Command::Exact2 {
            io,
            pair,
            merge_groups,
            m_limit,
        } => {
            let inst = read_instance(&io.input)?;
            let Some((c1, c2)) = pair.or((inst.k() <= 2).then_some((1, 2))) else {
                return Err(CsgError::NotApplicable(format!(
                    "instance has {} colors; choose two with --pair",
                    inst.k()
                )));
            };
            if inst.k() == 1 && pair.is_none() {
                let sol = solve_dispatch(&inst, SolveMode::Exact2, &DispatchConfig::default())?;
                return emit(&io, &inst, &sol);
            }
            let groups: Vec<Vec<usize>> = match &merge_groups {
                Some(p) => serde_json::from_reader(fs::File::open(p)?)?,
                None => Vec::new(),
            };
            let proj = PairProjection::new(&inst, c1, c2)?.with_groups(groups.clone())?;
            let sol = solve_pair(&proj, m_limit)?;
            // Groups stand for connections made elsewhere, so check with them in place.
            let mut with_groups = sol.edges.clone();
            for g in &groups {
                with_groups.extend(g.windows(2).map(|w| Edge::new(w[0], w[1])));
            }
            if !color_connected(&inst, &with_groups, c1) || !color_connected(&inst, &with_groups, c2) {
                return Err(CsgError::Invariant(format!(
                    "{} output leaves a pair color disconnected",
                    sol.algorithm
                )));
            }
            if inst.k() == 2 && groups.is_empty() {
                sol.validate(&inst)?;
            }
            finish(&io, &inst, &sol)
        }
        Command::Approx { io, algorithm, rho } => {
            let inst = read_instance(&io.input)?;
            let mode = match algorithm {
                ApproxAlgo::A1 => SolveMode::A1,
                ApproxAlgo::A2 => SolveMode::A2,
                ApproxAlgo::Pairing => SolveMode::Pairing,
            };
            let cfg = DispatchConfig {
                approx: ApproxConfig::new(rho)?,
                ..Default::default()
            };
            let sol = solve_dispatch(&inst, mode, &cfg)?;
            emit(&io, &inst, &sol)
        }
        Command::Collinear { io, k_guard, debug } => {
            let inst = read_instance(&io.input)?;
            let (sol, stats) = dp_solve_with_stats(&inst, k_guard)?;
            if debug {
                for (j, s) in stats.states_per_cut.iter().enumerate() {
                    eprintln!(
                        "cut {j}: states {s}, max partitions per family {}, max color partitions {}",
                        stats.max_partitions_per_gamma[j], stats.max_color_partitions[j]
                    );
                }
                eprintln!("transitions {}", stats.transitions);
            }
            emit(&io, &inst, &sol)
        }
        Command::Oracle {
            io,
            max_edges,
            time_limit,
        } => {
            let inst = read_instance(&io.input)?;
            let cfg = DispatchConfig {
                oracle: OracleBudget {
                    max_candidate_edges: max_edges,
                    time_limit: time_limit.map(Duration::from_secs_f64),
                },
                ..Default::default()
            };
            let sol = solve_dispatch(&inst, SolveMode::Oracle, &cfg)?;
            emit(&io, &inst, &sol)
        }
        Command::Gen { kind } => match kind {
            GenKind::Random(a) => {
                let inst = generate_random(a.n, a.k, a.fraction, a.seed)?;
                write_text(a.out.as_deref(), &instance_to_string(&inst))
            }
            GenKind::Collinear(a) => {
                let inst = generate_collinear(a.n, a.k, a.fraction, a.seed)?;
                write_text(a.out.as_deref(), &instance_to_string(&inst))
            }
            GenKind::Gadget {
                cnf,
                out,
                witness,
                witness_out,
            } => {
                let cnf = MonotoneCnf::parse(&fs::read_to_string(cnf)?)?;
                let g = build_gadget(&cnf)?;
                fs::write(&out, instance_to_string(&g.instance))?;
                eprintln!("{} points, r = {}, W = {:.12}", g.instance.n(), g.r, g.w);
                if let (Some(w), Some(wout)) = (witness, witness_out) {
                    let assignment = parse_assignment(&fs::read_to_string(w)?, cnf.n_vars())?;
                    let sol = build_witness(&g, &assignment)?;
                    sol.validate(&g.instance)?;
                    fs::write(wout, solution_to_string(&sol))?;
                    eprintln!("witness cost {:.12}", sol.cost);
                }
                Ok(())
            }
        },
        Command::Bench {
            family,
            algos,
            seeds,
            seed,
            n,
            k,
            fraction,
            max_edges,
            out,
        } => {
            let fam = match family {
                Family::Random => BenchFamily::Random { n, k, fraction },
                Family::Collinear => BenchFamily::Collinear { n, k, fraction },
                Family::Allblack => BenchFamily::AllBlack { n, k },
            };
            let budget = OracleBudget {
                max_candidate_edges: max_edges,
                time_limit: None,
            };
            let report = ratio_bench(&fam, &algos, seed, seeds, &budget);
            write_text(out.as_deref(), &report.to_csv())?;
            for s in &report.summaries {
                let bound = s.bound.map_or("-".to_string(), |b| format!("{b:.4}"));
                eprintln!(
                    "{}: runs {}, max ratio {:.6}, mean ratio {:.6}, bound {bound}, violations {}",
                    s.algo,
                    s.runs,
                    s.max_ratio,
                    s.mean_ratio,
                    s.violations.len()
                );
            }
            for (seed, e) in &report.failures {
                eprintln!("seed {seed}: {e}");
            }
            if report.summaries.iter().any(|s| !s.violations.is_empty()) {
                return Err(CsgError::Invariant("ratio bound exceeded".into()));
            }
            Ok(())
        }
        Command::Render {
            input,
            solution,
            svg,
            width,
        } => {
            let inst = read_instance(&input)?;
            let sol = match solution {
                Some(p) => {
                    let sol = load_solution(fs::File::open(p)?)?;
                    if let Some(e) = sol.edges.iter().find(|e| e.b >= inst.n()) {
                        return Err(CsgError::Parse(format!("edge ({}, {}) out of range", e.a, e.b)));
                    }
                    Some(sol)
                }
                None => None,
            };
            let style = RenderStyle {
                width,
                ..Default::default()
            };
            fs::write(svg, render_svg(&inst, sol.as_ref(), &style))?;
            Ok(())
        }
        Command::Prune { input } => {
            let inst = read_instance(&input)?;
            for c in 1..=inst.k() {
                let f = forced_edges(&inst, c);
                println!(
                    "color {c}: {} points, {} of {} MST edges forced, {} components",
                    f.points.len(),
                    f.edges.len(),
                    f.mst_edges,
                    f.n_components
                );
                for e in &f.edges {
                    println!("  {} {}", e.a, e.b);
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
