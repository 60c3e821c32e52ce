//! One entry point over every solver, used by the command line and the FFI.

use std::fmt;
use std::str::FromStr;

use crate::approx3::{approx_a1, approx_a2, approx_pairing, default_pairing, ApproxConfig};
use crate::collinear::{dp_solve, is_collinear, DEFAULT_K_GUARD};
use crate::error::{CsgError, Result};
use crate::exact2::{solve_exact2, solve_pair, PairProjection, DEFAULT_M_LIMIT};
use crate::instance::{color_connected, Instance, Solution};
use crate::oracle::{brute_force, OracleBudget};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Auto,
    Exact2,
    A1,
    A2,
    Pairing,
    Dp,
    Oracle,
}

impl FromStr for SolveMode {
    type Err = CsgError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => SolveMode::Auto,
            "exact2" => SolveMode::Exact2,
            "a1" => SolveMode::A1,
            "a2" => SolveMode::A2,
            "pairing" => SolveMode::Pairing,
            "dp" => SolveMode::Dp,
            "oracle" => SolveMode::Oracle,
            _ => {
                return Err(CsgError::InvalidArgument(format!(
                    "unknown mode `{s}` (auto, exact2, a1, a2, pairing, dp, oracle)"
                )))
            }
        })
    }
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Auto => "auto",
            SolveMode::Exact2 => "exact2",
            SolveMode::A1 => "a1",
            SolveMode::A2 => "a2",
            SolveMode::Pairing => "pairing",
            SolveMode::Dp => "dp",
            SolveMode::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug)]
pub struct DispatchConfig {
    pub approx: ApproxConfig,
    pub m_limit: usize,
    pub k_guard: usize,
    pub oracle: OracleBudget,
    /// Solve only this color pair (exact2 on instances with more colors).
    pub pair: Option<(usize, usize)>,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        DispatchConfig {
            approx: ApproxConfig::default(),
            m_limit: DEFAULT_M_LIMIT,
            k_guard: DEFAULT_K_GUARD,
            oracle: OracleBudget::default(),
            pair: None,
        }
    }
}

/// The mode `Auto` resolves to for `inst`.
pub fn resolve_mode(inst: &Instance) -> SolveMode {
    if inst.k() <= 2 {
        SolveMode::Exact2
    } else if is_collinear(inst) {
        SolveMode::Dp
    } else if inst.k() == 3 {
        SolveMode::A2
    } else {
        SolveMode::Pairing
    }
}

/// Runs the solver selected by `mode` and checks its output before returning it:
/// every color (or both colors of `cfg.pair`) must be connected and the stored
/// cost must match the edges.
pub fn solve_dispatch(inst: &Instance, mode: SolveMode, cfg: &DispatchConfig) -> Result<Solution> {
    let mode = if mode == SolveMode::Auto {
        resolve_mode(inst)
    } else {
        mode
    };
    if cfg.pair.is_some() && mode != SolveMode::Exact2 {
        return Err(CsgError::InvalidArgument("a color pair only applies to exact2".into()));
    }
    let sol = match mode {
        SolveMode::Exact2 => match cfg.pair {
            Some((c1, c2)) => solve_pair(&PairProjection::new(inst, c1, c2)?, cfg.m_limit)?,
            None => solve_exact2(inst, cfg.m_limit)?,
        },
        SolveMode::A1 => approx_a1(inst, &cfg.approx)?,
        SolveMode::A2 => approx_a2(inst, &cfg.approx)?,
        SolveMode::Pairing => approx_pairing(inst, &default_pairing(inst.k()), &cfg.approx)?,
        SolveMode::Dp => dp_solve(inst, cfg.k_guard)?,
        SolveMode::Oracle => brute_force(inst, &cfg.oracle)?,
        SolveMode::Auto => unreachable!(),
    };
    match cfg.pair {
        Some((c1, c2)) => {
            if !color_connected(inst, &sol.edges, c1) || !color_connected(inst, &sol.edges, c2) {
                return Err(CsgError::Invariant(format!(
                    "{} output leaves color {c1} or {c2} disconnected",
                    sol.algorithm
                )));
            }
        }
        None => sol.validate(inst)?,
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_collinear, generate_random};

    #[test]
    fn auto_rules() {
        let k2 = generate_random(6, 2, 0.5, 1).unwrap();
        let s = solve_dispatch(&k2, SolveMode::Auto, &DispatchConfig::default()).unwrap();
        assert_eq!(s.algorithm, "exact2");
        assert_eq!(s.ratio_bound, Some(1.0));

        let line = generate_collinear(7, 3, 0.5, 2).unwrap();
        assert_eq!(resolve_mode(&line), SolveMode::Dp);
        let s = solve_dispatch(&line, SolveMode::Auto, &DispatchConfig::default()).unwrap();
        assert_eq!(s.ratio_bound, Some(1.0));

        let k3 = generate_random(8, 3, 0.5, 3).unwrap();
        let s = solve_dispatch(&k3, SolveMode::Auto, &DispatchConfig::default()).unwrap();
        assert_eq!(s.algorithm, "a2");
        assert!((s.ratio_bound.unwrap() - 1.816).abs() < 1e-3);

        let k5 = generate_random(10, 5, 0.3, 4).unwrap();
        assert_eq!(resolve_mode(&k5), SolveMode::Pairing);
        solve_dispatch(&k5, SolveMode::Auto, &DispatchConfig::default()).unwrap();
    }

    #[test]
    fn inapplicable_modes() {
        let k3 = generate_random(8, 3, 0.5, 3).unwrap();
        let cfg = DispatchConfig::default();
        assert!(matches!(
            solve_dispatch(&k3, SolveMode::Exact2, &cfg),
            Err(CsgError::NotApplicable(_))
        ));
        assert!(matches!(
            solve_dispatch(&k3, SolveMode::Dp, &cfg),
            Err(CsgError::NotApplicable(_))
        ));
        let pair = DispatchConfig {
            pair: Some((1, 3)),
            ..Default::default()
        };
        let s = solve_dispatch(&k3, SolveMode::Exact2, &pair).unwrap();
        assert!(color_connected(&k3, &s.edges, 1) && color_connected(&k3, &s.edges, 3));
        assert!(solve_dispatch(&k3, SolveMode::A2, &pair).is_err());
        assert!("nope".parse::<SolveMode>().is_err());
        assert_eq!("dp".parse::<SolveMode>().unwrap().to_string(), "dp");
    }
}
