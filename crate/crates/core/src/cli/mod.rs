//! Pipelines behind the `adsolve` binary.
//!
//! Each subcommand turns a [`RunConfig`] into a plain-text report. Exit codes:
//! 0 on success, 1 for invalid input, 2 for numerical failures (including a
//! verification that did not pass).

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use thiserror::Error;

pub use config::{fmt_complex, fmt_real, parse_config, ConfigError, GTerm, GridRay, RunConfig};

use crate::algebra::C64;
use crate::equation::{
    characteristic_roots, detect_resonance, CharacteristicData, EquationSpec, RootIndex,
    UNIT_CIRCLE_TOL,
};
use crate::error::Error;
use crate::general::{assemble_general, GeneralSolution, PeriodicFunction};
use crate::manifold::{diagonalize, solve_psi, Transform};
use crate::particular::{
    classify_resonance, solve_particular, solve_resonant, Branch, ParticularSolution, SolveOptions,
};
use crate::verify::{
    iteration_oracle, oracle_start, residual_scan, BacksteppingContext, ScanConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Roots,
    Solve,
    Resonance,
    Psi,
    General,
    Verify,
    OrbitCsv,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Roots,
        Subcommand::Solve,
        Subcommand::Resonance,
        Subcommand::Psi,
        Subcommand::General,
        Subcommand::Verify,
        Subcommand::OrbitCsv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Roots => "roots",
            Subcommand::Solve => "solve",
            Subcommand::Resonance => "resonance",
            Subcommand::Psi => "psi",
            Subcommand::General => "general",
            Subcommand::Verify => "verify",
            Subcommand::OrbitCsv => "orbit-csv",
        }
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown subcommand `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),

    #[error("invalid input: {0}")]
    Validation(Error),

    #[error("numerical failure: {0}")]
    Numeric(Error),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite(_)
            | Error::BetaZero
            | Error::GNontrivial
            | Error::BadDegree { .. }
            | Error::NoHyperbolicCase { .. }
            | Error::InvalidArgument(_) => CliError::Validation(e),
            _ => CliError::Numeric(e),
        }
    }
}

/// Report text plus whether every check in it passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}

/// Runs one subcommand and returns its report.
pub fn run(cfg: &RunConfig, cmd: Subcommand) -> Result<Outcome, CliError> {
    let spec = cfg.equation()?;
    let chars = characteristic_roots(&spec)?;
    info!(
        "{}: lambda1 = {}, lambda2 = {}",
        cmd.name(),
        chars.lambda1,
        chars.lambda2
    );
    match cmd {
        Subcommand::Roots => Ok(Outcome::ok(roots_report(&chars))),
        Subcommand::Resonance => resonance_report(cfg, &spec, &chars).map(Outcome::ok),
        Subcommand::Solve => solve_report(cfg, &spec, &chars).map(Outcome::ok),
        Subcommand::Psi => psi_report(cfg, &spec, &chars).map(Outcome::ok),
        Subcommand::General => general_report(cfg, &spec, &chars).map(Outcome::ok),
        Subcommand::Verify => verify_report(cfg, &spec, &chars),
        Subcommand::OrbitCsv => orbit_csv(cfg, &spec, &chars).map(Outcome::ok),
    }
}

/// Runs a subcommand and writes its report to `out` (or, for `orbit-csv`,
/// to the configured output path). Returns the report when nothing was
/// written. Files are only written once the whole report is available.
pub fn execute(
    cfg: &RunConfig,
    cmd: Subcommand,
    out: Option<&Path>,
) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let outcome = run(cfg, cmd)?;
    let target = out.map(Path::to_path_buf).or_else(|| match cmd {
        Subcommand::OrbitCsv => cfg.output_path.as_ref().map(PathBuf::from),
        _ => None,
    });
    if let Some(path) = &target {
        if outcome.passed || cmd == Subcommand::Verify {
            write_whole(path, &outcome.text)?;
        }
    }
    Ok((outcome, target))
}

fn write_whole(path: &Path, text: &str) -> Result<(), CliError> {
    if let Err(e) = fs::write(path, text) {
        let _ = fs::remove_file(path);
        return Err(CliError::Io(format!(
            "cannot write {}: {e}",
            path.display()
        )));
    }
    Ok(())
}

fn roots_report(chars: &CharacteristicData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lambda1={}", fmt_complex(chars.lambda1));
    let _ = writeln!(s, "lambda2={}", fmt_complex(chars.lambda2));
    let _ = writeln!(s, "abs_lambda1={}", fmt_real(chars.lambda1.norm()));
    let _ = writeln!(s, "abs_lambda2={}", fmt_real(chars.lambda2.norm()));
    let _ = writeln!(s, "case_i={}", chars.case_i_available);
    let _ = writeln!(s, "case_ii={}", chars.case_ii_available);
    s
}

fn resonance_report(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<String, CliError> {
    let report = detect_resonance(chars, cfg.k_max, cfg.resonance_tol);
    let mut s = String::new();
    let _ = writeln!(s, "k_max={}", report.k_max_scanned);
    let _ = writeln!(s, "tol={}", fmt_real(report.tol));
    let _ = writeln!(s, "resonances={}", report.entries.len());
    for e in &report.entries {
        let branch = if e.relevant {
            match classify_resonance(spec, chars, e.m, e.k) {
                Ok((b, c_star)) => format!(
                    "{} c_star={}",
                    match b {
                        crate::particular::ResonanceBranch::Free => "free",
                        crate::particular::ResonanceBranch::Stride => "stride",
                    },
                    fmt_complex(c_star)
                ),
                Err(err) => format!("unclassified ({err})"),
            }
        } else {
            "not_obstructing".to_string()
        };
        let _ = writeln!(
            s,
            "resonance m={} k={} distance={} relevant={} branch={}",
            e.m.number(),
            e.k,
            fmt_real(e.distance),
            e.relevant,
            branch
        );
    }
    for w in &report.warnings {
        let _ = writeln!(
            s,
            "near_resonance m={} k={} distance={}",
            w.m.number(),
            w.k,
            fmt_real(w.distance)
        );
    }
    Ok(s)
}

fn solve_options(cfg: &RunConfig, m: RootIndex) -> SolveOptions {
    SolveOptions {
        order: cfg.order,
        a1: cfg.a1[(m.number() - 1) as usize],
        residual_tol: cfg.residual_tol,
    }
}

/// Particular solution for root `m`, choosing the resonant solver when a
/// relevant resonance obstructs the plain recurrence.
fn particular_for(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
    m: RootIndex,
) -> Result<ParticularSolution, Error> {
    let opts = solve_options(cfg, m);
    let report = detect_resonance(chars, cfg.k_max, cfg.resonance_tol);
    match report.entry_for(m) {
        Some(entry) => solve_resonant(spec, chars, m, entry.k, opts.a1, cfg.resonance_free, &opts),
        None => solve_particular(spec, chars, m, &opts),
    }
}

fn decaying_roots(chars: &CharacteristicData) -> Vec<RootIndex> {
    [RootIndex::First, RootIndex::Second]
        .into_iter()
        .filter(|&m| (chars.lambda(m).norm() - 1.0).abs() > UNIT_CIRCLE_TOL)
        .collect()
}

fn branch_name(b: &Branch) -> String {
    match b {
        Branch::Regular => "regular".into(),
        Branch::ResonantFree { k, .. } => format!("resonant_free k={k}"),
        Branch::ResonantStride { k, .. } => format!("resonant_stride k={k}"),
    }
}

fn solve_report(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<String, CliError> {
    let mut s = String::new();
    for m in decaying_roots(chars) {
        let sol = particular_for(cfg, spec, chars, m)?;
        let _ = writeln!(s, "[root {}]", m.number());
        let _ = writeln!(s, "lambda={}", fmt_complex(sol.lambda));
        let _ = writeln!(s, "branch={}", branch_name(&sol.branch));
        let _ = writeln!(s, "stride={}", sol.stride);
        let _ = writeln!(s, "eta={}", fmt_real(sol.eta));
        for (n, a) in sol.coeffs.coeffs().iter().enumerate() {
            let _ = writeln!(s, "a{}={}", n + 1, fmt_complex(*a));
        }
        s.push('\n');
    }
    Ok(s)
}

fn psi_report(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<String, CliError> {
    let m = RootIndex::from_number(cfg.general_m)?;
    let order = cfg.psi_order();
    let sys = diagonalize(spec, chars, Transform::for_root(m), order as u32)?;
    let psi = solve_psi(&sys, order)?;
    let mut s = String::new();
    let _ = writeln!(s, "transform={:?}", sys.which);
    let _ = writeln!(s, "lam_x={}", fmt_complex(sys.lam_x));
    let _ = writeln!(s, "lam_y={}", fmt_complex(sys.lam_y));
    let _ = writeln!(s, "order={}", psi.order());
    let _ = writeln!(s, "radius={}", fmt_real(psi.radius()));
    let _ = writeln!(
        s,
        "functional_residual={}",
        fmt_real(psi.functional_residual().max_abs())
    );
    for w in &psi.warnings {
        let _ = writeln!(
            s,
            "conditioning order={} divisor={}",
            w.order,
            fmt_real(w.divisor)
        );
    }
    for n in 2..=psi.order() {
        let _ = writeln!(s, "gamma{}={}", n, fmt_complex(psi.gamma(n)));
    }
    Ok(s)
}

fn general_for(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<GeneralSolution, Error> {
    let m = RootIndex::from_number(cfg.general_m)?;
    let pi = PeriodicFunction::new(cfg.pi_terms.clone())?;
    assemble_general(spec, chars, m, &solve_options(cfg, m), cfg.psi_order(), pi)
}

fn general_report(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<String, CliError> {
    let gen = general_for(cfg, spec, chars)?;
    let grid = cfg.grid.points();
    gen.check_grid(&grid)?;
    let mut s = String::new();
    let _ = writeln!(s, "m={}", cfg.general_m);
    let _ = writeln!(s, "eta={}", fmt_real(gen.particular.eta));
    let _ = writeln!(s, "psi_radius={}", fmt_real(gen.psi.radius()));
    for t in grid {
        let _ = writeln!(
            s,
            "t={} upsilon={}",
            fmt_complex(t),
            fmt_complex(gen.eval(t)?)
        );
    }
    Ok(s)
}

fn verify_report(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<Outcome, CliError> {
    let ctx = BacksteppingContext::estimate(spec, 1.0)?;
    let scan = ScanConfig {
        samples: cfg.samples,
        tol: cfg.residual_tol,
        ..ScanConfig::default()
    };
    let mut s = String::new();
    let mut passed = true;
    for m in decaying_roots(chars) {
        let sol = particular_for(cfg, spec, chars, m)?;
        let sector = sol.sector();
        let report = residual_scan(spec, &sol, &sector, &scan);
        let t0 = sector.point_at(C64::new(0.5 * sector.eta, 0.0));
        let oracle = oracle_start(&sol, &ctx, t0)
            .and_then(|t0| iteration_oracle(spec, &sol, &ctx, t0, cfg.depth));
        let report = match oracle {
            Ok(err) => report.with_oracle(err),
            Err(e) => {
                warn!("oracle failed for root {}: {e}", m.number());
                let mut r = report.with_oracle(f64::INFINITY);
                r.notes.push(format!("oracle failed: {e}"));
                r
            }
        };
        passed &= report.passed;
        let _ = writeln!(s, "root={}", m.number());
        s.push_str(&report.to_key_values());
        s.push('\n');
    }
    Ok(Outcome { text: s, passed })
}

/// CSV header of `orbit-csv`.
pub const ORBIT_HEADER: &str = "t_re,t_im,u_re,u_im,residual";

fn orbit_csv(
    cfg: &RunConfig,
    spec: &EquationSpec,
    chars: &CharacteristicData,
) -> Result<String, CliError> {
    let gen = general_for(cfg, spec, chars)?;
    let one = C64::new(1.0, 0.0);
    let grid = cfg.grid.points();
    let probes: Vec<C64> = grid
        .iter()
        .flat_map(|&t| [t, t + one, t + 2.0 * one])
        .collect();
    gen.check_grid(&probes)?;
    let mut s = String::new();
    s.push_str(ORBIT_HEADER);
    s.push('\n');
    for t in grid {
        let u0 = gen.eval(t)?;
        let u1 = gen.eval(t + one)?;
        let u2 = gen.eval(t + 2.0 * one)?;
        let residual = (u2 - spec.f(u0, u1)).norm();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_real(t.re),
            fmt_real(t.im),
            fmt_real(u0.re),
            fmt_real(u0.im),
            fmt_real(residual)
        );
    }
    Ok(s)
}
