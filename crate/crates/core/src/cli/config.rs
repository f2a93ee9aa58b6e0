//! Flat sectioned key-value config.
//!
//! ```text
//! # comment
//! [equation]
//! alpha = -3.5,0
//! beta = 1.5,0
//! b = 0 2 1 0          # i j re im, repeatable
//! [solve]
//! N = 16
//! k_max = 64
//! a1_1 = 1,0
//! a1_2 = 1,0
//! resonance_free = 0,0
//! [psi]
//! M = 16
//! [general]
//! m = 1
//! pi = 1 0.05 0        # j re im, repeatable
//! grid_base = 2,0
//! grid_direction = 1,0
//! grid_count = 10
//! [verify]
//! residual_tol = 1e-8
//! resonance_tol = 1e-9
//! samples = 16
//! depth = 20
//! [output]
//! path = orbit.csv
//! ```
//!
//! Complex numbers are `re,im`. Only `[equation]` is required.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{Poly2, C64};
use crate::equation::{EquationSpec, DEFAULT_K_MAX, DEFAULT_RESONANCE_TOL};
use crate::error::Error;
use crate::particular::DEFAULT_RESIDUAL_TOL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: key `{key}`: {reason}")]
    Parse {
        line: usize,
        key: String,
        reason: String,
    },

    #[error("line {line}: key `{key}`: {source}")]
    Semantic {
        line: usize,
        key: String,
        #[source]
        source: Error,
    },
}

/// One `b = i j re im` entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GTerm {
    pub i: u32,
    pub j: u32,
    pub value: C64,
}

/// Points `base + k direction` for `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridRay {
    pub base: C64,
    pub direction: C64,
    pub count: usize,
}

impl GridRay {
    pub fn points(&self) -> Vec<C64> {
        (0..self.count)
            .map(|k| self.base + self.direction * k as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: C64,
    pub beta: C64,
    pub g_terms: Vec<GTerm>,
    pub order: usize,
    pub k_max: usize,
    /// `a_{m,1}` for roots 1 and 2.
    pub a1: [C64; 2],
    /// Second free coefficient of the `C* = 0` resonant branch.
    pub resonance_free: C64,
    /// Manifold order; the series order when absent.
    pub psi_order: Option<usize>,
    pub general_m: u8,
    pub pi_terms: Vec<(i32, C64)>,
    pub grid: GridRay,
    pub residual_tol: f64,
    pub resonance_tol: f64,
    pub samples: usize,
    pub depth: usize,
    pub output_path: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: C64::new(0.0, 0.0),
            beta: C64::new(0.0, 0.0),
            g_terms: Vec::new(),
            order: 16,
            k_max: DEFAULT_K_MAX,
            a1: [C64::new(1.0, 0.0); 2],
            resonance_free: C64::new(0.0, 0.0),
            psi_order: None,
            general_m: 1,
            pi_terms: Vec::new(),
            grid: GridRay {
                base: C64::new(2.0, 0.0),
                direction: C64::new(1.0, 0.0),
                count: 10,
            },
            residual_tol: DEFAULT_RESIDUAL_TOL,
            resonance_tol: DEFAULT_RESONANCE_TOL,
            samples: 16,
            depth: 20,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn g(&self) -> Result<Poly2, Error> {
        Poly2::from_terms(self.g_terms.iter().map(|t| (t.i, t.j, t.value)))
    }

    pub fn equation(&self) -> Result<EquationSpec, Error> {
        EquationSpec::new(self.alpha, self.beta, self.g()?)
    }

    pub fn psi_order(&self) -> usize {
        self.psi_order.unwrap_or(self.order)
    }

    /// Canonical text form; `parse_config(&cfg.to_text())` returns `cfg`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[equation]");
        let _ = writeln!(s, "alpha = {}", fmt_complex(self.alpha));
        let _ = writeln!(s, "beta = {}", fmt_complex(self.beta));
        for t in &self.g_terms {
            let _ = writeln!(
                s,
                "b = {} {} {} {}",
                t.i,
                t.j,
                fmt_real(t.value.re),
                fmt_real(t.value.im)
            );
        }
        let _ = writeln!(s, "\n[solve]");
        let _ = writeln!(s, "N = {}", self.order);
        let _ = writeln!(s, "k_max = {}", self.k_max);
        let _ = writeln!(s, "a1_1 = {}", fmt_complex(self.a1[0]));
        let _ = writeln!(s, "a1_2 = {}", fmt_complex(self.a1[1]));
        let _ = writeln!(s, "resonance_free = {}", fmt_complex(self.resonance_free));
        if let Some(m) = self.psi_order {
            let _ = writeln!(s, "\n[psi]");
            let _ = writeln!(s, "M = {m}");
        }
        let _ = writeln!(s, "\n[general]");
        let _ = writeln!(s, "m = {}", self.general_m);
        for &(j, c) in &self.pi_terms {
            let _ = writeln!(s, "pi = {} {} {}", j, fmt_real(c.re), fmt_real(c.im));
        }
        let _ = writeln!(s, "grid_base = {}", fmt_complex(self.grid.base));
        let _ = writeln!(s, "grid_direction = {}", fmt_complex(self.grid.direction));
        let _ = writeln!(s, "grid_count = {}", self.grid.count);
        let _ = writeln!(s, "\n[verify]");
        let _ = writeln!(s, "residual_tol = {}", fmt_real(self.residual_tol));
        let _ = writeln!(s, "resonance_tol = {}", fmt_real(self.resonance_tol));
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "depth = {}", self.depth);
        if let Some(path) = &self.output_path {
            let _ = writeln!(s, "\n[output]");
            let _ = writeln!(s, "path = {path}");
        }
        s
    }
}

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_complex(c: C64) -> String {
    format!("{},{}", fmt_real(c.re), fmt_real(c.im))
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Equation,
    Solve,
    Psi,
    General,
    Verify,
    Output,
}

struct Ctx<'a> {
    line: usize,
    key: &'a str,
}

impl Ctx<'_> {
    fn err(&self, reason: impl Into<String>) -> ConfigError {
        ConfigError::Parse {
            line: self.line,
            key: self.key.to_string(),
            reason: reason.into(),
        }
    }

    fn real(&self, text: &str) -> Result<f64, ConfigError> {
        let v: f64 = text
            .trim()
            .parse()
            .map_err(|_| self.err(format!("expected a real number, got `{}`", text.trim())))?;
        if !v.is_finite() {
            return Err(self.err("value must be finite"));
        }
        Ok(v)
    }

    fn complex(&self, text: &str) -> Result<C64, ConfigError> {
        let (re, im) = text.split_once(',').ok_or_else(|| {
            self.err(format!(
                "expected a complex pair `re,im`, got `{}`",
                text.trim()
            ))
        })?;
        Ok(C64::new(self.real(re)?, self.real(im)?))
    }

    fn count(&self, text: &str) -> Result<usize, ConfigError> {
        text.trim().parse().map_err(|_| {
            self.err(format!(
                "expected a nonnegative integer, got `{}`",
                text.trim()
            ))
        })
    }

    fn fields<'t>(
        &self,
        text: &'t str,
        n: usize,
        shape: &str,
    ) -> Result<Vec<&'t str>, ConfigError> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != n {
            return Err(self.err(format!("expected `{shape}`")));
        }
        Ok(parts)
    }
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut section = Section::None;
    let mut seen_alpha = None;
    let mut seen_beta = None;
    let mut first_b_line = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name.trim() {
                "equation" => Section::Equation,
                "solve" => Section::Solve,
                "psi" => Section::Psi,
                "general" => Section::General,
                "verify" => Section::Verify,
                "output" => Section::Output,
                other => {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        key: other.to_string(),
                        reason: "unknown section".into(),
                    })
                }
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: line_no,
            key: line.to_string(),
            reason: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let ctx = Ctx { line: line_no, key };
        match (section, key) {
            (Section::Equation, "alpha") => {
                cfg.alpha = ctx.complex(value)?;
                seen_alpha = Some(line_no);
            }
            (Section::Equation, "beta") => {
                cfg.beta = ctx.complex(value)?;
                seen_beta = Some(line_no);
            }
            (Section::Equation, "b") => {
                let f = ctx.fields(value, 4, "b = i j re im")?;
                let i: u32 = f[0]
                    .parse()
                    .map_err(|_| ctx.err("degree i must be a nonnegative integer"))?;
                let j: u32 = f[1]
                    .parse()
                    .map_err(|_| ctx.err("degree j must be a nonnegative integer"))?;
                if i + j < 2 {
                    return Err(ConfigError::Semantic {
                        line: line_no,
                        key: key.into(),
                        source: Error::BadDegree { i, j },
                    });
                }
                let v = C64::new(ctx.real(f[2])?, ctx.real(f[3])?);
                cfg.g_terms.push(GTerm { i, j, value: v });
                first_b_line.get_or_insert(line_no);
            }
            (Section::Solve, "N") => {
                cfg.order = ctx.count(value)?;
                if cfg.order == 0 {
                    return Err(ctx.err("order must be at least 1"));
                }
            }
            (Section::Solve, "k_max") => {
                cfg.k_max = ctx.count(value)?;
                if cfg.k_max < 2 {
                    return Err(ctx.err("k_max must be at least 2"));
                }
            }
            (Section::Solve, "a1_1") => cfg.a1[0] = nonzero(&ctx, ctx.complex(value)?)?,
            (Section::Solve, "a1_2") => cfg.a1[1] = nonzero(&ctx, ctx.complex(value)?)?,
            (Section::Solve, "resonance_free") => cfg.resonance_free = ctx.complex(value)?,
            (Section::Psi, "M") => {
                let m = ctx.count(value)?;
                if m < 2 {
                    return Err(ctx.err("manifold order must be at least 2"));
                }
                cfg.psi_order = Some(m);
            }
            (Section::General, "m") => {
                cfg.general_m = match value {
                    "1" => 1,
                    "2" => 2,
                    _ => return Err(ctx.err("m must be 1 or 2")),
                }
            }
            (Section::General, "pi") => {
                let f = ctx.fields(value, 3, "pi = j re im")?;
                let j: i32 = f[0]
                    .parse()
                    .map_err(|_| ctx.err("frequency j must be an integer"))?;
                cfg.pi_terms
                    .push((j, C64::new(ctx.real(f[1])?, ctx.real(f[2])?)));
            }
            (Section::General, "grid_base") => cfg.grid.base = ctx.complex(value)?,
            (Section::General, "grid_direction") => cfg.grid.direction = ctx.complex(value)?,
            (Section::General, "grid_count") => {
                cfg.grid.count = ctx.count(value)?;
                if cfg.grid.count == 0 {
                    return Err(ctx.err("grid count must be at least 1"));
                }
            }
            (Section::Verify, "residual_tol") => {
                cfg.residual_tol = positive(&ctx, ctx.real(value)?)?
            }
            (Section::Verify, "resonance_tol") => {
                cfg.resonance_tol = positive(&ctx, ctx.real(value)?)?
            }
            (Section::Verify, "samples") => {
                cfg.samples = ctx.count(value)?;
                if cfg.samples < 8 {
                    return Err(ctx.err("samples must be at least 8"));
                }
            }
            (Section::Verify, "depth") => cfg.depth = ctx.count(value)?,
            (Section::Output, "path") => cfg.output_path = Some(value.to_string()),
            (Section::None, _) => return Err(ctx.err("key outside of any section")),
            _ => return Err(ctx.err("unknown key for this section")),
        }
    }

    let alpha_line = seen_alpha.ok_or_else(|| ConfigError::Parse {
        line: 0,
        key: "alpha".into(),
        reason: "missing required key in [equation]".into(),
    })?;
    let beta_line = seen_beta.ok_or_else(|| ConfigError::Parse {
        line: 0,
        key: "beta".into(),
        reason: "missing required key in [equation]".into(),
    })?;
    if let Err(e) = cfg.equation() {
        let (line, key) = match e {
            Error::BetaZero => (beta_line, "beta"),
            Error::GNontrivial | Error::BadDegree { .. } => {
                (first_b_line.unwrap_or(alpha_line), "b")
            }
            _ => (alpha_line, "alpha"),
        };
        return Err(ConfigError::Semantic {
            line,
            key: key.into(),
            source: e,
        });
    }
    Ok(cfg)
}

fn nonzero(ctx: &Ctx<'_>, c: C64) -> Result<C64, ConfigError> {
    if c == C64::new(0.0, 0.0) {
        Err(ctx.err("coefficient must be nonzero"))
    } else {
        Ok(c)
    }
}

fn positive(ctx: &Ctx<'_>, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ctx.err("tolerance must be positive"))
    }
}
