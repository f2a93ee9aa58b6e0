//! Independent numerical checks of computed solutions.
//!
//! Nothing here reads series coefficients: the oracles only call the
//! solution as a black-box function of `t` and the exact right-hand side
//! `f` of the equation. Agreement is therefore evidence rather than a
//! restatement of the solver.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use log::warn;

use crate::algebra::C64;
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::particular::{DomainSector, ParticularSolution};

/// Slope tolerance relative to the expected decay order.
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Minimum number of rings needed for a slope fit.
pub const MIN_SLOPE_RINGS: usize = 4;

/// A solution that can be evaluated at complex `t`.
pub trait SolutionEvaluator {
    fn eval(&self, t: C64) -> Result<C64>;

    /// Sector on which the evaluator is meant to be used.
    fn sector(&self) -> DomainSector;

    /// Order of the leading neglected term.
    fn truncation_order(&self) -> usize;
}

impl SolutionEvaluator for ParticularSolution {
    fn eval(&self, t: C64) -> Result<C64> {
        ParticularSolution::eval(self, t)
    }

    fn sector(&self) -> DomainSector {
        ParticularSolution::sector(self)
    }

    fn truncation_order(&self) -> usize {
        self.order()
    }
}

/// Adapts a closure to [`SolutionEvaluator`].
pub struct FnEvaluator<F> {
    pub func: F,
    pub sector: DomainSector,
    pub order: usize,
}

impl<F> SolutionEvaluator for FnEvaluator<F>
where
    F: Fn(C64) -> Result<C64>,
{
    fn eval(&self, t: C64) -> Result<C64> {
        (self.func)(t)
    }

    fn sector(&self) -> DomainSector {
        self.sector
    }

    fn truncation_order(&self) -> usize {
        self.order
    }
}

/// Maximum of `|U(z2) - f(U(z0), U(z1))|` over `samples` points of the ring
/// `|z| = radius`, where `(z0, z1, z2)` are consecutive steps of the series
/// variable and the outermost of the three lies on the ring.
pub fn ring_residual(
    spec: &EquationSpec,
    eval: &dyn Fn(C64) -> C64,
    multiplier: C64,
    radius: f64,
    samples: usize,
) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..samples {
        let theta = 2.0 * PI * (j as f64 + 0.5) / samples as f64;
        let z = C64::from_polar(radius, theta);
        let (z0, z1, z2) = if multiplier.norm() < 1.0 {
            (z, z * multiplier, z * multiplier * multiplier)
        } else {
            (z / (multiplier * multiplier), z / multiplier, z)
        };
        let r = (eval(z2) - spec.f(eval(z0), eval(z1))).norm();
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
        if worst.is_nan() {
            break;
        }
    }
    worst
}

/// Size of the implicit-function box and the associated constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BacksteppingContext {
    pub rho: f64,
    /// Empirical bound `|s| <= K (|w| + |z|)`.
    pub k_const: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl BacksteppingContext {
    pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_ITER: usize = 50;

    /// Context with a given box and no bound check.
    pub fn with_rho(rho: f64) -> Self {
        BacksteppingContext {
            rho,
            k_const: f64::INFINITY,
            newton_tol: Self::DEFAULT_NEWTON_TOL,
            newton_max_iter: Self::DEFAULT_MAX_ITER,
        }
    }

    /// Largest box `rho = 2^-j` (starting at `rho_max`) on which Newton from
    /// the linear guess converges on a probe grid; `K` is the largest ratio
    /// `|s| / (|w| + |z|)` seen on that grid.
    pub fn estimate(spec: &EquationSpec, rho_max: f64) -> Result<Self> {
        let mut rho = rho_max;
        for _ in 0..40 {
            let probe = BacksteppingContext::with_rho(rho);
            if let Some(k_const) = probe_grid(spec, &probe) {
                return Ok(BacksteppingContext { k_const, ..probe });
            }
            rho *= 0.5;
        }
        Err(Error::NewtonDiverged {
            iterations: Self::DEFAULT_MAX_ITER,
            residual: f64::NAN,
        })
    }
}

fn probe_points(rho: f64) -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for radius in [rho, 0.5 * rho] {
        for j in 0..8 {
            pts.push(C64::from_polar(radius, 2.0 * PI * j as f64 / 8.0));
        }
    }
    pts
}

fn probe_grid(spec: &EquationSpec, ctx: &BacksteppingContext) -> Option<f64> {
    let pts = probe_points(ctx.rho);
    let mut k_const: f64 = 0.0;
    for &w in &pts {
        for &z in &pts {
            let s = newton_backstep(spec, ctx, w, z).ok()?;
            let denom = w.norm() + z.norm();
            if denom > 0.0 {
                k_const = k_const.max(s.norm() / denom);
            }
        }
    }
    // The implicit function theorem needs |df/ds| >= |beta| / 2 on the whole
    // box |s| <= 2 K rho, |w| <= rho; bound |g_x| there by its coefficients.
    let sigma = 2.0 * k_const * ctx.rho;
    let gx_bound: f64 = spec
        .g
        .terms()
        .filter(|&(i, _, _)| i > 0)
        .map(|(i, j, c)| c.norm() * i as f64 * sigma.powi(i as i32 - 1) * ctx.rho.powi(j as i32))
        .sum();
    if gx_bound > 0.5 * spec.beta.norm() {
        return None;
    }
    Some(k_const)
}

fn newton_backstep(spec: &EquationSpec, ctx: &BacksteppingContext, w: C64, z: C64) -> Result<C64> {
    let residual = |s: C64| spec.f(s, w) - z;
    let mut s = (-z - spec.alpha * w) / spec.beta;
    let mut r = residual(s);
    for iter in 0..=ctx.newton_max_iter {
        let scale = z.norm() + (spec.alpha * w).norm() + (spec.beta * s).norm();
        if r.norm() <= ctx.newton_tol * scale.min(1.0) {
            return Ok(s);
        }
        if iter == ctx.newton_max_iter {
            break;
        }
        let slope = -spec.beta + spec.g.eval_dx(s, w);
        let step = r / slope;
        let mut damping = 1.0;
        let mut candidate = s - step;
        let mut r_candidate = residual(candidate);
        let improves = |a: f64, b: f64| a.partial_cmp(&b) == Some(Ordering::Less);
        while !improves(r_candidate.norm(), r.norm()) && damping > 1e-6 {
            damping *= 0.5;
            candidate = s - step * damping;
            r_candidate = residual(candidate);
        }
        if !improves(r_candidate.norm(), r.norm()) {
            // Stalled at the rounding floor.
            let floor = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
            if r.norm() <= floor {
                return Ok(s);
            }
            break;
        }
        s = candidate;
        r = r_candidate;
    }
    Err(Error::NewtonDiverged {
        iterations: ctx.newton_max_iter,
        residual: r.norm(),
    })
}

/// Solves `z = f(s, w)` for `s` near the equilibrium.
pub fn implicit_backstep(
    spec: &EquationSpec,
    ctx: &BacksteppingContext,
    w: C64,
    z: C64,
) -> Result<C64> {
    if w.norm() > ctx.rho || z.norm() > ctx.rho {
        return Err(Error::OutsideBox {
            w_abs: w.norm(),
            z_abs: z.norm(),
            rho: ctx.rho,
        });
    }
    let s = newton_backstep(spec, ctx, w, z)?;
    let bound = ctx.k_const * (w.norm() + z.norm());
    if s.norm() > bound * (1.0 + 1e-9) {
        warn!(
            "backstep |s| = {:e} exceeds K(|w|+|z|) = {bound:e}",
            s.norm()
        );
    }
    Ok(s)
}

/// Rebuilds the solution from two seeds at the deep end of its decay
/// direction using only the equation, and returns the largest deviation
/// from the evaluator along the trajectory `t0 ..= t0 + depth` (forward
/// decay, stepped backward with [`implicit_backstep`]) or
/// `t0 - depth ..= t0` (backward decay, stepped forward with `f`).
pub fn iteration_oracle<E: SolutionEvaluator + ?Sized>(
    spec: &EquationSpec,
    evaluator: &E,
    ctx: &BacksteppingContext,
    t0: C64,
    depth: usize,
) -> Result<f64> {
    let one = C64::new(1.0, 0.0);
    let mut max_err: f64 = 0.0;
    if evaluator.sector().decays_forward() {
        let at = |j: usize| t0 + one * j as f64;
        let mut next2 = evaluator.eval(at(depth + 1))?;
        let mut next1 = evaluator.eval(at(depth))?;
        for j in (0..depth).rev() {
            let s = implicit_backstep(spec, ctx, next1, next2)?;
            max_err = max_err.max((s - evaluator.eval(at(j))?).norm());
            next2 = next1;
            next1 = s;
        }
    } else {
        let start = t0 - one * depth as f64;
        let at = |j: usize| start + one * j as f64;
        let mut prev0 = evaluator.eval(at(0))?;
        let mut prev1 = evaluator.eval(at(1))?;
        for j in 2..=depth {
            let u = spec.f(prev0, prev1);
            max_err = max_err.max((u - evaluator.eval(at(j))?).norm());
            prev0 = prev1;
            prev1 = u;
        }
    }
    Ok(max_err)
}

/// Moves `t` along the decay direction until the oracle trajectory starting
/// there stays inside the backstepping box. Backward-decaying solutions are
/// iterated forward and need no box, so `t` is returned unchanged for them.
pub fn oracle_start<E: SolutionEvaluator + ?Sized>(
    evaluator: &E,
    ctx: &BacksteppingContext,
    t: C64,
) -> Result<C64> {
    if !evaluator.sector().decays_forward() {
        return Ok(t);
    }
    let one = C64::new(1.0, 0.0);
    let mut t = t;
    for _ in 0..200 {
        if evaluator.eval(t)?.norm() <= ctx.rho && evaluator.eval(t + one)?.norm() <= ctx.rho {
            return Ok(t);
        }
        t += one;
    }
    Err(Error::OutsideBox {
        w_abs: evaluator.eval(t)?.norm(),
        z_abs: evaluator.eval(t + one)?.norm(),
        rho: ctx.rho,
    })
}

/// Sampling layout for [`residual_scan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    /// Angles per ring.
    pub samples: usize,
    pub rings: usize,
    /// Ratio between successive ring radii, starting at the sector radius.
    pub ring_ratio: f64,
    /// Half-width of the sampled argument range of the sector variable.
    pub arg_span: f64,
    pub tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            samples: 16,
            rings: 6,
            ring_ratio: 0.8,
            arg_span: PI,
            tol: 1e-8,
        }
    }
}

/// Outcome of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub max_residual: f64,
    pub grid: String,
    pub oracle_max_error: Option<f64>,
    /// Least-squares slope of log residual against log ring radius.
    pub bound_slope: Option<f64>,
    pub expected_order: usize,
    pub tolerance: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn recompute_passed(&mut self) {
        let residual_ok = self.max_residual <= self.tolerance;
        let oracle_ok = self.oracle_max_error.is_none_or(|e| e <= self.tolerance);
        let slope_ok = self
            .bound_slope
            .is_none_or(|s| s >= (self.expected_order as f64 + 1.0) * (1.0 - SLOPE_TOLERANCE));
        self.passed = residual_ok && oracle_ok && slope_ok;
    }

    /// Records an oracle error and updates `passed`.
    pub fn with_oracle(mut self, error: f64) -> Self {
        self.oracle_max_error = Some(error);
        self.recompute_passed();
        self
    }

    /// `key=value` lines with 17 significant digits.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.16e}"));
        let _ = writeln!(out, "max_residual={:.16e}", self.max_residual);
        let _ = writeln!(out, "grid={}", self.grid);
        let _ = writeln!(out, "oracle_max_error={}", opt(self.oracle_max_error));
        let _ = writeln!(out, "bound_slope={}", opt(self.bound_slope));
        let _ = writeln!(out, "expected_order={}", self.expected_order);
        let _ = writeln!(out, "tolerance={:.16e}", self.tolerance);
        let _ = writeln!(out, "passed={}", self.passed);
        let _ = writeln!(out, "notes={}", self.notes.join("; "));
        out
    }
}

/// Least-squares slope of `ys` against `xs`.
fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Evaluates `|u(t+2) - f(u(t), u(t+1))|` on log-spaced rings of the sector
/// variable and fits the decay exponent of the residual.
///
/// Rings whose residual sits at the rounding floor are left out of the fit;
/// with fewer than [`MIN_SLOPE_RINGS`] usable rings the slope is skipped.
pub fn residual_scan<E: SolutionEvaluator + ?Sized>(
    spec: &EquationSpec,
    evaluator: &E,
    sector: &DomainSector,
    config: &ScanConfig,
) -> VerificationReport {
    let one = C64::new(1.0, 0.0);
    let mut notes = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut fit_x = Vec::new();
    let mut fit_y = Vec::new();
    let samples = config.samples.max(1);
    let forward = sector.decays_forward();

    'rings: for ring in 0..config.rings {
        let radius = sector.eta * config.ring_ratio.powi(ring as i32);
        let mut ring_max: f64 = 0.0;
        let mut ring_floor: f64 = 0.0;
        for j in 0..samples {
            let theta = if config.arg_span >= PI {
                2.0 * PI * (j as f64 + 0.5) / samples as f64 - PI
            } else if samples == 1 {
                0.0
            } else {
                -config.arg_span + 2.0 * config.arg_span * j as f64 / (samples - 1) as f64
            };
            let outer = sector.point_at(C64::from_polar(radius, theta));
            let t = if forward { outer } else { outer - 2.0 * one };
            let values = (|| -> Result<(C64, C64, C64)> {
                Ok((
                    evaluator.eval(t)?,
                    evaluator.eval(t + one)?,
                    evaluator.eval(t + 2.0 * one)?,
                ))
            })();
            let (u0, u1, u2) = match values {
                Ok(v) => v,
                Err(e) => {
                    notes.push(format!("evaluation failed at t = {t}: {e}"));
                    max_residual = f64::INFINITY;
                    break 'rings;
                }
            };
            let g_val = spec.g.eval(u0, u1);
            let r = (u2 - (-spec.beta * u0 - spec.alpha * u1 + g_val)).norm();
            let scale =
                u2.norm() + (spec.beta * u0).norm() + (spec.alpha * u1).norm() + g_val.norm();
            ring_floor = ring_floor.max(1e3 * f64::EPSILON * scale);
            ring_max = ring_max.max(r);
        }
        max_residual = max_residual.max(ring_max);
        if ring_max > ring_floor && ring_max > 0.0 {
            fit_x.push(radius.ln());
            fit_y.push(ring_max.ln());
        }
    }

    let bound_slope = if fit_x.len() >= MIN_SLOPE_RINGS {
        Some(fit_slope(&fit_x, &fit_y))
    } else {
        notes.push(format!(
            "slope fit skipped: {} ring(s) above the rounding floor",
            fit_x.len()
        ));
        None
    };
    let mut report = VerificationReport {
        max_residual,
        grid: format!(
            "rings={} ratio={} samples={} arg_span={:.6} eta={:.6e}",
            config.rings, config.ring_ratio, samples, config.arg_span, sector.eta
        ),
        oracle_max_error: None,
        bound_slope,
        expected_order: evaluator.truncation_order(),
        tolerance: config.tol,
        passed: false,
        notes,
    };
    report.recompute_passed();
    report
}
