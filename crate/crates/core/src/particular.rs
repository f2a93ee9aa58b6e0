//! Particular solutions `u_m(t) = sum a_{m,n} lambda_m^{n t}`.
//!
//! Coefficients come from substituting the truncated series into the
//! equation and matching powers of `z = lambda^t`. At order `k` this gives
//!
//! ```text
//! a_k D(lambda^k) = [z^k] g(U(z), U(lambda z)),   U = sum_{n<k} a_n z^n
//! ```
//!
//! Resonant roots (`lambda_m^k` equal to the other root) are handled by
//! [`solve_resonant`], which evaluates the numerator constant `C*` and picks
//! the two-parameter branch (`C* = 0`) or the stride-`k` branch (`C* != 0`).

use log::warn;

use crate::algebra::{eval_poly2_on_series, Series1, C64, ZERO};
use crate::equation::{int_power, CharacteristicData, EquationSpec, RootIndex, UNIT_CIRCLE_TOL};
use crate::error::{Error, Result};
use crate::verify::ring_residual;

/// Relative threshold (scaled by `max(1, |beta|)`) for `|D(lambda^k)|`.
pub const SMALL_DIVISOR_TOL: f64 = 1e-9;
/// Default residual tolerance used when validating a radius.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
/// Angles per ring in the radius validation.
const RADIUS_SAMPLES: usize = 16;
const MAX_HALVINGS: usize = 64;

/// Numerator `[z^k] g(U(z), U(lambda z))` built from the known coefficients
/// `a_1..a_{k-1}` of `known`.
pub fn recurrence_numerator(spec: &EquationSpec, lambda: C64, known: &Series1, k: usize) -> C64 {
    let u = known.with_order(k - 1).with_order(k);
    let v = u.dilate(lambda);
    eval_poly2_on_series(&spec.g, &u, &v, k).coeff(k)
}

fn small_divisor_threshold(spec: &EquationSpec) -> f64 {
    SMALL_DIVISOR_TOL * spec.divisor_scale()
}

fn check_root(spec: &EquationSpec, lambda: C64) -> Result<()> {
    let residual = spec.char_poly(lambda).norm();
    let scale = spec.divisor_scale().max(lambda.norm_sqr());
    if residual > SMALL_DIVISOR_TOL * scale {
        return Err(Error::NotCharacteristicRoot { residual });
    }
    Ok(())
}

/// Runs the order-by-order recurrence. `rule(k, numerator, divisor)` returns
/// `a_k`; order 1 is passed a zero numerator and `D(lambda)`.
fn run_recurrence<F>(spec: &EquationSpec, lambda: C64, order: usize, mut rule: F) -> Result<Series1>
where
    F: FnMut(usize, C64, C64) -> Result<C64>,
{
    let mut coeffs = Series1::zero(order);
    let mut lambda_k = C64::new(1.0, 0.0);
    for k in 1..=order {
        lambda_k *= lambda;
        let numerator = if k == 1 {
            ZERO
        } else {
            recurrence_numerator(spec, lambda, &coeffs, k)
        };
        let a_k = rule(k, numerator, spec.char_poly(lambda_k))?;
        coeffs.set_coeff(k, a_k);
    }
    Ok(coeffs)
}

fn divide(k: usize, numerator: C64, divisor: C64, threshold: f64) -> Result<C64> {
    if divisor.norm() < threshold {
        return Err(Error::SmallDivisor {
            order: k,
            divisor: divisor.norm(),
        });
    }
    Ok(numerator / divisor)
}

/// Coefficients `a_1..a_N` of the non-resonant series for root `lambda`.
pub fn solve_coefficients(
    spec: &EquationSpec,
    lambda: C64,
    a1: C64,
    order: usize,
) -> Result<Series1> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "truncation order must be at least 1".into(),
        ));
    }
    if a1 == ZERO {
        return Err(Error::InvalidArgument("a1 must be nonzero".into()));
    }
    check_root(spec, lambda)?;
    let threshold = small_divisor_threshold(spec);
    run_recurrence(spec, lambda, order, |k, num, d| {
        if k == 1 {
            Ok(a1)
        } else {
            divide(k, num, d, threshold)
        }
    })
}

/// Coefficients of `sum a_n (lambda^n)^2 z^n + alpha sum a_n lambda^n z^n
/// + beta sum a_n z^n - g(U(z), U(lambda z))` through the series order.
/// Vanishes through order `N` for a correctly solved series.
pub fn substitution_residual(spec: &EquationSpec, lambda: C64, coeffs: &Series1) -> Series1 {
    let order = coeffs.order();
    let shifted1 = coeffs.dilate(lambda);
    let shifted2 = shifted1.dilate(lambda);
    let linear = shifted2
        .add(&shifted1.scale(spec.alpha))
        .add(&coeffs.scale(spec.beta));
    let nonlinear = eval_poly2_on_series(&spec.g, coeffs, &shifted1, order);
    linear.sub(&nonlinear)
}

/// How the coefficients of a particular solution were determined.
#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    /// No resonance up to the truncation order.
    Regular,
    /// `C* = 0`: both `a_1` and `a_k` are free.
    ResonantFree { k: usize, c_star: C64 },
    /// `C* != 0`: `a_1 = 0` and only multiples of `k` survive.
    ResonantStride { k: usize, c_star: C64 },
}

/// `{t : |lambda^t| <= eta}` with `lambda^t = exp(rate t)`.
///
/// `rate` is `stride * Log(lambda)` on the principal branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSector {
    pub rate: C64,
    pub eta: f64,
}

impl DomainSector {
    pub fn new(lambda: C64, eta: f64) -> Self {
        DomainSector::with_stride(lambda, 1, eta)
    }

    pub fn with_stride(lambda: C64, stride: usize, eta: f64) -> Self {
        DomainSector {
            rate: lambda.ln() * stride as f64,
            eta,
        }
    }

    /// `exp(rate t)`.
    pub fn variable(&self, t: C64) -> C64 {
        (self.rate * t).exp()
    }

    pub fn contains(&self, t: C64) -> bool {
        self.variable(t).norm() <= self.eta * (1.0 + 1e-12)
    }

    /// Multiplier of the variable under `t -> t + 1`.
    pub fn multiplier(&self) -> C64 {
        self.rate.exp()
    }

    /// True when the variable shrinks under forward shifts.
    pub fn decays_forward(&self) -> bool {
        self.rate.re < 0.0
    }

    /// A `t` with `variable(t) = z` (principal logarithm of `z`).
    pub fn point_at(&self, z: C64) -> C64 {
        z.ln() / self.rate
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        DomainSector {
            rate: self.rate,
            eta,
        }
    }
}

/// Outcome of [`estimate_radius`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub eta: f64,
    /// Root-test radius before the residual validation.
    pub root_test_radius: f64,
    /// Residual at the accepted ring.
    pub residual: f64,
    /// Set when the series looks divergent or the residual never passed.
    pub warning: bool,
}

/// `1 / max |a_n|^{1/n}` over the upper half of the computed orders.
/// Infinite when those coefficients all vanish.
pub fn root_test_radius(coeffs: &Series1) -> f64 {
    let n = coeffs.order();
    let start = (n / 2).max(1);
    let limsup = (start..=n)
        .map(|k| coeffs.coeff(k).norm())
        .enumerate()
        .filter(|&(_, a)| a > 0.0)
        .map(|(idx, a)| a.powf(1.0 / (start + idx) as f64))
        .fold(0.0, f64::max);
    if limsup == 0.0 {
        f64::INFINITY
    } else {
        1.0 / limsup
    }
}

/// Validated radius for a series in a variable with per-step `multiplier`.
///
/// Starts from half the root-test radius (capped at 1/2) and halves until
/// the equation residual on the ring `|z| = eta` is at most `tol`.
pub fn estimate_radius(
    coeffs: &Series1,
    multiplier: C64,
    spec: &EquationSpec,
    tol: f64,
) -> Result<RadiusEstimate> {
    let tail_zero = (2..=coeffs.order()).all(|k| coeffs.coeff(k) == ZERO);
    if tail_zero && coeffs.order() >= 2 {
        let residual = substitution_residual(spec, multiplier, coeffs).max_abs();
        if residual > 1e-10 {
            return Err(Error::DegenerateSeries { residual });
        }
    }
    let root_test = root_test_radius(coeffs);
    let mut eta = 0.5 * root_test.min(1.0);
    let mut warning = root_test < 1e-3;
    let eval = |z: C64| coeffs.eval(z);
    let mut residual = ring_residual(spec, &eval, multiplier, eta, RADIUS_SAMPLES);
    let mut halvings = 0;
    // NaN counts as a failure.
    while residual.is_nan() || residual > tol {
        if halvings == MAX_HALVINGS {
            warning = true;
            break;
        }
        eta *= 0.5;
        halvings += 1;
        residual = ring_residual(spec, &eval, multiplier, eta, RADIUS_SAMPLES);
    }
    // The ring residual contradicted the root test by more than 2^8.
    if halvings > 8 {
        warning = true;
    }
    if warning {
        warn!("radius estimate {eta:e} is not reliable (root test radius {root_test:e})");
    }
    Ok(RadiusEstimate {
        eta,
        root_test_radius: root_test,
        residual,
        warning,
    })
}

/// A truncated particular solution together with its validated sector.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticularSolution {
    pub m: RootIndex,
    pub lambda: C64,
    /// Coefficients in the variable `lambda^{stride t}`.
    pub coeffs: Series1,
    pub stride: usize,
    pub eta: f64,
    pub branch: Branch,
}

impl ParticularSolution {
    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    pub fn sector(&self) -> DomainSector {
        DomainSector::with_stride(self.lambda, self.stride, self.eta)
    }

    /// `lambda^stride`, the per-step multiplier of the series variable.
    pub fn multiplier(&self) -> C64 {
        int_power(self.lambda, self.stride)
    }

    /// Evaluates the series at a value of its variable.
    pub fn eval_variable(&self, z: C64) -> Result<C64> {
        let modulus = z.norm();
        if modulus > self.eta * (1.0 + 1e-12) {
            return Err(Error::OutsideDomain {
                modulus,
                radius: self.eta,
            });
        }
        Ok(self.coeffs.eval(z))
    }

    /// `u(t)`; fails outside `S(eta)`.
    pub fn eval(&self, t: C64) -> Result<C64> {
        self.eval_variable(self.sector().variable(t))
    }

    /// Coefficients re-expressed in `lambda^t` (stride expanded).
    pub fn expanded_coeffs(&self) -> Series1 {
        let mut out = Series1::zero(self.order() * self.stride);
        for n in 1..=self.order() {
            out.set_coeff(n * self.stride, self.coeffs.coeff(n));
        }
        out
    }

    /// Same coefficients with a different validated radius.
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }
}

/// Options shared by the particular solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub order: usize,
    pub a1: C64,
    pub residual_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            order: 16,
            a1: C64::new(1.0, 0.0),
            residual_tol: DEFAULT_RESIDUAL_TOL,
        }
    }
}

fn check_decaying_root(lambda: C64) -> Result<()> {
    if (lambda.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL {
        return Err(Error::InvalidArgument(format!(
            "root {lambda} lies on the unit circle; no decaying series"
        )));
    }
    Ok(())
}

/// Non-resonant particular solution for root `m`.
pub fn solve_particular(
    spec: &EquationSpec,
    chars: &CharacteristicData,
    m: RootIndex,
    opts: &SolveOptions,
) -> Result<ParticularSolution> {
    let lambda = chars.lambda(m);
    check_decaying_root(lambda)?;
    let coeffs = solve_coefficients(spec, lambda, opts.a1, opts.order)?;
    let radius = estimate_radius(&coeffs, lambda, spec, opts.residual_tol)?;
    Ok(ParticularSolution {
        m,
        lambda,
        coeffs,
        stride: 1,
        eta: radius.eta,
        branch: Branch::Regular,
    })
}

/// Numerator constant `C*_{m,k}` and the divisor `|D(lambda_m^k)|`.
///
/// `C*` is the order-`k` numerator of the recurrence run with `a_1 = 1`.
pub fn resonance_constant(
    spec: &EquationSpec,
    chars: &CharacteristicData,
    m: RootIndex,
    k: usize,
) -> Result<(C64, f64)> {
    if k < 2 {
        return Err(Error::InvalidArgument(
            "resonance order must be at least 2".into(),
        ));
    }
    let lambda = chars.lambda(m);
    let lower = solve_coefficients(spec, lambda, C64::new(1.0, 0.0), k - 1)?;
    let c_star = recurrence_numerator(spec, lambda, &lower, k);
    let divisor = spec.char_poly(int_power(lambda, k)).norm();
    Ok((c_star, divisor))
}

/// Classification of a resonance by its numerator constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResonanceBranch {
    /// `C* = 0`.
    Free,
    /// `C* != 0`.
    Stride,
}

/// Absolute threshold under which `C*` counts as zero.
pub fn c_star_threshold(spec: &EquationSpec) -> f64 {
    let scale = spec.g.terms().map(|(_, _, c)| c.norm()).fold(1.0, f64::max);
    SMALL_DIVISOR_TOL * scale
}

/// Decides the branch for resonance `(m, k)`.
pub fn classify_resonance(
    spec: &EquationSpec,
    chars: &CharacteristicData,
    m: RootIndex,
    k: usize,
) -> Result<(ResonanceBranch, C64)> {
    let (c_star, divisor) = resonance_constant(spec, chars, m, k)?;
    if divisor >= small_divisor_threshold(spec) {
        return Err(Error::NotResonant { order: k, divisor });
    }
    let tol = c_star_threshold(spec);
    let size = c_star.norm();
    if size <= tol {
        Ok((ResonanceBranch::Free, c_star))
    } else if size <= 100.0 * tol {
        Err(Error::AmbiguousBranch { c_star: size })
    } else {
        Ok((ResonanceBranch::Stride, c_star))
    }
}

/// Particular solution for a resonant root `lambda_m^k = lambda_other`.
///
/// With `C* = 0` the series has two free coefficients, `a_1 = a_free` and
/// `a_k = a_second`. With `C* != 0`, `a_1` is forced to zero, `a_k = a_free`
/// and the returned series is stored in the variable `lambda_m^{k t}`.
pub fn solve_resonant(
    spec: &EquationSpec,
    chars: &CharacteristicData,
    m: RootIndex,
    k: usize,
    a_free: C64,
    a_second: C64,
    opts: &SolveOptions,
) -> Result<ParticularSolution> {
    if a_free == ZERO {
        return Err(Error::InvalidArgument(
            "free coefficient must be nonzero".into(),
        ));
    }
    let lambda = chars.lambda(m);
    check_decaying_root(lambda)?;
    let (branch, c_star) = classify_resonance(spec, chars, m, k)?;
    let threshold = small_divisor_threshold(spec);
    match branch {
        ResonanceBranch::Free => {
            let coeffs = run_recurrence(spec, lambda, opts.order, |j, num, d| match j {
                1 => Ok(a_free),
                j if j == k => Ok(a_second),
                j => divide(j, num, d, threshold),
            })?;
            let radius = estimate_radius(&coeffs, lambda, spec, opts.residual_tol)?;
            Ok(ParticularSolution {
                m,
                lambda,
                coeffs,
                stride: 1,
                eta: radius.eta,
                branch: Branch::ResonantFree { k, c_star },
            })
        }
        ResonanceBranch::Stride => {
            // Run the recurrence in lambda^t with a_1 = 0; every order that is
            // not a multiple of k has a vanishing numerator.
            let full = run_recurrence(spec, lambda, opts.order * k, |j, num, d| {
                if j == k {
                    Ok(a_free)
                } else if j == 1 {
                    Ok(ZERO)
                } else {
                    divide(j, num, d, threshold)
                }
            })?;
            let scale = full.max_abs().max(1.0);
            if let Some(j) = (1..=full.order())
                .filter(|j| j % k != 0)
                .find(|&j| full.coeff(j).norm() > 1e-12 * scale)
            {
                return Err(Error::InvalidArgument(format!(
                    "stride series has a nonzero coefficient at order {j}"
                )));
            }
            let coeffs =
                Series1::from_coeffs((1..=opts.order).map(|n| full.coeff(n * k)).collect());
            let multiplier = int_power(lambda, k);
            let radius = estimate_radius(&coeffs, multiplier, spec, opts.residual_tol)?;
            Ok(ParticularSolution {
                m,
                lambda,
                coeffs,
                stride: k,
                eta: radius.eta,
                branch: Branch::ResonantStride { k, c_star },
            })
        }
    }
}
