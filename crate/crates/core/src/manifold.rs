//! Diagonalized pair form of the equation and its invariant manifold.
//!
//! With `w = u(t+1)` the equation becomes a planar map. The linear change of
//! variables `u = x + y`, `w = lam_x x + lam_y y` diagonalizes its linear
//! part:
//!
//! ```text
//! x' = lam_x x + c(x, y)        y' = lam_y y + d(x, y)
//! ```
//!
//! `Transform::P` takes `(lam_x, lam_y) = (lambda1, lambda2)` and
//! `Transform::Q` the reverse. The manifold `y = Psi(x) = sum_{n>=2} gamma_n x^n`
//! solves `Psi(X(x, Psi(x))) = Y(x, Psi(x))`.

use log::warn;

use crate::algebra::{compose1, eval_poly2_on_series, Poly2, Series1, C64, ONE};
use crate::equation::{int_power, CharacteristicData, EquationSpec, RootIndex};
use crate::error::{Error, Result};
use crate::particular::root_test_radius;

/// Relative threshold for `|lam_x^n - lam_y|`.
pub const MANIFOLD_RESONANCE_TOL: f64 = 1e-9;
/// Divisors below this (relative) are kept but flagged.
pub const MANIFOLD_NEAR_RESONANCE: f64 = 1e-3;
/// Relative tolerance for treating the roots as repeated.
pub const REPEATED_ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// `(u, w) = P (x, y)`, `P = [[1, 1], [lambda1, lambda2]]`.
    P,
    /// `(u, w) = Q (x, y)`, `Q = [[1, 1], [lambda2, lambda1]]`.
    Q,
}

impl Transform {
    /// Transform whose `x` direction carries `lambda_m`.
    pub fn for_root(m: RootIndex) -> Self {
        match m {
            RootIndex::First => Transform::P,
            RootIndex::Second => Transform::Q,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSystem {
    pub which: Transform,
    pub lam_x: C64,
    pub lam_y: C64,
    pub c: Poly2,
    pub d: Poly2,
    pub max_degree: u32,
}

impl DiagonalSystem {
    /// `X(x, y)`.
    pub fn x_map(&self, x: C64, y: C64) -> C64 {
        self.lam_x * x + self.c.eval(x, y)
    }

    /// `Y(x, y)`.
    pub fn y_map(&self, x: C64, y: C64) -> C64 {
        self.lam_y * y + self.d.eval(x, y)
    }

    /// `(u, w)` from `(x, y)`.
    pub fn to_original(&self, x: C64, y: C64) -> (C64, C64) {
        (x + y, self.lam_x * x + self.lam_y * y)
    }

    /// `(x, y)` from `(u, w)`.
    pub fn from_original(&self, u: C64, w: C64) -> (C64, C64) {
        let det = self.lam_y - self.lam_x;
        ((self.lam_y * u - w) / det, (w - self.lam_x * u) / det)
    }
}

/// Diagonalizes the pair form for a given nonlinearity. `g` may be zero.
pub fn diagonalize_poly(
    g: &Poly2,
    lam_x: C64,
    lam_y: C64,
    which: Transform,
    max_degree: u32,
) -> Result<DiagonalSystem> {
    let gap = lam_y - lam_x;
    if gap.norm() <= REPEATED_ROOT_TOL * lam_x.norm().max(lam_y.norm()).max(1.0) {
        return Err(Error::RepeatedRoot);
    }
    // G(x, y) = g(x + y, lam_x x + lam_y y); P^{-1} (0, G) = (-G, G) / (lam_y - lam_x).
    let transformed = g.linear_substitute(ONE, ONE, lam_x, lam_y, max_degree);
    Ok(DiagonalSystem {
        which,
        lam_x,
        lam_y,
        c: transformed.scale(-ONE / gap),
        d: transformed.scale(ONE / gap),
        max_degree,
    })
}

pub fn diagonalize(
    spec: &EquationSpec,
    chars: &CharacteristicData,
    which: Transform,
    max_degree: u32,
) -> Result<DiagonalSystem> {
    let (lam_x, lam_y) = match which {
        Transform::P => (chars.lambda1, chars.lambda2),
        Transform::Q => (chars.lambda2, chars.lambda1),
    };
    diagonalize_poly(&spec.g, lam_x, lam_y, which, max_degree)
}

/// Coefficients of `Psi(X(x, Psi(x))) - Y(x, Psi(x))` through `order`.
pub fn functional_residual(sys: &DiagonalSystem, psi: &Series1, order: usize) -> Series1 {
    let x = Series1::monomial(1, ONE, order);
    let psi = psi.with_order(order);
    let x_part = x
        .scale(sys.lam_x)
        .add(&eval_poly2_on_series(&sys.c, &x, &psi, order));
    let y_part = psi
        .scale(sys.lam_y)
        .add(&eval_poly2_on_series(&sys.d, &x, &psi, order));
    compose1(&psi, &x_part, order).sub(&y_part)
}

/// Order at which the manifold series is poorly conditioned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditioningWarning {
    pub order: usize,
    pub divisor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSeries {
    /// `gamma_n` at index `n`; the linear coefficient is always zero.
    pub gammas: Series1,
    pub system: DiagonalSystem,
    pub warnings: Vec<ConditioningWarning>,
}

/// How [`solve_psi_with`] obtains the residual at each order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiMethod {
    /// One composition truncated at `n` per order `n`.
    OrderByOrder,
    /// Repeated full-order compositions with a diagonal update of every
    /// coefficient; exact through order `s + 1` after sweep `s`.
    Sweeps,
}

fn divisors(sys: &DiagonalSystem, order: usize) -> Result<(Vec<C64>, Vec<ConditioningWarning>)> {
    let scale = sys.lam_y.norm().max(1.0);
    let mut out = vec![ONE; order + 1];
    let mut warnings = Vec::new();
    for (n, slot) in out.iter_mut().enumerate().skip(2) {
        let divisor = int_power(sys.lam_x, n) - sys.lam_y;
        let size = divisor.norm() / scale;
        if size < MANIFOLD_RESONANCE_TOL {
            return Err(Error::ManifoldResonance {
                order: n,
                divisor: divisor.norm(),
            });
        }
        if size < MANIFOLD_NEAR_RESONANCE {
            warn!("manifold divisor at order {n} is {:e}", divisor.norm());
            warnings.push(ConditioningWarning {
                order: n,
                divisor: divisor.norm(),
            });
        }
        *slot = divisor;
    }
    Ok((out, warnings))
}

/// Solves for `gamma_2 ..= gamma_M` order by order.
pub fn solve_psi(sys: &DiagonalSystem, order: usize) -> Result<ManifoldSeries> {
    solve_psi_with(sys, order, PsiMethod::OrderByOrder)
}

pub fn solve_psi_with(
    sys: &DiagonalSystem,
    order: usize,
    method: PsiMethod,
) -> Result<ManifoldSeries> {
    if order < 2 {
        return Err(Error::InvalidArgument(
            "manifold order must be at least 2".into(),
        ));
    }
    let (divisors, warnings) = divisors(sys, order)?;
    let mut gammas = Series1::zero(order);
    match method {
        PsiMethod::OrderByOrder => {
            for (n, &divisor) in divisors.iter().enumerate().skip(2) {
                let r = functional_residual(sys, &gammas, n).coeff(n);
                gammas.set_coeff(n, -r / divisor);
            }
        }
        PsiMethod::Sweeps => {
            for _ in 1..order {
                let r = functional_residual(sys, &gammas, order);
                for (n, &divisor) in divisors.iter().enumerate().skip(2) {
                    let updated = gammas.coeff(n) - r.coeff(n) / divisor;
                    gammas.set_coeff(n, updated);
                }
            }
        }
    }
    Ok(ManifoldSeries {
        gammas,
        system: sys.clone(),
        warnings,
    })
}

impl ManifoldSeries {
    pub fn order(&self) -> usize {
        self.gammas.order()
    }

    pub fn gamma(&self, n: usize) -> C64 {
        self.gammas.coeff(n)
    }

    /// Root-test radius of the `gamma` series.
    pub fn radius(&self) -> f64 {
        root_test_radius(&self.gammas)
    }

    pub fn functional_residual(&self) -> Series1 {
        functional_residual(&self.system, &self.gammas, self.order())
    }

    /// `Psi(x)`; fails beyond the empirical radius.
    pub fn eval(&self, x: C64) -> Result<C64> {
        let radius = self.radius();
        if x.norm() > radius {
            return Err(Error::OutsideDomain {
                modulus: x.norm(),
                radius,
            });
        }
        Ok(self.gammas.eval(x))
    }
}
