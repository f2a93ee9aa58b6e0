//! The equation `u(t+2) = -beta u(t) - alpha u(t+1) + g(u(t), u(t+1))`, its
//! characteristic roots and the resonance scan.

use std::cmp::Ordering;
use std::fmt;

use crate::algebra::{ensure_finite, Poly2, C64, ONE};
use crate::error::{Error, Result};

/// Default relative tolerance for `lambda_m^k == lambda_other`.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-9;
/// Default number of powers scanned for resonances.
pub const DEFAULT_K_MAX: usize = 64;
/// Relative distance below which a non-resonant power is reported as near-resonant.
pub const NEAR_RESONANCE: f64 = 1e-3;
/// Distance from the unit circle treated as "on" the circle.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Coefficients of the normalized equation.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationSpec {
    pub alpha: C64,
    pub beta: C64,
    pub g: Poly2,
}

impl EquationSpec {
    /// Builds and validates a spec.
    pub fn new(alpha: C64, beta: C64, g: Poly2) -> Result<Self> {
        EquationSpec { alpha, beta, g }.validate()
    }

    /// The linear equation (`g = 0`). Skips the nontrivial-`g` requirement;
    /// used by oracles that need an exactly solvable reference.
    pub fn linear(alpha: C64, beta: C64) -> Result<Self> {
        ensure_finite(alpha, "alpha")?;
        ensure_finite(beta, "beta")?;
        if beta == C64::new(0.0, 0.0) {
            return Err(Error::BetaZero);
        }
        Ok(EquationSpec {
            alpha,
            beta,
            g: Poly2::new(),
        })
    }

    /// Equation whose characteristic roots are `lambda1` and `lambda2`.
    pub fn from_roots(lambda1: C64, lambda2: C64, g: Poly2) -> Result<Self> {
        EquationSpec::new(-(lambda1 + lambda2), lambda1 * lambda2, g)
    }

    pub fn validate(self) -> Result<Self> {
        ensure_finite(self.alpha, "alpha")?;
        ensure_finite(self.beta, "beta")?;
        if self.beta == C64::new(0.0, 0.0) {
            return Err(Error::BetaZero);
        }
        if let Some((i, j, _)) = self.g.terms().find(|&(i, j, _)| i + j < 2) {
            return Err(Error::BadDegree { i, j });
        }
        if self.g.is_zero() {
            return Err(Error::GNontrivial);
        }
        Ok(self)
    }

    /// Right-hand side `f(x, y) = -beta x - alpha y + g(x, y)`.
    pub fn f(&self, x: C64, y: C64) -> C64 {
        -self.beta * x - self.alpha * y + self.g.eval(x, y)
    }

    /// Characteristic polynomial `D(lambda) = lambda^2 + alpha lambda + beta`.
    pub fn char_poly(&self, lambda: C64) -> C64 {
        (lambda + self.alpha) * lambda + self.beta
    }

    /// Scale used by absolute small-divisor thresholds.
    pub fn divisor_scale(&self) -> f64 {
        self.beta.norm().max(1.0)
    }
}

/// Roots of `D` ordered by modulus, with the hyperbolic case flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicData {
    pub lambda1: C64,
    pub lambda2: C64,
    /// `|lambda1| < 1`: solutions decaying under forward shifts exist.
    pub case_i_available: bool,
    /// `|lambda2| > 1`: solutions decaying under backward shifts exist.
    pub case_ii_available: bool,
}

impl CharacteristicData {
    /// `lambda_m`.
    pub fn lambda(&self, m: RootIndex) -> C64 {
        match m {
            RootIndex::First => self.lambda1,
            RootIndex::Second => self.lambda2,
        }
    }

    /// Whether the two roots coincide to relative tolerance `tol`.
    pub fn is_repeated(&self, tol: f64) -> bool {
        (self.lambda1 - self.lambda2).norm() <= tol * self.lambda2.norm().max(1.0)
    }

    pub fn case_available(&self, m: RootIndex) -> bool {
        match m {
            RootIndex::First => self.case_i_available,
            RootIndex::Second => self.case_ii_available,
        }
    }
}

/// Which characteristic root a construction is based on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootIndex {
    First,
    Second,
}

impl RootIndex {
    pub fn from_number(m: u8) -> Result<Self> {
        match m {
            1 => Ok(RootIndex::First),
            2 => Ok(RootIndex::Second),
            _ => Err(Error::InvalidArgument(format!(
                "root index must be 1 or 2, got {m}"
            ))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            RootIndex::First => 1,
            RootIndex::Second => 2,
        }
    }

    /// The index `m + 1` under the convention that 3 means 1.
    pub fn other(self) -> Self {
        match self {
            RootIndex::First => RootIndex::Second,
            RootIndex::Second => RootIndex::First,
        }
    }
}

impl fmt::Display for RootIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

fn lex_cmp(a: C64, b: C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Solves `lambda^2 + alpha lambda + beta = 0`.
///
/// The larger-magnitude root comes from the cancellation-free branch of the
/// quadratic formula and the other from `beta / lambda`. Roots of equal
/// modulus (to 1e-12 relative) are ordered lexicographically by `(re, im)`.
pub fn characteristic_roots(spec: &EquationSpec) -> Result<CharacteristicData> {
    let (alpha, beta) = (spec.alpha, spec.beta);
    if beta == C64::new(0.0, 0.0) {
        return Err(Error::BetaZero);
    }
    let disc = (alpha * alpha - 4.0 * beta).sqrt();
    let plus = -alpha + disc;
    let minus = -alpha - disc;
    let big = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    } * 0.5;
    let small = beta / big;
    let (m_small, m_big) = (small.norm(), big.norm());
    let tie = (m_big - m_small) <= 1e-12 * m_big;
    let (lambda1, lambda2) = if tie {
        if lex_cmp(small, big) == Ordering::Greater {
            (big, small)
        } else {
            (small, big)
        }
    } else {
        (small, big)
    };
    ensure_finite(lambda1, "lambda1")?;
    ensure_finite(lambda2, "lambda2")?;

    let (a1, a2) = (lambda1.norm(), lambda2.norm());
    let case_i = a1 < 1.0 - UNIT_CIRCLE_TOL;
    let case_ii = a2 > 1.0 + UNIT_CIRCLE_TOL;
    if !case_i && !case_ii {
        return Err(Error::NoHyperbolicCase {
            lambda1_abs: a1,
            lambda2_abs: a2,
        });
    }
    Ok(CharacteristicData {
        lambda1,
        lambda2,
        case_i_available: case_i,
        case_ii_available: case_ii,
    })
}

/// One detected resonance `lambda_m^k = lambda_other`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceEntry {
    pub m: RootIndex,
    pub k: usize,
    /// Relative distance `|lambda_m^k - lambda_other| / |lambda_other|`.
    pub distance: f64,
    /// False when the root sits outside the modulus regime in which the
    /// resonance obstructs its series (reported for information only).
    pub relevant: bool,
    /// Filled in once the numerator constant `C*` has been evaluated.
    pub c_star_zero: Option<bool>,
}

/// A power that came close to resonance without crossing the tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct NearResonance {
    pub m: RootIndex,
    pub k: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceReport {
    pub entries: Vec<ResonanceEntry>,
    pub warnings: Vec<NearResonance>,
    pub k_max_scanned: usize,
    pub tol: f64,
}

impl ResonanceReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// First relevant resonance obstructing the series of root `m`.
    pub fn entry_for(&self, m: RootIndex) -> Option<&ResonanceEntry> {
        self.entries.iter().find(|e| e.m == m && e.relevant)
    }
}

/// Scans `k = 2..=k_max` for `lambda_2^k = lambda_1` and `lambda_1^k = lambda_2`.
pub fn detect_resonance(chars: &CharacteristicData, k_max: usize, tol: f64) -> ResonanceReport {
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for m in [RootIndex::First, RootIndex::Second] {
        let base = chars.lambda(m);
        let target = chars.lambda(m.other());
        // lambda2^k = lambda1 matters when |lambda2| < 1, lambda1^k = lambda2 when |lambda1| > 1.
        let relevant = match m {
            RootIndex::Second => chars.lambda2.norm() < 1.0,
            RootIndex::First => chars.lambda1.norm() > 1.0,
        };
        let mut power = base;
        for k in 2..=k_max {
            power *= base;
            if !(power.re.is_finite() && power.im.is_finite()) {
                break;
            }
            let distance = (power - target).norm() / target.norm();
            if distance <= tol {
                entries.push(ResonanceEntry {
                    m,
                    k,
                    distance,
                    relevant,
                    c_star_zero: None,
                });
            } else if distance < NEAR_RESONANCE {
                warnings.push(NearResonance { m, k, distance });
            }
        }
    }
    entries.sort_by_key(|e| (e.k, e.m));
    ResonanceReport {
        entries,
        warnings,
        k_max_scanned: k_max,
        tol,
    }
}

/// `lambda^k` by repeated multiplication.
pub(crate) fn int_power(lambda: C64, k: usize) -> C64 {
    (0..k).fold(ONE, |acc, _| acc * lambda)
}
