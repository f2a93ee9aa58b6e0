//! Truncated power series over complex scalars.
//!
//! Every series handled by the solver vanishes at the equilibrium, so
//! [`Series1`] stores coefficients starting at `z^1`. [`Poly2`] holds the
//! bivariate nonlinearity `g(x, y) = sum b_ij x^i y^j` with `i + j >= 2`.
//!
//! Truncation order is always an explicit argument. All loops run in a fixed
//! order, so results are bit-for-bit reproducible for identical inputs.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn is_finite(c: C64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

pub(crate) fn ensure_finite(c: C64, what: &'static str) -> Result<C64> {
    if is_finite(c) {
        Ok(c)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Dense truncated series `sum_{n=1}^{N} c_n z^n`.
///
/// `coeffs()[k - 1]` is the coefficient of `z^k`; there is no constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1 {
    coeffs: Vec<C64>,
}

impl Series1 {
    pub fn zero(order: usize) -> Self {
        Series1 {
            coeffs: vec![ZERO; order],
        }
    }

    /// Builds a series from coefficients of `z^1, z^2, ...`.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        Series1 { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Series1 {
            coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
        }
    }

    /// The series `c z^degree` truncated at `order`.
    pub fn monomial(degree: usize, c: C64, order: usize) -> Self {
        let mut s = Series1::zero(order);
        if degree >= 1 && degree <= order {
            s.coeffs[degree - 1] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; zero outside `1..=order`.
    pub fn coeff(&self, k: usize) -> C64 {
        if k == 0 || k > self.coeffs.len() {
            ZERO
        } else {
            self.coeffs[k - 1]
        }
    }

    /// Sets the coefficient of `z^k`, growing the series if needed.
    pub fn set_coeff(&mut self, k: usize, c: C64) {
        assert!(k >= 1, "series have no constant term");
        if k > self.coeffs.len() {
            self.coeffs.resize(k, ZERO);
        }
        self.coeffs[k - 1] = c;
    }

    /// Truncates or zero-extends to exactly `order` terms.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order, ZERO);
        Series1 { coeffs }
    }

    pub fn add(&self, other: &Series1) -> Series1 {
        let n = self.order().max(other.order());
        Series1 {
            coeffs: (1..=n).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        }
    }

    pub fn sub(&self, other: &Series1) -> Series1 {
        let n = self.order().max(other.order());
        Series1 {
            coeffs: (1..=n).map(|k| self.coeff(k) - other.coeff(k)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Series1 {
        Series1 {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Returns `S(lambda z)`: coefficient `n` multiplied by `lambda^n`.
    pub fn dilate(&self, lambda: C64) -> Series1 {
        let mut p = ONE;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| {
                p *= lambda;
                a * p
            })
            .collect();
        Series1 { coeffs }
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z
    }

    /// Horner evaluation of the derivative at `z`.
    pub fn eval_derivative(&self, z: C64) -> C64 {
        let mut acc = ZERO;
        for (idx, &c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * z + c * (idx as f64 + 1.0);
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != ZERO).map(|i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.min_degree().is_none()
    }
}

/// Cauchy product truncated at `order`. The result starts at `z^2`.
pub fn mul1(a: &Series1, b: &Series1, order: usize) -> Series1 {
    let mut out = vec![ZERO; order];
    for (p_idx, &ap) in a.coeffs.iter().enumerate() {
        let p = p_idx + 1;
        if p + 1 > order {
            break;
        }
        if ap == ZERO {
            continue;
        }
        for (q_idx, &bq) in b.coeffs.iter().enumerate() {
            let k = p + q_idx + 1;
            if k > order {
                break;
            }
            out[k - 1] += ap * bq;
        }
    }
    Series1 { coeffs: out }
}

/// Powers `a^1 ..= a^max_power` truncated at `order` (index 0 holds `a^1`).
pub fn powers1(a: &Series1, max_power: usize, order: usize) -> Vec<Series1> {
    let mut out = Vec::with_capacity(max_power);
    if max_power == 0 {
        return out;
    }
    out.push(a.with_order(order));
    for _ in 1..max_power {
        let next = mul1(out.last().expect("nonempty"), a, order);
        out.push(next);
    }
    out
}

/// `outer(inner(z))` truncated at `order`.
pub fn compose1(outer: &Series1, inner: &Series1, order: usize) -> Series1 {
    let top = outer.order().min(order);
    let mut acc = Series1::zero(order);
    if top == 0 {
        return acc;
    }
    let mut power = inner.with_order(order);
    for n in 1..=top {
        if n > 1 {
            power = mul1(&power, inner, order);
        }
        let c = outer.coeff(n);
        if c != ZERO {
            for (slot, &p) in acc.coeffs.iter_mut().zip(power.coeffs.iter()) {
                *slot += c * p;
            }
        }
    }
    acc
}

/// Bivariate polynomial `sum c_ij x^i y^j` restricted to `i + j >= 2`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), C64>,
}

impl Poly2 {
    pub fn new() -> Self {
        Poly2::default()
    }

    /// Builds from `(i, j, c)` triples. Repeated keys accumulate and exact
    /// zeros are dropped.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, C64)>,
    {
        let mut p = Poly2::new();
        for (i, j, c) in terms {
            p.add_term(i, j, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: C64) -> Result<()> {
        if i + j < 2 {
            return Err(Error::BadDegree { i, j });
        }
        ensure_finite(c, "polynomial coefficient")?;
        let slot = self.terms.entry((i, j)).or_insert(ZERO);
        *slot += c;
        if *slot == ZERO {
            self.terms.remove(&(i, j));
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> C64 {
        self.terms.get(&(i, j)).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn max_total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn scale(&self, c: C64) -> Poly2 {
        let mut out = Poly2::new();
        for (i, j, v) in self.terms() {
            let scaled = v * c;
            if scaled != ZERO {
                out.terms.insert((i, j), scaled);
            }
        }
        out
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.terms()
            .map(|(i, j, c)| c * x.powu(i) * y.powu(j))
            .fold(ZERO, |a, b| a + b)
    }

    /// Partial derivative in the first argument.
    pub fn eval_dx(&self, x: C64, y: C64) -> C64 {
        self.terms()
            .filter(|&(i, _, _)| i > 0)
            .map(|(i, j, c)| c * (i as f64) * x.powu(i - 1) * y.powu(j))
            .fold(ZERO, |a, b| a + b)
    }

    /// Partial derivative in the second argument.
    pub fn eval_dy(&self, x: C64, y: C64) -> C64 {
        self.terms()
            .filter(|&(_, j, _)| j > 0)
            .map(|(i, j, c)| c * (j as f64) * x.powu(i) * y.powu(j - 1))
            .fold(ZERO, |a, b| a + b)
    }

    /// Coefficients of `self(a x + b y, c x + d y)`, keeping total degree
    /// at most `max_degree`. Linear substitution preserves homogeneous
    /// degree, so the result still has no terms below degree 2.
    pub fn linear_substitute(&self, a: C64, b: C64, c: C64, d: C64, max_degree: u32) -> Poly2 {
        let mut out: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (i, j, coef) in self.terms() {
            if i + j > max_degree {
                continue;
            }
            let first = binomial_expand(a, b, i);
            let second = binomial_expand(c, d, j);
            for (r, &fr) in first.iter().enumerate() {
                for (s, &gs) in second.iter().enumerate() {
                    let xp = (r + s) as u32;
                    let yp = i + j - xp;
                    *out.entry((xp, yp)).or_insert(ZERO) += coef * fr * gs;
                }
            }
        }
        out.retain(|_, v| *v != ZERO);
        Poly2 { terms: out }
    }
}

/// Coefficients of `(a x + b y)^n` indexed by the power of `x`.
fn binomial_expand(a: C64, b: C64, n: u32) -> Vec<C64> {
    let n = n as usize;
    let mut binom = vec![1.0f64; n + 1];
    for r in 1..n {
        binom[r] = binom[r - 1] * ((n - r + 1) as f64) / (r as f64);
    }
    (0..=n)
        .map(|r| a.powu(r as u32) * b.powu((n - r) as u32) * binom[r])
        .collect()
}

/// `sum b_ij u^i v^j` truncated at `order`. The `z^1` coefficient is zero
/// because every term has total degree at least two.
pub fn eval_poly2_on_series(g: &Poly2, u: &Series1, v: &Series1, order: usize) -> Series1 {
    let mut acc = Series1::zero(order);
    if order < 2 || g.is_zero() {
        return acc;
    }
    let max_i = g
        .terms()
        .map(|(i, _, _)| i as usize)
        .max()
        .unwrap_or(0)
        .min(order);
    let max_j = g
        .terms()
        .map(|(_, j, _)| j as usize)
        .max()
        .unwrap_or(0)
        .min(order);
    let u_pows = powers1(u, max_i, order);
    let v_pows = powers1(v, max_j, order);
    for (i, j, c) in g.terms() {
        let (i, j) = (i as usize, j as usize);
        if i + j > order {
            continue;
        }
        let term = match (i, j) {
            (0, j) => v_pows[j - 1].clone(),
            (i, 0) => u_pows[i - 1].clone(),
            (i, j) => mul1(&u_pows[i - 1], &v_pows[j - 1], order),
        };
        for (slot, &t) in acc.coeffs.iter_mut().zip(term.coeffs.iter()) {
            *slot += c * t;
        }
    }
    acc
}
