//! General solutions decaying along one root.
//!
//! For a particular solution `u_m`, a manifold `Psi_m` and a period-1 function
//! `pi`, the family
//!
//! ```text
//! chi(t)     = (lambda_o u_m(t + pi(t)) - u_m(t + pi(t) + 1)) / (lambda_o - lambda_m)
//! Upsilon(t) = chi(t) + Psi_m(chi(t))
//! ```
//!
//! solves the equation, where `lambda_o` is the other root (index `m + 1`,
//! with 3 read as 1). `pi` is a finite Fourier sum, so it is entire and
//! exactly periodic.

use std::f64::consts::PI;

use crate::algebra::{ensure_finite, C64, ZERO};
use crate::equation::{CharacteristicData, EquationSpec, RootIndex};
use crate::error::{Error, Result};
use crate::manifold::{diagonalize, solve_psi, ManifoldSeries, Transform};
use crate::particular::{solve_particular, DomainSector, ParticularSolution, SolveOptions};
use crate::verify::SolutionEvaluator;

/// Magnitude under which `Upsilon` is treated as having underflowed.
pub const UNDERFLOW: f64 = 1e-280;

/// `pi(t) = sum_j c_j exp(2 pi i j t)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeriodicFunction {
    pub terms: Vec<(i32, C64)>,
}

impl PeriodicFunction {
    pub fn zero() -> Self {
        PeriodicFunction::default()
    }

    pub fn constant(c: C64) -> Self {
        PeriodicFunction {
            terms: vec![(0, c)],
        }
    }

    pub fn new(terms: Vec<(i32, C64)>) -> Result<Self> {
        for &(_, c) in &terms {
            ensure_finite(c, "fourier coefficient")?;
        }
        Ok(PeriodicFunction { terms })
    }

    pub fn eval(&self, t: C64) -> C64 {
        let i2pi = C64::new(0.0, 2.0 * PI);
        self.terms
            .iter()
            .map(|&(j, c)| c * (i2pi * j as f64 * t).exp())
            .fold(ZERO, |a, b| a + b)
    }

    /// `pi(t + shift)` as another Fourier sum.
    pub fn shifted(&self, shift: f64) -> Self {
        let i2pi = C64::new(0.0, 2.0 * PI);
        PeriodicFunction {
            terms: self
                .terms
                .iter()
                .map(|&(j, c)| (j, c * (i2pi * j as f64 * shift).exp()))
                .collect(),
        }
    }

    /// Bound on `|pi(t)|` for `|Im t| <= im_bound`.
    pub fn bound_on_strip(&self, im_bound: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(j, c)| c.norm() * (2.0 * PI * (j.unsigned_abs() as f64) * im_bound).exp())
            .sum()
    }
}

/// A member of the general solution family for root `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralSolution {
    pub m: RootIndex,
    pub particular: ParticularSolution,
    pub psi: ManifoldSeries,
    pub pi: PeriodicFunction,
    pub chars: CharacteristicData,
}

impl GeneralSolution {
    pub fn new(
        m: RootIndex,
        particular: ParticularSolution,
        psi: ManifoldSeries,
        pi: PeriodicFunction,
        chars: CharacteristicData,
    ) -> Result<Self> {
        if particular.m != m {
            return Err(Error::InvalidArgument(format!(
                "particular solution is built on root {}, expected {m}",
                particular.m
            )));
        }
        if particular.stride != 1 {
            return Err(Error::InvalidArgument(
                "general solutions need a stride-1 particular solution".into(),
            ));
        }
        if psi.system.which != Transform::for_root(m) {
            return Err(Error::InvalidArgument(format!(
                "manifold built from {:?}, root {m} needs {:?}",
                psi.system.which,
                Transform::for_root(m)
            )));
        }
        Ok(GeneralSolution {
            m,
            particular,
            psi,
            pi,
            chars,
        })
    }

    pub fn lambda(&self) -> C64 {
        self.chars.lambda(self.m)
    }

    /// `x(t + pi(t))`, the first diagonal coordinate of the shifted
    /// particular solution.
    pub fn build_chi(&self, t: C64) -> Result<C64> {
        let shifted = t + self.pi.eval(t);
        let lambda_m = self.chars.lambda(self.m);
        let lambda_o = self.chars.lambda(self.m.other());
        let u0 = self.particular.eval(shifted)?;
        let u1 = self.particular.eval(shifted + C64::new(1.0, 0.0))?;
        Ok((lambda_o * u0 - u1) / (lambda_o - lambda_m))
    }

    /// `Upsilon(t) = chi(t) + Psi(chi(t))`.
    pub fn eval(&self, t: C64) -> Result<C64> {
        let chi = self.build_chi(t)?;
        Ok(chi + self.psi.eval(chi)?)
    }

    /// Step direction along which the solution decays: `+1` for root 1,
    /// `-1` for root 2.
    pub fn decay_step(&self) -> f64 {
        match self.m {
            RootIndex::First => 1.0,
            RootIndex::Second => -1.0,
        }
    }

    /// Ratios `Upsilon(t0 + 1 + s n) / Upsilon(t0 + s n)` for `n = 1..=n_max`,
    /// `s` being [`decay_step`](Self::decay_step). They tend to `lambda_m`.
    pub fn ratio_limit_check(&self, t0: C64, n_max: usize) -> Result<Vec<C64>> {
        let s = self.decay_step();
        let one = C64::new(1.0, 0.0);
        let mut ratios = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let base = t0 + one * (s * n as f64);
            let den = self.eval(base)?;
            let num = self.eval(base + one)?;
            if den.norm() < UNDERFLOW || num.norm() < UNDERFLOW {
                return Err(Error::DivisionNearZero {
                    computed: ratios.len(),
                    partial: ratios,
                });
            }
            ratios.push(num / den);
        }
        Ok(ratios)
    }

    /// Fails with a diagnostic if any grid point pushes `t + pi(t)` (or its
    /// unit shift) outside the particular solution's sector.
    pub fn check_grid(&self, grid: &[C64]) -> Result<()> {
        let sector = self.particular.sector();
        for &t in grid {
            let shifted = t + self.pi.eval(t);
            for probe in [shifted, shifted + C64::new(1.0, 0.0)] {
                if !sector.contains(probe) {
                    return Err(Error::OutsideDomain {
                        modulus: sector.variable(probe).norm(),
                        radius: sector.eta,
                    });
                }
            }
        }
        Ok(())
    }
}

impl SolutionEvaluator for GeneralSolution {
    fn eval(&self, t: C64) -> Result<C64> {
        GeneralSolution::eval(self, t)
    }

    fn sector(&self) -> DomainSector {
        self.particular.sector()
    }

    fn truncation_order(&self) -> usize {
        self.particular.order().min(self.psi.order())
    }
}

/// Builds the particular solution, manifold and general solution for root
/// `m` in one go.
pub fn assemble_general(
    spec: &EquationSpec,
    chars: &CharacteristicData,
    m: RootIndex,
    opts: &SolveOptions,
    psi_order: usize,
    pi: PeriodicFunction,
) -> Result<GeneralSolution> {
    let particular = solve_particular(spec, chars, m, opts)?;
    let sys = diagonalize(spec, chars, Transform::for_root(m), psi_order as u32)?;
    let psi = solve_psi(&sys, psi_order)?;
    GeneralSolution::new(m, particular, psi, pi, *chars)
}
