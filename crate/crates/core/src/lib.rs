//! Analytic series solutions of second-order nonlinear difference equations
//!
//! ```text
//! u(t+2) = -beta u(t) - alpha u(t+1) + g(u(t), u(t+1)),   g = sum_{i+j>=2} b_ij x^i y^j
//! ```
//!
//! near the equilibrium `u = 0`, for complex `t`.
//!
//! * [`equation`]: characteristic roots, case flags, resonance scan.
//! * [`particular`]: series `u(t) = sum a_n lambda^{n t}` including resonant branches.
//! * [`manifold`]: diagonalized pair form and the invariant manifold `y = Psi(x)`.
//! * [`general`]: the family `Upsilon(t)` parameterized by a period-1 function.
//! * [`verify`]: oracles that check solutions against the equation alone.
//! * [`cli`]: config format, pipelines and report writers behind the `adsolve` binary.

pub mod algebra;
pub mod cli;
pub mod equation;
pub mod error;
pub mod general;
pub mod manifold;
pub mod particular;
pub mod verify;

pub use algebra::{compose1, eval_poly2_on_series, mul1, Poly2, Series1, C64};
pub use equation::{
    characteristic_roots, detect_resonance, CharacteristicData, EquationSpec, ResonanceReport,
    RootIndex,
};
pub use error::{Error, Result};
pub use general::{assemble_general, GeneralSolution, PeriodicFunction};
pub use manifold::{diagonalize, solve_psi, DiagonalSystem, ManifoldSeries, Transform};
pub use particular::{
    estimate_radius, solve_coefficients, solve_particular, solve_resonant, DomainSector,
    ParticularSolution, SolveOptions,
};
pub use verify::{
    implicit_backstep, iteration_oracle, oracle_start, residual_scan, BacksteppingContext,
    ScanConfig, SolutionEvaluator, VerificationReport,
};
