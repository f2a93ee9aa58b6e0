use thiserror::Error;

/// Errors produced by the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("BetaZero: beta must be nonzero")]
    BetaZero,

    #[error("GNontrivial: the nonlinearity g must not vanish identically")]
    GNontrivial,

    #[error("BadDegree: term x^{i} y^{j} has total degree below 2")]
    BadDegree { i: u32, j: u32 },

    #[error("NoHyperbolicCase: |lambda1| = {lambda1_abs} and |lambda2| = {lambda2_abs} both lie on the unit circle")]
    NoHyperbolicCase { lambda1_abs: f64, lambda2_abs: f64 },

    #[error("lambda does not solve the characteristic equation (|D(lambda)| = {residual:e})")]
    NotCharacteristicRoot { residual: f64 },

    #[error("SmallDivisor: |D(lambda^{order})| = {divisor:e} at order {order}; route through the resonant solver")]
    SmallDivisor { order: usize, divisor: f64 },

    #[error("NotResonant: |D(lambda^{order})| = {divisor:e} is not small at order {order}")]
    NotResonant { order: usize, divisor: f64 },

    #[error(
        "AmbiguousBranch: |C*| = {c_star:e} is too close to the zero threshold to pick a branch"
    )]
    AmbiguousBranch { c_star: f64 },

    #[error("DegenerateSeries: all coefficients past a1 vanish but the substitution residual is {residual:e}")]
    DegenerateSeries { residual: f64 },

    #[error("OutsideDomain: |variable| = {modulus:e} exceeds radius {radius:e}")]
    OutsideDomain { modulus: f64, radius: f64 },

    #[error("RepeatedRoot: lambda1 and lambda2 coincide")]
    RepeatedRoot,

    #[error("ManifoldResonance: |lam_x^{order} - lam_y| = {divisor:e} at order {order}")]
    ManifoldResonance { order: usize, divisor: f64 },

    #[error("DivisionNearZero: solution underflowed after {computed} ratios")]
    DivisionNearZero {
        computed: usize,
        partial: Vec<num_complex::Complex64>,
    },

    #[error("NewtonDiverged: residual {residual:e} after {iterations} iterations")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("OutsideBox: |w| = {w_abs:e}, |z| = {z_abs:e} exceed rho = {rho:e}")]
    OutsideBox { w_abs: f64, z_abs: f64, rho: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
