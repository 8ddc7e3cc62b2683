use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cannot parse degree set `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
    #[error("1 must belong to the degree set (we require that 1 ∈ Δ); got {0}")]
    MissingOne(String),
    #[error("degree set is empty")]
    EmptySet,
    #[error("degree set needs a degree of at least 3 for a critical point to exist; largest is {0}")]
    NoLargeDegree(u32),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("truncation at degree {bound} is unstable at z = {z}: relative change {change:e}")]
    TruncationUnstable { bound: u32, z: f64, change: f64 },
    #[error("no critical point: sup φ₁ ≤ 1 on the evaluated range")]
    NoCriticalPoint,
    #[error("tree function fixed point does not exist at z = {z} (z > ρ = {rho}); residual {residual:e}")]
    TreeNonConvergence { z: f64, rho: f64, residual: f64 },
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("logarithm argument vanishes: {0}")]
    Branch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series failed to converge after {terms} terms")]
    NonConvergence { terms: usize },
    #[error("floating-point cancellation too large for y = {y}, μ = {mu} (only half-odd y have a multiprecision route)")]
    PrecisionLoss { y: f64, mu: f64 },
    #[error("coefficient c_{0} is not tabulated (only q ≤ 4 are known)")]
    OutOfTable(usize),
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("rejection sampling gave up after {attempts} attempts (last pairing had {loops} loops, {multi} repeated edges)")]
    MaxAttempts { attempts: u64, loops: usize, multi: usize },
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("excess {0} is too large for exhaustive kernel search (limit 12)")]
    ExcessTooLarge(i64),
    #[error("size guard: {0}")]
    TooLarge(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
