//! Critical-window special functions and the predictions built on them.
//!
//! ```text
//! B_Δ(y, μ) = ⅓ C₃^{(y−2)/3} Σ_k a^k / (k! Γ((y+1−2k)/3)),   a = C₂ C₃^{−2/3} μ
//! A_Δ(y, μ) = (t₃ẑ)^{1−y} (3C₃)^{(y−2)/3} A(y, ξ),            ξ = 2C₂μ / (3C₃)^{2/3}
//!           = e^{−μ³/6} (ẑt₃)^{1−y} B_Δ(y, μ)
//! ```
//!
//! `A = A_{ℤ≥0}` is the Erdős–Rényi function. The two expressions for
//! `A_Δ` only agree when `ξ = μ`; both are available through [`Variant`].
//! Values are carried as [`LogValue`] since `B_Δ` under- and overflows
//! `f64` well inside `|μ| ≤ 20`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::critical::CriticalPoint;
use crate::math::{self, CompensatedSum};
use crate::mp::{self, LogValue};
use crate::{Error, Result};

/// Above this ratio of largest term to sum, the double-precision series is
/// abandoned.
const CANCELLATION_LIMIT: f64 = 1024.0;
const LN_1E16: f64 = 36.841_361_487_904_734;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `(t₃ẑ)^{1−y}(3C₃)^{(y−2)/3} A(y, ξ)`
    #[default]
    ScaledArgument,
    /// `e^{−μ³/6}(ẑt₃)^{1−y} B_Δ(y, μ)`
    PlainExponential,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::ScaledArgument => "scaled",
            Variant::PlainExponential => "plain",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scaled" | "scaled-argument" => Ok(Variant::ScaledArgument),
            "plain" | "plain-exponential" => Ok(Variant::PlainExponential),
            _ => Err(Error::Domain(format!("unknown variant `{s}` (expected scaled or plain)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minus,
    Plus,
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `e_{q0} = (6q)! / (2^{5q} 3^{2q} (3q)! (2q)!)`, exact.
pub fn wright_e(q: u32) -> BigRational {
    let q = q as u64;
    let num = factorial(6 * q);
    let den = BigInt::from(2u32).pow(5 * q as u32)
        * BigInt::from(3u32).pow(2 * q as u32)
        * factorial(3 * q)
        * factorial(2 * q);
    BigRational::new(num, den)
}

/// `c_q = [z^{2q}] G(z)` for the planar kernels, `q ≤ 4`.
pub fn planar_c(q: usize) -> Result<BigRational> {
    const TABLE: [(i64, i64); 5] =
        [(1, 1), (5, 24), (385, 1152), (83_933, 82_944), (35_002_561, 7_962_624)];
    let &(n, d) = TABLE.get(q).ok_or(Error::OutOfTable(q))?;
    Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ln_rational(r: &BigRational) -> f64 {
    // Numerator and denominator may exceed f64 range for large q.
    fn ln_int(x: &BigInt) -> f64 {
        let bits = x.bits();
        let drop = bits.saturating_sub(60);
        let top = (x >> drop as usize).to_f64().unwrap_or(f64::NAN);
        math::ln(top) + drop as f64 * math::LN_2
    }
    ln_int(r.numer()) - ln_int(r.denom())
}

fn is_half_odd(y: f64) -> Option<u32> {
    let j = y - 0.5;
    (j >= 0.0 && j == math::floor(j) && j < 1e6).then_some(j as u32)
}

fn term(y: f64, ln_a: f64, neg: bool, k: usize) -> (i8, f64) {
    let (mut sign, ln_rg) = math::ln_rgamma((y + 1.0 - 2.0 * k as f64) / 3.0);
    if sign == 0 {
        return (0, f64::NEG_INFINITY);
    }
    if neg && k % 2 == 1 {
        sign = -sign;
    }
    let ln_ak = if k == 0 { 0.0 } else { k as f64 * ln_a };
    (sign, ln_ak - math::ln_factorial(k as u32) + ln_rg)
}

/// `Σ_k a^k / (k! Γ((y+1−2k)/3))` in log form.
pub fn series(y: f64, a: f64) -> Result<LogValue> {
    if !(y.is_finite() && a.is_finite()) {
        return Err(Error::Domain(format!("series needs finite arguments, got y = {y}, a = {a}")));
    }
    if a == 0.0 {
        return Ok(LogValue::from_f64(math::rgamma((y + 1.0) / 3.0)));
    }
    let ln_a = math::ln(math::abs(a));
    let neg = a < 0.0;
    let peak = (4.0 * math::abs(a * a * a) / 9.0) as usize + 3;
    let max_terms = 500 + 3 * peak;
    let mut terms: Vec<(i8, f64)> = Vec::new();
    let mut ln_max = f64::NEG_INFINITY;
    let mut small = 0;
    let mut k = 0;
    loop {
        let t = term(y, ln_a, neg, k);
        ln_max = ln_max.max(t.1);
        terms.push(t);
        if t.0 == 0 || t.1 < ln_max - LN_1E16 - math::ln(CANCELLATION_LIMIT) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= 5 && k > peak {
            break;
        }
        k += 1;
        if k >= max_terms {
            return Err(Error::NonConvergence { terms: k });
        }
    }
    let sum: CompensatedSum = terms
        .iter()
        .filter(|t| t.0 != 0)
        .map(|&(s, l)| s as f64 * math::exp(l - ln_max))
        .collect();
    let s = sum.value();
    if math::abs(s) * CANCELLATION_LIMIT >= 1.0 {
        return Ok(LogValue::from_f64(s).mul_ln(ln_max));
    }
    match is_half_odd(y) {
        Some(j) => {
            let ln_min_seed = terms
                .iter()
                .take(3)
                .map(|t| t.1)
                .fold(f64::INFINITY, f64::min);
            mp::half_odd_series(j, a, ln_max, ln_min_seed)
        }
        None => Err(Error::PrecisionLoss { y, mu: a }),
    }
}

fn check_args(y: f64, mu: f64) -> Result<()> {
    if !(y >= 0.5) {
        return Err(Error::Domain(format!("y must be at least ½, got {y}")));
    }
    if !mu.is_finite() {
        return Err(Error::Domain(format!("μ must be finite, got {mu}")));
    }
    Ok(())
}

/// `ln B_Δ(y, μ)` with sign.
pub fn ln_big_b(cp: &CriticalPoint, y: f64, mu: f64) -> Result<LogValue> {
    check_args(y, mu)?;
    let a = cp.c2 * math::pow(cp.c3, -2.0 / 3.0) * mu;
    let s = series(y, a)?;
    Ok(s.mul_ln(math::ln(1.0 / 3.0) + (y - 2.0) / 3.0 * math::ln(cp.c3)))
}

pub fn big_b(cp: &CriticalPoint, y: f64, mu: f64) -> Result<f64> {
    Ok(ln_big_b(cp, y, mu)?.to_f64())
}

/// `ln A(y, μ)` for the Erdős–Rényi constants.
pub fn ln_big_a_classical(y: f64, mu: f64) -> Result<LogValue> {
    let b = ln_big_b(&CriticalPoint::ERDOS_RENYI, y, mu)?;
    Ok(b.mul_ln(-mu * mu * mu / 6.0))
}

pub fn big_a_classical(y: f64, mu: f64) -> Result<f64> {
    Ok(ln_big_a_classical(y, mu)?.to_f64())
}

/// The rescaled window parameter `ξ = 2C₂μ / (3C₃)^{2/3}`.
pub fn rescaled_mu(cp: &CriticalPoint, mu: f64) -> f64 {
    2.0 * cp.c2 * mu / math::pow(3.0 * cp.c3, 2.0 / 3.0)
}

pub fn ln_big_a_delta(cp: &CriticalPoint, y: f64, mu: f64, variant: Variant) -> Result<LogValue> {
    let ln_tz = math::ln(cp.t3 * cp.zhat);
    match variant {
        Variant::ScaledArgument => {
            let a = ln_big_a_classical(y, rescaled_mu(cp, mu))?;
            Ok(a.mul_ln((1.0 - y) * ln_tz + (y - 2.0) / 3.0 * math::ln(3.0 * cp.c3)))
        }
        Variant::PlainExponential => {
            let b = ln_big_b(cp, y, mu)?;
            Ok(b.mul_ln(-mu * mu * mu / 6.0 + (1.0 - y) * ln_tz))
        }
    }
}

pub fn big_a_delta(cp: &CriticalPoint, y: f64, mu: f64, variant: Variant) -> Result<f64> {
    Ok(ln_big_a_delta(cp, y, mu, variant)?.to_f64())
}

/// Two-term expansions of `A(y, μ)` for `μ → −∞` and `μ → +∞`.
pub fn big_a_asymptotic(y: f64, mu: f64, direction: Direction) -> Result<f64> {
    if !(math::abs(mu) >= 3.0) {
        return Err(Error::Precondition(format!("expansions need |μ| ≥ 3, got {mu}")));
    }
    match direction {
        Direction::Minus => {
            let m = math::abs(mu);
            let lead = 1.0 / (math::sqrt(2.0 * math::PI) * math::pow(m, y - 0.5));
            Ok(lead * (1.0 - (3.0 * y * y + 3.0 * y - 1.0) / (6.0 * m * m * m)))
        }
        Direction::Plus => {
            if mu < 0.0 {
                return Err(Error::Precondition(format!("the μ → +∞ expansion needs μ > 0, got {mu}")));
            }
            let pre = math::exp(-mu * mu * mu / 6.0) / (math::pow(2.0, y / 2.0) * math::pow(mu, 1.0 - y / 2.0));
            let bracket = math::rgamma(y / 2.0)
                + 4.0 * math::pow(mu, -1.5) * math::rgamma(y / 2.0 - 1.5) / (3.0 * math::sqrt(2.0));
            Ok(pre * bracket)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryPrediction {
    pub mu: f64,
    pub variant: Variant,
    pub q_max: usize,
    /// `P(total excess = q)`, `q = 0..=q_max`.
    pub excess_dist: Vec<f64>,
    pub survival: f64,
    pub planarity: f64,
    /// `P(q_max)`, the weight of the last retained term.
    pub tail_weight: f64,
    /// Mass beyond `q = 4`, outside the planar numerator.
    pub planar_truncation: f64,
}

impl TheoryPrediction {
    pub const TAIL_WARNING: f64 = 1e-6;

    pub fn truncation_warning(&self) -> bool {
        self.tail_weight > Self::TAIL_WARNING
    }

    pub fn excess(&self, q: usize) -> f64 {
        self.excess_dist.get(q).copied().unwrap_or(0.0)
    }
}

/// `ln(e_{q0} t₃^{2q} A_Δ(3q+½, μ))` for `q = 0..=q_max`.
fn ln_kernel_weights(cp: &CriticalPoint, mu: f64, variant: Variant, q_max: usize) -> Result<Vec<f64>> {
    (0..=q_max)
        .map(|q| {
            let a = ln_big_a_delta(cp, 3.0 * q as f64 + 0.5, mu, variant)?;
            if a.sign <= 0 {
                return Err(Error::Internal(format!("A_Δ({}.5, {mu}) is not positive", 3 * q)));
            }
            Ok(ln_rational(&wright_e(q as u32)) + 2.0 * q as f64 * math::ln(cp.t3) + a.ln_abs)
        })
        .collect()
}

/// Excess distribution of the complex part and the planarity probability,
/// both normalized over `q ≤ q_max`.
pub fn excess_distribution(
    cp: &CriticalPoint,
    mu: f64,
    variant: Variant,
    q_max: usize,
) -> Result<TheoryPrediction> {
    if q_max < 5 {
        return Err(Error::Precondition(format!("q_max must be at least 5, got {q_max}")));
    }
    let ln_w = ln_kernel_weights(cp, mu, variant, q_max)?;
    let ln_total = math::log_sum_exp(&ln_w);
    let excess_dist: Vec<f64> = ln_w.iter().map(|&l| math::exp(l - ln_total)).collect();
    let planarity: f64 = (0..=4)
        .map(|q| {
            let ratio = planar_c(q).expect("tabulated") / wright_e(q as u32);
            to_f64(&ratio) * excess_dist[q]
        })
        .collect::<CompensatedSum>()
        .value();
    let planar_truncation = excess_dist[5..].iter().copied().collect::<CompensatedSum>().value();
    Ok(TheoryPrediction {
        mu,
        variant,
        q_max,
        survival: excess_dist[0],
        tail_weight: excess_dist[q_max],
        planarity: planarity.min(1.0),
        planar_truncation,
        excess_dist,
    })
}

pub fn planarity_probability(cp: &CriticalPoint, mu: f64, variant: Variant) -> Result<f64> {
    Ok(excess_distribution(cp, mu, variant, 20)?.planarity)
}

/// Constants of the 2-path length `P ≈ n^{1/3} t₃ (B₁ ± λB₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPathConstants {
    pub b1: f64,
    /// `(2B(3q+5/2)B(3q+½) − B(3q+3/2)²) / B(3q+½)²`, the variance from
    /// `E P(P−1) ∼ 2 n^{2/3} t₃² B(3q+5/2)/B(3q+½)`.
    pub b2_squared: f64,
    /// `(B(3q+5/2)B(3q+½) − B(3q+3/2)²) / B(3q+½)²` as printed without the
    /// factor 2.
    pub b2_squared_printed: f64,
    /// `t₃ B₁`: the mean 2-path length divided by `n^{1/3}`.
    pub mean_factor: f64,
}

impl TwoPathConstants {
    pub fn b2(&self) -> f64 {
        math::sqrt(self.b2_squared.max(0.0))
    }
}

pub fn twopath_constants(cp: &CriticalPoint, mu: f64, q: u32) -> Result<TwoPathConstants> {
    let y0 = 3.0 * q as f64 + 0.5;
    let b0 = ln_big_b(cp, y0, mu)?;
    if b0.sign == 0 || !b0.ln_abs.is_finite() {
        return Err(Error::Singularity(format!("B_Δ({y0}, {mu}) vanishes")));
    }
    let b1 = ln_big_b(cp, y0 + 1.0, mu)?;
    let b2 = ln_big_b(cp, y0 + 2.0, mu)?;
    let ratio = |v: LogValue, times: f64| v.sign as f64 * math::exp(v.ln_abs - times * b0.ln_abs) * b0.sign as f64;
    let r1 = ratio(b1, 1.0);
    let r2 = ratio(b2, 1.0);
    Ok(TwoPathConstants {
        b1: r1,
        b2_squared: 2.0 * r2 - r1 * r1,
        b2_squared_printed: r2 - r1 * r1,
        mean_factor: cp.t3 * r1,
    })
}

/// Acceptance probability of one configuration pairing.
pub fn rejection_rate(phi1: f64) -> f64 {
    math::exp(-phi1 / 2.0 - phi1 * phi1 / 4.0)
}

pub fn expected_attempts(phi1: f64) -> f64 {
    1.0 / rejection_rate(phi1)
}

/// Raw and normalized differences between the two printed forms of `A_Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantReport {
    pub mu: f64,
    pub y: f64,
    pub xi: f64,
    pub scaled: f64,
    pub plain: f64,
    /// `|scaled − plain| / |scaled|`.
    pub relative_gap: f64,
    /// `ln(scaled/plain)`; equals `(μ³ − ξ³)/6` for every `y`.
    pub ln_ratio: f64,
    pub survival_scaled: f64,
    pub survival_plain: f64,
}

impl fmt::Display for VariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "μ = {:+}, y = {}: scaled-argument {:.9e}, plain-exponential {:.9e}, relative gap {:.3e} (ξ = {:.6}, ln ratio {:.6}); normalized survival {:.9} vs {:.9}",
            self.mu, self.y, self.scaled, self.plain, self.relative_gap, self.xi, self.ln_ratio,
            self.survival_scaled, self.survival_plain
        )
    }
}

pub fn variant_report(cp: &CriticalPoint, y: f64, mu: f64) -> Result<VariantReport> {
    let s = ln_big_a_delta(cp, y, mu, Variant::ScaledArgument)?;
    let p = ln_big_a_delta(cp, y, mu, Variant::PlainExponential)?;
    let scaled = s.to_f64();
    let plain = p.to_f64();
    let ln_ratio = s.ln_abs - p.ln_abs;
    let survival_scaled = excess_distribution(cp, mu, Variant::ScaledArgument, 20)?.survival;
    let survival_plain = excess_distribution(cp, mu, Variant::PlainExponential, 20)?.survival;
    Ok(VariantReport {
        mu,
        y,
        xi: rescaled_mu(cp, mu),
        scaled,
        plain,
        relative_gap: math::abs(1.0 - math::exp(-ln_ratio)),
        ln_ratio,
        survival_scaled,
        survival_plain,
    })
}

/// Describes the constants in one line.
pub fn describe(cp: &CriticalPoint) -> String {
    format!(
        "zhat={} alpha={} t3={} c2={} c3={} rho={}",
        cp.zhat, cp.alpha, cp.t3, cp.c2, cp.c3, cp.rho
    )
}
