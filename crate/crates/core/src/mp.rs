//! Fixed-point big-integer evaluation of
//!
//! ```text
//! S(y, a) = Σ_{k≥0} a^k / (k! Γ((y + 1 − 2k)/3))
//! ```
//!
//! for half-odd `y = j + ½`. For `a < 0` the terms grow to about
//! `e^{|ξ|³/6}` while the sum is about `e^{−|ξ|³/6}`, which no fixed-width
//! float survives. With `y = j + ½` every Gamma argument is an odd multiple
//! of ⅙, so the three residue classes `k mod 3` obey exact rational
//! recurrences seeded by Γ(⅙), Γ(½) and Γ(⅚).

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::float::FloatCore;
use num_traits::{One, Signed, Zero};

use crate::math;
use crate::{Error, Result};

/// A real number stored as `sign · e^{ln_abs}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: 0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::ZERO;
        }
        Self { sign: if x > 0.0 { 1 } else { -1 }, ln_abs: math::ln(math::abs(x)) }
    }

    /// May overflow to ±∞ or underflow to 0.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * math::exp(self.ln_abs)
    }

    pub fn mul_ln(self, ln_factor: f64) -> Self {
        if self.sign == 0 {
            return self;
        }
        Self { sign: self.sign, ln_abs: self.ln_abs + ln_factor }
    }
}

const MAX_PRECISION_BITS: u64 = 1 << 21;

fn shift(x: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        x << by as usize
    } else {
        x >> (-by) as usize
    }
}

/// `ln |x| − bits·ln 2` for a fixed-point value with `bits` fractional bits.
fn ln_abs_fixed(x: &BigInt, bits: u64) -> f64 {
    let len = x.bits();
    let drop = len.saturating_sub(60);
    let top = (x.abs() >> drop as usize).to_u64_digits().1;
    let mant = top.first().copied().unwrap_or(0) as f64;
    math::ln(mant) + (drop as f64 - bits as f64) * math::LN_2
}

/// `Γ(num/6) · 2^bits` for `num ∈ {1, 3, 5}`, via the lower incomplete
/// Gamma series `γ(s, N) = N^s e^{−N} Σ Nⁿ/(s)_{n+1}` with a cut-off `N`
/// large enough that the upper tail is below `2^{-bits}`.
pub fn gamma_sixth(num: u32, bits: u64) -> BigInt {
    assert!(matches!(num, 1 | 3 | 5));
    let guard = bits + 32;
    let cut = (((bits + 24) as f64) * math::LN_2) as u64 + 8;
    let n_big = BigInt::from(cut);

    let mut s1 = BigInt::zero();
    let mut term = (BigInt::from(6u32) << guard as usize) / BigInt::from(num);
    let mut n = 0u64;
    while !term.is_zero() {
        s1 += &term;
        n += 1;
        term = term * &n_big * 6u32 / BigInt::from(num as u64 + 6 * n);
    }

    let mut s2 = BigInt::zero();
    let mut term = BigInt::one() << guard as usize;
    let mut n = 0u64;
    while !term.is_zero() {
        s2 += &term;
        n += 1;
        term = term * &n_big / BigInt::from(n);
    }

    // N^{num/6} · 2^guard
    let radicand: BigUint = BigUint::from(cut).pow(num) << (6 * guard) as usize;
    let root = BigInt::from_biguint(Sign::Plus, radicand.nth_root(6));
    let value = root * s1 / s2;
    value >> (guard - bits) as usize
}

/// `2^bits / Γ(num/6)` for odd `num`.
pub fn rgamma_sixth(num: i64, bits: u64) -> BigInt {
    debug_assert!(num % 2 != 0);
    let base = num.rem_euclid(6);
    let steps = (num - base) / 6;
    let guard = bits + 32 + 4 * steps.unsigned_abs();
    let seed = gamma_sixth(base as u32, guard);
    let mut r = (BigInt::one() << (2 * guard) as usize) / seed;
    if steps >= 0 {
        for i in 0..steps {
            r = r * 6 / BigInt::from(base + 6 * i);
        }
    } else {
        for i in steps..0 {
            r = r * BigInt::from(base + 6 * i) / 6;
        }
    }
    r >> (guard - bits) as usize
}

/// Exact dyadic decomposition `x = mant · 2^exp`.
fn dyadic(x: f64) -> (BigInt, i64) {
    let (mant, exp, sign) = FloatCore::integer_decode(x);
    let m = BigInt::from(mant) * BigInt::from(sign);
    (m, exp as i64)
}

struct Attempt {
    sum: BigInt,
    terms: usize,
}

fn attempt(j: u32, a: f64, bits: u64, max_terms: usize, peak: usize) -> Result<Attempt> {
    let (am, ae) = dyadic(a);
    let a3 = &am * &am * &am;
    let num0 = 2 * j as i64 + 3;
    let guard = bits + 16;

    // Seeds t_0, t_1, t_2 at 2^bits.
    let mut t: [BigInt; 3] = Default::default();
    let mut apow = BigInt::one();
    let mut aexp = 0i64;
    for k in 0..3 {
        let rg = rgamma_sixth(num0 - 4 * k as i64, guard);
        let v = shift(rg * &apow, aexp - (guard - bits) as i64);
        t[k] = v / BigInt::from([1u32, 1, 2][k]);
        apow *= &am;
        aexp += ae;
    }

    let mut sum = BigInt::zero();
    let mut k = 0usize;
    let mut zeros = 0usize;
    loop {
        let r = k % 3;
        let term = &t[r];
        if term.is_zero() {
            zeros += 1;
        } else {
            zeros = 0;
            sum += term;
        }
        if zeros >= 3 && k > peak {
            break;
        }
        if k >= max_terms {
            return Err(Error::NonConvergence { terms: k });
        }
        // t_{k+3} = t_k · a³ (x−1)(x−2) / ((k+1)(k+2)(k+3)), x = num/6.
        let num = num0 - 4 * k as i64;
        let kk = k as u64;
        let factor = BigInt::from((num - 6) * (num - 12));
        let den = BigInt::from(36u64) * BigInt::from((kk + 1) * (kk + 2) * (kk + 3));
        let next = shift(&t[r] * &a3 * factor, 3 * ae);
        t[r] = next / den;
        k += 1;
    }
    Ok(Attempt { sum, terms: k })
}

/// Evaluates `S(j + ½, a)` in log form.
///
/// `ln_max` is an estimate of `ln max_k |a^k/(k!Γ(·))|`, `ln_min_seed`
/// of `ln min(|t₀|, |t₁|, |t₂|)`; both only steer the working precision.
pub fn half_odd_series(j: u32, a: f64, ln_max: f64, ln_min_seed: f64) -> Result<LogValue> {
    if !(a.is_finite() && ln_max.is_finite() && !ln_min_seed.is_nan()) {
        return Err(Error::Domain("series argument must be finite".into()));
    }
    let y = j as f64 + 0.5;
    let peak = (4.0 * math::abs(a * a * a) / 9.0) as usize + 3;
    let max_terms = 4 * peak + 2000;
    let lmax_bits = (ln_max.max(0.0) / math::LN_2) as u64;
    let seed_loss = ((-ln_min_seed).clamp(0.0, 1e7) / math::LN_2) as u64;
    let mut bits = lmax_bits + seed_loss + 128;
    let mut tries = 0;
    loop {
        if bits > MAX_PRECISION_BITS || tries > 8 {
            return Err(Error::PrecisionLoss { y, mu: a });
        }
        tries += 1;
        let Attempt { sum, terms } = attempt(j, a, bits, max_terms, peak)?;
        if sum.is_zero() {
            bits = 2 * bits + 64;
            continue;
        }
        let ln_sum = ln_abs_fixed(&sum, bits);
        let lost = (ln_max.max(0.0) - ln_sum) / math::LN_2;
        let needed = lost + seed_loss as f64 + 2.0 * math::ln((terms + 1) as f64) / math::LN_2 + 64.0;
        if needed > bits as f64 {
            bits = needed as u64 + 32;
            continue;
        }
        let sign = if sum.is_negative() { -1 } else { 1 };
        return Ok(LogValue { sign, ln_abs: ln_sum });
    }
}

/// Terms `ln|t_k|` and signs of the series in double precision, for
/// `k ≤ count`. Pole terms carry sign 0.
pub fn log_terms(y: f64, a: f64, count: usize) -> Vec<(i8, f64)> {
    let ln_a = math::ln(math::abs(a));
    let neg = a < 0.0;
    (0..=count)
        .map(|k| {
            let (mut sign, ln_rg) = math::ln_rgamma((y + 1.0 - 2.0 * k as f64) / 3.0);
            if sign == 0 || (a == 0.0 && k > 0) {
                return (0, f64::NEG_INFINITY);
            }
            let ln_ak = if k == 0 { 0.0 } else { k as f64 * ln_a };
            if neg && k % 2 == 1 {
                sign = -sign;
            }
            (sign, ln_ak - math::ln_factorial(k as u32) + ln_rg)
        })
        .collect()
}
