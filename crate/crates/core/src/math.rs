//! Scalar helpers. Every transcendental call goes through `libm` so results
//! are bit-identical across platforms and between `std` and `no_std` builds.

pub use libm::{cos, exp, fabs as abs, lgamma, log as ln, pow, sin, sqrt, tgamma};

pub const PI: f64 = core::f64::consts::PI;
pub const LN_2: f64 = core::f64::consts::LN_2;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `ln(n!)`, exact table for small `n`.
pub fn ln_factorial(n: u32) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 20 {
        let mut f = 1u64;
        for k in 2..=n as u64 {
            f *= k;
        }
        return ln(f as f64);
    }
    lgamma(n as f64 + 1.0)
}

/// `log(Σ exp(xᵢ))`; returns `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: CompensatedSum = xs.iter().map(|&x| exp(x - max)).collect();
    max + ln(s.value())
}

/// Reciprocal Gamma function; exactly zero at the poles `0, -1, -2, …`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == libm::floor(x) {
        return 0.0;
    }
    if x > 171.0 {
        return exp(-lgamma(x));
    }
    1.0 / tgamma(x)
}

/// `(sign, ln|1/Γ(x)|)`; sign 0 at the poles `0, -1, -2, …`.
pub fn ln_rgamma(x: f64) -> (i8, f64) {
    if x <= 0.0 && x == libm::floor(x) {
        return (0, f64::NEG_INFINITY);
    }
    let (lg, sign) = libm::lgamma_r(x);
    (if sign < 0 { -1 } else { 1 }, -lg)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn round(x: f64) -> f64 {
    libm::round(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}
