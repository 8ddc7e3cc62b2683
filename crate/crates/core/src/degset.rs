//! The degree set Δ and its exponential generating function
//! `ω(z) = Σ_{d∈Δ} z^d / d!`.
//!
//! Text grammar accepted by [`DegreeSet::parse`]:
//!
//! ```text
//! spec  := rule | items
//! rule  := name [":" bound]          name ∈ {all, pow2, odd, even}
//! items := item ("," item)*
//! item  := int | int ".." int        ranges are inclusive
//! ```
//!
//! Rule-based sets stand for infinite sets truncated at `bound` (default 60).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::math::{self, CompensatedSum};
use crate::{Error, Result};

const DEFAULT_BOUND: u32 = 60;
const STABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeRule {
    /// All non-negative integers.
    All,
    /// `{1, 2, 4, 8, …}`.
    PowersOfTwo,
    /// Odd integers.
    Odd,
    /// Even integers (never valid on its own, since 1 is missing).
    Even,
}

impl DegreeRule {
    fn contains(self, d: u32) -> bool {
        match self {
            DegreeRule::All => true,
            DegreeRule::PowersOfTwo => d.is_power_of_two(),
            DegreeRule::Odd => d % 2 == 1,
            DegreeRule::Even => d.is_multiple_of(2),
        }
    }

    fn name(self) -> &'static str {
        match self {
            DegreeRule::All => "all",
            DegreeRule::PowersOfTwo => "pow2",
            DegreeRule::Odd => "odd",
            DegreeRule::Even => "even",
        }
    }

    fn materialize(self, bound: u32) -> Vec<u32> {
        (0..=bound).filter(|&d| self.contains(d)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSet {
    degrees: Vec<u32>,
    rule: Option<DegreeRule>,
    bound: u32,
    /// Rule materialized to twice the bound; used for truncation checks.
    doubled: Vec<u32>,
}

/// Outcome of checking the feasibility condition on `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionC {
    pub periodicity: u64,
    /// `min(Δ)·n < 2m`
    pub above_min: bool,
    /// `2m < max(Δ)·n`
    pub below_max: bool,
    /// `p | 2m − n·min(Δ)`
    pub divisible: bool,
}

impl ConditionC {
    pub fn holds(&self) -> bool {
        self.above_min && self.below_max && self.divisible
    }
}

impl fmt::Display for ConditionC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds() {
            return write!(f, "pass");
        }
        let mut failures = Vec::new();
        if !self.above_min {
            failures.push("2m ≤ n·min(Δ)".to_string());
        }
        if !self.below_max {
            failures.push("2m ≥ n·max(Δ)".to_string());
        }
        if !self.divisible {
            failures.push(format!("{} does not divide 2m − n·min(Δ)", self.periodicity));
        }
        write!(f, "fail: {}", failures.join("; "))
    }
}

impl DegreeSet {
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let err = |reason: &str| Error::Parse { spec: spec.to_string(), reason: reason.to_string() };
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if s.starts_with(|c: char| c.is_ascii_alphabetic()) {
            let (name, bound) = match s.split_once(':') {
                Some((n, b)) => (n.trim(), b.trim().parse::<u32>().map_err(|_| err("bad bound"))?),
                None => (s, DEFAULT_BOUND),
            };
            let rule = match name {
                "all" => DegreeRule::All,
                "pow2" | "powers-of-two" => DegreeRule::PowersOfTwo,
                "odd" => DegreeRule::Odd,
                "even" => DegreeRule::Even,
                _ => return Err(err("unknown rule")),
            };
            return Self::from_rule(rule, bound);
        }
        let mut degrees = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            if item.is_empty() {
                return Err(err("empty item"));
            }
            if let Some((a, b)) = item.split_once("..") {
                let a: u32 = a.trim().parse().map_err(|_| err("bad range start"))?;
                let b: u32 = b.trim().parse().map_err(|_| err("bad range end"))?;
                if a > b {
                    return Err(err("empty range"));
                }
                degrees.extend(a..=b);
            } else {
                degrees.push(item.parse().map_err(|_| err("bad integer"))?);
            }
        }
        Self::from_degrees(&degrees)
    }

    /// Finite explicit set; the input is sorted and deduplicated.
    pub fn from_degrees(degrees: &[u32]) -> Result<Self> {
        let mut degrees = degrees.to_vec();
        degrees.sort_unstable();
        degrees.dedup();
        validate(&degrees)?;
        Ok(Self { doubled: degrees.clone(), degrees, rule: None, bound: 0 })
    }

    pub fn from_rule(rule: DegreeRule, bound: u32) -> Result<Self> {
        let degrees = rule.materialize(bound);
        validate(&degrees)?;
        let doubled = rule.materialize(bound.saturating_mul(2));
        Ok(Self { degrees, rule: Some(rule), bound, doubled })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn rule(&self) -> Option<DegreeRule> {
        self.rule
    }

    /// Largest retained degree for rule-based sets, 0 for explicit sets.
    pub fn truncation_bound(&self) -> u32 {
        self.bound
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees[0]
    }

    pub fn max_degree(&self) -> u32 {
        *self.degrees.last().unwrap()
    }

    pub fn contains(&self, d: u32) -> bool {
        self.degrees.binary_search(&d).is_ok()
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// `ω^{(order)}(z)` on the materialized degrees, no truncation check.
    pub fn omega(&self, z: f64, order: u32) -> f64 {
        eval_real(&self.degrees, z, order)
    }

    pub fn omega_complex(&self, z: Complex64, order: u32) -> Complex64 {
        let top = match self.degrees.last() {
            Some(&d) if d >= order => d - order,
            _ => return Complex64::new(0.0, 0.0),
        };
        let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
        let mut term = Complex64::new(1.0, 0.0);
        let mut idx = self.degrees.partition_point(|&d| d < order);
        for k in 0..=top {
            if k > 0 {
                term = term * z / k as f64;
            }
            if idx < self.degrees.len() && self.degrees[idx] == k + order {
                re.add(term.re);
                im.add(term.im);
                idx += 1;
            }
        }
        Complex64::new(re.value(), im.value())
    }

    /// `ω^{(order)}(z)` for `z ≥ 0`. Rule-based sets are checked against
    /// the set truncated at twice the bound.
    pub fn egf_eval(&self, z: f64, order: u32) -> Result<f64> {
        if !(z >= 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("ω evaluated at z = {z}")));
        }
        let v = self.omega(z, order);
        self.check_stable(z, order, v)?;
        Ok(v)
    }

    /// Fails when doubling the truncation bound moves `ω^{(order)}(z)` by
    /// more than 1e-12 relative. Always passes for explicit sets.
    pub fn check_stable(&self, z: f64, order: u32, value: f64) -> Result<()> {
        if self.rule.is_none() {
            return Ok(());
        }
        let wide = eval_real(&self.doubled, z, order);
        let change = if wide == 0.0 { 0.0 } else { math::abs(wide - value) / math::abs(wide) };
        if !(change <= STABILITY_TOL) {
            return Err(Error::TruncationUnstable { bound: self.bound, z, change });
        }
        Ok(())
    }

    /// The characteristic function `φ₀(z) = z ω'(z) / ω(z)`.
    pub fn phi0(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("φ₀ needs z > 0, got {z}")));
        }
        Ok(z * self.omega(z, 1) / self.omega(z, 0))
    }

    /// `φ₁(z) = z ω''(z) / ω'(z)`, the characteristic function of `ω'`.
    pub fn phi1(&self, z: f64) -> Result<f64> {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("φ₁ needs z > 0, got {z}")));
        }
        Ok(z * self.omega(z, 2) / self.omega(z, 1))
    }

    /// gcd of all pairwise degree differences.
    pub fn periodicity(&self) -> u64 {
        let d0 = self.degrees[0] as u64;
        self.degrees.iter().fold(0, |g, &d| math::gcd(g, d as u64 - d0)).max(1)
    }

    pub fn check_condition_c(&self, n: u64, m: u64) -> ConditionC {
        let p = self.periodicity();
        let two_m = 2 * m as i128;
        let lo = self.min_degree() as i128 * n as i128;
        let hi = self.max_degree() as i128 * n as i128;
        ConditionC {
            periodicity: p,
            above_min: lo < two_m,
            below_max: two_m < hi,
            divisible: (two_m - lo).rem_euclid(p as i128) == 0,
        }
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Some(r) => write!(f, "{}:{}", r.name(), self.bound),
            None => {
                let parts: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

fn validate(degrees: &[u32]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::EmptySet);
    }
    if degrees.binary_search(&1).is_err() {
        let parts: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
        return Err(Error::MissingOne(format!("{{{}}}", parts.join(","))));
    }
    let max = *degrees.last().unwrap();
    if max <= 2 {
        return Err(Error::NoLargeDegree(max));
    }
    Ok(())
}

fn eval_real(degrees: &[u32], z: f64, order: u32) -> f64 {
    let top = match degrees.last() {
        Some(&d) if d >= order => d - order,
        _ => return 0.0,
    };
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    let mut idx = degrees.partition_point(|&d| d < order);
    for k in 0..=top {
        if k > 0 {
            term *= z / k as f64;
        }
        if idx < degrees.len() && degrees[idx] == k + order {
            sum.add(term);
            idx += 1;
        }
    }
    sum.value()
}
