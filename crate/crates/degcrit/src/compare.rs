//! Empirical aggregates against the asymptotic predictions.

use std::fmt;

use degcrit_core::asymptotics::{excess_distribution, Variant};
use degcrit_core::critical::CriticalPoint;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::experiment::{Aggregates, ResultTable};

/// Absolute slack added to 3σ, covering finite-size corrections.
pub const SLACK: f64 = 0.02;
pub const MIN_TRIALS: u64 = 1000;
/// Excess values compared bin by bin; larger ones share a tail bin.
pub const EXCESS_BINS: usize = 5;

/// An observed frequency against a predicted probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub observed: u64,
    pub trials: u64,
    pub empirical: f64,
    pub predicted: f64,
    /// Binomial standard deviation of the frequency under the prediction.
    pub sigma: f64,
    pub z: f64,
}

impl Proportion {
    pub fn new(observed: u64, trials: u64, predicted: f64) -> Self {
        let empirical = observed as f64 / trials as f64;
        let sigma = (predicted * (1.0 - predicted) / trials as f64).sqrt();
        let z = if sigma > 0.0 { (empirical - predicted) / sigma } else { f64::NAN };
        Self { observed, trials, empirical, predicted, sigma, z }
    }

    /// `|empirical − predicted| ≤ 3σ + slack`.
    pub fn within(&self, slack: f64) -> bool {
        (self.empirical - self.predicted).abs() <= 3.0 * self.sigma + slack
    }
}

impl fmt::Display for Proportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4} observed ({}/{}), {:.4} predicted, z = {:+.2}",
            self.empirical, self.observed, self.trials, self.predicted, self.z
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquare {
    /// Bin labels, e.g. `"0"` or `"≥5"`.
    pub bins: Vec<String>,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson χ² with expected counts below 5 merged into their neighbour.
pub fn chi_square(labels: &[String], observed: &[u64], probabilities: &[f64]) -> ChiSquare {
    let total: u64 = observed.iter().sum();
    let mut bins: Vec<(String, u64, f64)> = labels
        .iter()
        .zip(observed)
        .zip(probabilities)
        .map(|((l, &o), &p)| (l.clone(), o, p * total as f64))
        .collect();
    while bins.len() > 2 {
        let Some(i) = bins.iter().rposition(|b| b.2 < 5.0) else { break };
        let j = if i == 0 { 1 } else { i - 1 };
        let (lo, hi) = (i.min(j), i.max(j));
        let merged = bins.remove(hi);
        let b = &mut bins[lo];
        b.0 = format!("{}+{}", b.0, merged.0);
        b.1 += merged.1;
        b.2 += merged.2;
    }
    let statistic: f64 = bins.iter().map(|b| (b.1 as f64 - b.2).powi(2) / b.2).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN);
    ChiSquare {
        bins: bins.iter().map(|b| b.0.clone()).collect(),
        observed: bins.iter().map(|b| b.1).collect(),
        expected: bins.iter().map(|b| b.2).collect(),
        statistic,
        dof,
        p_value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointComparison {
    pub mu: Option<f64>,
    pub realized_mu: f64,
    pub variant: String,
    pub survival: Proportion,
    pub nonplanarity: Proportion,
    pub excess: ChiSquare,
    pub warnings: Vec<String>,
}

impl PointComparison {
    pub fn passes(&self, slack: f64, min_p: f64) -> bool {
        self.survival.within(slack) && self.nonplanarity.within(slack) && self.excess.p_value > min_p
    }
}

impl fmt::Display for PointComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "μ = {:.6} ({} variant)", self.realized_mu, self.variant)?;
        writeln!(f, "  no complex part: {}", self.survival)?;
        writeln!(f, "  non-planar:      {}", self.nonplanarity)?;
        writeln!(
            f,
            "  excess χ² = {:.3} on {} dof, p = {:.4} (bins {})",
            self.excess.statistic,
            self.excess.dof,
            self.excess.p_value,
            self.excess.bins.join(" ")
        )?;
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

/// Compares one point's aggregates with the prediction at `mu`.
pub fn compare_point(
    agg: &Aggregates,
    cp: &CriticalPoint,
    mu: f64,
    variant: Variant,
    q_max: usize,
) -> degcrit_core::Result<PointComparison> {
    let pred = excess_distribution(cp, mu, variant, q_max)?;
    let mut warnings = Vec::new();
    if agg.trials < MIN_TRIALS {
        warnings.push(format!("only {} trials (at least {MIN_TRIALS} advised)", agg.trials));
    }
    if pred.truncation_warning() {
        warnings.push(format!("excess series truncated at q = {} with weight {:.2e}", q_max, pred.tail_weight));
    }
    let mut labels: Vec<String> = (0..EXCESS_BINS).map(|q| q.to_string()).collect();
    labels.push(format!("≥{EXCESS_BINS}"));
    let mut observed: Vec<u64> = (0..EXCESS_BINS).map(|q| agg.excess_count(q)).collect();
    observed.push(agg.excess_histogram.iter().skip(EXCESS_BINS).sum());
    let mut probs: Vec<f64> = (0..EXCESS_BINS).map(|q| pred.excess(q)).collect();
    probs.push((1.0 - probs.iter().sum::<f64>()).max(0.0));
    Ok(PointComparison {
        mu: None,
        realized_mu: mu,
        variant: variant.to_string(),
        survival: Proportion::new(agg.no_complex, agg.trials, pred.survival),
        nonplanarity: Proportion::new(agg.nonplanar, agg.trials, 1.0 - pred.planarity),
        excess: chi_square(&labels, &observed, &probs),
        warnings,
    })
}

/// Compares every successful point at its realized μ.
pub fn compare_theory(
    table: &ResultTable,
    cp: &CriticalPoint,
    variant: Variant,
    q_max: usize,
) -> degcrit_core::Result<Vec<PointComparison>> {
    table
        .points
        .iter()
        .filter(|p| p.error.is_none() && !p.rows.is_empty())
        .map(|p| {
            let mut c = compare_point(&p.aggregates, cp, p.realized_mu, variant, q_max)?;
            c.mu = p.mu;
            Ok(c)
        })
        .collect()
}

/// Ratio of mean complex-part diameters between two sizes, against
/// `(n_large/n_small)^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingReport {
    pub n_small: usize,
    pub n_large: usize,
    pub mean_small: f64,
    pub mean_large: f64,
    pub ratio: f64,
    /// Delta-method standard error of the ratio.
    pub ratio_se: f64,
    pub expected: f64,
    pub samples_small: u64,
    pub samples_large: u64,
}

impl ScalingReport {
    pub fn within(&self, tol: f64) -> bool {
        (self.ratio - self.expected).abs() <= tol
    }
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mean diameter {:.3} (n = {}, {} graphs) → {:.3} (n = {}, {} graphs): ratio {:.3} ± {:.3}, expected {:.3}",
            self.mean_small,
            self.n_small,
            self.samples_small,
            self.mean_large,
            self.n_large,
            self.samples_large,
            self.ratio,
            self.ratio_se,
            self.expected
        )
    }
}

pub fn diameter_scaling(small: &Aggregates, n_small: usize, large: &Aggregates, n_large: usize) -> ScalingReport {
    let (a, b) = (small.diameter, large.diameter);
    let ratio = b.mean / a.mean;
    let ratio_se = ratio * ((a.se / a.mean).powi(2) + (b.se / b.mean).powi(2)).sqrt();
    ScalingReport {
        n_small,
        n_large,
        mean_small: a.mean,
        mean_large: b.mean,
        ratio,
        ratio_se,
        expected: (n_large as f64 / n_small as f64).cbrt(),
        samples_small: a.count,
        samples_large: b.count,
    }
}
