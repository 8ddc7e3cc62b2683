//! Seeded parallel Monte Carlo runs over a grid of window parameters.

use degcrit_core::critical::{critical_point, CriticalPoint};
use degcrit_core::degset::DegreeSet;
use degcrit_core::sampler::{edges_for_mu, realized_mu, trial_rng, Sampler};
use degcrit_core::stats::{summarize, GraphSummary};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Points};

/// One sampled graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    /// Global trial index; also selects the random stream.
    pub trial: u64,
    pub n: usize,
    pub m: u64,
    pub realized_mu: f64,
    pub attempts: u64,
    pub largest_component: usize,
    pub largest_excess: i64,
    pub total_excess: i64,
    pub complex_size: usize,
    pub complex_diameter: Option<usize>,
    pub complex_longest_path: Option<usize>,
    pub complex_circumference: Option<usize>,
    pub planar: bool,
}

impl TrialRow {
    pub fn new(trial: u64, n: usize, m: u64, realized_mu: f64, s: &GraphSummary) -> Self {
        Self {
            trial,
            n,
            m,
            realized_mu,
            attempts: s.attempts,
            largest_component: s.largest_component,
            largest_excess: s.largest_excess,
            total_excess: s.total_excess,
            complex_size: s.complex_size,
            complex_diameter: s.complex_diameter,
            complex_longest_path: s.complex_longest_path,
            complex_circumference: s.complex_circumference,
            planar: s.planar,
        }
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            largest_component: self.largest_component,
            largest_excess: self.largest_excess,
            total_excess: self.total_excess,
            complex_size: self.complex_size,
            complex_diameter: self.complex_diameter,
            complex_longest_path: self.complex_longest_path,
            complex_circumference: self.complex_circumference,
            planar: self.planar,
            attempts: self.attempts,
        }
    }
}

/// NaN is written as JSON `null` and read back as NaN.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Mean {
    pub count: u64,
    #[serde(with = "nan_as_null")]
    pub mean: f64,
    #[serde(with = "nan_as_null")]
    pub se: f64,
}

impl Mean {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let count = v.len() as u64;
        if count == 0 {
            return Self { count, mean: f64::NAN, se: f64::NAN };
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let se = if count > 1 {
            let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            f64::NAN
        };
        Self { count, mean, se }
    }

    /// Equality with NaN matching NaN.
    pub fn same_as(&self, other: &Self) -> bool {
        self.count == other.count && same(self.mean, other.mean) && same(self.se, other.se)
    }
}

/// Per-point aggregates, recomputable from the rows alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: u64,
    pub no_complex: u64,
    #[serde(with = "nan_as_null")]
    pub p_no_complex: f64,
    /// Counts of the total excess of the complex part, `q = 0, 1, …`.
    pub excess_histogram: Vec<u64>,
    pub nonplanar: u64,
    #[serde(with = "nan_as_null")]
    pub p_nonplanar: f64,
    pub attempts: Mean,
    /// Means over trials with a complex part.
    pub diameter: Mean,
    pub longest_path: Mean,
    pub circumference: Mean,
    pub complex_size: Mean,
}

impl Aggregates {
    pub fn from_rows(rows: &[TrialRow]) -> Self {
        let trials = rows.len() as u64;
        let no_complex = rows.iter().filter(|r| r.complex_size == 0).count() as u64;
        let top = rows.iter().map(|r| r.total_excess.max(0) as usize).max().unwrap_or(0);
        let mut excess_histogram = vec![0u64; if rows.is_empty() { 0 } else { top + 1 }];
        for r in rows {
            excess_histogram[r.total_excess.max(0) as usize] += 1;
        }
        let nonplanar = rows.iter().filter(|r| !r.planar).count() as u64;
        let frac = |k: u64| if trials == 0 { f64::NAN } else { k as f64 / trials as f64 };
        let complex: Vec<&TrialRow> = rows.iter().filter(|r| r.complex_size > 0).collect();
        let stat = |f: fn(&TrialRow) -> Option<usize>| Mean::of(complex.iter().filter_map(|r| f(r)).map(|x| x as f64));
        Self {
            trials,
            no_complex,
            p_no_complex: frac(no_complex),
            excess_histogram,
            nonplanar,
            p_nonplanar: frac(nonplanar),
            attempts: Mean::of(rows.iter().map(|r| r.attempts as f64)),
            diameter: stat(|r| r.complex_diameter),
            longest_path: stat(|r| r.complex_longest_path),
            circumference: stat(|r| r.complex_circumference),
            complex_size: Mean::of(complex.iter().map(|r| r.complex_size as f64)),
        }
    }

    /// Equality with NaN matching NaN.
    pub fn same_as(&self, o: &Self) -> bool {
        self.trials == o.trials
            && self.no_complex == o.no_complex
            && same(self.p_no_complex, o.p_no_complex)
            && self.excess_histogram == o.excess_histogram
            && self.nonplanar == o.nonplanar
            && same(self.p_nonplanar, o.p_nonplanar)
            && self.attempts.same_as(&o.attempts)
            && self.diameter.same_as(&o.diameter)
            && self.longest_path.same_as(&o.longest_path)
            && self.circumference.same_as(&o.circumference)
            && self.complex_size.same_as(&o.complex_size)
    }

    pub fn excess_count(&self, q: usize) -> u64 {
        self.excess_histogram.get(q).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    /// Requested window parameter, when the grid is given in μ.
    pub mu: Option<f64>,
    pub m: u64,
    #[serde(with = "nan_as_null")]
    pub realized_mu: f64,
    pub rows: Vec<TrialRow>,
    pub aggregates: Aggregates,
    /// Set when the point could not be run; earlier points are kept.
    pub error: Option<String>,
    #[serde(default)]
    pub infeasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub config: ExperimentConfig,
    pub alpha: f64,
    pub points: Vec<PointResult>,
}

impl ResultTable {
    pub fn rows(&self) -> impl Iterator<Item = &TrialRow> {
        self.points.iter().flat_map(|p| p.rows.iter())
    }

    pub fn has_errors(&self) -> bool {
        self.points.iter().any(|p| p.error.is_some())
    }

    pub fn has_infeasible(&self) -> bool {
        self.points.iter().any(|p| p.infeasible)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Core(#[from] degcrit_core::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn failed_point(mu: Option<f64>, m: u64, realized: f64, e: degcrit_core::Error) -> PointResult {
    PointResult {
        mu,
        m,
        realized_mu: realized,
        rows: Vec::new(),
        aggregates: Aggregates::from_rows(&[]),
        infeasible: matches!(e, degcrit_core::Error::Infeasible(_)),
        error: Some(e.to_string()),
    }
}

/// Samples and summarizes `trials` graphs on one `(n, m)`; trial `t` uses
/// stream `first + t`.
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    ds: &DegreeSet,
    n: usize,
    m: u64,
    realized: f64,
    seed: u64,
    first: u64,
    trials: u64,
    max_attempts: u64,
) -> Result<Vec<TrialRow>, degcrit_core::Error> {
    let mut sampler = Sampler::new(ds, n, m as usize)?;
    sampler.max_attempts = max_attempts;
    (first..first + trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (g, attempts) = sampler.sample(&mut rng)?;
            let s = summarize(&g, attempts)?;
            Ok(TrialRow::new(trial, n, m, realized, &s))
        })
        .collect()
}

/// Requested μ (if any) and the resolved `(m, realized μ)`.
type Target = (Option<f64>, Result<(u64, f64), degcrit_core::Error>);

fn run_points(cfg: &ExperimentConfig, ds: &DegreeSet, cp: &CriticalPoint) -> Vec<PointResult> {
    let targets: Vec<Target> = match &cfg.points {
        Points::Mu(mus) => mus
            .iter()
            .map(|&mu| (Some(mu), edges_for_mu(ds, cp, cfg.n as u64, mu).map(|t| (t.m, t.realized_mu))))
            .collect(),
        Points::M(ms) => ms.iter().map(|&m| (None, Ok((m, realized_mu(cp.alpha, cfg.n as u64, m))))).collect(),
    };
    targets
        .into_iter()
        .enumerate()
        .map(|(k, (mu, target))| {
            let (m, realized) = match target {
                Ok(t) => t,
                Err(e) => return failed_point(mu, 0, f64::NAN, e),
            };
            let first = k as u64 * cfg.trials;
            match run_trials(ds, cfg.n, m, realized, cfg.seed, first, cfg.trials, cfg.max_attempts) {
                Ok(rows) => PointResult {
                    mu,
                    m,
                    realized_mu: realized,
                    aggregates: Aggregates::from_rows(&rows),
                    rows,
                    error: None,
                    infeasible: false,
                },
                Err(e) => failed_point(mu, m, realized, e),
            }
        })
        .collect()
}

/// Runs every point of the grid. Output is identical for any number of
/// worker threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable, ExperimentError> {
    cfg.validate()?;
    let ds = cfg.degree_set()?;
    let cp = critical_point(&ds)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    let points = pool.install(|| run_points(cfg, &ds, &cp));
    Ok(ResultTable { config: cfg.clone(), alpha: cp.alpha, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_from_rows() {
        let s = |excess: i64, size: usize, d: Option<usize>, planar: bool| GraphSummary {
            largest_component: 10,
            largest_excess: excess.max(0),
            total_excess: excess,
            complex_size: size,
            complex_diameter: d,
            complex_longest_path: d,
            complex_circumference: d.map(|x| x + 1),
            planar,
            attempts: 2,
        };
        let rows = vec![
            TrialRow::new(0, 20, 15, 0.0, &s(0, 0, None, true)),
            TrialRow::new(1, 20, 15, 0.0, &s(2, 8, Some(4), true)),
            TrialRow::new(2, 20, 15, 0.0, &s(3, 9, Some(6), false)),
        ];
        let a = Aggregates::from_rows(&rows);
        assert_eq!(a.no_complex, 1);
        assert_eq!(a.excess_histogram, vec![1, 0, 1, 1]);
        assert_eq!(a.nonplanar, 1);
        assert_eq!(a.diameter.count, 2);
        assert!((a.diameter.mean - 5.0).abs() < 1e-15);
        assert!((a.diameter.se - 1.0).abs() < 1e-15);
        assert!(Aggregates::from_rows(&[]).excess_histogram.is_empty());
    }

    #[test]
    fn infeasible_point_keeps_others() {
        let cfg = ExperimentConfig {
            degrees: "1,3".into(),
            n: 50,
            points: Points::M(vec![30, 500]),
            trials: 4,
            ..Default::default()
        };
        let t = run_experiment(&cfg).unwrap();
        assert_eq!(t.points[0].rows.len(), 4);
        assert!(t.points[1].infeasible);
        assert!(t.has_infeasible());
    }
}
