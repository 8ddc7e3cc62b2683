//! Recursive sampler for graphs with degrees in Δ: a weight table over
//! `(vertices, half-edges)`, degree sequences drawn last vertex first,
//! configuration pairing and rejection until simple.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::critical::CriticalPoint;
use crate::degset::DegreeSet;
use crate::graph::Graph;
use crate::math;
use crate::{Error, Result};

pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000;

/// Generator for one trial. The stream is selected by the trial index, so
/// results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Edge count for a target window parameter, after the feasibility
/// adjustment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeTarget {
    pub m: u64,
    /// `round(αn(1 + μn^{−1/3}))` before adjustment.
    pub raw_m: i64,
    /// `(m/(αn) − 1)·n^{1/3}`.
    pub realized_mu: f64,
}

impl EdgeTarget {
    pub fn adjusted(&self) -> bool {
        self.m as i64 != self.raw_m
    }
}

pub fn realized_mu(alpha: f64, n: u64, m: u64) -> f64 {
    let n = n as f64;
    (m as f64 / (alpha * n) - 1.0) * math::cbrt(n)
}

/// Rounds `αn(1 + μn^{−1/3})` and moves it by the smallest shift of at most
/// the periodicity that satisfies the feasibility condition (ties go up).
pub fn edges_for_mu(ds: &DegreeSet, cp: &CriticalPoint, n: u64, mu: f64) -> Result<EdgeTarget> {
    if n == 0 {
        return Err(Error::Infeasible("n must be positive".into()));
    }
    let nf = n as f64;
    let target = cp.alpha * nf * (1.0 + mu / math::cbrt(nf));
    if !target.is_finite() {
        return Err(Error::Domain(format!("μ = {mu}")));
    }
    let raw_m = math::round(target) as i64;
    let p = ds.periodicity() as i64;
    for step in 0..=p {
        for delta in [step, -step] {
            let m = raw_m + delta;
            if m >= 0 && ds.check_condition_c(n, m as u64).holds() {
                return Ok(EdgeTarget { m: m as u64, raw_m, realized_mu: realized_mu(cp.alpha, n, m as u64) });
            }
            if step == 0 {
                break;
            }
        }
    }
    let cond = ds.check_condition_c(n, raw_m.max(0) as u64);
    Err(Error::Infeasible(format!(
        "no m within {p} of {raw_m} satisfies the feasibility condition for n = {n} ({cond})"
    )))
}

/// Log-weights `ln S_{i,j}`, where `S_{i,j} = Σ_{d∈Δ} S_{i−1,j−d}/d!` and
/// `S_{0,0} = 1`. Only entries that can lie on a path to `(n, 2m)` are
/// stored; all others read as `−∞`.
#[derive(Debug, Clone)]
pub struct DpTable {
    n: usize,
    two_m: usize,
    degrees: Vec<usize>,
    ln_inv_fact: Vec<f64>,
    /// First stored column of each row.
    lo: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl DpTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn two_m(&self) -> usize {
        self.two_m
    }

    /// `ln S_{i,j}`, or `−∞` for zero weight.
    pub fn log_weight(&self, i: usize, j: usize) -> f64 {
        if i > self.n || j < self.lo[i] {
            return f64::NEG_INFINITY;
        }
        self.rows[i].get(j - self.lo[i]).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn is_feasible(&self) -> bool {
        self.log_weight(self.n, self.two_m) > f64::NEG_INFINITY
    }

    /// Number of stored cells.
    pub fn cells(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Distribution of the degree of vertex `i` given that vertices
    /// `1..=i` carry `j` half-edges: `P(d = k) = S_{i−1,j−k}/(k!·S_{i,j})`,
    /// renormalized. Entries are `(degree, probability)`.
    pub fn last_degree_distribution(&self, i: usize, j: usize) -> Result<Vec<(u32, f64)>> {
        if i == 0 {
            return Err(Error::Domain("distribution needs i ≥ 1".into()));
        }
        let total = self.log_weight(i, j);
        if total == f64::NEG_INFINITY {
            return Err(Error::Internal(format!("S_{{{i},{j}}} has zero weight")));
        }
        let mut out = Vec::with_capacity(self.degrees.len());
        let mut sum = 0.0;
        for (k, &d) in self.degrees.iter().enumerate() {
            if d > j {
                break;
            }
            let lw = self.log_weight(i - 1, j - d);
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let p = math::exp(lw + self.ln_inv_fact[k] - total);
            sum += p;
            out.push((d as u32, p));
        }
        if out.is_empty() || !(sum > 0.0) {
            return Err(Error::Internal(format!("no degree has positive weight at ({i}, {j})")));
        }
        for o in &mut out {
            o.1 /= sum;
        }
        Ok(out)
    }
}

/// Fills the weight table in log space.
pub fn build_dp(ds: &DegreeSet, n: usize, two_m: usize) -> Result<DpTable> {
    let degrees: Vec<usize> = ds.degrees().iter().map(|&d| d as usize).collect();
    let dmin = degrees[0];
    let dmax = *degrees.last().expect("non-empty degree set");
    if two_m > n.saturating_mul(dmax) {
        return Err(Error::Infeasible(format!("2m = {two_m} exceeds n·max(Δ) = {}", n * dmax)));
    }
    let ln_inv_fact: Vec<f64> = degrees.iter().map(|&d| -math::ln_factorial(d as u32)).collect();
    let mut lo = Vec::with_capacity(n + 1);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut terms = Vec::with_capacity(degrees.len());
    for i in 0..=n {
        // Reachable from (0,0) and able to reach (n, 2m).
        let left = i * dmin;
        let left = left.max(two_m.saturating_sub((n - i) * dmax));
        let right = (i * dmax).min(two_m.saturating_sub((n - i) * dmin).min(two_m));
        let right_ok = two_m >= (n - i) * dmin;
        if i == 0 {
            lo.push(0);
            rows.push(vec![0.0]);
            continue;
        }
        if !right_ok || left > right {
            lo.push(left);
            rows.push(Vec::new());
            continue;
        }
        let mut row = vec![f64::NEG_INFINITY; right - left + 1];
        for (col, j) in (left..=right).enumerate() {
            terms.clear();
            for (k, &d) in degrees.iter().enumerate() {
                if d > j {
                    break;
                }
                let prev = j - d;
                let plo = lo[i - 1];
                if prev < plo {
                    continue;
                }
                if let Some(&w) = rows[i - 1].get(prev - plo) {
                    if w > f64::NEG_INFINITY {
                        terms.push(w + ln_inv_fact[k]);
                    }
                }
            }
            if !terms.is_empty() {
                row[col] = math::log_sum_exp(&terms);
            }
        }
        lo.push(left);
        rows.push(row);
    }
    let table = DpTable { n, two_m, degrees, ln_inv_fact, lo, rows };
    if !table.is_feasible() {
        return Err(Error::Infeasible(format!(
            "no degree sequence in Δ = {{{ds}}} has n = {n} vertices and {two_m} half-edges"
        )));
    }
    Ok(table)
}

/// Draws a degree sequence with probability proportional to `Π 1/d_v!`.
pub fn sample_degree_sequence<R: Rng + ?Sized>(dp: &DpTable, rng: &mut R) -> Result<Vec<u32>> {
    let mut seq = vec![0u32; dp.n];
    let mut j = dp.two_m;
    for i in (1..=dp.n).rev() {
        let dist = dp.last_degree_distribution(i, j)?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = dist.last().expect("non-empty").0;
        for &(d, p) in &dist {
            acc += p;
            if u < acc {
                pick = d;
                break;
            }
        }
        seq[i - 1] = pick;
        j -= pick as usize;
    }
    if j != 0 {
        return Err(Error::Internal(format!("{j} half-edges left after sampling")));
    }
    Ok(seq)
}

/// Uniform perfect matching of the half-edges; 0-based endpoints, loops
/// and repeated edges kept.
pub fn pair_configuration<R: Rng + ?Sized>(seq: &[u32], rng: &mut R) -> Vec<(usize, usize)> {
    let mut stubs: Vec<usize> = seq.iter().enumerate().flat_map(|(v, &d)| core::iter::repeat_n(v, d as usize)).collect();
    stubs.shuffle(rng);
    stubs.chunks_exact(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect()
}

/// Loops and surplus parallel edges in an edge list.
pub fn defects(edges: &[(usize, usize)]) -> (usize, usize) {
    let loops = edges.iter().filter(|(u, v)| u == v).count();
    let mut sorted: Vec<(usize, usize)> = edges.iter().copied().filter(|(u, v)| u != v).collect();
    sorted.sort_unstable();
    let multi = sorted.windows(2).filter(|w| w[0] == w[1]).count();
    (loops, multi)
}

/// A sampler for fixed `(Δ, n, m)` holding the weight table.
#[derive(Debug, Clone)]
pub struct Sampler {
    dp: DpTable,
    m: usize,
    pub max_attempts: u64,
}

impl Sampler {
    pub fn new(ds: &DegreeSet, n: usize, m: usize) -> Result<Self> {
        let dp = build_dp(ds, n, 2 * m)?;
        Ok(Self { dp, m, max_attempts: DEFAULT_MAX_ATTEMPTS })
    }

    pub fn table(&self) -> &DpTable {
        &self.dp
    }

    pub fn n(&self) -> usize {
        self.dp.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Redraws sequence and pairing until the pairing is simple. Returns the
    /// graph and the number of attempts.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Graph, u64)> {
        let mut last = (0, 0);
        for attempt in 1..=self.max_attempts {
            let seq = sample_degree_sequence(&self.dp, rng)?;
            let edges = pair_configuration(&seq, rng);
            last = defects(&edges);
            if last == (0, 0) {
                return Ok((Graph::new(self.dp.n, edges)?, attempt));
            }
        }
        Err(Error::MaxAttempts { attempts: self.max_attempts, loops: last.0, multi: last.1 })
    }
}

/// One-shot version of [`Sampler::sample`].
pub fn sample_simple_graph<R: Rng + ?Sized>(
    ds: &DegreeSet,
    n: usize,
    m: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<(Graph, u64)> {
    let mut s = Sampler::new(ds, n, m)?;
    s.max_attempts = max_attempts;
    s.sample(rng)
}

/// Largest number of sequences enumerated by the reference functions.
pub const ENUMERATION_LIMIT: u64 = 1 << 26;

fn enumerate(ds: &DegreeSet, n: usize, two_m: usize, mut visit: impl FnMut(&[u32], f64)) -> Result<()> {
    let k = ds.len() as u64;
    if k.checked_pow(n as u32).is_none_or(|c| c > ENUMERATION_LIMIT) {
        return Err(Error::TooLarge(format!("{k}^{n} sequences")));
    }
    let degs = ds.degrees();
    let mut idx = vec![0usize; n];
    let mut seq = vec![0u32; n];
    loop {
        let mut sum = 0usize;
        let mut w = 1.0;
        for (s, &i) in seq.iter_mut().zip(&idx) {
            *s = degs[i];
            sum += degs[i] as usize;
            w /= math::tgamma(degs[i] as f64 + 1.0);
        }
        if sum == two_m {
            visit(&seq, w);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(());
            }
            idx[pos] += 1;
            if idx[pos] < degs.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `S_{n,2m}` by brute-force enumeration of all sequences in Δⁿ.
pub fn exact_total_weight(ds: &DegreeSet, n: usize, two_m: usize) -> Result<f64> {
    let mut total = math::CompensatedSum::new();
    enumerate(ds, n, two_m, |_, w| total.add(w))?;
    Ok(total.value())
}

/// Probability of `seq` under the weighted sequence distribution,
/// `(Π 1/d_v!)/S_{n,2m}`, by enumeration.
pub fn exact_sequence_probability(ds: &DegreeSet, n: usize, m: usize, seq: &[u32]) -> Result<f64> {
    if seq.len() != n {
        return Err(Error::Domain(format!("sequence has {} entries, expected {n}", seq.len())));
    }
    if seq.iter().any(|&d| !ds.contains(d)) || seq.iter().map(|&d| d as usize).sum::<usize>() != 2 * m {
        return Ok(0.0);
    }
    let total = exact_total_weight(ds, n, 2 * m)?;
    if total == 0.0 {
        return Err(Error::Infeasible(format!("no sequences for n = {n}, m = {m}")));
    }
    let w: f64 = seq.iter().map(|&d| 1.0 / math::tgamma(d as f64 + 1.0)).product();
    Ok(w / total)
}

/// Marginal law of the last entry of the sequence, by enumeration.
pub fn exact_last_degree_distribution(ds: &DegreeSet, n: usize, two_m: usize) -> Result<Vec<(u32, f64)>> {
    let mut acc: Vec<(u32, math::CompensatedSum)> = ds.degrees().iter().map(|&d| (d, math::CompensatedSum::new())).collect();
    let mut total = math::CompensatedSum::new();
    enumerate(ds, n, two_m, |seq, w| {
        let last = seq[seq.len() - 1];
        if let Some(slot) = acc.iter_mut().find(|a| a.0 == last) {
            slot.1.add(w);
        }
        total.add(w);
    })?;
    let total = total.value();
    if total == 0.0 {
        return Err(Error::Infeasible(format!("no sequences for n = {n}, 2m = {two_m}")));
    }
    Ok(acc.into_iter().map(|(d, s)| (d, s.value() / total)).filter(|a| a.1 > 0.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::critical_point;

    fn ds(s: &str) -> DegreeSet {
        DegreeSet::parse(s).unwrap()
    }

    #[test]
    fn small_tables() {
        let d = ds("1,3");
        assert!((math::exp(build_dp(&d, 2, 2).unwrap().log_weight(2, 2)) - 1.0).abs() < 1e-15);
        let t = build_dp(&d, 4, 6).unwrap();
        assert!((math::exp(t.log_weight(4, 6)) - 2.0 / 3.0).abs() < 1e-14);
        assert!(matches!(build_dp(&d, 2, 3), Err(Error::Infeasible(_))));
        let dist = t.last_degree_distribution(4, 6).unwrap();
        let p3 = dist.iter().find(|x| x.0 == 3).unwrap().1;
        assert!((p3 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn recurrence_residual() {
        let d = ds("1,3,5,7");
        let t = build_dp(&d, 200, 290).unwrap();
        for (i, j) in [(100, 150), (150, 218), (200, 290), (37, 61)] {
            let lhs = t.log_weight(i, j);
            if lhs == f64::NEG_INFINITY {
                continue;
            }
            let mut rhs = 0.0;
            for &k in d.degrees() {
                let k = k as usize;
                if k <= j {
                    rhs += math::exp(t.log_weight(i - 1, j - k) - math::ln_factorial(k as u32) - lhs);
                }
            }
            assert!((rhs - 1.0).abs() < 1e-12, "({i},{j}): {rhs}");
        }
    }

    #[test]
    fn edges_for_mu_examples() {
        let all = ds("all:60");
        let cp = critical_point(&all).unwrap();
        let t = edges_for_mu(&all, &cp, 1000, 0.0).unwrap();
        assert_eq!(t.m, 500);
        let odd = ds("1,3,5,7");
        let cp = critical_point(&odd).unwrap();
        let t = edges_for_mu(&odd, &cp, 1000, 0.0).unwrap();
        assert_eq!(t.m as f64, math::round(1000.0 * cp.alpha));
        assert!(odd.check_condition_c(1000, t.m).holds());
        // Raw m too small for the lower bound moves up.
        let d13 = ds("1,3");
        let cp = critical_point(&d13).unwrap();
        let mu = (1.0 / (4.0 * cp.alpha) - 1.0) * math::cbrt(4.0);
        let t = edges_for_mu(&d13, &cp, 4, mu).unwrap();
        assert_eq!(t.raw_m, 1);
        assert_eq!(t.m, 3);
        assert!(t.adjusted());
    }

    #[test]
    fn pairing_shapes() {
        let mut rng = trial_rng(1, 0);
        assert_eq!(pair_configuration(&[1, 1], &mut rng), vec![(0, 1)]);
        assert_eq!(pair_configuration(&[2], &mut rng), vec![(0, 0)]);
    }

    #[test]
    fn tiny_graph_single_attempt() {
        let mut rng = trial_rng(9, 3);
        for _ in 0..50 {
            let (g, attempts) = sample_simple_graph(&ds("1,3"), 2, 1, &mut rng, 10).unwrap();
            assert_eq!(attempts, 1);
            assert_eq!(g.edges(), &[(0, 1)]);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let s = Sampler::new(&ds("1,3,5,7"), 300, 215).unwrap();
        let a = s.sample(&mut trial_rng(5, 17)).unwrap();
        let b = s.sample(&mut trial_rng(5, 17)).unwrap();
        let c = s.sample(&mut trial_rng(5, 18)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn enumeration_probabilities() {
        let d = ds("1,3");
        assert!((exact_sequence_probability(&d, 4, 3, &[3, 1, 1, 1]).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(exact_sequence_probability(&d, 4, 3, &[2, 2, 1, 1]).unwrap(), 0.0);
    }
}
