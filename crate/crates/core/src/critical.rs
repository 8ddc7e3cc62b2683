//! The critical point of a degree set and the functions built on it.
//!
//! ẑ is the unique positive root of `φ₁(z) = 1` and the threshold is
//! `α = φ₀(ẑ)/2`. The saddle constants are
//!
//! ```text
//! t₃ = ẑ ω'''(ẑ) / ω'(ẑ)      C₂ = t₃ α ẑ / (2(1 − α))
//! C₃ = 2 t₃ α ẑ / 3          ρ  = ẑ / ω'(ẑ)
//! ```
//!
//! ρ is the dominant singularity of the tree functions `T_ℓ`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::degset::DegreeSet;
use crate::math;
use crate::{Error, Result};

const BISECTION_STEPS: usize = 80;
const NEWTON_POLISH: usize = 3;
const MAX_BRACKET: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub zhat: f64,
    pub alpha: f64,
    pub t3: f64,
    pub c2: f64,
    pub c3: f64,
    pub rho: f64,
}

impl CriticalPoint {
    /// The Erdős–Rényi constants, obtained from `ω = e^z`.
    pub const ERDOS_RENYI: CriticalPoint = CriticalPoint {
        zhat: 1.0,
        alpha: 0.5,
        t3: 1.0,
        c2: 0.5,
        c3: 1.0 / 3.0,
        rho: 0.367_879_441_171_442_33,
    };

    /// Builds the derived constants from ẑ and α (and `ω'(ẑ)`, `ω'''(ẑ)`).
    fn from_saddle(zhat: f64, alpha: f64, w1: f64, w3: f64) -> Self {
        let t3 = zhat * w3 / w1;
        Self {
            zhat,
            alpha,
            t3,
            c2: t3 * alpha * zhat / (2.0 * (1.0 - alpha)),
            c3: 2.0 * t3 * alpha * zhat / 3.0,
            rho: zhat / w1,
        }
    }
}

/// Solves `φ₁(ẑ) = 1`, `φ₀(ẑ) = 2α` and derives the saddle constants.
pub fn critical_point(ds: &DegreeSet) -> Result<CriticalPoint> {
    let phi1 = |z: f64| z * ds.omega(z, 2) / ds.omega(z, 1);
    let mut hi = 1.0;
    while phi1(hi) < 1.0 {
        hi *= 2.0;
        if hi > MAX_BRACKET {
            return Err(Error::NoCriticalPoint);
        }
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if phi1(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..NEWTON_POLISH {
        let (w1, w2, w3) = (ds.omega(z, 1), ds.omega(z, 2), ds.omega(z, 3));
        let f = z * w2 / w1 - 1.0;
        let df = ((w2 + z * w3) * w1 - z * w2 * w2) / (w1 * w1);
        if df <= 0.0 {
            break;
        }
        let next = z - f / df;
        if !(next > 0.0) || math::abs(phi1(next) - 1.0) > math::abs(f) {
            break;
        }
        z = next;
    }
    for order in 0..4 {
        ds.check_stable(z, order, ds.omega(z, order))?;
    }
    let alpha = 0.5 * z * ds.omega(z, 1) / ds.omega(z, 0);
    Ok(CriticalPoint::from_saddle(z, alpha, ds.omega(z, 1), ds.omega(z, 3)))
}

/// Unique positive solution of `φ₀(z) = 2r`.
pub fn root1(ds: &DegreeSet, r: f64) -> Result<f64> {
    let target = 2.0 * r;
    let (min, max) = (ds.min_degree() as f64, ds.max_degree() as f64);
    if !(target > min && target < max) {
        return Err(Error::Domain(format!(
            "φ₀(z) = {target} has no positive root; φ₀ ranges over ({min}, {max})"
        )));
    }
    let phi0 = |z: f64| z * ds.omega(z, 1) / ds.omega(z, 0);
    let mut lo = 1.0;
    while phi0(lo) >= target {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Domain(format!("φ₀(z) = {target} below representable range")));
        }
    }
    let mut hi = 1.0;
    while phi0(hi) <= target {
        hi *= 2.0;
        if hi > MAX_BRACKET {
            return Err(Error::Domain(format!("φ₀(z) = {target} beyond bracket limit")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if phi0(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..NEWTON_POLISH {
        let (w0, w1, w2) = (ds.omega(z, 0), ds.omega(z, 1), ds.omega(z, 2));
        let f = z * w1 / w0 - target;
        let df = (w1 + z * w2) / w0 - z * w1 * w1 / (w0 * w0);
        if df <= 0.0 {
            break;
        }
        let next = z - f / df;
        if !(next > 0.0) || math::abs(phi0(next) - target) > math::abs(f) {
            break;
        }
        z = next;
    }
    Ok(z)
}

/// Roots of the saddle equation `h'(z; r) = 0` on the positive axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleRoots {
    /// Solution of `φ₀(z) = 2r`, if it exists.
    pub root1: Option<f64>,
    /// ẑ, solution of `φ₁(z) = 1`.
    pub root2: f64,
    /// True when the two coincide (r = α): a double saddle.
    pub double: bool,
}

pub fn saddle_roots(ds: &DegreeSet, cp: &CriticalPoint, r: f64) -> SaddleRoots {
    let root1 = root1(ds, r).ok();
    let double = root1.is_some_and(|z| math::abs(z - cp.zhat) <= 1e-9 * cp.zhat);
    SaddleRoots { root1, root2: cp.zhat, double }
}

/// Tree generating functions `T_ℓ(z) = z ω^{(ℓ)}(T₁(z))` with
/// `T₁ = z ω'(T₁)`, on `[0, ρ]`.
#[derive(Debug, Clone)]
pub struct TreeFunctions<'a> {
    ds: &'a DegreeSet,
    cp: CriticalPoint,
}

impl<'a> TreeFunctions<'a> {
    pub fn new(ds: &'a DegreeSet) -> Result<Self> {
        Ok(Self { ds, cp: critical_point(ds)? })
    }

    pub fn with_critical_point(ds: &'a DegreeSet, cp: CriticalPoint) -> Self {
        Self { ds, cp }
    }

    pub fn critical_point(&self) -> &CriticalPoint {
        &self.cp
    }

    /// `T₁(z)`, the smallest root of `T − z ω'(T)` in `[0, ẑ]`.
    pub fn t1(&self, z: f64) -> Result<f64> {
        let (rho, zhat) = (self.cp.rho, self.cp.zhat);
        if !(z >= 0.0) {
            return Err(Error::Domain(format!("tree functions need z ≥ 0, got {z}")));
        }
        if z == 0.0 {
            return Ok(0.0);
        }
        let f = |t: f64| t - z * self.ds.omega(t, 1);
        if math::abs(z - rho) <= 4.0 * f64::EPSILON * rho {
            return Ok(zhat);
        }
        if z > rho {
            return Err(Error::TreeNonConvergence { z, rho, residual: f(zhat) });
        }
        // F is concave with F(0) < 0 ≤ F(ẑ): Newton from the left is
        // monotone, bisection catches the slow approach near ρ.
        let (mut a, mut b) = (0.0, zhat);
        let mut t = 0.0;
        for _ in 0..400 {
            let ft = f(t);
            if ft == 0.0 {
                break;
            }
            if ft < 0.0 {
                a = t;
            } else {
                b = t;
            }
            let dft = 1.0 - z * self.ds.omega(t, 2);
            let mut next = if dft > 0.0 { t - ft / dft } else { f64::NAN };
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if next == t || b - a <= 2.0 * f64::EPSILON * b {
                break;
            }
            t = next;
        }
        let residual = math::abs(f(t));
        if residual >= 1e-13 {
            return Err(Error::TreeNonConvergence { z, rho, residual });
        }
        Ok(t)
    }

    pub fn t(&self, ell: u32, z: f64) -> Result<f64> {
        let t1 = self.t1(z)?;
        if ell == 1 {
            return Ok(t1);
        }
        Ok(z * self.ds.omega(t1, ell))
    }

    /// Unrooted trees: `U = T₀ − T₁²/2`.
    pub fn unrooted(&self, z: f64) -> Result<f64> {
        let t1 = self.t1(z)?;
        Ok(z * self.ds.omega(t1, 0) - 0.5 * t1 * t1)
    }

    /// Unicycles: `V = ½[log 1/(1 − T₂) − T₂ − T₂²/2]`, for `z < ρ`.
    pub fn unicycles(&self, z: f64) -> Result<f64> {
        if z >= self.cp.rho {
            return Err(Error::Singularity(format!("V diverges at z = {z} ≥ ρ = {}", self.cp.rho)));
        }
        let t2 = self.t(2, z)?;
        if t2 >= 1.0 {
            return Err(Error::Singularity(format!("T₂({z}) = {t2} ≥ 1")));
        }
        Ok(0.5 * (-libm::log1p(-t2) - t2 - 0.5 * t2 * t2))
    }
}

/// `h(z; r) = r log ω'(z) − r log z + (1 − r) log(2ω(z) − zω'(z))` with
/// principal logarithms.
pub fn h_eval(ds: &DegreeSet, z: Complex64, r: f64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::Branch("z = 0".into()));
    }
    let w1 = ds.omega_complex(z, 1);
    let w2 = ds.omega_complex(z, 0) * 2.0 - z * w1;
    if w1.norm() == 0.0 {
        return Err(Error::Branch(format!("ω'({z}) = 0")));
    }
    if w2.norm() == 0.0 {
        return Err(Error::Branch(format!("2ω − zω' vanishes at {z}")));
    }
    Ok(w1.ln() * r - z.ln() * r + w2.ln() * (1.0 - r))
}

/// `Re h(z; r)`, which is branch-free.
pub fn h_real_part(ds: &DegreeSet, z: Complex64, r: f64) -> f64 {
    let w1 = ds.omega_complex(z, 1);
    let w2 = ds.omega_complex(z, 0) * 2.0 - z * w1;
    r * math::ln(w1.norm()) - r * math::ln(z.norm()) + (1.0 - r) * math::ln(w2.norm())
}

/// `Re h` along the circle `|z| = z₀`, with its maxima located.
#[derive(Debug, Clone)]
pub struct PetrovProfile {
    pub z0: f64,
    pub r: f64,
    pub periodicity: u64,
    pub grid_size: usize,
    pub values: Vec<f64>,
    /// Angles of the grid points attaining the global maximum.
    pub argmax: Vec<f64>,
    /// `2πk/p`, k = 0..p.
    pub expected: Vec<f64>,
    pub max_value: f64,
    /// Gap between the maximum and the best local maximum away from the
    /// expected angles; `None` when there is no such local maximum.
    pub margin: Option<f64>,
}

impl PetrovProfile {
    pub fn cell(&self) -> f64 {
        2.0 * math::PI / self.grid_size as f64
    }

    /// Every expected angle has a maximum within one grid cell, and every
    /// maximum sits within one cell of an expected angle.
    pub fn matches_expected(&self) -> bool {
        let tol = self.cell() * (1.0 + 1e-9);
        let near = |a: f64, b: f64| circular_distance(a, b) <= tol;
        self.expected.iter().all(|&e| self.argmax.iter().any(|&a| near(a, e)))
            && self.argmax.iter().all(|&a| self.expected.iter().any(|&e| near(a, e)))
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * math::PI;
    let d = libm::fmod(math::abs(a - b), two_pi);
    d.min(two_pi - d)
}

/// Evaluates `Φ(θ) = Re h(z₀e^{iθ}; r)` on a uniform grid.
pub fn petrov_profile(
    ds: &DegreeSet,
    cp: &CriticalPoint,
    z0: f64,
    r: f64,
    grid_size: usize,
) -> Result<PetrovProfile> {
    if grid_size < 8 {
        return Err(Error::Precondition(format!("grid of {grid_size} points is too coarse")));
    }
    let bound = petrov_bound(ds, cp, r)?;
    if !(z0 > 0.0 && z0 <= bound * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!(
            "need 0 < z₀ ≤ min(Root₁(r), ẑ) = {bound}, got z₀ = {z0}"
        )));
    }
    let step = 2.0 * math::PI / grid_size as f64;
    let values: Vec<f64> = (0..grid_size)
        .map(|j| {
            let theta = j as f64 * step;
            h_real_part(ds, Complex64::from_polar(z0, theta), r)
        })
        .collect();
    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let delta = 1e-6 * (max_value - min_value) + 1e-14 * math::abs(max_value);
    let p = ds.periodicity();
    let expected: Vec<f64> = (0..p).map(|k| 2.0 * math::PI * k as f64 / p as f64).collect();

    let n = grid_size;
    let is_local_max = |j: usize| {
        let prev = values[(j + n - 1) % n];
        let next = values[(j + 1) % n];
        values[j] > prev && values[j] >= next
    };
    let mut argmax = Vec::new();
    let mut margin: Option<f64> = None;
    let tol = step * (1.0 + 1e-9);
    for j in (0..n).filter(|&j| is_local_max(j)) {
        let theta = j as f64 * step;
        if values[j] >= max_value - delta {
            argmax.push(theta);
        } else if !expected.iter().any(|&e| circular_distance(theta, e) <= tol) {
            let gap = max_value - values[j];
            margin = Some(margin.map_or(gap, |m: f64| m.min(gap)));
        }
    }
    Ok(PetrovProfile { z0, r, periodicity: p, grid_size, values, argmax, expected, max_value, margin })
}

/// `min(Root₁(r), ẑ)`; Root₁ is taken as +∞ when `2r ≥ max(Δ)`.
pub fn petrov_bound(ds: &DegreeSet, cp: &CriticalPoint, r: f64) -> Result<f64> {
    if 2.0 * r >= ds.max_degree() as f64 {
        return Ok(cp.zhat);
    }
    Ok(root1(ds, r)?.min(cp.zhat))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(s: &str) -> DegreeSet {
        DegreeSet::parse(s).unwrap()
    }

    #[test]
    fn closed_form_point_for_one_three() {
        let cp = critical_point(&ds("1,3")).unwrap();
        let r2 = math::sqrt(2.0);
        assert!((cp.zhat - r2).abs() < 1e-12);
        assert!((cp.alpha - 0.75).abs() < 1e-12);
        assert!((cp.t3 - 1.0 / r2).abs() < 1e-12);
        assert!((cp.c2 - 1.5).abs() < 1e-12);
        assert!((cp.c3 - 0.5).abs() < 1e-12);
        assert!((cp.rho - r2 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn erdos_renyi_limit() {
        let s = ds("all:60");
        let cp = critical_point(&s).unwrap();
        let er = CriticalPoint::ERDOS_RENYI;
        assert!((cp.zhat - 1.0).abs() < 1e-12);
        assert!((cp.alpha - 0.5).abs() < 1e-12);
        for (a, b) in [(cp.t3, er.t3), (cp.c2, er.c2), (cp.c3, er.c3), (cp.rho, er.rho)] {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn invariants_hold_and_solution_is_deterministic() {
        for spec in ["1,3", "0,1,4,5", "pow2:64", "1,3,5,7", "1,2,3", "1,4,7", "all:60"] {
            let s = ds(spec);
            let cp = critical_point(&s).unwrap();
            assert!((s.phi1(cp.zhat).unwrap() - 1.0).abs() < 1e-12, "{spec}");
            assert!((2.0 * cp.alpha - s.phi0(cp.zhat).unwrap()).abs() < 1e-12);
            assert!(cp.c2 > 0.0 && cp.c3 > 0.0 && cp.alpha > 0.0 && cp.alpha < 1.0);
            assert!((cp.rho * s.omega(cp.zhat, 1) - cp.zhat).abs() < 1e-12);
            let again = critical_point(&s).unwrap();
            assert_eq!(cp.zhat.to_bits(), again.zhat.to_bits());
            assert_eq!(cp.c3.to_bits(), again.c3.to_bits());
        }
    }

    #[test]
    fn tree_functions_at_endpoints() {
        let s = ds("1,3");
        let tf = TreeFunctions::new(&s).unwrap();
        for ell in 0..5 {
            assert_eq!(tf.t(ell, 0.0).unwrap(), 0.0);
        }
        let rho = tf.critical_point().rho;
        assert!((tf.t1(rho).unwrap() - math::sqrt(2.0)).abs() < 1e-8);
        assert!((tf.t(2, rho).unwrap() - 1.0).abs() < 1e-8);
        assert!(matches!(tf.t1(rho * 1.01), Err(Error::TreeNonConvergence { .. })));

        let all = ds("all:60");
        let tf = TreeFunctions::new(&all).unwrap();
        assert!((tf.t1(math::exp(-1.0)).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_point_residual_is_small_near_rho() {
        let s = ds("0,1,4,5");
        let tf = TreeFunctions::new(&s).unwrap();
        let rho = tf.critical_point().rho;
        for k in 1..=50 {
            let z = rho * (1.0 - 1.0 / (k * k * k) as f64);
            let t = tf.t1(z).unwrap();
            assert!((t - z * s.omega(t, 1)).abs() < 1e-13);
        }
    }

    #[test]
    fn unicycles_diverge_monotonically() {
        let s = ds("1,3,5,7");
        let tf = TreeFunctions::new(&s).unwrap();
        let rho = tf.critical_point().rho;
        assert_eq!(tf.unrooted(0.0).unwrap(), 0.0);
        assert_eq!(tf.unicycles(0.0).unwrap(), 0.0);
        let mut last = 0.0;
        for k in 1..30 {
            let z = rho * (1.0 - 0.5f64.powi(k));
            let v = tf.unicycles(z).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(last > 3.0);
        assert!(matches!(tf.unicycles(rho), Err(Error::Singularity(_))));
    }

    #[test]
    fn root1_examples() {
        assert!((root1(&ds("1,3"), 0.75).unwrap() - math::sqrt(2.0)).abs() < 1e-12);
        assert!((root1(&ds("all:60"), 0.4).unwrap() - 0.8).abs() < 1e-12);
        assert!(root1(&ds("1,3"), 0.5).is_err());
        assert!(root1(&ds("1,3"), 1.5).is_err());
        let s = ds("1,3");
        let cp = critical_point(&s).unwrap();
        let roots = saddle_roots(&s, &cp, cp.alpha);
        assert!(roots.double);
        assert!(!saddle_roots(&s, &cp, 0.7).double);
    }

    #[test]
    fn h_values() {
        let all = ds("all:60");
        let h = h_eval(&all, Complex64::new(1.0, 0.0), 0.5).unwrap();
        // ω'(1) = e, 2ω(1) − ω'(1) = e: h = ½·1 − 0 + ½·1.
        assert!((h.re - 1.0).abs() < 1e-14 && h.im == 0.0);
        let s = ds("0,1,4,5");
        let z = Complex64::new(0.7, 0.4);
        let a = h_eval(&s, z, 0.4).unwrap();
        let b = h_eval(&s, z.conj(), 0.4).unwrap();
        assert!((a.re - b.re).abs() < 1e-14 && (a.im + b.im).abs() < 1e-14);
        assert!((h_real_part(&s, z, 0.4) - a.re).abs() < 1e-14);
        assert!(h_eval(&s, Complex64::new(0.0, 0.0), 0.4).is_err());
    }

    #[test]
    fn h_derivative_sign_matches_factorization() {
        for spec in ["1,3", "0,1,4,5", "1,3,5,7"] {
            let s = ds(spec);
            let cp = critical_point(&s).unwrap();
            for &r in &[0.3, cp.alpha * 0.9, cp.alpha, 0.9] {
                for k in 1..20 {
                    let z = cp.zhat * k as f64 / 20.0;
                    let eps = 1e-6 * z;
                    let hp = |x: f64| h_eval(&s, Complex64::new(x, 0.0), r).unwrap().re;
                    let fd = (hp(z + eps) - hp(z - eps)) / (2.0 * eps);
                    let (p0, p1) = (s.phi0(z).unwrap(), s.phi1(z).unwrap());
                    let exact = (p0 - 2.0 * r) * (p1 - 1.0) / (z * (p0 - 2.0));
                    if exact.abs() > 1e-5 {
                        assert_eq!(fd.signum(), exact.signum(), "{spec} r={r} z={z}");
                        assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn petrov_examples() {
        for (spec, p) in [("0,1,4,5", 1), ("1,3,5,7", 2), ("all:60", 1), ("1,4,7", 3)] {
            let s = ds(spec);
            let cp = critical_point(&s).unwrap();
            let r = cp.alpha;
            let z0 = 0.9 * petrov_bound(&s, &cp, r).unwrap();
            let prof = petrov_profile(&s, &cp, z0, r, 4096).unwrap();
            assert_eq!(prof.expected.len(), p);
            assert!(prof.matches_expected(), "{spec}: {:?}", prof.argmax);
        }
    }

    #[test]
    fn petrov_rejects_large_radius() {
        let s = ds("1,3");
        let cp = critical_point(&s).unwrap();
        assert!(matches!(
            petrov_profile(&s, &cp, cp.zhat * 1.1, cp.alpha, 64),
            Err(Error::Precondition(_))
        ));
    }
}
