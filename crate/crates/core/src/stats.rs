//! Empirical bulk and extremal measures and their comparison with the limits.

use serde::Serialize;

use crate::complex::{binomial, Weight};
use crate::error::{Error, Result};
use crate::limit::LimitLaw;
use crate::msa::{DeathTimes, Msa};
use crate::sampler::WeightLaw;

/// Neumaier-compensated sum; merging two sums is order-insensitive up to
/// rounding of the compensation terms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Running count/mean/variance/factorial moments of an integer statistic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CountMoments {
    pub count: u64,
    #[serde(skip)]
    sums: [NeumaierSum; 5],
}

impl CountMoments {
    /// Records one observation `k`.
    pub fn push(&mut self, k: u64) {
        let k = k as f64;
        self.count += 1;
        // k, k^2, k(k-1), k(k-1)(k-2), (k(k-1)(k-2))^2 proxy for SEs
        let f2 = k * (k - 1.0);
        let f3 = f2 * (k - 2.0);
        self.sums[0].add(k);
        self.sums[1].add(k * k);
        self.sums[2].add(f2);
        self.sums[3].add(f3);
        self.sums[4].add(f2 * f2);
    }

    pub fn merge(&mut self, other: &CountMoments) {
        self.count += other.count;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
    }

    fn avg(&self, i: usize) -> f64 {
        self.sums[i].value() / self.count as f64
    }

    pub fn mean(&self) -> f64 {
        self.avg(0)
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.count as f64;
        (self.avg(1) - self.mean().powi(2)) * m / (m - 1.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    /// `E[N (N-1) ... (N-l+1)]` for `l` in 1..=3.
    pub fn factorial_moment(&self, order: usize) -> f64 {
        match order {
            1 => self.avg(0),
            2 => self.avg(2),
            3 => self.avg(3),
            _ => panic!("factorial moments are tracked up to order 3"),
        }
    }

    fn factorial2_std_error(&self) -> f64 {
        let m = self.count as f64;
        let var = (self.avg(4) - self.avg(2).powi(2)) * m / (m - 1.0);
        (var.max(0.0) / m).sqrt()
    }
}

/// Sorted point multiset with a normalizing constant: total mass is
/// `points.len() / normalization`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalMeasure {
    points: Vec<f64>,
    normalization: f64,
}

impl EmpiricalMeasure {
    pub fn new(mut points: Vec<f64>, normalization: f64) -> Self {
        points.sort_by(f64::total_cmp);
        Self {
            points,
            normalization,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn mass(&self) -> f64 {
        self.points.len() as f64 / self.normalization
    }

    /// Measure of `(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.points.partition_point(|&p| p <= x) as f64 / self.normalization
    }

    /// Measure of `(c, inf)`.
    pub fn tail(&self, c: f64) -> f64 {
        self.mass() - self.cdf(c)
    }

    /// `int f d(measure)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut s = NeumaierSum::default();
        for &p in &self.points {
            s.add(f(p));
        }
        s.value() / self.normalization
    }

    /// Masses of the bins `[edges[i], edges[i+1])`.
    pub fn histogram(&self, edges: &[f64]) -> Vec<(f64, f64, f64)> {
        edges
            .windows(2)
            .map(|w| {
                let lo = self.points.partition_point(|&p| p < w[0]);
                let hi = self.points.partition_point(|&p| p < w[1]);
                (w[0], w[1], (hi - lo) as f64 / self.normalization)
            })
            .collect()
    }
}

/// Maps raw weights to the rescaled bulk value `n p F(w)` and the recentred
/// extremal value `n p F(w) - d ln n + ln d!`.
#[derive(Clone, Debug)]
pub struct Rescaling<'a> {
    pub n: u32,
    pub p: f64,
    pub d: u32,
    pub law: &'a WeightLaw,
}

impl Rescaling<'_> {
    pub fn bulk(&self, w: Weight) -> f64 {
        self.n as f64 * self.p * self.law.cdf(w)
    }

    pub fn shift(&self) -> f64 {
        let ln_fact: f64 = (2..=self.d).map(|k| (k as f64).ln()).sum();
        self.d as f64 * (self.n as f64).ln() - ln_fact
    }

    pub fn extreme(&self, w: Weight) -> f64 {
        self.bulk(w) - self.shift()
    }

    /// `c(n) / p` for `c(n) = (c + d ln n - ln d!) / n`: `nu(c, inf)` counts
    /// weights strictly above this raw threshold (uniform weights).
    pub fn raw_threshold(&self, c: f64) -> f64 {
        (c + self.shift()) / self.n as f64 / self.p
    }
}

/// Bulk measure of an MSA. When the MSA does not exist the unit mass at 0
/// stands in for it.
pub fn bulk_measure(msa: &Msa, scale: &Rescaling) -> EmpiricalMeasure {
    if !msa.exists {
        return EmpiricalMeasure::new(vec![0.0], 1.0);
    }
    let norm = binomial(scale.n as u64 - 1, scale.d as u64) as f64;
    EmpiricalMeasure::new(msa.faces.iter().map(|f| scale.bulk(f.1)).collect(), norm)
}

/// Bulk measure built from death times instead of MSA weights.
pub fn bulk_measure_from_deaths(deaths: &DeathTimes, ceiling: Weight, scale: &Rescaling) -> EmpiricalMeasure {
    let norm = binomial(scale.n as u64 - 1, scale.d as u64) as f64;
    let pts = deaths
        .deaths
        .iter()
        .copied()
        .chain(std::iter::repeat_n(ceiling, deaths.ceiling_deaths))
        .map(|w| scale.bulk(w))
        .collect();
    EmpiricalMeasure::new(pts, norm)
}

/// `sup_x |emp(-inf, x] - mu(-inf, x]|`, evaluated at both one-sided limits
/// of every step of `emp` and at infinity.
pub fn kolmogorov_distance(emp: &EmpiricalMeasure, law: &LimitLaw) -> f64 {
    let norm = emp.normalization;
    let pts = &emp.points;
    let mut best = (emp.mass() - 1.0).abs();
    let mut i = 0;
    while i < pts.len() {
        let x = pts[i];
        let mut j = i;
        while j < pts.len() && pts[j] == x {
            j += 1;
        }
        let g = law.mu_cdf(x);
        best = best.max((i as f64 / norm - g).abs());
        best = best.max((j as f64 / norm - g).abs());
        i = j;
    }
    best
}

/// Kolmogorov distance between two empirical measures.
pub fn kolmogorov_between(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> f64 {
    let mut best = (a.mass() - b.mass()).abs();
    for &x in a.points.iter().chain(&b.points) {
        best = best.max((a.cdf(x) - b.cdf(x)).abs());
    }
    best
}

/// Points of a counting measure on the real line.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExtremalPoints {
    pub points: Vec<f64>,
}

impl ExtremalPoints {
    pub fn count_in(&self, iv: Interval) -> u64 {
        self.points.iter().filter(|&&x| iv.contains(x)).count() as u64
    }

    /// `nu(c, inf)`.
    pub fn count_above(&self, c: f64) -> u64 {
        self.points.iter().filter(|&&x| x > c).count() as u64
    }

    pub fn max(&self) -> Option<f64> {
        self.points.iter().copied().reduce(f64::max)
    }
}

/// Affine rescaling of a raw value set into extremal points.
pub fn extremal_points(values: impl IntoIterator<Item = Weight>, scale: &Rescaling) -> ExtremalPoints {
    ExtremalPoints {
        points: values.into_iter().map(|w| scale.extreme(w)).collect(),
    }
}

pub fn extremal_from_msa(msa: &Msa, scale: &Rescaling) -> ExtremalPoints {
    extremal_points(msa.faces.iter().map(|f| f.1), scale)
}

pub fn extremal_from_deaths(deaths: &DeathTimes, ceiling: Weight, scale: &Rescaling) -> ExtremalPoints {
    extremal_points(
        deaths
            .deaths
            .iter()
            .copied()
            .chain(std::iter::repeat_n(ceiling, deaths.ceiling_deaths)),
        scale,
    )
}

/// From nearest-face distances `C(tau)`.
pub fn extremal_from_nearest(nfd: &[Weight], scale: &Rescaling) -> ExtremalPoints {
    extremal_points(nfd.iter().copied(), scale)
}

/// Half-open interval `(lo, hi]`; `hi` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn above(lo: f64) -> Self {
        Self { lo, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x <= self.hi
    }

    /// `int_I e^{-x} dx`.
    pub fn poisson_mean(&self) -> f64 {
        (-self.lo).exp() - (-self.hi).exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalStats {
    pub interval: Interval,
    pub replications: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// `E[N^{(l)}]` for l = 1, 2, 3.
    pub factorial_moments: [f64; 3],
    /// `(int_I e^{-x} dx)^l` for l = 1, 2, 3.
    pub targets: [f64; 3],
    /// Standard errors of the first two factorial moments.
    pub factorial_std_errors: [f64; 2],
}

impl IntervalStats {
    pub fn dispersion(&self) -> f64 {
        self.variance / self.mean
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoissonDiagnostics {
    pub intervals: Vec<IntervalStats>,
}

pub fn interval_moments(reps: &[ExtremalPoints], iv: Interval) -> CountMoments {
    let mut m = CountMoments::default();
    for r in reps {
        m.push(r.count_in(iv));
    }
    m
}

pub fn poisson_diagnostics(reps: &[ExtremalPoints], intervals: &[Interval]) -> Result<PoissonDiagnostics> {
    if reps.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "Poisson diagnostics need at least 2 replications, got {}",
            reps.len()
        )));
    }
    let intervals = intervals
        .iter()
        .map(|&iv| {
            let m = interval_moments(reps, iv);
            let mu = iv.poisson_mean();
            IntervalStats {
                interval: iv,
                replications: m.count,
                mean: m.mean(),
                variance: m.variance(),
                std_error: m.std_error(),
                factorial_moments: [m.factorial_moment(1), m.factorial_moment(2), m.factorial_moment(3)],
                targets: [mu, mu * mu, mu * mu * mu],
                factorial_std_errors: [m.std_error(), m.factorial2_std_error()],
            }
        })
        .collect();
    Ok(PoissonDiagnostics { intervals })
}

/// `E |nu_a(c, inf) - nu_b(c, inf)|` over paired replications.
pub fn tail_count_discrepancy(pairs: &[(ExtremalPoints, ExtremalPoints)], c: f64) -> f64 {
    let mut s = NeumaierSum::default();
    for (a, b) in pairs {
        s.add((a.count_above(c) as f64 - b.count_above(c) as f64).abs());
    }
    s.value() / pairs.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::WeightedComplex;
    use crate::msa::{betti, kruskal_msa, persistence_deaths};
    use crate::linalg::FieldChoice;
    use crate::sampler::{augmented_complex, Seed};

    fn triangle_msa() -> Msa {
        let c = WeightedComplex::uniform(3, 1, vec![(0, 0.1), (1, 0.2), (2, 0.3)]).unwrap();
        kruskal_msa(&c, FieldChoice::Gf2)
    }

    #[test]
    fn bulk_of_triangle() {
        let law = WeightLaw::Uniform01;
        let scale = Rescaling { n: 3, p: 1.0, d: 1, law: &law };
        let emp = bulk_measure(&triangle_msa(), &scale);
        assert_eq!(emp.normalization(), 2.0);
        assert!((emp.points()[0] - 0.3).abs() < 1e-15 && (emp.points()[1] - 0.6).abs() < 1e-15);
        assert_eq!(emp.mass(), 1.0);
    }

    #[test]
    fn missing_msa_becomes_unit_mass_at_zero() {
        let law = WeightLaw::Uniform01;
        let c = crate::sampler::weighted_y(20, 1, 0.01, Seed::new(1), &law).unwrap();
        let m = kruskal_msa(&c, FieldChoice::Gf2);
        assert!(!m.exists);
        let emp = bulk_measure(&m, &Rescaling { n: 20, p: 0.01, d: 1, law: &law });
        assert_eq!(emp.points(), &[0.0]);
        assert_eq!(emp.mass(), 1.0);
    }

    #[test]
    fn kolmogorov_against_quantiles() {
        for d in 1..=2 {
            let law = LimitLaw::new(d).unwrap();
            let m = 200;
            // quantiles of mu by bisection on its CDF
            let pts: Vec<f64> = (0..m)
                .map(|i| {
                    let q = (i as f64 + 0.5) / m as f64;
                    crate::quad::bisect(|x| law.mu_cdf(x) - q, 0.0, 80.0, 1e-13)
                })
                .collect();
            let emp = EmpiricalMeasure::new(pts, m as f64);
            let k = kolmogorov_distance(&emp, &law);
            assert!(k <= 1.0 / m as f64 + 1e-9, "d={d} k={k}");
        }
        let law = LimitLaw::new(1).unwrap();
        assert_eq!(kolmogorov_distance(&EmpiricalMeasure::new(vec![], 5.0), &law), 1.0);
    }

    #[test]
    fn kolmogorov_between_is_a_metric_on_examples() {
        let a = EmpiricalMeasure::new(vec![0.0, 1.0], 2.0);
        let b = EmpiricalMeasure::new(vec![0.5, 1.0], 2.0);
        assert_eq!(kolmogorov_between(&a, &a), 0.0);
        assert_eq!(kolmogorov_between(&a, &b), 0.5);
        assert_eq!(kolmogorov_between(&b, &a), 0.5);
    }

    #[test]
    fn extremal_msa_and_deaths_agree() {
        let law = WeightLaw::Uniform01;
        for seed in 0..5 {
            let c = augmented_complex(30, 1, 0.7, Seed::new(seed), &law).unwrap();
            let scale = Rescaling { n: 30, p: 0.7, d: 1, law: &law };
            let m = kruskal_msa(&c, FieldChoice::Gf2);
            let d = persistence_deaths(&c, FieldChoice::Gf2);
            let mut a = extremal_from_msa(&m, &scale).points;
            let mut b = extremal_from_deaths(&d, c.ceiling(), &scale).points;
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn shifting_large_weights_keeps_lower_points() {
        let law = WeightLaw::Uniform01;
        let scale = Rescaling { n: 50, p: 1.0, d: 1, law: &law };
        let ws = [0.01, 0.02, 0.5, 0.9].map(Weight::Finite);
        let a = extremal_points(ws, &scale);
        let moved = [0.01, 0.02, 0.7, 0.95].map(Weight::Finite);
        let b = extremal_points(moved, &scale);
        assert_eq!(a.points[..2], b.points[..2]);
    }

    #[test]
    fn interval_targets() {
        assert_eq!(Interval::above(0.0).poisson_mean(), 1.0);
        assert!((Interval::above(-1.0).poisson_mean() - std::f64::consts::E).abs() < 1e-15);
        assert!(poisson_diagnostics(&[ExtremalPoints::default()], &[Interval::above(0.0)]).is_err());
    }

    #[test]
    fn factorial_moments_of_known_counts() {
        let reps: Vec<ExtremalPoints> = [0u64, 1, 2, 3]
            .iter()
            .map(|&k| ExtremalPoints { points: vec![1.0; k as usize] })
            .collect();
        let diag = poisson_diagnostics(&reps, &[Interval::above(0.0)]).unwrap();
        let s = &diag.intervals[0];
        assert_eq!(s.mean, 1.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.factorial_moments, [1.5, (0.0 + 0.0 + 2.0 + 6.0) / 4.0, 6.0 / 4.0]);
    }

    #[test]
    fn moments_merge_like_one_pass() {
        let mut a = CountMoments::default();
        let mut b = CountMoments::default();
        let mut all = CountMoments::default();
        for k in 0..100u64 {
            let v = (k * 7919) % 13;
            all.push(v);
            if k % 3 == 0 { a.push(v) } else { b.push(v) }
        }
        a.merge(&b);
        assert_eq!(a.count, all.count);
        assert!((a.mean() - all.mean()).abs() < 1e-12);
        assert!((a.variance() - all.variance()).abs() < 1e-12);
        assert!((a.factorial_moment(3) - all.factorial_moment(3)).abs() < 1e-9);
    }

    #[test]
    fn neumaier_beats_naive() {
        let mut s = NeumaierSum::default();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn histogram_masses_sum_to_total() {
        let emp = EmpiricalMeasure::new(vec![0.1, 0.2, 0.25, 1.5, 3.0], 5.0);
        let h = emp.histogram(&[0.0, 0.5, 1.0, 2.0, 4.0]);
        let total: f64 = h.iter().map(|b| b.2).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(h[0].2, 0.6);
    }

    #[test]
    fn layer_cake_matches_betti_integral() {
        // mu f - mu (f ^ b) for f = x^alpha against the Betti-number integral
        let law = WeightLaw::Uniform01;
        for (seed, alpha, b) in [(1u64, 1.0, 1.0), (2, 2.0, 2.0), (3, 1.5, 0.5)] {
            let (n, d, p) = (25u32, 1u32, 0.8);
            let c = augmented_complex(n, d, p, Seed::new(seed), &law).unwrap();
            let m = kruskal_msa(&c, FieldChoice::Gf2);
            let scale = Rescaling { n, p, d, law: &law };
            let emp = bulk_measure(&m, &scale);
            let direct = emp.integrate(|x| (x.powf(alpha) - b).max(0.0));
            let norm = binomial(n as u64 - 1, d as u64) as f64;
            let np = n as f64 * p;
            let lo = b.powf(1.0 / alpha);
            let hi = np * m.faces.last().unwrap().1.as_f64() + 1.0;
            let steps = 4000;
            let h = (hi - lo) / steps as f64;
            let mut integral = NeumaierSum::default();
            for i in 0..steps {
                let s = lo + (i as f64 + 0.5) * h;
                let beta = betti(&c, Weight::Finite(s / np), d - 1, FieldChoice::Gf2).unwrap();
                integral.add(alpha * s.powf(alpha - 1.0) * beta as f64 * h);
            }
            let via_betti = integral.value() / norm;
            // midpoint rule on a step function: each of <= n-1 jumps costs <= h * alpha * hi^(alpha-1)
            let tol = (n - 1) as f64 * h * alpha * hi.powf(alpha - 1.0) / norm;
            assert!((direct - via_betti).abs() <= tol, "{direct} vs {via_betti} (tol {tol})");
        }
    }
}
