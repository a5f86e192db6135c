//! The limiting bulk measure `mu` of rescaled MSA weights.
//!
//! `t(c)` is the smallest root of `t = exp(-c (1 - t)^d)` for `c >= c_*`,
//! `s(x) = (1 - t(x))^{d+1}` the asymptotic shadow density, and `mu` has
//! density `(1 - s(x)) / (d + 1)` on `[0, inf)`. Its tail `mu(c, inf)` has the
//! closed form `h(c) = g(c) + 1 - c / (d + 1)`.

use crate::error::{Error, Result};
use crate::quad::{bisect, integrate, QuadConfig};

/// Density below which the tail of `mu` is dropped from quadratures.
pub const DENSITY_CUTOFF: f64 = 1e-14;

const GRID_STEP: f64 = 1.0 / 16.0;
const GRID_SPAN: f64 = 64.0;

#[derive(Clone, Debug)]
pub struct LimitLaw {
    d: u32,
    t_star: f64,
    c_star: f64,
    /// `(c, ln t(c))` on an even grid starting at `c_*`.
    grid: Vec<(f64, f64)>,
    quad: QuadConfig,
}

/// `(t_*, c_*)`: `(1, 1)` for `d = 1`; otherwise the root in `(0, 1)` of
/// `(d+1)(1-t) + (1+dt) ln t = 0` and `c_* = -ln t_* / (1 - t_*)^d`.
pub fn compute_t_star_c_star(d: u32) -> Result<(f64, f64)> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    if d == 1 {
        return Ok((1.0, 1.0));
    }
    let df = d as f64;
    let f = |t: f64| (df + 1.0) * (1.0 - t) + (1.0 + df * t) * t.ln();
    // f < 0 near 0 and f ~ (d-1) e^2 / 2 > 0 at t = 1 - e
    let mut hi = 0.5;
    while f(hi) <= 0.0 {
        hi = 0.5 * (1.0 + hi);
    }
    let lo = f64::MIN_POSITIVE;
    let t = bisect(f, lo, hi, 0.0);
    Ok((t, -t.ln() / (1.0 - t).powi(d as i32)))
}

/// `psi(e^u) = -u / (1 - e^u)^d`, continuous at `u = 0` for `d = 1`.
fn psi_log(u: f64, d: u32) -> f64 {
    if u == 0.0 {
        return if d == 1 { 1.0 } else { f64::INFINITY };
    }
    -u / (-u.exp_m1()).powi(d as i32)
}

impl LimitLaw {
    pub fn new(d: u32) -> Result<Self> {
        let (t_star, c_star) = compute_t_star_c_star(d)?;
        let mut law = Self {
            d,
            t_star,
            c_star,
            grid: Vec::new(),
            quad: QuadConfig {
                abs_tol: 1e-14,
                rel_tol: 1e-10,
                max_depth: 40,
            },
        };
        let steps = (GRID_SPAN / GRID_STEP) as usize;
        law.grid = (0..=steps)
            .map(|i| {
                let c = c_star + i as f64 * GRID_STEP;
                (c, law.log_t_bracketed(c, -c - 1.0, t_star.ln()))
            })
            .collect();
        Ok(law)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn t_star(&self) -> f64 {
        self.t_star
    }

    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    fn log_t_bracketed(&self, c: f64, lo: f64, hi: f64) -> f64 {
        if c == self.c_star {
            return self.t_star.ln();
        }
        // psi decreases in u, so psi(u) - c changes sign from + to -
        bisect(|u| c - psi_log(u, self.d), lo, hi, 0.0)
    }

    fn log_t(&self, c: f64) -> f64 {
        let pos = (c - self.c_star) / GRID_STEP;
        let i = pos.floor() as usize;
        if i + 2 < self.grid.len() {
            // t decreases in c; one knot of slack on each side keeps a strict
            // sign change when c sits on a knot
            self.log_t_bracketed(c, self.grid[i + 2].1, self.grid[i.saturating_sub(1)].1)
        } else {
            self.log_t_bracketed(c, -c - 1.0, self.grid[self.grid.len() - 1].1)
        }
    }

    /// Smallest root of `t = exp(-c (1-t)^d)`, for `c >= c_*`.
    pub fn t_of_c(&self, c: f64) -> Result<f64> {
        if !(c >= self.c_star) {
            return Err(Error::BelowThreshold {
                c,
                c_star: self.c_star,
            });
        }
        Ok(self.log_t(c).exp())
    }

    fn t_unchecked(&self, c: f64) -> f64 {
        self.log_t(c).exp()
    }

    /// `1 - s(x)`, computed without cancellation for large `x`.
    fn one_minus_s(&self, x: f64) -> f64 {
        if x <= self.c_star {
            return 1.0;
        }
        let t = self.t_unchecked(x);
        -((self.d as f64 + 1.0) * (-t).ln_1p()).exp_m1()
    }

    /// Asymptotic shadow density of `Y(n, x/n)`.
    pub fn s_of_x(&self, x: f64) -> f64 {
        1.0 - self.one_minus_s(x)
    }

    pub fn mu_density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.one_minus_s(x) / (self.d as f64 + 1.0)
    }

    pub fn g(&self, c: f64) -> f64 {
        if c <= self.c_star {
            return 0.0;
        }
        let t = self.t_unchecked(c);
        let df = self.d as f64;
        let u = 1.0 - t;
        c * t * u.powi(self.d as i32) + c / (df + 1.0) * u.powi(self.d as i32 + 1) - u
    }

    /// `h(c) = mu(c, inf)`; equals 1 for `c <= 0`.
    pub fn h(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return 1.0;
        }
        self.g(c) + 1.0 - c / (self.d as f64 + 1.0)
    }

    /// Closed-form tail `mu(c, inf)`.
    pub fn mu_tail(&self, c: f64) -> f64 {
        self.h(c)
    }

    /// `mu[0, x]`.
    pub fn mu_cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            1.0 - self.h(x)
        }
    }

    /// `h'(c)` away from `c_*`.
    pub fn h_prime(&self, c: f64) -> f64 {
        let k = self.d as f64 + 1.0;
        if c < self.c_star {
            -1.0 / k
        } else {
            -self.one_minus_s(c) / k
        }
    }

    /// Point past which the density stays below [`DENSITY_CUTOFF`].
    pub fn truncation_point(&self) -> f64 {
        let mut x = self.c_star.ceil() + 1.0;
        while self.mu_density(x) >= DENSITY_CUTOFF {
            x += 1.0;
        }
        x
    }

    fn integrate_density(&self, weight: impl Fn(f64) -> f64, from: f64) -> f64 {
        let top = self.truncation_point();
        let from = from.max(0.0);
        let mut knots = vec![from];
        if from < self.c_star {
            knots.push(self.c_star);
        }
        let mut x = knots.last().unwrap().floor() + 1.0;
        while x < top {
            knots.push(x);
            x += 1.0;
        }
        knots.push(top.max(from));
        knots
            .windows(2)
            .map(|w| integrate(|x| weight(x) * self.mu_density(x), w[0], w[1], self.quad).0)
            .sum()
    }

    /// `mu(c, inf)` by quadrature of the density.
    pub fn mu_tail_quadrature(&self, c: f64) -> f64 {
        self.integrate_density(|_| 1.0, c)
    }

    /// `int x^alpha d mu(x)`.
    pub fn mu_moment(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        Ok(self.integrate_density(|x| x.powf(alpha), 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_threshold() {
        let law = LimitLaw::new(1).unwrap();
        assert_eq!((law.t_star(), law.c_star()), (1.0, 1.0));
        assert!(law.t_of_c(1.0 + 1e-9).unwrap() > 0.9999);
        assert!(law.t_of_c(0.99).is_err());
    }

    #[test]
    fn d1_at_two() {
        // independent check of the defining equation
        let t = LimitLaw::new(1).unwrap().t_of_c(2.0).unwrap();
        assert!((t - (-2.0 * (1.0 - t)).exp()).abs() < 1e-10);
        assert!((t - 0.20319).abs() < 5e-6);
        let s = LimitLaw::new(1).unwrap().s_of_x(2.0);
        assert!((s - 0.6349096).abs() < 1e-6);
    }

    #[test]
    fn defining_equation_residual() {
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            let mut c = law.c_star() + 0.01;
            while c <= 30.0 {
                let t = law.t_of_c(c).unwrap();
                let r = (t - (-c * (1.0 - t).powi(d as i32)).exp()).abs();
                assert!(r < 1e-10, "d={d} c={c} r={r}");
                assert!(t > 0.0 && t <= law.t_star());
                c += 0.07;
            }
        }
    }

    #[test]
    fn t_star_equation() {
        for d in 2..=4 {
            let (t, c) = compute_t_star_c_star(d).unwrap();
            let df = d as f64;
            let f = (df + 1.0) * (1.0 - t) + (1.0 + df * t) * t.ln();
            assert!(f.abs() < 1e-12, "d={d} residual {f}");
            assert!((psi_log(t.ln(), d) - c).abs() < 1e-12);
            assert!(c > 1.0);
        }
    }

    #[test]
    fn c_star_matches_grid_scan() {
        // scan (0, 1) at step 1e-6 for the first sign change
        let f = |t: f64| 3.0 * (1.0 - t) + (1.0 + 2.0 * t) * t.ln();
        let mut t = 1e-6;
        while f(t + 1e-6) < 0.0 {
            t += 1e-6;
        }
        let scanned_c = -t.ln() / (1.0 - t).powi(2);
        let (_, c) = compute_t_star_c_star(2).unwrap();
        // |dc/dt| at t_* is about 12, so a 1e-6 grid pins c_* to ~1.2e-5
        assert!((c - scanned_c).abs() < 2e-5, "{c} vs {scanned_c}");
    }

    #[test]
    fn shadow_density_shape() {
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            assert_eq!(law.s_of_x(law.c_star() / 2.0), 0.0);
            let mut prev = 0.0;
            let mut x = 0.0;
            while x < 40.0 {
                let s = law.s_of_x(x);
                assert!(s >= prev - 1e-15 && (0.0..=1.0).contains(&s));
                prev = s;
                x += 0.05;
            }
            assert!(1.0 - law.s_of_x(60.0) < 1e-12);
        }
    }

    #[test]
    fn probability_measure() {
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            assert!((law.mu_tail(0.0) - 1.0).abs() < 1e-10);
            assert_eq!(law.g(0.0), 0.0);
        }
    }

    #[test]
    fn first_moments() {
        let z3 = 1.202_056_903_159_594_2;
        assert!((LimitLaw::new(1).unwrap().mu_moment(1.0).unwrap() - z3).abs() < 1e-3);
        assert!((LimitLaw::new(2).unwrap().mu_moment(1.0).unwrap() - 1.56).abs() < 0.02);
        assert!(LimitLaw::new(1).unwrap().mu_moment(0.0).is_err());
    }

    #[test]
    fn tail_derivative() {
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            let h = 1e-5;
            for c in [0.3, 0.8, law.c_star() + 0.2, 5.0, 9.0, 17.0] {
                if (c - law.c_star()).abs() < 0.05 {
                    continue;
                }
                let fd = (law.h(c + h) - law.h(c - h)) / (2.0 * h);
                assert!((fd - law.h_prime(c)).abs() < 1e-5, "d={d} c={c}: {fd} vs {}", law.h_prime(c));
            }
        }
    }

    #[test]
    fn tail_continuous_at_threshold() {
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            let c = law.c_star();
            let left = law.h(c - 1e-12);
            let right = law.h(c + 1e-12);
            assert!((left - right).abs() < 1e-8, "d={d}: {left} vs {right}");
        }
    }

    #[test]
    fn tail_bound() {
        // fitted once on c >= 10: h(c) <= A c exp(-c / 2^d) with A = 2
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            let mut c = 10.0;
            while c < 40.0 {
                let bound = 2.0 * c * (-c / 2f64.powi(d as i32)).exp();
                assert!(law.h(c) <= bound + 1e-15, "d={d} c={c}");
                c += 0.5;
            }
        }
    }

    #[test]
    fn t_has_no_jumps() {
        for d in 1..=3 {
            let law = LimitLaw::new(d).unwrap();
            let mut step = 0.1;
            for _ in 0..3 {
                let mut c = law.c_star() + 0.5;
                let mut prev = law.t_of_c(c).unwrap();
                while c < 30.0 {
                    c += step;
                    let t = law.t_of_c(c).unwrap();
                    assert!(t <= prev);
                    // |t'(c)| <= t (1-t)^d / (1 - c d t (1-t)^{d-1}) stays below 1 here
                    assert!(prev - t <= step, "d={d} c={c}");
                    prev = t;
                }
                step /= 4.0;
            }
        }
    }
}
