//! Replicated Monte Carlo drivers over independent seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{binomial, Weight, WeightedComplex};
use crate::error::{Error, Result};
use crate::limit::LimitLaw;
use crate::linalg::FieldChoice;
use crate::msa::{betti, kruskal_msa, nearest_face_distances, Msa};
use crate::sampler::{augmented_complex, perturb, NoiseSpec, Seed, WeightLaw};
use crate::stats::{
    bulk_measure, extremal_from_msa, extremal_from_nearest, kolmogorov_between, kolmogorov_distance,
    poisson_diagnostics, tail_count_discrepancy, ExtremalPoints, Interval, NeumaierSum, PoissonDiagnostics,
    Rescaling,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub n: u32,
    pub d: u32,
    pub p: f64,
    pub law: WeightLaw,
    pub reps: u64,
    pub seed: u64,
    pub field: FieldChoice,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
}

impl Experiment {
    pub fn new(n: u32, d: u32, p: f64, reps: u64, seed: u64) -> Self {
        Self {
            n,
            d,
            p,
            law: WeightLaw::Uniform01,
            reps,
            seed,
            field: FieldChoice::default(),
            jobs: None,
        }
    }

    pub fn seed_of(&self, rep: u64) -> Seed {
        Seed::new(self.seed).replication(rep)
    }

    pub fn scale(&self) -> Rescaling<'_> {
        Rescaling {
            n: self.n,
            p: self.p,
            d: self.d,
            law: &self.law,
        }
    }

    pub fn complex(&self, rep: u64) -> Result<WeightedComplex> {
        augmented_complex(self.n, self.d, self.p, self.seed_of(rep), &self.law)
    }

    fn par_map<T: Send>(&self, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            builder = builder.num_threads(j.max(1));
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..self.reps).into_par_iter().map(f).collect())
    }
}

/// Mean, sample standard deviation and standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
}

impl Summary {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let xs: Vec<f64> = xs.into_iter().collect();
        let m = xs.len() as f64;
        let mut s = NeumaierSum::default();
        xs.iter().for_each(|&x| s.add(x));
        let mean = s.value() / m;
        let mut v = NeumaierSum::default();
        xs.iter().for_each(|&x| v.add((x - mean).powi(2)));
        let sd = if xs.len() > 1 { (v.value() / (m - 1.0)).sqrt() } else { 0.0 };
        Self {
            count: xs.len() as u64,
            mean,
            sd,
            se: sd / m.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BulkRow {
    pub rep: u64,
    pub kolmogorov: f64,
    pub exists: bool,
    pub total_weight: f64,
    pub msa_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BulkReport {
    pub n: u32,
    pub d: u32,
    pub p: f64,
    pub kolmogorov: Summary,
    pub existence_rate: f64,
    pub rows: Vec<BulkRow>,
}

/// `K(mu_{n,p}, mu)` per replication.
pub fn run_bulk(exp: &Experiment) -> Result<BulkReport> {
    let law = LimitLaw::new(exp.d)?;
    let rows = exp.par_map(|rep| {
        let c = exp.complex(rep)?;
        let msa = kruskal_msa(&c, exp.field);
        let emp = bulk_measure(&msa, &exp.scale());
        Ok(BulkRow {
            rep,
            kolmogorov: kolmogorov_distance(&emp, &law),
            exists: msa.exists,
            total_weight: msa.total_weight(),
            msa_size: msa.faces.len(),
        })
    })?;
    Ok(BulkReport {
        n: exp.n,
        d: exp.d,
        p: exp.p,
        kolmogorov: Summary::of(rows.iter().map(|r| r.kolmogorov)),
        existence_rate: rows.iter().filter(|r| r.exists).count() as f64 / rows.len().max(1) as f64,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescaleReport {
    pub n: u32,
    pub d: u32,
    pub ps: Vec<f64>,
    pub kolmogorov: Vec<Summary>,
    /// Mean over seeds of `|K_{p_i} - K_{p_0}|` for each `p_i`.
    pub paired_gap: Vec<f64>,
    /// `K` per (rep, p).
    pub rows: Vec<(u64, f64, f64)>,
}

/// Bulk distance for several `p` with the same seeds.
pub fn run_rescale(exp: &Experiment, ps: &[f64]) -> Result<RescaleReport> {
    if ps.is_empty() {
        return Err(Error::InvalidParameter("need at least one p".into()));
    }
    let reports = ps
        .iter()
        .map(|&p| run_bulk(&Experiment { p, ..exp.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let base = &reports[0].rows;
    let paired_gap = reports
        .iter()
        .map(|r| {
            Summary::of(r.rows.iter().zip(base).map(|(a, b)| (a.kolmogorov - b.kolmogorov).abs())).mean
        })
        .collect();
    let rows = reports
        .iter()
        .flat_map(|r| r.rows.iter().map(move |row| (row.rep, r.p, row.kolmogorov)))
        .collect();
    Ok(RescaleReport {
        n: exp.n,
        d: exp.d,
        ps: ps.to_vec(),
        kolmogorov: reports.iter().map(|r| r.kolmogorov).collect(),
        paired_gap,
        rows,
    })
}

/// Default windows for the extremal counts.
pub fn default_intervals() -> Vec<Interval> {
    vec![
        Interval::new(-1.0, 0.0),
        Interval::new(0.0, 1.0),
        Interval::above(1.0),
        Interval::above(0.0),
        Interval::above(-1.0),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremesRow {
    pub rep: u64,
    /// Counts of MSA points per interval.
    pub msa_counts: Vec<u64>,
    /// Counts of nearest-face points per interval.
    pub nearest_counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremesReport {
    pub n: u32,
    pub d: u32,
    pub p: f64,
    pub msa: PoissonDiagnostics,
    pub nearest: PoissonDiagnostics,
    /// `(c, E|nu(c, inf) - nu'(c, inf)|)`.
    pub discrepancy: Vec<(f64, f64)>,
    pub rows: Vec<ExtremesRow>,
}

/// Poisson diagnostics of the MSA and nearest-face extremal measures.
pub fn run_extremes(exp: &Experiment, intervals: &[Interval]) -> Result<ExtremesReport> {
    let pairs = exp.par_map(|rep| {
        let c = exp.complex(rep)?;
        let msa = kruskal_msa(&c, exp.field);
        let scale = exp.scale();
        Ok((extremal_from_msa(&msa, &scale), extremal_from_nearest(&nearest_face_distances(&c), &scale)))
    })?;
    let (nu, nu_prime): (Vec<ExtremalPoints>, Vec<ExtremalPoints>) = pairs.iter().cloned().unzip();
    let rows = pairs
        .iter()
        .enumerate()
        .map(|(rep, (a, b))| ExtremesRow {
            rep: rep as u64,
            msa_counts: intervals.iter().map(|&iv| a.count_in(iv)).collect(),
            nearest_counts: intervals.iter().map(|&iv| b.count_in(iv)).collect(),
        })
        .collect();
    Ok(ExtremesReport {
        n: exp.n,
        d: exp.d,
        p: exp.p,
        msa: poisson_diagnostics(&nu, intervals)?,
        nearest: poisson_diagnostics(&nu_prime, intervals)?,
        discrepancy: [-1.0, 0.0, 1.0]
            .iter()
            .map(|&c| (c, tail_count_discrepancy(&pairs, c)))
            .collect(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbRow {
    pub rep: u64,
    pub sup_norm: f64,
    /// Largest shift in the sorted matching of clean and perturbed MSA weights.
    pub matching_shift: f64,
    /// `K(mu'_{n,p}, mu_{n,p})`.
    pub kolmogorov: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbReport {
    pub n: u32,
    pub amplitude: f64,
    pub kolmogorov: Summary,
    pub rows: Vec<PerturbRow>,
}

/// Largest `|a_i - b_i|` after sorting both weight lists; `None` when the
/// sizes differ.
pub fn sorted_matching_shift(a: &Msa, b: &Msa) -> Option<f64> {
    if a.faces.len() != b.faces.len() {
        return None;
    }
    let mut x: Vec<f64> = a.faces.iter().map(|f| f.1.as_f64()).collect();
    let mut y: Vec<f64> = b.faces.iter().map(|f| f.1.as_f64()).collect();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    Some(x.iter().zip(&y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
}

/// Clean vs perturbed MSA of the same complex.
pub fn run_perturbation(exp: &Experiment, noise: &NoiseSpec) -> Result<PerturbReport> {
    let rows = exp.par_map(|rep| {
        let c = exp.complex(rep)?;
        let pert = perturb(&c, noise, exp.seed_of(rep));
        let clean = kruskal_msa(&c, exp.field);
        let noisy = kruskal_msa(&pert.complex, exp.field);
        let scale = exp.scale();
        Ok(PerturbRow {
            rep,
            sup_norm: pert.sup_norm,
            matching_shift: sorted_matching_shift(&clean, &noisy).unwrap_or(f64::INFINITY),
            kolmogorov: kolmogorov_between(&bulk_measure(&noisy, &scale), &bulk_measure(&clean, &scale)),
        })
    })?;
    Ok(PerturbReport {
        n: exp.n,
        amplitude: noise.amplitude.eval(exp.n),
        kolmogorov: Summary::of(rows.iter().map(|r| r.kolmogorov)),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryRow {
    pub rep: u64,
    /// `mu_{n,p} f - mu_{n,p} (f ^ b)` summed over the MSA.
    pub direct: f64,
    /// The same quantity through the Betti-number integral.
    pub via_betti: f64,
}

/// `(alpha / C(n-1,d)) int_{b^{1/alpha}}^inf s^{alpha-1} beta_{d-1}(s / np) ds`
/// by the midpoint rule with `steps` cells.
pub fn betti_integral(
    c: &WeightedComplex,
    msa: &Msa,
    scale: &Rescaling,
    alpha: f64,
    b: f64,
    steps: usize,
    field: FieldChoice,
) -> Result<f64> {
    let np = scale.n as f64 * scale.p;
    let lo = b.powf(1.0 / alpha);
    let top = msa.faces.last().map_or(0.0, |f| scale.bulk(f.1));
    if top <= lo {
        return Ok(0.0);
    }
    let h = (top - lo) / steps as f64;
    let mut sum = NeumaierSum::default();
    for i in 0..steps {
        let s = lo + (i as f64 + 0.5) * h;
        let beta = betti(c, Weight::Finite(s / np), scale.d - 1, field)?;
        sum.add(alpha * s.powf(alpha - 1.0) * beta as f64 * h);
    }
    Ok(sum.value() / binomial(scale.n as u64 - 1, scale.d as u64) as f64)
}

pub fn run_corollary(exp: &Experiment, alpha: f64, b: f64, steps: usize) -> Result<Vec<CorollaryRow>> {
    if exp.law != WeightLaw::Uniform01 {
        return Err(Error::Unsupported("the Betti integral route assumes uniform weights".into()));
    }
    exp.par_map(|rep| {
        let c = exp.complex(rep)?;
        let msa = kruskal_msa(&c, exp.field);
        let scale = exp.scale();
        let direct = bulk_measure(&msa, &scale).integrate(|x| (x.powf(alpha) - b).max(0.0));
        Ok(CorollaryRow {
            rep,
            direct,
            via_betti: betti_integral(&c, &msa, &scale, alpha, b, steps, exp.field)?,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{Amplitude, NoiseMode};

    #[test]
    fn summary_of_known_values() {
        let s = Summary::of([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bulk_is_deterministic_across_job_counts() {
        let mut exp = Experiment::new(30, 1, 1.0, 6, 11);
        exp.jobs = Some(1);
        let a = run_bulk(&exp).unwrap();
        exp.jobs = Some(3);
        let b = run_bulk(&exp).unwrap();
        assert_eq!(a, b);
        assert!(a.kolmogorov.mean > 0.0 && a.kolmogorov.mean < 1.0);
    }

    #[test]
    fn perturbation_within_sup_norm() {
        let exp = Experiment::new(40, 1, 1.0, 5, 2);
        let noise = NoiseSpec {
            amplitude: Amplitude { coef: 1.0, exponent: -2.0 },
            mode: NoiseMode::Iid,
        };
        for r in run_perturbation(&exp, &noise).unwrap().rows {
            assert!(r.matching_shift <= r.sup_norm * (1.0 + 1e-12) + 1e-16);
        }
    }

    #[test]
    fn layer_cake_routes_agree() {
        let exp = Experiment::new(20, 1, 1.0, 3, 4);
        for r in run_corollary(&exp, 1.0, 1.0, 4000).unwrap() {
            // 19 jumps of height 1/19, each off by at most one cell of width <= 20/4000
            assert!((r.direct - r.via_betti).abs() <= 20.0 / 4000.0 + 1e-12);
        }
    }

    #[test]
    fn extremes_report_shapes() {
        let exp = Experiment::new(30, 1, 1.0, 4, 1);
        let rep = run_extremes(&exp, &default_intervals()).unwrap();
        assert_eq!(rep.rows.len(), 4);
        assert_eq!(rep.msa.intervals.len(), 5);
        assert_eq!(rep.discrepancy.len(), 3);
    }
}
