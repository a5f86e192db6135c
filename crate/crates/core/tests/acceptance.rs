//! Acceptance criteria. Each test prints one verdict line to stderr
//! (bypassing output capture) and then asserts it.

use std::io::Write;
use std::time::{Duration, Instant};

use msa_lab::complex::{binomial, Weight, WeightedComplex};
use msa_lab::experiment::{run_bulk, run_perturbation, run_rescale, Experiment};
use msa_lab::limit::LimitLaw;
use msa_lab::linalg::FieldChoice;
use msa_lab::msa::{
    betti, isolated_ridges, kruskal_msa, persistence_deaths, shadow, shadow_faces, ShadowMode, StrictThreshold,
};
use msa_lab::oracle::brute_force_msa;
use msa_lab::sampler::{augmented_complex, weighted_y, Amplitude, NoiseMode, NoiseSpec, Seed, WeightLaw};
use msa_lab::stats::{
    extremal_from_deaths, extremal_from_msa, extremal_from_nearest, poisson_diagnostics, Interval, Rescaling,
};
use msa_lab::msa::nearest_face_distances;
use msa_lab::streaming::{reveal_schedule, stream_init, RevealOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZETA3: f64 = 1.202_056_903_159_594_3;

fn verdict(id: u32, name: &str, ok: bool, detail: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = ok && in_time;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id:>2} [{}] {name}: {detail} ({:.1}s of {}s budget)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its runtime budget: {elapsed:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

/// Smallest root of `t = exp(-c (1 - t))` by plain bisection on `[0, 1)`.
fn giant_component_t(c: f64) -> f64 {
    let f = |t: f64| t - (-c * (1.0 - t)).exp();
    let (mut lo, mut hi) = (0.0, 1.0 - 1.0 / c);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn c01_first_moment() {
    let start = Instant::now();
    let m1 = LimitLaw::new(1).unwrap().mu_moment(1.0).unwrap();
    let m2 = LimitLaw::new(2).unwrap().mu_moment(1.0).unwrap();
    let ok = (m1 - ZETA3).abs() < 1e-3 && (m2 - 1.56).abs() < 0.02;
    verdict(1, "first moment of mu", ok, &format!("d=1: {m1:.7} vs zeta(3), d=2: {m2:.5} vs 1.56"), start, secs(5));
}

#[test]
fn c02_tail_closed_form() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        let law = LimitLaw::new(d).unwrap();
        for i in 0..=60 {
            let c = 0.5 * i as f64;
            worst = worst.max((law.h(c) - law.mu_tail_quadrature(c)).abs());
        }
    }
    verdict(2, "h(c) vs tail quadrature", worst < 1e-6, &format!("max gap {worst:.2e}"), start, secs(30));
}

#[test]
fn c03_probability_measure() {
    let start = Instant::now();
    let worst = (1..=3)
        .map(|d| (LimitLaw::new(d).unwrap().h(0.0) - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(3, "h(0) = 1", worst < 1e-10, &format!("max |h(0) - 1| = {worst:.2e}"), start, secs(5));
}

#[test]
fn c04_msa_equals_deaths() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    let mut with_msa = 0;
    for i in 0..200u64 {
        let d = 1 + (i % 2) as u32;
        let p = if (i / 2) % 2 == 0 { 0.5 } else { 1.0 };
        let n = rng.gen_range(d + 2..=40);
        let c = augmented_complex(n, d, p, Seed::new(400 + i), &WeightLaw::Uniform01).unwrap();
        let msa = kruskal_msa(&c, FieldChoice::Gf2);
        if !msa.exists {
            continue;
        }
        with_msa += 1;
        let deaths = persistence_deaths(&c, FieldChoice::Gf2);
        let mut dts: Vec<f64> = deaths.deaths.iter().map(|w| w.as_f64()).collect();
        dts.extend(std::iter::repeat_n(c.ceiling().as_f64(), deaths.ceiling_deaths));
        let ws: Vec<f64> = msa.faces.iter().map(|f| f.1.as_f64()).collect();
        if sorted(dts) != sorted(ws) || deaths.unkilled != 0 {
            bad.push((n, d, p, i));
        }
    }
    verdict(
        4,
        "MSA weights = death times",
        bad.is_empty() && with_msa == 200,
        &format!("{with_msa} instances with an MSA, mismatches {bad:?}"),
        start,
        secs(120),
    );
}

#[test]
fn c05_brute_force_oracle() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for seed in 0..30u64 {
        let c = augmented_complex(6, 2, 1.0, Seed::new(seed), &WeightLaw::Uniform01).unwrap();
        let brute = brute_force_msa(&c).unwrap().expect("full complex has an acycle");
        let msa = kruskal_msa(&c, FieldChoice::Gf2);
        if brute.total_weight != msa.total_weight() {
            bad.push((seed, brute.total_weight, msa.total_weight()));
        }
    }
    verdict(5, "Kruskal vs exhaustive search", bad.is_empty(), &format!("30 seeds, mismatches {bad:?}"), start, secs(60));
}

#[test]
fn c06_shadow_duality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    let mut checked = 0u64;
    for i in 0..50u64 {
        let d = 1 + (i % 2) as u32;
        let n = rng.gen_range(d + 2..=12);
        let p = [0.5, 1.0][rng.gen_range(0..2)];
        let c = augmented_complex(n, d, p, Seed::new(600 + i), &WeightLaw::Uniform01).unwrap();
        let msa = kruskal_msa(&c, FieldChoice::Gf2);
        for (r, w) in c.filtration() {
            let sh = shadow_faces(&c, StrictThreshold::before_face(r, w), FieldChoice::Gf2);
            checked += 1;
            if msa.contains(r) == sh.contains(&r) {
                bad.push((i, r));
            }
        }
    }
    verdict(6, "MSA iff outside the shadow", bad.is_empty(), &format!("{checked} faces, violations {bad:?}"), start, secs(120));
}

#[test]
fn c07_shadow_density() {
    let start = Instant::now();
    let (n, c) = (2000u32, 3.0);
    let reps = 20;
    let mut total = 0.0;
    for i in 0..reps {
        let cx = augmented_complex(n, 1, 1.0, Seed::new(7).replication(i), &WeightLaw::Uniform01).unwrap();
        let thr = StrictThreshold::below(Weight::Finite(c / n as f64));
        let r = shadow(&cx, thr, ShadowMode::Sampled(20_000), FieldChoice::Gf2, Seed::new(70).replication(i)).unwrap();
        total += r.density;
    }
    let density = total / reps as f64;
    let target = (1.0 - giant_component_t(c)).powi(2);
    verdict(
        7,
        "shadow density of Y(n, 3/n)",
        (density - target).abs() < 0.02,
        &format!("empirical {density:.4} vs (1 - t(3))^2 = {target:.4}"),
        start,
        secs(60),
    );
}

#[test]
fn c08_bulk_convergence() {
    let start = Instant::now();
    let means: Vec<(u32, f64, f64)> = [100u32, 300, 1000]
        .iter()
        .map(|&n| {
            let r = run_bulk(&Experiment::new(n, 1, 1.0, 20, 8)).unwrap();
            (n, r.kolmogorov.mean, r.kolmogorov.se)
        })
        .collect();
    let at300 = means[1].1;
    let monotone = means.windows(2).all(|w| w[1].1 < w[0].1);
    let detail = means
        .iter()
        .map(|(n, m, se)| format!("n={n}: {m:.4}+-{se:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        8,
        "bulk Kolmogorov distance",
        at300 < 0.05 && monotone,
        &format!("{detail}; need n=300 < 0.05 and decreasing"),
        start,
        secs(180),
    );
}

#[test]
fn c09_rescaling_collapse() {
    let start = Instant::now();
    let r = run_rescale(&Experiment::new(500, 1, 1.0, 20, 9), &[1.0, 0.5]).unwrap();
    let gap = r.paired_gap[1];
    verdict(
        9,
        "p-rescaling collapse",
        gap < 0.02,
        &format!(
            "mean |K(p=0.5) - K(p=1)| = {gap:.4} (K means {:.4}, {:.4})",
            r.kolmogorov[0].mean, r.kolmogorov[1].mean
        ),
        start,
        secs(180),
    );
}

#[test]
fn c10_extremes() {
    let start = Instant::now();
    let bins = [Interval::new(-1.0, 0.0), Interval::new(0.0, 1.0), Interval::above(1.0)];
    let tails = [Interval::above(0.0), Interval::above(-1.0)];
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [0.5, 1.0] {
        let exp = Experiment::new(500, 1, p, 500, 10);
        let reps: Vec<_> = (0..exp.reps)
            .map(|rep| extremal_from_msa(&kruskal_msa(&exp.complex(rep).unwrap(), FieldChoice::Gf2), &exp.scale()))
            .collect();
        let all: Vec<Interval> = tails.iter().chain(&bins).copied().collect();
        let diag = poisson_diagnostics(&reps, &all).unwrap();
        let (above0, above_m1) = (&diag.intervals[0], &diag.intervals[1]);
        ok &= (above0.mean - 1.0).abs() <= 0.15;
        ok &= (above_m1.mean / std::f64::consts::E - 1.0).abs() <= 0.15;
        for s in [above0, above_m1] {
            ok &= (0.8..=1.25).contains(&s.dispersion());
        }
        for s in &diag.intervals[2..] {
            ok &= (s.factorial_moments[0] - s.targets[0]).abs() <= 3.0 * s.std_error;
        }
        detail.push(format!(
            "p={p}: E nu(0,inf)={:.3} E nu(-1,inf)={:.3} var/mean={:.3},{:.3} bins [{}]",
            above0.mean,
            above_m1.mean,
            above0.dispersion(),
            above_m1.dispersion(),
            diag.intervals[2..]
                .iter()
                .map(|s| format!("{:.3} vs {:.3}+-{:.3}", s.factorial_moments[0], s.targets[0], 3.0 * s.std_error))
                .collect::<Vec<_>>()
                .join("; ")
        ));
    }
    verdict(10, "Poisson extremes", ok, &detail.join(" | "), start, secs(600));
}

#[test]
fn c11_count_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let law = WeightLaw::Uniform01;
    let mut bad = Vec::new();
    let mut checks = 0;
    for i in 0..50u64 {
        let d = 1 + (i % 2) as u32;
        let n = if d == 1 { rng.gen_range(12..=40) } else { rng.gen_range(10..=16) };
        let p = [0.5, 1.0][rng.gen_range(0..2)];
        let c = augmented_complex(n, d, p, Seed::new(1100 + i), &law).unwrap();
        let scale = Rescaling { n, p, d, law: &law };
        let deaths = persistence_deaths(&c, FieldChoice::Gf2);
        let nu_tilde = extremal_from_deaths(&deaths, c.ceiling(), &scale);
        let nu_prime = extremal_from_nearest(&nearest_face_distances(&c), &scale);
        for cc in [-1.0, 0.0, 1.0] {
            let r = scale.raw_threshold(cc);
            assert!((0.0..1.0).contains(&r), "threshold {r} outside [0, 1) for n={n} d={d} p={p}");
            let b = betti(&c, Weight::Finite(r), d - 1, FieldChoice::Gf2).unwrap();
            let iso = isolated_ridges(&c, Weight::Finite(r));
            checks += 1;
            if nu_tilde.count_above(cc) != b || nu_prime.count_above(cc) != iso {
                bad.push((i, cc, nu_tilde.count_above(cc), b, nu_prime.count_above(cc), iso));
            }
        }
    }
    verdict(11, "count identities", bad.is_empty(), &format!("{checks} checks, mismatches {bad:?}"), start, secs(120));
}

#[test]
fn c12_perturbation() {
    let start = Instant::now();
    let noise = NoiseSpec {
        amplitude: Amplitude { coef: 1.0, exponent: -2.0 },
        mode: NoiseMode::Iid,
    };
    let mut ok = true;
    let mut stats = Vec::new();
    for n in [100u32, 300] {
        let r = run_perturbation(&Experiment::new(n, 1, 1.0, 20, 12), &noise).unwrap();
        for row in &r.rows {
            ok &= row.matching_shift <= row.sup_norm * (1.0 + 1e-12);
        }
        stats.push((n, r.kolmogorov));
    }
    let (k100, k300) = (stats[0].1, stats[1].1);
    let band = 3.0 * (k100.se.powi(2) + k300.se.powi(2)).sqrt();
    ok &= k300.mean <= k100.mean + band;
    // points move by at most n p / n^2 = 1/n, so K is of order (points within 1/n of a step) / n
    ok &= k300.mean < 0.02;
    verdict(
        12,
        "perturbation stability",
        ok,
        &format!(
            "matching within sup-norm; K(mu', mu): n=100 {:.5}+-{:.5}, n=300 {:.5}+-{:.5}",
            k100.mean, k100.se, k300.mean, k300.se
        ),
        start,
        secs(120),
    );
}

#[test]
fn c13_generic_distribution() {
    let start = Instant::now();
    let mut exp = Experiment::new(300, 1, 1.0, 20, 13);
    exp.law = WeightLaw::Exponential { rate: 1.0 };
    let r = run_bulk(&exp).unwrap();
    verdict(
        13,
        "exponential weights",
        r.kolmogorov.mean < 0.05,
        &format!("mean K = {:.4}+-{:.4}, need < 0.05", r.kolmogorov.mean, r.kolmogorov.se),
        start,
        secs(60),
    );
}

#[test]
fn c14_streaming() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut bad = Vec::new();
    for i in 0..50u64 {
        let d = 1 + (i % 2) as u32;
        let n = rng.gen_range(d + 2..=30);
        let schedule = reveal_schedule(n, d, Seed::new(1400 + i), RevealOrder::Random);
        let mut s = stream_init(n, d, FieldChoice::Gf2).unwrap();
        let mut prev = s.total_weight();
        let mut monotone = true;
        for &(r, w) in &schedule {
            s.reveal(r, w).unwrap();
            monotone &= s.total_weight() <= prev;
            prev = s.total_weight();
        }
        let full = WeightedComplex::uniform(n, d, schedule.clone()).unwrap();
        let batch = kruskal_msa(&full, FieldChoice::Gf2);
        if !monotone || s.msa() != &batch {
            bad.push((i, n, d));
        }
    }
    verdict(14, "streaming = batch", bad.is_empty(), &format!("50 streams, failures {bad:?}"), start, secs(120));
}

#[test]
fn c15_field_cross_check() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut bad = Vec::new();
    let fields = [FieldChoice::Gf2, FieldChoice::GfP(1009), FieldChoice::Rational];
    for i in 0..100u64 {
        let n = rng.gen_range(4..=10);
        let p = rng.gen_range(0.05..1.0);
        let c = weighted_y(n, 2, p, Seed::new(1500 + i), &WeightLaw::Uniform01).unwrap();
        let ranks: Vec<u64> = fields
            .iter()
            .map(|&f| {
                let mut basis = f.basis(c.ridge_count() as usize);
                for &(r, _) in c.present() {
                    let col: Vec<(usize, i8)> = msa_lab::complex::boundary_ranks(r, n, 2)
                        .iter()
                        .map(|&(t, s)| (t as usize, s))
                        .collect();
                    basis.absorb_signed(&col);
                }
                basis.rank() as u64
            })
            .collect();
        if ranks.iter().any(|&r| r != ranks[0]) {
            bad.push(format!("ranks {ranks:?} for {}", c.to_json().unwrap()));
        }
    }
    let _ = binomial(10, 3);
    verdict(15, "GF(2), GF(1009), Q ranks", bad.is_empty(), &format!("100 instances, disagreements {bad:?}"), start, secs(60));
}
