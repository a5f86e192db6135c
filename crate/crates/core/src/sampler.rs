//! Random Linial–Meshulam complexes, their weighted and augmented variants,
//! and bounded noisy perturbations of face weights.
//!
//! All randomness comes from ChaCha8 keyed by `(seed, purpose)` with the
//! replication index as the stream id, so every replication is reproducible
//! on its own.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::complex::{binomial, check_dims, FaceRank, Weight, WeightedComplex};
use crate::error::{Error, Result};

/// Root seed plus replication index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed {
    pub seed: u64,
    pub index: u64,
}

/// Independent uses of one seed draw from disjoint generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Faces,
    Noise,
    Shadow,
    Order,
}

impl Purpose {
    fn key(self) -> u64 {
        match self {
            Purpose::Faces => 0,
            Purpose::Noise => 0x6a09_e667_f3bc_c908,
            Purpose::Shadow => 0xbb67_ae85_84ca_a73b,
            Purpose::Order => 0x3c6e_f372_fe94_f82b,
        }
    }
}

impl Seed {
    pub fn new(seed: u64) -> Self {
        Self { seed, index: 0 }
    }

    pub fn replication(self, index: u64) -> Self {
        Self { index, ..self }
    }

    pub fn rng(&self, purpose: Purpose) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ purpose.key());
        rng.set_stream(self.index);
        rng
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.seed, self.index)
    }
}

/// Piecewise-linear CDF through `(x, F(x))` knots. A repeated `x` with two
/// different `F` values encodes a jump.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl CdfTable {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParameter("CDF table needs two knots".into()));
        }
        let ok = knots.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1)
            && knots.iter().all(|k| k.0.is_finite() && (0.0..=1.0).contains(&k.1));
        if !ok || knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 1.0 {
            return Err(Error::InvalidParameter(
                "CDF table must be nondecreasing from 0 to 1".into(),
            ));
        }
        Ok(Self {
            xs: knots.iter().map(|k| k.0).collect(),
            fs: knots.iter().map(|k| k.1).collect(),
        })
    }

    pub fn is_continuous(&self) -> bool {
        self.xs
            .windows(2)
            .zip(self.fs.windows(2))
            .all(|(x, f)| x[0] < x[1] || f[0] == f[1])
    }

    fn cdf(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&k| k <= x);
        if i == 0 {
            return 0.0;
        }
        if i == self.xs.len() {
            return 1.0;
        }
        let (x0, x1, f0, f1) = (self.xs[i - 1], self.xs[i], self.fs[i - 1], self.fs[i]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    fn quantile(&self, u: f64) -> f64 {
        let i = self.fs.partition_point(|&f| f <= u).clamp(1, self.fs.len() - 1);
        let (x0, x1, f0, f1) = (self.xs[i - 1], self.xs[i], self.fs[i - 1], self.fs[i]);
        if f1 == f0 {
            x1
        } else {
            x0 + (x1 - x0) * (u - f0) / (f1 - f0)
        }
    }
}

/// Distribution of the weights on present d-faces.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightLaw {
    Uniform01,
    Exponential { rate: f64 },
    Table(CdfTable),
}

impl WeightLaw {
    pub fn cdf(&self, w: Weight) -> f64 {
        let x = match w {
            Weight::NegInf => return 0.0,
            Weight::PosInf => return 1.0,
            Weight::Finite(x) => x,
        };
        match self {
            WeightLaw::Uniform01 => x.clamp(0.0, 1.0),
            WeightLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            WeightLaw::Table(t) => t.cdf(x),
        }
    }

    pub fn is_continuous(&self) -> bool {
        match self {
            WeightLaw::Table(t) => t.is_continuous(),
            _ => true,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            WeightLaw::Uniform01 => rng.gen::<f64>(),
            WeightLaw::Exponential { rate } => Exp::new(*rate).expect("validated rate").sample(rng),
            WeightLaw::Table(t) => t.quantile(rng.gen::<f64>()),
        }
    }

    /// Weight of lower-dimensional faces in the augmented complex.
    pub fn floor(&self) -> Weight {
        match self {
            WeightLaw::Uniform01 => Weight::Finite(0.0),
            _ => Weight::NegInf,
        }
    }

    /// Weight given to absent d-faces in the augmented complex.
    pub fn ceiling(&self) -> Weight {
        match self {
            WeightLaw::Uniform01 => Weight::Finite(1.0),
            _ => Weight::PosInf,
        }
    }
}

impl FromStr for WeightLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform01" {
            return Ok(WeightLaw::Uniform01);
        }
        if let Some(rate) = s.strip_prefix("exp:") {
            let rate: f64 = rate
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad rate in {s:?}")))?;
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
            }
            return Ok(WeightLaw::Exponential { rate });
        }
        Err(Error::InvalidParameter(format!(
            "unknown law {s:?} (expected uniform01 or exp:LAMBDA)"
        )))
    }
}

impl fmt::Display for WeightLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightLaw::Uniform01 => write!(f, "uniform01"),
            WeightLaw::Exponential { rate } => write!(f, "exp:{rate}"),
            WeightLaw::Table(t) => write!(f, "table[{}]", t.xs.len()),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    Ok(())
}

fn bernoulli_ranks(count: u64, p: f64, rng: &mut ChaCha8Rng) -> Vec<FaceRank> {
    if p == 0.0 {
        return Vec::new();
    }
    if p == 1.0 {
        return (0..count).collect();
    }
    if p > 0.1 {
        return (0..count).filter(|_| rng.gen::<f64>() < p).collect();
    }
    // geometric gaps between successes
    let log_q = (-p).ln_1p();
    let mut out = Vec::with_capacity((count as f64 * p * 1.2) as usize + 8);
    let mut pos: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let gap = (u.ln() / log_q).floor();
        if gap >= (count - pos) as f64 {
            break;
        }
        pos += gap as u64;
        out.push(pos);
        pos += 1;
        if pos >= count {
            break;
        }
    }
    out
}

/// Ranks of the d-faces of one sample of `Y_d(n, p)`.
pub fn sample_y(n: u32, d: u32, p: f64, seed: Seed) -> Result<Vec<FaceRank>> {
    check_dims(n, d)?;
    check_p(p)?;
    let count = binomial(n as u64, d as u64 + 1);
    Ok(bernoulli_ranks(count, p, &mut seed.rng(Purpose::Faces)))
}

fn weighted_faces(n: u32, d: u32, p: f64, seed: Seed, law: &WeightLaw) -> Result<Vec<(FaceRank, Weight)>> {
    if !law.is_continuous() {
        return Err(Error::DiscontinuousLaw(law.to_string()));
    }
    check_dims(n, d)?;
    check_p(p)?;
    let count = binomial(n as u64, d as u64 + 1);
    let mut rng = seed.rng(Purpose::Faces);
    let ranks = bernoulli_ranks(count, p, &mut rng);
    ranks
        .into_iter()
        .map(|r| Weight::finite(law.sample(&mut rng)).map(|w| (r, w)))
        .collect()
}

/// The augmented d-complex `L(n, p)`: faces of `Y_d(n, p)` carry i.i.d.
/// weights from `law`, the rest sit at the law's ceiling.
pub fn augmented_complex(n: u32, d: u32, p: f64, seed: Seed, law: &WeightLaw) -> Result<WeightedComplex> {
    let faces = weighted_faces(n, d, p, seed, law)?;
    WeightedComplex::new(n, d, faces, law.floor(), law.ceiling())
}

/// Weighted `Y_d(n, p)`: lower faces at `-inf`, absent d-faces never enter.
pub fn weighted_y(n: u32, d: u32, p: f64, seed: Seed, law: &WeightLaw) -> Result<WeightedComplex> {
    let faces = weighted_faces(n, d, p, seed, law)?;
    WeightedComplex::new(n, d, faces, Weight::NegInf, Weight::PosInf)
}

/// Noise amplitude `a(n) = coef * n^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitude {
    pub coef: f64,
    pub exponent: f64,
}

impl Amplitude {
    pub fn zero() -> Self {
        Self { coef: 0.0, exponent: 0.0 }
    }

    pub fn eval(&self, n: u32) -> f64 {
        self.coef * (n as f64).powf(self.exponent)
    }
}

impl FromStr for Amplitude {
    type Err = Error;

    /// Accepts `C`, `n^E`, or `C*n^E`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad amplitude {s:?} (try 0.01, n^-2 or 3*n^-1.5)"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (coef, rest) = match t.split_once('*') {
            Some((c, r)) => (c.parse::<f64>().map_err(|_| bad())?, Some(r)),
            None if t.starts_with('n') => (1.0, Some(t.as_str())),
            None => (t.parse::<f64>().map_err(|_| bad())?, None),
        };
        let exponent = match rest {
            None => 0.0,
            Some("n") => 1.0,
            Some(r) => r
                .strip_prefix("n^")
                .and_then(|e| e.parse::<f64>().ok())
                .ok_or_else(bad)?,
        };
        if !(coef >= 0.0 && coef.is_finite()) {
            return Err(bad());
        }
        Ok(Self { coef, exponent })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseMode {
    /// Independent uniform noise on `[-a, a]` per face.
    #[default]
    Iid,
    /// One uniform draw on `[-a, a]` shared by every face.
    CommonShift,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub amplitude: Amplitude,
    pub mode: NoiseMode,
}

#[derive(Clone, Debug)]
pub struct Perturbed {
    pub complex: WeightedComplex,
    /// Realized `max |w'(sigma) - w(sigma)|`.
    pub sup_norm: f64,
}

/// Adds bounded noise to every finite d-face weight.
pub fn perturb(complex: &WeightedComplex, noise: &NoiseSpec, seed: Seed) -> Perturbed {
    let a = noise.amplitude.eval(complex.n());
    let mut rng = seed.rng(Purpose::Noise);
    let shift = if a > 0.0 { rng.gen_range(-a..=a) } else { 0.0 };
    let mut sup: f64 = 0.0;
    let mut below_floor = false;
    let floor = complex.floor();
    let out = complex.map_weights(|_, w| match w {
        Weight::Finite(x) if a > 0.0 => {
            let eps = match noise.mode {
                NoiseMode::Iid => rng.gen_range(-a..=a),
                NoiseMode::CommonShift => shift,
            };
            let y = x + eps;
            sup = sup.max((y - x).abs());
            let nw = Weight::Finite(y);
            below_floor |= nw < floor;
            nw
        }
        other => other,
    });
    let complex = if below_floor { out.with_floor(Weight::NegInf) } else { out };
    Perturbed { complex, sup_norm: sup }
}
