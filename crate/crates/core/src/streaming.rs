//! MSA maintenance while face weights are revealed one at a time.
//!
//! Unrevealed faces sit at weight 1. Each reveal re-runs Kruskal on the old
//! MSA plus the revealed face, which by the matroid exchange property is the
//! MSA of the partially revealed complex.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::complex::{binomial, FaceRank, Weight, WeightedComplex};
use crate::error::{Error, Result};
use crate::limit::LimitLaw;
use crate::linalg::FieldChoice;
use crate::msa::{kruskal_over, Msa};
use crate::sampler::{Purpose, Seed};

#[derive(Clone, Debug)]
pub struct StreamState {
    shape: WeightedComplex,
    field: FieldChoice,
    msa: Msa,
    revealed: HashSet<FaceRank>,
}

/// Initial MSA of the all-ones complex: the first `C(n-1, d)` independent
/// faces in rank order.
pub fn stream_init(n: u32, d: u32, field: FieldChoice) -> Result<StreamState> {
    let shape = WeightedComplex::new(n, d, Vec::new(), Weight::Finite(0.0), Weight::Finite(1.0))?;
    let msa = kruskal_over(shape.filtration().into_iter(), &shape, field);
    debug_assert!(msa.exists);
    Ok(StreamState {
        shape,
        field,
        msa,
        revealed: HashSet::new(),
    })
}

impl StreamState {
    pub fn n(&self) -> u32 {
        self.shape.n()
    }

    pub fn d(&self) -> u32 {
        self.shape.d()
    }

    /// Number of revealed faces.
    pub fn k(&self) -> u64 {
        self.revealed.len() as u64
    }

    pub fn msa(&self) -> &Msa {
        &self.msa
    }

    pub fn total_weight(&self) -> f64 {
        self.msa.total_weight()
    }

    pub fn is_revealed(&self, face: FaceRank) -> bool {
        self.revealed.contains(&face)
    }

    /// Reveals the weight of `face`, a value in `[0, 1)`.
    pub fn reveal(&mut self, face: FaceRank, weight: f64) -> Result<()> {
        if face >= self.shape.face_count() {
            return Err(Error::RankOutOfRange {
                rank: face,
                n: self.n(),
                d: self.d(),
                count: self.shape.face_count(),
            });
        }
        if !(0.0..1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "revealed weight {weight} outside [0, 1)"
            )));
        }
        if !self.revealed.insert(face) {
            return Err(Error::DoubleReveal(face));
        }
        let w = Weight::Finite(weight);
        let mut candidates: Vec<(FaceRank, Weight)> = self
            .msa
            .faces
            .iter()
            .copied()
            .filter(|&(r, _)| r != face)
            .collect();
        candidates.push((face, w));
        candidates.sort_unstable_by_key(|&(r, w)| (w, r));
        self.msa = kruskal_over(candidates.into_iter(), &self.shape, self.field);
        Ok(())
    }

    /// The partially revealed complex, unrevealed faces at weight 1.
    pub fn revealed_complex(&self, weights: &[(FaceRank, f64)]) -> Result<WeightedComplex> {
        let faces = weights
            .iter()
            .filter(|(r, _)| self.revealed.contains(r))
            .map(|&(r, w)| (r, Weight::Finite(w)))
            .collect();
        WeightedComplex::new(self.n(), self.d(), faces, Weight::Finite(0.0), Weight::Finite(1.0))
    }
}

/// Normalizing constant `c_1` for the streamed total weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum C1Scaling {
    /// `n / C(n-1, d)`.
    #[default]
    AcycleSize,
    /// `n / C(n, d-1)`.
    LowerFaces,
}

impl C1Scaling {
    pub fn value(self, n: u32, d: u32) -> f64 {
        let denom = match self {
            C1Scaling::AcycleSize => binomial(n as u64 - 1, d as u64),
            C1Scaling::LowerFaces => binomial(n as u64, d as u64 - 1),
        };
        n as f64 / denom as f64
    }
}

/// `c_2 / k` with `c_2 = C(n, d+1) * int x dmu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConjectureCurve {
    c2: f64,
}

impl ConjectureCurve {
    pub fn new(n: u32, d: u32, law: &LimitLaw) -> Result<Self> {
        if law.d() != d {
            return Err(Error::InvalidParameter(format!(
                "limit law is for d = {}, stream has d = {d}",
                law.d()
            )));
        }
        Ok(Self {
            c2: binomial(n as u64, d as u64 + 1) as f64 * law.mu_moment(1.0)?,
        })
    }

    pub fn at(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidParameter("conjecture curve needs k >= 1".into()));
        }
        Ok(self.c2 / k as f64)
    }
}

pub fn conjecture_curve(k: u64, n: u32, d: u32, law: &LimitLaw) -> Result<f64> {
    ConjectureCurve::new(n, d, law)?.at(k)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum RevealOrder {
    #[default]
    Random,
    Rank,
}

impl std::str::FromStr for RevealOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(RevealOrder::Random),
            "rank" => Ok(RevealOrder::Rank),
            _ => Err(Error::InvalidParameter(format!("unknown reveal order {s:?}"))),
        }
    }
}

/// Uniform `[0, 1)` weights for every d-face, listed in reveal order.
pub fn reveal_schedule(n: u32, d: u32, seed: Seed, order: RevealOrder) -> Vec<(FaceRank, f64)> {
    let count = binomial(n as u64, d as u64 + 1);
    let mut wrng = seed.rng(Purpose::Faces);
    let mut schedule: Vec<(FaceRank, f64)> = (0..count).map(|r| (r, wrng.gen::<f64>())).collect();
    if order == RevealOrder::Random {
        schedule.shuffle(&mut seed.rng(Purpose::Order));
    }
    schedule
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StreamPoint {
    pub k: u64,
    pub total_weight: f64,
    pub c1_scaled: f64,
    pub conjecture: f64,
}

/// Runs a full stream and records `(k, w(M_n(k)), c_1 w(M_n(k)), c_2 / k)`
/// at every `every`-th reveal and at the last one.
pub fn run_stream(
    n: u32,
    d: u32,
    seed: Seed,
    order: RevealOrder,
    scaling: C1Scaling,
    field: FieldChoice,
    every: u64,
) -> Result<(Vec<StreamPoint>, StreamState)> {
    let schedule = reveal_schedule(n, d, seed, order);
    let mut state = stream_init(n, d, field)?;
    let curve = ConjectureCurve::new(n, d, &LimitLaw::new(d)?)?;
    let c1 = scaling.value(n, d);
    let last = schedule.len() as u64;
    let every = every.max(1);
    let mut out = Vec::new();
    for (r, w) in schedule {
        state.reveal(r, w)?;
        let k = state.k();
        if k % every == 0 || k == last {
            let total = state.total_weight();
            out.push(StreamPoint {
                k,
                total_weight: total,
                c1_scaled: c1 * total,
                conjecture: curve.at(k)?,
            });
        }
    }
    Ok((out, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msa::kruskal_msa;

    #[test]
    fn initial_msa_is_a_star() {
        let s = stream_init(6, 1, FieldChoice::Gf2).unwrap();
        let stars: Vec<FaceRank> = (1..6).map(|v| crate::complex::binomial(v, 2)).collect();
        let got: Vec<FaceRank> = s.msa().faces.iter().map(|f| f.0).collect();
        assert_eq!(got, stars);
        assert_eq!(s.total_weight(), 5.0);
    }

    #[test]
    fn initial_msa_has_full_size() {
        let s = stream_init(7, 2, FieldChoice::Gf2).unwrap();
        assert_eq!(s.msa().faces.len(), 15);
        assert_eq!(s.total_weight(), 15.0);
    }

    #[test]
    fn reveal_errors() {
        let mut s = stream_init(5, 1, FieldChoice::Gf2).unwrap();
        s.reveal(0, 0.5).unwrap();
        assert!(matches!(s.reveal(0, 0.2), Err(Error::DoubleReveal(0))));
        assert!(s.reveal(1, 1.0).is_err());
        assert!(s.reveal(100, 0.1).is_err());
    }

    #[test]
    fn lowering_a_kept_face_keeps_the_set() {
        let mut s = stream_init(5, 1, FieldChoice::Gf2).unwrap();
        let before: Vec<FaceRank> = s.msa().faces.iter().map(|f| f.0).collect();
        s.reveal(before[2], 0.3).unwrap();
        let mut after: Vec<FaceRank> = s.msa().faces.iter().map(|f| f.0).collect();
        after.sort_unstable();
        assert_eq!(before, after);
        assert!(s.total_weight() < 4.0);
    }

    #[test]
    fn exchange_consistency_at_every_step() {
        for (seed, n, d) in [(1u64, 9u32, 1u32), (2, 7, 2), (3, 10, 1)] {
            let schedule = reveal_schedule(n, d, Seed::new(seed), RevealOrder::Random);
            let mut s = stream_init(n, d, FieldChoice::Gf2).unwrap();
            let mut prev = s.total_weight();
            for &(r, w) in &schedule {
                s.reveal(r, w).unwrap();
                let batch = kruskal_msa(&s.revealed_complex(&schedule).unwrap(), FieldChoice::Gf2);
                assert_eq!(s.msa(), &batch);
                assert!(s.total_weight() <= prev);
                prev = s.total_weight();
            }
        }
    }

    #[test]
    fn final_msa_ignores_order() {
        let (_, a) = run_stream(12, 1, Seed::new(5), RevealOrder::Random, C1Scaling::default(), FieldChoice::Gf2, 1000).unwrap();
        let (_, b) = run_stream(12, 1, Seed::new(5), RevealOrder::Rank, C1Scaling::default(), FieldChoice::Gf2, 1000).unwrap();
        assert_eq!(a.msa(), b.msa());
    }

    #[test]
    fn conjecture_curve_values() {
        let law = LimitLaw::new(1).unwrap();
        let n = 20;
        let total = binomial(20, 2);
        let at_end = conjecture_curve(total, n, 1, &law).unwrap();
        assert!((at_end - 1.202_056_903_159_594).abs() < 1e-3);
        assert!(conjecture_curve(0, n, 1, &law).is_err());
        let curve = ConjectureCurve::new(n, 1, &law).unwrap();
        assert!(curve.at(10).unwrap() > curve.at(11).unwrap());
    }

    #[test]
    fn c1_constants() {
        assert_eq!(C1Scaling::AcycleSize.value(10, 1), 10.0 / 9.0);
        assert_eq!(C1Scaling::LowerFaces.value(10, 1), 10.0);
        assert_eq!(C1Scaling::LowerFaces.value(10, 2), 1.0);
    }
}
