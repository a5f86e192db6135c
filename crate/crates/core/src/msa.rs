//! Betti numbers, minimal spanning acycles, (d-1)-persistence death times,
//! shadows and nearest-face distances of a weighted d-complex.

use std::collections::HashSet;

use rand::Rng;
use serde::Serialize;

use crate::complex::{boundary_ranks, coface_ranks, FaceRank, Weight, WeightedComplex};
use crate::error::{Error, Result};
use crate::linalg::{Basis, Field, FieldChoice, Gf2, GfP, Rationals, SparseColumn};
use crate::sampler::{Purpose, Seed};
use crate::stats::NeumaierSum;

pub(crate) fn boundary_rows(rank: FaceRank, c: &WeightedComplex) -> smallvec::SmallVec<[(usize, i8); 4]> {
    boundary_ranks(rank, c.n(), c.d())
        .iter()
        .map(|&(r, s)| (r as usize, s))
        .collect()
}

/// Minimal spanning acycle found by the greedy pass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Msa {
    /// Kept faces in filtration order (weight, then rank).
    pub faces: Vec<(FaceRank, Weight)>,
    /// False when the filtration ran out before reaching `C(n-1, d)` faces.
    pub exists: bool,
}

impl Msa {
    pub fn weights(&self) -> Vec<Weight> {
        self.faces.iter().map(|f| f.1).collect()
    }

    pub fn total_weight(&self) -> f64 {
        let mut s = NeumaierSum::default();
        for &(_, w) in &self.faces {
            s.add(w.as_f64());
        }
        s.value()
    }

    pub fn contains(&self, rank: FaceRank) -> bool {
        self.faces.iter().any(|f| f.0 == rank)
    }

    /// Flag for the event `beta_{d-1} != 0` of the underlying complex.
    pub fn existence_event(&self) -> ExistenceEvent {
        ExistenceEvent {
            beta_nonzero: !self.exists,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExistenceEvent {
    pub beta_nonzero: bool,
}

/// Kruskal on the simplicial matroid: scan the filtration, keep a face iff its
/// boundary is independent of the kept ones, stop at `C(n-1, d)` faces.
pub fn kruskal_msa(complex: &WeightedComplex, field: FieldChoice) -> Msa {
    kruskal_over(complex.filtration().into_iter(), complex, field)
}

pub(crate) fn kruskal_over(
    order: impl Iterator<Item = (FaceRank, Weight)>,
    complex: &WeightedComplex,
    field: FieldChoice,
) -> Msa {
    let target = complex.acycle_size() as usize;
    let mut basis = field.basis(complex.ridge_count() as usize);
    let mut faces = Vec::with_capacity(target);
    for (r, w) in order {
        if faces.len() == target {
            break;
        }
        if basis.absorb_signed(&boundary_rows(r, complex)).independent {
            faces.push((r, w));
        }
    }
    Msa {
        exists: faces.len() == target,
        faces,
    }
}

/// `beta_{d-1}` of the present faces alone, i.e. of the underlying `Y(n, p)`.
pub fn existence_event(complex: &WeightedComplex, field: FieldChoice) -> ExistenceEvent {
    let mut basis = field.basis(complex.ridge_count() as usize);
    let mut rank = 0u64;
    let target = complex.acycle_size();
    for &(r, _) in complex.present() {
        if rank == target {
            break;
        }
        if basis.absorb_signed(&boundary_rows(r, complex)).independent {
            rank += 1;
        }
    }
    ExistenceEvent {
        beta_nonzero: rank < target,
    }
}

/// Reduced Betti number in dimension `dim` (d-1 or d) of the sub-complex of
/// faces with weight `<= threshold`.
pub fn betti(complex: &WeightedComplex, threshold: Weight, dim: u32, field: FieldChoice) -> Result<u64> {
    let d = complex.d();
    if dim + 1 != d && dim != d {
        return Err(Error::InvalidParameter(format!(
            "Betti dimension must be {} or {d}, got {dim}",
            d - 1
        )));
    }
    let mut basis = field.basis(complex.ridge_count() as usize);
    let mut faces = 0u64;
    for (r, w) in complex.filtration() {
        if w > threshold {
            break;
        }
        faces += 1;
        basis.absorb_signed(&boundary_rows(r, complex));
    }
    let rank = basis.rank() as u64;
    Ok(if dim == d {
        faces - rank
    } else {
        complex.acycle_size() - rank
    })
}

/// Death times of the (d-1)-dimensional persistence diagram.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DeathTimes {
    /// Deaths caused by present faces, in filtration order.
    pub deaths: Vec<Weight>,
    /// Classes killed by absent faces sitting at a finite ceiling.
    pub ceiling_deaths: usize,
    /// Classes never killed (only when absent faces never enter).
    pub unkilled: usize,
}

/// Standard persistence reduction of the d-boundary matrix in filtration
/// order: a column that stays nonzero after eliminating earlier lowest ones
/// kills a (d-1)-class.
pub fn persistence_deaths(complex: &WeightedComplex, field: FieldChoice) -> DeathTimes {
    match field {
        FieldChoice::Gf2 | FieldChoice::Gf2Sparse => standard_reduction(complex, Gf2),
        FieldChoice::GfP(p) => standard_reduction(complex, GfP::new(p).expect("validated prime")),
        FieldChoice::Rational => standard_reduction(complex, Rationals),
    }
}

fn standard_reduction<F: Field>(complex: &WeightedComplex, field: F) -> DeathTimes {
    let filtration = complex.filtration();
    let ridges = complex.ridge_count() as usize;
    // column index in `reduced` owning each lowest row
    let mut low_owner: Vec<Option<usize>> = vec![None; ridges];
    let mut reduced: Vec<SparseColumn<F::Elem>> = Vec::new();
    let mut out = DeathTimes::default();
    let ceiling_finite = complex.ceiling() != Weight::PosInf;
    for (r, w) in filtration {
        let mut col = SparseColumn::from_signed(&field, &boundary_rows(r, complex));
        while let Some(low) = col.pivot() {
            let Some(j) = low_owner[low] else { break };
            let other = &reduced[j];
            let a = &col.entries().last().unwrap().1;
            let b = &other.entries().last().unwrap().1;
            let factor = field.neg(&field.div(a, b));
            col.add_scaled(&field, &factor, other);
        }
        if let Some(low) = col.pivot() {
            low_owner[low] = Some(reduced.len());
            reduced.push(col);
            if ceiling_finite && !complex.is_present(r) {
                out.ceiling_deaths += 1;
            } else {
                out.deaths.push(w);
            }
        }
    }
    out.unkilled = complex.acycle_size() as usize - reduced.len();
    out
}

/// Sub-complex of faces strictly before `(weight, tie_rank)` in filtration
/// order. With `tie_rank = None` this is every face of weight `< weight`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StrictThreshold {
    pub weight: Weight,
    pub tie_rank: Option<FaceRank>,
}

impl StrictThreshold {
    pub fn below(weight: Weight) -> Self {
        Self { weight, tie_rank: None }
    }

    /// Everything that precedes the given face in the filtration.
    pub fn before_face(rank: FaceRank, weight: Weight) -> Self {
        Self {
            weight,
            tie_rank: Some(rank),
        }
    }

    pub fn admits(&self, rank: FaceRank, weight: Weight) -> bool {
        match weight.cmp(&self.weight) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.tie_rank.is_some_and(|t| rank < t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShadowMode {
    Exact,
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowReport {
    pub mode: ShadowMode,
    pub threshold: StrictThreshold,
    /// Exact shadow size (exact mode only).
    pub count: Option<u64>,
    /// Shadow size over `C(n, d+1)`.
    pub density: f64,
    /// Binomial standard error of `density` (0 in exact mode).
    pub std_error: f64,
    /// Number of d-faces outside the sub-complex.
    pub candidates: u64,
}

struct FrozenSubcomplex {
    basis: Box<dyn Basis>,
    members: HashSet<FaceRank>,
}

fn freeze(complex: &WeightedComplex, threshold: StrictThreshold, field: FieldChoice) -> FrozenSubcomplex {
    let mut basis = field.basis(complex.ridge_count() as usize);
    let mut members = HashSet::new();
    for (r, w) in complex.filtration() {
        if !threshold.admits(r, w) {
            break;
        }
        basis.absorb_signed(&boundary_rows(r, complex));
        members.insert(r);
    }
    FrozenSubcomplex { basis, members }
}

/// Faces outside the sub-complex whose boundary already lies in its span.
pub fn shadow_faces(complex: &WeightedComplex, threshold: StrictThreshold, field: FieldChoice) -> Vec<FaceRank> {
    let sub = freeze(complex, threshold, field);
    (0..complex.face_count())
        .filter(|r| !sub.members.contains(r))
        .filter(|&r| sub.basis.is_dependent(&boundary_rows(r, complex)))
        .collect()
}

pub fn shadow(
    complex: &WeightedComplex,
    threshold: StrictThreshold,
    mode: ShadowMode,
    field: FieldChoice,
    seed: Seed,
) -> Result<ShadowReport> {
    let total = complex.face_count();
    match mode {
        ShadowMode::Exact => {
            let sub = freeze(complex, threshold, field);
            let candidates = total - sub.members.len() as u64;
            let count = (0..total)
                .filter(|r| !sub.members.contains(r))
                .filter(|&r| sub.basis.is_dependent(&boundary_rows(r, complex)))
                .count() as u64;
            Ok(ShadowReport {
                mode,
                threshold,
                count: Some(count),
                density: count as f64 / total as f64,
                std_error: 0.0,
                candidates,
            })
        }
        ShadowMode::Sampled(0) => Err(Error::InvalidParameter(
            "sampled shadow needs at least one sample".into(),
        )),
        ShadowMode::Sampled(k) => {
            let sub = freeze(complex, threshold, field);
            let candidates = total - sub.members.len() as u64;
            if candidates == 0 {
                return Ok(ShadowReport {
                    mode,
                    threshold,
                    count: None,
                    density: 0.0,
                    std_error: 0.0,
                    candidates,
                });
            }
            let mut rng = seed.rng(Purpose::Shadow);
            let mut hits = 0usize;
            let mut drawn = 0usize;
            while drawn < k {
                let r = rng.gen_range(0..total);
                if sub.members.contains(&r) {
                    continue;
                }
                drawn += 1;
                if sub.basis.is_dependent(&boundary_rows(r, complex)) {
                    hits += 1;
                }
            }
            let frac = hits as f64 / k as f64;
            let scale = candidates as f64 / total as f64;
            Ok(ShadowReport {
                mode,
                threshold,
                count: None,
                density: frac * scale,
                std_error: (frac * (1.0 - frac) / k as f64).sqrt() * scale,
                candidates,
            })
        }
    }
}

/// `C(tau)`: smallest weight among the d-faces containing each (d-1)-face,
/// indexed by the (d-1)-face rank. Absent faces count at the ceiling.
pub fn nearest_face_distances(complex: &WeightedComplex) -> Vec<Weight> {
    let mut out = vec![complex.ceiling(); complex.ridge_count() as usize];
    for &(r, w) in complex.present() {
        for (t, _) in boundary_rows(r, complex) {
            if w < out[t] {
                out[t] = w;
            }
        }
    }
    out
}

/// Number of (d-1)-faces with no coface of weight `<= r`, checked face by
/// face through the coface lists.
pub fn isolated_ridges(complex: &WeightedComplex, r: Weight) -> u64 {
    let (n, d) = (complex.n(), complex.d());
    (0..complex.ridge_count())
        .filter(|&t| coface_ranks(t, n, d).into_iter().all(|s| complex.weight(s) > r))
        .count() as u64
}
