//! Faces over a fixed vertex set, their colexicographic ranks, and weighted
//! d-complexes built on top of the complete (d-1)-skeleton.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Index of a (d+1)-subset in colexicographic order.
pub type FaceRank = u64;

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// A face given by its strictly increasing vertex labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    vertices: SmallVec<[u32; 4]>,
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Face {
    pub fn new(vertices: &[u32], n: u32) -> Result<Self> {
        let bad = |reason| Error::InvalidFace {
            vertices: vertices.to_vec(),
            n,
            reason,
        };
        if vertices.is_empty() {
            return Err(bad("empty vertex list"));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("labels must be strictly increasing"));
        }
        if *vertices.last().unwrap() >= n {
            return Err(bad("label out of range"));
        }
        Ok(Self {
            vertices: vertices.iter().copied().collect(),
        })
    }

    fn from_sorted_unchecked(vertices: SmallVec<[u32; 4]>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Dimension, one less than the number of vertices.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains(&self, other: &Face) -> bool {
        other.vertices.iter().all(|v| self.vertices.binary_search(v).is_ok())
    }

    /// Codimension-one faces with signs `(-1)^i` for dropping the i-th vertex.
    pub fn boundary(&self) -> Vec<(Face, i8)> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|i| {
                let mut sub = self.vertices.clone();
                sub.remove(i);
                (Face::from_sorted_unchecked(sub), if i % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    }
}

/// Colex rank: `sum_i C(v_i, i+1)` over the sorted labels.
pub fn face_rank(face: &Face, n: u32) -> Result<FaceRank> {
    if face.vertices.last().copied().unwrap_or(0) >= n {
        return Err(Error::InvalidFace {
            vertices: face.vertices.to_vec(),
            n,
            reason: "label out of range",
        });
    }
    Ok(rank_of_sorted(&face.vertices))
}

fn rank_of_sorted(vertices: &[u32]) -> FaceRank {
    vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| binomial(v as u64, i as u64 + 1))
        .sum()
}

/// Inverse of [`face_rank`] for d-faces over `n` vertices.
pub fn face_unrank(rank: FaceRank, n: u32, d: u32) -> Result<Face> {
    let k = d as u64 + 1;
    let count = binomial(n as u64, k);
    if rank >= count {
        return Err(Error::RankOutOfRange { rank, n, d, count });
    }
    Ok(Face::from_sorted_unchecked(unrank_vertices(rank, n, k)))
}

fn unrank_vertices(mut rank: u64, n: u32, k: u64) -> SmallVec<[u32; 4]> {
    let mut out: SmallVec<[u32; 4]> = SmallVec::with_capacity(k as usize);
    out.resize(k as usize, 0);
    let mut upper = n as u64; // exclusive bound for the next label
    for i in (1..=k).rev() {
        // largest v < upper with C(v, i) <= rank
        let (mut lo, mut hi) = (i - 1, upper - 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if binomial(mid, i) <= rank {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        out[(i - 1) as usize] = lo as u32;
        rank -= binomial(lo, i);
        upper = lo;
    }
    out
}

/// Ranks (among (d-1)-faces) and signs of the boundary of the d-face with the
/// given rank. This is the hot path used by every reduction.
pub fn boundary_ranks(rank: FaceRank, n: u32, d: u32) -> SmallVec<[(u64, i8); 4]> {
    let verts = unrank_vertices(rank, n, d as u64 + 1);
    let mut out: SmallVec<[(u64, i8); 4]> = SmallVec::new();
    let mut sub: SmallVec<[u32; 4]> = SmallVec::new();
    for i in 0..verts.len() {
        sub.clear();
        sub.extend(verts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
        out.push((rank_of_sorted(&sub), if i % 2 == 0 { 1 } else { -1 }));
    }
    out
}

/// Ranks of the `n - d` d-faces containing the (d-1)-face with rank `rank`.
pub fn coface_ranks(rank: FaceRank, n: u32, d: u32) -> Vec<FaceRank> {
    let tau = unrank_vertices(rank, n, d as u64);
    let mut out = Vec::with_capacity((n - d) as usize);
    let mut buf: SmallVec<[u32; 4]> = SmallVec::new();
    for v in 0..n {
        if tau.contains(&v) {
            continue;
        }
        buf.clear();
        buf.extend(tau.iter().copied());
        let pos = buf.partition_point(|&u| u < v);
        buf.insert(pos, v);
        out.push(rank_of_sorted(&buf));
    }
    out
}

/// Extended real weight. Finite values are never NaN, so the order is total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Eq for Weight {}

impl Weight {
    pub fn finite(x: f64) -> Result<Self> {
        if x.is_nan() {
            return Err(Error::InvalidParameter("NaN weight".into()));
        }
        Ok(if x == f64::INFINITY {
            Weight::PosInf
        } else if x == f64::NEG_INFINITY {
            Weight::NegInf
        } else {
            Weight::Finite(x)
        })
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Weight::NegInf => f64::NEG_INFINITY,
            Weight::Finite(x) => x,
            Weight::PosInf => f64::INFINITY,
        }
    }

    fn tag(self) -> u8 {
        match self {
            Weight::NegInf => 0,
            Weight::Finite(_) => 1,
            Weight::PosInf => 2,
        }
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => a.total_cmp(b),
            _ => self.tag().cmp(&other.tag()),
        }
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::NegInf => write!(f, "-inf"),
            Weight::PosInf => write!(f, "inf"),
            // shortest representation that parses back to the same f64
            Weight::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Weight::Finite(x) => s.serialize_f64(*x),
            w => s.serialize_str(&w.to_string()),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "Infinity" => Ok(Weight::PosInf),
            "-inf" | "-Infinity" => Ok(Weight::NegInf),
            t => {
                let x: f64 = t
                    .parse()
                    .map_err(|_| Error::Format(format!("bad weight {t:?}")))?;
                Weight::finite(x)
            }
        }
    }
}

/// A weighted d-complex over `n` vertices with complete (d-1)-skeleton.
///
/// Only the d-faces carrying their own weight are stored. Lower faces sit
/// implicitly at `floor`; d-faces not stored sit at `ceiling`. When the
/// ceiling is `+inf` those faces never enter the filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComplex {
    n: u32,
    d: u32,
    faces: Vec<(FaceRank, Weight)>,
    floor: Weight,
    ceiling: Weight,
}

impl WeightedComplex {
    /// Builds a complex from explicit face weights (any order, no duplicates).
    pub fn new(
        n: u32,
        d: u32,
        mut faces: Vec<(FaceRank, Weight)>,
        floor: Weight,
        ceiling: Weight,
    ) -> Result<Self> {
        check_dims(n, d)?;
        let count = binomial(n as u64, d as u64 + 1);
        faces.sort_unstable_by_key(|&(r, _)| r);
        if faces.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Format("duplicate face rank".into()));
        }
        if let Some(&(r, _)) = faces.last() {
            if r >= count {
                return Err(Error::RankOutOfRange { rank: r, n, d, count });
            }
        }
        if floor > ceiling {
            return Err(Error::InvalidParameter("floor above ceiling".into()));
        }
        if let Some(&(r, w)) = faces.iter().find(|&&(_, w)| w < floor) {
            return Err(Error::InvalidParameter(format!(
                "face {r} has weight {w} below the skeleton weight {floor}"
            )));
        }
        Ok(Self {
            n,
            d,
            faces,
            floor,
            ceiling,
        })
    }

    /// Uniform augmented variant: lower faces at 0, absent d-faces at 1.
    pub fn uniform(n: u32, d: u32, faces: Vec<(FaceRank, f64)>) -> Result<Self> {
        let faces = faces
            .into_iter()
            .map(|(r, w)| Weight::finite(w).map(|w| (r, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, d, faces, Weight::Finite(0.0), Weight::Finite(1.0))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn floor(&self) -> Weight {
        self.floor
    }

    pub fn ceiling(&self) -> Weight {
        self.ceiling
    }

    /// Number of potential d-faces, `C(n, d+1)`.
    pub fn face_count(&self) -> u64 {
        binomial(self.n as u64, self.d as u64 + 1)
    }

    /// Number of (d-1)-faces, `C(n, d)`.
    pub fn ridge_count(&self) -> u64 {
        binomial(self.n as u64, self.d as u64)
    }

    /// Size of a spanning acycle, `C(n-1, d)`.
    pub fn acycle_size(&self) -> u64 {
        binomial(self.n as u64 - 1, self.d as u64)
    }

    /// Stored faces sorted by rank.
    pub fn present(&self) -> &[(FaceRank, Weight)] {
        &self.faces
    }

    pub fn is_present(&self, rank: FaceRank) -> bool {
        self.faces.binary_search_by_key(&rank, |&(r, _)| r).is_ok()
    }

    pub fn weight(&self, rank: FaceRank) -> Weight {
        match self.faces.binary_search_by_key(&rank, |&(r, _)| r) {
            Ok(i) => self.faces[i].1,
            Err(_) => self.ceiling,
        }
    }

    /// Every d-face that ever enters the filtration, sorted by weight with
    /// ties broken by rank. Absent faces are included iff the ceiling is
    /// not `+inf`.
    pub fn filtration(&self) -> Vec<(FaceRank, Weight)> {
        let mut out: Vec<(FaceRank, Weight)> = if self.ceiling == Weight::PosInf {
            self.faces.clone()
        } else {
            let mut all = Vec::with_capacity(self.face_count() as usize);
            let mut it = self.faces.iter().peekable();
            for r in 0..self.face_count() {
                match it.peek() {
                    Some(&&(pr, w)) if pr == r => {
                        all.push((r, w));
                        it.next();
                    }
                    _ => all.push((r, self.ceiling)),
                }
            }
            all
        };
        out.sort_unstable_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Same complex with every stored weight passed through `f`.
    pub fn map_weights(&self, mut f: impl FnMut(FaceRank, Weight) -> Weight) -> Self {
        Self {
            faces: self.faces.iter().map(|&(r, w)| (r, f(r, w))).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn with_floor(mut self, floor: Weight) -> Self {
        self.floor = floor;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ComplexDoc::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ComplexDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

pub(crate) fn check_dims(n: u32, d: u32) -> Result<()> {
    if d < 1 {
        return Err(Error::InvalidParameter(format!("d must be >= 1, got {d}")));
    }
    if n <= d {
        return Err(Error::InvalidParameter(format!(
            "need n > d, got n = {n}, d = {d}"
        )));
    }
    Ok(())
}

/// On-disk form: weights travel as decimal strings.
#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    n: u32,
    d: u32,
    faces: Vec<(FaceRank, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_floor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_ceiling: Option<String>,
}

impl From<&WeightedComplex> for ComplexDoc {
    fn from(c: &WeightedComplex) -> Self {
        Self {
            n: c.n,
            d: c.d,
            faces: c.faces.iter().map(|&(r, w)| (r, w.to_string())).collect(),
            weight_floor: Some(c.floor.to_string()),
            weight_ceiling: Some(c.ceiling.to_string()),
        }
    }
}

impl TryFrom<ComplexDoc> for WeightedComplex {
    type Error = Error;

    fn try_from(doc: ComplexDoc) -> Result<Self> {
        let floor = doc.weight_floor.as_deref().unwrap_or("0").parse()?;
        let ceiling = doc.weight_ceiling.as_deref().unwrap_or("1").parse()?;
        let faces = doc
            .faces
            .iter()
            .map(|(r, w)| w.parse().map(|w| (*r, w)))
            .collect::<Result<Vec<_>>>()?;
        WeightedComplex::new(doc.n, doc.d, faces, floor, ceiling)
    }
}
