//! Exhaustive minimum spanning acycle search for tiny complexes.
//!
//! Enumerates every independent subset of `C(n-1, d)` faces with its own
//! bitmask GF(2) elimination, sharing nothing with the reduction engines.

use crate::complex::{boundary_ranks, FaceRank, Weight, WeightedComplex};
use crate::error::{Error, Result};
use crate::stats::NeumaierSum;

pub const MAX_N: u32 = 7;
pub const MAX_D: u32 = 2;

/// Above this many size-`C(n-1,d)` subsets the search prunes branches that
/// cannot beat the best total found so far.
const PRUNE_ABOVE: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceMsa {
    pub faces: Vec<FaceRank>,
    pub total_weight: f64,
    /// Spanning acycles visited (all of them when no pruning happened).
    pub acycles_visited: u64,
    pub pruned: bool,
}

#[derive(Clone, Copy)]
struct Echelon {
    by_lead: [u64; 64],
}

impl Echelon {
    fn insert(&mut self, mut v: u64) -> bool {
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if self.by_lead[lead] == 0 {
                self.by_lead[lead] = v;
                return true;
            }
            v ^= self.by_lead[lead];
        }
        false
    }
}

struct Search<'a> {
    masks: &'a [u64],
    weights: &'a [f64],
    target: usize,
    prune: bool,
    chosen: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    visited: u64,
}

impl Search<'_> {
    fn run(&mut self, start: usize, basis: Echelon, partial: f64) {
        if self.chosen.len() == self.target {
            self.visited += 1;
            let total = total_of(self.chosen.iter().map(|&i| self.weights[i]));
            if self.best.as_ref().is_none_or(|b| total < b.0) {
                self.best = Some((total, self.chosen.clone()));
            }
            return;
        }
        let need = self.target - self.chosen.len();
        for i in start..self.masks.len() {
            if self.masks.len() - i < need {
                break;
            }
            if self.prune {
                if let Some((best, _)) = &self.best {
                    // weights are sorted, so the cheapest completion uses i..i+need
                    let bound: f64 = partial + self.weights[i..i + need].iter().sum::<f64>();
                    if bound >= *best {
                        break;
                    }
                }
            }
            let mut next = basis;
            if next.insert(self.masks[i]) {
                self.chosen.push(i);
                self.run(i + 1, next, partial + self.weights[i]);
                self.chosen.pop();
            }
        }
    }
}

fn total_of(ws: impl Iterator<Item = f64>) -> f64 {
    let mut s = NeumaierSum::default();
    for w in ws {
        s.add(w);
    }
    s.value()
}

/// Minimum-weight spanning acycle by enumeration over GF(2).
///
/// Faces at `+inf` are excluded; `Ok(None)` means no spanning acycle exists.
pub fn brute_force_msa(complex: &WeightedComplex) -> Result<Option<BruteForceMsa>> {
    let (n, d) = (complex.n(), complex.d());
    if n > MAX_N || d > MAX_D {
        return Err(Error::Unsupported(format!(
            "brute-force oracle limited to n <= {MAX_N}, d <= {MAX_D} (got n = {n}, d = {d})"
        )));
    }
    let faces: Vec<(FaceRank, Weight)> = complex.filtration();
    let masks: Vec<u64> = faces
        .iter()
        .map(|&(r, _)| boundary_ranks(r, n, d).iter().fold(0u64, |m, &(t, _)| m ^ (1 << t)))
        .collect();
    let weights: Vec<f64> = faces.iter().map(|f| f.1.as_f64()).collect();
    let target = complex.acycle_size() as usize;
    let subsets = crate::complex::binomial(faces.len() as u64, target as u64);
    let mut search = Search {
        masks: &masks,
        weights: &weights,
        target,
        prune: subsets > PRUNE_ABOVE,
        chosen: Vec::new(),
        best: None,
        visited: 0,
    };
    search.run(0, Echelon { by_lead: [0; 64] }, 0.0);
    Ok(search.best.map(|(total, idx)| {
        let mut faces: Vec<FaceRank> = idx.iter().map(|&i| faces[i].0).collect();
        faces.sort_unstable();
        BruteForceMsa {
            faces,
            total_weight: total,
            acycles_visited: search.visited,
            pruned: search.prune,
        }
    }))
}
