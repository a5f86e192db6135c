//! GF(2) reduction on columns that start as sorted index lists and switch to
//! packed 64-bit words once they fill more than 1/64 of the rows.

use super::{Absorbed, Basis};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gf2Column {
    Sparse(Vec<u32>),
    Dense(Vec<u64>),
}

impl Gf2Column {
    /// Column with a 1 in every row that appears an odd number of times.
    pub fn from_rows(rows: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<u32> = rows.into_iter().map(|r| r as u32).collect();
        v.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(v.len());
        for r in v {
            if out.last() == Some(&r) {
                out.pop();
            } else {
                out.push(r);
            }
        }
        Gf2Column::Sparse(out)
    }

    pub fn pivot(&self) -> Option<usize> {
        match self {
            Gf2Column::Sparse(v) => v.last().map(|&r| r as usize),
            Gf2Column::Dense(words) => words
                .iter()
                .rposition(|&w| w != 0)
                .map(|i| i * 64 + 63 - words[i].leading_zeros() as usize),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pivot().is_none()
    }

    pub fn weight(&self) -> usize {
        match self {
            Gf2Column::Sparse(v) => v.len(),
            Gf2Column::Dense(words) => words.iter().map(|w| w.count_ones() as usize).sum(),
        }
    }

    pub fn rows(&self) -> Vec<usize> {
        match self {
            Gf2Column::Sparse(v) => v.iter().map(|&r| r as usize).collect(),
            Gf2Column::Dense(words) => {
                let mut out = Vec::new();
                for (i, &w) in words.iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let b = w.trailing_zeros() as usize;
                        out.push(i * 64 + b);
                        w &= w - 1;
                    }
                }
                out
            }
        }
    }

    fn densify(&mut self, nrows: usize) {
        if let Gf2Column::Sparse(v) = self {
            let mut words = vec![0u64; nrows.div_ceil(64)];
            for &r in v.iter() {
                words[r as usize / 64] ^= 1 << (r % 64);
            }
            *self = Gf2Column::Dense(words);
        }
    }

    /// `self ^= other`, densifying when the result is too full for a list.
    pub fn xor_assign(&mut self, other: &Gf2Column, nrows: usize) {
        match (&mut *self, other) {
            (Gf2Column::Sparse(a), Gf2Column::Sparse(b)) => {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => {
                            out.push(a[i]);
                            i += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            out.push(b[j]);
                            j += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                *a = out;
                if a.len() * 64 > nrows {
                    self.densify(nrows);
                }
            }
            (Gf2Column::Dense(a), Gf2Column::Sparse(b)) => {
                for &r in b {
                    a[r as usize / 64] ^= 1 << (r % 64);
                }
            }
            (Gf2Column::Dense(a), Gf2Column::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
            (Gf2Column::Sparse(_), Gf2Column::Dense(_)) => {
                self.densify(nrows);
                self.xor_assign(other, nrows);
            }
        }
    }
}

/// Packed GF(2) counterpart of [`super::ReductionState`].
#[derive(Clone, Debug)]
pub struct Gf2Basis {
    nrows: usize,
    pivots: Vec<Option<Gf2Column>>,
    rank: usize,
    absorbed: usize,
}

impl Gf2Basis {
    pub fn new(nrows: usize) -> Self {
        Self {
            nrows,
            pivots: vec![None; nrows],
            rank: 0,
            absorbed: 0,
        }
    }

    pub fn reduce_column(&self, mut col: Gf2Column) -> Gf2Column {
        while let Some(p) = col.pivot() {
            match &self.pivots[p] {
                Some(stored) => col.xor_assign(stored, self.nrows),
                None => break,
            }
        }
        col
    }

    pub fn absorb(&mut self, col: Gf2Column) -> Absorbed {
        self.absorbed += 1;
        let residual = self.reduce_column(col);
        match residual.pivot() {
            Some(p) => {
                self.pivots[p] = Some(residual);
                self.rank += 1;
                Absorbed {
                    independent: true,
                    pivot: Some(p),
                }
            }
            None => Absorbed {
                independent: false,
                pivot: None,
            },
        }
    }

    pub fn stored(&self, pivot: usize) -> Option<&Gf2Column> {
        self.pivots.get(pivot).and_then(|c| c.as_ref())
    }
}

impl Basis for Gf2Basis {
    fn absorb_signed(&mut self, entries: &[(usize, i8)]) -> Absorbed {
        self.absorb(Gf2Column::from_rows(entries.iter().map(|e| e.0)))
    }

    fn is_dependent(&self, entries: &[(usize, i8)]) -> bool {
        self.reduce_column(Gf2Column::from_rows(entries.iter().map(|e| e.0)))
            .is_zero()
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn columns_absorbed(&self) -> usize {
        self.absorbed
    }
}
