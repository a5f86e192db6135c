use std::collections::HashMap;

use super::field::Field;
use super::{Absorbed, Basis};

/// Sparse column: strictly increasing row indices, no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseColumn<E> {
    entries: Vec<(usize, E)>,
}

impl<E: Clone + PartialEq> SparseColumn<E> {
    pub fn zero() -> Self {
        Self { entries: Vec::new() }
    }

    /// Sums repeated rows and drops zeros.
    pub fn from_entries<F: Field<Elem = E>>(field: &F, mut raw: Vec<(usize, E)>) -> Self {
        raw.sort_by_key(|e| e.0);
        let mut entries: Vec<(usize, E)> = Vec::with_capacity(raw.len());
        for (row, v) in raw {
            match entries.last_mut() {
                Some((r, acc)) if *r == row => *acc = field.add(acc, &v),
                _ => entries.push((row, v)),
            }
        }
        entries.retain(|(_, v)| !field.is_zero(v));
        Self { entries }
    }

    pub fn from_signed<F: Field<Elem = E>>(field: &F, raw: &[(usize, i8)]) -> Self {
        Self::from_entries(field, raw.iter().map(|&(r, s)| (r, field.from_i64(s as i64))).collect())
    }

    pub fn entries(&self) -> &[(usize, E)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest row index with a nonzero entry.
    pub fn pivot(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    fn pivot_value(&self) -> Option<&E> {
        self.entries.last().map(|e| &e.1)
    }

    /// `self += factor * other`.
    pub fn add_scaled<F: Field<Elem = E>>(&mut self, field: &F, factor: &E, other: &Self) {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, field.mul(factor, &b[j].1)));
                j += 1;
            } else {
                let v = field.add(&a[i].1, &field.mul(factor, &b[j].1));
                if !field.is_zero(&v) {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        self.entries = out;
    }
}

/// Pivot-indexed set of reduced columns over an arbitrary field.
#[derive(Clone, Debug)]
pub struct ReductionState<F: Field> {
    field: F,
    pivots: HashMap<usize, SparseColumn<F::Elem>>,
    absorbed: usize,
}

impl<F: Field> ReductionState<F> {
    pub fn new(field: F) -> Self {
        Self {
            field,
            pivots: HashMap::new(),
            absorbed: 0,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Eliminates pivots against stored columns until the pivot is free or
    /// the column vanishes. The state is not modified.
    pub fn reduce_column(&self, mut col: SparseColumn<F::Elem>) -> SparseColumn<F::Elem> {
        while let Some(p) = col.pivot() {
            let Some(stored) = self.pivots.get(&p) else {
                break;
            };
            let factor = self.field.neg(&self.field.div(
                col.pivot_value().unwrap(),
                stored.pivot_value().unwrap(),
            ));
            col.add_scaled(&self.field, &factor, stored);
        }
        col
    }

    pub fn absorb(&mut self, col: SparseColumn<F::Elem>) -> Absorbed {
        self.absorbed += 1;
        let residual = self.reduce_column(col);
        match residual.pivot() {
            Some(p) => {
                debug_assert!(!self.pivots.contains_key(&p));
                self.pivots.insert(p, residual);
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

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn columns_absorbed(&self) -> usize {
        self.absorbed
    }

    pub fn stored(&self, pivot: usize) -> Option<&SparseColumn<F::Elem>> {
        self.pivots.get(&pivot)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }
}

/// Rank of a list of columns over `field`.
pub fn rank_of<F: Field>(field: F, columns: impl IntoIterator<Item = SparseColumn<F::Elem>>) -> usize {
    let mut state = ReductionState::new(field);
    for c in columns {
        state.absorb(c);
    }
    state.rank()
}

impl<F: Field> Basis for ReductionState<F> {
    fn absorb_signed(&mut self, entries: &[(usize, i8)]) -> Absorbed {
        let col = SparseColumn::from_signed(&self.field, entries);
        self.absorb(col)
    }

    fn is_dependent(&self, entries: &[(usize, i8)]) -> bool {
        let col = SparseColumn::from_signed(&self.field, entries);
        self.reduce_column(col).is_zero()
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn columns_absorbed(&self) -> usize {
        self.absorbed
    }
}
