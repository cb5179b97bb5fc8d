//! Linear systems over the two-element field.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

/// Systems with at most this many unknowns are solved densely.
pub const DENSE_LIMIT: usize = 5_000;

/// A sparse system: each equation is the set of unknowns it sums, plus the
/// right-hand side bit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct System {
    pub unknowns: usize,
    pub rows: Vec<(Vec<usize>, bool)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dense,
    Sparse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub method: Method,
    pub rank: usize,
    /// a particular solution with every free unknown set to zero
    pub x: Option<Vec<bool>>,
}

impl System {
    pub fn new(unknowns: usize) -> Self {
        Self {
            unknowns,
            rows: Vec::new(),
        }
    }

    /// Adds an equation; repeated unknowns cancel.
    pub fn push(&mut self, mut terms: Vec<usize>, rhs: bool) {
        terms.sort_unstable();
        let mut reduced: Vec<usize> = Vec::with_capacity(terms.len());
        for t in terms {
            assert!(t < self.unknowns, "unknown {t} out of range");
            if reduced.last() == Some(&t) {
                reduced.pop();
            } else {
                reduced.push(t);
            }
        }
        self.rows.push((reduced, rhs));
    }

    /// Whether `x` satisfies every equation.
    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        x.len() == self.unknowns
            && self
                .rows
                .iter()
                .all(|(terms, rhs)| terms.iter().fold(false, |acc, &t| acc ^ x[t]) == *rhs)
    }

    pub fn solve(&self) -> Solution {
        if self.unknowns <= DENSE_LIMIT {
            self.solve_dense()
        } else {
            self.solve_sparse()
        }
    }

    /// Gauss-Jordan elimination on bit rows, the right-hand side stored in
    /// the last column.
    pub fn solve_dense(&self) -> Solution {
        let n = self.unknowns;
        let mut rows: Vec<FixedBitSet> = self
            .rows
            .iter()
            .map(|(terms, rhs)| {
                let mut r = FixedBitSet::with_capacity(n + 1);
                for &t in terms {
                    r.insert(t);
                }
                r.set(n, *rhs);
                r
            })
            .collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].contains(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.contains(col) {
                    row.symmetric_difference_with(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let consistent = rows[rank..].iter().all(|r| !r.contains(n));
        let x = consistent.then(|| {
            let mut x = vec![false; n];
            for (r, &col) in pivots.iter().enumerate() {
                x[col] = rows[r].contains(n);
            }
            x
        });
        Solution {
            method: Method::Dense,
            rank,
            x,
        }
    }

    /// Forward elimination keyed by leading unknown, then back substitution
    /// from the highest leading unknown down.
    pub fn solve_sparse(&self) -> Solution {
        let mut basis: HashMap<usize, (Vec<usize>, bool)> = HashMap::new();
        let mut consistent = true;
        for (terms, rhs) in &self.rows {
            let mut row = terms.clone();
            let mut bit = *rhs;
            while let Some(&lead) = row.first() {
                match basis.get(&lead) {
                    Some((prow, pbit)) => {
                        row = xor_sorted(&row, prow);
                        bit ^= pbit;
                    }
                    None => break,
                }
            }
            match row.first() {
                Some(&lead) => {
                    basis.insert(lead, (row, bit));
                }
                None if bit => consistent = false,
                None => {}
            }
        }
        let rank = basis.len();
        let x = consistent.then(|| {
            let mut x = vec![false; self.unknowns];
            let mut leads: Vec<usize> = basis.keys().copied().collect();
            leads.sort_unstable_by(|a, b| b.cmp(a));
            for lead in leads {
                let (row, bit) = &basis[&lead];
                x[lead] = row[1..].iter().fold(*bit, |acc, &t| acc ^ x[t]);
            }
            x
        });
        Solution {
            method: Method::Sparse,
            rank,
            x,
        }
    }
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
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
    out
}

/// Rank of a matrix given by its columns as sorted row-index lists.
pub fn rank_of_columns(rows: usize, columns: &[Vec<usize>]) -> usize {
    // Columns of A are rows of Aᵀ, which has the same rank.
    let mut sys = System::new(rows);
    for c in columns {
        sys.push(c.clone(), false);
    }
    sys.solve().rank
}
