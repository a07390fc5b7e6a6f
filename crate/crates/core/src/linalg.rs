//! Exact sparse elimination.
//!
//! Vectors are sparse maps from coordinate to scalar. The echelon keeps one
//! basis row per pivot, where the pivot is the row's largest coordinate, and
//! records for every row how it was assembled from the inserted columns. That
//! combination is what turns a successful reduction into a re-checkable
//! witness. Columns are processed strictly in insertion order, so results do
//! not depend on anything but the input order.

use std::collections::{BTreeMap, HashMap};

use crate::scalars::{Domain, Scalar};

pub type SparseVec = BTreeMap<usize, Scalar>;

fn axpy(target: &mut SparseVec, x: &SparseVec, c: &Scalar) {
    for (k, v) in x {
        let add = v * c;
        match target.get_mut(k) {
            Some(t) => {
                let s = &*t + &add;
                if s.is_zero() {
                    target.remove(k);
                } else {
                    *t = s;
                }
            }
            None => {
                if !add.is_zero() {
                    target.insert(*k, add);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    vec: SparseVec,
    combo: SparseVec,
}

/// Outcome of inserting a column.
#[derive(Debug, Clone)]
pub enum Insertion {
    /// The column enlarged the span; its pivot coordinate.
    Pivot(usize),
    /// The column was dependent; the combination of inserted columns
    /// (including this one with coefficient 1) that sums to zero.
    Dependent(SparseVec),
}

#[derive(Debug, Clone)]
pub struct Echelon {
    domain: Domain,
    rows: Vec<Row>,
    pivots: HashMap<usize, usize>,
    columns: usize,
}

impl Echelon {
    pub fn new(domain: Domain) -> Self {
        Echelon {
            domain,
            rows: vec![],
            pivots: HashMap::new(),
            columns: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    /// Pivot coordinates, one per basis row.
    pub fn pivot_coordinates(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| *r.vec.keys().next_back().unwrap())
    }

    /// Eliminates every pivot coordinate from `v`, returning the remainder
    /// and the combination of inserted columns that was subtracted.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor = match rem.keys().next_back() {
            Some(&k) => k,
            None => return (rem, combo),
        };
        while let Some((&k, c)) = rem.range(..=cursor).next_back() {
            if let Some(&ri) = self.pivots.get(&k) {
                let c = c.clone();
                let row = &self.rows[ri];
                axpy(&mut rem, &row.vec, &-&c);
                axpy(&mut combo, &row.combo, &c);
            } else if k == 0 {
                break;
            } else {
                cursor = k - 1;
            }
        }
        (rem, combo)
    }

    /// Inserts the next column.
    pub fn insert(&mut self, v: SparseVec) -> Insertion {
        let col = self.columns;
        self.columns += 1;
        let (rem, sub) = self.reduce(&v);
        let mut combo = SparseVec::new();
        combo.insert(col, self.domain.one());
        axpy(&mut combo, &sub, &-self.domain.one());
        if rem.is_empty() {
            return Insertion::Dependent(combo);
        }
        let (&lead, lc) = rem.iter().next_back().unwrap();
        let inv = lc.inv().expect("nonzero leading coefficient");
        let mut vec = SparseVec::new();
        axpy(&mut vec, &rem, &inv);
        let mut scaled = SparseVec::new();
        axpy(&mut scaled, &combo, &inv);
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(Row { vec, combo: scaled });
        Insertion::Pivot(lead)
    }

    /// Whether `v` lies in the span; if so, the combination of inserted
    /// columns that produces it.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rem, combo) = self.reduce(v);
        rem.is_empty().then_some(combo)
    }

    /// Basis rows with pivots below or at `limit` (inclusive).
    pub fn rows_with_pivot_at_most(&self, limit: usize) -> usize {
        self.pivot_coordinates().filter(|&p| p <= limit).count()
    }

    /// Fully reduced basis vectors, sorted by pivot.
    pub fn reduced_basis(&self) -> Vec<SparseVec> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| *self.rows[i].vec.keys().next_back().unwrap());
        let mut out: Vec<SparseVec> = vec![];
        for &i in &order {
            let row = &self.rows[i];
            let lead = *row.vec.keys().next_back().unwrap();
            let mut v = row.vec.clone();
            // clear other pivots below the leading coordinate
            loop {
                let hit = v
                    .iter()
                    .rev()
                    .find(|(k, _)| **k != lead && self.pivots.contains_key(k))
                    .map(|(k, c)| (*k, c.clone()));
                let Some((k, c)) = hit else { break };
                let other = &self.rows[self.pivots[&k]].vec;
                axpy(&mut v, other, &-&c);
            }
            out.push(v);
        }
        out
    }
}

/// Determinant by fraction-based elimination on a dense square matrix.
pub fn determinant(mut m: Vec<Vec<Scalar>>, domain: Domain) -> Scalar {
    let n = m.len();
    let mut det = domain.one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return domain.zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = &det * &pivot;
        let inv = pivot.inv().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
    }
    det
}
