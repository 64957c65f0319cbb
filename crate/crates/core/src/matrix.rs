//! Sparse matrices over a prime field.

use crate::error::{invalid, Result};
use crate::field::PrimeField;

/// Sparse sorted column: `(row, value)` pairs with non-zero values.
pub type SparseColumn = Vec<(u32, u32)>;

/// Column-major sparse matrix over `GF(p)`. Stored entries are non-zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGF {
    field: PrimeField,
    rows: usize,
    cols: Vec<SparseColumn>,
}

impl MatrixGF {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        MatrixGF {
            field,
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        MatrixGF {
            field,
            rows: n,
            cols: (0..n).map(|i| vec![(i as u32, 1 % field.p())]).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets; values are reduced mod `p`,
    /// repeated positions are summed.
    pub fn from_triplets(
        field: PrimeField,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut m = Self::zeros(field, rows, cols);
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(invalid(format!(
                    "entry ({r},{c}) outside a {rows}x{cols} matrix"
                )));
            }
            m.cols[c].push((r as u32, field.from_i64(v)));
        }
        for col in &mut m.cols {
            col.sort_unstable_by_key(|e| e.0);
            let mut merged: SparseColumn = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 = field.add(last.1, v),
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *col = merged;
        }
        Ok(m)
    }

    /// Builds from already-sorted sparse columns with non-zero residues.
    pub(crate) fn from_columns(field: PrimeField, rows: usize, cols: Vec<SparseColumn>) -> Self {
        debug_assert!(cols.iter().all(|c| c
            .windows(2)
            .all(|w| w[0].0 < w[1].0)
            && c.iter().all(|e| e.1 != 0 && (e.0 as usize) < rows)));
        MatrixGF { field, rows, cols }
    }

    pub fn from_dense(field: PrimeField, dense: &[Vec<u32>]) -> Self {
        let rows = dense.len();
        let ncols = dense.first().map_or(0, Vec::len);
        let cols = (0..ncols)
            .map(|c| {
                (0..rows)
                    .filter_map(|r| {
                        let v = dense[r][c] % field.p();
                        (v != 0).then_some((r as u32, v))
                    })
                    .collect()
            })
            .collect();
        MatrixGF { field, rows, cols }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &[(u32, u32)] {
        &self.cols[c]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.cols[c]
            .binary_search_by_key(&(r as u32), |e| e.0)
            .map(|i| self.cols[c][i].1)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r as usize, c, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut d = vec![vec![0; self.cols()]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &MatrixGF) -> Result<MatrixGF> {
        if self.cols() != other.rows {
            return Err(invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let f = self.field;
        let mut acc = vec![0u32; self.rows];
        let mut touched = Vec::new();
        let cols = other
            .cols
            .iter()
            .map(|ocol| {
                for &(k, w) in ocol {
                    for &(r, v) in &self.cols[k as usize] {
                        if acc[r as usize] == 0 {
                            touched.push(r);
                        }
                        acc[r as usize] = f.add(acc[r as usize], f.mul(v, w));
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let col: SparseColumn = touched
                    .iter()
                    .filter_map(|&r| {
                        let v = std::mem::take(&mut acc[r as usize]);
                        (v != 0).then_some((r, v))
                    })
                    .collect();
                touched.clear();
                col
            })
            .collect();
        Ok(MatrixGF::from_columns(f, self.rows, cols))
    }

    /// Applies the matrix to a sparse column vector.
    pub fn apply(&self, v: &[(u32, u32)]) -> SparseColumn {
        let mut out: SparseColumn = Vec::new();
        for &(k, w) in v {
            let scaled: SparseColumn = self.cols[k as usize]
                .iter()
                .map(|&(r, x)| (r, self.field.mul(x, w)))
                .collect();
            out = axpy(self.field, &out, 1, &scaled);
        }
        out
    }

    /// Submatrix on the given rows and columns, re-indexed in the given order.
    /// `rows` must be increasing.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> MatrixGF {
        let mut row_pos = vec![u32::MAX; self.rows];
        for (i, r) in rows.iter().enumerate() {
            row_pos[*r] = i as u32;
        }
        let new_cols = cols
            .iter()
            .map(|&c| {
                self.cols[c]
                    .iter()
                    .filter(|e| row_pos[e.0 as usize] != u32::MAX)
                    .map(|&(r, v)| (row_pos[r as usize], v))
                    .collect()
            })
            .collect();
        MatrixGF::from_columns(self.field, rows.len(), new_cols)
    }

    /// Exact rank by column reduction on the lowest non-zero row.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut pivot_of_row: Vec<Option<u32>> = vec![None; self.rows];
        let mut reduced: Vec<SparseColumn> = Vec::new();
        for col in &self.cols {
            let mut c = col.clone();
            while let Some(&(low, v)) = c.last() {
                match pivot_of_row[low as usize] {
                    Some(k) => {
                        // stored pivot columns are normalised to end in 1
                        c = axpy(f, &c, f.neg(v), &reduced[k as usize]);
                    }
                    None => {
                        let scale = f.inv(v);
                        for e in &mut c {
                            e.1 = f.mul(e.1, scale);
                        }
                        pivot_of_row[low as usize] = Some(reduced.len() as u32);
                        reduced.push(c);
                        break;
                    }
                }
            }
        }
        reduced.len()
    }
}

/// `x + a·y` for sorted sparse columns.
pub(crate) fn axpy(f: PrimeField, x: &[(u32, u32)], a: u32, y: &[(u32, u32)]) -> SparseColumn {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            let v = f.mul(a, y[j].1);
            if v != 0 {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = f.add(x[i].1, f.mul(a, y[j].1));
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Row echelon elimination on a dense copy; independent of the sparse path.
    fn dense_rank(p: u32, mut m: Vec<Vec<u32>>) -> usize {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let inv = |a: u32| -> u32 {
            (1..p).find(|b| (a as u64 * *b as u64) % p as u64 == 1).unwrap()
        };
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| !m[r][c].is_multiple_of(p)) else {
                continue;
            };
            m.swap(rank, piv);
            let s = inv(m[rank][c] % p);
            for x in m[rank].iter_mut() {
                *x = (*x as u64 * s as u64 % p as u64) as u32;
            }
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && !row[c].is_multiple_of(p) {
                    let factor = row[c] % p;
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        let sub = (factor as u64 * *y as u64 % p as u64) as u32;
                        *x = (*x % p + p - sub) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_ranks() {
        for p in [2, 3, 5] {
            let f = PrimeField::new(p).unwrap();
            assert_eq!(MatrixGF::identity(f, 2).rank(), 2);
            assert_eq!(MatrixGF::zeros(f, 4, 3).rank(), 0);
            assert_eq!(MatrixGF::zeros(f, 0, 0).rank(), 0);
        }
        // edge-vertex incidence of a hollow triangle, edges {0,1},{0,2},{1,2}
        let f = PrimeField::new(2).unwrap();
        let d1 = MatrixGF::from_triplets(
            f,
            3,
            3,
            [(0, 0, 1), (1, 0, 1), (0, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1)],
        )
        .unwrap();
        assert_eq!(d1.rank(), 2);
    }

    #[test]
    fn triplets_reduce_and_merge() {
        let f = PrimeField::new(3).unwrap();
        let m = MatrixGF::from_triplets(f, 2, 2, [(0, 0, 2), (0, 0, 1), (1, 1, -1)]).unwrap();
        assert_eq!(m.get(0, 0), 0);
        assert_eq!(m.get(1, 1), 2);
        assert_eq!(m.nnz(), 1);
        assert!(MatrixGF::from_triplets(f, 2, 2, [(2, 0, 1)]).is_err());
    }

    #[test]
    fn product_matches_dense() {
        let f = PrimeField::new(5).unwrap();
        let a = MatrixGF::from_dense(f, &[vec![1, 2, 0], vec![0, 3, 4]]);
        let b = MatrixGF::from_dense(f, &[vec![1, 0], vec![2, 1], vec![0, 4]]);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.to_dense(), vec![vec![0, 2], vec![1, 4]]);
        assert!(b.mul(&b).is_err());
    }

    #[test]
    fn select_reindexes() {
        let f = PrimeField::new(7).unwrap();
        let a = MatrixGF::from_dense(f, &[vec![1, 2, 3], vec![4, 5, 6], vec![0, 1, 0]]);
        let s = a.select(&[0, 2], &[2, 1]);
        assert_eq!(s.to_dense(), vec![vec![3, 2], vec![0, 1]]);
    }

    fn random_matrix() -> impl Strategy<Value = (u32, Vec<Vec<u32>>)> {
        (prop::sample::select(vec![2u32, 3, 5]), 0usize..=30, 0usize..=30, 0u32..=100).prop_flat_map(
            |(p, r, c, density)| {
                let cell = prop::bool::weighted(density as f64 / 100.0)
                    .prop_flat_map(move |nz| if nz { (1..p).boxed() } else { Just(0u32).boxed() });
                (Just(p), prop::collection::vec(prop::collection::vec(cell, c), r))
            },
        )
    }

    proptest! {
        #[test]
        fn rank_agrees_with_dense_elimination((p, dense) in random_matrix()) {
            let f = PrimeField::new(p).unwrap();
            let cols = dense.first().map_or(0, Vec::len);
            let m = if dense.is_empty() { MatrixGF::zeros(f, 0, cols) } else { MatrixGF::from_dense(f, &dense) };
            prop_assert_eq!(m.rank(), dense_rank(p, dense));
        }
    }
}
