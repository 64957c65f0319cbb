//! Small dense linear algebra over `GF(p)`: kernels and incremental bases with
//! coordinate extraction. Used where explicit homology bases are needed.

use crate::field::PrimeField;

pub type DenseVec = Vec<u32>;

/// Incrementally built basis that can express vectors in terms of the
/// accepted inputs.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    len: usize,
    reduced: Vec<(usize, DenseVec)>,
    // reduced[k] = Σ_j transform[k][j] · accepted[j]
    transform: Vec<DenseVec>,
}

impl Echelon {
    pub fn new(field: PrimeField, len: usize) -> Self {
        Echelon {
            field,
            len,
            reduced: Vec::new(),
            transform: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    /// Reduces `v` against the current basis. Returns the residual and the
    /// coefficients `c` with `v = residual + Σ c_k reduced[k]`.
    fn reduce(&self, v: &[u32]) -> (DenseVec, DenseVec) {
        let f = self.field;
        let mut res = v.to_vec();
        let mut coeff = vec![0; self.reduced.len()];
        for (k, (piv, r)) in self.reduced.iter().enumerate() {
            let c = res[*piv];
            if c != 0 {
                coeff[k] = c;
                for (x, y) in res.iter_mut().zip(r) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
        }
        (res, coeff)
    }

    /// Adds `v` if it is independent of the basis; returns whether it was accepted.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.len);
        let f = self.field;
        let (mut res, coeff) = self.reduce(v);
        let Some(piv) = res.iter().position(|x| *x != 0) else {
            return false;
        };
        let n = self.reduced.len();
        // new accepted vector gets index n
        let mut t = vec![0; n + 1];
        t[n] = 1;
        for (k, c) in coeff.iter().enumerate() {
            if *c != 0 {
                for (j, tj) in self.transform[k].iter().enumerate() {
                    t[j] = f.sub(t[j], f.mul(*c, *tj));
                }
            }
        }
        let s = f.inv(res[piv]);
        for x in res.iter_mut() {
            *x = f.mul(*x, s);
        }
        for x in t.iter_mut() {
            *x = f.mul(*x, s);
        }
        for old in self.transform.iter_mut() {
            old.push(0);
        }
        self.reduced.push((piv, res));
        self.transform.push(t);
        true
    }

    /// Coordinates of `v` with respect to the accepted vectors, in insertion
    /// order; `None` if `v` is outside their span.
    pub fn coordinates(&self, v: &[u32]) -> Option<DenseVec> {
        let f = self.field;
        let (res, coeff) = self.reduce(v);
        if res.iter().any(|x| *x != 0) {
            return None;
        }
        let mut out = vec![0; self.reduced.len()];
        for (k, c) in coeff.iter().enumerate() {
            if *c != 0 {
                for (j, tj) in self.transform[k].iter().enumerate() {
                    out[j] = f.add(out[j], f.mul(*c, *tj));
                }
            }
        }
        Some(out)
    }
}

/// Basis of the null space of a dense `rows × cols` matrix.
pub fn kernel(field: PrimeField, m: &[Vec<u32>], cols: usize) -> Vec<DenseVec> {
    let f = field;
    let mut a: Vec<DenseVec> = m.to_vec();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let s = f.inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = f.mul(*x, s);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let factor = a[i][c];
                let (top, rest) = if i < r {
                    let (lo, hi) = a.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = a.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (x, y) in rest.iter_mut().zip(top.iter()) {
                    *x = f.sub(*x, f.mul(factor, *y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut is_pivot = vec![false; cols];
    for c in &pivots {
        is_pivot[*c] = true;
    }
    (0..cols)
        .filter(|c| !is_pivot[*c])
        .map(|free| {
            let mut v = vec![0; cols];
            v[free] = 1;
            for (row, pc) in pivots.iter().enumerate() {
                v[*pc] = f.neg(a[row][free]);
            }
            v
        })
        .collect()
}

pub fn mat_vec(field: PrimeField, m: &[Vec<u32>], v: &[u32]) -> DenseVec {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(0, |acc, (a, b)| field.add(acc, field.mul(*a, *b)))
        })
        .collect()
}
