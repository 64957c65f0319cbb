//! Exact feasibility for `A x = b, x ≥ 0` by the phase-one simplex method
//! with Bland's rule, over arbitrary-precision rationals.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// A point with `A x = b`, `x ≥ 0`, or `None` when none exists.
///
/// Every row of `a` must have the same length.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    // tableau columns: n originals, m artificials, rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let flip = rhs.is_negative();
        let mut r = Vec::with_capacity(width);
        r.extend(row.iter().map(|x| if flip { -x.clone() } else { x.clone() }));
        r.extend((0..m).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }));
        r.push(if flip { -rhs.clone() } else { rhs.clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of minimising the sum of artificials
    let mut cost: Vec<Rational> = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }

    // Bland's rule: lowest-index improving column, lowest-index leaving basic variable
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // unbounded is impossible: the phase-one objective is bounded below by 0
        let (li, _) = leave.expect("phase-one objective is bounded");
        let piv = t[li][enter].clone();
        for x in t[li].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = t[li].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != li && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &factor * y;
                    }
                }
            }
        }
        let factor = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &factor * y;
            }
        }
        basis[li] = enter;
    }
    // the objective value is -cost[rhs]
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, var) in basis.iter().enumerate() {
        if *var < n {
            x[*var] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn check(a: &[Vec<Rational>], b: &[Rational], x: &[Rational]) {
        assert!(x.iter().all(|v| !v.is_negative()));
        for (row, rhs) in a.iter().zip(b) {
            let lhs = row.iter().zip(x).fold(Rational::zero(), |acc, (p, q)| acc + p * q);
            assert_eq!(&lhs, rhs);
        }
    }

    #[test]
    fn simple_feasible() {
        // x + y = 1, x - y = 0
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        let b = vec![int(1), int(0)];
        let x = feasible_point(&a, &b).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn infeasible_by_sign() {
        // x + y = -1 with x, y >= 0
        assert!(feasible_point(&[vec![int(1), int(1)]], &[int(-1)]).is_none());
        // x = 1 and x = 2
        assert!(feasible_point(&[vec![int(1)], vec![int(1)]], &[int(1), int(2)]).is_none());
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        let a = vec![vec![int(-1), int(0), int(1)]];
        let b = vec![int(-2)];
        let x = feasible_point(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn degenerate_redundant_rows() {
        // duplicated constraints leave an artificial in the basis at zero
        let a = vec![vec![int(1), int(2), int(0)], vec![int(2), int(4), int(0)], vec![int(0), int(1), int(1)]];
        let b = vec![int(2), int(4), int(1)];
        let x = feasible_point(&a, &b).unwrap();
        check(&a, &b, &x);
    }

    #[test]
    fn empty_system() {
        assert_eq!(feasible_point(&[], &[]), Some(vec![]));
    }
}
