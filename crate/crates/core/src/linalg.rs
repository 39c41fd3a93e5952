//! Small exact linear algebra over scalars and over polynomials.

use std::collections::HashMap;

use crate::coeffring::Poly;
use crate::scalar::Scalar;

pub type PolyMatrix<S> = Vec<Vec<Poly<S>>>;

/// Inverse of a square polynomial matrix using only constant pivots.
///
/// Succeeds for any matrix that can be reduced by pivoting on nonzero
/// constants (unipotent, constant, and many others with constant
/// determinant). Returns `None` when no constant pivot is left.
pub fn invert_poly_matrix<S: Scalar>(m: &PolyMatrix<S>) -> Option<PolyMatrix<S>> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return None;
    }
    let mut left: PolyMatrix<S> = m.clone();
    let mut right: PolyMatrix<S> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }).collect())
        .collect();
    let mut row_used = vec![false; n];
    let mut pivot_row = vec![usize::MAX; n];
    for _ in 0..n {
        // Prefer unit pivots, then any nonzero constant.
        let mut best: Option<(usize, usize, bool)> = None;
        'search: for (c, _) in pivot_row.iter().enumerate().filter(|(_, r)| **r == usize::MAX) {
            for r in (0..n).filter(|r| !row_used[*r]) {
                if let Some(v) = left[r][c].constant_value() {
                    if v.is_zero() {
                        continue;
                    }
                    let unit = v.is_one() || (-v).is_one();
                    if unit {
                        best = Some((r, c, true));
                        break 'search;
                    }
                    if best.is_none() {
                        best = Some((r, c, false));
                    }
                }
            }
        }
        let (r, c, _) = best?;
        let inv = S::one() / left[r][c].constant_value().unwrap();
        if !inv.is_one() {
            for x in left[r].iter_mut().chain(right[r].iter_mut()) {
                *x = x.scale(&inv);
            }
        }
        let prow_l = left[r].clone();
        let prow_r = right[r].clone();
        for rr in 0..n {
            if rr == r || left[rr][c].is_zero() {
                continue;
            }
            let f = left[rr][c].clone();
            for j in 0..n {
                if !prow_l[j].is_zero() {
                    left[rr][j] = &left[rr][j] - &(&f * &prow_l[j]);
                }
                if !prow_r[j].is_zero() {
                    right[rr][j] = &right[rr][j] - &(&f * &prow_r[j]);
                }
            }
        }
        row_used[r] = true;
        pivot_row[c] = r;
    }
    Some((0..n).map(|c| right[pivot_row[c]].clone()).collect())
}

/// Determinant by cofactor expansion along the first row, memoized on
/// the set of remaining columns. Fine for the small matrices used here.
pub fn poly_det<S: Scalar>(m: &PolyMatrix<S>) -> Poly<S> {
    let n = m.len();
    assert!(n <= 63, "matrix too large for cofactor determinant");
    let mut memo: HashMap<u64, Poly<S>> = HashMap::new();
    det_rec(m, 0, (1u64 << n) - 1, &mut memo)
}

fn det_rec<S: Scalar>(m: &PolyMatrix<S>, row: usize, cols: u64, memo: &mut HashMap<u64, Poly<S>>) -> Poly<S> {
    if cols == 0 {
        return Poly::one();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let mut acc = Poly::zero();
    let mut sign_neg = false;
    let mut rest = cols;
    while rest != 0 {
        let c = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let entry = &m[row][c];
        if !entry.is_zero() {
            let minor = det_rec(m, row + 1, cols & !(1u64 << c), memo);
            let t = entry * &minor;
            acc = if sign_neg { &acc - &t } else { &acc + &t };
        }
        sign_neg = !sign_neg;
    }
    memo.insert(cols, acc.clone());
    acc
}

pub fn poly_mat_mul<S: Scalar>(a: &PolyMatrix<S>, b: &PolyMatrix<S>) -> PolyMatrix<S> {
    let n = a.len();
    let m = b.first().map(Vec::len).unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero();
                    for (k, bk) in b.iter().enumerate() {
                        if !a[i][k].is_zero() && !bk[j].is_zero() {
                            acc = &acc + &(&a[i][k] * &bk[j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn poly_transpose<S: Scalar>(a: &PolyMatrix<S>) -> PolyMatrix<S> {
    let n = a.len();
    let m = a.first().map(Vec::len).unwrap_or(0);
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn poly_identity<S: Scalar>(n: usize) -> PolyMatrix<S> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }).collect()).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(rows: &mut Vec<Vec<S>>) -> Vec<usize> {
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.mul_ref(&inv);
                }
            }
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot) {
                if !p.is_zero() {
                    *x = x.sub_ref(&f.mul_ref(p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right null space `{x : A x = 0}` for `A` with `ncols` columns.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (row, &pc) in m.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[pc] = -row[f].clone();
                }
            }
            v
        })
        .collect()
}

/// Indices of a maximal independent subset of `extra` modulo the span of
/// `base`, chosen greedily in order.
pub fn complement_indices<S: Scalar>(base: &[Vec<S>], extra: &[Vec<S>]) -> Vec<usize> {
    let mut span: Vec<Vec<S>> = base.to_vec();
    let mut r = rank(&span);
    let mut chosen = Vec::new();
    for (i, v) in extra.iter().enumerate() {
        span.push(v.clone());
        let mut m = span.clone();
        let r2 = rref(&mut m).len();
        if r2 > r {
            chosen.push(i);
            span = m;
            r = r2;
        } else {
            span.pop();
        }
    }
    chosen
}

/// Determinant of a scalar matrix by elimination.
pub fn scalar_det<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return S::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det = det.mul_ref(&pivot);
        let inv = S::one() / pivot;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].mul_ref(&inv);
            for k in c..n {
                let t = f.mul_ref(&a[c][k]);
                a[r][k] = a[r][k].sub_ref(&t);
            }
        }
    }
    det
}

/// Solve `A x = y` where `A` is given by its columns. Returns one solution
/// (free variables set to zero) or `None` if inconsistent.
pub fn solve_columns<S: Scalar>(columns: &[Vec<S>], y: &[S]) -> Option<Vec<S>> {
    let nrows = y.len();
    let ncols = columns.len();
    let mut rows: Vec<Vec<S>> = (0..nrows)
        .map(|r| {
            let mut row: Vec<S> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(y[r].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![S::zero(); ncols];
    for (row, &pc) in rows.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, GaussianRational};

    type P = Poly<GaussianRational>;

    #[test]
    fn inverts_non_triangular_unipotent() {
        let r = P::var("r_1");
        let m = vec![
            vec![P::one(), P::zero(), P::zero()],
            vec![P::zero(), &P::one() + &r.pow(2), -&r],
            vec![P::zero(), -&r, P::one()],
        ];
        let inv = invert_poly_matrix(&m).unwrap();
        assert_eq!(poly_mat_mul(&m, &inv), poly_identity(3));
        assert_eq!(poly_det(&m), P::one());
    }

    #[test]
    fn rejects_nonconstant_determinant() {
        let r = P::var("r_1");
        let m = vec![vec![r.clone()]];
        assert!(invert_poly_matrix(&m).is_none());
    }

    #[test]
    fn scalar_rank_and_kernel() {
        let rows = vec![vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(2, 1), q(4, 1), q(6, 1)]];
        assert_eq!(rank(&rows), 1);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: GaussianRational =
                rows[0].iter().zip(&v).fold(q(0, 1), |acc, (a, b)| acc + a.clone() * b.clone());
            assert_eq!(s, q(0, 1));
        }
    }

    #[test]
    fn determinant_and_solve() {
        let m = vec![vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(1, 1)]];
        assert_eq!(scalar_det(&m), q(-6, 1));
        let cols = vec![vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]];
        assert_eq!(solve_columns(&cols, &[q(3, 1), q(2, 1)]), Some(vec![q(1, 1), q(2, 1)]));
        let dep = vec![vec![q(1, 1), q(1, 1)]];
        assert_eq!(solve_columns(&dep, &[q(1, 1), q(2, 1)]), None);
    }

    #[test]
    fn complement_choice() {
        let base = vec![vec![q(1, 1), q(0, 1)]];
        let extra = vec![vec![q(2, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]];
        assert_eq!(complement_indices(&base, &extra), vec![1]);
    }
}
