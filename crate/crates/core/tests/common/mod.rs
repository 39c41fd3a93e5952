//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};
use syzkit::{Poly, Q};

/// Sign of the permutation sorting `seq` (distinct entries), from its cycle
/// decomposition: odd iff the number of even-length cycles is odd.
pub fn perm_sign(seq: &[usize]) -> bool {
    let mut sorted: Vec<usize> = seq.to_vec();
    sorted.sort_unstable();
    let target: Vec<usize> = seq.iter().map(|v| sorted.binary_search(v).unwrap()).collect();
    let mut seen = vec![false; seq.len()];
    let mut odd = false;
    for start in 0..seq.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = target[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

type ZI = Complex<BigInt>;

/// Clear denominators row by row, giving Gaussian integer rows.
fn integral_rows(rows: &[Vec<Q>]) -> Vec<Vec<ZI>> {
    rows.iter()
        .map(|row| {
            let mut l = BigInt::one();
            for x in row {
                for d in [x.re.denom(), x.im.denom()] {
                    if !(&l % d).is_zero() {
                        l *= d;
                    }
                }
            }
            row.iter()
                .map(|x| {
                    let re = (x.re.numer() * &l) / x.re.denom();
                    let im = (x.im.numer() * &l) / x.im.denom();
                    Complex::new(re, im)
                })
                .collect()
        })
        .collect()
}

fn exact_div(a: &ZI, b: &ZI) -> ZI {
    let norm = &b.re * &b.re + &b.im * &b.im;
    let num = a * b.conj();
    let (re, im) = (&num.re / &norm, &num.im / &norm);
    let q = Complex::new(re, im);
    assert_eq!(&q * b, *a, "Bareiss division must be exact");
    q
}

/// Rank by fraction-free (Bareiss) elimination over the Gaussian integers.
pub fn bareiss_rank(rows: &[Vec<Q>]) -> usize {
    let mut m = integral_rows(rows);
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = ZI::one();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = exact_div(&v, &prev);
            }
            m[r][col] = ZI::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut acc = Poly::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect()).collect();
        let term = &m[0][j] * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// All subsets of `0..n` as ascending index lists.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}
