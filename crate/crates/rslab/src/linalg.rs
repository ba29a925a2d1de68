//! Dense Gaussian elimination over GF(2^m). No pivot growth to worry about in
//! exact arithmetic, so plain row reduction with any nonzero pivot.

use crate::gf::{Elem, Field};

pub type Matrix = Vec<Vec<Elem>>;

/// Row echelon form in place; returns the rank and the product of the pivots
/// (which is the determinant for square input, up to sign = 1 in char 2).
fn eliminate(f: &Field, m: &mut Matrix) -> (usize, Elem) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prod: Elem = 1;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = f.inv(m[rank][c]).expect("pivot is nonzero");
        prod = f.mul(prod, m[rank][c]);
        for r in rank + 1..rows {
            if m[r][c] == 0 {
                continue;
            }
            let k = f.mul(m[r][c], inv);
            for j in c..cols {
                let v = f.mul(k, m[rank][j]);
                m[r][j] ^= v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, prod)
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    eliminate(f, &mut m.clone()).0
}

pub fn det(f: &Field, m: &Matrix) -> Elem {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let (r, p) = eliminate(f, &mut m.clone());
    if r < n {
        0
    } else {
        p
    }
}

/// Solve m·x = b for square nonsingular m.
pub fn solve(f: &Field, m: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    let n = m.len();
    let mut aug: Matrix = m.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| aug[r][c] != 0)?;
        aug.swap(c, p);
        let inv = f.inv(aug[c][c]).ok()?;
        for j in c..=n {
            aug[c][j] = f.mul(aug[c][j], inv);
        }
        for r in 0..n {
            if r != c && aug[r][c] != 0 {
                let k = aug[r][c];
                for j in c..=n {
                    let v = f.mul(k, aug[c][j]);
                    aug[r][j] ^= v;
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n]).collect())
}

pub fn mat_vec(f: &Field, m: &Matrix, x: &[Elem]) -> Vec<Elem> {
    m.iter()
        .map(|row| row.iter().zip(x).fold(0, |acc, (&a, &b)| acc ^ f.mul(a, b)))
        .collect()
}

/// Determinant by cofactor expansion along the first row. Exponential; only
/// used as an independent oracle on tiny matrices.
pub fn det_cofactor(f: &Field, m: &Matrix) -> Elem {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n).fold(0, |acc, c| {
            if m[0][c] == 0 {
                return acc;
            }
            let minor: Matrix = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                .collect();
            acc ^ f.mul(m[0][c], det_cofactor(f, &minor))
        }),
    }
}
