//! Dense polynomials over GF(2^m) as coefficient slices, index k <-> x^k.
//! These helpers are uncounted; instrumented code does its own arithmetic.

use crate::gf::{Elem, Field, GfError};

pub type Poly = Vec<Elem>;

/// Degree, or None for the zero polynomial.
pub fn deg(p: &[Elem]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

pub fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Equality up to trailing zeros.
pub fn same(a: &[Elem], b: &[Elem]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|k| a.get(k).copied().unwrap_or(0) == b.get(k).copied().unwrap_or(0))
}

/// Horner evaluation.
pub fn eval(f: &Field, p: &[Elem], x: Elem) -> Elem {
    p.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn add(a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| a.get(k).copied().unwrap_or(0) ^ b.get(k).copied().unwrap_or(0))
        .collect()
}

pub fn scale(f: &Field, p: &[Elem], s: Elem) -> Poly {
    p.iter().map(|&c| f.mul(c, s)).collect()
}

pub fn mul(f: &Field, a: &[Elem], b: &[Elem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= f.mul(x, y);
        }
    }
    out
}

/// x^k · p
pub fn shift(p: &[Elem], k: usize) -> Poly {
    let mut out = vec![0; k];
    out.extend_from_slice(p);
    out
}

/// p mod x^k
pub fn truncate(p: &[Elem], k: usize) -> Poly {
    p.iter().take(k).copied().collect()
}

/// Formal derivative. In characteristic 2 the even-degree terms vanish.
pub fn derivative(p: &[Elem]) -> Poly {
    if p.len() <= 1 {
        return Vec::new();
    }
    (1..p.len()).map(|j| if j % 2 == 1 { p[j] } else { 0 }).collect()
}

/// Remainder of a by g (g nonzero).
pub fn rem(f: &Field, a: &[Elem], g: &[Elem]) -> Result<Poly, GfError> {
    let dg = deg(g).ok_or(GfError::DivisionByZero)?;
    let lead_inv = f.inv(g[dg])?;
    let mut r = a.to_vec();
    while let Some(dr) = deg(&r) {
        if dr < dg {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        for k in 0..=dg {
            r[dr - dg + k] ^= f.mul(c, g[k]);
        }
    }
    r.truncate(dg);
    Ok(r)
}

/// w = (w_0..w_{i-1}) ↦ w_0 x^i + … + w_{i-1} x + 1.
pub fn reciprocal_from_w(w: &[Elem]) -> Poly {
    let mut p = vec![1];
    p.extend(w.iter().rev());
    p
}

/// Human-readable form such as `1 + a^6 x + a^9 x^2`.
pub fn fmt(f: &Field, p: &[Elem]) -> String {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| {
            let coef = f.fmt_elem(c);
            match (k, coef.as_str()) {
                (0, _) => coef,
                (1, "1") => "x".into(),
                (1, _) => format!("{coef} x"),
                (_, "1") => format!("x^{k}"),
                _ => format!("{coef} x^{k}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
