//! Key-equation machinery shared by every decoder: syndromes and their
//! matrix views, Chien search, Forney's formula, the residual check, and the
//! uniform decode outcome.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gf::{Elem, Field, GfError};
use crate::linalg::Matrix;
use crate::poly::{self, Poly};
use crate::rscode::{apply_errors, Code, ErrorPattern, Word};

/// S_1 .. S_{d-1}, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndromes {
    s: Vec<Elem>,
}

impl Syndromes {
    pub fn from_vec(s: Vec<Elem>) -> Self {
        Syndromes { s }
    }

    /// S_i, 1-based.
    #[inline]
    pub fn get(&self, i: usize) -> Elem {
        self.s[i - 1]
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.s
    }

    /// Number of syndromes, d - 1.
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|&x| x == 0)
    }

    /// S(x) = Σ S_i x^{i-1}
    pub fn poly(&self) -> Poly {
        self.s.clone()
    }

    /// Hankel block with entry (r, c) = S_{r+c+1}, 0-based r, c, and the
    /// column subset given (0-based column indices into A).
    pub fn hankel(&self, rows: usize, cols: impl IntoIterator<Item = usize>) -> Matrix {
        let cols: Vec<usize> = cols.into_iter().collect();
        (0..rows).map(|r| cols.iter().map(|&c| self.get(r + c + 1)).collect()).collect()
    }

    /// The (d-1-t) x (t+1) syndrome matrix A.
    pub fn a_matrix(&self, t: usize) -> Matrix {
        self.hankel(self.len() - t, 0..=t)
    }

    /// Leading i x i block A_i.
    pub fn a_block(&self, i: usize) -> Matrix {
        self.hankel(i, 0..i)
    }

    /// i x (i+1) block B_i.
    pub fn b_block(&self, i: usize) -> Matrix {
        self.hankel(i, 0..=i)
    }

    /// k^{(i)}_j = (-1)^{i+j} det(B_i without column j+1), j = 0..=i.
    /// These are the coefficients, highest power first, of det(A_i)·σ when A_i
    /// is nonsingular.
    pub fn k_vector(&self, f: &Field, i: usize) -> Vec<Elem> {
        (0..=i)
            .map(|j| crate::linalg::det(f, &self.hankel(i, (0..=i).filter(|&c| c != j))))
            .collect()
    }
}

/// Horner evaluation at α^l .. α^{l+d-2}.
pub fn compute_syndromes(code: &Code, r: &[Elem]) -> Syndromes {
    let f = code.field();
    Syndromes { s: code.roots().map(|x| poly::eval(f, r, x)).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChienResult {
    /// p_1 < … < p_k
    pub positions: Vec<usize>,
    /// X_i^{-1} = α^{n - p_i}
    pub inverse_roots: Vec<Elem>,
    /// fewer roots than deg σ
    pub deficit: bool,
}

/// Chien's search, run literally: for i = 1..=n multiply σ_l by α^l and test
/// σ_0 + Σσ_l = 0; a root at step i is position n - i. The constant term is
/// kept general so scaled locators work without normalising.
pub fn chien_search(f: &Field, n: usize, sigma: &[Elem]) -> ChienResult {
    let e = poly::deg(sigma).unwrap_or(0);
    let mut reg: Vec<Elem> = sigma.iter().take(e + 1).copied().collect();
    if reg.is_empty() {
        reg.push(0);
    }
    let steps: Vec<Elem> = (0..=e).map(|l| f.alpha_pow(l as i64)).collect();
    let mut found = Vec::with_capacity(e);
    for i in 1..=n {
        let mut sum = reg[0];
        for l in 1..=e {
            reg[l] = f.mul(reg[l], steps[l]);
            sum ^= reg[l];
        }
        if sum == 0 && e > 0 {
            found.push(n - i);
        }
    }
    found.reverse();
    let inverse_roots = found.iter().map(|&p| f.alpha_pow((n - p) as i64)).collect();
    ChienResult { deficit: found.len() < e, positions: found, inverse_roots }
}

/// E_i = -ω(X_i^{-1}) / σ'(X_i^{-1})
pub fn forney(f: &Field, sigma: &[Elem], omega: &[Elem], inverse_roots: &[Elem]) -> Result<Vec<Elem>, GfError> {
    let ds = poly::derivative(sigma);
    inverse_roots
        .iter()
        .map(|&xi| f.div(poly::eval(f, omega, xi), poly::eval(f, &ds, xi)))
        .collect()
}

/// ω ≡ σ·S (mod x^{d-1}), from the first deg σ coefficients of the product.
pub fn omega_from_sigma(f: &Field, sigma: &[Elem], s: &Syndromes) -> Poly {
    let e = poly::deg(sigma).unwrap_or(0);
    poly::trim(poly::truncate(&poly::mul(f, sigma, &s.poly()), e.max(1)))
}

/// True iff σ(x)S(x) ≡ ω(x) (mod x^{d-1}).
pub fn key_equation_residual(f: &Field, sigma: &[Elem], omega: &[Elem], s: &Syndromes, d: usize) -> bool {
    let prod = poly::truncate(&poly::mul(f, sigma, &s.poly()), d - 1);
    poly::same(&prod, &poly::truncate(omega, d - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    /// No nonzero syndrome within the correctable window.
    SyndromeExhausted,
    TooManyErrors,
    ChienRootDeficit,
    RankMismatch,
    DegreeMismatch,
    ZeroErrorValue,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::SyndromeExhausted => "syndrome_exhausted",
            Self::TooManyErrors => "too_many_errors",
            Self::ChienRootDeficit => "chien_root_deficit",
            Self::RankMismatch => "rank_mismatch",
            Self::DegreeMismatch => "degree_mismatch",
            Self::ZeroErrorValue => "zero_error_value",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecodeOutcome {
    NoError,
    /// `codeword` is r minus the pattern. With gates off it may not be a
    /// codeword at all.
    Corrected { pattern: ErrorPattern, codeword: Word },
    Failure { reason: FailureReason },
}

impl DecodeOutcome {
    pub fn fail(reason: FailureReason) -> Self {
        DecodeOutcome::Failure { reason }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, DecodeOutcome::Failure { .. })
    }

    /// The decoded word: r itself for NoError, None on failure.
    pub fn output<'a>(&'a self, r: &'a [Elem]) -> Option<&'a [Elem]> {
        match self {
            DecodeOutcome::NoError => Some(r),
            DecodeOutcome::Corrected { codeword, .. } => Some(codeword),
            DecodeOutcome::Failure { .. } => None,
        }
    }

    pub fn failure_reason(&self) -> Option<FailureReason> {
        match self {
            DecodeOutcome::Failure { reason } => Some(*reason),
            _ => None,
        }
    }
}

/// Value formulas all solve for Ê_j with S_i = Σ Ê_j X_j^i; with a root
/// offset l the true value is Ê_j · X_j^{1-l}. Zero values are rejected when
/// gated. Builds the final outcome.
pub fn finish(
    code: &Code,
    r: &[Elem],
    chien: &ChienResult,
    raw_values: Vec<Elem>,
    gates: bool,
) -> DecodeOutcome {
    let f = code.field();
    let values: Vec<Elem> = raw_values
        .iter()
        .zip(&chien.inverse_roots)
        .map(|(&v, &xi)| f.mul(v, f.pow(xi, (code.l as u64 + code.n as u64 - 1) % code.n as u64)))
        .collect();
    if gates && values.contains(&0) {
        return DecodeOutcome::fail(FailureReason::ZeroErrorValue);
    }
    // ungated zero values just leave the symbol alone
    let (positions, values): (Vec<usize>, Vec<Elem>) =
        chien.positions.iter().copied().zip(values).filter(|&(_, v)| v != 0).unzip();
    let pattern = ErrorPattern { positions, values };
    let codeword = apply_errors(r, &pattern);
    DecodeOutcome::Corrected { pattern, codeword }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::rscode::Code;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn gf16() -> Arc<Field> {
        Arc::new(Field::new(4, 0x13).unwrap())
    }

    #[test]
    fn hankel_views() {
        let s = Syndromes::from_vec((1..=8).collect());
        let a = s.a_matrix(4);
        assert_eq!(a.len(), 4);
        assert_eq!(a[0].len(), 5);
        for r in 0..4 {
            for c in 0..5 {
                assert_eq!(a[r][c], s.get(r + c + 1));
            }
        }
        assert_eq!(s.b_block(2), vec![vec![1, 2, 3], vec![2, 3, 4]]);
        assert_eq!(s.a_block(2), vec![vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn syndromes_equal_direct_power_sums() {
        let f = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for l in [0usize, 1, 3] {
            let code = Code::new(f.clone(), 7, l).unwrap();
            for _ in 0..30 {
                let w = rng.random_range(0..6);
                let pat = code.random_errors(w, &mut rng).unwrap();
                let r = crate::rscode::apply_errors(&code.encode(&code.random_message(&mut rng)).unwrap(), &pat);
                let s = compute_syndromes(&code, &r);
                for i in 1..=6 {
                    let direct = pat.positions.iter().zip(&pat.values).fold(0, |acc, (&p, &v)| {
                        acc ^ f.mul(v, f.alpha_pow((p * (l + i - 1)) as i64))
                    });
                    assert_eq!(s.get(i), direct);
                }
            }
        }
    }

    #[test]
    fn rank_equals_weight_when_correctable() {
        let f = gf16();
        let code = Code::narrow_sense(f.clone(), 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let e = rng.random_range(0..=code.t);
            let pat = code.random_errors(e, &mut rng).unwrap();
            let s = compute_syndromes(&code, &pat.to_word(code.n));
            assert_eq!(linalg::rank(&f, &s.a_matrix(code.t)), e);
            assert_ne!(linalg::det(&f, &s.a_block(e)), 0);
        }
    }

    #[test]
    fn chien_against_direct_evaluation() {
        let f = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let deg = rng.random_range(1..5);
            let mut sigma: Vec<Elem> = (0..=deg).map(|_| rng.random_range(0..16)).collect();
            sigma[0] = 1;
            sigma[deg] = rng.random_range(1..16);
            let res = chien_search(&f, 15, &sigma);
            let direct: Vec<usize> = (0..15)
                .filter(|&p| poly::eval(&f, &sigma, f.alpha_pow(-(p as i64))) == 0)
                .collect();
            assert_eq!(res.positions, direct);
            assert_eq!(res.deficit, direct.len() < deg);
        }
        // σ = 1 - αx: single root, X = α, position 1
        let res = chien_search(&f, 15, &[1, f.alpha_pow(1)]);
        assert_eq!(res.positions, vec![1]);
        assert_eq!(res.inverse_roots, vec![f.alpha_pow(14)]);
        // σ = 1 - x: position 0, only reached on the final i = n step
        assert_eq!(chien_search(&f, 15, &[1, 1]).positions, vec![0]);
    }

    #[test]
    fn residual_detects_mutation() {
        let f = gf16();
        let code = Code::narrow_sense(f.clone(), 9).unwrap();
        let pat = code.random_errors_seeded(3, 11).unwrap();
        let s = compute_syndromes(&code, &pat.to_word(15));
        // σ from the known locations
        let mut sigma = vec![1];
        for &p in &pat.positions {
            sigma = poly::mul(&f, &sigma, &[1, f.alpha_pow(p as i64)]);
        }
        let omega = omega_from_sigma(&f, &sigma, &s);
        assert!(key_equation_residual(&f, &sigma, &omega, &s, 9));
        let mut bad = omega.clone();
        bad[0] ^= 1;
        assert!(!key_equation_residual(&f, &sigma, &bad, &s, 9));
        assert!(key_equation_residual(&f, &[1], &[], &Syndromes::from_vec(vec![0; 8]), 9));
        let vals = forney(&f, &sigma, &omega, &chien_search(&f, 15, &sigma).inverse_roots).unwrap();
        assert_eq!(vals, pat.values);
    }
}
