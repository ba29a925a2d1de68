//! RS(n, d, α) codes: generator polynomial, systematic encoding, membership,
//! error injection and Hamming metrics.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::poly::{self, Poly};

/// n coefficients, index i <-> x^i.
pub type Word = Vec<Elem>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol {0:#x} is not a field element")]
    NotInField(Elem),
}

#[derive(Debug, Clone)]
pub struct Code {
    field: Arc<Field>,
    pub n: usize,
    pub d: usize,
    pub l: usize,
    pub t: usize,
    pub k: usize,
    pub g: Poly,
}

impl Code {
    pub fn new(field: Arc<Field>, d: usize, l: usize) -> Result<Self, CodeError> {
        let n = field.order();
        if d < 2 || d > n {
            return Err(CodeError::InvalidParameters(format!("d={d} outside 2..={n}")));
        }
        let mut g: Poly = vec![1];
        for i in 0..d - 1 {
            let root = field.alpha_pow((l + i) as i64);
            g = poly::mul(&field, &g, &[root, 1]);
        }
        Ok(Code { n, d, l, t: (d - 1) / 2, k: n - d + 1, g, field })
    }

    /// Root offset 1, the usual convention.
    pub fn narrow_sense(field: Arc<Field>, d: usize) -> Result<Self, CodeError> {
        Code::new(field, d, 1)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn field_arc(&self) -> Arc<Field> {
        Arc::clone(&self.field)
    }

    /// The d-1 syndrome evaluation points α^l .. α^{l+d-2}.
    pub fn roots(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.d - 1).map(|i| self.field.alpha_pow((self.l + i) as i64))
    }

    pub fn check_word(&self, w: &[Elem]) -> Result<(), CodeError> {
        if w.len() != self.n {
            return Err(CodeError::LengthMismatch { expected: self.n, got: w.len() });
        }
        if let Some(&bad) = w.iter().find(|&&c| !self.field.contains(c)) {
            return Err(CodeError::NotInField(bad));
        }
        Ok(())
    }

    /// Systematic: c = x^{d-1}u - (x^{d-1}u mod g); the message sits in the top k
    /// coefficients.
    pub fn encode(&self, msg: &[Elem]) -> Result<Word, CodeError> {
        if msg.len() != self.k {
            return Err(CodeError::LengthMismatch { expected: self.k, got: msg.len() });
        }
        let shifted = poly::shift(msg, self.d - 1);
        let r = poly::rem(&self.field, &shifted, &self.g).expect("generator is monic");
        let mut c = shifted;
        for (ck, rk) in c.iter_mut().zip(&r) {
            *ck ^= rk;
        }
        Ok(c)
    }

    pub fn is_codeword(&self, w: &[Elem]) -> bool {
        self.roots().all(|x| poly::eval(&self.field, w, x) == 0)
    }

    pub fn random_message<R: Rng>(&self, rng: &mut R) -> Vec<Elem> {
        let q = self.field.q() as u32;
        (0..self.k).map(|_| rng.random_range(0..q) as Elem).collect()
    }

    /// Distinct uniform positions, uniform nonzero values.
    pub fn random_errors<R: Rng>(&self, weight: usize, rng: &mut R) -> Result<ErrorPattern, CodeError> {
        if weight > self.n {
            return Err(CodeError::InvalidParameters(format!("weight {weight} > n={}", self.n)));
        }
        let mut positions = sample(rng, self.n, weight).into_vec();
        positions.sort_unstable();
        let q = self.field.q() as u32;
        let values = positions.iter().map(|_| rng.random_range(1..q) as Elem).collect();
        ErrorPattern::new(positions, values, self.n)
    }

    pub fn random_errors_seeded(&self, weight: usize, seed: u64) -> Result<ErrorPattern, CodeError> {
        self.random_errors(weight, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ErrorPattern {
    pub positions: Vec<usize>,
    pub values: Vec<Elem>,
}

impl ErrorPattern {
    pub fn new(positions: Vec<usize>, values: Vec<Elem>, n: usize) -> Result<Self, CodeError> {
        if positions.len() != values.len() {
            return Err(CodeError::InvalidParameters("positions/values length differ".into()));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CodeError::InvalidParameters("positions must be strictly increasing".into()));
        }
        if positions.last().is_some_and(|&p| p >= n) {
            return Err(CodeError::InvalidParameters("position out of range".into()));
        }
        if values.contains(&0) {
            return Err(CodeError::InvalidParameters("error values must be nonzero".into()));
        }
        Ok(ErrorPattern { positions, values })
    }

    pub fn weight(&self) -> usize {
        self.positions.len()
    }

    /// The pattern as a length-n word.
    pub fn to_word(&self, n: usize) -> Word {
        let mut w = vec![0; n];
        for (&p, &v) in self.positions.iter().zip(&self.values) {
            w[p] = v;
        }
        w
    }
}

pub fn apply_errors(w: &[Elem], pat: &ErrorPattern) -> Word {
    let mut out = w.to_vec();
    for (&p, &v) in pat.positions.iter().zip(&pat.values) {
        out[p] ^= v;
    }
    out
}

pub fn hamming_weight(w: &[Elem]) -> usize {
    w.iter().filter(|&&c| c != 0).count()
}

pub fn hamming_distance(u: &[Elem], v: &[Elem]) -> Result<usize, CodeError> {
    if u.len() != v.len() {
        return Err(CodeError::LengthMismatch { expected: u.len(), got: v.len() });
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

/// One word per line: n hex symbols separated by spaces, x^0 first.
pub fn format_word(w: &[Elem]) -> String {
    w.iter().map(|c| format!("{c:x}")).collect::<Vec<_>>().join(" ")
}

pub fn parse_word(line: &str) -> Result<Word, std::num::ParseIntError> {
    line.split_whitespace().map(|s| Elem::from_str_radix(s.trim_start_matches("0x"), 16)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16() -> Arc<Field> {
        Arc::new(Field::new(4, 0x13).unwrap())
    }

    #[test]
    fn generator_has_the_right_roots() {
        let f = gf16();
        let c = Code::narrow_sense(f.clone(), 9).unwrap();
        assert_eq!(poly::deg(&c.g), Some(8));
        assert_eq!(c.g[8], 1);
        for i in 1..=8 {
            assert_eq!(poly::eval(&f, &c.g, f.alpha_pow(i)), 0);
        }
        // exactly those roots
        let zeros = (0..15).filter(|&i| poly::eval(&f, &c.g, f.alpha_pow(i)) == 0).count();
        assert_eq!(zeros, 8);
        let c2 = Code::narrow_sense(f.clone(), 2).unwrap();
        assert_eq!(c2.g, vec![f.alpha_pow(1), 1]);
        assert!(Code::narrow_sense(f.clone(), 1).is_err());
        assert!(Code::narrow_sense(f, 16).is_err());
    }

    #[test]
    fn generator_divides_x_n_minus_one() {
        let f = gf16();
        let c = Code::narrow_sense(f.clone(), 7).unwrap();
        let mut xn1 = vec![0; 16];
        xn1[0] = 1;
        xn1[15] = 1;
        assert!(poly::rem(&f, &xn1, &c.g).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn encode_membership_linearity() {
        let f = gf16();
        let c = Code::narrow_sense(f.clone(), 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m1 = c.random_message(&mut rng);
            let m2 = c.random_message(&mut rng);
            let c1 = c.encode(&m1).unwrap();
            assert!(c.is_codeword(&c1));
            assert_eq!(&c1[c.d - 1..], &m1[..]);
            let sum: Vec<Elem> = m1.iter().zip(&m2).map(|(a, b)| a ^ b).collect();
            let lhs = c.encode(&sum).unwrap();
            let rhs: Vec<Elem> = c1.iter().zip(c.encode(&m2).unwrap()).map(|(a, b)| a ^ b).collect();
            assert_eq!(lhs, rhs);
        }
        assert_eq!(c.encode(&vec![0; c.k]).unwrap(), vec![0; 15]);
        assert!(c.encode(&[1]).is_err());
    }

    #[test]
    fn encoding_g_padded_gives_multiple_of_g() {
        let f = gf16();
        let c = Code::narrow_sense(f.clone(), 5).unwrap();
        let mut m = c.g.clone();
        m.resize(c.k, 0);
        let cw = c.encode(&m).unwrap();
        assert!(poly::rem(&f, &cw, &c.g).unwrap().iter().all(|&x| x == 0));
    }

    #[test]
    fn three_error_word() {
        let f = gf16();
        let c = Code::narrow_sense(f.clone(), 9).unwrap();
        let a = |k| f.alpha_pow(k);
        let pat = ErrorPattern::new(vec![2, 8, 13], vec![a(2), a(1), a(7)], 15).unwrap();
        let r = apply_errors(&vec![0; 15], &pat);
        let mut want = vec![0; 15];
        want[2] = a(2);
        want[8] = a(1);
        want[13] = a(7);
        assert_eq!(r, want);
        assert!(!c.is_codeword(&r));
        assert_eq!(hamming_weight(&r), 3);
        assert_eq!(apply_errors(&r, &ErrorPattern::default()), r);
        // α⁶+α³x+α⁴x²+x⁷
        let mut e = vec![0; 15];
        e[0] = a(6);
        e[1] = a(3);
        e[2] = a(4);
        e[7] = 1;
        assert_eq!(hamming_weight(&e), 4);
        assert_eq!(hamming_distance(&e, &e).unwrap(), 0);
    }

    #[test]
    fn pattern_validation_and_reproducibility() {
        assert!(ErrorPattern::new(vec![3, 3], vec![1, 1], 15).is_err());
        assert!(ErrorPattern::new(vec![3], vec![0], 15).is_err());
        assert!(ErrorPattern::new(vec![15], vec![1], 15).is_err());
        let c = Code::narrow_sense(gf16(), 9).unwrap();
        let p1 = c.random_errors_seeded(4, 99).unwrap();
        assert_eq!(p1, c.random_errors_seeded(4, 99).unwrap());
        assert_eq!(p1.weight(), 4);
        let w = apply_errors(&vec![0; 15], &p1);
        assert_eq!(hamming_weight(&w), 4);
    }

    #[test]
    fn rs75_minimum_distance_exhaustive() {
        let f = Arc::new(Field::new(3, 0xB).unwrap());
        let c = Code::narrow_sense(f, 5).unwrap();
        assert_eq!(c.k, 3);
        let words: Vec<Word> = (0..512u32)
            .map(|i| c.encode(&[(i & 7) as Elem, (i >> 3 & 7) as Elem, (i >> 6) as Elem]).unwrap())
            .collect();
        let mut min = usize::MAX;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                min = min.min(hamming_distance(&words[i], &words[j]).unwrap());
            }
        }
        assert_eq!(min, 5);
    }

    #[test]
    fn word_io_roundtrip() {
        let w = vec![0, 0xa, 0xff, 1];
        assert_eq!(parse_word(&format_word(&w)).unwrap(), w);
    }
}
