//! Exact arithmetic in GF(2^m), 2 <= m <= 16.
//!
//! Elements are polynomial-basis bitmasks; the log/antilog tables are only an
//! acceleration. Construction checks that `x` has multiplicative order `2^m - 1`
//! modulo the given polynomial, which proves it irreducible *and* primitive.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A field element in polynomial-basis coordinates (bit k <-> coefficient of x^k).
pub type Elem = u16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("extension degree {0} outside 2..=16")]
    InvalidDegree(u32),
    #[error("modulus {modulus:#x} does not have degree {m}")]
    BadModulus { m: u32, modulus: u32 },
    #[error("modulus {0:#x} is not primitive (x does not generate the multiplicative group)")]
    NotPrimitive(u32),
    #[error("division by zero")]
    DivisionByZero,
}

/// Default primitive polynomials, indexed by m.
const DEFAULT_MODULI: [u32; 17] = [
    0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

#[derive(Clone)]
pub struct Field {
    m: u32,
    modulus: u32,
    q: usize,
    // exp is stored twice over so that log a + log b never needs a reduction
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.m, self.modulus)
    }
}

/// Serialized field descriptor.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub m: u32,
    pub modulus_hex: String,
}

impl Field {
    pub fn new(m: u32, modulus: u32) -> Result<Self, GfError> {
        if !(2..=16).contains(&m) {
            return Err(GfError::InvalidDegree(m));
        }
        if modulus >> m != 1 {
            return Err(GfError::BadModulus { m, modulus });
        }
        let q = 1usize << m;
        let order = q - 1;
        let mut exp = vec![0 as Elem; 2 * order];
        let mut log = vec![0u32; q];
        let mut seen = vec![false; q];
        let mut x: u32 = 1;
        for k in 0..order {
            if seen[x as usize] {
                // x^k repeated before reaching order q-1
                return Err(GfError::NotPrimitive(modulus));
            }
            seen[x as usize] = true;
            exp[k] = x as Elem;
            exp[k + order] = x as Elem;
            log[x as usize] = k as u32;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= modulus;
            }
        }
        if x != 1 {
            return Err(GfError::NotPrimitive(modulus));
        }
        Ok(Field { m, modulus, q, exp, log })
    }

    /// Field with the built-in primitive polynomial for `m` (0x13 for GF(16)).
    pub fn with_default_modulus(m: u32) -> Result<Self, GfError> {
        if !(2..=16).contains(&m) {
            return Err(GfError::InvalidDegree(m));
        }
        Field::new(m, DEFAULT_MODULI[m as usize])
    }

    pub fn default_modulus(m: u32) -> Option<u32> {
        DEFAULT_MODULI.get(m as usize).copied().filter(|&p| p != 0)
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn modulus(&self) -> u32 {
        self.modulus
    }
    /// Field size 2^m.
    pub fn q(&self) -> usize {
        self.q
    }
    /// Multiplicative group order q - 1 (also the RS code length n).
    pub fn order(&self) -> usize {
        self.q - 1
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor { m: self.m, modulus_hex: format!("{:#x}", self.modulus) }
    }

    pub fn contains(&self, a: Elem) -> bool {
        (a as usize) < self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        let l = self.log[a as usize] as usize;
        Ok(self.exp[(self.order() - l) % self.order()])
    }

    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        if b == 0 {
            return Err(GfError::DivisionByZero);
        }
        if a == 0 {
            return Ok(0);
        }
        let o = self.order();
        Ok(self.exp[self.log[a as usize] as usize + o - self.log[b as usize] as usize])
    }

    /// a^k, with pow(0, 0) = 1.
    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let o = self.order() as u64;
        let e = (self.log[a as usize] as u64 * (k % o)) % o;
        self.exp[e as usize]
    }

    /// α^k for any integer k.
    pub fn alpha_pow(&self, k: i64) -> Elem {
        let o = self.order() as i64;
        self.exp[k.rem_euclid(o) as usize]
    }

    /// Discrete log base α; None for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// `0`, `1`, or `a^k`.
    pub fn fmt_elem(&self, a: Elem) -> String {
        match self.log(a) {
            None => "0".into(),
            Some(0) => "1".into(),
            Some(k) => format!("a^{k}"),
        }
    }

    pub fn fmt_hex(a: Elem) -> String {
        format!("{a:x}")
    }
}
