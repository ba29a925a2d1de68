//! Field operations behind a trait so the same decoder code can run plain or
//! instrumented. Only the locator and value steps go through this; syndromes
//! and Chien search use the field directly and are never counted.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::gf::{Elem, Field, GfError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub mul: u64,
    pub add: u64,
    pub inv: u64,
    pub div: u64,
}

impl OpCounts {
    pub fn merge(&mut self, o: &OpCounts) {
        self.mul += o.mul;
        self.add += o.add;
        self.inv += o.inv;
        self.div += o.div;
    }
}

pub trait Arith {
    fn field(&self) -> &Field;
    fn add(&self, a: Elem, b: Elem) -> Elem;
    fn mul(&self, a: Elem, b: Elem) -> Elem;
    fn inv(&self, a: Elem) -> Result<Elem, GfError>;
    fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError>;

    /// Σ a_k b_k + tail, charging one multiplication per product and one
    /// addition per join.
    fn dot_plus(&self, a: &[Elem], b: &[Elem], tail: Option<Elem>) -> Elem {
        debug_assert_eq!(a.len(), b.len());
        let mut acc: Option<Elem> = tail;
        for (&x, &y) in a.iter().zip(b) {
            let p = self.mul(x, y);
            acc = Some(match acc {
                None => p,
                Some(s) => self.add(s, p),
            });
        }
        acc.unwrap_or(0)
    }
}

impl Arith for Field {
    fn field(&self) -> &Field {
        self
    }
    #[inline]
    fn add(&self, a: Elem, b: Elem) -> Elem {
        Field::add(self, a, b)
    }
    #[inline]
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        Field::mul(self, a, b)
    }
    #[inline]
    fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        Field::inv(self, a)
    }
    #[inline]
    fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Field::div(self, a, b)
    }
}

/// Counts every operation routed through it.
pub struct Counting<'a> {
    f: &'a Field,
    c: Cell<OpCounts>,
}

impl<'a> Counting<'a> {
    pub fn new(f: &'a Field) -> Self {
        Counting { f, c: Cell::new(OpCounts::default()) }
    }
    pub fn counts(&self) -> OpCounts {
        self.c.get()
    }
    pub fn reset(&self) {
        self.c.set(OpCounts::default());
    }
    fn bump(&self, k: impl FnOnce(&mut OpCounts)) {
        let mut c = self.c.get();
        k(&mut c);
        self.c.set(c);
    }
}

impl Arith for Counting<'_> {
    fn field(&self) -> &Field {
        self.f
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.bump(|c| c.add += 1);
        self.f.add(a, b)
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.bump(|c| c.mul += 1);
        self.f.mul(a, b)
    }
    fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        self.bump(|c| c.inv += 1);
        self.f.inv(a)
    }
    fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        self.bump(|c| c.div += 1);
        self.f.div(a, b)
    }
}
