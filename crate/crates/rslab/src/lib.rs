//! Reed-Solomon decoding lab over GF(2^m): classic and fast PGZ, BM (plain
//! and inversionless), the parallel pPGZ / pBM simulations, four error-value
//! formulas, optional malfunction gates, and operation accounting.

pub mod arith;
pub mod bm;
pub mod gf;
pub mod harness;
pub mod keyeq;
pub mod linalg;
pub mod parallel;
pub mod pgz;
pub mod poly;
pub mod rscode;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use arith::OpCounts;
use keyeq::DecodeOutcome;
use parallel::CostLedger;
use rscode::{Code, CodeError};

pub use gf::{Elem, Field};

/// How error values are obtained once the positions are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum ValueFormula {
    /// Björck–Pereyra solve of the transposed Vandermonde system
    Bp,
    Forney,
    /// from the BM auxiliary polynomial τ
    Tau,
    /// from an earlier nonsingular state (fPGZ) or the last length change (BM)
    Horiguchi,
    /// the parallel decoders' own closed forms
    Native,
}

impl ValueFormula {
    pub const ALL: [ValueFormula; 5] =
        [ValueFormula::Bp, ValueFormula::Forney, ValueFormula::Tau, ValueFormula::Horiguchi, ValueFormula::Native];

    pub fn name(self) -> &'static str {
        match self {
            ValueFormula::Bp => "bp",
            ValueFormula::Forney => "forney",
            ValueFormula::Tau => "tau",
            ValueFormula::Horiguchi => "horiguchi",
            ValueFormula::Native => "native",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Pgz,
    Fpgz,
    Bm,
    BmInv,
    Ppgz,
    Pbm,
    PbmInv,
}

impl Algo {
    pub const ALL: [Algo; 7] = [Algo::Pgz, Algo::Fpgz, Algo::Bm, Algo::BmInv, Algo::Ppgz, Algo::Pbm, Algo::PbmInv];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Pgz => "pgz",
            Algo::Fpgz => "fpgz",
            Algo::Bm => "bm",
            Algo::BmInv => "bm-inv",
            Algo::Ppgz => "ppgz",
            Algo::Pbm => "pbm",
            Algo::PbmInv => "pbm-inv",
        }
    }

    /// Value formulas each decoder can use; the first is its default.
    pub fn formulas(self) -> &'static [ValueFormula] {
        use ValueFormula::*;
        match self {
            Algo::Pgz => &[Bp, Forney],
            Algo::Fpgz => &[Bp, Forney, Horiguchi],
            Algo::Bm => &[Forney, Tau, Horiguchi],
            Algo::BmInv => &[Tau, Forney],
            Algo::Ppgz | Algo::Pbm | Algo::PbmInv => &[Native],
        }
    }

    pub fn default_formula(self) -> ValueFormula {
        self.formulas()[0]
    }

    /// The inversionless twin, if any.
    pub fn inversionless(self) -> Option<Algo> {
        match self {
            Algo::Bm | Algo::BmInv => Some(Algo::BmInv),
            Algo::Pbm | Algo::PbmInv => Some(Algo::PbmInv),
            _ => None,
        }
    }

    pub fn is_parallel(self) -> bool {
        matches!(self, Algo::Ppgz | Algo::Pbm | Algo::PbmInv)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for ValueFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Algo::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown decoder {s:?}"))
    }
}

impl FromStr for ValueFormula {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ValueFormula::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| format!("unknown value formula {s:?}"))
    }
}

/// One decoder configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub struct Decoder {
    pub algo: Algo,
    pub formula: ValueFormula,
}

impl Decoder {
    pub fn new(algo: Algo, formula: ValueFormula) -> Result<Self, DecodeError> {
        if !algo.formulas().contains(&formula) {
            return Err(DecodeError::FormulaNotApplicable { algo, formula });
        }
        Ok(Decoder { algo, formula })
    }

    /// Every decoder with every formula it supports.
    pub fn all() -> Vec<Decoder> {
        Algo::ALL.iter().flat_map(|&algo| algo.formulas().iter().map(move |&formula| Decoder { algo, formula })).collect()
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.algo, self.formula)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("value formula {formula} does not apply to {algo}")]
    FormulaNotApplicable { algo: Algo, formula: ValueFormula },
    #[error("t = {0} is beyond the minor lattice limit")]
    TooLarge(usize),
    #[error(transparent)]
    Word(#[from] CodeError),
}

/// Outcome plus whatever accounting the decoder keeps.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub outcome: DecodeOutcome,
    /// Sequential locator-step operation counts (PGZ family and BM).
    pub ops: Option<OpCounts>,
    /// Parallel ledger (pPGZ, pBM).
    pub ledger: Option<CostLedger>,
    /// Error count the locator settled on, when it got that far.
    pub e: Option<usize>,
}

pub fn decode(code: &Code, r: &[Elem], dec: Decoder, gates: bool) -> Result<Decoded, DecodeError> {
    code.check_word(r)?;
    let dec = Decoder::new(dec.algo, dec.formula)?;
    let plain = |outcome| Decoded { outcome, ops: None, ledger: None, e: None };
    Ok(match dec.algo {
        Algo::Pgz => plain(pgz::pgz_decode(code, r, gates, dec.formula)),
        Algo::Fpgz => {
            let (outcome, loc) = pgz::fpgz_decode_traced(code, r, gates, dec.formula);
            match loc {
                pgz::FpgzLocate::Located { trace, base_ops, iter_ops } => {
                    let mut ops = base_ops;
                    ops.merge(&iter_ops);
                    Decoded { outcome, ops: Some(ops), ledger: None, e: Some(trace.e()) }
                }
                _ => plain(outcome),
            }
        }
        Algo::Bm | Algo::BmInv => {
            let out = bm::bm_decode_traced(code, r, gates, dec.formula, dec.algo == Algo::BmInv, false);
            let e = out.trace.as_ref().map(|t| t.final_len());
            Decoded { outcome: out.outcome, ops: e.map(|_| out.ops), ledger: None, e }
        }
        Algo::Ppgz => {
            if code.t > parallel::PPGZ_MAX_T {
                return Err(DecodeError::TooLarge(code.t));
            }
            let p = parallel::ppgz_decode(code, r, gates);
            Decoded { outcome: p.outcome, ops: None, ledger: Some(p.ledger), e: Some(p.e) }
        }
        Algo::Pbm | Algo::PbmInv => {
            let p = parallel::pbm_decode(code, r, gates, dec.algo == Algo::PbmInv);
            Decoded { outcome: p.outcome, ops: None, ledger: Some(p.ledger), e: Some(p.e) }
        }
    })
}
