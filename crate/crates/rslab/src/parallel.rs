//! Step-accurate simulations of the two parallel decoders: pPGZ, which grows
//! the minors of the syndrome matrix level by level with Laplace expansion,
//! and pBM, the systolic Δ̂/Θ̂ array. Each "parallel step" is one atomic
//! transaction over every cell; the ledger counts those steps and the
//! circuit elements they need.
//!
//! With the `parallel` feature a level's minors are computed with rayon; the
//! result is identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::OpCounts;
use crate::bm::gate_locator;
use crate::gf::{Elem, Field};
use crate::keyeq::{compute_syndromes, finish, DecodeOutcome, FailureReason, Syndromes};
use crate::pgz::locator_gates;
use crate::poly::{self, Poly};
use crate::rscode::Code;

/// Largest t the minor lattice is built for; the table at level ⌊t/2⌋ has
/// C(t+1, ⌊t/2⌋) entries.
pub const PPGZ_MAX_T: usize = 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepCounts {
    pub mul: u64,
    pub add: u64,
    pub inv: u64,
    pub div: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Space {
    pub multipliers: u64,
    pub adders: u64,
    pub dividers: u64,
    pub cells: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CostLedger {
    /// Plain operation totals, as a sequential machine would count them.
    pub ops: OpCounts,
    /// Parallel time of the locator phase. For pPGZ this is level
    /// construction (levels 2..=e); the all-zero check level is `check_steps`.
    pub steps: StepCounts,
    pub check_steps: StepCounts,
    /// Parallel time of the value phase.
    pub value_steps: StepCounts,
    /// Provisioned circuit elements for the locator phase.
    pub space: Space,
    /// Provisioned elements for the value phase.
    pub value_space: Space,
    /// pPGZ: largest i·C(t, i) over the levels actually built.
    pub in_use_peak: u64,
    /// pPGZ: minors touching column t+1 (needed for σ̂ when e = t), outside
    /// the provisioned lattice.
    pub aux_minors: u64,
    /// pBM: σ or τ needed more than the t+1 locator cells at some step.
    pub overflow: bool,
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

pub fn ceil_log2(i: usize) -> u64 {
    if i <= 1 {
        0
    } else {
        (usize::BITS - (i - 1).leading_zeros()) as u64
    }
}

/// t·C(t, ⌊t/2⌋): multipliers (and adders) needed by the minor lattice.
pub fn ppgz_circuit_bound(t: usize) -> u64 {
    t as u64 * binomial(t, t / 2)
}

// ---------------------------------------------------------------- pPGZ

/// Column tuples are bitmasks: bit j-1 set <=> column j in the tuple.
pub type Tuple = u64;

pub fn tuple(cols: &[usize]) -> Tuple {
    cols.iter().fold(0, |m, &c| m | 1 << (c - 1))
}

/// All i-subsets of {1..=width} in increasing mask order.
fn subsets(width: usize, i: usize) -> Vec<Tuple> {
    if i == 0 {
        return vec![0];
    }
    if i > width {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(width, i) as usize);
    let mut m: Tuple = (1 << i) - 1;
    let limit: Tuple = 1 << width;
    while m < limit {
        out.push(m);
        // Gosper's hack: next mask with the same popcount
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

#[derive(Debug, Clone)]
pub struct MinorTable {
    pub level: usize,
    /// Columns 1..=t+1 are in play.
    pub width: usize,
    /// The tuples at this level, in increasing mask order.
    pub tuples: Vec<Tuple>,
    /// Dense by mask; only entries in `tuples` are meaningful.
    vals: Vec<Elem>,
}

impl MinorTable {
    /// Level 0: the empty minor is 1.
    pub fn level0(t: usize) -> Self {
        let mut vals = vec![0; 1 << (t + 1)];
        vals[0] = 1;
        MinorTable { level: 0, width: t + 1, tuples: vec![0], vals }
    }

    /// Level 1: D^{(1)}_{(j)} = S_j.
    pub fn level1(s: &Syndromes, t: usize) -> Self {
        let mut vals = vec![0; 1 << (t + 1)];
        let tuples: Vec<Tuple> = (1..=t + 1).map(|j| tuple(&[j])).collect();
        for j in 1..=t + 1 {
            vals[tuple(&[j]) as usize] = s.get(j);
        }
        MinorTable { level: 1, width: t + 1, tuples, vals }
    }

    pub fn get(&self, j: Tuple) -> Elem {
        self.vals[j as usize]
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Tuple, Elem)> + '_ {
        self.tuples.iter().map(|&j| (j, self.vals[j as usize]))
    }

    /// D^{(i)}_{(1..i)}
    pub fn leading(&self) -> Elem {
        self.get((1 << self.level) - 1)
    }

    /// Every minor with all columns <= t is zero.
    pub fn core_all_zero(&self) -> bool {
        let core = (1u64 << (self.width - 1)) - 1;
        self.iter().all(|(j, v)| j & !core != 0 || v == 0)
    }

    /// D^{(i)}_{(1..k, k+2..i+1)}, the tuple skipping column k+1.
    pub fn skip(&self, k: usize) -> Elem {
        let full: Tuple = (1 << (self.level + 1)) - 1;
        self.get(full & !(1 << k))
    }
}

/// Laplace expansion along the last row:
/// D^{(i)}_j = Σ_l S_{j_l+i-1} D^{(i-1)}_{j \ j_l}
pub fn ppgz_level_step(f: &Field, prev: &MinorTable, s: &Syndromes) -> MinorTable {
    let i = prev.level + 1;
    let tuples = subsets(prev.width, i);
    let one = |&j: &Tuple| -> Elem {
        let mut acc = 0;
        let mut rest = j;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= f.mul(s.get(b + 1 + i - 1), prev.get(j & !(1 << b)));
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let computed: Vec<Elem> = tuples.par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    let computed: Vec<Elem> = tuples.iter().map(one).collect();
    let mut vals = vec![0; prev.vals.len()];
    for (&j, v) in tuples.iter().zip(computed) {
        vals[j as usize] = v;
    }
    MinorTable { level: i, width: prev.width, tuples, vals }
}

#[derive(Debug, Clone)]
pub enum PpgzLocate {
    NoError,
    Failure(FailureReason),
    /// σ̂, ω̂ and the leading minor D^{(e)}_{(1..e)}
    Located { e: usize, sigma: Poly, omega: Poly, lead: Elem },
}

/// Charge one level: one mult-step and an adder tree of depth ⌈log₂ i⌉.
fn charge_level(steps: &mut StepCounts, ledger: &mut CostLedger, t: usize, table: &MinorTable) {
    let i = table.level as u64;
    steps.mul += 1;
    steps.add += ceil_log2(table.level);
    let core = binomial(t, table.level);
    let total = table.len() as u64;
    ledger.ops.mul += total * i;
    ledger.ops.add += total * (i - 1);
    ledger.aux_minors += total - core;
    ledger.in_use_peak = ledger.in_use_peak.max(core * i);
}

pub fn ppgz_locate(f: &Field, s: &Syndromes, t: usize, ledger: &mut CostLedger) -> PpgzLocate {
    assert!(t <= PPGZ_MAX_T, "minor lattice too large for t = {t}");
    if s.is_zero() {
        return PpgzLocate::NoError;
    }
    ledger.space.multipliers = ppgz_circuit_bound(t);
    ledger.space.adders = ppgz_circuit_bound(t);
    ledger.space.cells = (0..=t).map(|i| binomial(t, i)).max().unwrap_or(1);
    let mut levels = vec![MinorTable::level0(t)];
    // level 1 is initialisation: D^{(1)}_{(j)} = S_j
    let l1 = MinorTable::level1(s, t);
    if t == 0 || l1.core_all_zero() {
        return PpgzLocate::Failure(FailureReason::TooManyErrors);
    }
    ledger.in_use_peak = t as u64;
    levels.push(l1);
    let mut e = t;
    for i in 2..=t {
        let next = ppgz_level_step(f, levels.last().expect("non-empty"), s);
        if next.core_all_zero() {
            let mut check = StepCounts::default();
            charge_level(&mut check, ledger, t, &next);
            ledger.check_steps = check;
            if levels.last().expect("non-empty").leading() == 0 {
                return PpgzLocate::Failure(FailureReason::RankMismatch);
            }
            e = i - 1;
            break;
        }
        let mut steps = ledger.steps;
        charge_level(&mut steps, ledger, t, &next);
        ledger.steps = steps;
        levels.push(next);
        // keep only what σ̂ and ω̂ can still need
        if levels.len() > 3 {
            levels.remove(0);
        }
    }
    let top = levels.iter().find(|l| l.level == e).expect("level e kept");
    let below = levels.iter().find(|l| l.level == e - 1).expect("level e-1 kept");
    // σ̂_{e-j} = D^{(e)}_{(1..j, j+2..e+1)}; ω̂_{e-1-j} = D^{(e-1)}_{(1..j, j+2..e)}
    let mut sigma = vec![0; e + 1];
    for j in 0..=e {
        sigma[e - j] = top.skip(j);
    }
    let mut omega = vec![0; e];
    for j in 0..e {
        omega[e - 1 - j] = below.skip(j);
    }
    PpgzLocate::Located { e, sigma: poly::trim(sigma), omega: poly::trim(omega), lead: top.leading() }
}

/// E_i = (D^{(e)}_{(1..e)})² (X_i^{-1})^{2(e-1)} / (σ̂'(X_i^{-1}) ω̂(X_i^{-1}))
pub fn ppgz_values(f: &Field, e: usize, sigma: &[Elem], omega: &[Elem], lead: Elem, inverse_roots: &[Elem]) -> Result<Vec<Elem>, crate::gf::GfError> {
    let ds = poly::derivative(sigma);
    let l2 = f.mul(lead, lead);
    inverse_roots
        .iter()
        .map(|&xi| f.div(f.mul(l2, f.pow(xi, 2 * (e as u64 - 1))), f.mul(poly::eval(f, &ds, xi), poly::eval(f, omega, xi))))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ParallelDecode {
    pub outcome: DecodeOutcome,
    pub ledger: CostLedger,
    /// Number of errors the locator settled on (0 when it never got there).
    pub e: usize,
}

pub fn ppgz_decode(code: &Code, r: &[Elem], gates: bool) -> ParallelDecode {
    let f = code.field();
    let s = compute_syndromes(code, r);
    let mut ledger = CostLedger::default();
    let loc = ppgz_locate(f, &s, code.t, &mut ledger);
    let (outcome, e) = match loc {
        PpgzLocate::NoError => (DecodeOutcome::NoError, 0),
        PpgzLocate::Failure(reason) => (DecodeOutcome::fail(reason), 0),
        PpgzLocate::Located { e, sigma, omega, lead } => {
            let out = match locator_gates(code, &s, &sigma, gates) {
                Err(reason) => DecodeOutcome::fail(reason),
                Ok(chien) => {
                    let k = chien.inverse_roots.len() as u64;
                    ledger.value_steps = StepCounts { mul: 1, div: 1, ..Default::default() };
                    ledger.value_space = Space { multipliers: 2 * code.t as u64, dividers: code.t as u64, ..Default::default() };
                    ledger.ops.mul += 1 + k;
                    ledger.ops.div += k;
                    match ppgz_values(f, e, &sigma, &omega, lead, &chien.inverse_roots) {
                        Ok(v) => finish(code, r, &chien, v, gates),
                        Err(_) => DecodeOutcome::fail(FailureReason::ZeroErrorValue),
                    }
                }
            };
            (out, e)
        }
    };
    ParallelDecode { outcome, ledger, e }
}

// ---------------------------------------------------------------- pBM

/// The systolic array. Cells c_0..c_{d-2} hold (Δ̂_j, Θ̂_j); the locator cells
/// hold (σ_j, τ_j). The hardware has t+1 locator cells; the simulation keeps
/// d so that words beyond the decoding radius still run exactly like the
/// sequential algorithm, and flags when the extra room was used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystolicArray {
    pub delta: Vec<Elem>,
    pub theta: Vec<Elem>,
    pub sigma: Vec<Elem>,
    pub tau: Vec<Elem>,
    /// D(i)
    pub len: usize,
    /// steps taken so far
    pub i: usize,
    pub beta: Elem,
    pub inversionless: bool,
    t: usize,
}

impl SystolicArray {
    pub fn new(s: &Syndromes, t: usize, inversionless: bool) -> Self {
        let dm1 = s.len();
        let mut sigma = vec![0; dm1 + 1];
        sigma[0] = 1;
        SystolicArray {
            delta: s.as_slice().to_vec(),
            theta: s.as_slice().to_vec(),
            sigma: sigma.clone(),
            tau: sigma,
            len: 0,
            i: 0,
            beta: 1,
            inversionless,
            t,
        }
    }

    /// Cells in the hardware array: d-1 discrepancy cells + t+1 locator cells.
    pub fn cells(&self) -> usize {
        self.delta.len() + self.t + 1
    }

    pub fn locator(&self) -> Poly {
        poly::trim(self.sigma.clone())
    }

    fn overflowing(&self) -> bool {
        self.sigma[self.t + 1..].iter().chain(&self.tau[self.t + 1..]).any(|&x| x != 0)
    }
}

/// One simultaneous update of every cell.
pub fn pbm_step(f: &Field, a: &mut SystolicArray, ledger: &mut CostLedger) {
    let d0 = a.delta[0];
    let beta = if a.inversionless { a.beta } else { 1 };
    let nd = a.delta.len();
    let shifted: Vec<Elem> = (0..nd).map(|j| if j + 1 < nd { a.delta[j + 1] } else { 0 }).collect();
    let mut ops = OpCounts::default();
    let new_delta: Vec<Elem> = (0..nd)
        .map(|j| {
            let lhs = if a.inversionless { f.mul(beta, shifted[j]) } else { shifted[j] };
            f.add(lhs, f.mul(d0, a.theta[j]))
        })
        .collect();
    let nl = a.sigma.len();
    let new_sigma: Vec<Elem> = (0..nl)
        .map(|j| {
            let lhs = if a.inversionless { f.mul(beta, a.sigma[j]) } else { a.sigma[j] };
            let prev_tau = if j > 0 { a.tau[j - 1] } else { 0 };
            f.add(lhs, f.mul(d0, prev_tau))
        })
        .collect();
    let per_cell = if a.inversionless { 2 } else { 1 };
    ops.mul += per_cell * (nd + nl) as u64;
    ops.add += (nd + nl) as u64;
    let branch = d0 != 0 && 2 * a.len < a.i + 1;
    if branch {
        if a.inversionless {
            a.tau = a.sigma.clone();
            a.theta = shifted;
            a.beta = d0;
        } else {
            let inv = f.inv(d0).expect("nonzero discrepancy");
            ops.inv += 1;
            ops.mul += (nd + nl) as u64;
            a.tau = a.sigma.iter().map(|&x| f.mul(x, inv)).collect();
            a.theta = shifted.iter().map(|&x| f.mul(x, inv)).collect();
        }
        a.len = a.i + 1 - a.len;
    } else {
        a.tau.rotate_right(1);
        a.tau[0] = 0;
    }
    a.delta = new_delta;
    a.sigma = new_sigma;
    a.i += 1;
    ledger.steps.mul += 1;
    ledger.steps.add += 1;
    if branch && !a.inversionless {
        ledger.steps.inv += 1;
    }
    ledger.ops.merge(&ops);
    ledger.overflow |= a.overflowing();
}

/// Runs the d-1 steps and returns the final array.
pub fn pbm_run(f: &Field, s: &Syndromes, t: usize, inversionless: bool, ledger: &mut CostLedger) -> SystolicArray {
    let mut a = SystolicArray::new(s, t, inversionless);
    let cells = a.cells() as u64;
    ledger.space = Space { multipliers: 2 * cells, adders: cells, dividers: 0, cells };
    for _ in 0..s.len() {
        pbm_step(f, &mut a, ledger);
    }
    a
}

/// E_i = Δ̂^{(d-1)}(X_i^{-1}) (X_i^{-1})^{d-1} / σ'(X_i^{-1}); the scaling of the
/// inversionless run cancels.
pub fn pbm_values(f: &Field, a: &SystolicArray, inverse_roots: &[Elem]) -> Result<Vec<Elem>, crate::gf::GfError> {
    let ds = poly::derivative(&a.sigma);
    let dm1 = a.delta.len() as u64;
    inverse_roots
        .iter()
        .map(|&xi| f.div(f.mul(poly::eval(f, &a.delta, xi), f.pow(xi, dm1)), poly::eval(f, &ds, xi)))
        .collect()
}

pub fn pbm_decode(code: &Code, r: &[Elem], gates: bool, inversionless: bool) -> ParallelDecode {
    let f = code.field();
    let s = compute_syndromes(code, r);
    let mut ledger = CostLedger::default();
    if s.is_zero() {
        return ParallelDecode { outcome: DecodeOutcome::NoError, ledger, e: 0 };
    }
    let a = pbm_run(f, &s, code.t, inversionless, &mut ledger);
    let sigma = a.locator();
    let outcome = match gate_locator(code, &sigma, a.len, gates) {
        Err(reason) => DecodeOutcome::fail(reason),
        Ok(chien) => {
            let k = chien.inverse_roots.len() as u64;
            ledger.value_steps = StepCounts { div: 1, ..Default::default() };
            ledger.value_space = Space { dividers: code.t as u64, ..Default::default() };
            ledger.ops.div += k;
            match pbm_values(f, &a, &chien.inverse_roots) {
                Ok(v) => finish(code, r, &chien, v, gates),
                Err(_) => DecodeOutcome::fail(FailureReason::ZeroErrorValue),
            }
        }
    };
    ParallelDecode { outcome, ledger, e: a.len }
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParallelAlgo {
    Ppgz,
    Pbm,
    PbmInv,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CostBounds {
    pub mul_steps: u64,
    pub add_steps: u64,
    pub inv_steps: u64,
    pub multipliers: u64,
    pub adders: u64,
    pub dividers: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub algo: ParallelAlgo,
    pub t: usize,
    pub e: usize,
    pub steps: StepCounts,
    pub check_steps: StepCounts,
    pub value_steps: StepCounts,
    pub space: Space,
    pub value_space: Space,
    pub in_use_peak: u64,
    pub aux_minors: u64,
    pub overflow: bool,
    pub bounds: CostBounds,
    pub violations: Vec<String>,
}

/// Measured ledger against the published step and element counts.
pub fn cost_report(ledger: &CostLedger, algo: ParallelAlgo, t: usize, e: usize) -> CostReport {
    let mut v = Vec::new();
    let bounds = match algo {
        ParallelAlgo::Ppgz => CostBounds {
            mul_steps: e as u64,
            add_steps: e as u64 * ceil_log2(e),
            inv_steps: 0,
            multipliers: ppgz_circuit_bound(t),
            adders: ppgz_circuit_bound(t),
            dividers: t as u64,
        },
        ParallelAlgo::Pbm | ParallelAlgo::PbmInv => CostBounds {
            mul_steps: 2 * t as u64 + 1,
            add_steps: 2 * t as u64 + 1,
            inv_steps: if algo == ParallelAlgo::PbmInv { 0 } else { 2 * t as u64 + 1 },
            multipliers: 6 * t as u64 + 4,
            adders: 3 * t as u64 + 2,
            dividers: t as u64,
        },
    };
    let mut check = |name: &str, got: u64, max: u64| {
        if got > max {
            v.push(format!("{name}: {got} > {max}"));
        }
    };
    check("mul_steps", ledger.steps.mul, bounds.mul_steps);
    check("add_steps", ledger.steps.add, bounds.add_steps);
    check("inv_steps", ledger.steps.inv, bounds.inv_steps);
    check("multipliers", ledger.space.multipliers, bounds.multipliers);
    check("adders", ledger.space.adders, bounds.adders);
    check("dividers", ledger.value_space.dividers, bounds.dividers);
    if algo == ParallelAlgo::Ppgz {
        check("in_use_peak", ledger.in_use_peak, bounds.multipliers);
        check("value_div_steps", ledger.value_steps.div, 1);
        check("value_mul_steps", ledger.value_steps.mul, 1);
    } else {
        check("value_div_steps", ledger.value_steps.div, 1);
    }
    CostReport {
        algo,
        t,
        e,
        steps: ledger.steps,
        check_steps: ledger.check_steps,
        value_steps: ledger.value_steps,
        space: ledger.space,
        value_space: ledger.value_space,
        in_use_peak: ledger.in_use_peak,
        aux_minors: ledger.aux_minors,
        overflow: ledger.overflow,
        bounds,
        violations: v,
    }
}
