//! Berlekamp–Massey: the σ/τ iteration with discrepancies and the length
//! function D, the inversionless variant, three value formulas, and an
//! optional verify mode that carries ω^{(i)}, γ^{(i)} and checks the
//! invariants at every step.

use serde::Serialize;

use crate::arith::{Arith, Counting, OpCounts};
use crate::gf::{Elem, Field, GfError};
use crate::keyeq::{
    chien_search, compute_syndromes, finish, forney, omega_from_sigma, ChienResult, DecodeOutcome,
    FailureReason, Syndromes,
};
use crate::poly::{self, Poly};
use crate::rscode::Code;
use crate::ValueFormula;

/// Full history of one BM run: entry i of each vector is the state after i
/// iterations (so index 0 is the initial state).
#[derive(Debug, Clone, Serialize)]
pub struct BmTrace {
    pub sigma: Vec<Poly>,
    pub tau: Vec<Poly>,
    /// D(i)
    pub len: Vec<usize>,
    /// C(i), -1 before the first length change
    pub last_change: Vec<i64>,
    /// Δ_0 .. Δ_{d-2}
    pub delta: Vec<Elem>,
    /// β(0) .. β(d-1); only for the inversionless run
    pub beta: Vec<Elem>,
    pub verify: Option<Vec<VerifyRow>>,
}

impl BmTrace {
    pub fn final_sigma(&self) -> &Poly {
        self.sigma.last().expect("non-empty")
    }
    pub fn final_tau(&self) -> &Poly {
        self.tau.last().expect("non-empty")
    }
    pub fn final_len(&self) -> usize {
        *self.len.last().expect("non-empty")
    }
    /// c = C(d-1), with σ^{(c)} and Δ_c.
    pub fn c_snapshot(&self) -> Option<(usize, &Poly, Elem)> {
        let c = *self.last_change.last()?;
        (c >= 0).then(|| (c as usize, &self.sigma[c as usize], self.delta[c as usize]))
    }
    /// b = Π_{j=0}^{d-2} β(j)
    pub fn beta_product(&self, f: &Field) -> Elem {
        let k = self.beta.len().saturating_sub(1);
        self.beta[..k].iter().fold(1, |acc, &b| f.mul(acc, b))
    }
    pub fn all_verified(&self) -> bool {
        self.verify.as_ref().is_some_and(|rows| rows.iter().all(VerifyRow::ok))
    }
}

/// x^low · (c_0 + c_1 x + …); only γ^{(0)} = -x^{-1} needs a negative low.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Laurent {
    low: i64,
    c: Poly,
}

impl Laurent {
    fn poly(p: Poly) -> Self {
        Laurent { low: 0, c: p }
    }
    fn times_x(&self) -> Self {
        Laurent { low: self.low + 1, c: self.c.clone() }
    }
    fn to_poly(&self) -> Poly {
        assert!(self.low >= 0 || self.c.iter().all(|&x| x == 0));
        if self.low < 0 {
            return Vec::new();
        }
        poly::shift(&self.c, self.low as usize)
    }
    fn mul_poly(&self, f: &Field, p: &[Elem]) -> Self {
        Laurent { low: self.low, c: poly::mul(f, &self.c, p) }
    }
    fn add(&self, o: &Laurent) -> Self {
        let low = self.low.min(o.low);
        let a = poly::shift(&self.c, (self.low - low) as usize);
        let b = poly::shift(&o.c, (o.low - low) as usize);
        Laurent { low, c: poly::add(&a, &b) }
    }
    /// Degree; None for zero.
    fn deg(&self) -> Option<i64> {
        poly::deg(&self.c).map(|d| d as i64 + self.low)
    }
    fn is_monomial(&self, k: i64) -> bool {
        let nz: Vec<usize> = (0..self.c.len()).filter(|&j| self.c[j] != 0).collect();
        nz.len() == 1 && self.c[nz[0]] == 1 && nz[0] as i64 + self.low == k
    }
}

/// Invariant checks at one iteration index.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerifyRow {
    pub i: usize,
    /// σ^{(i)} S ≡ ω^{(i)} (mod x^i)
    pub key: bool,
    /// τ^{(i)} S ≡ γ^{(i)} + x^{i-1} (mod x^i)
    pub aux: bool,
    /// ω τ - σ γ = x^{i-1}
    pub bezout: bool,
    /// deg σ ≤ D, deg τ ≤ i-D, deg ω ≤ D-1, deg γ ≤ i-D-1
    pub degrees: bool,
}

impl VerifyRow {
    pub fn ok(&self) -> bool {
        self.key && self.aux && self.bezout && self.degrees
    }
}

fn coef(p: &[Elem], k: usize) -> Elem {
    p.get(k).copied().unwrap_or(0)
}

fn fits(deg: Option<i64>, bound: i64) -> bool {
    deg.is_none_or(|d| d <= bound)
}

fn verify_row(f: &Field, s: &Syndromes, i: usize, sigma: &Poly, tau: &Poly, omega: &Poly, gamma: &Laurent, d_i: usize) -> VerifyRow {
    let sp = s.poly();
    let key = poly::same(&poly::truncate(&poly::mul(f, sigma, &sp), i), &poly::truncate(omega, i));
    let aux = if i == 0 {
        true
    } else {
        let lhs = poly::truncate(&poly::mul(f, tau, &sp), i);
        let mut rhs = poly::truncate(&gamma.to_poly(), i);
        rhs.resize(i, 0);
        rhs[i - 1] ^= 1;
        poly::same(&lhs, &rhs)
    };
    let bez = Laurent::poly(poly::mul(f, omega, tau)).add(&gamma.mul_poly(f, sigma));
    let bezout = bez.is_monomial(i as i64 - 1);
    let (ii, dd) = (i as i64, d_i as i64);
    let degrees = fits(poly::deg(sigma).map(|x| x as i64), dd)
        && fits(poly::deg(tau).map(|x| x as i64), ii - dd)
        && fits(poly::deg(omega).map(|x| x as i64), dd - 1)
        && fits(gamma.deg(), ii - dd - 1);
    VerifyRow { i, key, aux, bezout, degrees }
}

/// Runs the d-1 iterations. Operations on σ/τ/Δ go through `ar`; the
/// verify-mode bookkeeping uses the bare field.
pub fn bm_run<A: Arith>(ar: &A, s: &Syndromes, verify: bool) -> BmTrace {
    let f = ar.field();
    let steps = s.len();
    let mut sigma: Poly = vec![1];
    let mut tau: Poly = vec![1];
    let mut dl = 0usize;
    let mut c: i64 = -1;
    let mut tr = BmTrace {
        sigma: vec![sigma.clone()],
        tau: vec![tau.clone()],
        len: vec![0],
        last_change: vec![-1],
        delta: Vec::with_capacity(steps),
        beta: Vec::new(),
        verify: None,
    };
    let mut omega: Poly = Vec::new();
    let mut gamma = Laurent { low: -1, c: vec![1] };
    let mut rows = Vec::new();
    if verify {
        rows.push(verify_row(f, s, 0, &sigma, &tau, &omega, &gamma, 0));
    }
    for i in 0..steps {
        // Δ_i = Σ_{j=0}^{D} S_{i+1-j} σ_j, σ_0 = 1
        let sv: Vec<Elem> = (1..=dl).map(|j| s.get(i + 1 - j)).collect();
        let sc: Vec<Elem> = (1..=dl).map(|j| coef(&sigma, j)).collect();
        let delta = ar.dot_plus(&sv, &sc, Some(s.get(i + 1)));
        let prev_sigma = sigma.clone();
        if delta != 0 {
            let tlen = poly::deg(&tau).map_or(0, |d| d + 1);
            if sigma.len() < tlen + 1 {
                sigma.resize(tlen + 1, 0);
            }
            for k in 0..tlen {
                let p = ar.mul(delta, tau[k]);
                sigma[k + 1] = ar.add(sigma[k + 1], p);
            }
            sigma = poly::trim(sigma);
        }
        let lengthen = delta != 0 && 2 * dl < i + 1;
        let prev_omega = omega.clone();
        if verify {
            // ω^{(i+1)} = ω^{(i)} - Δ_i x γ^{(i)}
            let xg = gamma.times_x().to_poly();
            omega = poly::trim(poly::add(&omega, &poly::scale(f, &xg, delta)));
        }
        if lengthen {
            let inv = ar.inv(delta).expect("nonzero discrepancy");
            let slen = poly::deg(&prev_sigma).map_or(0, |d| d + 1);
            let mut t_new = vec![inv];
            for k in 1..slen {
                t_new.push(ar.mul(prev_sigma[k], inv));
            }
            tau = t_new;
            dl = i + 1 - dl;
            c = i as i64;
            if verify {
                gamma = Laurent::poly(poly::scale(f, &prev_omega, f.inv(delta).expect("nonzero")));
            }
        } else {
            tau = poly::shift(&tau, 1);
            if verify {
                gamma = gamma.times_x();
            }
        }
        tau = poly::trim(tau);
        tr.delta.push(delta);
        tr.sigma.push(sigma.clone());
        tr.tau.push(tau.clone());
        tr.len.push(dl);
        tr.last_change.push(c);
        if verify {
            rows.push(verify_row(f, s, i + 1, &sigma, &tau, &omega, &gamma, dl));
        }
    }
    if verify {
        tr.verify = Some(rows);
    }
    tr
}

/// Inversionless run: σ̂^{(i+1)} = β(i)σ̂ - Δ̂_i x τ̂ with β tracking the last
/// nonzero discrepancy. No field inversions.
pub fn bm_run_inversionless<A: Arith>(ar: &A, s: &Syndromes) -> BmTrace {
    let steps = s.len();
    let mut sigma: Poly = vec![1];
    let mut tau: Poly = vec![1];
    let mut beta: Elem = 1;
    let mut dl = 0usize;
    let mut c: i64 = -1;
    let mut tr = BmTrace {
        sigma: vec![sigma.clone()],
        tau: vec![tau.clone()],
        len: vec![0],
        last_change: vec![-1],
        delta: Vec::with_capacity(steps),
        beta: vec![1],
        verify: None,
    };
    for i in 0..steps {
        let sv: Vec<Elem> = (0..=dl).map(|j| s.get(i + 1 - j)).collect();
        let sc: Vec<Elem> = (0..=dl).map(|j| coef(&sigma, j)).collect();
        let delta = ar.dot_plus(&sv, &sc, None);
        let prev_sigma = sigma.clone();
        let slen = poly::deg(&sigma).map_or(0, |d| d + 1);
        let tlen = poly::deg(&tau).map_or(0, |d| d + 1);
        let mut next = vec![0; slen.max(tlen + 1)];
        for k in 0..slen {
            next[k] = ar.mul(beta, sigma[k]);
        }
        if delta != 0 {
            for k in 0..tlen {
                let p = ar.mul(delta, tau[k]);
                next[k + 1] = ar.add(next[k + 1], p);
            }
        }
        sigma = poly::trim(next);
        if delta != 0 && 2 * dl < i + 1 {
            tau = prev_sigma;
            beta = delta;
            dl = i + 1 - dl;
            c = i as i64;
        } else {
            tau = poly::shift(&tau, 1);
        }
        tau = poly::trim(tau);
        tr.delta.push(delta);
        tr.sigma.push(sigma.clone());
        tr.tau.push(tau.clone());
        tr.len.push(dl);
        tr.last_change.push(c);
        tr.beta.push(beta);
    }
    tr
}

/// E_i = -(X_i^{-1})^{d-2} / (σ'(X_i^{-1}) τ^{(d-1)}(X_i^{-1}))
pub fn bm_values_tau(f: &Field, d: usize, sigma: &[Elem], tau: &[Elem], inverse_roots: &[Elem]) -> Result<Vec<Elem>, GfError> {
    let ds = poly::derivative(sigma);
    inverse_roots
        .iter()
        .map(|&xi| f.div(f.pow(xi, d as u64 - 2), f.mul(poly::eval(f, &ds, xi), poly::eval(f, tau, xi))))
        .collect()
}

/// E_i = -(X_i^{-1})^c Δ_c / (σ'(X_i^{-1}) σ^{(c)}(X_i^{-1})), c = C(d-1)
pub fn bm_values_horiguchi(f: &Field, tr: &BmTrace, inverse_roots: &[Elem]) -> Result<Vec<Elem>, GfError> {
    let (c, sigma_c, delta_c) = tr.c_snapshot().ok_or(GfError::DivisionByZero)?;
    let ds = poly::derivative(tr.final_sigma());
    inverse_roots
        .iter()
        .map(|&xi| {
            let num = f.mul(f.pow(xi, c as u64), delta_c);
            f.div(num, f.mul(poly::eval(f, &ds, xi), poly::eval(f, sigma_c, xi)))
        })
        .collect()
}

/// E_i = -b β(d-1) (X_i^{-1})^{d-2} / (σ̂'(X_i^{-1}) τ̂^{(d-1)}(X_i^{-1}))
pub fn bm_values_inversionless(f: &Field, d: usize, tr: &BmTrace, inverse_roots: &[Elem]) -> Result<Vec<Elem>, GfError> {
    let scale = f.mul(tr.beta_product(f), *tr.beta.last().expect("non-empty"));
    let raw = bm_values_tau(f, d, tr.final_sigma(), tr.final_tau(), inverse_roots)?;
    Ok(raw.into_iter().map(|v| f.mul(v, scale)).collect())
}

/// Gate on (ẽ, D(d-1)); returns the Chien result when the locator passes.
pub(crate) fn gate_locator(code: &Code, sigma: &[Elem], len: usize, gates: bool) -> Result<ChienResult, FailureReason> {
    let e = poly::deg(sigma).unwrap_or(0);
    if e == 0 {
        // nonzero syndromes but a constant locator
        return Err(FailureReason::DegreeMismatch);
    }
    if gates {
        if e > code.t {
            return Err(FailureReason::TooManyErrors);
        }
        if len != e {
            return Err(FailureReason::DegreeMismatch);
        }
    }
    let chien = chien_search(code.field(), code.n, sigma);
    if chien.deficit {
        return Err(FailureReason::ChienRootDeficit);
    }
    Ok(chien)
}

#[derive(Debug, Clone)]
pub struct BmDecode {
    pub outcome: DecodeOutcome,
    pub trace: Option<BmTrace>,
    pub ops: OpCounts,
}

pub fn bm_decode_traced(code: &Code, r: &[Elem], gates: bool, formula: ValueFormula, inversionless: bool, verify: bool) -> BmDecode {
    let f = code.field();
    let s = compute_syndromes(code, r);
    if s.is_zero() {
        return BmDecode { outcome: DecodeOutcome::NoError, trace: None, ops: OpCounts::default() };
    }
    let ar = Counting::new(f);
    let tr = if inversionless { bm_run_inversionless(&ar, &s) } else { bm_run(&ar, &s, verify) };
    let ops = ar.counts();
    let sigma = tr.final_sigma();
    let outcome = match gate_locator(code, sigma, tr.final_len(), gates) {
        Err(reason) => DecodeOutcome::fail(reason),
        Ok(chien) => {
            let vals = match (formula, inversionless) {
                (ValueFormula::Forney, _) => forney(f, sigma, &omega_from_sigma(f, sigma, &s), &chien.inverse_roots),
                (ValueFormula::Horiguchi, false) => bm_values_horiguchi(f, &tr, &chien.inverse_roots),
                (_, true) => bm_values_inversionless(f, code.d, &tr, &chien.inverse_roots),
                (_, false) => bm_values_tau(f, code.d, sigma, tr.final_tau(), &chien.inverse_roots),
            };
            match vals {
                Ok(v) => finish(code, r, &chien, v, gates),
                Err(_) => DecodeOutcome::fail(FailureReason::ZeroErrorValue),
            }
        }
    };
    BmDecode { outcome, trace: Some(tr), ops }
}

pub fn bm_decode(code: &Code, r: &[Elem], gates: bool, formula: ValueFormula) -> DecodeOutcome {
    bm_decode_traced(code, r, gates, formula, false, false).outcome
}
