//! Peterson–Gorenstein–Zierler family: the classic determinant scan, the fast
//! Hankel iteration (fPGZ) with singularity gaps, and the value formulas that
//! go with them.

use serde::Serialize;

use crate::arith::{Arith, Counting, OpCounts};
use crate::gf::{Elem, Field, GfError};
use crate::keyeq::{
    chien_search, compute_syndromes, finish, forney, omega_from_sigma, ChienResult, DecodeOutcome,
    FailureReason, Syndromes,
};
use crate::linalg;
use crate::poly::{self, Poly};
use crate::rscode::Code;
use crate::ValueFormula;

// ---------------------------------------------------------------------------
// classic PGZ

/// e = max{ i <= t : det(A_i) != 0 }, scanning down from t. Caller handles the
/// all-zero case.
pub fn pgz_error_count(f: &Field, s: &Syndromes, t: usize) -> Result<usize, FailureReason> {
    (1..=t)
        .rev()
        .find(|&i| linalg::det(f, &s.a_block(i)) != 0)
        .ok_or(FailureReason::TooManyErrors)
}

/// Solve A_e (σ_e..σ_1)ᵀ = -(S_{e+1}..S_{2e})ᵀ.
pub fn pgz_solve_sigma(f: &Field, s: &Syndromes, e: usize) -> Option<Poly> {
    let rhs: Vec<Elem> = (e + 1..=2 * e).map(|k| s.get(k)).collect();
    let sol = linalg::solve(f, &s.a_block(e), &rhs)?;
    let mut sigma = vec![1];
    sigma.extend(sol.iter().rev());
    Some(sigma)
}

/// Björck–Pereyra for V·diag(X)·E = s with V_{r,j} = X_j^r. `x` holds X_1..X_e
/// (not their inverses), `s` holds S_1..S_e.
pub fn bp_solve_values<A: Arith>(ar: &A, x: &[Elem], s: &[Elem]) -> Result<Vec<Elem>, GfError> {
    let e = x.len();
    let mut y = s[..e].to_vec();
    let xk = |k: usize| x[k - 1];
    for k in 1..e {
        for i in (k..e).rev() {
            let p = ar.mul(xk(k), y[i - 1]);
            y[i] = ar.add(y[i], p);
        }
    }
    for k in (1..e).rev() {
        for i in k..e {
            let den = ar.add(xk(i + 1), xk(i + 1 - k));
            y[i] = ar.div(y[i], den)?;
        }
        for i in k - 1..e - 1 {
            y[i] = ar.add(y[i], y[i + 1]);
        }
    }
    (0..e).map(|i| ar.div(y[i], x[i])).collect()
}

// ---------------------------------------------------------------------------
// fast PGZ

/// One committed nonsingular index of the fPGZ iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FpgzCommit {
    pub i: usize,
    /// A_i w = -(S_{i+1}..S_{2i})ᵀ
    pub w: Vec<Elem>,
    /// A_i y = (0..0, 1)ᵀ
    pub y: Vec<Elem>,
    /// ε_1, ε_2, … as computed at this index
    pub eps: Vec<Elem>,
    /// η, only on the single-step path
    pub eta: Option<Elem>,
    /// singularity gap to the next committed index; None for the last one
    pub gap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FpgzTrace {
    pub i0: usize,
    pub commits: Vec<FpgzCommit>,
}

impl FpgzTrace {
    pub fn e(&self) -> usize {
        self.commits.last().map_or(0, |c| c.i)
    }

    /// σ(x) = w_0 x^e + … + w_{e-1} x + 1
    pub fn sigma(&self) -> Poly {
        poly::reciprocal_from_w(&self.commits.last().expect("at least the base commit").w)
    }

    /// (θ, w^{(θ)}, ε_{e-θ}) for the value formula; None when e = i_0.
    pub fn theta(&self) -> Option<(usize, &[Elem], Elem)> {
        let n = self.commits.len();
        if n < 2 {
            return None;
        }
        let c = &self.commits[n - 2];
        let gap = c.gap.expect("non-final commits have a gap");
        Some((c.i, &c.w, c.eps[gap - 1]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FpgzBase {
    NoError,
    TooManyErrors { i0: usize },
    Start { i0: usize, w: Vec<Elem>, y: Vec<Elem> },
}

/// Base step: i_0 = first nonzero syndrome, A_{i_0} is anti-lower-triangular
/// so w falls out by substitution and y = (S_{i_0}^{-1}, 0, …).
pub fn fpgz_base<A: Arith>(ar: &A, s: &Syndromes, t: usize) -> FpgzBase {
    let Some(i0) = (1..=s.len()).find(|&j| s.get(j) != 0) else {
        return FpgzBase::NoError;
    };
    if i0 > t {
        return FpgzBase::TooManyErrors { i0 };
    }
    let inv0 = ar.inv(s.get(i0)).expect("S_{i0} is nonzero");
    let mut y = vec![0; i0];
    y[0] = inv0;
    let mut w = vec![0; i0];
    // row rr fixes w_{i0-1-rr}
    for rr in 0..i0 {
        let c0 = i0 - 1 - rr;
        let sv: Vec<Elem> = (c0 + 1..i0).map(|c| s.get(rr + c + 1)).collect();
        let acc = ar.dot_plus(&sv, &w[c0 + 1..i0], Some(s.get(i0 + rr + 1)));
        w[c0] = ar.mul(inv0, acc);
    }
    FpgzBase::Start { i0, w, y }
}

/// ε_j = S_{i+j} w_0 + … + S_{2i+j-1} w_{i-1} + S_{2i+j}
fn epsilon<A: Arith>(ar: &A, s: &Syndromes, w: &[Elem], j: usize) -> Elem {
    let i = w.len();
    let sv: Vec<Elem> = (0..i).map(|m| s.get(i + j + m)).collect();
    ar.dot_plus(&sv, w, Some(s.get(2 * i + j)))
}

/// Σ_{m} S_{off+m} v_m over the given support of v.
fn sdot<A: Arith>(ar: &A, s: &Syndromes, off: usize, v: &[Elem]) -> Elem {
    let sv: Vec<Elem> = (0..v.len()).map(|m| s.get(off + m)).collect();
    ar.dot_plus(&sv, v, None)
}

/// Runs the iteration from the base state until the gap scan is exhausted.
pub fn fpgz_iterate<A: Arith>(ar: &A, s: &Syndromes, t: usize, i0: usize, w0: Vec<Elem>, y0: Vec<Elem>) -> FpgzTrace {
    let mut commits = Vec::new();
    let (mut i, mut w, mut y) = (i0, w0, y0);
    loop {
        if i >= t {
            commits.push(FpgzCommit { i, w, y, eps: vec![], eta: None, gap: None });
            break;
        }
        let eps1 = epsilon(ar, s, &w, 1);
        if eps1 != 0 {
            let inv = ar.inv(eps1).expect("nonzero");
            let mut y_new: Vec<Elem> = w.iter().map(|&wk| ar.mul(wk, inv)).collect();
            y_new.push(inv);
            let eta = sdot(ar, s, i + 1, &y);
            let eps2 = epsilon(ar, s, &w, 2);
            let coef = ar.add(ar.mul(eps1, eta), eps2);
            let mut w_new = Vec::with_capacity(i + 1);
            for k in 0..=i {
                let shifted = if k == 0 { 0 } else { w[k - 1] };
                let mut v = ar.mul(coef, y_new[k]);
                if k < i {
                    v = ar.add(v, ar.mul(eps1, y[k]));
                }
                w_new.push(if k == 0 { v } else { ar.add(shifted, v) });
            }
            commits.push(FpgzCommit { i, w, y, eps: vec![eps1, eps2], eta: Some(eta), gap: Some(1) });
            i += 1;
            w = w_new;
            y = y_new;
            continue;
        }
        // scan for the gap
        let mut eps = vec![eps1];
        let mut r = 1;
        while eps[r - 1] == 0 {
            r += 1;
            if r > t - i {
                break;
            }
            eps.push(epsilon(ar, s, &w, r));
        }
        if r > t - i {
            commits.push(FpgzCommit { i, w, y, eps, eta: None, gap: None });
            break;
        }
        let eps_r = eps[r - 1];
        let inv = ar.inv(eps_r).expect("nonzero");
        let len = i + r;
        let mut y_new = vec![0; len];
        for k in 0..i {
            y_new[k] = ar.mul(w[k], inv);
        }
        y_new[i] = inv;

        // a^{(j)}: support of a^{(j)} is the first i+1+j entries
        let mut a: Vec<Vec<Elem>> = vec![y_new.clone()];
        for j in 1..r {
            let prev = &a[j - 1];
            let alpha_j = sdot(ar, s, i + r + 1, &prev[..i + j]);
            let mut next = vec![0; len];
            next[1..i + j + 1].copy_from_slice(&prev[..i + j]);
            for k in 0..=i {
                next[k] = ar.add(next[k], ar.mul(alpha_j, a[0][k]));
            }
            a.push(next);
        }

        // b^{(j)}, length i
        let mut b = w.clone();
        for j in 1..=r {
            let beta_j = ar.add(sdot(ar, s, i + 1, &b), s.get(2 * i + j));
            let last = b[i - 1];
            let mut next = vec![0; i];
            for k in 0..i {
                let shifted = if k == 0 { 0 } else { b[k - 1] };
                let v = ar.add(ar.mul(last, w[k]), ar.mul(beta_j, y[k]));
                next[k] = if k == 0 { v } else { ar.add(shifted, v) };
            }
            b = next;
        }

        // γ_l for l = 1..r
        let gamma: Vec<Elem> = (1..=r).map(|l| sdot(ar, s, i + l, &b)).collect();

        let mut w_new = vec![0; len];
        w_new[..i].copy_from_slice(&b);
        for l in 0..r {
            let c = ar.add(gamma[r - l - 1], s.get(2 * i + 2 * r - l));
            for k in 0..i + 1 + l {
                w_new[k] = ar.add(w_new[k], ar.mul(c, a[l][k]));
            }
        }
        commits.push(FpgzCommit { i, w, y, eps, eta: None, gap: Some(r) });
        i = len;
        w = w_new;
        y = y_new;
    }
    FpgzTrace { i0, commits }
}

/// Location result with op counts split into base step and iteration.
#[derive(Debug, Clone)]
pub enum FpgzLocate {
    NoError,
    Failure(FailureReason),
    Located { trace: FpgzTrace, base_ops: OpCounts, iter_ops: OpCounts },
}

pub fn fpgz_locate(f: &Field, s: &Syndromes, t: usize) -> FpgzLocate {
    let ar = Counting::new(f);
    match fpgz_base(&ar, s, t) {
        FpgzBase::NoError => FpgzLocate::NoError,
        FpgzBase::TooManyErrors { .. } => FpgzLocate::Failure(FailureReason::TooManyErrors),
        FpgzBase::Start { i0, w, y } => {
            let base_ops = ar.counts();
            ar.reset();
            let trace = fpgz_iterate(&ar, s, t, i0, w, y);
            FpgzLocate::Located { trace, base_ops, iter_ops: ar.counts() }
        }
    }
}

/// σ_0 S_k + Σ_{i=1}^{e} S_{k-i} σ_i = 0 for every e < k <= d-1, e = deg σ.
/// The indices e+1..2e are the solved system itself unless the top
/// coefficient vanished; the rest are the leftover syndrome equations.
/// σ need not be monic.
pub fn residual_equations_hold(f: &Field, s: &Syndromes, sigma: &[Elem]) -> bool {
    let e = poly::deg(sigma).unwrap_or(0);
    (e + 1..=s.len()).all(|idx| {
        (1..=e).fold(f.mul(s.get(idx), sigma[0]), |acc, i| acc ^ f.mul(s.get(idx - i), sigma[i])) == 0
    })
}

/// Gate sequence shared by the PGZ family once a locator is in hand:
/// gated residual equations, then the Chien root count.
pub fn locator_gates(code: &Code, s: &Syndromes, sigma: &[Elem], gates: bool) -> Result<ChienResult, FailureReason> {
    let f = code.field();
    if gates && !residual_equations_hold(f, s, sigma) {
        return Err(FailureReason::RankMismatch);
    }
    let chien = chien_search(f, code.n, sigma);
    if chien.deficit {
        return Err(FailureReason::ChienRootDeficit);
    }
    Ok(chien)
}

/// E_i = -ε_{e-θ} (X_i^{-1})^{e+θ-1} / (σ'(X_i^{-1}) · P_{w^{(θ)}}(X_i^{-1}))
pub fn fpgz_values_horiguchi(
    f: &Field,
    trace: &FpgzTrace,
    sigma: &[Elem],
    inverse_roots: &[Elem],
) -> Option<Result<Vec<Elem>, GfError>> {
    let (theta, w_theta, eps) = trace.theta()?;
    let e = trace.e();
    let p = poly::reciprocal_from_w(w_theta);
    let ds = poly::derivative(sigma);
    Some(
        inverse_roots
            .iter()
            .map(|&xi| {
                let num = f.mul(eps, f.pow(xi, (e + theta - 1) as u64));
                f.div(num, f.mul(poly::eval(f, &ds, xi), poly::eval(f, &p, xi)))
            })
            .collect(),
    )
}

/// Values for the PGZ family: BP, Forney, or the fPGZ Horiguchi form (which
/// falls back to BP when no earlier nonsingular index exists).
fn pgz_values(
    f: &Field,
    s: &Syndromes,
    sigma: &[Elem],
    chien: &ChienResult,
    formula: ValueFormula,
    trace: Option<&FpgzTrace>,
) -> Result<Vec<Elem>, GfError> {
    match formula {
        ValueFormula::Forney => forney(f, sigma, &omega_from_sigma(f, sigma, s), &chien.inverse_roots),
        ValueFormula::Horiguchi => {
            let tr = trace.expect("horiguchi needs an fPGZ trace");
            match fpgz_values_horiguchi(f, tr, sigma, &chien.inverse_roots) {
                Some(v) => v,
                None => bp_from_chien(f, s, chien),
            }
        }
        _ => bp_from_chien(f, s, chien),
    }
}

fn bp_from_chien(f: &Field, s: &Syndromes, chien: &ChienResult) -> Result<Vec<Elem>, GfError> {
    let x: Vec<Elem> = chien.inverse_roots.iter().map(|&xi| f.inv(xi)).collect::<Result<_, _>>()?;
    bp_solve_values(f, &x, &s.as_slice()[..x.len()])
}

/// Shared tail: gated residual check, Chien, values, outcome.
fn conclude(
    code: &Code,
    r: &[Elem],
    s: &Syndromes,
    sigma: &[Elem],
    gates: bool,
    formula: ValueFormula,
    trace: Option<&FpgzTrace>,
) -> DecodeOutcome {
    let f = code.field();
    let chien = match locator_gates(code, s, sigma, gates) {
        Ok(c) => c,
        Err(reason) => return DecodeOutcome::fail(reason),
    };
    match pgz_values(f, s, sigma, &chien, formula, trace) {
        Ok(v) => finish(code, r, &chien, v, gates),
        Err(_) => DecodeOutcome::fail(FailureReason::ZeroErrorValue),
    }
}

pub fn pgz_decode(code: &Code, r: &[Elem], gates: bool, formula: ValueFormula) -> DecodeOutcome {
    let f = code.field();
    let s = compute_syndromes(code, r);
    if s.is_zero() {
        return DecodeOutcome::NoError;
    }
    let e = match pgz_error_count(f, &s, code.t) {
        Ok(e) => e,
        Err(reason) => return DecodeOutcome::fail(reason),
    };
    let sigma = pgz_solve_sigma(f, &s, e).expect("det(A_e) != 0");
    conclude(code, r, &s, &sigma, gates, formula, None)
}

/// Full fPGZ decode; the trace and op counts come back alongside.
pub fn fpgz_decode_traced(code: &Code, r: &[Elem], gates: bool, formula: ValueFormula) -> (DecodeOutcome, FpgzLocate) {
    let f = code.field();
    let s = compute_syndromes(code, r);
    let loc = fpgz_locate(f, &s, code.t);
    let out = match &loc {
        FpgzLocate::NoError => DecodeOutcome::NoError,
        FpgzLocate::Failure(reason) => DecodeOutcome::fail(*reason),
        FpgzLocate::Located { trace, .. } => {
            conclude(code, r, &s, &trace.sigma(), gates, formula, Some(trace))
        }
    };
    (out, loc)
}

pub fn fpgz_decode(code: &Code, r: &[Elem], gates: bool, formula: ValueFormula) -> DecodeOutcome {
    fpgz_decode_traced(code, r, gates, formula).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rscode::apply_errors;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn gf16() -> Arc<Field> {
        Arc::new(Field::new(4, 0x13).unwrap())
    }

    fn check_commit(f: &Field, s: &Syndromes, c: &FpgzCommit) {
        let i = c.i;
        let aw = linalg::mat_vec(f, &s.a_block(i), &c.w);
        let want: Vec<Elem> = (i + 1..=2 * i).map(|k| s.get(k)).collect();
        assert_eq!(aw, want, "A_i w at i={i}");
        let ay = linalg::mat_vec(f, &s.a_block(i), &c.y);
        let mut unit = vec![0; i];
        unit[i - 1] = 1;
        assert_eq!(ay, unit, "A_i y at i={i}");
    }

    #[test]
    fn bp_matches_dense_solve() {
        let f = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let e = rng.random_range(1..=6);
            let pos = rand::seq::index::sample(&mut rng, 15, e).into_vec();
            let x: Vec<Elem> = pos.iter().map(|&p| f.alpha_pow(p as i64)).collect();
            let s: Vec<Elem> = (0..e).map(|_| rng.random_range(0..16)).collect();
            // (V·diag X)_{r,j} = X_j^{r+1}
            let m: linalg::Matrix = (0..e).map(|r| x.iter().map(|&xj| f.pow(xj, r as u64 + 1)).collect()).collect();
            let want = linalg::solve(&f, &m, &s).unwrap();
            assert_eq!(bp_solve_values(&*f, &x, &s).unwrap(), want);
        }
        assert_eq!(bp_solve_values(&*f, &[f.alpha_pow(4)], &[f.alpha_pow(9)]).unwrap(), vec![f.alpha_pow(5)]);
    }

    #[test]
    fn fpgz_states_solve_their_systems_and_gaps_are_exact() {
        let f = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in [5, 7, 9, 11, 13, 15] {
            let code = Code::narrow_sense(f.clone(), d).unwrap();
            for _ in 0..300 {
                // include words beyond t to exercise longer gaps
                let wgt = rng.random_range(1..=code.t + 2);
                let pat = code.random_errors(wgt, &mut rng).unwrap();
                let s = compute_syndromes(&code, &pat.to_word(code.n));
                let FpgzLocate::Located { trace, .. } = fpgz_locate(&f, &s, code.t) else {
                    continue;
                };
                for (k, c) in trace.commits.iter().enumerate() {
                    check_commit(&f, &s, c);
                    assert_ne!(linalg::det(&f, &s.a_block(c.i)), 0);
                    if let Some(r) = c.gap {
                        for j in 1..r {
                            assert_eq!(linalg::det(&f, &s.a_block(c.i + j)), 0);
                        }
                        assert_eq!(trace.commits[k + 1].i, c.i + r);
                    }
                }
                if wgt <= code.t {
                    assert_eq!(trace.e(), wgt);
                }
            }
        }
    }

    #[test]
    fn classic_and_fast_agree_with_injected() {
        let f = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in [3, 5, 9, 15] {
            let code = Code::narrow_sense(f.clone(), d).unwrap();
            for _ in 0..200 {
                let c = code.encode(&code.random_message(&mut rng)).unwrap();
                let wgt = rng.random_range(0..=code.t);
                let pat = code.random_errors(wgt, &mut rng).unwrap();
                let r = apply_errors(&c, &pat);
                for formula in [ValueFormula::Bp, ValueFormula::Forney] {
                    let out = pgz_decode(&code, &r, true, formula);
                    assert_eq!(out.output(&r).unwrap(), &c[..]);
                }
                for formula in [ValueFormula::Bp, ValueFormula::Forney, ValueFormula::Horiguchi] {
                    let out = fpgz_decode(&code, &r, true, formula);
                    assert_eq!(out.output(&r).unwrap(), &c[..]);
                }
            }
        }
    }

    #[test]
    fn single_error_count() {
        let f = gf16();
        let code = Code::narrow_sense(f.clone(), 9).unwrap();
        let pat = crate::rscode::ErrorPattern::new(vec![6], vec![f.alpha_pow(3)], 15).unwrap();
        let s = compute_syndromes(&code, &pat.to_word(15));
        assert_eq!(pgz_error_count(&f, &s, code.t), Ok(1));
        let sigma = pgz_solve_sigma(&f, &s, 1).unwrap();
        assert_eq!(sigma[1], f.div(s.get(2), s.get(1)).unwrap());
    }

    #[test]
    fn nonzero_offset_codes_decode() {
        let f = gf16();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for l in [0, 2, 5] {
            let code = Code::new(f.clone(), 7, l).unwrap();
            for _ in 0..100 {
                let c = code.encode(&code.random_message(&mut rng)).unwrap();
                let pat = code.random_errors(rng.random_range(0..=3), &mut rng).unwrap();
                let r = apply_errors(&c, &pat);
                let out = fpgz_decode(&code, &r, true, ValueFormula::Horiguchi);
                assert_eq!(out.output(&r).unwrap(), &c[..]);
            }
        }
    }
}
