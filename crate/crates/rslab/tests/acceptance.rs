//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Runs without the libtest harness so the lines
//! always reach the console.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rslab::bm::{bm_decode_traced, bm_run};
use rslab::harness::{
    self, check_comparison_theorem, oracle_sweep, run_trials, trace_pair, unmatched_sigmas, ComparisonReport, Exec,
    TrialConfig,
};
use rslab::keyeq::{
    chien_search, compute_syndromes, key_equation_residual, omega_from_sigma, DecodeOutcome, FailureReason, Syndromes,
};
use rslab::linalg;
use rslab::parallel::{cost_report, ppgz_circuit_bound, ParallelAlgo};
use rslab::pgz::fpgz_decode_traced;
use rslab::poly::{self, Poly};
use rslab::rscode::{apply_errors, Code, ErrorPattern};
use rslab::{decode, Algo, Decoder, Elem, Field, ValueFormula};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn gf(m: u32) -> Arc<Field> {
    Arc::new(Field::with_default_modulus(m).unwrap())
}

fn gf16() -> Arc<Field> {
    Arc::new(Field::new(4, 0x13).unwrap())
}

/// α^k, or 0 for None
fn a(f: &Field, k: Option<i64>) -> Elem {
    k.map_or(0, |k| f.alpha_pow(k))
}

fn ax(f: &Field, ks: &[Option<i64>]) -> Vec<Elem> {
    ks.iter().map(|&k| a(f, k)).collect()
}

/// polynomial from (exponent of α, power of x) terms
fn px(f: &Field, terms: &[(i64, usize)]) -> Poly {
    let top = terms.iter().map(|&(_, p)| p).max().unwrap_or(0);
    let mut p = vec![0; top + 1];
    for &(k, e) in terms {
        p[e] ^= f.alpha_pow(k);
    }
    p
}

fn word(f: &Field, n: usize, terms: &[(i64, usize)]) -> Vec<Elem> {
    let mut w = px(f, terms);
    w.resize(n, 0);
    w
}

const S: Option<i64> = None;
fn e(k: i64) -> Option<i64> {
    Some(k)
}

/// RS(15,9) over GF(16), r = α²x² + αx⁸ + α⁷x¹³
fn three_errors() -> (Code, Vec<Elem>) {
    let f = gf16();
    let code = Code::new(f.clone(), 9, 1).unwrap();
    let r = word(&f, 15, &[(2, 2), (1, 8), (7, 13)]);
    (code, r)
}

fn corrected(out: &DecodeOutcome) -> Option<&ErrorPattern> {
    match out {
        DecodeOutcome::Corrected { pattern, .. } => Some(pattern),
        _ => None,
    }
}

// ---------------------------------------------------------------- 1

fn c1_fpgz_golden() -> Check {
    let (code, r) = three_errors();
    let f = code.field();
    let s = compute_syndromes(&code, &r);
    let want_s = ax(f, &[e(12), S, S, e(5), e(11), e(13), e(3), e(1)]);
    ensure!(s.as_slice() == want_s, "syndromes {:?}", s.as_slice());

    let start = Instant::now();
    let (out, loc) = fpgz_decode_traced(&code, &r, true, ValueFormula::Bp);
    let took = start.elapsed();

    let rslab::pgz::FpgzLocate::Located { trace, .. } = loc else {
        return Err("fPGZ did not locate".into());
    };
    ensure!(trace.i0 == 1, "i0 = {}", trace.i0);
    ensure!(trace.commits.len() == 2, "{} commits", trace.commits.len());
    let (c1, c3) = (&trace.commits[0], &trace.commits[1]);
    ensure!(c1.i == 1 && c1.w == [0] && c1.y == [a(f, e(3))], "first state {c1:?}");
    ensure!(c1.eps == ax(f, &[S, e(5)]) && c1.gap == Some(2), "gap at i=1: {c1:?}");
    ensure!(c3.i == 3, "second index {}", c3.i);
    ensure!(c3.w == ax(f, &[e(8), e(9), e(6)]), "w3 = {:?}", c3.w);
    ensure!(c3.y == ax(f, &[S, e(10), S]), "y3 = {:?}", c3.y);
    ensure!(trace.e() == 3, "e = {}", trace.e());
    let sigma = px(f, &[(0, 0), (6, 1), (9, 2), (8, 3)]);
    ensure!(poly::same(&trace.sigma(), &sigma), "sigma {}", poly::fmt(f, &trace.sigma()));

    for formula in [ValueFormula::Bp, ValueFormula::Horiguchi, ValueFormula::Forney] {
        let out = rslab::pgz::fpgz_decode(&code, &r, true, formula);
        let p = corrected(&out).ok_or(format!("{formula}: {out:?}"))?;
        ensure!(p.positions == [2, 8, 13], "{formula} positions {:?}", p.positions);
        ensure!(p.values == ax(f, &[e(2), e(1), e(7)]), "{formula} values {:?}", p.values);
    }
    ensure!(out.output(&r) == Some(&vec![0; 15][..]), "fPGZ output is not the zero codeword");
    ensure!(took < Duration::from_millis(1), "took {took:?}");
    Ok(format!("trace exact, decode {took:?}"))
}

// ---------------------------------------------------------------- 2

fn c2_bm_golden() -> Check {
    let (code, r) = three_errors();
    let f = code.field();
    let s = compute_syndromes(&code, &r);
    let tr = bm_run(f, &s, true);
    ensure!(tr.delta == ax(f, &[e(12), e(9), S, e(5), e(11), e(14), S, S]), "delta {:?}", tr.delta);
    let full = px(f, &[(0, 0), (6, 1), (9, 2), (8, 3)]);
    let sigmas = [
        vec![1],
        px(f, &[(0, 0), (12, 1)]),
        vec![1],
        vec![1],
        px(f, &[(0, 0), (8, 3)]),
        px(f, &[(0, 0), (6, 1), (8, 3)]),
        full.clone(),
        full.clone(),
        full,
    ];
    let taus = [
        vec![1],
        px(f, &[(3, 0)]),
        px(f, &[(3, 1)]),
        px(f, &[(3, 2)]),
        px(f, &[(10, 0)]),
        px(f, &[(10, 1)]),
        px(f, &[(10, 2)]),
        px(f, &[(10, 3)]),
        px(f, &[(10, 4)]),
    ];
    let lens = [0, 1, 1, 1, 3, 3, 3, 3, 3];
    ensure!(tr.sigma.len() == 9, "{} iterations recorded", tr.sigma.len());
    for i in 0..9 {
        ensure!(poly::same(&tr.sigma[i], &sigmas[i]), "sigma({i}) = {}", poly::fmt(f, &tr.sigma[i]));
        ensure!(poly::same(&tr.tau[i], &taus[i]), "tau({i}) = {}", poly::fmt(f, &tr.tau[i]));
        ensure!(tr.len[i] == lens[i], "D({i}) = {}", tr.len[i]);
    }
    ensure!(tr.all_verified(), "verify rows failed");
    let omega = poly::truncate(&omega_from_sigma(f, tr.final_sigma(), &s), 3);
    ensure!(poly::same(&omega, &px(f, &[(12, 0), (3, 1), (6, 2)])), "omega {}", poly::fmt(f, &omega));
    let out = bm_decode_traced(&code, &r, true, ValueFormula::Forney, false, false).outcome;
    let p = corrected(&out).ok_or(format!("{out:?}"))?;
    ensure!(p.positions == [2, 8, 13] && p.values == ax(f, &[e(2), e(1), e(7)]), "forney {p:?}");
    Ok("9 states exact, omega and Forney values exact".into())
}

// ---------------------------------------------------------------- 3

fn c3_malfunctions() -> Check {
    let f = gf16();
    // fPGZ, RS(15,9), five errors
    let code = Code::new(f.clone(), 9, 1).unwrap();
    let r = word(&f, 15, &[(3, 1), (3, 2), (14, 10), (5, 12), (8, 13)]);
    let s = compute_syndromes(&code, &r);
    // S_8 = r(α^8) = α^7, as in the syndrome matrix of this instance
    ensure!(s.as_slice() == ax(&f, &[e(10), e(2), e(8), e(7), S, e(3), e(9), e(7)]), "syndromes, five errors");
    let minor = linalg::det(&f, &s.hankel(3, [0, 1, 4]));
    ensure!(minor == a(&f, e(14)), "3x3 minor {}", f.fmt_elem(minor));
    for algo in [Algo::Fpgz, Algo::Pgz, Algo::Ppgz] {
        let got = decode(&code, &r, Decoder { algo, formula: algo.default_formula() }, true).unwrap();
        ensure!(got.outcome.is_failure(), "gated {algo} on 5 errors: {:?}", got.outcome);
    }
    let gated = rslab::pgz::fpgz_decode(&code, &r, true, ValueFormula::Bp);
    ensure!(gated.failure_reason() == Some(FailureReason::RankMismatch), "fPGZ reason {gated:?}");
    let (_, loc) = fpgz_decode_traced(&code, &r, false, ValueFormula::Bp);
    if let rslab::pgz::FpgzLocate::Located { trace, .. } = &loc {
        ensure!(trace.e() == 2, "ungated fPGZ e = {}", trace.e());
        ensure!(trace.commits[0].w == [a(&f, e(7))] && trace.commits[0].y == [a(&f, e(5))], "first state");
        ensure!(trace.commits[0].eta == Some(a(&f, e(7))), "eta");
        ensure!(trace.commits[1].w == ax(&f, &[e(11), e(12)]), "w2 {:?}", trace.commits[1].w);
    } else {
        return Err(format!("ungated fPGZ did not locate: {loc:?}"));
    }
    let want = word(&f, 15, &[(6, 0), (3, 1), (3, 2), (14, 10), (11, 11), (5, 12), (8, 13)]);
    for formula in [ValueFormula::Bp, ValueFormula::Forney, ValueFormula::Horiguchi] {
        let out = rslab::pgz::fpgz_decode(&code, &r, false, formula);
        ensure!(out.output(&r) == Some(&want[..]), "ungated fPGZ/{formula}: {out:?}");
    }
    ensure!(!code.is_codeword(&want), "malfunction output should not be a codeword");

    // BM, RS(15,5), four errors, locator with an irreducible quadratic factor
    let code = Code::new(f.clone(), 5, 1).unwrap();
    let r = word(&f, 15, &[(6, 0), (3, 1), (4, 2), (0, 7)]);
    let s = compute_syndromes(&code, &r);
    ensure!(s.as_slice() == ax(&f, &[e(3), e(5), e(7), e(8)]), "syndromes (irreducible factor)");
    let tr = bm_run(&*f, &s, false);
    ensure!(tr.delta == ax(&f, &[e(3), e(9), S, e(12)]), "delta (irreducible factor) {:?}", tr.delta);
    let sig = px(&f, &[(0, 0), (2, 1), (9, 3)]);
    ensure!(poly::same(tr.final_sigma(), &sig), "sigma4 {}", poly::fmt(&f, tr.final_sigma()));
    ensure!(poly::same(tr.final_tau(), &px(&f, &[(3, 0), (5, 1)])), "tau4");
    ensure!(tr.final_len() == 3 && tr.final_len() > code.t, "D(4) = {}", tr.final_len());
    ensure!(chien_search(&f, 15, tr.final_sigma()).deficit, "expected a Chien root deficit");
    for algo in [Algo::Bm, Algo::BmInv, Algo::Pbm, Algo::PbmInv] {
        let got = decode(&code, &r, Decoder { algo, formula: algo.default_formula() }, true).unwrap();
        ensure!(got.outcome.is_failure(), "gated {algo} on (irreducible factor): {:?}", got.outcome);
    }
    let ungated = bm_decode_traced(&code, &r, false, ValueFormula::Forney, false, false).outcome;
    ensure!(ungated.failure_reason() == Some(FailureReason::ChienRootDeficit), "ungated (irreducible factor) {ungated:?}");

    // BM, RS(15,5), D(4) = 2 but deg σ = 1
    let r = word(&f, 15, &[(3, 1), (1, 2), (0, 10)]);
    let s = compute_syndromes(&code, &r);
    ensure!(s.as_slice() == ax(&f, &[e(6), e(5), e(5), e(5)]), "syndromes (short locator)");
    let tr = bm_run(&*f, &s, true);
    ensure!(tr.delta == ax(&f, &[e(6), e(14), e(8), e(11)]), "delta (short locator) {:?}", tr.delta);
    ensure!(poly::same(&tr.sigma[3], &px(&f, &[(0, 0), (14, 1), (2, 2)])), "sigma3");
    ensure!(poly::same(&tr.tau[3], &px(&f, &[(7, 0), (6, 1)])), "tau3");
    ensure!(poly::same(tr.final_sigma(), &[1, 1]), "sigma4 {}", poly::fmt(&f, tr.final_sigma()));
    ensure!(poly::same(tr.final_tau(), &px(&f, &[(7, 1), (6, 2)])), "tau4");
    ensure!(tr.final_len() == 2 && poly::deg(tr.final_sigma()) == Some(1), "D(4) = {}", tr.final_len());
    let gated = bm_decode_traced(&code, &r, true, ValueFormula::Forney, false, false).outcome;
    ensure!(gated.failure_reason() == Some(FailureReason::DegreeMismatch), "gated (short locator) {gated:?}");
    let omega = poly::truncate(&omega_from_sigma(&f, tr.final_sigma(), &s), 1);
    ensure!(poly::same(&omega, &px(&f, &[(6, 0)])), "omega (short locator) {}", poly::fmt(&f, &omega));
    let ungated = bm_decode_traced(&code, &r, false, ValueFormula::Forney, false, false).outcome;
    let want = word(&f, 15, &[(6, 0), (3, 1), (1, 2), (0, 10)]);
    ensure!(ungated.output(&r) == Some(&want[..]), "ungated (short locator) {ungated:?}");
    Ok("3 malfunction instances: gated failures, ungated outputs verbatim".into())
}

// ---------------------------------------------------------------- 4, 6, 8, 9, 10 share these runs

struct Runs {
    reports: Vec<ComparisonReport>,
    took: Duration,
}

fn roundtrip_runs() -> Result<Runs, String> {
    let start = Instant::now();
    let mut reports = Vec::new();
    for (i, d) in [3usize, 5, 7, 9, 11, 15].into_iter().enumerate() {
        let cfg = TrialConfig::new(4, d, 1700, 0x5eed + i as u64);
        reports.push(run_trials(&cfg).map_err(|e| e.to_string())?);
    }
    let cfg = TrialConfig::new(8, 33, 1000, 0xff);
    reports.push(run_trials(&cfg).map_err(|e| e.to_string())?);
    Ok(Runs { reports, took: start.elapsed() })
}

fn label(rep: &ComparisonReport) -> String {
    format!("RS({},{})", rep.n, rep.config.d)
}

fn c4_roundtrip(runs: &Runs) -> Check {
    let small: usize = runs.reports.iter().filter(|r| r.n == 15).map(|r| r.trials).sum();
    let big: usize = runs.reports.iter().filter(|r| r.n == 255).map(|r| r.trials).sum();
    ensure!(small >= 10_000 && big >= 1_000, "{small} GF(16) trials, {big} GF(256) trials");
    for rep in &runs.reports {
        ensure!(rep.per_decoder.len() == Decoder::all().len(), "{}: {} decoders", label(rep), rep.per_decoder.len());
        for (name, t) in &rep.per_decoder {
            ensure!(t.wrong == 0, "{} {name}: {} wrong; {:?}", label(rep), t.wrong, rep.problems.first());
            ensure!(t.failures == 0, "{} {name}: {} failures {:?}", label(rep), t.failures, t.failure_reasons);
            ensure!(t.no_error + t.corrected == rep.trials as u64, "{} {name}: tally", label(rep));
        }
        ensure!(rep.disagreements == 0, "{}: {} disagreements", label(rep), rep.disagreements);
    }
    ensure!(runs.took < Duration::from_secs(60), "took {:?}", runs.took);
    Ok(format!("{} trials x {} decoders, {:.1?}", small + big, Decoder::all().len(), runs.took))
}

fn c6_counters(runs: &Runs) -> Check {
    for rep in &runs.reports {
        for (name, t) in &rep.per_decoder {
            ensure!(t.bound_violations == 0, "{} {name}: {} violations {:?}", label(rep), t.bound_violations, rep.problems);
        }
        for name in ["bm-inv/tau", "bm-inv/forney"] {
            ensure!(rep.per_decoder[name].ops_max.inv == 0, "{} {name} inverted", label(rep));
        }
    }
    // the published instantiations
    let (code, r) = three_errors();
    let got = decode(&code, &r, Decoder { algo: Algo::Fpgz, formula: ValueFormula::Bp }, true).unwrap();
    let ops = got.ops.ok_or("no fPGZ counters")?;
    ensure!(ops.mul <= 123 && ops.add <= 135 && ops.inv <= 3, "fPGZ on the t=4 example: {ops:?}");
    let rep = &runs.reports[3];
    ensure!(rep.t == 4 && rep.per_decoder["bm/forney"].ops_max.mul <= 128, "BM t=4 mul max");
    Ok(format!(
        "0 violations; t=4 example fPGZ {}/{}/{} mul/add/inv, BM max mul {}",
        ops.mul, ops.add, ops.inv, rep.per_decoder["bm/forney"].ops_max.mul
    ))
}

fn c8_theorem(runs: &Runs) -> Check {
    let mut checked = 0;
    for (i, d) in [5usize, 7, 9, 11, 15].into_iter().enumerate() {
        let mut cfg = TrialConfig::new(4, d, 200, 0x7e0 + i as u64);
        cfg.decoders = vec![Decoder { algo: Algo::Fpgz, formula: ValueFormula::Bp }];
        cfg.min_weight = 1;
        cfg.verify = false;
        let rep = run_trials(&cfg).map_err(|e| e.to_string())?;
        ensure!(rep.theorem_failures == 0, "{}: {:?}", label(&rep), rep.problems);
        checked += rep.theorem_checked;
    }
    ensure!(checked >= 1000, "only {checked} instances checked");
    for rep in &runs.reports {
        ensure!(rep.theorem_failures == 0, "{}: {:?}", label(rep), rep.problems);
        checked += rep.theorem_checked;
    }

    let (code, r) = three_errors();
    let (fp, bm) = trace_pair(&code, &r).ok_or("no trace pair")?;
    let chk = check_comparison_theorem(&fp, &bm);
    ensure!(chk.holds, "example pair: {:?}", chk.diffs);
    let p1 = poly::reciprocal_from_w(&fp.commits[0].w);
    let p3 = poly::reciprocal_from_w(&fp.commits[1].w);
    ensure!(poly::same(&p1, &[1]), "P_w1");
    ensure!((2..=3).all(|k| poly::same(&bm.sigma[k], &p1)), "P_w1 = sigma2 = sigma3");
    ensure!((6..=8).all(|k| poly::same(&bm.sigma[k], &p3)), "P_w3 = sigma6..8");
    ensure!(bm.delta[3] == fp.commits[0].eps[1] && bm.delta[2] == 0, "gap discrepancies");
    let lone = unmatched_sigmas(&fp, &bm);
    ensure!(lone == [1, 4, 5], "unmatched {lone:?}");
    Ok(format!("{checked} instances, example identities verbatim, unmatched {{1,4,5}}"))
}

fn c9_formulas(runs: &Runs) -> Check {
    for rep in &runs.reports {
        ensure!(rep.disagreements == 0, "{}: {} disagreements", label(rep), rep.disagreements);
    }
    let theta: u64 = runs.reports.iter().map(|r| r.theta_trials).sum();
    ensure!(theta > 0, "no trial exercised the earlier-state form");

    // beyond radius t too: any two formulas on the same locator must agree
    // whenever both correct
    let f = gf16();
    let mut compared = 0u64;
    for d in [5usize, 7, 9] {
        let code = Code::new(f.clone(), d, 1).unwrap();
        let all = Decoder::all();
        for i in 0..3000u64 {
            let mut rng = harness::trial_rng(0xf0f0 + d as u64, i);
            let c = code.encode(&code.random_message(&mut rng)).unwrap();
            let w = (i as usize % (code.t + 3)).min(code.n);
            let r = apply_errors(&c, &code.random_errors(w, &mut rng).unwrap());
            let outs: Vec<(Decoder, DecodeOutcome)> =
                all.iter().map(|&dec| (dec, decode(&code, &r, dec, true).unwrap().outcome)).collect();
            for (d1, o1) in &outs {
                for (d2, o2) in &outs {
                    if let (Some(p1), Some(p2)) = (corrected(o1), corrected(o2)) {
                        compared += 1;
                        ensure!(p1 == p2, "{} vs {} on {r:?}", d1.label(), d2.label());
                    }
                }
            }
        }
    }
    Ok(format!("{compared} corrected pairs identical, {theta} trials with an earlier state"))
}

fn c10_invariants(runs: &Runs) -> Check {
    let (mut rows, mut accepted) = (0usize, 0u64);
    for rep in &runs.reports {
        ensure!(rep.invariant_failures == 0, "{}: {:?}", label(rep), rep.problems);
        ensure!(rep.invariant_checked > 0, "{}: nothing checked", label(rep));
    }
    // arbitrary words, any weight
    for (m, d) in [(4u32, 9usize), (4, 15), (5, 13), (8, 33)] {
        let f = gf(m);
        let code = Code::new(f.clone(), d, 1).unwrap();
        for i in 0..400u64 {
            let mut rng = harness::trial_rng(0x1a1a + d as u64, i);
            let r: Vec<Elem> = (0..code.n).map(|_| rand::Rng::random_range(&mut rng, 0..f.q() as Elem)).collect();
            let s = compute_syndromes(&code, &r);
            let tr = bm_run(&*f, &s, true);
            let v = tr.verify.as_ref().ok_or("verify log missing")?;
            ensure!(v.len() == d, "RS({},{d}) word {i}: {} rows", code.n, v.len());
            ensure!(tr.all_verified(), "RS({},{d}) word {i}: {:?}", code.n, v.iter().find(|r| !r.ok()));
            rows += v.len();
            // residual for whatever (σ, ω) a gated decoder accepts
            for dec in Decoder::all() {
                if dec.algo == Algo::Ppgz && code.t > 8 {
                    continue;
                }
                if let DecodeOutcome::Corrected { pattern, .. } = decode(&code, &r, dec, true).unwrap().outcome {
                    let sigma = pattern.positions.iter().fold(vec![1], |acc, &p| poly::mul(&f, &acc, &[1, f.alpha_pow(p as i64)]));
                    let omega = omega_from_sigma(&f, &sigma, &s);
                    ensure!(key_equation_residual(&f, &sigma, &omega, &s, d), "{} residual, word {i}", dec.label());
                    accepted += 1;
                }
            }
        }
    }
    let residual_ok = {
        let (code, r) = three_errors();
        let s: Syndromes = compute_syndromes(&code, &r);
        let sig = px(code.field(), &[(0, 0), (6, 1), (9, 2), (8, 3)]);
        let om = px(code.field(), &[(12, 0), (3, 1), (6, 2)]);
        key_equation_residual(code.field(), &sig, &om, &s, code.d)
    };
    ensure!(residual_ok, "example (sigma, omega) residual");
    Ok(format!("{rows} verified iterations and {accepted} accepted locators on arbitrary words"))
}

// ---------------------------------------------------------------- 5

fn c5_oracle() -> Check {
    let code = Code::new(gf(3), 5, 1).unwrap();
    ensure!(code.field().modulus() == 0xB, "GF(8) modulus");
    let start = Instant::now();
    let rep = oracle_sweep(&code, &Decoder::all(), 50_000, 20, 3, 0x0ac1e, Exec::Parallel).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(rep.codewords == 512, "{} codewords", rep.codewords);
    ensure!(rep.ok(), "{} mismatches, e.g. {:?}", rep.mismatches, rep.examples.first());
    ensure!(rep.inside > 0 && rep.outside > 0, "degenerate sample");
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    Ok(format!(
        "{} words ({} inside, {} outside) x {} decoders, {took:.1?}",
        rep.random_words + rep.ball_words,
        rep.inside,
        rep.outside,
        rep.decoders.len()
    ))
}

// ---------------------------------------------------------------- 7

fn c7_costs() -> Check {
    let table = [(3, 9), (4, 24), (5, 50), (6, 120), (7, 245), (8, 560), (9, 1134)];
    let f = gf(5);
    let mut seen = 0;
    for (t, want) in table {
        ensure!(ppgz_circuit_bound(t) == want, "t={t}: bound {}", ppgz_circuit_bound(t));
        let code = Code::new(f.clone(), 2 * t + 1, 1).unwrap();
        for i in 0..60u64 {
            let mut rng = harness::trial_rng(0xc057 + t as u64, i);
            let c = code.encode(&code.random_message(&mut rng)).unwrap();
            let w = 1 + i as usize % t;
            let r = apply_errors(&c, &code.random_errors(w, &mut rng).unwrap());
            for (algo, pa) in [(Algo::Ppgz, ParallelAlgo::Ppgz), (Algo::Pbm, ParallelAlgo::Pbm), (Algo::PbmInv, ParallelAlgo::PbmInv)] {
                let got = decode(&code, &r, Decoder { algo, formula: ValueFormula::Native }, true).unwrap();
                ensure!(got.outcome.output(&r) == Some(&c[..]), "t={t} {algo} did not decode");
                let ledger = got.ledger.as_ref().ok_or("no ledger")?;
                let e = got.e.ok_or("no e")?;
                ensure!(e == w, "t={t} {algo}: e={e}, weight {w}");
                let rep = cost_report(ledger, pa, t, e);
                ensure!(rep.violations.is_empty(), "t={t} e={e} {algo}: {:?}", rep.violations);
                let (t64, e64) = (t as u64, e as u64);
                match pa {
                    ParallelAlgo::Ppgz => {
                        ensure!(ledger.steps.mul <= e64, "mult-steps {}", ledger.steps.mul);
                        let lg = (e64 as f64).log2().ceil() as u64;
                        ensure!(ledger.steps.add <= e64 * lg, "add-steps {}", ledger.steps.add);
                        ensure!(ledger.space.multipliers == want && ledger.space.adders == want, "t={t} space {:?}", ledger.space);
                    }
                    _ => {
                        let b = 2 * t64 + 1;
                        ensure!(ledger.steps.mul <= b && ledger.steps.add <= b && ledger.steps.inv <= b, "steps {:?}", ledger.steps);
                        ensure!(ledger.space.multipliers <= 6 * t64 + 4 && ledger.space.adders <= 3 * t64 + 2, "space {:?}", ledger.space);
                        ensure!(pa == ParallelAlgo::Pbm || ledger.steps.inv == 0, "inversionless array inverted");
                    }
                }
                seen += 1;
            }
        }
    }
    Ok(format!("{seen} ledgers within bounds, element counts 9..1134 reproduced"))
}

// ---------------------------------------------------------------- driver

fn run(name: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &res {
        Ok(msg) => println!("PASS  {name:<34} {msg}  [{secs:.2}s]"),
        Err(msg) => println!("FAIL  {name:<34} {msg}  [{secs:.2}s]"),
    }
    res.is_ok()
}

fn main() {
    let mut ok = true;
    ok &= run("1 golden fPGZ trace", c1_fpgz_golden);
    ok &= run("2 golden BM trace", c2_bm_golden);
    ok &= run("3 malfunction suite", c3_malfunctions);
    let runs = roundtrip_runs();
    let with_runs = |name: &str, f: fn(&Runs) -> Check| match &runs {
        Ok(r) => run(name, || f(r)),
        Err(e) => run(name, || Err(format!("trial runs failed: {e}"))),
    };
    ok &= with_runs("4 roundtrip property", c4_roundtrip);
    ok &= run("5 oracle equivalence", c5_oracle);
    ok &= with_runs("6 operation-count bounds", c6_counters);
    ok &= run("7 parallel cost reproduction", c7_costs);
    ok &= with_runs("8 comparison theorem", c8_theorem);
    ok &= with_runs("9 value-formula agreement", c9_formulas);
    ok &= with_runs("10 invariant suites", c10_invariants);
    if !ok {
        std::process::exit(1);
    }
}
