//! Channel trials, cross-decoder differential checks, operation-count bounds,
//! the fPGZ/BM comparison check, and a brute-force nearest-codeword oracle.
//!
//! Every trial draws from its own ChaCha stream (seed, stream = trial index),
//! so a report depends only on the config, never on scheduling. Trials run
//! on a rayon pool capped by `RS_LAB_THREADS` when the `parallel` feature is
//! on, and in a plain loop otherwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::OpCounts;
use crate::bm::{bm_run, BmTrace};
use crate::gf::{Elem, Field, GfError};
use crate::keyeq::{compute_syndromes, key_equation_residual, omega_from_sigma, DecodeOutcome};
use crate::parallel::{cost_report, ParallelAlgo};
use crate::pgz::{fpgz_locate, FpgzLocate, FpgzTrace};
use crate::poly;
use crate::rscode::{apply_errors, hamming_distance, Code, CodeError, Word};
use crate::{decode, Algo, DecodeError, Decoder};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("code too large for exhaustive search: {0} codewords")]
    SizeLimit(u128),
    #[error("bad configuration: {0}")]
    Config(String),
}

/// Worker count: RS_LAB_THREADS if set and positive, else every core.
pub fn worker_threads() -> usize {
    std::env::var("RS_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

#[cfg(feature = "parallel")]
fn pool() -> &'static rayon::ThreadPool {
    static POOL: std::sync::OnceLock<rayon::ThreadPool> = std::sync::OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new().num_threads(worker_threads()).build().expect("thread pool")
    })
}

/// Map over 0..n in order, in parallel when asked and available.
pub fn map_indexed<T, F>(n: usize, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => pool().install(|| (0..n).into_par_iter().map(&f).collect()),
        _ => (0..n).map(f).collect(),
    }
}

/// The RNG for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialConfig {
    pub m: u32,
    pub modulus: Option<u32>,
    pub d: usize,
    pub l: usize,
    pub trials: usize,
    pub seed: u64,
    /// Error weight drawn uniformly from min..=max; max defaults to t.
    pub min_weight: usize,
    pub max_weight: Option<usize>,
    pub decoders: Vec<Decoder>,
    pub gates: bool,
    /// Run BM in verify mode and check the invariants on every trial.
    pub verify: bool,
    /// Check the fPGZ/BM correspondence on every trial within radius t.
    pub theorem: bool,
    pub keep_records: bool,
}

impl TrialConfig {
    pub fn new(m: u32, d: usize, trials: usize, seed: u64) -> Self {
        TrialConfig {
            m,
            modulus: None,
            d,
            l: 1,
            trials,
            seed,
            min_weight: 0,
            max_weight: None,
            decoders: Decoder::all(),
            gates: true,
            verify: true,
            theorem: true,
            keep_records: false,
        }
    }

    pub fn code(&self) -> Result<Code, HarnessError> {
        let field = match self.modulus {
            Some(p) => Field::new(self.m, p)?,
            None => Field::with_default_modulus(self.m)?,
        };
        Ok(Code::new(Arc::new(field), self.d, self.l)?)
    }
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct DecoderTally {
    pub no_error: u64,
    pub corrected: u64,
    pub failures: u64,
    /// weight <= t and the output was not the sent codeword
    pub wrong: u64,
    /// weight > t, gated, and the output was not a codeword within t of r
    pub illegitimate: u64,
    pub bound_violations: u64,
    pub failure_reasons: BTreeMap<String, u64>,
    pub ops_max: OpCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoderResult {
    pub decoder: String,
    pub outcome: DecodeOutcome,
    pub ok: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub weight: usize,
    pub positions: Vec<usize>,
    pub agree: bool,
    pub theorem: Option<bool>,
    pub invariants: Option<bool>,
    pub results: Vec<DecoderResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub config: TrialConfig,
    pub n: usize,
    pub t: usize,
    pub trials: usize,
    pub per_decoder: BTreeMap<String, DecoderTally>,
    /// trials where the decoders' outputs were not all identical
    pub disagreements: u64,
    pub theorem_checked: u64,
    pub theorem_failures: u64,
    pub invariant_checked: u64,
    pub invariant_failures: u64,
    /// trials where the fPGZ Horiguchi form had an earlier state to use
    pub theta_trials: u64,
    /// first few problems, for humans
    pub problems: Vec<String>,
    pub records: Vec<TrialRecord>,
}

impl ComparisonReport {
    pub fn violations(&self) -> u64 {
        self.disagreements
            + self.theorem_failures
            + self.invariant_failures
            + self.per_decoder.values().map(|t| t.wrong + t.illegitimate + t.bound_violations).sum::<u64>()
    }
    pub fn ok(&self) -> bool {
        self.violations() == 0
    }
}

const MAX_PROBLEMS: usize = 50;

/// Sequential-counter bounds for the locator step. Empty when within bounds.
pub fn check_counter_bounds(algo: Algo, ops: &OpCounts, t: usize, e: usize) -> Vec<String> {
    let (t, e) = (t as u64, e as u64);
    let mut v = Vec::new();
    let mut le = |what: &str, got: u64, max: u64| {
        if got > max {
            v.push(format!("{algo} {what}: {got} > {max}"));
        }
    };
    match algo {
        Algo::Fpgz => {
            le("inv", ops.inv, e);
            le("mul", ops.mul, 10 * e * t + e);
            le("add", ops.add, 11 * e * t + e);
            le("div", ops.div, 0);
        }
        Algo::Bm => {
            le("inv", ops.inv, 2 * t + 1);
            le("mul", ops.mul, 6 * t * t + 7 * t + 4);
            le("add", ops.add, 4 * t * t + 4 * t + 1);
            le("div", ops.div, 0);
        }
        Algo::BmInv => {
            le("inv", ops.inv, 0);
            le("div", ops.div, 0);
        }
        _ => {}
    }
    v
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct TheoremCheck {
    pub holds: bool,
    /// (i, first, last): P_{w^{(i)}} equals σ^{(first..=last)}
    pub runs: Vec<(usize, usize, usize)>,
    pub diffs: Vec<String>,
}

/// For every committed fPGZ index i with gap r, P_{w^{(i)}} = σ^{(2i)} = … =
/// σ^{(2i+r-1)}, Δ_{2i..2i+r-2} = 0 and Δ_{2i+r-1} = ε_r ≠ 0. The last
/// commit extends to σ^{(d-1)} with zero discrepancies.
pub fn check_comparison_theorem(fp: &FpgzTrace, bm: &BmTrace) -> TheoremCheck {
    let last = bm.sigma.len() - 1;
    let mut out = TheoremCheck { holds: true, ..Default::default() };
    for c in &fp.commits {
        let p = poly::reciprocal_from_w(&c.w);
        let first = 2 * c.i;
        let hi = match c.gap {
            Some(r) => 2 * c.i + r - 1,
            None => last,
        };
        if hi > last || first > hi {
            out.diffs.push(format!("i={}: window {first}..={hi} outside 0..={last}", c.i));
            continue;
        }
        for k in first..=hi {
            if !poly::same(&p, &bm.sigma[k]) {
                out.diffs.push(format!("i={}: P_w != sigma^({k})", c.i));
            }
        }
        let zero_end = match c.gap {
            Some(_) => hi,
            None => last,
        };
        for k in first..zero_end {
            if bm.delta[k] != 0 {
                out.diffs.push(format!("i={}: Delta_{k} != 0", c.i));
            }
        }
        if let Some(r) = c.gap {
            let eps = c.eps.get(r - 1).copied().unwrap_or(0);
            if eps == 0 || bm.delta[hi] != eps {
                out.diffs.push(format!("i={}: Delta_{hi} != eps_{r}", c.i));
            }
        }
        out.runs.push((c.i, first, hi));
    }
    out.holds = out.diffs.is_empty();
    out
}

/// Indices k in 1..=d-1 whose σ^{(k)} equals no committed P_{w^{(i)}}.
pub fn unmatched_sigmas(fp: &FpgzTrace, bm: &BmTrace) -> Vec<usize> {
    let ps: Vec<_> = fp.commits.iter().map(|c| poly::reciprocal_from_w(&c.w)).collect();
    (1..bm.sigma.len()).filter(|&k| !ps.iter().any(|p| poly::same(p, &bm.sigma[k]))).collect()
}

/// Run fPGZ and verify-mode BM side by side on one word.
pub fn trace_pair(code: &Code, r: &[Elem]) -> Option<(FpgzTrace, BmTrace)> {
    let f = code.field();
    let s = compute_syndromes(code, r);
    match fpgz_locate(f, &s, code.t) {
        FpgzLocate::Located { trace, .. } => Some((trace, bm_run(f, &s, true))),
        _ => None,
    }
}

struct TrialOut {
    record: TrialRecord,
    ops: Vec<Option<OpCounts>>,
    theta: bool,
}

fn run_one(code: &Code, cfg: &TrialConfig, index: usize) -> Result<TrialOut, HarnessError> {
    let t = code.t;
    let mut rng = trial_rng(cfg.seed, index as u64);
    let max_w = cfg.max_weight.unwrap_or(t).min(code.n);
    let w = if cfg.min_weight >= max_w { max_w } else { rng.random_range(cfg.min_weight..=max_w) };
    let c = code.encode(&code.random_message(&mut rng))?;
    let pat = code.random_errors(w, &mut rng)?;
    let r = apply_errors(&c, &pat);
    let mut results = Vec::with_capacity(cfg.decoders.len());
    let mut ops = Vec::with_capacity(cfg.decoders.len());
    let mut outputs: Vec<Option<Word>> = Vec::new();
    for &dec in &cfg.decoders {
        let got = decode(code, &r, dec, cfg.gates)?;
        let out = got.outcome.output(&r).map(<[Elem]>::to_vec);
        let mut violations = Vec::new();
        let ok = if w <= t {
            out.as_deref() == Some(&c[..])
        } else if cfg.gates {
            match &out {
                None => true,
                Some(o) => code.is_codeword(o) && hamming_distance(o, &r)? <= t,
            }
        } else {
            true
        };
        if let (Some(o), Some(e)) = (&got.ops, got.e) {
            violations.extend(check_counter_bounds(dec.algo, o, t, e));
        }
        if let (Some(ledger), Some(e)) = (&got.ledger, got.e) {
            let algo = match dec.algo {
                Algo::Ppgz => ParallelAlgo::Ppgz,
                Algo::Pbm => ParallelAlgo::Pbm,
                _ => ParallelAlgo::PbmInv,
            };
            if !got.outcome.is_failure() && !matches!(got.outcome, DecodeOutcome::NoError) {
                violations.extend(cost_report(ledger, algo, t, e).violations);
            }
        }
        // the key equation for whatever locator produced a correction
        if let (DecodeOutcome::Corrected { pattern, .. }, true) = (&got.outcome, cfg.gates) {
            let f = code.field();
            let s = compute_syndromes(code, &r);
            let sigma = pattern.positions.iter().fold(vec![1], |acc, &p| {
                poly::mul(f, &acc, &[1, f.alpha_pow(p as i64)])
            });
            let omega = omega_from_sigma(f, &sigma, &s);
            if !key_equation_residual(f, &sigma, &omega, &s, code.d) {
                violations.push(format!("{}: key equation residual", dec.label()));
            }
        }
        ops.push(got.ops);
        outputs.push(out);
        results.push(DecoderResult { decoder: dec.label(), outcome: got.outcome, ok, violations });
    }
    let agree = outputs.windows(2).all(|p| p[0] == p[1]);
    let (mut theorem, mut invariants, mut theta) = (None, None, false);
    if w <= t && w > 0 && (cfg.theorem || cfg.verify) {
        if let Some((fp, bm)) = trace_pair(code, &r) {
            theta = fp.theta().is_some();
            if cfg.theorem {
                theorem = Some(check_comparison_theorem(&fp, &bm).holds);
            }
            if cfg.verify {
                let f = code.field();
                let s = compute_syndromes(code, &r);
                let rows_ok = bm.all_verified();
                // ω^{(d-1)} from the verify log must satisfy the key equation with σ^{(d-1)}
                let omega = omega_from_sigma(f, bm.final_sigma(), &s);
                invariants = Some(rows_ok && key_equation_residual(f, bm.final_sigma(), &omega, &s, code.d));
            }
        }
    } else if cfg.verify && w > 0 {
        let s = compute_syndromes(code, &r);
        invariants = Some(bm_run(code.field(), &s, true).all_verified());
    }
    Ok(TrialOut {
        record: TrialRecord { index, weight: w, positions: pat.positions, agree, theorem, invariants, results },
        ops,
        theta,
    })
}

pub fn run_trials(cfg: &TrialConfig) -> Result<ComparisonReport, HarnessError> {
    run_trials_with(cfg, Exec::default())
}

pub fn run_trials_with(cfg: &TrialConfig, exec: Exec) -> Result<ComparisonReport, HarnessError> {
    let code = cfg.code()?;
    for dec in &cfg.decoders {
        Decoder::new(dec.algo, dec.formula)?;
        if dec.algo == Algo::Ppgz && code.t > crate::parallel::PPGZ_MAX_T {
            return Err(DecodeError::TooLarge(code.t).into());
        }
    }
    if cfg.min_weight > cfg.max_weight.unwrap_or(code.t) {
        return Err(HarnessError::Config("min_weight exceeds max_weight".into()));
    }
    let outs = map_indexed(cfg.trials, exec, |i| run_one(&code, cfg, i));
    let mut rep = ComparisonReport {
        config: cfg.clone(),
        n: code.n,
        t: code.t,
        trials: cfg.trials,
        per_decoder: cfg.decoders.iter().map(|d| (d.label(), DecoderTally::default())).collect(),
        disagreements: 0,
        theorem_checked: 0,
        theorem_failures: 0,
        invariant_checked: 0,
        invariant_failures: 0,
        theta_trials: 0,
        problems: Vec::new(),
        records: Vec::new(),
    };
    let note = |rep: &mut ComparisonReport, msg: String| {
        if rep.problems.len() < MAX_PROBLEMS {
            rep.problems.push(msg);
        }
    };
    for out in outs {
        let out = out?;
        let rec = &out.record;
        if !rec.agree {
            rep.disagreements += 1;
            note(&mut rep, format!("trial {}: decoders disagree", rec.index));
        }
        if let Some(h) = rec.theorem {
            rep.theorem_checked += 1;
            if !h {
                rep.theorem_failures += 1;
                note(&mut rep, format!("trial {}: fPGZ/BM correspondence broken", rec.index));
            }
        }
        if let Some(h) = rec.invariants {
            rep.invariant_checked += 1;
            if !h {
                rep.invariant_failures += 1;
                note(&mut rep, format!("trial {}: BM invariant broken", rec.index));
            }
        }
        rep.theta_trials += out.theta as u64;
        for (res, ops) in rec.results.iter().zip(&out.ops) {
            let tally = rep.per_decoder.get_mut(&res.decoder).expect("decoder tallied");
            match &res.outcome {
                DecodeOutcome::NoError => tally.no_error += 1,
                DecodeOutcome::Corrected { .. } => tally.corrected += 1,
                DecodeOutcome::Failure { reason } => {
                    tally.failures += 1;
                    *tally.failure_reasons.entry(reason.to_string()).or_default() += 1;
                }
            }
            if !res.ok {
                if rec.weight <= rep.t {
                    tally.wrong += 1;
                } else {
                    tally.illegitimate += 1;
                }
            }
            tally.bound_violations += res.violations.len() as u64;
            if let Some(o) = ops {
                let m = &mut tally.ops_max;
                m.mul = m.mul.max(o.mul);
                m.add = m.add.max(o.add);
                m.inv = m.inv.max(o.inv);
                m.div = m.div.max(o.div);
            }
        }
        let bad: Vec<String> = rec
            .results
            .iter()
            .filter(|r| !r.ok || !r.violations.is_empty())
            .map(|r| format!("trial {} {}: ok={} {:?}", rec.index, r.decoder, r.ok, r.violations))
            .collect();
        for b in bad {
            note(&mut rep, b);
        }
        if cfg.keep_records {
            rep.records.push(out.record);
        }
    }
    Ok(rep)
}

// ------------------------------------------------------------------ oracle

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct OracleResult {
    pub distance: usize,
    pub nearest: Vec<Word>,
}

/// Every codeword, by encoding every message. Refuses more than 2^20.
pub fn all_codewords(code: &Code) -> Result<Vec<Word>, HarnessError> {
    let q = code.field().q() as u128;
    let count = q.checked_pow(code.k as u32).unwrap_or(u128::MAX);
    if count > 1 << 20 {
        return Err(HarnessError::SizeLimit(count));
    }
    let q = q as usize;
    let mut out = Vec::with_capacity(count as usize);
    let mut msg = vec![0 as Elem; code.k];
    for _ in 0..count {
        out.push(code.encode(&msg)?);
        for x in msg.iter_mut() {
            *x += 1;
            if (*x as usize) < q {
                break;
            }
            *x = 0;
        }
    }
    Ok(out)
}

/// Minimum-distance codewords of r, by exhaustive enumeration.
pub fn brute_force_oracle_decode(codewords: &[Word], r: &[Elem]) -> OracleResult {
    let mut best = usize::MAX;
    let mut nearest = Vec::new();
    for c in codewords {
        let dist = c.iter().zip(r).filter(|(a, b)| a != b).count();
        if dist < best {
            best = dist;
            nearest.clear();
        }
        if dist == best {
            nearest.push(c.clone());
        }
    }
    OracleResult { distance: best, nearest }
}

/// What a t-bounded-distance decoder must return for r.
pub fn ball_classification(codewords: &[Word], r: &[Elem], t: usize) -> Option<Word> {
    let o = brute_force_oracle_decode(codewords, r);
    (o.distance <= t).then(|| o.nearest[0].clone())
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub t: usize,
    pub codewords: usize,
    pub random_words: usize,
    pub ball_words: usize,
    pub inside: u64,
    pub outside: u64,
    pub decoders: Vec<String>,
    pub mismatches: u64,
    pub examples: Vec<String>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.mismatches == 0
    }
}

/// Every word within distance `radius` of c.
pub fn ball_around(code: &Code, c: &[Elem], radius: usize) -> Vec<Word> {
    fn rec(code: &Code, w: &mut Word, from: usize, left: usize, out: &mut Vec<Word>) {
        out.push(w.clone());
        if left == 0 {
            return;
        }
        for p in from..code.n {
            let orig = w[p];
            for v in 1..code.field().q() as Elem {
                w[p] = orig ^ v;
                rec(code, w, p + 1, left - 1, out);
            }
            w[p] = orig;
        }
    }
    let mut out = Vec::new();
    rec(code, &mut c.to_vec(), 0, radius, &mut out);
    out
}

/// Gated decoders against the exhaustive ball classification on `random`
/// uniform words plus every word within `radius` of `centers` random codewords.
pub fn oracle_sweep(
    code: &Code,
    decoders: &[Decoder],
    random: usize,
    centers: usize,
    radius: usize,
    seed: u64,
    exec: Exec,
) -> Result<OracleReport, HarnessError> {
    let cws = all_codewords(code)?;
    let q = code.field().q() as u32;
    let mut words: Vec<Word> = map_indexed(random, exec, |i| {
        let mut rng = trial_rng(seed, i as u64);
        (0..code.n).map(|_| rng.random_range(0..q) as Elem).collect()
    });
    let mut rng = trial_rng(seed ^ 0x6f72_6163_6c65, 0);
    let mut ball_words = 0;
    for _ in 0..centers {
        let c = &cws[rng.random_range(0..cws.len())];
        let ball = ball_around(code, c, radius);
        ball_words += ball.len();
        words.extend(ball);
    }
    let checks = map_indexed(words.len(), exec, |i| -> Result<(bool, Vec<String>), HarnessError> {
        let r = &words[i];
        let want = ball_classification(&cws, r, code.t);
        let mut bad = Vec::new();
        for &dec in decoders {
            let got = decode(code, r, dec, true)?;
            let out = got.outcome.output(r);
            if out != want.as_deref() {
                bad.push(format!("{} on {:?}: got {:?}, want {:?}", dec.label(), r, got.outcome, want));
            }
        }
        Ok((want.is_some(), bad))
    });
    let mut rep = OracleReport {
        n: code.n,
        t: code.t,
        codewords: cws.len(),
        random_words: random,
        ball_words,
        inside: 0,
        outside: 0,
        decoders: decoders.iter().map(Decoder::label).collect(),
        mismatches: 0,
        examples: Vec::new(),
    };
    for c in checks {
        let (inside, bad) = c?;
        if inside {
            rep.inside += 1;
        } else {
            rep.outside += 1;
        }
        rep.mismatches += bad.len() as u64;
        for b in bad {
            if rep.examples.len() < MAX_PROBLEMS {
                rep.examples.push(b);
            }
        }
    }
    Ok(rep)
}
