use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rslab::bm::bm_decode_traced;
use rslab::harness::{self, Exec, TrialConfig};
use rslab::keyeq::{compute_syndromes, DecodeOutcome};
use rslab::parallel::{self, cost_report, ParallelAlgo};
use rslab::pgz::{fpgz_decode_traced, FpgzLocate};
use rslab::rscode::{apply_errors, format_word, parse_word, Code, ErrorPattern};
use rslab::{decode, poly, Algo, Decoder, Field, ValueFormula};

#[derive(Parser)]
#[command(name = "rs-lab", version, about = "Reed-Solomon decoding lab over GF(2^m)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// extension degree, 2..=16
    #[arg(long, default_value_t = 4)]
    m: u32,
    /// field modulus in hex (default: a fixed primitive polynomial per m)
    #[arg(long)]
    poly: Option<String>,
    /// code length; must be 2^m - 1 if given
    #[arg(long)]
    n: Option<usize>,
    /// designed distance
    #[arg(long, default_value_t = 9)]
    d: usize,
    /// root offset: syndromes at α^l .. α^{l+d-2}
    #[arg(long, default_value_t = 1)]
    l: usize,
}

impl CodeArgs {
    fn modulus(&self) -> Result<Option<u32>> {
        self.poly
            .as_deref()
            .map(|p| u32::from_str_radix(p.trim_start_matches("0x"), 16).context("--poly is not hex"))
            .transpose()
    }

    fn field(&self) -> Result<Field> {
        Ok(match self.modulus()? {
            Some(p) => Field::new(self.m, p)?,
            None => Field::with_default_modulus(self.m)?,
        })
    }

    fn code(&self) -> Result<Code> {
        let f = self.field()?;
        if let Some(n) = self.n {
            if n != f.order() {
                bail!("--n {n} does not match q-1 = {}", f.order());
            }
        }
        Ok(Code::new(Arc::new(f), self.d, self.l)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a field's parameters and tables
    GenField {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Systematically encode a message (hex symbols), or a random one
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        msg: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Add an error pattern to a word
    Corrupt {
        #[command(flatten)]
        code: CodeArgs,
        /// the word (hex symbols, x^0 first); stdin if omitted
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 1)]
        weight: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// explicit positions, comma separated (overrides --weight)
        #[arg(long, value_delimiter = ',')]
        positions: Vec<usize>,
        /// explicit values in hex, comma separated
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
    },
    /// Decode one received word
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value = "bm")]
        algo: String,
        /// value formula (default: the decoder's own)
        #[arg(long)]
        values: Option<String>,
        #[arg(long, value_enum, default_value = "on")]
        gates: OnOff,
        /// include the locator trace
        #[arg(long)]
        trace: bool,
        /// run BM with the invariant checks on
        #[arg(long)]
        verify: bool,
        /// use the inversionless variant of bm / pbm
        #[arg(long)]
        inversionless: bool,
    },
    /// Seeded channel trials; with --report, the parallel cost ledgers too
    Bench {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        trial: TrialArgs,
        /// write parallel cost rows here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run every decoder on the same seeded words and cross-check them
    Compare {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        trial: TrialArgs,
        /// keep per-trial records in the report
        #[arg(long)]
        records: bool,
    },
    /// Check gated decoders against exhaustive nearest-codeword search
    Oracle {
        /// extension degree; exhaustive search needs q^k small
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 5)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 50_000)]
        random: usize,
        #[arg(long, default_value_t = 20)]
        centers: usize,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct TrialArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// fixed error weight (default: uniform in 0..=t)
    #[arg(long)]
    weight: Option<usize>,
    #[arg(long, value_enum, default_value = "on")]
    gates: OnOff,
    /// run trials in a plain loop instead of the worker pool
    #[arg(long)]
    sequential: bool,
}

impl TrialArgs {
    fn config(&self, code: &CodeArgs) -> Result<TrialConfig> {
        let mut cfg = TrialConfig::new(code.m, code.d, self.trials, self.seed);
        cfg.modulus = code.modulus()?;
        cfg.l = code.l;
        if let Some(w) = self.weight {
            cfg.min_weight = w;
            cfg.max_weight = Some(w);
        }
        cfg.gates = matches!(self.gates, OnOff::On);
        let t = (code.d - 1) / 2;
        if t > parallel::PPGZ_MAX_T {
            cfg.decoders.retain(|d| d.algo != Algo::Ppgz);
        }
        Ok(cfg)
    }
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

fn read_word(arg: &Option<String>) -> Result<Vec<u16>> {
    let text = match arg {
        Some(w) => w.clone(),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    parse_word(&text).context("word must be hex symbols separated by spaces")
}

fn print(v: &Value) {
    use std::io::Write;
    // a closed pipe (`| head`) is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::GenField { code } => {
            let f = code.field()?;
            let exp: Vec<u16> = (0..f.order() as i64).map(|k| f.alpha_pow(k)).collect();
            let log: Vec<Option<u32>> = (0..f.q() as u16).map(|a| f.log(a)).collect();
            print(&json!({ "field": f.descriptor(), "q": f.q(), "exp": exp, "log": log }));
            Ok(true)
        }
        Cmd::Encode { code, msg, seed } => {
            let c = code.code()?;
            let msg = match msg {
                Some(m) => parse_word(&m)?,
                None => c.random_message(&mut ChaCha8Rng::seed_from_u64(seed)),
            };
            let cw = c.encode(&msg)?;
            print(&json!({
                "n": c.n, "k": c.k, "d": c.d, "t": c.t,
                "generator": format_word(&c.g),
                "message": format_word(&msg),
                "codeword": format_word(&cw),
            }));
            Ok(true)
        }
        Cmd::Corrupt { code, word, weight, seed, positions, values } => {
            let c = code.code()?;
            let w = read_word(&word)?;
            c.check_word(&w)?;
            let pat = if positions.is_empty() {
                c.random_errors(weight, &mut ChaCha8Rng::seed_from_u64(seed))?
            } else {
                let vals: Vec<u16> = if values.is_empty() {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    positions.iter().map(|_| rng.random_range(1..c.field().q() as u16)).collect()
                } else {
                    values.iter().map(|v| u16::from_str_radix(v.trim_start_matches("0x"), 16)).collect::<Result<_, _>>()?
                };
                let mut pv: Vec<(usize, u16)> = positions.into_iter().zip(vals).collect();
                pv.sort_unstable();
                let (p, v) = pv.into_iter().unzip();
                ErrorPattern::new(p, v, c.n)?
            };
            let r = apply_errors(&w, &pat);
            print(&json!({ "pattern": pat, "received": format_word(&r) }));
            Ok(true)
        }
        Cmd::Decode { code, word, algo, values, gates, trace, verify, inversionless } => {
            let c = code.code()?;
            let r = read_word(&word)?;
            c.check_word(&r)?;
            let mut algo: Algo = algo.parse().map_err(anyhow::Error::msg)?;
            if inversionless {
                algo = algo.inversionless().with_context(|| format!("{algo} has no inversionless variant"))?;
            }
            let formula = match values {
                Some(v) => v.parse::<ValueFormula>().map_err(anyhow::Error::msg)?,
                None => algo.default_formula(),
            };
            let dec = Decoder::new(algo, formula)?;
            let gated = matches!(gates, OnOff::On);
            let got = decode(&c, &r, dec, gated)?;
            let f = c.field();
            let mut violations: Vec<String> = Vec::new();
            let mut out = json!({
                "decoder": dec.label(),
                "gates": gated,
                "syndromes": format_word(compute_syndromes(&c, &r).as_slice()),
                "outcome": got.outcome,
            });
            if let Some(o) = got.outcome.output(&r) {
                out["output"] = json!(format_word(o));
            }
            if let (Some(ops), Some(e)) = (got.ops, got.e) {
                violations.extend(harness::check_counter_bounds(algo, &ops, c.t, e));
                out["ops"] = json!(ops);
                out["e"] = json!(e);
            }
            if let (Some(ledger), Some(e)) = (&got.ledger, got.e) {
                let pa = match algo {
                    Algo::Ppgz => ParallelAlgo::Ppgz,
                    Algo::Pbm => ParallelAlgo::Pbm,
                    _ => ParallelAlgo::PbmInv,
                };
                let rep = cost_report(ledger, pa, c.t, e);
                if matches!(got.outcome, DecodeOutcome::Corrected { .. }) {
                    violations.extend(rep.violations.iter().cloned());
                }
                out["costs"] = json!(rep);
            }
            if trace || verify {
                match algo {
                    Algo::Fpgz | Algo::Pgz => {
                        if let (_, FpgzLocate::Located { trace, .. }) = fpgz_decode_traced(&c, &r, gated, formula) {
                            out["trace"] = json!({ "fpgz": trace, "sigma": poly::fmt(f, &trace.sigma()) });
                        }
                    }
                    Algo::Bm | Algo::BmInv | Algo::Pbm | Algo::PbmInv => {
                        let inv = matches!(algo, Algo::BmInv | Algo::PbmInv);
                        let bm = bm_decode_traced(&c, &r, gated, if inv { ValueFormula::Tau } else { ValueFormula::Forney }, inv, verify && !inv);
                        if let Some(tr) = bm.trace {
                            if verify && !inv && !tr.all_verified() {
                                violations.push("bm invariant check failed".into());
                            }
                            let sig: Vec<String> = tr.sigma.iter().map(|p| poly::fmt(f, p)).collect();
                            out["trace"] = json!({ "bm": tr, "sigma": sig });
                        }
                    }
                    Algo::Ppgz => {}
                }
            }
            out["violations"] = json!(violations);
            print(&out);
            Ok(violations.is_empty())
        }
        Cmd::Bench { code, trial, report } => {
            let cfg = trial.config(&code)?;
            let start = std::time::Instant::now();
            let rep = harness::run_trials_with(&cfg, trial.exec())?;
            let elapsed = start.elapsed().as_secs_f64();
            let mut ok = rep.ok();
            if let Some(path) = report {
                let c = cfg.code()?;
                let rows = cost_rows(&c, &cfg, trial.exec())?;
                ok &= rows.iter().all(|r| r["violations"].as_array().is_some_and(Vec::is_empty));
                std::fs::write(&path, serde_json::to_string_pretty(&rows)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            print(&json!({
                "trials": rep.trials,
                "seconds": elapsed,
                "threads": harness::worker_threads(),
                "violations": rep.violations(),
                "problems": rep.problems,
                "per_decoder": rep.per_decoder,
            }));
            Ok(ok)
        }
        Cmd::Compare { code, trial, records } => {
            let mut cfg = trial.config(&code)?;
            cfg.keep_records = records;
            let rep = harness::run_trials_with(&cfg, trial.exec())?;
            print(&json!(rep));
            Ok(rep.ok())
        }
        Cmd::Oracle { m, poly, d, l, random, centers, radius, seed } => {
            let c = CodeArgs { m, poly, n: None, d, l }.code()?;
            let decs: Vec<Decoder> = Decoder::all().into_iter().filter(|d| d.algo != Algo::Ppgz || c.t <= parallel::PPGZ_MAX_T).collect();
            let rep = harness::oracle_sweep(&c, &decs, random, centers, radius, seed, Exec::Parallel)?;
            print(&json!(rep));
            Ok(rep.ok())
        }
    }
}

/// One cost row per (parallel decoder, trial) that corrected something.
fn cost_rows(c: &Code, cfg: &TrialConfig, exec: Exec) -> Result<Vec<Value>> {
    let rows = harness::map_indexed(cfg.trials, exec, |i| {
        let mut rng = harness::trial_rng(cfg.seed, i as u64);
        let max_w = cfg.max_weight.unwrap_or(c.t);
        let w = if cfg.min_weight >= max_w { max_w } else { rng.random_range(cfg.min_weight..=max_w) };
        let cw = c.encode(&c.random_message(&mut rng)).expect("message length");
        let r = apply_errors(&cw, &c.random_errors(w, &mut rng).expect("weight <= n"));
        let mut out = Vec::new();
        let algos: &[(Algo, ParallelAlgo)] = if c.t <= parallel::PPGZ_MAX_T {
            &[(Algo::Ppgz, ParallelAlgo::Ppgz), (Algo::Pbm, ParallelAlgo::Pbm), (Algo::PbmInv, ParallelAlgo::PbmInv)]
        } else {
            &[(Algo::Pbm, ParallelAlgo::Pbm), (Algo::PbmInv, ParallelAlgo::PbmInv)]
        };
        for &(algo, pa) in algos {
            let got = decode(c, &r, Decoder { algo, formula: ValueFormula::Native }, cfg.gates).expect("valid word");
            if let (Some(ledger), Some(e), DecodeOutcome::Corrected { .. }) = (&got.ledger, got.e, &got.outcome) {
                out.push(json!(cost_report(ledger, pa, c.t, e)));
            }
        }
        out
    });
    Ok(rows.into_iter().flatten().collect())
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
