//! Command-line front end: argument parsing, budget resolution
//! (flags > config file > environment > defaults), dispatch into the
//! library, and result envelopes.
//!
//! Exit codes: 0 for a definitive verdict or completed run, 2 for an
//! inconclusive analysis (so scripts can branch on "no certificate at
//! budget" without treating it as a failure), 1 for errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cantordiff::decision::{
    critical_bracket, decide_escalating_with_budget, spectral_certificate_with_budget, Bracket,
    BracketBudget, Certificate, Decision, Verdict,
};
use cantordiff::deterministic::{
    decide_deterministic, empty_column_depth, selfcheck, DeterministicDecision,
    DeterministicVerdict, EmptyColumnWitness, SelfCheckReport,
};
use cantordiff::pairing::{check_coloring, three_color_pairing, ColoredPairing};
use cantordiff::simulate::{run_experiment_with_cap, SimulationStats};
use cantordiff::CantorSpec as Spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "cantordiff",
    version,
    about = "Certified decisions about interval existence in differences of random M-adic Cantor sets",
    propagate_version = true
)]
pub struct Cli {
    /// Worker threads for parallel scans (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON config file with budget defaults; explicit flags take
    /// precedence, and the config takes precedence over environment
    /// variables (CANTORDIFF_MAX_ORDER, CANTORDIFF_MAX_WORD_LEN,
    /// CANTORDIFF_TRIALS, CANTORDIFF_LEVELS, CANTORDIFF_SEED,
    /// CANTORDIFF_SURVIVOR_CAP, CANTORDIFF_WORD_BUDGET).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the result (without timings) as JSON to this path; identical
    /// inputs produce byte-identical files.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Print the full result envelope as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Search for an interval/no-interval certificate of a probability
    /// vector: order escalation first, then contracting digit words.
    Analyze {
        /// Selection probabilities, comma separated; the base is the count.
        #[arg(long)]
        p: String,
        /// Probabilities of the second set (defaults to p).
        #[arg(long)]
        q: Option<String>,
        /// Deepest lift order scanned.
        #[arg(long)]
        max_order: Option<u32>,
        /// Longest digit word tried in the spectral search.
        #[arg(long)]
        max_word_len: Option<u32>,
        /// Total enumeration budget in digit words.
        #[arg(long)]
        word_budget: Option<u64>,
    },
    /// Bracket the critical parameter of a one-parameter family such as
    /// 1,0,1,rho between the certified no-interval and interval regimes.
    Bracket {
        /// Template vector; the entry `rho` marks the parameter.
        #[arg(long)]
        family: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        max_order: Option<u32>,
        #[arg(long)]
        max_word_len: Option<u32>,
        #[arg(long)]
        word_budget: Option<u64>,
    },
    /// Exact decision for a 0-1 vector via the reduced matrix semigroup.
    Deterministic {
        /// 0/1 selection pattern, comma separated.
        #[arg(long)]
        p: String,
        /// Deepest level scanned for an empty column witness.
        #[arg(long)]
        empty_column_cap: Option<u32>,
    },
    /// Monte Carlo validation: survival, survivor moments, dimension and
    /// level-1 column statistics.
    Simulate {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
        /// Deepest level sampled.
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write per-level statistics as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Cap on the expected survivor count at the deepest level.
        #[arg(long)]
        survivor_cap: Option<f64>,
    },
    /// Three-color disjoint pairing of odd (R) and even (L) labels.
    Pair {
        /// Odd labels, comma separated.
        #[arg(long)]
        odds: String,
        /// Even labels, comma separated.
        #[arg(long)]
        evens: String,
    },
    /// Exhaustive verification scans: all 2^16 set-map orbits and the
    /// cross-validation of verdicts against column occupancy.
    Selfcheck {
        /// Largest base included in the cross-validation.
        #[arg(long)]
        max_base: Option<u32>,
    },
}

/// Optional budget defaults from `--config`.
#[derive(Debug, Default, Clone, Deserialize)]
pub struct FileConfig {
    pub max_order: Option<u32>,
    pub max_word_len: Option<u32>,
    pub word_budget: Option<u64>,
    pub trials: Option<u64>,
    pub levels: Option<u32>,
    pub seed: Option<u64>,
    pub survivor_cap: Option<f64>,
    pub empty_column_cap: Option<u32>,
    pub max_base: Option<u32>,
    pub threads: Option<usize>,
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Option<T> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

/// Resolution order: explicit flag, then config file, then environment,
/// then the built-in default.
fn resolve<T: Copy>(flag: Option<T>, file: Option<T>, env: Option<T>, default: T) -> T {
    flag.or(file).or(env).unwrap_or(default)
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Timings {
    pub parse_ms: f64,
    pub compute_ms: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct DeterministicPayload {
    pub verdict: DeterministicVerdict,
    pub degenerate: bool,
    /// Level-1 reduction codes the iteration starts from.
    pub initial: Vec<u8>,
    /// Codes of the attractor (the fixed point, for every observed orbit).
    pub attractor: Vec<u8>,
    pub preperiod: u32,
    pub period: u32,
    pub empty_column: Option<EmptyColumnWitness>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PairingPayload {
    pub pairing: ColoredPairing,
    pub violations: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Decision(Decision),
    Bracket(Bracket),
    Deterministic(DeterministicPayload),
    Simulation(SimulationStats),
    Pairing(PairingPayload),
    SelfCheck(SelfCheckReport),
}

/// Everything one invocation produces. Timings are only present on stdout
/// envelopes; file output omits them so identical inputs give identical
/// bytes.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultEnvelope {
    pub version: String,
    pub command: String,
    pub input: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    pub payload: Payload,
}

pub struct CliOutcome {
    pub exit_code: i32,
    pub stdout: String,
}

/// Parses `argv` and runs the command. Returns the rendered stdout text and
/// the process exit code; argument errors surface as `Err` strings.
pub fn execute<I, S>(argv: I) -> Result<CliOutcome, String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let parse_started = Instant::now();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        // Help and version requests are not errors: print and exit 0.
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            return Ok(CliOutcome {
                exit_code: EXIT_OK,
                stdout: e.to_string(),
            })
        }
        Err(e) => return Err(e.to_string()),
    };
    let file_config: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let threads = resolve(
        cli.threads,
        file_config.threads,
        env_parse("CANTORDIFF_THREADS"),
        0, // rayon treats 0 as "available parallelism"
    );
    let parse_ms = parse_started.elapsed().as_secs_f64() * 1e3;

    let compute_started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    let (command, input, payload, exit_code) =
        pool.install(|| dispatch(&cli.command, &file_config))?;
    let compute_ms = compute_started.elapsed().as_secs_f64() * 1e3;

    let mut envelope = ResultEnvelope {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        input,
        timings: Some(Timings {
            parse_ms,
            compute_ms,
        }),
        payload,
    };

    if let Some(path) = &cli.output {
        let timings = envelope.timings.take();
        let mut text = serde_json::to_string_pretty(&envelope).map_err(|e| e.to_string())?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        envelope.timings = timings;
    }

    let stdout = if cli.json {
        let mut s = serde_json::to_string(&envelope).map_err(|e| e.to_string())?;
        s.push('\n');
        s
    } else {
        render_text(&envelope)
    };
    Ok(CliOutcome { exit_code, stdout })
}

type Dispatched = (String, serde_json::Value, Payload, i32);

fn dispatch(command: &Command, file: &FileConfig) -> Result<Dispatched, String> {
    match command {
        Command::Analyze {
            p,
            q,
            max_order,
            max_word_len,
            word_budget,
        } => {
            let spec = Spec::from_csv(p, q.as_deref()).map_err(|e| e.to_string())?;
            let max_order = resolve(
                *max_order,
                file.max_order,
                env_parse("CANTORDIFF_MAX_ORDER"),
                10,
            );
            let max_word_len = resolve(
                *max_word_len,
                file.max_word_len,
                env_parse("CANTORDIFF_MAX_WORD_LEN"),
                6,
            );
            let word_budget = resolve(
                *word_budget,
                file.word_budget,
                env_parse("CANTORDIFF_WORD_BUDGET"),
                100_000_000,
            ) as u128;
            let mut decision = decide_escalating_with_budget(&spec, max_order, word_budget)
                .map_err(|e| e.to_string())?;
            if decision.verdict == Verdict::Inconclusive {
                if let Some(w) = spectral_certificate_with_budget(&spec, max_word_len, word_budget)
                    .map_err(|e| e.to_string())?
                {
                    decision = Decision {
                        verdict: Verdict::NoIntervalAs,
                        certificate: Certificate::SpectralWitness {
                            word: w.word,
                            eigenvalue: w.eigenvalue,
                        },
                    };
                } else {
                    decision.certificate = Certificate::Exhausted {
                        max_order,
                        max_word_len,
                    };
                }
            }
            let exit = if decision.verdict == Verdict::Inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            };
            let input = serde_json::json!({
                "spec": spec,
                "max_order": max_order,
                "max_word_len": max_word_len,
                "word_budget": word_budget as u64,
            });
            Ok(("analyze".into(), input, Payload::Decision(decision), exit))
        }
        Command::Bracket {
            family,
            lo,
            hi,
            tol,
            max_order,
            max_word_len,
            word_budget,
        } => {
            let template =
                cantordiff::decision::FamilyTemplate::parse(family).map_err(|e| e.to_string())?;
            let budget = BracketBudget {
                max_order: resolve(
                    *max_order,
                    file.max_order,
                    env_parse("CANTORDIFF_MAX_ORDER"),
                    10,
                ),
                max_word_len: resolve(
                    *max_word_len,
                    file.max_word_len,
                    env_parse("CANTORDIFF_MAX_WORD_LEN"),
                    6,
                ),
                word_budget: resolve(
                    *word_budget,
                    file.word_budget,
                    env_parse("CANTORDIFF_WORD_BUDGET"),
                    100_000_000,
                ) as u128,
            };
            let bracket =
                critical_bracket(&template, *lo, *hi, *tol, &budget).map_err(|e| e.to_string())?;
            let input = serde_json::json!({
                "family": family,
                "lo": lo,
                "hi": hi,
                "tol": tol,
                "max_order": budget.max_order,
                "max_word_len": budget.max_word_len,
            });
            Ok(("bracket".into(), input, Payload::Bracket(bracket), EXIT_OK))
        }
        Command::Deterministic {
            p,
            empty_column_cap,
        } => {
            let spec = Spec::from_csv(p, None).map_err(|e| e.to_string())?;
            let cap = resolve(
                *empty_column_cap,
                file.empty_column_cap,
                None,
                cantordiff::deterministic::DEFAULT_EMPTY_COLUMN_CAP,
            );
            let decision = decide_deterministic(&spec).map_err(|e| e.to_string())?;
            let witness = empty_column_depth(&spec, cap).map_err(|e| e.to_string())?;
            let input = serde_json::json!({ "spec": spec, "empty_column_cap": cap });
            let payload = deterministic_payload(decision, witness);
            Ok((
                "deterministic".into(),
                input,
                Payload::Deterministic(payload),
                EXIT_OK,
            ))
        }
        Command::Simulate {
            p,
            q,
            levels,
            trials,
            seed,
            csv,
            survivor_cap,
        } => {
            let spec = Spec::from_csv(p, q.as_deref()).map_err(|e| e.to_string())?;
            let levels = resolve(*levels, file.levels, env_parse("CANTORDIFF_LEVELS"), 8);
            let trials = resolve(*trials, file.trials, env_parse("CANTORDIFF_TRIALS"), 10_000);
            let seed = resolve(*seed, file.seed, env_parse("CANTORDIFF_SEED"), 0);
            let survivor_cap = resolve(
                *survivor_cap,
                file.survivor_cap,
                env_parse("CANTORDIFF_SURVIVOR_CAP"),
                cantordiff::simulate::DEFAULT_SURVIVOR_CAP,
            );
            let stats = run_experiment_with_cap(&spec, levels, trials, seed, survivor_cap)
                .map_err(|e| e.to_string())?;
            if let Some(path) = csv {
                std::fs::write(path, stats.to_csv())
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            let input = serde_json::json!({
                "spec": spec,
                "levels": levels,
                "trials": trials,
                "seed": seed,
                "survivor_cap": survivor_cap,
            });
            Ok((
                "simulate".into(),
                input,
                Payload::Simulation(stats),
                EXIT_OK,
            ))
        }
        Command::Pair { odds, evens } => {
            let parse_labels = |csv: &str, what: &str| -> Result<Vec<i64>, String> {
                if csv.trim().is_empty() {
                    return Ok(Vec::new());
                }
                csv.split(',')
                    .map(|tok| {
                        tok.trim()
                            .parse::<i64>()
                            .map_err(|_| format!("cannot parse {what} label {tok:?}"))
                    })
                    .collect()
            };
            let odds = parse_labels(odds, "odd")?;
            let evens = parse_labels(evens, "even")?;
            let pairing = three_color_pairing(&odds, &evens).map_err(|e| e.to_string())?;
            let violations = check_coloring(&odds, &evens, &pairing);
            let exit = if violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_ERROR
            };
            let input = serde_json::json!({ "odds": odds, "evens": evens });
            Ok((
                "pair".into(),
                input,
                Payload::Pairing(PairingPayload {
                    pairing,
                    violations,
                }),
                exit,
            ))
        }
        Command::Selfcheck { max_base } => {
            let max_base = resolve(*max_base, file.max_base, None, 8);
            let report = selfcheck(max_base).map_err(|e| e.to_string())?;
            let exit = if report.passed() { EXIT_OK } else { EXIT_ERROR };
            let input = serde_json::json!({ "max_base": max_base });
            Ok(("selfcheck".into(), input, Payload::SelfCheck(report), exit))
        }
    }
}

fn deterministic_payload(
    decision: DeterministicDecision,
    witness: Option<EmptyColumnWitness>,
) -> DeterministicPayload {
    let cycle_union = decision
        .report
        .cycle_states()
        .iter()
        .fold(0u16, |acc, s| acc | s.mask());
    DeterministicPayload {
        verdict: decision.verdict,
        degenerate: decision.degenerate,
        initial: decision.initial.codes(),
        attractor: cantordiff::deterministic::MatrixSet::from_mask(cycle_union).codes(),
        preperiod: decision.report.preperiod,
        period: decision.report.period,
        empty_column: witness,
    }
}

fn render_text(envelope: &ResultEnvelope) -> String {
    let mut out = String::new();
    match &envelope.payload {
        Payload::Decision(d) => {
            out.push_str(&format!("verdict: {}\n", verdict_name(d.verdict)));
            out.push_str(&format!(
                "certificate: {}\n",
                certificate_text(&d.certificate)
            ));
        }
        Payload::Bracket(b) => {
            out.push_str(&format!(
                "critical parameter bracket: ({}, {})  [{}]\n",
                b.lo, b.hi, b.assumption
            ));
            out.push_str(&format!(
                "  lo certificate: {}\n",
                certificate_text(&b.lo_certificate)
            ));
            out.push_str(&format!(
                "  hi certificate: {}\n",
                certificate_text(&b.hi_certificate)
            ));
            out.push_str(&format!(
                "  effort: orders <= {}, words <= {}, {} evaluations\n",
                b.effort.max_order, b.effort.max_word_len, b.effort.evaluations
            ));
        }
        Payload::Deterministic(d) => {
            out.push_str(&format!(
                "verdict: {}\n",
                match d.verdict {
                    DeterministicVerdict::Interval => "Interval",
                    DeterministicVerdict::NoInterval => "NoInterval",
                }
            ));
            if d.degenerate {
                out.push_str("  (degenerate: fewer than two selected digits)\n");
            }
            out.push_str(&format!(
                "initial: {}\nattractor: {} (preperiod {}, period {})\n",
                codes_text(&d.initial),
                codes_text(&d.attractor),
                d.preperiod,
                d.period
            ));
            match &d.empty_column {
                Some(w) => out.push_str(&format!(
                    "empty column: level {}, index {} (digits {:?})\n",
                    w.level, w.index, w.digits
                )),
                None => out.push_str("empty column: none found within the scan cap\n"),
            }
        }
        Payload::Simulation(s) => {
            out.push_str(&format!(
                "trials: {}, base: {}, levels: {}, seed: {}\n",
                s.trials, s.base, s.levels, s.seed
            ));
            out.push_str(&s.to_csv());
            if let Some(d) = s.dimension_estimate {
                out.push_str(&format!("dimension estimate (final level): {d}\n"));
            }
        }
        Payload::Pairing(p) => {
            for c in &p.pairing.couples {
                out.push_str(&format!(
                    "({}, {})  {}\n",
                    c.even,
                    c.odd,
                    match c.color {
                        Some(color) => format!("{color:?}"),
                        None => "uncolored".into(),
                    }
                ));
            }
            for v in &p.violations {
                out.push_str(&format!("violation: {v}\n"));
            }
            if p.pairing.couples.is_empty() {
                out.push_str("no couples formed\n");
            }
        }
        Payload::SelfCheck(r) => {
            out.push_str(&format!(
                "attractor scan: {} starts, all periods one: {}, max preperiod: {}\n",
                r.attractor_scan.starts,
                r.attractor_scan.all_periods_one,
                r.attractor_scan.max_preperiod
            ));
            out.push_str(&format!(
                "cross-validation (bases 2..={}): {} vectors, verdicts consistent: {}, case analysis consistent: {}\n",
                r.cross_validation.max_base,
                r.cross_validation.vectors_checked,
                r.cross_validation.verdicts_consistent,
                r.cross_validation.case_analysis_consistent
            ));
            for f in &r.cross_validation.failures {
                out.push_str(&format!("failure: {f}\n"));
            }
        }
    }
    out
}

fn codes_text(codes: &[u8]) -> String {
    if codes.is_empty() {
        return "{}".into();
    }
    let names: Vec<String> = codes.iter().map(|c| format!("T{c}")).collect();
    format!("{{{}}}", names.join(", "))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::IntervalAs => "IntervalAS",
        Verdict::NoIntervalAs => "NoIntervalAS",
        Verdict::Inconclusive => "Inconclusive",
    }
}

fn certificate_text(c: &Certificate) -> String {
    match c {
        Certificate::AllGammaAboveOne { order, min_gamma } => {
            format!("all order-{order} correlation values exceed 1 (minimum {min_gamma})")
        }
        Certificate::ConsecutiveGammaBelowOne {
            order,
            column,
            values,
        } => format!(
            "order-{order} values at columns {column} and {} are {} and {}, both below 1",
            column + 1,
            values.0,
            values.1
        ),
        Certificate::SpectralWitness { word, eigenvalue } => {
            format!("digit word {word:?} has eigenvalue {eigenvalue} < 1")
        }
        Certificate::Exhausted {
            max_order,
            max_word_len,
        } => format!("no certificate up to order {max_order} and word length {max_word_len}"),
    }
}
