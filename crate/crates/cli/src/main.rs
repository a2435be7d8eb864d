use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cim_core::{
    build_q, build_r, build_u, build_v, canonical_word_ci, canonical_word_oci, ci_size,
    defines_with_caps, derive_q, derive_v, generators, oci_generating_family, oci_size,
    oci_size_variant, standard_assignment, Error, Family, FpCaps, MonoidTable, PartialPerm,
    Presentation, RankOptions, Word,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sizes above this skip the enumeration cross-check in `sizes`.
const ENUMERATION_CAP: u32 = 10;
/// Rank-search budgets per family; beyond them the search is refused
/// rather than left to run unbounded.
const RANK_BUDGET_CI: u32 = 6;
const RANK_BUDGET_OCI: u32 = 5;
const RANK_BUDGET_CN: u32 = 12;

#[derive(Parser)]
#[command(
    name = "cim",
    version,
    about = "Cyclic inverse monoids: enumeration, ranks, presentations, derivations"
)]
struct Cli {
    /// Emit a machine-readable JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Element counts: closed formulas against enumeration, for both families.
    Sizes {
        /// Largest ground-set size to tabulate.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=12))]
        max_n: u32,
        /// Emit the table as CSV.
        #[arg(long)]
        csv: bool,
        /// Worker threads for the per-n enumerations.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=32))]
        jobs: u32,
    },
    /// Check a presentation against the monoid it names.
    Verify {
        /// Presentation family.
        family: PresFamily,
        /// Ground-set size.
        #[arg(long)]
        n: u32,
        /// Also enumerate the presented quotient and compare cardinalities.
        #[arg(long)]
        fp: bool,
    },
    /// Minimal generating set search with a refutation certificate.
    Rank {
        family: RankFamily,
        #[arg(long)]
        n: u32,
        /// Restrict candidates to elements with image size n-1 (cross-checked
        /// against the unpruned search on small instances).
        #[arg(long)]
        prune: bool,
    },
    /// Canonical word of an element, with the round-trip evaluation echoed.
    Nf {
        family: NfFamily,
        #[arg(long)]
        n: u32,
        /// Element literal like "[3>1 4>2]" ("[]" is the empty map), or a
        /// word like "g^2 e3 e4" ("1" is the empty word).
        input: String,
    },
    /// Run a presentation derivation and compare it with its reference.
    Tietze {
        /// Seed presentation to transform.
        #[arg(long)]
        from: SeedFamily,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "UPPER")]
enum PresFamily {
    #[value(alias = "r")]
    R,
    #[value(alias = "q")]
    Q,
    #[value(alias = "u")]
    U,
    #[value(alias = "v")]
    V,
}

impl PresFamily {
    fn name(self) -> &'static str {
        match self {
            PresFamily::R => "R",
            PresFamily::Q => "Q",
            PresFamily::U => "U",
            PresFamily::V => "V",
        }
    }

    fn build(self, n: u32) -> Result<Presentation, Error> {
        match self {
            PresFamily::R => build_r(n),
            PresFamily::Q => build_q(n),
            PresFamily::U => build_u(n),
            PresFamily::V => build_v(n),
        }
    }

    fn target(self, n: u32) -> Result<MonoidTable, Error> {
        match self {
            PresFamily::R | PresFamily::Q => {
                MonoidTable::enumerate(&generators(Family::CiMin, n)?.perms())
            }
            PresFamily::U | PresFamily::V => {
                MonoidTable::enumerate(&oci_generating_family(n)?.perms())
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RankFamily {
    Ci,
    Oci,
    Cn,
}

#[derive(Clone, Copy, ValueEnum)]
enum NfFamily {
    Ci,
    Oci,
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`cim sizes | head`) instead of
    // panicking in `println!`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code_for(&e);
            if cli.json {
                let report = json!({
                    "command": command_name(&cli.command),
                    "error": e.to_string(),
                    "error_detail": error_detail(&e),
                    "version": VERSION,
                });
                println!("{}", pretty(&report));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Sizes { max_n, csv, jobs } => cmd_sizes(cli, *max_n, *csv, *jobs),
        Command::Verify { family, n, fp } => cmd_verify(cli, *family, *n, *fp),
        Command::Rank { family, n, prune } => cmd_rank(cli, *family, *n, *prune),
        Command::Nf { family, n, input } => cmd_nf(cli, *family, *n, input),
        Command::Tietze { from, n } => cmd_tietze(cli, *from, *n),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Sizes { .. } => "sizes",
        Command::Verify { .. } => "verify",
        Command::Rank { .. } => "rank",
        Command::Nf { .. } => "nf",
        Command::Tietze { .. } => "tietze",
    }
}

/// Stable contract: 0 pass, 1 failed verdict, 2 usage/parameters, 3
/// budget/cap exhausted, 4 membership (element outside the family).
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. }
        | Error::SearchCapExceeded { .. }
        | Error::IncompleteEnumeration { .. } => 3,
        Error::NotAnElement { .. }
        | Error::NotARestriction { .. }
        | Error::NotOrderPreserving { .. }
        | Error::AmbiguousExtension => 4,
        _ => 2,
    }
}

fn error_detail(e: &Error) -> Value {
    match e {
        Error::IncompleteEnumeration {
            live_states,
            steps,
            max_states,
            max_steps,
        } => json!({
            "kind": "incomplete-enumeration",
            "live_states": live_states,
            "steps": steps,
            "max_states": max_states,
            "max_steps": max_steps,
        }),
        Error::SearchCapExceeded { lower, upper } => json!({
            "kind": "search-cap-exceeded",
            "rank_at_least": lower,
            "rank_at_most": upper,
        }),
        Error::CapExceeded { cap } => json!({"kind": "cap-exceeded", "cap": cap}),
        _ => json!({"kind": "invalid-input"}),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("reports are valid JSON")
}

struct Stopwatch {
    steps: Vec<(String, f64)>,
}

impl Stopwatch {
    fn new() -> Self {
        Stopwatch { steps: Vec::new() }
    }

    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.steps.push((label.to_string(), start.elapsed().as_secs_f64()));
        out
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.steps
                .iter()
                .map(|(step, seconds)| json!({"step": step, "seconds": seconds}))
                .collect(),
        )
    }
}

fn report(command: &str, params: Value, results: Value, watch: &Stopwatch) -> Value {
    json!({
        "command": command,
        "params": params,
        "results": results,
        "timings": watch.to_json(),
        "version": VERSION,
    })
}

/// Fp caps sized for the expected quotient, with the optional
/// `CIM_MAX_STATES` environment override.
fn fp_caps(expected: usize) -> Result<FpCaps, Error> {
    let mut caps = FpCaps::for_expected(expected);
    if let Ok(raw) = std::env::var("CIM_MAX_STATES") {
        caps.max_states = raw
            .parse()
            .map_err(|_| Error::Parse(format!("CIM_MAX_STATES must be a positive integer, got {raw:?}")))?;
    }
    Ok(caps)
}

struct SizeRow {
    n: u32,
    ci_formula: u64,
    ci_enumerated: Option<u64>,
    oci_formula: u64,
    oci_closure: Option<u64>,
    oci_filter: Option<u64>,
    variant_formula: u64,
}

impl SizeRow {
    fn compute(n: u32) -> Result<SizeRow, Error> {
        let mut row = SizeRow {
            n,
            ci_formula: ci_size(n),
            ci_enumerated: None,
            oci_formula: oci_size(n),
            oci_closure: None,
            oci_filter: None,
            variant_formula: oci_size_variant(n),
        };
        if n <= ENUMERATION_CAP {
            let ci = MonoidTable::enumerate(&generators(Family::CiMin, n)?.perms())?;
            row.ci_enumerated = Some(ci.size() as u64);
            let closure = MonoidTable::enumerate(&oci_generating_family(n)?.perms())?;
            row.oci_closure = Some(closure.size() as u64);
            row.oci_filter = Some(
                ci.elements()
                    .iter()
                    .filter(|p| p.is_order_preserving())
                    .count() as u64,
            );
        }
        Ok(row)
    }

    fn ci_ok(&self) -> Option<bool> {
        self.ci_enumerated.map(|e| e == self.ci_formula)
    }

    fn oci_ok(&self) -> Option<bool> {
        match (self.oci_closure, self.oci_filter) {
            (Some(c), Some(f)) => Some(c == self.oci_formula && f == self.oci_formula),
            _ => None,
        }
    }

    /// The off-by-one variant of the order-preserving count; expected to
    /// disagree with the enumerated value at every n.
    fn variant_consistent(&self) -> Option<bool> {
        self.oci_closure.map(|c| c == self.variant_formula)
    }

    fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "ci_formula": self.ci_formula,
            "ci_enumerated": self.ci_enumerated,
            "ci_ok": self.ci_ok(),
            "oci_formula": self.oci_formula,
            "oci_closure": self.oci_closure,
            "oci_filter": self.oci_filter,
            "oci_ok": self.oci_ok(),
            "variant_formula": self.variant_formula,
            "variant_consistent": self.variant_consistent(),
        })
    }
}

fn cmd_sizes(cli: &Cli, max_n: u32, csv: bool, jobs: u32) -> Result<ExitCode, Error> {
    if csv && cli.json {
        return Err(Error::Parse("--csv and --json are mutually exclusive".into()));
    }
    let mut watch = Stopwatch::new();
    let rows = watch.time("enumerate", || -> Result<Vec<SizeRow>, Error> {
        let slots: Vec<Mutex<Option<Result<SizeRow, Error>>>> =
            (0..max_n).map(|_| Mutex::new(None)).collect();
        let next = AtomicU32::new(1);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let n = next.fetch_add(1, Ordering::Relaxed);
                    if n > max_n {
                        break;
                    }
                    let row = SizeRow::compute(n);
                    *slots[(n - 1) as usize].lock().expect("no panics hold this lock") =
                        Some(row);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().expect("no panics hold this lock").expect("every n was claimed"))
            .collect()
    })?;

    let all_ok = rows
        .iter()
        .all(|r| r.ci_ok() != Some(false) && r.oci_ok() != Some(false));
    if cli.json {
        let results = json!({
            "rows": rows.iter().map(SizeRow::to_json).collect::<Vec<_>>(),
            "all_ok": all_ok,
        });
        let params = json!({"max_n": max_n, "jobs": jobs});
        println!("{}", pretty(&report("sizes", params, results, &watch)));
    } else if csv {
        let cell = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let flag = |v: Option<bool>| v.map(|x| x.to_string()).unwrap_or_default();
        println!(
            "n,ci_formula,ci_enumerated,ci_ok,oci_formula,oci_closure,oci_filter,oci_ok,variant_formula,variant_consistent"
        );
        for r in &rows {
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.ci_formula,
                cell(r.ci_enumerated),
                flag(r.ci_ok()),
                r.oci_formula,
                cell(r.oci_closure),
                cell(r.oci_filter),
                flag(r.oci_ok()),
                r.variant_formula,
                flag(r.variant_consistent()),
            );
        }
    } else {
        println!(
            "{:>3}  {:>11}  {:>11}  {:>4}  {:>11}  {:>11}  {:>11}  {:>4}  {:>11}  {}",
            "n",
            "ci formula",
            "ci enum",
            "ci",
            "oci formula",
            "oci closure",
            "oci filter",
            "oci",
            "variant",
            "variant status"
        );
        for r in &rows {
            let cell = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
            let verdict = |v: Option<bool>| match v {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "-",
            };
            let variant = match r.variant_consistent() {
                Some(false) => "inconsistent",
                Some(true) => "consistent",
                None => "-",
            };
            println!(
                "{:>3}  {:>11}  {:>11}  {:>4}  {:>11}  {:>11}  {:>11}  {:>4}  {:>11}  {}",
                r.n,
                r.ci_formula,
                cell(r.ci_enumerated),
                verdict(r.ci_ok()),
                r.oci_formula,
                cell(r.oci_closure),
                cell(r.oci_filter),
                verdict(r.oci_ok()),
                r.variant_formula,
                variant,
            );
        }
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify(cli: &Cli, family: PresFamily, n: u32, fp: bool) -> Result<ExitCode, Error> {
    let mut watch = Stopwatch::new();
    let p = family.build(n)?;
    let phi = standard_assignment(p.alphabet(), n)?;
    let satisfaction = watch.time("satisfaction", || phi.satisfies(&p))?;

    let mut defines_json = Value::Null;
    let mut defines_ok = None;
    let mut cap_error: Option<Error> = None;
    if fp {
        let target = watch.time("target", || family.target(n))?;
        let caps = fp_caps(target.size())?;
        match watch.time("fp", || defines_with_caps(&p, &phi, &target, caps)) {
            Ok(verdict) => {
                defines_ok = Some(verdict.holds);
                defines_json = verdict.to_json();
            }
            Err(e @ Error::IncompleteEnumeration { .. }) => {
                defines_json = json!({"error": e.to_string(), "error_detail": error_detail(&e)});
                cap_error = Some(e);
            }
            Err(e) => return Err(e),
        }
    }

    let results = json!({
        "family": family.name(),
        "n": n,
        "presentation": p.name(),
        "alphabet": p.alphabet().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "relations": p.relations().len(),
        "satisfaction": satisfaction.to_json(),
        "defines": defines_json,
    });
    if cli.json {
        let params = json!({"family": family.name(), "n": n, "fp": fp});
        println!("{}", pretty(&report("verify", params, results, &watch)));
    } else {
        println!(
            "presentation {}: {} relations on {} letters",
            p.name(),
            p.relations().len(),
            p.alphabet().len()
        );
        match &satisfaction.failure {
            None => println!("satisfaction: pass ({} relations hold)", satisfaction.checked),
            Some(f) => println!(
                "satisfaction: FAIL at {} ({} = {} evaluates {} vs {})",
                f.tag, f.lhs, f.rhs, f.lhs_value, f.rhs_value
            ),
        }
        if fp {
            match (&cap_error, defines_ok) {
                (Some(e), _) => println!("defines: INCOMPLETE ({e})"),
                (None, Some(ok)) => {
                    let d = &defines_json;
                    println!(
                        "defines: {} (quotient {}, target {})",
                        if ok { "pass" } else { "FAIL" },
                        d["quotient_size"],
                        d["target_size"]
                    );
                }
                (None, None) => unreachable!("fp ran"),
            }
        }
    }
    if let Some(e) = cap_error {
        return Ok(ExitCode::from(exit_code_for(&e)));
    }
    let pass = satisfaction.ok && defines_ok.unwrap_or(true);
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_rank(cli: &Cli, family: RankFamily, n: u32, prune: bool) -> Result<ExitCode, Error> {
    let (name, budget) = match family {
        RankFamily::Ci => ("ci", RANK_BUDGET_CI),
        RankFamily::Oci => ("oci", RANK_BUDGET_OCI),
        RankFamily::Cn => ("cn", RANK_BUDGET_CN),
    };
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    if n > budget {
        let message =
            format!("rank search for {name} is budgeted up to n = {budget}; got n = {n}");
        if cli.json {
            let out = json!({
                "command": "rank",
                "params": {"family": name, "n": n, "prune": prune},
                "error": message,
                "error_detail": {"kind": "budget-exceeded", "max_n": budget},
                "version": VERSION,
            });
            println!("{}", pretty(&out));
        } else {
            eprintln!("error: {message}");
        }
        return Ok(ExitCode::from(3));
    }

    let mut watch = Stopwatch::new();
    let table = watch.time("enumerate", || -> Result<MonoidTable, Error> {
        let gens = match family {
            RankFamily::Ci => generators(Family::CiMin, n)?,
            RankFamily::Oci => oci_generating_family(n)?,
            RankFamily::Cn => generators(Family::Cn, n)?,
        };
        MonoidTable::enumerate(&gens.perms())
    })?;
    let opts = RankOptions {
        prune_image_size: if prune { Some(n.saturating_sub(1)) } else { None },
        ..RankOptions::default()
    };
    let cert = watch.time("search", || table.rank(&opts))?;
    let witness: Vec<String> = cert
        .witness
        .iter()
        .map(|&i| table.element(i).map_text())
        .collect();

    let results = json!({
        "family": name,
        "n": n,
        "size": table.size(),
        "rank": cert.rank,
        "witness": witness,
        "refuted_below": cert.refuted_below,
        "pruned": cert.pruned,
        "cross_validated": cert.cross_validated,
        "subsets_tested": cert.subsets_tested,
    });
    if cli.json {
        let params = json!({"family": name, "n": n, "prune": prune});
        println!("{}", pretty(&report("rank", params, results, &watch)));
    } else {
        println!("rank({name}, n={n}) = {}", cert.rank);
        println!("witness: {}", witness.join(", "));
        println!(
            "refuted below size {} ({} subsets tested{}{})",
            cert.refuted_below,
            cert.subsets_tested,
            if cert.pruned { ", pruned" } else { "" },
            if cert.cross_validated {
                ", cross-validated"
            } else {
                ""
            },
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_nf(cli: &Cli, family: NfFamily, n: u32, input: &str) -> Result<ExitCode, Error> {
    let mut watch = Stopwatch::new();
    let trimmed = input.trim();
    let element = if trimmed.starts_with('[') {
        PartialPerm::parse_map(trimmed, n)?
    } else {
        let word: Word = trimmed.parse()?;
        evaluate_over_standard_generators(&word, n)?
    };
    let (name, word) = match family {
        NfFamily::Ci => ("ci", watch.time("canonical", || canonical_word_ci(&element))?),
        NfFamily::Oci => ("oci", watch.time("canonical", || canonical_word_oci(&element))?),
    };
    let round_trip = evaluate_over_standard_generators(&word, n)?;
    let ok = round_trip == element;

    let results = json!({
        "family": name,
        "n": n,
        "input": input,
        "element": element.map_text(),
        "word": word.to_string(),
        "round_trip": round_trip.map_text(),
        "round_trip_ok": ok,
    });
    if cli.json {
        let params = json!({"family": name, "n": n, "input": input});
        println!("{}", pretty(&report("nf", params, results, &watch)));
    } else {
        println!("element: {}", element.map_text());
        println!("canonical word: {word}");
        println!(
            "round trip: {} {}",
            round_trip.map_text(),
            if ok { "ok" } else { "MISMATCH" }
        );
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Evaluates a word by sending each letter to its standard partial
/// permutation on `{1..n}`; the empty word is the identity map.
fn evaluate_over_standard_generators(word: &Word, n: u32) -> Result<PartialPerm, Error> {
    if word.is_empty() {
        return PartialPerm::identity(n);
    }
    let letters: Vec<_> = word
        .letters()
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    standard_assignment(&letters, n)?.evaluate(word)
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "UPPER")]
enum SeedFamily {
    #[value(alias = "r")]
    R,
    #[value(alias = "u")]
    U,
}

fn cmd_tietze(cli: &Cli, from: SeedFamily, n: u32) -> Result<ExitCode, Error> {
    let mut watch = Stopwatch::new();
    let derivation = match from {
        SeedFamily::R => watch.time("derive", || derive_q(n))?,
        SeedFamily::U => watch.time("derive", || derive_v(n))?,
    };
    let eq = &derivation.equivalence;
    if cli.json {
        let params = json!({"from": match from { SeedFamily::R => "R", SeedFamily::U => "U" }, "n": n});
        println!(
            "{}",
            pretty(&report("tietze", params, derivation.to_json(), &watch))
        );
    } else {
        let out = derivation
            .output
            .presentation()
            .expect("derived presentations validate");
        println!(
            "derivation {}: {} relations ({} dropped)",
            out.name(),
            out.relations().len(),
            derivation.output.dropped().len()
        );
        for d in derivation.output.dropped() {
            println!("  dropped {}: {} = {} ({})", d.tag, d.lhs, d.rhs, d.reason);
        }
        println!(
            "semantic equivalence: {} (fp {} and {}, expected {}; satisfied: derived {}, reference {})",
            if eq.semantic_ok { "pass" } else { "FAIL" },
            eq.derived_fp_size,
            eq.reference_fp_size,
            eq.expected_size,
            eq.derived_satisfied,
            eq.reference_satisfied,
        );
        println!(
            "syntactic match: {}",
            if eq.syntactic_match { "yes" } else { "no" }
        );
        for r in &eq.only_in_derived {
            println!("  only in derived: {r}");
        }
        for r in &eq.only_in_reference {
            println!("  only in reference: {r}");
        }
    }
    Ok(if eq.semantic_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
