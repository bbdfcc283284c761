// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for the twin-prime Selmer toolkit.
//!
//! Exit status: 0 on success, 1 when the command's check did not hold,
//! 2 for invalid parameters or usage, 3 when the local oracle could not decide.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Result};
use clap::{Args, CommandFactory, Parser, Subcommand};
use twin_selmer::criteria::audit;
use twin_selmer::report::{self, Format};
use twin_selmer::search::{demonstrate_large_selmer, find_families, SearchOptions};
use twin_selmer::selmer::{compute_selmer_capped, DEFAULT_MAX_N};
use twin_selmer::theorems::{verify_theorem, TheoremId, Verdict};
use twin_selmer::{DescentKind, Epsilon, FamilyParams, Int, SelmerError, SolveError};

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "twin-selmer", version, about = "2-isogeny Selmer groups of twin-prime elliptic curve families")]
struct Cli {
    /// key=value file whose entries override command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a Selmer group with the local oracle.
    Compute(ComputeArgs),
    /// Check a theorem's claims on one parameter set.
    Verify(VerifyArgs),
    /// Find parameter sets meeting a theorem's hypotheses, or with a large Selmer group.
    Search(SearchArgs),
    /// Compare the closed-form criteria against the oracle.
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Epsilon,
    #[arg(long)]
    p: Int,
    #[arg(long)]
    q: Int,
    /// Prime factors of D, comma separated.
    #[arg(long = "D", value_delimiter = ',', required = true)]
    d: Vec<Int>,
    /// Largest number of D primes accepted.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
}

impl FamilyArgs {
    fn params(&self) -> Result<FamilyParams> {
        let f = FamilyParams::new(self.epsilon, self.p.clone(), self.q.clone(), self.d.clone())?;
        if f.n() > self.max_n {
            return Err(SelmerError::TooLarge { n: f.n(), cap: self.max_n }.into());
        }
        Ok(f)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, default_value = "text")]
    format: Format,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// phi or phi_hat.
    #[arg(long)]
    kind: DescentKind,
    /// Include every class of Q(S,2) with its per-place verdicts.
    #[arg(long)]
    seed_table: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Theorem id such as 1.2B or 1.4ex, or `all` for every statement of the family's sign.
    #[arg(long)]
    theorem: String,
    /// Treat not-applicable as failure.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Epsilon,
    /// Statement whose hypotheses the parameters must satisfy.
    #[arg(long, alias = "theorem", conflicts_with = "target_dim", required_unless_present = "target_dim")]
    corollary: Option<TheoremId>,
    /// Number of D primes when searching by statement.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Number of parameter sets to report when searching by statement.
    #[arg(long, default_value_t = 1)]
    limit: usize,
    /// Find an instance whose Selmer group has at least this dimension.
    #[arg(long, requires = "kind")]
    target_dim: Option<usize>,
    #[arg(long)]
    kind: Option<DescentKind>,
    /// Largest prime considered.
    #[arg(long, default_value_t = 10_000)]
    bound: u64,
    /// Seconds before giving up.
    #[arg(long, env = "TWIN_SELMER_TIME_BUDGET")]
    time_budget: Option<f64>,
    /// No progress lines on stderr.
    #[arg(long)]
    quiet: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    out: OutputArgs,
}

const SWITCHES: [&str; 3] = ["strict", "seed-table", "quiet"];

/// Parse `key=value` lines into `(flag, value)` pairs; switches carry no value.
fn config_entries(text: &str) -> Result<Vec<(String, Option<String>)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got {line:?}", no + 1);
        };
        let key = key.trim();
        let key = if key == "D" { key.to_string() } else { key.replace('_', "-") };
        let value = value.trim().to_string();
        if SWITCHES.contains(&key.as_str()) {
            match value.as_str() {
                "true" => out.push((key, None)),
                "false" => {}
                other => bail!("config line {}: {key} expects true or false, got {other:?}", no + 1),
            }
        } else {
            out.push((key, Some(value)));
        }
    }
    Ok(out)
}

/// Drop every occurrence of `--key` (and its value) from `args`.
fn strip_flag(args: &mut Vec<String>, key: &str) {
    let flag = format!("--{key}");
    let with_eq = format!("--{key}=");
    let mut i = 0;
    while i < args.len() {
        if args[i] == flag {
            let takes_value = !SWITCHES.contains(&key);
            let end = if takes_value { (i + 2).min(args.len()) } else { i + 1 };
            args.drain(i..end);
        } else if args[i].starts_with(&with_eq) {
            args.remove(i);
        } else {
            i += 1;
        }
    }
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn parse_cli() -> Result<Cli, clap::Error> {
    let mut args: Vec<String> = std::env::args().collect();
    if let Some(path) = config_path(&args) {
        let entries = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {path}: {e}"))
            .and_then(|t| config_entries(&t).map_err(|e| e.to_string()));
        let entries = match entries {
            Ok(e) => e,
            Err(msg) => return Err(Cli::command().error(clap::error::ErrorKind::InvalidValue, msg)),
        };
        for (key, value) in entries {
            strip_flag(&mut args, &key);
            match value {
                None => args.push(format!("--{key}")),
                Some(v) => args.push(format!("--{key}={v}")),
            }
        }
    }
    Cli::try_parse_from(args)
}

fn emit(text: String) {
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Compute(a) => {
            let f = a.family.params()?;
            let g = compute_selmer_capped(&f, a.kind, a.family.max_n)?;
            emit(match a.out.format {
                Format::Json => report::selmer_json(&g, a.seed_table),
                Format::Csv => report::selmer_csv(&g, a.seed_table),
                Format::Text => report::selmer_text(&g, a.seed_table),
            });
            Ok(0)
        }
        Command::Verify(a) => {
            let f = a.family.params()?;
            let ids: Vec<TheoremId> = if a.theorem.eq_ignore_ascii_case("all") {
                TheoremId::ALL.into_iter().filter(|t| t.epsilon() == f.epsilon()).collect()
            } else {
                vec![a.theorem.parse().map_err(anyhow::Error::msg)?]
            };
            let reports = ids
                .into_iter()
                .map(|id| verify_theorem(&f, id))
                .collect::<Result<Vec<_>, _>>()?;
            emit(match a.out.format {
                Format::Json => report::theorem_json(&reports),
                Format::Csv => report::theorem_csv(&reports),
                Format::Text => report::theorem_text(&reports),
            });
            let bad = reports.iter().any(|r| match r.verdict {
                Verdict::Pass => false,
                Verdict::Fail => true,
                Verdict::NotApplicable => a.strict,
            });
            Ok(if bad { EXIT_FAILED } else { 0 })
        }
        Command::Search(a) => {
            let opts = SearchOptions {
                bound: a.bound,
                time_budget: a.time_budget.map(Duration::from_secs_f64),
                progress: !a.quiet,
            };
            if let Some(k) = a.target_dim {
                let kind = a.kind.expect("clap enforces --kind");
                let hit = demonstrate_large_selmer(a.epsilon, kind, k, &opts)?;
                let found = hit.is_some();
                emit(match a.out.format {
                    Format::Json => report::large_selmer_json(&hit),
                    Format::Csv => report::large_selmer_csv(&hit),
                    Format::Text => report::large_selmer_text(&hit),
                });
                return Ok(if found { 0 } else { EXIT_FAILED });
            }
            let id = a.corollary.expect("clap enforces --corollary or --target-dim");
            if id.epsilon() != a.epsilon {
                bail!(InvalidInput(format!("{id} concerns epsilon = {}", id.epsilon())));
            }
            let found = find_families(a.epsilon, id, a.n, &opts, a.limit);
            emit(match a.out.format {
                Format::Json => report::families_json(&found),
                Format::Csv => report::families_csv(&found),
                Format::Text => report::families_text(&found),
            });
            Ok(if found.is_empty() { EXIT_FAILED } else { 0 })
        }
        Command::Audit(a) => {
            let f = a.family.params()?;
            let r = audit(&f)?;
            emit(match a.out.format {
                Format::Json => report::audit_json(&r),
                Format::Csv => report::audit_csv(&r),
                Format::Text => report::audit_text(&r),
            });
            Ok(if r.discrepancies.is_empty() { 0 } else { EXIT_FAILED })
        }
    }
}

#[derive(Debug)]
struct InvalidInput(String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<SelmerError>() {
        Some(SelmerError::Solve(SolveError::Undecided { .. } | SolveError::PrimeTooLarge(_))) => EXIT_UNDECIDED,
        Some(SelmerError::NotAGroup { .. }) => EXIT_UNDECIDED,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let e = config_entries("# c\nepsilon = -1\nmax_n=3\nstrict = true\nquiet=false\n\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("epsilon".into(), Some("-1".into())),
                ("max-n".into(), Some("3".into())),
                ("strict".into(), None),
            ]
        );
        assert!(config_entries("strict = maybe").is_err());
        assert!(config_entries("just words").is_err());
    }

    #[test]
    fn strip_removes_both_spellings() {
        let mut args: Vec<String> = ["x", "--D", "7", "--D=11", "--strict", "--p", "3"].map(String::from).to_vec();
        strip_flag(&mut args, "D");
        strip_flag(&mut args, "strict");
        assert_eq!(args, ["x", "--p", "3"]);
    }
}
