//! Command-line front end: load rule and configuration files, run
//! conversions, simulations, decision procedures, and oracle cross-checks.
//!
//! Exit codes: 0 success, 2 schema/input error, 3 unsupported query,
//! 4 oracle contradicts the decision procedure. Errors are emitted as JSON
//! on standard error; everything on standard output is JSON except trace
//! payloads, and identical inputs always produce byte-identical output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use hoca_lab::decide::{self, FactorVerdict, InjSurjVerdict, PrimeEvidence, SensitivityVerdict};
use hoca_lab::dynamics::{self, Configuration, Grids, TraceFormat};
use hoca_lab::lmatrix::{FrobeniusSpec, LaurentMatrix};
use hoca_lab::models::{self, HocaRule, LcaRule, PnuCaRule};
use hoca_lab::oracle::{self, CensusOutcome, PeriodicMapReport, PowerCensus};

#[derive(Parser)]
#[command(
    name = "hoca-lab",
    version,
    about = "Exact analysis of linear (higher-order) cellular automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide sensitivity/equicontinuity and injectivity/surjectivity for a rule file.
    Analyze { rule: PathBuf },
    /// Evolve a configuration and write a space-time trace.
    Simulate {
        rule: PathBuf,
        /// Configuration file; repeat to stack scalar seeds for a HOCA rule.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        steps: u64,
        /// Cell window `lo:hi`; defaults to the seed support dilated by the
        /// rule's reach times the step count.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Pgm)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between rule representations.
    Convert {
        rule: PathBuf,
        #[arg(long, value_enum)]
        to: Kind,
    },
    /// Cross-check the decision procedures with the brute-force oracle.
    Oracle {
        rule: PathBuf,
        #[arg(long, default_value_t = 2048)]
        max_steps: usize,
        #[arg(long, default_value_t = 64)]
        growth_threshold: u64,
        /// Largest spatial period for the finite-map check.
        #[arg(long = "periods", default_value_t = 8)]
        periods: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Pgm,
    Csv,
}

impl From<Format> for TraceFormat {
    fn from(f: Format) -> TraceFormat {
        match f {
            Format::Pgm => TraceFormat::Pgm,
            Format::Csv => TraceFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Hoca,
    Frobenius,
    Lca,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RuleFile {
    Hoca(HocaRule),
    Lca(LcaRule),
    Frobenius(FrobeniusSpec),
    Pnuca(PnuCaRule),
}

impl RuleFile {
    fn kind(&self) -> &'static str {
        match self {
            RuleFile::Hoca(_) => "hoca",
            RuleFile::Lca(_) => "lca",
            RuleFile::Frobenius(_) => "frobenius",
            RuleFile::Pnuca(_) => "pnuca",
        }
    }
}

enum CliError {
    Schema(String),
    Unsupported(String),
    Contradiction(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Contradiction(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Unsupported(m) | CliError::Contradiction(m) => m,
        }
    }
}

fn schema<E: std::fmt::Display>(err: E) -> CliError {
    CliError::Schema(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "code": err.code(),
                "error": err.message(),
            });
            eprintln!("{payload}");
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { rule } => {
            let rule = load_rule(&rule)?;
            let output = analyze(&rule)?;
            println!("{}", serde_json::to_string(&output).expect("serializable"));
            Ok(())
        }
        Command::Simulate {
            rule,
            configs,
            steps,
            window,
            format,
            out,
        } => simulate(&load_rule(&rule)?, &configs, steps, window, format, &out),
        Command::Convert { rule, to } => {
            let converted = convert(load_rule(&rule)?, to)?;
            println!(
                "{}",
                serde_json::to_string(&converted).expect("serializable")
            );
            Ok(())
        }
        Command::Oracle {
            rule,
            max_steps,
            growth_threshold,
            periods,
        } => run_oracle(&load_rule(&rule)?, max_steps, growth_threshold, periods),
    }
}

fn load_rule(path: &Path) -> Result<RuleFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let rule: RuleFile = serde_json::from_str(&text).map_err(schema)?;
    match &rule {
        RuleFile::Hoca(r) => r.validate().map_err(schema)?,
        RuleFile::Lca(r) => r.validate().map_err(schema)?,
        RuleFile::Pnuca(r) => r.validate().map_err(schema)?,
        RuleFile::Frobenius(_) => {} // validated during deserialization
    }
    Ok(rule)
}

fn load_config(path: &Path) -> Result<Configuration, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(schema)
}

#[derive(Serialize)]
struct AnalyzeOutput {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equicontinuous: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<FactorVerdict>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitivity_status: Option<&'static str>,
    injective: bool,
    surjective: bool,
    det: Vec<(i64, u64)>,
    primes: Vec<PrimeEvidence>,
}

/// Sensitivity verdict where the constructive test applies: Frobenius
/// rows (and anything conjugate to one), plus the classical n = 1 route.
fn sensitivity_of(rule: &RuleFile) -> (Option<SensitivityVerdict>, Option<&'static str>) {
    match rule {
        RuleFile::Hoca(r) => (
            Some(decide::decide_sensitivity(&models::hoca_to_frobenius(r))),
            None,
        ),
        RuleFile::Frobenius(spec) => (Some(decide::decide_sensitivity(spec)), None),
        RuleFile::Lca(r) => {
            if r.n == 1 {
                let coeffs: Vec<u64> = r.matrices.iter().map(|g| g[0][0]).collect();
                (
                    Some(decide::decide_1d(&coeffs, r.m).expect("odd coefficient count")),
                    None,
                )
            } else {
                let fps = models::lca_to_fps(r);
                match fps.frobenius_row() {
                    Some(spec) => (Some(decide::decide_sensitivity(&spec)), None),
                    None => (None, Some("undecided-non-frobenius")),
                }
            }
        }
        RuleFile::Pnuca(r) => {
            let (lca, _) = models::pnuca_to_lca(r);
            sensitivity_of(&RuleFile::Lca(lca))
        }
    }
}

fn matrix_of(rule: &RuleFile) -> LaurentMatrix {
    match rule {
        RuleFile::Hoca(r) => models::hoca_to_frobenius(r).to_matrix(),
        RuleFile::Frobenius(spec) => spec.to_matrix(),
        RuleFile::Lca(r) => models::lca_to_fps(r),
        RuleFile::Pnuca(r) => models::lca_to_fps(&models::pnuca_to_lca(r).0),
    }
}

fn analyze(rule: &RuleFile) -> Result<AnalyzeOutput, CliError> {
    let inj_surj: InjSurjVerdict = decide::decide_inj_surj_matrix(&matrix_of(rule));
    let (sens, status) = sensitivity_of(rule);
    let (sensitive, equicontinuous, factors) = match sens {
        Some(v) => (Some(v.sensitive), Some(v.equicontinuous), Some(v.factors)),
        None => (None, None, None),
    };
    Ok(AnalyzeOutput {
        kind: rule.kind(),
        sensitive,
        equicontinuous,
        factors,
        sensitivity_status: status,
        injective: inj_surj.injective,
        surjective: inj_surj.surjective,
        det: inj_surj.det.to_pairs(),
        primes: inj_surj.primes,
    })
}

fn parse_window(raw: &str) -> Result<(i64, i64), CliError> {
    let err = || CliError::Schema(format!("bad window {raw:?}, expected lo:hi"));
    let (lo, hi) = raw.split_once(':').ok_or_else(err)?;
    let lo: i64 = lo.trim().parse().map_err(|_| err())?;
    let hi: i64 = hi.trim().parse().map_err(|_| err())?;
    if lo > hi {
        return Err(err());
    }
    Ok((lo, hi))
}

fn default_window(support: Option<(i64, i64)>, reach: i64, steps: u64) -> (i64, i64) {
    let (lo, hi) = support.unwrap_or((0, 0));
    let dilation = reach.saturating_mul(steps as i64);
    (lo - dilation, hi + dilation)
}

#[derive(Serialize)]
struct SimulateOutput {
    kind: &'static str,
    steps: u64,
    window: (i64, i64),
    support: Vec<Option<(i64, i64)>>,
    files: Vec<String>,
}

fn simulate(
    rule: &RuleFile,
    config_paths: &[PathBuf],
    steps: u64,
    window: Option<String>,
    format: Format,
    out: &Path,
) -> Result<(), CliError> {
    let configs = config_paths
        .iter()
        .map(|p| load_config(p))
        .collect::<Result<Vec<_>, _>>()?;
    let window = window.map(|w| parse_window(&w)).transpose()?;

    // Every rule kind reduces to a list of per-step scalar grids per
    // component; HOCA and periodic non-uniform rules step natively.
    let (grids, summary, modulus) = match rule {
        RuleFile::Hoca(r) => {
            let stack = match configs.as_slice() {
                [single] if single.n() == r.memory => dynamics::config_to_stack(single),
                slots if slots.len() == r.memory => slots.to_vec(),
                _ => {
                    return Err(CliError::Schema(format!(
                        "hoca rule of memory {} takes one stacked config or {} scalar configs",
                        r.memory, r.memory
                    )))
                }
            };
            hoca_trace(r, stack, steps, window)?
        }
        RuleFile::Pnuca(r) => {
            let [config] = configs.as_slice() else {
                return Err(CliError::Schema("pnuca simulation takes one config".into()));
            };
            pnuca_trace(r, config, steps, window)?
        }
        RuleFile::Lca(_) | RuleFile::Frobenius(_) => {
            let [config] = configs.as_slice() else {
                return Err(CliError::Schema("simulation takes one config".into()));
            };
            let matrix = matrix_of(rule);
            let (lo, hi) = matrix.degree_span();
            let reach = lo.unsigned_abs().max(hi.unsigned_abs()) as i64;
            let window = window.unwrap_or_else(|| default_window(config.support(), reach, steps));
            let m = matrix.modulus();
            let (grids, summary) =
                dynamics::trace_grids(&matrix, config, steps, window).map_err(schema)?;
            (grids, summary, m)
        }
    };

    let files = dynamics::write_trace_files(&grids, modulus, summary.window, format.into(), out)
        .map_err(schema)?;
    let output = SimulateOutput {
        kind: rule.kind(),
        steps,
        window: summary.window,
        support: summary.support,
        files: files.iter().map(|p| p.display().to_string()).collect(),
    };
    println!("{}", serde_json::to_string(&output).expect("serializable"));
    Ok(())
}

fn hoca_trace(
    rule: &HocaRule,
    mut stack: Vec<Configuration>,
    steps: u64,
    window: Option<(i64, i64)>,
) -> Result<(Grids, dynamics::TraceSummary, u64), CliError> {
    let support_of = |stack: &[Configuration]| -> Option<(i64, i64)> {
        stack
            .iter()
            .filter_map(Configuration::support)
            .reduce(|(alo, ahi), (blo, bhi)| (alo.min(blo), ahi.max(bhi)))
    };
    let (lo, hi) = models::hoca_to_frobenius(rule).to_matrix().degree_span();
    let reach = lo.unsigned_abs().max(hi.unsigned_abs()) as i64;
    let window = window.unwrap_or_else(|| default_window(support_of(&stack), reach, steps));
    let mut grids: Grids = vec![Vec::new(); rule.memory];
    let mut support = Vec::new();
    for t in 0..=steps {
        for (j, slot) in stack.iter().enumerate() {
            grids[j].push(
                (window.0..=window.1)
                    .map(|i| slot.component(i, 0))
                    .collect(),
            );
        }
        support.push(support_of(&stack));
        if t < steps {
            stack = dynamics::hoca_step(rule, &stack).map_err(schema)?;
        }
    }
    Ok((
        grids,
        dynamics::TraceSummary {
            steps,
            window,
            support,
        },
        rule.m,
    ))
}

fn pnuca_trace(
    rule: &PnuCaRule,
    config: &Configuration,
    steps: u64,
    window: Option<(i64, i64)>,
) -> Result<(Grids, dynamics::TraceSummary, u64), CliError> {
    let window =
        window.unwrap_or_else(|| default_window(config.support(), rule.radius as i64, steps));
    let mut grid = Vec::new();
    let mut support = Vec::new();
    let mut current = config.clone();
    for t in 0..=steps {
        grid.push(
            (window.0..=window.1)
                .map(|i| current.component(i, 0))
                .collect(),
        );
        support.push(current.support());
        if t < steps {
            current = dynamics::pnuca_step(rule, &current).map_err(schema)?;
        }
    }
    Ok((
        vec![grid],
        dynamics::TraceSummary {
            steps,
            window,
            support,
        },
        rule.m,
    ))
}

fn convert(rule: RuleFile, to: Kind) -> Result<RuleFile, CliError> {
    match (rule, to) {
        (RuleFile::Hoca(r), Kind::Frobenius) => {
            Ok(RuleFile::Frobenius(models::hoca_to_frobenius(&r)))
        }
        (RuleFile::Frobenius(spec), Kind::Hoca) => {
            Ok(RuleFile::Hoca(models::frobenius_to_hoca(&spec)))
        }
        (RuleFile::Frobenius(spec), Kind::Lca) => {
            Ok(RuleFile::Lca(models::fps_to_lca(&spec.to_matrix())))
        }
        (RuleFile::Pnuca(r), Kind::Lca) => Ok(RuleFile::Lca(models::pnuca_to_lca(&r).0)),
        (RuleFile::Lca(r), Kind::Frobenius) => match models::lca_to_fps(&r).frobenius_row() {
            Some(spec) => Ok(RuleFile::Frobenius(spec)),
            None => Err(CliError::Unsupported(
                "lca series is not in Frobenius normal form".into(),
            )),
        },
        (rule, to) => Err(CliError::Unsupported(format!(
            "no conversion from {} to {}",
            rule.kind(),
            match to {
                Kind::Hoca => "hoca",
                Kind::Frobenius => "frobenius",
                Kind::Lca => "lca",
            }
        ))),
    }
}

#[derive(Serialize)]
struct Agreement {
    sensitivity: &'static str,
    injectivity: &'static str,
    surjectivity: &'static str,
}

#[derive(Serialize)]
struct OracleOutput {
    kind: &'static str,
    census: PowerCensus,
    periodic: Vec<PeriodicMapReport>,
    agreement: Agreement,
}

fn run_oracle(
    rule: &RuleFile,
    max_steps: usize,
    growth_threshold: u64,
    periods: usize,
) -> Result<(), CliError> {
    let matrix = matrix_of(rule);
    let census = oracle::power_census(&matrix, max_steps, growth_threshold);
    let as_lca = models::fps_to_lca(&matrix);
    let periodic: Vec<PeriodicMapReport> = (1..=periods)
        .map(|l| oracle::periodic_map(&as_lca, l))
        .collect();

    let (sens, _) = sensitivity_of(rule);
    let sensitivity = match (&sens, &census.outcome) {
        (None, _) => "undecided",
        (Some(_), CensusOutcome::Inconclusive { .. }) => "inconclusive",
        (Some(v), CensusOutcome::Cycle { .. }) if v.equicontinuous => "ok",
        (Some(v), CensusOutcome::Growth { .. }) if v.sensitive => "ok",
        _ => "contradiction",
    };

    let inj_surj = decide::decide_inj_surj_matrix(&matrix);
    let injectivity = if inj_surj.injective {
        if periodic.iter().all(|r| r.injective) {
            "ok"
        } else {
            // Periodic configurations are invariant, so an injective global
            // rule restricts injectively; a kernel here is a hard witness.
            "contradiction"
        }
    } else if periodic.iter().any(|r| !r.injective) {
        "ok"
    } else {
        "inconclusive"
    };
    let surjectivity = if inj_surj.surjective {
        if periodic.iter().all(|r| r.surjective) {
            "ok"
        } else {
            // Finite periods are only a necessary-condition check; a
            // surjective rule may still miss periodic targets.
            "inconclusive"
        }
    } else if periodic.iter().any(|r| !r.surjective) {
        "ok"
    } else {
        "inconclusive"
    };

    let output = OracleOutput {
        kind: rule.kind(),
        census,
        periodic,
        agreement: Agreement {
            sensitivity,
            injectivity,
            surjectivity,
        },
    };
    println!("{}", serde_json::to_string(&output).expect("serializable"));
    if sensitivity == "contradiction" || injectivity == "contradiction" {
        return Err(CliError::Contradiction(
            "oracle outcome contradicts the decision procedure".into(),
        ));
    }
    Ok(())
}
