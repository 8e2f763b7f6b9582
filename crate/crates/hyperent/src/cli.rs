//! Argument parsing and subcommand dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperent_core::closed_forms::{EntropyEnsemble, Formula, Sharp4Source, RANK_PRODUCT_TERMS};
use hyperent_core::ensemble::{Ensemble, DEFAULT_ENUMERATION_CAP_LOG2};
use hyperent_core::purity::{graph_entropy_rank, reduced_purity, renyi2};
use hyperent_core::{Bipartition, EnsembleSpec, Family, Gf2Matrix, Method, Scope, SignTable};

use crate::error::{CliError, CliResult, EXIT_OK};
use crate::graph_file::read_graph;
use crate::report::{rankdist_rows, Format, FormulaDoc, MomentsRow, StateRow, TableWriter};
use crate::run::Runner;
use crate::verify::{Harness, Suite};

/// Environment variable overriding the sign-table qubit cap.
pub const MAX_QUBITS_ENV: &str = "HYPERENT_MAX_QUBITS";

#[derive(Debug, Parser)]
#[command(
    name = "hyperent",
    version,
    about = "Entanglement of random hypergraph states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Purity and Rényi-2 entropy of one hypergraph state read from a file.
    State(StateArgs),
    /// Purity and entropy moments of an ensemble, swept over (n, n_a).
    Moments(MomentsArgs),
    /// GF(2) rank-defect histogram of random square matrices.
    Rankdist(RankdistArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Evaluate one closed-form expression.
    Formula(FormulaArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: one per core). Results do not depend on this value.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Cz,
    Ccz,
    CczHalf,
    KUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Cross,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Rank,
    Statevector,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Hypergraph file: `n <N>` then one edge per line.
    #[arg(long)]
    pub graph_file: PathBuf,
    /// Subsystem A as a bit mask (decimal, 0x.. or 0b..; bit i is qubit i).
    #[arg(long, conflicts_with = "na")]
    pub a_mask: Option<String>,
    /// Subsystem A as the first N_A qubits (default: half).
    #[arg(long)]
    pub na: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Cz)]
    pub family: FamilyArg,
    /// Edge arity for `--family k-uniform`.
    #[arg(long)]
    pub k: Option<u32>,
    /// Qubit counts: `8`, `4,6,8`, `4-12` or `4-12:2`.
    #[arg(long)]
    pub n: String,
    /// Subsystem sizes in the same syntax, or `half`.
    #[arg(long, default_value = "half")]
    pub na: String,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = ScopeArg::Cross)]
    pub scope: ScopeArg,
    #[arg(long, default_value_t = 10_000, conflicts_with = "exhaustive")]
    pub samples: u64,
    /// Enumerate the whole ensemble instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RankdistArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
    pub suite: SuiteArg,
    /// Run only these criteria (comma-separated ids).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulaName {
    HaarAvgPurity,
    CzAvgPurity,
    CczAvgPurity,
    CczHalfAvgPurity,
    CzPurityVariance,
    CczHalfPurityVariance,
    CczHalfPurityVariancePaper,
    CczPurityVarianceLeading,
    Sharp4,
    Sharp4Paper,
    RankDefectProb,
    EntropyLowerBound,
    DeviationBound,
    EntropyVarianceBounds,
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    #[arg(value_enum)]
    pub name: FormulaName,
    #[arg(long)]
    pub n: Option<u32>,
    /// Defaults to n/2.
    #[arg(long)]
    pub na: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long, default_value_t = RANK_PRODUCT_TERMS)]
    pub terms: u32,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long, value_enum)]
    pub ensemble: Option<EnsembleArg>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    Cz,
    Ccz,
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Sign-table cap from the environment, or the library default.
pub fn max_qubits() -> CliResult<u32> {
    match std::env::var(MAX_QUBITS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_QUBITS_ENV}={v:?} is not a qubit count"))),
        Err(_) => Ok(hyperent_core::DEFAULT_MAX_QUBITS),
    }
}

/// Parses `8`, `4,6,8`, `4-12` and `4-12:2`; values come back in ascending order.
pub fn parse_list(text: &str) -> CliResult<Vec<u32>> {
    let bad = || CliError::Usage(format!("bad list {text:?}"));
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        let (range, step) = match item.split_once(':') {
            Some((r, s)) => (r, s.parse::<u32>().map_err(|_| bad())?),
            None => (item, 1),
        };
        if step == 0 {
            return Err(bad());
        }
        match range.split_once('-') {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend((a..=b).step_by(step as usize));
            }
            None => out.push(range.parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_mask(text: &str) -> CliResult<u64> {
    let t = text.trim();
    let parsed = if let Some(h) = t.strip_prefix("0x") {
        u64::from_str_radix(h, 16)
    } else if let Some(b) = t.strip_prefix("0b") {
        u64::from_str_radix(b, 2)
    } else {
        t.parse()
    };
    parsed.map_err(|_| CliError::Usage(format!("bad mask {text:?}")))
}

fn family_of(args: &MomentsArgs) -> CliResult<Family> {
    Ok(match (args.family, args.k) {
        (FamilyArg::Cz, None) => Family::Cz,
        (FamilyArg::Ccz, None) => Family::Ccz,
        (FamilyArg::CczHalf, None) => Family::CczHalf,
        (FamilyArg::KUniform, Some(k)) => Family::KUniform(k),
        (FamilyArg::KUniform, None) => {
            return Err(CliError::Usage("--family k-uniform needs --k".into()))
        }
        (_, Some(_)) => return Err(CliError::Usage("--k only applies to k-uniform".into())),
    })
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Auto => Method::Auto,
        MethodArg::Rank => Method::Rank,
        MethodArg::Statevector => Method::StateVector,
    }
}

pub fn run_state(args: &StateArgs) -> CliResult<()> {
    let h = read_graph(&args.graph_file)?;
    let n = h.n_qubits();
    let part = match (&args.a_mask, args.na) {
        (Some(m), _) => Bipartition::new(n, parse_mask(m)?)?,
        (None, Some(k)) => Bipartition::first(n, k)?,
        (None, None) => Bipartition::first(n, n / 2)?,
    };
    let table = SignTable::build(&h, max_qubits()?)?;
    let p = reduced_purity(&table, &part)?;
    let row = StateRow {
        n,
        a_mask: part.a_mask(),
        n_a: part.n_a(),
        edges: h.edges().len(),
        purity_numerator: p.numerator().to_string(),
        purity_exponent: p.exponent(),
        purity: format!("{}/2^{}", p.numerator(), p.exponent()),
        purity_decimal: p.to_f64(),
        renyi2: renyi2(&p)?,
        cut_rank: graph_entropy_rank(&h, &part).ok(),
    };
    let mut w = TableWriter::new(
        open_output(&args.output.out)?,
        format_of(args.output.format),
        "state",
    );
    w.row(&row)?;
    w.finish()
}

/// Validates every `(n, n_a)` point before any compute.
fn moments_plan(args: &MomentsArgs) -> CliResult<Vec<(EnsembleSpec, Bipartition)>> {
    let family = family_of(args)?;
    let scope = match args.scope {
        ScopeArg::Cross => Scope::CrossOnly,
        ScopeArg::All => Scope::AllEdges,
    };
    let mut plan = Vec::new();
    for n in parse_list(&args.n)? {
        let sizes = if args.na.trim() == "half" {
            vec![n / 2]
        } else {
            parse_list(&args.na)?
        };
        for na in sizes.into_iter().filter(|&na| na < n) {
            let spec = EnsembleSpec::new(family, n)
                .with_probability(args.p)
                .with_scope(scope);
            let part = Bipartition::first(n, na)?;
            spec.validate(&part)?;
            plan.push((spec, part));
        }
    }
    if plan.is_empty() {
        return Err(CliError::Usage(
            "sweep has no (n, n_a) point with 0 < n_a < n".into(),
        ));
    }
    Ok(plan)
}

pub fn run_moments(args: &MomentsArgs) -> CliResult<()> {
    let plan = moments_plan(args)?;
    let cap = max_qubits()?;
    let method = method_of(args.method);
    let mut ensembles = Vec::new();
    for (spec, part) in plan {
        let ens = Ensemble::new(spec, part)?.with_max_qubits(cap);
        let resolved = ens.resolve_method(method)?;
        ensembles.push((ens, resolved));
    }
    if !args.exhaustive && args.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let runner = Runner::new(args.output.workers)?;
    let mut w = TableWriter::new(
        open_output(&args.output.out)?,
        format_of(args.output.format),
        "moments",
    );
    for (ens, m) in &ensembles {
        let row = if args.exhaustive {
            let r = runner.exact(ens, *m, DEFAULT_ENUMERATION_CAP_LOG2)?;
            MomentsRow::new(ens, &r, m.name(), None)
        } else {
            let r = runner.monte_carlo(ens, args.samples, args.seed, *m)?;
            MomentsRow::new(ens, &r, m.name(), Some(args.seed))
        };
        w.row(&row)?;
    }
    w.finish()
}

pub fn run_rankdist(args: &RankdistArgs) -> CliResult<()> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    if args.n == 0 || args.n > 1024 {
        return Err(CliError::Usage("--n must be in 1..=1024".into()));
    }
    let runner = Runner::new(args.output.workers)?;
    let h = runner.rank_histogram(args.n, args.samples, args.seed, Gf2Matrix::rank);
    let mut w = TableWriter::new(
        open_output(&args.output.out)?,
        format_of(args.output.format),
        "rankdist",
    );
    for row in rankdist_rows(&h) {
        w.row(&row)?;
    }
    w.finish()
}

/// Returns whether every criterion passed.
pub fn run_verify(args: &VerifyArgs) -> CliResult<bool> {
    let runner = Runner::new(args.output.workers)?;
    let suite = match args.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let mut harness = Harness::new(&runner, suite);
    harness.seed = args.seed;
    harness.max_qubits = max_qubits()?;
    let mut report = harness.run_all_filtered(&args.only);
    report.passed = report.criteria.iter().all(|c| c.passed);
    let mut out = open_output(&args.output.out)?;
    match args.output.format {
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            out.write_all(b"\n")?;
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for c in &report.criteria {
                w.serialize(c)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    for c in &report.criteria {
        eprintln!(
            "{} [{:>2}] {} ({:.2}s)",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.seconds
        );
    }
    Ok(report.passed)
}

fn need<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("this formula needs --{flag}")))
}

fn formula_of(args: &FormulaArgs) -> CliResult<Formula> {
    use FormulaName::*;
    let sides = || -> CliResult<(u32, u32)> {
        let n = need(args.n, "n")?;
        let na = args.na.unwrap_or(n / 2);
        if na > n {
            return Err(CliError::Usage("--na exceeds --n".into()));
        }
        Ok((na, n - na))
    };
    Ok(match args.name {
        HaarAvgPurity => {
            let (n_a, n_b) = sides()?;
            Formula::HaarAvgPurity { n_a, n_b }
        }
        CzAvgPurity => {
            let (n_a, n_b) = sides()?;
            Formula::CzAvgPurity { n_a, n_b }
        }
        CczAvgPurity => {
            let (n_a, n_b) = sides()?;
            Formula::CczAvgPurity { n_a, n_b }
        }
        CczHalfAvgPurity => {
            let (n_a, n_b) = sides()?;
            Formula::CczHalfAvgPurity { n_a, n_b }
        }
        CzPurityVariance => {
            let (n_a, n_b) = sides()?;
            Formula::CzPurityVariance { n_a, n_b }
        }
        CczHalfPurityVariance | CczHalfPurityVariancePaper => {
            let (n_a, n_b) = sides()?;
            let source = if args.name == CczHalfPurityVariance {
                Sharp4Source::Oracle
            } else {
                Sharp4Source::PaperFormula
            };
            Formula::CczHalfPurityVariance { n_a, n_b, source }
        }
        CczPurityVarianceLeading => {
            let (n_a, n_b) = sides()?;
            Formula::CczPurityVarianceLeading { n_a, n_b }
        }
        Sharp4 => Formula::Sharp4Oracle {
            m: need(args.m, "m")?,
        },
        Sharp4Paper => Formula::Sharp4PaperFormula {
            m: need(args.m, "m")?,
        },
        RankDefectProb => Formula::RankDefectProb {
            s: need(args.s, "s")?,
            terms: args.terms,
        },
        EntropyLowerBound => {
            let (n_a, n_b) = sides()?;
            Formula::EntropyLowerBound { n_a, n_b }
        }
        DeviationBound => {
            let (n_a, n_b) = sides()?;
            Formula::DeviationBound {
                n_a,
                n_b,
                epsilon: need(args.epsilon, "epsilon")?,
                variance: need(args.variance, "variance")?,
            }
        }
        EntropyVarianceBounds => Formula::EntropyVarianceBounds {
            n: need(args.n, "n")?,
            ensemble: match need(args.ensemble, "ensemble")? {
                EnsembleArg::Cz => EntropyEnsemble::Cz,
                EnsembleArg::Ccz => EntropyEnsemble::Ccz,
            },
        },
    })
}

pub fn run_formula(args: &FormulaArgs) -> CliResult<()> {
    let report = formula_of(args)?.evaluate()?;
    let doc = FormulaDoc::from(&report);
    let mut out = open_output(&args.out)?;
    match args.format {
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["label", "validity", "value", "value_decimal"])?;
            let value = match &doc.value {
                serde_json::Value::String(s) => s.clone(),
                v => v.to_string(),
            };
            w.write_record([
                doc.label,
                doc.validity,
                &value,
                &doc.value_decimal.to_string(),
            ])?;
            w.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                crate::error::EXIT_USAGE
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::State(a) => run_state(a),
        Command::Moments(a) => run_moments(a),
        Command::Rankdist(a) => run_rankdist(a),
        Command::Formula(a) => run_formula(a),
        Command::Verify(a) => run_verify(a).and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Verification("see report".into()))
            }
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("hyperent: {e}");
            e.exit_code()
        }
    }
}
