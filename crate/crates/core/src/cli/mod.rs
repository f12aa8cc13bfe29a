//! The `locps` command line: generate families, classify matrices,
//! evaluate bounds, fuzz, run the identity suite, and call the exact oracle.
//!
//! Every command except `gen` writes a [`ReportFile`] as JSON (or a table
//! with `--pretty`). Exit codes: 0 success, 1 a requested expectation
//! failed, 2 malformed input or any other error.

mod io;
mod render;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use io::{parse_index_list, parse_matrix_file, LoadedMatrix, MatrixFile, ReportFile, SCHEMA_VERSION};

use crate::bounds::{
    check_classical, check_extended_fisher, check_extended_hadamard, check_extended_koteljanskii, check_leading_block,
    BoundVerdict, InequalityId,
};
use crate::cone::{
    classify_membership, locally_psd_verdict, Classification, LocalReport, MembershipReport, TolerancePolicy,
};
use crate::families::{
    ar_family, bordered_equality, counterexample_2x2, counterexample_bordered, fisher_sharp, fisher_sharp_params,
    kotel_example, uniform_offdiag, uniform_offdiag_unchecked,
};
use crate::harness::{fuzz_bound, identity_suite, FuzzReport, IdentityReport, SampleConfig, Selector, SubsetStrategy};
use crate::symcore::{
    all_principal_minors, cofactor_determinant, IndexSet, Mode, Number, PrincipalMinors, Rational, Scalar, SymMatrix,
};
use crate::{Error, Result};
use io::CommandEcho;

/// Largest order accepted by `oracle`.
pub const ORACLE_MAX_ORDER: usize = 12;

/// Environment variable supplying the default seed for `fuzz` and `suite`.
pub const SEED_ENV: &str = "LOCPS_SEED";

#[derive(Debug, Parser)]
#[command(name = "locps", version, about = "Locally positive semidefinite matrices: membership and determinant bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a named family member as a matrix file.
    Gen(GenArgs),
    /// Classify a matrix against the PSD and locally-PSD cones.
    Check(CheckArgs),
    /// Evaluate the determinant inequalities on a matrix.
    Bounds(BoundsArgs),
    /// Fuzz one inequality over sampled matrices.
    Fuzz(FuzzArgs),
    /// Run the randomised identity checks.
    Suite(SuiteArgs),
    /// Exact determinant and every principal minor by cofactor expansion.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Override the eigenvalue and slack tolerances.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the negative-determinant tolerance.
    #[arg(long)]
    det_tol: Option<f64>,
    /// Render a human-readable table instead of JSON.
    #[arg(long)]
    pretty: bool,
}

impl Output {
    fn policy(&self) -> Result<TolerancePolicy> {
        let mut p = TolerancePolicy::default();
        for (name, v) in [("tol", self.tol), ("det-tol", self.det_tol)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::ParameterOutOfRange { name: "tol", reason: format!("--{name} {v}") });
                }
            }
        }
        if let Some(t) = self.tol {
            p.eig_tol = t;
            p.slack_tol = t;
        }
        if let Some(t) = self.det_tol {
            p.det_neg_tol = t;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[allow(clippy::enum_variant_names)] // `ar-family` is the family's CLI name
enum Family {
    UniformOffdiag,
    ArFamily,
    BorderedEquality,
    FisherSharp,
    KotelExample,
    #[value(name = "counterexample-2x2")]
    Counterexample2x2,
    CounterexampleBordered,
}

#[derive(Debug, Args)]
struct GenArgs {
    family: Family,
    #[arg(long)]
    n: Option<usize>,
    /// Off-diagonal magnitude for uniform-offdiag (default 1/(n-2)).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Parameter of ar-family.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Parameter of the counterexample families.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Allow uniform-offdiag parameters outside (0, 1/(n-2)].
    #[arg(long)]
    unchecked: bool,
    /// Emit float mode even when the parameters are rational.
    #[arg(long)]
    float: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expectation {
    Pd,
    Psd,
    LocallyPsd,
    LocallyPd,
    None,
}

impl Expectation {
    /// `psd` accepts PD, `locally-psd` accepts LOCALLY_PD: each names a cone
    /// and is met by its subcones.
    fn met_by(self, c: Classification) -> bool {
        match self {
            Expectation::Pd => c == Classification::Pd,
            Expectation::Psd => c.is_psd(),
            Expectation::LocallyPsd => c.is_locally_psd(),
            Expectation::LocallyPd => c == Classification::LocallyPd,
            Expectation::None => c == Classification::None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Expectation::Pd => "pd",
            Expectation::Psd => "psd",
            Expectation::LocallyPsd => "locally-psd",
            Expectation::LocallyPd => "locally-pd",
            Expectation::None => "none",
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Matrix file, or `-` for stdin.
    file: String,
    /// Also report every order-k principal submatrix.
    #[arg(long)]
    k: Option<usize>,
    /// Exit 1 unless the matrix lies in this cone.
    #[arg(long)]
    expect: Option<Expectation>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    All,
    Hadamard,
    Leading,
    Fisher,
    Koteljanskii,
    Classical,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    file: String,
    /// 1-based index list, e.g. `1,2,3` (default `{n}`).
    #[arg(long)]
    alpha: Option<String>,
    /// 1-based index list (default `{1..n-1}`).
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, value_enum, default_value = "all")]
    which: Which,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    /// Inequality id, e.g. EXT_HADAMARD or ext-fisher.
    #[arg(long)]
    kind: InequalityId,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Defaults to $LOCPS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Use this alpha in every trial instead of random ones.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    no_probes: bool,
    #[arg(long)]
    perturb_scale: Option<f64>,
    /// Exit 1 if any violation is recorded.
    #[arg(long)]
    expect_clean: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Exit 1 if any check fails.
    #[arg(long)]
    expect_pass: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct OracleArgs {
    file: String,
    #[command(flatten)]
    out: Output,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut ctx = Context { stdin, stdout, echo };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

struct Context<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    echo: Vec<String>,
}

impl Context<'_> {
    fn read(&mut self, path: &str) -> Result<String> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| Error::Io(format!("stdin: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {path}: {e}")))
        }
    }

    fn load(&mut self, path: &str) -> Result<LoadedMatrix> {
        parse_matrix_file(&self.read(path)?)?.load()
    }

    fn emit<P: Serialize>(
        &mut self,
        name: &'static str,
        tol: TolerancePolicy,
        pretty: Option<String>,
        payload: P,
    ) -> Result<()> {
        let text = match pretty {
            Some(t) => t,
            None => {
                let report = ReportFile {
                    schema_version: SCHEMA_VERSION,
                    command: CommandEcho { name, args: self.echo.clone() },
                    tolerance: tol,
                    payload,
                };
                serde_json::to_string_pretty(&report).expect("reports serialize")
            }
        };
        write_stdout(self.stdout, &text)
    }
}

/// A reader that closed the pipe early (`| head`) is not an error.
fn write_stdout(out: &mut dyn Write, text: &str) -> Result<()> {
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

/// Runs `$body` with `$a` bound to the loaded matrix in its own
/// representation.
macro_rules! with_matrix {
    ($m:expr, |$a:ident| $body:expr) => {
        match $m {
            LoadedMatrix::Float($a) => $body,
            LoadedMatrix::Exact($a) => $body,
            LoadedMatrix::Scaled($a) => $body,
        }
    };
}

fn dispatch(command: Command, ctx: &mut Context<'_>) -> Result<i32> {
    match command {
        Command::Gen(args) => gen(args, ctx),
        Command::Check(args) => check(args, ctx),
        Command::Bounds(args) => bounds(args, ctx),
        Command::Fuzz(args) => fuzz(args, ctx),
        Command::Suite(args) => suite(args, ctx),
        Command::Oracle(args) => oracle(args, ctx),
    }
}

fn param(name: &'static str, v: &Option<String>) -> Result<String> {
    v.clone().ok_or(Error::ParameterOutOfRange { name, reason: format!("--{name} is required") })
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.parse()
}

fn parse_float(s: &str) -> Result<f64> {
    match s.parse::<Rational>() {
        Ok(r) => Ok(r.to_f64()),
        Err(_) => s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {s:?}"))),
    }
}

fn require_n(args: &GenArgs) -> Result<usize> {
    args.n.ok_or(Error::ParameterOutOfRange { name: "n", reason: "--n is required".into() })
}

fn gen_dense<T: Scalar>(args: &GenArgs, parse: fn(&str) -> Result<T>) -> Result<SymMatrix<T>> {
    match args.family {
        Family::UniformOffdiag => {
            let n = require_n(args)?;
            let x = match &args.x {
                Some(s) => parse(s)?,
                None => T::from_ratio(1, n as i64 - 2),
            };
            if args.unchecked {
                uniform_offdiag_unchecked(n, x)
            } else {
                uniform_offdiag(n, x)
            }
        }
        Family::ArFamily => ar_family(require_n(args)?, parse(&param("r", &args.r)?)?),
        Family::BorderedEquality => bordered_equality(require_n(args)?),
        Family::KotelExample => {
            if args.n.is_some_and(|n| n != 6) {
                return Err(Error::InvalidOrder { n: args.n.unwrap_or(0), reason: "kotel-example has n = 6" });
            }
            Ok(kotel_example())
        }
        Family::Counterexample2x2 => Ok(counterexample_2x2(parse(&param("t", &args.t)?)?)),
        Family::CounterexampleBordered => Ok(counterexample_bordered(parse(&param("t", &args.t)?)?)),
        Family::FisherSharp => unreachable!("handled by the caller"),
    }
}

fn family_name(f: Family) -> String {
    f.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default()
}

fn gen(args: GenArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let file = if args.family == Family::FisherSharp {
        let n = require_n(&args)?;
        let a = fisher_sharp(n)?;
        let mut file = MatrixFile::from_scaled(&a);
        if args.float {
            file.core = None;
            file.scale_squared = None;
        }
        file.s_squared = Some(fisher_sharp_params(n)?.s_squared);
        file
    } else if args.float {
        MatrixFile::from_float(&gen_dense(&args, parse_float)?)
    } else {
        MatrixFile::from_exact(&gen_dense(&args, parse_rational)?)
    };
    let file = file.with_family(family_name(args.family));
    let text = serde_json::to_string_pretty(&file).expect("matrix files serialize");
    match &args.output {
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?
        }
        None => write_stdout(ctx.stdout, &text)?,
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ExpectOutcome {
    expected: &'static str,
    met: bool,
}

#[derive(Debug, Serialize)]
struct CheckPayload {
    n: usize,
    mode: Mode,
    membership: MembershipReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    local: Option<LocalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expect: Option<ExpectOutcome>,
}

fn check(args: CheckArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let tol = args.out.policy()?;
    let m = ctx.load(&args.file)?;
    let (membership, local) = with_matrix!(&m, |a| {
        let membership = classify_membership(a, &tol)?;
        let local = args.k.map(|k| locally_psd_verdict(a, k, &tol)).transpose()?;
        (membership, local)
    });
    let expect = args.expect.map(|e| ExpectOutcome { expected: e.name(), met: e.met_by(membership.classification) });
    let code = i32::from(expect.as_ref().is_some_and(|e| !e.met));
    let payload = CheckPayload { n: m.order(), mode: m.mode(), membership, local, expect };
    let pretty = args.out.pretty.then(|| render::check(&payload.membership, payload.local.as_ref(), m.order()));
    ctx.emit("check", tol, pretty, payload)?;
    Ok(code)
}

#[derive(Debug, Serialize)]
pub(crate) struct BoundEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<IndexSet>,
    #[serde(flatten)]
    verdict: BoundVerdict<Number>,
}

#[derive(Debug, Serialize)]
pub(crate) struct Skipped {
    inequality: &'static str,
    reason: String,
}

#[derive(Debug, Serialize)]
struct BoundsPayload {
    n: usize,
    mode: Mode,
    verdicts: Vec<BoundEntry>,
    skipped: Vec<Skipped>,
}

fn evaluate_bounds<M: PrincipalMinors>(
    a: &M,
    which: Which,
    alpha: &IndexSet,
    beta: &IndexSet,
    tol: &TolerancePolicy,
) -> Result<(Vec<BoundEntry>, Vec<Skipped>)> {
    let mut verdicts = Vec::new();
    let mut skipped = Vec::new();
    let all = which == Which::All;
    let mut record = |name: &'static str,
                      sets: (Option<&IndexSet>, Option<&IndexSet>),
                      r: Result<Vec<BoundVerdict<M::Scalar>>>|
     -> Result<()> {
        match r {
            Ok(vs) => verdicts.extend(vs.into_iter().map(|v| BoundEntry {
                alpha: sets.0.cloned(),
                beta: sets.1.cloned(),
                verdict: v.to_numbers(),
            })),
            Err(e) if all => skipped.push(Skipped { inequality: name, reason: e.to_string() }),
            Err(e) => return Err(e),
        }
        Ok(())
    };
    if all || which == Which::Hadamard {
        record("EXT_HADAMARD", (None, None), check_extended_hadamard(a, tol).map(|v| vec![v]))?;
    }
    if all || which == Which::Leading {
        record("LEADING_BLOCK", (None, None), check_leading_block(a, tol).map(|v| vec![v]))?;
    }
    if all || which == Which::Fisher {
        record("EXT_FISHER", (Some(alpha), None), check_extended_fisher(a, alpha, tol).map(|v| vec![v]))?;
    }
    if all || which == Which::Koteljanskii {
        let r = check_extended_koteljanskii(a, alpha, beta, tol).map(|v| vec![v]);
        record("EXT_KOTELJANSKII", (Some(alpha), Some(beta)), r)?;
    }
    if all || which == Which::Classical {
        let r = check_classical(a, alpha, beta, tol).map(Vec::from);
        record("CLASSICAL", (Some(alpha), Some(beta)), r)?;
    }
    Ok((verdicts, skipped))
}

fn bounds(args: BoundsArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let tol = args.out.policy()?;
    let m = ctx.load(&args.file)?;
    let n = m.order();
    if n == 0 {
        return Err(Error::InvalidOrder { n, reason: "empty matrix" });
    }
    let alpha = match &args.alpha {
        Some(s) => parse_index_list(s)?,
        None => IndexSet::from_zero_based([n - 1]),
    };
    let beta = match &args.beta {
        Some(s) => parse_index_list(s)?,
        None => IndexSet::full(n - 1),
    };
    alpha.check_range(n)?;
    beta.check_range(n)?;
    let (verdicts, skipped) = with_matrix!(&m, |a| evaluate_bounds(a, args.which, &alpha, &beta, &tol)?);
    let payload = BoundsPayload { n, mode: m.mode(), verdicts, skipped };
    let pretty = args.out.pretty.then(|| render::bounds(&payload.verdicts, &payload.skipped));
    ctx.emit("bounds", tol, pretty, payload)?;
    Ok(0)
}

fn default_seed(seed: Option<u64>) -> Result<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok(0),
    }
}

fn fuzz(args: FuzzArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let tol = args.out.policy()?;
    let mut cfg = SampleConfig::new(args.n, args.trials, default_seed(args.seed)?);
    if let Some(p) = args.perturb_scale {
        cfg = cfg.with_perturb_scale(p);
    }
    let subsets = match &args.alpha {
        Some(a) => SubsetStrategy::Fixed {
            alpha: parse_index_list(a)?,
            beta: args.beta.as_deref().map(parse_index_list).transpose()?,
        },
        None if args.beta.is_some() => {
            return Err(Error::ParameterOutOfRange { name: "beta", reason: "--beta needs --alpha".into() })
        }
        None => SubsetStrategy::Random,
    };
    let selector = Selector { subsets, probes: !args.no_probes };
    let report: FuzzReport = fuzz_bound(args.kind, &cfg, &selector, &tol)?;
    let code = i32::from(args.expect_clean && !report.violations.is_empty());
    let pretty = args.out.pretty.then(|| render::fuzz(&report));
    ctx.emit("fuzz", tol, pretty, report)?;
    Ok(code)
}

fn suite(args: SuiteArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let tol = args.out.policy()?;
    let report: IdentityReport = identity_suite(args.n, args.trials, default_seed(args.seed)?)?;
    let code = i32::from(args.expect_pass && !report.passed);
    let pretty = args.out.pretty.then(|| render::suite(&report));
    ctx.emit("suite", tol, pretty, report)?;
    Ok(code)
}

#[derive(Debug, Serialize)]
pub(crate) struct MinorEntry {
    indices: IndexSet,
    value: Rational,
}

#[derive(Debug, Serialize)]
struct OraclePayload {
    n: usize,
    /// Cofactor expansion.
    determinant: Rational,
    /// Fraction-free elimination, for comparison.
    elimination_determinant: Rational,
    agree: bool,
    principal_minors: Vec<MinorEntry>,
}

fn oracle(args: OracleArgs, ctx: &mut Context<'_>) -> Result<i32> {
    let tol = args.out.policy()?;
    let m = ctx.load(&args.file)?;
    let n = m.order();
    if n > ORACLE_MAX_ORDER {
        return Err(Error::GuardExceeded { what: "oracle order", limit: ORACLE_MAX_ORDER as u64, got: n as u64 });
    }
    // scaled matrices: expand the rational core and reattach prod(d_i^2)
    let (core, scale) = match &m {
        LoadedMatrix::Scaled(s) => (s.core().clone(), s.scale_sq().to_vec()),
        other => {
            let dense = other.to_exact_dense().ok_or(Error::Parse("matrix has non-finite entries".into()))?;
            (dense, vec![Rational::one(); n])
        }
    };
    let weight = |alpha: &IndexSet| alpha.iter().fold(Rational::one(), |acc, i| acc * scale[i].clone());
    let full = IndexSet::full(n);
    let determinant = cofactor_determinant(&core)? * weight(&full);
    let elimination_determinant = with_matrix!(&m, |a| a.determinant().to_number());
    let elimination_determinant = match elimination_determinant {
        Number::Exact(r) => r,
        Number::Float(_) => core.determinant() * weight(&full),
    };
    let principal_minors = all_principal_minors(&core)?
        .into_iter()
        .filter(|(alpha, _)| !alpha.is_empty())
        .map(|(alpha, d)| MinorEntry { value: d * weight(&alpha), indices: alpha })
        .collect();
    let agree = determinant == elimination_determinant;
    let payload = OraclePayload { n, determinant, elimination_determinant, agree, principal_minors };
    let pretty = args.out.pretty.then(|| render::oracle(&payload.determinant, &payload.principal_minors, agree));
    ctx.emit("oracle", tol, pretty, payload)?;
    Ok(if agree { 0 } else { 1 })
}
