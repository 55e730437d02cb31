use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use idealform::applications::{
    annulus_cdc, annulus_formulation, annulus_gray_formulation, annulus_zigzag_formulation, pwl_formulation,
    pwl_ground_set, AnnulusSpec, RecoveryMap,
};
use idealform::cdc::{hyperplane_formulation, Cdc, FormulationOptions};
use idealform::encoding::{
    gray_matrix, is_hole_free, is_in_convex_position, make_encoding, zigzag_matrix, Encoding, EncodingKind,
    DEFAULT_HOLE_CHECK_CAP,
};
use idealform::error::{Error, ErrorClass};
use idealform::formulation::Formulation;
use idealform::io::{
    emit_lp_text, emit_structured, parse_formulation, parse_problem, to_json, CheckLevel, OutputFormat, Problem,
    ProblemDocument, VerificationSummary,
};
use idealform::verify::{check_ideal, check_validity_only, VerifyOptions, DEFAULT_ENUMERATION_BUDGET};

const EXIT_INPUT: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(name = "idealform", version, about = "Ideal MIP formulations for combinatorial disjunctive constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a Gray or zig-zag matrix, or a prefix encoding with its gate results.
    Encode {
        #[arg(long, value_enum)]
        kind: NamedEncoding,
        /// Order of the full 2^s × s matrix.
        #[arg(long, conflicts_with = "d", required_unless_present = "d")]
        s: Option<u32>,
        /// Number of codes: the first d rows of the order ceil(log2 d) matrix.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Formulate a disjunctive constraint given as a cdc problem document.
    Formulate {
        #[command(flatten)]
        common: Common,
    },
    /// Formulate the epigraph of a piecewise linear function.
    Pwl {
        #[command(flatten)]
        common: Common,
    },
    /// Formulate the quadrilateral relaxation of an annulus.
    Annulus {
        /// Number of pieces (a power of two).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        inner: Option<f64>,
        #[arg(long)]
        outer: Option<f64>,
        /// Emit the (λ, z) system for d < 8, without vertex coordinates.
        #[arg(long)]
        allow_coarse: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check a formulation document against the problem it was built from.
    Verify {
        #[arg(long)]
        formulation: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "ideal")]
        check: CheckArg,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        max_enum: u128,
    },
}

#[derive(Args)]
struct Common {
    /// Problem document; `-` or absent reads standard input (annulus: optional).
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Overrides the document's encoding.
    #[arg(long, value_enum)]
    encoding: Option<EncodingArg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum)]
    check: Option<CheckArg>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Budget for vertex enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    max_enum: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum NamedEncoding {
    Gray,
    Zigzag,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    Gray,
    Zigzag,
    Explicit,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Lp,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    None,
    Validity,
    Ideal,
}

impl From<NamedEncoding> for EncodingKind {
    fn from(e: NamedEncoding) -> Self {
        match e {
            NamedEncoding::Gray => EncodingKind::BinaryReflectedGray,
            NamedEncoding::Zigzag => EncodingKind::ZigZag,
        }
    }
}

impl From<EncodingArg> for EncodingKind {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Gray => EncodingKind::BinaryReflectedGray,
            EncodingArg::Zigzag => EncodingKind::ZigZag,
            EncodingArg::Explicit => EncodingKind::Explicit,
        }
    }
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Lp => OutputFormat::Lp,
        }
    }
}

impl From<CheckArg> for CheckLevel {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::None => CheckLevel::None,
            CheckArg::Validity => CheckLevel::Validity,
            CheckArg::Ideal => CheckLevel::Ideal,
        }
    }
}

enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_input(path: Option<&PathBuf>) -> CliResult<String> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
        }
        _ => {
            io::stdin().read_to_string(&mut text).map_err(|e| Error::Input(format!("standard input: {e}")))?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?,
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Input(format!("standard output: {e}")))?,
    }
    Ok(())
}

fn print_matrix(rows: &[Vec<i64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

fn run_encode(kind: NamedEncoding, s: Option<u32>, d: Option<usize>) -> CliResult {
    let kind: EncodingKind = kind.into();
    let text = match (s, d) {
        (Some(s), _) => {
            let rows = match kind {
                EncodingKind::BinaryReflectedGray => gray_matrix(s)?,
                _ => zigzag_matrix(s)?,
            };
            print_matrix(&rows)
        }
        (None, Some(d)) => {
            let e = make_encoding(d, kind)?;
            let mut text = print_matrix(e.rows());
            text.push_str(&format!("# convex position: {}\n", is_in_convex_position(&e)));
            text.push_str(&format!("# hole-free: {}\n", is_hole_free(&e, DEFAULT_HOLE_CHECK_CAP)?));
            text
        }
        (None, None) => unreachable!("clap requires --s or --d"),
    };
    write_output(None, &text)
}

/// The constraint and encoding a formulation must describe.
struct Target {
    cdc: Cdc,
    encoding: Encoding,
}

fn problem_target(doc: &ProblemDocument) -> CliResult<Target> {
    Ok(match &doc.problem {
        Problem::Cdc { cdc, encoding } => Target { cdc: cdc.clone(), encoding: encoding.clone() },
        Problem::Pwl { function, encoding } => {
            Target { cdc: pwl_ground_set(function).cdc, encoding: make_encoding(function.d(), *encoding)? }
        }
        Problem::Annulus { spec, encoding } => {
            Target { cdc: annulus_cdc(spec.d())?, encoding: make_encoding(spec.d(), *encoding)? }
        }
    })
}

fn run_check(
    level: CheckLevel,
    target: &Target,
    f: &Formulation,
    max_enum: u128,
) -> CliResult<Option<VerificationSummary>> {
    match level {
        CheckLevel::None => Ok(None),
        CheckLevel::Validity => {
            let passed = check_validity_only(&target.cdc, &target.encoding, f);
            eprintln!("validity check: {}", if passed { "passed" } else { "FAILED" });
            Ok(Some(VerificationSummary { level, passed, expected: None, found: None }))
        }
        CheckLevel::Ideal => {
            let opts = VerifyOptions { budget: max_enum, ..Default::default() };
            let report = check_ideal(&target.cdc, &target.encoding, f, &opts)?;
            eprintln!(
                "ideal check: {} ({} embedding points, {} relaxation vertices, {} missing, {} extra)",
                if report.passed { "passed" } else { "FAILED" },
                report.expected,
                report.found,
                report.missing.len(),
                report.extra.len()
            );
            for p in report.extra.iter().take(5) {
                let cells: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                eprintln!("  extra vertex ({})", cells.join(", "));
            }
            Ok(Some(VerificationSummary {
                level,
                passed: report.passed,
                expected: Some(report.expected),
                found: Some(report.found),
            }))
        }
    }
}

fn emit(
    common: &Common,
    doc_format: Option<OutputFormat>,
    doc_check: Option<CheckLevel>,
    target: &Target,
    f: &Formulation,
    map: Option<&RecoveryMap>,
) -> CliResult {
    let check = common.check.map(CheckLevel::from).or(doc_check).unwrap_or(CheckLevel::None);
    let format = common.format.map(OutputFormat::from).or(doc_format).unwrap_or(OutputFormat::Json);
    let summary = run_check(check, target, f, common.max_enum)?;
    let text = match format {
        OutputFormat::Json => to_json(&emit_structured(f, map, summary.clone())),
        OutputFormat::Lp => emit_lp_text(f),
    };
    write_output(common.out.as_ref(), &text)?;
    match summary {
        Some(s) if !s.passed => Err(Failure::Verification),
        _ => Ok(()),
    }
}

fn run_formulate(common: &Common) -> CliResult {
    let doc = parse_problem(&read_input(common.problem.as_ref())?)?;
    let Problem::Cdc { cdc, encoding } = &doc.problem else {
        return Err(
            Error::Input("formulate takes a cdc problem document (use the pwl or annulus subcommand)".into()).into()
        );
    };
    let encoding = match common.encoding.map(EncodingKind::from) {
        None => encoding.clone(),
        Some(EncodingKind::Explicit) if encoding.kind() == EncodingKind::Explicit => encoding.clone(),
        Some(EncodingKind::Explicit) => {
            return Err(Error::Input("encoding: --encoding explicit needs explicit rows in the document".into()).into())
        }
        Some(kind) => make_encoding(cdc.d(), kind)?,
    };
    let f = hyperplane_formulation(cdc, &encoding, &FormulationOptions::default())?;
    let target = Target { cdc: cdc.clone(), encoding };
    emit(common, doc.options.format, doc.options.check, &target, &f, None)
}

fn named_kind(arg: Option<EncodingArg>, fallback: EncodingKind) -> CliResult<EncodingKind> {
    match arg.map(EncodingKind::from) {
        Some(EncodingKind::Explicit) => {
            Err(Error::Input("encoding: this subcommand takes gray or zigzag".into()).into())
        }
        Some(kind) => Ok(kind),
        None => Ok(fallback),
    }
}

fn run_pwl(common: &Common) -> CliResult {
    let doc = parse_problem(&read_input(common.problem.as_ref())?)?;
    let Problem::Pwl { function, encoding } = &doc.problem else {
        return Err(Error::Input("pwl takes a pwl problem document".into()).into());
    };
    let kind = named_kind(common.encoding, *encoding)?;
    let (f, map) = pwl_formulation(function, kind)?;
    let target = Target { cdc: pwl_ground_set(function).cdc, encoding: make_encoding(function.d(), kind)? };
    emit(common, doc.options.format, doc.options.check, &target, &f, Some(&map))
}

fn run_annulus(
    d: Option<usize>,
    inner: Option<f64>,
    outer: Option<f64>,
    allow_coarse: bool,
    common: &Common,
) -> CliResult {
    let doc = match &common.problem {
        Some(p) => Some(parse_problem(&read_input(Some(p))?)?),
        None => None,
    };
    let (base, doc_kind, options) = match &doc {
        Some(ProblemDocument { problem: Problem::Annulus { spec, encoding }, options }) => {
            (Some(*spec), Some(*encoding), options.clone())
        }
        Some(_) => return Err(Error::Input("annulus takes an annulus problem document".into()).into()),
        None => (None, None, Default::default()),
    };
    let d = d.or(base.map(|s| s.d())).ok_or_else(|| Error::Input("d: pass --d or an annulus document".into()))?;
    let inner = inner.or(base.map(|s| s.inner_radius())).unwrap_or(1.0);
    let outer = outer.or(base.map(|s| s.outer_radius())).unwrap_or(inner.max(1.0));
    let spec = AnnulusSpec::new(inner, outer, d).map_err(|e| match e {
        Error::NotPowerOfTwo(_) => Error::Input(format!("d: {e}")),
        other => Error::Input(format!("radii: {other}")),
    })?;
    let kind = named_kind(common.encoding, doc_kind.unwrap_or(EncodingKind::BinaryReflectedGray))?;
    if spec.is_degenerate() {
        eprintln!("warning: inner radius 0 collapses every inner vertex to the origin");
    }
    let (f, map) = match annulus_formulation(&spec, kind) {
        Ok((f, map)) => (f, Some(map)),
        Err(Error::DegenerateSecant { .. }) if allow_coarse => {
            eprintln!("warning: d = {d} is too coarse for vertex coordinates; emitting the (lambda, z) system only");
            let f = match kind {
                EncodingKind::BinaryReflectedGray => annulus_gray_formulation(d)?,
                _ => annulus_zigzag_formulation(d)?,
            };
            (f, None)
        }
        Err(e) => return Err(e.into()),
    };
    let target = Target { cdc: annulus_cdc(d)?, encoding: make_encoding(d, kind)? };
    emit(common, options.format, options.check, &target, &f, map.as_ref())
}

fn run_verify(formulation: &PathBuf, problem: &PathBuf, check: CheckArg, max_enum: u128) -> CliResult {
    let parsed = parse_formulation(&read_input(Some(formulation))?)?;
    let doc = parse_problem(&read_input(Some(problem))?)?;
    let target = problem_target(&doc)?;
    let level = CheckLevel::from(check);
    match run_check(level, &target, &parsed.formulation, max_enum)? {
        Some(s) if !s.passed => Err(Failure::Verification),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Encode { kind, s, d } => run_encode(*kind, *s, *d),
        Command::Formulate { common } => run_formulate(common),
        Command::Pwl { common } => run_pwl(common),
        Command::Annulus { d, inner, outer, allow_coarse, common } => {
            run_annulus(*d, *inner, *outer, *allow_coarse, common)
        }
        Command::Verify { formulation, problem, check, max_enum } => {
            run_verify(formulation, problem, *check, *max_enum)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFICATION),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => EXIT_INPUT,
                ErrorClass::Precondition => EXIT_PRECONDITION,
                ErrorClass::ResourceCap => EXIT_RESOURCE,
            })
        }
    }
}
