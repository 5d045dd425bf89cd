//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and returns the rendered report with its exit code, so the
//! binary and the tests share one code path.
//!
//! Exit codes: `0` valid or stable, `1` invalid, unstable or otherwise
//! outside the variety, `2` malformed input or unsupported request.

use std::io::Read;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quivmod::Error;
use serde_json::{json, Value};

mod batch;
mod commands;

#[derive(Parser, Debug)]
#[command(name = "quivmod", version, about = "Exact checks for ADHM data, monads and flag quivers")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// JSON input file; stdin when missing or `-`.
    #[arg(long = "in")]
    input: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a datum against its defining equations and stability.
    #[command(subcommand)]
    Validate(ValidateCmd),
    /// Minimal-case monads: invariants, the immersion j, normal forms.
    #[command(subcommand)]
    Minimal(MinimalCmd),
    /// Flag-quiver representations.
    #[command(subcommand)]
    Flag(FlagCmd),
    /// Quiver combinatorics.
    #[command(subcommand)]
    Quiver(QuiverCmd),
    /// King stability of a representation.
    #[command(subcommand)]
    Stability(StabilityCmd),
    /// Seeded random data.
    #[command(subcommand)]
    Sample(SampleCmd),
    /// Run a manifest of commands.
    Batch(Input),
}

#[derive(Subcommand, Debug)]
enum ValidateCmd {
    P2(Input),
    Hirz1(Input),
    Blowup(Input),
}

#[derive(Subcommand, Debug)]
enum MinimalCmd {
    Invariants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a: usize,
        #[arg(long, allow_negative_numbers = true)]
        c: i64,
    },
    Embed(Input),
    Normalize(Input),
    Fingerprint(Input),
}

#[derive(Subcommand, Debug)]
enum FlagCmd {
    Stable(Input),
    Extract {
        #[command(flatten)]
        input: Input,
        /// Extract the subspaces even when the representation is unstable.
        #[arg(long)]
        allow_unstable: bool,
    },
    FromMinimal(Input),
    /// Evaluate the symplectic form on `{"t1": {"e","f"}, "t2": {"e","f"}}`,
    /// or with `--u`/`--v0` report the rank of its Gram matrix.
    Omega {
        #[command(flatten)]
        input: Input,
        #[arg(long, requires = "v0")]
        u: Option<usize>,
        #[arg(long, requires = "u")]
        v0: Option<usize>,
    },
}

#[derive(Args, Debug, Clone)]
struct QuiverSource {
    /// Builtin quiver (`jordan`, `a<k>`); otherwise read JSON via `--in`.
    #[arg(long)]
    quiver: Option<String>,
    #[command(flatten)]
    input: Input,
}

#[derive(Subcommand, Debug)]
enum QuiverCmd {
    Derive {
        #[command(flatten)]
        src: QuiverSource,
        #[arg(long, value_enum)]
        kind: DeriveArg,
        /// `vertex=count` pairs, comma separated.
        #[arg(long, default_value = "")]
        p: String,
        #[arg(long, default_value = "")]
        q: String,
        #[arg(long, default_value = "")]
        w: String,
    },
    Cartan {
        #[command(flatten)]
        src: QuiverSource,
    },
    Dim {
        #[command(flatten)]
        src: QuiverSource,
        #[arg(long, value_delimiter = ',')]
        v: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        w: Vec<usize>,
    },
    Regular {
        #[command(flatten)]
        src: QuiverSource,
        #[arg(long, value_delimiter = ',')]
        v: Vec<usize>,
        /// Real parts of λ (default 0).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambda: Vec<String>,
        /// Imaginary parts of λ (default 0).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambda_im: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DeriveArg {
    Double,
    Framed,
    Gf,
    Cb,
}

#[derive(Subcommand, Debug)]
enum StabilityCmd {
    /// Structural criterion when one applies, enumeration otherwise.
    Check(Input),
    /// Always enumerate subrepresentations (prime fields only).
    Brute(Input),
}

#[derive(Args, Debug, Clone)]
struct SampleOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `Q` or `Fp:<p>`.
    #[arg(long, default_value = "Q")]
    field: String,
}

#[derive(Subcommand, Debug)]
enum SampleCmd {
    P2 {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        c: usize,
        #[command(flatten)]
        opts: SampleOpts,
    },
    Hirz1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: usize,
        #[command(flatten)]
        opts: SampleOpts,
    },
    Minimal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a: usize,
        /// Second Chern class; defaults to the minimal value.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<i64>,
        #[command(flatten)]
        opts: SampleOpts,
    },
    Flag {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        u: usize,
        /// `v_0,...,v_{d-1}`; `d` is its length.
        #[arg(long, value_delimiter = ',', required = true)]
        v: Vec<usize>,
        #[command(flatten)]
        opts: SampleOpts,
    },
}

/// Rendered result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Report plus exit code, before rendering.
pub(crate) struct Report {
    pub value: Value,
    pub code: i32,
}

impl Report {
    pub(crate) fn ok(value: Value) -> Report {
        Report { value, code: 0 }
    }

    pub(crate) fn verdict(value: Value, good: bool) -> Report {
        Report { value, code: if good { 0 } else { 1 } }
    }
}

pub(crate) fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::ShapeError(_)
        | Error::FieldMismatch(_)
        | Error::NeedsFiniteField
        | Error::TooLarge(_)
        | Error::VertexError(_)
        | Error::PathError(_)
        | Error::GroupShapeError(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(['(', ' ']).next().unwrap_or_default().to_string()
}

fn error_report(e: &Error) -> Report {
    Report { value: json!({"error": error_kind(e), "message": e.to_string()}), code: exit_code(e) }
}

/// Runs one command line (including the program name) against `stdin`.
pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let start = Instant::now();
    let mut report = dispatch(cli.cmd, stdin).unwrap_or_else(|e| error_report(&e));
    if cli.timing {
        if let Value::Object(m) = &mut report.value {
            m.insert("elapsed_ms".into(), json!(start.elapsed().as_millis() as u64));
        }
    }
    let stdout = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.value).expect("report serializes")),
        Format::Table => render_table(&report.value),
    };
    Outcome { stdout, stderr: String::new(), code: report.code }
}

fn dispatch(cmd: Cmd, stdin: &mut dyn Read) -> quivmod::Result<Report> {
    use commands as c;
    match cmd {
        Cmd::Validate(v) => match v {
            ValidateCmd::P2(i) => c::validate_p2(&read_input(&i, stdin)?),
            ValidateCmd::Hirz1(i) => c::validate_hirz1(&read_input(&i, stdin)?),
            ValidateCmd::Blowup(i) => c::validate_blowup(&read_input(&i, stdin)?),
        },
        Cmd::Minimal(m) => match m {
            MinimalCmd::Invariants { n, r, a, c: ch } => c::minimal_invariants(n, r, a, ch),
            MinimalCmd::Embed(i) => c::minimal_embed(&read_input(&i, stdin)?),
            MinimalCmd::Normalize(i) => c::minimal_normalize(&read_input(&i, stdin)?),
            MinimalCmd::Fingerprint(i) => c::minimal_fingerprint(&read_input(&i, stdin)?),
        },
        Cmd::Flag(f) => match f {
            FlagCmd::Stable(i) => c::flag_stable(&read_input(&i, stdin)?),
            FlagCmd::Extract { input, allow_unstable } => c::flag_extract(&read_input(&input, stdin)?, allow_unstable),
            FlagCmd::FromMinimal(i) => c::flag_from_minimal(&read_input(&i, stdin)?),
            FlagCmd::Omega { input, u: Some(u), v0: Some(v0) } if input.input.is_none() => c::flag_gram(u, v0),
            FlagCmd::Omega { input, .. } => c::flag_omega(&read_input(&input, stdin)?),
        },
        Cmd::Quiver(q) => match q {
            QuiverCmd::Derive { src, kind, p, q, w } => {
                let quiver = load_quiver(&src, stdin)?;
                let kind = match kind {
                    DeriveArg::Double => quivmod::quiver::DeriveKind::Double,
                    DeriveArg::Framed => quivmod::quiver::DeriveKind::Framed,
                    DeriveArg::Gf => quivmod::quiver::DeriveKind::Gf { p: c::parse_counts(&p)?, q: c::parse_counts(&q)? },
                    DeriveArg::Cb => quivmod::quiver::DeriveKind::Cb {
                        w: c::parse_counts(&w)?,
                        p: c::parse_counts(&p)?,
                        q: c::parse_counts(&q)?,
                    },
                };
                Ok(Report::ok(quiver.derive(&kind)?.to_json()))
            }
            QuiverCmd::Cartan { src } => Ok(Report::ok(json!({"cartan": load_quiver(&src, stdin)?.cartan_matrix()}))),
            QuiverCmd::Dim { src, v, w } => c::quiver_dim(&load_quiver(&src, stdin)?, &v, &w),
            QuiverCmd::Regular { src, v, lambda, lambda_im, theta } => {
                c::quiver_regular(&load_quiver(&src, stdin)?, &v, &lambda, &lambda_im, &theta)
            }
        },
        Cmd::Stability(s) => match s {
            StabilityCmd::Check(i) => c::stability(&read_input(&i, stdin)?, false),
            StabilityCmd::Brute(i) => c::stability(&read_input(&i, stdin)?, true),
        },
        Cmd::Sample(s) => match s {
            SampleCmd::P2 { r, c: ch, opts } => c::sample_p2(r, ch, &opts.field, opts.seed),
            SampleCmd::Hirz1 { n, c: ch, opts } => c::sample_hirz1(n, ch, &opts.field, opts.seed),
            SampleCmd::Minimal { n, r, a, c: ch, opts } => c::sample_minimal(n, r, a, ch, &opts.field, opts.seed),
            SampleCmd::Flag { n, u, v, opts } => c::sample_flag(n, u, &v, &opts.field, opts.seed),
        },
        Cmd::Batch(i) => batch::run_manifest(&i),
    }
}

fn read_text(input: &Input, stdin: &mut dyn Read) -> quivmod::Result<String> {
    match input.input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}"))),
    }
}

fn read_input(input: &Input, stdin: &mut dyn Read) -> quivmod::Result<Value> {
    let text = read_text(input, stdin)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

fn load_quiver(src: &QuiverSource, stdin: &mut dyn Read) -> quivmod::Result<quivmod::quiver::Quiver> {
    match &src.quiver {
        Some(name) => quivmod::quiver::Quiver::builtin(name),
        None => {
            let v = read_input(&src.input, stdin)?;
            quivmod::quiver::Quiver::from_json(v.get("quiver").unwrap_or(&v))
        }
    }
}

/// One `key<TAB>value` line per top-level field; strings are unquoted.
fn render_table(v: &Value) -> String {
    let cell = |x: &Value| match x {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) => m.iter().map(|(k, x)| format!("{k}\t{}\n", cell(x))).collect(),
        other => format!("{}\n", cell(other)),
    }
}
