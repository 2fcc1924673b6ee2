//! Command-line front door for the `alphafrac` library.
//!
//! Every subcommand is a thin adapter: it parses flags, calls the library,
//! and formats the result as text, CSV or JSON. No numerical logic lives
//! here. Exit codes: 0 success, 1 numerical failure (with a one-line
//! `ERROR <kind>: ...` diagnostic on stderr), 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use alphafrac::expr::Expr;
use alphafrac::integral::{alpha_integral, check_inverse, InverseError, QuadError};
use alphafrac::numeric::{
    alpha_deriv_at_zero, alpha_deriv_higher, alpha_deriv_k, alpha_deriv_limit, Alpha,
    DerivEstimate, LimitConfig, NumericError, Truncation,
};
use alphafrac::symbolic::{alpha_deriv_closed, theorem4_table, theorem5_table, SymbolicError, TableEntry};
use alphafrac::theorems::{
    check_rules_batch, find_mvt_point, find_rolle_point, RulesReport, WitnessError, WitnessResult,
    ALL_IDENTITIES,
};
use alphafrac::{eval, parse, DomainError, NotDifferentiable, ParseError};

#[derive(Parser, Debug)]
#[command(
    name = "alphafrac",
    version,
    about = "Fractional derivatives and integrals of order alpha, computed from the limit definition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Order-alpha derivative of an expression at a point
    Deriv(DerivArgs),
    /// Fractional integral of an expression over [a, b]
    Integ(IntegArgs),
    /// Inverse-property residual |D^alpha(I^alpha_a f)(t) - f(t)|
    Check(CheckArgs),
    /// Witness point of Rolle's theorem on [a, b]
    Rolle(WitnessArgs),
    /// Witness point of the mean value theorem on [a, b]
    Mvt(WitnessArgs),
    /// Verify the built-in identity tables or the rule identities
    Table(TableArgs),
    /// Derivative curve over a grid, with the closed form alongside
    Plot(PlotArgs),
}

/// `--k` accepts a nonnegative integer or `inf`.
#[derive(Debug, Clone, Copy)]
pub struct KArg(pub Truncation);

impl FromStr for KArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            Ok(KArg(Truncation::Infinite))
        } else {
            s.parse::<u32>()
                .map(|k| KArg(Truncation::Finite(k)))
                .map_err(|_| format!("expected a nonnegative integer or \"inf\", got \"{s}\""))
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Theorem4,
    Theorem5,
    Rules,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct DerivArgs {
    /// Function of t, e.g. "t^2" or "sin(2*t)/sqrt(t)"
    #[arg(long)]
    pub expr: String,
    /// Order of the derivative (any positive real)
    #[arg(long)]
    pub alpha: f64,
    /// Evaluation point; 0 invokes the t -> 0+ extension
    #[arg(long)]
    pub at: f64,
    /// Truncation of the exponential family: integer or "inf"
    #[arg(long, default_value = "inf")]
    pub k: KArg,
    /// Convergence target of the extrapolation
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct IntegArgs {
    #[arg(long)]
    pub expr: String,
    /// Order of the integral (alpha > 0)
    #[arg(long)]
    pub alpha: f64,
    /// Lower bound (a >= 0; a = 0 uses the substituted quadrature)
    #[arg(long)]
    pub a: f64,
    /// Upper bound
    #[arg(long)]
    pub b: f64,
    /// Quadrature tolerance (mixed absolute/relative)
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct CheckArgs {
    #[arg(long)]
    pub expr: String,
    /// Order, in (0, 1)
    #[arg(long)]
    pub alpha: f64,
    /// Lower bound of the integral
    #[arg(long)]
    pub a: f64,
    /// Point where the residual is evaluated
    #[arg(long)]
    pub at: f64,
    /// Quadrature tolerance used for every integral sample
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct WitnessArgs {
    #[arg(long)]
    pub expr: String,
    /// Order, in (0, 1]
    #[arg(long)]
    pub alpha: f64,
    /// Left endpoint (a > 0)
    #[arg(long)]
    pub a: f64,
    /// Right endpoint (b > a)
    #[arg(long)]
    pub b: f64,
    /// Convergence target of the derivative estimates
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct TableArgs {
    /// Order, in (0, 1]
    #[arg(long)]
    pub alpha: f64,
    /// Which table to verify
    #[arg(long, value_enum)]
    pub which: Which,
    /// Coefficient a of the elementary-function table
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Pass threshold on the residuals
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct PlotArgs {
    #[arg(long)]
    pub expr: String,
    /// Order, in (0, 1]
    #[arg(long)]
    pub alpha: f64,
    /// First grid point (must be > 0)
    #[arg(long)]
    pub from: f64,
    /// Last grid point
    #[arg(long)]
    pub to: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Truncation of the exponential family: integer or "inf"
    #[arg(long, default_value = "inf")]
    pub k: KArg,
    /// Convergence target of the extrapolation
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

mod error {
    use super::*;

    /// Anything a subcommand can fail with, tagged for the `ERROR <kind>:`
    /// diagnostic line.
    #[derive(Debug)]
    pub enum CliError {
        Parse(ParseError),
        Domain(DomainError),
        NotDifferentiable(NotDifferentiable),
        Numeric(NumericError),
        Quad(QuadError),
        Symbolic(SymbolicError),
        Witness(WitnessError),
        Io(std::io::Error),
        Usage(String),
    }

    fn numeric_kind(e: &NumericError) -> &'static str {
        match e {
            NumericError::Domain(_) => "Domain",
            NumericError::NotDifferentiable(_) => "NotDifferentiable",
            NumericError::InvalidAlpha(_) => "InvalidAlpha",
            NumericError::NonConvergence { .. } => "NonConvergence",
            NumericError::InvalidK => "InvalidK",
            NumericError::InvalidOrder { .. } => "InvalidOrder",
            NumericError::InvalidPoint(_) => "InvalidPoint",
            NumericError::InvalidConfig(_) => "InvalidConfig",
        }
    }

    impl CliError {
        /// Machine-parsable kind tag of the `ERROR <kind>: ...` line.
        pub fn kind(&self) -> &'static str {
            match self {
                CliError::Parse(_) => "Parse",
                CliError::Domain(_) => "Domain",
                CliError::NotDifferentiable(_) => "NotDifferentiable",
                CliError::Numeric(e) => numeric_kind(e),
                CliError::Quad(e) => match e {
                    QuadError::Singularity { .. } => "Singularity",
                    QuadError::InvalidAlpha { .. } => "InvalidAlpha",
                    QuadError::InvalidInterval { .. } => "InvalidInterval",
                    QuadError::InvalidTolerance { .. } => "InvalidTolerance",
                    QuadError::BudgetExceeded { .. } => "BudgetExceeded",
                    QuadError::Domain(_) => "Domain",
                },
                CliError::Symbolic(e) => match e {
                    SymbolicError::NotDifferentiable(_) => "NotDifferentiable",
                    SymbolicError::InvalidAlpha(_) => "InvalidAlpha",
                },
                CliError::Witness(e) => match e {
                    WitnessError::PreconditionViolation { .. } => "Precondition",
                    WitnessError::NoSignChange { .. } => "NoSignChange",
                    WitnessError::InvalidInterval { .. } => "InvalidInterval",
                    WitnessError::InvalidAlpha(_) => "InvalidAlpha",
                    WitnessError::Numeric(n) => numeric_kind(n),
                    WitnessError::Domain(_) => "Domain",
                },
                CliError::Io(_) => "Io",
                CliError::Usage(_) => "Usage",
            }
        }
    }

    impl std::fmt::Display for CliError {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            match self {
                CliError::Parse(e) => write!(f, "{e}"),
                CliError::Domain(e) => write!(f, "{e}"),
                CliError::NotDifferentiable(e) => write!(f, "{e}"),
                CliError::Numeric(e) => write!(f, "{e}"),
                CliError::Quad(e) => write!(f, "{e}"),
                CliError::Symbolic(e) => write!(f, "{e}"),
                CliError::Witness(e) => write!(f, "{e}"),
                CliError::Io(e) => write!(f, "{e}"),
                CliError::Usage(m) => write!(f, "{m}"),
            }
        }
    }

    impl From<ParseError> for CliError {
        fn from(e: ParseError) -> Self {
            CliError::Parse(e)
        }
    }
    impl From<DomainError> for CliError {
        fn from(e: DomainError) -> Self {
            CliError::Domain(e)
        }
    }
    impl From<NotDifferentiable> for CliError {
        fn from(e: NotDifferentiable) -> Self {
            CliError::NotDifferentiable(e)
        }
    }
    impl From<NumericError> for CliError {
        fn from(e: NumericError) -> Self {
            CliError::Numeric(e)
        }
    }
    impl From<QuadError> for CliError {
        fn from(e: QuadError) -> Self {
            CliError::Quad(e)
        }
    }
    impl From<SymbolicError> for CliError {
        fn from(e: SymbolicError) -> Self {
            CliError::Symbolic(e)
        }
    }
    impl From<WitnessError> for CliError {
        fn from(e: WitnessError) -> Self {
            CliError::Witness(e)
        }
    }
    impl From<InverseError> for CliError {
        fn from(e: InverseError) -> Self {
            match e {
                InverseError::Quad(q) => CliError::Quad(q),
                InverseError::Numeric(n) => CliError::Numeric(n),
            }
        }
    }
    impl From<std::io::Error> for CliError {
        fn from(e: std::io::Error) -> Self {
            CliError::Io(e)
        }
    }
}

use error::CliError as Error;

/// 17-significant-digit decimal rendering used in CSV output.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs the CLI against `argv`, writing results to `stdout` and diagnostics
/// to `stderr`; returns the process exit code.
pub fn run<O, E, I, S>(argv: I, stdout: &mut O, stderr: &mut E) -> i32
where
    O: Write,
    E: Write,
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                2
            } else {
                // --help / --version
                let _ = write!(stdout, "{e}");
                0
            };
        }
    };
    match execute(cli.command) {
        Ok(Output { text, path }) => {
            let outcome = match path {
                Some(p) => std::fs::write(&p, text.as_bytes()).map_err(Error::from),
                None => stdout.write_all(text.as_bytes()).map_err(Error::from),
            };
            match outcome {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "ERROR {}: {}", e.kind(), e);
                    1
                }
            }
        }
        // flag combinations clap cannot see are still usage errors
        Err(Error::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "ERROR {}: {}", e.kind(), e);
            1
        }
    }
}

struct Output {
    text: String,
    path: Option<PathBuf>,
}

fn execute(command: Command) -> Result<Output, Error> {
    match command {
        Command::Deriv(args) => cmd_deriv(args),
        Command::Integ(args) => cmd_integ(args),
        Command::Check(args) => cmd_check(args),
        Command::Rolle(args) => cmd_witness(args, true),
        Command::Mvt(args) => cmd_witness(args, false),
        Command::Table(args) => cmd_table(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

#[derive(Serialize)]
struct DerivOut {
    value: f64,
    err_estimate: f64,
    levels_used: usize,
    converged: bool,
    continuity_residual: f64,
}

impl From<DerivEstimate<f64>> for DerivOut {
    fn from(e: DerivEstimate<f64>) -> Self {
        DerivOut {
            value: e.value,
            err_estimate: e.err_estimate,
            levels_used: e.levels_used,
            converged: e.converged,
            continuity_residual: e.continuity_residual,
        }
    }
}

fn cmd_deriv(args: DerivArgs) -> Result<Output, Error> {
    let f: Expr = parse(&args.expr)?;
    let alpha = Alpha::from_value(args.alpha).map_err(NumericError::from)?;
    let cfg = LimitConfig::with_target_rtol(args.tol);

    let est = if args.at == 0.0 {
        if args.k.0 != Truncation::Infinite {
            return Err(Error::Usage(
                "--at 0 supports only --k inf (the t -> 0+ extension of the main definition)"
                    .to_string(),
            ));
        }
        alpha_deriv_at_zero(&f, alpha, &cfg)?
    } else if alpha.integer_part() == 0 {
        match args.k.0 {
            Truncation::Infinite => alpha_deriv_limit(&f, args.at, alpha, &cfg)?,
            k => alpha_deriv_k(&f, args.at, alpha, k, &cfg)?,
        }
    } else {
        match args.k.0 {
            Truncation::Infinite => alpha_deriv_higher(&f, args.at, alpha, &cfg)?,
            // the truncated family is only defined on (0, 1]
            k => alpha_deriv_k(&f, args.at, alpha, k, &cfg)?,
        }
    };

    let out: DerivOut = est.into();
    let text = match args.format {
        Format::Text => format!("{} ± {:.3e}\n", out.value, out.err_estimate),
        Format::Csv => format!(
            "value,err_estimate,levels_used,converged,continuity_residual\n{},{},{},{},{}\n",
            sig17(out.value),
            sig17(out.err_estimate),
            out.levels_used,
            out.converged,
            sig17(out.continuity_residual),
        ),
        Format::Json => serde_json::to_string_pretty(&out).expect("serializable") + "\n",
    };
    Ok(Output {
        text,
        path: args.out,
    })
}

#[derive(Serialize)]
struct IntegOut {
    value: f64,
    err_estimate: f64,
    subdivisions: usize,
    used_substitution: bool,
}

fn cmd_integ(args: IntegArgs) -> Result<Output, Error> {
    let f: Expr = parse(&args.expr)?;
    let r = alpha_integral(&f, args.a, args.b, args.alpha, args.tol)?;
    let out = IntegOut {
        value: r.value,
        err_estimate: r.err_estimate,
        subdivisions: r.subdivisions,
        used_substitution: r.used_substitution,
    };
    let text = match args.format {
        Format::Text => format!("{} ± {:.3e}\n", out.value, out.err_estimate),
        Format::Csv => format!(
            "value,err_estimate,subdivisions,used_substitution\n{},{},{},{}\n",
            sig17(out.value),
            sig17(out.err_estimate),
            out.subdivisions,
            out.used_substitution,
        ),
        Format::Json => serde_json::to_string_pretty(&out).expect("serializable") + "\n",
    };
    Ok(Output {
        text,
        path: args.out,
    })
}

#[derive(Serialize)]
struct CheckOut {
    residual: f64,
}

fn cmd_check(args: CheckArgs) -> Result<Output, Error> {
    let f: Expr = parse(&args.expr)?;
    let cfg = LimitConfig::default();
    let residual = check_inverse(&f, args.a, args.at, args.alpha, &cfg, args.tol)?;
    let text = match args.format {
        Format::Text => format!("{residual}\n"),
        Format::Csv => format!("residual\n{}\n", sig17(residual)),
        Format::Json => {
            serde_json::to_string_pretty(&CheckOut { residual }).expect("serializable") + "\n"
        }
    };
    Ok(Output {
        text,
        path: args.out,
    })
}

#[derive(Serialize)]
struct WitnessOut {
    c: f64,
    residual: f64,
    bracket_lo: f64,
    bracket_hi: f64,
    iterations: usize,
    brackets_detected: usize,
}

impl From<WitnessResult<f64>> for WitnessOut {
    fn from(w: WitnessResult<f64>) -> Self {
        WitnessOut {
            c: w.c,
            residual: w.residual,
            bracket_lo: w.bracketing_interval.0,
            bracket_hi: w.bracketing_interval.1,
            iterations: w.iterations,
            brackets_detected: w.brackets_detected,
        }
    }
}

fn cmd_witness(args: WitnessArgs, rolle: bool) -> Result<Output, Error> {
    let f: Expr = parse(&args.expr)?;
    let cfg = LimitConfig::with_target_rtol(args.tol);
    let w = if rolle {
        find_rolle_point(&f, args.a, args.b, args.alpha, &cfg)?
    } else {
        find_mvt_point(&f, args.a, args.b, args.alpha, &cfg)?
    };
    let out: WitnessOut = w.into();
    let text = match args.format {
        Format::Text => format!(
            "c = {}\nresidual = {:.3e}\nbracket = [{}, {}]\niterations = {}\nbrackets_detected = {}\n",
            out.c, out.residual, out.bracket_lo, out.bracket_hi, out.iterations, out.brackets_detected,
        ),
        Format::Csv => format!(
            "c,residual,bracket_lo,bracket_hi,iterations,brackets_detected\n{},{},{},{},{},{}\n",
            sig17(out.c),
            sig17(out.residual),
            sig17(out.bracket_lo),
            sig17(out.bracket_hi),
            out.iterations,
            out.brackets_detected,
        ),
        Format::Json => serde_json::to_string_pretty(&out).expect("serializable") + "\n",
    };
    Ok(Output {
        text,
        path: args.out,
    })
}

#[derive(Serialize)]
struct TableRowOut {
    label: String,
    max_residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct RuleRowOut {
    pair: usize,
    identity: String,
    alpha: f64,
    t: f64,
    lhs: f64,
    rhs: f64,
    residual: f64,
    flagged: bool,
}

/// Verification grid of the `table` command.
fn table_grid() -> Vec<f64> {
    (0..10).map(|i| 0.5 + 1.5 * i as f64 / 9.0).collect()
}

/// Built-in (f, g) corpus of the `table --which rules` mode.
pub fn rules_corpus() -> Vec<(Expr, Expr)> {
    [
        ("t^2", "sin(t)"),
        ("t^3-2*t+1", "cos(t)"),
        ("sqrt(t)", "exp(t/2)"),
        ("1", "1"),
        ("t", "ln(1+t)"),
        ("sin(t)", "t^2+1"),
        ("exp(0.3*t)", "t^0.5"),
        ("2*t+1", "t^3"),
    ]
    .iter()
    .map(|(f, g)| (parse(f).expect("built-in"), parse(g).expect("built-in")))
    .collect()
}

fn verify_table(
    entries: &[TableEntry<f64>],
    alpha: Alpha<f64>,
    tol: f64,
) -> Result<Vec<TableRowOut>, Error> {
    // tight estimator target so the comparison is dominated by the identity,
    // not the estimator
    let cfg = LimitConfig::with_target_rtol(1e-10);
    let mut rows = Vec::new();
    for entry in entries {
        let mut max_residual = 0.0f64;
        for t in table_grid() {
            let est = alpha_deriv_limit(&entry.function, t, alpha, &cfg)?;
            let want = eval(&entry.expected, t)?;
            max_residual = max_residual.max((est.value - want).abs());
        }
        rows.push(TableRowOut {
            label: entry.label.to_string(),
            max_residual,
            pass: max_residual <= tol,
        });
    }
    Ok(rows)
}

fn cmd_table(args: TableArgs) -> Result<Output, Error> {
    match args.which {
        Which::Theorem4 | Which::Theorem5 => {
            let entries = if args.which == Which::Theorem4 {
                theorem4_table(args.alpha, args.a)?
            } else {
                theorem5_table(args.alpha)?
            };
            let alpha = Alpha::from_value(args.alpha).map_err(NumericError::from)?;
            let rows = verify_table(&entries, alpha, args.tol)?;
            let text = match args.format {
                Format::Text => {
                    let mut s = String::new();
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{}: max_residual = {:.3e} [{}]",
                            r.label,
                            r.max_residual,
                            if r.pass { "pass" } else { "FAIL" }
                        );
                    }
                    s
                }
                Format::Csv => {
                    let mut s = String::from("label,max_residual,pass\n");
                    for r in &rows {
                        let _ = writeln!(s, "{},{},{}", r.label, sig17(r.max_residual), r.pass);
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&rows).expect("serializable") + "\n",
            };
            Ok(Output {
                text,
                path: args.out,
            })
        }
        Which::Rules => {
            let corpus = rules_corpus();
            let report: RulesReport =
                check_rules_batch(&corpus, &[args.alpha], &[0.3, 0.7, 1.0, 2.0, 5.0], &LimitConfig::default());
            let text = format_rules_report(&report, args.format, args.tol);
            Ok(Output {
                text,
                path: args.out,
            })
        }
    }
}

fn format_rules_report(report: &RulesReport, format: Format, tol: f64) -> String {
    match format {
        Format::Text => {
            let mut s = String::new();
            for id in ALL_IDENTITIES {
                if let Some(max) = report.max_residual(id) {
                    let rows = report.rows.iter().filter(|r| r.identity == id).count();
                    let _ = writeln!(
                        s,
                        "{id}: rows = {rows}, max_residual = {max:.3e} [{}]",
                        if max <= tol { "pass" } else { "FAIL" }
                    );
                }
            }
            let _ = writeln!(
                s,
                "flagged = {}, skipped = {}",
                report.flagged_count(),
                report.skipped
            );
            s
        }
        Format::Csv => {
            let mut s = String::from("pair,identity,alpha,t,lhs,rhs,residual,flagged\n");
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.pair_index,
                    r.identity,
                    r.alpha,
                    r.t,
                    sig17(r.lhs),
                    sig17(r.rhs),
                    sig17(r.residual),
                    r.flagged
                );
            }
            s
        }
        Format::Json => {
            let rows: Vec<RuleRowOut> = report
                .rows
                .iter()
                .map(|r| RuleRowOut {
                    pair: r.pair_index,
                    identity: r.identity.to_string(),
                    alpha: r.alpha,
                    t: r.t,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    residual: r.residual,
                    flagged: r.flagged,
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("serializable") + "\n"
        }
    }
}

#[derive(Serialize)]
struct PlotRow {
    t: f64,
    deriv_numeric: f64,
    deriv_closed: f64,
    abs_diff: f64,
}

fn cmd_plot(args: PlotArgs) -> Result<Output, Error> {
    let f: Expr = parse(&args.expr)?;
    if args.n == 0 {
        return Err(Error::Usage("--n must be at least 1".to_string()));
    }
    let alpha = Alpha::from_value(args.alpha).map_err(NumericError::from)?;
    if alpha.integer_part() != 0 {
        return Err(Error::Numeric(NumericError::InvalidOrder {
            alpha: args.alpha,
            requirement: "plot compares against the closed form t^{1-alpha} f', defined for alpha in (0, 1]",
        }));
    }
    let cfg = LimitConfig::with_target_rtol(args.tol);
    let closed = alpha_deriv_closed(&f, args.alpha)?;

    let mut rows = Vec::with_capacity(args.n);
    for i in 0..args.n {
        let t = if args.n == 1 {
            args.from
        } else {
            args.from + (args.to - args.from) * i as f64 / (args.n - 1) as f64
        };
        let est = match args.k.0 {
            Truncation::Infinite => alpha_deriv_limit(&f, t, alpha, &cfg)?,
            k => alpha_deriv_k(&f, t, alpha, k, &cfg)?,
        };
        let closed_v = eval(&closed, t)?;
        rows.push(PlotRow {
            t,
            deriv_numeric: est.value,
            deriv_closed: closed_v,
            abs_diff: (est.value - closed_v).abs(),
        });
    }

    let text = match args.format {
        Format::Text => {
            let mut s = String::from("t deriv_numeric deriv_closed abs_diff\n");
            for r in &rows {
                let _ = writeln!(s, "{} {} {} {:.3e}", r.t, r.deriv_numeric, r.deriv_closed, r.abs_diff);
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("t,deriv_numeric,deriv_closed,abs_diff\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    sig17(r.t),
                    sig17(r.deriv_numeric),
                    sig17(r.deriv_closed),
                    sig17(r.abs_diff)
                );
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("serializable") + "\n",
    };
    Ok(Output {
        text,
        path: args.out,
    })
}
