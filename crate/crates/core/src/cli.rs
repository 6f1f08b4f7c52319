//! `histlab` command-line front end.
//!
//! Exit codes: 0 satisfied, 1 not satisfied, 2 input error, 3 theorem
//! violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::document::{format_complex, ColumnSummary, FamilyDocument, ReportDocument, TwoLevelReport, WitnessSummary};
use crate::histories::{classify, Classification, ClassificationMode, HistoryFamily};
use crate::numerics::{Tolerance, DEFAULT_EPS};
use crate::spin::{norm, Bloch};
use crate::theorems::{
    generate_maximal_family, max_noncongruent_bound, run_theorem_suite, two_level_condition, two_level_family,
    two_level_value, TheoremError, TwoLevelSpec, TWO_LEVEL_BAND,
};
use crate::trajectory::{build_graph, to_dot};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_SATISFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "histlab",
    version,
    about = "Decoherence checks for finite families of quantum histories"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance; overrides the value in the family file.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Seed for randomized output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Append wall-clock timing to reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the decoherence functional and classify the family.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ClassificationMode::Weak)]
        mode: ClassificationMode,
        /// Include the full D matrix in JSON output.
        #[arg(long)]
        d_matrix: bool,
    },
    /// Write the trajectory graph in DOT format.
    Graph { file: PathBuf },
    /// Run every structural check on the family.
    Theorems { file: PathBuf },
    /// Write a family that reaches the bound on noncongruent transitions.
    Witness {
        #[arg(short, long)]
        n: usize,
    },
    /// Compare the geometric two-level condition with the full functional.
    Twolevel {
        /// Initial polarization, e.g. 0,0,1.
        #[arg(long, allow_hyphen_values = true)]
        i: String,
        /// First measurement axis.
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// Second measurement axis.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.to_string(),
    }
}

struct Output {
    /// Primary output (report, DOT, family file).
    primary: String,
    /// Human summary that accompanies a primary output written elsewhere.
    note: Option<String>,
    code: i32,
}

/// Parses arguments, runs the command and returns the exit code. Output goes
/// to the given writers so the front end can be driven from tests.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let started = Instant::now();
    match dispatch(&cli, started) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out.primary) {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    return EXIT_INPUT;
                }
                if let Some(note) = &out.note {
                    let _ = write!(stdout, "{note}");
                }
            } else {
                let _ = write!(stdout, "{}", out.primary);
                if let Some(note) = &out.note {
                    let _ = write!(stderr, "{note}");
                }
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, started: Instant) -> Result<Output, Failure> {
    match &cli.command {
        Command::Check { file, mode, d_matrix } => cmd_check(cli, file, *mode, *d_matrix, started),
        Command::Graph { file } => cmd_graph(cli, file),
        Command::Theorems { file } => cmd_theorems(cli, file, started),
        Command::Witness { n } => cmd_witness(cli, *n),
        Command::Twolevel { i, n, f } => cmd_twolevel(cli, i, n, f),
    }
}

fn load(path: &Path, eps_flag: Option<f64>) -> Result<(HistoryFamily, Tolerance), Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let doc = FamilyDocument::from_json(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let tol = doc
        .tolerance(eps_flag)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let family = doc
        .to_family(tol)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok((family, tol))
}

fn finish(cli: &Cli, mut report: ReportDocument, text: String, started: Instant, code: i32) -> Output {
    if cli.timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    let primary = if cli.json {
        report.to_json()
    } else {
        let mut text = text;
        if let Some(ms) = report.timing_ms {
            let _ = writeln!(text, "time: {ms:.1} ms");
        }
        text
    };
    Output {
        primary,
        note: None,
        code,
    }
}

fn cmd_check(
    cli: &Cli,
    file: &Path,
    mode: ClassificationMode,
    d_matrix: bool,
    started: Instant,
) -> Result<Output, Failure> {
    let (family, tol) = load(file, cli.eps)?;
    let decoherence = classify(&family, mode, tol).map_err(input_error)?;
    let satisfied = decoherence.satisfied();
    let report = ReportDocument::new("check", tol.eps()).with_decoherence(&decoherence, d_matrix);

    let f = &decoherence.functional;
    let mut text = String::new();
    let _ = writeln!(text, "classification: {}", decoherence.classification.as_str());
    let verdict = if satisfied { "satisfied" } else { "not satisfied" };
    let _ = writeln!(text, "mode: {} ({verdict})", mode_name(mode));
    let _ = writeln!(text, "eps: {:e}", tol.eps());
    let _ = writeln!(text, "histories: {} (pruned {})", f.histories.len(), f.pruned);
    for (h, p) in f.histories.iter().zip(&f.probabilities) {
        let _ = writeln!(text, "  {h}  p = {p:.6}");
    }
    let _ = writeln!(text, "total probability: {:.9}", f.total_probability());
    let _ = writeln!(text, "violations: {}", decoherence.violations.len());
    for v in &decoherence.violations {
        let _ = writeln!(text, "  {} vs {}: D = {}", v.alpha, v.beta, format_complex(v.value));
    }
    let code = if satisfied { EXIT_OK } else { EXIT_NOT_SATISFIED };
    Ok(finish(cli, report, text, started, code))
}

fn mode_name(mode: ClassificationMode) -> &'static str {
    match mode {
        ClassificationMode::Weak => "weak",
        ClassificationMode::Medium => "medium",
    }
}

fn cmd_graph(cli: &Cli, file: &Path) -> Result<Output, Failure> {
    let (family, tol) = load(file, cli.eps)?;
    let g = build_graph(&family, tol).map_err(input_error)?;
    let labels = g.connectivity();
    let columns: Vec<ColumnSummary> = (0..g.column_count())
        .map(|c| ColumnSummary {
            column: c,
            connected: labels.connected_count(c),
            singly: labels.singly_count(c),
            doubly: labels.doubly_count(c),
        })
        .collect();
    let note = if cli.json {
        let mut report = ReportDocument::new("graph", tol.eps());
        report.connectivity = Some(columns);
        report.to_json()
    } else {
        let mut s = String::from("column  connected  singly  doubly\n");
        for c in &columns {
            let _ = writeln!(
                s,
                "{:>6}  {:>9}  {:>6}  {:>6}",
                c.column, c.connected, c.singly, c.doubly
            );
        }
        s
    };
    Ok(Output {
        primary: to_dot(&g, &labels),
        note: Some(note),
        code: EXIT_OK,
    })
}

fn cmd_theorems(cli: &Cli, file: &Path, started: Instant) -> Result<Output, Failure> {
    let (family, tol) = load(file, cli.eps)?;
    let suite = run_theorem_suite(&family, tol).map_err(|e| match e {
        TheoremError::Counterexample(why) => Failure {
            code: EXIT_VIOLATION,
            message: format!("counterexample: {why}"),
        },
        other => input_error(other),
    })?;
    let mut text = String::new();
    let _ = writeln!(text, "classification: {}", suite.classification.as_str());
    for c in &suite.checks {
        let _ = write!(text, "{:<17} {}", c.name, c.verdict);
        if c.summary.is_empty() {
            let _ = writeln!(text);
        } else {
            let _ = writeln!(text, "  [{}]", c.summary);
        }
    }
    for r in &suite.recurrences {
        let _ = writeln!(
            text,
            "recurrence: {} absent at column {}, back at {}",
            r.event, r.absent_at, r.recurs_at
        );
    }
    if let Some(n) = suite.noncongruent {
        let _ = writeln!(text, "noncongruent transitions: {n}");
    }
    let code = if suite.has_violation() { EXIT_VIOLATION } else { EXIT_OK };
    let mut report = ReportDocument::new("theorems", tol.eps());
    report.classification = Some(suite.classification);
    report.theorems = Some(suite);
    Ok(finish(cli, report, text, started, code))
}

fn cmd_witness(cli: &Cli, n: usize) -> Result<Output, Failure> {
    let tol = Tolerance::new(cli.eps.unwrap_or(DEFAULT_EPS)).map_err(input_error)?;
    let witness = generate_maximal_family(n)
        .and_then(|w| w.in_random_frame(cli.seed, tol))
        .map_err(|e| match e {
            TheoremError::Domain(why) => input_error(why),
            other => Failure {
                code: EXIT_VIOLATION,
                message: other.to_string(),
            },
        })?;
    let primary = FamilyDocument::from_family(&witness.family, cli.eps).to_json();
    let bound = max_noncongruent_bound(n).map_err(input_error)?;
    let note = if cli.json {
        let mut report = ReportDocument::new("witness", tol.eps());
        report.classification = Some(Classification::Weak);
        report.witness = Some(WitnessSummary {
            n,
            seed: cli.seed,
            noncongruent: witness.noncongruent,
            bound,
            transitions: witness.transitions.clone(),
        });
        report.to_json()
    } else {
        format!(
            "witness n = {n}, seed {}: {} event sets, {} noncongruent transitions (bound {bound})\n",
            cli.seed,
            witness.family.event_sets().len(),
            witness.noncongruent
        )
    };
    Ok(Output {
        primary,
        note: Some(note),
        code: EXIT_OK,
    })
}

/// Comma-separated reals; rescaled to unit length when within 1e-6 of it.
pub fn parse_bloch(text: &str) -> Result<Bloch, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {text:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
    }
    let len = norm(v);
    if !len.is_finite() || (len - 1.0).abs() > 1e-6 {
        return Err(format!("{text:?} has length {len}, not a unit vector"));
    }
    Ok([v[0] / len, v[1] / len, v[2] / len])
}

fn cmd_twolevel(cli: &Cli, i: &str, n: &str, f: &str) -> Result<Output, Failure> {
    let tol = Tolerance::new(cli.eps.unwrap_or(DEFAULT_EPS)).map_err(input_error)?;
    let (i, n, f) = (
        parse_bloch(i).map_err(|e| input_error(format!("--i: {e}")))?,
        parse_bloch(n).map_err(|e| input_error(format!("--n: {e}")))?,
        parse_bloch(f).map_err(|e| input_error(format!("--f: {e}")))?,
    );
    let spec = TwoLevelSpec::new(i, n, f, Tolerance::new(1e-6).expect("valid")).map_err(input_error)?;
    let value = two_level_value(&spec);
    let condition = two_level_condition(&spec, tol);
    let classification = classify(&two_level_family(&spec, tol), ClassificationMode::Weak, tol)
        .map_err(input_error)?
        .classification;
    let weak = classification != Classification::None;
    let (agreement, code) = if weak == condition {
        ("agree", EXIT_OK)
    } else if value.abs() <= TWO_LEVEL_BAND {
        ("disagree within boundary band", EXIT_OK)
    } else {
        ("disagree", EXIT_VIOLATION)
    };
    let mut report = ReportDocument::new("twolevel", tol.eps());
    report.classification = Some(classification);
    report.two_level = Some(TwoLevelReport {
        i,
        n,
        f,
        value: value + 0.0,
        condition,
        agreement: agreement.to_string(),
    });
    let text = format!(
        "value: {:.9}\nclassification: {}\nagreement: {agreement}\n",
        value + 0.0,
        classification.as_str()
    );
    Ok(finish(cli, report, text, Instant::now(), code))
}
