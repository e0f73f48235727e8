use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mobius_core::analysis::{
    self, banding_report, bound_check, jelinek_check_with, loglog_export, principal_series,
    sign_check, CheckReport, OddForm, SeriesRecord, Violation,
};
use mobius_core::sweep::{self, SweepReport};
use mobius_core::{
    classify_oscillation, Engine, Error, MobiusCache, Oracle, OscillationSolver, Permutation,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "mobius",
    version,
    about = "Möbius function of the permutation pattern poset"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print μ(σ, π).
    Mobius {
        sigma: Permutation,
        pi: Permutation,
        #[arg(long, value_enum, default_value_t = EngineKind::Auto)]
        engine: EngineKind,
        /// Print the shape and contribution tables (oscillation engine).
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Dump the closed interval [σ, π] with μ(σ, ·).
    Interval {
        sigma: Permutation,
        pi: Permutation,
        #[command(flatten)]
        common: Common,
    },
    /// List every nonempty permutation contained in π.
    Downset {
        pi: Permutation,
        #[command(flatten)]
        common: Common,
    },
    /// μ(1, W_n) and μ(1, M_n) for 4 ≤ n ≤ n-max.
    Series {
        #[arg(long)]
        n_max: usize,
        /// Emit (ln n, ln |μ(1, W_n)|) instead of the series.
        #[arg(long)]
        loglog: bool,
        /// Length window for --loglog.
        #[arg(long, value_parser = parse_range)]
        range: Option<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite. Exits 3 when violations are found.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest length checked by the sign and bound suites.
        #[arg(long)]
        n_max: Option<usize>,
        /// Half-lengths for jelinek, lengths for banding.
        #[arg(long, value_parser = parse_range)]
        range: Option<(usize, usize)>,
        /// Largest upper bound in the crosscheck suite.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Largest upper bound the naive engine accepts.
    #[arg(long, default_value_t = mobius_core::DEFAULT_DOWNSET_CAP)]
    downset_cap: usize,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum EngineKind {
    Naive,
    General,
    Oscillation,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Crosscheck,
    Sign,
    Bound,
    Jelinek,
    Banding,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if hi < lo {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

/// How a command finished.
enum Outcome {
    Clean,
    Violations,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(io::Error),
    Csv(csv::Error),
    Json(serde_json::Error),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o: {e}"),
            Failure::Csv(e) => write!(f, "csv: {e}"),
            Failure::Json(e) => write!(f, "json: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}
impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}
impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Csv(e)
    }
}
impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Json(e)
    }
}

type Run = Result<Outcome, Failure>;

fn open(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct MobiusOutput<'a> {
    sigma: &'a Permutation,
    pi: &'a Permutation,
    engine: EngineKind,
    mu: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<mobius_core::OscillationTrace>,
}

fn cmd_mobius(
    sigma: &Permutation,
    pi: &Permutation,
    engine: EngineKind,
    trace: bool,
    common: &Common,
) -> Run {
    let oracle = Oracle::with_cap(common.downset_cap);
    let mut trace_out = None;
    let mu = match engine {
        EngineKind::Naive => oracle.mobius_naive(sigma, pi)?,
        EngineKind::General => Engine::new(oracle)
            .with_cache(MobiusCache::from_env())
            .with_oscillation(false)
            .mobius(sigma, pi)?,
        EngineKind::Auto => Engine::new(oracle)
            .with_cache(MobiusCache::from_env())
            .mobius(sigma, pi)?,
        EngineKind::Oscillation => {
            let id = classify_oscillation(pi)
                .ok_or_else(|| Error::NotAnOscillation(pi.to_string()))?
                .oscillation_id();
            let mut solver = OscillationSolver::new(sigma)?;
            if trace {
                let t = solver.trace(id)?;
                let mu = t.value;
                trace_out = Some(t);
                mu
            } else {
                solver.mobius(id)?
            }
        }
    };
    let mut w = open(&common.out)?;
    match common.format {
        Format::Text => {
            if let Some(t) = &trace_out {
                write!(w, "{t}")?;
            }
            writeln!(w, "{mu}")?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["sigma", "pi", "mu"])?;
            c.write_record([sigma.to_string(), pi.to_string(), mu.to_string()])?;
            c.flush()?;
        }
        Format::Json => write_json(
            &mut w,
            &MobiusOutput {
                sigma,
                pi,
                engine,
                mu,
                trace: trace_out,
            },
        )?,
    }
    w.flush()?;
    Ok(Outcome::Clean)
}

#[derive(Serialize)]
struct Row {
    length: usize,
    permutation: Permutation,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<i64>,
}

fn write_rows(rows: &[Row], common: &Common) -> Run {
    let mut w = open(&common.out)?;
    match common.format {
        Format::Text => {
            for r in rows {
                match r.mu {
                    Some(mu) => writeln!(w, "{}\t{}\t{}", r.length, r.permutation, mu)?,
                    None => writeln!(w, "{}\t{}", r.length, r.permutation)?,
                }
            }
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            for r in rows {
                c.serialize(r)?;
            }
            c.flush()?;
        }
        Format::Json => write_json(&mut w, &rows)?,
    }
    w.flush()?;
    Ok(Outcome::Clean)
}

fn cmd_interval(sigma: &Permutation, pi: &Permutation, common: &Common) -> Run {
    let table = Oracle::with_cap(common.downset_cap).interval_with_mobius(sigma, pi)?;
    let rows: Vec<Row> = table
        .iter()
        .map(|p| Row {
            length: p.len(),
            permutation: p.clone(),
            mu: table.mu_of(p),
        })
        .collect();
    write_rows(&rows, common)
}

fn cmd_downset(pi: &Permutation, common: &Common) -> Run {
    let down = Oracle::with_cap(common.downset_cap).downset(pi)?;
    let rows: Vec<Row> = down
        .members()
        .iter()
        .map(|p| Row {
            length: p.len(),
            permutation: p.clone(),
            mu: None,
        })
        .collect();
    write_rows(&rows, common)
}

#[derive(Serialize)]
struct SeriesRow {
    n: usize,
    kind: char,
    mu: i64,
    abs: u64,
    ratio: f64,
    class_mod_12: usize,
}

fn series_rows(series: &[SeriesRecord]) -> Vec<SeriesRow> {
    let mut rows = Vec::with_capacity(2 * series.len());
    for r in series {
        for (kind, mu) in [('W', r.mu_w), ('M', r.mu_m)] {
            let abs = mu.unsigned_abs();
            rows.push(SeriesRow {
                n: r.n,
                kind,
                mu,
                abs,
                ratio: if abs == r.abs {
                    r.ratio
                } else {
                    r.ratio * abs as f64 / r.abs as f64
                },
                class_mod_12: r.class_mod_12,
            });
        }
    }
    rows
}

fn cmd_series(n_max: usize, loglog: bool, range: Option<(usize, usize)>, common: &Common) -> Run {
    let series = principal_series(n_max)?;
    let mut w = open(&common.out)?;
    if loglog {
        let (lo, hi) = range.unwrap_or((4, n_max));
        let data = loglog_export(&series, lo, hi);
        match common.format {
            Format::Json => write_json(&mut w, &data)?,
            Format::Text | Format::Csv => {
                let mut c = csv::Writer::from_writer(&mut w);
                c.write_record(["ln_n", "ln_abs"])?;
                for (x, y) in &data.rows {
                    c.write_record([x.to_string(), y.to_string()])?;
                }
                c.flush()?;
            }
        }
    } else {
        match common.format {
            Format::Text => {
                for r in &series {
                    writeln!(w, "{}\t{}\t{}\t{:.6}", r.n, r.mu_w, r.mu_m, r.ratio)?;
                }
            }
            Format::Csv => {
                let mut c = csv::Writer::from_writer(&mut w);
                for row in series_rows(&series) {
                    c.serialize(row)?;
                }
                c.flush()?;
            }
            Format::Json => write_json(&mut w, &series)?,
        }
    }
    w.flush()?;
    Ok(Outcome::Clean)
}

fn sweep_violations(report: &SweepReport) -> Vec<Violation> {
    report
        .mismatches
        .iter()
        .map(|m| Violation {
            n: m.pi.len(),
            rule: format!("{}: mu({}, {})", report.name, m.sigma, m.pi),
            expected: m.expected.to_string(),
            actual: m.actual.to_string(),
        })
        .collect()
}

#[derive(Serialize)]
struct CheckOutput {
    reports: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    banding: Option<analysis::BandingReport>,
    /// Reported alongside but not counted as violations.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    informational: Vec<CheckReport>,
}

fn cmd_check(
    suite: Suite,
    n_max: Option<usize>,
    range: Option<(usize, usize)>,
    max_len: usize,
    common: &Common,
) -> Run {
    let mut out = CheckOutput {
        reports: Vec::new(),
        banding: None,
        informational: Vec::new(),
    };
    match suite {
        Suite::Crosscheck => {
            let oracle = Oracle::with_cap(common.downset_cap);
            let reports = [
                sweep::theorem_vs_oracle(oracle, 4, max_len)?,
                sweep::decomposable_vs_oracle(oracle, max_len)?,
                sweep::oscillation_vs_oracle(oracle, max_len + 2)?,
                sweep::auto_vs_oracle(oracle, max_len)?,
            ];
            for r in &reports {
                out.reports.push(CheckReport {
                    suite: format!("crosscheck/{} ({} pairs)", r.name, r.checked),
                    range: (1, max_len),
                    violations: sweep_violations(r),
                    constants: None,
                });
            }
        }
        Suite::Sign | Suite::Bound => {
            let n_max = n_max.unwrap_or(5000);
            let series = principal_series(n_max)?;
            let (name, violations) = if suite == Suite::Sign {
                ("sign", sign_check(&series))
            } else {
                ("bound", bound_check(&series))
            };
            out.reports.push(CheckReport {
                suite: name.into(),
                range: (4, n_max),
                violations,
                constants: None,
            });
        }
        Suite::Jelinek => {
            let (lo, hi) = range.unwrap_or((51, 2000));
            let series = principal_series(2 * hi + 1)?;
            out.reports.push(CheckReport {
                suite: "jelinek".into(),
                range: (lo, hi),
                violations: jelinek_check_with(lo, hi, &series, OddForm::Printed)?,
                constants: None,
            });
            out.informational.push(CheckReport {
                suite: "jelinek (odd rules with n^2 + n)".into(),
                range: (lo, hi),
                violations: jelinek_check_with(lo, hi, &series, OddForm::PlusN)?,
                constants: None,
            });
        }
        Suite::Banding => {
            let (lo, hi) = range.unwrap_or((1000, 20000));
            let series = principal_series(hi)?;
            let report = banding_report(lo, hi, &series)?;
            let mut violations = Vec::new();
            if !report.ordering_ok {
                violations.push(Violation {
                    n: hi,
                    rule: "0 < a < b < c < d < e < f < g < 1".into(),
                    expected: "true".into(),
                    actual: "false".into(),
                });
            }
            if !report.pairing_ok {
                violations.push(Violation {
                    n: hi,
                    rule: "classes separated by band".into(),
                    expected: "true".into(),
                    actual: "false".into(),
                });
            }
            out.reports.push(CheckReport {
                suite: "banding".into(),
                range: (lo, hi),
                violations,
                constants: Some(report.constants),
            });
            out.banding = Some(report);
        }
    }
    let found = out.reports.iter().any(|r| !r.violations.is_empty());
    let mut w = open(&common.out)?;
    match common.format {
        Format::Json => write_json(&mut w, &out)?,
        Format::Text => {
            for (tag, r) in out
                .reports
                .iter()
                .map(|r| ("", r))
                .chain(out.informational.iter().map(|r| ("info ", r)))
            {
                writeln!(
                    w,
                    "{tag}{}\t{}..{}\tviolations={}",
                    r.suite,
                    r.range.0,
                    r.range.1,
                    r.violations.len()
                )?;
                for v in r.violations.iter().take(20) {
                    writeln!(
                        w,
                        "  n={} {} expected {} got {}",
                        v.n, v.rule, v.expected, v.actual
                    )?;
                }
                if r.violations.len() > 20 {
                    writeln!(w, "  ... {} more", r.violations.len() - 20)?;
                }
            }
            if let Some(b) = &out.banding {
                for band in &b.bands {
                    writeln!(
                        w,
                        "class {:>2} {} {}\t{:.4}..{:.4}\t({} lengths)",
                        band.class_mod_12, band.kind, band.band, band.min, band.max, band.count
                    )?;
                }
                let conjectured = analysis::Constants::CONJECTURED.named();
                for ((name, est), (_, c)) in b.constants.named().iter().zip(conjectured) {
                    writeln!(
                        w,
                        "{name} = {est:.4}\tconjectured {c:.3}\tdiff {:+.4}",
                        est - c
                    )?;
                }
                writeln!(
                    w,
                    "ordering_ok={} pairing_ok={} deviations={} (tolerance {})",
                    b.ordering_ok,
                    b.pairing_ok,
                    b.deviations.len(),
                    b.tolerance
                )?;
            }
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            c.write_record(["suite", "n", "rule", "expected", "actual"])?;
            for r in out.reports.iter().chain(&out.informational) {
                for v in &r.violations {
                    c.write_record([
                        r.suite.as_str(),
                        &v.n.to_string(),
                        &v.rule,
                        &v.expected,
                        &v.actual,
                    ])?;
                }
            }
            c.flush()?;
        }
    }
    w.flush()?;
    Ok(if found {
        Outcome::Violations
    } else {
        Outcome::Clean
    })
}

fn run(cli: Cli) -> Run {
    match &cli.command {
        Command::Mobius {
            sigma,
            pi,
            engine,
            trace,
            common,
        } => cmd_mobius(sigma, pi, *engine, *trace, common),
        Command::Interval { sigma, pi, common } => cmd_interval(sigma, pi, common),
        Command::Downset { pi, common } => cmd_downset(pi, common),
        Command::Series {
            n_max,
            loglog,
            range,
            common,
        } => cmd_series(*n_max, *loglog, *range, common),
        Command::Check {
            suite,
            n_max,
            range,
            max_len,
            common,
        } => cmd_check(*suite, *n_max, *range, *max_len, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
