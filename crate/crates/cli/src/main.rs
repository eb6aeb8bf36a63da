//! `unitscheck`: units-of-measure checking for Fortran sources.

mod json;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unitscheck_core::report::{render_burden, render_check, render_infer, render_suggest};
use unitscheck_core::{analyze, Analysis};

#[derive(Parser, Debug)]
#[command(
    name = "unitscheck",
    version,
    about = "Units-of-measure checking for Fortran sources"
)]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand, Debug)]
enum Mode {
    /// List the variables whose annotation would determine every other unit.
    #[command(alias = "units-suggest")]
    Suggest {
        #[command(flatten)]
        common: Common,
        /// Also report the annotation burden reduction.
        #[arg(long)]
        burden: bool,
    },
    /// Print the inferred unit of every unannotated variable.
    #[command(alias = "units-infer")]
    Infer {
        #[command(flatten)]
        common: Common,
    },
    /// Check annotations and code for consistency.
    #[command(alias = "units-check")]
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Insert inferred annotations into the source.
    #[command(alias = "units-synth")]
    Synth {
        /// Rewrite each file in place.
        #[arg(long, conflicts_with = "output")]
        in_place: bool,
        /// Write the rewritten source here instead of standard output.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// One JSON document per file instead of text.
    #[arg(long)]
    json: bool,
    #[arg(required = true, value_name = "FILE")]
    files: Vec<PathBuf>,
}

/// Per-file result, ordered so the worst one wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok,
    Findings,
    Failed,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        ExitCode::from(match s {
            Status::Ok => 0,
            Status::Findings => 1,
            Status::Failed => 2,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    run(cli).into()
}

fn run(cli: Cli) -> Status {
    let mut out = io::stdout().lock();
    match cli.mode {
        Mode::Suggest { common, burden } => each_file(&common.files, |path, a| {
            suggest(&mut out, a, common.json, burden, path)
        }),
        Mode::Infer { common } => each_file(&common.files, |_, a| infer(&mut out, a, common.json)),
        Mode::Check { common } => each_file(&common.files, |_, a| check(&mut out, a, common.json)),
        Mode::Synth {
            in_place,
            output,
            files,
        } => {
            if output.is_some() && files.len() != 1 {
                eprintln!("unitscheck: --output takes exactly one input file");
                return Status::Failed;
            }
            each_file(&files, |path, a| {
                synth(&mut out, a, path, in_place, output.as_deref())
            })
        }
    }
}

/// Analyze each file in argument order and combine the statuses.
fn each_file(
    files: &[PathBuf],
    mut report: impl FnMut(&Path, &Analysis) -> io::Result<Status>,
) -> Status {
    let mut worst = Status::Ok;
    for path in files {
        let status = match load(path) {
            Ok(a) => report(path, &a).unwrap_or_else(|e| {
                eprintln!("unitscheck: {}: {e}", path.display());
                Status::Failed
            }),
            Err(msg) => {
                eprintln!("unitscheck: {msg}");
                Status::Failed
            }
        };
        worst = worst.max(status);
    }
    worst
}

fn load(path: &Path) -> Result<Analysis, String> {
    let name = path.display().to_string();
    let source = fs::read_to_string(path).map_err(|e| format!("{name}: {e}"))?;
    analyze(&source, &name).map_err(|e| e.to_string())
}

/// Inconsistent files get the check report whatever the mode.
fn report_conflicts(
    out: &mut impl Write,
    a: &Analysis,
    json: bool,
    mode: &str,
) -> io::Result<Status> {
    if json {
        json::emit(out, &json::check(&a.check_report(), mode))?;
    } else {
        out.write_all(render_check(&a.check_report()).as_bytes())?;
    }
    Ok(Status::Findings)
}

fn suggest(
    out: &mut impl Write,
    a: &Analysis,
    json: bool,
    burden: bool,
    path: &Path,
) -> io::Result<Status> {
    let (Ok(report), Ok(b)) = (a.suggest_report(), a.burden()) else {
        return report_conflicts(out, a, json, "suggest");
    };
    if json {
        json::emit(out, &json::suggest(&report, burden.then_some(&b)))?;
    } else {
        out.write_all(render_suggest(&report).as_bytes())?;
        if burden {
            out.write_all(render_burden(&path.display().to_string(), &b).as_bytes())?;
        }
    }
    Ok(if report.entries.is_empty() {
        Status::Ok
    } else {
        Status::Findings
    })
}

fn infer(out: &mut impl Write, a: &Analysis, json: bool) -> io::Result<Status> {
    let Ok(report) = a.infer_report() else {
        return report_conflicts(out, a, json, "infer");
    };
    if json {
        json::emit(out, &json::infer(&report))?;
    } else {
        out.write_all(render_infer(&report).as_bytes())?;
    }
    Ok(Status::Ok)
}

fn check(out: &mut impl Write, a: &Analysis, json: bool) -> io::Result<Status> {
    if !a.is_consistent() {
        return report_conflicts(out, a, json, "check");
    }
    if json {
        json::emit(out, &json::check(&a.check_report(), "check"))?;
    } else {
        out.write_all(render_check(&a.check_report()).as_bytes())?;
    }
    Ok(Status::Ok)
}

fn synth(
    out: &mut impl Write,
    a: &Analysis,
    path: &Path,
    in_place: bool,
    output: Option<&Path>,
) -> io::Result<Status> {
    let plan = match a.synthesize() {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("unitscheck: {}: {e}", path.display());
            return report_conflicts(out, a, false, "synth");
        }
    };
    let text = plan.apply();
    if in_place {
        if !plan.is_empty() {
            fs::write(path, text)?;
        }
    } else if let Some(target) = output {
        fs::write(target, text)?;
    } else {
        out.write_all(text.as_bytes())?;
    }
    Ok(Status::Ok)
}
