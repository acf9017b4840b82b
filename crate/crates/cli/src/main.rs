use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use trigen_core::analysis::{ree_test, Conclusion};
use trigen_core::classalg::{xi, ClassAlgError};
use trigen_core::oracle::{xi3_oracle, xi3_star_oracle, OracleError};
use trigen_core::report::{analyze_file, render_paper_text, report_paper, Record};
use trigen_core::scenario::{Loader, ScenarioError};
use trigen_core::{bundled, lint_table, parse_table, ClassTuple};

const DIRTY_DATA_ENV: &str = "TRIGEN_ALLOW_DIRTY_DATA";

#[derive(Parser)]
#[command(
    name = "trigen",
    version,
    about = "Generation of finite groups by class triples"
)]
struct Cli {
    /// Worker threads for the oracle (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized structure constant of a class triple or quadruple.
    Xi {
        #[arg(long)]
        table: PathBuf,
        /// Comma-separated class names; the last is the product class.
        #[arg(long)]
        classes: String,
    },
    /// Decide every tuple of one or more scenario files.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Also count pairs by brute force on the scenario's generators.
        #[arg(long)]
        with_oracle: bool,
    },
    /// Brute-force pair count on a permutation group.
    Oracle {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        classes: String,
        /// Count only pairs that generate the whole group.
        #[arg(long)]
        star: bool,
    },
    /// Cycle-count test for generation in a permutation action.
    Ree {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        classes: String,
    },
    /// Check character tables for consistency.
    Lint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Recompute the published J1 and J2 results from the bundled data.
    ReportPaper {
        /// Run even if the bundled data disagree with the checksum manifest.
        #[arg(long)]
        allow_dirty_data: bool,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Failure {
        Failure {
            code,
            msg: msg.into(),
        }
    }
}

fn oracle_code(e: &OracleError) -> u8 {
    match e {
        OracleError::UnknownClass(_) => 2,
        OracleError::Ambiguous(_) => 4,
        OracleError::Fusion(c) => classalg_code(c),
        _ => 1,
    }
}

fn classalg_code(e: &ClassAlgError) -> u8 {
    match e {
        ClassAlgError::UnknownClass(_) => 2,
        _ => 1,
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Failure {
        let code = match &e {
            ScenarioError::UnknownClass(_) => 2,
            ScenarioError::Oracle(o) => oracle_code(o),
            ScenarioError::ClassAlg(c) => classalg_code(c),
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        Failure::new(oracle_code(&e), e.to_string())
    }
}

impl From<ClassAlgError> for Failure {
    fn from(e: ClassAlgError) -> Failure {
        Failure::new(classalg_code(&e), e.to_string())
    }
}

fn split_classes(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .collect()
}

fn emit(format: Format, text: String, record: Record) {
    match format {
        Format::Text => println!("{text}"),
        Format::Records => println!("{}", record.to_line()),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let loader = Loader::default();
    let format = cli.format;
    match cli.command {
        Command::Xi { table, classes } => {
            let t = loader.table(&table)?;
            let names = split_classes(&classes);
            let tuple = ClassTuple::from_names(&t, &names)?;
            let value = xi(&t, &tuple)?;
            let mut r = Record::new("xi");
            r.push("group", &t.group_name)
                .push("tuple", names.join(","))
                .push("xi", value);
            emit(format, value.to_string(), r);
            Ok(0)
        }
        Command::Analyze { files, with_oracle } => {
            let mut inconclusive = false;
            for f in &files {
                let rows = analyze_file(&loader, f, with_oracle)?;
                for row in rows {
                    inconclusive |= row.conclusion == Conclusion::Inconclusive;
                    emit(format, row.to_text(), row.to_record());
                }
            }
            Ok(if inconclusive { 3 } else { 0 })
        }
        Command::Oracle {
            gens,
            table,
            classes,
            star,
        } => {
            let id = loader.identification(&table, &gens)?;
            let names = split_classes(&classes);
            if names.len() != 3 {
                return Err(Failure::new(1, "the oracle counts class triples only"));
            }
            let idx = names
                .iter()
                .map(|n| id.class_index(n))
                .collect::<Result<Vec<_>, _>>()?;
            let value = if star {
                xi3_star_oracle(&id, idx[0], idx[1], idx[2])?
            } else {
                xi3_oracle(&id, idx[0], idx[1], idx[2])?
            };
            let mut r = Record::new("oracle");
            r.push("group", &id.table().group_name)
                .push("tuple", names.join(","))
                .push(if star { "xi_star" } else { "xi" }, value);
            emit(format, value.to_string(), r);
            Ok(0)
        }
        Command::Ree {
            gens,
            table,
            classes,
        } => {
            let id = loader.identification(&table, &gens)?;
            let names = split_classes(&classes);
            let mut types = Vec::new();
            for n in &names {
                let i = id.class_index(n)?;
                types.push(id.representative(i).cycle_type());
            }
            let cert = ree_test(id.group().degree(), &types)
                .map_err(|e| Failure::new(1, e.to_string()))?;
            match format {
                Format::Text => {
                    for (n, t) in names.iter().zip(&types) {
                        println!("{n}  {t}");
                    }
                    println!("{cert}");
                }
                Format::Records => {
                    for (n, t) in names.iter().zip(&types) {
                        let mut r = Record::new("cycle_type");
                        r.push("class", n).push("type", t);
                        println!("{}", r.to_line());
                    }
                    let mut r = Record::new("ree");
                    r.push("degree", id.group().degree())
                        .push("total", cert.total())
                        .push("bound", cert.bound())
                        .push(
                            "status",
                            if cert.is_violated() {
                                "VIOLATED"
                            } else {
                                "SATISFIED"
                            },
                        );
                    println!("{}", r.to_line());
                }
            }
            Ok(0)
        }
        Command::Lint { files } => {
            let mut bad = false;
            for f in &files {
                bad |= lint_file(f, format);
            }
            Ok(if bad { 1 } else { 0 })
        }
        Command::ReportPaper { allow_dirty_data } => {
            let allow = allow_dirty_data || std::env::var_os(DIRTY_DATA_ENV).is_some();
            let dirty = bundled::verify_bundled();
            if !dirty.is_empty() {
                for d in &dirty {
                    eprintln!("trigen: data: {d}");
                }
                if !allow {
                    return Err(Failure::new(
                        1,
                        format!("bundled data disagree with the manifest (use --allow-dirty-data or {DIRTY_DATA_ENV})"),
                    ));
                }
            }
            let records = report_paper(&bundled::loader())?;
            match format {
                Format::Text => print!("{}", render_paper_text(&records)),
                Format::Records => {
                    for r in &records {
                        println!("{}", r.to_line());
                    }
                }
            }
            let mismatch = records.iter().any(|r| r.get("status") == Some("mismatch"));
            Ok(if mismatch { 1 } else { 0 })
        }
    }
}

/// Prints the diagnostics for one table and returns whether any were found.
fn lint_file(path: &Path, format: Format) -> bool {
    let name = path.display().to_string();
    let problems: Vec<String> = match std::fs::read_to_string(path) {
        Err(e) => vec![e.to_string()],
        Ok(text) => match parse_table(&text) {
            Err(e) => vec![e.to_string()],
            Ok(t) => lint_table(&t).iter().map(ToString::to_string).collect(),
        },
    };
    match format {
        Format::Text if problems.is_empty() => println!("{name}: ok"),
        Format::Text => {
            for p in &problems {
                println!("{name}: {p}");
            }
        }
        Format::Records => {
            let mut r = Record::new("lint");
            r.push("file", &name)
                .push("status", if problems.is_empty() { "ok" } else { "error" });
            for p in &problems {
                r.push("diagnostic", p);
            }
            println!("{}", r.to_line());
        }
    }
    !problems.is_empty()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("trigen: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("trigen: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
