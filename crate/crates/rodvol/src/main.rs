//! Batch analysis of rod complements in the 3-torus: decide the geometry of
//! a configuration, bound its hyperbolic volume, expand slopes into
//! continued fractions, trace nested annular fillings, and emit the
//! reproducibility tables.
//!
//! Every run produces a `Report` carrying the echoed command, a digest of
//! the input, and a structured result; the JSON form is byte-deterministic
//! for a fixed input and version.

mod tables;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use rodcomp::contfrac::{
    euclidean_cf, eval_cf, minimal_cf_default, nicf, ContinuedFraction, Rational,
};
use rodcomp::dehnfill::nested_trace;
use rodcomp::rodmodel::{classify, parse_config, Config};
use rodcomp::volbounds::{general_report, orthogonal_report, BoundMethod, VolumeBounds};
use rodcomp::Error;

#[derive(Parser)]
#[command(
    name = "rodvol",
    version,
    about = "Classification and volume bounds for rod complements in the 3-torus"
)]
struct Cli {
    /// Print the JSON report to stdout instead of the text rendering.
    #[arg(long, global = true)]
    json: bool,

    /// Write report.json (and table.csv for tables) into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a configuration's complement is hyperbolic, Seifert
    /// fibred, or toroidal.
    Classify {
        /// JSON configuration file.
        path: PathBuf,
    },
    /// Two-sided volume bounds for a configuration.
    Bounds {
        /// JSON configuration file.
        path: PathBuf,
        /// Minimize the general upper bound over all rod choices.
        #[arg(long)]
        optimize: bool,
        /// Report only the octahedral bounds (stacked configurations only).
        #[arg(long)]
        orthogonal: bool,
    },
    /// Continued fraction expansion of a rational slope.
    Cf {
        /// Slope as "p/q" or an integer ("1/0" is the infinite slope).
        rational: String,
        #[arg(long, value_enum, default_value_t = Algo::Minimal)]
        algo: Algo,
    },
    /// Rod directions along a nested annular filling, innermost first.
    Trace {
        /// Either a slope "p/q" (expanded with the floor algorithm) or an
        /// explicit expansion "[c1;c2,...]".
        input: String,
    },
    /// Reproducibility tables (CSV plus JSON).
    Table {
        #[arg(value_enum)]
        name: TableName,
        /// First row parameter; defaults depend on the table.
        #[arg(long)]
        min: Option<i64>,
        /// Last row parameter; defaults depend on the table.
        #[arg(long)]
        max: Option<i64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    /// Floor-based remainders; all later terms positive.
    Euclid,
    /// Nearest-integer remainders; later terms at least 2 in size.
    Nicf,
    /// Shortest expansion under the default term bound.
    Minimal,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Euclid => "euclid",
            Algo::Nicf => "nicf",
            Algo::Minimal => "minimal",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableName {
    /// General upper-bound multiplier for each rod choice of the four-rod
    /// benchmark configuration.
    UpperChoices,
    /// The (n,1)-slope family: crossings grow with n, the octahedral upper
    /// bound does not.
    ConstantUpper,
    /// The k-term constant family: the octahedral lower bound grows
    /// linearly in k.
    GrowingLower,
}

impl TableName {
    fn name(self) -> &'static str {
        match self {
            TableName::UpperChoices => "upper-choices",
            TableName::ConstantUpper => "constant-upper",
            TableName::GrowingLower => "growing-lower",
        }
    }
}

/// What one invocation computed: the reproducible record plus its
/// presentation forms.
struct Output {
    report: Report,
    text: String,
    csv: Option<String>,
}

#[derive(Serialize)]
struct Report {
    command: String,
    input_digest: String,
    result: serde_json::Value,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Canonical echo of the computation arguments.  Output plumbing flags
/// (`--json`, `--out-dir`) are deliberately left out so that a report's
/// bytes do not depend on where it is written.
fn command_echo(command: &Command) -> String {
    match command {
        Command::Classify { path } => format!("classify {}", path.display()),
        Command::Bounds { path, optimize, orthogonal } => {
            let mut s = format!("bounds {}", path.display());
            if *optimize {
                s.push_str(" --optimize");
            }
            if *orthogonal {
                s.push_str(" --orthogonal");
            }
            s
        }
        Command::Cf { rational, algo } => format!("cf {rational} --algo {}", algo.name()),
        Command::Trace { input } => format!("trace {input}"),
        Command::Table { name, min, max } => {
            let mut s = format!("table {}", name.name());
            if let Some(v) = min {
                let _ = write!(s, " --min {v}");
            }
            if let Some(v) = max {
                let _ = write!(s, " --max {v}");
            }
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, command_echo(&cli.command)) {
        Ok(output) => match emit(&cli, &output) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("rodvol: {e}");
                ExitCode::from(3)
            }
        },
        Err(f) => {
            eprintln!("rodvol: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(cli: &Cli, output: &Output) -> std::io::Result<()> {
    if let Some(dir) = &cli.out_dir {
        fs::create_dir_all(dir)?;
        let mut json = serde_json::to_string(&output.report).expect("report serializes");
        json.push('\n');
        fs::write(dir.join("report.json"), json)?;
        if let Some(csv) = &output.csv {
            fs::write(dir.join("table.csv"), csv)?;
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string(&output.report).expect("report serializes"));
    } else {
        print!("{}", output.text);
    }
    Ok(())
}

fn run(command: &Command, echo: String) -> Result<Output, Failure> {
    match command {
        Command::Classify { path } => cmd_classify(path, echo),
        Command::Bounds { path, optimize, orthogonal } => {
            cmd_bounds(path, *optimize, *orthogonal, echo)
        }
        Command::Cf { rational, algo } => cmd_cf(rational, *algo, echo),
        Command::Trace { input } => cmd_trace(input, echo),
        Command::Table { name, min, max } => cmd_table(*name, *min, *max, echo),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").expect("writing to a String");
    }
    out
}

/// Formats with 12 significant digits; infinities come out as "inf".
fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn read_config(path: &Path) -> Result<(Config, String), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let config = parse_config(&text)?;
    let digest = sha256_hex(text.as_bytes());
    Ok((config, digest))
}

fn cmd_classify(path: &Path, echo: String) -> Result<Output, Failure> {
    let (config, digest) = read_config(path)?;
    let classification = classify(&config)?;
    let text = format!(
        "kind: {}\nreason: {}\n",
        classification.kind, classification.reason
    );
    Ok(Output {
        report: Report {
            command: echo,
            input_digest: digest,
            result: serde_json::json!({ "classification": classification }),
        },
        text,
        csv: None,
    })
}

fn method_text(method: &BoundMethod) -> String {
    match method {
        BoundMethod::GeneralLower { n, conditional_on_hyperbolicity } => {
            let tail = if *conditional_on_hyperbolicity { ", conditional on hyperbolicity" } else { "" };
            format!("{n} x v_tet per rod{tail}")
        }
        BoundMethod::GeneralUpper { chosen, conditional_on_hyperbolicity } => {
            let tail = if *conditional_on_hyperbolicity { ", conditional on hyperbolicity" } else { "" };
            format!("8 x v_tet x crossings, rod {chosen} normalized{tail}")
        }
        BoundMethod::OrthUpper => "2 x v_oct per filling rod".into(),
        BoundMethod::OrthLower { c } => format!("octahedral upper scaled by the C = {c} filling factor"),
        BoundMethod::Inapplicable { reason } => format!("inapplicable: {reason}"),
    }
}

fn bounds_text(label: &str, b: &VolumeBounds, out: &mut String) {
    let _ = writeln!(out, "{label}:");
    let _ = writeln!(out, "  lower: {}  ({})", sig12(b.lower), method_text(&b.lower_method));
    let _ = writeln!(out, "  upper: {}  ({})", sig12(b.upper), method_text(&b.upper_method));
    if let Some(m) = &b.multiplier_tet {
        let _ = writeln!(out, "  multiplier_tet: {m}");
    }
    if let Some(m) = &b.multiplier_oct {
        let _ = writeln!(out, "  multiplier_oct: {m}");
    }
    if let Some(c) = &b.c {
        let _ = writeln!(out, "  C: {c}");
    }
    if let Some(s) = b.sum_m {
        let _ = writeln!(out, "  sum_m: {s}");
    }
    if !b.applicable {
        let _ = writeln!(out, "  applicable: no");
    }
}

fn cmd_bounds(
    path: &Path,
    optimize: bool,
    orthogonal_only: bool,
    echo: String,
) -> Result<Output, Failure> {
    let (config, digest) = read_config(path)?;
    let classification = classify(&config)?;
    let mut text = format!("classification: {classification}\n");
    let mut general_json = serde_json::Value::Null;
    let mut orth_json = serde_json::Value::Null;
    let mut notes: Vec<String> = Vec::new();

    if orthogonal_only && config.as_stacked().is_none() {
        return Err(Failure::input(
            "--orthogonal needs a stacked configuration (horizontal rods plus a vertical rod)",
        ));
    }
    if !orthogonal_only {
        let general = general_report(&config, optimize)?;
        bounds_text("general bounds", &general, &mut text);
        general_json = serde_json::to_value(&general).expect("bounds serialize");
    }
    if let Some(stacked) = config.as_stacked() {
        match orthogonal_report(stacked) {
            Ok(report) => {
                let cfs: Vec<String> = report.cfs.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(
                    text,
                    "expansions: {}{}",
                    cfs.join(", "),
                    if report.swapped { "  (coordinates swapped)" } else { "" }
                );
                let _ = writeln!(
                    text,
                    "parent: {} octahedra over {} filling rods (E = {}, O = {})",
                    report.parent.octahedron_count,
                    report.parent.filling_rod_count,
                    report.parent.even_families,
                    report.parent.odd_families
                );
                bounds_text("octahedral bounds", &report.bounds, &mut text);
                orth_json = serde_json::json!({
                    "bounds": report.bounds,
                    "parent": report.parent,
                    "cfs": cfs,
                    "swapped": report.swapped,
                });
            }
            Err(Error::NotHyperbolic(reason)) | Err(Error::Inapplicable(reason)) => {
                let _ = writeln!(text, "octahedral bounds: not applicable ({reason})");
                notes.push(reason);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Output {
        report: Report {
            command: echo,
            input_digest: digest,
            result: serde_json::json!({
                "classification": classification,
                "general": general_json,
                "orthogonal": orth_json,
                "notes": notes,
            }),
        },
        text,
        csv: None,
    })
}

fn parse_rational(text: &str) -> Result<Rational, Failure> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| Failure::input(format!("bad rational {text:?}: {e}")))
}

fn cmd_cf(rational: &str, algo: Algo, echo: String) -> Result<Output, Failure> {
    let x = parse_rational(rational)?;
    let expansion = match algo {
        Algo::Euclid => euclidean_cf(&x),
        Algo::Nicf => nicf(&x),
        Algo::Minimal => minimal_cf_default(&x)?,
    };
    let value = eval_cf(&expansion);
    let terms: Vec<serde_json::Value> = expansion
        .terms()
        .iter()
        .map(|t| match i64::try_from(t) {
            Ok(n) => serde_json::json!(n),
            Err(_) => serde_json::json!(t.to_string()),
        })
        .collect();
    let text = format!(
        "expansion: {expansion}\nlength: {}\nvalue: {value}\n",
        expansion.len()
    );
    Ok(Output {
        report: Report {
            command: echo,
            input_digest: sha256_hex(rational.as_bytes()),
            result: serde_json::json!({
                "input": rational,
                "algo": algo.name(),
                "expansion": expansion.to_string(),
                "terms": terms,
                "length": expansion.len(),
                "value": value.to_string(),
            }),
        },
        text,
        csv: None,
    })
}

fn cmd_trace(input: &str, echo: String) -> Result<Output, Failure> {
    let trimmed = input.trim();
    let expansion = if trimmed.starts_with('[') {
        trimmed
            .parse::<ContinuedFraction>()
            .map_err(|e| Failure::input(format!("bad expansion {input:?}: {e}")))?
    } else {
        euclidean_cf(&parse_rational(trimmed)?)
    };
    let trace = nested_trace(&expansion);
    let value = eval_cf(&expansion);
    let rendered: Vec<String> = trace.iter().map(|v| v.to_string()).collect();
    let text = format!(
        "cf: {expansion}\ncore: {}\ntrace: {}\nvalue: {value}\n",
        rendered[0],
        rendered.join(" -> ")
    );
    Ok(Output {
        report: Report {
            command: echo,
            input_digest: sha256_hex(input.as_bytes()),
            result: serde_json::json!({
                "input": input,
                "cf": expansion.to_string(),
                "trace": trace,
                "value": value.to_string(),
            }),
        },
        text,
        csv: None,
    })
}

fn cmd_table(
    name: TableName,
    min: Option<i64>,
    max: Option<i64>,
    echo: String,
) -> Result<Output, Failure> {
    let table = match name {
        TableName::UpperChoices => {
            if min.is_some() || max.is_some() {
                return Err(Failure::input("this table has a fixed row set; drop --min/--max"));
            }
            tables::upper_choices()?
        }
        TableName::ConstantUpper => {
            let (lo, hi) = tables::range(min, max, 1, 20)?;
            tables::constant_upper(lo, hi)?
        }
        TableName::GrowingLower => {
            let (lo, hi) = tables::range(min, max, 6, 8)?;
            tables::growing_lower(lo, hi)?
        }
    };
    let digest_key = format!(
        "{}:{}..{}",
        name.name(),
        min.map_or(String::from("-"), |v| v.to_string()),
        max.map_or(String::from("-"), |v| v.to_string())
    );
    Ok(Output {
        report: Report {
            command: echo,
            input_digest: sha256_hex(digest_key.as_bytes()),
            result: serde_json::json!({ "table": name.name(), "data": table.json }),
        },
        text: table.csv.clone(),
        csv: Some(table.csv),
    })
}
