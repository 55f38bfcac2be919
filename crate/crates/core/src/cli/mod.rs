//! Command-line experiment runner.
//!
//! Each subcommand writes `report.csv` (key,value rows), one CSV per data
//! table, `manifest.txt`, and with `--dump` the fields it computed.
//! Exit status: 0 success, 2 invalid input, 3 numeric failure, 1 I/O error.

mod commands;
mod config;
mod output;
mod schema;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

pub use commands::RunOutput;
pub use config::{parse_config_text, ResolvedConfig};
pub use output::{emit_csv, fmt_f64, write_atomic, Table};
pub use schema::{Kind, KeySpec, Subcommand};

use crate::exec;
use crate::gridfield::write_field;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "BESSELAB_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            InvalidGrid(_) | InvalidParameter(_) | Precondition(_) => CliError::Validation(e.to_string()),
            Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub fn build_command() -> Command {
    let mut cmd = Command::new("besselab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Numerical experiments on Bessel potential spaces and Sobolev multipliers of |x|^-alpha")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in Subcommand::ALL {
        let mut c = Command::new(sub.name()).about(sub.about());
        for key in sub.keys() {
            let mut help = key.help.to_string();
            if let Some(d) = key.default {
                help.push_str(&format!(" [default: {d}]"));
            }
            if key.required {
                help.push_str(" [required]");
            }
            let arg = Arg::new(key.name).long(key.name).help(help);
            let arg = match key.kind {
                Kind::Flag => arg.action(ArgAction::SetTrue),
                Kind::Float => arg.value_name("X").allow_negative_numbers(true),
                Kind::FloatList => arg.value_name("X,Y,..").allow_negative_numbers(true),
                Kind::Int => arg.value_name("INT"),
                Kind::Path => arg.value_name("PATH"),
            };
            c = c.arg(arg);
        }
        cmd = cmd.subcommand(c);
    }
    cmd
}

/// Flag values the user actually typed.
fn explicit_flags(sub: Subcommand, m: &ArgMatches) -> HashMap<String, String> {
    let mut out = HashMap::new();
    for key in sub.keys() {
        if m.value_source(key.name) != Some(ValueSource::CommandLine) {
            continue;
        }
        let v = match key.kind {
            Kind::Flag => m.get_flag(key.name).to_string(),
            _ => match m.get_one::<String>(key.name) {
                Some(v) => v.clone(),
                None => continue,
            },
        };
        out.insert(key.name.to_string(), v);
    }
    out
}

fn configure_threads() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
                CliError::Validation(format!(
                    "invalid value for {THREADS_ENV}: expected a positive integer, got {v:?}"
                ))
            })?;
            exec::init_global_threads(n);
            Ok(exec::current_threads())
        }
        Err(_) => Ok(exec::current_threads()),
    }
}

/// Resolves the configuration of a parsed subcommand.
pub fn resolve(sub: Subcommand, m: &ArgMatches) -> Result<ResolvedConfig, CliError> {
    let flags = explicit_flags(sub, m);
    let file = match flags.get("config") {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("cannot read config {path}: {e}")))?;
            parse_config_text(&text)?
        }
        None => Vec::new(),
    };
    let mut flags = flags;
    flags.remove("config");
    ResolvedConfig::resolve(sub, &file, &flags)
}

fn manifest_text(
    cfg: &ResolvedConfig,
    files: &[String],
    threads: usize,
    started: SystemTime,
    wall: f64,
) -> String {
    let mut s = String::new();
    s.push_str("tool=besselab\n");
    s.push_str(&format!("version={}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("subcommand={}\n", cfg.subcommand.name()));
    for (k, v) in cfg.resolved_pairs() {
        s.push_str(&format!("param.{k}={v}\n"));
    }
    let seed = cfg
        .resolved_pairs()
        .into_iter()
        .find(|(k, _)| *k == "seed")
        .map(|(_, v)| v)
        .unwrap_or_else(|| "none".into());
    s.push_str(&format!("seed={seed}\n"));
    s.push_str(&format!("files={}\n", files.join(",")));
    let ts = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    s.push_str(&format!(
        "run timestamp_unix={ts} wall_time_s={} threads={threads}\n",
        fmt_f64(wall)
    ));
    s
}

/// Runs a resolved configuration and writes its outputs.
pub fn execute(cfg: &ResolvedConfig, threads: usize) -> Result<RunOutput, CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let out = commands::run(cfg)?;
    let wall = clock.elapsed().as_secs_f64();

    let dir = cfg.path("out").unwrap_or_else(|| "out".into());
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();

    let mut report = Table::new(["key", "value"]);
    report.push(vec!["subcommand".into(), cfg.subcommand.name().into()]);
    for (k, v) in &out.report {
        report.push(vec![k.clone(), v.clone()]);
    }
    write_atomic(&dir.join("report.csv"), emit_csv(&report)?.as_bytes())?;
    files.push("report.csv".to_string());
    for (stem, table) in &out.tables {
        let name = format!("{stem}.csv");
        write_atomic(&dir.join(&name), emit_csv(table)?.as_bytes())?;
        files.push(name);
    }
    if cfg.flag("dump") {
        for (stem, field) in &out.dumps {
            let name = format!("{stem}.blab");
            let mut bytes = Vec::new();
            write_field(field, &mut bytes)?;
            write_atomic(&dir.join(&name), &bytes)?;
            files.push(name);
        }
    }
    let manifest = manifest_text(cfg, &files, threads, started, wall);
    write_atomic(&dir.join("manifest.txt"), manifest.as_bytes())?;

    if !out.aliasing.is_empty() {
        let stages = out.aliasing.join("; ");
        if cfg.flag("strict") {
            return Err(CliError::Numeric(format!("aliasing guard tripped in: {stages}")));
        }
        eprintln!("warning: aliasing guard tripped in: {stages}");
    }
    Ok(out)
}

fn print_report(dir: &Path, out: &RunOutput) {
    for (k, v) in &out.report {
        println!("{k}: {v}");
    }
    println!("wrote {}", dir.join("report.csv").display());
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn main_entry<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match build_command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| {
        let (name, sub_m) = matches.subcommand().expect("subcommand is required");
        let sub = Subcommand::from_name(name).expect("subcommands come from the schema");
        let cfg = resolve(sub, sub_m)?;
        let threads = configure_threads()?;
        let out = execute(&cfg, threads)?;
        print_report(&cfg.path("out").unwrap_or_else(|| "out".into()), &out);
        Ok::<_, CliError>(())
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
