// `!(a < b)` also rejects NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod params;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{value_parser, Arg, ArgMatches, Command};

use error::CliError;
use params::{keys, read_config, Params, COMMANDS};

/// Environment variable holding the default angle precision in digits.
pub const PRECISION_ENV: &str = "LIYORKE_PRECISION";

fn cli() -> Command {
    let mut root = Command::new("liyorke")
        .about("Orbit experiments for Li-Yorke pairs on the disk, the plane and a block operator")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help("Flat key=value file; flags override it"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .short('o')
                .global(true)
                .value_name("PATH")
                .value_parser(value_parser!(PathBuf))
                .help("CSV destination [default: <command>.csv]"),
        )
        .arg(
            Arg::new("precision")
                .long("precision")
                .global(true)
                .env(PRECISION_ENV)
                .default_value("31")
                .value_name("DIGITS")
                .value_parser(value_parser!(u32))
                .help("Decimal digits carried by the angle accumulator"),
        );
    for (name, about) in COMMANDS {
        let mut sub = Command::new(name).about(about);
        for k in keys(name) {
            sub = sub.arg(
                Arg::new(k.name)
                    .long(k.name)
                    .value_name("VALUE")
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        root = root.subcommand(sub);
    }
    root
}

fn execute(name: &str, sub: &ArgMatches) -> Result<String, CliError> {
    let config = match sub.get_one::<PathBuf>("config") {
        Some(path) => read_config(path, name)?,
        None => BTreeMap::new(),
    };
    let flags: BTreeMap<&'static str, String> = keys(name)
        .iter()
        .filter(|k| sub.value_source(k.name) == Some(ValueSource::CommandLine))
        .filter_map(|k| sub.get_one::<String>(k.name).map(|v| (k.name, v.clone())))
        .collect();
    let params = Params::resolve(name, config, flags);
    let output = sub
        .get_one::<PathBuf>("output")
        .cloned()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let precision = *sub.get_one::<u32>("precision").expect("has a default");
    commands::run(name, &params, precision, &output)
}

fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match execute(name, sub) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}
