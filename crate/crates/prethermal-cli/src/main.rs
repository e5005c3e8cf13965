//! `prethermal` command-line runner.
//!
//! Every subcommand resolves its configuration from defaults, an optional
//! `--config` file, `--set key=value` pairs and per-key flags (in that order),
//! writes `manifest.txt` into the output directory and exits with 0 on
//! success, 1 when an acceptance criterion fails and 2 on any other error.

mod commands;
mod config;
mod error;
mod recipes;

use clap::{Arg, ArgAction, ArgMatches, Command};

use config::{
    parse_config_text, KeySpec, RunConfig, CHECK_KEYS, COMMON_KEYS, EVOLVE_KEYS, FER_KEYS, FLOW_KEYS, LINRES_KEYS,
    RECIPE_KEYS, SPECTRUM_KEYS,
};
use error::{config_err, CliError, CliResult};

const COMMANDS: [(&str, &str, &[KeySpec]); 7] = [
    ("spectrum", "Near-origin spectrum, envelope and fits of a step drive", SPECTRUM_KEYS),
    ("fer", "Discrete Fer iterations and dressed-drive spectra", FER_KEYS),
    ("linres", "Linear-response heating rates over a lambda sweep", LINRES_KEYS),
    ("flow", "Kappa-plan lifetime bounds over a lambda sweep", FLOW_KEYS),
    ("evolve", "Exact spin-chain evolution under a step drive", EVOLVE_KEYS),
    ("check", "Run the acceptance checks", CHECK_KEYS),
    ("recipe", "Regenerate a figure or table and check its criterion", RECIPE_KEYS),
];

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn subcommand(name: &'static str, about: &'static str, keys: &[KeySpec]) -> Command {
    let mut cmd = Command::new(name)
        .about(about)
        .arg(Arg::new("config").long("config").value_name("FILE").help("key = value configuration file"))
        .arg(Arg::new("set").long("set").value_name("KEY=VALUE").action(ArgAction::Append).help("override any key"));
    for spec in COMMON_KEYS.iter().chain(keys) {
        let mut arg = Arg::new(spec.key)
            .long(flag_name(spec.key))
            .value_name("VALUE")
            .help(format!("{} [default: {}]", spec.help, if spec.default.is_empty() { "none" } else { spec.default }));
        if spec.key == "output_dir" {
            arg = arg.visible_alias("out");
        }
        cmd = cmd.arg(arg);
    }
    if name == "recipe" {
        cmd = cmd.arg(Arg::new("name").required(true).value_parser(recipes::RECIPES).help("recipe to run"));
    }
    cmd
}

fn cli() -> Command {
    COMMANDS.iter().fold(
        Command::new("prethermal")
            .version(env!("CARGO_PKG_VERSION"))
            .about("Numerical experiments on heating under aperiodic drives")
            .subcommand_required(true)
            .arg_required_else_help(true),
        |cli, (name, about, keys)| cli.subcommand(subcommand(name, about, keys)),
    )
}

fn overrides(sub: &ArgMatches, keys: &[KeySpec]) -> CliResult<Vec<(String, String)>> {
    let mut out = vec![];
    for pair in sub.get_many::<String>("set").into_iter().flatten() {
        let Some((k, v)) = pair.split_once('=') else {
            return config_err(format!("--set expects KEY=VALUE, found '{pair}'"));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    for spec in COMMON_KEYS.iter().chain(keys) {
        if let Some(v) = sub.get_one::<String>(spec.key) {
            out.push((spec.key.to_string(), v.clone()));
        }
    }
    Ok(out)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("PRETHERMAL_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return config_err(format!("PRETHERMAL_THREADS must be a positive integer, found '{raw}'")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .or_else(|e| config_err(format!("cannot build worker pool: {e}")))
}

fn run(matches: &ArgMatches) -> CliResult<()> {
    configure_threads()?;
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let (_, _, keys) = COMMANDS.iter().find(|(n, _, _)| *n == name).expect("known subcommand");
    let file = match sub.get_one::<String>("config") {
        Some(path) => parse_config_text(&commands::read_file(path)?)?,
        None => vec![],
    };
    let recipe = sub.try_get_one::<String>("name").ok().flatten().cloned();
    let command = match &recipe {
        Some(r) => format!("recipe {r}"),
        None => name.to_string(),
    };
    let cfg = RunConfig::resolve(&command, keys, file, overrides(sub, keys)?)?;
    let mut out = commands::Output::new(cfg.str("output_dir"))?;
    commands::write_manifest(&mut out, &cfg, "running")?;
    let result = match name {
        "spectrum" => commands::spectrum(&cfg, &mut out),
        "fer" => commands::fer(&cfg, &mut out),
        "linres" => commands::linres(&cfg, &mut out),
        "flow" => commands::flow(&cfg, &mut out),
        "evolve" => commands::evolve(&cfg, &mut out),
        "check" => commands::check(&cfg, &mut out),
        _ => recipes::run(recipe.as_deref().expect("recipe name required"), &mut out),
    };
    let status = match &result {
        Ok(()) => "ok".to_string(),
        Err(e) => format!("failed ({})", e.kind()),
    };
    commands::write_manifest(&mut out, &cfg, &status)?;
    result
}

fn main() {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let usage = CliError::Usage(first);
            eprintln!("{}", usage.machine_line());
            std::process::exit(usage.exit_code());
        }
    };
    if let Err(e) = run(&matches) {
        eprintln!("{}", e.machine_line());
        std::process::exit(e.exit_code());
    }
}
