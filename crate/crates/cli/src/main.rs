mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::commands::{pretty, run, Context, Failure};
use crate::config::{Command, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_SUITE: u8 = 4;
const DEFAULT_SEED: u64 = oscillab::verify::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "oscillab", version, about = "Sweeps and verification suites for perturbed isotropic oscillators")]
struct Cli {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized sweeps (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "OSCILLAB_THREADS")]
    threads: Option<usize>,
    /// Command (overrides `command`).
    #[arg(long, value_enum)]
    command: Option<Command>,
}

fn hex_digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn write(dir: &Path, name: &str, body: &str) -> std::io::Result<()> {
    std::fs::write(dir.join(name), body)
}

fn report_error(dir: &Path, kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("error ({kind}): {message}");
    let body = pretty(&json!({ "kind": kind, "message": message, "exit_code": code }));
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = write(dir, "error.json", &body);
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fallback_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let (cfg, text) = match RunConfig::load(&cli.config) {
        Ok(v) => v,
        Err(e) => return report_error(&fallback_dir, "config", &e.to_string(), EXIT_CONFIG),
    };
    let out = cli.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let Some(command) = cli.command.or(cfg.command) else {
        return report_error(&out, "config", "no command given", EXIT_CONFIG);
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let threads = cli.threads.unwrap_or(1).max(1);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        return report_error(&out, "config", &format!("thread pool: {e}"), EXIT_CONFIG);
    }
    let base = cli.config.parent().unwrap_or(Path::new("."));
    let potential = match cfg.potential(base) {
        Ok(p) => p,
        Err(e) => return report_error(&out, "config", &e.to_string(), EXIT_CONFIG),
    };
    if let Err(e) = std::fs::create_dir_all(&out) {
        return report_error(&fallback_dir, "config", &format!("cannot create {}: {e}", out.display()), EXIT_CONFIG);
    }

    let ctx = Context { params: &cfg.parameters, potential, seed };
    let start = Instant::now();
    let outcome = match run(command, &ctx) {
        Ok(o) => o,
        Err(Failure::Config(m)) => return report_error(&out, "config", &m, EXIT_CONFIG),
        Err(Failure::Numerical(m)) => return report_error(&out, "numerical", &m, EXIT_NUMERICAL),
    };
    let seconds = start.elapsed().as_secs_f64();

    for (name, body) in &outcome.artifacts {
        if let Err(e) = write(&out, name, body) {
            return report_error(&out, "io", &format!("{name}: {e}"), EXIT_NUMERICAL);
        }
    }
    let status = if outcome.suite_failed { "suite_failed" } else { "ok" };
    let manifest = json!({
        "command": command.name(),
        "config": cli.config.display().to_string(),
        "config_sha256": hex_digest(&text),
        "inputs": serde_json::to_value(&cfg).unwrap_or(serde_json::Value::Null),
        "versions": { "oscillab": oscillab::VERSION, "oscillab-cli": env!("CARGO_PKG_VERSION") },
        "seed": seed,
        "threads": threads,
        "artifacts": outcome.artifacts.iter().map(|(name, body)| json!({ "file": name, "sha256": hex_digest(body) })).collect::<Vec<_>>(),
        "summary": outcome.summary,
        "timings": { "run_seconds": seconds },
        "status": status,
    });
    if let Err(e) = write(&out, "manifest.json", &pretty(&manifest)) {
        return report_error(&out, "io", &format!("manifest.json: {e}"), EXIT_NUMERICAL);
    }
    if outcome.suite_failed {
        eprintln!("one or more criteria failed");
        return ExitCode::from(EXIT_SUITE);
    }
    ExitCode::SUCCESS
}
