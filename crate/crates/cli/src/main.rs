use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use asri::harness::{cpu_crossover, emit, run_suite, simulate_paths, ConvergenceReport, ExperimentConfig, VerifyOptions, SUITES};
use asri::scheme::{generate, SchemeKind};
use asri::word::{Alphabet, Grading};
use asri::Q;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "asri", version, about = "Strong SDE scheme generation and convergence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scheme table and write it in the text format.
    Scheme {
        #[arg(long, default_value = "asri")]
        kind: String,
        #[arg(long, default_value = "wl")]
        grading: String,
        #[arg(long)]
        order: usize,
        /// Take the alphabet from an experiment config (file or preset name).
        #[arg(long)]
        config: Option<String>,
        /// Number of Wiener processes when no config is given.
        #[arg(long, default_value_t = 1)]
        wiener: u32,
        /// Intensities of unit-jump Poisson processes when no config is given.
        #[arg(long, value_delimiter = ',')]
        jumps: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        gram_seed: u64,
        #[arg(long, default_value_t = 10)]
        grams: usize,
    },
    /// Run a convergence experiment and print the error table.
    Simulate {
        /// Config file or preset name (trig4, trig4-linear, trig4-smoke, desk).
        #[arg(long)]
        config: String,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run a convergence experiment and write CSV, SVG and gnuplot output.
    Convergence {
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Print a preset config as JSON.
    Preset { name: String },
}

fn load_config(spec: &str) -> Result<ExperimentConfig> {
    if Path::new(spec).exists() {
        let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        Ok(ExperimentConfig::from_json(&text)?)
    } else {
        Ok(ExperimentConfig::preset(spec)?)
    }
}

fn print_report(r: &ConvergenceReport) {
    println!("# {} paths={} seed={} fine_step={:e} reference={} noise={}", r.name, r.paths, r.seed, r.fine_step, r.reference, r.noise_hash);
    println!("{:<14} {:>12} {:>12} {:>12} {:>12}", "scheme", "h", "mse", "mse_se", "cpu_s/path");
    for s in &r.schemes {
        for p in &s.points {
            let cpu = p.cpu_seconds.map(|c| format!("{c:.3e}")).unwrap_or_else(|| "-".into());
            println!("{:<14} {:>12.4e} {:>12.4e} {:>12.2e} {:>12}", s.scheme, p.h, p.mse, p.mse_se, cpu);
        }
        match &s.fit {
            Some(f) => println!("{:<14} order {:.3} ± {:.3} ({} points)", s.scheme, f.slope, f.slope_se, f.admitted.len()),
            None => println!("{:<14} order: too few admitted points", s.scheme),
        }
    }
    for c in r.comparisons.iter().filter(|c| c.b_better()) {
        println!("{} better than {} at h={:.4e}: Δ sup² in [{:.3e}, {:.3e}]", c.b, c.a, c.h, c.ci_low, c.ci_high);
    }
    if r.schemes.len() == 2 {
        let (a, b) = (&r.schemes[0].scheme, &r.schemes[1].scheme);
        for (x, y) in [(a, b), (b, a)] {
            if let Some(e) = cpu_crossover(r, x, y) {
                println!("cost crossover: {x} cheaper above error {e:.3e}, {y} cheaper below");
            }
        }
    }
    for (s, h) in &r.under_resolved {
        println!("warning: {s} at h={h:e} moves by more than one standard error under reference refinement");
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Scheme { kind, grading, order, config, wiener, jumps, out } => {
            let kind: SchemeKind = kind.parse()?;
            let grading: Grading = grading.parse()?;
            let grade = if kind == SchemeKind::Taylor { order } else { order + 1 };
            let alphabet = match config {
                Some(c) => load_config(&c)?.setup()?.alphabet.with_max_grade(grade)?,
                None => {
                    let lambdas = jumps.iter().map(|s| s.parse::<Q>().map_err(|_| anyhow::anyhow!("bad intensity {s}"))).collect::<Result<Vec<_>>>()?;
                    Alphabet::standard(wiener, &lambdas, grade)?
                }
            };
            let text = generate(kind, grading, order, &alphabet)?.serialize();
            match out {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Verify { suite, n, gram_seed, grams } => {
            let opts = VerifyOptions { orders: n, gram_seed, grams, ..Default::default() };
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut ok = true;
            for name in names {
                for c in run_suite(name, &opts)? {
                    println!("{} [{name}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    ok &= c.passed;
                }
            }
            Ok(ok)
        }
        Command::Simulate { config, paths, json } => {
            let mut cfg = load_config(&config)?;
            if let Some(p) = paths {
                cfg.paths = p;
            }
            let r = simulate_paths(&cfg)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                print_report(&r);
            }
            Ok(true)
        }
        Command::Convergence { config, out, paths } => {
            let mut cfg = load_config(&config)?;
            if let Some(p) = paths {
                cfg.paths = p;
            }
            let (dir, formats) = match (&out, &cfg.output) {
                (Some(d), Some(o)) => (d.clone(), o.formats.clone()),
                (Some(d), None) => (d.clone(), vec!["csv".into(), "svg".into(), "gnuplot".into()]),
                (None, Some(o)) => (o.dir.clone(), o.formats.clone()),
                (None, None) => bail!("no output directory: pass --out or set output.dir"),
            };
            let r = simulate_paths(&cfg)?;
            print_report(&r);
            for p in emit(&r, &dir, &formats)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
        Command::Preset { name } => {
            println!("{}", ExperimentConfig::preset(&name)?.to_json());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
