use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fkm_core::campaign::{self, error_exit_code, parse_tolerance, Format, RunConfig, SuiteResult};
use fkm_core::morse::{self, critical_points_csv};
use fkm_core::report::to_human;
use fkm_core::rng::derive_seed;
use fkm_core::spectra::{draw_spec, EigenfunctionId};
use fkm_core::varieties::sample_sphere_element;
use fkm_core::{Error, FkmGeometry};

#[derive(Parser)]
#[command(
    name = "fkm-lab",
    version,
    about = "Numerical verification lab for FKM isoparametric hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Pair {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build and check a Clifford system.
    Build {
        #[command(flatten)]
        pair: Pair,
        /// Write the system as JSON.
        #[arg(long)]
        dump_system: Option<PathBuf>,
    },
    /// Run every suite for one configuration.
    Verify {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = RunConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = RunConfig::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = RunConfig::default().draws)]
        draws: usize,
        /// Tolerance override, CHECK=VAL; repeatable.
        #[arg(long = "tol", value_parser = parse_tol)]
        tol: Vec<(String, f64)>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "json", value_parser = parse_format)]
        format: Format,
    },
    /// Locate and classify critical points over independent parameter draws.
    Critical {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_parser = parse_function)]
        function: EigenfunctionId,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = RunConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Tabulate the mean curvature h(t) of the level sets of phi2 or omega1.
    Scan {
        #[arg(long, value_parser = parse_function)]
        function: EigenfunctionId,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 50)]
        levels: usize,
        #[arg(long, default_value_t = RunConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a campaign described by a key = value config file.
    Campaign {
        config: Option<PathBuf>,
        #[arg(long = "tol", value_parser = parse_tol)]
        tol: Vec<(String, f64)>,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    parse_tolerance(s).map_err(|e| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_function(s: &str) -> Result<EigenfunctionId, String> {
    EigenfunctionId::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}

fn out_dir(flag: PathBuf) -> PathBuf {
    RunConfig {
        out: flag,
        ..RunConfig::default()
    }
    .with_env()
    .out
}

fn run(command: Command) -> fkm_core::Result<i32> {
    match command {
        Command::Build { pair, dump_system } => {
            let geom = FkmGeometry::from_pair(pair.m, pair.k)?;
            let rep = fkm_core::clifford::verify_clifford(geom.sys(), 1e-12);
            println!(
                "m={} k={} l={} n={} (m+, m-)=({}, {}) c0={}",
                geom.m(),
                geom.sys().k(),
                geom.l(),
                geom.n(),
                geom.m_plus(),
                geom.m_minus(),
                geom.c0()
            );
            print!("{}", to_human(std::slice::from_ref(&rep)));
            if let Some(path) = dump_system {
                let json = serde_json::to_string_pretty(&geom.sys().describe())
                    .map_err(|e| Error::Io(e.to_string()))?;
                write_file(&path, &json)?;
            }
            Ok(if rep.pass { 0 } else { 1 })
        }
        Command::Verify {
            pair,
            seed,
            samples,
            draws,
            tol,
            out,
            format,
        } => {
            let cfg = RunConfig {
                pairs: vec![(pair.m, pair.k)],
                seed,
                samples,
                draws,
                tolerances: tol.into_iter().collect(),
                out,
                format,
                ..RunConfig::default()
            }
            .with_env();
            finish_campaign(&cfg)
        }
        Command::Campaign { config, tol } => {
            let mut cfg = match config {
                Some(path) => RunConfig::parse(&std::fs::read_to_string(&path)?)?,
                None => RunConfig::default(),
            };
            cfg.tolerances.extend(tol);
            finish_campaign(&cfg.with_env())
        }
        Command::Critical {
            pair,
            function,
            draws,
            seed,
            out,
        } => {
            if !function.takes_point() {
                return Err(Error::InvalidArgument(format!(
                    "{function} has critical submanifolds; use phi1, phi3 or omega2"
                )));
            }
            let geom = FkmGeometry::from_pair(pair.m, pair.k)?;
            let mut rows = Vec::new();
            let mut csv = String::new();
            for d in 0..draws as u64 {
                let spec = draw_spec(&geom, function, derive_seed(seed, "critical-draw", d))?;
                let pts = morse::critical_points(&geom, &spec)?;
                let dump = critical_points_csv(&pts);
                if csv.is_empty() {
                    csv.push_str(dump.lines().next().unwrap_or(""));
                    csv.push('\n');
                }
                for line in dump.lines().skip(1) {
                    csv.push_str(&format!("{d}:{line}\n"));
                }
                rows.extend(pts);
            }
            let reports = morse::survey_reports(
                &geom,
                function,
                draws,
                seed,
                campaign::default_tolerance(&format!("morse.hessian.{function}"), geom.m()),
            )?;
            let root = out_dir(out);
            write_file(
                &root
                    .join(geom.config_id())
                    .join(format!("critical_{function}.csv")),
                &csv,
            )?;
            let suite = SuiteResult {
                suite: format!("critical_{function}"),
                config: geom.config_id(),
                reports,
            };
            campaign::write_suite(&root, &suite, Format::Json)?;
            print!("{}", to_human(&suite.reports));
            println!("{} critical points over {draws} draws", rows.len());
            Ok(if suite.pass() { 0 } else { 1 })
        }
        Command::Scan {
            function,
            pair,
            levels,
            seed,
            out,
        } => {
            let geom = FkmGeometry::from_pair(pair.m, pair.k)?;
            let p = sample_sphere_element(&geom, derive_seed(seed, "scan-element", 0));
            let rows = morse::mean_curvature_profile(&geom, function, &p, levels, seed)?;
            let mut table = String::from("t,h_numeric,h_closed_form\n");
            for r in &rows {
                table.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e}\n",
                    r.t, r.numeric, r.closed
                ));
            }
            let path = out_dir(out)
                .join(geom.config_id())
                .join(format!("scan_{function}.csv"));
            write_file(&path, &table)?;
            print!("{table}");
            Ok(0)
        }
    }
}

fn finish_campaign(cfg: &RunConfig) -> fkm_core::Result<i32> {
    let outcome = campaign::run_campaign(cfg)?;
    print!("{}", to_human(&outcome.reports()));
    for p in &outcome.written {
        eprintln!("wrote {}", p.display());
    }
    let failures = outcome.failures();
    if !failures.is_empty() {
        eprintln!("failing checks:");
        for f in &failures {
            eprintln!("  {f}");
        }
    }
    Ok(outcome.exit_code())
}

fn write_file(path: &Path, contents: &str) -> fkm_core::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}
