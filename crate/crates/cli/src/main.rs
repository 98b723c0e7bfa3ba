use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use waveleton::dynamics::io::{field_csv, field_pgm, read_wgf1};
use waveleton::dynamics::FieldKind;
use waveleton::pattern::{analyze, analyze_trajectory, Thresholds};
use waveleton::wavelet::{build_filter_pair, Family};
use waveleton_cli::{execute, load_config, output_dir, presets, CliError, CliResult, RunConfig, RunManifest};

#[derive(Parser)]
#[command(name = "waveleton", version, about = "Wavelet phase-space dynamics and pattern analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Distribution,
    Pattern,
}

impl From<Kind> for FieldKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Distribution => FieldKind::Distribution,
            Kind::Pattern => FieldKind::Pattern,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a TOML run config.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a built-in preset, or list them.
    Demo {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        list: bool,
        /// Print the preset TOML instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// Print the pattern report of one field, or of several as a trajectory.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "distribution")]
        kind: Kind,
    },
    /// Render a WGF1 field as CSV or PGM (with a `.txt` sidecar for the intensity map).
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "distribution")]
        kind: Kind,
    },
    /// Print a filter pair.
    Filters { family: String, order: usize },
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn publish(config: RunConfig, out: Option<PathBuf>) -> CliResult<()> {
    let dir = output_dir(&config, out.as_deref());
    let manifest = execute(&config, &dir)?;
    print_manifest(&dir, &manifest);
    Ok(())
}

fn print_manifest(dir: &Path, m: &RunManifest) {
    println!("{} run `{}` written to {}", m.scenario, m.name, dir.display());
    for (k, v) in &m.summary {
        println!("  {k} = {v}");
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { config, out } => publish(load_config(&config)?, out),
        Command::Demo { name, out, list, print } => {
            if list || name.is_none() {
                for n in presets::names() {
                    println!("{n}");
                }
                for (alias, target) in presets::ALIASES {
                    println!("{alias} -> {target}");
                }
                return Ok(());
            }
            let name = name.expect("checked above");
            if print {
                print!("{}", presets::preset_text(&name)?);
                return Ok(());
            }
            let mut config = presets::preset(&name)?;
            config.validate()?;
            publish(config, out)
        }
        Command::Analyze { files, kind } => {
            let mut fields = Vec::with_capacity(files.len());
            for f in &files {
                fields.push(read_wgf1(f, kind.into())?);
            }
            fields.sort_by(|a, b| a.time.total_cmp(&b.time));
            let t = Thresholds::default();
            let report = if fields.len() == 1 {
                analyze(&fields[0], &t)?
            } else {
                let times: Vec<f64> = fields.iter().map(|w| w.time).collect();
                analyze_trajectory(&fields, &times, &t)?
            };
            print!("{}", report.to_text());
            Ok(())
        }
        Command::Convert { file, to, out, kind } => {
            let w = read_wgf1(&file, kind.into())?;
            let ext = match to {
                Format::Csv => "csv",
                Format::Pgm => "pgm",
            };
            let out = out.unwrap_or_else(|| file.with_extension(ext));
            match to {
                Format::Csv => write(&out, field_csv(&w).as_bytes())?,
                Format::Pgm => {
                    let (image, sidecar) = field_pgm(&w);
                    write(&out, &image)?;
                    let mut side = out.clone().into_os_string();
                    side.push(".txt");
                    write(Path::new(&side), sidecar.as_bytes())?;
                }
            }
            println!("{}", out.display());
            Ok(())
        }
        Command::Filters { family, order } => {
            let family: Family = family.parse()?;
            print!("{}", build_filter_pair(family, order)?.export_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
