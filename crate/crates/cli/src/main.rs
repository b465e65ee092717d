mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use wavecomp::analysis::fit_fringe;
use wavecomp::experiments::{run_afshar, run_delayed_choice, run_eraser, Histogram};

use config::{AfsharSettings, TwoSlitSettings};
use output::{histogram_csv, profile_csv, stage_result, Format, Staged};

const DEFAULT_SEED: u64 = 12345;

/// Classical-wave simulations of two-slit, quantum-eraser and Afshar-type
/// experiments.
#[derive(Debug, Parser)]
#[command(name = "wavecomp", version)]
struct Cli {
    /// Flat TOML file with unit-suffixed keys; omitted keys take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, env = "WAVECOMP_OUT", default_value = "wavecomp-out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Print the resolved configuration as TOML and exit without running.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polarization-tagged two-slit eraser with idler coincidences.
    Eraser,
    /// Eraser with a passive splitter choosing the idler analysis.
    DelayedChoice,
    /// Wire grid at the interference nodes, imaged by a lens.
    Afshar,
    /// Fit the two-slit fringe model to a histogram CSV.
    Fit {
        /// CSV with columns bin_center_m,counts.
        #[arg(long)]
        input: PathBuf,
    },
    /// Interference node positions in the wire plane of an Afshar setup.
    Nodes,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eraser => "eraser",
            Command::DelayedChoice => "delayed-choice",
            Command::Afshar => "afshar",
            Command::Fit { .. } => "fit",
            Command::Nodes => "nodes",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn finish<C: Serialize>(cli: &Cli, staged: Staged, settings: &C) -> Result<()> {
    let written = staged.commit(&cli.out, settings, cli.seed)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn print_config<C: Serialize>(settings: &C) -> Result<()> {
    print!("{}", config::to_toml(settings)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let path = cli.config.as_deref();
    match &cli.command {
        Command::Eraser | Command::DelayedChoice => {
            let settings: TwoSlitSettings = config::load(path)?;
            if cli.print_config {
                return print_config(&settings);
            }
            let result = if matches!(cli.command, Command::Eraser) {
                run_eraser(&settings.eraser(cli.seed)?)
            } else {
                run_delayed_choice(&settings.delayed_choice(cli.seed)?)
            }
            .with_context(|| format!("{} failed", cli.command.name()))?;
            finish(cli, stage_result(&result, cli.format)?, &settings)
        }
        Command::Afshar | Command::Nodes => {
            let settings: AfsharSettings = config::load(path)?;
            if cli.print_config {
                return print_config(&settings);
            }
            let result = run_afshar(&settings.afshar(cli.seed)?)
                .with_context(|| format!("{} failed", cli.command.name()))?;
            let staged = if matches!(cli.command, Command::Afshar) {
                stage_result(&result, cli.format)?
            } else {
                nodes_output(&result, cli.format)?
            };
            finish(cli, staged, &settings)
        }
        Command::Fit { input } => {
            if cli.config.is_some() {
                anyhow::bail!("fit takes no --config");
            }
            let hist = read_histogram(input)?;
            let fit = fit_fringe(&hist.counts_f64(), &hist.bin_centers)
                .with_context(|| format!("fitting {}", input.display()))?;
            let mut staged = Staged::default();
            staged.add_json("fit", "fit", &fit)?;
            if cli.format == Format::Csv {
                let model = wavecomp::experiments::Profile {
                    positions: hist.bin_centers.clone(),
                    values: hist.bin_centers.iter().map(|&x| fit.evaluate(x)).collect(),
                };
                staged.add("model", "profile", "profile_model.csv".into(), profile_csv(&model)?);
                staged.add("input", "histogram", "histogram_input.csv".into(), histogram_csv(&hist)?);
            }
            #[derive(Serialize)]
            struct FitInput<'a> {
                input: &'a Path,
            }
            finish(cli, staged, &FitInput { input })
        }
    }
}

fn nodes_output(result: &wavecomp::experiments::ExperimentResult, format: Format) -> Result<Staged> {
    #[derive(Serialize)]
    struct Nodes<'a> {
        positions_m: &'a [f64],
        mean_spacing_m: Option<f64>,
        reference_spacing_m: Option<f64>,
    }
    let nodes = &result.series["nodes"];
    let mut staged = Staged::default();
    staged.add_json(
        "nodes",
        "series",
        &Nodes {
            positions_m: nodes,
            mean_spacing_m: result.scalar("node_spacing"),
            reference_spacing_m: result.scalar("node_spacing_reference"),
        },
    )?;
    let plane = &result.profiles["grid_plane_both"];
    match format {
        Format::Csv => staged.add(
            "grid_plane_both",
            "profile",
            "profile_grid_plane_both.csv".into(),
            profile_csv(plane)?,
        ),
        Format::Json => staged.add_json("grid_plane_both", "profile", plane)?,
    }
    Ok(staged)
}

fn read_histogram(path: &Path) -> Result<Histogram> {
    #[derive(serde::Deserialize)]
    struct Row {
        bin_center_m: f64,
        counts: u64,
    }
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut hist = Histogram {
        bin_centers: Vec::new(),
        counts: Vec::new(),
    };
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.with_context(|| format!("{}: bad record {}", path.display(), i + 1))?;
        hist.bin_centers.push(row.bin_center_m);
        hist.counts.push(row.counts);
    }
    Ok(hist)
}
