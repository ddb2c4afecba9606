mod config;
mod error;
mod plot;
mod series_io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stland::landscape::{distance_p, mean, Landscape, MeanLandscape};
use stland::pipeline::{noisy, run, SelkovParams, SineParams};

use crate::config::{ConfigFile, Overrides};
use crate::error::{CliError, CliResult};
use crate::series_io::{read_file, read_series, write_file, write_series};

#[derive(Parser)]
#[command(name = "stland", version, about = "Spatiotemporal persistence landscapes of time series")]
struct Cli {
    /// Worker threads for the landscape computation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sine,
    SineJump,
    Selkov,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic series as CSV
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Add white Gaussian noise at this signal-to-noise ratio (dB)
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t_start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t_end: Option<f64>,
        /// samples per time unit
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        freq: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        offset_before: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        offset_after: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b_start: Option<f64>,
        #[arg(long)]
        b_step: Option<f64>,
        #[arg(long)]
        b_count: Option<usize>,
        /// integration step
        #[arg(long)]
        dt: Option<f64>,
        /// length of each simulated run
        #[arg(long)]
        sim_end: Option<f64>,
        /// transient dropped from each run
        #[arg(long)]
        t_drop: Option<f64>,
        /// keep every n-th integration step
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Run the full pipeline on a CSV series and write the landscape as JSON
    Landscape {
        #[arg(long)]
        input: PathBuf,
        /// TOML file with pipeline settings; flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        channels: usize,
        /// the first CSV column holds sample times
        #[arg(long)]
        time_column: bool,
        #[arg(long)]
        windows: Option<usize>,
        #[arg(long)]
        points_per_window: Option<usize>,
        #[arg(long)]
        embed_dim: Option<usize>,
        #[arg(long)]
        delay: Option<usize>,
        /// comma-separated ascending list, or auto:N
        #[arg(long)]
        epsilons: Option<String>,
        #[arg(long)]
        hom_dim: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the p-distance between two landscapes
    Distance {
        a: PathBuf,
        b: PathBuf,
        /// exponent p >= 1, or "inf"
        #[arg(long, default_value = "2")]
        p: String,
    },
    /// Average several landscapes cell by cell
    Mean {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one layer of a landscape or mean landscape as a heatmap
    Plot {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// write a plain greymap instead of SVG
        #[arg(long)]
        pgm: bool,
    },
}

fn parse_p(s: &str) -> CliResult<f64> {
    let p = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        other => other.parse().map_err(|_| CliError::Usage(format!("bad exponent {s:?}")))?,
    };
    if p.is_nan() || p < 1.0 {
        return Err(CliError::Usage(format!("exponent must be at least 1, got {s}")));
    }
    Ok(p)
}

fn load_landscape(path: &Path) -> CliResult<Landscape> {
    Landscape::from_json(&read_file(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Generate {
            kind,
            snr,
            seed,
            out,
            t_start,
            t_end,
            rate,
            freq,
            offset_before,
            offset_after,
            a,
            b_start,
            b_step,
            b_count,
            dt,
            sim_end,
            t_drop,
            stride,
        } => {
            let ts = match kind {
                Kind::Sine | Kind::SineJump => {
                    let d = SineParams::default();
                    let p = SineParams {
                        t_start: t_start.unwrap_or(d.t_start),
                        t_end: t_end.unwrap_or(d.t_end),
                        rate: rate.unwrap_or(d.rate),
                        freq: freq.unwrap_or(d.freq),
                        offset_before: offset_before.unwrap_or(d.offset_before),
                        offset_after: offset_after.unwrap_or(d.offset_after),
                    };
                    if matches!(kind, Kind::Sine) { p.plain()? } else { p.with_jump()? }
                }
                Kind::Selkov => {
                    let d = SelkovParams::default();
                    let p = SelkovParams {
                        a: a.unwrap_or(d.a),
                        b_start: b_start.unwrap_or(d.b_start),
                        b_step: b_step.unwrap_or(d.b_step),
                        b_count: b_count.unwrap_or(d.b_count),
                        dt: dt.unwrap_or(d.dt),
                        t_end: sim_end.unwrap_or(d.t_end),
                        t_drop: t_drop.unwrap_or(d.t_drop),
                        stride: stride.unwrap_or(d.stride),
                        ..d
                    };
                    p.series()?
                }
            };
            let ts = match snr {
                Some(snr) => noisy(&ts, snr, seed)?,
                None => ts,
            };
            write_series(&out, &ts)
        }
        Command::Landscape {
            input,
            config,
            channels,
            time_column,
            windows,
            points_per_window,
            embed_dim,
            delay,
            epsilons,
            hom_dim,
            k_max,
            seed,
            out,
        } => {
            let file = match &config {
                Some(path) => ConfigFile::load(path)?,
                None => ConfigFile::default(),
            };
            let flags = Overrides { windows, points_per_window, embed_dim, delay, epsilons, hom_dim, k_max, seed };
            let cfg = config::resolve(&file, &flags)?;
            let ts = read_series(&input, channels, time_column)?;
            let l = run(&ts, &cfg)?;
            write_file(&out, l.to_json()?.as_bytes())
        }
        Command::Distance { a, b, p } => {
            let p = parse_p(&p)?;
            let (a, b) = (load_landscape(&a)?, load_landscape(&b)?);
            println!("{:.6}", distance_p(&a, &b, p)?);
            Ok(())
        }
        Command::Mean { inputs, out } => {
            let ls = inputs.iter().map(|p| load_landscape(p)).collect::<CliResult<Vec<_>>>()?;
            let m = mean(&ls).map_err(|e| CliError::Data(e.to_string()))?;
            write_file(&out, m.to_json()?.as_bytes())
        }
        Command::Plot { input, k, out, pgm } => {
            let l = MeanLandscape::from_json(&read_file(&input)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
            if k == 0 || k > l.k_max {
                return Err(CliError::Usage(format!("k must lie in 1..={}, got {k}", l.k_max)));
            }
            let body = if pgm { plot::pgm(&l, k) } else { plot::svg(&l, k) };
            write_file(&out, body.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{}", CliError::Usage("--threads must be at least 1".into()));
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stland: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
