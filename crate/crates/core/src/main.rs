use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use deflection::export::{run_dir_name, write_outputs, DataFormat, Manifest};
use deflection::scenario::{list_presets, preset, OutputKind, ScenarioConfig, PRESET_NAMES};
use deflection::{DeflectionError, DistributionGrid, Normalization};

/// Conditional deflection patterns of Λ atoms in crossed cavity fields.
#[derive(Parser)]
#[command(name = "deflection", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a scenario and write its distributions.
    Run(RunArgs),
    /// List the built-in presets, or print one as an editable config.
    Presets {
        /// Print this preset as TOML instead of listing all of them.
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
    /// Check a config or preset without computing anything.
    Validate(Source),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// TOML scenario file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Override the number of grid points per axis.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Override the Fock cutoff.
    #[arg(long, value_name = "N")]
    nmax: Option<usize>,
    #[arg(long, value_enum, default_value_t = Norm::Raw)]
    normalize: Norm,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Skip the PNG heatmaps.
    #[arg(long)]
    no_png: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Raw,
    Unit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Io(String),
    Config(String),
    Numerical(String),
}

impl From<DeflectionError> for Failure {
    fn from(e: DeflectionError) -> Self {
        match e {
            DeflectionError::Config(_) | DeflectionError::Domain(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn load(source: &Source) -> Result<ScenarioConfig, Failure> {
    if let Some(name) = &source.preset {
        return preset(name)
            .ok_or_else(|| Failure::Config(format!("unknown preset `{name}`; available: {}", PRESET_NAMES.join(", "))));
    }
    let path = source.config.as_ref().expect("clap enforces one source");
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Heatmap window: the beam ±2.5σ for position-like outputs, the region
/// above 10⁻⁴ of the peak for momentum.
fn image_window(cfg: &ScenarioConfig, kind: OutputKind, dist: &DistributionGrid) -> Option<(f64, f64, f64, f64)> {
    let b = &cfg.beam;
    let spread = |s: f64| match (kind, cfg.propagation) {
        (OutputKind::FarField, Some(p)) => (s * s + p.fresnel_scale.powi(2) / (4.0 * s * s)).sqrt(),
        _ => s,
    };
    match kind {
        OutputKind::Position | OutputKind::FarField => {
            let (hx, hy) = (2.5 * spread(b.sigma_x), 2.5 * spread(b.sigma_y));
            Some((b.center_x - hx, b.center_x + hx, b.center_y - hy, b.center_y + hy))
        }
        OutputKind::Momentum => {
            let peak = dist.values.iter().cloned().fold(0.0, f64::max);
            let (xs, ys) = (dist.xs(), dist.ys());
            let mut half = 0.0f64;
            for (p, v) in dist.values.iter().enumerate() {
                if *v > 1e-4 * peak {
                    half = half.max(xs[p % xs.len()].abs()).max(ys[p / xs.len()].abs());
                }
            }
            (half > 0.0).then_some((-half, half, -half, half))
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = load(&args.source)?;
    if let Some(n) = args.grid {
        cfg = cfg.with_grid_points(n);
    }
    if let Some(n) = args.nmax {
        cfg = cfg.with_n_max(n);
    }
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    let normalization = match args.normalize {
        Norm::Raw => Normalization::Raw,
        Norm::Unit => Normalization::UnitMass,
    };
    let format = match args.format {
        Format::Csv => DataFormat::Csv,
        Format::Json => DataFormat::Json,
    };
    let scenario = cfg.resolve()?;
    let results = scenario.run()?;
    let mut outputs = Vec::new();
    for kind in &cfg.outputs {
        let dist = results.get(*kind).expect("every requested output is computed").normalized(normalization)?;
        let window = image_window(&cfg, *kind, &dist);
        outputs.push((*kind, dist, window));
    }
    let dir = args.out_dir.join(run_dir_name(&cfg));
    let mut manifest = Manifest::new(&cfg, normalization);
    let written = write_outputs(&dir, &mut manifest, &outputs, format, !args.no_png)
        .map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Presets { dump: None } => {
            print!("{}", list_presets());
            Ok(())
        }
        Command::Presets { dump: Some(name) } => {
            let cfg = load(&Source { config: None, preset: Some(name) })?;
            let text = toml::to_string(&cfg).map_err(|e| Failure::Io(e.to_string()))?;
            print!("{text}");
            Ok(())
        }
        Command::Validate(source) => {
            let cfg = load(&source)?;
            cfg.resolve()?;
            println!("ok: {}", run_dir_name(&cfg));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
