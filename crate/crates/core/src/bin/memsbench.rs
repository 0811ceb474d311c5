use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use memsplace::bench::{
    parse_list, parse_number, run_relational, run_spatial, write_csv, BenchConfig, Placement,
    ProjectionPick, RelationalSweep, SpatialSweep,
};
use memsplace::spatial::Curve;
use memsplace::workload::Distribution;
use memsplace::{
    cmu_defaults, mems_to_rs, rs_params, rs_to_mems, DeviceConfig, DeviceParams, Error, PhysAddr,
    Result, RsAddr, SeekModel,
};

/// MEMS storage emulator and data-placement benchmarks.
#[derive(Parser)]
#[command(name = "memsbench", version)]
struct Cli {
    /// Device description (TOML); unset keys keep the CMU defaults.
    #[arg(long, global = true, value_name = "PATH")]
    device_config: Option<PathBuf>,

    /// Seek model; overrides the config file.
    #[arg(long, global = true, value_name = "average|distance")]
    seek_model: Option<SeekModel>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print device parameters and derived RS characteristics.
    Info,
    /// Translate an address between the RS view and the physical device.
    Map {
        #[command(subcommand)]
        direction: MapDirection,
    },
    /// Run retrieval-time experiments and write CSV.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Subcommand)]
enum MapDirection {
    /// `r s` to `r_x r_y s_x s_y`.
    RsToMems { r: u32, s: u32 },
    /// `r_x r_y s_x s_y` to `r s`.
    MemsToRs {
        r_x: u32,
        r_y: u32,
        s_x: u32,
        s_y: u32,
    },
}

#[derive(Subcommand)]
enum BenchKind {
    /// Size sweep and projection sweep over relational placements.
    Relational(RelationalArgs),
    /// Query-size sweep and aspect sweep over spatial placements.
    Spatial(SpatialArgs),
}

#[derive(Args)]
struct Common {
    /// Placements to run, comma separated (default: all of this kind).
    #[arg(long, value_name = "NAME")]
    placement: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Seeds averaged per sweep point.
    #[arg(long, default_value_t = 20)]
    repeats: u32,
    /// CSV destination (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RelationalArgs {
    #[command(flatten)]
    common: Common,
    /// Relation sizes in MB for the size sweep.
    #[arg(long, value_name = "LIST")]
    sizes: Option<String>,
    /// Projection widths for the projection sweep.
    #[arg(long, value_name = "LIST")]
    nproj: Option<String>,
    #[arg(long, value_name = "F", default_value = "0.1")]
    selectivity: String,
    /// Which attributes are projected: leading or random.
    #[arg(long, default_value = "random")]
    projection: ProjectionPick,
    /// Where qualifying tuples sit: uniform or clustered.
    #[arg(long, default_value = "uniform")]
    distribution: Distribution,
}

#[derive(Args)]
struct SpatialArgs {
    #[command(flatten)]
    common: Common,
    /// Query sizes as fractions of the space (`0.0001` or `0.01%`).
    #[arg(long, value_name = "LIST")]
    query_sizes: Option<String>,
    /// Query aspects, width over height (`16`, `1/16`).
    #[arg(long, value_name = "LIST")]
    aspects: Option<String>,
    #[arg(long, default_value = "hilbert", value_name = "hilbert|zorder")]
    curve: Curve,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("memsbench: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (params, file_model) = match &cli.device_config {
        Some(path) => {
            let cfg = DeviceConfig::load(path)?;
            (cfg.apply(cmu_defaults())?, cfg.seek_model)
        }
        None => (cmu_defaults(), None),
    };
    let seek_model = cli.seek_model.or(file_model).unwrap_or_default();
    match cli.command {
        Command::Info => info(&params, seek_model),
        Command::Map { direction } => map(direction, &params),
        Command::Bench { kind } => bench(kind, params, seek_model),
    }
}

fn info(p: &DeviceParams, model: SeekModel) -> Result<()> {
    let d = p.derive()?;
    let rs = rs_params(p);
    let mut out = io::stdout().lock();
    writeln!(out, "# device")?;
    write!(out, "{}", DeviceConfig::from_params(p).to_toml())?;
    writeln!(out, "seek_model = \"{model}\"")?;
    writeln!(out, "\n# derived")?;
    writeln!(out, "region_size_bits = {}", d.region_size_bits)?;
    writeln!(out, "capacity_bytes = {}", p.capacity_bits() / 8)?;
    writeln!(out, "sector_time_ms = {:.6}", d.sector_time_s * 1e3)?;
    writeln!(
        out,
        "region_read_time_ms = {:.4}",
        d.region_read_time_s * 1e3
    )?;
    writeln!(
        out,
        "transfer_rate_rs_mbit_s = {:.6}",
        rs.transfer_rate_rs / 1e6
    )?;
    writeln!(out, "seek_time_rs_ms = {:.4}", rs.seek_time_rs * 1e3)?;
    Ok(())
}

fn map(direction: MapDirection, p: &DeviceParams) -> Result<()> {
    match direction {
        MapDirection::RsToMems { r, s } => println!("{}", rs_to_mems(RsAddr::new(r, s), p)?),
        MapDirection::MemsToRs { r_x, r_y, s_x, s_y } => {
            println!("{}", mems_to_rs(PhysAddr { r_x, r_y, s_x, s_y }, p)?)
        }
    }
    Ok(())
}

fn placements(arg: &Option<String>, all: &[Placement], relational: bool) -> Result<Vec<Placement>> {
    let Some(list) = arg else {
        return Ok(all.to_vec());
    };
    list.split(',')
        .map(|s| {
            let p: Placement = s.trim().parse()?;
            if p.is_relational() != relational {
                return Err(Error::Config(format!(
                    "placement {p} does not belong to this benchmark"
                )));
            }
            Ok(p)
        })
        .collect()
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn bench(kind: BenchKind, params: DeviceParams, seek_model: SeekModel) -> Result<()> {
    let base = |c: &Common| BenchConfig {
        params,
        seek_model,
        seed: c.seed,
        repeats: c.repeats,
        ..BenchConfig::default()
    };
    match kind {
        BenchKind::Relational(a) => {
            let cfg = BenchConfig {
                projection: a.projection,
                distribution: a.distribution,
                ..base(&a.common)
            };
            let mut sweep = RelationalSweep {
                selectivity: parse_number(&a.selectivity)?,
                ..RelationalSweep::default()
            };
            if let Some(s) = &a.sizes {
                sweep.sizes_mb = parse_list(s)?;
            }
            if let Some(s) = &a.nproj {
                sweep.n_projections = parse_list(s)?
                    .into_iter()
                    .map(|v| whole(v, "--nproj"))
                    .collect::<Result<_>>()?;
            }
            let which = placements(&a.common.placement, &Placement::RELATIONAL, true)?;
            let rows = run_relational(&which, &sweep, &cfg)?;
            write_csv(&rows, output(&a.common.out)?)
        }
        BenchKind::Spatial(a) => {
            let cfg = BenchConfig {
                curve: a.curve,
                ..base(&a.common)
            };
            let mut sweep = SpatialSweep::default();
            if let Some(s) = &a.query_sizes {
                sweep.query_sizes = parse_list(s)?;
            }
            if let Some(s) = &a.aspects {
                sweep.aspects = parse_list(s)?;
            }
            let which = placements(&a.common.placement, &Placement::SPATIAL, false)?;
            let rows = run_spatial(&which, &sweep, &cfg)?;
            write_csv(&rows, output(&a.common.out)?)
        }
    }
}

fn whole(v: f64, flag: &str) -> Result<u32> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(Error::Config(format!(
            "{flag} expects positive integers, got {v}"
        )))
    }
}
