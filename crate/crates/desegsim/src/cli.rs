//! Command-line front end: `genmap`, `run` and `sweep` subcommands.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_rule, parse_voronoi, SimConfig};
use crate::engine;
use crate::error::{Error, Result};
use crate::mapgen::{emit_region_raster, generate_voronoi_map};
use crate::metrics::CSV_HEADER;
use crate::sweep::{run_sweep, SweepSpec};

#[derive(Parser, Debug)]
#[command(name = "desegsim", about = "Segregation dynamics under evolving group-leader influence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic Voronoi region map in the raster text format.
    Genmap(GenmapArgs),
    /// Run one simulation and write the per-tick metrics CSV.
    Run(RunArgs),
    /// Run a parameter sweep and write the aggregate CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct GenmapArgs {
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long)]
    pub regions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigFlags {
    /// Config file in key=value form; flags override file values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Region raster file.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Synthetic map spec WIDTHxHEIGHT:REGIONS (e.g. 100x100:54).
    #[arg(long)]
    pub voronoi: Option<String>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub pdtu: Option<f64>,
    #[arg(long)]
    pub segregation_threshold: Option<f64>,
    #[arg(long)]
    pub expat_bias: Option<f64>,
    /// Happiness rule: base | literal-eq2 | reconciled.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long)]
    pub nol: Option<usize>,
    #[arg(long)]
    pub fc: Option<f64>,
    #[arg(long)]
    pub pmutation: Option<f64>,
    #[arg(long)]
    pub cluster_radius: Option<f64>,
    #[arg(long)]
    pub radius_competition: Option<f64>,
    #[arg(long)]
    pub pif: Option<f64>,
    #[arg(long)]
    pub ir: Option<u64>,
    #[arg(long)]
    pub influence_duration: Option<u64>,
    #[arg(long)]
    pub max_ticks: Option<u64>,
    #[arg(long)]
    pub equilibrium_window: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigFlags,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigFlags,
    /// Comma-separated NOL values.
    #[arg(long, value_delimiter = ',', default_value = "25,50")]
    pub nol_values: Vec<usize>,
    /// Comma-separated FC values.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.5")]
    pub fc_values: Vec<f64>,
    /// Comma-separated IR values.
    #[arg(long, value_delimiter = ',', default_value = "5,25,50")]
    pub ir_values: Vec<u64>,
    /// Comma-separated PIF values.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.5")]
    pub pif_values: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,
    /// Ticks excluded from per-run means.
    #[arg(long, default_value_t = 0)]
    pub warmup: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

impl ConfigFlags {
    pub fn resolve(&self) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(&fs::read_to_string(path)?)?;
        }
        let mut overrides: HashMap<String, String> = HashMap::new();
        macro_rules! flag {
            ($field:ident) => {
                if let Some(v) = &self.$field {
                    overrides.insert(stringify!($field).to_string(), v.to_string());
                }
            };
        }
        flag!(population);
        flag!(pdtu);
        flag!(segregation_threshold);
        flag!(expat_bias);
        flag!(nol);
        flag!(fc);
        flag!(pmutation);
        flag!(cluster_radius);
        flag!(radius_competition);
        flag!(pif);
        flag!(ir);
        flag!(influence_duration);
        flag!(max_ticks);
        flag!(equilibrium_window);
        flag!(seed);
        crate::config::apply_overrides(&mut cfg, &overrides)?;
        if let Some(map) = &self.map {
            cfg.map = crate::config::MapSource::Raster(map.clone());
        }
        if let Some(spec) = &self.voronoi {
            cfg.map = parse_voronoi(spec)?;
        }
        if let Some(rule) = &self.rule {
            cfg.rule = parse_rule(rule)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn cmd_genmap(args: &GenmapArgs) -> Result<()> {
    let raster = generate_voronoi_map(args.width, args.height, args.regions, args.seed)?;
    fs::write(&args.output, emit_region_raster(&raster))?;
    Ok(())
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let result = engine::run(&cfg)?;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    fs::write(&args.output, out)?;
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let spec = SweepSpec {
        nol: args.nol_values.clone(),
        fc: args.fc_values.clone(),
        ir: args.ir_values.clone(),
        pif: args.pif_values.clone(),
        replicates: args.replicates,
        base: args.config.resolve()?,
        warmup: args.warmup,
    };
    let csv = run_sweep(&spec)?;
    fs::write(&args.output, csv)?;
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Genmap(args) => cmd_genmap(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

/// Exit code for a failed invocation: usage/config problems are 1, runtime
/// failures 2.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Parse { .. } | Error::Validation(_) | Error::Capacity { .. } => 1,
        Error::Io(_) => 2,
    }
}
