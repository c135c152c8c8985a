//! `gekp`: convergence studies for the gradient-elastic Kirchhoff plate.

mod config_file;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Parser, ValueEnum};
use gekp::quadrature::QuadratureConfig;
use gekp::solver::SolveMethod;
use gekp::study::{run_study, Example, StudyConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gekp", version, about = "Convergence studies for the gradient-elastic Kirchhoff plate")]
#[command(args_override_self = true)]
struct Cli {
    /// Study file with `key = value` lines using the flag names; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,

    /// 1 (smooth solution), 2 (boundary layer) or custom (unit load on --mesh-file).
    #[arg(long, default_value = "1")]
    example: Example,

    /// Mesh sizes: the unit square is split into n×n cells.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "4,8,16,32,64")]
    n: Vec<usize>,

    /// Size parameters; defaults depend on the example.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',')]
    iota: Option<Vec<f64>>,

    /// Penalty parameters.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "10")]
    eta: Vec<f64>,

    /// Quadrature degree for load vectors.
    #[arg(long, default_value_t = QuadratureConfig::default().load_degree)]
    quad_volume: usize,

    /// Quadrature degree for error norms.
    #[arg(long, default_value_t = QuadratureConfig::default().error_degree)]
    quad_error: usize,

    /// Gauss points per edge for the bilinear forms.
    #[arg(long, default_value_t = QuadratureConfig::default().edge_points)]
    quad_edge: usize,

    #[arg(long, default_value = "direct")]
    solver: SolveMethod,

    /// Factor indefinite systems (tiny penalties) instead of reporting them as failures.
    #[arg(long)]
    allow_indefinite: bool,

    /// Triangle mesh file; replaces the structured meshes.
    #[arg(long)]
    mesh_file: Option<PathBuf>,

    /// Results file; the table is always printed.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Worker threads for assembly and norms (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Write 0 for solve times so reruns produce identical files.
    #[arg(long)]
    no_timing: bool,
}

impl Cli {
    fn study_config(&self) -> StudyConfig {
        let mut cfg = StudyConfig::new(self.example);
        cfg.ns = self.n.clone();
        if let Some(iotas) = &self.iota {
            cfg.iotas = iotas.clone();
        }
        cfg.etas = self.eta.clone();
        cfg.quadrature.load_degree = self.quad_volume;
        cfg.quadrature.error_degree = self.quad_error;
        cfg.quadrature.edge_points = self.quad_edge;
        cfg.solver = self.solver;
        cfg.allow_indefinite = self.allow_indefinite;
        cfg.mesh_file = self.mesh_file.clone();
        cfg.record_timing = !self.no_timing;
        cfg
    }
}

/// Parses flags, splicing in the config file's arguments ahead of the command line.
fn parse() -> Result<Cli, String> {
    let args: Vec<String> = std::env::args().collect();
    let cli = try_parse(&args)?;
    let Some(path) = &cli.config else { return Ok(cli) };
    let from_file = config_file::read(path).map_err(|e| e.to_string())?;
    let merged: Vec<String> = std::iter::once(args[0].clone()).chain(from_file).chain(args[1..].iter().cloned()).collect();
    try_parse(&merged)
}

/// Usage errors exit with 1 like other errors; 2 is kept for failed grid points.
fn try_parse(args: &[String]) -> Result<Cli, String> {
    Cli::try_parse_from(args).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
        _ => e.render().to_string().trim_start_matches("error: ").trim_end().to_string(),
    })
}

fn run() -> Result<ExitCode, String> {
    let cli = parse()?;
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let result = run_study(&cli.study_config()).map_err(|e| e.to_string())?;
    print!("{}", result.table());
    if let Some(path) = &cli.out {
        let file = File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
        let mut out = BufWriter::new(file);
        match cli.format {
            Format::Csv => result.write_csv(&mut out),
            Format::Json => result.write_json(&mut out),
        }
        .and_then(|_| out.flush())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(if result.failed() > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
