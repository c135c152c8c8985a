//! Convergence studies over grids of mesh sizes, size parameters and penalties.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{error_norms, oscillation, rate, DiscreteFunction, ErrorReport};
use crate::assembly::{assemble_forms, assemble_load, AssemblyError, FeSpace, GlobalForms, DEFAULT_ETA};
use crate::mesh::{DiagonalPattern, Mesh, MeshError};
use crate::problems::ManufacturedProblem;
use crate::quadrature::QuadratureConfig;
use crate::solver::{solve, SolveMethod, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    /// Smooth manufactured solution, load depends on ι.
    One,
    /// Boundary-layer problem, errors against the reduced solution.
    Two,
    /// Unit load on a user mesh; no error norms.
    Custom,
}

impl Example {
    pub fn label(self) -> &'static str {
        match self {
            Example::One => "1",
            Example::Two => "2",
            Example::Custom => "custom",
        }
    }

    pub fn default_iotas(self) -> Vec<f64> {
        match self {
            Example::One => vec![1.0, 1e-2, 1e-4, 1e-6, 0.0],
            Example::Two => vec![1e-6, 1e-8],
            Example::Custom => vec![1e-2],
        }
    }

    pub fn problem(self, iota: f64) -> ManufacturedProblem {
        match self {
            Example::One => ManufacturedProblem::example1(iota),
            Example::Two => ManufacturedProblem::example2(),
            Example::Custom => ManufacturedProblem::uniform_load(),
        }
    }
}

impl std::str::FromStr for Example {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(Example::One),
            "2" => Ok(Example::Two),
            "custom" => Ok(Example::Custom),
            _ => Err(format!("unknown example `{s}` (expected 1, 2 or custom)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyConfig {
    pub example: Example,
    pub ns: Vec<usize>,
    pub iotas: Vec<f64>,
    pub etas: Vec<f64>,
    pub quadrature: QuadratureConfig,
    pub solver: SolveMethod,
    /// Factor indefinite systems instead of failing (direct solver only).
    pub allow_indefinite: bool,
    /// Replaces the structured meshes; the study then has a single mesh level.
    pub mesh_file: Option<PathBuf>,
    /// Write measured solve times; when off the column is 0 so reruns are byte-identical.
    pub record_timing: bool,
}

impl StudyConfig {
    pub fn new(example: Example) -> Self {
        Self {
            example,
            ns: vec![4, 8, 16, 32, 64],
            iotas: example.default_iotas(),
            etas: vec![DEFAULT_ETA],
            quadrature: QuadratureConfig::default(),
            solver: SolveMethod::Direct,
            allow_indefinite: false,
            mesh_file: None,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<(), StudyError> {
        if self.ns.is_empty() && self.mesh_file.is_none() {
            return Err(StudyError::Config("no mesh sizes given".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n == 0) {
            return Err(StudyError::Config(format!("mesh size must be at least 1, got {n}")));
        }
        if let Some(&eta) = self.etas.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
            return Err(StudyError::Config(format!("penalty must be positive, got {eta}")));
        }
        if let Some(&iota) = self.iotas.iter().find(|&&i| !(i >= 0.0 && i.is_finite())) {
            return Err(StudyError::Config(format!("size parameter must be non-negative, got {iota}")));
        }
        if self.iotas.is_empty() || self.etas.is_empty() {
            return Err(StudyError::Config("empty iota or eta list".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("invalid study configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("failed to write output: {0}")]
    Io(#[from] std::io::Error),
}

/// One grid point of a study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub example: Example,
    pub n: usize,
    pub h: f64,
    pub iota: f64,
    pub eta: f64,
    pub dofs: usize,
    pub errors: Option<ErrorReport>,
    pub osc: f64,
    /// Rate of `‖·‖_{ι,h}` against the previous mesh level at the same `(ι, η)`.
    pub rate_norm_iota_h: Option<f64>,
    /// Same for `norm_iota1_h`.
    pub rate_norm_iota1_h: Option<f64>,
    pub solve_seconds: f64,
    pub solver: SolveMethod,
    pub residual: Option<f64>,
    pub negative_pivots: usize,
    /// Failure message, if the grid point did not complete.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
}

fn mesh_levels(config: &StudyConfig) -> Result<Vec<(usize, Mesh)>, StudyError> {
    match &config.mesh_file {
        Some(path) => {
            let mesh = Mesh::read_file(path)?;
            mesh.check_shape_regularity(crate::mesh::DEFAULT_SHAPE_BOUND)?;
            Ok(vec![(0, mesh)])
        }
        None => Ok(config
            .ns
            .iter()
            .map(|&n| (n, Mesh::structured(n, DiagonalPattern::LowerLeft)))
            .collect()),
    }
}

fn solve_point(
    config: &StudyConfig,
    space: &FeSpace,
    forms: &GlobalForms,
    n: usize,
    iota: f64,
    eta: f64,
) -> Result<StudyRow, AssemblyError> {
    let problem = config.example.problem(iota);
    let quad = &config.quadrature;
    let load = assemble_load(space, problem.load.as_ref(), quad.load_degree)?;
    let system = forms.system(&space.dofs, iota, &load)?;
    let osc = oscillation(problem.load.as_ref(), &space.mesh, quad.error_degree);
    let mut row = StudyRow {
        example: config.example,
        n,
        h: space.mesh.h(),
        iota,
        eta,
        dofs: space.dofs.n_free(),
        errors: None,
        osc,
        rate_norm_iota_h: None,
        rate_norm_iota1_h: None,
        solve_seconds: 0.0,
        solver: config.solver,
        residual: None,
        negative_pivots: 0,
        failure: None,
    };
    let options = SolverOptions {
        method: config.solver,
        require_spd: !config.allow_indefinite,
        ..SolverOptions::default()
    };
    // no clock on wasm32-unknown-unknown, so only read it when asked to
    let start = config.record_timing.then(Instant::now);
    let report = solve(&system, &options);
    if let Some(start) = start {
        row.solve_seconds = start.elapsed().as_secs_f64();
    }
    match report {
        Ok(report) => {
            row.residual = Some(report.relative_residual);
            row.negative_pivots = report.negative_pivots;
            let wh = DiscreteFunction::from_free(space, &report.solution);
            row.errors = problem
                .target()
                .map(|t| error_norms(&wh, t, iota, quad).with_eta(eta).with_oscillation(osc));
        }
        Err(e) => row.failure = Some(e.to_string()),
    }
    Ok(row)
}

/// Runs every grid point; rows are ordered by `ι`, then `η`, then mesh size.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult, StudyError> {
    config.validate()?;
    let levels = mesh_levels(config)?;
    let (ni, ne, nl) = (config.iotas.len(), config.etas.len(), levels.len());
    let mut slots: Vec<Option<StudyRow>> = vec![None; ni * ne * nl];
    for (l, (n, mesh)) in levels.into_iter().enumerate() {
        let space = FeSpace::new(mesh);
        for (e, &eta) in config.etas.iter().enumerate() {
            let forms = assemble_forms(&space, eta, &config.quadrature)?;
            for (i, &iota) in config.iotas.iter().enumerate() {
                slots[(i * ne + e) * nl + l] = Some(solve_point(config, &space, &forms, n, iota, eta)?);
            }
        }
    }
    let mut rows: Vec<StudyRow> = slots.into_iter().map(|r| r.expect("every grid point visited")).collect();
    for chunk in rows.chunks_mut(nl) {
        for l in 1..chunk.len() {
            let (coarse, fine) = (chunk[l - 1].errors, chunk[l].errors);
            let pair = |g: fn(&ErrorReport) -> f64| match (coarse, fine) {
                (Some(c), Some(f)) => rate(g(&c), g(&f)),
                _ => None,
            };
            chunk[l].rate_norm_iota_h = pair(|e| e.norm_iota_h);
            chunk[l].rate_norm_iota1_h = pair(|e| e.norm_iota1_h);
        }
    }
    Ok(StudyResult {
        config: config.clone(),
        rows,
    })
}

pub const CSV_COLUMNS: [&str; 23] = [
    "example",
    "n",
    "h",
    "iota",
    "eta",
    "dofs",
    "l2",
    "h1",
    "h2_broken",
    "h3_broken",
    "jump_n_1",
    "jump_n_3",
    "jump_nn_1",
    "triple2",
    "triple3",
    "norm_iota_h",
    "osc",
    "rate_norm_iota_h",
    "solve_seconds",
    "solver",
    "residual",
    "norm_iota1_h",
    "rate_norm_iota1_h",
];

/// Undefined entries (missing norms, undefined rates) in CSV output.
pub const UNDEFINED: &str = "-";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |v| format!("{v:e}"))
}

impl StudyResult {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        for r in &self.rows {
            let e = r.errors;
            let f = |g: fn(&ErrorReport) -> f64| opt(e.as_ref().map(g));
            let fields = [
                r.example.label().to_string(),
                r.n.to_string(),
                format!("{:e}", r.h),
                format!("{:e}", r.iota),
                format!("{:e}", r.eta),
                r.dofs.to_string(),
                f(|e| e.l2),
                f(|e| e.h1),
                f(|e| e.h2_broken),
                f(|e| e.h3_broken),
                f(|e| e.jump_n_1),
                f(|e| e.jump_n_3),
                f(|e| e.jump_nn_1),
                f(|e| e.triple2),
                f(|e| e.triple3),
                f(|e| e.norm_iota_h),
                format!("{:e}", r.osc),
                opt(r.rate_norm_iota_h),
                format!("{:e}", r.solve_seconds),
                r.solver.name().to_string(),
                opt(r.residual),
                f(|e| e.norm_iota1_h),
                opt(r.rate_norm_iota1_h),
            ];
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn write_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self).map_err(std::io::Error::from)?;
        writeln!(out)
    }

    /// Rows for one `(ι, η)` pair, coarse to fine.
    pub fn series(&self, iota: f64, eta: f64) -> Vec<&StudyRow> {
        self.rows.iter().filter(|r| r.iota == iota && r.eta == eta).collect()
    }

    /// Finest-pair rate of a norm for one `(ι, η)` pair.
    pub fn final_rate(&self, iota: f64, eta: f64, norm: fn(&ErrorReport) -> f64) -> Option<f64> {
        let s = self.series(iota, eta);
        let [.., a, b] = s.as_slice() else { return None };
        rate(norm(a.errors.as_ref()?), norm(b.errors.as_ref()?))
    }

    /// Text table: one line per `(ι, η)` with `‖·‖_{ι,h}` per mesh size and the finest-pair rate,
    /// followed (for the boundary-layer example) by a per-norm table for each `ι`.
    pub fn table(&self) -> String {
        let mut s = String::new();
        if self.rows.is_empty() {
            return s;
        }
        s.push_str(&self.summary(|e| e.norm_iota_h, |r| r.rate_norm_iota_h));
        if self.rows.iter().any(|r| r.errors.is_some() && r.iota != 0.0 && r.iota != 1.0) {
            let _ = writeln!(s, "\nnorm_iota1_h (third-order part weighted by iota):");
            s.push_str(&self.summary(|e| e.norm_iota1_h, |r| r.rate_norm_iota1_h));
        }
        if self.config.example == Example::Two {
            for iota in &self.config.iotas {
                for eta in &self.config.etas {
                    s.push('\n');
                    let _ = writeln!(s, "iota = {iota:e}, eta = {eta:e}");
                    s.push_str(&self.norm_table(*iota, *eta));
                }
            }
        }
        for r in self.rows.iter().filter(|r| r.failure.is_some()) {
            let _ = writeln!(
                s,
                "failed: n={} iota={:e} eta={:e}: {}",
                r.n,
                r.iota,
                r.eta,
                r.failure.as_deref().unwrap_or_default()
            );
        }
        s
    }

    fn summary(&self, norm: fn(&ErrorReport) -> f64, rate_of: fn(&StudyRow) -> Option<f64>) -> String {
        let mut s = String::new();
        let first = &self.rows[0];
        let _ = write!(s, "{:>10} {:>10}", "iota", "eta");
        for r in self.series(first.iota, first.eta) {
            let _ = write!(s, " {:>11}", format!("h=1/{}", r.n));
        }
        let _ = writeln!(s, " {:>6}", "rate");
        for iota in &self.config.iotas {
            for eta in &self.config.etas {
                let series = self.series(*iota, *eta);
                let _ = write!(s, "{:>10} {:>10}", format!("{iota:e}"), format!("{eta:e}"));
                for r in &series {
                    let cell = match (&r.errors, &r.failure) {
                        (Some(e), _) => format!("{:.3e}", norm(e)),
                        (None, Some(_)) => "failed".into(),
                        (None, None) => UNDEFINED.into(),
                    };
                    let _ = write!(s, " {cell:>11}");
                }
                let last = series.last().and_then(|r| rate_of(r));
                let _ = writeln!(s, " {:>6}", last.map_or(UNDEFINED.to_string(), |r| format!("{r:.2}")));
            }
        }
        s
    }

    fn norm_table(&self, iota: f64, eta: f64) -> String {
        let norms: [(&str, fn(&ErrorReport) -> f64); 6] = [
            ("norm_iota_h", |e| e.norm_iota_h),
            ("norm_iota1_h", |e| e.norm_iota1_h),
            ("h1", |e| e.h1),
            ("h2_broken", |e| e.h2_broken),
            ("h3_broken", |e| e.h3_broken),
            ("l2", |e| e.l2),
        ];
        let series = self.series(iota, eta);
        let mut s = String::new();
        let _ = write!(s, "{:>12}", "");
        for (i, r) in series.iter().enumerate() {
            if i > 0 {
                let _ = write!(s, " {:>6}", "rate");
            }
            let _ = write!(s, " {:>11}", format!("h=1/{}", r.n));
        }
        s.push('\n');
        for (name, f) in norms {
            let _ = write!(s, "{name:>12}");
            let mut prev: Option<f64> = None;
            for (i, r) in series.iter().enumerate() {
                let v = r.errors.as_ref().map(f);
                if i > 0 {
                    let rt = match (prev, v) {
                        (Some(a), Some(b)) => rate(a, b),
                        _ => None,
                    };
                    let _ = write!(s, " {:>6}", rt.map_or(UNDEFINED.to_string(), |r| format!("{r:.2}")));
                }
                let _ = write!(s, " {:>11}", v.map_or(UNDEFINED.to_string(), |v| format!("{v:.3e}")));
                prev = v;
            }
            s.push('\n');
        }
        s
    }
}
