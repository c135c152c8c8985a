//! wasm-bindgen exports for the browser demo in `www/`.
//!
//! Each export wraps a plain function returning `Result<_, String>`; those
//! build and run natively, which is how they are tested.

use gekp::analysis::{error_norms, DiscreteFunction};
use gekp::element::{HermiteBasis, LOCAL_DOFS};
use gekp::mesh::TriangleGeometry;
use gekp::study::{run_study, Example, StudyConfig};
use gekp::{assemble, solve, DiagonalPattern, FeSpace, Mesh, QuadratureConfig, SolverOptions};
use wasm_bindgen::prelude::*;

/// Largest mesh the page may request; keeps a solve well under a second.
pub const MAX_N: usize = 32;

fn example(id: u32) -> Result<Example, String> {
    match id {
        1 => Ok(Example::One),
        2 => Ok(Example::Two),
        _ => Err(format!("unknown example {id}")),
    }
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// A discrete solution sampled on a `res × res` grid of cell centres.
#[wasm_bindgen]
#[derive(Debug)]
pub struct Plate {
    res: usize,
    values: Vec<f64>,
    norm_iota_h: f64,
    h1: f64,
    dofs: usize,
}

#[wasm_bindgen]
impl Plate {
    pub fn res(&self) -> usize {
        self.res
    }

    /// Row-major samples, `y` increasing with the row.
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    pub fn norm_iota_h(&self) -> f64 {
        self.norm_iota_h
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn dofs(&self) -> usize {
        self.dofs
    }
}

fn grid(res: usize) -> impl Iterator<Item = [f64; 2]> {
    let step = 1.0 / res as f64;
    (0..res).flat_map(move |j| (0..res).map(move |i| [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step]))
}

/// Solves example 1 or 2 on the `n × n` structured mesh.
#[wasm_bindgen]
pub fn solve_plate(example_id: u32, n: usize, iota: f64, eta: f64, res: usize) -> Result<Plate, JsError> {
    js(plate(example_id, n, iota, eta, res))
}

pub fn plate(example_id: u32, n: usize, iota: f64, eta: f64, res: usize) -> Result<Plate, String> {
    if !(1..=MAX_N).contains(&n) {
        return Err(format!("n must be between 1 and {MAX_N}"));
    }
    let problem = example(example_id)?.problem(iota);
    let space = FeSpace::new(Mesh::structured(n, DiagonalPattern::LowerLeft));
    let quad = QuadratureConfig::default();
    let system = assemble(&space, iota, eta, problem.load.as_ref(), &quad).map_err(|e| e.to_string())?;
    let report = solve(&system, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let wh = DiscreteFunction::from_free(&space, &report.solution);
    let errors = problem.target().map(|w| error_norms(&wh, w, iota, &quad));
    Ok(Plate {
        res,
        values: grid(res).map(|p| wh.eval(p).unwrap_or(0.0)).collect(),
        norm_iota_h: errors.map_or(f64::NAN, |e| e.norm_iota_h),
        h1: errors.map_or(f64::NAN, |e| e.h1),
        dofs: space.dofs.n_free(),
    })
}

/// Samples local basis function `index` (0–9) of the reference triangle
/// `(0,0), (1,0), (0,1)` on a `res × res` grid; points outside are NaN.
///
/// Order: values at the three vertices, `(∂x, ∂y)` at each vertex, barycenter value.
#[wasm_bindgen]
pub fn basis_function(index: usize, res: usize) -> Result<Vec<f64>, JsError> {
    js(basis_samples(index, res))
}

pub fn basis_samples(index: usize, res: usize) -> Result<Vec<f64>, String> {
    if index >= LOCAL_DOFS {
        return Err(format!("basis index must be below {LOCAL_DOFS}"));
    }
    let basis = HermiteBasis::new(&TriangleGeometry::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]));
    Ok(grid(res)
        .map(|p| if p[0] + p[1] <= 1.0 { basis.eval(p, 0)[index].value } else { f64::NAN })
        .collect())
}

/// Runs a convergence study for example 1 on `n = 2, 4, …, max_n` and returns the rows as JSON.
#[wasm_bindgen]
pub fn convergence(iota: f64, eta: f64, max_n: usize) -> Result<String, JsError> {
    js(convergence_json(iota, eta, max_n))
}

pub fn convergence_json(iota: f64, eta: f64, max_n: usize) -> Result<String, String> {
    if !(2..=MAX_N).contains(&max_n) {
        return Err(format!("max_n must be between 2 and {MAX_N}"));
    }
    let mut cfg = StudyConfig::new(Example::One);
    cfg.ns = std::iter::successors(Some(2), |n| Some(n * 2)).take_while(|&n| n <= max_n).collect();
    cfg.iotas = vec![iota];
    cfg.etas = vec![eta];
    cfg.record_timing = false;
    let result = run_study(&cfg).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    result.write_json(&mut out).map_err(|e| e.to_string())?;
    String::from_utf8(out).map_err(|e| e.to_string())
}
