//! Global assembly of `ι² a_h + b_h` and the load vector.
//!
//! Element and edge kernels run in parallel; their local matrices are
//! collected in element/edge order and merged serially, so the assembled
//! matrices do not depend on the number of threads.

mod dofmap;
pub mod kernels;

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use sprs::{CsMat, TriMat};
use thiserror::Error;

pub use dofmap::DofMap;
pub use kernels::{local_edge_matrix, local_volume_matrices, EdgeTrace, EdgeTraces, Form, JumpAverage};

use crate::element::{HermiteBasis, LocalMatrix, LOCAL_DOFS};
use crate::mesh::Mesh;
use crate::problems::{ScalarField, SmoothField};
use crate::quadrature::{EdgeRule, QuadratureConfig, QuadratureError, TriangleRule};

/// Default penalty parameter.
pub const DEFAULT_ETA: f64 = 10.0;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("penalty parameter must be positive, got {0}")]
    InvalidPenalty(f64),
    #[error("size parameter must be non-negative, got {0}")]
    InvalidIota(f64),
    #[error("a smooth field used with iota > 0 must provide fourth derivatives")]
    MissingFourthDerivatives,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A mesh together with its DoF numbering and per-triangle shape functions.
#[derive(Debug, Clone)]
pub struct FeSpace {
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub bases: Vec<HermiteBasis>,
}

impl FeSpace {
    pub fn new(mesh: Mesh) -> Self {
        let dofs = DofMap::new(&mesh);
        let bases = mesh.geometry.iter().map(HermiteBasis::new).collect();
        Self { mesh, dofs, bases }
    }

    pub fn local_to_global(&self, k: usize) -> [usize; LOCAL_DOFS] {
        self.dofs.local_to_global(&self.mesh, k)
    }

    /// Global indices of the stacked local DoFs of an edge (K⁺ first).
    pub fn edge_dofs(&self, edge: usize) -> Vec<usize> {
        let e = &self.mesh.edges[edge];
        let mut dofs = self.local_to_global(e.plus).to_vec();
        if let Some(m) = e.minus {
            dofs.extend(self.local_to_global(m));
        }
        dofs
    }
}

/// `a_h` and `b_h` over all DoFs, before boundary conditions.
#[derive(Debug, Clone)]
pub struct GlobalForms {
    pub a: CsMat<f64>,
    pub b: CsMat<f64>,
    pub eta: f64,
}

/// The reduced system `S x = F` on free DoFs.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// `ι² A_a + A_b` restricted to free DoFs.
    pub matrix: CsMat<f64>,
    pub load: Vec<f64>,
    pub iota: f64,
    pub eta: f64,
}

fn check_eta(eta: f64) -> Result<(), AssemblyError> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(AssemblyError::InvalidPenalty(eta))
    }
}

fn check_iota(iota: f64) -> Result<(), AssemblyError> {
    if iota >= 0.0 && iota.is_finite() {
        Ok(())
    } else {
        Err(AssemblyError::InvalidIota(iota))
    }
}

fn scatter_dense(trip: &mut TriMat<f64>, dofs: &[usize], m: impl Fn(usize, usize) -> f64) {
    for (i, &gi) in dofs.iter().enumerate() {
        for (j, &gj) in dofs.iter().enumerate() {
            trip.add_triplet(gi, gj, m(i, j));
        }
    }
}

/// Assembles both bilinear forms over all DoFs.
pub fn assemble_forms(space: &FeSpace, eta: f64, quad: &QuadratureConfig) -> Result<GlobalForms, AssemblyError> {
    check_eta(eta)?;
    let volume_rule = TriangleRule::with_degree(quad.stiffness_degree)?;
    let edge_rule = EdgeRule::gauss(quad.edge_points)?;
    let mesh = &space.mesh;

    let volume: Vec<(LocalMatrix, LocalMatrix)> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|k| local_volume_matrices(&mesh.geometry[k], &space.bases[k], &volume_rule))
        .collect();
    let edges: Vec<(DMatrix<f64>, DMatrix<f64>)> = mesh
        .edges
        .par_iter()
        .map(|e| {
            let traces = EdgeTraces::new(mesh, &space.bases, e, &edge_rule);
            (traces.matrix(Form::A, eta), traces.matrix(Form::B, eta))
        })
        .collect();

    let n = space.dofs.n_total();
    let nnz = volume.len() * 100 + edges.len() * 400;
    let mut ta = TriMat::with_capacity((n, n), nnz);
    let mut tb = TriMat::with_capacity((n, n), nnz);
    for (k, (a, b)) in volume.iter().enumerate() {
        let dofs = space.local_to_global(k);
        scatter_dense(&mut ta, &dofs, |i, j| a[(i, j)]);
        scatter_dense(&mut tb, &dofs, |i, j| b[(i, j)]);
    }
    for (e, (a, b)) in edges.iter().enumerate() {
        let dofs = space.edge_dofs(e);
        scatter_dense(&mut ta, &dofs, |i, j| a[(i, j)]);
        scatter_dense(&mut tb, &dofs, |i, j| b[(i, j)]);
    }
    Ok(GlobalForms {
        a: ta.to_csr(),
        b: tb.to_csr(),
        eta,
    })
}

/// `F_i = (f, φ_i)` over all DoFs.
pub fn assemble_load(space: &FeSpace, f: &dyn ScalarField, degree: usize) -> Result<Vec<f64>, AssemblyError> {
    let rule = TriangleRule::with_degree(degree)?;
    let mesh = &space.mesh;
    let local: Vec<[f64; LOCAL_DOFS]> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|k| {
            let g = &mesh.geometry[k];
            let mut out = [0.0; LOCAL_DOFS];
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let p = g.map(*xi);
                let phi = space.bases[k].eval(p, 0);
                let fw = f.value(p) * w * 2.0 * g.area;
                for (o, phi) in out.iter_mut().zip(phi) {
                    *o += fw * phi.value;
                }
            }
            out
        })
        .collect();
    let mut load = vec![0.0; space.dofs.n_total()];
    for (k, l) in local.iter().enumerate() {
        for (g, v) in space.local_to_global(k).iter().zip(l) {
            load[*g] += v;
        }
    }
    Ok(load)
}

impl GlobalForms {
    /// `ι² A_a + A_b` over all DoFs.
    pub fn combined(&self, iota: f64) -> CsMat<f64> {
        let scale = iota * iota;
        &self.a.map(|v| v * scale) + &self.b
    }

    /// Restricts `ι² A_a + A_b` and a full load vector to the free DoFs.
    pub fn system(&self, dofs: &DofMap, iota: f64, load: &[f64]) -> Result<AssembledSystem, AssemblyError> {
        check_iota(iota)?;
        let full = self.combined(iota);
        let n = dofs.n_free();
        let mut trip = TriMat::with_capacity((n, n), full.nnz());
        for (row, vec) in full.outer_iterator().enumerate() {
            let Some(r) = dofs.free_index(row) else { continue };
            for (col, &v) in vec.iter() {
                if let Some(c) = dofs.free_index(col) {
                    trip.add_triplet(r, c, v);
                }
            }
        }
        Ok(AssembledSystem {
            matrix: trip.to_csr(),
            load: dofs.gather(load),
            iota,
            eta: self.eta,
        })
    }
}

/// Assembles the reduced system for size parameter `iota`, penalty `eta` and load `f`.
pub fn assemble(
    space: &FeSpace,
    iota: f64,
    eta: f64,
    f: &dyn ScalarField,
    quad: &QuadratureConfig,
) -> Result<AssembledSystem, AssemblyError> {
    check_iota(iota)?;
    let forms = assemble_forms(space, eta, quad)?;
    let load = assemble_load(space, f, quad.load_degree)?;
    forms.system(&space.dofs, iota, &load)
}

/// `r_i = (f, φ_i) − ι² a_h(w, φ_i) − b_h(w, φ_i)` for a smooth `w` and every free `φ_i`.
///
/// `w` is assumed continuous with continuous derivatives across interior
/// edges, so its interior jumps are taken as exactly zero. For `iota > 0`
/// the field must supply fourth derivatives.
pub fn galerkin_residual(
    space: &FeSpace,
    w: &dyn SmoothField,
    f: &dyn ScalarField,
    iota: f64,
    eta: f64,
    volume_degree: usize,
    edge_points: usize,
) -> Result<Vec<f64>, AssemblyError> {
    check_eta(eta)?;
    check_iota(iota)?;
    let need_fourth = iota > 0.0;
    if need_fourth && w.fourth([0.5, 0.5]).is_none() {
        return Err(AssemblyError::MissingFourthDerivatives);
    }
    let rule = TriangleRule::with_degree(volume_degree)?;
    let edge_rule = EdgeRule::gauss(edge_points)?;
    let mesh = &space.mesh;
    let i2 = iota * iota;

    let volume: Vec<[f64; LOCAL_DOFS]> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|k| {
            let g = &mesh.geometry[k];
            let mut out = [0.0; LOCAL_DOFS];
            for (xi, wq) in rule.points.iter().zip(&rule.weights) {
                let p = g.map(*xi);
                let wq = wq * 2.0 * g.area;
                let jw = w.jet(p);
                let fv = f.value(p);
                let phi = space.bases[k].eval(p, 3);
                for (o, phi) in out.iter_mut().zip(&phi) {
                    *o += wq * (fv * phi.value - i2 * jw.third_dot(phi) - jw.hess_dot(phi));
                }
            }
            out
        })
        .collect();

    let edges: Vec<Vec<f64>> = mesh
        .edges
        .par_iter()
        .map(|e| {
            let traces = EdgeTraces::new(mesh, &space.bases, e, &edge_rule);
            let mut out = vec![0.0; traces.stacked_len()];
            for ((row, wq), &s) in traces.values.iter().zip(&traces.weights).zip(&edge_rule.points) {
                let p = e.point(mesh, s);
                let mut trace = EdgeTrace::from_jet(&w.jet(p), e.normal, e.tangent);
                if need_fourth {
                    trace = trace.with_fourth(w.fourth(p).expect("checked above"), e.normal);
                }
                let wj = if e.is_boundary() {
                    JumpAverage::boundary(trace)
                } else {
                    JumpAverage::continuous(trace)
                };
                let wq = wq * e.length;
                for (o, phi) in out.iter_mut().zip(row) {
                    *o -= wq
                        * (i2 * kernels::a_edge_density(&wj, phi, eta, e.length)
                            + kernels::b_edge_density(&wj, phi, eta, e.length));
                }
            }
            out
        })
        .collect();

    let mut full = vec![0.0; space.dofs.n_total()];
    for (k, v) in volume.iter().enumerate() {
        for (g, x) in space.local_to_global(k).iter().zip(v) {
            full[*g] += x;
        }
    }
    for (e, v) in edges.iter().enumerate() {
        for (g, x) in space.edge_dofs(e).iter().zip(v) {
            full[*g] += x;
        }
    }
    Ok(space.dofs.gather(&full))
}

impl AssembledSystem {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// `y = S x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        spmv(&self.matrix, x)
    }

    /// Writes the matrix in MatrixMarket coordinate format.
    pub fn write_matrix_market(&self, out: &mut impl Write) -> std::io::Result<()> {
        sprs::io::write_matrix_market_to_bufwrite(out, &self.matrix)
    }

    /// Writes the load vector, one entry per line.
    pub fn write_load(&self, out: &mut impl Write) -> std::io::Result<()> {
        for v in &self.load {
            writeln!(out, "{v:e}")?;
        }
        Ok(())
    }
}

/// Sparse matrix-vector product.
pub fn spmv(m: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.cols(), x.len());
    m.outer_iterator()
        .map(|row| row.iter().map(|(c, v)| v * x[c]).sum())
        .collect()
}
