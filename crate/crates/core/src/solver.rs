//! Linear solvers for the assembled system.
//!
//! The direct path is an envelope (profile) `LDLᵀ` factorization after a
//! reverse Cuthill-McKee reordering; on the structured meshes used here the
//! envelope width grows like the number of DoFs per mesh row, which keeps the
//! largest study system (about 2·10⁴ unknowns) well under a second.

use serde::Serialize;
use sprs::CsMat;
use thiserror::Error;

use crate::assembly::{spmv, AssembledSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Direct,
    Cg,
}

impl SolveMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolveMethod::Direct => "direct",
            SolveMethod::Cg => "cg",
        }
    }
}

impl std::str::FromStr for SolveMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(SolveMethod::Direct),
            "cg" => Ok(SolveMethod::Cg),
            _ => Err(format!("unknown solver `{s}` (expected direct or cg)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub method: SolveMethod,
    /// Backward error target; `None` uses 1e-10 (direct) or 1e-9 (cg).
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    /// Direct path: reject non-positive pivots instead of factoring an indefinite matrix.
    pub require_spd: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolveMethod::Direct,
            tol: None,
            max_iterations: None,
            require_spd: true,
        }
    }
}

impl SolverOptions {
    pub fn cg() -> Self {
        Self {
            method: SolveMethod::Cg,
            ..Self::default()
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(match self.method {
            SolveMethod::Direct => 1e-10,
            SolveMethod::Cg => 1e-9,
        })
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("system is not SPD at this eta/iota: pivot {pivot:e} at row {row} (raise eta)")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("factorization broke down at row {row} (pivot {pivot:e})")]
    Breakdown { row: usize, pivot: f64 },
    #[error("conjugate gradients did not reach {tol:e} in {iterations} iterations (last residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    NoConvergence {
        iterations: usize,
        tol: f64,
        history: Vec<f64>,
    },
    #[error("backward error {residual:e} above tolerance {tol:e} after refinement")]
    Inaccurate { residual: f64, tol: f64 },
    #[error("matrix is {rows}x{cols} but the load has {len} entries")]
    Dimension { rows: usize, cols: usize, len: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Solution on the free DoFs.
    #[serde(skip)]
    pub solution: Vec<f64>,
    /// `‖Sx − F‖ / ‖F‖` (absolute when `F = 0`).
    pub relative_residual: f64,
    /// Normwise backward error `‖Sx − F‖∞ / (‖S‖∞ ‖x‖∞ + ‖F‖∞)`, the quantity checked against the tolerance.
    pub backward_error: f64,
    pub method: SolveMethod,
    /// CG iterations, or refinement steps for the direct path.
    pub iterations: usize,
    /// Direct path: whether every pivot was positive.
    pub positive_definite: bool,
    pub negative_pivots: usize,
    #[serde(skip)]
    pub residual_history: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(m: &CsMat<f64>, x: &[f64], b: &[f64]) -> Vec<f64> {
    spmv(m, x).iter().zip(b).map(|(ax, b)| b - ax).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Maximum absolute row sum.
fn matrix_inf_norm(m: &CsMat<f64>) -> f64 {
    m.outer_iterator()
        .map(|row| row.iter().map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Normwise backward error of `x` for `m x = b`.
///
/// The relative residual of a correctly rounded solution is bounded below by
/// roughly `ε ‖m‖ ‖x‖ / ‖b‖`, which for the `h⁻³` penalties exceeds 1e-10 on
/// fine meshes; the backward error has no such floor.
fn backward_error(r: &[f64], m_norm: f64, x: &[f64], b: &[f64]) -> f64 {
    let denom = m_norm * max_abs(x) + max_abs(b);
    if denom > 0.0 {
        max_abs(r) / denom
    } else {
        max_abs(r)
    }
}

/// Solves `S x = F` for an assembled system.
pub fn solve(system: &AssembledSystem, options: &SolverOptions) -> Result<SolveReport, SolverError> {
    solve_matrix(&system.matrix, &system.load, options)
}

/// Solves `m x = b` for a sparse symmetric `m`.
pub fn solve_matrix(m: &CsMat<f64>, b: &[f64], options: &SolverOptions) -> Result<SolveReport, SolverError> {
    if m.rows() != m.cols() || m.rows() != b.len() {
        return Err(SolverError::Dimension {
            rows: m.rows(),
            cols: m.cols(),
            len: b.len(),
        });
    }
    match options.method {
        SolveMethod::Direct => direct(m, b, options),
        SolveMethod::Cg => conjugate_gradient(m, b, options),
    }
}

fn direct(m: &CsMat<f64>, b: &[f64], options: &SolverOptions) -> Result<SolveReport, SolverError> {
    let tol = options.tolerance();
    let factor = EnvelopeLdlt::factor(m, options.require_spd)?;
    let m_norm = matrix_inf_norm(m);
    let mut x = factor.solve(b);
    let mut r = residual(m, &x, b);
    let mut history = vec![backward_error(&r, m_norm, &x, b)];
    let max_steps = options.max_iterations.unwrap_or(3);
    let mut steps = 0;
    while *history.last().unwrap() > tol && steps < max_steps {
        let dx = factor.solve(&r);
        for (x, d) in x.iter_mut().zip(&dx) {
            *x += d;
        }
        r = residual(m, &x, b);
        history.push(backward_error(&r, m_norm, &x, b));
        steps += 1;
    }
    let omega = *history.last().unwrap();
    if !(omega <= tol) {
        return Err(SolverError::Inaccurate { residual: omega, tol });
    }
    let bnorm = norm(b);
    Ok(SolveReport {
        relative_residual: norm(&r) / if bnorm > 0.0 { bnorm } else { 1.0 },
        backward_error: omega,
        solution: x,
        method: SolveMethod::Direct,
        iterations: steps,
        positive_definite: factor.negative_pivots == 0,
        negative_pivots: factor.negative_pivots,
        residual_history: history,
    })
}

fn conjugate_gradient(m: &CsMat<f64>, b: &[f64], options: &SolverOptions) -> Result<SolveReport, SolverError> {
    let n = b.len();
    let tol = options.tolerance();
    let max_it = options.max_iterations.unwrap_or(20 * n.max(1));
    let diag: Vec<f64> = (0..n)
        .map(|i| match m.get(i, i) {
            Some(&d) if d > 0.0 => 1.0 / d,
            _ => 1.0,
        })
        .collect();
    let m_norm = matrix_inf_norm(m);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut history = vec![backward_error(&r, m_norm, &x, b)];
    let mut it = 0;
    while history[history.len() - 1] > tol {
        if it == max_it {
            return Err(SolverError::NoConvergence {
                iterations: it,
                tol,
                history,
            });
        }
        let ap = spmv(m, &p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(SolverError::NotPositiveDefinite { row: it, pivot: pap });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // recompute the true residual periodically to avoid drift
        if (it + 1) % 50 == 0 {
            r = residual(m, &x, b);
        }
        for i in 0..n {
            z[i] = r[i] * diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        history.push(backward_error(&r, m_norm, &x, b));
        it += 1;
    }
    let r = residual(m, &x, b);
    let bnorm = norm(b);
    Ok(SolveReport {
        relative_residual: norm(&r) / if bnorm > 0.0 { bnorm } else { 1.0 },
        backward_error: backward_error(&r, m_norm, &x, b),
        solution: x,
        method: SolveMethod::Cg,
        iterations: it,
        positive_definite: true,
        negative_pivots: 0,
        residual_history: history,
    })
}

/// `LDLᵀ` factorization of a symmetric matrix stored by rows within its lower envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeLdlt {
    /// `order[new] = old`.
    order: Vec<usize>,
    /// First stored column of each permuted row.
    first: Vec<usize>,
    /// Offset of each row's data in `values`; row `i` spans `first[i]..i`.
    offset: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<f64>,
    pub negative_pivots: usize,
}

impl EnvelopeLdlt {
    /// Factors `m` after a reverse Cuthill-McKee reordering.
    ///
    /// With `require_spd` a non-positive pivot is an error; otherwise only a
    /// pivot that is zero relative to the matrix scale is.
    pub fn factor(m: &CsMat<f64>, require_spd: bool) -> Result<Self, SolverError> {
        let n = m.rows();
        let m = if m.is_csr() { m.clone() } else { m.to_csr() };
        let order: Vec<usize> = if n > 0 {
            // sparse sums drop exact zeros, so one-sided entries are possible
            let pattern = m.map(|_| 1.0);
            let pattern = &pattern + &pattern.transpose_view().to_csr();
            sprs::linalg::reverse_cuthill_mckee(pattern.view()).perm.vec()
        } else {
            Vec::new()
        };
        let mut inverse = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        let mut max_abs: f64 = 0.0;
        for (old, row) in m.outer_iterator().enumerate() {
            let i = inverse[old];
            for (c, v) in row.iter() {
                let j = inverse[c];
                if j < i {
                    first[i] = first[i].min(j);
                }
                max_abs = max_abs.max(v.abs());
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for i in 0..n {
            offset.push(total);
            total += i - first[i];
        }
        offset.push(total);
        let mut values = vec![0.0; total];
        let mut diag = vec![0.0; n];
        for (old, row) in m.outer_iterator().enumerate() {
            let i = inverse[old];
            for (c, &v) in row.iter() {
                let j = inverse[c];
                if j < i {
                    values[offset[i] + j - first[i]] += v;
                } else if j == i {
                    diag[i] += v;
                }
            }
        }

        let breakdown = 1e-14 * max_abs.max(f64::MIN_POSITIVE);
        let mut negative_pivots = 0;
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = values.split_at_mut(offset[i]);
            let row = &mut rest[..i - fi];
            // row[j - fi] := A_ij − Σ_k G_ik L_jk  (G = L D, unscaled)
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let lj = &done[offset[j] + k0 - fj..offset[j] + j - fj];
                let gi = &row[k0 - fi..j - fi];
                let s: f64 = gi.iter().zip(lj).map(|(a, b)| a * b).sum();
                row[j - fi] -= s;
            }
            let mut d = diag[i];
            for (k, g) in (fi..i).zip(row.iter_mut()) {
                let l = *g / diag[k];
                d -= l * *g;
                *g = l;
            }
            if require_spd && d <= 0.0 {
                return Err(SolverError::NotPositiveDefinite { row: order[i], pivot: d });
            }
            if d.abs() <= breakdown || !d.is_finite() {
                return Err(SolverError::Breakdown { row: order[i], pivot: d });
            }
            if d < 0.0 {
                negative_pivots += 1;
            }
            diag[i] = d;
        }
        Ok(Self {
            order,
            first,
            offset,
            values,
            diag,
            negative_pivots,
        })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Number of stored off-diagonal entries.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    /// Pivots of `D` in permuted order.
    pub fn pivots(&self) -> &[f64] {
        &self.diag
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y: Vec<f64> = self.order.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, y)| l * y).sum();
            y[i] -= s;
        }
        for (y, d) in y.iter_mut().zip(&self.diag) {
            *y /= d;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let yi = y[i];
            for (l, yk) in row.iter().zip(&mut y[fi..i]) {
                *yk -= l * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
