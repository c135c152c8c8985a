//! Element and edge kernels of the two bilinear forms.
//!
//! With `u` the trial and `v` the test function, the edge densities are
//!
//! ```text
//! a: −{∂nnn u}[∂nn v] − [∂nn u]{∂nnn v} − 2{∂nnt u}[∂nt v] − 2[∂nt u]{∂nnt v}
//!    + {∂nnΔu}[∂n v] + [∂n u]{∂nnΔv} + η/h [∂nn u][∂nn v] + η/h³ [∂n u][∂n v]
//! b: −{∂nn u}[∂n v] − [∂n u]{∂nn v} + η/h [∂n u][∂n v]
//! ```
//!
//! The `∂nnΔ` pair involves fourth derivatives and vanishes identically on
//! the cubic Hermite space; it only contributes when a form is applied to a
//! smooth field, where it keeps the form consistent with `−Δ³`.

use nalgebra::DMatrix;

use crate::element::{contract2, contract3, HermiteBasis, Jet, LocalMatrix, LOCAL_DOFS};
use crate::mesh::{Edge, Mesh, TriangleGeometry};
use crate::quadrature::{EdgeRule, TriangleRule};

/// Which bilinear form an edge matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Third-order form `a_h`.
    A,
    /// Second-order form `b_h`.
    B,
}

/// One-sided traces entering the edge terms, taken along `(n_e, t_e)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EdgeTrace {
    pub n: f64,
    pub nn: f64,
    pub nt: f64,
    pub nnn: f64,
    pub nnt: f64,
    /// `∂nn Δ`, zero for cubics.
    pub nn_lap: f64,
}

impl EdgeTrace {
    pub fn from_jet(jet: &Jet, n: [f64; 2], t: [f64; 2]) -> Self {
        Self {
            n: jet.grad[0] * n[0] + jet.grad[1] * n[1],
            nn: contract2(jet.hess, n, n),
            nt: contract2(jet.hess, n, t),
            nnn: contract3(jet.third, n, n, n),
            nnt: contract3(jet.third, n, n, t),
            nn_lap: 0.0,
        }
    }

    /// Adds `∂nn Δ` from fourth derivatives `(xxxx, xxxy, xxyy, xyyy, yyyy)`.
    pub fn with_fourth(mut self, d4: [f64; 5], n: [f64; 2]) -> Self {
        let lap_hess = [d4[0] + d4[2], d4[1] + d4[3], d4[2] + d4[4]];
        self.nn_lap = contract2(lap_hess, n, n);
        self
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            n: self.n * s,
            nn: self.nn * s,
            nt: self.nt * s,
            nnn: self.nnn * s,
            nnt: self.nnt * s,
            nn_lap: self.nn_lap * s,
        }
    }

    fn minus(self, o: Self) -> Self {
        Self {
            n: self.n - o.n,
            nn: self.nn - o.nn,
            nt: self.nt - o.nt,
            nnn: self.nnn - o.nnn,
            nnt: self.nnt - o.nnt,
            nn_lap: self.nn_lap - o.nn_lap,
        }
    }

    fn plus(self, o: Self) -> Self {
        self.minus(o.scaled(-1.0))
    }
}

/// Jump and average of the edge traces of one function at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JumpAverage {
    pub jump: EdgeTrace,
    pub average: EdgeTrace,
}

impl JumpAverage {
    /// Interior edge: jump `K⁺ − K⁻`, average the mean.
    pub fn interior(plus: EdgeTrace, minus: EdgeTrace) -> Self {
        Self {
            jump: plus.minus(minus),
            average: plus.plus(minus).scaled(0.5),
        }
    }

    /// Boundary edge: jump and average both equal the trace.
    pub fn boundary(trace: EdgeTrace) -> Self {
        Self {
            jump: trace,
            average: trace,
        }
    }

    /// A field that is smooth across the edge: zero jumps, average equal to the trace.
    pub fn continuous(trace: EdgeTrace) -> Self {
        Self {
            jump: EdgeTrace::default(),
            average: trace,
        }
    }
}

/// Pointwise edge integrand of `a_h(u, v)`.
pub fn a_edge_density(u: &JumpAverage, v: &JumpAverage, eta: f64, h: f64) -> f64 {
    let (ju, au, jv, av) = (&u.jump, &u.average, &v.jump, &v.average);
    -(au.nnn * jv.nn + ju.nn * av.nnn) - 2.0 * (au.nnt * jv.nt + ju.nt * av.nnt)
        + (au.nn_lap * jv.n + ju.n * av.nn_lap)
        + eta / h * ju.nn * jv.nn
        + eta / (h * h * h) * ju.n * jv.n
}

/// Pointwise edge integrand of `b_h(u, v)`.
pub fn b_edge_density(u: &JumpAverage, v: &JumpAverage, eta: f64, h: f64) -> f64 {
    let (ju, au, jv, av) = (&u.jump, &u.average, &v.jump, &v.average);
    -(au.nn * jv.n + ju.n * av.nn) + eta / h * ju.n * jv.n
}

/// Element matrices `(∇³φ_j, ∇³φ_i)_K` and `(∇²φ_j, ∇²φ_i)_K`.
pub fn local_volume_matrices(
    geometry: &TriangleGeometry,
    basis: &HermiteBasis,
    rule: &TriangleRule,
) -> (LocalMatrix, LocalMatrix) {
    let mut a = LocalMatrix::zeros();
    let mut b = LocalMatrix::zeros();
    let jac = 2.0 * geometry.area;
    for (xi, w) in rule.points.iter().zip(&rule.weights) {
        let phi = basis.eval(geometry.map(*xi), 3);
        let w = w * jac;
        for i in 0..LOCAL_DOFS {
            for j in 0..=i {
                a[(i, j)] += w * phi[i].third_dot(&phi[j]);
                b[(i, j)] += w * phi[i].hess_dot(&phi[j]);
            }
        }
    }
    for i in 0..LOCAL_DOFS {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
            b[(j, i)] = b[(i, j)];
        }
    }
    (a, b)
}

/// Third-derivative element matrix evaluated from the constant third derivatives, without quadrature.
pub fn local_third_order_matrix_exact(geometry: &TriangleGeometry, basis: &HermiteBasis) -> LocalMatrix {
    let phi = basis.eval(geometry.barycenter, 3);
    LocalMatrix::from_fn(|i, j| geometry.area * phi[i].third_dot(&phi[j]))
}

/// Edge traces of every stacked local shape function (K⁺ then K⁻) at every quadrature point.
pub struct EdgeTraces {
    /// `values[q][i]`: jump/average of stacked shape function `i` at point `q`.
    pub values: Vec<Vec<JumpAverage>>,
    pub weights: Vec<f64>,
    pub length: f64,
}

impl EdgeTraces {
    pub fn new(mesh: &Mesh, bases: &[HermiteBasis], edge: &Edge, rule: &EdgeRule) -> Self {
        let (n, t) = (edge.normal, edge.tangent);
        let stacked = if edge.minus.is_some() { 2 * LOCAL_DOFS } else { LOCAL_DOFS };
        let mut values = Vec::with_capacity(rule.len());
        for &s in &rule.points {
            let p = edge.point(mesh, s);
            let plus = bases[edge.plus].eval(p, 3);
            let mut row = Vec::with_capacity(stacked);
            match edge.minus {
                None => {
                    row.extend(plus.iter().map(|j| JumpAverage::boundary(EdgeTrace::from_jet(j, n, t))));
                }
                Some(m) => {
                    let zero = EdgeTrace::default();
                    row.extend(
                        plus.iter()
                            .map(|j| JumpAverage::interior(EdgeTrace::from_jet(j, n, t), zero)),
                    );
                    let minus = bases[m].eval(p, 3);
                    row.extend(
                        minus
                            .iter()
                            .map(|j| JumpAverage::interior(zero, EdgeTrace::from_jet(j, n, t))),
                    );
                }
            }
            values.push(row);
        }
        Self {
            values,
            weights: rule.weights.clone(),
            length: edge.length,
        }
    }

    pub fn stacked_len(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Matrix `M[i][j] = form(φ_j, φ_i)` restricted to this edge.
    pub fn matrix(&self, form: Form, eta: f64) -> DMatrix<f64> {
        let m = self.stacked_len();
        let h = self.length;
        let density = match form {
            Form::A => a_edge_density,
            Form::B => b_edge_density,
        };
        let mut out = DMatrix::zeros(m, m);
        for (row, w) in self.values.iter().zip(&self.weights) {
            let w = w * h;
            for i in 0..m {
                for j in 0..=i {
                    out[(i, j)] += w * density(&row[j], &row[i], eta, h);
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                out[(j, i)] = out[(i, j)];
            }
        }
        out
    }
}

/// Edge matrix of one form on the stacked local DoFs (20 on interior edges, 10 on boundary edges).
pub fn local_edge_matrix(
    mesh: &Mesh,
    bases: &[HermiteBasis],
    edge: &Edge,
    rule: &EdgeRule,
    eta: f64,
    form: Form,
) -> DMatrix<f64> {
    EdgeTraces::new(mesh, bases, edge, rule).matrix(form, eta)
}
