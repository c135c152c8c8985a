//! Brute-force dense assembly of `a_h` and `b_h` on tiny meshes.
//!
//! Shape functions are global-coordinate monomial expansions obtained by
//! inverting the DoF matrix; every directional derivative is a full loop over
//! tensor indices; quadrature comes from the Golub-Welsch eigenvalue method.

use std::collections::BTreeMap;

use gekp::assembly::DofMap;
use gekp::mesh::{Mesh, Point};
use nalgebra::{DMatrix, SMatrix};

/// Exponents `(a, b)` of `x^a y^b`, total degree ≤ 3.
const MONOMIALS: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// Gauss-Legendre nodes and weights on `[0, 1]` from the Jacobi matrix eigenpairs.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k, k - 1)] = beta;
        j[(k - 1, k)] = beta;
    }
    let eig = j.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn falling(a: usize, p: usize) -> f64 {
    if p > a {
        return 0.0;
    }
    ((a - p + 1)..=a).map(|v| v as f64).product()
}

/// `∂x^p ∂y^q (x^a y^b)` at `x`.
fn monomial_derivative((a, b): (usize, usize), p: usize, q: usize, x: Point) -> f64 {
    let c = falling(a, p) * falling(b, q);
    if c == 0.0 {
        return 0.0;
    }
    c * x[0].powi((a - p) as i32) * x[1].powi((b - q) as i32)
}

/// Cubic on one triangle as monomial coefficients.
#[derive(Clone, Copy)]
pub struct Cubic(pub [f64; 10]);

impl Cubic {
    /// Partial derivative with `p` x-derivatives and `q` y-derivatives.
    pub fn partial(&self, p: usize, q: usize, x: Point) -> f64 {
        MONOMIALS.iter().zip(&self.0).map(|(&m, c)| c * monomial_derivative(m, p, q, x)).sum()
    }

    /// `Σ_{i1..ik} d1[i1]…dk[ik] ∂_{i1…ik} v`, every index combination visited.
    pub fn directional(&self, dirs: &[[f64; 2]], x: Point) -> f64 {
        let k = dirs.len();
        let mut s = 0.0;
        for combo in 0..(1usize << k) {
            let mut w = 1.0;
            let mut q = 0;
            for (j, d) in dirs.iter().enumerate() {
                let idx = (combo >> j) & 1;
                w *= d[idx];
                q += idx;
            }
            s += w * self.partial(k - q, q, x);
        }
        s
    }

    /// `∇^k u : ∇^k v` by explicit summation over all `2^k` index tuples.
    pub fn full_contraction(&self, other: &Cubic, k: usize, x: Point) -> f64 {
        let mut s = 0.0;
        for combo in 0..(1usize << k) {
            let q = combo.count_ones() as usize;
            s += self.partial(k - q, q, x) * other.partial(k - q, q, x);
        }
        s
    }
}

/// Local basis in oracle order `[v(a0), ∂x(a0), ∂y(a0), v(a1), …, v(ζ)]`.
pub fn oracle_basis(t: [Point; 3]) -> [Cubic; 10] {
    let zeta = [
        (t[0][0] + t[1][0] + t[2][0]) / 3.0,
        (t[0][1] + t[1][1] + t[2][1]) / 3.0,
    ];
    let mut d = SMatrix::<f64, 10, 10>::zeros();
    for (m, &mono) in MONOMIALS.iter().enumerate() {
        for (v, &a) in t.iter().enumerate() {
            d[(3 * v, m)] = monomial_derivative(mono, 0, 0, a);
            d[(3 * v + 1, m)] = monomial_derivative(mono, 1, 0, a);
            d[(3 * v + 2, m)] = monomial_derivative(mono, 0, 1, a);
        }
        d[(9, m)] = monomial_derivative(mono, 0, 0, zeta);
    }
    let c = d.try_inverse().expect("unisolvent DoFs");
    std::array::from_fn(|i| Cubic(std::array::from_fn(|m| c[(m, i)])))
}

/// Dense forms over all DoFs in oracle numbering: vertex values `0..V`,
/// x-gradients `V..2V`, y-gradients `2V..3V`, barycenters `3V..3V+T`.
pub struct DenseForm {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// Penalty parts of `a` and `b` (already scaled by `η`).
    pub a_penalty: DMatrix<f64>,
    pub b_penalty: DMatrix<f64>,
    /// `(term, edge)` for each contribution added, edge `None` for volume terms.
    pub trace: Vec<(&'static str, Option<[usize; 2]>)>,
    n_vertices: usize,
}

struct OracleEdge {
    vertices: [usize; 2],
    plus: usize,
    minus: Option<usize>,
    normal: [f64; 2],
}

fn oracle_edges(mesh: &Mesh) -> Vec<OracleEdge> {
    let mut by_key: BTreeMap<[usize; 2], Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (k, tri) in mesh.triangles.iter().enumerate() {
        for i in 0..3 {
            let (p, q) = (tri[i], tri[(i + 1) % 3]);
            by_key.entry([p.min(q), p.max(q)]).or_default().push((k, p, q));
        }
    }
    by_key
        .into_iter()
        .map(|(key, mut sides)| {
            sides.sort();
            let (plus, p, q) = sides[0];
            let (a, b) = (mesh.vertices[p], mesh.vertices[q]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            OracleEdge {
                vertices: key,
                plus,
                minus: sides.get(1).map(|s| s.0),
                // outward normal of a counterclockwise triangle: edge direction turned clockwise
                normal: [dy / len, -dx / len],
            }
        })
        .collect()
}

fn triangle_points(mesh: &Mesh, k: usize) -> [Point; 3] {
    let t = mesh.triangles[k];
    [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]]
}

/// Traces used by the edge terms: `(∂n, ∂nn, ∂nt, ∂nnn, ∂nnt)`.
fn traces(c: &Cubic, n: [f64; 2], t: [f64; 2], x: Point) -> [f64; 5] {
    [
        c.directional(&[n], x),
        c.directional(&[n, n], x),
        c.directional(&[n, t], x),
        c.directional(&[n, n, n], x),
        c.directional(&[n, n, t], x),
    ]
}

pub fn brute_force_forms(mesh: &Mesh, eta: f64) -> DenseForm {
    let nv = mesh.vertices.len();
    let ndof = 3 * nv + mesh.triangles.len();
    let global = |k: usize| -> [usize; 10] {
        let t = mesh.triangles[k];
        std::array::from_fn(|i| if i == 9 { 3 * nv + k } else { (i % 3) * nv + t[i / 3] })
    };
    let mut form = DenseForm {
        a: DMatrix::zeros(ndof, ndof),
        b: DMatrix::zeros(ndof, ndof),
        a_penalty: DMatrix::zeros(ndof, ndof),
        b_penalty: DMatrix::zeros(ndof, ndof),
        trace: Vec::new(),
        n_vertices: nv,
    };

    // Volume terms: Duffy map of the unit square, x = a0 + u (a1 − a0) + u v (a2 − a1).
    let gl8 = gauss_legendre(8);
    for k in 0..mesh.triangles.len() {
        let t = triangle_points(mesh, k);
        let basis = oracle_basis(t);
        let g = global(k);
        let e1 = [t[1][0] - t[0][0], t[1][1] - t[0][1]];
        let e2 = [t[2][0] - t[1][0], t[2][1] - t[1][1]];
        let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        for &(u, wu) in &gl8 {
            for &(v, wv) in &gl8 {
                let x = [t[0][0] + u * e1[0] + u * v * e2[0], t[0][1] + u * e1[1] + u * v * e2[1]];
                let w = wu * wv * u * det;
                for i in 0..10 {
                    for j in 0..10 {
                        form.a[(g[i], g[j])] += w * basis[i].full_contraction(&basis[j], 3, x);
                        form.b[(g[i], g[j])] += w * basis[i].full_contraction(&basis[j], 2, x);
                    }
                }
            }
        }
        form.trace.push(("volume", None));
    }

    let gl16 = gauss_legendre(16);
    for e in oracle_edges(mesh) {
        let n = e.normal;
        let tan = [-n[1], n[0]];
        let (p, q) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
        let h = (q[0] - p[0]).hypot(q[1] - p[1]);
        let mut sides = vec![(e.plus, 1.0)];
        if let Some(m) = e.minus {
            sides.push((m, -1.0));
        }
        let interior = sides.len() == 2;
        for &(s, ws) in &gl16 {
            let x = [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
            // (global index, jump, average) of every function living on either side
            let mut stacked: Vec<(usize, [f64; 5], [f64; 5])> = Vec::new();
            for &(k, sign) in &sides {
                let basis = oracle_basis(triangle_points(mesh, k));
                let g = global(k);
                for i in 0..10 {
                    let tr = traces(&basis[i], n, tan, x);
                    let jump = tr.map(|v| sign * v);
                    let avg = if interior { tr.map(|v| 0.5 * v) } else { tr };
                    stacked.push((g[i], jump, avg));
                }
            }
            let w = ws * h;
            for (gi, jv, av) in &stacked {
                for (gj, ju, au) in &stacked {
                    // trial u = column function, test v = row function
                    let (n_, nn, nt, nnn, nnt) = (0, 1, 2, 3, 4);
                    let a_cons = -au[nnn] * jv[nn] - ju[nn] * av[nnn] - 2.0 * au[nnt] * jv[nt] - 2.0 * ju[nt] * av[nnt];
                    let a_pen = eta / h * ju[nn] * jv[nn] + eta / h.powi(3) * ju[n_] * jv[n_];
                    let b_cons = -au[nn] * jv[n_] - ju[n_] * av[nn];
                    let b_pen = eta / h * ju[n_] * jv[n_];
                    form.a[(*gi, *gj)] += w * (a_cons + a_pen);
                    form.b[(*gi, *gj)] += w * (b_cons + b_pen);
                    form.a_penalty[(*gi, *gj)] += w * a_pen;
                    form.b_penalty[(*gi, *gj)] += w * b_pen;
                }
            }
        }
        form.trace.push(("consistency", Some(e.vertices)));
        form.trace.push(("penalty", Some(e.vertices)));
    }
    form
}

impl DenseForm {
    /// Production index of every oracle index.
    pub fn renumbering(&self, mesh: &Mesh, dofs: &DofMap) -> Vec<usize> {
        let nv = self.n_vertices;
        let mut out = vec![0; self.a.nrows()];
        for v in 0..nv {
            out[v] = dofs.value(v);
            let [gx, gy] = dofs.gradient(v);
            out[nv + v] = gx;
            out[2 * nv + v] = gy;
        }
        for k in 0..mesh.triangles.len() {
            out[3 * nv + k] = dofs.barycenter(k);
        }
        out
    }

    /// `m` re-indexed into production numbering.
    pub fn to_production(&self, m: &DMatrix<f64>, mesh: &Mesh, dofs: &DofMap) -> DMatrix<f64> {
        let map = self.renumbering(mesh, dofs);
        let mut out = DMatrix::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(map[i], map[j])] = m[(i, j)];
            }
        }
        out
    }

    /// `ι² a + b`.
    pub fn system(&self, iota: f64) -> DMatrix<f64> {
        &self.a * (iota * iota) + &self.b
    }
}
