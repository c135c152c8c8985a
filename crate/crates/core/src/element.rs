//! Cubic Hermite triangle: shape functions, derivative jets and directional derivatives.
//!
//! Local degrees of freedom are ordered as
//! `[v(a0), v(a1), v(a2), ∂x v(a0), ∂y v(a0), ∂x v(a1), ∂y v(a1), ∂x v(a2), ∂y v(a2), v(ζ_K)]`
//! with `ζ_K` the barycenter. Shape functions are built per physical triangle
//! by inverting the DoF matrix of a scaled monomial basis, so gradient DoFs
//! need no reference-to-physical transformation.

use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::SMatrix;
use serde::Serialize;

use crate::mesh::{Point, TriangleGeometry};

/// Number of local degrees of freedom.
pub const LOCAL_DOFS: usize = 10;

pub type LocalMatrix = SMatrix<f64, LOCAL_DOFS, LOCAL_DOFS>;

/// Value and Cartesian derivatives through order three.
///
/// `hess` holds `(xx, xy, yy)`, `third` holds `(xxx, xxy, xyy, yyy)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
    pub third: [f64; 4],
}

impl Jet {
    /// `Σ_{|α|=2} (∂^α v)²`, the multi-index convention of the Sobolev seminorm.
    /// Unlike `hess_dot(self)` the mixed derivative is counted once.
    pub fn hess_norm2(&self) -> f64 {
        self.hess.iter().map(|d| d * d).sum()
    }

    /// `Σ_{|α|=3} (∂^α v)²`, each distinct third derivative counted once.
    pub fn third_norm2(&self) -> f64 {
        self.third.iter().map(|d| d * d).sum()
    }

    pub fn grad_norm2(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }

    /// Full contraction `∇²u : ∇²v`.
    pub fn hess_dot(&self, other: &Jet) -> f64 {
        let (a, b) = (self.hess, other.hess);
        a[0] * b[0] + 2.0 * a[1] * b[1] + a[2] * b[2]
    }

    /// Full contraction `∇³u : ∇³v`.
    pub fn third_dot(&self, other: &Jet) -> f64 {
        let (a, b) = (self.third, other.third);
        a[0] * b[0] + 3.0 * a[1] * b[1] + 3.0 * a[2] * b[2] + a[3] * b[3]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.value += rhs.value;
        for i in 0..2 {
            self.grad[i] += rhs.grad[i];
        }
        for i in 0..3 {
            self.hess[i] += rhs.hess[i];
        }
        for i in 0..4 {
            self.third[i] += rhs.third[i];
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + rhs * -1.0
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            grad: self.grad.map(|g| g * s),
            hess: self.hess.map(|h| h * s),
            third: self.third.map(|t| t * s),
        }
    }
}

/// Contraction of a symmetric 2-tensor `(xx, xy, yy)` with `u ⊗ v`.
pub fn contract2(h: [f64; 3], u: [f64; 2], v: [f64; 2]) -> f64 {
    h[0] * u[0] * v[0] + h[1] * (u[0] * v[1] + u[1] * v[0]) + h[2] * u[1] * v[1]
}

/// Contraction of a symmetric 3-tensor `(xxx, xxy, xyy, yyy)` with `u ⊗ v ⊗ w`.
pub fn contract3(t: [f64; 4], u: [f64; 2], v: [f64; 2], w: [f64; 2]) -> f64 {
    t[0] * u[0] * v[0] * w[0]
        + t[1] * (u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0])
        + t[2] * (u[0] * v[1] * w[1] + u[1] * v[0] * w[1] + u[1] * v[1] * w[0])
        + t[3] * u[1] * v[1] * w[1]
}

/// Derivatives along an orthonormal frame `(n, t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Directional {
    pub n: f64,
    pub t: f64,
    pub nn: f64,
    pub nt: f64,
    pub tt: f64,
    pub nnn: f64,
    pub nnt: f64,
    pub ntt: f64,
}

/// Contracts a jet with copies of `n` and `t`.
///
/// # Panics
///
/// Panics if `(n, t)` is not orthonormal to within `1e-10`.
pub fn directional_derivatives(jet: &Jet, n: [f64; 2], t: [f64; 2]) -> Directional {
    let unit = |v: [f64; 2]| (v[0] * v[0] + v[1] * v[1] - 1.0).abs() < 1e-10;
    assert!(
        unit(n) && unit(t) && (n[0] * t[0] + n[1] * t[1]).abs() < 1e-10,
        "directional derivatives need an orthonormal frame, got n={n:?} t={t:?}"
    );
    Directional {
        n: jet.grad[0] * n[0] + jet.grad[1] * n[1],
        t: jet.grad[0] * t[0] + jet.grad[1] * t[1],
        nn: contract2(jet.hess, n, n),
        nt: contract2(jet.hess, n, t),
        tt: contract2(jet.hess, t, t),
        nnn: contract3(jet.third, n, n, n),
        nnt: contract3(jet.third, n, n, t),
        ntt: contract3(jet.third, n, t, t),
    }
}

/// Jets of the ten scaled monomials `1, ξ, η, ξ², ξη, η², ξ³, ξ²η, ξη², η³`
/// with `ξ = (x - c_x)/s`, `η = (y - c_y)/s`, differentiated in `x, y`.
fn monomial_jets(p: Point, center: Point, scale: f64, max_order: usize) -> [Jet; LOCAL_DOFS] {
    let x = (p[0] - center[0]) / scale;
    let y = (p[1] - center[1]) / scale;
    let s1 = 1.0 / scale;
    let s2 = s1 * s1;
    let s3 = s2 * s1;
    let mut m = [Jet::default(); LOCAL_DOFS];
    m[0].value = 1.0;
    m[1].value = x;
    m[2].value = y;
    m[3].value = x * x;
    m[4].value = x * y;
    m[5].value = y * y;
    m[6].value = x * x * x;
    m[7].value = x * x * y;
    m[8].value = x * y * y;
    m[9].value = y * y * y;
    if max_order >= 1 {
        let g = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [2.0 * x, 0.0],
            [y, x],
            [0.0, 2.0 * y],
            [3.0 * x * x, 0.0],
            [2.0 * x * y, x * x],
            [y * y, 2.0 * x * y],
            [0.0, 3.0 * y * y],
        ];
        for (jet, g) in m.iter_mut().zip(g) {
            jet.grad = [g[0] * s1, g[1] * s1];
        }
    }
    if max_order >= 2 {
        let h = [
            [0.0; 3],
            [0.0; 3],
            [0.0; 3],
            [2.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 2.0],
            [6.0 * x, 0.0, 0.0],
            [2.0 * y, 2.0 * x, 0.0],
            [0.0, 2.0 * y, 2.0 * x],
            [0.0, 0.0, 6.0 * y],
        ];
        for (jet, h) in m.iter_mut().zip(h) {
            jet.hess = h.map(|v| v * s2);
        }
    }
    if max_order >= 3 {
        m[6].third = [6.0 * s3, 0.0, 0.0, 0.0];
        m[7].third = [0.0, 2.0 * s3, 0.0, 0.0];
        m[8].third = [0.0, 0.0, 2.0 * s3, 0.0];
        m[9].third = [0.0, 0.0, 0.0, 6.0 * s3];
    }
    m
}

/// The ten Hermite shape functions of one triangle.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    center: Point,
    scale: f64,
    /// Column `i` holds the monomial coefficients of shape function `i`.
    coefficients: LocalMatrix,
}

impl HermiteBasis {
    /// # Panics
    ///
    /// Panics if the triangle is degenerate.
    pub fn new(geometry: &TriangleGeometry) -> Self {
        Self::try_new(geometry).expect("Hermite DoF matrix is singular: degenerate triangle")
    }

    pub fn try_new(geometry: &TriangleGeometry) -> Option<Self> {
        let center = geometry.barycenter;
        let scale = geometry.diameter;
        let mut dof = LocalMatrix::zeros();
        for (a, &vertex) in geometry.vertices.iter().enumerate() {
            let m = monomial_jets(vertex, center, scale, 1);
            for k in 0..LOCAL_DOFS {
                dof[(a, k)] = m[k].value;
                dof[(3 + 2 * a, k)] = m[k].grad[0];
                dof[(4 + 2 * a, k)] = m[k].grad[1];
            }
        }
        let m = monomial_jets(center, center, scale, 0);
        for k in 0..LOCAL_DOFS {
            dof[(9, k)] = m[k].value;
        }
        let coefficients = dof.try_inverse()?;
        Some(Self {
            center,
            scale,
            coefficients,
        })
    }

    /// Jets of all shape functions at `p`, computed through derivative order `max_order ≤ 3`.
    pub fn eval(&self, p: Point, max_order: usize) -> [Jet; LOCAL_DOFS] {
        let m = monomial_jets(p, self.center, self.scale, max_order);
        let mut out = [Jet::default(); LOCAL_DOFS];
        for (i, phi) in out.iter_mut().enumerate() {
            for (k, mk) in m.iter().enumerate() {
                let c = self.coefficients[(k, i)];
                if c != 0.0 {
                    *phi += *mk * c;
                }
            }
        }
        out
    }

    /// Jet of `Σ coeffs[i] φ_i` at `p`.
    pub fn combine(&self, coeffs: &[f64; LOCAL_DOFS], p: Point, max_order: usize) -> Jet {
        let phi = self.eval(p, max_order);
        let mut jet = Jet::default();
        for (c, phi) in coeffs.iter().zip(phi) {
            jet += phi * *c;
        }
        jet
    }
}

/// Applies the ten local DoF functionals to a field given by its jets at the vertices and barycenter.
pub fn dof_values(vertex_jets: [Jet; 3], barycenter_value: f64) -> [f64; LOCAL_DOFS] {
    let mut d = [0.0; LOCAL_DOFS];
    for a in 0..3 {
        d[a] = vertex_jets[a].value;
        d[3 + 2 * a] = vertex_jets[a].grad[0];
        d[4 + 2 * a] = vertex_jets[a].grad[1];
    }
    d[9] = barycenter_value;
    d
}
