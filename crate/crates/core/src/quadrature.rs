//! Gauss rules on the unit interval and on the reference triangle.
//!
//! Triangle rules are collapsed (Duffy) products of Gauss-Legendre rules, so
//! any degree is available with positive weights.

use serde::Serialize;
use thiserror::Error;

/// Highest supported polynomial exactness degree.
pub const MAX_DEGREE: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadratureError {
    #[error("unsupported triangle quadrature degree {0} (max {MAX_DEGREE})")]
    UnsupportedDegree(usize),
    #[error("edge rule needs between 1 and {max} points, got {got}", max = MAX_DEGREE)]
    UnsupportedPoints { got: usize },
}

/// Quadrature on the reference triangle `{ξ, η ≥ 0, ξ + η ≤ 1}`; weights sum to 1/2.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Quadrature on `[0, 1]`; weights sum to 1.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EdgeRule {
    pub fn gauss(points: usize) -> Result<Self, QuadratureError> {
        if points == 0 || points > MAX_DEGREE {
            return Err(QuadratureError::UnsupportedPoints { got: points });
        }
        let (x, w) = gauss_legendre(points);
        Ok(Self {
            points: x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|w| 0.5 * w).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Highest degree integrated exactly.
    pub fn degree(&self) -> usize {
        2 * self.points.len() - 1
    }
}

impl TriangleRule {
    /// Rule exact for polynomials of total degree `≤ degree`.
    pub fn with_degree(degree: usize) -> Result<Self, QuadratureError> {
        if degree > MAX_DEGREE {
            return Err(QuadratureError::UnsupportedDegree(degree));
        }
        // the collapsed direction carries an extra linear Jacobian factor
        let m = (degree + 3) / 2;
        let (x, w) = gauss_legendre(m);
        let mut points = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for i in 0..m {
            let u = 0.5 * (x[i] + 1.0);
            let wu = 0.5 * w[i];
            for j in 0..m {
                let v = 0.5 * (x[j] + 1.0);
                let wv = 0.5 * w[j];
                points.push([u, v * (1.0 - u)]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Ok(Self {
            points,
            weights,
            degree,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Quadrature choices for the different integrals of the method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureConfig {
    /// Degree for element stiffness integrals (integrands have degree ≤ 2).
    pub stiffness_degree: usize,
    /// Degree for load vectors and local projections.
    pub load_degree: usize,
    /// Degree for error norms and the oscillation term.
    pub error_degree: usize,
    /// Gauss points per edge.
    pub edge_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            stiffness_degree: 4,
            load_degree: 8,
            error_degree: 12,
            edge_points: 4,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
