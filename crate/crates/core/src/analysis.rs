//! Discrete functions, error norms, data oscillation and quasi-interpolation.

use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{EdgeTrace, FeSpace};
use crate::element::{Jet, LOCAL_DOFS};
use crate::mesh::{Mesh, Point};
use crate::problems::{ScalarField, SmoothField};
use crate::quadrature::{EdgeRule, QuadratureConfig, TriangleRule};

/// A finite element function given by its coefficients over all DoFs.
#[derive(Debug, Clone)]
pub struct DiscreteFunction<'a> {
    pub space: &'a FeSpace,
    pub coefficients: Vec<f64>,
}

impl<'a> DiscreteFunction<'a> {
    pub fn zero(space: &'a FeSpace) -> Self {
        Self {
            space,
            coefficients: vec![0.0; space.dofs.n_total()],
        }
    }

    /// From a solution over free DoFs; constrained DoFs are zero.
    pub fn from_free(space: &'a FeSpace, free: &[f64]) -> Self {
        Self {
            space,
            coefficients: space.dofs.scatter(free),
        }
    }

    pub fn from_full(space: &'a FeSpace, coefficients: Vec<f64>) -> Self {
        assert_eq!(coefficients.len(), space.dofs.n_total());
        Self { space, coefficients }
    }

    /// Hermite interpolant: exact vertex values and gradients and barycenter values.
    /// Boundary vertex DoFs are set to zero so the result lies in `V_h`.
    pub fn interpolate(space: &'a FeSpace, field: &dyn SmoothField) -> Self {
        let mesh = &space.mesh;
        let mut c = vec![0.0; space.dofs.n_total()];
        for (v, p) in mesh.vertices.iter().enumerate() {
            if mesh.boundary_vertices[v] {
                continue;
            }
            let j = field.jet(*p);
            c[space.dofs.value(v)] = j.value;
            let [gx, gy] = space.dofs.gradient(v);
            c[gx] = j.grad[0];
            c[gy] = j.grad[1];
        }
        for (k, g) in mesh.geometry.iter().enumerate() {
            c[space.dofs.barycenter(k)] = field.jet(g.barycenter).value;
        }
        Self::from_full(space, c)
    }

    pub fn free_coefficients(&self) -> Vec<f64> {
        self.space.dofs.gather(&self.coefficients)
    }

    pub fn local_coefficients(&self, k: usize) -> [f64; LOCAL_DOFS] {
        self.space.local_to_global(k).map(|g| self.coefficients[g])
    }

    /// Derivatives through `max_order` of the restriction to triangle `k`, at `p`.
    pub fn jet(&self, k: usize, p: Point, max_order: usize) -> Jet {
        self.space.bases[k].combine(&self.local_coefficients(k), p, max_order)
    }

    /// Value at an arbitrary point of the mesh.
    pub fn eval(&self, p: Point) -> Option<f64> {
        self.space.mesh.locate(p).map(|k| self.jet(k, p, 0).value)
    }

    /// Interior-edge jump sums `(Σ h⁻¹‖[∂n]‖², Σ h⁻³‖[∂n]‖², Σ h⁻¹‖[∂nn]‖²)`.
    pub fn interior_jumps(&self, edge_points: usize) -> (f64, f64, f64) {
        let rule = EdgeRule::gauss(edge_points).expect("edge rule");
        let mesh = &self.space.mesh;
        let mut out = (0.0, 0.0, 0.0);
        for e in mesh.edges.iter().filter(|e| !e.is_boundary()) {
            let m = e.minus.unwrap();
            let (mut jn, mut jnn) = (0.0, 0.0);
            for (&s, w) in rule.points.iter().zip(&rule.weights) {
                let p = e.point(mesh, s);
                let a = EdgeTrace::from_jet(&self.jet(e.plus, p, 2), e.normal, e.tangent);
                let b = EdgeTrace::from_jet(&self.jet(m, p, 2), e.normal, e.tangent);
                jn += w * e.length * (a.n - b.n).powi(2);
                jnn += w * e.length * (a.nn - b.nn).powi(2);
            }
            out.0 += jn / e.length;
            out.1 += jn / e.length.powi(3);
            out.2 += jnn / e.length;
        }
        out
    }
}

/// Error measures of `e = w − w_h`. Seminorms are stored as norms, jump terms as sums of squares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h: f64,
    pub dofs: usize,
    pub iota: f64,
    pub eta: Option<f64>,
    pub l2: f64,
    pub h1: f64,
    /// Broken seminorms `(Σ_K Σ_{|α|=m} ‖∂^α e‖²_K)^{1/2}`, each multi-index counted once.
    pub h2_broken: f64,
    pub h3_broken: f64,
    /// `Σ_e h_e⁻¹ ‖[∂n e]‖²`
    pub jump_n_1: f64,
    /// `Σ_e h_e⁻³ ‖[∂n e]‖²`
    pub jump_n_3: f64,
    /// `Σ_e h_e⁻¹ ‖[∂nn e]‖²`
    pub jump_nn_1: f64,
    pub triple2: f64,
    pub triple3: f64,
    pub norm_iota_h: f64,
    /// `(⦀e⦀²_{2,h} + ι ⦀e⦀²_{3,h})^{1/2}`: the third-order part weighted by `ι` instead of `ι²`.
    pub norm_iota1_h: f64,
    pub osc: Option<f64>,
}

impl ErrorReport {
    /// Fills the composite norms from the stored seminorms and jump sums.
    fn compose(mut self) -> Self {
        let t2 = self.h2_broken.powi(2) + self.jump_n_1;
        let t3 = self.h3_broken.powi(2) + self.jump_nn_1 + self.jump_n_3;
        self.triple2 = t2.sqrt();
        self.triple3 = t3.sqrt();
        self.norm_iota_h = (t2 + self.iota * self.iota * t3).sqrt();
        self.norm_iota1_h = (t2 + self.iota * t3).sqrt();
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn with_oscillation(mut self, osc: f64) -> Self {
        self.osc = Some(osc);
        self
    }
}

/// Edge points used for error jump terms at a given volume error degree.
fn error_edge_points(quad: &QuadratureConfig) -> usize {
    quad.edge_points.max(quad.error_degree / 2 + 1)
}

fn norms_against(
    wh: &DiscreteFunction,
    target: &(dyn Fn(usize, Point) -> Jet + Sync),
    iota: f64,
    quad: &QuadratureConfig,
) -> ErrorReport {
    let space = wh.space;
    let mesh = &space.mesh;
    let rule = TriangleRule::with_degree(quad.error_degree).expect("error quadrature degree");
    let edge_rule = EdgeRule::gauss(error_edge_points(quad)).expect("error edge rule");

    let volume: Vec<[f64; 4]> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|k| {
            let g = &mesh.geometry[k];
            let mut acc = [0.0; 4];
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let p = g.map(*xi);
                let e = target(k, p) - wh.jet(k, p, 3);
                let w = w * 2.0 * g.area;
                acc[0] += w * e.value * e.value;
                acc[1] += w * e.grad_norm2();
                acc[2] += w * e.hess_norm2();
                acc[3] += w * e.third_norm2();
            }
            acc
        })
        .collect();

    let edges: Vec<[f64; 3]> = mesh
        .edges
        .par_iter()
        .map(|e| {
            let (mut jn, mut jnn) = (0.0, 0.0);
            for (&s, w) in edge_rule.points.iter().zip(&edge_rule.weights) {
                let p = e.point(mesh, s);
                let side = |k: usize| EdgeTrace::from_jet(&(target(k, p) - wh.jet(k, p, 2)), e.normal, e.tangent);
                let plus = side(e.plus);
                let (dn, dnn) = match e.minus {
                    Some(m) => {
                        let minus = side(m);
                        (plus.n - minus.n, plus.nn - minus.nn)
                    }
                    None => (plus.n, plus.nn),
                };
                jn += w * e.length * dn * dn;
                jnn += w * e.length * dnn * dnn;
            }
            [jn / e.length, jn / e.length.powi(3), jnn / e.length]
        })
        .collect();

    let mut v = [0.0; 4];
    for acc in &volume {
        for (v, a) in v.iter_mut().zip(acc) {
            *v += a;
        }
    }
    let mut j = [0.0; 3];
    for acc in &edges {
        for (j, a) in j.iter_mut().zip(acc) {
            *j += a;
        }
    }
    ErrorReport {
        h: mesh.h(),
        dofs: space.dofs.n_free(),
        iota,
        l2: v[0].sqrt(),
        h1: v[1].sqrt(),
        h2_broken: v[2].sqrt(),
        h3_broken: v[3].sqrt(),
        jump_n_1: j[0],
        jump_n_3: j[1],
        jump_nn_1: j[2],
        ..Default::default()
    }
    .compose()
}

/// Norms of `exact − w_h`. Jumps of the smooth `exact` cancel exactly, so on
/// interior edges only the jumps of `w_h` contribute; boundary edges see the full trace.
pub fn error_norms(wh: &DiscreteFunction, exact: &dyn SmoothField, iota: f64, quad: &QuadratureConfig) -> ErrorReport {
    norms_against(wh, &|_, p| exact.jet(p), iota, quad)
}

/// Norms of `other − w_h` for two functions on the same space.
pub fn difference_norms(
    wh: &DiscreteFunction,
    other: &DiscreteFunction,
    iota: f64,
    quad: &QuadratureConfig,
) -> ErrorReport {
    assert!(std::ptr::eq(wh.space, other.space), "functions live on different spaces");
    norms_against(wh, &|k, p| other.jet(k, p, 3), iota, quad)
}

/// `Osc_h(f) = (Σ_K h_K⁴ ‖f − Π⁰_K f‖²_K)^{1/2}` with `h_K` the diameter.
pub fn oscillation(f: &dyn ScalarField, mesh: &Mesh, degree: usize) -> f64 {
    let rule = TriangleRule::with_degree(degree).expect("oscillation quadrature degree");
    let local: Vec<f64> = mesh
        .geometry
        .par_iter()
        .map(|g| {
            // shifted by one sample so constants give exactly zero
            let values: Vec<f64> = rule.points.iter().map(|xi| f.value(g.map(*xi))).collect();
            let shift = values[0];
            let values: Vec<f64> = values.iter().map(|v| v - shift).collect();
            // weights sum to 1/2, so the mean is 2 Σ w f
            let mean = 2.0 * values.iter().zip(&rule.weights).map(|(v, w)| v * w).sum::<f64>();
            let dev: f64 = values.iter().zip(&rule.weights).map(|(v, w)| w * (v - mean).powi(2)).sum();
            g.diameter.powi(4) * dev * 2.0 * g.area
        })
        .collect();
    local.iter().sum::<f64>().sqrt()
}

/// Averaged elementwise `L²` projection onto `P₃`, mapped into `V_h`.
///
/// Interior vertex values and gradients are averaged over the incident
/// triangles' projections, boundary vertex DoFs are zero and barycenter DoFs
/// take the pointwise value `v(ζ_K)`.
pub fn quasi_interpolate<'a>(space: &'a FeSpace, v: &dyn ScalarField, quad: &QuadratureConfig) -> DiscreteFunction<'a> {
    quasi_interpolate_with(space, v, quad.load_degree.max(8))
}

/// [`quasi_interpolate`] with an explicit moment quadrature degree.
pub fn quasi_interpolate_with<'a>(space: &'a FeSpace, v: &dyn ScalarField, degree: usize) -> DiscreteFunction<'a> {
    let mesh = &space.mesh;
    let rule = TriangleRule::with_degree(degree).expect("projection quadrature degree");
    let projections: Vec<[f64; LOCAL_DOFS]> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|k| {
            let g = &mesh.geometry[k];
            let mut mass = SMatrix::<f64, LOCAL_DOFS, LOCAL_DOFS>::zeros();
            let mut rhs = SVector::<f64, LOCAL_DOFS>::zeros();
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                let p = g.map(*xi);
                let phi = space.bases[k].eval(p, 0);
                let w = w * 2.0 * g.area;
                let fv = v.value(p);
                for i in 0..LOCAL_DOFS {
                    rhs[i] += w * fv * phi[i].value;
                    for j in 0..LOCAL_DOFS {
                        mass[(i, j)] += w * phi[i].value * phi[j].value;
                    }
                }
            }
            let c = mass.cholesky().expect("local mass matrix is SPD").solve(&rhs);
            std::array::from_fn(|i| c[i])
        })
        .collect();

    let n_v = mesh.n_vertices();
    let mut sums = vec![[0.0; 3]; n_v];
    let mut counts = vec![0usize; n_v];
    for (k, tri) in mesh.triangles.iter().enumerate() {
        let c = &projections[k];
        for (a, &vert) in tri.iter().enumerate() {
            sums[vert][0] += c[a];
            sums[vert][1] += c[3 + 2 * a];
            sums[vert][2] += c[4 + 2 * a];
            counts[vert] += 1;
        }
    }
    let mut coeffs = vec![0.0; space.dofs.n_total()];
    for vert in 0..n_v {
        if mesh.boundary_vertices[vert] || counts[vert] == 0 {
            continue;
        }
        let n = counts[vert] as f64;
        let [gx, gy] = space.dofs.gradient(vert);
        coeffs[space.dofs.value(vert)] = sums[vert][0] / n;
        coeffs[gx] = sums[vert][1] / n;
        coeffs[gy] = sums[vert][2] / n;
    }
    for (k, g) in mesh.geometry.iter().enumerate() {
        coeffs[space.dofs.barycenter(k)] = v.value(g.barycenter);
    }
    DiscreteFunction::from_full(space, coeffs)
}

/// `log₂(coarse / fine)`; `None` unless both errors are positive and finite.
pub fn rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0 && coarse.is_finite() && fine.is_finite()).then(|| (coarse / fine).log2())
}

impl ScalarField for DiscreteFunction<'_> {
    /// Pointwise value; zero outside the mesh.
    fn value(&self, p: Point) -> f64 {
        self.eval(p).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DiagonalPattern;
    use crate::problems::{Separable, SinCubed};

    fn space(n: usize) -> FeSpace {
        FeSpace::new(Mesh::structured(n, DiagonalPattern::LowerLeft))
    }

    #[test]
    fn rate_examples() {
        assert!((rate(2.098e-1, 4.997e-2).unwrap() - 2.07).abs() < 0.005);
        assert_eq!(rate(0.3, 0.3), Some(0.0));
        let eps = 1.7e-9;
        assert!((rate(8.0 * eps, eps).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(rate(0.0, 1.0), None);
        assert_eq!(rate(1.0, -1.0), None);
    }

    #[test]
    fn self_difference_is_zero() {
        let s = space(3);
        let w = DiscreteFunction::interpolate(&s, &Separable(SinCubed));
        let r = difference_norms(&w, &w, 1.0, &QuadratureConfig::default());
        for v in [r.l2, r.h1, r.h2_broken, r.h3_broken, r.jump_n_1, r.jump_n_3, r.jump_nn_1, r.norm_iota_h] {
            assert!(v.abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn composite_identities() {
        let s = space(4);
        let w = DiscreteFunction::interpolate(&s, &Separable(SinCubed));
        let r = error_norms(&w, &Separable(SinCubed), 0.3, &QuadratureConfig::default());
        let t2 = r.h2_broken.powi(2) + r.jump_n_1;
        let t3 = r.h3_broken.powi(2) + r.jump_nn_1 + r.jump_n_3;
        assert!((r.triple2.powi(2) - t2).abs() <= 4.0 * f64::EPSILON * t2);
        assert!((r.triple3.powi(2) - t3).abs() <= 4.0 * f64::EPSILON * t3);
        let expected = (r.triple2.powi(2) + 0.09 * r.triple3.powi(2)).sqrt();
        assert!((r.norm_iota_h - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn oscillation_of_constants_and_linear() {
        let mesh = Mesh::structured(3, DiagonalPattern::LowerLeft);
        assert_eq!(oscillation(&|_: Point| 2.5, &mesh, 8), 0.0);
        let reference = Mesh::from_triangles(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        let osc = oscillation(&|p: Point| p[0], &reference, 4);
        assert!((osc - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn quasi_interpolation_reproduces_v_h() {
        let s = space(3);
        let w = DiscreteFunction::interpolate(&s, &Separable(SinCubed));
        let iw = quasi_interpolate(&s, &w, &QuadratureConfig::default());
        for (a, b) in w.coefficients.iter().zip(&iw.coefficients) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
