//! Manufactured test problems with closed-form derivatives.
//!
//! Both shipped solutions are products `g(x) g(y)` of a one-dimensional
//! profile, so every partial derivative is a product of two profile
//! derivatives. The profiles are reduced to short trigonometric sums:
//! `sin³θ = (3 sin θ − sin 3θ)/4` and `sin²θ = (1 − cos 2θ)/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::element::Jet;
use crate::mesh::Point;

/// A field with pointwise values.
pub trait ScalarField: Send + Sync {
    fn value(&self, p: Point) -> f64;
}

impl<F> ScalarField for F
where
    F: Fn(Point) -> f64 + Send + Sync,
{
    fn value(&self, p: Point) -> f64 {
        self(p)
    }
}

/// A field with analytic derivatives through order three.
pub trait SmoothField: Send + Sync {
    fn jet(&self, p: Point) -> Jet;

    /// Fourth derivatives `(xxxx, xxxy, xxyy, xyyy, yyyy)`, if the field provides them.
    fn fourth(&self, _p: Point) -> Option<[f64; 5]> {
        None
    }
}

/// Adapter exposing the values of a [`SmoothField`] as a [`ScalarField`].
pub struct Values<'a>(pub &'a dyn SmoothField);

impl ScalarField for Values<'_> {
    fn value(&self, p: Point) -> f64 {
        self.0.jet(p).value
    }
}

/// One-dimensional profile with derivatives through order six.
pub trait Profile: Send + Sync {
    fn derivative(&self, order: usize, x: f64) -> f64;
}

/// `k`-th derivative of `sin` at `a`.
fn sin_derivative(k: usize, a: f64) -> f64 {
    match k % 4 {
        0 => a.sin(),
        1 => a.cos(),
        2 => -a.sin(),
        _ => -a.cos(),
    }
}

/// `k`-th derivative of `cos` at `a`.
fn cos_derivative(k: usize, a: f64) -> f64 {
    match k % 4 {
        0 => a.cos(),
        1 => -a.sin(),
        2 => -a.cos(),
        _ => a.sin(),
    }
}

/// `sin³(πx)`; triple zeros at `x = 0` and `x = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SinCubed;

impl Profile for SinCubed {
    fn derivative(&self, k: usize, x: f64) -> f64 {
        let s1 = PI.powi(k as i32) * sin_derivative(k, PI * x);
        let s3 = (3.0 * PI).powi(k as i32) * sin_derivative(k, 3.0 * PI * x);
        0.25 * (3.0 * s1 - s3)
    }
}

/// `sin²(πx)`; double zeros at `x = 0` and `x = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SinSquared;

impl Profile for SinSquared {
    fn derivative(&self, k: usize, x: f64) -> f64 {
        let c = (2.0 * PI).powi(k as i32) * cos_derivative(k, 2.0 * PI * x);
        if k == 0 {
            0.5 * (1.0 - c)
        } else {
            -0.5 * c
        }
    }
}

/// The product field `g(x) g(y)`.
#[derive(Debug, Clone, Copy)]
pub struct Separable<G>(pub G);

impl<G: Profile> Separable<G> {
    /// `∂x^a ∂y^b` at `p`.
    pub fn partial(&self, a: usize, b: usize, p: Point) -> f64 {
        self.0.derivative(a, p[0]) * self.0.derivative(b, p[1])
    }

    pub fn bilaplacian(&self, p: Point) -> f64 {
        self.partial(4, 0, p) + 2.0 * self.partial(2, 2, p) + self.partial(0, 4, p)
    }

    pub fn trilaplacian(&self, p: Point) -> f64 {
        self.partial(6, 0, p) + 3.0 * self.partial(4, 2, p) + 3.0 * self.partial(2, 4, p) + self.partial(0, 6, p)
    }
}

impl<G: Profile> SmoothField for Separable<G> {
    fn jet(&self, p: Point) -> Jet {
        let gx: [f64; 4] = std::array::from_fn(|k| self.0.derivative(k, p[0]));
        let gy: [f64; 4] = std::array::from_fn(|k| self.0.derivative(k, p[1]));
        Jet {
            value: gx[0] * gy[0],
            grad: [gx[1] * gy[0], gx[0] * gy[1]],
            hess: [gx[2] * gy[0], gx[1] * gy[1], gx[0] * gy[2]],
            third: [gx[3] * gy[0], gx[2] * gy[1], gx[1] * gy[2], gx[0] * gy[3]],
        }
    }

    fn fourth(&self, p: Point) -> Option<[f64; 5]> {
        Some(std::array::from_fn(|k| self.partial(4 - k, k, p)))
    }
}

/// `Δ²w − ι²Δ³w` for a separable `w`.
#[derive(Debug, Clone, Copy)]
pub struct PlateLoad<G> {
    pub solution: Separable<G>,
    pub iota: f64,
}

impl<G: Profile> ScalarField for PlateLoad<G> {
    fn value(&self, p: Point) -> f64 {
        let bilap = self.solution.bilaplacian(p);
        if self.iota == 0.0 {
            bilap
        } else {
            bilap - self.iota * self.iota * self.solution.trilaplacian(p)
        }
    }
}

/// A right-hand side together with the solution fields errors are measured against.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    /// Size parameter baked into the load, if the load depends on it.
    pub iota: Option<f64>,
    /// Exact solution of the sixth-order problem.
    pub exact: Option<Arc<dyn SmoothField>>,
    /// Solution of the reduced (`ι = 0`) problem, used when the exact solution is unknown.
    pub reference: Option<Arc<dyn SmoothField>>,
    pub load: Arc<dyn ScalarField>,
    pub notes: String,
}

impl fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("name", &self.name)
            .field("iota", &self.iota)
            .field("exact", &self.exact.is_some())
            .field("reference", &self.reference.is_some())
            .finish()
    }
}

impl ManufacturedProblem {
    /// Smooth solution `w = sin³(πx) sin³(πy)` with `f = Δ²w − ι²Δ³w`.
    ///
    /// # Panics
    ///
    /// Panics if `iota` is negative.
    pub fn example1(iota: f64) -> Self {
        assert!(iota >= 0.0, "size parameter must be non-negative");
        let w = Separable(SinCubed);
        Self {
            name: "example1".into(),
            iota: Some(iota),
            exact: Some(Arc::new(w)),
            reference: None,
            load: Arc::new(PlateLoad { solution: w, iota }),
            notes: "w = sin^3(pi x) sin^3(pi y), clamped with vanishing second normal derivative".into(),
        }
    }

    /// Boundary-layer problem: `f = Δ²w₀` for `w₀ = sin²(πx) sin²(πy)`.
    ///
    /// The load does not depend on `ι`; the exact solution of the sixth-order
    /// problem is unknown and errors are taken against `w₀`.
    pub fn example2() -> Self {
        let w0 = Separable(SinSquared);
        Self {
            name: "example2".into(),
            iota: None,
            exact: None,
            reference: Some(Arc::new(w0)),
            load: Arc::new(PlateLoad { solution: w0, iota: 0.0 }),
            notes: "w0 = sin^2(pi x) sin^2(pi y) solves the reduced problem; boundary layer as iota -> 0".into(),
        }
    }

    /// User-supplied load and optional exact solution.
    pub fn custom(name: impl Into<String>, load: Arc<dyn ScalarField>, exact: Option<Arc<dyn SmoothField>>) -> Self {
        Self {
            name: name.into(),
            iota: None,
            exact,
            reference: None,
            load,
            notes: String::new(),
        }
    }

    /// Unit load `f ≡ 1` with no known solution.
    pub fn uniform_load() -> Self {
        let mut p = Self::custom("uniform", Arc::new(|_: Point| 1.0), None);
        p.notes = "f = 1, solution unknown".into();
        p
    }

    /// The field errors are measured against: the exact solution if known, else the reference.
    pub fn target(&self) -> Option<&dyn SmoothField> {
        self.exact.as_deref().or(self.reference.as_deref())
    }
}
