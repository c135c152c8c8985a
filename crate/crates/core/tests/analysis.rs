mod support;

use gekp::analysis::{error_norms, oscillation, quasi_interpolate, rate, DiscreteFunction};
use gekp::assembly::{assemble, FeSpace};
use gekp::mesh::{DiagonalPattern, Mesh, Point};
use gekp::problems::{ManufacturedProblem, ScalarField, Separable, SinCubed};
use gekp::solver::{solve, SolverOptions};
use gekp::QuadratureConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(n: usize) -> FeSpace {
    FeSpace::new(Mesh::structured(n, DiagonalPattern::LowerLeft))
}

/// `Σ c_i sin(a_i x + b_i y + d_i)`.
struct Trig(Vec<[f64; 4]>);

impl Trig {
    fn random(rng: &mut impl Rng) -> Self {
        Trig((0..3).map(|_| std::array::from_fn(|_| rng.random_range(-3.0..3.0))).collect())
    }
}

impl ScalarField for Trig {
    fn value(&self, p: Point) -> f64 {
        self.0.iter().map(|[c, a, b, d]| c * (a * p[0] + b * p[1] + d).sin()).sum()
    }
}

fn solve_example(space: &FeSpace, p: &ManufacturedProblem, iota: f64) -> Vec<f64> {
    let sys = assemble(space, iota, 10.0, p.load.as_ref(), &QuadratureConfig::default()).unwrap();
    solve(&sys, &SolverOptions::default()).unwrap().solution
}

#[test]
fn quasi_interpolation_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = FeSpace::new(support::random_mesh(5, 5, 6));
    let quad = QuadratureConfig::default();
    for _ in 0..3 {
        let (u, v) = (Trig::random(&mut rng), Trig::random(&mut rng));
        let (alpha, beta) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let combo = |p: Point| alpha * u.value(p) + beta * v.value(p);
        let lhs = quasi_interpolate(&s, &combo, &quad);
        let (iu, iv) = (quasi_interpolate(&s, &u, &quad), quasi_interpolate(&s, &v, &quad));
        for ((l, a), b) in lhs.coefficients.iter().zip(&iu.coefficients).zip(&iv.coefficients) {
            assert!((l - (alpha * a + beta * b)).abs() < 1e-11);
        }
    }
}

#[test]
fn quasi_interpolation_is_identity_on_random_discrete_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = FeSpace::new(support::random_mesh(6, 5, 1));
    let free: Vec<f64> = (0..s.dofs.n_free()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let v = DiscreteFunction::from_free(&s, &free);
    let iv = quasi_interpolate(&s, &v, &QuadratureConfig::default());
    let err = support::max_abs(v.coefficients.iter().zip(&iv.coefficients).map(|(a, b)| a - b));
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn quasi_interpolant_vanishes_on_boundary_vertices() {
    let s = space(6);
    let iv = quasi_interpolate(&s, &gekp::problems::Values(&Separable(SinCubed)), &QuadratureConfig::default());
    for (v, &b) in s.mesh.boundary_vertices.iter().enumerate() {
        if b {
            let [gx, gy] = s.dofs.gradient(v);
            assert_eq!([iv.coefficients[s.dofs.value(v)], iv.coefficients[gx], iv.coefficients[gy]], [0.0; 3]);
        }
    }
}

#[test]
fn error_norms_are_quadrature_converged() {
    let s = space(8);
    let p = ManufacturedProblem::example1(1e-2);
    let x = solve_example(&s, &p, 1e-2);
    let wh = DiscreteFunction::from_free(&s, &x);
    let q12 = QuadratureConfig::default();
    let q16 = QuadratureConfig { error_degree: 16, ..q12 };
    let (a, b) = (error_norms(&wh, p.target().unwrap(), 1e-2, &q12), error_norms(&wh, p.target().unwrap(), 1e-2, &q16));
    for (x, y) in [
        (a.l2, b.l2),
        (a.h1, b.h1),
        (a.h2_broken, b.h2_broken),
        (a.h3_broken, b.h3_broken),
        (a.jump_n_1, b.jump_n_1),
        (a.jump_n_3, b.jump_n_3),
        (a.jump_nn_1, b.jump_nn_1),
        (a.norm_iota_h, b.norm_iota_h),
    ] {
        assert!((x - y).abs() < 1e-8 * y.abs(), "{x:e} vs {y:e}");
    }
}

#[test]
fn interior_jumps_of_the_solution_decrease() {
    let p = ManufacturedProblem::example1(1e-2);
    let mut prev: Option<(f64, f64, f64)> = None;
    for n in [4, 8, 16] {
        let s = space(n);
        let x = solve_example(&s, &p, 1e-2);
        let j = DiscreteFunction::from_free(&s, &x).interior_jumps(4);
        if let Some(q) = prev {
            assert!(j.0 < q.0 && j.1 < q.1 && j.2 < q.2, "n={n}: {j:?} after {q:?}");
        }
        prev = Some(j);
    }
}

/// `h_K⁴ ‖f − Π⁰f‖²_K ~ h⁴ · h² |K|`, so `Osc_h(f)` is `O(h³)` for smooth `f`,
/// comfortably inside the `O(h²)` the error estimates need.
#[test]
fn oscillation_of_a_smooth_load_is_third_order() {
    let f = ManufacturedProblem::example1(0.0).load;
    let osc: Vec<f64> = [4, 8, 16, 32]
        .iter()
        .map(|&n| oscillation(f.as_ref(), &Mesh::structured(n, DiagonalPattern::LowerLeft), 12))
        .collect();
    for pair in osc.windows(2) {
        let r = rate(pair[0], pair[1]).unwrap();
        assert!(r > 2.0, "{r}");
    }
    let last = rate(osc[2], osc[3]).unwrap();
    assert!((last - 3.0).abs() < 0.1, "{last}");
}

#[test]
fn boundary_layer_example_at_n16() {
    let p = ManufacturedProblem::example2();
    let quad = QuadratureConfig::default();
    let mut reports = Vec::new();
    for n in [16, 32] {
        let s = space(n);
        let x = solve_example(&s, &p, 1e-6);
        let wh = DiscreteFunction::from_free(&s, &x);
        reports.push(error_norms(&wh, p.target().unwrap(), 1e-6, &quad));
    }
    let (r16, r32) = (reports[0], reports[1]);
    let within = |v: f64, reference: f64| v / reference < 3.0 && reference / v < 3.0;
    assert!(within(r16.h1, 2.958e-3), "{}", r16.h1);
    assert!(within(r16.norm_iota_h, 2.098e-1), "{}", r16.norm_iota_h);
    let rh1 = rate(r16.h1, r32.h1).unwrap();
    let rnorm = rate(r16.norm_iota_h, r32.norm_iota_h).unwrap();
    assert!((rh1 - 3.10).abs() < 0.2, "{rh1}");
    assert!((rnorm - 2.07).abs() < 0.2, "{rnorm}");
}
