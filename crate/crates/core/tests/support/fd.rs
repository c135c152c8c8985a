//! Finite-difference reference derivatives.

use gekp::mesh::Point;

/// Fornberg weights for the `m`-th derivative at 0 on the given offsets.
pub fn fornberg(m: usize, offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Centered stencil of accuracy order `accuracy` (even) for the `m`-th derivative.
pub fn centered(m: usize, accuracy: usize) -> Vec<(f64, f64)> {
    let r = (m.div_ceil(2) - 1 + accuracy / 2) as i64;
    let offsets: Vec<f64> = (-r..=r).map(|i| i as f64).collect();
    offsets.iter().copied().zip(fornberg(m, &offsets)).collect()
}

/// `∂x^a ∂y^b g(p)` from a tensor-product centered stencil with step `h`.
pub fn partial(g: &dyn Fn(Point) -> f64, a: usize, b: usize, p: Point, h: f64, accuracy: usize) -> f64 {
    let sx = if a == 0 { vec![(0.0, 1.0)] } else { centered(a, accuracy) };
    let sy = if b == 0 { vec![(0.0, 1.0)] } else { centered(b, accuracy) };
    let mut s = 0.0;
    for (ox, wx) in &sx {
        for (oy, wy) in &sy {
            s += wx * wy * g([p[0] + ox * h, p[1] + oy * h]);
        }
    }
    s / h.powi((a + b) as i32)
}

/// Max relative error of an analytic partial `∂x^a ∂y^b` against a centered
/// difference of the analytic partial one order below, with one level of
/// Richardson extrapolation. `field(a, b, p)` returns `∂x^a ∂y^b` at `p`.
///
/// Errors are relative to the largest derivative magnitude over `points`;
/// if the derivative vanishes everywhere the absolute error is returned.
pub fn fd_derivative_check(
    field: &dyn Fn(usize, usize, Point) -> f64,
    (a, b): (usize, usize),
    points: &[Point],
) -> f64 {
    assert!(a + b >= 1 && a + b <= 6);
    let h = match a + b {
        1..=3 => 1e-5,
        4 => 1e-4,
        _ => 1e-3,
    };
    let (lower, dir) = if a > 0 { ((a - 1, b), [1.0, 0.0]) } else { ((a, b - 1), [0.0, 1.0]) };
    let diff = |p: Point, h: f64| {
        let f = |s: f64| field(lower.0, lower.1, [p[0] + s * dir[0], p[1] + s * dir[1]]);
        (f(h) - f(-h)) / (2.0 * h)
    };
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &p in points {
        let exact = field(a, b, p);
        let rich = (4.0 * diff(p, 0.5 * h) - diff(p, h)) / 3.0;
        err = err.max((rich - exact).abs());
        scale = scale.max(exact.abs());
    }
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}
