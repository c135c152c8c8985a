//! Test-only reference implementations. Nothing here calls into the production
//! basis, quadrature or assembly code; only raw mesh coordinates and the
//! production DoF index lookups (for the final renumbering) are shared.

#![allow(dead_code)]

pub mod fd;
pub mod oracle;

use gekp::mesh::{Mesh, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Jittered `nx × ny` lattice on the unit square with a random diagonal per cell.
pub fn random_mesh(nx: usize, ny: usize, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (hx, hy) = (1.0 / (nx - 1) as f64, 1.0 / (ny - 1) as f64);
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let mut p = [i as f64 * hx, j as f64 * hy];
            if i > 0 && i + 1 < nx {
                p[0] += rng.random_range(-0.25..0.25) * hx;
            }
            if j > 0 && j + 1 < ny {
                p[1] += rng.random_range(-0.25..0.25) * hy;
            }
            vertices.push(p);
        }
    }
    let mut triangles = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v00 = j * nx + i;
            let (v10, v01, v11) = (v00 + 1, v00 + nx, v00 + nx + 1);
            if rng.random_bool(0.5) {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            }
        }
    }
    Mesh::from_triangles(vertices, triangles).expect("jittered lattice is a valid mesh")
}

/// Uniformly random point inside the triangle `t`.
pub fn point_in(rng: &mut impl Rng, t: [Point; 3]) -> Point {
    let (mut a, mut b): (f64, f64) = (rng.random(), rng.random());
    if a + b > 1.0 {
        (a, b) = (1.0 - a, 1.0 - b);
    }
    [
        t[0][0] + a * (t[1][0] - t[0][0]) + b * (t[2][0] - t[0][0]),
        t[0][1] + a * (t[1][1] - t[0][1]) + b * (t[2][1] - t[0][1]),
    ]
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
