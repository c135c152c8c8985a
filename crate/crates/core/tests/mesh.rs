mod support;

use gekp::mesh::{DiagonalPattern, Mesh};

/// Outward unit normal of the edge `p → q` of a counterclockwise triangle.
fn outward(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let l = dx.hypot(dy);
    [dy / l, -dx / l]
}

fn side_normal(mesh: &Mesh, k: usize, edge: [usize; 2]) -> [f64; 2] {
    let t = mesh.triangles[k];
    for i in 0..3 {
        let (a, b) = (t[i], t[(i + 1) % 3]);
        if [a.min(b), a.max(b)] == [edge[0].min(edge[1]), edge[0].max(edge[1])] {
            return outward(mesh.vertices[a], mesh.vertices[b]);
        }
    }
    panic!("edge {edge:?} not on triangle {k}");
}

#[test]
fn random_mesh_normals_agree_from_both_sides() {
    for seed in 0..5 {
        // 50 vertices
        let mesh = support::random_mesh(5, 10, seed);
        assert_eq!(mesh.n_vertices(), 50);
        for e in &mesh.edges {
            let plus = side_normal(&mesh, e.plus, e.vertices);
            assert!((plus[0] - e.normal[0]).abs() < 1e-14 && (plus[1] - e.normal[1]).abs() < 1e-14);
            assert!((e.normal[0].hypot(e.normal[1]) - 1.0).abs() < 1e-14);
            assert!((e.normal[0] * e.tangent[0] + e.normal[1] * e.tangent[1]).abs() < 1e-14);
            assert_eq!(e.tangent, [-e.normal[1], e.normal[0]]);
            match e.minus {
                Some(m) => {
                    assert!(e.plus < m);
                    let minus = side_normal(&mesh, m, e.vertices);
                    assert!((plus[0] + minus[0]).abs() < 1e-14 && (plus[1] + minus[1]).abs() < 1e-14);
                }
                None => {
                    // boundary normals point out of the unit square
                    let mid = e.point(&mesh, 0.5);
                    let out = [mid[0] + 1e-3 * e.normal[0], mid[1] + 1e-3 * e.normal[1]];
                    assert!(out.iter().any(|c| !(0.0..=1.0).contains(c)));
                }
            }
        }
        assert!((mesh.total_area() - 1.0).abs() < 1e-13);
        let (v, e, t) = (mesh.n_vertices(), mesh.n_edges(), mesh.n_triangles());
        assert_eq!(v + t, e + 1);
    }
}

#[test]
fn structured_areas_sum_to_one() {
    for n in [1, 3, 8, 32] {
        let mesh = Mesh::structured(n, DiagonalPattern::LowerLeft);
        assert!((mesh.total_area() - 1.0).abs() < 1e-13);
        assert_eq!(mesh.h(), 1.0 / n as f64);
        assert!((mesh.h_max - 2f64.sqrt() / n as f64).abs() < 1e-15);
    }
}

#[test]
fn text_file_round_trip_preserves_topology() {
    let mesh = support::random_mesh(4, 4, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.txt");
    let mut buf = Vec::new();
    mesh.write(&mut buf).unwrap();
    std::fs::write(&path, &buf).unwrap();
    let back = Mesh::read_file(&path).unwrap();
    assert_eq!(back.triangles, mesh.triangles);
    assert_eq!(back.vertices, mesh.vertices);
    assert_eq!(back.n_edges(), mesh.n_edges());
}
