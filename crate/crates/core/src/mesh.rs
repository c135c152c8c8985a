//! Triangle meshes with oriented edge topology.
//!
//! Triangles are stored counterclockwise. Every edge carries the triangle
//! `plus` (K⁺) whose outward normal defines the edge normal, and an optional
//! `minus` (K⁻) that is absent on the boundary. For interior edges K⁺ is the
//! incident triangle with the smaller index, so edge data (and everything
//! assembled from it) is reproducible.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use thiserror::Error;

/// A point in the plane.
pub type Point = [f64; 2];

/// Default bound on `h_K / ρ_K` accepted for imported meshes.
pub const DEFAULT_SHAPE_BOUND: f64 = 10.0;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        count: usize,
    },
    #[error("triangle {triangle} is clockwise or degenerate (signed area {area:e})")]
    Orientation { triangle: usize, area: f64 },
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed in the same direction by both incident triangles")]
    InconsistentOrientation(usize, usize),
    #[error("triangle {triangle} has shape ratio h/rho = {ratio:.3} above the bound {bound}")]
    ShapeRegularity {
        triangle: usize,
        ratio: f64,
        bound: f64,
    },
    #[error("mesh file, line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Diagonal pattern used to split the cells of a structured grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalPattern {
    /// Every cell split by the diagonal from its lower-left to its upper-right corner.
    #[default]
    LowerLeft,
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Endpoints in the counterclockwise order of `plus`.
    pub vertices: [usize; 2],
    pub plus: usize,
    pub minus: Option<usize>,
    /// Unit outward normal of `plus` on this edge.
    pub normal: [f64; 2],
    /// The normal rotated by 90° counterclockwise.
    pub tangent: [f64; 2],
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }

    /// Point on the edge at parameter `s ∈ [0, 1]`.
    pub fn point(&self, mesh: &Mesh, s: f64) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }
}

/// Cached geometry of one triangle.
#[derive(Debug, Clone)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    /// Longest edge length, `h_K`.
    pub diameter: f64,
    pub barycenter: Point,
    /// Columns are `p1 - p0` and `p2 - p0`; maps reference to physical coordinates.
    pub jacobian: [[f64; 2]; 2],
    /// Inscribed-circle radius `ρ_K`.
    pub inradius: f64,
}

impl TriangleGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let e1 = [p1[0] - p0[0], p1[1] - p0[1]];
        let e2 = [p2[0] - p0[0], p2[1] - p0[1]];
        let area = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0]);
        let lengths = [dist(p0, p1), dist(p1, p2), dist(p2, p0)];
        let diameter = lengths.iter().cloned().fold(0.0, f64::max);
        let perimeter: f64 = lengths.iter().sum();
        Self {
            vertices,
            area,
            diameter,
            barycenter: [
                (p0[0] + p1[0] + p2[0]) / 3.0,
                (p0[1] + p1[1] + p2[1]) / 3.0,
            ],
            jacobian: [[e1[0], e2[0]], [e1[1], e2[1]]],
            inradius: 2.0 * area.abs() / perimeter,
        }
    }

    /// Physical point for reference coordinates `(ξ, η)` on `{ξ, η ≥ 0, ξ + η ≤ 1}`.
    pub fn map(&self, xi: [f64; 2]) -> Point {
        let p0 = self.vertices[0];
        let j = &self.jacobian;
        [
            p0[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            p0[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn shape_ratio(&self) -> f64 {
        self.diameter / self.inradius
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    /// `triangle_edges[k][i]` is the edge from local vertex `i` to local vertex `i + 1`.
    pub triangle_edges: Vec<[usize; 3]>,
    pub geometry: Vec<TriangleGeometry>,
    pub boundary_vertices: Vec<bool>,
    pub h_max: f64,
    nominal_h: Option<f64>,
}

impl Mesh {
    /// Uniform `n × n` grid on the unit square, each cell split into two triangles.
    ///
    /// The reported mesh size [`Mesh::h`] is `1/n`; the true diameter is `√2/n`.
    pub fn structured(n: usize, pattern: DiagonalPattern) -> Self {
        assert!(n >= 1, "structured mesh needs n >= 1");
        let stride = n + 1;
        let mut vertices = Vec::with_capacity(stride * stride);
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * stride + i;
                let v10 = v00 + 1;
                let v01 = v00 + stride;
                let v11 = v01 + 1;
                match pattern {
                    DiagonalPattern::LowerLeft => {
                        triangles.push([v00, v10, v11]);
                        triangles.push([v00, v11, v01]);
                    }
                }
            }
        }
        let mut mesh = Self::from_triangles(vertices, triangles)
            .expect("structured mesh is always valid");
        mesh.nominal_h = Some(1.0 / n as f64);
        mesh
    }

    /// Builds a mesh from counterclockwise triangles and derives the edge topology.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mut geometry = Vec::with_capacity(triangles.len());
        for (k, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(MeshError::VertexOutOfRange {
                        triangle: k,
                        vertex: v,
                        count: vertices.len(),
                    });
                }
            }
            let g = TriangleGeometry::new([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
            if !(g.area > 0.0) {
                return Err(MeshError::Orientation {
                    triangle: k,
                    area: g.area,
                });
            }
            geometry.push(g);
        }

        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 3 / 2 + 1);
        let mut triangle_edges = vec![[0usize; 3]; triangles.len()];
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.capacity());
        for (k, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[i];
                let b = tri[(i + 1) % 3];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        let pa = vertices[a];
                        let pb = vertices[b];
                        let length = dist(pa, pb);
                        // outward normal of a counterclockwise triangle: edge direction rotated clockwise
                        let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
                        lookup.insert(key, edges.len());
                        triangle_edges[k][i] = edges.len();
                        edges.push(Edge {
                            vertices: [a, b],
                            plus: k,
                            minus: None,
                            normal,
                            tangent: [-normal[1], normal[0]],
                            length,
                        });
                    }
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.minus.is_some() {
                            return Err(MeshError::NonManifoldEdge(key.0, key.1));
                        }
                        if edge.vertices != [b, a] {
                            return Err(MeshError::InconsistentOrientation(key.0, key.1));
                        }
                        edge.minus = Some(k);
                        triangle_edges[k][i] = e;
                    }
                }
            }
        }

        let mut boundary_vertices = vec![false; vertices.len()];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertices[e.vertices[0]] = true;
            boundary_vertices[e.vertices[1]] = true;
        }
        let h_max = geometry.iter().map(|g| g.diameter).fold(0.0, f64::max);
        Ok(Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            geometry,
            boundary_vertices,
            h_max,
            nominal_h: None,
        })
    }

    /// Mesh size used to label results: `1/n` for structured meshes, `h_max` otherwise.
    pub fn h(&self) -> f64 {
        self.nominal_h.unwrap_or(self.h_max)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area).sum()
    }

    /// Largest `h_K / ρ_K` over all triangles, with the triangle attaining it.
    pub fn shape_regularity(&self) -> (usize, f64) {
        self.geometry
            .iter()
            .enumerate()
            .map(|(k, g)| (k, g.shape_ratio()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn check_shape_regularity(&self, bound: f64) -> Result<(), MeshError> {
        let (triangle, ratio) = self.shape_regularity();
        if ratio > bound {
            return Err(MeshError::ShapeRegularity {
                triangle,
                ratio,
                bound,
            });
        }
        Ok(())
    }

    /// Index of a triangle containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        const SLACK: f64 = 1e-12;
        self.geometry.iter().position(|g| {
            let [a, b, c] = g.vertices;
            let s = |u: Point, v: Point| (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0]);
            let scale = g.diameter * g.diameter * SLACK;
            s(a, b) >= -scale && s(b, c) >= -scale && s(c, a) >= -scale
        })
    }

    /// Reads the plain-text format: a header `V T`, then `V` lines `x y`, then `T` lines `i j k`.
    pub fn read<R: BufRead>(reader: R) -> Result<Self, MeshError> {
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

        let mut next = |what: &str| -> Result<(usize, String), MeshError> {
            match lines.next() {
                Some((n, Ok(l))) => Ok((n, l)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(MeshError::Parse {
                    line: 0,
                    message: format!("unexpected end of file, expected {what}"),
                }),
            }
        };

        let (line, header) = next("header")?;
        let counts = parse_fields::<usize>(&header, 2, line)?;
        let (nv, nt) = (counts[0], counts[1]);
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (line, text) = next("a vertex line")?;
            let xy = parse_fields::<f64>(&text, 2, line)?;
            vertices.push([xy[0], xy[1]]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, text) = next("a triangle line")?;
            let ijk = parse_fields::<usize>(&text, 3, line)?;
            triangles.push([ijk[0], ijk[1], ijk[2]]);
        }
        Self::from_triangles(vertices, triangles)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, MeshError> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file))
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.vertices.len(), self.triangles.len())?;
        for v in &self.vertices {
            writeln!(out, "{:e} {:e}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

fn parse_fields<T: std::str::FromStr>(text: &str, count: usize, line: usize) -> Result<Vec<T>, MeshError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != count {
        return Err(MeshError::Parse {
            line,
            message: format!("expected {count} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>().map_err(|_| MeshError::Parse {
                line,
                message: format!("cannot parse '{f}'"),
            })
        })
        .collect()
}
