use crate::element::LOCAL_DOFS;
use crate::mesh::Mesh;

/// Global numbering of Hermite degrees of freedom.
///
/// Vertex `v` owns `3v` (value), `3v + 1` and `3v + 2` (gradient); triangle
/// `k` owns `3V + k` (barycenter value). All vertex DoFs on the boundary are
/// constrained to zero; the remaining DoFs are renumbered consecutively.
#[derive(Debug, Clone)]
pub struct DofMap {
    n_vertices: usize,
    n_triangles: usize,
    constrained: Vec<bool>,
    free_index: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let n_vertices = mesh.n_vertices();
        let n_triangles = mesh.n_triangles();
        let total = 3 * n_vertices + n_triangles;
        let mut constrained = vec![false; total];
        for (v, &on_boundary) in mesh.boundary_vertices.iter().enumerate() {
            if on_boundary {
                constrained[3 * v..3 * v + 3].fill(true);
            }
        }
        let mut free_index = vec![None; total];
        let mut free = Vec::with_capacity(total);
        for g in 0..total {
            if !constrained[g] {
                free_index[g] = Some(free.len());
                free.push(g);
            }
        }
        Self {
            n_vertices,
            n_triangles,
            constrained,
            free_index,
            free,
        }
    }

    pub fn value(&self, vertex: usize) -> usize {
        3 * vertex
    }

    pub fn gradient(&self, vertex: usize) -> [usize; 2] {
        [3 * vertex + 1, 3 * vertex + 2]
    }

    pub fn barycenter(&self, triangle: usize) -> usize {
        3 * self.n_vertices + triangle
    }

    /// Global indices of the local DoFs of triangle `k`, in local order.
    pub fn local_to_global(&self, mesh: &Mesh, k: usize) -> [usize; LOCAL_DOFS] {
        let [a, b, c] = mesh.triangles[k];
        [
            3 * a,
            3 * b,
            3 * c,
            3 * a + 1,
            3 * a + 2,
            3 * b + 1,
            3 * b + 2,
            3 * c + 1,
            3 * c + 2,
            self.barycenter(k),
        ]
    }

    pub fn n_total(&self) -> usize {
        3 * self.n_vertices + self.n_triangles
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    /// Global index of every free DoF, in system order.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Expands a vector over free DoFs to all DoFs, with zeros on constrained ones.
    pub fn scatter(&self, free: &[f64]) -> Vec<f64> {
        assert_eq!(free.len(), self.n_free());
        let mut full = vec![0.0; self.n_total()];
        for (&g, &x) in self.free.iter().zip(free) {
            full[g] = x;
        }
        full
    }

    /// Restricts a vector over all DoFs to the free ones.
    pub fn gather(&self, full: &[f64]) -> Vec<f64> {
        assert_eq!(full.len(), self.n_total());
        self.free.iter().map(|&g| full[g]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::DiagonalPattern;

    #[test]
    fn counts_match_vertex_and_triangle_formulae() {
        for n in [1, 2, 4, 8] {
            let mesh = Mesh::structured(n, DiagonalPattern::LowerLeft);
            let d = DofMap::new(&mesh);
            let interior = (n - 1) * (n - 1);
            assert_eq!(d.n_total(), 3 * (n + 1) * (n + 1) + 2 * n * n);
            assert_eq!(d.n_free(), 3 * interior + 2 * n * n);
        }
        let mesh = Mesh::structured(64, DiagonalPattern::LowerLeft);
        assert_eq!(DofMap::new(&mesh).n_free(), 20099);
    }

    #[test]
    fn approaches_five_per_vertex() {
        let mesh = Mesh::structured(64, DiagonalPattern::LowerLeft);
        let d = DofMap::new(&mesh);
        let ratio = d.n_total() as f64 / mesh.n_vertices() as f64;
        // 3 + 2n²/(n+1)², so the gap to 5 is below 4/n
        assert!((ratio - 5.0).abs() < 4.0 / 64.0, "{ratio}");
    }

    #[test]
    fn scatter_gather_round_trip() {
        let mesh = Mesh::structured(3, DiagonalPattern::LowerLeft);
        let d = DofMap::new(&mesh);
        let free: Vec<f64> = (0..d.n_free()).map(|i| i as f64 + 1.0).collect();
        let full = d.scatter(&free);
        for g in 0..d.n_total() {
            if d.is_constrained(g) {
                assert_eq!(full[g], 0.0);
            }
        }
        assert_eq!(d.gather(&full), free);
    }
}
