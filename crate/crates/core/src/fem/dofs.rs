use super::mesh::PolyMesh;
use crate::geometry::Vec2;

/// One degree of freedom per mesh vertex (indices `0..nv`) and one per edge
/// midpoint (indices `nv..nv + ne`).
#[derive(Clone, Debug)]
pub struct DofMap {
    n_vertices: usize,
    n_edges: usize,
    cell_dofs: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    nodes: Vec<Vec2>,
}

impl DofMap {
    pub fn new(mesh: &PolyMesh) -> Self {
        let nv = mesh.n_vertices();
        let ne = mesh.n_edges();
        let cell_dofs = (0..mesh.n_cells())
            .map(|c| {
                mesh.cells()[c]
                    .iter()
                    .copied()
                    .chain(mesh.cell_edges(c).iter().map(|&e| nv + e))
                    .collect()
            })
            .collect();
        let boundary = (0..nv)
            .map(|v| mesh.is_boundary_vertex(v))
            .chain(mesh.edges().iter().map(|e| e.is_boundary()))
            .collect();
        let nodes = mesh
            .vertices()
            .iter()
            .copied()
            .chain((0..ne).map(|e| mesh.edge_midpoint(e)))
            .collect();
        DofMap {
            n_vertices: nv,
            n_edges: ne,
            cell_dofs,
            boundary,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.n_vertices + self.n_edges
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertex_dof(&self, v: usize) -> usize {
        v
    }

    pub fn edge_dof(&self, e: usize) -> usize {
        self.n_vertices + e
    }

    /// Global indices of a cell's local basis: its vertices, then its edges,
    /// both in local order.
    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.cell_dofs[c]
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_dofs(&self) -> Vec<usize> {
        (0..self.len()).filter(|&d| self.boundary[d]).collect()
    }

    pub fn interior_dofs(&self) -> Vec<usize> {
        (0..self.len()).filter(|&d| !self.boundary[d]).collect()
    }

    /// Vertex or edge midpoint carrying the DOF.
    pub fn node(&self, dof: usize) -> Vec2 {
        self.nodes[dof]
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }
}
