use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross, Polygon, Vec2};

/// An edge with its endpoints in increasing order and the cells sharing it.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshEdge {
    pub vertices: (usize, usize),
    pub cells: Vec<usize>,
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

/// Conforming mesh of convex polygonal cells, each listed counterclockwise.
#[derive(Clone, Debug)]
pub struct PolyMesh {
    vertices: Vec<Vec2>,
    cells: Vec<Vec<usize>>,
    edges: Vec<MeshEdge>,
    /// Local edge `i` of cell `c` (from `cells[c][i]` to `cells[c][i+1]`).
    cell_edges: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
}

/// JSON form `{"vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<Vec<usize>>,
}

impl PolyMesh {
    pub fn new(vertices: Vec<Vec2>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let nv = vertices.len();
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut directed: Vec<(usize, usize)> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if let Some(&index) = cell.iter().find(|&&i| i >= nv) {
                return Err(Error::InvalidMesh(format!("cell {c} uses vertex {index} of {nv}")));
            }
            cell_polygon(&vertices, cell).map_err(|e| Error::InvalidMesh(format!("cell {c}: {e}")))?;
            let k = cell.len();
            let mut local = Vec::with_capacity(k);
            for i in 0..k {
                let (p, q) = (cell[i], cell[(i + 1) % k]);
                let key = (p.min(q), p.max(q));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(MeshEdge {
                        vertices: key,
                        cells: Vec::new(),
                    });
                    directed.push((p, q));
                    edges.len() - 1
                });
                let edge = &mut edges[id];
                edge.cells.push(c);
                match edge.cells.len() {
                    1 => {}
                    2 if directed[id] == (q, p) => {}
                    2 => {
                        return Err(Error::InvalidMesh(format!(
                            "edge ({p}, {q}) has the same orientation in cells {} and {c}",
                            edge.cells[0]
                        )))
                    }
                    _ => return Err(Error::InvalidMesh(format!("edge ({p}, {q}) is shared by more than two cells"))),
                }
                local.push(id);
            }
            cell_edges.push(local);
        }

        let mut boundary_vertex = vec![false; nv];
        for edge in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[edge.vertices.0] = true;
            boundary_vertex[edge.vertices.1] = true;
        }
        let mesh = PolyMesh {
            vertices,
            cells,
            edges,
            cell_edges,
            boundary_vertex,
        };
        mesh.check_conformity()?;
        Ok(mesh)
    }

    /// A single-cell edge with a mesh vertex in its interior is a hanging
    /// node; so is any vertex no cell uses.
    fn check_conformity(&self) -> Result<()> {
        let mut used = vec![false; self.vertices.len()];
        for cell in &self.cells {
            for &v in cell {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} belongs to no cell")));
        }
        let boundary: Vec<&MeshEdge> = self.edges.iter().filter(|e| e.is_boundary()).collect();
        for edge in boundary {
            let (i, j) = edge.vertices;
            let (p, q) = (self.vertices[i], self.vertices[j]);
            let d = q - p;
            let len2 = d.norm_squared();
            for (k, v) in self.vertices.iter().enumerate() {
                if k == i || k == j || !self.boundary_vertex[k] {
                    continue;
                }
                let w = v - p;
                let t = w.dot(&d) / len2;
                if t > 1e-12 && t < 1.0 - 1e-12 && cross(&d, &w).abs() <= 1e-12 * len2 {
                    return Err(Error::InvalidMesh(format!("vertex {k} hangs on edge ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn from_file(file: &MeshFile) -> Result<Self> {
        Self::new(
            file.vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect(),
            file.cells.clone(),
        )
    }

    pub fn to_file(&self) -> MeshFile {
        MeshFile {
            vertices: self.vertices.iter().map(|v| [v.x, v.y]).collect(),
            cells: self.cells.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("mesh serializes")
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn cell_polygon(&self, c: usize) -> Result<Polygon> {
        cell_polygon(&self.vertices, &self.cells[c])
    }

    pub fn edge_midpoint(&self, e: usize) -> Vec2 {
        let (i, j) = self.edges[e].vertices;
        0.5 * (self.vertices[i] + self.vertices[j])
    }

    /// Largest cell diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.n_cells())
            .filter_map(|c| self.cell_polygon(c).ok())
            .map(|p| p.diameter())
            .fold(0.0, f64::max)
    }
}

fn cell_polygon(vertices: &[Vec2], cell: &[usize]) -> Result<Polygon> {
    Polygon::with_flat_vertices(cell.iter().map(|&i| vertices[i]).collect())
}

/// `[0,1]^2` split into `n x n` trapezoids. Interior vertex `(i, j)` is
/// shifted vertically by `(-1)^(i+j) offset / n`, so every cell has two
/// vertical sides of lengths `(1 -+ 2 offset) / n` (`(1 -+ offset) / n` in the
/// boundary rows) and neighbouring cells are mirror images.
pub fn trapezoid_mesh(n: usize, offset: f64) -> Result<PolyMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("mesh needs n >= 1".into()));
    }
    if !(0.0..0.5).contains(&offset) {
        return Err(Error::InvalidArgument(format!("offset {offset} not in [0, 0.5)")));
    }
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| i * (n + 1) + j;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..=n {
        for j in 0..=n {
            let shift = if (i + j) % 2 == 0 { offset * h } else { -offset * h };
            let y = if j == 0 || j == n { j as f64 * h } else { j as f64 * h + shift };
            vertices.push(Vec2::new(i as f64 * h, y));
        }
    }
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolyMesh::new(vertices, cells)
}

/// Uniform `n x n` square mesh of `[0,1]^2`.
pub fn square_mesh(n: usize) -> Result<PolyMesh> {
    trapezoid_mesh(n, 0.0)
}

/// `[0,1]^2` with two pentagons on the left half, each a square of side 1/2
/// with a flat vertex at the midpoint of its right side, and a 2 x 4 grid of
/// squares of side 1/4 on the right half.
pub fn mixed_mesh() -> PolyMesh {
    let mut vertices = vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 0.5), Vec2::new(0.0, 1.0)];
    // columns x = 0.5, 0.75, 1 with five rows each
    let grid = |i: usize, j: usize| 3 + 5 * i + j;
    for i in 0..3 {
        for j in 0..5 {
            vertices.push(Vec2::new(0.5 + 0.25 * i as f64, 0.25 * j as f64));
        }
    }
    let mut cells = vec![
        vec![0, grid(0, 0), grid(0, 1), grid(0, 2), 1],
        vec![1, grid(0, 2), grid(0, 3), grid(0, 4), 2],
    ];
    for i in 0..2 {
        for j in 0..4 {
            cells.push(vec![grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)]);
        }
    }
    PolyMesh::new(vertices, cells).expect("mixed mesh is conforming")
}
