//! Poisson problems on polygonal meshes with the serendipity basis.

mod dofs;
mod mesh;
mod space;
mod study;

pub use dofs::DofMap;
pub use mesh::{mixed_mesh, square_mesh, trapezoid_mesh, MeshEdge, MeshFile, PolyMesh};
pub use space::{DiscreteSolution, ErrorNorms, FemSpace, LinearSystem};
pub use study::{convergence_study, table_csv, table_markdown, Problem, StudyConfig, StudyRow};
