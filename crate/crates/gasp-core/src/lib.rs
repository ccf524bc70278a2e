//! Reeb-graph computation and arc embedding for scalar fields on triangle
//! meshes, plus a geometric-barycenter baseline and evaluation metrics.

pub mod decomp;
pub mod error;
pub mod export;
pub mod field;
pub mod gasp;
pub mod gb;
pub mod geom;
pub mod mesh;
pub mod metrics;
pub mod reeb;
pub(crate) mod uf;

pub use error::{GaspError, Result};
pub use field::{Axis, Direction, FieldSpec, ScalarField};
pub use geom::Vec3;
pub use mesh::TriangleMesh;
