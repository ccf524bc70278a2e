//! Indexed triangle mesh with edge adjacency.

mod generate;
mod io;
mod spatial;

pub use generate::{generate, Shape};
pub use io::{load_mesh, write_obj};
pub use spatial::{Classification, SpatialIndex};

use std::collections::HashMap;

use crate::error::{GaspError, Result};
use crate::geom::{triangle_area, Vec3};

/// Undirected edge key, smaller index first.
pub fn edge_key(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    /// Counterclockwise vertex-index triples.
    pub triangles: Vec<[u32; 3]>,
    /// Undirected edge -> incident triangle indices (1 on boundary, 2 interior).
    pub edge_tris: HashMap<(u32, u32), Vec<u32>>,
}

impl TriangleMesh {
    /// Validates indices, drops degenerate triangles, builds adjacency and
    /// rejects non-edge-manifold input.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<TriangleMesh> {
        let nv = vertices.len() as u32;
        let mut kept = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&v| v >= nv) {
                return Err(GaspError::Input(format!(
                    "triangle references vertex out of range: {:?}",
                    t
                )));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                continue;
            }
            let area = triangle_area(
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            if area <= 0.0 {
                continue;
            }
            kept.push(t);
        }
        let mut edge_tris: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (i, t) in kept.iter().enumerate() {
            for k in 0..3 {
                let e = edge_key(t[k], t[(k + 1) % 3]);
                let list = edge_tris.entry(e).or_default();
                list.push(i as u32);
                if list.len() > 2 {
                    return Err(GaspError::Input(format!(
                        "non-manifold edge ({}, {}) shared by more than 2 triangles",
                        e.0, e.1
                    )));
                }
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles: kept,
            edge_tris,
        })
    }

    pub fn triangle_positions(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.edge_tris.values().filter(|v| v.len() == 1).count()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edge_count() == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_tris.len() as i64 + self.triangles.len() as i64
    }

    pub fn genus(&self) -> Option<i64> {
        if !self.is_closed() {
            return None;
        }
        Some((2 - self.euler_characteristic()) / 2)
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3 {
            x: f64::INFINITY,
            y: f64::INFINITY,
            z: f64::INFINITY,
        };
        let mut hi = -lo;
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            lo.z = lo.z.min(v.z);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
            hi.z = hi.z.max(v.z);
        }
        (lo, hi)
    }

    pub fn diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    /// Uniform scale + translation so the largest axis extent maps exactly to
    /// [-1, 1] and the other axes are centered. Idempotent.
    pub fn normalize(&self) -> Result<TriangleMesh> {
        if self.vertices.is_empty() {
            return Err(GaspError::Input("cannot normalize an empty mesh".into()));
        }
        let (lo, hi) = self.bounding_box();
        let ext = hi - lo;
        let largest = ext.x.max(ext.y).max(ext.z);
        if largest <= 0.0 {
            return Err(GaspError::Input(
                "cannot normalize a zero-extent mesh (all vertices coincident)".into(),
            ));
        }
        let scale = 2.0 / largest;
        let center = (lo + hi) * 0.5;
        let vertices = self
            .vertices
            .iter()
            .map(|&v| (v - center) * scale)
            .collect();
        Ok(TriangleMesh {
            vertices,
            triangles: self.triangles.clone(),
            edge_tris: self.edge_tris.clone(),
        })
    }

    /// True when every interior edge is traversed once in each direction.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut directed: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                *directed.entry(e).or_default() += 1;
                if directed[&e] > 1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle_positions(t);
                triangle_area(a, b, c)
            })
            .sum()
    }
}

/// Welds vertices whose coordinates agree within `eps` (grid snapping).
pub fn weld_vertices(
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    eps: f64,
) -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let mut map: HashMap<(i64, i64, i64), u32> = HashMap::new();
    let mut remap = vec![0u32; vertices.len()];
    let mut out = Vec::with_capacity(vertices.len());
    let q = |c: f64| (c / eps).round() as i64;
    for (i, v) in vertices.iter().enumerate() {
        let key = (q(v.x), q(v.y), q(v.z));
        let id = *map.entry(key).or_insert_with(|| {
            out.push(*v);
            (out.len() - 1) as u32
        });
        remap[i] = id;
    }
    let tris = triangles
        .into_iter()
        .map(|t| [remap[t[0] as usize], remap[t[1] as usize], remap[t[2] as usize]])
        .collect();
    (out, tris)
}
