//! BVH-backed spatial queries: distance to surface and inside/outside
//! classification by generalized winding number.

use super::TriangleMesh;
use crate::error::{GaspError, Result};
use crate::geom::{point_triangle_distance, solid_angle, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Inside,
    Outside,
    OnSurface,
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    fn empty() -> Aabb {
        Aabb {
            lo: Vec3 {
                x: f64::INFINITY,
                y: f64::INFINITY,
                z: f64::INFINITY,
            },
            hi: Vec3 {
                x: f64::NEG_INFINITY,
                y: f64::NEG_INFINITY,
                z: f64::NEG_INFINITY,
            },
        }
    }

    fn grow(&mut self, p: Vec3) {
        self.lo.x = self.lo.x.min(p.x);
        self.lo.y = self.lo.y.min(p.y);
        self.lo.z = self.lo.z.min(p.z);
        self.hi.x = self.hi.x.max(p.x);
        self.hi.y = self.hi.y.max(p.y);
        self.hi.z = self.hi.z.max(p.z);
    }

    fn dist_sq(&self, p: Vec3) -> f64 {
        let dx = (self.lo.x - p.x).max(0.0).max(p.x - self.hi.x);
        let dy = (self.lo.y - p.y).max(0.0).max(p.y - self.hi.y);
        let dz = (self.lo.z - p.z).max(0.0).max(p.z - self.hi.z);
        dx * dx + dy * dy + dz * dz
    }
}

struct Node {
    bounds: Aabb,
    /// Leaf: range into `order`. Internal: child indices.
    kind: NodeKind,
}

enum NodeKind {
    Leaf { start: usize, end: usize },
    Internal { left: usize, right: usize },
}

/// Bounding-volume hierarchy over triangles, immutable after construction.
pub struct SpatialIndex {
    mesh: TriangleMesh,
    nodes: Vec<Node>,
    order: Vec<u32>,
    closed: bool,
    oriented: bool,
}

const LEAF_SIZE: usize = 8;

impl SpatialIndex {
    pub fn build(mesh: TriangleMesh) -> SpatialIndex {
        let closed = mesh.is_closed();
        let oriented = mesh.is_consistently_oriented();
        let n = mesh.triangles.len();
        let centroids: Vec<Vec3> = (0..n)
            .map(|t| {
                let [a, b, c] = mesh.triangle_positions(t);
                (a + b + c) / 3.0
            })
            .collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::new();
        if n > 0 {
            build_node(&mesh, &centroids, &mut order, 0, n, &mut nodes);
        }
        SpatialIndex {
            mesh,
            nodes,
            order,
            closed,
            oriented,
        }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Exact unsigned distance from p to the nearest triangle.
    pub fn distance_to_surface(&self, p: Vec3) -> f64 {
        if self.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni];
            if node.bounds.dist_sq(p) >= best * best {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, end } => {
                    for &t in &self.order[start..end] {
                        let [a, b, c] = self.mesh.triangle_positions(t as usize);
                        best = best.min(point_triangle_distance(p, a, b, c));
                    }
                }
                NodeKind::Internal { left, right } => {
                    // visit the closer child first
                    let dl = self.nodes[left].bounds.dist_sq(p);
                    let dr = self.nodes[right].bounds.dist_sq(p);
                    if dl < dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best
    }

    /// Generalized winding number of p with respect to the mesh surface.
    pub fn winding_number(&self, p: Vec3) -> f64 {
        let mut total = 0.0;
        for t in 0..self.mesh.triangles.len() {
            let [a, b, c] = self.mesh.triangle_positions(t);
            total += solid_angle(p, a, b, c);
        }
        total / (4.0 * std::f64::consts::PI)
    }

    /// OnSurface within tolerance, else winding-number inside/outside test.
    pub fn classify_point(&self, p: Vec3, tolerance: f64) -> Result<Classification> {
        if self.distance_to_surface(p) <= tolerance {
            return Ok(Classification::OnSurface);
        }
        if !self.closed {
            return Err(GaspError::Topology(
                "inside/outside classification requires a closed mesh".into(),
            ));
        }
        if !self.oriented {
            return Err(GaspError::Topology(
                "inside/outside classification requires consistent triangle orientation".into(),
            ));
        }
        if self.winding_number(p) > 0.5 {
            Ok(Classification::Inside)
        } else {
            Ok(Classification::Outside)
        }
    }
}

fn build_node(
    mesh: &TriangleMesh,
    centroids: &[Vec3],
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let mut bounds = Aabb::empty();
    for &t in &order[start..end] {
        for p in mesh.triangle_positions(t as usize) {
            bounds.grow(p);
        }
    }
    let idx = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node {
            bounds,
            kind: NodeKind::Leaf { start, end },
        });
        return idx;
    }
    // split on the longest centroid axis at the median
    let mut cb = Aabb::empty();
    for &t in &order[start..end] {
        cb.grow(centroids[t as usize]);
    }
    let ext = cb.hi - cb.lo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = (start + end) / 2;
    order[start..end].sort_by(|&a, &b| {
        centroids[a as usize]
            .axis(axis)
            .partial_cmp(&centroids[b as usize].axis(axis))
            .unwrap()
            .then(a.cmp(&b))
    });
    nodes.push(Node {
        bounds,
        kind: NodeKind::Leaf { start, end }, // patched below
    });
    let left = build_node(mesh, centroids, order, start, mid, nodes);
    let right = build_node(mesh, centroids, order, mid, end, nodes);
    nodes[idx].kind = NodeKind::Internal { left, right };
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;
    use crate::mesh::{generate, Shape};

    fn sphere_index() -> SpatialIndex {
        SpatialIndex::build(generate(Shape::Sphere, 32).unwrap())
    }

    #[test]
    fn classify_sphere_points() {
        let idx = sphere_index();
        assert_eq!(
            idx.classify_point(vec3(0.0, 0.0, 0.0), 1e-6).unwrap(),
            Classification::Inside
        );
        assert_eq!(
            idx.classify_point(vec3(2.0, 0.0, 0.0), 1e-6).unwrap(),
            Classification::Outside
        );
        let v = idx.mesh().vertices[7];
        assert_eq!(
            idx.classify_point(v, 1e-6).unwrap(),
            Classification::OnSurface
        );
    }

    #[test]
    fn distance_matches_exhaustive_minimum() {
        let idx = sphere_index();
        let probes = [
            vec3(0.0, 0.0, 2.0),
            vec3(0.3, -0.2, 0.1),
            vec3(-1.5, 0.7, 0.4),
            vec3(0.9, 0.9, 0.9),
        ];
        for p in probes {
            let brute = (0..idx.mesh().triangles.len())
                .map(|t| {
                    let [a, b, c] = idx.mesh().triangle_positions(t);
                    point_triangle_distance(p, a, b, c)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((idx.distance_to_surface(p) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_above_sphere_is_about_one() {
        let idx = sphere_index();
        let d = idx.distance_to_surface(vec3(0.0, 0.0, 2.0));
        // faceting makes the mesh slightly smaller than the unit sphere
        assert!((d - 1.0).abs() < 0.02, "d = {d}");
    }

    #[test]
    fn distance_bounded_by_vertex_distance() {
        let idx = sphere_index();
        let p = vec3(0.2, 0.5, -0.3);
        let d = idx.distance_to_surface(p);
        for v in &idx.mesh().vertices {
            assert!(d <= p.dist(*v) + 1e-12);
        }
    }

    #[test]
    fn triangle_centroid_on_surface() {
        let idx = sphere_index();
        let [a, b, c] = idx.mesh().triangle_positions(11);
        let centroid = (a + b + c) / 3.0;
        assert!(idx.distance_to_surface(centroid) < 1e-12);
    }

    #[test]
    fn open_mesh_inside_unavailable() {
        let v = vec![vec3(0.0, 0.0, 0.0), vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0)];
        let m = crate::mesh::TriangleMesh::new(v, vec![[0, 1, 2]]).unwrap();
        let idx = SpatialIndex::build(m);
        assert!(idx.classify_point(vec3(5.0, 5.0, 5.0), 1e-6).is_err());
        assert_eq!(
            idx.classify_point(vec3(0.2, 0.2, 0.0), 1e-6).unwrap(),
            Classification::OnSurface
        );
    }

    #[test]
    fn winding_agrees_with_ray_parity() {
        // deterministic pseudo-random probes vs axis-ray parity voting
        let idx = sphere_index();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let p = vec3(rand() * 3.0 - 1.5, rand() * 3.0 - 1.5, rand() * 3.0 - 1.5);
            if idx.distance_to_surface(p) < 1e-3 {
                continue;
            }
            let inside_wn = idx.winding_number(p) > 0.5;
            let inside_parity = ray_parity(idx.mesh(), p);
            assert_eq!(inside_wn, inside_parity, "disagreement at {p:?}");
        }
    }

    // crossing-parity oracle along +x
    fn ray_parity(mesh: &TriangleMesh, p: Vec3) -> bool {
        let mut crossings = 0;
        for t in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangle_positions(t);
            if ray_hits_triangle_x(p, a, b, c) {
                crossings += 1;
            }
        }
        crossings % 2 == 1
    }

    fn ray_hits_triangle_x(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> bool {
        let dir = vec3(1.0, 0.0, 0.0);
        let e1 = b - a;
        let e2 = c - a;
        let h = dir.cross(e2);
        let det = e1.dot(h);
        if det.abs() < 1e-14 {
            return false;
        }
        let s = p - a;
        let u = s.dot(h) / det;
        if !(0.0..=1.0).contains(&u) {
            return false;
        }
        let q = s.cross(e1);
        let v = dir.dot(q) / det;
        if v < 0.0 || u + v > 1.0 {
            return false;
        }
        e2.dot(q) / det > 0.0
    }

    use crate::geom::point_triangle_distance;
}
