//! Scalar fields on mesh vertices: axis height functions and edge-graph
//! geodesic distance, with deterministic tie-breaking.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{GaspError, Result};
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Top,
    Bottom,
    Left,
    Right,
    Back,
    Front,
}

impl Direction {
    /// Signed axis the extreme source vertex is taken along.
    pub fn vector(self) -> Vec3 {
        match self {
            Direction::Top => Vec3 { x: 0.0, y: 0.0, z: 1.0 },
            Direction::Bottom => Vec3 { x: 0.0, y: 0.0, z: -1.0 },
            Direction::Right => Vec3 { x: 1.0, y: 0.0, z: 0.0 },
            Direction::Left => Vec3 { x: -1.0, y: 0.0, z: 0.0 },
            Direction::Front => Vec3 { x: 0.0, y: 1.0, z: 0.0 },
            Direction::Back => Vec3 { x: 0.0, y: -1.0, z: 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    Height(Axis),
    Geodesic(Direction),
}

impl FieldSpec {
    pub fn is_height(self) -> Option<Axis> {
        match self {
            FieldSpec::Height(a) => Some(a),
            FieldSpec::Geodesic(_) => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FieldSpec::Height(Axis::X) => "x",
            FieldSpec::Height(Axis::Y) => "y",
            FieldSpec::Height(Axis::Z) => "z",
            FieldSpec::Geodesic(Direction::Top) => "geo:top",
            FieldSpec::Geodesic(Direction::Bottom) => "geo:bottom",
            FieldSpec::Geodesic(Direction::Left) => "geo:left",
            FieldSpec::Geodesic(Direction::Right) => "geo:right",
            FieldSpec::Geodesic(Direction::Back) => "geo:back",
            FieldSpec::Geodesic(Direction::Front) => "geo:front",
        }
    }
}

impl std::str::FromStr for FieldSpec {
    type Err = GaspError;
    fn from_str(s: &str) -> Result<FieldSpec> {
        match s {
            "x" => Ok(FieldSpec::Height(Axis::X)),
            "y" => Ok(FieldSpec::Height(Axis::Y)),
            "z" => Ok(FieldSpec::Height(Axis::Z)),
            "geo:top" => Ok(FieldSpec::Geodesic(Direction::Top)),
            "geo:bottom" => Ok(FieldSpec::Geodesic(Direction::Bottom)),
            "geo:left" => Ok(FieldSpec::Geodesic(Direction::Left)),
            "geo:right" => Ok(FieldSpec::Geodesic(Direction::Right)),
            "geo:back" => Ok(FieldSpec::Geodesic(Direction::Back)),
            "geo:front" => Ok(FieldSpec::Geodesic(Direction::Front)),
            other => Err(GaspError::Input(format!(
                "unknown field spec '{other}' (expected x|y|z|geo:top|geo:bottom|geo:left|geo:right|geo:back|geo:front)"
            ))),
        }
    }
}

/// Per-vertex function values with a strict total order by (value, index).
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn value(&self, v: u32) -> f64 {
        self.values[v as usize]
    }

    /// Strict (value, index) comparison; never Equal for distinct vertices.
    pub fn cmp_vertices(&self, u: u32, v: u32) -> Ordering {
        self.values[u as usize]
            .partial_cmp(&self.values[v as usize])
            .unwrap()
            .then(u.cmp(&v))
    }

    /// Vertex counts as Below an isovalue iff (f, index) < (iso, +inf),
    /// i.e. f <= iso.
    pub fn below(&self, v: u32, iso: f64) -> bool {
        self.values[v as usize] <= iso
    }

    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in &self.values {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }

    /// Gives numerically equal values distinct offsets of i * delta
    /// (i = rank among ties by index, delta = 1e-12 * range) so every vertex
    /// value is distinct. Preserves the (value, index) total order.
    pub fn perturb_distinct(&self) -> ScalarField {
        let (lo, hi) = self.range();
        // fall back to value magnitude when the field is flat, so the offsets
        // stay representable next to the values themselves
        let scale = if hi > lo { hi - lo } else { hi.abs().max(1.0) };
        let delta = 1e-12 * scale;
        let mut order: Vec<u32> = (0..self.values.len() as u32).collect();
        order.sort_by(|&a, &b| self.cmp_vertices(a, b));
        let mut values = self.values.clone();
        let mut k = 0;
        while k < order.len() {
            let mut run = k + 1;
            while run < order.len()
                && self.values[order[run] as usize] == self.values[order[k] as usize]
            {
                run += 1;
            }
            for (rank, &v) in order[k..run].iter().enumerate() {
                values[v as usize] += rank as f64 * delta;
            }
            k = run;
        }
        ScalarField { values }
    }

    pub fn all_distinct(&self) -> bool {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.windows(2).all(|w| w[0] < w[1])
    }
}

pub fn height_field(mesh: &TriangleMesh, axis: Axis) -> ScalarField {
    let i = axis.index();
    ScalarField {
        values: mesh.vertices.iter().map(|v| v.axis(i)).collect(),
    }
}

/// Edge-graph Dijkstra distance from the extreme vertex along `direction`
/// (lowest index wins ties for the source).
pub fn geodesic_field(mesh: &TriangleMesh, direction: Direction) -> Result<ScalarField> {
    let dir = direction.vector();
    let source = (0..mesh.vertices.len() as u32)
        .max_by(|&a, &b| {
            mesh.vertices[a as usize]
                .dot(dir)
                .partial_cmp(&mesh.vertices[b as usize].dot(dir))
                .unwrap()
                .then(b.cmp(&a)) // prefer the lower index on ties
        })
        .ok_or_else(|| GaspError::Input("empty mesh".into()))?;
    let values = dijkstra_all(mesh, source);
    let unreached: Vec<usize> = component_sizes(&values);
    if !unreached.is_empty() {
        return Err(GaspError::Input(format!(
            "mesh is edge-disconnected; unreached component sizes: {:?}",
            unreached
        )));
    }
    Ok(ScalarField { values })
}

fn dijkstra_all(mesh: &TriangleMesh, source: u32) -> Vec<f64> {
    let n = mesh.vertices.len();
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (&(a, b), _) in &mesh.edge_tris {
        let w = mesh.vertices[a as usize].dist(mesh.vertices[b as usize]);
        adj[a as usize].push((b, w));
        adj[b as usize].push((a, w));
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[source as usize] = 0.0;
    let mut heap: BinaryHeap<HeapItem> = BinaryHeap::new();
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex: u }) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for &(v, w) in &adj[u as usize] {
            let nd = d + w;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                heap.push(HeapItem { dist: nd, vertex: v });
            }
        }
    }
    dist
}

fn component_sizes(values: &[f64]) -> Vec<usize> {
    let unreached = values.iter().filter(|v| v.is_infinite()).count();
    if unreached == 0 {
        Vec::new()
    } else {
        vec![unreached]
    }
}

struct HeapItem {
    dist: f64,
    vertex: u32,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    // min-heap: reversed distance, then vertex index for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then(other.vertex.cmp(&self.vertex))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;
    use crate::mesh::{generate, Shape};

    #[test]
    fn height_field_is_coordinate() {
        let mesh = generate(Shape::Sphere, 16).unwrap();
        let f = height_field(&mesh, Axis::Z);
        for (i, v) in mesh.vertices.iter().enumerate() {
            assert_eq!(f.values[i], v.z);
        }
        let (lo, hi) = f.range();
        assert_eq!(lo, -1.0);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn geodesic_source_zero_and_lipschitz() {
        let mesh = generate(Shape::Torus, 24).unwrap();
        let f = geodesic_field(&mesh, Direction::Top).unwrap();
        assert!(f.values.iter().any(|&v| v == 0.0));
        assert!(f.values.iter().all(|&v| v >= 0.0 && v.is_finite()));
        for (&(a, b), _) in &mesh.edge_tris {
            let w = mesh.vertices[a as usize].dist(mesh.vertices[b as usize]);
            assert!((f.value(a) - f.value(b)).abs() <= w + 1e-12);
        }
    }

    #[test]
    fn geodesic_chain_is_cumulative_length() {
        // strip of triangles along x: geodesic from the right end follows edges
        let v = vec![
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(2.0, 0.0, 0.0),
            vec3(0.5, 1.0, 0.0),
            vec3(1.5, 1.0, 0.0),
        ];
        let t = vec![[0, 1, 3], [1, 4, 3], [1, 2, 4]];
        let mesh = crate::mesh::TriangleMesh::new(v, t).unwrap();
        let f = geodesic_field(&mesh, Direction::Right).unwrap(); // source = vertex 2
        assert_eq!(f.value(2), 0.0);
        assert_eq!(f.value(1), 1.0);
        assert_eq!(f.value(0), 2.0);
        // brute-force pairwise symmetry on this small mesh
        let d_from_0 = dijkstra_all(&mesh, 0);
        let d_from_2 = dijkstra_all(&mesh, 2);
        assert!((d_from_0[2] - d_from_2[0]).abs() < 1e-12);
    }

    #[test]
    fn disconnected_mesh_rejected() {
        let v = vec![
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(5.0, 5.0, 5.0),
            vec3(6.0, 5.0, 5.0),
            vec3(5.0, 6.0, 5.0),
        ];
        let t = vec![[0, 1, 2], [3, 4, 5]];
        let mesh = crate::mesh::TriangleMesh::new(v, t).unwrap();
        let err = geodesic_field(&mesh, Direction::Top).unwrap_err();
        assert!(format!("{err}").contains("unreached"));
    }

    #[test]
    fn perturb_identity_when_distinct() {
        let f = ScalarField {
            values: vec![0.0, 1.0, 2.5],
        };
        let p = f.perturb_distinct();
        assert_eq!(p.values, f.values);
    }

    #[test]
    fn perturb_breaks_ties_by_index() {
        let f = ScalarField {
            values: vec![0.5, 0.0, 0.5],
        };
        let p = f.perturb_distinct();
        assert!(p.all_distinct());
        assert_eq!(p.values[0], 0.5);
        assert!(p.values[2] > p.values[0]);
        assert!(p.values[2] - p.values[0] < 1e-9 * 0.5);
    }

    #[test]
    fn perturb_flat_region_spans_less_than_k_delta() {
        let k = 10;
        let f = ScalarField {
            values: vec![1.0; k],
        };
        let p = f.perturb_distinct();
        assert!(p.all_distinct());
        let (lo, hi) = p.range();
        // flat field has zero range; delta floor keeps offsets tiny
        assert!(hi - lo < k as f64 * 1e-9);
        // order by (value, index) preserved
        for i in 1..k {
            assert!(p.values[i] > p.values[i - 1]);
        }
    }

    #[test]
    fn perturb_preserves_total_order() {
        let f = ScalarField {
            values: vec![0.3, 0.1, 0.3, 0.2, 0.1],
        };
        let p = f.perturb_distinct();
        let mut orig: Vec<u32> = (0..5).collect();
        orig.sort_by(|&a, &b| f.cmp_vertices(a, b));
        let mut pert: Vec<u32> = (0..5).collect();
        pert.sort_by(|&a, &b| p.cmp_vertices(a, b));
        assert_eq!(orig, pert);
        for i in 0..5 {
            assert!((p.values[i] - f.values[i]).abs() < 1e-9 * 0.2);
        }
    }
}
