//! Reeb graph construction for scalar fields with distinct vertex values.
//!
//! Critical vertices are found by counting connected components of the lower
//! and upper link. The graph itself is built slab by slab: each critical value
//! gets a slab bounded by midlevels nudged off all vertex values, contours at
//! those midlevels become arc cross-sections, and connected slab regions wire
//! the chains of contours into nodes. Runs in O(T * m) for T triangles and m
//! critical points.

use std::collections::BTreeMap;

use crate::error::{GaspError, Result};
use crate::field::ScalarField;
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;
use crate::uf::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Regular,
    Minimum,
    Maximum,
    /// Saddle of the given multiplicity (1 = simple saddle).
    Saddle(u32),
}

impl VertexKind {
    pub fn label(self) -> String {
        match self {
            VertexKind::Regular => "regular".into(),
            VertexKind::Minimum => "minimum".into(),
            VertexKind::Maximum => "maximum".into(),
            VertexKind::Saddle(k) => format!("saddle{k}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReebNode {
    pub id: u32,
    pub vertex: u32,
    pub position: Vec3,
    pub value: f64,
    pub kind: VertexKind,
}

/// One midlevel crossing of an arc: the level and a triangle of the contour
/// component there. Used downstream to seed cylinder extraction.
#[derive(Debug, Clone, Copy)]
pub struct SpinePoint {
    pub level: f64,
    pub triangle: u32,
}

#[derive(Debug, Clone)]
pub struct ReebEdge {
    pub src: u32,
    pub dst: u32,
    /// Distinguishes parallel edges between the same node pair.
    pub instance: u32,
    pub spine: Vec<SpinePoint>,
}

#[derive(Debug, Clone)]
pub struct ReebGraph {
    pub nodes: Vec<ReebNode>,
    pub edges: Vec<ReebEdge>,
}

impl ReebGraph {
    pub fn node(&self, id: u32) -> &ReebNode {
        &self.nodes[id as usize]
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(e.src, e.dst);
        }
        (0..self.nodes.len() as u32)
            .filter(|&i| uf.find(i) == i)
            .count()
    }

    /// Independent cycles: |E| - |V| + components. Equals the surface genus
    /// for a closed orientable connected mesh.
    pub fn loops(&self) -> usize {
        self.edges.len() + self.components() - self.nodes.len()
    }

    pub fn count_kind(&self, pred: impl Fn(VertexKind) -> bool) -> usize {
        self.nodes.iter().filter(|n| pred(n.kind)).count()
    }
}

/// Triangles incident to each vertex.
pub fn vertex_triangles(mesh: &TriangleMesh) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); mesh.vertices.len()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            out[v as usize].push(t as u32);
        }
    }
    out
}

/// Classifies a vertex by the number of connected components of its lower
/// link (vertices and edges of the link where the field is below v).
pub fn classify_vertex(
    mesh: &TriangleMesh,
    field: &ScalarField,
    v: u32,
    vert_tris: &[Vec<u32>],
) -> VertexKind {
    // opposite edges of the incident triangles form the link
    let mut link_edges: Vec<(u32, u32)> = Vec::new();
    for &t in &vert_tris[v as usize] {
        let tri = mesh.triangles[t as usize];
        let rest: Vec<u32> = tri.iter().copied().filter(|&u| u != v).collect();
        link_edges.push((rest[0], rest[1]));
    }
    let lower = link_component_count(field, &link_edges, |u| {
        field.cmp_vertices(u, v) == std::cmp::Ordering::Less
    });
    let upper = link_component_count(field, &link_edges, |u| {
        field.cmp_vertices(u, v) == std::cmp::Ordering::Greater
    });
    if lower == 0 && upper == 0 {
        VertexKind::Regular
    } else if lower == 0 {
        VertexKind::Minimum
    } else if upper == 0 {
        VertexKind::Maximum
    } else if lower >= 2 {
        VertexKind::Saddle(lower as u32 - 1)
    } else {
        VertexKind::Regular
    }
}

fn link_component_count(
    _field: &ScalarField,
    link_edges: &[(u32, u32)],
    keep: impl Fn(u32) -> bool,
) -> usize {
    let mut ids: BTreeMap<u32, u32> = BTreeMap::new();
    for &(a, b) in link_edges {
        for u in [a, b] {
            if keep(u) && !ids.contains_key(&u) {
                let n = ids.len() as u32;
                ids.insert(u, n);
            }
        }
    }
    let mut uf = UnionFind::new(ids.len());
    for &(a, b) in link_edges {
        if keep(a) && keep(b) {
            uf.union(ids[&a], ids[&b]);
        }
    }
    (0..ids.len() as u32).filter(|&i| uf.find(i) == i).count()
}

/// Contour components of the level set at `iso` (not a vertex value):
/// crossed triangles joined across shared crossed edges.
struct ContourSet {
    /// one representative (smallest) triangle index per contour component
    reps: Vec<u32>,
}

fn contours_at(mesh: &TriangleMesh, field: &ScalarField, iso: f64) -> ContourSet {
    let nt = mesh.triangles.len();
    let mut uf = UnionFind::new(nt);
    for (&(a, b), tris) in &mesh.edge_tris {
        if (field.value(a) < iso) != (field.value(b) < iso) && tris.len() == 2 {
            uf.union(tris[0], tris[1]);
        }
    }
    let mut reps: Vec<u32> = Vec::new();
    let mut root_label: BTreeMap<u32, u32> = BTreeMap::new();
    for t in 0..nt as u32 {
        let tri = mesh.triangles[t as usize];
        let vals = tri.map(|v| field.value(v));
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo < iso && iso < hi {
            let root = uf.find(t);
            root_label.entry(root).or_insert_with(|| {
                reps.push(t);
                reps.len() as u32 - 1
            });
        }
    }
    ContourSet { reps }
}

/// Connected regions of triangles intersecting the open slab (lo, hi),
/// joined across shared edges whose value range intersects the slab.
struct RegionSet {
    label: BTreeMap<u32, u32>,
}

fn slab_regions(mesh: &TriangleMesh, field: &ScalarField, lo: f64, hi: f64) -> RegionSet {
    let nt = mesh.triangles.len();
    let in_slab = |t: u32| {
        let vals = mesh.triangles[t as usize].map(|v| field.value(v));
        let tmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let tmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        tmin < hi && tmax > lo
    };
    let mut uf = UnionFind::new(nt);
    for (&(a, b), tris) in &mesh.edge_tris {
        if tris.len() != 2 {
            continue;
        }
        let emin = field.value(a).min(field.value(b));
        let emax = field.value(a).max(field.value(b));
        if emin < hi && emax > lo && in_slab(tris[0]) && in_slab(tris[1]) {
            uf.union(tris[0], tris[1]);
        }
    }
    let mut label: BTreeMap<u32, u32> = BTreeMap::new();
    let mut root_label: BTreeMap<u32, u32> = BTreeMap::new();
    for t in 0..nt as u32 {
        if in_slab(t) {
            let root = uf.find(t);
            let next = root_label.len() as u32;
            let l = *root_label.entry(root).or_insert(next);
            label.insert(t, l);
        }
    }
    RegionSet { label }
}

struct OpenChain {
    start: u32,
    spine: Vec<SpinePoint>,
}

pub fn compute_reeb_graph(mesh: &TriangleMesh, field: &ScalarField) -> Result<ReebGraph> {
    if field.values.len() != mesh.vertices.len() {
        return Err(GaspError::Input(format!(
            "field has {} values for {} vertices",
            field.values.len(),
            mesh.vertices.len()
        )));
    }
    if !field.all_distinct() {
        return Err(GaspError::Input(
            "field values must be pairwise distinct; perturb the field first".into(),
        ));
    }
    let vert_tris = vertex_triangles(mesh);
    let mut criticals: Vec<(u32, VertexKind)> = Vec::new();
    for v in 0..mesh.vertices.len() as u32 {
        let kind = classify_vertex(mesh, field, v, &vert_tris);
        if kind != VertexKind::Regular {
            criticals.push((v, kind));
        }
    }
    criticals.sort_by(|a, b| field.cmp_vertices(a.0, b.0));
    let m = criticals.len();
    if m == 0 {
        return Err(GaspError::Topology("no critical points found".into()));
    }

    let mut sorted_vals = field.values.clone();
    sorted_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let is_vertex_value =
        |x: f64| sorted_vals.binary_search_by(|v| v.partial_cmp(&x).unwrap()).is_ok();
    // midlevel between consecutive critical values, nudged off vertex values
    let mut mids = Vec::with_capacity(m.saturating_sub(1));
    for w in criticals.windows(2) {
        let lo = field.value(w[0].0);
        let hi = field.value(w[1].0);
        let mut mid = 0.5 * (lo + hi);
        while is_vertex_value(mid) {
            mid = 0.5 * (mid + hi);
            if mid >= hi {
                return Err(GaspError::Internal(
                    "could not place a midlevel between critical values".into(),
                ));
            }
        }
        mids.push(mid);
    }

    let nodes: Vec<ReebNode> = criticals
        .iter()
        .enumerate()
        .map(|(i, &(v, kind))| ReebNode {
            id: i as u32,
            vertex: v,
            position: mesh.vertices[v as usize],
            value: field.value(v),
            kind,
        })
        .collect();

    let mut edges: Vec<ReebEdge> = Vec::new();
    // chains open at the previous midlevel, keyed by contour label there
    let mut open: BTreeMap<u32, OpenChain> = BTreeMap::new();
    let mut prev_contours: Option<ContourSet> = None;

    for k in 0..m {
        let lo = if k == 0 { f64::NEG_INFINITY } else { mids[k - 1] };
        let hi = if k == m - 1 { f64::INFINITY } else { mids[k] };
        let regions = slab_regions(mesh, field, lo, hi);
        let upper = if k < m - 1 {
            Some(contours_at(mesh, field, mids[k]))
        } else {
            None
        };

        let cv = criticals[k].0;
        let ctri = *vert_tris[cv as usize].first().ok_or_else(|| {
            GaspError::Internal(format!("critical vertex {cv} has no incident triangle"))
        })?;
        let cregion = *regions.label.get(&ctri).ok_or_else(|| {
            GaspError::Internal("critical vertex triangle missing from its slab".into())
        })?;

        // group boundary contours of this slab by region
        let mut lower_by_region: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        if let Some(pc) = &prev_contours {
            for (l, &rep) in pc.reps.iter().enumerate() {
                let r = *regions.label.get(&rep).ok_or_else(|| {
                    GaspError::Internal("lower contour triangle missing from slab".into())
                })?;
                lower_by_region.entry(r).or_default().push(l as u32);
            }
        }
        let mut upper_by_region: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        if let Some(uc) = &upper {
            for (l, &rep) in uc.reps.iter().enumerate() {
                let r = *regions.label.get(&rep).ok_or_else(|| {
                    GaspError::Internal("upper contour triangle missing from slab".into())
                })?;
                upper_by_region.entry(r).or_default().push(l as u32);
            }
        }

        let mut region_ids: Vec<u32> = lower_by_region
            .keys()
            .chain(upper_by_region.keys())
            .copied()
            .chain(std::iter::once(cregion))
            .collect();
        region_ids.sort_unstable();
        region_ids.dedup();

        let mut next_open: BTreeMap<u32, OpenChain> = BTreeMap::new();
        for r in region_ids {
            let lows = lower_by_region.remove(&r).unwrap_or_default();
            let ups = upper_by_region.remove(&r).unwrap_or_default();
            if r == cregion {
                // every chain entering this region ends at the critical node;
                // every contour leaving it starts a new chain there
                for l in lows {
                    let chain = open.remove(&l).ok_or_else(|| {
                        GaspError::Internal("contour chain lost between slabs".into())
                    })?;
                    edges.push(ReebEdge {
                        src: chain.start,
                        dst: k as u32,
                        instance: 0,
                        spine: chain.spine,
                    });
                }
                for u in ups {
                    let rep = upper.as_ref().unwrap().reps[u as usize];
                    next_open.insert(
                        u,
                        OpenChain {
                            start: k as u32,
                            spine: vec![SpinePoint {
                                level: mids[k],
                                triangle: rep,
                            }],
                        },
                    );
                }
            } else {
                // no critical point inside: the region must be a tube
                if lows.len() != 1 || ups.len() != 1 {
                    return Err(GaspError::Internal(format!(
                        "slab region around critical value {} has {} lower and {} upper \
                         contours but no critical point",
                        field.value(cv),
                        lows.len(),
                        ups.len()
                    )));
                }
                let mut chain = open.remove(&lows[0]).ok_or_else(|| {
                    GaspError::Internal("contour chain lost between slabs".into())
                })?;
                let rep = upper.as_ref().unwrap().reps[ups[0] as usize];
                chain.spine.push(SpinePoint {
                    level: mids[k],
                    triangle: rep,
                });
                next_open.insert(ups[0], chain);
            }
        }
        if !open.is_empty() {
            return Err(GaspError::Internal(
                "contours not reached by any slab region".into(),
            ));
        }
        open = next_open;
        prev_contours = upper;
    }
    if !open.is_empty() {
        return Err(GaspError::Internal("unterminated contour chains".into()));
    }

    // number parallel edges between identical node pairs
    let mut seen: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for e in &mut edges {
        let c = seen.entry((e.src, e.dst)).or_insert(0);
        e.instance = *c;
        *c += 1;
    }

    Ok(ReebGraph { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{height_field, Axis};
    use crate::mesh::{generate, Shape};

    fn reeb(shape: Shape, res: u32, axis: Axis) -> (TriangleMesh, ReebGraph) {
        let mesh = generate(shape, res).unwrap();
        let field = height_field(&mesh, axis).perturb_distinct();
        let graph = compute_reeb_graph(&mesh, &field).unwrap();
        (mesh, graph)
    }

    fn morse_count(graph: &ReebGraph) -> i64 {
        // #minima + #maxima - sum of saddle multiplicities
        let mut total = 0i64;
        for n in &graph.nodes {
            total += match n.kind {
                VertexKind::Minimum | VertexKind::Maximum => 1,
                VertexKind::Saddle(k) => -(k as i64),
                VertexKind::Regular => unreachable!(),
            };
        }
        total
    }

    #[test]
    fn sphere_height_is_a_single_arc() {
        let (mesh, g) = reeb(Shape::Sphere, 24, Axis::Z);
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.loops(), 0);
        assert_eq!(g.count_kind(|k| k == VertexKind::Minimum), 1);
        assert_eq!(g.count_kind(|k| k == VertexKind::Maximum), 1);
        assert_eq!(morse_count(&g), mesh.euler_characteristic());
        // nodes sorted by value: min first
        assert!(g.nodes[0].value < g.nodes[1].value);
        assert!(!g.edges[0].spine.is_empty());
    }

    #[test]
    fn torus_height_has_four_nodes_and_one_loop() {
        let (mesh, g) = reeb(Shape::Torus, 48, Axis::Z);
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.loops(), 1);
        assert_eq!(g.count_kind(|k| matches!(k, VertexKind::Saddle(_))), 2);
        assert_eq!(morse_count(&g), mesh.euler_characteristic());
        // min, saddle, saddle, max by increasing value
        assert_eq!(g.nodes[0].kind, VertexKind::Minimum);
        assert!(matches!(g.nodes[1].kind, VertexKind::Saddle(_)));
        assert!(matches!(g.nodes[2].kind, VertexKind::Saddle(_)));
        assert_eq!(g.nodes[3].kind, VertexKind::Maximum);
        // the two saddles are joined by two parallel arcs
        let parallel: Vec<_> = g.edges.iter().filter(|e| e.src == 1 && e.dst == 2).collect();
        assert_eq!(parallel.len(), 2);
        assert_eq!(parallel[0].instance, 0);
        assert_eq!(parallel[1].instance, 1);
    }

    #[test]
    fn torus_critical_values_match_geometry() {
        // generated torus normalized by 4/3: criticals of z at -1, -1/3, 1/3, 1
        let (_, g) = reeb(Shape::Torus, 48, Axis::Z);
        let vals: Vec<f64> = g.nodes.iter().map(|n| n.value).collect();
        let expect = [-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-9, "value {v} vs {e}");
        }
    }

    #[test]
    fn loops_equal_genus_for_closed_surfaces() {
        for (shape, res) in [
            (Shape::Sphere, 20),
            (Shape::Torus, 32),
            (Shape::Genus2, 48),
            (Shape::ModifiedTorus, 48),
        ] {
            let mesh = generate(shape, res).unwrap();
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                let field = height_field(&mesh, axis).perturb_distinct();
                let g = compute_reeb_graph(&mesh, &field).unwrap();
                let genus = mesh.genus().unwrap();
                assert_eq!(
                    g.loops() as i64,
                    genus,
                    "{shape:?} axis {axis:?}: loops {} vs genus {genus}",
                    g.loops(),
                );
                assert_eq!(morse_count(&g), mesh.euler_characteristic());
            }
        }
    }

    #[test]
    fn modified_torus_has_extra_criticals() {
        let (_, g) = reeb(Shape::ModifiedTorus, 48, Axis::Z);
        assert!(g.nodes.len() > 4, "only {} nodes", g.nodes.len());
        assert_eq!(g.loops(), 1);
    }

    #[test]
    fn geodesic_field_reeb_is_consistent() {
        let mesh = generate(Shape::Torus, 32).unwrap();
        let field = crate::field::geodesic_field(&mesh, crate::field::Direction::Top)
            .unwrap()
            .perturb_distinct();
        let g = compute_reeb_graph(&mesh, &field).unwrap();
        assert_eq!(g.loops(), 1);
        assert_eq!(morse_count(&g), mesh.euler_characteristic());
        // the geodesic source is the unique global minimum node
        assert_eq!(g.nodes[0].kind, VertexKind::Minimum);
        assert_eq!(g.nodes[0].value, 0.0);
    }

    #[test]
    fn tied_field_is_rejected() {
        let mesh = generate(Shape::Sphere, 16).unwrap();
        let field = height_field(&mesh, Axis::Z); // rings of equal z
        let err = compute_reeb_graph(&mesh, &field).unwrap_err();
        assert!(format!("{err}").contains("distinct"));
    }

    #[test]
    fn spine_levels_increase_along_each_edge() {
        let (_, g) = reeb(Shape::Genus2, 48, Axis::X);
        for e in &g.edges {
            let src_v = g.node(e.src).value;
            let dst_v = g.node(e.dst).value;
            assert!(src_v < dst_v);
            let mut prev = src_v;
            for p in &e.spine {
                assert!(p.level > prev && p.level < dst_v);
                prev = p.level;
            }
        }
    }
}
