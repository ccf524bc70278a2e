//! Decomposes a mesh into one topological cylinder per Reeb arc.
//!
//! Cylinders are cut out of the mesh by clipping triangles to a value band
//! just inside the two critical values of the arc. Cut vertices are keyed
//! symbolically by the original edge they sit on, so adjacent triangles
//! reproduce bit-identical rim vertices and the result is a watertight band.

use std::collections::BTreeMap;

use crate::error::{GaspError, Result};
use crate::field::ScalarField;
use crate::geom::{triangle_area, Vec3};
use crate::mesh::{edge_key, TriangleMesh};
use crate::reeb::ReebGraph;
use crate::uf::UnionFind;

/// Which side of a band cut a rim vertex came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutSide {
    Lo,
    Hi,
}

/// Symbolic identity of a band-mesh vertex. Cut vertices are tied to the
/// original mesh edge they lie on, never to the triangle being clipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKey {
    Original(u32),
    EdgeCut(u32, u32, CutSide),
}

#[derive(Debug, Clone, Copy)]
struct ClipVert {
    key: VertexKey,
    pos: Vec3,
    val: f64,
}

/// The original mesh edge a clip-polygon edge lies on, if any. The interior
/// chords introduced by a cut carry a constant value, so the opposite cut
/// level never crosses them.
fn common_original_edge(p: VertexKey, q: VertexKey) -> Option<(u32, u32)> {
    match (p, q) {
        (VertexKey::Original(a), VertexKey::Original(b)) => Some(edge_key(a, b)),
        (VertexKey::Original(a), VertexKey::EdgeCut(x, y, _))
        | (VertexKey::EdgeCut(x, y, _), VertexKey::Original(a)) => {
            if a == x || a == y {
                Some((x, y))
            } else {
                None
            }
        }
        (VertexKey::EdgeCut(x, y, _), VertexKey::EdgeCut(u, v, _)) => {
            if (x, y) == (u, v) {
                Some((x, y))
            } else {
                None
            }
        }
    }
}

/// Clips a convex polygon against one level: keeps vertices with
/// value > iso (`keep_equal` false) or >= iso (true) when `above`, and the
/// mirrored tests when keeping below. Cut points are interpolated on the
/// original mesh edge so every triangle produces the same rim coordinates.
fn clip_polygon(
    mesh: &TriangleMesh,
    field: &ScalarField,
    poly: &[ClipVert],
    iso: f64,
    above: bool,
    keep_equal: bool,
    side: CutSide,
) -> Result<Vec<ClipVert>> {
    let inside = |v: &ClipVert| {
        if above {
            if keep_equal {
                v.val >= iso
            } else {
                v.val > iso
            }
        } else {
            v.val <= iso
        }
    };
    let mut out: Vec<ClipVert> = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let pin = inside(&p);
        let qin = inside(&q);
        if pin {
            out.push(p);
        }
        if pin != qin {
            // never at an endpoint: equality cases are settled by `inside`
            let (a, b) = common_original_edge(p.key, q.key).ok_or_else(|| {
                GaspError::Internal("band cut crossed an interior chord".into())
            })?;
            let fa = field.value(a);
            let fb = field.value(b);
            let t = (iso - fa) / (fb - fa);
            let pos = mesh.vertices[a as usize].lerp(mesh.vertices[b as usize], t);
            out.push(ClipVert {
                key: VertexKey::EdgeCut(a, b, side),
                pos,
                val: iso,
            });
        }
    }
    Ok(out)
}

/// Cuts one triangle at an isovalue, keeping the requested side. Returns the
/// clipped polygon (up to 4 vertices), empty if nothing is kept.
pub fn cut_triangle(
    mesh: &TriangleMesh,
    field: &ScalarField,
    tri: u32,
    iso: f64,
    keep_above: bool,
    keep_equal: bool,
) -> Result<Vec<(VertexKey, Vec3, f64)>> {
    let poly = triangle_polygon(mesh, field, tri);
    let side = if keep_above { CutSide::Lo } else { CutSide::Hi };
    let cut = clip_polygon(mesh, field, &poly, iso, keep_above, keep_equal, side)?;
    Ok(cut.into_iter().map(|c| (c.key, c.pos, c.val)).collect())
}

fn triangle_polygon(mesh: &TriangleMesh, field: &ScalarField, tri: u32) -> Vec<ClipVert> {
    mesh.triangles[tri as usize]
        .iter()
        .map(|&v| ClipVert {
            key: VertexKey::Original(v),
            pos: mesh.vertices[v as usize],
            val: field.value(v),
        })
        .collect()
}

/// A band of the mesh between two cut levels, re-triangulated and welded
/// through symbolic vertex keys.
#[derive(Debug, Clone)]
pub struct BandMesh {
    pub vertices: Vec<Vec3>,
    pub values: Vec<f64>,
    pub keys: Vec<VertexKey>,
    pub triangles: Vec<[u32; 3]>,
    /// original mesh triangle each band triangle was cut from
    pub source_tri: Vec<u32>,
    pub lo: f64,
    pub hi: f64,
}

impl BandMesh {
    pub fn original_vertex(&self, v: u32) -> Option<u32> {
        match self.keys[v as usize] {
            VertexKey::Original(o) => Some(o),
            VertexKey::EdgeCut(..) => None,
        }
    }

    pub fn on_rim(&self, v: u32, side: CutSide) -> bool {
        let level = if side == CutSide::Lo { self.lo } else { self.hi };
        match self.keys[v as usize] {
            VertexKey::EdgeCut(_, _, s) => s == side,
            VertexKey::Original(_) => self.values[v as usize] == level,
        }
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                triangle_area(
                    self.vertices[t[0] as usize],
                    self.vertices[t[1] as usize],
                    self.vertices[t[2] as usize],
                )
            })
            .sum()
    }
}

/// Clips `tris` to the open-below/closed-above band. `keep_lo_equal` keeps
/// vertices sitting exactly at the lower level (used for thin features so
/// the critical vertices stay in the band).
pub fn clip_band(
    mesh: &TriangleMesh,
    field: &ScalarField,
    tris: &[u32],
    lo: f64,
    hi: f64,
    keep_lo_equal: bool,
) -> Result<BandMesh> {
    let mut ids: BTreeMap<VertexKey, u32> = BTreeMap::new();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut keys: Vec<VertexKey> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let mut source_tri: Vec<u32> = Vec::new();
    for &t in tris {
        let poly = triangle_polygon(mesh, field, t);
        let poly = clip_polygon(mesh, field, &poly, lo, true, keep_lo_equal, CutSide::Lo)?;
        if poly.len() < 3 {
            continue;
        }
        let poly = clip_polygon(mesh, field, &poly, hi, false, true, CutSide::Hi)?;
        if poly.len() < 3 {
            continue;
        }
        let mut local: Vec<u32> = Vec::with_capacity(poly.len());
        for c in &poly {
            let id = *ids.entry(c.key).or_insert_with(|| {
                vertices.push(c.pos);
                values.push(c.val);
                keys.push(c.key);
                vertices.len() as u32 - 1
            });
            local.push(id);
        }
        // fan triangulation; drop slivers with repeated vertices
        for i in 1..local.len() - 1 {
            let tri = [local[0], local[i], local[i + 1]];
            if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
                triangles.push(tri);
                source_tri.push(t);
            }
        }
    }
    Ok(BandMesh {
        vertices,
        values,
        keys,
        triangles,
        source_tri,
        lo,
        hi,
    })
}

/// Bins triangles by value range, for quick rough cuts of a band.
pub struct TriangleBins {
    lo: f64,
    width: f64,
    bins: Vec<Vec<u32>>,
}

impl TriangleBins {
    pub fn build(mesh: &TriangleMesh, field: &ScalarField, bins: u32) -> TriangleBins {
        let bins = bins.max(1) as usize;
        let (lo, hi) = field.range();
        let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
        let mut buckets = vec![Vec::new(); bins];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let vals = tri.map(|v| field.value(v));
            let tmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let tmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let b0 = (((tmin - lo) / width) as usize).min(bins - 1);
            let b1 = (((tmax - lo) / width) as usize).min(bins - 1);
            for b in b0..=b1 {
                buckets[b].push(t as u32);
            }
        }
        TriangleBins {
            lo,
            width,
            bins: buckets,
        }
    }

    /// Triangles possibly intersecting [a, b]; a superset of the exact answer.
    pub fn rough_cut(&self, a: f64, b: f64) -> Vec<u32> {
        let n = self.bins.len();
        let b0 = ((((a - self.lo) / self.width) as isize).max(0) as usize).min(n - 1);
        let b1 = ((((b - self.lo) / self.width) as isize).max(0) as usize).min(n - 1);
        let mut out: Vec<u32> = Vec::new();
        for bin in &self.bins[b0..=b1] {
            out.extend_from_slice(bin);
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// One Reeb arc's piece of surface: a topological cylinder between the two
/// cut levels, with rim flags for validation and contour marching.
#[derive(Debug, Clone)]
pub struct Cylinder {
    /// index into `ReebGraph::edges`
    pub edge: usize,
    pub lo: f64,
    pub hi: f64,
    pub vertices: Vec<Vec3>,
    pub values: Vec<f64>,
    pub triangles: Vec<[u32; 3]>,
    pub original_vertex: Vec<Option<u32>>,
    pub on_lo_rim: Vec<bool>,
    pub on_hi_rim: Vec<bool>,
}

impl Cylinder {
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert(edge_key(a, b));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }
}

const CUT_EPS_FACTOR: f64 = 1e-4;

/// Cut levels for a regular arc: just inside the critical values, so the
/// critical vertices themselves are excluded from the band. The offset is
/// relative to the arc's own span, so arcs between near-tied criticals get a
/// proportionally tiny band; it widens to the next representable value when
/// the span underflows the values' magnitude.
pub fn arc_cut_levels(f_lo: f64, f_hi: f64) -> (f64, f64) {
    let eps = CUT_EPS_FACTOR * (f_hi - f_lo);
    let mut lo = f_lo + eps;
    if lo <= f_lo {
        lo = next_toward(f_lo, f_hi);
    }
    let mut hi = f_hi - eps;
    if hi >= f_hi {
        hi = next_toward(f_hi, f_lo);
    }
    (lo, hi)
}

/// Next representable f64 strictly on the `to` side of `from`.
fn next_toward(from: f64, to: f64) -> f64 {
    debug_assert!(from != to);
    if from == 0.0 {
        return f64::from_bits(1).copysign(to);
    }
    let bits = from.to_bits() as i64;
    let step = if (to > from) == (from > 0.0) { 1 } else { -1 };
    f64::from_bits((bits + step) as u64)
}

/// Extracts the cylinder of every Reeb arc. Arcs sharing both endpoints are
/// cut from one band and told apart by the contour triangles on their spine.
/// `exact` cuts at the critical values themselves (keeping the critical
/// vertices on the rims) instead of the offset levels; used for thin arcs.
pub fn extract_cylinders(
    mesh: &TriangleMesh,
    field: &ScalarField,
    reeb: &ReebGraph,
    bins: &TriangleBins,
    exact: bool,
) -> Result<Vec<Cylinder>> {
    // duplicity groups: arcs with identical endpoints share one band
    let mut groups: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, e) in reeb.edges.iter().enumerate() {
        groups.entry((e.src, e.dst)).or_default().push(i);
    }
    let mut out: Vec<Cylinder> = Vec::new();
    for ((src, dst), edge_ids) in groups {
        let f_lo = reeb.node(src).value;
        let f_hi = reeb.node(dst).value;
        let (lo, hi) = if exact {
            (f_lo, f_hi)
        } else {
            arc_cut_levels(f_lo, f_hi)
        };
        let tris = bins.rough_cut(lo, hi);
        let band = clip_band(mesh, field, &tris, lo, hi, exact)?;
        let comps = band_components(&band);
        let mut by_source: BTreeMap<u32, u32> = BTreeMap::new();
        for (t, &s) in band.source_tri.iter().enumerate() {
            by_source.entry(s).or_insert(comps[t]);
        }
        let mut used: BTreeMap<u32, usize> = BTreeMap::new();
        for &eid in &edge_ids {
            let edge = &reeb.edges[eid];
            let spine = edge
                .spine
                .iter()
                .find(|p| p.level > lo && p.level < hi)
                .ok_or_else(|| {
                    GaspError::Internal(format!(
                        "arc {src}->{dst} has no contour inside its band"
                    ))
                })?;
            let comp = *by_source.get(&spine.triangle).ok_or_else(|| {
                GaspError::Internal(format!(
                    "arc {src}->{dst}: spine triangle missing from band"
                ))
            })?;
            if let Some(&other) = used.get(&comp) {
                return Err(GaspError::Internal(format!(
                    "arcs {other} and {eid} between nodes {src}->{dst} map to \
                     the same band component"
                )));
            }
            used.insert(comp, eid);
            out.push(restrict_component(&band, &comps, comp, eid)?);
        }
    }
    // validate against the critical set
    let criticals: std::collections::BTreeSet<u32> =
        reeb.nodes.iter().map(|n| n.vertex).collect();
    for cyl in &out {
        validate_cylinder(cyl, &criticals, reeb, exact)?;
    }
    out.sort_by_key(|c| c.edge);
    Ok(out)
}

/// Cuts one arc's band at the critical values themselves (keeping the
/// critical vertices) and returns the component carrying the arc's spine.
/// Components touching only at a shared critical vertex stay separate
/// because connectivity is through shared edges.
pub fn extract_exact_cylinder(
    mesh: &TriangleMesh,
    field: &ScalarField,
    reeb: &ReebGraph,
    bins: &TriangleBins,
    edge_idx: usize,
) -> Result<Cylinder> {
    let e = &reeb.edges[edge_idx];
    let lo = reeb.node(e.src).value;
    let hi = reeb.node(e.dst).value;
    let tris = bins.rough_cut(lo, hi);
    let band = clip_band(mesh, field, &tris, lo, hi, true)?;
    let comps = band_components(&band);
    let spine = e.spine.first().ok_or_else(|| {
        GaspError::Internal(format!("arc {edge_idx} has an empty spine"))
    })?;
    let comp = band
        .source_tri
        .iter()
        .zip(&comps)
        .find(|(&s, _)| s == spine.triangle)
        .map(|(_, &c)| c)
        .ok_or_else(|| {
            GaspError::Internal(format!(
                "arc {edge_idx}: spine triangle missing from exact band"
            ))
        })?;
    restrict_component(&band, &comps, comp, edge_idx)
}

fn band_components(band: &BandMesh) -> Vec<u32> {
    let mut uf = UnionFind::new(band.triangles.len());
    let mut edge_owner: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for (t, tri) in band.triangles.iter().enumerate() {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let k = edge_key(a, b);
            match edge_owner.get(&k) {
                Some(&o) => {
                    uf.union(o, t as u32);
                }
                None => {
                    edge_owner.insert(k, t as u32);
                }
            }
        }
    }
    (0..band.triangles.len() as u32).map(|t| uf.find(t)).collect()
}

fn restrict_component(
    band: &BandMesh,
    comps: &[u32],
    comp: u32,
    edge: usize,
) -> Result<Cylinder> {
    let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut values = Vec::new();
    let mut original_vertex = Vec::new();
    let mut on_lo_rim = Vec::new();
    let mut on_hi_rim = Vec::new();
    let mut triangles = Vec::new();
    for (t, tri) in band.triangles.iter().enumerate() {
        if comps[t] != comp {
            continue;
        }
        let mut mapped = [0u32; 3];
        for (i, &v) in tri.iter().enumerate() {
            let id = *remap.entry(v).or_insert_with(|| {
                vertices.push(band.vertices[v as usize]);
                values.push(band.values[v as usize]);
                original_vertex.push(band.original_vertex(v));
                on_lo_rim.push(band.on_rim(v, CutSide::Lo));
                on_hi_rim.push(band.on_rim(v, CutSide::Hi));
                vertices.len() as u32 - 1
            });
            mapped[i] = id;
        }
        triangles.push(mapped);
    }
    if triangles.is_empty() {
        return Err(GaspError::Internal(format!(
            "arc {edge}: empty band component"
        )));
    }
    Ok(Cylinder {
        edge,
        lo: band.lo,
        hi: band.hi,
        vertices,
        values,
        triangles,
        original_vertex,
        on_lo_rim,
        on_hi_rim,
    })
}

fn validate_cylinder(
    cyl: &Cylinder,
    criticals: &std::collections::BTreeSet<u32>,
    reeb: &ReebGraph,
    exact: bool,
) -> Result<()> {
    if !cyl.on_lo_rim.iter().any(|&b| b) || !cyl.on_hi_rim.iter().any(|&b| b) {
        return Err(GaspError::Internal(format!(
            "arc {}: band component does not reach both cut levels",
            cyl.edge
        )));
    }
    let e = &reeb.edges[cyl.edge];
    let allowed = [reeb.node(e.src).vertex, reeb.node(e.dst).vertex];
    for ov in cyl.original_vertex.iter().flatten() {
        if criticals.contains(ov) && !(exact && allowed.contains(ov)) {
            return Err(GaspError::Internal(format!(
                "arc {}: band component contains critical vertex {ov}",
                cyl.edge
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{height_field, Axis};
    use crate::mesh::{generate, Shape};
    use crate::reeb::compute_reeb_graph;

    fn setup(shape: Shape, res: u32) -> (TriangleMesh, ScalarField, ReebGraph) {
        let mesh = generate(shape, res).unwrap();
        let field = height_field(&mesh, Axis::Z).perturb_distinct();
        let reeb = compute_reeb_graph(&mesh, &field).unwrap();
        (mesh, field, reeb)
    }

    #[test]
    fn cut_triangle_conserves_area() {
        let mesh = generate(Shape::Sphere, 16).unwrap();
        let field = height_field(&mesh, Axis::Z);
        for t in 0..mesh.triangles.len() as u32 {
            let [a, b, c] = mesh.triangle_positions(t as usize);
            let full = triangle_area(a, b, c);
            for iso in [-0.3, 0.0, 0.41] {
                let above = cut_triangle(&mesh, &field, t, iso, true, false).unwrap();
                let below = cut_triangle(&mesh, &field, t, iso, false, false).unwrap();
                let area = |poly: &[(VertexKey, Vec3, f64)]| -> f64 {
                    (1..poly.len().saturating_sub(1))
                        .map(|i| triangle_area(poly[0].1, poly[i].1, poly[i + 1].1))
                        .sum()
                };
                assert!(
                    (area(&above) + area(&below) - full).abs() < 1e-12 + 1e-12 * full,
                    "triangle {t} iso {iso}"
                );
            }
        }
    }

    #[test]
    fn band_area_matches_difference_of_half_cuts() {
        let mesh = generate(Shape::Torus, 32).unwrap();
        let field = height_field(&mesh, Axis::Z);
        let all: Vec<u32> = (0..mesh.triangles.len() as u32).collect();
        let half_area = |iso: f64| -> f64 {
            let mut area = 0.0;
            for &t in &all {
                let poly = cut_triangle(&mesh, &field, t, iso, true, false).unwrap();
                area += (1..poly.len().saturating_sub(1))
                    .map(|i| triangle_area(poly[0].1, poly[i].1, poly[i + 1].1))
                    .sum::<f64>();
            }
            area
        };
        let (lo, hi) = (-0.42, 0.17);
        let band = clip_band(&mesh, &field, &all, lo, hi, false).unwrap();
        let expect = half_area(lo) - half_area(hi);
        assert!(
            (band.surface_area() - expect).abs() < 1e-9,
            "band {} vs {}",
            band.surface_area(),
            expect
        );
    }

    #[test]
    fn band_boundary_is_only_on_rims() {
        let (mesh, field, _) = setup(Shape::Torus, 32);
        let all: Vec<u32> = (0..mesh.triangles.len() as u32).collect();
        let band = clip_band(&mesh, &field, &all, -0.5, 0.1, false).unwrap();
        let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for t in &band.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *counts.entry(edge_key(a, b)).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &counts {
            assert!(c <= 2, "edge used {c} times");
            if c == 1 {
                let lo = band.on_rim(a, CutSide::Lo) && band.on_rim(b, CutSide::Lo);
                let hi = band.on_rim(a, CutSide::Hi) && band.on_rim(b, CutSide::Hi);
                assert!(lo || hi, "boundary edge off the rims");
            }
        }
    }

    #[test]
    fn rough_cut_is_superset_of_exact() {
        let (mesh, field, _) = setup(Shape::Torus, 32);
        let bins = TriangleBins::build(&mesh, &field, 20);
        let (a, b) = (-0.3, 0.4);
        let got = bins.rough_cut(a, b);
        for t in 0..mesh.triangles.len() as u32 {
            let vals = mesh.triangles[t as usize].map(|v| field.value(v));
            let tmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let tmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if tmax >= a && tmin <= b {
                assert!(got.binary_search(&t).is_ok(), "triangle {t} missed");
            }
        }
    }

    #[test]
    fn sphere_yields_one_cylinder() {
        let (mesh, field, reeb) = setup(Shape::Sphere, 24);
        let bins = TriangleBins::build(&mesh, &field, 20);
        let cyls = extract_cylinders(&mesh, &field, &reeb, &bins, false).unwrap();
        assert_eq!(cyls.len(), 1);
        assert_eq!(cyls[0].euler_characteristic(), 0);
    }

    #[test]
    fn torus_yields_four_cylinders_with_two_rim_loops_each() {
        let (mesh, field, reeb) = setup(Shape::Torus, 48);
        let bins = TriangleBins::build(&mesh, &field, 20);
        let cyls = extract_cylinders(&mesh, &field, &reeb, &bins, false).unwrap();
        assert_eq!(cyls.len(), 4);
        for (i, c) in cyls.iter().enumerate() {
            assert_eq!(c.edge, i);
            assert_eq!(c.euler_characteristic(), 0, "arc {i} is not an annulus");
            assert_eq!(rim_loops(c), 2, "arc {i} rim loops");
            // all interior values strictly inside the band
            for v in 0..c.vertices.len() {
                assert!(c.values[v] >= c.lo - 1e-12 && c.values[v] <= c.hi + 1e-12);
            }
        }
        // the two parallel saddle-saddle arcs are disjoint pieces of surface
        let e1 = &reeb.edges[1];
        let e2 = &reeb.edges[2];
        assert_eq!((e1.src, e1.dst), (e2.src, e2.dst));
    }

    #[test]
    fn genus2_extraction_is_complete() {
        let mesh = generate(Shape::Genus2, 48).unwrap();
        let field = height_field(&mesh, Axis::X).perturb_distinct();
        let reeb = compute_reeb_graph(&mesh, &field).unwrap();
        let bins = TriangleBins::build(&mesh, &field, 20);
        let cyls = extract_cylinders(&mesh, &field, &reeb, &bins, false).unwrap();
        assert_eq!(cyls.len(), reeb.edges.len());
        for c in &cyls {
            assert_eq!(c.euler_characteristic(), 0);
        }
    }

    #[test]
    fn exact_cut_keeps_critical_vertices() {
        let (mesh, field, reeb) = setup(Shape::Sphere, 24);
        let bins = TriangleBins::build(&mesh, &field, 20);
        let cyls = extract_cylinders(&mesh, &field, &reeb, &bins, true).unwrap();
        assert_eq!(cyls.len(), 1);
        let cyl = &cyls[0];
        let min_v = reeb.nodes[0].vertex;
        let max_v = reeb.nodes[1].vertex;
        assert!(cyl.original_vertex.iter().flatten().any(|&v| v == min_v));
        assert!(cyl.original_vertex.iter().flatten().any(|&v| v == max_v));
    }

    fn rim_loops(c: &Cylinder) -> usize {
        let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for t in &c.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *counts.entry(edge_key(a, b)).or_insert(0) += 1;
            }
        }
        let boundary: Vec<(u32, u32)> = counts
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(e, _)| e)
            .collect();
        let mut uf = UnionFind::new(c.vertices.len());
        for &(a, b) in &boundary {
            uf.union(a, b);
        }
        let verts: std::collections::BTreeSet<u32> = boundary
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect();
        let roots: std::collections::BTreeSet<u32> =
            verts.iter().map(|&v| uf.find(v)).collect();
        roots.len()
    }
}
