//! Arc embedding: routes every Reeb arc through leveled candidate points by
//! shortest path (regular arcs), or along mesh edges with subdivision
//! refinement (thin arcs), then assembles the embedded graph.

pub mod candidates;
pub mod contour;
pub mod path;

use std::collections::BTreeMap;

use crate::decomp::{extract_cylinders, extract_exact_cylinder, Cylinder, TriangleBins};
use crate::error::{GaspError, Result};
use crate::field::ScalarField;
use crate::geom::Vec3;
use crate::mesh::{edge_key, TriangleMesh};
use crate::reeb::ReebGraph;

use candidates::{boundary_candidates, interior_candidates};
use contour::{marching_contour, Contour};
use path::shortest_arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaspMode {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    RegularBoundary,
    RegularInterior,
    Thin,
    /// Geometric-barycenter baseline arc.
    Barycenter,
}

impl ArcKind {
    pub fn label(self) -> &'static str {
        match self {
            ArcKind::RegularBoundary => "regular-boundary",
            ArcKind::RegularInterior => "regular-interior",
            ArcKind::Thin => "thin",
            ArcKind::Barycenter => "barycenter",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaspParams {
    /// target function-value gap between contours
    pub spacing: f64,
    /// minimum in-plane distance of interior candidates from the contour
    pub buffer: f64,
    /// max candidate points per contour per iteration
    pub budget: usize,
    /// windowed refinement passes after the coarse pass
    pub refinements: u32,
    /// max subdivision rounds for thin arcs
    pub thin_iterations: u32,
    /// value bins for the rough cut
    pub bins: u32,
}

impl Default for GaspParams {
    fn default() -> GaspParams {
        GaspParams {
            spacing: 0.05,
            buffer: 0.05,
            budget: 40,
            refinements: 2,
            thin_iterations: 5,
            bins: 20,
        }
    }
}

impl GaspParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) {
            return Err(GaspError::Input("spacing must be positive".into()));
        }
        if !(self.buffer >= 0.0) {
            return Err(GaspError::Input("buffer must be non-negative".into()));
        }
        if self.budget < 4 {
            return Err(GaspError::Input("budget must be at least 4".into()));
        }
        if self.bins == 0 {
            return Err(GaspError::Input("bins must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddedArc {
    /// index into `ReebGraph::edges`
    pub edge: usize,
    pub kind: ArcKind,
    pub points: Vec<Vec3>,
    pub isovalues: Vec<f64>,
    /// total path length after the coarse pass and each refinement pass
    pub iteration_lengths: Vec<f64>,
}

impl EmbeddedArc {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddedReebGraph {
    pub arcs: Vec<EmbeddedArc>,
}

/// Number of contours for a regular arc; `None` flags a thin feature
/// (value span smaller than the spacing).
pub fn contour_count(f_j: f64, f_k: f64, spacing: f64) -> Option<usize> {
    let span = f_k - f_j;
    if span < spacing {
        None
    } else {
        Some((span / spacing + 1.0).ceil() as usize)
    }
}

/// Runs one DP pass: critical endpoints as forced single-point levels with
/// the per-contour candidates in between.
fn solve_levels(
    p_src: Vec3,
    p_dst: Vec3,
    cands: &[Vec<Vec3>],
) -> Result<(Vec<Vec3>, f64)> {
    let mut levels: Vec<Vec<Vec3>> = Vec::with_capacity(cands.len() + 2);
    levels.push(vec![p_src]);
    levels.extend(cands.iter().cloned());
    levels.push(vec![p_dst]);
    let (idx, total) = shortest_arc(&levels)?;
    let pts = idx
        .iter()
        .enumerate()
        .map(|(l, &i)| levels[l][i])
        .collect();
    Ok((pts, total))
}

/// Embeds one regular (non-thin) arc on its cylinder.
pub fn embed_regular(
    cyl: &Cylinder,
    reeb: &ReebGraph,
    params: &GaspParams,
    mode: GaspMode,
) -> Result<EmbeddedArc> {
    let e = &reeb.edges[cyl.edge];
    let f_j = reeb.node(e.src).value;
    let f_k = reeb.node(e.dst).value;
    let n = contour_count(f_j, f_k, params.spacing).ok_or_else(|| {
        GaspError::Internal(format!("arc {} is thin but embedded as regular", cyl.edge))
    })?;
    let p_src = reeb.node(e.src).position;
    let p_dst = reeb.node(e.dst).position;

    // isovalues evenly spaced across the cylinder's cut range
    let isovalues: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                0.5 * (cyl.lo + cyl.hi)
            } else if i == 0 {
                cyl.lo
            } else if i == n - 1 {
                cyl.hi // exact, so the rim test sees the cut level itself
            } else {
                cyl.lo + (cyl.hi - cyl.lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let contours: Vec<Contour> = isovalues
        .iter()
        .map(|&iso| marching_contour(cyl, iso))
        .collect::<Result<_>>()?;

    // coarse pass
    let mut cells: Vec<Option<f64>> = vec![None; n];
    let mut cands: Vec<Vec<Vec3>> = Vec::with_capacity(n);
    for (i, c) in contours.iter().enumerate() {
        let pts = match mode {
            GaspMode::Boundary => boundary_candidates(c, params.budget, None),
            GaspMode::Interior => {
                match interior_candidates(c, params.buffer, params.budget, None)? {
                    Some(ic) => {
                        cells[i] = Some(ic.cell);
                        ic.points
                    }
                    None => boundary_candidates(c, params.budget, None),
                }
            }
        };
        cands.push(pts);
    }
    let (mut pts, mut total) = solve_levels(p_src, p_dst, &cands)?;
    let mut iteration_lengths = vec![total];

    // windowed refinement around the previous path
    for _ in 0..params.refinements {
        let mut refined: Vec<Vec<Vec3>> = Vec::with_capacity(n);
        for (i, c) in contours.iter().enumerate() {
            let prev = pts[i + 1]; // offset for the source level
            let p = match (mode, cells[i]) {
                (GaspMode::Interior, Some(cell)) => {
                    match interior_candidates(c, params.buffer, params.budget, Some((prev, cell)))? {
                        Some(ic) => {
                            cells[i] = Some(ic.cell);
                            ic.points
                        }
                        None => vec![prev],
                    }
                }
                _ => boundary_candidates(c, params.budget, Some(prev)),
            };
            // keep the previous path point so refinement can never regress
            let mut p = p;
            if !p.iter().any(|&q| q == prev) {
                p.push(prev);
            }
            refined.push(p);
        }
        let solved = solve_levels(p_src, p_dst, &refined)?;
        pts = solved.0;
        total = solved.1;
        iteration_lengths.push(total);
    }

    let mut iso_out = Vec::with_capacity(n + 2);
    iso_out.push(f_j);
    iso_out.extend(isovalues.iter().copied());
    iso_out.push(f_k);
    Ok(EmbeddedArc {
        edge: cyl.edge,
        kind: if mode == GaspMode::Boundary {
            ArcKind::RegularBoundary
        } else {
            ArcKind::RegularInterior
        },
        points: pts,
        isovalues: iso_out,
        iteration_lengths,
    })
}

/// Thin arcs: shortest edge path across the exactly-cut sub-mesh between the
/// two critical vertices, refined by subdividing path-adjacent triangles.
pub fn embed_thin(
    mesh: &TriangleMesh,
    field: &ScalarField,
    reeb: &ReebGraph,
    edge_idx: usize,
    bins: &TriangleBins,
    params: &GaspParams,
    fallback: Option<&Cylinder>,
) -> Result<EmbeddedArc> {
    let e = &reeb.edges[edge_idx];
    let src_orig = reeb.node(e.src).vertex;
    let dst_orig = reeb.node(e.dst).vertex;
    let cyl = extract_exact_cylinder(mesh, field, reeb, bins, edge_idx)?;
    let find = |orig: u32| {
        cyl.original_vertex
            .iter()
            .position(|&v| v == Some(orig))
            .map(|i| i as u32)
    };
    let seed = match (find(src_orig), find(dst_orig)) {
        (Some(s), Some(d)) => Some((&cyl, s, d, false)),
        _ => None,
    };
    let (work_cyl, src, dst, approximate) = match seed {
        Some(s) => s,
        None => {
            // the exact cut lost a critical vertex; route across the
            // validated cylinder between its nearest rim vertices instead
            let fb = fallback.ok_or_else(|| {
                GaspError::Topology(format!(
                    "thin arc {edge_idx}: critical vertices missing from exact cut"
                ))
            })?;
            let near = |p: Vec3| {
                (0..fb.vertices.len() as u32)
                    .min_by(|&a, &b| {
                        fb.vertices[a as usize]
                            .dist(p)
                            .partial_cmp(&fb.vertices[b as usize].dist(p))
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .unwrap()
            };
            (
                fb,
                near(reeb.node(e.src).position),
                near(reeb.node(e.dst).position),
                true,
            )
        }
    };

    let mut verts = work_cyl.vertices.clone();
    let mut values = work_cyl.values.clone();
    let mut tris = work_cyl.triangles.clone();
    let mut prev_path: Option<Vec<Vec3>> = None;
    let mut iteration_lengths: Vec<f64> = Vec::new();
    let mut path_idx: Vec<u32> = Vec::new();
    for _ in 0..params.thin_iterations.max(1) {
        let p = dijkstra_path(&verts, &tris, src, dst).ok_or_else(|| {
            GaspError::Topology(format!(
                "thin arc {edge_idx}: endpoints not connected in the cut sub-mesh"
            ))
        })?;
        let positions: Vec<Vec3> = p.iter().map(|&v| verts[v as usize]).collect();
        iteration_lengths
            .push(positions.windows(2).map(|w| w[0].dist(w[1])).sum());
        let unchanged = prev_path.as_deref() == Some(&positions[..]);
        prev_path = Some(positions);
        path_idx = p;
        if unchanged {
            iteration_lengths.pop();
            break;
        }
        // 1-to-4 subdivision of triangles touching the path; neighbors with
        // split edges are divided too so the mesh stays conforming
        let on_path: std::collections::BTreeSet<u32> = path_idx.iter().copied().collect();
        let mut split_edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for t in &tris {
            if t.iter().any(|v| on_path.contains(v)) {
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                    let k = edge_key(a, b);
                    split_edges.entry(k).or_insert_with(|| {
                        verts.push(
                            (verts[k.0 as usize] + verts[k.1 as usize]) * 0.5,
                        );
                        values.push(0.5 * (values[k.0 as usize] + values[k.1 as usize]));
                        verts.len() as u32 - 1
                    });
                }
            }
        }
        if split_edges.is_empty() {
            break;
        }
        let mut next: Vec<[u32; 3]> = Vec::with_capacity(tris.len() * 2);
        for t in &tris {
            subdivide_triangle(*t, &split_edges, &mut next);
        }
        tris = next;
    }

    let mut points: Vec<Vec3> = path_idx.iter().map(|&v| verts[v as usize]).collect();
    let isovalues: Vec<f64> = path_idx.iter().map(|&v| values[v as usize]).collect();
    if approximate {
        points.insert(0, reeb.node(e.src).position);
        points.push(reeb.node(e.dst).position);
    } else {
        // exact endpoints by construction; snap to kill rounding
        *points.first_mut().unwrap() = reeb.node(e.src).position;
        *points.last_mut().unwrap() = reeb.node(e.dst).position;
    }
    let mut iso_out = isovalues;
    if approximate {
        iso_out.insert(0, reeb.node(e.src).value);
        iso_out.push(reeb.node(e.dst).value);
    }
    Ok(EmbeddedArc {
        edge: edge_idx,
        kind: ArcKind::Thin,
        points,
        isovalues: iso_out,
        iteration_lengths,
    })
}

fn subdivide_triangle(
    t: [u32; 3],
    split: &BTreeMap<(u32, u32), u32>,
    out: &mut Vec<[u32; 3]>,
) {
    let m01 = split.get(&edge_key(t[0], t[1])).copied();
    let m12 = split.get(&edge_key(t[1], t[2])).copied();
    let m20 = split.get(&edge_key(t[2], t[0])).copied();
    match (m01, m12, m20) {
        (Some(a), Some(b), Some(c)) => {
            out.push([t[0], a, c]);
            out.push([a, t[1], b]);
            out.push([c, b, t[2]]);
            out.push([a, b, c]);
        }
        (Some(a), Some(b), None) => {
            out.push([t[1], b, a]);
            out.push([t[0], a, b]);
            out.push([t[0], b, t[2]]);
        }
        (None, Some(b), Some(c)) => {
            out.push([t[2], c, b]);
            out.push([t[1], b, c]);
            out.push([t[1], c, t[0]]);
        }
        (Some(a), None, Some(c)) => {
            out.push([t[0], a, c]);
            out.push([a, t[1], c]);
            out.push([t[1], t[2], c]);
        }
        (Some(a), None, None) => {
            out.push([t[0], a, t[2]]);
            out.push([a, t[1], t[2]]);
        }
        (None, Some(b), None) => {
            out.push([t[1], b, t[0]]);
            out.push([b, t[2], t[0]]);
        }
        (None, None, Some(c)) => {
            out.push([t[2], c, t[1]]);
            out.push([c, t[0], t[1]]);
        }
        (None, None, None) => out.push(t),
    }
}

fn dijkstra_path(verts: &[Vec3], tris: &[[u32; 3]], src: u32, dst: u32) -> Option<Vec<u32>> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;
    let n = verts.len();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    {
        let mut edges: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
        for t in tris {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert(edge_key(a, b));
            }
        }
        for (a, b) in edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![u32::MAX; n];
    dist[src as usize] = 0.0;
    struct Item(f64, u32);
    impl PartialEq for Item {
        fn eq(&self, o: &Self) -> bool {
            self.cmp(o) == Ordering::Equal
        }
    }
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Item {
        fn cmp(&self, o: &Self) -> Ordering {
            o.0.partial_cmp(&self.0).unwrap().then(o.1.cmp(&self.1))
        }
    }
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, src));
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        if u == dst {
            break;
        }
        for &v in &adj[u as usize] {
            let nd = d + verts[u as usize].dist(verts[v as usize]);
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                prev[v as usize] = u;
                heap.push(Item(nd, v));
            }
        }
    }
    if dist[dst as usize].is_infinite() {
        return None;
    }
    let mut path = vec![dst];
    let mut cur = dst;
    while cur != src {
        cur = prev[cur as usize];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Checks completeness and snaps arc endpoints onto the critical points.
pub fn assemble(reeb: &ReebGraph, mut arcs: Vec<EmbeddedArc>) -> Result<EmbeddedReebGraph> {
    if arcs.len() != reeb.edges.len() {
        return Err(GaspError::Internal(format!(
            "{} arcs for {} Reeb edges",
            arcs.len(),
            reeb.edges.len()
        )));
    }
    arcs.sort_by_key(|a| a.edge);
    for (i, a) in arcs.iter_mut().enumerate() {
        if a.edge != i {
            return Err(GaspError::Internal(format!(
                "missing or duplicate arc for Reeb edge {i}"
            )));
        }
        let e = &reeb.edges[i];
        *a.points.first_mut().unwrap() = reeb.node(e.src).position;
        *a.points.last_mut().unwrap() = reeb.node(e.dst).position;
    }
    Ok(EmbeddedReebGraph { arcs })
}

/// Runs `f(0..n)` over up to `threads` workers and returns results in index
/// order; output is identical for any worker count.
pub(crate) fn run_parallel<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let threads = threads.max(1).min(n.max(1));
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    if threads <= 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = Some(f(i));
        }
    } else {
        let results: Vec<Vec<(usize, Result<T>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let f = &f;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut i = w;
                        while i < n {
                            out.push((i, f(i)));
                            i += threads;
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for batch in results {
            for (i, r) in batch {
                slots[i] = Some(r);
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for (i, slot) in slots.into_iter().enumerate() {
        match slot {
            Some(Ok(v)) => out.push(v),
            Some(Err(e)) => return Err(e),
            None => {
                return Err(GaspError::Internal(format!("worker dropped task {i}")))
            }
        }
    }
    Ok(out)
}

/// Full embedding of every Reeb arc, parallel per arc.
pub fn embed_all(
    mesh: &TriangleMesh,
    field: &ScalarField,
    reeb: &ReebGraph,
    params: &GaspParams,
    mode: GaspMode,
    threads: usize,
) -> Result<EmbeddedReebGraph> {
    params.validate()?;
    let bins = TriangleBins::build(mesh, field, params.bins);
    let cylinders = extract_cylinders(mesh, field, reeb, &bins, false)?;
    let arcs = run_parallel(reeb.edges.len(), threads, |i| {
        let e = &reeb.edges[i];
        let f_j = reeb.node(e.src).value;
        let f_k = reeb.node(e.dst).value;
        if contour_count(f_j, f_k, params.spacing).is_some() {
            embed_regular(&cylinders[i], reeb, params, mode)
        } else {
            embed_thin(mesh, field, reeb, i, &bins, params, Some(&cylinders[i]))
        }
    })?;
    assemble(reeb, arcs)
}
