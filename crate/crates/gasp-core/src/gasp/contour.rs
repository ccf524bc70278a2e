//! Marching-triangles isocontours on a cylinder, chained into one closed
//! loop, plus arc-length sampling helpers used by candidate generation.

use std::collections::BTreeMap;

use crate::decomp::Cylinder;
use crate::error::{GaspError, Result};
use crate::geom::Vec3;
use crate::mesh::edge_key;

/// One closed isocontour. `points` is the loop in marching order; the edge
/// back from the last point to the first is implicit.
#[derive(Debug, Clone)]
pub struct Contour {
    pub isovalue: f64,
    pub points: Vec<Vec3>,
}

impl Contour {
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].dist(self.points[(i + 1) % n]))
            .sum()
    }

    /// Cumulative arc length before each point (starts at 0).
    pub fn arc_positions(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut s = 0.0;
        for i in 0..self.points.len() {
            out.push(s);
            s += self.points[i].dist(self.points[(i + 1) % self.points.len()]);
        }
        out
    }

    pub fn centroid(&self) -> Vec3 {
        let mut c = Vec3::default();
        for &p in &self.points {
            c += p;
        }
        c / self.points.len() as f64
    }

    /// Index of the loop point nearest to `p` (smallest index wins ties).
    pub fn nearest_point(&self, p: Vec3) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &q) in self.points.iter().enumerate() {
            let d = q.dist(p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// Extracts the single closed contour of a cylinder at `iso`. A vertex
/// counts as below when its value <= iso, except at the upper cut level
/// where the test is strict so the rim itself is traced.
pub fn marching_contour(cyl: &Cylinder, iso: f64) -> Result<Contour> {
    let strict = iso >= cyl.hi;
    let below = |v: u32| {
        let f = cyl.values[v as usize];
        if strict {
            f < iso
        } else {
            f <= iso
        }
    };
    // crossed edges of the cylinder and the triangles on each
    let mut edge_tris: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
    for (t, tri) in cyl.triangles.iter().enumerate() {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if below(a) != below(b) {
                edge_tris.entry(edge_key(a, b)).or_default().push(t as u32);
            }
        }
    }
    if edge_tris.is_empty() {
        return Err(GaspError::Internal(format!(
            "no contour at isovalue {iso} on arc {}",
            cyl.edge
        )));
    }
    let cut_point = |(a, b): (u32, u32)| -> Vec3 {
        let fa = cyl.values[a as usize];
        let fb = cyl.values[b as usize];
        let t = ((iso - fa) / (fb - fa)).clamp(0.0, 1.0);
        cyl.vertices[a as usize].lerp(cyl.vertices[b as usize], t)
    };
    // triangle -> its (exactly two) crossed edges
    let mut tri_edges: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for (&e, tris) in &edge_tris {
        for &t in tris {
            tri_edges.entry(t).or_default().push(e);
        }
    }
    for (t, es) in &tri_edges {
        if es.len() != 2 {
            return Err(GaspError::Internal(format!(
                "triangle {t} crossed {} times at isovalue {iso} on arc {}",
                es.len(),
                cyl.edge
            )));
        }
    }

    // walk the loop starting from the smallest crossed edge
    let start = *edge_tris.keys().next().unwrap();
    let start_tris = &edge_tris[&start];
    if start_tris.len() != 2 {
        return Err(GaspError::Topology(format!(
            "open contour at isovalue {iso} on arc {}",
            cyl.edge
        )));
    }
    let mut cur_tri = *start_tris.iter().min().unwrap();
    let mut cur_edge = start;
    let mut points: Vec<Vec3> = Vec::new();
    let mut visited = 0usize;
    loop {
        points.push(cut_point(cur_edge));
        visited += 1;
        let es = &tri_edges[&cur_tri];
        let next_edge = if es[0] == cur_edge { es[1] } else { es[0] };
        if next_edge == start {
            break;
        }
        let tris = &edge_tris[&next_edge];
        if tris.len() != 2 {
            return Err(GaspError::Topology(format!(
                "open contour at isovalue {iso} on arc {}",
                cyl.edge
            )));
        }
        cur_tri = if tris[0] == cur_tri { tris[1] } else { tris[0] };
        cur_edge = next_edge;
        if visited > edge_tris.len() {
            return Err(GaspError::Internal(format!(
                "contour walk did not close at isovalue {iso} on arc {}",
                cyl.edge
            )));
        }
    }
    if visited < edge_tris.len() {
        return Err(GaspError::Topology(format!(
            "more than one contour loop at isovalue {iso} on arc {} \
             ({} of {} crossings reached)",
            cyl.edge,
            visited,
            edge_tris.len()
        )));
    }
    // drop zero-length steps from cuts landing exactly on shared vertices
    let mut dedup: Vec<Vec3> = Vec::with_capacity(points.len());
    for p in points {
        if dedup.last().map_or(true, |&q| q.dist(p) > 1e-15) {
            dedup.push(p);
        }
    }
    while dedup.len() > 1 && dedup[0].dist(*dedup.last().unwrap()) <= 1e-15 {
        dedup.pop();
    }
    Ok(Contour {
        isovalue: iso,
        points: dedup,
    })
}
