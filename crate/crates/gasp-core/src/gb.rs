//! Geometric-barycenter baseline: straight Reeb edges sampled evenly,
//! samples moved to the barycenter of the arc's own contour, then Laplacian
//! smoothing with fixed endpoints.

use crate::decomp::{extract_cylinders, TriangleBins};
use crate::error::{GaspError, Result};
use crate::field::ScalarField;
use crate::gasp::contour::marching_contour;
use crate::gasp::{assemble, run_parallel, ArcKind, EmbeddedArc, EmbeddedReebGraph};
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;
use crate::reeb::ReebGraph;

#[derive(Debug, Clone)]
pub struct GbParams {
    /// segments each straight edge is divided into
    pub sampling: usize,
    /// smoothing iterations
    pub smoothing: usize,
    /// value bins for the rough cut
    pub bins: u32,
}

impl Default for GbParams {
    fn default() -> GbParams {
        GbParams {
            sampling: 15,
            smoothing: 15,
            bins: 20,
        }
    }
}

impl GbParams {
    pub fn validate(&self) -> Result<()> {
        if self.sampling < 1 {
            return Err(GaspError::Input("sampling must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(GaspError::Input("bins must be at least 1".into()));
        }
        Ok(())
    }
}

/// Simultaneous Laplacian smoothing: every interior point moves to the
/// midpoint of its neighbors; endpoints stay fixed.
pub fn smooth_polyline(points: &mut [Vec3], iterations: usize) {
    if points.len() < 3 {
        return;
    }
    let mut next = points.to_vec();
    for _ in 0..iterations {
        for i in 1..points.len() - 1 {
            next[i] = (points[i - 1] + points[i + 1]) * 0.5;
        }
        points[1..].clone_from_slice(&next[1..]);
        let last = points.len() - 1;
        points[last] = next[last];
    }
}

pub fn gb_embed(
    mesh: &TriangleMesh,
    field: &ScalarField,
    reeb: &ReebGraph,
    params: &GbParams,
    threads: usize,
) -> Result<EmbeddedReebGraph> {
    params.validate()?;
    let bins = TriangleBins::build(mesh, field, params.bins);
    let cylinders = extract_cylinders(mesh, field, reeb, &bins, false)?;
    let arcs = run_parallel(reeb.edges.len(), threads, |i| {
        let e = &reeb.edges[i];
        let f_j = reeb.node(e.src).value;
        let f_k = reeb.node(e.dst).value;
        let cyl = &cylinders[i];
        let mut points = vec![reeb.node(e.src).position];
        let mut isovalues = vec![f_j];
        for s in 1..params.sampling {
            let frac = s as f64 / params.sampling as f64;
            let iso = (f_j + (f_k - f_j) * frac).clamp(cyl.lo, cyl.hi);
            let c = marching_contour(cyl, iso)?;
            points.push(c.centroid());
            isovalues.push(iso);
        }
        points.push(reeb.node(e.dst).position);
        isovalues.push(f_k);
        smooth_polyline(&mut points, params.smoothing);
        Ok(EmbeddedArc {
            edge: i,
            kind: ArcKind::Barycenter,
            points,
            isovalues,
            iteration_lengths: Vec::new(),
        })
    })?;
    assemble(reeb, arcs)
}
