//! Arc quality metrics (containment, length, gradient alignment, smoothness)
//! and the embedding scaling benchmark.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{GaspError, Result};
use crate::field::Axis;
use crate::gasp::{embed_all, run_parallel, EmbeddedArc, GaspMode, GaspParams};
use crate::geom::Vec3;
use crate::mesh::{Classification, SpatialIndex, TriangleMesh};
use crate::reeb::compute_reeb_graph;
use crate::ScalarField;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcMetrics {
    pub edge: usize,
    /// fraction of arc length strictly outside the solid, in [0, 1]
    pub outside_ratio: f64,
    /// trapezoid-rule area between outside sub-segments and the surface
    pub outside_area: f64,
    /// polyline length over endpoint distance; None for coincident endpoints
    pub length_ratio: Option<f64>,
    /// off-axis movement over on-axis movement; None for non-height fields
    pub gradient_deviation: Option<f64>,
    pub smoothness_m: f64,
    pub smoothness_alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphMeans {
    pub outside_ratio: f64,
    pub outside_area: f64,
    pub length_ratio: Option<f64>,
    pub gradient_deviation: Option<f64>,
    pub smoothness_m: f64,
    pub smoothness_alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: String,
    pub field: String,
    pub triangles: usize,
    pub edges: usize,
    pub tolerance: f64,
    pub arcs: Vec<ArcMetrics>,
    pub means: GraphMeans,
}

/// Splits each polyline segment into pieces no longer than `max_len` and
/// classifies the split points against the surface.
fn classified_subsegments(
    points: &[Vec3],
    index: &SpatialIndex,
    max_len: f64,
    tolerance: f64,
) -> Result<Vec<(Vec3, Vec3, Classification, Classification)>> {
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let pieces = (len / max_len).ceil().max(1.0) as usize;
        let mut prev = a;
        let mut prev_c = index.classify_point(a, tolerance)?;
        for i in 1..=pieces {
            let p = a.lerp(b, i as f64 / pieces as f64);
            let c = index.classify_point(p, tolerance)?;
            out.push((prev, p, prev_c, c));
            prev = p;
            prev_c = c;
        }
    }
    Ok(out)
}

/// Fraction of the arc's length lying outside the solid. A sub-segment counts
/// as outside only when both endpoints classify Outside; on-surface points
/// count as inside so surface-constrained arcs score zero.
pub fn outside_ratio(points: &[Vec3], index: &SpatialIndex, tolerance: f64) -> Result<f64> {
    let segs = classified_subsegments(points, index, tolerance * 10.0, tolerance)?;
    let mut total = 0.0;
    let mut outside = 0.0;
    for (a, b, ca, cb) in segs {
        let l = a.dist(b);
        total += l;
        if ca == Classification::Outside && cb == Classification::Outside {
            outside += l;
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(outside / total)
}

/// Area between the outside portions of the arc and the surface: each outside
/// sub-segment of length l with endpoint surface distances d1, d2 contributes
/// l*(d1+d2)/2.
pub fn outside_area(points: &[Vec3], index: &SpatialIndex, tolerance: f64) -> Result<f64> {
    let segs = classified_subsegments(points, index, tolerance * 10.0, tolerance)?;
    let mut area = 0.0;
    for (a, b, ca, cb) in segs {
        if ca == Classification::Outside && cb == Classification::Outside {
            let d1 = index.distance_to_surface(a);
            let d2 = index.distance_to_surface(b);
            area += a.dist(b) * (d1 + d2) * 0.5;
        }
    }
    Ok(area)
}

pub fn polyline_length(points: &[Vec3]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Polyline length over straight endpoint distance (>= 1); None when the
/// endpoints coincide.
pub fn length_ratio(points: &[Vec3]) -> Option<f64> {
    let chord = points.first()?.dist(*points.last()?);
    if chord == 0.0 {
        return None;
    }
    // the triangle inequality guarantees >= 1; summing nearly collinear
    // segments can round a hair below it
    Some((polyline_length(points) / chord).max(1.0))
}

/// Off-axis over on-axis absolute movement for height fields: sums |delta|
/// per coordinate across segments and divides the two non-principal totals
/// by the principal one. Infinite when the arc never moves along the axis.
pub fn gradient_deviation(points: &[Vec3], axis: Axis) -> f64 {
    let mut sums = [0.0f64; 3];
    for w in points.windows(2) {
        let d = w[1] - w[0];
        sums[0] += d.x.abs();
        sums[1] += d.y.abs();
        sums[2] += d.z.abs();
    }
    let p = axis as usize;
    let principal = sums[p];
    let off = sums[(p + 1) % 3] + sums[(p + 2) % 3];
    if principal == 0.0 {
        return f64::INFINITY;
    }
    off / principal
}

/// Mean tangent of the turning angle at interior vertices, angles clamped to
/// just under a right angle; alpha = 1/(1+M). Straight arcs give (0, 1).
pub fn smoothness(points: &[Vec3]) -> (f64, f64) {
    let dirs: Vec<Vec3> = points
        .windows(2)
        .filter(|w| w[0].dist(w[1]) > 0.0)
        .map(|w| (w[1] - w[0]).normalized())
        .collect();
    if dirs.len() < 2 {
        return (0.0, 1.0);
    }
    let clamp_hi = std::f64::consts::FRAC_PI_2 - 1e-6;
    let mut sum = 0.0;
    for w in dirs.windows(2) {
        let cos = w[0].dot(w[1]).clamp(-1.0, 1.0);
        let theta = cos.acos().clamp(0.0, clamp_hi);
        sum += theta.tan();
    }
    let m = sum / (dirs.len() - 1) as f64;
    (m, 1.0 / (1.0 + m))
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

pub fn graph_means(arcs: &[ArcMetrics]) -> GraphMeans {
    GraphMeans {
        outside_ratio: mean(arcs.iter().map(|a| a.outside_ratio)),
        outside_area: mean(arcs.iter().map(|a| a.outside_area)),
        length_ratio: mean_opt(arcs.iter().map(|a| a.length_ratio)),
        gradient_deviation: mean_opt(arcs.iter().map(|a| a.gradient_deviation)),
        smoothness_m: mean(arcs.iter().map(|a| a.smoothness_m)),
        smoothness_alpha: mean(arcs.iter().map(|a| a.smoothness_alpha)),
    }
}

/// Evaluates every arc against the surface. `height_axis` enables the
/// gradient-deviation column; geodesic fields leave it empty.
pub fn evaluate(
    index: &SpatialIndex,
    arcs: &[EmbeddedArc],
    method: &str,
    field_label: &str,
    height_axis: Option<Axis>,
    edges: usize,
    tolerance: f64,
    threads: usize,
) -> Result<MetricsReport> {
    if tolerance <= 0.0 {
        return Err(GaspError::Input("tolerance must be positive".into()));
    }
    let per_arc = run_parallel(arcs.len(), threads, |i| {
        let arc = &arcs[i];
        let (m, alpha) = smoothness(&arc.points);
        Ok(ArcMetrics {
            edge: arc.edge,
            outside_ratio: outside_ratio(&arc.points, index, tolerance)?,
            outside_area: outside_area(&arc.points, index, tolerance)?,
            length_ratio: length_ratio(&arc.points),
            gradient_deviation: height_axis.map(|ax| gradient_deviation(&arc.points, ax)),
            smoothness_m: m,
            smoothness_alpha: alpha,
        })
    })?;
    let means = graph_means(&per_arc);
    Ok(MetricsReport {
        method: method.to_string(),
        field: field_label.to_string(),
        triangles: index.mesh().triangles.len(),
        edges,
        tolerance,
        arcs: per_arc,
        means,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchCase {
    pub name: String,
    pub triangles: usize,
    pub edges: usize,
    /// scaling variable: triangles times Reeb edges
    pub work: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub mode: String,
    pub cases: Vec<BenchCase>,
    /// least-squares line seconds = slope * work + intercept
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Times end-to-end embedding over a family of (name, mesh, field) cases and
/// fits runtime against triangles*edges. Requires at least 5 cases spanning a
/// 10x work range.
pub fn run_benchmark(
    cases: &[(String, TriangleMesh, ScalarField)],
    params: &GaspParams,
    mode: GaspMode,
    threads: usize,
) -> Result<BenchReport> {
    if cases.len() < 5 {
        return Err(GaspError::Input(format!(
            "benchmark needs at least 5 cases, got {}",
            cases.len()
        )));
    }
    let mut out = Vec::new();
    for (name, mesh, field) in cases {
        let start = Instant::now();
        let reeb = compute_reeb_graph(mesh, field)?;
        let embedded = embed_all(mesh, field, &reeb, params, mode, threads)?;
        let seconds = start.elapsed().as_secs_f64();
        assert_eq!(embedded.arcs.len(), reeb.edges.len());
        out.push(BenchCase {
            name: name.clone(),
            triangles: mesh.triangles.len(),
            edges: reeb.edges.len(),
            work: (mesh.triangles.len() * reeb.edges.len()) as f64,
            seconds,
        });
    }
    let works: Vec<f64> = out.iter().map(|c| c.work).collect();
    let lo = works.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = works.iter().cloned().fold(0.0, f64::max);
    if hi < 10.0 * lo {
        return Err(GaspError::Input(format!(
            "benchmark cases must span a 10x work range, got {lo:.0}..{hi:.0}"
        )));
    }
    let secs: Vec<f64> = out.iter().map(|c| c.seconds).collect();
    let (slope, intercept, r_squared) = fit_line(&works, &secs);
    Ok(BenchReport {
        mode: match mode {
            GaspMode::Boundary => "gasp-boundary".to_string(),
            GaspMode::Interior => "gasp-interior".to_string(),
        },
        cases: out,
        slope,
        intercept,
        r_squared,
    })
}
