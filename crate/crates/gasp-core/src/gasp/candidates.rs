//! Candidate point generation for the leveled path graph: on-contour
//! (boundary) and in-contour grid (interior) variants, each with a coarse
//! pass and windowed refinement passes.

use crate::error::{GaspError, Result};
use crate::gasp::contour::Contour;
use crate::geom::{symmetric_eigen_3x3, Vec3};

/// Boundary candidates: marching vertices sampled uniformly by arc length.
/// With a window (refinement), only vertices within the along-loop window
/// centered at `center` take part; the window spans 4 coarse gaps.
pub fn boundary_candidates(
    contour: &Contour,
    budget: usize,
    window: Option<Vec3>,
) -> Vec<Vec3> {
    let pts = &contour.points;
    let n = pts.len();
    match window {
        None => sample_uniform(pts, &contour.arc_positions(), contour.length(), budget),
        Some(center) => {
            let total = contour.length();
            let half = 2.0 * total / budget as f64; // window = 4 gaps
            let pos = contour.arc_positions();
            let c = contour.nearest_point(center);
            let center_s = pos[c];
            let mut keep: Vec<Vec3> = Vec::new();
            let mut keep_pos: Vec<f64> = Vec::new();
            for i in 0..n {
                let mut d = (pos[i] - center_s).abs();
                d = d.min(total - d); // along-loop distance
                if d <= half {
                    keep.push(pts[i]);
                    keep_pos.push(pos[i]);
                }
            }
            // at least the nearest vertex is always within the window
            sample_uniform(&keep, &keep_pos, 0.0, budget)
        }
    }
}

/// Picks up to `budget` of the given points, spread by arc position.
fn sample_uniform(pts: &[Vec3], pos: &[f64], total: f64, budget: usize) -> Vec<Vec3> {
    if pts.len() <= budget {
        return pts.to_vec();
    }
    let total = if total > 0.0 {
        total
    } else {
        // open run of vertices: spread over its positions
        let lo = pos.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = pos.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        return sample_by_targets(pts, pos, lo, hi - lo, budget);
    };
    sample_by_targets(pts, pos, pos[0], total, budget)
}

fn sample_by_targets(pts: &[Vec3], pos: &[f64], start: f64, span: f64, budget: usize) -> Vec<Vec3> {
    let mut picked: Vec<usize> = Vec::with_capacity(budget);
    for k in 0..budget {
        let target = start + span * k as f64 / budget as f64;
        // nearest vertex by arc position (positions are sorted)
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &s) in pos.iter().enumerate() {
            let d = (s - target).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        if picked.last() != Some(&best) {
            picked.push(best);
        }
    }
    picked.dedup();
    picked.into_iter().map(|i| pts[i]).collect()
}

/// The least-squares plane of a contour: centroid plus the two principal
/// directions of the point cloud.
pub struct ContourPlane {
    pub origin: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl ContourPlane {
    pub fn project(&self, p: Vec3) -> (f64, f64) {
        ((p - self.origin).dot(self.u), (p - self.origin).dot(self.v))
    }

    pub fn lift(&self, x: f64, y: f64) -> Vec3 {
        self.origin + self.u * x + self.v * y
    }
}

/// Fits the plane; `None` when the loop is degenerate (nearly collinear),
/// in which case the caller falls back to boundary candidates.
pub fn fit_plane(contour: &Contour) -> Option<ContourPlane> {
    let c = contour.centroid();
    let mut m = [[0.0f64; 3]; 3];
    for &p in &contour.points {
        let d = p - c;
        let a = d.to_array();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += a[i] * a[j];
            }
        }
    }
    let (vals, vecs) = symmetric_eigen_3x3(m);
    if vals[1] <= 1e-12 * vals[0].max(1e-300) {
        return None;
    }
    Some(ContourPlane {
        origin: c,
        u: vecs[0],
        v: vecs[1],
    })
}

fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        if (y1 > p.1) != (y2 > p.1) {
            let x = x1 + (p.1 - y1) / (y2 - y1) * (x2 - x1);
            if p.0 < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn point_segment_distance_2d(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ax, ay) = a;
    let (dx, dy) = (b.0 - ax, b.1 - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - ax) * dx + (p.1 - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (ax + t * dx, ay + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

pub fn polygon_distance(p: (f64, f64), poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance_2d(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Result of interior candidate generation, including the grid geometry the
/// next refinement pass needs.
pub struct InteriorCandidates {
    pub points: Vec<Vec3>,
    pub cell: f64,
}

/// Interior candidates: a regular grid over the projected polygon, keeping
/// points inside it and at least `buffer` away from it, lifted back onto
/// the fitted plane. Refinement shrinks the cell 4x inside a 3x3-cell
/// window around the previous path point.
///
/// Returns Ok(None) when the plane is degenerate or every grid point (and
/// the centroid) is filtered out; the caller then uses boundary candidates.
pub fn interior_candidates(
    contour: &Contour,
    buffer: f64,
    budget: usize,
    window: Option<(Vec3, f64)>,
) -> Result<Option<InteriorCandidates>> {
    if budget < 4 {
        return Err(GaspError::Input("candidate budget must be at least 4".into()));
    }
    let plane = match fit_plane(contour) {
        Some(p) => p,
        None => return Ok(None),
    };
    let poly: Vec<(f64, f64)> = contour.points.iter().map(|&p| plane.project(p)).collect();
    let xs: Vec<f64> = poly.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = poly.iter().map(|p| p.1).collect();
    let (x0, x1) = minmax(&xs);
    let (y0, y1) = minmax(&ys);
    let w = x1 - x0;
    let h = y1 - y0;
    if w <= 0.0 || h <= 0.0 {
        return Ok(None);
    }

    let (cell, gx0, gy0, gx1, gy1) = match window {
        None => {
            let cell = (w * h / budget as f64).sqrt();
            (cell, x0, y0, x1, y1)
        }
        Some((prev, prev_cell)) => {
            let (px, py) = plane.project(prev);
            let half = 1.5 * prev_cell;
            (prev_cell / 4.0, px - half, py - half, px + half, py + half)
        }
    };

    let mut points: Vec<Vec3> = Vec::new();
    let nx = ((gx1 - gx0) / cell).ceil() as usize;
    let ny = ((gy1 - gy0) / cell).ceil() as usize;
    for j in 0..ny {
        for i in 0..nx {
            let x = gx0 + (i as f64 + 0.5) * cell;
            let y = gy0 + (j as f64 + 0.5) * cell;
            if point_in_polygon((x, y), &poly) && polygon_distance((x, y), &poly) >= buffer {
                points.push(plane.lift(x, y));
            }
        }
    }
    if points.is_empty() {
        // fallback: the polygon centroid, if it qualifies at all
        let c2: (f64, f64) = {
            let n = poly.len() as f64;
            (
                poly.iter().map(|p| p.0).sum::<f64>() / n,
                poly.iter().map(|p| p.1).sum::<f64>() / n,
            )
        };
        if point_in_polygon(c2, &poly) {
            points.push(plane.lift(c2.0, c2.1));
        } else {
            return Ok(None);
        }
    }
    if points.len() > budget {
        // deterministic even thinning by index
        let step = points.len() as f64 / budget as f64;
        points = (0..budget)
            .map(|k| points[(k as f64 * step) as usize])
            .collect();
    }
    Ok(Some(InteriorCandidates { points, cell }))
}

fn minmax(v: &[f64]) -> (f64, f64) {
    (
        v.iter().cloned().fold(f64::INFINITY, f64::min),
        v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;

    fn circle(n: usize, r: f64) -> Contour {
        Contour {
            isovalue: 0.0,
            points: (0..n)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    vec3(r * a.cos(), r * a.sin(), 0.3)
                })
                .collect(),
        }
    }

    #[test]
    fn boundary_under_budget_returns_all() {
        let c = circle(30, 1.0);
        let got = boundary_candidates(&c, 40, None);
        assert_eq!(got.len(), 30);
    }

    #[test]
    fn boundary_sampling_is_even() {
        let c = circle(400, 1.0);
        let got = boundary_candidates(&c, 40, None);
        assert_eq!(got.len(), 40);
        // consecutive arc gaps within 2x of each other
        let mut gaps: Vec<f64> = Vec::new();
        for i in 0..got.len() {
            gaps.push(got[i].dist(got[(i + 1) % got.len()]));
        }
        let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi <= 2.0 * lo + 1e-12, "gaps {lo}..{hi}");
    }

    #[test]
    fn boundary_window_focuses_near_center() {
        let c = circle(400, 1.0);
        let center = vec3(1.0, 0.0, 0.3);
        let got = boundary_candidates(&c, 40, Some(center));
        assert!(!got.is_empty());
        let total = c.length();
        let half = 2.0 * total / 40.0;
        for p in &got {
            // all candidates within the along-loop window (chord <= arc)
            assert!(p.dist(center) <= half + 1e-9);
        }
    }

    #[test]
    fn interior_respects_buffer_against_brute_force() {
        let c = circle(100, 1.0);
        let b = 0.3;
        let got = interior_candidates(&c, b, 40, None).unwrap().unwrap();
        assert!(!got.points.is_empty());
        let plane = fit_plane(&c).unwrap();
        let poly: Vec<(f64, f64)> = c.points.iter().map(|&p| plane.project(p)).collect();
        for p in &got.points {
            let q = plane.project(*p);
            let d = polygon_distance(q, &poly);
            assert!(d >= b - 1e-9, "candidate at distance {d}");
            // circle geometry: radius <= 1 - B (loose for polygon faceting)
            let r = (q.0 * q.0 + q.1 * q.1).sqrt();
            assert!(r <= 1.0 - b + 1e-6);
        }
    }

    #[test]
    fn interior_overlarge_buffer_falls_back_to_centroid() {
        let c = circle(100, 1.0);
        let got = interior_candidates(&c, 1.5, 40, None).unwrap().unwrap();
        assert_eq!(got.points.len(), 1);
        let p = got.points[0];
        assert!((p - vec3(0.0, 0.0, 0.3)).norm() < 1e-9);
    }

    #[test]
    fn interior_collinear_loop_degenerates() {
        let c = Contour {
            isovalue: 0.0,
            points: (0..10).map(|i| vec3(i as f64, 0.0, 0.0)).collect(),
        };
        assert!(interior_candidates(&c, 0.0, 40, None).unwrap().is_none());
    }

    #[test]
    fn interior_refinement_shrinks_cell() {
        let c = circle(100, 1.0);
        let coarse = interior_candidates(&c, 0.05, 40, None).unwrap().unwrap();
        let prev = coarse.points[0];
        let fine = interior_candidates(&c, 0.05, 40, Some((prev, coarse.cell)))
            .unwrap()
            .unwrap();
        assert!((fine.cell - coarse.cell / 4.0).abs() < 1e-12);
        assert!(!fine.points.is_empty());
        for p in &fine.points {
            assert!(p.dist(prev) <= 1.5 * coarse.cell * 2f64.sqrt() + 1e-9);
        }
    }

    #[test]
    fn interior_candidates_lie_on_plane() {
        let c = circle(64, 0.8);
        let got = interior_candidates(&c, 0.1, 40, None).unwrap().unwrap();
        for p in &got.points {
            assert!((p.z - 0.3).abs() < 1e-9);
        }
    }
}
