//! Analytic closed test meshes. All generators return normalized,
//! consistently outward-oriented meshes.

use std::collections::HashMap;

use super::{weld_vertices, TriangleMesh};
use crate::error::{GaspError, Result};
use crate::geom::{vec3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Sphere,
    Torus,
    ModifiedTorus,
    Genus2,
    Cone,
}

impl std::str::FromStr for Shape {
    type Err = GaspError;
    fn from_str(s: &str) -> Result<Shape> {
        match s {
            "sphere" => Ok(Shape::Sphere),
            "torus" => Ok(Shape::Torus),
            "modified-torus" => Ok(Shape::ModifiedTorus),
            "genus2" => Ok(Shape::Genus2),
            "cone" => Ok(Shape::Cone),
            other => Err(GaspError::Input(format!(
                "unsupported shape '{other}' (expected sphere|torus|modified-torus|genus2|cone)"
            ))),
        }
    }
}

pub fn generate(shape: Shape, resolution: u32) -> Result<TriangleMesh> {
    if resolution < 8 {
        return Err(GaspError::Input(format!(
            "resolution must be at least 8, got {resolution}"
        )));
    }
    let mesh = match shape {
        Shape::Sphere => sphere(resolution),
        Shape::Torus => torus(resolution),
        Shape::Cone => cone(resolution),
        Shape::ModifiedTorus => marching_tets(
            resolution as usize,
            vec3(-1.0, -0.5, -1.0),
            vec3(1.3, 0.5, 1.0),
            modified_torus_sdf,
        ),
        Shape::Genus2 => marching_tets(
            resolution as usize,
            vec3(-1.4, -0.45, -0.9),
            vec3(1.4, 0.45, 0.9),
            genus2_sdf,
        ),
    }?;
    mesh.normalize()
}

/// UV-grid sphere. `resolution` segments around the equator, poles welded.
fn sphere(res: u32) -> Result<TriangleMesh> {
    let m = res as usize;
    let rings = (res / 2).max(3) as usize;
    let mut v = vec![vec3(0.0, 0.0, -1.0)];
    for j in 1..rings {
        let theta = std::f64::consts::PI * j as f64 / rings as f64;
        for i in 0..m {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            v.push(vec3(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                -theta.cos(),
            ));
        }
    }
    let north = v.len() as u32;
    v.push(vec3(0.0, 0.0, 1.0));
    let ring = |j: usize, i: usize| (1 + (j - 1) * m + i % m) as u32;
    let mut t = Vec::new();
    for i in 0..m {
        t.push([0, ring(1, i + 1), ring(1, i)]);
    }
    for j in 1..rings - 1 {
        for i in 0..m {
            let (a, b, c, d) = (ring(j, i), ring(j, i + 1), ring(j + 1, i + 1), ring(j + 1, i));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    for i in 0..m {
        t.push([north, ring(rings - 1, i), ring(rings - 1, i + 1)]);
    }
    oriented(v, t)
}

/// Grid torus with the hole axis along y; height (z) is a Morse function with
/// exactly 4 critical points. `resolution` x `resolution/2` grid.
fn torus(res: u32) -> Result<TriangleMesh> {
    let m = res as usize;
    let n = (res / 2).max(8) as usize;
    let (big_r, small_r) = (0.5, 0.25);
    let mut v = Vec::with_capacity(m * n);
    for i in 0..m {
        let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        for j in 0..n {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let rad = big_r + small_r * phi.cos();
            v.push(vec3(rad * theta.cos(), small_r * phi.sin(), rad * theta.sin()));
        }
    }
    let at = |i: usize, j: usize| ((i % m) * n + j % n) as u32;
    let mut t = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            let (a, b, c, d) = (at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    oriented(v, t)
}

/// Closed cone: apex up, unit base disk at the bottom.
fn cone(res: u32) -> Result<TriangleMesh> {
    let m = res as usize;
    let mut v = vec![vec3(0.0, 0.0, 1.0), vec3(0.0, 0.0, -1.0)];
    for i in 0..m {
        let phi = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        v.push(vec3(phi.cos(), phi.sin(), -1.0));
    }
    let ring = |i: usize| (2 + i % m) as u32;
    let mut t = Vec::new();
    for i in 0..m {
        t.push([0, ring(i), ring(i + 1)]);
        t.push([1, ring(i + 1), ring(i)]);
    }
    oriented(v, t)
}

fn torus_sdf_at(p: Vec3, center: Vec3, big_r: f64, small_r: f64) -> f64 {
    let q = p - center;
    let ring = (q.x * q.x + q.z * q.z).sqrt() - big_r;
    (ring * ring + q.y * q.y).sqrt() - small_r
}

/// Torus with a spherical bump on the outer equator: extra critical points of
/// the height field inside the saddle band.
fn modified_torus_sdf(p: Vec3) -> f64 {
    let torus = torus_sdf_at(p, vec3(0.0, 0.0, 0.0), 0.5, 0.25);
    let bump = (p - vec3(0.85, 0.0, 0.0)).norm() - 0.2;
    torus.min(bump)
}

/// Union of two overlapping tori: a closed genus-2 surface.
fn genus2_sdf(p: Vec3) -> f64 {
    let a = torus_sdf_at(p, vec3(-0.5, 0.0, 0.0), 0.45, 0.2);
    let b = torus_sdf_at(p, vec3(0.5, 0.0, 0.0), 0.45, 0.2);
    a.min(b)
}

/// Fixes global orientation (outward normals) by the signed-volume sign, then
/// validates the mesh.
fn oriented(v: Vec<Vec3>, mut t: Vec<[u32; 3]>) -> Result<TriangleMesh> {
    let volume: f64 = t
        .iter()
        .map(|tri| {
            let a = v[tri[0] as usize];
            let b = v[tri[1] as usize];
            let c = v[tri[2] as usize];
            a.dot(b.cross(c)) / 6.0
        })
        .sum();
    if volume < 0.0 {
        for tri in t.iter_mut() {
            tri.swap(1, 2);
        }
    }
    TriangleMesh::new(v, t)
}

/// Marching tetrahedra over a regular grid (Kuhn 6-tet cube split), zero level
/// set of `sdf`. Produces a watertight mesh for SDFs bounded away from zero on
/// the box faces.
fn marching_tets(
    res: usize,
    lo: Vec3,
    hi: Vec3,
    sdf: impl Fn(Vec3) -> f64,
) -> Result<TriangleMesh> {
    let n = res + 1;
    let step = vec3(
        (hi.x - lo.x) / res as f64,
        (hi.y - lo.y) / res as f64,
        (hi.z - lo.z) / res as f64,
    );
    let gid = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    let mut values = vec![0.0f64; n * n * n];
    let mut points = vec![Vec3::default(); n * n * n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let p = vec3(
                    lo.x + step.x * x as f64,
                    lo.y + step.y * y as f64,
                    lo.z + step.z * z as f64,
                );
                let mut f = sdf(p);
                if f.abs() < 1e-12 {
                    f = 1e-12; // keep the level set off grid vertices
                }
                points[gid(x, y, z)] = p;
                values[gid(x, y, z)] = f;
            }
        }
    }
    // Kuhn subdivision: 6 tets per cube sharing the main diagonal.
    const TETS: [[usize; 4]; 6] = [
        [0, 1, 3, 7],
        [0, 3, 2, 7],
        [0, 2, 6, 7],
        [0, 6, 4, 7],
        [0, 4, 5, 7],
        [0, 5, 1, 7],
    ];
    let corner = |x: usize, y: usize, z: usize, c: usize| {
        gid(x + (c >> 2 & 1), y + (c >> 1 & 1), z + (c & 1))
    };
    let mut edge_verts: HashMap<(usize, usize), u32> = HashMap::new();
    let mut verts: Vec<Vec3> = Vec::new();
    let mut tris: Vec<[u32; 3]> = Vec::new();
    let mut cut = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> u32 {
        let key = if a < b { (a, b) } else { (b, a) };
        *edge_verts.entry(key).or_insert_with(|| {
            let (fa, fb) = (values[a], values[b]);
            let t = fa / (fa - fb);
            verts.push(points[a].lerp(points[b], t));
            (verts.len() - 1) as u32
        })
    };
    for x in 0..res {
        for y in 0..res {
            for z in 0..res {
                for tet in TETS {
                    let ids = [
                        corner(x, y, z, tet[0]),
                        corner(x, y, z, tet[1]),
                        corner(x, y, z, tet[2]),
                        corner(x, y, z, tet[3]),
                    ];
                    let inside: Vec<usize> = (0..4).filter(|&k| values[ids[k]] < 0.0).collect();
                    let outside: Vec<usize> = (0..4).filter(|&k| values[ids[k]] >= 0.0).collect();
                    match inside.len() {
                        1 => {
                            let a = ids[inside[0]];
                            let p = cut(a, ids[outside[0]], &mut verts);
                            let q = cut(a, ids[outside[1]], &mut verts);
                            let r = cut(a, ids[outside[2]], &mut verts);
                            tris.push([p, q, r]);
                        }
                        3 => {
                            let a = ids[outside[0]];
                            let p = cut(ids[inside[0]], a, &mut verts);
                            let q = cut(ids[inside[1]], a, &mut verts);
                            let r = cut(ids[inside[2]], a, &mut verts);
                            tris.push([p, q, r]);
                        }
                        2 => {
                            let (a, b) = (ids[inside[0]], ids[inside[1]]);
                            let (c, d) = (ids[outside[0]], ids[outside[1]]);
                            let ac = cut(a, c, &mut verts);
                            let ad = cut(a, d, &mut verts);
                            let bc = cut(b, c, &mut verts);
                            let bd = cut(b, d, &mut verts);
                            tris.push([ac, ad, bd]);
                            tris.push([ac, bd, bc]);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    let (v, mut t) = weld_vertices(verts, tris, 1e-9);
    // degenerate welded triangles traverse an edge both ways and would poison
    // the orientation flood fill
    t.retain(|tri| tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2]);
    orient_outward(&v, &mut t);
    TriangleMesh::new(v, t)
}

/// Makes triangle windings consistent by flood fill over shared edges, then
/// flips whole components whose signed volume is negative so normals point
/// outward. The per-triangle SDF gradient is too noisy for sliver triangles.
fn orient_outward(verts: &[Vec3], tris: &mut [[u32; 3]]) {
    let mut edge_map: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = if a < b { (a, b) } else { (b, a) };
            edge_map.entry(key).or_default().push(i);
        }
    }
    let has_directed = |t: &[u32; 3], a: u32, b: u32| {
        [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].contains(&(a, b))
    };
    let mut seen = vec![false; tris.len()];
    for start in 0..tris.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut component = vec![start];
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            let tri = tris[i];
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = if a < b { (a, b) } else { (b, a) };
                for &j in &edge_map[&key] {
                    if seen[j] {
                        continue;
                    }
                    seen[j] = true;
                    // the neighbor must traverse the shared edge oppositely
                    if has_directed(&tris[j], a, b) {
                        tris[j].swap(1, 2);
                    }
                    component.push(j);
                    queue.push(j);
                }
            }
        }
        let volume: f64 = component
            .iter()
            .map(|&i| {
                let [a, b, c] = [
                    verts[tris[i][0] as usize],
                    verts[tris[i][1] as usize],
                    verts[tris[i][2] as usize],
                ];
                a.dot(b.cross(c)) / 6.0
            })
            .sum();
        if volume < 0.0 {
            for &i in &component {
                tris[i].swap(1, 2);
            }
        }
    }
}
