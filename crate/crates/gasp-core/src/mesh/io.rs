//! ASCII OBJ / PLY loading and OBJ output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{weld_vertices, TriangleMesh};
use crate::error::{GaspError, Result};
use crate::geom::{vec3, Vec3};

const WELD_EPS: f64 = 1e-9;

/// Loads an ASCII OBJ or PLY file. Polygons are fan-triangulated, duplicate
/// vertices within 1e-9 welded and degenerate triangles dropped.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let reader = BufReader::new(File::open(path)?);
    let (vertices, faces) = match ext.as_str() {
        "obj" => parse_obj(reader)?,
        "ply" => parse_ply(reader)?,
        other => {
            return Err(GaspError::Input(format!(
                "unsupported mesh format '{other}' (expected .obj or .ply)"
            )))
        }
    };
    build(vertices, faces)
}

fn build(vertices: Vec<Vec3>, faces: Vec<Vec<u32>>) -> Result<TriangleMesh> {
    let mut triangles = Vec::new();
    for f in faces {
        if f.len() < 3 {
            return Err(GaspError::Input(format!(
                "face with fewer than 3 vertices: {:?}",
                f
            )));
        }
        for k in 1..f.len() - 1 {
            triangles.push([f[0], f[k], f[k + 1]]);
        }
    }
    let (v, t) = weld_vertices(vertices, triangles, WELD_EPS);
    TriangleMesh::new(v, t)
}

fn parse_obj(reader: impl BufRead) -> Result<(Vec<Vec3>, Vec<Vec<u32>>)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [0.0f64; 3];
                for x in c.iter_mut() {
                    *x = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| obj_err(lineno, "bad vertex record"))?;
                }
                vertices.push(vec3(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in it {
                    let idx_tok = tok.split('/').next().unwrap_or("");
                    let idx: i64 = idx_tok
                        .parse()
                        .map_err(|_| obj_err(lineno, "bad face index"))?;
                    let idx = if idx < 0 {
                        vertices.len() as i64 + idx
                    } else {
                        idx - 1
                    };
                    if idx < 0 || idx as usize >= vertices.len() {
                        return Err(obj_err(lineno, "face index out of range"));
                    }
                    face.push(idx as u32);
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

fn obj_err(lineno: usize, msg: &str) -> GaspError {
    GaspError::Input(format!("OBJ parse failure at line {}: {msg}", lineno + 1))
}

fn parse_ply(mut reader: impl BufRead) -> Result<(Vec<Vec3>, Vec<Vec<u32>>)> {
    let mut line = String::new();
    let read_line = |reader: &mut dyn BufRead, line: &mut String| -> Result<bool> {
        line.clear();
        Ok(reader.read_line(line)? > 0)
    };
    read_line(&mut reader, &mut line)?;
    if line.trim() != "ply" {
        return Err(GaspError::Input("PLY parse failure: missing 'ply' magic".into()));
    }
    let mut n_verts = 0usize;
    let mut n_faces = 0usize;
    let mut elements: Vec<(String, usize)> = Vec::new();
    loop {
        if !read_line(&mut reader, &mut line)? {
            return Err(GaspError::Input("PLY parse failure: truncated header".into()));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["format", fmt, _] if *fmt != "ascii" => {
                return Err(GaspError::Input("binary PLY is not supported".into()))
            }
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| GaspError::Input("PLY parse failure: bad element count".into()))?;
                elements.push((name.to_string(), count));
                match *name {
                    "vertex" => n_verts = count,
                    "face" => n_faces = count,
                    _ => {}
                }
            }
            ["end_header"] => break,
            _ => {}
        }
    }
    let mut vertices = Vec::with_capacity(n_verts);
    let mut faces = Vec::with_capacity(n_faces);
    for (name, count) in elements {
        for i in 0..count {
            if !read_line(&mut reader, &mut line)? {
                return Err(GaspError::Input(format!(
                    "PLY parse failure: truncated {name} data at record {i}"
                )));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match name.as_str() {
                "vertex" => {
                    if toks.len() < 3 {
                        return Err(GaspError::Input("PLY parse failure: short vertex record".into()));
                    }
                    let mut c = [0.0f64; 3];
                    for (k, x) in c.iter_mut().enumerate() {
                        *x = toks[k]
                            .parse()
                            .map_err(|_| GaspError::Input("PLY parse failure: bad vertex coord".into()))?;
                    }
                    vertices.push(vec3(c[0], c[1], c[2]));
                }
                "face" => {
                    let n: usize = toks
                        .first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| GaspError::Input("PLY parse failure: bad face record".into()))?;
                    if toks.len() < n + 1 {
                        return Err(GaspError::Input("PLY parse failure: short face record".into()));
                    }
                    let mut face = Vec::with_capacity(n);
                    for tok in &toks[1..=n] {
                        let idx: usize = tok
                            .parse()
                            .map_err(|_| GaspError::Input("PLY parse failure: bad face index".into()))?;
                        if idx >= vertices.len() {
                            return Err(GaspError::Input("PLY parse failure: face index out of range".into()));
                        }
                        face.push(idx as u32);
                    }
                    faces.push(face);
                }
                _ => {} // skip unknown element payloads
            }
        }
    }
    Ok((vertices, faces))
}

pub fn write_obj(path: impl AsRef<Path>, mesh: &TriangleMesh) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}
