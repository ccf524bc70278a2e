//! On-disk artifact formats: Reeb graph and arc JSON (schema-versioned,
//! round-trippable), legacy-VTK polylines, metrics/compare reports and
//! benchmark CSV.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{GaspError, Result};
use crate::gasp::{ArcKind, EmbeddedArc, EmbeddedReebGraph};
use crate::geom::Vec3;
use crate::metrics::{BenchReport, MetricsReport};
use crate::reeb::ReebGraph;

pub const SCHEMA: u32 = 1;

fn write_pretty(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| GaspError::Internal(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(GaspError::from)
}

pub fn write_reeb_json(path: &Path, reeb: &ReebGraph) -> Result<()> {
    let nodes: Vec<_> = reeb
        .nodes
        .iter()
        .map(|n| {
            json!({
                "id": n.id,
                "vertex": n.vertex,
                "position": n.position.to_array(),
                "value": n.value,
                "kind": n.kind.label(),
            })
        })
        .collect();
    let edges: Vec<_> = reeb
        .edges
        .iter()
        .map(|e| json!({"src": e.src, "dst": e.dst, "instance": e.instance}))
        .collect();
    write_pretty(
        path,
        &json!({
            "schema": SCHEMA,
            "nodes": nodes,
            "edges": edges,
            "loops": reeb.loops(),
            "components": reeb.components(),
        }),
    )
}

#[derive(Serialize, Deserialize)]
struct ArcDoc {
    edge: usize,
    kind: String,
    points: Vec<[f64; 3]>,
    isovalues: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    iteration_lengths: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ArcsDoc {
    schema: u32,
    method: String,
    params: serde_json::Value,
    arcs: Vec<ArcDoc>,
}

pub fn write_arcs_json(
    path: &Path,
    graph: &EmbeddedReebGraph,
    method: &str,
    params: serde_json::Value,
) -> Result<()> {
    let doc = ArcsDoc {
        schema: SCHEMA,
        method: method.to_string(),
        params,
        arcs: graph
            .arcs
            .iter()
            .map(|a| ArcDoc {
                edge: a.edge,
                kind: a.kind.label().to_string(),
                points: a.points.iter().map(|p| p.to_array()).collect(),
                isovalues: a.isovalues.clone(),
                iteration_lengths: a.iteration_lengths.clone(),
            })
            .collect(),
    };
    let value = serde_json::to_value(&doc)
        .map_err(|e| GaspError::Internal(format!("serializing arcs: {e}")))?;
    write_pretty(path, &value)
}

fn parse_kind(s: &str) -> Result<ArcKind> {
    match s {
        "regular-boundary" => Ok(ArcKind::RegularBoundary),
        "regular-interior" => Ok(ArcKind::RegularInterior),
        "thin" => Ok(ArcKind::Thin),
        "barycenter" => Ok(ArcKind::Barycenter),
        other => Err(GaspError::Input(format!("unknown arc kind '{other}'"))),
    }
}

/// Reads arcs.json back; returns the graph plus the stored method name.
pub fn load_arcs_json(path: &Path) -> Result<(EmbeddedReebGraph, String)> {
    let text = fs::read_to_string(path)?;
    let doc: ArcsDoc = serde_json::from_str(&text)
        .map_err(|e| GaspError::Input(format!("parsing {}: {e}", path.display())))?;
    if doc.schema != SCHEMA {
        return Err(GaspError::Input(format!(
            "unsupported arcs schema {}",
            doc.schema
        )));
    }
    let arcs = doc
        .arcs
        .into_iter()
        .map(|a| {
            Ok(EmbeddedArc {
                edge: a.edge,
                kind: parse_kind(&a.kind)?,
                points: a.points.iter().map(|&p| Vec3::from_array(p)).collect(),
                isovalues: a.isovalues,
                iteration_lengths: a.iteration_lengths,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((EmbeddedReebGraph { arcs }, doc.method))
}

/// Legacy ASCII VTK polydata: one polyline per arc, isovalue as point data.
pub fn write_arcs_vtk(path: &Path, graph: &EmbeddedReebGraph) -> Result<()> {
    let total: usize = graph.arcs.iter().map(|a| a.points.len()).sum();
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\nembedded reeb graph arcs\nASCII\nDATASET POLYDATA\n");
    s.push_str(&format!("POINTS {total} double\n"));
    for arc in &graph.arcs {
        for p in &arc.points {
            s.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
        }
    }
    let size: usize = graph.arcs.iter().map(|a| a.points.len() + 1).sum();
    s.push_str(&format!("LINES {} {size}\n", graph.arcs.len()));
    let mut base = 0usize;
    for arc in &graph.arcs {
        s.push_str(&format!("{}", arc.points.len()));
        for i in 0..arc.points.len() {
            s.push_str(&format!(" {}", base + i));
        }
        s.push('\n');
        base += arc.points.len();
    }
    s.push_str(&format!("POINT_DATA {total}\nSCALARS isovalue double 1\nLOOKUP_TABLE default\n"));
    for arc in &graph.arcs {
        for v in &arc.isovalues {
            s.push_str(&format!("{v}\n"));
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(s.as_bytes())?;
    Ok(())
}

pub fn write_metrics_json(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut value = serde_json::to_value(report)
        .map_err(|e| GaspError::Internal(format!("serializing metrics: {e}")))?;
    value["schema"] = json!(SCHEMA);
    write_pretty(path, &value)
}

/// Side-by-side per-graph means with deltas (b minus a).
pub fn write_compare_json(path: &Path, a: &MetricsReport, b: &MetricsReport) -> Result<()> {
    let delta = |x: f64, y: f64| y - x;
    let delta_opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => Some(y - x),
        _ => None,
    };
    let value = json!({
        "schema": SCHEMA,
        "a": {"method": a.method, "means": a.means},
        "b": {"method": b.method, "means": b.means},
        "delta": {
            "outside_ratio": delta(a.means.outside_ratio, b.means.outside_ratio),
            "outside_area": delta(a.means.outside_area, b.means.outside_area),
            "length_ratio": delta_opt(a.means.length_ratio, b.means.length_ratio),
            "gradient_deviation": delta_opt(a.means.gradient_deviation, b.means.gradient_deviation),
            "smoothness_m": delta(a.means.smoothness_m, b.means.smoothness_m),
            "smoothness_alpha": delta(a.means.smoothness_alpha, b.means.smoothness_alpha),
        },
    });
    write_pretty(path, &value)
}

pub fn write_bench_json(path: &Path, reports: &[BenchReport], config: serde_json::Value) -> Result<()> {
    let value = json!({"schema": SCHEMA, "config": config, "reports": reports});
    write_pretty(path, &value)
}

pub fn write_bench_csv(path: &Path, reports: &[BenchReport]) -> Result<()> {
    let mut s = String::from("mode,case,triangles,edges,work,seconds,slope,r_squared\n");
    for r in reports {
        for c in &r.cases {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.mode, c.name, c.triangles, c.edges, c.work, c.seconds, r.slope, r.r_squared
            ));
        }
    }
    fs::write(path, s).map_err(GaspError::from)
}
