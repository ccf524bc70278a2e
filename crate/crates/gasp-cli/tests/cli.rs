use std::path::Path;
use std::process::Command;

fn gasp(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gasp"))
        .args(args)
        .output()
        .unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn generate_writes_closed_obj() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("torus.obj");
    let r = gasp(&["generate", "--shape", "torus", "--resolution", "24", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let mesh = gasp_core::mesh::load_mesh(&out).unwrap();
    assert!(mesh.is_closed());
    assert_eq!(mesh.euler_characteristic(), 0);
}

#[test]
fn unsupported_shape_exits_with_input_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.obj");
    let r = gasp(&["generate", "--shape", "klein", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("unsupported shape"));
}

#[test]
fn embed_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let r = gasp(&[
        "embed", "--generate", "torus:24", "--field", "z", "--method", "gasp-boundary",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in ["reeb.json", "arcs.json", "arcs.vtk", "metrics.json"] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let (arcs, method) = gasp_core::export::load_arcs_json(&out.join("arcs.json")).unwrap();
    assert_eq!(method, "gasp-boundary");
    assert_eq!(arcs.arcs.len(), 4);
}

#[test]
fn embed_from_mesh_file_matches_generated() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("t.obj");
    gasp(&["generate", "--shape", "torus", "--resolution", "24", "--out", obj.to_str().unwrap()]);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let r1 = gasp(&["embed", "--mesh", obj.to_str().unwrap(), "--method", "gb",
        "--out-dir", a.to_str().unwrap()]);
    let r2 = gasp(&["embed", "--generate", "torus:24", "--method", "gb",
        "--out-dir", b.to_str().unwrap()]);
    assert!(r1.status.success() && r2.status.success());
    // OBJ round-trip keeps full precision, so the pipelines agree byte for byte
    assert_eq!(read(&a.join("arcs.json")), read(&b.join("arcs.json")));
}

#[test]
fn arcs_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}"));
        let r = gasp(&[
            "embed", "--generate", "torus:24", "--method", "gasp-interior",
            "--threads", threads, "--out-dir", out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        outputs.push(read(&out.join("arcs.json")));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn metrics_recompute_from_saved_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let r = gasp(&[
        "embed", "--generate", "sphere:24", "--method", "gasp-boundary",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let (arcs, _) = gasp_core::export::load_arcs_json(&out.join("arcs.json")).unwrap();
    let saved: serde_json::Value = serde_json::from_str(&read(&out.join("metrics.json"))).unwrap();
    let mesh = gasp_core::mesh::generate(gasp_core::mesh::Shape::Sphere, 24).unwrap();
    let index = gasp_core::mesh::SpatialIndex::build(mesh);
    let report = gasp_core::metrics::evaluate(
        &index, &arcs.arcs, "gasp-boundary", "z", Some(gasp_core::Axis::Z),
        arcs.arcs.len(), 1e-2, 1,
    )
    .unwrap();
    let again = serde_json::to_value(&report.means).unwrap();
    assert_eq!(saved["means"], again);
}

#[test]
fn compare_identical_methods_has_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let r = gasp(&[
        "compare", "--generate", "sphere:24", "--method-a", "gb", "--method-b", "gb",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("compare.json"))).unwrap();
    for (key, val) in v["delta"].as_object().unwrap() {
        assert_eq!(*val, serde_json::json!(0.0), "{key}");
    }
}

#[test]
fn geodesic_field_leaves_gradient_deviation_null() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let r = gasp(&[
        "compare", "--generate", "sphere:24", "--field", "geo:top",
        "--method-a", "gasp-boundary", "--method-b", "gb",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("compare.json"))).unwrap();
    assert!(v["a"]["means"]["gradient_deviation"].is_null());
    assert!(v["b"]["means"]["gradient_deviation"].is_null());
    assert!(v["delta"]["gradient_deviation"].is_null());
}

#[test]
fn bench_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let r = gasp(&[
        "bench", "--shape", "torus", "--resolutions", "12,16,24,32,44",
        "--methods", "gasp-boundary", "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = read(&out.join("bench.csv"));
    assert_eq!(csv.lines().count(), 6);
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("bench.json"))).unwrap();
    let report = &v["reports"][0];
    assert_eq!(report["cases"].as_array().unwrap().len(), 5);
    assert!(report["r_squared"].as_f64().unwrap() <= 1.0);
    assert_eq!(v["config"]["resolutions"].as_array().unwrap().len(), 5);
}
