//! Command-line pipeline: mesh -> scalar field -> Reeb graph -> embedded arcs
//! -> metric reports, plus mesh generation and the scaling benchmark.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gasp_core::export::{
    write_arcs_json, write_arcs_vtk, write_bench_csv, write_bench_json, write_compare_json,
    write_metrics_json, write_reeb_json,
};
use gasp_core::field::{geodesic_field, height_field};
use gasp_core::gasp::{embed_all, EmbeddedReebGraph, GaspMode, GaspParams};
use gasp_core::gb::{gb_embed, GbParams};
use gasp_core::mesh::{generate, load_mesh, write_obj, Shape, SpatialIndex};
use gasp_core::metrics::{evaluate, run_benchmark, MetricsReport};
use gasp_core::reeb::{compute_reeb_graph, ReebGraph};
use gasp_core::{FieldSpec, GaspError, Result, ScalarField, TriangleMesh};

#[derive(Parser)]
#[command(name = "gasp", about = "Reeb graph arc embedding on triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an analytic closed mesh as OBJ
    Generate {
        /// sphere | torus | modified-torus | genus2 | cone
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 48)]
        resolution: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full pipeline and write reeb.json, arcs.{json,vtk}, metrics.json
    Embed {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run two methods on the same mesh and field, write compare.json
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        method_a: Method,
        #[arg(long, value_enum)]
        method_b: Method,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Time embedding over a generated resolution family, write bench.{csv,json}
    Bench {
        #[arg(long, default_value = "torus")]
        shape: String,
        /// comma-separated generator resolutions
        #[arg(long, default_value = "24,32,48,64,96")]
        resolutions: String,
        /// comma-separated methods to time
        #[arg(long, default_value = "gasp-boundary,gasp-interior")]
        methods: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// OBJ/OFF mesh file
    #[arg(long, conflicts_with = "generate")]
    mesh: Option<PathBuf>,
    /// analytic mesh as shape:resolution, e.g. torus:48
    #[arg(long)]
    generate: Option<String>,
    /// x | y | z | geo:top | geo:bottom | geo:left | geo:right | geo:front | geo:back
    #[arg(long, default_value = "z")]
    field: String,
}

#[derive(Args)]
struct ParamArgs {
    /// contour spacing as a fraction of the field range
    #[arg(long, default_value_t = 0.05)]
    spacing: f64,
    /// interior-candidate clearance from the contour
    #[arg(long, default_value_t = 0.05)]
    buffer: f64,
    /// straight-arc segments per edge (barycenter method)
    #[arg(long, default_value_t = 15)]
    sampling: usize,
    /// smoothing iterations (barycenter method)
    #[arg(long, default_value_t = 15)]
    smoothing: usize,
    /// value bins for the triangle rough cut
    #[arg(long, default_value_t = 20)]
    bins: u32,
    /// candidates per contour level
    #[arg(long, default_value_t = 40)]
    budget: usize,
    /// refinement passes per arc
    #[arg(long, default_value_t = 2)]
    refinements: u32,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// surface-distance tolerance for containment metrics; must absorb the
    /// sag of arc chords between consecutive contour samples
    #[arg(long, default_value_t = 1e-2)]
    tolerance: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    GaspBoundary,
    GaspInterior,
    Gb,
}

impl Method {
    fn label(self, p: &ParamArgs) -> String {
        match self {
            Method::GaspBoundary => "gasp-boundary".into(),
            Method::GaspInterior => "gasp-interior".into(),
            Method::Gb => format!("gb-{}/{}", p.sampling, p.smoothing),
        }
    }
}

impl ParamArgs {
    fn gasp(&self) -> GaspParams {
        GaspParams {
            spacing: self.spacing,
            buffer: self.buffer,
            budget: self.budget,
            refinements: self.refinements,
            bins: self.bins,
            ..GaspParams::default()
        }
    }

    fn gb(&self) -> GbParams {
        GbParams {
            sampling: self.sampling,
            smoothing: self.smoothing,
            bins: self.bins,
        }
    }

    fn json(&self, method: Method) -> serde_json::Value {
        match method {
            Method::Gb => json!({
                "sampling": self.sampling,
                "smoothing": self.smoothing,
                "bins": self.bins,
            }),
            _ => json!({
                "spacing": self.spacing,
                "buffer": self.buffer,
                "budget": self.budget,
                "refinements": self.refinements,
                "bins": self.bins,
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(GaspError::Input("threads must be at least 1".into()));
        }
        if self.tolerance <= 0.0 {
            return Err(GaspError::Input("tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn resolve_mesh(input: &InputArgs) -> Result<TriangleMesh> {
    match (&input.mesh, &input.generate) {
        (Some(path), None) => load_mesh(path),
        (None, Some(spec)) => {
            let (shape, res) = spec
                .split_once(':')
                .ok_or_else(|| GaspError::Input(format!("expected shape:resolution, got '{spec}'")))?;
            let resolution: u32 = res
                .parse()
                .map_err(|_| GaspError::Input(format!("bad resolution '{res}'")))?;
            generate(shape.parse()?, resolution)
        }
        _ => Err(GaspError::Input(
            "exactly one of --mesh or --generate is required".into(),
        )),
    }
}

fn make_field(mesh: &TriangleMesh, spec: FieldSpec) -> Result<ScalarField> {
    let field = match spec {
        FieldSpec::Height(axis) => height_field(mesh, axis),
        FieldSpec::Geodesic(dir) => geodesic_field(mesh, dir)?,
    };
    Ok(field.perturb_distinct())
}

fn run_method(
    mesh: &TriangleMesh,
    field: &ScalarField,
    reeb: &ReebGraph,
    method: Method,
    params: &ParamArgs,
) -> Result<EmbeddedReebGraph> {
    match method {
        Method::GaspBoundary => {
            embed_all(mesh, field, reeb, &params.gasp(), GaspMode::Boundary, params.threads)
        }
        Method::GaspInterior => {
            embed_all(mesh, field, reeb, &params.gasp(), GaspMode::Interior, params.threads)
        }
        Method::Gb => gb_embed(mesh, field, reeb, &params.gb(), params.threads),
    }
}

fn measure(
    index: &SpatialIndex,
    graph: &EmbeddedReebGraph,
    method: Method,
    spec: FieldSpec,
    edges: usize,
    params: &ParamArgs,
) -> Result<MetricsReport> {
    evaluate(
        index,
        &graph.arcs,
        &method.label(params),
        spec.label(),
        spec.is_height(),
        edges,
        params.tolerance,
        params.threads,
    )
}

fn cmd_embed(input: &InputArgs, method: Method, params: &ParamArgs, out_dir: &Path) -> Result<()> {
    params.validate()?;
    let mesh = resolve_mesh(input)?;
    let spec: FieldSpec = input.field.parse()?;
    let field = make_field(&mesh, spec)?;
    let reeb = compute_reeb_graph(&mesh, &field)?;
    let graph = run_method(&mesh, &field, &reeb, method, params)?;
    std::fs::create_dir_all(out_dir)?;
    write_reeb_json(&out_dir.join("reeb.json"), &reeb)?;
    write_arcs_json(
        &out_dir.join("arcs.json"),
        &graph,
        &method.label(params),
        params.json(method),
    )?;
    write_arcs_vtk(&out_dir.join("arcs.vtk"), &graph)?;
    let index = SpatialIndex::build(mesh);
    let report = measure(&index, &graph, method, spec, reeb.edges.len(), params)?;
    write_metrics_json(&out_dir.join("metrics.json"), &report)?;
    println!(
        "{} arcs embedded with {}; mean outside ratio {:.4}",
        graph.arcs.len(),
        method.label(params),
        report.means.outside_ratio
    );
    Ok(())
}

fn cmd_compare(
    input: &InputArgs,
    method_a: Method,
    method_b: Method,
    params: &ParamArgs,
    out_dir: &Path,
) -> Result<()> {
    params.validate()?;
    let mesh = resolve_mesh(input)?;
    let spec: FieldSpec = input.field.parse()?;
    let field = make_field(&mesh, spec)?;
    let reeb = compute_reeb_graph(&mesh, &field)?;
    let graph_a = run_method(&mesh, &field, &reeb, method_a, params)?;
    let graph_b = run_method(&mesh, &field, &reeb, method_b, params)?;
    let index = SpatialIndex::build(mesh);
    let report_a = measure(&index, &graph_a, method_a, spec, reeb.edges.len(), params)?;
    let report_b = measure(&index, &graph_b, method_b, spec, reeb.edges.len(), params)?;
    std::fs::create_dir_all(out_dir)?;
    write_compare_json(&out_dir.join("compare.json"), &report_a, &report_b)?;
    println!(
        "compared {} vs {} over {} arcs",
        method_a.label(params),
        method_b.label(params),
        graph_a.arcs.len()
    );
    Ok(())
}

fn cmd_bench(
    shape: &str,
    resolutions: &str,
    methods: &str,
    params: &ParamArgs,
    out_dir: &Path,
) -> Result<()> {
    params.validate()?;
    let shape: Shape = shape.parse()?;
    let res: Vec<u32> = resolutions
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| GaspError::Input(format!("bad resolution '{s}'")))
        })
        .collect::<Result<_>>()?;
    let cases: Vec<(String, TriangleMesh, ScalarField)> = res
        .iter()
        .map(|&r| {
            let mesh = generate(shape, r)?;
            let field = height_field(&mesh, gasp_core::Axis::Z).perturb_distinct();
            Ok((format!("{shape:?}-{r}").to_lowercase(), mesh, field))
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for m in methods.split(',') {
        let mode = match m.trim() {
            "gasp-boundary" => GaspMode::Boundary,
            "gasp-interior" => GaspMode::Interior,
            other => {
                return Err(GaspError::Input(format!(
                    "benchmark method must be gasp-boundary or gasp-interior, got '{other}'"
                )))
            }
        };
        reports.push(run_benchmark(&cases, &params.gasp(), mode, params.threads)?);
    }
    std::fs::create_dir_all(out_dir)?;
    let config = json!({
        "shape": format!("{shape:?}").to_lowercase(),
        "resolutions": res,
        "params": params.json(Method::GaspBoundary),
        "threads": params.threads,
    });
    write_bench_json(&out_dir.join("bench.json"), &reports, config)?;
    write_bench_csv(&out_dir.join("bench.csv"), &reports)?;
    for r in &reports {
        println!("{}: slope {:.3e}, R^2 {:.3}", r.mode, r.slope, r.r_squared);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { shape, resolution, out } => {
            let mesh = generate(shape.parse()?, resolution)?;
            write_obj(&out, &mesh)?;
            println!(
                "{} vertices, {} triangles -> {}",
                mesh.vertices.len(),
                mesh.triangles.len(),
                out.display()
            );
            Ok(())
        }
        Command::Embed { input, method, params, out_dir } => {
            cmd_embed(&input, method, &params, &out_dir)
        }
        Command::Compare { input, method_a, method_b, params, out_dir } => {
            cmd_compare(&input, method_a, method_b, &params, &out_dir)
        }
        Command::Bench { shape, resolutions, methods, params, out_dir } => {
            cmd_bench(&shape, &resolutions, &methods, &params, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
