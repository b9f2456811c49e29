use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pgc_core::classify::n_constant_generator;
use pgc_core::frenet::{frames_from_jets, Causality};
use pgc_core::numeric::UniformGrid;
use pgc_core::pipeline::{self, analyze, CurveSource, OriginChoice, Status, VerifyRow};
use pgc_core::reconstruct::{check_torsion_sign, compare_closed_forms, reconstruct, round_trip};
use pgc_core::{Analysis, Tolerances, Vector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{float, to_csv, to_json, write_atomic};
use crate::spec::{odd, CurveSpec};
use crate::svg::{self, Projection};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "pgc", version, about = "Frenet apparatus and classification of spacelike curves in pseudo-Galilean space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose and classify a curve; writes a JSON report.
    Analyze(CommonArgs),
    /// Curve from intrinsic curvature and torsion, with a round-trip check.
    Reconstruct {
        #[command(flatten)]
        common: CommonArgs,
        /// Also evaluate the closed-form coefficient solutions (needs one-signed torsion).
        #[arg(long)]
        mcoeffs: bool,
    },
    /// Residual table for every identity that applies to the curve.
    Verify(CommonArgs),
    /// SVG projection of the curve.
    Plot(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Curve specification (JSON).
    pub spec: PathBuf,
    /// JSON report path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "yz")]
    pub projection: Projection,
    /// Tolerance overrides (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `x,y,z`, or `search` to pick the origin that makes m2^2 - m1^2 flattest.
    #[arg(long, value_parser = parse_origin)]
    pub origin: Option<OriginArg>,
    /// Grid size; even values are bumped to the next odd number.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OriginArg {
    At(Vector),
    Search,
}

fn parse_origin(text: &str) -> Result<OriginArg, String> {
    if text == "search" {
        return Ok(OriginArg::Search);
    }
    let parts: Vec<&str> = text.split(',').collect();
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    match v.as_slice() {
        [x, y, z] => Ok(OriginArg::At(Vector::new(*x, *y, *z))),
        _ => Err(format!("expected x,y,z or `search`, got {} values", v.len())),
    }
}

/// Runs one command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pgc: error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Reconstruct { common, mcoeffs } => cmd_reconstruct(&common, mcoeffs),
        Command::Verify(a) => cmd_verify(&a),
        Command::Plot(a) => cmd_plot(&a),
    }
}

struct Context {
    spec: CurveSpec,
    tol: Tolerances,
    n: usize,
    origin: OriginChoice<f64>,
}

fn load(args: &CommonArgs) -> Result<Context, CliError> {
    let spec = CurveSpec::load(&args.spec)?;
    let tol = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Spec(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Spec(format!("config, line {} column {}: {e}", e.line(), e.column())))?
        }
        None => Tolerances::default(),
    };
    let n = match args.samples {
        Some(n) => odd(n)?,
        None => spec.samples,
    };
    let origin = match args.origin {
        Some(OriginArg::At(v)) => OriginChoice::Fixed(v),
        Some(OriginArg::Search) => OriginChoice::Search,
        None => OriginChoice::Fixed(spec.origin),
    };
    Ok(Context { spec, tol, n, origin })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Input echo; sample rows are summarized by count.
fn input_echo(spec: &CurveSpec) -> Value {
    let mut v = serde_json::to_value(&spec.file).unwrap_or(Value::Null);
    if let Some(rows) = &spec.file.points {
        v["points"] = json!({ "rows": rows.len() });
    }
    v
}

fn grid_json(g: &UniformGrid<f64>) -> Value {
    json!({ "a": g.a, "b": g.b, "n": g.n })
}

fn vec_json(v: &Vector) -> Value {
    json!([v.x, v.y, v.z])
}

fn range(xs: impl Iterator<Item = f64>) -> [f64; 2] {
    xs.fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], v| [lo.min(v), hi.max(v)])
}

fn header(ctx: &Context, command: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool".into(), json!("pgc"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("input".into(), input_echo(&ctx.spec));
    m.insert("config".into(), serde_json::to_value(ctx.tol).unwrap_or(Value::Null));
    m
}

fn run_analysis(ctx: &Context) -> Result<Analysis, CliError> {
    Ok(analyze(&ctx.spec.source, ctx.n, ctx.origin, &ctx.tol)?)
}

fn analysis_json(ctx: &Context, a: &Analysis) -> Value {
    let mut m = header(ctx, "analyze");
    m.insert("grid".into(), grid_json(&a.grid));
    m.insert(
        "origin".into(),
        json!({
            "point": vec_json(&a.report.origin),
            "mode": if matches!(ctx.origin, OriginChoice::Search) { "search" } else { "fixed" },
        }),
    );
    m.insert(
        "frenet".into(),
        json!({
            "kappa": range(a.frames.iter().map(|f| f.kappa)),
            "tau": range(a.frames.iter().map(|f| f.tau)),
            "eps": a.frames.first().map(|f| f.eps.as_i8()).unwrap_or(0),
            "causality": a.causality,
            "quadrature_backed": a.quadrature_backed,
        }),
    );
    let d = &a.decomposition;
    m.insert(
        "decomposition".into(),
        json!({
            "c0": a.report.c0,
            "reconstruction_error": d.reconstruction_error,
            "m0": range(d.m0.iter().copied()),
            "m1": range(d.m1.iter().copied()),
            "m2": range(d.m2.iter().copied()),
            "q": range(d.q.iter().copied()),
        }),
    );
    let mut classification = serde_json::to_value(&a.report).unwrap_or(Value::Null);
    if let Value::Object(c) = &mut classification {
        c.remove("warnings");
        c.remove("origin");
    }
    m.insert("classification".into(), classification);
    m.insert("warnings".into(), json!(a.report.warnings));
    Value::Object(m)
}

fn cmd_analyze(args: &CommonArgs) -> Result<(), CliError> {
    let ctx = load(args)?;
    let a = run_analysis(&ctx)?;
    if let Some(p) = &args.csv {
        let d = &a.decomposition;
        let rows = (0..d.s.len()).map(|i| {
            let f = &a.frames[i];
            vec![d.s[i], f.kappa, f.tau, d.m0[i], d.m1[i], d.m2[i], d.q[i], d.m0[i] * d.m0[i] / d.q[i]]
        });
        write_atomic(p, &to_csv(&["s", "kappa", "tau", "m0", "m1", "m2", "q", "rho"], rows))?;
    }
    if let Some(p) = &args.svg {
        write_atomic(p, &plot_svg(&ctx.spec.name, &a.positions, args.projection, Some(&a)))?;
    }
    emit(args.out.as_deref(), &to_json(&analysis_json(&ctx, &a))?)
}

#[derive(Serialize)]
struct RoundTripJson {
    n: usize,
    kappa_err: f64,
    tau_err: f64,
}

fn cmd_reconstruct(args: &CommonArgs, mcoeffs: bool) -> Result<(), CliError> {
    let ctx = load(args)?;
    let CurveSource::Intrinsic(spec) = &ctx.spec.source else {
        return Err(CliError::Spec("field `form`: reconstruct needs \"intrinsic\" input".into()));
    };
    let rc = reconstruct(spec, ctx.n)?;
    if let Some(p) = &args.csv {
        let rows = rc.alpha.iter().zip(rc.grid.nodes()).map(|(a, s)| vec![s, a.x, a.y, a.z]);
        write_atomic(p, &to_csv(&["s", "x", "y", "z"], rows))?;
    }
    if let Some(p) = &args.svg {
        write_atomic(p, &plot_svg(&ctx.spec.name, &rc.alpha, args.projection, None))?;
    }
    let rt = round_trip(spec, ctx.n, ctx.tol.adm_eps)?;
    let mut m = header(&ctx, "reconstruct");
    m.insert("grid".into(), grid_json(&rc.grid));
    m.insert(
        "round_trip".into(),
        serde_json::to_value(RoundTripJson { n: rt.n, kappa_err: rt.kappa_err, tau_err: rt.tau_err }).unwrap_or(Value::Null),
    );
    m.insert(
        "endpoints".into(),
        json!({
            "start": vec_json(&rc.alpha[0]),
            "end": vec_json(&rc.alpha[rc.alpha.len() - 1]),
        }),
    );
    let mut warnings = Vec::<String>::new();
    if mcoeffs {
        let sign = check_torsion_sign(spec, &rc.grid, ctx.tol.tau_eps)?;
        let checks = compare_closed_forms(spec, &rc.grid, ctx.tol.tau_eps)?;
        m.insert(
            "mcoeffs".into(),
            json!({
                "torsion_sign": sign.as_i8(),
                "closed_forms": checks,
            }),
        );
        warnings.push(
            "closed-form coefficients: the variant with +1/2 e^-t Q in m2 does not solve the coefficient system; \
             all variants are listed with their residuals"
                .into(),
        );
        let c = ctx.spec.constants();
        if let Some(c4) = c.c4 {
            let g = n_constant_generator(&spec.tau, c4, c.c5, &rc.grid)?;
            let q: Vec<f64> = g.m1.iter().zip(&g.m2).map(|(a, b)| (b - a) * (b + a)).collect();
            let dev = q.iter().fold(0.0f64, |acc, v| acc.max((v + c4).abs()));
            m.insert(
                "n_constant_generator".into(),
                json!({
                    "c4": c4,
                    "c5": c.c5,
                    "m1": range(g.m1.iter().copied()),
                    "m2": range(g.m2.iter().copied()),
                    "sup_q_plus_c4": dev,
                }),
            );
        }
    }
    m.insert("warnings".into(), json!(warnings));
    emit(args.out.as_deref(), &to_json(&Value::Object(m))?)
}

/// Plain-text table, one identity per line.
pub fn verify_table(rows: &[VerifyRow]) -> String {
    let width = rows.iter().map(|r| r.identity.len()).max().unwrap_or(8).max(8);
    let mut s = format!("{:<width$}  {:>24}  {:>24}  {}\n", "identity", "sup", "threshold", "status");
    for r in rows {
        let sup = r.sup.map(float).unwrap_or_else(|| "-".into());
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        };
        s.push_str(&format!("{:<width$}  {:>24}  {:>24}  {}", r.identity, sup, float(r.threshold), status));
        if let Some(n) = &r.note {
            s.push_str(&format!("  ({n})"));
        }
        s.push('\n');
    }
    s
}

fn cmd_verify(args: &CommonArgs) -> Result<(), CliError> {
    let ctx = load(args)?;
    let a = run_analysis(&ctx)?;
    let rows = pipeline::verify(&ctx.spec.source, &a, &ctx.tol)?;
    if let Some(p) = &args.out {
        let mut m = header(&ctx, "verify");
        m.insert("grid".into(), grid_json(&a.grid));
        m.insert("rows".into(), serde_json::to_value(&rows).unwrap_or(Value::Null));
        write_atomic(p, &to_json(&Value::Object(m))?)?;
    }
    if let Some(p) = &args.csv {
        let mut s = String::from("identity,sup,threshold,status\n");
        for r in &rows {
            let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            s.push_str(&format!(
                "\"{}\",{},{},{}\n",
                r.identity,
                r.sup.map(float).unwrap_or_default(),
                float(r.threshold),
                status
            ));
        }
        write_atomic(p, &s)?;
    }
    emit(None, &verify_table(&rows))
}

fn plot_svg(name: &str, points: &[Vector], projection: Projection, a: Option<&Analysis>) -> String {
    let footer = match a {
        Some(a) => {
            let k = range(a.frames.iter().map(|f| f.kappa));
            let t = range(a.frames.iter().map(|f| f.tau));
            format!("kappa in [{:.6}, {:.6}], tau in [{:.6}, {:.6}]", k[0], k[1], t[0], t[1])
        }
        None => "kappa, tau unavailable".to_string(),
    };
    svg::render(name, points, projection, &footer)
}

fn cmd_plot(args: &CommonArgs) -> Result<(), CliError> {
    let ctx = load(args)?;
    let (points, footer) = plot_data(&ctx)?;
    let svg = svg::render(&ctx.spec.name, &points, args.projection, &footer);
    emit(args.svg.as_deref().or(args.out.as_deref()), &svg)
}

/// Points of the curve and a κ/τ footer. Plotting does not require an
/// admissible curve; the footer says so when the frame is undefined.
fn plot_data(ctx: &Context) -> Result<(Vec<Vector>, String), CliError> {
    let jets = match &ctx.spec.source {
        CurveSource::Graph(c) => c.jets(&UniformGrid::new(c.domain.0, c.domain.1, ctx.n))?,
        CurveSource::Intrinsic(spec) => reconstruct(spec, ctx.n)?.jets,
        CurveSource::Sampled(sc) => sc.jets(),
    };
    let points: Vec<Vector> = jets.iter().map(|j| j.pos).collect();
    let footer = match frames_from_jets(&jets, ctx.tol.adm_eps) {
        Ok(frames) => {
            let k = range(frames.iter().map(|f| f.kappa));
            let t = range(frames.iter().map(|f| f.tau));
            let causal = match pgc_core::frenet::causality(&jets) {
                Causality::Spacelike => "spacelike",
                Causality::Timelike => "timelike",
                Causality::Mixed { .. } => "mixed",
            };
            format!("kappa in [{:.6}, {:.6}], tau in [{:.6}, {:.6}], {causal}", k[0], k[1], t[0], t[1])
        }
        Err(e) => format!("frame undefined: {e}"),
    };
    if let Some(j) = jets.iter().find(|j| !j.pos.is_finite()) {
        return Err(CliError::Geometry(pgc_core::GeometryError::NonFinite { s: j.s }));
    }
    Ok((points, footer))
}
