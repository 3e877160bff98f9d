//! Command-line front end for the biquat library.
//!
//! Every subcommand reads JSON (inline flags or files), writes a single
//! JSON document to stdout, and echoes its resolved option set to stderr
//! for reproducibility. Exit codes: 0 success, 2 input or validation
//! error, 1 internal-consistency alarm.

mod json;

use std::process::ExitCode;

use biquat::alg_core::{decompose, Biquat, C64, BASIS_NAMES};
use biquat::bundle::{
    builtin_loop, detect_degeneracies, doppler_factor, eval_field, line_holonomy,
    track_eigenvalues, MatrixField, ParamPath, Scalars, TraceOpts,
};
use biquat::eigen::{
    beta_decay_distribution, classify, eigenspace_basis, eigenvalues_em, negative_eigenvector,
    principal_eigenvector, spin_probability, SpectralCase,
};
use biquat::expmap::{exp_biquat, exp_so31, log_biquat_lorentz, log_so31};
use biquat::mink::{EMField, RMat4, Vec4};
use biquat::modsq::{energy_momentum, lift_lorentz, modulus_squared, nullquat_image};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "biquat", version, about = "Biquaternion calculus and eigenbundle analysis", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coefficients of a 4x4 complex matrix in the 16-element basis
    Decompose {
        /// Matrix as JSON: 4x4 rows of [re, im] pairs
        #[arg(long)]
        matrix: Option<String>,
        /// Read the matrix JSON from a file
        #[arg(long, conflicts_with = "matrix")]
        input: Option<String>,
    },
    /// Product of two biquaternions of the same chirality
    Mul {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Closed-form exponential (pure biquaternion or so(3,1) matrix)
    Exp {
        /// Exponential of the zero generator: the identity matrix
        #[arg(long, conflicts_with_all = ["biquat", "so31"])]
        zero: bool,
        /// Pure biquaternion JSON
        #[arg(long)]
        biquat: Option<String>,
        /// Minkowski-skew real 4x4 matrix JSON
        #[arg(long, conflicts_with = "biquat")]
        so31: Option<String>,
    },
    /// Constructive logarithm (biquaternion Lorentz element or proper
    /// Lorentz matrix)
    Log {
        #[arg(long)]
        biquat: Option<String>,
        #[arg(long, conflicts_with = "biquat")]
        so31: Option<String>,
    },
    /// Modulus squared of a biquaternion, nullquat image, or the
    /// energy-momentum tensor of a field
    Modsq {
        #[arg(long)]
        biquat: Option<String>,
        /// Report the nullquat image (rank and span) instead
        #[arg(long, requires = "biquat")]
        nullquat: bool,
        /// Electric vector "ex,ey,ez" for the energy-momentum tensor
        #[arg(long = "E", conflicts_with = "biquat", requires = "b_field", allow_hyphen_values = true)]
        e_field: Option<String>,
        /// Magnetic vector "bx,by,bz"
        #[arg(long = "B", allow_hyphen_values = true)]
        b_field: Option<String>,
    },
    /// Gauge-fixed biquaternion preimage of a proper Lorentz matrix
    Lift {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, conflicts_with = "matrix")]
        input: Option<String>,
    },
    /// Closed-form eigenvalues of a field
    Eig(FieldArgs),
    /// Principal or negative joint eigenvector, or an eigenspace basis of
    /// a biquaternion
    Eigvec {
        #[command(flatten)]
        field: OptionalFieldArgs,
        #[arg(long)]
        negative: bool,
        /// Observer "t,x,y,z" (defaults to 1,0,0,0)
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Biquaternion JSON for eigenspace-basis mode
        #[arg(long)]
        biquat: Option<String>,
        /// Eigenvalue "re,im" for eigenspace-basis mode
        #[arg(long, requires = "biquat", allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Spectral case of a biquaternion
    Classify {
        #[arg(long)]
        biquat: String,
    },
    /// Track eigenvalue branches along a path or loop
    Track {
        #[command(flatten)]
        path: PathCmd,
        /// Also transport this branch around the loop and embed its
        /// holonomy in the result
        #[arg(long)]
        holonomy: Option<usize>,
    },
    /// Degeneracy events along a path or loop
    Degeneracies {
        #[command(flatten)]
        path: PathCmd,
        /// Cluster tolerance (defaults to 1e-8 x largest eigenvalue)
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Line-bundle holonomy of a simple branch around a loop
    Holonomy {
        #[command(flatten)]
        path: PathCmd,
        #[arg(long, default_value_t = 0)]
        branch: usize,
    },
    /// Doppler/Berry factor relating principal eigenvectors of two
    /// observers
    Doppler {
        #[command(flatten)]
        field: FieldArgs,
        /// Boost velocity "wx,wy,wz" with |w| < 1
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
    /// Spin measurement probability -1/2 <u+v, u+w>
    SpinProb {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
    /// Beta-decay angular distribution 1 - v cos(theta)
    BetaDist {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Unit magnetic direction "bx,by,bz"
        #[arg(long = "Bdir", allow_hyphen_values = true)]
        b_dir: String,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
    /// List built-in fields and loops
    Examples,
}

#[derive(Args)]
struct FieldArgs {
    /// Electric vector "ex,ey,ez"
    #[arg(long = "E", allow_hyphen_values = true)]
    e_field: String,
    /// Magnetic vector "bx,by,bz"
    #[arg(long = "B", allow_hyphen_values = true)]
    b_field: String,
}

#[derive(Args)]
struct OptionalFieldArgs {
    #[arg(long = "E", allow_hyphen_values = true)]
    e_field: Option<String>,
    #[arg(long = "B", allow_hyphen_values = true)]
    b_field: Option<String>,
}

#[derive(Args)]
struct PathCmd {
    /// Built-in field name: example1 .. example5
    #[arg(long)]
    field: Option<String>,
    /// Explicit-sample field description file (JSON)
    #[arg(long, conflicts_with = "field")]
    field_file: Option<String>,
    /// Built-in loop name (builtin-linking, builtin-winding, builtin-null)
    #[arg(long = "loop")]
    loop_name: Option<String>,
    /// Path JSON: {"points": [[...], ...], "closed": bool}
    #[arg(long, conflicts_with = "loop_name")]
    path: Option<String>,
    /// Path JSON from a file
    #[arg(long, conflicts_with_all = ["loop_name", "path"])]
    path_file: Option<String>,
    /// File with a JSON array of paths (processed in order)
    #[arg(long, conflicts_with_all = ["loop_name", "path", "path_file"])]
    paths_file: Option<String>,
    /// Uniform 1-D parameter range "a,b" (open path)
    #[arg(long, conflicts_with_all = ["loop_name", "path", "path_file", "paths_file"], allow_hyphen_values = true)]
    range: Option<String>,
    /// Sample count for built-in loops and ranges
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Maximum bisection depth
    #[arg(long, default_value_t = 20)]
    max_depth: usize,
    /// Refinement trigger factor
    #[arg(long, default_value_t = 3.0)]
    refine_factor: f64,
    /// Cluster tolerance override
    #[arg(long)]
    degeneracy_tol: Option<f64>,
    /// Process multiple paths in parallel
    #[arg(long)]
    parallel: bool,
}

struct CliError {
    code: String,
    detail: String,
    internal: bool,
}

impl CliError {
    fn input(code: &str, detail: impl Into<String>) -> Self {
        CliError { code: code.into(), detail: detail.into(), internal: false }
    }
}

impl From<biquat::Error> for CliError {
    fn from(e: biquat::Error) -> Self {
        CliError { code: e.code().into(), detail: e.to_string(), internal: e.is_internal() }
    }
}

type CliResult = Result<String, CliError>;

fn emit<T: Serialize>(v: &T) -> CliResult {
    Ok(serde_json::to_string(v).expect("serializable output"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let doc = json!({"error": "usage", "detail": e.to_string()});
            eprintln!("{doc}");
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok(doc) => {
            println!("{doc}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let doc = json!({"error": e.code, "detail": e.detail});
            eprintln!("{doc}");
            ExitCode::from(if e.internal { 1 } else { 2 })
        }
    }
}

fn echo_options(command: &str, options: Map<String, Value>) {
    let doc = json!({"command": command, "options": Value::Object(options)});
    eprintln!("{doc}");
}

fn parse_vec3(s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::input("bad_vector", format!("'{s}': {e}")))?;
    if parts.len() != 3 || !parts.iter().all(|v| v.is_finite()) {
        return Err(CliError::input("bad_vector", format!("'{s}' is not a finite 3-vector")));
    }
    Ok([parts[0], parts[1], parts[2]])
}

fn parse_vec4(s: &str) -> Result<Vec4, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::input("bad_vector", format!("'{s}': {e}")))?;
    if parts.len() != 4 || !parts.iter().all(|v| v.is_finite()) {
        return Err(CliError::input("bad_vector", format!("'{s}' is not a finite 4-vector")));
    }
    Ok(Vec4::new(parts[0], parts[1], parts[2], parts[3]))
}

fn parse_cpx(s: &str) -> Result<C64, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::input("bad_complex", format!("'{s}': {e}")))?;
    match parts.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(CliError::input("bad_complex", format!("'{s}' is not re[,im]"))),
    }
}

fn parse_observer(u: &Option<String>) -> Result<Vec4, CliError> {
    match u {
        None => Ok(Vec4::default_observer()),
        Some(s) => parse_vec4(s),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(inline: &Option<String>, file: &Option<String>, what: &str) -> Result<T, CliError> {
    let text = match (inline, file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| CliError::input("io", format!("reading {path}: {e}")))?,
        (None, None) => return Err(CliError::input("missing_input", format!("{what} required"))),
    };
    serde_json::from_str(&text).map_err(|e| CliError::input("bad_json", format!("{what}: {e}")))
}

fn parse_biquat(s: &str) -> Result<Biquat, CliError> {
    let j: json::BiquatJson =
        serde_json::from_str(s).map_err(|e| CliError::input("bad_json", format!("biquat: {e}")))?;
    j.to_biquat().map_err(|e| CliError::input("bad_json", e))
}

fn resolve_field(spec: &PathCmd) -> Result<MatrixField, CliError> {
    if let Some(name) = &spec.field {
        return match name.as_str() {
            "example1" => Ok(MatrixField::example1()),
            "example2" => Ok(MatrixField::example2()),
            "example3" => Ok(MatrixField::example3()),
            "example4" => Ok(MatrixField::example4()),
            "example5" => Ok(MatrixField::example5()),
            other => Err(CliError::input("unknown_field", format!("'{other}'"))),
        };
    }
    if let Some(path) = &spec.field_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input("io", format!("reading {path}: {e}")))?;
        let j: json::ExplicitFieldJson = serde_json::from_str(&text)
            .map_err(|e| CliError::input("bad_json", format!("field file: {e}")))?;
        return j.to_field().map_err(|e| CliError::input("bad_field", e));
    }
    Err(CliError::input("missing_input", "--field or --field-file required"))
}

fn resolve_paths(field: &MatrixField, spec: &PathCmd) -> Result<Vec<ParamPath>, CliError> {
    if let Some(name) = &spec.loop_name {
        return Ok(vec![builtin_loop(field, name, spec.samples)?]);
    }
    if let Some(s) = &spec.path {
        let j: json::ParamPathJson =
            serde_json::from_str(s).map_err(|e| CliError::input("bad_json", format!("path: {e}")))?;
        return Ok(vec![j.to_path()]);
    }
    if let Some(file) = &spec.path_file {
        let j: json::ParamPathJson = read_json(&None, &Some(file.clone()), "path file")?;
        return Ok(vec![j.to_path()]);
    }
    if let Some(file) = &spec.paths_file {
        let js: Vec<json::ParamPathJson> = read_json(&None, &Some(file.clone()), "paths file")?;
        return Ok(js.iter().map(|j| j.to_path()).collect());
    }
    if let Some(r) = &spec.range {
        let parts: Vec<f64> = r
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::input("bad_range", format!("'{r}': {e}")))?;
        if parts.len() != 2 {
            return Err(CliError::input("bad_range", format!("'{r}' is not a,b")));
        }
        return Ok(vec![ParamPath::linear_range(parts[0], parts[1], spec.samples)]);
    }
    Err(CliError::input("missing_input", "one of --loop, --path, --path-file, --paths-file, --range required"))
}

fn trace_opts(spec: &PathCmd) -> TraceOpts {
    TraceOpts {
        max_depth: spec.max_depth,
        refine_factor: spec.refine_factor,
        degeneracy_tol: spec.degeneracy_tol,
        ..TraceOpts::default()
    }
}

fn path_options(spec: &PathCmd, extra: &[(&str, Value)]) -> Map<String, Value> {
    let mut m = Map::new();
    if let Some(f) = &spec.field {
        m.insert("field".into(), json!(f));
    }
    if let Some(f) = &spec.field_file {
        m.insert("field_file".into(), json!(f));
    }
    if let Some(l) = &spec.loop_name {
        m.insert("loop".into(), json!(l));
    }
    if let Some(p) = &spec.path {
        m.insert("path".into(), json!(p));
    }
    if let Some(p) = &spec.path_file {
        m.insert("path_file".into(), json!(p));
    }
    if let Some(p) = &spec.paths_file {
        m.insert("paths_file".into(), json!(p));
    }
    if let Some(r) = &spec.range {
        m.insert("range".into(), json!(r));
    }
    m.insert("samples".into(), json!(spec.samples));
    m.insert("max_depth".into(), json!(spec.max_depth));
    m.insert("refine_factor".into(), json!(spec.refine_factor));
    if let Some(t) = spec.degeneracy_tol {
        m.insert("degeneracy_tol".into(), json!(t));
    }
    m.insert("parallel".into(), json!(spec.parallel));
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    m
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

#[derive(Serialize)]
struct EigOut {
    #[serde(rename = "lambda_T")]
    lambda_t: f64,
    #[serde(rename = "lambda_F")]
    lambda_f: f64,
    #[serde(rename = "lambda_Fstar")]
    lambda_f_star: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    degenerate: bool,
}

fn run(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Decompose { matrix, input } => {
            let j: json::CMat4Json = read_json(&matrix, &input, "matrix")?;
            let m = json::cmat4_from(&j);
            let mut opts = Map::new();
            opts.insert("matrix".into(), to_value(&j));
            echo_options("decompose", opts);
            let d = decompose(&m);
            let coeffs: Vec<json::Cpx> = d.coeffs.iter().map(|c| json::cpx(*c)).collect();
            emit(&json!({"coeffs": coeffs, "order": BASIS_NAMES}))
        }
        Cmd::Mul { p, q } => {
            let pb = parse_biquat(&p)?;
            let qb = parse_biquat(&q)?;
            let mut opts = Map::new();
            opts.insert("p".into(), to_value(&json::BiquatJson::from_biquat(&pb)));
            opts.insert("q".into(), to_value(&json::BiquatJson::from_biquat(&qb)));
            echo_options("mul", opts);
            let prod = pb.try_mul(&qb)?;
            emit(&json::BiquatJson::from_biquat(&prod))
        }
        Cmd::Exp { zero, biquat, so31 } => {
            let mut opts = Map::new();
            if zero {
                opts.insert("zero".into(), json!(true));
                echo_options("exp", opts);
                return emit(&json::rmat4_json(&RMat4::identity()));
            }
            if let Some(s) = biquat {
                let q = parse_biquat(&s)?;
                opts.insert("biquat".into(), to_value(&json::BiquatJson::from_biquat(&q)));
                echo_options("exp", opts);
                let e = exp_biquat(&q)?;
                return emit(&json::BiquatJson::from_biquat(&e));
            }
            if let Some(s) = so31 {
                let j: json::RMat4Json = serde_json::from_str(&s)
                    .map_err(|e| CliError::input("bad_json", format!("so31 matrix: {e}")))?;
                opts.insert("so31".into(), to_value(&j));
                echo_options("exp", opts);
                let l = exp_so31(&json::rmat4_from(&j))?;
                return emit(&json::rmat4_json(&l));
            }
            Err(CliError::input("missing_input", "one of --zero, --biquat, --so31 required"))
        }
        Cmd::Log { biquat, so31 } => {
            let mut opts = Map::new();
            if let Some(s) = biquat {
                let q = parse_biquat(&s)?;
                opts.insert("biquat".into(), to_value(&json::BiquatJson::from_biquat(&q)));
                echo_options("log", opts);
                let d = log_biquat_lorentz(&q)?;
                return emit(&json::BiquatJson::from_biquat(&d));
            }
            if let Some(s) = so31 {
                let j: json::RMat4Json = serde_json::from_str(&s)
                    .map_err(|e| CliError::input("bad_json", format!("so31 matrix: {e}")))?;
                opts.insert("so31".into(), to_value(&j));
                echo_options("log", opts);
                let f = log_so31(&json::rmat4_from(&j))?;
                return emit(&json::rmat4_json(&f));
            }
            Err(CliError::input("missing_input", "one of --biquat, --so31 required"))
        }
        Cmd::Modsq { biquat, nullquat, e_field, b_field } => {
            let mut opts = Map::new();
            if let Some(s) = biquat {
                let q = parse_biquat(&s)?;
                opts.insert("biquat".into(), to_value(&json::BiquatJson::from_biquat(&q)));
                opts.insert("nullquat".into(), json!(nullquat));
                echo_options("modsq", opts);
                if nullquat {
                    let img = nullquat_image(&q)?;
                    return emit(&json!({
                        "matrix": json::rmat4_json(&img.matrix),
                        "rank": img.rank,
                        "span": img.span.map(|v| json::vec4_json(&v)),
                        "degenerate": img.degenerate,
                    }));
                }
                return emit(&json::rmat4_json(&modulus_squared(&q)));
            }
            if let (Some(e), Some(b)) = (e_field, b_field) {
                let field = EMField::new(parse_vec3(&e)?, parse_vec3(&b)?);
                opts.insert("E".into(), json!(field.e));
                opts.insert("B".into(), json!(field.b));
                echo_options("modsq", opts);
                return emit(&json::rmat4_json(&energy_momentum(&field)));
            }
            Err(CliError::input("missing_input", "--biquat or --E/--B required"))
        }
        Cmd::Lift { matrix, input } => {
            let j: json::RMat4Json = read_json(&matrix, &input, "matrix")?;
            let mut opts = Map::new();
            opts.insert("matrix".into(), to_value(&j));
            echo_options("lift", opts);
            let q = lift_lorentz(&json::rmat4_from(&j))?;
            emit(&json::BiquatJson::from_biquat(&q))
        }
        Cmd::Eig(args) => {
            let field = EMField::new(parse_vec3(&args.e_field)?, parse_vec3(&args.b_field)?);
            let mut opts = Map::new();
            opts.insert("E".into(), json!(field.e));
            opts.insert("B".into(), json!(field.b));
            echo_options("eig", opts);
            let ev = eigenvalues_em(&field);
            emit(&EigOut {
                lambda_t: ev.lambda_t,
                lambda_f: ev.lambda_f,
                lambda_f_star: ev.lambda_f_star,
                degenerate: ev.degenerate,
            })
        }
        Cmd::Eigvec { field, negative, u, biquat, lambda } => {
            let mut opts = Map::new();
            if let Some(s) = biquat {
                let q = parse_biquat(&s)?;
                let lam = parse_cpx(&lambda.ok_or_else(|| {
                    CliError::input("missing_input", "--lambda required with --biquat")
                })?)?;
                opts.insert("biquat".into(), to_value(&json::BiquatJson::from_biquat(&q)));
                opts.insert("lambda".into(), json!([lam.re, lam.im]));
                echo_options("eigvec", opts);
                let basis = eigenspace_basis(&q, lam)?;
                let vecs: Vec<Vec<json::Cpx>> = basis
                    .vectors
                    .iter()
                    .map(|v| v.as_array().iter().map(|z| json::cpx(*z)).collect())
                    .collect();
                return emit(&json!({"basis": vecs, "non_unique": basis.non_unique}));
            }
            let (Some(e), Some(b)) = (&field.e_field, &field.b_field) else {
                return Err(CliError::input("missing_input", "--E/--B or --biquat/--lambda required"));
            };
            let em = EMField::new(parse_vec3(e)?, parse_vec3(b)?);
            let observer = parse_observer(&u)?;
            opts.insert("E".into(), json!(em.e));
            opts.insert("B".into(), json!(em.b));
            opts.insert("negative".into(), json!(negative));
            opts.insert("u".into(), json!(observer.as_array()));
            echo_options("eigvec", opts);
            let r = if negative {
                negative_eigenvector(&em, &observer)?
            } else {
                principal_eigenvector(&em, &observer)?
            };
            emit(&json!({"s": json::vec4_json(&r.s), "degenerate": r.degenerate}))
        }
        Cmd::Classify { biquat } => {
            let q = parse_biquat(&biquat)?;
            let mut opts = Map::new();
            opts.insert("biquat".into(), to_value(&json::BiquatJson::from_biquat(&q)));
            echo_options("classify", opts);
            let case = match classify(&q) {
                SpectralCase::TwoEigenvaluesGeneric => "TwoEigenvaluesGeneric",
                SpectralCase::NullDegenerate => "NullDegenerate",
                SpectralCase::ScalarOnly => "ScalarOnly",
            };
            emit(&json!({"case": case}))
        }
        Cmd::Track { path: spec, holonomy } => {
            let field = resolve_field(&spec)?;
            let paths = resolve_paths(&field, &spec)?;
            let extra = holonomy.map(|b| ("holonomy", json!(b)));
            echo_options(
                "track",
                path_options(&spec, extra.as_ref().map(|(k, v)| (*k, v.clone())).as_slice()),
            );
            let opts = trace_opts(&spec);
            let real = matches!(field.scalars(), Scalars::RealField);
            let run_one = |p: &ParamPath| -> Result<json::TraceResultJson, biquat::Error> {
                let mut out = json::TraceResultJson::from_trace(&track_eigenvalues(&field, p, &opts)?);
                if let Some(branch) = holonomy {
                    let h = line_holonomy(&field, p, branch, &opts)?;
                    out.holonomy = Some(json::HolonomyJson::from_result(&h, real));
                }
                Ok(out)
            };
            if paths.len() == 1 {
                return emit(&run_one(&paths[0]).map_err(CliError::from)?);
            }
            let results: Result<Vec<_>, biquat::Error> = if spec.parallel {
                use rayon::prelude::*;
                paths.par_iter().map(run_one).collect()
            } else {
                paths.iter().map(run_one).collect()
            };
            emit(&json!({"results": results.map_err(CliError::from)?}))
        }
        Cmd::Degeneracies { path: spec, tol } => {
            let field = resolve_field(&spec)?;
            let paths = resolve_paths(&field, &spec)?;
            let extra = tol.map(|t| ("tol", json!(t)));
            echo_options(
                "degeneracies",
                path_options(&spec, extra.as_ref().map(|(k, v)| (*k, v.clone())).as_slice()),
            );
            let mut all = Vec::new();
            for p in &paths {
                let effective_tol = tol.unwrap_or_else(|| auto_tol(&field, p));
                let events = detect_degeneracies(&field, p, effective_tol)?;
                all.extend(events.iter().map(json::DegeneracyEventJson::from_event));
            }
            emit(&json!({"events": all}))
        }
        Cmd::Holonomy { path: spec, branch } => {
            let field = resolve_field(&spec)?;
            let paths = resolve_paths(&field, &spec)?;
            echo_options("holonomy", path_options(&spec, &[("branch", json!(branch))]));
            if paths.len() != 1 {
                return Err(CliError::input("bad_input", "holonomy takes exactly one loop"));
            }
            let h = line_holonomy(&field, &paths[0], branch, &trace_opts(&spec))?;
            let real = matches!(field.scalars(), Scalars::RealField);
            emit(&json::HolonomyJson::from_result(&h, real))
        }
        Cmd::Doppler { field, w, u } => {
            let em = EMField::new(parse_vec3(&field.e_field)?, parse_vec3(&field.b_field)?);
            let wv = parse_vec3(&w)?;
            let observer = parse_observer(&u)?;
            let mut opts = Map::new();
            opts.insert("E".into(), json!(em.e));
            opts.insert("B".into(), json!(em.b));
            opts.insert("w".into(), json!(wv));
            opts.insert("u".into(), json!(observer.as_array()));
            echo_options("doppler", opts);
            let factor = doppler_factor(&em, &observer, wv)?;
            emit(&json!({"factor": factor}))
        }
        Cmd::SpinProb { v, w, u } => {
            let vv = parse_vec3(&v)?;
            let wv = parse_vec3(&w)?;
            let observer = parse_observer(&u)?;
            let mut opts = Map::new();
            opts.insert("v".into(), json!(vv));
            opts.insert("w".into(), json!(wv));
            opts.insert("u".into(), json!(observer.as_array()));
            echo_options("spin-prob", opts);
            let p = spin_probability(&observer, vv, wv)?;
            emit(&json!({"probability": p}))
        }
        Cmd::BetaDist { v, b_dir, u } => {
            let vv = parse_vec3(&v)?;
            let bd = parse_vec3(&b_dir)?;
            let observer = parse_observer(&u)?;
            let mut opts = Map::new();
            opts.insert("v".into(), json!(vv));
            opts.insert("Bdir".into(), json!(bd));
            opts.insert("u".into(), json!(observer.as_array()));
            echo_options("beta-dist", opts);
            let d = beta_decay_distribution(&observer, vv, bd)?;
            emit(&json!({"value": d}))
        }
        Cmd::Examples => {
            echo_options("examples", Map::new());
            emit(&json!({
                "fields": [
                    {"name": "example1", "dim": 2, "param_dim": 1, "scalars": "real",
                     "description": "[[1, t], [0, 1]]"},
                    {"name": "example2", "dim": 2, "param_dim": 1, "scalars": "real",
                     "description": "[[1, max(t,0)], [max(-t,0), 1]]"},
                    {"name": "example3", "dim": 2, "param_dim": 3, "scalars": "real",
                     "description": "[[u, v], [v, w]]"},
                    {"name": "example4", "dim": 4, "param_dim": 6, "scalars": "complex",
                     "description": "pure 4x4 representation of a complex 3-vector (re/im interleaved)"},
                    {"name": "example5", "dim": 4, "param_dim": 8, "scalars": "complex",
                     "description": "scalar-plus-vector 4x4 representation of a complex 4-vector"},
                ],
                "loops": [
                    {"name": "builtin-linking", "fields": ["example3"],
                     "description": "(cos t, sin t, -cos t): links the degenerate line"},
                    {"name": "builtin-winding", "fields": ["example4", "example5"],
                     "description": "A.A winds once around zero: branches swap"},
                    {"name": "builtin-null", "fields": ["example4", "example5"],
                     "description": "stays in the null stratum: eigenvalue zero throughout"},
                ],
            }))
        }
    }
}

/// Default degeneracy tolerance: 1e-8 times the largest eigenvalue
/// magnitude along the path (floor 1).
fn auto_tol(field: &MatrixField, path: &ParamPath) -> f64 {
    let mut scale: f64 = 1.0;
    for p in &path.points {
        if let Ok(m) = eval_field(field, p) {
            if let Ok(eigs) = biquat::bundle::matrix_eigenvalues(&m) {
                for e in eigs {
                    scale = scale.max(e.norm());
                }
            }
        }
    }
    1e-8 * scale
}
