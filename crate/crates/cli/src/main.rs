//! `fockflow`: evaluate Fock-Bargmann flows, export fields, find zeros, list
//! image systems, run the identity battery and draw streamlines.
//!
//! Exit status: 0 success, 1 failed verification, 2 bad arguments, 3 domain
//! error from the numerical core, 4 I/O error. Errors are reported on stderr
//! as `{"error":{"kind":…,"message":…}}`.

mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fockflow::analysis::{self, find_zeros, sample_field, trace_streamline_in, verify_all, verify_identity, GridSpec, Params, Region};
use fockflow::flow::{potential, velocity, velocity_components};
use fockflow::images::{self, cat_image_system, q_image_system, strip_image_system, wedge_image_system, DomainSpec, ImageSystem, ObliqueStrip, Singularity};
use fockflow::{format_complex, parse_complex, Complex, FlowError, FlowRep, FlowSpec, StateSpec, Truncation};
use serde::Serialize;
use serde_json::json;

/// Overrides the series term cap for every evaluation.
const MAX_TERMS_ENV: &str = "FOCKFLOW_MAX_TERMS";

#[derive(Parser)]
#[command(name = "fockflow", version, about = "Potential flows of Fock-Bargmann wave functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wave function, potential and velocity at points
    Eval(EvalArgs),
    /// Sample potential and velocity on a grid (CSV or JSON)
    Field(FieldArgs),
    /// Locate zeros of the wave function in a region
    Zeros(ZerosArgs),
    /// List an image system
    Images(ImagesArgs),
    /// Run numerical identity checks
    Verify(VerifyArgs),
    /// Trace streamlines (SVG or JSON)
    Streamlines(StreamArgs),
}

#[derive(Args)]
struct FlowArgs {
    /// State as JSON, e.g. '{"kind":"fock","n":2}'
    #[arg(long, value_parser = parse_state)]
    state: StateSpec,
    /// vortex:<G>, source:<N> or mixed:<N>:<G>
    #[arg(long, default_value = "vortex:6.283185307179586", value_parser = parse_rep)]
    rep: FlowRep,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    flow: FlowArgs,
    /// Evaluation point "a+bi" (repeatable)
    #[arg(long = "at", required = true, value_parser = parse_point, allow_hyphen_values = true)]
    at: Vec<Complex>,
    #[command(flatten)]
    output: Output,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FieldFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    flow: FlowArgs,
    /// xmin:xmax:ymin:ymax:n
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long, value_enum, default_value = "csv")]
    format: FieldFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ZerosArgs {
    /// State as JSON
    #[arg(long, value_parser = parse_state)]
    state: StateSpec,
    /// disk:<centre>:<radius> or rect:<xmin>:<xmax>:<ymin>:<ymax>
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    region: Region,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ImagesArgs {
    /// Cat or q-coherent state whose zeros are listed
    #[arg(long, value_parser = parse_state, required_unless_present = "domain")]
    state: Option<StateSpec>,
    /// Wedge, strip or oblique strip as JSON, e.g. '{"kind":"wedge","n":3}'
    #[arg(long, value_parser = parse_domain, conflicts_with = "state", requires = "base")]
    domain: Option<DomainSpec>,
    /// Position of the singularity imaged by --domain
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    base: Option<Complex>,
    #[arg(long, default_value = "vortex:6.283185307179586", value_parser = parse_rep)]
    rep: FlowRep,
    /// Truncation index
    #[arg(long = "M", default_value_t = 10)]
    m: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run the whole battery
    #[arg(long, conflicts_with = "name", required_unless_present_any = ["name", "list"])]
    all: bool,
    /// List the check names and exit
    #[arg(long, conflicts_with_all = ["all", "name"])]
    list: bool,
    /// Check name (repeatable)
    #[arg(long)]
    name: Vec<String>,
    /// key=value parameter passed to every named check
    #[arg(long = "param", value_parser = parse_param, requires = "name")]
    params: Vec<(String, f64)>,
    #[command(flatten)]
    output: Output,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StreamFormat {
    Svg,
    Json,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    flow: FlowArgs,
    /// Drawing window and default seed lattice: xmin:xmax:ymin:ymax:n
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: GridSpec,
    /// Seed point (repeatable); defaults to an interior n x n lattice
    #[arg(long = "seed", value_parser = parse_point, allow_hyphen_values = true)]
    seeds: Vec<Complex>,
    /// RK4 step; defaults to 1/200 of the window
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long, value_enum, default_value = "svg")]
    format: StreamFormat,
    #[command(flatten)]
    output: Output,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<FlowError> for Failure {
    fn from(e: FlowError) -> Self {
        let code = if matches!(e, FlowError::Parse(_)) { 2 } else { 3 };
        Failure { code, kind: e.kind().to_string(), message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 4, kind: "io".into(), message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, kind: "parse".into(), message: message.into() }
}

fn parse_state(s: &str) -> Result<StateSpec, String> {
    let state: StateSpec = serde_json::from_str(s).map_err(|e| format!("bad state JSON: {e}"))?;
    state.validate().map_err(|e| e.to_string())?;
    Ok(state)
}

fn parse_domain(s: &str) -> Result<DomainSpec, String> {
    let d: DomainSpec = serde_json::from_str(s).map_err(|e| format!("bad domain JSON: {e}"))?;
    d.validate().map_err(|e| e.to_string())?;
    Ok(d)
}

fn parse_rep(s: &str) -> Result<FlowRep, String> {
    s.parse().map_err(|e: FlowError| e.to_string())
}

fn parse_point(s: &str) -> Result<Complex, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != n {
        return Err(format!("{what} needs {n} ':'-separated fields, got '{s}'"));
    }
    parts
        .iter()
        .map(|p| p.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad number '{p}' in '{s}'")))
        .collect()
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let v = numbers(s, 5, "grid")?;
    if v[4].fract() != 0.0 || v[4] < 1.0 {
        return Err(format!("grid resolution must be a positive integer, got '{}'", v[4]));
    }
    let g = GridSpec::square(v[0], v[1], v[2], v[3], v[4] as usize);
    g.validate().map_err(|e| e.to_string())?;
    Ok(g)
}

fn parse_region(s: &str) -> Result<Region, String> {
    if let Some(rest) = s.strip_prefix("disk:") {
        let (centre, radius) = rest.rsplit_once(':').ok_or_else(|| format!("disk needs disk:<centre>:<radius>, got '{s}'"))?;
        let r = radius.trim().parse::<f64>().ok().filter(|r| *r > 0.0 && r.is_finite());
        let r = r.ok_or_else(|| format!("disk radius must be positive, got '{radius}'"))?;
        return Ok(Region::disk(parse_point(centre)?, r));
    }
    if let Some(rest) = s.strip_prefix("rect:") {
        let v = numbers(rest, 4, "rect")?;
        if !(v[1] > v[0] && v[3] > v[2]) {
            return Err(format!("rect bounds must be increasing, got '{rest}'"));
        }
        return Ok(Region::rect(Complex::new(v[0], v[2]), Complex::new(v[1], v[3])));
    }
    Err(format!("region must start with 'disk:' or 'rect:', got '{s}'"))
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("parameter must be key=value, got '{s}'"))?;
    let v = v.trim().parse::<f64>().map_err(|_| format!("bad value in '{s}'"))?;
    Ok((k.trim().to_string(), v))
}

fn truncation() -> Result<Truncation, Failure> {
    let mut t = Truncation::default();
    if let Ok(raw) = std::env::var(MAX_TERMS_ENV) {
        let n = raw.trim().parse::<usize>().map_err(|_| usage(format!("{MAX_TERMS_ENV} must be a positive integer, got '{raw}'")))?;
        t = Truncation::new(n, t.tol).map_err(|e| usage(e.to_string()))?;
    }
    Ok(t)
}

fn flow_spec(args: &FlowArgs) -> Result<FlowSpec, Failure> {
    Ok(FlowSpec::new(args.state.clone(), args.rep).with_truncation(truncation()?))
}

fn emit(output: &Output, body: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, body)?,
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
                // a closed reader (`| head`) is not an error
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct PointValue {
    z: String,
    psi: String,
    potential: String,
    velocity: String,
    u: f64,
    v: f64,
}

fn eval(a: &EvalArgs) -> Result<u8, Failure> {
    let fs = flow_spec(&a.flow)?;
    fs.validate()?;
    let wf = fs.wave();
    let mut rows = Vec::with_capacity(a.at.len());
    for &z in &a.at {
        use fockflow::WaveFunction;
        let vb = velocity(&fs, z)?;
        let (u, v) = velocity_components(vb);
        rows.push(PointValue {
            z: format_complex(z),
            psi: format_complex(wf.value(z)?),
            potential: format_complex(potential(&fs, z)?),
            velocity: format_complex(vb),
            u,
            v,
        });
    }
    emit(&a.output, &to_json(&rows))?;
    Ok(0)
}

fn field(a: &FieldArgs) -> Result<u8, Failure> {
    let fs = flow_spec(&a.flow)?;
    let grid = sample_field(&fs, &a.grid)?;
    let body = match a.format {
        FieldFormat::Csv => grid.to_csv(),
        FieldFormat::Json => to_json(&grid),
    };
    emit(&a.output, &body)?;
    Ok(0)
}

fn zeros(a: &ZerosArgs) -> Result<u8, Failure> {
    let found = find_zeros(&a.state, &a.region, &truncation()?)?;
    emit(&a.output, &to_json(&found))?;
    Ok(0)
}

fn image_system(a: &ImagesArgs) -> Result<ImageSystem, Failure> {
    if let Some(domain) = &a.domain {
        let base = a.base.ok_or_else(|| usage("--domain needs --base"))?;
        return Ok(match *domain {
            DomainSpec::Wedge { n } => wedge_image_system(base, a.rep, n)?,
            DomainSpec::Strip { h } => strip_image_system(base, a.rep, &ObliqueStrip::strip(h)?, a.m)?,
            DomainSpec::ObliqueStrip { h, beta, offset } => {
                strip_image_system(base, a.rep, &ObliqueStrip::new(h, beta, offset)?, a.m)?
            }
            DomainSpec::Geometric { q, alpha } => q_image_system(q, alpha, a.rep, a.m)?,
        });
    }
    match a.state.as_ref().ok_or_else(|| usage("images needs --state or --domain"))? {
        StateSpec::Cat { parity, alpha } => Ok(cat_image_system(*alpha, *parity, a.rep, a.m)?),
        StateSpec::QCoherent { q, alpha } => Ok(q_image_system(*q, *alpha, a.rep, a.m)?),
        other => Err(FlowError::InvalidParameter(format!(
            "image listings exist for cat and q-coherent states, not {}",
            serde_json::to_value(other).ok().and_then(|v| v["kind"].as_str().map(str::to_owned)).unwrap_or_default()
        ))
        .into()),
    }
}

fn images_cmd(a: &ImagesArgs) -> Result<u8, Failure> {
    let sys = image_system(a)?;
    emit(&a.output, &to_json(&sys))?;
    Ok(0)
}

fn verify(a: &VerifyArgs) -> Result<u8, Failure> {
    if a.list {
        emit(&a.output, &to_json(&analysis::IDENTITIES))?;
        return Ok(0);
    }
    let reports = if a.all {
        verify_all()
    } else {
        let params: Params = a.params.iter().cloned().collect();
        let mut out = Vec::with_capacity(a.name.len());
        for name in &a.name {
            out.push(verify_identity(name, &params)?);
        }
        out
    };
    emit(&a.output, &to_json(&reports))?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

/// Traced streamlines and the singularities inside the window.
#[derive(Serialize)]
struct StreamPlot {
    bounds: GridSpec,
    streamlines: Vec<Vec<[f64; 2]>>,
    singularities: Vec<Singularity>,
}

fn streamlines(a: &StreamArgs) -> Result<u8, Failure> {
    let fs = flow_spec(&a.flow)?;
    fs.validate()?;
    let g = a.grid;
    let (lo, hi) = (Complex::new(g.xmin, g.ymin), Complex::new(g.xmax, g.ymax));
    let extent = (g.xmax - g.xmin).max(g.ymax - g.ymin);
    let step = a.step.unwrap_or(extent / 200.0);
    if !(step.is_finite() && step != 0.0) || extent == 0.0 {
        return Err(usage("streamlines need a window of positive extent and a nonzero step"));
    }
    let seeds = if a.seeds.is_empty() {
        // interior lattice: cell centres of an n x n partition
        let n = g.nx;
        let mut s = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let x = g.xmin + (g.xmax - g.xmin) * (i as f64 + 0.5) / n as f64;
                let y = g.ymin + (g.ymax - g.ymin) * (j as f64 + 0.5) / n as f64;
                s.push(Complex::new(x, y));
            }
        }
        s
    } else {
        a.seeds.clone()
    };
    let mut lines = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let path = match trace_streamline_in(&fs, seed, step, a.steps, Some((lo, hi))) {
            Ok(p) => p,
            // seeds on a singularity draw nothing
            Err(FlowError::Singularity { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        if path.len() >= 2 {
            lines.push(path.iter().map(|z| [z.re, z.im]).collect());
        }
    }
    let mut singularities = Vec::new();
    for z in find_zeros(&fs.state, &Region::rect(lo, hi), &fs.trunc)? {
        singularities.extend(images::singularities_for(fs.rep, z.position, z.multiplicity, false)?);
    }
    let plot = StreamPlot { bounds: g, streamlines: lines, singularities };
    let body = match a.format {
        StreamFormat::Svg => svg::render(&plot.bounds, &plot.streamlines, &plot.singularities),
        StreamFormat::Json => to_json(&plot),
    };
    emit(&a.output, &body)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Field(a) => field(a),
        Command::Zeros(a) => zeros(a),
        Command::Images(a) => images_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Streamlines(a) => streamlines(a),
    }
}

fn report(f: &Failure) -> ExitCode {
    let body = json!({ "error": { "kind": f.kind, "message": f.message } });
    eprintln!("{body}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { ExitCode::from(2) } else { ExitCode::SUCCESS };
            }
            let message = e.render().to_string();
            let message = message.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments").trim_start_matches("error: ");
            return report(&usage(message));
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => report(&f),
    }
}
