//! Command-line front end. Every command reads its inputs, writes its outputs
//! and a `<out>.manifest.json` next to them, and maps failures onto fixed exit
//! codes so scripts can tell statistics from bad input.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::circuit::{AdaptiveCircuit, CircuitError};
use crate::ftarch::{
    effective_strength, ft_localize, ft_plan_for_n, surrogate_montecarlo, FtError, FtMode, FtPlan, SurrogateConfig,
};
use crate::grid::{manhattan, Vertex};
use crate::localize::{locality_check, localize_ideal, LocalizeError, LocalizedCircuit, Mode};
use crate::noise::{sample_subsets, sharded_support_count, GadgetSpec, NoiseError, NoiseStrength};
use crate::rng::SeedStream;
use crate::routing::{
    route_2d, route_3d, route_3d_subset, verify_edge_disjoint, Pairing, RoutePath, RouteStats, RoutingError,
};
use crate::stabsim::{run_symbolic, symbolic_equivalent, Equivalence, StabError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Pass = 0,
    StatisticalFail = 1,
    Parse = 2,
    Precondition = 3,
    Internal = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    fn parse(m: impl fmt::Display) -> Self {
        CliError { exit: Exit::Parse, message: m.to_string() }
    }
    fn precondition(m: impl fmt::Display) -> Self {
        CliError { exit: Exit::Precondition, message: m.to_string() }
    }
    fn internal(m: impl fmt::Display) -> Self {
        CliError { exit: Exit::Internal, message: m.to_string() }
    }
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::precondition(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.exit, self.message)
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::Json(_) | CircuitError::Version(_) | CircuitError::Op { .. } => CliError::parse(e),
            _ => CliError::precondition(e),
        }
    }
}

impl From<LocalizeError> for CliError {
    fn from(e: LocalizeError) -> Self {
        match e {
            LocalizeError::Circuit(c) => c.into(),
            other => CliError::precondition(other),
        }
    }
}

impl From<FtError> for CliError {
    fn from(e: FtError) -> Self {
        match e {
            FtError::Circuit(c) => c.into(),
            FtError::Internal(_) => CliError::internal(e),
            other => CliError::precondition(other),
        }
    }
}

impl From<RoutingError> for CliError {
    fn from(e: RoutingError) -> Self {
        CliError::precondition(e)
    }
}

impl From<NoiseError> for CliError {
    fn from(e: NoiseError) -> Self {
        CliError::precondition(e)
    }
}

impl From<StabError> for CliError {
    fn from(e: StabError) -> Self {
        CliError::precondition(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "qlocal", version, about = "Geometrically local compilation of adaptive Clifford circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Route a vertex pairing with edge-disjoint paths.
    Route(RouteArgs),
    /// Compile a circuit onto a 2D or 3D grid.
    Localize(LocalizeArgs),
    /// Check a localized circuit against its source.
    Verify(VerifyArgs),
    /// One-sided Monte Carlo check of a noise gadget or a fault-tolerant plan.
    Montecarlo(MonteCarloArgs),
    /// Plan fault-tolerant entanglement for n qubits.
    FtPlan(FtPlanArgs),
}

#[derive(Args, Debug)]
pub struct RouteArgs {
    /// Pairing JSON: a list of [[x,y(,z)], [x,y(,z)]] pairs.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub mode: Mode,
    /// Side length of the base plane.
    #[arg(long)]
    pub l: u32,
    /// Print the stats object to stdout.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Args, Debug)]
pub struct LocalizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub mode: Mode,
    #[arg(long)]
    pub stats: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Source circuit, then the localized circuit (or a plain circuit).
    #[arg(long = "in", num_args = 1..=2, action = clap::ArgAction::Append, required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    /// Gadget JSON (has a "gadget" field) or plan JSON from `ft-plan`.
    #[arg(long = "in", visible_alias = "plan")]
    pub input: PathBuf,
    /// Results CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 3.0)]
    pub sigma: f64,
    #[arg(long = "max-subset", default_value_t = 3)]
    pub max_subset: usize,
    /// Random subsets drawn per subset size.
    #[arg(long = "subsets", default_value_t = 200)]
    pub subsets_per_size: usize,
    /// Replace the gadget's bound by this strength (negative controls).
    #[arg(long = "claimed-bound")]
    pub claimed_bound: Option<f64>,
}

#[derive(Args, Debug)]
pub struct FtPlanArgs {
    #[arg(long)]
    pub mode: FtMode,
    /// Logical qubit count; ignored when --in is given.
    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,
    /// Optional circuit to account layer by layer.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Physical error rate for the composed noise strengths.
    #[arg(long)]
    pub p: Option<f64>,
}

/// Everything that determines a run, echoed into the manifest.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_subset: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsets_per_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl Command {
    pub fn config(&self) -> RunConfig {
        match self {
            Command::Route(a) => RunConfig {
                command: "route".into(),
                mode: Some(a.mode.to_string()),
                inputs: vec![a.input.clone()],
                output: a.out.clone(),
                l: Some(a.l),
                ..Default::default()
            },
            Command::Localize(a) => RunConfig {
                command: "localize".into(),
                mode: Some(a.mode.to_string()),
                inputs: vec![a.input.clone()],
                output: a.out.clone(),
                ..Default::default()
            },
            Command::Verify(a) => RunConfig {
                command: "verify".into(),
                inputs: a.inputs.clone(),
                output: a.out.clone(),
                ..Default::default()
            },
            Command::Montecarlo(a) => RunConfig {
                command: "montecarlo".into(),
                seed: Some(a.seed),
                trials: Some(a.trials),
                p: Some(a.p),
                inputs: vec![a.input.clone()],
                output: a.out.clone(),
                sigma: Some(a.sigma),
                max_subset: Some(a.max_subset),
                subsets_per_size: Some(a.subsets_per_size),
                claimed_bound: a.claimed_bound,
                ..Default::default()
            },
            Command::FtPlan(a) => RunConfig {
                command: "ft-plan".into(),
                mode: Some(a.mode.to_string()),
                p: a.p,
                inputs: a.input.iter().cloned().collect(),
                output: a.out.clone(),
                n: a.n,
                ..Default::default()
            },
        }
    }
}

/// sha256 over `blob <len>\0<bytes>`, the framing git uses for object ids.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[derive(Serialize)]
struct FileEntry {
    path: PathBuf,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    config: RunConfig,
    inputs: Vec<FileEntry>,
    outputs: Vec<FileEntry>,
    exit_code: i32,
    status: Exit,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostic: Option<String>,
}

/// What a command produced: files written and its verdict.
struct Outcome {
    exit: Exit,
    outputs: Vec<PathBuf>,
    stdout: Option<String>,
}

struct Inputs {
    entries: Vec<FileEntry>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.entries.push(FileEntry { path: path.to_path_buf(), sha256: content_hash(&bytes) });
        String::from_utf8(bytes).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn to_pretty(v: &impl Serialize) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(CliError::internal)
}

/// Parses argv (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => Exit::Parse.code(),
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(cmd: &Command) -> i32 {
    let config = cmd.config();
    let mut inputs = Inputs { entries: Vec::new() };
    let result = match cmd {
        Command::Route(a) => cmd_route(a, &mut inputs),
        Command::Localize(a) => cmd_localize(a, &mut inputs),
        Command::Verify(a) => cmd_verify(a, &mut inputs),
        Command::Montecarlo(a) => cmd_montecarlo(a, &mut inputs),
        Command::FtPlan(a) => cmd_ft_plan(a, &mut inputs),
    };
    let (exit, outputs, diagnostic) = match result {
        Ok(o) => {
            if let Some(s) = o.stdout {
                println!("{s}");
            }
            (o.exit, o.outputs, None)
        }
        Err(e) => {
            let diag = json!({"error": {"status": e.exit, "exit_code": e.exit.code(), "message": e.message}});
            eprintln!("{diag}");
            (e.exit, Vec::new(), Some(e.message))
        }
    };
    let outputs = outputs
        .into_iter()
        .filter_map(|p| fs::read(&p).ok().map(|b| FileEntry { sha256: content_hash(&b), path: p }))
        .collect();
    let manifest = Manifest {
        tool: "qlocal",
        version: VERSION,
        config,
        inputs: inputs.entries,
        outputs,
        exit_code: exit.code(),
        status: exit,
        diagnostic,
    };
    let mpath = manifest_path(&cmd.config().output);
    match to_pretty(&manifest).and_then(|s| write_file(&mpath, s.as_bytes())) {
        Ok(()) => exit.code(),
        Err(e) => {
            eprintln!("{}", json!({"error": {"status": e.exit, "message": e.message}}));
            exit.code().max(e.exit.code())
        }
    }
}

// route

fn parse_vertex(v: &Value, mode: Mode) -> Result<Vertex, String> {
    let coords = v.as_array().ok_or("a vertex must be an array of coordinates")?;
    let c: Vec<u32> = coords
        .iter()
        .map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or("coordinates must be non-negative integers"))
        .collect::<Result<_, _>>()?;
    match (c.as_slice(), mode) {
        ([x, y], _) => Ok(Vertex::new(*x, *y, 0)),
        ([x, y, z], _) => Ok(Vertex::new(*x, *y, *z)),
        _ => Err(format!("a vertex has 2 or 3 coordinates, got {}", c.len())),
    }
}

/// Accepts a bare list of pairs or an object with a "pairs" list.
pub fn parse_pairing(text: &str, mode: Mode) -> Result<Pairing, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let list = match &v {
        Value::Array(a) => a,
        Value::Object(o) => o.get("pairs").and_then(Value::as_array).ok_or("object needs a \"pairs\" array")?,
        _ => return Err("pairing must be a list of vertex pairs".into()),
    };
    let mut pairs = Vec::with_capacity(list.len());
    for (i, p) in list.iter().enumerate() {
        match p.as_array().map(Vec::as_slice) {
            Some([a, b]) => pairs.push((
                parse_vertex(a, mode).map_err(|e| format!("pair {i}: {e}"))?,
                parse_vertex(b, mode).map_err(|e| format!("pair {i}: {e}"))?,
            )),
            _ => return Err(format!("pair {i} must be a two-element array")),
        }
    }
    Ok(Pairing::new(pairs))
}

#[derive(Serialize)]
struct PathDoc {
    pair: [Vertex; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    floor: Option<u32>,
    length: usize,
    vertices: Vec<Vertex>,
}

#[derive(Serialize)]
struct RouteDoc {
    mode: Mode,
    l: u32,
    paths: Vec<PathDoc>,
    stats: Value,
}

fn cmd_route(a: &RouteArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let text = inputs.read(&a.input)?;
    let pairing = parse_pairing(&text, a.mode).map_err(CliError::parse)?;
    let l = a.l;
    let mut docs = Vec::new();
    let (flat, mut stats) = match a.mode {
        Mode::TwoD => {
            let paths = route_2d(l, &pairing)?;
            let mut flat = Vec::new();
            for (&(u, v), p) in pairing.pairs.iter().zip(paths) {
                let p = if p.start() == Some(u) { p } else { p.reversed() };
                docs.push(PathDoc { pair: [u, v], floor: None, length: p.len(), vertices: p.vertices.clone() });
                flat.push(p);
            }
            let stats = RouteStats::of_paths(&flat);
            (flat, serde_json::to_value(stats).map_err(CliError::internal)?)
        }
        Mode::ThreeD => {
            if l % 2 == 1 {
                return Err(RoutingError::OddSide(l).into());
            }
            let full = pairing.len() * 2 == (l as usize) * (l as usize);
            let paths = if full { route_3d(l, &pairing)? } else { route_3d_subset(l, &pairing)? };
            let mut flat = Vec::new();
            for (&(u, v), sp) in pairing.pairs.iter().zip(&paths) {
                let p = sp.path();
                docs.push(PathDoc {
                    pair: [u, v],
                    floor: Some(sp.floor),
                    length: p.len(),
                    vertices: p.vertices.clone(),
                });
                flat.push(p);
            }
            let stats = RouteStats::of_segmented(&paths);
            (flat, serde_json::to_value(stats).map_err(CliError::internal)?)
        }
    };
    let disjoint = verify_edge_disjoint(&flat).is_ok();
    let manhattan_ok = flat.iter().zip(&pairing.pairs).all(|(p, &(u, v))| p.len() == manhattan(u, v) as usize);
    let max_len = flat.iter().map(RoutePath::len).max().unwrap_or(0);
    let obj = stats.as_object_mut().expect("stats serialize to an object");
    obj.insert("max_len".into(), json!(max_len));
    obj.insert("bound_10l".into(), json!(10 * l as usize));
    obj.insert("edge_disjoint".into(), json!(disjoint));
    if a.mode == Mode::TwoD {
        obj.insert("manhattan".into(), json!(manhattan_ok));
    }
    let sound = disjoint && max_len <= 10 * l as usize && (a.mode == Mode::ThreeD || manhattan_ok);
    let stats_text = serde_json::to_string(&stats).map_err(CliError::internal)?;
    let doc = RouteDoc { mode: a.mode, l, paths: docs, stats };
    write_file(&a.out, to_pretty(&doc)?.as_bytes())?;
    Ok(Outcome {
        exit: if sound { Exit::Pass } else { Exit::Internal },
        outputs: vec![a.out.clone()],
        stdout: a.stats.then_some(stats_text),
    })
}

// localize

fn cmd_localize(a: &LocalizeArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let text = inputs.read(&a.input)?;
    let src = AdaptiveCircuit::from_json(&text)?;
    let lc = localize_ideal(&src, a.mode)?;
    let violations = locality_check(&lc);
    if !violations.is_empty() {
        return Err(CliError::internal(format!("localized circuit is not local: {}", violations[0])));
    }
    write_file(&a.out, (lc.to_json() + "\n").as_bytes())?;
    let stats = if a.stats { Some(serde_json::to_string(&lc.stats).map_err(CliError::internal)?) } else { None };
    Ok(Outcome { exit: Exit::Pass, outputs: vec![a.out.clone()], stdout: stats })
}

// verify

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_outcome_id: Option<crate::circuit::OutcomeId>,
}

/// Second input: a localized document, or a plain circuit whose first
/// `n` qubits are compared directly.
fn parse_target(text: &str) -> Result<(AdaptiveCircuit, Option<LocalizedCircuit>), CliError> {
    let v: Value = serde_json::from_str(text).map_err(CliError::parse)?;
    if v.get("layout").is_some() {
        let lc = LocalizedCircuit::from_json(text)?;
        Ok((lc.circuit.clone(), Some(lc)))
    } else {
        Ok((AdaptiveCircuit::from_value(v)?, None))
    }
}

fn cmd_verify(a: &VerifyArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    if a.inputs.len() != 2 {
        return Err(CliError::parse(format!("verify takes two --in files, got {}", a.inputs.len())));
    }
    let src = AdaptiveCircuit::from_json(&inputs.read(&a.inputs[0])?)?;
    let (target, lc) = parse_target(&inputs.read(&a.inputs[1])?)?;
    src.check()?;
    target.check()?;
    let mut checks = Vec::new();
    match &lc {
        Some(lc) => {
            let v = locality_check(lc);
            checks.push(Check {
                name: "locality",
                pass: v.is_empty(),
                detail: v.first().map(|x| x.to_string()),
                failing_outcome_id: None,
            });
        }
        None => checks.push(Check {
            name: "locality",
            pass: true,
            detail: Some("skipped: plain circuit".into()),
            failing_outcome_id: None,
        }),
    }
    if target.n < src.n {
        return Err(CliError::precondition(format!("target has {} qubits, source has {}", target.n, src.n)));
    }
    let ids = src.outcome_ids();
    let keep: Vec<usize> = (0..src.n).collect();
    let ra = run_symbolic(&src, None)?;
    let rb = run_symbolic(&target, None)?;
    let eq = match symbolic_equivalent(&ra, &rb, &ids, &keep, &keep) {
        Ok(e) => e,
        Err(StabError::UnknownOutcome(id)) => Equivalence::OutcomesDiffer { first_id: id },
        Err(e) => return Err(e.into()),
    };
    checks.push(match eq {
        Equivalence::Equal => Check {
            name: "outcomes_and_state",
            pass: true,
            detail: Some(format!("{} source outcomes, {} logical qubits, exact", ids.len(), src.n)),
            failing_outcome_id: None,
        },
        Equivalence::OutcomesDiffer { first_id } => Check {
            name: "outcomes_and_state",
            pass: false,
            detail: Some(format!("joint outcome law differs once outcome {first_id} is included")),
            failing_outcome_id: Some(first_id),
        },
        Equivalence::StateDiffers(d) => {
            Check { name: "outcomes_and_state", pass: false, detail: Some(d), failing_outcome_id: None }
        }
    });
    let pass = checks.iter().all(|c| c.pass);
    let doc = json!({"verdict": if pass { "PASS" } else { "FAIL" }, "pass": pass, "checks": checks});
    write_file(&a.out, to_pretty(&doc)?.as_bytes())?;
    Ok(Outcome {
        exit: if pass { Exit::Pass } else { Exit::StatisticalFail },
        outputs: vec![a.out.clone()],
        stdout: None,
    })
}

// montecarlo

fn gadget_label(spec: &GadgetSpec) -> String {
    serde_json::to_value(&spec.kind)
        .ok()
        .and_then(|v| v.get("gadget").and_then(Value::as_str).map(str::to_string))
        .unwrap_or_else(|| "gadget".into())
}

/// A plan document from `ft-plan` (with a "plan" field) or a bare plan.
fn plan_from_value(v: Value) -> Result<FtPlan, CliError> {
    let inner = match v {
        Value::Object(mut o) if o.contains_key("plan") => o.remove("plan").expect("checked"),
        other => other,
    };
    let plan: FtPlan = serde_json::from_value(inner).map_err(CliError::parse)?;
    plan.verify()?;
    Ok(plan)
}

fn cmd_montecarlo(a: &MonteCarloArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let text = inputs.read(&a.input)?;
    let v: Value = serde_json::from_str(&text).map_err(CliError::parse)?;
    let p = NoiseStrength::new(a.p)?;
    if !(a.sigma >= 0.0) || a.max_subset == 0 || a.max_subset > 4 {
        return Err(CliError::precondition("need sigma >= 0 and 1 <= max-subset <= 4"));
    }
    let seeds = SeedStream::new(a.seed);
    let mut csv_bytes = Vec::new();
    let pass = if v.get("gadget").is_some() {
        let mut spec: GadgetSpec = serde_json::from_value(v).map_err(CliError::parse)?;
        if let Some(c) = a.claimed_bound {
            spec.claimed_strength = Some(c);
        }
        spec.validate()?;
        let bound = spec.bound(p)?.value();
        let n = spec.output_qubits();
        let mut srng = seeds.rng(u64::MAX);
        let mut subsets = Vec::new();
        for size in 1..=a.max_subset.min(n) {
            subsets.extend(sample_subsets(n, size, a.subsets_per_size, &mut srng));
        }
        let counter = sharded_support_count(subsets, a.trials, &seeds, |rng| spec.sample_effective(p, rng));
        let report =
            crate::noise::LsReport { rows: counter.rows_with(&gadget_label(&spec), a.sigma, |s| bound.powi(s as i32)) };
        report.write_csv(&mut csv_bytes).map_err(CliError::internal)?;
        report.pass()
    } else {
        let plan = plan_from_value(v)?;
        let cfg = SurrogateConfig {
            trials: a.trials,
            max_subset: a.max_subset,
            subsets_per_size: a.subsets_per_size,
            sigma: a.sigma,
        };
        let report = surrogate_montecarlo(&plan, p, cfg, &seeds)?;
        report.write_csv(&mut csv_bytes).map_err(CliError::internal)?;
        report.pass()
    };
    write_file(&a.out, &csv_bytes)?;
    Ok(Outcome {
        exit: if pass { Exit::Pass } else { Exit::StatisticalFail },
        outputs: vec![a.out.clone()],
        stdout: None,
    })
}

// ft-plan

fn cmd_ft_plan(a: &FtPlanArgs, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let localized = match &a.input {
        Some(path) => {
            let src = AdaptiveCircuit::from_json(&inputs.read(path)?)?;
            Some(ft_localize(&src, a.mode)?)
        }
        None => None,
    };
    let n = match (&localized, a.n) {
        (Some(lp), _) => lp.n,
        (None, Some(n)) => n,
        (None, None) => return Err(CliError::precondition("need --n or --in")),
    };
    if n == 0 {
        return Err(CliError::precondition("n must be positive"));
    }
    let plan = ft_plan_for_n(a.mode, n)?;
    plan.verify()?;
    let n_even = (n + n % 2).max(2) as u64;
    let noise = match a.p {
        Some(p) => serde_json::to_value(effective_strength(a.mode, NoiseStrength::new(p)?)?),
        None => serde_json::to_value(crate::ftarch::compose_noise(a.mode)),
    }
    .map_err(CliError::internal)?;
    let (bus_qubits, stitch_qubits) = plan.bus_qubit_counts();
    let summary = json!({
        "mode": a.mode,
        "n": n_even,
        "l": plan.l,
        "m": plan.m,
        "lattice": plan.lattice,
        "total_qubits": plan.total_qubits(n_even),
        "buses": plan.buses.len(),
        "stitches": plan.stitches.len(),
        "max_segment": plan.max_segment(),
        "bus_qubits": bus_qubits,
        "stitch_qubits": stitch_qubits,
        "p0": plan.p0(),
        "width_check": plan.width_check,
        "noise": noise,
    });
    let mut doc = json!({"summary": summary, "plan": plan});
    if let Some(lp) = localized {
        doc["localized"] = serde_json::to_value(lp).map_err(CliError::internal)?;
    }
    write_file(&a.out, to_pretty(&doc)?.as_bytes())?;
    Ok(Outcome { exit: Exit::Pass, outputs: vec![a.out.clone()], stdout: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_hash_matches_git_blob_framing() {
        // `printf 'hello\n' | sha256sum` over "blob 6\0hello\n"
        let mut h = Sha256::new();
        h.update(b"blob 6\0hello\n");
        let want: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(content_hash(b"hello\n"), want);
        assert_ne!(content_hash(b"hello\n"), content_hash(b"hello"));
    }

    #[test]
    fn pairing_formats() {
        let p = parse_pairing("[[[0,0],[1,1]]]", Mode::TwoD).unwrap();
        assert_eq!(p.pairs, vec![(Vertex::new(0, 0, 0), Vertex::new(1, 1, 0))]);
        let q = parse_pairing(r#"{"pairs": [[[0,0,0],[1,1,0]]]}"#, Mode::ThreeD).unwrap();
        assert_eq!(p, q);
        assert!(parse_pairing("[[[0,0]]]", Mode::TwoD).is_err());
        assert!(parse_pairing("[[[0,-1],[1,1]]]", Mode::TwoD).is_err());
        assert!(parse_pairing("{", Mode::TwoD).is_err());
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(manifest_path(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.manifest.json"));
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(CircuitError::Json("x".into())).exit, Exit::Parse);
        assert_eq!(CliError::from(RoutingError::OddSide(3)).exit, Exit::Precondition);
        assert_eq!(CliError::from(FtError::Internal("x".into())).exit, Exit::Internal);
    }
}
