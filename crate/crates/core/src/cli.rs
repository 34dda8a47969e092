//! Command-line front end. [`run`] parses arguments and executes a command
//! in-process; `main` only forwards its result to the process.
//!
//! Exit codes: 0 affirmative verdict, 1 negative verdict, 2 usage or input
//! error. JSON output has alphabetically ordered keys and floats rounded to
//! 12 significant digits, so identical invocations give identical bytes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::haar::haar_random_unitary;
use crate::algebra::matrix::{pauli, unitarity_deviation, Amplitude, Matrix};
use crate::error::Error;
use crate::feasibility::{analyze, haar_scan, SCAN_TOL, SUPPORT_THRESHOLD};
use crate::protocol::{
    basis_from_s, bell_protocol, branch_label, ghz_protocol, label_correspondence, matrix_from_json, matrix_to_json,
    protocol_from_basis, run_teleport, sample_teleport, w_like_protocol, MatrixJson, MeasurementBasis, ProtocolJson,
    TeleportProtocol, CONSTRUCTION_TOL,
};
use crate::states::{
    bloch_qubit, make_named_state, parse_triple, w_class_to_w_like, w_like_from_params, NamedState, PureState,
    WClassParams, WLikeParams,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "teleport-kit",
    version,
    about = "Teleport a qubit through three-qubit shared states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a teleportation protocol exactly and by sampling.
    Teleport(TeleportArgs),
    /// Full feasibility report for a three-qubit shared state.
    Analyze(AnalyzeArgs),
    /// Haar-random basis scan.
    Scan(ScanArgs),
    /// Generate the W-like protocol fixed by Bob's unitary S.
    BasisGen(BasisGenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SharedArgs {
    /// ghz, w, bell[:m,n], w-like:GAMMA,PHI,OMEGA or w-class:N,P,DELTA
    #[arg(long, conflicts_with = "state_file")]
    shared: Option<String>,
    /// JSON state file `{nQubits, amplitudes}`.
    #[arg(long)]
    state_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TeleportArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Protocol JSON as written by `basis-gen`.
    #[arg(long, conflicts_with_all = ["shared", "state_file", "basis"])]
    protocol_file: Option<PathBuf>,
    /// `known` or `haar:SEED`
    #[arg(long, default_value = "known")]
    basis: String,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0, conflicts_with = "random")]
    phi: f64,
    /// Haar-random message drawn from --seed.
    #[arg(long, conflicts_with = "theta")]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 1e-10, value_parser = positive_real)]
    tolerance: f64,
    /// Exit 1 unless the total fidelity is within tolerance of 1.
    #[arg(long)]
    expect_perfect: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    shared: SharedArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Use the known perfect basis as scan trial 0.
    #[arg(long)]
    inject_known_basis: bool,
    /// Amplitudes at or below this count as absent in the componentwise
    /// disentangler test.
    #[arg(long, default_value_t = SUPPORT_THRESHOLD, value_parser = positive_real)]
    support_threshold: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    shared: SharedArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = SCAN_TOL, value_parser = positive_real)]
    tolerance: f64,
    #[arg(long)]
    inject_known_basis: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BasisGenArgs {
    /// GAMMA,PHI,OMEGA in radians
    #[arg(long, allow_hyphen_values = true)]
    params: String,
    /// I, X, Y, Z, H, diag(a,b), an inline JSON matrix, or a JSON file
    #[arg(long = "S", default_value = "I")]
    s: String,
    #[command(flatten)]
    output: OutputArgs,
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive real")),
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
        },
    }
}

/// A rendered report plus its verdict.
struct Report {
    code: i32,
    json: Value,
    text: String,
}

fn dispatch(command: Command) -> anyhow::Result<Outcome> {
    let (report, output) = match command {
        Command::Teleport(a) => (teleport(&a)?, a.output),
        Command::Analyze(a) => (analyze_cmd(&a)?, a.output),
        Command::Scan(a) => (scan(&a)?, a.output),
        Command::BasisGen(a) => (basis_gen(&a)?, a.output),
    };
    let body = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&canonical(report.json))?;
            s.push('\n');
            s
        }
        Format::Text => report.text,
    };
    let stdout = match &output.out {
        Some(path) => {
            fs::write(path, &body).with_context(|| format!("cannot write {}", path.display()))?;
            String::new()
        }
        None => body,
    };
    Ok(Outcome {
        code: report.code,
        stdout,
        stderr: String::new(),
    })
}

/// Rounds every float to 12 significant digits. Object keys are already
/// sorted: `serde_json::Map` is a `BTreeMap`.
fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            json!(round_sig(x))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        // Also folds -0.0.
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn input_hash(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(&canonical(inputs.clone())).expect("JSON value serializes");
    hex::encode(Sha256::digest(bytes))
}

struct Resolved {
    label: String,
    state: PureState,
    /// Perfect protocol for this state, where one is known.
    known: Option<TeleportProtocol>,
}

fn resolve_shared(args: &SharedArgs) -> anyhow::Result<Resolved> {
    match (&args.shared, &args.state_file) {
        (Some(spec), _) => resolve_spec(spec),
        (None, Some(path)) => {
            let state = read_json::<PureState>(path)?;
            Ok(Resolved {
                label: format!("file:{}", path.display()),
                state,
                known: None,
            })
        }
        (None, None) => bail!("one of --shared or --state-file is required"),
    }
}

fn resolve_spec(spec: &str) -> anyhow::Result<Resolved> {
    let spec = spec.trim();
    let lower = spec.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("w-like:") {
        let p: WLikeParams = rest.parse()?;
        return Ok(Resolved {
            label: spec.to_string(),
            state: w_like_from_params(p),
            known: Some(w_like_protocol(p)),
        });
    }
    if let Some(rest) = lower.strip_prefix("w-class:") {
        let [n, p, delta] = parse_triple(rest)?;
        let q = w_class_to_w_like(WClassParams::new(n, p, delta)?);
        return Ok(Resolved {
            label: spec.to_string(),
            state: w_like_from_params(q),
            known: Some(w_like_protocol(q)),
        });
    }
    let name: NamedState = spec.parse()?;
    let known = match name {
        NamedState::Ghz => Some(ghz_protocol()),
        NamedState::Bell { m: 0, n: 0 } => Some(bell_protocol()),
        _ => None,
    };
    Ok(Resolved {
        label: name.to_string(),
        state: make_named_state(name),
        known,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {}", path.display()))
}

fn no_known_basis(label: &str) -> anyhow::Error {
    anyhow!("no perfect basis is known for `{label}`; pass --basis haar:SEED")
}

fn teleport(a: &TeleportArgs) -> anyhow::Result<Report> {
    let (label, basis_spec, protocol) = match &a.protocol_file {
        Some(path) => {
            let protocol: TeleportProtocol = read_json(path)?;
            (
                format!("file:{}", path.display()),
                "protocol-file".to_string(),
                protocol,
            )
        }
        None => {
            let shared = resolve_shared(&a.shared)?;
            let spec = a.basis.trim().to_ascii_lowercase();
            let protocol = if spec == "known" {
                shared.known.ok_or_else(|| no_known_basis(&shared.label))?
            } else if let Some(seed) = spec.strip_prefix("haar:") {
                let seed: u64 = seed.parse().map_err(|_| anyhow!("bad Haar seed `{seed}`"))?;
                let dim = shared.state.dim();
                let basis = MeasurementBasis::from_unitary(&haar_random_unitary(dim, seed))?;
                protocol_from_basis(shared.state, basis)?
            } else {
                bail!("--basis must be `known` or `haar:SEED`, got `{}`", a.basis);
            };
            (shared.label, spec, protocol)
        }
    };

    let message = if a.random {
        PureState::random(1, a.seed)
    } else {
        bloch_qubit(
            a.theta.ok_or_else(|| anyhow!("--theta or --random is required"))?,
            a.phi,
        )
    };
    if !a.phi.is_finite() || a.theta.is_some_and(|t| !t.is_finite()) {
        bail!("message angles must be finite");
    }

    let exact = run_teleport(&message, &protocol)?;
    let sampled = sample_teleport(&message, &protocol, a.trials, a.seed)?;
    let perfect = exact.total_fidelity >= 1.0 - a.tolerance;
    let code = if a.expect_perfect && !perfect { 1 } else { 0 };

    let bits = protocol.outcome_bits();
    let branches: Vec<Value> = exact
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "bobState": o.bob_state,
                "branchFidelity": o.branch_fidelity,
                "coefficient": protocol.coefficients()[o.index],
                "correction": matrix_to_json(&protocol.corrections()[o.index]),
                "index": o.index,
                "label": branch_label(o.index, bits),
                "probability": o.probability,
            })
        })
        .collect();
    let inputs = json!({
        "basis": basis_spec,
        "message": message,
        "protocol": ProtocolJson::from(protocol.clone()),
        "seed": a.seed,
        "trials": a.trials,
    });
    let json = json!({
        "basis": basis_spec,
        "branches": branches,
        "command": "teleport",
        "expectPerfect": a.expect_perfect,
        "inputHash": input_hash(&inputs),
        "message": message,
        "perfect": perfect,
        "sampling": {
            "frequencies": sampled.frequencies(),
            "histogram": sampled.histogram,
            "meanFidelity": sampled.mean_fidelity,
            "seed": sampled.seed,
            "trials": sampled.trials,
        },
        "sharedLabel": label,
        "sharedState": protocol.shared(),
        "tolerance": a.tolerance,
        "totalFidelity": exact.total_fidelity,
        "version": VERSION,
    });

    let mut text = String::new();
    let _ = writeln!(text, "shared  {label}");
    let _ = writeln!(text, "basis   {basis_spec}");
    let _ = writeln!(text, "branch  probability  fidelity");
    for o in &exact.outcomes {
        let f = o.branch_fidelity.map_or_else(|| "-".to_string(), |f| format!("{f:.6}"));
        let _ = writeln!(text, "{:<7} {:<12.6} {f}", branch_label(o.index, bits), o.probability);
    }
    let _ = writeln!(text, "total fidelity {:.6}", exact.total_fidelity);
    let _ = writeln!(
        text,
        "sampled {} trials, mean fidelity {:.6}",
        sampled.trials, sampled.mean_fidelity
    );
    Ok(Report { code, json, text })
}

fn injected_basis(shared: &Resolved, inject: bool) -> anyhow::Result<Option<MeasurementBasis>> {
    if !inject {
        return Ok(None);
    }
    match &shared.known {
        Some(p) => Ok(Some(p.basis().clone())),
        None => bail!("no perfect basis is known for `{}` to inject", shared.label),
    }
}

fn analyze_cmd(a: &AnalyzeArgs) -> anyhow::Result<Report> {
    let shared = resolve_shared(&a.shared)?;
    if shared.state.n_qubits() != 3 {
        bail!(
            "analyze needs a three-qubit shared state, got {} qubits",
            shared.state.n_qubits()
        );
    }
    let inject = injected_basis(&shared, a.inject_known_basis)?;
    let report = analyze(
        &shared.label,
        &shared.state,
        a.trials,
        a.seed,
        inject.as_ref(),
        a.support_threshold,
    )?;
    let code = if report.feasible { 0 } else { 1 };
    let json = serde_json::to_value(&report)?;
    let text = render_text(&canonical(json.clone()));
    Ok(Report { code, json, text })
}

fn scan(a: &ScanArgs) -> anyhow::Result<Report> {
    let shared = resolve_shared(&a.shared)?;
    let inject = injected_basis(&shared, a.inject_known_basis)?;
    let summary = haar_scan(&shared.state, a.trials, a.seed, inject.as_ref(), a.tolerance)?;
    let inputs = json!({
        "injected": a.inject_known_basis,
        "seed": a.seed,
        "sharedState": shared.state,
        "tolerance": a.tolerance,
        "trials": a.trials,
    });
    let json = json!({
        "command": "scan",
        "feasibleCount": summary.feasible_count,
        "injectedKnownBasis": a.inject_known_basis,
        "inputHash": input_hash(&inputs),
        "maxPassingBranches": summary.max_passing_branches,
        "seed": a.seed,
        "stateLabel": shared.label,
        "tolerance": a.tolerance,
        "trials": summary.trials,
        "version": VERSION,
    });
    let text = format!(
        "{}: feasible {}/{} (max passing branches {})\n",
        shared.label, summary.feasible_count, summary.trials, summary.max_passing_branches
    );
    Ok(Report { code: 0, json, text })
}

/// Parses Bob's unitary: a Pauli or Hadamard name, `diag(a,b)` with real
/// entries, an inline JSON matrix, or a path to one.
fn parse_s(spec: &str) -> anyhow::Result<Matrix> {
    let t = spec.trim();
    let named = match t.to_ascii_uppercase().as_str() {
        "I" => Some(pauli::identity()),
        "X" => Some(pauli::x()),
        "Y" => Some(pauli::y()),
        "Z" => Some(pauli::z()),
        "H" => Some(pauli::hadamard()),
        _ => None,
    };
    if let Some(m) = named {
        return Ok(m);
    }
    if let Some(inner) = t.strip_prefix("diag(").and_then(|r| r.strip_suffix(')')) {
        let entries: Vec<Amplitude> = inner
            .split(',')
            .map(|x| x.trim().parse::<f64>().map(|v| Amplitude::new(v, 0.0)))
            .collect::<Result<_, _>>()
            .map_err(|_| anyhow!("malformed diag(...) in --S `{t}`"))?;
        return Ok(Matrix::diag(&entries));
    }
    let j: MatrixJson = if t.starts_with('[') {
        serde_json::from_str(t).context("malformed inline matrix for --S")?
    } else {
        read_json(Path::new(t))?
    };
    Ok(matrix_from_json(&j)?)
}

fn basis_gen(a: &BasisGenArgs) -> anyhow::Result<Report> {
    let params: WLikeParams = a.params.parse()?;
    let s = parse_s(&a.s)?;
    if s.rows() != 2 || s.cols() != 2 {
        bail!("S must be 2x2, got {}x{}", s.rows(), s.cols());
    }
    let dev = unitarity_deviation(&s);
    if dev > CONSTRUCTION_TOL {
        bail!("S is not unitary (max |S^dag S - I| = {dev:e})");
    }
    let protocol = match basis_from_s(params, &s) {
        Err(Error::NotUnitary { deviation }) => bail!("S is not unitary (max |S^dag S - I| = {deviation:e})"),
        other => other?,
    };
    let reference = w_like_protocol(params);
    let live = protocol.live_branches();
    let correspondence: Vec<Value> = label_correspondence(protocol.basis(), &live, reference.basis())
        .into_iter()
        .map(|(i, j, f)| json!({ "fidelity": f, "generated": i, "reference": j }))
        .collect();

    let mut json = serde_json::to_value(ProtocolJson::from(protocol))?;
    let obj = json.as_object_mut().expect("protocol serializes to an object");
    obj.insert("labelCorrespondence".into(), Value::Array(correspondence));
    obj.insert("params".into(), serde_json::to_value(params)?);
    obj.insert("s".into(), serde_json::to_value(matrix_to_json(&s))?);
    obj.insert("version".into(), json!(VERSION));
    let text = render_text(&canonical(json.clone()));
    Ok(Report { code: 0, json, text })
}

/// Flattens a JSON value into `path: value` lines.
fn render_text(v: &Value) -> String {
    fn walk(v: &Value, path: &str, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let p = if path.is_empty() {
                        k.clone()
                    } else {
                        format!("{path}.{k}")
                    };
                    walk(v, &p, out);
                }
            }
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let _ = writeln!(out, "{path}: {}", Value::Array(a.clone()));
            }
            Value::Array(a) => {
                for (i, v) in a.iter().enumerate() {
                    walk(v, &format!("{path}[{i}]"), out);
                }
            }
            other => {
                let _ = writeln!(out, "{path}: {other}");
            }
        }
    }
    let mut out = String::new();
    walk(v, "", &mut out);
    out
}
