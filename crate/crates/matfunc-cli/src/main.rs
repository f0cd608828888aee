//! Command-line front end: instance generation, estimation with the regime
//! router, oracle verification, and deterministic benchmark sweeps.
//!
//! Exit codes: 0 ok, 1 verify failure, 2 usage error, 3 hard-regime
//! refusal, 4 oracle unavailable (dimension above the dense cap).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use matfunc::access::AccessForm;
use matfunc::circuit::{Circuit, Gate};
use matfunc::clock::{Encoding, FamilyTag};
use matfunc::error::Error;
use matfunc::estimate::{decide, Algorithm, Decision, EstimateRequest, Target};
use matfunc::io::{regenerate, InstanceFile, LoadedInstance};
use matfunc::poly::FunctionSpec;
use matfunc::Caps;

const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_HARD_REGIME: u8 = 3;
const EXIT_ORACLE_UNAVAILABLE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "matfunc",
    about = "Matrix-element and local-measurement estimation for Hermitian matrix functions",
    version
)]
struct Cli {
    /// Worker threads for Monte Carlo sampling (results are independent of
    /// this value)
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a clock-construction instance file
    Gen(GenArgs),
    /// Run an estimator on an instance
    Estimate(EstimateArgs),
    /// Print the algorithm the router selects
    Route(EstimateArgs),
    /// Compare estimator output against the dense oracle and the stored
    /// prediction
    Verify(VerifyArgs),
    /// Run a sweep file and emit TSV rows
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family tag: janzing | walk-lm | cheby-ballistic | peres | hhl
    #[arg(long)]
    family: String,
    /// Gate list JSON, e.g. '[{"h":0},{"toffoli":[0,1,2]},{"cnot":[0,1]}]'
    #[arg(long)]
    circuit: String,
    /// Qubit count (defaults to 1 + the largest index in the gate list)
    #[arg(long)]
    qubits: Option<usize>,
    /// Function JSON for families that take one (janzing)
    #[arg(long)]
    function: Option<String>,
    /// Matrix prefactor in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// compact | unary
    #[arg(long, default_value = "compact")]
    encoding: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct EstimateArgs {
    /// Instance file path
    #[arg(long)]
    instance: PathBuf,
    /// entry:i,j | lm:i | nlm:i (defaults to the instance's stored target)
    #[arg(long)]
    target: Option<String>,
    /// Function JSON (defaults to the instance's stored function)
    #[arg(long)]
    function: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Decision threshold; adds a yes/no/undecided field
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// auto | exact_path | mc_sparse | mc_pauli | supersparse_cb |
    /// supersparse_pauli | sketch | norm_decay
    #[arg(long, default_value = "auto")]
    algorithm: String,
    /// json | tsv
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    algorithm: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Sweep JSON: a list of {instance, target?, function?, eps, delta,
    /// seed, algorithm?} rows
    #[arg(long)]
    sweep: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn caps_from_env() -> Caps {
    match std::env::var("MATFUNC_DENSE_CAP")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(cap) => Caps::with_dense_cap(cap),
        None => Caps::default(),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_target(text: &str) -> Result<Target, ExitCode> {
    Target::parse(text).ok_or_else(|| usage_error(&format!("bad target {text:?}")))
}

fn parse_function(text: &str) -> Result<FunctionSpec, ExitCode> {
    serde_json::from_str(text).map_err(|e| usage_error(&format!("bad function JSON: {e}")))
}

fn load_instance(path: &PathBuf, caps: &Caps) -> Result<LoadedInstance, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage_error(&format!("cannot read {}: {e}", path.display())))?;
    let file = InstanceFile::from_json_str(&text)
        .map_err(|e| usage_error(&format!("cannot parse {}: {e}", path.display())))?;
    file.reify(caps)
        .map_err(|e| usage_error(&format!("cannot rebuild instance: {e}")))
}

fn build_request(
    loaded: &LoadedInstance,
    target: &Option<String>,
    function: &Option<String>,
    eps: f64,
    delta: f64,
    g: Option<f64>,
    seed: u64,
    algorithm: &str,
) -> Result<EstimateRequest, ExitCode> {
    let target = match target {
        Some(t) => parse_target(t)?,
        None => loaded
            .target
            .ok_or_else(|| usage_error("no target given and none stored in the instance"))?,
    };
    let function = match function {
        Some(f) => parse_function(f)?,
        None => loaded
            .function
            .ok_or_else(|| usage_error("no function given and none stored in the instance"))?,
    };
    let algorithm = Algorithm::parse(algorithm)
        .ok_or_else(|| usage_error(&format!("unknown algorithm {algorithm:?}")))?;
    Ok(EstimateRequest {
        target,
        function,
        eps,
        delta,
        threshold: g,
        seed,
        algorithm,
    })
}

fn cmd_gen(args: &GenArgs, caps: &Caps) -> ExitCode {
    let family = match FamilyTag::parse(&args.family) {
        Some(f) => f,
        None => return usage_error(&format!("unknown family {:?}", args.family)),
    };
    let gates: Vec<Gate> = match serde_json::from_str(&args.circuit) {
        Ok(g) => g,
        Err(e) => return usage_error(&format!("bad circuit JSON: {e}")),
    };
    let qubits = args.qubits.unwrap_or_else(|| {
        gates
            .iter()
            .flat_map(|g| g.qubits())
            .max()
            .map_or(1, |q| q + 1)
    });
    let circuit = match Circuit::new(qubits, gates) {
        Ok(c) => c,
        Err(e) => return usage_error(&format!("bad circuit: {e}")),
    };
    let encoding = match args.encoding.as_str() {
        "compact" => Encoding::Compact,
        "unary" => Encoding::Unary,
        other => return usage_error(&format!("unknown encoding {other:?}")),
    };
    let function = match &args.function {
        Some(f) => match parse_function(f) {
            Ok(f) => Some(f),
            Err(code) => return code,
        },
        None => None,
    };
    match regenerate(family, &circuit, encoding, args.scale, function, caps) {
        Ok(ci) => {
            let file = InstanceFile::from_clock(&ci);
            let text = match file.to_json_string() {
                Ok(t) => t,
                Err(e) => return usage_error(&format!("serialization failed: {e}")),
            };
            if write_or_print(&args.out, &text).is_err() {
                return usage_error("cannot write output file");
            }
            ExitCode::SUCCESS
        }
        Err(e) => usage_error(&format!("generation failed: {e}")),
    }
}

fn run_estimate(
    args: &EstimateArgs,
    caps: &Caps,
) -> Result<(serde_json::Value, Option<Decision>), ExitCode> {
    let loaded = load_instance(&args.instance, caps)?;
    let req = build_request(
        &loaded,
        &args.target,
        &args.function,
        args.eps,
        args.delta,
        args.g,
        args.seed,
        &args.algorithm,
    )?;
    match matfunc::estimators::estimate(&loaded.instance, &req, caps) {
        Ok(est) => {
            let decision = req.threshold.map(|g| decide(&est, g));
            Ok((est.to_json(decision), decision))
        }
        Err(Error::HardRegime { row }) => {
            eprintln!("refused: hard regime per the problem catalog: {row}");
            Err(ExitCode::from(EXIT_HARD_REGIME))
        }
        Err(e) => Err(usage_error(&format!("estimation failed: {e}"))),
    }
}

fn cmd_estimate(args: &EstimateArgs, caps: &Caps) -> ExitCode {
    let (json, _) = match run_estimate(args, caps) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let content = match args.format.as_str() {
        "json" => format!("{json}\n"),
        "tsv" => {
            let d = json
                .get("decision")
                .and_then(|v| v.as_str())
                .unwrap_or("");
            format!(
                "value_re\tvalue_im\thalf_width\tsamples\talgorithm\tdecision\n{}\t{}\t{}\t{}\t{}\t{}\n",
                json["value"]["re"], json["value"]["im"], json["half_width"], json["samples"],
                json["algorithm"].as_str().unwrap_or(""), d
            )
        }
        other => return usage_error(&format!("unknown format {other:?}")),
    };
    if write_or_print(&args.out, &content).is_err() {
        return usage_error("cannot write output file");
    }
    ExitCode::SUCCESS
}

fn cmd_route(args: &EstimateArgs, caps: &Caps) -> ExitCode {
    let loaded = match load_instance(&args.instance, caps) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let req = match build_request(
        &loaded,
        &args.target,
        &args.function,
        args.eps,
        args.delta,
        args.g,
        args.seed,
        &args.algorithm,
    ) {
        Ok(r) => r,
        Err(code) => return code,
    };
    match matfunc::estimators::route(&loaded.instance, &req, caps) {
        Ok(alg) => {
            println!("{}", alg.tag());
            ExitCode::SUCCESS
        }
        Err(Error::HardRegime { row }) => {
            eprintln!("refused: hard regime per the problem catalog: {row}");
            ExitCode::from(EXIT_HARD_REGIME)
        }
        Err(e) => usage_error(&format!("routing failed: {e}")),
    }
}

/// Dense-oracle value of the request's target.
fn oracle_value(
    loaded: &LoadedInstance,
    req: &EstimateRequest,
    caps: &Caps,
) -> Result<Complex64, Error> {
    let d = match &loaded.instance.access {
        AccessForm::Pauli(p) => p.operator().to_dense(caps.qubit_cap)?,
        other => other.to_dense(caps.dense_cap)?,
    };
    let f = req.function;
    let scalar = move |x: f64| f.eval_scalar(x);
    match req.target {
        Target::Entry { i, j } => matfunc::dense::exact_entry(&d, scalar, i, j),
        Target::Lm { i } => Ok(Complex64::new(
            matfunc::dense::exact_lm(&d, scalar, i)?,
            0.0,
        )),
        Target::Nlm { i } => Ok(Complex64::new(
            matfunc::dense::exact_normalized_lm(&d, scalar, i)?,
            0.0,
        )),
    }
}

fn cmd_verify(args: &VerifyArgs, caps: &Caps) -> ExitCode {
    let loaded = match load_instance(&args.instance, caps) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let req = match build_request(
        &loaded,
        &args.target,
        &args.function,
        args.eps,
        args.delta,
        None,
        args.seed,
        &args.algorithm,
    ) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let oracle = match oracle_value(&loaded, &req, caps) {
        Ok(v) => v,
        Err(Error::CapExceeded { what, have, cap }) => {
            let report = serde_json::json!({
                "status": "oracle unavailable",
                "reason": format!("{what}: {have} exceeds cap {cap}"),
            });
            let _ = write_or_print(&args.out, &format!("{report}\n"));
            return ExitCode::from(EXIT_ORACLE_UNAVAILABLE);
        }
        Err(e) => return usage_error(&format!("oracle evaluation failed: {e}")),
    };
    let est = match matfunc::estimators::estimate(&loaded.instance, &req, caps) {
        Ok(e) => e,
        Err(Error::HardRegime { row }) => {
            eprintln!("refused: hard regime per the problem catalog: {row}");
            return ExitCode::from(EXIT_HARD_REGIME);
        }
        Err(e) => return usage_error(&format!("estimation failed: {e}")),
    };
    let est_dev = (est.value - oracle).norm();
    let est_ok = est_dev <= est.half_width + 1e-9;
    let mut checks = vec![serde_json::json!({
        "check": "estimate vs oracle",
        "deviation": est_dev,
        "half_width": est.half_width,
        "pass": est_ok,
    })];
    let mut all_ok = est_ok;
    // declared-metadata audit
    match matfunc::access::audit_instance(&loaded.instance, caps.dense_cap, args.seed) {
        Ok(violations) => {
            let ok = violations.is_empty();
            checks.push(serde_json::json!({
                "check": "declared metadata audit",
                "violations": violations,
                "pass": ok,
            }));
            all_ok = all_ok && ok;
        }
        Err(e) => {
            checks.push(serde_json::json!({
                "check": "declared metadata audit",
                "violations": [format!("audit failed to run: {e}")],
                "pass": false,
            }));
            all_ok = false;
        }
    }
    // predicted value, when the instance stores one for this target
    let stored_applies = loaded.target == Some(req.target) && loaded.function == Some(req.function);
    if stored_applies {
        let predicted = match req.target {
            Target::Nlm { .. } => loaded.normalized_predicted.map(|v| Complex64::new(v, 0.0)),
            _ => loaded.predicted,
        };
        if let Some(p) = predicted {
            let dev = (p - oracle).norm();
            let ok = dev <= 1e-8;
            checks.push(serde_json::json!({
                "check": "prediction vs oracle",
                "deviation": dev,
                "pass": ok,
            }));
            all_ok = all_ok && ok;
        }
    }
    let report = serde_json::json!({
        "status": if all_ok { "pass" } else { "fail" },
        "oracle": {"re": oracle.re, "im": oracle.im},
        "estimate": est.to_json(None),
        "checks": checks,
    });
    let _ = write_or_print(&args.out, &format!("{report}\n"));
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAIL)
    }
}

#[derive(serde::Deserialize)]
struct SweepRow {
    instance: PathBuf,
    target: Option<String>,
    function: Option<String>,
    eps: f64,
    delta: f64,
    seed: u64,
    algorithm: Option<String>,
}

fn cmd_bench(args: &BenchArgs, caps: &Caps) -> ExitCode {
    let text = match std::fs::read_to_string(&args.sweep) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("cannot read sweep file: {e}")),
    };
    let rows: Vec<SweepRow> = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return usage_error(&format!("bad sweep JSON: {e}")),
    };
    let mut out = String::from(
        "instance\talgorithm\ttarget\tfunction\teps\tdelta\tseed\tsamples\twall_time_s\terror\tvalue_re\tvalue_im\thalf_width\n",
    );
    for row in &rows {
        let loaded = match load_instance(&row.instance, caps) {
            Ok(l) => l,
            Err(code) => return code,
        };
        let req = match build_request(
            &loaded,
            &row.target,
            &row.function,
            row.eps,
            row.delta,
            None,
            row.seed,
            row.algorithm.as_deref().unwrap_or("auto"),
        ) {
            Ok(r) => r,
            Err(code) => return code,
        };
        let started = Instant::now();
        let est = match matfunc::estimators::estimate(&loaded.instance, &req, caps) {
            Ok(e) => e,
            Err(Error::HardRegime { row }) => {
                eprintln!("refused: hard regime per the problem catalog: {row}");
                return ExitCode::from(EXIT_HARD_REGIME);
            }
            Err(e) => return usage_error(&format!("estimation failed: {e}")),
        };
        let wall = started.elapsed().as_secs_f64();
        let error = oracle_value(&loaded, &req, caps)
            .map(|o| format!("{:.6e}", (est.value - o).norm()))
            .unwrap_or_default();
        let function_text =
            serde_json::to_string(&req.function).unwrap_or_else(|_| "?".to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{:.12e}\t{:.12e}\t{:.6e}\n",
            row.instance.display(),
            est.algorithm.tag(),
            req.target,
            function_text,
            req.eps,
            req.delta,
            req.seed,
            est.samples_used,
            wall,
            error,
            est.value.re,
            est.value.im,
            est.half_width,
        ));
    }
    if write_or_print(&args.out, &out).is_err() {
        return usage_error("cannot write output file");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // worker count only affects scheduling; chunked reductions keep
        // results byte-identical
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    let caps = caps_from_env();
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, &caps),
        Command::Estimate(args) => cmd_estimate(args, &caps),
        Command::Route(args) => cmd_route(args, &caps),
        Command::Verify(args) => cmd_verify(args, &caps),
        Command::Bench(args) => cmd_bench(args, &caps),
    }
}
