use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use quadbench_core::bench::{
    emit_report, realization, run_experiment, run_suite, Execution, Experiment, ReportFormat, TOLERANCES,
};
use quadbench_core::drivers::{integrate_heap, integrate_recursive, DriverConfig};
use quadbench_core::estimators::{self, Estimator};
use quadbench_core::rules;
use quadbench_core::testbed::{Family, TestInstance};

/// Benchmark harness for adaptive-quadrature error estimators.
#[derive(Parser, Debug)]
#[command(name = "quadbench", version)]
struct Cli {
    /// key=value file with defaults for bench and experiment options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// False-positive / false-negative tables.
    Bench(BenchArgs),
    /// Full adaptive runs on the Lyness or Waldvogel integrand.
    Experiment(ExperimentArgs),
    /// Integrate one test instance.
    Integrate(IntegrateArgs),
    /// Print a rule's nodes and weights.
    Rules {
        #[arg(long)]
        dump: String,
    },
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Estimator name or `all`.
    #[arg(long)]
    estimator: Option<String>,
    /// Family name or `all`.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated relative tolerances.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// csv or markdown.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every drawn instance, one record per line.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    which: String,
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long)]
    estimator: String,
    #[arg(long)]
    family: String,
    /// Instance parameter, e.g. `alpha=0.3`; repeatable.
    #[arg(long = "param", value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    /// Tolerance relative to the exact integral.
    #[arg(long)]
    tol: f64,
    /// recursive or heap.
    #[arg(long, default_value = "recursive")]
    driver: String,
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// Errors that map to the "invalid arguments" exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn load_config(path: Option<&Path>) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    let Some(path) = path else { return Ok(map) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// CLI value, else config value, else default.
fn pick<T: std::str::FromStr>(cli: Option<T>, cfg: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    if let Some(v) = cli {
        return Ok(v);
    }
    match cfg.get(key) {
        Some(s) => s.parse().map_err(|_| usage(format!("config: bad value `{s}` for `{key}`"))),
        None => Ok(default),
    }
}

fn estimators_for(name: &str) -> Result<Vec<Box<dyn Estimator>>> {
    if name == "all" {
        return Ok(estimators::all());
    }
    name.split(',').map(|n| estimators::by_name(n.trim()).map_err(|e| usage(e.to_string()))).collect()
}

fn families_for(name: &str) -> Result<Vec<Family>> {
    if name == "all" {
        return Ok(Family::TABLE.to_vec());
    }
    name.split(',').map(|n| n.trim().parse::<Family>().map_err(|e| usage(e.to_string()))).collect()
}

fn parse_tols(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(usage(format!("bad tolerance `{t}`"))),
        })
        .collect()
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench(args: BenchArgs, cfg: &BTreeMap<String, String>, exec: Execution) -> Result<ExitCode> {
    let ests = estimators_for(&pick(args.estimator, cfg, "estimator", "all".to_string())?)?;
    let fams = families_for(&pick(args.family, cfg, "family", "all".to_string())?)?;
    let default_tols = TOLERANCES.map(|t| format!("{t:e}")).join(",");
    let tols = parse_tols(&pick(args.tol, cfg, "tol", default_tols)?)?;
    let realizations = pick(args.realizations, cfg, "realizations", 1000usize)?;
    if realizations == 0 {
        return Err(usage("--realizations must be positive"));
    }
    let seed = pick(args.seed, cfg, "seed", 42u64)?;
    let format: ReportFormat =
        pick(args.format, cfg, "format", "csv".to_string())?.parse().map_err(|e: quadbench_core::QuadError| usage(e.to_string()))?;
    let out = args.out.or_else(|| cfg.get("out").map(PathBuf::from));

    if let Some(path) = &args.manifest {
        let mut text = String::new();
        for e in &ests {
            for &fam in &fams {
                for i in 0..realizations as u64 {
                    let inst = realization(seed, fam, i, e.config().test_degree);
                    let _ = writeln!(text, "estimator={} index={i} {inst}", e.name());
                }
            }
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }

    let cells = run_suite(&ests, &fams, &tols, realizations, seed, exec);
    write_out(out.as_deref(), &emit_report(&cells, format))?;
    let worst = cells.iter().map(|c| c.eval_errors as f64 / c.realizations as f64).fold(0.0, f64::max);
    if worst > 0.01 {
        eprintln!("evaluation errors in {:.2}% of realizations of at least one cell", 100.0 * worst);
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(args: ExperimentArgs, cfg: &BTreeMap<String, String>, exec: Execution) -> Result<ExitCode> {
    let which: Experiment = args.which.parse().map_err(|e: quadbench_core::QuadError| usage(e.to_string()))?;
    let name = pick(args.estimator, cfg, "estimator", "qag".to_string())?;
    let ests = estimators_for(&name)?;
    let realizations = pick(args.realizations, cfg, "realizations", 1000usize)?;
    let seed = pick(args.seed, cfg, "seed", 42u64)?;
    let tol = pick(args.tol, cfg, "tol", 1e-9)?;
    let max_depth = pick(args.max_depth, cfg, "max_depth", DriverConfig::default().max_depth)?;
    let dcfg = DriverConfig { max_depth, ..DriverConfig::default() };
    let mut code = ExitCode::SUCCESS;
    for e in &ests {
        let s = run_experiment(which, &**e, realizations, tol, seed, dcfg, exec).map_err(|e| usage(e.to_string()))?;
        println!(
            "estimator={} function={} realizations={} failures={} mean_evals={:.1} depth_limited={} budget_exhausted={} eval_errors={}",
            s.estimator,
            s.function,
            s.realizations,
            s.failures,
            s.mean_evals,
            s.depth_limited,
            s.budget_exhausted,
            s.eval_errors
        );
        if s.eval_errors as f64 > 0.01 * realizations as f64 {
            code = ExitCode::from(3);
        }
    }
    Ok(code)
}

fn integrate(args: IntegrateArgs) -> Result<ExitCode> {
    let est = estimators::by_name(&args.estimator).map_err(|e| usage(e.to_string()))?;
    let fam: Family = args.family.parse().map_err(|e: quadbench_core::QuadError| usage(e.to_string()))?;
    let inst = TestInstance::from_params(fam, &args.params).map_err(|e| usage(e.to_string()))?;
    if !(args.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let f = |x: f64| inst.eval(x);
    let cfg = DriverConfig { reference: Some(inst.reference), ..DriverConfig::default() };
    let r = match args.driver.as_str() {
        "recursive" => integrate_recursive(&*est, &f, inst.a, inst.b, args.tol, cfg)?,
        "heap" => integrate_heap(&*est, &f, inst.a, inst.b, args.tol * inst.reference.abs(), cfg)?,
        d => return Err(usage(format!("unknown driver `{d}`"))),
    };
    println!("instance: {inst}");
    println!("value={:e} reference={:e} error={:e}", r.value, inst.reference, (r.value - inst.reference).abs());
    println!("error_bound={:e} evals={} intervals={} status={}", r.error_bound, r.evals, r.intervals, r.status);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load_config(cli.config.as_deref())?;
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Bench(a) => bench(a, &cfg, exec),
        Command::Experiment(a) => experiment(a, &cfg, exec),
        Command::Integrate(a) => integrate(a),
        Command::Rules { dump } => {
            let r = rules::by_name(&dump).map_err(|e| usage(e.to_string()))?;
            print!("{}", r.to_csv());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
