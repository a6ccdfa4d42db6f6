//! Command-line front end: instance generation, single solves, benchmark
//! sweeps over (method, d) grids, and call-count scaling fits.

pub mod bench;
pub mod fit;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use subqubo::{
    gen_er, gen_regular, load_instance, maxcut_to_qubo, save_graph, solve_suite_with_trace,
    solve_with_trace, GroupingMethod, LocalSearchMethod, QuboInstance, SolverConfig, SubSolver,
    WeightMode, WeightedGraph,
};

use bench::{BenchRecord, TraceRecord};

pub const QUBIT_CAP_ENV: &str = "SUBQUBO_QUBIT_CAP";

#[derive(Parser)]
#[command(
    name = "subqubo",
    version,
    about = "Hybrid sub-problem QUBO solver and Max-Cut benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark graph instances, one JSON file per seed
    Gen(GenArgs),
    /// Solve one instance and print the result as JSON
    Solve(SolveArgs),
    /// Run a sweep over (method, d) and write JSONL records
    Bench(BenchArgs),
    /// Fit the call-count scaling model to bench output
    Fit(FitArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// 3-regular graphs
    Regular3,
    /// Erdős–Rényi graphs with edge probability --p
    Er,
}

impl KindArg {
    fn name(self) -> &'static str {
        match self {
            KindArg::Regular3 => "regular3",
            KindArg::Er => "er",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightsArg {
    Unit,
    Uniform,
}

impl From<WeightsArg> for WeightMode {
    fn from(w: WeightsArg) -> Self {
        match w {
            WeightsArg::Unit => WeightMode::Unit,
            WeightsArg::Uniform => WeightMode::Uniform,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Cluster,
    Impact,
    Certainty,
    Random,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Cluster => "cluster",
            MethodArg::Impact => "impact",
            MethodArg::Certainty => "certainty",
            MethodArg::Random => "random",
        }
    }
}

impl From<MethodArg> for GroupingMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cluster => GroupingMethod::Cluster,
            MethodArg::Impact => GroupingMethod::Impact,
            MethodArg::Certainty => GroupingMethod::Certainty,
            MethodArg::Random => GroupingMethod::Random,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SubsolverArg {
    Qaoa,
    Exact,
}

impl SubsolverArg {
    fn name(self) -> &'static str {
        match self {
            SubsolverArg::Qaoa => "qaoa",
            SubsolverArg::Exact => "exact",
        }
    }
}

impl From<SubsolverArg> for SubSolver {
    fn from(s: SubsolverArg) -> Self {
        match s {
            SubsolverArg::Qaoa => SubSolver::Qaoa,
            SubsolverArg::Exact => SubSolver::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LocalSearchArg {
    Greedy,
    Tabu,
}

impl From<LocalSearchArg> for LocalSearchMethod {
    fn from(l: LocalSearchArg) -> Self {
        match l {
            LocalSearchArg::Greedy => LocalSearchMethod::Greedy,
            LocalSearchArg::Tabu => LocalSearchMethod::Tabu,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Graph family
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Vertex count
    #[arg(long)]
    n: usize,
    /// Erdős–Rényi edge probability
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    /// Edge weight distribution
    #[arg(long, value_enum, default_value_t = WeightsArg::Unit)]
    weights: WeightsArg,
    /// Number of instances (seeds seed, seed+1, ...)
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Base instance seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

/// Solver flags shared by `solve` and `bench`.
#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SubsolverArg::Qaoa)]
    subsolver: SubsolverArg,
    /// Measurement shots per expectation estimate and per decode
    #[arg(long, default_value_t = 1024)]
    shots: usize,
    /// QAOA layer count p
    #[arg(long, default_value_t = 1)]
    qaoa_depth: usize,
    #[arg(long, value_enum, default_value_t = LocalSearchArg::Greedy)]
    local_search: LocalSearchArg,
    /// Consecutive non-improving iterations before stopping
    #[arg(long, default_value_t = 3)]
    patience: usize,
    /// Solution pool capacity for certainty grouping
    #[arg(long, default_value_t = 20)]
    pool: usize,
    /// Solver randomness seed
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
}

impl SolverArgs {
    fn config(&self, method: MethodArg, d: usize) -> SolverConfig {
        let mut config = SolverConfig::new(method.into(), d);
        config.subsolver = self.subsolver.into();
        config.qaoa.shots = self.shots;
        config.qaoa.depth = self.qaoa_depth;
        config.local_search = self.local_search.into();
        config.patience = self.patience;
        config.pool_capacity = self.pool;
        config.seed = self.solver_seed;
        if let Ok(cap) = std::env::var(QUBIT_CAP_ENV) {
            config.qaoa.qubit_cap = cap.parse().unwrap_or(config.qaoa.qubit_cap);
        }
        config
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (canonical QUBO JSON or Max-Cut edge form)
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Cluster)]
    method: MethodArg,
    /// Sub-problem size
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Emit one JSONL trace event per outer iteration on stderr
    #[arg(long)]
    trace: bool,
    /// Include the cluster index arrays in trace events
    #[arg(long)]
    dump_groups: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files; alternative to the generation flags
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    #[arg(long, value_enum, default_value_t = WeightsArg::Unit)]
    weights: WeightsArg,
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Instance generation seed (independent of --solver-seed)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grouping methods to sweep
    #[arg(long, value_enum, value_delimiter = ',',
          default_values_t = [MethodArg::Cluster, MethodArg::Impact, MethodArg::Certainty, MethodArg::Random])]
    method: Vec<MethodArg>,
    /// Sub-problem sizes to sweep
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Parallel instance solves per cell (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output JSONL path
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV projection of the same records
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write per-iteration events to <out>.trace.jsonl
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    dump_groups: bool,
}

#[derive(Args)]
struct FitArgs {
    /// Bench JSONL file
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path for the fit JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn cli_main(args: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => run_gen(&args),
        Command::Solve(args) => run_solve(&args),
        Command::Bench(args) => run_bench(&args),
        Command::Fit(args) => run_fit(&args),
    }
}

fn generate_graph(
    kind: KindArg,
    n: usize,
    p: f64,
    weights: WeightsArg,
    seed: u64,
) -> Result<WeightedGraph> {
    let graph = match kind {
        KindArg::Regular3 => gen_regular(n, 3, weights.into(), seed)?,
        KindArg::Er => gen_er(n, p, weights.into(), seed)?,
    };
    Ok(graph)
}

fn run_gen(args: &GenArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let graph = generate_graph(args.kind, args.n, args.p, args.weights, seed)?;
        let name = format!("{}_n{}_s{}.json", args.kind.name(), args.n, seed);
        save_graph(args.out.join(&name), &graph)?;
    }
    eprintln!(
        "wrote {} {} instance(s) to {}",
        args.count,
        args.kind.name(),
        args.out.display()
    );
    Ok(())
}

fn run_solve(args: &SolveArgs) -> Result<()> {
    let instance =
        load_instance(&args.input).with_context(|| format!("loading {}", args.input.display()))?;
    let config = args.solver.config(args.method, args.d);
    let (mut result, trace) = solve_with_trace(&instance, &config, args.dump_groups)?;
    result.instance_id = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if args.trace {
        let mut err = std::io::stderr().lock();
        for event in &trace {
            serde_json::to_writer(&mut err, event)?;
            err.write_all(b"\n")?;
        }
    }
    println!("{}", serde_json::to_string(&result)?);
    Ok(())
}

/// Instance list for a bench run: `(id, instance)` pairs plus the kind label.
fn bench_instances(args: &BenchArgs) -> Result<(Vec<(String, QuboInstance)>, String)> {
    if let Some(dir) = &args.input {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            bail!("no .json instance files in {}", dir.display());
        }
        let mut instances = Vec::with_capacity(paths.len());
        for path in paths {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let inst =
                load_instance(&path).with_context(|| format!("loading {}", path.display()))?;
            instances.push((id, inst));
        }
        Ok((instances, "file".to_string()))
    } else {
        let kind = args
            .kind
            .context("bench needs either --in or --kind/--n generation flags")?;
        let n = args
            .n
            .context("--n is required when generating instances")?;
        let mut instances = Vec::with_capacity(args.count);
        for i in 0..args.count {
            let seed = args.seed.wrapping_add(i as u64);
            let graph = generate_graph(kind, n, args.p, args.weights, seed)?;
            let id = format!("{}_n{}_s{}", kind.name(), n, seed);
            instances.push((id, maxcut_to_qubo(&graph)));
        }
        Ok((instances, kind.name().to_string()))
    }
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    if args.d.is_empty() {
        bail!("--d needs at least one value");
    }
    let (instances, kind) = bench_instances(args)?;

    let mut records = Vec::new();
    let mut trace_records = Vec::new();
    for &method in &args.method {
        for &d in &args.d {
            let config = args.solver.config(method, d);
            let outcomes =
                solve_suite_with_trace(&instances, &config, args.jobs, args.dump_groups)?;
            for (result, trace) in outcomes {
                records.push(BenchRecord::from_result(
                    &result,
                    &kind,
                    method.name(),
                    args.solver.subsolver.name(),
                ));
                if args.trace {
                    trace_records.extend(trace.into_iter().map(|event| TraceRecord {
                        instance_id: result.instance_id.clone(),
                        method: method.name().to_string(),
                        d,
                        event,
                    }));
                }
            }
        }
    }

    bench::write_jsonl(&args.out, &records)?;
    if let Some(csv_path) = &args.csv {
        bench::write_csv(csv_path, &records)?;
    }
    if args.trace {
        let trace_path = args.out.with_extension("trace.jsonl");
        bench::write_trace_jsonl(&trace_path, &trace_records)?;
    }
    eprintln!(
        "wrote {} records ({} instances x {} methods x {} sizes) to {}",
        records.len(),
        instances.len(),
        args.method.len(),
        args.d.len(),
        args.out.display()
    );
    Ok(())
}

fn run_fit(args: &FitArgs) -> Result<()> {
    let records = bench::read_jsonl(&args.input)?;
    let fit = fit::fit_scaling(&records)?;
    let text = serde_json::to_string(&fit)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// Convenience wrapper for tests: run the CLI against a workspace path.
pub fn run_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    cli_main(args.into_iter().map(Into::into).collect())
}
