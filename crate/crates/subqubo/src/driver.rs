//! The hybrid outer loop: initialize, group, extract, sub-solve, merge,
//! refine, track the best solution, converge on stalled improvement.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::{
    certainty_grouping, cluster_grouping, impact_grouping, random_grouping, Grouping, SolutionPool,
};
use crate::local_search::{greedy_descent, tabu_search, TabuConfig};
use crate::qubo::{merge_sub_solution, BinarySolution, QuboInstance};
use crate::rng::mix_seed;
use crate::subsolver::{exact_solve, qaoa_solve, QaoaConfig, SubSolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingMethod {
    Cluster,
    Impact,
    Certainty,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubSolver {
    Qaoa,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalSearchMethod {
    Greedy,
    Tabu,
}

/// Full configuration of one hybrid solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grouping: GroupingMethod,
    pub sub_size: usize,
    pub subsolver: SubSolver,
    pub qaoa: QaoaConfig,
    pub local_search: LocalSearchMethod,
    pub tabu: TabuConfig,
    pub patience: usize,
    pub max_outer_iters: usize,
    pub pool_capacity: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(grouping: GroupingMethod, sub_size: usize) -> Self {
        Self {
            grouping,
            sub_size,
            subsolver: SubSolver::Qaoa,
            qaoa: QaoaConfig::default(),
            local_search: LocalSearchMethod::Greedy,
            tabu: TabuConfig::default(),
            patience: 3,
            max_outer_iters: 100,
            pool_capacity: 20,
            seed: 0,
        }
    }
}

/// Counters and the best-objective trace of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub subroutine_calls: usize,
    pub total_optimizer_evals: usize,
    pub best_trace: Vec<(usize, f64)>,
    pub wall_time: f64,
}

/// Per-iteration trace record for the `--trace` event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub group_sizes: Vec<usize>,
    pub cluster_deltas: Vec<f64>,
    pub best_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub instance_id: String,
    pub best: BinarySolution,
    pub metrics: RunMetrics,
    pub config: SolverConfig,
}

fn refine(instance: &QuboInstance, bits: &[u8], config: &SolverConfig) -> Result<BinarySolution> {
    match config.local_search {
        LocalSearchMethod::Greedy => greedy_descent(instance, bits),
        LocalSearchMethod::Tabu => Ok(tabu_search(instance, bits, &config.tabu)?.0),
    }
}

fn make_grouping(
    instance: &QuboInstance,
    bits: &[u8],
    pool: &SolutionPool,
    config: &SolverConfig,
    iteration: usize,
) -> Result<Grouping> {
    let seed = mix_seed(config.seed, iteration as u64);
    match config.grouping {
        GroupingMethod::Cluster => cluster_grouping(instance, bits, config.sub_size, seed),
        GroupingMethod::Impact => impact_grouping(instance, bits, config.sub_size),
        GroupingMethod::Certainty => certainty_grouping(pool, config.sub_size),
        GroupingMethod::Random => random_grouping(instance.n(), config.sub_size, seed),
    }
}

/// Runs the hybrid loop on one instance.
pub fn solve(instance: &QuboInstance, config: &SolverConfig) -> Result<SolveResult> {
    Ok(solve_with_trace(instance, config, false)?.0)
}

/// [`solve`] variant that also returns the per-iteration trace;
/// `record_groups` adds the cluster index arrays to each event.
pub fn solve_with_trace(
    instance: &QuboInstance,
    config: &SolverConfig,
    record_groups: bool,
) -> Result<(SolveResult, Vec<IterationTrace>)> {
    let n = instance.n();
    if n == 0 {
        return Err(Error::InvalidArgument("instance has no variables".into()));
    }
    if config.sub_size == 0 || config.sub_size > n {
        return Err(Error::InvalidArgument(format!(
            "sub-problem size {} outside 1..={n}",
            config.sub_size
        )));
    }
    if config.subsolver == SubSolver::Qaoa && config.sub_size > config.qaoa.qubit_cap {
        return Err(Error::QubitCapExceeded {
            qubits: config.sub_size,
            cap: config.qaoa.qubit_cap,
        });
    }
    if config.patience == 0 {
        return Err(Error::InvalidArgument("patience must be positive".into()));
    }

    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    let mut best = refine(instance, &initial, config)?;
    let mut pool = SolutionPool::new(config.pool_capacity);
    pool.push(best.bits().to_vec());

    let mut best_trace = vec![(0, best.value())];
    let mut traces = Vec::new();
    let mut subroutine_calls = 0usize;
    let mut total_optimizer_evals = 0usize;
    let mut stall = 0usize;

    for iteration in 1..=config.max_outer_iters {
        let grouping = make_grouping(instance, best.bits(), &pool, config, iteration)?;
        let mut working = best.bits().to_vec();
        let mut deltas = Vec::with_capacity(grouping.len());
        for (ci, cluster) in grouping.clusters().iter().enumerate() {
            let sub = instance.extract_sub_qubo(&working, cluster)?;
            let current: Vec<u8> = cluster.iter().map(|&i| working[i]).collect();
            let current_value = sub.inner().evaluate(&current)?;
            let result: SubSolveResult = match config.subsolver {
                SubSolver::Exact => exact_solve(&sub)?,
                SubSolver::Qaoa => {
                    let mut qaoa = config.qaoa.clone();
                    qaoa.seed = mix_seed(config.seed, (iteration as u64) * 1_000_003 + ci as u64);
                    qaoa_solve(&sub, &current, &qaoa)?
                }
            };
            subroutine_calls += 1;
            total_optimizer_evals += result.optimizer_evals;
            deltas.push(result.value - current_value);
            working = merge_sub_solution(&working, cluster, &result.bits)?;
        }

        let refined = refine(instance, &working, config)?;
        pool.push(refined.bits().to_vec());

        if refined.value() < best.value() {
            best = refined;
            stall = 0;
        } else {
            stall += 1;
        }
        best_trace.push((iteration, best.value()));
        traces.push(IterationTrace {
            iteration,
            group_sizes: grouping.clusters().iter().map(Vec::len).collect(),
            cluster_deltas: deltas,
            best_value: best.value(),
            groups: record_groups.then(|| grouping.clusters().to_vec()),
        });

        if stall >= config.patience {
            break;
        }
    }

    let metrics = RunMetrics {
        subroutine_calls,
        total_optimizer_evals,
        best_trace,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok((
        SolveResult {
            instance_id: String::new(),
            best,
            metrics,
            config: config.clone(),
        },
        traces,
    ))
}

/// Solves each `(id, instance)` pair independently with the per-instance
/// seed `config.seed ^ index`; results keep the input order regardless of
/// `parallelism` (0 means the default thread count).
pub fn solve_suite(
    instances: &[(String, QuboInstance)],
    config: &SolverConfig,
    parallelism: usize,
) -> Result<Vec<SolveResult>> {
    Ok(
        solve_suite_with_trace(instances, config, parallelism, false)?
            .into_iter()
            .map(|(result, _)| result)
            .collect(),
    )
}

/// [`solve_suite`] variant that keeps each solve's iteration trace.
pub fn solve_suite_with_trace(
    instances: &[(String, QuboInstance)],
    config: &SolverConfig,
    parallelism: usize,
    record_groups: bool,
) -> Result<Vec<(SolveResult, Vec<IterationTrace>)>> {
    use rayon::prelude::*;

    if instances.is_empty() {
        return Err(Error::InvalidArgument("empty instance list".into()));
    }
    let solve_one = |(index, (id, instance)): (usize, &(String, QuboInstance))| {
        let mut cfg = config.clone();
        cfg.seed = config.seed ^ index as u64;
        match solve_with_trace(instance, &cfg, record_groups) {
            Ok((mut result, trace)) => {
                result.instance_id = id.clone();
                Ok((result, trace))
            }
            Err(e) => Err(Error::InstanceSolve {
                id: id.clone(),
                source: Box::new(e),
            }),
        }
    };
    if parallelism == 1 {
        instances.iter().enumerate().map(solve_one).collect()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if parallelism > 0 {
            builder = builder.num_threads(parallelism);
        }
        let pool = builder.build()?;
        pool.install(|| {
            instances
                .par_iter()
                .enumerate()
                .map(solve_one)
                .collect::<Result<Vec<_>>>()
        })
    }
}
