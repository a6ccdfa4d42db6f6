//! Hybrid QUBO solver with sub-problem decomposition.
//!
//! Large QUBO instances are solved iteratively: variables are partitioned
//! into groups of bounded size, each group becomes a sub-problem whose cross
//! terms with the frozen complement fold into linear offsets, sub-problems
//! go to a (simulated) QAOA or an exact enumeration backend, merged results
//! are refined by classical local search, and the loop converges when the
//! best solution stalls. Grouping strategies: correlation-driven multi-view
//! spectral clustering, impact indexing, certainty degree over a pool of
//! local minima, and random blocks.

pub mod driver;
pub mod error;
pub mod grouping;
pub mod instance;
pub mod local_search;
pub mod qubo;
pub mod subsolver;

mod rng;

pub use driver::{
    solve, solve_suite, solve_suite_with_trace, solve_with_trace, GroupingMethod, IterationTrace,
    LocalSearchMethod, RunMetrics, SolveResult, SolverConfig, SubSolver,
};
pub use error::{Error, Result};
pub use grouping::{
    certainty_grouping, cluster_grouping, correlation_matrix, impact_grouping, kmeans,
    normalized_laplacian, random_grouping, spectral_features, split_views, CorrelationMatrix,
    Grouping, SolutionPool,
};
pub use instance::{
    gen_er, gen_regular, load_graph, load_instance, maxcut_to_qubo, save_graph, save_instance,
    WeightMode, WeightedGraph,
};
pub use local_search::{greedy_descent, tabu_search, tabu_search_with_log, TabuConfig};
pub use qubo::{merge_sub_solution, BinarySolution, IsingModel, QuboInstance, SubQubo};
pub use subsolver::{
    build_qaoa_state, exact_solve, expectation, optimize_params, qaoa_solve, ExpectationMode,
    QaoaConfig, QaoaState, SubSolveResult,
};
