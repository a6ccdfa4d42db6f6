//! Benchmark instance generation: random regular and Erdős–Rényi graphs,
//! Max-Cut to QUBO conversion, and JSON (de)serialization of both forms.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::QuboInstance;

/// Simple undirected weighted graph; edges stored as `(u, v, w)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<GraphRepr> for WeightedGraph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        WeightedGraph::new(repr.n, repr.edges)
    }
}

impl From<WeightedGraph> for GraphRepr {
    fn from(g: WeightedGraph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl WeightedGraph {
    /// Normalizes endpoints to `u < v`, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut normalized = Vec::new();
        let mut seen = HashSet::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { index: u.max(v), n });
            }
            let (u, v) = (u.min(v), u.max(v));
            if !seen.insert((u, v)) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({u}, {v})")));
            }
            normalized.push((u, v, w));
        }
        normalized.sort_by_key(|e| (e.0, e.1));
        Ok(Self {
            n,
            edges: normalized,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v, _) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Total weight of edges crossing the partition induced by `bits`.
    pub fn cut_value(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: bits.len(),
            });
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v, _)| bits[u] != bits[v])
            .map(|&(_, _, w)| w)
            .sum())
    }
}

/// Edge weight distribution for generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// All weights 1.
    Unit,
    /// Weights drawn uniformly from (0, 1].
    Uniform,
}

fn draw_weight(mode: WeightMode, rng: &mut ChaCha8Rng) -> f64 {
    match mode {
        WeightMode::Unit => 1.0,
        WeightMode::Uniform => 1.0 - rng.random::<f64>(),
    }
}

/// Random `k`-regular graph on `n` vertices via the pairing model: shuffle
/// the stub multiset and retry until the induced pairing is simple.
pub fn gen_regular(
    n: usize,
    k: usize,
    weight_mode: WeightMode,
    seed: u64,
) -> Result<WeightedGraph> {
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "degree {k} requires more than {n} vertices"
        )));
    }
    if !(n * k).is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "no {k}-regular graph exists on {n} vertices (odd degree sum)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    const MAX_ATTEMPTS: usize = 100_000;
    for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(n * k / 2);
        let mut ok = true;
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                ok = false;
                break;
            }
        }
        if ok {
            let mut edges: Vec<(usize, usize, f64)> = stubs
                .chunks_exact(2)
                .map(|p| (p[0].min(p[1]), p[0].max(p[1]), 1.0))
                .collect();
            edges.sort_by_key(|e| (e.0, e.1));
            for e in &mut edges {
                e.2 = draw_weight(weight_mode, &mut rng);
            }
            return WeightedGraph::new(n, edges);
        }
    }
    Err(Error::InvalidArgument(format!(
        "pairing model failed to produce a simple {k}-regular graph on {n} vertices"
    )))
}

/// Erdős–Rényi graph: each of the n(n-1)/2 candidate edges is included
/// independently with probability `p`.
pub fn gen_er(n: usize, p: f64, weight_mode: WeightMode, seed: u64) -> Result<WeightedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    for e in &mut edges {
        e.2 = draw_weight(weight_mode, &mut rng);
    }
    WeightedGraph::new(n, edges)
}

/// Max-Cut QUBO: minimizing `Σ_E w_ij (2 x_i x_j - x_i - x_j)` makes the
/// negated objective equal the cut weight of the partition induced by `x`.
pub fn maxcut_to_qubo(graph: &WeightedGraph) -> QuboInstance {
    let mut linear = vec![0.0; graph.n()];
    let mut couplings = Vec::with_capacity(graph.edges().len());
    for &(u, v, w) in graph.edges() {
        linear[u] -= w;
        linear[v] -= w;
        couplings.push((u, v, 2.0 * w));
    }
    QuboInstance::new(graph.n(), linear, couplings, 0.0)
        .expect("maxcut conversion produces valid couplings")
}

/// Instance file: either the canonical QUBO form or the Max-Cut edge form.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum InstanceFile {
    Graph {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    Qubo(QuboInstance),
}

/// Writes the canonical instance JSON.
pub fn save_instance(path: impl AsRef<Path>, instance: &QuboInstance) -> Result<()> {
    let text = serde_json::to_string(instance)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes the graph edge-form JSON.
pub fn save_graph(path: impl AsRef<Path>, graph: &WeightedGraph) -> Result<()> {
    let text = serde_json::to_string(graph)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads an instance file; the Max-Cut edge form converts via
/// [`maxcut_to_qubo`].
pub fn load_instance(path: impl AsRef<Path>) -> Result<QuboInstance> {
    let text = std::fs::read_to_string(path)?;
    match serde_json::from_str::<InstanceFile>(&text)? {
        InstanceFile::Qubo(inst) => Ok(inst),
        InstanceFile::Graph { n, edges } => {
            let graph = WeightedGraph::new(n, edges)?;
            Ok(maxcut_to_qubo(&graph))
        }
    }
}

/// Reads a graph edge-form JSON file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let text = std::fs::read_to_string(path)?;
    let graph: WeightedGraph = serde_json::from_str(&text)?;
    Ok(graph)
}
