//! Sub-problem solvers: a dense-statevector p-layer QAOA with shot-based
//! expectation estimation and a shrinking-trust-region compass search over
//! the variational parameters, plus an exact enumeration solver used as
//! oracle and classical baseline.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qubo::{IsingModel, SubQubo};
use crate::rng::mix_seed;

pub const DEFAULT_QUBIT_CAP: usize = 20;
pub const EXACT_SIZE_CAP: usize = 24;

/// How the cost expectation is estimated from the statevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpectationMode {
    /// Average energy of `shots` basis-state draws.
    Sampled,
    /// Full sum `Σ_z |a_z|² E(z)`.
    Exact,
}

/// Simulated QAOA configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QaoaConfig {
    pub depth: usize,
    pub shots: usize,
    pub initial_radius: f64,
    pub final_radius: f64,
    pub max_evals: usize,
    pub expectation_mode: ExpectationMode,
    pub qubit_cap: usize,
    pub seed: u64,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        Self {
            depth: 1,
            shots: 1024,
            initial_radius: 1.0,
            final_radius: 1e-4,
            max_evals: 100,
            expectation_mode: ExpectationMode::Sampled,
            qubit_cap: DEFAULT_QUBIT_CAP,
            seed: 0,
        }
    }
}

/// Statevector over `2^q` basis states, unit norm.
#[derive(Debug, Clone)]
pub struct QaoaState {
    amplitudes: Vec<Complex64>,
}

impl QaoaState {
    /// Wraps explicit amplitudes; the squared norm must be 1 within 1e-9.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::InvalidArgument(
                "amplitude vector length must be a power of two".into(),
            ));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "statevector squared norm {norm_sq} differs from 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    /// Measurement probability of basis state `z`.
    pub fn probability(&self, z: usize) -> f64 {
        self.amplitudes[z].norm_sqr()
    }

    /// Draws `shots` basis states from the measurement distribution;
    /// deterministic under `seed`.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.amplitudes.len());
        let mut acc = 0.0;
        for a in &self.amplitudes {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..shots)
            .map(|_| {
                let u = rng.random::<f64>() * total;
                cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
            })
            .collect()
    }
}

/// Energies of all `2^q` basis states, indexed by the bit pattern
/// (bit `i` of the index is variable `i`). Built by a Gray-code walk.
fn energy_table(ising: &IsingModel) -> Vec<f64> {
    let q = ising.n();
    let dim = 1usize << q;
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); q];
    for &(i, j, jij) in ising.couplings() {
        adjacency[i].push((j, jij));
        adjacency[j].push((i, jij));
    }
    let mut spins = vec![-1.0f64; q];
    let mut energy = ising.constant();
    for (i, &h) in ising.fields().iter().enumerate() {
        energy -= h;
        for &(j, jij) in &adjacency[i] {
            if j > i {
                energy += jij;
            }
        }
    }
    let mut table = vec![0.0; dim];
    table[0] = energy;
    let mut state = 0usize;
    for t in 1..dim {
        let bit = t.trailing_zeros() as usize;
        let mut local = ising.fields()[bit];
        for &(j, jij) in &adjacency[bit] {
            local += jij * spins[j];
        }
        energy += -2.0 * spins[bit] * local;
        spins[bit] = -spins[bit];
        state ^= 1 << bit;
        table[state] = energy;
    }
    table
}

fn apply_layers(amplitudes: &mut [Complex64], table: &[f64], gammas: &[f64], betas: &[f64]) {
    let dim = amplitudes.len();
    let q = dim.trailing_zeros() as usize;
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        // phase separation: diagonal in the computational basis
        for (a, &e) in amplitudes.iter_mut().zip(table) {
            *a *= Complex64::from_polar(1.0, -gamma * e);
        }
        // mixer: exp(i*beta*X) on every qubit; with the e^{-i*gamma*E} phase
        // this convention makes (gamma, beta) = (pi/2, pi/8) the single-edge
        // Max-Cut optimum at p = 1
        let c = beta.cos();
        let s = beta.sin();
        let is = Complex64::new(0.0, s);
        for bit in 0..q {
            let step = 1usize << bit;
            let mut base = 0;
            while base < dim {
                for off in base..base + step {
                    let z0 = off;
                    let z1 = off + step;
                    let a0 = amplitudes[z0];
                    let a1 = amplitudes[z1];
                    amplitudes[z0] = c * a0 + is * a1;
                    amplitudes[z1] = is * a0 + c * a1;
                }
                base += step << 1;
            }
        }
    }
}

/// Prepares the uniform superposition and applies `p` alternating cost-phase
/// and mixer layers.
pub fn build_qaoa_state(
    ising: &IsingModel,
    gammas: &[f64],
    betas: &[f64],
    qubit_cap: usize,
) -> Result<QaoaState> {
    let q = ising.n();
    if q > qubit_cap {
        return Err(Error::QubitCapExceeded {
            qubits: q,
            cap: qubit_cap,
        });
    }
    if gammas.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            expected: gammas.len(),
            actual: betas.len(),
        });
    }
    let table = energy_table(ising);
    let dim = 1usize << q;
    let amp = (1.0 / dim as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(amp, 0.0); dim];
    apply_layers(&mut amplitudes, &table, gammas, betas);
    Ok(QaoaState { amplitudes })
}

fn expectation_from_table(
    state: &QaoaState,
    table: &[f64],
    mode: ExpectationMode,
    shots: usize,
    seed: u64,
) -> f64 {
    match mode {
        ExpectationMode::Exact => state
            .amplitudes
            .iter()
            .zip(table)
            .map(|(a, &e)| a.norm_sqr() * e)
            .sum(),
        ExpectationMode::Sampled => {
            if shots == 0 {
                return 0.0;
            }
            let sum: f64 = state.sample(shots, seed).iter().map(|&z| table[z]).sum();
            sum / shots as f64
        }
    }
}

/// Cost expectation of `state` under `ising`, exact or shot-estimated.
pub fn expectation(
    state: &QaoaState,
    ising: &IsingModel,
    mode: ExpectationMode,
    shots: usize,
    seed: u64,
) -> f64 {
    let table = energy_table(ising);
    expectation_from_table(state, &table, mode, shots, seed)
}

/// Derivative-free compass search over the `2p` parameters with a
/// monotonically shrinking step scale. Returns the best parameters seen and
/// the number of expectation evaluations.
pub fn optimize_params(ising: &IsingModel, config: &QaoaConfig) -> (Vec<f64>, Vec<f64>, usize) {
    let p = config.depth.max(1);
    let table = energy_table(ising);
    let dim = 1usize << ising.n();
    let uniform = (1.0 / dim as f64).sqrt();

    let mut seed_rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, 0));
    let mut evals = 0usize;
    let mut eval = |params: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let mut amplitudes = vec![Complex64::new(uniform, 0.0); dim];
        apply_layers(&mut amplitudes, &table, &params[..p], &params[p..]);
        let state = QaoaState { amplitudes };
        expectation_from_table(
            &state,
            &table,
            config.expectation_mode,
            config.shots,
            seed_rng.random(),
        )
    };

    let wrap = |params: &mut [f64]| {
        for beta in &mut params[p..] {
            *beta = beta.rem_euclid(std::f64::consts::PI);
        }
    };

    let mut current = vec![0.5 * config.initial_radius; 2 * p];
    wrap(&mut current);
    let mut current_f = eval(&current, &mut evals);
    let mut best = current.clone();
    let mut best_f = current_f;

    let mut radius = config.initial_radius;
    'search: while radius >= config.final_radius && evals < config.max_evals {
        let mut improved = false;
        'poll: for dim_idx in 0..2 * p {
            for dir in [1.0, -1.0] {
                if evals >= config.max_evals {
                    break 'search;
                }
                let mut cand = current.clone();
                cand[dim_idx] += dir * radius;
                wrap(&mut cand);
                let f = eval(&cand, &mut evals);
                if f < best_f {
                    best_f = f;
                    best = cand.clone();
                }
                if f < current_f {
                    current = cand;
                    current_f = f;
                    improved = true;
                    break 'poll;
                }
            }
        }
        if !improved {
            radius *= 0.5;
        }
    }

    (best[..p].to_vec(), best[p..].to_vec(), evals)
}

/// Outcome of a sub-problem solve; `value` is the inner objective of `bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSolveResult {
    pub bits: Vec<u8>,
    pub value: f64,
    pub optimizer_evals: usize,
}

fn bits_of_index(z: usize, q: usize) -> Vec<u8> {
    (0..q).map(|b| ((z >> b) & 1) as u8).collect()
}

/// Solves a sub-problem with simulated QAOA: optimizes the variational
/// parameters, samples the final state and returns the best sampled
/// assignment, never worse than the incoming one (acceptance guard).
pub fn qaoa_solve(
    sub: &SubQubo,
    current_bits_on_s: &[u8],
    config: &QaoaConfig,
) -> Result<SubSolveResult> {
    let inner = sub.inner();
    let q = inner.n();
    if q > config.qubit_cap {
        return Err(Error::QubitCapExceeded {
            qubits: q,
            cap: config.qubit_cap,
        });
    }
    if current_bits_on_s.len() != q {
        return Err(Error::DimensionMismatch {
            expected: q,
            actual: current_bits_on_s.len(),
        });
    }
    let ising = inner.to_ising();
    let (gammas, betas, evals) = optimize_params(&ising, config);

    let table = energy_table(&ising);
    let dim = 1usize << q;
    let uniform = (1.0 / dim as f64).sqrt();
    let mut amplitudes = vec![Complex64::new(uniform, 0.0); dim];
    apply_layers(&mut amplitudes, &table, &gammas, &betas);
    let state = QaoaState { amplitudes };

    let samples = state.sample(config.shots.max(1), mix_seed(config.seed, 1));
    let mut best_z = samples[0];
    for &z in &samples[1..] {
        if table[z] < table[best_z] {
            best_z = z;
        }
    }

    let candidate = bits_of_index(best_z, q);
    let candidate_value = inner.evaluate(&candidate)?;
    let current_value = inner.evaluate(current_bits_on_s)?;
    if candidate_value < current_value {
        Ok(SubSolveResult {
            bits: candidate,
            value: candidate_value,
            optimizer_evals: evals,
        })
    } else {
        Ok(SubSolveResult {
            bits: current_bits_on_s.to_vec(),
            value: current_value,
            optimizer_evals: evals,
        })
    }
}

/// Exhaustive minimization of the inner objective over all `2^|S|`
/// assignments, walking a Gray code with incremental flip deltas. Ties break
/// toward the lowest bit pattern read as an unsigned integer.
///
/// The walk's accumulated value can drift a few ulps from the directly
/// evaluated objective, so any state within a relative epsilon of the best
/// is re-evaluated exactly; the returned value is always the exact minimum
/// of `evaluate` over all assignments.
pub fn exact_solve(sub: &SubQubo) -> Result<SubSolveResult> {
    let inner = sub.inner();
    let q = inner.n();
    if q > EXACT_SIZE_CAP {
        return Err(Error::InvalidArgument(format!(
            "exact solver limited to {EXACT_SIZE_CAP} variables, got {q}"
        )));
    }
    let mut bits = vec![0u8; q];
    let mut value = inner.evaluate(&bits)?;
    let mut state = 0usize;
    let mut best_state = 0usize;
    let mut best_value = value;
    for t in 1usize..(1 << q) {
        let bit = t.trailing_zeros() as usize;
        value += inner.delta_flip_raw(&bits, bit);
        bits[bit] ^= 1;
        state ^= 1 << bit;
        if value <= best_value + 1e-9 * (1.0 + best_value.abs()) {
            let exact = inner
                .evaluate(&bits)
                .expect("walk bits match the inner instance");
            value = exact;
            if exact < best_value || (exact == best_value && state < best_state) {
                best_value = exact;
                best_state = state;
            }
        }
    }
    let best_bits = bits_of_index(best_state, q);
    Ok(SubSolveResult {
        bits: best_bits,
        value: best_value,
        optimizer_evals: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{maxcut_to_qubo, WeightedGraph};
    use crate::qubo::QuboInstance;
    use crate::test_util::{random_bits, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn single_edge_ising() -> IsingModel {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        maxcut_to_qubo(&g).to_ising()
    }

    fn whole_as_sub(inst: &QuboInstance) -> SubQubo {
        let indices: Vec<usize> = (0..inst.n()).collect();
        inst.extract_sub_qubo(&vec![0; inst.n()], &indices).unwrap()
    }

    #[test]
    fn energy_table_matches_direct_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let inst = random_instance(&mut rng, 6);
        let ising = inst.to_ising();
        let table = energy_table(&ising);
        for (z, &entry) in table.iter().enumerate() {
            let spins: Vec<i8> = (0..6)
                .map(|b| if (z >> b) & 1 == 1 { 1 } else { -1 })
                .collect();
            assert!((entry - ising.energy(&spins).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_cost_state_stays_uniform() {
        let ising = QuboInstance::zero(4).to_ising();
        let state = build_qaoa_state(&ising, &[0.7], &[0.3], 20).unwrap();
        let expected = (1.0 / 16.0_f64).sqrt();
        for a in state.amplitudes() {
            assert!((a.norm() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_angles_leave_uniform_superposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let ising = random_instance(&mut rng, 5).to_ising();
        let state = build_qaoa_state(&ising, &[0.0], &[0.0], 20).unwrap();
        let expected = (1.0 / 32.0_f64).sqrt();
        for a in state.amplitudes() {
            assert!((a.re - expected).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_optimal_angles_concentrate_on_cut_states() {
        let state = build_qaoa_state(&single_edge_ising(), &[PI / 2.0], &[PI / 8.0], 20).unwrap();
        let cut_prob = state.probability(0b01) + state.probability(0b10);
        assert!((cut_prob - 1.0).abs() < 1e-9, "cut probability {cut_prob}");
    }

    #[test]
    fn state_norm_preserved_across_layers() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let ising = random_instance(&mut rng, 6).to_ising();
        let state = build_qaoa_state(&ising, &[0.4, 1.3, -0.2], &[0.9, 0.1, 2.0], 20).unwrap();
        let norm_sq: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm_sq - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phase_separation_preserves_magnitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let ising = random_instance(&mut rng, 5).to_ising();
        // beta = 0 leaves only the diagonal phase layer
        let state = build_qaoa_state(&ising, &[1.7], &[0.0], 20).unwrap();
        let expected = (1.0 / 32.0_f64).sqrt();
        for a in state.amplitudes() {
            assert!((a.norm() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn qubit_cap_and_length_mismatch_errors() {
        let ising = QuboInstance::zero(3).to_ising();
        assert!(matches!(
            build_qaoa_state(&ising, &[0.1], &[0.1], 2),
            Err(Error::QubitCapExceeded { .. })
        ));
        assert!(build_qaoa_state(&ising, &[0.1, 0.2], &[0.1], 20).is_err());
    }

    #[test]
    fn expectation_zero_cost() {
        let ising = QuboInstance::zero(3).to_ising();
        let state = build_qaoa_state(&ising, &[0.5], &[0.5], 20).unwrap();
        assert_eq!(
            expectation(&state, &ising, ExpectationMode::Exact, 0, 0),
            0.0
        );
        assert_eq!(
            expectation(&state, &ising, ExpectationMode::Sampled, 500, 7),
            0.0
        );
    }

    #[test]
    fn expectation_of_basis_state_is_its_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let ising = random_instance(&mut rng, 4).to_ising();
        let table = energy_table(&ising);
        for z in [0usize, 5, 9, 15] {
            let mut amplitudes = vec![Complex64::new(0.0, 0.0); 16];
            amplitudes[z] = Complex64::new(1.0, 0.0);
            let state = QaoaState::from_amplitudes(amplitudes).unwrap();
            let e = expectation(&state, &ising, ExpectationMode::Exact, 0, 0);
            assert!((e - table[z]).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_expectation_is_mean_energy() {
        let ising = single_edge_ising();
        let state = build_qaoa_state(&ising, &[], &[], 20).unwrap();
        let table = energy_table(&ising);
        let mean = table.iter().sum::<f64>() / 4.0;
        let e = expectation(&state, &ising, ExpectationMode::Exact, 0, 0);
        assert!((e - mean).abs() < 1e-12);
    }

    #[test]
    fn sampled_expectation_within_four_sigma_of_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let ising = random_instance(&mut rng, 5).to_ising();
        let state = build_qaoa_state(&ising, &[0.8], &[0.4], 20).unwrap();
        let table = energy_table(&ising);
        let exact = expectation_from_table(&state, &table, ExpectationMode::Exact, 0, 0);
        let second_moment: f64 = state
            .amplitudes()
            .iter()
            .zip(&table)
            .map(|(a, &e)| a.norm_sqr() * e * e)
            .sum();
        let variance = (second_moment - exact * exact).max(0.0);
        let shots = 100_000usize;
        let sigma = (variance / shots as f64).sqrt();
        let sampled = expectation_from_table(&state, &table, ExpectationMode::Sampled, shots, 99);
        assert!(
            (sampled - exact).abs() <= 4.0 * sigma + 1e-12,
            "sampled {sampled} vs exact {exact} (sigma {sigma})"
        );
    }

    #[test]
    fn optimizer_flat_landscape() {
        let ising = QuboInstance::zero(3).to_ising();
        let config = QaoaConfig {
            expectation_mode: ExpectationMode::Exact,
            ..QaoaConfig::default()
        };
        let (gammas, betas, evals) = optimize_params(&ising, &config);
        assert_eq!(gammas.len(), 1);
        assert_eq!(betas.len(), 1);
        assert!(evals >= 1);
        let state = build_qaoa_state(&ising, &gammas, &betas, 20).unwrap();
        assert_eq!(
            expectation(&state, &ising, ExpectationMode::Exact, 0, 0),
            0.0
        );
    }

    #[test]
    fn optimizer_budget_clamp() {
        let ising = single_edge_ising();
        let config = QaoaConfig {
            max_evals: 1,
            expectation_mode: ExpectationMode::Exact,
            ..QaoaConfig::default()
        };
        let (gammas, betas, evals) = optimize_params(&ising, &config);
        assert_eq!(evals, 1);
        assert_eq!(gammas, vec![0.5]);
        assert_eq!(betas, vec![0.5]);
    }

    #[test]
    fn optimizer_reaches_single_edge_grid_optimum() {
        let ising = single_edge_ising();
        // grid-scan oracle over (gamma, beta) in [0, pi]^2
        let mut grid_best = f64::INFINITY;
        for gi in 0..=60 {
            for bi in 0..=60 {
                let gamma = PI * gi as f64 / 60.0;
                let beta = PI * bi as f64 / 60.0;
                let state = build_qaoa_state(&ising, &[gamma], &[beta], 20).unwrap();
                grid_best =
                    grid_best.min(expectation(&state, &ising, ExpectationMode::Exact, 0, 0));
            }
        }
        let config = QaoaConfig {
            expectation_mode: ExpectationMode::Exact,
            ..QaoaConfig::default()
        };
        let (gammas, betas, _) = optimize_params(&ising, &config);
        let state = build_qaoa_state(&ising, &gammas, &betas, 20).unwrap();
        let reached = expectation(&state, &ising, ExpectationMode::Exact, 0, 0);
        assert!(
            reached <= 0.95 * grid_best,
            "optimizer reached {reached}, grid optimum {grid_best}"
        );
    }

    #[test]
    fn optimizer_deterministic_in_sampled_mode() {
        let ising = single_edge_ising();
        let config = QaoaConfig {
            seed: 5,
            ..QaoaConfig::default()
        };
        assert_eq!(
            optimize_params(&ising, &config),
            optimize_params(&ising, &config)
        );
    }

    #[test]
    fn qaoa_solve_single_negative_variable() {
        let inst = QuboInstance::new(1, vec![-5.0], [], 0.0).unwrap();
        let sub = whole_as_sub(&inst);
        let result = qaoa_solve(&sub, &[0], &QaoaConfig::default()).unwrap();
        assert_eq!(result.bits, vec![1]);
        assert_eq!(result.value, -5.0);
        assert!(result.optimizer_evals >= 1);
    }

    #[test]
    fn qaoa_solve_guard_keeps_optimal_current() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        let inst = random_instance(&mut rng, 5);
        let sub = whole_as_sub(&inst);
        let optimum = exact_solve(&sub).unwrap();
        // current already optimal: any sampled assignment is no better, so
        // the guard must return it unchanged
        let result = qaoa_solve(&sub, &optimum.bits, &QaoaConfig::default()).unwrap();
        assert_eq!(result.bits, optimum.bits);
        assert_eq!(result.value, optimum.value);
    }

    #[test]
    fn qaoa_solve_bounded_by_current_and_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        for trial in 0..5 {
            let inst = random_instance(&mut rng, 8);
            let sub = whole_as_sub(&inst);
            let current = random_bits(&mut rng, 8);
            let current_value = sub.inner().evaluate(&current).unwrap();
            let optimum = exact_solve(&sub).unwrap();
            let config = QaoaConfig {
                shots: 4096,
                expectation_mode: ExpectationMode::Exact,
                seed: trial,
                ..QaoaConfig::default()
            };
            let result = qaoa_solve(&sub, &current, &config).unwrap();
            assert!(result.value <= current_value + 1e-12);
            assert!(result.value >= optimum.value - 1e-12);
            assert!((sub.inner().evaluate(&result.bits).unwrap() - result.value).abs() < 1e-12);
        }
    }

    #[test]
    fn qaoa_solve_respects_qubit_cap() {
        let inst = QuboInstance::zero(5);
        let sub = whole_as_sub(&inst);
        let config = QaoaConfig {
            qubit_cap: 4,
            ..QaoaConfig::default()
        };
        assert!(matches!(
            qaoa_solve(&sub, &[0; 5], &config),
            Err(Error::QubitCapExceeded { .. })
        ));
    }

    #[test]
    fn exact_solve_zero_ties_to_all_zeros() {
        let sub = whole_as_sub(&QuboInstance::zero(6));
        let result = exact_solve(&sub).unwrap();
        assert_eq!(result.bits, vec![0; 6]);
        assert_eq!(result.value, 0.0);
        assert_eq!(result.optimizer_evals, 0);
    }

    #[test]
    fn exact_solve_triangle_and_pair() {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let sub = whole_as_sub(&maxcut_to_qubo(&g));
        assert_eq!(exact_solve(&sub).unwrap().value, -2.0);

        let inst = QuboInstance::new(2, vec![1.0, 1.0], [(0, 1, -3.0)], 0.0).unwrap();
        let result = exact_solve(&whole_as_sub(&inst)).unwrap();
        assert_eq!(result.bits, vec![1, 1]);
        assert_eq!(result.value, -1.0);
    }

    #[test]
    fn exact_solve_matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(139);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 9);
            let sub = whole_as_sub(&inst);
            let mut best = f64::INFINITY;
            for z in 0usize..512 {
                let bits = bits_of_index(z, 9);
                best = best.min(inst.evaluate(&bits).unwrap());
            }
            assert_eq!(exact_solve(&sub).unwrap().value, best);
        }
    }

    #[test]
    fn exact_solve_size_cap() {
        let inst = QuboInstance::zero(25);
        let sub = whole_as_sub(&inst);
        assert!(exact_solve(&sub).is_err());
    }
}
