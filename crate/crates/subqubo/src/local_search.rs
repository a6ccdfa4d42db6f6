//! Classical refinement: single-bit-flip greedy descent and tabu search.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qubo::{BinarySolution, QuboInstance};

/// Tabu search parameters. `iter_max` of `None` resolves to `50 * n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabuConfig {
    pub iter_max: Option<usize>,
    pub n_tabu: usize,
    pub target: Option<f64>,
}

impl Default for TabuConfig {
    fn default() -> Self {
        Self {
            iter_max: None,
            n_tabu: 10,
            target: None,
        }
    }
}

/// Sweeps indices in order, flipping whenever the energy change is strictly
/// negative, until a full sweep makes no flip. The result admits no
/// improving single flip.
pub fn greedy_descent(instance: &QuboInstance, bits: &[u8]) -> Result<BinarySolution> {
    let mut bits = bits.to_vec();
    instance.evaluate(&bits)?;
    loop {
        let mut flipped = false;
        for i in 0..instance.n() {
            if instance.delta_flip_raw(&bits, i) < 0.0 {
                bits[i] ^= 1;
                flipped = true;
            }
        }
        if !flipped {
            break;
        }
    }
    BinarySolution::new(instance, bits)
}

/// Move log of a tabu run: `(iteration, flipped bit)` pairs.
pub type MoveLog = Vec<(usize, usize)>;

/// Tabu search for QUBO minimization: per-bit tenure counters, impact-sorted
/// scans, immediate acceptance of flips improving the best-known energy,
/// otherwise the best non-tabu neighbour move. Returns the best solution and
/// energy seen.
pub fn tabu_search(
    instance: &QuboInstance,
    bits: &[u8],
    config: &TabuConfig,
) -> Result<(BinarySolution, f64)> {
    let (solution, best, _) = tabu_search_with_log(instance, bits, config)?;
    Ok((solution, best))
}

/// [`tabu_search`] variant that also reports the move log.
pub fn tabu_search_with_log(
    instance: &QuboInstance,
    bits: &[u8],
    config: &TabuConfig,
) -> Result<(BinarySolution, f64, MoveLog)> {
    let n = instance.n();
    let mut current = bits.to_vec();
    let mut energy = instance.evaluate(&current)?;
    let iter_max = config.iter_max.unwrap_or(50 * n);

    let mut best_bits = current.clone();
    let mut best_energy = energy;
    let mut tenures = vec![0usize; n];
    let mut flip_cost: Vec<f64> = (0..n)
        .map(|i| instance.delta_flip_raw(&current, i))
        .collect();
    let mut log = Vec::new();

    let target_met = |best: f64| config.target.is_some_and(|t| best <= t);

    let apply_flip =
        |k: usize, current: &mut Vec<u8>, flip_cost: &mut Vec<f64>, energy: &mut f64| {
            *energy += flip_cost[k];
            let delta_x = 1.0 - 2.0 * f64::from(current[k]);
            for &(j, c) in instance.neighbors(k) {
                let sign = 1.0 - 2.0 * f64::from(current[j]);
                flip_cost[j] += sign * c * delta_x;
            }
            flip_cost[k] = -flip_cost[k];
            current[k] ^= 1;
        };

    let mut iteration = 0usize;
    while iteration < iter_max && !target_met(best_energy) {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| flip_cost[a].total_cmp(&flip_cost[b]).then(a.cmp(&b)));

        let mut neighbour_best = f64::INFINITY;
        let mut neighbour_bit = None;
        let mut improved = false;
        for &k in &order {
            if tenures[k] > 0 {
                continue;
            }
            let new_energy = energy + flip_cost[k];
            if new_energy < best_energy {
                apply_flip(k, &mut current, &mut flip_cost, &mut energy);
                tenures[k] = config.n_tabu;
                best_bits = current.clone();
                best_energy = energy;
                log.push((iteration, k));
                improved = true;
                break;
            } else if new_energy < neighbour_best {
                neighbour_best = new_energy;
                neighbour_bit = Some(k);
            }
        }

        if !improved {
            if let Some(k) = neighbour_bit {
                apply_flip(k, &mut current, &mut flip_cost, &mut energy);
                tenures[k] = config.n_tabu;
                log.push((iteration, k));
            }
        }

        for t in &mut tenures {
            *t = t.saturating_sub(1);
        }
        iteration += 1;
    }

    let best_value = instance.evaluate(&best_bits)?;
    let solution = BinarySolution::new(instance, best_bits)?;
    Ok((solution, best_value, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::{random_bits, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one_flip_optimal(instance: &QuboInstance, bits: &[u8]) -> bool {
        (0..instance.n()).all(|i| instance.delta_flip(bits, i).unwrap() >= 0.0)
    }

    #[test]
    fn greedy_fixed_point_returned_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(211);
        let inst = random_instance(&mut rng, 10);
        let first = greedy_descent(&inst, &random_bits(&mut rng, 10)).unwrap();
        let second = greedy_descent(&inst, first.bits()).unwrap();
        assert_eq!(first.bits(), second.bits());
    }

    #[test]
    fn greedy_hand_traced_sweep() {
        // from (0,0): flipping bit 0 gains -1; afterwards bit 1 costs
        // -1 + 3 = 2, so the sweep stops at (1,0)
        let inst = QuboInstance::new(2, vec![-1.0, -1.0], [(0, 1, 3.0)], 0.0).unwrap();
        let result = greedy_descent(&inst, &[0, 0]).unwrap();
        assert_eq!(result.bits(), &[1, 0]);
        assert_eq!(result.value(), -1.0);
    }

    #[test]
    fn greedy_output_is_one_flip_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(223);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, 12);
            let start = random_bits(&mut rng, 12);
            let start_value = inst.evaluate(&start).unwrap();
            let result = greedy_descent(&inst, &start).unwrap();
            assert!(result.value() <= start_value);
            assert!(one_flip_optimal(&inst, result.bits()));
        }
    }

    #[test]
    fn tabu_returns_immediately_when_target_met_at_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(227);
        let inst = random_instance(&mut rng, 8);
        let start = random_bits(&mut rng, 8);
        let config = TabuConfig {
            target: Some(inst.evaluate(&start).unwrap()),
            ..TabuConfig::default()
        };
        let (best, value, log) = tabu_search_with_log(&inst, &start, &config).unwrap();
        assert_eq!(best.bits(), &start[..]);
        assert_eq!(value, inst.evaluate(&start).unwrap());
        assert!(log.is_empty());
    }

    #[test]
    fn tabu_two_variable_optimum() {
        let inst = QuboInstance::new(2, vec![1.0, 1.0], [(0, 1, -3.0)], 0.0).unwrap();
        let config = TabuConfig {
            iter_max: Some(10),
            ..TabuConfig::default()
        };
        let (best, value) = tabu_search(&inst, &[0, 0], &config).unwrap();
        assert_eq!(best.bits(), &[1, 1]);
        assert_eq!(value, -1.0);
    }

    #[test]
    fn tabu_reaches_brute_force_optimum_usually() {
        let mut rng = ChaCha8Rng::seed_from_u64(229);
        let mut hits = 0;
        for _ in 0..30 {
            let inst = random_instance(&mut rng, 10);
            let start = random_bits(&mut rng, 10);
            let mut optimum = f64::INFINITY;
            for z in 0u32..1024 {
                let bits: Vec<u8> = (0..10).map(|b| ((z >> b) & 1) as u8).collect();
                optimum = optimum.min(inst.evaluate(&bits).unwrap());
            }
            // tenure below n: at tenure >= n the per-flip semantics force a
            // fixed 2n-cycle once improving moves dry up
            let config = TabuConfig {
                iter_max: Some(1000),
                n_tabu: 5,
                target: None,
            };
            let (_, value) = tabu_search(&inst, &start, &config).unwrap();
            assert!(value >= optimum - 1e-9);
            if (value - optimum).abs() < 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 27, "tabu reached the optimum on {hits}/30 runs");
    }

    #[test]
    fn tabu_never_worsens_the_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(233);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 12);
            let start = random_bits(&mut rng, 12);
            let start_value = inst.evaluate(&start).unwrap();
            let (_, value) = tabu_search(&inst, &start, &TabuConfig::default()).unwrap();
            assert!(value <= start_value);
        }
    }

    #[test]
    fn tabu_tenure_blocks_reflips() {
        let mut rng = ChaCha8Rng::seed_from_u64(239);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 9);
            let start = random_bits(&mut rng, 9);
            let config = TabuConfig {
                iter_max: Some(400),
                n_tabu: 7,
                target: None,
            };
            let (_, _, log) = tabu_search_with_log(&inst, &start, &config).unwrap();
            let mut last_flip = [None::<usize>; 9];
            for &(iter, bit) in &log {
                if let Some(prev) = last_flip[bit] {
                    assert!(
                        iter >= prev + config.n_tabu,
                        "bit {bit} reflipped at {iter} after {prev}"
                    );
                }
                last_flip[bit] = Some(iter);
            }
        }
    }
}
