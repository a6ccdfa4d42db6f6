//! Canonical QUBO representation: objective evaluation, flip deltas, Ising
//! conversion, sub-problem extraction and solution merging.
//!
//! The canonical form keeps an explicit linear vector `l`, consolidated
//! upper-triangular couplings `c_ij` (i < j) and a constant offset, so that
//! the objective is `offset + Σ l_i x_i + Σ_{i<j} c_ij x_i x_j`. An arbitrary
//! square matrix `Q` plus linear vector `c` ingests as `l_i = Q_ii + c_i`,
//! `c_ij = Q_ij + Q_ji`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadratic unconstrained binary optimization instance in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuboRepr", into = "QuboRepr")]
pub struct QuboInstance {
    n: usize,
    linear: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
    offset: f64,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, f64)>>,
}

/// Wire form of an instance: `{"n", "linear", "couplings", "offset"}`.
#[derive(Serialize, Deserialize)]
struct QuboRepr {
    n: usize,
    linear: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
    offset: f64,
}

impl TryFrom<QuboRepr> for QuboInstance {
    type Error = Error;

    fn try_from(repr: QuboRepr) -> Result<Self> {
        QuboInstance::new(repr.n, repr.linear, repr.couplings, repr.offset)
    }
}

impl From<QuboInstance> for QuboRepr {
    fn from(inst: QuboInstance) -> Self {
        QuboRepr {
            n: inst.n,
            linear: inst.linear,
            couplings: inst.couplings,
            offset: inst.offset,
        }
    }
}

impl QuboInstance {
    /// Builds an instance, consolidating duplicate coupling keys by summation
    /// and dropping exact zeros. Coupling keys must satisfy `0 <= i < j < n`.
    pub fn new(
        n: usize,
        linear: Vec<f64>,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
        offset: f64,
    ) -> Result<Self> {
        if linear.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: linear.len(),
            });
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, c) in couplings {
            if i >= j || j >= n {
                return Err(Error::InvalidCoupling { i, j, n });
            }
            *merged.entry((i, j)).or_insert(0.0) += c;
        }
        let couplings: Vec<(usize, usize, f64)> = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((i, j), c)| (i, j, c))
            .collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j, c) in &couplings {
            adjacency[i].push((j, c));
            adjacency[j].push((i, c));
        }
        Ok(Self {
            n,
            linear,
            couplings,
            offset,
            adjacency,
        })
    }

    /// Ingests an arbitrary square matrix `q` plus linear vector `c`, so that
    /// the canonical objective equals `xᵀQx + cᵀx` for every binary `x`.
    pub fn from_matrix(q: &[Vec<f64>], c: &[f64]) -> Result<Self> {
        let n = q.len();
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: c.len(),
            });
        }
        for row in q {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        let linear: Vec<f64> = (0..n).map(|i| q[i][i] + c[i]).collect();
        let mut couplings = Vec::new();
        for (i, row) in q.iter().enumerate() {
            for (j, &q_ij) in row.iter().enumerate().skip(i + 1) {
                let v = q_ij + q[j][i];
                if v != 0.0 {
                    couplings.push((i, j, v));
                }
            }
        }
        Self::new(n, linear, couplings, 0.0)
    }

    /// Zero instance on `n` variables (constant objective 0).
    pub fn zero(n: usize) -> Self {
        Self::new(n, vec![0.0; n], std::iter::empty(), 0.0).expect("zero instance is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Consolidated couplings, sorted by `(i, j)` with `i < j`.
    pub fn couplings(&self) -> &[(usize, usize, f64)] {
        &self.couplings
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Symmetric coupling lookup; 0 when the pair is absent.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.couplings
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|idx| self.couplings[idx].2)
            .unwrap_or(0.0)
    }

    /// Variables coupled to `i` with their coefficients.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    fn check_bits(&self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: bits.len(),
            });
        }
        Ok(())
    }

    /// Objective value `offset + Σ l_i x_i + Σ_{i<j} c_ij x_i x_j`.
    pub fn evaluate(&self, bits: &[u8]) -> Result<f64> {
        self.check_bits(bits)?;
        let mut value = self.offset;
        for (i, &l) in self.linear.iter().enumerate() {
            if bits[i] != 0 {
                value += l;
            }
        }
        for &(i, j, c) in &self.couplings {
            if bits[i] != 0 && bits[j] != 0 {
                value += c;
            }
        }
        Ok(value)
    }

    /// Objective change from flipping bit `i`, in O(deg i).
    pub fn delta_flip(&self, bits: &[u8], i: usize) -> Result<f64> {
        self.check_bits(bits)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        Ok(self.delta_flip_raw(bits, i))
    }

    /// Objective change from flipping bits `i` and `j` simultaneously.
    pub fn delta_flip_pair(&self, bits: &[u8], i: usize, j: usize) -> Result<f64> {
        self.check_bits(bits)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        if j >= self.n {
            return Err(Error::IndexOutOfRange {
                index: j,
                n: self.n,
            });
        }
        if i == j {
            return Err(Error::InvalidArgument(
                "delta_flip_pair requires two distinct indices".into(),
            ));
        }
        let di = self.delta_flip_raw(bits, i);
        let dj = self.delta_flip_raw(bits, j);
        let sign = if (bits[i] ^ bits[j]) == 0 { 1.0 } else { -1.0 };
        Ok(di + dj + sign * self.coupling(i, j))
    }

    /// Unchecked flip delta: `(1 - 2x_i)(l_i + Σ_j c_ij x_j)`.
    pub(crate) fn delta_flip_raw(&self, bits: &[u8], i: usize) -> f64 {
        let mut acc = self.linear[i];
        for &(j, c) in &self.adjacency[i] {
            if bits[j] != 0 {
                acc += c;
            }
        }
        if bits[i] == 0 {
            acc
        } else {
            -acc
        }
    }

    /// Equivalent Ising model under the mapping `x_i = (1 + s_i) / 2`.
    pub fn to_ising(&self) -> IsingModel {
        let mut constant = self.offset;
        let mut fields = vec![0.0; self.n];
        for (i, &l) in self.linear.iter().enumerate() {
            fields[i] += l / 2.0;
            constant += l / 2.0;
        }
        let mut couplings = Vec::with_capacity(self.couplings.len());
        for &(i, j, c) in &self.couplings {
            fields[i] += c / 4.0;
            fields[j] += c / 4.0;
            couplings.push((i, j, c / 4.0));
            constant += c / 4.0;
        }
        IsingModel {
            n: self.n,
            fields,
            couplings,
            constant,
        }
    }

    /// Restricts the objective to the variables in `indices`, freezing the
    /// complement at its values in `bits`. Cross terms fold into the inner
    /// linear coefficients; terms among fixed variables collect into the
    /// context offset, while the instance's own constant stays on the inner
    /// instance.
    pub fn extract_sub_qubo(&self, bits: &[u8], indices: &[usize]) -> Result<SubQubo> {
        self.check_bits(bits)?;
        if indices.is_empty() {
            return Err(Error::InvalidArgument(
                "sub-QUBO index set must be non-empty".into(),
            ));
        }
        let mut local = vec![usize::MAX; self.n];
        for (k, &i) in indices.iter().enumerate() {
            if i >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.n,
                });
            }
            if local[i] != usize::MAX {
                return Err(Error::InvalidArgument(format!(
                    "sub-QUBO index {i} appears more than once"
                )));
            }
            local[i] = k;
        }

        let mut inner_linear: Vec<f64> = indices.iter().map(|&i| self.linear[i]).collect();
        let mut inner_couplings = Vec::new();
        let mut context = 0.0;
        for (j, &l) in self.linear.iter().enumerate() {
            if local[j] == usize::MAX && bits[j] != 0 {
                context += l;
            }
        }
        for &(i, j, c) in &self.couplings {
            match (local[i], local[j]) {
                (usize::MAX, usize::MAX) => {
                    if bits[i] != 0 && bits[j] != 0 {
                        context += c;
                    }
                }
                (ki, usize::MAX) => {
                    if bits[j] != 0 {
                        inner_linear[ki] += c;
                    }
                }
                (usize::MAX, kj) => {
                    if bits[i] != 0 {
                        inner_linear[kj] += c;
                    }
                }
                (ki, kj) => {
                    inner_couplings.push((ki.min(kj), ki.max(kj), c));
                }
            }
        }
        let inner = QuboInstance::new(indices.len(), inner_linear, inner_couplings, self.offset)?;
        Ok(SubQubo {
            indices: indices.to_vec(),
            inner,
            context_offset: context,
        })
    }
}

/// Writes `sub_bits` back into `bits` at the positions in `indices`.
pub fn merge_sub_solution(bits: &[u8], indices: &[usize], sub_bits: &[u8]) -> Result<Vec<u8>> {
    if sub_bits.len() != indices.len() {
        return Err(Error::DimensionMismatch {
            expected: indices.len(),
            actual: sub_bits.len(),
        });
    }
    let mut merged = bits.to_vec();
    for (&i, &b) in indices.iter().zip(sub_bits) {
        if i >= bits.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: bits.len(),
            });
        }
        merged[i] = b;
    }
    Ok(merged)
}

/// Spin formulation with fields `h_i`, couplings `J_ij` (i < j) and a
/// constant, equivalent to the generating QUBO under `s = 2x - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n: usize,
    fields: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
    constant: f64,
}

impl IsingModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn couplings(&self) -> &[(usize, usize, f64)] {
        &self.couplings
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Energy `constant + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` for spins ±1.
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: spins.len(),
            });
        }
        let mut e = self.constant;
        for (i, &h) in self.fields.iter().enumerate() {
            e += h * f64::from(spins[i]);
        }
        for &(i, j, jij) in &self.couplings {
            e += jij * f64::from(spins[i]) * f64::from(spins[j]);
        }
        Ok(e)
    }
}

/// Restriction of a QUBO to an ordered index set `S` with the complement
/// frozen. For any assignment `y` to `S`, `inner.evaluate(y) + context_offset`
/// equals the full objective with `S` set to `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubQubo {
    indices: Vec<usize>,
    inner: QuboInstance,
    context_offset: f64,
}

impl SubQubo {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn inner(&self) -> &QuboInstance {
        &self.inner
    }

    pub fn context_offset(&self) -> f64 {
        self.context_offset
    }
}

/// Binary assignment with its cached objective value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinarySolution {
    bits: Vec<u8>,
    value: f64,
}

impl BinarySolution {
    /// Caches `instance.evaluate(bits)` alongside the bits.
    pub fn new(instance: &QuboInstance, bits: Vec<u8>) -> Result<Self> {
        let value = instance.evaluate(&bits)?;
        Ok(Self { bits, value })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{maxcut_to_qubo, WeightedGraph};
    use crate::test_util::{random_bits, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> QuboInstance {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        maxcut_to_qubo(&g)
    }

    #[test]
    fn evaluate_all_zeros_is_offset() {
        let inst = QuboInstance::new(4, vec![1.0; 4], [(0, 1, 2.0)], 0.0).unwrap();
        assert_eq!(inst.evaluate(&[0, 0, 0, 0]).unwrap(), 0.0);
        let shifted = QuboInstance::new(2, vec![0.0; 2], [], 3.5).unwrap();
        assert_eq!(shifted.evaluate(&[0, 0]).unwrap(), 3.5);
    }

    #[test]
    fn evaluate_triangle_maxcut() {
        let inst = triangle();
        assert_eq!(inst.evaluate(&[1, 0, 0]).unwrap(), -2.0);
        // brute force over all 8 assignments: cut of a unit triangle maxes at 2
        let mut best = f64::INFINITY;
        for z in 0u32..8 {
            let bits: Vec<u8> = (0..3).map(|b| ((z >> b) & 1) as u8).collect();
            best = best.min(inst.evaluate(&bits).unwrap());
        }
        assert_eq!(best, -2.0);
    }

    #[test]
    fn evaluate_direct_substitution() {
        let inst = QuboInstance::new(2, vec![1.0, -2.0], [(0, 1, 3.0)], 0.0).unwrap();
        assert_eq!(inst.evaluate(&[1, 1]).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_dimension_mismatch() {
        let inst = QuboInstance::zero(3);
        assert!(matches!(
            inst.evaluate(&[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn new_rejects_bad_coupling_keys() {
        assert!(QuboInstance::new(3, vec![0.0; 3], [(1, 1, 1.0)], 0.0).is_err());
        assert!(QuboInstance::new(3, vec![0.0; 3], [(2, 1, 1.0)], 0.0).is_err());
        assert!(QuboInstance::new(3, vec![0.0; 3], [(0, 3, 1.0)], 0.0).is_err());
    }

    #[test]
    fn duplicate_couplings_consolidate() {
        let inst = QuboInstance::new(2, vec![0.0; 2], [(0, 1, 1.0), (0, 1, 2.0)], 0.0).unwrap();
        assert_eq!(inst.coupling(0, 1), 3.0);
        assert_eq!(inst.couplings().len(), 1);
    }

    #[test]
    fn delta_flip_zero_instance() {
        let inst = QuboInstance::zero(5);
        let bits = vec![0, 1, 0, 1, 1];
        for i in 0..5 {
            assert_eq!(inst.delta_flip(&bits, i).unwrap(), 0.0);
        }
    }

    #[test]
    fn delta_flip_adds_linear_term() {
        let inst = QuboInstance::new(2, vec![-1.0, 3.0], [], 0.0).unwrap();
        assert_eq!(inst.delta_flip(&[0, 0], 0).unwrap(), -1.0);
    }

    #[test]
    fn delta_flip_matches_evaluate_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 8);
            let bits = random_bits(&mut rng, 8);
            let base = inst.evaluate(&bits).unwrap();
            for i in 0..8 {
                let mut flipped = bits.clone();
                flipped[i] ^= 1;
                let oracle = inst.evaluate(&flipped).unwrap() - base;
                assert!((inst.delta_flip(&bits, i).unwrap() - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_flip_index_out_of_range() {
        let inst = QuboInstance::zero(2);
        assert!(matches!(
            inst.delta_flip(&[0, 0], 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn delta_flip_pair_zero_and_direct() {
        let zero = QuboInstance::zero(4);
        assert_eq!(zero.delta_flip_pair(&[0; 4], 0, 3).unwrap(), 0.0);
        let inst = QuboInstance::new(2, vec![0.5, -0.25], [(0, 1, 3.0)], 0.0).unwrap();
        assert_eq!(
            inst.delta_flip_pair(&[0, 0], 0, 1).unwrap(),
            3.0 + 0.5 - 0.25
        );
    }

    #[test]
    fn delta_flip_pair_matches_evaluate_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let inst = random_instance(&mut rng, 8);
            let bits = random_bits(&mut rng, 8);
            let base = inst.evaluate(&bits).unwrap();
            for i in 0..8 {
                for j in 0..8 {
                    if i == j {
                        continue;
                    }
                    let mut flipped = bits.clone();
                    flipped[i] ^= 1;
                    flipped[j] ^= 1;
                    let oracle = inst.evaluate(&flipped).unwrap() - base;
                    assert!((inst.delta_flip_pair(&bits, i, j).unwrap() - oracle).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn delta_flip_pair_rejects_equal_indices() {
        let inst = QuboInstance::zero(3);
        assert!(inst.delta_flip_pair(&[0, 0, 0], 1, 1).is_err());
    }

    #[test]
    fn to_ising_zero_instance() {
        let ising = QuboInstance::zero(3).to_ising();
        assert_eq!(ising.fields(), &[0.0, 0.0, 0.0]);
        assert!(ising.couplings().is_empty());
        assert_eq!(ising.constant(), 0.0);
    }

    #[test]
    fn to_ising_single_variable() {
        let inst = QuboInstance::new(1, vec![2.0], [], 0.0).unwrap();
        let ising = inst.to_ising();
        assert_eq!(ising.fields(), &[1.0]);
        assert_eq!(ising.constant(), 1.0);
        assert_eq!(ising.energy(&[-1]).unwrap(), 0.0);
        assert_eq!(ising.energy(&[1]).unwrap(), 2.0);
    }

    #[test]
    fn to_ising_preserves_energies_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 6);
            let ising = inst.to_ising();
            for z in 0u32..64 {
                let bits: Vec<u8> = (0..6).map(|b| ((z >> b) & 1) as u8).collect();
                let spins: Vec<i8> = bits.iter().map(|&b| 2 * b as i8 - 1).collect();
                let q = inst.evaluate(&bits).unwrap();
                let e = ising.energy(&spins).unwrap();
                assert!((q - e).abs() < 1e-9, "QUBO {q} vs Ising {e}");
            }
        }
    }

    #[test]
    fn extract_all_variables_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let inst = random_instance(&mut rng, 7);
        let bits = random_bits(&mut rng, 7);
        let indices: Vec<usize> = (0..7).collect();
        let sub = inst.extract_sub_qubo(&bits, &indices).unwrap();
        assert_eq!(sub.inner(), &inst);
        assert_eq!(sub.context_offset(), 0.0);

        // the instance's own constant stays on the inner instance
        let shifted = QuboInstance::new(2, vec![1.0, -1.0], [(0, 1, 2.0)], 1.5).unwrap();
        let sub = shifted.extract_sub_qubo(&[1, 0], &[0, 1]).unwrap();
        assert_eq!(sub.inner(), &shifted);
        assert_eq!(sub.context_offset(), 0.0);
    }

    #[test]
    fn extract_chain_example() {
        let inst = QuboInstance::new(3, vec![0.0; 3], [(0, 1, 2.0), (1, 2, 2.0)], 0.0).unwrap();
        let sub = inst.extract_sub_qubo(&[0, 0, 1], &[0, 1]).unwrap();
        assert_eq!(sub.inner().linear(), &[0.0, 2.0]);
        assert_eq!(sub.inner().coupling(0, 1), 2.0);
        assert_eq!(sub.context_offset(), 0.0);
    }

    #[test]
    fn extract_sub_qubo_invariant_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 10);
            let bits = random_bits(&mut rng, 10);
            let indices = [2usize, 5, 7, 8, 9];
            let sub = inst.extract_sub_qubo(&bits, &indices).unwrap();
            for z in 0u32..32 {
                let sub_bits: Vec<u8> = (0..5).map(|b| ((z >> b) & 1) as u8).collect();
                let full = merge_sub_solution(&bits, &indices, &sub_bits).unwrap();
                let direct = inst.evaluate(&full).unwrap();
                let via_sub = sub.inner().evaluate(&sub_bits).unwrap() + sub.context_offset();
                assert!((direct - via_sub).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extract_rejects_empty_and_invalid() {
        let inst = QuboInstance::zero(3);
        assert!(inst.extract_sub_qubo(&[0, 0, 0], &[]).is_err());
        assert!(inst.extract_sub_qubo(&[0, 0, 0], &[3]).is_err());
        assert!(inst.extract_sub_qubo(&[0, 0, 0], &[1, 1]).is_err());
    }

    #[test]
    fn merge_basics() {
        assert_eq!(
            merge_sub_solution(&[0, 0, 0], &[1], &[1]).unwrap(),
            vec![0, 1, 0]
        );
        assert_eq!(
            merge_sub_solution(&[1, 0], &[0, 1], &[0, 1]).unwrap(),
            vec![0, 1]
        );
        assert!(merge_sub_solution(&[0, 0], &[0], &[1, 1]).is_err());
    }

    #[test]
    fn extract_then_merge_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let inst = random_instance(&mut rng, 6);
        let bits = random_bits(&mut rng, 6);
        let indices = [1usize, 3, 4];
        let restriction: Vec<u8> = indices.iter().map(|&i| bits[i]).collect();
        let _ = inst.extract_sub_qubo(&bits, &indices).unwrap();
        assert_eq!(
            merge_sub_solution(&bits, &indices, &restriction).unwrap(),
            bits
        );
    }

    #[test]
    fn binary_solution_caches_value() {
        let inst = triangle();
        let sol = BinarySolution::new(&inst, vec![1, 0, 0]).unwrap();
        assert_eq!(sol.value(), inst.evaluate(sol.bits()).unwrap());
    }
}
