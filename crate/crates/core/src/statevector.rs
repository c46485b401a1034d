//! Dense statevector simulator. Qubit q is bit q of the basis index.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};
use crate::quantum::DensityOperator;

pub const MAX_QUBITS: usize = 20;
/// Outcome probabilities below this are treated as exact zeros.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// |0…0⟩
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooLarge(alloc::format!("{n_qubits} qubits")));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::IndexOutOfRange { index, bound: s.amps.len() });
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn hadamard(&mut self, q: usize) {
        let bit = 1 << q;
        let h = FRAC_1_SQRT_2;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = (a + b) * h;
                self.amps[i | bit] = (a - b) * h;
            }
        }
    }

    pub fn hadamard_range(&mut self, first: usize, count: usize) {
        for q in first..first + count {
            self.hadamard(q);
        }
    }

    pub fn pauli_x(&mut self, q: usize) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// |x, y⟩ → |x, y ⊕ f(x)⟩ with x on qubits x_off..x_off+n and y on
    /// y_off..y_off+n. The output register must be |0⟩ on the support;
    /// the XOR extension is never exercised.
    pub fn apply_oracle(&mut self, x_off: usize, y_off: usize, n: usize, table: &[u32]) -> Result<()> {
        let mask = (1usize << n) - 1;
        let dirty: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> y_off) & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if dirty > PROBABILITY_FLOOR {
            return Err(Error::DirtyOracleRegister(dirty));
        }
        let mut out = vec![ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let x = (i >> x_off) & mask;
            let j = i ^ ((table[x] as usize) << y_off);
            out[j] += a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Distribution of the `count` qubits starting at `first`.
    pub fn register_distribution(&self, first: usize, count: usize) -> Vec<f64> {
        let mask = (1usize << count) - 1;
        let mut p = vec![0.0; 1 << count];
        for (i, a) in self.amps.iter().enumerate() {
            p[(i >> first) & mask] += a.norm_sqr();
        }
        p
    }

    /// P(qubit q = 1)
    pub fn excited_population(&self, q: usize) -> f64 {
        let bit = 1 << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn qubit_marginal(&self, q: usize) -> Result<DensityOperator> {
        let bit = 1 << q;
        let mut m = ComplexMatrix::zeros(2, 2);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                m[(0, 0)] += a0 * a0.conj();
                m[(0, 1)] += a0 * a1.conj();
                m[(1, 0)] += a1 * a0.conj();
                m[(1, 1)] += a1 * a1.conj();
            }
        }
        DensityOperator::new(m)
    }

    /// Σ_q e·P(q = 1): energy under diag(0, e) on every qubit.
    pub fn energy(&self, e: f64) -> f64 {
        (0..self.n_qubits).map(|q| e * self.excited_population(q)).sum()
    }
}

/// Born-rule draw from a distribution, ignoring entries below the floor.
pub fn sample_index<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let total: f64 = p.iter().filter(|&&x| x >= PROBABILITY_FLOOR).sum();
    let mut r = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &x) in p.iter().enumerate() {
        if x < PROBABILITY_FLOOR {
            continue;
        }
        last = i;
        if r < x {
            return i;
        }
        r -= x;
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn hadamard_twice_is_identity() {
        let mut s = StateVector::basis(3, 5).unwrap();
        s.hadamard(1);
        s.hadamard(1);
        assert!((s.amplitudes()[5] - ONE).norm() < 1e-15);
    }

    #[test]
    fn uniform_superposition() {
        let mut s = StateVector::zero(4).unwrap();
        s.hadamard_range(0, 4);
        assert!(s.probabilities().iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
        assert!((s.energy(2.0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_on_basis_state() {
        // n = 2, f(x) = x ^ 3
        let table = [3u32, 2, 1, 0];
        let mut s = StateVector::basis(4, 2).unwrap();
        s.apply_oracle(0, 2, 2, &table).unwrap();
        assert!((s.amplitudes()[2 | (1 << 2)] - ONE).norm() < 1e-15);
        assert!(matches!(s.apply_oracle(0, 2, 2, &table), Err(Error::DirtyOracleRegister(_))));
    }

    #[test]
    fn marginal_of_plus_state() {
        let mut s = StateVector::zero(2).unwrap();
        s.hadamard(1);
        let m = s.qubit_marginal(1).unwrap();
        assert!((m.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        assert!(m.entropy().abs() < 1e-12);
        assert!((s.qubit_marginal(0).unwrap().population(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_skips_zero_entries() {
        let mut rng = trial_rng(1, 0);
        let p = [0.0, 0.5, 1e-14, 0.5];
        for _ in 0..1000 {
            let i = sample_index(&p, &mut rng);
            assert!(i == 1 || i == 3);
        }
    }
}
