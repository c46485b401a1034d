//! Simon's problem: instances, oracle discipline, solvers and query bounds.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::gf2::{gf2_kernel_vector, gf2_rank};
use crate::statevector::{sample_index, StateVector};

pub const MAX_TABLE_BITS: u32 = 20;
pub const MAX_QUANTUM_BITS: u32 = 10;

/// Δ = 2 − √15/2, the margin that maximizes the classical lower bound.
pub fn delta_star() -> f64 {
    2.0 - 15f64.sqrt() / 2.0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimonInstance {
    pub n: u32,
    pub b: u8,
    /// Hidden shift; 0 when b = 0.
    pub s: u32,
    pub f_table: Vec<u32>,
}

impl SimonInstance {
    pub fn new(n: u32, b: u8, s: u32, f_table: Vec<u32>) -> Result<Self> {
        check_n(n, MAX_TABLE_BITS)?;
        let size = 1usize << n;
        if f_table.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: f_table.len() });
        }
        if f_table.iter().any(|&y| y as usize >= size) {
            return Err(invalid("table value out of range"));
        }
        let mut counts = alloc::vec![0u8; size];
        for &y in &f_table {
            counts[y as usize] = counts[y as usize].saturating_add(1);
        }
        match b {
            0 => {
                if s != 0 || counts.iter().any(|&c| c > 1) {
                    return Err(invalid("b = 0 requires a permutation and s = 0"));
                }
            }
            1 => {
                if s == 0 || s as usize >= size {
                    return Err(invalid("b = 1 requires a nonzero shift"));
                }
                if (0..size).any(|x| f_table[x] != f_table[x ^ s as usize]) {
                    return Err(invalid("f(x) != f(x ^ s)"));
                }
                if counts.iter().any(|&c| c != 0 && c != 2) {
                    return Err(invalid("f is not exactly 2-to-1"));
                }
            }
            _ => return Err(invalid("b must be 0 or 1")),
        }
        Ok(SimonInstance { n, b, s, f_table })
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn f(&self, x: u32) -> u32 {
        self.f_table[x as usize]
    }
}

fn check_n(n: u32, max: u32) -> Result<()> {
    if n == 0 || n > max {
        return Err(invalid(format!("n = {n} outside 1..={max}")));
    }
    Ok(())
}

/// Uniform instance: fair coin b, then a uniform permutation or a uniform
/// 2-to-1 function with a uniform nonzero shift.
pub fn sample_uniform_instance<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<SimonInstance> {
    let b = rng.random_bool(0.5) as u8;
    sample_instance_with_bit(n, b, rng)
}

pub fn sample_instance_with_bit<R: Rng + ?Sized>(n: u32, b: u8, rng: &mut R) -> Result<SimonInstance> {
    check_n(n, MAX_TABLE_BITS)?;
    let size = 1u32 << n;
    let mut outputs: Vec<u32> = (0..size).collect();
    outputs.shuffle(rng);
    match b {
        0 => SimonInstance::new(n, 0, 0, outputs),
        1 => {
            let s = rng.random_range(1..size);
            let mut table = alloc::vec![0u32; size as usize];
            let reps = (0..size).filter(|&x| x < x ^ s);
            for (rep, &y) in reps.zip(&outputs) {
                table[rep as usize] = y;
                table[(rep ^ s) as usize] = y;
            }
            SimonInstance::new(n, 1, s, table)
        }
        _ => Err(invalid("b must be 0 or 1")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrpConfig {
    pub key: Vec<u8>,
    pub rounds: u32,
}

impl PrpConfig {
    pub fn new(key: Vec<u8>, rounds: u32) -> Result<Self> {
        if key.is_empty() {
            return Err(invalid("PRP key must be nonempty"));
        }
        if rounds < 4 || rounds % 2 != 0 {
            return Err(invalid("Feistel rounds must be even and at least 4"));
        }
        Ok(PrpConfig { key, rounds })
    }
}

fn round_function(key: &[u8], round: u32, input: u32, out_bits: u32) -> u32 {
    if out_bits == 0 {
        return 0;
    }
    let digest = Sha256::new()
        .chain_update(key)
        .chain_update(round.to_le_bytes())
        .chain_update(input.to_le_bytes())
        .finalize();
    let word = u32::from_le_bytes([digest[0], digest[1], digest[2], digest[3]]);
    word & ((1u32 << out_bits) - 1)
}

/// Keyed permutation of n-bit blocks: unbalanced Feistel with halves of
/// ⌈n/2⌉ and ⌊n/2⌋ bits whose widths alternate each round.
pub fn feistel_permute(x: u32, n: u32, cfg: &PrpConfig) -> u32 {
    let mut lw = n.div_ceil(2);
    let mut rw = n / 2;
    let mut l = x >> rw;
    let mut r = x & ((1u32 << rw) - 1);
    for round in 0..cfg.rounds {
        let nl = r;
        let nr = l ^ round_function(&cfg.key, round, r, lw);
        l = nl;
        r = nr;
        core::mem::swap(&mut lw, &mut rw);
    }
    (l << rw) | r
}

/// f = P_k (b = 0) or f(x) = P_k(min(x, x ⊕ s)) (b = 1).
pub fn prp_instance(n: u32, b: u8, s: u32, cfg: &PrpConfig) -> Result<SimonInstance> {
    check_n(n, MAX_TABLE_BITS)?;
    let size = 1u32 << n;
    let table: Vec<u32> = match b {
        0 => (0..size).map(|x| feistel_permute(x, n, cfg)).collect(),
        1 => {
            if s == 0 || s >= size {
                return Err(invalid("b = 1 requires a nonzero shift"));
            }
            (0..size).map(|x| feistel_permute(x.min(x ^ s), n, cfg)).collect()
        }
        _ => return Err(invalid("b must be 0 or 1")),
    };
    SimonInstance::new(n, b, if b == 1 { s } else { 0 }, table)
}

/// Append-only record of classical queries with pairwise-distinct inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryLog {
    queries: Vec<(u32, u32)>,
    seen: BTreeSet<u32>,
}

impl QueryLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn queries(&self) -> &[(u32, u32)] {
        &self.queries
    }

    pub fn count(&self) -> usize {
        self.queries.len()
    }

    pub fn has_collision(&self) -> bool {
        let mut outs = BTreeSet::new();
        self.queries.iter().any(|&(_, y)| !outs.insert(y))
    }
}

/// O_f|x,0⟩ = |x,f(x)⟩ on a fresh input.
pub fn classical_query(inst: &SimonInstance, x: u32, log: &mut QueryLog) -> Result<u32> {
    if x as usize >= inst.size() {
        return Err(Error::IndexOutOfRange { index: x as usize, bound: inst.size() });
    }
    if !log.seen.insert(x) {
        return Err(Error::RepeatedQuery(x));
    }
    let y = inst.f(x);
    log.queries.push((x, y));
    Ok(y)
}

/// H^⊗n ⊗ 1, oracle, H^⊗n ⊗ 1 on |0⟩^⊗2n; input register is qubits 0..n.
pub fn fourier_twice_state(inst: &SimonInstance) -> Result<StateVector> {
    check_n(inst.n, MAX_QUANTUM_BITS)?;
    let n = inst.n as usize;
    let mut sv = StateVector::zero(2 * n)?;
    sv.hadamard_range(0, n);
    sv.apply_oracle(0, n, n, &inst.f_table)?;
    sv.hadamard_range(0, n);
    Ok(sv)
}

/// Exact distribution of the measured input register.
pub fn fourier_twice_distribution(inst: &SimonInstance) -> Result<Vec<f64>> {
    let n = inst.n as usize;
    Ok(fourier_twice_state(inst)?.register_distribution(0, n))
}

pub fn quantum_fourier_twice_round<R: Rng + ?Sized>(inst: &SimonInstance, rng: &mut R) -> Result<u32> {
    let dist = fourier_twice_distribution(inst)?;
    Ok(sample_index(&dist, rng) as u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumSolve {
    pub a: u8,
    /// Oracle calls actually made: rounds, plus 2 if verification ran.
    pub m_used: usize,
    pub samples: Vec<u32>,
    pub rank: usize,
    pub candidate: Option<u32>,
    pub verification: Option<QueryLog>,
}

/// Rounds of Fourier-twice; full rank ⇒ a = 0, otherwise test a kernel
/// vector s̃ with f(0) = f(s̃).
pub fn quantum_solve<R: Rng + ?Sized>(inst: &SimonInstance, rounds: usize, rng: &mut R) -> Result<QuantumSolve> {
    let dist = fourier_twice_distribution(inst)?;
    quantum_solve_with_distribution(inst, &dist, rounds, rng)
}

/// Same as [`quantum_solve`] with a precomputed round distribution; every
/// round is an independent draw from it.
pub fn quantum_solve_with_distribution<R: Rng + ?Sized>(
    inst: &SimonInstance,
    dist: &[f64],
    rounds: usize,
    rng: &mut R,
) -> Result<QuantumSolve> {
    if rounds < inst.n as usize + 1 {
        return Err(invalid("rounds must be at least n + 1"));
    }
    let samples: Vec<u32> = (0..rounds).map(|_| sample_index(dist, rng) as u32).collect();
    let wide: Vec<u64> = samples.iter().map(|&y| y as u64).collect();
    let rank = gf2_rank(&wide);
    if rank == inst.n as usize {
        return Ok(QuantumSolve { a: 0, m_used: rounds, samples, rank, candidate: None, verification: None });
    }
    let cand = gf2_kernel_vector(&wide, inst.n).expect("rank deficit implies a kernel vector") as u32;
    let mut log = QueryLog::new();
    let f0 = classical_query(inst, 0, &mut log)?;
    let fs = classical_query(inst, cand, &mut log)?;
    let a = (f0 == fs) as u8;
    Ok(QuantumSolve { a, m_used: rounds + 2, samples, rank, candidate: Some(cand), verification: Some(log) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalSolve {
    pub a: u8,
    pub log: QueryLog,
}

/// m distinct uniformly random inputs; any output collision ⇒ a = 1.
pub fn classical_solve<R: Rng + ?Sized>(inst: &SimonInstance, m: usize, rng: &mut R) -> Result<ClassicalSolve> {
    if m > inst.size() {
        return Err(invalid(format!("m = {m} exceeds the domain size {}", inst.size())));
    }
    let mut log = QueryLog::new();
    for x in rand::seq::index::sample(rng, inst.size(), m).iter() {
        classical_query(inst, x as u32, &mut log)?;
    }
    Ok(ClassicalSolve { a: log.has_collision() as u8, log })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    /// Δ ∈ (0, 1/2)
    pub delta_cap: f64,
    /// δ ∈ (0, 1)
    pub delta_fail: f64,
}

impl BoundParams {
    pub fn new(delta_cap: f64, delta_fail: f64) -> Result<Self> {
        check_delta_cap(delta_cap, 0.5)?;
        if !(delta_fail > 0.0 && delta_fail < 1.0) {
            return Err(invalid("delta_fail must lie in (0, 1)"));
        }
        Ok(BoundParams { delta_cap, delta_fail })
    }
}

fn check_delta_cap(delta: f64, upper: f64) -> Result<()> {
    if !(delta > 0.0 && delta < upper) {
        return Err(invalid(format!("delta_cap must lie in (0, {upper})")));
    }
    Ok(())
}

/// √(2Δ/(1+Δ)) · 2^{n/2}, before the ceiling.
pub fn m_lower_real(n: u32, delta_cap: f64) -> Result<f64> {
    check_delta_cap(delta_cap, 0.5)?;
    Ok((2.0 * delta_cap / (1.0 + delta_cap)).sqrt() * 2f64.powf(n as f64 / 2.0))
}

/// M_{N,Δ} = ⌈√(2Δ/(1+Δ)) · 2^{N/2}⌉
pub fn m_lower(n: u32, delta_cap: f64) -> Result<u64> {
    if n > 120 {
        return Err(invalid("n too large for an integer query count"));
    }
    Ok(m_lower_real(n, delta_cap)?.ceil() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prop1Ceiling {
    pub value: f64,
    /// m² ≥ 2^{n+1} or the formula exceeded 1; value is then 1.
    pub saturated: bool,
}

/// 1/2 + M²/(2^{N+1} − M²), the best average success of m classical queries.
pub fn prop1_success_ceiling(n: u32, m: u64) -> Prop1Ceiling {
    let m2 = (m as f64) * (m as f64);
    let denom = 2f64.powi(n as i32 + 1) - m2;
    if denom <= 0.0 {
        return Prop1Ceiling { value: 1.0, saturated: true };
    }
    let v = 0.5 + m2 / denom;
    if v >= 1.0 {
        Prop1Ceiling { value: 1.0, saturated: true }
    } else {
        Prop1Ceiling { value: v, saturated: false }
    }
}

/// M = ⌈½√(8 ln(1/δ)·2^N + 1) + ½⌉ (uncapped).
pub fn prop3_queries(n: u32, delta_fail: f64) -> Result<u64> {
    if !(delta_fail > 0.0 && delta_fail < 1.0) {
        return Err(invalid("delta_fail must lie in (0, 1)"));
    }
    let v = 0.5 * (8.0 * (1.0 / delta_fail).ln() * 2f64.powi(n as i32) + 1.0).sqrt() + 0.5;
    Ok(v.ceil() as u64)
}

/// e^{−M(M−1)/2^{N+1}}, the no-collision bound at M queries.
pub fn prop3_failure_bound(n: u32, m: u64) -> f64 {
    let m = m as f64;
    (-m * (m - 1.0) / 2f64.powi(n as i32 + 1)).exp()
}

/// (1 − 6Δ)/(3 − 6Δ), for Δ ∈ (0, 1/6).
pub fn lemma1_floor(delta_cap: f64) -> Result<f64> {
    check_delta_cap(delta_cap, 1.0 / 6.0)?;
    Ok((1.0 - 6.0 * delta_cap) / (3.0 - 6.0 * delta_cap))
}

/// Output multiset histogram, handy for checking 2-to-1 structure.
pub fn output_counts(inst: &SimonInstance) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &y in &inst.f_table {
        *m.entry(y).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::dot;
    use crate::rng::trial_rng;

    #[test]
    fn n1_two_to_one() {
        let mut rng = trial_rng(1, 0);
        let inst = sample_instance_with_bit(1, 1, &mut rng).unwrap();
        assert_eq!(inst.s, 1);
        assert_eq!(inst.f(0), inst.f(1));
    }

    #[test]
    fn uniform_instances_respect_invariants() {
        let mut rng = trial_rng(2, 0);
        let mut ones = 0;
        for _ in 0..2000 {
            let inst = sample_uniform_instance(4, &mut rng).unwrap();
            if inst.b == 1 {
                ones += 1;
                assert!(output_counts(&inst).values().all(|&c| c == 2));
            }
        }
        assert!((ones as f64 / 2000.0 - 0.5).abs() < 0.05);
        assert!(sample_uniform_instance(0, &mut rng).is_err());
        assert!(sample_uniform_instance(21, &mut rng).is_err());
    }

    #[test]
    fn validation_rejects_broken_tables() {
        assert!(SimonInstance::new(2, 0, 0, alloc::vec![0, 0, 1, 2]).is_err());
        assert!(SimonInstance::new(2, 1, 1, alloc::vec![0, 0, 1, 2]).is_err());
        assert!(SimonInstance::new(2, 1, 1, alloc::vec![0, 0, 1, 1]).is_ok());
        assert!(SimonInstance::new(2, 1, 2, alloc::vec![0, 0, 1, 1]).is_err());
    }

    #[test]
    fn prp_structure() {
        let cfg = PrpConfig::new(alloc::vec![7, 1, 3], 8).unwrap();
        for n in 1..=9u32 {
            let inst = prp_instance(n, 0, 0, &cfg).unwrap();
            assert!(output_counts(&inst).values().all(|&c| c == 1));
            let s = (1u32 << n) - 1;
            let two = prp_instance(n, 1, s, &cfg).unwrap();
            assert!((0..1u32 << n).all(|x| two.f(x) == two.f(x ^ s)));
        }
        assert_eq!(feistel_permute(5, 6, &cfg), feistel_permute(5, 6, &cfg));
        let other = PrpConfig::new(alloc::vec![7, 1, 4], 8).unwrap();
        let a: Vec<u32> = (0..64).map(|x| feistel_permute(x, 6, &cfg)).collect();
        let b: Vec<u32> = (0..64).map(|x| feistel_permute(x, 6, &other)).collect();
        assert_ne!(a, b);
        assert!(PrpConfig::new(alloc::vec![1], 5).is_err());
        assert!(PrpConfig::new(alloc::vec![], 8).is_err());
    }

    #[test]
    fn query_discipline() {
        let ident = SimonInstance::new(3, 0, 0, (0..8).collect()).unwrap();
        let mut log = QueryLog::new();
        assert_eq!(classical_query(&ident, 5, &mut log).unwrap(), 5);
        assert_eq!(classical_query(&ident, 5, &mut log), Err(Error::RepeatedQuery(5)));
        assert_eq!(log.count(), 1);

        let mut rng = trial_rng(3, 0);
        let two = sample_instance_with_bit(3, 1, &mut rng).unwrap();
        let mut log = QueryLog::new();
        let y1 = classical_query(&two, 2, &mut log).unwrap();
        let y2 = classical_query(&two, 2 ^ two.s, &mut log).unwrap();
        assert_eq!(y1, y2);
    }

    #[test]
    fn fourier_samples_orthogonal_to_shift() {
        let mut rng = trial_rng(4, 0);
        for n in 1..=6 {
            let inst = sample_instance_with_bit(n, 1, &mut rng).unwrap();
            let dist = fourier_twice_distribution(&inst).unwrap();
            for (y, &p) in dist.iter().enumerate() {
                if dot(y as u64, inst.s as u64) == 1 {
                    assert!(p < 1e-14);
                }
            }
            for _ in 0..200 {
                let y = quantum_fourier_twice_round(&inst, &mut rng).unwrap();
                assert_eq!(dot(y as u64, inst.s as u64), 0);
            }
        }
    }

    #[test]
    fn fourier_uniform_for_permutation() {
        let ident = SimonInstance::new(3, 0, 0, (0..8).collect()).unwrap();
        let dist = fourier_twice_distribution(&ident).unwrap();
        assert!(dist.iter().all(|&p| (p - 0.125).abs() < 1e-14));
    }

    #[test]
    fn quantum_solver_at_n4() {
        let mut rng = trial_rng(5, 0);
        for b in [0u8, 1] {
            let mut correct = 0;
            for _ in 0..200 {
                let inst = sample_instance_with_bit(4, b, &mut rng).unwrap();
                let r = quantum_solve(&inst, 14, &mut rng).unwrap();
                correct += (r.a == b) as usize;
                assert!(r.m_used == 14 || r.m_used == 16);
            }
            assert!(correct >= 196, "b={b} correct={correct}");
        }
        let inst = sample_instance_with_bit(4, 1, &mut rng).unwrap();
        assert!(quantum_solve(&inst, 4, &mut rng).is_err());
    }

    #[test]
    fn classical_solver_rules() {
        let mut rng = trial_rng(6, 0);
        let one = sample_instance_with_bit(1, 1, &mut rng).unwrap();
        assert_eq!(classical_solve(&one, 2, &mut rng).unwrap().a, 1);
        for _ in 0..100 {
            let perm = sample_instance_with_bit(5, 0, &mut rng).unwrap();
            assert_eq!(classical_solve(&perm, 32, &mut rng).unwrap().a, 0);
        }
        assert!(classical_solve(&one, 3, &mut rng).is_err());
    }

    #[test]
    fn bound_calculators() {
        assert_eq!(m_lower(10, 1.0 / 6.0).unwrap(), 18);
        assert_eq!(m_lower(4, 1.0 / 6.0).unwrap(), 3);
        assert_eq!(m_lower(50, delta_star()).unwrap(), 11_596_042);
        assert!(m_lower(4, 0.5).is_err());

        assert_eq!(prop1_success_ceiling(10, 0).value, 0.5);
        let c = prop1_success_ceiling(10, 18);
        assert!((c.value - (0.5 + 324.0 / 1724.0)).abs() < 1e-15 && !c.saturated);
        assert!(prop1_success_ceiling(4, 6).saturated);

        assert_eq!(prop3_queries(10, 1.0 / 3.0).unwrap(), 48);
        assert_eq!(prop3_queries(1, 1.0 / 3.0).unwrap(), 3);
        let m = prop3_queries(10, 1.0 / 3.0).unwrap();
        assert!(prop3_failure_bound(10, m) < 1.0 / 3.0);

        assert!((lemma1_floor(1.0 / 12.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((lemma1_floor(1e-12).unwrap() - 1.0 / 3.0).abs() < 1e-11);
        assert!((lemma1_floor(delta_star()).unwrap() - 0.236_335_2).abs() < 1e-7);
        assert!(lemma1_floor(0.2).is_err());
        assert!((delta_star() - 0.063_508_326_9).abs() < 1e-10);
    }
}
