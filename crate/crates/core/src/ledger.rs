//! Energy accounting of a full computation cycle and the bound calculators.
//!
//! A run has gates U_1..U_{M+1}, M oracle queries in between, an output swap
//! and a qubit-wise reinitialization. Every computer qubit carries
//! H = diag(0, E_qubit), so each energy change is E_qubit times a change of
//! excited population.
//!
//! The consumption is 𝒲 = 𝒲_gates + ΣΔE^(in,k) − ΔE^(out) with
//! 𝒲_gates = Σ(ΔE^(U_k) + E_ctrl^(U_k)) + ΣE_ctrl^(in,k) + E_ctrl^(out)
//! + (ΔE^(𝓔) + Q_E + E_ctrl^(𝓔)).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, LN_2};

use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::fit::exact_sum;
use crate::landauer::{erase_register, required_steps, ErasureConfig, ErasureReport, RegisterErasureReport};
use crate::quantum::{shannon, DensityOperator};
use crate::simon::{
    classical_solve, delta_star, lemma1_floor, m_lower, quantum_solve_with_distribution, SimonInstance,
};
use crate::statevector::StateVector;

pub const MAX_FRAMEWORK_QUANTUM_BITS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    pub e_qubit: f64,
    /// Control energy per qubit per unit depth.
    pub e_ctrl: f64,
    /// Coefficient of the environment control cost c·(T/β)·ln(1/ε).
    pub c_ctrl_env: f64,
    pub beta: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub d_swap: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { e_qubit: 1.0, e_ctrl: 1.0, c_ctrl_env: 1.0, beta: 1.0, eta: 0.1, epsilon: 0.01, d_swap: 3 }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.e_qubit > 0.0) || self.e_ctrl < 0.0 || self.c_ctrl_env < 0.0 {
            return Err(invalid("e_qubit must be positive, control coefficients nonnegative"));
        }
        if self.d_swap == 0 {
            return Err(invalid("d_swap must be positive"));
        }
        self.erasure_config().map(|_| ())
    }

    pub fn erasure_config(&self) -> Result<ErasureConfig> {
        ErasureConfig::new(self.beta, self.epsilon, self.eta, 2)
    }

    pub fn erasure_steps(&self) -> Result<usize> {
        required_steps(&self.erasure_config()?)
    }

    /// E_ctrl^(𝓔) for W qubits and T steps.
    pub fn erasure_control(&self, w: usize, steps: usize) -> f64 {
        let t = steps as f64;
        (self.e_ctrl + self.c_ctrl_env * (t / self.beta) * (1.0 / self.epsilon).ln())
            * w as f64
            * t
            * self.d_swap as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitShape {
    pub n: u32,
    pub w: usize,
    pub m: usize,
    /// D_1..D_{M+1}
    pub depths: Vec<u64>,
    pub d_erase: u64,
}

impl CircuitShape {
    pub fn new(n: u32, w: usize, m: usize, depths: Vec<u64>, d_erase: u64) -> Result<Self> {
        if w < 2 * n as usize {
            return Err(invalid("width must be at least 2n"));
        }
        if depths.len() != m + 1 {
            return Err(Error::DimensionMismatch { expected: m + 1, found: depths.len() });
        }
        Ok(CircuitShape { n, w, m, depths, d_erase })
    }

    /// M = n+12 queries on W = 2nM qubits, unit-depth query gates and an
    /// n³-depth classical post-processing gate.
    pub fn simon(n: u32, cost: &CostModel) -> Result<Self> {
        let m = n as usize + 12;
        let mut depths = vec![1u64; m];
        depths.push((n as u64).pow(3));
        let d_erase = cost.erasure_steps()? as u64 * cost.d_swap;
        Self::new(n, 2 * n as usize * m, m, depths, d_erase)
    }

    pub fn gate_depth(&self) -> u64 {
        self.depths.iter().sum()
    }

    /// D = ΣD_k + (2M+1)·D_swap + D_𝓔
    pub fn total_depth(&self, d_swap: u64) -> u64 {
        self.gate_depth() + (2 * self.m as u64 + 1) * d_swap + self.d_erase
    }
}

/// Constants that instantiate the asymptotic upper bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Multiplies the erasure term; 1 reproduces the bare expression.
    pub c4: f64,
    /// Power of ln(1/(εη)).
    pub p: f64,
    /// Polylog exponent in the fault-tolerant bound.
    pub q: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants { c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0, p: 2.0, q: 2.0 }
    }
}

impl BoundConstants {
    /// Constants under which a ledger of this cost model is provably
    /// dominated, derived from T ≤ k_T·L/η with L = ln(1/(εη)) ≥ ln 2.
    pub fn matched(cost: &CostModel) -> Self {
        let a = (E + 1.0) / E;
        let k_t = a + (a * (E + 1.0).ln() + 1.0) / LN_2;
        let ratio = cost.e_ctrl / cost.e_qubit;
        let d_swap = cost.d_swap as f64;
        let c4 = (1.0 + ratio) * d_swap * k_t / (LN_2 * LN_2);
        let c3 = (cost.c_ctrl_env * d_swap * k_t * k_t + (LN_2 + 1.0) / LN_2.powi(3)) / c4;
        BoundConstants { c1: 1.0 + ratio, c2: 3.0 * d_swap + 1.0, c3, c4, p: 3.0, q: 2.0 }
    }
}

fn log_term(cost: &CostModel, k: &BoundConstants) -> f64 {
    (1.0 / (cost.epsilon * cost.eta)).ln().powf(k.p)
}

/// c₁E_qW(ΣD_k + c₂M) + c₄(E_q + c₃/(βη))(W/η)·ln(1/(εη))^p
pub fn theorem2_upper(shape: &CircuitShape, cost: &CostModel, k: &BoundConstants) -> f64 {
    let w = shape.w as f64;
    let gates = k.c1 * cost.e_qubit * w * (shape.gate_depth() as f64 + k.c2 * shape.m as f64);
    gates + theorem2_erasure_term(shape, cost, k)
}

/// The reinitialization part of [`theorem2_upper`].
pub fn theorem2_erasure_term(shape: &CircuitShape, cost: &CostModel, k: &BoundConstants) -> f64 {
    let w = shape.w as f64;
    k.c4 * (cost.e_qubit + k.c3 / (cost.beta * cost.eta)) * (w / cost.eta) * log_term(cost, k)
}

/// (ln(W·D))^q
pub fn polylog_factor(shape: &CircuitShape, cost: &CostModel, k: &BoundConstants) -> f64 {
    let wd = shape.w as f64 * shape.total_depth(cost.d_swap) as f64;
    wd.ln().max(1.0).powf(k.q)
}

/// polylog·[c₁E_qW(S + c₂M + 1/η)(S + c₂M) + c₄(E_q + c₃/(βη))(W/η)(S + c₂M + 1/η)L^p]
/// with S = ΣD_k.
pub fn theorem3_upper(shape: &CircuitShape, cost: &CostModel, k: &BoundConstants) -> f64 {
    let w = shape.w as f64;
    let core = shape.gate_depth() as f64 + k.c2 * shape.m as f64;
    let ft = core + 1.0 / cost.eta;
    let gates = k.c1 * cost.e_qubit * w * ft * core;
    let erase = k.c4 * (cost.e_qubit + k.c3 / (cost.beta * cost.eta)) * (w / cost.eta) * ft * log_term(cost, k);
    polylog_factor(shape, cost, k) * (gates + erase)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLedger {
    pub w: usize,
    pub m: usize,
    pub n: u32,
    pub depths: Vec<u64>,
    pub d_erase: u64,
    pub erasure_steps: usize,
    pub e_qubit: f64,
    pub beta: f64,
    pub eta: f64,
    pub epsilon: f64,
    /// ΔE^(U_k), k = 1..M+1
    pub delta_e_gates: Vec<f64>,
    /// ΔE^(in,k), k = 1..M
    pub delta_e_in: Vec<f64>,
    pub delta_e_out: f64,
    /// ΔE^(𝓔), computer energy change during reinitialization.
    pub delta_e_erase: f64,
    pub ctrl_gates: Vec<f64>,
    pub ctrl_in: Vec<f64>,
    pub ctrl_out: f64,
    pub ctrl_erase: f64,
    /// Heat into the thermal environment.
    pub q_e: f64,
    pub erasure_delta_s: f64,
    pub erasure_excess: f64,
}

impl EnergyLedger {
    fn ctrl_terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.ctrl_gates.iter().chain(&self.ctrl_in).copied().chain([self.ctrl_out, self.ctrl_erase])
    }

    fn w_gates_terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.delta_e_gates.iter().copied().chain(self.ctrl_terms()).chain([self.delta_e_erase, self.q_e])
    }

    fn w_terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.w_gates_terms().chain(self.delta_e_in.iter().copied()).chain([-self.delta_e_out])
    }

    fn residual_terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.delta_e_gates.iter().chain(&self.delta_e_in).copied().chain([-self.delta_e_out, self.delta_e_erase])
    }

    pub fn ctrl_total(&self) -> f64 {
        exact_sum(self.ctrl_terms())
    }

    /// Dissipation into the control apparatus.
    pub fn q_e_prime(&self) -> f64 {
        self.ctrl_total()
    }

    pub fn w_gates(&self) -> f64 {
        exact_sum(self.w_gates_terms())
    }

    /// 𝒲 = 𝒲_gates + ΔE^(in) − ΔE^(out)
    pub fn total_w(&self) -> f64 {
        exact_sum(self.w_terms())
    }

    /// Net energy change of the computer over the cycle.
    pub fn conservation_residual(&self) -> f64 {
        exact_sum(self.residual_terms())
    }

    /// |𝒲 − (Q_E + Q_E' + residual)|, summed exactly over the ledger fields
    /// so rounding of the large control terms does not enter.
    pub fn identity_error(&self) -> f64 {
        let rhs = core::iter::once(self.q_e).chain(self.ctrl_terms()).chain(self.residual_terms());
        exact_sum(self.w_terms().chain(rhs.map(|x| -x))).abs()
    }

    pub fn shape(&self) -> CircuitShape {
        CircuitShape { n: self.n, w: self.w, m: self.m, depths: self.depths.clone(), d_erase: self.d_erase }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub a: u8,
    /// p(a = 0), p(a = 1)
    pub p_a: [f64; 2],
    /// S(ρ_a^C) for a = 0, 1 (0 when p(a) = 0).
    pub conditional_entropies: [f64; 2],
    /// S(C|a) = Σ_a p(a) S(ρ_a^C)
    pub s_c_given_a: f64,
}

impl RunOutcome {
    fn deterministic(a: u8) -> Self {
        let mut p_a = [0.0; 2];
        p_a[a as usize] = 1.0;
        RunOutcome { a, p_a, conditional_entropies: [0.0; 2], s_c_given_a: 0.0 }
    }
}

/// (1/β)·S(C|a)
pub fn theorem4_lower(outcome: &RunOutcome, beta: f64) -> f64 {
    outcome.s_c_given_a / beta
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// No gates, no queries, output 0.
    Trivial,
    QuantumSimon { rounds: usize },
    ClassicalSimon { m: usize },
}

/// Per-qubit populations of one Fourier-twice round on its own 2n qubits.
#[derive(Clone, Debug)]
pub struct RoundTrace {
    pub after_first_h: Vec<f64>,
    pub after_oracle: Vec<f64>,
    pub after_second_h: Vec<f64>,
    pub marginals: Vec<DensityOperator>,
    /// Distribution of the measured input register.
    pub distribution: Vec<f64>,
}

pub fn fourier_twice_trace(inst: &SimonInstance) -> Result<RoundTrace> {
    let n = inst.n as usize;
    let pops = |sv: &StateVector| (0..2 * n).map(|q| sv.excited_population(q)).collect::<Vec<_>>();
    let mut sv = StateVector::zero(2 * n)?;
    sv.hadamard_range(0, n);
    let after_first_h = pops(&sv);
    sv.apply_oracle(0, n, n, &inst.f_table)?;
    let after_oracle = pops(&sv);
    sv.hadamard_range(0, n);
    let after_second_h = pops(&sv);
    let marginals = (0..2 * n).map(|q| sv.qubit_marginal(q)).collect::<Result<Vec<_>>>()?;
    let distribution = sv.register_distribution(0, n);
    Ok(RoundTrace { after_first_h, after_oracle, after_second_h, marginals, distribution })
}

fn bit_marginals(value: u32, bits: u32) -> Result<Vec<DensityOperator>> {
    (0..bits).map(|i| DensityOperator::basis(2, ((value >> i) & 1) as usize)).collect()
}

fn population_sum(p: &[f64]) -> f64 {
    p.iter().sum()
}

/// Qubit-wise erasure with identical marginals sharing one protocol run.
fn erase_qubits(marginals: &[DensityOperator], cfg: &ErasureConfig) -> Result<RegisterErasureReport> {
    let mut cache: BTreeMap<[u64; 8], ErasureReport> = BTreeMap::new();
    let mut qubits = Vec::with_capacity(marginals.len());
    for rho in marginals {
        let m = rho.matrix();
        let key = [
            m[(0, 0)].re.to_bits(),
            m[(0, 0)].im.to_bits(),
            m[(0, 1)].re.to_bits(),
            m[(0, 1)].im.to_bits(),
            m[(1, 0)].re.to_bits(),
            m[(1, 0)].im.to_bits(),
            m[(1, 1)].re.to_bits(),
            m[(1, 1)].im.to_bits(),
        ];
        if let Some(r) = cache.get(&key) {
            qubits.push(r.clone());
            continue;
        }
        let r = erase_register(core::slice::from_ref(rho), cfg)?.qubits.pop().expect("one qubit");
        cache.insert(key, r.clone());
        qubits.push(r);
    }
    let steps = required_steps(cfg)?;
    Ok(RegisterErasureReport {
        steps,
        heat: qubits.iter().map(|r| r.heat).sum(),
        delta_s: qubits.iter().map(|r| r.delta_s).sum(),
        excess: qubits.iter().map(|r| r.excess).sum(),
        final_infidelity: qubits.iter().map(|r| r.final_infidelity).fold(0.0, f64::max),
        max_env_energy: qubits.iter().map(|r| r.max_env_energy).sum(),
        qubits,
    })
}

/// Everything a run contributes before control costs and erasure.
struct RawRun {
    n: u32,
    a: u8,
    output_swap: bool,
    /// Population changes per gate, per query.
    gate_pops: Vec<f64>,
    in_pops: Vec<f64>,
    depths: Vec<u64>,
    marginals: Vec<DensityOperator>,
}

fn finish(raw: RawRun, cost: &CostModel) -> Result<EnergyLedger> {
    let cfg = cost.erasure_config()?;
    let e = cost.e_qubit;
    let w = raw.marginals.len();
    let m = raw.in_pops.len();
    let wf = w as f64;
    let d_swap = cost.d_swap as f64;
    let before: f64 = raw.marginals.iter().map(|r| r.population(1)).sum();
    let erasure = erase_qubits(&raw.marginals, &cfg)?;
    let after: f64 = erasure.qubits.iter().map(|r| r.final_state.population(1)).sum();
    let steps = erasure.steps;
    Ok(EnergyLedger {
        w,
        m,
        n: raw.n,
        d_erase: steps as u64 * cost.d_swap,
        erasure_steps: steps,
        e_qubit: e,
        beta: cost.beta,
        eta: cost.eta,
        epsilon: cost.epsilon,
        delta_e_gates: raw.gate_pops.iter().map(|p| e * p).collect(),
        delta_e_in: raw.in_pops.iter().map(|p| e * p).collect(),
        delta_e_out: if raw.output_swap { e * raw.a as f64 } else { 0.0 },
        delta_e_erase: e * (after - before),
        ctrl_gates: raw.depths.iter().map(|&d| cost.e_ctrl * wf * d as f64).collect(),
        ctrl_in: vec![cost.e_ctrl * wf * 2.0 * d_swap; m],
        ctrl_out: if raw.output_swap { cost.e_ctrl * wf * d_swap } else { 0.0 },
        ctrl_erase: cost.erasure_control(w, steps),
        q_e: erasure.heat,
        erasure_delta_s: erasure.delta_s,
        erasure_excess: erasure.excess,
        depths: raw.depths,
    })
}

fn post_processing_depth(n: u32) -> u64 {
    (n as u64).pow(3)
}

/// Execute one algorithm on one instance and fill its ledger. Quantum
/// rounds reuse a single 2n-qubit register; the ledger still charges the
/// full width W = 2n·M + 1 (the extra qubit holds the answer).
pub fn run_framework<R: Rng + ?Sized>(
    inst: &SimonInstance,
    alg: Algorithm,
    cost: &CostModel,
    rng: &mut R,
) -> Result<(EnergyLedger, RunOutcome)> {
    cost.validate()?;
    let n = inst.n;
    let raw = match alg {
        Algorithm::Trivial => RawRun {
            n,
            a: 0,
            output_swap: false,
            gate_pops: vec![0.0],
            in_pops: vec![],
            depths: vec![0],
            marginals: vec![DensityOperator::basis(2, 0)?],
        },
        Algorithm::QuantumSimon { rounds } => {
            if n > MAX_FRAMEWORK_QUANTUM_BITS {
                return Err(Error::TooLarge(format!("quantum framework run at n = {n}")));
            }
            let trace = fourier_twice_trace(inst)?;
            let solve = quantum_solve_with_distribution(inst, &trace.distribution, rounds, rng)?;
            let h1 = population_sum(&trace.after_first_h);
            let oracle = population_sum(&trace.after_oracle) - h1;
            let h2 = population_sum(&trace.after_second_h) - population_sum(&trace.after_oracle);
            let mut gate_pops = vec![h1];
            let mut in_pops = vec![oracle];
            for _ in 1..rounds {
                gate_pops.push(h2 + h1);
                in_pops.push(oracle);
            }
            let mut depths = vec![1u64; rounds];
            let mut marginals: Vec<DensityOperator> = Vec::new();
            for _ in 0..rounds {
                marginals.extend(trace.marginals.iter().cloned());
            }
            match &solve.verification {
                Some(log) => {
                    let q = log.queries();
                    let (x0, y0) = q[0];
                    let (x1, y1) = q[1];
                    gate_pops.push(h2 + x0.count_ones() as f64);
                    in_pops.push(y0.count_ones() as f64);
                    gate_pops.push(x1.count_ones() as f64);
                    in_pops.push(y1.count_ones() as f64);
                    depths.extend([1, 1]);
                    for (x, y) in [(x0, y0), (x1, y1)] {
                        marginals.extend(bit_marginals(x, n)?);
                        marginals.extend(bit_marginals(y, n)?);
                    }
                    gate_pops.push(solve.a as f64);
                }
                None => gate_pops.push(h2 + solve.a as f64),
            }
            depths.push(post_processing_depth(n));
            // Answer qubit, returned to |0⟩ by the output swap.
            marginals.push(DensityOperator::basis(2, 0)?);
            debug_assert_eq!(in_pops.len(), solve.m_used);
            RawRun { n, a: solve.a, output_swap: true, gate_pops, in_pops, depths, marginals }
        }
        Algorithm::ClassicalSimon { m } => {
            let solve = classical_solve(inst, m, rng)?;
            let mut gate_pops = Vec::with_capacity(m + 1);
            let mut in_pops = Vec::with_capacity(m);
            let mut marginals = Vec::with_capacity(2 * n as usize * m + 1);
            for &(x, y) in solve.log.queries() {
                gate_pops.push(x.count_ones() as f64);
                in_pops.push(y.count_ones() as f64);
                marginals.extend(bit_marginals(x, n)?);
                marginals.extend(bit_marginals(y, n)?);
            }
            gate_pops.push(solve.a as f64);
            let mut depths = vec![1u64; m];
            depths.push(post_processing_depth(n));
            marginals.push(DensityOperator::basis(2, 0)?);
            RawRun { n, a: solve.a, output_swap: true, gate_pops, in_pops, depths, marginals }
        }
    };
    let a = raw.a;
    Ok((finish(raw, cost)?, RunOutcome::deterministic(a)))
}

#[derive(Clone, Debug)]
pub struct EnsembleRun {
    /// Ledger averaged over instances, query sequences and outputs.
    pub ledger: EnergyLedger,
    pub outcome: RunOutcome,
    pub success_probability: f64,
}

fn permutations(items: &mut Vec<u32>, k: usize, out: &mut impl FnMut(&[u32])) {
    // Heap's algorithm
    if k <= 1 {
        out(items);
        return;
    }
    for i in 0..k - 1 {
        permutations(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    permutations(items, k - 1, out);
}

/// Ordered selections of `k` distinct values from 0..size.
fn arrangements(size: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    let mut used = vec![false; size as usize];
    fn rec(size: u32, k: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..size {
            if !used[v as usize] {
                used[v as usize] = true;
                cur.push(v);
                rec(size, k, cur, used, out);
                cur.pop();
                used[v as usize] = false;
            }
        }
    }
    rec(size, k, &mut cur, &mut used, &mut out);
    out
}

/// Every Simon function on n bits with its prior weight.
fn all_instances(n: u32) -> Vec<(f64, u8, Vec<u32>)> {
    let size = 1u32 << n;
    let mut out = Vec::new();
    let mut perms = Vec::new();
    let mut items: Vec<u32> = (0..size).collect();
    permutations(&mut items, size as usize, &mut |p| perms.push(p.to_vec()));
    let wp = 0.5 / perms.len() as f64;
    out.extend(perms.into_iter().map(|p| (wp, 0u8, p)));
    let selections = arrangements(size, (size / 2) as usize);
    let w1 = 0.5 / ((size - 1) as f64 * selections.len() as f64);
    for s in 1..size {
        for sel in &selections {
            let mut table = vec![0u32; size as usize];
            for (rep, &y) in (0..size).filter(|&x| x < x ^ s).zip(sel) {
                table[rep as usize] = y;
                table[(rep ^ s) as usize] = y;
            }
            out.push((w1, 1u8, table));
        }
    }
    out
}

/// Exact average over uniform instances and uniform distinct query lists of
/// the classical collision finder. Erasure for each announced a acts on the
/// marginals of ρ_a^C, the computer state averaged given a.
pub fn run_classical_ensemble(n: u32, m: usize, cost: &CostModel) -> Result<EnsembleRun> {
    cost.validate()?;
    if n == 0 || n > 3 {
        return Err(Error::TooLarge(format!("exact ensemble needs 1 <= n <= 3, got {n}")));
    }
    let size = 1u32 << n;
    if m > size as usize {
        return Err(invalid("m exceeds the domain size"));
    }
    let w = 2 * n as usize * m + 1;
    if w > 64 {
        return Err(Error::TooLarge(format!("register of {w} bits")));
    }
    let instances = all_instances(n);
    let sequences = arrangements(size, m);
    let ws = 1.0 / sequences.len() as f64;

    let mut joint: [BTreeMap<u64, f64>; 2] = [BTreeMap::new(), BTreeMap::new()];
    let mut pops = [vec![0.0; w], vec![0.0; w]];
    let mut p_a = [0.0; 2];
    let mut gate_pops = vec![0.0; m + 1];
    let mut in_pops = vec![0.0; m];
    let mut success = 0.0;
    for (wi, b, table) in &instances {
        for xs in &sequences {
            let weight = wi * ws;
            let mut key = 0u64;
            let mut seen = 0u64;
            let mut collision = false;
            for (k, &x) in xs.iter().enumerate() {
                let y = table[x as usize];
                collision |= seen >> y & 1 == 1;
                seen |= 1 << y;
                key |= (x as u64) << (2 * n as usize * k);
                key |= (y as u64) << (2 * n as usize * k + n as usize);
                gate_pops[k] += weight * x.count_ones() as f64;
                in_pops[k] += weight * y.count_ones() as f64;
            }
            let a = collision as usize;
            gate_pops[m] += weight * a as f64;
            p_a[a] += weight;
            if a as u8 == *b {
                success += weight;
            }
            *joint[a].entry(key).or_insert(0.0) += weight;
            for (q, p) in pops[a].iter_mut().enumerate().take(w - 1) {
                *p += weight * ((key >> q) & 1) as f64;
            }
        }
    }

    let cfg = cost.erasure_config()?;
    let mut conditional_entropies = [0.0; 2];
    let mut q_e = 0.0;
    let mut delta_e_erase = 0.0;
    let mut delta_s = 0.0;
    let mut excess = 0.0;
    let mut steps = required_steps(&cfg)?;
    for a in 0..2 {
        if p_a[a] <= 0.0 {
            continue;
        }
        let probs: Vec<f64> = joint[a].values().map(|p| p / p_a[a]).collect();
        conditional_entropies[a] = shannon(&probs);
        let marginals = pops[a]
            .iter()
            .map(|&p| {
                let p1 = (p / p_a[a]).clamp(0.0, 1.0);
                DensityOperator::from_diagonal(&[1.0 - p1, p1])
            })
            .collect::<Result<Vec<_>>>()?;
        let before: f64 = marginals.iter().map(|r| r.population(1)).sum();
        let er = erase_qubits(&marginals, &cfg)?;
        let after: f64 = er.qubits.iter().map(|r| r.final_state.population(1)).sum();
        steps = er.steps;
        q_e += p_a[a] * er.heat;
        delta_s += p_a[a] * er.delta_s;
        excess += p_a[a] * er.excess;
        delta_e_erase += p_a[a] * cost.e_qubit * (after - before);
    }
    let s_c_given_a = p_a[0] * conditional_entropies[0] + p_a[1] * conditional_entropies[1];

    let e = cost.e_qubit;
    let wf = w as f64;
    let mut depths = vec![1u64; m];
    depths.push(post_processing_depth(n));
    let ledger = EnergyLedger {
        w,
        m,
        n,
        d_erase: steps as u64 * cost.d_swap,
        erasure_steps: steps,
        e_qubit: e,
        beta: cost.beta,
        eta: cost.eta,
        epsilon: cost.epsilon,
        delta_e_gates: gate_pops.iter().map(|p| e * p).collect(),
        delta_e_in: in_pops.iter().map(|p| e * p).collect(),
        delta_e_out: e * p_a[1],
        delta_e_erase,
        ctrl_gates: depths.iter().map(|&d| cost.e_ctrl * wf * d as f64).collect(),
        ctrl_in: vec![cost.e_ctrl * wf * 2.0 * cost.d_swap as f64; m],
        ctrl_out: cost.e_ctrl * wf * cost.d_swap as f64,
        ctrl_erase: cost.erasure_control(w, steps),
        q_e,
        erasure_delta_s: delta_s,
        erasure_excess: excess,
        depths,
    };
    let a = (p_a[1] > p_a[0]) as u8;
    Ok(EnsembleRun {
        ledger,
        outcome: RunOutcome { a, p_a, conditional_entropies, s_c_given_a },
        success_probability: success,
    })
}

/// ((1−6Δ)/(6−12Δ))·√(2Δ/(1+Δ)), maximized at Δ = 2 − √15/2.
pub fn corollary2_prefactor(delta: f64) -> f64 {
    (1.0 - 6.0 * delta) / (6.0 - 12.0 * delta) * (2.0 * delta / (1.0 + delta)).sqrt()
}

/// (1/β)[((1−6Δ)/(6−12Δ))(√(2Δ/(1+Δ))·2^{N/2}(N ln 2 − 1) − 1) − ln 2],
/// Δ ∈ (0, 1/6), defaulting to 2 − √15/2.
pub fn corollary2_lower(n: u32, beta: f64, delta: Option<f64>) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let d = delta.unwrap_or_else(delta_star);
    let p = lemma1_floor(d)? / 2.0;
    let nf = n as f64;
    let stirling = (2.0 * d / (1.0 + d)).sqrt() * 2f64.powf(nf / 2.0) * (nf * LN_2 - 1.0) - 1.0;
    Ok((p * stirling - LN_2) / beta)
}

/// The same bound written with the surds of the optimal Δ.
pub fn corollary2_closed_form(n: u32, beta: f64) -> f64 {
    let r15 = 15f64.sqrt();
    let nf = n as f64;
    let pre = (3.0 * r15 - 11.0) / (6.0 * r15 - 18.0);
    let root = ((8.0 - 2.0 * r15) / (6.0 - r15)).sqrt();
    (pre * (root * 2f64.powf(nf / 2.0) * (nf * LN_2 - 1.0) - 1.0) - LN_2) / beta
}

pub const K_B_CODATA: f64 = 1.380649e-23;
/// k_B rounded to one significant figure.
pub const K_B_ROUNDED: f64 = 1e-23;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KbMode {
    Codata,
    Paper,
}

impl KbMode {
    pub fn k_b(self) -> f64 {
        match self {
            KbMode::Codata => K_B_CODATA,
            KbMode::Paper => K_B_ROUNDED,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KbMode::Codata => "codata",
            KbMode::Paper => "paper",
        }
    }
}

/// Published lower bounds at 300 K, joules.
pub const TABLE1_PUBLISHED: [(u32, f64); 6] =
    [(50, 2e-13), (100, 1e-5), (150, 7e2), (200, 3e10), (250, 1e18), (300, 5e25)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table1Row {
    pub n: u32,
    pub temp_k: f64,
    pub k_b_mode: KbMode,
    pub bound_joules: f64,
}

pub fn table1(temps_kelvin: &[f64], ns: &[u32], mode: KbMode) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::with_capacity(temps_kelvin.len() * ns.len());
    for &t in temps_kelvin {
        if !(t > 0.0) {
            return Err(invalid("temperature must be positive"));
        }
        let beta = 1.0 / (mode.k_b() * t);
        for &n in ns {
            rows.push(Table1Row { n, temp_k: t, k_b_mode: mode, bound_joules: corollary2_lower(n, beta, None)? });
        }
    }
    Ok(rows)
}

/// Round to one significant figure.
pub fn round_sig1(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.abs().log10().floor();
    let scale = 10f64.powf(e);
    let r = (x / scale).round() * scale;
    // 9.6 → 10 keeps one digit
    let e2 = r.abs().log10().floor();
    (r / 10f64.powf(e2)).round() * 10f64.powf(e2)
}

/// Both values print as the same one-significant-figure number.
pub fn agrees_to_one_sig_fig(value: f64, published: f64) -> bool {
    let a = round_sig1(value);
    let b = round_sig1(published);
    (a - b).abs() <= 1e-9 * b.abs()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma2 {
    pub m: u64,
    /// ln(2^N!/(2^N − M)!)
    pub exact: f64,
    /// √(2Δ/(1+Δ))·2^{N/2}(N ln 2 − 1) − 1
    pub floor: f64,
}

impl Lemma2 {
    pub fn holds(&self) -> bool {
        self.exact >= self.floor
    }
}

/// Σ_{j<m} ln(2^n − j)
pub fn log_falling_factorial(n: u32, m: u64) -> f64 {
    let top = 2f64.powi(n as i32);
    (0..m).map(|j| (top - j as f64).ln()).sum()
}

pub fn lemma2_stirling(n: u32, delta: f64) -> Result<Lemma2> {
    let m = m_lower(n, delta)?;
    if n < 64 && m > 1u64 << n {
        return Err(invalid("M exceeds 2^N"));
    }
    let nf = n as f64;
    let floor = (2.0 * delta / (1.0 + delta)).sqrt() * 2f64.powf(nf / 2.0) * (nf * LN_2 - 1.0) - 1.0;
    Ok(Lemma2 { m, exact: log_falling_factorial(n, m), floor })
}

/// ½·ln(2^N!/(2^N − M)!)
pub fn prop4_floor(n: u32, m: u64) -> Result<f64> {
    if n < 64 && m > 1u64 << n {
        return Err(invalid("M exceeds 2^N"));
    }
    Ok(0.5 * log_falling_factorial(n, m))
}

pub const MAX_BRUTEFORCE_BITS: u32 = 3;

/// Entropy of the outputs ȳ = (f(x_1),…,f(x_M)) over all permutations f with
/// uniform weight, for the distinct queries `xs`.
pub fn prop4_bruteforce(n: u32, xs: &[u32]) -> Result<f64> {
    if n == 0 || n > MAX_BRUTEFORCE_BITS {
        return Err(Error::TooLarge(format!("brute force needs 1 <= n <= {MAX_BRUTEFORCE_BITS}")));
    }
    let size = 1u32 << n;
    let mut seen = 0u32;
    for &x in xs {
        if x >= size || seen >> x & 1 == 1 {
            return Err(invalid("queries must be distinct inputs in range"));
        }
        seen |= 1 << x;
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut total = 0u64;
    let mut items: Vec<u32> = (0..size).collect();
    permutations(&mut items, size as usize, &mut |f| {
        let key = xs.iter().enumerate().fold(0u64, |k, (i, &x)| k | (f[x as usize] as u64) << (n as usize * i));
        *counts.entry(key).or_insert(0) += 1;
        total += 1;
    });
    let probs: Vec<f64> = counts.values().map(|&c| c as f64 / total as f64).collect();
    Ok(shannon(&probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use crate::simon::sample_instance_with_bit;

    #[test]
    fn trivial_run_is_pure_erasure() {
        let mut rng = trial_rng(1, 0);
        let inst = sample_instance_with_bit(2, 0, &mut rng).unwrap();
        let cost = CostModel::default();
        let (l, out) = run_framework(&inst, Algorithm::Trivial, &cost, &mut rng).unwrap();
        assert_eq!(l.w, 1);
        let w_erase = l.delta_e_erase + l.q_e + l.ctrl_erase;
        assert!((l.total_w() - w_erase).abs() < 1e-12);
        assert!(l.erasure_delta_s.abs() < 0.06);
        assert_eq!(theorem4_lower(&out, 1.0), 0.0);
    }

    #[test]
    fn quantum_run_conserves_energy() {
        let mut rng = trial_rng(2, 0);
        for eps in [1e-2, 5e-3] {
            let cost = CostModel { epsilon: eps, ..CostModel::default() };
            let inst = sample_instance_with_bit(3, 1, &mut rng).unwrap();
            let (l, _) = run_framework(&inst, Algorithm::QuantumSimon { rounds: 13 }, &cost, &mut rng).unwrap();
            assert_eq!(l.w, 2 * 3 * l.m + 1);
            let bound = 10.0 * eps * l.w as f64 * cost.e_qubit;
            assert!(l.conservation_residual().abs() <= bound);
            assert!((l.conservation_residual() - eps * l.w as f64).abs() < 1e-9);
            assert!(l.identity_error() < 1e-9);
        }
    }

    #[test]
    fn classical_run_energies() {
        let ident = SimonInstance::new(2, 0, 0, alloc::vec![0, 1, 2, 3]).unwrap();
        let mut rng = trial_rng(3, 0);
        let cost = CostModel::default();
        let (l, out) = run_framework(&ident, Algorithm::ClassicalSimon { m: 4 }, &cost, &mut rng).unwrap();
        assert_eq!(out.a, 0);
        // every input 0..3 is queried once: Σ|x| = Σ|f(x)| = 4
        assert!((l.delta_e_gates.iter().sum::<f64>() - 4.0).abs() < 1e-12);
        assert!((l.delta_e_in.iter().sum::<f64>() - 4.0).abs() < 1e-12);
        assert_eq!(l.w, 17);
    }

    #[test]
    fn sequential_rounds_match_joint_register() {
        let mut rng = trial_rng(4, 0);
        let inst = sample_instance_with_bit(2, 1, &mut rng).unwrap();
        let trace = fourier_twice_trace(&inst).unwrap();
        let mut sv = StateVector::zero(8).unwrap();
        sv.hadamard_range(0, 2);
        sv.hadamard_range(4, 2);
        sv.apply_oracle(0, 2, 2, &inst.f_table).unwrap();
        sv.apply_oracle(4, 6, 2, &inst.f_table).unwrap();
        sv.hadamard_range(0, 2);
        sv.hadamard_range(4, 2);
        for set in 0..2 {
            for q in 0..4 {
                let joint = sv.qubit_marginal(4 * set + q).unwrap();
                assert!(joint.matrix().max_abs_diff(trace.marginals[q].matrix()) < 1e-14);
            }
        }
        let seq_energy = 2.0 * population_sum(&trace.after_second_h);
        assert!((sv.energy(1.0) - seq_energy).abs() < 1e-13);
    }

    #[test]
    fn ensemble_satisfies_theorem4() {
        let cost = CostModel { epsilon: 1e-3, ..CostModel::default() };
        let run = run_classical_ensemble(2, 2, &cost).unwrap();
        assert!((run.outcome.p_a[0] + run.outcome.p_a[1] - 1.0).abs() < 1e-12);
        assert!(run.outcome.s_c_given_a > 0.0);
        assert!(run.ledger.total_w() >= theorem4_lower(&run.outcome, cost.beta));
        assert!(run.ledger.identity_error() < 1e-9);
    }

    #[test]
    fn maximally_mixed_conditional_entropy() {
        let w = 5;
        let out = RunOutcome { a: 0, p_a: [1.0, 0.0], conditional_entropies: [w as f64 * LN_2, 0.0], s_c_given_a: w as f64 * LN_2 };
        assert!((theorem4_lower(&out, 2.0) - w as f64 * LN_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn theorem2_linear_in_width() {
        let cost = CostModel::default();
        let k = BoundConstants::default();
        let s = CircuitShape::simon(4, &cost).unwrap();
        let mut s2 = s.clone();
        s2.w *= 2;
        let first = |sh: &CircuitShape| theorem2_upper(sh, &cost, &k) - theorem2_erasure_term(sh, &cost, &k);
        assert!((first(&s2) / first(&s) - 2.0).abs() < 1e-12);
        assert!(theorem3_upper(&s, &cost, &k) >= theorem2_upper(&s, &cost, &k));
    }

    #[test]
    fn theorem2_eta_halving() {
        let cost = CostModel { epsilon: 0.01, eta: 0.2, ..CostModel::default() };
        let half = CostModel { eta: 0.1, ..cost };
        let k = BoundConstants::default();
        let s = CircuitShape::simon(4, &cost).unwrap();
        let r = theorem2_erasure_term(&s, &half, &k) / theorem2_erasure_term(&s, &cost, &k);
        let l = (1.0 / (cost.epsilon * cost.eta)).ln();
        assert!(r >= 2.0 && r <= 2.0 * (1.0 + LN_2 / l).powi(2) * 2.0, "{r}");
    }

    #[test]
    fn corollary2_forms_agree() {
        for n in [10, 50, 100, 300] {
            let a = corollary2_lower(n, 1.0, None).unwrap();
            let b = corollary2_closed_form(n, 1.0);
            assert!(((a - b) / b).abs() < 1e-12);
        }
        assert!(corollary2_lower(10, 1.0, Some(0.2)).is_err());
    }

    #[test]
    fn optimal_delta_by_grid() {
        let best = (1..166_666)
            .map(|i| i as f64 * 1e-6)
            .max_by(|a, b| corollary2_prefactor(*a).total_cmp(&corollary2_prefactor(*b)))
            .unwrap();
        assert!((best - delta_star()).abs() < 1e-4);
    }

    #[test]
    fn table_codata_matches_published() {
        let rows = table1(&[300.0], &TABLE1_PUBLISHED.map(|r| r.0), KbMode::Codata).unwrap();
        for (row, (_, published)) in rows.iter().zip(TABLE1_PUBLISHED) {
            assert!(agrees_to_one_sig_fig(row.bound_joules, published), "{row:?}");
        }
        let hot = table1(&[600.0], &[100], KbMode::Codata).unwrap();
        assert!((hot[0].bound_joules / rows[1].bound_joules - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sig_fig_rounding() {
        assert_eq!(round_sig1(1.38e-13), 1e-13);
        assert_eq!(round_sig1(658.0), 700.0);
        assert_eq!(round_sig1(9.6), 10.0);
        assert!(agrees_to_one_sig_fig(1.3e-5, 1e-5));
        assert!(!agrees_to_one_sig_fig(9.42e-6, 1e-5));
    }

    #[test]
    fn lemma2_examples() {
        let l = lemma2_stirling(4, 1.0 / 6.0).unwrap();
        assert_eq!(l.m, 3);
        assert!((l.exact - 3360f64.ln()).abs() < 1e-12);
        assert!((l.floor - 2.789_951).abs() < 1e-5, "{}", l.floor);
        assert!(l.holds());
        assert_eq!(log_falling_factorial(5, 0), 0.0);
    }

    #[test]
    fn prop4_examples() {
        let e = prop4_bruteforce(2, &[0, 1]).unwrap();
        assert!((e - 12f64.ln()).abs() < 1e-12);
        assert!((prop4_floor(2, 2).unwrap() - 0.5 * 12f64.ln()).abs() < 1e-12);
        assert!((prop4_bruteforce(2, &[3]).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!(prop4_bruteforce(4, &[0]).is_err());
        assert!(prop4_bruteforce(2, &[1, 1]).is_err());
    }

    #[test]
    fn matched_constants_dominate_a_run() {
        let mut rng = trial_rng(5, 0);
        let cost = CostModel::default();
        let k = BoundConstants::matched(&cost);
        let inst = sample_instance_with_bit(3, 0, &mut rng).unwrap();
        let (l, _) = run_framework(&inst, Algorithm::QuantumSimon { rounds: 13 }, &cost, &mut rng).unwrap();
        assert!(l.total_w() <= theorem2_upper(&l.shape(), &cost, &k));
    }
}
