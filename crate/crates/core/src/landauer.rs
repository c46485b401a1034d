//! Finite-step Landauer erasure along a straight path of Gibbs states.
//!
//! Step t swaps the system with an environment subsystem prepared in ρ[u_t],
//! whose Hamiltonian is H_E^(t) = −(1/β) ln ρ[u_t], so that ρ[u_t] is its own
//! Gibbs state. Heat is the energy the environment gains.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::{matrix_logarithm, partial_trace, DensityOperator, HamiltonianSpec};

/// Explicit swap simulation keeps 2^(T+1) dimensions.
pub const MAX_EXPLICIT_STEPS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErasureConfig {
    pub beta: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub dim: usize,
}

impl ErasureConfig {
    pub fn new(beta: f64, epsilon: f64, eta: f64, dim: usize) -> Result<Self> {
        let cfg = ErasureConfig { beta, epsilon, eta, dim };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(invalid("beta must be positive and finite"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(invalid("epsilon must lie in (0, 1/2]"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta must lie in (0, 1]"));
        }
        if self.dim < 2 {
            return Err(invalid("dimension must be at least 2"));
        }
        Ok(())
    }

    fn dm1(&self) -> f64 {
        (self.dim - 1) as f64
    }
}

/// T = ⌈((e+1)/(eη)) · ln((e+1)(d−1)²/(εη))⌉
pub fn required_steps(cfg: &ErasureConfig) -> Result<usize> {
    cfg.validate()?;
    let a = (E + 1.0) / (E * cfg.eta);
    let t = a * ((E + 1.0) * cfg.dm1() * cfg.dm1() / (cfg.epsilon * cfg.eta)).ln();
    Ok(t.ceil() as usize)
}

/// (1−ε)|0⟩⟨0| + (ε/(d−1))(I − |0⟩⟨0|)
pub fn target_final_state(rho: &DensityOperator, cfg: &ErasureConfig) -> Result<DensityOperator> {
    cfg.validate()?;
    if rho.dim() != cfg.dim {
        return Err(Error::DimensionMismatch { expected: cfg.dim, found: rho.dim() });
    }
    let mut p = vec![cfg.epsilon / cfg.dm1(); cfg.dim];
    p[0] = 1.0 - cfg.epsilon;
    DensityOperator::from_diagonal(&p)
}

/// Excess bound for an arbitrary step count: ln(e(d−1)²T/ε)/T.
pub fn generic_bound(cfg: &ErasureConfig, steps: usize) -> f64 {
    let t = steps as f64;
    (E * cfg.dm1() * cfg.dm1() * t / cfg.epsilon).ln() / t
}

/// (T/β)(ln((d−1)/ε) + 1) − (1/β)(ln(2πT)/2 + 1/(12T+1))
pub fn prop2_energy_bound(cfg: &ErasureConfig, steps: usize) -> f64 {
    let t = steps as f64;
    (t / cfg.beta) * ((cfg.dm1() / cfg.epsilon).ln() + 1.0)
        - (1.0 / cfg.beta) * ((2.0 * PI * t).ln() / 2.0 + 1.0 / (12.0 * t + 1.0))
}

#[derive(Clone, Debug)]
pub struct ErasurePlan {
    pub steps: usize,
    /// ρ[u_t] for t = 0..=T.
    pub path_states: Vec<DensityOperator>,
    /// H_E^(t) for t = 1..=T (index t−1).
    pub env_hamiltonians: Vec<HamiltonianSpec>,
    /// ln ρ[u_t] for t = 1..=T (index t−1).
    pub logs: Vec<ComplexMatrix>,
    /// (t/T)·ε/(d−1), the eigenvalue floor of step t (index t−1).
    pub floors: Vec<f64>,
}

pub fn build_plan(rho: &DensityOperator, cfg: &ErasureConfig, steps: usize) -> Result<ErasurePlan> {
    if steps < 2 {
        return Err(invalid("at least two steps are required"));
    }
    let target = target_final_state(rho, cfg)?;
    let mut path_states = Vec::with_capacity(steps + 1);
    let mut env_hamiltonians = Vec::with_capacity(steps);
    let mut logs = Vec::with_capacity(steps);
    let mut floors = Vec::with_capacity(steps);
    path_states.push(rho.clone());
    for t in 1..=steps {
        let u = t as f64 / steps as f64;
        let state = if t == steps { target.clone() } else { rho.mix(&target, u)? };
        let floor = u * cfg.epsilon / cfg.dm1();
        let lmin = state.min_eigenvalue();
        if lmin < floor * (1.0 - 1e-9) - 1e-15 {
            return Err(Error::SingularPathState { step: t, min_eigenvalue: lmin, floor });
        }
        let log = matrix_logarithm(&state, floor)?;
        env_hamiltonians.push(HamiltonianSpec::new(log.scale_real(-1.0 / cfg.beta))?);
        logs.push(log);
        floors.push(floor);
        path_states.push(state);
    }
    Ok(ErasurePlan { steps, path_states, env_hamiltonians, logs, floors })
}

#[derive(Clone, Debug)]
pub struct ErasureReport {
    pub steps: usize,
    pub heat: f64,
    pub delta_s: f64,
    pub final_state: DensityOperator,
    pub final_infidelity: f64,
    /// Σ_t ‖H_E^(t)‖_∞
    pub max_env_energy: f64,
    /// βQ_E − ΔS
    pub excess: f64,
    /// tr[(ρ_t − ρ_{t−1}) ln ρ_t] for t = 1..=T.
    pub summands: Vec<f64>,
}

pub fn execute(plan: &ErasurePlan, cfg: &ErasureConfig) -> Result<ErasureReport> {
    cfg.validate()?;
    let mut summands = Vec::with_capacity(plan.steps);
    for t in 1..=plan.steps {
        let diff = plan.path_states[t].matrix().sub(plan.path_states[t - 1].matrix())?;
        summands.push(diff.trace_product(&plan.logs[t - 1])?.re);
    }
    let beta_q: f64 = summands.iter().sum();
    let first = &plan.path_states[0];
    let last = &plan.path_states[plan.steps];
    let delta_s = first.entropy() - last.entropy();
    let max_env_energy = plan.env_hamiltonians.iter().map(|h| h.operator_norm()).sum();
    Ok(ErasureReport {
        steps: plan.steps,
        heat: beta_q / cfg.beta,
        delta_s,
        final_state: last.clone(),
        final_infidelity: 1.0 - last.population(0),
        max_env_energy,
        excess: beta_q - delta_s,
        summands,
    })
}

/// Build and execute with T = required_steps(cfg).
pub fn erase(rho: &DensityOperator, cfg: &ErasureConfig) -> Result<ErasureReport> {
    let plan = build_plan(rho, cfg, required_steps(cfg)?)?;
    execute(&plan, cfg)
}

#[derive(Clone, Debug)]
pub struct SwapCheck {
    pub heat: f64,
    pub final_system: DensityOperator,
}

/// Simulate the T swaps on the full (T+1)-qubit state and measure the heat
/// as Σ_t tr[H_E^(t)(σ_t − ρ[u_t])]. Qubits only, T ≤ 6.
pub fn explicit_swap_heat(plan: &ErasurePlan, cfg: &ErasureConfig) -> Result<SwapCheck> {
    if cfg.dim != 2 {
        return Err(invalid("explicit swap mode is for qubits"));
    }
    let t_max = plan.steps;
    if t_max > MAX_EXPLICIT_STEPS {
        return Err(Error::TooLarge(alloc::format!("{t_max} steps in explicit swap mode")));
    }
    let mut total = plan.path_states[0].matrix().clone();
    for state in &plan.path_states[1..] {
        total = total.kron(state.matrix());
    }
    let n = t_max + 1;
    let dim = 1usize << n;
    let bit = |sub: usize| n - 1 - sub;
    for t in 1..=t_max {
        let (a, b) = (bit(0), bit(t));
        let perm: Vec<usize> = (0..dim)
            .map(|i| {
                let x = ((i >> a) ^ (i >> b)) & 1;
                i ^ ((x << a) | (x << b))
            })
            .collect();
        total = total.permute(&perm);
    }
    let total = DensityOperator::new(total)?;
    let dims = vec![2; n];
    let mut heat = 0.0;
    for t in 1..=t_max {
        let env = partial_trace(&total, &dims, &[t])?;
        heat += plan.env_hamiltonians[t - 1].energy_change(&plan.path_states[t], &env)?;
    }
    let final_system = partial_trace(&total, &dims, &[0])?;
    Ok(SwapCheck { heat, final_system })
}

/// Qubit-wise erasure of a register, one protocol per qubit.
#[derive(Clone, Debug)]
pub struct RegisterErasureReport {
    pub steps: usize,
    pub qubits: Vec<ErasureReport>,
    pub heat: f64,
    pub delta_s: f64,
    pub excess: f64,
    /// Worst qubit.
    pub final_infidelity: f64,
    pub max_env_energy: f64,
}

pub fn erase_register(rhos: &[DensityOperator], cfg: &ErasureConfig) -> Result<RegisterErasureReport> {
    if cfg.dim != 2 {
        return Err(invalid("register erasure acts on qubits"));
    }
    let steps = required_steps(cfg)?;
    let mut qubits = Vec::with_capacity(rhos.len());
    for rho in rhos {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
        }
        qubits.push(execute(&build_plan(rho, cfg, steps)?, cfg)?);
    }
    let heat = qubits.iter().map(|r| r.heat).sum();
    let delta_s = qubits.iter().map(|r| r.delta_s).sum();
    let excess = qubits.iter().map(|r| r.excess).sum();
    let final_infidelity = qubits.iter().map(|r| r.final_infidelity).fold(0.0, f64::max);
    let max_env_energy = qubits.iter().map(|r| r.max_env_energy).sum();
    Ok(RegisterErasureReport { steps, qubits, heat, delta_s, excess, final_infidelity, max_env_energy })
}
