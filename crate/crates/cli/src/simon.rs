use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use qenergy_core::ledger::{run_framework, theorem2_upper, Algorithm, BoundConstants, CostModel, EnergyLedger};
use qenergy_core::rng::trial_rng;
use qenergy_core::simon::{
    classical_solve, delta_star, lemma1_floor, m_lower, prop1_success_ceiling, prop3_failure_bound, prop3_queries,
    quantum_solve, sample_uniform_instance,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Envelope, Output, VERSION};
use crate::Status;

/// Largest n for which per-trial ledgers are computed.
pub const LEDGER_MAX_N: u32 = 6;
/// One-sided 99% normal quantile.
pub const Z99: f64 = 2.326_347_874;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimonMode {
    Quantum,
    Classical,
    Bounds,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimonArgs {
    #[arg(value_enum)]
    pub mode: Option<SimonMode>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fourier-twice rounds [default: n + 10]
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Classical query count or "auto" [default: auto]
    #[arg(long)]
    pub m: Option<String>,
    /// Success gap Δ for the query lower bound [default: 2 − √15/2]
    #[arg(long)]
    pub delta_cap: Option<f64>,
    /// Target failure probability δ [default: 1/3]
    #[arg(long)]
    pub delta_fail: Option<f64>,
    /// Compute energy ledgers (n ≤ 6) [default: true when n ≤ 6]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub ledger: Option<bool>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl SimonArgs {
    fn resolved(&self) -> Result<Self> {
        let Some(mode) = self.mode else { bail!("simon needs a mode: quantum, classical or bounds") };
        let Some(n) = self.n else { bail!("--n is required") };
        let cost = CostModel::default();
        let stochastic = mode != SimonMode::Bounds;
        if stochastic && self.seed.is_none() {
            bail!("--seed is required for simon {}", mode_name(mode));
        }
        Ok(SimonArgs {
            mode: Some(mode),
            n: Some(n),
            trials: stochastic.then(|| self.trials.unwrap_or(100)),
            seed: self.seed,
            rounds: (mode == SimonMode::Quantum).then(|| self.rounds.unwrap_or(n as usize + 10)),
            m: (mode == SimonMode::Classical).then(|| self.m.clone().unwrap_or_else(|| "auto".into())),
            delta_cap: Some(self.delta_cap.unwrap_or_else(delta_star)),
            delta_fail: Some(self.delta_fail.unwrap_or(1.0 / 3.0)),
            ledger: stochastic.then(|| self.ledger.unwrap_or(n <= LEDGER_MAX_N)),
            epsilon: stochastic.then(|| self.epsilon.unwrap_or(cost.epsilon)),
            eta: stochastic.then(|| self.eta.unwrap_or(cost.eta)),
            beta: stochastic.then(|| self.beta.unwrap_or(cost.beta)),
        })
    }
}

fn mode_name(m: SimonMode) -> &'static str {
    match m {
        SimonMode::Quantum => "quantum",
        SimonMode::Classical => "classical",
        SimonMode::Bounds => "bounds",
    }
}

/// Wilson score lower limit for k successes in n trials.
pub fn wilson_lower(k: usize, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * nf);
    let spread = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    (centre - spread) / (1.0 + z2 / nf)
}

#[derive(Serialize, Clone, Debug)]
pub struct TrialRow {
    pub trial: usize,
    pub n: u32,
    pub b: u8,
    pub algorithm: &'static str,
    pub m: usize,
    pub a: u8,
    pub correct: bool,
    pub seed: u64,
    pub total_w: Option<f64>,
}

#[derive(Serialize)]
struct LedgerTotals {
    mean_total_w: f64,
    mean_q_e: f64,
    mean_q_e_prime: f64,
    mean_conservation_residual: f64,
    max_identity_error: f64,
    /// Fraction of runs with 𝒲 ≤ theorem2_upper under matched constants.
    theorem2_dominated_fraction: f64,
}

#[derive(Serialize)]
struct RunSummary {
    trials: usize,
    success_rate: f64,
    success_lower_99: f64,
    failure_rate: f64,
    mean_queries: f64,
    ledger_totals: Option<LedgerTotals>,
}

#[derive(Serialize)]
struct BoundsSummary {
    m_lower: u64,
    prop3_queries: u64,
    prop3_failure_bound: f64,
    /// Success ceiling with m_lower − 1 queries.
    prop1_ceiling: f64,
    prop1_saturated: bool,
    lemma1_floor: Option<f64>,
}

struct Trial {
    row: TrialRow,
    ledger: Option<EnergyLedger>,
}

fn run_trial(args: &SimonArgs, mode: SimonMode, idx: usize, m_classical: usize, cost: &CostModel) -> Result<Trial> {
    let n = args.n.unwrap();
    let seed = args.seed.unwrap();
    let mut rng = trial_rng(seed, idx as u64);
    let inst = sample_uniform_instance(n, &mut rng)?;
    let with_ledger = args.ledger.unwrap();
    let (a, m, ledger) = match mode {
        SimonMode::Quantum => {
            let rounds = args.rounds.unwrap();
            if with_ledger {
                let (l, out) = run_framework(&inst, Algorithm::QuantumSimon { rounds }, cost, &mut rng)?;
                (out.a, l.m, Some(l))
            } else {
                let s = quantum_solve(&inst, rounds, &mut rng)?;
                (s.a, s.m_used, None)
            }
        }
        SimonMode::Classical => {
            if with_ledger {
                let (l, out) = run_framework(&inst, Algorithm::ClassicalSimon { m: m_classical }, cost, &mut rng)?;
                (out.a, l.m, Some(l))
            } else {
                (classical_solve(&inst, m_classical, &mut rng)?.a, m_classical, None)
            }
        }
        SimonMode::Bounds => unreachable!(),
    };
    Ok(Trial {
        row: TrialRow {
            trial: idx,
            n,
            b: inst.b,
            algorithm: mode_name(mode),
            m,
            a,
            correct: a == inst.b,
            seed,
            total_w: ledger.as_ref().map(|l| l.total_w()),
        },
        ledger,
    })
}

pub fn run(args: &SimonArgs, out: &Output) -> Result<Status> {
    let cfg = args.resolved()?;
    let mode = cfg.mode.unwrap();
    let n = cfg.n.unwrap();
    let delta_cap = cfg.delta_cap.unwrap();
    let delta_fail = cfg.delta_fail.unwrap();

    if mode == SimonMode::Bounds {
        let ml = m_lower(n, delta_cap)?;
        let ceiling = prop1_success_ceiling(n, ml.saturating_sub(1));
        let p3 = prop3_queries(n, delta_fail)?;
        let result = BoundsSummary {
            m_lower: ml,
            prop3_queries: p3,
            prop3_failure_bound: prop3_failure_bound(n, p3),
            prop1_ceiling: ceiling.value,
            prop1_saturated: ceiling.saturated,
            lemma1_floor: lemma1_floor(delta_cap).ok(),
        };
        let env = Envelope { command: "simon bounds", version: VERSION, config: &cfg, result };
        out.json("simon_bounds", &env)?;
        println!("{}", serde_json::to_string(&env)?);
        return Ok(Status::Ok);
    }

    if cfg.ledger.unwrap() && n > LEDGER_MAX_N {
        bail!("ledgers are limited to n <= {LEDGER_MAX_N}");
    }
    let trials = cfg.trials.unwrap();
    if trials == 0 {
        bail!("--trials must be positive");
    }
    let size = 1usize.checked_shl(n).filter(|_| n <= 24).ok_or_else(|| anyhow::anyhow!("n too large"))?;
    let auto_m = cfg.m.as_deref() == Some("auto");
    let m_classical = match cfg.m.as_deref() {
        None => 0,
        Some("auto") => (prop3_queries(n, delta_fail)? as usize).min(size),
        Some(s) => s.parse().map_err(|_| anyhow::anyhow!("--m must be auto or a count, got {s}"))?,
    };
    let cost = CostModel {
        epsilon: cfg.epsilon.unwrap(),
        eta: cfg.eta.unwrap(),
        beta: cfg.beta.unwrap(),
        ..CostModel::default()
    };
    cost.validate()?;

    let results: Vec<Trial> =
        (0..trials).into_par_iter().map(|i| run_trial(&cfg, mode, i, m_classical, &cost)).collect::<Result<_>>()?;
    let rows: Vec<TrialRow> = results.iter().map(|t| t.row.clone()).collect();
    let name = format!("simon_{}", mode_name(mode));
    out.table(&format!("{name}_trials"), &rows)?;

    let successes = rows.iter().filter(|r| r.correct).count();
    let tf = trials as f64;
    let success_rate = successes as f64 / tf;
    let ledgers: Vec<&EnergyLedger> = results.iter().filter_map(|t| t.ledger.as_ref()).collect();
    let ledger_totals = (!ledgers.is_empty()).then(|| {
        let k = BoundConstants::matched(&cost);
        let lf = ledgers.len() as f64;
        let mean = |f: &dyn Fn(&EnergyLedger) -> f64| ledgers.iter().map(|l| f(l)).sum::<f64>() / lf;
        LedgerTotals {
            mean_total_w: mean(&|l| l.total_w()),
            mean_q_e: mean(&|l| l.q_e),
            mean_q_e_prime: mean(&|l| l.q_e_prime()),
            mean_conservation_residual: mean(&|l| l.conservation_residual()),
            max_identity_error: ledgers.iter().map(|l| l.identity_error()).fold(0.0, f64::max),
            theorem2_dominated_fraction: mean(&|l| (l.total_w() <= theorem2_upper(&l.shape(), &cost, &k)) as u8 as f64),
        }
    });
    let result = RunSummary {
        trials,
        success_rate,
        success_lower_99: wilson_lower(successes, trials, Z99),
        failure_rate: 1.0 - success_rate,
        mean_queries: rows.iter().map(|r| r.m as f64).sum::<f64>() / tf,
        ledger_totals,
    };

    let mut problems = Vec::new();
    match mode {
        SimonMode::Quantum if result.success_lower_99 < 2.0 / 3.0 => {
            problems.push(format!("success lower limit {} below 2/3", result.success_lower_99))
        }
        SimonMode::Classical if auto_m => {
            let slack = 3.0 * (delta_fail * (1.0 - delta_fail) / tf).sqrt();
            if result.failure_rate > delta_fail + slack {
                problems.push(format!("failure rate {} above {}", result.failure_rate, delta_fail + slack));
            }
        }
        _ => {}
    }
    if let Some(t) = &result.ledger_totals {
        if t.theorem2_dominated_fraction < 1.0 {
            problems.push("a ledger exceeded the ideal upper bound".into());
        }
    }

    let env = Envelope { command: &format!("simon {}", mode_name(mode)), version: VERSION, config: &cfg, result };
    out.json(&format!("{name}_summary"), &env)?;
    println!("{}", serde_json::to_string(&env)?);
    Ok(if problems.is_empty() { Status::Ok } else { Status::Violation(problems.join("; ")) })
}
