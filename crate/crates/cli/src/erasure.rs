use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use qenergy_core::landauer::{
    build_plan, execute, explicit_swap_heat, generic_bound, prop2_energy_bound, required_steps, ErasureConfig,
};
use qenergy_core::quantum::random_density;
use qenergy_core::rng::trial_rng;
use qenergy_core::{ComplexMatrix, DensityOperator, C64};
use serde::{Deserialize, Serialize};

use crate::report::{Envelope, Output, VERSION};
use crate::Status;

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Hilbert-Schmidt random density operator (needs --seed).
    Random,
    /// |d−1⟩, the state farthest from the ground state.
    Pure,
    /// I/d
    Mixed,
    /// JSON {"re": [[..]], "im": [[..]]} from --state-file.
    File,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErasureArgs {
    /// System dimension [default: 2]
    #[arg(long)]
    pub d: Option<usize>,
    /// Allowed final infidelity [default: 0.01]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Allowed excess over the entropy change [default: 0.1]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Inverse temperature [default: 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Input state [default: random]
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// "auto" or a fixed number of swaps [default: auto]
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recompute the heat from an explicit swap simulation (qubits, T ≤ 6).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub explicit_swaps: Option<bool>,
}

impl ErasureArgs {
    fn resolved(&self) -> Self {
        ErasureArgs {
            d: Some(self.d.unwrap_or(2)),
            epsilon: Some(self.epsilon.unwrap_or(0.01)),
            eta: Some(self.eta.unwrap_or(0.1)),
            beta: Some(self.beta.unwrap_or(1.0)),
            state: Some(self.state.unwrap_or(StateKind::Random)),
            state_file: self.state_file.clone(),
            steps: Some(self.steps.clone().unwrap_or_else(|| "auto".into())),
            seed: self.seed,
            explicit_swaps: Some(self.explicit_swaps.unwrap_or(false)),
        }
    }
}

#[derive(Deserialize)]
struct StateFile {
    re: Vec<Vec<f64>>,
    im: Option<Vec<Vec<f64>>>,
}

fn load_state(path: &PathBuf, d: usize) -> Result<DensityOperator> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let f: StateFile = serde_json::from_str(&text).context("state file must be {\"re\": [[..]], \"im\": [[..]]}")?;
    let mut data = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let re = *f.re.get(i).and_then(|r| r.get(j)).context("state matrix has the wrong shape")?;
            let im = match &f.im {
                Some(m) => *m.get(i).and_then(|r| r.get(j)).context("imaginary part has the wrong shape")?,
                None => 0.0,
            };
            data.push(C64::new(re, im));
        }
    }
    if f.re.len() != d || f.re.iter().any(|r| r.len() != d) {
        bail!("state matrix must be {d}x{d}");
    }
    Ok(DensityOperator::new(ComplexMatrix::from_vec(d, d, data)?)?)
}

#[derive(Serialize)]
struct StepRow {
    t: usize,
    beta_heat_summand: f64,
}

#[derive(Serialize)]
struct ErasureResult {
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "Q_E")]
    q_e: f64,
    #[serde(rename = "delta_S")]
    delta_s: f64,
    excess: f64,
    eta: f64,
    epsilon: f64,
    final_infidelity: f64,
    max_env_energy: f64,
    prop2_bound: f64,
    generic_bound: f64,
    explicit_swap_heat: Option<f64>,
    passed: bool,
}

pub fn run(args: &ErasureArgs, out: &Output) -> Result<Status> {
    let cfg_echo = args.resolved();
    let d = cfg_echo.d.unwrap();
    let cfg = ErasureConfig::new(cfg_echo.beta.unwrap(), cfg_echo.epsilon.unwrap(), cfg_echo.eta.unwrap(), d)?;
    let rho = match cfg_echo.state.unwrap() {
        StateKind::Random => {
            let seed = cfg_echo.seed.context("--seed is required for a random state")?;
            random_density(d, &mut trial_rng(seed, 0))
        }
        StateKind::Pure => DensityOperator::basis(d, d - 1)?,
        StateKind::Mixed => DensityOperator::maximally_mixed(d)?,
        StateKind::File => load_state(cfg_echo.state_file.as_ref().context("--state file needs --state-file")?, d)?,
    };
    let steps_arg = cfg_echo.steps.as_deref().unwrap();
    let auto = steps_arg == "auto";
    let steps = if auto {
        required_steps(&cfg)?
    } else {
        let k: usize = steps_arg.parse().with_context(|| format!("--steps must be auto or a count, got {steps_arg}"))?;
        if k == 0 {
            bail!("--steps must be positive");
        }
        k
    };
    let plan = build_plan(&rho, &cfg, steps)?;
    let rep = execute(&plan, &cfg)?;
    let swap = if cfg_echo.explicit_swaps.unwrap() { Some(explicit_swap_heat(&plan, &cfg)?.heat) } else { None };

    let prop2 = prop2_energy_bound(&cfg, steps);
    let generic = generic_bound(&cfg, steps);
    let mut problems = Vec::new();
    if rep.excess < -TOL {
        problems.push(format!("negative excess {}", rep.excess));
    }
    if auto {
        if rep.excess > cfg.eta + TOL {
            problems.push(format!("excess {} exceeds eta {}", rep.excess, cfg.eta));
        }
        if rep.final_infidelity > cfg.epsilon + TOL {
            problems.push(format!("final infidelity {} exceeds epsilon {}", rep.final_infidelity, cfg.epsilon));
        }
        if rep.max_env_energy > prop2 + TOL {
            problems.push(format!("environment energy {} exceeds {}", rep.max_env_energy, prop2));
        }
    } else if rep.excess > generic + TOL {
        problems.push(format!("excess {} exceeds the fixed-step bound {}", rep.excess, generic));
    }
    if let Some(h) = swap {
        if (h - rep.heat).abs() > 1e-8 * rep.heat.abs().max(1.0) {
            problems.push(format!("explicit swap heat {h} differs from {}", rep.heat));
        }
    }

    let rows: Vec<StepRow> =
        rep.summands.iter().enumerate().map(|(i, &s)| StepRow { t: i + 1, beta_heat_summand: s }).collect();
    out.table("erasure_steps", &rows)?;
    let result = ErasureResult {
        t: steps,
        q_e: rep.heat,
        delta_s: rep.delta_s,
        excess: rep.excess,
        eta: cfg.eta,
        epsilon: cfg.epsilon,
        final_infidelity: rep.final_infidelity,
        max_env_energy: rep.max_env_energy,
        prop2_bound: prop2,
        generic_bound: generic,
        explicit_swap_heat: swap,
        passed: problems.is_empty(),
    };
    let env = Envelope { command: "erasure", version: VERSION, config: &cfg_echo, result };
    out.json("erasure", &env)?;
    println!("{}", serde_json::to_string(&env)?);
    Ok(if problems.is_empty() { Status::Ok } else { Status::Violation(problems.join("; ")) })
}
