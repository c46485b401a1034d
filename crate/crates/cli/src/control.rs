use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use qenergy_core::control::{control_diagnostics, Gate, LadderControl};
use qenergy_core::fit::loglog_slope;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{Envelope, Output, VERSION};
use crate::Status;

pub const SLOPE_RANGE: (f64, f64) = (-1.3, -0.7);
pub const COMMUTATOR_TOL: f64 = 1e-9;
/// The state-vector sum of ω·n/L may differ from the closed form by rounding.
pub const ENERGY_ULPS: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum GateArg {
    #[value(name = "I")]
    I,
    #[value(name = "X")]
    X,
    #[value(name = "H")]
    H,
    #[value(name = "T")]
    T,
    #[value(name = "random")]
    #[serde(rename = "random")]
    Random,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlArgs {
    /// [default: X]
    #[arg(long, value_enum)]
    pub gate: Option<GateArg>,
    /// Ladder window lengths [default: 8,16,32,64]
    #[arg(long, value_delimiter = ',')]
    pub l: Option<Vec<usize>>,
    /// [default: 1]
    #[arg(long)]
    pub ell0: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Haar input samples for the control entropy [default: 200]
    #[arg(long)]
    pub haar: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct Row {
    gate: &'static str,
    #[serde(rename = "L")]
    l: usize,
    ell0: usize,
    omega: f64,
    avg_fidelity: f64,
    one_minus_f: f64,
    delta_s_c: f64,
    control_energy: f64,
    commutator_norm: f64,
}

#[derive(Serialize)]
struct Summary {
    /// Log-log slope of 1 − f against L; absent when 1 − f vanishes.
    one_minus_f_slope: Option<f64>,
    slope_in_range: Option<bool>,
    /// max/min of L·⟨ΔS_C⟩ over the sweep; absent when ⟨ΔS_C⟩ vanishes.
    l_delta_s_c_ratio: Option<f64>,
    energy_matches_closed_form: bool,
    max_commutator_norm: f64,
}

pub fn run(args: &ControlArgs, out: &Output) -> Result<Status> {
    let Some(seed) = args.seed else { bail!("--seed is required for control") };
    let cfg = ControlArgs {
        gate: Some(args.gate.unwrap_or(GateArg::X)),
        l: Some(args.l.clone().unwrap_or_else(|| vec![8, 16, 32, 64])),
        ell0: Some(args.ell0.unwrap_or(1)),
        omega: Some(args.omega.unwrap_or(1.0)),
        haar: Some(args.haar.unwrap_or(200)),
        seed: Some(seed),
    };
    let gate = match cfg.gate.unwrap() {
        GateArg::I => Gate::I,
        GateArg::X => Gate::X,
        GateArg::H => Gate::H,
        GateArg::T => Gate::T,
        GateArg::Random => Gate::Random(seed),
    };
    let u = gate.matrix();
    let (ell0, omega, haar) = (cfg.ell0.unwrap(), cfg.omega.unwrap(), cfg.haar.unwrap());
    let rows: Vec<Row> = cfg
        .l
        .as_ref()
        .unwrap()
        .par_iter()
        .map(|&l| {
            let ctrl = LadderControl::new(l, ell0, omega)?;
            let r = control_diagnostics(&u, &ctrl, haar, seed)?;
            Ok(Row {
                gate: gate.name(),
                l,
                ell0,
                omega,
                avg_fidelity: r.avg_fidelity,
                one_minus_f: 1.0 - r.avg_fidelity,
                delta_s_c: r.delta_s_c,
                control_energy: r.control_energy,
                commutator_norm: r.commutator_norm,
            })
        })
        .collect::<Result<_>>()?;
    out.table("control", &rows)?;

    let xs: Vec<f64> = rows.iter().map(|r| r.l as f64).collect();
    let slope = (rows.len() >= 2 && rows.iter().all(|r| r.one_minus_f > 1e-12))
        .then(|| loglog_slope(&xs, &rows.iter().map(|r| r.one_minus_f).collect::<Vec<_>>()));
    let scaled: Vec<f64> = rows.iter().map(|r| r.l as f64 * r.delta_s_c).collect();
    let ratio = scaled.iter().all(|&s| s > 1e-12).then(|| {
        scaled.iter().cloned().fold(f64::MIN, f64::max) / scaled.iter().cloned().fold(f64::MAX, f64::min)
    });
    let energy_ok = rows
        .iter()
        .all(|r| {
            let closed = r.omega * (r.ell0 as f64 + (r.l as f64 - 1.0) / 2.0);
            (r.control_energy - closed).abs() <= ENERGY_ULPS * f64::EPSILON * closed
        });
    let max_comm = rows.iter().map(|r| r.commutator_norm).fold(0.0, f64::max);
    let result = Summary {
        one_minus_f_slope: slope,
        slope_in_range: slope.map(|s| (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&s)),
        l_delta_s_c_ratio: ratio,
        energy_matches_closed_form: energy_ok,
        max_commutator_norm: max_comm,
    };
    let mut problems = Vec::new();
    if max_comm > COMMUTATOR_TOL {
        problems.push(format!("commutator norm {max_comm}"));
    }
    if !energy_ok {
        problems.push("control energy differs from its closed form".to_string());
    }
    let env = Envelope { command: "control", version: VERSION, config: &cfg, result };
    out.json("control_summary", &env)?;
    println!("{}", serde_json::to_string(&env)?);
    Ok(if problems.is_empty() { Status::Ok } else { Status::Violation(problems.join("; ")) })
}
