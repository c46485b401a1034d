//! Energy-preserving implementation of a qubit gate with a ladder control.
//!
//! The target qubit has H_S = ω|1⟩⟨1| and the control is a truncated ladder
//! H_C = ω Σ n|n⟩⟨n|. The dilation V[U] acts inside each block
//! span{|0, n⟩, |1, n−1⟩} of fixed total energy ωn as the matrix U, so it
//! commutes with H_S + H_C. The control starts in a flat window
//! |φ⟩ = L^{-1/2} Σ_{n<L} |n + ℓ₀⟩.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};
use crate::quantum::{haar_state, haar_unitary, DensityOperator};
use crate::rng::trial_rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderControl {
    pub big_l: usize,
    pub ell0: usize,
    pub omega: f64,
    /// Number of ladder levels kept.
    pub trunc: usize,
}

impl LadderControl {
    /// Truncation at ℓ₀ + L + 2.
    pub fn new(big_l: usize, ell0: usize, omega: f64) -> Result<Self> {
        Self::with_truncation(big_l, ell0, omega, ell0 + big_l + 2)
    }

    pub fn with_truncation(big_l: usize, ell0: usize, omega: f64, trunc: usize) -> Result<Self> {
        if big_l < 2 || ell0 < 1 || !(omega > 0.0) {
            return Err(invalid("ladder needs L >= 2, ell0 >= 1, omega > 0"));
        }
        if trunc < ell0 + big_l + 1 {
            return Err(invalid("truncation must exceed ell0 + L"));
        }
        Ok(LadderControl { big_l, ell0, omega, trunc })
    }

    pub fn dim(&self) -> usize {
        2 * self.trunc
    }

    /// Joint index of |i⟩_S ⊗ |n⟩_C.
    pub fn index(&self, i: usize, n: usize) -> usize {
        i * self.trunc + n
    }

    pub fn control_state(&self) -> Vec<C64> {
        let mut phi = vec![ZERO; self.trunc];
        let amp = 1.0 / (self.big_l as f64).sqrt();
        for n in 0..self.big_l {
            phi[n + self.ell0] = C64::new(amp, 0.0);
        }
        phi
    }

    /// Diagonal of H_S + H_C.
    pub fn total_energies(&self) -> Vec<f64> {
        (0..2)
            .flat_map(|i| (0..self.trunc).map(move |n| self.omega * (i + n) as f64))
            .collect()
    }

    /// Basis states whose block lies fully inside the truncation; only
    /// |1, trunc−1⟩ is excluded.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&k| k != self.index(1, self.trunc - 1)).collect()
    }

    /// ⟨φ|H_C|φ⟩ from the state vector.
    pub fn control_energy(&self) -> f64 {
        self.control_state().iter().enumerate().map(|(n, a)| self.omega * n as f64 * a.norm_sqr()).sum()
    }

    /// ω(ℓ₀ + (L−1)/2)
    pub fn control_energy_closed_form(&self) -> f64 {
        self.omega * (self.ell0 as f64 + (self.big_l as f64 - 1.0) / 2.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    I,
    X,
    H,
    T,
    /// Haar-random unitary drawn from the given seed.
    Random(u64),
}

impl Gate {
    pub fn matrix(self) -> ComplexMatrix {
        let r = |x: f64| C64::new(x, 0.0);
        let data = match self {
            Gate::I => vec![ONE, ZERO, ZERO, ONE],
            Gate::X => vec![ZERO, ONE, ONE, ZERO],
            Gate::H => vec![r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
            Gate::T => vec![ONE, ZERO, ZERO, C64::from_polar(1.0, core::f64::consts::FRAC_PI_4)],
            Gate::Random(seed) => return haar_unitary(2, &mut trial_rng(seed, 0)),
        };
        ComplexMatrix::from_vec(2, 2, data).expect("2x2")
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::I => "I",
            Gate::X => "X",
            Gate::H => "H",
            Gate::T => "T",
            Gate::Random(_) => "random",
        }
    }
}

fn check_qubit_unitary(u: &ComplexMatrix) -> Result<()> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: u.rows() });
    }
    let err = u.unitarity_error();
    if err > 1e-9 {
        return Err(Error::NotUnitary(err));
    }
    Ok(())
}

/// V[U] = |0,0⟩⟨0,0| + Σ_{n≥1} Σ_{ij} U_ij |i, n−i⟩⟨j, n−j| on the
/// truncated space.
pub fn build_dilation(u: &ComplexMatrix, ctrl: &LadderControl) -> Result<ComplexMatrix> {
    check_qubit_unitary(u)?;
    let t = ctrl.trunc;
    let mut v = ComplexMatrix::zeros(ctrl.dim(), ctrl.dim());
    v[(ctrl.index(0, 0), ctrl.index(0, 0))] = ONE;
    for n in 1..=t {
        for i in 0..2 {
            for j in 0..2 {
                if n - i < t && n - j < t {
                    v[(ctrl.index(i, n - i), ctrl.index(j, n - j))] = u[(i, j)];
                }
            }
        }
    }
    Ok(v)
}

/// max |(V†V − I)_ab| over interior a, b.
pub fn interior_unitarity_error(v: &ComplexMatrix, ctrl: &LadderControl) -> f64 {
    let vv = v.dagger().matmul(v).expect("square");
    let inner = ctrl.interior();
    let mut err: f64 = 0.0;
    for &a in &inner {
        for &b in &inner {
            let target = if a == b { ONE } else { ZERO };
            err = err.max((vv[(a, b)] - target).norm());
        }
    }
    err
}

/// Frobenius norm of [H, V] restricted to interior rows and columns, an
/// upper bound on the operator norm.
pub fn commutator_norm(v: &ComplexMatrix, ctrl: &LadderControl) -> f64 {
    let e = ctrl.total_energies();
    let inner = ctrl.interior();
    let mut s = 0.0;
    for &a in &inner {
        for &b in &inner {
            s += ((e[a] - e[b]) * v[(a, b)].norm()).powi(2);
        }
    }
    s.sqrt()
}

fn joint_output(v: &ComplexMatrix, ctrl: &LadderControl, psi: &[C64]) -> Result<Vec<C64>> {
    if psi.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: psi.len() });
    }
    let phi = ctrl.control_state();
    let input: Vec<C64> = (0..2).flat_map(|i| phi.iter().map(move |&a| psi[i] * a)).collect();
    v.mul_vec(&input)
}

fn system_state(out: &[C64], ctrl: &LadderControl) -> Result<DensityOperator> {
    let t = ctrl.trunc;
    let mut s = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for k in 0..2 {
            for n in 0..t {
                s[(i, k)] += out[i * t + n] * out[k * t + n].conj();
            }
        }
    }
    DensityOperator::new(s)
}

fn control_state_out(out: &[C64], ctrl: &LadderControl) -> Result<DensityOperator> {
    let t = ctrl.trunc;
    let mut c = ComplexMatrix::zeros(t, t);
    for n in 0..t {
        for m in 0..t {
            for i in 0..2 {
                c[(n, m)] += out[i * t + n] * out[i * t + m].conj();
            }
        }
    }
    DensityOperator::new(c)
}

/// Reduced system and control states after V[U] acts on |ψ⟩⊗|φ⟩.
pub fn control_channel(
    u: &ComplexMatrix,
    ctrl: &LadderControl,
    psi: &[C64],
) -> Result<(DensityOperator, DensityOperator)> {
    let v = build_dilation(u, ctrl)?;
    let out = joint_output(&v, ctrl, psi)?;
    Ok((system_state(&out, ctrl)?, control_state_out(&out, ctrl)?))
}

/// Exact Haar-averaged fidelity of the implemented channel to U,
/// (2F_ent + 1)/3 with F_ent = Σ_m |tr(U†K_m)|²/4 and
/// K_m[i][j] = ⟨i, m|V|j, φ⟩.
pub fn average_fidelity(u: &ComplexMatrix, ctrl: &LadderControl) -> Result<f64> {
    let v = build_dilation(u, ctrl)?;
    let phi = ctrl.control_state();
    let t = ctrl.trunc;
    let mut f_ent = 0.0;
    for m in 0..t {
        let mut k = [[ZERO; 2]; 2];
        for (i, row) in k.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..t).map(|n| v[(ctrl.index(i, m), ctrl.index(j, n))] * phi[n]).sum();
            }
        }
        let mut tr = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                tr += u[(j, i)].conj() * k[j][i];
            }
        }
        f_ent += tr.norm_sqr() / 4.0;
    }
    Ok((2.0 * f_ent + 1.0) / 3.0)
}

/// Monte Carlo estimate of the average fidelity over Haar inputs, with its
/// standard error. Sample k uses stream k of `seed`.
pub fn average_fidelity_monte_carlo(
    u: &ComplexMatrix,
    ctrl: &LadderControl,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    let v = build_dilation(u, ctrl)?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..samples {
        let psi = haar_state(2, &mut trial_rng(seed, k as u64));
        let rho_s = system_state(&joint_output(&v, ctrl, &psi)?, ctrl)?;
        let target = u.mul_vec(&psi)?;
        let m = rho_s.matrix();
        let mut f = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                f += target[i].conj() * m[(i, j)] * target[j];
            }
        }
        sum += f.re;
        sum_sq += f.re * f.re;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelReport {
    pub avg_fidelity: f64,
    /// Mean entropy gained by the control over Haar inputs, nats.
    pub delta_s_c: f64,
    pub control_energy: f64,
    pub commutator_norm: f64,
}

/// ⟨ΔS_C⟩ over `haar_samples` inputs (sample k on stream k of `seed`).
/// The control starts pure, so ΔS_C = S(ρ′_C) = S(ρ′_S).
pub fn control_diagnostics(
    u: &ComplexMatrix,
    ctrl: &LadderControl,
    haar_samples: usize,
    seed: u64,
) -> Result<ChannelReport> {
    if haar_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let v = build_dilation(u, ctrl)?;
    let mut total = 0.0;
    for k in 0..haar_samples {
        let psi = haar_state(2, &mut trial_rng(seed, k as u64));
        let rho_s = system_state(&joint_output(&v, ctrl, &psi)?, ctrl)?;
        total += rho_s.entropy();
    }
    let control_energy = ctrl.control_energy();
    let closed = ctrl.control_energy_closed_form();
    if (control_energy - closed).abs() > 1e-9 * closed.max(1.0) {
        return Err(invalid("control energy disagrees with its closed form"));
    }
    Ok(ChannelReport {
        avg_fidelity: average_fidelity(u, ctrl)?,
        delta_s_c: total / haar_samples as f64,
        control_energy,
        commutator_norm: commutator_norm(&v, ctrl),
    })
}
