//! Density operators, Hamiltonians and the usual information functionals (in nats).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, HermitianEigen, C64, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in [-EIGEN_CLAMP, 0) are rounding noise and become 0.
pub const EIGEN_CLAMP: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-9;
/// Eigenvalues at or below this count as outside the support.
const SUPPORT_TOL: f64 = 1e-12;

/// Positive, unit-trace Hermitian matrix with its spectrum cached.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    eigen: HermitianEigen,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let herr = matrix.hermiticity_error();
        if herr > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr));
        }
        let mut eigen = hermitian_eigen(&matrix)?;
        for l in eigen.values.iter_mut() {
            if *l < 0.0 {
                if *l < -EIGEN_CLAMP {
                    return Err(Error::NegativeEigenvalue(*l));
                }
                *l = 0.0;
            }
        }
        Ok(DensityOperator { matrix, eigen })
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(p))
    }

    /// |ψ⟩⟨ψ| for a normalized ψ.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, bound: dim });
        }
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        Self::from_diagonal(&p)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Clamped eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigen.vectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    pub fn entropy(&self) -> f64 {
        shannon(&self.eigen.values)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).map(|z| z.re).unwrap_or(f64::NAN)
    }

    /// Convex combination (1-u)·self + u·other.
    pub fn mix(&self, other: &Self, u: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        let m = self.matrix.scale_real(1.0 - u).add(&other.matrix.scale_real(u))?;
        Self::new(m)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::new(self.matrix.kron(&other.matrix))
    }
}

/// −Σ p ln p with 0·ln 0 = 0.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.entropy()
}

/// D(ρ‖σ) = tr[ρ(ln ρ − ln σ)]. Returns +∞ when supp ρ ⊄ supp σ.
pub fn quantum_relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let n = rho.dim();
    let neg_entropy = -rho.entropy();
    // tr[ρ ln σ] = Σ_j ln μ_j ⟨v_j|ρ|v_j⟩
    let v = sigma.eigenvectors();
    let mut cross = 0.0;
    for (j, &mu) in sigma.eigenvalues().iter().enumerate() {
        let col: Vec<C64> = (0..n).map(|k| v[(k, j)]).collect();
        let rv = rho.matrix().mul_vec(&col)?;
        let weight: f64 = col.iter().zip(&rv).map(|(a, b)| (a.conj() * b).re).sum();
        if mu <= SUPPORT_TOL {
            if weight > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * mu.ln();
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// Trace out every subsystem not listed in `keep`. Subsystem 0 is the most
/// significant factor of the tensor product; the result keeps the listed
/// subsystems in ascending order.
pub fn partial_trace(rho: &DensityOperator, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(invalid("subsystem dimensions must be positive"));
    }
    let total: usize = dims.iter().product();
    check_dims(total, rho.dim())?;
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::IndexOutOfRange { index: k, bound: dims.len() });
        }
        if kept[k] {
            return Err(invalid("duplicate subsystem in keep"));
        }
        kept[k] = true;
    }
    let kdims: Vec<usize> = (0..dims.len()).filter(|&i| kept[i]).map(|i| dims[i]).collect();
    let tdims: Vec<usize> = (0..dims.len()).filter(|&i| !kept[i]).map(|i| dims[i]).collect();
    let dk: usize = kdims.iter().product();
    let dt: usize = tdims.iter().product();

    // Full index from (kept multi-index, traced multi-index).
    let compose = |ki: usize, ti: usize| -> usize {
        let mut kd = split(ki, &kdims);
        let mut td = split(ti, &tdims);
        kd.reverse();
        td.reverse();
        let mut idx = 0;
        for i in 0..dims.len() {
            let digit = if kept[i] { kd.pop().unwrap() } else { td.pop().unwrap() };
            idx = idx * dims[i] + digit;
        }
        idx
    };
    let table: Vec<Vec<usize>> = (0..dk).map(|ki| (0..dt).map(|ti| compose(ki, ti)).collect()).collect();

    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += m[(table[i][t], table[j][t])];
            }
            out[(i, j)] = acc;
        }
    }
    DensityOperator::new(out)
}

fn split(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    digits
}

/// ⟨k|ρ|k⟩
pub fn fidelity_to_pure(rho: &DensityOperator, basis_index: usize) -> Result<f64> {
    if basis_index >= rho.dim() {
        return Err(Error::IndexOutOfRange { index: basis_index, bound: rho.dim() });
    }
    Ok(rho.population(basis_index))
}

/// Principal logarithm with eigenvalues clamped up to `floor` first.
pub fn matrix_logarithm(rho: &DensityOperator, floor: f64) -> Result<ComplexMatrix> {
    if !(floor > 0.0) {
        return Err(invalid("log floor must be positive"));
    }
    Ok(ComplexMatrix::from_spectrum(rho.eigenvalues(), rho.eigenvectors(), |l| l.max(floor).ln()))
}

pub fn apply_unitary(rho: &DensityOperator, u: &ComplexMatrix) -> Result<DensityOperator> {
    check_dims(rho.dim(), u.rows())?;
    let err = u.unitarity_error();
    if err > UNITARY_TOL {
        return Err(Error::NotUnitary(err));
    }
    let out = u.matmul(rho.matrix())?.matmul(&u.dagger())?;
    DensityOperator::new(out)
}

/// Hermitian, positive semidefinite energy operator.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    matrix: ComplexMatrix,
    max_energy: f64,
}

impl HamiltonianSpec {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herr = matrix.hermiticity_error();
        if herr > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herr));
        }
        let matrix = matrix.hermitian_part();
        let eigen = hermitian_eigen(&matrix)?;
        let scale = eigen.values.iter().fold(1.0_f64, |a, &l| a.max(l.abs()));
        if eigen.values[0] < -HERMITIAN_TOL * scale {
            return Err(Error::NegativeEigenvalue(eigen.values[0]));
        }
        let max_energy = *eigen.values.last().unwrap();
        Ok(HamiltonianSpec { matrix, max_energy })
    }

    /// diag(0, e): one qubit with excitation energy `e`.
    pub fn qubit(e: f64) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(&[0.0, e]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// ‖H‖_∞ (the largest eigenvalue, since H ⪰ 0).
    pub fn operator_norm(&self) -> f64 {
        self.max_energy
    }

    pub fn expectation(&self, rho: &DensityOperator) -> Result<f64> {
        check_dims(self.dim(), rho.dim())?;
        Ok(self.matrix.trace_product(rho.matrix())?.re)
    }

    /// tr[H(after − before)]
    pub fn energy_change(&self, before: &DensityOperator, after: &DensityOperator) -> Result<f64> {
        Ok(self.expectation(after)? - self.expectation(before)?)
    }
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random pure state vector.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for c in &cols {
            let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(c) {
                *x -= proj * a;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, &z) in c.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Hilbert–Schmidt random mixed state GG†/tr(GG†).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = gaussian_complex(rng);
        }
    }
    let gg = g.matmul(&g.dagger()).expect("square");
    let tr = gg.trace().re;
    DensityOperator::new(gg.scale_real(1.0 / tr)).expect("GG† is a valid state")
}

/// Diagonal state with weights uniform on the simplex.
pub fn random_diagonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let w: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / s).collect();
    DensityOperator::from_diagonal(&p).expect("normalized weights")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, ONE};
    use crate::rng::trial_rng;
    use core::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert!(close(DensityOperator::basis(2, 0).unwrap().entropy(), 0.0, 1e-15));
        assert!(close(DensityOperator::maximally_mixed(2).unwrap().entropy(), LN_2, 1e-14));
        let r = DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap();
        assert!(close(r.entropy(), 0.562_335_144_618_808_6, 1e-12));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_vec(2, 2, vec![C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)]).unwrap();
        assert!(matches!(DensityOperator::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn clamps_tiny_negative_but_rejects_real_negative() {
        let ok = DensityOperator::from_diagonal(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert_eq!(ok.min_eigenvalue(), 0.0);
        let bad = DensityOperator::from_diagonal(&[1.0 + 1e-6, -1e-6]);
        assert!(matches!(bad, Err(Error::NegativeEigenvalue(_))));
        assert!(matches!(DensityOperator::from_diagonal(&[0.5, 0.4]), Err(Error::TraceNotOne(_))));
    }

    #[test]
    fn relative_entropy_examples() {
        let z = DensityOperator::basis(2, 0).unwrap();
        let one = DensityOperator::basis(2, 1).unwrap();
        let mixed = DensityOperator::maximally_mixed(2).unwrap();
        assert!(close(quantum_relative_entropy(&z, &mixed).unwrap(), LN_2, 1e-14));
        assert_eq!(quantum_relative_entropy(&z, &one).unwrap(), f64::INFINITY);
        let mut rng = trial_rng(3, 0);
        let r = random_density(3, &mut rng);
        assert!(quantum_relative_entropy(&r, &r).unwrap() < 1e-12);
        let s = random_density(3, &mut rng);
        assert!(quantum_relative_entropy(&r, &s).unwrap() > 0.0);
        assert!(quantum_relative_entropy(&z, &DensityOperator::maximally_mixed(3).unwrap()).is_err());
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let mut rng = trial_rng(5, 0);
        let a = random_density(2, &mut rng);
        let b = random_density(3, &mut rng);
        let ab = a.kron(&b).unwrap();
        let ra = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let rb = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-13);
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-13);

        let h = core::f64::consts::FRAC_1_SQRT_2;
        let bell = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let rho = DensityOperator::pure(&bell).unwrap();
        let half = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(half.matrix().max_abs_diff(DensityOperator::maximally_mixed(2).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_basis_register() {
        // |x, f(x)⟩ with x = 2, f(x) = 1 on two 2-bit registers
        let rho = DensityOperator::basis(16, 2 * 4 + 1).unwrap();
        let y = partial_trace(&rho, &[4, 4], &[1]).unwrap();
        assert!(close(y.population(1), 1.0, 1e-15));
        let three = DensityOperator::basis(8, 0b101).unwrap();
        let mid = partial_trace(&three, &[2, 2, 2], &[0, 2]).unwrap();
        assert!(close(mid.population(0b11), 1.0, 1e-15));
        assert!(partial_trace(&three, &[2, 2], &[0]).is_err());
        assert!(partial_trace(&three, &[2, 2, 2], &[3]).is_err());
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = trial_rng(9, 0);
        for _ in 0..20 {
            let r = random_density(12, &mut rng);
            for keep in [&[0usize][..], &[1], &[2], &[0, 2], &[1, 2]] {
                let t = partial_trace(&r, &[2, 3, 2], keep).unwrap();
                assert!(close(t.matrix().trace().re, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn fidelity_examples() {
        let eps = 0.01;
        let r = DensityOperator::from_diagonal(&[1.0 - eps, eps]).unwrap();
        assert!(close(fidelity_to_pure(&r, 0).unwrap(), 0.99, 1e-15));
        assert!(close(fidelity_to_pure(&DensityOperator::maximally_mixed(2).unwrap(), 0).unwrap(), 0.5, 1e-15));
        assert!(fidelity_to_pure(&r, 2).is_err());
    }

    #[test]
    fn logarithm_examples() {
        let l = matrix_logarithm(&DensityOperator::maximally_mixed(2).unwrap(), 1e-12).unwrap();
        assert!(close(l[(0, 0)].re, 0.5f64.ln(), 1e-14) && close(l[(1, 1)].re, 0.5f64.ln(), 1e-14));
        assert!(l[(0, 1)].norm() < 1e-15);
        let d = matrix_logarithm(&DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap(), 1e-12).unwrap();
        assert!(close(d[(0, 0)].re, 0.75f64.ln(), 1e-14) && close(d[(1, 1)].re, 0.25f64.ln(), 1e-14));
        assert!(matrix_logarithm(&DensityOperator::maximally_mixed(2).unwrap(), 0.0).is_err());
    }

    #[test]
    fn log_exp_round_trip() {
        let mut rng = trial_rng(11, 0);
        for d in [2, 3, 5] {
            for _ in 0..10 {
                let r = random_density(d, &mut rng);
                let back = expm(&matrix_logarithm(&r, 1e-300).unwrap()).unwrap();
                assert!(back.max_abs_diff(r.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn unitary_examples() {
        let r = DensityOperator::basis(2, 0).unwrap();
        let x = ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let flipped = apply_unitary(&r, &x).unwrap();
        assert!(close(flipped.population(1), 1.0, 1e-15));
        let same = apply_unitary(&r, &ComplexMatrix::identity(2)).unwrap();
        assert!(same.matrix().max_abs_diff(r.matrix()) < 1e-15);
        let not_u = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        assert!(matches!(apply_unitary(&r, &not_u), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = trial_rng(13, 0);
        for d in [2, 4, 6] {
            for _ in 0..10 {
                let r = random_density(d, &mut rng);
                let u = haar_unitary(d, &mut rng);
                assert!(u.unitarity_error() < 1e-12);
                let ur = apply_unitary(&r, &u).unwrap();
                assert!(close(ur.entropy(), r.entropy(), 1e-9));
            }
        }
    }

    #[test]
    fn hamiltonian_checks() {
        let h = HamiltonianSpec::qubit(2.0).unwrap();
        assert_eq!(h.operator_norm(), 2.0);
        let e = h.energy_change(&DensityOperator::basis(2, 0).unwrap(), &DensityOperator::maximally_mixed(2).unwrap());
        assert!(close(e.unwrap(), 1.0, 1e-15));
        assert!(HamiltonianSpec::new(ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])).is_err());
    }
}
