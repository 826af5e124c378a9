//! Density matrices and pure states on tensor-factored spaces, with entropies.
//!
//! Entropies are computed in nats; [`LogBase`] converts for reporting.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, norm, CMatrix, HermitianOperator, SpectralDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x / std::f64::consts::LN_2,
            LogBase::Nats => x,
        }
    }

    pub fn to_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x * std::f64::consts::LN_2,
            LogBase::Nats => x,
        }
    }
}

pub fn nats_to_bits(x: f64) -> f64 {
    LogBase::Bits.from_nats(x)
}

fn check_dims(dims: &[usize], n: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(Error::Dimension(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::Dimension(format!("subsystem dims {dims:?} multiply to {total}, expected {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity against `tol`.
    pub fn new(m: CMatrix, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        check_dims(&dims, m.rows())?;
        let op = HermitianOperator::new(m, tol.herm)?;
        let tr = op.matrix().trace().re;
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::Trace(format!("trace is {tr}, expected 1")));
        }
        let sd = op.eig()?;
        let lmin = sd.eigenvalues.last().copied().unwrap_or(0.0);
        if lmin < -tol.psd {
            return Err(Error::NotPsd { min_eigenvalue: lmin });
        }
        Ok(DensityMatrix { dims, op })
    }

    /// For operators that are states by construction (outputs of channels).
    pub fn from_trusted(m: CMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, m.rows())?;
        if !m.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        Ok(DensityMatrix { dims, op: HermitianOperator::symmetrized(m) })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        DensityMatrix { dims, op: HermitianOperator::symmetrized(CMatrix::identity(n).scale_real(1.0 / n as f64)) }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        Ok(DensityMatrix { dims, op: self.op })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = linalg::partial_trace(self.matrix(), &self.dims, keep)?;
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        let dims = k.iter().map(|&i| self.dims[i]).collect();
        DensityMatrix::from_trusted(m, dims)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { dims, op: HermitianOperator::symmetrized(self.matrix().kron(other.matrix())) }
    }

    /// Σ w_i ρ_i; the weights are not required to be normalised.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?.1;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (w, r) in parts {
            if r.dims != first.dims {
                return Err(Error::Dimension("mixture components differ in dims".into()));
            }
            acc = &acc + &r.matrix().scale_real(*w);
        }
        DensityMatrix::from_trusted(acc, first.dims.clone())
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        self.op.eig()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Requires |‖ψ‖ − 1| ≤ `tol.trace`.
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>, tol: &Tolerances) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > tol.trace {
            return Err(Error::Trace(format!("state norm is {n}, expected 1")));
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Rescales to unit norm; errors on the zero vector.
    pub fn normalized(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let n = norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalise a zero or non-finite vector".into()));
        }
        Ok(PureState { dims, amplitudes: amplitudes.into_iter().map(|z| z / n).collect() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            op: HermitianOperator::symmetrized(CMatrix::projector(&self.amplitudes)),
        }
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { dims, amplitudes: linalg::kron_vec(&self.amplitudes, &other.amplitudes) }
    }
}

/// −Σ λ log λ over eigenvalues above `cutoff · λ_max`, in nats.
pub fn entropy_of_spectrum(eigenvalues: &[f64], cutoff: f64) -> f64 {
    let lmax = eigenvalues.iter().copied().fold(0.0, f64::max);
    let floor = cutoff * lmax;
    -eigenvalues.iter().filter(|&&l| l > floor && l > 0.0).map(|&l| l * l.ln()).sum::<f64>()
}

/// Shannon entropy of a probability vector, in nats.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

pub fn von_neumann_entropy(rho: &DensityMatrix, cutoff: f64) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eig()?.eigenvalues, cutoff))
}

/// D(ρ‖σ) in nats, or `f64::INFINITY` when ρ puts more than `leak_tol` mass
/// outside the support of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!("relative entropy of {}-dim and {}-dim states", rho.dim(), sigma.dim())));
    }
    let sr = rho.eig()?;
    let ss = sigma.eig()?;
    Ok(relative_entropy_from_spectra(rho.matrix(), &sr, &ss, tol))
}

pub(crate) fn relative_entropy_from_spectra(
    rho: &CMatrix,
    rho_eig: &SpectralDecomposition,
    sigma_eig: &SpectralDecomposition,
    tol: &Tolerances,
) -> f64 {
    let neg_entropy = -entropy_of_spectrum(&rho_eig.eigenvalues, tol.support_cutoff);
    let floor = tol.support_cutoff * sigma_eig.max_eigenvalue();
    let w = &sigma_eig.eigenvectors;
    let mut cross = 0.0;
    let mut leak = 0.0;
    for (i, &mu) in sigma_eig.eigenvalues.iter().enumerate() {
        let wi = w.column(i);
        let rw = rho.mul_vec(&wi);
        let weight = linalg::inner(&wi, &rw).re;
        if mu > floor && mu > 0.0 {
            cross += weight * mu.ln();
        } else {
            leak += weight;
        }
    }
    if leak > tol.support_leak {
        return f64::INFINITY;
    }
    neg_entropy - cross
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, ONE, ZERO};
    use crate::random::{random_density_matrix, rng_from_seed};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn dm(m: CMatrix) -> DensityMatrix {
        let n = m.rows();
        DensityMatrix::new(m, vec![n], &tol()).unwrap()
    }

    fn plus() -> Vec<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(h, 0.0), C64::new(h, 0.0)]
    }

    #[test]
    fn entropy_examples() {
        let pure = PureState::normalized(plus(), vec![2]).unwrap().density();
        assert!(von_neumann_entropy(&pure, 1e-10).unwrap().abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert!((nats_to_bits(von_neumann_entropy(&mixed, 1e-10).unwrap()) - 1.0).abs() < 1e-14);
        let p = [0.75, 0.25];
        let oracle = -p.iter().map(|x: &f64| x * x.log2()).sum::<f64>();
        let r = dm(CMatrix::from_real_diag(&p));
        let h = nats_to_bits(von_neumann_entropy(&r, 1e-10).unwrap());
        assert!((h - oracle).abs() < 1e-14);
        assert!((h - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_examples() {
        let t = tol();
        let mut rng = rng_from_seed(5);
        let r = dm(random_density_matrix(3, 3, &mut rng));
        assert!(relative_entropy(&r, &r, &t).unwrap().abs() < 1e-12);
        let zero = dm(CMatrix::projector(&basis_vector(2, 0)));
        let half = DensityMatrix::maximally_mixed(vec![2]);
        assert!((nats_to_bits(relative_entropy(&zero, &half, &t).unwrap()) - 1.0).abs() < 1e-14);
        let p = PureState::normalized(plus(), vec![2]).unwrap().density();
        assert!(relative_entropy(&p, &zero, &t).unwrap().is_infinite());
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = rng_from_seed(8);
        let a = dm(random_density_matrix(2, 2, &mut rng));
        let b = dm(random_density_matrix(3, 3, &mut rng));
        let ab = a.tensor(&b);
        assert!(ab.partial_trace(&[0]).unwrap().matrix().approx_eq(a.matrix(), 1e-12));
        assert!(ab.partial_trace(&[1]).unwrap().matrix().approx_eq(b.matrix(), 1e-12));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)], vec![2, 2], &tol()).unwrap();
        let half = CMatrix::identity(2).scale_real(0.5);
        for keep in [0, 1] {
            assert!(bell.density().partial_trace(&[keep]).unwrap().matrix().approx_eq(&half, 1e-15));
        }
    }

    #[test]
    fn validation_errors() {
        let t = tol();
        assert!(matches!(DensityMatrix::new(CMatrix::identity(2), vec![2], &t), Err(Error::Trace(_))));
        assert!(matches!(
            DensityMatrix::new(CMatrix::from_real_diag(&[1.5, -0.5]), vec![2], &t),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(DensityMatrix::new(CMatrix::identity(4).scale_real(0.25), vec![3], &t), Err(Error::Dimension(_))));
        assert!(PureState::new(vec![ONE, ONE], vec![2], &t).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn entropy_is_concave(seed in any::<u64>(), w in 0.0f64..1.0) {
            let mut rng = rng_from_seed(seed);
            let a = dm(random_density_matrix(4, 2, &mut rng));
            let b = dm(random_density_matrix(4, 3, &mut rng));
            let mix = DensityMatrix::mixture(&[(w, &a), (1.0 - w, &b)]).unwrap();
            let lhs = von_neumann_entropy(&mix, 1e-10).unwrap();
            let rhs = w * von_neumann_entropy(&a, 1e-10).unwrap() + (1.0 - w) * von_neumann_entropy(&b, 1e-10).unwrap();
            prop_assert!(lhs >= rhs - 1e-12);
            prop_assert!(lhs <= (4.0f64).ln() + 1e-12);
        }

        #[test]
        fn relative_entropy_nonnegative_and_faithful(seed in any::<u64>()) {
            let t = tol();
            let mut rng = rng_from_seed(seed);
            let a = dm(random_density_matrix(3, 3, &mut rng));
            let b = dm(random_density_matrix(3, 3, &mut rng));
            let dab = relative_entropy(&a, &b, &t).unwrap();
            let dba = relative_entropy(&b, &a, &t).unwrap();
            let close = (a.matrix() - b.matrix()).frobenius_norm() < 1e-8;
            prop_assert!(dab >= -1e-12 && dba >= -1e-12);
            prop_assert_eq!(dab.abs() < 1e-12, close);
            prop_assert_eq!(dba.abs() < 1e-12, close);
        }

        #[test]
        fn partial_trace_of_product(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let a = dm(random_density_matrix(3, 2, &mut rng));
            let b = dm(random_density_matrix(2, 2, &mut rng));
            let r = a.tensor(&b).partial_trace(&[0]).unwrap();
            prop_assert!(r.matrix().approx_eq(a.matrix(), 1e-12));
        }
    }
}
