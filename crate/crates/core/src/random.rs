//! Seeded random matrices and states. Every draw goes through [`Rng`] so that
//! runs are reproducible from a single master seed.

use num_complex::Complex64 as C64;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{inner, norm, CMatrix};

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` under a master seed.
pub fn trial_rng(master: u64, index: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(index);
    r
}

pub fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn random_gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian(n: usize, rng: &mut Rng) -> CMatrix {
    random_gaussian_matrix(n, n, rng).hermitian_part()
}

/// Haar-distributed unitary via Gram-Schmidt on the columns of a Ginibre matrix.
pub fn haar_unitary(n: usize, rng: &mut Rng) -> CMatrix {
    let g = random_gaussian_matrix(n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for b in &cols {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        cols.push(v.into_iter().map(|z| z / nv).collect());
    }
    CMatrix::from_columns(&cols).expect("square")
}

pub fn random_unit_vector(n: usize, rng: &mut Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    let nv = norm(&v);
    v.into_iter().map(|z| z / nv).collect()
}

/// ρ = G G† / tr(G G†) with G of shape n×rank (Ginibre-induced measure).
pub fn random_density_matrix(n: usize, rank: usize, rng: &mut Rng) -> CMatrix {
    let g = random_gaussian_matrix(n, rank.max(1), rng);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_real(1.0 / t).hermitian_part()
}

/// Uniformly random point of the probability simplex.
pub fn random_distribution(n: usize, rng: &mut Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn random_phase(rng: &mut Rng) -> f64 {
    rng.random::<f64>() * std::f64::consts::TAU
}
