//! Seeded generators for reproducible test matrices.
//!
//! Eigenvectors come from Gram–Schmidt orthonormalization of complex
//! Gaussian columns; gapped spectra draw each eigenvalue uniformly from
//! `[gap, 1]` and flip its sign with probability one half.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn random_gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).expect("shape")
}

/// Haar-like unitary: orthonormalized Gaussian columns (two Gram–Schmidt
/// passes).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_gaussian(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (z, v) in tail[0].iter_mut().zip(&head[k]) {
                    *z -= proj * v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Unstructured Hermitian matrix `(G + G†)/(2√n)`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = random_gaussian(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5 / (n.max(1) as f64).sqrt())
}

/// `V·diag(λ)·V†` with the given eigenvalues and a random unitary `V`.
pub fn hermitian_with_spectrum(rng: &mut impl Rng, eigenvalues: &[f64]) -> ComplexMatrix {
    let v = random_unitary(rng, eigenvalues.len());
    let mut vd = v.clone();
    let d: Vec<Complex64> = eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    vd.scale_columns(&d);
    vd.matmul(&v.adjoint()).hermitian_part()
}

/// Eigenvalues uniform on `±[gap, 1]`.
pub fn gapped_spectrum(rng: &mut impl Rng, n: usize, gap: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let mag = gap + (1.0 - gap) * rng.random::<f64>();
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

pub fn random_gapped_hermitian(rng: &mut impl Rng, n: usize, gap: f64) -> ComplexMatrix {
    let spec = gapped_spectrum(rng, n, gap);
    hermitian_with_spectrum(rng, &spec)
}

/// `U·diag(σ)·W†` with σ uniform on `[sigma_min, sigma_max]`.
pub fn random_contraction(rng: &mut impl Rng, n: usize, sigma_min: f64, sigma_max: f64) -> ComplexMatrix {
    let sigma: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(sigma_min + (sigma_max - sigma_min) * rng.random::<f64>(), 0.0)).collect();
    let u = random_unitary(rng, n);
    let w = random_unitary(rng, n);
    let mut ud = u;
    ud.scale_columns(&sigma);
    ud.matmul(&w.adjoint())
}
