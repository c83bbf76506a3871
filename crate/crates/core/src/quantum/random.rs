//! Random matrices for tests and randomized machine generation.

use super::{c, ComplexMatrix, ComplexVector, DensityOperator};
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`), Haar distributed.
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rows, cols, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    isometry(dim, dim, rng)
}

/// `count` square blocks `E_i` of size `dim` with `sum_i E_i† E_i = 1`, cut from
/// one random isometry.
pub fn kraus_blocks<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let v = isometry(dim * count, dim, rng);
    (0..count)
        .map(|i| v.rows(i * dim, dim).into_owned())
        .collect()
}

/// Random full-rank density operator `G G† / Tr(G G†)`.
pub fn density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(dim, dim, rng);
    let m = &g * g.adjoint();
    let t = super::trace(&m).re;
    DensityOperator::new(m.unscale(t)).expect("Gram matrix is a valid density operator")
}

/// Random Hermitian positive semidefinite matrix with the given rank (unnormalized).
pub fn psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rank, rng);
    &g * g.adjoint()
}
