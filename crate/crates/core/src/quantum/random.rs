//! Haar-like random states, unitaries, isometries and channels.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, KrausChannel};
use crate::linalg::{ComplexMatrix, DimList, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Ginibre matrix with standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Uniformly random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

/// Haar-random isometry `rows x cols` (rows >= cols), via Gram-Schmidt on a
/// Ginibre matrix.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    loop {
        let mut g = ginibre(rows, cols, rng);
        if orthonormalize_columns(&mut g) {
            return g;
        }
    }
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(d, d, rng)
}

/// Modified Gram-Schmidt in place; false if the columns are (nearly) dependent.
pub fn orthonormalize_columns(m: &mut ComplexMatrix) -> bool {
    let (rows, cols) = (m.rows(), m.cols());
    for c in 0..cols {
        for p in 0..c {
            let ov: C64 = (0..rows).map(|r| m[(r, p)].conj() * m[(r, c)]).sum();
            for r in 0..rows {
                let sub = m[(r, p)] * ov;
                m[(r, c)] -= sub;
            }
        }
        let n = (0..rows).map(|r| m[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-10 {
            return false;
        }
        for r in 0..rows {
            m[(r, c)] /= n;
        }
    }
    true
}

/// Random density matrix `G G^dagger / Tr` with `G` of size `d x rank`.
pub fn random_density<R: Rng + ?Sized>(dims: DimList, rank: usize, rng: &mut R) -> DensityMatrix {
    let d = dims.total();
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * &g.adjoint();
    DensityMatrix::from_unnormalized(m, dims).expect("Wishart matrices are valid states")
}

/// Random channel from a Haar isometry `in_dim -> out_dim * env_dim`.
pub fn random_channel<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    env_dim: usize,
    rng: &mut R,
) -> KrausChannel {
    let v = random_isometry(out_dim * env_dim, in_dim, rng);
    KrausChannel::from_isometry(&v, out_dim).expect("isometries give complete Kraus sets")
}
