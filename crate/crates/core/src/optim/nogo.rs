//! Sampling check that unitary encodings gain nothing from entanglement.

use rand::Rng;

use super::seesaw::check_dim;
use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, ComplexMatrix, DimList, C64};
use crate::quantum::random::{ginibre, random_pure_vector, random_unitary};
use crate::quantum::{helstrom, DensityMatrix, EnergyBound};

/// Proposals allowed per trial before giving up on finding admissible unitaries.
pub const PROPOSAL_BUDGET: usize = 100_000;

/// `exp(i h)` for Hermitian `h`.
pub fn unitary_exp(h: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = eigh(h);
    let n = vals.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &l) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, l);
        for i in 0..n {
            let a = vecs[(i, k)] * ph;
            for j in 0..n {
                out[(i, j)] += a * vecs[(j, k)].conj();
            }
        }
    }
    out
}

fn vacuum_weight_vec(psi: &[C64], d: usize) -> f64 {
    // message is the most significant factor
    psi[..d].iter().map(|a| a.norm_sqr()).sum()
}

fn apply_local(u: &ComplexMatrix, psi: &[C64], d: usize) -> Vec<C64> {
    let full = kron(u, &ComplexMatrix::identity(d));
    (&full * &ComplexMatrix::column(psi)).as_slice().to_vec()
}

/// Random pure state on message (x) shared system whose message vacuum weight
/// is drawn uniformly from `[1 - omega, 1]`.
fn random_constrained_state<R: Rng + ?Sized>(
    omega: EnergyBound,
    d: usize,
    rng: &mut R,
) -> Vec<C64> {
    let raw = random_pure_vector(d * d, rng);
    let v = rng.random_range(omega.vacuum_floor()..=1.0);
    let w0 = vacuum_weight_vec(&raw, d).max(1e-300);
    let w1 = (1.0 - w0).max(1e-300);
    raw.iter()
        .enumerate()
        .map(|(i, a)| {
            if i < d {
                a * (v / w0).sqrt()
            } else {
                a * ((1.0 - v) / w1).sqrt()
            }
        })
        .collect()
}

fn propose<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    match rng.random_range(0..3) {
        0 => random_unitary(d, rng),
        1 => {
            // small rotation followed by random phases
            let g = ginibre(d, d, rng);
            let h = g.hermitian_part().scale(rng.random_range(0.0..0.5));
            let mut phases = ComplexMatrix::zeros(d, d);
            for k in 0..d {
                phases[(k, k)] = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            }
            &phases * &unitary_exp(&h)
        }
        _ => {
            // leaves the vacuum alone, so never raises the energy
            let inner = random_unitary(d - 1, rng);
            let mut u = ComplexMatrix::zeros(d, d);
            u[(0, 0)] = C64::new(1.0, 0.0);
            for i in 1..d {
                for j in 1..d {
                    u[(i, j)] = inner[(i - 1, j - 1)];
                }
            }
            u
        }
    }
}

/// Discrimination probability of the two pure post-states `(U_x (x) 1)|psi>`,
/// computed by the Helstrom measurement and cross-checked against the
/// overlap formula `(1 + sqrt(1 - |<phi0|phi1>|^2)) / 2`.
pub fn unitary_pair_w2(psi: &[C64], u0: &ComplexMatrix, u1: &ComplexMatrix) -> Result<f64> {
    let d = u0.rows();
    if psi.len() != d * d || u1.rows() != d {
        return Err(Error::DimMismatch(format!(
            "state of length {} for unitaries of size {d}",
            psi.len()
        )));
    }
    let dims = DimList::new(vec![d, d])?;
    let phi0 = apply_local(u0, psi, d);
    let phi1 = apply_local(u1, psi, d);
    let t0 = DensityMatrix::pure(&phi0, dims.clone())?;
    let t1 = DensityMatrix::pure(&phi1, dims)?;
    let (w, _) = helstrom(&t0, &t1)?;
    let overlap: C64 = phi0.iter().zip(&phi1).map(|(a, b)| a.conj() * b).sum();
    let w_overlap = 0.5 * (1.0 + (1.0 - overlap.norm_sqr()).max(0.0).sqrt());
    if (w - w_overlap).abs() > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "Helstrom value {w} disagrees with overlap value {w_overlap}"
        )));
    }
    Ok(w)
}

/// Largest discrimination probability found over `trials` random
/// admissible (state, unitary pair) samples in local dimension `local_dim`.
pub fn unitary_nogo_check(
    omega: EnergyBound,
    local_dim: usize,
    trials: usize,
    rng_seed: u64,
) -> Result<f64> {
    use rand::SeedableRng;
    check_dim(local_dim)?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let d = local_dim;
    let floor = omega.vacuum_floor();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        let psi = random_constrained_state(omega, d, &mut rng);
        let mut pick = || -> Result<ComplexMatrix> {
            for _ in 0..PROPOSAL_BUDGET {
                let u = propose(d, &mut rng);
                if vacuum_weight_vec(&apply_local(&u, &psi, d), d) >= floor {
                    return Ok(u);
                }
            }
            Err(Error::SamplingExhausted {
                proposals: PROPOSAL_BUDGET,
            })
        };
        let u0 = pick()?;
        let u1 = pick()?;
        best = best.max(unitary_pair_w2(&psi, &u0, &u1)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::qc_optimal_w2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn om(w: f64) -> EnergyBound {
        EnergyBound::new(w).unwrap()
    }

    #[test]
    fn exp_is_unitary_and_matches_small_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = ginibre(3, 3, &mut rng).hermitian_part();
        let u = unitary_exp(&h);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        let small = unitary_exp(&h.scale(1e-6));
        let lin = &ComplexMatrix::identity(3) + &h.scale_c(C64::new(0.0, 1e-6));
        assert!(small.max_abs_diff(&lin) < 1e-10);
    }

    #[test]
    fn identical_encodings_are_useless() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random_constrained_state(om(0.3), 3, &mut rng);
        let u = random_unitary(3, &mut rng);
        assert_eq!(unitary_pair_w2(&psi, &u, &u).unwrap(), 0.5);
    }

    #[test]
    fn sampled_states_respect_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let psi = random_constrained_state(om(0.2), 2, &mut rng);
            let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(vacuum_weight_vec(&psi, 2) >= 0.8 - 1e-12);
        }
    }

    #[test]
    fn no_advantage_from_unitaries() {
        for d in [2, 3] {
            let w = unitary_nogo_check(om(0.2), d, 500, 7).unwrap();
            assert!(w <= qc_optimal_w2(om(0.2)) + 1e-9 && w > 0.5);
        }
        assert!(unitary_nogo_check(om(0.5), 2, 50, 0).unwrap() <= 1.0);
    }
}
