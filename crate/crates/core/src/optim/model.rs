//! Building blocks shared by the seesaw searches: constraint forms for the
//! energy and no-signalling conditions, random feasible starting points and
//! the reconstruction of an explicit shared state plus encodings from a pair
//! of admissible post-encoding states.

use rand::Rng;

use super::sdp::LinearForm;
use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, polar_isometry, ComplexMatrix, DimList, C64, ONE, ZERO};
use crate::quantum::random::{random_isometry, random_pure_vector};
use crate::quantum::{DensityMatrix, EnergyBound, KrausChannel};
use crate::schemes::Scheme;

/// Real-linear basis of `d x d` Hermitian matrices (`d^2` elements,
/// identity-free: diagonal units, then symmetric and antisymmetric pairs).
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = ONE;
        out.push(e);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(i, j)] = ONE;
            s[(j, i)] = ONE;
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(i, j)] = C64::new(0.0, 1.0);
            a[(j, i)] = C64::new(0.0, -1.0);
            out.push(a);
        }
    }
    out
}

/// Projector onto the vacuum of the message: `|0><0| (x) 1_B`.
pub fn vacuum_projector(dc: usize, db: usize) -> ComplexMatrix {
    kron(
        &ComplexMatrix::projector(&ComplexMatrix::ket(dc, 0)),
        &ComplexMatrix::identity(db),
    )
}

/// Forms `Re Tr(tau (1 (x) E))` for each Hermitian basis element `E` of B;
/// equal values on two blocks mean equal B-marginals.
pub fn marginal_probes(dc: usize, db: usize) -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(dc);
    hermitian_basis(db).iter().map(|e| kron(&id, e)).collect()
}

/// `Tr_C(block_a) = Tr_C(block_b)`, as `db^2` scalar equalities.
pub fn marginal_equalities(
    block_a: usize,
    block_b: usize,
    dc: usize,
    db: usize,
) -> Vec<(LinearForm, f64)> {
    marginal_probes(dc, db)
        .into_iter()
        .map(|e| {
            (
                LinearForm::new(vec![(block_a, e.clone()), (block_b, -&e)]),
                0.0,
            )
        })
        .collect()
}

/// Largest entry of `Tr_C(a) - Tr_C(b)`.
pub fn marginal_gap(a: &ComplexMatrix, b: &ComplexMatrix, dc: usize, db: usize) -> f64 {
    let dims = DimList::new(vec![dc, db]).expect("nonzero dims");
    let ta = crate::linalg::partial_trace(a, &dims, &[1]).expect("consistent dims");
    let tb = crate::linalg::partial_trace(b, &dims, &[1]).expect("consistent dims");
    ta.max_abs_diff(&tb)
}

/// Pair of prepare-and-measure qubit states `sqrt(1-w)|0> +- sqrt(w)|1>`
/// (padded to dimension `d`) with Bob's share in `|0>`. They saturate the
/// energy bound and reach the no-entanglement optimum under Helstrom.
pub fn pm_warm_start(omega: EnergyBound, d: usize) -> [ComplexMatrix; 2] {
    let w = omega.value().min(0.5);
    let b0 = ComplexMatrix::projector(&ComplexMatrix::ket(d, 0));
    [1.0, -1.0].map(|s| {
        let mut v = vec![ZERO; d];
        v[0] = C64::new((1.0 - w).sqrt(), 0.0);
        v[1] = C64::new(s * w.sqrt(), 0.0);
        kron(&ComplexMatrix::projector(&ComplexMatrix::column(&v)), &b0)
    })
}

/// Random admissible pair: a random pure shared state, random isometric
/// encodings, then mixing each encoding with "reset to vacuum" just enough to
/// meet the energy bound. Both outputs keep the shared state's B-marginal.
pub fn random_feasible_states<R: Rng + ?Sized>(
    omega: EnergyBound,
    d: usize,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    let dims = DimList::new(vec![d, d]).expect("nonzero dims");
    let psi = ComplexMatrix::column(&random_pure_vector(d * d, rng));
    let psi = ComplexMatrix::projector(&psi);
    let rho_b = crate::linalg::partial_trace(&psi, &dims, &[1]).expect("consistent dims");
    let reset = kron(&ComplexMatrix::projector(&ComplexMatrix::ket(d, 0)), &rho_b);
    let vac = vacuum_projector(d, d);
    let floor = omega.vacuum_floor();
    (0..2)
        .map(|_| {
            let v = random_isometry(d * d, d, rng);
            let ch = KrausChannel::from_isometry(&v, d).expect("isometry");
            let tau = crate::quantum::apply_kraus(&ch, &psi, &dims, 0);
            let w_tau = tau.re_trace_product(&vac);
            let t = if w_tau >= floor {
                0.0
            } else {
                ((floor - w_tau) / (1.0 - w_tau)).min(1.0)
            };
            // a little extra reset keeps the start strictly inside
            let t = (t + rng.random_range(0.0..0.2) * (1.0 - t)).min(1.0);
            &tau.scale(1.0 - t) + &reset.scale(t)
        })
        .collect()
}

/// Rebuild an explicit model from post-encoding states that share their
/// B-marginal.
///
/// The shared state purifies the common marginal, and each encoding is the
/// isometry carrying that purification onto a purification of `tau_x`, made
/// exactly isometric by a polar decomposition.
pub fn dilate(states: &[ComplexMatrix], dc: usize, db: usize) -> Result<Scheme> {
    if states.is_empty() {
        return Err(Error::InvalidInput("no states to dilate".into()));
    }
    let dims_cb = DimList::new(vec![dc, db])?;
    let mut rho_b = ComplexMatrix::zeros(db, db);
    for s in states {
        rho_b += &crate::linalg::partial_trace(s, &dims_cb, &[1])?;
    }
    let rho_b = rho_b.scale(1.0 / states.len() as f64);

    // |Psi> = sum_k sqrt(p_k) |k>_A |e_k>_B, with A of dimension db
    let (p, e) = eigh(&rho_b);
    let p: Vec<f64> = p.iter().map(|v| v.max(0.0)).collect();
    let norm: f64 = p.iter().sum();
    let mut psi = vec![ZERO; db * db];
    for k in 0..db {
        for b in 0..db {
            psi[k * db + b] = e[(b, k)] * (p[k] / norm).sqrt();
        }
    }
    let shared = DensityMatrix::pure(&psi, DimList::new(vec![db, db])?)?;

    let mut channels = Vec::with_capacity(states.len());
    for s in states {
        // purification |Phi> = sum_j sqrt(mu_j) |f_j>_{CB} |j>_E, indexed [c, e, b]
        let (mu, f) = eigh(s);
        let env = dc * db;
        let mut v = ComplexMatrix::zeros(dc * env, db);
        for k in 0..db {
            if p[k] / norm <= 1e-14 {
                continue;
            }
            let inv = 1.0 / (p[k] / norm).sqrt();
            for c in 0..dc {
                for j in 0..env {
                    if mu[j] <= 0.0 {
                        continue;
                    }
                    let sm = mu[j].sqrt();
                    let mut acc = ZERO;
                    for b in 0..db {
                        acc += e[(b, k)].conj() * f[(c * db + b, j)] * sm;
                    }
                    v[(c * env + j, k)] = acc * inv;
                }
            }
        }
        let v = polar_isometry(&v);
        channels.push(KrausChannel::from_isometry(&v, dc)?);
    }
    Scheme::from_parts(shared, channels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::vacuum_weight;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_spans_hermitian_space() {
        let b = hermitian_basis(3);
        assert_eq!(b.len(), 9);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = x.re_trace_product(y);
                if i != j {
                    assert!(ip.abs() < 1e-15);
                } else {
                    assert!(ip > 0.0);
                }
            }
        }
    }

    #[test]
    fn random_starts_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let om = EnergyBound::new(0.15).unwrap();
        for _ in 0..20 {
            let s = random_feasible_states(om, 3, &mut rng);
            for t in &s {
                assert!(t.re_trace_product(&vacuum_projector(3, 3)) >= 0.85 - 1e-12);
                assert!((t.trace().re - 1.0).abs() < 1e-12);
            }
            assert!(marginal_gap(&s[0], &s[1], 3, 3) < 1e-12);
        }
    }

    #[test]
    fn dilation_reproduces_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let om = EnergyBound::new(0.3).unwrap();
        let s = random_feasible_states(om, 3, &mut rng);
        let model = dilate(&s, 3, 3).unwrap();
        for (t, post) in s.iter().zip(&model.post_states) {
            assert!(t.max_abs_diff(post.matrix()) < 1e-9);
            assert!(vacuum_weight(post, 0).unwrap() >= 0.7 - 1e-9);
        }
    }

    #[test]
    fn dilation_handles_rank_deficient_marginals() {
        let om = EnergyBound::new(0.2).unwrap();
        let s = pm_warm_start(om, 2);
        let model = dilate(&s, 2, 2).unwrap();
        for (t, post) in s.iter().zip(&model.post_states) {
            assert!(t.max_abs_diff(post.matrix()) < 1e-9);
        }
    }
}
