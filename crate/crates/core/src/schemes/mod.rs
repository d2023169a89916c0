//! Closed-form encodings for discriminating two inputs under an energy
//! restriction: the optimum without entanglement, and two entanglement
//! assisted schemes (two qubits, two qutrits) with a free noise parameter
//! `r` that is tuned numerically.

mod ellipse;
mod search;

pub use ellipse::{pm_ellipse_max_correlator, pm_hull_profile};
pub use search::maximize_scalar;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DimList, C64, ZERO};
use crate::quantum::{apply_channel, DensityMatrix, EnergyBound, KrausChannel};

/// Message (C, or A before encoding) is subsystem 0, Bob's share is subsystem 1.
pub const MESSAGE: usize = 0;

/// Energy (`sqrt 2 - 1`) from which the qutrit scheme transmits one bit perfectly.
pub fn deterministic_threshold() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

/// Best success probability for two inputs without entanglement,
/// `1/2 (sqrt(1 - omega) + sqrt(omega))^2`, saturating at 1 from `omega = 1/2`.
pub fn qc_optimal_w2(omega: EnergyBound) -> f64 {
    let w = omega.value();
    if w >= 0.5 {
        return 1.0;
    }
    0.5 * ((1.0 - w).sqrt() + w.sqrt()).powi(2)
}

/// Which entanglement-assisted construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Qubit,
    Qutrit,
}

impl SchemeKind {
    pub fn local_dim(self) -> usize {
        match self {
            SchemeKind::Qubit => 2,
            SchemeKind::Qutrit => 3,
        }
    }
}

/// Energy and noise parameter of a scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub omega: EnergyBound,
    pub r: f64,
}

impl SchemeParams {
    pub fn new(omega: f64, r: f64) -> Result<Self> {
        let omega = EnergyBound::new(omega)?;
        let p = Self { omega, r };
        p.check_common()?;
        Ok(p)
    }

    fn check_common(&self) -> Result<()> {
        let w = self.omega.value();
        if !(self.r >= 0.0 && self.r <= w) {
            return Err(Error::InvalidParams(format!(
                "need 0 <= r <= omega, got r = {}, omega = {w}",
                self.r
            )));
        }
        if w + self.r > 1.0 {
            return Err(Error::InvalidParams(format!(
                "need omega + r <= 1, got {}",
                w + self.r
            )));
        }
        Ok(())
    }

    /// Largest admissible `r` at this energy.
    pub fn r_max(omega: f64) -> f64 {
        omega.min(1.0 - omega).max(0.0)
    }
}

/// Shared state, per-input encodings and the resulting states `tau_x^{CB}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub shared_state: DensityMatrix,
    pub channels: Vec<KrausChannel>,
    pub post_states: Vec<DensityMatrix>,
}

impl Scheme {
    /// Encode the shared state with each channel on the message subsystem.
    pub fn from_parts(shared_state: DensityMatrix, channels: Vec<KrausChannel>) -> Result<Self> {
        let post_states = channels
            .iter()
            .map(|ch| apply_channel(ch, &shared_state, MESSAGE))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shared_state,
            channels,
            post_states,
        })
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn dims(d: usize) -> DimList {
    DimList::new(vec![d, d]).expect("nonzero dims")
}

fn mat(n: usize, entries: &[(usize, usize, f64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = c(v);
    }
    m
}

fn ket(amps: &[(usize, f64)], n: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    for &(i, a) in amps {
        v[i] = c(a);
    }
    v
}

/// Two-qubit scheme: input 0 leaves the state untouched, input 1 applies a
/// two-element amplitude-damping-like channel.
pub fn qubit_scheme(p: SchemeParams) -> Result<Scheme> {
    p.check_common()?;
    let (w, r) = (p.omega.value(), p.r);
    if w >= 1.0 {
        return Err(Error::InvalidParams(
            "the qubit scheme needs omega < 1".into(),
        ));
    }
    // |CB> index = 2 C + B
    let psi = ket(
        &[
            (0, (1.0 - w).sqrt()),
            (2, -sqrt0((w - r) / 2.0)),
            (3, sqrt0((w + r) / 2.0)),
        ],
        4,
    );
    let shared = DensityMatrix::pure(&psi, dims(2))?;

    let encode = if w + r == 0.0 {
        KrausChannel::identity(2)
    } else {
        let z = 1.0 - w;
        let k0 = mat(
            2,
            &[
                (0, 0, sqrt0(r * (w - r)) / (z * (w + r)).sqrt()),
                (0, 1, (2.0 * r).sqrt() / (w + r).sqrt()),
            ],
        );
        let k1 = mat(
            2,
            &[
                (0, 0, sqrt0(1.0 - r - w) / z.sqrt()),
                (1, 0, 2f64.sqrt() * r / (z * (w + r)).sqrt()),
                (1, 1, -sqrt0(w - r) / (w + r).sqrt()),
            ],
        );
        KrausChannel::new(vec![k0, k1])?
    };
    Scheme::from_parts(shared, vec![KrausChannel::identity(2), encode])
}

/// `tau_1^{CB} = r |01><01| + (1 - r) |phi><phi|` written out directly.
pub fn qubit_tau1_closed(p: SchemeParams) -> ComplexMatrix {
    let (w, r) = (p.omega.value(), p.r);
    let mut out = ComplexMatrix::projector(&ComplexMatrix::ket(4, 1)).scale(r);
    if r < 1.0 {
        let phi = ket(
            &[
                (0, sqrt0((1.0 - r - w) / (1.0 - r))),
                (2, sqrt0((w + r) / (2.0 * (1.0 - r)))),
                (3, -sqrt0((w - r) / (2.0 * (1.0 - r)))),
            ],
            4,
        );
        out += &ComplexMatrix::projector(&ComplexMatrix::column(&phi)).scale(1.0 - r);
    }
    out
}

/// `1/2 + 1/2 lambda_+` for the qubit scheme, with
/// `lambda_+ = 1/2 (r + sqrt(5r^2 - 4 r w + 8 sqrt z sqrt(w - r) sqrt((z - r)(r + w)) + 8 z w))`.
pub fn qubit_w2_closed_form(p: SchemeParams) -> Result<f64> {
    p.check_common()?;
    let (w, r) = (p.omega.value(), p.r);
    let z = 1.0 - w;
    let rad = 5.0 * r * r - 4.0 * r * w
        + 8.0 * z.sqrt() * sqrt0(w - r) * sqrt0((z - r) * (r + w))
        + 8.0 * z * w;
    let lam = 0.5 * (r + sqrt0(rad));
    Ok(0.5 + 0.5 * lam)
}

fn qutrit_check(p: &SchemeParams) -> Result<f64> {
    p.check_common()?;
    let a = 1.0 - p.r - p.omega.value();
    if a < 0.0 {
        return Err(Error::InvalidParams(format!(
            "qutrit amplitude a = 1 - r - omega = {a} is negative"
        )));
    }
    Ok(a)
}

/// `(b_x, c_x)` coefficients of the qutrit Kraus operators.
fn qutrit_bc(w: f64, r: f64, a: f64, x: usize) -> (f64, f64) {
    let s = if x == 0 { 1.0 } else { -1.0 };
    let b = s * sqrt0((w - s * r) / (2.0 * (1.0 - a)));
    let cc = s * sqrt0((w + s * r) / (2.0 * (1.0 - a)));
    (b, cc)
}

/// Two-qutrit scheme: both inputs apply a two-element channel differing by
/// relative signs.
pub fn qutrit_scheme(p: SchemeParams) -> Result<Scheme> {
    let a = qutrit_check(&p)?;
    let (w, r) = (p.omega.value(), p.r);
    // |CB> index = 3 C + B
    let h = sqrt0(1.0 - a) / 2.0;
    let psi = ket(&[(2, a.sqrt()), (3, h), (7, -h), (6, h), (4, h)], 9);
    let shared = DensityMatrix::pure(&psi, dims(3))?;

    let channels = (0..2)
        .map(|x| {
            if 1.0 - a <= 0.0 {
                return Ok(KrausChannel::identity(3));
            }
            let s = if x == 0 { 1.0 } else { -1.0 };
            let g = (r / (1.0 - a)).sqrt();
            let k0 = mat(3, &[(0, 1, g), (0, 2, s * g)]);
            let (b, cc) = qutrit_bc(w, r, a, x);
            let k1 = mat(
                3,
                &[(0, 0, 1.0), (1, 1, -b), (1, 2, -b), (2, 1, cc), (2, 2, -cc)],
            );
            KrausChannel::new(vec![k0, k1])
        })
        .collect::<Result<Vec<_>>>()?;
    Scheme::from_parts(shared, channels)
}

/// `tau_x^{CB} = r |0x><0x| + (1 - r) |psi_x><psi_x|` written out directly.
pub fn qutrit_tau_closed(p: SchemeParams, x: usize) -> Result<ComplexMatrix> {
    let a = qutrit_check(&p)?;
    let (w, r) = (p.omega.value(), p.r);
    let mut out = ComplexMatrix::projector(&ComplexMatrix::ket(9, x)).scale(r);
    if r < 1.0 && 1.0 - a > 0.0 {
        let (b, cc) = qutrit_bc(w, r, a, x);
        let f = ((1.0 - a) / (1.0 - r)).sqrt();
        let psi = ket(&[(2, (a / (1.0 - r)).sqrt()), (3, -f * b), (7, f * cc)], 9);
        out += &ComplexMatrix::projector(&ComplexMatrix::column(&psi)).scale(1.0 - r);
    } else if r < 1.0 {
        out += &ComplexMatrix::projector(&ComplexMatrix::ket(9, 2)).scale(1.0 - r);
    }
    Ok(out)
}

/// Diagonal of the message reduction `tau_x^C`:
/// `(1 - w, (w - (-1)^x r) / 2, (w + (-1)^x r) / 2)`.
pub fn qutrit_message_diagonal(p: SchemeParams, x: usize) -> [f64; 3] {
    let (w, r) = (p.omega.value(), p.r);
    let s = if x == 0 { 1.0 } else { -1.0 };
    [1.0 - w, (w - s * r) / 2.0, (w + s * r) / 2.0]
}

/// `1/2 (1 + r + sqrt(2 a sqrt(w^2 - r^2) + r^2 + 2 w a))`.
pub fn qutrit_w2_closed_form(p: SchemeParams) -> Result<f64> {
    let a = qutrit_check(&p)?;
    let (w, r) = (p.omega.value(), p.r);
    Ok(0.5 * (1.0 + r + sqrt0(2.0 * a * sqrt0(w * w - r * r) + r * r + 2.0 * w * a)))
}

/// Closed-form success probability of `kind`.
pub fn closed_form_w2(kind: SchemeKind, p: SchemeParams) -> Result<f64> {
    match kind {
        SchemeKind::Qubit => qubit_w2_closed_form(p),
        SchemeKind::Qutrit => qutrit_w2_closed_form(p),
    }
}

/// Build the scheme of `kind`.
pub fn build_scheme(kind: SchemeKind, p: SchemeParams) -> Result<Scheme> {
    match kind {
        SchemeKind::Qubit => qubit_scheme(p),
        SchemeKind::Qutrit => qutrit_scheme(p),
    }
}

/// Maximize the closed-form success probability over the noise parameter.
///
/// Energies above 1/2 are clamped to 1/2, where both schemes already reach
/// one. The search runs on `[0, r_max - 1e-12]` (the closed forms have an
/// infinite slope at `r = omega`) and the endpoint is checked separately.
pub fn optimize_r(kind: SchemeKind, omega: EnergyBound) -> (f64, f64) {
    let w = omega.value().min(0.5);
    let params = |r: f64| SchemeParams {
        omega: EnergyBound::new(w).expect("clamped energy"),
        r,
    };
    let f = |r: f64| closed_form_w2(kind, params(r)).unwrap_or(f64::NEG_INFINITY);
    let r_max = SchemeParams::r_max(w);
    if r_max <= 0.0 {
        return (0.0, f(0.0));
    }
    let hi = (r_max - 1e-12).max(0.0);
    let (mut r_star, mut best) = maximize_scalar(f, 0.0, hi, 400, 1e-14);
    let at_end = f(r_max);
    if at_end > best {
        r_star = r_max;
        best = at_end;
    }
    (r_star, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{ccnr_value, helstrom, is_ppt, purity, vacuum_weight};

    fn om(w: f64) -> EnergyBound {
        EnergyBound::new(w).unwrap()
    }

    #[test]
    fn qc_examples() {
        assert_eq!(qc_optimal_w2(om(0.0)), 0.5);
        assert_eq!(qc_optimal_w2(om(0.5)), 1.0);
        assert_eq!(qc_optimal_w2(om(0.7)), 1.0);
        assert!((qc_optimal_w2(om(0.2)) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert!(SchemeParams::new(0.2, 0.3).is_err());
        assert!(SchemeParams::new(0.2, -0.1).is_err());
        assert!(SchemeParams::new(0.6, 0.5).is_err());
        assert!(SchemeParams::new(0.2, 0.2).is_ok());
        assert!(qutrit_w2_closed_form(SchemeParams::new(0.2, 0.1).unwrap()).is_ok());
    }

    #[test]
    fn qubit_examples() {
        let s = qubit_scheme(SchemeParams::new(0.2, 0.0).unwrap()).unwrap();
        assert!((purity(&s.post_states[1]) - 1.0).abs() < 1e-12);
        for t in &s.post_states {
            assert!((vacuum_weight(t, MESSAGE).unwrap() - 0.8).abs() < 1e-12);
        }
        let p = SchemeParams::new(0.2, 0.1).unwrap();
        let s = qubit_scheme(p).unwrap();
        assert!(purity(&s.post_states[1]) < 1.0);
        assert!(!is_ppt(&s.post_states[1]).unwrap().0);
        assert!(
            s.post_states[1]
                .matrix()
                .max_abs_diff(&qubit_tau1_closed(p))
                < 1e-9
        );
        // r = omega is admissible as long as omega + r <= 1
        let s = qubit_scheme(SchemeParams::new(0.3, 0.3).unwrap()).unwrap();
        assert!(s.channels[1].completeness_deviation() < 1e-12);
    }

    #[test]
    fn qubit_closed_form_examples() {
        let w = qubit_w2_closed_form(SchemeParams::new(0.2, 0.0).unwrap()).unwrap();
        assert!((w - 0.9).abs() < 1e-12);
        assert_eq!(
            qubit_w2_closed_form(SchemeParams::new(0.0, 0.0).unwrap()).unwrap(),
            0.5
        );
        let (_, best) = optimize_r(SchemeKind::Qubit, om(0.2));
        assert!(best > 0.9 + 1e-4);
    }

    #[test]
    fn closed_forms_match_helstrom() {
        for &(w, r) in &[
            (0.05, 0.01),
            (0.2, 0.0),
            (0.2, 0.1),
            (0.3, 0.25),
            (0.45, 0.45),
        ] {
            let p = SchemeParams::new(w, r).unwrap();
            for kind in [SchemeKind::Qubit, SchemeKind::Qutrit] {
                let s = build_scheme(kind, p).unwrap();
                let (h, _) = helstrom(&s.post_states[0], &s.post_states[1]).unwrap();
                let cf = closed_form_w2(kind, p).unwrap();
                assert!((h - cf).abs() < 1e-8, "{kind:?} w={w} r={r}: {h} vs {cf}");
            }
        }
    }

    #[test]
    fn qutrit_examples() {
        let p = SchemeParams::new(0.2, 0.0).unwrap();
        assert!((qutrit_w2_closed_form(p).unwrap() - 0.9).abs() < 1e-12);
        let s = qutrit_scheme(p).unwrap();
        let red = s.post_states[0].reduce(&[MESSAGE]).unwrap();
        assert!((purity(&red) - 0.66).abs() < 1e-12);

        let p = SchemeParams::new(0.2, 0.15).unwrap();
        let s = qutrit_scheme(p).unwrap();
        for x in 0..2 {
            assert!(
                s.post_states[x]
                    .matrix()
                    .max_abs_diff(&qutrit_tau_closed(p, x).unwrap())
                    < 1e-9
            );
            let red = s.post_states[x].reduce(&[MESSAGE]).unwrap();
            let diag = qutrit_message_diagonal(p, x);
            assert!(red.matrix().max_abs_diff(&ComplexMatrix::diag(&diag)) < 1e-9);
            assert!(ccnr_value(&s.post_states[x]).unwrap() > 1.0);
            // rank-two mixture of orthogonal pure states
            let expect = p.r * p.r + (1.0 - p.r) * (1.0 - p.r);
            assert!((purity(&s.post_states[x]) - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn qutrit_reaches_one_at_threshold() {
        let (r, w) = optimize_r(SchemeKind::Qutrit, om(deterministic_threshold()));
        assert!((w - 1.0).abs() < 1e-9, "{w}");
        assert!((r - (1.0 - 0.5f64.sqrt())).abs() < 1e-4, "{r}");
    }

    #[test]
    fn hierarchy_at_moderate_energy() {
        let (_, qb) = optimize_r(SchemeKind::Qubit, om(0.2));
        let (_, qt) = optimize_r(SchemeKind::Qutrit, om(0.2));
        assert!(qt > qb + 1e-4 && qb > 0.9 + 1e-4);
    }

    #[test]
    fn optimize_r_matches_dense_grid() {
        for kind in [SchemeKind::Qubit, SchemeKind::Qutrit] {
            for &w in &[0.03, 0.2, 0.37] {
                let (_, best) = optimize_r(kind, om(w));
                let n = (w / 1e-5) as usize;
                let grid = (0..=n)
                    .map(|i| {
                        closed_form_w2(
                            kind,
                            SchemeParams::new(w, (i as f64 * 1e-5).min(w)).unwrap(),
                        )
                        .unwrap()
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    best >= grid - 1e-8 && best <= grid + 1e-6,
                    "{kind:?} {w}: {best} vs {grid}"
                );
            }
        }
    }

    #[test]
    fn zero_energy_is_a_coin_flip() {
        for kind in [SchemeKind::Qubit, SchemeKind::Qutrit] {
            let (_, w) = optimize_r(kind, om(1e-9));
            assert!((w - 0.5).abs() < 1e-4);
            let (r, w) = optimize_r(kind, om(0.0));
            assert_eq!((r, w), (0.0, 0.5));
        }
    }
}
