//! Classical communication under an energy restriction: the no-signalling
//! bound on linear figures of merit, and explicit fully classical strategies
//! that saturate it for probabilistic transmission and random access codes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CorrelationTable, EnergyBound};

/// Slack used when comparing the averaged vacuum weight with `1 - omega`.
pub const ENERGY_SLACK: f64 = 1e-12;

/// Linear figure of merit `W = sum_{bxy} c_{bxy} p(b|x,y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    n_b: usize,
    n_x: usize,
    n_y: usize,
    coefficients: Vec<f64>,
}

impl Functional {
    pub fn from_fn(
        n_b: usize,
        n_x: usize,
        n_y: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut coefficients = Vec::with_capacity(n_b * n_x * n_y);
        for b in 0..n_b {
            for x in 0..n_x {
                for y in 0..n_y {
                    let c = f(b, x, y);
                    if !c.is_finite() {
                        return Err(Error::InvalidInput(format!(
                            "coefficient c[{b},{x},{y}] is not finite"
                        )));
                    }
                    coefficients.push(c);
                }
            }
        }
        if coefficients.is_empty() {
            return Err(Error::ShapeMismatch("empty functional".into()));
        }
        Ok(Self {
            n_b,
            n_x,
            n_y,
            coefficients,
        })
    }

    /// Success probability of transmitting `x in 0..n`: `c_{bx} = delta_{bx} / n`.
    pub fn transmission(n: usize) -> Result<Self> {
        Self::from_fn(n, n, 1, |b, x, _| if b == x { 1.0 / n as f64 } else { 0.0 })
    }

    /// `(m, d)` random access code: `c_{bxy} = delta_{b, x_y} / (m d^m)`,
    /// with `x` enumerating strings in base `d` (first digit most significant).
    pub fn random_access_code(m: usize, d: usize) -> Result<Self> {
        let n_x = d.pow(m as u32);
        let norm = 1.0 / (m * n_x) as f64;
        Self::from_fn(
            d,
            n_x,
            m,
            |b, x, y| if digit(x, y, m, d) == b { norm } else { 0.0 },
        )
    }

    pub fn get(&self, b: usize, x: usize, y: usize) -> f64 {
        self.coefficients[(b * self.n_x + x) * self.n_y + y]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_b, self.n_x, self.n_y)
    }

    /// Contract with a correlation table.
    pub fn evaluate(&self, table: &CorrelationTable) -> Result<f64> {
        if table.shape() != self.shape() {
            return Err(Error::ShapeMismatch(format!(
                "functional has shape {:?}, table has {:?}",
                self.shape(),
                table.shape()
            )));
        }
        let mut w = 0.0;
        for b in 0..self.n_b {
            for x in 0..self.n_x {
                for y in 0..self.n_y {
                    w += self.get(b, x, y) * table.get(b, x, y);
                }
            }
        }
        Ok(w)
    }
}

/// Digit `y` of `x` written with `m` digits in base `d`.
pub fn digit(x: usize, y: usize, m: usize, d: usize) -> usize {
    (x / d.pow((m - 1 - y) as u32)) % d
}

/// Bound on any figure of merit for entanglement-assisted (or more
/// generally no-signalling assisted) classical communication at energy
/// `omega`: `sum_y max_b sum_x c_{bxy} + omega sum_{xy} max_b c_{bxy}`.
pub fn result1_bound(f: &Functional, omega: EnergyBound) -> f64 {
    let (n_b, n_x, n_y) = f.shape();
    let mut first = 0.0;
    let mut second = 0.0;
    for y in 0..n_y {
        first += (0..n_b)
            .map(|b| (0..n_x).map(|x| f.get(b, x, y)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        for x in 0..n_x {
            second += (0..n_b)
                .map(|b| f.get(b, x, y))
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    first + omega.value() * second
}

/// Shared-randomness classical model: `q(lambda)`, encoders
/// `p_A(a|x)` and decoders `p_B(b|y,a)` per branch. Message symbol 0 is the
/// vacuum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalStrategy {
    pub q: Vec<f64>,
    /// `encoders[lambda][x][a]`
    pub encoders: Vec<Vec<Vec<f64>>>,
    /// `decoders[lambda][y][a][b]`
    pub decoders: Vec<Vec<Vec<Vec<f64>>>>,
}

impl ClassicalStrategy {
    /// Validate stochasticity and shapes.
    pub fn new(
        q: Vec<f64>,
        encoders: Vec<Vec<Vec<f64>>>,
        decoders: Vec<Vec<Vec<Vec<f64>>>>,
    ) -> Result<Self> {
        let s = Self {
            q,
            encoders,
            decoders,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let l = self.q.len();
        if l == 0 || self.encoders.len() != l || self.decoders.len() != l {
            return Err(Error::ShapeMismatch("branch counts disagree".into()));
        }
        check_distribution(&self.q, "q")?;
        let (n_x, n_a) = (
            self.encoders[0].len(),
            self.encoders[0].first().map_or(0, Vec::len),
        );
        let n_y = self.decoders[0].len();
        let n_b = self.decoders[0]
            .first()
            .and_then(|t| t.first())
            .map_or(0, Vec::len);
        if n_x == 0 || n_a == 0 || n_y == 0 || n_b == 0 {
            return Err(Error::ShapeMismatch("empty alphabet".into()));
        }
        for (lam, (enc, dec)) in self.encoders.iter().zip(&self.decoders).enumerate() {
            if enc.len() != n_x || dec.len() != n_y {
                return Err(Error::ShapeMismatch(format!(
                    "branch {lam} has inconsistent alphabets"
                )));
            }
            for row in enc {
                if row.len() != n_a {
                    return Err(Error::ShapeMismatch(format!(
                        "branch {lam} encoder row length"
                    )));
                }
                check_distribution(row, "encoder row")?;
            }
            for per_y in dec {
                if per_y.len() != n_a {
                    return Err(Error::ShapeMismatch(format!(
                        "branch {lam} decoder message alphabet"
                    )));
                }
                for row in per_y {
                    if row.len() != n_b {
                        return Err(Error::ShapeMismatch(format!(
                            "branch {lam} decoder row length"
                        )));
                    }
                    check_distribution(row, "decoder row")?;
                }
            }
        }
        Ok(())
    }

    /// `(n_b, n_x, n_y, n_a)`.
    pub fn alphabets(&self) -> (usize, usize, usize, usize) {
        (
            self.decoders[0][0][0].len(),
            self.encoders[0].len(),
            self.decoders[0].len(),
            self.encoders[0][0].len(),
        )
    }

    /// `p(b|x,y) = sum_{a, lambda} q(lambda) p_A(a|x) p_B(b|y,a)`.
    pub fn correlations(&self) -> Result<CorrelationTable> {
        let (n_b, n_x, n_y, n_a) = self.alphabets();
        CorrelationTable::from_fn(n_b, n_x, n_y, |b, x, y| {
            let mut p = 0.0;
            for (lam, &q) in self.q.iter().enumerate() {
                for a in 0..n_a {
                    p += q * self.encoders[lam][x][a] * self.decoders[lam][y][a][b];
                }
            }
            p
        })
    }

    /// Averaged vacuum probability `sum_lambda q(lambda) p_A(0|x)` per input.
    pub fn vacuum_probabilities(&self) -> Vec<f64> {
        let n_x = self.encoders[0].len();
        (0..n_x)
            .map(|x| {
                self.q
                    .iter()
                    .zip(&self.encoders)
                    .map(|(q, enc)| q * enc[x][0])
                    .sum()
            })
            .collect()
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&v| !(v >= -ENERGY_SLACK)) {
        return Err(Error::InvalidInput(format!("{what} has a negative entry")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("{what} sums to {s}")));
    }
    Ok(())
}

/// Value of `f` on the strategy's correlations.
pub fn evaluate_strategy(s: &ClassicalStrategy, f: &Functional) -> Result<f64> {
    f.evaluate(&s.correlations()?)
}

/// Averaged energy restriction `sum_lambda q(lambda) p_A(0|x) >= 1 - omega` for every `x`.
pub fn check_energy(s: &ClassicalStrategy, omega: EnergyBound) -> bool {
    s.vacuum_probabilities()
        .iter()
        .all(|&v| v - omega.vacuum_floor() >= -ENERGY_SLACK)
}

fn one_hot(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

/// Two-branch classical strategy for transmitting `x in 0..n`.
///
/// With probability `omega` the message is relayed perfectly. Otherwise
/// Alice sends the vacuum except for `x = 0`, which she flags with symbol 1
/// with probability `1 - nu`; Bob swaps symbols 0 and 1. The choice
/// `nu = (1 - 2 omega) / (1 - omega)` makes the energy constraint tight for
/// every input and reaches `1/n + omega`.
pub fn transmission_strategy(n: usize, omega: EnergyBound) -> Result<ClassicalStrategy> {
    let w = omega.value();
    if w > 0.5 {
        return Err(Error::InvalidEnergy {
            omega: w,
            reason: "the transmission strategy needs omega <= 1/2".into(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("transmission needs n >= 2".into()));
    }
    let nu = (1.0 - 2.0 * w) / (1.0 - w);

    let relay_enc: Vec<Vec<f64>> = (0..n).map(|x| one_hot(n, x)).collect();
    let relay_dec = vec![(0..n).map(|a| one_hot(n, a)).collect::<Vec<_>>()];

    let mut flag_enc: Vec<Vec<f64>> = (0..n).map(|_| one_hot(n, 0)).collect();
    flag_enc[0] = vec![0.0; n];
    flag_enc[0][0] = nu;
    flag_enc[0][1] = 1.0 - nu;
    let swap = |a: usize| match a {
        0 => 1,
        1 => 0,
        other => other,
    };
    let flag_dec = vec![(0..n).map(|a| one_hot(n, swap(a))).collect::<Vec<_>>()];

    ClassicalStrategy::new(
        vec![w, 1.0 - w],
        vec![relay_enc, flag_enc],
        vec![relay_dec, flag_dec],
    )
}

/// Classical `(m, d)` random access code at energy `omega <= d^-m`.
///
/// Branch 0 (weight `1 - d^m omega`) sends the vacuum and Bob guesses
/// uniformly. Branch `1 + s` (weight `omega`) sends the string `s` only when
/// `x = s` and the vacuum otherwise; Bob reads digit `y` of the symbol.
pub fn rac_strategy(m: usize, d: usize, omega: EnergyBound) -> Result<ClassicalStrategy> {
    if m == 0 || d < 2 {
        return Err(Error::InvalidInput(
            "random access code needs m >= 1, d >= 2".into(),
        ));
    }
    let n = d.pow(m as u32);
    let limit = 1.0 / n as f64;
    let w = omega.value();
    if w > limit + ENERGY_SLACK {
        return Err(Error::EnergyTooHigh { omega: w, limit });
    }
    let w = w.min(limit);

    let mut q = vec![(1.0 - n as f64 * w).max(0.0)];
    q.extend(std::iter::repeat_n(w, n));

    let vacuum_enc: Vec<Vec<f64>> = (0..n).map(|_| one_hot(n, 0)).collect();
    let uniform_dec: Vec<Vec<Vec<f64>>> =
        (0..m).map(|_| vec![vec![1.0 / d as f64; d]; n]).collect();
    let read_dec: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|y| (0..n).map(|a| one_hot(d, digit(a, y, m, d))).collect())
        .collect();

    let mut encoders = vec![vacuum_enc];
    let mut decoders = vec![uniform_dec];
    for s in 0..n {
        encoders.push(
            (0..n)
                .map(|x| one_hot(n, if x == s { s } else { 0 }))
                .collect(),
        );
        decoders.push(read_dec.clone());
    }
    ClassicalStrategy::new(q, encoders, decoders)
}
