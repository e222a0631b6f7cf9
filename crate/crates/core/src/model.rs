//! The fast-slow system `H = h_omega(p, q) + 1/2 |P|^2 + V(Q, q)`.
//!
//! Fast oscillators have frequencies `omega_j ~ 1/epsilon`; the slow system
//! is a particle with polynomial potential that may depend on the fast
//! positions. Complex fast coordinates use
//!
//! ```text
//! xi_j = (p_j - i omega_j q_j) / sqrt(2 omega_j),   eta_j = conj(xi_j)
//! ```
//!
//! so that `epsilon * h_omega = sum_j nu_j xi_j eta_j` with `nu = epsilon * omega`,
//! and `{xi_j, eta_j} = i` in the bracket where `{p, q} = 1`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{rational_to_f64, QuadSurd};

/// Fast frequencies, sorted ascending, with `epsilon = 1 / min omega` and
/// `nu = epsilon * omega` (so `nu[0] == 1`).
///
/// Alongside the floats, the exact dimensionless ratios `nu` are kept as
/// quadratic surds so the normal form can run in exact arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyVector {
    omega: Vec<f64>,
    epsilon: f64,
    nu: Vec<f64>,
    nu_exact: Vec<QuadSurd>,
}

impl FrequencyVector {
    /// Builds from physical frequencies given as floats; each float is taken
    /// as the exact dyadic rational it represents.
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        let exact = omega
            .iter()
            .map(|&w| {
                QuadSurd::from_f64(w)
                    .ok_or_else(|| Error::InvalidFrequencies(format!("non-finite frequency {w}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_exact(exact)
    }

    /// Builds from exact physical frequencies.
    pub fn from_exact(mut omega: Vec<QuadSurd>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::InvalidFrequencies("no fast frequencies".into()));
        }
        if let Some(w) = omega.iter().find(|w| w.signum() != std::cmp::Ordering::Greater) {
            return Err(Error::InvalidFrequencies(format!(
                "frequencies must be positive, got {w}"
            )));
        }
        omega.sort();
        let min = omega[0].clone();
        let nu_exact: Vec<QuadSurd> = omega.iter().map(|w| w.clone() / min.clone()).collect();
        let epsilon = 1.0 / min.to_f64();
        Ok(Self::assemble(nu_exact, epsilon))
    }

    /// Builds from dimensionless ratios and `epsilon`: `omega_j = ratio_j / epsilon`
    /// after the ratios are normalised so the smallest is one.
    pub fn from_ratios(ratios: Vec<QuadSurd>, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidFrequencies(format!("epsilon must be positive, got {epsilon}")));
        }
        if ratios.is_empty() {
            return Err(Error::InvalidFrequencies("no fast frequencies".into()));
        }
        if ratios.iter().any(|r| r.signum() != std::cmp::Ordering::Greater) {
            return Err(Error::InvalidFrequencies("ratios must be positive".into()));
        }
        let mut ratios = ratios;
        ratios.sort();
        let min = ratios[0].clone();
        let nu_exact = ratios.into_iter().map(|r| r / min.clone()).collect();
        Ok(Self::assemble(nu_exact, epsilon))
    }

    fn assemble(nu_exact: Vec<QuadSurd>, epsilon: f64) -> Self {
        let mut nu: Vec<f64> = nu_exact.iter().map(QuadSurd::to_f64).collect();
        nu[0] = 1.0;
        let omega = nu.iter().map(|v| v / epsilon).collect();
        Self {
            omega,
            epsilon,
            nu,
            nu_exact,
        }
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn nu_exact(&self) -> &[QuadSurd] {
        &self.nu_exact
    }

    /// Same ratios at a different `epsilon`.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::from_ratios(self.nu_exact.clone(), epsilon)
    }
}

/// One point of the full phase space `R^{2n} + R^{2d}` plus time.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub slow_p: Vec<f64>,
    pub slow_q: Vec<f64>,
    pub t: f64,
}

impl FullState {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            p: vec![0.0; n],
            q: vec![0.0; n],
            slow_p: vec![0.0; d],
            slow_q: vec![0.0; d],
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p
            .iter()
            .chain(&self.q)
            .chain(&self.slow_p)
            .chain(&self.slow_q)
            .all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.p
            .iter()
            .chain(&self.q)
            .chain(&self.slow_p)
            .chain(&self.slow_q)
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// `coeff * Q^slow_exp * q^fast_exp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialTerm {
    #[serde(with = "rational_string")]
    pub coeff: BigRational,
    pub slow_exp: Vec<u32>,
    pub fast_exp: Vec<u32>,
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::number::QuadSurd;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&QuadSurd::from_rational(r.clone()).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        let v: QuadSurd = s.parse().map_err(serde::de::Error::custom)?;
        v.as_rational()
            .cloned()
            .ok_or_else(|| serde::de::Error::custom(format!("coefficient `{s}` must be rational")))
    }
}

/// The slow Hamiltonian `H_0(P, Q, q) = 1/2 |P|^2 + V(Q, q)` with polynomial `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlowHamiltonian {
    n: usize,
    d: usize,
    terms: Vec<PotentialTerm>,
    // float copies for the integrator hot loop
    coeff_f64: Vec<f64>,
}

impl SlowHamiltonian {
    pub fn new(n: usize, d: usize, terms: Vec<PotentialTerm>) -> Result<Self> {
        for t in &terms {
            if t.slow_exp.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: t.slow_exp.len(),
                });
            }
            if t.fast_exp.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.fast_exp.len(),
                });
            }
        }
        let coeff_f64 = terms.iter().map(|t| rational_to_f64(&t.coeff)).collect();
        Ok(Self {
            n,
            d,
            terms,
            coeff_f64,
        })
    }

    /// `V = 0`: free slow particle, no coupling.
    pub fn free(n: usize, d: usize) -> Self {
        Self::new(n, d, Vec::new()).expect("empty potential is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    /// True when `V` does not depend on the fast positions.
    pub fn is_decoupled(&self) -> bool {
        self.terms.iter().all(|t| t.fast_exp.iter().all(|&e| e == 0))
    }

    pub fn potential(&self, slow_q: &[f64], q: &[f64]) -> f64 {
        self.terms
            .iter()
            .zip(&self.coeff_f64)
            .map(|(t, c)| c * monomial_value(&t.slow_exp, slow_q) * monomial_value(&t.fast_exp, q))
            .sum()
    }

    /// `H_0(P, Q, q)`.
    pub fn energy(&self, slow_p: &[f64], slow_q: &[f64], q: &[f64]) -> f64 {
        0.5 * slow_p.iter().map(|x| x * x).sum::<f64>() + self.potential(slow_q, q)
    }

    /// Writes `dV/dQ` into `grad_slow` and `dV/dq` into `grad_fast`.
    pub fn gradient(&self, slow_q: &[f64], q: &[f64], grad_slow: &mut [f64], grad_fast: &mut [f64]) {
        grad_slow.iter_mut().for_each(|g| *g = 0.0);
        grad_fast.iter_mut().for_each(|g| *g = 0.0);
        for (t, &c) in self.terms.iter().zip(&self.coeff_f64) {
            let slow_val = monomial_value(&t.slow_exp, slow_q);
            let fast_val = monomial_value(&t.fast_exp, q);
            for (k, g) in grad_slow.iter_mut().enumerate() {
                if t.slow_exp[k] > 0 {
                    *g += c * partial_value(&t.slow_exp, slow_q, k) * fast_val;
                }
            }
            for (k, g) in grad_fast.iter_mut().enumerate() {
                if t.fast_exp[k] > 0 {
                    *g += c * slow_val * partial_value(&t.fast_exp, q, k);
                }
            }
        }
    }
}

fn monomial_value(exp: &[u32], x: &[f64]) -> f64 {
    exp.iter()
        .zip(x)
        .fold(1.0, |acc, (&e, &v)| if e == 0 { acc } else { acc * v.powi(e as i32) })
}

fn partial_value(exp: &[u32], x: &[f64], k: usize) -> f64 {
    let mut acc = f64::from(exp[k]);
    for (j, (&e, &v)) in exp.iter().zip(x).enumerate() {
        let e = if j == k { e - 1 } else { e };
        if e > 0 {
            acc *= v.powi(e as i32);
        }
    }
    acc
}

/// Complex fast coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFastState {
    pub xi: Vec<Complex64>,
    pub eta: Vec<Complex64>,
}

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `sum_j (p_j^2 + omega_j^2 q_j^2) / 2`.
pub fn h_omega(p: &[f64], q: &[f64], freq: &FrequencyVector) -> Result<f64> {
    check_dims(freq.n(), p.len())?;
    check_dims(freq.n(), q.len())?;
    Ok(h_omega_unchecked(p, q, freq.omega()))
}

pub(crate) fn h_omega_unchecked(p: &[f64], q: &[f64], omega: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .zip(omega)
        .map(|((p, q), w)| 0.5 * (p * p + w * w * q * q))
        .sum()
}

pub fn to_complex(p: &[f64], q: &[f64], freq: &FrequencyVector) -> Result<ComplexFastState> {
    check_dims(freq.n(), p.len())?;
    check_dims(freq.n(), q.len())?;
    let xi: Vec<Complex64> = p
        .iter()
        .zip(q)
        .zip(freq.omega())
        .map(|((&p, &q), &w)| Complex64::new(p, -w * q) / (2.0 * w).sqrt())
        .collect();
    let eta = xi.iter().map(|z| z.conj()).collect();
    Ok(ComplexFastState { xi, eta })
}

/// Inverse of [`to_complex`]: `p = sqrt(omega/2) (xi + eta)`,
/// `q = i (xi - eta) / sqrt(2 omega)`. Imaginary parts are dropped, so the
/// result is meaningful for states with `eta = conj(xi)`.
pub fn from_complex(
    xi: &[Complex64],
    eta: &[Complex64],
    freq: &FrequencyVector,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dims(freq.n(), xi.len())?;
    check_dims(freq.n(), eta.len())?;
    let mut p = Vec::with_capacity(xi.len());
    let mut q = Vec::with_capacity(xi.len());
    for ((&x, &y), &w) in xi.iter().zip(eta).zip(freq.omega()) {
        p.push(((x + y) * (0.5 * w).sqrt()).re);
        q.push(((x - y) * Complex64::i() / (2.0 * w).sqrt()).re);
    }
    Ok((p, q))
}

/// `h_nu(xi, eta) = sum_j nu_j xi_j eta_j` for an arbitrary frequency vector.
pub fn h_nu(xi: &[Complex64], eta: &[Complex64], nu: &[f64]) -> Complex64 {
    xi.iter()
        .zip(eta)
        .zip(nu)
        .map(|((x, y), v)| x * y * v)
        .sum()
}

/// `sum_j nu_j (|xi_j|^2 + |eta_j|^2)`.
pub fn fast_energy_norm(xi: &[Complex64], eta: &[Complex64], freq: &FrequencyVector) -> f64 {
    xi.iter()
        .zip(eta)
        .zip(freq.nu())
        .map(|((x, y), v)| v * (x.norm_sqr() + y.norm_sqr()))
        .sum()
}

/// `h_omega(p, q) + 1/2 |P|^2 + V(Q, q)`.
pub fn eval_full_hamiltonian(state: &FullState, freq: &FrequencyVector, spec: &SlowHamiltonian) -> Result<f64> {
    check_dims(freq.n(), spec.n())?;
    check_dims(spec.d(), state.slow_p.len())?;
    check_dims(spec.d(), state.slow_q.len())?;
    Ok(h_omega(&state.p, &state.q, freq)? + spec.energy(&state.slow_p, &state.slow_q, &state.q))
}
