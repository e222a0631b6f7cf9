//! Simultaneous rational approximation of frequency ratios and the resonance
//! model built on top of it.
//!
//! Two forms of Dirichlet's theorem are used. The capped form finds
//! `q <= Q` with `|x_j - p_j/q| <= 1/(q Q^{1/k})`; the sequence form lists
//! infinitely many `q` with `|x_j - p_j/q| <= q^{-1-1/k}`, where `k` is the
//! number of ratios. All bound checks are exact: the inequalities are raised
//! to the `k`-th power so no irrational roots are ever formed.
//!
//! By convention both searches start at `q = 2`; `q = 1` (plain integer
//! rounding) is only returned by the capped search when nothing in
//! `2..=Q` qualifies.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::FrequencyVector;
use crate::number::{rational_from_f64, rational_to_f64, QuadSurd};

/// Default largest denominator examined by the sequence search.
pub const DEFAULT_SCAN_LIMIT: u64 = 2_000_000;

/// The constant in `alpha <= b N / 21`.
pub const DEFAULT_ALPHA_CONSTANT: u32 = 21;

/// A common-denominator approximation `p_j / q` of a list of ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalApprox {
    pub qden: u64,
    pub pnums: Vec<i64>,
    /// `|ratio_j - p_j/q|`, as floats for reporting.
    pub errors: Vec<f64>,
}

impl RationalApprox {
    fn build(ratios: &[QuadSurd], qden: u64) -> Result<Self> {
        let q = QuadSurd::from_integer(qden as i64);
        let mut pnums = Vec::with_capacity(ratios.len());
        let mut errors = Vec::with_capacity(ratios.len());
        for r in ratios {
            let p = (r.clone() * q.clone()).round_half_even();
            let p = p
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument(format!("numerator overflow at q = {qden}")))?;
            let err = (r.clone() - QuadSurd::ratio(p, qden as i64)).abs();
            pnums.push(p);
            errors.push(err.to_f64());
        }
        Ok(Self {
            qden,
            pnums,
            errors,
        })
    }

    /// `p_j / q` as exact rationals.
    pub fn approximants(&self) -> Vec<BigRational> {
        self.pnums
            .iter()
            .map(|&p| BigRational::new(BigInt::from(p), BigInt::from(self.qden)))
            .collect()
    }

    /// One-line `key=value` record.
    pub fn record_line(&self, alpha: Option<&BigRational>) -> String {
        let join = |v: Vec<String>| v.join(",");
        let alpha = alpha
            .map(|a| format!("{}", QuadSurd::from_rational(a.clone())))
            .unwrap_or_else(|| "none".to_string());
        format!(
            "qden={} pnums={} alpha={} errors={}",
            self.qden,
            join(self.pnums.iter().map(|p| p.to_string()).collect()),
            alpha,
            join(self.errors.iter().map(|e| format!("{e:e}")).collect()),
        )
    }
}

/// `|q x_j - p_j|` for every ratio.
fn scaled_errors(ratios: &[QuadSurd], qden: u64, pnums: &[i64]) -> Vec<QuadSurd> {
    let q = QuadSurd::from_integer(qden as i64);
    ratios
        .iter()
        .zip(pnums)
        .map(|(r, &p)| (r.clone() * q.clone() - QuadSurd::from_integer(p)).abs())
        .collect()
}

/// `|x - p/q| <= 1/(q Q^{1/k})`  <=>  `|q x - p|^k Q <= 1`.
pub fn satisfies_capped_bound(ratios: &[QuadSurd], approx: &RationalApprox, qcap: u64) -> bool {
    let k = ratios.len() as u32;
    let cap = QuadSurd::from_integer(qcap as i64);
    approx.qden <= qcap
        && scaled_errors(ratios, approx.qden, &approx.pnums)
            .into_iter()
            .all(|e| e.pow(k) * cap.clone() <= QuadSurd::one())
}

/// `|x - p/q| <= q^{-1-1/k}`  <=>  `|q x - p|^k q <= 1`.
pub fn satisfies_sequence_bound(ratios: &[QuadSurd], approx: &RationalApprox) -> bool {
    let k = ratios.len() as u32;
    let q = QuadSurd::from_integer(approx.qden as i64);
    scaled_errors(ratios, approx.qden, &approx.pnums)
        .into_iter()
        .all(|e| e.pow(k) * q.clone() <= QuadSurd::one())
}

fn exact_ratios(ratios: &[f64]) -> Result<Vec<QuadSurd>> {
    ratios
        .iter()
        .map(|&r| {
            QuadSurd::from_f64(r).ok_or_else(|| Error::InvalidArgument(format!("non-finite ratio {r}")))
        })
        .collect()
}

/// Smallest `q` in `2..=qcap` (falling back to `q = 1`) meeting the capped
/// Dirichlet bound, with `p_j` the nearest integers to `q x_j`.
pub fn dirichlet_capped(ratios: &[QuadSurd], qcap: u64) -> Result<RationalApprox> {
    if qcap < 2 {
        return Err(Error::InvalidArgument(format!("Qcap must be at least 2, got {qcap}")));
    }
    if ratios.is_empty() {
        return Err(Error::InvalidArgument("no ratios to approximate".into()));
    }
    for qden in (2..=qcap).chain(std::iter::once(1)) {
        let approx = RationalApprox::build(ratios, qden)?;
        if satisfies_capped_bound(ratios, &approx, qcap) {
            return Ok(approx);
        }
    }
    Err(Error::Internal(format!(
        "no Dirichlet approximation with q <= {qcap} for {}",
        ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
    )))
}

pub fn dirichlet_capped_f64(ratios: &[f64], qcap: u64) -> Result<RationalApprox> {
    dirichlet_capped(&exact_ratios(ratios)?, qcap)
}

/// Successive solutions of the uncapped Dirichlet inequalities, in strictly
/// increasing `q`.
///
/// With a single ratio these are the continued-fraction convergent
/// denominators (then multiples of the last one once the expansion
/// terminates); with several ratios every `q` is scanned.
pub struct DirichletSolutions {
    ratios: Vec<QuadSurd>,
    scan_limit: u64,
    last_q: u64,
    mode: SearchMode,
}

enum SearchMode {
    Scan,
    ContinuedFraction {
        // remainder of the expansion, `None` once it has terminated
        tail: Option<QuadSurd>,
        prev: (BigInt, BigInt),
        cur: (BigInt, BigInt),
        // denominator of the terminated expansion
        period: Option<u64>,
    },
}

impl DirichletSolutions {
    pub fn new(ratios: Vec<QuadSurd>, scan_limit: u64) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidArgument("no ratios to approximate".into()));
        }
        let mode = if ratios.len() == 1 {
            let x = ratios[0].clone();
            let a0 = x.floor();
            let rest = x - QuadSurd::from_rational(BigRational::from_integer(a0.clone()));
            SearchMode::ContinuedFraction {
                tail: (!rest.is_zero()).then(|| rest.recip()),
                prev: (BigInt::one(), BigInt::zero()),
                cur: (a0, BigInt::one()),
                period: None,
            }
        } else {
            SearchMode::Scan
        };
        Ok(Self {
            ratios,
            scan_limit,
            last_q: 1,
            mode,
        })
    }

    fn next_denominator(&mut self) -> Result<Option<u64>> {
        let limit = self.scan_limit;
        let last = self.last_q;
        match &mut self.mode {
            SearchMode::Scan => Ok(Some(last + 1).filter(|&q| q <= limit)),
            SearchMode::ContinuedFraction {
                tail,
                prev,
                cur,
                period,
            } => loop {
                if let Some(step) = *period {
                    let q = (last / step + 1) * step;
                    return Ok(Some(q).filter(|&q| q <= limit));
                }
                let q = cur.1.to_u64().filter(|&q| q <= limit);
                let Some(q) = q else { return Ok(None) };
                // advance the expansion for the following call
                match tail.take() {
                    Some(x) => {
                        let a = x.floor();
                        let next = (
                            &a * &cur.0 + &prev.0,
                            &a * &cur.1 + &prev.1,
                        );
                        *prev = std::mem::replace(cur, next);
                        let rest = x - QuadSurd::from_rational(BigRational::from_integer(a));
                        *tail = (!rest.is_zero()).then(|| rest.recip());
                    }
                    None => *period = Some(q),
                }
                if q > last {
                    return Ok(Some(q));
                }
            },
        }
    }
}

impl Iterator for DirichletSolutions {
    type Item = Result<RationalApprox>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let q = match self.next_denominator() {
                Ok(Some(q)) => q,
                Ok(None) => {
                    return Some(Err(Error::SearchBudgetExceeded {
                        scanned: self.scan_limit,
                    }))
                }
                Err(e) => return Some(Err(e)),
            };
            self.last_q = q;
            let approx = match RationalApprox::build(&self.ratios, q) {
                Ok(a) => a,
                Err(e) => return Some(Err(e)),
            };
            if satisfies_sequence_bound(&self.ratios, &approx) {
                return Some(Ok(approx));
            }
            if matches!(self.mode, SearchMode::ContinuedFraction { .. }) {
                return Some(Err(Error::Internal(format!(
                    "convergent denominator {q} violates the Dirichlet bound"
                ))));
            }
        }
    }
}

/// The first `count` solutions of the uncapped Dirichlet inequalities.
pub fn dirichlet_sequence(ratios: &[QuadSurd], count: usize, scan_limit: u64) -> Result<Vec<RationalApprox>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    DirichletSolutions::new(ratios.to_vec(), scan_limit)?
        .take(count)
        .collect()
}

pub fn dirichlet_sequence_f64(ratios: &[f64], count: usize, scan_limit: u64) -> Result<Vec<RationalApprox>> {
    dirichlet_sequence(&exact_ratios(ratios)?, count, scan_limit)
}

/// Every `q` in `2..=max_q` meeting the uncapped bound, by exhaustive scan.
pub fn dirichlet_scan(ratios: &[QuadSurd], max_q: u64) -> Result<Vec<RationalApprox>> {
    let mut out = Vec::new();
    for q in 2..=max_q {
        let a = RationalApprox::build(ratios, q)?;
        if satisfies_sequence_bound(ratios, &a) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Completely resonant frequencies obtained from the capped approximation
/// of `omega_j / omega_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantOmega {
    pub omega_tilde: Vec<f64>,
    /// `(omega_j^2 - omega_tilde_j^2) / 2`, the coefficients of `h_1(q)`.
    pub h1_coeffs: Vec<f64>,
    pub approx: RationalApprox,
    /// Frequency `omega_1 / q` of the periodic flow of `h_omega_tilde`.
    pub flow_frequency: f64,
}

pub fn build_resonant_omega(freq: &FrequencyVector, qcap: u64) -> Result<ResonantOmega> {
    let omega = freq.omega();
    let w1 = omega[0];
    if freq.n() == 1 {
        return Ok(ResonantOmega {
            omega_tilde: vec![w1],
            h1_coeffs: vec![0.0],
            approx: RationalApprox {
                qden: 1,
                pnums: vec![],
                errors: vec![],
            },
            flow_frequency: w1,
        });
    }
    let approx = dirichlet_capped(&freq.nu_exact()[1..], qcap)?;
    let q = approx.qden as f64;
    let mut omega_tilde = vec![w1];
    omega_tilde.extend(approx.pnums.iter().map(|&p| w1 * p as f64 / q));
    let h1_coeffs = omega
        .iter()
        .zip(&omega_tilde)
        .map(|(w, wt)| 0.5 * (w * w - wt * wt))
        .collect();
    Ok(ResonantOmega {
        omega_tilde,
        h1_coeffs,
        flow_frequency: w1 / q,
        approx,
    })
}

/// `(nu, nu_tilde, alpha, N)` such that `|nu_tilde - nu| <= alpha/N` and
/// every integer `k` with `|k|_1 <= N` has `nu_tilde . k = 0` or
/// `|nu . k| > alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceModel {
    pub nu: Vec<QuadSurd>,
    pub nu_tilde: Vec<BigRational>,
    pub alpha: BigRational,
    pub order: usize,
    pub qden: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceOptions {
    pub alpha_constant: u32,
    pub scan_limit: u64,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self {
            alpha_constant: DEFAULT_ALPHA_CONSTANT,
            scan_limit: DEFAULT_SCAN_LIMIT,
        }
    }
}

fn big(k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Rational `alpha >= order / q^{1 + 1/k}`, exact when `k == 1`.
fn alpha_upper(order: usize, qden: u64, k: u32) -> BigRational {
    let n = big(order as u64);
    let q = big(qden);
    if k == 1 {
        return n / (&q * &q);
    }
    // alpha^k >= N^k / q^{k+1}
    let target = num_traits::pow(n.clone(), k as usize) / num_traits::pow(q, k as usize + 1);
    let approx = order as f64 / (qden as f64).powf(1.0 + 1.0 / f64::from(k));
    let mut guess = approx * (1.0 + 1e-12);
    loop {
        let a = rational_from_f64(guess).expect("finite alpha");
        if num_traits::pow(a.clone(), k as usize) >= target {
            return a;
        }
        guess *= 1.0 + 1e-9;
    }
}

/// Enumerates all `k in Z^n` with `|k|_1 <= bound`.
pub fn integer_vectors(n: usize, bound: usize, mut f: impl FnMut(&[i64])) {
    fn rec(k: &mut Vec<i64>, pos: usize, left: usize, f: &mut dyn FnMut(&[i64])) {
        if pos == k.len() {
            f(k);
            return;
        }
        for v in -(left as i64)..=(left as i64) {
            k[pos] = v;
            rec(k, pos + 1, left - v.unsigned_abs() as usize, f);
        }
        k[pos] = 0;
    }
    let mut k = vec![0i64; n];
    rec(&mut k, 0, bound, &mut f);
}

fn dot_surd(nu: &[QuadSurd], k: &[i64]) -> QuadSurd {
    nu.iter()
        .zip(k)
        .filter(|(_, &c)| c != 0)
        .fold(QuadSurd::zero(), |acc, (v, &c)| acc + v.clone() * QuadSurd::from_integer(c))
}

fn dot_rational(nu: &[BigRational], k: &[i64]) -> BigRational {
    nu.iter()
        .zip(k)
        .fold(BigRational::zero(), |acc, (v, &c)| acc + v * BigRational::from_integer(BigInt::from(c)))
}

impl ResonanceModel {
    pub fn n(&self) -> usize {
        self.nu.len()
    }

    pub fn alpha_surd(&self) -> QuadSurd {
        QuadSurd::from_rational(self.alpha.clone())
    }

    pub fn nu_tilde_surd(&self) -> Vec<QuadSurd> {
        self.nu_tilde.iter().cloned().map(QuadSurd::from_rational).collect()
    }

    pub fn alpha_f64(&self) -> f64 {
        rational_to_f64(&self.alpha)
    }

    /// `sup_j |nu_tilde_j - nu_j|` as a float.
    pub fn max_frequency_shift(&self) -> f64 {
        self.nu
            .iter()
            .zip(self.nu_tilde_surd())
            .map(|(v, vt)| (vt - v.clone()).abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// Exhaustive check of both invariants. Returns the first violation.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let alpha = self.alpha_surd();
        let shift_bound = QuadSurd::from_rational(&self.alpha / big(self.order as u64));
        for (j, (v, vt)) in self.nu.iter().zip(self.nu_tilde_surd()).enumerate() {
            if (vt - v.clone()).abs() > shift_bound {
                return Err(format!("|nu_tilde_{j} - nu_{j}| exceeds alpha/N"));
            }
        }
        let mut failure = None;
        integer_vectors(self.n(), self.order, |k| {
            if failure.is_some() {
                return;
            }
            if dot_rational(&self.nu_tilde, k).is_zero() {
                return;
            }
            if dot_surd(&self.nu, k).abs() <= alpha {
                failure = Some(format!("k = {k:?}: nu_tilde . k != 0 but |nu . k| <= alpha"));
            }
        });
        failure.map_or(Ok(()), Err)
    }

    /// Does `h_nu_tilde` commute with `xi^l eta^m`, i.e. `nu_tilde . (l - m) == 0`?
    pub fn commutes(&self, l: &[u32], m: &[u32]) -> bool {
        let k: Vec<i64> = l.iter().zip(m).map(|(&a, &b)| i64::from(a) - i64::from(b)).collect();
        dot_rational(&self.nu_tilde, &k).is_zero()
    }
}

/// Builds the resonance model for `nu` (with `nu[0] == 1`), monomial size
/// bound `order` and drift budget `budget`.
///
/// Scans Dirichlet solutions `q` until `alpha_q = N / q^{1+1/(n-1)}`
/// satisfies `alpha_q <= 1 / (2^n N^{n-1})` and `alpha_q <= b N / C`, then
/// verifies the invariants exhaustively. A candidate that fails
/// verification is skipped.
pub fn build_resonance_model(
    nu: &[QuadSurd],
    order: usize,
    budget: f64,
    opts: &ResonanceOptions,
) -> Result<ResonanceModel> {
    if order == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidArgument(format!("b must be positive, got {budget}")));
    }
    if nu.is_empty() || nu[0] != QuadSurd::one() {
        return Err(Error::InvalidArgument("nu must start with nu_1 = 1".into()));
    }
    let n = nu.len();
    let b = rational_from_f64(budget).expect("finite budget");
    let budget_cap = b * big(order as u64) / big(u64::from(opts.alpha_constant));
    let smallness = BigRational::one()
        / (big(1u64 << n.min(63)) * num_traits::pow(big(order as u64), n - 1));

    if n == 1 {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let model = ResonanceModel {
            nu: nu.to_vec(),
            nu_tilde: vec![BigRational::one()],
            alpha: if budget_cap < half { budget_cap } else { half },
            order,
            qden: 1,
        };
        model.verify().map_err(Error::Internal)?;
        return Ok(model);
    }

    let k = (n - 1) as u32;
    for sol in DirichletSolutions::new(nu[1..].to_vec(), opts.scan_limit)? {
        let sol = sol?;
        let alpha = alpha_upper(order, sol.qden, k);
        if alpha > smallness || alpha > budget_cap {
            continue;
        }
        let mut nu_tilde = vec![BigRational::one()];
        nu_tilde.extend(sol.approximants());
        let model = ResonanceModel {
            nu: nu.to_vec(),
            nu_tilde,
            alpha,
            order,
            qden: sol.qden,
        };
        if model.verify().is_ok() {
            return Ok(model);
        }
    }
    unreachable!("the Dirichlet iterator ends with an error, never with None")
}

/// `|nu . (l - m)| <= alpha`, decided exactly.
pub fn is_alpha_resonant(l: &[u32], m: &[u32], nu: &[QuadSurd], alpha: &QuadSurd) -> bool {
    let k: Vec<i64> = l.iter().zip(m).map(|(&a, &b)| i64::from(a) - i64::from(b)).collect();
    dot_surd(nu, &k).abs() <= *alpha
}

/// Float convenience; each float is taken as the exact rational it stores.
pub fn is_alpha_resonant_f64(l: &[u32], m: &[u32], nu: &[f64], alpha: f64) -> bool {
    let nu: Vec<QuadSurd> = nu.iter().map(|&v| QuadSurd::from_f64(v).expect("finite nu")).collect();
    is_alpha_resonant(l, m, &nu, &QuadSurd::from_f64(alpha).expect("finite alpha"))
}

impl fmt::Display for ResonanceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nt: Vec<String> = self.nu_tilde_surd().iter().map(|v| v.to_string()).collect();
        write!(
            f,
            "qden={} nu_tilde={} alpha={} N={}",
            self.qden,
            nt.join(","),
            QuadSurd::from_rational(self.alpha.clone()),
            self.order
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> QuadSurd {
        x.parse().unwrap()
    }

    #[test]
    fn capped_exact_rational() {
        let a = dirichlet_capped(&[s("3/2")], 2).unwrap();
        assert_eq!((a.qden, a.pnums.clone()), (2, vec![3]));
        assert_eq!(a.errors, vec![0.0]);
    }

    #[test]
    fn capped_sqrt2_and_golden() {
        let a = dirichlet_capped(&[s("sqrt(2)")], 10).unwrap();
        assert_eq!((a.qden, a.pnums.clone()), (5, vec![7]));
        assert!((a.errors[0] - 0.014213562373095).abs() < 1e-12);
        let g = dirichlet_capped_f64(&[1.618_034_0], 8).unwrap();
        assert_eq!((g.qden, g.pnums), (5, vec![8]));
        assert!(dirichlet_capped(&[s("sqrt(2)")], 1).is_err());
    }

    #[test]
    fn sequence_examples() {
        let half = dirichlet_sequence(&[s("1/2")], 3, 1000).unwrap();
        assert_eq!(half.iter().map(|a| a.qden).collect::<Vec<_>>(), vec![2, 4, 6]);
        assert!(half.iter().all(|a| a.errors[0] == 0.0));

        let r2 = dirichlet_sequence(&[s("sqrt(2)")], 4, 1000).unwrap();
        assert_eq!(r2.iter().map(|a| a.qden).collect::<Vec<_>>(), vec![2, 5, 12, 29]);

        let golden = dirichlet_sequence(&[s("1/2+1/2*sqrt(5)")], 5, 1000).unwrap();
        assert_eq!(golden.iter().map(|a| a.qden).collect::<Vec<_>>(), vec![2, 3, 5, 8, 13]);
    }

    #[test]
    fn continued_fraction_path_agrees_with_scan() {
        for x in ["sqrt(2)", "1/2+1/2*sqrt(5)", "sqrt(3)", "0.3183098861837907"] {
            let r = [s(x)];
            let fast = dirichlet_sequence(&r, 4, 1_000).unwrap();
            let max_q = fast.last().unwrap().qden;
            let scan = dirichlet_scan(&r, max_q).unwrap();
            for a in &fast {
                assert!(scan.contains(a), "{x}: convergent {} missing from scan", a.qden);
            }
        }
    }

    #[test]
    fn sequence_budget_error() {
        let err = dirichlet_sequence(&[s("sqrt(2)"), s("sqrt(3)")], 50, 10).unwrap_err();
        assert!(matches!(err, Error::Internal(_) | Error::SearchBudgetExceeded { .. }));
        let err = dirichlet_sequence(&[s("sqrt(2)")], 30, 100).unwrap_err();
        assert!(matches!(err, Error::SearchBudgetExceeded { .. }));
    }

    #[test]
    fn resonant_omega_examples() {
        let f = FrequencyVector::new(vec![10.0, 15.0]).unwrap();
        let r = build_resonant_omega(&f, 2).unwrap();
        assert_eq!(r.omega_tilde, vec![10.0, 15.0]);
        assert_eq!(r.h1_coeffs, vec![0.0, 0.0]);

        let f = FrequencyVector::from_exact(vec![s("10"), s("10*sqrt(2)")]).unwrap();
        let r = build_resonant_omega(&f, 10).unwrap();
        assert_eq!(r.omega_tilde, vec![10.0, 14.0]);
        assert!((r.h1_coeffs[1] - 2.0).abs() < 1e-12);
        assert!((r.flow_frequency - 2.0).abs() < 1e-15);
    }

    #[test]
    fn resonance_model_sqrt2() {
        let nu = [QuadSurd::one(), s("sqrt(2)")];
        let m = build_resonance_model(&nu, 4, 100.0, &ResonanceOptions::default()).unwrap();
        assert_eq!(m.qden, 12);
        assert_eq!(m.nu_tilde[1], BigRational::new(17.into(), 12.into()));
        assert_eq!(m.alpha, BigRational::new(1.into(), 36.into()));
        assert!((m.max_frequency_shift() - 0.002453).abs() < 1e-6);
        assert!(m.max_frequency_shift() <= m.alpha_f64() / 4.0);
        m.verify().unwrap();
    }

    #[test]
    fn resonance_model_rational_frequencies() {
        let nu = [QuadSurd::one(), s("3/2")];
        for order in 1..6 {
            let m = build_resonance_model(&nu, order, 0.5, &ResonanceOptions::default()).unwrap();
            assert_eq!(m.nu_tilde[1], BigRational::new(3.into(), 2.into()));
            assert_eq!(m.qden % 2, 0);
            assert_eq!(m.max_frequency_shift(), 0.0);
        }
    }

    #[test]
    fn resonance_model_budget_binds() {
        let nu = [QuadSurd::one(), s("sqrt(2)")];
        let m = build_resonance_model(&nu, 3, 0.1, &ResonanceOptions::default()).unwrap();
        // 3/144 > 0.3/21, so q = 12 is rejected and q = 29 is the first fit
        assert_eq!(m.qden, 29);
        assert!(m.alpha_f64() <= 0.1 * 3.0 / 21.0);
    }

    #[test]
    fn resonance_model_three_frequencies() {
        let nu = [QuadSurd::one(), s("sqrt(2)"), s("3/2")];
        let m = build_resonance_model(&nu, 3, 0.5, &ResonanceOptions::default()).unwrap();
        m.verify().unwrap();
        // alpha^2 >= N^2 / q^3
        let lhs = &m.alpha * &m.alpha * num_traits::pow(big(m.qden), 3);
        assert!(lhs >= big(9));
    }

    #[test]
    fn single_oscillator_model() {
        let m = build_resonance_model(&[QuadSurd::one()], 3, 0.1, &ResonanceOptions::default()).unwrap();
        assert_eq!(m.qden, 1);
        m.verify().unwrap();
    }

    #[test]
    fn resonance_classification() {
        let nu = [QuadSurd::one(), s("sqrt(2)")];
        let a = s("1/10");
        assert!(is_alpha_resonant(&[2, 1], &[2, 1], &nu, &a));
        assert!(!is_alpha_resonant(&[1, 0], &[0, 1], &nu, &a));
        assert!(is_alpha_resonant(&[0, 5], &[7, 0], &nu, &a));
        assert!(is_alpha_resonant_f64(&[0, 5], &[7, 0], &[1.0, 2f64.sqrt()], 0.1));
    }

    #[test]
    fn integer_vector_count() {
        // |k|_1 <= 2 in Z^2: 1 + 4 + 8 = 13
        let mut c = 0;
        integer_vectors(2, 2, |_| c += 1);
        assert_eq!(c, 13);
    }
}
