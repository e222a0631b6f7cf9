//! Exact graded polynomials in `(xi, eta, P, Q)` with explicit powers of
//! `sqrt(epsilon)`, and their Poisson brackets.
//!
//! # Variables
//!
//! The fast variables stored here are the rescaled complex coordinates
//! `x_j = xi_j / sqrt(2 nu_j)`, `y_j = eta_j / sqrt(2 nu_j)`. In them the fast
//! positions are `q_j = i sqrt(epsilon) (x_j - y_j)`, so expanding a rational
//! potential never leaves the field of the frequencies. The price is a
//! per-pair bracket constant `{x_j, y_j} = kappa_j = i / (2 nu_j)`;
//! `h_nu = sum_j nu_j xi_j eta_j` becomes `sum_j 2 nu_j^2 x_j y_j`. Monomial
//! exponents `l`, `m` are the same in both coordinate systems.
//!
//! # Grading
//!
//! A monomial `c sqrt(eps)^e x^l y^m P^u Q^v` stores the full power `e` of
//! `sqrt(epsilon)`. With `a = e - 2` its order is `a + |l| + |m|`; terms
//! coming from `epsilon H_0` satisfy `a >= |l| + |m|`. `h_nu` itself has
//! `e = 0` and order 0.
//!
//! # Bracket
//!
//! `{f, g} = sum_j kappa_j (f_x g_y - f_y g_x) + sum_k (f_P g_Q - f_Q g_P)`,
//! i.e. `{P, Q} = 1` and `d/dt F = {H, F}` along the flow of `H`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, ParseError, Result};
use crate::model::SlowHamiltonian;
use crate::number::{Coeff, QuadSurd};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    /// Full exponent of `sqrt(epsilon)`.
    pub sqrt_eps: u32,
    pub l: Vec<u32>,
    pub m: Vec<u32>,
    pub u: Vec<u32>,
    pub v: Vec<u32>,
}

impl MonomialKey {
    pub fn constant(n: usize, d: usize) -> Self {
        Self {
            sqrt_eps: 0,
            l: vec![0; n],
            m: vec![0; n],
            u: vec![0; d],
            v: vec![0; d],
        }
    }

    /// `|l| + |m|`.
    pub fn fast_degree(&self) -> u32 {
        self.l.iter().sum::<u32>() + self.m.iter().sum::<u32>()
    }

    /// The `a` index: `sqrt(eps)^(a + 2)`.
    pub fn a(&self) -> i64 {
        i64::from(self.sqrt_eps) - 2
    }

    pub fn order(&self) -> i64 {
        self.a() + i64::from(self.fast_degree())
    }

    /// `a >= |l| + |m|`.
    pub fn satisfies_index_constraint(&self) -> bool {
        self.a() >= i64::from(self.fast_degree())
    }

    /// `l - m`.
    pub fn fast_shift(&self) -> Vec<i64> {
        self.l
            .iter()
            .zip(&self.m)
            .map(|(&a, &b)| i64::from(a) - i64::from(b))
            .collect()
    }

    fn product(&self, other: &Self) -> Self {
        let add = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Self {
            sqrt_eps: self.sqrt_eps + other.sqrt_eps,
            l: add(&self.l, &other.l),
            m: add(&self.m, &other.m),
            u: add(&self.u, &other.u),
            v: add(&self.v, &other.v),
        }
    }
}

/// A coordinate to differentiate by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X(usize),
    Y(usize),
    SlowP(usize),
    SlowQ(usize),
}

/// Sparse polynomial in canonical form: keys unique, no stored zeros,
/// iteration in lexicographic `(sqrt_eps, l, m, u, v)` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPolynomial {
    n: usize,
    d: usize,
    terms: BTreeMap<MonomialKey, Coeff>,
}

fn accumulate(terms: &mut BTreeMap<MonomialKey, Coeff>, key: MonomialKey, c: Coeff) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl GradedPolynomial {
    pub fn zero(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: usize, d: usize, key: MonomialKey, c: Coeff) -> Self {
        let mut p = Self::zero(n, d);
        p.add_term(key, c);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MonomialKey, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &MonomialKey) -> Option<&Coeff> {
        self.terms.get(key)
    }

    /// Adds `c * key`, keeping the canonical form.
    pub fn add_term(&mut self, key: MonomialKey, c: Coeff) {
        assert!(
            key.l.len() == self.n && key.m.len() == self.n && key.u.len() == self.d && key.v.len() == self.d,
            "monomial dimensions do not match the polynomial"
        );
        accumulate(&mut self.terms, key, c);
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dims(other).expect("polynomial dimensions");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            accumulate(&mut out.terms, k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        self.map_coeffs(|c| c * s)
    }

    fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> Self {
        let mut out = Self::zero(self.n, self.d);
        for (k, c) in &self.terms {
            accumulate(&mut out.terms, k.clone(), f(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_dims(other).expect("polynomial dimensions");
        let mut out = Self::zero(self.n, self.d);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                accumulate(&mut out.terms, k1.product(k2), c1 * c2);
            }
        }
        out
    }

    /// The homogeneous component of order `s`.
    pub fn project(&self, s: i64) -> Self {
        self.filter(|k| k.order() == s)
    }

    /// All terms of order at most `max_order`.
    pub fn truncate(&self, max_order: i64) -> Self {
        self.filter(|k| k.order() <= max_order)
    }

    pub fn filter(&self, keep: impl Fn(&MonomialKey) -> bool) -> Self {
        Self {
            n: self.n,
            d: self.d,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Orders present, ascending.
    pub fn orders(&self) -> BTreeSet<i64> {
        self.terms.keys().map(MonomialKey::order).collect()
    }

    pub fn min_order(&self) -> Option<i64> {
        self.terms.keys().map(MonomialKey::order).min()
    }

    pub fn max_order(&self) -> Option<i64> {
        self.terms.keys().map(MonomialKey::order).max()
    }

    pub fn is_homogeneous(&self, s: i64) -> bool {
        self.terms.keys().all(|k| k.order() == s)
    }

    pub fn has_even_parity(&self) -> bool {
        self.terms.keys().all(|k| k.order().rem_euclid(2) == 0)
    }

    /// Monomials violating `a >= |l| + |m|`, ignoring the `sqrt_eps = 0`
    /// terms that make up `h_nu`.
    pub fn index_violations(&self) -> Vec<MonomialKey> {
        self.terms
            .keys()
            .filter(|k| k.sqrt_eps > 0 && !k.satisfies_index_constraint())
            .cloned()
            .collect()
    }

    /// Largest coefficient modulus.
    pub fn max_coeff_magnitude(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn derivative(&self, var: Var) -> Self {
        let mut out = Self::zero(self.n, self.d);
        for (k, c) in &self.terms {
            let mut key = k.clone();
            let slot = match var {
                Var::X(j) => &mut key.l[j],
                Var::Y(j) => &mut key.m[j],
                Var::SlowP(j) => &mut key.u[j],
                Var::SlowQ(j) => &mut key.v[j],
            };
            if *slot == 0 {
                continue;
            }
            let e = *slot;
            *slot -= 1;
            accumulate(&mut out.terms, key, c.scale(&QuadSurd::from_integer(i64::from(e))));
        }
        out
    }

    pub fn evaluate(&self, point: &PhasePoint) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let mut v = c.to_complex() * point.sqrt_eps.powi(k.sqrt_eps as i32);
                for j in 0..self.n {
                    v *= point.x[j].powu(k.l[j]) * point.y[j].powu(k.m[j]);
                }
                for j in 0..self.d {
                    v *= point.slow_p[j].powu(k.u[j]) * point.slow_q[j].powu(k.v[j]);
                }
                v
            })
            .sum()
    }

    /// Text form: a header line, then one monomial per line as
    /// `coeff e l_1..l_n m_1..m_n u_1..u_d v_1..v_d` in key order, where `e`
    /// is the full `sqrt(epsilon)` exponent.
    pub fn to_text(&self) -> String {
        let mut s = format!("# graded-polynomial n={} d={}\n", self.n, self.d);
        for (k, c) in &self.terms {
            s.push_str(&c.to_string());
            s.push(' ');
            s.push_str(&k.sqrt_eps.to_string());
            for e in k.l.iter().chain(&k.m).chain(&k.u).chain(&k.v) {
                s.push(' ');
                s.push_str(&e.to_string());
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for GradedPolynomial {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ParseError::PolynomialLine {
            line: 1,
            reason: "missing header".into(),
        })?;
        let bad_header = || ParseError::PolynomialLine {
            line: 1,
            reason: format!("bad header `{header}`"),
        };
        let mut n = None;
        let mut d = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("d=") {
                d = v.parse::<usize>().ok();
            }
        }
        let (n, d) = (n.ok_or_else(bad_header)?, d.ok_or_else(bad_header)?);
        let mut poly = GradedPolynomial::zero(n, d);
        for (idx, line) in lines {
            let bad = |reason: &str| ParseError::PolynomialLine {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let mut toks = line.split_whitespace();
            let c: Coeff = toks.next().ok_or_else(|| bad("empty"))?.parse()?;
            let nums = toks
                .map(|t| t.parse::<u32>().map_err(|_| bad("bad exponent")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if nums.len() != 1 + 2 * n + 2 * d {
                return Err(bad("wrong number of exponents"));
            }
            let key = MonomialKey {
                sqrt_eps: nums[0],
                l: nums[1..1 + n].to_vec(),
                m: nums[1 + n..1 + 2 * n].to_vec(),
                u: nums[1 + 2 * n..1 + 2 * n + d].to_vec(),
                v: nums[1 + 2 * n + d..].to_vec(),
            };
            poly.add_term(key, c);
        }
        Ok(poly)
    }
}

/// A numeric point in the algebra's coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub slow_p: Vec<Complex64>,
    pub slow_q: Vec<Complex64>,
    pub sqrt_eps: f64,
}

/// `{xi_j, eta_j} = i` in the unscaled complex coordinates.
pub fn bracket_constant() -> Coeff {
    Coeff::i()
}

/// Bracket structure for one fixed frequency vector `nu`, which determines
/// the variable rescaling.
#[derive(Clone, Debug)]
pub struct PoissonAlgebra {
    n: usize,
    d: usize,
    nu: Vec<QuadSurd>,
    kappa: Vec<Coeff>,
}

impl PoissonAlgebra {
    pub fn new(nu: Vec<QuadSurd>, d: usize) -> Self {
        let kappa = nu
            .iter()
            .map(|v| bracket_constant().div_real(&(v.clone() * QuadSurd::from_integer(2))))
            .collect();
        Self {
            n: nu.len(),
            d,
            nu,
            kappa,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn nu(&self) -> &[QuadSurd] {
        &self.nu
    }

    /// `{x_j, y_j}`.
    pub fn kappa(&self, j: usize) -> &Coeff {
        &self.kappa[j]
    }

    pub fn zero(&self) -> GradedPolynomial {
        GradedPolynomial::zero(self.n, self.d)
    }

    pub fn key(&self) -> MonomialKey {
        MonomialKey::constant(self.n, self.d)
    }

    pub fn poisson_bracket(&self, f: &GradedPolynomial, g: &GradedPolynomial) -> Result<GradedPolynomial> {
        self.bracket_truncated(f, g, i64::MAX)
    }

    /// `{f, g}` with every term of order above `max_order` dropped.
    pub fn bracket_truncated(
        &self,
        f: &GradedPolynomial,
        g: &GradedPolynomial,
        max_order: i64,
    ) -> Result<GradedPolynomial> {
        for p in [f, g] {
            if p.n != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: p.n });
            }
            if p.d != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: p.d });
            }
        }
        let mut out = self.zero();
        for (k1, c1) in &f.terms {
            let o1 = k1.order();
            for (k2, c2) in &g.terms {
                let base_order = o1 + k2.order();
                if base_order > max_order {
                    continue;
                }
                let mut prod: Option<(MonomialKey, Coeff)> = None;
                let mut get = || prod.get_or_insert_with(|| (k1.product(k2), c1 * c2)).clone();

                for j in 0..self.n {
                    let w = i64::from(k1.l[j]) * i64::from(k2.m[j]) - i64::from(k1.m[j]) * i64::from(k2.l[j]);
                    if w == 0 {
                        continue;
                    }
                    let (mut key, c) = get();
                    key.l[j] -= 1;
                    key.m[j] -= 1;
                    let c = (c * self.kappa[j].clone()).scale(&QuadSurd::from_integer(w));
                    accumulate(&mut out.terms, key, c);
                }
                if base_order + 2 > max_order {
                    continue;
                }
                for s in 0..self.d {
                    let w = i64::from(k1.u[s]) * i64::from(k2.v[s]) - i64::from(k1.v[s]) * i64::from(k2.u[s]);
                    if w == 0 {
                        continue;
                    }
                    let (mut key, c) = get();
                    key.u[s] -= 1;
                    key.v[s] -= 1;
                    accumulate(&mut out.terms, key, c.scale(&QuadSurd::from_integer(w)));
                }
            }
        }
        Ok(out)
    }

    /// `i nu' . (m - l)`, the eigenvalue of `{h_nu', .}` on `x^l y^m`.
    pub fn hnu_eigenvalue(&self, key: &MonomialKey, nu_prime: &[QuadSurd]) -> Coeff {
        let s = key
            .fast_shift()
            .iter()
            .zip(nu_prime)
            .filter(|(&k, _)| k != 0)
            .fold(QuadSurd::zero(), |acc, (&k, v)| acc - v.clone() * QuadSurd::from_integer(k));
        bracket_constant().scale(&s)
    }

    /// `{h_nu', g}` via the diagonal action; order preserving.
    pub fn bracket_with_hnu(&self, g: &GradedPolynomial, nu_prime: &[QuadSurd]) -> GradedPolynomial {
        assert_eq!(nu_prime.len(), self.n, "frequency vector length");
        let mut out = self.zero();
        for (k, c) in &g.terms {
            accumulate(&mut out.terms, k.clone(), c * &self.hnu_eigenvalue(k, nu_prime));
        }
        out
    }

    /// `h_nu' = sum_j nu'_j xi_j eta_j = sum_j 2 nu_j nu'_j x_j y_j`.
    pub fn h_nu(&self, nu_prime: &[QuadSurd]) -> GradedPolynomial {
        assert_eq!(nu_prime.len(), self.n, "frequency vector length");
        let mut out = self.zero();
        for j in 0..self.n {
            let mut key = self.key();
            key.l[j] = 1;
            key.m[j] = 1;
            let c = self.nu[j].clone() * nu_prime[j].clone() * QuadSurd::from_integer(2);
            out.add_term(key, Coeff::real(c));
        }
        out
    }

    /// `epsilon H_0` expanded in the fast variables: `f_s` collects the
    /// terms of fast degree `s` (order `2s`), `s = 0..=max_degree`; higher
    /// degrees go to the remainder. The expansion is exact.
    pub fn taylor_expand_h0(&self, spec: &SlowHamiltonian, max_degree: usize) -> Result<TaylorExpansion> {
        if spec.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: spec.n() });
        }
        if spec.d() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: spec.d() });
        }
        let mut all = self.zero();
        // epsilon * P_k^2 / 2
        for k in 0..self.d {
            let mut key = self.key();
            key.sqrt_eps = 2;
            key.u[k] = 2;
            all.add_term(key, Coeff::ratio(1, 2));
        }
        for term in spec.terms() {
            let degree: u32 = term.fast_exp.iter().sum();
            // epsilon * c * Q^v * prod_j (i sqrt(eps) (x_j - y_j))^{k_j}
            let base = Coeff::real(QuadSurd::from_rational(term.coeff.clone())) * Coeff::i_pow(degree);
            let mut partial: Vec<(Vec<u32>, Vec<u32>, BigInt)> =
                vec![(vec![0; self.n], vec![0; self.n], BigInt::one())];
            for (j, &kj) in term.fast_exp.iter().enumerate() {
                let mut next = Vec::new();
                for (l, m, c) in &partial {
                    for t in 0..=kj {
                        let mut l = l.clone();
                        let mut m = m.clone();
                        l[j] += kj - t;
                        m[j] += t;
                        let sign = if t % 2 == 0 { 1 } else { -1 };
                        next.push((l, m, c * binomial(kj, t) * sign));
                    }
                }
                partial = next;
            }
            for (l, m, c) in partial {
                let key = MonomialKey {
                    sqrt_eps: 2 + degree,
                    l,
                    m,
                    u: vec![0; self.d],
                    v: term.slow_exp.clone(),
                };
                let c = base.scale(&QuadSurd::from_rational(BigRational::from_integer(c)));
                all.add_term(key, c);
            }
        }
        let mut terms = Vec::with_capacity(max_degree + 1);
        for s in 0..=max_degree as u32 {
            terms.push(all.filter(|k| k.fast_degree() == s));
        }
        let remainder = all.filter(|k| k.fast_degree() as usize > max_degree);
        Ok(TaylorExpansion { terms, remainder })
    }

    /// Converts a physical fast state into the algebra's coordinates.
    pub fn phase_point(
        &self,
        xi: &[Complex64],
        eta: &[Complex64],
        slow_p: &[f64],
        slow_q: &[f64],
        epsilon: f64,
    ) -> PhasePoint {
        let scale: Vec<f64> = self.nu.iter().map(|v| (2.0 * v.to_f64()).sqrt()).collect();
        PhasePoint {
            x: xi.iter().zip(&scale).map(|(z, s)| z / s).collect(),
            y: eta.iter().zip(&scale).map(|(z, s)| z / s).collect(),
            slow_p: slow_p.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            slow_q: slow_q.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            sqrt_eps: epsilon.sqrt(),
        }
    }

    /// Right-hand side of the flow of `chi`: `dz/dt = {chi, z}` for each
    /// coordinate, evaluated at `point`. Returned as `(dx, dy, dP, dQ)`.
    #[allow(clippy::type_complexity)]
    pub fn flow_field(
        &self,
        chi_derivs: &FlowDerivatives,
        point: &PhasePoint,
    ) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let kappa: Vec<Complex64> = self.kappa.iter().map(Coeff::to_complex).collect();
        let dx = (0..self.n).map(|j| -kappa[j] * chi_derivs.dy[j].evaluate(point)).collect();
        let dy = (0..self.n).map(|j| kappa[j] * chi_derivs.dx[j].evaluate(point)).collect();
        let dp = (0..self.d).map(|k| -chi_derivs.dq[k].evaluate(point)).collect();
        let dq = (0..self.d).map(|k| chi_derivs.dp[k].evaluate(point)).collect();
        (dx, dy, dp, dq)
    }
}

/// Partial derivatives of a generating function, precomputed for flow
/// integration.
pub struct FlowDerivatives {
    pub dx: Vec<GradedPolynomial>,
    pub dy: Vec<GradedPolynomial>,
    pub dp: Vec<GradedPolynomial>,
    pub dq: Vec<GradedPolynomial>,
}

impl FlowDerivatives {
    pub fn new(chi: &GradedPolynomial) -> Self {
        Self {
            dx: (0..chi.n()).map(|j| chi.derivative(Var::X(j))).collect(),
            dy: (0..chi.n()).map(|j| chi.derivative(Var::Y(j))).collect(),
            dp: (0..chi.d()).map(|k| chi.derivative(Var::SlowP(k))).collect(),
            dq: (0..chi.d()).map(|k| chi.derivative(Var::SlowQ(k))).collect(),
        }
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `epsilon H_0 = sum_s f_s + remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorExpansion {
    pub terms: Vec<GradedPolynomial>,
    pub remainder: GradedPolynomial,
}

impl TaylorExpansion {
    pub fn total(&self) -> GradedPolynomial {
        self.terms
            .iter()
            .fold(self.remainder.clone(), |acc, f| acc.add(f))
    }
}

/// Random polynomial homogeneous of order `order` whose monomials satisfy
/// the index constraint. For tests and benchmarks.
pub fn random_homogeneous<R: Rng>(
    rng: &mut R,
    n: usize,
    d: usize,
    order: u32,
    n_terms: usize,
    radicand: Option<u32>,
) -> GradedPolynomial {
    let mut p = GradedPolynomial::zero(n, d);
    for _ in 0..n_terms {
        let degree = rng.random_range(0..=order / 2);
        let a = order - degree;
        let mut l = vec![0u32; n];
        let mut m = vec![0u32; n];
        for _ in 0..degree {
            let j = rng.random_range(0..n);
            if rng.random_bool(0.5) {
                l[j] += 1;
            } else {
                m[j] += 1;
            }
        }
        let key = MonomialKey {
            sqrt_eps: a + 2,
            l,
            m,
            u: (0..d).map(|_| rng.random_range(0..3)).collect(),
            v: (0..d).map(|_| rng.random_range(0..3)).collect(),
        };
        p.add_term(key, random_coeff(rng, radicand));
    }
    p
}

pub fn random_coeff<R: Rng>(rng: &mut R, radicand: Option<u32>) -> Coeff {
    let part = |rng: &mut R| {
        let r = QuadSurd::ratio(rng.random_range(-5..=5), rng.random_range(1..=4));
        match radicand {
            Some(k) if rng.random_bool(0.5) => {
                r + QuadSurd::new(
                    BigRational::zero(),
                    BigRational::new(rng.random_range(-3..=3).into(), 2.into()),
                    k,
                )
            }
            _ => r,
        }
    };
    let re = part(rng);
    let im = if rng.random_bool(0.5) { part(rng) } else { QuadSurd::zero() };
    let c = Coeff::new(re, im);
    if c.is_zero() {
        Coeff::one()
    } else {
        c
    }
}
