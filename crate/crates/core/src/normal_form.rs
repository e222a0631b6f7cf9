//! Resonant normal form by Lie transforms.
//!
//! The scaled Hamiltonian `h_nu + epsilon H_0` is pushed through `N` stages.
//! Stage `r + 1` removes the non-resonant part of the order `2(r + 1)`
//! component with a generator `chi` solving `{chi, h_nu} + g_NR = 0`, and
//! composes with the time-one flow of `chi`:
//! `F o phi_chi = F + {chi, F} + {chi, {chi, F}} / 2 + ...`.
//!
//! Everything is carried through order `2N + 2`, so the residual
//! `{h_nu_tilde, H o T}` is known exactly in its lowest surviving order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::diophantine::{is_alpha_resonant, ResonanceModel};
use crate::error::{Error, Result};
use crate::model::SlowHamiltonian;
use crate::number::{Coeff, QuadSurd};
use crate::poisson::{GradedPolynomial, MonomialKey, PoissonAlgebra};

/// Generator of one normalization stage.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    /// 1-based stage index.
    pub stage: usize,
    pub chi: GradedPolynomial,
}

impl Generator {
    pub fn order(&self) -> i64 {
        2 * self.stage as i64
    }

    /// Sum of coefficient moduli.
    pub fn norm(&self) -> f64 {
        self.chi.iter().map(|(_, c)| c.magnitude()).sum()
    }
}

/// Per-stage bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub order: i64,
    pub resonant_terms: usize,
    pub nonresonant_terms: usize,
    pub generator_norm: f64,
    pub max_input_coeff: f64,
    pub max_generator_coeff: f64,
}

/// Structural checks on the transformation itself.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformChecks {
    /// Min order of `h_nu_tilde o T - h_nu_tilde` (`None` if it vanishes).
    pub hnu_tilde_shift_min_order: Option<i64>,
    /// Min order of `epsilon H_0 o T - epsilon H_0`.
    pub h0_shift_min_order: Option<i64>,
}

impl TransformChecks {
    pub fn hold(&self) -> bool {
        self.hnu_tilde_shift_min_order.is_none_or(|o| o >= 1) && self.h0_shift_min_order.is_none_or(|o| o >= 3)
    }
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub algebra: PoissonAlgebra,
    pub resonance: ResonanceModel,
    pub target: usize,
    pub generators: Vec<Generator>,
    pub stages: Vec<StageReport>,
    /// `H o T` through order `2N + 2`.
    pub transformed: GradedPolynomial,
    /// `H o T` through order `2N`.
    pub normalized: GradedPolynomial,
    /// Min order of the residual bracket, `None` when it vanishes.
    pub residual_min_order: Option<i64>,
    pub checks: TransformChecks,
}

impl NormalFormResult {
    /// Highest order carried.
    pub fn carried_order(&self) -> i64 {
        2 * self.target as i64 + 2
    }

    /// Product of `(1 + |chi_r|)` over the stages, a single summary of how
    /// far the transformation moves points.
    pub fn generator_norm_product(&self) -> f64 {
        self.generators.iter().map(|g| 1.0 + g.norm()).product()
    }

    /// Serialized form: the normalized Hamiltonian followed by each
    /// generator, each block in the polynomial text format.
    pub fn to_text(&self) -> String {
        let mut s = String::from("[normalized]\n");
        s.push_str(&self.normalized.to_text());
        for g in &self.generators {
            s.push_str(&format!("[generator {}]\n", g.stage));
            s.push_str(&g.chi.to_text());
        }
        s
    }
}

/// Splits `g` into its alpha-resonant part and the generator cancelling the
/// rest: `{chi, h_nu} + (g - resonant) = 0`.
pub fn solve_homological(
    algebra: &PoissonAlgebra,
    g: &GradedPolynomial,
    model: &ResonanceModel,
    stage: usize,
) -> Result<(Generator, GradedPolynomial)> {
    if model.alpha <= num_rational::BigRational::from_integer(0.into()) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    if g.n() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: g.n(),
        });
    }
    let alpha = model.alpha_surd();
    let terms: Vec<(&MonomialKey, &Coeff)> = g.iter().collect();
    // Each monomial is classified and divided independently.
    let split: Vec<(MonomialKey, Coeff, bool)> = terms
        .par_iter()
        .map(|(k, c)| {
            if is_alpha_resonant(&k.l, &k.m, &model.nu, &alpha) {
                ((*k).clone(), (*c).clone(), true)
            } else {
                let denom = k
                    .fast_shift()
                    .iter()
                    .zip(&model.nu)
                    .filter(|(&s, _)| s != 0)
                    .fold(QuadSurd::zero(), |acc, (&s, v)| acc + v.clone() * QuadSurd::from_integer(s));
                // {x^l y^m, h_nu} = i nu.(l - m) x^l y^m, so chi = i g / nu.(l - m)
                let chi = c.mul_i().div_real(&denom);
                ((*k).clone(), chi, false)
            }
        })
        .collect();
    let mut chi = algebra.zero();
    let mut resonant = algebra.zero();
    for (k, c, is_res) in split {
        if is_res {
            resonant.add_term(k, c);
        } else {
            chi.add_term(k, c);
        }
    }
    Ok((Generator { stage, chi }, resonant))
}

/// `sum_k ad_chi^k F / k!` through `max_order`.
pub fn lie_transform(
    algebra: &PoissonAlgebra,
    f: &GradedPolynomial,
    chi: &GradedPolynomial,
    max_order: i64,
) -> Result<GradedPolynomial> {
    if chi.is_zero() {
        return Ok(f.truncate(max_order));
    }
    if chi.min_order().is_some_and(|o| o < 2) {
        return Err(Error::InvalidArgument("generator order must be at least 2".into()));
    }
    let mut out = f.truncate(max_order);
    let mut term = out.clone();
    let mut k = 1i64;
    while !term.is_zero() {
        term = algebra
            .bracket_truncated(chi, &term, max_order)?
            .scale(&Coeff::real(QuadSurd::ratio(1, k)));
        out = out.add(&term);
        k += 1;
    }
    Ok(out)
}

fn resonant_violation(poly: &GradedPolynomial, model: &ResonanceModel, max_order: i64) -> Option<MonomialKey> {
    let alpha = model.alpha_surd();
    poly.iter()
        .map(|(k, _)| k)
        .find(|k| k.order() <= max_order && !is_alpha_resonant(&k.l, &k.m, &model.nu, &alpha))
        .cloned()
}

fn apply_all(
    algebra: &PoissonAlgebra,
    f: &GradedPolynomial,
    generators: &[Generator],
    max_order: i64,
) -> Result<GradedPolynomial> {
    generators
        .iter()
        .try_fold(f.clone(), |acc, g| lie_transform(algebra, &acc, &g.chi, max_order))
}

/// Builds the scaled Hamiltonian `h_nu + epsilon H_0` through `max_degree`
/// in the fast variables (order `2 max_degree`).
pub fn scaled_hamiltonian(
    algebra: &PoissonAlgebra,
    spec: &SlowHamiltonian,
    max_degree: usize,
) -> Result<GradedPolynomial> {
    let taylor = algebra.taylor_expand_h0(spec, max_degree)?;
    let h0 = taylor.terms.iter().fold(algebra.zero(), |acc, f| acc.add(f));
    Ok(algebra.h_nu(algebra.nu()).add(&h0))
}

/// Runs `target` normalization stages.
pub fn normalize(spec: &SlowHamiltonian, model: &ResonanceModel, target: usize) -> Result<NormalFormResult> {
    if target == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if model.order != target {
        return Err(Error::InvalidArgument(format!(
            "resonance model built for N = {}, normalizing to N = {target}",
            model.order
        )));
    }
    if spec.n() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: spec.n(),
        });
    }
    let algebra = PoissonAlgebra::new(model.nu.clone(), spec.d());
    let carried = 2 * target as i64 + 2;
    let h0 = algebra
        .taylor_expand_h0(spec, target + 1)?
        .terms
        .iter()
        .fold(algebra.zero(), |acc, f| acc.add(f));
    let mut current = algebra.h_nu(algebra.nu()).add(&h0);

    let mut generators = Vec::with_capacity(target);
    let mut stages = Vec::with_capacity(target);
    for r in 0..target {
        let order = 2 * (r as i64 + 1);
        let g = current.project(order);
        let (generator, resonant) = solve_homological(&algebra, &g, model, r + 1)?;
        stages.push(StageReport {
            stage: r + 1,
            order,
            resonant_terms: resonant.len(),
            nonresonant_terms: generator.chi.len(),
            generator_norm: generator.norm(),
            max_input_coeff: g.max_coeff_magnitude(),
            max_generator_coeff: generator.chi.max_coeff_magnitude(),
        });
        current = lie_transform(&algebra, &current, &generator.chi, carried)?;
        if let Some(bad) = resonant_violation(&current, model, order) {
            return Err(Error::Certification(format!(
                "after stage {}: non-resonant monomial {bad:?} of order {}",
                r + 1,
                bad.order()
            )));
        }
        generators.push(generator);
    }
    if !current.has_even_parity() {
        return Err(Error::Certification("odd-order terms appeared".into()));
    }

    let nu_tilde = model.nu_tilde_surd();
    let h_tilde = algebra.h_nu(&nu_tilde);
    let checks = TransformChecks {
        hnu_tilde_shift_min_order: apply_all(&algebra, &h_tilde, &generators, carried)?
            .sub(&h_tilde)
            .min_order(),
        h0_shift_min_order: apply_all(&algebra, &h0, &generators, carried)?.sub(&h0).min_order(),
    };
    let normalized = current.truncate(2 * target as i64);
    let residual = algebra.bracket_with_hnu(&current, &nu_tilde);
    let residual_min_order = residual.min_order();
    if residual_min_order.is_some_and(|o| o <= 2 * target as i64) {
        let bad = residual.project(residual_min_order.unwrap_or(0));
        return Err(Error::Certification(format!(
            "residual bracket has order {} terms: {:?}",
            residual_min_order.unwrap_or(0),
            bad.iter().next().map(|(k, _)| k)
        )));
    }
    Ok(NormalFormResult {
        algebra,
        resonance: model.clone(),
        target,
        generators,
        stages,
        transformed: current,
        normalized,
        residual_min_order,
        checks,
    })
}

/// `{h_nu_tilde, H o T}` over everything carried.
pub fn residual_bracket(result: &NormalFormResult) -> GradedPolynomial {
    result
        .algebra
        .bracket_with_hnu(&result.transformed, &result.resonance.nu_tilde_surd())
}

/// Counts of monomials in the normalized Hamiltonian by order.
pub fn order_histogram(poly: &GradedPolynomial) -> BTreeMap<i64, usize> {
    let mut h = BTreeMap::new();
    for (k, _) in poly.iter() {
        *h.entry(k.order()).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::{build_resonance_model, ResonanceOptions};
    use crate::model::PotentialTerm;
    use crate::poisson::{random_homogeneous, FlowDerivatives, PhasePoint};
    use num_complex::Complex64;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn term(c: (i64, i64), slow: Vec<u32>, fast: Vec<u32>) -> PotentialTerm {
        PotentialTerm {
            coeff: BigRational::new(c.0.into(), c.1.into()),
            slow_exp: slow,
            fast_exp: fast,
        }
    }

    fn sqrt2_model(order: usize) -> ResonanceModel {
        build_resonance_model(
            &[QuadSurd::one(), QuadSurd::sqrt_of(2)],
            order,
            0.1,
            &ResonanceOptions::default(),
        )
        .unwrap()
    }

    fn cubic_spec() -> SlowHamiltonian {
        SlowHamiltonian::new(
            2,
            1,
            vec![
                term((1, 2), vec![2], vec![0, 0]),
                term((1, 2), vec![2], vec![1, 0]),
                term((1, 2), vec![2], vec![0, 1]),
            ],
        )
        .unwrap()
    }

    fn hnu_bracket_cancels(alg: &PoissonAlgebra, chi: &GradedPolynomial, g_nr: &GradedPolynomial) -> bool {
        let h = alg.h_nu(alg.nu());
        alg.poisson_bracket(chi, &h).unwrap().add(g_nr).is_zero()
    }

    #[test]
    fn fully_resonant_input_gives_zero_generator() {
        let model = sqrt2_model(3);
        let alg = PoissonAlgebra::new(model.nu.clone(), 1);
        let mut k = alg.key();
        k.sqrt_eps = 4;
        k.l = vec![1, 0];
        k.m = vec![1, 0];
        let g = GradedPolynomial::monomial(2, 1, k, Coeff::ratio(2, 3));
        let (chi, res) = solve_homological(&alg, &g, &model, 1).unwrap();
        assert!(chi.chi.is_zero());
        assert_eq!(res, g);
    }

    #[test]
    fn single_monomial_cancellation() {
        let model = sqrt2_model(3);
        let alg = PoissonAlgebra::new(model.nu.clone(), 1);
        let mut k = alg.key();
        k.sqrt_eps = 4;
        k.l = vec![1, 0];
        k.m = vec![0, 1];
        let g = GradedPolynomial::monomial(2, 1, k.clone(), Coeff::one());
        let (chi, res) = solve_homological(&alg, &g, &model, 1).unwrap();
        assert!(res.is_zero());
        // chi = i / (1 - sqrt2) = -i (1 + sqrt2)
        let expected = Coeff::new(QuadSurd::zero(), -(QuadSurd::one() + QuadSurd::sqrt_of(2)));
        assert_eq!(chi.chi.coeff(&k), Some(&expected));
        assert!(hnu_bracket_cancels(&alg, &chi.chi, &g));
    }

    #[test]
    fn random_homological_cancellation() {
        let model = sqrt2_model(3);
        let alg = PoissonAlgebra::new(model.nu.clone(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_homogeneous(&mut rng, 2, 1, 6, 8, Some(2));
            let (chi, res) = solve_homological(&alg, &g, &model, 3).unwrap();
            let g_nr = g.sub(&res);
            assert!(hnu_bracket_cancels(&alg, &chi.chi, &g_nr));
            assert!(res.iter().all(|(k, c)| g.coeff(k) == Some(c)));
            let alpha = model.alpha_f64();
            assert!(chi.chi.max_coeff_magnitude() <= g.max_coeff_magnitude() / alpha);
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let alg = PoissonAlgebra::new(vec![QuadSurd::one()], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_homogeneous(&mut rng, 1, 1, 4, 5, None);
        assert_eq!(lie_transform(&alg, &f, &alg.zero(), 10).unwrap(), f);
    }

    #[test]
    fn lie_transform_of_hnu_first_order() {
        let model = sqrt2_model(3);
        let alg = PoissonAlgebra::new(model.nu.clone(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let chi = random_homogeneous(&mut rng, 2, 1, 2, 4, Some(2));
        let h = alg.h_nu(alg.nu());
        let out = lie_transform(&alg, &h, &chi, 8).unwrap();
        let first = h.add(&alg.poisson_bracket(&chi, &h).unwrap());
        let rest = out.sub(&first);
        assert!(rest.min_order().is_none_or(|o| o >= 4));
    }

    /// Evaluates `F` at the time-one image of `chi`'s flow, integrated by
    /// classical RK4.
    fn flow_then_eval(alg: &PoissonAlgebra, f: &GradedPolynomial, chi: &GradedPolynomial, p0: &PhasePoint) -> Complex64 {
        let derivs = FlowDerivatives::new(chi);
        let dt = 1e-4;
        let mut p = p0.clone();
        let shift = |p: &PhasePoint, k: &(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>, Vec<Complex64>), h: f64| {
            let mut q = p.clone();
            for j in 0..q.x.len() {
                q.x[j] += k.0[j] * h;
                q.y[j] += k.1[j] * h;
            }
            for j in 0..q.slow_p.len() {
                q.slow_p[j] += k.2[j] * h;
                q.slow_q[j] += k.3[j] * h;
            }
            q
        };
        for _ in 0..10_000 {
            let k1 = alg.flow_field(&derivs, &p);
            let k2 = alg.flow_field(&derivs, &shift(&p, &k1, dt / 2.0));
            let k3 = alg.flow_field(&derivs, &shift(&p, &k2, dt / 2.0));
            let k4 = alg.flow_field(&derivs, &shift(&p, &k3, dt));
            let p1 = shift(&p, &k1, dt / 6.0);
            let p2 = shift(&p1, &k2, dt / 3.0);
            let p3 = shift(&p2, &k3, dt / 3.0);
            p = shift(&p3, &k4, dt / 6.0);
        }
        f.evaluate(&p)
    }

    #[test]
    fn lie_transform_matches_numeric_flow() {
        let model = sqrt2_model(3);
        let alg = PoissonAlgebra::new(model.nu.clone(), 1);
        let spec = cubic_spec();
        let f = scaled_hamiltonian(&alg, &spec, 4).unwrap();
        let g = f.project(2);
        let (chi, _) = solve_homological(&alg, &g, &model, 1).unwrap();
        let eps: f64 = 0.01;
        let s = eps.sqrt();
        let xi = [Complex64::new(0.8 * s, 0.3 * s), Complex64::new(-0.5 * s, 0.6 * s)];
        let eta: Vec<Complex64> = xi.iter().map(|z| z.conj()).collect();
        let p0 = alg.phase_point(&xi, &eta, &[0.4], &[0.7], eps);
        let series = lie_transform(&alg, &f, &chi.chi, 14).unwrap().evaluate(&p0);
        let numeric = flow_then_eval(&alg, &f, &chi.chi, &p0);
        let scale = f.evaluate(&p0).norm();
        assert!((series - numeric).norm() < 1e-9 * scale, "{series} vs {numeric}");
    }

    #[test]
    fn decoupled_system_needs_no_generators() {
        let model = sqrt2_model(2);
        let spec = SlowHamiltonian::new(2, 1, vec![term((1, 2), vec![2], vec![0, 0]), term((1, 3), vec![3], vec![0, 0])]).unwrap();
        let res = normalize(&spec, &model, 2).unwrap();
        assert!(res.generators.iter().all(|g| g.chi.is_zero()));
        let original = scaled_hamiltonian(&res.algebra, &spec, 3).unwrap();
        assert_eq!(res.normalized, original.truncate(4));
        assert!(residual_bracket(&res).is_zero());
        assert_eq!(res.residual_min_order, None);
    }

    /// `V = Q^2 q`, one oscillator. By hand, with `x + y = sqrt(eps) p` and
    /// `x - y = -i q / sqrt(eps)`:
    /// `chi = -eps^{3/2} Q^2 (x + y)`, and the order 4 part of `H o T` is
    /// `-eps^3 Q^4 / 2 + 2 eps^{5/2} Q P (x + y)`; the first term is the
    /// familiar adiabatic potential `-Q^4 / (2 omega^2)` in scaled units.
    #[test]
    fn one_oscillator_matches_hand_computation() {
        let model = build_resonance_model(&[QuadSurd::one()], 1, 0.1, &ResonanceOptions::default()).unwrap();
        let spec = SlowHamiltonian::new(1, 1, vec![term((1, 1), vec![2], vec![1])]).unwrap();
        let res = normalize(&spec, &model, 1).unwrap();
        let key = |e: u32, l: u32, m: u32, u: u32, v: u32| MonomialKey {
            sqrt_eps: e,
            l: vec![l],
            m: vec![m],
            u: vec![u],
            v: vec![v],
        };
        let mut chi = GradedPolynomial::zero(1, 1);
        chi.add_term(key(3, 1, 0, 0, 2), -Coeff::one());
        chi.add_term(key(3, 0, 1, 0, 2), -Coeff::one());
        assert_eq!(res.generators[0].chi, chi);

        let mut normalized = GradedPolynomial::zero(1, 1);
        normalized.add_term(key(0, 1, 1, 0, 0), Coeff::ratio(2, 1));
        normalized.add_term(key(2, 0, 0, 2, 0), Coeff::ratio(1, 2));
        assert_eq!(res.normalized, normalized);

        let mut order4 = GradedPolynomial::zero(1, 1);
        order4.add_term(key(6, 0, 0, 0, 4), Coeff::ratio(-1, 2));
        order4.add_term(key(5, 1, 0, 1, 1), Coeff::ratio(2, 1));
        order4.add_term(key(5, 0, 1, 1, 1), Coeff::ratio(2, 1));
        assert_eq!(res.transformed.project(4), order4);
        assert!(res.checks.hold());
    }

    #[test]
    fn cubic_coupling_certifies_at_order_three() {
        let model = sqrt2_model(3);
        let res = normalize(&cubic_spec(), &model, 3).unwrap();
        assert!(res.residual_min_order.is_some_and(|o| o >= 7));
        let residual = residual_bracket(&res);
        for s in 0..=6 {
            assert!(residual.project(s).is_zero());
        }
        assert!(res.checks.hold());
        assert!(res.normalized.has_even_parity());
        for st in &res.stages {
            assert!(st.max_generator_coeff <= st.max_input_coeff / model.alpha_f64());
        }
    }

    #[test]
    fn random_cubic_coupling_certifies() {
        let model = sqrt2_model(3);
        let spec = SlowHamiltonian::new(
            2,
            1,
            vec![
                term((1, 2), vec![2], vec![0, 0]),
                term((-3, 4), vec![1], vec![2, 0]),
                term((2, 5), vec![1], vec![1, 1]),
                term((1, 3), vec![0], vec![0, 3]),
                term((5, 7), vec![2], vec![0, 1]),
            ],
        )
        .unwrap();
        let res = normalize(&spec, &model, 3).unwrap();
        assert!(res.residual_min_order.is_some_and(|o| o >= 7));
        assert!(res.checks.hold());
    }

    #[test]
    fn residual_scales_with_epsilon() {
        let model = sqrt2_model(2);
        let res = normalize(&cubic_spec(), &model, 2).unwrap();
        let residual = residual_bracket(&res);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for eps in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3] {
            let s: f64 = f64::sqrt(eps);
            let xi = [Complex64::new(0.6 * s, -0.2 * s), Complex64::new(0.3 * s, 0.5 * s)];
            let eta: Vec<Complex64> = xi.iter().map(|z| z.conj()).collect();
            let p = res.algebra.phase_point(&xi, &eta, &[0.5], &[0.8], eps);
            xs.push(eps.ln());
            ys.push(residual.evaluate(&p).norm().ln());
        }
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        // lowest order 2N + 2 = 6 with fast variables of size sqrt(eps): eps^{N + 2}
        assert!((slope - 4.0).abs() < 0.3, "slope {slope}");
    }

    #[test]
    fn mismatched_model_order_is_rejected() {
        let model = sqrt2_model(2);
        assert!(matches!(normalize(&cubic_spec(), &model, 3), Err(Error::InvalidArgument(_))));
    }
}
