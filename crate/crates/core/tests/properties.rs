use fastslow_core::diophantine::{build_resonance_model, ResonanceOptions};
use fastslow_core::integrator::{step_many, Scheme};
use fastslow_core::model::h_nu;
use fastslow_core::normal_form::{lie_transform, solve_homological};
use fastslow_core::poisson::random_homogeneous;
use fastslow_core::{
    from_complex, h_omega, to_complex, FrequencyVector, FullState, GradedPolynomial, PoissonAlgebra, PotentialTerm,
    QuadSurd, SlowHamiltonian,
};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn surd() -> impl Strategy<Value = QuadSurd> {
    (-20i64..=20, 1i64..=9, -20i64..=20, 1i64..=9).prop_map(|(a, b, c, d)| {
        QuadSurd::ratio(a, b) + QuadSurd::ratio(c, d) * QuadSurd::sqrt_of(2)
    })
}

fn algebra() -> PoissonAlgebra {
    PoissonAlgebra::new(vec![QuadSurd::one(), QuadSurd::sqrt_of(2)], 1)
}

fn poly(seed: u64, order: u32) -> GradedPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_homogeneous(&mut rng, 2, 1, order, 3, Some(2))
}

proptest! {
    #[test]
    fn surd_field_laws(a in surd(), b in surd(), c in surd()) {
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.clone() * a.recip(), QuadSurd::one());
        }
        // ordering agrees with floats away from ties
        let (fa, fb) = (a.to_f64(), b.to_f64());
        if (fa - fb).abs() > 1e-9 {
            prop_assert_eq!(a < b, fa < fb);
        }
    }

    #[test]
    fn surd_text_round_trip(a in surd()) {
        let back: QuadSurd = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn bracket_is_a_graded_lie_bracket(s1 in 0u64..1000, s2 in 0u64..1000, o1 in 0u32..5, o2 in 0u32..5) {
        let alg = algebra();
        let f = poly(s1, o1);
        let g = poly(s2 + 1000, o2);
        let fg = alg.poisson_bracket(&f, &g).unwrap();
        prop_assert!(fg.add(&alg.poisson_bracket(&g, &f).unwrap()).is_zero());
        let s = i64::from(o1 + o2);
        for (k, _) in fg.iter() {
            prop_assert!(k.order() == s || k.order() == s + 2, "order {}", k.order());
        }
        let t = alg.bracket_truncated(&f, &g, s).unwrap();
        prop_assert_eq!(t, fg.truncate(s));
    }

    #[test]
    fn polynomial_text_round_trip(seed in 0u64..1000, order in 0u32..6) {
        let p = poly(seed, order);
        let back: GradedPolynomial = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn homological_equation_cancels(seed in 0u64..500, order in 1u32..5) {
        let alg = algebra();
        let model = build_resonance_model(alg.nu(), 4, 0.1, &ResonanceOptions::default()).unwrap();
        let g = poly(seed, order);
        let (chi, resonant) = solve_homological(&alg, &g, &model, 1).unwrap();
        let hnu = alg.h_nu(alg.nu());
        let lhs = alg.poisson_bracket(&chi.chi, &hnu).unwrap().add(&g).sub(&resonant);
        prop_assert!(lhs.is_zero());
    }

    #[test]
    fn lie_transform_of_one_generator_inverts(seed in 0u64..300) {
        let alg = algebra();
        let chi = poly(seed, 2);
        let f = poly(seed + 7, 0);
        let there = lie_transform(&alg, &f, &chi, 4).unwrap();
        let back = lie_transform(&alg, &there, &chi.neg(), 4).unwrap();
        prop_assert!(back.sub(&f).truncate(4).is_zero());
    }

    #[test]
    fn complex_coordinates_round_trip(
        p in prop::collection::vec(-2.0f64..2.0, 2),
        q in prop::collection::vec(-0.2f64..0.2, 2),
        eps in 0.01f64..0.5,
    ) {
        let f = FrequencyVector::new(vec![1.0 / eps, 1.7 / eps]).unwrap();
        let z = to_complex(&p, &q, &f).unwrap();
        let (p2, q2) = from_complex(&z.xi, &z.eta, &f).unwrap();
        for j in 0..2 {
            prop_assert!((p[j] - p2[j]).abs() < 1e-12);
            prop_assert!((q[j] - q2[j]).abs() < 1e-12);
        }
        let e = h_omega(&p, &q, &f).unwrap();
        let hn = h_nu(&z.xi, &z.eta, f.nu());
        prop_assert!((eps * e - hn.re).abs() <= 1e-12 * eps * e.max(1e-300));
        prop_assert!(hn.im.abs() <= 1e-12 * eps * e.max(1e-300));
    }

    #[test]
    fn integrator_is_reversible(
        p in prop::collection::vec(-0.5f64..0.5, 2),
        slow in prop::collection::vec(-0.5f64..0.5, 2),
    ) {
        let f = FrequencyVector::new(vec![20.0, 29.0]).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let term = |fast: Vec<u32>| PotentialTerm { coeff: half.clone(), slow_exp: vec![2], fast_exp: fast };
        let spec = SlowHamiltonian::new(2, 1, vec![term(vec![0, 0]), term(vec![1, 0]), term(vec![0, 1])]).unwrap();
        let mut s0 = FullState::zeros(2, 1);
        s0.p = p.clone();
        s0.q = vec![p[1] / 20.0, p[0] / 29.0];
        s0.slow_p = vec![slow[0]];
        s0.slow_q = vec![slow[1]];
        let dt = 0.004;
        let s1 = step_many(&s0, &f, &spec, dt, 500, Scheme::ExactFastStrang).unwrap();
        let back = step_many(&s1, &f, &spec, -dt, 500, Scheme::ExactFastStrang).unwrap();
        for (a, b) in back.p.iter().chain(&back.q).chain(&back.slow_p).chain(&back.slow_q)
            .zip(s0.p.iter().chain(&s0.q).chain(&s0.slow_p).chain(&s0.slow_q)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
