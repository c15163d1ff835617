mod common;

use std::collections::BTreeSet;

use diffconv_core::conslaw::{verify, ConservedVector};
use diffconv_core::expr::{rat, Context, Expr};
use diffconv_core::jet::{divergence, euler_operator, total_derivative, VectorField};
use diffconv_core::system::{make_diffusion_convection, FunctionSpec};
use diffconv_core::transform::{
    apply_equivalence, commutator, infinitesimal_action, push_conserved, ClassParams,
    EquivalenceElement, PointTransformation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn euler_operator_annihilates_divergences(seed in any::<u64>(), n in 1usize..=2) {
        let c = Context::new(n, &["u", "v"]).with_order(4);
        let f = common::random_vector(&c, &mut rng(seed), 2, 3);
        let d = divergence(&c, &f).unwrap();
        for w in ["u", "v"] {
            prop_assert!(euler_operator(&c, &d, w).unwrap().is_zero());
        }
    }

    #[test]
    fn total_derivatives_commute(seed in any::<u64>()) {
        let c = Context::new(2, &["u"]);
        let e = common::random_expr(&c, &mut rng(seed), 2, 3);
        let a = total_derivative(&c, &total_derivative(&c, &e, 1).unwrap(), 2).unwrap();
        let b = total_derivative(&c, &total_derivative(&c, &e, 2).unwrap(), 1).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let c = Context::new(1, &["u"]);
        let mut r = rng(seed);
        let a = common::random_expr(&c, &mut r, 2, 2);
        let b = common::random_expr(&c, &mut r, 2, 2);
        let lhs = total_derivative(&c, &(&a * &b), 1).unwrap();
        let rhs = &(&total_derivative(&c, &a, 1).unwrap() * &b) + &(&a * &total_derivative(&c, &b, 1).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_is_idempotent_and_commutes_with_space_derivatives(seed in any::<u64>()) {
        let s = make_diffusion_convection(1, &FunctionSpec::explicit("u^2"), &[FunctionSpec::explicit("u")]).unwrap();
        let c = s.ctx();
        let e = common::random_expr(c, &mut rng(seed), 1, 2);
        let r = s.reduce_on_shell(&e).unwrap();
        prop_assert_eq!(s.reduce_on_shell(&r).unwrap(), r.clone());
        let d1 = s.reduce_on_shell(&total_derivative(c, &e, 1).unwrap()).unwrap();
        let d2 = s.reduce_on_shell(&total_derivative(c, &r, 1).unwrap()).unwrap();
        prop_assert_eq!(d1, d2);
    }

    #[test]
    fn brackets_are_antisymmetric_and_satisfy_jacobi(seed in any::<u64>()) {
        let c = Context::new(1, &["u"]);
        let mut r = rng(seed);
        let (a, b, d) = (common::random_field(&c, &mut r), common::random_field(&c, &mut r), common::random_field(&c, &mut r));
        let ab = commutator(&c, &a, &b);
        prop_assert_eq!(ab.add(&commutator(&c, &b, &a)), VectorField::zero(&c));
        let j = commutator(&c, &a, &commutator(&c, &b, &d))
            .add(&commutator(&c, &b, &commutator(&c, &d, &a)))
            .add(&commutator(&c, &d, &ab));
        prop_assert!(j.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn pushforward_is_functorial(seed in any::<u64>(), n in 1usize..=2) {
        let c = Context::new(n, &["u"]);
        let mut r = rng(seed);
        let g = EquivalenceElement::random(n, &mut r, false).transformation(&c).unwrap();
        let h = EquivalenceElement::random(n, &mut r, false).transformation(&c).unwrap();
        let f = common::random_vector(&c, &mut r, 1, 2);
        let stepwise = push_conserved(&c, &push_conserved(&c, &f, &g).unwrap(), &h).unwrap();
        let composite = push_conserved(&c, &f, &g.then(&c, &h).unwrap()).unwrap();
        prop_assert_eq!(stepwise, composite);
        prop_assert_eq!(push_conserved(&c, &f, &PointTransformation::identity(&c)).unwrap(), f);
    }

    #[test]
    fn equivalence_maps_laws_to_laws(seed in any::<u64>(), n in 1usize..=2) {
        let b: Vec<FunctionSpec> = ["u^2", "u^3 - u"].iter().take(n).map(|s| FunctionSpec::explicit(s)).collect();
        let s = make_diffusion_convection(n, &FunctionSpec::explicit("u^3 + u"), &b).unwrap();
        let c = s.ctx();
        let mut fl = vec![s.potential().clone()];
        for i in 1..=n {
            let ai = total_derivative(c, s.potential(), i).unwrap();
            fl.push(-(&ai + &s.convection()[i - 1]));
        }
        fl[0] = c.jet("u", &[]);
        let f = ConservedVector::new(fl);
        prop_assert!(verify(&f, &s).unwrap().passed);
        let e = EquivalenceElement::random(n, &mut rng(seed), false);
        let params = ClassParams::DiffusionConvection {
            potential: s.potential().clone(),
            convection: s.convection().to_vec(),
        };
        let (p, g) = apply_equivalence(c, &params, &e).unwrap();
        let ClassParams::DiffusionConvection { potential, convection } = p else { unreachable!() };
        let image_sys = make_diffusion_convection(
            n,
            &FunctionSpec::Given(potential),
            &convection.into_iter().map(FunctionSpec::Given).collect::<Vec<_>>(),
        ).unwrap();
        let image = push_conserved(c, &f, &g).unwrap();
        prop_assert!(verify(&image, &image_sys).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn finite_and_infinitesimal_actions_agree(seed in any::<u64>()) {
        let c = Context::new(1, &["u"]);
        let mut r = rng(seed);
        let f = common::random_vector(&c, &mut r, 1, 2);
        let h = rat(1, 10_000);
        for (which, (name, _, _, gen)) in common::flows(&h).iter().enumerate() {
            let parts: Vec<(&str, Expr)> = gen.iter().map(|(k, v)| (*k, c.parse(v).unwrap())).collect();
            let q = VectorField::from_parts(&c, &parts).unwrap();
            let inf = infinitesimal_action(&c, &f, &q).unwrap();
            let plus = common::push_at(&c, &f, &h, which);
            let minus = common::push_at(&c, &f, &-h.clone(), which);
            let all: Vec<&Expr> = inf.components().iter().chain(plus.components()).chain(minus.components()).collect();
            let pt = common::random_point(&all, &mut r);
            for k in 0..2 {
                let fd = (common::eval(&plus.components()[k], &pt) - common::eval(&minus.components()[k], &pt)) / 2e-4;
                let ex = common::eval(&inf.components()[k], &pt);
                prop_assert!((fd - ex).abs() <= 1e-6 * ex.abs().max(1.0), "{name} component {k}: {fd} vs {ex}");
            }
        }
    }
}

#[test]
fn jet_pool_covers_time_and_space() {
    let c = Context::new(1, &["u"]);
    let got: BTreeSet<Expr> = common::jets(&c, 2).into_iter().map(Expr::atom).collect();
    let want: BTreeSet<Expr> = ["u", "u_t", "u_x1", "u_tt", "u_tx1", "u_x1x1"]
        .iter()
        .map(|s| c.parse(s).unwrap())
        .collect();
    assert_eq!(got, want);
}
