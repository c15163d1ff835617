use diffconv_core::catalog::{
    admissible, alpha_vector, check_instance, generating_set_evidence, instantiate,
    noether_flux_for, select, verify_catalog, CatalogError, Params, Resolution, Variant,
};
use diffconv_core::conslaw::{verify, ConservedVector};
use diffconv_core::par::ExecMode;

#[test]
fn second_table_resolves_at_n2() {
    let ids = select("Tab2.*").unwrap();
    assert_eq!(ids.len(), 9);
    let rep = verify_catalog(&ids, &[2], ExecMode::Parallel);
    assert!(rep.errors.is_empty(), "{:?}", rep.errors);
    assert_eq!(rep.unresolved(), 0);
    assert!(rep.failures().is_empty());
}

#[test]
fn execution_modes_give_identical_reports() {
    let ids = select("Tab1.*,Thm3.*").unwrap();
    let a = verify_catalog(&ids, &[1, 2], ExecMode::Sequential);
    let b = verify_catalog(&ids, &[1, 2], ExecMode::Parallel);
    assert_eq!(a.checks, b.checks);
}

#[test]
fn exponential_weight_case() {
    let inst = instantiate("Cor1.3", 1, &Params::default()).unwrap();
    let c = inst.system.ctx();
    let want = ConservedVector::parse(c, &["exp(x1)*u", "-exp(x1)*A_u*u_x1"]).unwrap();
    assert_eq!(inst.vectors[0].vector, want);
    assert!(verify(&want, &inst.system).unwrap().passed);
}

#[test]
fn quadratic_row_density() {
    let inst = instantiate("Tab2.9", 2, &Params::default()).unwrap();
    let c = inst.system.ctx();
    let want = c
        .parse(
            "4*t^2*(u_x1*v_x1 + u_x2*v_x2) + 2*t*(x1*(u*v_x1 - u_x1*v) + x2*(u*v_x2 - u_x2*v)) \
             - (x1^2 + x2^2)*u*v",
        )
        .unwrap();
    let row = inst
        .vectors
        .iter()
        .find(|v| v.variant == Variant::Verbatim)
        .unwrap();
    assert_eq!(row.vector.density(), &want);
}

#[test]
fn time_independent_harmonic_weight() {
    let inst = instantiate("Thm3.4", 2, &Params::default()).unwrap();
    let alpha = inst.system.ctx().parse("x1").unwrap();
    let f = alpha_vector(&inst.system, &alpha).unwrap();
    assert!(verify(&f, &inst.system).unwrap().passed);
}

#[test]
fn mixed_product_row_in_three_dimensions() {
    let inst = instantiate("Tab2.7", 3, &Params::default()).unwrap();
    assert!(
        verify(&inst.vectors[0].vector, &inst.system)
            .unwrap()
            .passed
    );
}

#[test]
fn rotation_rows_need_correction() {
    for id in ["Tab1.4", "Tab2.4"] {
        let inst = instantiate(id, 2, &Params::default()).unwrap();
        let verbatim = inst
            .vectors
            .iter()
            .find(|v| v.variant == Variant::Verbatim)
            .unwrap();
        assert!(
            !verify(&verbatim.vector, &inst.system).unwrap().passed,
            "{id}"
        );
        let g = inst.generators.iter().find(|g| g.name == "J_12").unwrap();
        let f = noether_flux_for(&inst, g).unwrap();
        assert!(verify(&f, &inst.system).unwrap().passed, "{id}");
        let rep = check_instance(&inst).unwrap();
        assert!(
            rep.entries
                .iter()
                .all(|e| e.resolution == Resolution::Corrected),
            "{id}"
        );
    }
}

#[test]
fn shifted_harmonic_case_sign() {
    let inst = instantiate("Thm3.2", 2, &Params::default()).unwrap();
    let sys = &inst.system;
    let good = alpha_vector(sys, &sys.ctx().parse("exp(x1)").unwrap()).unwrap();
    let bad = alpha_vector(sys, &sys.ctx().parse("exp(-x1)").unwrap()).unwrap();
    assert!(verify(&good, sys).unwrap().passed);
    assert!(!verify(&bad, sys).unwrap().passed);
}

#[test]
fn scaling_of_adjoint_alone_is_not_variational() {
    let inst = instantiate("Var.1", 2, &Params::default()).unwrap();
    let rep = check_instance(&inst).unwrap();
    let z = rep
        .checks
        .iter()
        .find(|c| c.subject == "Z" && c.check == "variational")
        .unwrap();
    assert!(
        z.passed,
        "Z is expected to fail the variational test: {}",
        z.detail
    );
}

#[test]
fn unknown_ids_and_dimensions_are_rejected() {
    assert!(matches!(
        select("Tab9.*"),
        Err(CatalogError::UnknownCase(_))
    ));
    assert!(matches!(
        instantiate("Nope", 2, &Params::default()),
        Err(CatalogError::UnknownCase(_))
    ));
    assert!(matches!(
        instantiate("Tab2.4", 1, &Params::default()),
        Err(CatalogError::Constraint { .. })
    ));
    assert_eq!(admissible("Ext.3", &[1, 2, 3]), vec![1, 3]);
    assert_eq!(admissible("Cor1.2", &[1, 2, 3]), vec![1]);
}

#[test]
fn generating_set_actions_hold() {
    for n in [2, 3] {
        let g = generating_set_evidence(n).unwrap();
        assert!(g.actions.iter().all(|a| a.passed), "{:?}", g.actions);
        assert_eq!(g.actions.len(), 6);
    }
}
