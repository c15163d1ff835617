use std::f64::consts::PI;

use diffconv_core::conslaw::{classifying_residual, ConservedVector};
use diffconv_core::expr::Context;
use diffconv_core::numeric::{conservation_monitor, solve, Boundary, GridProblem, Scheme};
use diffconv_core::system::{make_diffusion_convection, FunctionSpec};

fn ctx(n: usize) -> Context {
    Context::new(n, &["u"])
}

fn periodic(n: usize, cells: usize, t_end: f64, u0: &str, a: &str) -> GridProblem {
    let c = ctx(n);
    GridProblem::new(
        n,
        vec![(0.0, 2.0 * PI); n],
        vec![cells; n],
        t_end,
        c.parse(u0).unwrap(),
        c.parse(a).unwrap(),
    )
    .unwrap()
}

fn heat_alpha_drift(cells: usize) -> f64 {
    let traj = solve(&periodic(1, cells, 1.0, "sin(x1)", "u")).unwrap();
    let f = ConservedVector::parse(
        &ctx(1),
        &["exp(t)*sin(x1)*u", "exp(t)*cos(x1)*u - exp(t)*sin(x1)*u_x1"],
    )
    .unwrap();
    let rep = conservation_monitor(&traj, &f, 1e-4).unwrap();
    assert!((rep.values[0] - PI).abs() < 1e-9);
    rep.drift
}

#[test]
fn mass_is_conserved_to_round_off_for_quadratic_potential() {
    let traj = solve(&periodic(1, 128, 1.0, "1 + 1/2*sin(x1)", "u^2")).unwrap();
    assert!(traj.frames.iter().flatten().all(|&u| u > 0.0));
    let f = ConservedVector::parse(&ctx(1), &["u", "-2*u*u_x1"]).unwrap();
    let rep = conservation_monitor(&traj, &f, 1e-10).unwrap();
    assert!(rep.passed, "drift {}", rep.drift);
}

#[test]
fn backward_heat_weighted_density_is_constant() {
    let drift = heat_alpha_drift(256);
    assert!(drift < 1e-4, "drift {drift}");
}

#[test]
fn energy_decays_on_the_heat_run() {
    let traj = solve(&periodic(1, 128, 1.0, "sin(x1)", "u")).unwrap();
    let f = ConservedVector::parse(&ctx(1), &["u^2", "0"]).unwrap();
    let rep = conservation_monitor(&traj, &f, 1e-4).unwrap();
    assert!(!rep.passed);
    assert!(rep.strictly_decreasing);
}

#[test]
fn refinement_shrinks_drift_at_second_order() {
    let coarse = heat_alpha_drift(32);
    let fine = heat_alpha_drift(64);
    assert!(coarse / fine >= 3.0, "{coarse} / {fine}");
}

#[test]
fn planar_heat_decays_at_rate_two() {
    let traj = solve(&periodic(2, 64, 1.0, "sin(x1)*sin(x2)", "u")).unwrap();
    let err = traj
        .max_error(&ctx(2).parse("exp(-2*t)*sin(x1)*sin(x2)").unwrap())
        .unwrap();
    assert!(err < 1e-3, "error {err}");
}

#[test]
fn expanded_scheme_runs_but_is_not_the_default() {
    let mut p = periodic(1, 64, 0.2, "1 + 1/2*sin(x1)", "u^2");
    assert_eq!(p.scheme, Scheme::Conservative);
    p.scheme = Scheme::Expanded;
    let traj = solve(&p).unwrap();
    assert!(traj.last().iter().all(|u| u.is_finite()));
}

/// With `B = A = u`, `exp(x1)` is a characteristic and `exp(-x1)` is not;
/// the compact-support monitor must agree with the symbolic verdict.
#[test]
fn compact_support_monitor_agrees_with_symbolic_check() {
    let sys = make_diffusion_convection(
        1,
        &FunctionSpec::explicit("u"),
        &[FunctionSpec::explicit("u")],
    )
    .unwrap();
    let c = ctx(1);
    let mut p = GridProblem::new(
        1,
        vec![(-8.0, 8.0)],
        vec![400],
        0.25,
        c.parse("exp(-x1^2)").unwrap(),
        c.parse("u").unwrap(),
    )
    .unwrap();
    p.boundary = Boundary::CompactSupport;
    p.convection = vec![c.parse("u").unwrap()];
    let traj = solve(&p).unwrap();
    for (alpha, flux) in [
        ("exp(x1)", "exp(x1)*u - exp(x1)*u_x1 - exp(x1)*u"),
        ("exp(-x1)", "-exp(-x1)*u - exp(-x1)*u_x1 - exp(-x1)*u"),
    ] {
        let symbolic = classifying_residual(&sys.ctx().parse(alpha).unwrap(), &sys)
            .unwrap()
            .is_zero();
        let f = ConservedVector::parse(&c, &[&format!("{alpha}*u"), flux]).unwrap();
        let rep = conservation_monitor(&traj, &f, 1e-4).unwrap();
        assert_eq!(rep.passed, symbolic, "{alpha}: drift {}", rep.drift);
    }
}
