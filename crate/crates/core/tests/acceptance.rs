//! Acceptance suite. Prints one line per criterion and exits non-zero when
//! an outcome differs from the recorded one.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use diffconv_core::catalog::{
    bracket_checks, generating_set_evidence, instantiate, select, verify_catalog, CatalogReport,
    Params, Variant, CASE_IDS,
};
use diffconv_core::conslaw::{direct_split, verify, ConservedVector};
use diffconv_core::expr::{rat, Context, Expr};
use diffconv_core::jet::{divergence, euler_operator, frechet_adjoint_apply, VectorField};
use diffconv_core::noether::{euler_lagrange, lagrangian_for};
use diffconv_core::numeric::{conservation_monitor, solve, GridProblem};
use diffconv_core::par::ExecMode;
use diffconv_core::system::{make_diffusion_convection, FunctionSpec};
use diffconv_core::transform::{
    check_symmetry, infinitesimal_action, push_conserved, EquivalenceElement, PointTransformation,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    /// The outcome matches what is recorded for this criterion.
    expected: bool,
    detail: String,
}

impl Outcome {
    fn plain(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            expected: pass,
            detail,
        }
    }
}

fn catalog(pattern: &str, ns: &[usize]) -> CatalogReport {
    verify_catalog(&select(pattern).unwrap(), ns, ExecMode::Parallel)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let rep = catalog("Cor1.*", &[1]);
    let secs = t.elapsed().as_secs_f64();
    let ok = rep.errors.is_empty() && rep.checks.iter().all(|c| c.passed) && secs < 5.0;
    Outcome::plain(
        ok,
        format!(
            "{} checks on the four single-equation laws, {secs:.2} s",
            rep.checks.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let rep = catalog("Thm3.*", &[1, 2, 3]);
    let secs = t.elapsed().as_secs_f64();
    let verbatim_fail: Vec<_> = rep
        .checks
        .iter()
        .filter(|c| c.variant == Variant::Verbatim && !c.passed)
        .collect();
    let corrected_ok = rep
        .checks
        .iter()
        .filter(|c| c.variant == Variant::Corrected)
        .all(|c| c.passed);
    let classifying = rep
        .checks
        .iter()
        .filter(|c| c.check == "classifying")
        .count();
    let pass = verbatim_fail.is_empty() && rep.errors.is_empty() && secs < 30.0;
    let only_case2 = !verbatim_fail.is_empty() && verbatim_fail.iter().all(|c| c.id == "Thm3.2");
    Outcome {
        pass,
        expected: rep.errors.is_empty() && corrected_ok && only_case2 && secs < 30.0,
        detail: format!(
            "{} checks ({classifying} classifying) over n = 1..3, {secs:.2} s; {} fail, all under the \
             printed Thm3.2 constraint; the opposite sign on alpha_(k+1) verifies everywhere",
            rep.checks.len(),
            verbatim_fail.len()
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    for n in 1..=3 {
        let b: Vec<FunctionSpec> = (1..=n)
            .map(|i| FunctionSpec::symbol(&format!("B{i}")))
            .collect();
        let s = make_diffusion_convection(n, &FunctionSpec::symbol("A"), &b).unwrap();
        let d = direct_split(&s).unwrap();
        let c = &d.ctx;
        let p = |t: &str| c.parse(t).unwrap();
        let mut want = vec![p("T_uu")];
        for i in 1..=n {
            want.push(p(&format!("-T_x{i}u*A_u + T_u*B{i}_u + R{i}_u")));
        }
        let div: Vec<String> = (1..=n).map(|i| format!("R{i}_x{i}")).collect();
        want.push(p(&format!("T_t + {}", div.join(" + "))));
        let mut got = d.determining.clone();
        got.sort();
        want.sort();
        ok &= got == want && d.antisymmetric_part_is_null;
        let resolved = d.resolved_determining().unwrap();
        ok &= resolved.iter().filter(|e| !e.is_zero()).collect::<Vec<_>>() == vec![&d.classifying];
        ok &= d.density == p("alpha*u");
        for i in 1..=n {
            ok &= d.fluxes[i - 1] == p(&format!("-alpha*A_u*u_x{i} + alpha_x{i}*A - alpha*B{i}"));
        }
        let mut lap = String::new();
        for i in 1..=n {
            lap += &format!(" + alpha_x{i}x{i}*A - alpha_x{i}*B{i}");
        }
        ok &= d.classifying == p(&format!("alpha_t*u{lap}"));
    }
    Outcome::plain(
        ok,
        "determining system, resolved vector and classifying equation for n = 1..3".into(),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    for n in 1..=3 {
        let p = lagrangian_for(&FunctionSpec::symbol("a"), n).unwrap();
        let c = p.ctx();
        let el = euler_lagrange(&p).unwrap();
        let (mut lv, mut lu, mut g2) = (String::new(), String::new(), String::new());
        for i in 1..=n {
            lv += &format!(" + a*v_x{i}x{i}");
            lu += &format!(" - a*u_x{i}x{i}");
            g2 += &format!(" - a_u*u_x{i}^2");
        }
        ok &= el[0] == c.parse(&format!("-(v_t{lv})")).unwrap();
        ok &= el[1] == c.parse(&format!("u_t{g2}{lu}")).unwrap();
    }
    Outcome::plain(ok, "Euler-Lagrange pair for generic a, n = 1..3".into())
}

fn criterion_5() -> Outcome {
    let rep = catalog("Tab1.*,Tab2.*,Ext.*", &[2, 3]);
    let corrected = rep
        .entries
        .iter()
        .filter(|e| e.resolution != diffconv_core::catalog::Resolution::Verbatim)
        .count();
    let ok = rep.errors.is_empty() && rep.unresolved() == 0 && rep.failures().is_empty();
    Outcome::plain(
        ok,
        format!(
            "{} rows over n = 2, 3: {} verbatim, {corrected} via corrected entries, {} unresolved",
            rep.entries.len(),
            rep.entries.len() - corrected,
            rep.unresolved()
        ),
    )
}

fn criterion_6() -> Outcome {
    let rep = catalog("Thm4.*,Var.*", &[2, 3]);
    let sym_ok = rep
        .checks
        .iter()
        .filter(|c| c.check == "symmetry")
        .all(|c| c.passed);
    let var: Vec<_> = rep
        .checks
        .iter()
        .filter(|c| c.check == "variational")
        .collect();
    let var_fail: Vec<String> = var
        .iter()
        .filter(|c| c.variant == Variant::Verbatim && !c.passed)
        .map(|c| format!("{} {} n={}", c.id, c.subject, c.n))
        .collect();
    let corrected_ok = rep
        .checks
        .iter()
        .filter(|c| c.variant == Variant::Corrected)
        .all(|c| c.passed);
    let z_rejected = var.iter().filter(|c| c.subject == "Z").all(|c| c.passed);
    let mut printed_fail = Vec::new();
    let mut fixed_ok = true;
    for n in [2, 3] {
        let b = bracket_checks(n).unwrap();
        for (k, c) in b.iter().enumerate() {
            if k < 4 && !c.holds {
                printed_fail.push(format!("{} (n={n})", c.relation));
            }
            if k >= 4 {
                fixed_ok &= c.holds;
            }
        }
    }
    let pass = sym_ok
        && var_fail.is_empty()
        && z_rejected
        && printed_fail.is_empty()
        && rep.errors.is_empty();
    let recorded_var = var_fail.iter().all(|s| s.starts_with("Var.3 D_2"));
    let recorded_br = printed_fail.len() == 4
        && printed_fail
            .iter()
            .all(|s| s.starts_with("[P_1, G_1] = D_2") || s.starts_with("[P_t, G_1] = P_1"));
    Outcome {
        pass,
        expected: sym_ok && z_rejected && corrected_ok && fixed_ok && recorded_var && recorded_br && rep.errors.is_empty(),
        detail: format!(
            "symmetries ok: {sym_ok}; v-scaling rejected: {z_rejected}; not variational as printed: [{}]; \
             false as printed: [{}]; they hold as [P_1, G_1] = -D_2 and [P_t, G_1] = 2 P_1",
            var_fail.join(", "),
            printed_fail.join(", ")
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut functorial = true;
    for k in 0..20 {
        let n = 1 + k % 2;
        let c = Context::new(n, &["u"]);
        let g = EquivalenceElement::random(n, &mut rng, false)
            .transformation(&c)
            .unwrap();
        let h = EquivalenceElement::random(n, &mut rng, false)
            .transformation(&c)
            .unwrap();
        let f = common::random_vector(&c, &mut rng, 1, 2);
        let a = push_conserved(&c, &push_conserved(&c, &f, &g).unwrap(), &h).unwrap();
        let b = push_conserved(&c, &f, &g.then(&c, &h).unwrap()).unwrap();
        functorial &=
            a == b && push_conserved(&c, &f, &PointTransformation::identity(&c)).unwrap() == f;
    }

    let c = Context::new(1, &["u"]);
    let h = rat(1, 10_000);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let f = common::random_vector(&c, &mut rng, 1, 2);
        for (which, (_, _, _, gen)) in common::flows(&h).iter().enumerate() {
            let parts: Vec<(&str, Expr)> =
                gen.iter().map(|(k, v)| (*k, c.parse(v).unwrap())).collect();
            let q = VectorField::from_parts(&c, &parts).unwrap();
            let inf = infinitesimal_action(&c, &f, &q).unwrap();
            let plus = common::push_at(&c, &f, &h, which);
            let minus = common::push_at(&c, &f, &-h.clone(), which);
            let all: Vec<&Expr> = inf
                .components()
                .iter()
                .chain(plus.components())
                .chain(minus.components())
                .collect();
            let pt = common::random_point(&all, &mut rng);
            for k in 0..2 {
                let fd = (common::eval(&plus.components()[k], &pt)
                    - common::eval(&minus.components()[k], &pt))
                    / 2e-4;
                let ex = common::eval(&inf.components()[k], &pt);
                worst = worst.max((fd - ex).abs() / ex.abs().max(1.0));
            }
        }
    }

    let mut pairs = 0;
    let mut transported = true;
    for id in CASE_IDS {
        for n in [2, 3] {
            let Ok(inst) = instantiate(id, n, &Params::default()) else {
                continue;
            };
            let sys = &inst.system;
            let vectors: Vec<&ConservedVector> = inst
                .vectors
                .iter()
                .map(|v| &v.vector)
                .filter(|v| verify(v, sys).map(|r| r.passed).unwrap_or(false))
                .collect();
            for g in inst.generators.iter().filter(|g| g.lie) {
                if !check_symmetry(&g.field, sys).unwrap_or(false) {
                    transported = false;
                    continue;
                }
                for f in &vectors {
                    pairs += 1;
                    let image = infinitesimal_action(sys.ctx(), f, &g.field).unwrap();
                    transported &= verify(&image, sys).unwrap().passed;
                }
            }
        }
    }
    Outcome::plain(
        functorial && worst < 1e-6 && transported,
        format!(
            "functoriality on 20 pairs: {functorial}; finite vs infinitesimal worst relative gap {worst:.1e}; \
             symmetry transport on {pairs} catalog pairs: {transported}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut annihilated = 0;
    for k in 0..100 {
        let c = Context::new(1 + k % 2, &["u", "v"]).with_order(4);
        let f = common::random_vector(&c, &mut rng, 2, 3);
        let d = divergence(&c, &f).unwrap();
        if ["u", "v"]
            .iter()
            .all(|w| euler_operator(&c, &d, w).unwrap().is_zero())
        {
            annihilated += 1;
        }
    }
    let mut adjoint = true;
    for n in 1..=3 {
        let mut s = make_diffusion_convection(n, &FunctionSpec::explicit("u"), &[]).unwrap();
        let vars: Vec<String> = (0..=n).map(Context::var_name).collect();
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        s.ctx_mut().declare_named("alpha", &vars).unwrap();
        let c = s.ctx();
        let lam = c.parse("alpha").unwrap();
        let got = frechet_adjoint_apply(c, &s.lhs(), &[lam]).unwrap();
        let lap: Vec<String> = (1..=n).map(|i| format!("alpha_x{i}x{i}")).collect();
        adjoint &= got[0]
            == c.parse(&format!("-(alpha_t + {})", lap.join(" + ")))
                .unwrap();
    }
    Outcome::plain(
        annihilated == 100 && adjoint,
        format!("Euler operator kills {annihilated}/100 random divergences; heat adjoint exact for n = 1..3: {adjoint}"),
    )
}

fn periodic(u0: &str, a: &str, cells: usize) -> GridProblem {
    let c = Context::new(1, &["u"]);
    GridProblem::new(
        1,
        vec![(0.0, 2.0 * PI)],
        vec![cells],
        1.0,
        c.parse(u0).unwrap(),
        c.parse(a).unwrap(),
    )
    .unwrap()
}

fn criterion_9() -> Outcome {
    let c = Context::new(1, &["u"]);
    let cv = |t: &[&str]| ConservedVector::parse(&c, t).unwrap();
    let mut slowest: f64 = 0.0;
    let mut timed = |f: &dyn Fn() -> f64| {
        let t = Instant::now();
        let v = f();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        v
    };
    let mass = timed(&|| {
        let tr = solve(&periodic("1 + 1/2*sin(x1)", "u^2", 128)).unwrap();
        conservation_monitor(&tr, &cv(&["u", "-2*u*u_x1"]), 1e-10)
            .unwrap()
            .drift
    });
    let weighted = timed(&|| {
        let tr = solve(&periodic("sin(x1)", "u", 256)).unwrap();
        let f = cv(&["exp(t)*sin(x1)*u", "exp(t)*cos(x1)*u - exp(t)*sin(x1)*u_x1"]);
        conservation_monitor(&tr, &f, 1e-4).unwrap().drift
    });
    let decreasing = timed(&|| {
        let tr = solve(&periodic("sin(x1)", "u", 128)).unwrap();
        let r = conservation_monitor(&tr, &cv(&["u^2", "0"]), 1e-4).unwrap();
        if r.strictly_decreasing {
            1.0
        } else {
            0.0
        }
    }) == 1.0;
    Outcome::plain(
        mass < 1e-10 && weighted < 1e-4 && decreasing && slowest < 10.0,
        format!(
            "mass drift {mass:.1e}; weighted density drift {weighted:.1e}; energy strictly decreasing: \
             {decreasing}; slowest run {slowest:.2} s"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut ok = true;
    let mut count = 0;
    for n in [2, 3] {
        let g = generating_set_evidence(n).unwrap();
        count += g.actions.len();
        ok &= g.actions.iter().all(|a| a.passed);
    }
    Outcome::plain(
        ok,
        format!(
            "{count} symmetry and discrete-map actions reproduce the dependent rows for n = 2, 3"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("single-equation laws", criterion_1),
        ("classification suite", criterion_2),
        ("direct method", criterion_3),
        ("Euler-Lagrange pair", criterion_4),
        ("tables and extra laws", criterion_5),
        ("symmetries, variational symmetries, brackets", criterion_6),
        ("transport", criterion_7),
        ("operator identities", criterion_8),
        ("numeric cross-checks", criterion_9),
        ("generating set", criterion_10),
    ];
    let mut unexpected = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let mark = if o.expected { "" } else { "  UNEXPECTED" };
        println!(
            "criterion {:>2}  {verdict}  {title}: {}{mark}",
            k + 1,
            o.detail
        );
        if !o.expected {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
