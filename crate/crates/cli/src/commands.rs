use diffconv_core::catalog::{self, CatalogError, Resolution};
use diffconv_core::conslaw::{self, Characteristic};
use diffconv_core::expr::{Atom, Context, Expr, ExprError, Rational};
use diffconv_core::jet::VectorField;
use diffconv_core::noether::{self, NoetherError, VariationalProblem};
use diffconv_core::numeric::{self, GridProblem, NumericError};
use diffconv_core::par::ExecMode;
use diffconv_core::system::{
    make_adjoint_pair, make_diffusion_convection, EvolutionSystem, FunctionSpec, SystemError,
    SystemKind,
};
use diffconv_core::transform::{
    self, ClassParams, EquivalenceElement, PointTransformation, TransformError,
};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::problem::{ProblemError, ProblemFile};
use crate::report::{Check, Report};

/// Anything that makes the input unusable; always exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("missing section: {0}")]
    Missing(&'static str),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Conslaw(#[from] conslaw::ConslawError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Noether(#[from] NoetherError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Clone, Debug)]
pub struct Options {
    pub tol: f64,
    pub seed: u64,
    pub n: Vec<usize>,
    pub case: String,
}

fn joined(es: &[Expr]) -> String {
    es.iter()
        .map(Expr::to_string)
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// `c d_t + c d_x1 + ... + c d_u`, zero parts dropped.
pub fn show_field(ctx: &Context, q: &VectorField) -> String {
    let names = (0..ctx.n_indep())
        .map(Context::var_name)
        .chain(ctx.deps().iter().map(|d| d.to_string()));
    let parts: Vec<String> = q
        .indep
        .iter()
        .chain(&q.dep)
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, name)| format!("({c}) d_{name}"))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn verify(p: &ProblemFile) -> Result<Report, CliError> {
    if p.vectors.is_empty() {
        return Err(CliError::Missing("vector"));
    }
    let mut r = Report::new("verify");
    for v in &p.vectors {
        let rep = conslaw::verify(&v.value, &p.system)?;
        r.push(Check::new(&v.name, "conservation", rep.passed).field("residual", rep.residual));
    }
    for c in &p.characteristics {
        let f = p.vectors.iter().find(|v| v.name == c.name).ok_or_else(|| {
            CliError::Input(format!(
                "characteristic `{}` has no vector of that name",
                c.name
            ))
        })?;
        let ok =
            conslaw::check_characteristic(&f.value, &Characteristic(c.value.clone()), &p.system)?;
        r.push(Check::new(&c.name, "characteristic", ok).field("multipliers", joined(&c.value)));
    }
    Ok(r)
}

pub fn split(p: &ProblemFile) -> Result<Report, CliError> {
    let s = conslaw::direct_split(&p.system)?;
    let mut r = Report::new("split");
    let mut c = Check::info("system", "split");
    for (i, x) in s.flux_form.iter().enumerate() {
        c = c.field(format!("flux_form.{}", i + 1), format!("X{} = {x}", i + 1));
    }
    for (i, e) in s.determining.iter().enumerate() {
        c = c.field(format!("determining.{}", i + 1), format!("{e} = 0"));
    }
    c = c.field("density", format!("T = {}", s.density));
    for (i, x) in s.fluxes.iter().enumerate() {
        c = c.field(format!("flux.{}", i + 1), format!("X{} = {x}", i + 1));
    }
    c = c.field("classifying", format!("{} = 0", s.classifying));
    r.push(c);
    Ok(r)
}

pub fn catalog(o: &Options) -> Result<Report, CliError> {
    let ids = catalog::select(&o.case)?;
    let ns = if o.n.is_empty() {
        vec![1, 2, 3]
    } else {
        o.n.clone()
    };
    if let Some(bad) = ns.iter().find(|n| !(1..=3).contains(*n)) {
        return Err(CliError::Input(format!("dimension {bad} is outside 1..=3")));
    }
    let rep = catalog::verify_catalog(&ids, &ns, ExecMode::Parallel);
    let mut r = Report::new("catalog");
    for e in &rep.entries {
        let resolution = match e.resolution {
            Resolution::Verbatim => "verbatim",
            Resolution::Corrected => "corrected",
            Resolution::Unresolved => "unresolved",
        };
        let mut c = Check::new(
            format!("{} n={} {}", e.id, e.n, e.subject),
            "entry",
            e.resolution != Resolution::Unresolved,
        )
        .field("resolution", resolution);
        if !e.note.is_empty() {
            c = c.field("note", &e.note);
        }
        if let Some(f) = &e.corrected {
            c = c.field("corrected", joined(f.components()));
        }
        r.push(c);
    }
    for f in rep.failures() {
        r.push(
            Check::new(format!("{} n={} {}", f.id, f.n, f.subject), f.check, false)
                .field("variant", f.variant)
                .field("detail", &f.detail),
        );
    }
    for e in &rep.errors {
        r.push(Check::new("catalog", "error", false).field("detail", e));
    }
    r.push(
        Check::info("catalog", "totals")
            .field("cases", ids.len())
            .field("checks", rep.checks.len())
            .field("unresolved", rep.unresolved()),
    );
    Ok(r)
}

fn copy_declarations(from: &Context, to: &mut Context) -> Result<(), CliError> {
    let mut copied = Vec::new();
    for d in from.funcs() {
        if to.func_decl(&d.name).is_none() {
            to.declare(&d.name, d.args.to_vec())?;
            copied.push(d.name.clone());
        }
    }
    for rule in from.rules().iter().filter(|r| copied.contains(&r.name)) {
        let args = &from.func_decl(&rule.name).expect("declared").args;
        let base: Vec<Atom> = rule
            .base
            .iter()
            .map(|&k| args[k as usize].clone())
            .collect();
        to.add_rule(&rule.name, &base, rule.replacement.clone())?;
    }
    Ok(())
}

fn equivalence_element(
    p: &ProblemFile,
    o: &Options,
) -> Result<Option<EquivalenceElement>, CliError> {
    let Some(spec) = &p.equivalence else {
        return Ok(None);
    };
    let n = p.system.n();
    let pair = p.system.kind() == SystemKind::AdjointPair;
    let Some(entries) = &spec.entries else {
        let mut e = EquivalenceElement::random(n, &mut ChaCha8Rng::seed_from_u64(o.seed), false);
        if pair {
            e.e7 = vec![Rational::zero(); n];
            e.e9 = vec![Rational::zero(); n];
        }
        return Ok(Some(e));
    };
    let mut e = EquivalenceElement::identity(n);
    for (key, vals) in entries {
        let scalar = || match vals.as_slice() {
            [v] => Ok(v.clone()),
            _ => Err(CliError::Input(format!("`{key}` takes one value"))),
        };
        let vector = || {
            if vals.len() == n {
                Ok(vals.clone())
            } else {
                Err(CliError::Input(format!(
                    "`{key}` takes {n} values separated by `|`"
                )))
            }
        };
        match key.as_str() {
            "e1" => e.e1 = scalar()?,
            "e3" => e.e3 = scalar()?,
            "e4" => e.e4 = scalar()?,
            "e5" => e.e5 = scalar()?,
            "e6" => e.e6 = scalar()?,
            "e8" => e.e8 = scalar()?,
            "e2" => e.e2 = vector()?,
            "e7" => e.e7 = vector()?,
            "e9" => e.e9 = vector()?,
            "rotation" => {
                let [i, j, s] = vals.as_slice() else {
                    return Err(CliError::Input("`rotation` takes `i|j|s`".into()));
                };
                let idx = |r: &Rational| {
                    r.is_integer()
                        .then(|| r.to_integer().to_string().parse::<usize>().ok())
                        .flatten()
                        .filter(|k| (1..=n).contains(k))
                        .ok_or_else(|| {
                            CliError::Input(format!("rotation plane index {r} out of range"))
                        })
                };
                let (i, j) = (idx(i)?, idx(j)?);
                if i == j {
                    return Err(CliError::Input("rotation needs two distinct axes".into()));
                }
                e.m = EquivalenceElement::rotation(n, i, j, s);
            }
            other => {
                return Err(CliError::Input(format!(
                    "unknown equivalence parameter `{other}`"
                )))
            }
        }
    }
    e.validate(p.ctx())?;
    Ok(Some(e))
}

pub fn transform(p: &ProblemFile, o: &Options) -> Result<Report, CliError> {
    if p.vectors.is_empty() {
        return Err(CliError::Missing("vector"));
    }
    let ctx = p.ctx();
    let mut r = Report::new("transform");
    let (g, target) = match (&p.forward, &p.inverse, equivalence_element(p, o)?) {
        (Some(fwd), Some(inv), _) => {
            let f: Vec<&str> = fwd.iter().map(String::as_str).collect();
            let i: Vec<&str> = inv.iter().map(String::as_str).collect();
            let mut g = PointTransformation::parse(ctx, &f, &i)?;
            for (old, new) in &p.function_maps {
                g = g.with_function_map(old, new);
            }
            (g, p.system.clone())
        }
        (Some(_), None, _) | (None, Some(_), _) => {
            return Err(CliError::Missing("forward and inverse"))
        }
        (None, None, Some(e)) => {
            let pair = p.system.kind() == SystemKind::AdjointPair;
            let params = if pair {
                ClassParams::Pair {
                    diffusivity: p.system.diffusivity().clone(),
                }
            } else {
                ClassParams::DiffusionConvection {
                    potential: p.system.potential().clone(),
                    convection: p.system.convection().to_vec(),
                }
            };
            let (image, g) = transform::apply_equivalence(ctx, &params, &e)?;
            let mut target = match image {
                ClassParams::DiffusionConvection {
                    potential,
                    convection,
                } => {
                    let b: Vec<FunctionSpec> =
                        convection.into_iter().map(FunctionSpec::Given).collect();
                    make_diffusion_convection(p.system.n(), &FunctionSpec::Given(potential), &b)?
                }
                ClassParams::Pair { diffusivity } => {
                    make_adjoint_pair(p.system.n(), &FunctionSpec::Given(diffusivity))?
                }
            };
            copy_declarations(ctx, target.ctx_mut())?;
            let mut c = Check::info("target", "equivalence");
            if pair {
                c = c.field("diffusivity", target.diffusivity());
            } else {
                c = c.field("potential", target.potential());
                c = c.field("convection", joined(target.convection()));
            }
            r.push(c);
            (g, target)
        }
        (None, None, None) => return Err(CliError::Missing("forward/inverse or equivalence")),
    };
    for v in &p.vectors {
        let image = transform::push_conserved(ctx, &v.value, &g)?;
        let rep = conslaw::verify(&image, &target)?;
        r.push(
            Check::new(&v.name, "image-conservation", rep.passed)
                .field("image", joined(image.components()))
                .field("residual", rep.residual),
        );
    }
    Ok(r)
}

fn pair_lagrangian(sys: &EvolutionSystem) -> Result<VariationalProblem, CliError> {
    let ctx = sys.ctx();
    let mut l = ctx
        .parse("(u_t*v - u*v_t)/2")
        .map_err(|e| CliError::Input(e.to_string()))?;
    let mut grad = Expr::zero();
    for i in 1..=sys.n() as u8 {
        grad += &ctx.jet("u", &[i]) * &ctx.jet("v", &[i]);
    }
    l += &(sys.diffusivity() * &grad);
    Ok(VariationalProblem::new(ctx.clone(), l)?)
}

pub fn noether(p: &ProblemFile) -> Result<Report, CliError> {
    if p.system.kind() != SystemKind::AdjointPair {
        return Err(CliError::Input(
            "noether needs a `diffusivity` pair system".into(),
        ));
    }
    if p.generators.is_empty() {
        return Err(CliError::Missing("generator"));
    }
    let vp = pair_lagrangian(&p.system)?;
    let mut r = Report::new("noether");
    let el = noether::euler_lagrange(&vp)?;
    let mut c = Check::info("lagrangian", "euler-lagrange").field("lagrangian", vp.lagrangian());
    for (d, e) in p.ctx().deps().iter().zip(&el) {
        c = c.field(format!("E_{d}"), e);
    }
    r.push(c);
    for g in &p.generators {
        let (ok, defect) = noether::check_variational(&g.value, &vp)?;
        r.push(Check::new(&g.name, "variational", ok).field("defect", defect));
        if !ok {
            continue;
        }
        let witness = p
            .witnesses
            .iter()
            .find(|w| w.name == g.name)
            .map(|w| w.value.as_slice());
        match noether::noether_flux(&g.value, &vp, witness) {
            Ok(f) => {
                let rep = conslaw::verify(&f, &p.system)?;
                r.push(
                    Check::new(&g.name, "noether-vector", rep.passed)
                        .field("vector", joined(f.components()))
                        .field("residual", rep.residual),
                );
            }
            Err(e @ (NoetherError::MissingWitness(_) | NoetherError::WrongWitness(_))) => {
                r.push(Check::new(&g.name, "noether-vector", false).field("reason", e));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(r)
}

pub fn numcheck(p: &ProblemFile, o: &Options) -> Result<Report, CliError> {
    if p.system.kind() != SystemKind::DiffusionConvection {
        return Err(CliError::Input(
            "numcheck needs a `potential` system".into(),
        ));
    }
    if p.vectors.is_empty() {
        return Err(CliError::Missing("vector"));
    }
    let n = p.system.n();
    let spec = &p.numeric;
    if spec.grid.len() != n {
        return Err(CliError::Missing(
            "grid (one `lo .. hi : cells` per direction)",
        ));
    }
    let t_end = spec.t_end.ok_or(CliError::Missing("t_end"))?;
    let initial = spec.initial.clone().ok_or(CliError::Missing("initial"))?;
    let mut gp = GridProblem::new(
        n,
        spec.grid.iter().map(|&(lo, hi, _)| (lo, hi)).collect(),
        spec.grid.iter().map(|&(_, _, c)| c).collect(),
        t_end,
        initial,
        p.system.potential().clone(),
    )?;
    if let Some(b) = spec.boundary {
        gp.boundary = b;
    }
    if let Some(s) = spec.scheme {
        gp.scheme = s;
    }
    gp.convection = p.system.convection().to_vec();
    let traj = numeric::solve(&gp)?;
    let mut r = Report::new("numcheck");
    r.push(
        Check::info("run", "solve")
            .field("steps", traj.steps)
            .field("frames", traj.frames.len())
            .field("dt", format!("{:.6e}", gp.dt)),
    );
    for v in &p.vectors {
        let m = numeric::conservation_monitor(&traj, &v.value, o.tol)?;
        r.push(
            Check::new(&v.name, "discrete-conservation", m.passed)
                .field("drift", format!("{:.3e}", m.drift))
                .field("tol", format!("{:.3e}", m.tol))
                .field("strictly_decreasing", m.strictly_decreasing),
        );
    }
    Ok(r)
}

fn combination(p: &ProblemFile, terms: &[(Rational, String)]) -> Result<VectorField, CliError> {
    let mut out = VectorField::zero(p.ctx());
    for (c, name) in terms {
        out = out.add(&generator(p, name)?.scale(c));
    }
    Ok(out)
}

fn generator<'a>(p: &'a ProblemFile, name: &str) -> Result<&'a VectorField, CliError> {
    p.generators
        .iter()
        .find(|g| g.name == name)
        .map(|g| &g.value)
        .ok_or_else(|| CliError::Input(format!("relation uses undeclared generator `{name}`")))
}

pub fn brackets(p: Option<&ProblemFile>, o: &Options) -> Result<Report, CliError> {
    let mut r = Report::new("brackets");
    match p {
        Some(p) => {
            if p.relations.is_empty() {
                return Err(CliError::Missing("relation"));
            }
            for rel in &p.relations {
                let got = transform::commutator(
                    p.ctx(),
                    generator(p, &rel.left)?,
                    generator(p, &rel.right)?,
                );
                let want = combination(p, &rel.combination)?;
                r.push(
                    Check::new(rel.text.trim(), "bracket", got == want)
                        .field("actual", show_field(p.ctx(), &got)),
                );
            }
        }
        None => {
            let ns = if o.n.is_empty() { vec![2] } else { o.n.clone() };
            for n in ns {
                if !(2..=3).contains(&n) {
                    return Err(CliError::Input(format!(
                        "bracket relations are tabulated for n = 2, 3, not {n}"
                    )));
                }
                for b in catalog::bracket_checks(n)? {
                    r.push(Check::new(
                        format!("{} (n={n})", b.relation),
                        "bracket",
                        b.holds,
                    ));
                }
            }
        }
    }
    Ok(r)
}
