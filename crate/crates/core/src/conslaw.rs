//! Conserved vectors: verification on the solution manifold, characteristic
//! forms, triviality, and the direct method for `u_t = (A)_ii + (B^i)_i`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::expr::{Atom, Context, Expr, ExprError, ParseError, Rational};
use crate::jet::{divergence, euler_operator, frechet_adjoint_apply, total_derivative};
use crate::system::EvolutionSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConslawError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("characteristic `{0}` must depend on t and x only")]
    NotPointFunction(String),
    #[error("operation needs a single diffusion-convection equation")]
    NotScalar,
    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("in `{text}`: {source}")]
    Parse { text: String, source: ParseError },
}

/// Conserved vector `(T, X^1, ..., X^n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservedVector {
    components: Vec<Expr>,
}

impl ConservedVector {
    pub fn new(components: Vec<Expr>) -> Self {
        assert!(components.len() >= 2, "density and at least one flux");
        ConservedVector { components }
    }

    pub fn from_parts(density: Expr, fluxes: Vec<Expr>) -> Self {
        let mut c = vec![density];
        c.extend(fluxes);
        ConservedVector::new(c)
    }

    /// Parses density and fluxes in the given context.
    pub fn parse(ctx: &Context, texts: &[&str]) -> Result<Self, ConslawError> {
        if texts.len() != ctx.n_indep() {
            return Err(ConslawError::Dimension {
                expected: ctx.n_indep(),
                got: texts.len(),
            });
        }
        let components = texts
            .iter()
            .map(|t| {
                ctx.parse(t).map_err(|source| ConslawError::Parse {
                    text: t.to_string(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConservedVector { components })
    }

    pub fn zero(n: usize) -> Self {
        ConservedVector::new(vec![Expr::zero(); n + 1])
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn density(&self) -> &Expr {
        &self.components[0]
    }

    pub fn fluxes(&self) -> &[Expr] {
        &self.components[1..]
    }

    /// Highest jet order among the components.
    pub fn order(&self) -> usize {
        self.components
            .iter()
            .map(Expr::max_jet_order)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        ConservedVector {
            components: self.components.iter().map(&mut f).collect(),
        }
    }

    pub fn try_map<E>(&self, mut f: impl FnMut(&Expr) -> Result<Expr, E>) -> Result<Self, E> {
        Ok(ConservedVector {
            components: self
                .components
                .iter()
                .map(&mut f)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn add(&self, other: &ConservedVector) -> Self {
        ConservedVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ConservedVector) -> Self {
        self.add(&other.scale(&crate::expr::int(-1)))
    }
}

impl std::fmt::Display for ConservedVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T = {}", self.components[0])?;
        for (i, x) in self.fluxes().iter().enumerate() {
            write!(f, "; X{} = {x}", i + 1)?;
        }
        Ok(())
    }
}

/// Multipliers `lambda^mu`, one per equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characteristic(pub Vec<Expr>);

impl Characteristic {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Expr::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    /// On-shell divergence; zero iff the vector is conserved.
    pub residual: Expr,
    pub passed: bool,
}

/// Reduces `Div F` on the solution manifold.
pub fn verify(f: &ConservedVector, sys: &EvolutionSystem) -> Result<VerifyReport, ExprError> {
    let div = divergence(sys.ctx(), f)?;
    let residual = sys.reduce_on_shell(&div)?;
    Ok(VerifyReport {
        passed: residual.is_zero(),
        residual,
    })
}

/// True iff `Div F = lambda^mu L^mu` holds identically off shell.
pub fn check_characteristic(
    f: &ConservedVector,
    lambda: &Characteristic,
    sys: &EvolutionSystem,
) -> Result<bool, ExprError> {
    let mut rest = divergence(sys.ctx(), f)?;
    for (l, lam) in sys.lhs().iter().zip(&lambda.0) {
        rest -= &(l * lam);
    }
    Ok(rest.is_zero())
}

/// Characteristic of a conserved vector of an evolution system: the
/// variational derivatives of the on-shell density.
pub fn characteristic_of(
    f: &ConservedVector,
    sys: &EvolutionSystem,
) -> Result<Characteristic, ExprError> {
    let density = sys.reduce_on_shell(f.density())?;
    let lam = sys
        .ctx()
        .deps()
        .iter()
        .map(|w| euler_operator(sys.ctx(), &density, w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Characteristic(lam))
}

/// `alpha_t u + Delta(alpha) A - alpha_i B^i`.
pub fn classifying_residual(alpha: &Expr, sys: &EvolutionSystem) -> Result<Expr, ConslawError> {
    if alpha.atoms().iter().any(Atom::is_jet) {
        return Err(ConslawError::NotPointFunction(alpha.to_string()));
    }
    let ctx = sys.ctx();
    let mut out = &total_derivative(ctx, alpha, 0)? * &ctx.jet("u", &[]);
    for i in 1..=ctx.n() {
        let ai = total_derivative(ctx, alpha, i)?;
        let aii = total_derivative(ctx, &ai, i)?;
        out += &aii * sys.potential();
        out -= &(&ai * &sys.convection()[i - 1]);
    }
    Ok(out)
}

/// `D_L^*(lambda)` vanishes on the solution manifold.
pub fn adjoint_symmetry_check(
    lambda: &Characteristic,
    sys: &EvolutionSystem,
) -> Result<bool, ExprError> {
    let adj = frechet_adjoint_apply(sys.ctx(), &sys.lhs(), &lambda.0)?;
    for e in adj {
        if !sys.reduce_on_shell(&e)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A conserved vector is trivial iff it is conserved and its
/// characteristic vanishes.
pub fn is_trivial(f: &ConservedVector, sys: &EvolutionSystem) -> Result<bool, ExprError> {
    if !verify(f, sys)?.passed {
        return Ok(false);
    }
    Ok(characteristic_of(f, sys)?.is_zero())
}

/// If `f` is equivalent to `c * g` for a nonzero rational `c` (both being
/// conserved and nontrivial), returns `c`.
pub fn equivalence_factor(
    f: &ConservedVector,
    g: &ConservedVector,
    sys: &EvolutionSystem,
) -> Result<Option<Rational>, ExprError> {
    if !verify(f, sys)?.passed || !verify(g, sys)?.passed {
        return Ok(None);
    }
    let lf = characteristic_of(f, sys)?;
    let lg = characteristic_of(g, sys)?;
    if lf.is_zero() || lg.is_zero() {
        return Ok(None);
    }
    let mut factor: Option<Rational> = None;
    for (a, b) in lf.0.iter().zip(&lg.0) {
        if b.is_zero() {
            if !a.is_zero() {
                return Ok(None);
            }
            continue;
        }
        match a.ratio_to(b) {
            Some(c) if factor.as_ref().is_none_or(|k| *k == c) => factor = Some(c),
            _ => return Ok(None),
        }
    }
    Ok(factor.filter(|c| !num_traits::Zero::is_zero(c)))
}

/// Output of the direct method for a single diffusion-convection equation.
#[derive(Clone, Debug)]
pub struct DirectSplit {
    /// Context with the unknown functions `T`, `X<i>`, `R<i>` and `alpha`.
    pub ctx: Context,
    /// Coefficients of the second-order derivatives for fully opaque fluxes.
    pub second_order: Vec<Expr>,
    /// `X^i = -T_u A_u u_i + R^i`.
    pub flux_form: Vec<Expr>,
    /// Whether the antisymmetric freedom `D_j L^[i,j]` in the fluxes
    /// solves the second-order equations and drops out of the divergence.
    pub antisymmetric_part_is_null: bool,
    /// Coefficients of the monomials in the first derivatives.
    pub determining: Vec<Expr>,
    /// Resolved density `alpha u`.
    pub density: Expr,
    /// Resolved fluxes `-alpha A_u u_i + alpha_i A - alpha B^i`.
    pub fluxes: Vec<Expr>,
    /// `R^i = alpha_i A - alpha B^i`.
    pub resolved_r: Vec<Expr>,
    /// The classifying residual for `alpha`.
    pub classifying: Expr,
}

impl DirectSplit {
    /// The determining expressions with `T` and `R^i` replaced by their
    /// resolved values.
    pub fn resolved_determining(&self) -> Result<Vec<Expr>, ExprError> {
        self.determining
            .iter()
            .map(|e| {
                let mut e = self.ctx.replace_function(e, "T", &self.density)?;
                for (i, r) in self.resolved_r.iter().enumerate() {
                    e = self.ctx.replace_function(&e, &format!("R{}", i + 1), r)?;
                }
                Ok(e)
            })
            .collect()
    }

    /// Human-readable lines of the determining system and resolved form.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, x) in self.flux_form.iter().enumerate() {
            out.push(format!("X{} = {x}", i + 1));
        }
        for e in &self.determining {
            out.push(format!("{e} = 0"));
        }
        out.push(format!("T = {}", self.density));
        for (i, x) in self.fluxes.iter().enumerate() {
            out.push(format!("X{} = {x}", i + 1));
        }
        out.push(format!("{} = 0", self.classifying));
        out
    }
}

fn dedup(v: Vec<Expr>) -> Vec<Expr> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|e| seen.insert(e.clone())).collect()
}

/// Direct method: opaque `T(t,x,u)` and `X^i(t,x,u,u_1..u_n)`, divergence
/// expanded on shell and split in the unconstrained derivatives.
pub fn direct_split(sys: &EvolutionSystem) -> Result<DirectSplit, ConslawError> {
    if sys.equations().len() != 1 {
        return Err(ConslawError::NotScalar);
    }
    let n = sys.n();
    let mut work = sys.clone();
    let ctx = work.ctx_mut();
    let mut point: Vec<String> = (0..=n).map(Context::var_name).collect();
    point.push("u".into());
    let point_refs: Vec<&str> = point.iter().map(String::as_str).collect();
    let mut first: Vec<String> = point.clone();
    first.extend((1..=n).map(|i| format!("u_x{i}")));
    let first_refs: Vec<&str> = first.iter().map(String::as_str).collect();
    ctx.declare_named("T", &point_refs)?;
    for i in 1..=n {
        ctx.declare_named(&format!("X{i}"), &first_refs)?;
        ctx.declare_named(&format!("R{i}"), &point_refs)?;
    }
    for i in 1..=n {
        for j in i + 1..=n {
            ctx.declare_named(&format!("L{i}{j}"), &point_refs)?;
        }
    }
    if ctx.func_decl("alpha").is_none() {
        ctx.declare_named("alpha", &point_refs[..=n])?;
    }
    let ctx = work.ctx().clone();
    let u = ctx.jet("u", &[]);
    let t_sym = ctx.func("T", &[])?;

    let on_shell_div = |fluxes: &[Expr]| -> Result<Expr, ConslawError> {
        let f = ConservedVector::from_parts(t_sym.clone(), fluxes.to_vec());
        Ok(work.reduce_on_shell(&divergence(&ctx, &f)?)?)
    };
    let second: Vec<Atom> = (1..=n as u8)
        .flat_map(|i| (i..=n as u8).map(move |j| Atom::jet("u", &[i, j])))
        .collect();
    let firsts: Vec<Atom> = (1..=n as u8).map(|i| Atom::jet("u", &[i])).collect();

    let opaque: Vec<Expr> = (1..=n)
        .map(|i| ctx.func(&format!("X{i}"), &[]))
        .collect::<Result<_, _>>()?;
    let div = on_shell_div(&opaque)?;
    let second_order: Vec<Expr> = div
        .coefficients(&second)
        .into_iter()
        .filter(|(k, _)| k.iter().any(|q| !num_traits::Zero::is_zero(q)))
        .map(|(_, c)| c)
        .collect();

    let t_u = ctx.diff_atom(&t_sym, &u.as_atom().unwrap().clone());
    let flux_form: Vec<Expr> = (1..=n)
        .map(|i| {
            let r = ctx.func(&format!("R{i}"), &[])?;
            Ok(&r - &(&(&t_u * sys.diffusivity()) * &ctx.jet("u", &[i as u8])))
        })
        .collect::<Result<_, ExprError>>()?;

    // adding D_j L^[i,j] with L antisymmetric leaves everything unchanged
    let mut with_l = flux_form.clone();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let (lo, hi, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
            let l = ctx.func(&format!("L{lo}{hi}"), &[])?;
            let dl = total_derivative(&ctx, &l, j)?;
            with_l[i - 1] += &dl.scale(&crate::expr::int(sign));
        }
    }
    let div = on_shell_div(&flux_form)?;
    let div_l = on_shell_div(&with_l)?;
    let antisymmetric_part_is_null = div == div_l
        && div_l
            .coefficients(&second)
            .keys()
            .all(|k| k.iter().all(num_traits::Zero::is_zero));

    let mut determining = Vec::new();
    let neg_a = -sys.diffusivity().clone();
    for (key, c) in div.coefficients(&firsts) {
        let degree: crate::expr::Exponent = key.iter().copied().sum();
        let c = if degree == crate::expr::Exponent::from_integer(2) {
            c.div(&neg_a).unwrap_or(c)
        } else {
            c
        };
        determining.push(c);
    }
    // constant term first, then first-degree equations, then T_uu
    determining.reverse();
    let determining = dedup(determining);

    let alpha = ctx.func("alpha", &[])?;
    let density = &alpha * &u;
    let mut resolved_r = Vec::with_capacity(n);
    let mut fluxes = Vec::with_capacity(n);
    for i in 1..=n {
        let ai = ctx.func("alpha", &[Atom::x(i)])?;
        let r = &(&ai * sys.potential()) - &(&alpha * &sys.convection()[i - 1]);
        let ui = ctx.jet("u", &[i as u8]);
        fluxes.push(&r - &(&(&alpha * sys.diffusivity()) * &ui));
        resolved_r.push(r);
    }
    let classifying = classifying_residual(&alpha, &work)?;
    Ok(DirectSplit {
        ctx,
        second_order,
        flux_form,
        antisymmetric_part_is_null,
        determining,
        density,
        fluxes,
        resolved_r,
        classifying,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{make_adjoint_pair, make_diffusion_convection, FunctionSpec};

    fn generic(n: usize, b: &[&str]) -> EvolutionSystem {
        let b: Vec<FunctionSpec> = b
            .iter()
            .map(|s| match *s {
                "0" => FunctionSpec::Zero,
                s => FunctionSpec::symbol(s),
            })
            .collect();
        make_diffusion_convection(n, &FunctionSpec::symbol("A"), &b).unwrap()
    }

    #[test]
    fn mass_law_verifies() {
        let s = generic(1, &["B"]);
        let f = ConservedVector::parse(s.ctx(), &["u", "-A_u*u_x1 - B"]).unwrap();
        assert!(verify(&f, &s).unwrap().passed);
        assert!(check_characteristic(&f, &Characteristic(vec![Expr::one()]), &s).unwrap());
        assert!(!is_trivial(&f, &s).unwrap());
    }

    #[test]
    fn first_moment_verifies() {
        let s = generic(1, &["0"]);
        let f = ConservedVector::parse(s.ctx(), &["x1*u", "A - x1*A_u*u_x1"]).unwrap();
        assert!(verify(&f, &s).unwrap().passed);
    }

    #[test]
    fn heat_failure_has_residual() {
        let s = make_diffusion_convection(1, &FunctionSpec::explicit("u"), &[]).unwrap();
        let f = ConservedVector::parse(s.ctx(), &["u", "0"]).unwrap();
        let r = verify(&f, &s).unwrap();
        assert!(!r.passed);
        assert_eq!(r.residual, s.ctx().parse("u_x1x1").unwrap());
    }

    #[test]
    fn backward_heat_characteristic() {
        let mut s = make_diffusion_convection(1, &FunctionSpec::explicit("u"), &[]).unwrap();
        let c = s.ctx_mut();
        c.declare_named("alpha", &["t", "x1"]).unwrap();
        let rhs = -c.func("alpha", &[Atom::x(1), Atom::x(1)]).unwrap();
        c.add_rule("alpha", &[Atom::t()], rhs).unwrap();
        let f = ConservedVector::parse(s.ctx(), &["alpha*u", "alpha_x1*u - alpha*u_x1"]).unwrap();
        let lam = Characteristic(vec![s.ctx().parse("alpha").unwrap()]);
        assert!(check_characteristic(&f, &lam, &s).unwrap());
        assert!(adjoint_symmetry_check(&lam, &s).unwrap());
        assert_eq!(characteristic_of(&f, &s).unwrap(), lam);
        let t = Characteristic(vec![s.ctx().parse("t").unwrap()]);
        assert!(!adjoint_symmetry_check(&t, &s).unwrap());
    }

    #[test]
    fn classifying_examples() {
        let mut s = make_diffusion_convection(2, &FunctionSpec::explicit("u"), &[]).unwrap();
        let a = s.ctx().parse("x1^2 + x2^2 - 4*t").unwrap();
        assert!(classifying_residual(&a, &s).unwrap().is_zero());
        let s1 = generic(1, &["A"]);
        let a = s1.ctx().parse("exp(x1)").unwrap();
        assert!(classifying_residual(&a, &s1).unwrap().is_zero());
        let bad = s.ctx_mut().parse("u").unwrap();
        assert!(classifying_residual(&bad, &s).is_err());
    }

    #[test]
    fn curl_pairs_are_trivial() {
        let s = generic(1, &["B"]);
        let c = s.ctx();
        let phi = "t*u*u_x1 + x1^2*u^3";
        let f = ConservedVector::parse(c, &[&format!("D({phi}, x1)"), &format!("-D({phi}, t)")])
            .unwrap();
        assert!(verify(&f, &s).unwrap().passed);
        assert!(is_trivial(&f, &s).unwrap());
        let z = ConservedVector::parse(c, &["u - u", "0"]).unwrap();
        assert!(is_trivial(&z, &s).unwrap());
    }

    #[test]
    fn equivalence_up_to_factor() {
        let s = make_adjoint_pair(1, &FunctionSpec::explicit("1")).unwrap();
        let c = s.ctx();
        let f = ConservedVector::parse(c, &["u*v", "u*v_x1 - u_x1*v"]).unwrap();
        let g = ConservedVector::parse(
            c,
            &[
                "-2*u*v + D(u*u_x1, x1)",
                "-2*u*v_x1 + 2*u_x1*v - D(u*u_x1, t)",
            ],
        )
        .unwrap();
        assert_eq!(
            equivalence_factor(&g, &f, &s).unwrap(),
            Some(crate::expr::int(-2))
        );
    }

    #[test]
    fn direct_method_generic() {
        for n in 1..=3 {
            let b: Vec<String> = (1..=n).map(|i| format!("B{i}")).collect();
            let b: Vec<&str> = b.iter().map(String::as_str).collect();
            let s = generic(n, &b);
            let d = direct_split(&s).unwrap();
            assert!(d.antisymmetric_part_is_null);
            let text = d.lines().join("\n");
            assert!(text.contains("T_uu = 0"), "{text}");
            assert_eq!(d.density, d.ctx.parse("alpha*u").unwrap());
            let resolved = d.resolved_determining().unwrap();
            let nonzero: Vec<_> = resolved.iter().filter(|e| !e.is_zero()).collect();
            assert_eq!(nonzero, vec![&d.classifying]);
        }
    }

    #[test]
    fn direct_method_linear_heat() {
        let s = make_diffusion_convection(1, &FunctionSpec::explicit("u"), &[]).unwrap();
        let d = direct_split(&s).unwrap();
        assert_eq!(
            d.classifying,
            d.ctx.parse("alpha_t*u + alpha_x1x1*u").unwrap()
        );
    }
}
