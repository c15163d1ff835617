//! Evolution systems `w_t = R_w` of diffusion-convection type and their
//! adjoint pairs, with reduction to the solution manifold.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::expr::{Atom, Context, Expr, ExprError, ParseError, Sym};
use crate::jet::{total_derivative, total_derivative_multi};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("diffusion potential `{0}` is constant")]
    ConstantDiffusion(String),
    #[error("diffusivity `{0}` vanishes identically")]
    ZeroDiffusivity(String),
    #[error("expected {expected} convection terms, got {got}")]
    ConvectionCount { expected: usize, got: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("in `{text}`: {source}")]
    Parse { text: String, source: ParseError },
}

/// How a parameter function of `u` is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    Zero,
    /// An arbitrary function `name(u)`; reusing a name shares the symbol.
    Symbol(String),
    /// An explicit expression in `u`, e.g. `exp(u)` or `u^(-1)`.
    Explicit(String),
    /// An already built expression in `u`.
    Given(Expr),
}

impl FunctionSpec {
    pub fn symbol(name: &str) -> Self {
        FunctionSpec::Symbol(name.into())
    }

    pub fn explicit(text: &str) -> Self {
        FunctionSpec::Explicit(text.into())
    }

    fn realize(&self, ctx: &mut Context) -> Result<Expr, SystemError> {
        match self {
            FunctionSpec::Zero => Ok(Expr::zero()),
            FunctionSpec::Symbol(name) => {
                if ctx.func_decl(name).is_none() {
                    ctx.declare_named(name, &["u"])?;
                }
                Ok(ctx.func(name, &[])?)
            }
            FunctionSpec::Explicit(text) => parse_in(ctx, text),
            FunctionSpec::Given(e) => Ok(e.clone()),
        }
    }
}

fn parse_in(ctx: &Context, text: &str) -> Result<Expr, SystemError> {
    ctx.parse(text).map_err(|source| SystemError::Parse {
        text: text.into(),
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// `u_t = (A)_ii + (B^i)_i`.
    DiffusionConvection,
    /// `u_t = a u_ii + a_u u_i^2`, `v_t = -a v_ii`.
    AdjointPair,
}

/// A system solved for the time derivatives.
#[derive(Clone, Debug)]
pub struct EvolutionSystem {
    ctx: Context,
    kind: SystemKind,
    equations: Vec<(Sym, Expr)>,
    potential: Expr,
    convection: Vec<Expr>,
    diffusivity: Expr,
}

impl EvolutionSystem {
    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    /// Declarations may be extended (new symbols, rewrite rules on
    /// characteristics); the right-hand sides are left as built.
    pub fn ctx_mut(&mut self) -> &mut Context {
        &mut self.ctx
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn equations(&self) -> &[(Sym, Expr)] {
        &self.equations
    }

    pub fn rhs(&self, dep: &str) -> Option<&Expr> {
        self.equations
            .iter()
            .find(|(w, _)| &**w == dep)
            .map(|(_, r)| r)
    }

    /// `w_t - R_w` per equation.
    pub fn lhs(&self) -> Vec<Expr> {
        self.equations
            .iter()
            .map(|(w, r)| &self.ctx.jet(w, &[0]) - r)
            .collect()
    }

    /// The potential `A(u)`.
    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    /// `a = A_u`.
    pub fn diffusivity(&self) -> &Expr {
        &self.diffusivity
    }

    /// `B^1..B^n`.
    pub fn convection(&self) -> &[Expr] {
        &self.convection
    }

    /// Replaces every jet coordinate carrying a t-derivative by the
    /// corresponding differential consequence of the system.
    pub fn reduce_on_shell(&self, e: &Expr) -> Result<Expr, ExprError> {
        let mut memo: HashMap<(Sym, usize), Expr> = HashMap::new();
        self.reduce_with(e, &mut memo)
    }

    fn reduce_with(
        &self,
        e: &Expr,
        memo: &mut HashMap<(Sym, usize), Expr>,
    ) -> Result<Expr, ExprError> {
        let mut rules = BTreeMap::new();
        for a in e.atoms() {
            let Atom::Jet { dep, idx } = &a else { continue };
            let k = idx.iter().take_while(|&&s| s == 0).count();
            if k == 0 {
                continue;
            }
            let base = self.time_derivative(dep, k, memo)?;
            let r = total_derivative_multi(&self.ctx, &base, &idx[k..])?;
            rules.insert(a, r);
        }
        e.substitute(&rules)
    }

    /// Reduced form of `w_{t...t}` with k time derivatives.
    fn time_derivative(
        &self,
        dep: &Sym,
        k: usize,
        memo: &mut HashMap<(Sym, usize), Expr>,
    ) -> Result<Expr, ExprError> {
        if let Some(e) = memo.get(&(dep.clone(), k)) {
            return Ok(e.clone());
        }
        let out = if k == 1 {
            self.rhs(dep)
                .cloned()
                .ok_or_else(|| ExprError::UnknownSymbol(dep.to_string()))?
        } else {
            let prev = self.time_derivative(dep, k - 1, memo)?;
            let d = total_derivative(&self.ctx, &prev, 0)?;
            self.reduce_with(&d, memo)?
        };
        memo.insert((dep.clone(), k), out.clone());
        Ok(out)
    }
}

/// `u_t = (A)_ii + (B^i)_i` in n space dimensions.
pub fn make_diffusion_convection(
    n: usize,
    a: &FunctionSpec,
    b: &[FunctionSpec],
) -> Result<EvolutionSystem, SystemError> {
    if !b.is_empty() && b.len() != n {
        return Err(SystemError::ConvectionCount {
            expected: n,
            got: b.len(),
        });
    }
    let mut ctx = Context::new(n, &["u"]);
    let potential = a.realize(&mut ctx)?;
    let u = Atom::jet("u", &[]);
    let diffusivity = ctx.diff_atom(&potential, &u);
    if diffusivity.is_zero() {
        return Err(SystemError::ConstantDiffusion(potential.to_string()));
    }
    let mut convection = Vec::with_capacity(n);
    for i in 0..n {
        let spec = b.get(i).unwrap_or(&FunctionSpec::Zero);
        convection.push(spec.realize(&mut ctx)?);
    }
    let mut rhs = Expr::zero();
    for i in 1..=n {
        let da = total_derivative(&ctx, &potential, i)?;
        rhs += total_derivative(&ctx, &da, i)?;
        rhs += total_derivative(&ctx, &convection[i - 1], i)?;
    }
    Ok(EvolutionSystem {
        ctx,
        kind: SystemKind::DiffusionConvection,
        equations: vec![(Sym::from("u"), rhs)],
        potential,
        convection,
        diffusivity,
    })
}

/// The pair `u_t = a_u u_i^2 + a u_ii`, `v_t + a v_ii = 0`. The potential
/// is a symbol `A(u)` with `A_u` rewritten to `a`.
pub fn make_adjoint_pair(n: usize, a: &FunctionSpec) -> Result<EvolutionSystem, SystemError> {
    let mut ctx = Context::new(n, &["u", "v"]);
    let diffusivity = match a {
        FunctionSpec::Zero => return Err(SystemError::ZeroDiffusivity("0".into())),
        spec => spec.realize(&mut ctx)?,
    };
    if diffusivity.is_zero() {
        return Err(SystemError::ZeroDiffusivity(format!("{a:?}")));
    }
    let u = Atom::jet("u", &[]);
    ctx.declare("A", vec![u.clone()])?;
    ctx.add_rule("A", &[u], diffusivity.clone())?;
    let potential = ctx.func("A", &[])?;
    let mut ru = Expr::zero();
    let mut rv = Expr::zero();
    for i in 1..=n {
        let da = total_derivative(&ctx, &potential, i)?;
        ru += total_derivative(&ctx, &da, i)?;
        rv -= &(&diffusivity * &ctx.jet("v", &[i as u8, i as u8]));
    }
    Ok(EvolutionSystem {
        ctx,
        kind: SystemKind::AdjointPair,
        equations: vec![(Sym::from("u"), ru), (Sym::from("v"), rv)],
        potential,
        convection: vec![Expr::zero(); n],
        diffusivity,
    })
}
