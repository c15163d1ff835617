//! Differential operators on the jet space: total derivatives, divergence,
//! the Euler operator, adjoint Fréchet derivatives and prolongation of
//! point vector fields.

use std::collections::BTreeMap;

use crate::conslaw::ConservedVector;
use crate::expr::{Atom, Context, Expr, ExprError, MultiIndex};

/// Total derivative `D_k` (k = 0 is t). Raises jet orders by one and
/// applies the chain rule through function symbols.
pub fn total_derivative(ctx: &Context, e: &Expr, k: usize) -> Result<Expr, ExprError> {
    let bound = ctx.max_order();
    let mut base = |a: &Atom| -> Result<Expr, ExprError> { total_atom(ctx, a, k, bound) };
    ctx.derive(e, &mut base)
}

fn total_atom(ctx: &Context, a: &Atom, k: usize, bound: usize) -> Result<Expr, ExprError> {
    match a {
        Atom::Var(j) => Ok(if *j as usize == k {
            Expr::one()
        } else {
            Expr::zero()
        }),
        Atom::Jet { idx, .. } => {
            if idx.len() + 1 > bound {
                return Err(ExprError::OrderOverflow {
                    order: idx.len() + 1,
                    bound,
                });
            }
            Ok(Expr::atom(a.jet_extended(k as u8).unwrap()))
        }
        Atom::Func { name, args, idx } => {
            let mut out = Expr::zero();
            for (slot, arg) in args.iter().enumerate() {
                let d_arg = total_atom(ctx, arg, k, bound)?;
                if d_arg.is_zero() {
                    continue;
                }
                let mut idx = idx.clone();
                let pos = idx.partition_point(|&s| s <= slot as u8);
                idx.insert(pos, slot as u8);
                out += &ctx.func_slots(name, args, idx) * &d_arg;
            }
            Ok(out)
        }
        // transcendental atoms are expanded by `Context::derive`
        _ => unreachable!("chain rule handles transcendental atoms"),
    }
}

/// Applies `D_J` for a multi-index over independent variables.
pub fn total_derivative_multi(ctx: &Context, e: &Expr, idx: &[u8]) -> Result<Expr, ExprError> {
    let mut out = e.clone();
    for &k in idx {
        out = total_derivative(ctx, &out, k as usize)?;
    }
    Ok(out)
}

/// `D_t T + D_i X^i` on the free jet space.
pub fn divergence(ctx: &Context, f: &ConservedVector) -> Result<Expr, ExprError> {
    let mut out = Expr::zero();
    for (k, c) in f.components().iter().enumerate() {
        out += total_derivative(ctx, c, k)?;
    }
    Ok(out)
}

/// Jet coordinates of one dependent variable that `e` depends on,
/// including dependence through function arguments.
pub fn jets_of(e: &Expr, dep: &str) -> Vec<Atom> {
    e.atoms()
        .into_iter()
        .filter(|a| matches!(a, Atom::Jet { dep: d, .. } if &**d == dep))
        .collect()
}

fn jet_index(a: &Atom) -> &MultiIndex {
    match a {
        Atom::Jet { idx, .. } => idx,
        _ => unreachable!(),
    }
}

fn signed(e: Expr, order: usize) -> Expr {
    if order % 2 == 1 {
        -e
    } else {
        e
    }
}

/// Variational derivative `E_w(e) = sum_J (-D)_J (de/dw_J)`, summing over
/// the multi-indices actually present in `e`.
pub fn euler_operator(ctx: &Context, e: &Expr, dep: &str) -> Result<Expr, ExprError> {
    let mut out = Expr::zero();
    for jet in jets_of(e, dep) {
        let partial = ctx.diff_atom(e, &jet);
        if partial.is_zero() {
            continue;
        }
        let idx = jet_index(&jet);
        out += signed(total_derivative_multi(ctx, &partial, idx)?, idx.len());
    }
    Ok(out)
}

/// True iff every Euler operator component annihilates `e`.
pub fn is_total_divergence(ctx: &Context, e: &Expr) -> Result<bool, ExprError> {
    for dep in ctx.deps() {
        if !euler_operator(ctx, e, dep)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Adjoint Fréchet derivative `D_L^*(lambda)`: one entry per dependent
/// variable, `sum_mu sum_J (-D)_J (dL^mu/dw_J * lambda^mu)`.
pub fn frechet_adjoint_apply(
    ctx: &Context,
    lhs: &[Expr],
    lambda: &[Expr],
) -> Result<Vec<Expr>, ExprError> {
    assert_eq!(lhs.len(), lambda.len(), "one multiplier per equation");
    let mut out = Vec::with_capacity(ctx.deps().len());
    for dep in ctx.deps() {
        let mut acc = Expr::zero();
        for (l, lam) in lhs.iter().zip(lambda) {
            for jet in jets_of(l, dep) {
                let partial = ctx.diff_atom(l, &jet);
                if partial.is_zero() {
                    continue;
                }
                let idx = jet_index(&jet);
                let inner = &partial * lam;
                acc += signed(total_derivative_multi(ctx, &inner, idx)?, idx.len());
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Point vector field `tau d_t + xi^i d_i + eta^w d_w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    /// Coefficients of the independent variables, t first.
    pub indep: Vec<Expr>,
    /// Coefficients of the dependent variables in context order.
    pub dep: Vec<Expr>,
}

impl VectorField {
    pub fn zero(ctx: &Context) -> Self {
        VectorField {
            indep: vec![Expr::zero(); ctx.n_indep()],
            dep: vec![Expr::zero(); ctx.deps().len()],
        }
    }

    /// Builds a field from `(name, coefficient)` pairs, names being `t`,
    /// `x<k>` or a dependent variable.
    pub fn from_parts(ctx: &Context, parts: &[(&str, Expr)]) -> Result<Self, ExprError> {
        let mut q = VectorField::zero(ctx);
        for (name, c) in parts {
            match ctx.atom_by_name(name) {
                Some(Atom::Var(k)) => q.indep[k as usize] += c,
                Some(Atom::Jet { dep, idx }) if idx.is_empty() => {
                    let i = ctx.deps().iter().position(|d| *d == dep).unwrap();
                    q.dep[i] += c;
                }
                _ => return Err(ExprError::UnknownSymbol(name.to_string())),
            }
        }
        Ok(q)
    }

    pub fn is_zero(&self) -> bool {
        self.indep.iter().chain(&self.dep).all(Expr::is_zero)
    }

    pub fn scale(&self, c: &crate::expr::Rational) -> Self {
        VectorField {
            indep: self.indep.iter().map(|e| e.scale(c)).collect(),
            dep: self.dep.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Self {
        VectorField {
            indep: self
                .indep
                .iter()
                .zip(&other.indep)
                .map(|(a, b)| a + b)
                .collect(),
            dep: self
                .dep
                .iter()
                .zip(&other.dep)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Evolutionary characteristic `Q[w] = eta^w - xi^j w_j`, j over all
    /// independent variables.
    pub fn characteristic(&self, ctx: &Context) -> Vec<Expr> {
        ctx.deps()
            .iter()
            .zip(&self.dep)
            .map(|(w, eta)| {
                let mut q = eta.clone();
                for (j, xi) in self.indep.iter().enumerate() {
                    q -= &(xi * &ctx.jet(w, &[j as u8]));
                }
                q
            })
            .collect()
    }

    /// The field acting as a derivation on functions of (t, x, u, v).
    pub fn apply_point(&self, ctx: &Context, f: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (k, xi) in self.indep.iter().enumerate() {
            if !xi.is_zero() {
                out += xi * &ctx.diff_atom(f, &Atom::Var(k as u8));
            }
        }
        for (w, eta) in ctx.deps().iter().zip(&self.dep) {
            if !eta.is_zero() {
                out += eta * &ctx.diff_atom(f, &Atom::jet(w, &[]));
            }
        }
        out
    }
}

/// Prolonged coefficients, computed on demand with
/// `phi^{J+i} = D_i phi^J - w_{J+j} D_i xi^j`.
pub struct Prolongation<'a> {
    ctx: &'a Context,
    field: &'a VectorField,
    d_xi: Vec<Vec<Expr>>,
    cache: BTreeMap<Atom, Expr>,
}

impl<'a> Prolongation<'a> {
    pub fn new(ctx: &'a Context, field: &'a VectorField) -> Result<Self, ExprError> {
        let mut d_xi = Vec::new();
        for i in 0..ctx.n_indep() {
            let row = field
                .indep
                .iter()
                .map(|xi| total_derivative(ctx, xi, i))
                .collect::<Result<Vec<_>, _>>()?;
            d_xi.push(row);
        }
        let mut cache = BTreeMap::new();
        for (w, eta) in ctx.deps().iter().zip(&field.dep) {
            cache.insert(Atom::jet(w, &[]), eta.clone());
        }
        Ok(Prolongation {
            ctx,
            field,
            d_xi,
            cache,
        })
    }

    /// Coefficient of `d/dw_J`.
    pub fn coefficient(&mut self, jet: &Atom) -> Result<Expr, ExprError> {
        if let Some(c) = self.cache.get(jet) {
            return Ok(c.clone());
        }
        let Atom::Jet { dep, idx } = jet else {
            unreachable!("prolongation coefficients exist for jet coordinates only")
        };
        if idx.len() > self.ctx.max_order() {
            return Err(ExprError::OrderOverflow {
                order: idx.len(),
                bound: self.ctx.max_order(),
            });
        }
        let i = *idx.last().unwrap();
        let mut parent_idx = idx.clone();
        parent_idx.pop();
        let parent = Atom::Jet {
            dep: dep.clone(),
            idx: parent_idx,
        };
        let phi = self.coefficient(&parent)?;
        let mut out = total_derivative(self.ctx, &phi, i as usize)?;
        for j in 0..self.ctx.n_indep() {
            let dxi = &self.d_xi[i as usize][j];
            if dxi.is_zero() {
                continue;
            }
            let w = parent.jet_extended(j as u8).unwrap();
            out -= &(&Expr::atom(w) * dxi);
        }
        self.cache.insert(jet.clone(), out.clone());
        Ok(out)
    }

    /// Applies the prolonged field to an expression.
    pub fn apply(&mut self, e: &Expr) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (k, xi) in self.field.indep.iter().enumerate() {
            if !xi.is_zero() {
                out += xi * &self.ctx.diff_atom(e, &Atom::Var(k as u8));
            }
        }
        for a in e.atoms() {
            if !a.is_jet() {
                continue;
            }
            let partial = self.ctx.diff_atom(e, &a);
            if partial.is_zero() {
                continue;
            }
            out += &self.coefficient(&a)? * &partial;
        }
        Ok(out)
    }
}

/// All prolonged coefficients up to the given order.
pub fn prolong(
    ctx: &Context,
    field: &VectorField,
    order: usize,
) -> Result<BTreeMap<Atom, Expr>, ExprError> {
    if order > ctx.max_order() {
        return Err(ExprError::OrderOverflow {
            order,
            bound: ctx.max_order(),
        });
    }
    let mut p = Prolongation::new(ctx, field)?;
    let mut out = BTreeMap::new();
    for w in ctx.deps() {
        for idx in multi_indices(ctx.n_indep(), order) {
            let jet = Atom::jet(w, &idx);
            let c = p.coefficient(&jet)?;
            out.insert(jet, c);
        }
    }
    Ok(out)
}

/// Sorted multi-indices of length at most `order` over `vars` variables.
pub fn multi_indices(vars: usize, order: usize) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::<u8>::new()];
    for _ in 0..order {
        let mut next = Vec::new();
        for idx in &frontier {
            let start = idx.last().copied().unwrap_or(0);
            for k in start..vars as u8 {
                let mut j = idx.clone();
                j.push(k);
                next.push(j);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
