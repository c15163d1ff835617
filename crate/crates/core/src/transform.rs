//! Point transformations acting on conserved vectors and equations, the
//! equivalence groups of the diffusion-convection class and of the
//! adjoint pair, Lie brackets and symmetry checks.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::conslaw::ConservedVector;
use crate::expr::{int, Atom, Context, Expr, ExprError, Rational, Sym};
use crate::jet::{total_derivative, Prolongation, VectorField};
use crate::system::EvolutionSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("transformation has no inverse")]
    MissingInverse,
    #[error("Jacobian determinant vanishes")]
    ZeroJacobian,
    #[error("new independent variable `{0}` depends on dependent variables")]
    NotFiberPreserving(String),
    #[error("function symbol `{0}` has transformed arguments and no mapping")]
    FunctionArgument(String),
    #[error("invalid equivalence element: {0}")]
    Invariant(String),
    #[error("expected {expected} components, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// `(t, x, w) -> (t~, x~, w~)` with new independent variables depending on
/// `(t, x)` only. Expressions for the new values use the old names; the
/// inverse expresses old values through the new ones, written with the
/// same names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTransformation {
    pub indep: Vec<Expr>,
    pub dep: Vec<Expr>,
    pub inverse: Option<(Vec<Expr>, Vec<Expr>)>,
    /// `f(t,x) = g(t~,x~)`: function symbol `f` becomes `g` in the new
    /// variables.
    pub function_maps: Vec<(Sym, Sym)>,
}

impl PointTransformation {
    pub fn identity(ctx: &Context) -> Self {
        let indep: Vec<Expr> = (0..ctx.n_indep()).map(Expr::var).collect();
        let dep: Vec<Expr> = ctx.deps().iter().map(|w| ctx.jet(w, &[])).collect();
        PointTransformation {
            inverse: Some((indep.clone(), dep.clone())),
            indep,
            dep,
            function_maps: Vec::new(),
        }
    }

    /// Parses forward and inverse component maps, in the order t, x1..xn,
    /// then the dependent variables.
    pub fn parse(
        ctx: &Context,
        forward: &[&str],
        inverse: &[&str],
    ) -> Result<Self, TransformError> {
        let m = ctx.n_indep() + ctx.deps().len();
        for v in [forward, inverse] {
            if v.len() != m {
                return Err(TransformError::Dimension {
                    expected: m,
                    got: v.len(),
                });
            }
        }
        let p = |s: &str| {
            ctx.parse(s)
                .map_err(|e| TransformError::Expr(ExprError::Invalid(e.to_string())))
        };
        let f: Vec<Expr> = forward.iter().map(|s| p(s)).collect::<Result<_, _>>()?;
        let i: Vec<Expr> = inverse.iter().map(|s| p(s)).collect::<Result<_, _>>()?;
        let k = ctx.n_indep();
        Ok(PointTransformation {
            indep: f[..k].to_vec(),
            dep: f[k..].to_vec(),
            inverse: Some((i[..k].to_vec(), i[k..].to_vec())),
            function_maps: Vec::new(),
        })
    }

    /// Affine change `y~ = P y + c` of (t, x), `w~ = s_w w + h_w(t, x)`.
    pub fn affine(
        ctx: &Context,
        p: &[Vec<Rational>],
        c: &[Rational],
        scales: &[Rational],
        shifts: &[Expr],
    ) -> Result<Self, TransformError> {
        let k = ctx.n_indep();
        let pinv = invert(p).ok_or(TransformError::ZeroJacobian)?;
        let indep: Vec<Expr> = (0..k)
            .map(|r| {
                let mut e = Expr::constant(c[r].clone());
                for j in 0..k {
                    e += &Expr::var(j).scale(&p[r][j]);
                }
                e
            })
            .collect();
        let inv_indep: Vec<Expr> = (0..k)
            .map(|r| {
                let mut e = Expr::zero();
                for j in 0..k {
                    e += &(&Expr::var(j) - &Expr::constant(c[j].clone())).scale(&pinv[r][j]);
                }
                e
            })
            .collect();
        let old_of_new: BTreeMap<Atom, Expr> = (0..k)
            .map(|j| (Atom::Var(j as u8), inv_indep[j].clone()))
            .collect();
        let mut dep = Vec::new();
        let mut inv_dep = Vec::new();
        for (i, w) in ctx.deps().iter().enumerate() {
            if scales[i].is_zero() {
                return Err(TransformError::ZeroJacobian);
            }
            let we = ctx.jet(w, &[]);
            dep.push(&we.scale(&scales[i]) + &shifts[i]);
            let h = shifts[i].substitute(&old_of_new)?;
            inv_dep.push((&we - &h).scale(&scales[i].recip()));
        }
        Ok(PointTransformation {
            indep,
            dep,
            inverse: Some((inv_indep, inv_dep)),
            function_maps: Vec::new(),
        })
    }

    pub fn with_function_map(mut self, old: &str, new: &str) -> Self {
        self.function_maps.push((Sym::from(old), Sym::from(new)));
        self
    }

    /// `dy~_k / dy_j`.
    pub fn jacobian(&self, ctx: &Context) -> Result<Vec<Vec<Expr>>, TransformError> {
        for e in &self.indep {
            if e.atoms().iter().any(Atom::is_jet) {
                return Err(TransformError::NotFiberPreserving(e.to_string()));
            }
        }
        Ok(self
            .indep
            .iter()
            .map(|e| {
                (0..ctx.n_indep())
                    .map(|j| ctx.diff_atom(e, &Atom::Var(j as u8)))
                    .collect()
            })
            .collect())
    }

    /// Rewrites an expression in the old variables and jets into the new
    /// ones.
    pub fn rewrite(&self, ctx: &Context, e: &Expr) -> Result<Expr, TransformError> {
        Rewriter::new(self, ctx)?.rewrite(e)
    }

    /// `h` after `self`.
    pub fn then(&self, ctx: &Context, h: &PointTransformation) -> Result<Self, TransformError> {
        let fwd = forward_rules(ctx, &self.indep, &self.dep);
        let compose = |v: &[Expr]| -> Result<Vec<Expr>, ExprError> {
            v.iter().map(|e| e.substitute(&fwd)).collect()
        };
        let indep = compose(&h.indep)?;
        let dep = compose(&h.dep)?;
        let inverse = match (&self.inverse, &h.inverse) {
            (Some((gi, gd)), Some((hi, hd))) => {
                let back = forward_rules(ctx, hi, hd);
                let c = |v: &[Expr]| -> Result<Vec<Expr>, ExprError> {
                    v.iter().map(|e| e.substitute(&back)).collect()
                };
                Some((c(gi)?, c(gd)?))
            }
            _ => None,
        };
        Ok(PointTransformation {
            indep,
            dep,
            inverse,
            function_maps: self
                .function_maps
                .iter()
                .chain(&h.function_maps)
                .cloned()
                .collect(),
        })
    }
}

fn forward_rules(ctx: &Context, indep: &[Expr], dep: &[Expr]) -> BTreeMap<Atom, Expr> {
    let mut m: BTreeMap<Atom, Expr> = indep
        .iter()
        .enumerate()
        .map(|(j, e)| (Atom::Var(j as u8), e.clone()))
        .collect();
    for (w, e) in ctx.deps().iter().zip(dep) {
        m.insert(Atom::jet(w, &[]), e.clone());
    }
    m
}

struct Rewriter<'a> {
    ctx: &'a Context,
    g: &'a PointTransformation,
    /// `dy~_k/dy_j` in the new variables.
    jac: Vec<Vec<Expr>>,
    base: BTreeMap<Atom, Expr>,
    cache: BTreeMap<Atom, Expr>,
}

impl<'a> Rewriter<'a> {
    fn new(g: &'a PointTransformation, ctx: &'a Context) -> Result<Self, TransformError> {
        let (ii, id) = g.inverse.as_ref().ok_or(TransformError::MissingInverse)?;
        let base = forward_rules(ctx, ii, id);
        let jac = g
            .jacobian(ctx)?
            .into_iter()
            .map(|row| row.iter().map(|e| e.substitute(&base)).collect())
            .collect::<Result<Vec<Vec<Expr>>, _>>()?;
        Ok(Rewriter {
            ctx,
            g,
            jac,
            base,
            cache: BTreeMap::new(),
        })
    }

    /// Old total derivative `D_j = dy~_k/dy_j D~_k` applied to an
    /// expression in the new variables.
    fn old_d(&self, e: &Expr, j: usize) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for k in 0..self.ctx.n_indep() {
            let c = &self.jac[k][j];
            if !c.is_zero() {
                out += &(c * &total_derivative(self.ctx, e, k)?);
            }
        }
        Ok(out)
    }

    fn atom(&mut self, a: &Atom) -> Result<Option<Expr>, TransformError> {
        if let Some(e) = self.cache.get(a) {
            return Ok(Some(e.clone()));
        }
        let out = match a {
            Atom::Var(_) => self.base.get(a).cloned(),
            Atom::Jet { dep, idx } => {
                if idx.is_empty() {
                    self.base.get(a).cloned()
                } else {
                    let mut parent = idx.clone();
                    let j = parent.pop().unwrap();
                    let p = self.atom(&Atom::Jet {
                        dep: dep.clone(),
                        idx: parent,
                    })?;
                    Some(self.old_d(&p.unwrap(), j as usize)?)
                }
            }
            Atom::Func { name, args, idx } => {
                if let Some((_, new)) = self.g.function_maps.iter().find(|(o, _)| o == name) {
                    let mut e = self.ctx.func(new, &[])?;
                    for &s in idx {
                        let Atom::Var(j) = args[s as usize] else {
                            return Err(TransformError::FunctionArgument(name.to_string()));
                        };
                        e = self.old_d(&e, j as usize)?;
                    }
                    Some(e)
                } else {
                    for arg in args.iter() {
                        if self.base.get(arg) != Some(&Expr::atom(arg.clone())) {
                            return Err(TransformError::FunctionArgument(name.to_string()));
                        }
                    }
                    None
                }
            }
            _ => None,
        };
        if let Some(e) = &out {
            self.cache.insert(a.clone(), e.clone());
        }
        Ok(out)
    }

    fn rewrite(&mut self, e: &Expr) -> Result<Expr, TransformError> {
        let mut rules = BTreeMap::new();
        for a in e.atoms() {
            if let Some(r) = self.atom(&a)? {
                rules.insert(a, r);
            }
        }
        Ok(e.substitute(&rules)?)
    }
}

/// Determinant by cofactor expansion.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    let k = m.len();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut out = Expr::zero();
    for c in 0..k {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Expr>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][c] * &determinant(&minor);
        if c % 2 == 0 {
            out += term;
        } else {
            out -= &term;
        }
    }
    out
}

/// Inverse of a square rational matrix.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let k = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// `F_g = (D y~) F / |D y~|`, expressed in the new variables.
pub fn push_conserved(
    ctx: &Context,
    f: &ConservedVector,
    g: &PointTransformation,
) -> Result<ConservedVector, TransformError> {
    let jac = g.jacobian(ctx)?;
    let det = determinant(&jac);
    if det.is_zero() {
        return Err(TransformError::ZeroJacobian);
    }
    let mut rw = Rewriter::new(g, ctx)?;
    let mut comps = Vec::with_capacity(ctx.n_indep());
    for row in &jac {
        let mut e = Expr::zero();
        for (c, fj) in row.iter().zip(f.components()) {
            e += &(c * fj);
        }
        let e = e.div(&det)?;
        comps.push(rw.rewrite(&e)?);
    }
    Ok(ConservedVector::new(comps))
}

/// Infinitesimal counterpart of [`push_conserved`] along the flow of `q`:
/// `-pr Q(F^i) + (D_j xi^i) F^j - (D_j xi^j) F^i`, indices over t and x.
pub fn infinitesimal_action(
    ctx: &Context,
    f: &ConservedVector,
    q: &VectorField,
) -> Result<ConservedVector, ExprError> {
    let k = ctx.n_indep();
    let mut dxi = vec![vec![Expr::zero(); k]; k];
    for (i, row) in dxi.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = total_derivative(ctx, &q.indep[i], j)?;
        }
    }
    let div_xi: Expr = (0..k).map(|j| dxi[j][j].clone()).sum();
    let mut pr = Prolongation::new(ctx, q)?;
    let fc = f.components();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut e = -pr.apply(&fc[i])?;
        for j in 0..k {
            e += &(&dxi[i][j] * &fc[j]);
        }
        e -= &(&div_xi * &fc[i]);
        out.push(e);
    }
    Ok(ConservedVector::new(out))
}

/// Lie bracket `[Q1, Q2]` of point fields.
pub fn commutator(ctx: &Context, q1: &VectorField, q2: &VectorField) -> VectorField {
    let br = |a: &Expr, b: &Expr| &q1.apply_point(ctx, b) - &q2.apply_point(ctx, a);
    VectorField {
        indep: q1
            .indep
            .iter()
            .zip(&q2.indep)
            .map(|(a, b)| br(a, b))
            .collect(),
        dep: q1.dep.iter().zip(&q2.dep).map(|(a, b)| br(a, b)).collect(),
    }
}

/// Lie's criterion: the prolonged field annihilates every equation on
/// the solution manifold.
pub fn check_symmetry(q: &VectorField, sys: &EvolutionSystem) -> Result<bool, ExprError> {
    let mut pr = Prolongation::new(sys.ctx(), q)?;
    for l in sys.lhs() {
        let e = pr.apply(&l)?;
        if !sys.reduce_on_shell(&e)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parameters of a class member: potential and convection for
/// `u_t = (A)_ii + (B^i)_i`, or the diffusivity `a` of the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassParams {
    DiffusionConvection {
        potential: Expr,
        convection: Vec<Expr>,
    },
    Pair {
        diffusivity: Expr,
    },
}

/// An element of the equivalence group of the diffusion-convection class,
/// optionally extended to the adjoint variable by `v~ = eps v + alpha(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceElement {
    pub e1: Rational,
    pub e2: Vec<Rational>,
    pub e3: Rational,
    pub e4: Rational,
    pub e5: Rational,
    pub e6: Rational,
    pub e7: Vec<Rational>,
    pub e8: Rational,
    pub e9: Vec<Rational>,
    pub m: Vec<Vec<Rational>>,
    pub adjoint: Option<(Rational, Expr)>,
}

impl EquivalenceElement {
    pub fn identity(n: usize) -> Self {
        let zero = vec![Rational::zero(); n];
        EquivalenceElement {
            e1: Rational::zero(),
            e2: zero.clone(),
            e3: Rational::zero(),
            e4: Rational::one(),
            e5: Rational::one(),
            e6: Rational::one(),
            e7: zero.clone(),
            e8: Rational::zero(),
            e9: zero,
            m: identity_matrix(n),
            adjoint: None,
        }
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    /// Rotation in the `(x^i, x^j)` plane (1-based) with
    /// `cos = (1 - s^2)/(1 + s^2)`, `sin = 2s/(1 + s^2)`.
    pub fn rotation(n: usize, i: usize, j: usize, s: &Rational) -> Vec<Vec<Rational>> {
        let mut m = identity_matrix(n);
        let d = Rational::one() + s * s;
        let c = (Rational::one() - s * s) / &d;
        let sn = (s * int(2)) / &d;
        m[i - 1][i - 1] = c.clone();
        m[j - 1][j - 1] = c;
        m[i - 1][j - 1] = -sn.clone();
        m[j - 1][i - 1] = sn;
        m
    }

    pub fn validate(&self, ctx: &Context) -> Result<(), TransformError> {
        let n = self.n();
        let bad = |s: &str| Err(TransformError::Invariant(s.into()));
        if self.e4.is_zero() || self.e5.is_zero() || self.e6.is_zero() {
            return bad("e4 e5 e6 must be nonzero");
        }
        if [self.e2.len(), self.e7.len(), self.e9.len()] != [n, n, n] {
            return bad("vector parameters must have n entries");
        }
        for i in 0..n {
            for j in 0..n {
                let dot: Rational = (0..n).map(|k| &self.m[k][i] * &self.m[k][j]).sum();
                let want = if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                if dot != want {
                    return bad("M is not orthogonal");
                }
            }
        }
        let det = determinant(
            &self
                .m
                .iter()
                .map(|r| r.iter().cloned().map(Expr::constant).collect())
                .collect::<Vec<_>>(),
        );
        if det != Expr::one() {
            return bad("det M must be 1");
        }
        if let Some((eps, alpha)) = &self.adjoint {
            if eps.is_zero() {
                return bad("eps must be nonzero");
            }
            if alpha.atoms().iter().any(|a| a.is_jet() || *a == Atom::t()) {
                return bad("alpha must depend on x only");
            }
            let mut lap = Expr::zero();
            for i in 1..=n {
                let d = ctx.diff_atom(alpha, &Atom::x(i));
                lap += ctx.diff_atom(&d, &Atom::x(i));
            }
            if !lap.is_zero() {
                return bad("alpha must be harmonic");
            }
        }
        Ok(())
    }

    /// The induced change of variables.
    pub fn transformation(&self, ctx: &Context) -> Result<PointTransformation, TransformError> {
        self.validate(ctx)?;
        let n = self.n();
        let mut p = vec![vec![Rational::zero(); n + 1]; n + 1];
        p[0][0] = self.e4.clone();
        for i in 0..n {
            p[i + 1][0] = self.e7[i].clone();
            for j in 0..n {
                p[i + 1][j + 1] = &self.e5 * &self.m[i][j];
            }
        }
        let mut c = vec![self.e1.clone()];
        c.extend(self.e2.iter().cloned());
        let mut scales = vec![self.e6.clone()];
        let mut shifts = vec![Expr::constant(self.e3.clone())];
        if ctx.deps().len() > 1 {
            let (eps, alpha) = self
                .adjoint
                .clone()
                .unwrap_or((Rational::one(), Expr::zero()));
            scales.push(eps);
            shifts.push(alpha);
        }
        PointTransformation::affine(ctx, &p, &c, &scales, &shifts)
    }

    /// A random element with small rational entries and a product of plane
    /// rotations.
    pub fn random<R: Rng>(n: usize, rng: &mut R, with_adjoint: bool) -> Self {
        let mut q = |nonzero: bool| loop {
            let r = crate::expr::rat(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            if !nonzero || !r.is_zero() {
                return r;
            }
        };
        let mut e = EquivalenceElement::identity(n);
        e.e1 = q(false);
        e.e3 = q(false);
        e.e4 = q(true);
        e.e5 = q(true);
        e.e6 = q(true);
        e.e8 = q(false);
        for i in 0..n {
            e.e2[i] = q(false);
            e.e7[i] = q(false);
            e.e9[i] = q(false);
        }
        for i in 1..=n {
            for j in i + 1..=n {
                let s = q(false);
                e.m = matmul(&e.m, &EquivalenceElement::rotation(n, i, j, &s));
            }
        }
        if with_adjoint {
            let eps = q(true);
            let alpha = if n >= 2 {
                let a = q(false);
                let b = q(false);
                let x1 = Expr::var(1);
                let x2 = Expr::var(2);
                (&(&x1 * &x1) - &(&x2 * &x2)).scale(&a) + (&x1 * &x2).scale(&b)
            } else {
                Expr::var(1).scale(&q(false))
            };
            e.adjoint = Some((eps, alpha));
        }
        e
    }
}

fn identity_matrix(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Transformed class parameters and the change of variables.
///
/// `A~ = e6 e5^2/e4 A + e8` and `B~^i = e6 e5/e4 mu_ij B^j - e7_i u~/e4 + e9_i`
/// for the diffusion-convection class; `a~ = e5^2 a / e4` for the pair.
pub fn apply_equivalence(
    ctx: &Context,
    params: &ClassParams,
    e: &EquivalenceElement,
) -> Result<(ClassParams, PointTransformation), TransformError> {
    let g = e.transformation(ctx)?;
    let u_only = PointTransformation {
        indep: (0..ctx.n_indep()).map(Expr::var).collect(),
        dep: g.dep.clone(),
        inverse: g
            .inverse
            .as_ref()
            .map(|(_, d)| ((0..ctx.n_indep()).map(Expr::var).collect(), d.clone())),
        function_maps: Vec::new(),
    };
    let mut rw = Rewriter::new(&u_only, ctx)?;
    let out = match params {
        ClassParams::DiffusionConvection {
            potential,
            convection,
        } => {
            let ka = &(&e.e6 * &e.e5 * &e.e5) / &e.e4;
            let potential = &rw.rewrite(potential)?.scale(&ka) + &Expr::constant(e.e8.clone());
            let kb = &(&e.e6 * &e.e5) / &e.e4;
            let b_new: Vec<Expr> = convection
                .iter()
                .map(|b| rw.rewrite(b))
                .collect::<Result<_, _>>()?;
            let u = ctx.jet("u", &[]);
            let convection = (0..e.n())
                .map(|i| {
                    let mut s = Expr::zero();
                    for (j, bj) in b_new.iter().enumerate() {
                        s += &bj.scale(&(&kb * &e.m[i][j]));
                    }
                    s -= &u.scale(&(&e.e7[i] / &e.e4));
                    s += &Expr::constant(e.e9[i].clone());
                    s
                })
                .collect();
            ClassParams::DiffusionConvection {
                potential,
                convection,
            }
        }
        ClassParams::Pair { diffusivity } => {
            if e.e7.iter().any(|c| !c.is_zero()) || e.e9.iter().any(|c| !c.is_zero()) {
                return Err(TransformError::Invariant(
                    "the pair group has no Galilean or convection shifts".into(),
                ));
            }
            let k = &(&e.e5 * &e.e5) / &e.e4;
            ClassParams::Pair {
                diffusivity: rw.rewrite(diffusivity)?.scale(&k),
            }
        }
    };
    Ok((out, g))
}

/// Sign of a rational as an integer, for report formatting.
pub fn sign(c: &Rational) -> i32 {
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}
