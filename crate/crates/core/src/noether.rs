//! The composite variational principle for `u_t = (a u_i)_i` paired with
//! `v_t + a v_ii = 0`, and Noether conserved vectors.

use thiserror::Error;

use crate::conslaw::ConservedVector;
use crate::expr::{Atom, Context, Expr, ExprError};
use crate::jet::{
    euler_operator, is_total_divergence, total_derivative, Prolongation, VectorField,
};
use crate::system::{make_adjoint_pair, EvolutionSystem, FunctionSpec, SystemError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoetherError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("field is not a variational symmetry: defect `{0}` is not a divergence")]
    NotVariational(String),
    #[error("divergence witness needed for defect `{0}`")]
    MissingWitness(String),
    #[error("witness divergence does not match the defect; remainder `{0}`")]
    WrongWitness(String),
    #[error("Lagrangian `{0}` contains derivatives of order two or more")]
    NotFirstOrder(String),
}

/// A first-order Lagrangian on a jet space.
#[derive(Clone, Debug)]
pub struct VariationalProblem {
    ctx: Context,
    lagrangian: Expr,
    system: Option<EvolutionSystem>,
}

impl VariationalProblem {
    pub fn new(ctx: Context, lagrangian: Expr) -> Result<Self, NoetherError> {
        if lagrangian.max_jet_order() > 1 {
            return Err(NoetherError::NotFirstOrder(lagrangian.to_string()));
        }
        Ok(VariationalProblem {
            ctx,
            lagrangian,
            system: None,
        })
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn lagrangian(&self) -> &Expr {
        &self.lagrangian
    }

    /// The evolution system equivalent to the Euler-Lagrange equations,
    /// when the problem was built by [`lagrangian_for`].
    pub fn system(&self) -> Option<&EvolutionSystem> {
        self.system.as_ref()
    }

    /// `pr Q(L) + L D_i xi^i` with i over t and x.
    pub fn defect(&self, q: &VectorField) -> Result<Expr, ExprError> {
        let mut pr = Prolongation::new(&self.ctx, q)?;
        let mut out = pr.apply(&self.lagrangian)?;
        for (k, xi) in q.indep.iter().enumerate() {
            let d = total_derivative(&self.ctx, xi, k)?;
            out += &(&d * &self.lagrangian);
        }
        Ok(out)
    }
}

/// `1/2 (u_t v - u v_t) + a u_i v_i` in the pair's context.
pub fn lagrangian_for(a: &FunctionSpec, n: usize) -> Result<VariationalProblem, NoetherError> {
    let sys = make_adjoint_pair(n, a)?;
    let ctx = sys.ctx().clone();
    let mut l = ctx
        .parse("(u_t*v - u*v_t)/2")
        .map_err(|e| ExprError::Invalid(e.to_string()))?;
    let mut grad = Expr::zero();
    for i in 1..=n as u8 {
        grad += &ctx.jet("u", &[i]) * &ctx.jet("v", &[i]);
    }
    l += &(sys.diffusivity() * &grad);
    Ok(VariationalProblem {
        ctx,
        lagrangian: l,
        system: Some(sys),
    })
}

/// Euler-Lagrange expressions, one per dependent variable.
pub fn euler_lagrange(p: &VariationalProblem) -> Result<Vec<Expr>, ExprError> {
    p.ctx
        .deps()
        .iter()
        .map(|w| euler_operator(&p.ctx, &p.lagrangian, w))
        .collect()
}

/// Whether `q` leaves the action invariant up to a divergence, together
/// with the defect expression.
pub fn check_variational(
    q: &VectorField,
    p: &VariationalProblem,
) -> Result<(bool, Expr), ExprError> {
    let defect = p.defect(q)?;
    Ok((is_total_divergence(&p.ctx, &defect)?, defect))
}

/// `F^i = xi^i L + Q[w] dL/dw_i - B^i`, i over t and x. `witness` is the
/// divergence tuple `B` with `Div B` equal to the defect; omitted means
/// zero.
pub fn noether_flux(
    q: &VectorField,
    p: &VariationalProblem,
    witness: Option<&[Expr]>,
) -> Result<ConservedVector, NoetherError> {
    let ctx = &p.ctx;
    let defect = p.defect(q)?;
    let zero = vec![Expr::zero(); ctx.n_indep()];
    let b = witness.unwrap_or(&zero);
    let mut rest = defect.clone();
    for (k, bk) in b.iter().enumerate() {
        rest -= &total_derivative(ctx, bk, k)?;
    }
    if !rest.is_zero() {
        if !is_total_divergence(ctx, &defect)? {
            return Err(NoetherError::NotVariational(defect.to_string()));
        }
        return Err(if witness.is_none() {
            NoetherError::MissingWitness(defect.to_string())
        } else {
            NoetherError::WrongWitness(rest.to_string())
        });
    }
    let chars = q.characteristic(ctx);
    let mut comps = Vec::with_capacity(ctx.n_indep());
    for k in 0..ctx.n_indep() {
        let mut f = &q.indep[k] * &p.lagrangian;
        for (w, qw) in ctx.deps().iter().zip(&chars) {
            let dl = ctx.diff_atom(&p.lagrangian, &Atom::jet(w, &[k as u8]));
            f += &(qw * &dl);
        }
        f -= &b[k];
        comps.push(f);
    }
    Ok(ConservedVector::new(comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conslaw::verify;

    #[test]
    fn lagrangian_shapes() {
        let p = lagrangian_for(&FunctionSpec::explicit("1"), 1).unwrap();
        let want = p.ctx().parse("(u_t*v - u*v_t)/2 + u_x1*v_x1").unwrap();
        assert_eq!(p.lagrangian(), &want);
        let p = lagrangian_for(&FunctionSpec::explicit("u^2"), 1).unwrap();
        let want = p.ctx().parse("(u_t*v - u*v_t)/2 + u^2*u_x1*v_x1").unwrap();
        assert_eq!(p.lagrangian(), &want);
    }

    #[test]
    fn euler_lagrange_of_pair() {
        for n in 1..=3 {
            let p = lagrangian_for(&FunctionSpec::symbol("a"), n).unwrap();
            let c = p.ctx();
            let el = euler_lagrange(&p).unwrap();
            let mut lap_u = String::new();
            let mut lap_v = String::new();
            let mut grad2 = String::new();
            for i in 1..=n {
                lap_u += &format!(" + u_x{i}x{i}");
                lap_v += &format!(" + v_x{i}x{i}");
                grad2 += &format!(" + u_x{i}^2");
            }
            let eu = c.parse(&format!("-(v_t + a*(0{lap_v}))")).unwrap();
            let ev = c
                .parse(&format!("u_t - a_u*(0{grad2}) - a*(0{lap_u})"))
                .unwrap();
            assert_eq!(el, vec![eu, ev]);
        }
    }

    #[test]
    fn simple_lagrangians() {
        let mut c = Context::new(1, &["u", "v"]);
        c = c.with_order(2);
        let p = VariationalProblem::new(c.clone(), c.parse("u_x1^2/2").unwrap()).unwrap();
        let el = euler_lagrange(&p).unwrap();
        assert_eq!(el[0], c.parse("-u_x1x1").unwrap());
        assert!(el[1].is_zero());
        let p = VariationalProblem::new(c.clone(), c.parse("D(u*v, x1)").unwrap()).unwrap();
        assert!(euler_lagrange(&p).unwrap().iter().all(Expr::is_zero));
        assert!(VariationalProblem::new(c.clone(), c.parse("u_x1x1").unwrap()).is_err());
    }

    #[test]
    fn time_translation_flux() {
        let p = lagrangian_for(&FunctionSpec::symbol("a"), 2).unwrap();
        let c = p.ctx();
        let q = VectorField::from_parts(c, &[("t", Expr::one())]).unwrap();
        let f = noether_flux(&q, &p, None).unwrap();
        assert!(verify(&f, p.system().unwrap()).unwrap().passed);
        assert_eq!(f.density(), &c.parse("a*(u_x1*v_x1 + u_x2*v_x2)").unwrap());
    }

    #[test]
    fn scaling_of_v_is_not_variational() {
        let p = lagrangian_for(&FunctionSpec::symbol("a"), 1).unwrap();
        let c = p.ctx();
        let q = VectorField::from_parts(c, &[("v", c.parse("v").unwrap())]).unwrap();
        let (ok, defect) = check_variational(&q, &p).unwrap();
        assert!(!ok);
        assert_eq!(&defect, p.lagrangian());
        assert!(matches!(
            noether_flux(&q, &p, None),
            Err(NoetherError::NotVariational(_))
        ));
    }

    #[test]
    fn harmonic_shift_needs_witness() {
        let p = lagrangian_for(&FunctionSpec::symbol("a"), 2).unwrap();
        let c = p.ctx();
        let alpha = "x1^2 - x2^2";
        let q = VectorField::from_parts(c, &[("v", c.parse(alpha).unwrap())]).unwrap();
        assert!(matches!(
            noether_flux(&q, &p, None),
            Err(NoetherError::MissingWitness(_))
        ));
        let b = [
            c.parse(&format!("({alpha})*u/2")).unwrap(),
            c.parse("2*x1*A").unwrap(),
            c.parse("-2*x2*A").unwrap(),
        ];
        let f = noether_flux(&q, &p, Some(&b)).unwrap();
        assert!(verify(&f, p.system().unwrap()).unwrap().passed);
    }
}
