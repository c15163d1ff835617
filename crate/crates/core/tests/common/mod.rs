#![allow(dead_code)]

use diffconv_core::conslaw::ConservedVector;
use diffconv_core::expr::{Atom, Context, Expr, Point, Rational};
use diffconv_core::jet::VectorField;
use diffconv_core::transform::{push_conserved, PointTransformation};
use rand::Rng;

/// Jet coordinates of every dependent variable up to `order`, t included.
pub fn jets(ctx: &Context, order: usize) -> Vec<Atom> {
    let k = ctx.n_indep() as u8;
    let mut idx: Vec<Vec<u8>> = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..order {
        let mut next = Vec::new();
        for m in &layer {
            let lo = m.last().copied().unwrap_or(0);
            for s in lo..k {
                let mut m2: Vec<u8> = m.clone();
                m2.push(s);
                next.push(m2);
            }
        }
        idx.extend(next.iter().cloned());
        layer = next;
    }
    ctx.deps()
        .iter()
        .flat_map(|w| idx.iter().map(move |i| Atom::jet(w, i)))
        .collect()
}

/// A sum of up to four monomials of degree at most `degree` in the
/// independent variables and the jets up to `order`.
pub fn random_expr<R: Rng>(ctx: &Context, rng: &mut R, order: usize, degree: usize) -> Expr {
    let mut pool: Vec<Atom> = (0..ctx.n_indep()).map(|k| Atom::Var(k as u8)).collect();
    pool.extend(jets(ctx, order));
    let mut e = Expr::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let mut m = Expr::int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..=degree) {
            m = &m * &Expr::atom(pool[rng.gen_range(0..pool.len())].clone());
        }
        e += &m;
    }
    e
}

pub fn random_vector<R: Rng>(
    ctx: &Context,
    rng: &mut R,
    order: usize,
    degree: usize,
) -> ConservedVector {
    ConservedVector::new(
        (0..ctx.n_indep())
            .map(|_| random_expr(ctx, rng, order, degree))
            .collect(),
    )
}

/// A point field with polynomial coefficients of degree at most two in
/// `(t, x, w)`.
pub fn random_field<R: Rng>(ctx: &Context, rng: &mut R) -> VectorField {
    let mut f = VectorField::zero(ctx);
    let coeff = |rng: &mut R| random_expr(ctx, rng, 0, 2);
    for c in f.indep.iter_mut() {
        *c = coeff(rng);
    }
    for c in f.dep.iter_mut() {
        *c = coeff(rng);
    }
    f
}

/// Random values in `[0.5, 1.5]` for every leaf atom of the expressions.
pub fn random_point<R: Rng>(exprs: &[&Expr], rng: &mut R) -> Point {
    let mut p = Point::new();
    for e in exprs {
        for a in e.atoms() {
            if matches!(a, Atom::Exp(_) | Atom::Sin(_) | Atom::Cos(_)) {
                continue;
            }
            p.entry(a).or_insert_with(|| rng.gen_range(0.5..1.5));
        }
    }
    p
}

pub fn eval(e: &Expr, p: &Point) -> f64 {
    e.eval(p, None).expect("evaluable")
}

/// One-parameter groups with their generators, given as forward and
/// inverse maps at a rational parameter value.
pub fn flows(
    eps: &Rational,
) -> Vec<(
    &'static str,
    Vec<String>,
    Vec<String>,
    Vec<(&'static str, &'static str)>,
)> {
    let e = format!("({eps})");
    let l = format!("(1 + {e})");
    vec![
        (
            "scaling",
            vec![format!("{l}^2*t"), format!("{l}*x1"), format!("{l}*u")],
            vec![format!("t/{l}^2"), format!("x1/{l}"), format!("u/{l}")],
            vec![("t", "2*t"), ("x1", "x1"), ("u", "u")],
        ),
        (
            "translation",
            vec![
                format!("t + 2*{e}"),
                format!("x1 + {e}"),
                format!("u + {e}"),
            ],
            vec![
                format!("t - 2*{e}"),
                format!("x1 - {e}"),
                format!("u - {e}"),
            ],
            vec![("t", "2"), ("x1", "1"), ("u", "1")],
        ),
        (
            "galilean",
            vec![
                "t".into(),
                format!("x1 + 2*{e}*t"),
                format!("u*exp(-{e}*x1 - {e}^2*t)"),
            ],
            vec![
                "t".into(),
                format!("x1 - 2*{e}*t"),
                format!("u*exp({e}*x1 - {e}^2*t)"),
            ],
            vec![("x1", "2*t"), ("u", "-x1*u")],
        ),
    ]
}

pub fn push_at(c: &Context, f: &ConservedVector, eps: &Rational, which: usize) -> ConservedVector {
    let (_, fwd, inv, _) = &flows(eps)[which];
    let fwd: Vec<&str> = fwd.iter().map(String::as_str).collect();
    let inv: Vec<&str> = inv.iter().map(String::as_str).collect();
    let g = PointTransformation::parse(c, &fwd, &inv).unwrap();
    push_conserved(c, f, &g).unwrap()
}
