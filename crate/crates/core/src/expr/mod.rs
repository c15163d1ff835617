//! Canonical differential-polynomial expressions over a jet-space vocabulary.
//!
//! An [`Expr`] is a finite sum of terms, each an exact rational coefficient
//! times a [`Monomial`]. Monomials are sorted products of [`Atom`] powers;
//! exponents are small rationals so that `u^(1/2)` and `u^(-1)` live inside
//! the same canonical form as ordinary polynomials. Zero is the empty sum.
//!
//! All arithmetic here is context free. Anything that needs declarations
//! (differentiation, rewrite rules, parsing) goes through [`Context`].

mod atom;
mod context;
mod eval;
mod parse;
mod print;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use atom::{Atom, MultiIndex, Sym};
pub use context::{random_eval_agrees, Context, FuncDecl, Rule};
pub use eval::{Compiled, EvalError, FunctionTable, Point};
pub use parse::ParseError;

/// Exact coefficient type.
pub type Rational = BigRational;
/// Exponent attached to an atom inside a monomial.
pub type Exponent = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("rational power {exponent} of a non-monomial expression")]
    NonMonomialPower { exponent: Exponent },
    #[error("coefficient {coeff} has no exact rational power {exponent}")]
    IrrationalPower { coeff: Rational, exponent: Exponent },
    #[error("division by non-monomial expression `{0}`")]
    NonMonomialDivisor(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("jet order {order} exceeds the configured bound {bound}")]
    OrderOverflow { order: usize, bound: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("{0}")]
    Invalid(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Sorted product of atom powers with nonzero exponents.
///
/// At most one `exp` factor is present and it always carries exponent one;
/// `exp(a)*exp(b)` is stored as `exp(a + b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Atom, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, Exponent::one())]).canonical()
    }

    pub fn factors(&self) -> &[(Atom, Exponent)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent_of(&self, a: &Atom) -> Exponent {
        self.0
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or_else(|_| Exponent::zero())
    }

    /// Merges duplicate exp factors; assumes the vector is sorted with
    /// distinct atoms.
    fn canonical(mut self) -> Self {
        if !self.0.iter().any(|(a, _)| matches!(a, Atom::Exp(_))) {
            return self;
        }
        let mut arg = Expr::zero();
        self.0.retain(|(a, q)| {
            if let Atom::Exp(inner) = a {
                arg += &inner.scale(&exp_to_rational(*q));
                false
            } else {
                true
            }
        });
        if !arg.is_zero() {
            let atom = Atom::Exp(Box::new(arg));
            let pos = self.0.binary_search_by(|(b, _)| b.cmp(&atom)).unwrap_err();
            self.0.insert(pos, (atom, Exponent::one()));
        }
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let q = a[i].1 + b[j].1;
                    if !q.is_zero() {
                        out.push((a[i].0.clone(), q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out).canonical()
    }

    pub fn pow(&self, q: Exponent) -> Monomial {
        if q.is_zero() {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(a, e)| (a.clone(), *e * q)).collect()).canonical()
    }

    /// The monomial with one factor removed.
    pub fn without(&self, index: usize) -> Monomial {
        let mut v = self.0.clone();
        v.remove(index);
        Monomial(v)
    }

    /// Sum of jet orders, used for graded ordering and diagnostics.
    pub fn degree(&self) -> Exponent {
        self.0.iter().map(|(_, q)| *q).sum()
    }
}

fn exp_to_rational(q: Exponent) -> Rational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Canonical expression: a sum of rational multiples of distinct monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Expr::constant(rat(n, d))
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut e = Expr::zero();
        e.add_term(m, c);
        e
    }

    pub fn atom(a: Atom) -> Self {
        match &a {
            Atom::Exp(arg) if arg.is_zero() => Expr::one(),
            _ => Expr::term(Monomial::atom(a), Rational::one()),
        }
    }

    pub fn var(k: usize) -> Self {
        Expr::atom(Atom::Var(k as u8))
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::atom(Atom::Exp(Box::new(arg)))
    }

    pub fn sin(arg: Expr) -> Self {
        if arg.is_zero() {
            return Expr::zero();
        }
        Expr::atom(Atom::Sin(Box::new(arg)))
    }

    pub fn cos(arg: Expr) -> Self {
        if arg.is_zero() {
            return Expr::one();
        }
        Expr::atom(Atom::Cos(Box::new(arg)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The constant value, if the expression has no atoms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// The single atom with coefficient one and exponent one, if that is
    /// what this expression is.
    pub fn as_atom(&self) -> Option<&Atom> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        match m.factors() {
            [(a, q)] if q.is_one() && c.is_one() => Some(a),
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Expr {
        let mut out = Expr::zero();
        for (mm, k) in &self.terms {
            out.add_term(mm.mul(m), k * c);
        }
        out
    }

    pub fn pow_int(&self, k: i64) -> Result<Expr, ExprError> {
        if k < 0 {
            return self.pow(Exponent::from_integer(k));
        }
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Rational power. Non-integer or negative powers are only defined for
    /// single terms whose coefficient has an exact rational root.
    pub fn pow(&self, q: Exponent) -> Result<Expr, ExprError> {
        if q.is_integer() && *q.numer() >= 0 {
            return self.pow_int(*q.numer());
        }
        let (m, c) = self
            .as_monomial()
            .ok_or(ExprError::NonMonomialPower { exponent: q })?;
        let c = rational_power(c, q)?;
        Ok(Expr::term(m.pow(q), c))
    }

    /// Division by a single term.
    pub fn div(&self, d: &Expr) -> Result<Expr, ExprError> {
        if d.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        let (m, c) = d
            .as_monomial()
            .ok_or_else(|| ExprError::NonMonomialDivisor(d.to_string()))?;
        Ok(self.mul_monomial(&m.pow(-Exponent::one()), &c.recip()))
    }

    /// Every atom that occurs, including atoms nested inside transcendental
    /// arguments and function argument lists.
    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut std::collections::BTreeSet<Atom>) {
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                a.collect_into(out);
            }
        }
    }

    /// Simultaneous substitution of atoms by expressions. Function atoms are
    /// replaced only when listed explicitly; their argument lists are left
    /// untouched.
    pub fn substitute(&self, rules: &BTreeMap<Atom, Expr>) -> Result<Expr, ExprError> {
        if rules.is_empty() {
            return Ok(self.clone());
        }
        let mut cache: BTreeMap<Atom, Expr> = BTreeMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut acc = Expr::constant(c.clone());
            let mut untouched = Monomial::one();
            for (a, q) in m.factors() {
                let replaced = match rules.get(a) {
                    Some(r) => Some(r.clone()),
                    None => match a {
                        Atom::Exp(_) | Atom::Sin(_) | Atom::Cos(_) => {
                            if let Some(e) = cache.get(a) {
                                Some(e.clone())
                            } else {
                                let e = a.map_arg(|arg| arg.substitute(rules))?;
                                cache.insert(a.clone(), e.clone());
                                Some(e)
                            }
                        }
                        _ => None,
                    },
                };
                match replaced {
                    Some(r) => acc = &acc * &r.pow(*q)?,
                    None => untouched = untouched.mul(&Monomial(vec![(a.clone(), *q)])),
                }
            }
            out += &acc.mul_monomial(&untouched, &Rational::one());
        }
        Ok(out)
    }

    /// Splits the expression by the multi-degree in the given atoms:
    /// returns a map from exponent vectors to coefficients that are free of
    /// those atoms (as far as top-level factors are concerned).
    pub fn coefficients(&self, atoms: &[Atom]) -> BTreeMap<Vec<Exponent>, Expr> {
        let mut out: BTreeMap<Vec<Exponent>, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key = vec![Exponent::zero(); atoms.len()];
            let mut rest = Vec::new();
            for (a, q) in m.factors() {
                match atoms.iter().position(|b| b == a) {
                    Some(i) => key[i] = *q,
                    None => rest.push((a.clone(), *q)),
                }
            }
            out.entry(key)
                .or_default()
                .add_term(Monomial(rest), c.clone());
        }
        out.retain(|_, e| !e.is_zero());
        out
    }

    /// Coefficient of `m` when the expression is read as a polynomial in
    /// the atoms of `m` (other atoms are treated as coefficients).
    pub fn coefficient_of(&self, atoms: &[Atom], exps: &[Exponent]) -> Expr {
        self.coefficients(atoms)
            .remove(exps)
            .unwrap_or_else(Expr::zero)
    }

    /// Largest jet order of any jet coordinate in the expression.
    pub fn max_jet_order(&self) -> usize {
        self.atoms()
            .iter()
            .filter_map(|a| match a {
                Atom::Jet { idx, .. } => Some(idx.len()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Leading term under the canonical ordering, if any.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// If `self = c * other` for a rational `c`, returns `c`.
    pub fn ratio_to(&self, other: &Expr) -> Option<Rational> {
        if other.is_zero() {
            return self.is_zero().then(Rational::zero);
        }
        let (m, c) = other.leading().unwrap();
        let k = self.terms.get(m)? / c;
        (self - &other.scale(&k)).is_zero().then_some(k)
    }
}

fn rational_power(c: &Rational, q: Exponent) -> Result<Rational, ExprError> {
    let err = || ExprError::IrrationalPower {
        coeff: c.clone(),
        exponent: q,
    };
    if c.is_zero() {
        return if *q.numer() > 0 {
            Ok(Rational::zero())
        } else {
            Err(ExprError::DivisionByZero)
        };
    }
    let (p, r) = (*q.numer(), *q.denom() as u32);
    let root = |x: &BigInt| -> Option<BigInt> {
        let neg = x.is_negative();
        if neg && r % 2 == 0 {
            return None;
        }
        let y = x.abs().nth_root(r);
        if num_traits::pow(y.clone(), r as usize) == x.abs() {
            Some(if neg { -y } else { y })
        } else {
            None
        }
    };
    let n = root(c.numer()).ok_or_else(err)?;
    let d = root(c.denom()).ok_or_else(err)?;
    let base = BigRational::new(n, d);
    let mag = p.unsigned_abs() as usize;
    let v = num_traits::pow(base, mag);
    Ok(if p < 0 { v.recip() } else { v })
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(f, self)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_atom(f, self)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::constant(c)
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            *self += &lhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |a, b| &a * &b)
    }
}

/// Float value of an exact rational.
pub fn to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Expr {
        Expr::atom(Atom::jet("u", &[]))
    }

    #[test]
    fn zero_is_empty_sum() {
        let e = &u() - &u();
        assert!(e.is_zero());
        assert_eq!(e, Expr::zero());
    }

    #[test]
    fn exp_factors_merge() {
        let a = Expr::exp(u());
        let b = Expr::exp(-u());
        assert_eq!(&a * &b, Expr::one());
        let sq = &a * &a;
        assert_eq!(sq, Expr::exp(u().scale(&int(2))));
    }

    #[test]
    fn rational_powers() {
        let e = u().pow(Exponent::new(1, 2)).unwrap();
        let back = e.pow(Exponent::from_integer(2)).unwrap();
        assert_eq!(back, u());
        let four = Expr::int(4).pow(Exponent::new(-1, 2)).unwrap();
        assert_eq!(four, Expr::rat(1, 2));
        assert!(Expr::int(2).pow(Exponent::new(1, 2)).is_err());
        assert!((&u() + &Expr::one()).pow(Exponent::new(1, 2)).is_err());
    }

    #[test]
    fn substitute_is_simultaneous() {
        let v = Expr::atom(Atom::jet("v", &[]));
        let rules: BTreeMap<_, _> = [(Atom::jet("u", &[]), v.clone()), (Atom::jet("v", &[]), u())]
            .into_iter()
            .collect();
        let e = &u() - &(&v * &v);
        assert_eq!(e.substitute(&rules).unwrap(), &v - &(&u() * &u()));
    }

    #[test]
    fn negative_integer_power_substitution() {
        let e = u().pow(Exponent::from_integer(-2)).unwrap();
        let rules: BTreeMap<_, _> = [(Atom::jet("u", &[]), Expr::int(3))].into_iter().collect();
        assert_eq!(e.substitute(&rules).unwrap(), Expr::rat(1, 9));
    }

    #[test]
    fn ratio_detection() {
        let e = &u() + &Expr::int(1);
        assert_eq!(e.scale(&rat(-3, 2)).ratio_to(&e), Some(rat(-3, 2)));
        assert_eq!(u().ratio_to(&e), None);
    }
}
