//! Precedence-climbing parser for the expression DSL.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | '(' expr ')' | call | name
//! ```
//!
//! Names are `t`, `x<k>`, dependent variables with optional derivative
//! suffix (`u_x1x2`, `v_t`), and declared function symbols, optionally with
//! primes (`a'(u)`), a suffix (`alpha_tx1`) or an argument list that must
//! match the declaration. `d(e, a, ...)` is the partial derivative with
//! respect to atoms, `D(e, x1, ...)` the total derivative.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{Atom, Context, Exponent, Expr, ExprError, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at offset {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c == '#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && b[i + 1].is_ascii_digit()) {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let mut num: BigInt = text[start..i].parse().unwrap_or_default();
            let mut den = BigInt::from(1);
            if i < b.len() && b[i] == b'.' {
                i += 1;
                let fs = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                for d in text[fs..i].bytes() {
                    num = num * 10 + (d - b'0') as i32;
                    den *= 10;
                }
            }
            out.push((start, Tok::Num(BigRational::new(num, den))));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        if "+-*/^(),'".contains(c) {
            out.push((start, Tok::Op(c)));
            i += 1;
            continue;
        }
        return Err(ParseError {
            pos: start,
            message: format!("unexpected character `{c}`"),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Context,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

pub(super) fn parse(ctx: &Context, text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        ctx,
        toks,
        pos: 0,
        end: text.len(),
    };
    if p.toks.is_empty() {
        return Err(p.err_here("empty expression"));
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err_here("unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.offset(),
            message: msg.into(),
        }
    }

    fn err_at(&self, pos: usize, e: ExprError) -> ParseError {
        ParseError {
            pos,
            message: e.to_string(),
        }
    }

    fn peek_op(&self, c: char) -> bool {
        matches!(self.toks.get(self.pos), Some((_, Tok::Op(o))) if *o == c)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek_op(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_op(c) {
            Ok(())
        } else {
            Err(self.err_here(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc += self.term()?;
            } else if self.eat_op('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek_op('/') {
                self.pos += 1;
                let at = self.offset();
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|e| self.err_at(at, e))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let base = self.primary()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let exp_at = self.offset();
        let q = self.unary()?;
        let q = q.as_constant().ok_or_else(|| {
            self.err_at(
                exp_at,
                ExprError::Invalid("exponent must be a rational constant".into()),
            )
        })?;
        let q = to_exponent(&q)
            .ok_or_else(|| self.err_at(exp_at, ExprError::Invalid("exponent too large".into())))?;
        base.pow(q).map_err(|e| self.err_at(at, e))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (at, tok) = match self.toks.get(self.pos) {
            Some(t) => t.clone(),
            None => return Err(self.err_here("unexpected end of input")),
        };
        self.pos += 1;
        match tok {
            Tok::Num(r) => Ok(Expr::constant(r)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.name(at, &name),
            Tok::Op(c) => Err(ParseError {
                pos: at,
                message: format!("unexpected `{c}`"),
            }),
        }
    }

    fn call_args(&mut self) -> Result<Vec<(usize, Expr)>, ParseError> {
        self.expect_op('(')?;
        let mut args = Vec::new();
        loop {
            let at = self.offset();
            args.push((at, self.expr()?));
            if self.eat_op(',') {
                continue;
            }
            self.expect_op(')')?;
            return Ok(args);
        }
    }

    fn atom_arg(&self, at: usize, e: &Expr) -> Result<Atom, ParseError> {
        e.as_atom().cloned().ok_or(ParseError {
            pos: at,
            message: format!("`{e}` is not a single variable"),
        })
    }

    fn name(&mut self, at: usize, name: &str) -> Result<Expr, ParseError> {
        match name {
            "exp" | "sin" | "cos" if self.peek_op('(') => {
                let args = self.call_args()?;
                let [(_, a)] = <[_; 1]>::try_from(args).map_err(|_| ParseError {
                    pos: at,
                    message: format!("`{name}` takes one argument"),
                })?;
                return Ok(match name {
                    "exp" => Expr::exp(a),
                    "sin" => Expr::sin(a),
                    _ => Expr::cos(a),
                });
            }
            "d" | "D" if self.peek_op('(') => {
                let mut args = self.call_args()?.into_iter();
                let (_, mut e) = args.next().unwrap();
                for (pos, a) in args {
                    let atom = self.atom_arg(pos, &a)?;
                    e = if name == "d" {
                        self.ctx.diff_atom(&e, &atom)
                    } else {
                        let Atom::Var(k) = atom else {
                            return Err(ParseError {
                                pos,
                                message: "total derivative needs an independent variable".into(),
                            });
                        };
                        crate::jet::total_derivative(self.ctx, &e, k as usize)
                            .map_err(|err| self.err_at(pos, err))?
                    };
                }
                return Ok(e);
            }
            _ => {}
        }
        if let Some(a) = self.ctx.atom_by_name(name) {
            return Ok(Expr::atom(a));
        }
        let (base, suffix) = match name.split_once('_') {
            Some((b, s)) => (b, Some(s)),
            None => (name, None),
        };
        let Some(decl) = self.ctx.func_decl(base) else {
            return Err(ParseError {
                pos: at,
                message: format!("undeclared symbol `{name}`"),
            });
        };
        let mut wrt = Vec::new();
        if let Some(s) = suffix {
            wrt = self.func_suffix(at, &decl.args, s)?;
        }
        while self.eat_op('\'') {
            if decl.args.len() != 1 {
                return Err(ParseError {
                    pos: at,
                    message: format!("prime on `{base}` needs a single-argument function"),
                });
            }
            wrt.push(decl.args[0].clone());
        }
        if self.peek_op('(') {
            let args = self.call_args()?;
            let given: Vec<Atom> = args
                .iter()
                .map(|(p, e)| self.atom_arg(*p, e))
                .collect::<Result<_, _>>()?;
            if given.as_slice() != &*decl.args {
                return Err(ParseError {
                    pos: at,
                    message: format!("arguments of `{base}` do not match its declaration"),
                });
            }
        }
        self.ctx.func(base, &wrt).map_err(|e| self.err_at(at, e))
    }

    fn func_suffix(&self, at: usize, args: &[Atom], s: &str) -> Result<Vec<Atom>, ParseError> {
        let bad = || ParseError {
            pos: at,
            message: format!("bad derivative suffix `{s}`"),
        };
        let mut out = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let mut matched = None;
            for a in args {
                let label = match a {
                    Atom::Var(_) => a.to_string(),
                    Atom::Jet { dep, idx } if idx.is_empty() => dep.to_string(),
                    _ => continue,
                };
                if rest.starts_with(&label) {
                    let next = &rest[label.len()..];
                    // `x1` must not swallow the prefix of `x12`
                    if matches!(a, Atom::Var(_)) && next.starts_with(|c: char| c.is_ascii_digit()) {
                        continue;
                    }
                    matched = Some((a.clone(), label.len()));
                    break;
                }
            }
            let (a, len) = matched.ok_or_else(bad)?;
            out.push(a);
            rest = &rest[len..];
        }
        Ok(out)
    }
}

fn to_exponent(q: &Rational) -> Option<Exponent> {
    if q.is_zero() {
        return Some(Exponent::from_integer(0));
    }
    Some(Exponent::new(q.numer().to_i64()?, q.denom().to_i64()?))
}
