use std::collections::HashMap;

use thiserror::Error;

use super::{to_f64, Atom, Exponent, Expr};

pub type Point = HashMap<Atom, f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value assigned to `{0}`")]
    Unassigned(String),
    #[error("domain error: {base}^{exponent}")]
    Domain { base: f64, exponent: String },
}

/// Numeric realization of declared function symbols.
pub trait FunctionTable {
    /// Value of the derivative `name_{slots}` at the given argument values.
    fn value(&self, name: &str, slots: &[u8], args: &[f64]) -> Option<f64>;
}

fn power(base: f64, q: Exponent) -> Result<f64, EvalError> {
    let domain = || EvalError::Domain {
        base,
        exponent: q.to_string(),
    };
    if q.is_integer() {
        let k = *q.numer();
        if base == 0.0 && k < 0 {
            return Err(domain());
        }
        return Ok(base.powi(k as i32));
    }
    if base < 0.0 || (base == 0.0 && *q.numer() < 0) {
        return Err(domain());
    }
    Ok(base.powf(*q.numer() as f64 / *q.denom() as f64))
}

impl Expr {
    /// Floating evaluation. Function atoms are looked up in `point` first
    /// and then in `table` using their argument values.
    pub fn eval(&self, point: &Point, table: Option<&dyn FunctionTable>) -> Result<f64, EvalError> {
        let mut sum = 0.0;
        for (m, c) in self.terms() {
            let mut prod = to_f64(c);
            for (a, q) in m.factors() {
                prod *= power(eval_atom(a, point, table)?, *q)?;
            }
            sum += prod;
        }
        Ok(sum)
    }
}

fn eval_atom(a: &Atom, point: &Point, table: Option<&dyn FunctionTable>) -> Result<f64, EvalError> {
    if let Some(v) = point.get(a) {
        return Ok(*v);
    }
    match a {
        Atom::Exp(arg) => Ok(arg.eval(point, table)?.exp()),
        Atom::Sin(arg) => Ok(arg.eval(point, table)?.sin()),
        Atom::Cos(arg) => Ok(arg.eval(point, table)?.cos()),
        Atom::Func { name, args, idx } => {
            let table = table.ok_or_else(|| EvalError::Unassigned(a.to_string()))?;
            let vals = args
                .iter()
                .map(|x| eval_atom(x, point, Some(table)))
                .collect::<Result<Vec<_>, _>>()?;
            table
                .value(name, idx, &vals)
                .ok_or_else(|| EvalError::Unassigned(a.to_string()))
        }
        _ => Err(EvalError::Unassigned(a.to_string())),
    }
}

/// An expression lowered to slot-indexed floating arithmetic for repeated
/// evaluation on grids.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(f64, Vec<(Factor, Exponent)>)>,
}

#[derive(Clone, Debug)]
enum Factor {
    Slot(usize),
    Exp(Compiled),
    Sin(Compiled),
    Cos(Compiled),
}

impl Compiled {
    /// Compiles `e` against an ordered list of atoms; the evaluation input
    /// is a slice aligned with `slots`.
    pub fn new(e: &Expr, slots: &[Atom]) -> Result<Self, EvalError> {
        let mut terms = Vec::new();
        for (m, c) in e.terms() {
            let mut fs = Vec::new();
            for (a, q) in m.factors() {
                let f = match a {
                    Atom::Exp(arg) => Factor::Exp(Compiled::new(arg, slots)?),
                    Atom::Sin(arg) => Factor::Sin(Compiled::new(arg, slots)?),
                    Atom::Cos(arg) => Factor::Cos(Compiled::new(arg, slots)?),
                    other => Factor::Slot(
                        slots
                            .iter()
                            .position(|s| s == other)
                            .ok_or_else(|| EvalError::Unassigned(other.to_string()))?,
                    ),
                };
                fs.push((f, *q));
            }
            terms.push((to_f64(c), fs));
        }
        Ok(Compiled { terms })
    }

    pub fn eval(&self, values: &[f64]) -> Result<f64, EvalError> {
        let mut sum = 0.0;
        for (c, fs) in &self.terms {
            let mut prod = *c;
            for (f, q) in fs {
                let base = match f {
                    Factor::Slot(i) => values[*i],
                    Factor::Exp(g) => g.eval(values)?.exp(),
                    Factor::Sin(g) => g.eval(values)?.sin(),
                    Factor::Cos(g) => g.eval(values)?.cos(),
                };
                prod *= power(base, *q)?;
            }
            sum += prod;
        }
        Ok(sum)
    }
}
