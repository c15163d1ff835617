use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Atom, Exponent, Expr};

fn simple_arg(a: &Atom) -> Option<String> {
    match a {
        Atom::Var(_) => Some(a.to_string()),
        Atom::Jet { dep, idx } if idx.is_empty() => Some(dep.to_string()),
        _ => None,
    }
}

pub(super) fn write_atom(f: &mut fmt::Formatter<'_>, a: &Atom) -> fmt::Result {
    match a {
        Atom::Var(0) => f.write_char('t'),
        Atom::Var(k) => write!(f, "x{k}"),
        Atom::Jet { dep, idx } => {
            f.write_str(dep)?;
            if !idx.is_empty() {
                f.write_char('_')?;
                for &s in idx {
                    write_atom(f, &Atom::Var(s))?;
                }
            }
            Ok(())
        }
        Atom::Func { name, args, idx } => {
            if idx.is_empty() {
                return f.write_str(name);
            }
            let names: Option<Vec<String>> =
                idx.iter().map(|&s| simple_arg(&args[s as usize])).collect();
            match names {
                Some(names) => write!(f, "{name}_{}", names.concat()),
                None => {
                    write!(f, "d({name}")?;
                    for &s in idx {
                        write!(f, ",{}", args[s as usize])?;
                    }
                    f.write_char(')')
                }
            }
        }
        Atom::Exp(arg) => write!(f, "exp({arg})"),
        Atom::Sin(arg) => write!(f, "sin({arg})"),
        Atom::Cos(arg) => write!(f, "cos({arg})"),
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, q: Exponent) -> fmt::Result {
    if q.is_one() {
        Ok(())
    } else if q.is_integer() && *q.numer() > 0 {
        write!(f, "^{}", q.numer())
    } else {
        write!(f, "^({q})")
    }
}

pub(super) fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    if e.is_zero() {
        return f.write_char('0');
    }
    for (i, (m, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => f.write_char('-')?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let mag = c.abs();
        if m.is_one() {
            write!(f, "{mag}")?;
            continue;
        }
        if !mag.is_one() {
            write!(f, "{mag}*")?;
        }
        for (j, (a, q)) in m.factors().iter().enumerate() {
            if j > 0 {
                f.write_char('*')?;
            }
            write_atom(f, a)?;
            write_exponent(f, *q)?;
        }
    }
    Ok(())
}
