use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use super::{Expr, ExprError};

pub type Sym = Arc<str>;

/// Sorted list of differentiation slots. For jet coordinates a slot is an
/// independent-variable index (0 = t, k = x^k); for function symbols it is
/// a position in the declared argument list.
pub type MultiIndex = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// Independent variable: 0 is t, k >= 1 is x^k.
    Var(u8),
    /// Jet coordinate w_J of a dependent variable.
    Jet {
        dep: Sym,
        idx: MultiIndex,
    },
    /// Derivative of a declared function symbol with respect to its
    /// argument slots.
    Func {
        name: Sym,
        args: Arc<[Atom]>,
        idx: MultiIndex,
    },
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Atom {
    pub fn jet(dep: &str, idx: &[u8]) -> Atom {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        Atom::Jet {
            dep: Sym::from(dep),
            idx,
        }
    }

    pub fn t() -> Atom {
        Atom::Var(0)
    }

    pub fn x(k: usize) -> Atom {
        Atom::Var(k as u8)
    }

    /// Differentiation order used by the graded term ordering.
    pub fn order(&self) -> usize {
        match self {
            Atom::Jet { idx, .. } | Atom::Func { idx, .. } => idx.len(),
            _ => 0,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Atom::Var(_) => 0,
            Atom::Jet { .. } => 1,
            Atom::Func { .. } => 2,
            Atom::Exp(_) => 3,
            Atom::Sin(_) => 4,
            Atom::Cos(_) => 5,
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Atom::Jet { .. })
    }

    /// Jet coordinate with one more slot.
    pub fn jet_extended(&self, slot: u8) -> Option<Atom> {
        match self {
            Atom::Jet { dep, idx } => {
                let mut idx = idx.clone();
                let pos = idx.partition_point(|&s| s <= slot);
                idx.insert(pos, slot);
                Some(Atom::Jet {
                    dep: dep.clone(),
                    idx,
                })
            }
            _ => None,
        }
    }

    /// Rebuilds a transcendental atom after mapping its argument.
    pub(crate) fn map_arg(
        &self,
        f: impl FnOnce(&Expr) -> Result<Expr, ExprError>,
    ) -> Result<Expr, ExprError> {
        Ok(match self {
            Atom::Exp(a) => Expr::exp(f(a)?),
            Atom::Sin(a) => Expr::sin(f(a)?),
            Atom::Cos(a) => Expr::cos(f(a)?),
            other => Expr::atom(other.clone()),
        })
    }

    pub(crate) fn collect_into(&self, out: &mut BTreeSet<Atom>) {
        out.insert(self.clone());
        match self {
            Atom::Exp(a) | Atom::Sin(a) | Atom::Cos(a) => a.collect_atoms(out),
            Atom::Func { args, .. } => {
                for a in args.iter() {
                    a.collect_into(out);
                }
            }
            _ => {}
        }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.rank().cmp(&other.rank()))
            .then_with(|| match (self, other) {
                (Atom::Var(a), Atom::Var(b)) => a.cmp(b),
                (Atom::Jet { dep: d1, idx: i1 }, Atom::Jet { dep: d2, idx: i2 }) => {
                    d1.cmp(d2).then_with(|| i1.cmp(i2))
                }
                (
                    Atom::Func {
                        name: n1,
                        args: a1,
                        idx: i1,
                    },
                    Atom::Func {
                        name: n2,
                        args: a2,
                        idx: i2,
                    },
                ) => n1.cmp(n2).then_with(|| i1.cmp(i2)).then_with(|| a1.cmp(a2)),
                (Atom::Exp(a), Atom::Exp(b))
                | (Atom::Sin(a), Atom::Sin(b))
                | (Atom::Cos(a), Atom::Cos(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
