use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Atom, Exponent, Expr, ExprError, Monomial, MultiIndex, ParseError, Sym};

/// Orders available above the declared system order before total
/// differentiation fails.
pub const ORDER_SLACK: usize = 2;

/// A declared function symbol together with its argument list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: Sym,
    pub args: Arc<[Atom]>,
}

/// Rewrite `name_{base} -> replacement`. Applied to every derivative of
/// `name` whose slot multiset contains `base`; the leftover slots are
/// applied to the replacement as partial derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: Sym,
    pub base: MultiIndex,
    pub replacement: Expr,
}

/// Declaration context: dimension, dependent variables, function symbols
/// and their rewrite rules, jet order bound. Built once, then read-only.
#[derive(Clone, Debug)]
pub struct Context {
    n: usize,
    deps: Vec<Sym>,
    funcs: BTreeMap<Sym, FuncDecl>,
    rules: Vec<Rule>,
    rho: usize,
}

impl Context {
    pub fn new(n: usize, deps: &[&str]) -> Self {
        assert!(n >= 1, "at least one space variable");
        Context {
            n,
            deps: deps.iter().map(|d| Sym::from(*d)).collect(),
            funcs: BTreeMap::new(),
            rules: Vec::new(),
            rho: 2,
        }
    }

    /// Sets the declared system order; the jet bound is this plus
    /// [`ORDER_SLACK`].
    pub fn with_order(mut self, rho: usize) -> Self {
        assert!(rho >= 2);
        self.rho = rho;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of independent variables, t included.
    pub fn n_indep(&self) -> usize {
        self.n + 1
    }

    pub fn deps(&self) -> &[Sym] {
        &self.deps
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn max_order(&self) -> usize {
        self.rho + ORDER_SLACK
    }

    pub fn funcs(&self) -> impl Iterator<Item = &FuncDecl> {
        self.funcs.values()
    }

    pub fn func_decl(&self, name: &str) -> Option<&FuncDecl> {
        self.funcs.get(name)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn var_name(k: usize) -> String {
        if k == 0 {
            "t".into()
        } else {
            format!("x{k}")
        }
    }

    /// Resolves `t`, `x3`, `u`, `v_x1x2` and similar names to atoms.
    pub fn atom_by_name(&self, name: &str) -> Option<Atom> {
        if let Some(k) = parse_var(name) {
            return (k <= self.n).then_some(Atom::Var(k as u8));
        }
        let (base, suffix) = match name.split_once('_') {
            Some((b, s)) => (b, Some(s)),
            None => (name, None),
        };
        let dep = self.deps.iter().find(|d| &***d == base)?;
        let idx = match suffix {
            None => Vec::new(),
            Some(s) => self.parse_var_suffix(s)?,
        };
        Some(Atom::jet(dep, &idx))
    }

    /// Parses a derivative suffix made of `t` and `x<k>` tokens.
    pub fn parse_var_suffix(&self, s: &str) -> Option<MultiIndex> {
        let mut out = Vec::new();
        let b = s.as_bytes();
        let mut i = 0;
        while i < b.len() {
            match b[i] {
                b't' => {
                    out.push(0);
                    i += 1;
                }
                b'x' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    let k: usize = s.get(start..j)?.parse().ok()?;
                    if k == 0 || k > self.n {
                        return None;
                    }
                    out.push(k as u8);
                    i = j;
                }
                _ => return None,
            }
        }
        out.sort_unstable();
        (!out.is_empty()).then_some(out)
    }

    pub fn declare(&mut self, name: &str, args: Vec<Atom>) -> Result<(), ExprError> {
        if self.funcs.contains_key(name)
            || self.deps.iter().any(|d| &**d == name)
            || parse_var(name).is_some()
            || !name.chars().all(|c| c.is_ascii_alphanumeric())
            || !name.starts_with(|c: char| c.is_ascii_alphabetic())
        {
            return Err(ExprError::Invalid(format!("cannot declare `{name}`")));
        }
        for a in &args {
            if !matches!(a, Atom::Var(_) | Atom::Jet { .. }) {
                return Err(ExprError::Invalid(format!(
                    "argument `{a}` of `{name}` must be a variable or jet coordinate"
                )));
            }
        }
        let name = Sym::from(name);
        self.funcs.insert(
            name.clone(),
            FuncDecl {
                name,
                args: args.into(),
            },
        );
        Ok(())
    }

    /// Declares a function by argument names, e.g. `("alpha", &["t", "x1"])`.
    pub fn declare_named(&mut self, name: &str, args: &[&str]) -> Result<(), ExprError> {
        let args = args
            .iter()
            .map(|a| {
                self.atom_by_name(a)
                    .ok_or_else(|| ExprError::UnknownSymbol(a.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.declare(name, args)
    }

    /// Adds a rewrite rule. `base` lists argument atoms (with repetition).
    pub fn add_rule(
        &mut self,
        name: &str,
        base: &[Atom],
        replacement: Expr,
    ) -> Result<(), ExprError> {
        let decl = self
            .funcs
            .get(name)
            .ok_or_else(|| ExprError::UnknownSymbol(name.into()))?;
        let mut slots = Vec::new();
        for a in base {
            let k = decl.args.iter().position(|b| b == a).ok_or_else(|| {
                ExprError::Invalid(format!("`{a}` is not an argument of `{name}`"))
            })?;
            slots.push(k as u8);
        }
        slots.sort_unstable();
        self.rules.push(Rule {
            name: decl.name.clone(),
            base: slots,
            replacement,
        });
        Ok(())
    }

    pub fn var(&self, k: usize) -> Expr {
        Expr::var(k)
    }

    pub fn jet(&self, dep: &str, idx: &[u8]) -> Expr {
        Expr::atom(Atom::jet(dep, idx))
    }

    /// Derivative of a declared function symbol with respect to the given
    /// argument atoms, rewrite rules applied.
    pub fn func(&self, name: &str, wrt: &[Atom]) -> Result<Expr, ExprError> {
        let decl = self
            .funcs
            .get(name)
            .ok_or_else(|| ExprError::UnknownSymbol(name.into()))?;
        let mut e = self.func_slots(&decl.name, &decl.args, Vec::new());
        for a in wrt {
            if !decl.args.contains(a) {
                return Err(ExprError::Invalid(format!(
                    "`{a}` is not an argument of `{name}`"
                )));
            }
            e = self.diff_atom(&e, a);
        }
        Ok(e)
    }

    pub(crate) fn func_slots(&self, name: &Sym, args: &Arc<[Atom]>, idx: MultiIndex) -> Expr {
        for rule in self.rules.iter().filter(|r| r.name == *name) {
            if let Some(rest) = multiset_minus(&idx, &rule.base) {
                let mut e = rule.replacement.clone();
                for slot in rest {
                    e = self.diff_atom(&e, &args[slot as usize]);
                }
                return e;
            }
        }
        Expr::atom(Atom::Func {
            name: name.clone(),
            args: args.clone(),
            idx,
        })
    }

    /// Applies a derivation given its action on non-transcendental atoms.
    /// Exp, sin and cos are handled by the chain rule.
    pub fn derive<E: From<ExprError>>(
        &self,
        e: &Expr,
        base: &mut dyn FnMut(&Atom) -> Result<Expr, E>,
    ) -> Result<Expr, E> {
        let mut memo: HashMap<Atom, Expr> = HashMap::new();
        self.derive_memo(e, base, &mut memo)
    }

    fn derive_memo<E: From<ExprError>>(
        &self,
        e: &Expr,
        base: &mut dyn FnMut(&Atom) -> Result<Expr, E>,
        memo: &mut HashMap<Atom, Expr>,
    ) -> Result<Expr, E> {
        let mut out = Expr::zero();
        for (m, c) in e.terms() {
            for (a, q) in m.factors() {
                let da = match memo.get(a) {
                    Some(d) => d.clone(),
                    None => {
                        let d = match a {
                            Atom::Exp(arg) => {
                                let inner = self.derive_memo(arg, base, memo)?;
                                &Expr::atom(a.clone()) * &inner
                            }
                            Atom::Sin(arg) => {
                                let inner = self.derive_memo(arg, base, memo)?;
                                &Expr::cos((**arg).clone()) * &inner
                            }
                            Atom::Cos(arg) => {
                                let inner = self.derive_memo(arg, base, memo)?;
                                -(&Expr::sin((**arg).clone()) * &inner)
                            }
                            _ => base(a)?,
                        };
                        memo.insert(a.clone(), d.clone());
                        d
                    }
                };
                if da.is_zero() {
                    continue;
                }
                let lowered = m.mul(&Monomial(vec![(a.clone(), -Exponent::one())]));
                let coeff = c * super::exp_to_rational(*q);
                out += da.mul_monomial(&lowered, &coeff);
            }
        }
        Ok(out)
    }

    /// Formal partial derivative treating every other atom as independent.
    /// Function symbols differentiate only with respect to their declared
    /// arguments.
    pub fn diff_atom(&self, e: &Expr, wrt: &Atom) -> Expr {
        let mut base = |b: &Atom| -> Result<Expr, ExprError> {
            if b == wrt {
                return Ok(Expr::one());
            }
            if let Atom::Func { name, args, idx } = b {
                if let Some(k) = args.iter().position(|x| x == wrt) {
                    let mut idx = idx.clone();
                    let pos = idx.partition_point(|&s| s <= k as u8);
                    idx.insert(pos, k as u8);
                    return Ok(self.func_slots(name, args, idx));
                }
            }
            Ok(Expr::zero())
        };
        self.derive(e, &mut base)
            .expect("partial differentiation is infallible")
    }

    /// Replaces the function symbol `name` and all of its derivatives by
    /// `replacement` (written in the declared argument atoms) and its
    /// partial derivatives.
    pub fn replace_function(
        &self,
        e: &Expr,
        name: &str,
        replacement: &Expr,
    ) -> Result<Expr, ExprError> {
        let mut rules = std::collections::BTreeMap::new();
        for a in e.atoms() {
            if let Atom::Func { name: f, args, idx } = &a {
                if &**f == name {
                    let mut r = replacement.clone();
                    for &s in idx {
                        r = self.diff_atom(&r, &args[s as usize]);
                    }
                    rules.insert(a.clone(), r);
                }
            }
        }
        e.substitute(&rules)
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        super::parse::parse(self, text)
    }

    /// Equality of canonical forms. Debug builds additionally evaluate both
    /// sides at random points as a canonicalization audit.
    pub fn equal(&self, a: &Expr, b: &Expr) -> bool {
        let same = (a - b).is_zero();
        #[cfg(debug_assertions)]
        if same {
            debug_assert!(random_eval_agrees(a, b, 8, 0x5eed));
        }
        same
    }
}

/// Evaluates two expressions at `points` random positive rational points
/// (every leaf atom drawn independently) and compares to 1e-9 relative.
pub fn random_eval_agrees(a: &Expr, b: &Expr, points: usize, seed: u64) -> bool {
    let mut leaves: Vec<Atom> = a
        .atoms()
        .into_iter()
        .chain(b.atoms())
        .filter(|x| !matches!(x, Atom::Exp(_) | Atom::Sin(_) | Atom::Cos(_)))
        .collect();
    leaves.sort();
    leaves.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..points {
        let point: super::Point = leaves
            .iter()
            .map(|x| {
                let num: i64 = rng.gen_range(1..=40);
                (x.clone(), num as f64 / 20.0)
            })
            .collect();
        let (va, vb) = match (a.eval(&point, None), b.eval(&point, None)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return false,
        };
        let scale = va.abs().max(vb.abs()).max(1.0);
        if (va - vb).abs() > 1e-9 * scale {
            return false;
        }
    }
    true
}

fn parse_var(name: &str) -> Option<usize> {
    if name == "t" {
        return Some(0);
    }
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.starts_with('0') {
        return None;
    }
    rest.parse().ok()
}

fn multiset_minus(idx: &[u8], base: &[u8]) -> Option<Vec<u8>> {
    let mut rest = idx.to_vec();
    for b in base {
        let pos = rest.iter().position(|x| x == b)?;
        rest.remove(pos);
    }
    Some(rest)
}
