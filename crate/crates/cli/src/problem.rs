//! Problem files: one declaration per line, `key: value` or
//! `key name: value`, `#` starts a comment. The system header (`n`,
//! `potential`, `convection`, `diffusivity`) must come before anything that
//! uses the context.

use diffconv_core::catalog::{self, critical_mu, Diffusivity, Variant};
use diffconv_core::conslaw::ConservedVector;
use diffconv_core::expr::{Atom, Context, Expr, Rational};
use diffconv_core::jet::VectorField;
use diffconv_core::numeric::{Boundary, Scheme};
use diffconv_core::system::{
    make_adjoint_pair, make_diffusion_convection, EvolutionSystem, FunctionSpec,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Missing(String),
}

fn at(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Line {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Debug)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

#[derive(Clone, Debug, Default)]
pub struct NumericSpec {
    /// `(lo, hi, cells)` per direction.
    pub grid: Vec<(f64, f64, usize)>,
    pub t_end: Option<f64>,
    pub initial: Option<Expr>,
    pub boundary: Option<Boundary>,
    pub scheme: Option<Scheme>,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub left: String,
    pub right: String,
    pub combination: Vec<(Rational, String)>,
    pub text: String,
}

#[derive(Clone, Debug, Default)]
pub struct EquivalenceSpec {
    /// `None` asks for a random element drawn from the seed.
    pub entries: Option<Vec<(String, Vec<Rational>)>>,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub system: EvolutionSystem,
    pub vectors: Vec<Named<ConservedVector>>,
    pub characteristics: Vec<Named<Vec<Expr>>>,
    pub generators: Vec<Named<VectorField>>,
    pub witnesses: Vec<Named<Vec<Expr>>>,
    pub relations: Vec<Relation>,
    pub forward: Option<Vec<String>>,
    pub inverse: Option<Vec<String>>,
    pub function_maps: Vec<(String, String)>,
    pub equivalence: Option<EquivalenceSpec>,
    pub numeric: NumericSpec,
    /// Set when the pair's diffusivity is a catalog case, so generators may
    /// be named instead of spelled out.
    pub catalog_diffusivity: Option<Diffusivity>,
}

#[derive(Default)]
struct Header {
    n: Option<usize>,
    potential: Option<String>,
    convection: Option<String>,
    diffusivity: Option<String>,
}

fn spec_of(text: &str) -> FunctionSpec {
    let t = text.trim();
    let bare = t.strip_suffix("(u)").unwrap_or(t);
    if t == "0" {
        FunctionSpec::Zero
    } else if bare != "u"
        && bare.starts_with(|c: char| c.is_ascii_alphabetic())
        && bare.chars().all(|c| c.is_ascii_alphanumeric())
        && !matches!(bare, "exp" | "sin" | "cos")
    {
        FunctionSpec::symbol(bare)
    } else {
        FunctionSpec::explicit(t)
    }
}

impl Header {
    fn build(&self, line: usize) -> Result<EvolutionSystem, ProblemError> {
        let n = self
            .n
            .ok_or_else(|| at(line, "`n` must be declared first"))?;
        match (&self.potential, &self.diffusivity) {
            (Some(a), None) => {
                let b: Vec<FunctionSpec> = match &self.convection {
                    Some(c) => c.split(';').map(spec_of).collect(),
                    None => Vec::new(),
                };
                make_diffusion_convection(n, &spec_of(a), &b).map_err(|e| at(line, e.to_string()))
            }
            (None, Some(a)) => {
                let sys = make_adjoint_pair(n, &spec_of(a)).map_err(|e| at(line, e.to_string()))?;
                match catalog_case(n, a, &sys) {
                    Some(d) => catalog::pair_system(n, &d).map_err(|e| at(line, e.to_string())),
                    None => Ok(sys),
                }
            }
            (Some(_), Some(_)) => Err(at(
                line,
                "give either `potential` or `diffusivity`, not both",
            )),
            (None, None) => Err(at(line, "no system declared before first use")),
        }
    }
}

fn catalog_case(n: usize, text: &str, sys: &EvolutionSystem) -> Option<Diffusivity> {
    let mut cands = vec![Diffusivity::Generic, Diffusivity::Exp, Diffusivity::One];
    if n == 2 {
        cands.push(Diffusivity::Reciprocal);
    } else {
        cands.push(Diffusivity::Critical);
    }
    let t = text.trim();
    if let Some(mu) = t
        .strip_prefix("u^")
        .map(|m| m.trim_start_matches('(').trim_end_matches(')'))
        .and_then(parse_rational)
    {
        if n == 2 || mu != critical_mu(n) {
            cands.push(Diffusivity::Power(mu));
        }
    }
    cands.into_iter().find(|d| {
        make_adjoint_pair(n, &d.spec(n)).is_ok_and(|s| s.diffusivity() == sys.diffusivity())
    })
}

fn parse_expr(ctx: &Context, line: usize, text: &str) -> Result<Expr, ProblemError> {
    ctx.parse(text.trim())
        .map_err(|e| at(line, format!("`{}`: {e}", text.trim())))
}

fn parse_list(ctx: &Context, line: usize, text: &str) -> Result<Vec<Expr>, ProblemError> {
    text.split(';').map(|s| parse_expr(ctx, line, s)).collect()
}

/// `2`, `-1.5`, `pi`, `2*pi`, `-pi/2`.
pub fn parse_float(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().ok()?),
        None => (t, 1.0),
    };
    let (sign, body) = match num.strip_prefix('-') {
        Some(r) => (-1.0, r.trim()),
        None => (1.0, num),
    };
    let v = match body.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some(c) => c.trim_end_matches('*').trim().parse::<f64>().ok()? * std::f64::consts::PI,
        None => body.parse::<f64>().ok()?,
    };
    Some(sign * v / den)
}

fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?),
        None => (t.parse::<i64>().ok()?, 1),
    };
    (d != 0).then(|| diffconv_core::expr::rat(n, d))
}

/// `2*D_1 - 3/2*D_2 + P_t` as coefficients and generator names.
fn parse_combination(text: &str) -> Option<Vec<(Rational, String)>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    if rest == "0" {
        return Some(out);
    }
    let mut sign = 1;
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
            continue;
        }
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            continue;
        }
        let end = rest[1.min(rest.len())..]
            .find(['+', '-'])
            .map_or(rest.len(), |k| k + 1);
        let term = rest[..end].trim();
        if term.is_empty() {
            return None;
        }
        let (coef, name) = match term.split_once(['*', ' ']) {
            Some((c, nm)) => (parse_rational(c)?, nm.trim()),
            None => (diffconv_core::expr::int(1), term),
        };
        out.push((coef * diffconv_core::expr::int(sign), name.to_string()));
        sign = 1;
        rest = &rest[end..];
        if rest.trim().is_empty() {
            return Some(out);
        }
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let mut header = Header::default();
        let mut file: Option<ProblemFile> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or_default().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once(':')
                .ok_or_else(|| at(line, "expected `key: value`"))?;
            let mut words = key.split_whitespace();
            let kw = words.next().unwrap_or_default();
            let name = words.collect::<Vec<_>>().join(" ");
            let value = value.trim();
            match kw {
                "n" | "potential" | "convection" | "diffusivity" => {
                    if file.is_some() {
                        return Err(at(line, format!("`{kw}` after the system was first used")));
                    }
                    match kw {
                        "n" => {
                            let n: usize = value
                                .parse()
                                .map_err(|_| at(line, format!("bad dimension `{value}`")))?;
                            if !(1..=3).contains(&n) {
                                return Err(at(line, "n must be 1, 2 or 3"));
                            }
                            header.n = Some(n);
                        }
                        "potential" => header.potential = Some(value.into()),
                        "convection" => header.convection = Some(value.into()),
                        _ => header.diffusivity = Some(value.into()),
                    }
                    continue;
                }
                _ => {}
            }
            if file.is_none() {
                let mut f = ProblemFile::empty(header.build(line)?);
                if let Some(a) = &header.diffusivity {
                    f.catalog_diffusivity = catalog_case(f.system.n(), a, &f.system);
                }
                file = Some(f);
            }
            let f = file.as_mut().expect("built above");
            f.line(line, kw, &name, value)?;
        }
        match file {
            Some(f) => Ok(f),
            None => Ok(ProblemFile::empty(header.build(0).map_err(|_| {
                ProblemError::Missing("the file declares no system".into())
            })?)),
        }
    }

    fn empty(system: EvolutionSystem) -> Self {
        ProblemFile {
            system,
            vectors: Vec::new(),
            characteristics: Vec::new(),
            generators: Vec::new(),
            witnesses: Vec::new(),
            relations: Vec::new(),
            forward: None,
            inverse: None,
            function_maps: Vec::new(),
            equivalence: None,
            numeric: NumericSpec::default(),
            catalog_diffusivity: None,
        }
    }

    pub fn ctx(&self) -> &Context {
        self.system.ctx()
    }

    fn need_name(line: usize, kw: &str, name: &str) -> Result<(), ProblemError> {
        if name.is_empty() {
            return Err(at(
                line,
                format!("`{kw}` needs a name, as in `{kw} NAME: ...`"),
            ));
        }
        Ok(())
    }

    fn catalog_generator(
        &self,
        line: usize,
        name: &str,
        variant: &str,
    ) -> Result<VectorField, ProblemError> {
        let d = self.catalog_diffusivity.as_ref().ok_or_else(|| {
            at(
                line,
                "named generators need a pair whose diffusivity is a catalog case",
            )
        })?;
        let want = match variant {
            "" => None,
            "corrected" => Some(Variant::Corrected),
            other => return Err(at(line, format!("unknown generator variant `{other}`"))),
        };
        let all = catalog::generators(&self.system, d).map_err(|e| at(line, e.to_string()))?;
        let g = all
            .into_iter()
            .filter(|g| g.name == name)
            .find(|g| want.is_none_or(|v| g.variant == v))
            .ok_or_else(|| {
                at(
                    line,
                    format!("no catalog generator `{name}` for this diffusivity"),
                )
            })?;
        Ok(g.field)
    }

    fn line(&mut self, line: usize, kw: &str, name: &str, value: &str) -> Result<(), ProblemError> {
        let n = self.system.n();
        match kw {
            "function" => {
                let (fname, args) = value
                    .split_once('(')
                    .and_then(|(f, a)| Some((f.trim(), a.strip_suffix(')')?)))
                    .ok_or_else(|| at(line, "expected `function: name(arg, ...)`"))?;
                let args: Vec<&str> = args.split(',').map(str::trim).collect();
                self.system
                    .ctx_mut()
                    .declare_named(fname, &args)
                    .map_err(|e| at(line, e.to_string()))?;
            }
            "rule" => {
                let (lhs, rhs) = value
                    .split_once('=')
                    .ok_or_else(|| at(line, "expected `rule: f_x = expression`"))?;
                let l = parse_expr(self.ctx(), line, lhs)?;
                let r = parse_expr(self.ctx(), line, rhs)?;
                let Some(Atom::Func {
                    name: fname,
                    args,
                    idx,
                }) = l.as_atom().cloned()
                else {
                    return Err(at(
                        line,
                        "rule must start with a derivative of a declared function",
                    ));
                };
                if idx.is_empty() {
                    return Err(at(line, "rule must name a derivative, e.g. `alpha_t`"));
                }
                let base: Vec<Atom> = idx.iter().map(|&k| args[k as usize].clone()).collect();
                self.system
                    .ctx_mut()
                    .add_rule(&fname, &base, r)
                    .map_err(|e| at(line, e.to_string()))?;
            }
            "vector" => {
                Self::need_name(line, kw, name)?;
                let comps = parse_list(self.ctx(), line, value)?;
                if comps.len() != n + 1 {
                    return Err(at(line, format!("a vector needs {} components", n + 1)));
                }
                self.vectors.push(Named {
                    name: name.into(),
                    value: ConservedVector::new(comps),
                });
            }
            "characteristic" => {
                Self::need_name(line, kw, name)?;
                let comps = parse_list(self.ctx(), line, value)?;
                if comps.len() != self.system.equations().len() {
                    return Err(at(line, "one multiplier per equation"));
                }
                self.characteristics.push(Named {
                    name: name.into(),
                    value: comps,
                });
            }
            "generator" => {
                Self::need_name(line, kw, name)?;
                if let Some(rest) = value.strip_prefix("catalog") {
                    let field = self.catalog_generator(line, name, rest.trim())?;
                    self.generators.push(Named {
                        name: name.into(),
                        value: field,
                    });
                    return Ok(());
                }
                let mut parts = Vec::new();
                for part in value.split(';') {
                    let (var, coef) = part
                        .split_once('=')
                        .ok_or_else(|| at(line, "expected `var = coefficient` parts"))?;
                    parts.push((var.trim().to_string(), parse_expr(self.ctx(), line, coef)?));
                }
                let refs: Vec<(&str, Expr)> =
                    parts.iter().map(|(v, e)| (v.as_str(), e.clone())).collect();
                let field = VectorField::from_parts(self.ctx(), &refs)
                    .map_err(|e| at(line, e.to_string()))?;
                self.generators.push(Named {
                    name: name.into(),
                    value: field,
                });
            }
            "witness" => {
                Self::need_name(line, kw, name)?;
                let comps = parse_list(self.ctx(), line, value)?;
                if comps.len() != n + 1 {
                    return Err(at(line, format!("a witness needs {} components", n + 1)));
                }
                self.witnesses.push(Named {
                    name: name.into(),
                    value: comps,
                });
            }
            "relation" => {
                let (lhs, rhs) = value
                    .split_once('=')
                    .ok_or_else(|| at(line, "expected `relation: [A, B] = c*C + ...`"))?;
                let inner = lhs
                    .trim()
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .and_then(|s| s.split_once(','))
                    .ok_or_else(|| at(line, "left side must be `[A, B]`"))?;
                let combination = parse_combination(rhs)
                    .ok_or_else(|| at(line, format!("cannot read combination `{}`", rhs.trim())))?;
                self.relations.push(Relation {
                    left: inner.0.trim().into(),
                    right: inner.1.trim().into(),
                    combination,
                    text: value.into(),
                });
            }
            "forward" | "inverse" => {
                let comps: Vec<String> = value.split(';').map(|s| s.trim().to_string()).collect();
                for c in &comps {
                    parse_expr(self.ctx(), line, c)?;
                }
                if kw == "forward" {
                    self.forward = Some(comps);
                } else {
                    self.inverse = Some(comps);
                }
            }
            "map" => {
                let (old, new) = value
                    .split_once("->")
                    .ok_or_else(|| at(line, "expected `map: old -> new`"))?;
                self.function_maps
                    .push((old.trim().into(), new.trim().into()));
            }
            "equivalence" => {
                if value == "random" {
                    self.equivalence = Some(EquivalenceSpec { entries: None });
                    return Ok(());
                }
                let mut entries = Vec::new();
                for part in value.split(',') {
                    let (k, v) = part
                        .split_once('=')
                        .ok_or_else(|| at(line, "expected `key = value` entries"))?;
                    let vals = v
                        .split('|')
                        .map(parse_rational)
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| at(line, format!("bad rational in `{}`", v.trim())))?;
                    entries.push((k.trim().to_string(), vals));
                }
                self.equivalence = Some(EquivalenceSpec {
                    entries: Some(entries),
                });
            }
            "grid" => {
                let mut grid = Vec::new();
                for dir in value.split(';') {
                    let (range, cells) = dir
                        .split_once(':')
                        .or_else(|| dir.rsplit_once(" cells "))
                        .ok_or_else(|| at(line, "expected `lo .. hi : cells` per direction"))?;
                    let (lo, hi) = range
                        .split_once("..")
                        .ok_or_else(|| at(line, "expected `lo .. hi`"))?;
                    let lo = parse_float(lo)
                        .ok_or_else(|| at(line, format!("bad number `{}`", lo.trim())))?;
                    let hi = parse_float(hi)
                        .ok_or_else(|| at(line, format!("bad number `{}`", hi.trim())))?;
                    let cells: usize = cells
                        .trim()
                        .parse()
                        .map_err(|_| at(line, format!("bad cell count `{}`", cells.trim())))?;
                    grid.push((lo, hi, cells));
                }
                self.numeric.grid = grid;
            }
            "t_end" => {
                self.numeric.t_end = Some(
                    parse_float(value).ok_or_else(|| at(line, format!("bad number `{value}`")))?,
                );
            }
            "initial" => self.numeric.initial = Some(parse_expr(self.ctx(), line, value)?),
            "boundary" => {
                self.numeric.boundary = Some(match value {
                    "periodic" => Boundary::Periodic,
                    "compact" => Boundary::CompactSupport,
                    _ => return Err(at(line, "boundary is `periodic` or `compact`")),
                })
            }
            "scheme" => {
                self.numeric.scheme = Some(match value {
                    "conservative" => Scheme::Conservative,
                    "expanded" => Scheme::Expanded,
                    _ => return Err(at(line, "scheme is `conservative` or `expanded`")),
                })
            }
            other => return Err(at(line, format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}
