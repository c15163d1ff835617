//! Finite-difference cross-checks: method-of-lines solutions of
//! `u_t = (A)_ii + (B^i)_i` in one or two space dimensions and discrete
//! conservation monitors for densities.

use std::fmt::Write as _;

use thiserror::Error;

use crate::conslaw::ConservedVector;
use crate::expr::{Atom, Compiled, Context, EvalError, Expr, ExprError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("only n = 1 and n = 2 are supported, got {0}")]
    Dimension(usize),
    #[error("time step {dt} exceeds the stability bound {bound}")]
    Cfl { dt: f64, bound: f64 },
    #[error("non-finite value at step {step}, t = {t}")]
    NotFinite { step: usize, t: f64 },
    #[error("`{0}` needs derivatives beyond second order or a non-grid symbol")]
    Stencil(String),
    #[error("unknown alpha kind `{0}`")]
    UnknownKind(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Zero flux through the edges; initial data should vanish near them.
    CompactSupport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Differences of face fluxes of `A` and `B^i`.
    Conservative,
    /// Central differences of the expanded equation; for negative tests.
    Expanded,
}

/// A desk-scale initial-boundary value problem.
#[derive(Clone, Debug)]
pub struct GridProblem {
    pub n: usize,
    /// `[lo, hi]` per space direction.
    pub domain: Vec<(f64, f64)>,
    pub cells: Vec<usize>,
    pub dt: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub scheme: Scheme,
    /// Initial data in `x1..xn`.
    pub initial: Expr,
    /// Potential `A(u)` and convection `B^i(u)` as expressions in `u`.
    pub potential: Expr,
    pub convection: Vec<Expr>,
    /// Frames kept per unit of simulated time, besides the first and last.
    pub frames: usize,
}

impl GridProblem {
    /// A problem with the largest stable time step for the initial data.
    pub fn new(
        n: usize,
        domain: Vec<(f64, f64)>,
        cells: Vec<usize>,
        t_end: f64,
        initial: Expr,
        potential: Expr,
    ) -> Result<Self, NumericError> {
        let mut p = GridProblem {
            n,
            domain,
            cells,
            dt: 0.0,
            t_end,
            boundary: Boundary::Periodic,
            scheme: Scheme::Conservative,
            initial,
            potential,
            convection: Vec::new(),
            frames: 20,
        };
        p.dt = p.stable_dt()?;
        Ok(p)
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.domain
            .iter()
            .zip(&self.cells)
            .map(|((a, b), &c)| (b - a) / c as f64)
            .collect()
    }

    fn check_shape(&self) -> Result<(), NumericError> {
        if !(1..=2).contains(&self.n) {
            return Err(NumericError::Dimension(self.n));
        }
        if self.domain.len() != self.n || self.cells.len() != self.n {
            return Err(NumericError::Grid("domain and cells need n entries".into()));
        }
        if self.cells.iter().any(|&c| c < 3) {
            return Err(NumericError::Grid(
                "at least three cells per direction".into(),
            ));
        }
        if !self.convection.is_empty() && self.convection.len() != self.n {
            return Err(NumericError::Grid("convection needs n entries".into()));
        }
        Ok(())
    }

    /// `0.25 min h^2 / max |A_u|` over the initial data.
    pub fn stable_dt(&self) -> Result<f64, NumericError> {
        self.check_shape()?;
        let grid = Grid::new(self);
        let u0 = grid.sample(&self.initial)?;
        let au = Compiled::new(&diff_u(&self.potential), &[u_atom()])?;
        let mut m: f64 = 0.0;
        for &u in &u0 {
            m = m.max(au.eval(&[u])?.abs());
        }
        let h2 = self
            .spacing()
            .iter()
            .map(|h| h * h)
            .fold(f64::INFINITY, f64::min);
        Ok(0.25 * h2 / m.max(1e-12))
    }
}

fn u_atom() -> Atom {
    Atom::jet("u", &[])
}

fn diff_u(e: &Expr) -> Expr {
    Context::new(1, &["u"]).diff_atom(e, &u_atom())
}

/// Cell-centred grid in row-major order (x1 fastest).
#[derive(Clone, Debug)]
pub struct Grid {
    pub n: usize,
    pub cells: Vec<usize>,
    pub h: Vec<f64>,
    pub lo: Vec<f64>,
    pub boundary: Boundary,
}

impl Grid {
    fn new(p: &GridProblem) -> Self {
        Grid {
            n: p.n,
            cells: p.cells.clone(),
            h: p.spacing(),
            lo: p.domain.iter().map(|d| d.0).collect(),
            boundary: p.boundary,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    fn coords(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        (0..self.n)
            .map(|d| {
                let i = rest % self.cells[d];
                rest /= self.cells[d];
                self.lo[d] + (i as f64 + 0.5) * self.h[d]
            })
            .collect()
    }

    /// Neighbour of `idx` shifted by `s` cells along direction `d`;
    /// `None` past a non-periodic edge.
    fn shift(&self, idx: usize, d: usize, s: i64) -> Option<usize> {
        let stride: usize = self.cells[..d].iter().product();
        let c = self.cells[d] as i64;
        let i = ((idx / stride) % self.cells[d]) as i64;
        let j = i + s;
        let j = match self.boundary {
            Boundary::Periodic => j.rem_euclid(c),
            Boundary::CompactSupport if (0..c).contains(&j) => j,
            Boundary::CompactSupport => return None,
        };
        Some((idx as i64 + (j - i) * stride as i64) as usize)
    }

    /// Value at a shifted cell, reflecting across non-periodic edges.
    fn at(&self, u: &[f64], idx: usize, d: usize, s: i64) -> f64 {
        match self.shift(idx, d, s) {
            Some(j) => u[j],
            None => u[idx],
        }
    }

    fn sample(&self, e: &Expr) -> Result<Vec<f64>, NumericError> {
        let slots: Vec<Atom> = (1..=self.n).map(Atom::x).collect();
        let c = Compiled::new(e, &slots)?;
        (0..self.len())
            .map(|i| c.eval(&self.coords(i)).map_err(NumericError::from))
            .collect()
    }
}

/// Saved frames of a run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub frames: Vec<Vec<f64>>,
    /// Convection and potential kept for boundary-flux bookkeeping.
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.frames.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Plain-text table of one frame: coordinates then `u`, one row per
    /// grid point.
    pub fn export_frame(&self, k: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# t = {}", self.times[k]);
        for (i, u) in self.frames[k].iter().enumerate() {
            for x in self.grid.coords(i) {
                let _ = write!(s, "{x:.10e} ");
            }
            let _ = writeln!(s, "{u:.16e}");
        }
        s
    }

    /// Maximum pointwise error of the final frame against `exact(t, x)`.
    pub fn max_error(&self, exact: &Expr) -> Result<f64, NumericError> {
        let t = *self.times.last().unwrap_or(&0.0);
        let mut slots = vec![Atom::t()];
        slots.extend((1..=self.grid.n).map(Atom::x));
        let c = Compiled::new(exact, &slots)?;
        let mut m: f64 = 0.0;
        for (i, u) in self.last().iter().enumerate() {
            let mut p = vec![t];
            p.extend(self.grid.coords(i));
            m = m.max((c.eval(&p)? - u).abs());
        }
        Ok(m)
    }
}

struct Rhs {
    a: Compiled,
    b: Vec<Compiled>,
    au: Compiled,
    auu: Compiled,
    bu: Vec<Compiled>,
    scheme: Scheme,
}

impl Rhs {
    fn new(p: &GridProblem) -> Result<Self, NumericError> {
        let u = [u_atom()];
        let conv: Vec<Expr> = if p.convection.is_empty() {
            vec![Expr::zero(); p.n]
        } else {
            p.convection.clone()
        };
        let au = diff_u(&p.potential);
        Ok(Rhs {
            a: Compiled::new(&p.potential, &u)?,
            b: conv
                .iter()
                .map(|b| Compiled::new(b, &u))
                .collect::<Result<_, _>>()?,
            auu: Compiled::new(&diff_u(&au), &u)?,
            au: Compiled::new(&au, &u)?,
            bu: conv
                .iter()
                .map(|b| Compiled::new(&diff_u(b), &u))
                .collect::<Result<_, _>>()?,
            scheme: p.scheme,
        })
    }

    fn eval(&self, g: &Grid, u: &[f64], out: &mut [f64]) -> Result<(), NumericError> {
        let m = g.len();
        match self.scheme {
            Scheme::Conservative => {
                let a: Vec<f64> = u
                    .iter()
                    .map(|&x| self.a.eval(&[x]))
                    .collect::<Result<_, _>>()?;
                out.iter_mut().for_each(|o| *o = 0.0);
                for d in 0..g.n {
                    let b: Vec<f64> = u
                        .iter()
                        .map(|&x| self.b[d].eval(&[x]))
                        .collect::<Result<_, _>>()?;
                    let h = g.h[d];
                    // flux through the upper face of each cell
                    for i in 0..m {
                        let Some(j) = g.shift(i, d, 1) else { continue };
                        let f = (a[j] - a[i]) / h + 0.5 * (b[j] + b[i]);
                        out[i] += f / h;
                        out[j] -= f / h;
                    }
                }
            }
            Scheme::Expanded => {
                for i in 0..m {
                    let (au, auu) = (self.au.eval(&[u[i]])?, self.auu.eval(&[u[i]])?);
                    let mut s = 0.0;
                    for d in 0..g.n {
                        let h = g.h[d];
                        let (l, r) = (g.at(u, i, d, -1), g.at(u, i, d, 1));
                        let ux = (r - l) / (2.0 * h);
                        let uxx = (r - 2.0 * u[i] + l) / (h * h);
                        s += au * uxx + auu * ux * ux + self.bu[d].eval(&[u[i]])? * ux;
                    }
                    out[i] = s;
                }
            }
        }
        Ok(())
    }
}

/// Classical fourth-order Runge-Kutta in time.
pub fn solve(p: &GridProblem) -> Result<Trajectory, NumericError> {
    p.check_shape()?;
    let bound = p.stable_dt()?;
    if p.dt > bound * (1.0 + 1e-12) || p.dt <= 0.0 {
        return Err(NumericError::Cfl { dt: p.dt, bound });
    }
    let g = Grid::new(p);
    let rhs = Rhs::new(p)?;
    let mut u = g.sample(&p.initial)?;
    let steps = (p.t_end / p.dt).ceil().max(1.0) as usize;
    let dt = p.t_end / steps as f64;
    let every = ((steps as f64) / (p.frames.max(1) as f64 * p.t_end.max(1.0)))
        .ceil()
        .max(1.0) as usize;
    let m = g.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
    );
    let mut traj = Trajectory {
        grid: g.clone(),
        times: vec![0.0],
        frames: vec![u.clone()],
        steps,
    };
    for step in 1..=steps {
        rhs.eval(&g, &u, &mut k1)?;
        for i in 0..m {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        rhs.eval(&g, &tmp, &mut k2)?;
        for i in 0..m {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        rhs.eval(&g, &tmp, &mut k3)?;
        for i in 0..m {
            tmp[i] = u[i] + dt * k3[i];
        }
        rhs.eval(&g, &tmp, &mut k4)?;
        for i in 0..m {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * dt;
        if u.iter().any(|x| !x.is_finite()) {
            return Err(NumericError::NotFinite { step, t });
        }
        if step % every == 0 || step == steps {
            traj.times.push(t);
            traj.frames.push(u.clone());
        }
    }
    Ok(traj)
}

/// Evaluates an expression in `t`, `x` and jets of `u` up to order two on
/// every grid cell of a frame.
struct StencilEval {
    compiled: Compiled,
    slots: Vec<Atom>,
}

impl StencilEval {
    fn new(e: &Expr, n: usize) -> Result<Self, NumericError> {
        let mut slots = Vec::new();
        for a in e.atoms() {
            match &a {
                Atom::Var(k) if (*k as usize) <= n => slots.push(a),
                Atom::Jet { dep, idx } if &**dep == "u" && idx.len() <= 2 && !idx.contains(&0) => {
                    slots.push(a)
                }
                Atom::Exp(_) | Atom::Sin(_) | Atom::Cos(_) => {}
                _ => return Err(NumericError::Stencil(e.to_string())),
            }
        }
        Ok(StencilEval {
            compiled: Compiled::new(e, &slots)?,
            slots,
        })
    }

    fn jet_value(g: &Grid, u: &[f64], i: usize, idx: &[u8]) -> f64 {
        match idx {
            [] => u[i],
            [d] => {
                let d = *d as usize - 1;
                (g.at(u, i, d, 1) - g.at(u, i, d, -1)) / (2.0 * g.h[d])
            }
            [a, b] if a == b => {
                let d = *a as usize - 1;
                (g.at(u, i, d, 1) - 2.0 * u[i] + g.at(u, i, d, -1)) / (g.h[d] * g.h[d])
            }
            [a, b] => {
                let (d, e) = (*a as usize - 1, *b as usize - 1);
                let pp = g.shift(i, d, 1).and_then(|j| g.shift(j, e, 1));
                let pm = g.shift(i, d, 1).and_then(|j| g.shift(j, e, -1));
                let mp = g.shift(i, d, -1).and_then(|j| g.shift(j, e, 1));
                let mm = g.shift(i, d, -1).and_then(|j| g.shift(j, e, -1));
                match (pp, pm, mp, mm) {
                    (Some(pp), Some(pm), Some(mp), Some(mm)) => {
                        (u[pp] - u[pm] - u[mp] + u[mm]) / (4.0 * g.h[d] * g.h[e])
                    }
                    _ => 0.0,
                }
            }
            _ => 0.0,
        }
    }

    fn eval(&self, g: &Grid, u: &[f64], t: f64, i: usize) -> Result<f64, NumericError> {
        let x = g.coords(i);
        let vals: Vec<f64> = self
            .slots
            .iter()
            .map(|a| match a {
                Atom::Var(0) => t,
                Atom::Var(k) => x[*k as usize - 1],
                Atom::Jet { idx, .. } => Self::jet_value(g, u, i, idx),
                _ => 0.0,
            })
            .collect();
        Ok(self.compiled.eval(&vals)?)
    }
}

/// Result of a discrete conservation check.
#[derive(Clone, Debug)]
pub struct MonitorReport {
    pub times: Vec<f64>,
    /// `sum T h^n` per frame, plus accumulated outflow for compact support.
    pub values: Vec<f64>,
    /// `max |Q(t) - Q(0)| / (|Q(0)| + 1)`.
    pub drift: f64,
    pub tol: f64,
    pub passed: bool,
    pub strictly_decreasing: bool,
}

/// Tracks `Q(t) = sum T h^n` over the frames of a trajectory.
pub fn conservation_monitor(
    traj: &Trajectory,
    f: &ConservedVector,
    tol: f64,
) -> Result<MonitorReport, NumericError> {
    let g = &traj.grid;
    let dens = StencilEval::new(f.density(), g.n)?;
    let vol = g.cell_volume();
    let mut values = Vec::with_capacity(traj.frames.len());
    for (u, &t) in traj.frames.iter().zip(&traj.times) {
        let mut q = 0.0;
        for i in 0..g.len() {
            q += dens.eval(g, u, t, i)?;
        }
        values.push(q * vol);
    }
    if g.boundary == Boundary::CompactSupport {
        let outflow = boundary_outflow(traj, f)?;
        for (v, o) in values.iter_mut().zip(outflow) {
            *v += o;
        }
    }
    let q0 = values[0];
    let drift = values.iter().map(|q| (q - q0).abs()).fold(0.0, f64::max) / (q0.abs() + 1.0);
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    Ok(MonitorReport {
        times: traj.times.clone(),
        values,
        drift,
        tol,
        passed: drift <= tol,
        strictly_decreasing,
    })
}

/// Time-integrated flux of `X^i` through the edges of the box, trapezoid
/// rule over frames.
fn boundary_outflow(traj: &Trajectory, f: &ConservedVector) -> Result<Vec<f64>, NumericError> {
    let g = &traj.grid;
    let fluxes = f
        .fluxes()
        .iter()
        .map(|x| StencilEval::new(x, g.n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rates = Vec::with_capacity(traj.frames.len());
    for (u, &t) in traj.frames.iter().zip(&traj.times) {
        let mut r = 0.0;
        for (d, x) in fluxes.iter().enumerate() {
            let face: f64 = g.cell_volume() / g.h[d];
            for i in 0..g.len() {
                if g.shift(i, d, 1).is_none() {
                    r += x.eval(g, u, t, i)? * face;
                }
                if g.shift(i, d, -1).is_none() {
                    r -= x.eval(g, u, t, i)? * face;
                }
            }
        }
        rates.push(r);
    }
    let mut acc = vec![0.0];
    for k in 1..rates.len() {
        let dt = traj.times[k] - traj.times[k - 1];
        acc.push(acc[k - 1] + 0.5 * dt * (rates[k] + rates[k - 1]));
    }
    Ok(acc)
}

/// Closed-form solutions of the constraints on characteristics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaKind {
    /// `Delta alpha = 0`.
    Harmonic,
    /// `alpha_t + Delta alpha = 0`, trigonometric-exponential member.
    BackwardHeat,
    /// `alpha_t + Delta alpha = 0`, `|x|^2 - 2 m t`.
    BackwardHeatPolynomial,
    /// `sum_{i<m} alpha_ii + alpha_mm - alpha_m = 0`.
    ShiftedHarmonic,
}

impl std::str::FromStr for AlphaKind {
    type Err = NumericError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "harmonic" => Ok(AlphaKind::Harmonic),
            "backward-heat" => Ok(AlphaKind::BackwardHeat),
            "backward-heat-polynomial" => Ok(AlphaKind::BackwardHeatPolynomial),
            "shifted-harmonic" => Ok(AlphaKind::ShiftedHarmonic),
            _ => Err(NumericError::UnknownKind(s.into())),
        }
    }
}

/// A member of the solution family of `kind` in the variables
/// `x1..x_m` (and `t`), with wave number `k` where it applies.
pub fn alpha_library(kind: AlphaKind, m: usize, k: i64) -> Result<Expr, NumericError> {
    let ctx = Context::new(m.max(1), &["u"]);
    let text = match (kind, m) {
        (AlphaKind::Harmonic, 0) => "1".to_string(),
        (AlphaKind::Harmonic, 1) => "x1".to_string(),
        (AlphaKind::Harmonic, _) => "x1^2 - x2^2".to_string(),
        (AlphaKind::BackwardHeat, 0) => "1".to_string(),
        (AlphaKind::BackwardHeat, _) => format!("exp({}*t)*sin({k}*x1)", k * k),
        (AlphaKind::BackwardHeatPolynomial, _) => {
            let xs: Vec<String> = (1..=m).map(|i| format!("x{i}^2")).collect();
            if m == 0 {
                "1".to_string()
            } else {
                format!("{} - {}*t", xs.join(" + "), 2 * m)
            }
        }
        (AlphaKind::ShiftedHarmonic, 0) => {
            return Err(NumericError::UnknownKind(
                "shifted-harmonic needs m >= 1".into(),
            ))
        }
        (AlphaKind::ShiftedHarmonic, m) => format!("exp(x{m})"),
    };
    ctx.parse(&text)
        .map_err(|e| NumericError::Expr(ExprError::Invalid(e.to_string())))
}

/// `alpha` satisfies the defining constraint of `kind` in `m` variables.
pub fn alpha_residual(kind: AlphaKind, m: usize, alpha: &Expr) -> Expr {
    let ctx = Context::new(m.max(1), &["u"]);
    let dd = |e: &Expr, i: usize| ctx.diff_atom(e, &Atom::x(i));
    let mut lap = Expr::zero();
    for i in 1..=m {
        lap += dd(&dd(alpha, i), i);
    }
    match kind {
        AlphaKind::Harmonic => lap,
        AlphaKind::BackwardHeat | AlphaKind::BackwardHeatPolynomial => {
            &ctx.diff_atom(alpha, &Atom::t()) + &lap
        }
        AlphaKind::ShiftedHarmonic => &lap - &dd(alpha, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c1() -> Context {
        Context::new(1, &["u"])
    }

    fn heat_problem(cells: usize) -> GridProblem {
        let c = c1();
        GridProblem::new(
            1,
            vec![(0.0, 2.0 * PI)],
            vec![cells],
            1.0,
            c.parse("sin(x1)").unwrap(),
            c.parse("u").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn heat_decay_matches_exact_solution() {
        let traj = solve(&heat_problem(128)).unwrap();
        let err = traj
            .max_error(&c1().parse("exp(-t)*sin(x1)").unwrap())
            .unwrap();
        assert!(err < 1e-4, "error {err}");
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let mut p = heat_problem(64);
        p.dt *= 2.0;
        assert!(matches!(solve(&p), Err(NumericError::Cfl { .. })));
    }

    #[test]
    fn library_members_satisfy_constraints() {
        for kind in [
            AlphaKind::Harmonic,
            AlphaKind::BackwardHeat,
            AlphaKind::BackwardHeatPolynomial,
            AlphaKind::ShiftedHarmonic,
        ] {
            for m in 1..=3 {
                for k in 1..=3 {
                    let a = alpha_library(kind, m, k).unwrap();
                    assert!(alpha_residual(kind, m, &a).is_zero(), "{kind:?} {m} {a}");
                }
            }
        }
        let c = Context::new(2, &["u"]);
        assert_eq!(
            alpha_library(AlphaKind::BackwardHeatPolynomial, 2, 1).unwrap(),
            c.parse("x1^2 + x2^2 - 4*t").unwrap()
        );
        assert_eq!(
            alpha_library(AlphaKind::BackwardHeat, 1, 1).unwrap(),
            c.parse("exp(t)*sin(x1)").unwrap()
        );
    }

    #[test]
    fn frame_export_has_one_row_per_cell() {
        let mut p = heat_problem(16);
        p.t_end = 0.01;
        p.dt = p.stable_dt().unwrap();
        let traj = solve(&p).unwrap();
        let table = traj.export_frame(0);
        assert_eq!(table.lines().count(), 17);
    }
}
