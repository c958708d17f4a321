//! Wavefront tracing for generating families `F_i(x, y, t, q, z) = g_i(x, y, t, q) - z`.
//!
//! The critical set of each stratum is parametrised by the free variables: equations linear in a
//! variable with constant coefficient are eliminated exactly (the rational core does this), a
//! single leftover equation is solved per grid point in floating point. Everything downstream of
//! the elimination is `f64`.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jetalg::{Monomial, Poly, Role, Q};
use crate::tangent::Family;

pub const TOL_CLOSED: f64 = 1e-9;
pub const TOL_CONTINUATION: f64 = 1e-6;
pub const TOL_BOX: f64 = 1e-12;
pub const DEFAULT_HALF_WIDTH: f64 = 1.5;
pub const DEFAULT_ANGLE_TOL: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum FrontError {
    #[error("component {0}: F is not affine in z with dF/dz = -1")]
    NotAffineInZ(usize),
    #[error("component {component}: {msg}")]
    Unsupported { component: usize, msg: String },
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("intersection counting needs curves; fix all but one q with a slice")]
    NeedsSlice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stratum {
    /// `sigma = {}`: critical in `x`, `x >= 0`.
    Interior,
    /// `sigma = {1}`: `x = 0`.
    Boundary,
}

impl Stratum {
    pub fn as_str(self) -> &'static str {
        match self {
            Stratum::Interior => "interior",
            Stratum::Boundary => "boundary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontPoint {
    pub component: usize,
    pub stratum: Stratum,
    pub t: f64,
    /// All `q_1..q_n`, slice values included.
    pub q: Vec<f64>,
    pub z: f64,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub s: f64,
    pub p: Vec<f64>,
    pub closed_form: bool,
}

/// Samples over the free-variable grid; `rows == 1` for curves.
#[derive(Clone, Debug)]
pub struct Branch {
    pub stratum: Stratum,
    pub closed_form: bool,
    pub rows: usize,
    pub cols: usize,
    pub points: Vec<Option<FrontPoint>>,
    /// Root count at each sample; neighbours connect only when counts agree.
    pub group: Vec<u32>,
}

impl Branch {
    fn linked(&self, a: usize, b: usize) -> bool {
        self.points[a].is_some() && self.points[b].is_some() && self.group[a] == self.group[b]
    }

    /// Runs of linked samples along each grid row (and column, for sheets).
    pub fn polylines(&self) -> Vec<Vec<&FrontPoint>> {
        let mut out = Vec::new();
        let mut run = |idx: &mut dyn Iterator<Item = usize>| {
            let mut cur: Vec<&FrontPoint> = Vec::new();
            let mut prev: Option<usize> = None;
            for i in idx {
                match (prev, &self.points[i]) {
                    (Some(p), Some(pt)) if self.linked(p, i) => cur.push(pt),
                    (_, Some(pt)) => {
                        if cur.len() >= 2 {
                            out.push(std::mem::take(&mut cur));
                        }
                        cur = vec![pt];
                    }
                    (_, None) => {
                        if cur.len() >= 2 {
                            out.push(std::mem::take(&mut cur));
                        }
                        cur.clear();
                    }
                }
                prev = Some(i);
            }
            if cur.len() >= 2 {
                out.push(cur);
            }
        };
        for r in 0..self.rows {
            run(&mut (0..self.cols).map(|c| r * self.cols + c));
        }
        out
    }

    pub fn count(&self) -> usize {
        self.points.iter().filter(|p| p.is_some()).count()
    }
}

#[derive(Clone, Debug)]
pub struct ComponentTrace {
    pub component: usize,
    pub branches: Vec<Branch>,
    /// Samples dropped because a solved parameter left the box.
    pub truncated: usize,
    /// Samples dropped by the residual check (expected 0).
    pub rejected: usize,
    pub strata: Vec<Stratum>,
}

impl ComponentTrace {
    pub fn points(&self) -> impl Iterator<Item = &FrontPoint> {
        self.branches.iter().flat_map(|b| b.points.iter().flatten())
    }

    pub fn stratum_count(&self, s: Stratum) -> usize {
        self.branches.iter().filter(|b| b.stratum == s).map(Branch::count).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    /// Free parameter value and `z`.
    pub at: (f64, f64),
    pub angle: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairEvents {
    pub i: usize,
    pub j: usize,
    pub count: usize,
    pub crossings: Vec<Crossing>,
    pub degenerate: bool,
    /// Set for `t = 0` frames.
    pub unreliable: bool,
}

#[derive(Clone, Debug)]
pub struct FrontFrame {
    pub t: f64,
    pub n: usize,
    pub free: Vec<String>,
    pub fixed: Vec<(String, f64)>,
    pub components: Vec<ComponentTrace>,
    pub events: Vec<PairEvents>,
    pub unreliable: bool,
    pub half_width: f64,
}

impl FrontFrame {
    pub fn is_curve(&self) -> bool {
        self.free.len() == 1
    }

    pub fn points(&self) -> impl Iterator<Item = &FrontPoint> {
        self.components.iter().flat_map(|c| c.points())
    }
}

#[derive(Clone, Debug)]
pub struct TraceOptions {
    /// Samples per free axis.
    pub grid: usize,
    /// Free variables range over `[-half_width, half_width]` (`x` over `[0, half_width]`).
    pub half_width: f64,
    /// Parameters held fixed, e.g. `("q2", 0.1)` for a slice.
    pub fixed: Vec<(String, f64)>,
    /// Stop exact elimination at the last critical equation and solve it by bisection.
    pub force_numeric: bool,
    pub angle_tol: f64,
}

impl TraceOptions {
    /// 801 samples for curves, 101 per axis for surfaces.
    pub fn for_free_dims(d: usize) -> Self {
        TraceOptions {
            grid: if d <= 1 { 801 } else { 101 },
            half_width: DEFAULT_HALF_WIDTH,
            fixed: Vec::new(),
            force_numeric: false,
            angle_tol: DEFAULT_ANGLE_TOL,
        }
    }

    pub fn for_family(fam: &Family, fixed: Vec<(String, f64)>) -> Self {
        let d = fam.params_of(Role::Param).len().saturating_sub(fixed.len());
        TraceOptions { fixed, ..Self::for_free_dims(d) }
    }
}

/// Float copy of a polynomial over the component's variables.
#[derive(Clone, Debug)]
struct FPoly(Vec<(Vec<(usize, i32)>, f64)>);

impl FPoly {
    fn new(p: &Poly) -> Self {
        FPoly(
            p.terms()
                .iter()
                .map(|(m, c)| {
                    let e = m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as i32)).collect();
                    (e, c.to_f64().expect("finite coefficient"))
                })
                .collect(),
        )
    }

    fn eval(&self, v: &[f64]) -> f64 {
        self.0.iter().map(|(e, c)| e.iter().fold(*c, |acc, &(i, k)| acc * v[i].powi(k))).sum()
    }
}

/// Exact parametrisation of one stratum.
struct Plan {
    /// `(var, expression in the remaining unknowns)`, substituted in order.
    solved: Vec<(usize, FPoly)>,
    /// Leftover equation as coefficients of powers of `numeric.0`.
    numeric: Option<(usize, Vec<FPoly>)>,
    free: Vec<usize>,
    empty: bool,
}

fn make_plan(
    g: &Poly,
    component: usize,
    stratum: Stratum,
    fixed: &[usize],
    force_numeric: bool,
) -> Result<Plan, FrontError> {
    let spec = g.spec().clone();
    let xs = spec.indices(Role::Corner);
    let ys = spec.indices(Role::Fiber);
    let qs = spec.indices(Role::Param);
    let mut crit: Vec<usize> = ys.clone();
    if let Some(&x) = xs.first() {
        match stratum {
            Stratum::Interior => crit.insert(0, x),
            Stratum::Boundary => {}
        }
    }
    let mut eqs: Vec<Poly> = crit.iter().map(|&v| g.diff(v)).collect();
    if stratum == Stratum::Boundary {
        let x = xs[0];
        eqs = eqs.iter().map(|e| e.restrict_zero(x)).collect();
    }
    let mut unknowns: Vec<usize> = crit.clone();
    unknowns.extend(qs.iter().filter(|i| !fixed.contains(i)));
    unknowns.sort_unstable();
    // Pivot preference: q, then y, then x.
    let rank = |i: usize| match spec.var(i).role {
        Role::Param => 0,
        Role::Fiber => 1,
        _ => 2,
    };
    let mut solved: Vec<(usize, Poly)> = Vec::new();
    let mut empty = false;
    loop {
        eqs.retain(|e| !e.is_zero());
        if eqs.iter().any(|e| e.degree() == Some(0)) {
            empty = true;
            break;
        }
        if force_numeric && eqs.len() <= 1 {
            break;
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for (ei, e) in eqs.iter().enumerate() {
            for &v in &unknowns {
                if e.degree_in_var(v) != 1 {
                    continue;
                }
                let d = e.diff(v);
                if d.degree() != Some(0) {
                    continue;
                }
                let key = (rank(v), v, ei);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, v, ei)) = best else { break };
        let e = eqs.remove(ei);
        let c = e.diff(v).constant_term();
        let rest = e.sub(&Poly::var(&spec, v).scale(&c));
        let expr = rest.scale(&(-Q::one() / c));
        for (_, s) in solved.iter_mut() {
            *s = s.subs(v, &expr, None);
        }
        for e in eqs.iter_mut() {
            *e = e.subs(v, &expr, None);
        }
        solved.push((v, expr));
        unknowns.retain(|&u| u != v);
    }
    let numeric = match eqs.len() {
        0 => None,
        1 => {
            let e = &eqs[0];
            let pick = unknowns.iter().copied().filter(|&v| e.involves(v)).min_by_key(|&v| {
                let pref = match spec.var(v).role {
                    Role::Fiber => 0,
                    Role::Corner => 1,
                    _ => 2,
                };
                (pref, v)
            });
            let Some(v) = pick else {
                return Err(FrontError::Unsupported { component, msg: "critical equation has no unknown".into() });
            };
            let deg = e.degree_in_var(v) as usize;
            let mut coeffs = vec![Poly::zero(&spec); deg + 1];
            for (m, c) in e.terms() {
                let k = m.0[v] as usize;
                let mut mm = m.0.clone();
                mm[v] = 0;
                coeffs[k].add_term(Monomial(mm), c.clone());
            }
            unknowns.retain(|&u| u != v);
            Some((v, coeffs.iter().map(FPoly::new).collect()))
        }
        _ => {
            return Err(FrontError::Unsupported {
                component,
                msg: format!("{} critical equations left after elimination", eqs.len()),
            })
        }
    };
    Ok(Plan { solved: solved.iter().map(|(v, p)| (*v, FPoly::new(p))).collect(), numeric, free: unknowns, empty })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64)).collect()
}

fn horner(c: &[f64], v: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * v + a)
}

/// Real roots of `sum c_k v^k` in `[lo, hi]`, ascending; `closed` selects the quadratic formula.
fn roots_in(c: &[f64], lo: f64, hi: f64, samples: usize, closed: bool) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().is_some_and(|a| a.abs() < 1e-300) {
        c.pop();
    }
    let inside = |v: &f64| *v >= lo - TOL_BOX && *v <= hi + TOL_BOX;
    let mut out: Vec<f64> = if closed && c.len() <= 3 {
        match c.len() {
            1 => Vec::new(),
            2 => vec![-c[0] / c[1]],
            _ => {
                let (a, b, k) = (c[2], c[1], c[0]);
                let disc = b * b - 4.0 * a * k;
                if disc < 0.0 {
                    Vec::new()
                } else if disc == 0.0 {
                    vec![-b / (2.0 * a)]
                } else {
                    let s = disc.sqrt();
                    let qq = -0.5 * (b + b.signum() * s);
                    if qq == 0.0 {
                        vec![0.0]
                    } else {
                        vec![qq / a, k / qq]
                    }
                }
            }
        }
    } else {
        let xs = linspace(lo, hi, samples.max(201));
        let fs: Vec<f64> = xs.iter().map(|&v| horner(&c, v)).collect();
        let mut r = Vec::new();
        for i in 0..xs.len() {
            if fs[i] == 0.0 {
                r.push(xs[i]);
                continue;
            }
            if i + 1 < xs.len() && fs[i + 1] != 0.0 && fs[i].signum() != fs[i + 1].signum() {
                let (mut a, mut b, mut fa) = (xs[i], xs[i + 1], fs[i]);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = horner(&c, m);
                    if fm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                r.push(0.5 * (a + b));
            }
        }
        r
    };
    out.retain(inside);
    out.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

/// Traces one component `F = g - z` at time `t`; strata `{}` and, when `r = 1`, `{x}`.
pub fn trace_component(f: &Poly, component: usize, t: f64, opts: &TraceOptions) -> Result<ComponentTrace, FrontError> {
    let spec = f.spec().clone();
    let z = spec.height().ok_or(FrontError::NotAffineInZ(component))?;
    if f.diff(z) != Poly::constant(&spec, -Q::one()) {
        return Err(FrontError::NotAffineInZ(component));
    }
    if spec.r() > 1 || spec.k() > 1 || spec.count(Role::Unfold) > 0 {
        return Err(FrontError::Unsupported { component, msg: "fronts need r <= 1, k <= 1 and only t, q, z".into() });
    }
    let g = f.add(&Poly::var(&spec, z));
    let qs = spec.indices(Role::Param);
    let mut fixed_idx = Vec::new();
    let mut fixed_val = Vec::new();
    for (name, v) in &opts.fixed {
        let i =
            spec.index(name).filter(|i| qs.contains(i)).ok_or_else(|| FrontError::UnknownParameter(name.clone()))?;
        fixed_idx.push(i);
        fixed_val.push(*v);
    }
    let n_free = qs.len() - fixed_idx.len();
    let xs = spec.indices(Role::Corner);
    let ys = spec.indices(Role::Fiber);
    let tidx = spec.time();
    let crit_all: Vec<usize> = xs.iter().chain(&ys).copied().collect();
    let dg: Vec<(usize, FPoly)> = crit_all.iter().map(|&v| (v, FPoly::new(&g.diff(v)))).collect();
    let gf = FPoly::new(&g);
    let dt = tidx.map(|i| FPoly::new(&g.diff(i)));
    let dq: Vec<FPoly> = qs.iter().map(|&i| FPoly::new(&g.diff(i))).collect();
    let b = opts.half_width;

    let strata: Vec<Stratum> =
        if xs.is_empty() { vec![Stratum::Interior] } else { vec![Stratum::Interior, Stratum::Boundary] };
    let mut out = ComponentTrace { component, branches: Vec::new(), truncated: 0, rejected: 0, strata: strata.clone() };
    for stratum in strata {
        let plan = make_plan(&g, component, stratum, &fixed_idx, opts.force_numeric)?;
        if plan.free.len() != n_free {
            return Err(FrontError::Unsupported {
                component,
                msg: format!("critical set is not a graph over {n_free} free variable(s)"),
            });
        }
        if plan.empty {
            continue;
        }
        let range = |v: usize| if xs.contains(&v) { (0.0, b) } else { (-b, b) };
        let axes: Vec<Vec<f64>> = plan
            .free
            .iter()
            .map(|&v| {
                let (lo, hi) = range(v);
                linspace(lo, hi, opts.grid)
            })
            .collect();
        let (rows, cols) = match axes.len() {
            0 => (1, 1),
            1 => (1, axes[0].len()),
            _ => (axes[0].len(), axes[1].len()),
        };
        let mut base = vec![0.0; spec.len()];
        if let Some(ti) = tidx {
            base[ti] = t;
        }
        for (i, v) in fixed_idx.iter().zip(&fixed_val) {
            base[*i] = *v;
        }
        let closed_form = plan.numeric.is_none() || !opts.force_numeric;
        let mut branches: Vec<Branch> = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let cell = r * cols + c;
                let mut vals = base.clone();
                match axes.len() {
                    0 => {}
                    1 => vals[plan.free[0]] = axes[0][c],
                    _ => {
                        vals[plan.free[0]] = axes[0][r];
                        vals[plan.free[1]] = axes[1][c];
                    }
                }
                let candidates: Vec<Vec<f64>> = match &plan.numeric {
                    None => vec![vals],
                    Some((v, coeffs)) => {
                        let cv: Vec<f64> = coeffs.iter().map(|p| p.eval(&vals)).collect();
                        let (lo, hi) = range(*v);
                        let closed = !opts.force_numeric && cv.len() <= 3;
                        roots_in(&cv, lo, hi, opts.grid, closed)
                            .into_iter()
                            .map(|root| {
                                let mut w = vals.clone();
                                w[*v] = root;
                                w
                            })
                            .collect()
                    }
                };
                let group = candidates.len() as u32;
                for (k, mut w) in candidates.into_iter().enumerate() {
                    let mut outside = false;
                    for (v, e) in &plan.solved {
                        w[*v] = e.eval(&w);
                    }
                    for &q in &qs {
                        if w[q].abs() > b + TOL_BOX {
                            outside = true;
                        }
                    }
                    if let Some(&x) = xs.first() {
                        if stratum == Stratum::Boundary {
                            w[x] = 0.0;
                        } else if w[x] < -TOL_BOX {
                            continue;
                        }
                    }
                    if outside {
                        out.truncated += 1;
                        continue;
                    }
                    let zval = gf.eval(&w);
                    w[z] = zval;
                    let tol = if closed_form { TOL_CLOSED } else { TOL_CONTINUATION };
                    let bad = dg
                        .iter()
                        .any(|(v, d)| !(stratum == Stratum::Boundary && xs.contains(v)) && d.eval(&w).abs() > tol);
                    if bad {
                        out.rejected += 1;
                        continue;
                    }
                    let point = FrontPoint {
                        component,
                        stratum,
                        t,
                        q: qs.iter().map(|&i| w[i]).collect(),
                        z: zval,
                        x: xs.first().map(|&i| w[i]),
                        y: ys.first().map(|&i| w[i]),
                        s: dt.as_ref().map_or(0.0, |d| d.eval(&w)),
                        p: dq.iter().map(|d| d.eval(&w)).collect(),
                        closed_form,
                    };
                    while branches.len() <= k {
                        branches.push(Branch {
                            stratum,
                            closed_form,
                            rows,
                            cols,
                            points: vec![None; rows * cols],
                            group: vec![0; rows * cols],
                        });
                    }
                    branches[k].points[cell] = Some(point);
                    branches[k].group[cell] = group;
                }
            }
        }
        out.branches.extend(branches);
    }
    Ok(out)
}

type Seg = ((f64, f64), (f64, f64));

fn segments(tr: &ComponentTrace, axis: usize) -> Vec<Seg> {
    let mut out = Vec::new();
    for b in &tr.branches {
        for line in b.polylines() {
            for w in line.windows(2) {
                out.push(((w[0].q[axis], w[0].z), (w[1].q[axis], w[1].z)));
            }
        }
    }
    out
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// Crossings between the curves of components `i` and `j` (0-based) in a curve frame.
pub fn intersection_events(frame: &FrontFrame, i: usize, j: usize, angle_tol: f64) -> Result<PairEvents, FrontError> {
    if !frame.is_curve() {
        return Err(FrontError::NeedsSlice);
    }
    let names: Vec<String> = (1..=frame.n).map(|k| format!("q{k}")).collect();
    let axis = names.iter().position(|n| *n == frame.free[0]).unwrap_or(0);
    let si = segments(&frame.components[i], axis);
    let sj = segments(&frame.components[j], axis);
    let mut found: Vec<Crossing> = Vec::new();
    let mut push = |c: Crossing| {
        let scale = 1.0 + c.at.0.abs().max(c.at.1.abs());
        if let Some(prev) = found
            .iter_mut()
            .find(|p| (p.at.0 - c.at.0).abs() <= 1e-9 * scale && (p.at.1 - c.at.1).abs() <= 1e-9 * scale)
        {
            prev.degenerate |= c.degenerate;
            return;
        }
        found.push(c);
    };
    for &(a0, a1) in &si {
        let (ax_lo, ax_hi) = (a0.0.min(a1.0), a0.0.max(a1.0));
        let (ay_lo, ay_hi) = (a0.1.min(a1.1), a0.1.max(a1.1));
        for &(b0, b1) in &sj {
            if b0.0.max(b1.0) < ax_lo || b0.0.min(b1.0) > ax_hi || b0.1.max(b1.1) < ay_lo || b0.1.min(b1.1) > ay_hi {
                continue;
            }
            let d1 = (a1.0 - a0.0, a1.1 - a0.1);
            let d2 = (b1.0 - b0.0, b1.1 - b0.1);
            let den = cross(d1, d2);
            let l1 = d1.0.hypot(d1.1);
            let l2 = d2.0.hypot(d2.1);
            if l1 == 0.0 || l2 == 0.0 {
                continue;
            }
            let w = (b0.0 - a0.0, b0.1 - a0.1);
            if den.abs() <= 1e-14 * l1 * l2 {
                // Parallel: collinear overlap is a degenerate contact.
                if cross(w, d1).abs() <= 1e-12 * l1 * (1.0 + w.0.hypot(w.1)) {
                    let proj = |p: (f64, f64)| ((p.0 - a0.0) * d1.0 + (p.1 - a0.1) * d1.1) / (l1 * l1);
                    let (u0, u1) = (proj(b0), proj(b1));
                    let (lo, hi) = (u0.min(u1).max(0.0), u0.max(u1).min(1.0));
                    if lo <= hi {
                        let u = 0.5 * (lo + hi);
                        push(Crossing { at: (a0.0 + u * d1.0, a0.1 + u * d1.1), angle: 0.0, degenerate: true });
                    }
                }
                continue;
            }
            let s = cross(w, d2) / den;
            let u = cross(w, d1) / den;
            let eps = 1e-12;
            if (-eps..=1.0 + eps).contains(&s) && (-eps..=1.0 + eps).contains(&u) {
                let angle = (den.abs() / (l1 * l2)).clamp(0.0, 1.0).asin();
                push(Crossing { at: (a0.0 + s * d1.0, a0.1 + s * d1.1), angle, degenerate: angle < angle_tol });
            }
        }
    }
    found.sort_by(|a, b| a.at.0.total_cmp(&b.at.0).then(a.at.1.total_cmp(&b.at.1)));
    Ok(PairEvents {
        i,
        j,
        count: found.len(),
        degenerate: found.iter().any(|c| c.degenerate),
        crossings: found,
        unreliable: frame.unreliable,
    })
}

fn trace_frame(fam: &Family, t: f64, opts: &TraceOptions) -> Result<FrontFrame, FrontError> {
    let components =
        fam.comps().iter().enumerate().map(|(i, f)| trace_component(f, i, t, opts)).collect::<Result<Vec<_>, _>>()?;
    let fixed_names: Vec<&str> = opts.fixed.iter().map(|(n, _)| n.as_str()).collect();
    let free: Vec<String> =
        fam.params_of(Role::Param).into_iter().filter(|q| !fixed_names.contains(&q.as_str())).collect();
    let mut frame = FrontFrame {
        t,
        n: fam.params_of(Role::Param).len(),
        free,
        fixed: opts.fixed.clone(),
        components,
        events: Vec::new(),
        unreliable: t.abs() < 1e-12,
        half_width: opts.half_width,
    };
    if frame.is_curve() {
        for i in 0..fam.m() {
            for j in i + 1..fam.m() {
                let ev = intersection_events(&frame, i, j, opts.angle_tol)?;
                frame.events.push(ev);
            }
        }
    }
    Ok(frame)
}

/// One frame per `t`, computed concurrently and returned in the order of `ts`.
pub fn sweep(fam: &Family, ts: &[f64], opts: &TraceOptions) -> Result<Vec<FrontFrame>, FrontError> {
    ts.par_iter().map(|&t| trace_frame(fam, t, opts)).collect()
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn t_values(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a, b, n)
}

fn num(v: f64) -> String {
    let s = format!("{v:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// CSV dump: `component,stratum,t,q1..qn,z,x,y,s,p1..pn`, 12 decimals, 1-based components.
pub fn frame_csv(frame: &FrontFrame) -> String {
    let mut s = String::from("component,stratum,t");
    for k in 1..=frame.n {
        let _ = write!(s, ",q{k}");
    }
    s.push_str(",z,x,y,s");
    for k in 1..=frame.n {
        let _ = write!(s, ",p{k}");
    }
    s.push('\n');
    for c in &frame.components {
        for b in &c.branches {
            for p in b.points.iter().flatten() {
                let _ = write!(s, "{},{},{}", p.component + 1, p.stratum.as_str(), num(p.t));
                for q in &p.q {
                    let _ = write!(s, ",{}", num(*q));
                }
                let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
                let _ = write!(s, ",{},{},{},{}", num(p.z), opt(p.x), opt(p.y), num(p.s));
                for v in &p.p {
                    let _ = write!(s, ",{}", num(*v));
                }
                s.push('\n');
            }
        }
    }
    s
}

const PALETTE: [&str; 4] = ["#1f5fa8", "#c2362b", "#2b8a3e", "#8a5a00"];
const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 400.0;

struct View {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl View {
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let (l, r, top, bot) = (30.0, PANEL_W - 10.0, 40.0, PANEL_H - 90.0);
        (l + (x - self.x0) / (self.x1 - self.x0) * (r - l), bot - (y - self.y0) / (self.y1 - self.y0) * (bot - top))
    }
}

fn project(frame: &FrontFrame, p: &FrontPoint) -> (f64, f64) {
    if frame.is_curve() {
        let axis = (1..=frame.n).position(|k| format!("q{k}") == frame.free[0]).unwrap_or(0);
        (p.q[axis], p.z)
    } else {
        // Oblique view of (q1, q2, z); no catalog plane z = a*q1 + b*q2 is seen edge-on.
        let q2 = p.q.get(1).copied().unwrap_or(0.0);
        (p.q[0] - 0.6 * q2, p.z + 0.3 * p.q[0] + 0.3 * q2)
    }
}

fn view(frame: &FrontFrame) -> View {
    let b = frame.half_width;
    if frame.is_curve() {
        View { x0: -b, x1: b, y0: -b, y1: b }
    } else {
        View { x0: -1.6 * b, x1: 1.6 * b, y0: -1.6 * b, y1: 1.6 * b }
    }
}

fn polyline_svg(s: &mut String, pts: &[(f64, f64)], color: &str, dashed: bool, width: f64) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { " stroke-dasharray=\"5,3\"" } else { "" };
    let _ = writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>",
        coords.join(" ")
    );
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Panel body, drawn in a `PANEL_W x PANEL_H` box at the origin.
fn panel(frame: &FrontFrame, title: &str, clip_id: &str) -> String {
    let v = view(frame);
    let mut s = String::new();
    let (cx0, cy0) = v.map((v.x0, v.y1));
    let (cx1, cy1) = v.map((v.x1, v.y0));
    let _ = writeln!(
        s,
        "<clipPath id=\"{clip_id}\"><rect x=\"{cx0:.2}\" y=\"{cy0:.2}\" width=\"{:.2}\" height=\"{:.2}\"/></clipPath>",
        cx1 - cx0,
        cy1 - cy0
    );
    let _ = writeln!(
        s,
        "<rect x=\"{cx0:.2}\" y=\"{cy0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"white\" stroke=\"#999\"/>",
        cx1 - cx0,
        cy1 - cy0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        PANEL_W / 2.0,
        escape(title)
    );
    let _ = writeln!(s, "<g clip-path=\"url(#{clip_id})\">");
    // Axes through the origin.
    let (ax0, ay) = v.map((v.x0, 0.0));
    let (ax1, _) = v.map((v.x1, 0.0));
    let (bx, by0) = v.map((0.0, v.y0));
    let (_, by1) = v.map((0.0, v.y1));
    let _ = writeln!(s, "<line x1=\"{ax0:.2}\" y1=\"{ay:.2}\" x2=\"{ax1:.2}\" y2=\"{ay:.2}\" stroke=\"#ddd\"/>");
    let _ = writeln!(s, "<line x1=\"{bx:.2}\" y1=\"{by0:.2}\" x2=\"{bx:.2}\" y2=\"{by1:.2}\" stroke=\"#ddd\"/>");
    for c in &frame.components {
        let color = PALETTE[c.component % PALETTE.len()];
        for b in &c.branches {
            let dashed = b.stratum == Stratum::Boundary;
            if frame.is_curve() {
                for line in b.polylines() {
                    let pts: Vec<(f64, f64)> = line.iter().map(|p| v.map(project(frame, p))).collect();
                    polyline_svg(&mut s, &pts, color, dashed, 1.6);
                }
            } else {
                let stride_r = (b.rows / 12).max(1);
                let stride_c = (b.cols / 12).max(1);
                let mut lines: Vec<Vec<(f64, f64)>> = Vec::new();
                for r in (0..b.rows).step_by(stride_r) {
                    let mut cur = Vec::new();
                    for c in 0..b.cols {
                        let i = r * b.cols + c;
                        if c > 0 && !b.linked(i - 1, i) {
                            lines.push(std::mem::take(&mut cur));
                        }
                        if let Some(p) = &b.points[i] {
                            cur.push(v.map(project(frame, p)));
                        }
                    }
                    lines.push(cur);
                }
                for c in (0..b.cols).step_by(stride_c) {
                    let mut cur = Vec::new();
                    for r in 0..b.rows {
                        let i = r * b.cols + c;
                        if r > 0 && !b.linked(i - b.cols, i) {
                            lines.push(std::mem::take(&mut cur));
                        }
                        if let Some(p) = &b.points[i] {
                            cur.push(v.map(project(frame, p)));
                        }
                    }
                    lines.push(cur);
                }
                for l in lines {
                    polyline_svg(&mut s, &l, color, dashed, 0.6);
                }
            }
        }
    }
    for ev in &frame.events {
        for c in &ev.crossings {
            let (x, y) = v.map(c.at);
            let stroke = if c.degenerate { "#e08000" } else { "black" };
            let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3.5\" fill=\"none\" stroke=\"{stroke}\"/>");
        }
    }
    s.push_str("</g>\n");
    // Legend.
    let mut ly = PANEL_H - 72.0;
    for c in &frame.components {
        let color = PALETTE[c.component % PALETTE.len()];
        let mut parts = Vec::new();
        for st in &c.strata {
            let n = c.stratum_count(*st);
            parts.push(if n == 0 { format!("{}: absent", st.as_str()) } else { st.as_str().to_string() });
        }
        let _ = writeln!(
            s,
            "<line x1=\"30\" y1=\"{:.2}\" x2=\"52\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            ly - 4.0,
            ly - 4.0
        );
        let _ = writeln!(
            s,
            "<text x=\"58\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"11\">F{} ({})</text>",
            c.component + 1,
            escape(&parts.join(", "))
        );
        ly += 14.0;
    }
    let axis_note = if frame.is_curve() {
        let fixed: Vec<String> = frame.fixed.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let extra = if fixed.is_empty() { String::new() } else { format!(", {}", fixed.join(", ")) };
        format!("horizontal {}, vertical z{extra}; dashed: x = 0 stratum", frame.free[0])
    } else {
        "oblique view of (q1, q2, z); dashed: x = 0 stratum".to_string()
    };
    let _ = writeln!(
        s,
        "<text x=\"30\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555\">{}</text>",
        PANEL_H - 6.0,
        escape(&axis_note)
    );
    if frame.unreliable {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"34\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#b00\" text-anchor=\"middle\">at bifurcation \u{2014} unreliable</text>",
            PANEL_W / 2.0
        );
    }
    s
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n"
    )
}

pub fn frame_title(label: &str, t: f64) -> String {
    format!("{label}   t = {}", fmt_t(t))
}

fn fmt_t(t: f64) -> String {
    let s = format!("{t:.4}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn frame_svg(frame: &FrontFrame, label: &str) -> String {
    let mut s = svg_open(PANEL_W, PANEL_H);
    s.push_str(&panel(frame, &frame_title(label, frame.t), "c0"));
    s.push_str("</svg>\n");
    s
}

/// Panels left to right in `t` order, joined by "↔".
pub fn filmstrip_svg(frames: &[FrontFrame], label: &str) -> String {
    let gap = 40.0;
    let w = frames.len() as f64 * PANEL_W + (frames.len().saturating_sub(1)) as f64 * gap;
    let mut s = svg_open(w, PANEL_H);
    for (k, f) in frames.iter().enumerate() {
        let x = k as f64 * (PANEL_W + gap);
        let _ = writeln!(s, "<g transform=\"translate({x:.0},0)\">");
        s.push_str(&panel(f, &frame_title(label, f.t), &format!("c{k}")));
        s.push_str("</g>\n");
        if k + 1 < frames.len() {
            let _ = writeln!(
                s,
                "<text x=\"{:.0}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"22\" text-anchor=\"middle\">\u{2194}</text>",
                x + PANEL_W + gap / 2.0,
                PANEL_H / 2.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `{stem}_t{k}.svg`, `{stem}_t{k}.csv` per frame and `{stem}_filmstrip.svg`.
pub fn render(frames: &[FrontFrame], stem: &str, label: &str, dir: &Path) -> io::Result<Vec<PathBuf>> {
    if frames.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "no frames to render"));
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (k, f) in frames.iter().enumerate() {
        let p = dir.join(format!("{stem}_t{k}.svg"));
        std::fs::write(&p, frame_svg(f, label))?;
        written.push(p);
        let p = dir.join(format!("{stem}_t{k}.csv"));
        std::fs::write(&p, frame_csv(f))?;
        written.push(p);
    }
    let p = dir.join(format!("{stem}_filmstrip.svg"));
    std::fs::write(&p, filmstrip_svg(frames, label))?;
    written.push(p);
    Ok(written)
}

/// Point-set distance between two frames after `q_k -> -q_k` on the second.
pub fn reflected_hausdorff(a: &FrontFrame, b: &FrontFrame, k: usize) -> f64 {
    let pa: Vec<(f64, f64)> = a.points().map(|p| (p.q[k], p.z)).collect();
    let pb: Vec<(f64, f64)> = b.points().map(|p| (-p.q[k], p.z)).collect();
    let one_way = |x: &[(f64, f64)], y: &[(f64, f64)]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p.0 - q.0).hypot(p.1 - q.1)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(&pa, &pb).max(one_way(&pb, &pa))
}
