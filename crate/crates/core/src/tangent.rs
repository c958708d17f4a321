//! Tangent spaces of multi-germs and the finite-order tests built on them.
//!
//! Every test reduces to a rank or membership question in a truncated product jet
//! space. Order choices are explicit; [`JetPolicy`] picks them when the caller does not.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::jetalg::{
    infer_spec, module_span, parse_poly, Coeff, JetError, JetSpace, LinSubspace, Monomial, Poly, ProductSpace,
    QuotientElem, Role, VarSel, VarSpec, Q,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TangentError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("component {0} does not vanish at the origin")]
    NonzeroConstant(usize),
    #[error("component {0} is not of the form g(x, y, t, q) - z")]
    NotAffineInZ(usize),
    #[error("{0}")]
    Invalid(String),
}

/// `(f_1, ..., f_m)`, each on its own `(x, y)` block plus a shared parameter list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGerm {
    comps: Vec<Poly>,
}

fn check_shared_params(comps: &[Poly]) -> Result<Vec<String>, TangentError> {
    let first =
        comps.first().ok_or_else(|| TangentError::Invalid("a multi-germ needs at least one component".into()))?;
    let params = first.spec().param_names();
    for (i, c) in comps.iter().enumerate() {
        if c.spec().param_names() != params {
            return Err(TangentError::Invalid(format!(
                "component {} has parameters {:?}, expected {:?}",
                i + 1,
                c.spec().param_names(),
                params
            )));
        }
    }
    Ok(params)
}

/// Splits a `;`-separated list and trims blanks.
pub fn split_components(text: &str) -> Vec<&str> {
    text.split([';', '\n']).map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Parses components over a common parameter list; each `(r_i, k_i)` is inferred from the text
/// unless `rk` forces it.
pub fn parse_components(
    texts: &[&str],
    extra_params: &[&str],
    rk: Option<(usize, usize)>,
) -> Result<Vec<Poly>, TangentError> {
    let all = infer_spec(texts, extra_params)?;
    let params = all.param_names();
    let mut out = Vec::new();
    for t in texts {
        let own = infer_spec(&[t], &[])?;
        let (r, k) = rk.unwrap_or((own.r(), own.k()));
        let spec = Arc::new(VarSpec::new(r, k, &params.iter().map(String::as_str).collect::<Vec<_>>())?);
        out.push(parse_poly(t, &spec)?);
    }
    Ok(out)
}

impl MultiGerm {
    pub fn new(comps: Vec<Poly>) -> Result<Self, TangentError> {
        check_shared_params(&comps)?;
        for (i, c) in comps.iter().enumerate() {
            if !c.constant_term().is_zero() {
                return Err(TangentError::NonzeroConstant(i + 1));
            }
        }
        Ok(MultiGerm { comps })
    }

    /// `"y^2; x*y + y^3"` style input.
    pub fn parse(text: &str) -> Result<Self, TangentError> {
        MultiGerm::new(parse_components(&split_components(text), &[], None)?)
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn params(&self) -> Vec<String> {
        self.comps[0].spec().param_names()
    }

    /// The same components with parameters set to zero and removed.
    pub fn base(&self) -> MultiGerm {
        let comps = self.comps.iter().map(restrict_to_xy).collect();
        MultiGerm { comps }
    }
}

impl fmt::Display for MultiGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn restrict_to_xy(p: &Poly) -> Poly {
    let spec = Arc::new(p.spec().with_params(&[]).expect("subset of a valid spec"));
    let mut out = Poly::zero(&spec);
    let nxy = spec.len();
    for (m, c) in p.terms() {
        if m.0[nxy..].iter().all(|&e| e == 0) {
            out.add_term(Monomial(m.0[..nxy].to_vec()), c.clone());
        }
    }
    out
}

/// Unfolded multi-germ `F_i(x, y, t, q, u, z)`; `t` and `z` optional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    comps: Vec<Poly>,
    n: usize,
}

impl Family {
    /// `n` is the ambient parameter dimension used for the order cap.
    pub fn new(comps: Vec<Poly>, n: usize) -> Result<Self, TangentError> {
        check_shared_params(&comps)?;
        let spec = comps[0].spec().clone();
        if spec.height().is_some() {
            for (i, c) in comps.iter().enumerate() {
                let z = c.spec().height().expect("shared parameter list");
                if c.diff(z) != Poly::constant(c.spec(), -Q::one()) {
                    return Err(TangentError::NotAffineInZ(i + 1));
                }
            }
        }
        let fam = Family { comps, n };
        for (i, c) in fam.base().comps.iter().enumerate() {
            if !c.constant_term().is_zero() {
                return Err(TangentError::NonzeroConstant(i + 1));
            }
        }
        Ok(fam)
    }

    /// Components over `t, q1..qn, z` (every catalog family uses this list).
    pub fn parse_generating(texts: &[&str], n: usize) -> Result<Self, TangentError> {
        let mut params = vec!["t".to_string()];
        params.extend((1..=n).map(|j| format!("q{j}")));
        params.push("z".into());
        let p: Vec<&str> = params.iter().map(String::as_str).collect();
        Family::new(parse_components(texts, &p, None)?, n)
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn m(&self) -> usize {
        self.comps.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> Vec<String> {
        self.comps[0].spec().param_names()
    }

    pub fn has_time(&self) -> bool {
        self.comps[0].spec().time().is_some()
    }

    pub fn has_height(&self) -> bool {
        self.comps[0].spec().height().is_some()
    }

    /// Names of the parameters of a given role.
    pub fn params_of(&self, role: Role) -> Vec<String> {
        let s = self.comps[0].spec();
        s.indices(role).into_iter().map(|i| s.var(i).name.clone()).collect()
    }

    /// `f_0 = F|_{t=q=u=z=0}` on the `(x, y)` blocks.
    pub fn base(&self) -> MultiGerm {
        MultiGerm { comps: self.comps.iter().map(restrict_to_xy).collect() }
    }

    /// `f = F|_{t=0}` with `t` removed from the variable list.
    pub fn at_t0(&self) -> MultiGerm {
        MultiGerm { comps: self.comps.iter().map(drop_time).collect() }
    }

    /// `dF/dt` at `t = 0`, on the same variables as [`Family::at_t0`].
    pub fn dt_at_t0(&self) -> Option<Vec<Poly>> {
        self.comps[0].spec().time()?;
        Some(self.comps.iter().map(|c| drop_time(&c.diff(c.spec().time().unwrap()))).collect())
    }

    /// Substitutes zero for a parameter while keeping it as a variable.
    pub fn with_zeroed(&self, name: &str) -> Result<Family, TangentError> {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let i = c.spec().index(name).ok_or_else(|| JetError::UnknownVar(name.into()))?;
                Ok(c.restrict_zero(i))
            })
            .collect::<Result<Vec<_>, TangentError>>()?;
        Ok(Family { comps, n: self.n })
    }
}

fn drop_time(p: &Poly) -> Poly {
    match p.spec().time() {
        None => p.clone(),
        Some(t) => p.restrict_zero(t).drop_vars(&["t"]).expect("t eliminated"),
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Jet-order policy: start low, stop after two consecutive agreeing orders, never exceed the cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JetPolicy {
    pub start: u32,
    pub cap: u32,
}

pub const JET_CAP_ENV: &str = "RETIC_JET_CAP";

impl JetPolicy {
    /// Cap `n + 5`, overridable through `RETIC_JET_CAP`.
    pub fn for_n(n: usize) -> Self {
        let cap = std::env::var(JET_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(n as u32 + 5);
        JetPolicy { start: 3.min(cap), cap }
    }
}

fn single_space(f: &Poly, l: u32) -> Arc<ProductSpace> {
    Arc::new(ProductSpace::single(JetSpace::new(f.spec(), l)))
}

/// Generators `f, x_j df/dx_j` (ring coefficients) and `df/dy_j` (coefficients as given).
fn contact_generators(f: &Poly) -> (Vec<Poly>, Vec<Poly>) {
    let s = f.spec();
    let mut ring = vec![f.clone()];
    for j in s.indices(Role::Corner) {
        ring.push(Poly::var(s, j).mul(&f.diff(j)));
    }
    let fib = s.indices(Role::Fiber).into_iter().map(|j| f.diff(j)).collect();
    (ring, fib)
}

fn check_vanishing(f: &Poly) -> Result<(), TangentError> {
    if f.constant_term().is_zero() {
        Ok(())
    } else {
        Err(TangentError::NonzeroConstant(1))
    }
}

/// `<f, x df/dx>_E + M <df/dy>` in `J^l`.
pub fn orbit_tangent_rk(f: &Poly, l: u32) -> Result<LinSubspace, TangentError> {
    check_vanishing(f)?;
    let sp = single_space(f, l);
    let (ring, fib) = contact_generators(f);
    let mut sub = module_span(&ring.into_iter().map(|p| vec![p]).collect::<Vec<_>>(), &Coeff::ring(VarSel::All), &sp)?;
    sub.add_span(&fib.into_iter().map(|p| vec![p]).collect::<Vec<_>>(), &Coeff::ideal(VarSel::All))?;
    Ok(sub)
}

/// `Q_f = <f, x df/dx, df/dy>_E` in `J^l`.
pub fn ext_tangent_q(f: &Poly, l: u32) -> Result<LinSubspace, TangentError> {
    check_vanishing(f)?;
    let sp = single_space(f, l);
    let (mut ring, fib) = contact_generators(f);
    ring.extend(fib);
    Ok(module_span(&ring.into_iter().map(|p| vec![p]).collect::<Vec<_>>(), &Coeff::ring(VarSel::All), &sp)?)
}

/// Codimension of one component: finite, or non-isolated (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCodim {
    pub mu: Option<usize>,
    /// Quotient representatives, highest degree first, ending with `1`.
    pub phi: Vec<String>,
    #[serde(skip)]
    pub phi_monomials: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodimReport {
    pub components: Vec<ComponentCodim>,
    pub total: Option<usize>,
    pub order: u32,
}

impl CodimReport {
    pub fn mu(&self) -> Vec<Option<usize>> {
        self.components.iter().map(|c| c.mu).collect()
    }
}

fn fmt_mu(m: Option<usize>) -> String {
    m.map(|v| v.to_string()).unwrap_or_else(|| "inf".into())
}

impl fmt::Display for CodimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mus: Vec<String> = self.components.iter().map(|c| fmt_mu(c.mu)).collect();
        writeln!(f, "mu = ({})  total = {}  order = {}", mus.join(", "), fmt_mu(self.total), self.order)?;
        for (i, c) in self.components.iter().enumerate() {
            writeln!(f, "phi_{} = [{}]", i + 1, c.phi.join(", "))?;
        }
        Ok(())
    }
}

fn component_codim(f: &Poly, l: u32) -> Result<ComponentCodim, TangentError> {
    let at = ext_tangent_q(f, l)?;
    let below = ext_tangent_q(f, l.saturating_sub(1))?;
    // Equal codimension at consecutive orders gives M^l in Q_f by Nakayama, so the value is exact.
    if l == 0 || at.codim() != below.codim() {
        return Ok(ComponentCodim { mu: None, phi: Vec::new(), phi_monomials: Vec::new() });
    }
    let mut basis: Vec<QuotientElem> = at.quotient_basis();
    basis.reverse();
    basis.sort_by_key(|e| std::cmp::Reverse(e.mono.degree()));
    let phi = basis.iter().map(|e| e.mono.fmt_with(e.spec())).collect();
    Ok(ComponentCodim { mu: Some(basis.len()), phi, phi_monomials: basis.into_iter().map(|e| e.mono).collect() })
}

/// `mu_i = dim E / Q_{f_i}` computed at order `l`; `None` when the quotient has not stabilised.
pub fn codim_report(f0: &MultiGerm, l: u32) -> Result<CodimReport, TangentError> {
    let components = f0.comps().iter().map(|c| component_codim(c, l)).collect::<Result<Vec<_>, _>>()?;
    let total = components.iter().map(|c| c.mu).sum();
    Ok(CodimReport { components, total, order: l })
}

/// Raises the order until every component stabilises or the cap is hit.
pub fn codim_report_auto(f0: &MultiGerm, policy: JetPolicy) -> Result<CodimReport, TangentError> {
    let mut l = policy.start.max(1);
    loop {
        let rep = codim_report(f0, l)?;
        if rep.total.is_some() || l >= policy.cap {
            return Ok(rep);
        }
        l += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Determinacy {
    Determined,
    NotDetermined,
    Inconclusive,
}

impl fmt::Display for Determinacy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Determinacy::Determined => "true",
            Determinacy::NotDetermined => "false",
            Determinacy::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterminacyReport {
    pub order: u32,
    /// `M^{l+1} ⊆ M<f, x df/dx> + M^2 <df/dy> + M^{l+2}`.
    pub sufficient: bool,
    /// `M^{l+1} ⊆ <f, x df/dx>_E + M<df/dy>`.
    pub necessary: bool,
    /// The same inclusion for the `l`-jet of `f`.
    pub necessary_jet: bool,
    pub verdict: Determinacy,
}

fn top_degree_in(sub: &LinSubspace, d: u32) -> bool {
    let sp = sub.space().clone();
    sp.monomial_vectors(|_, _, m| m.degree() == d).iter().all(|v| sub.contains(v))
}

/// `M^{l+1} ⊆ <g, x dg/dx>_E + M<dg/dy>`, exact via Nakayama in `J^{l+1}`.
fn necessary_condition(g: &Poly, l: u32) -> Result<bool, TangentError> {
    let t = orbit_tangent_rk(g, l + 1)?;
    Ok(top_degree_in(&t, l + 1))
}

fn sufficient_condition(f: &Poly, l: u32) -> Result<bool, TangentError> {
    let sp = single_space(f, l + 1);
    let (ring, fib) = contact_generators(f);
    let mut sub = module_span(&ring.into_iter().map(|p| vec![p]).collect::<Vec<_>>(), &Coeff::ideal(VarSel::All), &sp)?;
    sub.add_span(&fib.into_iter().map(|p| vec![p]).collect::<Vec<_>>(), &Coeff { vars: VarSel::All, min_degree: 2 })?;
    Ok(top_degree_in(&sub, l + 1))
}

/// Three-valued reticular K-determinacy test at order `l`.
///
/// A germ that is `l`-determined is equivalent to its `l`-jet, which is then `l`-determined as
/// well, so the necessary inclusion is also tested on `j^l f`.
pub fn is_rk_l_determined(f: &Poly, l: u32) -> Result<DeterminacyReport, TangentError> {
    check_vanishing(f)?;
    let sufficient = sufficient_condition(f, l)?;
    let necessary = necessary_condition(f, l)?;
    let necessary_jet = necessary_condition(&f.truncate(l), l)?;
    let verdict = if sufficient {
        Determinacy::Determined
    } else if !necessary || !necessary_jet {
        Determinacy::NotDetermined
    } else {
        Determinacy::Inconclusive
    };
    Ok(DeterminacyReport { order: l, sufficient, necessary, necessary_jet, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PkDeterminacy {
    pub order: u32,
    pub verdict: Determinacy,
    /// Order `L` at which `M^{L+1} E` was shown to lie in the ring part of the tangent space.
    pub closure_order: Option<u32>,
}

fn slot_specs_for(comps: &[Poly]) -> Vec<Arc<VarSpec>> {
    comps.iter().map(|c| c.spec().clone()).collect()
}

fn unit_gen(m: usize, i: usize, p: Poly) -> Vec<Poly> {
    (0..m).map(|j| if j == i { p.clone() } else { Poly::zero(p.spec()) }).collect()
}

/// `Π(<f_i, x df_i/dx>_E + M<df_i/dy>) + M(n) M^l E` plus optional coupled rows.
fn pk_ring_part(f: &MultiGerm, l: u32, order: u32) -> Result<LinSubspace, TangentError> {
    let sp = Arc::new(ProductSpace::uniform(&slot_specs_for(f.comps()), order));
    let m = f.m();
    let mut sub = LinSubspace::zero(&sp);
    for (i, c) in f.comps().iter().enumerate() {
        let (ring, fib) = contact_generators(c);
        let ring: Vec<Vec<Poly>> = ring.into_iter().map(|p| unit_gen(m, i, p)).collect();
        let fib: Vec<Vec<Poly>> = fib.into_iter().map(|p| unit_gen(m, i, p)).collect();
        sub.add_span(&ring, &Coeff::ring(VarSel::All))?;
        sub.add_span(&fib, &Coeff::ideal(VarSel::All))?;
    }
    for v in sp.monomial_vectors(|_, s, mono| {
        let us: Vec<usize> = (0..s.len()).filter(|&i| !matches!(s.var(i).role, Role::Corner | Role::Fiber)).collect();
        mono.degree() > l && mono.degree_in(&us) > 0
    }) {
        sub.insert(v);
    }
    Ok(sub)
}

/// Sufficient test for reticular (P-K) `l`-determinacy; never answers "false".
pub fn is_pk_l_determined(f: &MultiGerm, l: u32, extra_orders: u32) -> Result<PkDeterminacy, TangentError> {
    let mut closure = None;
    for big in l..=l + extra_orders {
        let ring = pk_ring_part(f, l, big + 1)?;
        if top_degree_in(&ring, big + 1) {
            closure = Some(big);
            break;
        }
    }
    let Some(big) = closure else {
        return Ok(PkDeterminacy { order: l, verdict: Determinacy::Inconclusive, closure_order: None });
    };
    let mut sub = pk_ring_part(f, l, big)?;
    let params = f.params();
    for u in &params {
        let g: Vec<Poly> = f.comps().iter().map(|c| c.diff_named(u)).collect::<Result<_, _>>()?;
        sub.add_span(&[g], &Coeff::names(&params, 1))?;
    }
    let sp = sub.space().clone();
    let ok = sp.monomial_vectors(|_, _, m| m.degree() >= l).iter().all(|v| sub.contains(v));
    let verdict = if ok { Determinacy::Determined } else { Determinacy::Inconclusive };
    Ok(PkDeterminacy { order: l, verdict, closure_order: Some(big) })
}

/// Outcome of a versality or stability test at one or more orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// Last order evaluated.
    pub order: u32,
    /// `(order, passed)` for every order tried.
    pub trail: Vec<(u32, bool)>,
    /// Codimension of the tangent space in the truncated product at the last order.
    pub defect: usize,
    /// A quotient representative missed by the tangent space, if any.
    pub witness: Option<String>,
    /// `l' = d m + d + m'` with `d` the last order, `m = #components`, `m' = 1`.
    pub transversality_bound: u32,
}

fn verdict_from(sub: &LinSubspace) -> (bool, usize, Option<String>) {
    let defect = sub.codim();
    let witness = sub.quotient_basis().first().map(|e| e.to_string());
    (defect == 0, defect, witness)
}

/// Versality space at order `l`. With `with_time = false` the `dF/dt` row is left out.
pub fn versal_tangent(fam: &Family, l: u32, with_time: bool) -> Result<LinSubspace, TangentError> {
    let f = fam.at_t0();
    let m = f.m();
    let sp = Arc::new(ProductSpace::uniform(&slot_specs_for(f.comps()), l));
    let mut sub = LinSubspace::zero(&sp);
    for (i, c) in f.comps().iter().enumerate() {
        let (mut ring, fib) = contact_generators(c);
        ring.extend(fib);
        let gens: Vec<Vec<Poly>> = ring.into_iter().map(|p| unit_gen(m, i, p)).collect();
        sub.add_span(&gens, &Coeff::ring(VarSel::All))?;
    }
    let params = f.params();
    for u in &params {
        let g: Vec<Poly> = f.comps().iter().map(|c| c.diff_named(u)).collect::<Result<_, _>>()?;
        sub.add_span(&[g], &Coeff::names(&params, 0))?;
    }
    if with_time {
        if let Some(dt) = fam.dt_at_t0() {
            sub.add_span(&[dt], &Coeff::constants())?;
        }
    }
    Ok(sub)
}

/// Stability space at order `l`: `F` itself, with `t` in the ambient ring.
pub fn stable_tangent(fam: &Family, l: u32) -> Result<LinSubspace, TangentError> {
    let m = fam.m();
    let sp = Arc::new(ProductSpace::uniform(&slot_specs_for(fam.comps()), l));
    let mut sub = LinSubspace::zero(&sp);
    for (i, c) in fam.comps().iter().enumerate() {
        let (mut ring, fib) = contact_generators(c);
        ring.extend(fib);
        let gens: Vec<Vec<Poly>> = ring.into_iter().map(|p| unit_gen(m, i, p)).collect();
        sub.add_span(&gens, &Coeff::ring(VarSel::All))?;
    }
    let all = fam.params();
    let time: Vec<String> = fam.params_of(Role::Time);
    for u in all.iter().filter(|n| !time.contains(n)) {
        let g: Vec<Poly> = fam.comps().iter().map(|c| c.diff_named(u)).collect::<Result<_, _>>()?;
        sub.add_span(&[g], &Coeff::names(&all, 0))?;
    }
    if let Some(t) = time.first() {
        let g: Vec<Poly> = fam.comps().iter().map(|c| c.diff_named(t)).collect::<Result<_, _>>()?;
        sub.add_span(&[g], &Coeff::names(&time, 0))?;
    }
    Ok(sub)
}

fn run_policy(
    fam: &Family,
    policy: JetPolicy,
    test: impl Fn(u32) -> Result<LinSubspace, TangentError>,
) -> Result<Verdict, TangentError> {
    let mut trail = Vec::new();
    let mut l = policy.start;
    loop {
        let sub = test(l)?;
        let (ok, defect, witness) = verdict_from(&sub);
        trail.push((l, ok));
        let done = !ok || l >= policy.cap || (trail.len() >= 2 && trail[trail.len() - 2].1);
        if done {
            let m = fam.m() as u32;
            return Ok(Verdict { holds: ok, order: l, trail, defect, witness, transversality_bound: l * m + l + 1 });
        }
        l += 1;
    }
}

pub fn is_inf_versal_at(fam: &Family, l: u32) -> Result<bool, TangentError> {
    Ok(versal_tangent(fam, l, true)?.is_full())
}

pub fn is_inf_stable_at(fam: &Family, l: u32) -> Result<bool, TangentError> {
    Ok(stable_tangent(fam, l)?.is_full())
}

/// Infinitesimal versality under the order policy (a failure at any order is final).
pub fn is_inf_versal(fam: &Family, policy: JetPolicy) -> Result<Verdict, TangentError> {
    run_policy(fam, policy, |l| versal_tangent(fam, l, true))
}

/// Versality of `F|_{t=0}` alone, without the `dF/dt` direction.
pub fn is_versal_without_time(fam: &Family, policy: JetPolicy) -> Result<Verdict, TangentError> {
    run_policy(fam, policy, |l| versal_tangent(fam, l, false))
}

pub fn is_inf_stable(fam: &Family, policy: JetPolicy) -> Result<Verdict, TangentError> {
    run_policy(fam, policy, |l| stable_tangent(fam, l))
}

/// Jacobian row of `p` at the origin.
fn differential(p: &Poly) -> Vec<Q> {
    let n = p.spec().len();
    (0..n).map(|i| p.coeff(&Monomial::var(n, i))).collect()
}

fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Syntactic non-degeneracy of a generating family, one message per violated condition.
pub fn pc_nondegeneracy(fam: &Family) -> Vec<String> {
    let mut problems = Vec::new();
    let mut momenta = Vec::new();
    for (i, f) in fam.comps().iter().enumerate() {
        let s = f.spec();
        let Some(z) = s.height() else {
            problems.push(format!("component {}: no height variable z", i + 1));
            continue;
        };
        if f.diff(z) != Poly::constant(s, -Q::one()) {
            problems.push(format!("component {}: dF/dz is not -1", i + 1));
        }
        let xs = s.indices(Role::Corner);
        let ys = s.indices(Role::Fiber);
        for &j in xs.iter().chain(&ys) {
            if !f.diff(j).constant_term().is_zero() {
                problems.push(format!("component {}: dF/d{} does not vanish at 0", i + 1, s.display_name(j)));
            }
        }
        let mut rows: Vec<Vec<Q>> = xs.iter().map(|&j| differential(&Poly::var(s, j))).collect();
        if let Some(t) = s.time() {
            rows.push(differential(&Poly::var(s, t)));
        }
        rows.push(differential(f));
        for &j in xs.iter().chain(&ys) {
            rows.push(differential(&f.diff(j)));
        }
        let want = rows.len();
        if rank(rows) != want {
            problems.push(format!("component {}: differentials of x, t, F, dF/dx, dF/dy are dependent at 0", i + 1));
        }
        let pz = -f.diff(z).constant_term();
        let mom: Vec<Q> = s
            .vars()
            .iter()
            .enumerate()
            .filter(|(_, v)| matches!(v.role, Role::Time | Role::Param))
            .map(|(j, _)| if pz.is_zero() { Q::zero() } else { f.diff(j).constant_term() / &pz })
            .collect();
        momenta.push(mom);
    }
    for a in 0..momenta.len() {
        for b in a + 1..momenta.len() {
            if momenta[a] == momenta[b] {
                problems.push(format!("components {} and {} share the conormal direction at 0", a + 1, b + 1));
            }
        }
    }
    problems
}
