//! Versal unfoldings, codimension-one generating families and the normal-form catalog.

use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{classify_multigerm, CatalogLabel, Reject, Sign, Symbol};
use crate::jetalg::{Monomial, Poly, VarSpec, Q};
use crate::tangent::{
    codim_report_auto, is_inf_stable, is_inf_versal, is_versal_without_time, pc_nondegeneracy, Family, JetPolicy,
    MultiGerm, TangentError, Verdict,
};

#[derive(Debug, Error)]
pub enum UnfoldError {
    #[error(transparent)]
    Tangent(#[from] TangentError),
    #[error("rejected: {0}")]
    Reject(Reject),
    #[error("codimension budget mismatch: sum of mu = {total}, expected {expected}")]
    Budget { total: usize, expected: String },
    #[error("sign vector has length {got}, the family needs {want}")]
    Signs { got: usize, want: usize },
    #[error("verification failed at order {order}; missing direction {witness}")]
    Verification { order: u32, witness: String },
    #[error("unsupported n = {0} (catalog exists for n = 1, 2)")]
    UnsupportedN(usize),
}

/// `phi_{i,1..mu_i}` of every component, highest degree first.
fn phi_bases(f0: &MultiGerm, n: usize) -> Result<Vec<Vec<Monomial>>, UnfoldError> {
    let rep = codim_report_auto(f0, JetPolicy::for_n(n))?;
    if rep.total.is_none() {
        return Err(UnfoldError::Budget { total: usize::MAX, expected: "finite".into() });
    }
    Ok(rep.components.into_iter().map(|c| c.phi_monomials).collect())
}

fn generating_specs(f0: &MultiGerm, n: usize, with_time: bool) -> Vec<Arc<VarSpec>> {
    let mut params: Vec<String> = Vec::new();
    if with_time {
        params.push("t".into());
    }
    params.extend((1..=n).map(|j| format!("q{j}")));
    params.push("z".into());
    f0.comps().iter().map(|c| Arc::new(c.spec().with_params(&params).expect("valid parameter names"))).collect()
}

fn lift(m: &Monomial, spec: &Arc<VarSpec>) -> Poly {
    let mut e = m.0.clone();
    e.resize(spec.len(), 0);
    Poly::term(spec, Monomial(e), Q::one())
}

fn lift_poly(p: &Poly, spec: &Arc<VarSpec>) -> Poly {
    p.reembed(spec).expect("base germ lives in the (x, y) block")
}

/// Full `(P-K)`-versal unfolding `f_{0,i} + sum_j u_{i,j} phi_{i,j}`, one parameter per basis element.
pub fn versal_unfolding(f0: &MultiGerm, n: usize) -> Result<Family, UnfoldError> {
    let phis = phi_bases(f0, n)?;
    let mut names = Vec::new();
    for (i, phi) in phis.iter().enumerate() {
        for j in 0..phi.len() {
            names.push(format!("u{}{}", i + 1, j + 1));
        }
    }
    let comps = f0
        .comps()
        .iter()
        .zip(&phis)
        .enumerate()
        .map(|(i, (c, phi))| {
            let spec = Arc::new(c.spec().with_params(&names).expect("u-names"));
            let mut f = lift_poly(c, &spec);
            for (j, m) in phi.iter().enumerate() {
                let u = Poly::var_named(&spec, &format!("u{}{}", i + 1, j + 1)).expect("declared");
                f = f.add(&u.mul(&lift(m, &spec)));
            }
            f
        })
        .collect();
    Ok(Family::new(comps, n)?)
}

fn check_stable(fam: Family, n: usize) -> Result<Family, UnfoldError> {
    let v = is_inf_stable(&fam, JetPolicy::for_n(n))?;
    if v.holds {
        Ok(fam)
    } else {
        Err(UnfoldError::Verification { order: v.order, witness: v.witness.unwrap_or_default() })
    }
}

/// Codimension-zero generating family `G_i = f_{0,i} + sum_j q phi_{i,j} - z`; the last component
/// omits its constant direction.
pub fn build_versal(f0: &MultiGerm, n: usize) -> Result<Family, UnfoldError> {
    let f0 = f0.base();
    let phis = phi_bases(&f0, n)?;
    let total: usize = phis.iter().map(Vec::len).sum();
    if total > n + 1 {
        return Err(UnfoldError::Budget { total, expected: format!("<= {}", n + 1) });
    }
    let specs = generating_specs(&f0, n, true);
    let m = f0.m();
    let mut next = 1;
    let mut comps = Vec::new();
    for (i, (c, phi)) in f0.comps().iter().zip(&phis).enumerate() {
        let spec = &specs[i];
        let mut f = lift_poly(c, spec);
        let used = if i + 1 == m { phi.len() - 1 } else { phi.len() };
        for mono in &phi[..used] {
            let qv = Poly::var_named(spec, &format!("q{next}")).expect("declared");
            f = f.add(&qv.mul(&lift(mono, spec)));
            next += 1;
        }
        f = f.sub(&Poly::var_named(spec, "z").expect("declared"));
        comps.push(f);
    }
    check_stable(Family::new(comps, n)?, n)
}

/// Number of `±` entries in the codimension-one form for this base.
pub fn codim1_sign_count(f0: &MultiGerm, n: usize) -> Result<usize, UnfoldError> {
    let phis = phi_bases(&f0.base(), n)?;
    let total: usize = phis.iter().map(Vec::len).sum();
    if total > n + 2 {
        return Err(UnfoldError::Budget { total, expected: format!("<= {}", n + 2) });
    }
    let m = phis.len();
    let linear = (1..m).filter(|&i| i + 1 < m || phis[i].len() >= 2).count();
    Ok(linear + (n + 2 - total))
}

/// Codimension-one generating family with `t + a` on the top basis element of the first component,
/// `a = ±u_{2,1} ± ... ± u_{m,1} ± u_1^2 ± ... ± u_mu^2`.
///
/// Parameters are numbered in the order: the linear terms of `a`, the remaining unfolding
/// parameters component by component, then the squared ones.
pub fn build_codim1(f0: &MultiGerm, n: usize, signs: &[Sign]) -> Result<Family, UnfoldError> {
    let f0 = f0.base();
    let phis = phi_bases(&f0, n)?;
    let total: usize = phis.iter().map(Vec::len).sum();
    if total > n + 2 {
        return Err(UnfoldError::Budget { total, expected: format!("<= {}", n + 2) });
    }
    let want = codim1_sign_count(&f0, n)?;
    if signs.len() != want {
        return Err(UnfoldError::Signs { got: signs.len(), want });
    }
    let m = f0.m();
    let squares = n + 2 - total;
    // Which parameter slot (component, basis index) carries each name.
    let mut a_linear: Vec<(usize, usize)> = Vec::new();
    for (i, phi) in phis.iter().enumerate().skip(1) {
        if i + 1 < m || phi.len() >= 2 {
            a_linear.push((i, 0));
        }
    }
    let mut others: Vec<(usize, usize)> = Vec::new();
    for (i, phi) in phis.iter().enumerate() {
        let used = if i + 1 == m { phi.len() - 1 } else { phi.len() };
        let start = if i == 0 { 1 } else { 0 };
        for j in start..used {
            if !a_linear.contains(&(i, j)) {
                others.push((i, j));
            }
        }
    }
    let mut name_of = std::collections::HashMap::new();
    for (k, slot) in a_linear.iter().chain(&others).enumerate() {
        name_of.insert(*slot, format!("q{}", k + 1));
    }
    let first_square = a_linear.len() + others.len() + 1;
    let specs = generating_specs(&f0, n, true);
    let mut comps = Vec::new();
    for (i, (c, phi)) in f0.comps().iter().zip(&phis).enumerate() {
        let spec = &specs[i];
        let var = |name: &str| Poly::var_named(spec, name).expect("declared");
        let mut f = lift_poly(c, spec);
        if i == 0 {
            let mut a = var("t");
            for (k, slot) in a_linear.iter().enumerate() {
                let s = if signs[k] == Sign::Plus { Q::one() } else { -Q::one() };
                a = a.add(&var(&name_of[slot]).scale(&s));
            }
            for j in 0..squares {
                let s = if signs[a_linear.len() + j] == Sign::Plus { Q::one() } else { -Q::one() };
                let u = var(&format!("q{}", first_square + j));
                a = a.add(&u.mul(&u).scale(&s));
            }
            f = f.add(&a.mul(&lift(&phi[0], spec)));
        }
        let used = if i + 1 == m { phi.len() - 1 } else { phi.len() };
        for (j, mono) in phi.iter().enumerate().take(used) {
            if let Some(name) = name_of.get(&(i, j)) {
                f = f.add(&var(name).mul(&lift(mono, spec)));
            }
        }
        f = f.sub(&var("z"));
        comps.push(f);
    }
    check_stable(Family::new(comps, n)?, n)
}

struct Template {
    prefix: u8,
    symbols: &'static str,
    comps: &'static [&'static str],
}

const fn tpl(prefix: u8, symbols: &'static str, comps: &'static [&'static str]) -> Template {
    Template { prefix, symbols, comps }
}

/// Catalog families with `±` marking sign choices; `±` in a symbol takes the first sign.
const CATALOG_N1: &[Template] = &[
    tpl(0, "A1 A1", &["y^2 + q - z", "y^2 - z"]),
    tpl(1, "A1 A1", &["y^2 + t ± q^2 - z", "y^2 - z"]),
    tpl(1, "A1 A2", &["y^2 + t ± q - z", "y^3 + q*y - z"]),
    tpl(1, "A1 B2", &["y^2 + t ± q - z", "x^2 + q*x - z"]),
    tpl(1, "A1 A1 A1", &["y^2 + t - z", "y^2 + q - z", "y^2 - q - z"]),
];

const CATALOG_N2: &[Template] = &[
    tpl(1, "A1 A1", &["y^2 + t ± q1^2 ± q2^2 - z", "y^2 - z"]),
    tpl(0, "A1 A2", &["y^2 + t ± q1 - z", "y^3 + q1*y - q2 - z"]),
    tpl(1, "A1 A2", &["y^2 + t ± q1 ± q2^2 - z", "y^3 + q1*y - z"]),
    tpl(0, "A1 B2", &["y^2 + q1 - z", "x^2 + q2*x - z"]),
    tpl(1, "A1 A3", &["y^2 + t ± q1 - z", "y^4 + q1*y^2 + q2*y - z"]),
    tpl(1, "A2 A2", &["y^3 + (t ± q1)*y + q2 - z", "y^3 + q1*y - z"]),
    tpl(1, "A1 B2", &["y^2 + t ± q1 ± q2^2 - z", "x^2 + q1*x - z"]),
    tpl(1, "A1 B3", &["y^2 + t ± q1 - z", "x^3 + q1*x^2 + q2*x - z"]),
    tpl(1, "A1 C3±", &["y^2 + t + q1 - z", "±x*y + y^3 + q1*y^2 + q2*y - z"]),
    tpl(1, "B2 B2", &["x^2 + (t ± q1)*x + q2 - z", "x^2 + q1*x - z"]),
    tpl(0, "A1 A1 A1", &["y^2 + q1 - z", "y^2 + q2 - z", "y^2 - z"]),
    tpl(1, "A1 A1 A1", &["y^2 + t ± q1 ± q2^2 - z", "y^2 + q1 - z", "y^2 - z"]),
    tpl(1, "A1 A1 A2", &["y^2 + t ± q1 - z", "y^2 - z", "y^3 + q1*y + q2 - z"]),
    tpl(1, "A1 A1 B2", &["y^2 + t ± q1 - z", "y^2 - z", "x^2 + q1*x + q2 - z"]),
    tpl(1, "A1 A1 A1 A1", &["y^2 + t ± q1 ± q2 - z", "y^2 + q1 - z", "y^2 + q2 - z", "y^2 - z"]),
];

/// One sign variant of a catalog family.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub label: CatalogLabel,
    pub base: MultiGerm,
    pub family: Family,
    pub signs: Vec<Sign>,
    pub mu: Vec<usize>,
    /// Index of the label among the catalog's distinct labels.
    pub label_index: usize,
}

impl CatalogEntry {
    /// `+-` style sign string, `0` when the family has no sign choice.
    pub fn variant(&self) -> String {
        if self.signs.is_empty() {
            "0".into()
        } else {
            self.signs.iter().map(|s| s.ascii()).collect()
        }
    }

    pub fn variant_slug(&self) -> String {
        self.variant().replace('+', "p").replace('-', "m")
    }

    pub fn expressions(&self) -> Vec<String> {
        self.family.comps().iter().map(|c| c.to_string()).collect()
    }
}

fn sign_lattice(k: usize) -> Vec<Vec<Sign>> {
    (0..1usize << k)
        .map(|bits| (0..k).map(|i| if bits >> (k - 1 - i) & 1 == 0 { Sign::Plus } else { Sign::Minus }).collect())
        .collect()
}

fn instantiate(t: &Template, n: usize, signs: &[Sign], label_index: usize) -> Result<CatalogEntry, UnfoldError> {
    let mut k = 0;
    let texts: Vec<String> = t
        .comps
        .iter()
        .map(|c| {
            c.chars()
                .map(|ch| {
                    if ch == '±' {
                        k += 1;
                        signs[k - 1].ascii()
                    } else {
                        ch
                    }
                })
                .collect()
        })
        .collect();
    let symbols: Vec<Symbol> = t
        .symbols
        .split(' ')
        .map(|s| {
            let s = s.replace('±', &signs.first().map(|s| s.ascii().to_string()).unwrap_or_default());
            Symbol::parse(&s).expect("catalog symbol")
        })
        .collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let family = Family::parse_generating(&refs, n)?;
    let mu = symbols.iter().map(|s| s.mu()).collect();
    Ok(CatalogEntry {
        label: CatalogLabel { prefix: t.prefix, symbols, n },
        base: family.base(),
        family,
        signs: signs.to_vec(),
        mu,
        label_index,
    })
}

/// Every catalog family for `n`, all sign variants.
pub fn catalog(n: usize) -> Result<Vec<CatalogEntry>, UnfoldError> {
    let table = match n {
        1 => CATALOG_N1,
        2 => CATALOG_N2,
        _ => return Err(UnfoldError::UnsupportedN(n)),
    };
    let mut out = Vec::new();
    for (idx, t) in table.iter().enumerate() {
        let k: usize = t.comps.iter().map(|c| c.matches('±').count()).sum();
        for signs in sign_lattice(k) {
            out.push(instantiate(t, n, &signs, idx)?);
        }
    }
    Ok(out)
}

/// Number of distinct labels (a `C_3^±` entry counts once).
pub fn catalog_label_count(n: usize) -> usize {
    match n {
        1 => CATALOG_N1.len(),
        2 => CATALOG_N2.len(),
        _ => 0,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub parameter: String,
    /// Whether the family stays versal without this parameter (it should not).
    pub still_versal: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub label: String,
    pub label_ascii: String,
    pub variant: String,
    pub family: Vec<String>,
    pub nondegeneracy: Vec<String>,
    pub stable: Verdict,
    pub classified: Option<String>,
    pub symbols_match: bool,
    pub mu_expected: Vec<usize>,
    pub mu_computed: Vec<Option<usize>>,
    /// Smallest number of time directions the family needs to be versal (0 or 1).
    pub t_codim: Option<u8>,
    pub probes: Vec<ProbeRow>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogReport {
    pub n: usize,
    pub labels: usize,
    pub labels_passed: usize,
    pub rows: Vec<VerifyRow>,
}

impl CatalogReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "catalog n={}: {}/{} labels pass ({} variants)",
            self.n,
            self.labels_passed,
            self.labels,
            self.rows.len()
        );
        for r in &self.rows {
            let mus: Vec<String> =
                r.mu_computed.iter().map(|m| m.map(|v| v.to_string()).unwrap_or_else(|| "inf".into())).collect();
            let _ = writeln!(
                s,
                "{}  {:<24} {:<5} nondeg={} stable={}@{} class={} mu=({}) tcodim={} minimal={}  {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.label,
                r.variant,
                if r.nondegeneracy.is_empty() { "ok" } else { "FAIL" },
                r.stable.holds,
                r.stable.order,
                r.classified.clone().unwrap_or_else(|| "-".into()),
                mus.join(","),
                r.t_codim.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                r.probes.iter().all(|p| !p.still_versal),
                r.family.join(" ; "),
            );
            for p in &r.nondegeneracy {
                let _ = writeln!(s, "      nondegeneracy: {p}");
            }
            for p in r.probes.iter().filter(|p| p.still_versal) {
                let _ = writeln!(s, "      still versal without {}", p.parameter);
            }
        }
        s
    }
}

/// Versality at the level the label claims: without `dF/dt` for prefix 0, with it for prefix 1.
fn versal_at_prefix(fam: &Family, prefix: u8, policy: JetPolicy) -> Result<Verdict, TangentError> {
    if prefix == 0 {
        is_versal_without_time(fam, policy)
    } else {
        is_inf_versal(fam, policy)
    }
}

/// Drops each `q_j` (and `t` for prefix-1 entries) in turn; every probe must lose versality.
pub fn minimality_probes(entry: &CatalogEntry) -> Result<Vec<ProbeRow>, TangentError> {
    let policy = JetPolicy::for_n(entry.label.n);
    let mut names: Vec<String> = (1..=entry.label.n).map(|j| format!("q{j}")).collect();
    if entry.label.prefix == 1 {
        names.push("t".into());
    }
    names
        .into_iter()
        .map(|p| {
            let fam = entry.family.with_zeroed(&p)?;
            let v = versal_at_prefix(&fam, entry.label.prefix, policy)?;
            Ok(ProbeRow { parameter: p, still_versal: v.holds, witness: v.witness })
        })
        .collect()
}

pub fn verify_entry(entry: &CatalogEntry) -> Result<VerifyRow, TangentError> {
    let n = entry.label.n;
    let policy = JetPolicy::for_n(n);
    let nondegeneracy = pc_nondegeneracy(&entry.family);
    let stable = is_inf_stable(&entry.family, policy)?;
    let classified = classify_multigerm(&entry.base, n)?;
    let symbols_match = matches!(&classified, Ok(l) if l.symbols == entry.label.symbols);
    let rep = codim_report_auto(&entry.base, policy)?;
    let mu_computed = rep.mu();
    let mu_match =
        mu_computed.iter().zip(&entry.mu).all(|(a, b)| *a == Some(*b)) && mu_computed.len() == entry.mu.len();
    let t_codim = if is_versal_without_time(&entry.family, policy)?.holds {
        Some(0)
    } else if is_inf_versal(&entry.family, policy)?.holds {
        Some(1)
    } else {
        None
    };
    let probes = minimality_probes(entry)?;
    let pass = nondegeneracy.is_empty()
        && stable.holds
        && symbols_match
        && mu_match
        && t_codim == Some(entry.label.prefix)
        && probes.iter().all(|p| !p.still_versal);
    Ok(VerifyRow {
        label: entry.label.to_string(),
        label_ascii: entry.label.ascii(),
        variant: entry.variant(),
        family: entry.expressions(),
        nondegeneracy,
        stable,
        classified: classified.ok().map(|l| CatalogLabel { prefix: entry.label.prefix, ..l }.to_string()),
        symbols_match,
        mu_expected: entry.mu.clone(),
        mu_computed,
        t_codim,
        probes,
        pass,
    })
}

/// Verifies every sign variant of every catalog entry; rows are computed in parallel.
pub fn verify_catalog(n: usize) -> Result<CatalogReport, UnfoldError> {
    let entries = catalog(n)?;
    let rows: Vec<VerifyRow> = entries.par_iter().map(verify_entry).collect::<Result<_, _>>()?;
    let labels = catalog_label_count(n);
    let labels_passed = (0..labels)
        .filter(|&i| entries.iter().zip(&rows).filter(|(e, _)| e.label_index == i).all(|(_, r)| r.pass))
        .count();
    Ok(CatalogReport { n, labels, labels_passed, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExportRecord {
    pub label: String,
    pub label_ascii: String,
    pub m: usize,
    pub n: usize,
    pub variant: String,
    pub mu: Vec<usize>,
    pub family: Vec<String>,
}

pub fn export_records(entries: &[CatalogEntry]) -> Vec<ExportRecord> {
    entries
        .iter()
        .map(|e| ExportRecord {
            label: e.label.to_string(),
            label_ascii: e.label.ascii(),
            m: e.label.m(),
            n: e.label.n,
            variant: e.variant(),
            mu: e.mu.clone(),
            family: e.expressions(),
        })
        .collect()
}

/// One tab-separated line per record: `label  variant  m  n  mu  F_1 ; ... ; F_m`.
pub fn export_text(entries: &[CatalogEntry]) -> String {
    let mut s = String::from("# label\tvariant\tm\tn\tmu\tfamily\n");
    for r in export_records(entries) {
        let mu: Vec<String> = r.mu.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.label_ascii,
            r.variant,
            r.m,
            r.n,
            mu.join(","),
            r.family.join(" ; ")
        );
    }
    s
}

pub fn export_json(entries: &[CatalogEntry]) -> String {
    serde_json::to_string_pretty(&export_records(entries)).expect("plain data")
}

/// Base multi-germs with a listed versal unfolding; `(n, base)`.
pub const VERSAL_BASES: &[(usize, &str)] = &[
    (1, "y^2; y^2"),
    (1, "y^2; y^3"),
    (1, "y^2; x^2"),
    (1, "y^2; y^2; y^2"),
    (2, "y^2; y^2"),
    (2, "y^2; y^3"),
    (2, "y^2; y^4"),
    (2, "y^3; y^3"),
    (2, "y^2; x^2"),
    (2, "y^2; x^3"),
    (2, "y^2; x*y + y^3"),
    (2, "y^2; -x*y + y^3"),
    (2, "x^2; x^2"),
    (2, "y^2; y^2; y^2"),
    (2, "y^2; y^2; y^3"),
    (2, "y^2; y^2; x^2"),
    (2, "y^2; y^2; y^2; y^2"),
];

/// The listed versal unfoldings for `n`, in order.
pub fn versal_lists(n: usize) -> Result<Vec<Family>, UnfoldError> {
    VERSAL_BASES
        .iter()
        .filter(|(nn, _)| *nn == n)
        .map(|(nn, text)| versal_unfolding(&MultiGerm::parse(text)?, *nn))
        .collect()
}

/// Chooses the codimension-zero or codimension-one construction from the budget.
///
/// Without explicit signs the all-`+` vector is tried first, then the rest of the sign lattice
/// in order; the first stable family is returned.
pub fn build_generating(f0: &MultiGerm, n: usize, signs: Option<&[Sign]>) -> Result<Family, UnfoldError> {
    let label = classify_multigerm(f0, n)?.map_err(UnfoldError::Reject)?;
    if let Some(s) = signs.filter(|s| !s.is_empty()) {
        return build_codim1(f0, n, s);
    }
    if label.mu_total() < n + 2 {
        return build_versal(f0, n);
    }
    let k = codim1_sign_count(f0, n)?;
    let mut last = None;
    for s in sign_lattice(k) {
        match build_codim1(f0, n, &s) {
            Ok(f) => return Ok(f),
            Err(e @ UnfoldError::Verification { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("sign lattice is never empty"))
}

/// All `2^k` sign vectors, all-`+` first.
pub fn sign_vectors(k: usize) -> Vec<Vec<Sign>> {
    sign_lattice(k)
}
