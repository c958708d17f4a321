//! Stable reduction and recognition of the simple classes `A_k`, `B_k`, `C_k^±`, `F_4`.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::jetalg::{Monomial, Poly, Role, VarSpec, Q};
use crate::tangent::{codim_report_auto, JetPolicy, MultiGerm, TangentError};

/// Default working order when no parameter count is known.
pub const DEFAULT_ORDER: u32 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn ascii(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Symbol {
    A(u8),
    B(u8),
    C(u8, Option<Sign>),
    F4,
}

const SUB: [&str; 10] = ["₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"];
const SUP: [&str; 2] = ["⁰", "¹"];

impl Symbol {
    pub fn mu(self) -> usize {
        match self {
            Symbol::A(k) | Symbol::B(k) | Symbol::C(k, _) => k as usize,
            Symbol::F4 => 4,
        }
    }

    pub fn ascii(self) -> String {
        match self {
            Symbol::A(k) => format!("A{k}"),
            Symbol::B(k) => format!("B{k}"),
            Symbol::C(k, s) => format!("C{k}{}", s.map(|s| s.ascii().to_string()).unwrap_or_default()),
            Symbol::F4 => "F4".into(),
        }
    }

    pub fn unicode(self) -> String {
        match self {
            Symbol::A(k) => format!("A{}", SUB[k as usize]),
            Symbol::B(k) => format!("B{}", SUB[k as usize]),
            Symbol::C(k, s) => format!(
                "C{}{}",
                SUB[k as usize],
                match s {
                    Some(Sign::Plus) => "⁺",
                    Some(Sign::Minus) => "⁻",
                    None => "",
                }
            ),
            Symbol::F4 => "F₄".into(),
        }
    }

    /// Parses `A2`, `C3+`, `F4` and the subscript forms.
    pub fn parse(s: &str) -> Option<Symbol> {
        let plain: String = s
            .chars()
            .map(|c| match c {
                '₀'..='₉' => char::from_digit(c as u32 - '₀' as u32, 10).unwrap(),
                '⁺' => '+',
                '⁻' | '−' => '-',
                c => c,
            })
            .collect();
        let (head, rest) = plain.split_at(1.min(plain.len()));
        let (digits, sign) = match rest.strip_suffix('+') {
            Some(d) => (d, Some(Sign::Plus)),
            None => match rest.strip_suffix('-') {
                Some(d) => (d, Some(Sign::Minus)),
                None => (rest, None),
            },
        };
        let k: u8 = digits.parse().ok()?;
        match (head, k, sign) {
            ("A", 1..=4, None) => Some(Symbol::A(k)),
            ("B", 2..=4, None) => Some(Symbol::B(k)),
            ("C", 3, Some(_)) => Some(Symbol::C(3, sign)),
            ("C", 4, None) => Some(Symbol::C(4, None)),
            ("F", 4, None) => Some(Symbol::F4),
            _ => None,
        }
    }
}

/// `ᵖ(⁰S₁ … ⁰S_m)` with `p` the t-codimension prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CatalogLabel {
    pub prefix: u8,
    pub symbols: Vec<Symbol>,
    pub n: usize,
}

impl CatalogLabel {
    pub fn m(&self) -> usize {
        self.symbols.len()
    }

    pub fn mu_total(&self) -> usize {
        self.symbols.iter().map(|s| s.mu()).sum()
    }

    /// Budget and prefix consistency. Prefix 1 also covers families whose `t`-direction is
    /// needed although `sum mu < n + 2` (the squares in the codimension-one form fill the gap).
    pub fn is_consistent(&self) -> bool {
        let total = self.mu_total();
        match self.prefix {
            0 => total <= self.n + 1,
            1 => total <= self.n + 2,
            _ => false,
        }
    }

    pub fn ascii(&self) -> String {
        let parts: Vec<String> = self.symbols.iter().map(|s| format!("0{}", s.ascii())).collect();
        format!("{}({})", self.prefix, parts.join(","))
    }

    /// File-name friendly form, e.g. `1_A1_A2` or `1_A1_C3p`.
    pub fn slug(&self) -> String {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.ascii().replace('+', "p").replace('-', "m")).collect();
        format!("{}_{}", self.prefix, parts.join("_"))
    }

    /// Parses `1(0A1,0A2)`, `1(0A1 0A2)` or the Unicode form.
    pub fn parse(text: &str, n: usize) -> Option<CatalogLabel> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.replace('⁰', "0").replace('¹', "1");
        let open = t.find('(')?;
        let prefix: u8 = t[..open].parse().ok()?;
        let inner = t[open + 1..].strip_suffix(')')?;
        let mut symbols = Vec::new();
        for part in inner.split([',', '0']).filter(|s| !s.is_empty()) {
            symbols.push(Symbol::parse(part)?);
        }
        if symbols.is_empty() {
            return None;
        }
        Some(CatalogLabel { prefix, symbols, n })
    }
}

impl fmt::Display for CatalogLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: String = self.symbols.iter().map(|s| format!("⁰{}", s.unicode())).collect();
        write!(f, "{}({})", SUP[self.prefix as usize % 2], parts)
    }
}

/// Result of splitting off linear corner forms and a non-degenerate quadratic fiber form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionRecord {
    pub reduced: Poly,
    /// Corner variables removed because they appear with a non-zero linear coefficient.
    pub removed_x: Vec<String>,
    /// Signature `(positive, negative)` of the split quadratic fiber form.
    pub quadratic_signature: (usize, usize),
    pub order: u32,
}

fn y_only_quadratic(f: &Poly, ys: &[usize]) -> Vec<(Monomial, Q)> {
    f.terms()
        .iter()
        .filter(|(m, _)| m.degree() == 2 && m.degree_in(ys) == 2)
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect()
}

fn quad_coeff(f: &Poly, i: usize, j: usize) -> Q {
    let mut e = vec![0; f.spec().len()];
    e[i] += 1;
    e[j] += 1;
    f.coeff(&Monomial(e))
}

/// Splits `f ~ f' + sum ±x_j + sum d_i Y_i^2`, working modulo terms of degree above `l`.
pub fn reduce_stably(f: &Poly, l: u32) -> ReductionRecord {
    let spec = f.spec().clone();
    let mut g = f.truncate(l);
    let mut removed_x = Vec::new();
    let mut keep_x = Vec::new();
    for j in spec.indices(Role::Corner) {
        if !g.coeff(&Monomial::var(spec.len(), j)).is_zero() {
            g = g.restrict_zero(j);
            removed_x.push(spec.var(j).name.clone());
        } else {
            keep_x.push(j);
        }
    }

    // Lagrange diagonalisation of the y-only quadratic part by linear changes of y.
    let mut open: Vec<usize> = spec.indices(Role::Fiber);
    let mut split: Vec<(usize, Q)> = Vec::new();
    loop {
        if y_only_quadratic(&g, &open).is_empty() {
            break;
        }
        if let Some(&i) = open.iter().find(|&&i| !quad_coeff(&g, i, i).is_zero()) {
            let d = quad_coeff(&g, i, i);
            let mut image = Poly::var(&spec, i);
            for &j in open.iter().filter(|&&j| j != i) {
                let a = quad_coeff(&g, i, j);
                if !a.is_zero() {
                    image = image.sub(&Poly::var(&spec, j).scale(&(a / (&d * Q::from_integer(2.into())))));
                }
            }
            g = g.subs(i, &image, Some(l));
            open.retain(|&v| v != i);
            split.push((i, d));
        } else {
            let (i, j) = open
                .iter()
                .flat_map(|&i| open.iter().map(move |&j| (i, j)))
                .find(|&(i, j)| i != j && !quad_coeff(&g, i, j).is_zero())
                .expect("non-empty quadratic part has a cross term");
            g = g.subs(i, &Poly::var(&spec, i).add(&Poly::var(&spec, j)), Some(l));
        }
    }

    // Formal splitting: Y_i -> Y_i - (dg/dY_i - 2 d_i Y_i) / (2 d_i) until dg/dY_i = 2 d_i Y_i mod M^l.
    let two = Q::from_integer(2.into());
    for &(i, ref d) in &split {
        for _ in 0..=l {
            let lead = Poly::var(&spec, i).scale(&(d * &two));
            let rest = g.diff(i).sub(&lead).truncate(l.saturating_sub(1));
            if rest.is_zero() {
                break;
            }
            let image = Poly::var(&spec, i).sub(&rest.scale(&(d * &two).recip()));
            g = g.subs(i, &image, Some(l));
        }
        g = g.restrict_zero(i);
    }

    let pos = split.iter().filter(|(_, d)| d.is_positive()).count();
    let sig = (pos, split.len() - pos);
    let kept_y: Vec<usize> = open;
    let target = Arc::new(
        VarSpec::new(keep_x.len(), kept_y.len(), &spec.param_names().iter().map(String::as_str).collect::<Vec<_>>())
            .expect("smaller spec"),
    );
    let params: Vec<usize> =
        (0..spec.len()).filter(|&i| !matches!(spec.var(i).role, Role::Corner | Role::Fiber)).collect();
    let order: Vec<usize> = keep_x.iter().chain(&kept_y).chain(&params).copied().collect();
    let mut reduced = Poly::zero(&target);
    for (m, c) in g.terms() {
        let removed: bool = (0..spec.len()).any(|i| m.0[i] > 0 && !order.contains(&i));
        if removed {
            continue;
        }
        reduced.add_term(Monomial(order.iter().map(|&i| m.0[i]).collect()), c.clone());
    }
    ReductionRecord { reduced, removed_x, quadratic_signature: sig, order: l }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum OutOfCatalog {
    #[error("non-isolated (infinite codimension)")]
    NonIsolated,
    #[error("regular germ (codimension 0)")]
    Regular,
    #[error("corner dimension {0} after reduction is not covered")]
    CornerDimension(usize),
    #[error("invariants (r={r}, k={k}, mu={mu}, mu_boundary={mu_boundary}) match no simple class")]
    NoMatch { r: usize, k: usize, mu: usize, mu_boundary: String },
}

/// Invariants used for recognition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub r: usize,
    pub k: usize,
    pub mu: Option<usize>,
    pub mu_boundary: Option<usize>,
}

fn mu_of(p: &Poly, policy: JetPolicy) -> Result<Option<usize>, TangentError> {
    let g = MultiGerm::new(vec![p.clone()])?;
    Ok(codim_report_auto(&g, policy)?.total)
}

pub fn invariants(f: &Poly, l: u32) -> Result<(ReductionRecord, Invariants), TangentError> {
    let rec = reduce_stably(f, l);
    let g = &rec.reduced;
    let policy = JetPolicy { start: 3.min(l), cap: l };
    let mu = mu_of(g, policy)?;
    let r = g.spec().r();
    let k = g.spec().k();
    let mu_boundary = if r >= 1 {
        let xs: Vec<String> = g.spec().indices(Role::Corner).iter().map(|&i| g.spec().var(i).name.clone()).collect();
        let mut h = g.clone();
        for &i in &g.spec().indices(Role::Corner) {
            h = h.restrict_zero(i);
        }
        let names: Vec<&str> = xs.iter().map(String::as_str).collect();
        mu_of(&h.drop_vars(&names)?, policy)?
    } else {
        None
    };
    Ok((rec, Invariants { r, k, mu, mu_boundary }))
}

/// Sign of `coef[xy] * coef[y^3]`, invariant under positive corner scalings.
fn c3_sign(g: &Poly) -> Option<Sign> {
    let xy = g.coeff(&Monomial(vec![1, 1]));
    let y3 = g.coeff(&Monomial(vec![0, 3]));
    let prod = xy * y3;
    if prod.is_zero() {
        None
    } else if prod.is_positive() {
        Some(Sign::Plus)
    } else {
        Some(Sign::Minus)
    }
}

pub fn classify_component_at(f: &Poly, l: u32) -> Result<Result<Symbol, OutOfCatalog>, TangentError> {
    let f = MultiGerm::new(vec![f.clone()])?.base().comps()[0].clone();
    let (rec, inv) = invariants(&f, l)?;
    let Some(mu) = inv.mu else { return Ok(Err(OutOfCatalog::NonIsolated)) };
    if mu == 0 {
        return Ok(Err(OutOfCatalog::Regular));
    }
    let no_match = || OutOfCatalog::NoMatch {
        r: inv.r,
        k: inv.k,
        mu,
        mu_boundary: inv.mu_boundary.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
    };
    let g = &rec.reduced;
    let sym = match (inv.r, inv.k) {
        (0, 0..=1) if (1..=4).contains(&mu) => Symbol::A(mu as u8),
        (1, 0) if (2..=4).contains(&mu) => Symbol::B(mu as u8),
        (1, 1) => {
            let x2 = !g.coeff(&Monomial(vec![2, 0])).is_zero();
            match (mu, inv.mu_boundary) {
                (3, Some(2)) => match c3_sign(g) {
                    Some(s) => Symbol::C(3, Some(s)),
                    None => return Ok(Err(no_match())),
                },
                (4, Some(3)) => Symbol::C(4, None),
                (4, Some(2)) if x2 => Symbol::F4,
                _ => return Ok(Err(no_match())),
            }
        }
        (r, _) if r >= 2 => return Ok(Err(OutOfCatalog::CornerDimension(r))),
        _ => return Ok(Err(no_match())),
    };
    Ok(Ok(sym))
}

/// Symbol of one component germ (parameters, if any, are set to zero).
pub fn classify_component(f: &Poly) -> Result<Result<Symbol, OutOfCatalog>, TangentError> {
    classify_component_at(f, DEFAULT_ORDER)
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
pub enum Reject {
    #[error("budget exceeded: sum of mu = {total} > n + 2 = {bound}")]
    Budget { total: usize, bound: usize },
    #[error("leave-one-out violated: dropping component {index} leaves sum of mu = {rest} > n + 1")]
    LeaveOneOut { index: usize, rest: usize },
    #[error("component {index} is out of catalog: {reason}")]
    Component { index: usize, reason: OutOfCatalog },
    #[error("component {index} is non-isolated")]
    NonIsolated { index: usize },
}

/// Label of a multi-germ, or the reason it lies outside the catalog.
pub fn classify_multigerm(f0: &MultiGerm, n: usize) -> Result<Result<CatalogLabel, Reject>, TangentError> {
    let base = f0.base();
    let l = JetPolicy::for_n(n).cap.max(4);
    let mut symbols = Vec::new();
    for (i, c) in base.comps().iter().enumerate() {
        match classify_component_at(c, l)? {
            Ok(s) => symbols.push(s),
            Err(OutOfCatalog::NonIsolated) => return Ok(Err(Reject::NonIsolated { index: i + 1 })),
            Err(reason) => return Ok(Err(Reject::Component { index: i + 1, reason })),
        }
    }
    let mus: Vec<usize> = symbols.iter().map(|s| s.mu()).collect();
    let total: usize = mus.iter().sum();
    if total > n + 2 {
        return Ok(Err(Reject::Budget { total, bound: n + 2 }));
    }
    for (i, mu) in mus.iter().enumerate() {
        let rest = total - mu;
        if rest > n + 1 {
            return Ok(Err(Reject::LeaveOneOut { index: i + 1, rest }));
        }
    }
    let prefix = u8::from(total == n + 2);
    Ok(Ok(CatalogLabel { prefix, symbols, n }))
}
