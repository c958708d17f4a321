use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{JetError, Monomial, Poly, Role, VarSpec, Q};

/// Sparse coefficient vector, sorted by column.
pub type SVec = Vec<(usize, Q)>;

/// All monomials in `nvars` variables, restricted to `allowed`, with degree in `dmin..=dmax`.
fn enumerate(nvars: usize, allowed: &[usize], dmin: u32, dmax: u32) -> Vec<Monomial> {
    fn rec(allowed: &[usize], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>, dmin: u32, deg: u32) {
        match allowed.split_first() {
            None => {
                if deg >= dmin {
                    out.push(Monomial(cur.clone()));
                }
            }
            Some((&v, rest)) => {
                for e in 0..=left {
                    cur[v] = e;
                    rec(rest, left - e, cur, out, dmin, deg + e);
                }
                cur[v] = 0;
            }
        }
    }
    let mut out = Vec::new();
    if dmin <= dmax {
        rec(allowed, dmax, &mut vec![0; nvars], &mut out, dmin, 0);
    }
    out.sort();
    out
}

/// Truncated jet space `J^l` over a variable spec.
#[derive(Clone, Debug)]
pub struct JetSpace {
    spec: Arc<VarSpec>,
    l: u32,
    cols: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl JetSpace {
    pub fn new(spec: &Arc<VarSpec>, l: u32) -> Self {
        let all: Vec<usize> = (0..spec.len()).collect();
        let mut cols = enumerate(spec.len(), &all, 0, l);
        // Pivots are taken at the largest column, so quotient representatives come
        // from the low end: x-free monomials of low degree first.
        let xs = spec.indices(Role::Corner);
        cols.sort_by(|a, b| (a.degree_in(&xs), a).cmp(&(b.degree_in(&xs), b)));
        let index = cols.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        JetSpace { spec: spec.clone(), l, cols, index }
    }

    pub fn spec(&self) -> &Arc<VarSpec> {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn monomial(&self, col: usize) -> &Monomial {
        &self.cols[col]
    }

    /// Monomials with `dmin <= deg <= dmax` in the given variables (all if `None`), graded-lex order.
    pub fn monomials(&self, dmin: u32, dmax: u32, restrict: Option<&[usize]>) -> Vec<Monomial> {
        let all: Vec<usize> = (0..self.spec.len()).collect();
        enumerate(self.spec.len(), restrict.unwrap_or(&all), dmin, dmax.min(self.l))
    }
}

/// Direct product of jet spaces, one per component, as one concatenated coordinate vector.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    slots: Vec<JetSpace>,
    offsets: Vec<usize>,
    dim: usize,
}

impl ProductSpace {
    pub fn new(slots: Vec<JetSpace>) -> Self {
        let mut offsets = Vec::with_capacity(slots.len());
        let mut dim = 0;
        for s in &slots {
            offsets.push(dim);
            dim += s.dim();
        }
        ProductSpace { slots, offsets, dim }
    }

    pub fn single(space: JetSpace) -> Self {
        ProductSpace::new(vec![space])
    }

    pub fn uniform(specs: &[Arc<VarSpec>], l: u32) -> Self {
        ProductSpace::new(specs.iter().map(|s| JetSpace::new(s, l)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[JetSpace] {
        &self.slots
    }

    pub fn m(&self) -> usize {
        self.slots.len()
    }

    /// Slot and monomial of a global column.
    pub fn locate(&self, col: usize) -> (usize, &Monomial) {
        let s = self.offsets.partition_point(|&o| o <= col) - 1;
        (s, self.slots[s].monomial(col - self.offsets[s]))
    }

    pub fn column(&self, slot: usize, m: &Monomial) -> Option<usize> {
        self.slots[slot].column(m).map(|c| c + self.offsets[slot])
    }

    /// Coordinates of a vector of polynomials, dropping terms above the truncation order.
    pub fn vectorize(&self, comps: &[Poly]) -> Result<SVec, JetError> {
        if comps.len() != self.m() {
            return Err(JetError::Mismatch(format!("{} components for a {}-fold product", comps.len(), self.m())));
        }
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (s, p) in comps.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let p = p.reembed(self.slots[s].spec())?;
            for (m, c) in p.terms() {
                if let Some(col) = self.column(s, m) {
                    *acc.entry(col).or_insert_with(Q::zero) += c;
                }
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// Unit vectors for every monomial (in any slot) satisfying `keep`.
    pub fn monomial_vectors(&self, keep: impl Fn(usize, &VarSpec, &Monomial) -> bool) -> Vec<SVec> {
        let mut out = Vec::new();
        for (s, js) in self.slots.iter().enumerate() {
            for (c, m) in js.cols.iter().enumerate() {
                if keep(s, js.spec(), m) {
                    out.push(vec![(self.offsets[s] + c, Q::one())]);
                }
            }
        }
        out
    }
}

/// Which variables coefficient monomials range over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarSel {
    All,
    Roles(Vec<Role>),
    Names(Vec<String>),
}

/// Coefficient ring descriptor: monomials in `vars` of degree at least `min_degree`.
///
/// `min_degree = 0` is the ring, `1` its maximal ideal. Constants are `Names([])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coeff {
    pub vars: VarSel,
    pub min_degree: u32,
}

impl Coeff {
    pub fn ring(vars: VarSel) -> Self {
        Coeff { vars, min_degree: 0 }
    }

    pub fn ideal(vars: VarSel) -> Self {
        Coeff { vars, min_degree: 1 }
    }

    pub fn constants() -> Self {
        Coeff { vars: VarSel::Names(Vec::new()), min_degree: 0 }
    }

    pub fn names(names: &[String], min_degree: u32) -> Self {
        Coeff { vars: VarSel::Names(names.to_vec()), min_degree }
    }

    fn resolve(&self, spec: &VarSpec) -> Result<Vec<String>, JetError> {
        Ok(match &self.vars {
            VarSel::All => spec.names(),
            VarSel::Roles(roles) => {
                spec.vars().iter().filter(|v| roles.contains(&v.role)).map(|v| v.name.clone()).collect()
            }
            VarSel::Names(ns) => {
                for n in ns {
                    if spec.index(n).is_none() {
                        return Err(JetError::Mismatch(format!("coefficient variable `{n}` missing from {spec}")));
                    }
                }
                ns.clone()
            }
        })
    }
}

/// Subspace of a product jet space, kept in echelon form with pivot at each row's largest column.
#[derive(Clone, Debug)]
pub struct LinSubspace {
    space: Arc<ProductSpace>,
    rows: BTreeMap<usize, SVec>,
}

/// `v - a * row`, both sorted by column.
fn axpy(v: &[(usize, Q)], a: &Q, row: &[(usize, Q)]) -> SVec {
    let mut out = Vec::with_capacity(v.len() + row.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < row.len() {
        let take_v = j >= row.len() || (i < v.len() && v[i].0 < row[j].0);
        let take_r = i >= v.len() || (j < row.len() && row[j].0 < v[i].0);
        if take_v {
            out.push(v[i].clone());
            i += 1;
        } else if take_r {
            out.push((row[j].0, -(a * &row[j].1)));
            j += 1;
        } else {
            let c = &v[i].1 - a * &row[j].1;
            if !c.is_zero() {
                out.push((v[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl LinSubspace {
    pub fn zero(space: &Arc<ProductSpace>) -> Self {
        LinSubspace { space: space.clone(), rows: BTreeMap::new() }
    }

    pub fn space(&self) -> &Arc<ProductSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn codim(&self) -> usize {
        self.space.dim() - self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.codim() == 0
    }

    /// Eliminates leading entries that sit on pivots; zero result means membership.
    fn reduce_leading(&self, mut v: SVec) -> SVec {
        while let Some((c, a)) = v.last() {
            match self.rows.get(c) {
                Some(row) => {
                    let a = a.clone();
                    v = axpy(&v, &a, row);
                }
                None => break,
            }
        }
        v
    }

    /// Normal form: no entry left on a pivot column.
    pub fn reduce(&self, mut v: SVec) -> SVec {
        let mut cursor = usize::MAX;
        loop {
            let pos = v.partition_point(|e| e.0 < cursor);
            let Some(k) = pos.checked_sub(1) else { return v };
            let (c, a) = v[k].clone();
            match self.rows.get(&c) {
                Some(row) => v = axpy(&v, &a, row),
                None => cursor = c,
            }
        }
    }

    /// Adds a vector; returns whether the dimension grew.
    pub fn insert(&mut self, v: SVec) -> bool {
        let v = self.reduce_leading(v);
        let Some((c, a)) = v.last().cloned() else { return false };
        let inv = a.recip();
        let row = v.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.rows.insert(c, row);
        true
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        self.reduce_leading(v.to_vec()).is_empty()
    }

    pub fn contains_all(&self, other: &LinSubspace) -> bool {
        other.rows.values().all(|r| self.contains(r))
    }

    pub fn extend(&mut self, other: &LinSubspace) {
        for r in other.rows.values() {
            self.insert(r.clone());
        }
    }

    /// Adds the module span of `gens` over `coeff`.
    pub fn add_span(&mut self, gens: &[Vec<Poly>], coeff: &Coeff) -> Result<(), JetError> {
        for g in gens {
            for row in span_rows(&self.space, g, coeff)? {
                self.insert(row);
            }
        }
        Ok(())
    }

    /// Non-pivot columns in increasing column order: a basis of the quotient.
    pub fn quotient_columns(&self) -> Vec<usize> {
        (0..self.space.dim()).filter(|c| !self.rows.contains_key(c)).collect()
    }

    pub fn quotient_basis(&self) -> Vec<QuotientElem> {
        self.quotient_columns()
            .into_iter()
            .map(|c| {
                let (slot, m) = self.space.locate(c);
                QuotientElem { slot, mono: m.clone(), spec: self.space.slots()[slot].spec().clone() }
            })
            .collect()
    }

    /// Fully reduced echelon rows, ordered by pivot. Canonical for the subspace.
    pub fn rref(&self) -> Vec<SVec> {
        let mut done: BTreeMap<usize, SVec> = BTreeMap::new();
        for (&p, row) in &self.rows {
            let mut r = row.clone();
            let mut k = r.len() - 1;
            while k > 0 {
                k -= 1;
                let (c, a) = r[k].clone();
                if let Some(other) = done.get(&c) {
                    r = axpy(&r, &a, other);
                    k = r.partition_point(|e| e.0 < c);
                }
            }
            done.insert(p, r);
        }
        done.into_values().collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SVec> {
        self.rows.values()
    }
}

/// Rows `monomial * generator` for every admissible coefficient monomial.
fn span_rows(space: &ProductSpace, gen: &[Poly], coeff: &Coeff) -> Result<Vec<SVec>, JetError> {
    if gen.len() != space.m() {
        return Err(JetError::Mismatch(format!("generator has {} components, space has {}", gen.len(), space.m())));
    }
    let l = space.slots().first().map(|s| s.order()).unwrap_or(0);
    let mut embedded = Vec::new();
    for (s, p) in gen.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let sp = space.slots()[s].spec();
        let p = p.reembed(sp).map_err(|e| JetError::Mismatch(format!("generator slot {s}: {e}")))?;
        embedded.push((s, p));
    }
    let Some(low) = embedded.iter().filter_map(|(_, p)| p.order()).min() else { return Ok(Vec::new()) };
    if low > l {
        return Ok(Vec::new());
    }
    let first_spec = space.slots()[embedded[0].0].spec().clone();
    let names = coeff.resolve(&first_spec)?;
    let cvars: Vec<usize> = names.iter().map(|n| first_spec.index(n).expect("resolved")).collect();
    let cmonos = enumerate(first_spec.len(), &cvars, coeff.min_degree, l - low);
    // Per-slot index maps from the coefficient variables.
    let mut maps = Vec::new();
    for (s, _) in &embedded {
        let sp = space.slots()[*s].spec();
        let m: Result<Vec<usize>, JetError> = names
            .iter()
            .map(|n| {
                sp.index(n).ok_or_else(|| JetError::Mismatch(format!("coefficient variable `{n}` missing in slot {s}")))
            })
            .collect();
        maps.push(m?);
    }
    let mut rows = Vec::with_capacity(cmonos.len());
    for cm in &cmonos {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for ((s, p), map) in embedded.iter().zip(&maps) {
            let sp = space.slots()[*s].spec();
            let mut lifted = vec![0u32; sp.len()];
            for (k, &v) in cvars.iter().enumerate() {
                lifted[map[k]] = cm.0[v];
            }
            let lifted = Monomial(lifted);
            let dc = lifted.degree();
            for (m, c) in p.terms() {
                if dc + m.degree() > l {
                    break;
                }
                let col = space.column(*s, &lifted.mul(m)).expect("degree within order");
                *acc.entry(col).or_insert_with(Q::zero) += c;
            }
        }
        let row: SVec = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Span of `{monomial * g}` over the coefficient ring, truncated at the space's order.
pub fn module_span(gens: &[Vec<Poly>], coeff: &Coeff, space: &Arc<ProductSpace>) -> Result<LinSubspace, JetError> {
    let mut sub = LinSubspace::zero(space);
    sub.add_span(gens, coeff)?;
    Ok(sub)
}

/// Quotient representative: a monomial placed in one slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientElem {
    pub slot: usize,
    pub mono: Monomial,
    spec: Arc<VarSpec>,
}

impl QuotientElem {
    pub fn spec(&self) -> &Arc<VarSpec> {
        &self.spec
    }
}

impl fmt::Display for QuotientElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}*{}", self.slot + 1, self.mono.fmt_with(&self.spec))
    }
}
