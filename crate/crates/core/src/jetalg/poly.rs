use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{JetError, Role, VarSpec};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exponent vector aligned with a [`VarSpec`]; ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn degree_in(&self, idx: &[usize]) -> u32 {
        idx.iter().map(|&i| self.0[i]).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn fmt_with(&self, spec: &VarSpec) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(spec.display_name(i).to_string()),
                _ => parts.push(format!("{}^{}", spec.display_name(i), e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    spec: Arc<VarSpec>,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(spec: &Arc<VarSpec>) -> Self {
        Poly { spec: spec.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(spec: &Arc<VarSpec>, c: Q) -> Self {
        let mut p = Poly::zero(spec);
        p.add_term(Monomial::one(spec.len()), c);
        p
    }

    pub fn var(spec: &Arc<VarSpec>, i: usize) -> Self {
        Poly::term(spec, Monomial::var(spec.len(), i), Q::one())
    }

    pub fn var_named(spec: &Arc<VarSpec>, name: &str) -> Result<Self, JetError> {
        let i = spec.index(name).ok_or_else(|| JetError::UnknownVar(name.into()))?;
        Ok(Poly::var(spec, i))
    }

    pub fn term(spec: &Arc<VarSpec>, m: Monomial, c: Q) -> Self {
        let mut p = Poly::zero(spec);
        p.add_term(m, c);
        p
    }

    pub fn spec(&self) -> &Arc<VarSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one(self.spec.len()))
    }

    /// Highest total degree, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Lowest total degree (order of vanishing), `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn degree_in_var(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] > 0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        debug_assert_eq!(m.0.len(), self.spec.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn same_spec(&self, other: &Poly) {
        assert!(
            Arc::ptr_eq(&self.spec, &other.spec) || *self.spec == *other.spec,
            "variable spec mismatch: {} vs {}",
            self.spec,
            other.spec
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.same_spec(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.spec);
        }
        Poly { spec: self.spec.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_bounded(other, None)
    }

    /// Product with every term of total degree above `l` dropped.
    pub fn mul_truncate(&self, other: &Poly, l: u32) -> Poly {
        self.mul_bounded(other, Some(l))
    }

    fn mul_bounded(&self, other: &Poly, l: Option<u32>) -> Poly {
        self.same_spec(other);
        let mut out = Poly::zero(&self.spec);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if l.is_some_and(|l| da > l) {
                break;
            }
            for (mb, cb) in &other.terms {
                if l.is_some_and(|l| da + mb.degree() > l) {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow_truncate(&self, e: u32, l: Option<u32>) -> Poly {
        let mut acc = Poly::constant(&self.spec, Q::one());
        for _ in 0..e {
            acc = acc.mul_bounded(self, l);
        }
        acc
    }

    pub fn truncate(&self, l: u32) -> Poly {
        Poly {
            spec: self.spec.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= l).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Poly {
        Poly {
            spec: self.spec.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Exact partial derivative in variable index `i`.
    pub fn diff(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.spec);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * q(e as i64));
        }
        out
    }

    pub fn diff_named(&self, name: &str) -> Result<Poly, JetError> {
        let i = self.spec.index(name).ok_or_else(|| JetError::UnknownVar(name.into()))?;
        Ok(self.diff(i))
    }

    /// Substitutes `value` for variable `i`, truncating at `l` when given.
    pub fn subs(&self, i: usize, value: &Poly, l: Option<u32>) -> Poly {
        self.same_spec(value);
        let maxe = self.degree_in_var(i);
        if maxe == 0 {
            return self.clone();
        }
        let mut powers = vec![Poly::constant(&self.spec, Q::one())];
        for e in 1..=maxe as usize {
            let next = powers[e - 1].mul_bounded(value, l);
            powers.push(next);
        }
        let mut out = Poly::zero(&self.spec);
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            let mut rest = m.clone();
            rest.0[i] = 0;
            let head = Poly::term(&self.spec, rest, c.clone());
            let prod = head.mul_bounded(&powers[e], l);
            for (m2, c2) in prod.terms {
                out.add_term(m2, c2);
            }
        }
        out
    }

    /// Sets variable `i` to zero.
    pub fn restrict_zero(&self, i: usize) -> Poly {
        Poly {
            spec: self.spec.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.0[i] == 0).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Simultaneous substitution `v_i -> images[i]`; images live in a common target spec.
    pub fn compose(&self, images: &[Poly], l: Option<u32>) -> Poly {
        assert_eq!(images.len(), self.spec.len());
        let target = images.first().map(|p| p.spec.clone()).unwrap_or_else(|| self.spec.clone());
        let mut cache: Vec<Vec<Poly>> = vec![vec![Poly::constant(&target, Q::one())]; images.len()];
        let mut out = Poly::zero(&target);
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul_bounded(&images[i], l);
                    cache[i].push(next);
                }
                if e > 0 {
                    acc = acc.mul_bounded(&cache[i][e as usize], l);
                }
            }
            for (m2, c2) in acc.terms {
                out.add_term(m2, c2);
            }
        }
        out
    }

    /// Moves the polynomial into `target`, matching variables by canonical name.
    pub fn reembed(&self, target: &Arc<VarSpec>) -> Result<Poly, JetError> {
        let map: Vec<Option<usize>> = self.spec.vars().iter().map(|v| target.index(&v.name)).collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &ei) in m.0.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] = ei,
                    None => return Err(JetError::UnknownVar(self.spec.var(i).name.clone())),
                }
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Drops the named variables after checking they do not occur.
    pub fn drop_vars(&self, names: &[&str]) -> Result<Poly, JetError> {
        self.reembed(&Arc::new(self.spec.without(names)))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for (i, &e) in m.0.iter().enumerate() {
                    if e > 0 {
                        v *= point[i].powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Variables of the given role that occur in some term.
    pub fn used_in_role(&self, role: Role) -> Vec<usize> {
        self.spec.indices(role).into_iter().filter(|&i| self.involves(i)).collect()
    }
}

fn fmt_coeff(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", fmt_coeff(&a))?;
            } else if a.is_one() {
                write!(f, "{}", m.fmt_with(&self.spec))?;
            } else {
                write!(f, "{}*{}", fmt_coeff(&a), m.fmt_with(&self.spec))?;
            }
        }
        Ok(())
    }
}
