//! Sparse multivariate polynomials over a [`Ring`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{PrimeField, Rationals, Ring};
use crate::monomial::{Monomial, MAX_DEGREE, MAX_VARS};

/// Ordered list of variable names shared by polynomials of one ambient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarList {
    names: Vec<String>,
}

impl VarList {
    pub fn new(names: Vec<String>) -> Result<Arc<Self>> {
        if names.len() > MAX_VARS {
            return Err(Error::TooManyVariables(names.len(), MAX_VARS));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = !n.is_empty()
                && n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::InvalidArgument(format!("bad variable name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Arc::new(VarList { names }))
    }

    /// `z1..zn`.
    pub fn z(n: usize) -> Arc<Self> {
        Self::new((1..=n).map(|i| format!("z{i}")).collect()).expect("valid z-variables")
    }

    /// `z1..zn, y`.
    pub fn z_with_y(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
        names.push("y".to_string());
        Self::new(names).expect("valid variables")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The sub-list keeping the given slots, in order.
    pub fn select(&self, keep: &[usize]) -> Arc<Self> {
        Arc::new(VarList { names: keep.iter().map(|&i| self.names[i].clone()).collect() })
    }
}

/// Sparse polynomial: a map from exponent vectors to nonzero coefficients.
#[derive(Clone)]
pub struct SparsePoly<R: Ring> {
    ring: R,
    vars: Arc<VarList>,
    terms: BTreeMap<Monomial, R::Elem>,
}

pub type FpPoly = SparsePoly<PrimeField>;
pub type QPoly = SparsePoly<Rationals>;

impl<R: Ring> PartialEq for SparsePoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.vars == other.vars && self.terms == other.terms
    }
}

impl<R: Ring> fmt::Debug for SparsePoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly({})", self)
    }
}

impl<R: Ring> SparsePoly<R> {
    pub fn zero(ring: &R, vars: &Arc<VarList>) -> Self {
        SparsePoly { ring: ring.clone(), vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, vars: &Arc<VarList>, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, vars);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one(ring: &R, vars: &Arc<VarList>) -> Self {
        Self::constant(ring, vars, ring.one())
    }

    pub fn var(ring: &R, vars: &Arc<VarList>, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut p = Self::zero(ring, vars);
        p.add_term(Monomial::var(i), ring.one());
        p
    }

    pub fn monomial(ring: &R, vars: &Arc<VarList>, m: Monomial, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, vars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(ring: &R, vars: &Arc<VarList>, terms: impl IntoIterator<Item = (Monomial, R::Elem)>) -> Self {
        let mut p = Self::zero(ring, vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Linear form `sum c_i z_i`.
    pub fn linear(ring: &R, vars: &Arc<VarList>, coeffs: &[R::Elem]) -> Self {
        assert_eq!(coeffs.len(), vars.len());
        Self::from_terms(ring, vars, coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(i), c.clone())))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn vars(&self) -> &Arc<VarList> {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
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

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> R::Elem {
        self.terms.get(&m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(Monomial::ONE)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Lowest degree among nonzero terms.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn leading(&self) -> Option<(Monomial, &R::Elem)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = self.ring.add(e.get(), &c);
                if self.ring.is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials live in different variable lists"
        );
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        if self.ring.is_zero(c) {
            return Self::zero(&self.ring, &self.vars);
        }
        let mut out = Self::zero(&self.ring, &self.vars);
        for (m, a) in &self.terms {
            let v = self.ring.mul(a, c);
            if !self.ring.is_zero(&v) {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    pub fn mul_monomial(&self, mono: Monomial, c: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        if self.ring.is_zero(c) {
            return out;
        }
        for (m, a) in &self.terms {
            let v = self.ring.mul(a, c);
            if !self.ring.is_zero(&v) {
                out.terms.insert(m.mul(mono), v);
            }
        }
        out
    }

    /// Product with all terms above `max_deg` discarded.
    pub fn mul_truncated(&self, other: &Self, max_deg: u32) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(&self.ring, &self.vars);
        let a: Vec<(Monomial, u32, &R::Elem)> = self.terms.iter().map(|(m, c)| (*m, m.degree(), c)).collect();
        let b: Vec<(Monomial, u32, &R::Elem)> = other.terms.iter().map(|(m, c)| (*m, m.degree(), c)).collect();
        for (ma, da, ca) in &a {
            if *da > max_deg {
                continue;
            }
            for (mb, db, cb) in &b {
                if da + db > max_deg {
                    continue;
                }
                out.add_term(ma.mul(*mb), self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring, &self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn homogeneous_component(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (*m, c.clone())).collect();
        SparsePoly { ring: self.ring.clone(), vars: self.vars.clone(), terms }
    }

    /// Components indexed by degree `0..=deg`.
    pub fn components(&self) -> Vec<Self> {
        let top = self.degree().unwrap_or(0);
        let mut out: Vec<Self> = (0..=top).map(|_| Self::zero(&self.ring, &self.vars)).collect();
        for (m, c) in &self.terms {
            out[m.degree() as usize].terms.insert(*m, c.clone());
        }
        out
    }

    pub fn truncate(&self, max_deg: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() <= max_deg).map(|(m, c)| (*m, c.clone())).collect();
        SparsePoly { ring: self.ring.clone(), vars: self.vars.clone(), terms }
    }

    /// Sum of the homogeneous components of degrees `1..=j`.
    pub fn left_segment(&self, j: u32) -> Result<Self> {
        let deg = self.degree().unwrap_or(0);
        if j == 0 || j > deg {
            return Err(Error::InvalidArgument(format!("left segment index {j} outside 1..={deg}")));
        }
        if !self.ring.is_zero(&self.constant_term()) {
            return Err(Error::InvalidArgument("left segment needs a vanishing constant term".into()));
        }
        Ok(self.truncate(j))
    }

    /// True when every term has degree `d` (the zero polynomial qualifies).
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => self.is_homogeneous_of(d),
        }
    }

    pub fn evaluate(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars());
        let mut acc = self.ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t = self.ring.mul(&t, &self.ring.pow(x, e as u64));
                }
            }
            acc = self.ring.add(&acc, &t);
        }
        acc
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.ring, &self.vars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                out.add_term(m.with_exp(i, e - 1), self.ring.mul(c, &self.ring.from_i64(e as i64)));
            }
        }
        out
    }

    /// Replaces variable `i` by `image` (which may itself involve `z_i`).
    pub fn substitute_var(&self, i: usize, image: &Self) -> Self {
        self.check_compatible(image);
        let mut powers: Vec<Self> = vec![Self::one(&self.ring, &self.vars)];
        let mut out = Self::zero(&self.ring, &self.vars);
        for (m, c) in &self.terms {
            let e = m.exp(i) as usize;
            if e == 0 {
                out.add_term(*m, c.clone());
                continue;
            }
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * image;
                powers.push(next);
            }
            let rest = m.with_exp(i, 0);
            for (pm, pc) in &powers[e].terms {
                out.add_term(rest.mul(*pm), self.ring.mul(c, pc));
            }
        }
        out
    }

    /// Translation `z_i -> z_i + a_i`.
    pub fn shift(&self, offsets: &[R::Elem]) -> Self {
        assert_eq!(offsets.len(), self.nvars());
        let mut out = self.clone();
        for (i, a) in offsets.iter().enumerate() {
            if self.ring.is_zero(a) {
                continue;
            }
            let image = &Self::var(&self.ring, &self.vars, i) + &Self::constant(&self.ring, &self.vars, a.clone());
            out = out.substitute_var(i, &image);
        }
        out
    }

    /// Re-homes the polynomial in `target`, sending slot `old` to `map[old]`.
    /// Variables with `map[old] == None` must not occur.
    pub fn relabel(&self, target: &Arc<VarList>, map: &[Option<usize>]) -> Result<Self> {
        assert_eq!(map.len(), self.nvars());
        let mut out = Self::zero(&self.ring, target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (old, slot) in map.iter().enumerate() {
                let e = m.exp(old);
                match slot {
                    Some(new) => exps[*new] += e,
                    None if e > 0 => {
                        return Err(Error::InvalidArgument(format!(
                            "variable {} cannot be dropped: it occurs",
                            self.vars.name(old)
                        )))
                    }
                    None => {}
                }
            }
            out.add_term(Monomial::from_exponents(&exps), c.clone());
        }
        Ok(out)
    }

    /// Sets the listed variables to zero and drops them from the variable list.
    pub fn restrict_to_zero(&self, drop: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.nvars()).filter(|i| !drop.contains(i)).collect();
        let target = self.vars.select(&keep);
        let mut map = vec![None; self.nvars()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let filtered = SparsePoly {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| drop.iter().all(|&d| m.exp(d) == 0))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        };
        filtered.relabel(&target, &map).expect("dropped variables were filtered")
    }

    /// Applies a coefficient map into another ring; terms mapping to zero vanish.
    pub fn map_coeffs<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> Result<S::Elem>) -> Result<SparsePoly<S>> {
        let mut out = SparsePoly::zero(target, &self.vars);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c)?);
        }
        Ok(out)
    }

    pub fn linear_coeffs(&self) -> Vec<R::Elem> {
        (0..self.nvars()).map(|i| self.coeff(Monomial::var(i))).collect()
    }
}

impl QPoly {
    /// Reduction modulo `p`; fails if `p` divides a denominator.
    pub fn reduce_mod(&self, field: &PrimeField) -> Result<FpPoly> {
        self.map_coeffs(field, |c| field.from_rational(c))
    }
}

impl<R: Ring> Add for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn add(self, rhs: &SparsePoly<R>) -> SparsePoly<R> {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<R: Ring> Sub for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn sub(self, rhs: &SparsePoly<R>) -> SparsePoly<R> {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, self.ring.neg(c));
        }
        out
    }
}

impl<R: Ring> Neg for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn neg(self) -> SparsePoly<R> {
        let terms = self.terms.iter().map(|(m, c)| (*m, self.ring.neg(c))).collect();
        SparsePoly { ring: self.ring.clone(), vars: self.vars.clone(), terms }
    }
}

impl<R: Ring> Mul for &SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn mul(self, rhs: &SparsePoly<R>) -> SparsePoly<R> {
        let da = self.degree().unwrap_or(0);
        let db = rhs.degree().unwrap_or(0);
        assert!(da + db <= MAX_DEGREE, "product degree exceeds {MAX_DEGREE}");
        self.mul_truncated(rhs, MAX_DEGREE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<R: Ring> $tr for SparsePoly<R> {
            type Output = SparsePoly<R>;
            fn $method(self, rhs: SparsePoly<R>) -> SparsePoly<R> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<R: Ring> Neg for SparsePoly<R> {
    type Output = SparsePoly<R>;
    fn neg(self) -> SparsePoly<R> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    #[test]
    fn components_and_segments() {
        let f = fp();
        let v = VarList::z(2);
        let z1 = FpPoly::var(&f, &v, 0);
        let z2 = FpPoly::var(&f, &v, 1);
        let one = FpPoly::one(&f, &v);
        let p = &(&one + &z1) + &(&z1 * &z2);
        assert_eq!(p.homogeneous_component(2), &z1 * &z2);
        assert!(p.homogeneous_component(7).is_zero());
        let cube = (&one + &z1).pow(3);
        assert_eq!(cube.homogeneous_component(2), (&z1 * &z1).scale(&3));
        let g = &(&z2 + &(&z1 * &z2)) + &(&z1.pow(3) - &z2.pow(3));
        assert_eq!(g.left_segment(2).unwrap(), &z2 + &(&z1 * &z2));
        assert!(g.left_segment(0).is_err());
        assert!(g.left_segment(4).is_err());
    }

    #[test]
    fn substitution_and_shift() {
        let f = fp();
        let v = VarList::z(3);
        let z: Vec<FpPoly> = (0..3).map(|i| FpPoly::var(&f, &v, i)).collect();
        let p = &(&z[0] * &z[1]) + &(&z[2] * &z[2]);
        let image = &z[1] + &z[2];
        let r = p.substitute_var(0, &image);
        let expect = &(&(&z[1] * &z[1]) + &(&z[1] * &z[2])) + &(&z[2] * &z[2]);
        assert_eq!(r, expect);
        let q = &z[0] * &z[0];
        let s = q.shift(&[1, 0, 0]);
        assert_eq!(s, &(&q + &z[0].scale(&2)) + &FpPoly::one(&f, &v));
        assert_eq!(s.evaluate(&[5, 0, 0]), 36);
    }

    #[test]
    fn restrict_drops_slots() {
        let f = fp();
        let v = VarList::z(3);
        let z: Vec<FpPoly> = (0..3).map(|i| FpPoly::var(&f, &v, i)).collect();
        let p = &(&z[0] * &z[1]) + &(&z[2] * &z[1]);
        let r = p.restrict_to_zero(&[0]);
        assert_eq!(r.nvars(), 2);
        assert_eq!(r.vars().names(), &["z2".to_string(), "z3".to_string()]);
        assert_eq!(r.len(), 1);
    }
}
