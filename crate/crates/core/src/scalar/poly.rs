//! Sparse multivariate polynomials over a generic coefficient ring.

use super::rat::Rat;
use super::vars::{Var, MAX_VARS};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;

/// Exponent vector indexed by registry position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub [i16; MAX_VARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; MAX_VARS]);

    pub fn var(v: Var, e: i16) -> Mono {
        let mut m = Mono::ONE;
        m.0[v.index()] = e;
        m
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().map(|&e| e as i32).sum()
    }

    pub fn exp(&self, v: Var) -> i16 {
        self.0[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a += *b;
        }
        r
    }

    /// Quotient when `o` divides `self` with nonnegative exponents left over.
    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a -= *b;
            if *a < 0 {
                return None;
            }
        }
        Some(r)
    }

    pub fn sub(&self, o: &Mono) -> Mono {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a -= *b;
        }
        r
    }

    pub fn meet(&self, o: &Mono) -> Mono {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a = (*a).min(*b);
        }
        r
    }

    pub fn join(&self, o: &Mono) -> Mono {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a = (*a).max(*b);
        }
        r
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| Var(i as u8))
    }
}

impl Ord for Mono {
    /// Graded-lex: total degree first, then lexicographic with the lowest
    /// registry index most significant.
    fn cmp(&self, o: &Mono) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Mono) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Debug for Mono {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

pub trait Coef: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
}

impl Coef for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            None
        } else {
            Some(self / o)
        }
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl Coef for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            return None;
        }
        let (q, r) = self.div_rem(o);
        if Zero::is_zero(&r) {
            Some(q)
        } else {
            None
        }
    }
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
}

/// Terms sorted by decreasing monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<C: Coef> {
    pub(super) terms: Vec<(Mono, C)>,
}

/// Polynomial with rational coefficients.
pub type MultiPoly = Poly<Rat>;
/// Polynomial with integer coefficients, used inside gcd routines.
pub type ZPoly = Poly<BigInt>;

impl<C: Coef> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Poly::monomial(Mono::ONE, c)
    }

    pub fn one() -> Self {
        Poly::constant(C::one())
    }

    pub fn monomial(m: Mono, c: C) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Mono::var(v, 1), C::one())
    }

    /// Build from arbitrary terms; duplicates are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut map: HashMap<Mono, C> = HashMap::new();
        for (m, c) in terms {
            match map.get_mut(&m) {
                Some(e) => *e = e.add(&c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        Poly::from_map(map)
    }

    fn from_map(map: HashMap<Mono, C>) -> Self {
        let mut terms: Vec<(Mono, C)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, C)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Mono, C)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == C::one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<C> {
        if self.terms.is_empty() {
            Some(C::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn lead(&self) -> Option<&(Mono, C)> {
        self.terms.first()
    }

    pub fn lc(&self) -> C {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(C::zero)
    }

    pub fn lm(&self) -> Mono {
        self.terms.first().map(|t| t.0).unwrap_or(Mono::ONE)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(-1)
    }

    pub fn degree_in(&self, v: Var) -> i32 {
        self.terms.iter().map(|t| t.0.exp(v) as i32).max().unwrap_or(-1)
    }

    pub fn min_degree_in(&self, v: Var) -> i32 {
        self.terms.iter().map(|t| t.0.exp(v) as i32).min().unwrap_or(0)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_mono(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::ONE,
            Some(first) => it.fold(first.0, |acc, t| acc.meet(&t.0)),
        }
    }

    pub fn max_mono(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::ONE,
            Some(first) => it.fold(first.0, |acc, t| acc.join(&t.0)),
        }
    }

    /// Variables that occur with a nonzero exponent.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = [false; MAX_VARS];
        for (m, _) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    seen[i] = true;
                }
            }
        }
        (0..MAX_VARS).filter(|&i| seen[i]).map(|i| Var(i as u8)).collect()
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.iter().any(|(m, _)| m.0.iter().any(|&e| e < 0))
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.merge(o, true)
    }

    fn merge(&self, o: &Self, negate: bool) -> Self {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { b[j].1.neg() } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        a[i].1.sub(&b[j].1)
                    } else {
                        a[i].1.add(&b[j].1)
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { t.1.neg() } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    /// Multiply by a single term. Order is preserved.
    pub fn mul_term(&self, m: &Mono, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(mm, cc)| (mm.mul(m), cc.mul(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.mul_term(&Mono::ONE, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if o.terms.len() == 1 {
            return self.mul_term(&o.terms[0].0, &o.terms[0].1);
        }
        if self.terms.len() == 1 {
            return o.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut map: HashMap<Mono, C> = HashMap::with_capacity(self.terms.len() * o.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match map.get_mut(&m) {
                    Some(e) => *e = e.add(&c),
                    None => {
                        map.insert(m, c);
                    }
                }
            }
        }
        Poly::from_map(map)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiply every exponent vector by a monomial (may introduce negatives).
    pub fn shift(&self, m: &Mono) -> Self {
        Poly {
            terms: self.terms.iter().map(|(mm, c)| (mm.mul(m), c.clone())).collect(),
        }
    }

    /// Exact division, `None` unless `d` divides `self` in the polynomial ring.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                out.push((m.div(dm)?, c.div_exact(dc)?));
            }
            return Some(Poly { terms: out });
        }
        let (dm, dc) = d.terms[0].clone();
        // Quick rejections on the extreme monomials.
        self.terms[0].0.div(&dm)?;
        let dlast = d.terms.last().unwrap().0;
        self.terms.last().unwrap().0.div(&dlast)?;
        let mut rem: std::collections::BTreeMap<std::cmp::Reverse<Mono>, C> = self
            .terms
            .iter()
            .map(|(m, c)| (std::cmp::Reverse(*m), c.clone()))
            .collect();
        let mut quot = Vec::new();
        while let Some((std::cmp::Reverse(m), c)) = rem.pop_first() {
            let qm = m.div(&dm)?;
            let qc = c.div_exact(&dc)?;
            for (tm, tc) in d.terms.iter().skip(1) {
                let key = std::cmp::Reverse(tm.mul(&qm));
                let delta = tc.mul(&qc);
                match rem.get_mut(&key) {
                    Some(e) => {
                        *e = e.sub(&delta);
                        if e.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, delta.neg());
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Coefficients with respect to `v`, indexed by exponent (nonnegative
    /// exponents assumed); each coefficient is free of `v`.
    pub fn coeffs_in(&self, v: Var) -> Vec<Self> {
        let d = self.degree_in(v);
        if d < 0 {
            return Vec::new();
        }
        let mut buckets: Vec<Vec<(Mono, C)>> = vec![Vec::new(); d as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v);
            assert!(e >= 0, "coeffs_in with negative exponent");
            let mut mm = *m;
            mm.0[v.index()] = 0;
            buckets[e as usize].push((mm, c.clone()));
        }
        // Removing v keeps relative order within a bucket only up to ties in
        // the graded order, so re-sort.
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Poly { terms: t }
            })
            .collect()
    }

    pub fn from_coeffs_in(v: Var, coeffs: &[Self]) -> Self {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let m = Mono::var(v, e as i16);
            for (cm, cc) in &c.terms {
                terms.push((cm.mul(&m), cc.clone()));
            }
        }
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    /// Leading coefficient with respect to `v` (a polynomial free of `v`).
    pub fn lc_in(&self, v: Var) -> Self {
        let d = self.degree_in(v);
        let mut t: Vec<(Mono, C)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) as i32 == d)
            .map(|(m, c)| {
                let mut mm = *m;
                mm.0[v.index()] = 0;
                (mm, c.clone())
            })
            .collect();
        t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { terms: t }
    }

    pub fn map_coeffs<D: Coef>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Formal partial derivative in exponent units (root handled by caller).
    pub fn derivative_raw(&self, v: Var) -> Poly<C> {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e != 0 {
                let mut mm = *m;
                mm.0[v.index()] -= 1;
                terms.push((mm, c.mul(&C::from_i64(e as i64))));
            }
        }
        Poly::from_terms(terms)
    }
}

impl MultiPoly {
    pub fn from_int(n: i64) -> MultiPoly {
        Poly::constant(Rat::from_int(n))
    }

    /// Clear denominators: returns `(m, z)` with `self = z / m`, `m > 0`.
    pub fn to_zpoly(&self) -> (BigInt, ZPoly) {
        let mut l = <BigInt as One>::one();
        for (_, c) in &self.terms {
            let d = c.denom();
            if !d.is_one() {
                l = l.lcm(&d);
            }
        }
        let z = ZPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let n = c.numer() * (&l / c.denom());
                    (*m, n)
                })
                .collect(),
        };
        (l, z)
    }

    /// Partial evaluation of `v` at a rational value.
    pub fn eval_var(&self, v: Var, x: &Rat) -> MultiPoly {
        let mut cache: HashMap<i16, Rat> = HashMap::new();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let f = cache.entry(e).or_insert_with(|| x.pow(e as i32)).clone();
            let mut mm = *m;
            mm.0[v.index()] = 0;
            terms.push((mm, c * &f));
        }
        Poly::from_terms(terms)
    }

    /// Full evaluation at a point given for every occurring variable.
    pub fn eval_all(&self, point: &[(Var, Rat)]) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.vars() {
                let x = &point.iter().find(|(pv, _)| *pv == v)?.1;
                t = &t * &x.pow(m.exp(v) as i32);
            }
            acc = &acc + &t;
        }
        Some(acc)
    }
}

impl ZPoly {
    pub fn to_multipoly(&self) -> MultiPoly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, Rat::from_bigint(c.clone())))
                .collect(),
        }
    }

    /// Gcd of the integer coefficients, sign taken from the leading term.
    pub fn content(&self) -> BigInt {
        let mut g = <BigInt as Zero>::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if self.lc().is_negative() {
            -g
        } else {
            g
        }
    }

    pub fn primitive(&self) -> (BigInt, ZPoly) {
        if self.is_zero() {
            return (<BigInt as Zero>::zero(), ZPoly::zero());
        }
        let c = self.content();
        if c.is_one() {
            return (c, self.clone());
        }
        let terms = self.terms.iter().map(|(m, x)| (*m, x / &c)).collect();
        (c, ZPoly { terms })
    }

    pub fn max_norm(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(<BigInt as Zero>::zero)
    }

    /// Evaluate `v` at an integer.
    pub fn eval_int(&self, v: Var, x: &BigInt) -> ZPoly {
        let mut cache: HashMap<i16, BigInt> = HashMap::new();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let f = cache
                .entry(e)
                .or_insert_with(|| num_traits::pow(x.clone(), e as usize))
                .clone();
            let mut mm = *m;
            mm.0[v.index()] = 0;
            terms.push((mm, c * f));
        }
        Poly::from_terms(terms)
    }

    /// Image modulo p with every variable except `keep` specialized.
    pub fn univariate_image(&self, keep: Var, point: &[u64], p: u64) -> Vec<u64> {
        let d = self.degree_in(keep).max(0) as usize;
        let mut out = vec![0u64; d + 1];
        let pb = BigInt::from(p);
        for (m, c) in &self.terms {
            let mut t = c.mod_floor(&pb).iter_u64_digits().next().unwrap_or(0);
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 && i != keep.index() {
                    t = super::modp::mul(t, super::modp::pow(point[i], e as u64, p), p);
                }
            }
            let k = m.exp(keep) as usize;
            out[k] = super::modp::add(out[k], t, p);
        }
        super::modp::trim(&mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MultiPoly {
        Poly::var(Var::Z)
    }
    fn v() -> MultiPoly {
        Poly::var(Var::V)
    }

    #[test]
    fn graded_lex_order() {
        let p = x().mul(&x()).add(&v()).add(&MultiPoly::one());
        let degs: Vec<i32> = p.terms().iter().map(|t| t.0.degree()).collect();
        assert_eq!(degs, vec![2, 1, 0]);
        // v sorts ahead of z at equal degree
        let q = x().add(&v());
        assert_eq!(q.terms()[0].0, Mono::var(Var::V, 1));
    }

    #[test]
    fn exact_division() {
        let a = x().mul(&x()).sub(&MultiPoly::one());
        let b = x().sub(&MultiPoly::one());
        assert_eq!(a.div_exact(&b), Some(x().add(&MultiPoly::one())));
        assert_eq!(b.div_exact(&a), None);
        assert_eq!(a.div_exact(&x()), None);
    }

    #[test]
    fn exact_division_multivariate() {
        let f = x().add(&v()).pow(3);
        let g = x().sub(&v().scale(&Rat::new(2, 3)));
        let prod = f.mul(&g);
        assert_eq!(prod.div_exact(&f), Some(g.clone()));
        assert_eq!(prod.div_exact(&g), Some(f));
    }

    #[test]
    fn coeff_roundtrip() {
        let p = x().pow(3).mul(&v()).add(&x()).add(&v().pow(2));
        let cs = p.coeffs_in(Var::Z);
        assert_eq!(cs.len(), 4);
        assert_eq!(Poly::from_coeffs_in(Var::Z, &cs), p);
    }

    #[test]
    fn zpoly_conversion() {
        let p = x().scale(&Rat::new(1, 2)).add(&MultiPoly::constant(Rat::new(1, 3)));
        let (m, z) = p.to_zpoly();
        assert_eq!(m, BigInt::from(6));
        assert_eq!(z.to_multipoly(), p.scale(&Rat::from_int(6)));
    }
}
