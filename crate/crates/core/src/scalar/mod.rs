//! Exact rational functions in `v = q^(1/2)`, spectral variables and
//! parameters.

pub mod gcd;
pub mod modp;
mod parse;
pub mod poly;
pub mod rat;
pub mod specialize;
pub mod vars;

pub use parse::ParseError;
pub use poly::{Mono, MultiPoly, ZPoly};
pub use rat::Rat;
pub use vars::{Var, VarError, MAX_VARS};

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("specialization hits a pole")]
    SpecializationPole,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Var(#[from] VarError),
}

/// Reduced fraction `num/den`. Both parts have nonnegative exponents, are
/// coprime, and `den` has leading coefficient 1, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: MultiPoly,
    den: MultiPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rat(Rat::from_int(n))
    }

    pub fn from_rat(r: Rat) -> Scalar {
        Scalar {
            num: MultiPoly::constant(r),
            den: MultiPoly::one(),
        }
    }

    pub fn var(v: Var) -> Scalar {
        Scalar {
            num: MultiPoly::var(v),
            den: MultiPoly::one(),
        }
    }

    /// `v^e` for any integer `e`.
    pub fn v_pow(e: i32) -> Scalar {
        Scalar::var(Var::V).pow(e)
    }

    /// `q = v^2`.
    pub fn q() -> Scalar {
        Scalar::v_pow(2)
    }

    /// Quantum integer `[n] = (q^n - q^-n)/(q - q^-1)`.
    pub fn qint(n: i64) -> Scalar {
        if n == 0 {
            return Scalar::zero();
        }
        let sign = if n < 0 { -1 } else { 1 };
        let n = n.unsigned_abs() as i16;
        // v-polynomial v^{-2(n-1)} + ... + v^{2(n-1)}
        let terms = (0..n).map(|k| (Mono::var(Var::V, 4 * k), Rat::from_int(sign)));
        Scalar::from_poly(MultiPoly::from_terms(terms))
            * Scalar::v_pow(-2 * (n as i32 - 1))
    }

    /// Laurent polynomial as a scalar; negative exponents are moved to the
    /// denominator.
    pub fn from_poly(p: MultiPoly) -> Scalar {
        if !p.has_negative_exponents() {
            return Scalar {
                num: p,
                den: MultiPoly::one(),
            };
        }
        let m = p.min_mono();
        let mut shift = Mono::ONE;
        for (i, e) in m.0.iter().enumerate() {
            if *e < 0 {
                shift.0[i] = -*e;
            }
        }
        Scalar::from_parts(p.shift(&shift), MultiPoly::monomial(shift, Rat::one()))
            .expect("monomial denominator")
    }

    /// Build and reduce a fraction of Laurent polynomials.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::from_poly(num) / Scalar::from_poly(den))
    }

    /// Reduce a fraction whose parts already have nonnegative exponents.
    fn from_parts(num: MultiPoly, den: MultiPoly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar::zero());
        }
        let (num, den) = if num.is_constant() || den.is_constant() {
            (num, den)
        } else {
            let g = gcd::gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        Ok(Scalar::monic(num, den))
    }

    fn monic(num: MultiPoly, den: MultiPoly) -> Scalar {
        let lc = den.lc();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = lc.recip();
            Scalar {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Rational value when free of variables.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_constant() {
            Some(self.num.constant_value().unwrap())
        } else {
            None
        }
    }

    /// Total number of stored terms, a proxy for expression size.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs = self.num.vars();
        for v in self.den.vars() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs.sort();
        vs
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.degree_in(v) > 0 || self.den.degree_in(v) > 0
    }

    pub fn try_div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        if o.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self * &o.recip_unchecked())
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.recip_unchecked())
    }

    fn recip_unchecked(&self) -> Scalar {
        Scalar::monic(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Scalar {
        if e < 0 {
            return self.recip().expect("negative power of zero").pow(-e);
        }
        // Coprime parts stay coprime under powers.
        Scalar {
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        }
    }

    /// Simultaneous substitution of variables by scalars.
    pub fn substitute(&self, bindings: &[(Var, Scalar)]) -> Result<Scalar, ScalarError> {
        let mut powers = PowerCache::new(bindings);
        let (nn, nd) = powers.eval(&self.num);
        let (dn, dd) = powers.eval(&self.den);
        if dn.is_zero() {
            return Err(ScalarError::SpecializationPole);
        }
        Ok(Scalar::from_poly(nn.mul(&dd)) / Scalar::from_poly(nd.mul(&dn)))
    }

    /// Substitute rational values for every variable.
    pub fn eval(&self, point: &[(Var, Rat)]) -> Result<Rat, ScalarError> {
        let n = self.num.eval_all(point).ok_or(ScalarError::SpecializationPole)?;
        let d = self.den.eval_all(point).ok_or(ScalarError::SpecializationPole)?;
        if d.is_zero() {
            return Err(ScalarError::SpecializationPole);
        }
        Ok(&n / &d)
    }

    /// Partial derivative; for a variable with root `r` the exponent unit is
    /// `1/r`, which rescales the result.
    pub fn derivative(&self, v: Var) -> Scalar {
        if !self.depends_on(v) {
            return Scalar::zero();
        }
        let dn = self.num.derivative_raw(v);
        let dd = self.den.derivative_raw(v);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        let mut out = Scalar::new(num, den).expect("nonzero denominator");
        // d/dx of u^e with u = x^(1/r) is e*u^(e-1) * u^(1-r)/r.
        let root = v.info().root as i32;
        if root != 1 {
            out = out * Scalar::var(v).pow(1 - root) * Scalar::from_rat(Rat::new(1, root as i64));
        }
        out
    }
}

/// Cached powers of substituted values, kept as numerator and denominator
/// polynomials so that a polynomial evaluates over a common denominator.
struct PowerCache<'a> {
    bindings: &'a [(Var, Scalar)],
    cache: HashMap<(usize, bool, i16), MultiPoly>,
}

impl<'a> PowerCache<'a> {
    fn new(bindings: &'a [(Var, Scalar)]) -> Self {
        PowerCache {
            bindings,
            cache: HashMap::new(),
        }
    }

    fn pow(&mut self, idx: usize, denom: bool, e: i16) -> MultiPoly {
        if let Some(p) = self.cache.get(&(idx, denom, e)) {
            return p.clone();
        }
        let s = &self.bindings[idx].1;
        let base = if denom { &s.den } else { &s.num };
        let p = base.pow(e as u32);
        self.cache.insert((idx, denom, e), p.clone());
        p
    }

    /// Returns `(n, d)` with `p(bindings) = n/d`; `d` is a product of
    /// binding denominators.
    fn eval(&mut self, p: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let slots: Vec<(usize, Var, i16)> = self
            .bindings
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (i, *v, p.degree_in(*v).max(0) as i16))
            .collect();
        let mut num = MultiPoly::zero();
        for (m, c) in p.terms() {
            let mut rest = *m;
            let mut t = MultiPoly::constant(c.clone());
            for &(i, v, dmax) in &slots {
                let e = m.exp(v);
                rest.0[v.index()] = 0;
                if e > 0 {
                    t = t.mul(&self.pow(i, false, e));
                }
                if dmax > e {
                    t = t.mul(&self.pow(i, true, dmax - e));
                }
            }
            num = num.add(&t.shift(&rest));
        }
        let mut den = MultiPoly::one();
        for &(i, _, dmax) in &slots {
            if dmax > 0 {
                den = den.mul(&self.pow(i, true, dmax));
            }
        }
        (num, den)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = self.num.add(&o.num);
            if self.den.is_one() {
                return Scalar { num, den: o.den.clone() };
            }
            return Scalar::from_parts(num, self.den.clone()).unwrap();
        }
        if self.den.is_constant() && o.den.is_constant() {
            unreachable!("monic constant denominators are equal");
        }
        let g = if self.den.is_constant() || o.den.is_constant() {
            MultiPoly::one()
        } else {
            gcd::gcd(&self.den, &o.den)
        };
        if g.is_constant() {
            let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
            let den = self.den.mul(&o.den);
            // Coprime denominators and reduced inputs leave no common factor.
            if num.is_zero() {
                return Scalar::zero();
            }
            return Scalar::monic(num, den);
        }
        let b1 = self.den.div_exact(&g).unwrap();
        let d1 = o.den.div_exact(&g).unwrap();
        let num = self.num.mul(&d1).add(&o.num.mul(&b1));
        if num.is_zero() {
            return Scalar::zero();
        }
        let g2 = gcd::gcd(&num, &g);
        let (num, g) = if g2.is_constant() {
            (num, g)
        } else {
            (num.div_exact(&g2).unwrap(), g.div_exact(&g2).unwrap())
        };
        Scalar::monic(num, b1.mul(&d1).mul(&g))
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar {
                num: self.num.mul(&o.num),
                den: MultiPoly::one(),
            };
        }
        let (a, d) = cancel(&self.num, &o.den);
        let (c, b) = cancel(&o.num, &self.den);
        Scalar::monic(a.mul(&c), b.mul(&d))
    }
}

/// Remove the common factor of `x` and `y`.
fn cancel(x: &MultiPoly, y: &MultiPoly) -> (MultiPoly, MultiPoly) {
    if x.is_constant() || y.is_constant() {
        return (x.clone(), y.clone());
    }
    let g = gcd::gcd(x, y);
    if g.is_constant() {
        (x.clone(), y.clone())
    } else {
        (x.div_exact(&g).unwrap(), y.div_exact(&g).unwrap())
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on a zero divisor; use [`Scalar::try_div`] to handle it.
    fn div(self, o: &Scalar) -> Scalar {
        self.try_div(o).expect("division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &Scalar) -> Scalar {
                (&self).$f(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                self.$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from_int(n)
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Scalar {
        Scalar::from_rat(r)
    }
}

impl From<Var> for Scalar {
    fn from(v: Var) -> Scalar {
        Scalar::var(v)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::format_scalar(self))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Scalar, ScalarError> {
        parse::parse_scalar(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn spec_examples() {
        let z = Scalar::var(Var::Z);
        assert!((&z + &(-&z)).is_zero());
        assert_eq!(s("z^2 - 1") / s("z - 1"), s("z + 1"));
        let v = Scalar::var(Var::V);
        assert_eq!((&v * &v).to_string(), "q");
    }

    #[test]
    fn substitution_examples() {
        let e = s("(v^2 - 1)/v");
        let r = e.substitute(&[(Var::V, Scalar::from_int(2))]).unwrap();
        assert_eq!(r, Scalar::from_rat(Rat::new(3, 2)));
        let z = Scalar::var(Var::Z);
        let inv = z.substitute(&[(Var::Z, z.recip().unwrap())]).unwrap();
        assert_eq!(inv, s("1/z"));
        let k = s("(xi - z^2)/(xi*z^2 - 1)");
        assert!(k.substitute(&[(Var::Z, Scalar::one())]).unwrap().is_one());
    }

    #[test]
    fn pole_detected() {
        let e = s("1/(z - 1)");
        assert_eq!(
            e.substitute(&[(Var::Z, Scalar::one())]),
            Err(ScalarError::SpecializationPole)
        );
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(s("z^2").derivative(Var::Z), s("2*z"));
        assert!(s("xi").derivative(Var::Z).is_zero());
        let k = s("(xi - z^2)/(xi*z^2 - 1)");
        let expect = s("2*z*(1 - xi^2)/(xi*z^2 - 1)^2");
        assert_eq!(k.derivative(Var::Z), expect);
    }

    #[test]
    fn canonical_sign() {
        let a = s("1/(1 - z)");
        let b = s("-1/(z - 1)");
        assert_eq!(a, b);
        assert!(a.den().lc().is_one());
    }

    #[test]
    fn quantum_integers() {
        assert_eq!(Scalar::qint(1), Scalar::one());
        assert_eq!(Scalar::qint(2), s("q + 1/q"));
        assert_eq!(Scalar::qint(3), s("q^2 + 1 + q^-2"));
        assert_eq!(Scalar::qint(-2), -Scalar::qint(2));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Scalar::one().try_div(&Scalar::zero()), Err(ScalarError::DivisionByZero));
    }
}
