//! Multivariate polynomial gcd over the integers.
//!
//! The pipeline is layered from cheap to expensive. Monomial factors and
//! variables that occur in only one argument are peeled off first. A modular
//! certificate then proves coprimality in the common case. Genuine common
//! factors go to the heuristic gcd (evaluation at a large integer and
//! interpolation of the digits), and the primitive remainder sequence on the
//! main variable is the final fallback.

use super::modp;
use super::poly::{Mono, MultiPoly, Poly, ZPoly};
use super::vars::{Var, MAX_VARS};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

/// Gcd of two rational polynomials, normalized to a primitive integer
/// polynomial with positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() && b.is_zero() {
        return MultiPoly::zero();
    }
    if a.is_zero() {
        return b.to_zpoly().1.primitive().1.to_multipoly();
    }
    if b.is_zero() {
        return a.to_zpoly().1.primitive().1.to_multipoly();
    }
    let (_, za) = a.to_zpoly();
    let (_, zb) = b.to_zpoly();
    zgcd(&za.primitive().1, &zb.primitive().1).to_multipoly()
}

/// Gcd of primitive nonzero integer polynomials.
pub fn zgcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_constant() || b.is_constant() {
        return ZPoly::one();
    }
    if a == b {
        return positive(a.clone());
    }
    let ma = a.min_mono();
    let mb = b.min_mono();
    let mg = ma.meet(&mb);
    let a1 = a.shift(&inverse(&ma));
    let b1 = b.shift(&inverse(&mb));
    let mono = ZPoly::monomial(mg, <BigInt as One>::one());
    if a1.is_constant() || b1.is_constant() {
        return mono;
    }
    mono.mul(&gcd_free(a1, b1))
}

fn inverse(m: &Mono) -> Mono {
    let mut out = *m;
    for e in out.0.iter_mut() {
        *e = -*e;
    }
    out
}

fn positive(p: ZPoly) -> ZPoly {
    if p.lc().is_negative() {
        p.neg()
    } else {
        p
    }
}

/// Both arguments nonconstant and not divisible by any variable.
fn gcd_free(a: ZPoly, b: ZPoly) -> ZPoly {
    let va = a.vars();
    let vb = b.vars();
    let only_a: Vec<Var> = va.iter().copied().filter(|v| !vb.contains(v)).collect();
    let only_b: Vec<Var> = vb.iter().copied().filter(|v| !va.contains(v)).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        // The gcd is free of variables private to one side, so it divides
        // every coefficient with respect to those variables.
        let mut parts = coefficients_wrt(&a, &only_a);
        parts.extend(coefficients_wrt(&b, &only_b));
        parts.sort_by_key(|p| p.len());
        let mut g = parts[0].primitive().1;
        for p in &parts[1..] {
            if g.is_constant() {
                break;
            }
            g = zgcd(&g, &p.primitive().1);
        }
        return positive(g);
    }
    let shared = va;
    if certified_coprime(&a, &b, &shared) {
        return ZPoly::one();
    }
    if let Some(h) = heugcd(&a, &b, &shared) {
        return positive(h.0.primitive().1);
    }
    positive(prs_gcd(&a, &b, &shared))
}

/// Group terms by their exponents in `vs`; each group, with those variables
/// removed, is one coefficient.
fn coefficients_wrt(p: &ZPoly, vs: &[Var]) -> Vec<ZPoly> {
    if vs.is_empty() {
        return vec![p.clone()];
    }
    let mut groups: HashMap<Vec<i16>, Vec<(Mono, BigInt)>> = HashMap::new();
    for (m, c) in p.terms() {
        let key: Vec<i16> = vs.iter().map(|v| m.exp(*v)).collect();
        let mut mm = *m;
        for v in vs {
            mm.0[v.index()] = 0;
        }
        groups.entry(key).or_default().push((mm, c.clone()));
    }
    let mut out: Vec<ZPoly> = groups.into_values().map(ZPoly::from_terms).collect();
    out.sort_by_key(|p| p.len());
    out
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// True only if the gcd is provably constant. For each shared variable the
/// others are specialized modulo a word prime at a point where both leading
/// coefficients survive; a coprime image bounds that variable's degree in the
/// true gcd by zero.
fn certified_coprime(a: &ZPoly, b: &ZPoly, shared: &[Var]) -> bool {
    let p = modp::PRIMES[0];
    'vars: for (k, &x) in shared.iter().enumerate() {
        for attempt in 0..3u64 {
            let point: Vec<u64> = (0..MAX_VARS)
                .map(|i| splitmix(attempt * 1_000_003 + (k * MAX_VARS + i) as u64) % p)
                .collect();
            let ia = a.univariate_image(x, &point, p);
            let ib = b.univariate_image(x, &point, p);
            if ia.len() as i32 - 1 != a.degree_in(x) || ib.len() as i32 - 1 != b.degree_in(x) {
                continue;
            }
            match modp::gcd_degree(&ia, &ib, p) {
                Some(0) => continue 'vars,
                _ => return false,
            }
        }
        return false;
    }
    true
}

/// Coefficients reduced into the symmetric range around zero modulo `x`.
fn sym_mod(p: &ZPoly, x: &BigInt) -> ZPoly {
    let half = x >> 1;
    ZPoly::from_terms(p.terms().iter().map(|(m, c)| {
        let mut r = c.mod_floor(x);
        if r > half {
            r -= x;
        }
        (*m, r)
    }))
}

fn interpolate(mut h: ZPoly, x: &BigInt, var: Var) -> ZPoly {
    let mut out = Vec::new();
    let mut i: i16 = 0;
    while !h.is_zero() {
        let g = sym_mod(&h, x);
        for (m, c) in g.terms() {
            out.push((m.mul(&Mono::var(var, i)), c.clone()));
        }
        h = h.sub(&g).map_coeffs(|c| c / x);
        i += 1;
    }
    positive(ZPoly::from_terms(out))
}

const HEU_ATTEMPTS: usize = 6;

type GcdCof = (ZPoly, ZPoly, ZPoly);

/// Heuristic gcd returning `(h, a/h, b/h)`, or `None` when every evaluation
/// point was unlucky.
fn heugcd(a: &ZPoly, b: &ZPoly, vars: &[Var]) -> Option<GcdCof> {
    if vars.is_empty() {
        let x = a.constant_value().unwrap();
        let y = b.constant_value().unwrap();
        let g = x.gcd(&y);
        if g.is_zero() {
            return Some((ZPoly::zero(), ZPoly::zero(), ZPoly::zero()));
        }
        return Some((
            ZPoly::constant(g.clone()),
            ZPoly::constant(&x / &g),
            ZPoly::constant(&y / &g),
        ));
    }
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let ca = a.content().abs();
    let cb = b.content().abs();
    let cg = ca.gcd(&cb);
    let (a, b): (ZPoly, ZPoly) = if cg.is_one() {
        (a.clone(), b.clone())
    } else {
        (a.map_coeffs(|c| c / &cg), b.map_coeffs(|c| c / &cg))
    };
    let na = a.max_norm();
    let nb = b.max_norm();
    let bound = BigInt::from(2) * na.clone().min(nb.clone()) + BigInt::from(29);
    let lca = a.lc().abs();
    let lcb = b.lc().abs();
    let ratio = (&na / &lca).min(&nb / &lcb);
    let mut x = bound
        .clone()
        .min(BigInt::from(99) * bound.sqrt())
        .max(BigInt::from(2) * ratio + BigInt::from(4));
    let (main, rest) = vars.split_last().unwrap();
    for _ in 0..HEU_ATTEMPTS {
        let fa = a.eval_int(*main, &x);
        let fb = b.eval_int(*main, &x);
        if !fa.is_zero() && !fb.is_zero() {
            if let Some((h, cfa, cfb)) = heugcd(&fa, &fb, rest) {
                let h = interpolate(h, &x, *main).primitive().1;
                if let Some(qa) = a.div_exact(&h) {
                    if let Some(qb) = b.div_exact(&h) {
                        return Some((h.scale(&cg), qa, qb));
                    }
                }
                let cfa = interpolate(cfa, &x, *main);
                if let Some(h) = a.div_exact(&cfa) {
                    if let Some(qb) = b.div_exact(&h) {
                        return Some((h.scale(&cg), cfa, qb));
                    }
                }
                let cfb = interpolate(cfb, &x, *main);
                if let Some(h) = b.div_exact(&cfb) {
                    if let Some(qa) = a.div_exact(&h) {
                        return Some((h.scale(&cg), qa, cfb));
                    }
                }
            }
        }
        x = BigInt::from(73794) * &x * x.sqrt().sqrt() / BigInt::from(27011);
    }
    None
}

/// Gcd by primitive pseudo-remainder sequences, recursive in the variables.
pub fn prs_gcd(a: &ZPoly, b: &ZPoly, vars: &[Var]) -> ZPoly {
    if a.is_zero() {
        return b.primitive().1;
    }
    if b.is_zero() {
        return a.primitive().1;
    }
    let Some((&x, rest)) = vars.split_first() else {
        return ZPoly::constant(a.content().abs().gcd(&b.content().abs()));
    };
    if a.degree_in(x) <= 0 && b.degree_in(x) <= 0 {
        return prs_gcd(a, b, rest);
    }
    let ca = content_in(a, x, rest);
    let cb = content_in(b, x, rest);
    let c = prs_gcd(&ca, &cb, rest);
    let mut f = a.div_exact(&ca).unwrap();
    let mut g = b.div_exact(&cb).unwrap();
    if f.degree_in(x) < g.degree_in(x) {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        if g.degree_in(x) == 0 {
            f = ZPoly::one();
            break;
        }
        let r = prem(&f, &g, x);
        f = g;
        g = if r.is_zero() {
            r
        } else {
            let cr = content_in(&r, x, rest);
            r.div_exact(&cr).unwrap()
        };
    }
    let f = positive(f.primitive().1);
    positive(c.mul(&f))
}

/// Content with respect to `x`: the gcd of the coefficients in `x`.
fn content_in(p: &ZPoly, x: Var, rest: &[Var]) -> ZPoly {
    let cs = p.coeffs_in(x);
    let mut g = ZPoly::zero();
    for c in cs.iter().filter(|c| !c.is_zero()) {
        g = if g.is_zero() {
            c.primitive().1
        } else {
            prs_gcd(&g, c, rest)
        };
        if g.is_constant() {
            return positive(g.primitive().1);
        }
    }
    positive(g.primitive().1)
}

/// Pseudo-remainder of `f` by `g` in the variable `x`.
fn prem(f: &ZPoly, g: &ZPoly, x: Var) -> ZPoly {
    let dg = g.degree_in(x);
    let lg = g.lc_in(x);
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(x) >= dg {
        let e = r.degree_in(x) - dg;
        let lr = r.lc_in(x);
        let t = lr.shift(&Mono::var(x, e as i16));
        r = r.mul(&lg).sub(&t.mul(g));
    }
    r
}

impl Poly<BigInt> {
    /// Heuristic gcd with cofactors, exposed for benchmarks and tests.
    pub fn heuristic_gcd(&self, o: &ZPoly) -> Option<ZPoly> {
        let mut vs = self.vars();
        for v in o.vars() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs.sort();
        heugcd(self, o, &vs).map(|t| positive(t.0))
    }
}
