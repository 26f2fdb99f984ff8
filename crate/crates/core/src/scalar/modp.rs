//! Word-prime arithmetic and dense univariate polynomials over Z/p.

pub const PRIMES: [u64; 8] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
];

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero mod p");
    pow(a, p - 2, p)
}

/// Dense coefficients, lowest degree first, no trailing zeros.
pub type UPoly = Vec<u64>;

pub fn trim(a: &mut UPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo `b` (b nonzero).
fn rem(mut a: UPoly, b: &UPoly, p: u64) -> UPoly {
    let db = b.len() - 1;
    let lc_inv = inv(*b.last().unwrap(), p);
    while a.len() > db {
        let da = a.len() - 1;
        let c = mul(*a.last().unwrap(), lc_inv, p);
        let shift = da - db;
        for (i, &bi) in b.iter().enumerate() {
            a[shift + i] = sub(a[shift + i], mul(c, bi, p), p);
        }
        trim(&mut a);
    }
    a
}

/// Degree of the monic gcd; `None` encodes gcd(0, 0).
pub fn gcd_degree(a: &UPoly, b: &UPoly, p: u64) -> Option<usize> {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    if x.is_empty() && y.is_empty() {
        return None;
    }
    while !y.is_empty() {
        let r = rem(x, &y, p);
        x = y;
        y = r;
    }
    Some(x.len() - 1)
}
