//! Cartan data for the shipped types and the constants derived from a
//! grading shift.

use crate::scalar::{Rat, Scalar};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CartanError {
    #[error("invalid Cartan datum: {0}")]
    InvalidDatum(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatumKind {
    A1,
    A1Affine,
}

impl FromStr for DatumKind {
    type Err = CartanError;
    fn from_str(s: &str) -> Result<Self, CartanError> {
        match s {
            "a1" | "A1" => Ok(DatumKind::A1),
            "a1-affine" | "A1affine" | "a1affine" => Ok(DatumKind::A1Affine),
            _ => Err(CartanError::InvalidDatum(format!("unknown datum kind {s:?}"))),
        }
    }
}

impl fmt::Display for DatumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatumKind::A1 => "a1",
            DatumKind::A1Affine => "a1-affine",
        })
    }
}

/// A weight of the finite part, in coordinates of the fundamental weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Weight {
        Weight(vec![0; rank])
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| k * a).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanDatum {
    pub kind: DatumKind,
    pub gcm: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    pub tau: Vec<usize>,
    pub affine: bool,
    /// Coefficients of the null root in the simple roots; empty when finite.
    pub marks: Vec<i64>,
    /// Coefficients of the canonical central element in the simple coroots.
    pub comarks: Vec<i64>,
    finite: Vec<usize>,
    form: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradingShift {
    pub s: Vec<i64>,
    pub s_hom: Vec<i64>,
    pub f: Rat,
    pub hvee: Rat,
    pub hvee_phi: Rat,
    pub p: Scalar,
}

fn rat(n: i64) -> Rat {
    Rat::from_int(n)
}

/// Inverse of a small rational matrix by Gauss-Jordan.
fn rat_inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Parse a permutation of `0..n` in cycle notation, e.g. `(0 1)`; `id` and
/// the empty string give the identity.
pub fn parse_tau(s: &str, n: usize) -> Result<Vec<usize>, CartanError> {
    let bad = || CartanError::InvalidDatum(format!("bad permutation {s:?}"));
    let mut perm: Vec<usize> = (0..n).collect();
    let t = s.trim();
    if t.is_empty() || t == "id" || t == "()" {
        return Ok(perm);
    }
    let mut seen = vec![false; n];
    for chunk in t.split(')') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let body = chunk.strip_prefix('(').ok_or_else(bad)?;
        let cyc: Vec<usize> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        for (k, &i) in cyc.iter().enumerate() {
            if i >= n || seen[i] {
                return Err(bad());
            }
            seen[i] = true;
            perm[i] = cyc[(k + 1) % cyc.len()];
        }
    }
    Ok(perm)
}

impl CartanDatum {
    /// Build from a table. `finite` lists the nodes whose fundamental weights
    /// span the weight lattice used by representations.
    pub fn from_table(
        kind: DatumKind,
        gcm: Vec<Vec<i64>>,
        d: Vec<i64>,
        tau: Vec<usize>,
        marks: Vec<i64>,
        comarks: Vec<i64>,
        finite: Vec<usize>,
    ) -> Result<CartanDatum, CartanError> {
        let n = gcm.len();
        let bad = |m: &str| Err(CartanError::InvalidDatum(m.to_string()));
        if gcm.iter().any(|r| r.len() != n) || d.len() != n || tau.len() != n {
            return bad("dimension mismatch");
        }
        for i in 0..n {
            if gcm[i][i] != 2 {
                return bad("diagonal entries must be 2");
            }
            for j in 0..n {
                if d[i] * gcm[i][j] != d[j] * gcm[j][i] {
                    return bad("not symmetrizable by the given d");
                }
            }
        }
        let mut seen = vec![false; n];
        for &t in &tau {
            if t >= n || seen[t] {
                return bad("tau is not a permutation");
            }
            seen[t] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if gcm[tau[i]][tau[j]] != gcm[i][j] {
                    return bad("tau does not preserve the Cartan matrix");
                }
            }
        }
        let affine = !marks.is_empty();
        if affine {
            if marks.len() != n || comarks.len() != n {
                return bad("marks must cover every node");
            }
            for i in 0..n {
                let s: i64 = (0..n).map(|j| gcm[i][j] * marks[j]).sum();
                if s != 0 {
                    return bad("marks do not define a null root");
                }
            }
        }
        // (ω_a, ω_b) = d_a (A_fin⁻¹)_{ab} on the finite sub-diagram.
        let afin: Vec<Vec<Rat>> = finite
            .iter()
            .map(|&i| finite.iter().map(|&j| rat(gcm[i][j])).collect())
            .collect();
        let inv = rat_inverse(&afin).ok_or_else(|| {
            CartanError::InvalidDatum("finite part is singular".into())
        })?;
        let form = (0..finite.len())
            .map(|a| {
                (0..finite.len())
                    .map(|b| &rat(d[finite[a]]) * &inv[a][b])
                    .collect()
            })
            .collect();
        Ok(CartanDatum {
            kind,
            gcm,
            d,
            tau,
            affine,
            marks,
            comarks,
            finite,
            form,
        })
    }

    pub fn nodes(&self) -> usize {
        self.gcm.len()
    }

    pub fn finite_nodes(&self) -> &[usize] {
        &self.finite
    }

    pub fn rank(&self) -> usize {
        self.finite.len()
    }

    /// Simple root `i` restricted to the finite weight lattice.
    pub fn root(&self, i: usize) -> Weight {
        Weight(self.finite.iter().map(|&j| self.gcm[j][i]).collect())
    }

    pub fn fundamental(&self, a: usize) -> Weight {
        let mut w = Weight::zero(self.rank());
        w.0[a] = 1;
        w
    }

    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank()])
    }

    pub fn pairing(&self, l: &Weight, m: &Weight) -> Rat {
        let mut acc = Rat::zero();
        for (a, x) in l.0.iter().enumerate() {
            for (b, y) in m.0.iter().enumerate() {
                if *x != 0 && *y != 0 {
                    acc = &acc + &(&rat(x * y) * &self.form[a][b]);
                }
            }
        }
        acc
    }

    /// `2(λ, μ)` as an integer, the exponent of `v` in `q^{(λ,μ)}`.
    pub fn v_exponent(&self, l: &Weight, m: &Weight) -> i32 {
        let r = &self.pairing(l, m) * &rat(2);
        r.to_i64().expect("pairing outside half-integers") as i32
    }

    /// Value of the linear form given on simple roots, extended to finite
    /// weights by vanishing off the image of the root lattice.
    fn extend_form(&self, on_roots: &[Rat]) -> Vec<Rat> {
        // λ(h_j) coordinates: L(ω_a) solves Σ_a a_{a i} L(ω_a) = L(α_i).
        let afin_t: Vec<Vec<Rat>> = self
            .finite
            .iter()
            .map(|&i| self.finite.iter().map(|&a| rat(self.gcm[a][i])).collect())
            .collect();
        let inv = rat_inverse(&afin_t).expect("finite part invertible");
        (0..self.rank())
            .map(|a| {
                let mut acc = Rat::zero();
                for (k, &i) in self.finite.iter().enumerate() {
                    acc = &acc + &(&inv[a][k] * &on_roots[i]);
                }
                acc
            })
            .collect()
    }

    /// Exponent of `q` on weight `λ` for the affine sovereign operator.
    pub fn dbar_exponent(&self, shift: &GradingShift, l: &Weight) -> Rat {
        let on_roots: Vec<Rat> = (0..self.nodes())
            .map(|i| &(&shift.hvee * &rat(shift.s_hom[i])) - &(&shift.hvee_phi * &rat(shift.s[i])))
            .collect();
        let ext = self.extend_form(&on_roots);
        let lin = l
            .0
            .iter()
            .zip(&ext)
            .fold(Rat::zero(), |acc, (x, e)| &acc + &(&rat(*x) * e));
        let rho = self.pairing(&self.rho(), l);
        &(&rat(-2) * &rho) - &(&rat(2) * &lin)
    }
}

/// Build one of the shipped data with the given diagram automorphism.
pub fn build_datum(
    kind: DatumKind,
    tau: &[usize],
) -> Result<(CartanDatum, Option<GradingShift>), CartanError> {
    match kind {
        DatumKind::A1 => {
            let datum = CartanDatum::from_table(
                kind,
                vec![vec![2]],
                vec![1],
                tau.to_vec(),
                vec![],
                vec![],
                vec![0],
            )?;
            Ok((datum, None))
        }
        DatumKind::A1Affine => {
            let datum = CartanDatum::from_table(
                kind,
                vec![vec![2, -2], vec![-2, 2]],
                vec![1, 1],
                tau.to_vec(),
                vec![1, 1],
                vec![1, 1],
                vec![1],
            )?;
            let shift = grading_shift(&datum);
            Ok((datum, Some(shift)))
        }
    }
}

/// The τ-minimal grading shift and its constants. Node 0 is the affine node.
pub fn grading_shift(datum: &CartanDatum) -> GradingShift {
    let n = datum.nodes();
    let t0 = datum.tau[0];
    let s: Vec<i64> = (0..n).map(|i| (i == 0 || i == t0) as i64).collect();
    let s_hom: Vec<i64> = (0..n).map(|i| (i == 0) as i64).collect();
    let on_delta = |x: &[i64]| -> i64 { x.iter().zip(&datum.marks).map(|(a, b)| a * b).sum() };
    let f = Rat::new(on_delta(&s), on_delta(&s_hom));
    let hvee = rat(datum.comarks.iter().sum());
    let hvee_phi = &hvee / &f;
    let two_h = (&hvee_phi * &rat(2))
        .to_i64()
        .expect("h^vee_phi must be a half-integer");
    GradingShift {
        s,
        s_hom,
        f,
        hvee,
        hvee_phi,
        p: Scalar::v_pow(-two_h as i32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine(tau: &str) -> (CartanDatum, GradingShift) {
        let t = parse_tau(tau, 2).unwrap();
        let (d, s) = build_datum(DatumKind::A1Affine, &t).unwrap();
        (d, s.unwrap())
    }

    #[test]
    fn quasi_split_constants() {
        let (_, s) = affine("(0 1)");
        assert_eq!(s.f, rat(2));
        assert_eq!(s.hvee, rat(2));
        assert_eq!(s.hvee_phi, rat(1));
        assert_eq!(s.p, "q^-1".parse().unwrap());
        assert_eq!(s.s, vec![1, 1]);
    }

    #[test]
    fn split_constants() {
        let (_, s) = affine("id");
        assert_eq!(s.f, rat(1));
        assert_eq!(s.hvee, rat(2));
        assert_eq!(s.hvee_phi, rat(2));
        assert_eq!(s.p, Scalar::v_pow(-4));
    }

    #[test]
    fn a1_pairings() {
        let (d, shift) = build_datum(DatumKind::A1, &[0]).unwrap();
        assert!(shift.is_none());
        let alpha = d.root(0);
        let omega = d.fundamental(0);
        assert_eq!(d.pairing(&alpha, &alpha), rat(2));
        assert_eq!(d.pairing(&omega, &omega), Rat::new(1, 2));
        assert_eq!(d.pairing(&d.rho(), &omega), Rat::new(1, 2));
    }

    #[test]
    fn affine_roots_restrict() {
        let (d, _) = affine("(0 1)");
        assert_eq!(d.root(1), Weight(vec![2]));
        assert_eq!(d.root(0), Weight(vec![-2]));
    }

    #[test]
    fn rejects_bad_tables() {
        let r = CartanDatum::from_table(
            DatumKind::A1Affine,
            vec![vec![2, -1], vec![-2, 2]],
            vec![1, 1],
            vec![0, 1],
            vec![1, 1],
            vec![1, 1],
            vec![1],
        );
        assert!(r.is_err());
        assert!(build_datum(DatumKind::A1, &[1]).is_err());
        assert!(parse_tau("(0 2)", 2).is_err());
        assert_eq!(parse_tau("(0 1)", 2).unwrap(), vec![1, 0]);
    }

    #[test]
    fn dbar_trivial_for_quasi_split() {
        let (d, s) = affine("(0 1)");
        for m in [-3, -1, 0, 1, 2] {
            let w = Weight(vec![m]);
            let e = d.dbar_exponent(&s, &w);
            assert_eq!(e, rat(0), "weight {m}");
        }
    }
}
