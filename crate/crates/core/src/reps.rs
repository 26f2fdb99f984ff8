//! Spin-j modules of quantum sl2, their evaluation modules over the affine
//! algebra, tensor products, duals and the sovereign operators.

use crate::cartan::{CartanDatum, DatumKind, GradingShift, Weight};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{Rat, Scalar};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepError {
    #[error("relation check failed: {0}")]
    RelationFailure(String),
    #[error("representations live over different data")]
    DatumMismatch,
    #[error("spin must be a nonnegative half-integer")]
    BadSpin,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Chevalley generator attached to a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    E(usize),
    F(usize),
    K(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualSide {
    Left,
    Right,
}

#[derive(Clone)]
pub struct Rep {
    pub label: String,
    datum: CartanDatum,
    gens: BTreeMap<Gen, Matrix>,
    weights: Vec<Weight>,
    /// `s(α_i)` per node; `E_i` carries `z^{s_i}` and `F_i` carries `z^{-s_i}`.
    grading: Vec<i64>,
    eval_param: Option<Scalar>,
    legs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SovereignOps {
    pub d: Matrix,
    pub dbar: Option<Matrix>,
}

/// `E e_k = [k] e_{k-1}`, `F e_k = [2j-k] e_{k+1}`, `K e_k = q^{2j-2k} e_k`.
pub fn ladder(two_j: usize) -> (Matrix, Matrix, Matrix) {
    let n = two_j + 1;
    let mut e = Matrix::zeros(n, n);
    let mut f = Matrix::zeros(n, n);
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = Scalar::v_pow(2 * (two_j as i32 - 2 * i as i32));
        if i >= 1 {
            e[(i - 1, i)] = Scalar::qint(i as i64);
        }
        if i + 1 < n {
            f[(i + 1, i)] = Scalar::qint((two_j - i) as i64);
        }
    }
    let legs = [n];
    (
        e.with_legs(&legs).unwrap(),
        f.with_legs(&legs).unwrap(),
        k.with_legs(&legs).unwrap(),
    )
}

/// Parse `1/2`, `1`, `3/2`, ... into twice the spin.
pub fn parse_spin(s: &str) -> Result<usize, RepError> {
    let s = s.trim();
    let two_j = match s.split_once('/') {
        Some((n, "2")) => n.trim().parse::<usize>().map_err(|_| RepError::BadSpin)?,
        Some(_) => return Err(RepError::BadSpin),
        None => 2 * s.parse::<usize>().map_err(|_| RepError::BadSpin)?,
    };
    Ok(two_j)
}

pub fn spin_label(two_j: usize) -> String {
    if two_j.is_multiple_of(2) {
        format!("{}", two_j / 2)
    } else {
        format!("{two_j}/2")
    }
}

fn diag_inverse(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        out[(i, i)] = m[(i, i)].recip().expect("group-like generators are invertible");
    }
    out
}

fn q_binomial(n: i64, k: i64, qi: i32) -> Scalar {
    // [n]_i! / ([k]_i! [n-k]_i!) with q_i = v^{qi}
    let qint = |m: i64| -> Scalar {
        (0..m)
            .map(|t| Scalar::v_pow(qi * (m as i32 - 1 - 2 * t as i32)))
            .sum()
    };
    let fact = |m: i64| -> Scalar { (1..=m).map(qint).product() };
    fact(n) / (fact(k) * fact(n - k))
}

impl Rep {
    /// Spin-j module of the finite quantum group.
    pub fn spin(datum: &CartanDatum, two_j: usize) -> Result<Rep, RepError> {
        if datum.kind != DatumKind::A1 {
            return Err(RepError::DatumMismatch);
        }
        let (e, f, k) = ladder(two_j);
        let mut gens = BTreeMap::new();
        gens.insert(Gen::E(0), e);
        gens.insert(Gen::F(0), f);
        gens.insert(Gen::K(0), k);
        let rep = Rep {
            label: format!("spin{}", spin_label(two_j)),
            datum: datum.clone(),
            gens,
            weights: (0..=two_j)
                .map(|i| Weight(vec![two_j as i64 - 2 * i as i64]))
                .collect(),
            grading: vec![0],
            eval_param: None,
            legs: vec![two_j + 1],
        };
        rep.check_relations()?;
        Ok(rep)
    }

    /// Evaluation module of the affine algebra at parameter `a`.
    pub fn evaluation(
        datum: &CartanDatum,
        shift: &GradingShift,
        two_j: usize,
        a: &Scalar,
    ) -> Result<Rep, RepError> {
        if datum.kind != DatumKind::A1Affine {
            return Err(RepError::DatumMismatch);
        }
        let (e, f, k) = ladder(two_j);
        let ainv = a.recip().map_err(|_| RepError::RelationFailure("a = 0".into()))?;
        let mut gens = BTreeMap::new();
        gens.insert(Gen::E(0), f.scale(a));
        gens.insert(Gen::F(0), e.scale(&ainv));
        gens.insert(Gen::K(0), diag_inverse(&k));
        gens.insert(Gen::E(1), e);
        gens.insert(Gen::F(1), f);
        gens.insert(Gen::K(1), k);
        let label = if a.is_one() {
            format!("eval{}", spin_label(two_j))
        } else {
            format!("eval{}({a})", spin_label(two_j))
        };
        let rep = Rep {
            label,
            datum: datum.clone(),
            gens,
            weights: (0..=two_j)
                .map(|i| Weight(vec![two_j as i64 - 2 * i as i64]))
                .collect(),
            grading: shift.s.clone(),
            eval_param: Some(a.clone()),
            legs: vec![two_j + 1],
        };
        rep.check_relations()?;
        Ok(rep)
    }

    /// The one-dimensional trivial module.
    pub fn trivial(datum: &CartanDatum, shift: Option<&GradingShift>) -> Rep {
        let mut gens = BTreeMap::new();
        for i in 0..datum.nodes() {
            gens.insert(Gen::E(i), Matrix::zeros(1, 1).with_legs(&[1]).unwrap());
            gens.insert(Gen::F(i), Matrix::zeros(1, 1).with_legs(&[1]).unwrap());
            gens.insert(Gen::K(i), Matrix::identity(1));
        }
        Rep {
            label: "trivial".into(),
            datum: datum.clone(),
            gens,
            weights: vec![Weight::zero(datum.rank())],
            grading: shift.map(|s| s.s.clone()).unwrap_or(vec![0; datum.nodes()]),
            eval_param: None,
            legs: vec![1],
        }
    }

    /// Build from explicit generator matrices; relations are checked.
    pub fn from_parts(
        label: &str,
        datum: &CartanDatum,
        gens: BTreeMap<Gen, Matrix>,
        weights: Vec<Weight>,
        grading: Vec<i64>,
    ) -> Result<Rep, RepError> {
        let n = weights.len();
        let rep = Rep {
            label: label.into(),
            datum: datum.clone(),
            gens,
            weights,
            grading,
            eval_param: None,
            legs: vec![n],
        };
        rep.check_relations()?;
        Ok(rep)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn eval_param(&self) -> Option<&Scalar> {
        self.eval_param.as_ref()
    }

    pub fn gen(&self, g: Gen) -> &Matrix {
        &self.gens[&g]
    }

    pub fn gens(&self) -> impl Iterator<Item = (&Gen, &Matrix)> {
        self.gens.iter()
    }

    pub fn k_inv(&self, i: usize) -> Matrix {
        diag_inverse(self.gen(Gen::K(i)))
    }

    pub fn grading_exp(&self, g: Gen) -> i64 {
        match g {
            Gen::E(i) => self.grading[i],
            Gen::F(i) => -self.grading[i],
            Gen::K(_) => 0,
        }
    }

    pub fn gen_name(&self, g: Gen) -> String {
        let affine = self.datum.affine;
        let (c, i) = match g {
            Gen::E(i) => ("E", i),
            Gen::F(i) => ("F", i),
            Gen::K(i) => ("K", i),
        };
        if affine {
            format!("{c}{i}")
        } else {
            c.to_string()
        }
    }

    /// Pull back along the grading shift at `z`.
    pub fn shifted(&self, z: &Scalar) -> Rep {
        let mut out = self.clone();
        for (g, m) in out.gens.iter_mut() {
            let e = self.grading_exp(*g);
            if e != 0 {
                *m = m.scale(&z.pow(e as i32));
            }
        }
        out
    }

    fn q_i(&self, i: usize) -> i32 {
        // q_i = q^{d_i} = v^{2 d_i}
        2 * self.datum.d[i] as i32
    }

    /// Defining relations of the quantum group as exact matrix identities.
    pub fn check_relations(&self) -> Result<(), RepError> {
        let n = self.datum.nodes();
        let fail = |m: String| Err(RepError::RelationFailure(format!("{}: {m}", self.label)));
        for i in 0..n {
            let k = self.gen(Gen::K(i));
            if !k.is_diagonal() {
                return fail(format!("K{i} not diagonal"));
            }
            for (b, w) in self.weights.iter().enumerate() {
                let e = self.datum.v_exponent(w, &self.datum.root(i));
                if k[(b, b)] != Scalar::v_pow(e) {
                    return fail(format!("K{i} disagrees with weight of basis vector {b}"));
                }
            }
        }
        for i in 0..n {
            let k = self.gen(Gen::K(i));
            let ki = self.k_inv(i);
            for j in 0..n {
                let qa = Scalar::v_pow(2 * (self.datum.d[i] * self.datum.gcm[i][j]) as i32);
                let e = self.gen(Gen::E(j));
                let f = self.gen(Gen::F(j));
                if &(k * e) * &ki != e.scale(&qa) {
                    return fail(format!("K{i} E{j} K{i}^-1"));
                }
                if &(k * f) * &ki != f.scale(&qa.recip().unwrap()) {
                    return fail(format!("K{i} F{j} K{i}^-1"));
                }
                let c = self.gen(Gen::E(i)).commutator(self.gen(Gen::F(j)));
                let target = if i == j {
                    let qi = Scalar::v_pow(self.q_i(i));
                    let den = &qi - &qi.recip().unwrap();
                    (k - &ki).scale(&den.recip().unwrap())
                } else {
                    Matrix::zeros(self.dim(), self.dim())
                };
                if c != target {
                    return fail(format!("[E{i}, F{j}]"));
                }
                if i != j {
                    self.check_serre(i, j)?;
                }
            }
        }
        Ok(())
    }

    fn check_serre(&self, i: usize, j: usize) -> Result<(), RepError> {
        let m = 1 - self.datum.gcm[i][j];
        for x in [Gen::E as fn(usize) -> Gen, Gen::F as fn(usize) -> Gen] {
            let xi = self.gen(x(i));
            let xj = self.gen(x(j));
            let mut acc = Matrix::zeros(self.dim(), self.dim());
            for k in 0..=m {
                let mut t = Matrix::identity(self.dim());
                for _ in 0..(m - k) {
                    t = &t * xi;
                }
                t = &t * xj;
                for _ in 0..k {
                    t = &t * xi;
                }
                let c = q_binomial(m, k, self.q_i(i));
                let c = if k % 2 == 1 { -c } else { c };
                acc = &acc + &t.scale(&c);
            }
            if !acc.is_zero() {
                return Err(RepError::RelationFailure(format!(
                    "{}: Serre relation ({i}, {j})",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Checks `Ad(D) = S²` on every generator.
    pub fn check_sovereign(&self, d: &Matrix) -> bool {
        let dinv = diag_inverse(d);
        // Affine nodes need the grading as well, so only finite nodes apply.
        self.datum.finite_nodes().iter().all(|&i| {
            let k = self.gen(Gen::K(i));
            let ki = self.k_inv(i);
            [Gen::E(i), Gen::F(i), Gen::K(i)].iter().all(|g| {
                let x = self.gen(*g);
                // S²(x) = K_i⁻¹ x K_i for x = E_i, F_i; S²(K) = K.
                &(d * x) * &dinv == &(&ki * x) * k
            })
        })
    }
}

impl fmt::Debug for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rep({}, dim {})", self.label, self.dim())
    }
}

/// Tensor product via `Δ(E) = E⊗1 + K⊗E`, `Δ(F) = F⊗K⁻¹ + 1⊗F`,
/// `Δ(K) = K⊗K`; the second factor is shifted by `ratio` when given.
pub fn tensor_rep(v: &Rep, w: &Rep, ratio: Option<&Scalar>) -> Result<Rep, RepError> {
    if v.datum != w.datum || v.grading != w.grading {
        return Err(RepError::DatumMismatch);
    }
    let w = match ratio {
        Some(r) => w.shifted(r),
        None => w.clone(),
    };
    let (iv, iw) = (Matrix::identity(v.dim()), Matrix::identity(w.dim()));
    let mut legs = v.legs.clone();
    legs.extend(&w.legs);
    let mut gens = BTreeMap::new();
    for i in 0..v.datum.nodes() {
        let kv = v.gen(Gen::K(i));
        let kw = w.gen(Gen::K(i));
        let e = &v.gen(Gen::E(i)).kron(&iw) + &kv.kron(w.gen(Gen::E(i)));
        let f = &v.gen(Gen::F(i)).kron(&w.k_inv(i)) + &iv.kron(w.gen(Gen::F(i)));
        gens.insert(Gen::E(i), e.with_legs(&legs)?);
        gens.insert(Gen::F(i), f.with_legs(&legs)?);
        gens.insert(Gen::K(i), kv.kron(kw).with_legs(&legs)?);
    }
    let weights = v
        .weights
        .iter()
        .flat_map(|a| w.weights.iter().map(move |b| a.add(b)))
        .collect();
    Ok(Rep {
        label: format!("{}⊗{}", v.label, w.label),
        datum: v.datum.clone(),
        gens,
        weights,
        grading: v.grading.clone(),
        eval_param: None,
        legs,
    })
}

/// Dual module: left uses `(S⁻¹(a))ᵀ`, right uses `S(a)ᵀ`.
pub fn dual_rep(v: &Rep, side: DualSide) -> Rep {
    let mut gens = BTreeMap::new();
    let n = v.dim();
    for i in 0..v.datum.nodes() {
        let k = v.gen(Gen::K(i));
        let ki = v.k_inv(i);
        let e = v.gen(Gen::E(i));
        let f = v.gen(Gen::F(i));
        let (se, sf) = match side {
            DualSide::Left => (-&(e * &ki), -&(k * f)),
            DualSide::Right => (-&(&ki * e), -&(f * k)),
        };
        gens.insert(Gen::E(i), se.transpose());
        gens.insert(Gen::F(i), sf.transpose());
        gens.insert(Gen::K(i), ki.transpose());
    }
    let prefix = match side {
        DualSide::Left => "*",
        DualSide::Right => "",
    };
    let suffix = match side {
        DualSide::Left => "",
        DualSide::Right => "*",
    };
    Rep {
        label: format!("{prefix}{}{suffix}", v.label),
        datum: v.datum.clone(),
        gens,
        weights: v.weights.iter().map(Weight::neg).collect(),
        grading: v.grading.clone(),
        eval_param: v.eval_param.clone(),
        legs: vec![n],
    }
}

/// `D` acts by `q^{-2(ρ,μ)}` on weight `μ`; `D̄` uses the grading shift.
pub fn sovereign_ops(v: &Rep, shift: Option<&GradingShift>) -> SovereignOps {
    let datum = &v.datum;
    let rho = datum.rho();
    let d = Matrix::diag(
        v.weights
            .iter()
            .map(|w| Scalar::v_pow(-2 * datum.v_exponent(&rho, w)))
            .collect(),
    )
    .with_legs(&v.legs)
    .unwrap();
    let dbar = shift.map(|s| {
        Matrix::diag(
            v.weights
                .iter()
                .map(|w| {
                    let e = &datum.dbar_exponent(s, w) * &Rat::from_int(2);
                    Scalar::v_pow(e.to_i64().expect("integral v-exponent") as i32)
                })
                .collect(),
        )
        .with_legs(&v.legs)
        .unwrap()
    });
    SovereignOps { d, dbar }
}
