//! Boundary transfer matrices: the two-row operator and its partial trace,
//! commutativity and multiplicativity checks, the spin-chain Hamiltonian,
//! and finite-type transfer values with the balance data they need.

use crate::cartan::GradingShift;
use crate::kmatrix::{dual_k, leg_swap, quasi_k_finite, solve_spectral_k, twist_first_leg};
use crate::linalg::{LinalgError, Matrix};
use crate::qsp::{psi_rep, twist_identification, SatakeDatum};
use crate::reps::{sovereign_ops, tensor_rep, Gen, Rep};
use crate::rmatrix::{r_finite, spectral_r, SolverError, SpectralOperator};
use crate::scalar::{Scalar, ScalarError, Var};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransferError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("balance axiom fails: {0}")]
    AxiomFailure(String),
    #[error("t(1) is not a scalar multiple of the identity")]
    NotScalar,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<crate::qsp::QspError> for TransferError {
    fn from(e: crate::qsp::QspError) -> Self {
        TransferError::Solver(SolverError::SolverInconsistent(e.to_string()))
    }
}

/// Boundary data: the Satake datum behind `K`, a second one behind `K̃`,
/// the grading shift, and parameter bindings applied to every building
/// block before multiplication.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub sat: SatakeDatum,
    pub dual_sat: SatakeDatum,
    pub shift: GradingShift,
    pub bindings: Vec<(Var, Scalar)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    pub mat: Matrix,
    pub aux: String,
    pub boundary: String,
}

impl TransferMatrix {
    pub fn at(&self, x: &Scalar) -> Result<Matrix, ScalarError> {
        self.mat.substitute(&[(Var::Z, x.clone())])
    }
}

impl Boundary {
    /// `K` from `ξ` and `K̃` from `η`.
    pub fn quasi_split(shift: &GradingShift, datum: &crate::cartan::CartanDatum) -> Result<Boundary, TransferError> {
        Ok(Boundary {
            sat: SatakeDatum::quasi_split_affine(datum, &Scalar::var(Var::XI))?,
            dual_sat: SatakeDatum::quasi_split_affine(datum, &Scalar::var(Var::ETA))?,
            shift: shift.clone(),
            bindings: vec![],
        })
    }

    pub fn specialized(&self, bindings: Vec<(Var, Scalar)>) -> Boundary {
        Boundary {
            bindings,
            ..self.clone()
        }
    }

    fn bind(&self, m: Matrix) -> Result<Matrix, ScalarError> {
        if self.bindings.is_empty() {
            Ok(m)
        } else {
            let legs = m.legs().map(|l| l.to_vec());
            let out = m.substitute(&self.bindings)?;
            Ok(match legs {
                Some(l) => out.with_legs(&l).unwrap(),
                None => out,
            })
        }
    }

    fn bind_scalar(&self, x: &Scalar) -> Result<Scalar, ScalarError> {
        if self.bindings.is_empty() {
            Ok(x.clone())
        } else {
            x.substitute(&self.bindings)
        }
    }

    fn bind_op(&self, op: SpectralOperator) -> Result<SpectralOperator, ScalarError> {
        Ok(SpectralOperator {
            mat: self.bind(op.mat)?,
            ..op
        })
    }

    pub fn k(&self, w: &Rep) -> Result<SpectralOperator, TransferError> {
        Ok(self.bind_op(solve_spectral_k(w, &self.sat)?)?)
    }

    /// `K̃_W(z) = D̄_W·K'_W(pz)⁻¹` with `K'` solved from the dual datum.
    pub fn k_dual(&self, w: &Rep) -> Result<SpectralOperator, TransferError> {
        let k = solve_spectral_k(w, &self.dual_sat)?;
        Ok(self.bind_op(dual_k(&k, &self.dbar(w), &self.shift.p)?)?)
    }

    fn dbar(&self, w: &Rep) -> Matrix {
        sovereign_ops(w, Some(&self.shift)).dbar.unwrap()
    }

    fn r(&self, v: &Rep, w: &Rep) -> Result<SpectralOperator, TransferError> {
        Ok(self.bind_op(spectral_r(v, w)?)?)
    }

    fn g(&self, w: &Rep) -> Result<Matrix, TransferError> {
        Ok(twist_identification(&self.sat, w)?.g)
    }
}

/// `Tr_aux[K̃·Π_{i=N-1..0} R^ψ_{aux,i}·K·Π_{i=0..N-1} R_{i,aux}]` where
/// `aux` may span several legs placed after the quantum legs.
fn two_row(
    quantum: &[usize],
    aux: &[usize],
    kt: &Matrix,
    k: &Matrix,
    r_aux_q: &[Matrix],
    r_q_aux: &[Matrix],
) -> Result<Matrix, LinalgError> {
    let n = quantum.len();
    let mut legs = quantum.to_vec();
    legs.extend(aux);
    let apos: Vec<usize> = (n..n + aux.len()).collect();
    let mut m = Matrix::embed(kt, &apos, &legs)?;
    for i in (0..n).rev() {
        let mut pos = apos.clone();
        pos.push(i);
        m = m.try_mul(&Matrix::embed(&r_aux_q[i], &pos, &legs)?)?;
    }
    m = m.try_mul(&Matrix::embed(k, &apos, &legs)?)?;
    for i in 0..n {
        let mut pos = vec![i];
        pos.extend(&apos);
        m = m.try_mul(&Matrix::embed(&r_q_aux[i], &pos, &legs)?)?;
    }
    let mut m = m.with_legs(&legs)?;
    for leg in apos.iter().rev() {
        m = m.partial_trace(*leg)?;
    }
    if n == 0 {
        return m.with_legs(&[1]);
    }
    m.with_legs(quantum)
}

fn z() -> Scalar {
    Scalar::var(Var::Z)
}

/// Evaluated transfer matrix `t^{(W)}(z)` on `V₁ ⊗ … ⊗ V_N`.
pub fn build_transfer(vs: &[Rep], w: &Rep, b: &Boundary) -> Result<TransferMatrix, TransferError> {
    transfer_with_boundary(vs, w, &b.k(w)?, &b.k_dual(w)?, b)
}

/// As [`build_transfer`] with explicit `K_W` and `K̃_W`.
pub fn transfer_with_boundary(
    vs: &[Rep],
    w: &Rep,
    k: &SpectralOperator,
    kt: &SpectralOperator,
    b: &Boundary,
) -> Result<TransferMatrix, TransferError> {
    let z = z();
    let k = k.at(&z)?;
    let kt = kt.at(&z)?;
    let g = b.g(w)?;
    let blocks: Vec<(Matrix, Matrix)> = vs
        .par_iter()
        .map(|v| -> Result<(Matrix, Matrix), TransferError> {
            let rwv = twist_first_leg(&b.r(w, v)?.at(&z)?, &g)?;
            let rvw = b.r(v, w)?.at(&z)?;
            Ok((rwv, rvw))
        })
        .collect::<Result<_, _>>()?;
    let (r_aux_q, r_q_aux): (Vec<_>, Vec<_>) = blocks.into_iter().unzip();
    let quantum: Vec<usize> = vs.iter().map(Rep::dim).collect();
    let mat = two_row(&quantum, &[w.dim()], &kt, &k, &r_aux_q, &r_q_aux)?;
    Ok(TransferMatrix {
        mat,
        aux: w.label.clone(),
        boundary: format!("K from {}, dual from {}", b.sat.gamma[1], b.dual_sat.gamma[1]),
    })
}

/// `t₁·t₂ − t₂·t₁`.
pub fn commutator_check(t1: &Matrix, t2: &Matrix) -> Result<Matrix, LinalgError> {
    if t1.rows() != t2.rows() || t1.cols() != t2.cols() {
        return Err(LinalgError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            t1.rows(),
            t1.cols(),
            t2.rows(),
            t2.cols()
        )));
    }
    Ok(t1.commutator(t2))
}

/// `[t(y), t(z)]` for one transfer matrix.
pub fn self_commutator(t: &TransferMatrix) -> Result<Matrix, TransferError> {
    let ty = t.at(&Scalar::var(Var::Y))?;
    Ok(commutator_check(&ty, &t.mat)?)
}

/// Proportionality `a ≈ scale·b` read off at the first nonzero entry of `b`,
/// with the residual `a − scale·b`.
pub fn projective_residual(a: &Matrix, b: &Matrix) -> (Matrix, Scalar) {
    let anchor = b.entries().iter().position(|e| !e.is_zero());
    match anchor {
        None => (a.clone(), Scalar::zero()),
        Some(k) => {
            let ij = (k / b.cols(), k % b.cols());
            let scale = &a[ij] / &b[ij];
            (a - &b.scale(&scale), scale)
        }
    }
}

/// Factors of an auxiliary `V_{b₁} ⊗ W_{b₂}`.
pub struct AuxFactor<'a> {
    pub rep: &'a Rep,
    pub param: Scalar,
}

/// `t^{(V⊗W)}(z)` with the tensor boundary
/// `K_A(z) = (1⊗K_W(b₂z))·R^ψ_{V,W}(b₁b₂z²)·(K_V(b₁z)⊗1)` and
/// `K̃_A(z) = (D̄_V⊗D̄_W)·K'_A(pz)⁻¹`.
pub fn build_tensor_transfer(
    vs: &[Rep],
    f1: &AuxFactor,
    f2: &AuxFactor,
    b: &Boundary,
) -> Result<TransferMatrix, TransferError> {
    let z = z();
    let (v, w) = (f1.rep, f2.rep);
    let (dv, dw) = (v.dim(), w.dim());
    let rvw = b.r(v, w)?;
    let gv = b.g(v)?;
    let gw = b.g(w)?;
    let ka = |kv: &SpectralOperator, kw: &SpectralOperator, x: &Scalar| -> Result<Matrix, TransferError> {
        let inner = &(&f1.param * &f2.param) * &(x * x);
        let r = twist_first_leg(&rvw.at(&inner)?, &gv)?;
        let left = Matrix::identity(dv).kron(&kw.at(&(&f2.param * x))?);
        let right = kv.at(&(&f1.param * x))?.kron(&Matrix::identity(dw));
        Ok(&(&left * &r) * &right)
    };
    let k = ka(&b.k(v)?, &b.k(w)?, &z)?;
    let kd = ka(
        &b.bind_op(solve_spectral_k(v, &b.dual_sat)?)?,
        &b.bind_op(solve_spectral_k(w, &b.dual_sat)?)?,
        &b.bind_scalar(&(&b.shift.p * &z))?,
    )?;
    let dbar = b.bind(b.dbar(v).kron(&b.dbar(w)))?;
    let kt = &dbar * &kd.inverse()?;
    let legs = [dv, dw];
    let mut r_aux_q = Vec::new();
    let mut r_q_aux = Vec::new();
    for x in vs {
        let dx = x.dim();
        let three = [dv, dw, dx];
        let rwx = twist_first_leg(&b.r(w, x)?.at(&(&f2.param * &z))?, &gw)?;
        let rvx = twist_first_leg(&b.r(v, x)?.at(&(&f1.param * &z))?, &gv)?;
        r_aux_q.push(
            Matrix::embed(&rwx, &[1, 2], &three)?.try_mul(&Matrix::embed(&rvx, &[0, 2], &three)?)?,
        );
        let three = [dx, dv, dw];
        let rxw = b.r(x, w)?.at(&(&f2.param * &z))?;
        let rxv = b.r(x, v)?.at(&(&f1.param * &z))?;
        r_q_aux.push(
            Matrix::embed(&rxw, &[0, 2], &three)?.try_mul(&Matrix::embed(&rxv, &[0, 1], &three)?)?,
        );
    }
    let quantum: Vec<usize> = vs.iter().map(Rep::dim).collect();
    let mat = two_row(&quantum, &legs, &kt, &k, &r_aux_q, &r_q_aux)?;
    Ok(TransferMatrix {
        mat,
        aux: format!("{}({})⊗{}({})", v.label, f1.param, w.label, f2.param),
        boundary: "tensor boundary".into(),
    })
}

/// Outcome of a multiplicativity check.
#[derive(Debug, Clone)]
pub struct Multiplicativity {
    pub residual: Matrix,
    pub scale: Scalar,
}

/// Compares `t^{(V⊗W_a)}(z)` with `t^{(V)}(z)·t^{(W)}(az)`.
pub fn multiplicativity_check(
    v: &Rep,
    w: &Rep,
    a: &Scalar,
    quantum: &[Rep],
    b: &Boundary,
) -> Result<Multiplicativity, TransferError> {
    let one = Scalar::one();
    let ta = build_tensor_transfer(
        quantum,
        &AuxFactor { rep: v, param: one },
        &AuxFactor { rep: w, param: a.clone() },
        b,
    )?;
    let tv = build_transfer(quantum, v, b)?;
    let tw = build_transfer(quantum, w, b)?;
    let prod = &tv.mat * &tw.at(&(a * &z()))?;
    let (residual, scale) = projective_residual(&ta.mat, &prod);
    Ok(Multiplicativity { residual, scale })
}

/// The scale expected between `t^{(V⊗W_a)}` and `t^{(V)}t^{(W)}(a·)` for
/// spin½ factors on a spin½ chain under the solver normalizations.
pub fn expected_spin_half_scale(a: &Scalar) -> Scalar {
    let x = &(a * a) * &z().pow(4);
    let q = Scalar::q();
    let one = Scalar::one();
    let num = &(&x - &one) * &(&(&x * &q.pow(-4)) - &one);
    let den = (&(&x * &q.pow(-2)) - &one).pow(2);
    &num / &den
}

/// `H = t(1)⁻¹·t'(1)` with its trace part removed, for a homogeneous chain
/// with auxiliary space equal to the chain site.
pub fn hamiltonian(vs: &[Rep], b: &Boundary) -> Result<(Matrix, TransferMatrix), TransferError> {
    let t = build_transfer(vs, &vs[0], b)?;
    let one = Scalar::one();
    let t1 = t.at(&one)?;
    let c = t1.scalar_value().ok_or(TransferError::NotScalar)?;
    let dt = t.mat.map(|e| e.derivative(Var::Z)).substitute(&[(Var::Z, one)])?;
    let h = dt.scale(&c.recip()?);
    let d = h.rows();
    let shift = &h.trace() / &Scalar::from_int(d as i64);
    let h = &h - &Matrix::identity(d).scale(&shift);
    Ok((h, t))
}

/// Whether `H` is a sum of nearest-neighbour two-site terms plus diagonal
/// single-site terms: every off-diagonal entry connects basis states that
/// differ on exactly two adjacent sites.
pub fn nearest_neighbour_structure(h: &Matrix, site_dims: &[usize]) -> bool {
    let digits = |mut k: usize| -> Vec<usize> {
        let mut out = vec![0; site_dims.len()];
        for (i, d) in site_dims.iter().enumerate().rev() {
            out[i] = k % d;
            k /= d;
        }
        out
    };
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            if i == j || h[(i, j)].is_zero() {
                continue;
            }
            let (a, b) = (digits(i), digits(j));
            let diff: Vec<usize> = (0..a.len()).filter(|&k| a[k] != b[k]).collect();
            let adjacent = match diff.as_slice() {
                [x, y] => y - x == 1,
                _ => false,
            };
            if !adjacent {
                return false;
            }
        }
    }
    true
}

/// Compares `H` with its transpose under `v → 1/v` and the inversion of
/// the listed parameters, projectively.
pub fn hermiticity_check(h: &Matrix, params: &[Var]) -> Result<(Matrix, Scalar), ScalarError> {
    let mut b = vec![(Var::V, Scalar::var(Var::V).recip()?)];
    for p in params {
        b.push((*p, Scalar::var(*p).recip()?));
    }
    let hs = h.transpose().substitute(&b)?;
    Ok(projective_residual(&hs, h))
}

/// The two finite-type transfer constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteVariant {
    DualK,
    Kolb,
}

/// Which ribbon scalar to use for the balance element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BalanceConvention {
    /// `c_λ = q^{-(λ,λ+2ρ)}`.
    #[default]
    Ribbon,
    /// `c_λ = q^{(λ,λ+2ρ)}`; fails the guard, kept as a detector.
    InverseRibbon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceData {
    pub c: Scalar,
    pub u: Matrix,
    pub b: Matrix,
}

fn ribbon(v: &Rep, lambda: &crate::cartan::Weight, conv: BalanceConvention) -> Scalar {
    let d = v.datum();
    let two_rho = d.rho().scale(2);
    let x = d.pairing(lambda, &lambda.add(&two_rho));
    let e = (&x * &crate::scalar::Rat::from_int(2)).to_i64().expect("integral exponent") as i32;
    match conv {
        BalanceConvention::Ribbon => Scalar::v_pow(-e),
        BalanceConvention::InverseRibbon => Scalar::v_pow(e),
    }
}

/// Ribbon scalar, Drinfeld operator `u = D·c⁻¹` and balance `b = c·Id`,
/// guarded by `b_{V⊗V} = (b⊗b)·(R₂₁R)⁻¹` on each highest-weight vector.
pub fn balance_data(v: &Rep, conv: BalanceConvention) -> Result<BalanceData, TransferError> {
    let c = ribbon(v, &v.weights()[0], conv);
    let d = sovereign_ops(v, None).d;
    let u = d.scale(&c.recip()?);
    let n = v.dim();
    let b = Matrix::identity(n).scale(&c);
    let vv = tensor_rep(v, v, None).map_err(SolverError::from)?;
    let r = r_finite(v, v)?;
    let r21r = &leg_swap(&r, n, n) * &r;
    let m = (&b.kron(&b) * &r21r.inverse()?).with_legs(&[n, n])?;
    for (_, x) in vv.gens() {
        if !m.commutator(x).is_zero() {
            return Err(TransferError::AxiomFailure("Δ(b) is not central".into()));
        }
    }
    let e = vv.gen(Gen::E(0));
    let mut seen = Vec::new();
    for mu in vv.weights() {
        if seen.contains(mu) {
            continue;
        }
        seen.push(mu.clone());
        let idx: Vec<usize> = (0..vv.dim()).filter(|&i| vv.weights()[i] == *mu).collect();
        let sub = Matrix::from_fn(e.rows(), idx.len(), |i, j| e[(i, idx[j])].clone());
        let cmu = ribbon(v, mu, conv);
        for k in sub.nullspace() {
            let x = Matrix::from_fn(vv.dim(), 1, |i, _| {
                idx.iter().position(|&j| j == i).map(|j| k[(j, 0)].clone()).unwrap_or_default()
            });
            if &m * &x != x.scale(&cmu) {
                return Err(TransferError::AxiomFailure(format!(
                    "Δ(b) differs from c on the highest-weight vector of weight {:?}",
                    mu.0
                )));
            }
        }
    }
    Ok(BalanceData { c, u, b })
}

/// Finite-type transfer value on the probe module `M`.
///
/// `DualK`: `Tr_V[(1⊗D_VΥ⁻¹)·(R_{V^ψ,M})₂₁·(1⊗Υ)·R_{M,V}]`.
/// `Kolb`: `Tr_V[(1⊗u_V)·(R_{V,M})₂₁·(1⊗G⁻¹Υ)·R_{M,V}]`.
pub fn finite_transfer(
    v: &Rep,
    s: &SatakeDatum,
    variant: FiniteVariant,
    probe: &Rep,
) -> Result<Matrix, TransferError> {
    let (dv, dm) = (v.dim(), probe.dim());
    let ups = quasi_k_finite(v, s)?;
    let im = Matrix::identity(dm);
    let (left, r_vm, k) = match variant {
        FiniteVariant::DualK => {
            let d = sovereign_ops(v, None).d;
            let left = &d * &ups.inverse()?;
            (left, r_finite(&psi_rep(s, v)?, probe)?, ups)
        }
        FiniteVariant::Kolb => {
            let u = balance_data(v, BalanceConvention::Ribbon)?.u;
            let g = twist_identification(s, v)?.g;
            (u, r_finite(v, probe)?, &g.inverse()? * &ups)
        }
    };
    let op = &(&(&im.kron(&left) * &leg_swap(&r_vm, dv, dm)) * &im.kron(&k)) * &r_finite(probe, v)?;
    Ok(op.with_legs(&[dm, dv])?.partial_trace(1)?.with_legs(&[dm])?)
}
