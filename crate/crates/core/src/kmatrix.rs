//! K-matrices: the finite quasi K-matrix Υ, spectral K(z), the dual K̃(z),
//! tensor K-matrices and reflection-equation residuals.

use crate::linalg::{intertwiner_space, Matrix};
use crate::qsp::{coideal_action, psi_rep, twist_identification, SatakeDatum, TwistKind};
use crate::reps::{tensor_rep, Rep};
use crate::rmatrix::{r_finite, SolverError, SpectralOperator};
use crate::scalar::{Scalar, Var};

fn qsp_err(e: crate::qsp::QspError) -> SolverError {
    SolverError::SolverInconsistent(e.to_string())
}

/// Which reflection equation to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionMode {
    Untwisted,
    Twisted,
}

/// `Υ_V` with `Υ_V·B_V = B_{V^ψ}·Υ_V`, upper triangular with unit diagonal.
pub fn quasi_k_finite(v: &Rep, s: &SatakeDatum) -> Result<Matrix, SolverError> {
    if s.twist != TwistKind::Semistandard {
        return Err(SolverError::SolverInconsistent(
            "quasi K-matrix needs a finite Satake datum".into(),
        ));
    }
    let vp = psi_rep(s, v).map_err(qsp_err)?;
    let a = coideal_action(s, v).map_err(qsp_err)?;
    let b = coideal_action(s, &vp).map_err(qsp_err)?;
    let pairs: Vec<(Matrix, Matrix)> = a.into_iter().zip(b).map(|(x, y)| (x.1, y.1)).collect();
    let n = v.dim();
    let upper = |i: usize, j: usize| j >= i;
    let sols = intertwiner_space(&pairs, n, n, Some(&upper));
    if sols.len() != 1 {
        return Err(SolverError::SolverDegenerate {
            what: format!("quasi K-matrix on {}", v.label),
            dim: sols.len(),
        });
    }
    let u = &sols[0];
    if u[(0, 0)].is_zero() {
        return Err(SolverError::SolverInconsistent("grade-zero term vanishes".into()));
    }
    let u = u.scale(&u[(0, 0)].recip()?);
    if (0..n).any(|i| !u[(i, i)].is_one()) {
        return Err(SolverError::SolverInconsistent(
            "grade-zero term is not the identity".into(),
        ));
    }
    Ok(u.with_legs(v.legs())?)
}

/// Residual `Υ·B_V − B_{V^ψ}·Υ` over all coideal generators, first nonzero.
pub fn quasi_k_residual(u: &Matrix, v: &Rep, s: &SatakeDatum) -> Result<Matrix, SolverError> {
    let vp = psi_rep(s, v).map_err(qsp_err)?;
    let a = coideal_action(s, v).map_err(qsp_err)?;
    let b = coideal_action(s, &vp).map_err(qsp_err)?;
    for ((_, x), (_, y)) in a.iter().zip(&b) {
        let r = &(u * x) - &(y * u);
        if !r.is_zero() {
            return Ok(r);
        }
    }
    Ok(Matrix::zeros(u.rows(), u.cols()))
}

/// Solves `K(z)·π_{V,z}(b) = G·π_{V,1/z}(b)·G⁻¹·K(z)` for every coideal
/// generator; normalized so the top-weight diagonal entry is 1.
pub fn solve_spectral_k(v: &Rep, s: &SatakeDatum) -> Result<SpectralOperator, SolverError> {
    let z = Scalar::var(Var::Z);
    let g = twist_identification(s, v).map_err(qsp_err)?.g;
    let ginv = g.inverse()?;
    let at_z = coideal_action(s, &v.shifted(&z)).map_err(qsp_err)?;
    let at_inv = coideal_action(s, &v.shifted(&z.recip()?)).map_err(qsp_err)?;
    let pairs: Vec<(Matrix, Matrix)> = at_z
        .into_iter()
        .zip(at_inv)
        .map(|((_, x), (_, y))| (x, &(&g * &y) * &ginv))
        .collect();
    let n = v.dim();
    let sols = intertwiner_space(&pairs, n, n, None);
    if sols.len() != 1 {
        return Err(SolverError::SolverDegenerate {
            what: format!("spectral K-matrix on {}", v.label),
            dim: sols.len(),
        });
    }
    let k = &sols[0];
    if k[(0, 0)].is_zero() {
        return Err(SolverError::Anchor("top-weight diagonal entry vanishes".into()));
    }
    let k = k.scale(&k[(0, 0)].recip()?).with_legs(v.legs())?;
    Ok(SpectralOperator::new(k, Var::Z, "K(z)[0,0] = 1"))
}

/// `K̃(z) = D̄·K(pz)⁻¹`.
pub fn dual_k(k: &SpectralOperator, dbar: &Matrix, p: &Scalar) -> Result<SpectralOperator, SolverError> {
    let z = Scalar::var(k.var);
    let shifted = k.at(&(p * &z))?;
    let legs = k.legs();
    let m = (dbar * &shifted.inverse()?).with_legs(&legs)?;
    Ok(SpectralOperator::new(m, k.var, &format!("dual with p = {p}")))
}

/// `R(z)` conjugated by `G ⊗ 1`, i.e. the ψ-twisted first leg.
pub fn twist_first_leg(r: &Matrix, g: &Matrix) -> Result<Matrix, SolverError> {
    if g.is_identity() {
        return Ok(r.clone());
    }
    let legs = r.legs().map(|l| l.to_vec()).unwrap_or_else(|| vec![r.rows()]);
    let n = r.rows() / g.rows();
    let gg = g.kron(&Matrix::identity(n));
    let ginv = g.inverse()?.kron(&Matrix::identity(n));
    Ok((&(&gg * r) * &ginv).with_legs(&legs)?)
}

/// `flip · X · flip` taking an operator on `W ⊗ V` to `V ⊗ W`.
pub fn leg_swap(x: &Matrix, dw: usize, dv: usize) -> Matrix {
    let m = &(&Matrix::flip(dw, dv) * x) * &Matrix::flip(dv, dw);
    m.with_legs(&[dv, dw]).unwrap()
}

/// Spectral tensor K-matrix `𝕂(z) = (R_{V^ψ,M}(z))₂₁·(1⊗K_V(z))·R_{M,V}(z)`
/// on `M ⊗ V`; `rmv = R_{M,V}`, `rvm = R_{V,M}`, both in their own variable.
pub fn tensor_k(
    m: &Rep,
    v: &Rep,
    k: &SpectralOperator,
    rmv: &SpectralOperator,
    rvm: &SpectralOperator,
    s: &SatakeDatum,
) -> Result<SpectralOperator, SolverError> {
    let z = Scalar::var(Var::Z);
    let g = twist_identification(s, v).map_err(qsp_err)?.g;
    let (dm, dv) = (m.dim(), v.dim());
    let rpsi = twist_first_leg(&rvm.at(&z)?, &g)?;
    let kk = Matrix::identity(dm).kron(&k.at(&z)?);
    let out = &(&leg_swap(&rpsi, dv, dm) * &kk) * &rmv.at(&z)?;
    Ok(SpectralOperator::new(
        out.with_legs(&[dm, dv])?,
        Var::Z,
        "tensor K-matrix",
    ))
}

/// Finite tensor K-matrix `(R_{V^ψ,M})₂₁·(1⊗Υ_V)·R_{M,V}` on `M ⊗ V`.
pub fn tensor_k_finite(m: &Rep, v: &Rep, s: &SatakeDatum) -> Result<Matrix, SolverError> {
    let vp = psi_rep(s, v).map_err(qsp_err)?;
    let u = quasi_k_finite(v, s)?;
    let (dm, dv) = (m.dim(), v.dim());
    let r21 = leg_swap(&r_finite(&vp, m)?, dv, dm);
    let out = &(&r21 * &Matrix::identity(dm).kron(&u)) * &r_finite(m, v)?;
    Ok(out.with_legs(&[dm, dv])?)
}

/// Residual `𝕂·B_{M⊗V} − B_{M⊗V^ψ}·𝕂` for the finite tensor K-matrix.
pub fn tensor_k_finite_residual(m: &Rep, v: &Rep, s: &SatakeDatum) -> Result<Matrix, SolverError> {
    let kk = tensor_k_finite(m, v, s)?;
    let vp = psi_rep(s, v).map_err(qsp_err)?;
    let a = coideal_action(s, &tensor_rep(m, v, None)?).map_err(qsp_err)?;
    let b = coideal_action(s, &tensor_rep(m, &vp, None)?).map_err(qsp_err)?;
    for ((_, x), (_, y)) in a.iter().zip(&b) {
        let r = &(&kk * x) - &(y * &kk);
        if !r.is_zero() {
            return Ok(r);
        }
    }
    Ok(Matrix::zeros(kk.rows(), kk.cols()))
}

/// Inputs to a reflection-equation check on `V ⊗ W`.
pub struct ReflectionData<'a> {
    pub kv: &'a SpectralOperator,
    pub kw: &'a SpectralOperator,
    /// `R_{V,W}(x)` and `R_{W,V}(x)`.
    pub rvw: &'a SpectralOperator,
    pub rwv: &'a SpectralOperator,
    /// Twist identifications; identity matrices for untwisted use.
    pub gv: &'a Matrix,
    pub gw: &'a Matrix,
}

/// Residual of
/// `R₂₁(z/y)·K₂(z)·R(yz)·K₁(y) − K₁(y)·R₂₁(yz)·K₂(z)·R(z/y)`, with the
/// ψ-legs conjugated by `G` in twisted mode.
pub fn verify_reflection(d: &ReflectionData, mode: ReflectionMode) -> Result<Matrix, SolverError> {
    let y = Scalar::var(Var::Y);
    let z = Scalar::var(Var::Z);
    let (dv, dw) = (d.kv.mat.rows(), d.kw.mat.rows());
    let zy = &z / &y;
    let yz = &y * &z;
    let (iv, iw) = (Matrix::identity(dv), Matrix::identity(dw));
    let k1 = d.kv.at(&y)?.kron(&iw);
    let k2 = iv.kron(&d.kw.at(&z)?);
    let r_zy = d.rvw.at(&zy)?;
    let r_yz = d.rvw.at(&yz)?;
    let r21_zy = d.rwv.at(&zy)?;
    let r21_yz = d.rwv.at(&yz)?;
    let (r21_zy, r_yz, r21_yz) = match mode {
        ReflectionMode::Untwisted => (r21_zy, r_yz, r21_yz),
        ReflectionMode::Twisted => {
            let both = twist_first_leg(&twist_first_leg(&r21_zy, d.gw)?.swap_legs()?, d.gv)?
                .swap_legs()?;
            (both, twist_first_leg(&r_yz, d.gv)?, twist_first_leg(&r21_yz, d.gw)?)
        }
    };
    let r21_zy = leg_swap(&r21_zy, dw, dv);
    let r21_yz = leg_swap(&r21_yz, dw, dv);
    let lhs = &(&(&r21_zy * &k2) * &r_yz) * &k1;
    let rhs = &(&(&k1 * &r21_yz) * &k2) * &r_zy;
    Ok(&lhs - &rhs)
}

/// `R̃_{V,W}(x) = Ad(1⊗D̄_W)(R_{V,W}(p²x)⁻¹)` as a spectral operator.
pub fn dual_r(r: &SpectralOperator, dbar_w: &Matrix, p: &Scalar) -> Result<SpectralOperator, SolverError> {
    let x = Scalar::var(r.var);
    let legs = r.legs();
    let inv = r.at(&(&(p * p) * &x))?.inverse()?;
    let one = Matrix::identity(legs[0]);
    let m = &(&one.kron(dbar_w) * &inv) * &one.kron(&dbar_w.inverse()?);
    Ok(SpectralOperator::new(m.with_legs(&legs)?, r.var, "dual R"))
}

/// Residual of the dual reflection equation
/// `R(z/y)⁻¹·K̃₂(z)·[R̃_{W,V}(yz)]₂₁·K̃₁(y) − K̃₁(y)·R̃_{V,W}(yz)·K̃₂(z)·[R_{W,V}(z/y)⁻¹]₂₁`.
pub fn verify_dual_reflection(
    ktv: &SpectralOperator,
    ktw: &SpectralOperator,
    rvw: &SpectralOperator,
    rwv: &SpectralOperator,
    dbar_v: &Matrix,
    dbar_w: &Matrix,
    p: &Scalar,
) -> Result<Matrix, SolverError> {
    let y = Scalar::var(Var::Y);
    let z = Scalar::var(Var::Z);
    let (dv, dw) = (ktv.mat.rows(), ktw.mat.rows());
    let zy = &z / &y;
    let yz = &y * &z;
    let k1 = ktv.at(&y)?.kron(&Matrix::identity(dw));
    let k2 = Matrix::identity(dv).kron(&ktw.at(&z)?);
    let rt_vw = dual_r(rvw, dbar_w, p)?.at(&yz)?;
    let rt_wv = leg_swap(&dual_r(rwv, dbar_v, p)?.at(&yz)?, dw, dv);
    let r_inv = rvw.at(&zy)?.inverse()?;
    let r21_inv = leg_swap(&rwv.at(&zy)?.inverse()?, dw, dv);
    let lhs = &(&(&r_inv * &k2) * &rt_wv) * &k1;
    let rhs = &(&(&k1 * &rt_vw) * &k2) * &r21_inv;
    Ok(&lhs - &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_datum, parse_tau, CartanDatum, DatumKind, GradingShift};
    use crate::rmatrix::spectral_r;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn affine() -> (CartanDatum, GradingShift) {
        let (d, sh) = build_datum(DatumKind::A1Affine, &parse_tau("(0 1)", 2).unwrap()).unwrap();
        (d, sh.unwrap())
    }

    fn a1() -> CartanDatum {
        build_datum(DatumKind::A1, &[0]).unwrap().0
    }

    fn ktrig() -> Matrix {
        Matrix::diag(vec![s("1"), s("(xi - z^2)/(xi*z^2 - 1)")])
    }

    #[test]
    fn trigonometric_k() {
        let (d, sh) = affine();
        let sat = SatakeDatum::symbolic(&d).unwrap();
        let v = Rep::evaluation(&d, &sh, 1, &Scalar::one()).unwrap();
        let k = solve_spectral_k(&v, &sat).unwrap();
        assert_eq!(k.mat, ktrig());
        assert!(k.at(&s("1")).unwrap().is_identity());
    }

    #[test]
    fn spin_one_k_is_diagonal() {
        let (d, sh) = affine();
        let sat = SatakeDatum::symbolic(&d).unwrap();
        let v = Rep::evaluation(&d, &sh, 2, &Scalar::one()).unwrap();
        let k = solve_spectral_k(&v, &sat).unwrap();
        assert!(k.mat.is_diagonal());
        assert_eq!(k.mat[(1, 1)], s("(v^2*z^2 - xi)/(v^2 - xi*z^2)"));
    }

    #[test]
    fn dual_of_trigonometric_k() {
        let k = SpectralOperator::new(ktrig(), Var::Z, "");
        let kt = dual_k(&k, &Matrix::identity(2), &s("q^-1")).unwrap();
        assert_eq!(
            kt.mat,
            Matrix::diag(vec![s("1"), s("(xi*z^2/q^2 - 1)/(xi - z^2/q^2)")])
        );
        let id = SpectralOperator::new(Matrix::identity(2), Var::Z, "");
        assert!(dual_k(&id, &Matrix::identity(2), &s("q^-1")).unwrap().mat.is_identity());
    }

    fn re_setup() -> (SpectralOperator, SpectralOperator) {
        let (d, sh) = affine();
        let sat = SatakeDatum::symbolic(&d).unwrap();
        let v = Rep::evaluation(&d, &sh, 1, &Scalar::one()).unwrap();
        (solve_spectral_k(&v, &sat).unwrap(), spectral_r(&v, &v).unwrap())
    }

    #[test]
    fn reflection_equation_spin_half() {
        let (k, r) = re_setup();
        let id = Matrix::identity(2);
        let data = ReflectionData { kv: &k, kw: &k, rvw: &r, rwv: &r, gv: &id, gw: &id };
        assert!(verify_reflection(&data, ReflectionMode::Untwisted).unwrap().is_zero());
        assert!(verify_reflection(&data, ReflectionMode::Twisted).unwrap().is_zero());
    }

    #[test]
    fn reflection_detects_perturbation() {
        let (k, r) = re_setup();
        let id = Matrix::identity(2);
        let mut bad = k.clone();
        bad.mat[(1, 1)] = &bad.mat[(1, 1)] * &s("z");
        let data = ReflectionData { kv: &bad, kw: &bad, rvw: &r, rwv: &r, gv: &id, gw: &id };
        assert!(!verify_reflection(&data, ReflectionMode::Untwisted).unwrap().is_zero());
    }

    #[test]
    fn reflection_trivial_inputs() {
        let k = SpectralOperator::new(Matrix::identity(2), Var::Z, "");
        let r = SpectralOperator::new(Matrix::identity_legs(&[2, 2]), Var::W, "");
        let id = Matrix::identity(2);
        let data = ReflectionData { kv: &k, kw: &k, rvw: &r, rwv: &r, gv: &id, gw: &id };
        assert!(verify_reflection(&data, ReflectionMode::Untwisted).unwrap().is_zero());
        let z = verify_dual_reflection(&k, &k, &r, &r, &id, &id, &s("q^-1")).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn reflection_scale_invariance() {
        let (k, r) = re_setup();
        let id = Matrix::identity(2);
        let mut rs = r.clone();
        rs.mat = rs.mat.scale(&s("w"));
        let mut ks = k.clone();
        ks.mat = ks.mat.scale(&s("z + 2"));
        let data = ReflectionData { kv: &ks, kw: &ks, rvw: &rs, rwv: &rs, gv: &id, gw: &id };
        assert!(verify_reflection(&data, ReflectionMode::Untwisted).unwrap().is_zero());
    }

    #[test]
    fn dual_reflection_and_sabotage() {
        let (k, r) = re_setup();
        let id = Matrix::identity(2);
        let p = s("q^-1");
        let kt = dual_k(&k, &id, &p).unwrap();
        assert!(verify_dual_reflection(&kt, &kt, &r, &r, &id, &id, &p).unwrap().is_zero());
        let kt1 = dual_k(&k, &id, &s("1")).unwrap();
        assert!(!verify_dual_reflection(&kt1, &kt1, &r, &r, &id, &id, &p).unwrap().is_zero());
    }

    #[test]
    fn quasi_k_spin_half() {
        let sat = SatakeDatum::symbolic(&a1()).unwrap();
        let v = Rep::spin(&a1(), 1).unwrap();
        let u = quasi_k_finite(&v, &sat).unwrap();
        assert_eq!(
            u,
            Matrix::from_rows(vec![vec![s("1"), s("sigma*(q - 1/q)")], vec![s("0"), s("1")]])
        );
        assert!(quasi_k_residual(&u, &v, &sat).unwrap().is_zero());
        let t = Rep::trivial(&a1(), None);
        assert!(quasi_k_finite(&t, &sat).unwrap().is_identity());
    }

    #[test]
    fn quasi_k_is_polynomial_in_e() {
        let sat = SatakeDatum::symbolic(&a1()).unwrap();
        for tj in 2..4 {
            let v = Rep::spin(&a1(), tj).unwrap();
            let u = quasi_k_finite(&v, &sat).unwrap();
            assert!(quasi_k_residual(&u, &v, &sat).unwrap().is_zero());
            // Υ = Σ c_k E^k: constant along each superdiagonal up to the
            // E^k entries, checked by commuting with K-weighted structure.
            let e = v.gen(crate::reps::Gen::E(0));
            let mut span = vec![Matrix::identity(tj + 1)];
            for k in 1..=tj {
                span.push(&span[k - 1] * e);
            }
            let flat = |ms: &[Matrix]| Matrix::from_rows(ms.iter().map(|m| m.entries().to_vec()).collect());
            let r = flat(&span).rank();
            let mut ext = span.clone();
            ext.push(u);
            assert_eq!(flat(&ext).rank(), r);
        }
    }

    #[test]
    fn finite_tensor_k_intertwines() {
        let sat = SatakeDatum::symbolic(&a1()).unwrap();
        let h = Rep::spin(&a1(), 1).unwrap();
        assert!(tensor_k_finite_residual(&h, &h, &sat).unwrap().is_zero());
    }

    #[test]
    fn spectral_tensor_k_counit() {
        let (d, sh) = affine();
        let sat = SatakeDatum::symbolic(&d).unwrap();
        let v = Rep::evaluation(&d, &sh, 1, &Scalar::one()).unwrap();
        let t = Rep::trivial(&d, Some(&sh));
        let k = solve_spectral_k(&v, &sat).unwrap();
        let rtv = spectral_r(&t, &v).unwrap();
        let rvt = spectral_r(&v, &t).unwrap();
        let kk = tensor_k(&t, &v, &k, &rtv, &rvt, &sat).unwrap();
        assert_eq!(kk.mat, k.mat);
        let kt = SpectralOperator::new(Matrix::identity(1), Var::Z, "");
        let rvt2 = spectral_r(&v, &t).unwrap();
        let rtv2 = spectral_r(&t, &v).unwrap();
        let kk = tensor_k(&v, &t, &kt, &rvt2, &rtv2, &sat).unwrap();
        assert!(kk.mat.is_identity());
    }
}
