mod common;

use common::*;
use reflekt_core::kmatrix::{
    solve_spectral_k, tensor_k, verify_reflection, ReflectionData, ReflectionMode,
};
use reflekt_core::qsp::SatakeDatum;
use reflekt_core::reps::Rep;
use reflekt_core::rmatrix::{spectral_r, verify_crossing, SpectralOperator};
use reflekt_core::scalar::specialize::Specializer;
use reflekt_core::transfer::{
    build_tensor_transfer, build_transfer, commutator_check, hamiltonian, hermiticity_check,
    projective_residual, self_commutator, transfer_with_boundary, AuxFactor, Boundary,
};
use reflekt_core::{Matrix, Scalar, Var};

fn boundary() -> Boundary {
    let (d, sh) = affine();
    Boundary::quasi_split(&sh, &d).unwrap()
}

#[test]
fn spin_one_reflection_equation() {
    let (d, _) = affine();
    let sat = SatakeDatum::symbolic(&d).unwrap();
    let (h, one) = (eval(1), eval(2));
    let kh = solve_spectral_k(&h, &sat).unwrap();
    let k1 = solve_spectral_k(&one, &sat).unwrap();
    let r = spectral_r(&one, &h).unwrap();
    let r21 = spectral_r(&h, &one).unwrap();
    let (g1, gh) = (Matrix::identity(3), Matrix::identity(2));
    let data = ReflectionData { kv: &k1, kw: &kh, rvw: &r, rwv: &r21, gv: &g1, gw: &gh };
    assert!(verify_reflection(&data, ReflectionMode::Untwisted).unwrap().is_zero());
}

#[test]
fn mismatched_k_fails_reflection() {
    let (d, _) = affine();
    let sat = SatakeDatum::symbolic(&d).unwrap();
    let other = SatakeDatum::quasi_split_affine(&d, &s("eta")).unwrap();
    let v = eval(1);
    let kv = solve_spectral_k(&v, &sat).unwrap();
    let kw = solve_spectral_k(&v, &other).unwrap();
    let r = spectral_r(&v, &v).unwrap();
    let id = Matrix::identity(2);
    let data = ReflectionData { kv: &kv, kw: &kw, rvw: &r, rwv: &r, gv: &id, gw: &id };
    assert!(!verify_reflection(&data, ReflectionMode::Untwisted).unwrap().is_zero());
}

#[test]
fn tensor_k_coproduct() {
    let (d, _) = affine();
    let sat = SatakeDatum::symbolic(&d).unwrap();
    let (m, v) = (eval(1), eval(1));
    let (y, z) = (s("y"), s("z"));
    let legs = [2, 2, 2];
    let e = |op: &Matrix, pos: &[usize]| Matrix::embed(op, pos, &legs).unwrap();
    let k = solve_spectral_k(&v, &sat).unwrap();
    let r = spectral_r(&v, &v).unwrap();
    // Left side assembled from the coproduct of the auxiliary factor.
    let r_ma = &e(&r.at(&z).unwrap(), &[0, 2]) * &e(&r.at(&y).unwrap(), &[0, 1]);
    let r_am = &e(&r.at(&z).unwrap(), &[2, 0]) * &e(&r.at(&y).unwrap(), &[1, 0]);
    let k_a = &(&e(&k.at(&z).unwrap(), &[2]) * &e(&r.at(&(&y * &z)).unwrap(), &[1, 2]))
        * &e(&k.at(&y).unwrap(), &[1]);
    let lhs = &(&r_am * &k_a) * &r_ma;
    let kk = tensor_k(&m, &v, &k, &r, &r, &sat).unwrap();
    let rhs = &(&e(&kk.at(&z).unwrap(), &[0, 2]) * &e(&r.at(&(&y * &z)).unwrap(), &[1, 2]))
        * &e(&kk.at(&y).unwrap(), &[0, 1]);
    assert!((&lhs - &rhs).is_zero());
}

#[test]
fn empty_chain_scalar() {
    let b = boundary();
    let b = Boundary { dual_sat: b.sat.clone(), ..b };
    let t = build_transfer(&[], &eval(1), &b).unwrap();
    let expected = s("1 + (xi - z^2)*(xi*z^2/q^2 - 1)/((xi*z^2 - 1)*(xi - z^2/q^2))");
    assert_eq!(t.mat.scalar_value().unwrap(), expected);
}

#[test]
fn two_site_commutativity_specialized() {
    let b = boundary();
    let v = eval(1);
    let mut sp = Specializer::new(3);
    let bind = sp.bindings(&[Var::XI]);
    let t = build_transfer(&[v.clone(), v.clone()], &v, &b.specialized(bind)).unwrap();
    assert!(self_commutator(&t).unwrap().is_zero());
}

#[test]
fn mixed_auxiliaries_commute() {
    let b = boundary();
    let (h, one) = (eval(1), eval(2));
    let t_h = build_transfer(std::slice::from_ref(&h), &h, &b).unwrap();
    let t_1 = build_transfer(std::slice::from_ref(&h), &one, &b).unwrap();
    let c = commutator_check(&t_h.at(&s("y")).unwrap(), &t_1.mat).unwrap();
    assert!(c.is_zero());
}

#[test]
fn gauge_rescaling_of_boundaries() {
    let b = boundary();
    let v = eval(1);
    let k = b.k(&v).unwrap();
    let kt = b.k_dual(&v).unwrap();
    let g = s("z^2 + 3");
    let gt = s("1/(z - 5)");
    let ks = SpectralOperator { mat: k.mat.scale(&g), ..k.clone() };
    let kts = SpectralOperator { mat: kt.mat.scale(&gt), ..kt.clone() };
    let t = transfer_with_boundary(std::slice::from_ref(&v), &v, &k, &kt, &b).unwrap();
    let ts = transfer_with_boundary(std::slice::from_ref(&v), &v, &ks, &kts, &b).unwrap();
    assert_eq!(ts.mat, t.mat.scale(&(&g * &gt)));
    assert!(self_commutator(&ts).unwrap().is_zero());
}

#[test]
fn multiplicativity_order_swap() {
    let b = boundary();
    let v = eval(1);
    let one = Scalar::one();
    let a = s("a");
    let vw = build_tensor_transfer(
        std::slice::from_ref(&v),
        &AuxFactor { rep: &v, param: one.clone() },
        &AuxFactor { rep: &v, param: a.clone() },
        &b,
    )
    .unwrap();
    let wv = build_tensor_transfer(
        std::slice::from_ref(&v),
        &AuxFactor { rep: &v, param: a },
        &AuxFactor { rep: &v, param: one },
        &b,
    )
    .unwrap();
    let (res, _) = projective_residual(&vw.mat, &wv.mat);
    assert!(res.is_zero());
}

#[test]
fn hamiltonian_symmetry() {
    let b = boundary();
    let v = eval(1);
    let (h, _) = hamiltonian(&[v.clone(), v], &b).unwrap();
    let (res, scale) = hermiticity_check(&h, &[Var::XI, Var::ETA]).unwrap();
    assert!(res.is_zero(), "scale {scale}");
    // H itself flips sign; (q - 1/q)·H is invariant on the nose.
    assert_eq!(scale, s("-1"));
    let hn = h.scale(&s("q - 1/q"));
    let (res, scale) = hermiticity_check(&hn, &[Var::XI, Var::ETA]).unwrap();
    assert!(res.is_zero());
    assert!(scale.is_one());
}

#[test]
fn crossing_residual_with_opposite_shift() {
    // With p = q the functional form holds; the proportionality factor is
    // a nonconstant function of the spectral parameter.
    let v = eval(1);
    let r = spectral_r(&v, &v).unwrap();
    let c = verify_crossing(&r, &Matrix::identity(2), &s("q")).unwrap();
    assert!(c.residual.is_zero());
    assert!(!c.scale.is_constant());
}

#[test]
fn trivial_auxiliary_is_identity() {
    let (d, sh) = affine();
    let b = boundary();
    let t = Rep::trivial(&d, Some(&sh));
    let v = eval(1);
    assert!(build_transfer(&[v.clone(), v], &t, &b).unwrap().mat.is_identity());
}
