#![allow(dead_code)]

use reflekt_core::cartan::{build_datum, parse_tau, CartanDatum, DatumKind, GradingShift};
use reflekt_core::reps::Rep;
use reflekt_core::{Scalar, Var};

pub fn s(x: &str) -> Scalar {
    x.parse().unwrap()
}

pub fn affine() -> (CartanDatum, GradingShift) {
    let (d, sh) = build_datum(DatumKind::A1Affine, &parse_tau("(0 1)", 2).unwrap()).unwrap();
    (d, sh.unwrap())
}

pub fn a1() -> CartanDatum {
    build_datum(DatumKind::A1, &[0]).unwrap().0
}

pub fn eval(two_j: usize) -> Rep {
    let (d, sh) = affine();
    Rep::evaluation(&d, &sh, two_j, &Scalar::one()).unwrap()
}

pub fn spin(two_j: usize) -> Rep {
    Rep::spin(&a1(), two_j).unwrap()
}

/// `diag(1, (ξ − z²)/(ξz² − 1))`, written out by hand.
pub fn k_trig() -> reflekt_core::Matrix {
    reflekt_core::Matrix::diag(vec![s("1"), s("(xi - z^2)/(xi*z^2 - 1)")])
}

pub fn var(v: Var) -> Scalar {
    Scalar::var(v)
}
