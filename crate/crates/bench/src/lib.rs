//! Shared fixtures for the benchmarks.

use reflekt_core::cartan::{build_datum, parse_tau, CartanDatum, DatumKind, GradingShift};
use reflekt_core::reps::Rep;
use reflekt_core::Scalar;

pub fn affine() -> (CartanDatum, GradingShift) {
    let tau = parse_tau("(0 1)", 2).expect("valid permutation");
    let (d, sh) = build_datum(DatumKind::A1Affine, &tau).expect("shipped datum");
    (d, sh.expect("affine datum has a shift"))
}

/// Evaluation module of spin `two_j / 2` at parameter 1.
pub fn eval(two_j: usize) -> Rep {
    let (d, sh) = affine();
    Rep::evaluation(&d, &sh, two_j, &Scalar::one()).expect("evaluation module")
}

pub fn scalar(s: &str) -> Scalar {
    s.parse().expect("valid scalar")
}
