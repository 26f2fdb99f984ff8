//! R-matrices: the diagonal factor κ, the finite quasi R-matrix, spectral
//! R-matrices by intertwiner solving, and Yang-Baxter and crossing checks.

use crate::linalg::{intertwiner_space, LinalgError, Matrix};
use crate::reps::{tensor_rep, Gen, Rep, RepError};
use crate::scalar::{Scalar, ScalarError, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("no solution: {0}")]
    SolverInconsistent(String),
    #[error("solution space has dimension {dim}, expected 1: {what}")]
    SolverDegenerate { what: String, dim: usize },
    #[error("normalization anchor failed: {0}")]
    Anchor(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A matrix depending rationally on one spectral variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralOperator {
    pub mat: Matrix,
    pub var: Var,
    pub anchor: String,
}

impl SpectralOperator {
    pub fn new(mat: Matrix, var: Var, anchor: &str) -> SpectralOperator {
        SpectralOperator {
            mat,
            var,
            anchor: anchor.to_string(),
        }
    }

    /// Constant operator.
    pub fn constant(mat: Matrix) -> SpectralOperator {
        SpectralOperator::new(mat, Var::Z, "constant")
    }

    pub fn at(&self, x: &Scalar) -> Result<Matrix, ScalarError> {
        if *x == Scalar::var(self.var) {
            return Ok(self.mat.clone());
        }
        self.mat.substitute(&[(self.var, x.clone())])
    }

    pub fn legs(&self) -> Vec<usize> {
        self.mat
            .legs()
            .map(|l| l.to_vec())
            .unwrap_or_else(|| vec![self.mat.rows()])
    }
}

/// `κ` acts on `V_λ ⊗ W_μ` by `q^{(λ,μ)}`.
pub fn kappa(v: &Rep, w: &Rep) -> Matrix {
    let d = v.datum();
    let entries = v
        .weights()
        .iter()
        .flat_map(|a| w.weights().iter().map(move |b| Scalar::v_pow(d.v_exponent(a, b))))
        .collect();
    let mut legs = v.legs().to_vec();
    legs.extend(w.legs());
    Matrix::diag(entries).with_legs(&legs).unwrap()
}

/// `Δ^op(x)` on `V ⊗ W`, obtained by flipping the action on `W ⊗ V`.
pub fn coproduct_op(v: &Rep, w: &Rep) -> Result<Rep, RepError> {
    tensor_rep(w, v, None)
}

fn flip_conj(m: &Matrix, dv: usize, dw: usize) -> Matrix {
    // m acts on W ⊗ V; return the operator on V ⊗ W.
    let p = Matrix::flip(dw, dv);
    let pi = Matrix::flip(dv, dw);
    &(&p * m) * &pi
}

fn with_pair_legs(m: Matrix, v: &Rep, w: &Rep) -> Matrix {
    let mut legs = v.legs().to_vec();
    legs.extend(w.legs());
    m.with_legs(&legs).unwrap()
}

/// Finite quasi R-matrix `Ξ = Σ c_n Fⁿ⊗Eⁿ` on `V ⊗ W`, with the
/// coefficients fixed by `Ad(κΞ)∘Δ = Δ^op` and `c_0 = 1`.
pub fn quasi_r_finite(v: &Rep, w: &Rep) -> Result<Matrix, SolverError> {
    if v.datum().affine {
        return Err(SolverError::Rep(RepError::DatumMismatch));
    }
    let dv = v.dim();
    let top = v.dim().min(w.dim());
    let kap = kappa(v, w);
    let delta = tensor_rep(v, w, None)?;
    let delta_op = coproduct_op(v, w)?;
    let mut basis = Vec::with_capacity(top);
    let mut fpow = Matrix::identity(v.dim());
    let mut epow = Matrix::identity(w.dim());
    for _ in 0..top {
        basis.push(fpow.kron(&epow));
        fpow = &fpow * v.gen(Gen::F(0));
        epow = &epow * w.gen(Gen::E(0));
    }
    // One column per coefficient c_n, one row per matrix entry and generator.
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (g, x) in delta.gens() {
        let xop = flip_conj(delta_op.gen(*g), dv, w.dim());
        let cols: Vec<Matrix> = basis
            .iter()
            .map(|b| {
                let r = &kap * b;
                &(&r * x) - &(&xop * &r)
            })
            .collect();
        let n = kap.rows();
        for i in 0..n {
            for j in 0..n {
                let row: Vec<Scalar> = cols.iter().map(|c| c[(i, j)].clone()).collect();
                if row.iter().any(|e| !e.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let sols = if rows.is_empty() {
        (0..top)
            .map(|k| {
                let mut c = vec![Scalar::zero(); top];
                c[k] = Scalar::one();
                Matrix::column(c)
            })
            .collect()
    } else {
        Matrix::from_rows(rows).nullspace()
    };
    if sols.len() != 1 {
        return Err(SolverError::SolverDegenerate {
            what: format!("quasi R-matrix on {}⊗{}", v.label, w.label),
            dim: sols.len(),
        });
    }
    let c = &sols[0];
    if c[(0, 0)].is_zero() {
        return Err(SolverError::SolverInconsistent(
            "degree-zero coefficient vanishes".into(),
        ));
    }
    let c0 = c[(0, 0)].recip()?;
    let mut xi = Matrix::zeros(kap.rows(), kap.cols());
    for (k, b) in basis.iter().enumerate() {
        let ck = &c[(k, 0)] * &c0;
        if !ck.is_zero() {
            xi = &xi + &b.scale(&ck);
        }
    }
    Ok(with_pair_legs(xi, v, w))
}

/// `R = κ·Ξ` on `V ⊗ W` for finite-type modules.
pub fn r_finite(v: &Rep, w: &Rep) -> Result<Matrix, SolverError> {
    let xi = quasi_r_finite(v, w)?;
    Ok(with_pair_legs(&kappa(v, w) * &xi, v, w))
}

/// Residual of `R·Δ(x) − Δ^op(x)·R` over all generators.
pub fn intertwining_residual(r: &Matrix, v: &Rep, w: &Rep) -> Result<Matrix, RepError> {
    let delta = tensor_rep(v, w, None)?;
    let delta_op = coproduct_op(v, w)?;
    let mut acc = Matrix::zeros(r.rows(), r.cols());
    for (g, x) in delta.gens() {
        let xop = flip_conj(delta_op.gen(*g), v.dim(), w.dim());
        let res = &(r * x) - &(&xop * r);
        // Sum of squares would mix entries; keep the first nonzero residual.
        if !res.is_zero() && acc.is_zero() {
            acc = res;
        }
    }
    Ok(acc)
}

/// Spectral R-matrix `R_{V,W}(w)` in the variable `w`: the second factor is
/// shifted by `w`. Normalized so that `R(0) = κ`.
pub fn spectral_r(v: &Rep, w: &Rep) -> Result<SpectralOperator, SolverError> {
    let wv = Scalar::var(Var::W);
    let ws = w.shifted(&wv);
    let delta = tensor_rep(v, &ws, None)?;
    let delta_op = coproduct_op(v, &ws)?;
    let weights: Vec<_> = delta.weights().to_vec();
    let pairs: Vec<(Matrix, Matrix)> = delta
        .gens()
        .map(|(g, x)| (x.clone(), flip_conj(delta_op.gen(*g), v.dim(), w.dim())))
        .collect();
    let n = delta.dim();
    let mask = |i: usize, j: usize| weights[i] == weights[j];
    let sols = intertwiner_space(&pairs, n, n, Some(&mask));
    if sols.len() != 1 {
        return Err(SolverError::SolverDegenerate {
            what: format!("spectral R-matrix on {}⊗{}", v.label, w.label),
            dim: sols.len(),
        });
    }
    let x = &sols[0];
    let kap = kappa(v, w);
    let at0 = x.substitute(&[(Var::W, Scalar::zero())]).map_err(|_| {
        SolverError::Anchor("solution has a pole at w = 0".into())
    })?;
    let a = (0..n)
        .find(|&i| !at0[(i, i)].is_zero())
        .ok_or_else(|| SolverError::Anchor("solution vanishes on the diagonal at w = 0".into()))?;
    let c = &kap[(a, a)] / &at0[(a, a)];
    let r = with_pair_legs(x.scale(&c), v, w);
    if at0.scale(&c) != kap {
        return Err(SolverError::Anchor(format!(
            "R(0) differs from kappa on {}⊗{}",
            v.label, w.label
        )));
    }
    Ok(SpectralOperator::new(r, Var::W, "R(0) = kappa"))
}

/// Outcome of the crossing check.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub residual: Matrix,
    pub scale: Scalar,
}

impl Crossing {
    pub fn passes(&self) -> bool {
        self.residual.is_zero() && self.scale.is_one()
    }
}

/// Compares `(((R(z)⁻¹)^{t₂})⁻¹)^{t₂}` with `Ad(1⊗D̄⁻¹)(R(p²z))`, extracting
/// the proportionality scalar at the first nonzero entry.
pub fn verify_crossing(
    r: &SpectralOperator,
    dbar: &Matrix,
    p: &Scalar,
) -> Result<Crossing, SolverError> {
    let legs = r.legs();
    if legs.len() != 2 {
        return Err(SolverError::Linalg(LinalgError::LegMismatch(1)));
    }
    let m = r.mat.clone().with_legs(&legs)?;
    let lhs = m
        .inverse()?
        .partial_transpose(1)?
        .inverse()?
        .partial_transpose(1)?;
    let z = Scalar::var(r.var);
    let shifted = r.at(&(&(p * p) * &z))?;
    let id = Matrix::identity(legs[0]);
    let rhs = &(&id.kron(&dbar.inverse()?) * &shifted) * &id.kron(dbar);
    let n = rhs.rows();
    let anchor = (0..n * n)
        .map(|k| (k / n, k % n))
        .find(|&ij| !rhs[ij].is_zero())
        .ok_or_else(|| SolverError::Anchor("right-hand side vanishes".into()))?;
    let scale = &lhs[anchor] / &rhs[anchor];
    let residual = &lhs - &rhs.scale(&scale);
    Ok(Crossing { residual, scale })
}

/// `R₁₂R₁₃R₂₃ − R₂₃R₁₃R₁₂` for finite R-matrices on `V₁⊗V₂⊗V₃`.
pub fn yang_baxter_finite(
    r12: &Matrix,
    r13: &Matrix,
    r23: &Matrix,
    dims: [usize; 3],
) -> Result<Matrix, LinalgError> {
    let a = Matrix::embed(r12, &[0, 1], &dims)?;
    let b = Matrix::embed(r13, &[0, 2], &dims)?;
    let c = Matrix::embed(r23, &[1, 2], &dims)?;
    Ok(&(&(&a * &b) * &c) - &(&(&c * &b) * &a))
}

/// Spectral Yang-Baxter residual with arguments `(y, yz, z)`.
pub fn yang_baxter_spectral(
    r12: &SpectralOperator,
    r13: &SpectralOperator,
    r23: &SpectralOperator,
    dims: [usize; 3],
    y: &Scalar,
    z: &Scalar,
) -> Result<Matrix, SolverError> {
    let yz = y * z;
    Ok(yang_baxter_finite(
        &r12.at(y)?,
        &r13.at(&yz)?,
        &r23.at(z)?,
        dims,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_datum, parse_tau, DatumKind};
    use crate::reps::{dual_rep, DualSide};

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    fn a1() -> crate::cartan::CartanDatum {
        build_datum(DatumKind::A1, &[0]).unwrap().0
    }

    fn eval(two_j: usize) -> Rep {
        let (d, sh) = build_datum(DatumKind::A1Affine, &parse_tau("(0 1)", 2).unwrap()).unwrap();
        Rep::evaluation(&d, &sh.unwrap(), two_j, &Scalar::one()).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let h = Rep::spin(&a1(), 1).unwrap();
        assert_eq!(kappa(&h, &h), Matrix::diag(vec![s("v"), s("1/v"), s("1/v"), s("v")]));
        let t = Rep::trivial(&a1(), None);
        assert!(kappa(&t, &h).is_identity());
        let one = Rep::spin(&a1(), 2).unwrap();
        assert_eq!(
            kappa(&one, &h),
            Matrix::diag(vec![s("q"), s("q^-1"), s("1"), s("1"), s("q^-1"), s("q")])
        );
    }

    #[test]
    fn finite_r_intertwines() {
        let h = Rep::spin(&a1(), 1).unwrap();
        let xi = quasi_r_finite(&h, &h).unwrap();
        assert_eq!(xi[(0, 0)], s("1"));
        let r = r_finite(&h, &h).unwrap();
        assert!(intertwining_residual(&r, &h, &h).unwrap().is_zero());
        let one = Rep::spin(&a1(), 2).unwrap();
        let r = r_finite(&one, &h).unwrap();
        assert!(intertwining_residual(&r, &one, &h).unwrap().is_zero());
    }

    #[test]
    fn finite_yang_baxter() {
        let h = Rep::spin(&a1(), 1).unwrap();
        let r = r_finite(&h, &h).unwrap();
        assert!(yang_baxter_finite(&r, &r, &r, [2, 2, 2]).unwrap().is_zero());
        let one = Rep::spin(&a1(), 2).unwrap();
        let r12 = r_finite(&h, &one).unwrap();
        let r13 = r_finite(&h, &h).unwrap();
        let r23 = r_finite(&one, &h).unwrap();
        assert!(yang_baxter_finite(&r12, &r13, &r23, [2, 3, 2]).unwrap().is_zero());
    }

    #[test]
    fn finite_r_of_left_dual() {
        let h = Rep::spin(&a1(), 1).unwrap();
        let one = Rep::spin(&a1(), 2).unwrap();
        for (v, w) in [(&h, &h), (&h, &one), (&one, &h)] {
            let r = r_finite(v, w).unwrap();
            let lhs = r_finite(v, &dual_rep(w, DualSide::Left)).unwrap();
            let rhs = r.inverse().unwrap().partial_transpose(1).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn finite_cabling() {
        let h = Rep::spin(&a1(), 1).unwrap();
        let hh = tensor_rep(&h, &h, None).unwrap();
        let big = r_finite(&hh, &h).unwrap();
        let r = r_finite(&h, &h).unwrap();
        let dims = [2, 2, 2];
        let cab = &Matrix::embed(&r, &[0, 2], &dims).unwrap() * &Matrix::embed(&r, &[1, 2], &dims).unwrap();
        assert_eq!(big, cab);
    }

    #[test]
    fn six_vertex() {
        let v = eval(1);
        let r = spectral_r(&v, &v).unwrap();
        assert_eq!(r.mat.nonzero_count(), 6);
        assert_eq!(r.mat[(0, 0)], r.mat[(3, 3)]);
        assert_eq!(r.mat[(1, 1)], r.mat[(2, 2)]);
        assert_eq!(r.mat[(1, 2)], r.mat[(2, 1)]);
        assert_eq!(
            r.at(&Scalar::zero()).unwrap(),
            Matrix::diag(vec![s("v"), s("1/v"), s("1/v"), s("v")])
        );
        let y = yang_baxter_spectral(&r, &r, &r, [2, 2, 2], &s("y"), &s("z")).unwrap();
        assert!(y.is_zero());
    }

    #[test]
    fn crossing_detector() {
        let id = SpectralOperator::new(Matrix::identity_legs(&[2, 2]), Var::W, "id");
        let c = verify_crossing(&id, &Matrix::identity(2), &s("q^-1")).unwrap();
        assert!(c.passes());
        let v = eval(1);
        let r = spectral_r(&v, &v).unwrap();
        let mut bad = r.clone();
        bad.mat[(1, 2)] = bad.mat[(1, 2)].clone() * Scalar::from_int(2);
        let c = verify_crossing(&bad, &Matrix::identity(2), &s("q^-1")).unwrap();
        assert!(!c.residual.is_zero());
    }
}
