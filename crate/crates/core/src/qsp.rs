//! Quantum symmetric pair data: Satake parameters, coideal generator
//! matrices, and the module-level realization of the twist ψ.

use crate::cartan::{CartanDatum, DatumKind};
use crate::linalg::{LinalgError, Matrix};
use crate::reps::{tensor_rep, Gen, Rep, RepError};
use crate::scalar::{Scalar, Var};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QspError {
    #[error("invalid Satake datum: {0}")]
    InvalidSatake(String),
    #[error("no twist identification for {0}")]
    UnsupportedTwist(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How `V^ψ ≅ V` is realized on modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistKind {
    /// Affine quasi-split: `G_V = Id` together with `z → 1/z`.
    Spectral,
    /// Finite type with `τ = id`: `G_V` solved from the explicit ψ-action.
    Semistandard,
}

#[derive(Debug, Clone)]
pub struct SatakeDatum {
    pub datum: CartanDatum,
    pub x: Vec<usize>,
    pub tau: Vec<usize>,
    pub gamma: Vec<Scalar>,
    pub sigma: Vec<Scalar>,
    pub twist: TwistKind,
}

/// `G_V` with the rule that ψ also inverts the spectral argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistIdentification {
    pub g: Matrix,
    pub inverts_argument: bool,
}

impl SatakeDatum {
    pub fn new(
        datum: &CartanDatum,
        x: Vec<usize>,
        gamma: Vec<Scalar>,
        sigma: Vec<Scalar>,
        twist: TwistKind,
    ) -> Result<SatakeDatum, QspError> {
        let s = SatakeDatum {
            datum: datum.clone(),
            x,
            tau: datum.tau.clone(),
            gamma,
            sigma,
            twist,
        };
        s.validate()?;
        Ok(s)
    }

    /// Affine quasi-split datum with `τ = (0 1)`, `γ = (ξ⁻¹, ξ)`, `σ = 0`.
    pub fn quasi_split_affine(datum: &CartanDatum, xi: &Scalar) -> Result<SatakeDatum, QspError> {
        if datum.kind != DatumKind::A1Affine {
            return Err(QspError::InvalidSatake("quasi-split datum needs affine A1".into()));
        }
        let xinv = xi
            .recip()
            .map_err(|_| QspError::InvalidSatake("xi = 0".into()))?;
        SatakeDatum::new(
            datum,
            vec![],
            vec![xinv, xi.clone()],
            vec![Scalar::zero(), Scalar::zero()],
            TwistKind::Spectral,
        )
    }

    /// Finite A1 with `τ = id`, `X = ∅`.
    pub fn finite_a1(datum: &CartanDatum, gamma: &Scalar, sigma: &Scalar) -> Result<SatakeDatum, QspError> {
        if datum.kind != DatumKind::A1 {
            return Err(QspError::InvalidSatake("finite datum needs A1".into()));
        }
        SatakeDatum::new(
            datum,
            vec![],
            vec![gamma.clone()],
            vec![sigma.clone()],
            TwistKind::Semistandard,
        )
    }

    /// The default symbolic data: `ξ` for the affine case, `γ, σ` for A1.
    pub fn symbolic(datum: &CartanDatum) -> Result<SatakeDatum, QspError> {
        match datum.kind {
            DatumKind::A1Affine => SatakeDatum::quasi_split_affine(datum, &Scalar::var(Var::XI)),
            DatumKind::A1 => SatakeDatum::finite_a1(
                datum,
                &Scalar::var(Var::GAMMA),
                &Scalar::var(Var::SIGMA),
            ),
        }
    }

    pub fn validate(&self) -> Result<(), QspError> {
        let n = self.datum.nodes();
        let bad = |m: &str| Err(QspError::InvalidSatake(m.to_string()));
        if self.gamma.len() != n || self.sigma.len() != n || self.tau.len() != n {
            return bad("parameter length differs from the number of nodes");
        }
        if !self.x.is_empty() {
            return bad("only X = ∅ is supported");
        }
        for i in 0..n {
            if self.gamma[i].is_zero() {
                return bad("gamma must be invertible");
            }
            if self.tau[i] != i && !self.sigma[i].is_zero() {
                return bad("sigma must vanish off the fixed points of tau");
            }
        }
        if self.x.iter().any(|i| !self.x.contains(&self.tau[*i])) {
            return bad("X must be tau-stable");
        }
        match (self.twist, self.datum.affine) {
            (TwistKind::Spectral, false) | (TwistKind::Semistandard, true) => {
                bad("twist kind does not match the datum")
            }
            _ => Ok(()),
        }
    }

    /// Coefficient `γ_i q_i^{-a_{iτ(i)}/2}` of `E_{τ(i)}K_i⁻¹` in `B_i`.
    fn e_coefficient(&self, i: usize) -> Scalar {
        let t = self.tau[i];
        let e = -(self.datum.d[i] * self.datum.gcm[i][t]) as i32;
        &self.gamma[i] * &Scalar::v_pow(e)
    }

    /// Number of coideal generators `B_i`.
    pub fn generator_names(&self, v: &Rep) -> Vec<String> {
        coideal_action(self, v)
            .map(|l| l.into_iter().map(|(n, _)| n).collect())
            .unwrap_or_default()
    }
}

/// Matrices of `B_i = F_i − γ_i q_i^{-a_{iτ(i)}/2} E_{τ(i)}K_i⁻¹ + σ_i K_i⁻¹`
/// and of the Cartan part `K_i K_{τ(i)}^{-1}` (`i < τ(i)`) on `V`. A shifted
/// module gives the spectral matrices.
pub fn coideal_action(s: &SatakeDatum, v: &Rep) -> Result<Vec<(String, Matrix)>, QspError> {
    if *v.datum() != s.datum {
        return Err(QspError::Rep(RepError::DatumMismatch));
    }
    let n = s.datum.nodes();
    let affine = s.datum.affine;
    let mut out = Vec::new();
    for i in 0..n {
        let kinv = v.k_inv(i);
        let mut b = v.gen(Gen::F(i)) - &(v.gen(Gen::E(s.tau[i])) * &kinv).scale(&s.e_coefficient(i));
        if !s.sigma[i].is_zero() {
            b = &b + &kinv.scale(&s.sigma[i]);
        }
        let name = if affine { format!("B{i}") } else { "B".to_string() };
        out.push((name, b.with_legs(v.legs())?));
    }
    for i in 0..n {
        let t = s.tau[i];
        if i < t {
            let k = v.gen(Gen::K(i)) * &v.k_inv(t);
            out.push((format!("K{i}K{t}^-1"), k.with_legs(v.legs())?));
        }
    }
    Ok(out)
}

/// `V^ψ` for finite A1 with `τ = id`: `E ↦ −qγ⁻¹FK⁻¹`, `F ↦ −q⁻¹γKE`,
/// `K ↦ K⁻¹`.
pub fn psi_rep(s: &SatakeDatum, v: &Rep) -> Result<Rep, QspError> {
    if s.twist != TwistKind::Semistandard {
        return Err(QspError::UnsupportedTwist(format!(
            "{} (ψ acts on spectral modules by argument inversion)",
            v.label
        )));
    }
    let g = &s.gamma[0];
    let ginv = g.recip().expect("gamma invertible");
    let (e, f, k) = (v.gen(Gen::E(0)), v.gen(Gen::F(0)), v.gen(Gen::K(0)));
    let kinv = v.k_inv(0);
    let mut gens = BTreeMap::new();
    gens.insert(Gen::E(0), (f * &kinv).scale(&-(&Scalar::q() * &ginv)));
    gens.insert(Gen::F(0), (k * e).scale(&-(g * &Scalar::v_pow(-2))));
    gens.insert(Gen::K(0), kinv);
    let weights = v.weights().iter().map(|w| w.neg()).collect();
    let r = Rep::from_parts(&format!("{}^ψ", v.label), v.datum(), gens, weights, vec![0])?;
    Ok(r)
}

/// `G_V` with `G π(a) = π(ψ(a)) G`, normalized at the bottom-left entry.
pub fn twist_identification(s: &SatakeDatum, v: &Rep) -> Result<TwistIdentification, QspError> {
    match s.twist {
        TwistKind::Spectral => Ok(TwistIdentification {
            g: Matrix::identity(v.dim()).with_legs(v.legs())?,
            inverts_argument: true,
        }),
        TwistKind::Semistandard => {
            let vp = psi_rep(s, v)?;
            let pairs: Vec<(Matrix, Matrix)> = v
                .gens()
                .map(|(g, m)| (m.clone(), vp.gen(*g).clone()))
                .collect();
            let n = v.dim();
            let sols = crate::linalg::intertwiner_space(&pairs, n, n, None);
            if sols.len() != 1 {
                return Err(QspError::UnsupportedTwist(format!(
                    "{}: twist space has dimension {}",
                    v.label,
                    sols.len()
                )));
            }
            let g = &sols[0];
            let c = g[(n - 1, 0)].clone();
            if c.is_zero() {
                return Err(QspError::UnsupportedTwist(v.label.clone()));
            }
            let g = g.scale(&c.recip().unwrap()).with_legs(v.legs())?;
            Ok(TwistIdentification {
                g,
                inverts_argument: false,
            })
        }
    }
}

/// Module-level coideal property: every first-leg slice of `Δ(B_i)` on
/// `V ⊗ W` lies in the span of the identity, the generator matrices and
/// the Cartan part with its inverse. Returns the offending generator names.
pub fn coideal_defects(s: &SatakeDatum, v: &Rep, w: &Rep) -> Result<Vec<String>, QspError> {
    let vw = tensor_rep(v, w, None)?;
    let on_v = coideal_action(s, v)?;
    let on_vw = coideal_action(s, &vw)?;
    let (dv, dw) = (v.dim(), w.dim());
    let mut span: Vec<Matrix> = vec![Matrix::identity(dv)];
    for (name, m) in &on_v {
        span.push(m.clone());
        if name.starts_with('K') {
            span.push(m.inverse()?);
        }
    }
    Ok(slice_defects(&span, &on_vw, dv, dw))
}

fn flatten(ms: &[Matrix]) -> Matrix {
    Matrix::from_rows(ms.iter().map(|m| m.entries().to_vec()).collect())
}

fn slice_defects(span: &[Matrix], on_vw: &[(String, Matrix)], dv: usize, dw: usize) -> Vec<String> {
    let base = flatten(span).rank();
    let mut bad = Vec::new();
    for (name, m) in on_vw {
        let escapes = (0..dw * dw).any(|kl| {
            let (k, l) = (kl / dw, kl % dw);
            let slice = Matrix::from_fn(dv, dv, |i, j| m[(i * dw + k, j * dw + l)].clone());
            if slice.is_zero() {
                return false;
            }
            let mut ext = span.to_vec();
            ext.push(slice);
            flatten(&ext).rank() != base
        });
        if escapes {
            bad.push(name.clone());
        }
    }
    bad
}
