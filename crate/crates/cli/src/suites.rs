//! The check catalogue. Each check builds its own inputs from the job
//! configuration, so checks are independent and can run on any thread.

use reflekt_core::cartan::{build_datum, CartanDatum, DatumKind, GradingShift};
use reflekt_core::kmatrix::{
    dual_k, quasi_k_finite, quasi_k_residual, solve_spectral_k, verify_dual_reflection,
    verify_reflection, ReflectionData, ReflectionMode,
};
use reflekt_core::qsp::{coideal_action, coideal_defects, twist_identification, SatakeDatum};
use reflekt_core::reps::{spin_label, Rep};
use reflekt_core::rmatrix::{
    r_finite, spectral_r, verify_crossing, yang_baxter_finite, yang_baxter_spectral,
    SpectralOperator,
};
use reflekt_core::scalar::specialize::Specializer;
use reflekt_core::transfer::{
    build_transfer, commutator_check, finite_transfer, hamiltonian, nearest_neighbour_structure,
    self_commutator, Boundary, FiniteVariant,
};
use reflekt_core::{Matrix, Scalar, Var};

use crate::config::JobConfig;
use crate::report::Outcome;

pub type BoxError = Box<dyn std::error::Error + Send + Sync>;
type CheckFn = Box<dyn Fn(&JobConfig) -> Result<Outcome, BoxError> + Send + Sync>;

pub struct Check {
    pub name: String,
    pub run: CheckFn,
}

fn check(name: &str, f: impl Fn(&JobConfig) -> Result<Outcome, BoxError> + Send + Sync + 'static) -> Check {
    Check {
        name: name.into(),
        run: Box::new(f),
    }
}

pub const VERIFY_SUITES: &[&str] = &["re", "dual-re", "crossing", "ybe", "quasi-k", "coideal"];

/// Draws for chains too long for a symbolic commutator.
const DRAWS: usize = 5;
const SYMBOLIC_SITES: usize = 2;

fn affine(cfg: &JobConfig) -> Result<(CartanDatum, GradingShift), BoxError> {
    if cfg.model != DatumKind::A1Affine {
        return Err("this check needs --model a1-affine".into());
    }
    let (d, sh) = build_datum(cfg.model, &cfg.tau)?;
    Ok((d, sh.ok_or("affine datum without grading shift")?))
}

fn finite(cfg: &JobConfig) -> Result<CartanDatum, BoxError> {
    if cfg.model != DatumKind::A1 {
        return Err("this check needs --model a1".into());
    }
    Ok(build_datum(cfg.model, &cfg.tau)?.0)
}

fn module(cfg: &JobConfig, two_j: usize) -> Result<Rep, BoxError> {
    Ok(match cfg.model {
        DatumKind::A1 => Rep::spin(&finite(cfg)?, two_j)?,
        DatumKind::A1Affine => {
            let (d, sh) = affine(cfg)?;
            Rep::evaluation(&d, &sh, two_j, &Scalar::one())?
        }
    })
}

fn datum(cfg: &JobConfig) -> Result<CartanDatum, BoxError> {
    Ok(build_datum(cfg.model, &cfg.tau)?.0)
}

fn bind(cfg: &JobConfig, m: &Matrix) -> Result<Matrix, BoxError> {
    if cfg.bindings.is_empty() {
        return Ok(m.clone());
    }
    let out = m.substitute(&cfg.bindings)?;
    Ok(match m.legs() {
        Some(l) => out.with_legs(l)?,
        None => out,
    })
}

fn bind_op(cfg: &JobConfig, op: SpectralOperator) -> Result<SpectralOperator, BoxError> {
    Ok(SpectralOperator {
        mat: bind(cfg, &op.mat)?,
        ..op
    })
}

fn bind_scalar(cfg: &JobConfig, x: &Scalar) -> Result<Scalar, BoxError> {
    Ok(x.substitute(&cfg.bindings)?)
}

/// A structural condition as a one-entry residual: zero when it holds.
fn flag(holds: bool) -> Matrix {
    Matrix::from_ints(&[&[if holds { 0 } else { 1 }]])
}

fn spectral_inputs(cfg: &JobConfig) -> Result<(Rep, SpectralOperator, SpectralOperator), BoxError> {
    let (d, _) = affine(cfg)?;
    let sat = SatakeDatum::symbolic(&d)?;
    let v = module(cfg, cfg.two_j)?;
    let k = bind_op(cfg, solve_spectral_k(&v, &sat)?)?;
    let r = bind_op(cfg, spectral_r(&v, &v)?)?;
    Ok((v, k, r))
}

fn reflection(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let (v, k, r) = spectral_inputs(cfg)?;
    let id = Matrix::identity(v.dim());
    let data = ReflectionData { kv: &k, kw: &k, rvw: &r, rwv: &r, gv: &id, gw: &id };
    let res = verify_reflection(&data, ReflectionMode::Untwisted)?;
    Ok(Outcome::default()
        .input("module", &v.label)
        .input("normalization", &k.anchor)
        .residual(res)
        .derive("K(z)", &k.mat))
}

fn dual_reflection(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let (_, sh) = affine(cfg)?;
    let (v, k, r) = spectral_inputs(cfg)?;
    let id = Matrix::identity(v.dim());
    let p = bind_scalar(cfg, &sh.p)?;
    let kt = dual_k(&k, &id, &p)?;
    let res = verify_dual_reflection(&kt, &kt, &r, &r, &id, &id, &p)?;
    // Detector soundness: the unshifted dual must break the equation.
    let kt1 = dual_k(&k, &id, &Scalar::one())?;
    let sab = verify_dual_reflection(&kt1, &kt1, &r, &r, &id, &id, &p)?;
    Ok(Outcome::default()
        .input("module", &v.label)
        .input("p", &p)
        .residual(res)
        .residual(flag(!sab.is_zero()))
        .note(format!(
            "sabotage with p = 1: {} nonzero residual entries",
            sab.nonzero_count()
        ))
        .derive("Kdual(z)", &kt.mat))
}

fn crossing(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let (_, sh) = affine(cfg)?;
    let v = module(cfg, cfg.two_j)?;
    let r = bind_op(cfg, spectral_r(&v, &v)?)?;
    let p = bind_scalar(cfg, &sh.p)?;
    let c = verify_crossing(&r, &Matrix::identity(v.dim()), &p)?;
    let off = &c.scale - &Scalar::one();
    let mut o = Outcome::default()
        .input("module", &v.label)
        .input("p", &p)
        .input("dbar", "identity")
        .residual(c.residual)
        .residual(Matrix::diag(vec![off]));
    o.scale = Some(c.scale);
    Ok(o)
}

fn ybe(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let v = module(cfg, cfg.two_j)?;
    let n = v.dim();
    let o = Outcome::default().input("module", &v.label);
    match cfg.model {
        DatumKind::A1 => {
            let r = bind(cfg, &r_finite(&v, &v)?)?;
            let res = yang_baxter_finite(&r, &r, &r, [n, n, n])?;
            Ok(o.residual(res).derive("R", &r))
        }
        DatumKind::A1Affine => {
            let r = bind_op(cfg, spectral_r(&v, &v)?)?;
            let (y, z) = (Scalar::var(Var::Y), Scalar::var(Var::Z));
            let res = yang_baxter_spectral(&r, &r, &r, [n, n, n], &y, &z)?;
            Ok(o.input("normalization", &r.anchor).residual(res).derive("R(w)", &r.mat))
        }
    }
}

fn quasi_k(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let d = finite(cfg)?;
    let sat = SatakeDatum::symbolic(&d)?;
    let v = module(cfg, cfg.two_j)?;
    let u = quasi_k_finite(&v, &sat)?;
    let res = bind(cfg, &quasi_k_residual(&u, &v, &sat)?)?;
    let unit = (0..v.dim()).all(|i| u[(i, i)].is_one());
    Ok(Outcome::default()
        .input("module", &v.label)
        .residual(res)
        .residual(flag(unit))
        .derive("Upsilon", &bind(cfg, &u)?))
}

fn coideal(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let sat = SatakeDatum::symbolic(&datum(cfg)?)?;
    let v = module(cfg, cfg.two_j)?;
    let defects = coideal_defects(&sat, &v, &v)?;
    let names = sat.generator_names(&v);
    let col = Matrix::column(
        names
            .iter()
            .map(|g| Scalar::from_int(defects.contains(g) as i64))
            .collect(),
    );
    let mut o = Outcome::default()
        .input("module", format!("{0} (x) {0}", v.label))
        .input("generators", names.join(" "))
        .residual(col);
    for d in defects {
        o = o.note(format!("{d} leaves the coideal span"));
    }
    Ok(o)
}

fn kmatrix(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let v = module(cfg, cfg.two_j)?;
    let sat = SatakeDatum::symbolic(&datum(cfg)?)?;
    let o = Outcome::default().input("module", &v.label);
    match cfg.model {
        DatumKind::A1 => {
            let u = quasi_k_finite(&v, &sat)?;
            let res = quasi_k_residual(&u, &v, &sat)?;
            Ok(o.residual(bind(cfg, &res)?).derive("Upsilon", &bind(cfg, &u)?))
        }
        DatumKind::A1Affine => {
            let k = solve_spectral_k(&v, &sat)?;
            let z = Scalar::var(Var::Z);
            let g = twist_identification(&sat, &v)?.g;
            let ginv = g.inverse()?;
            let at_z = coideal_action(&sat, &v.shifted(&z))?;
            let at_inv = coideal_action(&sat, &v.shifted(&z.recip()?))?;
            let mut o = o.input("normalization", &k.anchor);
            for ((_, x), (_, y)) in at_z.iter().zip(&at_inv) {
                let r = &(&k.mat * x) - &(&(&(&g * y) * &ginv) * &k.mat);
                o = o.residual(bind(cfg, &r)?);
            }
            Ok(o.derive("K(z)", &bind(cfg, &k.mat)?))
        }
    }
}

fn boundary(cfg: &JobConfig, extra: Vec<(Var, Scalar)>) -> Result<Boundary, BoxError> {
    let (d, sh) = affine(cfg)?;
    let b = Boundary::quasi_split(&sh, &d)?;
    let mut binds = cfg.bindings.clone();
    binds.extend(extra);
    Ok(if binds.is_empty() { b } else { b.specialized(binds) })
}

fn transfer_symbolic(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let b = boundary(cfg, vec![])?;
    let v = module(cfg, cfg.two_j)?;
    let w = module(cfg, cfg.aux_two_j)?;
    let t = build_transfer(&vec![v.clone(); cfg.sites], &w, &b)?;
    let c = self_commutator(&t)?;
    Ok(Outcome::default()
        .input("chain", format!("{} x {}", cfg.sites, v.label))
        .input("auxiliary", &w.label)
        .residual(c)
        .derive("t(z)", &t.mat))
}

fn transfer_draw(cfg: &JobConfig, draw: Vec<(Var, Scalar)>) -> Result<Outcome, BoxError> {
    let point = draw
        .iter()
        .map(|(v, x)| format!("{}={x}", v.name()))
        .collect::<Vec<_>>()
        .join(",");
    let b = boundary(cfg, draw)?;
    let v = module(cfg, cfg.two_j)?;
    let w = module(cfg, cfg.aux_two_j)?;
    let t = build_transfer(&vec![v.clone(); cfg.sites], &w, &b)?;
    let ty = t.at(&Scalar::var(Var::Y))?;
    Ok(Outcome::default()
        .input("chain", format!("{} x {}", cfg.sites, v.label))
        .input("auxiliary", &w.label)
        .input("point", point)
        .residual(commutator_check(&ty, &t.mat)?))
}

fn hamiltonian_check(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let b = boundary(cfg, vec![])?;
    let v = module(cfg, cfg.two_j)?;
    let vs = vec![v.clone(); cfg.sites];
    let (h, t) = hamiltonian(&vs, &b)?;
    let nonscalar = h.scalar_value().is_none();
    let nn = nearest_neighbour_structure(&h, &vec![v.dim(); cfg.sites]);
    Ok(Outcome::default()
        .input("chain", format!("{} x {}", cfg.sites, v.label))
        .residual(commutator_check(&h, &t.mat)?)
        .residual(flag(nonscalar))
        .residual(flag(nn))
        .note(format!("nonscalar {nonscalar}, nearest-neighbour {nn}"))
        .derive("H", &h))
}

const PROBES: [usize; 2] = [1, 2];

fn finite_trivial(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let d = finite(cfg)?;
    let sat = SatakeDatum::symbolic(&d)?;
    let v = module(cfg, cfg.two_j)?;
    let mut o = Outcome::default().input("module", &v.label);
    for tj in PROBES {
        let probe = Rep::spin(&d, tj)?;
        let t = bind(cfg, &finite_transfer(&v, &sat, FiniteVariant::DualK, &probe)?)?;
        let c = t[(0, 0)].clone();
        o = o
            .residual(&t - &Matrix::identity(t.rows()).scale(&c))
            .derive(&format!("value on spin {}", spin_label(tj)), &Matrix::diag(vec![c]));
    }
    Ok(o)
}

fn finite_kolb(cfg: &JobConfig) -> Result<Outcome, BoxError> {
    let d = finite(cfg)?;
    let sat = SatakeDatum::symbolic(&d)?;
    let v = module(cfg, cfg.two_j)?;
    let mut o = Outcome::default()
        .input("module", &v.label)
        .note("commutators with every coideal generator on each probe");
    for tj in PROBES {
        let probe = Rep::spin(&d, tj)?;
        let t = finite_transfer(&v, &sat, FiniteVariant::Kolb, &probe)?;
        for (_, b) in coideal_action(&sat, &probe)? {
            o = o.residual(bind(cfg, &t.commutator(&b))?);
        }
        o = o.derive(&format!("element on spin {}", spin_label(tj)), &bind(cfg, &t)?);
    }
    Ok(o)
}

pub fn verify(suite: &str) -> Option<Check> {
    Some(match suite {
        "re" => check("re", reflection),
        "dual-re" => check("dual-re", dual_reflection),
        "crossing" => check("crossing", crossing),
        "ybe" => check("ybe", ybe),
        "quasi-k" => check("quasi-k", quasi_k),
        "coideal" => check("coideal", coideal),
        _ => return None,
    })
}

pub fn kmatrix_checks() -> Vec<Check> {
    vec![check("kmatrix", kmatrix)]
}

/// Symbolic commutator for short chains; seeded draws beyond that.
pub fn transfer_checks(cfg: &JobConfig, with_hamiltonian: bool) -> Vec<Check> {
    let mut out = Vec::new();
    if cfg.sites <= SYMBOLIC_SITES {
        out.push(check("transfer", transfer_symbolic));
    } else {
        let mut sp = Specializer::new(cfg.seed);
        let free: Vec<Var> = [Var::V, Var::XI, Var::ETA]
            .into_iter()
            .filter(|v| cfg.bindings.iter().all(|(b, _)| b != v))
            .collect();
        for k in 0..DRAWS {
            let draw = sp.bindings(&free);
            out.push(check(&format!("transfer draw {}", k + 1), move |c| {
                transfer_draw(c, draw.clone())
            }));
        }
    }
    if with_hamiltonian {
        out.push(check("hamiltonian", hamiltonian_check));
    }
    out
}

pub fn hamiltonian_checks() -> Vec<Check> {
    vec![check("hamiltonian", hamiltonian_check)]
}

pub fn finite_checks(variant: &str) -> Option<Vec<Check>> {
    match variant {
        "trivial" => Some(vec![check("finite-trivial", finite_trivial)]),
        "kolb" => Some(vec![check("finite-kolb", finite_kolb)]),
        _ => None,
    }
}
