use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    chern_simons, chern_simons_omega, cs_omega_torsion, macdowell_mansouri, palatini, require_mm, tmg, torsion_term,
    Couplings,
};
use crate::algebra::{invariant_form, killing_form, stabilizer_form, AlgebraDescriptor, BilinearForm};
use crate::calculus::{random_form, Coeff, GridFn, LieForm, Support, TrigPoly};
use crate::cartan::{curvature, CartanConnection};
use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    CsNull,
    CsPerp,
    EinsteinCs,
    TwoCsSum,
    TwoCsDiff,
    QuarticZero,
    MmExpansion,
    CsTmg,
    TwoCsTmg,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::CsNull,
        IdentityId::CsPerp,
        IdentityId::EinsteinCs,
        IdentityId::TwoCsSum,
        IdentityId::TwoCsDiff,
        IdentityId::QuarticZero,
        IdentityId::MmExpansion,
        IdentityId::CsTmg,
        IdentityId::TwoCsTmg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::CsNull => "CS_NULL",
            IdentityId::CsPerp => "CS_PERP",
            IdentityId::EinsteinCs => "EINSTEIN_CS",
            IdentityId::TwoCsSum => "TWO_CS_SUM",
            IdentityId::TwoCsDiff => "TWO_CS_DIFF",
            IdentityId::QuarticZero => "QUARTIC_ZERO",
            IdentityId::MmExpansion => "MM_EXPANSION",
            IdentityId::CsTmg => "CS_TMG",
            IdentityId::TwoCsTmg => "TWO_CS_TMG",
        }
    }

    /// Exact identities have a rational residual that must vanish.
    pub fn is_exact(self) -> bool {
        !matches!(self, IdentityId::CsTmg | IdentityId::TwoCsTmg)
    }

    pub fn torus_dim(self) -> usize {
        match self {
            IdentityId::QuarticZero | IdentityId::MmExpansion => 4,
            _ => 3,
        }
    }

    /// Relative tolerance of the numeric identities.
    pub fn tolerance(self) -> Option<f64> {
        (!self.is_exact()).then_some(1e-8)
    }

    /// Checks that the identity makes sense on `alg`.
    pub fn check_algebra(self, alg: &AlgebraDescriptor) -> Result<()> {
        let ok = match self.torus_dim() {
            3 => alg.spacetime_dim() == 3 && alg.has_full_star(),
            _ => require_mm(alg).is_ok(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{} is not defined on {}", self.as_str(), alg.name())))
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<IdentityId> {
        IdentityId::ALL
            .into_iter()
            .find(|i| i.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

/// Exact rational residual (serialized as a string) or a float.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Residual {
    Exact(Q),
    Numeric(f64),
}

impl Residual {
    pub fn to_f64(self) -> f64 {
        match self {
            Residual::Exact(q) => q.to_f64(),
            Residual::Numeric(x) => x,
        }
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(q) => write!(f, "{q}"),
            Residual::Numeric(x) => write!(f, "{x:e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub algebra: String,
    pub seed: u64,
    pub couplings: Couplings,
    pub residual: Residual,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// Seeded `A = ω + e` with `ω` stabilizer-valued and `e` translation-valued.
pub fn random_connection(
    alg: &Arc<AlgebraDescriptor>,
    seed: u64,
    torus_dim: usize,
    cutoff: u16,
) -> Result<CartanConnection> {
    let s = seed.wrapping_mul(2);
    let w = random_form(s, 1, alg.clone(), torus_dim, cutoff, Support::H)?;
    let e = random_form(s.wrapping_add(1), 1, alg.clone(), torus_dim, cutoff, Support::P)?;
    CartanConnection::new(w, e)
}

/// Coupling choices exercised by default; each list has a degenerate member
/// on every algebra where the identity allows one.
pub fn default_couplings(id: IdentityId, alg: &AlgebraDescriptor) -> Vec<Couplings> {
    let c = |a: (i128, i128), b: (i128, i128)| Couplings::new(Q::new(a.0, a.1), Q::new(b.0, b.1));
    match id {
        IdentityId::CsNull => vec![c((0, 1), (1, 1)), c((0, 1), (-2, 3)), c((0, 1), (0, 1))],
        IdentityId::CsPerp => vec![c((1, 1), (0, 1)), c((3, 2), (0, 1)), c((0, 1), (0, 1))],
        IdentityId::EinsteinCs | IdentityId::TwoCsSum | IdentityId::TwoCsDiff => {
            let degenerate = match alg.lambda_sign() {
                0 => c((1, 1), (0, 1)),
                _ if alg.star_kind().square() > 0 => c((1, 1), (1, 1)),
                _ => c((0, 1), (0, 1)),
            };
            vec![c((2, 1), (3, 1)), c((1, 2), (-1, 1)), degenerate]
        }
        IdentityId::QuarticZero => vec![c((1, 1), (0, 1))],
        IdentityId::MmExpansion => vec![
            Couplings::immirzi(Q::ONE).expect("nonzero"),
            Couplings::immirzi(Q::new(1, 3)).expect("nonzero"),
            c((1, 2), (-3, 2)),
        ],
        IdentityId::CsTmg => {
            vec![Couplings::tmg(Q::int(5)).expect("nonzero"), Couplings::tmg(Q::new(-3, 2)).expect("nonzero")]
        }
        IdentityId::TwoCsTmg => vec![
            Couplings { c0: Q::int(2), c1: Q::ONE, mu: Some(Q::int(5)), gamma: None },
            Couplings { c0: Q::new(-1, 3), c1: Q::ONE, mu: Some(Q::int(3)), gamma: None },
        ],
    }
}

/// `(k0, k1)` in `S_MM^β = topological − ∫tr(k1[e,e]∧⋆R + (k1/4)[e,e]∧⋆[e,e] + k0[e,e]∧R)`.
pub fn mm_expansion_coefficients(c: &Couplings) -> (Q, Q) {
    (c.c0 / Q::int(2), c.c1 / Q::int(2))
}

/// Sampling parameters for [`identity_residual`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityParams {
    /// Frequency cutoff of the random fields; `None` picks 2 on `T³` and 1 on `T⁴`.
    pub cutoff: Option<u16>,
    /// Quadrature grid of the numeric identities.
    pub grid: usize,
}

impl Default for IdentityParams {
    fn default() -> IdentityParams {
        IdentityParams { cutoff: None, grid: 32 }
    }
}

impl IdentityParams {
    pub fn cutoff_for(&self, id: IdentityId) -> u16 {
        self.cutoff.unwrap_or(if id.torus_dim() == 4 { 1 } else { 2 })
    }
}

fn orthogonal(beta: &BilinearForm, alg: &AlgebraDescriptor, same_block: bool) -> bool {
    let d = alg.dim();
    (0..d).all(|a| {
        (0..d).all(|b| {
            let same = alg.is_h_index(a) == alg.is_h_index(b);
            same != same_block || beta.entry(a, b).is_zero()
        })
    })
}

/// Validates the algebra and the coupling constants for `id` without building
/// any fields.
pub fn check_couplings(id: IdentityId, alg: &AlgebraDescriptor, c: &Couplings) -> Result<()> {
    id.check_algebra(alg)?;
    c.validate()?;
    match id {
        IdentityId::CsNull | IdentityId::CsPerp => {
            let beta = invariant_form(alg, c.c0, c.c1)?;
            let null = id == IdentityId::CsNull;
            if !orthogonal(&beta, alg, null) {
                return Err(Error::Precondition(if null {
                    format!(
                        "CS_NULL needs 𝔥⊥𝔥 and 𝔭⊥𝔭 for β; ({}, {}) on {} has a diagonal block",
                        c.c0,
                        c.c1,
                        alg.name()
                    )
                } else {
                    format!("CS_PERP needs 𝔥⊥𝔭 for β; ({}, {}) on {} mixes the blocks", c.c0, c.c1, alg.name())
                }));
            }
        }
        IdentityId::CsTmg | IdentityId::TwoCsTmg => {
            if c.mu.is_none() {
                return Err(Error::Precondition(format!("{id} needs the topological mass μ")));
            }
            if id == IdentityId::TwoCsTmg && (c.c1 != Q::ONE || c.c0.is_zero()) {
                return Err(Error::Precondition("TWO_CS_TMG needs β normalized to (c0, 1) with c0 ≠ 0".into()));
            }
        }
        _ => {}
    }
    Ok(())
}

fn half<C: Coeff>(v: C::Value) -> C::Value {
    C::value_scale(v, Q::new(1, 2))
}

/// `LHS − RHS` of one exact identity.
fn exact_residual(id: IdentityId, conn: &CartanConnection, c: &Couplings) -> Result<Q> {
    let alg = conn.algebra();
    let (w, e) = (conn.omega(), conn.coframe());
    let a = conn.form();
    let at = conn.involute().form();
    match id {
        IdentityId::CsNull
        | IdentityId::CsPerp
        | IdentityId::EinsteinCs
        | IdentityId::TwoCsSum
        | IdentityId::TwoCsDiff => {
            let beta = invariant_form(alg, c.c0, c.c1)?;
            let s = chern_simons(&a, &beta)?;
            Ok(match id {
                IdentityId::CsNull => {
                    let r = curvature(conn)?.r;
                    let rhs =
                        e.beta_integral(&beta, &r)? + Q::new(1, 6) * e.beta_integral(&beta, &e.lie_bracket(e)?)?;
                    s - rhs
                }
                IdentityId::CsPerp => {
                    let rhs = w.beta_integral(&beta, &w.exterior_d()?)?
                        + Q::new(1, 3) * w.beta_integral(&beta, &w.lie_bracket(w)?)?
                        + e.beta_integral(&beta, &e.covariant_d(w)?)?;
                    s - Q::new(1, 2) * rhs
                }
                IdentityId::EinsteinCs => {
                    let rhs = c.c1 * palatini(w, e)? + c.c0 * chern_simons_omega(w)? + c.c0 * torsion_term(w, e)?;
                    s - rhs
                }
                IdentityId::TwoCsSum => {
                    let st = chern_simons(&at, &beta)?;
                    half::<TrigPoly>(s + st) - c.c0 * cs_omega_torsion(w, e)?
                }
                _ => {
                    let st = chern_simons(&at, &beta)?;
                    half::<TrigPoly>(s - st) - c.c1 * palatini(w, e)?
                }
            })
        }
        IdentityId::QuarticZero => {
            let ee = e.lie_bracket(e)?;
            ee.beta_integral(&killing_form(alg), &ee)
        }
        IdentityId::MmExpansion => {
            let beta = stabilizer_form(alg, c.c0, c.c1)?;
            let lhs = macdowell_mansouri(conn, &beta)?;
            let k = stabilizer_form(alg, Q::ONE, Q::ZERO)?;
            let st = stabilizer_form(alg, Q::ZERO, Q::ONE)?;
            let r = curvature(conn)?.r;
            let ee = e.lie_bracket(e)?;
            let (k0, k1) = mm_expansion_coefficients(c);
            let topological = -Q::new(1, 2) * (c.c0 * r.beta_integral(&k, &r)? + c.c1 * r.beta_integral(&st, &r)?);
            let rhs = topological
                - (k1 * ee.beta_integral(&st, &r)?
                    + k1 / Q::int(4) * ee.beta_integral(&st, &ee)?
                    + k0 * ee.beta_integral(&k, &r)?);
            Ok(lhs - rhs)
        }
        IdentityId::CsTmg | IdentityId::TwoCsTmg => unreachable!("numeric identity"),
    }
}

/// Relative residual of a numeric identity.
fn numeric_residual(id: IdentityId, e: &LieForm<TrigPoly>, c: &Couplings, grid: usize) -> Result<f64> {
    let mu = c.mu.expect("checked by check_couplings");
    let alg = e.algebra();
    let (w, es) = tmg::levi_civita_pair(e, grid)?;
    let lhs = tmg::tmg_value(&w, &es, mu)?;
    let a = w.add(&es)?;
    let rhs = match id {
        IdentityId::CsTmg => chern_simons::<GridFn>(&a, &invariant_form(alg, c.c0, c.c1)?)?,
        _ => {
            let beta = invariant_form(alg, c.c0, Q::ONE)?;
            let (x, y) = two_cs_tmg_coefficients(mu, c.c0);
            let at = w.sub(&es)?;
            x.to_f64() * chern_simons::<GridFn>(&a, &beta)? + y.to_f64() * chern_simons::<GridFn>(&at, &beta)?
        }
    };
    Ok((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE))
}

/// `(−½(1 − 1/(μc0)), ½(1 + 1/(μc0)))`.
pub fn two_cs_tmg_coefficients(mu: Q, c0: Q) -> (Q, Q) {
    let t = (mu * c0).recip();
    (-Q::new(1, 2) * (Q::ONE - t), Q::new(1, 2) * (Q::ONE + t))
}

/// Builds seeded fields, evaluates both sides of `id` and reports the residual.
pub fn identity_residual(
    id: IdentityId,
    alg: &Arc<AlgebraDescriptor>,
    seed: u64,
    couplings: &Couplings,
    params: &IdentityParams,
) -> Result<IdentityReport> {
    check_couplings(id, alg, couplings)?;
    let cutoff = params.cutoff_for(id);
    let mut digest = format!("{id}:{}:seed={seed}:{}", alg.name(), couplings.digest());
    let residual = if id.is_exact() {
        digest += &format!(":K={cutoff}");
        let conn = random_connection(alg, seed, id.torus_dim(), cutoff)?;
        Residual::Exact(exact_residual(id, &conn, couplings)?)
    } else {
        digest += &format!(":grid={}", params.grid);
        let e = tmg::perturbed_identity_coframe(alg.clone(), seed)?;
        Residual::Numeric(numeric_residual(id, &e, couplings, params.grid)?)
    };
    let tolerance = id.tolerance();
    let passed = match residual {
        Residual::Exact(q) => q.is_zero(),
        Residual::Numeric(x) => x <= tolerance.unwrap_or(0.0),
    };
    Ok(IdentityReport {
        identity_id: id,
        algebra: alg.name().to_string(),
        seed,
        couplings: *couplings,
        residual,
        tolerance,
        passed,
        inputs_digest: digest,
        wall_time_ms: None,
    })
}

/// Convenience for tests: residual of an exact identity on explicit fields.
pub fn exact_identity_on(id: IdentityId, conn: &CartanConnection<TrigPoly>, couplings: &Couplings) -> Result<Q> {
    if !id.is_exact() {
        return Err(Error::Precondition(format!("{id} is a numeric identity")));
    }
    check_couplings(id, conn.algebra(), couplings)?;
    exact_residual(id, conn, couplings)
}

/// Relative residual of a numeric identity on an explicit coframe, with the
/// torsion-free connection sampled on `grid³`.
pub fn numeric_identity_on(id: IdentityId, e: &LieForm<TrigPoly>, couplings: &Couplings, grid: usize) -> Result<f64> {
    if id.is_exact() {
        return Err(Error::Precondition(format!("{id} is an exact identity")));
    }
    check_couplings(id, e.algebra(), couplings)?;
    numeric_residual(id, e, couplings, grid)
}
