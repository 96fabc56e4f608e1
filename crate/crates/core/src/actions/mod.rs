//! Gravity actions built from Cartan connections: Chern–Simons with a general
//! invariant form, Palatini, the ω-Chern–Simons-plus-torsion action,
//! topologically massive gravity and the generalized MacDowell–Mansouri
//! action, plus checkable identities between them.
//!
//! All integrals are torus means, so values are multiples of `(2π)ⁿ`.
//!
//! Conventions (frozen, asserted by the test suite):
//! - `tr` is the Killing gram `K` and `tr(X ⋆ Y)` is the star gram `S`, so
//!   `β = c0·K + c1·S`.
//! - `S_CS(ω) = ½∫tr(ω∧dω + ⅓ ω∧[ω,ω])`.
//! - the torsion term carries `½`: `½∫tr(e ∧ d_ω e)`.
//! - `S_TMG = S_CS^β(A(e))` holds for `(c0, c1) = (1/μ, −1)`.
//! - MacDowell–Mansouri with Immirzi parameter `γ` is `(c0, c1) = (2/γ, 2)`.

mod identities;
mod tmg;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{invariant_form, killing_form, stabilizer_form, AlgebraDescriptor, BilinearForm};
use crate::calculus::{Coeff, LieForm, TrigPoly};
use crate::cartan::{curvature, CartanConnection};
use crate::error::{Error, Result};
use crate::rational::Q;

pub use identities::{
    check_couplings, default_couplings, exact_identity_on, identity_residual, mm_expansion_coefficients,
    numeric_identity_on, random_connection, two_cs_tmg_coefficients, IdentityId, IdentityParams, IdentityReport,
    Residual,
};
pub use tmg::{
    levi_civita_connection, perturbed_identity_coframe, tmg_action, tmg_action_refined, tmg_value, torsion_residual,
    TmgRefinement,
};

/// Coupling constants of the action family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Couplings {
    pub c0: Q,
    pub c1: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Q>,
}

impl Couplings {
    pub fn new(c0: Q, c1: Q) -> Couplings {
        Couplings { c0, c1, mu: None, gamma: None }
    }

    /// `β = tr(X(1/μ − ⋆)Y)`, the form reproducing topologically massive gravity.
    pub fn tmg(mu: Q) -> Result<Couplings> {
        if mu.is_zero() {
            return Err(Error::Precondition("μ must be nonzero".into()));
        }
        Ok(Couplings { c0: mu.recip(), c1: -Q::ONE, mu: Some(mu), gamma: None })
    }

    /// `(c0, c1) = (2/γ, 2)`.
    pub fn immirzi(gamma: Q) -> Result<Couplings> {
        if gamma.is_zero() {
            return Err(Error::Precondition("γ must be nonzero".into()));
        }
        Ok(Couplings { c0: Q::int(2) / gamma, c1: Q::int(2), mu: None, gamma: Some(gamma) })
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_some_and(|m| m.is_zero()) {
            return Err(Error::Precondition("μ must be nonzero".into()));
        }
        if self.gamma.is_some_and(|g| g.is_zero()) {
            return Err(Error::Precondition("γ must be nonzero".into()));
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        let mut s = format!("c0={},c1={}", self.c0, self.c1);
        if let Some(m) = self.mu {
            s += &format!(",mu={m}");
        }
        if let Some(g) = self.gamma {
            s += &format!(",gamma={g}");
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// Value of an action functional in units of `(2π)ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionValue {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_value: Option<Q>,
    pub numeric_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_grid: Option<usize>,
    pub torus_dim: usize,
    /// Set when the bilinear form used is degenerate.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate_form: bool,
}

impl ActionValue {
    pub fn exact(v: Q, torus_dim: usize) -> ActionValue {
        ActionValue {
            mode: Mode::Exact,
            exact_value: Some(v),
            numeric_value: v.to_f64(),
            quadrature_grid: None,
            torus_dim,
            degenerate_form: false,
        }
    }

    pub fn numeric(v: f64, grid: usize, torus_dim: usize) -> ActionValue {
        ActionValue {
            mode: Mode::Numeric,
            exact_value: None,
            numeric_value: v,
            quadrature_grid: Some(grid),
            torus_dim,
            degenerate_form: false,
        }
    }

    fn flagged(mut self, degenerate: bool) -> ActionValue {
        self.degenerate_form = degenerate;
        self
    }
}

impl fmt::Display for ActionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.mode, self.exact_value) {
            (Mode::Exact, Some(q)) if q.is_zero() => write!(f, "0"),
            (Mode::Exact, Some(q)) => write!(f, "{q} × (2π)^{}", self.torus_dim),
            _ => {
                write!(f, "{:.15e} × (2π)^{}", self.numeric_value, self.torus_dim)?;
                if let Some(g) = self.quadrature_grid {
                    write!(f, " (grid {g}^{})", self.torus_dim)?;
                }
                Ok(())
            }
        }
    }
}

fn require_torus<C: Coeff>(a: &LieForm<C>, n: usize, what: &str) -> Result<()> {
    if a.torus_dim() != n {
        return Err(Error::DimensionMismatch(format!("{what} needs T^{n}, got T^{}", a.torus_dim())));
    }
    Ok(())
}

fn require_one_form<C: Coeff>(a: &LieForm<C>) -> Result<()> {
    if a.degree() != 1 {
        return Err(Error::DimensionMismatch(format!("expected a 1-form, got degree {}", a.degree())));
    }
    Ok(())
}

fn lin<C: Coeff>(terms: &[(Q, C::Value)]) -> C::Value {
    terms.iter().fold(C::value_zero(), |acc, &(s, v)| C::value_add(acc, C::value_scale(v, s)))
}

/// `½∫β(A∧dA) + ⅙∫β(A∧[A,A])` on `T³`.
pub fn chern_simons<C: Coeff>(a: &LieForm<C>, beta: &BilinearForm) -> Result<C::Value> {
    require_torus(a, 3, "Chern–Simons")?;
    require_one_form(a)?;
    let da = a.exterior_d()?;
    let aa = a.lie_bracket(a)?;
    Ok(lin::<C>(&[(Q::new(1, 2), a.beta_integral(beta, &da)?), (Q::new(1, 6), a.beta_integral(beta, &aa)?)]))
}

/// `∫tr(e∧⋆R + ⅙ e∧⋆[e,e])`, with `tr(X⋆Y)` the star gram.
pub fn palatini<C: Coeff>(omega: &LieForm<C>, e: &LieForm<C>) -> Result<C::Value> {
    require_torus(omega, 3, "Palatini")?;
    let conn = CartanConnection::new(omega.clone(), e.clone())?;
    let s = invariant_form(conn.algebra(), Q::ZERO, Q::ONE)?;
    let r = curvature(&conn)?.r;
    let ee = e.lie_bracket(e)?;
    Ok(lin::<C>(&[(Q::ONE, e.beta_integral(&s, &r)?), (Q::new(1, 6), e.beta_integral(&s, &ee)?)]))
}

/// `S_CS(ω) = ½∫tr(ω∧dω + ⅓ ω∧[ω,ω])`.
pub fn chern_simons_omega<C: Coeff>(omega: &LieForm<C>) -> Result<C::Value> {
    chern_simons(omega, &killing_form(omega.algebra()))
}

/// `½∫tr(e ∧ d_ω e)`.
pub fn torsion_term<C: Coeff>(omega: &LieForm<C>, e: &LieForm<C>) -> Result<C::Value> {
    require_torus(e, 3, "torsion term")?;
    let k = killing_form(e.algebra());
    Ok(C::value_scale(e.beta_integral(&k, &e.covariant_d(omega)?)?, Q::new(1, 2)))
}

/// `S_CS(ω) + ½∫tr(e ∧ d_ω e)`.
pub fn cs_omega_torsion<C: Coeff>(omega: &LieForm<C>, e: &LieForm<C>) -> Result<C::Value> {
    CartanConnection::new(omega.clone(), e.clone())?;
    Ok(C::value_add(chern_simons_omega(omega)?, torsion_term(omega, e)?))
}

/// `−½∫β(F_𝔥 ∧ F_𝔥)` with `β` on the stabilizer of a ten-dimensional algebra.
pub fn macdowell_mansouri<C: Coeff>(conn: &CartanConnection<C>, beta: &BilinearForm) -> Result<C::Value> {
    require_mm(conn.algebra())?;
    require_torus(conn.omega(), 4, "MacDowell–Mansouri")?;
    let fh = curvature(conn)?.f_h;
    Ok(C::value_scale(fh.beta_integral(beta, &fh)?, Q::new(-1, 2)))
}

pub(crate) fn require_mm(alg: &AlgebraDescriptor) -> Result<()> {
    if alg.spacetime_dim() != 4 || alg.lambda_sign() == 0 {
        return Err(Error::Precondition(format!("MacDowell–Mansouri needs so41 or so32, got {}", alg.name())));
    }
    Ok(())
}

/// `(∫tr(R∧R), ∫tr(R∧⋆R))` over the stabilizer of a four-dimensional model.
pub fn topological_terms<C: Coeff>(omega: &LieForm<C>) -> Result<(C::Value, C::Value)> {
    let alg = omega.algebra();
    require_mm(alg)?;
    require_torus(omega, 4, "topological terms")?;
    require_one_form(omega)?;
    if !omega.is_h_valued() {
        return Err(Error::Precondition("ω must be stabilizer-valued".into()));
    }
    let r = omega.exterior_d()?.add(&omega.lie_bracket(omega)?.scale(Q::new(1, 2)))?;
    let k = stabilizer_form(alg, Q::ONE, Q::ZERO)?;
    let s = stabilizer_form(alg, Q::ZERO, Q::ONE)?;
    Ok((r.beta_integral(&k, &r)?, r.beta_integral(&s, &r)?))
}

fn beta_3d(alg: &Arc<AlgebraDescriptor>, c: &Couplings) -> Result<BilinearForm> {
    c.validate()?;
    invariant_form(alg, c.c0, c.c1)
}

/// `S_CS^β(A)` with `β = c0·tr + c1·tr(·⋆·)`, exact.
pub fn cs_action(a: &LieForm<TrigPoly>, beta: &BilinearForm) -> Result<ActionValue> {
    Ok(ActionValue::exact(chern_simons(a, beta)?, 3).flagged(beta.degenerate))
}

/// [`cs_action`] from coupling constants.
pub fn cs_action_with(a: &LieForm<TrigPoly>, couplings: &Couplings) -> Result<ActionValue> {
    cs_action(a, &beta_3d(a.algebra(), couplings)?)
}

pub fn palatini_action(omega: &LieForm<TrigPoly>, e: &LieForm<TrigPoly>) -> Result<ActionValue> {
    Ok(ActionValue::exact(palatini(omega, e)?, 3))
}

pub fn cs_omega_torsion_action(omega: &LieForm<TrigPoly>, e: &LieForm<TrigPoly>) -> Result<ActionValue> {
    Ok(ActionValue::exact(cs_omega_torsion(omega, e)?, 3))
}

/// Generalized MacDowell–Mansouri action, exact.
pub fn mm_action(conn: &CartanConnection<TrigPoly>, couplings: &Couplings) -> Result<ActionValue> {
    couplings.validate()?;
    let beta = stabilizer_form(conn.algebra(), couplings.c0, couplings.c1)?;
    Ok(ActionValue::exact(macdowell_mansouri(conn, &beta)?, 4).flagged(beta.degenerate))
}

/// Directional derivative of `S_CS^β` at `A` along `δA`.
#[derive(Clone, Debug, PartialEq)]
pub struct Variation {
    /// `∫β(δA ∧ F)`.
    pub exact: Q,
    /// `(S(A + hδA) − S(A − hδA)) / 2h`, computed exactly.
    pub central_difference: Q,
    pub step: Q,
}

impl Variation {
    pub fn relative_gap(&self) -> f64 {
        let (x, y) = (self.exact.to_f64(), self.central_difference.to_f64());
        let scale = x.abs().max(y.abs());
        if scale == 0.0 {
            0.0
        } else {
            (x - y).abs() / scale
        }
    }
}

/// Default finite-difference step.
pub fn default_step() -> Q {
    Q::new(1, 10_000)
}

/// `∫β(δA ∧ F)` for any coefficient type.
pub fn cs_directional<C: Coeff>(a: &LieForm<C>, da: &LieForm<C>, beta: &BilinearForm) -> Result<C::Value> {
    require_one_form(da)?;
    let f = a.exterior_d()?.add(&a.lie_bracket(a)?.scale(Q::new(1, 2)))?;
    da.beta_integral(beta, &f)
}

pub fn cs_variation(a: &LieForm<TrigPoly>, da: &LieForm<TrigPoly>, beta: &BilinearForm) -> Result<Variation> {
    cs_variation_with_step(a, da, beta, default_step())
}

pub fn cs_variation_with_step(
    a: &LieForm<TrigPoly>,
    da: &LieForm<TrigPoly>,
    beta: &BilinearForm,
    h: Q,
) -> Result<Variation> {
    if h.is_zero() {
        return Err(Error::Precondition("finite-difference step must be nonzero".into()));
    }
    let exact = cs_directional(a, da, beta)?;
    let plus = chern_simons(&a.add(&da.scale(h))?, beta)?;
    let minus = chern_simons(&a.sub(&da.scale(h))?, beta)?;
    Ok(Variation { exact, central_difference: (plus - minus) / (Q::int(2) * h), step: h })
}

/// Central differences of both topological integrals along `δω`, evaluated on
/// a `grid⁴` quadrature.
pub fn topological_variation_check(
    omega: &LieForm<TrigPoly>,
    delta: &LieForm<TrigPoly>,
    h: f64,
    grid: usize,
) -> Result<(f64, f64)> {
    if h == 0.0 {
        return Err(Error::Precondition("finite-difference step must be nonzero".into()));
    }
    let g = crate::calculus::Grid::new(4, grid);
    let w = omega.map_coeffs(g, |c| c.sample(g));
    let dw = delta.map_coeffs(g, |c| c.sample(g));
    let shifted = |s: f64| -> Result<(f64, f64)> {
        let mut x = w.clone();
        for (dst, src) in x.components_mut().iter_mut().zip(dw.components()) {
            for (v, d) in dst.values_mut().iter_mut().zip(src.values()) {
                *v += s * d;
            }
        }
        topological_terms(&x)
    };
    let (p, m) = (shifted(h)?, shifted(-h)?);
    Ok(((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h)))
}
