//! Cartan connections `A = ω + e` on the torus, modeled on the symmetric
//! algebras of [`crate::algebra`], plus numeric Maurer–Cartan charts and
//! path holonomy.

mod holonomy;
mod maurer_cartan;

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::algebra::AlgebraDescriptor;
use crate::calculus::{Coeff, Grid, GridFn, LieForm, TrigPoly};
use crate::error::{Error, Result};
use crate::rational::Q;

pub use holonomy::{
    group_defect, holonomy, rolling_model, HolonomyResult, MatrixConnection, PathSegment, PathSpec, RollingModel,
};
pub use maurer_cartan::{maurer_cartan_model, max_curvature, ChartParams, ExpChart, FlatnessReport, Perturbed};

/// `A = ω + e` with `ω` stabilizer-valued and `e` translation-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanConnection<C: Coeff = TrigPoly> {
    omega: LieForm<C>,
    coframe: LieForm<C>,
}

/// Curvature of a Cartan connection and its split.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport<C: Coeff = TrigPoly> {
    /// `F = dA + ½[A, A]`.
    pub f: LieForm<C>,
    /// Stabilizer part of `F` (corrected curvature).
    pub f_h: LieForm<C>,
    /// Translation part of `F` (torsion).
    pub f_p: LieForm<C>,
    /// `R = dω + ½[ω, ω]`.
    pub r: LieForm<C>,
}

impl<C: Coeff> CartanConnection<C> {
    pub fn new(omega: LieForm<C>, coframe: LieForm<C>) -> Result<CartanConnection<C>> {
        if omega.degree() != 1 || coframe.degree() != 1 {
            return Err(Error::DimensionMismatch("connection pieces must be 1-forms".into()));
        }
        if !omega.is_h_valued() {
            return Err(Error::Precondition("ω must be stabilizer-valued".into()));
        }
        if !coframe.is_p_valued() {
            return Err(Error::Precondition("the coframe must be translation-valued".into()));
        }
        // Validates algebra and domain agreement.
        omega.add(&coframe)?;
        Ok(CartanConnection { omega, coframe })
    }

    /// Splits a 1-form into its stabilizer and translation parts.
    pub fn from_form(a: &LieForm<C>) -> Result<CartanConnection<C>> {
        CartanConnection::new(a.h_part(), a.p_part())
    }

    pub fn omega(&self) -> &LieForm<C> {
        &self.omega
    }

    pub fn coframe(&self) -> &LieForm<C> {
        &self.coframe
    }

    pub fn algebra(&self) -> &Arc<AlgebraDescriptor> {
        self.omega.algebra()
    }

    pub fn form(&self) -> LieForm<C> {
        self.omega.add(&self.coframe).expect("validated at construction")
    }

    /// `Ã = ω − e`.
    pub fn involute(&self) -> CartanConnection<C> {
        CartanConnection { omega: self.omega.clone(), coframe: self.coframe.scale(-Q::ONE) }
    }
}

fn half_bracket<C: Coeff>(a: &LieForm<C>) -> Result<LieForm<C>> {
    Ok(a.lie_bracket(a)?.scale(Q::new(1, 2)))
}

pub fn curvature<C: Coeff>(conn: &CartanConnection<C>) -> Result<CurvatureReport<C>> {
    let a = conn.form();
    let f = a.exterior_d()?.add(&half_bracket(&a)?)?;
    let r = conn.omega.exterior_d()?.add(&half_bracket(&conn.omega)?)?;
    Ok(CurvatureReport { f_h: f.h_part(), f_p: f.p_part(), f, r })
}

pub fn involute_connection<C: Coeff>(conn: &CartanConnection<C>) -> CartanConnection<C> {
    conn.involute()
}

/// `(d_A F, d_ω R, d_ω d_ω e + [e, R])`; all vanish identically.
pub fn bianchi_residuals<C: Coeff>(conn: &CartanConnection<C>) -> Result<(LieForm<C>, LieForm<C>, LieForm<C>)> {
    let rep = curvature(conn)?;
    let a = conn.form();
    let w = &conn.omega;
    let da_f = rep.f.covariant_d(&a)?;
    let dw_r = rep.r.covariant_d(w)?;
    let dd_e = conn.coframe.covariant_d(w)?.covariant_d(w)?;
    let third = dd_e.add(&conn.coframe.lie_bracket(&rep.r)?)?;
    Ok((da_f, dw_r, third))
}

/// Result of a coframe nondegeneracy scan.
#[derive(Clone, Debug, PartialEq)]
pub struct CoframeCheck {
    pub nondegenerate: bool,
    pub min_abs_det: f64,
    pub grid: usize,
}

/// Default tolerance on `|det e(x)|`.
pub const COFRAME_TOLERANCE: f64 = 1e-8;

/// `det e^a_μ(x)` at every grid point of a sampled translation-valued 1-form.
pub fn coframe_determinants(e: &LieForm<GridFn>) -> Result<Vec<f64>> {
    let alg = e.algebra();
    let n = e.torus_dim();
    if alg.p_indices().len() != n {
        return Err(Error::DimensionMismatch(format!(
            "coframe of {} needs T^{}, got T^{n}",
            alg.name(),
            alg.p_indices().len()
        )));
    }
    let grid = e.domain();
    let comps: Vec<Vec<&[f64]>> =
        alg.p_indices().iter().map(|&a| (0..n).map(|mu| e.component(a, &[mu]).values()).collect()).collect();
    Ok((0..grid.len()).map(|idx| DMatrix::from_fn(n, n, |a, mu| comps[a][mu][idx]).determinant()).collect())
}

/// Scans `det e` on a uniform `grid_size^n` grid.
pub fn coframe_check(conn: &CartanConnection<TrigPoly>, grid_size: usize) -> Result<CoframeCheck> {
    coframe_check_with(conn, grid_size, COFRAME_TOLERANCE)
}

pub fn coframe_check_with(conn: &CartanConnection<TrigPoly>, grid_size: usize, tol: f64) -> Result<CoframeCheck> {
    let n = conn.coframe.torus_dim();
    let grid = Grid::new(n, grid_size);
    let sampled = conn.coframe.map_coeffs(grid, |c| c.sample(grid));
    let dets = coframe_determinants(&sampled)?;
    let min_abs_det = dets.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    Ok(CoframeCheck { nondegenerate: min_abs_det > tol, min_abs_det, grid: grid_size })
}

/// `Σ_a dx^a ⊗ P_a`.
pub fn identity_coframe(algebra: Arc<AlgebraDescriptor>) -> Result<LieForm<TrigPoly>> {
    let n = algebra.p_indices().len();
    let mut e = LieForm::zero(algebra.clone(), n, 1)?;
    for (a, &p) in algebra.p_indices().iter().enumerate() {
        e.set(p, &[a], TrigPoly::constant(n, Q::ONE))?;
    }
    Ok(e)
}
