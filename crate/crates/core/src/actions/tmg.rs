use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{chern_simons_omega, palatini, ActionValue};
use crate::algebra::AlgebraDescriptor;
use crate::calculus::{Coeff, Grid, GridFn, LieForm, TrigPoly};
use crate::cartan::{identity_coframe, COFRAME_TOLERANCE};
use crate::error::{Error, Result};
use crate::rational::Q;

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn require_3d_coframe(e: &LieForm<TrigPoly>) -> Result<()> {
    let alg = e.algebra();
    if alg.spacetime_dim() != 3 || e.torus_dim() != 3 || e.degree() != 1 {
        return Err(Error::Precondition(format!(
            "torsion-free connection needs a 1-form coframe on T^3 over a 3d algebra, got {} on T^{}",
            alg.name(),
            e.torus_dim()
        )));
    }
    if !e.is_p_valued() {
        return Err(Error::Precondition("the coframe must be translation-valued".into()));
    }
    Ok(())
}

/// Identity coframe plus one `K = 1` mode per entry with coefficients of size
/// at most `1/10`; every row perturbation stays below `1/2`, so the coframe is
/// invertible everywhere.
pub fn perturbed_identity_coframe(alg: Arc<AlgebraDescriptor>, seed: u64) -> Result<LieForm<TrigPoly>> {
    if alg.spacetime_dim() != 3 {
        return Err(Error::Precondition(format!("{} is not a 3d algebra", alg.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a3c_11e5);
    let mut e = identity_coframe(alg.clone())?;
    let small = [Q::new(1, 10), Q::new(-1, 10), Q::new(1, 20), Q::new(-1, 20)];
    for &p in alg.p_indices() {
        for mu in 0..3 {
            let mut k = [0i16; 3];
            while k == [0; 3] {
                k = [rng.gen_range(-1..=1), rng.gen_range(-1..=1), rng.gen_range(-1..=1)];
            }
            let bump = TrigPoly::cos_sin(3, &k, small[rng.gen_range(0..4)], small[rng.gen_range(0..4)]);
            let cur = e.component(p, &[mu]).clone();
            e.set(p, &[mu], cur.add(&bump))?;
        }
    }
    Ok(e)
}

/// `C^b_{ia}` for `i ∈ 𝔥`, `a, b ∈ 𝔭`, as `[i][a][b]`.
fn mixed_constants(alg: &AlgebraDescriptor) -> Vec<[[f64; 3]; 3]> {
    let p = alg.p_indices();
    alg.h_indices()
        .iter()
        .map(|&i| {
            let mut m = [[0.0; 3]; 3];
            for (a, &pa) in p.iter().enumerate() {
                for (b, &pb) in p.iter().enumerate() {
                    m[a][b] = alg.c(i, pa, pb).to_f64();
                }
            }
            m
        })
        .collect()
}

/// Solves `de + [ω, e] = 0` pointwise; returns `(ω, e)` sampled on `grid³`.
pub(crate) fn levi_civita_pair(e: &LieForm<TrigPoly>, grid: usize) -> Result<(LieForm<GridFn>, LieForm<GridFn>)> {
    require_3d_coframe(e)?;
    if grid < 2 {
        return Err(Error::Precondition("quadrature grid must have at least 2 points per axis".into()));
    }
    let alg = e.algebra().clone();
    let g = Grid::new(3, grid);
    let es = e.map_coeffs(g, |c| c.sample(g));
    let de = e.exterior_d()?.map_coeffs(g, |c| c.sample(g));
    let (h, p) = (alg.h_indices().to_vec(), alg.p_indices().to_vec());
    let cmix = mixed_constants(&alg);
    let ev: Vec<Vec<&[f64]>> = p.iter().map(|&a| (0..3).map(|mu| es.component(a, &[mu]).values()).collect()).collect();
    let dev: Vec<Vec<&[f64]>> =
        p.iter().map(|&b| PAIRS.iter().map(|&(m, n)| de.component(b, &[m, n]).values()).collect()).collect();
    let mut out = vec![vec![vec![0.0; g.len()]; 3]; h.len()];
    let mut m = DMatrix::<f64>::zeros(9, 9);
    let mut rhs = DVector::<f64>::zeros(9);
    for idx in 0..g.len() {
        let frame = DMatrix::from_fn(3, 3, |a, mu| ev[a][mu][idx]);
        let det = frame.determinant();
        if det.abs() <= COFRAME_TOLERANCE {
            return Err(Error::DegenerateCoframe(format!(
                "|det e| = {:.3e} at grid point {:?}",
                det.abs(),
                &g.coords(idx)[..3]
            )));
        }
        m.fill(0.0);
        // row (b, μ<ν), column (i, κ): Σ_a C^b_{ia} (δ_κμ e^a_ν − δ_κν e^a_μ)
        for b in 0..3 {
            for (s, &(mu, nu)) in PAIRS.iter().enumerate() {
                let row = b * 3 + s;
                rhs[row] = -dev[b][s][idx];
                for (i, c) in cmix.iter().enumerate() {
                    for a in 0..3 {
                        let k = c[a][b];
                        if k != 0.0 {
                            m[(row, i * 3 + mu)] += k * frame[(a, nu)];
                            m[(row, i * 3 + nu)] -= k * frame[(a, mu)];
                        }
                    }
                }
            }
        }
        let sol = m
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::DegenerateCoframe(format!("torsion equation singular at grid point {idx}")))?;
        for (i, comp) in out.iter_mut().enumerate() {
            for (kappa, vals) in comp.iter_mut().enumerate() {
                vals[idx] = sol[i * 3 + kappa];
            }
        }
    }
    let mut w = LieForm::zero(alg, g, 1)?;
    for (i, comp) in out.into_iter().enumerate() {
        for (kappa, vals) in comp.into_iter().enumerate() {
            w.set(h[i], &[kappa], GridFn::from_values(g, vals))?;
        }
    }
    Ok((w, es))
}

/// Torsion-free `ω(e)` sampled on a `grid³` tensor grid.
pub fn levi_civita_connection(e: &LieForm<TrigPoly>, grid: usize) -> Result<LieForm<GridFn>> {
    Ok(levi_civita_pair(e, grid)?.0)
}

/// `max |de + [ω, e]|` over `probes` random points, with `ω` trigonometrically
/// interpolated from its grid samples and `e`, `de` evaluated exactly.
pub fn torsion_residual(e: &LieForm<TrigPoly>, omega: &LieForm<GridFn>, probes: usize, seed: u64) -> Result<f64> {
    require_3d_coframe(e)?;
    let alg = e.algebra();
    let de = e.exterior_d()?;
    let cmix = mixed_constants(alg);
    let (h, p) = (alg.h_indices(), alg.p_indices());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        let ex: Vec<Vec<f64>> = p.iter().map(|&a| (0..3).map(|mu| e.component(a, &[mu]).eval(&x)).collect()).collect();
        let wx: Vec<Vec<f64>> =
            h.iter().map(|&i| (0..3).map(|mu| omega.component(i, &[mu]).interpolate(&x)).collect()).collect();
        for (b, &pb) in p.iter().enumerate() {
            for &(mu, nu) in &PAIRS {
                let mut t = de.component(pb, &[mu, nu]).eval(&x);
                for (i, c) in cmix.iter().enumerate() {
                    for a in 0..3 {
                        t += c[a][b] * (wx[i][mu] * ex[a][nu] - wx[i][nu] * ex[a][mu]);
                    }
                }
                worst = worst.max(t.abs());
            }
        }
    }
    Ok(worst)
}

/// `∫tr(−e∧⋆R − ⅙e∧⋆[e,e]) + (1/μ)·S_CS(ω)`.
pub fn tmg_value<C: Coeff>(omega: &LieForm<C>, e: &LieForm<C>, mu: Q) -> Result<C::Value> {
    if mu.is_zero() {
        return Err(Error::Precondition("μ must be nonzero".into()));
    }
    let pal = palatini(omega, e)?;
    let cs = chern_simons_omega(omega)?;
    Ok(C::value_add(C::value_scale(pal, -Q::ONE), C::value_scale(cs, mu.recip())))
}

/// Topologically massive gravity action of a coframe, by quadrature on `grid³`.
pub fn tmg_action(e: &LieForm<TrigPoly>, mu: Q, grid: usize) -> Result<ActionValue> {
    let (w, es) = levi_civita_pair(e, grid)?;
    Ok(ActionValue::numeric(tmg_value(&w, &es, mu)?, grid, 3))
}

/// A quadrature value with its `2×` refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmgRefinement {
    pub coarse: ActionValue,
    pub fine: ActionValue,
    /// `|fine − coarse| / |fine|`.
    pub relative_change: f64,
}

pub fn tmg_action_refined(e: &LieForm<TrigPoly>, mu: Q, grid: usize) -> Result<TmgRefinement> {
    let coarse = tmg_action(e, mu, grid)?;
    let fine = tmg_action(e, mu, 2 * grid)?;
    let (a, b) = (coarse.numeric_value, fine.numeric_value);
    let relative_change = if a == b { 0.0 } else { (a - b).abs() / b.abs().max(f64::MIN_POSITIVE) };
    Ok(TmgRefinement { coarse, fine, relative_change })
}
