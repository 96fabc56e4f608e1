//! Property checks of the exterior calculus and of the internal star.
//!
//! Every check returns an exact defect: the largest absolute Fourier
//! coefficient (or algebra coordinate) of `LHS − RHS`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{killing_form, selfdual_split, AlgebraDescriptor, AlgebraElement, AlgebraName, StarKind};
use crate::calculus::{random_form, Coeff, LieForm, ScalarForm, Support, TrigPoly};
use crate::error::Result;
use crate::rational::Q;

pub(crate) fn poly_defect(c: &TrigPoly) -> Q {
    c.terms().iter().map(|(_, z)| z.re.abs() + z.im.abs()).max().unwrap_or(Q::ZERO)
}

pub(crate) fn form_defect(f: &LieForm<TrigPoly>) -> Q {
    f.components().iter().map(poly_defect).max().unwrap_or(Q::ZERO)
}

fn scalar_defect(f: &ScalarForm<TrigPoly>) -> Q {
    f.components().iter().map(poly_defect).max().unwrap_or(Q::ZERO)
}

fn elem_defect(x: &AlgebraElement) -> Q {
    x.coeffs().iter().map(Q::abs).max().unwrap_or(Q::ZERO)
}

fn sign(p: usize) -> Q {
    if p % 2 == 0 {
        Q::ONE
    } else {
        -Q::ONE
    }
}

pub const CALCULUS_CHECKS: [&str; 9] = [
    "graded_commutativity",
    "graded_jacobi",
    "d_derivation",
    "covariant_derivation",
    "beta_invariance",
    "covariant_integration_by_parts",
    "d_squared",
    "covariant_d_squared",
    "stokes",
];

/// Default frequency cutoff of the calculus checks: 2 on `T³`, 1 on `T⁴`.
pub fn calculus_cutoff(torus_dim: usize) -> u16 {
    if torus_dim >= 4 {
        1
    } else {
        2
    }
}

/// Runs every calculus identity once on fresh random forms over
/// `T^{spacetime_dim}`. Form degrees are drawn per seed.
pub fn calculus_checks(alg: &Arc<AlgebraDescriptor>, seed: u64, cutoff: u16) -> Result<Vec<(&'static str, Q)>> {
    let n = alg.spacetime_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a11a);
    let base = seed.wrapping_mul(64);
    let mut next = 0u64;
    let mut form = |p: usize| {
        next += 1;
        random_form(base.wrapping_add(next), p, alg.clone(), n, cutoff, Support::Full)
    };
    let beta = killing_form(alg);
    // Degrees with p + q ≤ top, drawn uniformly over the admissible pairs.
    let mut split2 = |top: usize| {
        let p = rng.gen_range(0..=top);
        (p, rng.gen_range(0..=top - p))
    };
    let mut out = Vec::with_capacity(CALCULUS_CHECKS.len());

    let (p, q) = split2(n);
    let (w, m) = (form(p)?, form(q)?);
    let lhs = w.lie_bracket(&m)?;
    let rhs = m.lie_bracket(&w)?.scale(-sign(p * q));
    out.push(("graded_commutativity", form_defect(&lhs.sub(&rhs)?)));

    let (l, rest) = split2(n);
    let p = rest / 2;
    let q = rest - p;
    let (x, w, m) = (form(l)?, form(p)?, form(q)?);
    let lhs = x.lie_bracket(&w.lie_bracket(&m)?)?;
    let rhs = x.lie_bracket(&w)?.lie_bracket(&m)?.add(&w.lie_bracket(&x.lie_bracket(&m)?)?.scale(sign(l * p)))?;
    out.push(("graded_jacobi", form_defect(&lhs.sub(&rhs)?)));

    let (p, q) = split2(n - 1);
    let (w, m) = (form(p)?, form(q)?);
    let lhs = w.lie_bracket(&m)?.exterior_d()?;
    let rhs = w.exterior_d()?.lie_bracket(&m)?.add(&w.lie_bracket(&m.exterior_d()?)?.scale(sign(p)))?;
    out.push(("d_derivation", form_defect(&lhs.sub(&rhs)?)));

    let conn = form(1)?;
    let (p, q) = split2(n - 1);
    let (w, m) = (form(p)?, form(q)?);
    let lhs = w.lie_bracket(&m)?.covariant_d(&conn)?;
    let rhs = w.covariant_d(&conn)?.lie_bracket(&m)?.add(&w.lie_bracket(&m.covariant_d(&conn)?)?.scale(sign(p)))?;
    out.push(("covariant_derivation", form_defect(&lhs.sub(&rhs)?)));

    let (l, rest) = split2(n);
    let p = rng.gen_range(0..=rest);
    let (x, w, m) = (form(l)?, form(p)?, form(rest - p)?);
    let lhs = x.lie_bracket(&w)?.beta_pair(&beta, &m)?;
    let rhs = x.beta_pair(&beta, &w.lie_bracket(&m)?)?;
    out.push(("beta_invariance", scalar_defect(&lhs.sub(&rhs)?)));

    // Pointwise Leibniz rule plus the integrated statement in top degree.
    let p = rng.gen_range(0..n);
    let (w, m) = (form(p)?, form(n - 1 - p)?);
    let dw = w.covariant_d(&conn)?;
    let dm = m.covariant_d(&conn)?;
    let lhs = w.beta_pair(&beta, &m)?.exterior_d()?;
    let rhs = dw.beta_pair(&beta, &m)?.add(&w.beta_pair(&beta, &dm)?.scale(sign(p)))?;
    let integrated = dw.beta_integral(&beta, &m)? + sign(p) * w.beta_integral(&beta, &dm)?;
    out.push(("covariant_integration_by_parts", scalar_defect(&lhs.sub(&rhs)?).max(integrated.abs())));

    let p = rng.gen_range(0..=n - 2);
    let w = form(p)?;
    out.push(("d_squared", form_defect(&w.exterior_d()?.exterior_d()?)));

    // d_A² ω = [F, ω] with F = dA + ½[A, A].
    let p = rng.gen_range(0..=n - 2);
    let w = form(p)?;
    let f = conn.exterior_d()?.add(&conn.lie_bracket(&conn)?.scale(Q::new(1, 2)))?;
    let lhs = w.covariant_d(&conn)?.covariant_d(&conn)?;
    out.push(("covariant_d_squared", form_defect(&lhs.sub(&f.lie_bracket(&w)?)?)));

    let t = form(n - 1)?;
    let total = t.exterior_d()?.components().iter().map(|c| c.mean().abs()).max().unwrap_or(Q::ZERO);
    out.push(("stokes", total));
    Ok(out)
}

pub const STAR_CHECKS: [&str; 6] =
    ["star_square", "star_bracket", "star_trace_symmetry", "covariant_star", "selfdual_closure", "involution_traces"];

/// `⋆²` sign per algebra: `+1` on so4 and so22, `−1` on so31; the contractions
/// inherit the sign of their contraction and the ten-dimensional algebras carry
/// the so(3,1) stabilizer sign.
pub fn expected_star_square(alg: &AlgebraDescriptor) -> i8 {
    match alg.name() {
        AlgebraName::So4 | AlgebraName::So22 => 1,
        AlgebraName::So31 | AlgebraName::So41 | AlgebraName::So32 | AlgebraName::Iso31 => -1,
        AlgebraName::Iso3 | AlgebraName::Iso21 => alg.star_kind().square(),
    }
}

fn star_domain(alg: &AlgebraDescriptor, x: &AlgebraElement) -> AlgebraElement {
    match alg.star_kind() {
        StarKind::Stabilizer { .. } => x.h_part(),
        _ => x.clone(),
    }
}

/// `(check, defect)` for one pair `(x, y)`; checks that do not apply to the
/// algebra are skipped.
fn element_checks(
    alg: &Arc<AlgebraDescriptor>,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<Vec<(&'static str, Q)>> {
    let kind = alg.star_kind();
    let (xs, ys) = (star_domain(alg, x), star_domain(alg, y));
    let mut out = Vec::new();

    let s = Q::int(expected_star_square(alg) as i128);
    let d = elem_defect(&xs.star()?.star()?.sub(&xs.scale(s))?);
    out.push(("star_square", d));

    // ⋆ intertwines ad on the full algebra only for the simple six-dimensional
    // ones; elsewhere only the stabilizer acts equivariantly.
    let left = match kind {
        StarKind::Full { .. } => x.clone(),
        _ => x.h_part(),
    };
    let d = elem_defect(&left.bracket(&ys)?.star()?.sub(&left.bracket(&ys.star()?)?)?);
    out.push(("star_bracket", d));

    let sg = alg.star_gram();
    let d = (sg.bilinear(xs.coeffs(), ys.coeffs()) - sg.bilinear(ys.coeffs(), xs.coeffs())).abs();
    out.push(("star_trace_symmetry", d));

    if matches!(kind, StarKind::Full { square: 1 }) {
        let (xp, xm) = selfdual_split(x)?;
        let (yp, ym) = selfdual_split(y)?;
        let bp = xp.bracket(&yp)?;
        let bm = xm.bracket(&ym)?;
        let k = alg.killing();
        let d = elem_defect(&bp.star()?.sub(&bp)?)
            .max(elem_defect(&bm.star()?.add(&bm)?))
            .max(elem_defect(&xp.bracket(&ym)?))
            .max(k.bilinear(xp.coeffs(), ym.coeffs()).abs());
        out.push(("selfdual_closure", d));
    }

    let k = alg.killing();
    let (xt, yt) = (x.involution(), y.involution());
    let mut d = (k.bilinear(xt.coeffs(), yt.coeffs()) - k.bilinear(x.coeffs(), y.coeffs())).abs();
    if alg.has_full_star() {
        d = d.max((sg.bilinear(xt.coeffs(), yt.coeffs()) + sg.bilinear(x.coeffs(), y.coeffs())).abs());
    }
    out.push(("involution_traces", d));
    Ok(out)
}

fn merge(acc: &mut Vec<(&'static str, Q)>, new: Vec<(&'static str, Q)>) {
    for (name, d) in new {
        match acc.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = slot.1.max(d),
            None => acc.push((name, d)),
        }
    }
}

/// Star checks over all basis pairs.
pub fn star_checks_basis(alg: &Arc<AlgebraDescriptor>) -> Result<Vec<(&'static str, Q)>> {
    let mut acc = Vec::new();
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let x = AlgebraElement::basis(alg.clone(), i);
            let y = AlgebraElement::basis(alg.clone(), j);
            merge(&mut acc, element_checks(alg, &x, &y)?);
        }
    }
    Ok(acc)
}

/// Star checks on one seeded random pair, plus `d_ω∘⋆ = ⋆∘d_ω` on random forms.
pub fn star_checks_random(alg: &Arc<AlgebraDescriptor>, seed: u64) -> Result<Vec<(&'static str, Q)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb0b5_7a12);
    let mut element = || {
        let coeffs = (0..alg.dim()).map(|_| Q::new(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
        AlgebraElement::new(alg.clone(), coeffs)
    };
    let (x, y) = (element()?, element()?);
    let mut acc = element_checks(alg, &x, &y)?;

    let n = alg.spacetime_dim();
    let cutoff = calculus_cutoff(n);
    let s = seed.wrapping_mul(2) ^ 0xc0ff_ee00;
    let w = random_form(s, 1, alg.clone(), n, cutoff, Support::H)?;
    let degree = (seed % n as u64) as usize;
    let support = match alg.star_kind() {
        StarKind::Stabilizer { .. } => Support::H,
        _ => Support::Full,
    };
    let f = random_form(s.wrapping_add(1), degree, alg.clone(), n, cutoff, support)?;
    let d = form_defect(&f.star()?.covariant_d(&w)?.sub(&f.covariant_d(&w)?.star()?)?);
    let at = acc.iter().position(|(c, _)| *c == "star_trace_symmetry").map_or(acc.len(), |i| i + 1);
    acc.insert(at, ("covariant_star", d));
    Ok(acc)
}
