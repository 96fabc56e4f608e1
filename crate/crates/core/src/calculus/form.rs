use std::fmt;
use std::sync::Arc;

use super::{binomial, indices_of, layout, mask_of, wedge_sign, Coeff, TrigPoly};
use crate::algebra::{AlgebraDescriptor, BilinearForm};
use crate::error::{Error, Result};
use crate::rational::Q;

fn check_degree(degree: usize, dim: usize) -> Result<()> {
    if degree > dim {
        return Err(Error::DegreeOverflow { degree, dim });
    }
    Ok(())
}

fn check_domain<D: PartialEq + fmt::Debug>(a: &D, b: &D) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("forms live on different domains: {a:?} vs {b:?}")));
    }
    Ok(())
}

fn check_algebra(a: &AlgebraDescriptor, b: &AlgebraDescriptor) -> Result<()> {
    if a.name() != b.name() || a.dim() != b.dim() {
        return Err(Error::AlgebraMismatch(a.name().to_string(), b.name().to_string()));
    }
    Ok(())
}

/// Real-valued differential form; components indexed by increasing
/// multi-index in lexicographic order.
#[derive(Clone, PartialEq)]
pub struct ScalarForm<C: Coeff = TrigPoly> {
    domain: C::Domain,
    degree: usize,
    comps: Vec<C>,
}

impl<C: Coeff> fmt::Debug for ScalarForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarForm").field("degree", &self.degree).field("comps", &self.comps).finish()
    }
}

impl<C: Coeff> ScalarForm<C> {
    pub fn zero(domain: C::Domain, degree: usize) -> Result<ScalarForm<C>> {
        let n = C::torus_dim(&domain);
        check_degree(degree, n)?;
        let comps = vec![C::zero(&domain); binomial(n, degree)];
        Ok(ScalarForm { domain, degree, comps })
    }

    /// `f dx^{idx}` for a strictly increasing index list.
    pub fn monomial(domain: C::Domain, idx: &[usize], f: C) -> Result<ScalarForm<C>> {
        let mut out = ScalarForm::zero(domain, idx.len())?;
        check_increasing(idx, out.torus_dim())?;
        let s = layout(out.torus_dim()).slot(mask_of(idx));
        out.comps[s] = f;
        Ok(out)
    }

    pub fn torus_dim(&self) -> usize {
        C::torus_dim(&self.domain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> &C::Domain {
        &self.domain
    }

    pub fn components(&self) -> &[C] {
        &self.comps
    }

    pub fn component(&self, idx: &[usize]) -> &C {
        &self.comps[layout(self.torus_dim()).slot(mask_of(idx))]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(C::is_zero)
    }

    pub fn add(&self, other: &ScalarForm<C>) -> Result<ScalarForm<C>> {
        check_domain(&self.domain, &other.domain)?;
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!("degrees {} and {}", self.degree, other.degree)));
        }
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect();
        Ok(ScalarForm { domain: self.domain.clone(), degree: self.degree, comps })
    }

    pub fn sub(&self, other: &ScalarForm<C>) -> Result<ScalarForm<C>> {
        self.add(&other.scale(-Q::ONE))
    }

    pub fn scale(&self, s: Q) -> ScalarForm<C> {
        ScalarForm {
            domain: self.domain.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn wedge(&self, other: &ScalarForm<C>) -> Result<ScalarForm<C>> {
        check_domain(&self.domain, &other.domain)?;
        let n = self.torus_dim();
        let deg = self.degree + other.degree;
        check_degree(deg, n)?;
        let lay = layout(n);
        let mut acc: Vec<C::Acc> = (0..binomial(n, deg)).map(|_| C::acc_new(&self.domain)).collect();
        let (pa, pb) = (prepare_all(&self.comps), prepare_all(&other.comps));
        for (si, &mi) in lay.masks(self.degree).iter().enumerate() {
            let Some(a) = &pa[si] else { continue };
            for (sj, &mj) in lay.masks(other.degree).iter().enumerate() {
                let Some(b) = &pb[sj] else { continue };
                if let Some(sign) = wedge_sign(mi, mj) {
                    C::acc_add_product(&mut acc[lay.slot(mi | mj)], a, b, Q::int(sign as i128));
                }
            }
        }
        let comps = acc.into_iter().map(|a| C::acc_finish(a, &self.domain)).collect();
        Ok(ScalarForm { domain: self.domain.clone(), degree: deg, comps })
    }

    pub fn exterior_d(&self) -> Result<ScalarForm<C>> {
        let n = self.torus_dim();
        check_degree(self.degree + 1, n)?;
        let comps = d_components(&self.comps, &self.domain, self.degree, 1);
        Ok(ScalarForm { domain: self.domain.clone(), degree: self.degree + 1, comps })
    }

    /// `(2π)⁻ⁿ ∫_{Tⁿ}` of a top-degree form.
    pub fn integrate(&self) -> Result<C::Value> {
        let n = self.torus_dim();
        if self.degree != n {
            return Err(Error::DimensionMismatch(format!("integrating a {}-form over T^{n}", self.degree)));
        }
        Ok(self.comps[0].mean())
    }
}

fn check_increasing(idx: &[usize], n: usize) -> Result<()> {
    if idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&i| i >= n) {
        return Err(Error::DimensionMismatch(format!("multi-index {idx:?} is not strictly increasing within T^{n}")));
    }
    Ok(())
}

/// Exterior derivative on a block of `C(n,p)` components.
fn d_components<C: Coeff>(comps: &[C], domain: &C::Domain, p: usize, blocks: usize) -> Vec<C> {
    let n = C::torus_dim(domain);
    let lay = layout(n);
    let src = binomial(n, p);
    let mut out = Vec::with_capacity(blocks * binomial(n, p + 1));
    for b in 0..blocks {
        for &mj in lay.masks(p + 1) {
            let mut acc = C::acc_new(domain);
            let mut pos = 0;
            for i in 0..n {
                if mj & (1 << i) == 0 {
                    continue;
                }
                let f = &comps[b * src + lay.slot(mj ^ (1 << i))];
                if !f.is_zero() {
                    let sign = if pos % 2 == 0 { Q::ONE } else { -Q::ONE };
                    C::acc_add(&mut acc, &f.partial(i), sign);
                }
                pos += 1;
            }
            out.push(C::acc_finish(acc, domain));
        }
    }
    out
}

/// `Σ_α ω^α ⊗ v_α` with `ω^α` a `p`-form on the torus.
#[derive(Clone)]
pub struct LieForm<C: Coeff = TrigPoly> {
    algebra: Arc<AlgebraDescriptor>,
    domain: C::Domain,
    degree: usize,
    comps: Vec<C>,
}

impl<C: Coeff> PartialEq for LieForm<C> {
    fn eq(&self, other: &LieForm<C>) -> bool {
        self.algebra.name() == other.algebra.name()
            && self.domain == other.domain
            && self.degree == other.degree
            && self.comps == other.comps
    }
}

impl<C: Coeff> fmt::Debug for LieForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.torus_dim();
        let lay = layout(n);
        let mut m = f.debug_map();
        let slots = binomial(n, self.degree);
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                let key =
                    format!("{}{:?}", self.algebra.labels()[i / slots], indices_of(lay.masks(self.degree)[i % slots]));
                m.entry(&key, c);
            }
        }
        m.finish()
    }
}

impl<C: Coeff> LieForm<C> {
    pub fn zero(algebra: Arc<AlgebraDescriptor>, domain: C::Domain, degree: usize) -> Result<LieForm<C>> {
        let n = C::torus_dim(&domain);
        check_degree(degree, n)?;
        let comps = vec![C::zero(&domain); algebra.dim() * binomial(n, degree)];
        Ok(LieForm { algebra, domain, degree, comps })
    }

    /// Components ordered `α · C(n,p) + slot`.
    pub fn from_components(
        algebra: Arc<AlgebraDescriptor>,
        domain: C::Domain,
        degree: usize,
        comps: Vec<C>,
    ) -> Result<LieForm<C>> {
        let n = C::torus_dim(&domain);
        check_degree(degree, n)?;
        let expect = algebra.dim() * binomial(n, degree);
        if comps.len() != expect {
            return Err(Error::DimensionMismatch(format!("{} components, expected {expect}", comps.len())));
        }
        Ok(LieForm { algebra, domain, degree, comps })
    }

    /// `f dx^{idx} ⊗ v_alpha`.
    pub fn monomial(
        algebra: Arc<AlgebraDescriptor>,
        domain: C::Domain,
        alpha: usize,
        idx: &[usize],
        f: C,
    ) -> Result<LieForm<C>> {
        let mut out = LieForm::zero(algebra, domain, idx.len())?;
        out.set(alpha, idx, f)?;
        Ok(out)
    }

    pub fn algebra(&self) -> &Arc<AlgebraDescriptor> {
        &self.algebra
    }

    pub fn domain(&self) -> &C::Domain {
        &self.domain
    }

    pub fn torus_dim(&self) -> usize {
        C::torus_dim(&self.domain)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[C] {
        &self.comps
    }

    /// Components in `α·C(n,p) + slot` order; the shape cannot change.
    pub fn components_mut(&mut self) -> &mut [C] {
        &mut self.comps
    }

    pub fn slots(&self) -> usize {
        binomial(self.torus_dim(), self.degree)
    }

    pub fn component(&self, alpha: usize, idx: &[usize]) -> &C {
        &self.comps[alpha * self.slots() + layout(self.torus_dim()).slot(mask_of(idx))]
    }

    pub fn set(&mut self, alpha: usize, idx: &[usize], f: C) -> Result<()> {
        let n = self.torus_dim();
        if idx.len() != self.degree {
            return Err(Error::DimensionMismatch(format!("multi-index {idx:?} for a {}-form", self.degree)));
        }
        check_increasing(idx, n)?;
        if alpha >= self.algebra.dim() {
            return Err(Error::DimensionMismatch(format!("algebra index {alpha} out of range")));
        }
        let s = alpha * self.slots() + layout(n).slot(mask_of(idx));
        self.comps[s] = f;
        Ok(())
    }

    /// Multi-indices in slot order.
    pub fn multi_indices(&self) -> Vec<Vec<usize>> {
        layout(self.torus_dim()).masks(self.degree).iter().map(|&m| indices_of(m)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(C::is_zero)
    }

    fn with(&self, degree: usize, comps: Vec<C>) -> LieForm<C> {
        LieForm { algebra: self.algebra.clone(), domain: self.domain.clone(), degree, comps }
    }

    fn check_compatible(&self, other: &LieForm<C>) -> Result<()> {
        check_algebra(&self.algebra, &other.algebra)?;
        check_domain(&self.domain, &other.domain)
    }

    pub fn add(&self, other: &LieForm<C>) -> Result<LieForm<C>> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!("adding a {}-form to a {}-form", self.degree, other.degree)));
        }
        Ok(self.with(self.degree, self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect()))
    }

    pub fn sub(&self, other: &LieForm<C>) -> Result<LieForm<C>> {
        self.add(&other.scale(-Q::ONE))
    }

    pub fn scale(&self, s: Q) -> LieForm<C> {
        self.with(self.degree, self.comps.iter().map(|c| c.scale(s)).collect())
    }

    /// Applies a linear map on the algebra index, `(Mω)^γ = M_{γα} ω^α`.
    pub fn map_algebra(&self, m: &crate::linalg::QMatrix) -> LieForm<C> {
        let d = self.algebra.dim();
        let s = self.slots();
        let mut acc: Vec<C::Acc> = (0..d * s).map(|_| C::acc_new(&self.domain)).collect();
        for g in 0..d {
            for a in 0..d {
                let v = m[(g, a)];
                if v.is_zero() {
                    continue;
                }
                for k in 0..s {
                    let f = &self.comps[a * s + k];
                    if !f.is_zero() {
                        C::acc_add(&mut acc[g * s + k], f, v);
                    }
                }
            }
        }
        self.with(self.degree, acc.into_iter().map(|a| C::acc_finish(a, &self.domain)).collect())
    }

    fn mask_algebra(&self, keep: impl Fn(usize) -> bool) -> LieForm<C> {
        let s = self.slots();
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| if keep(i / s) { c.clone() } else { C::zero(&self.domain) })
            .collect();
        self.with(self.degree, comps)
    }

    pub fn h_part(&self) -> LieForm<C> {
        let alg = self.algebra.clone();
        self.mask_algebra(|a| alg.is_h_index(a))
    }

    pub fn p_part(&self) -> LieForm<C> {
        let alg = self.algebra.clone();
        self.mask_algebra(|a| !alg.is_h_index(a))
    }

    /// `ω̃ = ω_𝔥 − ω_𝔭`.
    pub fn involution(&self) -> LieForm<C> {
        self.h_part().sub(&self.p_part()).expect("same shape")
    }

    pub fn is_h_valued(&self) -> bool {
        self.p_part().is_zero()
    }

    pub fn is_p_valued(&self) -> bool {
        self.h_part().is_zero()
    }

    /// Internal Hodge star applied to the algebra index.
    pub fn star(&self) -> Result<LieForm<C>> {
        if !self.algebra.has_full_star() && !self.is_h_valued() {
            return Err(Error::Unsupported(format!("{} has a Hodge star on its stabilizer only", self.algebra.name())));
        }
        Ok(self.map_algebra(self.algebra.star_matrix()))
    }

    /// `[ω, μ] = (ω^α ∧ μ^β) ⊗ [v_α, v_β]`.
    pub fn lie_bracket(&self, other: &LieForm<C>) -> Result<LieForm<C>> {
        self.check_compatible(other)?;
        let n = self.torus_dim();
        let deg = self.degree + other.degree;
        check_degree(deg, n)?;
        let lay = layout(n);
        let d = self.algebra.dim();
        let (sp, sq, so) = (self.slots(), other.slots(), binomial(n, deg));
        let mut acc: Vec<C::Acc> = (0..d * so).map(|_| C::acc_new(&self.domain)).collect();
        let (pf, pg) = (prepare_all(&self.comps), prepare_all(&other.comps));
        for a in 0..d {
            for b in 0..d {
                let terms = self.algebra.bracket_terms(a, b);
                if terms.is_empty() {
                    continue;
                }
                for (i, &mi) in lay.masks(self.degree).iter().enumerate() {
                    let Some(f) = &pf[a * sp + i] else { continue };
                    for (j, &mj) in lay.masks(other.degree).iter().enumerate() {
                        let Some(g) = &pg[b * sq + j] else { continue };
                        let Some(sign) = wedge_sign(mi, mj) else { continue };
                        let slot = lay.slot(mi | mj);
                        for &(gamma, c) in terms {
                            C::acc_add_product(&mut acc[gamma * so + slot], f, g, c * Q::int(sign as i128));
                        }
                    }
                }
            }
        }
        Ok(self.with(deg, acc.into_iter().map(|a| C::acc_finish(a, &self.domain)).collect()))
    }

    pub fn exterior_d(&self) -> Result<LieForm<C>> {
        check_degree(self.degree + 1, self.torus_dim())?;
        Ok(self.with(self.degree + 1, d_components(&self.comps, &self.domain, self.degree, self.algebra.dim())))
    }

    /// `d_A ω = dω + [A, ω]`.
    pub fn covariant_d(&self, a: &LieForm<C>) -> Result<LieForm<C>> {
        if a.degree != 1 {
            return Err(Error::DimensionMismatch(format!("connection must be a 1-form, got degree {}", a.degree)));
        }
        a.lie_bracket(self)?.add(&self.exterior_d()?)
    }

    /// `β(ω ∧ μ) = β_{αβ} ω^α ∧ μ^β`.
    pub fn beta_pair(&self, beta: &BilinearForm, other: &LieForm<C>) -> Result<ScalarForm<C>> {
        self.check_compatible(other)?;
        check_gram(beta, &self.algebra)?;
        let n = self.torus_dim();
        let deg = self.degree + other.degree;
        check_degree(deg, n)?;
        let lay = layout(n);
        let (sp, sq) = (self.slots(), other.slots());
        let mut acc: Vec<C::Acc> = (0..binomial(n, deg)).map(|_| C::acc_new(&self.domain)).collect();
        let (pf, ph) = (prepare_all(&self.comps), prepare_all(&other.comps));
        for (a, b, g) in beta.sparse_entries() {
            for (i, &mi) in lay.masks(self.degree).iter().enumerate() {
                let Some(f) = &pf[a * sp + i] else { continue };
                for (j, &mj) in lay.masks(other.degree).iter().enumerate() {
                    let Some(h) = &ph[b * sq + j] else { continue };
                    if let Some(sign) = wedge_sign(mi, mj) {
                        C::acc_add_product(&mut acc[lay.slot(mi | mj)], f, h, g * Q::int(sign as i128));
                    }
                }
            }
        }
        let comps = acc.into_iter().map(|a| C::acc_finish(a, &self.domain)).collect();
        Ok(ScalarForm { domain: self.domain.clone(), degree: deg, comps })
    }

    /// `(2π)⁻ⁿ ∫ β(ω ∧ μ)` for complementary degrees, computing only the mean of
    /// each product.
    pub fn beta_integral(&self, beta: &BilinearForm, other: &LieForm<C>) -> Result<C::Value> {
        self.check_compatible(other)?;
        check_gram(beta, &self.algebra)?;
        let n = self.torus_dim();
        if self.degree + other.degree != n {
            return Err(Error::DimensionMismatch(format!("integrand degree {} on T^{n}", self.degree + other.degree)));
        }
        let lay = layout(n);
        let (sp, sq) = (self.slots(), other.slots());
        let mut total = C::value_zero();
        for (a, b, g) in beta.sparse_entries() {
            for (i, &mi) in lay.masks(self.degree).iter().enumerate() {
                let f = &self.comps[a * sp + i];
                if f.is_zero() {
                    continue;
                }
                let mj = !mi & ((1u8 << n) - 1);
                let j = lay.slot(mj);
                let h = &other.comps[b * sq + j];
                if h.is_zero() {
                    continue;
                }
                let sign = wedge_sign(mi, mj).expect("complementary");
                let v = C::value_scale(f.mean_of_product(h), g * Q::int(sign as i128));
                total = C::value_add(total, v);
            }
        }
        Ok(total)
    }

    /// `s ∧ ω` for a scalar form `s`.
    pub fn wedge_scalar(&self, s: &ScalarForm<C>) -> Result<LieForm<C>> {
        check_domain(&self.domain, &s.domain)?;
        let n = self.torus_dim();
        let deg = s.degree + self.degree;
        check_degree(deg, n)?;
        let lay = layout(n);
        let d = self.algebra.dim();
        let (sp, so) = (self.slots(), binomial(n, deg));
        let mut acc: Vec<C::Acc> = (0..d * so).map(|_| C::acc_new(&self.domain)).collect();
        for (i, &mi) in lay.masks(s.degree).iter().enumerate() {
            let f = &s.comps[i];
            if f.is_zero() {
                continue;
            }
            for a in 0..d {
                for (j, &mj) in lay.masks(self.degree).iter().enumerate() {
                    let g = &self.comps[a * sp + j];
                    if g.is_zero() {
                        continue;
                    }
                    if let Some(sign) = wedge_sign(mi, mj) {
                        C::acc_add(&mut acc[a * so + lay.slot(mi | mj)], &f.mul(g), Q::int(sign as i128));
                    }
                }
            }
        }
        Ok(self.with(deg, acc.into_iter().map(|a| C::acc_finish(a, &self.domain)).collect()))
    }

    /// Componentwise conversion to another coefficient type.
    pub fn map_coeffs<D: Coeff>(&self, domain: D::Domain, f: impl Fn(&C) -> D) -> LieForm<D> {
        LieForm {
            algebra: self.algebra.clone(),
            domain,
            degree: self.degree,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    /// Same components reinterpreted over another algebra of equal dimension
    /// (e.g. a perturbed copy of this one).
    pub fn with_algebra(&self, algebra: Arc<AlgebraDescriptor>) -> Result<LieForm<C>> {
        if algebra.dim() != self.algebra.dim() {
            return Err(Error::AlgebraMismatch(self.algebra.name().to_string(), algebra.name().to_string()));
        }
        Ok(LieForm { algebra, domain: self.domain.clone(), degree: self.degree, comps: self.comps.clone() })
    }
}

fn check_gram(beta: &BilinearForm, alg: &AlgebraDescriptor) -> Result<()> {
    if beta.gram.rows() != alg.dim() {
        return Err(Error::DimensionMismatch(format!(
            "bilinear form of size {} on an algebra of dimension {}",
            beta.gram.rows(),
            alg.dim()
        )));
    }
    Ok(())
}

fn prepare_all<C: Coeff>(comps: &[C]) -> Vec<Option<C::Prepared<'_>>> {
    comps.iter().map(|c| (!c.is_zero()).then(|| c.prepare())).collect()
}

pub fn wedge<C: Coeff>(a: &ScalarForm<C>, b: &ScalarForm<C>) -> Result<ScalarForm<C>> {
    a.wedge(b)
}

pub fn lie_bracket_forms<C: Coeff>(a: &LieForm<C>, b: &LieForm<C>) -> Result<LieForm<C>> {
    a.lie_bracket(b)
}

pub fn exterior_d<C: Coeff>(a: &LieForm<C>) -> Result<LieForm<C>> {
    a.exterior_d()
}

pub fn covariant_d<C: Coeff>(conn: &LieForm<C>, a: &LieForm<C>) -> Result<LieForm<C>> {
    a.covariant_d(conn)
}

pub fn beta_pair<C: Coeff>(beta: &BilinearForm, a: &LieForm<C>, b: &LieForm<C>) -> Result<ScalarForm<C>> {
    a.beta_pair(beta, b)
}

pub fn integrate<C: Coeff>(s: &ScalarForm<C>) -> Result<C::Value> {
    s.integrate()
}
