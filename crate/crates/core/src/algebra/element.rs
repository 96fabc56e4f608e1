use std::fmt;
use std::sync::Arc;

use super::{AlgebraDescriptor, StarKind};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::Q;

/// Exact element of a gauge algebra, stored by coordinates in its basis.
#[derive(Clone)]
pub struct AlgebraElement {
    algebra: Arc<AlgebraDescriptor>,
    coeffs: Vec<Q>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &AlgebraElement) -> bool {
        self.algebra.name() == other.algebra.name() && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.algebra.name())?;
        f.debug_list().entries(&self.coeffs).finish()
    }
}

pub(crate) fn check_same(a: &AlgebraDescriptor, b: &AlgebraDescriptor) -> Result<()> {
    if a.name() != b.name() || a.dim() != b.dim() {
        return Err(Error::AlgebraMismatch(a.name().to_string(), b.name().to_string()));
    }
    Ok(())
}

impl AlgebraElement {
    pub fn new(algebra: Arc<AlgebraDescriptor>, coeffs: Vec<Q>) -> Result<AlgebraElement> {
        if coeffs.len() != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} (dim {})",
                coeffs.len(),
                algebra.name(),
                algebra.dim()
            )));
        }
        Ok(AlgebraElement { algebra, coeffs })
    }

    pub fn zero(algebra: Arc<AlgebraDescriptor>) -> AlgebraElement {
        let d = algebra.dim();
        AlgebraElement { algebra, coeffs: vec![Q::ZERO; d] }
    }

    pub fn basis(algebra: Arc<AlgebraDescriptor>, i: usize) -> AlgebraElement {
        let mut x = AlgebraElement::zero(algebra);
        x.coeffs[i] = Q::ONE;
        x
    }

    pub fn algebra(&self) -> &Arc<AlgebraDescriptor> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Q::is_zero)
    }

    pub fn matrix(&self) -> QMatrix {
        self.algebra.matrix_of(&self.coeffs)
    }

    fn with(&self, coeffs: Vec<Q>) -> AlgebraElement {
        AlgebraElement { algebra: self.algebra.clone(), coeffs }
    }

    pub fn add(&self, rhs: &AlgebraElement) -> Result<AlgebraElement> {
        check_same(&self.algebra, &rhs.algebra)?;
        Ok(self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| *a + *b).collect()))
    }

    pub fn sub(&self, rhs: &AlgebraElement) -> Result<AlgebraElement> {
        check_same(&self.algebra, &rhs.algebra)?;
        Ok(self.with(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| *a - *b).collect()))
    }

    pub fn scale(&self, s: Q) -> AlgebraElement {
        self.with(self.coeffs.iter().map(|a| *a * s).collect())
    }

    pub fn bracket(&self, rhs: &AlgebraElement) -> Result<AlgebraElement> {
        check_same(&self.algebra, &rhs.algebra)?;
        Ok(self.with(self.algebra.bracket_coeffs(&self.coeffs, &rhs.coeffs)))
    }

    pub fn h_part(&self) -> AlgebraElement {
        let alg = &self.algebra;
        self.with((0..alg.dim()).map(|i| if alg.is_h_index(i) { self.coeffs[i] } else { Q::ZERO }).collect())
    }

    pub fn p_part(&self) -> AlgebraElement {
        let alg = &self.algebra;
        self.with((0..alg.dim()).map(|i| if alg.is_h_index(i) { Q::ZERO } else { self.coeffs[i] }).collect())
    }

    pub fn involution(&self) -> AlgebraElement {
        let alg = &self.algebra;
        self.with((0..alg.dim()).map(|i| if alg.is_h_index(i) { self.coeffs[i] } else { -self.coeffs[i] }).collect())
    }

    /// Internal Hodge dual. On `so41`/`so32`/`iso31` this is only defined for
    /// stabilizer-valued elements.
    pub fn star(&self) -> Result<AlgebraElement> {
        if let StarKind::Stabilizer { .. } = self.algebra.star_kind() {
            if !self.p_part().is_zero() {
                return Err(Error::Unsupported(format!(
                    "{} has no Hodge star on the full algebra; only the so(3,1) stabilizer carries one",
                    self.algebra.name()
                )));
            }
        }
        Ok(self.with(self.algebra.star_matrix().mul_vec(&self.coeffs)))
    }
}
