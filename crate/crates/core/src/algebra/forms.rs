use std::sync::Arc;

use super::element::AlgebraElement;
use super::{AlgebraDescriptor, StarKind};
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::Q;

/// Where a bilinear form lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormDomain {
    Full,
    /// Stabilizer block only; entries touching translations are zero.
    Stabilizer,
}

/// `β(X, Y) = tr(X (c0 + c1⋆) Y)` realized as `c0·K + c1·S`, with `K` the
/// Killing gram and `S` the star-twisted gram.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm {
    pub c0: Q,
    pub c1: Q,
    pub gram: QMatrix,
    pub degenerate: bool,
    pub domain: FormDomain,
}

impl BilinearForm {
    pub fn eval(&self, x: &[Q], y: &[Q]) -> Q {
        self.gram.bilinear(x, y)
    }

    pub fn eval_elements(&self, x: &AlgebraElement, y: &AlgebraElement) -> Q {
        self.eval(x.coeffs(), y.coeffs())
    }

    #[inline]
    pub fn entry(&self, a: usize, b: usize) -> Q {
        self.gram[(a, b)]
    }

    /// `(c0·K + c1·S)` over `dim` basis indices, nonzero entries only.
    pub fn sparse_entries(&self) -> Vec<(usize, usize, Q)> {
        let d = self.gram.rows();
        let mut out = Vec::new();
        for a in 0..d {
            for b in 0..d {
                let v = self.gram[(a, b)];
                if !v.is_zero() {
                    out.push((a, b, v));
                }
            }
        }
        out
    }
}

fn combine(alg: &AlgebraDescriptor, c0: Q, c1: Q) -> QMatrix {
    alg.killing().scale(c0).add(&alg.star_gram().scale(c1))
}

/// The two-parameter invariant form on a star-bearing algebra.
pub fn invariant_form(alg: &AlgebraDescriptor, c0: Q, c1: Q) -> Result<BilinearForm> {
    if !alg.has_full_star() {
        return Err(Error::Unsupported(format!(
            "{} has no Hodge star on the full algebra; use the stabilizer form",
            alg.name()
        )));
    }
    let gram = combine(alg, c0, c1);
    let degenerate = gram.det().is_zero();
    Ok(BilinearForm { c0, c1, gram, degenerate, domain: FormDomain::Full })
}

/// `c0·K + c1·K(·, ⋆·)` restricted to the `so(3,1)` stabilizer of a
/// ten-dimensional algebra. Degeneracy refers to the stabilizer block.
pub fn stabilizer_form(alg: &AlgebraDescriptor, c0: Q, c1: Q) -> Result<BilinearForm> {
    if !matches!(alg.star_kind(), StarKind::Stabilizer { .. }) {
        return Err(Error::Unsupported(format!("{} has no stabilizer-only star", alg.name())));
    }
    let h = alg.h_indices();
    let mut gram = combine(alg, c0, c1);
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            if !(alg.is_h_index(a) && alg.is_h_index(b)) {
                gram[(a, b)] = Q::ZERO;
            }
        }
    }
    let block = QMatrix::from_rows(&h.iter().map(|&a| h.iter().map(|&b| gram[(a, b)]).collect()).collect::<Vec<_>>());
    let degenerate = block.det().is_zero();
    Ok(BilinearForm { c0, c1, gram, degenerate, domain: FormDomain::Stabilizer })
}

/// The Killing form as a [`BilinearForm`] with `(c0, c1) = (1, 0)`; defined on
/// every algebra.
pub fn killing_form(alg: &AlgebraDescriptor) -> BilinearForm {
    let gram = alg.killing().clone();
    let degenerate = gram.det().is_zero();
    BilinearForm { c0: Q::ONE, c1: Q::ZERO, gram, degenerate, domain: FormDomain::Full }
}

/// Basis of all symmetric ad-invariant bilinear forms, as gram matrices.
pub fn invariant_form_space(alg: &AlgebraDescriptor) -> Vec<QMatrix> {
    let d = alg.dim();
    let mut slot = vec![vec![0usize; d]; d];
    let mut k = 0;
    for i in 0..d {
        for j in i..d {
            slot[i][j] = k;
            slot[j][i] = k;
            k += 1;
        }
    }
    let unknowns = k;
    // β([Z,X],Y) + β(X,[Z,Y]) = 0 for all basis Z, X ≤ Y.
    let mut rows = Vec::new();
    for z in 0..d {
        for x in 0..d {
            for y in x..d {
                let mut row = vec![Q::ZERO; unknowns];
                for &(g, c) in alg.bracket_terms(z, x) {
                    row[slot[g][y]] += c;
                }
                for &(g, c) in alg.bracket_terms(z, y) {
                    row[slot[x][g]] += c;
                }
                if row.iter().any(|v| !v.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let null = if rows.is_empty() {
        (0..unknowns).map(|i| (0..unknowns).map(|j| if i == j { Q::ONE } else { Q::ZERO }).collect()).collect()
    } else {
        QMatrix::from_rows(&rows).nullspace()
    };
    null.into_iter()
        .map(|v| {
            let mut m = QMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = v[slot[i][j]];
                }
            }
            m
        })
        .collect()
}

fn require_split_star(alg: &AlgebraDescriptor) -> Result<()> {
    match alg.star_kind() {
        StarKind::Full { square: 1 } => Ok(()),
        _ => Err(Error::Unsupported(format!(
            "self-dual splitting needs a full star with square +1 (so22, so4); {} has {:?}",
            alg.name(),
            alg.star_kind()
        ))),
    }
}

/// `X± = ½(X ± ⋆X)`.
pub fn selfdual_split(x: &AlgebraElement) -> Result<(AlgebraElement, AlgebraElement)> {
    require_split_star(x.algebra())?;
    let sx = x.star()?;
    let half = Q::new(1, 2);
    Ok((x.add(&sx)?.scale(half), x.sub(&sx)?.scale(half)))
}

/// One simple three-dimensional factor of `so22` or `so4`.
#[derive(Clone, Debug)]
pub struct SimpleFactor {
    pub basis: Vec<AlgebraElement>,
    /// `C^c_{ab}` in the factor basis, flattened `(a·3 + b)·3 + c`.
    pub structure_constants: Vec<Q>,
    /// `κ_c` with `[X_a, X_{a+1}] = κ_{a+2} X_{a+2}` (indices mod 3).
    pub scaling: [Q; 3],
    /// True when the only nonzero constants are the cyclic ones above.
    pub cyclic_pattern: bool,
    pub killing: QMatrix,
}

fn factor(alg: &Arc<AlgebraDescriptor>, sign: Q) -> Result<SimpleFactor> {
    let half = Q::new(1, 2);
    let mut basis = Vec::new();
    for &j in alg.h_indices() {
        let x = AlgebraElement::basis(alg.clone(), j);
        basis.push(x.add(&x.star()?.scale(sign))?.scale(half));
    }
    let d = alg.dim();
    let cols = QMatrix::from_rows(&(0..d).map(|i| basis.iter().map(|b| b.coeffs()[i]).collect()).collect::<Vec<_>>());
    let mut c = vec![Q::ZERO; 27];
    for a in 0..3 {
        for b in 0..3 {
            let br = basis[a].bracket(&basis[b])?;
            let coords = cols
                .solve(br.coeffs())
                .ok_or_else(|| Error::Unsupported("eigenspace is not closed under the bracket".into()))?;
            for (g, v) in coords.into_iter().enumerate() {
                c[(a * 3 + b) * 3 + g] = v;
            }
        }
    }
    let mut scaling = [Q::ZERO; 3];
    let mut cyclic = true;
    for a in 0..3 {
        for b in 0..3 {
            for g in 0..3 {
                let v = c[(a * 3 + b) * 3 + g];
                let distinct = a != b && b != g && a != g;
                if !distinct && !v.is_zero() {
                    cyclic = false;
                }
                if b == (a + 1) % 3 && g == (a + 2) % 3 {
                    scaling[g] = v;
                }
                if distinct && b == (a + 2) % 3 && v != -c[(b * 3 + a) * 3 + g] {
                    cyclic = false;
                }
            }
        }
    }
    if scaling.iter().any(Q::is_zero) {
        cyclic = false;
    }
    let mut killing = QMatrix::zeros(3, 3);
    for a in 0..3 {
        for b in 0..3 {
            let mut acc = Q::ZERO;
            for g in 0..3 {
                for dd in 0..3 {
                    acc += c[(a * 3 + dd) * 3 + g] * c[(b * 3 + g) * 3 + dd];
                }
            }
            killing[(a, b)] = acc;
        }
    }
    Ok(SimpleFactor { basis, structure_constants: c, scaling, cyclic_pattern: cyclic, killing })
}

/// Self-dual and anti-self-dual subalgebras `(𝔤⁺, 𝔤⁻)` of `so22` (or `so4`).
pub fn sl2_isomorphism(alg: &Arc<AlgebraDescriptor>) -> Result<(SimpleFactor, SimpleFactor)> {
    require_split_star(alg)?;
    Ok((factor(alg, Q::ONE)?, factor(alg, -Q::ONE)?))
}
