//! Gauge Lie algebras of the de Sitter, Minkowski and anti de Sitter models,
//! realized exactly in their fundamental matrix representation.
//!
//! Basis conventions (frozen, so structure constants are reproducible):
//!
//! * The fundamental representation has size `N = n + 1`, indices
//!   `0..n`. The stabilizer metric is `η = diag(-1, 1, …, 1)` for the
//!   Lorentzian algebras and the identity for `so4`/`iso3`.
//! * `m_ab = E_ab η_bb − E_ba η_aa` (upper-left block).
//! * For `n = 3` the stabilizer basis is the dual `J_c = −m_{c+1,c+2}`
//!   (indices mod 3), so that on `iso3` `[J_0, J_1] = J_2`. For `n = 4` it
//!   is `m_ab`, `a < b`, in lexicographic order.
//! * Transvections occupy the last column/row: `P_a = E_an − ε η_aa E_na`
//!   with `ε` the sign of the cosmological constant.
//! * Basis order is stabilizer first, then `P_0 … P_{n−1}`.
//!
//! The Killing form is the raw double contraction `C^γ_{αδ} C^δ_{βγ}`, with no
//! rescaling.

mod element;
mod forms;
mod json;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::Q;

pub use element::AlgebraElement;
pub use forms::{
    invariant_form, invariant_form_space, killing_form, selfdual_split, sl2_isomorphism, stabilizer_form, BilinearForm,
    FormDomain, SimpleFactor,
};
pub use json::AlgebraJson;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraName {
    So31,
    Iso21,
    So22,
    So41,
    So32,
    So4,
    Iso3,
    Iso31,
}

impl AlgebraName {
    pub const ALL: [AlgebraName; 8] = [
        AlgebraName::So31,
        AlgebraName::Iso21,
        AlgebraName::So22,
        AlgebraName::So41,
        AlgebraName::So32,
        AlgebraName::So4,
        AlgebraName::Iso3,
        AlgebraName::Iso31,
    ];

    /// The three 3d gravity algebras, ordered by `Λ > 0, = 0, < 0`.
    pub const GRAVITY_3D: [AlgebraName; 3] = [AlgebraName::So31, AlgebraName::Iso21, AlgebraName::So22];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraName::So31 => "so31",
            AlgebraName::Iso21 => "iso21",
            AlgebraName::So22 => "so22",
            AlgebraName::So41 => "so41",
            AlgebraName::So32 => "so32",
            AlgebraName::So4 => "so4",
            AlgebraName::Iso3 => "iso3",
            AlgebraName::Iso31 => "iso31",
        }
    }

    pub fn spacetime_dim(self) -> usize {
        match self {
            AlgebraName::So41 | AlgebraName::So32 | AlgebraName::Iso31 => 4,
            _ => 3,
        }
    }

    pub fn lambda_sign(self) -> i8 {
        match self {
            AlgebraName::So31 | AlgebraName::So41 | AlgebraName::So4 => 1,
            AlgebraName::Iso21 | AlgebraName::Iso3 | AlgebraName::Iso31 => 0,
            AlgebraName::So22 | AlgebraName::So32 => -1,
        }
    }

    pub fn is_lorentzian(self) -> bool {
        !matches!(self, AlgebraName::So4 | AlgebraName::Iso3)
    }
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgebraName {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlgebraName> {
        AlgebraName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownAlgebra(s.to_string()))
    }
}

/// Which internal Hodge star an algebra carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarKind {
    /// Six-dimensional algebra identified with `Λ²ℝ⁴`; commutes with `ad`.
    Full { square: i8 },
    /// Wigner contraction (`iso3`, `iso21`): `⋆J_c = P_c`, `⋆P_c = s·J_c`.
    /// Commutes with `ad` of the stabilizer only.
    Contraction { square: i8 },
    /// Ten-dimensional algebra; star exists on the `so(3,1)` stabilizer only.
    Stabilizer { square: i8 },
}

impl StarKind {
    pub fn square(self) -> i8 {
        match self {
            StarKind::Full { square } | StarKind::Contraction { square } | StarKind::Stabilizer { square } => square,
        }
    }
}

/// Exact description of one gauge algebra.
#[derive(Clone)]
pub struct AlgebraDescriptor {
    name: AlgebraName,
    matrix_dim: usize,
    spacetime_dim: usize,
    lambda_sign: i8,
    metric: Vec<i8>,
    basis: Vec<QMatrix>,
    labels: Vec<String>,
    h_indices: Vec<usize>,
    p_indices: Vec<usize>,
    constants: Vec<Q>,
    sparse: Vec<Vec<(usize, Q)>>,
    star: StarKind,
    star_matrix: QMatrix,
    killing: QMatrix,
    star_gram: QMatrix,
}

impl fmt::Debug for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraDescriptor")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("spacetime_dim", &self.spacetime_dim)
            .field("lambda_sign", &self.lambda_sign)
            .field("star", &self.star)
            .finish()
    }
}

/// Builds a descriptor by name, with the default contraction star (`⋆² = +1`).
pub fn build_algebra(name: &str) -> Result<Arc<AlgebraDescriptor>> {
    Ok(Arc::new(AlgebraDescriptor::new(name.parse()?)))
}

fn unit(n: usize, i: usize, j: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    m[(i, j)] = Q::ONE;
    m
}

/// Hodge dual of an `so(g)` matrix through its bivector, for a diagonal
/// 4-dimensional metric `g`.
fn bivector_star(x: &QMatrix, g: &[i8]) -> QMatrix {
    let gi = |i: usize| Q::int(g[i] as i128);
    let mut b = QMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            b[(i, j)] = x[(i, j)] * gi(j);
        }
    }
    let mut sb = QMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let mut acc = Q::ZERO;
            for k in 0..4 {
                for l in 0..4 {
                    let e = levi_civita4([i, j, k, l]);
                    if e != 0 {
                        acc += Q::int(e as i128) * b[(k, l)];
                    }
                }
            }
            sb[(i, j)] = acc * Q::new(1, 2) * gi(i) * gi(j);
        }
    }
    let mut out = QMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = sb[(i, j)] * gi(j);
        }
    }
    out
}

fn levi_civita4(idx: [usize; 4]) -> i8 {
    let mut sign = 1;
    let mut v = idx;
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i] == v[j] {
                return 0;
            }
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    v.sort_unstable();
    sign
}

impl AlgebraDescriptor {
    pub fn new(name: AlgebraName) -> AlgebraDescriptor {
        AlgebraDescriptor::with_contraction_square(name, 1)
    }

    /// Like [`AlgebraDescriptor::new`], choosing `⋆² = s` (`s = ±1`) on the
    /// Wigner contractions `iso3`/`iso21`. Ignored for other algebras.
    pub fn with_contraction_square(name: AlgebraName, s: i8) -> AlgebraDescriptor {
        assert!(s == 1 || s == -1, "contraction star square must be ±1");
        let n = name.spacetime_dim();
        let big_n = n + 1;
        let eps = name.lambda_sign();
        let metric: Vec<i8> = (0..n).map(|a| if a == 0 && name.is_lorentzian() { -1 } else { 1 }).collect();
        let eta = |a: usize| Q::int(metric[a] as i128);

        let m = |a: usize, b: usize| unit(big_n, a, b).scale(eta(b)).sub(&unit(big_n, b, a).scale(eta(a)));

        let mut basis = Vec::new();
        let mut labels = Vec::new();
        if n == 3 {
            for c in 0..3 {
                let (a, b) = ((c + 1) % 3, (c + 2) % 3);
                basis.push(m(a, b).scale(-Q::ONE));
                labels.push(format!("J{c}"));
            }
        } else {
            for a in 0..n {
                for b in a + 1..n {
                    basis.push(m(a, b));
                    labels.push(format!("M{a}{b}"));
                }
            }
        }
        let dim_h = basis.len();
        for a in 0..n {
            let p = unit(big_n, a, n).sub(&unit(big_n, n, a).scale(Q::int(eps as i128) * eta(a)));
            basis.push(p);
            labels.push(format!("P{a}"));
        }
        let dim = basis.len();
        let h_indices: Vec<usize> = (0..dim_h).collect();
        let p_indices: Vec<usize> = (dim_h..dim).collect();

        let mut alg = AlgebraDescriptor {
            name,
            matrix_dim: big_n,
            spacetime_dim: n,
            lambda_sign: eps,
            metric,
            basis,
            labels,
            h_indices,
            p_indices,
            constants: vec![Q::ZERO; dim * dim * dim],
            sparse: Vec::new(),
            star: StarKind::Full { square: 1 },
            star_matrix: QMatrix::zeros(dim, dim),
            killing: QMatrix::zeros(dim, dim),
            star_gram: QMatrix::zeros(dim, dim),
        };
        for a in 0..dim {
            for b in 0..dim {
                let c = alg.basis[a].commutator(&alg.basis[b]);
                let coeffs = alg.decompose(&c).expect("basis closes under the commutator");
                for (g, v) in coeffs.into_iter().enumerate() {
                    alg.constants[(a * dim + b) * dim + g] = v;
                }
            }
        }
        alg.build_star(s);
        alg.refresh_derived();
        alg
    }

    fn build_star(&mut self, contraction_square: i8) {
        let dim = self.dim();
        let mut star = QMatrix::zeros(dim, dim);
        let kind = match (self.spacetime_dim, self.lambda_sign) {
            (3, 0) => {
                // ⋆J_c = T_c P_c with T the (unique up to scale) stabilizer-equivariant
                // map 𝔥 → 𝔭, normalized so ⋆J_0 = P_0; then ⋆P_c = s/T_c J_c.
                let t = self.equivariant_h_to_p();
                for (c, &j) in self.h_indices.iter().enumerate() {
                    let p = self.p_indices[c];
                    star[(p, j)] = t[c];
                    star[(j, p)] = Q::int(contraction_square as i128) / t[c];
                }
                StarKind::Contraction { square: contraction_square }
            }
            (3, eps) => {
                let mut g = self.metric.clone();
                g.push(eps);
                for b in 0..dim {
                    let sx = bivector_star(&self.basis[b], &g);
                    let coeffs = self.decompose(&sx).expect("Hodge dual stays in the algebra");
                    for (a, v) in coeffs.into_iter().enumerate() {
                        star[(a, b)] = v;
                    }
                }
                StarKind::Full { square: if g.iter().filter(|&&x| x < 0).count() % 2 == 1 { -1 } else { 1 } }
            }
            _ => {
                let g = self.metric.clone();
                for &b in &self.h_indices {
                    let block = QMatrix::from_rows(
                        &(0..4).map(|i| (0..4).map(|j| self.basis[b][(i, j)]).collect()).collect::<Vec<_>>(),
                    );
                    let sx4 = bivector_star(&block, &g);
                    let mut sx = QMatrix::zeros(self.matrix_dim, self.matrix_dim);
                    for i in 0..4 {
                        for j in 0..4 {
                            sx[(i, j)] = sx4[(i, j)];
                        }
                    }
                    let coeffs = self.decompose(&sx).expect("Hodge dual stays in the stabilizer");
                    for (a, v) in coeffs.into_iter().enumerate() {
                        star[(a, b)] = v;
                    }
                }
                StarKind::Stabilizer { square: -1 }
            }
        };
        self.star = kind;
        self.star_matrix = star;
    }

    /// Diagonal of the map `J_c ↦ T_c P_c` commuting with `ad_𝔥`, scaled to `T_0 = 1`.
    fn equivariant_h_to_p(&self) -> Vec<Q> {
        let h = &self.h_indices;
        let p = &self.p_indices;
        let m = h.len();
        let mut rows = Vec::new();
        for &a in h {
            for (bi, &b) in h.iter().enumerate() {
                for (ci, &c) in p.iter().enumerate() {
                    let mut row = vec![Q::ZERO; m * m];
                    for (gi, &g) in h.iter().enumerate() {
                        row[ci * m + gi] += self.c(a, b, g);
                    }
                    for (di, &d) in p.iter().enumerate() {
                        row[di * m + bi] -= self.c(a, d, c);
                    }
                    rows.push(row);
                }
            }
        }
        let null = QMatrix::from_rows(&rows).nullspace();
        assert_eq!(null.len(), 1, "stabilizer-equivariant map 𝔥 → 𝔭 must be unique up to scale");
        let v = &null[0];
        let scale = v[0];
        (0..m)
            .map(|c| {
                for d in 0..m {
                    assert!(c == d || v[c * m + d].is_zero(), "equivariant map is diagonal in the frozen basis");
                }
                v[c * m + c] / scale
            })
            .collect()
    }

    /// Recomputes sparse constants and the invariant grams from the dense
    /// structure constants.
    fn refresh_derived(&mut self) {
        let dim = self.dim();
        self.sparse = (0..dim * dim)
            .map(|ab| {
                (0..dim)
                    .filter_map(|g| {
                        let v = self.constants[ab * dim + g];
                        (!v.is_zero()).then_some((g, v))
                    })
                    .collect()
            })
            .collect();
        let mut k = QMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = Q::ZERO;
                for g in 0..dim {
                    for d in 0..dim {
                        let x = self.c(a, d, g);
                        if !x.is_zero() {
                            acc += x * self.c(b, g, d);
                        }
                    }
                }
                k[(a, b)] = acc;
            }
        }
        self.killing = k;
        let ks = self.killing.mul(&self.star_matrix);
        let mut sg = QMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                let (ha, hb) = (self.is_h_index(a), self.is_h_index(b));
                sg[(a, b)] = match self.star {
                    StarKind::Full { .. } => ks[(a, b)],
                    // K(X_h, ⋆Y_p) + K(⋆X_p, Y_h)
                    StarKind::Contraction { .. } => match (ha, hb) {
                        (true, false) => ks[(a, b)],
                        (false, true) => ks[(b, a)],
                        _ => Q::ZERO,
                    },
                    StarKind::Stabilizer { .. } => {
                        if ha && hb {
                            ks[(a, b)]
                        } else {
                            Q::ZERO
                        }
                    }
                };
            }
        }
        self.star_gram = sg;
    }

    /// A copy with one structure constant shifted by `delta`. Used to
    /// exercise failure paths of the verification suites.
    pub fn with_perturbed_constant(&self, alpha: usize, beta: usize, gamma: usize, delta: Q) -> AlgebraDescriptor {
        let mut out = self.clone();
        let dim = self.dim();
        out.constants[(alpha * dim + beta) * dim + gamma] += delta;
        out.refresh_derived();
        out
    }

    pub fn name(&self) -> AlgebraName {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_dim(&self) -> usize {
        self.matrix_dim
    }

    pub fn spacetime_dim(&self) -> usize {
        self.spacetime_dim
    }

    pub fn lambda_sign(&self) -> i8 {
        self.lambda_sign
    }

    /// Diagonal of the stabilizer metric η.
    pub fn metric(&self) -> &[i8] {
        &self.metric
    }

    pub fn basis(&self) -> &[QMatrix] {
        &self.basis
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn h_indices(&self) -> &[usize] {
        &self.h_indices
    }

    pub fn p_indices(&self) -> &[usize] {
        &self.p_indices
    }

    #[inline]
    pub fn is_h_index(&self, a: usize) -> bool {
        a < self.h_indices.len()
    }

    /// `C^γ_{αβ}`.
    #[inline]
    pub fn c(&self, alpha: usize, beta: usize, gamma: usize) -> Q {
        let d = self.dim();
        self.constants[(alpha * d + beta) * d + gamma]
    }

    /// Nonzero `(γ, C^γ_{αβ})` for a basis pair.
    #[inline]
    pub fn bracket_terms(&self, alpha: usize, beta: usize) -> &[(usize, Q)] {
        &self.sparse[alpha * self.dim() + beta]
    }

    pub fn star_kind(&self) -> StarKind {
        self.star
    }

    /// Matrix of `⋆` in the algebra basis, `(⋆X)^γ = S_{γβ} X^β`.
    pub fn star_matrix(&self) -> &QMatrix {
        &self.star_matrix
    }

    pub fn killing(&self) -> &QMatrix {
        &self.killing
    }

    /// Gram of the star-twisted form `tr(X⋆Y)`.
    pub fn star_gram(&self) -> &QMatrix {
        &self.star_gram
    }

    /// Coordinates of a matrix in the algebra basis, if it lies in the span.
    pub fn decompose(&self, m: &QMatrix) -> Option<Vec<Q>> {
        let n = self.matrix_dim;
        let dim = self.basis.len();
        let mut sys = QMatrix::zeros(n * n, dim);
        let mut rhs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                for (b, v) in self.basis.iter().enumerate() {
                    sys[(i * n + j, b)] = v[(i, j)];
                }
                rhs.push(m[(i, j)]);
            }
        }
        sys.solve(&rhs)
    }

    /// `Σ X^α v_α` as a matrix.
    pub fn matrix_of(&self, coeffs: &[Q]) -> QMatrix {
        let n = self.matrix_dim;
        let mut out = QMatrix::zeros(n, n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = out.add(&b.scale(*c));
            }
        }
        out
    }

    /// Exact bracket of coordinate vectors through the structure constants.
    pub fn bracket_coeffs(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let dim = self.dim();
        let mut out = vec![Q::ZERO; dim];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let xy = *xa * *yb;
                for &(g, c) in self.bracket_terms(a, b) {
                    out[g] += c * xy;
                }
            }
        }
        out
    }

    pub fn has_full_star(&self) -> bool {
        matches!(self.star, StarKind::Full { .. } | StarKind::Contraction { .. })
    }

    /// Exact structural self-check over all basis tuples.
    pub fn structure_check(&self) -> StructureCheck {
        let dim = self.dim();
        let mut chk = StructureCheck::default();
        for a in 0..dim {
            for b in 0..dim {
                let from_matrices = self.basis[a].commutator(&self.basis[b]);
                let from_constants = self.matrix_of(&(0..dim).map(|g| self.c(a, b, g)).collect::<Vec<_>>());
                if from_matrices != from_constants {
                    chk.closure_failures += 1;
                }
                for g in 0..dim {
                    if self.c(a, b, g) + self.c(b, a, g) != Q::ZERO {
                        chk.antisymmetry_failures += 1;
                    }
                    let (ha, hb, hg) = (self.is_h_index(a), self.is_h_index(b), self.is_h_index(g));
                    // Symmetric grading: grade(γ) must equal grade(α) + grade(β) mod 2.
                    if !self.c(a, b, g).is_zero() && (ha == hb) != hg {
                        chk.grading_failures += 1;
                    }
                }
                let kab = self.killing[(a, b)];
                if kab != self.killing[(b, a)] {
                    chk.killing_symmetry_failures += 1;
                }
            }
        }
        let e = |i: usize| {
            let mut v = vec![Q::ZERO; dim];
            v[i] = Q::ONE;
            v
        };
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    // [a,[b,c]] + [b,[c,a]] + [c,[a,b]]
                    let t1 = self.bracket_coeffs(&e(a), &self.bracket_coeffs(&e(b), &e(c)));
                    let t2 = self.bracket_coeffs(&e(b), &self.bracket_coeffs(&e(c), &e(a)));
                    let t3 = self.bracket_coeffs(&e(c), &self.bracket_coeffs(&e(a), &e(b)));
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(*x + *y + *z).is_zero()) {
                        chk.jacobi_failures += 1;
                    }
                    // K([c,a],b) + K(a,[c,b]) = 0
                    let ca = self.bracket_coeffs(&e(c), &e(a));
                    let cb = self.bracket_coeffs(&e(c), &e(b));
                    if self.killing.bilinear(&ca, &e(b)) + self.killing.bilinear(&e(a), &cb) != Q::ZERO {
                        chk.killing_invariance_failures += 1;
                    }
                }
            }
        }
        chk
    }

    /// Jacobi residual array `[α,[β,γ]] + cyclic`, flattened `(α,β,γ,δ)`.
    pub fn jacobi_residuals(&self) -> Vec<Q> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(dim.pow(4));
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let mut acc = Q::ZERO;
                        for e in 0..dim {
                            acc += self.c(b, c, e) * self.c(a, e, d)
                                + self.c(c, a, e) * self.c(b, e, d)
                                + self.c(a, b, e) * self.c(c, e, d);
                        }
                        out.push(acc);
                    }
                }
            }
        }
        out
    }
}

/// Counts of violated structural identities; all zero for a valid algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureCheck {
    pub closure_failures: usize,
    pub antisymmetry_failures: usize,
    pub jacobi_failures: usize,
    pub grading_failures: usize,
    pub killing_symmetry_failures: usize,
    pub killing_invariance_failures: usize,
}

impl StructureCheck {
    pub fn total(&self) -> usize {
        self.closure_failures
            + self.antisymmetry_failures
            + self.jacobi_failures
            + self.grading_failures
            + self.killing_symmetry_failures
            + self.killing_invariance_failures
    }

    pub fn passed(&self) -> bool {
        self.total() == 0
    }
}

/// Killing gram `K_{αβ} = C^γ_{αδ} C^δ_{βγ}`.
pub fn killing_gram(alg: &AlgebraDescriptor) -> QMatrix {
    alg.killing().clone()
}

/// `[X, Y]` through the structure constants.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    x.bracket(y)
}

/// `⋆X`.
pub fn hodge_star(x: &AlgebraElement) -> Result<AlgebraElement> {
    x.star()
}

/// `X̃ = X_h − X_p`.
pub fn involution(x: &AlgebraElement) -> AlgebraElement {
    x.involution()
}
