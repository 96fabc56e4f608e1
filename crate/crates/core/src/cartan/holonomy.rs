//! Path-ordered exponentials of matrix-valued connections on a chart.
//!
//! Transport convention: `dH/dt = −A(γ'(t)) H`, `H(0) = 1`. The integrator is
//! Lie–Euler with midpoint sampling, `H ← exp(−A(γ(t_mid)) · γ'(t_mid) Δt) H`,
//! which is second order and keeps `H` in the group up to roundoff.

use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraDescriptor;
use crate::error::{Error, Result};

/// A connection given by its coordinate components `A_i(x)` as matrices.
pub trait MatrixConnection {
    fn chart_dim(&self) -> usize;
    fn matrix_dim(&self) -> usize;
    fn components(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>>;

    /// Distance of a transport matrix from the structure group.
    fn group_defect(&self, h: &DMatrix<f64>) -> f64 {
        orthogonality_defect(h)
    }
}

fn orthogonality_defect(h: &DMatrix<f64>) -> f64 {
    let n = h.nrows();
    (h.transpose() * h - DMatrix::identity(n, n)).amax()
}

/// Defect of `h` from the model group of `alg`: `hᵀGh = G` with
/// `G = diag(η, ε)`, or the affine block structure when `ε = 0`.
pub(crate) fn model_group_defect(alg: &AlgebraDescriptor, h: &DMatrix<f64>) -> f64 {
    let n = alg.spacetime_dim();
    let eta = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, alg.metric().iter().map(|&s| s as f64)));
    if alg.lambda_sign() == 0 {
        let lam = h.view((0, 0), (n, n)).into_owned();
        let block = (lam.transpose() * &eta * &lam - &eta).amax();
        let mut row: f64 = 0.0;
        for j in 0..=n {
            let target = if j == n { 1.0 } else { 0.0 };
            row = row.max((h[(n, j)] - target).abs());
        }
        block.max(row)
    } else {
        let mut g = DMatrix::zeros(n + 1, n + 1);
        g.view_mut((0, 0), (n, n)).copy_from(&eta);
        g[(n, n)] = alg.lambda_sign() as f64;
        (h.transpose() * &g * h - g).amax()
    }
}

/// Public entry to [`MatrixConnection::group_defect`].
pub fn group_defect(conn: &dyn MatrixConnection, h: &DMatrix<f64>) -> f64 {
    conn.group_defect(h)
}

/// One piece of a path in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PathSegment {
    Line {
        from: Vec<f64>,
        to: Vec<f64>,
    },
    /// `center + radius (cos θ, sin θ)` in the coordinate plane `axes`,
    /// `θ` from `start` to `end` (radians).
    Arc {
        center: Vec<f64>,
        radius: f64,
        start: f64,
        end: f64,
        #[serde(default = "default_axes")]
        axes: [usize; 2],
    },
}

fn default_axes() -> [usize; 2] {
    [0, 1]
}

impl PathSegment {
    fn dim(&self) -> usize {
        match self {
            PathSegment::Line { from, .. } => from.len(),
            PathSegment::Arc { center, .. } => center.len(),
        }
    }

    pub fn position(&self, t: f64) -> Vec<f64> {
        match self {
            PathSegment::Line { from, to } => from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect(),
            PathSegment::Arc { center, radius, start, end, axes } => {
                let th = start + t * (end - start);
                let mut p = center.clone();
                p[axes[0]] += radius * th.cos();
                p[axes[1]] += radius * th.sin();
                p
            }
        }
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        match self {
            PathSegment::Line { from, to } => from.iter().zip(to).map(|(a, b)| b - a).collect(),
            PathSegment::Arc { center, radius, start, end, axes } => {
                let th = start + t * (end - start);
                let w = end - start;
                let mut v = vec![0.0; center.len()];
                v[axes[0]] = -radius * w * th.sin();
                v[axes[1]] = radius * w * th.cos();
                v
            }
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            PathSegment::Line { from, to } => from.iter().zip(to).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt(),
            PathSegment::Arc { radius, start, end, .. } => radius.abs() * (end - start).abs(),
        }
    }
}

/// A piecewise-smooth path; consecutive segments must join.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub segments: Vec<PathSegment>,
}

const JOIN_TOL: f64 = 1e-9;

impl PathSpec {
    /// Axis-aligned square loop, counterclockwise from `corner`.
    pub fn square(corner: [f64; 2], side: f64) -> PathSpec {
        let [x, y] = corner;
        let pts = [[x, y], [x + side, y], [x + side, y + side], [x, y + side], [x, y]];
        PathSpec {
            segments: pts.windows(2).map(|w| PathSegment::Line { from: w[0].to_vec(), to: w[1].to_vec() }).collect(),
        }
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<PathSpec> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for (k, s) in self.segments.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::InvalidPath(format!("segment {k} has {} coordinates, chart has {dim}", s.dim())));
            }
            if let PathSegment::Arc { radius, axes, .. } = s {
                if *radius <= 0.0 || axes[0] == axes[1] || axes.iter().any(|&a| a >= dim) {
                    return Err(Error::InvalidPath(format!("segment {k}: bad arc radius or axes")));
                }
            }
            let len = s.length();
            if !len.is_finite() || len <= 0.0 {
                return Err(Error::InvalidPath(format!("segment {k} is degenerate (length {len})")));
            }
            if k > 0 {
                let a = self.segments[k - 1].position(1.0);
                let b = s.position(0.0);
                let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                if gap > JOIN_TOL {
                    return Err(Error::InvalidPath(format!("segments {} and {k} do not join (gap {gap:e})", k - 1)));
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        match (self.segments.first(), self.segments.last()) {
            (Some(f), Some(l)) => {
                let (a, b) = (f.position(0.0), l.position(1.0));
                a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= JOIN_TOL)
            }
            _ => true,
        }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(PathSegment::length).sum()
    }
}

impl FromStr for PathSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<PathSpec> {
        serde_json::from_str(s).map_err(|e| Error::InvalidPath(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyResult {
    pub matrix: DMatrix<f64>,
    pub group_defect: f64,
    pub closed: bool,
    pub steps: usize,
}

impl HolonomyResult {
    /// Signed angle for 2×2 rotations, unsigned for 3×3.
    pub fn rotation_angle(&self) -> Option<f64> {
        let h = &self.matrix;
        match h.nrows() {
            2 => Some(h[(1, 0)].atan2(h[(0, 0)])),
            3 => Some(((h.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()),
            _ => None,
        }
    }
}

/// Transport around `path` with about `steps` midpoint steps in total,
/// distributed over segments by length.
pub fn holonomy(conn: &dyn MatrixConnection, path: &PathSpec, steps: usize) -> Result<HolonomyResult> {
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    path.validate(conn.chart_dim())?;
    let n = conn.matrix_dim();
    let mut h = DMatrix::identity(n, n);
    let total = path.length();
    let mut used = 0;
    for seg in &path.segments {
        let m = ((steps as f64 * seg.length() / total).round() as usize).max(1);
        let dt = 1.0 / m as f64;
        for j in 0..m {
            let t = (j as f64 + 0.5) * dt;
            let x = seg.position(t);
            let v = seg.velocity(t);
            let a = conn.components(&x)?;
            let mut gen = DMatrix::zeros(n, n);
            for (ai, vi) in a.iter().zip(&v) {
                gen += ai * (-vi * dt);
            }
            h = gen.exp() * h;
        }
        used += m;
    }
    Ok(HolonomyResult { group_defect: conn.group_defect(&h), matrix: h, closed: path.is_closed(), steps: used })
}

/// Bundled two-dimensional rolling models.
///
/// All use chart coordinates `(u, v)` on the unit sphere given by the
/// area-preserving map `z = v + u²`, `φ = u − z²` into cylindrical
/// equal-area coordinates `(φ, z)`. Loops enclosing area `a` in the chart
/// enclose area `a` on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RollingModel {
    /// Spin connection `ω = z dφ` of the orthonormal frame, as an
    /// `so(2)`-valued connection. Holonomy is rotation by the enclosed area.
    Sphere,
    /// Full Cartan connection `A = ω J + e⁰ P₀ + e¹ P₁` of the sphere modeled
    /// on itself, in `so(3)`. Flat, so contractible loops give the identity.
    SphereCartan,
    /// The plane modeled on the sphere: `A = du P₀ + dv P₁`.
    BallOnPlane,
}

impl RollingModel {
    pub const NAMES: [&'static str; 3] = ["sphere", "sphere-cartan", "ball-on-plane"];
}

impl FromStr for RollingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<RollingModel> {
        match s {
            "sphere" => Ok(RollingModel::Sphere),
            "sphere-cartan" => Ok(RollingModel::SphereCartan),
            "ball-on-plane" => Ok(RollingModel::BallOnPlane),
            _ => Err(Error::Parse(format!("unknown model {s:?}; expected one of {}", RollingModel::NAMES.join(", ")))),
        }
    }
}

pub fn rolling_model(name: &str) -> Result<RollingModel> {
    name.parse()
}

fn rot_generator(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(n, n);
    j[(1, 0)] = 1.0;
    j[(0, 1)] = -1.0;
    j
}

fn transvection(a: usize) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(3, 3);
    p[(a, 2)] = 1.0;
    p[(2, a)] = -1.0;
    p
}

impl MatrixConnection for RollingModel {
    fn chart_dim(&self) -> usize {
        2
    }

    fn matrix_dim(&self) -> usize {
        match self {
            RollingModel::Sphere => 2,
            _ => 3,
        }
    }

    fn components(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let (u, v) = (x[0], x[1]);
        let z = v + u * u;
        // dφ = (1 − 4uz) du − 2z dv, dz = 2u du + dv
        let (dphi_u, dphi_v) = (1.0 - 4.0 * u * z, -2.0 * z);
        let (dz_u, dz_v) = (2.0 * u, 1.0);
        match self {
            RollingModel::Sphere => {
                let j = rot_generator(2);
                Ok(vec![&j * (z * dphi_u), &j * (z * dphi_v)])
            }
            RollingModel::SphereCartan => {
                if z.abs() >= 1.0 {
                    return Err(Error::InvalidPath(format!("point {x:?} leaves the chart (|z| ≥ 1)")));
                }
                let s = (1.0 - z * z).sqrt();
                let (j, p0, p1) = (rot_generator(3), transvection(0), transvection(1));
                let comp = |dphi: f64, dz: f64| &j * (z * dphi) + &p0 * (s * dphi) + &p1 * (dz / s);
                Ok(vec![comp(dphi_u, dz_u), comp(dphi_v, dz_v)])
            }
            RollingModel::BallOnPlane => Ok(vec![transvection(0), transvection(1)]),
        }
    }
}
