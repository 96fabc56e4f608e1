use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::holonomy::MatrixConnection;
use crate::algebra::AlgebraDescriptor;
use crate::error::{Error, Result};

/// Exponential chart `x ↦ g(x) = exp(Σ xⁱ T_i)` of a model group, carrying the
/// Maurer–Cartan form `A = g⁻¹ dg`.
pub struct ExpChart {
    algebra: Arc<AlgebraDescriptor>,
    generators: Vec<DMatrix<f64>>,
}

fn ad(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    x * y - y * x
}

const SERIES_TOL: f64 = 1e-18;

impl ExpChart {
    /// `generators` are algebra basis indices; defaults to the translations.
    pub fn new(algebra: Arc<AlgebraDescriptor>, generators: Option<&[usize]>) -> Result<ExpChart> {
        let idx: Vec<usize> = generators.map(<[usize]>::to_vec).unwrap_or_else(|| algebra.p_indices().to_vec());
        if idx.is_empty() || idx.iter().any(|&i| i >= algebra.dim()) {
            return Err(Error::Precondition(format!("invalid chart generators {idx:?}")));
        }
        let generators = idx.iter().map(|&i| to_f64(&algebra, i)).collect();
        Ok(ExpChart { algebra, generators })
    }

    pub fn algebra(&self) -> &Arc<AlgebraDescriptor> {
        &self.algebra
    }

    fn point(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.algebra.matrix_dim();
        let mut m = DMatrix::zeros(n, n);
        for (xi, t) in x.iter().zip(&self.generators) {
            m += t * *xi;
        }
        m
    }

    /// `g⁻¹ ∂_i g = Σ_k (−1)^k/(k+1)! ad_X^k T_i` together with a bound on the
    /// truncated tail (in Frobenius norm).
    pub fn pullback(&self, x: &[f64]) -> Result<(Vec<DMatrix<f64>>, f64)> {
        let xm = self.point(x);
        let g = xm.clone().exp();
        if g.determinant().abs() < 1e-12 {
            return Err(Error::NonInvertible(x.to_vec()));
        }
        // ‖ad_X‖ ≤ 2‖X‖_F.
        let r = 2.0 * xm.norm();
        let mut worst: f64 = 0.0;
        let mut out = Vec::with_capacity(self.generators.len());
        for t in &self.generators {
            let mut term = t.clone();
            let mut sum = t.clone();
            let tn = t.norm();
            // bound on r^{k+1}/(k+2)! ‖T‖
            let mut next_bound = r * tn / 2.0;
            let mut k = 0usize;
            loop {
                let ratio = r / (k as f64 + 3.0);
                if ratio < 1.0 {
                    let tail = next_bound / (1.0 - ratio);
                    if tail < SERIES_TOL * (1.0 + tn) {
                        worst = worst.max(tail);
                        break;
                    }
                }
                k += 1;
                term = -ad(&xm, &term) / (k as f64 + 1.0);
                sum += &term;
                next_bound *= r / (k as f64 + 2.0);
                if k > 200 {
                    return Err(Error::Precondition("exponential series did not converge on the chart box".into()));
                }
            }
            out.push(sum);
        }
        Ok((out, worst))
    }
}

fn to_f64(alg: &AlgebraDescriptor, i: usize) -> DMatrix<f64> {
    alg.basis()[i].to_f64()
}

impl MatrixConnection for ExpChart {
    fn chart_dim(&self) -> usize {
        self.generators.len()
    }

    fn matrix_dim(&self) -> usize {
        self.algebra.matrix_dim()
    }

    fn components(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        Ok(self.pullback(x)?.0)
    }

    fn group_defect(&self, h: &DMatrix<f64>) -> f64 {
        super::holonomy::model_group_defect(&self.algebra, h)
    }
}

/// A connection plus `amplitude · x^{i+1} · T` in direction `i`; not flat.
pub struct Perturbed<M: MatrixConnection> {
    pub base: M,
    pub amplitude: f64,
    pub generator: DMatrix<f64>,
}

impl<M: MatrixConnection> MatrixConnection for Perturbed<M> {
    fn chart_dim(&self) -> usize {
        self.base.chart_dim()
    }

    fn matrix_dim(&self) -> usize {
        self.base.matrix_dim()
    }

    fn components(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let n = self.chart_dim();
        let mut a = self.base.components(x)?;
        for (i, ai) in a.iter_mut().enumerate() {
            *ai += &self.generator * (self.amplitude * x[(i + 1) % n]);
        }
        Ok(a)
    }
}

/// Sampling box and difference step for a flatness scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartParams {
    /// Chart box is `[-half_width, half_width]^n`.
    pub half_width: f64,
    /// Sample points per axis.
    pub samples: usize,
    /// Base step of the Richardson-extrapolated central differences.
    pub step: f64,
    pub generators: Option<Vec<usize>>,
}

impl Default for ChartParams {
    fn default() -> ChartParams {
        ChartParams { half_width: 0.5, samples: 4, step: 1e-3, generators: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub algebra: String,
    pub points: usize,
    /// `max ‖F(x)‖_F` over sample points and coordinate planes.
    pub max_curvature: f64,
    /// Largest certified tail bound of the truncated exponential series.
    pub max_series_remainder: f64,
}

/// `max_x max_{i<j} ‖∂_i A_j − ∂_j A_i + [A_i, A_j]‖_F`, derivatives by
/// central differences with one Richardson step.
pub fn max_curvature(conn: &dyn MatrixConnection, points: &[Vec<f64>], step: f64) -> Result<f64> {
    let n = conn.chart_dim();
    let deriv = |x: &[f64], i: usize, h: f64| -> Result<Vec<DMatrix<f64>>> {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let (ap, am) = (conn.components(&xp)?, conn.components(&xm)?);
        Ok(ap.iter().zip(&am).map(|(p, m)| (p - m) / (2.0 * h)).collect())
    };
    let mut worst: f64 = 0.0;
    for x in points {
        let a = conn.components(x)?;
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let coarse = deriv(x, i, step)?;
            let fine = deriv(x, i, step / 2.0)?;
            d.push(fine.iter().zip(&coarse).map(|(f, c)| (f * 4.0 - c) / 3.0).collect::<Vec<_>>());
        }
        for i in 0..n {
            for j in i + 1..n {
                let f = &d[i][j] - &d[j][i] + ad(&a[i], &a[j]);
                worst = worst.max(f.norm());
            }
        }
    }
    Ok(worst)
}

pub(crate) fn box_points(dim: usize, half_width: f64, samples: usize) -> Vec<Vec<f64>> {
    let coord = |j: usize| {
        if samples == 1 {
            0.0
        } else {
            -half_width + 2.0 * half_width * j as f64 / (samples - 1) as f64
        }
    };
    let total = samples.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let j = idx % samples;
                    idx /= samples;
                    coord(j)
                })
                .collect()
        })
        .collect()
}

/// Flatness of the Maurer–Cartan form on an exponential chart of `alg`.
pub fn maurer_cartan_model(alg: Arc<AlgebraDescriptor>, params: &ChartParams) -> Result<FlatnessReport> {
    let chart = ExpChart::new(alg.clone(), params.generators.as_deref())?;
    let points = box_points(chart.chart_dim(), params.half_width, params.samples);
    let mut remainder: f64 = 0.0;
    for x in &points {
        remainder = remainder.max(chart.pullback(x)?.1);
    }
    let max_curv = max_curvature(&chart, &points, params.step)?;
    Ok(FlatnessReport {
        algebra: alg.name().to_string(),
        points: points.len(),
        max_curvature: max_curv,
        max_series_remainder: remainder,
    })
}
