use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::Coeff;
use crate::rational::Q;

/// Uniform tensor grid with `n` points per axis on `T^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Grid {
        assert!(dim <= 4 && n >= 1);
        Grid { dim, n }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Axis indices of a flat index (axis 0 varies slowest).
    pub fn point(&self, mut idx: usize) -> [usize; 4] {
        let mut p = [0; 4];
        for a in (0..self.dim).rev() {
            p[a] = idx % self.n;
            idx /= self.n;
        }
        p
    }

    pub fn coords(&self, idx: usize) -> [f64; 4] {
        let p = self.point(idx);
        let h = self.spacing();
        [p[0] as f64 * h, p[1] as f64 * h, p[2] as f64 * h, p[3] as f64 * h]
    }

    fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.dim - 1 - axis) as u32)
    }
}

/// Real function sampled on a [`Grid`]. Derivatives are spectral; products
/// are pointwise, so aliasing is the caller's concern.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFn {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> GridFn {
        assert_eq!(values.len(), grid.len());
        GridFn { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> GridFn {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i)[..grid.dim])).collect();
        GridFn { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Trigonometric interpolation at an arbitrary point.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let g = self.grid;
        let n = g.n;
        let spec = self.spectrum();
        let freq = |j: usize| -> f64 {
            let j = j as i64;
            let n = n as i64;
            if 2 * j < n {
                j as f64
            } else if 2 * j > n {
                (j - n) as f64
            } else {
                0.0
            }
        };
        let mut acc = 0.0;
        for (idx, c) in spec.iter().enumerate() {
            let p = g.point(idx);
            let mut phase = 0.0;
            let mut nyquist = false;
            for a in 0..g.dim {
                if n % 2 == 0 && 2 * p[a] == n {
                    nyquist = true;
                }
                phase += freq(p[a]) * x[a];
            }
            if nyquist {
                continue;
            }
            acc += c.re * phase.cos() - c.im * phase.sin();
        }
        acc / g.len() as f64
    }

    /// Unnormalized forward DFT over all axes.
    fn spectrum(&self) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(self.grid.n);
        for axis in 0..self.grid.dim {
            for_each_line(self.grid, axis, &mut data, |line| fft.process(line));
        }
        data
    }
}

fn for_each_line(grid: Grid, axis: usize, data: &mut [Complex64], mut f: impl FnMut(&mut [Complex64])) {
    let n = grid.n;
    let stride = grid.stride(axis);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for base in 0..grid.len() {
        if (base / stride) % n != 0 {
            continue;
        }
        for (j, l) in line.iter_mut().enumerate() {
            *l = data[base + j * stride];
        }
        f(&mut line);
        for (j, l) in line.iter().enumerate() {
            data[base + j * stride] = *l;
        }
    }
}

impl Coeff for GridFn {
    type Domain = Grid;
    type Value = f64;
    type Acc = Vec<f64>;
    type Prepared<'a> = &'a GridFn;

    fn zero(domain: &Grid) -> GridFn {
        GridFn { grid: *domain, values: vec![0.0; domain.len()] }
    }

    fn torus_dim(domain: &Grid) -> usize {
        domain.dim
    }

    fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    fn scale(&self, s: Q) -> GridFn {
        let s = s.to_f64();
        GridFn { grid: self.grid, values: self.values.iter().map(|v| v * s).collect() }
    }

    fn add(&self, other: &GridFn) -> GridFn {
        assert_eq!(self.grid, other.grid, "mixing grids");
        GridFn { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    fn mul(&self, other: &GridFn) -> GridFn {
        assert_eq!(self.grid, other.grid, "mixing grids");
        GridFn { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }

    fn partial(&self, axis: usize) -> GridFn {
        assert!(axis < self.grid.dim, "axis out of range");
        let n = self.grid.n;
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scale = 1.0 / n as f64;
        for_each_line(self.grid, axis, &mut data, |line| {
            fwd.process(line);
            for (j, c) in line.iter_mut().enumerate() {
                let k = if 2 * j < n {
                    j as f64
                } else if 2 * j > n {
                    j as f64 - n as f64
                } else {
                    0.0
                };
                *c = Complex64::new(-c.im * k, c.re * k) * scale;
            }
            inv.process(line);
        });
        GridFn { grid: self.grid, values: data.into_iter().map(|c| c.re).collect() }
    }

    fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    fn mean_of_product(&self, other: &GridFn) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() / self.values.len() as f64
    }

    fn value_zero() -> f64 {
        0.0
    }

    fn value_add(a: f64, b: f64) -> f64 {
        a + b
    }

    fn value_scale(a: f64, s: Q) -> f64 {
        a * s.to_f64()
    }

    fn value_to_f64(v: f64) -> f64 {
        v
    }

    fn acc_new(domain: &Grid) -> Vec<f64> {
        vec![0.0; domain.len()]
    }

    fn acc_add(acc: &mut Vec<f64>, f: &GridFn, s: Q) {
        let s = s.to_f64();
        for (a, v) in acc.iter_mut().zip(&f.values) {
            *a += s * v;
        }
    }

    fn acc_finish(acc: Vec<f64>, domain: &Grid) -> GridFn {
        GridFn { grid: *domain, values: acc }
    }

    fn prepare(&self) -> &GridFn {
        self
    }

    fn acc_add_product(acc: &mut Vec<f64>, f: &&GridFn, g: &&GridFn, s: Q) {
        let s = s.to_f64();
        for ((a, x), y) in acc.iter_mut().zip(&f.values).zip(&g.values) {
            *a += s * x * y;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_is_exact_for_band_limited() {
        let g = Grid::new(2, 16);
        let f = GridFn::from_fn(g, |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
        let df = f.partial(0);
        let expect = GridFn::from_fn(g, |x| 3.0 * (3.0 * x[0]).cos() * (2.0 * x[1]).cos());
        for (a, b) in df.values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_recovers_band_limited() {
        let g = Grid::new(3, 8);
        let f = GridFn::from_fn(g, |x| 1.0 + (x[0] - 2.0 * x[2]).cos() + 0.5 * x[1].sin());
        let x: [f64; 3] = [0.37, 2.1, 5.9];
        let expect = 1.0 + (x[0] - 2.0 * x[2]).cos() + 0.5 * x[1].sin();
        assert!((f.interpolate(&x) - expect).abs() < 1e-12);
    }
}
