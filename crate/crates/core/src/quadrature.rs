//! Uniform grids, sampled wave functions and Simpson-rule inner products.

use num_complex::Complex64;

use crate::error::{domain, Result};

/// A uniform sampling of `[x_min, x_max]` with `n_points` nodes, ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(domain("grid bounds must be finite"));
        }
        if x_min >= x_max {
            return Err(domain(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 2 {
            return Err(domain(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n_points).map(move |i| self.x_min + i as f64 * h)
    }

    /// True when `x_min = -x_max` up to rounding, so that `point(i) = -point(n-1-i)`.
    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }

    /// Index of the node closest to `x`, if `x` lies within the window.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        if x < self.x_min || x > self.x_max {
            return None;
        }
        Some(((x - self.x_min) / self.spacing()).round() as usize)
    }

    /// Composite Simpson weights (3/8 rule on the last three intervals when the
    /// interval count is odd, trapezoid for a single interval).
    pub fn simpson_weights(&self) -> Vec<f64> {
        let n = self.n_points;
        let h = self.spacing();
        let mut w = vec![0.0; n];
        let intervals = n - 1;
        if intervals == 1 {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
            return w;
        }
        let simpson_end = if intervals.is_multiple_of(2) {
            n - 1
        } else {
            n - 4
        };
        for i in (0..simpson_end).step_by(2) {
            w[i] += h / 3.0;
            w[i + 1] += 4.0 * h / 3.0;
            w[i + 2] += h / 3.0;
        }
        if intervals % 2 == 1 {
            let s = simpson_end;
            w[s] += 3.0 * h / 8.0;
            w[s + 1] += 9.0 * h / 8.0;
            w[s + 2] += 9.0 * h / 8.0;
            w[s + 3] += 3.0 * h / 8.0;
        }
        w
    }
}

/// `Grid::new` under its operational name.
pub fn make_grid(x_min: f64, x_max: f64, n_points: usize) -> Result<Grid> {
    Grid::new(x_min, x_max, n_points)
}

/// Complex samples of a state or field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(domain(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(domain("wave function samples must be finite"));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), samples.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `⟨f|f⟩` by Simpson quadrature.
    pub fn norm_sq(&self) -> f64 {
        let w = self.grid.simpson_weights();
        self.samples
            .iter()
            .zip(&w)
            .map(|(z, w)| w * z.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for z in &mut self.samples {
            *z *= factor;
        }
    }

    /// Pointwise `|f(x)|²`.
    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// `∫ conj(f) g dx` by composite Simpson quadrature.
pub fn inner_product(f: &WaveFunction, g: &WaveFunction) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(domain("inner product of wave functions on different grids"));
    }
    let w = f.grid.simpson_weights();
    Ok(weighted_inner(&w, &f.samples, &g.samples))
}

pub(crate) fn weighted_inner(w: &[f64], f: &[Complex64], g: &[Complex64]) -> Complex64 {
    w.iter()
        .zip(f.iter().zip(g))
        .map(|(w, (a, b))| a.conj() * b * w)
        .sum()
}

/// Simpson integral of real samples on `grid`.
pub fn integrate(grid: &Grid, values: &[f64]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(domain("sample count does not match grid"));
    }
    Ok(grid
        .simpson_weights()
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum())
}

/// Evaluates `f` at every grid node.
pub fn sample(f: impl Fn(f64) -> Complex64, grid: &Grid) -> WaveFunction {
    let samples = grid.points().map(f).collect();
    WaveFunction::from_parts_unchecked(*grid, samples)
}

/// Real-valued counterpart of [`sample`].
pub fn sample_real(f: impl Fn(f64) -> f64, grid: &Grid) -> WaveFunction {
    sample(|x| Complex64::new(f(x), 0.0), grid)
}

/// Five-point second derivative at nodes `2..n-2`; the returned vector has `n - 4`
/// entries, entry `j` belonging to node `j + 2`.
pub fn second_derivative(samples: &[Complex64], h: f64) -> Vec<Complex64> {
    let inv = 1.0 / (12.0 * h * h);
    samples
        .windows(5)
        .map(|s| (-s[0] + s[1] * 16.0 - s[2] * 30.0 + s[3] * 16.0 - s[4]) * inv)
        .collect()
}

/// Relative residual `‖r‖ / ‖f‖` of an operator residual evaluated on nodes `2..n-2`.
///
/// Both norms are discrete ℓ² sums over the nodes in `keep`. The operator is given as
/// `op(x, f(x), f''(x))`.
pub fn relative_residual(
    wf: &WaveFunction,
    op: impl Fn(f64, Complex64, Complex64) -> Complex64,
    keep: impl Fn(usize) -> bool,
) -> f64 {
    let grid = wf.grid();
    let d2 = second_derivative(wf.samples(), grid.spacing());
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, second) in d2.iter().enumerate() {
        let i = j + 2;
        if !keep(i) {
            continue;
        }
        let f = wf.samples()[i];
        num += op(grid.point(i), f, *second).norm_sqr();
        den += f.norm_sqr();
    }
    (num / den).sqrt()
}
