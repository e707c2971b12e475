//! Exponential-operator maps between Airy states, position eigenstates and the Fock vacuum.
//!
//! In the momentum representation the Airy state is the pure phase `e^{ip³/3}/√(2π)`,
//! so `e^{-ip̂³/3}` and `e^{-ixp̂}` act by multiplication. Back in position space the
//! integrals are oscillatory and are tamed with a raised-cosine window on the outer part
//! of the momentum range.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, precision, Result};
use crate::quadrature::{Grid, WaveFunction};

/// Fraction of the momentum half-range covered by the taper on each side.
pub const TAPER_FRACTION: f64 = 0.2;
/// Largest change allowed between full and half resolution in `airy_from_momentum`.
pub const REFINEMENT_TOLERANCE: f64 = 1e-6;

/// Uniform momentum sampling, symmetric about 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    grid: Grid,
}

impl MomentumGrid {
    pub fn new(p_min: f64, p_max: f64, n_points: usize) -> Result<Self> {
        let grid = Grid::new(p_min, p_max, n_points)?;
        if !grid.is_symmetric() {
            return Err(domain(format!(
                "momentum grid [{p_min}, {p_max}] is not symmetric about 0"
            )));
        }
        Ok(Self { grid })
    }

    pub fn symmetric(p_max: f64, n_points: usize) -> Result<Self> {
        Self::new(-p_max, p_max, n_points)
    }

    pub fn p_max(&self) -> f64 {
        self.grid.x_max()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Raised-cosine window: 1 on the inner 80%, falling smoothly to 0 at `±p_max`.
    pub fn window(&self, p: f64) -> f64 {
        let edge = self.p_max();
        let start = (1.0 - TAPER_FRACTION) * edge;
        let a = p.abs();
        if a <= start {
            1.0
        } else if a >= edge {
            0.0
        } else {
            0.5 * (1.0 + (PI * (a - start) / (edge - start)).cos())
        }
    }

    /// The same range at roughly half the density (every other node).
    fn coarsened(&self) -> Result<Self> {
        Self::symmetric(self.p_max(), self.len().div_ceil(2))
    }
}

impl Default for MomentumGrid {
    fn default() -> Self {
        Self::symmetric(12.0, 1 << 14).expect("default momentum grid")
    }
}

/// A state sampled in the momentum representation.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumProfile {
    pub pgrid: MomentumGrid,
    pub values: Vec<Complex64>,
}

impl MomentumProfile {
    /// `⟨p|Ai⟩ = e^{ip³/3}/√(2π)`.
    pub fn airy(pgrid: &MomentumGrid) -> Self {
        let c = 1.0 / (2.0 * PI).sqrt();
        Self {
            pgrid: *pgrid,
            values: pgrid
                .grid
                .points()
                .map(|p| Complex64::from_polar(c, p * p * p / 3.0))
                .collect(),
        }
    }

    /// Multiplies by `e^{i s p³/3}`, i.e. applies `exp(i s p̂³/3)`.
    pub fn cubic_phase(mut self, s: f64) -> Self {
        for (v, p) in self.values.iter_mut().zip(self.pgrid.grid.points()) {
            *v *= Complex64::from_polar(1.0, s * p * p * p / 3.0);
        }
        self
    }

    /// Multiplies by `e^{i s p}`, i.e. applies `exp(i s p̂)`.
    pub fn translate(mut self, s: f64) -> Self {
        for (v, p) in self.values.iter_mut().zip(self.pgrid.grid.points()) {
            *v *= Complex64::from_polar(1.0, s * p);
        }
        self
    }

    /// `max_p ||v(p)| - 1/√(2π)|`.
    pub fn flatness_defect(&self) -> f64 {
        let c = 1.0 / (2.0 * PI).sqrt();
        self.values
            .iter()
            .map(|v| (v.norm() - c).abs())
            .fold(0.0, f64::max)
    }

    /// `ψ(x') = (1/√(2π)) ∫ w(p) v(p) e^{ipx'} dp` on `grid`.
    pub fn to_position(&self, grid: &Grid) -> WaveFunction {
        let weights = windowed_weights(&self.pgrid);
        let c = 1.0 / (2.0 * PI).sqrt();
        let ps: Vec<f64> = self.pgrid.grid.points().collect();
        let samples = grid
            .points()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for ((w, v), p) in weights.iter().zip(&self.values).zip(&ps) {
                    acc += v * Complex64::from_polar(*w, p * x);
                }
                acc * c
            })
            .collect();
        WaveFunction::from_parts_unchecked(*grid, samples)
    }
}

/// Simpson weights averaged with their mirror image, times the window.
///
/// With an odd interval count the closing 3/8 panel sits on one side only; averaging
/// keeps the order and makes `p ↦ -p` an exact symmetry, so `Im` cancels for real targets.
fn windowed_weights(pgrid: &MomentumGrid) -> Vec<f64> {
    let w = pgrid.grid.simpson_weights();
    w.iter()
        .zip(w.iter().rev())
        .zip(pgrid.grid.points())
        .map(|((a, b), p)| 0.5 * (a + b) * pgrid.window(p))
        .collect()
}

fn windowed_airy_integral(x: f64, pgrid: &MomentumGrid) -> Complex64 {
    let weights = windowed_weights(pgrid);
    let mut acc = Complex64::new(0.0, 0.0);
    for (w, p) in weights.iter().zip(pgrid.grid.points()) {
        acc += Complex64::from_polar(*w, p * p * p / 3.0 + x * p);
    }
    acc / (2.0 * PI)
}

/// `(1/2π) ∫ w(p) exp(i(p³/3 + x p)) dp`, which approximates `Ai(x)`.
///
/// Fails with a precision error when the stationary points `p = ±√(-x)` fall inside the
/// taper, or when halving the sampling density moves the result by more than
/// [`REFINEMENT_TOLERANCE`].
pub fn airy_from_momentum(x_target: f64, pgrid: &MomentumGrid) -> Result<Complex64> {
    if !x_target.is_finite() {
        return Err(domain("x must be finite"));
    }
    let taper_start = (1.0 - TAPER_FRACTION) * pgrid.p_max();
    if x_target < 0.0 && (-x_target).sqrt() >= taper_start {
        return Err(precision(format!(
            "stationary phase at |p| = {:.3} lies in the window taper (starts at {taper_start:.3}); widen the momentum grid",
            (-x_target).sqrt()
        )));
    }
    let fine = windowed_airy_integral(x_target, pgrid);
    let coarse = windowed_airy_integral(x_target, &pgrid.coarsened()?);
    let change = (fine - coarse).norm();
    if change > REFINEMENT_TOLERANCE {
        return Err(precision(format!(
            "Airy integral at x = {x_target} not converged under refinement (change {change:.2e}); use more momentum points"
        )));
    }
    Ok(fine)
}

/// `exp(-ix p̂) exp(-ip̂³/3)|Ai⟩` in position space: a narrow kernel centred on `x`.
///
/// The result is `(1/2π) ∫ w(p) e^{ip(x' - x)} dp`, whose width scales like `π/p_max`.
pub fn position_from_airy(x: f64, grid: &Grid, pgrid: &MomentumGrid) -> Result<WaveFunction> {
    if !x.is_finite() {
        return Err(domain("x must be finite"));
    }
    if x < grid.x_min() || x > grid.x_max() {
        return Err(domain(format!(
            "kernel centre {x} lies outside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let kernel = MomentumProfile::airy(pgrid).cubic_phase(-1.0).translate(-x);
    Ok(kernel.to_position(grid))
}

/// Centroid and RMS width of `|ψ|²`.
pub fn centroid_and_width(wf: &WaveFunction) -> (f64, f64) {
    let w = wf.grid().simpson_weights();
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for ((x, z), w) in wf.grid().points().zip(wf.samples()).zip(&w) {
        let d = w * z.norm_sqr();
        m0 += d;
        m1 += d * x;
        m2 += d * x * x;
    }
    let mean = m1 / m0;
    (mean, (m2 / m0 - mean * mean).max(0.0).sqrt())
}

/// A position eigenstate truncated to the number states `|0⟩ .. |n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub n_max: usize,
    pub coeffs: Vec<f64>,
}

impl FockVector {
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn overlap(&self, other: &FockVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `⟨(a + a†)/√2⟩` on the truncated vector, renormalized.
    pub fn quadrature(&self) -> f64 {
        let d = &self.coeffs;
        let off: f64 = (0..d.len() - 1)
            .map(|n| ((n + 1) as f64).sqrt() * d[n] * d[n + 1])
            .sum();
        SQRT_2 * off / self.norm_sq()
    }
}

/// `|x⟩` in the number basis, expanded from
/// `π^{-1/4} e^{-x²/2} exp(-a†²/2 + √2 x a†)|0⟩`.
///
/// Matching powers of `a†` gives
/// `d_{m+1} = (√2 x d_m - √m d_{m-1}) / √(m+1)`, `d_0 = π^{-1/4} e^{-x²/2}`.
pub fn fock_position_state(x: f64, n_max: usize) -> Result<FockVector> {
    if n_max < 1 {
        return Err(domain("n_max must be at least 1"));
    }
    if !x.is_finite() {
        return Err(domain("x must be finite"));
    }
    // Number states up to n_max only reach |x| ≤ √(2 n_max + 1) classically.
    if x * x >= (2 * n_max + 1) as f64 {
        return Err(precision(format!(
            "x = {x} lies beyond the reach √(2n+1) = {:.3} of n_max = {n_max}",
            ((2 * n_max + 1) as f64).sqrt()
        )));
    }
    let d0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if d0 == 0.0 {
        return Err(precision(format!("vacuum amplitude underflows at x = {x}")));
    }
    let mut d = Vec::with_capacity(n_max + 1);
    d.push(d0);
    d.push(SQRT_2 * x * d0);
    for m in 1..n_max {
        let next = (SQRT_2 * x * d[m] - (m as f64).sqrt() * d[m - 1]) / ((m + 1) as f64).sqrt();
        d.push(next);
    }
    Ok(FockVector { n_max, coeffs: d })
}

/// Largest relative defect of `√(n+1) d_{n+1} - √2 x d_n + √n d_{n-1} = 0`,
/// scaled by the size of the terms.
pub fn recurrence_defect(v: &FockVector, x: f64) -> f64 {
    let d = &v.coeffs;
    (1..d.len() - 1)
        .map(|n| {
            let a = ((n + 1) as f64).sqrt() * d[n + 1];
            let b = SQRT_2 * x * d[n];
            let c = (n as f64).sqrt() * d[n - 1];
            let scale = a.abs().max(b.abs()).max(c.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b + c).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// `⟨X⟩` of the truncated state predicted by ladder-operator algebra:
/// `x - d_M d_{M+1} √(M+1) / (√2 Σ d²)`, with `d_{M+1}` the first dropped coefficient.
pub fn truncated_quadrature_prediction(v: &FockVector, x: f64) -> f64 {
    let m = v.n_max;
    let d = &v.coeffs;
    let next = (SQRT_2 * x * d[m] - (m as f64).sqrt() * d[m - 1]) / ((m + 1) as f64).sqrt();
    x - FRAC_1_SQRT_2 * d[m] * next * ((m + 1) as f64).sqrt() / v.norm_sq()
}
