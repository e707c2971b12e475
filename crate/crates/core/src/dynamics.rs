//! Spectral time evolution in the `λ|x|` eigenbasis.
//!
//! A state is projected once, `c_n = ∫ ψ_n φ(x, 0) dx`, and propagated by phase rotation,
//! `φ(x, t) = Σ c_n e^{-i E_n t} ψ_n(x)`. Mean-position trajectories are evaluated in
//! the basis through the position matrix `X_mn = ⟨ψ_m|x|ψ_n⟩`, so long time series
//! never rebuild the wave function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, precision, Result};
use crate::quadrature::{second_derivative, weighted_inner, Grid, WaveFunction};
use crate::spectrum::{Parity, SpectralBasis};

/// Largest relative norm defect `mean_position` silently renormalizes.
pub const NORM_SLACK: f64 = 1e-6;
/// Largest packet amplitude tolerated at the grid ends.
pub const PACKET_EDGE_TOLERANCE: f64 = 1e-12;

/// Expansion coefficients of a state in one particular [`SpectralBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    pub basis_tag: String,
    pub c: Vec<Complex64>,
}

impl SpectralCoefficients {
    /// `Σ |c_n|²`.
    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Σ |c_n|² E_n`, which is the same at every time.
    pub fn energy(&self, basis: &SpectralBasis) -> Result<f64> {
        check_basis(self, basis)?;
        Ok(self
            .c
            .iter()
            .zip(basis.states())
            .map(|(c, s)| c.norm_sqr() * s.energy)
            .sum())
    }

    /// Coefficients after time `t`: `c_n e^{-i E_n t}`.
    pub fn rotated(&self, basis: &SpectralBasis, t: f64) -> Result<Self> {
        check_basis(self, basis)?;
        Ok(Self {
            basis_tag: self.basis_tag.clone(),
            c: self
                .c
                .iter()
                .zip(basis.states())
                .map(|(c, s)| c * Complex64::from_polar(1.0, -s.energy * t))
                .collect(),
        })
    }

    /// `⟨φ(0)|φ(t)⟩ / ⟨φ|φ⟩ = Σ |c_n|² e^{-i E_n t} / Σ |c_n|²`.
    pub fn autocorrelation(&self, basis: &SpectralBasis, t: f64) -> Result<Complex64> {
        check_basis(self, basis)?;
        let total: Complex64 = self
            .c
            .iter()
            .zip(basis.states())
            .map(|(c, s)| Complex64::from_polar(c.norm_sqr(), -s.energy * t))
            .sum();
        Ok(total / self.norm_sq())
    }
}

fn check_basis(c: &SpectralCoefficients, basis: &SpectralBasis) -> Result<()> {
    if c.basis_tag != basis.tag() || c.c.len() != basis.len() {
        return Err(domain(format!(
            "coefficients belong to basis '{}', not '{}'",
            c.basis_tag,
            basis.tag()
        )));
    }
    Ok(())
}

/// Centre `x0` and width `σ` of the initial Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketParams {
    x0: f64,
    sigma: f64,
}

impl GaussianPacketParams {
    pub fn new(x0: f64, sigma: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(domain("packet centre must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain(format!(
                "packet width must be positive, got {sigma}"
            )));
        }
        Ok(Self { x0, sigma })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn value(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 / (PI * s2)).powf(0.25) * (-(x - self.x0).powi(2) / s2).exp()
    }
}

/// `(2/(πσ²))^{1/4} exp(-(x - x0)²/σ²)`, zero momentum, unit norm.
pub fn gaussian_packet(p: &GaussianPacketParams, grid: &Grid) -> Result<WaveFunction> {
    let edge = p.value(grid.x_min()).max(p.value(grid.x_max()));
    if edge >= PACKET_EDGE_TOLERANCE {
        return Err(precision(format!(
            "packet at x0 = {} with σ = {} is clipped by the grid [{}, {}] (edge value {edge:.2e})",
            p.x0,
            p.sigma,
            grid.x_min(),
            grid.x_max()
        )));
    }
    Ok(crate::quadrature::sample_real(|x| p.value(x), grid))
}

/// `c_n = ∫ ψ_n(x) φ(x) dx`.
pub fn project(phi: &WaveFunction, basis: &SpectralBasis) -> Result<SpectralCoefficients> {
    if phi.grid() != basis.grid() {
        return Err(domain("state and basis live on different grids"));
    }
    let w = basis.grid().simpson_weights();
    let c = basis
        .states()
        .par_iter()
        .map(|s| weighted_inner(&w, s.samples.samples(), phi.samples()))
        .collect();
    Ok(SpectralCoefficients {
        basis_tag: basis.tag().to_string(),
        c,
    })
}

/// `Σ c_n ψ_n(x)`.
pub fn reconstruct(coeffs: &SpectralCoefficients, basis: &SpectralBasis) -> Result<WaveFunction> {
    check_basis(coeffs, basis)?;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.grid().len()];
    for (c, s) in coeffs.c.iter().zip(basis.states()) {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, v) in out.iter_mut().zip(s.samples.samples()) {
            *o += c * v.re;
        }
    }
    Ok(WaveFunction::from_parts_unchecked(*basis.grid(), out))
}

/// `φ(x, t) = Σ c_n e^{-i E_n t} ψ_n(x)`.
pub fn evolve(
    coeffs: &SpectralCoefficients,
    basis: &SpectralBasis,
    t: f64,
) -> Result<WaveFunction> {
    reconstruct(&coeffs.rotated(basis, t)?, basis)
}

fn checked_norm(norm_sq: f64) -> Result<f64> {
    if (norm_sq - 1.0).abs() >= NORM_SLACK {
        return Err(domain(format!(
            "state norm² {norm_sq:.9} is not unit (tolerance {NORM_SLACK:e})"
        )));
    }
    Ok(norm_sq)
}

/// `∫ x |φ(x)|² dx` for a unit-norm state (renormalized if off by less than 1e-6).
pub fn mean_position(phi: &WaveFunction) -> Result<f64> {
    let grid = phi.grid();
    let w = grid.simpson_weights();
    let mut norm_sq = 0.0;
    let mut first = 0.0;
    for ((x, z), w) in grid.points().zip(phi.samples()).zip(&w) {
        let p = w * z.norm_sqr();
        norm_sq += p;
        first += x * p;
    }
    Ok(first / checked_norm(norm_sq)?)
}

/// `Re ⟨φ|H|φ⟩ / ⟨φ|φ⟩` with the kinetic term by the five-point stencil.
///
/// The two nodes at each end are dropped; states used here vanish there.
pub fn finite_difference_energy(phi: &WaveFunction, lambda: f64) -> f64 {
    let grid = phi.grid();
    let d2 = second_derivative(phi.samples(), grid.spacing());
    let w = grid.simpson_weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, second) in d2.iter().enumerate() {
        let i = j + 2;
        let f = phi.samples()[i];
        let hf = -second * 0.5 + f * (lambda * grid.point(i).abs());
        num += w[i] * (f.conj() * hf).re;
        den += w[i] * f.norm_sqr();
    }
    num / den
}

/// Position matrix elements `⟨ψ_m|x|ψ_n⟩`; zero between states of equal parity.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionMatrix {
    basis_tag: String,
    elements: Vec<Vec<f64>>,
}

impl PositionMatrix {
    pub fn new(basis: &SpectralBasis) -> Self {
        let grid = basis.grid();
        let weighted_x: Vec<f64> = grid
            .simpson_weights()
            .iter()
            .zip(grid.points())
            .map(|(w, x)| w * x)
            .collect();
        let states = basis.states();
        let elements = states
            .par_iter()
            .map(|a| {
                states
                    .iter()
                    .map(|b| {
                        if a.parity == b.parity {
                            return 0.0;
                        }
                        weighted_x
                            .iter()
                            .zip(a.samples.samples().iter().zip(b.samples.samples()))
                            .map(|(wx, (u, v))| wx * u.re * v.re)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Self {
            basis_tag: basis.tag().to_string(),
            elements,
        }
    }

    pub fn element(&self, m: usize, n: usize) -> f64 {
        self.elements[m][n]
    }

    /// `Σ conj(a_m) X_mn a_n / Σ |a_n|²`.
    pub fn expectation(&self, a: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for (m, row) in self.elements.iter().enumerate() {
            if a[m] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut xa = Complex64::new(0.0, 0.0);
            for (x, an) in row.iter().zip(a) {
                xa += an * *x;
            }
            acc += (a[m].conj() * xa).re;
        }
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        acc / norm
    }
}

/// `⟨x⟩(t)` for the Gaussian packet `p`, one entry per requested time.
///
/// Computed as `Σ conj(c_m) c_n e^{i(E_m-E_n)t} X_mn / Σ|c|²`; this equals
/// `mean_position(evolve(project(packet), basis, t))` up to the Gram-matrix defect.
pub fn trajectory(
    p: &GaussianPacketParams,
    basis: &SpectralBasis,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let packet = gaussian_packet(p, basis.grid())?;
    let coeffs = project(&packet, basis)?;
    checked_norm(coeffs.norm_sq()).map_err(|_| {
        precision(format!(
            "{} states capture only Σ|c|² = {:.9} of the packet; use more states",
            basis.len(),
            coeffs.norm_sq()
        ))
    })?;
    trajectory_of(&coeffs, basis, &PositionMatrix::new(basis), times)
}

/// `⟨x⟩(t)` for an arbitrary coefficient set, given its position matrix.
pub fn trajectory_of(
    coeffs: &SpectralCoefficients,
    basis: &SpectralBasis,
    x: &PositionMatrix,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_basis(coeffs, basis)?;
    if x.basis_tag != basis.tag() {
        return Err(domain("position matrix belongs to a different basis"));
    }
    // Odd and even amplitudes only couple across parity; keep the active index sets.
    let active: Vec<usize> = (0..coeffs.c.len())
        .filter(|&n| coeffs.c[n] != Complex64::new(0.0, 0.0))
        .collect();
    let energies = basis.energies();
    let parity: Vec<Parity> = basis.states().iter().map(|s| s.parity).collect();
    let norm = coeffs.norm_sq();
    Ok(times
        .par_iter()
        .map(|&t| {
            let a: Vec<Complex64> = active
                .iter()
                .map(|&n| coeffs.c[n] * Complex64::from_polar(1.0, -energies[n] * t))
                .collect();
            let mut acc = 0.0;
            for (i, &m) in active.iter().enumerate() {
                let row = &x.elements[m];
                let mut xa = Complex64::new(0.0, 0.0);
                for (j, &n) in active.iter().enumerate() {
                    if parity[m] != parity[n] {
                        xa += a[j] * row[n];
                    }
                }
                acc += (a[i].conj() * xa).re;
            }
            (t, acc / norm)
        })
        .collect())
}

/// Half the peak-to-peak swing of `⟨x⟩` inside consecutive windows of length `window`,
/// reported at each window's centre.
pub fn windowed_amplitude(samples: &[(f64, f64)], window: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let Some(&(t_start, _)) = samples.first() else {
        return out;
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut edge = t_start + window;
    for &(t, v) in samples {
        if t >= edge {
            if lo <= hi {
                out.push((edge - 0.5 * window, 0.5 * (hi - lo)));
            }
            lo = f64::INFINITY;
            hi = f64::NEG_INFINITY;
            while t >= edge {
                edge += window;
            }
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    out
}

/// Times at which `d⟨x⟩/dt` changes sign, i.e. the turning points of the trajectory,
/// with the value of `⟨x⟩` there.
pub fn turning_points(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    samples
        .windows(3)
        .filter(|w| (w[1].1 - w[0].1) * (w[2].1 - w[1].1) < 0.0)
        .map(|w| w[1])
        .collect()
}
