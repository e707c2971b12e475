//! Continuum eigenstates of the one-sided linear potential `V(x) = |k| x`.
//!
//! These are squeezed and displaced copies of the Airy state. Operator actions on
//! wave functions use the conventions
//!
//! * squeeze `S(r)`: `f(x) ↦ e^{r/2} f(e^r x)`
//! * displacement `D(α)`, real `α`: `f(x) ↦ f(x - √2 α)`
//!
//! so that `D(α) S(r) Ai` with `r = ln (2|k|)^{1/3}` and `α = E / (√2 |k|)` is the
//! energy-`E` eigenfunction.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::airy::ai;
use crate::error::{domain, Result};
use crate::quadrature::{sample_real, Grid, WaveFunction};

/// Slope `|k|` of the potential and continuum energy `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPotentialParams {
    k_abs: f64,
    energy: f64,
}

impl LinearPotentialParams {
    pub fn new(k_abs: f64, energy: f64) -> Result<Self> {
        if !(k_abs > 0.0 && k_abs.is_finite()) {
            return Err(domain(format!(
                "potential slope must be positive, got {k_abs}"
            )));
        }
        if !energy.is_finite() {
            return Err(domain("energy must be finite"));
        }
        Ok(Self { k_abs, energy })
    }

    pub fn k_abs(&self) -> f64 {
        self.k_abs
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Coordinate scale `(2|k|)^{1/3}`.
    pub fn scale(&self) -> f64 {
        (2.0 * self.k_abs).cbrt()
    }

    /// Classical turning point `E / |k|`.
    pub fn turning_point(&self) -> f64 {
        self.energy / self.k_abs
    }
}

/// Eigenvalue `γ` of `p² + x` carried by the displaced Airy state `Ai(x - γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedAiryParams {
    gamma: f64,
}

impl DisplacedAiryParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(domain("displacement must be finite"));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Squeeze parameter `r` and real displacement `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeDisplaceParams {
    pub r: f64,
    pub alpha: f64,
}

impl SqueezeDisplaceParams {
    pub fn new(r: f64, alpha: f64) -> Result<Self> {
        if !(r.is_finite() && alpha.is_finite()) {
            return Err(domain("squeeze and displacement parameters must be finite"));
        }
        Ok(Self { r, alpha })
    }

    /// `r = ln (2|k|)^{1/3}`, `α = E / (√2 |k|)`.
    pub fn for_linear_potential(p: &LinearPotentialParams) -> Self {
        Self {
            r: p.scale().ln(),
            alpha: p.energy / (SQRT_2 * p.k_abs),
        }
    }
}

/// `(2|k|)^{1/6} Ai((2|k|)^{1/3} (x - E/|k|))` sampled on `grid`.
pub fn psi_e(params: &LinearPotentialParams, grid: &Grid) -> WaveFunction {
    let s = params.scale();
    let norm = s.sqrt();
    let x0 = params.turning_point();
    sample_real(|x| norm * ai(s * (x - x0)), grid)
}

/// `S(r)`: `f(x) ↦ e^{r/2} f(e^r x)`.
pub fn squeeze<F>(f: F, r: f64) -> impl Fn(f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (amp, scale) = ((0.5 * r).exp(), r.exp());
    move |x| f(scale * x) * amp
}

/// `D(α)` for real `α`: `f(x) ↦ f(x - √2 α)`.
pub fn displace<F>(f: F, alpha: f64) -> impl Fn(f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let shift = SQRT_2 * alpha;
    move |x| f(x - shift)
}

/// `D(α) S(r) f`, i.e. `x ↦ e^{r/2} f(e^r (x - √2 α))`.
pub fn apply_displaced_squeeze<F>(f: F, p: SqueezeDisplaceParams) -> impl Fn(f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    displace(squeeze(f, p.r), p.alpha)
}

/// Inverse of [`apply_displaced_squeeze`]: `S(-r) D(-α) f`.
pub fn undo_displaced_squeeze<F>(f: F, p: SqueezeDisplaceParams) -> impl Fn(f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    squeeze(displace(f, -p.alpha), -p.r)
}

/// `Ai(x - γ)` sampled on `grid`.
pub fn displaced_airy(params: &DisplacedAiryParams, grid: &Grid) -> WaveFunction {
    let g = params.gamma;
    sample_real(|x| ai(x - g), grid)
}

/// `‖(p̂² + x̂ - γ) ψ‖ / ‖ψ‖` with `p̂² = -d²/dx²` by the five-point stencil, over the
/// grid interior (two nodes dropped at each end).
pub fn airy_operator_residual(psi: &WaveFunction, gamma: f64) -> f64 {
    crate::quadrature::relative_residual(psi, |x, f, d2| -d2 + f * (x - gamma), |_| true)
}

/// `E' = ((2|k|)^{2/3} / 2) γ + E`.
pub fn shifted_energy(energy: f64, k_abs: f64, gamma: f64) -> Result<f64> {
    if k_abs.is_nan() || k_abs <= 0.0 {
        return Err(domain(format!(
            "potential slope must be positive, got {k_abs}"
        )));
    }
    Ok((2.0 * k_abs).powf(2.0 / 3.0) / 2.0 * gamma + energy)
}

/// Parity reflection `f(x) ↦ f(-x)` on a symmetric grid.
pub fn parity_reflect(f: &WaveFunction) -> Result<WaveFunction> {
    if !f.grid().is_symmetric() {
        return Err(domain("parity reflection needs a grid symmetric about 0"));
    }
    let mut samples = f.samples().to_vec();
    samples.reverse();
    Ok(WaveFunction::from_parts_unchecked(*f.grid(), samples))
}

/// Applies the Airy resolution of identity to `f`:
/// `g(x) = ∫dγ Ai(x - γ) ∫dy Ai(y - γ) f(y)`, both integrals by Simpson quadrature,
/// the outer one over `gamma_grid`. `g` is sampled on `f`'s grid.
pub fn completeness_smear(f: &WaveFunction, gamma_grid: &Grid) -> WaveFunction {
    use rayon::prelude::*;

    let grid = *f.grid();
    let xs: Vec<f64> = grid.points().collect();
    let wx = grid.simpson_weights();
    let wg = gamma_grid.simpson_weights();
    let gammas: Vec<f64> = gamma_grid.points().collect();

    // kernel row j holds Ai(x_i - γ_j)
    let kernel: Vec<Vec<f64>> = gammas
        .par_iter()
        .map(|&g| xs.iter().map(|&x| ai(x - g)).collect())
        .collect();
    let projections: Vec<Complex64> = kernel
        .par_iter()
        .map(|row| {
            row.iter()
                .zip(&wx)
                .zip(f.samples())
                .map(|((k, w), s)| s * (k * w))
                .sum()
        })
        .collect();
    let samples = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            kernel
                .iter()
                .zip(&wg)
                .zip(&projections)
                .map(|((row, w), p)| p * (row[i] * w))
                .sum()
        })
        .collect();
    WaveFunction::from_parts_unchecked(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sample;

    fn re(z: Complex64) -> f64 {
        z.re
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn grid() -> Grid {
        Grid::new(-20.0, 10.0, 3001).unwrap()
    }

    #[test]
    fn invalid_slope_is_rejected() {
        assert!(LinearPotentialParams::new(0.0, 1.0).is_err());
        assert!(LinearPotentialParams::new(-1.0, 1.0).is_err());
        assert!(shifted_energy(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn unit_scale_reproduces_airy() {
        let g = grid();
        let p = LinearPotentialParams::new(0.5, 0.0).unwrap();
        let psi = psi_e(&p, &g);
        for (x, v) in g.points().zip(psi.samples()) {
            assert!((re(*v) - ai(x)).abs() < 1e-15);
        }
        let p = LinearPotentialParams::new(0.5, 3.0).unwrap();
        let psi = psi_e(&p, &g);
        for (x, v) in g.points().zip(psi.samples()) {
            assert!((re(*v) - ai(x - 6.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn psi_e_solves_linear_potential_equation() {
        let g = grid();
        let p = LinearPotentialParams::new(1.0, 1.0).unwrap();
        let psi = psi_e(&p, &g);
        let r = crate::quadrature::relative_residual(
            &psi,
            |x, f, d2| -d2 * 0.5 + f * (x - 1.0),
            |_| true,
        );
        assert!(r < 1e-5, "residual {r}");
    }

    #[test]
    fn displaced_squeeze_identity_and_shift() {
        let f = |x: f64| c((-x * x).exp() * (1.0 + x));
        let id = apply_displaced_squeeze(f, SqueezeDisplaceParams::new(0.0, 0.0).unwrap());
        let shifted =
            apply_displaced_squeeze(f, SqueezeDisplaceParams::new(0.0, 1.0 / SQRT_2).unwrap());
        for i in 0..50 {
            let x = -3.0 + 0.12 * i as f64;
            assert_eq!(id(x), f(x));
            assert!((shifted(x) - f(x - 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn displaced_squeeze_of_airy_matches_eigenfunction() {
        let p = LinearPotentialParams::new(1.0, 1.0).unwrap();
        let op = SqueezeDisplaceParams::for_linear_potential(&p);
        assert!((op.r - 2f64.cbrt().ln()).abs() < 1e-15);
        assert!((op.alpha - 1.0 / SQRT_2).abs() < 1e-15);
        let g = grid();
        let direct = psi_e(&p, &g);
        let via_ops = sample(apply_displaced_squeeze(|x| c(ai(x)), op), &g);
        for (a, b) in direct.samples().iter().zip(via_ops.samples()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn displaced_squeeze_round_trip() {
        let f = |x: f64| Complex64::new((-0.5 * x * x).exp(), x.sin() * (-x * x).exp());
        for (r, alpha) in [(0.3, -1.1), (-0.7, 2.0), (1.2, 0.4)] {
            let p = SqueezeDisplaceParams::new(r, alpha).unwrap();
            let back = undo_displaced_squeeze(apply_displaced_squeeze(f, p), p);
            for i in 0..60 {
                let x = -4.0 + 0.13 * i as f64;
                assert!((back(x) - f(x)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn displaced_airy_eigenrelation() {
        let g = grid();
        for gamma in [-2.0, 0.0, 1.0, 2.0, 5.0] {
            let psi = displaced_airy(&DisplacedAiryParams::new(gamma).unwrap(), &g);
            let r = airy_operator_residual(&psi, gamma);
            assert!(r <= 1e-5, "gamma={gamma}: {r}");
            // wrong eigenvalue leaves a residual of order one
            assert!(airy_operator_residual(&psi, gamma + 0.5) > 0.1);
        }
    }

    #[test]
    fn displaced_airy_is_a_grid_shift() {
        let g = grid();
        let a0 = displaced_airy(&DisplacedAiryParams::new(0.0).unwrap(), &g);
        let a2 = displaced_airy(&DisplacedAiryParams::new(2.0).unwrap(), &g);
        let shift = (2.0 / g.spacing()).round() as usize;
        for i in 0..g.len() - shift {
            assert!((a2.samples()[i + shift] - a0.samples()[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn shifted_energy_examples() {
        assert_eq!(shifted_energy(2.5, 0.7, 0.0).unwrap(), 2.5);
        assert!((shifted_energy(0.0, 0.5, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((shifted_energy(1.0, 1.0, 1.0).unwrap() - 1.793700526).abs() < 1e-9);
    }

    #[test]
    fn shifted_energy_is_the_eigenvalue_of_the_displaced_state() {
        // D S |γ,Ai⟩ is x ↦ s^{1/2} Ai(s(x - E/|k|) - γ), eigenvalue E'
        let (k, e, gamma) = (0.8, 1.3, 1.7);
        let s = (2.0f64 * k).cbrt();
        let e_prime = shifted_energy(e, k, gamma).unwrap();
        let g = Grid::new(-15.0, 12.0, 2701).unwrap();
        let psi = sample_real(|x| s.sqrt() * ai(s * (x - e / k) - gamma), &g);
        let r = crate::quadrature::relative_residual(
            &psi,
            |x, f, d2| -d2 * 0.5 + f * (k * x - e_prime),
            |_| true,
        );
        assert!(r < 1e-5, "{r}");
    }

    #[test]
    fn parity_reflection() {
        let g = Grid::new(-5.0, 5.0, 101).unwrap();
        let even = sample_real(|x| (-x * x).exp(), &g);
        let odd = sample_real(|x| x * (-x * x).exp(), &g);
        let re_even = parity_reflect(&even).unwrap();
        let re_odd = parity_reflect(&odd).unwrap();
        for i in 0..g.len() {
            assert!((re_even.samples()[i] - even.samples()[i]).norm() < 1e-15);
            assert!((re_odd.samples()[i] + odd.samples()[i]).norm() < 1e-15);
        }
        let mixed = sample_real(|x| (x - 0.3).sin(), &g);
        assert_eq!(
            parity_reflect(&parity_reflect(&mixed).unwrap()).unwrap(),
            mixed
        );
        let lopsided = sample_real(|x| x, &Grid::new(-1.0, 2.0, 7).unwrap());
        assert!(parity_reflect(&lopsided).is_err());
    }

    #[test]
    fn reflected_state_solves_negative_slope_problem() {
        let g = Grid::new(-15.0, 15.0, 3001).unwrap();
        let p = LinearPotentialParams::new(1.0, 1.0).unwrap();
        let reflected = parity_reflect(&psi_e(&p, &g)).unwrap();
        let r = crate::quadrature::relative_residual(
            &reflected,
            |x, f, d2| -d2 * 0.5 - f * x - f * 1.0,
            |_| true,
        );
        assert!(r < 1e-5, "{r}");
    }

    fn unit_gaussian(center: f64) -> impl Fn(f64) -> f64 {
        let norm = (2.0 / std::f64::consts::PI).powf(0.25);
        move |x| norm * (-(x - center) * (x - center)).exp()
    }

    #[test]
    fn completeness_reproduces_a_gaussian() {
        let g = Grid::new(-8.0, 8.0, 321).unwrap();
        let f = sample_real(unit_gaussian(0.0), &g);
        let gammas = Grid::new(-25.0, 25.0, 2501).unwrap();
        let out = completeness_smear(&f, &gammas);
        let err = out
            .samples()
            .iter()
            .zip(f.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-2, "max error {err}");
    }

    #[test]
    fn completeness_of_zero_is_zero() {
        let g = Grid::new(-4.0, 4.0, 81).unwrap();
        let f = sample_real(|_| 0.0, &g);
        let out = completeness_smear(&f, &Grid::new(-10.0, 10.0, 201).unwrap());
        assert!(out.samples().iter().all(|z| *z == c(0.0)));
    }

    #[test]
    fn completeness_is_translation_covariant() {
        let g = Grid::new(-8.0, 8.0, 321).unwrap();
        let gammas = Grid::new(-25.0, 25.0, 2501).unwrap();
        let base = completeness_smear(&sample_real(unit_gaussian(0.0), &g), &gammas);
        let moved = completeness_smear(&sample_real(unit_gaussian(1.0), &g), &gammas);
        let shift = (1.0 / g.spacing()).round() as usize;
        for i in 60..g.len() - 60 {
            assert!((moved.samples()[i + shift] - base.samples()[i]).norm() < 1e-3);
        }
    }

    #[test]
    fn completeness_error_shrinks_with_wider_gamma_window() {
        let g = Grid::new(-8.0, 8.0, 321).unwrap();
        let f = sample_real(unit_gaussian(0.0), &g);
        let mut last = f64::INFINITY;
        for half in [6.0, 10.0, 16.0] {
            let gammas = Grid::new(-half, half, (100.0 * half) as usize + 1).unwrap();
            let out = completeness_smear(&f, &gammas);
            let err = out
                .samples()
                .iter()
                .zip(f.samples())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < last, "window {half}: {err} !< {last}");
            last = err;
        }
    }
}
