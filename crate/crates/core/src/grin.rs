//! Paraxial propagation of Airy-type wavelets in a symmetric linear GRIN medium.
//!
//! The first-order (Taylor) propagator turns the optical problem into the `λ|x|`
//! Schrödinger problem with `z = -κt`, so a field is advanced by phase-rotating its
//! spectral coefficients:
//! `E(x, z) = e^{-iκz} Σ c_n e^{i z E_n / κ} ψ_n(x)`.

use num_complex::Complex64;

use crate::airy::{ai, airy_zero};
use crate::dynamics::{project, reconstruct, SpectralCoefficients};
use crate::error::{domain, precision, Result};
use crate::quadrature::{integrate, Grid, WaveFunction};
use crate::spectrum::SpectralBasis;

/// Largest wavelet amplitude accepted at the grid ends.
pub const WAVELET_EDGE_TOLERANCE: f64 = 1e-8;

/// `κ = k̃ n₀` and the slope `λ` of the index profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrinMedium {
    kappa: f64,
    lambda: f64,
}

impl GrinMedium {
    pub fn new(kappa: f64, lambda: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(domain(format!("κ must be positive, got {kappa}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain(format!("λ must be positive, got {lambda}")));
        }
        Ok(Self { kappa, lambda })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Shift parameter `q` of the wavelet `Ai(x+q) Ai(-x+q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletParams {
    q: f64,
}

impl WaveletParams {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(domain("wavelet shift must be finite"));
        }
        Ok(Self { q })
    }

    /// `q = 2^{-2/3} a_1`.
    pub fn first_zero_shift() -> Self {
        let a1 = airy_zero(1).expect("first Airy zero");
        Self {
            q: a1 * 2f64.powf(-2.0 / 3.0),
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// `√C Ai(x+q) Ai(-x+q)` with `C` fixed by Simpson quadrature for unit norm.
///
/// Samples on the left half are mirrored from the right, so the field is exactly even.
pub fn airy_wavelet(p: &WaveletParams, grid: &Grid) -> Result<WaveFunction> {
    if !grid.is_symmetric() {
        return Err(domain("airy_wavelet needs a grid symmetric about 0"));
    }
    let n = grid.len();
    let mut raw = vec![0.0; n];
    for i in n / 2..n {
        let x = grid.point(i);
        raw[i] = ai(x + p.q) * ai(-x + p.q);
        raw[n - 1 - i] = raw[i];
    }
    let norm = integrate(grid, &raw.iter().map(|v| v * v).collect::<Vec<_>>())?.sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(precision(format!(
            "wavelet with q = {} has no finite norm on the grid",
            p.q
        )));
    }
    let edge = raw[n - 1].abs() / norm;
    if edge >= WAVELET_EDGE_TOLERANCE {
        return Err(precision(format!(
            "wavelet with q = {} is still {edge:.2e} at x = {}; widen the grid",
            p.q,
            grid.x_max()
        )));
    }
    WaveFunction::from_real(*grid, &raw.iter().map(|v| v / norm).collect::<Vec<_>>())
}

fn check_medium(medium: &GrinMedium, basis: &SpectralBasis) -> Result<()> {
    let (a, b) = (medium.lambda, basis.lambda());
    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
        return Err(domain(format!(
            "basis was built for λ = {b}, medium has λ = {a}"
        )));
    }
    Ok(())
}

/// Coefficients of the field at distance `z`, global phase included.
fn advanced(
    c: &SpectralCoefficients,
    medium: &GrinMedium,
    basis: &SpectralBasis,
    z: f64,
) -> SpectralCoefficients {
    let k = medium.kappa;
    SpectralCoefficients {
        basis_tag: c.basis_tag.clone(),
        c: c.c
            .iter()
            .zip(basis.states())
            .map(|(c, s)| c * Complex64::from_polar(1.0, z * s.energy / k - k * z))
            .collect(),
    }
}

/// `E(x, z) = e^{-iκz} Σ c_n e^{i z E_n/κ} ψ_n(x)`.
pub fn propagate_grin(
    field0: &WaveFunction,
    medium: &GrinMedium,
    basis: &SpectralBasis,
    z: f64,
) -> Result<WaveFunction> {
    check_medium(medium, basis)?;
    let c = project(field0, basis)?;
    reconstruct(&advanced(&c, medium, basis, z), basis)
}

/// Rows of `|E(x, z)|²`, one per propagation distance.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub z: Vec<f64>,
    pub grid: Grid,
    pub rows: Vec<Vec<f64>>,
}

impl IntensityMap {
    /// `∫ I(x, z) dx` per row.
    pub fn row_norms(&self) -> Vec<f64> {
        let w = self.grid.simpson_weights();
        self.rows.iter().map(|r| dot(&w, r)).collect()
    }

    /// `max_x |I(x) - I(-x)|` per row (zero unless the grid is symmetric).
    pub fn mirror_asymmetry(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(r.iter().rev())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// `⟨x²⟩(z) = ∫ x² I dx / ∫ I dx` per row.
    pub fn second_moments(&self) -> Vec<f64> {
        let w = self.grid.simpson_weights();
        let wx2: Vec<f64> = self.grid.points().zip(&w).map(|(x, w)| w * x * x).collect();
        self.rows
            .iter()
            .map(|r| dot(&wx2, r) / dot(&w, r))
            .collect()
    }

    /// `I(0, z)`; requires 0 to be a grid node.
    pub fn on_axis(&self) -> Option<Vec<f64>> {
        let i = self.grid.nearest_index(0.0)?;
        (self.grid.point(i).abs() < 1e-9 * self.grid.spacing())
            .then(|| self.rows.iter().map(|r| r[i]).collect())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// `|E(x, z)|²` for every `z` in `z_samples`; the field is projected once.
///
/// Rows are formed in blocks as `Re/Im(A) · Ψ`, with `A_{zn} = c_n e^{i(zE_n/κ - κz)}`
/// and `Ψ_{nx} = ψ_n(x)`, so the basis is streamed once per block rather than per row.
pub fn intensity_map(
    field0: &WaveFunction,
    medium: &GrinMedium,
    basis: &SpectralBasis,
    z_samples: &[f64],
) -> Result<IntensityMap> {
    const BLOCK: usize = 32;
    check_medium(medium, basis)?;
    let c = project(field0, basis)?;
    let n_x = basis.grid().len();
    let n_s = basis.len();
    let psi: Vec<f64> = basis
        .states()
        .iter()
        .flat_map(|s| s.samples.samples().iter().map(|v| v.re))
        .collect();
    let mut rows = Vec::with_capacity(z_samples.len());
    let mut re = vec![0.0; BLOCK * n_x];
    let mut im = vec![0.0; BLOCK * n_x];
    for chunk in z_samples.chunks(BLOCK) {
        let m = chunk.len();
        let mut a_re = Vec::with_capacity(m * n_s);
        let mut a_im = Vec::with_capacity(m * n_s);
        for &z in chunk {
            for a in &advanced(&c, medium, basis, z).c {
                a_re.push(a.re);
                a_im.push(a.im);
            }
        }
        for (a, out) in [(&a_re, &mut re), (&a_im, &mut im)] {
            // SAFETY: a is m×n_s, psi is n_s×n_x, out holds at least m×n_x, all row-major.
            unsafe {
                matrixmultiply::dgemm(
                    m,
                    n_s,
                    n_x,
                    1.0,
                    a.as_ptr(),
                    n_s as isize,
                    1,
                    psi.as_ptr(),
                    n_x as isize,
                    1,
                    0.0,
                    out.as_mut_ptr(),
                    n_x as isize,
                    1,
                );
            }
        }
        for r in 0..m {
            let span = r * n_x..(r + 1) * n_x;
            rows.push(
                re[span.clone()]
                    .iter()
                    .zip(&im[span])
                    .map(|(a, b)| a * a + b * b)
                    .collect(),
            );
        }
    }
    Ok(IntensityMap {
        z: z_samples.to_vec(),
        grid: *basis.grid(),
        rows,
    })
}
