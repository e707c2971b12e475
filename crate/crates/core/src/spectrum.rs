//! Bound states of `H = p²/2 + λ|x|`.
//!
//! Matching the decaying Airy solutions of the two half-lines at `x = 0` gives even
//! states whose energies sit at zeros of `Ai'` and odd states at zeros of `Ai`:
//!
//! ```text
//! E_{2n}   = -(λ²/2)^{1/3} a'_{n+1}      ψ_{2n}(x)   = N Ai((2λ)^{1/3}(|x| - E/λ))
//! E_{2n+1} = -(λ²/2)^{1/3} a_{n+1}       ψ_{2n+1}(x) = N sgn(x) Ai((2λ)^{1/3}(|x| - E/λ))
//! ```
//!
//! Normalization constants are computed by quadrature on the caller's grid.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy::{ai, airy_prime_zero, airy_zero};
use crate::error::{domain, precision, Result};
use crate::quadrature::{relative_residual, weighted_inner, Grid, WaveFunction};

/// Largest |ψ_n| tolerated at the grid ends.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
/// Airy decay lengths `(2λ)^{-1/3}` required between the last turning point and the grid end.
pub const DECAY_MARGIN: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_index(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "potential slope λ must be positive, got {lambda}"
        )))
    }
}

fn energy_scale(lambda: f64) -> f64 {
    (lambda * lambda / 2.0).cbrt()
}

/// `E_{2n} = -(λ²/2)^{1/3} a'_{n+1}`.
pub fn even_energy(n: usize, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(-energy_scale(lambda) * airy_prime_zero(n + 1)?)
}

/// `E_{2n+1} = -(λ²/2)^{1/3} a_{n+1}`.
pub fn odd_energy(n: usize, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(-energy_scale(lambda) * airy_zero(n + 1)?)
}

/// Energy of the level with overall index `index` (even indices are even states).
pub fn level_energy(index: usize, lambda: f64) -> Result<f64> {
    match Parity::of_index(index) {
        Parity::Even => even_energy(index / 2, lambda),
        Parity::Odd => odd_energy(index / 2, lambda),
    }
}

/// One normalized bound state.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenState {
    pub n: usize,
    pub energy: f64,
    pub parity: Parity,
    /// `N_n > 0`; the outermost lobe on the positive half-line is positive.
    pub normalization: f64,
    pub samples: WaveFunction,
}

/// The `n`-th normalized eigenfunction for slope `lambda`, sampled on a symmetric `grid`.
pub fn eigenfunction(n: usize, lambda: f64, grid: &Grid) -> Result<EigenState> {
    check_lambda(lambda)?;
    let energy = level_energy(n, lambda)?;
    eigenfunction_with_energy(n, lambda, energy, grid)
}

fn eigenfunction_with_energy(
    n: usize,
    lambda: f64,
    energy: f64,
    grid: &Grid,
) -> Result<EigenState> {
    if !grid.is_symmetric() {
        return Err(domain("eigenfunctions need a grid symmetric about x = 0"));
    }
    let parity = Parity::of_index(n);
    let scale = (2.0 * lambda).cbrt();
    let turning = energy / lambda;
    let len = grid.len();
    let h = grid.spacing();

    // Evaluate the right half, mirror onto the left so parity holds exactly.
    let mut values = vec![0.0; len];
    let mid = len / 2;
    for i in mid..len {
        let j = len - 1 - i;
        if i == j {
            values[i] = match parity {
                Parity::Even => ai(-scale * turning),
                Parity::Odd => 0.0,
            };
            continue;
        }
        let x_abs = (i - j) as f64 * 0.5 * h;
        let v = ai(scale * (x_abs - turning));
        values[i] = v;
        values[j] = match parity {
            Parity::Even => v,
            Parity::Odd => -v,
        };
    }

    let weights = grid.simpson_weights();
    let norm_sq: f64 = values.iter().zip(&weights).map(|(v, w)| v * v * w).sum();
    if norm_sq.is_nan() || norm_sq <= 0.0 {
        return Err(precision(format!("state {n} has zero norm on this grid")));
    }
    let normalization = 1.0 / norm_sq.sqrt();
    let edge = normalization * values[len - 1].abs();
    if edge >= BOUNDARY_TOLERANCE {
        return Err(precision(format!(
            "grid too narrow for state {n}: |ψ| = {edge:.3e} at x = {}",
            grid.x_max()
        )));
    }
    let samples = values
        .iter()
        .map(|v| Complex64::new(normalization * v, 0.0))
        .collect();
    Ok(EigenState {
        n,
        energy,
        parity,
        normalization,
        samples: WaveFunction::from_parts_unchecked(*grid, samples),
    })
}

/// `‖-ψ''/2 + λ|x|ψ - Eψ‖ / ‖ψ‖` over nodes whose five-point stencil stays on one
/// side of the kink of `|x|` at the origin.
pub fn eigen_residual(state: &EigenState, lambda: f64) -> f64 {
    let grid = state.samples.grid();
    let h = grid.spacing();
    let e = state.energy;
    relative_residual(
        &state.samples,
        |x, f, d2| -d2 * 0.5 + f * (lambda * x.abs() - e),
        |i| grid.point(i).abs() > 1.5 * h,
    )
}

/// Minimum `x_max` for `n_states` levels: `E_{N-1}/λ + 8 (2λ)^{-1/3}`.
pub fn required_half_width(lambda: f64, n_states: usize) -> Result<f64> {
    check_lambda(lambda)?;
    if n_states == 0 {
        return Err(domain("basis needs at least one state"));
    }
    let top = level_energy(n_states - 1, lambda)?;
    Ok(top / lambda + DECAY_MARGIN * (2.0 * lambda).cbrt().recip())
}

/// The first `N` bound states for one `λ` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    lambda: f64,
    states: Vec<EigenState>,
    tag: String,
}

impl SpectralBasis {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn states(&self) -> &[EigenState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].samples.grid()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// Identifier stamped on coefficient sets projected onto this basis.
    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Gram matrix `⟨ψ_m|ψ_n⟩` by Simpson quadrature.
    pub fn gram_matrix(&self) -> Vec<Vec<f64>> {
        let w = self.grid().simpson_weights();
        self.states
            .par_iter()
            .map(|a| {
                self.states
                    .iter()
                    .map(|b| weighted_inner(&w, a.samples.samples(), b.samples.samples()).re)
                    .collect()
            })
            .collect()
    }

    /// Largest `|G_mn - δ_mn|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram_matrix();
        let mut worst: f64 = 0.0;
        for (m, row) in g.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Scales every stored energy by `1 + relative`, leaving the eigenfunctions alone.
    ///
    /// This deliberately breaks the basis; it exists for fault-injection runs.
    pub fn perturb_energies(&mut self, relative: f64) {
        for s in &mut self.states {
            s.energy *= 1.0 + relative;
        }
        self.tag.push_str(&format!(";perturbed={relative:e}"));
    }
}

/// Builds `n_states` normalized eigenstates of `p²/2 + λ|x|` on `grid`.
pub fn build_basis(lambda: f64, n_states: usize, grid: &Grid) -> Result<SpectralBasis> {
    check_lambda(lambda)?;
    if n_states == 0 {
        return Err(domain("basis needs at least one state"));
    }
    if !grid.is_symmetric() {
        return Err(domain("basis grid must be symmetric about x = 0"));
    }
    let needed = required_half_width(lambda, n_states)?;
    if grid.x_max() < needed {
        return Err(precision(format!(
            "grid half-width {} is below the {needed:.3} needed for {n_states} states at λ = {lambda}",
            grid.x_max()
        )));
    }
    let states = (0..n_states)
        .into_par_iter()
        .map(|n| eigenfunction(n, lambda, grid))
        .collect::<Result<Vec<_>>>()?;
    let tag = format!(
        "lambda={lambda:e};n={n_states};grid=[{:e},{:e}]x{}",
        grid.x_min(),
        grid.x_max(),
        grid.len()
    );
    Ok(SpectralBasis {
        lambda,
        states,
        tag,
    })
}
