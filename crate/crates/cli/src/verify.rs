//! The invariant suite behind `airybasis verify`.

use std::f64::consts::PI;

use airybasis::airy::{ai, ai_prime, airy_ai, airy_prime_zero, airy_zero};
use airybasis::continuum::{airy_operator_residual, displaced_airy, DisplacedAiryParams};
use airybasis::dynamics::{
    evolve, finite_difference_energy, gaussian_packet, project, trajectory, GaussianPacketParams,
};
use airybasis::grin::{airy_wavelet, intensity_map, GrinMedium, WaveletParams};
use airybasis::oracle::{build_hamiltonian, tridiagonal_eigenvalues};
use airybasis::spectrum::{
    build_basis, eigen_residual, required_half_width, Parity, SpectralBasis,
};
use airybasis::statemaps::{airy_from_momentum, fock_position_state, MomentumGrid};
use airybasis::Grid;

use crate::config::{default_time_unit, RunConfig, REFERENCE_Q};
use crate::error::CliResult;
use crate::format::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    fn at_most(name: &'static str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name,
            value,
            tolerance,
            passed: value <= tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `value ≥ tolerance`.
    fn at_least(name: &'static str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name,
            value,
            tolerance,
            passed: value >= tolerance,
            detail: detail.into(),
        }
    }

    fn errored(name: &'static str, err: impl std::fmt::Display) -> Self {
        Self {
            name,
            value: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

fn guarded(name: &'static str, f: impl FnOnce() -> airybasis::Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::errored(name, e))
}

/// Runs every check for the given configuration.
pub fn run_checks(cfg: &RunConfig) -> Vec<Check> {
    let lambda = cfg.lambda;
    let fuzz = cfg.extra("fuzz_energy");
    let basis = Grid::new(cfg.x_min, cfg.x_max, cfg.n_points)
        .and_then(|g| build_basis(lambda, cfg.n_states, &g))
        .map(|mut b| {
            if fuzz != 0.0 {
                b.perturb_energies(fuzz);
            }
            b
        });

    let mut checks = vec![airy_error_bound(), airy_ode_residual(), zero_residuals()];
    match &basis {
        Ok(b) => {
            checks.push(guarded("oracle_energies", || oracle_energies(b)));
            checks.push(orthonormality(b));
            checks.push(eigen_residuals(b));
            checks.push(boundary_decay(b));
            checks.push(parity(b));
        }
        Err(e) => {
            for name in [
                "oracle_energies",
                "orthonormality",
                "eigen_residual",
                "boundary_decay",
                "parity",
            ] {
                checks.push(Check::errored(name, e));
            }
        }
    }
    checks.push(displaced_airy_residual());
    checks.push(guarded("fourier_bridge", fourier_bridge));
    checks.extend(packet_checks(lambda, fuzz));
    checks.push(fock_hermite());
    checks.push(guarded("grin_symmetry", || grin_symmetry(lambda)));
    checks
}

pub fn report(checks: &[Check]) -> Table {
    let mut t = Table::new(
        ["check", "status", "value", "tolerance", "detail"]
            .map(String::from)
            .to_vec(),
    );
    for c in checks {
        t.push(vec![
            Cell::Text(c.name.into()),
            Cell::Text(if c.passed { "pass" } else { "FAIL" }.into()),
            Cell::Num(c.value),
            Cell::Num(c.tolerance),
            Cell::Text(c.detail.replace(',', ";")),
        ]);
    }
    t
}

pub fn verify(cfg: &RunConfig) -> CliResult<(Table, usize)> {
    let checks = run_checks(cfg);
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok((report(&checks), failed))
}

fn airy_error_bound() -> Check {
    let mut worst = 0.0f64;
    for i in 0..=10_000 {
        let x = -50.0 + 0.01 * i as f64;
        match airy_ai(x) {
            Ok(e) => worst = worst.max(e.abs_error_bound),
            Err(e) => return Check::errored("airy_error_bound", e),
        }
    }
    Check::at_most(
        "airy_error_bound",
        worst,
        1e-10,
        "max reported bound on [-50; 50]",
    )
}

fn airy_ode_residual() -> Check {
    let h = 1e-2;
    let mut worst = 0.0f64;
    for i in 0..=60 {
        let x = -10.0 + 0.25 * i as f64;
        let d2 = (-ai(x + 2.0 * h) + 16.0 * ai(x + h) - 30.0 * ai(x) + 16.0 * ai(x - h)
            - ai(x - 2.0 * h))
            / (12.0 * h * h);
        worst = worst.max((d2 - x * ai(x)).abs());
    }
    Check::at_most(
        "airy_ode_residual",
        worst,
        1e-6,
        "|Ai'' - x Ai| on [-10; 5]",
    )
}

fn zero_residuals() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=50 {
        match (airy_zero(n), airy_prime_zero(n)) {
            (Ok(a), Ok(b)) => worst = worst.max(ai(a).abs()).max(ai_prime(b).abs()),
            (Err(e), _) | (_, Err(e)) => return Check::errored("zero_residuals", e),
        }
    }
    Check::at_most(
        "zero_residuals",
        worst,
        1e-10,
        "|Ai(a_n)| and |Ai'(a'_n)| for n <= 50",
    )
}

fn oracle_energies(b: &SpectralBasis) -> airybasis::Result<Check> {
    let h = build_hamiltonian(b.lambda(), b.grid())?;
    let fd = tridiagonal_eigenvalues(&h.diagonal, &h.off_diagonal)?;
    let k = b.len().min(6);
    let worst = b
        .energies()
        .iter()
        .zip(&fd)
        .take(k)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Check::at_most(
        "oracle_energies",
        worst,
        1e-4,
        format!("finite-difference vs zero-based; first {k} levels"),
    ))
}

fn orthonormality(b: &SpectralBasis) -> Check {
    Check::at_most(
        "orthonormality",
        b.orthonormality_defect(),
        1e-6,
        format!("max |G - I| over {} states", b.len()),
    )
}

fn eigen_residuals(b: &SpectralBasis) -> Check {
    let worst = b
        .states()
        .iter()
        .map(|s| eigen_residual(s, b.lambda()))
        .fold(0.0, f64::max);
    Check::at_most("eigen_residual", worst, 1e-4, "relative |(H - E_n) psi_n|")
}

fn boundary_decay(b: &SpectralBasis) -> Check {
    let worst = b
        .states()
        .iter()
        .map(|s| {
            let v = s.samples.samples();
            v[0].norm().max(v[v.len() - 1].norm())
        })
        .fold(0.0, f64::max);
    Check::at_most(
        "boundary_decay",
        worst,
        1e-8,
        "max |psi_n| at the grid ends",
    )
}

fn parity(b: &SpectralBasis) -> Check {
    let worst = b
        .states()
        .iter()
        .map(|s| {
            let v = s.samples.samples();
            let sign = match s.parity {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
            };
            v.iter()
                .zip(v.iter().rev())
                .map(|(a, b)| (a - b * sign).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Check::at_most("parity", worst, 1e-14, "psi_n(-x) = (-1)^n psi_n(x)")
}

fn displaced_airy_residual() -> Check {
    let g = match Grid::new(-20.0, 10.0, 3001) {
        Ok(g) => g,
        Err(e) => return Check::errored("displaced_airy_residual", e),
    };
    let mut worst = 0.0f64;
    for gamma in [-2.0, 0.0, 1.0, 5.0] {
        match DisplacedAiryParams::new(gamma) {
            Ok(p) => worst = worst.max(airy_operator_residual(&displaced_airy(&p, &g), gamma)),
            Err(e) => return Check::errored("displaced_airy_residual", e),
        }
    }
    Check::at_most(
        "displaced_airy_residual",
        worst,
        1e-5,
        "(p^2 + x) Ai(x - g) = g Ai(x - g) for g in {-2 0 1 5}",
    )
}

fn fourier_bridge() -> airybasis::Result<Check> {
    let pg = MomentumGrid::default();
    let mut points: Vec<f64> = (0..19).map(|i| -6.0 + 9.0 * i as f64 / 18.0).collect();
    points.push(airy_zero(1)?);
    let mut worst = 0.0f64;
    for x in points {
        worst = worst.max((airy_from_momentum(x, &pg)? - ai(x)).norm());
    }
    Ok(Check::at_most(
        "fourier_bridge",
        worst,
        1e-3,
        "windowed momentum integral vs Ai on [-6; 3] and a_1",
    ))
}

/// Packet checks on an automatically sized basis: 60 states, centre halfway to the top
/// level's turning point, width `2 λ^{-1/3}`.
fn packet_checks(lambda: f64, fuzz: f64) -> Vec<Check> {
    let names = [
        "packet_capture",
        "norm_conservation",
        "energy_consistency",
        "trajectory_start",
    ];
    match packet_checks_inner(lambda, fuzz) {
        Ok(c) => c,
        Err(e) => names.iter().map(|n| Check::errored(n, &e)).collect(),
    }
}

fn packet_checks_inner(lambda: f64, fuzz: f64) -> airybasis::Result<Vec<Check>> {
    let n = 60;
    let top = airybasis::spectrum::level_energy(n - 1, lambda)?;
    let half = required_half_width(lambda, n)?.ceil() + 1.0;
    let h = 0.01 * lambda.powf(-1.0 / 3.0).min(1.0);
    let points = (2.0 * half / h).round() as usize + 1;
    let g = Grid::new(-half, half, points)?;
    let mut basis = build_basis(lambda, n, &g)?;
    if fuzz != 0.0 {
        basis.perturb_energies(fuzz);
    }
    let packet = GaussianPacketParams::new(0.5 * top / lambda, 2.0 * lambda.powf(-1.0 / 3.0))?;
    let c = project(&gaussian_packet(&packet, &g)?, &basis)?;
    let captured = c.norm_sq();

    let t_end = 100.0 * default_time_unit();
    let mut norm_drift = 0.0f64;
    let mut energy_gap = 0.0f64;
    let spectral = c.energy(&basis)? / captured;
    let n0 = evolve(&c, &basis, 0.0)?.norm_sq();
    for k in 0..=10 {
        let t = t_end * k as f64 / 10.0;
        let phi = evolve(&c, &basis, t)?;
        norm_drift = norm_drift.max((phi.norm_sq() - n0).abs());
        let fd = finite_difference_energy(&phi, lambda);
        energy_gap = energy_gap.max(((fd - spectral) / spectral).abs());
    }
    let start = trajectory(&packet, &basis, &[0.0])?[0].1;
    Ok(vec![
        Check::at_least(
            "packet_capture",
            captured,
            0.999,
            format!("sum |c_n|^2 with {n} states"),
        ),
        Check::at_most(
            "norm_conservation",
            norm_drift,
            1e-8,
            "norm drift over [0; 100 t_g]",
        ),
        Check::at_most(
            "energy_consistency",
            energy_gap,
            1e-3,
            "finite-difference <H> vs sum |c_n|^2 E_n; relative",
        ),
        Check::at_most(
            "trajectory_start",
            (start - packet.x0()).abs(),
            1e-6,
            "<x>(0) = x0",
        ),
    ])
}

/// Normalized Hermite functions from `H_{n+1} = 2x H_n - 2n H_{n-1}` and a log-domain norm.
fn hermite_functions(x: f64, n_max: usize) -> Vec<f64> {
    let base = PI.powf(-0.25) * (-0.5 * x * x).exp();
    let (mut prev, mut cur) = (1.0f64, 2.0 * x);
    let mut log_norm = 0.5 * 2f64.ln();
    let mut out = vec![base, base * cur / log_norm.exp()];
    for n in 1..n_max {
        let next = 2.0 * x * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
        log_norm += 0.5 * (2.0 * (n + 1) as f64).ln();
        out.push(base * cur.signum() * (cur.abs().ln() - log_norm).exp());
    }
    out
}

fn fock_hermite() -> Check {
    let mut worst = 0.0f64;
    for x in [0.0, 1.0, -1.0, 3.0, -3.0] {
        let v = match fock_position_state(x, 200) {
            Ok(v) => v,
            Err(e) => return Check::errored("fock_hermite", e),
        };
        for (a, b) in v.coeffs.iter().zip(hermite_functions(x, 200)) {
            if a != &b {
                worst = worst.max((a - b).abs() / b.abs());
            }
        }
    }
    Check::at_most(
        "fock_hermite",
        worst,
        1e-10,
        "number-state coefficients vs Hermite functions; relative",
    )
}

fn grin_symmetry(lambda: f64) -> airybasis::Result<Check> {
    let n = 60;
    let half = required_half_width(lambda, n)?.ceil() + 1.0;
    let points = (2.0 * half / 0.01).round() as usize + 1;
    let g = Grid::new(-half, half, points)?;
    let basis = build_basis(lambda, n, &g)?;
    let medium = GrinMedium::new(1.0, lambda)?;
    let field = airy_wavelet(&WaveletParams::new(REFERENCE_Q)?, &g)?;
    let z: Vec<f64> = (0..=10).map(|i| 2.0 * i as f64).collect();
    let map = intensity_map(&field, &medium, &basis, &z)?;
    let norms = map.row_norms();
    let drift = norms
        .iter()
        .map(|v| (v - norms[0]).abs())
        .fold(0.0, f64::max);
    let asym = map.mirror_asymmetry().into_iter().fold(0.0, f64::max);
    Ok(Check::at_most(
        "grin_symmetry",
        drift.max(asym),
        1e-8,
        format!("row-norm drift {drift:.2e}; mirror asymmetry {asym:.2e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_oracle_low_orders() {
        let x: f64 = 0.7;
        let h = hermite_functions(x, 3);
        let base = PI.powf(-0.25) * (-0.5 * x * x).exp();
        assert!((h[1] - base * 2f64.sqrt() * x).abs() < 1e-15);
        assert!((h[2] - base * (2.0 * x * x - 1.0) / 2f64.sqrt()).abs() < 1e-15);
    }
}
