//! Brute-force reference spectrum: the three-point finite-difference Hamiltonian of
//! `p²/2 + λ|x|` with Dirichlet ends, diagonalized directly.
//!
//! Eigenvalues come from the implicit-shift QL iteration on the symmetric tridiagonal
//! matrix; eigenvectors for the requested lowest levels from inverse iteration.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quadrature::{Grid, WaveFunction};

const QL_MAX_ITER: usize = 60;
const INVERSE_ITERATIONS: usize = 4;

/// Symmetric tridiagonal matrix acting on samples over `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    pub grid: Grid,
}

impl TridiagonalOperator {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>, grid: Grid) -> Result<Self> {
        if diagonal.len() != grid.len() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(domain(
                "tridiagonal operator dimensions do not match its grid",
            ));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
            grid,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diagonal[i] * v[i];
                if i > 0 {
                    acc += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.off_diagonal[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Diagonal `1/h² + λ|x_i|`, off-diagonal `-1/(2h²)`.
pub fn build_hamiltonian(lambda: f64, grid: &Grid) -> Result<TridiagonalOperator> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!(
            "potential slope λ must be positive, got {lambda}"
        )));
    }
    let h2 = grid.spacing() * grid.spacing();
    let diagonal = grid.points().map(|x| 1.0 / h2 + lambda * x.abs()).collect();
    let off_diagonal = vec![-0.5 / h2; grid.len() - 1];
    TridiagonalOperator::new(diagonal, off_diagonal, *grid)
}

/// All eigenvalues of a symmetric tridiagonal matrix, ascending, by implicit QL.
pub fn tridiagonal_eigenvalues(diagonal: &[f64], off_diagonal: &[f64]) -> Result<Vec<f64>> {
    let n = diagonal.len();
    let mut d = diagonal.to_vec();
    let mut e = off_diagonal.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Convergence(format!(
                    "QL iteration stalled on eigenvalue {l} after {QL_MAX_ITER} sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.total_cmp(b));
    Ok(d)
}

/// Solves `(T - σ) y = rhs` by Gaussian elimination with partial pivoting.
fn shifted_solve(op: &TridiagonalOperator, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = op.dim();
    // rows hold (sub, diag, super, super2) after pivoting
    let mut sub: Vec<f64> = op.off_diagonal.clone();
    let mut diag: Vec<f64> = op.diagonal.iter().map(|d| d - shift).collect();
    let mut sup: Vec<f64> = op.off_diagonal.clone();
    let mut sup2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    let tiny = f64::EPSILON * diag.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);

    for i in 0..n - 1 {
        if diag[i].abs() >= sub[i].abs() {
            if diag[i] == 0.0 {
                diag[i] = tiny;
            }
            let factor = sub[i] / diag[i];
            diag[i + 1] -= factor * sup[i];
            b[i + 1] -= factor * b[i];
            sub[i] = 0.0;
        } else {
            let factor = diag[i] / sub[i];
            diag[i] = sub[i];
            let tmp = diag[i + 1];
            diag[i + 1] = sup[i] - factor * tmp;
            sup[i] = tmp;
            if i + 1 < n - 1 {
                sup2[i] = sup[i + 1];
                sup[i + 1] *= -factor;
            }
            b.swap(i, i + 1);
            b[i + 1] -= factor * b[i];
            sub[i] = 0.0;
        }
    }
    if diag[n - 1] == 0.0 {
        diag[n - 1] = tiny;
    }
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        if i + 1 < n {
            acc -= sup[i] * y[i + 1];
        }
        if i + 2 < n {
            acc -= sup2[i] * y[i + 2];
        }
        y[i] = acc / diag[i];
    }
    y
}

/// Flips `v` so that the outermost lobe on the right is positive.
pub(crate) fn apply_sign_convention(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if peak == 0.0 {
        return;
    }
    let Some(mut i) = v.iter().rposition(|x| x.abs() >= 1e-3 * peak) else {
        return;
    };
    while i > 0 && v[i - 1].abs() >= v[i].abs() {
        i -= 1;
    }
    if v[i] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// The `n_lowest` lowest eigenpairs, energies ascending. Eigenvectors satisfy
/// `Σ |v_i|² h = 1` and follow the positive-outer-lobe sign convention.
pub fn diagonalize(op: &TridiagonalOperator, n_lowest: usize) -> Result<Vec<(f64, WaveFunction)>> {
    let n = op.dim();
    if n_lowest == 0 || n_lowest > n {
        return Err(domain(format!(
            "cannot take {n_lowest} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let values = tridiagonal_eigenvalues(&op.diagonal, &op.off_diagonal)?;
    let h = op.grid.spacing();
    let mut out = Vec::with_capacity(n_lowest);
    for (k, &energy) in values.iter().take(n_lowest).enumerate() {
        let shift = energy - 1e-10 * energy.abs().max(1.0);
        // deterministic start vector with components along every eigenvector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i * 7 + k * 13) % 11) as f64 / 11.0)
            .collect();
        for _ in 0..INVERSE_ITERATIONS {
            v = shifted_solve(op, shift, &v);
            let norm = (v.iter().map(|x| x * x).sum::<f64>() * h).sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::Convergence(format!(
                    "inverse iteration broke down for eigenvalue {k}"
                )));
            }
            for x in &mut v {
                *x /= norm;
            }
        }
        apply_sign_convention(&mut v);
        let samples = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        out.push((energy, WaveFunction::from_parts_unchecked(op.grid, samples)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::inner_product;
    use crate::spectrum::{eigenfunction, level_energy};

    const REFERENCE_ENERGIES: [f64; 6] =
        [0.808616, 1.855757, 2.578096, 3.244607, 3.825715, 4.381671];

    #[test]
    fn three_point_stencil() {
        let g = Grid::new(-1.0, 1.0, 3).unwrap();
        let op = build_hamiltonian(1.0, &g).unwrap();
        assert_eq!(op.diagonal, vec![2.0, 1.0, 2.0]);
        assert_eq!(op.off_diagonal, vec![-0.5, -0.5]);
    }

    #[test]
    fn potential_vanishes_at_origin() {
        let g = Grid::new(-2.0, 2.0, 41).unwrap();
        for lambda in [0.1, 1.0, 7.0] {
            let op = build_hamiltonian(lambda, &g).unwrap();
            let h = g.spacing();
            assert!((op.diagonal[20] - 1.0 / (h * h)).abs() < 1e-9);
        }
    }

    #[test]
    fn small_matrix_eigenvalues() {
        // [[2,-1],[-1,2]] → 1, 3
        let v = tridiagonal_eigenvalues(&[2.0, 2.0], &[-1.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        // discrete Laplacian: 2 - 2cos(kπ/(n+1))
        let n = 50;
        let v = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, e) in v.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_satisfy_the_matrix_equation() {
        let g = Grid::new(-12.0, 12.0, 801).unwrap();
        let op = build_hamiltonian(1.0, &g).unwrap();
        let pairs = diagonalize(&op, 6).unwrap();
        for (e, v) in &pairs {
            let re: Vec<f64> = v.samples().iter().map(|z| z.re).collect();
            let av = op.apply(&re);
            let res: f64 = av
                .iter()
                .zip(&re)
                .map(|(a, x)| (a - e * x).powi(2))
                .sum::<f64>()
                .sqrt();
            let norm: f64 = re.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(res <= 1e-8 * norm * e.abs().max(1.0), "{res}");
        }
    }

    #[test]
    fn oracle_reproduces_reference_energies() {
        let g = Grid::new(-40.0, 40.0, 8001).unwrap();
        let op = build_hamiltonian(1.0, &g).unwrap();
        let pairs = diagonalize(&op, 6).unwrap();
        for ((e, _), r) in pairs.iter().zip(REFERENCE_ENERGIES) {
            assert!((e - r).abs() < 1e-4, "{e} vs {r}");
        }
        let h = g.spacing();
        for (i, (_, a)) in pairs.iter().enumerate() {
            assert!(a.samples().iter().all(|z| z.im == 0.0));
            for (j, (_, b)) in pairs.iter().enumerate() {
                let dot: f64 = a
                    .samples()
                    .iter()
                    .zip(b.samples())
                    .map(|(x, y)| x.re * y.re)
                    .sum::<f64>()
                    * h;
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-8, "({i},{j}) {dot}");
            }
        }
        let psi0 = eigenfunction(0, 1.0, &g).unwrap();
        let overlap = inner_product(&pairs[0].1, &psi0.samples).unwrap().norm();
        assert!(overlap >= 1.0 - 1e-6, "{overlap}");
        // sign convention agrees with the analytic states
        for (n, (_, v)) in pairs.iter().enumerate() {
            let psi = eigenfunction(n, 1.0, &g).unwrap();
            assert!(inner_product(v, &psi.samples).unwrap().re > 0.99, "n={n}");
        }
    }

    #[test]
    fn energy_error_is_second_order() {
        let exact: Vec<f64> = (0..6).map(|n| level_energy(n, 1.0).unwrap()).collect();
        let mut errors = Vec::new();
        for points in [1001, 2001, 4001] {
            let g = Grid::new(-20.0, 20.0, points).unwrap();
            let pairs = diagonalize(&build_hamiltonian(1.0, &g).unwrap(), 6).unwrap();
            errors.push(
                pairs
                    .iter()
                    .zip(&exact)
                    .map(|((e, _), x)| (e - x).abs())
                    .collect::<Vec<_>>(),
            );
        }
        #[allow(clippy::needless_range_loop)]
        for n in 0..6 {
            assert!(errors[1][n] < errors[0][n] && errors[2][n] < errors[1][n]);
            for k in 0..2 {
                let order = (errors[k][n] / errors[k + 1][n]).log2();
                assert!((order - 2.0).abs() < 0.1, "n={n} order={order}");
            }
        }
    }

    #[test]
    fn requests_beyond_dimension_are_rejected() {
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        let op = build_hamiltonian(1.0, &g).unwrap();
        assert!(diagonalize(&op, 6).is_err());
        assert!(diagonalize(&op, 0).is_err());
        assert!(build_hamiltonian(0.0, &g).is_err());
    }
}
