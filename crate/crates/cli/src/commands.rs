use airybasis::dynamics::{trajectory, GaussianPacketParams};
use airybasis::grin::{airy_wavelet, intensity_map, GrinMedium, WaveletParams};
use airybasis::spectrum::{build_basis, level_energy, Parity};
use airybasis::Grid;

use crate::config::RunConfig;
use crate::error::{usage, CliResult};
use crate::format::{fmt_g9, Cell, Table};

fn grid(cfg: &RunConfig) -> CliResult<Grid> {
    Ok(Grid::new(cfg.x_min, cfg.x_max, cfg.n_points)?)
}

/// `(n, parity, E_n)` for the lowest `nstates` levels.
pub fn eigs(cfg: &RunConfig) -> CliResult<Table> {
    let mut t = Table::new(vec!["n".into(), "parity".into(), "energy".into()]);
    for n in 0..cfg.n_states {
        t.push(vec![
            Cell::Int(n as i64),
            Cell::Text(Parity::of_index(n).as_str().into()),
            Cell::Num(level_energy(n, cfg.lambda)?),
        ]);
    }
    Ok(t)
}

/// `x, psi_0, …, psi_{N-1}` on the configured grid.
pub fn eigenfunctions(cfg: &RunConfig) -> CliResult<Table> {
    let g = grid(cfg)?;
    let basis = build_basis(cfg.lambda, cfg.n_states, &g)?;
    let mut columns = vec!["x".to_string()];
    columns.extend((0..cfg.n_states).map(|n| format!("psi_{n}")));
    let mut t = Table::new(columns);
    for (i, x) in g.points().enumerate() {
        let mut row = vec![Cell::Num(x)];
        row.extend(
            basis
                .states()
                .iter()
                .map(|s| Cell::Num(s.samples.samples()[i].re)),
        );
        t.push(row);
    }
    Ok(t)
}

/// `(t, ⟨x⟩)` for the Gaussian packet, sampled every `dt·t_unit` up to `t_max·t_unit`.
pub fn bounce(cfg: &RunConfig) -> CliResult<Table> {
    let g = grid(cfg)?;
    let packet = GaussianPacketParams::new(cfg.extra("x0"), cfg.extra("sigma"))?;
    let unit = cfg.extra("t_unit");
    let dt = cfg.extra("dt");
    let steps = (cfg.extra("t_max") / dt + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt * unit).collect();
    // Clip checks come before the (more expensive) basis build.
    airybasis::dynamics::gaussian_packet(&packet, &g)?;
    let basis = build_basis(cfg.lambda, cfg.n_states, &g)?;
    let mut t = Table::new(vec!["t".into(), "t_units".into(), "x_mean".into()]);
    for (i, (time, x)) in trajectory(&packet, &basis, &times)?.into_iter().enumerate() {
        t.push(vec![
            Cell::Num(time),
            Cell::Num(i as f64 * dt),
            Cell::Num(x),
        ]);
    }
    Ok(t)
}

/// Row-major `|E(x, z)|²`: one row per z, columns are the x nodes inside the window.
pub fn grin(cfg: &RunConfig) -> CliResult<Table> {
    let g = grid(cfg)?;
    let medium = GrinMedium::new(cfg.extra("kappa"), cfg.lambda)?;
    let field = airy_wavelet(&WaveletParams::new(cfg.extra("q"))?, &g)?;
    let basis = build_basis(cfg.lambda, cfg.n_states, &g)?;
    let n_z = cfg.extra("n_z") as usize;
    let z_max = cfg.extra("z_max");
    let z: Vec<f64> = if n_z == 1 {
        vec![0.0]
    } else {
        (0..n_z)
            .map(|i| z_max * i as f64 / (n_z - 1) as f64)
            .collect()
    };
    let map = intensity_map(&field, &medium, &basis, &z)?;
    let window = cfg.extra("window");
    let keep: Vec<usize> = (0..g.len())
        .filter(|&i| g.point(i).abs() <= window + 1e-9 * g.spacing())
        .collect();
    if keep.is_empty() {
        return Err(usage(format!("--window {window} contains no grid points")));
    }
    let mut columns = vec!["z".to_string()];
    columns.extend(keep.iter().map(|&i| fmt_g9(g.point(i))));
    let mut t = Table::new(columns);
    for (z, row) in map.z.iter().zip(&map.rows) {
        let mut cells = vec![Cell::Num(*z)];
        cells.extend(keep.iter().map(|&i| Cell::Num(row[i])));
        t.push(cells);
    }
    Ok(t)
}
