use airybasis::dynamics::{
    evolve, gaussian_packet, mean_position, project, trajectory, GaussianPacketParams,
};
use airybasis::grin::{airy_wavelet, propagate_grin, GrinMedium, WaveletParams};
use airybasis::oracle::{build_hamiltonian, diagonalize};
use airybasis::spectrum::build_basis;
use airybasis::{Error, Grid};

fn grid() -> Grid {
    Grid::new(-30.0, 30.0, 6001).unwrap()
}

#[test]
fn packet_round_trip_through_the_basis() {
    let g = grid();
    let basis = build_basis(1.0, 60, &g).unwrap();
    let packet = GaussianPacketParams::new(6.0, 1.5).unwrap();
    let c = project(&gaussian_packet(&packet, &g).unwrap(), &basis).unwrap();
    assert!(c.norm_sq() > 0.9999);

    let times = [0.0, 0.7, 3.1];
    let fast = trajectory(&packet, &basis, &times).unwrap();
    for (t, x) in fast {
        let slow = mean_position(&evolve(&c, &basis, t).unwrap()).unwrap();
        assert!((x - slow).abs() < 1e-7, "t={t}: {x} vs {slow}");
    }
}

#[test]
fn spectral_energies_match_the_oracle_levels() {
    let g = grid();
    let basis = build_basis(1.0, 6, &g).unwrap();
    let pairs = diagonalize(&build_hamiltonian(1.0, &g).unwrap(), 6).unwrap();
    for (e, (fd, _)) in basis.energies().iter().zip(&pairs) {
        assert!((e - fd).abs() < 1e-4);
    }
}

#[test]
fn grin_field_keeps_norm_and_symmetry() {
    let g = Grid::new(-40.0, 40.0, 4001).unwrap();
    let basis = build_basis(1.0, 80, &g).unwrap();
    let medium = GrinMedium::new(1.0, 1.0).unwrap();
    let field = airy_wavelet(&WaveletParams::first_zero_shift(), &g).unwrap();
    let c = project(&field, &basis).unwrap();
    for z in [0.5, 4.0] {
        let e = propagate_grin(&field, &medium, &basis, z).unwrap();
        assert!((e.norm_sq() - c.norm_sq()).abs() < 1e-8);
        let s = e.samples();
        let asym = (0..s.len())
            .map(|i| (s[i] - s[s.len() - 1 - i]).norm())
            .fold(0.0, f64::max);
        assert!(asym < 1e-12);
    }
}

#[test]
fn mismatched_medium_is_rejected() {
    let g = grid();
    let basis = build_basis(1.0, 10, &g).unwrap();
    let field = airy_wavelet(&WaveletParams::first_zero_shift(), &g).unwrap();
    let medium = GrinMedium::new(1.0, 0.5).unwrap();
    assert!(matches!(
        propagate_grin(&field, &medium, &basis, 1.0),
        Err(Error::Domain(_))
    ));
}
