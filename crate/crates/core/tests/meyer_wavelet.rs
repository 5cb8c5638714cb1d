use std::f64::consts::PI;

use besovq_flow::meyer_wavelet::{
    analyze, eps_from_bits, io, omega, project_pj, project_qj, psi0, psi1, synthesize, wavelet_hat,
    BasisSpec, CoefficientSet, WaveletIndex,
};
use besovq_flow::{Grid, SpectralField, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_band_limited(grid: Grid, limit: i64, seed: u64) -> SpectralField {
    // real field with modes |m_i| <= limit
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for _ in 0..12 {
        let m: Vec<i64> = (0..grid.dim).map(|_| rng.random_range(-limit..=limit)).collect();
        terms.push((m, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)));
    }
    let scale = 2f64.powi(-grid.box_exp);
    SpectralField::from_fn(grid, 1, move |x, _| {
        terms
            .iter()
            .map(|(m, a, ph)| {
                let arg: f64 = m.iter().zip(x).map(|(mi, xi)| *mi as f64 * scale * xi).sum();
                a * (arg + ph).cos()
            })
            .sum()
    })
}

#[test]
fn profile_regression_values() {
    assert_eq!(psi0(0.0), 1.0);
    assert_eq!(psi0(5.0), 0.0);
    // ramp midpoint: θ(1/2) = 1/2, so Ψ⁰(π) = cos(π/4)
    assert!((psi0(PI) - 0.707_106_781_186_547_6).abs() < 1e-15);
    assert_eq!(omega(1.0), 0.0);
    assert!((omega(PI) - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((omega(2.5).powi(2) + omega(5.0).powi(2) - 1.0).abs() < 1e-14);
    assert_eq!(wavelet_hat(1, &[0.0]), C64::new(0.0, 0.0));
    assert!((wavelet_hat(1, &[PI]).norm() - 0.5f64.sqrt()).abs() < 1e-15);
    let expected = C64::from_polar(0.5f64.sqrt(), -PI / 2.0);
    assert!((wavelet_hat(eps_from_bits(&[0, 1]), &[0.0, PI]) - expected).norm() < 1e-15);
}

#[test]
fn single_wavelet_round_trip_and_unit_norm() {
    let spec = BasisSpec::new(2, 0, 3, 64, 0).unwrap();
    for &(eps, j, k) in &[(1u8, 0, [0i64, 0]), (3, 2, [1, 3]), (2, 3, [7, 0])] {
        let idx = WaveletIndex::new(eps, j, &k);
        let set = CoefficientSet::single(spec, idx, 1.0).unwrap();
        let f = synthesize(&set, &spec).unwrap();
        assert!((f.l2_norm() - 1.0).abs() < 1e-12);
        let back = analyze(&f, &spec).unwrap();
        assert!(back.truncated_shells.is_empty());
        let c = back.coefficients;
        assert!((c.get(0, &idx) - C64::new(1.0, 0.0)).norm() < 1e-12);
        for (_, other, z) in c.iter_all() {
            if other != idx {
                assert!(z.norm() <= 1e-10, "{other} = {z}");
            }
        }
    }
}

#[test]
fn zero_field_analyzes_to_empty_set() {
    let spec = BasisSpec::new(1, 0, 3, 64, 0).unwrap();
    let zero = SpectralField::zeros(spec.grid(), 1);
    assert!(analyze(&zero, &spec).unwrap().coefficients.is_empty());
    let empty = CoefficientSet::new(spec, 1);
    assert_eq!(synthesize(&empty, &spec).unwrap().max_abs_coefficient(), 0.0);
}

#[test]
fn band_limited_round_trip() {
    let grid = Grid::new(2, 64, 0).unwrap();
    let spec = BasisSpec::for_grid(&grid).unwrap();
    let limit = spec.passband().floor() as i64;
    let f = random_band_limited(grid, limit, 7);
    let a = analyze(&f, &spec).unwrap();
    assert!(a.truncated_shells.is_empty());
    let back = synthesize(&a.coefficients, &spec).unwrap();
    assert!(back.sub(&f).unwrap().sup_norm() < 1e-10);
}

#[test]
fn content_above_window_is_reported() {
    let grid = Grid::new(1, 64, 0).unwrap();
    let spec = BasisSpec::new(1, 0, 2, 64, 0).unwrap();
    let f = SpectralField::from_fn(grid, 1, |x, _| (12.0 * x[0]).cos());
    let a = analyze(&f, &spec).unwrap();
    assert_eq!(a.truncated_shells, vec![4, 5]);
}

#[test]
fn projections_are_consistent() {
    let grid = Grid::new(2, 64, 1).unwrap();
    let f = random_band_limited(grid, 8, 3);
    for j in -1..=3 {
        let lhs = project_pj(&f, j + 1).unwrap();
        let rhs = project_pj(&f, j).unwrap().add(&project_qj(&f, j).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().sup_norm() < 1e-10, "j={j}");
    }
    let spec = BasisSpec::new(2, -1, 3, 64, 1).unwrap();
    let idx = WaveletIndex::new(1, 1, &[2, 1]);
    let w = synthesize(&CoefficientSet::single(spec, idx, 1.0).unwrap(), &spec).unwrap();
    assert!(project_qj(&w, 1).unwrap().sub(&w).unwrap().sup_norm() < 1e-12);
    for j in [-1, 0, 2, 3] {
        assert!(project_qj(&w, j).unwrap().sup_norm() < 1e-12, "j={j}");
    }
}

#[test]
fn gram_matrix_is_identity_on_window() {
    let spec = BasisSpec::new(1, -2, 2, 4096, 7).unwrap();
    let mut fields = Vec::new();
    for j in -2..=2 {
        for k in -8i64..=8 {
            let side = spec.positions(j) as i64;
            let idx = WaveletIndex::new(1, j, &[k.rem_euclid(side)]);
            fields.push(synthesize(&CoefficientSet::single(spec, idx, 1.0).unwrap(), &spec).unwrap());
        }
    }
    let volume = spec.grid().lattice_period();
    let mut worst: f64 = 0.0;
    for (a, fa) in fields.iter().enumerate() {
        for (b, fb) in fields.iter().enumerate() {
            let dot: C64 = fa
                .component(0)
                .iter()
                .zip(fb.component(0))
                .map(|(x, y)| x * y.conj())
                .sum::<C64>()
                * volume;
            let expected = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - expected).norm());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn binary_and_json_round_trip() {
    let spec = BasisSpec::new(2, -1, 2, 32, 1).unwrap();
    let mut set = CoefficientSet::new(spec, 2).with_time(0.25);
    set.insert(0, WaveletIndex::new(3, 2, &[5, 1]), C64::new(1.5, -0.25)).unwrap();
    set.insert(1, WaveletIndex::new(0, -1, &[0, 0]), C64::new(-2.0, 0.0)).unwrap();
    set.insert(1, WaveletIndex::new(1, 0, &[1, 0]), C64::new(0.0, 3.0)).unwrap();
    let mut bytes = Vec::new();
    io::write_binary(&set, &mut bytes).unwrap();
    let back = io::read_binary(&mut bytes.as_slice()).unwrap();
    assert_eq!(back, set);
    let json = io::to_json(&set).unwrap();
    assert_eq!(io::from_json(&json).unwrap(), set);
    assert!(io::read_binary(&mut &b"XXXX"[..]).is_err());
}

#[test]
fn psi1_is_hermitian() {
    for i in 0..50 {
        let xi = 0.2 * i as f64;
        assert!((psi1(-xi) - psi1(xi).conj()).norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_identities(xi in (2.0 * PI / 3.0)..(4.0 * PI / 3.0)) {
        prop_assert!((omega(xi).powi(2) + omega(2.0 * xi).powi(2) - 1.0).abs() < 1e-12);
        prop_assert!((omega(xi).powi(2) + omega(2.0 * PI - xi).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi0_is_even_and_bounded(xi in -10.0f64..10.0) {
        prop_assert_eq!(psi0(xi), psi0(-xi));
        prop_assert!((0.0..=1.0).contains(&psi0(xi)));
        prop_assert!(omega(xi) >= 0.0);
    }

    #[test]
    fn analysis_inverts_synthesis(seed in 0u64..1000) {
        let spec = BasisSpec::new(2, 0, 3, 64, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set = CoefficientSet::new(spec, 1);
        for _ in 0..20 {
            let j = rng.random_range(0..=3);
            let side = spec.positions(j) as i64;
            let idx = WaveletIndex::new(
                rng.random_range(1..4),
                j,
                &[rng.random_range(0..side), rng.random_range(0..side)],
            );
            set.insert(0, idx, C64::new(rng.random_range(-1.0..1.0), 0.0)).unwrap();
        }
        let back = analyze(&synthesize(&set, &spec).unwrap(), &spec).unwrap().coefficients;
        prop_assert!(back.max_abs_diff(&set) < 1e-10);
    }

    #[test]
    fn synthesis_is_linear(seed in 0u64..1000, alpha in -2.0f64..2.0) {
        let spec = BasisSpec::new(1, 0, 4, 64, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = CoefficientSet::new(spec, 1);
        let mut b = CoefficientSet::new(spec, 1);
        for _ in 0..10 {
            let j = rng.random_range(0..=4);
            let k = rng.random_range(0..spec.positions(j) as i64);
            a.insert(0, WaveletIndex::new(1, j, &[k]), C64::new(rng.random_range(-1.0..1.0), 0.0)).unwrap();
            let k = rng.random_range(0..spec.positions(j) as i64);
            b.insert(0, WaveletIndex::new(1, j, &[k]), C64::new(rng.random_range(-1.0..1.0), 0.0)).unwrap();
        }
        let lhs = synthesize(&a.scaled(alpha).add(&b).unwrap(), &spec).unwrap();
        let mut rhs = synthesize(&b, &spec).unwrap();
        rhs.axpy(alpha, &synthesize(&a, &spec).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs_coefficient() < 1e-12);
    }
}
