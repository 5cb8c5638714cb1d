use besovq_flow::meyer_wavelet::{analyze, synthesize, BasisSpec, CoefficientSet, WaveletIndex};
use besovq_flow::semigroup::*;
use besovq_flow::{Grid, SpectralField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(grid: Grid, seed: u64, band: i64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys: Vec<Vec<f64>> = vec![(0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect()];
    let mut f = SpectralField::from_physical(grid, &phys).unwrap();
    f.truncate_modes(band);
    f
}

#[test]
fn single_mode_decay() {
    let grid = Grid::new(2, 16, 0).unwrap();
    let f = SpectralField::from_fn(grid, 1, |x, _| x[0].cos());
    let g = apply_semigroup(&f, &FractionalHeatParams::new(1.0, 1.0).unwrap()).unwrap();
    let idx = grid.flat_index(&[1, 0]);
    let ratio = g.component(0)[idx] / f.component(0)[idx];
    assert!((ratio.re - (-1f64).exp()).abs() < 1e-15 && ratio.im == 0.0);
}

#[test]
fn trivial_cases() {
    let grid = Grid::new(2, 16, 1).unwrap();
    let f = random_field(grid, 1, 7);
    let same = apply_semigroup(&f, &FractionalHeatParams::new(0.8, 0.0).unwrap()).unwrap();
    assert_eq!(same, f);
    let c = SpectralField::from_fn(grid, 1, |_, _| 3.0);
    let g = apply_semigroup(&c, &FractionalHeatParams::new(0.8, 5.0).unwrap()).unwrap();
    assert!(g.sub(&c).unwrap().max_abs_coefficient() < 1e-15);
    assert!(FractionalHeatParams::new(0.8, -1.0).is_err());
    assert!(FractionalHeatParams::new(0.0, 1.0).is_err());
}

#[test]
fn evolve_at_zero_time_is_identity() {
    let spec = BasisSpec::new(2, 0, 3, 64, 0).unwrap();
    let set = CoefficientSet::single(spec, WaveletIndex::new(1, 2, &[1, 3]), 1.0).unwrap();
    let out = evolve_coefficients(&set, &FractionalHeatParams::new(0.75, 0.0).unwrap()).unwrap();
    assert!(out.max_abs_diff(&set) < 1e-12);
}

#[test]
fn evolution_stays_within_neighbouring_scales() {
    let spec = BasisSpec::new(2, 0, 4, 128, 0).unwrap();
    for j in 0..=4 {
        let set = CoefficientSet::single(spec, WaveletIndex::new(3, j, &[0, 0]), 1.0).unwrap();
        for t in [0.01, 0.3, 2.0] {
            let out = evolve_coefficients(&set, &FractionalHeatParams::new(0.75, t).unwrap()).unwrap();
            let top = out.max_abs();
            let leak = out
                .iter_all()
                .filter(|(_, idx, _)| idx.eps != 0 && (idx.j - j).abs() > 1)
                .map(|(_, _, z)| z.norm())
                .fold(0.0, f64::max);
            assert!(leak <= 1e-10 * top.max(1e-300) || top < 1e-200, "j={j} t={t}: {leak} of {top}");
        }
    }
}

#[test]
fn zero_input_decay_check() {
    let spec = BasisSpec::new(2, 0, 3, 64, 0).unwrap();
    let times = decay_time_grid(&spec, 0.75, 4).unwrap();
    let r = decay_bound_check(&CoefficientSet::new(spec, 1), 0.75, &times, 5).unwrap();
    assert_eq!(r.large_time_constant, 0.0);
    assert!(r.partial);
    assert!(decay_bound_check(&CoefficientSet::new(spec, 1), 0.75, &times, 4).is_err());
}

fn unit_wavelet_report(size: usize, weight: u32) -> DecayReport {
    let log2 = size.trailing_zeros() as i32;
    let spec = BasisSpec::new(2, 0, log2 - 3, size, 0).unwrap();
    let set = CoefficientSet::single(spec, WaveletIndex::new(1, 1, &[1, 0]), 1.0).unwrap();
    let times = decay_time_grid(&spec, 0.75, 6).unwrap();
    decay_bound_check(&set, 0.75, &times, weight).unwrap()
}

#[test]
fn unit_wavelet_decay_constants() {
    let coarse = unit_wavelet_report(64, 5);
    let fine = unit_wavelet_report(128, 5);
    for r in [&coarse, &fine] {
        assert!(!r.partial, "{:?}", r.flags);
        assert!(r.rate > 0.0);
        assert!(r.large_time_constant.is_finite() && r.small_time_constant.is_finite());
    }
    let ratio = coarse.large_time_constant / fine.large_time_constant;
    assert!((0.5..=2.0).contains(&ratio), "{coarse:?} {fine:?}");
    let ratio = coarse.small_time_constant / fine.small_time_constant;
    assert!((0.5..=2.0).contains(&ratio));
}

#[test]
fn stronger_spatial_weight_never_lowers_the_constant() {
    let mut prev = 0.0;
    for n in 5..=8 {
        let r = unit_wavelet_report(64, n);
        assert!(r.large_time_constant >= prev);
        prev = r.large_time_constant;
    }
}

#[test]
fn trajectory_dump() {
    let spec = BasisSpec::new(1, 0, 2, 32, 0).unwrap();
    let set = CoefficientSet::single(spec, WaveletIndex::new(1, 1, &[1]), 1.0).unwrap();
    let f = synthesize(&set, &spec).unwrap();
    let tc = semigroup_trajectory(&f, 1.0, &[0.0, 0.1, 1.0], &spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    write_trajectory_csv(&path, &tc).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,component,eps,j,k,abs"));
    assert!(text.lines().count() > 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_property(seed in any::<u64>(), beta in 0.3f64..1.5, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let grid = Grid::new(2, 16, 0).unwrap();
        let f = random_field(grid, seed, 8);
        let a = apply_semigroup(&apply_semigroup(&f, &FractionalHeatParams::new(beta, t1).unwrap()).unwrap(),
            &FractionalHeatParams::new(beta, t2).unwrap()).unwrap();
        let b = apply_semigroup(&f, &FractionalHeatParams::new(beta, t1 + t2).unwrap()).unwrap();
        prop_assert!(a.sub(&b).unwrap().max_abs_coefficient() <= 1e-12 * f.max_abs_coefficient());
    }

    #[test]
    fn contraction_and_mass(seed in any::<u64>(), beta in 0.3f64..1.5) {
        let grid = Grid::new(2, 16, 1).unwrap();
        let f = random_field(grid, seed, 16);
        let mut prev = f.l2_norm();
        for t in [0.01, 0.1, 1.0, 10.0] {
            let g = apply_semigroup(&f, &FractionalHeatParams::new(beta, t).unwrap()).unwrap();
            prop_assert!(g.l2_norm() <= prev * (1.0 + 1e-14));
            prop_assert_eq!(g.component(0)[0], f.component(0)[0]);
            prev = g.l2_norm();
        }
    }

    #[test]
    fn evolution_matches_multiplier(seed in any::<u64>(), t in 0.0f64..1.0) {
        let spec = BasisSpec::new(2, 0, 3, 64, 0).unwrap();
        let f = random_field(spec.grid(), seed, 5);
        let set = analyze(&f, &spec).unwrap().coefficients;
        let p = FractionalHeatParams::new(0.75, t).unwrap();
        let evolved = evolve_coefficients(&set, &p).unwrap();
        let direct = apply_semigroup(&f, &p).unwrap();
        let back = synthesize(&evolved, &spec).unwrap();
        prop_assert!(back.sub(&direct).unwrap().sup_norm() < 1e-10);
    }
}
