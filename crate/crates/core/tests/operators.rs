use besovq_flow::meyer_wavelet::BasisSpec;
use besovq_flow::operators::*;
use besovq_flow::{Grid, SpectralField, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vector_field(grid: Grid, seed: u64, band: i64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys: Vec<Vec<f64>> = (0..grid.dim)
        .map(|_| (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut f = SpectralField::from_physical(grid, &phys).unwrap();
    f.truncate_modes(band);
    f
}

fn without_mean(mut f: SpectralField) -> SpectralField {
    for c in 0..f.ncomp() {
        f.component_mut(c)[0] = C64::new(0.0, 0.0);
    }
    f
}

#[test]
fn riesz_of_plane_wave() {
    let grid = Grid::new(2, 16, 0).unwrap();
    let f = SpectralField::from_fn(grid, 1, |x, _| x[0].cos());
    let r = riesz(&f, 0).unwrap();
    let plus = grid.flat_index(&[1, 0]);
    let ratio = r.component(0)[plus] / f.component(0)[plus];
    assert!((ratio - C64::new(0.0, -1.0)).norm() < 1e-15);
    let constant = SpectralField::from_fn(grid, 1, |_, _| 1.0);
    assert_eq!(riesz(&constant, 1).unwrap().max_abs_coefficient(), 0.0);
    assert!(riesz(&f, 2).is_err());
}

#[test]
fn derivative_of_plane_wave() {
    let grid = Grid::new(2, 16, 0).unwrap();
    let f = SpectralField::from_fn(grid, 1, |x, _| (2.0 * x[0]).sin());
    let d = partial_derivative(&f, 0).unwrap();
    let expected = SpectralField::from_fn(grid, 1, |x, _| 2.0 * (2.0 * x[0]).cos());
    assert!(d.sub(&expected).unwrap().sup_norm() < 1e-12);
    let constant = SpectralField::from_fn(grid, 1, |_, _| 4.0);
    assert_eq!(partial_derivative(&constant, 1).unwrap().max_abs_coefficient(), 0.0);
}

#[test]
fn gradients_are_annihilated() {
    let grid = Grid::new(2, 32, 0).unwrap();
    let phi = SpectralField::from_fn(grid, 1, |x, _| (x[0] + 2.0 * x[1]).sin() + (3.0 * x[1]).cos());
    let g = gradient(&phi).unwrap();
    assert!(leray_project(&g).unwrap().sup_norm() < 1e-10);
}

#[test]
fn taylor_green_is_fixed() {
    let grid = Grid::new(2, 32, 0).unwrap();
    let tg = SpectralField::from_fn(grid, 2, |x, c| {
        if c == 0 { x[0].sin() * x[1].cos() } else { -x[0].cos() * x[1].sin() }
    });
    assert!(max_divergence(&tg).unwrap() < 1e-12);
    assert!(leray_project(&tg).unwrap().sub(&tg).unwrap().sup_norm() < 1e-12);
}

#[test]
fn czo_window_guard() {
    let spec = BasisSpec::new(1, 0, 2, 512, 4).unwrap();
    assert!(czo_matrix(CzoOperator::Identity, &spec).is_err());
    let spec = BasisSpec::new(1, 0, 1, 128, 4).unwrap();
    assert!(czo_matrix(CzoOperator::Riesz(1), &spec).is_err());
}

#[test]
fn identity_matrix_is_orthonormal() {
    let spec = BasisSpec::new(1, 0, 1, 128, 4).unwrap();
    let entries = czo_matrix(CzoOperator::Identity, &spec).unwrap();
    assert_eq!(entries.len(), 48 * 48);
    for e in &entries {
        let target = if e.row == e.col { 1.0 } else { 0.0 };
        assert!((e.value - C64::new(target, 0.0)).norm() < 1e-10);
    }
    let r = czo_decay_check(&entries, 3.0, &spec);
    assert!((r.constant - 1.0).abs() < 1e-10 && (r.diagonal_constant - 1.0).abs() < 1e-10);
}

#[test]
fn riesz_matrix_decay() {
    let small = BasisSpec::new(1, 0, 1, 128, 4).unwrap();
    let large = BasisSpec::new(1, 0, 1, 256, 5).unwrap();
    let a = czo_matrix(CzoOperator::Riesz(0), &small).unwrap();
    let b = czo_matrix(CzoOperator::Riesz(0), &large).unwrap();
    for e in a.iter().filter(|e| (e.row.j - e.col.j).abs() >= 2) {
        assert!(e.value.norm() < 1e-10);
    }
    let ca = czo_decay_check(&a, 3.0, &small).constant;
    let cb = czo_decay_check(&b, 3.0, &large).constant;
    assert!(ca.is_finite() && (0.5..=2.0).contains(&(ca / cb)), "{ca} {cb}");
    let mut prev = 0.0;
    for n0 in [2.0, 3.0, 4.0, 5.0] {
        let c = czo_decay_check(&b, n0, &large).constant;
        assert!(c >= prev);
        prev = c;
    }
    let power = fitted_decay_power(&b, &large, 1, 1e-12).unwrap();
    assert!(power >= 4.0, "fitted power {power}");
}

#[test]
fn czo_csv_export() {
    let spec = BasisSpec::new(1, 0, 0, 64, 2).unwrap();
    let entries = czo_matrix(CzoOperator::Riesz(0), &spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("czo.csv");
    write_czo_csv(&path, &entries, 1).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), entries.len() + 1);
    assert!(text.starts_with("j,k,j_prime,k_prime,eps,eps_prime,re,im"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn riesz_squares_sum_to_minus_identity(seed in any::<u64>()) {
        let grid = Grid::new(2, 32, 0).unwrap();
        let f = without_mean(random_vector_field(grid, seed, 15)).component_field(0);
        let mut total = SpectralField::zeros(grid, 1);
        for l in 0..2 {
            total = total.add(&riesz(&riesz(&f, l).unwrap(), l).unwrap()).unwrap();
        }
        prop_assert!(total.add(&f).unwrap().max_abs_coefficient() < 1e-12 * f.max_abs_coefficient().max(1.0));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seed in any::<u64>(), dim in 2usize..=3) {
        let grid = Grid::new(dim, if dim == 2 { 32 } else { 8 }, 0).unwrap();
        let v = random_vector_field(grid, seed, 100);
        let w = random_vector_field(grid, seed ^ 0xabc, 100);
        let pv = leray_project(&v).unwrap();
        prop_assert!(leray_project(&pv).unwrap().sub(&pv).unwrap().max_abs_coefficient() < 1e-12);
        prop_assert!(max_divergence(&pv).unwrap() < 1e-10);
        // self-adjointness: <Pv, w> = <v, Pw>
        let pw = leray_project(&w).unwrap();
        let dot = |a: &SpectralField, b: &SpectralField| -> C64 {
            (0..dim).map(|c| a.component(c).iter().zip(b.component(c)).map(|(x, y)| x * y.conj()).sum::<C64>()).sum()
        };
        prop_assert!((dot(&pv, &w) - dot(&v, &pw)).norm() < 1e-12 * (1.0 + dot(&v, &v).norm()));
    }
}
