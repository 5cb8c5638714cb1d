use besovq_flow::function_spaces::*;
use besovq_flow::meyer_wavelet::{synthesize, BasisSpec, CoefficientSet, WaveletIndex};
use besovq_flow::semigroup::semigroup_trajectory;
use besovq_flow::{Grid, SpectralField, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec2() -> BasisSpec {
    BasisSpec::new(2, 0, 3, 64, 0).unwrap()
}

fn random_set(spec: BasisSpec, seed: u64, nnz: usize, j_top: i32) -> CoefficientSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = CoefficientSet::new(spec, 1);
    for _ in 0..nnz {
        let eps = rng.random_range(1..(1u8 << spec.dim));
        let j = rng.random_range(spec.j_min..=j_top);
        let side = spec.positions(j) as i64;
        let k: Vec<i64> = (0..spec.dim).map(|_| rng.random_range(0..side)).collect();
        let v = rng.random_range(-1.0..1.0);
        set.insert(0, WaveletIndex::new(eps, j, &k), C64::new(v, 0.0)).unwrap();
    }
    set
}

/// Cube supremum by direct enumeration of coefficients inside each cube.
fn besovq_bruteforce(set: &CoefficientSet, params: &SpaceParams) -> f64 {
    let spec = set.spec();
    let n = spec.dim as f64;
    let coeffs: Vec<_> = set.iter_all().filter(|c| c.1.eps != 0).collect();
    let mut best: f64 = 0.0;
    for j0 in -spec.box_exp..=spec.j_max {
        let side = spec.positions(j0) as i64;
        for lin in 0..side.pow(spec.dim as u32) {
            let k0: Vec<i64> = if spec.dim == 1 { vec![lin] } else { vec![lin / side, lin % side] };
            let cube = DyadicCube::new(j0, &k0);
            let mut total = 0.0;
            for j in j0.max(spec.j_min)..=spec.j_max {
                let s: f64 = coeffs
                    .iter()
                    .filter(|c| c.1.j == j && cube.contains(&c.1))
                    .map(|c| c.2.norm().powf(params.p))
                    .sum();
                total += 2f64.powf(j as f64 * params.q * (params.gamma1 + n / 2.0 - n / params.p))
                    * s.powf(params.q / params.p);
            }
            let pref = cube.measure().powf(params.gamma2 / n - 1.0 / params.p);
            best = best.max(pref * total.powf(1.0 / params.q));
        }
    }
    best
}

#[test]
fn besov_single_and_pair() {
    let spec = spec2();
    let (s, p, q) = (0.3, 2.0, 3.0);
    let w = s + 1.0 - 2.0 / p;
    let one = CoefficientSet::single(spec, WaveletIndex::new(1, 2, &[1, 3]), 1.0).unwrap();
    let r = besov_norm(&one, s, p, q).unwrap();
    assert!((r.value - 2f64.powf(2.0 * w)).abs() < 1e-14);
    let mut two = one.clone();
    two.insert(0, WaveletIndex::new(2, 2, &[0, 0]), C64::new(1.0, 0.0)).unwrap();
    let r = besov_norm(&two, s, p, q).unwrap();
    assert!((r.value - 2f64.powf(1.0 / p) * 2f64.powf(2.0 * w)).abs() < 1e-13);
}

#[test]
fn besov_shift_oracle() {
    let spec = spec2();
    let (s, p, q) = (-0.2, 1.5, 2.5);
    let set = random_set(spec, 3, 30, 2);
    let mut shifted = CoefficientSet::new(spec, 1);
    for (_, idx, z) in set.iter_all() {
        shifted
            .insert(0, WaveletIndex { j: idx.j + 1, ..idx }, z)
            .unwrap();
    }
    let a = besov_norm(&set, s, p, q).unwrap().value;
    let b = besov_norm(&shifted, s, p, q).unwrap().value;
    let factor = 2f64.powf(s + 1.0 - 2.0 / p);
    assert!((b / a - factor).abs() < 1e-12, "{} vs {factor}", b / a);
}

#[test]
fn empty_sets_have_zero_norms() {
    let set = CoefficientSet::new(spec2(), 2);
    assert_eq!(besov_norm(&set, 0.0, 2.0, 2.0).unwrap().value, 0.0);
    assert_eq!(besovq_norm(&set, &SpaceParams::default()).unwrap().value, 0.0);
}

#[test]
fn besovq_single_coefficient_witness() {
    let spec = spec2();
    let idx = WaveletIndex::new(3, 2, &[1, 2]);
    let set = CoefficientSet::single(spec, idx, 1.0).unwrap();
    // γ2/n < 1/p: smaller cubes weigh more, so Q_{j,k} itself wins
    let params = SpaceParams::default();
    let w = params.shell_exponent(2);
    let c = params.cube_exponent(2);
    let r = besovq_norm(&set, &params).unwrap();
    let expected = 2f64.powf(2.0 * w) * 2f64.powf(-2.0 * 2.0 * c);
    assert!((r.value - expected).abs() < 1e-13);
    assert_eq!(r.witness.cube, DyadicCube::new(2, &[1, 2]));
    // γ2/n > 1/p: the largest cube containing it wins
    let params = SpaceParams { gamma2: 1.6, ..params };
    let r = besovq_norm(&set, &params).unwrap();
    assert_eq!(r.witness.cube, DyadicCube::new(0, &[0, 0]));
    assert!((r.value - 2f64.powf(2.0 * params.shell_exponent(2))).abs() < 1e-13);
}

#[test]
fn besovq_matches_bruteforce() {
    for seed in 0..6 {
        let set = random_set(spec2(), seed, 25, 3);
        for params in [
            SpaceParams::default(),
            SpaceParams { gamma2: 1.6, p: 2.5, q: 1.5, ..SpaceParams::default() },
        ] {
            let fast = besovq_norm(&set, &params).unwrap().value;
            let slow = besovq_bruteforce(&set, &params);
            assert!((fast - slow).abs() <= 1e-12 * slow, "{fast} vs {slow}");
        }
    }
}

#[test]
fn besovq_collapses_to_besov_when_gamma2_is_n_over_p() {
    for seed in 0..20 {
        let set = random_set(spec2(), 100 + seed, 20, 3);
        let p = 2.0;
        let params = SpaceParams {
            gamma1: 0.25,
            gamma2: 2.0 / p,
            p,
            q: p,
            ..SpaceParams::default()
        };
        let a = besovq_norm(&set, &params).unwrap().value;
        let b = besov_norm(&set, params.gamma1, p, p).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
    }
}

#[test]
fn embedding_rejects_mismatched_params() {
    let set = random_set(spec2(), 1, 10, 3);
    let a = SpaceParams::default();
    assert!(check_embedding(&set, &a, &SpaceParams { p: 3.0, q: 4.0, ..a }).is_err());
    assert!(check_embedding(&set, &a.with_q(4.0), &a).is_err());
    let single = CoefficientSet::single(spec2(), WaveletIndex::new(1, 1, &[0, 1]), 0.7).unwrap();
    let e = check_embedding(&single, &a, &a.with_q(4.0)).unwrap();
    assert!(e.holds);
    assert_eq!(e.norm_small, e.norm_large);
}

#[test]
fn scaling_is_reindexing() {
    let spec = spec2();
    let params = SpaceParams::default();
    let set = random_set(spec, 9, 30, 2);
    assert_eq!(scaling_check(&set, &params, 0).unwrap().ratio, 1.0);
    let single = CoefficientSet::single(spec, WaveletIndex::new(2, 1, &[1, 0]), 1.0).unwrap();
    assert!((scaling_check(&single, &params, 1).unwrap().ratio - 1.0).abs() < 1e-14);
    let r = scaling_check(&set, &params, 1).unwrap().ratio;
    assert!((0.8..=1.25).contains(&r), "{r}");
    let top = CoefficientSet::single(spec, WaveletIndex::new(2, 3, &[1, 0]), 1.0).unwrap();
    assert!(scaling_check(&top, &params, 1).is_err());
}

#[test]
fn admissibility_and_criticality() {
    let p = SpaceParams::default();
    p.check_admissible(2).unwrap();
    p.check_critical().unwrap();
    let c = SpaceParams::critical(0.5, 2.0, 2.0, 1.0, 3.0, 0.5).unwrap();
    assert_eq!(c.gamma1, -0.5);
    assert!(SpaceParams { m: 1.5, ..p }.check_admissible(2).is_err());
    assert!(SpaceParams { m_prime: 1.2, ..p }.check_admissible(2).is_err());
    assert!(SpaceParams { gamma2: 1.5, ..p }.check_admissible(2).is_err());
    assert!(SpaceParams::new(0.0, 0.5, 0.9, 2.0, 0.75, 3.0, 0.5).is_err());
    assert!(SpaceParams::new(0.0, 0.5, 2.0, 2.0, 0.5, 3.0, 0.5).is_err());
}

#[test]
fn cube_containment() {
    let q = DyadicCube::new(1, &[1, 0]);
    assert!(q.contains(&WaveletIndex::new(1, 3, &[5, 3])));
    assert!(!q.contains(&WaveletIndex::new(1, 3, &[3, 3])));
    assert!(!q.contains(&WaveletIndex::new(1, 0, &[0, 0])));
    assert_eq!(q.measure(), 0.25);
}

fn constant_trajectory(idx: WaveletIndex, times: &[f64], a: impl Fn(f64) -> f64) -> CoefficientTrajectory {
    let spec = spec2();
    let sets = times
        .iter()
        .map(|&t| CoefficientSet::single(spec, idx, a(t)).unwrap())
        .collect();
    CoefficientTrajectory::new(times.to_vec(), sets).unwrap()
}

#[test]
fn zero_trajectory_is_zero_everywhere() {
    let spec = spec2();
    let times = log_time_grid(1e-3, 1.0, 4).unwrap();
    let sets = times.iter().map(|_| CoefficientSet::new(spec, 2)).collect();
    let tc = CoefficientTrajectory::new(times, sets).unwrap();
    let levels: Vec<i32> = (0..=3).collect();
    let n = tent_norm(&tc, &SpaceParams::default(), &levels).unwrap();
    assert_eq!(n.value, 0.0);
    assert!(n.parts.iter().all(|r| r.value == 0.0));
    assert_eq!(besov_infinity_norm(&tc, -0.5, 1.0, 0.75).unwrap(), 0.0);
    assert_eq!(besov_infinity_norm(&tc, -0.5, 0.0, 0.75).unwrap(), 0.0);
}

#[test]
fn tent_rejects_empty_grids() {
    let idx = WaveletIndex::new(1, 1, &[0, 0]);
    let tc = constant_trajectory(idx, &[0.1, 0.2], |_| 1.0);
    assert!(tent_i(&tc, &SpaceParams::default(), &[]).is_err());
    assert!(CoefficientTrajectory::new(vec![], vec![]).is_err());
    let r = tent_iii(&tc, &SpaceParams::default(), &[7]).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(!r.warnings.is_empty());
}

#[test]
fn tent_iv_constant_coefficient_closed_form() {
    let params = SpaceParams::default();
    let j = 2;
    let idx = WaveletIndex::new(1, j, &[3, 1]);
    let times = log_time_grid(1e-6, 2f64.powf(-2.0 * j as f64 * params.beta), 4).unwrap();
    let tc = constant_trajectory(idx, &times, |_| 1.0);
    let r = tent_iv(&tc, &params, &[0, 1, 2, 3]).unwrap();
    let n = 2.0;
    let expected = 2f64.powf(-n * j as f64 * params.cube_exponent(2))
        * 2f64.powf(j as f64 * params.shell_exponent(2))
        * (1.0 / params.m_prime).powf(1.0 / params.p);
    let rooted = r.value.powf(1.0 / params.q);
    assert!((rooted - expected).abs() < 1e-12 * expected, "{rooted} vs {expected}");
    assert_eq!(r.witness.cube, DyadicCube::new(j, &[3, 1]));
}

#[test]
fn tent_i_peak_of_exponential_profile() {
    let params = SpaceParams::default();
    let j = 1;
    let speed = 2f64.powf(2.0 * j as f64 * params.beta);
    let idx = WaveletIndex::new(2, j, &[1, 1]);
    let times = log_time_grid(1e-3, 20.0, 64).unwrap();
    let tc = constant_trajectory(idx, &times, |t| (-t * speed).exp());
    let r = tent_i(&tc, &params, &[1]).unwrap();
    let tau_peak = params.m / params.p;
    let tau = r.witness.t.unwrap() * speed;
    assert!((tau / tau_peak - 1.0).abs() < 0.02, "peak at {tau}");
    let peak = (tau_peak.powf(params.m) * (-params.p * tau_peak).exp()).powf(params.q / params.p);
    let expected = 2f64.powf(-2.0 * params.q * params.cube_exponent(2))
        * 2f64.powf(j as f64 * params.q * params.shell_exponent(2))
        * peak;
    assert!((r.value / expected - 1.0).abs() < 1e-3);
}

#[test]
fn tent_ii_empty_range_after_cube_time() {
    let params = SpaceParams::default();
    let idx = WaveletIndex::new(1, 1, &[0, 0]);
    let tc = constant_trajectory(idx, &[0.0, 0.5, 2.0], |_| 1.0);
    let cube = DyadicCube::new(1, &[0, 0]);
    // r^{2β} = 2^{-1.5} < 2.0
    assert_eq!(tent_value_at(&tc, &params, TentKind::II, &cube, Some(2.0)).unwrap(), 0.0);
    assert!(tent_value_at(&tc, &params, TentKind::II, &cube, Some(0.0)).unwrap() > 0.0);
    assert_eq!(tent_value_at(&tc, &params, TentKind::I, &cube, Some(0.0)).unwrap(), 0.0);
}

fn wavelet_field(spec: &BasisSpec, idx: WaveletIndex) -> SpectralField {
    synthesize(&CoefficientSet::single(*spec, idx, 1.0).unwrap(), spec).unwrap()
}

fn wavelet_trajectory(per_octave: usize) -> CoefficientTrajectory {
    let spec = spec2();
    let params = SpaceParams::default();
    let f = wavelet_field(&spec, WaveletIndex::new(3, 1, &[1, 0]));
    let t_min = 2f64.powf(-2.0 * params.beta * 4.0);
    let times = log_time_grid(t_min, 8.0, per_octave).unwrap();
    semigroup_trajectory(&f, params.beta, &times, &spec).unwrap()
}

#[test]
fn tent_functionals_stable_under_refinement() {
    let params = SpaceParams::default();
    let levels: Vec<i32> = (0..=3).collect();
    let coarse = wavelet_trajectory(8);
    let fine = wavelet_trajectory(16);
    for kind in TentKind::ALL {
        let a = tent_functional(&coarse, &params, kind, &levels).unwrap().value;
        let b = tent_functional(&fine, &params, kind, &levels).unwrap().value;
        assert!(a.is_finite() && a > 0.0, "{kind}: {a}");
        let tol = if matches!(kind, TentKind::III | TentKind::IV) { 0.01 } else { 0.02 };
        assert!((a / b - 1.0).abs() < tol, "{kind}: {a} vs {b}");
    }
}

#[test]
fn tent_norm_is_max_and_witnesses_reproduce() {
    let params = SpaceParams::default();
    let levels: Vec<i32> = (0..=3).collect();
    let tc = wavelet_trajectory(8);
    let n = tent_norm(&tc, &params, &levels).unwrap();
    let max = n.parts.iter().map(|r| r.value).fold(0.0, f64::max);
    assert_eq!(n.value, max);
    assert_eq!(n.dominant_report().value, n.value);
    for kind in TentKind::ALL {
        let r = n.part(kind);
        let again = tent_value_at(&tc, &params, kind, &r.witness.cube, r.witness.t).unwrap();
        assert!((again - r.value).abs() <= 1e-12 * r.value.max(1e-300));
        let sum: f64 = r.shells.values().sum();
        assert!((sum - r.value).abs() <= 1e-12 * r.value);
    }
}

#[test]
fn besov_infinity_two_regimes() {
    let beta = 0.75;
    let (j, tau, gamma) = (2, 1.5, -0.5);
    let speed = 2f64.powf(2.0 * j as f64 * beta);
    let idx = WaveletIndex::new(1, j, &[0, 0]);
    let times = log_time_grid(1e-4, 10.0, 8).unwrap();
    let tc = constant_trajectory(idx, &times, |t| {
        let s = t * speed;
        if s >= 1.0 { s.powf(-tau) } else { 1.0 }
    });
    let (a, b) = besov_infinity_parts(&tc, gamma, tau, beta).unwrap();
    let expected = 2f64.powf(j as f64 * (1.0 + gamma));
    assert!((a - expected).abs() < 1e-12 && (b - expected).abs() < 1e-12);
    assert!((besov_infinity_norm(&tc, gamma, tau, beta).unwrap() - 2.0 * expected).abs() < 1e-12);
}

#[test]
fn besov_infinity_of_semigroup_trajectory_is_finite() {
    let params = SpaceParams::default();
    let tc = wavelet_trajectory(8);
    let gamma = params.gamma1 - params.gamma2;
    let v = besov_infinity_norm(&tc, gamma, params.m / params.p, params.beta).unwrap();
    let v0 = besov_infinity_norm(&tc, gamma, 0.0, params.beta).unwrap();
    let tent = tent_norm(&tc, &params, &[0, 1, 2, 3]).unwrap().value;
    assert!(v.is_finite() && v > 0.0 && v0.is_finite() && v0 > 0.0);
    assert!(v <= 10.0 * tent.powf(1.0 / params.q), "{v} vs {tent}");
}

#[test]
fn qspace_direct() {
    let grid = Grid::new(1, 64, 0).unwrap();
    let spec = BasisSpec::new(1, 0, 3, 64, 0).unwrap();
    let constant = SpectralField::from_fn(grid, 1, |_, _| 2.5);
    assert!(qspace_norm_direct(&constant, 0.5, 0.75).unwrap().abs() < 1e-20);
    let big = SpectralField::zeros(Grid::new(1, 128, 0).unwrap(), 1);
    assert!(qspace_norm_direct(&big, 0.5, 0.75).is_err());
    let three = SpectralField::zeros(Grid::new(3, 8, 0).unwrap(), 1);
    assert!(qspace_norm_direct(&three, 0.5, 0.75).is_err());

    let (alpha, beta) = (0.5, 0.75);
    let params = SpaceParams {
        gamma1: alpha - beta + 1.0,
        gamma2: alpha + beta - 1.0,
        p: 2.0,
        q: 2.0,
        ..SpaceParams::default()
    };
    let mut ratios = Vec::new();
    for seed in 0..10 {
        let set = random_set(spec, 500 + seed, 6, 2);
        let f = synthesize(&set, &spec).unwrap();
        let direct = qspace_norm_direct(&f, alpha, beta).unwrap();
        let b = besovq_norm(&set, &params).unwrap().value;
        assert!(direct.is_finite() && direct > 0.0);
        ratios.push(direct / (2.0 * b * b));
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 20.0, "ratios {ratios:?}");
}

#[test]
fn log_grid_shape() {
    let g = log_time_grid(0.01, 1.0, 4).unwrap();
    assert_eq!(g[0], 0.01);
    assert_eq!(*g.last().unwrap(), 1.0);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
    assert!((g[4] / g[0] - 2.0).abs() < 1e-12);
    assert!(log_time_grid(0.0, 1.0, 4).is_err());
}

#[test]
fn report_serialization() {
    let set = random_set(spec2(), 4, 10, 3);
    let r = besovq_norm(&set, &SpaceParams::default()).unwrap();
    let json = r.to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["witness"]["j0"].is_i64());
    assert!(v["witness"]["k0"].is_array());
    assert!(v["shells"].is_object());
    let back: NormReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    write_reports_csv(&path, &[("a".into(), r.clone()), ("b".into(), r)]).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lq_monotonicity(seed in any::<u64>(), nnz in 1usize..40) {
        let set = random_set(spec2(), seed, nnz, 3);
        for (q1, q2) in [(1.5, 2.0), (2.0, 4.0)] {
            let a = besov_norm(&set, 0.1, 2.0, q1).unwrap().value;
            let b = besov_norm(&set, 0.1, 2.0, q2).unwrap().value;
            prop_assert!(b <= a);
            let p1 = SpaceParams::default().with_q(q1);
            let e = check_embedding(&set, &p1, &p1.with_q(q2)).unwrap();
            prop_assert!(e.holds, "{:?}", e);
        }
    }

    #[test]
    fn homogeneity(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let set = random_set(spec2(), seed, 20, 3);
        let params = SpaceParams::default();
        let a = besovq_norm(&set, &params).unwrap().value;
        let b = besovq_norm(&set.scaled(scale), &params).unwrap().value;
        prop_assert!((b - scale * a).abs() <= 1e-12 * scale * a);
        let c = besov_norm(&set.scaled(-scale), 0.3, 1.5, 2.5).unwrap().value;
        let d = besov_norm(&set, 0.3, 1.5, 2.5).unwrap().value;
        prop_assert!((c - scale * d).abs() <= 1e-12 * scale * d);
    }

    #[test]
    fn witness_reproduces_value(seed in any::<u64>(), gamma2 in 0.2f64..1.9) {
        let set = random_set(spec2(), seed, 15, 3);
        let params = SpaceParams { gamma2, ..SpaceParams::default() };
        let r = besovq_norm(&set, &params).unwrap();
        let again = besovq_at(&set, &params, &r.witness.cube).unwrap();
        prop_assert!((again - r.value).abs() <= 1e-12 * r.value);
        let sum: f64 = r.shells.values().sum();
        prop_assert!((sum - r.value.powf(params.q)).abs() <= 1e-12 * sum);
    }
}
