use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weightlab_core::maximal::{maximal_fast, maximal_naive, prefix_sums};
use weightlab_core::riesz::shift_bound;
use weightlab_core::sum::pairwise;
use weightlab_core::{build_ftilde, FtildeSpec, SampledFunction};

fn random_instance(rng: &mut ChaCha8Rng, g: usize) -> SampledFunction {
    let values = match rng.gen_range(0..4) {
        0 => (0..g).map(|_| rng.gen::<f64>()).collect(),
        1 => (0..g).map(|_| rng.gen_range(0..5) as f64).collect(),
        2 => (0..g).map(|_| (-3.0 * rng.gen::<f64>().ln()).exp()).collect(),
        _ => (0..g).map(|_| if rng.gen_bool(0.1) { rng.gen_range(1.0..100.0) } else { 0.0 }).collect(),
    };
    SampledFunction::new(values).unwrap()
}

#[test]
fn fast_equals_naive_on_500_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut checked = 0;
    for g in [7, 64, 243, 1024] {
        for _ in 0..125 {
            let f = random_instance(&mut rng, g);
            let fast = maximal_fast(&f).unwrap();
            let naive = maximal_naive(&f).unwrap();
            assert_eq!(fast, naive, "G={g}");
            checked += 1;
        }
    }
    assert_eq!(checked, 500);
}

#[test]
fn prefix_total_matches_pairwise_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in [10, 1000, 100_000] {
        let v: Vec<f64> = (0..g).map(|_| rng.gen::<f64>() * 1e3).collect();
        let stats = prefix_sums(&SampledFunction::new(v.clone()).unwrap());
        let oracle = pairwise(&v);
        assert!((stats.total() - oracle).abs() <= 1e-15 * oracle * (g as f64).log2());
    }
}

#[test]
fn shift_bound_passes_to_the_maximal_function() {
    let grid = 2 * 3usize.pow(7);
    for epsilon in [0.1, 0.9] {
        let f = build_ftilde(&FtildeSpec::new(epsilon, vec![2, 6]).unwrap(), grid).unwrap();
        let omega = maximal_fast(&f).unwrap().values;
        let bound = shift_bound(epsilon) * (1.0 + 1e-12);
        for m in 1..=7 {
            let shifted = omega.shifted(grid / 3usize.pow(m));
            for (a, b) in shifted.values().iter().zip(omega.values()) {
                assert!(*a <= bound * b && *b <= bound * a, "eps={epsilon} m={m}");
            }
        }
    }
}

#[test]
fn large_grid_runs() {
    let grid = 2 * 3usize.pow(10);
    let f = SampledFunction::from_fn(grid, |x| 1.0 + (1000.0 * x).cos() * x.sin()).unwrap();
    let m = maximal_fast(&f).unwrap();
    assert!(m.values.values().iter().zip(f.values()).all(|(a, b)| a >= &b.abs()));
}
