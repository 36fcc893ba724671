use std::collections::HashMap;
use std::f64::consts::{E, TAU};

use proptest::prelude::*;
use weightlab_core::riesz::{
    self, eval_riesz_product, llogl_norm, lp_norm, riesz_lp_norms, sample_riesz, select_index, shift_bound, FtildeSpec,
    RieszSpec,
};
use weightlab_core::{build_ftilde, Error, SampledFunction};

fn spec(epsilon: f64, level: usize) -> RieszSpec {
    RieszSpec::new(epsilon, level).unwrap()
}

fn exact_grid(level: usize) -> usize {
    2 * 3usize.pow(level as u32 + 1)
}

/// Fourier coefficients of `P_n` by expanding the product factor by factor.
fn expanded_coefficients(epsilon: f64, level: usize) -> HashMap<i64, f64> {
    let mut coeffs = HashMap::from([(0i64, 1.0)]);
    for j in 0..=level {
        let f = 3i64.pow(j as u32);
        let mut next = HashMap::new();
        for (&k, &c) in &coeffs {
            *next.entry(k).or_insert(0.0) += c;
            *next.entry(k + f).or_insert(0.0) += c * epsilon / 2.0;
            *next.entry(k - f).or_insert(0.0) += c * epsilon / 2.0;
        }
        coeffs = next;
    }
    coeffs
}

#[test]
fn pointwise_value_matches_extended_precision() {
    // Product evaluated with 50 significant digits.
    let oracle = 0.021_492_867_591_600_6;
    let v = eval_riesz_product(&spec(0.9, 3), 1.0);
    assert!((v - oracle).abs() < 1e-15, "{v}");
}

#[test]
fn integral_and_parseval_are_exact_on_resolving_grids() {
    for epsilon in [0.1, 0.5, 0.9] {
        for level in 0..=8 {
            let f = sample_riesz(&spec(epsilon, level), exact_grid(level)).unwrap();
            let integral = f.integral();
            assert!((integral - TAU).abs() <= 1e-12 * TAU, "eps={epsilon} n={level}");
            let square = TAU * f.values().iter().map(|v| v * v).sum::<f64>() / f.grid_size() as f64;
            let exact = TAU * (1.0 + epsilon * epsilon / 2.0).powi(level as i32 + 1);
            assert!((square - exact).abs() <= 1e-10 * exact, "eps={epsilon} n={level}");
        }
    }
}

#[test]
fn parseval_agrees_with_coefficient_expansion() {
    for level in 0..=6 {
        let epsilon = 0.7;
        let coeffs = expanded_coefficients(epsilon, level);
        assert_eq!(coeffs.len(), 3usize.pow(level as u32 + 1));
        let energy: f64 = coeffs.values().map(|c| c * c).sum();
        let closed = (1.0 + epsilon * epsilon / 2.0).powi(level as i32 + 1);
        assert!((energy - closed).abs() < 1e-12 * closed);
        let f = sample_riesz(&spec(epsilon, level), exact_grid(level)).unwrap();
        let mean_square = f.values().iter().map(|v| v * v).sum::<f64>() / f.grid_size() as f64;
        assert!((mean_square - energy).abs() < 1e-10 * energy);
    }
}

#[test]
fn lp_norm_examples() {
    let p1 = sample_riesz(&spec(0.5, 1), 64).unwrap();
    assert!((lp_norm(&p1, 2.0) - TAU.sqrt() * 1.125).abs() < 1e-12);
    let p4 = sample_riesz(&spec(0.9, 4), exact_grid(4)).unwrap();
    assert!((lp_norm(&p4, 1.0) - TAU).abs() < 1e-12);
    let one = SampledFunction::constant(5, 1.0).unwrap();
    assert!((llogl_norm(&one) - TAU * (E + 1.0).ln()).abs() < 1e-14);
    assert!((llogl_norm(&one) - 8.251_466_539_496_367).abs() < 1e-12);
}

#[test]
fn llogl_norm_matches_refined_quadrature() {
    let s = spec(0.9, 2);
    let grid = 2 * 3usize.pow(6);
    let coarse = llogl_norm(&sample_riesz(&s, grid).unwrap());
    let fine = llogl_norm(&sample_riesz(&s, 8 * grid).unwrap());
    assert!((coarse - fine).abs() < 1e-8 * fine, "{coarse} {fine}");
}

#[test]
fn norm_recursion_matches_sampled_norms() {
    for (epsilon, p) in [(0.9, 1.5), (0.5, 1.25), (0.9, 2.0)] {
        let recursive = riesz_lp_norms(epsilon, p, 6).unwrap();
        for (level, &r) in recursive.iter().enumerate() {
            let f = sample_riesz(&spec(epsilon, level), 16 * exact_grid(level)).unwrap();
            let direct = lp_norm(&f, p);
            assert!((r - direct).abs() < 1e-10 * direct, "eps={epsilon} p={p} n={level}: {r} vs {direct}");
        }
    }
}

#[test]
fn norms_are_nondecreasing() {
    for p in [1.25, 1.5, 2.0] {
        for epsilon in [0.1, 0.5, 0.9] {
            let norms = riesz_lp_norms(epsilon, p, 8).unwrap();
            assert!(norms.windows(2).all(|w| w[1] >= w[0]), "p={p} eps={epsilon}");
        }
    }
}

/// Least `N` with `√(2π)(1 + ε²/2)^{(N+1)/2} >= 4`, by bisection on the closed form.
fn parseval_index(epsilon: f64) -> usize {
    let norm = |n: usize| TAU.sqrt() * (1.0 + epsilon * epsilon / 2.0).powf((n as f64 + 1.0) / 2.0);
    let (mut lo, mut hi) = (0usize, 1usize);
    while norm(hi) < 4.0 {
        hi *= 2;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if norm(mid) >= 4.0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[test]
fn first_level_index_matches_parseval() {
    let sel = select_index(0.9, 1, 64).unwrap();
    assert_eq!(sel.index, parseval_index(0.9));
    assert_eq!(sel.index, 2);
    assert!(sel.monotonicity_violations.is_empty());
    assert!(sel.norm >= 4.0 && sel.norms[sel.index - 1] < 4.0);

    let closed = TAU.sqrt() * (1.0f64 + 0.125).powf(1.5);
    assert!(closed < 4.0);
    assert!(matches!(select_index(0.5, 1, 2), Err(Error::NotFound { level: 1, n_max: 2, .. })));
}

#[test]
fn selected_indices_grow_with_level() {
    let found: Vec<usize> = (1..=3).map(|n| select_index(0.9, n, 200).unwrap().index).collect();
    assert_eq!(found, vec![2, 16, 42]);
    assert!(found.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn single_term_ftilde_is_scaled_product() {
    let grid = exact_grid(2);
    let f = build_ftilde(&FtildeSpec::new(0.9, vec![2]).unwrap(), grid).unwrap();
    let p = sample_riesz(&spec(0.9, 2), grid).unwrap();
    let scale = 0.5 / llogl_norm(&p);
    for (a, b) in f.values().iter().zip(p.values()) {
        assert!((a - scale * b).abs() <= 1e-15 * a.abs().max(1.0));
    }
}

#[test]
fn ftilde_is_in_the_llogl_unit_ball() {
    let grid = 2 * 3usize.pow(8);
    for indices in [vec![2], vec![2, 7], vec![2, 7, 7], vec![1, 3, 5]] {
        let f = build_ftilde(&FtildeSpec::new(0.9, indices.clone()).unwrap(), grid).unwrap();
        assert!(f.min() >= 0.0);
        assert!(llogl_norm(&f) <= 1.0 + 1e-9, "{indices:?}");
    }
}

#[test]
fn shift_bound_holds_at_every_aligned_scale() {
    let grid = 2 * 3usize.pow(7);
    for epsilon in [0.1, 0.5, 0.9] {
        let f = build_ftilde(&FtildeSpec::new(epsilon, vec![2, 5]).unwrap(), grid).unwrap();
        let bound = shift_bound(epsilon) * (1.0 + 1e-12);
        for m in 1..=7 {
            let shifted = f.shifted(grid / 3usize.pow(m));
            for (a, b) in shifted.values().iter().zip(f.values()) {
                assert!(*a <= bound * b && *b <= bound * a, "eps={epsilon} m={m}");
            }
        }
    }
}

#[test]
fn resolution_cap_is_reported() {
    let spec = FtildeSpec::new(0.9, vec![2, 16]).unwrap();
    match build_ftilde(&spec, 2 * 3usize.pow(8)) {
        Err(Error::InsufficientGrid { index, required, .. }) => {
            assert_eq!(index, 16);
            assert_eq!(required, 3u128.pow(17));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(riesz::max_resolved_level(2 * 3usize.pow(8)), Some(7));
}

proptest! {
    #[test]
    fn products_are_nonnegative_and_bounded(epsilon in 0.001f64..0.999, level in 0usize..=8, x in -10.0f64..10.0) {
        let v = eval_riesz_product(&spec(epsilon, level), x);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= (1.0 + epsilon).powi(level as i32 + 1) * (1.0 + 1e-12));
    }

    #[test]
    fn sampled_products_are_nonnegative(epsilon in 0.001f64..0.999, level in 0usize..=8) {
        let f = sample_riesz(&spec(epsilon, level), 729).unwrap();
        prop_assert!(f.min() >= 0.0);
    }
}
